use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Mutex, MutexGuard};

use dlite::{Ack, Delivery, Network, Node, NodeDescriptor, NodeError, NodeKind, NodeStatus, Routed};
use salt::{Message, MessageKind};
use serde::Serialize;
use tokio::sync::watch;

use crate::events::{EventKind, EventLog};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeSummary {
    pub id: String,
    pub kind: NodeKind,
    pub programmed: bool,
    pub state: Option<String>,
    pub faulted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Created {
    pub kind: NodeKind,
    #[serde(flatten)]
    pub descriptor: NodeDescriptor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fault {
    pub node: String,
    pub error: String,
}

/// A delivery to one node plus everything it caused downstream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    #[serde(flatten)]
    pub delivery: Delivery,
    /// Deliveries to subscribers, in processing order.
    pub cascade: Vec<Delivery>,
    pub faults: Vec<Fault>,
}

impl Outcome {
    fn from_routed(id: &str, routed: Routed) -> Outcome {
        let mut deliveries = routed.deliveries.into_iter();
        Outcome {
            delivery: deliveries.next().unwrap_or_else(|| Delivery::empty(id)),
            cascade: deliveries.collect(),
            faults: faults(routed.faults),
        }
    }
}

fn faults(list: Vec<(String, salt_vm::VmError)>) -> Vec<Fault> {
    list.into_iter()
        .map(|(node, e)| Fault {
            node,
            error: e.to_string(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TickReport {
    pub ticks: u64,
    /// Timer deliveries and their cascades, in processing order.
    pub deliveries: Vec<Delivery>,
    pub faults: Vec<Fault>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Programmed {
    #[serde(flatten)]
    pub ack: Ack,
    /// What the program emitted while settling from its initial state.
    pub boot: Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClockStatus {
    pub running: bool,
    pub ticks: u64,
    pub rate: f64,
}

struct Nodes {
    network: Network,
    kinds: BTreeMap<String, NodeKind>,
    next_auto: u64,
}

/// Nodes, event history and clock shared by all requests.
///
/// Operations take one lock for the whole network so that an operation,
/// its cascade and the events it publishes are never interleaved with
/// another operation.
pub struct Registry {
    nodes: Mutex<Nodes>,
    events: EventLog,
    running: AtomicBool,
    ticks: AtomicU64,
    rate: f64,
    shutdown: watch::Sender<bool>,
}

impl Registry {
    pub fn new(buffer: usize, tick_rate: f64, running: bool) -> Registry {
        Registry {
            nodes: Mutex::new(Nodes {
                network: Network::new(),
                kinds: BTreeMap::new(),
                next_auto: 1,
            }),
            events: EventLog::new(buffer),
            running: AtomicBool::new(running),
            ticks: AtomicU64::new(0),
            rate: tick_rate,
            shutdown: watch::channel(false).0,
        }
    }

    pub fn events(&self) -> &EventLog {
        &self.events
    }

    fn lock(&self) -> MutexGuard<'_, Nodes> {
        self.nodes.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn create(&self, kind: NodeKind, id: Option<String>) -> Result<Created, NodeError> {
        let mut nodes = self.lock();
        let id = match id {
            Some(id) => id,
            None => loop {
                let candidate = format!("{kind}{}", nodes.next_auto);
                nodes.next_auto += 1;
                if nodes.network.get(&candidate).is_none() {
                    break candidate;
                }
            },
        };
        nodes.network.add(Node::new(id.clone(), kind.features())?)?;
        nodes.kinds.insert(id.clone(), kind);
        Ok(Created {
            kind,
            descriptor: nodes.network.describe(&id)?,
        })
    }

    pub fn list(&self) -> Vec<NodeSummary> {
        let nodes = self.lock();
        nodes
            .network
            .nodes()
            .map(|n| NodeSummary {
                id: n.id().to_string(),
                kind: nodes.kinds[n.id()],
                programmed: n.is_programmed(),
                state: n.state().map(str::to_string),
                faulted: n.fault().is_some(),
            })
            .collect()
    }

    pub fn describe(&self, id: &str) -> Result<NodeDescriptor, NodeError> {
        self.lock().network.describe(id)
    }

    pub fn status(&self, id: &str) -> Result<NodeStatus, NodeError> {
        self.lock()
            .network
            .get(id)
            .map(Node::status)
            .ok_or_else(|| NodeError::UnknownNode(id.to_string()))
    }

    pub fn put(&self, id: &str, program: &str, subscribers: Vec<String>) -> Result<Programmed, NodeError> {
        let mut nodes = self.lock();
        let (ack, routed) = nodes.network.put(id, program, subscribers)?;
        self.events
            .publish(id, EventKind::Programmed, None, ack.state.clone());
        self.publish_routed(&routed);
        Ok(Programmed {
            ack,
            boot: Outcome::from_routed(id, routed),
        })
    }

    pub fn delete(&self, id: &str) -> Result<Ack, NodeError> {
        let mut nodes = self.lock();
        let ack = nodes.network.delete(id)?;
        self.events.publish(id, EventKind::Cleared, None, None);
        Ok(ack)
    }

    pub fn post(&self, id: &str, message: &Message) -> Result<Outcome, NodeError> {
        let mut nodes = self.lock();
        let result = nodes.network.post(id, message);
        self.finish(id, result)
    }

    pub fn sense(&self, id: &str, word: &str, args: Vec<String>) -> Result<Outcome, NodeError> {
        let mut nodes = self.lock();
        let message = Message::hardware(word, args.clone())?;
        let result = nodes.network.sense(id, word, args);
        if matches!(result, Ok(_) | Err(NodeError::Vm(_))) {
            self.events
                .publish(id, EventKind::SensorInjected, Some(message), None);
        }
        self.finish(id, result)
    }

    /// Advances every node's timers by `ticks`, one tick at a time.
    pub fn tick(&self, ticks: u64) -> TickReport {
        let mut nodes = self.lock();
        let mut report = TickReport {
            ticks,
            deliveries: Vec::new(),
            faults: Vec::new(),
        };
        for _ in 0..ticks {
            let routed = nodes.network.tick(1);
            self.ticks.fetch_add(1, Ordering::Relaxed);
            self.publish_routed(&routed);
            report.faults.extend(faults(routed.faults));
            report.deliveries.extend(routed.deliveries);
        }
        report
    }

    fn finish(&self, id: &str, result: Result<Routed, NodeError>) -> Result<Outcome, NodeError> {
        match result {
            Ok(routed) => {
                self.publish_routed(&routed);
                Ok(Outcome::from_routed(id, routed))
            }
            Err(NodeError::Vm(e)) => {
                self.events
                    .publish(id, EventKind::Faulted, None, Some(e.to_string()));
                Err(NodeError::Vm(e))
            }
            Err(e) => Err(e),
        }
    }

    fn publish_routed(&self, routed: &Routed) {
        for d in &routed.deliveries {
            for m in &d.emitted {
                let kind = match m.kind {
                    MessageKind::Hardware => EventKind::Actuated,
                    _ => EventKind::Emitted,
                };
                self.events.publish(&d.id, kind, Some(m.clone()), None);
            }
        }
        for (node, e) in &routed.faults {
            self.events
                .publish(node, EventKind::Faulted, None, Some(e.to_string()));
        }
    }

    pub fn clock(&self) -> ClockStatus {
        ClockStatus {
            running: self.running.load(Ordering::Relaxed),
            ticks: self.ticks.load(Ordering::Relaxed),
            rate: self.rate,
        }
    }

    pub fn set_running(&self, running: bool) {
        self.running.store(running, Ordering::Relaxed);
    }

    pub fn is_running(&self) -> bool {
        self.running.load(Ordering::Relaxed)
    }

    pub fn tick_rate(&self) -> f64 {
        self.rate
    }

    /// Ends every open event stream.
    pub fn shutdown(&self) {
        self.shutdown.send_replace(true);
    }

    pub fn shutdown_signal(&self) -> watch::Receiver<bool> {
        self.shutdown.subscribe()
    }
}
