use std::collections::{BTreeMap, VecDeque};

use salt::Message;
use salt_vm::VmError;

use crate::descriptor::{Ack, Delivery, DispatchStatus, NodeDescriptor};
use crate::node::Node;
use crate::NodeError;

/// Dispatches processed per root stimulus before the rest are dropped.
pub const DEFAULT_CASCADE_LIMIT: usize = 4096;

/// Everything that happened because of one stimulus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Routed {
    /// The root delivery first, then downstream deliveries in the order
    /// they were processed. Dispatch statuses are final.
    pub deliveries: Vec<Delivery>,
    /// Nodes that faulted while handling a forwarded message.
    pub faults: Vec<(String, VmError)>,
}

impl Routed {
    pub fn root(&self) -> Option<&Delivery> {
        self.deliveries.first()
    }

    /// Every emitted message with the id of its emitter.
    pub fn emitted(&self) -> impl Iterator<Item = (&str, &Message)> {
        self.deliveries
            .iter()
            .flat_map(|d| d.emitted.iter().map(move |m| (d.id.as_str(), m)))
    }
}

/// In-process set of nodes that forward external messages to their
/// subscribers.
///
/// Forwarding is breadth first through one FIFO queue, so messages on
/// any single sender to receiver link arrive in emission order.
#[derive(Debug)]
pub struct Network {
    nodes: BTreeMap<String, Node>,
    cascade_limit: usize,
}

impl Default for Network {
    fn default() -> Self {
        Network::new()
    }
}

impl Network {
    pub fn new() -> Self {
        Network {
            nodes: BTreeMap::new(),
            cascade_limit: DEFAULT_CASCADE_LIMIT,
        }
    }

    pub fn with_cascade_limit(mut self, limit: usize) -> Self {
        self.cascade_limit = limit;
        self
    }

    pub fn add(&mut self, node: Node) -> Result<(), NodeError> {
        if self.nodes.contains_key(node.id()) {
            return Err(NodeError::DuplicateNode(node.id().to_string()));
        }
        self.nodes.insert(node.id().to_string(), node);
        Ok(())
    }

    pub fn remove(&mut self, id: &str) -> Option<Node> {
        self.nodes.remove(id)
    }

    pub fn get(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn node(&mut self, id: &str) -> Result<&mut Node, NodeError> {
        self.nodes
            .get_mut(id)
            .ok_or_else(|| NodeError::UnknownNode(id.to_string()))
    }

    pub fn describe(&self, id: &str) -> Result<NodeDescriptor, NodeError> {
        self.get(id)
            .map(Node::describe)
            .ok_or_else(|| NodeError::UnknownNode(id.to_string()))
    }

    pub fn put(
        &mut self,
        id: &str,
        program: &str,
        subscribers: Vec<String>,
    ) -> Result<(Ack, Routed), NodeError> {
        let (ack, delivery) = self.node(id)?.put(program, subscribers)?;
        Ok((ack, self.route(vec![delivery])))
    }

    pub fn post(&mut self, id: &str, message: &Message) -> Result<Routed, NodeError> {
        let delivery = self.node(id)?.post(message)?;
        Ok(self.route(vec![delivery]))
    }

    pub fn sense(&mut self, id: &str, word: &str, args: Vec<String>) -> Result<Routed, NodeError> {
        let delivery = self.node(id)?.sense(word, args)?;
        Ok(self.route(vec![delivery]))
    }

    pub fn delete(&mut self, id: &str) -> Result<Ack, NodeError> {
        Ok(self.node(id)?.delete())
    }

    /// Advances every node's timers, in id order, and forwards what the
    /// expiries emitted. `deliveries` starts with the non-empty timer
    /// deliveries; `faults` also lists nodes whose own timeout failed.
    pub fn tick(&mut self, elapsed: u64) -> Routed {
        let mut roots = Vec::new();
        let mut faults = Vec::new();
        for node in self.nodes.values_mut() {
            match node.tick(elapsed) {
                Ok(d) if !d.is_empty() => roots.push(d),
                Ok(_) => {}
                Err(NodeError::Vm(e)) => faults.push((node.id().to_string(), e)),
                Err(_) => {}
            }
        }
        let mut routed = self.route(roots);
        faults.append(&mut routed.faults);
        routed.faults = faults;
        routed
    }

    fn route(&mut self, roots: Vec<Delivery>) -> Routed {
        let mut routed = Routed {
            deliveries: roots,
            faults: Vec::new(),
        };
        let mut queue: VecDeque<(usize, usize)> = routed
            .deliveries
            .iter()
            .enumerate()
            .flat_map(|(d, delivery)| (0..delivery.dispatched.len()).map(move |i| (d, i)))
            .collect();
        let mut budget = self.cascade_limit;

        while let Some((d, i)) = queue.pop_front() {
            let dispatch = &routed.deliveries[d].dispatched[i];
            let status = if budget == 0 {
                DispatchStatus::Dropped
            } else {
                budget -= 1;
                match self.nodes.get_mut(&dispatch.to) {
                    None => DispatchStatus::UnknownNode,
                    Some(node) => match node.post(&dispatch.message) {
                        Ok(delivery) => {
                            let next = routed.deliveries.len();
                            queue.extend((0..delivery.dispatched.len()).map(|j| (next, j)));
                            routed.deliveries.push(delivery);
                            DispatchStatus::Delivered
                        }
                        Err(NodeError::NoBehaviour) => DispatchStatus::NoBehaviour,
                        Err(NodeError::Vm(e)) => {
                            routed.faults.push((node.id().to_string(), e));
                            DispatchStatus::Faulted
                        }
                        Err(_) => DispatchStatus::Faulted,
                    },
                }
            };
            routed.deliveries[d].dispatched[i].status = status;
        }
        routed
    }
}
