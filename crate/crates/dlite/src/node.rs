use std::fmt;

use salt::{parse_transducer, validate_against_features, FeatureCatalog, Message, MessageKind};
use salt_vm::{Destination, Emission, Vm, VmError};

use crate::descriptor::{Ack, Delivery, Dispatch, DispatchStatus, FeatureWord, NodeDescriptor, NodeStatus};
use crate::shim::{HardwareShim, NullShim};
use crate::{NodeError, Rejection, DLITE_VERSION, MAX_SUBSCRIBERS};

/// Longest accepted node id.
pub const MAX_ID_LEN: usize = 64;

/// Node ids and subscriber addresses: 1 to 64 of `[A-Za-z0-9_.:-]`.
pub fn is_valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= MAX_ID_LEN
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | ':'))
}

/// Ordered, duplicate-free list of at most 20 node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubscriberList(Vec<String>);

impl SubscriberList {
    pub fn new(ids: Vec<String>) -> Result<Self, Rejection> {
        if ids.len() > MAX_SUBSCRIBERS {
            return Err(Rejection::TooManySubscribers(ids.len()));
        }
        for (i, id) in ids.iter().enumerate() {
            if !is_valid_id(id) {
                return Err(Rejection::InvalidSubscriber(id.clone()));
            }
            if ids[..i].contains(id) {
                return Err(Rejection::DuplicateSubscriber(id.clone()));
            }
        }
        Ok(SubscriberList(ids))
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

struct Behaviour {
    vm: Vm,
    subscribers: SubscriberList,
    fault: Option<VmError>,
}

/// A virtual object: hardware features plus an optional behaviour.
///
/// A node whose program raises an error stays faulted, refusing
/// deliveries, until the next successful PUT or a DELETE.
pub struct Node {
    id: String,
    features: Vec<String>,
    catalog: FeatureCatalog,
    behaviour: Option<Behaviour>,
    hardware_log: Vec<Message>,
    shim: Box<dyn HardwareShim>,
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Node")
            .field("id", &self.id)
            .field("features", &self.features)
            .field("state", &self.state())
            .finish_non_exhaustive()
    }
}

impl Node {
    /// A node using the standard feature catalog.
    pub fn new(id: impl Into<String>, features: Vec<String>) -> Result<Node, NodeError> {
        Node::with_catalog(id, features, FeatureCatalog::standard())
    }

    pub fn with_catalog(
        id: impl Into<String>,
        features: Vec<String>,
        catalog: FeatureCatalog,
    ) -> Result<Node, NodeError> {
        let id = id.into();
        if !is_valid_id(&id) {
            return Err(NodeError::InvalidId(id));
        }
        if let Some(f) = features.iter().find(|f| !catalog.contains(f)) {
            return Err(salt::UnknownFeature(f.clone()).into());
        }
        Ok(Node {
            id,
            features,
            catalog,
            behaviour: None,
            hardware_log: Vec::new(),
            shim: Box::new(NullShim),
        })
    }

    pub fn with_shim(mut self, shim: impl HardwareShim + 'static) -> Self {
        self.shim = Box::new(shim);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn is_programmed(&self) -> bool {
        self.behaviour.is_some()
    }

    pub fn state(&self) -> Option<&str> {
        self.behaviour.as_ref().map(|b| b.vm.current())
    }

    pub fn fault(&self) -> Option<&VmError> {
        self.behaviour.as_ref().and_then(|b| b.fault.as_ref())
    }

    pub fn vm(&self) -> Option<&Vm> {
        self.behaviour.as_ref().map(|b| &b.vm)
    }

    pub fn subscribers(&self) -> &[String] {
        self.behaviour.as_ref().map_or(&[], |b| b.subscribers.as_slice())
    }

    /// Every actuation performed so far, across programs.
    pub fn hardware_log(&self) -> &[Message] {
        &self.hardware_log
    }

    /// GET.
    pub fn describe(&self) -> NodeDescriptor {
        let words = |sensing: bool| {
            self.features
                .iter()
                .filter_map(|name| self.catalog.get(name))
                .flat_map(|f| {
                    let list = if sensing { &f.sensing } else { &f.actuating };
                    list.iter().map(|w| FeatureWord {
                        feature: f.name.clone(),
                        word: w.word.clone(),
                        arity: w.arity,
                    })
                })
                .collect()
        };
        NodeDescriptor {
            id: self.id.clone(),
            version: DLITE_VERSION.to_string(),
            features: self.features.clone(),
            sensing: words(true),
            actuating: words(false),
        }
    }

    pub fn status(&self) -> NodeStatus {
        let vm = self.vm();
        NodeStatus {
            id: self.id.clone(),
            features: self.features.clone(),
            program: vm.map(|vm| vm.program().to_string()),
            state: vm.map(|vm| vm.current().to_string()),
            vars: vm
                .map(|vm| {
                    vm.vars()
                        .iter()
                        .map(|(k, v)| (k.to_string(), v.to_string()))
                        .collect()
                })
                .unwrap_or_default(),
            subscribers: self.subscribers().to_vec(),
            timers: vm.map(|vm| vm.pending_timers().collect()).unwrap_or_default(),
            faulted: self.fault().map(ToString::to_string),
            hardware_log: self.hardware_log.clone(),
        }
    }

    /// PUT: replaces the behaviour and subscribers, or keeps both unchanged
    /// on any rejection. The returned delivery holds what the new program
    /// emitted while settling from its initial state.
    pub fn put(&mut self, program: &str, subscribers: Vec<String>) -> Result<(Ack, Delivery), Rejection> {
        let transducer = parse_transducer(program)?;
        let issues = validate_against_features(&transducer, &self.features, &self.catalog)
            .expect("features are checked on construction");
        let errors: Vec<_> = issues.into_iter().filter(|i| i.is_error()).collect();
        if !errors.is_empty() {
            return Err(Rejection::Validation(errors));
        }
        let subscribers = SubscriberList::new(subscribers)?;
        let (vm, emission) = Vm::new(transducer).map_err(Rejection::Start)?;

        let ack = Ack {
            id: self.id.clone(),
            state: Some(vm.current().to_string()),
        };
        self.behaviour = Some(Behaviour {
            vm,
            subscribers,
            fault: None,
        });
        Ok((ack, self.finish(emission)))
    }

    /// POST: delivers one external message.
    pub fn post(&mut self, message: &Message) -> Result<Delivery, NodeError> {
        if message.kind != MessageKind::External {
            return Err(NodeError::NotExternal);
        }
        message.check()?;
        self.run(|vm| vm.step(message))
    }

    /// Injects a hardware reading from one of the node's sensing features.
    pub fn sense(&mut self, word: &str, args: Vec<String>) -> Result<Delivery, NodeError> {
        let spec = self
            .catalog
            .find_sensing(&self.features, word)
            .ok_or_else(|| NodeError::UnsupportedSensingWord(word.to_string()))?;
        if spec.arity != args.len() {
            return Err(NodeError::SensingArity {
                word: word.to_string(),
                expected: spec.arity,
                found: args.len(),
            });
        }
        let message = Message::hardware(word, args)?;
        self.run(|vm| vm.step(&message))
    }

    /// DELETE: drops the behaviour and subscribers. Idempotent.
    pub fn delete(&mut self) -> Ack {
        self.behaviour = None;
        Ack {
            id: self.id.clone(),
            state: None,
        }
    }

    /// Advances timers. Unprogrammed or faulted nodes ignore the clock.
    pub fn tick(&mut self, elapsed: u64) -> Result<Delivery, NodeError> {
        match &self.behaviour {
            Some(b) if b.fault.is_none() => self.run(|vm| vm.tick(elapsed)),
            _ => Ok(Delivery::empty(&self.id)),
        }
    }

    fn run(&mut self, f: impl FnOnce(&mut Vm) -> Result<Emission, VmError>) -> Result<Delivery, NodeError> {
        let b = self.behaviour.as_mut().ok_or(NodeError::NoBehaviour)?;
        if let Some(fault) = &b.fault {
            return Err(NodeError::Faulted(fault.clone()));
        }
        match f(&mut b.vm) {
            Ok(emission) => Ok(self.finish(emission)),
            Err(e) => {
                b.fault = Some(e.clone());
                Err(NodeError::Vm(e))
            }
        }
    }

    /// Actuates hardware messages and addresses external ones.
    fn finish(&mut self, emission: Emission) -> Delivery {
        let mut delivery = Delivery::empty(&self.id);
        let subscribers = self.subscribers().to_vec();
        for e in emission {
            match e.destination {
                Destination::Internal => continue,
                Destination::ToHardware => {
                    self.shim.actuate(&self.id, &e.message);
                    self.hardware_log.push(e.message.clone());
                }
                Destination::ToSubscribers => {
                    delivery.dispatched.extend(subscribers.iter().map(|to| Dispatch {
                        to: to.clone(),
                        message: e.message.clone(),
                        status: DispatchStatus::Pending,
                    }));
                }
            }
            delivery.emitted.push(e.message);
        }
        delivery
    }
}
