use std::collections::BTreeMap;

use salt::Message;
use serde::{Deserialize, Serialize};

/// A hardware word offered by one of the node's features.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureWord {
    pub feature: String,
    pub word: String,
    pub arity: usize,
}

/// Answer to GET: what the node is and what it can do.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDescriptor {
    pub id: String,
    pub version: String,
    pub features: Vec<String>,
    pub sensing: Vec<FeatureWord>,
    pub actuating: Vec<FeatureWord>,
}

/// Successful PUT or DELETE.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ack {
    pub id: String,
    /// Current state after a PUT, absent after a DELETE.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DispatchStatus {
    /// Not yet handed to the recipient.
    Pending,
    Delivered,
    UnknownNode,
    NoBehaviour,
    /// Recipient was faulted, or faulted while handling the message.
    Faulted,
    /// The cascade exceeded its message limit before this one.
    Dropped,
}

/// One external message addressed to one subscriber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dispatch {
    pub to: String,
    pub message: Message,
    pub status: DispatchStatus,
}

/// Result of handing one stimulus to a node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Delivery {
    pub id: String,
    /// External and hardware messages, in emission order.
    pub emitted: Vec<Message>,
    /// External messages times subscribers, in emission then subscriber order.
    pub dispatched: Vec<Dispatch>,
}

impl Delivery {
    pub fn empty(id: &str) -> Self {
        Delivery {
            id: id.to_string(),
            emitted: Vec::new(),
            dispatched: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.emitted.is_empty()
    }
}

/// Runtime view of a node, beyond its descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeStatus {
    pub id: String,
    pub features: Vec<String>,
    pub program: Option<String>,
    pub state: Option<String>,
    pub vars: BTreeMap<String, String>,
    pub subscribers: Vec<String>,
    pub timers: Vec<(u64, u64)>,
    pub faulted: Option<String>,
    pub hardware_log: Vec<Message>,
}
