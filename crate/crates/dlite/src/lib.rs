//! D-LITe virtual objects.
//!
//! A [`Node`] couples one SALT VM with the features of the device it
//! stands for and a list of subscribers. It answers the four lifecycle
//! verbs: describe (GET), program (PUT), deliver (POST) and clear
//! (DELETE). A [`Network`] hosts several nodes in-process and forwards
//! every external message a node emits to that node's subscribers.

mod descriptor;
mod error;
mod kind;
mod network;
mod node;
mod shim;

pub use descriptor::{Ack, Delivery, Dispatch, DispatchStatus, FeatureWord, NodeDescriptor, NodeStatus};
pub use error::{NodeError, Rejection};
pub use kind::NodeKind;
pub use network::{Network, Routed, DEFAULT_CASCADE_LIMIT};
pub use node::{Node, SubscriberList};
pub use shim::{CallbackShim, HardwareShim, NullShim, RecordingShim};

/// Platform version reported by GET.
pub const DLITE_VERSION: &str = "1.0";
/// Maximum number of subscribers per node.
pub const MAX_SUBSCRIBERS: usize = 20;
