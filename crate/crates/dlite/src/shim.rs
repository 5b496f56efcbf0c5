use std::sync::{Arc, Mutex};

use salt::Message;

/// Receives hardware actuations produced by a node.
pub trait HardwareShim: Send {
    fn actuate(&mut self, node: &str, message: &Message);
}

/// Discards actuations. The node's own hardware log still records them.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullShim;

impl HardwareShim for NullShim {
    fn actuate(&mut self, _: &str, _: &Message) {}
}

/// Appends every actuation to a shared log.
#[derive(Debug, Default, Clone)]
pub struct RecordingShim {
    log: Arc<Mutex<Vec<(String, Message)>>>,
}

impl RecordingShim {
    pub fn new() -> Self {
        Self::default()
    }

    /// Snapshot of the recorded `(node, message)` pairs.
    pub fn entries(&self) -> Vec<(String, Message)> {
        self.log.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

impl HardwareShim for RecordingShim {
    fn actuate(&mut self, node: &str, message: &Message) {
        self.log
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .push((node.to_string(), message.clone()));
    }
}

/// Forwards every actuation to a closure.
pub struct CallbackShim<F>(pub F);

impl<F> HardwareShim for CallbackShim<F>
where
    F: FnMut(&str, &Message) + Send,
{
    fn actuate(&mut self, node: &str, message: &Message) {
        (self.0)(node, message)
    }
}
