//! Execution engine for one SALT [`Transducer`](salt::Transducer).
//!
//! The engine owns no clock: timers count down in discrete ticks supplied
//! by the host through [`Vm::tick`].

mod store;
mod vm;

pub use store::{apply_logical_set, eval_logical_test, VariableStore};
pub use vm::{Destination, Emission, Emitted, Vm, CHAIN_BUDGET};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VmError {
    #[error("settling did not terminate within {CHAIN_BUDGET} firings (logic loop at state `{state}`)")]
    ChainLimitExceeded { state: String },
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("value `{0}` does not fit in 6 characters")]
    Overflow(String),
    #[error("invalid stimulus: {0}")]
    InvalidStimulus(String),
    #[error("invalid timer duration `{0}`")]
    InvalidTimer(String),
}
