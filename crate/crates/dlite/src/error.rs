use salt::{MessageError, ParseError, UnknownFeature, ValidationIssue};
use salt_vm::VmError;
use thiserror::Error;

use crate::MAX_SUBSCRIBERS;

/// Why a PUT was refused. The previous behaviour is kept in every case.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("program does not match the node features: {}", describe_issues(.0))]
    Validation(Vec<ValidationIssue>),
    #[error("{0} subscribers (at most {MAX_SUBSCRIBERS})")]
    TooManySubscribers(usize),
    #[error("subscriber `{0}` listed twice")]
    DuplicateSubscriber(String),
    #[error("invalid subscriber address `{0}`")]
    InvalidSubscriber(String),
    #[error("program failed while starting: {0}")]
    Start(VmError),
}

fn describe_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("transition {}: {:?}", i.transition, i.kind))
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NodeError {
    #[error("no node `{0}`")]
    UnknownNode(String),
    #[error("invalid node id `{0}`")]
    InvalidId(String),
    #[error(transparent)]
    UnknownFeature(#[from] UnknownFeature),
    #[error("node `{0}` already exists")]
    DuplicateNode(String),
    #[error("node has no behaviour")]
    NoBehaviour,
    #[error("node is faulted until reprogrammed: {0}")]
    Faulted(VmError),
    #[error(transparent)]
    Vm(#[from] VmError),
    #[error("only external messages can be posted to a node")]
    NotExternal,
    #[error("node does not sense `{0}`")]
    UnsupportedSensingWord(String),
    #[error("`{word}` takes {expected} arguments, got {found}")]
    SensingArity {
        word: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    InvalidMessage(#[from] MessageError),
    #[error(transparent)]
    Rejected(#[from] Rejection),
}
