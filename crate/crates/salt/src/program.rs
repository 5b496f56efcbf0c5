use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::message::{is_name, Message, MessageError, MessageKind};
use crate::{MAX_NAME_LEN, MAX_TRANSITIONS};

/// Transition input: a message to match, or the empty message.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Input {
    Epsilon,
    Message(Message),
}

impl Input {
    pub fn message(&self) -> Option<&Message> {
        match self {
            Input::Epsilon => None,
            Input::Message(m) => Some(m),
        }
    }
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Input::Epsilon => f.write_str("?."),
            Input::Message(m) => f.write_str(&m.as_input()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: String,
    pub input: Input,
    pub outputs: Vec<Message>,
    pub to: String,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.from, self.input)?;
        for out in &self.outputs {
            write!(f, " {}", out.as_output())?;
        }
        write!(f, " {}", self.to)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("program has no transitions")]
    Empty,
    #[error("program has {0} transitions, at most {MAX_TRANSITIONS} are allowed")]
    TooManyTransitions(usize),
    #[error("invalid state name `{0}`")]
    InvalidState(String),
    #[error("set operator `{0}` cannot be used as an input")]
    SetOperatorAsInput(String),
    #[error("test operator `{0}` cannot be used as an output")]
    TestOperatorAsOutput(String),
    #[error(transparent)]
    Message(#[from] MessageError),
}

/// A SALT program.
///
/// The initial state is the source state of the first transition; final
/// states are implicit (states without outgoing transitions).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transducer {
    transitions: Vec<Transition>,
}

impl Transducer {
    pub fn new(transitions: Vec<Transition>) -> Result<Self, ProgramError> {
        if transitions.is_empty() {
            return Err(ProgramError::Empty);
        }
        if transitions.len() > MAX_TRANSITIONS {
            return Err(ProgramError::TooManyTransitions(transitions.len()));
        }
        for t in &transitions {
            check_transition(t)?;
        }
        Ok(Transducer { transitions })
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> &str {
        &self.transitions[0].from
    }

    /// All state names, sorted.
    pub fn states(&self) -> BTreeSet<&str> {
        self.transitions
            .iter()
            .flat_map(|t| [t.from.as_str(), t.to.as_str()])
            .collect()
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.transitions.iter().any(|t| t.from == name || t.to == name)
    }

    /// Transitions leaving `state`, in declaration order.
    pub fn outgoing<'a>(&'a self, state: &'a str) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions.iter().filter(move |t| t.from == state)
    }

    /// Input messages the program reacts to (Σ).
    pub fn input_alphabet(&self) -> BTreeSet<String> {
        self.transitions
            .iter()
            .filter_map(|t| t.input.message())
            .map(|m| m.to_string())
            .collect()
    }

    /// Output messages the program can produce (Γ).
    pub fn output_alphabet(&self) -> BTreeSet<String> {
        self.transitions
            .iter()
            .flat_map(|t| t.outputs.iter())
            .map(|m| m.to_string())
            .collect()
    }

    /// States with no outgoing transitions.
    pub fn terminal_states(&self) -> BTreeSet<&str> {
        let sources: BTreeSet<&str> = self.transitions.iter().map(|t| t.from.as_str()).collect();
        self.states()
            .into_iter()
            .filter(|s| !sources.contains(s))
            .collect()
    }
}

/// Canonical text: one transition per line, single spaces, comma form
/// for external and hardware arguments.
impl fmt::Display for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.transitions.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

pub fn print_transducer(t: &Transducer) -> String {
    t.to_string()
}

pub(crate) fn check_state(name: &str) -> Result<(), ProgramError> {
    if is_name(name) && name.len() <= MAX_NAME_LEN {
        Ok(())
    } else {
        Err(ProgramError::InvalidState(name.to_string()))
    }
}

fn check_transition(t: &Transition) -> Result<(), ProgramError> {
    check_state(&t.from)?;
    check_state(&t.to)?;
    if let Input::Message(m) = &t.input {
        m.check()?;
        if let Some(op) = m.logical_op() {
            if op.is_set() {
                return Err(ProgramError::SetOperatorAsInput(op.symbol().to_string()));
            }
        }
    }
    for out in &t.outputs {
        out.check()?;
        if out.kind == MessageKind::Logical {
            if let Some(op) = out.logical_op().filter(|op| op.is_test()) {
                return Err(ProgramError::TestOperatorAsOutput(op.symbol().to_string()));
            }
        }
    }
    Ok(())
}
