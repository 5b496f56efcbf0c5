use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{MAX_DATA_LEN, MAX_NAME_LEN};

/// The three message kinds, serialized as `e`, `l` and `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MessageKind {
    #[serde(rename = "e")]
    External,
    #[serde(rename = "l")]
    Logical,
    #[serde(rename = "h")]
    Hardware,
}

impl MessageKind {
    pub fn as_char(self) -> char {
        match self {
            MessageKind::External => 'e',
            MessageKind::Logical => 'l',
            MessageKind::Hardware => 'h',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'e' => Some(MessageKind::External),
            'l' => Some(MessageKind::Logical),
            'h' => Some(MessageKind::Hardware),
            _ => None,
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Operators carried by logical messages.
///
/// Set operators (`=`, `+=`, ...) only appear as outputs; test operators
/// (`==`, `<`, ...) only appear as inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicalOp {
    Set,
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl LogicalOp {
    pub const ALL: [LogicalOp; 11] = [
        LogicalOp::Set,
        LogicalOp::Add,
        LogicalOp::Sub,
        LogicalOp::Mul,
        LogicalOp::Div,
        LogicalOp::Eq,
        LogicalOp::Ne,
        LogicalOp::Lt,
        LogicalOp::Gt,
        LogicalOp::Le,
        LogicalOp::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            LogicalOp::Set => "=",
            LogicalOp::Add => "+=",
            LogicalOp::Sub => "-=",
            LogicalOp::Mul => "*=",
            LogicalOp::Div => "/=",
            LogicalOp::Eq => "==",
            LogicalOp::Ne => "!=",
            LogicalOp::Lt => "<",
            LogicalOp::Gt => ">",
            LogicalOp::Le => "<=",
            LogicalOp::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        LogicalOp::ALL.into_iter().find(|op| op.symbol() == s)
    }

    pub fn is_test(self) -> bool {
        matches!(
            self,
            LogicalOp::Eq | LogicalOp::Ne | LogicalOp::Lt | LogicalOp::Gt | LogicalOp::Le | LogicalOp::Ge
        )
    }

    pub fn is_set(self) -> bool {
        !self.is_test()
    }
}

impl fmt::Display for LogicalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for LogicalOp {
    type Err = MessageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LogicalOp::from_symbol(s).ok_or_else(|| MessageError::UnknownOperator(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MessageError {
    #[error("message word is empty")]
    EmptyWord,
    #[error("invalid character in word `{0}`")]
    InvalidWord(String),
    #[error("word `{0}` is longer than {MAX_NAME_LEN} characters")]
    WordTooLong(String),
    #[error("invalid argument `{0}`")]
    InvalidArg(String),
    #[error("argument `{0}` is longer than {MAX_DATA_LEN} characters")]
    ArgTooLong(String),
    #[error("unknown logical operator `{0}`")]
    UnknownOperator(String),
    #[error("logical `{op}` takes exactly 2 arguments, found {found}")]
    LogicalArity { op: String, found: usize },
    #[error("`{0}` is not a valid variable name")]
    InvalidVariable(String),
}

/// A typed stimulus: kind, word and an ordered argument list.
///
/// For logical messages the word is the operator symbol and the two
/// arguments are the variable name and the value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub kind: MessageKind,
    pub word: String,
    #[serde(default)]
    pub args: Vec<String>,
}

impl Message {
    /// Builds a message after checking word and argument syntax.
    pub fn new<W, I, A>(kind: MessageKind, word: W, args: I) -> Result<Self, MessageError>
    where
        W: Into<String>,
        I: IntoIterator<Item = A>,
        A: Into<String>,
    {
        let msg = Message {
            kind,
            word: word.into(),
            args: args.into_iter().map(Into::into).collect(),
        };
        msg.check()?;
        Ok(msg)
    }

    pub fn external(word: impl Into<String>) -> Result<Self, MessageError> {
        Message::new(MessageKind::External, word, Vec::<String>::new())
    }

    pub fn hardware<I, A>(word: impl Into<String>, args: I) -> Result<Self, MessageError>
    where
        I: IntoIterator<Item = A>,
        A: Into<String>,
    {
        Message::new(MessageKind::Hardware, word, args)
    }

    pub fn logical(
        op: LogicalOp,
        var: impl Into<String>,
        value: impl Into<String>,
    ) -> Result<Self, MessageError> {
        Message::new(MessageKind::Logical, op.symbol(), [var.into(), value.into()])
    }

    /// The operator of a logical message, if this is one.
    pub fn logical_op(&self) -> Option<LogicalOp> {
        match self.kind {
            MessageKind::Logical => LogicalOp::from_symbol(&self.word),
            _ => None,
        }
    }

    /// Re-validates the invariants of a message built field by field.
    pub fn check(&self) -> Result<(), MessageError> {
        match self.kind {
            MessageKind::Logical => {
                LogicalOp::from_symbol(&self.word)
                    .ok_or_else(|| MessageError::UnknownOperator(self.word.clone()))?;
                if self.args.len() != 2 {
                    return Err(MessageError::LogicalArity {
                        op: self.word.clone(),
                        found: self.args.len(),
                    });
                }
                check_variable(&self.args[0])?;
                check_arg(&self.args[1])
            }
            MessageKind::External | MessageKind::Hardware => {
                check_word(&self.word)?;
                self.args.iter().try_for_each(|a| check_arg(a))
            }
        }
    }

    /// Body text without the `?k/` or `!k/` prefix.
    ///
    /// Logical messages print as `op(var,value)`, the others as
    /// `word` or `word,arg,...`.
    pub fn body(&self) -> String {
        match self.kind {
            MessageKind::Logical => format!("{}({})", self.word, self.args.join(",")),
            _ if self.args.is_empty() => self.word.clone(),
            _ => format!("{},{}", self.word, self.args.join(",")),
        }
    }

    pub fn as_input(&self) -> String {
        format!("?{}/{}", self.kind, self.body())
    }

    pub fn as_output(&self) -> String {
        format!("!{}/{}", self.kind, self.body())
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.kind, self.body())
    }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(crate) fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_name_char)
}

pub(crate) fn check_word(word: &str) -> Result<(), MessageError> {
    if word.is_empty() {
        return Err(MessageError::EmptyWord);
    }
    if !is_name(word) {
        return Err(MessageError::InvalidWord(word.to_string()));
    }
    if word.chars().count() > MAX_NAME_LEN {
        return Err(MessageError::WordTooLong(word.to_string()));
    }
    Ok(())
}

pub(crate) fn check_arg(arg: &str) -> Result<(), MessageError> {
    if arg.is_empty() || !arg.chars().all(|c| is_name_char(c) || c == '-' || c == '$') {
        return Err(MessageError::InvalidArg(arg.to_string()));
    }
    if arg.chars().count() > MAX_DATA_LEN {
        return Err(MessageError::ArgTooLong(arg.to_string()));
    }
    Ok(())
}

/// Variable names are data tokens that start with a letter or `_`.
pub fn check_variable(name: &str) -> Result<(), MessageError> {
    check_arg(name)?;
    let first = name.chars().next().unwrap_or('0');
    if !(first.is_ascii_alphabetic() || first == '_') || !is_name(name) {
        return Err(MessageError::InvalidVariable(name.to_string()));
    }
    Ok(())
}
