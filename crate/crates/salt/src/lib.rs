//! SALT: textual descriptions of finite state transducers.
//!
//! A program is an ordered list of transitions, one per line:
//!
//! ```text
//! x        ?e/push       !l/=(count,3)              counting
//! counting ?e/push       !l/-=(count,1)             counting
//! counting ?l/==(count,0) !e/reached !h/notify,OK   etc
//! ```
//!
//! Each line reads `from input output... to`. Inputs start with `?`,
//! outputs with `!`, followed by the message kind (`e`xternal,
//! `l`ogical, `h`ardware), a `/` and the message body. `?.` is the
//! empty (epsilon) input. Blank lines and lines starting with `#` are
//! ignored.

pub mod catalog;
pub mod message;
pub mod parse;
pub mod program;
pub mod validate;

pub use catalog::{Feature, FeatureCatalog, WordSpec};
pub use message::{LogicalOp, Message, MessageError, MessageKind};
pub use parse::{parse_transducer, ParseError, ParseErrorKind};
pub use program::{print_transducer, Input, ProgramError, Transducer, Transition};
pub use validate::{validate_against_features, IssueKind, Severity, UnknownFeature, ValidationIssue};

/// Maximum length of a data token: message arguments, variable names and values.
pub const MAX_DATA_LEN: usize = 6;
/// Maximum length of a state name or a message word.
pub const MAX_NAME_LEN: usize = 24;
/// Maximum number of transitions in one program.
pub const MAX_TRANSITIONS: usize = 50;
