use thiserror::Error;

use crate::message::{LogicalOp, Message, MessageError, MessageKind};
use crate::program::{check_state, Input, ProgramError, Transducer, Transition};
use crate::MAX_TRANSITIONS;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    /// 1-based source line.
    pub line: usize,
    /// 1-based character column of the offending token.
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty program")]
    EmptyProgram,
    #[error("a transition needs at least `from input to`")]
    MissingFields,
    #[error("malformed message prefix in `{0}` (expected `?k/` or `!k/` with k in e, l, h)")]
    MalformedPrefix(String),
    #[error("malformed message body `{0}`")]
    MalformedMessage(String),
    #[error("the empty message `.` can only be used as an input")]
    EpsilonOutput,
    #[error("invalid state name `{0}`")]
    InvalidState(String),
    #[error("set operator `{0}` cannot be used as an input")]
    SetOperatorAsInput(String),
    #[error("test operator `{0}` cannot be used as an output")]
    TestOperatorAsOutput(String),
    #[error("more than {MAX_TRANSITIONS} transitions")]
    TooManyTransitions,
    #[error(transparent)]
    Message(#[from] MessageError),
}

impl ParseErrorKind {
    fn at(self, line: usize, column: usize) -> ParseError {
        ParseError {
            line,
            column,
            kind: self,
        }
    }
}

/// Parses SALT source text into a [`Transducer`].
///
/// Transitions keep their source order. Blank lines and `#` comments are
/// skipped.
pub fn parse_transducer(source: &str) -> Result<Transducer, ParseError> {
    let mut transitions = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if transitions.len() == MAX_TRANSITIONS {
            return Err(ParseErrorKind::TooManyTransitions.at(line, 1));
        }
        transitions.push(parse_line(raw, line)?);
    }

    if transitions.is_empty() {
        return Err(ParseErrorKind::EmptyProgram.at(last_line.max(1), 1));
    }
    // Every invariant was checked per line; this only re-wraps.
    Transducer::new(transitions).map_err(|e| program_error(e).at(1, 1))
}

fn program_error(e: ProgramError) -> ParseErrorKind {
    match e {
        ProgramError::Empty => ParseErrorKind::EmptyProgram,
        ProgramError::TooManyTransitions(_) => ParseErrorKind::TooManyTransitions,
        ProgramError::InvalidState(s) => ParseErrorKind::InvalidState(s),
        ProgramError::SetOperatorAsInput(s) => ParseErrorKind::SetOperatorAsInput(s),
        ProgramError::TestOperatorAsOutput(s) => ParseErrorKind::TestOperatorAsOutput(s),
        ProgramError::Message(m) => ParseErrorKind::Message(m),
    }
}

/// Splits a line into whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut col = 0;
    let mut start_col = 0;
    for (byte, c) in line.char_indices() {
        col += 1;
        match (c.is_whitespace(), start) {
            (false, None) => {
                start = Some(byte);
                start_col = col;
            }
            (true, Some(s)) => {
                out.push((start_col, &line[s..byte]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((start_col, &line[s..]));
    }
    out
}

fn parse_line(raw: &str, line: usize) -> Result<Transition, ParseError> {
    let toks = tokens(raw);
    if toks.len() < 3 {
        let col = toks.first().map_or(1, |t| t.0);
        return Err(ParseErrorKind::MissingFields.at(line, col));
    }

    let (from_col, from) = toks[0];
    let (to_col, to) = toks[toks.len() - 1];
    check_state(from).map_err(|e| program_error(e).at(line, from_col))?;
    check_state(to).map_err(|e| program_error(e).at(line, to_col))?;

    let (in_col, in_tok) = toks[1];
    let input = match parse_message(in_tok, '?').map_err(|k| k.at(line, in_col))? {
        None => Input::Epsilon,
        Some(m) => {
            if let Some(op) = m.logical_op().filter(|op| op.is_set()) {
                return Err(ParseErrorKind::SetOperatorAsInput(op.symbol().into()).at(line, in_col));
            }
            Input::Message(m)
        }
    };

    let mut outputs = Vec::new();
    for &(col, tok) in &toks[2..toks.len() - 1] {
        let m = parse_message(tok, '!')
            .map_err(|k| k.at(line, col))?
            .ok_or_else(|| ParseErrorKind::EpsilonOutput.at(line, col))?;
        if let Some(op) = m.logical_op().filter(|op| op.is_test()) {
            return Err(ParseErrorKind::TestOperatorAsOutput(op.symbol().into()).at(line, col));
        }
        outputs.push(m);
    }

    Ok(Transition {
        from: from.to_string(),
        input,
        outputs,
        to: to.to_string(),
    })
}

/// Parses `?k/body` or `!k/body`. `?.` yields `None` (epsilon).
fn parse_message(tok: &str, prefix: char) -> Result<Option<Message>, ParseErrorKind> {
    let mut chars = tok.chars();
    if chars.next() != Some(prefix) {
        return Err(ParseErrorKind::MalformedPrefix(tok.to_string()));
    }
    let rest = chars.as_str();
    if rest == "." {
        return Ok(None);
    }
    let mut chars = rest.chars();
    let kind = chars
        .next()
        .and_then(MessageKind::from_char)
        .ok_or_else(|| ParseErrorKind::MalformedPrefix(tok.to_string()))?;
    if chars.next() != Some('/') {
        return Err(ParseErrorKind::MalformedPrefix(tok.to_string()));
    }
    let body = chars.as_str();
    if body.is_empty() {
        return Err(ParseErrorKind::MalformedMessage(tok.to_string()));
    }

    let (word, args) = split_body(body).ok_or_else(|| ParseErrorKind::MalformedMessage(body.to_string()))?;
    if kind == MessageKind::Logical && LogicalOp::from_symbol(word).is_none() {
        return Err(MessageError::UnknownOperator(word.to_string()).into());
    }
    Ok(Some(Message::new(kind, word, args)?))
}

/// Accepts both `word(a,b)` and `word,a,b`.
fn split_body(body: &str) -> Option<(&str, Vec<&str>)> {
    if let Some(open) = body.find('(') {
        let inner = body[open + 1..].strip_suffix(')')?;
        if inner.contains(['(', ')']) {
            return None;
        }
        let args = if inner.is_empty() {
            Vec::new()
        } else {
            inner.split(',').collect()
        };
        Some((&body[..open], args))
    } else {
        if body.contains(')') {
            return None;
        }
        let mut parts = body.split(',');
        let word = parts.next()?;
        Some((word, parts.collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COUNTING: &str = "x ?e/push !l/=(count,3) counting\n\
                          counting ?e/push !l/-=(count,1) counting\n\
                          counting ?l/==(count,0) !e/reached !h/notify,OK etc";

    #[test]
    fn single_transition() {
        let t = parse_transducer("x ?e/push !l/=(count,3) counting").unwrap();
        assert_eq!(t.initial(), "x");
        assert_eq!(t.transitions().len(), 1);
        let tr = &t.transitions()[0];
        assert_eq!(tr.from, "x");
        assert_eq!(tr.input, Input::Message(Message::external("push").unwrap()));
        assert_eq!(
            tr.outputs,
            vec![Message::logical(LogicalOp::Set, "count", "3").unwrap()]
        );
        assert_eq!(tr.to, "counting");
    }

    #[test]
    fn counting_program() {
        let t = parse_transducer(COUNTING).unwrap();
        assert_eq!(t.transitions().len(), 3);
        assert_eq!(
            t.transitions()[2].outputs,
            vec![
                Message::external("reached").unwrap(),
                Message::hardware("notify", ["OK"]).unwrap()
            ]
        );
        assert_eq!(t.to_string(), COUNTING);
    }

    #[test]
    fn empty_sources() {
        for src in ["", "\n\n", "# only a comment\n   \n"] {
            assert_eq!(
                parse_transducer(src).unwrap_err().kind,
                ParseErrorKind::EmptyProgram
            );
        }
    }

    #[test]
    fn both_argument_notations() {
        let a = parse_transducer("off ?e/push !h/led(on) on").unwrap();
        let b = parse_transducer("off ?e/push !h/led,on on").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "off ?e/push !h/led,on on");
    }

    #[test]
    fn epsilon_round_trip() {
        let src = "a ?. !l/=(i,0) b";
        let t = parse_transducer(src).unwrap();
        assert_eq!(t.transitions()[0].input, Input::Epsilon);
        assert_eq!(t.to_string(), src);
    }

    #[test]
    fn comments_and_order() {
        let src = "# counter\n\na ?e/x b\n   # indented comment\nb ?e/y a\n";
        let t = parse_transducer(src).unwrap();
        let words: Vec<_> = t
            .transitions()
            .iter()
            .map(|tr| tr.input.message().unwrap().word.as_str())
            .collect();
        assert_eq!(words, ["x", "y"]);
    }

    #[test]
    fn error_positions() {
        let err = parse_transducer("a ?e/on a\nb  ?x/on b").unwrap_err();
        assert_eq!((err.line, err.column), (2, 4));
        assert!(matches!(err.kind, ParseErrorKind::MalformedPrefix(_)));

        // a missing target state leaves an output in the last column
        let err = parse_transducer("a ?e/on !e/on").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::InvalidState("!e/on".into()));

        let err = parse_transducer("a ?e/on").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingFields);

        let err = parse_transducer("a !e/on b").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::MalformedPrefix(_)));

        let err = parse_transducer("a ?e/on !. b").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::EpsilonOutput);
    }

    #[test]
    fn logical_errors() {
        let err = parse_transducer("a ?l/==(x) b").unwrap_err();
        assert!(matches!(
            err.kind,
            ParseErrorKind::Message(MessageError::LogicalArity { found: 1, .. })
        ));

        let err = parse_transducer("a ?l/=(x,1) b").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::SetOperatorAsInput("=".into()));

        let err = parse_transducer("a ?e/go !l/<(x,1) b").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::TestOperatorAsOutput("<".into()));
        assert_eq!(err.column, 9);

        let err = parse_transducer("a ?l/~(x,1) b").unwrap_err();
        assert!(matches!(
            err.kind,
            ParseErrorKind::Message(MessageError::UnknownOperator(_))
        ));
    }

    #[test]
    fn long_tokens() {
        let err = parse_transducer("a ?e/go !h/notify,TOOLONG b").unwrap_err();
        assert_eq!(
            err.kind,
            ParseErrorKind::Message(MessageError::ArgTooLong("TOOLONG".into()))
        );
        let err = parse_transducer("a ?e/go !l/=(counter,1) b").unwrap_err();
        assert!(matches!(
            err.kind,
            ParseErrorKind::Message(MessageError::ArgTooLong(_))
        ));
        // words and states are names, not data
        assert!(parse_transducer("waiting ?h/positionChanged !e/reached waiting").is_ok());
    }

    #[test]
    fn transition_limit() {
        let line = "a ?e/on !e/on a\n";
        assert_eq!(
            parse_transducer(&line.repeat(50)).unwrap().transitions().len(),
            50
        );
        let err = parse_transducer(&line.repeat(51)).unwrap_err();
        assert_eq!((err.kind, err.line), (ParseErrorKind::TooManyTransitions, 51));
    }

    #[test]
    fn divide_operator_body() {
        let t = parse_transducer("a ?e/go !l//=(x,2) a").unwrap();
        assert_eq!(t.transitions()[0].outputs[0].logical_op(), Some(LogicalOp::Div));
        assert_eq!(t.to_string(), "a ?e/go !l//=(x,2) a");
    }
}
