//! Static checks of a program against the features a node offers.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::catalog::FeatureCatalog;
use crate::message::{Message, MessageKind};
use crate::program::{Input, Transducer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum IssueKind {
    UnsupportedSensingWord {
        word: String,
    },
    UnsupportedActuatingWord {
        word: String,
    },
    ArityMismatch {
        word: String,
        expected: usize,
        found: usize,
    },
    UnreachableState {
        state: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    /// 0-based index of the transition the issue was found in.
    pub transition: usize,
    #[serde(flatten)]
    pub kind: IssueKind,
}

impl ValidationIssue {
    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown feature `{0}`")]
pub struct UnknownFeature(pub String);

/// Checks hardware words and arities against the union of `features`.
///
/// Missing transitions are not reported; partial automata are legal.
/// States that cannot be reached from the initial state are reported
/// as warnings.
pub fn validate_against_features(
    program: &Transducer,
    features: &[String],
    catalog: &FeatureCatalog,
) -> Result<Vec<ValidationIssue>, UnknownFeature> {
    if let Some(missing) = features.iter().find(|f| !catalog.contains(f)) {
        return Err(UnknownFeature(missing.clone()));
    }

    let mut issues = Vec::new();
    for (idx, t) in program.transitions().iter().enumerate() {
        let mut error = |kind| {
            issues.push(ValidationIssue {
                severity: Severity::Error,
                transition: idx,
                kind,
            })
        };

        if let Input::Message(m) = &t.input {
            if m.kind == MessageKind::Hardware {
                match catalog.find_sensing(features, &m.word) {
                    None => error(IssueKind::UnsupportedSensingWord { word: m.word.clone() }),
                    // inputs match on the word; arguments are optional
                    Some(spec) if !m.args.is_empty() && m.args.len() != spec.arity => {
                        error(arity(m, spec.arity))
                    }
                    Some(_) => {}
                }
            }
        }
        for out in t.outputs.iter().filter(|m| m.kind == MessageKind::Hardware) {
            match catalog.find_actuating(features, &out.word) {
                None => error(IssueKind::UnsupportedActuatingWord {
                    word: out.word.clone(),
                }),
                Some(spec) if out.args.len() != spec.arity => error(arity(out, spec.arity)),
                Some(_) => {}
            }
        }
    }

    for state in unreachable_states(program) {
        let transition = program
            .transitions()
            .iter()
            .position(|t| t.from == state || t.to == state)
            .unwrap_or(0);
        issues.push(ValidationIssue {
            severity: Severity::Warning,
            transition,
            kind: IssueKind::UnreachableState { state },
        });
    }
    Ok(issues)
}

fn arity(m: &Message, expected: usize) -> IssueKind {
    IssueKind::ArityMismatch {
        word: m.word.clone(),
        expected,
        found: m.args.len(),
    }
}

fn unreachable_states(program: &Transducer) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([program.initial()]);
    seen.insert(program.initial());
    while let Some(state) = queue.pop_front() {
        for t in program.outgoing(state) {
            if seen.insert(t.to.as_str()) {
                queue.push_back(&t.to);
            }
        }
    }
    program
        .states()
        .into_iter()
        .filter(|s| !seen.contains(s))
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_transducer;

    fn feats(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn errors(src: &str, names: &[&str]) -> Vec<IssueKind> {
        let t = parse_transducer(src).unwrap();
        validate_against_features(&t, &feats(names), &FeatureCatalog::standard())
            .unwrap()
            .into_iter()
            .filter(ValidationIssue::is_error)
            .map(|i| i.kind)
            .collect()
    }

    #[test]
    fn counting_program_is_clean() {
        let src = "x ?e/push !l/=(count,3) counting\n\
                   counting ?e/push !l/-=(count,1) counting\n\
                   counting ?l/==(count,0) !e/reached !h/notify,OK etc";
        assert!(errors(src, &["button", "notification"]).is_empty());
    }

    #[test]
    fn unsupported_actuator() {
        assert_eq!(
            errors("a ?h/push !h/led,on a", &["button"]),
            vec![IssueKind::UnsupportedActuatingWord { word: "led".into() }]
        );
    }

    #[test]
    fn unsupported_sensor() {
        assert_eq!(
            errors("a ?h/push !h/led,on a", &["led"]),
            vec![IssueKind::UnsupportedSensingWord { word: "push".into() }]
        );
    }

    #[test]
    fn sms_arity() {
        assert_eq!(
            errors("a ?e/go !h/sms,123 a", &["sms"]),
            vec![IssueKind::ArityMismatch {
                word: "sms".into(),
                expected: 2,
                found: 1
            }]
        );
        assert!(errors("a ?e/go !h/sms,123,hi a", &["sms"]).is_empty());
    }

    #[test]
    fn sensing_args_optional() {
        assert!(errors("a ?h/positionChanged !e/moved a", &["gps"]).is_empty());
        assert_eq!(errors("a ?h/positionChanged,x !e/moved a", &["gps"]).len(), 1);
    }

    #[test]
    fn unreachable_is_warning() {
        let t = parse_transducer("a ?e/x a\nb ?e/y c").unwrap();
        let issues = validate_against_features(&t, &[], &FeatureCatalog::standard()).unwrap();
        let states: Vec<_> = issues
            .iter()
            .map(|i| {
                assert_eq!(i.severity, Severity::Warning);
                match &i.kind {
                    IssueKind::UnreachableState { state } => state.as_str(),
                    other => panic!("unexpected {other:?}"),
                }
            })
            .collect();
        assert_eq!(states, ["b", "c"]);
    }

    #[test]
    fn unknown_feature() {
        let t = parse_transducer("a ?e/x a").unwrap();
        assert_eq!(
            validate_against_features(&t, &feats(&["laser"]), &FeatureCatalog::standard()),
            Err(UnknownFeature("laser".into()))
        );
    }
}
