use std::collections::BTreeMap;

use salt::{LogicalOp, MAX_DATA_LEN};
use serde::Serialize;

use crate::VmError;

/// Variables of one running transducer. Names and values are data tokens
/// of at most six characters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct VariableStore {
    vars: BTreeMap<String, String>,
}

impl VariableStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.vars.get(name).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.vars.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn clear(&mut self) {
        self.vars.clear();
    }

    /// One level of indirection: a token naming a variable yields its
    /// value, anything else is taken literally.
    pub fn resolve<'a>(&'a self, token: &'a str) -> &'a str {
        self.get(token).unwrap_or(token)
    }

    pub(crate) fn insert(&mut self, name: &str, value: String) -> Option<String> {
        self.vars.insert(name.to_string(), value)
    }

    pub(crate) fn remove(&mut self, name: &str) -> Option<String> {
        self.vars.remove(name)
    }

    /// Evaluates a test operator (`==`, `!=`, `<`, `>`, `<=`, `>=`).
    pub fn test(&self, op: LogicalOp, var: &str, value: &str) -> bool {
        eval_logical_test(op, var, value, self)
    }

    /// Applies a set operator (`=`, `+=`, `-=`, `*=`, `/=`). The store is
    /// left untouched on error.
    pub fn apply(&mut self, op: LogicalOp, var: &str, value: &str) -> Result<(), VmError> {
        apply_logical_set(op, var, value, self)
    }
}

fn int(s: &str) -> Option<i64> {
    s.parse().ok()
}

/// Total function: malformed comparisons are false, never errors.
///
/// An undefined `var` makes every test false except `!=`.
pub fn eval_logical_test(op: LogicalOp, var: &str, value: &str, vars: &VariableStore) -> bool {
    let rhs = vars.resolve(value);
    let Some(lhs) = vars.get(var) else {
        return op == LogicalOp::Ne;
    };
    match op {
        LogicalOp::Eq | LogicalOp::Ne => {
            let equal = match (int(lhs), int(rhs)) {
                (Some(a), Some(b)) => a == b,
                _ => lhs == rhs,
            };
            equal == (op == LogicalOp::Eq)
        }
        LogicalOp::Lt | LogicalOp::Gt | LogicalOp::Le | LogicalOp::Ge => {
            let (Some(a), Some(b)) = (int(lhs), int(rhs)) else {
                return false;
            };
            match op {
                LogicalOp::Lt => a < b,
                LogicalOp::Gt => a > b,
                LogicalOp::Le => a <= b,
                _ => a >= b,
            }
        }
        _ => false,
    }
}

pub fn apply_logical_set(
    op: LogicalOp,
    var: &str,
    value: &str,
    vars: &mut VariableStore,
) -> Result<(), VmError> {
    let rhs = vars.resolve(value);
    let result = match op {
        LogicalOp::Set => rhs.to_string(),
        LogicalOp::Add | LogicalOp::Sub | LogicalOp::Mul | LogicalOp::Div => {
            let current = vars
                .get(var)
                .ok_or_else(|| VmError::Arithmetic(format!("variable `{var}` is undefined")))?;
            let a = int(current)
                .ok_or_else(|| VmError::Arithmetic(format!("`{var}` = `{current}` is not an integer")))?;
            let b = int(rhs).ok_or_else(|| VmError::Arithmetic(format!("`{rhs}` is not an integer")))?;
            let n = match op {
                LogicalOp::Add => a.checked_add(b),
                LogicalOp::Sub => a.checked_sub(b),
                LogicalOp::Mul => a.checked_mul(b),
                _ if b == 0 => return Err(VmError::Arithmetic(format!("division of `{var}` by zero"))),
                _ => a.checked_div(b),
            };
            n.ok_or_else(|| VmError::Overflow(format!("{a}{op}{b}")))?
                .to_string()
        }
        test => return Err(VmError::Arithmetic(format!("`{test}` is not a set operator"))),
    };
    if result.chars().count() > MAX_DATA_LEN {
        return Err(VmError::Overflow(result));
    }
    vars.insert(var, result);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use LogicalOp::*;

    fn store(pairs: &[(&str, &str)]) -> VariableStore {
        let mut s = VariableStore::new();
        for (k, v) in pairs {
            s.insert(k, v.to_string());
        }
        s
    }

    #[test]
    fn tests_from_examples() {
        assert!(store(&[("count", "0")]).test(Eq, "count", "0"));
        assert!(store(&[("i", "2")]).test(Lt, "i", "3"));
        assert!(store(&[("i", "5"), ("j", "5")]).test(Ge, "i", "j"));
    }

    #[test]
    fn integer_vs_string_equality() {
        let s = store(&[("n", "007"), ("w", "on")]);
        assert!(s.test(Eq, "n", "7"));
        assert!(s.test(Eq, "w", "on"));
        assert!(s.test(Ne, "w", "off"));
        // ordering needs integers on both sides
        assert!(!s.test(Lt, "w", "zz"));
        assert!(!s.test(Gt, "n", "w"));
    }

    #[test]
    fn undefined_variable() {
        // exhaustive over the test operators on an empty store
        let empty = VariableStore::new();
        for op in LogicalOp::ALL.into_iter().filter(|op| op.is_test()) {
            assert_eq!(empty.test(op, "x", "0"), op == Ne, "{op}");
        }
    }

    #[test]
    fn set_and_arithmetic() {
        let mut s = VariableStore::new();
        s.apply(Set, "count", "3").unwrap();
        assert_eq!(s.get("count"), Some("3"));
        s.apply(Sub, "count", "1").unwrap();
        assert_eq!(s.get("count"), Some("2"));

        let mut s = store(&[("x", "12345")]);
        s.apply(Mul, "x", "0").unwrap();
        assert_eq!(s.get("x"), Some("0"));

        let mut s = store(&[("a", "7"), ("b", "-2")]);
        s.apply(Div, "a", "b").unwrap();
        assert_eq!(s.get("a"), Some("-3"));
        s.apply(Set, "c", "a").unwrap();
        assert_eq!(s.get("c"), Some("-3"));
    }

    #[test]
    fn arithmetic_errors_leave_store() {
        let mut s = store(&[("x", "1"), ("w", "on")]);
        let before = s.clone();
        assert!(matches!(s.apply(Add, "w", "1"), Err(VmError::Arithmetic(_))));
        assert!(matches!(s.apply(Add, "x", "w"), Err(VmError::Arithmetic(_))));
        assert!(matches!(s.apply(Div, "x", "0"), Err(VmError::Arithmetic(_))));
        assert!(matches!(s.apply(Add, "nope", "1"), Err(VmError::Arithmetic(_))));
        assert_eq!(s, before);
    }

    #[test]
    fn six_character_bound() {
        let mut s = store(&[("x", "999999")]);
        assert_eq!(s.apply(Add, "x", "1"), Err(VmError::Overflow("1000000".into())));
        let mut s = store(&[("x", "-99999")]);
        assert_eq!(s.apply(Sub, "x", "1"), Err(VmError::Overflow("-100000".into())));
        let mut s = store(&[("x", "-50000")]);
        s.apply(Add, "x", "-49999").unwrap();
        assert_eq!(s.get("x"), Some("-99999"));
    }
}
