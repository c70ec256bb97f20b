//! Plan files: one `(name arg1 ... argk)` per line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::sexpr::{read_all, syntax_error, SExpr};
use super::ParseError;

/// The name and constant arguments of a ground action, e.g. `(stack a b)`.
///
/// Ordering is lexicographic by name, then arguments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionSignature {
    pub name: String,
    pub args: Vec<String>,
}

impl ActionSignature {
    pub fn new(name: impl Into<String>, args: &[&str]) -> Self {
        ActionSignature {
            name: name.into().to_lowercase(),
            args: args.iter().map(|a| a.to_lowercase()).collect(),
        }
    }

    fn from_sexpr(e: &SExpr) -> Result<Self, ParseError> {
        let items = e
            .as_list()
            .ok_or_else(|| syntax_error(e.pos(), "`(action args...)`"))?;
        let mut symbols = items.iter().map(|i| {
            i.as_symbol()
                .map(str::to_string)
                .ok_or_else(|| syntax_error(i.pos(), "action name or argument"))
        });
        let name = symbols
            .next()
            .ok_or_else(|| syntax_error(e.pos(), "action name"))??;
        let args = symbols.collect::<Result<Vec<_>, _>>()?;
        Ok(ActionSignature { name, args })
    }
}

impl fmt::Display for ActionSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for ActionSignature {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let exprs = read_all(s)?;
        match exprs.as_slice() {
            [one] => ActionSignature::from_sexpr(one),
            [] => Err(ParseError::Syntax {
                line: 1,
                column: 1,
                expected: "`(action args...)`".into(),
            }),
            [_, second, ..] => Err(syntax_error(second.pos(), "end of action")),
        }
    }
}

impl Serialize for ActionSignature {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ActionSignature {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Render a plan in the classical plan-file format.
pub fn serialize_plan(plan: &[ActionSignature]) -> String {
    let mut out = String::new();
    for step in plan {
        out.push_str(&step.to_string());
        out.push('\n');
    }
    out
}

/// Parse a plan file. Blank lines and `;` comments are ignored; each
/// remaining line holds exactly one action.
pub fn parse_plan(text: &str) -> Result<Vec<ActionSignature>, ParseError> {
    let mut plan = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        let step = trimmed.parse::<ActionSignature>().map_err(|e| match e {
            ParseError::Syntax { column, expected, .. } => ParseError::Syntax {
                line: i + 1,
                column,
                expected,
            },
            other => other,
        })?;
        plan.push(step);
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn serialize_examples() {
        assert_eq!(serialize_plan(&[ActionSignature::new("pick-up", &["a"])]), "(pick-up a)\n");
        assert_eq!(serialize_plan(&[]), "");
        assert_eq!(
            serialize_plan(&[
                ActionSignature::new("unstack", &["c", "a"]),
                ActionSignature::new("put-down", &["c"]),
            ]),
            "(unstack c a)\n(put-down c)\n"
        );
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_plan("(pick-up a)\n").unwrap(), vec![ActionSignature::new("pick-up", &["a"])]);
        assert_eq!(parse_plan("").unwrap(), vec![]);
        assert_eq!(
            parse_plan("(unstack c a)\n(put-down c)\n").unwrap(),
            vec![
                ActionSignature::new("unstack", &["c", "a"]),
                ActionSignature::new("put-down", &["c"]),
            ]
        );
    }

    #[test]
    fn comments_blank_lines_and_case() {
        let text = "; plan found\n\n  (PICK-UP A)  \n; cost = 1 (unit cost)\n";
        assert_eq!(parse_plan(text).unwrap(), vec![ActionSignature::new("pick-up", &["a"])]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_plan("(pick-up a)\n\n(stack a\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, .. }), "{err:?}");
        let err = parse_plan("(a) (b)\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));
        let err = parse_plan("pick-up a\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));
    }

    #[test]
    fn serde_uses_plan_text() {
        let sig = ActionSignature::new("stack", &["a", "b"]);
        let json = serde_json::to_string(&sig).unwrap();
        assert_eq!(json, "\"(stack a b)\"");
        assert_eq!(serde_json::from_str::<ActionSignature>(&json).unwrap(), sig);
    }

    fn arb_name() -> impl Strategy<Value = String> {
        "[a-z][a-z0-9_-]{0,8}"
    }

    proptest! {
        #[test]
        fn plan_round_trips(plan in prop::collection::vec(
            (arb_name(), prop::collection::vec(arb_name(), 0..4))
                .prop_map(|(name, args)| ActionSignature { name, args }),
            0..20,
        )) {
            prop_assert_eq!(parse_plan(&serialize_plan(&plan)).unwrap(), plan);
        }
    }
}
