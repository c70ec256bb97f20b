//! PDDL front end for the STRIPS fragment with typing, equality and
//! negative preconditions.
//!
//! Everything outside that fragment is rejected with
//! [`ParseError::UnsupportedFeature`] naming the offending construct.

mod parse;
mod plan;
mod print;
pub mod sexpr;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parse::{parse_domain, parse_problem};
pub use plan::{parse_plan, serialize_plan, ActionSignature};

/// The root of every type hierarchy.
pub const OBJECT: &str = "object";

/// Built-in equality predicate, only valid in preconditions.
pub const EQUALITY: &str = "=";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: expected {expected}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
    },
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{predicate}` takes {expected} arguments, got {got}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        got: usize,
    },
    #[error("argument `{arg}` of `{predicate}` has type `{got}`, expected `{expected}`")]
    TypeMismatch {
        predicate: String,
        arg: String,
        expected: String,
        got: String,
    },
    #[error("undeclared object `{0}`")]
    UndeclaredObject(String),
    #[error("problem is declared for domain `{got}` but was paired with `{expected}`")]
    DomainMismatch { expected: String, got: String },
    #[error("goal literal {0} is not ground")]
    NonGroundGoal(String),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("variable `{var}` in `{context}` is not bound by a parameter")]
    UnboundVariable { context: String, var: String },
    #[error("type hierarchy contains a cycle through `{0}`")]
    TypeCycle(String),
    #[error("action `{0}` both adds and deletes the same literal")]
    ConflictingEffects(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Requirement {
    Strips,
    Typing,
    Equality,
    NegativePreconditions,
}

impl Requirement {
    pub fn from_flag(flag: &str) -> Option<Self> {
        match flag {
            ":strips" => Some(Requirement::Strips),
            ":typing" => Some(Requirement::Typing),
            ":equality" => Some(Requirement::Equality),
            ":negative-preconditions" => Some(Requirement::NegativePreconditions),
            _ => None,
        }
    }

    pub fn flag(self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::Equality => ":equality",
            Requirement::NegativePreconditions => ":negative-preconditions",
        }
    }
}

/// A declared type. `parent` is [`OBJECT`] for top-level types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDecl {
    pub name: String,
    pub parent: String,
}

/// A name with a type: an action/predicate parameter (`?x`) or an object.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Typed {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<Typed>,
}

impl PredicateDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    /// A variable, stored with its leading `?`.
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<Typed>,
    pub precondition: Vec<Literal>,
    pub add_effects: Vec<Atom>,
    pub delete_effects: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub name: String,
    pub requirements: BTreeSet<Requirement>,
    pub types: Vec<TypeDecl>,
    pub constants: Vec<Typed>,
    pub predicates: Vec<PredicateDecl>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn has_type(&self, name: &str) -> bool {
        name == OBJECT || self.types.iter().any(|t| t.name == name)
    }

    fn parent_of(&self, name: &str) -> Option<&str> {
        self.types
            .iter()
            .find(|t| t.name == name)
            .map(|t| t.parent.as_str())
    }

    /// True when `ty` equals `ancestor` or lies below it in the hierarchy.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == OBJECT {
            return true;
        }
        let mut current = ty;
        // Hierarchies are acyclic after parsing; the bound guards hand-built domains.
        for _ in 0..=self.types.len() {
            if current == ancestor {
                return true;
            }
            match self.parent_of(current) {
                Some(parent) => current = parent,
                None => return false,
            }
        }
        false
    }
}

/// A predicate applied to constants only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: &[&str]) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for arg in &self.args {
            write!(f, " {arg}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroundLiteral {
    pub atom: GroundAtom,
    pub positive: bool,
}

impl GroundLiteral {
    pub fn pos(atom: GroundAtom) -> Self {
        GroundLiteral { atom, positive: true }
    }

    pub fn neg(atom: GroundAtom) -> Self {
        GroundLiteral {
            atom,
            positive: false,
        }
    }
}

impl fmt::Display for GroundLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "(not {})", self.atom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<Typed>,
    /// Sorted and deduplicated; closed world.
    pub init: Vec<GroundAtom>,
    pub goal: Vec<GroundLiteral>,
}

impl Problem {
    /// Problem objects followed by the domain's constants.
    pub fn all_objects<'a>(&'a self, domain: &'a Domain) -> impl Iterator<Item = &'a Typed> {
        self.objects.iter().chain(domain.constants.iter())
    }
}
