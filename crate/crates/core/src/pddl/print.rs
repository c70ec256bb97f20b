//! PDDL pretty-printing. Output re-parses to a structurally equal value.

use std::fmt::{self, Display, Formatter, Write};

use super::{ActionSchema, Atom, Domain, Literal, Problem, Typed, OBJECT};

fn typed_list(f: &mut Formatter<'_>, items: &[Typed]) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_char(' ')?;
        }
        write!(f, "{} - {}", t.name, t.ty)?;
    }
    Ok(())
}

impl Display for Atom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {}", a.name())?;
        }
        f.write_char(')')
    }
}

impl Display for Literal {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "(not {})", self.atom)
        }
    }
}

fn conjunction<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    f.write_str("(and")?;
    for item in items {
        write!(f, " {item}")?;
    }
    f.write_char(')')
}

impl Display for ActionSchema {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "  (:action {}\n    :parameters (", self.name)?;
        typed_list(f, &self.params)?;
        f.write_str(")\n    :precondition ")?;
        conjunction(f, &self.precondition)?;
        f.write_str("\n    :effect (and")?;
        for a in &self.delete_effects {
            write!(f, " (not {a})")?;
        }
        for a in &self.add_effects {
            write!(f, " {a}")?;
        }
        f.write_str("))")
    }
}

impl Display for Domain {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            f.write_str("  (:requirements")?;
            for r in &self.requirements {
                write!(f, " {}", r.flag())?;
            }
            f.write_str(")\n")?;
        }
        if !self.types.is_empty() {
            f.write_str("  (:types")?;
            for t in &self.types {
                write!(f, " {} - {}", t.name, t.parent)?;
            }
            f.write_str(")\n")?;
        }
        if !self.constants.is_empty() {
            f.write_str("  (:constants ")?;
            typed_list(f, &self.constants)?;
            f.write_str(")\n")?;
        }
        f.write_str("  (:predicates")?;
        for p in &self.predicates {
            write!(f, " ({}", p.name)?;
            if !p.params.is_empty() {
                f.write_char(' ')?;
                typed_list(f, &p.params)?;
            }
            f.write_char(')')?;
        }
        f.write_str(")\n")?;
        for a in &self.actions {
            writeln!(f, "{a}")?;
        }
        f.write_str(")\n")
    }
}

impl Display for Problem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain_name)?;
        f.write_str("  (:objects")?;
        for o in &self.objects {
            if o.ty == OBJECT {
                write!(f, " {}", o.name)?;
            } else {
                write!(f, " {} - {}", o.name, o.ty)?;
            }
        }
        f.write_str(")\n  (:init")?;
        for a in &self.init {
            write!(f, " {a}")?;
        }
        f.write_str(")\n  (:goal ")?;
        conjunction(f, &self.goal)?;
        f.write_str("))\n")
    }
}
