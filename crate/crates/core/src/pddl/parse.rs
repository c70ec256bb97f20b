use std::collections::{BTreeSet, HashMap, HashSet};

use super::sexpr::{read_document, syntax_error, Pos, SExpr};
use super::{
    ActionSchema, Atom, Domain, GroundAtom, GroundLiteral, Literal, ParseError, PredicateDecl,
    Problem, Requirement, Term, TypeDecl, Typed, EQUALITY, OBJECT,
};

type Result<T> = std::result::Result<T, ParseError>;

fn list<'a>(e: &'a SExpr, expected: &str) -> Result<&'a [SExpr]> {
    e.as_list().ok_or_else(|| syntax_error(e.pos(), expected))
}

fn symbol<'a>(e: &'a SExpr, expected: &str) -> Result<&'a str> {
    e.as_symbol().ok_or_else(|| syntax_error(e.pos(), expected))
}

fn is_var(s: &str) -> bool {
    s.starts_with('?')
}

fn check_identifier(e: &SExpr, name: &str, variable: bool) -> Result<()> {
    let ok = if variable {
        is_var(name) && name.len() > 1
    } else {
        !name.is_empty() && !is_var(name) && !name.starts_with(':') && name != "-"
    };
    if ok {
        Ok(())
    } else if variable {
        Err(syntax_error(e.pos(), "variable starting with `?`"))
    } else {
        Err(syntax_error(e.pos(), "name"))
    }
}

/// Parse `a b - t c - u d` into typed names. Untyped trailing names get `object`.
fn typed_list(items: &[SExpr], variables: bool) -> Result<Vec<(Typed, Pos)>> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut iter = items.iter();
    while let Some(item) = iter.next() {
        match item {
            SExpr::Symbol(s, _) if s == "-" => {
                let ty_expr = iter
                    .next()
                    .ok_or_else(|| syntax_error(item.pos(), "type name after `-`"))?;
                if ty_expr.head() == Some("either") {
                    return Err(ParseError::UnsupportedFeature("either".into()));
                }
                let ty = symbol(ty_expr, "type name")?;
                check_identifier(ty_expr, ty, false)?;
                if pending.is_empty() {
                    return Err(syntax_error(item.pos(), "name before `-`"));
                }
                out.extend(pending.drain(..).map(|(name, pos)| {
                    (
                        Typed {
                            name,
                            ty: ty.to_string(),
                        },
                        pos,
                    )
                }));
            }
            SExpr::Symbol(s, pos) => {
                check_identifier(item, s, variables)?;
                pending.push((s.clone(), *pos));
            }
            SExpr::List(_, pos) => {
                return Err(syntax_error(
                    *pos,
                    if variables { "variable" } else { "name" },
                ))
            }
        }
    }
    out.extend(pending.into_iter().map(|(name, pos)| {
        (
            Typed {
                name,
                ty: OBJECT.to_string(),
            },
            pos,
        )
    }));
    Ok(out)
}

fn requirements(items: &[SExpr]) -> Result<BTreeSet<Requirement>> {
    let mut out = BTreeSet::new();
    for item in items {
        let flag = symbol(item, "requirement flag")?;
        let req = Requirement::from_flag(flag)
            .ok_or_else(|| ParseError::UnsupportedFeature(flag.to_string()))?;
        out.insert(req);
    }
    Ok(out)
}

const UNSUPPORTED_CONDITIONS: &[&str] = &["or", "imply", "exists", "forall", "<", ">", "<=", ">="];
const UNSUPPORTED_EFFECTS: &[&str] = &[
    "forall",
    "when",
    "increase",
    "decrease",
    "assign",
    "scale-up",
    "scale-down",
];

fn atom(e: &SExpr) -> Result<Atom> {
    let items = list(e, "atomic formula")?;
    let (head, rest) = items
        .split_first()
        .ok_or_else(|| syntax_error(e.pos(), "predicate name"))?;
    let predicate = symbol(head, "predicate name")?.to_string();
    let args = rest
        .iter()
        .map(|a| {
            let s = symbol(a, "term")?;
            Ok(if is_var(s) {
                Term::Var(s.to_string())
            } else {
                Term::Const(s.to_string())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Atom { predicate, args })
}

/// Flatten a conjunction of literals; `()` is the empty conjunction.
fn conjunction(e: &SExpr, out: &mut Vec<Literal>) -> Result<()> {
    let items = list(e, "condition")?;
    let Some(head) = items.first() else {
        return Ok(());
    };
    let head = symbol(head, "connective or predicate name")?;
    match head {
        "and" => {
            for item in &items[1..] {
                conjunction(item, out)?;
            }
        }
        "not" => {
            if items.len() != 2 {
                return Err(syntax_error(e.pos(), "exactly one formula inside `not`"));
            }
            let inner_head = items[1].head();
            if let Some(h) = inner_head.filter(|h| UNSUPPORTED_CONDITIONS.contains(h) || *h == "and" || *h == "not") {
                return Err(ParseError::UnsupportedFeature(format!("not {h}")));
            }
            out.push(Literal {
                atom: atom(&items[1])?,
                positive: false,
            });
        }
        h if UNSUPPORTED_CONDITIONS.contains(&h) => {
            return Err(ParseError::UnsupportedFeature(h.to_string()))
        }
        _ => out.push(Literal {
            atom: atom(e)?,
            positive: true,
        }),
    }
    Ok(())
}

fn effects(e: &SExpr, adds: &mut Vec<Atom>, dels: &mut Vec<Atom>) -> Result<()> {
    let items = list(e, "effect")?;
    let Some(head) = items.first() else {
        return Ok(());
    };
    let head = symbol(head, "connective or predicate name")?;
    match head {
        "and" => {
            for item in &items[1..] {
                effects(item, adds, dels)?;
            }
        }
        "not" => {
            if items.len() != 2 {
                return Err(syntax_error(e.pos(), "exactly one atom inside `not`"));
            }
            dels.push(atom(&items[1])?);
        }
        h if UNSUPPORTED_EFFECTS.contains(&h) => {
            return Err(ParseError::UnsupportedFeature(h.to_string()))
        }
        _ => adds.push(atom(e)?),
    }
    Ok(())
}

fn dedup<T: Ord + Clone>(items: &mut Vec<T>) {
    let mut seen = BTreeSet::new();
    items.retain(|x| seen.insert(x.clone()));
}

/// Type hierarchy helper shared by domain and problem checks.
struct Types<'a> {
    domain: &'a Domain,
}

impl Types<'_> {
    fn ensure(&self, ty: &str) -> Result<()> {
        if self.domain.has_type(ty) {
            Ok(())
        } else {
            Err(ParseError::UnknownType(ty.to_string()))
        }
    }

    fn compatible(&self, a: &str, b: &str) -> bool {
        self.domain.is_subtype(a, b) || self.domain.is_subtype(b, a)
    }
}

fn check_atom_shape(domain: &Domain, atom: &Atom) -> Result<()> {
    let expected = if atom.predicate == EQUALITY {
        2
    } else {
        domain
            .predicate(&atom.predicate)
            .ok_or_else(|| ParseError::UnknownPredicate(atom.predicate.clone()))?
            .arity()
    };
    if atom.args.len() != expected {
        return Err(ParseError::ArityMismatch {
            predicate: atom.predicate.clone(),
            expected,
            got: atom.args.len(),
        });
    }
    Ok(())
}

/// Arity, binding and typing checks for one literal inside an action schema.
fn check_schema_atom(
    domain: &Domain,
    action: &str,
    params: &HashMap<&str, &str>,
    constants: &HashMap<&str, &str>,
    atom: &Atom,
) -> Result<()> {
    check_atom_shape(domain, atom)?;
    let types = Types { domain };
    for (i, term) in atom.args.iter().enumerate() {
        let actual = match term {
            Term::Var(v) => *params.get(v.as_str()).ok_or_else(|| ParseError::UnboundVariable {
                context: action.to_string(),
                var: v.clone(),
            })?,
            Term::Const(c) => *constants
                .get(c.as_str())
                .ok_or_else(|| ParseError::UndeclaredObject(c.clone()))?,
        };
        if atom.predicate == EQUALITY {
            continue;
        }
        let expected = &domain.predicate(&atom.predicate).expect("checked above").params[i].ty;
        if !types.compatible(actual, expected) {
            return Err(ParseError::TypeMismatch {
                predicate: atom.predicate.clone(),
                arg: term.name().to_string(),
                expected: expected.clone(),
                got: actual.to_string(),
            });
        }
    }
    Ok(())
}

fn check_type_hierarchy(types: &[TypeDecl]) -> Result<()> {
    let parents: HashMap<&str, &str> = types
        .iter()
        .map(|t| (t.name.as_str(), t.parent.as_str()))
        .collect();
    for t in types {
        if t.parent != OBJECT && !parents.contains_key(t.parent.as_str()) {
            return Err(ParseError::UnknownType(t.parent.clone()));
        }
        let mut seen = HashSet::new();
        let mut current = t.name.as_str();
        while current != OBJECT {
            if !seen.insert(current) {
                return Err(ParseError::TypeCycle(t.name.clone()));
            }
            current = parents[current];
        }
    }
    Ok(())
}

#[derive(Default)]
struct DomainSections<'a> {
    requirements: Option<&'a [SExpr]>,
    types: Option<&'a [SExpr]>,
    constants: Option<&'a [SExpr]>,
    predicates: Option<&'a [SExpr]>,
    actions: Vec<&'a [SExpr]>,
}

fn set_once<'a>(slot: &mut Option<&'a [SExpr]>, value: &'a [SExpr], name: &str) -> Result<()> {
    if slot.replace(value).is_some() {
        return Err(ParseError::Duplicate {
            kind: "section",
            name: name.to_string(),
        });
    }
    Ok(())
}

fn define_header<'a>(doc: &'a SExpr, kind: &str) -> Result<(String, &'a [SExpr])> {
    let items = list(doc, "`(define ...)`")?;
    if items.first().and_then(SExpr::as_symbol) != Some("define") {
        return Err(syntax_error(doc.pos(), "`define`"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| syntax_error(doc.pos(), format!("`({kind} <name>)`")))?;
    let header_items = list(header, &format!("`({kind} <name>)`"))?;
    match header_items {
        [SExpr::Symbol(k, _), name] if k == kind => {
            let name = symbol(name, "name")?;
            Ok((name.to_string(), &items[2..]))
        }
        _ => Err(syntax_error(header.pos(), format!("`({kind} <name>)`"))),
    }
}

/// Parse a domain in the supported STRIPS fragment.
pub fn parse_domain(text: &str) -> Result<Domain> {
    let doc = read_document(text)?;
    let (name, body) = define_header(&doc, "domain")?;

    let mut sections = DomainSections::default();
    for section in body {
        let items = list(section, "domain section")?;
        let key = items
            .first()
            .and_then(SExpr::as_symbol)
            .ok_or_else(|| syntax_error(section.pos(), "section keyword"))?;
        let rest = &items[1..];
        match key {
            ":requirements" => set_once(&mut sections.requirements, rest, key)?,
            ":types" => set_once(&mut sections.types, rest, key)?,
            ":constants" => set_once(&mut sections.constants, rest, key)?,
            ":predicates" => set_once(&mut sections.predicates, rest, key)?,
            ":action" => sections.actions.push(rest),
            ":durative-action" | ":derived" | ":functions" | ":constraints" | ":process"
            | ":event" => {
                return Err(ParseError::UnsupportedFeature(key[1..].to_string()));
            }
            _ => return Err(syntax_error(section.pos(), "domain section keyword")),
        }
    }

    let mut domain = Domain {
        name,
        requirements: sections.requirements.map(requirements).transpose()?.unwrap_or_default(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };

    if let Some(items) = sections.types {
        for (t, _) in typed_list(items, false)? {
            if t.name == OBJECT {
                if t.ty != OBJECT {
                    return Err(ParseError::TypeCycle(OBJECT.into()));
                }
                continue;
            }
            if domain.types.iter().any(|d| d.name == t.name) {
                return Err(ParseError::Duplicate {
                    kind: "type",
                    name: t.name,
                });
            }
            domain.types.push(TypeDecl {
                name: t.name,
                parent: t.ty,
            });
        }
        check_type_hierarchy(&domain.types)?;
    }

    if let Some(items) = sections.constants {
        for (c, _) in typed_list(items, false)? {
            Types { domain: &domain }.ensure(&c.ty)?;
            if domain.constants.iter().any(|d| d.name == c.name) {
                return Err(ParseError::Duplicate {
                    kind: "constant",
                    name: c.name,
                });
            }
            domain.constants.push(c);
        }
    }

    if let Some(items) = sections.predicates {
        for decl in items {
            let parts = list(decl, "predicate declaration")?;
            let (head, rest) = parts
                .split_first()
                .ok_or_else(|| syntax_error(decl.pos(), "predicate name"))?;
            let pname = symbol(head, "predicate name")?;
            check_identifier(head, pname, false)?;
            if pname == EQUALITY || domain.predicate(pname).is_some() {
                return Err(ParseError::Duplicate {
                    kind: "predicate",
                    name: pname.to_string(),
                });
            }
            let params: Vec<Typed> = typed_list(rest, true)?.into_iter().map(|(t, _)| t).collect();
            check_params(&domain, pname, &params)?;
            domain.predicates.push(PredicateDecl {
                name: pname.to_string(),
                params,
            });
        }
    }

    for body in sections.actions {
        let action = parse_action(&domain, body, doc.pos())?;
        if domain.action(&action.name).is_some() {
            return Err(ParseError::Duplicate {
                kind: "action",
                name: action.name,
            });
        }
        domain.actions.push(action);
    }

    Ok(domain)
}

fn check_params(domain: &Domain, context: &str, params: &[Typed]) -> Result<()> {
    let mut seen = HashSet::new();
    for p in params {
        Types { domain }.ensure(&p.ty)?;
        if !seen.insert(p.name.as_str()) {
            return Err(ParseError::Duplicate {
                kind: "parameter",
                name: format!("{} in {context}", p.name),
            });
        }
    }
    Ok(())
}

fn parse_action(domain: &Domain, body: &[SExpr], fallback: Pos) -> Result<ActionSchema> {
    let (name_expr, rest) = body
        .split_first()
        .ok_or_else(|| syntax_error(fallback, "action name"))?;
    let name = symbol(name_expr, "action name")?.to_string();
    check_identifier(name_expr, &name, false)?;

    let mut params = Vec::new();
    let mut precondition = Vec::new();
    let mut adds = Vec::new();
    let mut dels = Vec::new();
    let mut seen_keys = HashSet::new();

    let mut iter = rest.iter();
    while let Some(key_expr) = iter.next() {
        let key = symbol(key_expr, "`:parameters`, `:precondition` or `:effect`")?;
        let value = iter
            .next()
            .ok_or_else(|| syntax_error(key_expr.pos(), format!("value after `{key}`")))?;
        if !seen_keys.insert(key) {
            return Err(ParseError::Duplicate {
                kind: "action field",
                name: format!("{key} in {name}"),
            });
        }
        match key {
            ":parameters" => {
                params = typed_list(list(value, "parameter list")?, true)?
                    .into_iter()
                    .map(|(t, _)| t)
                    .collect();
            }
            ":precondition" => conjunction(value, &mut precondition)?,
            ":effect" => effects(value, &mut adds, &mut dels)?,
            ":duration" | ":condition" => {
                return Err(ParseError::UnsupportedFeature("durative-action".into()))
            }
            _ => {
                return Err(syntax_error(
                    key_expr.pos(),
                    "`:parameters`, `:precondition` or `:effect`",
                ))
            }
        }
    }

    check_params(domain, &name, &params)?;
    let param_types: HashMap<&str, &str> = params
        .iter()
        .map(|p| (p.name.as_str(), p.ty.as_str()))
        .collect();
    let constants: HashMap<&str, &str> = domain
        .constants
        .iter()
        .map(|c| (c.name.as_str(), c.ty.as_str()))
        .collect();

    for lit in &precondition {
        check_schema_atom(domain, &name, &param_types, &constants, &lit.atom)?;
    }
    for a in adds.iter().chain(dels.iter()) {
        if a.predicate == EQUALITY {
            return Err(ParseError::UnsupportedFeature("equality in effects".into()));
        }
        check_schema_atom(domain, &name, &param_types, &constants, a)?;
    }

    dedup(&mut precondition);
    dedup(&mut adds);
    dedup(&mut dels);
    if adds.iter().any(|a| dels.contains(a)) {
        return Err(ParseError::ConflictingEffects(name));
    }

    Ok(ActionSchema {
        name,
        params,
        precondition,
        add_effects: adds,
        delete_effects: dels,
    })
}

/// Parse a problem against an already-parsed domain.
pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem> {
    let doc = read_document(text)?;
    let (name, body) = define_header(&doc, "problem")?;

    let mut domain_name: Option<String> = None;
    let mut objects_section: Option<&[SExpr]> = None;
    let mut init_section: Option<&[SExpr]> = None;
    let mut goal_section: Option<&[SExpr]> = None;
    let mut req_section: Option<&[SExpr]> = None;

    for section in body {
        let items = list(section, "problem section")?;
        let key = items
            .first()
            .and_then(SExpr::as_symbol)
            .ok_or_else(|| syntax_error(section.pos(), "section keyword"))?;
        let rest = &items[1..];
        match key {
            ":domain" => {
                let [d] = rest else {
                    return Err(syntax_error(section.pos(), "`(:domain <name>)`"));
                };
                let d = symbol(d, "domain name")?.to_string();
                if d != domain.name {
                    return Err(ParseError::DomainMismatch {
                        expected: domain.name.clone(),
                        got: d,
                    });
                }
                domain_name = Some(d);
            }
            ":requirements" => set_once(&mut req_section, rest, key)?,
            ":objects" => set_once(&mut objects_section, rest, key)?,
            ":init" => set_once(&mut init_section, rest, key)?,
            ":goal" => set_once(&mut goal_section, rest, key)?,
            ":metric" | ":constraints" => {
                return Err(ParseError::UnsupportedFeature(key[1..].to_string()))
            }
            _ => return Err(syntax_error(section.pos(), "problem section keyword")),
        }
    }

    let domain_name = domain_name.ok_or_else(|| syntax_error(doc.pos(), "`(:domain <name>)`"))?;
    if let Some(items) = req_section {
        requirements(items)?;
    }

    let mut objects: Vec<Typed> = Vec::new();
    if let Some(items) = objects_section {
        for (o, _) in typed_list(items, false)? {
            Types { domain }.ensure(&o.ty)?;
            if objects.iter().any(|x| x.name == o.name)
                || domain.constants.iter().any(|c| c.name == o.name)
            {
                return Err(ParseError::Duplicate {
                    kind: "object",
                    name: o.name,
                });
            }
            objects.push(o);
        }
    }
    let object_types: HashMap<&str, &str> = objects
        .iter()
        .chain(domain.constants.iter())
        .map(|o| (o.name.as_str(), o.ty.as_str()))
        .collect();

    let ground = |a: &Atom| -> Result<GroundAtom> {
        check_atom_shape(domain, a)?;
        let mut args = Vec::with_capacity(a.args.len());
        for (i, term) in a.args.iter().enumerate() {
            let Term::Const(c) = term else {
                return Err(ParseError::NonGroundGoal(term.name().to_string()));
            };
            let ty = object_types
                .get(c.as_str())
                .ok_or_else(|| ParseError::UndeclaredObject(c.clone()))?;
            let expected = &domain.predicate(&a.predicate).expect("checked").params[i].ty;
            if !domain.is_subtype(ty, expected) {
                return Err(ParseError::TypeMismatch {
                    predicate: a.predicate.clone(),
                    arg: c.clone(),
                    expected: expected.clone(),
                    got: ty.to_string(),
                });
            }
            args.push(c.clone());
        }
        Ok(GroundAtom {
            predicate: a.predicate.clone(),
            args,
        })
    };

    let mut init = Vec::new();
    for fact in init_section.unwrap_or_default() {
        match fact.head() {
            Some("not") => return Err(syntax_error(fact.pos(), "positive ground atom")),
            Some("=") => return Err(ParseError::UnsupportedFeature("numeric fluents".into())),
            Some("at") if domain.predicate("at").is_none() => {
                return Err(ParseError::UnsupportedFeature("timed initial literals".into()))
            }
            _ => {}
        }
        let a = atom(fact)?;
        if a.args.iter().any(|t| matches!(t, Term::Var(_))) {
            return Err(syntax_error(fact.pos(), "ground atom"));
        }
        init.push(ground(&a)?);
    }
    init.sort();
    init.dedup();

    let mut goal_lits = Vec::new();
    if let Some(items) = goal_section {
        let [g] = items else {
            return Err(syntax_error(doc.pos(), "exactly one goal formula"));
        };
        conjunction(g, &mut goal_lits)?;
    }
    let mut goal = Vec::new();
    for lit in goal_lits {
        if lit.atom.predicate == EQUALITY {
            return Err(ParseError::UnsupportedFeature("equality in goal".into()));
        }
        if let Some(v) = lit.atom.args.iter().find(|t| matches!(t, Term::Var(_))) {
            return Err(ParseError::NonGroundGoal(format!(
                "({} ...{}...)",
                lit.atom.predicate,
                v.name()
            )));
        }
        let atom = ground(&lit.atom)?;
        goal.push(GroundLiteral {
            atom,
            positive: lit.positive,
        });
    }
    dedup(&mut goal);

    Ok(Problem {
        name,
        domain_name,
        objects,
        init,
        goal,
    })
}
