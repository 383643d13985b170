use std::collections::{BTreeMap, BTreeSet};

use super::sexpr::{parse_one, syntax, SExpr, Span};
use super::{PddlDomain, PddlError, PddlProblem, REQUIREMENTS};
use crate::logic::{is_variable, ActionSchema, Atom, Literal, Parameter, PredicateSchema};
use crate::types::{TypeError, TypeHierarchy, TypeTag};

fn symbol<'a>(e: &'a SExpr, what: &str) -> Result<&'a str, PddlError> {
    e.symbol().ok_or_else(|| syntax(e.span(), format!("expected {what}, found a list")))
}

fn list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], PddlError> {
    e.list().ok_or_else(|| syntax(e.span(), format!("expected {what}, found `{}`", e.symbol().unwrap_or(""))))
}

/// `a b - t c - u d` as `[(a, Some(t)), (b, Some(t)), (c, Some(u)), (d, None)]`.
fn typed_list(items: &[SExpr]) -> Result<Vec<(String, Option<String>, Span)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Span)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let s = symbol(&items[i], "a name")?;
        if s == "-" {
            let t = items.get(i + 1).ok_or_else(|| syntax(items[i].span(), "`-` without a type"))?;
            if t.list().is_some() {
                return Err(syntax(t.span(), "`either` types are not supported"));
            }
            let t = symbol(t, "a type")?.to_ascii_lowercase();
            if pending.is_empty() {
                return Err(syntax(items[i].span(), "`-` without names before it"));
            }
            out.extend(pending.drain(..).map(|(n, sp)| (n, Some(t.clone()), sp)));
            i += 2;
        } else {
            pending.push((s.to_string(), items[i].span()));
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|(n, sp)| (n, None, sp)));
    Ok(out)
}

fn atom(e: &SExpr) -> Result<Atom, PddlError> {
    let items = list(e, "an atom")?;
    let (head, args) = items.split_first().ok_or_else(|| syntax(e.span(), "empty atom"))?;
    let pred = symbol(head, "a predicate name")?;
    let args = args.iter().map(|a| symbol(a, "an argument").map(str::to_string)).collect::<Result<Vec<_>, _>>()?;
    Ok(Atom::new(pred, args))
}

/// A literal, a `(not ...)` or an `(and ...)` of them. Inside a conjunction
/// the bare form `not (p ...)` is accepted as a negation too.
fn literals(e: &SExpr) -> Result<Vec<Literal>, PddlError> {
    let items = list(e, "a condition")?;
    let Some(head) = items.first() else {
        return Ok(Vec::new());
    };
    if head.is_keyword("and") {
        let mut out = Vec::new();
        let mut i = 1;
        while i < items.len() {
            if items[i].is_keyword("not") {
                let inner = items.get(i + 1).ok_or_else(|| syntax(items[i].span(), "`not` without an atom"))?;
                out.push(Literal::neg(atom(inner)?));
                i += 2;
            } else {
                out.extend(literals(&items[i])?);
                i += 1;
            }
        }
        return Ok(out);
    }
    if head.is_keyword("not") {
        if items.len() != 2 {
            return Err(syntax(e.span(), "`not` takes exactly one atom"));
        }
        return Ok(vec![Literal::neg(atom(&items[1])?)]);
    }
    for kw in ["or", "imply", "exists", "forall", "when"] {
        if head.is_keyword(kw) {
            return Err(syntax(head.span(), format!("`{kw}` is not supported")));
        }
    }
    Ok(vec![Literal::pos(atom(e)?)])
}

fn requirement_set(items: &[SExpr]) -> Result<BTreeSet<String>, PddlError> {
    let mut out = BTreeSet::new();
    for r in items {
        let s = symbol(r, "a requirement")?;
        let name = s.strip_prefix(':').ok_or_else(|| syntax(r.span(), "requirements start with `:`"))?.to_ascii_lowercase();
        if !REQUIREMENTS.contains(&name.as_str()) {
            return Err(PddlError::UnknownRequirement(name));
        }
        out.insert(name);
    }
    Ok(out)
}

/// `(define (<kind> <name>) sections...)`
fn definition<'a>(e: &'a SExpr, kind: &str) -> Result<(String, &'a [SExpr]), PddlError> {
    let items = list(e, "`(define ...)`")?;
    if !items.first().is_some_and(|h| h.is_keyword("define")) {
        return Err(syntax(e.span(), "expected `define`"));
    }
    let header = items.get(1).ok_or_else(|| syntax(e.span(), format!("missing `({kind} <name>)`")))?;
    let h = list(header, "a header")?;
    if h.len() != 2 || !h[0].is_keyword(kind) {
        return Err(syntax(header.span(), format!("expected `({kind} <name>)`")));
    }
    Ok((symbol(&h[1], "a name")?.to_ascii_lowercase(), &items[2..]))
}

fn section<'a>(e: &'a SExpr) -> Result<(String, &'a [SExpr]), PddlError> {
    let items = list(e, "a section")?;
    let head = items.first().ok_or_else(|| syntax(e.span(), "empty section"))?;
    let key = symbol(head, "a section keyword")?;
    if !key.starts_with(':') {
        return Err(syntax(head.span(), format!("expected a section keyword, found `{key}`")));
    }
    Ok((key.to_ascii_lowercase(), &items[1..]))
}

struct RawAction {
    name: String,
    params: Vec<(String, String)>,
    pre: Vec<Literal>,
    eff: Vec<Literal>,
}

fn action(items: &[SExpr], span: Span) -> Result<RawAction, PddlError> {
    let name = symbol(items.first().ok_or_else(|| syntax(span, "action without a name"))?, "an action name")?
        .to_ascii_lowercase();
    let mut raw = RawAction { name, params: Vec::new(), pre: Vec::new(), eff: Vec::new() };
    let mut i = 1;
    while i < items.len() {
        let key = &items[i];
        let value = items.get(i + 1).ok_or_else(|| syntax(key.span(), "keyword without a value"))?;
        if key.is_keyword(":parameters") {
            for (n, t, sp) in typed_list(list(value, "a parameter list")?)? {
                if !is_variable(&n) {
                    return Err(syntax(sp, format!("parameter `{n}` must start with `?`")));
                }
                raw.params.push((n, t.unwrap_or_else(|| "object".into())));
            }
        } else if key.is_keyword(":precondition") {
            raw.pre = literals(value)?;
        } else if key.is_keyword(":effect") {
            raw.eff = literals(value)?;
        } else {
            return Err(syntax(key.span(), format!("unexpected `{}` in action", key.symbol().unwrap_or("(...)"))));
        }
        i += 2;
    }
    Ok(raw)
}

fn type_error(e: TypeError) -> PddlError {
    match e {
        TypeError::UnknownType(t) => PddlError::UnknownType(t.to_string()),
        TypeError::Redeclared(t, _) => PddlError::Duplicate("type", t.to_string()),
        TypeError::Cycle(t) => PddlError::Schema(crate::logic::SchemaError::UnknownType(t)),
    }
}

pub fn parse_domain(text: &str) -> Result<PddlDomain, PddlError> {
    let top = parse_one(text)?;
    let (name, sections) = definition(&top, "domain")?;
    let mut requirements = BTreeSet::new();
    let mut type_pairs: Vec<(TypeTag, Option<TypeTag>)> = Vec::new();
    let mut raw_preds: Vec<(String, Vec<String>)> = Vec::new();
    let mut raw_actions: Vec<RawAction> = Vec::new();
    for s in sections {
        let (key, body) = section(s)?;
        match key.as_str() {
            ":requirements" => requirements = requirement_set(body)?,
            ":types" => {
                for (n, parent, _) in typed_list(body)? {
                    type_pairs.push((TypeTag::new(n), parent.map(TypeTag::new)));
                }
            }
            ":predicates" => {
                for p in body {
                    let items = list(p, "a predicate declaration")?;
                    let (head, rest) = items.split_first().ok_or_else(|| syntax(p.span(), "empty predicate"))?;
                    let pname = symbol(head, "a predicate name")?.to_ascii_lowercase();
                    let params = typed_list(rest)?.into_iter().map(|(_, t, _)| t.unwrap_or_else(|| "object".into())).collect();
                    raw_preds.push((pname, params));
                }
            }
            ":action" => raw_actions.push(action(body, s.span())?),
            other => return Err(syntax(s.span(), format!("unsupported section `{other}`"))),
        }
    }

    let mut types = TypeHierarchy::from_pairs(&type_pairs).map_err(type_error)?;
    let object = TypeTag::object();
    let mentions_object = raw_preds.iter().flat_map(|(_, ps)| ps.iter()).chain(raw_actions.iter().flat_map(|a| a.params.iter().map(|(_, t)| t))).any(|t| *t == "object");
    if mentions_object && !types.contains(&object) {
        types.declare(object, None).map_err(type_error)?;
    }
    let predicates = raw_preds
        .into_iter()
        .map(|(n, ps)| PredicateSchema::new(&n, ps.into_iter().map(TypeTag::new).collect()))
        .collect();
    let actions = raw_actions
        .into_iter()
        .map(|a| {
            let mut add = BTreeSet::new();
            let mut del = BTreeSet::new();
            for l in a.eff {
                if l.positive {
                    add.insert(l.atom);
                } else {
                    del.insert(l.atom);
                }
            }
            ActionSchema {
                name: a.name,
                params: a.params.iter().map(|(n, t)| Parameter::new(n, TypeTag::new(t))).collect(),
                pre: a.pre.into_iter().collect(),
                add,
                del,
            }
        })
        .collect();
    let domain = PddlDomain { name, requirements, types, predicates, actions };
    domain.validate()?;
    Ok(domain)
}

/// Parses problem text. Object types are only checked against a domain by
/// [`PddlProblem::check_against`].
pub fn parse_problem(text: &str) -> Result<PddlProblem, PddlError> {
    let top = parse_one(text)?;
    let (name, sections) = definition(&top, "problem")?;
    let mut domain_name = None;
    let mut objects = BTreeMap::new();
    let mut init = BTreeSet::new();
    let mut goal = BTreeSet::new();
    for s in sections {
        let (key, body) = section(s)?;
        match key.as_str() {
            ":domain" => {
                let d = body.first().ok_or_else(|| syntax(s.span(), "missing domain name"))?;
                domain_name = Some(symbol(d, "a domain name")?.to_ascii_lowercase());
            }
            ":requirements" => {
                requirement_set(body)?;
            }
            ":objects" => {
                for (n, t, _) in typed_list(body)? {
                    let t = TypeTag::new(t.unwrap_or_else(|| "object".into()));
                    if objects.insert(n.clone(), t).is_some() {
                        return Err(PddlError::Duplicate("object", n));
                    }
                }
            }
            ":init" => {
                for e in body {
                    for l in literals(e)? {
                        if !l.positive {
                            return Err(syntax(e.span(), "negative literals are not allowed in `:init`"));
                        }
                        init.insert(l.atom);
                    }
                }
            }
            ":goal" => {
                for e in body {
                    goal.extend(literals(e)?);
                }
            }
            other => return Err(syntax(s.span(), format!("unsupported section `{other}`"))),
        }
    }
    let domain_name = domain_name.ok_or_else(|| syntax(top.span(), "missing `(:domain <name>)`"))?;
    for a in init.iter().chain(goal.iter().map(|l: &Literal| &l.atom)) {
        if let Some(x) = a.args.iter().find(|x| !objects.contains_key(*x)) {
            return Err(PddlError::UndeclaredObject(x.clone()));
        }
    }
    Ok(PddlProblem { name, domain_name, objects, init, goal })
}
