use std::collections::BTreeMap;
use std::fmt::Write;

use super::{PddlDomain, PddlProblem, REQUIREMENTS};
use crate::logic::{canonical_order, Literal};
use crate::types::TypeTag;

fn slot_name(i: usize) -> String {
    match i {
        0 => "?x".into(),
        1 => "?y".into(),
        2 => "?z".into(),
        _ => format!("?x{i}"),
    }
}

fn conjunction<'a>(lits: impl IntoIterator<Item = &'a Literal>) -> String {
    let parts: Vec<String> = canonical_order(lits).iter().map(|l| l.to_pddl()).collect();
    if parts.is_empty() {
        "(and)".into()
    } else {
        format!("(and {})", parts.join(" "))
    }
}

/// Canonical domain text. Empty sections are left out.
pub fn emit_domain(d: &PddlDomain) -> String {
    let mut out = format!("(define (domain {})\n", d.name);
    let reqs: Vec<String> = REQUIREMENTS
        .iter()
        .filter(|r| d.requirements.contains(**r))
        .map(|r| format!(":{r}"))
        .collect();
    if !reqs.is_empty() {
        let _ = writeln!(out, "  (:requirements {})", reqs.join(" "));
    }

    let mut groups: Vec<(&TypeTag, Vec<&TypeTag>)> = Vec::new();
    let mut lone: Vec<&TypeTag> = Vec::new();
    for t in d.types.iter() {
        match d.types.parent(t) {
            Some(p) => match groups.iter_mut().find(|(q, _)| *q == p) {
                Some((_, kids)) => kids.push(t),
                None => groups.push((p, vec![t])),
            },
            None if d.types.children(t).is_empty() => lone.push(t),
            None => {}
        }
    }
    let mut lines: Vec<String> = groups
        .iter()
        .map(|(p, kids)| {
            let names: Vec<&str> = kids.iter().map(|k| k.as_str()).collect();
            format!("{} - {p}", names.join(" "))
        })
        .collect();
    if !lone.is_empty() {
        lines.push(lone.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(" "));
    }
    if !lines.is_empty() {
        let _ = writeln!(out, "  (:types\n    {})", lines.join("\n    "));
    }

    if !d.predicates.is_empty() {
        let preds: Vec<String> = d
            .predicates
            .iter()
            .map(|p| {
                let mut s = format!("({}", p.name);
                for (i, t) in p.params.iter().enumerate() {
                    let _ = write!(s, " {} - {t}", slot_name(i));
                }
                s.push(')');
                s
            })
            .collect();
        let _ = writeln!(out, "  (:predicates\n    {})", preds.join("\n    "));
    }

    for a in &d.actions {
        let params: Vec<String> = a.params.iter().map(|p| format!("{} - {}", p.name, p.ty)).collect();
        let effects: Vec<Literal> = a
            .add
            .iter()
            .map(|x| Literal::pos(x.clone()))
            .chain(a.del.iter().map(|x| Literal::neg(x.clone())))
            .collect();
        let _ = writeln!(
            out,
            "  (:action {}\n    :parameters ({})\n    :precondition {}\n    :effect {})",
            a.name,
            params.join(" "),
            conjunction(&a.pre),
            conjunction(&effects)
        );
    }
    out.push_str(")\n");
    out
}

/// Canonical problem text: objects grouped by type (types and names
/// sorted), one init atom per line, the goal as a conjunction.
pub fn emit_problem(p: &PddlProblem) -> String {
    let mut out = format!("(define (problem {})\n  (:domain {})\n", p.name, p.domain_name);
    let mut by_type: BTreeMap<&TypeTag, Vec<&str>> = BTreeMap::new();
    for (o, t) in &p.objects {
        by_type.entry(t).or_default().push(o);
    }
    if !by_type.is_empty() {
        let lines: Vec<String> = by_type.iter().map(|(t, names)| format!("{} - {t}", names.join(" "))).collect();
        let _ = writeln!(out, "  (:objects\n    {})", lines.join("\n    "));
    }
    if !p.init.is_empty() {
        let atoms: Vec<String> = p.init.iter().map(|a| a.to_pddl()).collect();
        let _ = writeln!(out, "  (:init\n    {})", atoms.join("\n    "));
    }
    let _ = writeln!(out, "  (:goal {})", conjunction(&p.goal));
    out.push_str(")\n");
    out
}
