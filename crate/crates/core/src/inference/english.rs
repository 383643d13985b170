//! Plain-English rendering of conditions, e.g. `on(obj, A)` as
//! "obj is on A".

use super::HighLevelAction;
use crate::logic::{canonical_order, Atom, Literal, CLEAR, FLAT, ON, STACKABLE, THIN};

fn bare(arg: &str) -> &str {
    arg.strip_prefix('?').unwrap_or(arg)
}

fn phrase(atom: &Atom, negated: bool) -> String {
    let not = if negated { "not " } else { "" };
    let a: Vec<&str> = atom.args.iter().map(|s| bare(s)).collect();
    match (atom.predicate.as_str(), a.as_slice()) {
        (ON, [x, y]) => format!("{x} is {not}on {y}"),
        (STACKABLE, [x, y]) => format!("{x} is {not}stackable on {y}"),
        (CLEAR | FLAT | THIN, [x]) => format!("{x} is {not}{}", atom.predicate),
        (p, args) => format!("{not}{p}({})", args.join(", ")),
    }
}

pub fn render_atom(atom: &Atom) -> String {
    phrase(atom, false)
}

pub fn render_literal(lit: &Literal) -> String {
    phrase(&lit.atom, !lit.positive)
}

/// One line per parameter and condition, in canonical order.
pub fn render_action(action: &HighLevelAction) -> Vec<String> {
    let mut out = Vec::new();
    for p in &action.params {
        out.push(format!("{} is a {}", bare(&p.name), p.ty.as_str().to_ascii_uppercase()));
    }
    for l in canonical_order(&action.pre) {
        out.push(format!("before: {}", render_literal(l)));
    }
    for a in &action.eff_plus {
        out.push(format!("after: {}", render_atom(a)));
    }
    for a in &action.eff_minus {
        out.push(format!("after: {}", phrase(a, true)));
    }
    out
}
