//! Built-in example shifts with known behaviour.

use std::collections::HashMap;

use crate::avofactors::LocalMap;
use crate::error::{Error, Result};
use crate::format::serialize_spec;
use crate::group::{Group, Point};
use crate::oracles::SpacetimeOracle;
use crate::patterns::{Pattern, SftSpec, Symbol};

pub const NAMES: &[&str] = &[
    "goldenmean",
    "ledrappier",
    "hardsquare",
    "hardsquare-safe",
    "spacetimeF",
    "f2-goldenmean",
    "fullshift-conjugate-nonavo",
    "f2-geodesic-counterexample",
];

fn p(v: &[i64]) -> Point {
    Point(v.to_vec())
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn pairs(a: &Point, b: &Point, bad: impl Fn(Symbol, Symbol) -> bool, n: usize) -> Vec<Pattern> {
    let mut out = Vec::new();
    for x in 0..n as Symbol {
        for y in 0..n as Symbol {
            if bad(x, y) {
                out.push(Pattern::from_cells([(a.clone(), x), (b.clone(), y)]));
            }
        }
    }
    out
}

/// Triples on `cells` violating `ok`.
fn triples(cells: [Point; 3], n: usize, ok: impl Fn(Symbol, Symbol, Symbol) -> bool) -> Vec<Pattern> {
    let mut out = Vec::new();
    for a in 0..n as Symbol {
        for b in 0..n as Symbol {
            for c in 0..n as Symbol {
                if !ok(a, b, c) {
                    out.push(Pattern::from_cells([
                        (cells[0].clone(), a),
                        (cells[1].clone(), b),
                        (cells[2].clone(), c),
                    ]));
                }
            }
        }
    }
    out
}

/// `F(2, a) = 2`, `F(a, 2) = a`, otherwise `a + b mod 2`.
pub fn spacetime_f(a: Symbol, b: Symbol) -> Symbol {
    match (a, b) {
        (2, _) => 2,
        (a, 2) => a,
        (a, b) => (a + b) % 2,
    }
}

/// Exact oracle for `spacetimeF`: rows are configurations, row `i + 1 = F(row i)`.
pub fn spacetime_f_oracle() -> Result<SpacetimeOracle> {
    let mut rule = HashMap::new();
    for a in 0..3 {
        for b in 0..3 {
            rule.insert(vec![a, b], spacetime_f(a, b));
        }
    }
    SpacetimeOracle::new(3, vec![0, 1], rule)
}

pub fn builtin_spec(name: &str) -> Result<SftSpec> {
    let z = Group::free_abelian(1);
    let z2 = Group::free_abelian(2);
    let f2 = Group::free(2)?;
    let corner = [p(&[0, 0]), p(&[1, 0]), p(&[0, 1])];
    let s = |t: Symbol| t & 1;
    let t = |t: Symbol| t >> 1;
    let (group, n, forbidden) = match name {
        "goldenmean" => (z.clone(), 2, pairs(&p(&[0]), &p(&[1]), |a, b| a == 1 && b == 1, 2)),
        "ledrappier" => (z2, 2, triples(corner, 2, |a, b, c| (a + b + c) % 2 == 0)),
        "hardsquare" | "hardsquare-safe" => {
            let n = if name == "hardsquare" { 2 } else { 3 };
            let mut f = pairs(&p(&[0, 0]), &p(&[1, 0]), |a, b| a > 0 && b > 0, n);
            f.extend(pairs(&p(&[0, 0]), &p(&[0, 1]), |a, b| a > 0 && b > 0, n));
            (z2, n, f)
        }
        "spacetimeF" => (z2, 3, triples(corner, 3, |a, b, c| c == spacetime_f(a, b))),
        "f2-goldenmean" => {
            let mut f = pairs(&p(&[]), &p(&[1]), |a, b| a == 1 && b == 1, 2);
            f.extend(pairs(&p(&[]), &p(&[2]), |a, b| a == 1 && b == 1, 2));
            (f2, 2, f)
        }
        "fullshift-conjugate-nonavo" => (z2, 4, triples(corner, 4, |a, b, c| t(c) == (s(a) + s(b)) % 2)),
        "f2-geodesic-counterexample" => {
            let cells = [p(&[2]), p(&[1, 2]), p(&[])];
            (f2, 4, triples(cells, 4, |a, b, c| t(c) == (s(a) + s(b)) % 2))
        }
        _ => {
            return Err(Error::Usage(format!(
                "unknown example '{name}'; available: {}",
                NAMES.join(", ")
            )))
        }
    };
    SftSpec::new(group, names(n), forbidden)
}

/// Named local maps for the `factor` command.
pub fn builtin_map(name: &str, group: &Group, n_symbols: usize) -> Result<LocalMap> {
    let e = group.identity();
    match name {
        "identity" => LocalMap::from_fn(vec![e], n_symbols, |w| w[0]),
        "zero" => LocalMap::from_fn(vec![e], n_symbols, |_| 0),
        "xor" => {
            let step = group.generators().into_iter().next().ok_or_else(|| Error::Usage("trivial group".into()))?;
            LocalMap::from_fn(vec![e, step], n_symbols, |w| (w[0] + w[1]) % n_symbols as Symbol)
        }
        _ => Err(Error::Usage(format!("unknown map '{name}'; available: identity, xor, zero"))),
    }
}

pub fn builtin_example(name: &str) -> Result<String> {
    Ok(serialize_spec(&builtin_spec(name)?, None))
}
