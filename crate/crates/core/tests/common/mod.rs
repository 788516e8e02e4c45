//! Brute-force references used by the integration tests. Nothing here calls the
//! crate's solvers; only group arithmetic and plain data types are shared.
#![allow(dead_code)]

use std::collections::BTreeSet;

use avoshift::avofactors::LocalMap;
use avoshift::group::{Group, Point};
use avoshift::patterns::{Pattern, SftSpec, Symbol};
use avoshift::shapes::Shape;

/// Every point within distance `m` of `d`.
pub fn thicken(group: &Group, d: &Shape, m: u32) -> Shape {
    let ball = group.ball(m).unwrap().members;
    let mut out = Shape::new();
    for p in d {
        for b in &ball {
            out.insert(group.op(p, b));
        }
    }
    out
}

/// Plain backtracking over a fixed cell order. After each assignment every
/// translate of every forbidden pattern through the new cell is checked.
struct Backtrack<'a> {
    group: &'a Group,
    forbidden: &'a [Pattern],
    n: usize,
    cells: Vec<Point>,
    index: std::collections::HashMap<Point, usize>,
}

impl<'a> Backtrack<'a> {
    fn new(group: &'a Group, forbidden: &'a [Pattern], n: usize, cells: Vec<Point>) -> Self {
        let index = cells.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Backtrack { group, forbidden, n, cells, index }
    }

    /// Does the partial assignment `vals[..=k]` violate a pattern through cell `k`?
    fn violates(&self, vals: &[Symbol], k: usize) -> bool {
        let x = &self.cells[k];
        for f in self.forbidden {
            for c in f.cells.keys() {
                // g = x · c⁻¹ places c at x; levelled groups only translate by base points
                let Some(g) = self.group.translator(x, c) else { continue };
                let hit = f.cells.iter().all(|(d, a)| {
                    let at = self.group.act(&g, d);
                    matches!(self.index.get(&at), Some(&j) if j <= k && vals[j] == *a)
                });
                if hit {
                    return true;
                }
            }
        }
        false
    }

    /// Extends `vals` over the remaining cells.
    fn run(&self, vals: &mut Vec<Symbol>, visit: &mut dyn FnMut(&[Symbol]) -> bool) -> bool {
        let k = vals.len();
        if k == self.cells.len() {
            return visit(vals);
        }
        for a in 0..self.n as Symbol {
            vals.push(a);
            if !self.violates(vals, k) && self.run(vals, visit) {
                vals.pop();
                return true;
            }
            vals.pop();
        }
        false
    }

    /// Calls `visit` on each complete valid assignment until it returns true.
    fn each(&self, visit: &mut dyn FnMut(&[Symbol]) -> bool) {
        let mut vals = Vec::new();
        self.run(&mut vals, visit);
    }
}

fn sorted_cells(group: &Group, s: &Shape) -> Vec<Point> {
    let mut v: Vec<Point> = s.iter().cloned().collect();
    v.sort_by_key(|p| (group.norm(p), p.clone()));
    v
}

/// Patterns on `d` that extend to a locally valid pattern on the `m`-thickening.
pub fn language_with_margin(spec: &SftSpec, d: &Shape, m: u32) -> BTreeSet<Pattern> {
    let g = &spec.group;
    let inner = sorted_cells(g, d);
    let outer: Vec<Point> = sorted_cells(g, &thicken(g, d, m)).into_iter().filter(|p| !d.contains(p)).collect();
    let mut all = inner.clone();
    all.extend(outer);
    let bt = Backtrack::new(g, &spec.forbidden, spec.alphabet_size(), all);
    let inner_bt = Backtrack::new(g, &spec.forbidden, spec.alphabet_size(), inner.clone());
    let mut out = BTreeSet::new();
    inner_bt.each(&mut |vals| {
        let mut found = false;
        let mut v = vals.to_vec();
        bt.run(&mut v, &mut |_| {
            found = true;
            true
        });
        if found {
            out.insert(Pattern::from_cells(inner.iter().cloned().zip(vals.iter().copied())));
        }
        false
    });
    out
}

/// Raises the margin until two consecutive answers agree.
pub fn stabilized_language(spec: &SftSpec, d: &Shape, start: u32, max: u32) -> BTreeSet<Pattern> {
    let mut prev = language_with_margin(spec, d, start);
    for m in start + 1..=max {
        let next = language_with_margin(spec, d, m);
        if next == prev {
            return next;
        }
        prev = next;
    }
    panic!("margin did not stabilize by {max}");
}

/// Exact language of a Z-SFT on `d`. A word that extends `n^s` steps on each side
/// (s = span of the forbidden patterns) extends forever by pigeonhole on states.
pub fn z_language(spec: &SftSpec, d: &Shape) -> BTreeSet<Pattern> {
    let span = spec
        .forbidden
        .iter()
        .map(|f| {
            let xs: Vec<i64> = f.cells.keys().map(|p| p.0[0]).collect();
            (xs.iter().max().unwrap() - xs.iter().min().unwrap()) as u32
        })
        .max()
        .unwrap_or(0);
    let margin = (spec.alphabet_size() as u32).pow(span.max(1)) + 1;
    if d.is_empty() {
        return BTreeSet::from([Pattern::new()]);
    }
    let lo = d.iter().map(|p| p.0[0]).min().unwrap();
    let hi = d.iter().map(|p| p.0[0]).max().unwrap();
    let hull: Shape = (lo..=hi).map(|x| Point(vec![x])).collect();
    let full = language_with_margin(spec, &hull, margin);
    full.iter().map(|p| p.restrict(d)).collect()
}

pub fn z_is_empty(spec: &SftSpec) -> bool {
    z_language(spec, &[Point(vec![0])].into_iter().collect()).is_empty()
}

/// Whether every configuration of `x` avoids the forbidden patterns of `y`.
pub fn z_is_subset(x: &SftSpec, y: &SftSpec) -> bool {
    y.forbidden.iter().all(|f| !z_language(x, &f.domain()).contains(f))
}

/// `{ map(x)|_d : x in language(d · N) }`, with the language given by `lang`.
pub fn image_language(
    group: &Group,
    map: &LocalMap,
    d: &Shape,
    lang: impl Fn(&Shape) -> BTreeSet<Pattern>,
) -> BTreeSet<Pattern> {
    let mut source = Shape::new();
    for g in d {
        for n in &map.neighborhood {
            source.insert(group.op(g, n));
        }
    }
    lang(&source).iter().map(|x| map.image(group, x, d).unwrap()).collect()
}

/// All nonempty subsets of `b`.
pub fn subsets(b: &Shape) -> Vec<Shape> {
    let v: Vec<&Point> = b.iter().collect();
    (1u64..(1 << v.len()))
        .map(|mask| (0..v.len()).filter(|i| mask >> i & 1 == 1).map(|i| v[i].clone()).collect())
        .collect()
}

pub fn restrict_all(set: &BTreeSet<Pattern>, d: &Shape) -> BTreeSet<Pattern> {
    set.iter().map(|p| p.restrict(d)).collect()
}

pub fn binary(group: Group, forbidden: Vec<Pattern>) -> SftSpec {
    SftSpec::new(group, vec!["0".into(), "1".into()], forbidden).unwrap()
}

pub fn pt(v: &[i64]) -> Point {
    Point(v.to_vec())
}
