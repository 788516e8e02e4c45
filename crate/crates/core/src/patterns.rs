//! Patterns, forbidden sets, local validity and SFT specifications.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::group::{Group, Point};
use crate::shapes::Shape;

pub type Symbol = u8;

/// A finite partial configuration.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    pub cells: BTreeMap<Point, Symbol>,
}

impl Pattern {
    pub fn new() -> Self {
        Pattern::default()
    }

    pub fn singleton(p: Point, a: Symbol) -> Self {
        Pattern {
            cells: BTreeMap::from([(p, a)]),
        }
    }

    pub fn from_cells(cells: impl IntoIterator<Item = (Point, Symbol)>) -> Self {
        Pattern {
            cells: cells.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, p: &Point) -> Option<Symbol> {
        self.cells.get(p).copied()
    }

    pub fn domain(&self) -> Shape {
        self.cells.keys().cloned().collect()
    }

    pub fn with(&self, p: Point, a: Symbol) -> Pattern {
        let mut out = self.clone();
        out.cells.insert(p, a);
        out
    }

    pub fn restrict(&self, d: &Shape) -> Pattern {
        Pattern {
            cells: self
                .cells
                .iter()
                .filter(|(p, _)| d.contains(*p))
                .map(|(p, a)| (p.clone(), *a))
                .collect(),
        }
    }

    /// `gP`, with `(gP)_{gh} = P_h`.
    pub fn translate(&self, group: &Group, g: &Point) -> Pattern {
        Pattern {
            cells: self.cells.iter().map(|(p, a)| (group.act(g, p), *a)).collect(),
        }
    }

    /// The translate whose least domain point is the identity (the base identity at
    /// the same level for level-tagged points).
    pub fn canonical(&self, group: &Group) -> Pattern {
        let Some(first) = self.cells.keys().next() else {
            return Pattern::new();
        };
        let anchor = match group.level(first) {
            Some(l) => group.origin_at_level(l),
            None => group.identity(),
        };
        let g = group.translator(&anchor, first).expect("same level");
        self.translate(group, &g)
    }

    pub fn is_subpattern_of(&self, other: &Pattern) -> bool {
        self.cells.iter().all(|(p, a)| other.cells.get(p) == Some(a))
    }

    pub fn describe(&self, group: &Group, alphabet: &[String]) -> String {
        let parts: Vec<String> = self
            .cells
            .iter()
            .map(|(p, a)| {
                let name = alphabet.get(*a as usize).cloned().unwrap_or_else(|| a.to_string());
                format!("{}={}", group.format_point(p), name)
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Result of `P ⊔ Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Merge {
    Merged(Pattern),
    Conflict(Point),
}

pub fn merge_patterns(p: &Pattern, q: &Pattern) -> Merge {
    let mut out = p.clone();
    for (c, a) in &q.cells {
        match out.cells.get(c) {
            Some(b) if b != a => return Merge::Conflict(c.clone()),
            _ => {
                out.cells.insert(c.clone(), *a);
            }
        }
    }
    Merge::Merged(out)
}

/// Every placement `g` with `g·F` fitting inside `domain` and agreeing with `p`,
/// anchored so that `F`'s cell `f` lands on `at`.
fn occurs_with(group: &Group, f: &Pattern, anchor: &Point, at: &Point, p: &Pattern) -> bool {
    let Some(g) = group.translator(at, anchor) else {
        return false;
    };
    f.cells
        .iter()
        .all(|(c, a)| p.cells.get(&group.act(&g, c)) == Some(a))
}

/// True iff no translate of a forbidden pattern occurs in `p` (only translates whose
/// domain lies inside `dom(p)` are considered). The empty pattern occurs everywhere.
pub fn locally_valid(group: &Group, p: &Pattern, forbidden: &[Pattern]) -> bool {
    for f in forbidden {
        let Some((anchor, _)) = f.cells.iter().next() else {
            return false;
        };
        for at in p.cells.keys() {
            if occurs_with(group, f, anchor, at, p) {
                return false;
            }
        }
    }
    true
}

/// True iff some forbidden translate occurring in `p` covers the cell `at`.
pub fn violation_at(group: &Group, p: &Pattern, forbidden: &[Pattern], at: &Point) -> bool {
    for f in forbidden {
        if f.is_empty() {
            return true;
        }
        for anchor in f.cells.keys() {
            if occurs_with(group, f, anchor, at, p) {
                return true;
            }
        }
    }
    false
}

/// Does `small` occur in `big` at some translate?
pub fn contains_translate(group: &Group, small: &Pattern, big: &Pattern) -> bool {
    let Some((anchor, _)) = small.cells.iter().next() else {
        return true;
    };
    big.cells.keys().any(|at| occurs_with(group, small, anchor, at, big))
}

/// Alphabet plus a finite set of forbidden patterns over a catalog group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SftSpec {
    pub group: Group,
    pub alphabet: Vec<String>,
    /// Canonical, sorted, no member containing a translate of another.
    pub forbidden: Vec<Pattern>,
}

impl SftSpec {
    pub fn new(group: Group, alphabet: Vec<String>, forbidden: Vec<Pattern>) -> Result<Self> {
        if alphabet.is_empty() || alphabet.len() > 64 {
            return Err(Error::Usage("alphabet size must be in 1..=64".into()));
        }
        let names: BTreeSet<&String> = alphabet.iter().collect();
        if names.len() != alphabet.len() {
            return Err(Error::Usage("alphabet has repeated symbols".into()));
        }
        let mut canon: BTreeSet<Pattern> = BTreeSet::new();
        for f in &forbidden {
            for (p, a) in &f.cells {
                group.validate(p)?;
                if *a as usize >= alphabet.len() {
                    return Err(Error::Usage(format!("symbol index {a} outside the alphabet")));
                }
            }
            canon.insert(f.canonical(&group));
        }
        let all: Vec<Pattern> = canon.into_iter().collect();
        let kept: Vec<Pattern> = all
            .iter()
            .enumerate()
            .filter(|(i, f)| {
                !all.iter()
                    .enumerate()
                    .any(|(j, h)| j != *i && h.len() <= f.len() && contains_translate(&group, h, f) && (h.len() < f.len() || j < *i))
            })
            .map(|(_, f)| f.clone())
            .collect();
        Ok(SftSpec {
            group,
            alphabet,
            forbidden: kept,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn forbids_empty(&self) -> bool {
        self.forbidden.iter().any(|f| f.is_empty())
    }

    /// Largest norm of a cell of a canonical forbidden pattern.
    pub fn window(&self) -> u32 {
        self.forbidden
            .iter()
            .flat_map(|f| f.cells.keys())
            .map(|p| self.group.norm(p))
            .max()
            .unwrap_or(0)
    }

    /// Largest distance between two cells of one forbidden pattern.
    pub fn diameter(&self) -> u32 {
        self.forbidden
            .iter()
            .map(|f| pattern_diameter(&self.group, f))
            .max()
            .unwrap_or(0)
    }

    pub fn locally_valid(&self, p: &Pattern) -> bool {
        locally_valid(&self.group, p, &self.forbidden)
    }

    pub fn with_forbidden(&self, forbidden: Vec<Pattern>) -> Result<SftSpec> {
        SftSpec::new(self.group.clone(), self.alphabet.clone(), forbidden)
    }

    pub fn describe_forbidden(&self) -> Vec<String> {
        self.forbidden
            .iter()
            .map(|f| f.describe(&self.group, &self.alphabet))
            .collect()
    }
}

/// Largest distance between two cells of `p`.
pub fn pattern_diameter(group: &Group, p: &Pattern) -> u32 {
    let cells: Vec<&Point> = p.cells.keys().collect();
    let mut d = 0;
    for (i, a) in cells.iter().enumerate() {
        for b in &cells[i + 1..] {
            d = d.max(group.distance(a, b));
        }
    }
    d
}

/// Every pattern on `shape` over `n` symbols, in lexicographic order.
pub fn all_patterns(shape: &Shape, n: usize) -> Vec<Pattern> {
    let mut out = vec![Pattern::new()];
    for p in shape {
        let mut next = Vec::with_capacity(out.len() * n);
        for q in &out {
            for a in 0..n as Symbol {
                next.push(q.with(p.clone(), a));
            }
        }
        out = next;
    }
    out
}

/// Whether an approximation's pattern set was exact or only an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    Upper,
}

/// The `M`-SFT approximation: forbid every `M`-pattern missing from `language`.
pub fn m_sft_approximation(
    spec: &SftSpec,
    m: &Shape,
    language: &BTreeSet<Pattern>,
    exactness: Exactness,
) -> Result<(SftSpec, Exactness)> {
    let forbidden: Vec<Pattern> = all_patterns(m, spec.alphabet_size())
        .into_iter()
        .filter(|p| !language.contains(p))
        .collect();
    Ok((spec.with_forbidden(forbidden)?, exactness))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Point {
        Point(v.to_vec())
    }

    fn pat(cells: &[(&[i64], Symbol)]) -> Pattern {
        Pattern::from_cells(cells.iter().map(|(c, a)| (p(c), *a)))
    }

    fn bin() -> Vec<String> {
        vec!["0".into(), "1".into()]
    }

    #[test]
    fn translation() {
        let z = Group::free_abelian(1);
        assert_eq!(pat(&[(&[0], 1)]).translate(&z, &p(&[3])), pat(&[(&[3], 1)]));
        let z2 = Group::free_abelian(2);
        let t = pat(&[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 0)]);
        assert_eq!(
            t.translate(&z2, &p(&[1, 1])),
            pat(&[(&[1, 1], 1), (&[2, 1], 1), (&[1, 2], 0)])
        );
        assert_eq!(t.translate(&z2, &p(&[0, 0])), t);
    }

    #[test]
    fn merging() {
        let a = pat(&[(&[0], 1)]);
        let b = pat(&[(&[1], 0)]);
        assert_eq!(merge_patterns(&a, &b), Merge::Merged(pat(&[(&[0], 1), (&[1], 0)])));
        assert_eq!(merge_patterns(&a, &pat(&[(&[0], 0)])), Merge::Conflict(p(&[0])));
        assert_eq!(merge_patterns(&a, &a), Merge::Merged(a));
    }

    #[test]
    fn validity_examples() {
        let z = Group::free_abelian(1);
        let golden = vec![pat(&[(&[0], 1), (&[1], 1)])];
        assert!(!locally_valid(&z, &pat(&[(&[0], 1), (&[1], 1)]), &golden));
        assert!(locally_valid(&z, &pat(&[(&[0], 1), (&[2], 1)]), &golden));
        let z2 = Group::free_abelian(2);
        let mut odd = Vec::new();
        for x in 0..2u8 {
            for y in 0..2u8 {
                for w in 0..2u8 {
                    if (x + y + w) % 2 == 1 {
                        odd.push(pat(&[(&[0, 0], x), (&[1, 0], y), (&[0, 1], w)]));
                    }
                }
            }
        }
        assert!(locally_valid(&z2, &pat(&[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 0)]), &odd));
        assert!(!locally_valid(&z, &Pattern::new(), &[Pattern::new()]));
    }

    #[test]
    fn normalization_drops_supersets() {
        let z = Group::free_abelian(1);
        let s = SftSpec::new(
            z,
            bin(),
            vec![pat(&[(&[0], 1), (&[1], 1)]), pat(&[(&[5], 1), (&[6], 1), (&[7], 0)])],
        )
        .unwrap();
        assert_eq!(s.forbidden, vec![pat(&[(&[0], 1), (&[1], 1)])]);
        assert_eq!(s.window(), 1);
        assert_eq!(s.diameter(), 1);
    }

    #[test]
    fn approximation_examples() {
        let z = Group::free_abelian(1);
        let golden = SftSpec::new(z.clone(), bin(), vec![pat(&[(&[0], 1), (&[1], 1)])]).unwrap();
        let m: Shape = [p(&[0]), p(&[1])].into();
        let lang: BTreeSet<Pattern> = all_patterns(&m, 2)
            .into_iter()
            .filter(|q| golden.locally_valid(q))
            .collect();
        let (approx, ex) = m_sft_approximation(&golden, &m, &lang, Exactness::Exact).unwrap();
        assert_eq!(approx.forbidden, golden.forbidden);
        assert_eq!(ex, Exactness::Exact);
        let full = SftSpec::new(z, bin(), vec![]).unwrap();
        let all: BTreeSet<Pattern> = all_patterns(&m, 2).into_iter().collect();
        assert!(m_sft_approximation(&full, &m, &all, Exactness::Exact).unwrap().0.forbidden.is_empty());
    }

    #[test]
    fn translate_preserves_validity() {
        let z2 = Group::free_abelian(2);
        let f = vec![pat(&[(&[0, 0], 1), (&[1, 0], 1)]), pat(&[(&[0, 0], 1), (&[0, 1], 1)])];
        let shape: Shape = Group::free_abelian(2).ball(1).unwrap().members.into_iter().collect();
        for q in all_patterns(&shape, 2) {
            let v = locally_valid(&z2, &q, &f);
            assert_eq!(v, locally_valid(&z2, &q.translate(&z2, &p(&[3, -2])), &f));
        }
    }
}
