//! Validity oracles: refutation by unextendability, the transfer graph on `Z`,
//! periodic witnesses on abelian groups and exact languages of 1-D spacetime
//! subshifts.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::group::{Group, Point};
use crate::patterns::{Pattern, SftSpec, Symbol};
use crate::search::{Csp, SearchLimits};
use crate::shapes::Shape;

/// Caps for every semi-decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest padding radius tried when refuting a pattern.
    pub radius_cap: u32,
    /// Search nodes per backtracking run.
    pub node_cap: u64,
    /// Patterns enumerated on one shape.
    pub max_patterns: usize,
    /// Largest certificate verification radius.
    pub max_verify_radius: u32,
    /// Largest ball on which candidate forbidden sets are collected.
    pub max_candidate_radius: u32,
    /// Locally valid ball patterns screened when building a candidate.
    pub max_candidate_patterns: usize,
    /// Refinement passes per candidate and radius; each pass adds every
    /// unextendable pattern it meets.
    pub max_refinements: usize,
    /// Largest working radius of a language table.
    pub max_working_radius: u32,
    /// Largest torus period tried for periodic witnesses.
    pub max_period: i64,
}

impl Budget {
    pub fn small() -> Self {
        Budget {
            radius_cap: 3,
            node_cap: 200_000,
            max_patterns: 20_000,
            max_verify_radius: 2,
            max_candidate_radius: 2,
            max_candidate_patterns: 200,
            max_refinements: 4,
            max_working_radius: 6,
            max_period: 6,
        }
    }

    pub fn large() -> Self {
        Budget {
            radius_cap: 8,
            node_cap: 20_000_000,
            max_patterns: 2_000_000,
            max_verify_radius: 4,
            max_candidate_radius: 4,
            max_candidate_patterns: 20_000,
            max_refinements: 40,
            max_working_radius: 12,
            max_period: 10,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "small" => Ok(Budget::small()),
            "default" => Ok(Budget::default()),
            "large" => Ok(Budget::large()),
            _ => Err(Error::Usage(format!("unknown budget '{name}' (small, default, large)"))),
        }
    }

    pub fn limits(&self) -> SearchLimits {
        SearchLimits {
            node_cap: self.node_cap,
            max_solutions: self.max_patterns,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            radius_cap: 5,
            node_cap: 2_000_000,
            max_patterns: 200_000,
            max_verify_radius: 3,
            max_candidate_radius: 3,
            max_candidate_patterns: 1_000,
            max_refinements: 10,
            max_working_radius: 8,
            max_period: 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidityVerdict {
    /// No locally valid extension to the padding of this radius.
    Refuted(u32),
    /// Extendable at every radius up to this one; says nothing about global validity.
    NotRefuted(u32),
    /// Decided by an exact oracle.
    Exact(bool),
}

impl ValidityVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, ValidityVerdict::Refuted(_) | ValidityVerdict::Exact(false))
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, ValidityVerdict::Exact(true))
    }
}

/// `⋃ p·B_R` over `p ∈ dom(P) ∪ {e}` (both levels for level-tagged spaces).
pub fn padded_domain(group: &Group, p: &Pattern, r: u32) -> Result<Shape> {
    let ball = group.ball(r)?;
    let mut centers: Vec<Point> = p.cells.keys().map(|c| group.base_part(c)).collect();
    centers.push(group.acting_group().identity());
    let mut out = Shape::new();
    for c in centers {
        for b in &ball.members {
            out.insert(group.act(&c, b));
        }
    }
    out.extend(p.cells.keys().cloned());
    Ok(out)
}

/// Is there a locally valid pattern on the padded domain extending `p`?
pub fn extendable_to_radius(spec: &SftSpec, p: &Pattern, r: u32, node_cap: u64) -> Result<bool> {
    let dom = padded_domain(&spec.group, p, r)?;
    let csp = Csp::new(&spec.group, &spec.forbidden, spec.alphabet_size(), &dom);
    let limits = SearchLimits {
        node_cap,
        max_solutions: 1,
    };
    Ok(csp.solve(p, limits)?.is_some())
}

/// Tries radii `0..=radius_cap`; refutation is final, budget exhaustion stops early.
pub fn refute_global_validity(spec: &SftSpec, p: &Pattern, budget: &Budget) -> ValidityVerdict {
    if spec.forbids_empty() {
        return ValidityVerdict::Refuted(0);
    }
    if !spec.locally_valid(p) {
        return ValidityVerdict::Refuted(0);
    }
    let mut reached = 0;
    for r in 1..=budget.radius_cap {
        match extendable_to_radius(spec, p, r, budget.node_cap) {
            Ok(true) => reached = r,
            Ok(false) => return ValidityVerdict::Refuted(r),
            Err(_) => break,
        }
    }
    ValidityVerdict::NotRefuted(reached)
}

fn is_z(group: &Group) -> bool {
    matches!(group, Group::Abelian { free: 1, torsion } if torsion.is_empty())
}

/// The window-overlap graph of a `Z`-SFT, trimmed to vertices on bi-infinite paths.
#[derive(Clone, Debug)]
pub struct ZTransfer {
    width: usize,
    vertices: Vec<Vec<Symbol>>,
    succ: Vec<Vec<usize>>,
}

impl ZTransfer {
    pub fn new(spec: &SftSpec, node_cap: u64) -> Result<Self> {
        if !is_z(&spec.group) {
            return Err(Error::Unsupported(format!("transfer graph on {}", spec.group.key())));
        }
        let width = spec.diameter().max(1) as usize;
        let n = spec.alphabet_size();
        let limits = SearchLimits {
            node_cap,
            max_solutions: usize::MAX,
        };
        let cells = |len: usize| -> Shape { (0..len as i64).map(|i| Point(vec![i])).collect() };
        let words = |len: usize| -> Result<Vec<Vec<Symbol>>> {
            let csp = Csp::new(&spec.group, &spec.forbidden, n, &cells(len));
            Ok(csp
                .enumerate(&Pattern::new(), limits)?
                .into_iter()
                .map(|p| p.cells.values().copied().collect())
                .collect())
        };
        let vertices = words(width)?;
        let index: HashMap<Vec<Symbol>, usize> =
            vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let mut succ = vec![Vec::new(); vertices.len()];
        for w in words(width + 1)? {
            let (a, b) = (&w[..width], &w[1..]);
            if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
                succ[i].push(j);
            }
        }
        let mut alive = vec![true; vertices.len()];
        loop {
            let mut has_pred = vec![false; vertices.len()];
            for (i, s) in succ.iter().enumerate() {
                if alive[i] {
                    for &j in s {
                        if alive[j] {
                            has_pred[j] = true;
                        }
                    }
                }
            }
            let mut changed = false;
            for i in 0..vertices.len() {
                let has_succ = succ[i].iter().any(|&j| alive[j]);
                if alive[i] && (!has_succ || !has_pred[i]) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let kept: Vec<usize> = (0..vertices.len()).filter(|&i| alive[i]).collect();
        let remap: HashMap<usize, usize> = kept.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let new_vertices = kept.iter().map(|&i| vertices[i].clone()).collect();
        let new_succ = kept
            .iter()
            .map(|&i| succ[i].iter().filter_map(|j| remap.get(j).copied()).collect())
            .collect();
        Ok(ZTransfer {
            width,
            vertices: new_vertices,
            succ: new_succ,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Globally valid words of length `len`.
    pub fn words(&self, len: usize) -> BTreeSet<Vec<Symbol>> {
        let mut out = BTreeSet::new();
        if len == 0 {
            if !self.is_empty() {
                out.insert(Vec::new());
            }
            return out;
        }
        if len <= self.width {
            for v in &self.vertices {
                out.insert(v[..len].to_vec());
            }
            return out;
        }
        let mut layer: BTreeSet<(usize, Vec<Symbol>)> =
            self.vertices.iter().cloned().enumerate().collect();
        for _ in self.width..len {
            let mut next = BTreeSet::new();
            for (v, w) in &layer {
                for &u in &self.succ[*v] {
                    let mut w2 = w.clone();
                    w2.push(*self.vertices[u].last().unwrap());
                    next.insert((u, w2));
                }
            }
            layer = next;
        }
        layer.into_iter().map(|(_, w)| w).collect()
    }

    /// Globally valid patterns on an arbitrary finite `D ⊂ Z`.
    pub fn language(&self, d: &Shape) -> BTreeSet<Pattern> {
        let Some(lo) = d.iter().map(|p| p.0[0]).min() else {
            return if self.is_empty() {
                BTreeSet::new()
            } else {
                BTreeSet::from([Pattern::new()])
            };
        };
        let hi = d.iter().map(|p| p.0[0]).max().unwrap();
        self.words((hi - lo + 1) as usize)
            .into_iter()
            .map(|w| {
                Pattern::from_cells(
                    d.iter()
                        .map(|p| (p.clone(), w[(p.0[0] - lo) as usize])),
                )
            })
            .collect()
    }
}

/// Exact pattern sets on finite shapes, when the oracle can produce them.
pub trait LanguageOracle {
    fn name(&self) -> &'static str;
    fn language(&self, d: &Shape) -> Result<Option<BTreeSet<Pattern>>>;
}

pub struct ZTransferOracle {
    transfer: ZTransfer,
}

impl ZTransferOracle {
    pub fn new(spec: &SftSpec, node_cap: u64) -> Result<Self> {
        Ok(ZTransferOracle {
            transfer: ZTransfer::new(spec, node_cap)?,
        })
    }
}

impl LanguageOracle for ZTransferOracle {
    fn name(&self) -> &'static str {
        "transfer-graph"
    }

    fn language(&self, d: &Shape) -> Result<Option<BTreeSet<Pattern>>> {
        Ok(Some(self.transfer.language(d)))
    }
}

/// Exact oracle for the spacetime subshift `{x : x_{·,i+1} = f(x_{·,i})}` of a
/// surjective 1-D cellular automaton, on shapes lying in two consecutive rows.
pub struct SpacetimeOracle {
    n_symbols: usize,
    /// Offsets of the neighborhood, sorted.
    neighborhood: Vec<i64>,
    rule: HashMap<Vec<Symbol>, Symbol>,
}

impl SpacetimeOracle {
    /// Fails unless the automaton is surjective (checked by subset construction).
    pub fn new(n_symbols: usize, neighborhood: Vec<i64>, rule: HashMap<Vec<Symbol>, Symbol>) -> Result<Self> {
        let o = SpacetimeOracle {
            n_symbols,
            neighborhood,
            rule,
        };
        if !o.is_surjective() {
            return Err(Error::Unsupported("spacetime oracle needs a surjective automaton".into()));
        }
        Ok(o)
    }

    pub fn apply(&self, window: &[Symbol]) -> Symbol {
        self.rule[window]
    }

    fn span(&self) -> (i64, i64) {
        (self.neighborhood[0], *self.neighborhood.last().unwrap())
    }

    /// Every finite word has a preimage iff the subset construction over
    /// overlapping preimage windows never reaches the empty set.
    pub fn is_surjective(&self) -> bool {
        let (lo, hi) = self.span();
        let m = (hi - lo) as usize;
        let n = self.n_symbols as Symbol;
        let mut all: BTreeSet<Vec<Symbol>> = BTreeSet::from([Vec::new()]);
        for _ in 0..m {
            all = all
                .into_iter()
                .flat_map(|w| (0..n).map(move |a| [w.clone(), vec![a]].concat()))
                .collect();
        }
        let start = all.clone();
        let mut seen: HashSet<BTreeSet<Vec<Symbol>>> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for c in 0..n {
                let mut next = BTreeSet::new();
                for w in &s {
                    for a in 0..n {
                        let mut full = w.clone();
                        full.push(a);
                        let window: Vec<Symbol> =
                            self.neighborhood.iter().map(|&o| full[(o - lo) as usize]).collect();
                        if self.apply(&window) == c {
                            next.insert(full[1..].to_vec());
                        }
                    }
                }
                if next.is_empty() {
                    return false;
                }
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        true
    }
}

impl LanguageOracle for SpacetimeOracle {
    fn name(&self) -> &'static str {
        "spacetime"
    }

    fn language(&self, d: &Shape) -> Result<Option<BTreeSet<Pattern>>> {
        if d.iter().any(|p| p.0.len() != 2) {
            return Ok(None);
        }
        let Some(t0) = d.iter().map(|p| p.0[1]).min() else {
            return Ok(Some(BTreeSet::from([Pattern::new()])));
        };
        if d.iter().any(|p| p.0[1] > t0 + 1) {
            return Ok(None);
        }
        let (lo, hi) = self.span();
        let lower: Vec<i64> = d.iter().filter(|p| p.0[1] == t0).map(|p| p.0[0]).collect();
        let upper: Vec<i64> = d.iter().filter(|p| p.0[1] == t0 + 1).map(|p| p.0[0]).collect();
        let mut cols: Vec<i64> = lower.clone();
        for &j in &upper {
            cols.push(j + lo);
            cols.push(j + hi);
        }
        let c0 = *cols.iter().min().unwrap();
        let c1 = *cols.iter().max().unwrap();
        let len = (c1 - c0 + 1) as usize;
        // Depth-first over the row-t word; each upper cell is emitted as soon as
        // its neighborhood is filled.
        let mut ready: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
        for &j in &upper {
            ready.entry((j + hi - c0) as usize).or_default().push(j);
        }
        let mut out = BTreeSet::new();
        let mut word: Vec<Symbol> = Vec::with_capacity(len);
        let mut stack: Vec<Pattern> = vec![Pattern::new()];
        self.fill(&mut word, &mut stack, len, c0, t0, &lower, &ready, &mut out);
        Ok(Some(out))
    }
}

impl SpacetimeOracle {
    #[allow(clippy::too_many_arguments)]
    fn fill(
        &self,
        word: &mut Vec<Symbol>,
        stack: &mut Vec<Pattern>,
        len: usize,
        c0: i64,
        t0: i64,
        lower: &[i64],
        ready: &BTreeMap<usize, Vec<i64>>,
        out: &mut BTreeSet<Pattern>,
    ) {
        if word.len() == len {
            out.insert(stack.last().unwrap().clone());
            return;
        }
        let pos = word.len();
        let col = c0 + pos as i64;
        for a in 0..self.n_symbols as Symbol {
            word.push(a);
            let mut p = stack.last().unwrap().clone();
            if lower.contains(&col) {
                p.cells.insert(Point(vec![col, t0]), a);
            }
            if let Some(js) = ready.get(&pos) {
                for &j in js {
                    let window: Vec<Symbol> = self
                        .neighborhood
                        .iter()
                        .map(|&o| word[(j + o - c0) as usize])
                        .collect();
                    p.cells.insert(Point(vec![j, t0 + 1]), self.apply(&window));
                }
            }
            stack.push(p);
            self.fill(word, stack, len, c0, t0, lower, ready, out);
            stack.pop();
            word.pop();
        }
    }
}

/// Searches tori `Z_n^d × (torsion)` for a periodic point containing `p`.
/// A solution is a genuine configuration of the subshift, so `true` is exact.
pub fn periodic_witness(spec: &SftSpec, p: &Pattern, budget: &Budget) -> Result<bool> {
    let Group::Abelian { free, torsion } = &spec.group else {
        return Ok(false);
    };
    if spec.forbids_empty() {
        return Ok(false);
    }
    let span = |pat: &Pattern| -> i64 {
        (0..*free)
            .map(|i| {
                let xs = pat.cells.keys().map(|c| c.0[i]);
                let (mn, mx) = xs.clone().fold((i64::MAX, i64::MIN), |(a, b), x| (a.min(x), b.max(x)));
                if mn > mx {
                    0
                } else {
                    mx - mn
                }
            })
            .max()
            .unwrap_or(0)
    };
    let need = spec
        .forbidden
        .iter()
        .map(span)
        .chain(std::iter::once(span(p)))
        .max()
        .unwrap_or(0)
        + 1;
    for n in need.max(1)..=budget.max_period.max(need) {
        let mut orders = vec![n; *free];
        orders.extend(torsion.iter().copied());
        let torus = Group::Abelian {
            free: 0,
            torsion: orders.clone(),
        };
        let wrap = |c: &Point| -> Point {
            Point(c.0.iter().zip(&orders).map(|(x, k)| x.rem_euclid(*k)).collect())
        };
        let cells: u64 = orders.iter().map(|&k| k as u64).product();
        if cells > 4096 {
            break;
        }
        let forbidden: Vec<Pattern> = spec
            .forbidden
            .iter()
            .map(|f| Pattern::from_cells(f.cells.iter().map(|(c, a)| (wrap(c), *a))))
            .collect();
        let fixed = Pattern::from_cells(p.cells.iter().map(|(c, a)| (wrap(c), *a)));
        let all: Shape = torus.ball(u32::MAX / 2)?.members.into_iter().collect();
        let csp = Csp::new(&torus, &forbidden, spec.alphabet_size(), &all);
        let limits = SearchLimits {
            node_cap: budget.node_cap,
            max_solutions: 1,
        };
        match csp.solve(&fixed, limits) {
            Ok(Some(_)) => return Ok(true),
            Ok(None) => {}
            Err(Error::Budget(_)) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(false)
}

/// Refutation first, then an exact positive answer where one is available.
pub fn decide_validity(spec: &SftSpec, p: &Pattern, budget: &Budget) -> Result<ValidityVerdict> {
    let v = refute_global_validity(spec, p, budget);
    if v.is_refuted() {
        return Ok(v);
    }
    if is_z(&spec.group) {
        let t = ZTransfer::new(spec, budget.node_cap)?;
        return Ok(ValidityVerdict::Exact(t.language(&p.domain()).contains(p)));
    }
    if periodic_witness(spec, p, budget)? {
        return Ok(ValidityVerdict::Exact(true));
    }
    Ok(v)
}

/// For each symbol `a`, the status of `P ⊔ a@at`.
pub fn follower_symbols(
    spec: &SftSpec,
    p: &Pattern,
    at: &Point,
    budget: &Budget,
    exact: Option<&dyn LanguageOracle>,
) -> Result<Vec<(Symbol, ValidityVerdict)>> {
    if p.cells.contains_key(at) {
        return Err(Error::Usage("follower cell already in the pattern's domain".into()));
    }
    let mut dom = p.domain();
    dom.insert(at.clone());
    let table = match exact {
        Some(o) => o.language(&dom)?,
        None => None,
    };
    let mut out = Vec::new();
    for a in 0..spec.alphabet_size() as Symbol {
        let q = p.with(at.clone(), a);
        let v = match &table {
            Some(t) => ValidityVerdict::Exact(t.contains(&q)),
            None => refute_global_validity(spec, &q, budget),
        };
        out.push((a, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Point {
        Point(v.to_vec())
    }

    fn zspec(n: usize, forb: &[&[(i64, Symbol)]]) -> SftSpec {
        let alphabet = (0..n).map(|i| i.to_string()).collect();
        let f = forb
            .iter()
            .map(|cells| Pattern::from_cells(cells.iter().map(|(x, a)| (p(&[*x]), *a))))
            .collect();
        SftSpec::new(Group::free_abelian(1), alphabet, f).unwrap()
    }

    #[test]
    fn extendability_examples() {
        let golden = zspec(2, &[&[(0, 1), (1, 1)]]);
        let bad = Pattern::from_cells([(p(&[0]), 1), (p(&[1]), 1)]);
        for r in 0..3 {
            assert!(!extendable_to_radius(&golden, &bad, r, 10_000).unwrap());
        }
        let gap = Pattern::from_cells([(p(&[0]), 1), (p(&[2]), 1)]);
        assert!(extendable_to_radius(&golden, &gap, 3, 10_000).unwrap());
        let ab = zspec(2, &[&[(0, 0), (1, 1)], &[(0, 1), (1, 0)]]);
        let q = Pattern::from_cells([(p(&[0]), 0), (p(&[2]), 1)]);
        assert!(!extendable_to_radius(&ab, &q, 1, 10_000).unwrap());
        assert_eq!(refute_global_validity(&ab, &q, &Budget::small()), ValidityVerdict::Refuted(1));
        let ok = Pattern::from_cells([(p(&[0]), 1), (p(&[1]), 0)]);
        assert_eq!(
            refute_global_validity(&golden, &ok, &Budget::small()),
            ValidityVerdict::NotRefuted(3)
        );
        let empty = zspec(2, &[&[]]);
        assert_eq!(refute_global_validity(&empty, &ok, &Budget::small()), ValidityVerdict::Refuted(0));
    }

    #[test]
    fn transfer_languages() {
        let golden = zspec(2, &[&[(0, 1), (1, 1)]]);
        let t = ZTransfer::new(&golden, 100_000).unwrap();
        assert_eq!(t.words(3).len(), 5);
        let full = zspec(2, &[]);
        assert_eq!(ZTransfer::new(&full, 1000).unwrap().words(2).len(), 4);
        let none = zspec(2, &[&[(0, 0)], &[(0, 1)]]);
        let t = ZTransfer::new(&none, 1000).unwrap();
        assert!(t.is_empty());
        assert!(t.language(&Shape::new()).is_empty());
        let gap: Shape = [p(&[0]), p(&[2])].into();
        assert_eq!(ZTransfer::new(&golden, 1000).unwrap().language(&gap).len(), 4);
    }

    #[test]
    fn transfer_trims_dead_ends() {
        // 1 may only be followed by 2 and 2 by 2, and 2 may not follow 0: only 0^Z survives
        let s = zspec(3, &[&[(0, 1), (1, 0)], &[(0, 1), (1, 1)], &[(0, 2), (1, 0)], &[(0, 2), (1, 1)], &[(0, 0), (1, 2)], &[(0, 0), (1, 1)]]);
        let t = ZTransfer::new(&s, 100_000).unwrap();
        let words = t.words(3);
        assert!(words.contains(&vec![0, 0, 0]));
        assert!(words.contains(&vec![2, 2, 2]));
        assert!(!words.iter().any(|w| w.contains(&1)));
    }

    #[test]
    fn follower_examples() {
        let golden = zspec(2, &[&[(0, 1), (1, 1)]]);
        let oracle = ZTransferOracle::new(&golden, 10_000).unwrap();
        let f = follower_symbols(&golden, &Pattern::singleton(p(&[-1]), 1), &p(&[0]), &Budget::small(), Some(&oracle)).unwrap();
        assert_eq!(f, vec![(0, ValidityVerdict::Exact(true)), (1, ValidityVerdict::Exact(false))]);
        let full = zspec(3, &[]);
        let f = follower_symbols(&full, &Pattern::new(), &p(&[0]), &Budget::small(), None).unwrap();
        assert!(f.iter().all(|(_, v)| !v.is_refuted()));
    }

    #[test]
    fn periodic_witnesses() {
        let z2 = Group::free_abelian(2);
        let hard = SftSpec::new(
            z2,
            vec!["0".into(), "1".into()],
            vec![
                Pattern::from_cells([(p(&[0, 0]), 1), (p(&[1, 0]), 1)]),
                Pattern::from_cells([(p(&[0, 0]), 1), (p(&[0, 1]), 1)]),
            ],
        )
        .unwrap();
        let q = Pattern::from_cells([(p(&[0, 0]), 1), (p(&[1, 1]), 1)]);
        assert!(periodic_witness(&hard, &q, &Budget::small()).unwrap());
        assert_eq!(decide_validity(&hard, &q, &Budget::small()).unwrap(), ValidityVerdict::Exact(true));
    }

    fn xor_ca() -> SpacetimeOracle {
        let mut rule = HashMap::new();
        for a in 0..2u8 {
            for b in 0..2u8 {
                rule.insert(vec![a, b], a ^ b);
            }
        }
        SpacetimeOracle::new(2, vec![0, 1], rule).unwrap()
    }

    #[test]
    fn spacetime_oracle() {
        let o = xor_ca();
        let d: Shape = [p(&[0, 0]), p(&[1, 0]), p(&[0, 1])].into();
        let l = o.language(&d).unwrap().unwrap();
        assert_eq!(l.len(), 4);
        assert!(l.iter().all(|q| q.cells.values().map(|&a| a as u32).sum::<u32>() % 2 == 0));
        let row: Shape = (0..4).map(|j| p(&[j, 1])).collect();
        assert_eq!(o.language(&row).unwrap().unwrap().len(), 16);
        let far: Shape = [p(&[0, 0]), p(&[0, 2])].into();
        assert!(o.language(&far).unwrap().is_none());
        let mut rule = HashMap::new();
        for a in 0..2u8 {
            for b in 0..2u8 {
                rule.insert(vec![a, b], a & b);
            }
        }
        assert!(SpacetimeOracle::new(2, vec![0, 1], rule).is_err());
    }
}
