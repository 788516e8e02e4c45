//! Exact languages from a verified certificate.
//!
//! Cells of `B_W` are added one at a time in a fixed order. A cell `p` is added
//! only when its view `p⁻¹E` of the already added cells `E` is covered by a family
//! member `C` with `C ∩ B_diam ⊆ p⁻¹E`; then every locally valid extension by a
//! symbol at `p` is globally valid. Cells that fail the test are skipped.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::{Arc, RwLock};

use crate::certificates::{find_certificate, Certificate, CertificateSearch, Family};
use crate::error::{Error, Result};
use crate::group::{Group, Point};
use crate::oracles::{periodic_witness, refute_global_validity, Budget, LanguageOracle};
use crate::patterns::{violation_at, Pattern, SftSpec};
use crate::search::Csp;
use crate::shapes::{
    construction_order, minimal_iis_containing, tree_convex_extends, OrderTarget, Shape,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LanguageResult {
    Exact(Arc<BTreeSet<Pattern>>),
    NotDerived(String),
}

impl LanguageResult {
    pub fn exact(&self) -> Option<&BTreeSet<Pattern>> {
        match self {
            LanguageResult::Exact(s) => Some(s),
            LanguageResult::NotDerived(_) => None,
        }
    }
}

/// The cells added by saturation at working radius `W`, in order.
#[derive(Clone, Debug)]
pub struct Chain {
    pub radius: u32,
    pub order: Vec<Point>,
    index: HashMap<Point, usize>,
}

impl Chain {
    pub fn shape(&self) -> Shape {
        self.order.iter().cloned().collect()
    }
}

/// Derived languages kept for reuse, most recent first.
const CACHE_ENTRIES: usize = 64;

pub struct LanguageEngine {
    cert: Certificate,
    budget: Budget,
    diam_ball: Vec<Point>,
    chains: RwLock<BTreeMap<u32, Arc<Chain>>>,
    derived: RwLock<VecDeque<(Shape, Arc<BTreeSet<Pattern>>)>>,
}

impl LanguageEngine {
    pub fn new(cert: Certificate, budget: Budget) -> Result<Self> {
        let base = cert.q.group.acting_group().clone();
        let diam_ball = base.ball(cert.q.diameter())?.members;
        Ok(LanguageEngine {
            cert,
            budget,
            diam_ball,
            chains: RwLock::new(BTreeMap::new()),
            derived: RwLock::new(VecDeque::new()),
        })
    }

    pub fn certificate(&self) -> &Certificate {
        &self.cert
    }

    fn group(&self) -> &Group {
        &self.cert.q.group
    }

    fn candidate_order(&self, w: u32) -> Result<Vec<Point>> {
        let g = self.group();
        match g {
            Group::Free { .. } => {
                let mut m = g.ball(w)?.members;
                m.sort_by(|a, b| (g.norm(a), a).cmp(&(g.norm(b), b)));
                Ok(m)
            }
            Group::Levelled { base, .. } => {
                let pts = construction_order(base, &OrderTarget::WholeGroup, w)?.points();
                let mut out: Vec<Point> = pts.iter().map(|p| g.with_level(p, 2)).collect();
                out.extend(pts.iter().map(|p| g.with_level(p, 1)));
                Ok(out)
            }
            _ => Ok(construction_order(g, &OrderTarget::WholeGroup, w)?.points()),
        }
    }

    /// Whether an inductive interval covers `view` and its `B_diam` part lies in `view`.
    fn ii_covers(&self, base: &Group, view: &Shape) -> Result<bool> {
        for spec in minimal_iis_containing(base, view)? {
            let mut ok = true;
            for q in &self.diam_ball {
                if spec.contains(base, q)? && !view.contains(q) {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn derivable(&self, added: &Shape, p: &Point) -> Result<bool> {
        let g = self.group();
        match self.cert.family {
            Family::AllSubsets => Ok(true),
            Family::TreeConvexExtensions => tree_convex_extends(g, added, p),
            Family::InductiveIntervals => {
                let inv = g.inverse(p);
                let view: Shape = added.iter().map(|q| g.op(&inv, q)).collect();
                self.ii_covers(g, &view)
            }
            Family::Cornered2Level => {
                let Group::Levelled { base, .. } = g else {
                    return Err(Error::Unsupported("cornered family needs a levelled group".into()));
                };
                let inv = base.inverse(&g.base_part(p));
                let mut lower = Shape::new();
                let mut upper = Shape::new();
                for q in added {
                    let b = base.op(&inv, &g.base_part(q));
                    if g.level(q) == Some(1) {
                        lower.insert(b);
                    } else {
                        upper.insert(b);
                    }
                }
                if g.level(p) == Some(2) {
                    Ok(lower.is_empty() && self.ii_covers(base, &upper)?)
                } else {
                    Ok(self.diam_ball.iter().all(|q| upper.contains(q)) && self.ii_covers(base, &lower)?)
                }
            }
        }
    }

    /// Saturation at working radius `w`: the derivable cells of `B_W` in order.
    pub fn saturate(&self, w: u32) -> Result<Arc<Chain>> {
        if let Some(c) = self.chains.read().unwrap().get(&w) {
            return Ok(c.clone());
        }
        let mut added = Shape::new();
        let mut order = Vec::new();
        for p in self.candidate_order(w)? {
            if self.derivable(&added, &p)? {
                added.insert(p.clone());
                order.push(p);
            }
        }
        let index = order.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let chain = Arc::new(Chain { radius: w, order, index });
        self.chains.write().unwrap().insert(w, chain.clone());
        Ok(chain)
    }

    /// A translate of `d` inside the chain that is complete earliest.
    fn placement(&self, chain: &Chain, d: &Shape) -> Option<(Point, usize)> {
        let g = self.group();
        let d0 = d.iter().next()?;
        let mut best: Option<(Point, usize)> = None;
        for e in &chain.order {
            let Some(t) = g.translator(e, d0) else { continue };
            let mut last = 0;
            let mut fits = true;
            for c in d {
                match chain.index.get(&g.act(&t, c)) {
                    Some(&i) => last = last.max(i),
                    None => {
                        fits = false;
                        break;
                    }
                }
            }
            if fits && best.as_ref().is_none_or(|b| last < b.1) {
                best = Some((t, last));
            }
        }
        best
    }

    fn run_chain(&self, chain: &Chain, target: &Shape, stop: usize) -> Result<BTreeSet<Pattern>> {
        let g = self.group();
        let q = &self.cert.q;
        let diam = q.diameter();
        let steps = &chain.order[..=stop];
        let mut release = vec![0usize; steps.len()];
        for (i, c) in steps.iter().enumerate() {
            release[i] = if target.contains(c) {
                usize::MAX
            } else {
                (i..steps.len()).rev().find(|&j| g.distance(c, &steps[j]) <= diam).unwrap_or(i)
            };
        }
        let mut set: BTreeSet<Pattern> = BTreeSet::from([Pattern::new()]);
        let mut live = Shape::new();
        for (j, p) in steps.iter().enumerate() {
            let mut next = BTreeSet::new();
            for x in &set {
                for a in 0..q.alphabet_size() as u8 {
                    let y = x.with(p.clone(), a);
                    if !violation_at(g, &y, &q.forbidden, p) {
                        next.insert(y);
                    }
                }
            }
            live.insert(p.clone());
            let before = live.len();
            live.retain(|c| release[chain.index[c]] > j);
            set = if live.len() == before {
                next
            } else {
                next.into_iter().map(|y| y.restrict(&live)).collect()
            };
            if set.len() > self.budget.max_patterns {
                return Err(Error::Budget(format!(
                    "more than {} patterns while deriving",
                    self.budget.max_patterns
                )));
            }
        }
        Ok(set)
    }

    /// Restriction of the smallest cached language whose shape holds a translate of `d`.
    fn cached(&self, d: &Shape) -> Option<Arc<BTreeSet<Pattern>>> {
        let g = self.group();
        let d0 = d.iter().next()?;
        let cache = self.derived.read().unwrap();
        let mut best: Option<(&BTreeSet<Pattern>, Shape, Point)> = None;
        for (shape, set) in cache.iter() {
            if shape.len() < d.len() || best.as_ref().is_some_and(|b| b.0.len() <= set.len()) {
                continue;
            }
            for e in shape {
                let Some(t) = g.translator(e, d0) else { continue };
                let moved: Shape = d.iter().map(|c| g.act(&t, c)).collect();
                if moved.is_subset(shape) {
                    best = Some((set, moved, t));
                    break;
                }
            }
        }
        let (set, moved, t) = best?;
        let back = g.inverse(&t);
        Some(Arc::new(set.iter().map(|x| x.restrict(&moved).translate(g, &back)).collect()))
    }

    /// `L(d)` from the chain at working radius `w`, without escalation or caching.
    pub fn language_at(&self, d: &Shape, w: u32) -> Result<LanguageResult> {
        let g = self.group();
        if self.cert.is_empty_shift() {
            return Ok(LanguageResult::Exact(Arc::new(BTreeSet::new())));
        }
        if d.is_empty() {
            return Ok(LanguageResult::Exact(Arc::new(BTreeSet::from([Pattern::new()]))));
        }
        if self.cert.family == Family::AllSubsets {
            let q = &self.cert.q;
            let csp = Csp::new(g, &q.forbidden, q.alphabet_size(), d);
            let set = csp.enumerate(&Pattern::new(), self.budget.limits())?;
            return Ok(LanguageResult::Exact(Arc::new(set.into_iter().collect())));
        }
        let chain = self.saturate(w)?;
        let Some((t, stop)) = self.placement(&chain, d) else {
            return Ok(LanguageResult::NotDerived(format!(
                "no translate of the shape lies in the {} cells derived at working radius {w}",
                chain.order.len()
            )));
        };
        let target: Shape = d.iter().map(|c| g.act(&t, c)).collect();
        let set = self.run_chain(&chain, &target, stop)?;
        let back = g.inverse(&t);
        let out = set.iter().map(|x| x.restrict(&target).translate(g, &back)).collect();
        Ok(LanguageResult::Exact(Arc::new(out)))
    }

    fn remember(&self, d: &Shape, s: &Arc<BTreeSet<Pattern>>) {
        let mut cache = self.derived.write().unwrap();
        cache.push_front((d.clone(), s.clone()));
        cache.truncate(CACHE_ENTRIES);
    }

    /// `L(d)`, raising the working radius up to the budget cap when needed.
    pub fn language_on(&self, d: &Shape) -> Result<LanguageResult> {
        if let Some(s) = self.cached(d) {
            self.remember(d, &s);
            return Ok(LanguageResult::Exact(s));
        }
        let cap = self.budget.max_working_radius.max(1);
        let mut w = self.cert.radius.clamp(1, cap);
        loop {
            let r = match self.language_at(d, w) {
                Err(Error::Resource(m)) => LanguageResult::NotDerived(m),
                other => other?,
            };
            if let LanguageResult::Exact(s) = &r {
                self.remember(d, s);
                return Ok(r);
            }
            if w >= cap {
                return Ok(r);
            }
            w = (w * 2).min(cap);
        }
    }

    /// One pattern per line, sorted, in the input alphabet.
    pub fn listing(&self, d: &Shape) -> Result<Option<String>> {
        let q = &self.cert.q;
        Ok(self.language_on(d)?.exact().map(|set| {
            set.iter()
                .map(|x| x.describe(&q.group, &q.alphabet))
                .collect::<Vec<_>>()
                .join("\n")
        }))
    }
}

impl LanguageOracle for LanguageEngine {
    fn name(&self) -> &'static str {
        "certificate"
    }

    fn language(&self, d: &Shape) -> Result<Option<BTreeSet<Pattern>>> {
        Ok(self.language_on(d)?.exact().cloned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty { reason: String },
    Nonempty { reason: String },
    Unknown(String),
}

pub fn decide_emptiness(spec: &SftSpec, family: Family, budget: &Budget) -> Result<Emptiness> {
    let empty = Pattern::new();
    if let crate::oracles::ValidityVerdict::Refuted(r) = refute_global_validity(spec, &empty, budget) {
        return Ok(Emptiness::Empty {
            reason: format!("no locally valid pattern on a ball of radius {r}"),
        });
    }
    match find_certificate(spec, family, budget)? {
        CertificateSearch::Found(c) if c.is_empty_shift() => Ok(Emptiness::Empty {
            reason: format!("certificate at radius {} forbids the empty pattern", c.radius),
        }),
        CertificateSearch::Found(c) => Ok(Emptiness::Nonempty {
            reason: format!("certificate at radius {} admits a valid pattern", c.radius),
        }),
        CertificateSearch::Unknown(why) => {
            if spec.group.is_polycyclic() && periodic_witness(spec, &empty, budget)? {
                return Ok(Emptiness::Nonempty {
                    reason: "periodic configuration found".into(),
                });
            }
            Ok(Emptiness::Unknown(why))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inclusion {
    Subset { reason: String },
    NotSubset { witness: Pattern },
    Unknown(String),
}

/// Whether `X_x ⊆ X_y`, where both specs share a group and alphabet.
pub fn decide_inclusion(x: &SftSpec, y: &SftSpec, budget: &Budget) -> Result<Inclusion> {
    if x.group != y.group || x.alphabet_size() != y.alphabet_size() {
        return Err(Error::Usage("inclusion needs a common group and alphabet".into()));
    }
    let open: Vec<&Pattern> = y
        .forbidden
        .iter()
        .filter(|f| !refute_global_validity(x, f, budget).is_refuted())
        .collect();
    if open.is_empty() {
        return Ok(Inclusion::Subset {
            reason: "every forbidden pattern of the second shift is refuted in the first".into(),
        });
    }
    let cert = match find_certificate(x, Family::default_for(&x.group), budget)? {
        CertificateSearch::Found(c) => c,
        CertificateSearch::Unknown(why) => return Ok(Inclusion::Unknown(why)),
    };
    if cert.is_empty_shift() {
        return Ok(Inclusion::Subset {
            reason: "the first shift is empty".into(),
        });
    }
    let engine = LanguageEngine::new(cert, *budget)?;
    let mut missing = 0;
    for f in open {
        match engine.language_on(&f.domain())? {
            LanguageResult::Exact(set) if set.contains(f) => {
                return Ok(Inclusion::NotSubset { witness: f.clone() })
            }
            LanguageResult::Exact(_) => {}
            LanguageResult::NotDerived(_) => missing += 1,
        }
    }
    if missing == 0 {
        Ok(Inclusion::Subset {
            reason: "no forbidden pattern of the second shift is in the first language".into(),
        })
    } else {
        Ok(Inclusion::Unknown(format!("{missing} languages not derived")))
    }
}

/// Extends a globally valid `p` to `p.domain() ∪ target`, choosing at each cell
/// the least symbol that keeps the pattern globally valid.
pub fn complete_pattern(engine: &LanguageEngine, p: &Pattern, target: &Shape) -> Result<Pattern> {
    let g = engine.group();
    let mut dom = p.domain();
    dom.extend(target.iter().cloned());
    let set = match engine.language_on(&dom)? {
        LanguageResult::Exact(s) => s,
        LanguageResult::NotDerived(m) => return Err(Error::Budget(m)),
    };
    let pd = p.domain();
    if !set.iter().any(|x| x.restrict(&pd) == *p) {
        return Err(Error::Usage("pattern is not in the language".into()));
    }
    let mut rest: Vec<Point> = dom.difference(&pd).cloned().collect();
    rest.sort_by(|a, b| {
        let da = pd.iter().map(|c| g.distance(c, a)).min().unwrap_or(g.norm(a));
        let db = pd.iter().map(|c| g.distance(c, b)).min().unwrap_or(g.norm(b));
        (da, a).cmp(&(db, b))
    });
    let mut cur = p.clone();
    for c in rest {
        let a = (0..engine.cert.q.alphabet_size() as u8)
            .find(|&a| {
                let y = cur.with(c.clone(), a);
                set.iter().any(|x| y.cells.iter().all(|(k, v)| x.get(k) == Some(*v)))
            })
            .ok_or_else(|| Error::CertificateViolation("completion step found no valid symbol".into()))?;
        cur = cur.with(c, a);
    }
    Ok(cur)
}

/// The restriction of the shift to the subgroup `H_i` (first `i` polycycle axes),
/// defined by the certificate patterns that fit inside `H_i`.
pub fn project_to_subgroup(cert: &Certificate, i: usize) -> Result<SftSpec> {
    let g = &cert.q.group;
    if cert.family != Family::InductiveIntervals || !g.is_polycyclic() {
        return Err(Error::Unsupported("projection needs an inductive-interval certificate".into()));
    }
    if i == 0 || i > g.axes() {
        return Err(Error::Usage(format!("subgroup index {i} outside 1..={}", g.axes())));
    }
    let h = g.subgroup(i)?;
    let mut forbidden = Vec::new();
    for f in &cert.q.forbidden {
        let c = f.canonical(g);
        let mut cells = Vec::new();
        let mut inside = true;
        for (p, a) in &c.cells {
            let t = g.to_tuple(p)?;
            if t[i..].iter().any(|&x| x != 0) {
                inside = false;
                break;
            }
            cells.push((h.from_tuple(&t[..i])?, *a));
        }
        if inside {
            forbidden.push(Pattern::from_cells(cells));
        }
    }
    SftSpec::new(h, cert.q.alphabet.clone(), forbidden)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Point {
        Point(v.to_vec())
    }

    fn spec(g: Group, n: usize, forb: Vec<Vec<(Vec<i64>, u8)>>) -> SftSpec {
        let f = forb
            .into_iter()
            .map(|cells| Pattern::from_cells(cells.into_iter().map(|(c, a)| (Point(c), a))))
            .collect();
        SftSpec::new(g, (0..n).map(|i| i.to_string()).collect(), f).unwrap()
    }

    fn golden() -> SftSpec {
        spec(Group::free_abelian(1), 2, vec![vec![(vec![0], 1), (vec![1], 1)]])
    }

    fn ledrappier() -> SftSpec {
        let cells = [vec![0, 0], vec![1, 0], vec![0, 1]];
        let mut forb = Vec::new();
        for m in 0..8u8 {
            let bits: Vec<u8> = (0..3).map(|i| (m >> i) & 1).collect();
            if bits.iter().sum::<u8>() % 2 == 1 {
                forb.push(cells.iter().cloned().zip(bits).collect());
            }
        }
        spec(Group::free_abelian(2), 2, forb)
    }

    fn engine(s: &SftSpec) -> LanguageEngine {
        let b = Budget::default();
        let CertificateSearch::Found(c) = find_certificate(s, Family::default_for(&s.group), &b).unwrap() else {
            panic!("no certificate")
        };
        LanguageEngine::new(c, b).unwrap()
    }

    fn shape(pts: &[&[i64]]) -> Shape {
        pts.iter().map(|c| p(c)).collect()
    }

    #[test]
    fn golden_mean_languages() {
        let e = engine(&golden());
        let l = e.language_at(&shape(&[&[0], &[1], &[2]]), 3).unwrap();
        assert_eq!(l.exact().unwrap().len(), 5);
        let gap = e.language_on(&shape(&[&[0], &[2]])).unwrap();
        assert_eq!(gap.exact().unwrap().len(), 4);
        let fib = [2, 3, 5, 8, 13, 21, 34, 55, 89, 144];
        for (n, want) in fib.iter().enumerate() {
            let d: Shape = (0..=n as i64).map(|x| p(&[x])).collect();
            assert_eq!(e.language_on(&d).unwrap().exact().unwrap().len(), *want, "n = {}", n + 1);
        }
    }

    #[test]
    fn ledrappier_triangle_is_even() {
        let e = engine(&ledrappier());
        let d = shape(&[&[0, 0], &[1, 0], &[0, 1]]);
        let l = e.language_on(&d).unwrap();
        let set = l.exact().unwrap();
        assert_eq!(set.len(), 4);
        assert!(set.iter().all(|x| x.cells.values().sum::<u8>() % 2 == 0));
        let row = shape(&[&[0, 0], &[1, 0], &[2, 0]]);
        assert_eq!(e.language_on(&row).unwrap().exact().unwrap().len(), 8);
    }

    #[test]
    fn completions() {
        let e = engine(&golden());
        let start = Pattern::singleton(p(&[-1]), 1);
        let target: Shape = (-1..=3).map(|x| p(&[x])).collect();
        let done = complete_pattern(&e, &start, &target).unwrap();
        assert_eq!(done.cells.values().copied().collect::<Vec<_>>(), vec![1, 0, 0, 0, 0]);
        let bad = Pattern::from_cells([(p(&[0]), 1), (p(&[1]), 1)]);
        assert!(complete_pattern(&e, &bad, &target).is_err());

        let l = engine(&ledrappier());
        let two = Pattern::from_cells([(p(&[1, 0]), 1), (p(&[0, 1]), 1)]);
        let c = complete_pattern(&l, &two, &shape(&[&[0, 0]])).unwrap();
        assert_eq!(c.get(&p(&[0, 0])), Some(0));
        let from_empty = complete_pattern(&l, &Pattern::new(), &shape(&[&[0, 0]])).unwrap();
        assert_eq!(from_empty.get(&p(&[0, 0])), Some(0));
    }

    #[test]
    fn projections() {
        let l = engine(&ledrappier());
        let h1 = project_to_subgroup(l.certificate(), 1).unwrap();
        assert!(h1.forbidden.is_empty());
        let g = engine(&golden());
        let same = project_to_subgroup(g.certificate(), 1).unwrap();
        assert_eq!(same.forbidden, golden().forbidden);
    }

    #[test]
    fn emptiness_and_inclusion() {
        let b = Budget::small();
        let full = spec(Group::free_abelian(1), 2, vec![]);
        let none = spec(Group::free_abelian(1), 2, vec![vec![(vec![0], 0)], vec![(vec![0], 1)]]);
        assert!(matches!(decide_emptiness(&none, Family::InductiveIntervals, &b).unwrap(), Emptiness::Empty { .. }));
        assert!(matches!(decide_emptiness(&golden(), Family::InductiveIntervals, &b).unwrap(), Emptiness::Nonempty { .. }));
        assert!(matches!(decide_inclusion(&golden(), &full, &b).unwrap(), Inclusion::Subset { .. }));
        match decide_inclusion(&full, &golden(), &b).unwrap() {
            Inclusion::NotSubset { witness } => assert_eq!(witness, golden().forbidden[0]),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn heisenberg_full_shift_language() {
        let s = spec(Group::heisenberg(), 2, vec![]);
        let e = engine(&s);
        let d: Shape = Group::heisenberg().ball(1).unwrap().members.into_iter().collect();
        assert_eq!(e.language_on(&d).unwrap().exact().unwrap().len(), 32);
    }
}
