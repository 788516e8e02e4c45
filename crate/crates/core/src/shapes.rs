//! Inductive intervals and their prefixes, construction and extension orders,
//! tree convex sets on free groups and cornered two-level shapes.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::group::{Group, Point};

pub type Shape = BTreeSet<Point>;

/// A grazing interval on one polycycle axis. On a finite axis `Z_k` the
/// interval is given by sign and length (`NegFinite(m)` is `{-1, …, -m} mod k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxisInterval {
    NegInfinite,
    NegFinite(i64),
    Empty,
    PosFinite(i64),
    PosInfinite,
}

impl AxisInterval {
    pub fn contains(&self, j: i64, order: Option<i64>) -> bool {
        match (*self, order) {
            (AxisInterval::Empty, _) => false,
            (AxisInterval::PosFinite(m), _) => 1 <= j && j <= m,
            (AxisInterval::PosInfinite, None) => j >= 1,
            (AxisInterval::NegFinite(m), None) => -m <= j && j <= -1,
            (AxisInterval::NegInfinite, None) => j <= -1,
            (AxisInterval::NegFinite(m), Some(k)) => k - m <= j && j < k,
            (AxisInterval::PosInfinite | AxisInterval::NegInfinite, Some(_)) => j != 0,
        }
    }

    /// −1, 0 or 1.
    pub fn sign(&self) -> i64 {
        match self {
            AxisInterval::NegInfinite | AxisInterval::NegFinite(_) => -1,
            AxisInterval::Empty => 0,
            AxisInterval::PosFinite(_) | AxisInterval::PosInfinite => 1,
        }
    }

    /// Integer hull `[lo, hi]` of `I ∪ {0}`, `None` standing for an unbounded end.
    fn absorbed_hull(&self) -> (Option<i64>, Option<i64>) {
        match *self {
            AxisInterval::NegInfinite => (None, Some(0)),
            AxisInterval::NegFinite(m) => (Some(-m), Some(0)),
            AxisInterval::Empty => (Some(0), Some(0)),
            AxisInterval::PosFinite(m) => (Some(0), Some(m)),
            AxisInterval::PosInfinite => (Some(0), None),
        }
    }
}

/// Per-axis grazing intervals `(I_1, …, I_n)` describing one inductive interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxisIntervalSpec {
    pub axes: Vec<AxisInterval>,
}

impl AxisIntervalSpec {
    pub fn new(group: &Group, axes: Vec<AxisInterval>) -> Result<Self> {
        if !group.is_polycyclic() {
            return Err(Error::Unsupported(format!("inductive intervals on {}", group.key())));
        }
        if axes.len() != group.axes() {
            return Err(Error::Usage(format!(
                "{} axis intervals given for a group with {} axes",
                axes.len(),
                group.axes()
            )));
        }
        let mut out = Vec::with_capacity(axes.len());
        for (i, a) in axes.into_iter().enumerate() {
            let a = match (a, group.axis_order(i)) {
                (AxisInterval::PosFinite(m) | AxisInterval::NegFinite(m), _) if m < 1 => {
                    return Err(Error::Usage("finite axis intervals have length at least 1".into()))
                }
                (AxisInterval::PosFinite(m) | AxisInterval::NegFinite(m), Some(k)) if m >= k => {
                    return Err(Error::Usage(format!("interval length {m} does not fit in Z{k}")))
                }
                (AxisInterval::PosInfinite | AxisInterval::NegInfinite, Some(k)) => {
                    AxisInterval::PosFinite(k - 1)
                }
                (AxisInterval::NegFinite(m), Some(k)) if m == k - 1 => AxisInterval::PosFinite(m),
                (a, _) => a,
            };
            out.push(a);
        }
        Ok(AxisIntervalSpec { axes: out })
    }

    pub fn empty(group: &Group) -> Self {
        AxisIntervalSpec {
            axes: vec![AxisInterval::Empty; group.axes()],
        }
    }

    pub fn contains(&self, group: &Group, g: &Point) -> Result<bool> {
        let t = group.to_tuple(g)?;
        Ok(tuple_in_ii(group, &self.axes, &t))
    }

    /// `C ∩ B_R`.
    pub fn truncate(&self, group: &Group, r: u32) -> Result<Shape> {
        let ball = group.ball(r)?;
        let mut out = Shape::new();
        for p in ball.members {
            if self.contains(group, &p)? {
                out.insert(p);
            }
        }
        Ok(out)
    }
}

fn tuple_in_ii(group: &Group, axes: &[AxisInterval], t: &[i64]) -> bool {
    match t.iter().rposition(|&x| x != 0) {
        Some(i) => axes[i].contains(t[i], group.axis_order(i)),
        None => false,
    }
}

/// Membership of `g` in the inductive interval described by `spec`.
pub fn ii_contains(group: &Group, spec: &AxisIntervalSpec, g: &Point) -> Result<bool> {
    spec.contains(group, g)
}

type PrefixCache = RwLock<HashMap<(Group, u32), Arc<Vec<Shape>>>>;

fn prefix_cache() -> &'static PrefixCache {
    static CACHE: OnceLock<PrefixCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Every axis spec that can make a difference inside `B_R`.
pub fn truncated_specs(group: &Group, r: u32) -> Result<Vec<AxisIntervalSpec>> {
    if !group.is_polycyclic() {
        return Err(Error::Unsupported(format!("inductive intervals on {}", group.key())));
    }
    let ball = group.ball(r)?;
    let n = group.axes();
    let mut reach = vec![0i64; n];
    for p in &ball.members {
        let t = group.to_tuple(p)?;
        for i in 0..n {
            reach[i] = reach[i].max(t[i].abs());
        }
    }
    let mut choices: Vec<Vec<AxisInterval>> = Vec::with_capacity(n);
    for (i, &m) in reach.iter().enumerate() {
        let top = match group.axis_order(i) {
            Some(k) if m > 0 => k - 1,
            _ => m,
        };
        let mut c = vec![AxisInterval::Empty];
        for len in 1..=top {
            c.push(AxisInterval::PosFinite(len));
            if group.axis_order(i).is_none_or(|k| len < k - 1) {
                c.push(AxisInterval::NegFinite(len));
            }
        }
        choices.push(c);
    }
    let mut out = vec![Vec::new()];
    for c in &choices {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for a in c {
                let mut v: Vec<AxisInterval> = prefix.clone();
                v.push(*a);
                next.push(v);
            }
        }
        out = next;
    }
    Ok(out.into_iter().map(|axes| AxisIntervalSpec { axes }).collect())
}

/// The exact set `{C ∩ B_R : C an inductive interval}`, sorted and duplicate free.
pub fn ii_prefixes(group: &Group, r: u32) -> Result<Arc<Vec<Shape>>> {
    let key = (group.clone(), r);
    if let Some(v) = prefix_cache().read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let ball = group.ball(r)?;
    let tuples: Vec<(Point, Vec<i64>)> = ball
        .members
        .iter()
        .map(|p| Ok((p.clone(), group.to_tuple(p)?)))
        .collect::<Result<_>>()?;
    let mut set: BTreeSet<Shape> = BTreeSet::new();
    for spec in truncated_specs(group, r)? {
        let s: Shape = tuples
            .iter()
            .filter(|(_, t)| tuple_in_ii(group, &spec.axes, t))
            .map(|(p, _)| p.clone())
            .collect();
        set.insert(s);
    }
    let v = Arc::new(set.into_iter().collect::<Vec<_>>());
    prefix_cache().write().unwrap().insert(key, v.clone());
    Ok(v)
}

/// What a construction order enumerates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderTarget {
    WholeGroup,
    Interval(AxisIntervalSpec),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderStep {
    pub point: Point,
    /// Index of the block (coset of the top active axis) the point belongs to.
    pub stage: usize,
}

/// An order truncated to `B_W`. Only views inside `B_{W - |s|}` are meaningful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedOrder {
    pub radius: u32,
    pub steps: Vec<OrderStep>,
}

impl TruncatedOrder {
    pub fn points(&self) -> Vec<Point> {
        self.steps.iter().map(|s| s.point.clone()).collect()
    }
}

fn axis_peel(group: &Group, g: &Point, i: usize) -> (i64, Point) {
    let t = group.to_tuple(g).expect("polycyclic");
    let j = t[i];
    (j, group.op(&group.axis_power(i, -j), g))
}

/// Nonnegative coset indices first, then negative ones; inside the coset
/// `h_i^j H_{i-1}` the element `h_i^{-j} g` is ordered recursively.
fn whole_key(group: &Group, g: &Point, upto: usize, out: &mut Vec<i64>) {
    if upto == 0 {
        return;
    }
    let i = upto - 1;
    let (j, u) = axis_peel(group, g, i);
    match group.axis_order(i) {
        None if j < 0 => out.extend([1, -j]),
        _ => out.extend([0, j]),
    }
    whole_key(group, &u, i, out);
}

fn ii_key(group: &Group, axes: &[AxisInterval], g: &Point, upto: usize, out: &mut Vec<i64>) {
    if upto == 0 {
        return;
    }
    let i = upto - 1;
    let (j, u) = axis_peel(group, g, i);
    if j != 0 {
        let dist = match (group.axis_order(i), axes[i].sign()) {
            (Some(k), -1) => k - j,
            (Some(_), _) => j,
            (None, _) => j.abs(),
        };
        out.extend([0, dist]);
        whole_key(group, &u, i, out);
    } else {
        out.push(1);
        ii_key(group, axes, g, i, out);
    }
}

/// Position of residue/integer `j ∉ I ∪ {0}` when the outside of `I ∪ {0}` is
/// absorbed alternately, starting on the side opposite to `I` (positive if `I` is empty).
fn alternating_rank(interval: AxisInterval, j: i64, order: Option<i64>) -> i64 {
    let first_positive = interval.sign() <= 0;
    let (lo, hi) = interval.absorbed_hull();
    match order {
        None => {
            let (side_positive, d) = match (lo, hi) {
                (_, Some(h)) if j > h => (true, j - h),
                (Some(l), _) => (false, l - j),
                _ => unreachable!("point inside absorbed hull"),
            };
            if lo.is_none() || hi.is_none() {
                return d;
            }
            2 * (d - 1) + if side_positive == first_positive { 0 } else { 1 }
        }
        Some(k) => {
            let lo = lo.unwrap_or(0);
            let hi = hi.unwrap_or(k - 1);
            let mut taken: HashSet<i64> = (lo..=hi).map(|x| x.rem_euclid(k)).collect();
            let (mut up, mut down) = (hi, lo);
            let mut positive = first_positive;
            let mut rank = 0;
            while (taken.len() as i64) < k {
                let next = if positive {
                    up += 1;
                    up.rem_euclid(k)
                } else {
                    down -= 1;
                    down.rem_euclid(k)
                };
                positive = !positive;
                if taken.insert(next) {
                    if next == j.rem_euclid(k) {
                        return rank;
                    }
                    rank += 1;
                }
            }
            unreachable!("residue {j} not outside the absorbed hull")
        }
    }
}

fn ext_key(group: &Group, axes: &[AxisInterval], g: &Point, upto: usize, out: &mut Vec<i64>) {
    if upto == 0 {
        return;
    }
    let i = upto - 1;
    let (j, u) = axis_peel(group, g, i);
    if j == 0 {
        out.push(0);
        ext_key(group, axes, g, i, out);
    } else {
        out.extend([1, alternating_rank(axes[i], j, group.axis_order(i))]);
        let empty = vec![AxisInterval::Empty; i];
        ext_key(group, &empty, &u, i, out);
    }
}

fn staged(mut keyed: Vec<(Vec<i64>, Point)>, radius: u32, block_len: usize) -> TruncatedOrder {
    keyed.sort();
    let mut steps = Vec::with_capacity(keyed.len());
    let mut stage = 0;
    let mut last: Option<Vec<i64>> = None;
    for (k, p) in keyed {
        let head = k[..block_len.min(k.len())].to_vec();
        if let Some(prev) = &last {
            if *prev != head {
                stage += 1;
            }
        }
        last = Some(head);
        steps.push(OrderStep { point: p, stage });
    }
    TruncatedOrder { radius, steps }
}

/// A well-order of the whole group or of an inductive interval, truncated to `B_W`,
/// in which every strict prefix seen from the next point is an inductive interval.
pub fn construction_order(group: &Group, target: &OrderTarget, w: u32) -> Result<TruncatedOrder> {
    if !group.is_polycyclic() {
        return Err(Error::Unsupported(format!("construction order on {}", group.key())));
    }
    let ball = group.ball(w)?;
    let n = group.axes();
    let mut keyed = Vec::new();
    for p in ball.members {
        let mut k = Vec::new();
        match target {
            OrderTarget::WholeGroup => whole_key(group, &p, n, &mut k),
            OrderTarget::Interval(spec) => {
                if !spec.contains(group, &p)? {
                    continue;
                }
                ii_key(group, &spec.axes, &p, n, &mut k);
            }
        }
        keyed.push((k, p));
    }
    Ok(staged(keyed, w, 2))
}

/// An order on `(B_W ∖ C) ∪ {e}` starting at the identity such that every step
/// sees the earlier points together with `C` as an inductive interval.
pub fn extension_order(group: &Group, spec: &AxisIntervalSpec, w: u32) -> Result<TruncatedOrder> {
    if !group.is_polycyclic() {
        return Err(Error::Unsupported(format!("extension order on {}", group.key())));
    }
    let ball = group.ball(w)?;
    let mut keyed = Vec::new();
    for p in ball.members {
        if spec.contains(group, &p)? {
            continue;
        }
        let mut k = Vec::new();
        ext_key(group, &spec.axes, &p, group.axes(), &mut k);
        keyed.push((k, p));
    }
    Ok(staged(keyed, w, 2))
}

/// `s⁻¹ · points ∩ B_R`.
pub fn view_from(group: &Group, s: &Point, points: impl IntoIterator<Item = Point>, r: u32) -> Shape {
    let inv = group.inverse(s);
    points
        .into_iter()
        .map(|p| group.op(&inv, &p))
        .filter(|q| group.norm(q) <= r)
        .collect()
}

/// Verifies the translated-prefix property of an order: for each step `s`, the
/// translate `s⁻¹ · (base ∪ earlier)` agrees inside `B_{W - |s|}` with some inductive
/// interval. Returns the index of the first failing step.
pub fn check_order(group: &Group, order: &TruncatedOrder, base: &Shape) -> Result<Option<usize>> {
    let mut seen: Vec<Point> = base.iter().cloned().collect();
    for (idx, step) in order.steps.iter().enumerate() {
        let ns = group.norm(&step.point);
        if ns <= order.radius {
            let r = order.radius - ns;
            let view = view_from(group, &step.point, seen.iter().cloned(), r);
            if ii_prefixes(group, r)?.binary_search(&view).is_err() {
                return Ok(Some(idx));
            }
        }
        seen.push(step.point.clone());
    }
    Ok(None)
}

/// Axis specs of the inductive intervals that contain `v` and are minimal among
/// those (one candidate per sign choice on finite axes).
pub fn minimal_iis_containing(group: &Group, v: &Shape) -> Result<Vec<AxisIntervalSpec>> {
    let n = group.axes();
    let mut per_axis: Vec<Vec<AxisInterval>> = Vec::with_capacity(n);
    let mut tuples: Vec<Vec<i64>> = Vec::with_capacity(v.len());
    for p in v {
        tuples.push(group.to_tuple(p)?);
    }
    for i in 0..n {
        let vals: Vec<i64> = tuples
            .iter()
            .filter(|t| t.iter().rposition(|&x| x != 0) == Some(i))
            .map(|t| t[i])
            .collect();
        if vals.is_empty() {
            per_axis.push(vec![AxisInterval::Empty]);
            continue;
        }
        match group.axis_order(i) {
            None => {
                let pos = vals.iter().all(|&x| x > 0);
                let neg = vals.iter().all(|&x| x < 0);
                if pos {
                    per_axis.push(vec![AxisInterval::PosFinite(*vals.iter().max().unwrap())]);
                } else if neg {
                    per_axis.push(vec![AxisInterval::NegFinite(-*vals.iter().min().unwrap())]);
                } else {
                    return Ok(Vec::new());
                }
            }
            Some(k) => {
                let up = *vals.iter().max().unwrap();
                let down = k - *vals.iter().min().unwrap();
                let mut c = vec![AxisInterval::PosFinite(up)];
                if down < k - 1 {
                    c.push(AxisInterval::NegFinite(down));
                }
                per_axis.push(c);
            }
        }
    }
    let mut out: Vec<Vec<AxisInterval>> = vec![Vec::new()];
    for c in per_axis {
        out = out
            .into_iter()
            .flat_map(|p| {
                c.iter().map(move |a| {
                    let mut q = p.clone();
                    q.push(*a);
                    q
                })
            })
            .collect();
    }
    Ok(out.into_iter().map(|axes| AxisIntervalSpec { axes }).collect())
}

fn require_free(group: &Group) -> Result<()> {
    if group.is_free() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("tree convexity on {}", group.key())))
    }
}

/// Tree convexity: for `u, w ∈ S` and `v` on their geodesic with
/// `r = min(d(v,u), d(v,w))`, the ball `v·B_{r-1}` lies in `S`.
pub fn tree_convex_check(group: &Group, s: &Shape) -> Result<bool> {
    require_free(group)?;
    let pts: Vec<&Point> = s.iter().collect();
    let mut balls: HashMap<u32, Vec<Point>> = HashMap::new();
    for (a, u) in pts.iter().enumerate() {
        for w in &pts[a + 1..] {
            let path = group.op(&group.inverse(u), w);
            let len = path.0.len() as u32;
            for k in 1..len {
                let r = k.min(len - k);
                if r == 0 {
                    continue;
                }
                let v = group.op(u, &Point(path.0[..k as usize].to_vec()));
                if let std::collections::hash_map::Entry::Vacant(e) = balls.entry(r - 1) {
                    e.insert(group.ball(r - 1)?.members);
                }
                for b in &balls[&(r - 1)] {
                    if !s.contains(&group.op(&v, b)) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// For a tree convex `S` and `p ∉ S`, whether `S ∪ {p}` is still tree convex.
/// Only geodesics ending at `p` can introduce new conditions.
pub fn tree_convex_extends(group: &Group, s: &Shape, p: &Point) -> Result<bool> {
    require_free(group)?;
    let mut balls: HashMap<u32, Vec<Point>> = HashMap::new();
    let inside = |q: &Point| q == p || s.contains(q);
    for w in s {
        let path = group.op(&group.inverse(p), w);
        let len = path.0.len() as u32;
        for k in 1..len {
            let r = k.min(len - k);
            let v = group.op(p, &Point(path.0[..k as usize].to_vec()));
            if let std::collections::hash_map::Entry::Vacant(e) = balls.entry(r - 1) {
                e.insert(group.ball(r - 1)?.members);
            }
            if !balls[&(r - 1)].iter().all(|b| inside(&group.op(&v, b))) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `e ∉ S` and both `S` and `S ∪ {e}` are tree convex.
pub fn extension_set_check(group: &Group, s: &Shape) -> Result<bool> {
    require_free(group)?;
    let e = group.identity();
    if s.contains(&e) || !tree_convex_check(group, s)? {
        return Ok(false);
    }
    let mut with_e = s.clone();
    with_e.insert(e);
    tree_convex_check(group, &with_e)
}

const MAX_SUBSET_ENUMERATION: usize = 1 << 20;

/// Every subset of `B_R ∖ {e}`.
pub fn all_subset_prefixes(group: &Group, r: u32) -> Result<Vec<Shape>> {
    let e = group.identity();
    let pts: Vec<Point> = group.ball(r)?.members.into_iter().filter(|p| *p != e).collect();
    subsets(&pts)
}

fn subsets(pts: &[Point]) -> Result<Vec<Shape>> {
    if pts.len() >= 21 || (1usize << pts.len()) > MAX_SUBSET_ENUMERATION {
        return Err(Error::Resource(format!("{} cells give too many subsets", pts.len())));
    }
    Ok((0u64..(1u64 << pts.len()))
        .map(|mask| {
            pts.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect())
}

/// Prefixes `C ∩ B_R` of extension sets of tree convex sets. Such a set avoids the
/// identity, so all its words start with the same letter; each branch is
/// enumerated separately.
pub fn tree_convex_extension_prefixes(group: &Group, r: u32) -> Result<Vec<Shape>> {
    require_free(group)?;
    let e = group.identity();
    let ball = group.ball(r)?;
    let mut out: BTreeSet<Shape> = BTreeSet::new();
    for first in group.generators() {
        let branch: Vec<Point> = ball
            .members
            .iter()
            .filter(|p| **p != e && p.0[0] == first.0[0])
            .cloned()
            .collect();
        for s in subsets(&branch)? {
            if extension_set_check(group, &s)? {
                out.insert(s);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// A shape over `G × {1, 2}` with a distinguished cell outside it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CorneredShape {
    pub shape: Shape,
    pub corner: Point,
}

/// `{P × {2} with corner (e,2)} ∪ {B_R × {2} ∪ P × {1} with corner (e,1)}` for
/// `P` ranging over the inductive-interval prefixes of the base group.
pub fn cornered_prefixes(base: &Group, r: u32) -> Result<Vec<CorneredShape>> {
    let two = Group::levelled(base.clone(), 2);
    let ball = base.ball(r)?;
    let mut out = Vec::new();
    for p in ii_prefixes(base, r)?.iter() {
        out.push(CorneredShape {
            shape: p.iter().map(|q| two.with_level(q, 2)).collect(),
            corner: two.origin_at_level(2),
        });
    }
    for p in ii_prefixes(base, r)?.iter() {
        let mut shape: Shape = ball.members.iter().map(|q| two.with_level(q, 2)).collect();
        shape.extend(p.iter().map(|q| two.with_level(q, 1)));
        out.push(CorneredShape {
            shape,
            corner: two.origin_at_level(1),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use AxisInterval::*;

    fn p(v: &[i64]) -> Point {
        Point(v.to_vec())
    }

    fn spec(g: &Group, axes: Vec<AxisInterval>) -> AxisIntervalSpec {
        AxisIntervalSpec::new(g, axes).unwrap()
    }

    #[test]
    fn membership_examples() {
        let z2 = Group::free_abelian(2);
        let s = spec(&z2, vec![NegFinite(8), PosFinite(5)]);
        assert!(ii_contains(&z2, &s, &p(&[3, 2])).unwrap());
        assert!(ii_contains(&z2, &s, &p(&[-3, 0])).unwrap());
        assert!(!ii_contains(&z2, &s, &p(&[0, 0])).unwrap());
        let z3 = Group::free_abelian(3);
        let s3 = spec(&z3, vec![NegFinite(8), PosFinite(5), NegFinite(64)]);
        assert!(ii_contains(&z3, &s3, &p(&[7, -2, -10])).unwrap());
        let e = AxisIntervalSpec::empty(&z2);
        for q in z2.ball(3).unwrap().members {
            assert!(!ii_contains(&z2, &e, &q).unwrap());
        }
    }

    #[test]
    fn prefix_counts() {
        let z = Group::free_abelian(1);
        let one = ii_prefixes(&z, 1).unwrap();
        assert_eq!(one.len(), 3);
        assert!(one.contains(&Shape::new()));
        assert_eq!(ii_prefixes(&z, 0).unwrap().as_slice(), &[Shape::new()]);
        assert_eq!(ii_prefixes(&Group::free_abelian(2), 1).unwrap().len(), 9);
    }

    #[test]
    fn prefixes_are_consistent_and_avoid_identity() {
        for g in [
            Group::free_abelian(2),
            Group::from_key("ZxZ2").unwrap(),
            Group::from_key("Z^2xZ3").unwrap(),
            Group::heisenberg(),
        ] {
            for r in 0..3 {
                let small = ii_prefixes(&g, r).unwrap();
                let big = ii_prefixes(&g, r + 1).unwrap();
                let restricted: BTreeSet<Shape> = big
                    .iter()
                    .map(|s| s.iter().filter(|q| g.norm(q) <= r).cloned().collect())
                    .collect();
                for s in small.iter() {
                    assert!(!s.contains(&g.identity()));
                    assert!(restricted.contains(s), "{} r={r}", g.key());
                }
            }
        }
    }

    #[test]
    fn construction_order_examples() {
        let z = Group::free_abelian(1);
        let c = construction_order(&z, &OrderTarget::Interval(spec(&z, vec![PosFinite(2)])), 2).unwrap();
        assert_eq!(c.points(), vec![p(&[1]), p(&[2])]);
        assert_eq!(check_order(&z, &c, &Shape::new()).unwrap(), None);
        let w = construction_order(&z, &OrderTarget::WholeGroup, 2).unwrap();
        assert_eq!(w.points(), vec![p(&[0]), p(&[1]), p(&[2]), p(&[-1]), p(&[-2])]);

        let z2 = Group::free_abelian(2);
        let half = OrderTarget::Interval(spec(&z2, vec![Empty, PosInfinite]));
        let o = construction_order(&z2, &half, 2).unwrap();
        let pts = o.points();
        assert_eq!(&pts[..2], &[p(&[0, 1]), p(&[1, 1])]);
        assert_eq!(pts.last().unwrap(), &p(&[0, 2]));
        assert!(pts.iter().all(|q| q.0[1] >= 1));
        assert_eq!(check_order(&z2, &o, &Shape::new()).unwrap(), None);
    }

    #[test]
    fn extension_order_examples() {
        let z = Group::free_abelian(1);
        let o = extension_order(&z, &spec(&z, vec![PosFinite(3)]), 5).unwrap();
        assert_eq!(&o.points()[..5], &[p(&[0]), p(&[-1]), p(&[4]), p(&[-2]), p(&[5])]);
        let base = spec(&z, vec![PosFinite(3)]).truncate(&z, 5).unwrap();
        assert_eq!(check_order(&z, &o, &base).unwrap(), None);

        let o = extension_order(&z, &AxisIntervalSpec::empty(&z), 2).unwrap();
        assert_eq!(o.points(), vec![p(&[0]), p(&[1]), p(&[-1]), p(&[2]), p(&[-2])]);

        let z2 = Group::free_abelian(2);
        let o = extension_order(&z2, &AxisIntervalSpec::empty(&z2), 1).unwrap();
        assert_eq!(o.points(), vec![p(&[0, 0]), p(&[1, 0]), p(&[-1, 0]), p(&[0, 1]), p(&[0, -1])]);
        assert_eq!(check_order(&z2, &o, &Shape::new()).unwrap(), None);
    }

    #[test]
    fn raw_alternation_without_zero_fails() {
        // absorbing -1 before 0 leaves a gap next to [1,3]
        let z = Group::free_abelian(1);
        let base = spec(&z, vec![PosFinite(3)]).truncate(&z, 5).unwrap();
        let bad = TruncatedOrder {
            radius: 5,
            steps: [-1, 0, 4]
                .iter()
                .map(|&x| OrderStep { point: p(&[x]), stage: 0 })
                .collect(),
        };
        assert_eq!(check_order(&z, &bad, &base).unwrap(), Some(0));
    }

    #[test]
    fn orders_pass_check_on_catalog() {
        for g in [
            Group::free_abelian(1),
            Group::free_abelian(2),
            Group::from_key("ZxZ2").unwrap(),
            Group::from_key("Z^2xZ3").unwrap(),
            Group::heisenberg(),
        ] {
            let w = 3;
            let whole = construction_order(&g, &OrderTarget::WholeGroup, w).unwrap();
            assert_eq!(whole.steps.len(), g.ball(w).unwrap().len());
            assert_eq!(check_order(&g, &whole, &Shape::new()).unwrap(), None, "{}", g.key());
            for s in truncated_specs(&g, 2).unwrap().into_iter().step_by(5) {
                let c = construction_order(&g, &OrderTarget::Interval(s.clone()), w).unwrap();
                assert_eq!(check_order(&g, &c, &Shape::new()).unwrap(), None, "{} {:?}", g.key(), s);
                let e = extension_order(&g, &s, w).unwrap();
                assert_eq!(e.steps[0].point, g.identity());
                let base = s.truncate(&g, w).unwrap();
                assert_eq!(check_order(&g, &e, &base).unwrap(), None, "{} {:?}", g.key(), s);
            }
        }
    }

    #[test]
    fn tree_convexity() {
        let f2 = Group::free(2).unwrap();
        let w = |s: &str| crate::group::parse_word(s).unwrap();
        let punctured: Shape = ["a", "A", "b", "B"].iter().map(|s| w(s)).collect();
        // e sits between a and A with r = 1, so v·B_0 = {e} would be needed
        assert!(!tree_convex_check(&f2, &punctured).unwrap());
        let star: Shape = ["a", "ab", "aB", "aa"].iter().map(|s| w(s)).collect();
        assert!(tree_convex_check(&f2, &star).unwrap());
        assert!(extension_set_check(&f2, &star).unwrap());
        let pair: Shape = ["Ba", "Bab"].iter().map(|s| w(s)).collect();
        assert!(tree_convex_check(&f2, &pair).unwrap());
        assert!(tree_convex_check(&Group::free_abelian(1), &Shape::new()).is_err());
        let long: Shape = ["a", "aa", "aaa"].iter().map(|s| w(s)).collect();
        assert!(!tree_convex_check(&f2, &long.iter().filter(|x| x.0.len() != 2).cloned().collect()).unwrap());
    }

    #[test]
    fn tree_convex_prefix_truncations() {
        let f2 = Group::free(2).unwrap();
        let prefixes = tree_convex_extension_prefixes(&f2, 2).unwrap();
        for s in &prefixes {
            let cut: Shape = s.iter().filter(|q| q.0.len() <= 1).cloned().collect();
            assert!(tree_convex_check(&f2, &cut).unwrap());
        }
        assert_eq!(tree_convex_extension_prefixes(&f2, 1).unwrap().len(), 5);
    }

    #[test]
    fn cornered_counts() {
        let z = Group::free_abelian(1);
        let zero = cornered_prefixes(&z, 0).unwrap();
        assert_eq!(zero.len(), 2);
        assert!(zero.iter().any(|c| c.shape.is_empty() && c.corner == p(&[0, 2])));
        assert!(zero.iter().any(|c| c.shape == Shape::from([p(&[0, 2])]) && c.corner == p(&[0, 1])));
        let one = cornered_prefixes(&z, 1).unwrap();
        assert_eq!(one.len(), 6);
        assert!(one.iter().all(|c| !c.shape.contains(&c.corner)));
    }
}
