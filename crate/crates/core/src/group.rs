//! Built-in group catalog: free abelian groups with optional torsion factors,
//! the discrete Heisenberg group and free groups, plus the two-level product
//! space `G × {1, 2}` used by factor relations.
//!
//! Points are stored as integer vectors. For polycyclic groups the vector is a
//! coordinate tuple; for free groups it is a freely reduced word whose letters
//! are `±1, ±2, …` (generator `i` or its inverse). Level-tagged points carry the
//! level as a trailing coordinate.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};

const MAX_BALL_MEMBERS: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Vec<i64>);

impl Point {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        Point(coords.into())
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for Point {
    fn from(v: Vec<i64>) -> Self {
        Point(v)
    }
}

/// A catalog group. Generating sets are fixed per kind: the standard basis and
/// its negatives for abelian kinds, `{a±1, b±1}` for the Heisenberg group and
/// the free generators with inverses for `F_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    /// `Z^free × Z_{k_1} × ⋯ × Z_{k_m}`.
    Abelian { free: usize, torsion: Vec<i64> },
    /// Points are `(a, b, c)` with `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+a·b')`.
    Heisenberg,
    Free { rank: usize },
    /// `base × {1, …, levels}`; the base group acts on the first factor only.
    Levelled { base: Box<Group>, levels: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub radius: u32,
    /// Sorted lexicographically on canonical coordinates.
    pub members: Vec<Point>,
}

impl Ball {
    pub fn contains(&self, p: &Point) -> bool {
        self.members.binary_search(p).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl Group {
    pub fn free_abelian(d: usize) -> Self {
        assert!(d >= 1, "free abelian rank must be at least 1");
        Group::Abelian {
            free: d,
            torsion: Vec::new(),
        }
    }

    pub fn abelian(free: usize, torsion: Vec<i64>) -> Result<Self> {
        if torsion.iter().any(|&k| k < 2) {
            return Err(Error::Usage("torsion orders must be at least 2".into()));
        }
        if free == 0 && torsion.is_empty() {
            return Err(Error::Usage("trivial group is not in the catalog".into()));
        }
        Ok(Group::Abelian { free, torsion })
    }

    pub fn heisenberg() -> Self {
        Group::Heisenberg
    }

    pub fn free(rank: usize) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(Error::Usage("free group rank must be in 1..=26".into()));
        }
        Ok(Group::Free { rank })
    }

    pub fn levelled(base: Group, levels: i64) -> Self {
        Group::Levelled {
            base: Box::new(base),
            levels,
        }
    }

    /// Parses catalog keys such as `Z`, `Z^2`, `Z^2xZ3`, `ZxZ2`, `heisenberg`, `F2`.
    pub fn from_key(key: &str) -> Result<Self> {
        let key = key.trim();
        if let Some((base, levels)) = key.strip_suffix(']').and_then(|k| k.rsplit_once("x[1..")) {
            let levels: i64 = levels
                .parse()
                .map_err(|_| Error::Usage(format!("unknown group key '{key}'")))?;
            if levels < 1 {
                return Err(Error::Usage(format!("unknown group key '{key}'")));
            }
            return Ok(Group::levelled(Group::from_key(base)?, levels));
        }
        if key.eq_ignore_ascii_case("heisenberg") {
            return Ok(Group::Heisenberg);
        }
        if let Some(rest) = key.strip_prefix('F') {
            let rank: usize = rest
                .parse()
                .map_err(|_| Error::Usage(format!("unknown group key '{key}'")))?;
            return Group::free(rank);
        }
        let mut free = 0usize;
        let mut torsion = Vec::new();
        for factor in key.split('x') {
            let f = factor.trim();
            if f == "Z" {
                free += 1;
            } else if let Some(exp) = f.strip_prefix("Z^") {
                let d: usize = exp
                    .parse()
                    .map_err(|_| Error::Usage(format!("unknown group key '{key}'")))?;
                if d == 0 {
                    return Err(Error::Usage(format!("unknown group key '{key}'")));
                }
                free += d;
            } else if let Some(k) = f.strip_prefix('Z') {
                let k: i64 = k
                    .parse()
                    .map_err(|_| Error::Usage(format!("unknown group key '{key}'")))?;
                torsion.push(k);
            } else {
                return Err(Error::Usage(format!("unknown group key '{key}'")));
            }
        }
        Group::abelian(free, torsion)
    }

    pub fn key(&self) -> String {
        match self {
            Group::Abelian { free, torsion } => {
                let mut parts = Vec::new();
                match *free {
                    0 => {}
                    1 => parts.push("Z".to_string()),
                    d => parts.push(format!("Z^{d}")),
                }
                parts.extend(torsion.iter().map(|k| format!("Z{k}")));
                parts.join("x")
            }
            Group::Heisenberg => "heisenberg".into(),
            Group::Free { rank } => format!("F{rank}"),
            Group::Levelled { base, levels } => format!("{}x[1..{}]", base.key(), levels),
        }
    }

    pub fn generator_names(&self) -> Vec<String> {
        match self {
            Group::Abelian { free, torsion } => (0..free + torsion.len())
                .map(|i| format!("e{}", i + 1))
                .collect(),
            Group::Heisenberg => vec!["a".into(), "b".into()],
            Group::Free { rank } => (0..*rank)
                .map(|i| ((b'a' + i as u8) as char).to_string())
                .collect(),
            Group::Levelled { base, .. } => base.generator_names(),
        }
    }

    pub fn is_polycyclic(&self) -> bool {
        matches!(self, Group::Abelian { .. } | Group::Heisenberg)
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Group::Free { .. })
    }

    /// `Z^d` (no torsion); the only kind where convex-hull corners make sense.
    pub fn is_free_abelian(&self) -> bool {
        matches!(self, Group::Abelian { torsion, .. } if torsion.is_empty())
    }

    /// Number of polycycle axes (`n` in the polycycle structure).
    pub fn axes(&self) -> usize {
        match self {
            Group::Abelian { free, torsion } => free + torsion.len(),
            Group::Heisenberg => 3,
            _ => 0,
        }
    }

    /// Order of the cyclic quotient on axis `i` (0-based); `None` means infinite.
    pub fn axis_order(&self, i: usize) -> Option<i64> {
        match self {
            Group::Abelian { free, torsion } if i >= *free => Some(torsion[i - free]),
            _ => None,
        }
    }

    pub fn acting_group(&self) -> &Group {
        match self {
            Group::Levelled { base, .. } => base,
            g => g,
        }
    }

    pub fn identity(&self) -> Point {
        match self {
            Group::Abelian { free, torsion } => Point(vec![0; free + torsion.len()]),
            Group::Heisenberg => Point(vec![0, 0, 0]),
            Group::Free { .. } => Point(Vec::new()),
            Group::Levelled { base, .. } => {
                let mut v = base.identity().0;
                v.push(1);
                Point(v)
            }
        }
    }

    /// The identity of the base group tagged with `level` (levelled spaces only).
    pub fn origin_at_level(&self, level: i64) -> Point {
        match self {
            Group::Levelled { base, .. } => {
                let mut v = base.identity().0;
                v.push(level);
                Point(v)
            }
            g => g.identity(),
        }
    }

    pub fn level(&self, p: &Point) -> Option<i64> {
        match self {
            Group::Levelled { .. } => p.0.last().copied(),
            _ => None,
        }
    }

    pub fn base_part(&self, p: &Point) -> Point {
        match self {
            Group::Levelled { .. } => Point(p.0[..p.0.len() - 1].to_vec()),
            _ => p.clone(),
        }
    }

    pub fn with_level(&self, base_point: &Point, level: i64) -> Point {
        let mut v = base_point.0.clone();
        v.push(level);
        Point(v)
    }

    /// Checks that `p` is a canonical point of this group.
    pub fn validate(&self, p: &Point) -> Result<()> {
        let bad = |why: &str| Err(Error::Usage(format!("point {:?} not in {}: {why}", p.0, self.key())));
        match self {
            Group::Abelian { free, torsion } => {
                if p.0.len() != free + torsion.len() {
                    return bad("arity mismatch");
                }
                for (i, k) in torsion.iter().enumerate() {
                    let t = p.0[free + i];
                    if t < 0 || t >= *k {
                        return bad("torsion coordinate not reduced");
                    }
                }
                Ok(())
            }
            Group::Heisenberg => {
                if p.0.len() != 3 {
                    return bad("arity mismatch");
                }
                Ok(())
            }
            Group::Free { rank } => {
                for w in p.0.windows(2) {
                    if w[0] == -w[1] {
                        return bad("word not freely reduced");
                    }
                }
                if p.0.iter().any(|&l| l == 0 || l.unsigned_abs() as usize > *rank) {
                    return bad("letter out of range");
                }
                Ok(())
            }
            Group::Levelled { base, levels } => {
                let Some(&lv) = p.0.last() else {
                    return bad("missing level");
                };
                if lv < 1 || lv > *levels {
                    return bad("level out of range");
                }
                base.validate(&Point(p.0[..p.0.len() - 1].to_vec()))
            }
        }
    }

    /// Unchecked group law; operands must be canonical points of this group.
    pub fn op(&self, g: &Point, h: &Point) -> Point {
        match self {
            Group::Abelian { free, torsion } => {
                let mut v: Vec<i64> = g.0.iter().zip(&h.0).map(|(a, b)| a + b).collect();
                for (i, k) in torsion.iter().enumerate() {
                    v[free + i] = v[free + i].rem_euclid(*k);
                }
                Point(v)
            }
            Group::Heisenberg => {
                let (a, b, c) = (g.0[0], g.0[1], g.0[2]);
                let (a2, b2, c2) = (h.0[0], h.0[1], h.0[2]);
                Point(vec![a + a2, b + b2, c + c2 + a * b2])
            }
            Group::Free { .. } => {
                let mut out = g.0.clone();
                for &l in &h.0 {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Point(out)
            }
            Group::Levelled { base, .. } => {
                // left action of the base part of `g` on `h`
                let gb = Point(g.0[..g.0.len() - 1].to_vec());
                let hb = Point(h.0[..h.0.len() - 1].to_vec());
                self.with_level(&base.op(&gb, &hb), *h.0.last().unwrap())
            }
        }
    }

    pub fn compose(&self, g: &Point, h: &Point) -> Result<Point> {
        if let Group::Levelled { .. } = self {
            return Err(Error::Unsupported("level-tagged points do not form a group".into()));
        }
        self.validate(g)?;
        self.validate(h)?;
        Ok(self.op(g, h))
    }

    pub fn inverse(&self, g: &Point) -> Point {
        match self {
            Group::Abelian { free, torsion } => {
                let mut v: Vec<i64> = g.0.iter().map(|a| -a).collect();
                for (i, k) in torsion.iter().enumerate() {
                    v[free + i] = v[free + i].rem_euclid(*k);
                }
                Point(v)
            }
            Group::Heisenberg => {
                let (a, b, c) = (g.0[0], g.0[1], g.0[2]);
                Point(vec![-a, -b, -c + a * b])
            }
            Group::Free { .. } => Point(g.0.iter().rev().map(|l| -l).collect()),
            Group::Levelled { base, .. } => {
                let gb = self.base_part(g);
                self.with_level(&base.inverse(&gb), *g.0.last().unwrap())
            }
        }
    }

    /// Left action of an element of the acting group on a point of this space.
    pub fn act(&self, g: &Point, p: &Point) -> Point {
        match self {
            Group::Levelled { base, .. } => {
                let pb = self.base_part(p);
                self.with_level(&base.op(g, &pb), *p.0.last().unwrap())
            }
            _ => self.op(g, p),
        }
    }

    /// The acting element `g` with `g · source = target`, if one exists.
    pub fn translator(&self, target: &Point, source: &Point) -> Option<Point> {
        match self {
            Group::Levelled { base, .. } => {
                if target.0.last() != source.0.last() {
                    return None;
                }
                let tb = self.base_part(target);
                let sb = self.base_part(source);
                Some(base.op(&tb, &base.inverse(&sb)))
            }
            _ => Some(self.op(target, &self.inverse(source))),
        }
    }

    /// Symmetric generating set.
    pub fn generators(&self) -> Vec<Point> {
        match self {
            Group::Abelian { free, torsion } => {
                let n = free + torsion.len();
                let mut out = Vec::new();
                for i in 0..n {
                    for s in [1i64, -1] {
                        let mut v = vec![0; n];
                        v[i] = s;
                        let p = self.op(&Point(vec![0; n]), &Point(v));
                        if !out.contains(&p) {
                            out.push(p);
                        }
                    }
                }
                out
            }
            Group::Heisenberg => vec![
                Point(vec![1, 0, 0]),
                Point(vec![-1, 0, 0]),
                Point(vec![0, 1, 0]),
                Point(vec![0, -1, 0]),
            ],
            Group::Free { rank } => (1..=*rank as i64)
                .flat_map(|i| [Point(vec![i]), Point(vec![-i])])
                .collect(),
            Group::Levelled { base, .. } => base.generators(),
        }
    }

    /// Word norm with respect to the fixed generating set (base norm for levelled points).
    pub fn norm(&self, g: &Point) -> u32 {
        match self {
            Group::Abelian { free, torsion } => {
                let mut n: i64 = g.0[..*free].iter().map(|a| a.abs()).sum();
                for (i, k) in torsion.iter().enumerate() {
                    let t = g.0[free + i];
                    n += t.min(k - t);
                }
                n as u32
            }
            Group::Heisenberg => heisenberg_norm(g),
            Group::Free { .. } => g.0.len() as u32,
            Group::Levelled { base, .. } => base.norm(&self.base_part(g)),
        }
    }

    pub fn distance(&self, g: &Point, h: &Point) -> u32 {
        match self {
            Group::Levelled { base, .. } => {
                let gb = self.base_part(g);
                let hb = self.base_part(h);
                base.norm(&base.op(&base.inverse(&gb), &hb))
            }
            _ => self.norm(&self.op(&self.inverse(g), h)),
        }
    }

    /// Exact metric ball by breadth-first search over generator edges.
    pub fn ball(&self, r: u32) -> Result<Ball> {
        if let Group::Levelled { base, levels } = self {
            let b = base.ball(r)?;
            let mut members: Vec<Point> = b
                .members
                .iter()
                .flat_map(|p| (1..=*levels).map(move |l| (p, l)))
                .map(|(p, l)| self.with_level(p, l))
                .collect();
            members.sort();
            return Ok(Ball { radius: r, members });
        }
        let gens = self.generators();
        let mut seen: HashSet<Point> = HashSet::new();
        let e = self.identity();
        seen.insert(e.clone());
        let mut queue = VecDeque::from([(e, 0u32)]);
        while let Some((p, d)) = queue.pop_front() {
            if d == r {
                continue;
            }
            for s in &gens {
                let q = self.op(&p, s);
                if seen.insert(q.clone()) {
                    if seen.len() > MAX_BALL_MEMBERS {
                        return Err(Error::Resource(format!(
                            "ball of radius {r} in {} exceeds {MAX_BALL_MEMBERS} members",
                            self.key()
                        )));
                    }
                    queue.push_back((q, d + 1));
                }
            }
        }
        let mut members: Vec<Point> = seen.into_iter().collect();
        members.sort();
        Ok(Ball { radius: r, members })
    }

    /// Polycycle tuple `(t_1, …, t_n)` with `g = h_1^{t_1} ⋯ h_n^{t_n}`.
    ///
    /// For the Heisenberg group the series is `⟨c⟩ < ⟨c, b⟩ < G`, so the tuple
    /// of `(a, b, c)` is `(c, b, a)`.
    pub fn to_tuple(&self, g: &Point) -> Result<Vec<i64>> {
        match self {
            Group::Abelian { .. } => Ok(g.0.clone()),
            Group::Heisenberg => Ok(vec![g.0[2], g.0[1], g.0[0]]),
            _ => Err(Error::Unsupported(format!(
                "{} has no polycycle structure in the catalog",
                self.key()
            ))),
        }
    }

    pub fn from_tuple(&self, t: &[i64]) -> Result<Point> {
        if t.len() != self.axes() || !self.is_polycyclic() {
            return Err(Error::Unsupported(format!(
                "tuple of length {} for {}",
                t.len(),
                self.key()
            )));
        }
        for (i, &ti) in t.iter().enumerate() {
            if let Some(k) = self.axis_order(i) {
                if ti < 0 || ti >= k {
                    return Err(Error::Usage(format!("tuple coordinate {ti} not in [0, {k})")));
                }
            }
        }
        Ok(match self {
            Group::Heisenberg => Point(vec![t[2], t[1], t[0]]),
            _ => Point(t.to_vec()),
        })
    }

    /// `h_i^j` for 0-based axis `i`; torsion exponents are reduced.
    pub fn axis_power(&self, i: usize, j: i64) -> Point {
        let mut t = vec![0; self.axes()];
        t[i] = match self.axis_order(i) {
            Some(k) => j.rem_euclid(k),
            None => j,
        };
        self.from_tuple(&t).expect("axis power is admissible")
    }

    /// The subgroup `H_i` generated by the first `i` polycycle generators, as a
    /// catalog group, together with the coordinate map for its points.
    pub fn subgroup(&self, i: usize) -> Result<Group> {
        if !self.is_polycyclic() || i == 0 || i > self.axes() {
            return Err(Error::Unsupported(format!("subgroup H_{i} of {}", self.key())));
        }
        match self {
            Group::Abelian { free, torsion } => {
                let f = (*free).min(i);
                let t = torsion[..i - f].to_vec();
                Group::abelian(f, t)
            }
            Group::Heisenberg if i == 3 => Ok(Group::Heisenberg),
            Group::Heisenberg => Ok(Group::free_abelian(i)),
            _ => unreachable!(),
        }
    }

    /// Formats a point: tuples as `(x,y)`, free words as letters (inverse upper-case),
    /// level-tagged points as `(x,y)@level`.
    pub fn format_point(&self, p: &Point) -> String {
        match self {
            Group::Free { .. } => format_word(&p.0),
            Group::Levelled { base, .. } => {
                format!("{}@{}", base.format_point(&self.base_part(p)), p.0.last().unwrap())
            }
            _ => {
                let inner: Vec<String> = p.0.iter().map(|c| c.to_string()).collect();
                format!("({})", inner.join(","))
            }
        }
    }
}

pub fn format_word(w: &[i64]) -> String {
    if w.is_empty() {
        return "e".into();
    }
    w.iter()
        .map(|&l| {
            let c = (b'a' + (l.unsigned_abs() as u8 - 1)) as char;
            if l > 0 {
                c
            } else {
                c.to_ascii_uppercase()
            }
        })
        .collect()
}

/// Parses a word such as `aB` (upper case = inverse) or `e` and freely reduces it.
pub fn parse_word(s: &str) -> Result<Point> {
    let s = s.trim();
    let mut out: Vec<i64> = Vec::new();
    if s == "e" || s.is_empty() {
        return Ok(Point(out));
    }
    for ch in s.chars() {
        let l = if ch.is_ascii_lowercase() {
            (ch as u8 - b'a') as i64 + 1
        } else if ch.is_ascii_uppercase() {
            -((ch as u8 - b'A') as i64 + 1)
        } else {
            return Err(Error::Usage(format!("bad letter '{ch}' in word '{s}'")));
        };
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Ok(Point(out))
}

/// 1-based index of the last nonzero tuple coordinate, `None` for the zero tuple.
pub fn last_nonzero_axis(t: &[i64]) -> Option<usize> {
    t.iter().rposition(|&x| x != 0).map(|i| i + 1)
}

struct HeisenbergMetric {
    radius: u32,
    dist: HashMap<Point, u32>,
    frontier: Vec<Point>,
}

fn heisenberg_metric() -> &'static RwLock<HeisenbergMetric> {
    static METRIC: OnceLock<RwLock<HeisenbergMetric>> = OnceLock::new();
    METRIC.get_or_init(|| {
        let e = Point(vec![0, 0, 0]);
        let mut dist = HashMap::new();
        dist.insert(e.clone(), 0);
        RwLock::new(HeisenbergMetric {
            radius: 0,
            dist,
            frontier: vec![e],
        })
    })
}

fn heisenberg_norm(g: &Point) -> u32 {
    if let Some(&d) = heisenberg_metric().read().unwrap().dist.get(g) {
        return d;
    }
    let mut m = heisenberg_metric().write().unwrap();
    let gens = Group::Heisenberg.generators();
    loop {
        if let Some(&d) = m.dist.get(g) {
            return d;
        }
        let next_r = m.radius + 1;
        let mut next = Vec::new();
        let frontier = std::mem::take(&mut m.frontier);
        for p in &frontier {
            for s in &gens {
                let q = Group::Heisenberg.op(p, s);
                if !m.dist.contains_key(&q) {
                    m.dist.insert(q.clone(), next_r);
                    next.push(q);
                }
            }
        }
        m.frontier = next;
        m.radius = next_r;
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Point {
        Point(v.to_vec())
    }

    #[test]
    fn compose_examples() {
        let z2 = Group::free_abelian(2);
        assert_eq!(z2.compose(&p(&[1, 2]), &p(&[3, -1])).unwrap(), p(&[4, 1]));
        let h = Group::heisenberg();
        assert_eq!(h.compose(&p(&[1, 0, 0]), &p(&[0, 1, 0])).unwrap(), p(&[1, 1, 1]));
        let f2 = Group::free(2).unwrap();
        let g = parse_word("aB").unwrap();
        let k = parse_word("ba").unwrap();
        assert_eq!(format_word(&f2.compose(&g, &k).unwrap().0), "aa");
    }

    #[test]
    fn mixed_operands_rejected() {
        let z2 = Group::free_abelian(2);
        assert!(matches!(z2.compose(&p(&[1]), &p(&[1, 2])), Err(Error::Usage(_))));
        let t = Group::from_key("ZxZ2").unwrap();
        assert!(t.compose(&p(&[0, 3]), &p(&[0, 1])).is_err());
    }

    #[test]
    fn invert_examples() {
        let z2 = Group::free_abelian(2);
        assert_eq!(z2.inverse(&p(&[1, 2])), p(&[-1, -2]));
        // g·g⁻¹ = e solved under the law: (1,1,1)(x,y,z) = (1+x, 1+y, 1+z+y) = 0
        let h = Group::heisenberg();
        assert_eq!(h.inverse(&p(&[1, 1, 1])), p(&[-1, -1, 0]));
        let f2 = Group::free(2).unwrap();
        assert_eq!(format_word(&f2.inverse(&parse_word("ab").unwrap()).0), "BA");
    }

    #[test]
    fn ball_examples() {
        let z = Group::free_abelian(1);
        let b = z.ball(2).unwrap();
        assert_eq!(b.members, vec![p(&[-2]), p(&[-1]), p(&[0]), p(&[1]), p(&[2])]);
        assert_eq!(Group::free(2).unwrap().ball(1).unwrap().len(), 5);
    }

    #[test]
    fn heisenberg_ball_matches_independent_bfs() {
        // Independent oracle: BFS with the law written out inline.
        let mut seen = std::collections::BTreeSet::new();
        let mut layer = vec![(0i64, 0i64, 0i64)];
        seen.insert((0, 0, 0));
        for _ in 0..2 {
            let mut next = Vec::new();
            for &(a, b, c) in &layer {
                for (da, db) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let q = (a + da, b + db, c + a * db);
                    if seen.insert(q) {
                        next.push(q);
                    }
                }
            }
            layer = next;
        }
        let ball = Group::heisenberg().ball(2).unwrap();
        assert_eq!(ball.len(), seen.len());
        assert_eq!(ball.len(), 17);
        for m in &ball.members {
            assert!(seen.contains(&(m.0[0], m.0[1], m.0[2])));
            assert!(Group::heisenberg().norm(m) <= 2);
        }
    }

    #[test]
    fn tuples() {
        let z3 = Group::free_abelian(3);
        let t = z3.to_tuple(&p(&[0, -3, 2])).unwrap();
        assert_eq!(t, vec![0, -3, 2]);
        assert_eq!(last_nonzero_axis(&t), Some(3));
        let zz2 = Group::from_key("ZxZ2").unwrap();
        assert_eq!(zz2.to_tuple(&zz2.from_tuple(&[5, 1]).unwrap()).unwrap(), vec![5, 1]);
        let h = Group::heisenberg();
        let chain = h.op(&h.op(&h.axis_power(0, 1), &h.axis_power(1, 1)), &h.axis_power(2, 0));
        assert_eq!(h.from_tuple(&[1, 1, 0]).unwrap(), chain);
        assert_eq!(h.to_tuple(&chain).unwrap(), vec![1, 1, 0]);
        assert!(matches!(
            Group::free(2).unwrap().to_tuple(&p(&[1])),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn keys_round_trip() {
        for k in ["Z", "Z^2", "Z^2xZ3", "ZxZ2", "heisenberg", "F2"] {
            assert_eq!(Group::from_key(k).unwrap().key(), k);
        }
        assert!(Group::from_key("Q^2").is_err());
    }

    fn catalog() -> Vec<Group> {
        vec![
            Group::free_abelian(1),
            Group::free_abelian(2),
            Group::from_key("ZxZ2").unwrap(),
            Group::from_key("Z^2xZ3").unwrap(),
            Group::heisenberg(),
            Group::free(2).unwrap(),
        ]
    }

    #[test]
    fn group_laws_on_ball_three() {
        for g in catalog() {
            let b = g.ball(3).unwrap();
            let e = g.identity();
            let sample: Vec<&Point> = b.members.iter().step_by(7).collect();
            for x in &b.members {
                assert_eq!(&g.op(x, &e), x);
                assert_eq!(&g.op(&e, x), x);
                assert_eq!(g.op(x, &g.inverse(x)), e);
                assert_eq!(g.norm(x), g.norm(&g.inverse(x)), "{} {:?}", g.key(), x);
            }
            for x in &sample {
                for y in &sample {
                    for z in sample.iter().take(6) {
                        assert_eq!(g.op(&g.op(x, y), z), g.op(x, &g.op(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn balls_grow() {
        for g in catalog() {
            let mut prev = 0;
            for r in 0..3 {
                let b = g.ball(r).unwrap();
                let next = g.ball(r + 1).unwrap();
                assert!(b.len() >= prev);
                prev = b.len();
                for m in &b.members {
                    for s in g.generators() {
                        assert!(next.contains(&g.op(m, &s)));
                    }
                }
            }
        }
    }
}
