//! Checks for avoradii, equal extension counts, safe symbols, k-TEP and TSSM.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::group::{Group, Point};
use crate::oracles::{refute_global_validity, Budget, LanguageOracle};
use crate::patterns::{all_patterns, merge_patterns, Merge, Pattern, SftSpec, Symbol};
use crate::search::Csp;
use crate::shapes::Shape;

/// Two patterns on `C` that agree on `C ∩ B_r` but have different follower sets at `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvoWitness {
    pub radius: u32,
    pub x: Pattern,
    pub y: Pattern,
    pub follower_x: Vec<Symbol>,
    pub follower_y: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AvoFinding {
    /// Smallest avoradius up to `r_max`, computed from exact follower sets.
    Established { radius: u32, oracle: &'static str },
    /// No radius up to `r_max` works; one witness per radius is in the report.
    NoneUpTo { r_max: u32, oracle: &'static str },
    /// Computed from locally valid patterns with refutation only; not a proof.
    BudgetedEvidence { radius: Option<u32>, caveat: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvoReport {
    pub shape: Shape,
    pub finding: AvoFinding,
    pub failures: Vec<AvoWitness>,
}

fn follower_table(
    spec: &SftSpec,
    c: &Shape,
    exact: Option<&dyn LanguageOracle>,
    budget: &Budget,
) -> Result<(BTreeMap<Pattern, Vec<Symbol>>, Option<&'static str>)> {
    let e = spec.group.acting_group().identity();
    let mut with_e = c.clone();
    with_e.insert(e.clone());
    if let Some(o) = exact {
        if let Some(lang) = o.language(&with_e)? {
            let mut table: BTreeMap<Pattern, Vec<Symbol>> = BTreeMap::new();
            for p in lang {
                let a = p.get(&e).expect("pattern on C ∪ {e}");
                table.entry(p.restrict(c)).or_default().push(a);
            }
            return Ok((table, Some(o.name())));
        }
    }
    let csp = Csp::new(&spec.group, &spec.forbidden, spec.alphabet_size(), &with_e);
    let mut table: BTreeMap<Pattern, Vec<Symbol>> = BTreeMap::new();
    for p in csp.enumerate(&Pattern::new(), budget.limits())? {
        if refute_global_validity(spec, &p, budget).is_refuted() {
            continue;
        }
        let a = p.get(&e).unwrap();
        table.entry(p.restrict(c)).or_default().push(a);
    }
    Ok((table, None))
}

/// Smallest `r ≤ r_max` with `C ∩ B_r` determining for `C`.
pub fn avoradius_for_shape(
    spec: &SftSpec,
    c: &Shape,
    r_max: u32,
    exact: Option<&dyn LanguageOracle>,
    budget: &Budget,
) -> Result<AvoReport> {
    let group = &spec.group;
    if c.contains(&group.acting_group().identity()) {
        return Err(Error::Usage("the shape must not contain the identity".into()));
    }
    let (table, oracle) = follower_table(spec, c, exact, budget)?;
    let mut failures = Vec::new();
    let mut found = None;
    for r in 0..=r_max {
        let inner: Shape = c.iter().filter(|p| group.norm(p) <= r).cloned().collect();
        let mut groups: BTreeMap<Pattern, Vec<(&Pattern, &Vec<Symbol>)>> = BTreeMap::new();
        for (x, f) in &table {
            groups.entry(x.restrict(&inner)).or_default().push((x, f));
        }
        // Members are sorted, so a nonuniform group's least pattern already has a
        // partner with a different follower set.
        let mut witness: Option<AvoWitness> = None;
        for members in groups.values() {
            let (x, fx) = members[0];
            if let Some((y, fy)) = members.iter().find(|(_, fy)| *fy != fx) {
                if witness.as_ref().is_none_or(|w| *x < w.x) {
                    witness = Some(AvoWitness {
                        radius: r,
                        x: x.clone(),
                        y: (*y).clone(),
                        follower_x: fx.clone(),
                        follower_y: (*fy).clone(),
                    });
                }
            }
        }
        match witness {
            Some(w) => failures.push(w),
            None => {
                found = Some(r);
                break;
            }
        }
    }
    let finding = match (oracle, found) {
        (Some(o), Some(r)) => AvoFinding::Established { radius: r, oracle: o },
        (Some(o), None) => AvoFinding::NoneUpTo { r_max, oracle: o },
        (None, r) => AvoFinding::BudgetedEvidence {
            radius: r,
            caveat: "follower sets from refutation only".into(),
        },
    };
    Ok(AvoReport {
        shape: c.clone(),
        finding,
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EecVerdict {
    Constant(usize),
    Varies { x: Pattern, count_x: usize, y: Pattern, count_y: usize },
    Withheld,
}

/// Whether `|F(x|C, e)|` is the same for all globally valid `x`.
pub fn equal_extension_counts(
    spec: &SftSpec,
    shapes: &[Shape],
    exact: &dyn LanguageOracle,
) -> Result<Vec<EecVerdict>> {
    let e = spec.group.acting_group().identity();
    let mut out = Vec::new();
    for c in shapes {
        let mut with_e = c.clone();
        with_e.insert(e.clone());
        let Some(lang) = exact.language(&with_e)? else {
            out.push(EecVerdict::Withheld);
            continue;
        };
        let mut counts: BTreeMap<Pattern, usize> = BTreeMap::new();
        for p in lang {
            *counts.entry(p.restrict(c)).or_default() += 1;
        }
        let mut it = counts.iter();
        let verdict = match it.next() {
            None => EecVerdict::Constant(0),
            Some((x, &k)) => match it.find(|(_, &k2)| k2 != k) {
                None => EecVerdict::Constant(k),
                Some((y, &k2)) => EecVerdict::Varies {
                    x: x.clone(),
                    count_x: k,
                    y: y.clone(),
                    count_y: k2,
                },
            },
        };
        out.push(verdict);
    }
    Ok(out)
}

/// `a` is safe when no forbidden pattern can be produced by writing `a` over
/// cells of a locally valid pattern on its domain.
pub fn safe_symbol_check(spec: &SftSpec, a: Symbol) -> Result<bool> {
    if a as usize >= spec.alphabet_size() {
        return Err(Error::Usage(format!("symbol {a} outside the alphabet")));
    }
    for f in &spec.forbidden {
        let fixed = Pattern::from_cells(f.cells.iter().filter(|(_, &s)| s != a).map(|(p, s)| (p.clone(), *s)));
        let csp = Csp::new(&spec.group, &spec.forbidden, spec.alphabet_size(), &f.domain());
        if csp.solve(&fixed, Default::default())?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

type Q = Ratio<i128>;

/// Solves `A λ = b` exactly; `None` if inconsistent or not uniquely solvable.
fn solve_unique(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let rows = a.len();
    let cols = a[0].len();
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        let Some(piv) = (row..rows).find(|&r| a[r][col] != Q::from(0)) else {
            return None;
        };
        a.swap(row, piv);
        b.swap(row, piv);
        let inv = Q::from(1) / a[row][col];
        for k in 0..cols {
            a[row][k] *= inv;
        }
        b[row] *= inv;
        for r in 0..rows {
            if r != row && a[r][col] != Q::from(0) {
                let m = a[r][col];
                for k in 0..cols {
                    let v = a[row][k] * m;
                    a[r][k] -= v;
                }
                let v = b[row] * m;
                b[r] -= v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    if (row..rows).any(|r| b[r] != Q::from(0)) {
        return None;
    }
    Some(b[..cols].to_vec())
}

fn in_convex_hull(s: &[i64], others: &[&[i64]]) -> bool {
    let d = s.len();
    let m = others.len();
    for size in 1..=(d + 1).min(m) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let mut a = vec![vec![Q::from(0); size]; d + 1];
            let mut b = vec![Q::from(0); d + 1];
            for (col, &i) in idx.iter().enumerate() {
                for r in 0..d {
                    a[r][col] = Q::from(others[i][r] as i128);
                }
                a[d][col] = Q::from(1);
            }
            for r in 0..d {
                b[r] = Q::from(s[r] as i128);
            }
            b[d] = Q::from(1);
            if let Some(l) = solve_unique(a, b) {
                if l.iter().all(|x| *x >= Q::from(0)) {
                    return true;
                }
            }
            // next combination
            let mut k = size;
            while k > 0 && idx[k - 1] == m - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for j in k..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    false
}

/// Vertices of the convex hull of `S ⊂ Z^d`.
pub fn corners(group: &Group, s: &Shape) -> Result<Vec<Point>> {
    if !group.is_free_abelian() {
        return Err(Error::Unsupported(format!("convex corners in {}", group.key())));
    }
    let pts: Vec<&Point> = s.iter().collect();
    Ok(pts
        .iter()
        .enumerate()
        .filter(|(i, p)| {
            let others: Vec<&[i64]> = pts
                .iter()
                .enumerate()
                .filter(|(j, _)| j != i)
                .map(|(_, q)| q.0.as_slice())
                .collect();
            !in_convex_hull(&p.0, &others)
        })
        .map(|(_, p)| (*p).clone())
        .collect())
}

/// Every corner `s` of the common domain and every assignment on the rest
/// extends in exactly `k` ways inside `patterns`.
pub fn ktep_check(group: &Group, patterns: &BTreeSet<Pattern>, n_symbols: usize, k: usize) -> Result<bool> {
    let Some(first) = patterns.iter().next() else {
        return Ok(k == 0);
    };
    let s = first.domain();
    if patterns.iter().any(|p| p.domain() != s) {
        return Err(Error::Usage("k-TEP patterns must share one domain".into()));
    }
    for c in corners(group, &s)? {
        let rest: Shape = s.iter().filter(|p| **p != c).cloned().collect();
        let mut counts: HashMap<Pattern, usize> = HashMap::new();
        for p in patterns {
            *counts.entry(p.restrict(&rest)).or_default() += 1;
        }
        for q in all_patterns(&rest, n_symbols) {
            if counts.get(&q).copied().unwrap_or(0) != k {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TssmVerdict {
    HoldsOnWindow,
    Fails { u: Pattern, s: Pattern, v: Pattern },
    Unknown(String),
}

/// Gap a uniform avoradius `R` on all subsets guarantees.
pub fn tssm_gap_from_avoradius(r: u32) -> u32 {
    r + 1
}

/// Searches disjoint `U, S, V ⊆ B_W` with `d(U, V) ≥ n` for valid `u ⊔ s` and
/// `s ⊔ v` whose union is invalid. Triples are tried by total size, cells ordered
/// by norm and then reverse-lexicographically.
pub fn tssm_gap_check(
    spec: &SftSpec,
    n: u32,
    w: u32,
    exact: &dyn LanguageOracle,
    max_triples: usize,
) -> Result<TssmVerdict> {
    let group = &spec.group;
    let mut cells = group.ball(w)?.members;
    cells.sort_by(|a, b| group.norm(a).cmp(&group.norm(b)).then(b.cmp(a)));
    let m = cells.len();
    if m > 12 {
        return Ok(TssmVerdict::Unknown(format!("window with {m} cells is too large")));
    }
    // labels: 0 none, 1 U, 2 S, 3 V
    let mut triples: Vec<Vec<u8>> = Vec::new();
    let total = 4usize.pow(m as u32);
    if total > max_triples.saturating_mul(64) {
        return Ok(TssmVerdict::Unknown("too many triples".into()));
    }
    for code in 0..total {
        let mut labels = Vec::with_capacity(m);
        let mut c = code;
        for _ in 0..m {
            labels.push((c % 4) as u8);
            c /= 4;
        }
        if !labels.contains(&1) || !labels.contains(&3) {
            continue;
        }
        triples.push(labels);
    }
    triples.sort_by_key(|l| {
        let size = l.iter().filter(|&&x| x != 0).count();
        let pos: Vec<(usize, u8)> = l
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| (i, x))
            .collect();
        (size, pos)
    });
    let mut cache: HashMap<Shape, BTreeSet<Pattern>> = HashMap::new();
    let mut lang = |d: Shape| -> Result<Option<BTreeSet<Pattern>>> {
        if let Some(l) = cache.get(&d) {
            return Ok(Some(l.clone()));
        }
        let l = exact.language(&d)?;
        if let Some(l) = &l {
            cache.insert(d, l.clone());
        }
        Ok(l)
    };
    let mut checked = 0usize;
    for labels in triples {
        let pick = |t: u8| -> Shape {
            cells
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == t)
                .map(|(p, _)| p.clone())
                .collect()
        };
        let (u, s, v) = (pick(1), pick(2), pick(3));
        let gap = u
            .iter()
            .flat_map(|a| v.iter().map(move |b| (a, b)))
            .map(|(a, b)| group.distance(a, b))
            .min()
            .unwrap_or(u32::MAX);
        if gap < n {
            continue;
        }
        checked += 1;
        if checked > max_triples {
            return Ok(TssmVerdict::Unknown(format!("stopped after {max_triples} triples")));
        }
        let us: Shape = u.union(&s).cloned().collect();
        let sv: Shape = s.union(&v).cloned().collect();
        let all: Shape = us.union(&v).cloned().collect();
        let (Some(l_us), Some(l_sv), Some(l_all)) = (lang(us)?, lang(sv)?, lang(all)?) else {
            return Ok(TssmVerdict::Unknown("exact oracle declined a shape".into()));
        };
        for x in &l_us {
            for y in &l_sv {
                if x.restrict(&s) != y.restrict(&s) {
                    continue;
                }
                let Merge::Merged(z) = merge_patterns(x, y) else {
                    continue;
                };
                if !l_all.contains(&z) {
                    return Ok(TssmVerdict::Fails {
                        u: x.restrict(&u),
                        s: x.restrict(&s),
                        v: y.restrict(&v),
                    });
                }
            }
        }
    }
    Ok(TssmVerdict::HoldsOnWindow)
}
