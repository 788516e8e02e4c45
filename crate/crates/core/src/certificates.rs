//! Certificate search: a forbidden set `Q` equivalent to the input together with
//! a radius `R` at which every locally `Q`-valid pattern on every family prefix
//! extends to the corner cell.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::group::{Group, Point};
use crate::oracles::{decide_validity, refute_global_validity, Budget, ValidityVerdict};
use crate::patterns::{pattern_diameter, violation_at, Pattern, SftSpec, Symbol};
use crate::search::{Csp, SearchLimits};
use crate::shapes::{
    all_subset_prefixes, cornered_prefixes, ii_prefixes, tree_convex_extension_prefixes, Shape,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    InductiveIntervals,
    AllSubsets,
    TreeConvexExtensions,
    Cornered2Level,
}

impl Family {
    pub fn key(&self) -> &'static str {
        match self {
            Family::InductiveIntervals => "ii",
            Family::AllSubsets => "all-subsets",
            Family::TreeConvexExtensions => "tree-convex",
            Family::Cornered2Level => "cornered",
        }
    }

    pub fn from_key(s: &str) -> Result<Self> {
        match s {
            "ii" => Ok(Family::InductiveIntervals),
            "all-subsets" => Ok(Family::AllSubsets),
            "tree-convex" => Ok(Family::TreeConvexExtensions),
            "cornered" => Ok(Family::Cornered2Level),
            _ => Err(Error::Usage(format!(
                "unknown family '{s}' (ii, all-subsets, tree-convex, cornered)"
            ))),
        }
    }

    /// The natural family for a group: inductive intervals on polycyclic groups,
    /// tree convex extension sets on free groups, cornered shapes on two levels.
    pub fn default_for(group: &Group) -> Self {
        match group {
            Group::Free { .. } => Family::TreeConvexExtensions,
            Group::Levelled { .. } => Family::Cornered2Level,
            _ => Family::InductiveIntervals,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// A family member truncated to `B_R`, with the cell to be extended.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FamilyPrefix {
    pub shape: Shape,
    pub corner: Point,
}

pub fn family_prefixes(group: &Group, family: Family, r: u32) -> Result<Vec<FamilyPrefix>> {
    let plain = |shapes: Vec<Shape>| -> Vec<FamilyPrefix> {
        shapes
            .into_iter()
            .map(|shape| FamilyPrefix {
                shape,
                corner: group.identity(),
            })
            .collect()
    };
    let mismatch = || Error::Unsupported(format!("family {} on {}", family.key(), group.key()));
    match family {
        Family::InductiveIntervals if group.is_polycyclic() => Ok(plain(ii_prefixes(group, r)?.to_vec())),
        Family::AllSubsets if !matches!(group, Group::Levelled { .. }) => {
            Ok(plain(all_subset_prefixes(group, r)?))
        }
        Family::TreeConvexExtensions if group.is_free() => {
            Ok(plain(tree_convex_extension_prefixes(group, r)?))
        }
        Family::Cornered2Level => match group {
            Group::Levelled { base, levels: 2 } if base.is_polycyclic() => Ok(cornered_prefixes(base, r)?
                .into_iter()
                .map(|c| FamilyPrefix {
                    shape: c.shape,
                    corner: c.corner,
                })
                .collect()),
            _ => Err(mismatch()),
        },
        _ => Err(mismatch()),
    }
}

/// One verified prefix: its cells and how many locally valid patterns it carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub shape: Shape,
    pub corner: Point,
    pub patterns: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniformVerdict {
    Verified(Vec<TranscriptEntry>),
    FailsAt { prefix: FamilyPrefix, pattern: Pattern },
    Unknown { reason: String, partial: Vec<TranscriptEntry> },
}

fn extends_at(q: &SftSpec, x: &Pattern, corner: &Point) -> Option<Symbol> {
    (0..q.alphabet_size() as Symbol).find(|&a| {
        let y = x.with(corner.clone(), a);
        !violation_at(&q.group, &y, &q.forbidden, corner)
    })
}

fn check_prefix(q: &SftSpec, prefix: &FamilyPrefix, limits: SearchLimits) -> Result<std::result::Result<usize, Pattern>> {
    let csp = Csp::new(&q.group, &q.forbidden, q.alphabet_size(), &prefix.shape);
    let patterns = csp.enumerate(&Pattern::new(), limits)?;
    for x in &patterns {
        if extends_at(q, x, &prefix.corner).is_none() {
            return Ok(Err(x.clone()));
        }
    }
    Ok(Ok(patterns.len()))
}

/// Local extension check over every family prefix inside `B_R`.
pub fn verify_uniform(q: &SftSpec, family: Family, r: u32, budget: &Budget) -> Result<UniformVerdict> {
    if r < q.diameter() {
        return Err(Error::Usage(format!(
            "verification radius {r} is below the forbidden diameter {}",
            q.diameter()
        )));
    }
    let prefixes = match family_prefixes(&q.group, family, r) {
        Ok(p) => p,
        Err(Error::Resource(m)) => {
            return Ok(UniformVerdict::Unknown {
                reason: m,
                partial: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    let mut transcript = Vec::with_capacity(prefixes.len());
    for prefix in prefixes {
        match check_prefix(q, &prefix, budget.limits()) {
            Ok(Ok(n)) => transcript.push(TranscriptEntry {
                shape: prefix.shape,
                corner: prefix.corner,
                patterns: n,
            }),
            Ok(Err(x)) => return Ok(UniformVerdict::FailsAt { prefix, pattern: x }),
            Err(Error::Budget(m)) => {
                return Ok(UniformVerdict::Unknown {
                    reason: m,
                    partial: transcript,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(UniformVerdict::Verified(transcript))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// Largest refutation radius needed in each direction.
    Equivalent { p_in_q: u32, q_in_p: u32 },
    /// `witness` is globally valid for one side and forbidden by the other.
    NotEquivalent { witness: Pattern, valid_for_p: bool },
    Unknown(String),
}

/// Semidecides `X(P) = X(Q)` by refuting every forbidden pattern of each side in the other.
pub fn verify_equivalence(p: &SftSpec, q: &SftSpec, budget: &Budget) -> Result<Equivalence> {
    if p.group != q.group || p.alphabet != q.alphabet {
        return Err(Error::Usage("specs differ in group or alphabet".into()));
    }
    let side = |from: &SftSpec, to: &SftSpec| -> (u32, Vec<Pattern>) {
        let mut worst = 0;
        let mut open = Vec::new();
        for f in &to.forbidden {
            if from.forbidden.contains(f) {
                continue;
            }
            match refute_global_validity(from, f, budget) {
                ValidityVerdict::Refuted(r) => worst = worst.max(r),
                _ => open.push(f.clone()),
            }
        }
        (worst, open)
    };
    let (p_in_q, open_q) = side(p, q);
    let (q_in_p, open_p) = side(q, p);
    if open_q.is_empty() && open_p.is_empty() {
        return Ok(Equivalence::Equivalent { p_in_q, q_in_p });
    }
    for f in &open_q {
        if decide_validity(p, f, budget)?.is_valid() {
            return Ok(Equivalence::NotEquivalent {
                witness: f.clone(),
                valid_for_p: true,
            });
        }
    }
    for f in &open_p {
        if decide_validity(q, f, budget)?.is_valid() {
            return Ok(Equivalence::NotEquivalent {
                witness: f.clone(),
                valid_for_p: false,
            });
        }
    }
    Ok(Equivalence::Unknown(format!(
        "{} forbidden patterns neither refuted nor shown valid",
        open_q.len() + open_p.len()
    )))
}

/// A verified uniform definition of the subshift on a shape family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub source: SftSpec,
    pub q: SftSpec,
    pub family: Family,
    pub radius: u32,
    pub transcript: Vec<TranscriptEntry>,
    pub p_in_q: u32,
    pub q_in_p: u32,
}

impl Certificate {
    /// Re-runs the extension check and the equivalence check from scratch.
    pub fn recheck(&self, budget: &Budget) -> Result<()> {
        match verify_uniform(&self.q, self.family, self.radius, budget)? {
            UniformVerdict::Verified(t) if t == self.transcript => {}
            UniformVerdict::Verified(_) => {
                return Err(Error::CertificateViolation("transcript does not match a fresh run".into()))
            }
            UniformVerdict::FailsAt { prefix, pattern } => {
                return Err(Error::CertificateViolation(format!(
                    "pattern {} on a prefix of {} cells has no extension",
                    pattern.describe(&self.q.group, &self.q.alphabet),
                    prefix.shape.len()
                )))
            }
            UniformVerdict::Unknown { reason, .. } => {
                return Err(Error::CertificateViolation(format!("could not re-verify: {reason}")))
            }
        }
        match verify_equivalence(&self.source, &self.q, budget)? {
            Equivalence::Equivalent { .. } => Ok(()),
            other => Err(Error::CertificateViolation(format!("forbidden sets not equivalent: {other:?}"))),
        }
    }

    pub fn is_empty_shift(&self) -> bool {
        self.q.forbids_empty()
    }
}

/// Candidate forbidden sets: the input itself, then the input together with the
/// refuted locally valid patterns on `B_r` for `r = window, window + 1, …`.
/// Produced lazily, since later candidates cost a full ball enumeration.
pub struct Candidates<'a> {
    spec: &'a SftSpec,
    budget: &'a Budget,
    next_r: Option<u32>,
    seen: BTreeSet<Vec<Pattern>>,
}

impl<'a> Candidates<'a> {
    pub fn new(spec: &'a SftSpec, budget: &'a Budget) -> Self {
        Candidates {
            spec,
            budget,
            next_r: None,
            seen: BTreeSet::new(),
        }
    }
}

impl Iterator for Candidates<'_> {
    type Item = Result<SftSpec>;

    fn next(&mut self) -> Option<Result<SftSpec>> {
        let spec = self.spec;
        let Some(mut r) = self.next_r else {
            self.next_r = Some(spec.window());
            self.seen.insert(spec.forbidden.clone());
            return Some(Ok(spec.clone()));
        };
        while r <= self.budget.max_candidate_radius {
            self.next_r = Some(r + 1);
            let ball: Shape = match spec.group.ball(r) {
                Ok(b) => b.members.into_iter().collect(),
                Err(e) => return Some(Err(e)),
            };
            let csp = Csp::new(&spec.group, &spec.forbidden, spec.alphabet_size(), &ball);
            let limits = SearchLimits {
                node_cap: self.budget.node_cap,
                max_solutions: self.budget.max_candidate_patterns,
            };
            if let Ok(valid) = csp.enumerate(&Pattern::new(), limits) {
                let mut forbidden = spec.forbidden.clone();
                for p in valid {
                    if refute_global_validity(spec, &p, self.budget).is_refuted() {
                        forbidden.push(p);
                    }
                }
                match spec.with_forbidden(forbidden) {
                    Ok(c) if self.seen.insert(c.forbidden.clone()) => return Some(Ok(c)),
                    Ok(_) => {}
                    Err(e) => return Some(Err(e)),
                }
            }
            r += 1;
        }
        None
    }
}

pub fn enumerate_candidates(spec: &SftSpec, budget: &Budget) -> Result<Vec<SftSpec>> {
    Candidates::new(spec, budget).collect()
}

/// Drops cells of an unextendable pattern while it stays unextendable at the corner.
fn minimize(q: &SftSpec, x: &Pattern, corner: &Point) -> Pattern {
    let mut cur = x.clone();
    for cell in x.cells.keys() {
        let mut smaller = cur.clone();
        smaller.cells.remove(cell);
        if extends_at(q, &smaller, corner).is_none() {
            cur = smaller;
        }
    }
    cur
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateSearch {
    Found(Certificate),
    Unknown(String),
}

/// Dovetails over candidates and radii. A failing pattern that has no extension at
/// the corner is itself outside the language, so it is minimized and added to the
/// candidate before retrying the same radius.
pub fn find_certificate(spec: &SftSpec, family: Family, budget: &Budget) -> Result<CertificateSearch> {
    family_prefixes(&spec.group, family, 0)?;
    let mut last_reason = String::from("no radius within the budget verified");
    for candidate in Candidates::new(spec, budget) {
        let candidate = candidate?;
        let start = candidate.diameter();
        if start > budget.max_verify_radius {
            last_reason = format!("forbidden diameter {start} exceeds the verification cap");
            continue;
        }
        let mut q = candidate;
        for r in start..=budget.max_verify_radius {
            let mut passes = 0;
            loop {
                match refinement_pass(&q, family, r, budget)? {
                    Pass::Verified(transcript) => {
                        match verify_equivalence(spec, &q, budget)? {
                            Equivalence::Equivalent { p_in_q, q_in_p } => {
                                let cert = Certificate {
                                    source: spec.clone(),
                                    q,
                                    family,
                                    radius: r,
                                    transcript,
                                    p_in_q,
                                    q_in_p,
                                };
                                return Ok(CertificateSearch::Found(cert));
                            }
                            other => {
                                last_reason = format!("candidate not shown equivalent: {other:?}");
                                break;
                            }
                        }
                    }
                    Pass::Refine(found) => {
                        let usable: Vec<Pattern> =
                            found.into_iter().filter(|p| pattern_diameter(&q.group, p) <= r).collect();
                        passes += 1;
                        if usable.is_empty() || passes > budget.max_refinements {
                            last_reason = format!("radius {r}: unextendable patterns remain after {passes} refinement passes");
                            break;
                        }
                        let mut forbidden = q.forbidden.clone();
                        forbidden.extend(usable);
                        q = q.with_forbidden(forbidden)?;
                    }
                    Pass::Unknown(reason) => {
                        last_reason = format!("radius {r}: {reason}");
                        break;
                    }
                }
            }
        }
    }
    Ok(CertificateSearch::Unknown(last_reason))
}

enum Pass {
    Verified(Vec<TranscriptEntry>),
    Refine(Vec<Pattern>),
    Unknown(String),
}

/// One sweep of the extension check that collects every unextendable pattern,
/// minimized and up to translation, instead of stopping at the first.
fn refinement_pass(q: &SftSpec, family: Family, r: u32, budget: &Budget) -> Result<Pass> {
    let prefixes = match family_prefixes(&q.group, family, r) {
        Ok(p) => p,
        Err(Error::Resource(m)) => return Ok(Pass::Unknown(m)),
        Err(e) => return Err(e),
    };
    let mut transcript = Vec::with_capacity(prefixes.len());
    let mut found: BTreeSet<Pattern> = BTreeSet::new();
    for prefix in prefixes {
        let csp = Csp::new(&q.group, &q.forbidden, q.alphabet_size(), &prefix.shape);
        let patterns = match csp.enumerate(&Pattern::new(), budget.limits()) {
            Ok(p) => p,
            Err(Error::Budget(m)) => return Ok(Pass::Unknown(m)),
            Err(e) => return Err(e),
        };
        for x in &patterns {
            if extends_at(q, x, &prefix.corner).is_none() {
                found.insert(minimize(q, x, &prefix.corner).canonical(&q.group));
            }
        }
        transcript.push(TranscriptEntry {
            shape: prefix.shape,
            corner: prefix.corner,
            patterns: patterns.len(),
        });
    }
    if found.is_empty() {
        Ok(Pass::Verified(transcript))
    } else {
        Ok(Pass::Refine(found.into_iter().collect()))
    }
}
