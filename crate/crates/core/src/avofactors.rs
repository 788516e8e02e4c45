//! Factor images through the graph of a local map.
//!
//! The graph `{(x, f(x))}` is an SFT on `G × {1, 2}` with `x` on level 1 and the
//! image on level 2. A cornered certificate for it yields forbidden patterns for
//! the image: those of its patterns that live entirely on level 2.

use std::collections::BTreeMap;

use crate::certificates::{find_certificate, Certificate, CertificateSearch, Family};
use crate::error::{Error, Result};
use crate::group::{Group, Point};
use crate::oracles::Budget;
use crate::patterns::{Pattern, SftSpec, Symbol};
use crate::shapes::Shape;

/// A sliding block code: `f(x)_g = rule(x_{g·n_1}, …, x_{g·n_k})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalMap {
    pub neighborhood: Vec<Point>,
    pub rule: BTreeMap<Vec<Symbol>, Symbol>,
}

impl LocalMap {
    /// Checks that the rule is total on `n_symbols^neighborhood` and maps into the alphabet.
    pub fn new(neighborhood: Vec<Point>, rule: BTreeMap<Vec<Symbol>, Symbol>, n_symbols: usize) -> Result<Self> {
        if neighborhood.is_empty() {
            return Err(Error::Usage("local map needs a nonempty neighborhood".into()));
        }
        let total = (n_symbols as u64).checked_pow(neighborhood.len() as u32).unwrap_or(u64::MAX);
        if rule.len() as u64 != total
            || rule.iter().any(|(k, v)| {
                k.len() != neighborhood.len() || (*v as usize) >= n_symbols || k.iter().any(|&a| a as usize >= n_symbols)
            })
        {
            return Err(Error::Usage(format!(
                "rule must list all {total} neighborhood words over {n_symbols} symbols"
            )));
        }
        Ok(LocalMap { neighborhood, rule })
    }

    pub fn from_fn(neighborhood: Vec<Point>, n_symbols: usize, f: impl Fn(&[Symbol]) -> Symbol) -> Result<Self> {
        let mut rule = BTreeMap::new();
        let k = neighborhood.len() as u32;
        for m in 0..(n_symbols as u64).pow(k) {
            let mut w = Vec::with_capacity(k as usize);
            let mut r = m;
            for _ in 0..k {
                w.push((r % n_symbols as u64) as Symbol);
                r /= n_symbols as u64;
            }
            w.reverse();
            let v = f(&w);
            rule.insert(w, v);
        }
        LocalMap::new(neighborhood, rule, n_symbols)
    }

    pub fn apply(&self, word: &[Symbol]) -> Symbol {
        self.rule[word]
    }

    /// The image of `x` on `d`, or `None` if some neighborhood leaves `x`'s domain.
    pub fn image(&self, group: &Group, x: &Pattern, d: &Shape) -> Option<Pattern> {
        let mut out = Pattern::new();
        for g in d {
            let word: Option<Vec<Symbol>> = self.neighborhood.iter().map(|n| x.get(&group.op(g, n))).collect();
            out.cells.insert(g.clone(), self.apply(&word?));
        }
        Some(out)
    }
}

/// The graph relation as an SFT on `G × {1, 2}`.
pub fn build_graph_sft(x: &SftSpec, map: &LocalMap) -> Result<SftSpec> {
    let g = &x.group;
    if !g.is_polycyclic() {
        return Err(Error::Unsupported(format!("factor graphs over {}", g.key())));
    }
    let two = Group::levelled(g.clone(), 2);
    let lift = |p: &Pattern, level: i64| -> Pattern {
        Pattern::from_cells(p.cells.iter().map(|(c, a)| (two.with_level(c, level), *a)))
    };
    let mut forbidden: Vec<Pattern> = x.forbidden.iter().map(|p| lift(p, 1)).collect();
    for (word, &out) in &map.rule {
        for b in 0..x.alphabet_size() as Symbol {
            if b == out {
                continue;
            }
            let mut cells: Vec<(Point, Symbol)> = map
                .neighborhood
                .iter()
                .zip(word)
                .map(|(n, a)| (two.with_level(n, 1), *a))
                .collect();
            cells.push((two.origin_at_level(2), b));
            forbidden.push(Pattern::from_cells(cells));
        }
    }
    SftSpec::new(two, x.alphabet.clone(), forbidden)
}

pub fn factor_certificate(rel: &SftSpec, budget: &Budget) -> Result<CertificateSearch> {
    find_certificate(rel, Family::Cornered2Level, budget)
}

/// Forbidden patterns of the image: certificate patterns lying on level 2.
pub fn image_forbidden(cert: &Certificate) -> Result<SftSpec> {
    let Group::Levelled { base, .. } = &cert.q.group else {
        return Err(Error::Usage("image extraction needs a two-level certificate".into()));
    };
    if cert.family != Family::Cornered2Level {
        return Err(Error::Usage("image extraction needs a cornered certificate".into()));
    }
    let two = &cert.q.group;
    let forbidden = cert
        .q
        .forbidden
        .iter()
        .filter(|p| p.cells.keys().all(|c| two.level(c) == Some(2)))
        .map(|p| Pattern::from_cells(p.cells.iter().map(|(c, a)| (two.base_part(c), *a))))
        .collect();
    SftSpec::new((**base).clone(), cert.q.alphabet.clone(), forbidden)
}
