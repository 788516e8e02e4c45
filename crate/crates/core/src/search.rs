//! Backtracking search for locally valid patterns on a finite domain.
//!
//! Forbidden patterns are grounded to every translate lying inside the domain.
//! Search keeps a bitmask of remaining symbols per cell and removes a symbol when
//! a forbidden translate is matched everywhere except at that cell.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::{Group, Point};
use crate::patterns::{Pattern, Symbol};
use crate::shapes::Shape;

pub struct Csp {
    cells: Vec<Point>,
    index: HashMap<Point, usize>,
    n_symbols: usize,
    constraints: Vec<Vec<(usize, Symbol)>>,
    by_cell: Vec<Vec<usize>>,
    unsatisfiable: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub node_cap: u64,
    pub max_solutions: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            node_cap: 2_000_000,
            max_solutions: 200_000,
        }
    }
}

fn bit(s: Symbol) -> u64 {
    1u64 << s
}

impl Csp {
    pub fn new(group: &Group, forbidden: &[Pattern], n_symbols: usize, domain: &Shape) -> Self {
        let cells: Vec<Point> = domain.iter().cloned().collect();
        let index: HashMap<Point, usize> = cells.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut constraints = Vec::new();
        let mut unsatisfiable = false;
        for f in forbidden {
            let Some(anchor) = f.cells.keys().next() else {
                unsatisfiable = true;
                continue;
            };
            for at in &cells {
                let Some(g) = group.translator(at, anchor) else {
                    continue;
                };
                let ground: Option<Vec<(usize, Symbol)>> = f
                    .cells
                    .iter()
                    .map(|(c, a)| index.get(&group.act(&g, c)).map(|&i| (i, *a)))
                    .collect();
                if let Some(g) = ground {
                    constraints.push(g);
                }
            }
        }
        let mut by_cell = vec![Vec::new(); cells.len()];
        for (k, c) in constraints.iter().enumerate() {
            for (i, _) in c {
                by_cell[*i].push(k);
            }
        }
        Csp {
            cells,
            index,
            n_symbols,
            constraints,
            by_cell,
            unsatisfiable,
        }
    }

    pub fn cells(&self) -> &[Point] {
        &self.cells
    }

    fn full(&self) -> u64 {
        if self.n_symbols == 64 {
            u64::MAX
        } else {
            (1u64 << self.n_symbols) - 1
        }
    }

    /// Applies one constraint; `false` on a contradiction.
    fn apply(&self, k: usize, domains: &mut [u64], queue: &mut Vec<usize>) -> bool {
        let mut open = None;
        let mut n_open = 0;
        for &(x, s) in &self.constraints[k] {
            let d = domains[x];
            if d & bit(s) == 0 {
                return true;
            }
            if d != bit(s) {
                n_open += 1;
                open = Some((x, s));
            }
        }
        match (n_open, open) {
            (0, _) => false,
            (1, Some((x, s))) => {
                domains[x] &= !bit(s);
                if domains[x] == 0 {
                    return false;
                }
                if domains[x].count_ones() == 1 {
                    queue.push(x);
                }
                true
            }
            _ => true,
        }
    }

    fn propagate(&self, domains: &mut [u64], mut queue: Vec<usize>) -> bool {
        while let Some(c) = queue.pop() {
            for &k in &self.by_cell[c] {
                if !self.apply(k, domains, &mut queue) {
                    return false;
                }
            }
        }
        true
    }

    fn initial(&self, fixed: &Pattern) -> Result<Option<Vec<u64>>> {
        if self.unsatisfiable {
            return Ok(None);
        }
        let mut domains = vec![self.full(); self.cells.len()];
        for (p, a) in &fixed.cells {
            let Some(&i) = self.index.get(p) else {
                return Err(Error::Usage(format!("fixed cell {:?} outside the search domain", p.0)));
            };
            if (*a as usize) >= self.n_symbols {
                return Ok(None);
            }
            domains[i] &= bit(*a);
        }
        let mut queue = Vec::new();
        for k in 0..self.constraints.len() {
            if !self.apply(k, &mut domains, &mut queue) {
                return Ok(None);
            }
        }
        if !self.propagate(&mut domains, queue) {
            return Ok(None);
        }
        Ok(Some(domains))
    }

    fn to_pattern(&self, domains: &[u64]) -> Pattern {
        Pattern::from_cells(
            self.cells
                .iter()
                .zip(domains)
                .map(|(p, d)| (p.clone(), d.trailing_zeros() as Symbol)),
        )
    }

    fn branch_cell(domains: &[u64]) -> Option<usize> {
        domains
            .iter()
            .enumerate()
            .filter(|(_, d)| d.count_ones() > 1)
            .min_by_key(|(i, d)| (d.count_ones(), *i))
            .map(|(i, _)| i)
    }

    fn walk(
        &self,
        domains: Vec<u64>,
        nodes: &mut u64,
        limits: SearchLimits,
        out: &mut Vec<Pattern>,
        stop_at_first: bool,
    ) -> Result<bool> {
        *nodes += 1;
        if *nodes > limits.node_cap {
            return Err(Error::Budget(format!("search exceeded {} nodes", limits.node_cap)));
        }
        let Some(c) = Self::branch_cell(&domains) else {
            if out.len() >= limits.max_solutions {
                return Err(Error::Budget(format!(
                    "more than {} locally valid patterns",
                    limits.max_solutions
                )));
            }
            out.push(self.to_pattern(&domains));
            return Ok(stop_at_first);
        };
        for s in 0..self.n_symbols as Symbol {
            if domains[c] & bit(s) == 0 {
                continue;
            }
            let mut d = domains.clone();
            d[c] = bit(s);
            if self.propagate(&mut d, vec![c]) && self.walk(d, nodes, limits, out, stop_at_first)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Some locally valid pattern on the whole domain extending `fixed`, if any.
    pub fn solve(&self, fixed: &Pattern, limits: SearchLimits) -> Result<Option<Pattern>> {
        let Some(d) = self.initial(fixed)? else {
            return Ok(None);
        };
        let mut out = Vec::new();
        let mut nodes = 0;
        self.walk(d, &mut nodes, limits, &mut out, true)?;
        Ok(out.pop())
    }

    /// All locally valid patterns on the domain extending `fixed`, sorted.
    pub fn enumerate(&self, fixed: &Pattern, limits: SearchLimits) -> Result<Vec<Pattern>> {
        let Some(d) = self.initial(fixed)? else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        let mut nodes = 0;
        self.walk(d, &mut nodes, limits, &mut out, false)?;
        out.sort();
        Ok(out)
    }
}

/// All locally valid patterns on `domain`.
pub fn locally_valid_patterns(
    group: &Group,
    forbidden: &[Pattern],
    n_symbols: usize,
    domain: &Shape,
    limits: SearchLimits,
) -> Result<Vec<Pattern>> {
    Csp::new(group, forbidden, n_symbols, domain).enumerate(&Pattern::new(), limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{all_patterns, locally_valid};

    fn p(v: &[i64]) -> Point {
        Point(v.to_vec())
    }

    #[test]
    fn enumeration_matches_filtering() {
        let z2 = Group::free_abelian(2);
        let forb = vec![
            Pattern::from_cells([(p(&[0, 0]), 1), (p(&[1, 0]), 1)]),
            Pattern::from_cells([(p(&[0, 0]), 1), (p(&[0, 1]), 1)]),
            Pattern::from_cells([(p(&[0, 0]), 2), (p(&[1, 1]), 0)]),
        ];
        let dom: Shape = z2.ball(2).unwrap().members.into_iter().filter(|q| q.0[0] >= 0).collect();
        let brute: Vec<Pattern> = all_patterns(&dom, 3)
            .into_iter()
            .filter(|q| locally_valid(&z2, q, &forb))
            .collect();
        let got = locally_valid_patterns(&z2, &forb, 3, &dom, SearchLimits::default()).unwrap();
        assert_eq!(got, brute);
    }

    #[test]
    fn fixed_cells_and_budgets() {
        let z = Group::free_abelian(1);
        let forb = vec![
            Pattern::from_cells([(p(&[0]), 0), (p(&[1]), 1)]),
            Pattern::from_cells([(p(&[0]), 1), (p(&[1]), 0)]),
        ];
        let dom: Shape = (0..3).map(|x| p(&[x])).collect();
        let csp = Csp::new(&z, &forb, 2, &dom);
        let fixed = Pattern::from_cells([(p(&[0]), 0), (p(&[2]), 1)]);
        assert_eq!(csp.solve(&fixed, SearchLimits::default()).unwrap(), None);
        let tight = SearchLimits { node_cap: 10, max_solutions: 1 };
        assert!(matches!(csp.enumerate(&Pattern::new(), tight), Err(Error::Budget(_))));
        let empty = Csp::new(&z, &[Pattern::new()], 2, &dom);
        assert_eq!(empty.solve(&Pattern::new(), SearchLimits::default()).unwrap(), None);
    }
}
