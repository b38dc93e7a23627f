//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Problems are in standard form: minimize `cᵀy` subject to `Ay = b`,
//! `y ≥ 0`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { y: Vec<Q>, value: Q },
}

struct Tableau {
    /// `rows[i]` has `cols` coefficients followed by the right-hand side.
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[Q], allowed: usize) -> Vec<Q> {
        (0..allowed)
            .map(|j| {
                let mut r = cost[j].clone();
                for (i, &bj) in self.basis.iter().enumerate() {
                    if !cost[bj].is_zero() && !self.rows[i][j].is_zero() {
                        r -= &cost[bj] * &self.rows[i][j];
                    }
                }
                r
            })
            .collect()
    }

    /// Runs Bland's rule over columns `0..allowed`. Returns `false` when
    /// the objective is unbounded below.
    fn optimize(&mut self, cost: &[Q], allowed: usize) -> bool {
        loop {
            let reduced = self.reduced_costs(cost, allowed);
            let Some(enter) = reduced.iter().position(|r| r.is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

/// Minimizes `cᵀy` over `{y ≥ 0 : Ay = b}`.
pub(crate) fn minimize(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == m);
    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let sign = if bi.is_negative() { -Q::one() } else { Q::one() };
        let mut t: Vec<Q> = row.iter().map(|v| v * &sign).collect();
        t.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
        t.push(bi * &sign);
        rows.push(t);
    }
    let mut tab = Tableau { rows, basis: (n..cols).collect(), cols };

    let phase1: Vec<Q> = (0..cols).map(|j| if j < n { Q::zero() } else { Q::one() }).collect();
    tab.optimize(&phase1, cols);
    let infeasibility: Q =
        tab.basis.iter().enumerate().filter(|(_, &bj)| bj >= n).map(|(i, _)| tab.rhs(i).clone()).sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }

    // drive artificials out of the basis; rows with no original support are redundant
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut phase2 = c.to_vec();
    phase2.resize(cols, Q::zero());
    if !tab.optimize(&phase2, n) {
        return LpOutcome::Unbounded;
    }
    let mut y = vec![Q::zero(); n];
    for (i, &bj) in tab.basis.iter().enumerate() {
        y[bj] = tab.rhs(i).clone();
    }
    let value = y.iter().zip(c).map(|(yi, ci)| yi * ci).sum();
    LpOutcome::Optimal { y, value }
}

/// Some `y ≥ 0` with `Ay = b`, if one exists.
pub(crate) fn phase_one(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.first().map_or(0, Vec::len);
    match minimize(a, b, &vec![Q::zero(); n]) {
        LpOutcome::Optimal { y, .. } => Some(y),
        _ => None,
    }
}
