//! Exact linear programming over rationals.
//!
//! Two-phase primal simplex with Bland's rule. No tolerances anywhere: a
//! feasibility or optimality answer is a theorem about the input, which is
//! what the coherence oracle needs (zero-mass tests are exact decisions).

use crate::rational::{q0, Q};
use num_traits::{One, Signed, Zero};

/// Comparison direction of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cmp {
    Eq,
    Le,
    Ge,
}

/// A linear program over variables x_0..x_{n-1}, all constrained to x >= 0.
#[derive(Debug, Clone)]
pub struct RationalLP {
    n_vars: usize,
    rows: Vec<(Vec<Q>, Cmp, Q)>,
}

/// Exact outcome of an optimization.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Q, point: Vec<Q> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Q, Vec<Q>)> {
        match self {
            LpOutcome::Optimal { value, point } => Some((value, point)),
            _ => None,
        }
    }
}

impl RationalLP {
    pub fn new(n_vars: usize) -> Self {
        RationalLP {
            n_vars,
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    fn dense(&self, terms: &[(usize, Q)]) -> Vec<Q> {
        let mut row = vec![q0(); self.n_vars];
        for (i, c) in terms {
            assert!(*i < self.n_vars, "variable {i} out of range");
            row[*i] += c.clone();
        }
        row
    }

    pub fn eq(&mut self, terms: &[(usize, Q)], rhs: Q) {
        let row = self.dense(terms);
        self.rows.push((row, Cmp::Eq, rhs));
    }

    pub fn le(&mut self, terms: &[(usize, Q)], rhs: Q) {
        let row = self.dense(terms);
        self.rows.push((row, Cmp::Le, rhs));
    }

    pub fn ge(&mut self, terms: &[(usize, Q)], rhs: Q) {
        let row = self.dense(terms);
        self.rows.push((row, Cmp::Ge, rhs));
    }

    pub fn minimize(&self, objective: &[(usize, Q)]) -> LpOutcome {
        self.solve(self.dense(objective), false)
    }

    pub fn maximize(&self, objective: &[(usize, Q)]) -> LpOutcome {
        self.solve(self.dense(objective), true)
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self.minimize(&[]), LpOutcome::Infeasible)
    }

    fn solve(&self, mut costs: Vec<Q>, negate: bool) -> LpOutcome {
        if negate {
            for c in &mut costs {
                *c = -c.clone();
            }
        }
        let m = self.rows.len();
        // Column layout: [structural | slack/surplus | artificial | rhs].
        let n_slack = self
            .rows
            .iter()
            .filter(|(_, cmp, _)| *cmp != Cmp::Eq)
            .count();
        let n = self.n_vars + n_slack + m;
        let rhs_col = n;
        let art0 = self.n_vars + n_slack;

        let mut t: Vec<Vec<Q>> = Vec::with_capacity(m);
        let mut basis: Vec<usize> = Vec::with_capacity(m);
        let mut slack_at = self.n_vars;
        for (r, (row, cmp, rhs)) in self.rows.iter().enumerate() {
            let mut tr = vec![q0(); n + 1];
            tr[..self.n_vars].clone_from_slice(row);
            match cmp {
                Cmp::Eq => {}
                Cmp::Le => {
                    tr[slack_at] = Q::one();
                    slack_at += 1;
                }
                Cmp::Ge => {
                    tr[slack_at] = -Q::one();
                    slack_at += 1;
                }
            }
            tr[rhs_col] = rhs.clone();
            if tr[rhs_col].is_negative() {
                for v in tr.iter_mut() {
                    *v = -v.clone();
                }
            }
            tr[art0 + r] = Q::one();
            basis.push(art0 + r);
            t.push(tr);
        }

        // Phase 1: minimize the sum of artificials.
        let mut d = vec![q0(); n + 1];
        d[art0..art0 + m].fill(Q::one());
        for r in 0..m {
            if !d[basis[r]].is_zero() {
                let f = d[basis[r]].clone();
                for j in 0..=n {
                    let delta = &f * &t[r][j];
                    d[j] -= delta;
                }
            }
        }
        let banned = vec![false; n];
        if run_simplex(&mut t, &mut d, &mut basis, &banned) == Stop::Unbounded {
            unreachable!("phase-1 objective is bounded below by zero");
        }
        if !d[rhs_col].is_zero() {
            return LpOutcome::Infeasible;
        }

        // Drive remaining artificials out of the basis (they sit at value 0).
        let mut banned = vec![false; n];
        banned[art0..art0 + m].fill(true);
        let mut r = 0;
        while r < t.len() {
            if basis[r] >= art0 {
                if let Some(c) = (0..art0).find(|&j| !t[r][j].is_zero()) {
                    pivot(&mut t, &mut d, &mut basis, r, c);
                } else {
                    // Redundant constraint: the whole structural row is zero.
                    t.remove(r);
                    basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }

        // Phase 2: the real objective.
        let mut d = vec![q0(); n + 1];
        d[..self.n_vars].clone_from_slice(&costs);
        for r in 0..t.len() {
            if !d[basis[r]].is_zero() {
                let f = d[basis[r]].clone();
                for j in 0..=n {
                    let delta = &f * &t[r][j];
                    d[j] -= delta;
                }
            }
        }
        if run_simplex(&mut t, &mut d, &mut basis, &banned) == Stop::Unbounded {
            return LpOutcome::Unbounded;
        }

        let mut point = vec![q0(); self.n_vars];
        for (r, &b) in basis.iter().enumerate() {
            if b < self.n_vars {
                point[b] = t[r][rhs_col].clone();
            }
        }
        let mut value = -d[rhs_col].clone();
        if negate {
            value = -value;
        }
        LpOutcome::Optimal { value, point }
    }
}

#[derive(PartialEq)]
enum Stop {
    Optimal,
    Unbounded,
}

/// Bland's rule on both the entering and leaving choice; terminates without
/// cycling even on degenerate bases.
fn run_simplex(t: &mut [Vec<Q>], d: &mut [Q], basis: &mut [usize], banned: &[bool]) -> Stop {
    let n = d.len() - 1;
    loop {
        let Some(c) = (0..n).find(|&j| !banned[j] && d[j].is_negative()) else {
            return Stop::Optimal;
        };
        let mut leave: Option<(usize, Q)> = None;
        for r in 0..t.len() {
            if t[r][c].is_positive() {
                let ratio = &t[r][n] / &t[r][c];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return Stop::Unbounded;
        };
        pivot(t, d, basis, r, c);
    }
}

fn pivot(t: &mut [Vec<Q>], d: &mut [Q], basis: &mut [usize], r: usize, c: usize) {
    let p = t[r][c].clone();
    for v in t[r].iter_mut() {
        *v = &*v / &p;
    }
    let pivot_row = t[r].clone();
    for (rr, row) in t.iter_mut().enumerate() {
        if rr != r && !row[c].is_zero() {
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                let delta = &f * pv;
                *v -= delta;
            }
        }
    }
    if !d[c].is_zero() {
        let f = d[c].clone();
        for (v, pv) in d.iter_mut().zip(&pivot_row) {
            let delta = &f * pv;
            *v -= delta;
        }
    }
    basis[r] = c;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn terms(v: &[(usize, i64, i64)]) -> Vec<(usize, Q)> {
        v.iter().map(|&(i, n, d)| (i, q(n, d))).collect()
    }

    #[test]
    fn simple_max() {
        // max x0 + x1 s.t. x0 + 2 x1 <= 4, 3 x0 + x1 <= 6.
        let mut lp = RationalLP::new(2);
        lp.le(&terms(&[(0, 1, 1), (1, 2, 1)]), q(4, 1));
        lp.le(&terms(&[(0, 3, 1), (1, 1, 1)]), q(6, 1));
        let (v, x) = lp.maximize(&terms(&[(0, 1, 1), (1, 1, 1)])).optimal().unwrap();
        assert_eq!(v, q(14, 5));
        assert_eq!(x, vec![q(8, 5), q(6, 5)]);
    }

    #[test]
    fn equality_and_min() {
        // min x0 s.t. x0 + x1 = 1, x0 >= 1/3.
        let mut lp = RationalLP::new(2);
        lp.eq(&terms(&[(0, 1, 1), (1, 1, 1)]), q(1, 1));
        lp.ge(&terms(&[(0, 1, 1)]), q(1, 3));
        let (v, x) = lp.minimize(&terms(&[(0, 1, 1)])).optimal().unwrap();
        assert_eq!(v, q(1, 3));
        assert_eq!(x[0], q(1, 3));
        assert_eq!(x[1], q(2, 3));
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = RationalLP::new(1);
        lp.ge(&terms(&[(0, 1, 1)]), q(2, 1));
        lp.le(&terms(&[(0, 1, 1)]), q(1, 1));
        assert_eq!(lp.minimize(&[]), LpOutcome::Infeasible);
        assert!(!lp.is_feasible());
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = RationalLP::new(2);
        lp.ge(&terms(&[(0, 1, 1), (1, -1, 1)]), q(0, 1));
        assert_eq!(lp.maximize(&terms(&[(0, 1, 1)])), LpOutcome::Unbounded);
        // The same feasible region is bounded below (x >= 0).
        let (v, _) = lp.minimize(&terms(&[(0, 1, 1)])).optimal().unwrap();
        assert_eq!(v, q0());
    }

    #[test]
    fn negative_rhs_rows_are_normalized() {
        // -x0 <= -2 means x0 >= 2.
        let mut lp = RationalLP::new(1);
        lp.le(&terms(&[(0, -1, 1)]), q(-2, 1));
        let (v, _) = lp.minimize(&terms(&[(0, 1, 1)])).optimal().unwrap();
        assert_eq!(v, q(2, 1));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = RationalLP::new(2);
        lp.eq(&terms(&[(0, 1, 1), (1, 1, 1)]), q(1, 1));
        lp.eq(&terms(&[(0, 2, 1), (1, 2, 1)]), q(2, 1));
        let (v, _) = lp.maximize(&terms(&[(0, 1, 1)])).optimal().unwrap();
        assert_eq!(v, q(1, 1));
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // Classic degeneracy: several constraints meet at the optimum.
        let mut lp = RationalLP::new(3);
        lp.le(&terms(&[(0, 1, 1), (1, 1, 1)]), q(1, 1));
        lp.le(&terms(&[(0, 1, 1), (2, 1, 1)]), q(1, 1));
        lp.le(&terms(&[(1, 1, 1), (2, 1, 1)]), q(1, 1));
        lp.le(&terms(&[(0, 1, 1)]), q(1, 1));
        let (v, _) = lp
            .maximize(&terms(&[(0, 1, 1), (1, 1, 1), (2, 1, 1)]))
            .optimal()
            .unwrap();
        assert_eq!(v, q(3, 2));
    }

    #[test]
    fn charnes_cooper_shape() {
        // Homogeneous ratio program shape used by the oracle:
        // y >= 0, y1 = (1/4)(y1+y2) [entry], y1 + y2 = 1 [normalization].
        let mut lp = RationalLP::new(2);
        lp.eq(&terms(&[(0, 3, 4), (1, -1, 4)]), q0());
        lp.eq(&terms(&[(0, 1, 1), (1, 1, 1)]), q(1, 1));
        let (v, _) = lp.maximize(&terms(&[(0, 1, 1)])).optimal().unwrap();
        assert_eq!(v, q(1, 4));
        let (v, _) = lp.minimize(&terms(&[(0, 1, 1)])).optimal().unwrap();
        assert_eq!(v, q(1, 4));
    }

    #[test]
    fn exact_fractions_survive() {
        // min 1/3 x0 + 1/7 x1 s.t. x0 + x1 >= 1 -> pick x1.
        let mut lp = RationalLP::new(2);
        lp.ge(&terms(&[(0, 1, 1), (1, 1, 1)]), q(1, 1));
        let (v, x) = lp
            .minimize(&terms(&[(0, 1, 3), (1, 1, 7)]))
            .optimal()
            .unwrap();
        assert_eq!(v, q(1, 7));
        assert_eq!(x, vec![q0(), q(1, 1)]);
    }
}
