//! Two-phase primal simplex over exact rationals with Bland's rule.

use num_traits::{Signed, Zero};

use super::rational::{dot, int, QVector, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: QVector,
    pub rel: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: QVector, rel: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, rel, rhs }
    }
}

/// Maximize `objective · x` subject to the constraints. Variables are
/// nonnegative unless marked free.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: QVector,
    pub constraints: Vec<Constraint>,
    pub free: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: QVector },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
            free: vec![false; num_vars],
        }
    }

    /// All variables free; the usual shape for optimizing over an H-polytope.
    pub fn free_vars(num_vars: usize) -> Self {
        let mut lp = Self::new(num_vars);
        lp.free = vec![true; num_vars];
        lp
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: QVector, rel: Relation, rhs: Rational) -> &mut Self {
        debug_assert_eq!(coeffs.len(), self.num_vars());
        self.constraints.push(Constraint::new(coeffs, rel, rhs));
        self
    }

    pub fn maximize(mut self, objective: QVector) -> Self {
        self.objective = objective;
        self
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }

    pub fn is_feasible(&self) -> bool {
        let mut probe = self.clone();
        probe.objective = vec![Rational::zero(); self.num_vars()];
        !matches!(probe.solve(), LpOutcome::Infeasible)
    }
}

struct Tableau {
    rows: Vec<QVector>,
    rhs: QVector,
    basis: Vec<usize>,
    /// column index of x⁺/x⁻ for each original variable
    var_cols: Vec<(usize, Option<usize>)>,
    num_struct: usize,
    artificial_start: usize,
    ncols: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let mut var_cols = Vec::new();
        let mut next = 0;
        for &f in &lp.free {
            if f {
                var_cols.push((next, Some(next + 1)));
                next += 2;
            } else {
                var_cols.push((next, None));
                next += 1;
            }
        }
        let num_struct = next;
        let m = lp.constraints.len();
        let num_slack = lp.constraints.iter().filter(|c| c.rel != Relation::Eq).count();
        let artificial_start = num_struct + num_slack;
        let ncols = artificial_start + m;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = num_struct;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); ncols];
            for (v, a) in c.coeffs.iter().enumerate() {
                let (p, n) = var_cols[v];
                row[p] = a.clone();
                if let Some(n) = n {
                    row[n] = -a.clone();
                }
            }
            match c.rel {
                Relation::Le => {
                    row[slack] = int(1);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = int(-1);
                    slack += 1;
                }
                Relation::Eq => {}
            }
            let mut b = c.rhs.clone();
            if b.is_negative() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
                b = -b;
            }
            row[artificial_start + i] = int(1);
            basis.push(artificial_start + i);
            rows.push(row);
            rhs.push(b);
        }
        Tableau {
            rows,
            rhs,
            basis,
            var_cols,
            num_struct,
            artificial_start,
            ncols,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, y) in self.rows[i].iter_mut().zip(&prow) {
                *x -= &f * y;
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over the columns `< limit`; returns false if unbounded.
    fn optimize(&mut self, cost: &[Rational], limit: usize) -> bool {
        loop {
            let entering = (0..limit).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced = self
                    .basis
                    .iter()
                    .zip(&self.rows)
                    .fold(cost[j].clone(), |acc, (&b, row)| acc - &cost[b] * &row[j]);
                reduced.is_positive()
            });
            let Some(j) = entering else { return true };
            let mut best: Option<(Rational, usize, usize)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                };
                if better {
                    best = Some((ratio, i, self.basis[i]));
                }
            }
            let Some((_, r, _)) = best else { return false };
            self.pivot(r, j);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let mut phase1 = vec![Rational::zero(); self.ncols];
        for c in phase1.iter_mut().skip(self.artificial_start) {
            *c = int(-1);
        }
        self.optimize(&phase1, self.ncols);
        let infeasibility: Rational = self
            .basis
            .iter()
            .zip(&self.rhs)
            .filter(|(&b, _)| b >= self.artificial_start)
            .map(|(_, v)| v.clone())
            .fold(Rational::zero(), |a, b| a + b);
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive remaining (zero-level) artificials out of the basis
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.artificial_start {
                match (0..self.artificial_start).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        let mut cost = vec![Rational::zero(); self.ncols];
        for (v, (p, n)) in self.var_cols.iter().enumerate() {
            cost[*p] = lp.objective[v].clone();
            if let Some(n) = n {
                cost[*n] = -lp.objective[v].clone();
            }
        }
        if !self.optimize(&cost, self.artificial_start) {
            return LpOutcome::Unbounded;
        }
        let mut values = vec![Rational::zero(); self.num_struct];
        for (&b, v) in self.basis.iter().zip(&self.rhs) {
            if b < self.num_struct {
                values[b] = v.clone();
            }
        }
        let point: QVector = self
            .var_cols
            .iter()
            .map(|(p, n)| match n {
                Some(n) => &values[*p] - &values[*n],
                None => values[*p].clone(),
            })
            .collect();
        let value = dot(&lp.objective, &point);
        LpOutcome::Optimal { value, point }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational::{frac, qvec};

    #[test]
    fn textbook_maximum() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
        let mut lp = LinearProgram::new(2).maximize(qvec(&[3, 2]));
        lp.constrain(qvec(&[1, 1]), Relation::Le, int(4))
            .constrain(qvec(&[1, 3]), Relation::Le, int(6))
            .constrain(qvec(&[1, 0]), Relation::Le, int(3));
        match lp.solve() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, int(11));
                assert_eq!(point, qvec(&[3, 1]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::free_vars(1);
        lp.constrain(qvec(&[1]), Relation::Ge, int(1))
            .constrain(qvec(&[1]), Relation::Le, int(0));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::free_vars(2).maximize(qvec(&[1, 1]));
        lp.constrain(qvec(&[1, -1]), Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x (max -x) with x free, x >= -5/2, x + y = 0, y <= 7
        let mut lp = LinearProgram::free_vars(2).maximize(qvec(&[-1, 0]));
        lp.constrain(qvec(&[1, 0]), Relation::Ge, frac(-5, 2))
            .constrain(qvec(&[1, 1]), Relation::Eq, int(0))
            .constrain(qvec(&[0, 1]), Relation::Le, int(7));
        match lp.solve() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, frac(5, 2));
                assert_eq!(point, vec![frac(-5, 2), frac(5, 2)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut lp = LinearProgram::new(2).maximize(qvec(&[1, 0]));
        lp.constrain(qvec(&[1, 1]), Relation::Eq, int(2))
            .constrain(qvec(&[2, 2]), Relation::Eq, int(4));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, int(2)),
            other => panic!("{other:?}"),
        }
    }
}
