//! Dense two-phase simplex over exact rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use super::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Self { coeffs, relation, rhs }
    }
}

/// `maximize objective · x` subject to the constraints. Variables are free
/// unless flagged nonnegative.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub nonnegative: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
            nonnegative: vec![false; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        debug_assert_eq!(coeffs.len(), self.num_vars());
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    pub fn maximize(&self) -> LpOutcome {
        Tableau::build(self).solve(self)
    }

    /// Feasibility only: a point satisfying every constraint.
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let mut lp = self.clone();
        lp.objective = vec![Rational::zero(); self.num_vars()];
        match lp.maximize() {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

/// Column layout: for each original variable one column (nonnegative) or
/// two (free, split as `x⁺ - x⁻`), then one slack per inequality, then one
/// artificial per row.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    var_columns: Vec<(usize, Option<usize>)>,
    num_structural: usize,
    num_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let mut var_columns = Vec::with_capacity(lp.num_vars());
        let mut next = 0;
        for &nn in &lp.nonnegative {
            if nn {
                var_columns.push((next, None));
                next += 1;
            } else {
                var_columns.push((next, Some(next + 1)));
                next += 2;
            }
        }
        let num_slack = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let num_structural = next + num_slack;
        let m = lp.constraints.len();
        let width = num_structural + m;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut slack = next;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); width];
            for (j, a) in c.coeffs.iter().enumerate() {
                let (pos, neg) = var_columns[j];
                row[pos] = a.clone();
                if let Some(neg) = neg {
                    row[neg] = -a.clone();
                }
            }
            match c.relation {
                Relation::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
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
            row[num_structural + i] = Rational::one();
            rows.push(row);
            rhs.push(b);
        }
        let basis = (0..m).map(|i| num_structural + i).collect();
        Self { rows, rhs, basis, var_columns, num_structural, num_artificial: m }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for (x, y) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations for `cost` restricted to the first `allowed`
    /// columns. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .fold(cost[j].clone(), |acc, (row, &b)| acc - &cost[b] * &row[j]);
                reduced.is_positive()
            });
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][j].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][j];
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, j);
        }
    }

    fn solve(mut self, lp: &LinearProgram) -> LpOutcome {
        let width = self.num_structural + self.num_artificial;
        let mut phase1 = vec![Rational::zero(); width];
        for c in phase1.iter_mut().skip(self.num_structural) {
            *c = -Rational::one();
        }
        self.optimize(&phase1, width);
        let infeasibility = self
            .basis
            .iter()
            .zip(&self.rhs)
            .filter(|(&b, _)| b >= self.num_structural)
            .fold(Rational::zero(), |acc, (_, v)| acc + v);
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive zero-valued artificials out of the basis or drop redundant rows
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.num_structural {
                match (0..self.num_structural).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        let mut cost = vec![Rational::zero(); width];
        for (j, c) in lp.objective.iter().enumerate() {
            let (pos, neg) = self.var_columns[j];
            cost[pos] = c.clone();
            if let Some(neg) = neg {
                cost[neg] = -c.clone();
            }
        }
        if !self.optimize(&cost, self.num_structural) {
            return LpOutcome::Unbounded;
        }
        let mut column_values = vec![Rational::zero(); width];
        for (&b, v) in self.basis.iter().zip(&self.rhs) {
            column_values[b] = v.clone();
        }
        let point: Vec<Rational> = self
            .var_columns
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => &column_values[pos] - &column_values[neg],
                None => column_values[pos].clone(),
            })
            .collect();
        let value = super::dot(&lp.objective, &point);
        LpOutcome::Optimal { value, point }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::{rat, ratio};

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18, x,y >= 0
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![rat(3), rat(5)];
        lp.nonnegative = vec![true, true];
        lp.add(vec![rat(1), rat(0)], Relation::Le, rat(4));
        lp.add(vec![rat(0), rat(2)], Relation::Le, rat(12));
        lp.add(vec![rat(3), rat(2)], Relation::Le, rat(18));
        match lp.maximize() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(36));
                assert_eq!(point, vec![rat(2), rat(6)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn free_variables_and_equalities() {
        // max x subject to x + y = 1, y >= -1/2
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![rat(1), rat(0)];
        lp.add(vec![rat(1), rat(1)], Relation::Eq, rat(1));
        lp.add(vec![rat(0), rat(1)], Relation::Ge, ratio(-1, 2));
        match lp.maximize() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, ratio(3, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![rat(1)];
        lp.add(vec![rat(1)], Relation::Le, rat(-1));
        lp.add(vec![rat(-1)], Relation::Le, rat(0));
        assert_eq!(lp.maximize(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.objective = vec![rat(1)];
        lp.add(vec![rat(-1)], Relation::Le, rat(0));
        assert_eq!(lp.maximize(), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![rat(1), rat(1)];
        lp.add(vec![rat(1), rat(1)], Relation::Eq, rat(2));
        lp.add(vec![rat(2), rat(2)], Relation::Eq, rat(4));
        lp.add(vec![rat(1), rat(0)], Relation::Le, rat(1));
        lp.add(vec![rat(0), rat(1)], Relation::Le, rat(5));
        match lp.maximize() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(2)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
