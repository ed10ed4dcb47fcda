use std::fmt;

use num_traits::{One, Zero};

use super::{is_zero_vec, Rational};
use crate::error::{Error, Result};

/// Reduced row-echelon form. Zero rows are dropped; every pivot is 1 and is
/// the only nonzero entry of its column. Returns the rows and pivot columns.
pub fn rref(mut rows: Vec<Vec<Rational>>, ncols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][col];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    rref(rows.to_vec(), ncols).1.len()
}

/// Basis of `{x : rows · x = 0}`, one vector per free column.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let (reduced, pivots) = rref(rows.to_vec(), ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &p) in reduced.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// One solution of `rows · x = rhs` with free variables set to zero.
pub fn solve(rows: &[Vec<Rational>], rhs: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let augmented: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let (reduced, pivots) = rref(augmented, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (row, &p) in reduced.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// A linear subspace of `Q^n` stored by its reduced row-echelon basis, so two
/// equal subspaces compare equal field by field.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .basis
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "Subspace(Q^{}; {:?})", self.ambient_dim, rows)
    }
}

impl Subspace {
    pub fn span(ambient_dim: usize, vectors: &[Vec<Rational>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch { expected: ambient_dim, got: v.len() });
        }
        Ok(Self::span_unchecked(ambient_dim, vectors.to_vec()))
    }

    pub(crate) fn span_unchecked(ambient_dim: usize, vectors: Vec<Vec<Rational>>) -> Self {
        let (basis, pivots) = rref(vectors, ambient_dim);
        Self { ambient_dim, basis, pivots }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| {
                let mut v = vec![Rational::zero(); ambient_dim];
                v[i] = Rational::one();
                v
            })
            .collect();
        Self { ambient_dim, basis, pivots: (0..ambient_dim).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    /// Canonical echelon basis.
    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after eliminating the pivot coordinates; zero iff
    /// `v` lies in the subspace.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let factor = w[p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        v.len() == self.ambient_dim && is_zero_vec(&self.reduce(v))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis.iter().all(|v| other.contains(v))
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: other.ambient_dim,
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let vectors = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Self::span_unchecked(self.ambient_dim, vectors))
    }

    /// Annihilator under the standard dot product.
    pub fn orthogonal_complement(&self) -> Subspace {
        Self::span_unchecked(self.ambient_dim, nullspace(&self.basis, self.ambient_dim))
    }

    /// `A ∩ B = (A^⊥ + B^⊥)^⊥`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.is_full() {
            return Ok(other.clone());
        }
        if other.is_full() {
            return Ok(self.clone());
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ambient_dim));
        }
        let ann = self.orthogonal_complement().sum(&other.orthogonal_complement())?;
        Ok(ann.orthogonal_complement())
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::{rat, to_rational_vec};

    fn sp(n: usize, vs: &[&[i64]]) -> Subspace {
        Subspace::span(n, &vs.iter().map(|v| to_rational_vec(v)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn transverse_lines_meet_in_zero() {
        let a = sp(2, &[&[1, 0]]);
        let b = sp(2, &[&[0, 1]]);
        assert!(a.intersect(&b).unwrap().is_zero());
        assert!(a.sum(&b).unwrap().is_full());
    }

    #[test]
    fn plane_meets_diagonal() {
        let a = sp(2, &[&[1, 0], &[0, 1]]);
        let b = sp(2, &[&[1, 1]]);
        assert_eq!(a.intersect(&b).unwrap(), b);
        assert_eq!(b.sum(&b).unwrap(), b);
    }

    #[test]
    fn canonical_basis_is_independent_of_generators() {
        let a = sp(3, &[&[1, 2, 3], &[0, 1, 1]]);
        let b = sp(3, &[&[1, 3, 4], &[2, 5, 7], &[1, 2, 3]]);
        assert_eq!(a, b);
        assert_eq!(a.basis()[0][0], rat(1));
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let a = sp(2, &[&[1, 0]]);
        let b = sp(3, &[&[1, 0, 0]]);
        assert!(matches!(a.intersect(&b), Err(Error::DimensionMismatch { .. })));
        assert!(a.sum(&b).is_err());
    }

    #[test]
    fn solve_reports_inconsistency() {
        let rows = vec![to_rational_vec(&[1, 1]), to_rational_vec(&[2, 2])];
        assert!(solve(&rows, &[rat(1), rat(3)], 2).is_none());
        let x = solve(&rows, &[rat(1), rat(2)], 2).unwrap();
        assert_eq!(x, vec![rat(1), rat(0)]);
    }

    #[test]
    fn coordinates_in_echelon_basis() {
        let a = sp(3, &[&[1, 0, 2], &[0, 1, -1]]);
        let c = a.coordinates(&to_rational_vec(&[2, 3, 1])).unwrap();
        assert_eq!(c, vec![rat(2), rat(3)]);
        assert!(a.coordinates(&to_rational_vec(&[0, 0, 1])).is_none());
    }
}
