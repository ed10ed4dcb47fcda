//! Integer lattices: column echelon form with a unimodular transform, integer
//! kernels, integral solutions and saturated splittings of `Z^n`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{clear_denominators, nullspace, Rational, Subspace};

struct ColumnEchelon {
    /// `a · u`, lower echelon.
    h: Vec<Vec<BigInt>>,
    /// Unimodular `n × n` transform, stored row-major.
    u: Vec<Vec<BigInt>>,
    /// `(row, column)` of each pivot, in increasing column order.
    pivots: Vec<(usize, usize)>,
}

fn swap_columns(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// `column[target] -= q * column[source]`
fn sub_column(m: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let delta = &row[source] * q;
        row[target] -= delta;
    }
}

fn negate_column(m: &mut [Vec<BigInt>], c: usize) {
    for row in m.iter_mut() {
        row[c] = -row[c].clone();
    }
}

fn column_echelon(a: &[Vec<BigInt>], n: usize) -> ColumnEchelon {
    let mut h: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut col = 0;
    for i in 0..h.len() {
        if col == n {
            break;
        }
        loop {
            let best = (col..n)
                .filter(|&c| !h[i][c].is_zero())
                .min_by(|&x, &y| h[i][x].abs().cmp(&h[i][y].abs()).then(x.cmp(&y)));
            let Some(best) = best else { break };
            swap_columns(&mut h, col, best);
            swap_columns(&mut u, col, best);
            let mut done = true;
            for c in col + 1..n {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[i][col]);
                sub_column(&mut h, c, col, &q);
                sub_column(&mut u, c, col, &q);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                if h[i][col].is_negative() {
                    negate_column(&mut h, col);
                    negate_column(&mut u, col);
                }
                pivots.push((i, col));
                col += 1;
                break;
            }
        }
    }
    ColumnEchelon { h, u, pivots }
}

fn column(m: &[Vec<BigInt>], c: usize) -> Vec<BigInt> {
    m.iter().map(|row| row[c].clone()).collect()
}

/// Lattice basis of `{x ∈ Z^n : a · x = 0}`.
pub fn integer_kernel(a: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let ce = column_echelon(a, n);
    (ce.pivots.len()..n).map(|c| column(&ce.u, c)).collect()
}

/// An integral `x` with `a · x = b`, or `None` when no integral solution
/// exists.
pub fn integral_solve(a: &[Vec<BigInt>], b: &[BigInt], n: usize) -> Option<Vec<BigInt>> {
    let ce = column_echelon(a, n);
    let mut y = vec![BigInt::zero(); n];
    for &(i, c) in &ce.pivots {
        let partial: BigInt = (0..c).map(|k| &ce.h[i][k] * &y[k]).sum();
        let (q, r) = (&b[i] - partial).div_rem(&ce.h[i][c]);
        if !r.is_zero() {
            return None;
        }
        y[c] = q;
    }
    for (row, rhs) in ce.h.iter().zip(b) {
        let lhs: BigInt = row.iter().zip(&y).map(|(x, z)| x * z).sum();
        if &lhs != rhs {
            return None;
        }
    }
    Some(
        (0..n)
            .map(|r| ce.u[r].iter().zip(&y).map(|(x, z)| x * z).sum())
            .collect(),
    )
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

/// A unimodular basis of `Z^n` whose trailing vectors span `L ∩ Z^n` for a
/// rational subspace `L`, together with the coordinate functionals of the
/// leading (complement) vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnimodularSplit {
    /// Basis of the saturated lattice `L ∩ Z^n`.
    pub lattice_basis: Vec<Vec<BigInt>>,
    /// Integral complement: together with `lattice_basis` a basis of `Z^n`.
    pub complement: Vec<Vec<BigInt>>,
    /// Integral functionals vanishing on `L`; `quotient[k]·u` is the
    /// coefficient of `complement[k]` in `u`.
    pub quotient: Vec<Vec<BigInt>>,
}

impl UnimodularSplit {
    pub fn quotient_coordinates(&self, u: &[Rational]) -> Vec<Rational> {
        self.quotient
            .iter()
            .map(|m| {
                m.iter()
                    .zip(u)
                    .fold(Rational::zero(), |acc, (a, x)| acc + x * a)
            })
            .collect()
    }
}

pub fn unimodular_split(l: &Subspace) -> UnimodularSplit {
    let n = l.ambient_dim();
    let constraints: Vec<Vec<BigInt>> = nullspace(l.basis(), n)
        .iter()
        .map(|v| clear_denominators(v))
        .collect();
    let ce = column_echelon(&constraints, n);
    let k = ce.pivots.len();
    let complement: Vec<Vec<BigInt>> = (0..k).map(|c| column(&ce.u, c)).collect();
    let lattice_basis: Vec<Vec<BigInt>> = (k..n).map(|c| column(&ce.u, c)).collect();
    let inverse = invert_unimodular(&ce.u);
    UnimodularSplit { lattice_basis, complement, quotient: inverse[..k].to_vec() }
}

fn invert_unimodular(u: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = u.len();
    let augmented: Vec<Vec<Rational>> = u
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Rational> = row.iter().map(|x| Rational::from_integer(x.clone())).collect();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (reduced, _) = super::rref(augmented, 2 * n);
    reduced
        .into_iter()
        .map(|row| row[n..].iter().map(|x| x.to_integer()).collect())
        .collect()
}
