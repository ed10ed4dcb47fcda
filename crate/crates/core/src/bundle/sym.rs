//! Coordinates on `Sym^p Q^r`: degree-`p` monomials in `r` variables, in
//! graded-lex order (`x_1^p, x_1^{p-1} x_2, …, x_r^p`).

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::polyhedra::Rational;

/// `C(nvars + degree - 1, degree)`, saturating at `usize::MAX`.
pub fn sym_dim(nvars: usize, degree: usize) -> usize {
    if nvars == 0 {
        return usize::from(degree == 0);
    }
    let mut acc: u128 = 1;
    for i in 0..degree as u128 {
        acc = acc * (nvars as u128 + i) / (i + 1);
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    nvars: usize,
    degree: usize,
    exponents: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
}

fn push_exponents(nvars: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == nvars {
        prefix.push(remaining);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for e in (0..=remaining).rev() {
        prefix.push(e);
        push_exponents(nvars, remaining - e, prefix, out);
        prefix.pop();
    }
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree: usize) -> Self {
        let mut exponents = Vec::new();
        if nvars > 0 {
            push_exponents(nvars, degree as u32, &mut Vec::new(), &mut exponents);
        } else if degree == 0 {
            exponents.push(Vec::new());
        }
        let index = exponents.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Self { nvars, degree, exponents, index }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn index_of(&self, exponent: &[u32]) -> Option<usize> {
        self.index.get(exponent).copied()
    }

    /// Coordinate vector of a single monomial.
    pub fn unit(&self, exponent: &[u32]) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.len()];
        v[self.index[exponent]] = Rational::one();
        v
    }
}

/// Product of `f ∈ Sym^p` and `g ∈ Sym^q` in `Sym^{p+q}`.
pub fn multiply(
    f: &[Rational],
    fb: &MonomialBasis,
    g: &[Rational],
    gb: &MonomialBasis,
    target: &MonomialBasis,
) -> Vec<Rational> {
    debug_assert_eq!(fb.degree + gb.degree, target.degree);
    let mut out = vec![Rational::zero(); target.len()];
    let mut exp = vec![0u32; target.nvars];
    for (i, a) in f.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            for (k, e) in exp.iter_mut().enumerate() {
                *e = fb.exponents[i][k] + gb.exponents[j][k];
            }
            out[target.index[&exp]] += a * b;
        }
    }
    out
}

/// `Π_k forms[k]^{powers[k]}` for linear forms given in `Sym^1` coordinates.
pub fn product_of_powers(forms: &[Vec<Rational>], powers: &[u32], nvars: usize) -> Vec<Rational> {
    let one = MonomialBasis::new(nvars, 1);
    let mut acc_basis = MonomialBasis::new(nvars, 0);
    let mut acc = vec![Rational::one(); acc_basis.len()];
    for (form, &power) in forms.iter().zip(powers) {
        for _ in 0..power {
            let next = MonomialBasis::new(nvars, acc_basis.degree + 1);
            acc = multiply(&acc, &acc_basis, form, &one, &next);
            acc_basis = next;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::{rat, to_rational_vec};

    #[test]
    fn dimensions() {
        assert_eq!(sym_dim(2, 5), 6);
        assert_eq!(sym_dim(3, 2), 6);
        assert_eq!(sym_dim(1, 7), 1);
        assert_eq!(sym_dim(4, 0), 1);
        for (r, p) in [(2, 3), (3, 4), (4, 2)] {
            assert_eq!(MonomialBasis::new(r, p).len(), sym_dim(r, p));
        }
    }

    #[test]
    fn graded_lex_order() {
        let b = MonomialBasis::new(2, 2);
        assert_eq!(b.exponents(), &[vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn square_of_sum() {
        // (x + y)^2 = x^2 + 2xy + y^2
        let sq = product_of_powers(&[to_rational_vec(&[1, 1])], &[2], 2);
        assert_eq!(sq, vec![rat(1), rat(2), rat(1)]);
        // (x + y)(x - y) = x^2 - y^2
        let p = product_of_powers(&[to_rational_vec(&[1, 1]), to_rational_vec(&[1, -1])], &[1, 1], 2);
        assert_eq!(p, vec![rat(1), rat(0), rat(-1)]);
    }
}
