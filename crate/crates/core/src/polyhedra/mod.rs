//! Exact rational linear algebra, integer lattices, linear programming and
//! H-representation polytopes.

mod lattice;
mod linalg;
pub mod lp;
mod polytope;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use lattice::{integer_kernel, integral_solve, primitive, unimodular_split, UnimodularSplit};
pub use linalg::{nullspace, rank, rref, solve, Subspace};
pub use polytope::{extreme_points, AffineHull, HPolytope, Slack, Support};

/// Exact rational scalar, always in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_rational_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_int(a: &[Rational], b: &[i64]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, &y)| acc + x * BigInt::from(y))
}

pub fn l1_norm(v: &[i64]) -> i64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Scales a nonzero rational vector to the primitive integer vector on the
/// same ray.
pub fn clear_denominators(v: &[Rational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn floor(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil(x: &Rational) -> BigInt {
    x.ceil().to_integer()
}
