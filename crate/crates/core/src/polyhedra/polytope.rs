use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::lp::{LinearProgram, LpOutcome, Relation};
use super::{ceil, dot_int, floor, l1_norm, nullspace, primitive, rat, to_rational_vec, Rational, Subspace};
use crate::error::{Error, Result};

/// Result of maximizing a linear functional over a polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    Bounded(Rational),
    Unbounded,
    Empty,
}

impl Support {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Support::Bounded(v) => Some(v),
            _ => None,
        }
    }
}

/// Optimum of the uniform-slack program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slack {
    Finite(Rational),
    Unbounded,
}

impl Slack {
    pub fn is_positive(&self) -> bool {
        match self {
            Slack::Finite(s) => s.is_positive(),
            Slack::Unbounded => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineHull {
    Empty,
    Hull { dim: usize, span: Subspace },
}

impl AffineHull {
    pub fn dim(&self) -> Option<usize> {
        match self {
            AffineHull::Empty => None,
            AffineHull::Hull { dim, .. } => Some(*dim),
        }
    }

    pub fn span(&self) -> Option<&Subspace> {
        match self {
            AffineHull::Empty => None,
            AffineHull::Hull { span, .. } => Some(span),
        }
    }
}

/// `{u ∈ Q^n : ⟨u, normal_i⟩ ≤ offset_i}` with primitive integer normals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    ambient_dim: usize,
    normals: Vec<Vec<i64>>,
    offsets: Vec<Rational>,
}

impl HPolytope {
    /// Non-primitive normals are divided by their gcd, with the offset scaled
    /// to match.
    pub fn new(ambient_dim: usize, normals: Vec<Vec<i64>>, offsets: Vec<Rational>) -> Result<Self> {
        if normals.len() != offsets.len() {
            return Err(Error::DimensionMismatch { expected: normals.len(), got: offsets.len() });
        }
        let mut prim_normals = Vec::with_capacity(normals.len());
        let mut prim_offsets = Vec::with_capacity(offsets.len());
        for (i, (n, c)) in normals.into_iter().zip(offsets).enumerate() {
            if n.len() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, got: n.len() });
            }
            if n.iter().all(|&x| x == 0) {
                return Err(Error::ZeroNormal(i));
            }
            let p = primitive(&n);
            let scale = n.iter().zip(&p).find(|(_, &b)| b != 0).map(|(&a, &b)| a / b).unwrap_or(1);
            prim_offsets.push(c / rat(scale));
            prim_normals.push(p);
        }
        Ok(Self { ambient_dim, normals: prim_normals, offsets: prim_offsets })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn normals(&self) -> &[Vec<i64>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[Rational] {
        &self.offsets
    }

    pub fn contains(&self, u: &[Rational]) -> bool {
        self.normals.iter().zip(&self.offsets).all(|(n, c)| dot_int(u, n) <= *c)
    }

    fn contains_lattice_point(&self, u: &[i64]) -> bool {
        self.normals.iter().zip(&self.offsets).all(|(n, c)| {
            let d: i128 = n.iter().zip(u).map(|(&a, &b)| a as i128 * b as i128).sum();
            Rational::from_integer(BigInt::from(d)) <= *c
        })
    }

    fn base_program(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(self.ambient_dim);
        for (n, c) in self.normals.iter().zip(&self.offsets) {
            lp.add(to_rational_vec(n), Relation::Le, c.clone());
        }
        lp
    }

    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        self.base_program().feasible_point()
    }

    pub fn is_empty(&self) -> bool {
        self.feasible_point().is_none()
    }

    /// Maximum of `⟨u, direction⟩` over the polytope.
    pub fn lp_support(&self, direction: &[Rational]) -> Result<Support> {
        if direction.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, got: direction.len() });
        }
        let mut lp = self.base_program();
        lp.objective = direction.to_vec();
        Ok(match lp.maximize() {
            LpOutcome::Optimal { value, .. } => Support::Bounded(value),
            LpOutcome::Infeasible => Support::Empty,
            LpOutcome::Unbounded => Support::Unbounded,
        })
    }

    pub fn support_int(&self, direction: &[i64]) -> Result<Support> {
        self.lp_support(&to_rational_vec(direction))
    }

    fn slack_program(&self, cap: Option<&Rational>) -> LinearProgram {
        let n = self.ambient_dim;
        let mut lp = LinearProgram::new(n + 1);
        lp.objective[n] = Rational::one();
        for (normal, c) in self.normals.iter().zip(&self.offsets) {
            let mut row = to_rational_vec(normal);
            row.push(rat(l1_norm(normal)));
            lp.add(row, Relation::Le, c.clone());
        }
        if let Some(cap) = cap {
            let mut row = vec![Rational::zero(); n + 1];
            row[n] = Rational::one();
            lp.add(row, Relation::Le, cap.clone());
        }
        lp
    }

    /// Largest `s` such that some `u` satisfies every constraint with slack
    /// `s·‖normal‖₁`. Positive iff the polytope is full-dimensional; negative
    /// iff it is empty.
    pub fn strict_feasibility_slack(&self) -> Slack {
        match self.slack_program(None).maximize() {
            LpOutcome::Optimal { value, .. } => Slack::Finite(value),
            LpOutcome::Unbounded => Slack::Unbounded,
            // s → -∞ is always feasible when there is at least one constraint
            LpOutcome::Infeasible => Slack::Finite(-Rational::one()),
        }
    }

    /// Same program with `s ≤ cap`, for normal sets that do not positively
    /// span the ambient space.
    pub fn strict_feasibility_slack_capped(&self, cap: &Rational) -> Rational {
        match self.slack_program(Some(cap)).maximize() {
            LpOutcome::Optimal { value, .. } => value,
            _ => -Rational::one(),
        }
    }

    pub fn is_full_dimensional(&self) -> bool {
        if self.normals.is_empty() {
            return true;
        }
        self.strict_feasibility_slack().is_positive()
    }

    /// Dimension and direction space of the affine hull, via the implicit
    /// equalities `min ⟨u, n_i⟩ = c_i`.
    pub fn affine_hull(&self) -> AffineHull {
        if self.is_empty() {
            return AffineHull::Empty;
        }
        let mut equalities = Vec::new();
        for (n, c) in self.normals.iter().zip(&self.offsets) {
            let neg: Vec<i64> = n.iter().map(|x| -x).collect();
            if let Ok(Support::Bounded(v)) = self.support_int(&neg) {
                if -v == *c {
                    equalities.push(to_rational_vec(n));
                }
            }
        }
        let span = Subspace::span_unchecked(
            self.ambient_dim,
            nullspace(&equalities, self.ambient_dim),
        );
        AffineHull::Hull { dim: span.dim(), span }
    }

    /// Integer bounding box from coordinate support values.
    pub fn bounding_box(&self) -> Result<Option<Vec<(i64, i64)>>> {
        let mut bounds = Vec::with_capacity(self.ambient_dim);
        for k in 0..self.ambient_dim {
            let mut e = vec![0i64; self.ambient_dim];
            e[k] = 1;
            let hi = match self.support_int(&e)? {
                Support::Bounded(v) => v,
                Support::Empty => return Ok(None),
                Support::Unbounded => return Err(Error::UnboundedPolytope),
            };
            e[k] = -1;
            let lo = match self.support_int(&e)? {
                Support::Bounded(v) => -v,
                Support::Empty => return Ok(None),
                Support::Unbounded => return Err(Error::UnboundedPolytope),
            };
            let to_i64 = |b: BigInt| -> Result<i64> {
                i64::try_from(b).map_err(|_| Error::Internal("lattice box exceeds i64".into()))
            };
            bounds.push((to_i64(ceil(&lo))?, to_i64(floor(&hi))?));
        }
        Ok(Some(bounds))
    }

    /// All lattice points, sorted lexicographically.
    pub fn lattice_points(&self) -> Result<Vec<Vec<i64>>> {
        let Some(bounds) = self.bounding_box()? else {
            return Ok(Vec::new());
        };
        if bounds.iter().any(|(lo, hi)| lo > hi) {
            return Ok(Vec::new());
        }
        let mut points = Vec::new();
        let mut current: Vec<i64> = bounds.iter().map(|b| b.0).collect();
        loop {
            if self.contains_lattice_point(&current) {
                points.push(current.clone());
            }
            // odometer, last coordinate fastest
            let mut k = self.ambient_dim;
            loop {
                if k == 0 {
                    return Ok(points);
                }
                k -= 1;
                if current[k] < bounds[k].1 {
                    current[k] += 1;
                    for (c, b) in current.iter_mut().zip(&bounds).skip(k + 1) {
                        *c = b.0;
                    }
                    break;
                }
            }
        }
    }

    /// Offsets `h_P(n) + h_Q(n)` over `normal_set`. Exact whenever every
    /// normal of either operand occurs in `normal_set`.
    pub fn minkowski_sum(&self, other: &HPolytope, normal_set: &[Vec<i64>]) -> Result<HPolytope> {
        if other.ambient_dim != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, got: other.ambient_dim });
        }
        let mut offsets = Vec::with_capacity(normal_set.len());
        for n in normal_set {
            let a = self.support_int(n)?;
            let b = other.support_int(n)?;
            match (a, b) {
                (Support::Empty, _) | (_, Support::Empty) => return Err(Error::EmptyOperand),
                (Support::Bounded(x), Support::Bounded(y)) => offsets.push(x + y),
                _ => return Err(Error::UnboundedOperand),
            }
        }
        if normal_set.is_empty() && (self.is_empty() || other.is_empty()) {
            return Err(Error::EmptyOperand);
        }
        HPolytope::new(self.ambient_dim, normal_set.to_vec(), offsets)
    }
}

/// Points of a finite set that are not convex combinations of the others,
/// deduplicated and sorted.
pub fn extreme_points(points: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut distinct = points.to_vec();
    distinct.sort();
    distinct.dedup();
    let mut extreme = Vec::new();
    for (i, p) in distinct.iter().enumerate() {
        let others: Vec<&Vec<Rational>> =
            distinct.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q).collect();
        if others.is_empty() {
            extreme.push(p.clone());
            continue;
        }
        let mut lp = LinearProgram::new(others.len());
        lp.nonnegative = vec![true; others.len()];
        lp.add(vec![Rational::one(); others.len()], Relation::Eq, Rational::one());
        for (k, pk) in p.iter().enumerate() {
            lp.add(others.iter().map(|q| q[k].clone()).collect(), Relation::Eq, pk.clone());
        }
        if lp.feasible_point().is_none() {
            extreme.push(p.clone());
        }
    }
    extreme
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::ratio;

    fn poly(n: usize, rows: &[(&[i64], i64)]) -> HPolytope {
        HPolytope::new(
            n,
            rows.iter().map(|(v, _)| v.to_vec()).collect(),
            rows.iter().map(|(_, c)| rat(*c)).collect(),
        )
        .unwrap()
    }

    fn unit_square() -> HPolytope {
        poly(2, &[(&[1, 0], 1), (&[-1, 0], 0), (&[0, 1], 1), (&[0, -1], 0)])
    }

    #[test]
    fn square_support() {
        assert_eq!(unit_square().support_int(&[1, 1]).unwrap(), Support::Bounded(rat(2)));
    }

    #[test]
    fn contradictory_bounds_are_empty() {
        let p = poly(1, &[(&[1], -1), (&[-1], 0)]);
        assert_eq!(p.support_int(&[1]).unwrap(), Support::Empty);
        assert_eq!(p.support_int(&[-3]).unwrap(), Support::Empty);
        assert!(p.lattice_points().unwrap().is_empty());
        assert_eq!(p.affine_hull(), AffineHull::Empty);
        match p.strict_feasibility_slack() {
            Slack::Finite(s) => assert!(s.is_negative()),
            Slack::Unbounded => panic!("empty polytope has bounded slack"),
        }
    }

    #[test]
    fn interval_slack_is_midpoint_distance() {
        let p = poly(1, &[(&[1], 2), (&[-1], 0)]);
        assert_eq!(p.strict_feasibility_slack(), Slack::Finite(rat(1)));
    }

    #[test]
    fn segment_in_plane_has_zero_slack() {
        let p = poly(2, &[(&[1, 0], 0), (&[-1, 0], 0), (&[0, 1], 1), (&[0, -1], 0)]);
        assert_eq!(p.strict_feasibility_slack(), Slack::Finite(rat(0)));
        assert!(!p.is_full_dimensional());
    }

    #[test]
    fn missing_directions_give_unbounded_slack() {
        let p = poly(2, &[(&[1, 0], 0)]);
        assert_eq!(p.strict_feasibility_slack(), Slack::Unbounded);
        assert_eq!(p.strict_feasibility_slack_capped(&rat(5)), rat(5));
    }

    #[test]
    fn affine_hull_of_point_and_segment() {
        let pt = poly(2, &[(&[1, 0], 0), (&[-1, 0], 0), (&[0, 1], 0), (&[0, -1], 0)]);
        let h = pt.affine_hull();
        assert_eq!(h.dim(), Some(0));
        let seg = poly(2, &[(&[1, 0], 1), (&[-1, 0], 0), (&[0, 1], 0), (&[0, -1], 0)]);
        let h = seg.affine_hull();
        assert_eq!(h.dim(), Some(1));
        assert_eq!(h.span().unwrap(), &Subspace::span(2, &[to_rational_vec(&[1, 0])]).unwrap());
    }

    #[test]
    fn interval_and_triangle_lattice_points() {
        let p = poly(1, &[(&[1], 2), (&[-1], 0)]);
        assert_eq!(p.lattice_points().unwrap(), vec![vec![0], vec![1], vec![2]]);
        let t = poly(2, &[(&[-1, 0], 0), (&[0, -1], 0), (&[1, 1], 2)]);
        assert_eq!(t.lattice_points().unwrap().len(), 6);
    }

    #[test]
    fn unbounded_enumeration_is_an_error() {
        let p = poly(1, &[(&[1], 2)]);
        assert!(matches!(p.lattice_points(), Err(Error::UnboundedPolytope)));
    }

    #[test]
    fn non_primitive_normals_are_normalized() {
        let p = HPolytope::new(1, vec![vec![2], vec![-1]], vec![rat(3), rat(0)]).unwrap();
        assert_eq!(p.normals()[0], vec![1]);
        assert_eq!(p.offsets()[0], ratio(3, 2));
        assert!(matches!(HPolytope::new(1, vec![vec![0]], vec![rat(0)]), Err(Error::ZeroNormal(0))));
    }

    #[test]
    fn interval_sums() {
        let normals = vec![vec![1], vec![-1]];
        let a = poly(1, &[(&[1], 1), (&[-1], 0)]);
        let b = poly(1, &[(&[1], 2), (&[-1], 0)]);
        let s = a.minkowski_sum(&b, &normals).unwrap();
        assert_eq!(s.offsets(), &[rat(3), rat(0)]);
    }

    #[test]
    fn square_plus_segment() {
        let normals = vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]];
        let seg = poly(2, &[(&[1, 0], 1), (&[-1, 0], 0), (&[0, 1], 0), (&[0, -1], 0)]);
        let s = unit_square().minkowski_sum(&seg, &normals).unwrap();
        assert_eq!(s.offsets(), &[rat(2), rat(0), rat(1), rat(0)]);
        let empty = poly(1, &[(&[1], -1), (&[-1], 0)]);
        let one = poly(1, &[(&[1], 1), (&[-1], 0)]);
        assert!(matches!(one.minkowski_sum(&empty, &[vec![1], vec![-1]]), Err(Error::EmptyOperand)));
    }

    #[test]
    fn extreme_points_of_square_with_center() {
        let pts: Vec<Vec<Rational>> = [[0, 0], [2, 0], [0, 2], [2, 2], [1, 1], [1, 1]]
            .iter()
            .map(|p| to_rational_vec(p))
            .collect();
        assert_eq!(extreme_points(&pts).len(), 4);
        let line: Vec<Vec<Rational>> = [[0], [3], [1]].iter().map(|p| to_rational_vec(p)).collect();
        assert_eq!(extreme_points(&line), vec![to_rational_vec(&[0]), to_rational_vec(&[3])]);
    }
}
