//! Lattices `N ≅ Z^r` and `M = Hom(N, Z)`, rational cones and complete fans.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::polyhedra::lp::{LinearProgram, Relation};
use crate::polyhedra::{nullspace, rank, rat, to_rational_vec, Rational};

/// A cone of the fan, named by indices into [`Fan::rays`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    pub ray_indices: Vec<usize>,
}

/// A maximal cone containing a vector, with the nonnegative ray coefficients
/// that witness membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeMembership {
    pub cone: usize,
    pub coefficients: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    WrongLength,
    ZeroRay,
    NonPrimitive,
    DuplicateRay,
    EmptyCone,
    RayIndexOutOfRange,
    DependentRays,
    NonExtremalRay,
    UnusedRay,
    ImproperIntersection,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::WrongLength => "ray length differs from lattice rank",
            Self::ZeroRay => "zero ray",
            Self::NonPrimitive => "non-primitive",
            Self::DuplicateRay => "duplicate ray",
            Self::EmptyCone => "empty cone",
            Self::RayIndexOutOfRange => "ray index out of range",
            Self::DependentRays => "simplicial cone with linearly dependent rays",
            Self::NonExtremalRay => "ray is not extremal in its cone",
            Self::UnusedRay => "ray lies in no maximal cone",
            Self::ImproperIntersection => "cones do not meet in a common face",
        })
    }
}

/// A defect found by [`Fan::validate`]. `indices` are ray indices for ray
/// defects and cone indices for cone defects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub indices: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}", self.kind, self.indices)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    lattice_rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl Fan {
    /// Stores the data as given; see [`Fan::validate`].
    pub fn new(lattice_rank: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Self {
        let max_cones = max_cones
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        Self { lattice_rank, rays, max_cones }
    }

    /// Constructs and validates, failing on the first batch of violations.
    pub fn validated(lattice_rank: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        let fan = Self::new(lattice_rank, rays, max_cones);
        let violations = fan.validate();
        if violations.is_empty() {
            Ok(fan)
        } else {
            let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
            Err(Error::InvalidFan(msg.join("; ")))
        }
    }

    pub fn projective_line() -> Self {
        Self::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]])
    }

    /// Rays `(-1,-1), (1,0), (0,1)`.
    pub fn projective_plane() -> Self {
        Self::new(2, vec![vec![-1, -1], vec![1, 0], vec![0, 1]], vec![vec![1, 2], vec![0, 2], vec![0, 1]])
    }

    /// Rays `e_1, …, e_n, -(e_1 + ⋯ + e_n)`.
    pub fn projective_space(n: usize) -> Self {
        let mut rays: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        rays.push(vec![-1; n]);
        let cones = (0..=n).map(|skip| (0..=n).filter(|&k| k != skip).collect()).collect();
        Self::new(n, rays, cones)
    }

    /// Hirzebruch surface `F_a`: rays `(1,0), (0,1), (-1,a), (0,-1)`.
    pub fn hirzebruch(a: i64) -> Self {
        Self::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn cone(&self, i: usize) -> Cone {
        Cone { ray_indices: self.max_cones[i].clone() }
    }

    fn ray_rows(&self, indices: &[usize]) -> Vec<Vec<Rational>> {
        indices.iter().map(|&i| to_rational_vec(&self.rays[i])).collect()
    }

    /// Every defect of the data; an empty list means the fan is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let r = self.lattice_rank;
        let mut out = Vec::new();
        let mut push = |kind, indices| out.push(Violation { kind, indices });
        let mut ray_ok = vec![true; self.rays.len()];
        for (i, v) in self.rays.iter().enumerate() {
            if v.len() != r {
                push(ViolationKind::WrongLength, vec![i]);
                ray_ok[i] = false;
            } else if v.iter().all(|&x| x == 0) {
                push(ViolationKind::ZeroRay, vec![i]);
                ray_ok[i] = false;
            } else if v.iter().fold(0i64, |g, x| g.gcd(x)) != 1 {
                push(ViolationKind::NonPrimitive, vec![i]);
            }
        }
        for i in 0..self.rays.len() {
            for j in i + 1..self.rays.len() {
                if self.rays[i] == self.rays[j] {
                    push(ViolationKind::DuplicateRay, vec![i, j]);
                }
            }
        }
        let mut used = vec![false; self.rays.len()];
        let mut cone_ok = vec![true; self.max_cones.len()];
        for (c, cone) in self.max_cones.iter().enumerate() {
            if cone.is_empty() {
                push(ViolationKind::EmptyCone, vec![c]);
                cone_ok[c] = false;
                continue;
            }
            if cone.iter().any(|&i| i >= self.rays.len()) {
                push(ViolationKind::RayIndexOutOfRange, vec![c]);
                cone_ok[c] = false;
                continue;
            }
            for &i in cone {
                used[i] = true;
            }
            if cone.iter().any(|&i| !ray_ok[i]) {
                cone_ok[c] = false;
                continue;
            }
            if cone.len() <= r {
                if rank(&self.ray_rows(cone), r) < cone.len() {
                    push(ViolationKind::DependentRays, vec![c]);
                    cone_ok[c] = false;
                }
            } else {
                for &i in cone {
                    let others: Vec<usize> = cone.iter().copied().filter(|&k| k != i).collect();
                    if self.in_cone_span(&others, &to_rational_vec(&self.rays[i])).is_some() {
                        push(ViolationKind::NonExtremalRay, vec![c, i]);
                        cone_ok[c] = false;
                    }
                }
            }
        }
        for (i, u) in used.iter().enumerate() {
            if !u {
                push(ViolationKind::UnusedRay, vec![i]);
            }
        }
        for a in 0..self.max_cones.len() {
            for b in a + 1..self.max_cones.len() {
                if cone_ok[a] && cone_ok[b] && !self.meet_in_common_face(a, b) {
                    push(ViolationKind::ImproperIntersection, vec![a, b]);
                }
            }
        }
        out
    }

    /// Nonnegative coefficients expressing `n` over the given rays.
    fn in_cone_span(&self, indices: &[usize], n: &[Rational]) -> Option<Vec<Rational>> {
        let mut lp = LinearProgram::new(indices.len());
        lp.nonnegative = vec![true; indices.len()];
        for (k, nk) in n.iter().enumerate() {
            let row = indices.iter().map(|&i| rat(self.rays[i][k])).collect();
            lp.add(row, Relation::Eq, nk.clone());
        }
        lp.feasible_point()
    }

    /// Separation test: some `m` vanishes on the shared rays and is `≥ 1` on
    /// rays only in `a`, `≤ -1` on rays only in `b`.
    fn meet_in_common_face(&self, a: usize, b: usize) -> bool {
        let (ca, cb) = (&self.max_cones[a], &self.max_cones[b]);
        let mut lp = LinearProgram::new(self.lattice_rank);
        for &i in ca.iter().chain(cb.iter().filter(|i| !ca.contains(i))) {
            let row = to_rational_vec(&self.rays[i]);
            match (ca.contains(&i), cb.contains(&i)) {
                (true, true) => lp.add(row, Relation::Eq, Rational::zero()),
                (true, false) => lp.add(row, Relation::Ge, rat(1)),
                _ => lp.add(row, Relation::Le, rat(-1)),
            }
        }
        lp.feasible_point().is_some()
    }

    /// Ray sets of the facets of a full-dimensional cone.
    fn facets(&self, cone: &[usize]) -> Vec<Vec<usize>> {
        let r = self.lattice_rank;
        let mut facets = Vec::new();
        for subset in subsets(cone, r - 1) {
            let rows = self.ray_rows(&subset);
            let normal = nullspace(&rows, r);
            if normal.len() != 1 {
                continue;
            }
            let values: Vec<Rational> = cone
                .iter()
                .map(|&i| crate::polyhedra::dot_int(&normal[0], &self.rays[i]))
                .collect();
            let nonneg = values.iter().all(|v| *v >= Rational::zero());
            let nonpos = values.iter().all(|v| *v <= Rational::zero());
            if !(nonneg || nonpos) {
                continue;
            }
            let facet: Vec<usize> = cone
                .iter()
                .zip(&values)
                .filter(|(_, v)| v.is_zero())
                .map(|(&i, _)| i)
                .collect();
            if !facets.contains(&facet) {
                facets.push(facet);
            }
        }
        facets
    }

    /// Whether the maximal cones cover `N ⊗ Q`. Assumes a validated fan.
    /// Ranks above 3 are reported as unsupported rather than guessed.
    pub fn is_complete(&self) -> Result<bool> {
        let r = self.lattice_rank;
        match r {
            0 => Ok(true),
            1 => {
                let covered = |v: i64| {
                    self.max_cones.iter().flatten().any(|&i| self.rays[i] == vec![v])
                };
                Ok(covered(1) && covered(-1))
            }
            2 | 3 => {
                let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
                for cone in &self.max_cones {
                    if rank(&self.ray_rows(cone), r) < r {
                        return Ok(false);
                    }
                    for f in self.facets(cone) {
                        *counts.entry(f).or_default() += 1;
                    }
                }
                Ok(!counts.is_empty() && counts.values().all(|&c| c == 2))
            }
            _ => Err(Error::UnsupportedRank(r)),
        }
    }

    /// The lowest-index maximal cone containing `n`.
    pub fn containing_cone(&self, n: &[Rational]) -> Result<ConeMembership> {
        if n.len() != self.lattice_rank {
            return Err(Error::DimensionMismatch { expected: self.lattice_rank, got: n.len() });
        }
        for (c, cone) in self.max_cones.iter().enumerate() {
            if let Some(coefficients) = self.in_cone_span(cone, n) {
                return Ok(ConeMembership { cone: c, coefficients });
            }
        }
        Err(Error::NoConeFound)
    }
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_fans_are_valid_and_complete() {
        for fan in [
            Fan::projective_line(),
            Fan::projective_plane(),
            Fan::projective_space(3),
            Fan::hirzebruch(1),
            Fan::hirzebruch(3),
        ] {
            assert!(fan.validate().is_empty(), "{fan:?}");
            assert!(fan.is_complete().unwrap(), "{fan:?}");
        }
    }

    #[test]
    fn duplicate_and_non_primitive_rays() {
        let dup = Fan::new(1, vec![vec![1], vec![1], vec![-1]], vec![vec![0], vec![1], vec![2]]);
        assert!(dup.validate().iter().any(|v| v.kind == ViolationKind::DuplicateRay && v.indices == vec![0, 1]));
        let np = Fan::new(2, vec![vec![2, 0], vec![0, 1]], vec![vec![0, 1]]);
        let v = np.validate();
        assert!(v.iter().any(|v| v.kind == ViolationKind::NonPrimitive && v.indices == vec![0]));
        assert_eq!(ViolationKind::NonPrimitive.to_string(), "non-primitive");
    }

    #[test]
    fn overlapping_cones_are_rejected() {
        let fan = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![1, 1]], vec![vec![0, 1], vec![0, 2]]);
        assert!(fan.validate().iter().any(|v| v.kind == ViolationKind::ImproperIntersection));
    }

    #[test]
    fn single_ray_is_incomplete() {
        let fan = Fan::new(1, vec![vec![1]], vec![vec![0]]);
        assert!(fan.validate().is_empty());
        assert!(!fan.is_complete().unwrap());
        let quadrant = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]);
        assert!(!quadrant.is_complete().unwrap());
    }

    #[test]
    fn rank_four_is_unsupported() {
        assert!(matches!(Fan::projective_space(4).is_complete(), Err(Error::UnsupportedRank(4))));
    }

    #[test]
    fn containing_cones_in_the_plane() {
        let fan = Fan::projective_plane();
        let m = fan.containing_cone(&to_rational_vec(&[1, 1])).unwrap();
        assert_eq!(fan.max_cones()[m.cone], vec![1, 2]);
        assert_eq!(fan.containing_cone(&to_rational_vec(&[0, 0])).unwrap().cone, 0);
        let m = fan.containing_cone(&to_rational_vec(&[-2, 1])).unwrap();
        assert_eq!(fan.max_cones()[m.cone], vec![0, 2]);
        assert_eq!(m.coefficients, vec![rat(2), rat(3)]);
    }

    #[test]
    fn incomplete_fan_misses_vectors() {
        let quadrant = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]);
        assert!(matches!(
            quadrant.containing_cone(&to_rational_vec(&[-1, 0])),
            Err(Error::NoConeFound)
        ));
    }

    #[test]
    fn square_cone_in_rank_three() {
        // cube fan with non-simplicial square cones is complete
        let rays = vec![
            vec![1, 1, 1], vec![1, 1, -1], vec![1, -1, 1], vec![1, -1, -1],
            vec![-1, 1, 1], vec![-1, 1, -1], vec![-1, -1, 1], vec![-1, -1, -1],
        ];
        let cones = vec![
            vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![0, 1, 4, 5],
            vec![2, 3, 6, 7], vec![0, 2, 4, 6], vec![1, 3, 5, 7],
        ];
        let fan = Fan::new(3, rays, cones);
        assert!(fan.validate().is_empty(), "{:?}", fan.validate());
        assert!(fan.is_complete().unwrap());
    }
}
