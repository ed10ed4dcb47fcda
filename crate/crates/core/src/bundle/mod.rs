//! Toric vector bundles as Klyachko filtration data, their symmetric powers,
//! the compatibility condition and finite spanning sets of fiber vectors.

mod compat;
mod filtration;
mod ground;
pub mod sym;

pub use compat::{check_all_cones, check_compatibility, phi_general, ConeGrading};
pub use filtration::Filtration;
pub use ground::{epsilon_bar, filter_lattice_nonempty, ground_set, GroundSet};

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::polyhedra::{rat, HPolytope, Rational, Subspace};
use sym::{product_of_powers, MonomialBasis};

/// How a bundle was built; split bundles admit an exact bigness decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Explicit,
    /// `O(D_1) ⊕ ⋯ ⊕ O(D_t)` with `coefficients[i][ρ]` the coefficient of
    /// `D_ρ` in `D_i`.
    Split { coefficients: Vec<Vec<i64>> },
    Sym { p: usize, base: Box<ToricBundle> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricBundle {
    fan: Fan,
    rank: usize,
    filtrations: Vec<Filtration>,
    provenance: Provenance,
}

impl ToricBundle {
    pub fn new(fan: Fan, rank: usize, filtrations: Vec<Filtration>) -> Result<Self> {
        Self::with_provenance(fan, rank, filtrations, Provenance::Explicit)
    }

    fn with_provenance(fan: Fan, rank: usize, filtrations: Vec<Filtration>, provenance: Provenance) -> Result<Self> {
        if filtrations.len() != fan.rays().len() {
            return Err(Error::ShapeMismatch(format!(
                "{} filtrations for {} rays",
                filtrations.len(),
                fan.rays().len()
            )));
        }
        if let Some(f) = filtrations.iter().find(|f| f.ambient_dim() != rank) {
            return Err(Error::DimensionMismatch { expected: rank, got: f.ambient_dim() });
        }
        Ok(Self { fan, rank, filtrations, provenance })
    }

    /// Split bundle `⊕_i O(Σ_ρ coeffs[i][ρ] D_ρ)`: at ray `ρ` the summand
    /// `x_i` stays in the filtration up to level `coeffs[i][ρ]`.
    pub fn from_divisors(fan: &Fan, coeffs: &[Vec<i64>]) -> Result<Self> {
        let t = coeffs.len();
        if let Some(row) = coeffs.iter().find(|row| row.len() != fan.rays().len()) {
            return Err(Error::ShapeMismatch(format!(
                "divisor row has {} entries for {} rays",
                row.len(),
                fan.rays().len()
            )));
        }
        let unit = |i: usize| -> Vec<Rational> { (0..t).map(|k| rat(i64::from(k == i))).collect() };
        let filtrations = (0..fan.rays().len())
            .map(|rho| {
                let weighted: Vec<(Vec<Rational>, i64)> = (0..t).map(|i| (unit(i), coeffs[i][rho])).collect();
                Filtration::from_weighted_basis(t, &weighted)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_provenance(fan.clone(), t, filtrations, Provenance::Split { coefficients: coeffs.to_vec() })
    }

    pub fn line_bundle(fan: &Fan, coeffs: &[i64]) -> Result<Self> {
        Self::from_divisors(fan, &[coeffs.to_vec()])
    }

    pub fn trivial(fan: &Fan, rank: usize) -> Result<Self> {
        Self::from_divisors(fan, &vec![vec![0; fan.rays().len()]; rank])
    }

    /// Tangent bundle of a smooth complete toric variety: at each ray the
    /// fiber drops to the line `Q·v_ρ` at level 1 and to zero at level 2.
    pub fn tangent(fan: &Fan) -> Result<Self> {
        let r = fan.lattice_rank();
        let filtrations = fan
            .rays()
            .iter()
            .map(|v| {
                let line = Subspace::span(r, &[crate::polyhedra::to_rational_vec(v)])?;
                Filtration::new(r, vec![(0, Subspace::full(r)), (1, line)])
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(fan.clone(), r, filtrations)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn filtrations(&self) -> &[Filtration] {
        &self.filtrations
    }

    pub fn filtration(&self, ray: usize) -> &Filtration {
        &self.filtrations[ray]
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Blockwise filtrations on `E ⊕ F`.
    pub fn direct_sum(&self, other: &ToricBundle) -> Result<Self> {
        if self.fan != other.fan {
            return Err(Error::ShapeMismatch("direct sum over different fans".into()));
        }
        let (ra, rb) = (self.rank, other.rank);
        let filtrations = self
            .filtrations
            .iter()
            .zip(&other.filtrations)
            .map(|(fa, fb)| {
                let mut weighted = Vec::with_capacity(ra + rb);
                for (v, w) in fa.adapted_basis() {
                    let mut e = v;
                    e.resize(ra + rb, rat(0));
                    weighted.push((e, w));
                }
                for (v, w) in fb.adapted_basis() {
                    let mut e = vec![rat(0); ra];
                    e.extend(v);
                    weighted.push((e, w));
                }
                Filtration::from_weighted_basis(ra + rb, &weighted)
            })
            .collect::<Result<Vec<_>>>()?;
        let provenance = match (&self.provenance, &other.provenance) {
            (Provenance::Split { coefficients: a }, Provenance::Split { coefficients: b }) => {
                Provenance::Split { coefficients: a.iter().chain(b).cloned().collect() }
            }
            _ => Provenance::Explicit,
        };
        Self::with_provenance(self.fan.clone(), ra + rb, filtrations, provenance)
    }

    /// `Sym^p E` in monomial coordinates. At each ray the step at level `j`
    /// is spanned by degree-`p` products of adapted basis vectors whose
    /// weights sum to at least `j`.
    pub fn sym_power(&self, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::ShapeMismatch("symmetric power degree must be positive".into()));
        }
        let r = self.rank;
        let basis = MonomialBasis::new(r, p);
        let filtrations = self
            .filtrations
            .iter()
            .map(|f| {
                let adapted = f.adapted_basis();
                let forms: Vec<Vec<Rational>> = adapted.iter().map(|(v, _)| v.clone()).collect();
                let weighted: Vec<(Vec<Rational>, i64)> = basis
                    .exponents()
                    .iter()
                    .map(|c| {
                        let weight = c.iter().zip(&adapted).map(|(&k, (_, w))| i64::from(k) * w).sum();
                        (product_of_powers(&forms, c, r), weight)
                    })
                    .collect();
                Filtration::from_weighted_basis(basis.len(), &weighted)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_provenance(
            self.fan.clone(),
            basis.len(),
            filtrations,
            Provenance::Sym { p, base: Box::new(self.clone()) },
        )
    }

    /// `φ_e(v_ρ)`: the largest level of the ray filtration containing `e`.
    pub fn phi_ray(&self, e: &[Rational], ray: usize) -> Result<i64> {
        self.filtrations[ray].phi(e)
    }

    pub fn phi_values(&self, e: &[Rational]) -> Result<Vec<i64>> {
        (0..self.filtrations.len()).map(|rho| self.phi_ray(e, rho)).collect()
    }

    /// `Δ_e = {u : ⟨u, v_ρ⟩ ≤ φ_e(v_ρ) ∀ρ}`.
    pub fn polytope_of(&self, e: &[Rational]) -> Result<HPolytope> {
        let offsets = self.phi_values(e)?.into_iter().map(rat).collect();
        HPolytope::new(self.fan.lattice_rank(), self.fan.rays().to_vec(), offsets)
    }

    /// `∩_ρ E^ρ(⟨u, v_ρ⟩)`: the fiber vectors `e` with `u ∈ Δ_e`.
    pub fn weight_space(&self, u: &[i64]) -> Subspace {
        let mut acc = Subspace::full(self.rank);
        for (ray, f) in self.fan.rays().iter().zip(&self.filtrations) {
            let level: i64 = ray.iter().zip(u).map(|(a, b)| a * b).sum();
            acc = acc.intersect(&f.at(level)).expect("filtrations share the fiber dimension");
            if acc.is_zero() {
                break;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::{to_rational_vec, Support};

    #[test]
    fn line_bundle_on_p1() {
        let fan = Fan::projective_line();
        let o2 = ToricBundle::line_bundle(&fan, &[2, 0]).unwrap();
        assert_eq!(o2.rank(), 1);
        assert_eq!(o2.phi_values(&to_rational_vec(&[1])).unwrap(), vec![2, 0]);
        let poly = o2.polytope_of(&to_rational_vec(&[1])).unwrap();
        assert_eq!(poly.lattice_points().unwrap(), vec![vec![0], vec![1], vec![2]]);
        let o_minus = ToricBundle::line_bundle(&fan, &[-1, 0]).unwrap();
        assert!(o_minus.polytope_of(&to_rational_vec(&[1])).unwrap().is_empty());
    }

    #[test]
    fn split_rank_two_jumps() {
        let fan = Fan::projective_line();
        let e = ToricBundle::from_divisors(&fan, &[vec![-1, 0], vec![2, 0]]).unwrap();
        let f = e.filtration(0);
        assert_eq!(f.jumps(), vec![-1, 2]);
        assert!(f.at(-1).is_full());
        assert_eq!(f.at(0), Subspace::span(2, &[to_rational_vec(&[0, 1])]).unwrap());
        assert!(f.at(3).is_zero());
    }

    #[test]
    fn split_on_plane_has_coordinate_filtrations() {
        let fan = Fan::projective_plane();
        let e = ToricBundle::from_divisors(&fan, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 2]]).unwrap();
        for f in e.filtrations() {
            for (_, s) in f.steps() {
                for v in s.basis() {
                    assert_eq!(v.iter().filter(|x| **x != rat(0)).count(), 1);
                }
            }
        }
    }

    #[test]
    fn shape_mismatch() {
        let fan = Fan::projective_line();
        assert!(matches!(ToricBundle::from_divisors(&fan, &[vec![1, 2, 3]]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn tangent_phi() {
        let tp2 = ToricBundle::tangent(&Fan::projective_plane()).unwrap();
        assert_eq!(tp2.phi_ray(&to_rational_vec(&[1, 0]), 1).unwrap(), 1);
        assert_eq!(tp2.phi_ray(&to_rational_vec(&[1, 1]), 1).unwrap(), 0);
    }

    #[test]
    fn tangent_polytope_of_coordinate_vector() {
        let tp2 = ToricBundle::tangent(&Fan::projective_plane()).unwrap();
        let poly = tp2.polytope_of(&to_rational_vec(&[1, 0])).unwrap();
        assert_eq!(poly.offsets(), &[rat(0), rat(1), rat(0)]);
        // box-scan oracle over the three inequalities
        let mut expected = Vec::new();
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                if -a - b <= 0 && a <= 1 && b <= 0 {
                    expected.push(vec![a, b]);
                }
            }
        }
        assert_eq!(poly.lattice_points().unwrap(), expected);
        assert_eq!(expected.len(), 3);
    }

    #[test]
    fn sym_of_split_adds_weights() {
        let fan = Fan::projective_line();
        let (a, b) = (3, -1);
        let e = ToricBundle::from_divisors(&fan, &[vec![a, 0], vec![b, 0]]).unwrap();
        let s2 = e.sym_power(2).unwrap();
        assert_eq!(s2.rank(), 3);
        assert_eq!(s2.filtration(0).jumps(), vec![2 * b, a + b, 2 * a]);
        let monomials = MonomialBasis::new(2, 2);
        assert_eq!(s2.phi_ray(&monomials.unit(&[2, 0]), 0).unwrap(), 2 * a);
        assert_eq!(s2.phi_ray(&monomials.unit(&[1, 1]), 0).unwrap(), a + b);
        assert_eq!(s2.phi_ray(&monomials.unit(&[0, 2]), 0).unwrap(), 2 * b);
    }

    #[test]
    fn sym_one_is_identity() {
        let tp2 = ToricBundle::tangent(&Fan::projective_plane()).unwrap();
        assert_eq!(tp2.sym_power(1).unwrap().filtrations(), tp2.filtrations());
    }

    #[test]
    fn sym_two_of_tangent_weights() {
        let tp2 = ToricBundle::tangent(&Fan::projective_plane()).unwrap();
        let s2 = tp2.sym_power(2).unwrap();
        // ray (1,0): adapted basis (1,0) weight 1, (0,1) weight 0
        let b = MonomialBasis::new(2, 2);
        assert_eq!(s2.phi_ray(&b.unit(&[2, 0]), 1).unwrap(), 2);
        assert_eq!(s2.phi_ray(&b.unit(&[1, 1]), 1).unwrap(), 1);
        assert_eq!(s2.phi_ray(&b.unit(&[0, 2]), 1).unwrap(), 0);
        assert_eq!(s2.filtration(1).jumps(), vec![0, 1, 2]);
    }

    #[test]
    fn direct_sum_matches_divisors() {
        let fan = Fan::projective_line();
        let o1 = ToricBundle::line_bundle(&fan, &[1, 0]).unwrap();
        let sum = o1.direct_sum(&o1).unwrap();
        let direct = ToricBundle::from_divisors(&fan, &[vec![1, 0], vec![1, 0]]).unwrap();
        assert_eq!(sum, direct);
        let zero = ToricBundle::from_divisors(&fan, &[]).unwrap();
        let same = o1.direct_sum(&zero).unwrap();
        assert_eq!(same.filtrations(), o1.filtrations());
    }

    #[test]
    fn direct_sum_dimensions_add() {
        let fan = Fan::projective_plane();
        let tp2 = ToricBundle::tangent(&fan).unwrap();
        let l = ToricBundle::line_bundle(&fan, &[2, -1, 0]).unwrap();
        let sum = tp2.direct_sum(&l).unwrap();
        for rho in 0..3 {
            for j in -3..4 {
                assert_eq!(
                    sum.filtration(rho).at(j).dim(),
                    tp2.filtration(rho).at(j).dim() + l.filtration(rho).at(j).dim()
                );
            }
        }
    }

    #[test]
    fn tangent_weight_spaces() {
        let tp2 = ToricBundle::tangent(&Fan::projective_plane()).unwrap();
        assert!(tp2.weight_space(&[0, 0]).is_full());
        assert_eq!(tp2.weight_space(&[1, 0]), Subspace::span(2, &[to_rational_vec(&[1, 0])]).unwrap());
        let o_minus = ToricBundle::line_bundle(&Fan::projective_line(), &[-1, 0]).unwrap();
        for u in -3..4 {
            assert!(o_minus.weight_space(&[u]).is_zero());
        }
        let poly = tp2.polytope_of(&to_rational_vec(&[1, 1])).unwrap();
        assert_eq!(poly.support_int(&[1, 1]).unwrap(), Support::Bounded(rat(0)));
    }
}
