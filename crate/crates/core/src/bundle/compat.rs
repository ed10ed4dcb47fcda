//! The compatibility condition: on every cone the ray filtrations must admit
//! a common splitting `E = ⊕_χ E_χ` with `E^ρ(j) = ⊕_{⟨χ, v_ρ⟩ ≥ j} E_χ`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::ToricBundle;
use crate::error::{Error, IncompatibilityWitness, Result};
use crate::fan::Cone;
use crate::polyhedra::{integral_solve, solve, to_rational_vec, Rational, Subspace};

/// Lattice closures larger than this skip the distributivity scan; the
/// dimension count and the reconstruction check still decide.
const MAX_LATTICE_CLOSURE: usize = 64;

/// A grading of the fiber by characters of `M` that reproduces every ray
/// filtration of the cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeGrading {
    pub cone: Cone,
    /// Pieces `(χ, E_χ)` sorted by character.
    pub pieces: Vec<(Vec<i64>, Subspace)>,
    /// Splitting basis with the character of each vector.
    pub basis: Vec<(Vec<Rational>, Vec<i64>)>,
}

impl ConeGrading {
    /// `⊕_{⟨χ, n⟩ ≥ j} E_χ`.
    pub fn step(&self, n: &[i64], j: i64) -> Subspace {
        let ambient = self.pieces.first().map_or(0, |(_, s)| s.ambient_dim());
        let vs: Vec<Vec<Rational>> = self
            .pieces
            .iter()
            .filter(|(chi, _)| pairing(chi, n) >= j)
            .flat_map(|(_, s)| s.basis().iter().cloned())
            .collect();
        Subspace::span_unchecked(ambient, vs)
    }
}

fn pairing(chi: &[i64], n: &[i64]) -> i64 {
    chi.iter().zip(n).map(|(a, b)| a * b).sum()
}

/// Intersection of the cone's ray steps at the given levels.
fn grid_space(bundle: &ToricBundle, rays: &[usize], levels: &[i64]) -> Subspace {
    let mut acc = Subspace::full(bundle.rank());
    for (&rho, &j) in rays.iter().zip(levels) {
        acc = acc.intersect(&bundle.filtration(rho).at(j)).expect("same fiber");
    }
    acc
}

fn jump_grid(bundle: &ToricBundle, rays: &[usize]) -> Vec<Vec<i64>> {
    let mut grid: Vec<Vec<i64>> = vec![Vec::new()];
    for &rho in rays {
        let jumps = bundle.filtration(rho).jumps();
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                jumps.iter().map(move |&j| {
                    let mut t = prefix.clone();
                    t.push(j);
                    t
                })
            })
            .collect();
    }
    // decreasing total level, ties broken by decreasing lexicographic order
    grid.sort_by(|a, b| {
        let (sa, sb): (i64, i64) = (a.iter().sum(), b.iter().sum());
        sb.cmp(&sa).then_with(|| b.cmp(a))
    });
    grid
}

/// Greedy splitting: complements of `Σ_i V(j + δ_i)` inside `V(j)`, visited
/// in decreasing order. Returns vectors with their jump profiles.
fn graded_complements(bundle: &ToricBundle, rays: &[usize]) -> Vec<(Vec<Rational>, Vec<i64>)> {
    let mut chosen = Vec::new();
    for levels in jump_grid(bundle, rays) {
        let v = grid_space(bundle, rays, &levels);
        if v.is_zero() {
            continue;
        }
        let mut current = Subspace::zero(bundle.rank());
        for i in 0..rays.len() {
            let mut next = levels.clone();
            next[i] += 1;
            current = current.sum(&grid_space(bundle, rays, &next)).expect("same fiber");
        }
        for b in v.basis() {
            if !current.contains(b) {
                let vs: Vec<Vec<Rational>> = current.basis().iter().cloned().chain(std::iter::once(b.clone())).collect();
                current = Subspace::span(bundle.rank(), &vs).expect("same fiber");
                chosen.push((b.clone(), levels.clone()));
            }
        }
    }
    chosen
}

/// Closure of the cone's filtration steps under `∩` and `+`, then a scan for
/// a triple violating `a ∩ (b + c) = (a ∩ b) + (a ∩ c)`. `None` when the
/// family is distributive or the closure exceeds the size cap.
fn distributivity_witness(bundle: &ToricBundle, rays: &[usize]) -> Option<IncompatibilityWitness> {
    let mut elements: BTreeSet<Subspace> = BTreeSet::new();
    for &rho in rays {
        for (_, s) in bundle.filtration(rho).steps() {
            elements.insert(s.clone());
        }
    }
    elements.insert(Subspace::zero(bundle.rank()));
    loop {
        let list: Vec<Subspace> = elements.iter().cloned().collect();
        let mut added = false;
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                for s in [list[i].intersect(&list[j]).ok()?, list[i].sum(&list[j]).ok()?] {
                    added |= elements.insert(s);
                }
                if elements.len() > MAX_LATTICE_CLOSURE {
                    return None;
                }
            }
        }
        if !added {
            break;
        }
    }
    let list: Vec<Subspace> = elements.into_iter().collect();
    let n = list.len();
    let index: BTreeMap<&Subspace, usize> = list.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut meet = vec![vec![0usize; n]; n];
    let mut join = vec![vec![0usize; n]; n];
    let mut le = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            meet[i][j] = index[&list[i].intersect(&list[j]).ok()?];
            join[i][j] = index[&list[i].sum(&list[j]).ok()?];
            le[i][j] = list[i].is_subspace_of(&list[j]);
        }
    }
    let comparable = |a: usize, b: usize| le[a][b] || le[b][a];
    for a in 0..n {
        for b in 0..n {
            if comparable(a, b) {
                continue;
            }
            for c in b + 1..n {
                if comparable(a, c) || comparable(b, c) {
                    continue;
                }
                if meet[a][join[b][c]] != join[meet[a][b]][meet[a][c]] {
                    return Some(IncompatibilityWitness::NonDistributive {
                        a: list[a].clone(),
                        b: list[b].clone(),
                        c: list[c].clone(),
                    });
                }
            }
        }
    }
    None
}

/// Decides whether the ray filtrations of `cone` admit a compatible grading
/// and constructs it.
///
/// Pipeline: dimension count of the greedy graded complements (fast
/// rejection), distributivity of the generated subspace lattice, integral
/// characters for each splitting vector, and finally a reconstruction of
/// every filtration step from the grading, which is the authoritative check.
pub fn check_compatibility(bundle: &ToricBundle, cone: &Cone) -> std::result::Result<ConeGrading, IncompatibilityWitness> {
    let rays = &cone.ray_indices;
    let rank = bundle.rank();
    let chosen = graded_complements(bundle, rays);
    if chosen.len() != rank {
        return Err(distributivity_witness(bundle, rays)
            .unwrap_or(IncompatibilityWitness::DimensionDeficit { found: chosen.len(), rank }));
    }
    if let Some(w) = distributivity_witness(bundle, rays) {
        return Err(w);
    }

    let fan = bundle.fan();
    let n = fan.lattice_rank();
    let system: Vec<Vec<BigInt>> =
        rays.iter().map(|&rho| fan.ray(rho).iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut basis = Vec::with_capacity(rank);
    for (v, profile) in chosen {
        let rhs: Vec<BigInt> = profile.iter().map(|&j| BigInt::from(j)).collect();
        let chi = integral_solve(&system, &rhs, n)
            .and_then(|x| x.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<i64>>>())
            .ok_or_else(|| IncompatibilityWitness::NonIntegralCharacter { profile: profile.clone() })?;
        basis.push((v, chi));
    }

    let mut grouped: BTreeMap<Vec<i64>, Vec<Vec<Rational>>> = BTreeMap::new();
    for (v, chi) in &basis {
        grouped.entry(chi.clone()).or_default().push(v.clone());
    }
    let pieces = grouped
        .into_iter()
        .map(|(chi, vs)| (chi, Subspace::span_unchecked(rank, vs)))
        .collect();
    let grading = ConeGrading { cone: cone.clone(), pieces, basis };

    for &rho in rays {
        let f = bundle.filtration(rho);
        let mut levels: Vec<i64> = f.jumps().iter().flat_map(|&j| [j, j + 1]).collect();
        if let Some(lo) = f.min_jump() {
            levels.push(lo - 1);
        }
        for j in levels {
            if grading.step(fan.ray(rho), j) != f.at(j) {
                return Err(IncompatibilityWitness::Reconstruction { ray: rho, level: j });
            }
        }
    }
    Ok(grading)
}

/// Gradings for every maximal cone, in cone order.
pub fn check_all_cones(bundle: &ToricBundle) -> Result<Vec<ConeGrading>> {
    (0..bundle.fan().max_cones().len())
        .map(|c| {
            check_compatibility(bundle, &bundle.fan().cone(c))
                .map_err(|witness| Error::Incompatible { cone: c, witness })
        })
        .collect()
}

/// `φ_e(n)` for an arbitrary lattice vector: decompose `e` in the grading of
/// the lowest-index maximal cone containing `n` and take the least pairing
/// over the nonzero components.
pub fn phi_general(bundle: &ToricBundle, gradings: &[ConeGrading], e: &[Rational], n: &[i64]) -> Result<i64> {
    if e.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    let membership = bundle.fan().containing_cone(&to_rational_vec(n))?;
    let grading = gradings
        .get(membership.cone)
        .ok_or_else(|| Error::Internal("missing grading for cone".into()))?;
    let rank = bundle.rank();
    // columns are the splitting vectors
    let rows: Vec<Vec<Rational>> = (0..rank)
        .map(|i| grading.basis.iter().map(|(v, _)| v[i].clone()).collect())
        .collect();
    let coords = solve(&rows, e, grading.basis.len())
        .ok_or_else(|| Error::Internal("grading basis does not span the fiber".into()))?;
    coords
        .iter()
        .zip(&grading.basis)
        .filter(|(c, _)| !c.is_zero())
        .map(|(_, (_, chi))| pairing(chi, n))
        .min()
        .ok_or(Error::ZeroVector)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Filtration;
    use crate::fan::Fan;

    fn line_step(r: usize, v: &[i64]) -> Filtration {
        let line = Subspace::span(r, &[to_rational_vec(v)]).unwrap();
        Filtration::new(r, vec![(0, Subspace::full(r)), (1, line)]).unwrap()
    }

    /// Rank-2 data on the positive octant of `Q^3` whose three filtrations
    /// drop to three distinct lines at level 1.
    fn three_lines() -> ToricBundle {
        let fan = Fan::new(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            vec![vec![0, 1, 2]],
        );
        ToricBundle::new(fan, 2, vec![line_step(2, &[1, 0]), line_step(2, &[0, 1]), line_step(2, &[1, 1])])
            .unwrap()
    }

    #[test]
    fn single_ray_cones_always_split() {
        let b = three_lines();
        for rho in 0..3 {
            let g = check_compatibility(&b, &Cone { ray_indices: vec![rho] }).unwrap();
            assert_eq!(g.basis.len(), 2);
        }
    }

    #[test]
    fn three_lines_in_a_plane_are_incompatible() {
        let b = three_lines();
        let err = check_compatibility(&b, &b.fan().cone(0)).unwrap_err();
        assert!(matches!(err, IncompatibilityWitness::NonDistributive { .. }), "{err:?}");
        assert!(matches!(check_all_cones(&b), Err(Error::Incompatible { cone: 0, .. })));
    }

    #[test]
    fn tangent_plane_grading() {
        let tp2 = ToricBundle::tangent(&Fan::projective_plane()).unwrap();
        let g = check_compatibility(&tp2, &tp2.fan().cone(0)).unwrap();
        assert_eq!(tp2.fan().max_cones()[0], vec![1, 2]);
        let expected = vec![
            (vec![0, 1], Subspace::span(2, &[to_rational_vec(&[0, 1])]).unwrap()),
            (vec![1, 0], Subspace::span(2, &[to_rational_vec(&[1, 0])]).unwrap()),
        ];
        assert_eq!(g.pieces, expected);
        assert_eq!(check_all_cones(&tp2).unwrap().len(), 3);
    }

    #[test]
    fn singular_cone_with_non_integral_character() {
        // cone spanned by (1,0) and (1,2) has index 2; a line bundle jumping at
        // (1, 0) on those rays needs χ = (1, -1/2)
        let fan = Fan::new(2, vec![vec![1, 0], vec![1, 2]], vec![vec![0, 1]]);
        let b = ToricBundle::line_bundle(&fan, &[1, 0]).unwrap();
        let err = check_compatibility(&b, &fan.cone(0)).unwrap_err();
        assert_eq!(err, IncompatibilityWitness::NonIntegralCharacter { profile: vec![1, 0] });
    }

    #[test]
    fn phi_general_examples() {
        let tp2 = ToricBundle::tangent(&Fan::projective_plane()).unwrap();
        let gradings = check_all_cones(&tp2).unwrap();
        let e = to_rational_vec(&[1, 0]);
        assert_eq!(phi_general(&tp2, &gradings, &e, &[1, 1]).unwrap(), 1);
        assert_eq!(phi_general(&tp2, &gradings, &e, &[0, 0]).unwrap(), 0);
        for rho in 0..3 {
            let v = tp2.fan().ray(rho).to_vec();
            for e in [[1, 0], [0, 1], [1, 1], [2, -3]] {
                let e = to_rational_vec(&e);
                assert_eq!(phi_general(&tp2, &gradings, &e, &v).unwrap(), tp2.phi_ray(&e, rho).unwrap());
            }
        }
    }
}
