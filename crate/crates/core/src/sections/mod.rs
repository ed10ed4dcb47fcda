//! Global sections, products of sections, the subspace `L(X, E)`, the graded
//! algebra generated by a ground set and bigness verdicts.

mod bigness;
mod growth;

pub use bigness::{
    big_certificate_search, big_split, bigness_report, BigCertificate, BignessParams, BignessReport, CorollaryWitness,
    SearchOutcome, SplitDecision, Verdict, WitnessOrigin,
};
pub use growth::{
    alpha_estimate, d_alpha, graded_dims, l_subspace, weight_table, AlphaEstimate, GradedDims, GradedRow, LSubspace,
    WeightTable,
};

use std::collections::BTreeMap;

use crate::bundle::sym::{multiply, sym_dim, MonomialBasis};
use crate::bundle::ToricBundle;
use crate::error::{Error, Result};
use crate::polyhedra::{rat, HPolytope, Rational, Subspace};

/// Cap on the dimension of symmetric powers materialized by a computation.
pub const DEFAULT_BUDGET: usize = 2000;

pub(crate) fn check_budget(rank: usize, degree: usize, budget: usize) -> Result<()> {
    let needed = sym_dim(rank, degree);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// `H⁰(X, E) = ⊕_u χ^{-u} ⊗ E^u`, listed by weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionSpace {
    /// Weights `u` with `E^u ≠ 0`, sorted lexicographically.
    pub entries: Vec<(Vec<i64>, Subspace)>,
    pub total_dim: usize,
}

/// `{u : ⟨u, v_ρ⟩ ≤ max jump of ρ}`; every weight with `E^u ≠ 0` lies in it.
fn support_region(bundle: &ToricBundle) -> Result<Option<HPolytope>> {
    let mut offsets = Vec::with_capacity(bundle.filtrations().len());
    for f in bundle.filtrations() {
        match f.max_jump() {
            Some(j) => offsets.push(rat(j)),
            None => return Ok(None),
        }
    }
    let fan = bundle.fan();
    Ok(Some(HPolytope::new(fan.lattice_rank(), fan.rays().to_vec(), offsets)?))
}

pub fn weight_space(bundle: &ToricBundle, u: &[i64]) -> Subspace {
    bundle.weight_space(u)
}

pub fn h0(bundle: &ToricBundle) -> Result<SectionSpace> {
    let Some(region) = support_region(bundle)? else {
        return Ok(SectionSpace { entries: Vec::new(), total_dim: 0 });
    };
    let points = region.lattice_points().map_err(|e| match e {
        Error::UnboundedPolytope => Error::UnboundedSupport,
        other => other,
    })?;
    let entries: Vec<(Vec<i64>, Subspace)> = points
        .into_iter()
        .map(|u| {
            let s = bundle.weight_space(&u);
            (u, s)
        })
        .filter(|(_, s)| !s.is_zero())
        .collect();
    let total_dim = entries.iter().map(|(_, s)| s.dim()).sum();
    Ok(SectionSpace { entries, total_dim })
}

fn add_weights(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Dimensions of the images of `S^l H⁰(Sym^p E) → H⁰(Sym^{pl} E)` for
/// `l = 1..=l_max`. Products are grouped by total weight; pieces of distinct
/// weight are independent, so the image dimension is the sum over weights.
pub fn image_dims(bundle: &ToricBundle, p: usize, l_max: usize, budget: usize) -> Result<Vec<usize>> {
    if p == 0 || l_max == 0 {
        return Err(Error::ShapeMismatch("p and l must be positive".into()));
    }
    check_budget(bundle.rank(), p * l_max, budget)?;
    let sym = bundle.sym_power(p)?;
    let sections = h0(&sym)?;
    let r = bundle.rank();
    let base = MonomialBasis::new(r, p);
    let mut level: BTreeMap<Vec<i64>, Subspace> = sections.entries.iter().cloned().collect();
    let mut dims = vec![sections.total_dim];
    let mut current_basis = base.clone();
    for _ in 2..=l_max {
        let target = MonomialBasis::new(r, current_basis.degree() + p);
        let mut products: BTreeMap<Vec<i64>, Vec<Vec<Rational>>> = BTreeMap::new();
        for (u_total, space) in &level {
            for (u, piece) in &sections.entries {
                let bucket = products.entry(add_weights(u_total, u)).or_default();
                for f in space.basis() {
                    for g in piece.basis() {
                        bucket.push(multiply(f, &current_basis, g, &base, &target));
                    }
                }
            }
        }
        level = products
            .into_iter()
            .map(|(u, vs)| (u, Subspace::span_unchecked(target.len(), vs)))
            .collect();
        dims.push(level.values().map(Subspace::dim).sum());
        current_basis = target;
    }
    Ok(dims)
}

/// `dim Im(S^l H⁰(Sym^p E) → H⁰(Sym^{pl} E))`.
pub fn image_dim(bundle: &ToricBundle, p: usize, l: usize, budget: usize) -> Result<usize> {
    Ok(*image_dims(bundle, p, l, budget)?.last().expect("l >= 1"))
}
