use std::collections::BTreeSet;

use super::ToricBundle;
use crate::error::Result;
use crate::polyhedra::{Rational, Subspace};

/// Finite set of fiber vectors of `Sym^degree E` whose section polytopes'
/// lattice points span the global sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    pub degree: usize,
    pub elements: Vec<Vec<Rational>>,
}

impl GroundSet {
    /// Echelon bases of every nonzero intersection `∩_ρ E^ρ(j_ρ)` of the
    /// given bundle, deduplicated and sorted.
    pub fn of(bundle: &ToricBundle, degree: usize) -> Self {
        let mut spaces: BTreeSet<Subspace> = BTreeSet::new();
        spaces.insert(Subspace::full(bundle.rank()));
        for f in bundle.filtrations() {
            let mut next = BTreeSet::new();
            for s in &spaces {
                for (_, step) in f.steps() {
                    let meet = s.intersect(step).expect("same fiber");
                    if !meet.is_zero() {
                        next.insert(meet);
                    }
                }
            }
            spaces = next;
        }
        let elements: BTreeSet<Vec<Rational>> =
            spaces.iter().flat_map(|s| s.basis().iter().cloned()).collect();
        Self { degree, elements: elements.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Ground set of `Sym^p E`.
pub fn ground_set(bundle: &ToricBundle, p: usize) -> Result<GroundSet> {
    let sym = bundle.sym_power(p)?;
    Ok(GroundSet::of(&sym, p))
}

/// Elements of a ground set whose polytope contains a lattice point. `sym`
/// must be the bundle the ground set was computed on.
pub fn filter_lattice_nonempty(sym: &ToricBundle, ground: &GroundSet) -> Result<GroundSet> {
    let mut elements = Vec::new();
    for e in &ground.elements {
        let poly = sym.polytope_of(e)?;
        if poly.feasible_point().is_some() && !poly.lattice_points()?.is_empty() {
            elements.push(e.clone());
        }
    }
    Ok(GroundSet { degree: ground.degree, elements })
}

/// Ground set of `Sym^p E` restricted to elements with `Δ_e ∩ M ≠ ∅`.
pub fn epsilon_bar(bundle: &ToricBundle, p: usize) -> Result<GroundSet> {
    let sym = bundle.sym_power(p)?;
    filter_lattice_nonempty(&sym, &GroundSet::of(&sym, p))
}
