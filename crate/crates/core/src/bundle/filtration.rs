use crate::error::{Error, Result};
use crate::polyhedra::{is_zero_vec, Rational, Subspace};

/// Decreasing, exhaustive `Z`-filtration of a fiber `Q^r`.
///
/// `steps[k] = (j_k, V_k)` with `j_0 < j_1 < …` and `V_0 = Q^r ⊋ V_1 ⊋ …`.
/// The step at level `j` is `V_k` for the least `k` with `j ≤ j_k`, and zero
/// above the last jump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    ambient_dim: usize,
    steps: Vec<(i64, Subspace)>,
}

impl Filtration {
    pub fn new(ambient_dim: usize, steps: Vec<(i64, Subspace)>) -> Result<Self> {
        if ambient_dim == 0 {
            if steps.iter().any(|(_, s)| s.ambient_dim() != 0) {
                return Err(Error::InvalidFiltration("step outside the zero fiber".into()));
            }
            return Ok(Self { ambient_dim, steps: Vec::new() });
        }
        let Some((_, first)) = steps.first() else {
            return Err(Error::InvalidFiltration("no steps".into()));
        };
        if !first.is_full() || first.ambient_dim() != ambient_dim {
            return Err(Error::InvalidFiltration("first step must be the whole fiber".into()));
        }
        for w in steps.windows(2) {
            let ((j0, a), (j1, b)) = (&w[0], &w[1]);
            if j1 <= j0 {
                return Err(Error::InvalidFiltration(format!("jumps {j0} and {j1} not increasing")));
            }
            if b.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, got: b.ambient_dim() });
            }
            if b.is_zero() || !b.is_subspace_of(a) || b == a {
                return Err(Error::InvalidFiltration(format!(
                    "step at jump {j1} is not a nonzero proper subspace of the step at {j0}"
                )));
            }
        }
        Ok(Self { ambient_dim, steps })
    }

    /// `E(j) = span{ b_k : w_k ≥ j }` for a basis `b` with integer weights.
    pub fn from_weighted_basis(ambient_dim: usize, weighted: &[(Vec<Rational>, i64)]) -> Result<Self> {
        let all: Vec<Vec<Rational>> = weighted.iter().map(|(v, _)| v.clone()).collect();
        let span = Subspace::span(ambient_dim, &all)?;
        if span.dim() != ambient_dim || weighted.len() != ambient_dim {
            return Err(Error::InvalidFiltration("weighted vectors do not form a basis".into()));
        }
        let mut levels: Vec<i64> = weighted.iter().map(|(_, w)| *w).collect();
        levels.sort_unstable();
        levels.dedup();
        let steps = levels
            .into_iter()
            .map(|j| {
                let vs: Vec<Vec<Rational>> =
                    weighted.iter().filter(|(_, w)| *w >= j).map(|(v, _)| v.clone()).collect();
                (j, Subspace::span_unchecked(ambient_dim, vs))
            })
            .collect();
        Self::new(ambient_dim, steps)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn steps(&self) -> &[(i64, Subspace)] {
        &self.steps
    }

    pub fn jumps(&self) -> Vec<i64> {
        self.steps.iter().map(|(j, _)| *j).collect()
    }

    pub fn min_jump(&self) -> Option<i64> {
        self.steps.first().map(|(j, _)| *j)
    }

    pub fn max_jump(&self) -> Option<i64> {
        self.steps.last().map(|(j, _)| *j)
    }

    pub fn at(&self, j: i64) -> Subspace {
        self.steps
            .iter()
            .find(|(jump, _)| j <= *jump)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| Subspace::zero(self.ambient_dim))
    }

    /// Largest `j` with `e ∈ E(j)`.
    pub fn phi(&self, e: &[Rational]) -> Result<i64> {
        if e.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, got: e.len() });
        }
        if is_zero_vec(e) {
            return Err(Error::ZeroVector);
        }
        self.steps
            .iter()
            .rev()
            .find(|(_, s)| s.contains(e))
            .map(|(j, _)| *j)
            .ok_or_else(|| Error::Internal("vector outside the first step".into()))
    }

    /// Basis adapted to the filtration: echelon basis of the deepest step,
    /// then extended step by step outward. Weights are the `φ` values.
    pub fn adapted_basis(&self) -> Vec<(Vec<Rational>, i64)> {
        let mut chosen: Vec<(Vec<Rational>, i64)> = Vec::with_capacity(self.ambient_dim);
        let mut span = Subspace::zero(self.ambient_dim);
        for (j, step) in self.steps.iter().rev() {
            for v in step.basis() {
                if !span.contains(v) {
                    span = Subspace::span_unchecked(
                        self.ambient_dim,
                        span.basis().iter().chain(std::iter::once(v)).cloned().collect(),
                    );
                    chosen.push((v.clone(), *j));
                }
            }
        }
        chosen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::to_rational_vec;

    fn tangent_step(v: &[i64]) -> Filtration {
        let line = Subspace::span(2, &[to_rational_vec(v)]).unwrap();
        Filtration::new(2, vec![(0, Subspace::full(2)), (1, line)]).unwrap()
    }

    #[test]
    fn levels_and_phi() {
        let f = tangent_step(&[1, 0]);
        assert!(f.at(-5).is_full());
        assert!(f.at(0).is_full());
        assert_eq!(f.at(1).dim(), 1);
        assert!(f.at(2).is_zero());
        assert_eq!(f.phi(&to_rational_vec(&[1, 0])).unwrap(), 1);
        assert_eq!(f.phi(&to_rational_vec(&[1, 1])).unwrap(), 0);
        assert!(matches!(f.phi(&to_rational_vec(&[0, 0])), Err(Error::ZeroVector)));
    }

    #[test]
    fn rejects_bad_steps() {
        let line = Subspace::span(2, &[to_rational_vec(&[1, 0])]).unwrap();
        assert!(Filtration::new(2, vec![(0, line.clone())]).is_err());
        assert!(Filtration::new(2, vec![(1, Subspace::full(2)), (1, line.clone())]).is_err());
        assert!(Filtration::new(2, vec![(0, Subspace::full(2)), (1, Subspace::full(2))]).is_err());
        assert!(Filtration::new(2, vec![(0, Subspace::full(2)), (1, Subspace::zero(2))]).is_err());
        assert!(Filtration::new(2, vec![]).is_err());
    }

    #[test]
    fn adapted_basis_round_trips() {
        let f = tangent_step(&[1, 1]);
        let adapted = f.adapted_basis();
        assert_eq!(adapted.len(), 2);
        assert_eq!(adapted[0].1, 1);
        assert_eq!(Filtration::from_weighted_basis(2, &adapted).unwrap(), f);
    }

    #[test]
    fn monotone_over_padded_range() {
        let f = Filtration::from_weighted_basis(
            3,
            &[(to_rational_vec(&[1, 0, 0]), -2), (to_rational_vec(&[0, 1, 0]), 3), (to_rational_vec(&[0, 0, 1]), 3)],
        )
        .unwrap();
        assert_eq!(f.jumps(), vec![-2, 3]);
        for j in -4..6 {
            assert!(f.at(j + 1).is_subspace_of(&f.at(j)));
        }
        assert!(f.at(-3).is_full());
        assert!(f.at(4).is_zero());
    }
}
