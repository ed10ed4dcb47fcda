use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::check_budget;
use crate::bundle::filter_lattice_nonempty;
use crate::bundle::sym::{multiply, sym_dim, MonomialBasis};
use crate::bundle::{GroundSet, ToricBundle};
use crate::error::{Error, Result};
use crate::polyhedra::{extreme_points, rat, unimodular_split, AffineHull, HPolytope, Rational, Subspace, UnimodularSplit};

/// Lower bound for `L(X, E)` accumulated over symmetric powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LSubspace {
    pub span: Subspace,
    pub p_reached: usize,
    /// Full span, or two consecutive degrees that added nothing.
    pub stabilized: bool,
}

impl LSubspace {
    pub fn dim(&self) -> usize {
        self.span.dim()
    }
}

fn absorb(span: &mut Subspace, poly: &HPolytope) {
    if let AffineHull::Hull { span: s, .. } = poly.affine_hull() {
        *span = span.sum(&s).expect("same lattice");
    }
}

/// Accumulates the direction spaces of `Δ_f` for ground-set elements of
/// `Sym^p E`, `p = 1..=p_max`, and for pairwise products of lower-degree
/// ground-set elements. Degrees whose symmetric power exceeds `budget` are not
/// visited.
pub fn l_subspace(bundle: &ToricBundle, p_max: usize, budget: usize) -> Result<LSubspace> {
    let n = bundle.fan().lattice_rank();
    let r = bundle.rank();
    let mut span = Subspace::zero(n);
    let mut grounds: Vec<(MonomialBasis, GroundSet)> = Vec::new();
    let mut quiet = 0;
    let mut p_reached = 0;
    let mut stabilized = false;
    for p in 1..=p_max {
        if sym_dim(r, p) > budget {
            break;
        }
        let sym = bundle.sym_power(p)?;
        let gs = GroundSet::of(&sym, p);
        let target = MonomialBasis::new(r, p);
        let before = span.dim();
        for e in &gs.elements {
            absorb(&mut span, &sym.polytope_of(e)?);
        }
        for a in 1..=p / 2 {
            let (fb, fs) = &grounds[a - 1];
            let (gb, gset) = &grounds[p - a - 1];
            for f in &fs.elements {
                for g in &gset.elements {
                    let prod = multiply(f, fb, g, gb, &target);
                    absorb(&mut span, &sym.polytope_of(&prod)?);
                }
            }
        }
        grounds.push((target, gs));
        p_reached = p;
        if span.is_full() {
            stabilized = true;
            break;
        }
        quiet = if span.dim() == before { quiet + 1 } else { 0 };
        if quiet >= 2 {
            stabilized = true;
            break;
        }
    }
    Ok(LSubspace { span, p_reached, stabilized })
}

/// Generators of `Sym^p E` with lattice points, and their images `w_f` in
/// `M_Q / L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    pub p: usize,
    pub l: LSubspace,
    pub split: UnimodularSplit,
    pub generators: Vec<Vec<Rational>>,
    /// `(generator index, w_f)` in quotient coordinates.
    pub points: Vec<(usize, Vec<Rational>)>,
    /// Extreme points of `{w_f}`.
    pub hull_vertices: Vec<Vec<Rational>>,
}

pub fn weight_table(bundle: &ToricBundle, p: usize, l: &LSubspace) -> Result<WeightTable> {
    let sym = bundle.sym_power(p)?;
    let gens = filter_lattice_nonempty(&sym, &GroundSet::of(&sym, p))?;
    if gens.is_empty() {
        return Err(Error::NoGenerators(p));
    }
    let split = unimodular_split(&l.span);
    let mut points = Vec::with_capacity(gens.len());
    for (i, f) in gens.elements.iter().enumerate() {
        let poly = sym.polytope_of(f)?;
        let within = poly.affine_hull().span().is_some_and(|s| s.is_subspace_of(&l.span));
        if !within {
            return Err(Error::LUnderestimated { generator: i });
        }
        let pt = poly
            .lattice_points()?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Internal("generator without lattice point".into()))?;
        let pt: Vec<Rational> = pt.into_iter().map(rat).collect();
        points.push((i, split.quotient_coordinates(&pt)));
    }
    let ws: Vec<Vec<Rational>> = points.iter().map(|(_, w)| w.clone()).collect();
    Ok(WeightTable {
        p,
        l: l.clone(),
        split,
        generators: gens.elements,
        points,
        hull_vertices: extreme_points(&ws),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedRow {
    pub l: usize,
    /// `(w, dim A_(w,l))`, sorted by `w`.
    pub buckets: Vec<(Vec<Rational>, usize)>,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDims {
    pub p: usize,
    pub rows: Vec<GradedRow>,
}

fn add_rational(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `dim A_(w,l)`: the span in `Sym^{pl} E` of the monomials `f^c` in the
/// generators with `Σ c_i = l` and `Σ c_i w_{f_i} = w`.
pub fn graded_dims(bundle: &ToricBundle, table: &WeightTable, l_max: usize, budget: usize) -> Result<GradedDims> {
    let r = bundle.rank();
    let p = table.p;
    check_budget(r, p * l_max, budget)?;
    let base = MonomialBasis::new(r, p);
    let ws: Vec<&Vec<Rational>> = table.points.iter().map(|(_, w)| w).collect();
    let mut level: BTreeMap<Vec<Rational>, Subspace> = BTreeMap::new();
    {
        let mut buckets: BTreeMap<Vec<Rational>, Vec<Vec<Rational>>> = BTreeMap::new();
        for (f, w) in table.generators.iter().zip(&ws) {
            buckets.entry((*w).clone()).or_default().push(f.clone());
        }
        for (w, vs) in buckets {
            level.insert(w, Subspace::span_unchecked(base.len(), vs));
        }
    }
    let row = |l: usize, level: &BTreeMap<Vec<Rational>, Subspace>| GradedRow {
        l,
        buckets: level.iter().map(|(w, s)| (w.clone(), s.dim())).collect(),
        total: level.values().map(Subspace::dim).sum(),
    };
    let mut rows = vec![row(1, &level)];
    let mut current = base.clone();
    for l in 2..=l_max {
        let target = MonomialBasis::new(r, current.degree() + p);
        let mut buckets: BTreeMap<Vec<Rational>, Vec<Vec<Rational>>> = BTreeMap::new();
        for (w, space) in &level {
            for (f, wf) in table.generators.iter().zip(&ws) {
                let bucket = buckets.entry(add_rational(w, wf)).or_default();
                for g in space.basis() {
                    bucket.push(multiply(g, &current, f, &base, &target));
                }
            }
        }
        level = buckets
            .into_iter()
            .map(|(w, vs)| (w, Subspace::span_unchecked(target.len(), vs)))
            .collect();
        rows.push(row(l, &level));
        current = target;
    }
    Ok(GradedDims { p, rows })
}

/// Finite-`l` view of `α(p, X, E)`. This is an estimator; a limsup cannot be
/// decided from finitely many terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaEstimate {
    /// `dim X - dim L + rk E - 1`.
    pub d_alpha: i64,
    /// `Σ_w dim A_(w,l) / l^{d_alpha}` for `l = 1..=l_max`.
    pub sequence: Vec<Rational>,
    /// Maximum of the sequence over `l > l_max / 2`.
    pub estimate: Rational,
}

pub fn d_alpha(bundle: &ToricBundle, l: &LSubspace) -> i64 {
    bundle.fan().lattice_rank() as i64 - l.dim() as i64 + bundle.rank() as i64 - 1
}

pub fn alpha_estimate(graded: &GradedDims, d_alpha: i64) -> Result<AlphaEstimate> {
    if d_alpha < 0 {
        return Err(Error::ShapeMismatch(format!("negative growth exponent {d_alpha}")));
    }
    let sequence: Vec<Rational> = graded
        .rows
        .iter()
        .map(|row| {
            let denom = num_traits::pow(BigInt::from(row.l), d_alpha as usize);
            Rational::new(BigInt::from(row.total), denom)
        })
        .collect();
    let l_max = sequence.len();
    let estimate = sequence
        .iter()
        .enumerate()
        .filter(|(i, _)| i + 1 > l_max / 2)
        .map(|(_, v)| v.clone())
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(AlphaEstimate { d_alpha, sequence, estimate })
}

/// Least-squares slope of `log total` against `log l` over `l > l_max / 2`.
pub(crate) fn tail_growth_exponent(graded: &GradedDims) -> Option<f64> {
    let l_max = graded.rows.len();
    let pts: Vec<(f64, f64)> = graded
        .rows
        .iter()
        .filter(|row| row.l > l_max / 2 && row.total > 0)
        .map(|row| ((row.l as f64).ln(), (row.total as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::Fan;
    use crate::polyhedra::{ratio, to_rational_vec};
    use crate::sections::DEFAULT_BUDGET;

    #[test]
    fn l_of_trivial_rank_two_is_zero() {
        let e = ToricBundle::trivial(&Fan::projective_line(), 2).unwrap();
        let l = l_subspace(&e, 4, DEFAULT_BUDGET).unwrap();
        assert!(l.span.is_zero());
        assert!(l.stabilized);
        assert_eq!(l.p_reached, 2);
    }

    #[test]
    fn l_of_o1_plus_o_is_full() {
        let e = ToricBundle::from_divisors(&Fan::projective_line(), &[vec![1, 0], vec![0, 0]]).unwrap();
        let l = l_subspace(&e, 1, DEFAULT_BUDGET).unwrap();
        assert!(l.span.is_full());
        assert_eq!(l.p_reached, 1);
    }

    #[test]
    fn l_of_tangent_plane_is_full() {
        let tp2 = ToricBundle::tangent(&Fan::projective_plane()).unwrap();
        let l = l_subspace(&tp2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(l.dim(), 2);
    }

    #[test]
    fn weights_for_full_l_are_empty_points() {
        let e = ToricBundle::from_divisors(&Fan::projective_line(), &[vec![1, 0], vec![1, 0]]).unwrap();
        let l = l_subspace(&e, 2, DEFAULT_BUDGET).unwrap();
        let t = weight_table(&e, 1, &l).unwrap();
        assert!(t.split.quotient.is_empty());
        assert!(t.points.iter().all(|(_, w)| w.is_empty()));
        assert_eq!(t.hull_vertices, vec![Vec::<Rational>::new()]);
    }

    #[test]
    fn weights_for_o_plus_negative_line() {
        let e = ToricBundle::from_divisors(&Fan::projective_line(), &[vec![0, 0], vec![-2, 0]]).unwrap();
        let l = l_subspace(&e, 3, DEFAULT_BUDGET).unwrap();
        assert!(l.span.is_zero());
        let t = weight_table(&e, 1, &l).unwrap();
        assert_eq!(t.generators, vec![to_rational_vec(&[1, 0])]);
        assert_eq!(t.points, vec![(0, vec![rat(0)])]);
    }

    #[test]
    fn underestimated_l_is_refused() {
        let e = ToricBundle::line_bundle(&Fan::projective_line(), &[1, 0]).unwrap();
        let fake = LSubspace { span: Subspace::zero(1), p_reached: 0, stabilized: false };
        assert!(matches!(weight_table(&e, 1, &fake), Err(Error::LUnderestimated { generator: 0 })));
    }

    #[test]
    fn graded_dims_of_o1_plus_o1() {
        let e = ToricBundle::from_divisors(&Fan::projective_line(), &[vec![1, 0], vec![1, 0]]).unwrap();
        let l = l_subspace(&e, 2, DEFAULT_BUDGET).unwrap();
        let t = weight_table(&e, 1, &l).unwrap();
        let g = graded_dims(&e, &t, 6, DEFAULT_BUDGET).unwrap();
        for row in &g.rows {
            assert_eq!(row.buckets.len(), 1);
            assert_eq!(row.total, row.l + 1);
        }
        let a = alpha_estimate(&g, d_alpha(&e, &l)).unwrap();
        assert_eq!(a.d_alpha, 1);
        assert_eq!(a.sequence[1], ratio(3, 2));
    }

    #[test]
    fn graded_dims_ignore_generator_order() {
        let tp2 = ToricBundle::tangent(&Fan::projective_plane()).unwrap();
        let l = l_subspace(&tp2, 2, DEFAULT_BUDGET).unwrap();
        let t = weight_table(&tp2, 1, &l).unwrap();
        let mut reversed = t.clone();
        reversed.generators.reverse();
        reversed.points.reverse();
        let a = graded_dims(&tp2, &t, 4, DEFAULT_BUDGET).unwrap();
        let b = graded_dims(&tp2, &reversed, 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn alpha_for_trivial_line_bundle_decays() {
        let e = ToricBundle::trivial(&Fan::projective_line(), 1).unwrap();
        let l = l_subspace(&e, 3, DEFAULT_BUDGET).unwrap();
        let t = weight_table(&e, 1, &l).unwrap();
        let g = graded_dims(&e, &t, 10, DEFAULT_BUDGET).unwrap();
        let a = alpha_estimate(&g, d_alpha(&e, &l)).unwrap();
        assert_eq!(a.d_alpha, 1);
        for (i, v) in a.sequence.iter().enumerate() {
            assert_eq!(*v, ratio(1, i as i64 + 1));
        }
        assert_eq!(a.estimate, ratio(1, 6));
    }
}
