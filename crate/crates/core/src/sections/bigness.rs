use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::growth::{d_alpha, tail_growth_exponent};
use super::{alpha_estimate, graded_dims, image_dims, l_subspace, weight_table};
use super::{AlphaEstimate, GradedDims, LSubspace, WeightTable, DEFAULT_BUDGET};
use crate::bundle::sym::{multiply, sym_dim, MonomialBasis};
use crate::bundle::{check_all_cones, GroundSet, Provenance, ToricBundle};
use crate::error::{Error, Result};
use crate::polyhedra::lp::{LinearProgram, LpOutcome, Relation};
use crate::polyhedra::{clear_denominators, l1_norm, rat, Rational, Slack};

/// Outcome of the exact split-bundle program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitDecision {
    pub big: bool,
    /// `s*`.
    pub optimum: Rational,
    /// Optimal `u`.
    pub u: Vec<Rational>,
    /// Optimal `c`, summing to 1.
    pub combination: Vec<Rational>,
    /// `c` scaled to a primitive nonnegative integer vector.
    pub certificate: Vec<BigInt>,
}

impl SplitDecision {
    /// Total degree of the monomial `x^certificate`.
    pub fn degree(&self) -> BigInt {
        self.certificate.iter().sum()
    }
}

/// Maximizes the uniform slack `s` over `u` and convex combinations `c` of
/// the summand divisors. Big iff `s* > 0`.
pub fn big_split(bundle: &ToricBundle) -> Result<SplitDecision> {
    let Provenance::Split { coefficients } = bundle.provenance() else {
        return Err(Error::WrongProvenance);
    };
    let t = coefficients.len();
    if t == 0 {
        return Err(Error::EmptyOperand);
    }
    let fan = bundle.fan();
    let n = fan.lattice_rank();
    // variables: u (free), s (free), c (nonnegative)
    let mut lp = LinearProgram::new(n + 1 + t);
    lp.objective[n] = Rational::one();
    for k in 0..t {
        lp.nonnegative[n + 1 + k] = true;
    }
    for (rho, v) in fan.rays().iter().enumerate() {
        let mut row: Vec<Rational> = v.iter().map(|&x| rat(x)).collect();
        row.push(rat(l1_norm(v)));
        row.extend(coefficients.iter().map(|a| -rat(a[rho])));
        lp.add(row, Relation::Le, Rational::zero());
    }
    let mut simplex = vec![Rational::zero(); n + 1];
    simplex.extend(std::iter::repeat_n(Rational::one(), t));
    lp.add(simplex, Relation::Eq, Rational::one());
    match lp.maximize() {
        LpOutcome::Optimal { value, point } => {
            let combination = point[n + 1..].to_vec();
            let certificate = clear_denominators(&combination);
            Ok(SplitDecision {
                big: value.is_positive(),
                optimum: value,
                u: point[..n].to_vec(),
                combination,
                certificate,
            })
        }
        LpOutcome::Unbounded => Err(Error::UnboundedSupport),
        LpOutcome::Infeasible => Err(Error::Internal("split program infeasible".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessOrigin {
    /// `index` into the ground set of `Sym^degree E`.
    Ground { index: usize },
    /// Product of ground-set elements of two lower degrees.
    Product { left_degree: usize, left: usize, right_degree: usize, right: usize },
}

/// `f ∈ Sym^degree E` with full-dimensional `Δ_f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorollaryWitness {
    /// Coordinates in the graded-lex monomial basis of `Sym^degree`.
    pub element: Vec<Rational>,
    pub degree: usize,
    /// `φ_f(v_ρ)` per ray.
    pub phi: Vec<i64>,
    /// Positive optimum of the strict-feasibility program for `Δ_f`.
    pub slack: Slack,
    pub origin: WitnessOrigin,
}

/// Result of the certificate search. `witness = None` does not mean "not big".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub witness: Option<CorollaryWitness>,
    /// Highest degree fully searched.
    pub degree_reached: usize,
    /// Set when the budget stopped the search before `degree_bound`.
    pub truncated: bool,
}

fn test_candidate(sym: &ToricBundle, f: &[Rational], degree: usize, origin: WitnessOrigin) -> Result<Option<CorollaryWitness>> {
    let poly = sym.polytope_of(f)?;
    let slack = poly.strict_feasibility_slack();
    if !slack.is_positive() {
        return Ok(None);
    }
    let phi = sym.phi_values(f)?;
    Ok(Some(CorollaryWitness { element: f.to_vec(), degree, phi, slack, origin }))
}

/// Ground-set elements of `Sym^a E` for `a = 1..=degree_bound`, then
/// products of lower-degree ground-set elements, in that order per degree.
/// Candidates already tested at a degree are skipped.
pub fn big_certificate_search(bundle: &ToricBundle, degree_bound: usize, budget: usize) -> Result<SearchOutcome> {
    let r = bundle.rank();
    let mut grounds: Vec<(MonomialBasis, GroundSet)> = Vec::new();
    let mut degree_reached = 0;
    for a in 1..=degree_bound {
        if sym_dim(r, a) > budget {
            return Ok(SearchOutcome { witness: None, degree_reached, truncated: true });
        }
        let sym = bundle.sym_power(a)?;
        let gs = GroundSet::of(&sym, a);
        let target = MonomialBasis::new(r, a);
        let mut seen: BTreeSet<Vec<Rational>> = BTreeSet::new();
        for (index, e) in gs.elements.iter().enumerate() {
            seen.insert(e.clone());
            if let Some(w) = test_candidate(&sym, e, a, WitnessOrigin::Ground { index })? {
                return Ok(SearchOutcome { witness: Some(w), degree_reached: a, truncated: false });
            }
        }
        for left_degree in 1..=a / 2 {
            let right_degree = a - left_degree;
            let (fb, fs) = &grounds[left_degree - 1];
            let (gb, gset) = &grounds[right_degree - 1];
            for (left, f) in fs.elements.iter().enumerate() {
                for (right, g) in gset.elements.iter().enumerate() {
                    let prod = multiply(f, fb, g, gb, &target);
                    if !seen.insert(prod.clone()) {
                        continue;
                    }
                    let origin = WitnessOrigin::Product { left_degree, left, right_degree, right };
                    if let Some(w) = test_candidate(&sym, &prod, a, origin)? {
                        return Ok(SearchOutcome { witness: Some(w), degree_reached: a, truncated: false });
                    }
                }
            }
        }
        grounds.push((target, gs));
        degree_reached = a;
    }
    Ok(SearchOutcome { witness: None, degree_reached, truncated: false })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BigCertificate {
    Corollary(CorollaryWitness),
    SplitLp(SplitDecision),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    BigCertified(BigCertificate),
    /// Split program optimum `≤ 0`; the decision is in `BignessReport::split`.
    NotBigSplitCertified,
    /// Growth estimators only; not a decision.
    EvidencePositive,
    EvidenceInconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::BigCertified(_) => "BigCertified",
            Verdict::NotBigSplitCertified => "NotBigSplitCertified",
            Verdict::EvidencePositive => "EvidencePositive",
            Verdict::EvidenceInconclusive => "EvidenceInconclusive",
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Verdict::BigCertified(_) | Verdict::NotBigSplitCertified)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BignessParams {
    pub p: usize,
    pub l_max: usize,
    pub p_max: usize,
    pub degree_bound: usize,
    pub budget: usize,
}

impl Default for BignessParams {
    fn default() -> Self {
        Self { p: 1, l_max: 6, p_max: 3, degree_bound: 3, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BignessReport {
    /// `dim X + rk E - 1`.
    pub d: usize,
    pub d_alpha: i64,
    pub l: LSubspace,
    /// `image_dim(p, l)` for `l = 1..=l_max`.
    pub image_dims: Vec<usize>,
    /// Least-squares slope of `log image_dim` over the tail half.
    pub image_growth: Option<f64>,
    pub weights: Option<WeightTable>,
    pub graded: Option<GradedDims>,
    pub alpha: Option<AlphaEstimate>,
    /// Least-squares slope of `log Σ_w dim A_(w,l)` over the tail half.
    pub graded_growth: Option<f64>,
    pub split: Option<SplitDecision>,
    pub search: SearchOutcome,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

fn slope_of(values: &[usize]) -> Option<f64> {
    let rows = values
        .iter()
        .enumerate()
        .map(|(i, &total)| super::GradedRow { l: i + 1, buckets: Vec::new(), total })
        .collect();
    tail_growth_exponent(&GradedDims { p: 0, rows })
}

/// Collects the split decision, the certificate search and the growth
/// tables. Verdict precedence: certificates, then the split program, then
/// evidence.
///
/// Evidence is positive when either the image dimensions grow with slope at
/// least `d - 1/2`, or the graded totals grow with slope at least
/// `D_alpha - 1/2` while the α estimate is positive. Both slopes are fitted
/// over `l > l_max / 2`.
pub fn bigness_report(bundle: &ToricBundle, params: &BignessParams) -> Result<BignessReport> {
    let mut warnings = Vec::new();
    match bundle.fan().is_complete() {
        Ok(true) => {}
        Ok(false) => return Err(Error::InvalidFan("fan is not complete".into())),
        Err(Error::UnsupportedRank(r)) => warnings.push(format!("completeness not checked in rank {r}")),
        Err(e) => return Err(e),
    }
    check_all_cones(bundle)?;
    let n = bundle.fan().lattice_rank();
    let d = n + bundle.rank() - 1;

    let split = match bundle.provenance() {
        Provenance::Split { .. } => Some(big_split(bundle)?),
        _ => None,
    };
    let search = big_certificate_search(bundle, params.degree_bound, params.budget)?;
    if search.truncated {
        warnings.push(format!("certificate search stopped at degree {} by the budget", search.degree_reached));
    }
    let l = l_subspace(bundle, params.p_max, params.budget)?;
    if !l.stabilized {
        warnings.push(format!("L(X,E) not stabilized by p = {}; it is a lower bound", l.p_reached));
    }
    let dims = image_dims(bundle, params.p, params.l_max, params.budget)?;
    let image_growth = slope_of(&dims);
    let da = d_alpha(bundle, &l);

    let (weights, graded, alpha, graded_growth) = match weight_table(bundle, params.p, &l) {
        Ok(table) => {
            let g = graded_dims(bundle, &table, params.l_max, params.budget)?;
            let a = alpha_estimate(&g, da)?;
            let growth = tail_growth_exponent(&g);
            (Some(table), Some(g), Some(a), growth)
        }
        Err(e @ (Error::LUnderestimated { .. } | Error::NoGenerators(_))) => {
            warnings.push(format!("weight table unavailable: {e}"));
            (None, None, None, None)
        }
        Err(e) => return Err(e),
    };
    warnings.push("alpha is a finite-l estimator, not a decision".into());

    let verdict = if let Some(w) = &search.witness {
        Verdict::BigCertified(BigCertificate::Corollary(w.clone()))
    } else if let Some(s) = split.as_ref().filter(|s| s.big) {
        Verdict::BigCertified(BigCertificate::SplitLp(s.clone()))
    } else if split.is_some() {
        Verdict::NotBigSplitCertified
    } else {
        let half = 0.5;
        let by_image = image_growth.is_some_and(|g| g >= d as f64 - half);
        let by_alpha = alpha.as_ref().is_some_and(|a| a.estimate.is_positive())
            && graded_growth.is_some_and(|g| g >= da as f64 - half);
        if by_image || by_alpha {
            Verdict::EvidencePositive
        } else {
            Verdict::EvidenceInconclusive
        }
    };

    Ok(BignessReport {
        d,
        d_alpha: da,
        l,
        image_dims: dims,
        image_growth,
        weights,
        graded,
        alpha,
        graded_growth,
        split,
        search,
        verdict,
        warnings,
    })
}
