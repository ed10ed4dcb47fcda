use std::str::FromStr;

use klyachko::bundle::sym::sym_dim;
use klyachko::bundle::{check_all_cones, Provenance, ToricBundle};
use klyachko::polyhedra::{Rational, Slack, Subspace};
use klyachko::sections::{
    alpha_estimate, bigness_report, d_alpha, graded_dims, h0, image_dims, l_subspace,
    weight_table, AlphaEstimate, BigCertificate, BignessParams, CorollaryWitness, GradedDims, LSubspace,
    SearchOutcome, SplitDecision, Verdict, WitnessOrigin,
};
use klyachko::{Error, Result};
use serde_json::Value;

use crate::report::{big, bigs, display, display_f64, int, ints, matrix, nat, object, rational, rationals};

const ESTIMATOR: &str = "estimator, not decision";

#[derive(Clone, Debug)]
pub enum Command {
    Validate,
    H0 { sym: usize },
    Polytope { element: String, sym: usize },
    ImageDims { p: usize, l_max: usize },
    LSpan { p_max: usize },
    Weights { p: usize, p_max: usize },
    Alpha { p: usize, l_max: usize, p_max: usize },
    Big { degree_bound: usize, p: usize, l_max: usize, p_max: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::H0 { .. } => "h0",
            Command::Polytope { .. } => "polytope",
            Command::ImageDims { .. } => "image-dims",
            Command::LSpan { .. } => "l-span",
            Command::Weights { .. } => "weights",
            Command::Alpha { .. } => "alpha",
            Command::Big { .. } => "big",
        }
    }

    pub fn params(&self) -> Value {
        match self {
            Command::Validate => object([]),
            Command::H0 { sym } => object([("sym", nat(*sym))]),
            Command::Polytope { element, sym } => {
                object([("element", Value::String(element.clone())), ("sym", nat(*sym))])
            }
            Command::ImageDims { p, l_max } => object([("lmax", nat(*l_max)), ("p", nat(*p))]),
            Command::LSpan { p_max } => object([("pmax", nat(*p_max))]),
            Command::Weights { p, p_max } => object([("p", nat(*p)), ("pmax", nat(*p_max))]),
            Command::Alpha { p, l_max, p_max } => {
                object([("lmax", nat(*l_max)), ("p", nat(*p)), ("pmax", nat(*p_max))])
            }
            Command::Big { degree_bound, p, l_max, p_max } => object([
                ("degree_bound", nat(*degree_bound)),
                ("lmax", nat(*l_max)),
                ("p", nat(*p)),
                ("pmax", nat(*p_max)),
            ]),
        }
    }
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::ShapeMismatch(format!("--{name} must be at least 1")));
    }
    Ok(())
}

/// Results tree plus warnings produced by the computation.
pub fn run(cmd: &Command, bundle: &ToricBundle, budget: usize) -> Result<(Value, Vec<String>)> {
    let mut warnings = Vec::new();
    let results = match cmd {
        Command::Validate => validate(bundle)?,
        Command::H0 { sym } => {
            positive("sym", *sym)?;
            let s = sym_bundle(bundle, *sym, budget)?;
            let sections = h0(&s)?;
            let weights = sections
                .entries
                .iter()
                .map(|(u, space)| object([("u", ints(u)), ("dim", nat(space.dim())), ("basis", matrix(space.basis()))]))
                .collect();
            object([("sym", nat(*sym)), ("total_dim", nat(sections.total_dim)), ("weights", Value::Array(weights))])
        }
        Command::Polytope { element, sym } => {
            positive("sym", *sym)?;
            polytope(bundle, element, *sym, budget)?
        }
        Command::ImageDims { p, l_max } => {
            positive("p", *p)?;
            positive("lmax", *l_max)?;
            let dims = image_dims(bundle, *p, *l_max, budget)?;
            object([("p", nat(*p)), ("l_max", nat(*l_max)), ("dims", image_rows(&dims))])
        }
        Command::LSpan { p_max } => {
            positive("pmax", *p_max)?;
            let l = l_subspace(bundle, *p_max, budget)?;
            note_l(&l, &mut warnings);
            l_json(&l)
        }
        Command::Weights { p, p_max } => {
            positive("p", *p)?;
            positive("pmax", *p_max)?;
            require(bundle, *p, budget)?;
            let l = l_subspace(bundle, *p_max, budget)?;
            note_l(&l, &mut warnings);
            let t = weight_table(bundle, *p, &l)?;
            let generators = t
                .generators
                .iter()
                .zip(&t.points)
                .map(|(f, (i, w))| object([("index", nat(*i)), ("element", rationals(f)), ("w", rationals(w))]))
                .collect();
            object([
                ("p", nat(*p)),
                ("L", l_json(&l)),
                ("quotient_rank", nat(t.split.quotient.len())),
                ("quotient_functionals", Value::Array(t.split.quotient.iter().map(|r| bigs(r)).collect())),
                ("generators", Value::Array(generators)),
                ("hull_vertices", matrix(&t.hull_vertices)),
            ])
        }
        Command::Alpha { p, l_max, p_max } => {
            positive("p", *p)?;
            positive("lmax", *l_max)?;
            positive("pmax", *p_max)?;
            require(bundle, p * l_max, budget)?;
            let l = l_subspace(bundle, *p_max, budget)?;
            note_l(&l, &mut warnings);
            let t = weight_table(bundle, *p, &l)?;
            let g = graded_dims(bundle, &t, *l_max, budget)?;
            let a = alpha_estimate(&g, d_alpha(bundle, &l))?;
            object([
                ("p", nat(*p)),
                ("l_max", nat(*l_max)),
                ("L", l_json(&l)),
                ("graded", graded_json(&g)),
                ("alpha", alpha_json(&a)),
            ])
        }
        Command::Big { degree_bound, p, l_max, p_max } => {
            positive("degree-bound", *degree_bound)?;
            positive("p", *p)?;
            positive("lmax", *l_max)?;
            positive("pmax", *p_max)?;
            require(bundle, p * l_max, budget)?;
            let params = BignessParams { p: *p, l_max: *l_max, p_max: *p_max, degree_bound: *degree_bound, budget };
            let r = bigness_report(bundle, &params)?;
            warnings.extend(r.warnings.iter().cloned());
            let verdict = verdict_json(&r.verdict, r.split.as_ref(), r.image_growth, r.graded_growth);
            object([
                ("d", nat(r.d)),
                ("d_alpha", int(r.d_alpha)),
                ("L", l_json(&r.l)),
                ("image_dims", image_rows(&r.image_dims)),
                ("image_growth", growth_json(r.image_growth, "least-squares slope of log image_dim over l > l_max/2")),
                ("graded", r.graded.as_ref().map_or(Value::Null, graded_json)),
                ("graded_growth", growth_json(r.graded_growth, "least-squares slope of log graded total over l > l_max/2")),
                ("alpha", r.alpha.as_ref().map_or(Value::Null, alpha_json)),
                ("split", r.split.as_ref().map_or(Value::Null, split_json)),
                ("search", search_json(&r.search, *degree_bound)),
                ("verdict", verdict),
            ])
        }
    };
    Ok((results, warnings))
}

fn require(bundle: &ToricBundle, degree: usize, budget: usize) -> Result<()> {
    let needed = sym_dim(bundle.rank(), degree);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

fn sym_bundle(bundle: &ToricBundle, p: usize, budget: usize) -> Result<ToricBundle> {
    require(bundle, p, budget)?;
    bundle.sym_power(p)
}

fn validate(bundle: &ToricBundle) -> Result<Value> {
    let fan = bundle.fan();
    let gradings = check_all_cones(bundle)?;
    let cones = gradings
        .iter()
        .enumerate()
        .map(|(i, g)| {
            object([
                ("cone", nat(i)),
                ("rays", Value::Array(g.cone.ray_indices.iter().map(|&r| nat(r)).collect())),
                ("characters", Value::Array(g.pieces.iter().map(|(chi, _)| ints(chi)).collect())),
                ("piece_dims", Value::Array(g.pieces.iter().map(|(_, s)| nat(s.dim())).collect())),
            ])
        })
        .collect();
    let provenance = match bundle.provenance() {
        Provenance::Split { .. } => "split",
        _ => "klyachko",
    };
    Ok(object([
        ("lattice_rank", nat(fan.lattice_rank())),
        ("rays", nat(fan.rays().len())),
        ("max_cones", nat(fan.max_cones().len())),
        ("rank", nat(bundle.rank())),
        ("bundle_type", Value::String(provenance.into())),
        ("compatible", Value::Bool(true)),
        ("cones", Value::Array(cones)),
    ]))
}

pub fn parse_element(text: &str) -> Result<Vec<Rational>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            if t.ends_with("/0") {
                return Err(Error::ShapeMismatch(format!("zero denominator in {t:?}")));
            }
            Rational::from_str(t).map_err(|_| Error::ShapeMismatch(format!("cannot read {t:?} as a rational")))
        })
        .collect()
}

fn polytope(bundle: &ToricBundle, element: &str, sym: usize, budget: usize) -> Result<Value> {
    let s = sym_bundle(bundle, sym, budget)?;
    let e = parse_element(element)?;
    if e.len() != s.rank() {
        return Err(Error::DimensionMismatch { expected: s.rank(), got: e.len() });
    }
    if e.iter().all(|x| *x == Rational::from_integer(0.into())) {
        return Err(Error::ZeroVector);
    }
    let phi = s.phi_values(&e)?;
    let poly = s.polytope_of(&e)?;
    let rows = s
        .fan()
        .rays()
        .iter()
        .zip(&phi)
        .enumerate()
        .map(|(i, (v, f))| object([("ray", nat(i)), ("v", ints(v)), ("phi", int(*f))]))
        .collect();
    let slack = match poly.strict_feasibility_slack() {
        Slack::Finite(q) => rational(&q),
        Slack::Unbounded => Value::String("unbounded".into()),
    };
    let points = poly.lattice_points().map_err(|err| match err {
        Error::UnboundedPolytope => Error::UnboundedSupport,
        other => other,
    })?;
    let hull = poly.affine_hull();
    Ok(object([
        ("sym", nat(sym)),
        ("element", rationals(&e)),
        ("inequalities", Value::Array(rows)),
        ("empty", Value::Bool(hull.dim().is_none())),
        ("affine_dim", hull.dim().map_or(Value::Null, nat)),
        ("full_dimensional", Value::Bool(hull.dim() == Some(s.fan().lattice_rank()))),
        ("slack", slack),
        ("lattice_point_count", nat(points.len())),
        ("lattice_points", Value::Array(points.iter().map(|u| ints(u)).collect())),
    ]))
}

fn image_rows(dims: &[usize]) -> Value {
    Value::Array(
        dims.iter()
            .enumerate()
            .map(|(i, d)| object([("l", nat(i + 1)), ("image_dim", nat(*d))]))
            .collect(),
    )
}

fn note_l(l: &LSubspace, warnings: &mut Vec<String>) {
    if !l.stabilized {
        warnings.push(format!("L(X,E) not stabilized by p = {}; it is a lower bound", l.p_reached));
    }
}

fn subspace_basis(s: &Subspace) -> Value {
    matrix(s.basis())
}

fn l_json(l: &LSubspace) -> Value {
    object([
        ("dim", nat(l.dim())),
        ("basis", subspace_basis(&l.span)),
        ("p_reached", nat(l.p_reached)),
        ("stabilized", Value::Bool(l.stabilized)),
    ])
}

fn graded_json(g: &GradedDims) -> Value {
    Value::Array(
        g.rows
            .iter()
            .map(|row| {
                object([
                    ("l", nat(row.l)),
                    ("total", nat(row.total)),
                    ("weights", Value::Array(row.buckets.iter().map(|(w, _)| rationals(w)).collect())),
                    ("dims", Value::Array(row.buckets.iter().map(|(_, d)| nat(*d)).collect())),
                ])
            })
            .collect(),
    )
}

fn alpha_json(a: &AlphaEstimate) -> Value {
    let sequence = a
        .sequence
        .iter()
        .enumerate()
        .map(|(i, q)| object([("l", nat(i + 1)), ("value", rational(q)), ("display", Value::String(display(q)))]))
        .collect();
    object([
        ("d_alpha", int(a.d_alpha)),
        ("sequence", Value::Array(sequence)),
        (
            "estimate",
            object([
                ("value", rational(&a.estimate)),
                ("display", Value::String(display(&a.estimate))),
                ("statistic", Value::String("max over l > l_max/2".into())),
                ("label", Value::String(ESTIMATOR.into())),
            ]),
        ),
    ])
}

fn growth_json(g: Option<f64>, what: &str) -> Value {
    match g {
        Some(x) => object([
            ("display", Value::String(display_f64(x))),
            ("statistic", Value::String(what.into())),
            ("label", Value::String(ESTIMATOR.into())),
        ]),
        None => Value::Null,
    }
}

fn split_json(s: &SplitDecision) -> Value {
    object([
        ("big", Value::Bool(s.big)),
        ("optimum", rational(&s.optimum)),
        ("u", rationals(&s.u)),
        ("combination", rationals(&s.combination)),
        ("certificate", bigs(&s.certificate)),
        ("certificate_degree", big(&s.degree())),
    ])
}

fn witness_json(w: &CorollaryWitness) -> Value {
    let origin = match &w.origin {
        WitnessOrigin::Ground { index } => object([("kind", Value::String("ground".into())), ("index", nat(*index))]),
        WitnessOrigin::Product { left_degree, left, right_degree, right } => object([
            ("kind", Value::String("product".into())),
            ("left", Value::Array(vec![nat(*left_degree), nat(*left)])),
            ("right", Value::Array(vec![nat(*right_degree), nat(*right)])),
        ]),
    };
    let slack = match &w.slack {
        Slack::Finite(q) => rational(q),
        Slack::Unbounded => Value::String("unbounded".into()),
    };
    object([
        ("degree", nat(w.degree)),
        ("element", rationals(&w.element)),
        ("phi", ints(&w.phi)),
        ("slack", slack),
        ("origin", origin),
    ])
}

fn search_json(s: &SearchOutcome, bound: usize) -> Value {
    object([
        ("degree_bound", nat(bound)),
        ("degree_reached", nat(s.degree_reached)),
        ("truncated", Value::Bool(s.truncated)),
        ("witness", s.witness.as_ref().map_or(Value::Null, witness_json)),
    ])
}

fn verdict_json(v: &Verdict, split: Option<&SplitDecision>, image: Option<f64>, graded: Option<f64>) -> Value {
    let certificate = match v {
        Verdict::BigCertified(BigCertificate::Corollary(w)) => {
            object([("kind", Value::String("corollary".into())), ("witness", witness_json(w))])
        }
        Verdict::BigCertified(BigCertificate::SplitLp(s)) => {
            object([("kind", Value::String("split_lp".into())), ("lp", split_json(s))])
        }
        Verdict::NotBigSplitCertified => object([
            ("kind", Value::String("split_lp".into())),
            ("lp", split.map_or(Value::Null, split_json)),
        ]),
        Verdict::EvidencePositive | Verdict::EvidenceInconclusive => object([
            ("kind", Value::String("evidence".into())),
            ("label", Value::String(ESTIMATOR.into())),
            ("image_growth", image.map_or(Value::Null, |x| Value::String(display_f64(x)))),
            ("graded_growth", graded.map_or(Value::Null, |x| Value::String(display_f64(x)))),
        ]),
    };
    object([
        ("name", Value::String(v.name().into())),
        ("exact", Value::Bool(v.is_exact())),
        ("certificate", certificate),
    ])
}
