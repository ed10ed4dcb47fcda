//! JSON model files: a fan plus either split divisor data or explicit
//! Klyachko filtrations.

use std::fmt;
use std::str::FromStr;

use klyachko::bundle::{check_all_cones, Filtration, ToricBundle};
use klyachko::fan::{Fan, ViolationKind};
use klyachko::polyhedra::{Rational, Subspace};
use klyachko::Error;
use serde_json::{Map, Value};

/// One problem with a model, located by JSON pointer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "{at}: {}", self.message)
    }
}

#[derive(Debug)]
pub enum ModelError {
    Syntax { line: usize, column: usize, message: String },
    Invalid(Vec<Diagnostic>),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Syntax { line, column, message } => {
                write!(f, "syntax error at line {line}, column {column}: {message}")
            }
            ModelError::Invalid(diags) => {
                for (i, d) in diags.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{d}")?;
                }
                Ok(())
            }
        }
    }
}

pub struct Model {
    pub bundle: ToricBundle,
    pub warnings: Vec<String>,
}

struct Collector {
    diags: Vec<Diagnostic>,
}

impl Collector {
    fn push(&mut self, pointer: impl Into<String>, message: impl Into<String>) {
        self.diags.push(Diagnostic { pointer: pointer.into(), message: message.into() });
    }

    fn int(&mut self, v: &Value, at: &str) -> Option<i64> {
        match v {
            Value::Number(n) => match n.as_i64() {
                Some(x) => Some(x),
                None if n.is_u64() || n.to_string().chars().all(|c| c.is_ascii_digit() || c == '-') => {
                    self.push(at, "integer out of 64-bit range");
                    None
                }
                None => {
                    self.push(at, "expected an integer");
                    None
                }
            },
            _ => {
                self.push(at, "expected an integer");
                None
            }
        }
    }

    fn natural(&mut self, v: &Value, at: &str) -> Option<usize> {
        let x = self.int(v, at)?;
        match usize::try_from(x) {
            Ok(n) => Some(n),
            Err(_) => {
                self.push(at, "expected a nonnegative integer");
                None
            }
        }
    }

    fn rational(&mut self, v: &Value, at: &str) -> Option<Rational> {
        let text = match v {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.trim().to_string(),
            _ => {
                self.push(at, "expected an integer or a rational string \"a/b\"");
                return None;
            }
        };
        if text.ends_with("/0") {
            self.push(at, "zero denominator");
            return None;
        }
        match Rational::from_str(&text) {
            Ok(q) => Some(q),
            Err(_) => {
                self.push(at, format!("cannot read {text:?} as an exact rational"));
                None
            }
        }
    }

    fn array<'a>(&mut self, v: &'a Value, at: &str) -> Option<&'a Vec<Value>> {
        match v {
            Value::Array(a) => Some(a),
            _ => {
                self.push(at, "expected an array");
                None
            }
        }
    }

    fn object<'a>(&mut self, v: &'a Value, at: &str, allowed: &[&str]) -> Option<&'a Map<String, Value>> {
        match v {
            Value::Object(m) => {
                for k in m.keys() {
                    if !allowed.contains(&k.as_str()) {
                        self.push(format!("{at}/{}", escape(k)), "unknown field");
                    }
                }
                Some(m)
            }
            _ => {
                self.push(at, "expected an object");
                None
            }
        }
    }

    fn field<'a>(&mut self, m: &'a Map<String, Value>, at: &str, key: &str) -> Option<&'a Value> {
        let v = m.get(key);
        if v.is_none() {
            self.push(format!("{at}/{key}"), "missing field");
        }
        v
    }

    fn int_rows(&mut self, v: &Value, at: &str) -> Option<Vec<Vec<i64>>> {
        let rows = self.array(v, at)?;
        let mut out = Vec::with_capacity(rows.len());
        let mut ok = true;
        for (i, row) in rows.iter().enumerate() {
            let p = format!("{at}/{i}");
            match self.array(row, &p) {
                Some(entries) => {
                    let parsed: Vec<Option<i64>> =
                        entries.iter().enumerate().map(|(k, x)| self.int(x, &format!("{p}/{k}"))).collect();
                    match parsed.into_iter().collect::<Option<Vec<i64>>>() {
                        Some(r) => out.push(r),
                        None => ok = false,
                    }
                }
                None => ok = false,
            }
        }
        ok.then_some(out)
    }
}

/// RFC 6901 escaping of a single reference token.
fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn ray_pointer(kind: ViolationKind) -> bool {
    matches!(
        kind,
        ViolationKind::WrongLength
            | ViolationKind::ZeroRay
            | ViolationKind::NonPrimitive
            | ViolationKind::DuplicateRay
            | ViolationKind::UnusedRay
    )
}

pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let root: Value = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
    })?;
    let mut c = Collector { diags: Vec::new() };
    let mut warnings = Vec::new();
    let Some(top) = c.object(&root, "", &["lattice_rank", "rays", "max_cones", "bundle", "assertions"]) else {
        return Err(ModelError::Invalid(c.diags));
    };
    let lattice_rank = c.field(top, "", "lattice_rank").and_then(|v| c.natural(v, "/lattice_rank"));
    let rays = c.field(top, "", "rays").and_then(|v| c.int_rows(v, "/rays"));
    let cones: Option<Vec<Vec<usize>>> = c.field(top, "", "max_cones").and_then(|v| {
        let rows = c.int_rows(v, "/max_cones")?;
        let mut out = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let mut cone = Vec::with_capacity(row.len());
            for (k, &x) in row.iter().enumerate() {
                match usize::try_from(x) {
                    Ok(n) => cone.push(n),
                    Err(_) => {
                        c.push(format!("/max_cones/{i}/{k}"), "expected a nonnegative ray index");
                        return None;
                    }
                }
            }
            out.push(cone);
        }
        Some(out)
    });

    let mut projective_asserted = false;
    if let Some(a) = top.get("assertions") {
        if let Some(m) = c.object(a, "/assertions", &["projective"]) {
            match m.get("projective") {
                Some(Value::Bool(b)) => projective_asserted = *b,
                Some(_) => c.push("/assertions/projective", "expected a boolean"),
                None => {}
            }
        }
    }

    let (Some(n), Some(rays), Some(cones)) = (lattice_rank, rays, cones) else {
        return Err(ModelError::Invalid(c.diags));
    };
    let fan = Fan::new(n, rays, cones);
    let violations = fan.validate();
    for v in &violations {
        let list = if ray_pointer(v.kind) { "rays" } else { "max_cones" };
        match v.indices.first() {
            Some(i) => c.push(format!("/{list}/{i}"), format!("{} ({list} {:?})", v.kind, v.indices)),
            None => c.push(format!("/{list}"), v.kind.to_string()),
        }
    }
    if violations.is_empty() {
        match fan.is_complete() {
            Ok(true) => {}
            Ok(false) => c.push("/max_cones", "fan is not complete"),
            Err(Error::UnsupportedRank(r)) => warnings.push(format!("completeness not checked in lattice rank {r}")),
            Err(e) => c.push("/max_cones", e.to_string()),
        }
    }

    let bundle = c.field(top, "", "bundle").and_then(|b| parse_bundle(&mut c, b, &fan));
    let Some(bundle) = bundle else {
        return Err(ModelError::Invalid(c.diags));
    };
    if violations.is_empty() {
        if let Err(e) = check_all_cones(&bundle) {
            match e {
                Error::Incompatible { cone, witness } => {
                    c.push(format!("/max_cones/{cone}"), format!("incompatible filtrations on cone {cone}: {witness}"))
                }
                other => c.push("/bundle", other.to_string()),
            }
        }
    }
    if !c.diags.is_empty() {
        return Err(ModelError::Invalid(c.diags));
    }
    if projective_asserted {
        warnings.push("projectivity asserted, not checked".to_string());
    }
    Ok(Model { bundle, warnings })
}

fn parse_bundle(c: &mut Collector, v: &Value, fan: &Fan) -> Option<ToricBundle> {
    let m = c.object(v, "/bundle", &["type", "coefficients", "rank", "filtrations"])?;
    let nrays = fan.rays().len();
    match c.field(m, "/bundle", "type")? {
        Value::String(t) if t == "split" => {
            let v = c_field(c, m, "coefficients")?;
            let rows = c.int_rows(v, "/bundle/coefficients")?;
            let mut ok = true;
            for (i, row) in rows.iter().enumerate() {
                if row.len() != nrays {
                    c.push(format!("/bundle/coefficients/{i}"), format!("expected {nrays} coefficients, found {}", row.len()));
                    ok = false;
                }
            }
            if rows.is_empty() {
                c.push("/bundle/coefficients", "a split bundle needs at least one summand");
                ok = false;
            }
            if !ok {
                return None;
            }
            report(c, "/bundle", ToricBundle::from_divisors(fan, &rows))
        }
        Value::String(t) if t == "klyachko" => {
            let v = c_field(c, m, "rank")?;
            let rank = c.natural(v, "/bundle/rank")?;
            let v = c_field(c, m, "filtrations")?;
            let fs = c.array(v, "/bundle/filtrations")?;
            if fs.len() != nrays {
                c.push("/bundle/filtrations", format!("expected one filtration per ray ({nrays}), found {}", fs.len()));
                return None;
            }
            let mut filtrations = Vec::with_capacity(nrays);
            for (rho, f) in fs.iter().enumerate() {
                filtrations.push(parse_filtration(c, f, rank, &format!("/bundle/filtrations/{rho}")));
            }
            let filtrations: Vec<Filtration> = filtrations.into_iter().collect::<Option<_>>()?;
            report(c, "/bundle", ToricBundle::new(fan.clone(), rank, filtrations))
        }
        Value::String(t) => {
            c.push("/bundle/type", format!("unknown bundle type {t:?}; expected \"split\" or \"klyachko\""));
            None
        }
        _ => {
            c.push("/bundle/type", "expected a string");
            None
        }
    }
}

fn c_field<'a>(c: &mut Collector, m: &'a Map<String, Value>, key: &str) -> Option<&'a Value> {
    c.field(m, "/bundle", key)
}

fn report<T>(c: &mut Collector, at: &str, r: klyachko::Result<T>) -> Option<T> {
    r.map_err(|e| c.push(at, e.to_string())).ok()
}

fn parse_filtration(c: &mut Collector, v: &Value, rank: usize, at: &str) -> Option<Filtration> {
    let steps = c.array(v, at)?;
    let mut out = Vec::with_capacity(steps.len());
    let mut ok = true;
    for (k, s) in steps.iter().enumerate() {
        let p = format!("{at}/{k}");
        let Some(m) = c.object(s, &p, &["jump", "basis"]) else {
            ok = false;
            continue;
        };
        let jump = c.field(m, &p, "jump").and_then(|j| c.int(j, &format!("{p}/jump")));
        let basis = c.field(m, &p, "basis").and_then(|b| {
            let bp = format!("{p}/basis");
            let rows = c.array(b, &bp)?;
            let mut vs = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                let rp = format!("{bp}/{i}");
                let entries = c.array(row, &rp)?;
                if entries.len() != rank {
                    c.push(rp, format!("expected {rank} entries, found {}", entries.len()));
                    return None;
                }
                let parsed: Option<Vec<Rational>> =
                    entries.iter().enumerate().map(|(t, x)| c.rational(x, &format!("{rp}/{t}"))).collect();
                vs.push(parsed?);
            }
            report(c, &bp, Subspace::span(rank, &vs))
        });
        match (jump, basis) {
            (Some(j), Some(b)) => out.push((j, b)),
            _ => ok = false,
        }
    }
    if !ok {
        return None;
    }
    report(c, at, Filtration::new(rank, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P1_O2: &str = r#"{"lattice_rank": 1, "rays": [[1], [-1]], "max_cones": [[0], [1]],
        "bundle": {"type": "split", "coefficients": [[2, 0]]}}"#;

    fn diags(text: &str) -> Vec<Diagnostic> {
        match parse_model(text) {
            Err(ModelError::Invalid(d)) => d,
            Err(e) => panic!("unexpected {e}"),
            Ok(_) => panic!("model accepted"),
        }
    }

    #[test]
    fn accepts_split_line_bundle() {
        let m = parse_model(P1_O2).unwrap();
        assert_eq!(m.bundle.rank(), 1);
        assert!(m.warnings.is_empty());
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_model("{\n  \"rays\": [1,\n}") {
            Err(ModelError::Syntax { line, .. }) => assert_eq!(line, 3),
            _ => panic!("expected a syntax error"),
        }
    }

    #[test]
    fn missing_filtration_is_located() {
        let text = r#"{"lattice_rank": 1, "rays": [[1], [-1]], "max_cones": [[0], [1]],
            "bundle": {"type": "klyachko", "rank": 1, "filtrations": [[{"jump": 0, "basis": [[1]]}]]}}"#;
        let d = diags(text);
        assert_eq!(d[0].pointer, "/bundle/filtrations");
    }

    #[test]
    fn rationals_and_unknown_fields() {
        let text = r#"{"lattice_rank": 1, "rays": [[1], [-1]], "max_cones": [[0], [1]], "colour": 1,
            "bundle": {"type": "klyachko", "rank": 1, "filtrations": [
                [{"jump": 0, "basis": [["1/2"]]}], [{"jump": 3, "basis": [["x"]]}]]}}"#;
        let d = diags(text);
        let pointers: Vec<&str> = d.iter().map(|d| d.pointer.as_str()).collect();
        assert_eq!(pointers, vec!["/colour", "/bundle/filtrations/1/0/basis/0/0"]);
    }

    #[test]
    fn fan_violations_point_at_rays() {
        let text = r#"{"lattice_rank": 1, "rays": [[2], [-1]], "max_cones": [[0], [1]],
            "bundle": {"type": "split", "coefficients": [[0, 0]]}}"#;
        assert!(diags(text).iter().any(|d| d.pointer == "/rays/0"));
    }
}
