//! Report assembly and rendering. Rationals are always exact strings; floats
//! only appear in fields named `display`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{Map, Value};

use klyachko::polyhedra::Rational;

const SAFE_INT: i64 = 1 << 53;

pub fn int(n: i64) -> Value {
    if n.abs() < SAFE_INT {
        Value::from(n)
    } else {
        Value::String(n.to_string())
    }
}

pub fn nat(n: usize) -> Value {
    match i64::try_from(n) {
        Ok(x) => int(x),
        Err(_) => Value::String(n.to_string()),
    }
}

pub fn big(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) => int(x),
        None => Value::String(n.to_string()),
    }
}

pub fn ints(v: &[i64]) -> Value {
    Value::Array(v.iter().map(|&x| int(x)).collect())
}

pub fn bigs(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(big).collect())
}

/// `"num/den"`, with the denominator written even when it is 1.
pub fn rational(q: &Rational) -> Value {
    Value::String(format!("{}/{}", q.numer(), q.denom()))
}

pub fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

pub fn matrix(rows: &[Vec<Rational>]) -> Value {
    Value::Array(rows.iter().map(|r| rationals(r)).collect())
}

/// Rounds half to even.
fn round_half_even(q: &Rational) -> BigInt {
    let (n, d) = (q.numer(), q.denom());
    let (fl, rem) = n.div_mod_floor(d);
    let twice: BigInt = &rem * 2;
    match twice.cmp(d) {
        std::cmp::Ordering::Less => fl,
        std::cmp::Ordering::Greater => fl + 1,
        std::cmp::Ordering::Equal => {
            if fl.is_even() {
                fl
            } else {
                fl + 1
            }
        }
    }
}

/// Fixed-point rendering with 6 significant digits, rounding half to even.
pub fn display(q: &Rational) -> String {
    const DIGITS: i32 = 6;
    if q.is_zero() {
        return "0.00000".to_string();
    }
    let neg = q.is_negative();
    let a = q.abs();
    let ten = Rational::from_integer(BigInt::from(10));
    let lo = Rational::from_integer(num_traits::pow(BigInt::from(10), (DIGITS - 1) as usize));
    let hi = &lo * &ten;
    // find k with 10^5 <= a * 10^k < 10^6
    let mut k: i32 = 0;
    let mut scaled = a.clone();
    while scaled < lo {
        scaled *= &ten;
        k += 1;
    }
    while scaled >= hi {
        scaled /= &ten;
        k -= 1;
    }
    let mut digits = round_half_even(&scaled);
    if digits == *hi.numer() {
        digits /= 10;
        k -= 1;
    }
    let s = digits.to_string();
    let body = if k <= 0 {
        let mut t = s;
        t.extend(std::iter::repeat_n('0', (-k) as usize));
        t
    } else {
        let k = k as usize;
        if k >= s.len() {
            format!("0.{}{}", "0".repeat(k - s.len()), s)
        } else {
            format!("{}.{}", &s[..s.len() - k], &s[s.len() - k..])
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

pub fn display_f64(x: f64) -> String {
    match Rational::from_float(x) {
        Some(q) => display(&q),
        None => x.to_string(),
    }
}

pub fn object<const N: usize>(entries: [(&str, Value); N]) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

pub struct Report {
    pub command: Value,
    pub digest: String,
    pub results: Value,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        object([
            ("command", self.command.clone()),
            ("input_sha256", Value::String(self.digest.clone())),
            ("results", self.results.clone()),
            ("warnings", Value::Array(self.warnings.iter().cloned().map(Value::String).collect())),
        ])
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command        {}", inline(&self.command));
        let _ = writeln!(out, "input sha256   {}", self.digest);
        out.push_str("results\n");
        render_value(&mut out, &self.results, 1);
        if self.warnings.is_empty() {
            out.push_str("warnings       none\n");
        } else {
            out.push_str("warnings\n");
            for w in &self.warnings {
                let _ = writeln!(out, "  - {w}");
            }
        }
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object()) => {
            let parts: Vec<String> = a.iter().map(inline).collect();
            Some(format!("({})", parts.join(", ")))
        }
        _ => None,
    }
}

fn inline(v: &Value) -> String {
    match scalar(v) {
        Some(s) => s,
        None => match v {
            Value::Object(m) => {
                let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}={}", inline(v))).collect();
                format!("{{{}}}", parts.join(", "))
            }
            Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
            _ => unreachable!(),
        },
    }
}

/// Rows of flat objects sharing one key set become an aligned table.
fn as_table(a: &[Value]) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let first = a.first()?.as_object()?;
    let keys: Vec<String> = first.keys().cloned().collect();
    let mut rows = Vec::with_capacity(a.len());
    for v in a {
        let m = v.as_object()?;
        if m.keys().ne(keys.iter()) {
            return None;
        }
        rows.push(m.values().map(scalar).collect::<Option<Vec<_>>>()?);
    }
    Some((keys, rows))
}

fn render_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            let width = m.keys().map(String::len).max().unwrap_or(0);
            for (k, x) in m {
                if let Some(s) = scalar(x) {
                    let _ = writeln!(out, "{pad}{k:width$}  {s}");
                } else {
                    let _ = writeln!(out, "{pad}{k}");
                    render_value(out, x, depth + 1);
                }
            }
        }
        Value::Array(a) => {
            if let Some((keys, rows)) = as_table(a) {
                let widths: Vec<usize> = (0..keys.len())
                    .map(|i| rows.iter().map(|r| r[i].len()).chain([keys[i].len()]).max().unwrap_or(0))
                    .collect();
                let line = |cells: &[String]| {
                    let parts: Vec<String> =
                        cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                    format!("{pad}{}", parts.join("  "))
                };
                let _ = writeln!(out, "{}", line(&keys));
                for r in &rows {
                    let _ = writeln!(out, "{}", line(r));
                }
            } else {
                for (i, x) in a.iter().enumerate() {
                    match scalar(x) {
                        Some(s) => {
                            let _ = writeln!(out, "{pad}[{i}] {s}");
                        }
                        None => {
                            let _ = writeln!(out, "{pad}[{i}]");
                            render_value(out, x, depth + 1);
                        }
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", inline(other));
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(display(&q(3, 2)), "1.50000");
        assert_eq!(display(&q(1, 6)), "0.166667");
        assert_eq!(display(&q(-2, 3)), "-0.666667");
        assert_eq!(display(&q(1234567, 1)), "1234570");
        assert_eq!(display(&q(0, 1)), "0.00000");
        assert_eq!(display(&q(9999995, 10000000)), "1.00000");
        assert_eq!(display(&q(11, 1)), "11.0000");
    }

    #[test]
    fn ties_go_to_even() {
        // 1.000005 and 1.000015 sit exactly between two 6-digit values
        assert_eq!(display(&q(1000005, 1000000)), "1.00000");
        assert_eq!(display(&q(1000015, 1000000)), "1.00002");
    }

    #[test]
    fn large_integers_become_strings() {
        assert_eq!(int(5), Value::from(5));
        assert_eq!(int(1 << 53), Value::String("9007199254740992".into()));
        assert_eq!(rational(&q(4, 2)), Value::String("2/1".into()));
    }
}
