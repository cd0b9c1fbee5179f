use num_complex::Complex64;
use serde_json::{json, Value};

use super::CMatrix;

/// Largest denominator accepted when snapping.
pub const MAX_DENOMINATOR: i64 = 1 << 16;

/// Absolute distance within which a float is replaced by a rational.
pub const SNAP_TOL: f64 = 1e-9;

/// Nearest continued-fraction convergent `p/q` with `q ≤ MAX_DENOMINATOR`
/// lying within `SNAP_TOL` of `x`.
pub fn snap_rational(x: f64) -> Option<(i64, i64)> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > MAX_DENOMINATOR {
            return None;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= SNAP_TOL {
            return Some((p2, q2));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a as f64;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

pub fn snap_value(x: f64) -> f64 {
    snap_rational(x).map_or(x, |(p, q)| p as f64 / q as f64)
}

pub fn snap_complex(z: Complex64) -> Complex64 {
    Complex64::new(snap_value(z.re), snap_value(z.im))
}

pub fn snap_matrix(m: &CMatrix) -> CMatrix {
    m.map(snap_complex)
}

/// `"p/q"`, `"p"`, or `None` when the value is not near a small rational.
pub fn format_rational(x: f64) -> Option<String> {
    snap_rational(x).map(|(p, q)| if q == 1 { p.to_string() } else { format!("{p}/{q}") })
}

/// `"p/q"` when `exact` and the value snaps, otherwise a JSON number
/// (`null` for non-finite values).
pub fn real_json(x: f64, exact: bool) -> Value {
    match format_rational(x).filter(|_| exact) {
        Some(text) => Value::String(text),
        None => json!(x),
    }
}

/// `{"re": .., "im": ..}` with [`real_json`] parts.
pub fn complex_json(z: Complex64, exact: bool) -> Value {
    json!({ "re": real_json(z.re, exact), "im": real_json(z.im, exact) })
}

/// Row-major array of [`complex_json`] entries.
pub fn matrix_json(m: &CMatrix, exact: bool) -> Value {
    Value::Array(
        m.row_iter()
            .map(|row| Value::Array(row.iter().map(|&z| complex_json(z, exact)).collect()))
            .collect(),
    )
}
