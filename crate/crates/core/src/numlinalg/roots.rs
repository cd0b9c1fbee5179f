use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;

/// Accepted residual relative to `max(Σ |a_i| |λ|^i, ‖p‖)`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Value and derivative of `p` at `z` by Horner's rule; coefficients ascending.
pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `Σ |a_i| |z|^i`, the scale against which residuals are judged.
pub(crate) fn magnitude_bound(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Unique positive root of `|a_n| x^n - Σ_{i<n} |a_i| x^i`, which bounds all roots.
fn cauchy_radius(coeffs: &[Complex64]) -> f64 {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].norm();
    let tail: Vec<f64> = coeffs[..n].iter().map(|c| c.norm() / lead).collect();
    if tail.iter().all(|&c| c == 0.0) {
        return 0.0;
    }
    let g = |x: f64| x.powi(n as i32) - tail.iter().enumerate().map(|(i, c)| c * x.powi(i as i32)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, 1.0 + tail.iter().cloned().fold(0.0, f64::max));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// All roots of a polynomial (coefficients ascending, nonzero leading term)
/// by Aberth–Ehrlich simultaneous iteration.
pub fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err(Error::input("leading coefficient is zero"));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    if n == 1 {
        return Ok(vec![-monic[0]]);
    }

    let radius = cauchy_radius(&monic).max(f64::MIN_POSITIVE.sqrt());
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && done.iter().any(|d| !d) {
        iterations += 1;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = horner(&monic, z[k]);
            if p.norm() <= 4.0 * f64::EPSILON * magnitude_bound(&monic, z[k]) {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[k] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[k].norm() {
                done[k] = true;
            }
        }
    }

    let norm = monic.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let worst = z
        .iter()
        .map(|&r| horner(&monic, r).0.norm() / magnitude_bound(&monic, r).max(norm))
        .fold(0.0, f64::max);
    if !worst.is_finite() || worst > RESIDUAL_TOL {
        return Err(Error::numerical(format!(
            "root finder did not converge after {iterations} iterations \
             (worst relative residual {worst:.3e}, partial roots {z:?})"
        )));
    }
    Ok(z)
}
