//! Drazin inverse, adjugates and cofactors, spectral inverse formulas,
//! extended-elementary factorization and the resolvent limit.

mod elementary;

#[cfg(test)]
mod tests;

use num_complex::Complex64;

use crate::digraph::IntMatrix;
use crate::error::{Error, Result};
use crate::numlinalg::{identity, mat_pow, real, CMatrix};
use crate::spectral::SpectralDecomposition;

pub use elementary::{elementary_factorization, factor_product, ElementaryFactor};

fn power(lambda: Complex64, k: usize) -> Complex64 {
    if k == 0 {
        real(1.0)
    } else {
        lambda.powu(k as u32)
    }
}

/// `A^D = Σ_{λ≠0} λ^{-1} Σ_{i<ν(λ)} (I - A/λ)^i E_λ`.
pub fn drazin(decomposition: &SpectralDecomposition) -> CMatrix {
    let n = decomposition.n();
    let mut out = CMatrix::zeros(n, n);
    for (e, projector) in decomposition.spectrum.iter().zip(&decomposition.projectors) {
        if e.is_zero() {
            continue;
        }
        let step = identity(n) - &decomposition.a / e.value;
        let mut term = projector.clone();
        let mut sum = CMatrix::zeros(n, n);
        for _ in 0..e.index {
            sum += &term;
            term = &step * term;
        }
        out += sum / e.value;
    }
    out
}

/// `A^{-1}` by the spectral sum; fails when 0 is an eigenvalue.
pub fn inverse_spectral(decomposition: &SpectralDecomposition) -> Result<CMatrix> {
    if decomposition.spectrum.zero().is_some() {
        return Err(Error::Singular("0 is an eigenvalue".into()));
    }
    Ok(drazin(decomposition))
}

/// `adj(A) = Σ_λ Σ_{i<ν(λ)} (Π_{μ≠λ} μ^{m(μ)}) λ^{m(λ)-1-i} (λI - A)^i E_λ`, with `0^0 = 1`.
pub fn adjugate_spectral(decomposition: &SpectralDecomposition) -> CMatrix {
    let n = decomposition.n();
    let spectrum = &decomposition.spectrum;
    let mut out = CMatrix::zeros(n, n);
    for (k, (e, projector)) in spectrum.iter().zip(&decomposition.projectors).enumerate() {
        let others = spectrum
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .fold(real(1.0), |acc, (_, mu)| acc * power(mu.value, mu.multiplicity));
        let shifted = identity(n) * e.value - &decomposition.a;
        let mut term = projector.clone();
        for i in 0..e.index {
            out += &term * (others * power(e.value, e.multiplicity - 1 - i));
            term = &shifted * term;
        }
    }
    out
}

/// Residuals of the Drazin axioms `AX = XA`, `XAX = X`, `A^{k+1}X = A^k`
/// with `k = ν(0)` (0 when A is invertible), each relative to its scale.
pub fn drazin_axiom_residuals(a: &CMatrix, x: &CMatrix, nu0: usize) -> [f64; 3] {
    let scale_a = a.norm().max(1.0);
    let scale_x = x.norm().max(1.0);
    let ak = mat_pow(a, nu0 as u64);
    [
        (a * x - x * a).norm() / (scale_a * scale_x),
        (x * a * x - x).norm() / (scale_x * scale_x * scale_a),
        (&ak * a * x - &ak).norm() / (ak.norm().max(1.0) * scale_a * scale_x),
    ]
}

/// Exact cofactor matrix; entry (i, j) is `(-1)^{i+j}` times the minor
/// deleting row i and column j.
pub fn cofactor_int(m: &IntMatrix) -> IntMatrix {
    let n = m.n();
    if n == 1 {
        return IntMatrix::identity(1);
    }
    IntMatrix::from_fn(n, |i, j| {
        let minor = IntMatrix::from_fn(n - 1, |r, c| {
            let r = if r < i { r } else { r + 1 };
            let c = if c < j { c } else { c + 1 };
            m.get(r, c).clone()
        });
        let det = minor.determinant();
        if (i + j) % 2 == 0 {
            det
        } else {
            -det
        }
    })
}

pub fn adjugate_int(m: &IntMatrix) -> IntMatrix {
    cofactor_int(m).transpose()
}

/// Floating-point cofactor matrix via LU determinants of the minors.
pub fn cofactor_complex(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    if n == 1 {
        return identity(1);
    }
    CMatrix::from_fn(n, n, |i, j| {
        let minor = m.clone().remove_row(i).remove_column(j);
        let det = minor.determinant();
        if (i + j) % 2 == 0 {
            det
        } else {
            -det
        }
    })
}

/// Convergence of `(λ - x_i)^ν (A - x_i I)^{-1}` towards `(λI - A)^{ν-1} E_λ`.
#[derive(Clone, Debug)]
pub struct ResolventReport {
    pub eigenvalue: Complex64,
    pub index: usize,
    pub points: Vec<Complex64>,
    /// Frobenius distance to the limit at each `x_i`.
    pub errors: Vec<f64>,
    pub decreasing: bool,
    pub final_error: f64,
}

/// Evaluate the resolvent limit at `x_i = λ + 10^{-i}` for `i = 1..=steps`.
/// A point that lands on another eigenvalue (or makes `A - xI` numerically
/// singular) is moved by rotating the offset by `1 + 1e-3·i`.
pub fn resolvent_limit_check(
    decomposition: &SpectralDecomposition,
    lambda: Complex64,
    steps: usize,
) -> Result<ResolventReport> {
    let pos = decomposition
        .position(lambda)
        .ok_or_else(|| Error::input(format!("{lambda} is not an eigenvalue")))?;
    let e = decomposition.spectrum.get(pos).clone();
    let n = decomposition.n();
    let a = &decomposition.a;
    let target = mat_pow(&(identity(n) * e.value - a), e.index as u64 - 1)
        * &decomposition.projectors[pos];
    let mut points = Vec::with_capacity(steps);
    let mut errors = Vec::with_capacity(steps);
    let mut direction = real(1.0);
    for i in 1..=steps {
        let h = 10f64.powi(-(i as i32));
        let mut attempts = 0;
        let (x, inverse) = loop {
            let x = e.value + direction * h;
            let collides = decomposition
                .spectrum
                .iter()
                .enumerate()
                .any(|(k, mu)| k != pos && (mu.value - x).norm() <= 1e-3 * h);
            let inverse = (a - identity(n) * x).try_inverse();
            match inverse {
                Some(inv) if !collides && inv.iter().all(|z| z.is_finite()) => break (x, inv),
                _ => {
                    attempts += 1;
                    if attempts > 64 {
                        return Err(Error::numerical(format!(
                            "no admissible resolvent point near {lambda} at step {i}"
                        )));
                    }
                    direction *= Complex64::new(1.0, 1e-3);
                    direction /= direction.norm();
                }
            }
        };
        let scaled = inverse * power(e.value - x, e.index);
        errors.push((scaled - &target).norm());
        points.push(x);
    }
    let decreasing = errors.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-6) + 1e-12);
    let final_error = errors.last().copied().unwrap_or(0.0);
    Ok(ResolventReport {
        eigenvalue: e.value,
        index: e.index,
        points,
        errors,
        decreasing,
        final_error,
    })
}
