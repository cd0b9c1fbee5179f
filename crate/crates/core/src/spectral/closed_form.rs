use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::FromPrimitive;
use serde_json::{json, Value};

use super::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::numlinalg::{complex_json, matrix_json, real, snap_complex, CMatrix, CVector};
use crate::regex::AutomatonSystem;

/// `C(n, j)` as a float; zero when `j > n`.
pub(crate) fn binomial(n: u64, j: usize) -> f64 {
    let j = j as u64;
    if j > n {
        return 0.0;
    }
    (0..j).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `λ^k` with `0^0 = 1`.
pub(crate) fn power(lambda: Complex64, k: u64) -> Complex64 {
    if k == 0 {
        real(1.0)
    } else if lambda == real(0.0) {
        real(0.0)
    } else {
        lambda.powu(k.min(u32::MAX as u64) as u32)
    }
}

/// Monomial coefficients of `C(x, j)` as a polynomial in `x`.
pub(crate) fn binomial_polynomial(j: usize) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for i in 0..j {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c / (i + 1) as f64;
            next[k] -= c * i as f64 / (i + 1) as f64;
        }
        coeffs = next;
    }
    coeffs
}

#[derive(Clone, Debug)]
pub struct ClosedFormTerm {
    pub eigenvalue: Complex64,
    /// `M_j = (A - λI)^j E_λ` for `j < ν(λ)`.
    pub matrices: Vec<CMatrix>,
}

/// `A^n = Σ_λ Σ_j C(n, j) λ^{n-j} M_j`.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub n: usize,
    pub terms: Vec<ClosedFormTerm>,
    /// Entries are exact small rationals.
    pub exact: bool,
}

impl ClosedForm {
    pub fn evaluate(&self, n: u64) -> CMatrix {
        let mut out = CMatrix::zeros(self.n, self.n);
        for term in &self.terms {
            for (j, m) in term.matrices.iter().enumerate() {
                if (j as u64) > n {
                    break;
                }
                let c = power(term.eigenvalue, n - j as u64) * binomial(n, j);
                out += m * c;
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "terms": self.terms.iter().map(|t| json!({
                "eigenvalue": complex_json(t.eigenvalue, self.exact),
                "matrices": t.matrices.iter().map(|m| matrix_json(m, self.exact)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>()
        })
    }
}

/// Closed form of `A^n` from a decomposition.
pub fn power_expansion(decomposition: &SpectralDecomposition) -> ClosedForm {
    let terms = decomposition
        .spectrum
        .iter()
        .enumerate()
        .map(|(i, e)| ClosedFormTerm {
            eigenvalue: e.value,
            matrices: (0..e.index).map(|j| decomposition.nilpotent_power(i, j)).collect(),
        })
        .collect();
    ClosedForm { n: decomposition.n(), terms, exact: decomposition.snapped }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarTerm {
    pub eigenvalue: Complex64,
    /// `p_λ(m) = Σ_k coefficients[k] m^k`.
    pub coefficients: Vec<Complex64>,
}

/// `f(m) = Σ_{λ≠0} λ^m p_λ(m) + t(m)`, where the transient `t(m)` is the
/// contribution of the eigenvalue 0 and vanishes for `m ≥ ν(0)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ScalarClosedForm {
    pub terms: Vec<ScalarTerm>,
    pub transient: Vec<Complex64>,
    /// Coefficients are exact small rationals.
    pub exact: bool,
}

impl ScalarClosedForm {
    pub fn evaluate(&self, m: u64) -> Complex64 {
        let mut total = self.transient.get(m as usize).copied().unwrap_or(real(0.0));
        let x = m as f64;
        for term in &self.terms {
            let p = term
                .coefficients
                .iter()
                .rev()
                .fold(real(0.0), |acc, c| acc * x + c);
            total += power(term.eigenvalue, m) * p;
        }
        total
    }

    /// Nearest integer to the real part of `evaluate(m)`.
    pub fn evaluate_rounded(&self, m: u64) -> BigInt {
        BigInt::from_f64(self.evaluate(m).re.round()).unwrap_or_default()
    }

    pub fn term(&self, eigenvalue: Complex64) -> Option<&ScalarTerm> {
        self.terms.iter().find(|t| (t.eigenvalue - eigenvalue).norm() <= 1e-8)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "terms": self.terms.iter().map(|t| json!({
                "eigenvalue": complex_json(t.eigenvalue, self.exact),
                "coefficients": t.coefficients.iter().map(|&c| complex_json(c, self.exact)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "transient": self.transient.iter().map(|&c| complex_json(c, self.exact)).collect::<Vec<_>>(),
        })
    }

    /// Human-readable form such as `1·2^m + (-1 - m)·1^m`.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let poly: Vec<String> = t
                    .coefficients
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() > 1e-12)
                    .map(|(k, &c)| match k {
                        0 => format_scalar(c, self.exact),
                        1 => format!("{}·m", format_scalar(c, self.exact)),
                        _ => format!("{}·m^{k}", format_scalar(c, self.exact)),
                    })
                    .collect();
                let poly = if poly.is_empty() { "0".to_string() } else { poly.join(" + ") };
                format!("({poly})·({})^m", format_scalar(t.eigenvalue, self.exact))
            })
            .collect();
        for (m, c) in self.transient.iter().enumerate() {
            if c.norm() > 1e-12 {
                parts.push(format!("{}·[m = {m}]", format_scalar(*c, self.exact)));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

pub(crate) fn format_scalar(z: Complex64, exact: bool) -> String {
    let part = |x: f64| {
        crate::numlinalg::format_rational(x)
            .filter(|_| exact)
            .unwrap_or_else(|| format!("{x:.6}"))
    };
    if z.im.abs() <= 1e-12 {
        part(z.re)
    } else if z.re.abs() <= 1e-12 {
        format!("{}i", part(z.im))
    } else {
        format!("{}{}{}i", part(z.re), if z.im < 0.0 { "-" } else { "+" }, part(z.im.abs()))
    }
}

/// Closed form of `f(m) = v_Iᵀ A^m v_F`; the system is trimmed first.
pub fn structure_closed_form(sys: &AutomatonSystem, tol: f64) -> Result<ScalarClosedForm> {
    let trimmed = sys.trim();
    let a = trimmed.digraph.adjacency_matrix();
    let decomposition = SpectralDecomposition::new(&a, tol)?;
    let vi = to_vector(&trimmed.initial_vector());
    let vf = to_vector(&trimmed.final_vector());
    scalar_form(&decomposition, &vi, &vf)
}

fn to_vector(v: &[f64]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&x| real(x)))
}

/// Contract the power expansion with `left`, `right` into scalar terms.
pub(crate) fn scalar_form(
    decomposition: &SpectralDecomposition,
    left: &CVector,
    right: &CVector,
) -> Result<ScalarClosedForm> {
    if left.len() != decomposition.n() || right.len() != decomposition.n() {
        return Err(Error::input("vector length does not match the matrix"));
    }
    let snap = |z: Complex64| if decomposition.snapped { snap_complex(z) } else { z };
    let expansion = power_expansion(decomposition);
    let mut form = ScalarClosedForm { exact: decomposition.snapped, ..Default::default() };
    for term in &expansion.terms {
        let contracted: Vec<Complex64> = term
            .matrices
            .iter()
            .map(|m| snap((left.transpose() * m * right)[(0, 0)]))
            .collect();
        if term.eigenvalue == real(0.0) {
            form.transient = contracted;
            continue;
        }
        let mut coefficients = vec![real(0.0); contracted.len()];
        for (j, c) in contracted.iter().enumerate() {
            let weight = c / power(term.eigenvalue, j as u64);
            for (k, b) in binomial_polynomial(j).iter().enumerate() {
                coefficients[k] += weight * b;
            }
        }
        let coefficients: Vec<Complex64> = coefficients.into_iter().map(snap).collect();
        if coefficients.iter().any(|c| c.norm() > 1e-12) {
            form.terms.push(ScalarTerm { eigenvalue: term.eigenvalue, coefficients });
        }
    }
    if form.transient.iter().all(|c| c.norm() <= 1e-12) {
        form.transient.clear();
    }
    Ok(form)
}
