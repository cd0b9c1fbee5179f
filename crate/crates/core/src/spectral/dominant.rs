use num_complex::Complex64;
use num_integer::Integer;

use super::closed_form::{binomial, binomial_polynomial, power};
use super::SpectralDecomposition;
use crate::digraph::{Digraph, IntMatrix};
use crate::error::{Error, Result};
use crate::numlinalg::{identity, norm_inf, rank, real, spectral_radius, CMatrix, CRowVector, CVector};

/// Relative slack for `|λ| = ρ`.
pub const DOMINANCE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct TopEigenvalue {
    pub eigenvalue: Complex64,
    /// `Ê_λ = (A - λI)^{ν-1} E_λ`.
    pub e_hat: CMatrix,
    /// Numerical rank of `Ê_λ`; zero signals a tolerance failure.
    pub rank: usize,
}

#[derive(Clone, Debug)]
pub struct DominantTerm {
    pub rho: f64,
    /// Largest index among the dominant eigenvalues.
    pub index: usize,
    /// All eigenvalues of modulus ρ.
    pub dominant: Vec<Complex64>,
    /// Dominant eigenvalues whose index equals `index`.
    pub top: Vec<TopEigenvalue>,
}

impl DominantTerm {
    /// `Σ_{λ∈T} (λ/ρ)^{n-ν+1} Ê_λ`, the predicted value of
    /// `A^n / (C(n, ν-1) ρ^{n-ν+1})`.
    pub fn limit(&self, n: u64) -> CMatrix {
        let size = self.top[0].e_hat.nrows();
        let shift = n + 1 - self.index as u64;
        self.top.iter().fold(CMatrix::zeros(size, size), |acc, t| {
            acc + &t.e_hat * power(t.eigenvalue / self.rho, shift)
        })
    }

    /// `‖A^n / (C(n, ν-1) ρ^{n-ν+1}) - limit(n)‖_∞` with `A^n` computed exactly.
    pub fn limit_error(&self, a: &IntMatrix, n: u32) -> f64 {
        let shift = n as i32 + 1 - self.index as i32;
        let scale = binomial(n as u64, self.index - 1) * self.rho.powi(shift);
        let exact = a.pow(n).to_complex() / real(scale);
        norm_inf(&(exact - self.limit(n as u64)))
    }

    /// True when some `Ê_λ` vanished numerically.
    pub fn flagged(&self) -> bool {
        self.top.iter().any(|t| t.rank == 0)
    }
}

/// Dominant eigenvalues, their maximal index and the matrices `Ê_λ`.
pub fn dominant_term(decomposition: &SpectralDecomposition) -> Result<DominantTerm> {
    let rho = decomposition.spectrum.spectral_radius();
    if rho == 0.0 {
        return Err(Error::Nilpotent);
    }
    let dominant: Vec<usize> = (0..decomposition.spectrum.len())
        .filter(|&i| decomposition.spectrum.get(i).value.norm() >= rho * (1.0 - DOMINANCE_TOL))
        .collect();
    let index = dominant
        .iter()
        .map(|&i| decomposition.spectrum.get(i).index)
        .max()
        .unwrap_or(1);
    let top = dominant
        .iter()
        .filter(|&&i| decomposition.spectrum.get(i).index == index)
        .map(|&i| {
            let e_hat = decomposition.nilpotent_power(i, index - 1);
            let rank = rank(&e_hat, decomposition.tol);
            let eigenvalue = decomposition.spectrum.get(i).value;
            if rank == 0 {
                log::warn!("Ê for eigenvalue {eigenvalue} vanished numerically");
            }
            TopEigenvalue { eigenvalue, e_hat, rank }
        })
        .collect();
    Ok(DominantTerm {
        rho,
        index,
        dominant: dominant.iter().map(|&i| decomposition.spectrum.get(i).value).collect(),
        top,
    })
}

/// Rank factorization `Ê = Σ u_R u_L` into right and left λ-eigenvectors.
///
/// Columns of `Ê` are chosen by pivoted Gram–Schmidt; each right factor is
/// scaled so its largest-magnitude entry is 1.
pub fn eigenvector_factorization(
    e_hat: &CMatrix,
    a: &CMatrix,
    lambda: Complex64,
    tol: f64,
) -> Result<Vec<(CVector, CRowVector)>> {
    let n = e_hat.nrows();
    let scale = e_hat.norm();
    let mut residual = e_hat.clone();
    let mut pivots = Vec::new();
    while scale > 0.0 && pivots.len() < n {
        let (col, norm) = (0..n)
            .map(|c| (c, residual.column(c).norm()))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if norm <= tol * scale {
            break;
        }
        let q = residual.column(col) / real(norm);
        residual -= &q * (q.adjoint() * &residual);
        pivots.push(col);
    }
    if pivots.is_empty() {
        return Ok(Vec::new());
    }
    let c = CMatrix::from_columns(&pivots.iter().map(|&p| e_hat.column(p)).collect::<Vec<_>>());
    let gram = c.adjoint() * &c;
    let x = gram
        .try_inverse()
        .ok_or_else(|| Error::numerical("rank factorization pivots are dependent"))?
        * c.adjoint()
        * e_hat;
    let shifted = a - identity(n) * lambda;
    let bound = 1e-8 * shifted.norm().max(1.0);
    let mut pairs = Vec::new();
    for j in 0..pivots.len() {
        let right = c.column(j).into_owned();
        let top = right.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let k = right.iter().position(|z| z.norm() >= top * (1.0 - 1e-12)).unwrap_or(0);
        let s = right[k];
        let right = right / s;
        let left = x.row(j).into_owned() * s;
        let r_res = (&shifted * &right).norm() / right.norm();
        let l_res = (&left * &shifted).norm() / left.norm();
        if !(r_res <= bound && l_res <= bound) {
            return Err(Error::numerical(format!(
                "internal error: factor {j} of Ê is not a {lambda}-eigenvector pair \
                 (residuals {r_res:.3e}, {l_res:.3e})"
            )));
        }
        pairs.push((right, left));
    }
    Ok(pairs)
}

/// Matrix polynomial `Σ_k coeffs[k] x^k`.
#[derive(Clone, Debug)]
pub struct MatrixPolynomial {
    pub coeffs: Vec<CMatrix>,
}

impl MatrixPolynomial {
    pub fn evaluate(&self, x: f64) -> CMatrix {
        let n = self.coeffs[0].nrows();
        self.coeffs
            .iter()
            .rev()
            .fold(CMatrix::zeros(n, n), |acc, c| acc * real(x) + c)
    }
}

#[derive(Clone, Debug)]
pub struct ResiduePolynomials {
    pub rho: f64,
    pub period: usize,
    /// `S_0 .. S_{P-1}`.
    pub polynomials: Vec<MatrixPolynomial>,
}

impl ResiduePolynomials {
    /// `‖(A/ρ)^n - S_{n mod P}(n)‖_∞` with the power computed exactly.
    pub fn error(&self, a: &IntMatrix, n: u32) -> f64 {
        let exact = a.pow(n).to_complex() / real(self.rho.powi(n as i32));
        let s = self.polynomials[n as usize % self.period].evaluate(n as f64);
        norm_inf(&(exact - s))
    }
}

/// Smallest `q ≤ limit` with `ω^q ≈ 1`.
fn root_of_unity_order(omega: Complex64, limit: usize) -> Option<usize> {
    let mut z = omega;
    for q in 1..=limit {
        if (z - real(1.0)).norm() <= 1e-6 {
            return Some(q);
        }
        z *= omega;
    }
    None
}

/// Residue polynomials `S_k` with `(A/ρ)^{Pm+k} - S_k(Pm+k) → 0`.
pub fn residue_polynomials(
    a: &IntMatrix,
    decomposition: &SpectralDecomposition,
) -> Result<ResiduePolynomials> {
    if !a.is_nonnegative() {
        return Err(Error::Precondition("residue polynomials need a nonnegative matrix".into()));
    }
    let term = dominant_term(decomposition)?;
    let rho = term.rho;
    let graph = Digraph::from_adjacency(a.clone())?;
    let mut period = 1usize;
    for component in graph.irreducible_components().components {
        let indices: Vec<usize> = component.iter().copied().collect();
        let radius = spectral_radius(&a.submatrix(&indices))?;
        if radius >= rho * (1.0 - DOMINANCE_TOL) {
            period = period.lcm(&graph.period(&component)?.period);
        }
    }
    for &lambda in &term.dominant {
        let q = root_of_unity_order(lambda / rho, a.n().max(1)).ok_or_else(|| {
            Error::numerical(format!("dominant eigenvalue {lambda} is not ρ times a root of unity"))
        })?;
        period = period.lcm(&q);
    }

    let n = a.n();
    let spectrum = &decomposition.spectrum;
    let dominant: Vec<usize> = (0..spectrum.len())
        .filter(|&i| spectrum.get(i).value.norm() >= rho * (1.0 - DOMINANCE_TOL))
        .collect();
    let degree = dominant.iter().map(|&i| spectrum.get(i).index).max().unwrap_or(1);
    let polynomials = (0..period)
        .map(|k| {
            let mut coeffs = vec![CMatrix::zeros(n, n); degree];
            for &i in &dominant {
                let lambda = spectrum.get(i).value;
                let phase = power(lambda / rho, k as u64);
                for j in 0..spectrum.get(i).index {
                    let m = decomposition.nilpotent_power(i, j) * (phase / power(lambda, j as u64));
                    for (deg, b) in binomial_polynomial(j).iter().enumerate() {
                        coeffs[deg] += &m * real(*b);
                    }
                }
            }
            MatrixPolynomial { coeffs }
        })
        .collect();
    Ok(ResiduePolynomials { rho, period, polynomials })
}
