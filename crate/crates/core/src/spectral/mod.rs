//! Spectral projectors, closed forms for matrix powers and structure
//! functions, dominant-term asymptotics and residue polynomials.

mod closed_form;
mod dominant;


use num_complex::Complex64;

use crate::digraph::IntMatrix;
use crate::error::{Error, Result};
use crate::numlinalg::{
    generalized_eigenspace, identity, left_generalized_eigenspace, mat_pow, rank, real,
    snap_matrix, CMatrix, Spectrum,
};

pub use closed_form::{
    power_expansion, structure_closed_form, ClosedForm, ClosedFormTerm, ScalarClosedForm,
    ScalarTerm,
};
pub use dominant::{
    dominant_term, eigenvector_factorization, residue_polynomials, DominantTerm, MatrixPolynomial,
    ResiduePolynomials, TopEigenvalue, DOMINANCE_TOL,
};

/// Condition estimate above which interpolation results are flagged.
pub const POLY_CONDITION_LIMIT: f64 = 1e12;

/// Spectrum of a matrix with one spectral projector per eigenvalue.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub a: CMatrix,
    pub spectrum: Spectrum,
    /// `E_λ`, aligned with the spectrum order.
    pub projectors: Vec<CMatrix>,
    /// Right generalized eigenvector bases (columns).
    pub right_bases: Vec<CMatrix>,
    /// Left generalized eigenvector bases (rows).
    pub left_bases: Vec<CMatrix>,
    pub tol: f64,
    /// Whether projector entries were snapped to small rationals.
    pub snapped: bool,
}

/// A projector built from bases, with the condition number of `V_L V_R`.
#[derive(Clone, Debug)]
pub struct OuterProjector {
    pub projector: CMatrix,
    pub condition: f64,
}

/// `E_λ = V_R (V_L V_R)^{-1} V_L`.
pub fn spectral_projector(right: &CMatrix, left: &CMatrix) -> Result<OuterProjector> {
    if left.ncols() != right.nrows() || left.nrows() != right.ncols() {
        return Err(Error::input(format!(
            "basis shapes {}x{} and {}x{} do not pair",
            right.nrows(),
            right.ncols(),
            left.nrows(),
            left.ncols()
        )));
    }
    let gram = left * right;
    let sv = gram.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if condition.is_nan() || condition > 1e12 {
        return Err(Error::numerical(format!(
            "V_L V_R is numerically singular (condition {condition:.3e}); bases are not dual"
        )));
    }
    let inverse = gram
        .try_inverse()
        .ok_or_else(|| Error::numerical("V_L V_R is singular"))?;
    Ok(OuterProjector { projector: right * inverse * left, condition })
}

/// Projectors computed by Hermite interpolation, with the largest condition estimate.
#[derive(Clone, Debug)]
pub struct PolyProjectors {
    pub projectors: Vec<CMatrix>,
    pub condition: f64,
}

/// `E_λ = e_λ(A)` where `e_λ` is the Hermite interpolant equal to 1 at λ
/// (to order ν(λ)) and 0 at every other eigenvalue (to order ν).
///
/// Newton form over repeated nodes; confluent divided differences of the
/// target are zero beyond the value itself.
pub fn spectral_projector_poly(a: &CMatrix, spectrum: &Spectrum) -> PolyProjectors {
    let n = a.nrows();
    let nodes: Vec<(usize, Complex64)> = spectrum
        .iter()
        .enumerate()
        .flat_map(|(i, e)| std::iter::repeat_n((i, e.value), e.index))
        .collect();
    let shifted_norms: Vec<f64> = nodes
        .iter()
        .map(|&(_, z)| (a - identity(n) * z).norm())
        .collect();
    let mut projectors = Vec::with_capacity(spectrum.len());
    let mut worst = 0.0f64;
    for target in 0..spectrum.len() {
        let coeffs = newton_coefficients(&nodes, target);
        let mut result = identity(n) * coeffs[coeffs.len() - 1];
        for k in (0..coeffs.len() - 1).rev() {
            result = identity(n) * coeffs[k] + (a - identity(n) * nodes[k].1) * result;
        }
        let mut magnitude = 0.0;
        let mut scale = 1.0;
        for (k, c) in coeffs.iter().enumerate() {
            magnitude += c.norm() * scale;
            scale *= shifted_norms[k];
        }
        let condition = magnitude / result.norm().max(f64::MIN_POSITIVE);
        if condition > POLY_CONDITION_LIMIT {
            log::warn!(
                "ill-conditioned interpolation for eigenvalue {} (estimate {condition:.3e})",
                spectrum.get(target).value
            );
        }
        worst = worst.max(condition);
        projectors.push(result);
    }
    PolyProjectors { projectors, condition: worst }
}

fn newton_coefficients(nodes: &[(usize, Complex64)], target: usize) -> Vec<Complex64> {
    let len = nodes.len();
    let mut column: Vec<Complex64> = nodes
        .iter()
        .map(|&(i, _)| real(if i == target { 1.0 } else { 0.0 }))
        .collect();
    let mut coeffs = vec![column[0]];
    for k in 1..len {
        column = (0..len - k)
            .map(|j| {
                if nodes[j].0 == nodes[j + k].0 {
                    real(0.0)
                } else {
                    (column[j + 1] - column[j]) / (nodes[j + k].1 - nodes[j].1)
                }
            })
            .collect();
        coeffs.push(column[0]);
    }
    coeffs
}

/// Worst relative residuals of the projector identities.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxiomReport {
    pub idempotent: f64,
    pub orthogonal: f64,
    pub complete: f64,
    pub commuting: f64,
    pub annihilated: f64,
    pub rank_matches: bool,
}

impl AxiomReport {
    pub fn worst(&self) -> f64 {
        [self.idempotent, self.orthogonal, self.complete, self.commuting, self.annihilated]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.rank_matches && self.worst() <= tol
    }
}

impl SpectralDecomposition {
    pub fn new(a: &IntMatrix, tol: f64) -> Result<Self> {
        let spectrum = Spectrum::of_matrix(a, tol)?;
        Self::with_spectrum(a.to_complex(), spectrum, tol)
    }

    /// Decomposition of `a` with a precomputed spectrum. Projector entries
    /// are snapped to small rationals when every eigenvalue is an integer
    /// and `a` has integer entries.
    pub fn with_spectrum(a: CMatrix, spectrum: Spectrum, tol: f64) -> Result<Self> {
        let mut projectors = Vec::new();
        let mut right_bases = Vec::new();
        let mut left_bases = Vec::new();
        for e in spectrum.iter() {
            let right = generalized_eigenspace(&a, e.value, e.multiplicity, tol)?;
            let left = left_generalized_eigenspace(&a, e.value, e.multiplicity, tol)?;
            projectors.push(spectral_projector(&right.basis, &left.basis)?.projector);
            right_bases.push(right.basis);
            left_bases.push(left.basis);
        }
        let integral = a.iter().all(|z| z.im == 0.0 && z.re.fract() == 0.0);
        let snapped = integral && spectrum.all_integer();
        if snapped {
            projectors = projectors.iter().map(snap_matrix).collect();
        }
        Ok(SpectralDecomposition { a, spectrum, projectors, right_bases, left_bases, tol, snapped })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Position of `value` in the spectrum.
    pub fn position(&self, value: Complex64) -> Option<usize> {
        self.spectrum.find(value, 1e-8)
    }

    pub fn projector(&self, value: Complex64) -> Option<&CMatrix> {
        self.position(value).map(|i| &self.projectors[i])
    }

    /// `(A - λI)^j E_λ` for the i-th eigenvalue.
    pub fn nilpotent_power(&self, i: usize, j: usize) -> CMatrix {
        let shifted = &self.a - identity(self.n()) * self.spectrum.get(i).value;
        mat_pow(&shifted, j as u64) * &self.projectors[i]
    }

    /// Jordan–Chevalley split `A = A_D + A_N`.
    pub fn jordan_chevalley(&self) -> (CMatrix, CMatrix) {
        let n = self.n();
        let mut diagonal = CMatrix::zeros(n, n);
        let mut nilpotent = CMatrix::zeros(n, n);
        for (i, e) in self.spectrum.iter().enumerate() {
            diagonal += &self.projectors[i] * e.value;
            nilpotent += self.nilpotent_power(i, 1);
        }
        (diagonal, nilpotent)
    }

    pub fn axiom_report(&self) -> AxiomReport {
        let n = self.n();
        let a_norm = self.a.norm().max(1.0);
        let mut report = AxiomReport { rank_matches: true, ..Default::default() };
        let mut sum = CMatrix::zeros(n, n);
        let mut norm_sum = 0.0;
        for (i, e) in self.spectrum.iter().enumerate() {
            let p = &self.projectors[i];
            let pn = p.norm().max(1.0);
            report.idempotent = report.idempotent.max((p * p - p).norm() / pn);
            report.commuting =
                report.commuting.max((&self.a * p - p * &self.a).norm() / (a_norm * pn));
            let shifted = &self.a - identity(n) * e.value;
            let scale = shifted.norm().max(1.0).powi(e.index as i32) * pn;
            report.annihilated = report
                .annihilated
                .max((mat_pow(&shifted, e.index as u64) * p).norm() / scale);
            report.rank_matches &= rank(p, self.tol) == e.multiplicity;
            for (j, q) in self.projectors.iter().enumerate() {
                if j != i {
                    let denom = pn * q.norm().max(1.0);
                    report.orthogonal = report.orthogonal.max((p * q).norm() / denom);
                }
            }
            sum += p;
            norm_sum += p.norm();
        }
        report.complete = (sum - identity(n)).norm() / norm_sum.max(1.0);
        report
    }

    /// Worst `|v_L' v_R| / (‖v_L'‖‖v_R‖)` over basis vectors of distinct eigenvalues.
    pub fn fredholm_orthogonality(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, left) in self.left_bases.iter().enumerate() {
            for (j, right) in self.right_bases.iter().enumerate() {
                if i == j {
                    continue;
                }
                for r in 0..left.nrows() {
                    for c in 0..right.ncols() {
                        let l = left.row(r);
                        let v = right.column(c);
                        let dot = (l * v)[(0, 0)].norm();
                        worst = worst.max(dot / (l.norm() * v.norm()).max(f64::MIN_POSITIVE));
                    }
                }
            }
        }
        worst
    }

    /// Relative residual of `Π_{λ≠0}(I - (A/λ)^{ν(0)})^{ν(λ)} = E_0`; `None`
    /// when 0 is not an eigenvalue.
    pub fn zero_projector_product_residual(&self) -> Option<f64> {
        let zero = self.spectrum.iter().position(|e| e.is_zero())?;
        let n = self.n();
        let nu0 = self.spectrum.get(zero).index as u64;
        let mut product = identity(n);
        for e in self.spectrum.iter().filter(|e| !e.is_zero()) {
            let factor = identity(n) - mat_pow(&(&self.a / e.value), nu0);
            product *= mat_pow(&factor, e.index as u64);
        }
        let e0 = &self.projectors[zero];
        Some((product - e0).norm() / e0.norm().max(1.0))
    }
}

/// `A_D = Σ λ E_λ`, `A_N = Σ (A - λI) E_λ`.
pub fn jordan_chevalley_split(decomposition: &SpectralDecomposition) -> (CMatrix, CMatrix) {
    decomposition.jordan_chevalley()
}
