use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::poly::{char_poly, IntPolynomial};
use super::roots::aberth;
use super::{identity, CMatrix, CVector};
use crate::digraph::IntMatrix;
use crate::error::{Error, Result};

/// A root of a characteristic polynomial with its exact multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Set when the root was confirmed to be this integer by exact evaluation.
    pub exact: Option<i64>,
}

/// One eigenvalue record: λ, algebraic multiplicity m(λ), index ν(λ).
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenvalue {
    pub value: Complex64,
    pub multiplicity: usize,
    pub index: usize,
    pub exact: Option<i64>,
}

impl Eigenvalue {
    pub fn is_zero(&self) -> bool {
        self.exact == Some(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Eigenvalue>,
}

/// Separation below which two distinct roots are considered numerically merged.
const CLUSTER_TOL: f64 = 1e-8;

/// Roots of a monic integer polynomial with exact multiplicities.
///
/// Multiplicities come from the squarefree decomposition; each squarefree
/// factor is solved numerically and integer roots are confirmed exactly.
/// Sorted by decreasing modulus, then decreasing real and imaginary part.
pub fn eigenvalues(p: &IntPolynomial) -> Result<Vec<Root>> {
    if p.degree() == 0 || !p.is_monic() {
        return Err(Error::input("eigenvalues need a monic polynomial of degree at least 1"));
    }
    let mut out = Vec::new();
    for (factor, multiplicity) in p.squarefree_factors() {
        let mut roots = aberth(&factor.to_complex_coeffs())?;
        conjugate_pairs(&mut roots);
        for value in roots {
            let exact = exact_integer_root(&factor, value);
            let value = exact.map_or(value, |k| Complex64::new(k as f64, 0.0));
            out.push(Root { value, multiplicity, exact });
        }
    }
    sort_roots(&mut out, |r| r.value);
    for w in out.windows(2) {
        let gap = (w[0].value - w[1].value).norm();
        if gap <= CLUSTER_TOL * w[0].value.norm().max(1.0) {
            return Err(Error::numerical(format!(
                "distinct eigenvalues {} and {} are not numerically separated",
                w[0].value, w[1].value
            )));
        }
    }
    Ok(out)
}

fn sort_roots<T>(items: &mut [T], key: impl Fn(&T) -> Complex64) {
    items.sort_by(|a, b| {
        let (x, y) = (key(a), key(b));
        y.norm()
            .total_cmp(&x.norm())
            .then(y.re.total_cmp(&x.re))
            .then(y.im.total_cmp(&x.im))
    });
}

fn exact_integer_root(p: &IntPolynomial, z: Complex64) -> Option<i64> {
    if z.im.abs() > 1e-6 * z.norm().max(1.0) {
        return None;
    }
    let k = z.re.round();
    if !k.is_finite() || k.abs() > 2f64.powi(53) || (z.re - k).abs() > 1e-6 * k.abs().max(1.0) {
        return None;
    }
    let k = k.to_i64()?;
    p.eval_int(&BigInt::from(k)).is_zero().then_some(k)
}

/// Make the roots of a real polynomial closed under conjugation. A root
/// without a nearby conjugate partner is real; partners are made exact mirrors.
fn conjugate_pairs(roots: &mut [Complex64]) {
    let near = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-6 * a.norm().max(1.0);
    let mut paired = vec![false; roots.len()];
    for i in 0..roots.len() {
        if paired[i] {
            continue;
        }
        let target = roots[i].conj();
        let partner = (0..roots.len())
            .filter(|&j| j != i && !paired[j] && near(target, roots[j]))
            .min_by(|&a, &b| (roots[a] - target).norm().total_cmp(&(roots[b] - target).norm()));
        match partner {
            Some(j) if roots[i].im.abs() > 1e-8 * roots[i].norm().max(1.0) => {
                let upper = if roots[i].im > 0.0 { roots[i] } else { roots[i].conj() };
                let other = if roots[j].im > 0.0 { roots[j] } else { roots[j].conj() };
                let mid = 0.5 * (upper + other);
                roots[i] = if roots[i].im > 0.0 { mid } else { mid.conj() };
                roots[j] = roots[i].conj();
                paired[i] = true;
                paired[j] = true;
            }
            _ => {
                if roots[i].im.abs() <= 1e-8 * roots[i].norm().max(1.0) {
                    roots[i].im = 0.0;
                }
            }
        }
    }
}

impl Spectrum {
    /// Eigenvalues of an integer matrix with multiplicities and indices.
    pub fn of_matrix(a: &IntMatrix, tol: f64) -> Result<Spectrum> {
        let ac = a.to_complex();
        let mut records = Vec::new();
        for root in eigenvalues(&char_poly(a))? {
            let index = index_of(&ac, root.value, root.multiplicity, tol)?;
            records.push(Eigenvalue {
                value: root.value,
                multiplicity: root.multiplicity,
                index,
                exact: root.exact,
            });
        }
        Ok(Spectrum { eigenvalues: records })
    }

    /// Spectrum from already known records, sorted canonically.
    pub fn from_records(mut eigenvalues: Vec<Eigenvalue>) -> Spectrum {
        sort_roots(&mut eigenvalues, |e| e.value);
        Spectrum { eigenvalues }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Eigenvalue> {
        self.eigenvalues.iter()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn get(&self, i: usize) -> &Eigenvalue {
        &self.eigenvalues[i]
    }

    /// Σ m(λ), the matrix dimension.
    pub fn dimension(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    /// Position of the eigenvalue closest to `value`, if within `tol` of it.
    pub fn find(&self, value: Complex64, tol: f64) -> Option<usize> {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(i, e)| (i, (e.value - value).norm()))
            .filter(|&(_, d)| d <= tol * value.norm().max(1.0))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }

    pub fn zero(&self) -> Option<&Eigenvalue> {
        self.eigenvalues.iter().find(|e| e.is_zero())
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.value.norm()).fold(0.0, f64::max)
    }

    pub fn all_integer(&self) -> bool {
        self.eigenvalues.iter().all(|e| e.exact.is_some())
    }
}

/// Spectral radius of an integer matrix.
pub fn spectral_radius(a: &IntMatrix) -> Result<f64> {
    Ok(eigenvalues(&char_poly(a))?
        .iter()
        .map(|r| r.value.norm())
        .fold(0.0, f64::max))
}

/// Singular values in decreasing order with the matching right singular
/// vectors as columns.
pub(crate) fn right_singular(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vectors = CMatrix::from_fn(cols, order.len(), |r, c| v_t[(order[c], r)].conj());
    (values, vectors)
}

fn numerical_rank(values: &[f64], tol: f64) -> usize {
    let top = values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > tol * top).count()
}

/// Orthonormal basis of the numerical null space of `m`; singular values at
/// or below `tol` times the largest one count as zero.
pub fn null_space(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let (values, vectors) = right_singular(m);
    let rank = numerical_rank(&values, tol);
    (rank..vectors.ncols()).map(|c| vectors.column(c).into_owned()).collect()
}

pub fn rank(m: &CMatrix, tol: f64) -> usize {
    numerical_rank(&right_singular(m).0, tol)
}

/// Basis of a generalized eigenspace together with the index ν(λ).
#[derive(Clone, Debug)]
pub struct GeneralizedEigenspace {
    /// Right: n×m columns. Left: m×n rows.
    pub basis: CMatrix,
    pub index: usize,
}

/// Nullities of `(A - λI)^k` for k = 1..=max_k.
pub fn nullity_ladder(a: &CMatrix, lambda: Complex64, max_k: usize, tol: f64) -> Vec<usize> {
    let n = a.nrows();
    let shifted = a - identity(n) * lambda;
    let mut power = identity(n);
    (1..=max_k)
        .map(|_| {
            power = &power * &shifted;
            n - rank(&power, tol)
        })
        .collect()
}

fn index_of(a: &CMatrix, lambda: Complex64, multiplicity: usize, tol: f64) -> Result<usize> {
    Ok(generalized_eigenspace(a, lambda, multiplicity, tol)?.index)
}

/// Right generalized λ-eigenspace: null space of `(A - λI)^k` for the least
/// k whose nullity reaches `multiplicity`.
pub fn generalized_eigenspace(
    a: &CMatrix,
    lambda: Complex64,
    multiplicity: usize,
    tol: f64,
) -> Result<GeneralizedEigenspace> {
    let n = a.nrows();
    let shifted = a - identity(n) * lambda;
    let mut power = identity(n);
    let mut last = 0;
    for k in 1..=n.max(1) {
        power = &power * &shifted;
        let (values, vectors) = right_singular(&power);
        let nullity = n - numerical_rank(&values, tol);
        last = nullity;
        if nullity >= multiplicity {
            if nullity > multiplicity {
                log::warn!(
                    "nullity {nullity} of (A - {lambda}I)^{k} exceeds multiplicity {multiplicity}"
                );
            }
            let basis = vectors.columns(n - multiplicity, multiplicity).into_owned();
            return Ok(GeneralizedEigenspace { basis, index: k });
        }
    }
    Err(Error::numerical(format!(
        "nullity for eigenvalue {lambda} stalls at {last} < multiplicity {multiplicity}; \
         rank tolerance {tol:e} is likely misconfigured"
    )))
}

/// Left generalized λ-eigenspace, rows `v` with `v (A - λI)^ν = 0`.
pub fn left_generalized_eigenspace(
    a: &CMatrix,
    lambda: Complex64,
    multiplicity: usize,
    tol: f64,
) -> Result<GeneralizedEigenspace> {
    let right = generalized_eigenspace(&a.transpose(), lambda, multiplicity, tol)?;
    Ok(GeneralizedEigenspace { basis: right.basis.transpose(), index: right.index })
}

/// `m_A(x) = Π (x - λ)^{ν(λ)}`, coefficients ascending.
pub fn minimal_polynomial(spectrum: &Spectrum) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for e in spectrum.iter() {
        for _ in 0..e.index {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * e.value;
            }
            coeffs = next;
        }
    }
    coeffs
}

/// `p(A)` by Horner's rule.
pub fn eval_matrix_poly(coeffs: &[Complex64], a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    coeffs
        .iter()
        .rev()
        .fold(CMatrix::zeros(n, n), |acc, c| acc * a + identity(n) * *c)
}
