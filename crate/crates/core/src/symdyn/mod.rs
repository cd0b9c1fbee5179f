//! Periodic-class masks, masked dominant eigenpairs, growth coefficients for
//! incomparable dominant components, and eigenvector support checks.


use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_integer::Integer;

use crate::digraph::{Digraph, IntMatrix, VertexSet};
use crate::error::{Error, Result};
use crate::numlinalg::{char_poly, eigenvalues, identity, mat_pow, spectral_radius, CMatrix};
use crate::regex::AutomatonSystem;
use crate::spectral::DOMINANCE_TOL;

/// Relative change below which power iteration stops.
pub const POWER_ITERATION_TOL: f64 = 1e-12;
const MAX_POWER_ITERATIONS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct DominantComponent {
    /// Position in the Frobenius-ordered component partition.
    pub index: usize,
    pub vertices: VertexSet,
    pub period: usize,
    pub classes: Vec<VertexSet>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominantStructure {
    pub rho: f64,
    pub components: Vec<DominantComponent>,
    /// Least common multiple of the component periods.
    pub period: usize,
    /// No walks between distinct dominant components.
    pub incomparable: bool,
}

/// Components whose spectral radius equals that of the whole digraph.
pub fn dominant_structure(graph: &Digraph) -> Result<DominantStructure> {
    let partition = graph.irreducible_components();
    let a = graph.adjacency();
    let radii: Vec<f64> = partition
        .components
        .iter()
        .map(|c| spectral_radius(&a.submatrix(&c.iter().copied().collect::<Vec<_>>())))
        .collect::<Result<_>>()?;
    let rho = radii.iter().cloned().fold(0.0, f64::max);
    if rho == 0.0 {
        return Err(Error::Nilpotent);
    }
    let mut components = Vec::new();
    for (index, vertices) in partition.components.iter().enumerate() {
        if radii[index] < rho * (1.0 - DOMINANCE_TOL) {
            continue;
        }
        let structure = graph.period(vertices)?;
        components.push(DominantComponent {
            index,
            vertices: vertices.clone(),
            period: structure.period,
            classes: structure.classes,
        });
    }
    let period = components.iter().fold(1, |acc, c| acc.lcm(&c.period));
    let incomparable = components.iter().all(|x| {
        components
            .iter()
            .all(|y| x.index == y.index || !partition.component_reaches(graph, x.index, y.index))
    });
    Ok(DominantStructure { rho, components, period, incomparable })
}

/// Masked dominant eigenpair for one periodic class of a dominant component.
#[derive(Clone, Debug)]
pub struct MaskedEigenpair {
    /// Position of the component in `DominantStructure::components`.
    pub component: usize,
    /// Class index within the component, starting at 0.
    pub class: usize,
    /// Vertices reaching or reached from the class in `D^p`.
    pub vertices: VertexSet,
    /// The `vertices`-mask of `A^p`.
    pub mask: IntMatrix,
    /// Left `ρ^p`-eigenvector (row).
    pub left: Vec<f64>,
    /// Right `ρ^p`-eigenvector (column).
    pub right: Vec<f64>,
}

fn to_real(m: &IntMatrix) -> DMatrix<f64> {
    let rows = m.to_f64_rows();
    DMatrix::from_fn(m.n(), m.n(), |i, j| rows[i][j])
}

/// Dominant eigenvector of a nonnegative matrix by power iteration from the
/// indicator vector of `support`.
fn power_iteration(m: &DMatrix<f64>, support: &VertexSet) -> Result<DVector<f64>> {
    let n = m.nrows();
    let mut x = DVector::from_fn(n, |i, _| if support.contains(&i) { 1.0 } else { 0.0 });
    x /= x.norm();
    for _ in 0..MAX_POWER_ITERATIONS {
        let mut y = m * &x;
        let norm = y.norm();
        if norm == 0.0 {
            return Err(Error::numerical("power iteration collapsed to zero"));
        }
        y /= norm;
        let change = (&y - &x).norm();
        x = y;
        if change <= POWER_ITERATION_TOL {
            return Ok(x);
        }
    }
    Err(Error::numerical("power iteration did not converge"))
}

/// Component Perron vectors `(l, r)` with `l·r = p` and `‖l‖ = ‖r‖`.
fn component_perron(a: &IntMatrix, component: &DominantComponent) -> Result<(Vec<f64>, Vec<f64>)> {
    let indices: Vec<usize> = component.vertices.iter().copied().collect();
    let sub = to_real(&a.submatrix(&indices)) + DMatrix::identity(indices.len(), indices.len());
    let all: VertexSet = (0..indices.len()).collect();
    let r = power_iteration(&sub, &all)?;
    let l = power_iteration(&sub.transpose(), &all)?;
    let t = (component.period as f64 / l.dot(&r)).sqrt();
    let expand = |v: &DVector<f64>| {
        let mut full = vec![0.0; a.n()];
        for (k, &i) in indices.iter().enumerate() {
            full[i] = v[k] * t;
        }
        full
    };
    Ok((expand(&l), expand(&r)))
}

/// Scale `v` to best match `target` on `class` in the least-squares sense.
fn align(v: &DVector<f64>, target: &[f64], class: &VertexSet) -> Vec<f64> {
    let num: f64 = class.iter().map(|&u| v[u] * target[u]).sum();
    let den: f64 = class.iter().map(|&u| v[u] * v[u]).sum();
    let s = if den > 0.0 { num / den } else { 0.0 };
    v.iter().map(|x| x * s).collect()
}

fn require_incomparable(structure: &DominantStructure) -> Result<()> {
    if structure.incomparable {
        Ok(())
    } else {
        Err(Error::Precondition(
            "dominant components are comparable (index > 1); use the spectral module instead".into(),
        ))
    }
}

/// Masks and eigenpairs for every class of dominant component `i`.
pub fn class_masks(
    graph: &Digraph,
    structure: &DominantStructure,
    i: usize,
) -> Result<Vec<MaskedEigenpair>> {
    require_incomparable(structure)?;
    let component = structure
        .components
        .get(i)
        .ok_or_else(|| Error::input(format!("no dominant component {i}")))?;
    let (l, r) = component_perron(graph.adjacency(), component)?;
    let powered = graph.power(component.period as u32);
    let mut pairs = Vec::new();
    for (j, class) in component.classes.iter().enumerate() {
        let (reaching, reached) = powered.reach_sets(class)?;
        let vertices: VertexSet = reaching.union(&reached).copied().collect();
        let mask = powered.adjacency().mask(&vertices);
        let real = to_real(&mask);
        let right = power_iteration(&real, &vertices)?;
        let left = power_iteration(&real.transpose(), &vertices)?;
        pairs.push(MaskedEigenpair {
            component: i,
            class: j,
            left: align(&left, &l, class),
            right: align(&right, &r, class),
            vertices,
            mask,
        });
    }
    Ok(pairs)
}

/// Masked eigenpairs of every dominant component, in structure order.
pub fn all_class_masks(
    graph: &Digraph,
    structure: &DominantStructure,
) -> Result<Vec<Vec<MaskedEigenpair>>> {
    (0..structure.components.len()).map(|i| class_masks(graph, structure, i)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `c_k = Σ_i Σ_j (w_L v_R^{i,j})(v_L^{i,j+k} w_R)` for `k = 0..P-1`, with
/// `w_L = v_Iᵀ` and `w_R = v_F`.
pub fn growth_coefficients(sys: &AutomatonSystem, structure: &DominantStructure) -> Result<Vec<f64>> {
    require_incomparable(structure)?;
    let masks = all_class_masks(&sys.digraph, structure)?;
    let w_left = sys.initial_vector();
    let w_right = sys.final_vector();
    Ok((0..structure.period)
        .map(|k| {
            masks
                .iter()
                .map(|pairs| {
                    let p = pairs.len();
                    (0..p)
                        .map(|j| dot(&w_left, &pairs[j].right) * dot(&pairs[(j + k) % p].left, &w_right))
                        .sum::<f64>()
                })
                .sum()
        })
        .collect())
}

/// Largest `|μ|/ρ` over eigenvalues strictly inside the spectral circle.
pub fn subdominant_ratio(a: &IntMatrix, rho: f64) -> Result<f64> {
    Ok(eigenvalues(&char_poly(a))?
        .iter()
        .map(|r| r.value.norm() / rho)
        .filter(|&r| r < 1.0 - DOMINANCE_TOL)
        .fold(0.0, f64::max))
}

/// Smallest `m ≥ 20` with `ratio^{Pm} ≤ 1e-9`; growth errors decay at this rate.
pub fn convergence_length(a: &IntMatrix, structure: &DominantStructure) -> Result<usize> {
    let ratio = subdominant_ratio(a, structure.rho)?;
    let needed = if ratio > 0.0 {
        (1e-9f64.ln() / (structure.period as f64 * ratio.ln())).ceil() as usize
    } else {
        0
    };
    Ok(needed.max(20))
}

/// `|f(Pm + k) / ρ^{Pm+k} - c_k|` using the exact structure function.
pub fn growth_error(sys: &AutomatonSystem, structure: &DominantStructure, c: &[f64], m: usize) -> Vec<f64> {
    (0..structure.period)
        .map(|k| {
            let len = structure.period * m + k;
            let f = sys.structure_function(len);
            let ratio = big_ratio(&f, structure.rho, len);
            (ratio - c[k]).abs()
        })
        .collect()
}

/// `f / ρ^len` without overflowing for long walks.
fn big_ratio(f: &num_bigint::BigInt, rho: f64, len: usize) -> f64 {
    use num_traits::ToPrimitive;
    let bits = f.bits();
    let shift = bits.saturating_sub(60);
    let mantissa = (f >> shift).to_f64().unwrap_or(0.0);
    mantissa * 2f64.powi(shift as i32) / rho.powi(len as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportWitness {
    pub vertex: usize,
    /// Walk from the coordinate to the witness (right) or from the witness
    /// to the coordinate (left); `None` if no witness exists.
    pub path: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportReport {
    pub witnesses: Vec<SupportWitness>,
    pub passed: bool,
}

fn component_has_eigenvalue(a: &IntMatrix, component: &VertexSet, lambda: Complex64) -> Result<bool> {
    let sub = a.submatrix(&component.iter().copied().collect::<Vec<_>>());
    Ok(eigenvalues(&char_poly(&sub))?
        .iter()
        .any(|r| (r.value - lambda).norm() <= 1e-8 * lambda.norm().max(1.0)))
}

/// Check that every nonzero coordinate of a generalized λ-eigenvector has a
/// walk to (right) or from (left) a nonzero coordinate inside a component
/// that has λ as an eigenvalue.
pub fn support_reachability_check(
    graph: &Digraph,
    v: &[Complex64],
    lambda: Complex64,
    side: Side,
) -> Result<SupportReport> {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let nonzero = |u: usize| scale > 0.0 && v[u].norm() > 1e-9 * scale;
    let partition = graph.irreducible_components();
    let eligible: Vec<bool> = partition
        .components
        .iter()
        .map(|c| component_has_eigenvalue(graph.adjacency(), c, lambda))
        .collect::<Result<_>>()?;
    let is_witness = |w: usize| nonzero(w) && eligible[partition.component_of[w]];
    let mut witnesses = Vec::new();
    for u in (0..graph.n()).filter(|&u| nonzero(u)) {
        let path = graph.shortest_walk(u, is_witness, side == Side::Left);
        witnesses.push(SupportWitness { vertex: u, path });
    }
    let passed = witnesses.iter().all(|w| w.path.is_some());
    Ok(SupportReport { witnesses, passed })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionReport {
    /// Position of the last component (Frobenius order) where `v` is nonzero.
    pub component: Option<usize>,
    pub restriction: Vec<Complex64>,
    pub residual: f64,
    pub passed: bool,
}

/// For the last component where `v` is nonzero, check that the restriction
/// is a generalized λ-eigenvector of that diagonal block with index ≤ ν.
pub fn component_restriction_check(
    graph: &Digraph,
    v: &[Complex64],
    lambda: Complex64,
    index: usize,
    tol: f64,
) -> RestrictionReport {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let partition = graph.irreducible_components();
    let found = partition
        .components
        .iter()
        .enumerate()
        .rev()
        .find(|(_, c)| c.iter().any(|&u| v[u].norm() > 1e-9 * scale));
    let Some((position, component)) = found else {
        return RestrictionReport { component: None, restriction: Vec::new(), residual: 0.0, passed: true };
    };
    let indices: Vec<usize> = component.iter().copied().collect();
    let block = graph.adjacency().submatrix(&indices).to_complex();
    let restriction: Vec<Complex64> = indices.iter().map(|&u| v[u]).collect();
    let shifted = &block - identity(indices.len()) * lambda;
    let x = CMatrix::from_column_slice(indices.len(), 1, &restriction);
    let applied = mat_pow(&shifted, index as u64) * &x;
    let bound = shifted.norm().max(1.0).powi(index as i32) * x.norm();
    let residual = applied.norm() / bound.max(f64::MIN_POSITIVE);
    RestrictionReport { component: Some(position), restriction, residual, passed: residual <= tol }
}

/// Claim checks over computed masks, as worst residuals.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StructuralReport {
    /// `P_{i,j} ∩ V_{i,j'} = ∅` for `j ≠ j'`.
    pub separate_sets: bool,
    /// Worst relative residual of `v_L A^p = ρ^p v_L` and `A^p v_R = ρ^p v_R`.
    pub full_space: f64,
    /// Worst relative residual of `v_L^{i,j} A = ρ v_L^{i,j+1}`.
    pub rotation: f64,
    /// Most negative entry over all pairs (0 when all nonnegative).
    pub min_entry: f64,
    /// Worst `|v_L v_R - 1|`.
    pub normalization: f64,
}

pub fn structural_report(
    graph: &Digraph,
    structure: &DominantStructure,
    masks: &[Vec<MaskedEigenpair>],
) -> StructuralReport {
    let a = to_real(graph.adjacency());
    let rho = structure.rho;
    let mut report = StructuralReport { separate_sets: true, ..Default::default() };
    for (component, pairs) in structure.components.iter().zip(masks) {
        let p = component.period;
        let ap = to_real(&graph.adjacency().pow(p as u32));
        let rho_p = rho.powi(p as i32);
        for (j, pair) in pairs.iter().enumerate() {
            for (jj, other) in pairs.iter().enumerate() {
                if j != jj && !component.classes[j].is_disjoint(&other.vertices) {
                    report.separate_sets = false;
                }
            }
            let left = DVector::from_column_slice(&pair.left);
            let right = DVector::from_column_slice(&pair.right);
            let scale = ap.norm().max(1.0);
            let l_res = (ap.transpose() * &left - &left * rho_p).norm() / (scale * left.norm().max(1e-300));
            let r_res = (&ap * &right - &right * rho_p).norm() / (scale * right.norm().max(1e-300));
            report.full_space = report.full_space.max(l_res).max(r_res);
            let next = DVector::from_column_slice(&pairs[(j + 1) % p].left);
            let rot = (a.transpose() * &left - next * rho).norm() / (a.norm().max(1.0) * left.norm().max(1e-300));
            report.rotation = report.rotation.max(rot);
            let min = pair.left.iter().chain(&pair.right).cloned().fold(0.0, f64::min);
            report.min_entry = report.min_entry.min(min);
            report.normalization = report.normalization.max((left.dot(&right) - 1.0).abs());
        }
    }
    report
}
