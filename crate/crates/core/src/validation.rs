//! Self-check suite: runs every module's invariants against one system.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::digraph::IntMatrix;
use crate::error::{Error, Result};
use crate::numlinalg::{identity, mat_pow, CMatrix};
use crate::pseudoinverse::{
    adjugate_int, adjugate_spectral, drazin, drazin_axiom_residuals, elementary_factorization,
    factor_product, resolvent_limit_check,
};
use crate::regex::AutomatonSystem;
use crate::spectral::{
    dominant_term, eigenvector_factorization, power_expansion, spectral_projector_poly,
    structure_closed_form, ScalarClosedForm, SpectralDecomposition, POLY_CONDITION_LIMIT,
};
use crate::symdyn::{
    all_class_masks, component_restriction_check, convergence_length, dominant_structure,
    growth_coefficients, growth_error, structural_report, support_reachability_check, Side,
};

/// One named check and the tolerance it was judged at.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), passed: value <= tolerance, value, tolerance }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed, value: if passed { 0.0 } else { 1.0 }, tolerance: 0.0 }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn relative(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Counts up to 2^50 must round exactly; larger ones are compared relatively.
fn count_mismatch(exact: &BigInt, rounded: &BigInt) -> f64 {
    let diff = (exact - rounded).abs();
    if exact.bits() <= 50 {
        diff.to_f64().unwrap_or(f64::INFINITY)
    } else {
        let scale = exact.abs().to_f64().unwrap_or(f64::INFINITY);
        if diff.to_f64().unwrap_or(f64::INFINITY) <= 1e-9 * scale {
            0.0
        } else {
            1.0
        }
    }
}

/// Closed form of `A^n` against exact integer powers for `n ≤ depth`.
pub fn power_expansion_check(a: &IntMatrix, decomp: &SpectralDecomposition, depth: usize) -> Check {
    let form = power_expansion(decomp);
    let mut worst = 0.0f64;
    let mut exact = IntMatrix::identity(a.n());
    for n in 0..=depth {
        worst = worst.max(relative(&form.evaluate(n as u64), &exact.to_complex()));
        exact = exact.mul(a);
    }
    Check::at_most(format!("power expansion vs A^n, n <= {depth}"), worst, 1e-8)
}

/// Rounded structure-function closed form against the counting oracle;
/// the value is the number of mismatching lengths.
pub fn closed_form_check(sys: &AutomatonSystem, form: &ScalarClosedForm, depth: usize) -> Check {
    let mismatches: f64 = (0..=depth)
        .map(|m| count_mismatch(&sys.structure_function(m), &form.evaluate_rounded(m as u64)))
        .sum();
    Check::at_most(format!("closed form vs DP counts, m <= {depth}"), mismatches, 0.0)
}

fn spectral_checks(a: &IntMatrix, decomp: &SpectralDecomposition, depth: usize, checks: &mut Vec<Check>) {
    let report = decomp.axiom_report();
    checks.push(Check::at_most("projector axioms", report.worst(), 1e-6));
    checks.push(Check::flag("projector ranks equal multiplicities", report.rank_matches));

    let poly = spectral_projector_poly(&decomp.a, &decomp.spectrum);
    if poly.condition <= POLY_CONDITION_LIMIT {
        let worst = poly
            .projectors
            .iter()
            .zip(&decomp.projectors)
            .map(|(p, e)| relative(p, e))
            .fold(0.0, f64::max);
        checks.push(Check::at_most("outer-product vs polynomial projectors", worst, 1e-6));
    }

    checks.push(power_expansion_check(a, decomp, depth));

    checks.push(Check::at_most("Fredholm orthogonality", decomp.fredholm_orthogonality(), 1e-8));
    if let Some(r) = decomp.zero_projector_product_residual() {
        checks.push(Check::at_most("zero projector as product", r, 1e-8));
    }

    let (diagonal, nilpotent) = decomp.jordan_chevalley();
    let n = decomp.n();
    let split = relative(&(&diagonal + &nilpotent), &decomp.a)
        .max((mat_pow(&nilpotent, n as u64)).norm() / decomp.a.norm().max(1.0).powi(n as i32))
        .max((&diagonal * &nilpotent - &nilpotent * &diagonal).norm() / decomp.a.norm().max(1.0).powi(2));
    checks.push(Check::at_most("Jordan-Chevalley split", split, 1e-8));
}

fn pseudoinverse_checks(a: &IntMatrix, decomp: &SpectralDecomposition, checks: &mut Vec<Check>) {
    let n = decomp.n();
    let x = drazin(decomp);
    let zero = decomp.spectrum.iter().position(|e| e.is_zero());
    let nu0 = zero.map_or(0, |i| decomp.spectrum.get(i).index);
    let axioms = drazin_axiom_residuals(&decomp.a, &x, nu0);
    checks.push(Check::at_most("Drazin axioms", axioms.into_iter().fold(0.0, f64::max), 1e-8));
    let e0 = zero.map_or_else(|| CMatrix::zeros(n, n), |i| decomp.projectors[i].clone());
    let complement = identity(n) - &decomp.a * &x;
    checks.push(Check::at_most("I - A A^D = E_0", (complement - &e0).norm() / e0.norm().max(1.0), 1e-8));

    let exact = adjugate_int(a).to_complex();
    checks.push(Check::at_most("spectral adjugate vs cofactors", relative(&adjugate_spectral(decomp), &exact), 1e-6));

    let factors = elementary_factorization(&decomp.a);
    checks.push(Check::at_most(
        "elementary factorization reconstructs A",
        relative(&factor_product(&factors, n), &decomp.a),
        1e-8,
    ));

    // the error shrinks like C·h; judge the last step against the first
    for e in decomp.spectrum.iter().filter(|e| !e.is_zero()).take(1) {
        match resolvent_limit_check(decomp, e.value, 6) {
            Ok(r) => {
                let value = r.final_error / r.errors[0].max(1.0);
                let mut check = Check::at_most(format!("resolvent limit at {}", e.value), value, 1e-4);
                check.passed &= r.decreasing;
                checks.push(check);
            }
            Err(_) => checks.push(Check::flag(format!("resolvent limit at {}", e.value), false)),
        }
    }
}

fn support_checks(decomp: &SpectralDecomposition, sys: &AutomatonSystem, checks: &mut Vec<Check>) {
    let graph = &sys.digraph;
    let mut supports = true;
    let mut restriction = 0.0f64;
    for (i, e) in decomp.spectrum.iter().enumerate() {
        let right = &decomp.right_bases[i];
        for c in 0..right.ncols() {
            let v: Vec<Complex64> = right.column(c).iter().copied().collect();
            supports &= support_reachability_check(graph, &v, e.value, Side::Right).is_ok_and(|r| r.passed);
            restriction = restriction.max(component_restriction_check(graph, &v, e.value, e.index, 1e-8).residual);
        }
        let left = &decomp.left_bases[i];
        for r in 0..left.nrows() {
            let v: Vec<Complex64> = left.row(r).iter().copied().collect();
            supports &= support_reachability_check(graph, &v, e.value, Side::Left).is_ok_and(|r| r.passed);
        }
    }
    checks.push(Check::flag("eigenvector supports reach eigenvalue components", supports));
    checks.push(Check::at_most("component restrictions are generalized eigenvectors", restriction, 1e-8));
}

fn dominant_checks(decomp: &SpectralDecomposition, sys: &AutomatonSystem, checks: &mut Vec<Check>) -> Result<()> {
    let dominant = dominant_term(decomp)?;
    let mut factored = true;
    for top in &dominant.top {
        factored &= eigenvector_factorization(&top.e_hat, &decomp.a, top.eigenvalue, decomp.tol).is_ok();
    }
    checks.push(Check::flag("dominant eigenvector factorization", factored));

    let graph = &sys.digraph;
    let structure = dominant_structure(graph)?;
    if !structure.incomparable {
        return Ok(());
    }
    let masks = all_class_masks(graph, &structure)?;
    let report = structural_report(graph, &structure, &masks);
    checks.push(Check::flag("class masks separate", report.separate_sets));
    checks.push(Check::at_most("masked pairs are eigenvectors of A^p", report.full_space, 1e-8));
    checks.push(Check::at_most("rotation law", report.rotation, 1e-8));
    checks.push(Check::at_most("masked pairs nonnegative", (-report.min_entry).max(0.0), 1e-10));
    let c = growth_coefficients(sys, &structure)?;
    let m = convergence_length(graph.adjacency(), &structure)?;
    let worst = growth_error(sys, &structure, &c, m).into_iter().fold(0.0, f64::max);
    checks.push(Check::at_most(format!("growth coefficients converge at m = {m}"), worst, 1e-6));
    Ok(())
}

/// Runs the full suite. Numerical failures inside a check become failed
/// checks; only a failing decomposition is an error.
pub fn validate(sys: &AutomatonSystem, depth: usize, tol: f64) -> Result<Vec<Check>> {
    let a = sys.digraph.adjacency();
    let decomp = SpectralDecomposition::new(a, tol)?;
    let mut checks = Vec::new();
    spectral_checks(a, &decomp, depth, &mut checks);
    pseudoinverse_checks(a, &decomp, &mut checks);
    support_checks(&decomp, sys, &mut checks);

    match structure_closed_form(sys, tol) {
        Ok(form) => checks.push(closed_form_check(sys, &form, depth)),
        Err(e) => {
            log::warn!("closed form failed: {e}");
            checks.push(Check::flag("closed form vs DP counts", false));
        }
    }

    match dominant_checks(&decomp, sys, &mut checks) {
        Ok(()) | Err(Error::Nilpotent) => {}
        Err(e) => {
            log::warn!("dominant analysis failed: {e}");
            checks.push(Check::flag("dominant analysis", false));
        }
    }
    Ok(checks)
}
