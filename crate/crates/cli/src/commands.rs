use std::fmt::Write;

use num_traits::ToPrimitive;
use serde_json::{json, Value};
use walkcount::digraph::{fmt_set, IntMatrix, VertexSet};
use walkcount::numlinalg::{char_poly, complex_json, matrix_json, real_json, CMatrix};
use walkcount::pseudoinverse::{adjugate_int, adjugate_spectral, drazin as drazin_inverse, drazin_axiom_residuals};
use walkcount::regex::AutomatonSystem;
use walkcount::spectral::{dominant_term, structure_closed_form, DominantTerm, SpectralDecomposition};
use walkcount::symdyn::{
    all_class_masks, convergence_length, dominant_structure, growth_coefficients, growth_error,
    DominantStructure,
};
use walkcount::validation::{all_passed, closed_form_check, power_expansion_check, validate as run_suite, Check};
use walkcount::{Error, Result};

use crate::input::Source;
use crate::Common;

/// Growth limits are judged at this absolute tolerance.
const GROWTH_TOL: f64 = 1e-6;

pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    fn new(common: &Common, text: String, json: Value, ok: bool) -> Self {
        let text = if common.json {
            serde_json::to_string_pretty(&json).expect("report serializes")
        } else {
            text
        };
        Outcome { text, code: if ok { 0 } else { 3 } }
    }
}

fn set_json(set: &VertexSet) -> Value {
    json!(set.iter().map(|v| v + 1).collect::<Vec<_>>())
}

/// Integer matrix rows; entries beyond i64 are written as strings.
fn int_matrix_json(m: &IntMatrix) -> Value {
    let entry = |x: &num_bigint::BigInt| x.to_i64().map_or_else(|| json!(x.to_string()), |v| json!(v));
    Value::Array((0..m.n()).map(|i| Value::Array(m.row(i).iter().map(entry).collect())).collect())
}

fn source_json(source: &Source) -> Value {
    json!({ "kind": source.kind, "value": source.value })
}

fn fmt_complex(z: num_complex::Complex64, exact: bool) -> String {
    let part = |x: f64| match real_json(x, exact) {
        Value::String(s) => s,
        other => format!("{:.6}", other.as_f64().unwrap_or(f64::NAN)),
    };
    if z.im.abs() <= 1e-12 {
        part(z.re)
    } else {
        format!("{}{}{}i", part(z.re), if z.im < 0.0 { "-" } else { "+" }, part(z.im.abs()))
    }
}

fn fmt_matrix(m: &CMatrix, exact: bool, indent: &str) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|&z| format!("{:>10}", fmt_complex(z, exact))).collect();
        let _ = writeln!(out, "{indent}[{}]", cells.join(" "));
    }
    out
}

fn fmt_checks(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        let _ = writeln!(out, "  {status}  {}  (value {:.3e}, tol {:.0e})", c.name, c.value, c.tolerance);
    }
    out
}

fn checks_json(checks: &[Check]) -> Value {
    serde_json::to_value(checks).expect("checks serialize")
}

fn spectrum_json(decomp: &SpectralDecomposition) -> Value {
    Value::Array(
        decomp
            .spectrum
            .iter()
            .map(|e| {
                json!({
                    "eigenvalue": complex_json(e.value, e.exact.is_some()),
                    "multiplicity": e.multiplicity,
                    "index": e.index,
                })
            })
            .collect(),
    )
}

fn dominant_json(d: &DominantTerm, exact: bool) -> Value {
    json!({
        "rho": d.rho,
        "index": d.index,
        "eigenvalues": d.dominant.iter().map(|&z| complex_json(z, exact)).collect::<Vec<_>>(),
        "top": d.top.iter().map(|t| json!({
            "eigenvalue": complex_json(t.eigenvalue, exact),
            "e_hat": matrix_json(&t.e_hat, exact),
            "rank": t.rank,
        })).collect::<Vec<_>>(),
        "flagged": d.flagged(),
    })
}

struct Growth {
    structure: DominantStructure,
    coefficients: Vec<f64>,
    length: usize,
    errors: Vec<f64>,
}

fn growth(sys: &AutomatonSystem) -> Result<Option<Growth>> {
    let structure = dominant_structure(&sys.digraph)?;
    if !structure.incomparable {
        return Ok(Some(Growth { structure, coefficients: Vec::new(), length: 0, errors: Vec::new() }));
    }
    let coefficients = growth_coefficients(sys, &structure)?;
    let length = convergence_length(sys.digraph.adjacency(), &structure)?;
    let errors = growth_error(sys, &structure, &coefficients, length);
    Ok(Some(Growth { structure, coefficients, length, errors }))
}

pub fn analyze(common: &Common, depth: usize) -> Result<Outcome> {
    let (sys, source) = common.input.load()?;
    let a = sys.digraph.adjacency();
    let poly = char_poly(a);
    let decomp = SpectralDecomposition::new(a, common.tol)?;
    let form = structure_closed_form(&sys, common.tol)?;
    let dominant = match dominant_term(&decomp) {
        Ok(d) => Some(d),
        Err(Error::Nilpotent) => None,
        Err(e) => return Err(e),
    };
    let growth = if dominant.is_some() { growth(&sys)? } else { None };

    let mut checks = vec![closed_form_check(&sys, &form, depth), power_expansion_check(a, &decomp, depth)];
    if let Some(g) = growth.as_ref().filter(|g| g.structure.incomparable) {
        let worst = g.errors.iter().cloned().fold(0.0, f64::max);
        checks.push(Check::at_most(format!("growth coefficients converge at m = {}", g.length), worst, GROWTH_TOL));
    }
    let ok = all_passed(&checks);

    let mut text = String::new();
    let _ = writeln!(text, "input: {} {} ({} states)", source.kind, source.value, sys.n());
    let _ = writeln!(text, "initial: {}  final: {}", fmt_set(&sys.initial), fmt_set(&sys.accepting));
    let _ = writeln!(text, "characteristic polynomial: {poly}");
    let _ = writeln!(text, "spectrum:");
    for e in decomp.spectrum.iter() {
        let _ = writeln!(
            text,
            "  λ = {:<12} multiplicity {}  index {}",
            fmt_complex(e.value, e.exact.is_some()),
            e.multiplicity,
            e.index
        );
    }
    let _ = writeln!(text, "closed form: f(m) = {}", form.describe());
    match &dominant {
        Some(d) => {
            let _ = writeln!(text, "dominant: ρ = {:.6}, index {}, {} dominant eigenvalue(s)", d.rho, d.index, d.dominant.len());
            for t in &d.top {
                let _ = writeln!(text, "  Ê for λ = {} (rank {}):", fmt_complex(t.eigenvalue, decomp.snapped), t.rank);
                text.push_str(&fmt_matrix(&t.e_hat, decomp.snapped, "    "));
            }
        }
        None => {
            let _ = writeln!(text, "dominant: none (nilpotent, all walks die out)");
        }
    }
    if let Some(g) = &growth {
        if g.structure.incomparable {
            let _ = writeln!(text, "growth coefficients (P = {}):", g.structure.period);
            for (k, c) in g.coefficients.iter().enumerate() {
                let _ = writeln!(text, "  c_{k} = {c:.9}  (|f(Pm+k)/ρ^(Pm+k) - c_k| = {:.1e} at m = {})", g.errors[k], g.length);
            }
        } else {
            let _ = writeln!(text, "growth coefficients: dominant components are comparable; see the dominant term");
        }
    }
    let _ = writeln!(text, "checks:");
    text.push_str(&fmt_checks(&checks));

    let growth_value = growth.as_ref().map(|g| {
        json!({
            "incomparable": g.structure.incomparable,
            "period": g.structure.period,
            "coefficients": g.coefficients,
            "checked_at_m": g.length,
            "errors": g.errors,
            "tolerance": GROWTH_TOL,
        })
    });
    let mut closed = form.to_json();
    closed["text"] = json!(form.describe());
    let report = json!({
        "input": source_json(&source),
        "tolerance": common.tol,
        "dfa": sys.to_dfa_json(),
        "characteristic_polynomial": poly.to_string(),
        "spectrum": spectrum_json(&decomp),
        "closed_form": closed,
        "dominant": dominant.as_ref().map(|d| dominant_json(d, decomp.snapped)),
        "growth": growth_value,
        "checks": checks_json(&checks),
    });
    Ok(Outcome::new(common, text.trim_end().to_string(), report, ok))
}

pub fn count(common: &Common, length: usize) -> Result<Outcome> {
    let (sys, source) = common.input.load()?;
    let value = sys.structure_function(length);
    let report = json!({
        "input": source_json(&source),
        "length": length,
        "initial": set_json(&sys.initial),
        "final": set_json(&sys.accepting),
        "count": value.to_string(),
    });
    Ok(Outcome::new(common, value.to_string(), report, true))
}

pub fn projectors(common: &Common) -> Result<Outcome> {
    let (sys, source) = common.input.load()?;
    let decomp = SpectralDecomposition::new(sys.digraph.adjacency(), common.tol)?;
    let axioms = decomp.axiom_report();
    let checks = vec![
        Check::at_most("projector axioms", axioms.worst(), 1e-8),
        Check::flag("projector ranks equal multiplicities", axioms.rank_matches),
    ];
    let exact = decomp.snapped;
    let mut text = String::new();
    for (e, p) in decomp.spectrum.iter().zip(&decomp.projectors) {
        let _ = writeln!(
            text,
            "E for λ = {} (multiplicity {}, index {}):",
            fmt_complex(e.value, e.exact.is_some()),
            e.multiplicity,
            e.index
        );
        text.push_str(&fmt_matrix(p, exact, "  "));
    }
    let _ = writeln!(text, "checks:");
    text.push_str(&fmt_checks(&checks));
    let report = json!({
        "input": source_json(&source),
        "tolerance": common.tol,
        "exact": exact,
        "projectors": decomp.spectrum.iter().zip(&decomp.projectors).map(|(e, p)| json!({
            "eigenvalue": complex_json(e.value, e.exact.is_some()),
            "multiplicity": e.multiplicity,
            "index": e.index,
            "projector": matrix_json(p, exact),
        })).collect::<Vec<_>>(),
        "checks": checks_json(&checks),
    });
    Ok(Outcome::new(common, text.trim_end().to_string(), report, all_passed(&checks)))
}

pub fn drazin(common: &Common) -> Result<Outcome> {
    let (sys, source) = common.input.load()?;
    let decomp = SpectralDecomposition::new(sys.digraph.adjacency(), common.tol)?;
    let x = drazin_inverse(&decomp);
    let nu0 = decomp.spectrum.iter().find(|e| e.is_zero()).map_or(0, |e| e.index);
    let residual = drazin_axiom_residuals(&decomp.a, &x, nu0).into_iter().fold(0.0, f64::max);
    let checks = vec![Check::at_most("Drazin axioms", residual, 1e-8)];
    let exact = decomp.snapped;
    let mut text = format!("Drazin inverse (index of 0: {nu0}):\n");
    text.push_str(&fmt_matrix(&x, exact, "  "));
    let _ = writeln!(text, "checks:");
    text.push_str(&fmt_checks(&checks));
    let report = json!({
        "input": source_json(&source),
        "tolerance": common.tol,
        "zero_index": nu0,
        "drazin": matrix_json(&x, exact),
        "checks": checks_json(&checks),
    });
    Ok(Outcome::new(common, text.trim_end().to_string(), report, all_passed(&checks)))
}

pub fn adjugate(common: &Common) -> Result<Outcome> {
    let (sys, source) = common.input.load()?;
    let a = sys.digraph.adjacency();
    let exact = adjugate_int(a);
    let decomp = SpectralDecomposition::new(a, common.tol)?;
    let spectral = adjugate_spectral(&decomp);
    let reference = exact.to_complex();
    let diff = (&spectral - &reference).norm() / reference.norm().max(1.0);
    let checks = vec![Check::at_most("spectral adjugate vs cofactors", diff, 1e-6)];
    let mut text = String::from("adjugate (exact cofactors):\n");
    text.push_str(&fmt_matrix(&reference, true, "  "));
    let _ = writeln!(text, "checks:");
    text.push_str(&fmt_checks(&checks));
    let report = json!({
        "input": source_json(&source),
        "tolerance": common.tol,
        "determinant": a.determinant().to_string(),
        "adjugate": int_matrix_json(&exact),
        "spectral": matrix_json(&spectral, decomp.snapped),
        "checks": checks_json(&checks),
    });
    Ok(Outcome::new(common, text.trim_end().to_string(), report, all_passed(&checks)))
}

pub fn classes(common: &Common) -> Result<Outcome> {
    let (sys, source) = common.input.load()?;
    let graph = &sys.digraph;
    let structure = dominant_structure(graph)?;
    let masks = all_class_masks(graph, &structure)?;
    let mut text = format!("ρ = {:.6}, P = {}\n", structure.rho, structure.period);
    let mut components = Vec::new();
    for (component, pairs) in structure.components.iter().zip(&masks) {
        let _ = writeln!(text, "component {} (period {}):", fmt_set(&component.vertices), component.period);
        let mut entries = Vec::new();
        for (class, pair) in component.classes.iter().zip(pairs) {
            let _ = writeln!(text, "  class {}: V = {}", fmt_set(class), fmt_set(&pair.vertices));
            let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ");
            let _ = writeln!(text, "    v_L = ({})", fmt(&pair.left));
            let _ = writeln!(text, "    v_R = ({})", fmt(&pair.right));
            entries.push(json!({
                "class": set_json(class),
                "vertices": set_json(&pair.vertices),
                "mask": int_matrix_json(&pair.mask),
                "left": pair.left,
                "right": pair.right,
            }));
        }
        components.push(json!({
            "vertices": set_json(&component.vertices),
            "period": component.period,
            "classes": entries,
        }));
    }
    let report = json!({
        "input": source_json(&source),
        "rho": structure.rho,
        "period": structure.period,
        "incomparable": structure.incomparable,
        "components": components,
    });
    Ok(Outcome::new(common, text.trim_end().to_string(), report, true))
}

pub fn validate(common: &Common, depth: usize) -> Result<Outcome> {
    let (sys, source) = common.input.load()?;
    let checks = run_suite(&sys, depth, common.tol)?;
    let ok = all_passed(&checks);
    let passed = checks.iter().filter(|c| c.passed).count();
    let mut text = fmt_checks(&checks);
    let _ = write!(text, "{passed}/{} checks passed", checks.len());
    let report = json!({
        "input": source_json(&source),
        "tolerance": common.tol,
        "depth": depth,
        "passed": ok,
        "checks": checks_json(&checks),
    });
    Ok(Outcome::new(common, text, report, ok))
}
