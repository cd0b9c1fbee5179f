use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::numlinalg::{rank, DEFAULT_TOL};

fn ex1() -> IntMatrix {
    IntMatrix::from_rows(&[[1, 1, 0], [0, 1, 1], [0, 0, 2]])
}

fn ex2() -> IntMatrix {
    IntMatrix::from_rows(&[[2, 1, 1, 0], [0, 2, 0, 0], [0, 0, 0, 1], [0, 0, 4, 0]])
}

fn decompose(a: &IntMatrix) -> SpectralDecomposition {
    SpectralDecomposition::new(a, DEFAULT_TOL).unwrap()
}

fn nu0(d: &SpectralDecomposition) -> usize {
    d.spectrum.zero().map_or(0, |e| e.index)
}

#[test]
fn drazin_of_invertible_is_inverse() {
    let d = decompose(&ex2());
    let x = drazin(&d);
    assert!((&x * &d.a - identity(4)).norm() <= 1e-8);
    assert!(drazin_axiom_residuals(&d.a, &x, nu0(&d)).iter().all(|&r| r <= 1e-8));
}

#[test]
fn drazin_of_nilpotent_is_zero() {
    let d = decompose(&IntMatrix::from_rows(&[[0, 1], [0, 0]]));
    assert_eq!(drazin(&d), CMatrix::zeros(2, 2));
}

#[test]
fn drazin_of_idempotent_is_itself() {
    let a = IntMatrix::from_rows(&[[1, 1], [0, 0]]);
    let d = decompose(&a);
    let x = drazin(&d);
    assert!((&x - &d.a).norm() <= 1e-12);
    assert!(drazin_axiom_residuals(&d.a, &x, nu0(&d)).iter().all(|&r| r <= 1e-12));
}

#[test]
fn cofactor_examples() {
    let m = IntMatrix::from_rows(&[[1, 2], [3, 4]]);
    assert_eq!(cofactor_int(&m), IntMatrix::from_rows(&[[4, -3], [-2, 1]]));
    assert_eq!(adjugate_int(&m), IntMatrix::from_rows(&[[4, -2], [-3, 1]]));
    assert_eq!(cofactor_int(&IntMatrix::identity(3)), IntMatrix::identity(3));
    assert_eq!(cofactor_int(&IntMatrix::from_rows(&[[5]])), IntMatrix::identity(1));
    let c = cofactor_complex(&m.to_complex());
    assert!((c - cofactor_int(&m).to_complex()).norm() < 1e-12);
}

#[test]
fn spectral_adjugate_examples() {
    let d = decompose(&ex2());
    let exact = adjugate_int(&ex2()).to_complex();
    assert!((adjugate_spectral(&d) - &exact).norm() <= 1e-6 * exact.norm());
    // det(A) A^{-1}
    let det = real(ex2().determinant().to_string().parse::<f64>().unwrap());
    assert!((inverse_spectral(&d).unwrap() * det - &exact).norm() <= 1e-6 * exact.norm());

    let nilpotent = IntMatrix::from_rows(&[[0, 1], [0, 0]]);
    let adj = adjugate_spectral(&decompose(&nilpotent));
    assert_eq!(adj, IntMatrix::from_rows(&[[0, -1], [0, 0]]).to_complex());
    assert_eq!(adjugate_int(&nilpotent), IntMatrix::from_rows(&[[0, -1], [0, 0]]));

    // Two zero Jordan blocks: rank n - 2, adjugate vanishes.
    let a = IntMatrix::from_rows(&[[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]]);
    assert!(adjugate_spectral(&decompose(&a)).norm() <= 1e-12);
    assert!(adjugate_int(&a).is_zero());
}

#[test]
fn spectral_inverse_examples() {
    let d = decompose(&ex1());
    assert!((inverse_spectral(&d).unwrap() * &d.a - identity(3)).norm() <= 1e-10);
    assert_eq!(inverse_spectral(&decompose(&IntMatrix::identity(3))).unwrap(), identity(3));
    let d = decompose(&IntMatrix::from_rows(&[[2, 0], [0, -2]]));
    let inv = inverse_spectral(&d).unwrap();
    assert_eq!(inv, IntMatrix::from_rows(&[[1, 0], [0, -1]]).to_complex() * real(0.5));
    let singular = decompose(&IntMatrix::from_rows(&[[1, 1], [1, 1]]));
    assert!(matches!(inverse_spectral(&singular), Err(Error::Singular(_))));
}

#[test]
fn elementary_factorization_examples() {
    let zero = CMatrix::zeros(2, 2);
    let factors = elementary_factorization(&zero);
    assert_eq!(factors.iter().filter(|f| f.is_zero_scale()).count(), 2);
    assert_eq!(factor_product(&factors, 2), zero);

    let m = IntMatrix::from_rows(&[[1, 2], [2, 4]]).to_complex();
    let factors = elementary_factorization(&m);
    assert_eq!(factors.iter().filter(|f| f.is_zero_scale()).count(), 1);
    assert!((factor_product(&factors, 2) - &m).norm() <= 1e-10);

    let m = IntMatrix::from_rows(&[[0, 2, 1], [1, 1, 0], [3, 0, 2]]).to_complex();
    let factors = elementary_factorization(&m);
    assert!(!factors.iter().any(ElementaryFactor::is_zero_scale));
    assert!((factor_product(&factors, 3) - &m).norm() <= 1e-10);
    let by_matrices = factors.iter().fold(identity(3), |acc, f| acc * f.to_matrix(3));
    assert!((by_matrices - &m).norm() <= 1e-10);
}

#[test]
fn resolvent_limit_examples() {
    let d = decompose(&ex2());
    let report = resolvent_limit_check(&d, real(2.0), 6).unwrap();
    assert_eq!(report.errors.len(), 6);
    assert!(report.decreasing, "{:?}", report.errors);
    assert!(report.final_error <= 1e-4);

    let d = decompose(&IntMatrix::from_rows(&[[5]]));
    let report = resolvent_limit_check(&d, real(5.0), 6).unwrap();
    assert!(report.final_error <= 1e-12);

    let d = decompose(&IntMatrix::from_rows(&[[1, 0], [0, 3]]));
    let report = resolvent_limit_check(&d, real(1.0), 6).unwrap();
    assert!(report.final_error <= 1e-5);
    assert!(resolvent_limit_check(&d, real(2.0), 3).is_err());
}

#[test]
fn resolvent_step_avoids_other_eigenvalues() {
    use crate::numlinalg::{Eigenvalue, Spectrum};
    let a = CMatrix::from_diagonal(&crate::numlinalg::CVector::from_vec(vec![real(1.0), real(1.1)]));
    let record = |v: f64| Eigenvalue { value: real(v), multiplicity: 1, index: 1, exact: None };
    let spectrum = Spectrum::from_records(vec![record(1.0), record(1.1)]);
    let d = SpectralDecomposition::with_spectrum(a, spectrum, DEFAULT_TOL).unwrap();
    let report = resolvent_limit_check(&d, real(1.0), 6).unwrap();
    // 1 + 10^{-1} hits the other eigenvalue, so the offset is rotated.
    assert!(report.points[0].im != 0.0, "{:?}", report.points);
    assert!((report.points[0] - real(1.1)).norm() > 1e-4);
    // Remaining error is dominated by |x - 1| / |1.1 - x| ≈ 1e-5.
    assert!(report.final_error <= 2e-5, "{:?}", report.errors);
}

fn arb_matrix(max_n: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(lo..=hi, n * n)
            .prop_map(move |v| IntMatrix::from_rows(&v.chunks(n).collect::<Vec<_>>()))
    })
}

/// Random matrix of the requested rank deficit: rows past `n - deficit` are
/// integer combinations of earlier rows.
fn arb_deficient(max_n: usize, deficit: usize) -> impl Strategy<Value = IntMatrix> {
    (deficit.max(2)..=max_n).prop_flat_map(move |n| {
        (prop::collection::vec(-3i64..=3, n * n), prop::collection::vec(-2i64..=2, n * n)).prop_map(
            move |(v, w)| {
                let mut a = IntMatrix::from_rows(&v.chunks(n).collect::<Vec<_>>());
                let keep = n - deficit;
                for r in keep..n {
                    for c in 0..n {
                        let mut acc = BigInt::from(0);
                        for k in 0..keep {
                            acc += a.get(k, c) * BigInt::from(w[r * n + k]);
                        }
                        a.set(r, c, acc);
                    }
                }
                a
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn cofactor_times_matrix_is_determinant(a in arb_matrix(4, -5, 5)) {
        let n = a.n();
        let det = a.determinant();
        prop_assert_eq!(a.mul(&adjugate_int(&a)), IntMatrix::identity(n).scale(&det));
    }

    #[test]
    fn cofactor_is_multiplicative(
        a in arb_matrix(4, -3, 3),
        b in prop::collection::vec(-3i64..=3, 16),
        deficient in any::<bool>(),
    ) {
        let n = a.n();
        let mut b = IntMatrix::from_fn(n, |i, j| BigInt::from(b[i * n + j]));
        if deficient && n > 1 {
            for j in 0..n {
                let v = b.get(0, j).clone();
                b.set(n - 1, j, v);
            }
        }
        prop_assert_eq!(cofactor_int(&a.mul(&b)), cofactor_int(&a).mul(&cofactor_int(&b)));
    }

    #[test]
    fn drazin_axioms_and_zero_projector(a in arb_deficient(5, 1)) {
        let d = decompose(&a);
        let x = drazin(&d);
        for r in drazin_axiom_residuals(&d.a, &x, nu0(&d)) {
            prop_assert!(r <= 1e-8, "{}", r);
        }
        let e0 = d.spectrum.iter().position(|e| e.is_zero()).map(|i| d.projectors[i].clone());
        let e0 = e0.unwrap_or_else(|| CMatrix::zeros(a.n(), a.n()));
        let lhs = identity(a.n()) - &d.a * &x;
        prop_assert!((lhs - &e0).norm() <= 1e-8 * e0.norm().max(1.0));
    }

    #[test]
    fn spectral_adjugate_matches_cofactors(a in prop_oneof![
        arb_matrix(5, -3, 3),
        arb_deficient(5, 1),
        arb_deficient(5, 2),
    ]) {
        let d = decompose(&a);
        let exact = adjugate_int(&a).to_complex();
        let got = adjugate_spectral(&d);
        prop_assert!((got - &exact).norm() <= 1e-6 * exact.norm().max(1.0));
    }

    #[test]
    fn factorization_reconstructs(a in prop_oneof![
        arb_matrix(5, -3, 3),
        arb_deficient(5, 1),
        arb_deficient(5, 3),
    ]) {
        let m = a.to_complex();
        let factors = elementary_factorization(&m);
        let zero_scales = factors.iter().filter(|f| f.is_zero_scale()).count();
        prop_assert_eq!(zero_scales, a.n() - rank(&m, DEFAULT_TOL));
        prop_assert!((factor_product(&factors, a.n()) - &m).norm() <= 1e-8 * m.norm().max(1.0));
    }
}
