//! Frozen regression baselines and cross-cutting invariants that span
//! more than one module.

use ktlab::dominating::{minimal_m, FrequencyGrid};
use ktlab::linalg::{self, C64, CMatrix};
use ktlab::measures::BoundedMeasure;
use ktlab::operators::{DiagonalOperator, MatrixOperator, OperatorModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Decay observable of the alpha = 2 profile truncated at 10^5, at
/// t = 100; value frozen from the exhaustive supremum over every
/// eigenvalue. Close to the continuum estimate (2t)^{-1/2} e^{-1/2}.
#[test]
fn kt_observable_alpha2_regression_baseline() {
    let op = DiagonalOperator::polynomial_profile(2.0, 100_000, false).unwrap();
    let got = op.kt_observable(100.0).unwrap();
    assert!(
        (got - 4.26672e-2).abs() < 0.5e-7,
        "kt drifted from the frozen baseline: {got:.6e}"
    );
}

/// m of the alpha = 2 profile at s = 10^{-2} is exactly 10^4: the
/// abscissa coincides with the resolvent spike of the k = 100 eigenvalue,
/// whose distance to the axis is k^{-2}.
#[test]
fn minimal_m_alpha2_regression_baseline() {
    let op = OperatorModel::Diagonal(
        DiagonalOperator::polynomial_profile(2.0, 1_000_000, true).unwrap(),
    );
    let grid = FrequencyGrid::new(1e-6, 1.0, 16)
        .unwrap()
        .with_operator_candidates(&op);
    let m = minimal_m(&op, &grid).unwrap();
    let idx = m
        .abscissae()
        .iter()
        .position(|&s| (s - 1e-2).abs() < 1e-9)
        .unwrap();
    let got = m.values()[idx];
    assert!((got - 1e4).abs() <= 1e-6 * 1e4, "m(1e-2) = {got:.12e}");
}

/// ||exp((s+t)A) - exp(sA) exp(tA)|| stays at rounding level on random
/// stable matrices.
#[test]
fn semigroup_law_on_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xABCD);
    for trial in 0..40 {
        let n = 2 + (trial % 15);
        let scale = 1.5 / (n as f64).sqrt();
        let raw = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * C64::new(scale, 0.0)
        });
        let abscissa = linalg::spectral_abscissa(&raw).unwrap();
        let a = &raw - CMatrix::identity(n, n) * C64::new(abscissa + 0.1, 0.0);
        let s = rng.gen::<f64>() * 5.0;
        let t = rng.gen::<f64>() * 5.0;
        let whole = linalg::expm(&(&a * C64::new(s + t, 0.0)));
        let split = linalg::expm(&(&a * C64::new(s, 0.0))) * linalg::expm(&(&a * C64::new(t, 0.0)));
        let err = linalg::largest_singular_value(&(&whole - &split));
        let bound = 1e-10 * (1.0 + linalg::largest_singular_value(&whole));
        assert!(err <= bound, "semigroup law violated: {err:.3e} > {bound:.3e}");
    }
}

/// Closed-form and quadrature functional calculus agree on a measure
/// mixing a shifted atom with polynomial-exponential densities.
#[test]
fn hat_mu_quadrature_cross_validation_mixed_measure() {
    let mu = BoundedMeasure::dirac(1.5, C64::new(0.5, -0.25))
        .unwrap()
        .add(
            &BoundedMeasure::exp_density(
                C64::new(2.0, 0.5),
                &[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.5, 0.0)],
            )
            .unwrap(),
        )
        .sub(&BoundedMeasure::exponential_e());
    let mut rng = ChaCha8Rng::seed_from_u64(0xFEED);
    for trial in 0..10 {
        let n = 2 + trial;
        let scale = 1.5 / (n as f64).sqrt();
        let raw = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * C64::new(scale, 0.0)
        });
        let abscissa = linalg::spectral_abscissa(&raw).unwrap();
        let shifted = &raw - CMatrix::identity(n, n) * C64::new(abscissa + 0.05, 0.0);
        let op = MatrixOperator::bounded(shifted).unwrap();
        let closed = op.hat_mu(&mu).unwrap();
        let quad = op.hat_mu_quadrature(&mu, 1e-9).unwrap();
        let rel = linalg::largest_singular_value(&(&closed - &quad))
            / linalg::largest_singular_value(&closed);
        assert!(rel <= 1e-6, "paths disagree by {rel:.3e} at n = {n}");
    }
}
