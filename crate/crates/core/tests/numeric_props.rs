//! Invariants of the limit estimators against the closed-form oracle.

mod common;

use alphafrac::numeric::{
    alpha_deriv_at_zero, alpha_deriv_k, alpha_deriv_limit, alpha_deriv_limit_with_mode, Alpha,
    LimitConfig, QuotientMode, Truncation,
};
use alphafrac::symbolic::alpha_deriv_closed;
use alphafrac::{eval, parse};
use common::{central_difference, parsed_corpus, ALPHAS, GRID};
use proptest::prelude::*;

#[test]
fn oracle_agreement_with_closed_form() {
    let cfg = LimitConfig::default();
    for f in parsed_corpus() {
        for &alpha in &ALPHAS {
            let closed = alpha_deriv_closed(&f, alpha).unwrap();
            let a = Alpha::new(0, alpha).unwrap();
            for &t in &GRID {
                let est = alpha_deriv_limit(&f, t, a, &cfg).unwrap();
                assert!(est.converged);
                // converged implies the promised error bound
                assert!(est.err_estimate <= cfg.target_rtol * est.value.abs().max(1.0));
                let want = eval(&closed, t).unwrap();
                assert!(
                    (est.value - want).abs() <= 1e-6 * est.value.abs().max(1.0),
                    "{f} at t={t}, alpha={alpha}: {} vs {}",
                    est.value,
                    want
                );
            }
        }
    }
}

#[test]
fn k_independence_of_the_family() {
    let cfg = LimitConfig::default();
    let ks = [
        Truncation::Finite(1),
        Truncation::Finite(2),
        Truncation::Finite(3),
        Truncation::Finite(10),
        Truncation::Infinite,
    ];
    for f in parsed_corpus() {
        for &alpha in &[0.3, 0.7] {
            let a = Alpha::new(0, alpha).unwrap();
            for &t in &[0.5, 1.0, 2.0] {
                let reference = alpha_deriv_limit(&f, t, a, &cfg).unwrap();
                for &k in &ks {
                    let est = alpha_deriv_k(&f, t, a, k, &cfg).unwrap();
                    assert!(
                        (est.value - reference.value).abs() <= 2e-6,
                        "{f} t={t} alpha={alpha} k={k}: {} vs {}",
                        est.value,
                        reference.value
                    );
                }
            }
        }
    }
}

#[test]
fn classical_reduction_matches_finite_differences() {
    let cfg = LimitConfig::default();
    let one = Alpha::new(0, 1.0).unwrap();
    for f in parsed_corpus() {
        for &t in &GRID {
            let est = alpha_deriv_limit(&f, t, one, &cfg).unwrap();
            let fd = central_difference(&f, t);
            assert!(
                (est.value - fd).abs() <= 1e-6 * fd.abs().max(1.0),
                "{f} at t={t}: {} vs {}",
                est.value,
                fd
            );
        }
    }
}

#[test]
fn continuity_residual_shrinks_linearly_in_eps() {
    let cfg = LimitConfig::default();
    for f in parsed_corpus() {
        for &alpha in &[0.5] {
            let a = Alpha::new(0, alpha).unwrap();
            for &t in &[0.7, 2.0] {
                let est = alpha_deriv_limit(&f, t, a, &cfg).unwrap();
                let f_t = eval(&f, t).unwrap();
                let scale = t.powf(alpha); // ε_j = u_j · t^α
                let mut residuals = Vec::new();
                let mut epsilons = Vec::new();
                for j in 0..est.levels_used {
                    let u = cfg.eps0 * cfg.ratio.powi(j as i32);
                    let rho = (eval(&f, t * u.exp()).unwrap() - f_t).abs();
                    residuals.push(rho);
                    epsilons.push(u * scale);
                }
                // reported residual is the max over the levels used
                let max_rho = residuals.iter().cloned().fold(0.0f64, f64::max);
                assert!((est.continuity_residual - max_rho).abs() <= 1e-15 * max_rho.max(1.0));
                // C·ε_j bound with C estimated from the first two levels
                let c = 1.25 * (residuals[0] / epsilons[0]).max(residuals[1] / epsilons[1]) + 1e-12;
                for j in 0..residuals.len() {
                    assert!(
                        residuals[j] <= c * epsilons[j],
                        "{f} t={t} level {j}: {} > {}",
                        residuals[j],
                        c * epsilons[j]
                    );
                }
                // monotone decrease across levels
                for j in 1..residuals.len() {
                    assert!(
                        residuals[j] <= residuals[j - 1] * (1.0 + 1e-12),
                        "{f} t={t}: residuals not decreasing at level {j}"
                    );
                }
            }
        }
    }
}

#[test]
fn forward_quotient_agrees_with_symmetric() {
    let cfg = LimitConfig::default();
    for f in parsed_corpus() {
        let a = Alpha::new(0, 0.5).unwrap();
        for &t in &[0.5, 1.0, 3.0] {
            let sym = alpha_deriv_limit(&f, t, a, &cfg).unwrap();
            let fwd = alpha_deriv_limit_with_mode(&f, t, a, &cfg, QuotientMode::Forward).unwrap();
            assert!(
                (sym.value - fwd.value).abs() <= 1e-5 * sym.value.abs().max(1.0),
                "{f} at t={t}: symmetric {} vs forward {}",
                sym.value,
                fwd.value
            );
        }
    }
}

#[test]
fn at_zero_of_homogeneous_powers_is_their_coefficient() {
    // f = t^β with α = β has D^α f = β·t^0 = β everywhere, so the t → 0⁺
    // extension must return β as well
    let cfg = LimitConfig::default();
    for beta in [0.3, 0.5, 0.8] {
        let f = parse::<f64>(&format!("t^{beta}")).unwrap();
        let a = Alpha::new(0, beta).unwrap();
        let est = alpha_deriv_at_zero(&f, a, &cfg).unwrap();
        assert!(
            (est.value - beta).abs() <= 1e-6,
            "beta={beta}: {}",
            est.value
        );
    }
}

proptest! {
    /// Power rule over random order, exponent and point:
    /// D^α t^n = n t^{n-α} within the mixed 1e-6 tolerance.
    #[test]
    fn power_rule_randomized(
        n in -1.0..3.0f64,
        alpha in 0.1..1.0f64,
        t in 0.4..4.0f64,
    ) {
        let f = parse::<f64>(&format!("t^({n})")).unwrap();
        let a = Alpha::new(0, alpha).unwrap();
        let est = alpha_deriv_limit(&f, t, a, &LimitConfig::default()).unwrap();
        let want = n * t.powf(n - alpha);
        prop_assert!(
            (est.value - want).abs() <= 1e-6 * want.abs().max(1.0),
            "got {}, want {}", est.value, want
        );
    }
}
