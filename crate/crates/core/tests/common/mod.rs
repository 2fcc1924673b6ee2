//! Shared fixtures for the integration suites.
#![allow(dead_code)] // each test binary uses its own subset

use alphafrac::expr::Expr;
use alphafrac::parse;

/// Smooth, everywhere-positive-domain functions on t ∈ [0.3, 5]; all are
/// classically differentiable, so the closed form t^{1-α} f' is an oracle.
pub const SMOOTH_CORPUS: [&str; 8] = [
    "t^2",
    "t^3-2*t+1",
    "sin(t)",
    "exp(t/2)",
    "sqrt(t)",
    "ln(1+t)",
    "t^2*sin(t)",
    "sin(t)/(2+cos(t))",
];

pub const GRID: [f64; 5] = [0.3, 0.7, 1.0, 2.0, 5.0];

pub const ALPHAS: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

pub fn parsed_corpus() -> Vec<Expr<f64>> {
    SMOOTH_CORPUS.iter().map(|s| parse(s).unwrap()).collect()
}

/// Central finite difference with h = 1e-6·max(1, |t|).
pub fn central_difference(f: &Expr<f64>, t: f64) -> f64 {
    let h = 1e-6 * t.abs().max(1.0);
    let fp = alphafrac::eval(f, t + h).unwrap();
    let fm = alphafrac::eval(f, t - h).unwrap();
    (fp - fm) / (2.0 * h)
}
