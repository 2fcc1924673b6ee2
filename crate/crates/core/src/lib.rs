//! Fractional derivatives with classical properties, computed numerically.
//!
//! This crate implements the order-α derivative defined by the dilation
//! limit
//!
//! ```text
//! D^α f(t) = lim_{ε→0} (f(t·e^{ε t^{-α}}) - f(t)) / ε,      t > 0,
//! ```
//!
//! which for differentiable `f` equals `t^{1-α} f'(t)` and, unlike the
//! classical fractional operators, obeys the product, quotient and chain
//! rules, kills constants, and admits Rolle- and mean-value-type witness
//! points. Everything is computed three mutually cross-checking ways:
//!
//! * [`numeric`] — the limit definition itself, discretized over a geometric
//!   ε schedule with Richardson extrapolation, including the truncated-
//!   exponential family `D_k^α` (k = 1 is the conformable derivative) and
//!   the higher-order extension for α ∈ (n, n+1];
//! * [`symbolic`] — closed forms: the direct `t^{1-α} f'` route and a
//!   structural rule engine that applies the rules without ever using that
//!   shortcut, plus the built-in tables of elementary-function derivatives;
//! * [`integral`] — the fractional integral `∫_a^t f(x) x^{α-1} dx` by
//!   adaptive Gauss–Kronrod quadrature (exact substitution at the improper
//!   endpoint `a = 0`) and the inverse-property check `D^α(I^α_a f) = f`;
//! * [`theorems`] — constructive witnesses for Rolle's theorem and the mean
//!   value theorem, and batch verification of the rule identities.
//!
//! Expression input goes through [`expr::parse`]; see the grammar there.
//!
//! All numerics are generic over the scalar type via [`real::Real`]
//! (`f32`/`f64`); the aliases below fix `f64`, which is what the CLI and
//! the test suites use.

pub mod expr;
pub mod integral;
pub mod numeric;
pub mod real;
pub mod symbolic;
pub mod theorems;

pub use expr::{diff_classical, eval, nth_diff, parse, DomainError, NotDifferentiable, ParseError};
pub use integral::{alpha_integral, check_inverse, InverseError, QuadError};
pub use numeric::{
    alpha_deriv, alpha_deriv_at_zero, alpha_deriv_higher, alpha_deriv_k, alpha_deriv_limit,
    truncated_exp, InvalidAlpha, NumericError, QuotientMode, Truncation,
};
pub use real::Real;
pub use symbolic::{alpha_deriv_closed, alpha_deriv_rules, theorem4_table, theorem5_table, Rule, SymbolicError};
pub use theorems::{check_rules_batch, find_mvt_point, find_rolle_point, RuleIdentity, WitnessError};

/// Expression tree over `f64`.
pub type Expr = expr::Expr<f64>;
/// Fractional order over `f64`.
pub type Alpha = numeric::Alpha<f64>;
/// Estimator configuration over `f64`.
pub type LimitConfig = numeric::LimitConfig<f64>;
/// Derivative estimate over `f64`.
pub type DerivEstimate = numeric::DerivEstimate<f64>;
/// Quadrature result over `f64`.
pub type QuadResult = integral::QuadResult<f64>;
/// Witness point over `f64`.
pub type WitnessResult = theorems::WitnessResult<f64>;
/// Rules report over `f64`.
pub type RulesReport = theorems::RulesReport<f64>;
