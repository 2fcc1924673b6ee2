//! Limit-definition estimators for the fractional derivative of order α.
//!
//! The operator evaluated here is
//!
//! ```text
//! D^α f(t) = lim_{ε→0} (f(t·e^{ε t^{-α}}) - f(t)) / ε,       t > 0, α ∈ (0, 1],
//! ```
//!
//! together with the truncated-exponential family `D_k^α` (the inner map
//! uses `e_k(x) = Σ_{i≤k} x^i/i!` instead of `e^x`; `k = 1` is the
//! conformable derivative, `k = ∞` recovers `D^α`) and the higher-order
//! extension for α ∈ (n, n+1], which applies the same limit to the n-th
//! classical derivative with `e^{ε t^{n-α}}` as the inner dilation.
//!
//! A finite-ε quotient over a geometric ε schedule is accelerated by
//! Richardson (Neville) extrapolation. The symmetric quotient is the
//! default — flipping ε's sign makes the quotient an even function of ε,
//! so only ε² terms survive — and the literal one-sided quotient is kept
//! as a diagnostic mode.

// `!(x > 0)` guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use crate::expr::{eval, nth_diff, DomainError, Expr, NotDifferentiable};
use crate::real::{lit, mixed_tol, Real};

/// Fractional order α ∈ (n, n+1], stored as integer part `n` plus residue
/// `beta` ∈ (0, 1] with α = n + beta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha<T = f64> {
    n: u32,
    beta: T,
}

/// The requested order does not decompose into n ∈ ℕ plus a residue in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("invalid fractional order {value}: need n + beta with integer n ≥ 0 and beta in (0, 1]")]
pub struct InvalidAlpha {
    pub value: f64,
}

impl<T: Real> Alpha<T> {
    /// Order α = `n` + `beta` with `beta` ∈ (0, 1].
    pub fn new(n: u32, beta: T) -> Result<Self, InvalidAlpha> {
        if beta > T::zero() && beta <= T::one() {
            Ok(Alpha { n, beta })
        } else {
            Err(InvalidAlpha {
                value: n as f64 + beta.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    /// Decomposes a positive order: α ∈ (n, n+1] maps to that (n, beta).
    pub fn from_value(alpha: T) -> Result<Self, InvalidAlpha> {
        let bad = InvalidAlpha {
            value: alpha.to_f64().unwrap_or(f64::NAN),
        };
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(bad);
        }
        let n = (alpha.ceil() - T::one()).to_u32().ok_or(bad)?;
        Alpha::new(n, alpha - lit(n as f64))
    }

    pub fn integer_part(&self) -> u32 {
        self.n
    }

    pub fn residue(&self) -> T {
        self.beta
    }

    /// The order as a plain number, n + beta ∈ (n, n+1].
    pub fn total(&self) -> T {
        lit::<T>(self.n as f64) + self.beta
    }
}

/// ε-schedule and extrapolation parameters for the limit estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitConfig<T = f64> {
    /// Initial ε as a multiple of t^α at the evaluation point, so the
    /// exponent perturbation ε·t^{-α} starts at `eps0` regardless of t.
    pub eps0: T,
    /// Geometric shrink factor of the ε schedule, in (0, 1).
    pub ratio: T,
    /// Number of ε levels available to the extrapolation.
    pub max_levels: usize,
    /// Convergence target: stop once the extrapolation increment is below
    /// `target_rtol · max(1, |value|)`.
    pub target_rtol: T,
}

impl<T: Real> Default for LimitConfig<T> {
    fn default() -> Self {
        LimitConfig {
            eps0: lit(1e-2),
            ratio: lit(0.5),
            max_levels: 12,
            target_rtol: lit(1e-8),
        }
    }
}

impl<T: Real> LimitConfig<T> {
    /// Default schedule with a different convergence target.
    pub fn with_target_rtol(target_rtol: T) -> Self {
        LimitConfig {
            target_rtol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), String> {
        if !(self.eps0 > T::zero()) || !self.eps0.is_finite() {
            return Err(format!("eps0 must be positive and finite, got {}", self.eps0));
        }
        if !(self.ratio > T::zero() && self.ratio < T::one()) {
            return Err(format!("ratio must lie in (0, 1), got {}", self.ratio));
        }
        if self.max_levels < 2 {
            return Err("max_levels must be at least 2".to_string());
        }
        if !(self.target_rtol > T::zero()) {
            return Err(format!("target_rtol must be positive, got {}", self.target_rtol));
        }
        // the smallest scheduled ε must stay clear of machine epsilon,
        // otherwise the quotient is pure cancellation noise
        let eps_min = self.eps0 * self.ratio.powi(self.max_levels as i32);
        if eps_min <= T::epsilon() {
            return Err(format!(
                "eps0·ratio^max_levels = {eps_min} does not exceed machine epsilon"
            ));
        }
        Ok(())
    }
}

/// Outcome of a limit estimation: the value plus convergence diagnostics.
///
/// `continuity_residual` is the largest observed `|f(t·e^{ε t^{-α}}) - f(t)|`
/// over the ε levels actually used; for an α-differentiable function it must
/// shrink to 0 with ε, which is the numerical face of "α-differentiable at a
/// point implies continuous there".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivEstimate<T = f64> {
    pub value: T,
    pub err_estimate: T,
    pub levels_used: usize,
    pub converged: bool,
    pub continuity_residual: T,
}

/// Truncation index k of the exponential family: a finite partial sum or
/// the full exponential. Kept as an enum so `k = ∞` is exact, not "large".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truncation {
    Finite(u32),
    Infinite,
}

impl std::fmt::Display for Truncation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Truncation::Finite(k) => write!(f, "{k}"),
            Truncation::Infinite => write!(f, "inf"),
        }
    }
}

/// Truncated exponential `e_k(x) = Σ_{i=0}^{k} x^i / i!`; `exp(x)` for k = ∞.
pub fn truncated_exp<T: Real>(x: T, k: Truncation) -> T {
    match k {
        Truncation::Infinite => x.exp(),
        Truncation::Finite(k) => {
            let mut sum = T::one();
            let mut term = T::one();
            for i in 1..=k {
                term = term * x / lit(i as f64);
                sum = sum + term;
            }
            sum
        }
    }
}

/// Which difference quotient the estimator evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientMode {
    /// `(f(x(+ε)) - f(x(-ε))) / 2ε` — O(ε²) truncation error, the default.
    Symmetric,
    /// `(f(x(+ε)) - f(t)) / ε` — the definition taken literally; slower but
    /// kept as a diagnostic so the symmetric trick cannot mask a jump.
    Forward,
}

/// Estimation failure over a caller-supplied function of one variable.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LimitError<E> {
    #[error(transparent)]
    Eval(E),
    #[error("extrapolation did not stabilize within {levels_used} levels (best value {value}, err {err_estimate})")]
    NonConvergence {
        value: f64,
        err_estimate: f64,
        levels_used: usize,
    },
    #[error("evaluation point must be positive, got t = {0}")]
    InvalidPoint(f64),
    #[error("invalid limit configuration: {0}")]
    InvalidConfig(String),
}

/// Estimation failure over expressions.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    NotDifferentiable(#[from] NotDifferentiable),
    #[error(transparent)]
    InvalidAlpha(#[from] InvalidAlpha),
    #[error("extrapolation did not stabilize within {levels_used} levels (best value {value}, err {err_estimate})")]
    NonConvergence {
        value: f64,
        err_estimate: f64,
        levels_used: usize,
    },
    #[error("k = 0 does not define a derivative: the difference quotient is identically zero")]
    InvalidK,
    #[error("unsupported order alpha = {alpha}: {requirement}")]
    InvalidOrder { alpha: f64, requirement: &'static str },
    #[error("evaluation point must be positive, got t = {0}")]
    InvalidPoint(f64),
    #[error("invalid limit configuration: {0}")]
    InvalidConfig(String),
}

impl From<LimitError<DomainError>> for NumericError {
    fn from(e: LimitError<DomainError>) -> Self {
        match e {
            LimitError::Eval(d) => NumericError::Domain(d),
            LimitError::NonConvergence {
                value,
                err_estimate,
                levels_used,
            } => NumericError::NonConvergence {
                value,
                err_estimate,
                levels_used,
            },
            LimitError::InvalidPoint(t) => NumericError::InvalidPoint(t),
            LimitError::InvalidConfig(m) => NumericError::InvalidConfig(m),
        }
    }
}

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Extrapolated difference quotient of `f` along the dilation
/// `x(ε) = t · e_k(ε t^p)` as ε → 0⁺.
///
/// This is the engine behind every derivative estimator in this module;
/// it is public so that quadrature-defined and other non-expression
/// functions can be differentiated too (`p = -α` gives the order-α
/// derivative of a function with n = 0).
pub fn limit_quotient<T, F, E>(
    mut f: F,
    t: T,
    exponent: T,
    k: Truncation,
    mode: QuotientMode,
    cfg: &LimitConfig<T>,
) -> Result<DerivEstimate<T>, LimitError<E>>
where
    T: Real,
    F: FnMut(T) -> Result<T, E>,
{
    cfg.validate().map_err(LimitError::InvalidConfig)?;
    if !(t > T::zero()) || !t.is_finite() {
        return Err(LimitError::InvalidPoint(to_f64(t)));
    }

    // ε is scheduled so the exponent perturbation u = ε t^p is the
    // dimensionless sequence eps0 · ratio^j, independent of t.
    let scale = t.powf(exponent); // t^p
    let f_t = f(t).map_err(LimitError::Eval)?;

    let two = lit::<T>(2.0);
    let order = match mode {
        QuotientMode::Symmetric => 2,
        QuotientMode::Forward => 1,
    };

    let mut row: Vec<T> = Vec::with_capacity(cfg.max_levels);
    let mut prev_diag = T::zero();
    let mut best: Option<(T, T)> = None; // (value, err)
    let mut cont_residual = T::zero();

    for j in 0..cfg.max_levels {
        let u = cfg.eps0 * cfg.ratio.powi(j as i32);
        let eps = u / scale;
        let x_plus = t * truncated_exp(u, k);
        let f_plus = f(x_plus).map_err(LimitError::Eval)?;
        let quotient = match mode {
            QuotientMode::Symmetric => {
                let x_minus = t * truncated_exp(-u, k);
                let f_minus = f(x_minus).map_err(LimitError::Eval)?;
                (f_plus - f_minus) / (two * eps)
            }
            QuotientMode::Forward => (f_plus - f_t) / eps,
        };
        cont_residual = cont_residual.max((f_plus - f_t).abs());

        // Neville extrapolation to ε → 0 on abscissas h_j = ε_j^order;
        // with a geometric schedule h_{j-m}/h_j = ratio^{-order·m}.
        let prev_row = row.clone();
        row.clear();
        row.push(quotient);
        for m in 1..=j {
            let denom = cfg.ratio.powi(-(order * m as i32)) - T::one();
            let next = row[m - 1] + (row[m - 1] - prev_row[m - 1]) / denom;
            row.push(next);
        }
        let diag = row[j];

        if j >= 1 {
            let err = (diag - prev_diag).abs();
            if best.is_none_or(|(_, be)| err < be) {
                best = Some((diag, err));
            }
            if err <= mixed_tol(cfg.target_rtol, diag) {
                return Ok(DerivEstimate {
                    value: diag,
                    err_estimate: err,
                    levels_used: j + 1,
                    converged: true,
                    continuity_residual: cont_residual,
                });
            }
        }
        prev_diag = diag;
    }

    let (value, err_estimate) = best.unwrap_or((prev_diag, T::infinity()));
    Err(LimitError::NonConvergence {
        value: to_f64(value),
        err_estimate: to_f64(err_estimate),
        levels_used: cfg.max_levels,
    })
}

fn require_order_le_one<T: Real>(alpha: Alpha<T>, who: &'static str) -> Result<(), NumericError> {
    if alpha.integer_part() != 0 {
        return Err(NumericError::InvalidOrder {
            alpha: to_f64(alpha.total()),
            requirement: who,
        });
    }
    Ok(())
}

/// Derivative of order α ∈ (0, 1] of `f` at `t > 0` by the limit definition,
/// with the symmetric quotient.
pub fn alpha_deriv_limit<T: Real>(
    f: &Expr<T>,
    t: T,
    alpha: Alpha<T>,
    cfg: &LimitConfig<T>,
) -> Result<DerivEstimate<T>, NumericError> {
    alpha_deriv_limit_with_mode(f, t, alpha, cfg, QuotientMode::Symmetric)
}

/// Same estimator with an explicit quotient mode (forward = diagnostic).
pub fn alpha_deriv_limit_with_mode<T: Real>(
    f: &Expr<T>,
    t: T,
    alpha: Alpha<T>,
    cfg: &LimitConfig<T>,
    mode: QuotientMode,
) -> Result<DerivEstimate<T>, NumericError> {
    require_order_le_one(alpha, "this estimator handles alpha in (0, 1]; use alpha_deriv_higher")?;
    Ok(limit_quotient(
        |x| eval(f, x),
        t,
        -alpha.total(),
        Truncation::Infinite,
        mode,
        cfg,
    )?)
}

/// Member k of the truncated-exponential family `D_k^α` at `t > 0`.
///
/// `k = 1` is the conformable derivative (inner map `t + ε t^{1-α}`),
/// `k = ∞` coincides with [`alpha_deriv_limit`]. `k = 0` is rejected.
pub fn alpha_deriv_k<T: Real>(
    f: &Expr<T>,
    t: T,
    alpha: Alpha<T>,
    k: Truncation,
    cfg: &LimitConfig<T>,
) -> Result<DerivEstimate<T>, NumericError> {
    require_order_le_one(alpha, "the D_k family is defined for alpha in (0, 1]")?;
    if k == Truncation::Finite(0) {
        return Err(NumericError::InvalidK);
    }
    Ok(limit_quotient(
        |x| eval(f, x),
        t,
        -alpha.total(),
        k,
        QuotientMode::Symmetric,
        cfg,
    )?)
}

/// Derivative of order α ∈ (n, n+1], n ≥ 1: the limit estimator applied to
/// the n-th classical derivative with inner dilation `e^{ε t^{n-α}}`.
///
/// Also accepts n = 0, where it coincides with [`alpha_deriv_limit`].
pub fn alpha_deriv_higher<T: Real>(
    f: &Expr<T>,
    t: T,
    alpha: Alpha<T>,
    cfg: &LimitConfig<T>,
) -> Result<DerivEstimate<T>, NumericError> {
    let n = alpha.integer_part();
    let g = nth_diff(f, n)?;
    Ok(limit_quotient(
        |x| eval(&g, x),
        t,
        lit::<T>(n as f64) - alpha.total(),
        Truncation::Infinite,
        QuotientMode::Symmetric,
        cfg,
    )?)
}

/// Order-dispatching entry point: n = 0 orders go through
/// [`alpha_deriv_limit`], higher orders through [`alpha_deriv_higher`].
pub fn alpha_deriv<T: Real>(
    f: &Expr<T>,
    t: T,
    alpha: Alpha<T>,
    cfg: &LimitConfig<T>,
) -> Result<DerivEstimate<T>, NumericError> {
    if alpha.integer_part() == 0 {
        alpha_deriv_limit(f, t, alpha, cfg)
    } else {
        alpha_deriv_higher(f, t, alpha, cfg)
    }
}

fn aitken<T: Real>(v: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(v.len().saturating_sub(2));
    for i in 0..v.len().saturating_sub(2) {
        let d2 = v[i + 2] - two_times(v[i + 1]) + v[i];
        let scale = v[i].abs() + v[i + 1].abs() + v[i + 2].abs();
        if d2.abs() <= T::epsilon() * scale {
            out.push(v[i + 2]);
        } else {
            let d1 = v[i + 2] - v[i + 1];
            out.push(v[i + 2] - d1 * d1 / d2);
        }
    }
    out
}

fn two_times<T: Real>(x: T) -> T {
    x + x
}

fn is_cauchy<T: Real>(v: &[T], rtol: T) -> bool {
    if v.len() < 2 {
        return false;
    }
    let checks = if v.len() >= 3 { 2 } else { 1 };
    (0..checks).all(|i| {
        let a = v[v.len() - 1 - i];
        let b = v[v.len() - 2 - i];
        (a - b).abs() <= mixed_tol(rtol, a)
    })
}

/// Derivative of order α at 0 by the extension clause: the limit of
/// `D^α f(t_j)` along `t_j = 0.1 · 0.5^j`, j = 0..10, accelerated by
/// iterated Aitken Δ² and accepted only once the sequence is Cauchy at
/// `target_rtol`.
pub fn alpha_deriv_at_zero<T: Real>(
    f: &Expr<T>,
    alpha: Alpha<T>,
    cfg: &LimitConfig<T>,
) -> Result<DerivEstimate<T>, NumericError> {
    require_order_le_one(alpha, "the t → 0⁺ extension is defined for alpha in (0, 1]")?;
    let t0 = lit::<T>(0.1);
    let sigma = lit::<T>(0.5);
    let samples = 11;

    let mut values = Vec::with_capacity(samples);
    let mut cont_residual = T::zero();
    for j in 0..samples {
        let t = t0 * sigma.powi(j as i32);
        let est = alpha_deriv_limit(f, t, alpha, cfg)?;
        cont_residual = cont_residual.max(est.continuity_residual);
        values.push(est.value);
    }

    let mut seq = values;
    for _round in 0..4 {
        if is_cauchy(&seq, cfg.target_rtol) {
            let value = *seq.last().expect("sequence nonempty");
            let err = (value - seq[seq.len() - 2]).abs();
            return Ok(DerivEstimate {
                value,
                err_estimate: err,
                levels_used: samples,
                converged: true,
                continuity_residual: cont_residual,
            });
        }
        if seq.len() < 3 {
            break;
        }
        seq = aitken(&seq);
    }

    let value = *seq.last().expect("sequence nonempty");
    let err = if seq.len() >= 2 {
        (value - seq[seq.len() - 2]).abs()
    } else {
        T::infinity()
    };
    Err(NumericError::NonConvergence {
        value: to_f64(value),
        err_estimate: to_f64(err),
        levels_used: samples,
    })
}
