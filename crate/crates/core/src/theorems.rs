//! Constructive side of the Rolle and mean-value theorems for the order-α
//! derivative, plus batch verification of the rule identities.
//!
//! The theorems only assert that a witness point `c` exists; here it is
//! actually found: scan a uniform grid of the numeric `D^α f` for a sign
//! change or a near-zero node, then bisect the bracket. The leftmost
//! detected root is returned, and the number of detected brackets is
//! reported alongside.

use crate::expr::{diff_classical, eval, DomainError, Expr};
use crate::numeric::{alpha_deriv_limit, Alpha, LimitConfig, NumericError};
use crate::real::{lit, mixed_tol, Real};

/// Initial grid resolution of the witness scan.
pub const GRID_CELLS: usize = 256;

/// A witness point for Rolle's theorem or the mean value theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessResult<T = f64> {
    /// The witness, strictly inside (a, b).
    pub c: T,
    /// `|D^α f(c)|` for Rolle, `|D^α f(c) - slope|` for the MVT.
    pub residual: T,
    /// Final bracket; its width is at most `1e-10·(b - a)`.
    pub bracketing_interval: (T, T),
    /// Bisection steps taken (0 when a grid node was already a root).
    pub iterations: usize,
    /// How many separate roots the initial scan bracketed.
    pub brackets_detected: usize,
}

/// Witness-search failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WitnessError {
    #[error("f(a) = {fa} and f(b) = {fb} differ: Rolle's hypothesis f(a) = f(b) fails")]
    PreconditionViolation { fa: f64, fb: f64 },
    #[error("no sign change of the derivative detected on ({a}, {b})")]
    NoSignChange { a: f64, b: f64 },
    #[error("invalid interval [{a}, {b}]: need 0 < a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn validate_interval<T: Real>(a: T, b: T) -> Result<(), WitnessError> {
    if a > T::zero() && b > a && b.is_finite() {
        Ok(())
    } else {
        Err(WitnessError::InvalidInterval {
            a: to_f64(a),
            b: to_f64(b),
        })
    }
}

fn validate_alpha<T: Real>(alpha: T) -> Result<Alpha<T>, WitnessError> {
    if alpha > T::zero() && alpha <= T::one() {
        Ok(Alpha::new(0, alpha).expect("residue checked"))
    } else {
        Err(WitnessError::InvalidAlpha(to_f64(alpha)))
    }
}

/// Leftmost root of the numeric `D^α f` on (a, b): grid scan + bisection.
fn scan_and_bisect<T: Real>(
    f: &Expr<T>,
    a: T,
    b: T,
    alpha: Alpha<T>,
    cfg: &LimitConfig<T>,
) -> Result<(T, (T, T), usize, usize), WitnessError> {
    let n = GRID_CELLS;
    let width = b - a;
    let node = |i: usize| a + width * lit::<T>(i as f64 / n as f64);

    let mut d = Vec::with_capacity(n + 1);
    for i in 0..=n {
        d.push(alpha_deriv_limit(f, node(i), alpha, cfg)?.value);
    }
    let dscale = d.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let ztol = lit::<T>(1e-12) * T::one().max(dscale);

    // events, left to right: an interior node that is already (numerically)
    // a root, or a cell whose endpoint values have strictly opposite signs
    #[derive(Clone, Copy)]
    enum Event {
        Zero(usize),
        Bracket(usize),
    }
    let mut events: Vec<(usize, Event)> = Vec::new();
    for (i, di) in d.iter().enumerate().take(n).skip(1) {
        if di.abs() <= ztol {
            events.push((2 * i, Event::Zero(i)));
        }
    }
    for i in 0..n {
        if d[i] * d[i + 1] < T::zero() && d[i].abs() > ztol && d[i + 1].abs() > ztol {
            events.push((2 * i + 1, Event::Bracket(i)));
        }
    }
    events.sort_by_key(|(pos, _)| *pos);

    let brackets_detected = events.len();
    let Some((_, first)) = events.first().copied() else {
        return Err(WitnessError::NoSignChange {
            a: to_f64(a),
            b: to_f64(b),
        });
    };

    match first {
        Event::Zero(i) => Ok((node(i), (node(i), node(i)), 0, brackets_detected)),
        Event::Bracket(i) => {
            let mut lo = node(i);
            let mut hi = node(i + 1);
            let mut d_lo = d[i];
            let tol_w = lit::<T>(1e-10) * width;
            let half = lit::<T>(0.5);
            let mut iterations = 0;
            while hi - lo > tol_w {
                let mid = half * (lo + hi);
                let d_mid = alpha_deriv_limit(f, mid, alpha, cfg)?.value;
                iterations += 1;
                if d_mid == T::zero() {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (d_mid > T::zero()) == (d_lo > T::zero()) {
                    lo = mid;
                    d_lo = d_mid;
                } else {
                    hi = mid;
                }
            }
            Ok((half * (lo + hi), (lo, hi), iterations, brackets_detected))
        }
    }
}

/// Finds `c ∈ (a, b)` with `D^α f(c) = 0` under Rolle's hypotheses
/// (`f(a) = f(b)`, continuity, α-differentiability on the interior).
pub fn find_rolle_point<T: Real>(
    f: &Expr<T>,
    a: T,
    b: T,
    alpha: T,
    cfg: &LimitConfig<T>,
) -> Result<WitnessResult<T>, WitnessError> {
    validate_interval(a, b)?;
    let alpha = validate_alpha(alpha)?;
    let fa = eval(f, a)?;
    let fb = eval(f, b)?;
    if (fa - fb).abs() > mixed_tol(lit(1e-9), fa) {
        return Err(WitnessError::PreconditionViolation {
            fa: to_f64(fa),
            fb: to_f64(fb),
        });
    }
    let (c, bracket, iterations, brackets) = scan_and_bisect(f, a, b, alpha, cfg)?;
    let residual = alpha_deriv_limit(f, c, alpha, cfg)?.value.abs();
    Ok(WitnessResult {
        c,
        residual,
        bracketing_interval: bracket,
        iterations,
        brackets_detected: brackets,
    })
}

/// Finds `c ∈ (a, b)` with `D^α f(c) = (f(b) - f(a)) / ((b^α - a^α)/α)` by
/// running the Rolle search on the auxiliary function
/// `g(x) = f(x) - f(a) - slope·(x^α - a^α)/α`, which vanishes at both ends.
pub fn find_mvt_point<T: Real>(
    f: &Expr<T>,
    a: T,
    b: T,
    alpha: T,
    cfg: &LimitConfig<T>,
) -> Result<WitnessResult<T>, WitnessError> {
    validate_interval(a, b)?;
    let alpha_parts = validate_alpha(alpha)?;
    let fa = eval(f, a)?;
    let fb = eval(f, b)?;
    let denom = (b.powf(alpha) - a.powf(alpha)) / alpha;
    let slope = (fb - fa) / denom;

    let g = Expr::sub(
        Expr::sub(f.clone(), Expr::constant(fa)),
        Expr::mul(
            Expr::constant(slope),
            Expr::div(
                Expr::sub(
                    Expr::pow(Expr::var(), Expr::constant(alpha)),
                    Expr::constant(a.powf(alpha)),
                ),
                Expr::constant(alpha),
            ),
        ),
    );

    let (c, bracket, iterations, brackets) = scan_and_bisect(&g, a, b, alpha_parts, cfg)?;
    let residual = (alpha_deriv_limit(f, c, alpha_parts, cfg)?.value - slope).abs();
    Ok(WitnessResult {
        c,
        residual,
        bracketing_interval: bracket,
        iterations,
        brackets_detected: brackets,
    })
}

/// The four rule identities checked by [`check_rules_batch`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleIdentity {
    /// `D^α(2f - 3g) = 2 D^α f - 3 D^α g`
    Linearity,
    /// `D^α(fg) = f D^α g + g D^α f`
    Product,
    /// `D^α(f/g) = (g D^α f - f D^α g) / g²`
    Quotient,
    /// `D^α(f∘g) = f'(g(t)) · D^α g(t)`
    Chain,
}

impl std::fmt::Display for RuleIdentity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            RuleIdentity::Linearity => "linearity",
            RuleIdentity::Product => "product",
            RuleIdentity::Quotient => "quotient",
            RuleIdentity::Chain => "chain",
        };
        write!(f, "{name}")
    }
}

pub const ALL_IDENTITIES: [RuleIdentity; 4] = [
    RuleIdentity::Linearity,
    RuleIdentity::Product,
    RuleIdentity::Quotient,
    RuleIdentity::Chain,
];

/// One identity evaluation at a fixed (pair, α, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleCheckRow<T = f64> {
    pub pair_index: usize,
    pub identity: RuleIdentity,
    pub alpha: T,
    pub t: T,
    pub lhs: T,
    pub rhs: T,
    pub residual: T,
    /// Combined error estimate of the quantities entering the identity.
    pub tolerance: T,
    pub flagged: bool,
}

/// Outcome of a batch run: all evaluated rows plus the number of
/// combinations skipped for domain reasons (vanishing denominator,
/// non-positive inner value, estimator failure).
#[derive(Debug, Clone, PartialEq)]
pub struct RulesReport<T = f64> {
    pub rows: Vec<RuleCheckRow<T>>,
    pub skipped: usize,
}

impl<T> Default for RulesReport<T> {
    fn default() -> Self {
        RulesReport {
            rows: Vec::new(),
            skipped: 0,
        }
    }
}

impl<T: Real> RulesReport<T> {
    /// Largest residual observed for one identity, if any row ran.
    pub fn max_residual(&self, identity: RuleIdentity) -> Option<T> {
        self.rows
            .iter()
            .filter(|r| r.identity == identity)
            .map(|r| r.residual)
            .fold(None, |m, x| Some(m.map_or(x, |m: T| m.max(x))))
    }

    pub fn flagged_count(&self) -> usize {
        self.rows.iter().filter(|r| r.flagged).count()
    }
}

/// Checks linearity, product, quotient and chain identities over a corpus of
/// `(f, g)` pairs, with every quantity estimated independently by the limit
/// estimator (no algebraic shortcuts). Failures become report entries, never
/// errors.
pub fn check_rules_batch<T: Real>(
    corpus: &[(Expr<T>, Expr<T>)],
    alpha_values: &[T],
    grid: &[T],
    cfg: &LimitConfig<T>,
) -> RulesReport<T> {
    let mut report = RulesReport::default();
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);

    for (pair_index, (f, g)) in corpus.iter().enumerate() {
        let h_lin = Expr::sub(
            Expr::mul(Expr::constant(two), f.clone()),
            Expr::mul(Expr::constant(three), g.clone()),
        );
        let h_prod = Expr::mul(f.clone(), g.clone());
        let h_quot = Expr::div(f.clone(), g.clone());
        let h_chain = f.substitute(g);
        let f_prime = diff_classical(f).ok();

        for &alpha_v in alpha_values {
            let Ok(alpha) = Alpha::new(0, alpha_v) else {
                report.skipped += grid.len() * ALL_IDENTITIES.len();
                continue;
            };
            for &t in grid {
                let est = |e: &Expr<T>| alpha_deriv_limit(e, t, alpha, cfg);
                let (df, dg) = match (est(f), est(g)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => {
                        report.skipped += ALL_IDENTITIES.len();
                        continue;
                    }
                };
                let (fval, gval) = match (eval(f, t), eval(g, t)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => {
                        report.skipped += ALL_IDENTITIES.len();
                        continue;
                    }
                };

                let mut push = |identity: RuleIdentity, lhs: T, rhs: T, prop_err: T| {
                    let residual = (lhs - rhs).abs();
                    let tolerance = lit::<T>(50.0) * prop_err
                        + lit::<T>(1e-10) * T::one().max(lhs.abs().max(rhs.abs()));
                    report.rows.push(RuleCheckRow {
                        pair_index,
                        identity,
                        alpha: alpha_v,
                        t,
                        lhs,
                        rhs,
                        residual,
                        tolerance,
                        flagged: residual > tolerance,
                    });
                };

                // linearity with fixed weights 2 and -3
                match est(&h_lin) {
                    Ok(dh) => push(
                        RuleIdentity::Linearity,
                        dh.value,
                        two * df.value - three * dg.value,
                        dh.err_estimate + two * df.err_estimate + three * dg.err_estimate,
                    ),
                    Err(_) => report.skipped += 1,
                }

                match est(&h_prod) {
                    Ok(dh) => push(
                        RuleIdentity::Product,
                        dh.value,
                        fval * dg.value + gval * df.value,
                        dh.err_estimate
                            + fval.abs() * dg.err_estimate
                            + gval.abs() * df.err_estimate,
                    ),
                    Err(_) => report.skipped += 1,
                }

                if gval.abs() >= lit(1e-6) {
                    match est(&h_quot) {
                        Ok(dh) => push(
                            RuleIdentity::Quotient,
                            dh.value,
                            (gval * df.value - fval * dg.value) / (gval * gval),
                            dh.err_estimate
                                + (gval.abs() * df.err_estimate + fval.abs() * dg.err_estimate)
                                    / (gval * gval),
                        ),
                        Err(_) => report.skipped += 1,
                    }
                } else {
                    report.skipped += 1;
                }

                // chain is verified where g > 0 and f' exists symbolically
                match (&f_prime, gval > T::zero()) {
                    (Some(fp), true) => match (est(&h_chain), eval(fp, gval)) {
                        (Ok(dh), Ok(fp_at_g)) => push(
                            RuleIdentity::Chain,
                            dh.value,
                            fp_at_g * dg.value,
                            dh.err_estimate + fp_at_g.abs() * dg.err_estimate,
                        ),
                        _ => report.skipped += 1,
                    },
                    _ => report.skipped += 1,
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use approx::assert_abs_diff_eq;

    fn p(s: &str) -> Expr<f64> {
        parse(s).unwrap()
    }

    #[test]
    fn rolle_parabola() {
        // D^{1/2}[(t-1)(t-2)] = t^{1/2}(2t - 3), root at 3/2
        let w = find_rolle_point(&p("(t-1)*(t-2)"), 1.0, 2.0, 0.5, &LimitConfig::default())
            .unwrap();
        assert_abs_diff_eq!(w.c, 1.5, epsilon = 1e-8);
        assert!(w.residual <= 1e-8, "residual {}", w.residual);
        assert!(w.c > 1.0 && w.c < 2.0);
        let (lo, hi) = w.bracketing_interval;
        assert!(hi - lo <= 1e-10);
    }

    #[test]
    fn rolle_sine() {
        let a = std::f64::consts::PI / 6.0;
        let b = 5.0 * std::f64::consts::PI / 6.0;
        let w = find_rolle_point(&p("sin(t)"), a, b, 0.5, &LimitConfig::default()).unwrap();
        assert_abs_diff_eq!(w.c, std::f64::consts::PI / 2.0, epsilon = 1e-8);
    }

    #[test]
    fn rolle_requires_equal_endpoints() {
        assert!(matches!(
            find_rolle_point(&p("t"), 1.0, 2.0, 0.5, &LimitConfig::default()),
            Err(WitnessError::PreconditionViolation { .. })
        ));
    }

    #[test]
    fn rolle_validation_errors() {
        assert!(matches!(
            find_rolle_point(&p("t"), -1.0, 2.0, 0.5, &LimitConfig::default()),
            Err(WitnessError::InvalidInterval { .. })
        ));
        assert!(matches!(
            find_rolle_point(&p("t"), 2.0, 1.0, 0.5, &LimitConfig::default()),
            Err(WitnessError::InvalidInterval { .. })
        ));
        assert!(matches!(
            find_rolle_point(&p("(t-1)*(t-2)"), 1.0, 2.0, 1.5, &LimitConfig::default()),
            Err(WitnessError::InvalidAlpha(_))
        ));
    }

    #[test]
    fn mvt_linear_function() {
        // f = t on [1,4], α = 1/2: slope = 3/2, witness solves √c = 3/2
        let w = find_mvt_point(&p("t"), 1.0, 4.0, 0.5, &LimitConfig::default()).unwrap();
        assert_abs_diff_eq!(w.c, 2.25, epsilon = 1e-8);
        assert!(w.residual <= 1e-8, "residual {}", w.residual);
    }

    #[test]
    fn mvt_degenerate_everywhere_witness() {
        // D^{1/2}((1/0.5) t^{0.5}) ≡ 1 = slope, so every point is a witness;
        // the leftmost grid node is returned
        let w = find_mvt_point(&p("(1/0.5)*t^0.5"), 1.0, 4.0, 0.5, &LimitConfig::default())
            .unwrap();
        assert!(w.c > 1.0 && w.c < 4.0);
        assert!(w.residual <= 1e-8, "residual {}", w.residual);
        assert_eq!(w.iterations, 0);
    }

    #[test]
    fn mvt_classical_reduction() {
        let w = find_mvt_point(&p("t^2"), 0.5, 1.5, 1.0, &LimitConfig::default()).unwrap();
        assert_abs_diff_eq!(w.c, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn mvt_auxiliary_vanishes_at_endpoints() {
        let (a, b, alpha) = (1.0f64, 4.0f64, 0.5f64);
        let f = p("sin(t)*t");
        let fa = eval(&f, a).unwrap();
        let fb = eval(&f, b).unwrap();
        let slope = (fb - fa) / ((b.powf(alpha) - a.powf(alpha)) / alpha);
        let g = Expr::sub(
            Expr::sub(f, Expr::constant(fa)),
            Expr::mul(
                Expr::constant(slope),
                Expr::div(
                    Expr::sub(
                        Expr::pow(Expr::var(), Expr::constant(alpha)),
                        Expr::constant(a.powf(alpha)),
                    ),
                    Expr::constant(alpha),
                ),
            ),
        );
        let scale = 1.0f64.max(fa.abs()).max(fb.abs());
        assert!(eval(&g, a).unwrap().abs() <= 1e-12 * scale);
        assert!(eval(&g, b).unwrap().abs() <= 1e-12 * scale);
    }

    #[test]
    fn rules_batch_constants_are_exact() {
        let corpus = vec![(p("1"), p("1"))];
        let report = check_rules_batch(&corpus, &[0.5], &[1.0, 2.0], &LimitConfig::default());
        for row in &report.rows {
            assert!(row.residual <= 1e-12, "{row:?}");
            assert!(!row.flagged);
        }
        assert_eq!(report.skipped, 0);
    }

    #[test]
    fn rules_batch_product_example() {
        let corpus = vec![(p("t^2"), p("sin(t)"))];
        let report = check_rules_batch(&corpus, &[0.5], &[1.0], &LimitConfig::default());
        let prod = report.max_residual(RuleIdentity::Product).unwrap();
        assert!(prod <= 1e-6, "product residual {prod}");
        assert_eq!(report.flagged_count(), 0);
    }

    #[test]
    fn rules_batch_skips_vanishing_denominator() {
        // g = t - 1 vanishes at t = 1: the quotient row must be skipped there
        let corpus = vec![(p("t"), p("t-1"))];
        let report = check_rules_batch(&corpus, &[0.5], &[1.0], &LimitConfig::default());
        assert!(report
            .rows
            .iter()
            .all(|r| r.identity != RuleIdentity::Quotient));
        // quotient skipped; chain also skipped because g(1) = 0 is not > 0
        assert_eq!(report.skipped, 2);
    }

    #[test]
    fn chain_reduces_to_pseudo_invariant_sine() {
        // f = sin, g = (1/α) t^α: the chain identity becomes
        // D^α sin(t^α/α) = cos(t^α/α)
        let corpus = vec![(p("sin(t)"), p("(1/0.5)*t^0.5"))];
        let report = check_rules_batch(&corpus, &[0.5], &[0.5, 1.0, 2.0], &LimitConfig::default());
        let chain = report.max_residual(RuleIdentity::Chain).unwrap();
        assert!(chain <= 1e-6, "chain residual {chain}");
    }
}
