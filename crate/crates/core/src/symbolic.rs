//! Closed-form order-α derivatives, two ways.
//!
//! For differentiable `f` the operator collapses to `t^{1-α} f'(t)`; that is
//! [`alpha_deriv_closed`]. Independently, [`alpha_deriv_rules`] never uses
//! that shortcut: it walks the tree applying the structural rules —
//! linearity, power rule `D^α t^c = c t^{c-α}`, vanishing constants, product
//! rule, quotient rule, and the chain rule `D^α(u∘g) = u'(g(t))·D^α g(t)` —
//! and records which rule fired at each node. The two routes must agree
//! pointwise; tests enforce exactly that.

use crate::expr::{diff_classical, Expr, NotDifferentiable, UnaryOp};
use crate::real::{lit, Real};

/// Rule names as they appear in a [`RuleTrace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Linearity,
    Power,
    Constant,
    Product,
    Quotient,
    Chain,
    Table,
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Rule::Linearity => "linearity",
            Rule::Power => "power",
            Rule::Constant => "constant",
            Rule::Product => "product",
            Rule::Quotient => "quotient",
            Rule::Chain => "chain",
            Rule::Table => "table",
        };
        write!(f, "{name}")
    }
}

/// One rule application: the node it fired on (rendered) and the rule name.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleRecord {
    pub node: String,
    pub rule: Rule,
}

/// Audit trail of a rule-engine run, one record per node dispatched on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RuleTrace {
    pub records: Vec<RuleRecord>,
}

impl RuleTrace {
    pub fn contains(&self, rule: Rule) -> bool {
        self.records.iter().any(|r| r.rule == rule)
    }
}

/// Symbolic-path failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymbolicError {
    #[error(transparent)]
    NotDifferentiable(#[from] NotDifferentiable),
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
}

fn check_alpha<T: Real>(alpha: T) -> Result<(), SymbolicError> {
    if alpha > T::zero() && alpha <= T::one() {
        Ok(())
    } else {
        Err(SymbolicError::InvalidAlpha(alpha.to_f64().unwrap_or(f64::NAN)))
    }
}

/// `D^α f` as the constant-folded tree `t^{1-α} · f'`, valid for
/// symbolically differentiable `f` and α ∈ (0, 1].
pub fn alpha_deriv_closed<T: Real>(f: &Expr<T>, alpha: T) -> Result<Expr<T>, SymbolicError> {
    check_alpha(alpha)?;
    let df = diff_classical(f)?;
    Ok(Expr::mul(
        Expr::pow(Expr::var(), Expr::constant(T::one() - alpha)),
        df,
    ))
}

/// Classical derivative u' of a table function, evaluated at the subtree `g`.
fn unary_classical_derivative<T: Real>(op: UnaryOp, g: &Expr<T>) -> Expr<T> {
    let g = g.clone();
    match op {
        UnaryOp::Sin => Expr::cos(g),
        UnaryOp::Cos => Expr::neg(Expr::sin(g)),
        UnaryOp::Exp => Expr::exp(g),
        UnaryOp::Ln => Expr::div(Expr::constant(T::one()), g),
        UnaryOp::Sqrt => Expr::div(
            Expr::constant(T::one()),
            Expr::mul(Expr::constant(lit(2.0)), Expr::sqrt(g)),
        ),
        UnaryOp::Neg | UnaryOp::Abs => unreachable!("handled by the caller"),
    }
}

fn rules_rec<T: Real>(
    f: &Expr<T>,
    alpha: T,
    trace: &mut RuleTrace,
) -> Result<Expr<T>, SymbolicError> {
    use crate::expr::BinaryOp::*;

    let record = |trace: &mut RuleTrace, rule: Rule| {
        trace.records.push(RuleRecord {
            node: f.to_string(),
            rule,
        });
    };

    // constant subtree: D^α C = 0
    if !f.contains_var() {
        record(trace, Rule::Constant);
        return Ok(Expr::constant(T::zero()));
    }

    match f {
        Expr::Constant(_) => unreachable!("constants have no variable"),
        // t = t^1: power rule with c = 1
        Expr::Variable => {
            record(trace, Rule::Power);
            Ok(Expr::pow(Expr::var(), Expr::constant(T::one() - alpha)))
        }
        Expr::Unary(UnaryOp::Neg, g) => {
            record(trace, Rule::Linearity);
            Ok(Expr::neg(rules_rec(g, alpha, trace)?))
        }
        Expr::Unary(UnaryOp::Abs, _) => Err(NotDifferentiable {
            node: f.to_string(),
        }
        .into()),
        // u(g): D^α = u'(g) · D^α g
        Expr::Unary(op, g) => {
            record(trace, Rule::Chain);
            let dg = rules_rec(g, alpha, trace)?;
            Ok(Expr::mul(unary_classical_derivative(*op, g), dg))
        }
        Expr::Binary(Add, l, r) => {
            record(trace, Rule::Linearity);
            Ok(Expr::add(
                rules_rec(l, alpha, trace)?,
                rules_rec(r, alpha, trace)?,
            ))
        }
        Expr::Binary(Sub, l, r) => {
            record(trace, Rule::Linearity);
            Ok(Expr::sub(
                rules_rec(l, alpha, trace)?,
                rules_rec(r, alpha, trace)?,
            ))
        }
        Expr::Binary(Mul, l, r) => {
            // scalar multiple a·f is linearity, not the product rule
            if !l.contains_var() {
                record(trace, Rule::Linearity);
                let dr = rules_rec(r, alpha, trace)?;
                return Ok(Expr::mul((**l).clone(), dr));
            }
            if !r.contains_var() {
                record(trace, Rule::Linearity);
                let dl = rules_rec(l, alpha, trace)?;
                return Ok(Expr::mul((**r).clone(), dl));
            }
            record(trace, Rule::Product);
            let dl = rules_rec(l, alpha, trace)?;
            let dr = rules_rec(r, alpha, trace)?;
            // f·D^α(g) + g·D^α(f)
            Ok(Expr::add(
                Expr::mul((**l).clone(), dr),
                Expr::mul((**r).clone(), dl),
            ))
        }
        Expr::Binary(Div, l, r) => {
            if !r.contains_var() {
                record(trace, Rule::Linearity);
                let dl = rules_rec(l, alpha, trace)?;
                return Ok(Expr::div(dl, (**r).clone()));
            }
            record(trace, Rule::Quotient);
            let dl = rules_rec(l, alpha, trace)?;
            let dr = rules_rec(r, alpha, trace)?;
            // (g·D^α(f) - f·D^α(g)) / g²
            Ok(Expr::div(
                Expr::sub(
                    Expr::mul((**r).clone(), dl),
                    Expr::mul((**l).clone(), dr),
                ),
                Expr::pow((**r).clone(), Expr::constant(lit(2.0))),
            ))
        }
        Expr::Binary(Pow, base, expo) => {
            // D^α t^c = c t^{c-α}: the only power shape with its own rule
            if **base == Expr::Variable {
                if let Expr::Constant(c) = **expo {
                    record(trace, Rule::Power);
                    return Ok(Expr::mul(
                        Expr::constant(c),
                        Expr::pow(Expr::var(), Expr::constant(c - alpha)),
                    ));
                }
            }
            // anything else: g^h = exp(h·ln g), then the chain rule gives
            // D^α(g^h) = g^h · D^α(h·ln g)
            record(trace, Rule::Chain);
            let inner = Expr::mul((**expo).clone(), Expr::ln((**base).clone()));
            let d_inner = rules_rec(&inner, alpha, trace)?;
            Ok(Expr::mul(f.clone(), d_inner))
        }
    }
}

/// Structural rule-engine derivative of order α ∈ (0, 1], with the trace of
/// which rule fired on each node.
pub fn alpha_deriv_rules<T: Real>(
    f: &Expr<T>,
    alpha: T,
) -> Result<(Expr<T>, RuleTrace), SymbolicError> {
    check_alpha(alpha)?;
    let mut trace = RuleTrace::default();
    let d = rules_rec(f, alpha, &mut trace)?;
    Ok((d, trace))
}

/// A known (function, expected D^α) pair from the built-in tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry<T = f64> {
    pub label: &'static str,
    pub function: Expr<T>,
    pub expected: Expr<T>,
}

/// The six elementary-function identities, instantiated at a given α and
/// coefficient `a` (the power pair uses `a` as the exponent):
///
/// ```text
/// (a) D^α t^a        = a t^{a-α}
/// (b) D^α 1          = 0
/// (c) D^α e^{at}     = a t^{1-α} e^{at}
/// (d) D^α sin(at)    = a t^{1-α} cos(at)
/// (e) D^α cos(at)    = -a t^{1-α} sin(at)
/// (f) D^α (t^α/α)    = 1
/// ```
pub fn theorem4_table<T: Real>(alpha: T, a: T) -> Result<Vec<TableEntry<T>>, SymbolicError> {
    check_alpha(alpha)?;
    let var = Expr::<T>::var;
    let konst = Expr::<T>::constant;
    let one = T::one;
    let t_pow = |e: T| Expr::pow(var(), konst(e));
    let at = || Expr::mul(konst(a), var());
    let a_t1ma = || Expr::mul(konst(a), t_pow(one() - alpha));

    Ok(vec![
        TableEntry {
            label: "(a) power t^a",
            function: t_pow(a),
            expected: Expr::mul(konst(a), t_pow(a - alpha)),
        },
        TableEntry {
            label: "(b) constant 1",
            function: konst(one()),
            expected: konst(T::zero()),
        },
        TableEntry {
            label: "(c) exp(a*t)",
            function: Expr::exp(at()),
            expected: Expr::mul(a_t1ma(), Expr::exp(at())),
        },
        TableEntry {
            label: "(d) sin(a*t)",
            function: Expr::sin(at()),
            expected: Expr::mul(a_t1ma(), Expr::cos(at())),
        },
        TableEntry {
            label: "(e) cos(a*t)",
            function: Expr::cos(at()),
            expected: Expr::neg(Expr::mul(a_t1ma(), Expr::sin(at()))),
        },
        TableEntry {
            label: "(f) normalized power t^alpha/alpha",
            function: Expr::mul(Expr::div(konst(one()), konst(alpha)), t_pow(alpha)),
            expected: konst(one()),
        },
    ])
}

/// The pseudo-invariant identities in the variable u = t^α/α:
///
/// ```text
/// (i)   D^α sin(u) = cos(u)
/// (ii)  D^α cos(u) = -sin(u)
/// (iii) D^α e^u    = e^u
/// ```
pub fn theorem5_table<T: Real>(alpha: T) -> Result<Vec<TableEntry<T>>, SymbolicError> {
    check_alpha(alpha)?;
    let u = || {
        Expr::mul(
            Expr::div(Expr::constant(T::one()), Expr::constant(alpha)),
            Expr::pow(Expr::var(), Expr::constant(alpha)),
        )
    };
    Ok(vec![
        TableEntry {
            label: "(i) sin(t^alpha/alpha)",
            function: Expr::sin(u()),
            expected: Expr::cos(u()),
        },
        TableEntry {
            label: "(ii) cos(t^alpha/alpha)",
            function: Expr::cos(u()),
            expected: Expr::neg(Expr::sin(u())),
        },
        TableEntry {
            label: "(iii) exp(t^alpha/alpha)",
            function: Expr::exp(u()),
            expected: Expr::exp(u()),
        },
    ])
}
