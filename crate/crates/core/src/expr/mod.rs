//! Expression trees over a single real variable `t`.
//!
//! The AST is deliberately small: decimal constants, the variable `t`, the
//! unary functions `neg, sin, cos, exp, ln, sqrt, abs` and the binary
//! operators `+ - * / ^`. Trees are immutable; every operation here is a
//! pure function, so expressions can be shared freely across threads.

mod parse;
mod render;

pub use parse::{parse, ParseError};

use crate::real::{lit, Real};

/// Unary node kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

/// Binary node kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Immutable expression tree of a real function of one variable `t`.
///
/// Structural equality (`==`) compares trees node by node; two expressions
/// that denote the same function but differ in shape are *not* equal.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<T = f64> {
    Constant(T),
    Variable,
    Unary(UnaryOp, Box<Expr<T>>),
    Binary(BinaryOp, Box<Expr<T>>, Box<Expr<T>>),
}

/// Evaluation failed because a node received an argument outside its domain.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("ln of non-positive argument {0}")]
    LogNonPositive(f64),
    #[error("sqrt of negative argument {0}")]
    SqrtNegative(f64),
    #[error("{base}^{exponent} is outside the real domain")]
    PowDomain { base: f64, exponent: f64 },
}

/// Symbolic differentiation hit a node without a derivative (`abs`).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("`{node}` is not symbolically differentiable")]
pub struct NotDifferentiable {
    pub node: String,
}

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `base ^ exponent` with real-domain rules: integer exponents work for any
/// base, non-integer exponents require a positive base.
pub(crate) fn real_pow<T: Real>(base: T, exponent: T) -> Result<T, DomainError> {
    let is_integer = exponent.fract() == T::zero()
        && exponent.abs() <= lit::<T>(i32::MAX as f64)
        && exponent.is_finite();
    if is_integer {
        if base == T::zero() && exponent < T::zero() {
            return Err(DomainError::DivisionByZero);
        }
        Ok(base.powi(exponent.to_i32().expect("integer exponent fits i32")))
    } else if base > T::zero() {
        Ok(base.powf(exponent))
    } else {
        Err(DomainError::PowDomain {
            base: to_f64(base),
            exponent: to_f64(exponent),
        })
    }
}

/// Evaluates `f` at the point `t`, bottom-up, in IEEE semantics.
pub fn eval<T: Real>(f: &Expr<T>, t: T) -> Result<T, DomainError> {
    match f {
        Expr::Constant(c) => Ok(*c),
        Expr::Variable => Ok(t),
        Expr::Unary(op, g) => {
            let x = eval(g, t)?;
            match op {
                UnaryOp::Neg => Ok(-x),
                UnaryOp::Sin => Ok(x.sin()),
                UnaryOp::Cos => Ok(x.cos()),
                UnaryOp::Exp => Ok(x.exp()),
                UnaryOp::Ln => {
                    if x <= T::zero() {
                        Err(DomainError::LogNonPositive(to_f64(x)))
                    } else {
                        Ok(x.ln())
                    }
                }
                UnaryOp::Sqrt => {
                    if x < T::zero() {
                        Err(DomainError::SqrtNegative(to_f64(x)))
                    } else {
                        Ok(x.sqrt())
                    }
                }
                UnaryOp::Abs => Ok(x.abs()),
            }
        }
        Expr::Binary(op, l, r) => {
            let a = eval(l, t)?;
            let b = eval(r, t)?;
            match op {
                BinaryOp::Add => Ok(a + b),
                BinaryOp::Sub => Ok(a - b),
                BinaryOp::Mul => Ok(a * b),
                BinaryOp::Div => {
                    if b == T::zero() {
                        Err(DomainError::DivisionByZero)
                    } else {
                        Ok(a / b)
                    }
                }
                BinaryOp::Pow => real_pow(a, b),
            }
        }
    }
}

// associated constructors, not `std::ops` impls: they take both operands by
// value so folding can inspect the pair
#[allow(clippy::should_implement_trait)]
impl<T: Real> Expr<T> {
    pub fn constant(v: T) -> Self {
        Expr::Constant(v)
    }

    pub fn var() -> Self {
        Expr::Variable
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Expr::Constant(_))
    }

    fn as_constant(&self) -> Option<T> {
        match self {
            Expr::Constant(c) => Some(*c),
            _ => None,
        }
    }

    /// True if the tree references the variable `t` anywhere.
    pub fn contains_var(&self) -> bool {
        match self {
            Expr::Constant(_) => false,
            Expr::Variable => true,
            Expr::Unary(_, g) => g.contains_var(),
            Expr::Binary(_, l, r) => l.contains_var() || r.contains_var(),
        }
    }

    /// Replaces every occurrence of the variable with `g`, producing `self ∘ g`.
    pub fn substitute(&self, g: &Expr<T>) -> Expr<T> {
        match self {
            Expr::Constant(c) => Expr::Constant(*c),
            Expr::Variable => g.clone(),
            Expr::Unary(op, child) => Expr::Unary(*op, Box::new(child.substitute(g))),
            Expr::Binary(op, l, r) => {
                Expr::Binary(*op, Box::new(l.substitute(g)), Box::new(r.substitute(g)))
            }
        }
    }

    // Folding constructors: constant subtrees are evaluated eagerly and the
    // usual 0/1 identities collapse. No other algebraic rewriting happens;
    // equivalence of results is always checked numerically, not structurally.

    pub fn add(l: Expr<T>, r: Expr<T>) -> Expr<T> {
        match (l.as_constant(), r.as_constant()) {
            (Some(a), Some(b)) => Expr::Constant(a + b),
            (Some(a), None) if a == T::zero() => r,
            (None, Some(b)) if b == T::zero() => l,
            _ => Expr::Binary(BinaryOp::Add, Box::new(l), Box::new(r)),
        }
    }

    pub fn sub(l: Expr<T>, r: Expr<T>) -> Expr<T> {
        match (l.as_constant(), r.as_constant()) {
            (Some(a), Some(b)) => Expr::Constant(a - b),
            (None, Some(b)) if b == T::zero() => l,
            _ => Expr::Binary(BinaryOp::Sub, Box::new(l), Box::new(r)),
        }
    }

    pub fn mul(l: Expr<T>, r: Expr<T>) -> Expr<T> {
        match (l.as_constant(), r.as_constant()) {
            (Some(a), Some(b)) => Expr::Constant(a * b),
            (Some(a), None) if a == T::zero() => Expr::Constant(T::zero()),
            (None, Some(b)) if b == T::zero() => Expr::Constant(T::zero()),
            (Some(a), None) if a == T::one() => r,
            (None, Some(b)) if b == T::one() => l,
            _ => Expr::Binary(BinaryOp::Mul, Box::new(l), Box::new(r)),
        }
    }

    pub fn div(l: Expr<T>, r: Expr<T>) -> Expr<T> {
        match (l.as_constant(), r.as_constant()) {
            (Some(a), Some(b)) if b != T::zero() => Expr::Constant(a / b),
            (None, Some(b)) if b == T::one() => l,
            _ => Expr::Binary(BinaryOp::Div, Box::new(l), Box::new(r)),
        }
    }

    pub fn pow(l: Expr<T>, r: Expr<T>) -> Expr<T> {
        match (l.as_constant(), r.as_constant()) {
            (Some(a), Some(b)) => match real_pow(a, b) {
                Ok(v) => Expr::Constant(v),
                Err(_) => Expr::Binary(BinaryOp::Pow, Box::new(l), Box::new(r)),
            },
            (None, Some(b)) if b == T::one() => l,
            (None, Some(b)) if b == T::zero() => Expr::Constant(T::one()),
            _ => Expr::Binary(BinaryOp::Pow, Box::new(l), Box::new(r)),
        }
    }

    pub fn neg(g: Expr<T>) -> Expr<T> {
        match g.as_constant() {
            Some(a) => Expr::Constant(-a),
            None => Expr::Unary(UnaryOp::Neg, Box::new(g)),
        }
    }

    pub fn unary(op: UnaryOp, g: Expr<T>) -> Expr<T> {
        if op == UnaryOp::Neg {
            return Expr::neg(g);
        }
        if let Some(a) = g.as_constant() {
            if let Ok(v) = eval(&Expr::Unary(op, Box::new(Expr::Constant(a))), T::zero()) {
                return Expr::Constant(v);
            }
        }
        Expr::Unary(op, Box::new(g))
    }

    pub fn sin(g: Expr<T>) -> Expr<T> {
        Expr::unary(UnaryOp::Sin, g)
    }
    pub fn cos(g: Expr<T>) -> Expr<T> {
        Expr::unary(UnaryOp::Cos, g)
    }
    pub fn exp(g: Expr<T>) -> Expr<T> {
        Expr::unary(UnaryOp::Exp, g)
    }
    pub fn ln(g: Expr<T>) -> Expr<T> {
        Expr::unary(UnaryOp::Ln, g)
    }
    pub fn sqrt(g: Expr<T>) -> Expr<T> {
        Expr::unary(UnaryOp::Sqrt, g)
    }
    pub fn abs(g: Expr<T>) -> Expr<T> {
        Expr::unary(UnaryOp::Abs, g)
    }
}

/// Derivative of `f` with respect to `t` by the standard calculus rules.
///
/// `abs` nodes are rejected so the symbolic path stays an honest oracle;
/// functions like `3 t^{1/3}` remain testable through the numeric estimators.
pub fn diff_classical<T: Real>(f: &Expr<T>) -> Result<Expr<T>, NotDifferentiable> {
    match f {
        Expr::Constant(_) => Ok(Expr::Constant(T::zero())),
        Expr::Variable => Ok(Expr::Constant(T::one())),
        Expr::Unary(op, g) => {
            let dg = diff_classical(g)?;
            let g = (**g).clone();
            let outer = match op {
                UnaryOp::Neg => return Ok(Expr::neg(dg)),
                UnaryOp::Sin => Expr::cos(g),
                UnaryOp::Cos => Expr::neg(Expr::sin(g)),
                UnaryOp::Exp => Expr::exp(g),
                UnaryOp::Ln => Expr::div(Expr::Constant(T::one()), g),
                UnaryOp::Sqrt => Expr::div(
                    Expr::Constant(T::one()),
                    Expr::mul(Expr::Constant(lit(2.0)), Expr::sqrt(g)),
                ),
                UnaryOp::Abs => {
                    return Err(NotDifferentiable {
                        node: f.to_string(),
                    })
                }
            };
            Ok(Expr::mul(outer, dg))
        }
        Expr::Binary(op, l, r) => {
            let (l, r) = ((**l).clone(), (**r).clone());
            match op {
                BinaryOp::Add => Ok(Expr::add(diff_classical(&l)?, diff_classical(&r)?)),
                BinaryOp::Sub => Ok(Expr::sub(diff_classical(&l)?, diff_classical(&r)?)),
                BinaryOp::Mul => {
                    let (dl, dr) = (diff_classical(&l)?, diff_classical(&r)?);
                    Ok(Expr::add(
                        Expr::mul(dl, r.clone()),
                        Expr::mul(l, dr),
                    ))
                }
                BinaryOp::Div => {
                    let (dl, dr) = (diff_classical(&l)?, diff_classical(&r)?);
                    Ok(Expr::div(
                        Expr::sub(Expr::mul(dl, r.clone()), Expr::mul(l, dr)),
                        Expr::pow(r, Expr::Constant(lit(2.0))),
                    ))
                }
                BinaryOp::Pow => {
                    if let Some(c) = r.as_constant() {
                        // d/dt b^c = c b^{c-1} b'
                        let db = diff_classical(&l)?;
                        Ok(Expr::mul(
                            Expr::mul(
                                Expr::Constant(c),
                                Expr::pow(l, Expr::Constant(c - T::one())),
                            ),
                            db,
                        ))
                    } else {
                        // d/dt b^e = b^e (e' ln b + e b' / b)
                        let db = diff_classical(&l)?;
                        let de = diff_classical(&r)?;
                        let inner = Expr::add(
                            Expr::mul(de, Expr::ln(l.clone())),
                            Expr::div(Expr::mul(r.clone(), db), l.clone()),
                        );
                        Ok(Expr::mul(Expr::pow(l, r), inner))
                    }
                }
            }
        }
    }
}

/// `n`-fold application of [`diff_classical`]; `n = 0` returns `f` unchanged.
pub fn nth_diff<T: Real>(f: &Expr<T>, n: u32) -> Result<Expr<T>, NotDifferentiable> {
    let mut out = f.clone();
    for _ in 0..n {
        out = diff_classical(&out)?;
    }
    Ok(out)
}
