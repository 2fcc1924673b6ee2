//! Rendering back to the grammar of [`super::parse`].
//!
//! Parenthesization follows the grammar levels, so re-parsing a rendered
//! tree reproduces it node for node (negative constants render like unary
//! minus and therefore re-parse as one).

use std::fmt;

use num_traits::Float;

use super::{BinaryOp, Expr, UnaryOp};

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence<T: Float>(e: &Expr<T>) -> u8 {
    match e {
        Expr::Constant(c) if c.is_sign_negative() => PREC_NEG,
        Expr::Constant(_) | Expr::Variable => PREC_ATOM,
        Expr::Unary(UnaryOp::Neg, _) => PREC_NEG,
        Expr::Unary(..) => PREC_ATOM,
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => PREC_ADD,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => PREC_MUL,
        Expr::Binary(BinaryOp::Pow, ..) => PREC_POW,
    }
}

fn write_prec<T: Float + fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    e: &Expr<T>,
    min_prec: u8,
) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "(")?;
        write_prec(f, e, 0)?;
        return write!(f, ")");
    }
    match e {
        Expr::Constant(c) => write!(f, "{c}"),
        Expr::Variable => write!(f, "t"),
        Expr::Unary(UnaryOp::Neg, g) => {
            write!(f, "-")?;
            write_prec(f, g, PREC_NEG)
        }
        Expr::Unary(op, g) => {
            let name = match op {
                UnaryOp::Sin => "sin",
                UnaryOp::Cos => "cos",
                UnaryOp::Exp => "exp",
                UnaryOp::Ln => "ln",
                UnaryOp::Sqrt => "sqrt",
                UnaryOp::Abs => "abs",
                UnaryOp::Neg => unreachable!(),
            };
            write!(f, "{name}(")?;
            write_prec(f, g, 0)?;
            write!(f, ")")
        }
        Expr::Binary(op, l, r) => {
            let (sym, lp, rp) = match op {
                BinaryOp::Add => ("+", PREC_ADD, PREC_MUL),
                BinaryOp::Sub => ("-", PREC_ADD, PREC_MUL),
                BinaryOp::Mul => ("*", PREC_MUL, PREC_NEG),
                BinaryOp::Div => ("/", PREC_MUL, PREC_NEG),
                BinaryOp::Pow => ("^", PREC_ATOM, PREC_NEG),
            };
            write_prec(f, l, lp)?;
            write!(f, "{sym}")?;
            write_prec(f, r, rp)
        }
    }
}

impl<T: Float + fmt::Display> fmt::Display for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(f, self, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn roundtrips(s: &str) {
        let e: Expr<f64> = parse(s).unwrap();
        let rendered = e.to_string();
        let reparsed: Expr<f64> = parse(&rendered).unwrap();
        assert_eq!(e, reparsed, "{s} -> {rendered}");
    }

    #[test]
    fn render_examples() {
        let e: Expr<f64> = parse("t^2").unwrap();
        assert_eq!(e.to_string(), "t^2");
        let e: Expr<f64> = parse("sin(t/0.5)").unwrap();
        assert_eq!(e.to_string(), "sin(t/0.5)");
        let e: Expr<f64> = parse("-(1+t)*t^-2").unwrap();
        assert_eq!(e.to_string(), "-(1+t)*t^-2");
    }

    #[test]
    fn tricky_shapes_roundtrip() {
        for s in [
            "t^2^3",
            "(t^2)^3",
            "1-2-t",
            "1-(2-t)",
            "t/(1/t)",
            "t/1/t",
            "-t^2",
            "(-t)^2",
            "t^-1",
            "2*-t",
            "sin(cos(exp(t)))",
            "-(t+1)",
            "sqrt(abs(t))",
            "pi*e",
        ] {
            roundtrips(s);
        }
    }
}
