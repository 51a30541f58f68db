use std::fmt;

use num_traits::{One, Signed};

use super::{Expr, Func, Node};

// Binding strength used to decide parenthesization.
fn prec(e: &Expr) -> u8 {
    match e.kind() {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(_) => 3,
        Node::Pow(..) => 4,
        Node::Const(q) if q.is_negative() || !q.denom().is_one() => 0,
        Node::Const(_) | Node::Var(_) | Node::Call(..) => 5,
    }
}

fn is_neg(e: &Expr) -> bool {
    matches!(e.kind(), Node::Neg(_))
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Node::Const(q) => write!(f, "{q}"),
            Node::Var(v) => f.write_str(v),
            Node::Neg(a) => {
                f.write_str("-")?;
                write_wrapped(f, a, prec(a) < 3)
            }
            Node::Add(a, b) | Node::Sub(a, b) => {
                write_wrapped(f, a, prec(a) < 1)?;
                f.write_str(if matches!(self.kind(), Node::Add(..)) { " + " } else { " - " })?;
                write_wrapped(f, b, prec(b) <= 1 || is_neg(b))
            }
            Node::Mul(a, b) | Node::Div(a, b) => {
                write_wrapped(f, a, prec(a) < 2)?;
                f.write_str(if matches!(self.kind(), Node::Mul(..)) { "*" } else { "/" })?;
                write_wrapped(f, b, prec(b) <= 2 || is_neg(b))
            }
            Node::Pow(a, k) => {
                write_wrapped(f, a, prec(a) < 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

fn latex_var(v: &str) -> String {
    match v.split_once('_') {
        Some((base, sub)) => format!("{base}_{{{sub}}}"),
        None => v.to_string(),
    }
}

fn latex_wrapped(e: &Expr, wrap: bool) -> String {
    if wrap {
        format!("\\left({}\\right)", to_latex(e))
    } else {
        to_latex(e)
    }
}

/// LaTeX rendering using the same precedence rules as the plain printer.
pub fn to_latex(e: &Expr) -> String {
    match e.kind() {
        Node::Const(q) if q.denom().is_one() => q.numer().to_string(),
        Node::Const(q) => {
            let sign = if q.is_negative() { "-" } else { "" };
            format!("{sign}\\frac{{{}}}{{{}}}", q.numer().abs(), q.denom())
        }
        Node::Var(v) => latex_var(v),
        Node::Neg(a) => format!("-{}", latex_wrapped(a, prec(a) < 3)),
        Node::Add(a, b) => format!("{} + {}", latex_wrapped(a, prec(a) < 1), latex_wrapped(b, prec(b) <= 1 || is_neg(b))),
        Node::Sub(a, b) => format!("{} - {}", latex_wrapped(a, prec(a) < 1), latex_wrapped(b, prec(b) <= 1 || is_neg(b))),
        Node::Mul(a, b) => format!("{} \\, {}", latex_wrapped(a, prec(a) < 2), latex_wrapped(b, prec(b) < 2 || is_neg(b))),
        Node::Div(a, b) => format!("\\frac{{{}}}{{{}}}", to_latex(a), to_latex(b)),
        Node::Pow(a, k) => format!("{}^{{{k}}}", latex_wrapped(a, prec(a) < 5)),
        Node::Call(Func::Exp, a) => format!("e^{{{}}}", to_latex(a)),
        Node::Call(Func::Sqrt, a) => format!("\\sqrt{{{}}}", to_latex(a)),
        Node::Call(func, a) => format!("\\{}\\left({}\\right)", func.name(), to_latex(a)),
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, simplify, Expr};

    #[test]
    fn prints_minimal_unambiguous_text() {
        assert_eq!(parse("x*y + sin(z)").unwrap().to_string(), "x*y + sin(z)");
        assert_eq!(parse("a - (b - c)").unwrap().to_string(), "a - (b - c)");
        assert_eq!(parse("-x^2").unwrap().to_string(), "-x^2");
        assert_eq!(parse("(x^2)^3").unwrap().to_string(), "(x^2)^3");
        assert_eq!(Expr::ratio(-2, 3).mul(&Expr::var("x")).to_string(), "(-2/3)*x");
        assert_eq!(Expr::var("a").mul(&Expr::var("b").neg()).to_string(), "a*(-b)");
        assert_eq!(Expr::var("a").sub(&Expr::var("b").neg()).to_string(), "a - (-b)");
    }

    #[test]
    fn negative_exponent_round_trips() {
        let e = simplify(&parse("x^(-3)").unwrap());
        assert_eq!(simplify(&parse(&e.to_string()).unwrap()), e);
    }

    #[test]
    fn latex_fragments() {
        use super::to_latex;
        assert_eq!(to_latex(&parse("x_1*exp(-y_2)/2").unwrap()), "\\frac{x_{1} \\, e^{-y_{2}}}{2}");
        assert_eq!(to_latex(&parse("sin(x)^2").unwrap()), "\\sin\\left(x\\right)^{2}");
    }
}
