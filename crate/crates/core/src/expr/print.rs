//! Canonical printing; `parse(print(e))` reproduces `e` structurally.

use super::Expr;
use num::{One, Signed};
use std::fmt;

/// Binding strength of an expression head, used to decide parentheses.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Neg(..) => 2,
        Expr::Mul(..) | Expr::Div(..) => 3,
        Expr::Pow { .. } => 4,
        // A bare ratio or negative constant reparses as an operation, so it
        // binds like one.
        Expr::Number(r) if r.is_negative() || !r.denom().is_one() => 2,
        _ => 5,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Expr::I => write!(f, "I"),
            Expr::Pi => write!(f, "pi"),
            Expr::Var => write!(f, "s"),
            Expr::Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " + ")?;
                write_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " - ")?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_child(f, a, 3)?;
                write!(f, "*")?;
                write_child(f, b, 4)
            }
            Expr::Div(a, b) => {
                write_child(f, a, 3)?;
                write!(f, "/")?;
                write_child(f, b, 4)
            }
            Expr::Neg(a) => {
                // `-a*b` would reparse as `(-a)*b`, so products get parens.
                write!(f, "-")?;
                write_child(f, a, 4)
            }
            Expr::Pow {
                base,
                exponent,
                winding,
            } => {
                write_child(f, base, 5)?;
                write!(f, "^")?;
                if *winding != 0 {
                    write!(f, "[{winding}]")?;
                }
                if exponent.is_integer() && !exponent.is_negative() {
                    write!(f, "{}", exponent.numer())
                } else if exponent.is_integer() {
                    write!(f, "(-{})", exponent.numer().abs())
                } else {
                    write!(f, "({}/{})", exponent.numer(), exponent.denom())
                }
            }
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}
