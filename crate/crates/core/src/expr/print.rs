use std::fmt;

use super::{BinOp, Expr};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const PREFIX: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) if c.is_sign_negative() => PREFIX,
        Expr::Const(_) | Expr::Var(_) | Expr::Param(_) | Expr::Call(..) => ATOM,
        Expr::Neg(_) => PREFIX,
        Expr::Pow(..) => POWER,
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => SUM,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => PRODUCT,
    }
}

fn write_at(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(e) < min {
        f.write_str("(")?;
        write_expr(e, f)?;
        f.write_str(")")
    } else {
        write_expr(e, f)
    }
}

/// Writes `e` so that parsing the output gives back the same tree.
pub(super) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Const(c) => write!(f, "{c}"),
        Expr::Var(v) => f.write_str(v.name()),
        Expr::Param(p) => f.write_str(p),
        Expr::Neg(a) => {
            f.write_str("-")?;
            match a.as_ref() {
                // `-2` would read back as a negative literal
                Expr::Const(c) if !c.is_sign_negative() => write!(f, "({c})"),
                inner => write_at(inner, PREFIX, f),
            }
        }
        Expr::Binary(op, a, b) => {
            let level = precedence(e);
            write_at(a, level, f)?;
            write!(f, " {} ", op.symbol())?;
            write_at(b, level + 1, f)
        }
        Expr::Pow(a, c) => {
            write_at(a, ATOM, f)?;
            write!(f, "^{c}")
        }
        Expr::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(a, f)?;
            f.write_str(")")
        }
    }
}
