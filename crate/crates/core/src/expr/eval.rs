use thiserror::Error;

use super::{BinOp, Expr, Func, Params, Var};
use crate::Point4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable `{}` is not bound", .0.name())]
    UnboundVariable(Var),
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of negative value {0}")]
    NegativeSqrt(f64),
    #[error("{0} produced a non-finite value")]
    NonFinite(&'static str),
}

/// Variable bindings plus a borrowed parameter table.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvalContext<'p> {
    vars: [Option<f64>; 5],
    params: Option<&'p Params>,
}

impl<'p> EvalContext<'p> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds t, x, y, z from a spacetime point.
    pub fn at(point: Point4) -> Self {
        Self::new()
            .with(Var::T, point.t)
            .with(Var::X, point.x)
            .with(Var::Y, point.y)
            .with(Var::Z, point.z)
    }

    pub fn with(mut self, v: Var, value: f64) -> Self {
        self.vars[v.index()] = Some(value);
        self
    }

    pub fn with_params(mut self, params: &'p Params) -> Self {
        self.params = Some(params);
        self
    }

    pub fn var(&self, v: Var) -> Option<f64> {
        self.vars[v.index()]
    }

    pub fn params(&self) -> Option<&'p Params> {
        self.params
    }
}

fn finite(value: f64, op: &'static str) -> Result<f64, EvalError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvalError::NonFinite(op))
    }
}

pub(super) fn power(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

impl Expr {
    /// Evaluates the expression in IEEE double precision.
    ///
    /// Domain violations are errors rather than NaN: division by zero, the
    /// square root of a negative number and any non-finite intermediate.
    pub fn eval(&self, ctx: &EvalContext<'_>) -> Result<f64, EvalError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(v) => ctx.var(*v).ok_or(EvalError::UnboundVariable(*v)),
            Expr::Param(name) => ctx
                .params
                .and_then(|p| p.get(name))
                .copied()
                .ok_or_else(|| EvalError::UnboundParameter(name.clone())),
            Expr::Neg(a) => Ok(-a.eval(ctx)?),
            Expr::Binary(op, a, b) => {
                let lhs = a.eval(ctx)?;
                let rhs = b.eval(ctx)?;
                match op {
                    BinOp::Add => finite(lhs + rhs, "addition"),
                    BinOp::Sub => finite(lhs - rhs, "subtraction"),
                    BinOp::Mul => finite(lhs * rhs, "multiplication"),
                    BinOp::Div => {
                        if rhs == 0.0 {
                            Err(EvalError::DivisionByZero)
                        } else {
                            finite(lhs / rhs, "division")
                        }
                    }
                }
            }
            Expr::Pow(a, c) => {
                let base = a.eval(ctx)?;
                if base == 0.0 && *c < 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                finite(power(base, *c), "power")
            }
            Expr::Call(func, a) => {
                let arg = a.eval(ctx)?;
                match func {
                    Func::Sin => Ok(arg.sin()),
                    Func::Cos => Ok(arg.cos()),
                    Func::Tan => finite(arg.tan(), "tan"),
                    Func::Exp => finite(arg.exp(), "exp"),
                    Func::Sqrt => {
                        if arg < 0.0 {
                            Err(EvalError::NegativeSqrt(arg))
                        } else {
                            Ok(arg.sqrt())
                        }
                    }
                }
            }
        }
    }

    /// Evaluates at a spacetime point with the given parameters.
    pub fn eval_at(&self, point: Point4, params: &Params) -> Result<f64, EvalError> {
        self.eval(&EvalContext::at(point).with_params(params))
    }
}
