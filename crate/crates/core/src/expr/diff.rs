use super::{fold::fold_constants, BinOp, Expr, Func, Var};

fn d(e: &Expr, v: Var) -> Expr {
    if !e.depends_on(v) {
        return Expr::zero();
    }
    match e {
        Expr::Const(_) | Expr::Param(_) => Expr::zero(),
        Expr::Var(u) => {
            if *u == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Neg(a) => Expr::neg(d(a, v)),
        Expr::Binary(op, a, b) => {
            let (da, db) = (d(a, v), d(b, v));
            let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
            match op {
                BinOp::Add => da + db,
                BinOp::Sub => da - db,
                BinOp::Mul => da * b + a * db,
                BinOp::Div => {
                    if db.as_const() == Some(0.0) {
                        da / b
                    } else {
                        (da * b.clone() - a * db) / Expr::pow(b, 2.0)
                    }
                }
            }
        }
        Expr::Pow(a, n) => Expr::constant(*n) * Expr::pow(a.as_ref().clone(), n - 1.0) * d(a, v),
        Expr::Call(f, a) => {
            let inner = a.as_ref().clone();
            let outer = match f {
                Func::Sin => Expr::cos(inner),
                Func::Cos => Expr::neg(Expr::sin(inner)),
                Func::Tan => Expr::one() / Expr::pow(Expr::cos(inner), 2.0),
                Func::Exp => e.clone(),
                Func::Sqrt => Expr::one() / (Expr::constant(2.0) * e.clone()),
            };
            outer * d(a, v)
        }
    }
}

/// Exact partial derivative with respect to `v`; parameters are constants.
/// The result is constant-folded.
pub fn differentiate(e: &Expr, v: Var) -> Expr {
    fold_constants(&d(e, v))
}

impl Expr {
    pub fn derivative(&self, v: Var) -> Expr {
        differentiate(self, v)
    }
}
