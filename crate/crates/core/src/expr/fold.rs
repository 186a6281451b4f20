use super::{eval::EvalContext, BinOp, Expr};

fn all_children_const(e: &Expr) -> bool {
    match e {
        Expr::Const(_) => true,
        Expr::Var(_) | Expr::Param(_) => false,
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.as_const().is_some(),
        Expr::Binary(_, a, b) => a.as_const().is_some() && b.as_const().is_some(),
    }
}

fn collapse(e: Expr) -> Expr {
    // Constant subtree: evaluate once. Subtrees that fail to evaluate (1/0,
    // sqrt(-1)) are kept so the error still surfaces at evaluation time.
    if !all_children_const(&e) {
        return e;
    }
    match e.eval(&EvalContext::new()) {
        Ok(v) => Expr::Const(v),
        Err(_) => e,
    }
}

/// Collapses constant subtrees and removes additive and multiplicative
/// identities (`0 + a`, `a - 0`, `0 * a`, `1 * a`, `a / 1`, `a^1`, `a^0`,
/// `--a`). The result evaluates to the same value wherever the input does.
pub fn fold_constants(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => e.clone(),
        Expr::Neg(a) => collapse(Expr::neg(fold_constants(a))),
        Expr::Binary(op, a, b) => {
            let (a, b) = (fold_constants(a), fold_constants(b));
            let rebuilt = match op {
                BinOp::Add => Expr::add(a, b),
                BinOp::Sub => Expr::sub(a, b),
                BinOp::Mul => Expr::mul(a, b),
                BinOp::Div => Expr::div(a, b),
            };
            collapse(rebuilt)
        }
        Expr::Pow(a, c) => collapse(Expr::pow(fold_constants(a), *c)),
        Expr::Call(f, a) => collapse(Expr::call(*f, fold_constants(a))),
    }
}

impl Expr {
    pub fn folded(&self) -> Expr {
        fold_constants(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn annihilator_and_identity() {
        assert_eq!(fold_constants(&parse("0*sin(t) + x").unwrap()), parse("x").unwrap());
    }

    #[test]
    fn constant_product() {
        assert_eq!(fold_constants(&parse("2*3").unwrap()), Expr::Const(6.0));
        assert_eq!(fold_constants(&parse("-(2)").unwrap()), Expr::Const(-2.0));
        assert_eq!(fold_constants(&parse("x*(sqrt(4)+1)").unwrap()), parse("x*3").unwrap());
    }

    #[test]
    fn fixed_point() {
        let e = parse("sin(t)").unwrap();
        assert_eq!(fold_constants(&e), e);
    }

    #[test]
    fn failing_constant_subtrees_are_kept() {
        let e = parse("x + 1/0").unwrap();
        assert_eq!(fold_constants(&e), e);
        let e = parse("sqrt(-1)").unwrap();
        assert_eq!(fold_constants(&e), e);
    }

    #[test]
    fn identities() {
        for (input, output) in [
            ("x - 0", "x"),
            ("0 - x", "-x"),
            ("x / 1", "x"),
            ("x^1", "x"),
            ("x^0", "1"),
            ("--x", "x"),
            ("1*x*1", "x"),
        ] {
            assert_eq!(fold_constants(&parse(input).unwrap()), parse(output).unwrap(), "{input}");
        }
    }
}
