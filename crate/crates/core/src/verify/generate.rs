//! Seeded random expressions for property checks.
//!
//! Phases and family functions are sums of low-degree monomials and a few
//! sine/cosine terms of linear arguments; all coefficients lie in [−2, 2].

use rand::seq::SliceRandom;
use rand::Rng;

use crate::catalog::SpinWeights;
use crate::expr::{Expr, Func, Var};
use crate::spinor::CScalar;

fn coefficient<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.gen_range(-2.0..=2.0)
}

/// c·v₁·…·v_k with k ≤ `max_degree` variables drawn from `vars`.
pub fn random_monomial<R: Rng + ?Sized>(rng: &mut R, vars: &[Var], max_degree: u32) -> Expr {
    let degree = rng.gen_range(0..=max_degree);
    let mut term = Expr::constant(coefficient(rng));
    for _ in 0..degree {
        term = term * Expr::var(*vars.choose(rng).expect("non-empty variable list"));
    }
    term
}

/// c·sin(a·u + b·v + φ) or c·cos(…).
pub fn random_trig_term<R: Rng + ?Sized>(rng: &mut R, vars: &[Var]) -> Expr {
    let func = if rng.gen_bool(0.5) { Func::Sin } else { Func::Cos };
    let mut arg = Expr::constant(coefficient(rng));
    for _ in 0..2 {
        arg = arg + Expr::constant(coefficient(rng)) * Expr::var(*vars.choose(rng).expect("non-empty variable list"));
    }
    Expr::constant(coefficient(rng)) * Expr::call(func, arg)
}

/// Polynomial of degree ≤ 3 plus one or two trig terms in `vars`.
pub fn random_smooth_expr<R: Rng + ?Sized>(rng: &mut R, vars: &[Var]) -> Expr {
    let monomials = rng.gen_range(2..=4);
    let trig = rng.gen_range(1..=2);
    let mut terms: Vec<Expr> = (0..monomials).map(|_| random_monomial(rng, vars, 3)).collect();
    terms.extend((0..trig).map(|_| random_trig_term(rng, vars)));
    Expr::sum(terms).folded()
}

/// Smooth function of t that stays positive on |t| ≤ 1: a + b·sin(ωt + δ)
/// + c·t with a ∈ [2, 3], |b|, |c| ≤ 0.5.
pub fn random_positive_profile<R: Rng + ?Sized>(rng: &mut R) -> Expr {
    let t = Expr::var(Var::T);
    let a = rng.gen_range(2.0..=3.0);
    let b = rng.gen_range(-0.5..=0.5);
    let c = rng.gen_range(-0.5..=0.5);
    let omega = rng.gen_range(0.5..=2.0);
    let delta = rng.gen_range(-1.0..=1.0);
    (Expr::constant(a)
        + Expr::constant(b) * Expr::sin(Expr::constant(omega) * t.clone() + Expr::constant(delta))
        + Expr::constant(c) * t)
        .folded()
}

/// Smooth angle profile θ₀ + αt + β·sin(ωt) (or a quadratic), with θ₀ kept
/// away from the poles.
pub fn random_angle_profile<R: Rng + ?Sized>(rng: &mut R) -> Expr {
    let t = Expr::var(Var::T);
    let base = rng.gen_range(0.3..=2.8);
    let rate = rng.gen_range(-1.0..=1.0);
    let wiggle = rng.gen_range(-0.5..=0.5);
    let extra = if rng.gen_bool(0.5) {
        Expr::sin(Expr::constant(rng.gen_range(0.5..=2.0)) * t.clone())
    } else {
        Expr::pow(t.clone(), 2.0)
    };
    (Expr::constant(base) + Expr::constant(rate) * t + Expr::constant(wiggle) * extra).folded()
}

/// Spin weights with components uniform in [−1, 1]², not both tiny.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R) -> SpinWeights {
    loop {
        let mut c = || CScalar::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        let w = SpinWeights::new(c(), c());
        if w.norm_sqr() > 1e-3 {
            return w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generator_is_reproducible() {
        let gen = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..5).map(|_| random_smooth_expr(&mut rng, &Var::SPACETIME).to_string()).collect::<Vec<_>>()
        };
        assert_eq!(gen(7), gen(7));
        assert_ne!(gen(7), gen(8));
    }

    #[test]
    fn profiles_stay_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let e0 = random_positive_profile(&mut rng);
            for k in 0..=20 {
                let t = -1.0 + 0.1 * k as f64;
                let v = e0.eval_at(crate::Point4::new(t, 0.0, 0.0, 0.0), &Default::default()).unwrap();
                assert!(v > 0.0);
            }
        }
    }

    #[test]
    fn expressions_only_use_requested_variables() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let e = random_smooth_expr(&mut rng, &[Var::T]);
            for v in [Var::X, Var::Y, Var::Z, Var::W] {
                assert!(!e.depends_on(v));
            }
        }
    }
}
