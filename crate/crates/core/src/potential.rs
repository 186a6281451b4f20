//! 4-potentials and electromagnetic fields.
//!
//! Potentials use the lower-index tuple convention: component μ of `b`
//! multiplies γ^μ (or σ^μ). Fields are in Gaussian units with c = 1:
//! U = b₀/q, A = (b₁, b₂, b₃)/q, E = −∇U − ∂A/∂t, B = ∇×A.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{helicity_spinor, helicity_spinor_rate, DirectionSpec};
use crate::expr::{EvalContext, EvalError, Expr, Params, Var};
use crate::spinor::{weyl_matrices, CScalar, Helicity, Spinor2};
use crate::{FourVec, Point4};

pub type PotentialExpr = FourVec<Expr>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("charge q must be nonzero")]
    ZeroCharge,
    #[error("formula {formula:?} needs parameter `{name}`")]
    MissingParameter { formula: FormulaId, name: &'static str },
    #[error("wave number k_w must be nonzero")]
    ZeroWaveNumber,
    #[error("connection system is singular at t = {0}")]
    SingularSystem(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// a_μ = ∂_μ h.
pub fn base_potential(h: &Expr) -> PotentialExpr {
    FourVec(Var::SPACETIME.map(|v| h.derivative(v)))
}

/// b_μ = a_μ + s·κ_μ.
pub fn degenerate_family(a: &PotentialExpr, kappa: &FourVec<Expr>, s: &Expr) -> PotentialExpr {
    FourVec(std::array::from_fn(|mu| {
        (a[mu].clone() + s.clone() * kappa[mu].clone()).folded()
    }))
}

pub fn add_potentials(a: &PotentialExpr, b: &PotentialExpr) -> PotentialExpr {
    FourVec(std::array::from_fn(|mu| (a[mu].clone() + b[mu].clone()).folded()))
}

pub fn eval_potential(b: &PotentialExpr, p: Point4, params: &Params) -> Result<FourVec<f64>, EvalError> {
    let ctx = EvalContext::at(p).with_params(params);
    Ok(FourVec([
        b[0].eval(&ctx)?,
        b[1].eval(&ctx)?,
        b[2].eval(&ctx)?,
        b[3].eval(&ctx)?,
    ]))
}

/// Which coefficient multiplies φ̇ in the time and z components of the
/// connection potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConnectionVariant {
    /// ½φ̇: solves the Weyl equation exactly.
    #[default]
    Corrected,
    /// φ̇ with unit coefficient, as typeset in the printed formula. Kept for
    /// diagnostics only.
    Printed,
}

/// Potential under which the time-varying-direction Weyl spinor
/// χ(θ(t), φ(t))·e^{ih} solves its equation.
///
/// Positive helicity: (∂_t h + ½φ̇, ∂_x h + ½θ̇ sinφ, ∂_y h − ½θ̇ cosφ, ∂_z h − ½φ̇).
/// Negative helicity: (∂_t h + ½φ̇, ∂_x h − ½θ̇ sinφ, ∂_y h + ½θ̇ cosφ, ∂_z h + ½φ̇).
pub fn connection_potential(h: &Expr, dir: &DirectionSpec, helicity: Helicity) -> PotentialExpr {
    connection_potential_variant(h, dir, helicity, ConnectionVariant::Corrected)
}

pub fn connection_potential_variant(
    h: &Expr,
    dir: &DirectionSpec,
    helicity: Helicity,
    variant: ConnectionVariant,
) -> PotentialExpr {
    let base = base_potential(h);
    let (theta_rate, phi_rate) = dir.rates();
    let phi_coeff = match variant {
        ConnectionVariant::Corrected => 0.5,
        ConnectionVariant::Printed => 1.0,
    };
    let sign = helicity.sign();
    let half_theta = theta_rate.scale(0.5 * sign);
    let correction = [
        phi_rate.clone().scale(phi_coeff),
        half_theta.clone() * Expr::sin(dir.phi.clone()),
        -(half_theta * Expr::cos(dir.phi.clone())),
        phi_rate.scale(-sign * phi_coeff),
    ];
    FourVec(std::array::from_fn(|mu| (base[mu].clone() + correction[mu].clone()).folded()))
}

/// Connection correction obtained by solving the Weyl equation directly at
/// one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConnectionSample {
    pub t: f64,
    /// The solution orthogonal (Euclidean) to `kernel`.
    pub representative: FourVec<f64>,
    /// κ(t); the full solution set is `representative + α·kernel`.
    pub kernel: FourVec<f64>,
    /// max |A·c − rhs| of the 4×4 real system at the representative.
    pub system_residual: f64,
}

fn real_parts(v: &Spinor2) -> [f64; 4] {
    [v[0].re, v[0].im, v[1].re, v[1].im]
}

/// Solves Σ_μ c_μ M_μ χ = −i M₀ χ̇ for the real correction c, where M are
/// the Weyl matrices of `helicity` and χ is the direction amplitude.
///
/// The 4×4 real system has rank 3 with kernel κ(t). Appending the row κᵀ
/// (right-hand side 0) makes the least-squares solution unique and
/// orthogonal to κ.
pub fn synthesize_connection(
    dir: &DirectionSpec,
    helicity: Helicity,
    params: &Params,
    times: &[f64],
) -> Result<Vec<ConnectionSample>, FieldError> {
    let (theta_rate, phi_rate) = dir.rates();
    let m = weyl_matrices(helicity);
    times
        .iter()
        .map(|&t| {
            let (theta, phi) = dir.angles(t, params)?;
            let ctx = EvalContext::new().with(Var::T, t).with_params(params);
            let (dtheta, dphi) = (theta_rate.eval(&ctx)?, phi_rate.eval(&ctx)?);
            let chi = helicity_spinor(theta, phi, helicity);
            let dchi = helicity_spinor_rate(theta, phi, dtheta, dphi, helicity);
            let rhs = m[0].apply(&dchi).scale(-CScalar::i());

            let mut a = SMatrix::<f64, 5, 4>::zeros();
            for mu in 0..4 {
                let col = real_parts(&m[mu].apply(&chi));
                for (row, v) in col.iter().enumerate() {
                    a[(row, mu)] = *v;
                }
            }
            let kernel = crate::spinor::kappa_of(theta, phi);
            for mu in 0..4 {
                a[(4, mu)] = kernel[mu];
            }
            let r = real_parts(&rhs);
            let b = SVector::<f64, 5>::from_column_slice(&[r[0], r[1], r[2], r[3], 0.0]);
            let svd = a.svd(true, true);
            if svd.singular_values.min() <= 1e-12 * svd.singular_values.max() {
                return Err(FieldError::SingularSystem(t));
            }
            let c = svd.solve(&b, 1e-14).map_err(|_| FieldError::SingularSystem(t))?;
            let residual = (a * c - b).iter().take(4).fold(0.0f64, |acc, v| acc.max(v.abs()));
            Ok(ConnectionSample {
                t,
                representative: FourVec([c[0], c[1], c[2], c[3]]),
                kernel,
                system_residual: residual,
            })
        })
        .collect()
}

/// Electric and magnetic field expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldExprSet {
    pub e: [Expr; 3],
    pub b: [Expr; 3],
    pub q: f64,
}

/// Field values at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldValues {
    pub e: [f64; 3],
    pub b: [f64; 3],
}

impl FieldExprSet {
    pub fn zero(q: f64) -> Self {
        FieldExprSet {
            e: [Expr::zero(), Expr::zero(), Expr::zero()],
            b: [Expr::zero(), Expr::zero(), Expr::zero()],
            q,
        }
    }

    pub fn eval(&self, p: Point4, params: &Params) -> Result<FieldValues, EvalError> {
        let ctx = EvalContext::at(p).with_params(params);
        let mut out = FieldValues::default();
        for i in 0..3 {
            out.e[i] = self.e[i].eval(&ctx)?;
            out.b[i] = self.b[i].eval(&ctx)?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &FieldExprSet) -> FieldExprSet {
        let sum = |a: &[Expr; 3], b: &[Expr; 3]| -> [Expr; 3] {
            std::array::from_fn(|i| (a[i].clone() + b[i].clone()).folded())
        };
        FieldExprSet {
            e: sum(&self.e, &other.e),
            b: sum(&self.b, &other.b),
            q: self.q,
        }
    }
}

/// E = −∇U − ∂A/∂t and B = ∇×A with U = b₀/q, A = (b₁, b₂, b₃)/q, derived
/// symbolically.
pub fn fields_from_potential(b: &PotentialExpr, q: f64) -> Result<FieldExprSet, FieldError> {
    if q == 0.0 {
        return Err(FieldError::ZeroCharge);
    }
    let inv = 1.0 / q;
    let u = b[0].clone().scale(inv).folded();
    let a: [Expr; 3] = std::array::from_fn(|i| b[i + 1].clone().scale(inv).folded());
    let space = [Var::X, Var::Y, Var::Z];
    let e = std::array::from_fn(|i| (-u.derivative(space[i]) - a[i].derivative(Var::T)).folded());
    // (∇×A)_i = ∂_j A_k − ∂_k A_j for cyclic (i, j, k)
    let curl = |j: usize, k: usize| {
        (a[k].derivative(space[j]) - a[j].derivative(space[k])).folded()
    };
    Ok(FieldExprSet {
        e,
        b: [curl(1, 2), curl(2, 0), curl(0, 1)],
        q,
    })
}

/// Plane-wave parameters for the wave-immunity example.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveParams {
    pub e_w1: f64,
    pub e_w2: f64,
    pub k_w: f64,
    pub delta_w1: f64,
    pub delta_w2: f64,
}

impl Default for WaveParams {
    fn default() -> Self {
        WaveParams {
            e_w1: 1.0,
            e_w2: 0.0,
            k_w: 1.0,
            delta_w1: 0.0,
            delta_w2: 0.0,
        }
    }
}

impl WaveParams {
    fn phase_cos(&self, delta: f64) -> Expr {
        let arg = Expr::constant(self.k_w) * (Expr::var(Var::Z) + Expr::var(Var::T)) + Expr::constant(delta);
        Expr::cos(arg.folded())
    }

    /// s_q = −E_w1 cos[k_w(z+t) + δ_w1] x − E_w2 cos[k_w(z+t) + δ_w2] y.
    pub fn s_q(&self) -> Expr {
        let t1 = self.phase_cos(self.delta_w1).scale(-self.e_w1) * Expr::var(Var::X);
        let t2 = self.phase_cos(self.delta_w2).scale(-self.e_w2) * Expr::var(Var::Y);
        (t1 + t2).folded()
    }

    /// The wave's own fields E_w, B_w.
    pub fn fields(&self) -> ([Expr; 3], [Expr; 3]) {
        let c1 = self.phase_cos(self.delta_w1);
        let c2 = self.phase_cos(self.delta_w2);
        let e = [c1.clone().scale(self.e_w1), c2.clone().scale(self.e_w2), Expr::zero()];
        let b = [c2.scale(self.e_w2), c1.scale(-self.e_w1), Expr::zero()];
        (e.map(|x| x.folded()), b.map(|x| x.folded()))
    }
}

/// Printed closed-form field formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FormulaId {
    /// General direction, base potential plus family term.
    #[serde(rename = "GENERAL")]
    General,
    /// Motion along +z.
    #[serde(rename = "ALONG_Z")]
    AlongZ,
    /// Counter-propagating plane wave.
    #[serde(rename = "COUNTER_WAVE")]
    CounterWave,
    /// Transverse time-dependent electric fields.
    #[serde(rename = "TRANSVERSE")]
    Transverse,
    /// Control fields, positive helicity.
    #[serde(rename = "CONTROL_POSITIVE")]
    ControlPositive,
    /// Control fields, negative helicity.
    #[serde(rename = "CONTROL_NEGATIVE")]
    ControlNegative,
    /// Fields of the (s, κ₁s, κ₂s, κ₃s) family term with time-varying κ.
    #[serde(rename = "CONTROL_FAMILY")]
    ControlFamily,
}

/// Inputs for [`reference_fields`]. Only the fields a formula uses need to
/// be set.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaParams {
    pub q: f64,
    pub h: Option<Expr>,
    pub s: Option<Expr>,
    pub direction: Option<DirectionSpec>,
    pub wave: Option<WaveParams>,
    pub h1: Option<Expr>,
    pub h2: Option<Expr>,
    pub e0: Option<Expr>,
}

impl FormulaParams {
    pub fn new(q: f64) -> Self {
        FormulaParams {
            q,
            h: None,
            s: None,
            direction: None,
            wave: None,
            h1: None,
            h2: None,
            e0: None,
        }
    }

    pub fn with_h(mut self, h: Expr) -> Self {
        self.h = Some(h);
        self
    }

    pub fn with_s(mut self, s: Expr) -> Self {
        self.s = Some(s);
        self
    }

    pub fn with_direction(mut self, dir: DirectionSpec) -> Self {
        self.direction = Some(dir);
        self
    }

    pub fn with_wave(mut self, wave: WaveParams) -> Self {
        self.wave = Some(wave);
        self
    }

    pub fn with_transverse(mut self, h1: Expr, h2: Expr) -> Self {
        self.h1 = Some(h1);
        self.h2 = Some(h2);
        self
    }

    pub fn with_energy(mut self, e0: Expr) -> Self {
        self.e0 = Some(e0);
        self
    }
}

fn need<'a, T>(v: &'a Option<T>, formula: FormulaId, name: &'static str) -> Result<&'a T, FieldError> {
    v.as_ref().ok_or(FieldError::MissingParameter { formula, name })
}

/// Verbatim transcription of the printed field formulas. Suspected typos in
/// the printed family formula are kept as printed; comparisons against the
/// derived fields report them.
pub fn reference_fields(id: FormulaId, params: &FormulaParams) -> Result<FieldExprSet, FieldError> {
    let q = params.q;
    if q == 0.0 {
        return Err(FieldError::ZeroCharge);
    }
    let inv = 1.0 / q;
    let d = |e: &Expr, v: Var| e.derivative(v);
    let c = Expr::constant;
    let (x, y, z, t) = (Var::X, Var::Y, Var::Z, Var::T);

    let fields = match id {
        FormulaId::General | FormulaId::AlongZ => {
            let h_q = need(&params.h, id, "h")?.clone().scale(inv);
            let s_q = need(&params.s, id, "s")?.clone().scale(inv);
            let hxt = |v: Var| d(&d(&h_q, v), t).scale(2.0);
            let (st, ct, sp, cp) = if id == FormulaId::AlongZ {
                (c(0.0), c(1.0), c(0.0), c(1.0))
            } else {
                let dir = need(&params.direction, id, "direction")?;
                (
                    Expr::sin(dir.theta.clone()),
                    Expr::cos(dir.theta.clone()),
                    Expr::sin(dir.phi.clone()),
                    Expr::cos(dir.phi.clone()),
                )
            };
            let st_s = d(&s_q, t);
            let e = [
                st.clone() * cp.clone() * st_s.clone() - d(&s_q, x) - hxt(x),
                st.clone() * sp.clone() * st_s.clone() - d(&s_q, y) - hxt(y),
                ct.clone() * st_s - d(&s_q, z) - hxt(z),
            ];
            let b = [
                st.clone() * sp.clone() * d(&s_q, z) - ct.clone() * d(&s_q, y),
                -(st.clone() * cp.clone() * d(&s_q, z)) + ct * d(&s_q, x),
                st * (cp * d(&s_q, y) - sp * d(&s_q, x)),
            ];
            FieldExprSet { e, b, q }
        }
        FormulaId::CounterWave => {
            let wave = need(&params.wave, id, "wave")?;
            if wave.k_w == 0.0 {
                return Err(FieldError::ZeroWaveNumber);
            }
            let (mut e, b) = wave.fields();
            if let Some(h) = &params.h {
                let h_q = h.clone().scale(inv);
                for (i, v) in [x, y, z].into_iter().enumerate() {
                    e[i] = e[i].clone() - d(&d(&h_q, v), t).scale(2.0);
                }
            }
            FieldExprSet { e, b, q }
        }
        FormulaId::Transverse => {
            let h1 = need(&params.h1, id, "H1")?;
            let h2 = need(&params.h2, id, "H2")?;
            FieldExprSet {
                e: [d(h1, t), d(h2, t), Expr::zero()],
                b: [Expr::zero(), Expr::zero(), Expr::zero()],
                q,
            }
        }
        FormulaId::ControlPositive | FormulaId::ControlNegative => {
            let e0 = need(&params.e0, id, "E0")?.clone();
            let dir = need(&params.direction, id, "direction")?;
            let de0 = d(&e0, t);
            let th1 = d(&dir.theta, t);
            let th2 = d(&th1, t);
            let ph1 = d(&dir.phi, t);
            let ph2 = d(&ph1, t);
            let st = Expr::sin(dir.theta.clone());
            let ct = Expr::cos(dir.theta.clone());
            let sp = Expr::sin(dir.phi.clone());
            let cp = Expr::cos(dir.phi.clone());
            let four = |e: Expr| e.scale(4.0);
            let e = if id == FormulaId::ControlPositive {
                [
                    -four(st.clone() * cp.clone() * de0.clone())
                        + sp.clone() * (four(e0.clone() * st.clone() * ph1.clone()) - th2.clone())
                        - cp.clone() * th1.clone() * (ph1.clone() + four(e0.clone() * ct.clone())),
                    -(sp.clone()
                        * (th1.clone() * (ph1.clone() + four(e0.clone() * ct.clone()))
                            + four(st.clone() * de0.clone())))
                        + cp.clone() * (-four(e0.clone() * st.clone() * ph1.clone()) + th2.clone()),
                    -four(ct.clone() * de0.clone()) + four(e0.clone() * st.clone() * th1.clone()) + ph2,
                ]
            } else {
                [
                    -four(st.clone() * cp.clone() * de0.clone())
                        + sp.clone() * (four(e0.clone() * st.clone() * ph1.clone()) + th2.clone())
                        + cp.clone() * th1.clone() * (ph1.clone() - four(e0.clone() * ct.clone())),
                    sp.clone()
                        * (th1.clone() * (ph1.clone() - four(e0.clone() * ct.clone()))
                            - four(st.clone() * de0.clone()))
                        - cp.clone() * (four(e0.clone() * st.clone() * ph1.clone()) + th2.clone()),
                    -four(ct.clone() * de0.clone()) + four(e0.clone() * st.clone() * th1.clone()) - ph2,
                ]
            };
            FieldExprSet {
                e: e.map(|v| v.scale(0.5 * inv)),
                b: [Expr::zero(), Expr::zero(), Expr::zero()],
                q,
            }
        }
        FormulaId::ControlFamily => {
            let s = need(&params.s, id, "s")?;
            let dir = need(&params.direction, id, "direction")?;
            let th1 = d(&dir.theta, t);
            let ph1 = d(&dir.phi, t);
            let st = Expr::sin(dir.theta.clone());
            let ct = Expr::cos(dir.theta.clone());
            let sp = Expr::sin(dir.phi.clone());
            let cp = Expr::cos(dir.phi.clone());
            let e = [
                st.clone() * cp.clone() * d(s, t) - d(s, x)
                    + s.clone() * (ct.clone() * cp.clone() * th1.clone() - st.clone() * sp.clone() * ph1.clone()),
                st.clone() * sp.clone() * d(s, t) - d(s, y)
                    + s.clone() * (ct.clone() * sp.clone() * th1.clone() + st.clone() * cp.clone() * ph1.clone()),
                // printed as sinθ ∂s/∂t
                st.clone() * d(s, t) - d(s, z) - st.clone() * th1 * s.clone(),
            ];
            let b = [
                st.clone() * sp.clone() * d(s, z) - ct.clone() * d(s, y),
                -(st.clone() * cp.clone() * d(s, z)) + ct * d(s, x),
                // printed without sinθ on the ∂s/∂x term
                st * cp * d(s, y) - sp * d(s, x),
            ];
            FieldExprSet {
                e: e.map(|v| v.scale(inv)),
                b: b.map(|v| v.scale(inv)),
                q,
            }
        }
    };
    Ok(FieldExprSet {
        e: fields.e.map(|v| v.folded()),
        b: fields.b.map(|v| v.folded()),
        q: fields.q,
    })
}

/// S = E×B/4π.
pub fn poynting(e: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    let k = 1.0 / (4.0 * std::f64::consts::PI);
    [
        k * (e[1] * b[2] - e[2] * b[1]),
        k * (e[2] * b[0] - e[0] * b[2]),
        k * (e[0] * b[1] - e[1] * b[0]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;
    use std::f64::consts::{FRAC_PI_3, PI};

    fn params(pairs: &[(&str, f64)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn eval4(b: &PotentialExpr, p: Point4, params: &Params) -> FourVec<f64> {
        eval_potential(b, p, params).unwrap()
    }

    #[test]
    fn base_potential_examples() {
        let ps = params(&[("E", 2.5)]);
        let b = base_potential(&parse("E*(z-t)").unwrap());
        assert_eq!(eval4(&b, Point4::new(0.3, 0.1, 0.2, 0.4), &ps), FourVec::new(-2.5, 0.0, 0.0, 2.5));
        let b = base_potential(&parse("x").unwrap());
        assert_eq!(b, FourVec::new(Expr::zero(), Expr::one(), Expr::zero(), Expr::zero()));
    }

    #[test]
    fn transverse_phase_gives_half_charge_potential() {
        // h = −(q/2) H1(t) x − (q/2) H2(t) y + E(z − t) ⇒ b₁ = −(q/2) H1(t)
        let h = parse("-(q/2)*(E01/w1)*sin(w1*t+d1)*x - (q/2)*(E02/w2)*sin(w2*t+d2)*y + E*(z-t)").unwrap();
        let ps = params(&[("q", -1.0), ("E01", 0.7), ("w1", 1.3), ("d1", 0.2), ("E02", 0.4), ("w2", 2.0), ("d2", -0.5), ("E", 1.0)]);
        let b = base_potential(&h);
        for t in [-0.5, 0.0, 0.8] {
            let got = b[1].eval_at(Point4::new(t, 0.3, 0.1, 0.0), &ps).unwrap();
            let h1 = 0.7 / 1.3 * (1.3 * t + 0.2f64).sin();
            assert!((got - 0.5 * h1).abs() < 1e-15);
        }
    }

    #[test]
    fn family_examples() {
        let a = base_potential(&parse("E*(z-t)").unwrap());
        let kappa = DirectionSpec::constant(0.0, 0.0).kappa_expr();
        assert_eq!(degenerate_family(&a, &kappa, &Expr::zero()), a.clone().map(|e| e.folded()));
        let b = degenerate_family(&a, &kappa, &Expr::one());
        let ps = params(&[("E", 1.0)]);
        let got = eval4(&b, Point4::default(), &ps);
        assert!(got.max_abs_diff(&FourVec::new(0.0, 0.0, 0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn constant_direction_connection_is_base() {
        let h = parse("x*t + sin(y)").unwrap();
        let dir = DirectionSpec::constant(0.4, 1.0);
        for hel in [Helicity::Positive, Helicity::Negative] {
            assert_eq!(connection_potential(&h, &dir, hel), base_potential(&h));
        }
    }

    #[test]
    fn rotating_polar_angle_connection() {
        let dir = DirectionSpec::new(parse("omega*t").unwrap(), Expr::zero());
        let ps = params(&[("omega", 0.8)]);
        let b = connection_potential(&Expr::zero(), &dir, Helicity::Positive);
        let got = eval4(&b, Point4::new(0.37, 0.0, 0.0, 0.0), &ps);
        assert!(got.max_abs_diff(&FourVec::new(0.0, 0.0, -0.4, 0.0)) < 1e-15);

        let synth = synthesize_connection(&dir, Helicity::Positive, &ps, &[0.37]).unwrap();
        assert!(synth[0].representative.max_abs_diff(&FourVec::new(0.0, 0.0, -0.4, 0.0)) < 1e-13);
    }

    #[test]
    fn rotating_azimuth_connection() {
        let dir = DirectionSpec::new(Expr::constant(FRAC_PI_3), parse("omega*t").unwrap());
        let omega = 1.1;
        let ps = params(&[("omega", omega)]);
        let t = 0.6;
        let b = connection_potential(&Expr::zero(), &dir, Helicity::Positive);
        let got = eval4(&b, Point4::new(t, 0.0, 0.0, 0.0), &ps);
        assert!(got.max_abs_diff(&FourVec::new(omega / 2.0, 0.0, 0.0, -omega / 2.0)) < 1e-15);

        let printed = connection_potential_variant(&Expr::zero(), &dir, Helicity::Positive, ConnectionVariant::Printed);
        let got = eval4(&printed, Point4::new(t, 0.0, 0.0, 0.0), &ps);
        assert!(got.max_abs_diff(&FourVec::new(omega, 0.0, 0.0, -omega)) < 1e-15);

        // representative = (ω/2)(1, 0, 0, −1) − (3ω/8) κ(t)
        let kappa = crate::spinor::kappa_of(FRAC_PI_3, omega * t);
        let expected = FourVec::new(omega / 2.0, 0.0, 0.0, -omega / 2.0).sub(&kappa.scaled(3.0 * omega / 8.0));
        let synth = synthesize_connection(&dir, Helicity::Positive, &ps, &[t]).unwrap();
        assert!(synth[0].representative.max_abs_diff(&expected) < 1e-13);
        assert!(synth[0].representative.dot(&kappa).abs() < 1e-13);
        assert!(synth[0].system_residual < 1e-13);
    }

    #[test]
    fn constant_direction_needs_no_correction() {
        let dir = DirectionSpec::constant(1.2, -0.3);
        for hel in [Helicity::Positive, Helicity::Negative] {
            let synth = synthesize_connection(&dir, hel, &Params::new(), &[0.0, 1.0]).unwrap();
            for s in synth {
                assert!(s.representative.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn fields_of_constant_potential_vanish() {
        let b = FourVec::new(Expr::constant(1.0), Expr::constant(2.0), Expr::zero(), Expr::constant(-3.0));
        let f = fields_from_potential(&b, -1.0).unwrap();
        assert!(f.e.iter().chain(f.b.iter()).all(|e| *e == Expr::zero()));
        assert_eq!(fields_from_potential(&b, 0.0), Err(FieldError::ZeroCharge));
    }

    #[test]
    fn time_dependent_family_along_z() {
        // b = base(E(z − t)) + f(t) κ_z ⇒ E = (f′(t)/q) k̂, B = 0
        let a = base_potential(&parse("E*(z-t)").unwrap());
        let f = parse("sin(3*t) + t^2").unwrap();
        let b = degenerate_family(&a, &DirectionSpec::constant(0.0, 0.0).kappa_expr(), &f);
        let q = -1.0;
        let fields = fields_from_potential(&b, q).unwrap();
        let ps = params(&[("E", 1.0)]);
        for t in [-0.3, 0.2, 0.9] {
            let v = fields.eval(Point4::new(t, 0.5, -0.1, 0.3), &ps).unwrap();
            let fp = 3.0 * (3.0 * t).cos() + 2.0 * t;
            assert!(v.e[0].abs() < 1e-15 && v.e[1].abs() < 1e-15);
            assert!((v.e[2] - fp / q).abs() < 1e-14);
            assert!(v.b.iter().all(|b| b.abs() < 1e-15));
        }
    }

    #[test]
    fn wave_reference_defaults() {
        let f = reference_fields(FormulaId::CounterWave, &FormulaParams::new(-1.0).with_wave(WaveParams::default())).unwrap();
        for (t, z) in [(0.1, 0.4), (-0.7, 0.2)] {
            let v = f.eval(Point4::new(t, 0.0, 0.0, z), &Params::new()).unwrap();
            let c = (z + t as f64).cos();
            assert!((v.e[0] - c).abs() < 1e-15 && v.e[1] == 0.0 && v.e[2] == 0.0);
            assert!((v.b[1] + c).abs() < 1e-15 && v.b[0] == 0.0);
            let s = poynting(v.e, v.b);
            assert!((s[2] + c * c / (4.0 * PI)).abs() < 1e-16);
        }
    }

    #[test]
    fn zaxis_reference_with_time_only_family() {
        let f = reference_fields(
            FormulaId::AlongZ,
            &FormulaParams::new(1.0).with_h(parse("E*(z-t)").unwrap()).with_s(parse("t^3").unwrap()),
        )
        .unwrap();
        let v = f.eval(Point4::new(0.5, 0.2, 0.1, 0.3), &params(&[("E", 1.0)])).unwrap();
        assert!((v.e[2] - 0.75).abs() < 1e-15);
        assert!(v.e[0] == 0.0 && v.e[1] == 0.0 && v.b == [0.0; 3]);
    }

    #[test]
    fn control_reference_vanishes_for_constant_trajectory() {
        let p = FormulaParams::new(-1.0)
            .with_energy(Expr::constant(2.0))
            .with_direction(DirectionSpec::constant(0.3, 0.7));
        for id in [FormulaId::ControlPositive, FormulaId::ControlNegative] {
            let f = reference_fields(id, &p).unwrap();
            assert!(f.e.iter().all(|e| *e == Expr::zero()), "{:?}", f.e);
        }
    }

    #[test]
    fn missing_parameters() {
        let err = reference_fields(FormulaId::ControlFamily, &FormulaParams::new(1.0)).unwrap_err();
        assert_eq!(err, FieldError::MissingParameter { formula: FormulaId::ControlFamily, name: "s" });
        let err = reference_fields(FormulaId::CounterWave, &FormulaParams::new(1.0).with_wave(WaveParams { k_w: 0.0, ..Default::default() }));
        assert_eq!(err.unwrap_err(), FieldError::ZeroWaveNumber);
    }

    #[test]
    fn poynting_examples() {
        let s = poynting([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        assert_eq!(s, [0.0, 0.0, 1.0 / (4.0 * PI)]);
        assert_eq!(poynting([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]), [0.0, 0.0, 0.0]);
    }
}
