//! Solution families: spin eigenvectors, degenerate Dirac spinors, Weyl
//! spinors with constant or time-varying direction, and envelope-modulated
//! variants.
//!
//! Every family has the shape `χ · exp(i h) · d(w)`: a spin amplitude χ set by
//! the direction angles (and spin weights for Dirac kinds), a real phase `h`,
//! and an optional real envelope `d` of the light-cone coordinate
//! `w = x sinθ cosφ + y sinθ sinφ + z cosθ − t`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalContext, EvalError, Expr, Params, Var};
use crate::scenario::ScenarioConfig;
use crate::spinor::{CScalar, Helicity, Spinor, Spinor2, Spinor4};
use crate::{FourVec, Point4};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("mass ratio e = {0} is outside [0, 1)")]
    MassRatioOutOfRange(f64),
    #[error("energy E = {0} must be positive")]
    NonPositiveEnergy(f64),
    #[error("spin weights must not both vanish")]
    ZeroWeights,
    #[error("Dirac solutions need spin weights c1, c2")]
    MissingWeights,
    #[error("Weyl solutions take no spin weights")]
    WeightsForWeyl,
    #[error("Weyl solutions are massless; got e = {0}")]
    MassForWeyl(f64),
    #[error("expected a {expected} equation kind, got {found:?}")]
    WrongKind {
        expected: &'static str,
        found: EquationKind,
    },
    #[error("{what} must not depend on `{}`", .var.name())]
    ForbiddenVariable { what: &'static str, var: Var },
    #[error("Dirac solutions need a constant direction")]
    TimeVaryingDiracDirection,
    #[error("an envelope d(w) needs a constant direction")]
    EnvelopeWithTimeVaryingDirection,
    #[error("no phase h given and no trajectory to derive it from")]
    MissingPhase,
    #[error("unknown builtin scenario `{0}`")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationKind {
    DiracParticle,
    DiracAntiparticle,
    WeylPosHelicity,
    WeylNegHelicity,
}

impl EquationKind {
    pub fn is_dirac(self) -> bool {
        matches!(self, EquationKind::DiracParticle | EquationKind::DiracAntiparticle)
    }

    pub fn helicity(self) -> Option<Helicity> {
        match self {
            EquationKind::WeylPosHelicity => Some(Helicity::Positive),
            EquationKind::WeylNegHelicity => Some(Helicity::Negative),
            _ => None,
        }
    }

    pub fn weyl(helicity: Helicity) -> EquationKind {
        match helicity {
            Helicity::Positive => EquationKind::WeylPosHelicity,
            Helicity::Negative => EquationKind::WeylNegHelicity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinWeights {
    pub c1: CScalar,
    pub c2: CScalar,
}

impl SpinWeights {
    pub fn new(c1: CScalar, c2: CScalar) -> Self {
        Self { c1, c2 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }
}

/// Direction of motion as functions of time (or constants).
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSpec {
    pub theta: Expr,
    pub phi: Expr,
}

impl DirectionSpec {
    pub fn new(theta: Expr, phi: Expr) -> Self {
        Self { theta, phi }
    }

    pub fn constant(theta: f64, phi: f64) -> Self {
        Self::new(Expr::constant(theta), Expr::constant(phi))
    }

    pub fn is_time_dependent(&self) -> bool {
        self.theta.depends_on(Var::T) || self.phi.depends_on(Var::T)
    }

    /// (θ, φ) at time `t`.
    pub fn angles(&self, t: f64, params: &Params) -> Result<(f64, f64), EvalError> {
        let ctx = EvalContext::new().with(Var::T, t).with_params(params);
        Ok((self.theta.eval(&ctx)?, self.phi.eval(&ctx)?))
    }

    /// Symbolic (θ̇, φ̇).
    pub fn rates(&self) -> (Expr, Expr) {
        (self.theta.derivative(Var::T), self.phi.derivative(Var::T))
    }

    /// Unit propagation direction n̂ as expressions.
    pub fn unit_vector(&self) -> [Expr; 3] {
        let (th, ph) = (self.theta.clone(), self.phi.clone());
        [
            Expr::sin(th.clone()) * Expr::cos(ph.clone()),
            Expr::sin(th.clone()) * Expr::sin(ph),
            Expr::cos(th),
        ]
    }

    /// κ = (1, −n̂) as expressions in t.
    pub fn kappa_expr(&self) -> FourVec<Expr> {
        let [nx, ny, nz] = self.unit_vector();
        FourVec::new(Expr::one(), -nx, -ny, -nz)
    }

    fn check(&self) -> Result<(), CatalogError> {
        for var in [Var::X, Var::Y, Var::Z, Var::W] {
            if self.theta.depends_on(var) || self.phi.depends_on(var) {
                return Err(CatalogError::ForbiddenVariable {
                    what: "direction angles",
                    var,
                });
            }
        }
        Ok(())
    }

    fn folded(&self) -> Self {
        Self::new(self.theta.folded(), self.phi.folded())
    }
}

/// A symbolic solution family.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSpec {
    pub equation: EquationKind,
    /// Dirac kinds only.
    pub weights: Option<SpinWeights>,
    pub direction: DirectionSpec,
    pub h: Expr,
    /// d(w); references only `w`.
    pub envelope: Option<Expr>,
    /// e = m/E, Dirac kinds only.
    pub mass_ratio_e: f64,
    /// Particle energy; only used to report m = e·E.
    pub energy_e: f64,
    pub params: Params,
}

impl SolutionSpec {
    /// Free massless Dirac particle (or antiparticle) moving along +z with
    /// energy `energy`: h = ±E(z − t).
    pub fn free_dirac(kind: EquationKind, weights: SpinWeights, energy: f64) -> SolutionSpec {
        let sign = if kind == EquationKind::DiracAntiparticle { -1.0 } else { 1.0 };
        SolutionSpec {
            equation: kind,
            weights: Some(weights),
            direction: DirectionSpec::constant(0.0, 0.0),
            h: Expr::param("E") * (Expr::var(Var::Z) - Expr::var(Var::T)) * Expr::constant(sign),
            envelope: None,
            mass_ratio_e: 0.0,
            energy_e: energy,
            params: Params::from([("E".to_string(), energy)]),
        }
        .folded()
    }

    pub fn weyl(helicity: Helicity, direction: DirectionSpec, h: Expr, params: Params) -> SolutionSpec {
        SolutionSpec {
            equation: EquationKind::weyl(helicity),
            weights: None,
            direction,
            h,
            envelope: None,
            mass_ratio_e: 0.0,
            energy_e: 1.0,
            params,
        }
    }

    pub fn with_envelope(mut self, envelope: Expr) -> SolutionSpec {
        self.envelope = Some(envelope);
        self
    }

    pub fn with_mass_ratio(mut self, e: f64) -> SolutionSpec {
        self.mass_ratio_e = e;
        self
    }

    /// Rest mass m = e·E.
    pub fn mass(&self) -> f64 {
        self.mass_ratio_e * self.energy_e
    }

    /// The same family with massless eigenvectors.
    pub fn massless_counterpart(&self) -> SolutionSpec {
        let mut spec = self.clone();
        spec.mass_ratio_e = 0.0;
        spec
    }

    fn folded(mut self) -> SolutionSpec {
        self.direction = self.direction.folded();
        self.h = self.h.folded();
        self.envelope = self.envelope.map(|d| d.folded());
        self
    }

    fn check_common(&self) -> Result<(), CatalogError> {
        if !(self.energy_e > 0.0) {
            return Err(CatalogError::NonPositiveEnergy(self.energy_e));
        }
        self.direction.check()?;
        if self.h.depends_on(Var::W) {
            return Err(CatalogError::ForbiddenVariable { what: "phase h", var: Var::W });
        }
        if let Some(d) = &self.envelope {
            for var in Var::SPACETIME {
                if d.depends_on(var) {
                    return Err(CatalogError::ForbiddenVariable { what: "envelope", var });
                }
            }
            if self.direction.is_time_dependent() {
                return Err(CatalogError::EnvelopeWithTimeVaryingDirection);
            }
        }
        Ok(())
    }

    /// Validates a Dirac-kind spec and returns it with expressions folded.
    pub fn dirac_solution(self) -> Result<SolutionSpec, CatalogError> {
        if !self.equation.is_dirac() {
            return Err(CatalogError::WrongKind {
                expected: "Dirac",
                found: self.equation,
            });
        }
        let weights = self.weights.ok_or(CatalogError::MissingWeights)?;
        if !(weights.norm_sqr() > 0.0) {
            return Err(CatalogError::ZeroWeights);
        }
        if !(0.0..1.0).contains(&self.mass_ratio_e) {
            return Err(CatalogError::MassRatioOutOfRange(self.mass_ratio_e));
        }
        if self.direction.is_time_dependent() {
            return Err(CatalogError::TimeVaryingDiracDirection);
        }
        self.check_common()?;
        Ok(self.folded())
    }

    /// Validates a Weyl-kind spec and returns it with expressions folded.
    pub fn weyl_solution(self) -> Result<SolutionSpec, CatalogError> {
        if self.equation.is_dirac() {
            return Err(CatalogError::WrongKind {
                expected: "Weyl",
                found: self.equation,
            });
        }
        if self.weights.is_some() {
            return Err(CatalogError::WeightsForWeyl);
        }
        if self.mass_ratio_e != 0.0 {
            return Err(CatalogError::MassForWeyl(self.mass_ratio_e));
        }
        self.check_common()?;
        Ok(self.folded())
    }

    /// Dispatches to [`Self::dirac_solution`] or [`Self::weyl_solution`].
    pub fn validated(self) -> Result<SolutionSpec, CatalogError> {
        if self.equation.is_dirac() {
            self.dirac_solution()
        } else {
            self.weyl_solution()
        }
    }

    /// Light-cone coordinate w = n̂·r − t with the angles taken at the
    /// point's own time.
    pub fn light_cone_coordinate(&self, p: Point4) -> Result<f64, EvalError> {
        let (theta, phi) = self.direction.angles(p.t, &self.params)?;
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Ok(p.x * st * cp + p.y * st * sp + p.z * ct - p.t)
    }

    /// Spinor value at a spacetime point.
    pub fn evaluate(&self, p: Point4) -> Result<SpinorValue, CatalogError> {
        Ok(PreparedSolution::new(self).at(p)?.value)
    }
}

/// Convenience wrapper for [`SolutionSpec::evaluate`].
pub fn evaluate_spinor(spec: &SolutionSpec, p: Point4) -> Result<SpinorValue, CatalogError> {
    spec.evaluate(p)
}

/// Spin eigenvectors (unnormalized) for direction (θ, φ) and mass ratio e.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvectors {
    pub u_up: Spinor4,
    pub u_dn: Spinor4,
    pub v_up: Spinor4,
    pub v_dn: Spinor4,
}

/// |p|/(E + m) = √((1 − e)/(1 + e)).
pub fn lower_block_factor(e: f64) -> f64 {
    ((1.0 - e) / (1.0 + e)).sqrt()
}

/// Positive-helicity 2-spinor (cos θ/2, e^{iφ} sin θ/2).
pub fn helicity_spinor(theta: f64, phi: f64, helicity: Helicity) -> Spinor2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let phase = Complex64::from_polar(1.0, phi);
    match helicity {
        Helicity::Positive => Spinor([Complex64::new(c, 0.0), phase * s]),
        Helicity::Negative => Spinor([Complex64::new(-s, 0.0), phase * c]),
    }
}

/// dχ/dt of [`helicity_spinor`] given the angle rates θ̇, φ̇.
pub fn helicity_spinor_rate(theta: f64, phi: f64, theta_rate: f64, phi_rate: f64, helicity: Helicity) -> Spinor2 {
    let (d_theta, d_phi) = helicity_spinor_partials(theta, phi, helicity);
    d_theta.scale_real(theta_rate) + d_phi.scale_real(phi_rate)
}

/// ∂χ/∂θ and ∂χ/∂φ of [`helicity_spinor`].
fn helicity_spinor_partials(theta: f64, phi: f64, helicity: Helicity) -> (Spinor2, Spinor2) {
    let (s, c) = (theta / 2.0).sin_cos();
    let phase = Complex64::from_polar(1.0, phi);
    let i = Complex64::i();
    match helicity {
        Helicity::Positive => (
            Spinor([Complex64::new(-0.5 * s, 0.0), phase * (0.5 * c)]),
            Spinor([Complex64::new(0.0, 0.0), i * phase * s]),
        ),
        Helicity::Negative => (
            Spinor([Complex64::new(-0.5 * c, 0.0), phase * (-0.5 * s)]),
            Spinor([Complex64::new(0.0, 0.0), i * phase * c]),
        ),
    }
}

pub fn spin_eigenvectors(theta: f64, phi: f64, e: f64) -> Result<Eigenvectors, CatalogError> {
    if !(0.0..1.0).contains(&e) {
        return Err(CatalogError::MassRatioOutOfRange(e));
    }
    let r = lower_block_factor(e);
    let up = helicity_spinor(theta, phi, Helicity::Positive);
    let dn = helicity_spinor(theta, phi, Helicity::Negative);
    // u↑ = (χ₊, rχ₊), u↓ = (χ₋, −rχ₋), v↑ = (−rχ₋, χ₋), v↓ = (rχ₊, χ₊)
    Ok(Eigenvectors {
        u_up: Spinor4::from_blocks(up, up.scale_real(r)),
        u_dn: Spinor4::from_blocks(dn, dn.scale_real(-r)),
        v_up: Spinor4::from_blocks(dn.scale_real(-r), dn),
        v_dn: Spinor4::from_blocks(up.scale_real(r), up),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpinorValue {
    Dirac(Spinor4),
    Weyl(Spinor2),
}

impl SpinorValue {
    pub fn norm_sqr(&self) -> f64 {
        match self {
            SpinorValue::Dirac(s) => s.norm_sqr(),
            SpinorValue::Weyl(s) => s.norm_sqr(),
        }
    }

    pub fn as_dirac(&self) -> Option<&Spinor4> {
        match self {
            SpinorValue::Dirac(s) => Some(s),
            SpinorValue::Weyl(_) => None,
        }
    }

    pub fn as_weyl(&self) -> Option<&Spinor2> {
        match self {
            SpinorValue::Weyl(s) => Some(s),
            SpinorValue::Dirac(_) => None,
        }
    }
}

/// Spinor value with its four partial derivatives ∂_t, ∂_x, ∂_y, ∂_z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorJet<const N: usize> {
    pub value: Spinor<N>,
    pub grad: [Spinor<N>; 4],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionJet {
    pub value: SpinorValue,
    pub dirac: Option<SpinorJet<4>>,
    pub weyl: Option<SpinorJet<2>>,
}

/// A spec with every symbolic derivative the residual checks need.
#[derive(Debug, Clone)]
pub struct PreparedSolution<'a> {
    pub spec: &'a SolutionSpec,
    dh: [Expr; 4],
    theta_rate: Expr,
    phi_rate: Expr,
    envelope_rate: Option<Expr>,
}

impl<'a> PreparedSolution<'a> {
    pub fn new(spec: &'a SolutionSpec) -> Self {
        let (theta_rate, phi_rate) = spec.direction.rates();
        PreparedSolution {
            spec,
            dh: Var::SPACETIME.map(|v| spec.h.derivative(v)),
            theta_rate,
            phi_rate,
            envelope_rate: spec.envelope.as_ref().map(|d| d.derivative(Var::W)),
        }
    }

    /// Spinor amplitude χ and dχ/dt at time t.
    fn amplitude(&self, t: f64, params: &Params) -> Result<AmplitudeValue, CatalogError> {
        let spec = self.spec;
        let (theta, phi) = spec.direction.angles(t, params)?;
        match spec.equation.helicity() {
            None => {
                let w = spec.weights.ok_or(CatalogError::MissingWeights)?;
                let ev = spin_eigenvectors(theta, phi, spec.mass_ratio_e)?;
                let (a, b) = match spec.equation {
                    EquationKind::DiracAntiparticle => (ev.v_up, ev.v_dn),
                    _ => (ev.u_up, ev.u_dn),
                };
                Ok(AmplitudeValue::Dirac(a.scale(w.c1) + b.scale(w.c2)))
            }
            Some(helicity) => {
                let chi = helicity_spinor(theta, phi, helicity);
                let ctx = EvalContext::new().with(Var::T, t).with_params(params);
                let rate_theta = self.theta_rate.eval(&ctx)?;
                let rate_phi = self.phi_rate.eval(&ctx)?;
                let dchi = helicity_spinor_rate(theta, phi, rate_theta, rate_phi, helicity);
                Ok(AmplitudeValue::Weyl(chi, dchi))
            }
        }
    }

    /// Value and gradient at `p`, with the phase and envelope chain rules
    /// applied to symbolic derivatives:
    /// ∂_μΨ = e^{ih} [(∂_μχ + i ∂_μh χ) d + χ d′(w) ∂_μw].
    pub fn at(&self, p: Point4) -> Result<SolutionJet, CatalogError> {
        let spec = self.spec;
        let params = &spec.params;
        let ctx = EvalContext::at(p).with_params(params);
        let h = spec.h.eval(&ctx)?;
        let dh: [f64; 4] = [
            self.dh[0].eval(&ctx)?,
            self.dh[1].eval(&ctx)?,
            self.dh[2].eval(&ctx)?,
            self.dh[3].eval(&ctx)?,
        ];
        let (d, dd_dw, dw) = match (&spec.envelope, &self.envelope_rate) {
            (Some(env), Some(rate)) => {
                let w = spec.light_cone_coordinate(p)?;
                let wctx = ctx.with(Var::W, w);
                let (theta, phi) = spec.direction.angles(p.t, params)?;
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                (env.eval(&wctx)?, rate.eval(&wctx)?, [-1.0, st * cp, st * sp, ct])
            }
            _ => (1.0, 0.0, [0.0; 4]),
        };
        let phase = Complex64::from_polar(1.0, h);

        fn jet<const N: usize>(
            chi: Spinor<N>,
            dchi_dt: Spinor<N>,
            phase: Complex64,
            dh: [f64; 4],
            env: (f64, f64, [f64; 4]),
        ) -> SpinorJet<N> {
            let (d, dd_dw, dw) = env;
            let i = Complex64::i();
            let value = chi.scale(phase * d);
            let grad = std::array::from_fn(|mu| {
                let own = if mu == 0 { dchi_dt } else { Spinor::zero() };
                let inner = (own + chi.scale(i * dh[mu])).scale_real(d) + chi.scale_real(dd_dw * dw[mu]);
                inner.scale(phase)
            });
            SpinorJet { value, grad }
        }

        match self.amplitude(p.t, params)? {
            AmplitudeValue::Dirac(chi) => {
                let j = jet(chi, Spinor4::zero(), phase, dh, (d, dd_dw, dw));
                Ok(SolutionJet {
                    value: SpinorValue::Dirac(j.value),
                    dirac: Some(j),
                    weyl: None,
                })
            }
            AmplitudeValue::Weyl(chi, dchi) => {
                let j = jet(chi, dchi, phase, dh, (d, dd_dw, dw));
                Ok(SolutionJet {
                    value: SpinorValue::Weyl(j.value),
                    dirac: None,
                    weyl: Some(j),
                })
            }
        }
    }
}

enum AmplitudeValue {
    Dirac(Spinor4),
    Weyl(Spinor2, Spinor2),
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 6] = [
    "free_particle",
    "oscillating_xy",
    "wave_immune",
    "gaussian_envelope",
    "control_demo",
    "massive_sweep",
];

/// A bundled scenario: an example solution family with its potential
/// and field settings and documented default parameters.
pub fn builtin(name: &str) -> Result<ScenarioConfig, CatalogError> {
    crate::scenario::builtin_scenario(name).ok_or_else(|| CatalogError::UnknownBuiltin(name.to_string()))
}

/// The validated solution family of a bundled scenario.
pub fn builtin_spec(name: &str) -> Result<SolutionSpec, CatalogError> {
    builtin(name)?.solution_spec()
}
