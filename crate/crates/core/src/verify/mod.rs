//! Numerical verification of the solution identities.
//!
//! All checks sample a seeded set of spacetime points, evaluate the symbolic
//! ingredients there, and reduce the per-point results in sampling order, so
//! a report depends only on its inputs and the seed.

pub mod generate;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{CatalogError, EquationKind, PreparedSolution, SolutionSpec};
use crate::expr::{EvalContext, EvalError, Expr, Params, Var};
use crate::potential::{
    connection_potential_variant, eval_potential, synthesize_connection, ConnectionVariant, FieldError,
    FieldExprSet, PotentialExpr,
};
use crate::spinor::{
    gamma_set, kappa_from_dirac, kappa_from_weyl, kappa_of, weyl_matrices, CScalar,
    Helicity, Mat4, Spinor,
};
use crate::{FourVec, Point4};

/// Identities that hold exactly up to rounding.
pub const TOL_EXACT: f64 = 1e-12;
/// Results of composed symbolic pipelines.
pub const TOL_PIPELINE: f64 = 1e-9;
/// Finite-difference cross-checks.
pub const TOL_FD: f64 = 1e-6;
/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("invalid sampling plan: {0}")]
    InvalidPlan(String),
    #[error("{check} needs a {expected} solution, got {found:?}")]
    WrongKind {
        check: &'static str,
        expected: &'static str,
        found: EquationKind,
    },
    #[error("no sample point could be evaluated; first failure: {0}")]
    NoValidPoints(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Where and how many points to check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// Lower corner in (t, x, y, z) order.
    pub lo: [f64; 4],
    /// Upper corner in (t, x, y, z) order.
    pub hi: [f64; 4],
    pub count: usize,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            lo: [-1.0; 4],
            hi: [1.0; 4],
            count: 100,
            seed: 0x5eed,
        }
    }
}

impl SamplingPlan {
    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.count == 0 {
            return Err(VerifyError::InvalidPlan("point count must be at least 1".into()));
        }
        for i in 0..4 {
            if !(self.lo[i] < self.hi[i]) || !self.lo[i].is_finite() || !self.hi[i].is_finite() {
                return Err(VerifyError::InvalidPlan(format!(
                    "box side {i} is degenerate: [{}, {}]",
                    self.lo[i], self.hi[i]
                )));
            }
        }
        Ok(())
    }

    /// Uniform points in the box, reproducible from the seed.
    pub fn points(&self) -> Result<Vec<Point4>, VerifyError> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok((0..self.count)
            .map(|_| Point4::from_array(std::array::from_fn(|i| rng.gen_range(self.lo[i]..self.hi[i]))))
            .collect())
    }

    /// Distinct sample times (the t coordinates of [`Self::points`]).
    pub fn times(&self) -> Result<Vec<f64>, VerifyError> {
        Ok(self.points()?.into_iter().map(|p| p.t).collect())
    }
}

/// Near-degeneracy proportionality of a residual to the unperturbed spinor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportionality {
    /// Extracted coefficient r/(s·Ψ*) (complex, expected real).
    pub coefficient: [f64; 2],
    pub closed_form: f64,
    /// |coefficient − closed_form|, maximized over points.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub point: Point4,
    pub message: String,
}

/// Outcome of a pointwise check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub rms: f64,
    pub points_checked: usize,
    pub worst_point: Point4,
    /// Maximum magnitude per component over all points.
    pub components: Vec<f64>,
    pub proportionality: Option<Proportionality>,
    pub failures: Vec<PointFailure>,
}

impl ResidualReport {
    /// Reduces per-point component magnitudes in sampling order.
    pub fn from_samples(samples: Vec<Result<(Point4, Vec<f64>), PointFailure>>) -> Result<Self, VerifyError> {
        let mut report = ResidualReport {
            max_abs: 0.0,
            rms: 0.0,
            points_checked: 0,
            worst_point: Point4::default(),
            components: Vec::new(),
            proportionality: None,
            failures: Vec::new(),
        };
        let mut sum_sq = 0.0;
        let mut entries = 0usize;
        for sample in samples {
            match sample {
                Ok((point, mags)) => {
                    if report.components.len() < mags.len() {
                        report.components.resize(mags.len(), 0.0);
                    }
                    let mut local = 0.0f64;
                    for (i, m) in mags.iter().enumerate() {
                        report.components[i] = report.components[i].max(*m);
                        local = local.max(*m);
                        sum_sq += m * m;
                        entries += 1;
                    }
                    if report.points_checked == 0 || local > report.max_abs {
                        report.max_abs = local;
                        report.worst_point = point;
                    }
                    report.points_checked += 1;
                }
                Err(failure) => report.failures.push(failure),
            }
        }
        if report.points_checked == 0 {
            let first = report.failures.first().map(|f| f.message.clone()).unwrap_or_default();
            return Err(VerifyError::NoValidPoints(first));
        }
        report.rms = if entries > 0 { (sum_sq / entries as f64).sqrt() } else { 0.0 };
        Ok(report)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.failures.is_empty() && self.max_abs <= tol
    }
}

fn map_points<F>(points: &[Point4], f: F) -> Vec<Result<(Point4, Vec<f64>), PointFailure>>
where
    F: Fn(Point4) -> Result<Vec<f64>, String> + Sync,
{
    points
        .par_iter()
        .map(|&p| {
            f(p).map(|mags| (p, mags)).map_err(|message| PointFailure { point: p, message })
        })
        .collect()
}

fn magnitudes<const N: usize>(r: &Spinor<N>) -> Vec<f64> {
    r.0.iter().map(|c| c.norm()).collect()
}

/// r = Σ_μ γ^μ(i∂_μΨ + b_μΨ) − mΨ at one point.
pub fn dirac_residual_at(
    prepared: &PreparedSolution<'_>,
    b: &PotentialExpr,
    m: f64,
    p: Point4,
) -> Result<Spinor<4>, String> {
    let jet = prepared.at(p).map_err(|e| e.to_string())?;
    let jet = jet.dirac.ok_or("not a Dirac solution")?;
    let bv = eval_potential(b, p, &prepared.spec.params).map_err(|e| e.to_string())?;
    let g = &gamma_set().gamma;
    let i = CScalar::i();
    let mut r = jet.value.scale_real(-m);
    for mu in 0..4 {
        let term = jet.grad[mu].scale(i) + jet.value.scale_real(bv[mu]);
        r = r + g[mu].apply(&term);
    }
    Ok(r)
}

/// r = Σ_μ M_μ(i∂_μψ + b_μψ) with the helicity's Weyl matrices.
pub fn weyl_residual_at(prepared: &PreparedSolution<'_>, b: &PotentialExpr, p: Point4) -> Result<Spinor<2>, String> {
    let helicity = prepared.spec.equation.helicity().ok_or("not a Weyl solution")?;
    let jet = prepared.at(p).map_err(|e| e.to_string())?;
    let jet = jet.weyl.ok_or("not a Weyl solution")?;
    let bv = eval_potential(b, p, &prepared.spec.params).map_err(|e| e.to_string())?;
    let mats = weyl_matrices(helicity);
    let i = CScalar::i();
    let mut r = Spinor::<2>::zero();
    for mu in 0..4 {
        let term = jet.grad[mu].scale(i) + jet.value.scale_real(bv[mu]);
        r = r + mats[mu].apply(&term);
    }
    Ok(r)
}

/// Dirac-equation residual of `spec` under potential `b` and mass `m`.
pub fn dirac_residual(
    spec: &SolutionSpec,
    b: &PotentialExpr,
    m: f64,
    plan: &SamplingPlan,
) -> Result<ResidualReport, VerifyError> {
    if !spec.equation.is_dirac() {
        return Err(VerifyError::WrongKind {
            check: "dirac_residual",
            expected: "Dirac",
            found: spec.equation,
        });
    }
    let prepared = PreparedSolution::new(spec);
    let points = plan.points()?;
    ResidualReport::from_samples(map_points(&points, |p| {
        dirac_residual_at(&prepared, b, m, p).map(|r| magnitudes(&r))
    }))
}

/// Weyl-equation residual of `spec` under potential `b`.
pub fn weyl_residual(spec: &SolutionSpec, b: &PotentialExpr, plan: &SamplingPlan) -> Result<ResidualReport, VerifyError> {
    if spec.equation.is_dirac() {
        return Err(VerifyError::WrongKind {
            check: "weyl_residual",
            expected: "Weyl",
            found: spec.equation,
        });
    }
    let prepared = PreparedSolution::new(spec);
    let points = plan.points()?;
    ResidualReport::from_samples(map_points(&points, |p| {
        weyl_residual_at(&prepared, b, p).map(|r| magnitudes(&r))
    }))
}

/// Residual under the right equation for the solution's kind (massless).
pub fn equation_residual(spec: &SolutionSpec, b: &PotentialExpr, plan: &SamplingPlan) -> Result<ResidualReport, VerifyError> {
    if spec.equation.is_dirac() {
        dirac_residual(spec, b, 0.0, plan)
    } else {
        weyl_residual(spec, b, plan)
    }
}

/// ∂_μ j^μ evaluated from the symbolic spinor gradient:
/// ∂_μ j^μ = Σ_μ 2 Re(Ψ† Γ^μ ∂_μΨ) with Hermitian current matrices Γ^μ.
pub fn continuity_divergence(spec: &SolutionSpec, plan: &SamplingPlan) -> Result<ResidualReport, VerifyError> {
    let prepared = PreparedSolution::new(spec);
    let points = plan.points()?;
    let g = &gamma_set().gamma;
    let dirac_current: [Mat4; 4] = [Mat4::identity(), g[0] * g[1], g[0] * g[2], g[0] * g[3]];
    let weyl_current = spec.equation.helicity().map(|h| {
        let s = crate::spinor::pauli_set().sigma;
        let sign = CScalar::new(h.sign(), 0.0);
        [s[0], s[1].scale(sign), s[2].scale(sign), s[3].scale(sign)]
    });
    ResidualReport::from_samples(map_points(&points, |p| {
        let jet = prepared.at(p).map_err(|e| e.to_string())?;
        let div: f64 = match (&jet.dirac, &jet.weyl, &weyl_current) {
            (Some(d), _, _) => (0..4)
                .map(|mu| 2.0 * d.value.inner(&dirac_current[mu].apply(&d.grad[mu])).re)
                .sum(),
            (_, Some(w), Some(cur)) => (0..4)
                .map(|mu| 2.0 * w.value.inner(&cur[mu].apply(&w.grad[mu])).re)
                .sum(),
            _ => return Err("spinor kind mismatch".into()),
        };
        Ok(vec![div.abs()])
    }))
}

/// One row of the near-degeneracy sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassiveRow {
    pub e: f64,
    /// Rest mass m = e·E.
    pub mass: f64,
    /// Ψ†γΨ (real part) at the first sample point.
    pub bilinear: f64,
    /// ±2e(|c₁|² + |c₂|²)/(1 + e), minus sign for antiparticles.
    pub bilinear_closed_form: f64,
    /// max |Ψ†γΨ − closed form| over the sample.
    pub bilinear_deviation: f64,
    /// Residual coefficient r/(s·Ψ*) extracted at the first usable point.
    pub coefficient: f64,
    /// ±(1 − √((1 − e)/(1 + e))).
    pub coefficient_closed_form: f64,
    /// max |coefficient(p) − closed form| over usable points.
    pub coefficient_deviation: f64,
    /// max ‖r − coefficient·s·Ψ*‖ / ‖Ψ*‖ over usable points.
    pub fit_residual: f64,
    /// ||coefficient| − e|.
    pub small_e_gap: f64,
    /// Residual of the massless equation under the base potential.
    pub base_residual: f64,
    pub is_degenerate: bool,
    pub points_used: usize,
}

/// Evaluates the near-degeneracy quantities for each mass ratio.
///
/// The residual is that of the massless equation under the family potential
/// `∂h + s·κ`; it is compared against `s·Ψ*`, where `Ψ*` is the unperturbed
/// (massless-eigenvector) spinor with the same weights, phase and envelope.
/// Points where `s` vanishes are skipped.
pub fn massive_report(
    base: &SolutionSpec,
    e_values: &[f64],
    s: &Expr,
    plan: &SamplingPlan,
) -> Result<Vec<MassiveRow>, VerifyError> {
    let points = plan.points()?;
    let g = gamma_set();
    e_values
        .iter()
        .map(|&e| {
            let spec = base.clone().with_mass_ratio(e).dirac_solution()?;
            let unperturbed = spec.massless_counterpart();
            let a = crate::potential::base_potential(&spec.h);
            let b = crate::potential::degenerate_family(&a, &spec.direction.kappa_expr(), s);
            let prepared = PreparedSolution::new(&spec);
            let prepared0 = PreparedSolution::new(&unperturbed);
            let weights = spec.weights.ok_or(CatalogError::MissingWeights)?;
            let sign = if spec.equation == EquationKind::DiracAntiparticle { -1.0 } else { 1.0 };
            let bilinear_closed = sign * 2.0 * e * weights.norm_sqr() / (1.0 + e);
            let coefficient_closed = sign * (1.0 - crate::catalog::lower_block_factor(e));

            let mut row = MassiveRow {
                e,
                mass: spec.mass(),
                bilinear: f64::NAN,
                bilinear_closed_form: bilinear_closed,
                bilinear_deviation: 0.0,
                coefficient: f64::NAN,
                coefficient_closed_form: coefficient_closed,
                coefficient_deviation: 0.0,
                fit_residual: 0.0,
                small_e_gap: f64::NAN,
                base_residual: 0.0,
                is_degenerate: false,
                points_used: 0,
            };
            let mut single: Option<CScalar> = None;
            let mut fits = Vec::new();
            for (k, &p) in points.iter().enumerate() {
                let jet = prepared.at(p)?;
                let psi = *jet.value.as_dirac().ok_or(CatalogError::MissingWeights)?;
                let envelope_sq = spec.envelope.as_ref().map_or(Ok(1.0), |d| {
                    let w = spec.light_cone_coordinate(p)?;
                    d.eval(&EvalContext::at(p).with(Var::W, w).with_params(&spec.params))
                        .map(|v| v * v)
                })?;
                let bil = crate::spinor::bilinear(&psi, &g.chiral).re;
                if k == 0 {
                    row.bilinear = bil / envelope_sq;
                    row.is_degenerate = crate::spinor::degeneracy_flags(&psi).is_degenerate;
                }
                row.bilinear_deviation = row.bilinear_deviation.max((bil - bilinear_closed * envelope_sq).abs());

                let base_r = dirac_residual_at(&prepared, &a, 0.0, p).map_err(VerifyError::NoValidPoints)?;
                row.base_residual = row.base_residual.max(base_r.max_abs());

                let r = dirac_residual_at(&prepared, &b, 0.0, p).map_err(VerifyError::NoValidPoints)?;
                let reference = *prepared0.at(p)?.value.as_dirac().ok_or(CatalogError::MissingWeights)?;
                let s_val = s.eval_at(p, &spec.params)?;
                let denom = reference.norm_sqr() * s_val;
                if s_val.abs() < 1e-12 || reference.norm_sqr() == 0.0 {
                    continue;
                }
                let coefficient = reference.inner(&r) / denom;
                row.coefficient_deviation = row
                    .coefficient_deviation
                    .max((coefficient - CScalar::new(coefficient_closed, 0.0)).norm());
                let c = *single.get_or_insert(coefficient);
                fits.push((r, reference, s_val, c));
                row.points_used += 1;
            }
            if let Some(c) = single {
                row.coefficient = c.re;
                row.small_e_gap = (c.re.abs() - e).abs();
                for (r, reference, s_val, c) in fits {
                    let fit = (r - reference.scale(c * s_val)).norm() / reference.norm();
                    row.fit_residual = row.fit_residual.max(fit);
                }
            }
            Ok(row)
        })
        .collect()
}

/// Whether the difference between a closed-form connection potential and the
/// solver's representative stays inside span{κ(t)}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanDiagnostic {
    /// max ‖(corrected − synthesized)⊥κ‖ over sampled times.
    pub corrected_off_span: f64,
    /// max ‖(printed − synthesized)⊥κ‖ over sampled times.
    pub printed_off_span: f64,
    /// min angle (radians) between (printed − synthesized) and κ over times
    /// where the difference is nonzero.
    pub printed_min_angle: f64,
    pub max_system_residual: f64,
    pub max_representative_dot_kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaReport {
    /// Bilinear κ against the closed form, per component.
    pub deviation: ResidualReport,
    pub span: Option<SpanDiagnostic>,
}

fn angle_to(v: &FourVec<f64>, dir: &FourVec<f64>) -> f64 {
    let (nv, nd) = (v.norm(), dir.norm());
    if nv == 0.0 || nd == 0.0 {
        return 0.0;
    }
    (v.dot(dir).abs() / (nv * nd)).clamp(0.0, 1.0).acos()
}

/// Compares the correction part of a closed-form connection variant against
/// the solver at the given times.
pub fn connection_span_check(
    dir: &crate::catalog::DirectionSpec,
    helicity: Helicity,
    params: &Params,
    times: &[f64],
) -> Result<SpanDiagnostic, VerifyError> {
    let samples = synthesize_connection(dir, helicity, params, times)?;
    let corrected = connection_potential_variant(&Expr::zero(), dir, helicity, ConnectionVariant::Corrected);
    let printed = connection_potential_variant(&Expr::zero(), dir, helicity, ConnectionVariant::Printed);
    let mut diag = SpanDiagnostic {
        corrected_off_span: 0.0,
        printed_off_span: 0.0,
        printed_min_angle: f64::INFINITY,
        max_system_residual: 0.0,
        max_representative_dot_kappa: 0.0,
    };
    for s in &samples {
        let p = Point4::new(s.t, 0.0, 0.0, 0.0);
        let dc = eval_potential(&corrected, p, params)?.sub(&s.representative);
        let dp = eval_potential(&printed, p, params)?.sub(&s.representative);
        diag.corrected_off_span = diag.corrected_off_span.max(dc.reject_from(&s.kernel).norm());
        diag.printed_off_span = diag.printed_off_span.max(dp.reject_from(&s.kernel).norm());
        if dp.norm() > TOL_EXACT {
            diag.printed_min_angle = diag.printed_min_angle.min(angle_to(&dp, &s.kernel));
        }
        diag.max_system_residual = diag.max_system_residual.max(s.system_residual);
        diag.max_representative_dot_kappa = diag
            .max_representative_dot_kappa
            .max(s.representative.dot(&s.kernel).abs());
    }
    if !diag.printed_min_angle.is_finite() {
        diag.printed_min_angle = 0.0;
    }
    Ok(diag)
}

/// κ from spinor bilinears against the closed form at every sample point;
/// for time-varying directions also runs [`connection_span_check`].
pub fn kappa_consistency(spec: &SolutionSpec, plan: &SamplingPlan) -> Result<KappaReport, VerifyError> {
    let prepared = PreparedSolution::new(spec);
    let points = plan.points()?;
    let deviation = ResidualReport::from_samples(map_points(&points, |p| {
        let value = prepared.at(p).map_err(|e| e.to_string())?.value;
        let (theta, phi) = spec.direction.angles(p.t, &spec.params).map_err(|e| e.to_string())?;
        let closed = kappa_of(theta, phi);
        let measured = match (value.as_dirac(), value.as_weyl(), spec.equation.helicity()) {
            (Some(psi), _, _) => kappa_from_dirac(psi),
            (_, Some(psi), Some(h)) => kappa_from_weyl(psi, h),
            _ => return Err("spinor kind mismatch".into()),
        }
        .map_err(|e| e.to_string())?;
        Ok((0..4).map(|mu| (measured[mu] - closed[mu]).abs()).collect())
    }))?;
    let span = match spec.equation.helicity() {
        Some(h) if spec.direction.is_time_dependent() => {
            let times: Vec<f64> = points.iter().map(|p| p.t).collect();
            Some(connection_span_check(&spec.direction, h, &spec.params, &times)?)
        }
        _ => None,
    };
    Ok(KappaReport { deviation, span })
}

/// Largest relative gap |∂f − FD(f)| / max(1, |∂f|) between symbolic partial
/// derivatives and central differences (step [`FD_STEP`]) over the
/// spacetime variables. One report component per expression.
pub fn fd_crosscheck(exprs: &[Expr], params: &Params, plan: &SamplingPlan) -> Result<ResidualReport, VerifyError> {
    let points = plan.points()?;
    let derivs: Vec<[Expr; 4]> = exprs
        .iter()
        .map(|e| Var::SPACETIME.map(|v| e.derivative(v)))
        .collect();
    ResidualReport::from_samples(map_points(&points, |p| {
        exprs
            .iter()
            .zip(derivs.iter())
            .map(|(e, de)| {
                let mut worst = 0.0f64;
                for (k, v) in Var::SPACETIME.into_iter().enumerate() {
                    let sym = de[k].eval_at(p, params).map_err(|e| e.to_string())?;
                    let fwd = e.eval_at(p.shifted(v, FD_STEP), params).map_err(|e| e.to_string())?;
                    let bwd = e.eval_at(p.shifted(v, -FD_STEP), params).map_err(|e| e.to_string())?;
                    let fd = (fwd - bwd) / (2.0 * FD_STEP);
                    worst = worst.max((sym - fd).abs() / sym.abs().max(1.0));
                }
                Ok(worst)
            })
            .collect()
    }))
}

/// Pointwise agreement of two field sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldComparison {
    /// max |ΔE_i| per component.
    pub e_max_abs: [f64; 3],
    /// max |ΔB_i| per component.
    pub b_max_abs: [f64; 3],
    /// max |Δ| / max(1, |reference|) over all six components.
    pub max_scaled: f64,
    pub worst_point: Point4,
    pub points_checked: usize,
}

impl FieldComparison {
    /// Labels of components whose absolute gap exceeds `tol`.
    pub fn mismatched(&self, tol: f64) -> Vec<&'static str> {
        const E: [&str; 3] = ["Ex", "Ey", "Ez"];
        const B: [&str; 3] = ["Bx", "By", "Bz"];
        let mut out = Vec::new();
        for i in 0..3 {
            if self.e_max_abs[i] > tol {
                out.push(E[i]);
            }
        }
        for i in 0..3 {
            if self.b_max_abs[i] > tol {
                out.push(B[i]);
            }
        }
        out
    }
}

/// Compares `derived` against `reference` at the given points.
pub fn compare_fields(
    derived: &FieldExprSet,
    reference: &FieldExprSet,
    params: &Params,
    points: &[Point4],
) -> Result<FieldComparison, VerifyError> {
    let values: Vec<Result<_, EvalError>> = points
        .par_iter()
        .map(|&p| Ok((p, derived.eval(p, params)?, reference.eval(p, params)?)))
        .collect();
    let mut cmp = FieldComparison {
        e_max_abs: [0.0; 3],
        b_max_abs: [0.0; 3],
        max_scaled: 0.0,
        worst_point: Point4::default(),
        points_checked: 0,
    };
    for v in values {
        let (p, d, r) = v?;
        for i in 0..3 {
            let de = (d.e[i] - r.e[i]).abs();
            let db = (d.b[i] - r.b[i]).abs();
            cmp.e_max_abs[i] = cmp.e_max_abs[i].max(de);
            cmp.b_max_abs[i] = cmp.b_max_abs[i].max(db);
            let scaled = (de / r.e[i].abs().max(1.0)).max(db / r.b[i].abs().max(1.0));
            if scaled > cmp.max_scaled {
                cmp.max_scaled = scaled;
                cmp.worst_point = p;
            }
        }
        cmp.points_checked += 1;
    }
    Ok(cmp)
}
