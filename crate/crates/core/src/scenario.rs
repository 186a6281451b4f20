//! JSON scenario configuration and the checks run against a scenario.
//!
//! A scenario bundles a solution family, the potential family it lives in,
//! sampling and grid settings, and optional extras (a plane wave, transverse
//! oscillating fields, a control trajectory, a mass-ratio sweep). Expression
//! fields are strings in the DSL grammar.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::catalog::{CatalogError, DirectionSpec, EquationKind, SolutionSpec, SpinWeights, BUILTIN_NAMES};
use crate::control::{self, PlanError, Trajectory};
use crate::expr::{Expr, Params};
use crate::potential::{
    base_potential, connection_potential, degenerate_family, fields_from_potential, poynting, reference_fields,
    FieldError, FieldExprSet, FormulaId, FormulaParams, PotentialExpr, WaveParams,
};
use crate::spinor::CScalar;
use crate::verify::{
    compare_fields, continuity_divergence, equation_residual, fd_crosscheck, kappa_consistency, massive_report,
    SamplingPlan, VerifyError, TOL_EXACT, TOL_FD,
};
use crate::{FourVec, Point4};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("scenario has no {0} section")]
    MissingSection(&'static str),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    /// [[lo, hi]; 4] in (t, x, y, z) order.
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[[f64; 2]; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Per-axis `[start, stop, steps]`; missing axes are held at 0.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<[f64; 3]>,
}

fn linspace(axis: &str, spec: Option<[f64; 3]>) -> Result<Vec<f64>, ScenarioError> {
    let Some([start, stop, steps]) = spec else {
        return Ok(vec![0.0]);
    };
    if !(steps >= 0.0 && steps.fract() == 0.0 && steps <= 1e7) {
        return Err(ScenarioError::Grid(format!("{axis}: step count {steps} is not a nonnegative integer")));
    }
    if !start.is_finite() || !stop.is_finite() {
        return Err(ScenarioError::Grid(format!("{axis}: bounds must be finite")));
    }
    let n = steps as usize;
    Ok(match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|k| if k == n - 1 { stop } else { start + (stop - start) * k as f64 / (n - 1) as f64 })
            .collect(),
    })
}

impl GridConfig {
    /// Cartesian product with t outermost, then x, y, z.
    pub fn points(&self) -> Result<Vec<Point4>, ScenarioError> {
        let ts = linspace("t", self.t)?;
        let xs = linspace("x", self.x)?;
        let ys = linspace("y", self.y)?;
        let zs = linspace("z", self.z)?;
        let mut out = Vec::with_capacity(ts.len() * xs.len() * ys.len() * zs.len());
        for &t in &ts {
            for &x in &xs {
                for &y in &ys {
                    for &z in &zs {
                        out.push(Point4::new(t, x, y, z));
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub e0: Expr,
    pub theta: Expr,
    pub phi: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub e: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Expr>,
}

/// Transverse field profiles H1(t), H2(t) for the oscillating-field example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransverseConfig {
    pub h1: Expr,
    pub h2: Expr,
}

fn zero_expr() -> Expr {
    Expr::zero()
}

fn default_energy() -> f64 {
    1.0
}

fn default_charge() -> f64 {
    -1.0
}

fn default_kappa_sign() -> f64 {
    1.0
}

fn is_default_kappa_sign(v: &f64) -> bool {
    *v == 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub equation: EquationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<[f64; 2]>,
    #[serde(default = "zero_expr")]
    pub theta: Expr,
    #[serde(default = "zero_expr")]
    pub phi: Expr,
    /// Phase; derived from the trajectory when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Expr>,
    /// Family function multiplying κ in the potential.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Expr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<Expr>,
    #[serde(default)]
    pub mass_ratio_e: f64,
    #[serde(rename = "energy_E", default = "default_energy")]
    pub energy_e: f64,
    #[serde(default = "default_charge")]
    pub charge_q: f64,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    /// Plane wave; when present and `s` is absent, s = q·s_q.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wave: Option<WaveParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transverse: Option<TransverseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectoryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    /// −1 flips the spatial part of κ in the potential (a deliberately
    /// broken kernel, for testing the checks).
    #[serde(default = "default_kappa_sign", skip_serializing_if = "is_default_kappa_sign")]
    pub kappa_sign: f64,
}

/// Family function used by the family-residual check when a scenario does
/// not define one.
pub fn probe_family_function() -> Expr {
    crate::parse("x^2 * t + 0.5 * sin(y - z)").expect("valid probe expression")
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// `params` plus `q` = charge (unless `q` is set explicitly).
    pub fn all_params(&self) -> Params {
        let mut p = self.params.clone();
        p.entry("q".to_string()).or_insert(self.charge_q);
        p
    }

    fn weights(&self) -> Option<SpinWeights> {
        if !self.equation.is_dirac() && self.c1.is_none() && self.c2.is_none() {
            return None;
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |v: Option<[f64; 2]>| v.map_or(CScalar::new(h, 0.0), |[re, im]| CScalar::new(re, im));
        Some(SpinWeights::new(c(self.c1), c(self.c2)))
    }

    pub fn direction(&self) -> DirectionSpec {
        match &self.trajectory {
            Some(t) => DirectionSpec::new(t.theta.clone(), t.phi.clone()),
            None => DirectionSpec::new(self.theta.clone(), self.phi.clone()),
        }
    }

    pub fn trajectory(&self) -> Result<Trajectory, ScenarioError> {
        let t = self.trajectory.as_ref().ok_or(ScenarioError::MissingSection("trajectory"))?;
        let helicity = self.equation.helicity().ok_or(CatalogError::WrongKind {
            expected: "Weyl",
            found: self.equation,
        })?;
        let mut traj = Trajectory::new(t.e0.clone(), t.theta.clone(), t.phi.clone(), helicity, self.charge_q)
            .with_params(self.all_params());
        if let Some(s) = &t.s {
            traj = traj.with_s(s.clone());
        }
        Ok(traj)
    }

    /// The validated solution family.
    pub fn solution_spec(&self) -> Result<SolutionSpec, CatalogError> {
        let h = match (&self.h, &self.trajectory) {
            (Some(h), _) => h.clone(),
            (None, Some(_)) => {
                let traj = self.trajectory().map_err(|e| match e {
                    ScenarioError::Catalog(c) => c,
                    _ => CatalogError::MissingPhase,
                })?;
                control::control_phase(&traj)
            }
            (None, None) => return Err(CatalogError::MissingPhase),
        };
        SolutionSpec {
            equation: self.equation,
            weights: self.weights(),
            direction: self.direction(),
            h,
            envelope: self.envelope.clone(),
            mass_ratio_e: self.mass_ratio_e,
            energy_e: self.energy_e,
            params: self.all_params(),
        }
        .validated()
    }

    pub fn sampling_plan(&self) -> SamplingPlan {
        let mut plan = SamplingPlan::default();
        if let Some(b) = self.sampling.bounds {
            plan.lo = b.map(|side| side[0]);
            plan.hi = b.map(|side| side[1]);
        }
        if let Some(c) = self.sampling.count {
            plan.count = c;
        }
        if let Some(s) = self.sampling.seed {
            plan.seed = s;
        }
        plan
    }

    /// Grid points; a scenario without a grid samples the origin only.
    pub fn grid_points(&self) -> Result<Vec<Point4>, ScenarioError> {
        match &self.grid {
            Some(g) => g.points(),
            None => Ok(vec![Point4::default()]),
        }
    }

    /// The configured family function: `s`, else q·s_q for a wave scenario,
    /// else the trajectory's `s`.
    pub fn family_function(&self) -> Option<Expr> {
        if let Some(s) = &self.s {
            return Some(s.clone());
        }
        if let Some(w) = &self.wave {
            return Some(w.s_q().scale(self.charge_q).folded());
        }
        self.trajectory.as_ref().and_then(|t| t.s.clone())
    }

    /// κ for the potential, with the spatial part scaled by `kappa_sign`.
    pub fn kappa(&self, dir: &DirectionSpec) -> FourVec<Expr> {
        let k = dir.kappa_expr();
        FourVec::new(
            k[0].clone(),
            k[1].clone().scale(self.kappa_sign),
            k[2].clone().scale(self.kappa_sign),
            k[3].clone().scale(self.kappa_sign),
        )
    }

    /// ∂h for constant directions, the connection potential otherwise.
    pub fn base_potential(&self, spec: &SolutionSpec) -> PotentialExpr {
        match spec.equation.helicity() {
            Some(hel) if spec.direction.is_time_dependent() => connection_potential(&spec.h, &spec.direction, hel),
            _ => base_potential(&spec.h),
        }
    }

    /// The base potential plus s·κ for the given family function.
    pub fn family_potential(&self, spec: &SolutionSpec, s: &Expr) -> PotentialExpr {
        degenerate_family(&self.base_potential(spec), &self.kappa(&spec.direction), s)
    }

    /// The potential whose fields the scenario describes.
    pub fn configured_potential(&self, spec: &SolutionSpec) -> PotentialExpr {
        match self.family_function() {
            Some(s) => self.family_potential(spec, &s),
            None => self.base_potential(spec),
        }
    }

    pub fn configured_fields(&self) -> Result<(FieldExprSet, Params), ScenarioError> {
        let spec = self.solution_spec()?;
        let fields = fields_from_potential(&self.configured_potential(&spec), self.charge_q)?;
        Ok((fields, spec.params))
    }
}

/// Raw JSON of a bundled scenario.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "free_particle" => include_str!("../scenarios/free_particle.json"),
        "oscillating_xy" => include_str!("../scenarios/oscillating_xy.json"),
        "wave_immune" => include_str!("../scenarios/wave_immune.json"),
        "gaussian_envelope" => include_str!("../scenarios/gaussian_envelope.json"),
        "control_demo" => include_str!("../scenarios/control_demo.json"),
        "massive_sweep" => include_str!("../scenarios/massive_sweep.json"),
        _ => return None,
    })
}

pub fn builtin_scenario(name: &str) -> Option<ScenarioConfig> {
    builtin_source(name).map(|src| ScenarioConfig::from_json(src).expect("bundled scenario parses"))
}

/// Every bundled scenario, in catalog order.
pub fn builtin_scenarios() -> Vec<ScenarioConfig> {
    BUILTIN_NAMES.iter().filter_map(|n| builtin_scenario(n)).collect()
}

/// One named check. Diagnostics carry no limit and never fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub limit: Option<f64>,
    pub passed: Option<bool>,
    pub detail: Value,
}

impl CheckResult {
    fn asserted(name: impl Into<String>, value: f64, limit: f64, detail: Value) -> Self {
        CheckResult {
            name: name.into(),
            value,
            limit: Some(limit),
            passed: Some(value <= limit),
            detail,
        }
    }

    fn diagnostic(name: impl Into<String>, value: f64, detail: Value) -> Self {
        CheckResult {
            name: name.into(),
            value,
            limit: None,
            passed: None,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub tol: f64,
    pub points: usize,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl ScenarioReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

/// Residual, κ, continuity, field-formula, control and sweep checks for a
/// scenario. Equation residuals and formula comparisons are asserted at
/// `tol`; finite-difference checks at the FD tolerance.
pub fn run_checks(config: &ScenarioConfig, plan: &SamplingPlan, tol: f64) -> Result<ScenarioReport, ScenarioError> {
    plan.validate()?;
    let spec = config.solution_spec()?;
    let params = spec.params.clone();
    let q = config.charge_q;
    let mut checks = Vec::new();

    let massive = spec.mass_ratio_e > 0.0;
    let base = config.base_potential(&spec);
    let family_s = config.family_function().unwrap_or_else(probe_family_function);
    let family = config.family_potential(&spec, &family_s);

    if !massive {
        let r = equation_residual(&spec, &base, plan)?;
        let value = if r.failures.is_empty() { r.max_abs } else { f64::INFINITY };
        checks.push(CheckResult::asserted("residual.base", value, tol, to_value(&r)));
        let r = equation_residual(&spec, &family, plan)?;
        let value = if r.failures.is_empty() { r.max_abs } else { f64::INFINITY };
        checks.push(CheckResult::asserted(
            "residual.family",
            value,
            tol,
            json!({ "s": family_s.to_string(), "report": to_value(&r) }),
        ));

        match kappa_consistency(&spec, plan) {
            Ok(k) => {
                checks.push(CheckResult::asserted(
                    "kappa.bilinear",
                    k.deviation.max_abs,
                    tol,
                    to_value(&k.deviation),
                ));
                if let Some(span) = &k.span {
                    checks.push(CheckResult::asserted(
                        "connection.corrected_in_span",
                        span.corrected_off_span,
                        tol,
                        to_value(span),
                    ));
                    checks.push(CheckResult::diagnostic(
                        "connection.printed_min_angle",
                        span.printed_min_angle,
                        to_value(span),
                    ));
                }
            }
            Err(VerifyError::NoValidPoints(msg)) => {
                checks.push(CheckResult::diagnostic("kappa.bilinear", f64::NAN, json!({ "skipped": msg })));
            }
            Err(e) => return Err(e.into()),
        }

        let div = continuity_divergence(&spec, plan)?;
        if spec.envelope.is_none() {
            checks.push(CheckResult::asserted("continuity", div.max_abs, tol, to_value(&div)));
        } else {
            checks.push(CheckResult::diagnostic("continuity", div.max_abs, to_value(&div)));
        }
    }

    let points = plan.points()?;
    if let Some(wave) = &config.wave {
        let derived = fields_from_potential(&config.configured_potential(&spec), q)?;
        let reference = reference_fields(
            FormulaId::CounterWave,
            &FormulaParams::new(q).with_wave(*wave).with_h(spec.h.clone()),
        )?;
        let cmp = compare_fields(&derived, &reference, &params, &points)?;
        checks.push(CheckResult::asserted("fields.wave", cmp.max_scaled, tol, to_value(&cmp)));
        let mut sz_max = f64::NEG_INFINITY;
        for p in &points {
            let v = derived.eval(*p, &params).map_err(VerifyError::from)?;
            sz_max = sz_max.max(poynting(v.e, v.b)[2]);
        }
        checks.push(CheckResult::asserted("fields.wave_poynting_sz", sz_max, tol, json!({ "max_sz": sz_max })));
    }

    if let Some(tr) = &config.transverse {
        let derived = fields_from_potential(&base, q)?;
        let reference = reference_fields(
            FormulaId::Transverse,
            &FormulaParams::new(q).with_transverse(tr.h1.clone(), tr.h2.clone()),
        )?;
        let cmp = compare_fields(&derived, &reference, &params, &points)?;
        checks.push(CheckResult::asserted("fields.transverse", cmp.max_scaled, tol, to_value(&cmp)));
    }

    if !spec.direction.is_time_dependent() {
        let derived = fields_from_potential(&family, q)?;
        let reference = reference_fields(
            FormulaId::General,
            &FormulaParams::new(q)
                .with_h(spec.h.clone())
                .with_s(family_s.clone())
                .with_direction(spec.direction.clone()),
        )?;
        let cmp = compare_fields(&derived, &reference, &params, &points)?;
        checks.push(CheckResult::asserted("fields.general", cmp.max_scaled, tol, to_value(&cmp)));
    }

    if config.trajectory.is_some() {
        let traj = config.trajectory()?;
        let built = control::build(&traj, plan, tol)?;
        let v = &built.verification;
        checks.push(CheckResult::asserted(
            "control.residual",
            if v.residual.failures.is_empty() { v.residual.max_abs } else { f64::INFINITY },
            tol,
            to_value(&v.residual),
        ));
        checks.push(CheckResult::asserted(
            "control.closed_form",
            v.closed_form.max_scaled,
            tol,
            to_value(&v.closed_form),
        ));
        checks.push(CheckResult::asserted(
            "control.trajectory_b",
            v.trajectory_b_max,
            tol,
            json!({ "max_abs_b": v.trajectory_b_max }),
        ));
        if let (Some(s), Some(derived)) = (&traj.s, &built.family_fields) {
            let printed = reference_fields(
                FormulaId::ControlFamily,
                &FormulaParams::new(q).with_s(s.clone()).with_direction(traj.direction()),
            )?;
            let cmp = compare_fields(derived, &printed, &params, &points)?;
            checks.push(CheckResult::diagnostic(
                "control.family_printed_gap",
                cmp.max_scaled,
                json!({ "mismatched": cmp.mismatched(tol), "comparison": to_value(&cmp) }),
            ));
        }
    }

    let sweep: Option<(Vec<f64>, Expr)> = match (&config.sweep, massive) {
        (Some(sw), _) => Some((
            sw.e.clone(),
            sw.s.clone().or_else(|| config.s.clone()).unwrap_or_else(Expr::one),
        )),
        (None, true) => Some((vec![spec.mass_ratio_e], config.s.clone().unwrap_or_else(Expr::one))),
        (None, false) => None,
    };
    if let Some((es, s)) = sweep {
        let rows = massive_report(&spec, &es, &s, plan)?;
        for row in &rows {
            let label = format!("massive[e={}]", row.e);
            let detail = to_value(row);
            checks.push(CheckResult::asserted(format!("{label}.bilinear"), row.bilinear_deviation, tol, detail.clone()));
            checks.push(CheckResult::asserted(
                format!("{label}.coefficient"),
                row.coefficient_deviation.max(row.fit_residual),
                tol,
                detail.clone(),
            ));
            checks.push(CheckResult::asserted(
                format!("{label}.small_e_gap"),
                row.small_e_gap,
                row.e * row.e + TOL_EXACT,
                detail,
            ));
        }
    }

    let components: Vec<Expr> = config.configured_potential(&spec).0.to_vec();
    let fd = fd_crosscheck(&components, &params, plan)?;
    checks.push(CheckResult::asserted("fd.potential", fd.max_abs, TOL_FD, to_value(&fd)));

    let passed = checks.iter().all(|c| c.passed != Some(false));
    Ok(ScenarioReport {
        scenario: config.name.clone(),
        tol,
        points: plan.count,
        seed: plan.seed,
        passed,
        checks,
    })
}
