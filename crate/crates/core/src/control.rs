//! Control-field planning for a Weyl particle.
//!
//! A target trajectory (energy E0(t), direction θ(t), φ(t)) fixes the phase
//! `h = E0(t)(n̂(t)·r − t)`; the connection potential built from that phase
//! carries the spinor along the trajectory. An optional family function `s`
//! adds `s·κ(t)` to the potential without changing the spinor.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{CatalogError, DirectionSpec, SolutionSpec};
use crate::expr::{EvalError, Expr, Params, Var};
use crate::potential::{
    add_potentials, connection_potential, degenerate_family, fields_from_potential, reference_fields, FieldError,
    FieldExprSet, FormulaId, FormulaParams, PotentialExpr,
};
use crate::spinor::Helicity;
use crate::verify::{compare_fields, weyl_residual, FieldComparison, ResidualReport, SamplingPlan, VerifyError, TOL_PIPELINE};
use crate::{FourVec, Point4};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("charge q must be nonzero")]
    ZeroCharge,
    #[error("trajectory {what} must depend only on t, found `{}`", .var.name())]
    NonTemporal { what: &'static str, var: Var },
    #[error("plan failed its own verification: {0}")]
    Unsound(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Target energy and direction of motion as functions of time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub e0: Expr,
    pub theta: Expr,
    pub phi: Expr,
    pub helicity: Helicity,
    pub q: f64,
    /// Optional family function added along κ(t).
    pub s: Option<Expr>,
    pub params: Params,
}

impl Trajectory {
    pub fn new(e0: Expr, theta: Expr, phi: Expr, helicity: Helicity, q: f64) -> Self {
        Trajectory {
            e0,
            theta,
            phi,
            helicity,
            q,
            s: None,
            params: Params::new(),
        }
    }

    pub fn with_s(mut self, s: Expr) -> Self {
        self.s = Some(s);
        self
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn direction(&self) -> DirectionSpec {
        DirectionSpec::new(self.theta.clone(), self.phi.clone())
    }

    /// The Weyl solution family that follows the trajectory.
    pub fn solution_spec(&self) -> Result<SolutionSpec, CatalogError> {
        SolutionSpec::weyl(self.helicity, self.direction(), control_phase(self), self.params.clone()).weyl_solution()
    }

    fn check(&self) -> Result<(), PlanError> {
        if self.q == 0.0 {
            return Err(PlanError::ZeroCharge);
        }
        for (what, e) in [("E0", &self.e0), ("theta", &self.theta), ("phi", &self.phi)] {
            for var in [Var::X, Var::Y, Var::Z, Var::W] {
                if e.depends_on(var) {
                    return Err(PlanError::NonTemporal { what, var });
                }
            }
        }
        Ok(())
    }
}

/// h = E0(t)·(sinθ cosφ·x + sinθ sinφ·y + cosθ·z − t).
pub fn control_phase(traj: &Trajectory) -> Expr {
    let n = traj.direction().unit_vector();
    let [x, y, z, t] = [Var::X, Var::Y, Var::Z, Var::T].map(Expr::var);
    let w = Expr::sum([n[0].clone() * x, n[1].clone() * y, n[2].clone() * z, -t]);
    (traj.e0.clone() * w).folded()
}

/// Self-check of a plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanVerification {
    /// Weyl residual of the planned spinor under the full planned potential.
    pub residual: ResidualReport,
    /// Derived trajectory E against the closed form for the helicity.
    pub closed_form: FieldComparison,
    /// max |B| of the trajectory part.
    pub trajectory_b_max: f64,
    pub tol: f64,
    pub sound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlPlan {
    pub h: Expr,
    /// Connection potential plus the family term when `s` is given.
    pub potential: PotentialExpr,
    /// Fields derived from the connection potential alone.
    pub trajectory_fields: FieldExprSet,
    /// Closed-form trajectory E for the plan's helicity.
    pub closed_form_e: [Expr; 3],
    /// Fields derived from the s·κ(t) term, when present.
    pub family_fields: Option<FieldExprSet>,
    /// Everything the planned potential produces.
    pub total_fields: FieldExprSet,
    pub verification: PlanVerification,
    pub samples: Vec<FieldSample>,
}

/// Builds, verifies and samples a control plan. The plan is checked before
/// it is returned; an unsound plan is an error.
pub fn plan(traj: &Trajectory, sampling: &SamplingPlan, grid: &[Point4]) -> Result<ControlPlan, PlanError> {
    plan_with_tol(traj, sampling, grid, TOL_PIPELINE)
}

pub fn plan_with_tol(
    traj: &Trajectory,
    sampling: &SamplingPlan,
    grid: &[Point4],
    tol: f64,
) -> Result<ControlPlan, PlanError> {
    let built = build(traj, sampling, tol)?;
    if !built.verification.sound {
        return Err(PlanError::Unsound(describe_failure(&built.verification)));
    }
    let samples = sample_fields(&built.total_fields, &traj.params, grid)?;
    Ok(ControlPlan { samples, ..built })
}

/// Builds and verifies a plan without rejecting it or sampling.
pub fn build(traj: &Trajectory, sampling: &SamplingPlan, tol: f64) -> Result<ControlPlan, PlanError> {
    traj.check()?;
    let spec = traj.solution_spec()?;
    let dir = traj.direction();
    let h = spec.h.clone();

    let connection = connection_potential(&h, &dir, traj.helicity);
    let trajectory_fields = fields_from_potential(&connection, traj.q)?;
    let (potential, family_fields) = match &traj.s {
        Some(s) => {
            let zero = FourVec(std::array::from_fn(|_| Expr::zero()));
            let family = degenerate_family(&zero, &dir.kappa_expr(), s);
            (add_potentials(&connection, &family), Some(fields_from_potential(&family, traj.q)?))
        }
        None => (connection, None),
    };
    let total_fields = match &family_fields {
        Some(f) => trajectory_fields.add(f),
        None => trajectory_fields.clone(),
    };

    let formula = match traj.helicity {
        Helicity::Positive => FormulaId::ControlPositive,
        Helicity::Negative => FormulaId::ControlNegative,
    };
    let closed = reference_fields(
        formula,
        &FormulaParams::new(traj.q).with_direction(dir).with_energy(traj.e0.clone()),
    )?;

    let residual = weyl_residual(&spec, &potential, sampling)?;
    let points = sampling.points()?;
    let closed_form = compare_fields(&trajectory_fields, &closed, &traj.params, &points)?;
    let mut trajectory_b_max = 0.0f64;
    for p in &points {
        let v = trajectory_fields.eval(*p, &traj.params)?;
        trajectory_b_max = v.b.iter().fold(trajectory_b_max, |m, b| m.max(b.abs()));
    }
    let sound = residual.passes(tol)
        && closed_form.max_scaled <= tol
        && trajectory_b_max <= tol;

    Ok(ControlPlan {
        h,
        potential,
        trajectory_fields,
        closed_form_e: closed.e,
        family_fields,
        total_fields,
        verification: PlanVerification {
            residual,
            closed_form,
            trajectory_b_max,
            tol,
            sound,
        },
        samples: Vec::new(),
    })
}

fn describe_failure(v: &PlanVerification) -> String {
    let mut parts = Vec::new();
    if !v.residual.passes(v.tol) {
        parts.push(format!("Weyl residual {:e}", v.residual.max_abs));
    }
    if v.closed_form.max_scaled > v.tol {
        parts.push(format!("closed-form E gap {:e}", v.closed_form.max_scaled));
    }
    if v.trajectory_b_max > v.tol {
        parts.push(format!("trajectory B {:e}", v.trajectory_b_max));
    }
    format!("{} exceeds tolerance {:e}", parts.join(", "), v.tol)
}

/// One row of a field table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    #[serde(rename = "Ex")]
    pub ex: f64,
    #[serde(rename = "Ey")]
    pub ey: f64,
    #[serde(rename = "Ez")]
    pub ez: f64,
    #[serde(rename = "Bx")]
    pub bx: f64,
    #[serde(rename = "By")]
    pub by: f64,
    #[serde(rename = "Bz")]
    pub bz: f64,
}

impl FieldSample {
    pub fn point(&self) -> Point4 {
        Point4::new(self.t, self.x, self.y, self.z)
    }

    pub fn e(&self) -> [f64; 3] {
        [self.ex, self.ey, self.ez]
    }

    pub fn b(&self) -> [f64; 3] {
        [self.bx, self.by, self.bz]
    }

    fn values(&self) -> [f64; 10] {
        [
            self.t, self.x, self.y, self.z, self.ex, self.ey, self.ez, self.bx, self.by, self.bz,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("sample {index} at (t={}, x={}, y={}, z={}): {source}", .point.t, .point.x, .point.y, .point.z)]
pub struct SampleError {
    pub index: usize,
    pub point: Point4,
    pub source: EvalError,
}

impl From<SampleError> for PlanError {
    fn from(e: SampleError) -> Self {
        PlanError::Eval(e.source)
    }
}

/// Evaluates fields at every grid point, in grid order.
pub fn sample_fields(fields: &FieldExprSet, params: &Params, grid: &[Point4]) -> Result<Vec<FieldSample>, SampleError> {
    grid.par_iter()
        .enumerate()
        .map(|(index, &p)| {
            let v = fields.eval(p, params).map_err(|source| SampleError { index, point: p, source })?;
            Ok(FieldSample {
                t: p.t,
                x: p.x,
                y: p.y,
                z: p.z,
                ex: v.e[0],
                ey: v.e[1],
                ez: v.e[2],
                bx: v.b[0],
                by: v.b[1],
                bz: v.b[2],
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: &str = "t,x,y,z,Ex,Ey,Ez,Bx,By,Bz";

/// Writes samples as CSV (header row, one row per sample) or as a JSON array.
pub fn export<W: Write>(samples: &[FieldSample], format: ExportFormat, mut out: W) -> std::io::Result<()> {
    match format {
        ExportFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for s in samples {
                let row: Vec<String> = s.values().iter().map(|v| v.to_string()).collect();
                writeln!(out, "{}", row.join(","))?;
            }
        }
        ExportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, samples)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn export_to_vec(samples: &[FieldSample], format: ExportFormat) -> Vec<u8> {
    let mut buf = Vec::new();
    export(samples, format, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

/// Parses the JSON form written by [`export`].
pub fn import_json(bytes: &[u8]) -> serde_json::Result<Vec<FieldSample>> {
    serde_json::from_slice(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;

    fn traj(e0: &str, theta: &str, phi: &str, helicity: Helicity, q: f64) -> Trajectory {
        Trajectory::new(parse(e0).unwrap(), parse(theta).unwrap(), parse(phi).unwrap(), helicity, q)
    }

    fn grid_t(ts: &[f64]) -> Vec<Point4> {
        ts.iter().map(|&t| Point4::new(t, 0.3, -0.2, 0.1)).collect()
    }

    #[test]
    fn phase_along_z() {
        let h = control_phase(&traj("E0", "0", "0", Helicity::Positive, -1.0));
        let expected = parse("E0 * (z - t)").unwrap();
        let params = Params::from([("E0".to_string(), 1.5)]);
        for p in [Point4::new(0.3, 1.0, -2.0, 0.7), Point4::new(-1.0, 0.2, 0.4, 2.0)] {
            assert_eq!(h.eval_at(p, &params).unwrap(), expected.eval_at(p, &params).unwrap());
        }
    }

    #[test]
    fn constant_trajectory_has_no_fields() {
        let p = plan(
            &traj("2", "0.4", "1.1", Helicity::Positive, -1.0),
            &SamplingPlan::default(),
            &grid_t(&[0.0, 0.5]),
        )
        .unwrap();
        for s in &p.samples {
            assert!(s.e().iter().chain(s.b().iter()).all(|v| v.abs() <= 1e-12));
        }
    }

    #[test]
    fn energy_ramp_gives_longitudinal_field() {
        // E0 = 1 + 0.5 t along z, q = −1: Ez = −2α/q = 1.
        let p = plan(
            &traj("1 + 0.5 * t", "0", "0", Helicity::Positive, -1.0),
            &SamplingPlan::default(),
            &grid_t(&[1.0]),
        )
        .unwrap();
        let s = p.samples[0];
        assert!((s.ez - 1.0).abs() < 1e-12);
        assert!(s.ex.abs() < 1e-12 && s.ey.abs() < 1e-12);
    }

    #[test]
    fn rotation_gives_rotating_field() {
        // E0 = 1, θ = 2t, q = 1: E = 4(−cos 2t, 0, sin 2t).
        let p = plan(
            &traj("1", "2 * t", "0", Helicity::Positive, 1.0),
            &SamplingPlan::default(),
            &grid_t(&[0.3]),
        )
        .unwrap();
        let s = p.samples[0];
        assert!((s.ex + 4.0 * (0.6f64).cos()).abs() < 1e-12);
        assert!(s.ey.abs() < 1e-12);
        assert!((s.ez - 4.0 * (0.6f64).sin()).abs() < 1e-12);
    }

    #[test]
    fn zero_charge_is_rejected() {
        let err = plan(&traj("1", "0", "0", Helicity::Positive, 0.0), &SamplingPlan::default(), &[]);
        assert_eq!(err.unwrap_err(), PlanError::ZeroCharge);
    }

    #[test]
    fn spatial_trajectory_is_rejected() {
        let err = plan(&traj("1 + x", "0", "0", Helicity::Positive, 1.0), &SamplingPlan::default(), &[]);
        assert!(matches!(err, Err(PlanError::NonTemporal { what: "E0", var: Var::X })));
    }

    #[test]
    fn csv_export_shapes() {
        assert_eq!(export_to_vec(&[], ExportFormat::Csv), format!("{CSV_HEADER}\n").into_bytes());
        let s = FieldSample {
            t: 1.0,
            x: 0.5,
            y: 0.0,
            z: -2.0,
            ex: 0.25,
            ey: 0.0,
            ez: 1.0,
            bx: 0.0,
            by: 0.0,
            bz: 0.0,
        };
        let text = String::from_utf8(export_to_vec(&[s], ExportFormat::Csv)).unwrap();
        assert_eq!(text, format!("{CSV_HEADER}\n1,0.5,0,-2,0.25,0,1,0,0,0\n"));
        let json = export_to_vec(&[s], ExportFormat::Json);
        assert_eq!(import_json(&json).unwrap(), vec![s]);
    }

    #[test]
    fn zero_fields_sample_to_zero() {
        let grid = grid_t(&[0.0, 1.0, 2.0]);
        let samples = sample_fields(&FieldExprSet::zero(1.0), &Params::new(), &grid).unwrap();
        assert_eq!(samples.len(), 3);
        assert!(samples.iter().all(|s| s.e() == [0.0; 3] && s.b() == [0.0; 3]));
        assert_eq!(samples[2].t, 2.0);
    }
}
