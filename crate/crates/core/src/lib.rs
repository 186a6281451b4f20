//! Degenerate solutions of the massless Dirac and Weyl equations.
//!
//! A spinor is *degenerate* when it solves the wave equation for a whole
//! family of 4-potentials `b = a + s·κ` rather than a single one. This crate
//! builds those solution families symbolically, derives the electromagnetic
//! fields of every family member, checks each claimed identity numerically,
//! and plans control-field schedules that steer a Weyl particle's energy and
//! direction of motion.
//!
//! Module map:
//!
//! - [`expr`]: expression DSL (parse, differentiate, fold, evaluate)
//! - [`spinor`]: complex spinors, gamma and Pauli matrices, bilinears, κ
//! - [`catalog`]: solution families and bundled scenarios
//! - [`potential`]: 4-potentials, connection potentials, field derivation and
//!   the printed reference formulas
//! - [`verify`]: residual, continuity, κ and near-degeneracy checks
//! - [`control`]: control-field planning and sample export
//! - [`scenario`]: JSON scenario configuration used by the CLI

pub mod catalog;
pub mod control;
pub mod expr;
pub mod potential;
pub mod scenario;
pub mod spinor;
pub mod verify;

use serde::{Deserialize, Serialize};

pub use expr::{parse, EvalContext, EvalError, Expr, Params, ParseError, Var};

/// A spacetime point in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point4 {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point4 {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    /// Components in (t, x, y, z) order.
    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn coordinate(&self, v: Var) -> Option<f64> {
        match v {
            Var::T => Some(self.t),
            Var::X => Some(self.x),
            Var::Y => Some(self.y),
            Var::Z => Some(self.z),
            Var::W => None,
        }
    }

    /// Copy of the point with one coordinate shifted by `delta`.
    pub fn shifted(mut self, v: Var, delta: f64) -> Self {
        match v {
            Var::T => self.t += delta,
            Var::X => self.x += delta,
            Var::Y => self.y += delta,
            Var::Z => self.z += delta,
            Var::W => {}
        }
        self
    }
}

/// Four components indexed 0..3, lower-index convention: component μ
/// multiplies γ^μ (or σ^μ) in the wave equations.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVec<T>(pub [T; 4]);

impl<T> FourVec<T> {
    pub fn new(c0: T, c1: T, c2: T, c3: T) -> Self {
        FourVec([c0, c1, c2, c3])
    }

    pub fn map<U>(self, f: impl FnMut(T) -> U) -> FourVec<U> {
        FourVec(self.0.map(f))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }
}

impl<T> std::ops::Index<usize> for FourVec<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl FourVec<f64> {
    /// Euclidean inner product of the component tuples.
    pub fn dot(&self, other: &FourVec<f64>) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn sub(&self, other: &FourVec<f64>) -> FourVec<f64> {
        FourVec(std::array::from_fn(|i| self.0[i] - other.0[i]))
    }

    pub fn scaled(&self, c: f64) -> FourVec<f64> {
        FourVec(self.0.map(|v| v * c))
    }

    /// Component of `self` orthogonal (Euclidean) to `dir`.
    pub fn reject_from(&self, dir: &FourVec<f64>) -> FourVec<f64> {
        let dd = dir.dot(dir);
        if dd == 0.0 {
            return *self;
        }
        self.sub(&dir.scaled(self.dot(dir) / dd))
    }

    pub fn max_abs_diff(&self, other: &FourVec<f64>) -> f64 {
        self.sub(other).0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
