use std::f64::consts::PI;
use std::sync::Arc;

use super::assemble::{assemble, GalerkinSystem, InitialData};
use super::modes::{AxisSpec, ModeCatalog};
use super::solve::{solve, Solution};
use super::spec::{Axis, OperatorSpec};
use crate::error::Result;
use crate::wavelet::FilterPair;

/// Harmonic Liouville flow of a centred Gaussian on `[−h, h]²` over `[0, t_end]`.
///
/// With `t_end = π/ω` the centred Gaussian returns to itself, so the solution is periodic
/// in time and fits periodic time modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiouvilleBenchmark {
    pub modes: usize,
    pub time_modes: usize,
    pub quad_nodes: usize,
    pub half_width: f64,
    pub t_end: f64,
    pub sigma_q: f64,
    pub sigma_p: f64,
    pub mass: f64,
    pub omega: f64,
}

impl Default for LiouvilleBenchmark {
    fn default() -> Self {
        Self {
            modes: 16,
            time_modes: 16,
            quad_nodes: 512,
            half_width: 5.0,
            t_end: PI,
            sigma_q: 1.3,
            sigma_p: 1.1,
            mass: 1.0,
            omega: 1.0,
        }
    }
}

impl LiouvilleBenchmark {
    pub fn with_modes(modes: usize) -> Self {
        Self { modes, time_modes: modes, ..Self::default() }
    }

    pub fn operator(&self) -> OperatorSpec {
        OperatorSpec::harmonic_liouville(self.mass, self.omega)
    }

    pub fn catalog(&self, filters: Arc<FilterPair>) -> Result<ModeCatalog> {
        let l = 2.0 * self.half_width;
        ModeCatalog::new(
            filters,
            &[
                AxisSpec::new(Axis::T, 0.0, self.t_end, self.time_modes).with_quad_nodes(self.quad_nodes),
                AxisSpec::new(Axis::Q, -self.half_width, l, self.modes).with_quad_nodes(self.quad_nodes),
                AxisSpec::new(Axis::P, -self.half_width, l, self.modes).with_quad_nodes(self.quad_nodes),
            ],
        )
    }

    pub fn initial(&self, q: f64, p: f64) -> f64 {
        let norm = 1.0 / (2.0 * PI * self.sigma_q * self.sigma_p);
        norm * (-q * q / (2.0 * self.sigma_q * self.sigma_q) - p * p / (2.0 * self.sigma_p * self.sigma_p)).exp()
    }

    /// Classical solution: the initial density transported back along the rotation.
    pub fn exact(&self, t: f64, q: f64, p: f64) -> f64 {
        let (s, c) = (self.omega * t).sin_cos();
        let mw = self.mass * self.omega;
        self.initial(q * c - p / mw * s, mw * q * s + p * c)
    }

    pub fn solve(&self, filters: Arc<FilterPair>) -> Result<(ModeCatalog, GalerkinSystem, Solution)> {
        let catalog = self.catalog(filters)?;
        let b0 = catalog.project_spatial(&|x| self.initial(x[1], x[2]));
        let system = assemble(&self.operator(), &catalog, Some(&InitialData { coefficients: vec![b0] }))?;
        let solution = solve(&system)?;
        Ok((catalog, system, solution))
    }
}
