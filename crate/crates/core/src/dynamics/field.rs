use ndarray::Array2;

use super::grid::PhaseSpaceGrid;
use crate::error::{Error, Result};
use crate::operator::PolynomialPotential;

/// Whether unit normalisation is part of the field's contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// A quasi-probability distribution with ∫∫W = 1.
    Distribution,
    /// A raw synthesized pattern; no normalisation implied.
    Pattern,
}

/// `W(q_i, p_j)` stored as an `n_q × n_p` array (rows are q).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    pub grid: PhaseSpaceGrid,
    pub values: Array2<f64>,
    pub hbar: f64,
    pub mass: f64,
    pub time: f64,
    pub kind: FieldKind,
}

impl WignerField {
    pub fn new(grid: PhaseSpaceGrid, values: Array2<f64>, hbar: f64, mass: f64, kind: FieldKind) -> Result<Self> {
        if values.dim() != (grid.n_q, grid.n_p) {
            return Err(Error::GridMismatch(format!(
                "values {:?} do not match grid {}x{}",
                values.dim(),
                grid.n_q,
                grid.n_p
            )));
        }
        if !(hbar >= 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!("hbar {hbar} must be finite and non-negative")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass {mass} must be positive")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("field has non-finite values".into()));
        }
        Ok(Self { grid, values, hbar, mass, time: 0.0, kind })
    }

    /// Samples `f(q, p)` at the cell centres.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(
        grid: PhaseSpaceGrid,
        hbar: f64,
        mass: f64,
        kind: FieldKind,
        f: F,
    ) -> Result<Self> {
        let values = Array2::from_shape_fn((grid.n_q, grid.n_p), |(i, j)| f(grid.q(i), grid.p(j)));
        Self::new(grid, values, hbar, mass, kind)
    }

    /// Normalised Gaussian `exp(−(q−q0)²/2σ_q² − (p−p0)²/2σ_p²) / (2π σ_q σ_p)`.
    #[allow(clippy::too_many_arguments)]
    pub fn gaussian(
        grid: PhaseSpaceGrid,
        hbar: f64,
        mass: f64,
        q0: f64,
        p0: f64,
        sigma_q: f64,
        sigma_p: f64,
    ) -> Result<Self> {
        let norm = 1.0 / (2.0 * std::f64::consts::PI * sigma_q * sigma_p);
        Self::from_fn(grid, hbar, mass, FieldKind::Distribution, |q, p| {
            norm * (-(q - q0).powi(2) / (2.0 * sigma_q * sigma_q) - (p - p0).powi(2) / (2.0 * sigma_p * sigma_p)).exp()
        })
    }

    pub fn integral(&self) -> f64 {
        self.values.sum() * self.grid.cell_area()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    /// `∫∫ (p²/2m + U(q)) W`.
    pub fn energy(&self, u: &PolynomialPotential) -> f64 {
        let q = self.grid.q_points();
        let p = self.grid.p_points();
        let mut e = 0.0;
        for (i, row) in self.values.outer_iter().enumerate() {
            let uq = u.eval(q[i]);
            for (j, &w) in row.iter().enumerate() {
                e += (p[j] * p[j] / (2.0 * self.mass) + uq) * w;
            }
        }
        e * self.grid.cell_area()
    }

    /// `(⟨q⟩, ⟨p⟩, ⟨q²⟩, ⟨p²⟩)` normalised by the field integral.
    pub fn moments(&self) -> [f64; 4] {
        let q = self.grid.q_points();
        let p = self.grid.p_points();
        let mut m = [0.0; 5];
        for (i, row) in self.values.outer_iter().enumerate() {
            for (j, &w) in row.iter().enumerate() {
                m[0] += w;
                m[1] += q[i] * w;
                m[2] += p[j] * w;
                m[3] += q[i] * q[i] * w;
                m[4] += p[j] * p[j] * w;
            }
        }
        [m[1] / m[0], m[2] / m[0], m[3] / m[0], m[4] / m[0]]
    }

    /// Position marginal `∫ W dp`.
    pub fn q_marginal(&self) -> Vec<f64> {
        let hp = self.grid.h_p();
        self.values.outer_iter().map(|r| r.sum() * hp).collect()
    }

    /// `(2πℏ) ∫∫ W²`.
    pub fn purity(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar * self.l2_norm().powi(2)
    }

    /// Ratio of the largest boundary magnitude to the peak magnitude.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        let (nq, np) = self.values.dim();
        let mut edge = 0.0f64;
        for i in 0..nq {
            edge = edge.max(self.values[[i, 0]].abs()).max(self.values[[i, np - 1]].abs());
        }
        for j in 0..np {
            edge = edge.max(self.values[[0, j]].abs()).max(self.values[[nq - 1, j]].abs());
        }
        edge / peak
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_normalised() {
        let g = PhaseSpaceGrid::symmetric(8.0, 8.0, 128).unwrap();
        let w = WignerField::gaussian(g, 1.0, 1.0, 0.5, -0.3, 1.0, 0.8).unwrap();
        assert!((w.integral() - 1.0).abs() < 1e-10);
        let m = w.moments();
        assert!((m[0] - 0.5).abs() < 1e-10 && (m[1] + 0.3).abs() < 1e-10);
    }

    #[test]
    fn shape_checked() {
        let g = PhaseSpaceGrid::symmetric(1.0, 1.0, 8).unwrap();
        assert!(matches!(
            WignerField::new(g, Array2::zeros((8, 4)), 1.0, 1.0, FieldKind::Pattern),
            Err(Error::GridMismatch(_))
        ));
        assert!(WignerField::new(g, Array2::zeros((8, 8)), 1.0, -1.0, FieldKind::Pattern).is_err());
    }
}
