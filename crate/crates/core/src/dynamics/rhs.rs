use ndarray::Array2;
use rayon::prelude::*;

use super::field::WignerField;
use crate::error::{Error, Result};
use crate::operator::{DerivativeStencil, PolynomialPotential};
use crate::wavelet::WaveletBasis;

/// Highest Moyal order `ℓ_max` kept in the odd-derivative series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// `ℓ_max = ⌊(deg U − 1)/2⌋`, where the series terminates exactly.
    Auto,
    Terms(usize),
}

impl Truncation {
    pub fn resolve(self, u: &PolynomialPotential) -> usize {
        match self {
            Truncation::Auto => u.moyal_termination(),
            Truncation::Terms(l) => l,
        }
    }
}

/// Friction rate γ and momentum diffusion D.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LindbladParams {
    pub gamma: f64,
    pub diffusion: f64,
}

impl LindbladParams {
    pub fn new(gamma: f64, diffusion: f64) -> Result<Self> {
        if !(gamma >= 0.0 && diffusion >= 0.0 && gamma.is_finite() && diffusion.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma {gamma} and D {diffusion} must be non-negative")));
        }
        Ok(Self { gamma, diffusion })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RhsKind {
    Liouville,
    Moyal(Truncation),
    Lindblad(Truncation, LindbladParams),
}

/// `(−1)^ℓ (ℏ/2)^{2ℓ} / (2ℓ+1)!`
pub fn moyal_coefficient(hbar: f64, ell: usize) -> f64 {
    let sign = if ell.is_multiple_of(2) { 1.0 } else { -1.0 };
    let fact: f64 = (1..=2 * ell + 1).map(|k| k as f64).product();
    sign * (0.5 * hbar).powi(2 * ell as i32) / fact
}

/// Right-hand-side assembler bound to one first-derivative stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceRhs {
    pub stencil: DerivativeStencil,
}

impl Default for PhaseSpaceRhs {
    fn default() -> Self {
        Self::wavelet(&WaveletBasis::dynamics_default()).expect("daubechies-3 has a derivative stencil")
    }
}

impl PhaseSpaceRhs {
    pub fn wavelet(basis: &WaveletBasis) -> Result<Self> {
        Ok(Self { stencil: DerivativeStencil::wavelet(&basis.filters)? })
    }

    pub fn finite_difference() -> Self {
        Self { stencil: DerivativeStencil::centered_difference() }
    }

    /// `∂_q W` along axis 0.
    pub fn d_q(&self, w: &Array2<f64>, h: f64) -> Array2<f64> {
        let (nq, np) = w.dim();
        let src = w.as_slice().expect("standard layout");
        let mut out = vec![0.0; nq * np];
        let inv = 1.0 / h;
        out.par_chunks_mut(np).enumerate().for_each(|(i, row)| {
            for (l, r) in self.stencil.taps() {
                if r == 0.0 {
                    continue;
                }
                let k = (i as isize - l).rem_euclid(nq as isize) as usize;
                for (o, &v) in row.iter_mut().zip(&src[k * np..(k + 1) * np]) {
                    *o += r * v;
                }
            }
            row.iter_mut().for_each(|o| *o *= inv);
        });
        Array2::from_shape_vec((nq, np), out).expect("shape")
    }

    /// `∂_p^order W` along axis 1 by repeated stencil application.
    pub fn d_p(&self, w: &Array2<f64>, h: f64, order: usize) -> Array2<f64> {
        let (nq, np) = w.dim();
        let mut out = w.as_standard_layout().to_owned();
        out.as_slice_mut()
            .expect("standard layout")
            .par_chunks_mut(np)
            .for_each(|row| {
                let mut tmp = vec![0.0; np];
                for _ in 0..order {
                    self.stencil.apply(row, h, &mut tmp);
                    row.copy_from_slice(&tmp);
                }
            });
        debug_assert_eq!(out.dim(), (nq, np));
        out
    }

    fn check(&self, w: &WignerField) -> Result<()> {
        if w.values.dim() != (w.grid.n_q, w.grid.n_p) {
            return Err(Error::GridMismatch("field shape differs from its grid".into()));
        }
        Ok(())
    }

    /// Term ℓ of the Moyal series: `c_ℓ U^{(2ℓ+1)}(q) ∂_p^{2ℓ+1} W` (ℓ = 0 is the force term).
    pub fn moyal_term(&self, w: &WignerField, u: &PolynomialPotential, ell: usize) -> Result<Array2<f64>> {
        self.check(w)?;
        let du = u.derivative(2 * ell + 1);
        if du.is_zero() {
            return Ok(Array2::zeros(w.values.dim()));
        }
        let c = moyal_coefficient(w.hbar, ell);
        let mut d = self.d_p(&w.values, w.grid.h_p(), 2 * ell + 1);
        for (i, mut row) in d.outer_iter_mut().enumerate() {
            let f = c * du.eval(w.grid.q(i));
            row.iter_mut().for_each(|v| *v *= f);
        }
        Ok(d)
    }

    /// `−(p/m) ∂_q W`.
    pub fn streaming(&self, w: &WignerField) -> Result<Array2<f64>> {
        self.check(w)?;
        let mut d = self.d_q(&w.values, w.grid.h_q());
        let p = w.grid.p_points();
        let inv_m = 1.0 / w.mass;
        for mut row in d.outer_iter_mut() {
            for (v, pj) in row.iter_mut().zip(&p) {
                *v *= -pj * inv_m;
            }
        }
        Ok(d)
    }

    pub fn liouville(&self, w: &WignerField, u: &PolynomialPotential) -> Result<Array2<f64>> {
        let mut rate = self.streaming(w)?;
        if !u.derivative(1).is_zero() {
            rate += &self.moyal_term(w, u, 0)?;
        }
        Ok(rate)
    }

    pub fn moyal(&self, w: &WignerField, u: &PolynomialPotential, t: Truncation) -> Result<Array2<f64>> {
        let mut rate = self.liouville(w, u)?;
        if w.hbar > 0.0 {
            for ell in 1..=t.resolve(u) {
                if !u.derivative(2 * ell + 1).is_zero() {
                    rate += &self.moyal_term(w, u, ell)?;
                }
            }
        }
        Ok(rate)
    }

    /// `2γ ∂_p (p W)`.
    pub fn friction(&self, w: &WignerField, gamma: f64) -> Array2<f64> {
        let mut pw = w.values.clone();
        let p = w.grid.p_points();
        for mut row in pw.outer_iter_mut() {
            for (v, pj) in row.iter_mut().zip(&p) {
                *v *= pj;
            }
        }
        let mut d = self.d_p(&pw, w.grid.h_p(), 1);
        d.iter_mut().for_each(|v| *v *= 2.0 * gamma);
        d
    }

    /// `D ∂_p² W`.
    pub fn diffusion(&self, w: &WignerField, diffusion: f64) -> Array2<f64> {
        let mut d = self.d_p(&w.values, w.grid.h_p(), 2);
        d.iter_mut().for_each(|v| *v *= diffusion);
        d
    }

    pub fn lindblad(
        &self,
        w: &WignerField,
        u: &PolynomialPotential,
        params: LindbladParams,
        t: Truncation,
    ) -> Result<Array2<f64>> {
        let mut rate = self.moyal(w, u, t)?;
        if params.gamma != 0.0 {
            rate += &self.friction(w, params.gamma);
        }
        if params.diffusion != 0.0 {
            rate += &self.diffusion(w, params.diffusion);
        }
        Ok(rate)
    }

    pub fn rate(&self, w: &WignerField, u: &PolynomialPotential, kind: &RhsKind) -> Result<Array2<f64>> {
        match kind {
            RhsKind::Liouville => self.liouville(w, u),
            RhsKind::Moyal(t) => self.moyal(w, u, *t),
            RhsKind::Lindblad(t, p) => self.lindblad(w, u, *p, *t),
        }
    }
}

/// `{H, W} = −(p/m) ∂_q W + U′(q) ∂_p W` with the default wavelet stencil.
pub fn liouville_rhs(w: &WignerField, u: &PolynomialPotential) -> Result<Array2<f64>> {
    PhaseSpaceRhs::default().liouville(w, u)
}

/// Liouville term plus `Σ_{ℓ=1}^{ℓ_max} (−1)^ℓ (ℏ/2)^{2ℓ}/(2ℓ+1)! U^{(2ℓ+1)} ∂_p^{2ℓ+1} W`.
pub fn moyal_rhs(w: &WignerField, u: &PolynomialPotential, t: Truncation) -> Result<Array2<f64>> {
    PhaseSpaceRhs::default().moyal(w, u, t)
}

/// Moyal rate plus `2γ ∂_p(pW) + D ∂_p² W`.
pub fn lindblad_wigner_rhs(
    w: &WignerField,
    u: &PolynomialPotential,
    params: LindbladParams,
    t: Truncation,
) -> Result<Array2<f64>> {
    PhaseSpaceRhs::default().lindblad(w, u, params, t)
}
