use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{FieldKind, PhaseSpaceGrid, WignerField};
use crate::error::{Error, Result};
use crate::mra::log2_exact;

/// Complex amplitudes on the cell centres of a periodic q-box, with ∫|ψ|² = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub amplitudes: Vec<Complex64>,
    pub hbar: f64,
    pub mass: f64,
}

impl WavefunctionGrid {
    pub fn new(q: (f64, f64), amplitudes: Vec<Complex64>, hbar: f64, mass: f64) -> Result<Self> {
        let n = amplitudes.len();
        log2_exact(n).ok_or(Error::NonDyadicLength(n))?;
        if !(q.1 > q.0) || !(hbar > 0.0) || !(mass > 0.0) {
            return Err(Error::InvalidArgument("box must be increasing, hbar and mass positive".into()));
        }
        let psi = Self { q_min: q.0, q_max: q.1, amplitudes, hbar, mass };
        let norm = psi.norm_squared();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(psi)
    }

    /// Samples `f` at the cell centres and rescales to unit norm.
    pub fn from_fn<F: Fn(f64) -> Complex64>(q: (f64, f64), n: usize, hbar: f64, mass: f64, f: F) -> Result<Self> {
        log2_exact(n).ok_or(Error::NonDyadicLength(n))?;
        let h = (q.1 - q.0) / n as f64;
        let raw: Vec<Complex64> = (0..n).map(|i| f(q.0 + (i as f64 + 0.5) * h)).collect();
        let norm = (raw.iter().map(|c| c.norm_sqr()).sum::<f64>() * h).sqrt();
        if !(norm > 0.0) {
            return Err(Error::EmptyField);
        }
        Self::new(q, raw.into_iter().map(|c| c / norm).collect(), hbar, mass)
    }

    /// Harmonic-oscillator ground state centred at `(q0, p0)`.
    pub fn coherent(q: (f64, f64), n: usize, hbar: f64, mass: f64, omega: f64, q0: f64, p0: f64) -> Result<Self> {
        let a = mass * omega / hbar;
        Self::from_fn(q, n, hbar, mass, |x| {
            Complex64::from_polar((-0.5 * a * (x - q0).powi(2)).exp(), p0 * x / hbar)
        })
    }

    /// Even cat state `∝ ψ_{+q0} + ψ_{−q0}` of two ground-state Gaussians.
    pub fn even_cat(q: (f64, f64), n: usize, hbar: f64, mass: f64, omega: f64, q0: f64) -> Result<Self> {
        let a = mass * omega / hbar;
        Self::from_fn(q, n, hbar, mass, |x| {
            Complex64::new((-0.5 * a * (x - q0).powi(2)).exp() + (-0.5 * a * (x + q0).powi(2)).exp(), 0.0)
        })
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn h(&self) -> f64 {
        (self.q_max - self.q_min) / self.len() as f64
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.h()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// `W(q_i, p) = (h / πℏ) Σ_k e^{−2ipkh/ℏ} ψ*_{i−k} ψ_{i+k}` over every lag keeping both
/// points in the box.
///
/// Amplitudes outside the box are zero, so no mirror fringes appear at the box edge. Lags
/// stay below `n/2`, well inside the alias period `n` of the native momentum grid
/// ([`PhaseSpaceGrid::wigner_native`]), on which the position marginal is therefore exact.
pub fn wigner_from_wavefunction(psi: &WavefunctionGrid, p_axis: (f64, f64, usize), hbar: f64) -> Result<WignerField> {
    let (p_min, p_max, n_p) = p_axis;
    if log2_exact(n_p).is_none() {
        return Err(Error::NonDyadicPGrid(n_p));
    }
    if !(hbar > 0.0) || (hbar - psi.hbar).abs() > 1e-12 * psi.hbar {
        return Err(Error::InconsistentHbar { wavefunction: psi.hbar, requested: hbar });
    }
    let n = psi.len();
    let grid = PhaseSpaceGrid::new((psi.q_min, psi.q_max), (p_min, p_max), n, n_p)?;
    let h = psi.h();
    let pref = h / (std::f64::consts::PI * hbar);
    let p = grid.p_points();
    let amp = &psi.amplitudes;
    let mut values = vec![0.0; n * n_p];
    let mut worst_imag = 0.0f64;
    let imag: Vec<f64> = values
        .par_chunks_mut(n_p)
        .enumerate()
        .map(|(i, row)| {
            let i = i as isize;
            let reach = i.min(n as isize - 1 - i);
            let lags: Vec<(f64, Complex64)> = (-reach..=reach)
                .map(|k| (k as f64, amp[(i - k) as usize].conj() * amp[(i + k) as usize]))
                .collect();
            let mut worst = 0.0f64;
            for (j, out) in row.iter_mut().enumerate() {
                let s: Complex64 = lags
                    .iter()
                    .map(|&(k, c)| c * Complex64::from_polar(1.0, -2.0 * p[j] * k * h / hbar))
                    .sum();
                *out = pref * s.re;
                worst = worst.max((pref * s.im).abs());
            }
            worst
        })
        .collect();
    for v in imag {
        worst_imag = worst_imag.max(v);
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if worst_imag > 1e-10 * peak.max(1.0) {
        log::warn!("Wigner transform imaginary residue {worst_imag:.2e} discarded");
    }
    let w = WignerField::new(
        grid,
        Array2::from_shape_vec((n, n_p), values).expect("shape"),
        hbar,
        psi.mass,
        FieldKind::Distribution,
    )?;
    if w.boundary_ratio() > 1e-12 {
        log::warn!("state reaches the box boundary (edge/peak = {:.2e})", w.boundary_ratio());
    }
    Ok(w)
}
