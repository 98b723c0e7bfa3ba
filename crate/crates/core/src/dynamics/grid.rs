use crate::error::{Error, Result};
use crate::mra::log2_exact;

/// Periodic cell-centred box: `q_i = q_min + (i + ½) h_q`, `p_j = p_min + (j + ½) h_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_q: usize,
    pub n_p: usize,
}

impl PhaseSpaceGrid {
    pub fn new(q: (f64, f64), p: (f64, f64), n_q: usize, n_p: usize) -> Result<Self> {
        if log2_exact(n_q).is_none() || log2_exact(n_p).is_none() {
            return Err(Error::InvalidGrid(format!("counts {n_q}x{n_p} must be powers of two")));
        }
        if !(q.1 > q.0) || !(p.1 > p.0) || ![q.0, q.1, p.0, p.1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid(format!("bounds q {q:?}, p {p:?} must be finite and increasing")));
        }
        Ok(Self { q_min: q.0, q_max: q.1, p_min: p.0, p_max: p.1, n_q, n_p })
    }

    /// Symmetric square box `[−half, half]²`.
    pub fn symmetric(half_q: f64, half_p: f64, n: usize) -> Result<Self> {
        Self::new((-half_q, half_q), (-half_p, half_p), n, n)
    }

    /// The momentum grid on which the lag transform of a wavefunction is exactly
    /// marginal-preserving: `n_p = n_q`, `h_p = π ℏ / (n_q h_q)`, centred on zero.
    pub fn wigner_native(q: (f64, f64), n_q: usize, hbar: f64) -> Result<Self> {
        let h_q = (q.1 - q.0) / n_q as f64;
        let half = 0.5 * n_q as f64 * std::f64::consts::PI * hbar / (n_q as f64 * h_q);
        Self::new(q, (-half, half), n_q, n_q)
    }

    pub fn h_q(&self) -> f64 {
        (self.q_max - self.q_min) / self.n_q as f64
    }

    pub fn h_p(&self) -> f64 {
        (self.p_max - self.p_min) / self.n_p as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.h_q() * self.h_p()
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q_min + (i as f64 + 0.5) * self.h_q()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + (j as f64 + 0.5) * self.h_p()
    }

    pub fn q_points(&self) -> Vec<f64> {
        (0..self.n_q).map(|i| self.q(i)).collect()
    }

    pub fn p_points(&self) -> Vec<f64> {
        (0..self.n_p).map(|j| self.p(j)).collect()
    }

    pub fn same_as(&self, other: &Self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
        self.n_q == other.n_q
            && self.n_p == other.n_p
            && close(self.q_min, other.q_min)
            && close(self.q_max, other.q_max)
            && close(self.p_min, other.p_min)
            && close(self.p_max, other.p_max)
    }
}
