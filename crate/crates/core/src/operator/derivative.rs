use ndarray::Array2;

use super::ns_form::DenseOperator;
use super::potential::PolynomialPotential;
use crate::error::{Error, Result};
use crate::mra::log2_exact;
use crate::wavelet::{connection_coeffs, FilterPair};

/// First-derivative stencil `(D f)_k = Σ_ℓ w_ℓ f_{k−ℓ} / h` with periodic wrap.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeStencil {
    pub first: isize,
    pub weights: Vec<f64>,
}

impl DerivativeStencil {
    pub fn wavelet(f: &FilterPair) -> Result<Self> {
        let c = connection_coeffs(f, 1)?;
        Ok(Self { first: c.first, weights: c.coefficients })
    }

    /// Second-order centred difference `(f_{k+1} − f_{k−1}) / 2h`.
    pub fn centered_difference() -> Self {
        Self { first: -1, weights: vec![0.5, 0.0, -0.5] }
    }

    pub fn taps(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        self.weights.iter().enumerate().map(move |(i, &w)| (self.first + i as isize, w))
    }

    /// `max_θ |Σ_ℓ w_ℓ e^{−iℓθ}|`, the spectral radius of the unit-spacing stencil.
    pub fn spectral_radius(&self) -> f64 {
        (0..=1024)
            .map(|s| {
                let theta = std::f64::consts::PI * s as f64 / 1024.0;
                let (re, im) = self.taps().fold((0.0, 0.0), |(re, im), (l, w)| {
                    (re + w * (l as f64 * theta).cos(), im - w * (l as f64 * theta).sin())
                });
                re.hypot(im)
            })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, f: &[f64], h: f64, out: &mut [f64]) {
        let n = f.len() as isize;
        let inv = 1.0 / h;
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (l, w) in self.taps() {
                acc += w * f[(k as isize - l).rem_euclid(n) as usize];
            }
            *o = acc * inv;
        }
    }
}

/// Circulant `∂^m` as the m-fold composition of a first-derivative stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeOperator {
    pub stencil: DerivativeStencil,
    pub size: usize,
    pub order: usize,
    pub spacing: f64,
}

impl DerivativeOperator {
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.size {
            return Err(Error::LengthMismatch { expected: self.size, got: v.len() });
        }
        let mut cur = v.to_vec();
        let mut next = vec![0.0; self.size];
        for _ in 0..self.order {
            self.stencil.apply(&cur, self.spacing, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// Dense matrix whose column `j` is the operator applied to `e_j`.
    pub fn to_dense(&self) -> DenseOperator {
        let n = self.size;
        let mut m = Array2::zeros((n, n));
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.apply(&e).expect("length matches");
            e[j] = 0.0;
            for i in 0..n {
                m[[i, j]] = col[i];
            }
        }
        DenseOperator::new(m).expect("dyadic size")
    }
}

pub fn derivative_operator(f: &FilterPair, size: usize, order: usize, spacing: f64) -> Result<DerivativeOperator> {
    log2_exact(size).ok_or(Error::NonDyadicSize(size))?;
    if order == 0 {
        return Err(Error::InvalidArgument("derivative order must be at least 1".into()));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidArgument(format!("spacing {spacing} must be positive")));
    }
    Ok(DerivativeOperator { stencil: DerivativeStencil::wavelet(f)?, size, order, spacing })
}

/// Diagonal operator `diag(U^{(k)}(q_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    pub diagonal: Vec<f64>,
}

impl DiagonalOperator {
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.diagonal.len() {
            return Err(Error::LengthMismatch { expected: self.diagonal.len(), got: v.len() });
        }
        Ok(self.diagonal.iter().zip(v).map(|(d, x)| d * x).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.diagonal.iter().all(|&d| d == 0.0)
    }
}

pub fn multiplication_operator(poly: &PolynomialPotential, k: usize, points: &[f64]) -> DiagonalOperator {
    let d = poly.derivative(k);
    DiagonalOperator { diagonal: points.iter().map(|&q| d.eval(q)).collect() }
}
