use super::filters::FilterPair;
use crate::error::{Error, Result};
use crate::linalg::least_squares;

/// Stencil `r_ℓ` for `ℓ ∈ [−(L−2), L−2]`; `(D f)_k = Σ_ℓ r_ℓ f_{k−ℓ} / h^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoefficients {
    pub derivative_order: usize,
    /// Offset of `coefficients[0]`, i.e. `−(L−2)`.
    pub first: isize,
    pub coefficients: Vec<f64>,
}

impl ConnectionCoefficients {
    pub fn offsets(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        self.coefficients.iter().enumerate().map(move |(i, &r)| (self.first + i as isize, r))
    }

    pub fn get(&self, ell: isize) -> f64 {
        let i = ell - self.first;
        if i < 0 || i as usize >= self.coefficients.len() {
            0.0
        } else {
            self.coefficients[i as usize]
        }
    }
}

/// Solves `r_ℓ = 2^n Σ_{a,b} h_a h_b r_{2ℓ+a−b}` with `Σ_ℓ (−ℓ)^n r_ℓ = n!`.
pub fn connection_coeffs(f: &FilterPair, derivative_order: usize) -> Result<ConnectionCoefficients> {
    let n = derivative_order;
    if n == 0 {
        return Err(Error::InvalidArgument("derivative order must be at least 1".into()));
    }
    if f.vanishing_moments < n + 1 {
        return Err(Error::InsufficientSmoothness { order: n, required: n + 1, available: f.vanishing_moments });
    }
    let l = f.len() as isize;
    let reach = l - 2;
    let size = (2 * reach + 1) as usize;
    let scale = (1u64 << n) as f64;
    let mut a = vec![0.0; (size + 1) * size];
    for (row, ell) in (-reach..=reach).enumerate() {
        for ia in 0..l {
            for ib in 0..l {
                let m = 2 * ell + ia - ib;
                if (-reach..=reach).contains(&m) {
                    a[row * size + (m + reach) as usize] += scale * f.lowpass[ia as usize] * f.lowpass[ib as usize];
                }
            }
        }
        a[row * size + row] -= 1.0;
    }
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    for (col, ell) in (-reach..=reach).enumerate() {
        a[size * size + col] = (-ell as f64).powi(n as i32);
    }
    let mut b = vec![0.0; size + 1];
    b[size] = factorial;
    let coefficients = least_squares(&a, size + 1, size, &b)?;
    Ok(ConnectionCoefficients { derivative_order: n, first: -reach, coefficients })
}
