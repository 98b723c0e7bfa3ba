//! Dense linear algebra kernels: Householder least squares and blocked LU.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Minimises ‖A x − b‖₂ for a row-major `m × n` matrix with `m ≥ n` and full column rank.
pub fn least_squares(a: &[f64], m: usize, n: usize, b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != m * n || b.len() != m || m < n {
        return Err(Error::ShapeMismatch(format!(
            "least squares needs m >= n, got {m}x{n} with rhs {}",
            b.len()
        )));
    }
    let mut r = a.to_vec();
    let mut y = b.to_vec();
    let scale = r.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    for k in 0..n {
        let norm = (k..m).map(|i| r[i * n + k].powi(2)).sum::<f64>().sqrt();
        if norm <= 1e-14 * scale {
            return Err(Error::SingularSystem(f64::INFINITY));
        }
        let alpha = if r[k * n + k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r[i * n + k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * r[i * n + j]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                r[i * n + j] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * y[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            y[i] -= f * v[i - k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| r[k * n + j] * x[j]).sum();
        x[k] = (y[k] - s) / r[k * n + k];
    }
    Ok(x)
}

/// In-place LU factorisation `P A = L U` of a row-major square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

const PANEL: usize = 48;
const TILE: usize = 512;

impl Lu {
    /// Blocked right-looking factorisation with partial pivoting.
    pub fn factor(mut a: Vec<f64>, n: usize) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::ShapeMismatch(format!("LU needs {n}x{n}, got {} entries", a.len())));
        }
        let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::SingularSystem(f64::INFINITY));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut k0 = 0;
        while k0 < n {
            let kb = PANEL.min(n - k0);
            // panel factorisation on columns k0..k0+kb, swaps applied to full rows
            for k in k0..k0 + kb {
                let (mut piv, mut best) = (k, a[k * n + k].abs());
                for i in k + 1..n {
                    let v = a[i * n + k].abs();
                    if v > best {
                        best = v;
                        piv = i;
                    }
                }
                if best <= f64::EPSILON * scale * 1e-3 {
                    return Err(Error::SingularSystem(f64::INFINITY));
                }
                if piv != k {
                    for j in 0..n {
                        a.swap(k * n + j, piv * n + j);
                    }
                    perm.swap(k, piv);
                }
                let d = a[k * n + k];
                let (top, rest) = a.split_at_mut((k + 1) * n);
                let pivot_row = &top[k * n + k + 1..k * n + k0 + kb];
                rest.par_chunks_mut(n).for_each(|row| {
                    let l = row[k] / d;
                    row[k] = l;
                    if l != 0.0 {
                        for (x, &u) in row[k + 1..k0 + kb].iter_mut().zip(pivot_row) {
                            *x -= l * u;
                        }
                    }
                });
            }
            let k1 = k0 + kb;
            if k1 < n {
                // U12 = L11^{-1} A12
                for k in k0..k1 {
                    for i in k + 1..k1 {
                        let l = a[i * n + k];
                        if l != 0.0 {
                            let (top, bottom) = a.split_at_mut(i * n);
                            let src = &top[k * n + k1..k * n + n];
                            for (x, &u) in bottom[k1..n].iter_mut().zip(src) {
                                *x -= l * u;
                            }
                        }
                    }
                }
                // A22 -= L21 U12, tiled over columns so the U12 tile stays cached
                let (top, bottom) = a.split_at_mut(k1 * n);
                let u12 = &top[k0 * n..k1 * n];
                bottom.par_chunks_mut(n).for_each(|row| {
                    let mut c0 = k1;
                    while c0 < n {
                        let c1 = (c0 + TILE).min(n);
                        for p in 0..kb {
                            let l = row[k0 + p];
                            if l != 0.0 {
                                let src = &u12[p * n + c0..p * n + c1];
                                for (x, &u) in row[c0..c1].iter_mut().zip(src) {
                                    *x -= l * u;
                                }
                            }
                        }
                        c0 = c1;
                    }
                });
            }
            k0 = k1;
        }
        Ok(Self { n, lu: a, perm })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        // Uᵀ z = b
        let mut z = b.to_vec();
        for i in 0..n {
            z[i] /= self.lu[i * n + i];
            let zi = z[i];
            for (zj, u) in z[i + 1..].iter_mut().zip(&self.lu[i * n + i + 1..(i + 1) * n]) {
                *zj -= u * zi;
            }
        }
        // Lᵀ w = z
        for i in (0..n).rev() {
            let wi = z[i];
            for (zj, l) in z[..i].iter_mut().zip(&self.lu[i * n..i * n + i]) {
                *zj -= l * wi;
            }
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        x
    }

    /// Hager–Higham estimate of ‖A⁻¹‖₁.
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            let norm: f64 = y.iter().map(|v| v.abs()).sum();
            if norm <= est {
                break;
            }
            est = norm;
            let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&xi);
            let (jmax, zmax) = z
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |(bj, bv), (j, v)| if v.abs() > bv { (j, v.abs()) } else { (bj, bv) });
            let zx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= zx {
                break;
            }
            x = vec![0.0; n];
            x[jmax] = 1.0;
        }
        // alternative lower bound from the alternating-sign test vector
        let alt: Vec<f64> = (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * (1.0 + i as f64 / (n.max(2) - 1) as f64)
            })
            .collect();
        let y = self.solve(&alt);
        let alt_est = 2.0 * y.iter().map(|v| v.abs()).sum::<f64>() / (3.0 * n as f64);
        est.max(alt_est)
    }
}

pub fn norm1(a: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Row-major `y = A x`.
pub fn matvec(a: &[f64], n_rows: usize, n_cols: usize, x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), n_rows * n_cols);
    a.par_chunks(n_cols)
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

/// Row-major `C = A B` for `A: m×k`, `B: k×n`.
pub fn matmul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * n];
    c.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for p in 0..k {
            let l = a[i * k + p];
            if l != 0.0 {
                for (x, &u) in row.iter_mut().zip(&b[p * n..(p + 1) * n]) {
                    *x += l * u;
                }
            }
        }
    });
    debug_assert_eq!(c.len(), m * n);
    c
}

/// Kronecker product of row-major square matrices.
pub fn kron(a: &[f64], na: usize, b: &[f64], nb: usize) -> Vec<f64> {
    let n = na * nb;
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        let (i, k) = (r / nb, r % nb);
        for j in 0..na {
            let aij = a[i * na + j];
            if aij != 0.0 {
                for l in 0..nb {
                    row[j * nb + l] = aij * b[k * nb + l];
                }
            }
        }
    });
    out
}
