use super::filters::{FilterPair, Family};
use crate::error::{Error, Result};
use crate::linalg::least_squares;

/// φ and ψ sampled at `k / 2^level` for `k = 0..=(L−1)·2^level`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSamples {
    pub level: usize,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

impl ScalingSamples {
    /// Support length `L − 1` in units of x.
    pub fn support(&self) -> usize {
        (self.phi.len() - 1) >> self.level
    }

    pub fn step(&self) -> f64 {
        1.0 / (1u64 << self.level) as f64
    }

    /// Σ_k φ(x − k) at `x = m / 2^level` for `m = 0..2^level`.
    pub fn partition_of_unity(&self) -> Vec<f64> {
        let per = 1usize << self.level;
        (0..per)
            .map(|m| self.phi.iter().skip(m).step_by(per).sum())
            .collect()
    }
}

/// Values of φ at the integers: the eigenvector of `M[i][j] = √2 h[2i − j]` for eigenvalue 1,
/// normalised to Σ φ(k) = 1.
fn integer_values(f: &FilterPair) -> Result<Vec<f64>> {
    let l = f.len();
    if f.family == Family::Haar || l == 2 {
        return Ok(vec![1.0, 0.0]);
    }
    let n = l;
    let s2 = std::f64::consts::SQRT_2;
    let mut a = vec![0.0; (n + 1) * n];
    for i in 0..n {
        for j in 0..n {
            let k = 2 * i as isize - j as isize;
            let m = if (0..l as isize).contains(&k) { s2 * f.lowpass[k as usize] } else { 0.0 };
            a[i * n + j] = m - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[n * n + j] = 1.0;
    }
    let mut b = vec![0.0; n + 1];
    b[n] = 1.0;
    least_squares(&a, n + 1, n, &b)
}

/// Iterated refinement φ(x) = √2 Σ h_k φ(2x − k), ψ(x) = √2 Σ g_k φ(2x − k).
pub fn cascade_eval(f: &FilterPair, level: usize) -> Result<ScalingSamples> {
    if level < 1 {
        return Err(Error::InvalidArgument("cascade level must be at least 1".into()));
    }
    let l = f.len();
    let s2 = std::f64::consts::SQRT_2;
    let mut cur = integer_values(f)?;
    for lev in 1..=level {
        let n = (l - 1) * (1 << lev) + 1;
        let half = 1usize << (lev - 1);
        cur = (0..n)
            .map(|m| {
                let acc: f64 = (0..l)
                    .filter_map(|k| m.checked_sub(k * half).filter(|&i| i < cur.len()).map(|i| f.lowpass[k] * cur[i]))
                    .sum();
                s2 * acc
            })
            .collect();
    }
    let per = 1usize << level;
    let psi = (0..cur.len())
        .map(|m| {
            let acc: f64 = (0..l)
                .filter_map(|k| (2 * m).checked_sub(k * per).filter(|&i| i < cur.len()).map(|i| f.highpass[k] * cur[i]))
                .sum();
            s2 * acc
        })
        .collect();
    Ok(ScalingSamples { level, phi: cur, psi })
}
