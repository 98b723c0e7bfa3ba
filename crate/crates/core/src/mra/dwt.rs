use crate::error::{Error, Result};
use crate::wavelet::FilterPair;

pub(crate) fn log2_exact(n: usize) -> Option<usize> {
    (n > 0 && n.is_power_of_two()).then(|| n.trailing_zeros() as usize)
}

/// One periodic analysis step: `a_k = Σ h_m x_{(2k+m) mod n}`, `d_k = Σ g_m x_{(2k+m) mod n}`.
pub fn analysis_step(x: &[f64], f: &FilterPair, approx: &mut [f64], detail: &mut [f64]) {
    let n = x.len();
    let half = n / 2;
    for k in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for (m, (&h, &g)) in f.lowpass.iter().zip(&f.highpass).enumerate() {
            let v = x[(2 * k + m) % n];
            a += h * v;
            d += g * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

/// Adjoint of [`analysis_step`]: `x_{(2k+m) mod 2n} += h_m a_k + g_m d_k`.
pub fn synthesis_step(approx: &[f64], detail: &[f64], f: &FilterPair, out: &mut [f64]) {
    let n = out.len();
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..approx.len() {
        let (a, d) = (approx[k], detail[k]);
        for (m, (&h, &g)) in f.lowpass.iter().zip(&f.highpass).enumerate() {
            out[(2 * k + m) % n] += h * a + g * d;
        }
    }
}

/// Coarse block plus detail arrays ordered coarse to fine.
#[derive(Debug, Clone, PartialEq)]
pub struct MraCoefficients {
    pub coarse: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    pub length: usize,
}

impl MraCoefficients {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// `[coarse, D_0, D_1, …]` concatenated (the standard 1-D layout).
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.coarse.clone();
        for d in &self.details {
            v.extend_from_slice(d);
        }
        v
    }

    pub fn from_flat(flat: &[f64], levels: usize) -> Result<Self> {
        let n = flat.len();
        let m = log2_exact(n).ok_or(Error::NonDyadicLength(n))?;
        if levels > m {
            return Err(Error::TooManyLevels { levels, max: m });
        }
        let c = n >> levels;
        let mut details = Vec::with_capacity(levels);
        let mut pos = c;
        let mut len = c;
        for _ in 0..levels {
            details.push(flat[pos..pos + len].to_vec());
            pos += len;
            len *= 2;
        }
        Ok(Self { coarse: flat[..c].to_vec(), details, length: n })
    }

    pub fn energy(&self) -> f64 {
        self.coarse.iter().chain(self.details.iter().flatten()).map(|v| v * v).sum()
    }
}

pub fn dwt_1d(signal: &[f64], f: &FilterPair, levels: usize) -> Result<MraCoefficients> {
    let n = signal.len();
    let m = log2_exact(n).ok_or(Error::NonDyadicLength(n))?;
    if levels > m {
        return Err(Error::TooManyLevels { levels, max: m });
    }
    let mut cur = signal.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let half = cur.len() / 2;
        let mut a = vec![0.0; half];
        let mut d = vec![0.0; half];
        analysis_step(&cur, f, &mut a, &mut d);
        details.push(d);
        cur = a;
    }
    details.reverse();
    Ok(MraCoefficients { coarse: cur, details, length: n })
}

pub fn idwt_1d(c: &MraCoefficients, f: &FilterPair) -> Result<Vec<f64>> {
    let mut cur = c.coarse.clone();
    if cur.is_empty() {
        return Err(Error::MalformedCoefficients("empty coarse block".into()));
    }
    for (j, d) in c.details.iter().enumerate() {
        if d.len() != cur.len() {
            return Err(Error::MalformedCoefficients(format!(
                "detail level {j} has {} entries, expected {}",
                d.len(),
                cur.len()
            )));
        }
        let mut out = vec![0.0; 2 * cur.len()];
        synthesis_step(&cur, d, f, &mut out);
        cur = out;
    }
    if cur.len() != c.length {
        return Err(Error::MalformedCoefficients(format!(
            "reconstructed length {} differs from recorded {}",
            cur.len(),
            c.length
        )));
    }
    Ok(cur)
}

/// Full-depth synthesis of the flat layout `[a, d_0, d_1(2), d_2(4), …]`.
pub fn idwt_flat_full(flat: &[f64], f: &FilterPair) -> Result<Vec<f64>> {
    let n = flat.len();
    let m = log2_exact(n).ok_or(Error::NonDyadicLength(n))?;
    idwt_1d(&MraCoefficients::from_flat(flat, m)?, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::{build_filter_pair, Family};

    #[test]
    fn errors() {
        let f = build_filter_pair(Family::Haar, 1).unwrap();
        assert_eq!(dwt_1d(&[1.0; 6], &f, 1), Err(Error::NonDyadicLength(6)));
        assert_eq!(dwt_1d(&[1.0; 8], &f, 4), Err(Error::TooManyLevels { levels: 4, max: 3 }));
        let bad = MraCoefficients { coarse: vec![1.0], details: vec![vec![1.0, 2.0]], length: 2 };
        assert!(matches!(idwt_1d(&bad, &f), Err(Error::MalformedCoefficients(_))));
    }

    #[test]
    fn haar_unit_coarse_is_constant_block() {
        let f = build_filter_pair(Family::Haar, 1).unwrap();
        let c = MraCoefficients { coarse: vec![1.0, 0.0], details: vec![vec![0.0; 2], vec![0.0; 4]], length: 8 };
        let x = idwt_1d(&c, &f).unwrap();
        for (i, v) in x.iter().enumerate() {
            let want = if i < 4 { 0.5 } else { 0.0 };
            assert!((v - want).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_coefficients_give_zero_signal() {
        let f = build_filter_pair(Family::Symmlet, 8).unwrap();
        let c = dwt_1d(&[0.0; 64], &f, 3).unwrap();
        assert!(idwt_1d(&c, &f).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn flat_layout_round_trip() {
        let f = build_filter_pair(Family::Daubechies, 2).unwrap();
        let x: Vec<f64> = (0..32).map(|i| (i as f64 * 0.3).cos()).collect();
        let c = dwt_1d(&x, &f, 5).unwrap();
        let back = idwt_flat_full(&c.flatten(), &f).unwrap();
        assert!(x.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-13));
    }
}
