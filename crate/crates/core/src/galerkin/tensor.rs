//! Dense tensor helpers for sum-factorised contractions along one axis at a time.

use rayon::prelude::*;

/// `out[.., r, ..] = Σ_c mat[r, c] · data[.., c, ..]` along `axis`; `mat` is row-major
/// `rows × dims[axis]`.
pub(crate) fn apply_along(data: &[f64], dims: &[usize], axis: usize, mat: &[f64], rows: usize) -> Vec<f64> {
    let cols = dims[axis];
    debug_assert_eq!(mat.len(), rows * cols);
    debug_assert_eq!(data.len(), dims.iter().product::<usize>());
    let outer: usize = dims[..axis].iter().product();
    let inner: usize = dims[axis + 1..].iter().product();
    let mut out = vec![0.0; outer * rows * inner];
    out.par_chunks_mut(rows * inner).enumerate().for_each(|(o, block)| {
        let src = &data[o * cols * inner..(o + 1) * cols * inner];
        for r in 0..rows {
            let dst = &mut block[r * inner..(r + 1) * inner];
            for c in 0..cols {
                let w = mat[r * cols + c];
                if w != 0.0 {
                    for (d, s) in dst.iter_mut().zip(&src[c * inner..(c + 1) * inner]) {
                        *d += w * s;
                    }
                }
            }
        }
    });
    out
}

/// Cumulative integral `F_m = ∫_{t_0}^{t_m} f` for `m = 0..n` from samples `f_0..f_n` on a
/// uniform grid of spacing `h` (one sample more than the result).
///
/// Interior intervals use the centred four-point rule, the first a one-sided one, so
/// cubic integrands are integrated exactly.
pub(crate) fn cumulative_integral(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len() - 1;
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let c = h / 24.0;
    for m in 0..n - 1 {
        let step = if m == 0 {
            if f.len() < 4 {
                0.5 * h * (f[0] + f[1])
            } else {
                c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
            }
        } else {
            c * (-f[m - 1] + 13.0 * f[m] + 13.0 * f[m + 1] - f[m + 2])
        };
        out[m + 1] = out[m] + step;
    }
    out
}

/// [`cumulative_integral`] along `axis`, shrinking that dimension by one.
pub(crate) fn cumulative_along(data: &[f64], dims: &[usize], axis: usize, h: f64) -> Vec<f64> {
    let len = dims[axis];
    let outer: usize = dims[..axis].iter().product();
    let inner: usize = dims[axis + 1..].iter().product();
    let mut out = vec![0.0; outer * (len - 1) * inner];
    out.par_chunks_mut((len - 1) * inner).enumerate().for_each(|(o, block)| {
        let mut line = vec![0.0; len];
        for r in 0..inner {
            for (m, v) in line.iter_mut().enumerate() {
                *v = data[(o * len + m) * inner + r];
            }
            for (m, v) in cumulative_integral(&line, h).into_iter().enumerate() {
                block[m * inner + r] = v;
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_along_middle_axis() {
        // data dims (2, 3, 2), mat 1x3 of ones sums the middle axis
        let data: Vec<f64> = (0..12).map(|v| v as f64).collect();
        let out = apply_along(&data, &[2, 3, 2], 1, &[1.0, 1.0, 1.0], 1);
        assert_eq!(out, vec![6.0, 9.0, 24.0, 27.0]);
    }

    #[test]
    fn cumulative_is_exact_for_cubics() {
        let h = 0.1;
        let f: Vec<f64> = (0..=20).map(|m| (m as f64 * h).powi(3) - 2.0 * m as f64 * h).collect();
        let got = cumulative_integral(&f, h);
        for (m, v) in got.iter().enumerate() {
            let t = m as f64 * h;
            assert!((v - (t.powi(4) / 4.0 - t * t)).abs() < 1e-13, "{m}");
        }
    }
}
