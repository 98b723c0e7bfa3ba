use ndarray::{s, Array2};
use rayon::prelude::*;

use super::dwt::{analysis_step, log2_exact, synthesis_step};
use crate::error::{Error, Result};
use crate::wavelet::FilterPair;

/// Detail blocks of one level: (φ⊗ψ, ψ⊗φ, ψ⊗ψ) with the first factor along rows (axis 0).
#[derive(Debug, Clone, PartialEq)]
pub struct DetailTriple {
    pub low_high: Array2<f64>,
    pub high_low: Array2<f64>,
    pub high_high: Array2<f64>,
}

/// Square-scheme 2-D coefficients, details ordered coarse to fine.
#[derive(Debug, Clone, PartialEq)]
pub struct Mra2dCoefficients {
    pub coarse: Array2<f64>,
    pub details: Vec<DetailTriple>,
    pub shape: (usize, usize),
}

impl Mra2dCoefficients {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn energy(&self) -> f64 {
        let mut e: f64 = self.coarse.iter().map(|v| v * v).sum();
        for d in &self.details {
            for b in [&d.low_high, &d.high_low, &d.high_high] {
                e += b.iter().map(|v| v * v).sum::<f64>();
            }
        }
        e
    }

    /// Packs into the conventional in-place layout (coarse block top-left).
    pub fn to_packed(&self) -> Array2<f64> {
        let mut out = Array2::zeros(self.shape);
        let (r, c) = self.coarse.dim();
        out.slice_mut(s![..r, ..c]).assign(&self.coarse);
        let (mut r, mut c) = (r, c);
        for d in &self.details {
            out.slice_mut(s![..r, c..2 * c]).assign(&d.low_high);
            out.slice_mut(s![r..2 * r, ..c]).assign(&d.high_low);
            out.slice_mut(s![r..2 * r, c..2 * c]).assign(&d.high_high);
            r *= 2;
            c *= 2;
        }
        out
    }

    pub fn from_packed(packed: &Array2<f64>, levels: usize) -> Result<Self> {
        let (nr, nc) = packed.dim();
        check_shape(nr, nc, levels)?;
        let (mut r, mut c) = (nr >> levels, nc >> levels);
        let coarse = packed.slice(s![..r, ..c]).to_owned();
        let mut details = Vec::with_capacity(levels);
        for _ in 0..levels {
            details.push(DetailTriple {
                low_high: packed.slice(s![..r, c..2 * c]).to_owned(),
                high_low: packed.slice(s![r..2 * r, ..c]).to_owned(),
                high_high: packed.slice(s![r..2 * r, c..2 * c]).to_owned(),
            });
            r *= 2;
            c *= 2;
        }
        Ok(Self { coarse, details, shape: (nr, nc) })
    }
}

fn check_shape(nr: usize, nc: usize, levels: usize) -> Result<()> {
    let (Some(mr), Some(mc)) = (log2_exact(nr), log2_exact(nc)) else {
        return Err(Error::NonDyadicShape(nr, nc));
    };
    let max = mr.min(mc);
    if levels > max {
        return Err(Error::TooManyLevels { levels, max });
    }
    Ok(())
}

/// Analysis along axis 1 of the top-left `rows × cols` block of a row-major buffer.
pub(crate) fn rows_forward(buf: &mut [f64], stride: usize, rows: usize, cols: usize, f: &FilterPair) {
    let half = cols / 2;
    buf.par_chunks_mut(stride).take(rows).for_each(|row| {
        let x = row[..cols].to_vec();
        let (a, d) = row[..cols].split_at_mut(half);
        analysis_step(&x, f, a, d);
    });
}

pub(crate) fn rows_inverse(buf: &mut [f64], stride: usize, rows: usize, cols: usize, f: &FilterPair) {
    let half = cols / 2;
    buf.par_chunks_mut(stride).take(rows).for_each(|row| {
        let (a, d) = (row[..half].to_vec(), row[half..cols].to_vec());
        synthesis_step(&a, &d, f, &mut row[..cols]);
    });
}

pub(crate) fn transpose_block(buf: &[f64], stride: usize, rows: usize, cols: usize) -> Vec<f64> {
    let mut t = vec![0.0; rows * cols];
    t.par_chunks_mut(rows).enumerate().for_each(|(j, out)| {
        for (i, v) in out.iter_mut().enumerate() {
            *v = buf[i * stride + j];
        }
    });
    t
}

pub(crate) fn write_transposed(buf: &mut [f64], stride: usize, rows: usize, cols: usize, t: &[f64]) {
    buf.par_chunks_mut(stride).take(rows).enumerate().for_each(|(i, row)| {
        for j in 0..cols {
            row[j] = t[j * rows + i];
        }
    });
}

/// Analysis along axis 0 of the top-left block.
pub(crate) fn cols_forward(buf: &mut [f64], stride: usize, rows: usize, cols: usize, f: &FilterPair) {
    let mut t = transpose_block(buf, stride, rows, cols);
    rows_forward(&mut t, rows, cols, rows, f);
    write_transposed(buf, stride, rows, cols, &t);
}

pub(crate) fn cols_inverse(buf: &mut [f64], stride: usize, rows: usize, cols: usize, f: &FilterPair) {
    let mut t = transpose_block(buf, stride, rows, cols);
    rows_inverse(&mut t, rows, cols, rows, f);
    write_transposed(buf, stride, rows, cols, &t);
}

/// Square (level-synchronised) tensor transform: rows then columns per level.
pub fn dwt_2d(field: &Array2<f64>, f: &FilterPair, levels: usize) -> Result<Mra2dCoefficients> {
    let (nr, nc) = field.dim();
    check_shape(nr, nc, levels)?;
    let mut buf: Vec<f64> = field.iter().copied().collect();
    let (mut r, mut c) = (nr, nc);
    for _ in 0..levels {
        rows_forward(&mut buf, nc, r, c, f);
        cols_forward(&mut buf, nc, r, c, f);
        r /= 2;
        c /= 2;
    }
    let packed = Array2::from_shape_vec((nr, nc), buf).expect("shape preserved");
    Mra2dCoefficients::from_packed(&packed, levels)
}

pub fn idwt_2d(coeffs: &Mra2dCoefficients, f: &FilterPair) -> Result<Array2<f64>> {
    let (nr, nc) = coeffs.shape;
    let levels = coeffs.levels();
    check_shape(nr, nc, levels)?;
    let (cr, cc) = coeffs.coarse.dim();
    if cr != nr >> levels || cc != nc >> levels {
        return Err(Error::MalformedCoefficients(format!("coarse block {cr}x{cc} inconsistent with shape")));
    }
    for (j, d) in coeffs.details.iter().enumerate() {
        let want = (cr << j, cc << j);
        if d.low_high.dim() != want || d.high_low.dim() != want || d.high_high.dim() != want {
            return Err(Error::MalformedCoefficients(format!("detail level {j} has wrong block shape")));
        }
    }
    let packed = coeffs.to_packed();
    let mut buf: Vec<f64> = packed.iter().copied().collect();
    let (mut r, mut c) = (cr, cc);
    for _ in 0..levels {
        r *= 2;
        c *= 2;
        cols_inverse(&mut buf, nc, r, c, f);
        rows_inverse(&mut buf, nc, r, c, f);
    }
    Ok(Array2::from_shape_vec((nr, nc), buf).expect("shape preserved"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::{build_filter_pair, Family};

    #[test]
    fn constant_matrix_has_only_coarse_content() {
        let f = build_filter_pair(Family::Daubechies, 3).unwrap();
        let c = dwt_2d(&Array2::from_elem((32, 16), 2.5), &f, 3).unwrap();
        for d in &c.details {
            for b in [&d.low_high, &d.high_low, &d.high_high] {
                assert!(b.iter().all(|v| v.abs() < 1e-12));
            }
        }
        assert_eq!(c.coarse.dim(), (4, 2));
    }

    #[test]
    fn non_dyadic_rejected() {
        let f = build_filter_pair(Family::Haar, 1).unwrap();
        assert_eq!(dwt_2d(&Array2::zeros((12, 16)), &f, 1), Err(Error::NonDyadicShape(12, 16)));
    }
}
