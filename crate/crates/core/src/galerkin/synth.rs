use std::fmt::Write as _;

use ndarray::Array2;
use rayon::prelude::*;

use crate::dynamics::io::{decode_wgf1, encode_wgf1_parts};
use crate::dynamics::{FieldKind, PhaseSpaceGrid};
use crate::error::{Error, Result};
use crate::mra::{dwt_1d, idwt_flat_full, log2_exact};
use crate::wavelet::FilterPair;

/// Default band width of the band-diagonal structure.
pub const DEFAULT_BAND_WIDTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixStructure {
    Uniform { value: f64 },
    /// `band_value` where `|i − j| < width`, `off_value` elsewhere; with
    /// `lower_triangular` every entry above the diagonal is zero.
    Band { width: usize, band_value: f64, off_value: f64, lower_triangular: bool },
    Custom,
}

/// Square matrix of wavelet coefficients `a_ij` in the anisotropic full-depth layout:
/// row `i` and column `j` each index `[a, d_0, d_1(2), d_2(4), …]` of their axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    pub values: Array2<f64>,
    pub structure: MatrixStructure,
}

fn check_size(size: usize) -> Result<()> {
    match log2_exact(size) {
        Some(_) => Ok(()),
        None => Err(Error::NonDyadicSize(size)),
    }
}

impl CoefficientMatrix {
    pub fn uniform(size: usize, value: f64) -> Result<Self> {
        check_size(size)?;
        Ok(Self { values: Array2::from_elem((size, size), value), structure: MatrixStructure::Uniform { value } })
    }

    pub fn band(size: usize, width: usize, band_value: f64, off_value: f64, lower_triangular: bool) -> Result<Self> {
        check_size(size)?;
        let structure = MatrixStructure::Band { width, band_value, off_value, lower_triangular };
        let values = Array2::from_shape_fn((size, size), |(i, j)| expected_entry(&structure, i, j).unwrap_or(0.0));
        Ok(Self { values, structure })
    }

    pub fn custom(values: Array2<f64>) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c {
            return Err(Error::ShapeMismatch(format!("coefficient matrix is {r}x{c}")));
        }
        check_size(r)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("coefficient matrix has non-finite entries".into()));
        }
        Ok(Self { values, structure: MatrixStructure::Custom })
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    /// Whether every entry agrees with the structure tag.
    pub fn is_consistent(&self) -> bool {
        self.values.indexed_iter().all(|((i, j), v)| expected_entry(&self.structure, i, j).is_none_or(|e| e == *v))
    }

    /// One CSV line per row, values separated by commas.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.size() * self.size() * 8);
        for row in self.values.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows: Vec<Vec<f64>> = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .enumerate()
            .map(|(r, l)| {
                l.split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Format(format!("row {r}: bad value '{t}'"))))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(format!("CSV matrix with {n} rows is not square")));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Self::custom(Array2::from_shape_vec((n, n), flat).map_err(|e| Error::Format(e.to_string()))?)
    }

    /// WGF1 grid over `[0, S]²`, `hbar = 0`, zero mass (bare pattern), time 0.
    pub fn to_wgf1(&self) -> Vec<u8> {
        let s = self.size();
        let grid = PhaseSpaceGrid::new((0.0, s as f64), (0.0, s as f64), s, s).expect("dyadic size");
        encode_wgf1_parts(&grid, &self.values, 0.0, 0.0, 0.0)
    }

    pub fn from_wgf1(bytes: &[u8]) -> Result<Self> {
        Self::custom(decode_wgf1(bytes, FieldKind::Pattern)?.values)
    }
}

fn expected_entry(structure: &MatrixStructure, i: usize, j: usize) -> Option<f64> {
    match *structure {
        MatrixStructure::Uniform { value } => Some(value),
        MatrixStructure::Band { width, band_value, off_value, lower_triangular } => Some(if lower_triangular && j > i {
            0.0
        } else if i.abs_diff(j) < width {
            band_value
        } else {
            off_value
        }),
        MatrixStructure::Custom => None,
    }
}

fn synthesize_columns(m: &Array2<f64>, f: &FilterPair, live: usize) -> Result<Array2<f64>> {
    let (n, _) = m.dim();
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| if j < live { idwt_flat_full(&m.column(j).to_vec(), f) } else { Ok(vec![0.0; n]) })
        .collect::<Result<_>>()?;
    Ok(Array2::from_shape_fn((n, n), |(i, j)| cols[j][i]))
}

/// `F = Bᵀ C B` with `B` the full-depth periodic synthesis; indices `≥ 2^depth` of either
/// axis are dropped first, so `depth` caps the dilation parameter on both axes.
pub fn synthesize_from_matrix(cm: &CoefficientMatrix, f: &FilterPair, depth: usize) -> Result<Array2<f64>> {
    let s = cm.size();
    let max = log2_exact(s).ok_or(Error::NonDyadicSize(s))?;
    if !(1..=max).contains(&depth) {
        return Err(Error::TooManyLevels { levels: depth, max });
    }
    let live = 1usize << depth;
    let mut c = cm.values.clone();
    c.indexed_iter_mut().for_each(|((i, j), v)| {
        if i >= live || j >= live {
            *v = 0.0;
        }
    });
    // columns: x-index synthesised, then rows via the transpose
    let half = synthesize_columns(&c, f, live)?;
    let t = synthesize_columns(&half.t().to_owned(), f, s)?;
    Ok(t.t().to_owned())
}

/// Inverse of the synthesis: full-depth analysis along both axes.
pub fn analyze_to_matrix(field: &Array2<f64>, f: &FilterPair) -> Result<Array2<f64>> {
    let (r, c) = field.dim();
    if r != c {
        return Err(Error::ShapeMismatch(format!("field is {r}x{c}")));
    }
    let levels = log2_exact(r).ok_or(Error::NonDyadicSize(r))?;
    let analyze_cols = |m: &Array2<f64>| -> Result<Array2<f64>> {
        let cols: Vec<Vec<f64>> = (0..r)
            .into_par_iter()
            .map(|j| Ok(dwt_1d(&m.column(j).to_vec(), f, levels)?.flatten()))
            .collect::<Result<_>>()?;
        Ok(Array2::from_shape_fn((r, r), |(i, j)| cols[j][i]))
    };
    let half = analyze_cols(field)?;
    Ok(analyze_cols(&half.t().to_owned())?.t().to_owned())
}
