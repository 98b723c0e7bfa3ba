use std::fmt::Write;
use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::mra::{analysis_step, log2_exact, synthesis_step};
use crate::wavelet::FilterPair;

/// Finest-level matrix `⟨T φ_{k'}, φ_k⟩` (the standard representation).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub matrix: Array2<f64>,
}

impl DenseOperator {
    pub fn new(matrix: Array2<f64>) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c || log2_exact(r).is_none() {
            return Err(Error::NonDyadicSize(r.max(c)));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        Ok(Self { matrix })
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.size() {
            return Err(Error::LengthMismatch { expected: self.size(), got: v.len() });
        }
        Ok(self.matrix.rows().into_iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// `K_{ij} = h / (|x_i − x_j| + δ)` on `x_i = i h`, `h = 1/n`.
    pub fn regularized_kernel(n: usize, delta: f64) -> Result<Self> {
        let h = 1.0 / n as f64;
        Self::new(Array2::from_shape_fn((n, n), |(i, j)| h / ((i as f64 - j as f64).abs() * h + delta)))
    }
}

/// Compressed-row block storing only retained entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseBlock {
    pub rows: usize,
    pub cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseBlock {
    pub fn from_dense(m: &Array2<f64>, eps: f64) -> Self {
        let (rows, cols) = m.dim();
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..rows {
            for c in 0..cols {
                let v = m[[r, c]];
                if v != 0.0 && v.abs() >= eps {
                    col_idx.push(c as u32);
                    values.push(v);
                }
            }
            row_ptr.push(values.len());
        }
        Self { rows, cols, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.rows, self.cols));
        for r in 0..self.rows {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[[r, self.col_idx[p] as usize]] = self.values[p];
            }
        }
        m
    }

    fn mul_add(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[p] * x[self.col_idx[p] as usize];
            }
            *yr += acc;
        }
    }

    fn filtered(&self, eps: f64) -> Self {
        Self::from_dense(&self.to_dense(), eps)
    }
}

/// Blocks of one level `j` (1 = finest): `A: D→D`, `B: V→D`, `Γ: D→V`.
#[derive(Debug, Clone, PartialEq)]
pub struct NsLevel {
    pub a: SparseBlock,
    pub b: SparseBlock,
    pub gamma: SparseBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonStandardForm {
    pub size: usize,
    pub filters: Arc<FilterPair>,
    /// Finest level first.
    pub levels: Vec<NsLevel>,
    pub coarse: SparseBlock,
    pub epsilon: f64,
}

/// One-level conjugation `W T Wᵀ` split into `[[T_ss, T_sd], [T_ds, T_dd]]`.
fn conjugate(t: &Array2<f64>, f: &FilterPair) -> Array2<f64> {
    let n = t.nrows();
    let half = n / 2;
    let mut tmp = Array2::zeros((n, n));
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    for c in 0..n {
        let col: Vec<f64> = t.column(c).to_vec();
        analysis_step(&col, f, &mut a, &mut d);
        for k in 0..half {
            tmp[[k, c]] = a[k];
            tmp[[half + k, c]] = d[k];
        }
    }
    let mut out = Array2::zeros((n, n));
    for r in 0..n {
        let row: Vec<f64> = tmp.row(r).to_vec();
        analysis_step(&row, f, &mut a, &mut d);
        for k in 0..half {
            out[[r, k]] = a[k];
            out[[r, half + k]] = d[k];
        }
    }
    out
}

pub fn project_operator(op: &DenseOperator, f: &Arc<FilterPair>, levels: usize) -> Result<NonStandardForm> {
    let n = op.size();
    let m = log2_exact(n).ok_or(Error::NonDyadicSize(n))?;
    if levels > m {
        return Err(Error::TooManyLevels { levels, max: m });
    }
    let mut t = op.matrix.clone();
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        let c = conjugate(&t, f);
        let h = c.nrows() / 2;
        let part = |r0: usize, c0: usize| c.slice(ndarray::s![r0..r0 + h, c0..c0 + h]).to_owned();
        out.push(NsLevel {
            a: SparseBlock::from_dense(&part(h, h), 0.0),
            b: SparseBlock::from_dense(&part(h, 0), 0.0),
            gamma: SparseBlock::from_dense(&part(0, h), 0.0),
        });
        t = part(0, 0);
    }
    Ok(NonStandardForm { size: n, filters: f.clone(), levels: out, coarse: SparseBlock::from_dense(&t, 0.0), epsilon: 0.0 })
}

impl NonStandardForm {
    pub fn retained(&self) -> usize {
        self.coarse.nnz() + self.levels.iter().map(|l| l.a.nnz() + l.b.nnz() + l.gamma.nnz()).sum::<usize>()
    }

    /// Number of stored slots if every block were dense.
    pub fn capacity(&self) -> usize {
        let c = self.coarse.rows * self.coarse.cols;
        c + self.levels.iter().map(|l| 3 * l.a.rows * l.a.cols).sum::<usize>()
    }

    pub fn sparsity(&self) -> f64 {
        self.retained() as f64 / self.capacity() as f64
    }

    /// Reassembles the dense finest-level matrix by inverse conjugation.
    pub fn to_dense(&self) -> Array2<f64> {
        let mut t = self.coarse.to_dense();
        for lvl in self.levels.iter().rev() {
            let h = t.nrows();
            let mut c = Array2::zeros((2 * h, 2 * h));
            c.slice_mut(ndarray::s![..h, ..h]).assign(&t);
            c.slice_mut(ndarray::s![h.., h..]).assign(&lvl.a.to_dense());
            c.slice_mut(ndarray::s![h.., ..h]).assign(&lvl.b.to_dense());
            c.slice_mut(ndarray::s![..h, h..]).assign(&lvl.gamma.to_dense());
            t = unconjugate(&c, &self.filters);
        }
        t
    }

    /// Multi-level sparse application of the stored blocks.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.size {
            return Err(Error::LengthMismatch { expected: self.size, got: v.len() });
        }
        let f = &self.filters;
        let mut s = vec![v.to_vec()];
        let mut d = Vec::with_capacity(self.levels.len());
        for _ in &self.levels {
            let cur = s.last().expect("nonempty");
            let half = cur.len() / 2;
            let mut a = vec![0.0; half];
            let mut g = vec![0.0; half];
            analysis_step(cur, f, &mut a, &mut g);
            s.push(a);
            d.push(g);
        }
        let mut out_s = vec![0.0; s[self.levels.len()].len()];
        self.coarse.mul_add(&s[self.levels.len()], &mut out_s);
        for (j, lvl) in self.levels.iter().enumerate().rev() {
            let mut dhat = vec![0.0; d[j].len()];
            lvl.a.mul_add(&d[j], &mut dhat);
            lvl.b.mul_add(&s[j + 1], &mut dhat);
            lvl.gamma.mul_add(&d[j], &mut out_s);
            let mut next = vec![0.0; 2 * out_s.len()];
            synthesis_step(&out_s, &dhat, f, &mut next);
            out_s = next;
        }
        Ok(out_s)
    }

    /// Zeroes entries with `|entry| < eps`.
    pub fn threshold(&self, eps: f64) -> Self {
        Self {
            size: self.size,
            filters: self.filters.clone(),
            levels: self
                .levels
                .iter()
                .map(|l| NsLevel { a: l.a.filtered(eps), b: l.b.filtered(eps), gamma: l.gamma.filtered(eps) })
                .collect(),
            coarse: self.coarse.filtered(eps),
            epsilon: self.epsilon.max(eps),
        }
    }

    pub fn sparsity_report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "size = {}", self.size);
        let _ = writeln!(s, "levels = {}", self.levels.len());
        let _ = writeln!(s, "epsilon = {:e}", self.epsilon);
        let _ = writeln!(s, "retained = {}", self.retained());
        let _ = writeln!(s, "capacity = {}", self.capacity());
        let _ = writeln!(s, "sparsity = {:.6}", self.sparsity());
        for (j, l) in self.levels.iter().enumerate() {
            let _ = writeln!(s, "level_{}_nnz = {} {} {}", j + 1, l.a.nnz(), l.b.nnz(), l.gamma.nnz());
        }
        let _ = writeln!(s, "coarse_nnz = {}", self.coarse.nnz());
        s
    }

    /// Per-block CSV with columns `level,block,row,col,value`.
    pub fn export_csv(&self) -> String {
        let mut s = String::from("level,block,row,col,value\n");
        let mut emit = |level: usize, tag: &str, b: &SparseBlock| {
            for r in 0..b.rows {
                for p in b.row_ptr[r]..b.row_ptr[r + 1] {
                    let _ = writeln!(s, "{level},{tag},{r},{},{:.17e}", b.col_idx[p], b.values[p]);
                }
            }
        };
        for (j, l) in self.levels.iter().enumerate() {
            emit(j + 1, "A", &l.a);
            emit(j + 1, "B", &l.b);
            emit(j + 1, "Gamma", &l.gamma);
        }
        emit(self.levels.len(), "T", &self.coarse);
        s
    }
}

fn unconjugate(c: &Array2<f64>, f: &FilterPair) -> Array2<f64> {
    let n = c.nrows();
    let half = n / 2;
    let mut tmp = Array2::zeros((n, n));
    let mut out_v = vec![0.0; n];
    for r in 0..n {
        let row = c.row(r);
        let a: Vec<f64> = row.iter().take(half).copied().collect();
        let d: Vec<f64> = row.iter().skip(half).copied().collect();
        synthesis_step(&a, &d, f, &mut out_v);
        tmp.row_mut(r).assign(&ndarray::ArrayView1::from(&out_v));
    }
    let mut out = Array2::zeros((n, n));
    for col in 0..n {
        let a: Vec<f64> = (0..half).map(|k| tmp[[k, col]]).collect();
        let d: Vec<f64> = (half..n).map(|k| tmp[[k, col]]).collect();
        synthesis_step(&a, &d, f, &mut out_v);
        out.column_mut(col).assign(&ndarray::ArrayView1::from(&out_v));
    }
    out
}

/// Outcome of matching two representations at one apply-error target.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionReport {
    pub target_error: f64,
    pub ns_epsilon: f64,
    pub ns_retained: usize,
    pub ns_error: f64,
    pub standard_epsilon: f64,
    pub standard_retained: usize,
    pub standard_error: f64,
}

fn relative_apply_error<F: Fn(&[f64]) -> Vec<f64>>(exact: &[Vec<f64>], probes: &[Vec<f64>], apply: F) -> f64 {
    probes
        .iter()
        .zip(exact)
        .map(|(p, e)| {
            let y = apply(p);
            let num: f64 = y.iter().zip(e).map(|(a, b)| (a - b).powi(2)).sum();
            let den: f64 = e.iter().map(|b| b * b).sum();
            (num / den).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Largest threshold from the sorted magnitude list whose apply error stays within `target`.
fn largest_admissible<F: Fn(f64) -> f64>(mut mags: Vec<f64>, target: f64, err: F) -> f64 {
    mags.retain(|&m| m > 0.0);
    mags.sort_by(f64::total_cmp);
    mags.dedup();
    let (mut lo, mut hi) = (0usize, mags.len());
    // invariant: thresholds mags[..lo] are admissible (0 entries dropped at lo = 0)
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if err(mags[mid - 1]) <= target {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    if lo == 0 {
        0.0
    } else {
        mags[lo - 1]
    }
}

/// Compares retained entries of the non-standard form and the standard (dense) form at the
/// largest thresholds keeping the relative apply error on `probes` within `target`.
pub fn compare_compression(
    op: &DenseOperator,
    f: &Arc<FilterPair>,
    levels: usize,
    target: f64,
    probes: &[Vec<f64>],
) -> Result<CompressionReport> {
    let ns = project_operator(op, f, levels)?;
    let exact: Vec<Vec<f64>> = probes.iter().map(|p| op.apply(p)).collect::<Result<_>>()?;
    let ns_mags: Vec<f64> = ns
        .levels
        .iter()
        .flat_map(|l| l.a.values.iter().chain(&l.b.values).chain(&l.gamma.values))
        .chain(&ns.coarse.values)
        .map(|v| v.abs())
        .collect();
    let ns_err = |eps: f64| {
        let t = ns.threshold(eps);
        relative_apply_error(&exact, probes, |p| t.apply(p).expect("length"))
    };
    let ns_eps = largest_admissible(ns_mags, target, ns_err);
    let ns_t = ns.threshold(ns_eps);
    let dense = SparseBlock::from_dense(&op.matrix, 0.0);
    let std_err = |eps: f64| {
        let t = dense.filtered(eps);
        relative_apply_error(&exact, probes, |p| {
            let mut y = vec![0.0; p.len()];
            t.mul_add(p, &mut y);
            y
        })
    };
    let std_eps = largest_admissible(dense.values.iter().map(|v| v.abs()).collect(), target, std_err);
    let std_t = dense.filtered(std_eps);
    Ok(CompressionReport {
        target_error: target,
        ns_epsilon: ns_eps,
        ns_retained: ns_t.retained(),
        ns_error: ns_err(ns_eps),
        standard_epsilon: std_eps,
        standard_retained: std_t.nnz(),
        standard_error: std_err(std_eps),
    })
}
