use std::sync::Arc;

use super::spec::Axis;
use super::tensor::apply_along;
use crate::error::{Error, Result};
use crate::linalg::matmul;
use crate::mra::{dwt_1d, log2_exact};
use crate::wavelet::{cascade_eval, connection_coeffs, FilterPair};

/// Largest deviation of the quadrature Gram matrix from the identity that is accepted.
pub const GRAM_TOLERANCE: f64 = 1e-6;

/// Default quadrature oversampling exponent: `2^5` nodes per mode.
pub const DEFAULT_OVERSAMPLING: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    Scaling,
    Wavelet,
}

/// Position of one mode in the multiresolution hierarchy of its axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeTag {
    pub kind: ModeKind,
    /// Dyadic scale `j`: the mode lives on `2^j` cells of the axis.
    pub scale: usize,
    pub shift: usize,
    /// Detail level counted from the coarsest (`None` for scaling modes).
    pub band: Option<usize>,
}

/// How one axis of the ansatz is discretised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub axis: Axis,
    pub start: f64,
    pub length: f64,
    pub modes: usize,
    /// Detail levels of the catalog; `None` means full depth.
    pub levels: Option<usize>,
    /// Quadrature nodes; `None` means `modes · 2^DEFAULT_OVERSAMPLING`.
    pub quad_nodes: Option<usize>,
}

impl AxisSpec {
    pub fn new(axis: Axis, start: f64, length: f64, modes: usize) -> Self {
        Self { axis, start, length, modes, levels: None, quad_nodes: None }
    }

    pub fn with_quad_nodes(mut self, nodes: usize) -> Self {
        self.quad_nodes = Some(nodes);
        self
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = Some(levels);
        self
    }
}

/// Orthonormal periodic modes of one axis, sampled at the quadrature nodes.
///
/// The modes are the discrete wavelet transform of the `N` periodised level-`J` scaling
/// functions `√κ φ(κ(x − a) − k)`, `κ = N/L`, listed coarse to fine.
#[derive(Debug, Clone)]
pub struct AxisModes {
    pub spec: AxisSpec,
    pub tags: Vec<ModeTag>,
    pub nodes: Vec<f64>,
    /// Quadrature weight `L / M` of every node.
    pub weight: f64,
    /// `N × N` transform from scaling coefficients to mode coefficients.
    pub transform: Vec<f64>,
    /// `N × M` samples of the scaling functions.
    scaling_samples: Vec<f64>,
    /// `N × M` samples of `∂^o` of each mode, index `o`.
    derivative_samples: Vec<Vec<f64>>,
    /// Derivative matrix in the scaling basis, when the family supports it.
    derivative: Option<Vec<f64>>,
    pub gram_deviation: f64,
}

impl AxisModes {
    pub fn new(spec: AxisSpec, filters: &FilterPair) -> Result<Self> {
        let n = spec.modes;
        let jn = log2_exact(n).ok_or(Error::NonDyadicLength(n))?;
        let levels = spec.levels.unwrap_or(jn);
        if levels > jn {
            return Err(Error::TooManyLevels { levels, max: jn });
        }
        let m = spec.quad_nodes.unwrap_or(n << DEFAULT_OVERSAMPLING);
        let jm = log2_exact(m).ok_or(Error::NonDyadicLength(m))?;
        if jm <= jn {
            return Err(Error::InvalidArgument(format!("{m} quadrature nodes cannot resolve {n} modes")));
        }
        if !(spec.length > 0.0 && spec.length.is_finite() && spec.start.is_finite()) {
            return Err(Error::InvalidArgument(format!("axis {} has an invalid interval", spec.axis.name())));
        }
        let s = jm - jn;
        let samples = cascade_eval(filters, s)?;
        let per = 1usize << s;
        let amp = (n as f64 / spec.length).sqrt();
        let mut phi = vec![0.0; n * m];
        for k in 0..n {
            for (t, &v) in samples.phi.iter().enumerate() {
                phi[k * m + (t + k * per) % m] += amp * v;
            }
        }
        // column j of the transform is the DWT of the unit vector e_j
        let mut transform = vec![0.0; n * n];
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            for (i, v) in dwt_1d(&e, filters, levels)?.flatten().into_iter().enumerate() {
                transform[i * n + j] = v;
            }
        }
        let coarse = n >> levels;
        let mut tags: Vec<ModeTag> = (0..coarse)
            .map(|k| ModeTag { kind: ModeKind::Scaling, scale: jn - levels, shift: k, band: None })
            .collect();
        for l in 0..levels {
            let count = coarse << l;
            tags.extend((0..count).map(|k| ModeTag {
                kind: ModeKind::Wavelet,
                scale: jn - levels + l,
                shift: k,
                band: Some(l),
            }));
        }
        let derivative = connection_coeffs(filters, 1).ok().map(|cc| {
            let kappa = n as f64 / spec.length;
            let mut d = vec![0.0; n * n];
            for i in 0..n {
                for (ell, r) in cc.offsets() {
                    let l = (i as isize + ell).rem_euclid(n as isize) as usize;
                    d[l * n + i] += kappa * r;
                }
            }
            d
        });
        let modes0 = matmul(&transform, &phi, n, n, m);
        let weight = spec.length / m as f64;
        let nodes = (0..m).map(|i| spec.start + i as f64 * weight).collect();
        let mut out = Self {
            spec,
            tags,
            nodes,
            weight,
            transform,
            scaling_samples: phi,
            derivative_samples: vec![modes0],
            derivative,
            gram_deviation: 0.0,
        };
        out.gram_deviation = out.gram_deviation_of(0);
        if out.gram_deviation > GRAM_TOLERANCE {
            return Err(Error::QuadratureUnderResolved { deviation: out.gram_deviation, tolerance: GRAM_TOLERANCE });
        }
        Ok(out)
    }

    fn gram_deviation_of(&self, order: usize) -> f64 {
        let (n, m) = (self.len(), self.quad_len());
        let x = &self.derivative_samples[order];
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let g: f64 = (0..m).map(|t| x[i * m + t] * x[j * m + t]).sum::<f64>() * self.weight;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    pub fn axis(&self) -> Axis {
        self.spec.axis
    }

    pub fn len(&self) -> usize {
        self.spec.modes
    }

    pub fn is_empty(&self) -> bool {
        self.spec.modes == 0
    }

    pub fn quad_len(&self) -> usize {
        self.nodes.len()
    }

    pub fn levels(&self) -> usize {
        self.tags.iter().filter_map(|t| t.band).max().map_or(0, |b| b + 1)
    }

    /// `N × N` Galerkin derivative matrix in the mode basis, `S D Sᵀ`.
    pub fn derivative_matrix(&self) -> Result<Vec<f64>> {
        let n = self.len();
        let d = self.derivative.as_ref().ok_or(Error::InsufficientSmoothness {
            order: 1,
            required: 2,
            available: 1,
        })?;
        let sd = matmul(&self.transform, d, n, n, n);
        let st: Vec<f64> = (0..n * n).map(|k| self.transform[(k % n) * n + k / n]).collect();
        Ok(matmul(&sd, &st, n, n, n))
    }

    /// Makes sure samples of `∂^order` of every mode are cached.
    pub(crate) fn ensure_order(&mut self, order: usize) -> Result<()> {
        let (n, m) = (self.len(), self.quad_len());
        while self.derivative_samples.len() <= order {
            let d = self.derivative.as_ref().ok_or(Error::InsufficientSmoothness {
                order: self.derivative_samples.len(),
                required: 2,
                available: 1,
            })?;
            // ∂^o φ_i = Σ_l (D^o)[l, i] φ_l, so the samples are S (D^o)ᵀ Φ
            let o = self.derivative_samples.len();
            let mut dpow = identity(n);
            for _ in 0..o {
                dpow = matmul(&dpow, d, n, n, n);
            }
            let dt: Vec<f64> = (0..n * n).map(|k| dpow[(k % n) * n + k / n]).collect();
            let inner = matmul(&dt, &self.scaling_samples, n, n, m);
            self.derivative_samples.push(matmul(&self.transform, &inner, n, n, m));
        }
        Ok(())
    }

    /// `N × M` samples of `∂^order` of every mode (order must have been ensured).
    pub fn samples(&self, order: usize) -> &[f64] {
        &self.derivative_samples[order]
    }

    /// Samples with one extra periodic column, for integrands that need the right end.
    pub(crate) fn samples_extended(&self, order: usize) -> Vec<f64> {
        let (n, m) = (self.len(), self.quad_len());
        let x = self.samples(order);
        let mut out = vec![0.0; n * (m + 1)];
        for i in 0..n {
            out[i * (m + 1)..i * (m + 1) + m].copy_from_slice(&x[i * m..(i + 1) * m]);
            out[i * (m + 1) + m] = x[i * m];
        }
        out
    }

    pub(crate) fn nodes_extended(&self) -> Vec<f64> {
        let mut v = self.nodes.clone();
        v.push(self.spec.start + self.spec.length);
        v
    }

    /// `⟨f, ψ_i⟩` for samples `f` at the quadrature nodes.
    pub fn project(&self, f: &[f64]) -> Vec<f64> {
        let m = self.quad_len();
        let x = self.samples(0);
        (0..self.len())
            .map(|i| x[i * m..(i + 1) * m].iter().zip(f).map(|(a, b)| a * b).sum::<f64>() * self.weight)
            .collect()
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    v
}

/// Tensor-product mode catalog; axes are kept in `t, q, p` order.
#[derive(Debug, Clone)]
pub struct ModeCatalog {
    pub filters: Arc<FilterPair>,
    pub axes: Vec<AxisModes>,
}

impl ModeCatalog {
    pub fn new(filters: Arc<FilterPair>, specs: &[AxisSpec]) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::InvalidArgument("a catalog needs at least one axis".into()));
        }
        let mut specs = specs.to_vec();
        specs.sort_by_key(|s| s.axis);
        if specs.windows(2).any(|w| w[0].axis == w[1].axis) {
            return Err(Error::InvalidArgument("axis listed twice".into()));
        }
        let axes = specs.iter().map(|s| AxisModes::new(*s, &filters)).collect::<Result<_>>()?;
        Ok(Self { filters, axes })
    }

    pub fn axis(&self, axis: Axis) -> Option<&AxisModes> {
        self.axes.iter().find(|a| a.axis() == axis)
    }

    pub fn position(&self, axis: Axis) -> Option<usize> {
        self.axes.iter().position(|a| a.axis() == axis)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len()).collect()
    }

    /// Modes per component: the product of the per-axis counts.
    pub fn size(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn gram_deviation(&self) -> f64 {
        self.axes.iter().map(|a| a.gram_deviation).fold(0.0, f64::max)
    }

    pub(crate) fn ensure_order(&mut self, axis: usize, order: usize) -> Result<()> {
        self.axes[axis].ensure_order(order)
    }

    /// Projects `f` onto the modes of the listed catalog axes (positions into `axes`), with
    /// `f` receiving the node coordinates of those axes in order.
    pub fn project_on(&self, axes: &[usize], f: &dyn Fn(&[f64]) -> f64) -> Vec<f64> {
        let dims: Vec<usize> = axes.iter().map(|&a| self.axes[a].quad_len()).collect();
        let total: usize = dims.iter().product();
        let mut coords = vec![0.0; axes.len()];
        let mut data = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            for k in (0..axes.len()).rev() {
                coords[k] = self.axes[axes[k]].nodes[rem % dims[k]];
                rem /= dims[k];
            }
            data.push(f(&coords));
        }
        let mut cur_dims = dims;
        for (k, &a) in axes.iter().enumerate() {
            let ax = &self.axes[a];
            let mat: Vec<f64> = ax.samples(0).iter().map(|v| v * ax.weight).collect();
            data = apply_along(&data, &cur_dims, k, &mat, ax.len());
            cur_dims[k] = ax.len();
        }
        data
    }

    /// Projects `f(t, q, p)` onto the whole catalog; absent coordinates are passed as 0.
    pub fn project(&self, f: &dyn Fn([f64; 3]) -> f64) -> Vec<f64> {
        let positions: Vec<usize> = (0..self.axes.len()).collect();
        let kinds: Vec<usize> = self.axes.iter().map(|a| a.axis().index()).collect();
        self.project_on(&positions, &|c: &[f64]| {
            let mut x = [0.0; 3];
            for (k, &i) in kinds.iter().enumerate() {
                x[i] = c[k];
            }
            f(x)
        })
    }

    /// Projects onto the non-time axes only (the shape of initial data).
    pub fn project_spatial(&self, f: &dyn Fn([f64; 3]) -> f64) -> Vec<f64> {
        let positions: Vec<usize> = (0..self.axes.len()).filter(|&k| self.axes[k].axis() != Axis::T).collect();
        let kinds: Vec<usize> = positions.iter().map(|&k| self.axes[k].axis().index()).collect();
        self.project_on(&positions, &|c: &[f64]| {
            let mut x = [0.0; 3];
            for (k, &i) in kinds.iter().enumerate() {
                x[i] = c[k];
            }
            f(x)
        })
    }
}
