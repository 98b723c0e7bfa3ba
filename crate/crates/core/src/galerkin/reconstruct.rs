use std::fmt::Write as _;

use ndarray::Array2;

use super::modes::{ModeCatalog, ModeKind};
use super::spec::Axis;
use super::tensor::apply_along;
use crate::error::{Error, Result};

/// Fields of one component at the requested time nodes, sampled on the spatial
/// quadrature nodes (`q` rows, `p` columns; an absent axis has extent 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub times: Vec<f64>,
    pub q_nodes: Vec<f64>,
    pub p_nodes: Vec<f64>,
    pub fields: Vec<Array2<f64>>,
}

/// Slow (all-scaling) part plus one fast part per detail band `l`, with `ω_l ∼ 2^l`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleDecomposition {
    pub slow: Array2<f64>,
    pub fast: Vec<Array2<f64>>,
}

impl ScaleDecomposition {
    pub fn total(&self) -> Array2<f64> {
        let mut t = self.slow.clone();
        for f in &self.fast {
            t += f;
        }
        t
    }

    /// `‖slow‖` and `‖fast_l‖` in the discrete L² norm of the sample grid.
    pub fn report(&self) -> String {
        let norm = |a: &Array2<f64>| a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut s = format!("slow = {:.6e}\n", norm(&self.slow));
        for (l, f) in self.fast.iter().enumerate() {
            let _ = writeln!(s, "fast_{l} = {:.6e}", norm(f));
        }
        s
    }
}

fn component_block<'a>(a: &'a [f64], catalog: &ModeCatalog, component: usize) -> Result<&'a [f64]> {
    let per = catalog.size();
    if a.is_empty() || !a.len().is_multiple_of(per) || component >= a.len() / per {
        return Err(Error::ShapeMismatch(format!(
            "{} coefficients do not hold component {component} of a {per}-mode catalog",
            a.len()
        )));
    }
    Ok(&a[component * per..(component + 1) * per])
}

/// Spatial coefficients at time node `node` (the whole block when there is no time axis).
pub fn spatial_coefficients(a: &[f64], catalog: &ModeCatalog, component: usize, node: usize) -> Result<Vec<f64>> {
    let block = component_block(a, catalog, component)?;
    let Some(tp) = catalog.position(Axis::T) else {
        return Ok(block.to_vec());
    };
    let ax = &catalog.axes[tp];
    if node >= ax.quad_len() {
        return Err(Error::InvalidArgument(format!("time node {node} outside 0..{}", ax.quad_len())));
    }
    let (n, m) = (ax.len(), ax.quad_len());
    let values: Vec<f64> = (0..n).map(|i| ax.samples(0)[i * m + node]).collect();
    Ok(apply_along(block, &catalog.counts(), tp, &values, 1))
}

/// Synthesises spatial coefficients on the spatial quadrature nodes.
pub fn spatial_field(coeffs: &[f64], catalog: &ModeCatalog) -> Result<Array2<f64>> {
    let spatial: Vec<usize> = (0..catalog.axes.len()).filter(|&k| catalog.axes[k].axis() != Axis::T).collect();
    let mut dims: Vec<usize> = spatial.iter().map(|&k| catalog.axes[k].len()).collect();
    if coeffs.len() != dims.iter().product::<usize>() {
        return Err(Error::ShapeMismatch(format!("{} spatial coefficients, expected {}", coeffs.len(), dims.iter().product::<usize>())));
    }
    let mut data = coeffs.to_vec();
    for (pos, &k) in spatial.iter().enumerate() {
        let ax = &catalog.axes[k];
        let (n, m) = (ax.len(), ax.quad_len());
        let x = ax.samples(0);
        let xt: Vec<f64> = (0..m * n).map(|idx| x[(idx % n) * m + idx / n]).collect();
        data = apply_along(&data, &dims, pos, &xt, m);
        dims[pos] = m;
    }
    let nq = catalog.axis(Axis::Q).map_or(1, |a| a.quad_len());
    let np = catalog.axis(Axis::P).map_or(1, |a| a.quad_len());
    Ok(Array2::from_shape_vec((nq, np), data).expect("spatial grid shape"))
}

/// `W = Σ a_{ij…} A_i ⊗ B_j ⊗ …` at the given time-axis quadrature nodes.
pub fn reconstruct(a: &[f64], catalog: &ModeCatalog, component: usize, time_nodes: &[usize]) -> Result<Reconstruction> {
    let nodes_of = |axis: Axis| catalog.axis(axis).map_or(vec![0.0], |a| a.nodes.clone());
    let (times, nodes): (Vec<f64>, Vec<usize>) = match catalog.axis(Axis::T) {
        Some(t) => (time_nodes.iter().map(|&m| t.nodes.get(m).copied().unwrap_or(f64::NAN)).collect(), time_nodes.to_vec()),
        None => (vec![0.0], vec![0]),
    };
    let fields = nodes
        .iter()
        .map(|&m| spatial_field(&spatial_coefficients(a, catalog, component, m)?, catalog))
        .collect::<Result<_>>()?;
    Ok(Reconstruction { times, q_nodes: nodes_of(Axis::Q), p_nodes: nodes_of(Axis::P), fields })
}

/// Splits the reconstruction at one time node into its slow block (scaling modes on every
/// spatial axis) and fast blocks indexed by the finest detail band involved.
pub fn decompose(a: &[f64], catalog: &ModeCatalog, component: usize, time_node: usize) -> Result<ScaleDecomposition> {
    let coeffs = spatial_coefficients(a, catalog, component, time_node)?;
    let spatial: Vec<usize> = (0..catalog.axes.len()).filter(|&k| catalog.axes[k].axis() != Axis::T).collect();
    let dims: Vec<usize> = spatial.iter().map(|&k| catalog.axes[k].len()).collect();
    let bands = spatial.iter().map(|&k| catalog.axes[k].levels()).max().unwrap_or(0);
    // band index per flat spatial mode: None = slow
    let band_of = |flat: usize| -> Option<usize> {
        let mut rem = flat;
        let mut band: Option<usize> = None;
        for (pos, &k) in spatial.iter().enumerate().rev() {
            let tag = catalog.axes[k].tags[rem % dims[pos]];
            rem /= dims[pos];
            if tag.kind == ModeKind::Wavelet {
                band = Some(band.map_or(tag.band.unwrap_or(0), |b| b.max(tag.band.unwrap_or(0))));
            }
        }
        band
    };
    let masked = |keep: &dyn Fn(Option<usize>) -> bool| -> Result<Array2<f64>> {
        let c: Vec<f64> = coeffs.iter().enumerate().map(|(i, v)| if keep(band_of(i)) { *v } else { 0.0 }).collect();
        spatial_field(&c, catalog)
    };
    let slow = masked(&|b| b.is_none())?;
    let fast = (0..bands).map(|l| masked(&|b| b == Some(l))).collect::<Result<_>>()?;
    Ok(ScaleDecomposition { slow, fast })
}
