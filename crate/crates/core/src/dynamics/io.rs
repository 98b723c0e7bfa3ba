//! Snapshot formats: `WGF1` binary grid files, CSV and 8-bit PGM heatmaps.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use super::field::{FieldKind, WignerField};
use super::grid::PhaseSpaceGrid;
use crate::error::{Error, Result};

pub const WGF1_MAGIC: &[u8; 4] = b"WGF1";

/// Little-endian layout: magic, u32 n_q, u32 n_p, f64 q_min q_max p_min p_max, f64 hbar,
/// f64 mass, f64 time, then the row-major values.
pub fn encode_wgf1(w: &WignerField) -> Vec<u8> {
    encode_wgf1_parts(&w.grid, &w.values, w.hbar, w.mass, w.time)
}

/// [`encode_wgf1`] from loose parts; a zero `mass` marks a bare pattern grid.
pub fn encode_wgf1_parts(g: &PhaseSpaceGrid, values: &Array2<f64>, hbar: f64, mass: f64, time: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 8 + 7 * 8 + 8 * g.n_q * g.n_p);
    out.extend_from_slice(WGF1_MAGIC);
    out.extend_from_slice(&(g.n_q as u32).to_le_bytes());
    out.extend_from_slice(&(g.n_p as u32).to_le_bytes());
    for v in [g.q_min, g.q_max, g.p_min, g.p_max, hbar, mass, time] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in values.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_wgf1(bytes: &[u8], kind: FieldKind) -> Result<WignerField> {
    if bytes.len() < 68 || &bytes[..4] != WGF1_MAGIC {
        return Err(Error::Format("missing WGF1 header".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes")) as usize;
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let (n_q, n_p) = (u32_at(4), u32_at(8));
    let h: Vec<f64> = (0..7).map(|k| f64_at(12 + 8 * k)).collect();
    let expected = 68 + 8 * n_q * n_p;
    if bytes.len() != expected {
        return Err(Error::Format(format!("WGF1 payload has {} bytes, expected {expected}", bytes.len())));
    }
    let values: Vec<f64> = (0..n_q * n_p).map(|k| f64_at(68 + 8 * k)).collect();
    let grid = PhaseSpaceGrid::new((h[0], h[1]), (h[2], h[3]), n_q, n_p)?;
    // a zero mass marks a bare pattern grid written without dynamics metadata
    let mass = if h[5] > 0.0 { h[5] } else { 1.0 };
    let mut w = WignerField::new(grid, Array2::from_shape_vec((n_q, n_p), values).expect("shape"), h[4], mass, kind)?;
    w.time = h[6];
    Ok(w)
}

pub fn write_wgf1(path: &Path, w: &WignerField) -> Result<()> {
    std::fs::write(path, encode_wgf1(w))?;
    Ok(())
}

pub fn read_wgf1(path: &Path, kind: FieldKind) -> Result<WignerField> {
    decode_wgf1(&std::fs::read(path)?, kind)
}

/// CSV with columns `q,p,w`.
pub fn field_csv(w: &WignerField) -> String {
    let mut s = String::from("q,p,w\n");
    for ((i, j), v) in w.values.indexed_iter() {
        let _ = writeln!(s, "{:.17e},{:.17e},{:.17e}", w.grid.q(i), w.grid.p(j), v);
    }
    s
}

/// Binary PGM (P5) with a linear min–max map, plus the sidecar text recording that map.
/// Rows of the image run over p from top (p_max) to bottom, columns over q.
pub fn field_pgm(w: &WignerField) -> (Vec<u8>, String) {
    let (nq, np) = w.values.dim();
    let lo = w.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = w.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!("P5\n{nq} {np}\n255\n").into_bytes();
    for j in (0..np).rev() {
        for i in 0..nq {
            let t = ((w.values[[i, j]] - lo) / span * 255.0).round().clamp(0.0, 255.0);
            out.push(t as u8);
        }
    }
    let sidecar = format!(
        "mapping = linear\nmin = {lo:.17e}\nmax = {hi:.17e}\nwidth = {nq}\nheight = {np}\nx_axis = q\ny_axis = p\n"
    );
    (out, sidecar)
}
