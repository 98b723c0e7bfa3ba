use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::roots::polynomial_roots;
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Haar,
    Daubechies,
    Symmlet,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Haar => "haar",
            Family::Daubechies => "daubechies",
            Family::Symmlet => "symmlet",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" => Ok(Family::Haar),
            "daubechies" | "db" => Ok(Family::Daubechies),
            "symmlet" | "symlet" | "sym" => Ok(Family::Symmlet),
            other => Err(Error::InvalidArgument(format!("unknown wavelet family '{other}'"))),
        }
    }
}

/// Orthonormal two-channel filter bank.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    pub family: Family,
    pub vanishing_moments: usize,
    pub lowpass: Vec<f64>,
    pub highpass: Vec<f64>,
}

impl FilterPair {
    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    /// Plain-text export: `# family order ntaps` then one lowpass tap per line.
    pub fn export_text(&self) -> String {
        let mut s = format!("# {} {} {}\n", self.family, self.vanishing_moments, self.len());
        for h in &self.lowpass {
            s.push_str(&format!("{h:.17e}\n"));
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Format("empty filter file".into()))?;
        let parts: Vec<&str> = header.trim_start_matches('#').split_whitespace().collect();
        if !header.starts_with('#') || parts.len() != 3 {
            return Err(Error::Format(format!("bad filter header '{header}'")));
        }
        let family: Family = parts[0].parse()?;
        let order: usize = parts[1].parse().map_err(|_| Error::Format("bad order".into()))?;
        let ntaps: usize = parts[2].parse().map_err(|_| Error::Format("bad tap count".into()))?;
        let lowpass = lines
            .map(|l| l.trim().parse::<f64>().map_err(|_| Error::Format(format!("bad tap '{l}'"))))
            .collect::<Result<Vec<_>>>()?;
        if lowpass.len() != ntaps {
            return Err(Error::Format(format!("expected {ntaps} taps, found {}", lowpass.len())));
        }
        Ok(Self { family, vanishing_moments: order, highpass: quadrature_mirror(&lowpass), lowpass })
    }
}

/// g_k = (−1)^k h_{L−1−k}
pub fn quadrature_mirror(h: &[f64]) -> Vec<f64> {
    let l = h.len();
    (0..l).map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] }).collect()
}

type Slot = OnceLock<Arc<FilterPair>>;
static HAAR: Slot = OnceLock::new();
static DAUBECHIES: [Slot; MAX_ORDER] = [const { OnceLock::new() }; MAX_ORDER];
static SYMMLET: [Slot; MAX_ORDER] = [const { OnceLock::new() }; MAX_ORDER];

/// Builds (or fetches from the write-once cache) the filter pair for `(family, order)`.
pub fn build_filter_pair(family: Family, order: usize) -> Result<Arc<FilterPair>> {
    let slot = match family {
        Family::Haar => &HAAR,
        _ if !(1..=MAX_ORDER).contains(&order) => {
            return Err(Error::UnsupportedOrder { family: family.name(), order })
        }
        Family::Daubechies => &DAUBECHIES[order - 1],
        Family::Symmlet => &SYMMLET[order - 1],
    };
    Ok(slot
        .get_or_init(|| {
            let p = if family == Family::Haar { 1 } else { order };
            let lowpass = match family {
                Family::Haar => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
                Family::Symmlet if p > 1 => symmlet_lowpass(p),
                _ => daubechies_lowpass(p),
            };
            Arc::new(FilterPair { family, vanishing_moments: p, highpass: quadrature_mirror(&lowpass), lowpass })
        })
        .clone())
}

/// Reciprocal root pairs (inside, outside) of the half-band factor, one per y-root of
/// P(y) = Σ_{k<p} C(p−1+k, k) y^k under z² − (2 − 4y) z + 1 = 0.
fn zero_pairs(p: usize) -> Vec<(Complex64, Complex64)> {
    if p < 2 {
        return Vec::new();
    }
    let coeffs: Vec<f64> = (0..p).map(|k| binomial(p - 1 + k, k)).collect();
    let mut ys = polynomial_roots(&coeffs);
    // snap conjugate pairs and sort for a reproducible enumeration order
    for y in ys.iter_mut() {
        if y.im.abs() < 1e-10 * y.norm() {
            y.im = 0.0;
        }
    }
    ys.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ys.into_iter()
        .map(|y| {
            let b = 2.0 - 4.0 * y;
            let z1 = (b + (b * b - 4.0).sqrt()) / 2.0;
            let zi = if z1.norm() < 1.0 { z1 } else { 1.0 / z1 };
            (zi, 1.0 / zi)
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn expand(p: usize, zeros: &[Complex64]) -> Vec<f64> {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    let mul = |root: Complex64, poly: &mut Vec<Complex64>| {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * root;
        }
        *poly = next;
    };
    for _ in 0..p {
        mul(Complex64::new(-1.0, 0.0), &mut poly);
    }
    for &z in zeros {
        mul(z, &mut poly);
    }
    let h: Vec<f64> = poly.iter().map(|c| c.re).collect();
    let s: f64 = h.iter().sum();
    h.iter().map(|v| v * std::f64::consts::SQRT_2 / s).collect()
}

/// Minimum-phase factor: every zero inside the unit circle.
fn daubechies_lowpass(p: usize) -> Vec<f64> {
    let zeros: Vec<Complex64> = zero_pairs(p).iter().map(|z| z.0).collect();
    expand(p, &zeros)
}

/// Least-asymmetric factor: per conjugate group, inside or outside zeros chosen to
/// minimise the amplitude-weighted deviation of the phase from linear.
fn symmlet_lowpass(p: usize) -> Vec<f64> {
    let pairs = zero_pairs(p);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut used = vec![false; pairs.len()];
    for i in 0..pairs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let zi = pairs[i].0;
        if zi.im == 0.0 {
            groups.push(vec![i]);
            continue;
        }
        let j = (0..pairs.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (pairs[a].0 - zi.conj()).norm().total_cmp(&(pairs[b].0 - zi.conj()).norm()))
            .expect("conjugate partner");
        used[j] = true;
        groups.push(vec![i, j]);
    }
    let g = groups.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    // the first group is pinned inside: the complementary choice is the time reversal
    for mask in 0..(1usize << g.saturating_sub(1)) {
        let mut zeros = Vec::with_capacity(pairs.len());
        for (gi, grp) in groups.iter().enumerate() {
            let outside = gi > 0 && (mask >> (gi - 1)) & 1 == 1;
            for &i in grp {
                zeros.push(if outside { pairs[i].1 } else { pairs[i].0 });
            }
        }
        let h = expand(p, &zeros);
        let dev = phase_deviation(&h);
        if best.as_ref().is_none_or(|(b, _)| dev < *b - 1e-12) {
            best = Some((dev, h));
        }
    }
    best.expect("at least one factor").1
}

fn phase_deviation(h: &[f64]) -> f64 {
    let n = 511;
    let mut w = Vec::with_capacity(n);
    let mut ph = Vec::with_capacity(n);
    let mut amp = Vec::with_capacity(n);
    let mut prev = 0.0;
    for i in 1..=n {
        let omega = std::f64::consts::PI * i as f64 / (n + 1) as f64;
        let resp: Complex64 = h.iter().enumerate().map(|(k, &c)| c * Complex64::from_polar(1.0, -omega * k as f64)).sum();
        let mut a = resp.arg();
        if i > 1 {
            while a - prev > std::f64::consts::PI {
                a -= 2.0 * std::f64::consts::PI;
            }
            while a - prev < -std::f64::consts::PI {
                a += 2.0 * std::f64::consts::PI;
            }
        }
        prev = a;
        w.push(omega);
        ph.push(a);
        amp.push(resp.norm());
    }
    // weighted fit ph ≈ c0 ω + c1 minimising Σ amp (ph − fit)²
    let (mut sww, mut sw, mut s1, mut swp, mut sp) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let a2 = amp[i] * amp[i];
        sww += a2 * w[i] * w[i];
        sw += a2 * w[i];
        s1 += a2;
        swp += a2 * w[i] * ph[i];
        sp += a2 * ph[i];
    }
    let det = sww * s1 - sw * sw;
    let c0 = (swp * s1 - sw * sp) / det;
    let c1 = (sww * sp - sw * swp) / det;
    (0..n).map(|i| amp[i] * (ph[i] - c0 * w[i] - c1).powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_taps() {
        let f = build_filter_pair(Family::Haar, 1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(f.lowpass.len(), 2);
        assert!((f.lowpass[0] - r).abs() < 1e-15 && (f.lowpass[1] - r).abs() < 1e-15);
        assert!((f.highpass[0] - r).abs() < 1e-15 && (f.highpass[1] + r).abs() < 1e-15);
    }

    #[test]
    fn unsupported_orders() {
        assert!(matches!(build_filter_pair(Family::Daubechies, 0), Err(Error::UnsupportedOrder { .. })));
        assert!(matches!(build_filter_pair(Family::Symmlet, 11), Err(Error::UnsupportedOrder { .. })));
        assert!(build_filter_pair(Family::Haar, 99).is_ok());
    }

    #[test]
    fn cache_returns_same_allocation() {
        let a = build_filter_pair(Family::Symmlet, 8).unwrap();
        let b = build_filter_pair(Family::Symmlet, 8).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn export_round_trip() {
        let f = build_filter_pair(Family::Daubechies, 3).unwrap();
        let text = f.export_text();
        assert!(text.starts_with("# daubechies 3 6\n"));
        let g = FilterPair::parse_text(&text).unwrap();
        assert_eq!(*f, g);
    }
}
