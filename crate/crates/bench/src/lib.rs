//! Benchmark-only crate; the benches live in `benches/`.

/// Deterministic smooth test signal of length `n` on `[0, 1)`.
pub fn test_signal(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let x = i as f64 / n as f64;
            (2.0 * std::f64::consts::PI * 3.0 * x).sin() + 0.5 * (-40.0 * (x - 0.4).powi(2)).exp()
        })
        .collect()
}
