use num_complex::Complex64;

/// All roots of `c[0] + c[1] z + … + c[d] z^d` by Aberth–Ehrlich iteration.
pub fn polynomial_roots(c: &[f64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = c[d];
    let monic: Vec<f64> = c.iter().map(|v| v / lead).collect();
    let radius = 1.0 + monic[..d].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // initial guesses on a skewed circle avoid symmetric stalls
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(monic[d], 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..d).rev() {
            dp = dp * x + p;
            p = p * x + monic[k];
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..d {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-17 {
            break;
        }
    }
    // Newton polish against the original polynomial
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*r);
            if dp.norm() > 0.0 {
                *r -= p / dp;
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots() {
        let mut r = polynomial_roots(&[2.0, -3.0, 1.0]);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0].re - 1.0).abs() < 1e-14 && (r[1].re - 2.0).abs() < 1e-14);
        assert!(r.iter().all(|v| v.im.abs() < 1e-14));
    }

    #[test]
    fn complex_pair() {
        let r = polynomial_roots(&[1.0, 0.0, 1.0]);
        assert!(r.iter().all(|v| (v.norm() - 1.0).abs() < 1e-14 && v.re.abs() < 1e-14));
    }
}
