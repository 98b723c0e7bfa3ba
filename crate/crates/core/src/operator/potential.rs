/// `U(q) = Σ_k c_k q^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPotential {
    pub coefficients: Vec<f64>,
}

impl PolynomialPotential {
    pub fn new(coefficients: Vec<f64>) -> Self {
        let mut c = coefficients;
        while c.last() == Some(&0.0) {
            c.pop();
        }
        Self { coefficients: c }
    }

    pub fn zero() -> Self {
        Self { coefficients: Vec::new() }
    }

    /// `U = ω² q² / 2` (unit mass scaling absorbed in ω).
    pub fn harmonic(omega: f64) -> Self {
        Self::new(vec![0.0, 0.0, 0.5 * omega * omega])
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }

    pub fn derivative(&self, k: usize) -> Self {
        if k >= self.coefficients.len() {
            return Self::zero();
        }
        let c = (k..self.coefficients.len())
            .map(|i| {
                let falling: f64 = (i + 1 - k..=i).map(|v| v as f64).product();
                self.coefficients[i] * falling
            })
            .collect();
        Self::new(c)
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * q + c)
    }

    /// Number of odd-order Moyal terms beyond ℓ = 0 that do not vanish.
    pub fn moyal_termination(&self) -> usize {
        self.degree().saturating_sub(1) / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives() {
        let u = PolynomialPotential::new(vec![0.0, 0.0, -0.5, 0.0, 0.25]);
        assert_eq!(u.derivative(1).coefficients, vec![0.0, -1.0, 0.0, 1.0]);
        assert_eq!(u.derivative(3).coefficients, vec![0.0, 6.0]);
        assert!(u.derivative(5).is_zero());
        assert!(PolynomialPotential::harmonic(1.0).derivative(3).is_zero());
        assert_eq!(u.moyal_termination(), 1);
        assert_eq!(PolynomialPotential::harmonic(1.0).moyal_termination(), 0);
        assert_eq!(u.eval(2.0), -2.0 + 4.0);
    }
}
