use super::assemble::GalerkinSystem;
use crate::error::{Error, Result};
use crate::linalg::{matvec, norm1, Lu};

/// Linear systems with a larger estimated 1-norm condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;
/// Relative residual target of the direct solve.
pub const LINEAR_TOLERANCE: f64 = 1e-8;
/// Absolute residual target of Newton's method.
pub const NEWTON_TOLERANCE: f64 = 1e-8;
pub const NEWTON_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub coefficients: Vec<f64>,
    /// `‖ℓ(a)‖₂` at the returned coefficients.
    pub residual_norm: f64,
    pub rhs_norm: f64,
    /// Estimated `κ₁` of the (last) factorised matrix.
    pub condition_estimate: f64,
    /// Newton iterations, or refinement sweeps for linear systems.
    pub iterations: usize,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn factor_checked(matrix: Vec<f64>, n: usize) -> Result<(Lu, f64)> {
    let a_norm = norm1(&matrix, n);
    let lu = Lu::factor(matrix, n)?;
    let cond = a_norm * lu.inverse_norm1_estimate();
    if !(cond <= MAX_CONDITION) {
        return Err(Error::SingularSystem(cond));
    }
    Ok((lu, cond))
}

/// Dense LU for linear systems (with iterative refinement), damped Newton otherwise.
pub fn solve(system: &GalerkinSystem) -> Result<Solution> {
    if system.equations != system.unknowns {
        return Err(Error::ShapeMismatch(format!(
            "{} equations for {} unknowns",
            system.equations, system.unknowns
        )));
    }
    if system.is_linear() {
        solve_linear(system)
    } else {
        solve_newton(system)
    }
}

fn solve_linear(system: &GalerkinSystem) -> Result<Solution> {
    let n = system.unknowns;
    let (lu, cond) = factor_checked(system.matrix.clone(), n)?;
    let b = &system.rhs;
    let rhs_norm = norm2(b);
    let mut x = lu.solve(b);
    let mut sweeps = 0;
    let residual = |x: &[f64]| -> Vec<f64> {
        let ax = matvec(&system.matrix, n, n, x);
        b.iter().zip(ax).map(|(bi, v)| bi - v).collect()
    };
    let mut r = residual(&x);
    // one refinement sweep always; more only while the target is missed
    while sweeps < 3 {
        let dx = lu.solve(&r);
        x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += d);
        sweeps += 1;
        r = residual(&x);
        if norm2(&r) <= LINEAR_TOLERANCE * rhs_norm {
            break;
        }
    }
    let residual_norm = norm2(&r);
    if residual_norm > LINEAR_TOLERANCE * rhs_norm {
        log::warn!("linear residual {residual_norm:.3e} above target for |rhs| = {rhs_norm:.3e}");
    }
    Ok(Solution { coefficients: x, residual_norm, rhs_norm, condition_estimate: cond, iterations: sweeps })
}

fn solve_newton(system: &GalerkinSystem) -> Result<Solution> {
    let n = system.unknowns;
    let rhs_norm = norm2(&system.rhs);
    let mut a = vec![0.0; n];
    let mut r = system.residual(&a)?;
    let mut rn = norm2(&r);
    let mut cond = f64::NAN;
    for it in 0..NEWTON_MAX_ITERATIONS {
        if rn <= NEWTON_TOLERANCE {
            return Ok(Solution { coefficients: a, residual_norm: rn, rhs_norm, condition_estimate: cond, iterations: it });
        }
        let (lu, c) = match factor_checked(system.jacobian(&a)?, n) {
            Ok(f) => f,
            Err(Error::SingularSystem(_)) => {
                // a singular Jacobian (e.g. at the zero guess) is left along +1
                a.iter_mut().for_each(|v| *v += 1e-3 * v.abs().max(1.0));
                r = system.residual(&a)?;
                rn = norm2(&r);
                continue;
            }
            Err(e) => return Err(e),
        };
        cond = c;
        let step = lu.solve(&r);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = a.iter().zip(&step).map(|(x, d)| x - lambda * d).collect();
            let tr = system.residual(&trial)?;
            let tn = norm2(&tr);
            if tn < rn {
                a = trial;
                r = tr;
                rn = tn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NewtonDiverged { iterations: it + 1, residual: rn });
        }
    }
    if rn <= NEWTON_TOLERANCE {
        return Ok(Solution {
            coefficients: a,
            residual_norm: rn,
            rhs_norm,
            condition_estimate: cond,
            iterations: NEWTON_MAX_ITERATIONS,
        });
    }
    Err(Error::NewtonDiverged { iterations: NEWTON_MAX_ITERATIONS, residual: rn })
}
