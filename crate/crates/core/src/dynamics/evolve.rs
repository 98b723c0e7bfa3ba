use super::field::WignerField;
use super::rhs::{moyal_coefficient, PhaseSpaceRhs, RhsKind};
use crate::error::{Error, Result};
use crate::operator::PolynomialPotential;

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Steps between stored snapshots; the final state is always stored.
    pub snapshot_stride: usize,
    pub rhs: PhaseSpaceRhs,
}

impl EvolveOptions {
    pub fn new(t_end: f64, dt: f64, snapshot_stride: usize) -> Self {
        Self { t_end, dt, snapshot_stride, rhs: PhaseSpaceRhs::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<WignerField>,
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    /// `⟨H⟩` per snapshot for closed evolutions.
    pub energy: Option<Vec<f64>>,
    pub dt: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &WignerField {
        self.snapshots.last().expect("trajectory is never empty")
    }

    pub fn max_mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        self.mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max)
    }
}

fn max_abs_on(u: &PolynomialPotential, q: &[f64]) -> f64 {
    q.iter().map(|&x| u.eval(x).abs()).fold(0.0, f64::max)
}

/// Pre-flight RK4 step bound: half the shortest time scale among all terms, each scale
/// being `1 / (coefficient · (ρ/h)^order)` with ρ the stencil's spectral radius.
pub fn stability_bound(w: &WignerField, u: &PolynomialPotential, kind: &RhsKind, rhs: &PhaseSpaceRhs) -> f64 {
    let rho = rhs.stencil.spectral_radius();
    let g = &w.grid;
    let q = g.q_points();
    let pmax = g.p_points().iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let kq = rho / g.h_q();
    let kp = rho / g.h_p();
    let mut rates = vec![pmax * kq / w.mass, max_abs_on(&u.derivative(1), &q) * kp];
    let (trunc, params) = match kind {
        RhsKind::Liouville => (None, None),
        RhsKind::Moyal(t) => (Some(*t), None),
        RhsKind::Lindblad(t, p) => (Some(*t), Some(*p)),
    };
    if let Some(t) = trunc {
        if w.hbar > 0.0 {
            for ell in 1..=t.resolve(u) {
                let c = moyal_coefficient(w.hbar, ell).abs();
                rates.push(c * max_abs_on(&u.derivative(2 * ell + 1), &q) * kp.powi(2 * ell as i32 + 1));
            }
        }
    }
    if let Some(p) = params {
        rates.push(2.0 * p.gamma * (1.0 + pmax * kp));
        rates.push(p.diffusion * kp * kp);
    }
    let fastest = rates.into_iter().fold(0.0, f64::max);
    if fastest == 0.0 {
        f64::INFINITY
    } else {
        0.5 / fastest
    }
}

fn axpy(y: &WignerField, a: f64, k: &ndarray::Array2<f64>) -> WignerField {
    let mut out = y.clone();
    out.values.scaled_add(a, k);
    out
}

/// Classic four-stage Runge–Kutta integration with conserved-quantity tracking.
pub fn evolve(w0: &WignerField, u: &PolynomialPotential, kind: &RhsKind, opts: &EvolveOptions) -> Result<Trajectory> {
    if !(opts.dt > 0.0 && opts.dt.is_finite()) || !(opts.t_end >= 0.0 && opts.t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt {} and t_end {} must be positive", opts.dt, opts.t_end)));
    }
    if opts.snapshot_stride == 0 {
        return Err(Error::InvalidArgument("snapshot stride must be at least 1".into()));
    }
    let bound = stability_bound(w0, u, kind, &opts.rhs);
    if opts.dt > bound {
        return Err(Error::StepTooLarge { dt: opts.dt, bound });
    }
    if w0.boundary_ratio() > 1e-12 {
        log::warn!("field reaches the periodic boundary (edge/peak = {:.2e})", w0.boundary_ratio());
    }
    let steps = if opts.t_end == 0.0 { 0 } else { (opts.t_end / opts.dt - 1e-9).ceil() as usize };
    let dt = if steps == 0 { opts.dt } else { opts.t_end / steps as f64 };
    let closed = match kind {
        RhsKind::Lindblad(_, p) => p.gamma == 0.0 && p.diffusion == 0.0,
        _ => true,
    };
    let mut traj = Trajectory {
        snapshots: Vec::new(),
        times: Vec::new(),
        mass: Vec::new(),
        energy: closed.then(Vec::new),
        dt,
        steps,
    };
    let record = |traj: &mut Trajectory, w: &WignerField| {
        traj.times.push(w.time);
        traj.mass.push(w.integral());
        if let Some(e) = traj.energy.as_mut() {
            e.push(w.energy(u));
        }
        traj.snapshots.push(w.clone());
    };
    let mut w = w0.clone();
    w.time = 0.0;
    record(&mut traj, &w);
    let mut last_norm = w.l2_norm();
    for step in 1..=steps {
        let k1 = opts.rhs.rate(&w, u, kind)?;
        let k2 = opts.rhs.rate(&axpy(&w, 0.5 * dt, &k1), u, kind)?;
        let k3 = opts.rhs.rate(&axpy(&w, 0.5 * dt, &k2), u, kind)?;
        let k4 = opts.rhs.rate(&axpy(&w, dt, &k3), u, kind)?;
        let mut incr = k1;
        incr.scaled_add(2.0, &k2);
        incr.scaled_add(2.0, &k3);
        incr += &k4;
        w.values.scaled_add(dt / 6.0, &incr);
        w.time = step as f64 * dt;
        if step % opts.snapshot_stride == 0 || step == steps {
            let norm = w.l2_norm();
            if !norm.is_finite() || (last_norm > 0.0 && norm > 10.0 * last_norm) {
                return Err(Error::UnstableStep { time: w.time, growth: norm / last_norm });
            }
            last_norm = norm;
            record(&mut traj, &w);
        }
    }
    Ok(traj)
}
