use rayon::prelude::*;

use super::modes::{AxisModes, ModeCatalog};
use super::spec::{clear_denominator, Axis, Factor, OperatorSpec, Poly3, Term};
use super::tensor::{apply_along, cumulative_along, cumulative_integral};
use crate::error::{Error, Result};
use crate::linalg::{kron, matvec};

/// A polynomial term of degree ≥ 2 in the unknowns, evaluated on the quadrature grid.
#[derive(Debug, Clone)]
struct GridTerm {
    equation: usize,
    scale: f64,
    coefficient: Poly3,
    factors: Vec<Factor>,
}

/// The reduced algebraic system `ℓ(a) = M a + n(a) − r = 0`.
///
/// Equation `(e, K)` is the projection of equation `e` onto the tensor mode `K`; unknown
/// `(c, I)` is the coefficient of component `c` on mode `I`. Both are laid out component
/// by component, each block row-major over the catalog axes.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub components: usize,
    pub counts: Vec<usize>,
    pub axes: Vec<Axis>,
    pub unknowns: usize,
    pub equations: usize,
    /// Evolution problems are posed as `u − u(0) − ∫₀ᵗ R(u) = 0` along the time axis.
    pub volterra: bool,
    /// Row-major `equations × unknowns` linear part.
    pub matrix: Vec<f64>,
    pub rhs: Vec<f64>,
    nonlinear: Vec<GridTerm>,
    catalog: ModeCatalog,
}

/// Initial data for evolution problems: per component, the projection of `u(0)` onto the
/// spatial modes (as returned by [`ModeCatalog::project_spatial`]).
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub coefficients: Vec<Vec<f64>>,
}

fn unsupported(msg: impl Into<String>) -> Error {
    Error::UnsupportedTerm(msg.into())
}

/// `τ[k, i] = ⟨x^power ∂^order ψ_i, ψ_k⟩`, or with `∫₀ˣ` applied to the trial side.
fn axis_operator(ax: &AxisModes, power: u32, order: usize, integrate: bool) -> Vec<f64> {
    let (n, m) = (ax.len(), ax.quad_len());
    let test = ax.samples(0);
    let ext = if integrate { ax.samples_extended(order) } else { Vec::new() };
    let nodes = ax.nodes_extended();
    let trial: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            if integrate {
                let g: Vec<f64> = (0..=m).map(|t| nodes[t].powi(power as i32) * ext[i * (m + 1) + t]).collect();
                cumulative_integral(&g, ax.weight)
            } else {
                let x = ax.samples(order);
                (0..m).map(|t| ax.nodes[t].powi(power as i32) * x[i * m + t]).collect()
            }
        })
        .collect();
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
        let tk = &test[k * m..(k + 1) * m];
        for (i, v) in row.iter_mut().enumerate() {
            *v = tk.iter().zip(&trial[i]).map(|(a, b)| a * b).sum::<f64>() * ax.weight;
        }
    });
    out
}

/// `v[k] = ⟨x^power, ψ_k⟩`, or `⟨∫₀ˣ s^power ds, ψ_k⟩`.
fn axis_source(ax: &AxisModes, power: u32, integrate: bool) -> Vec<f64> {
    let m = ax.quad_len();
    let g: Vec<f64> = if integrate {
        let nodes = ax.nodes_extended();
        let f: Vec<f64> = nodes.iter().map(|x| x.powi(power as i32)).collect();
        cumulative_integral(&f, ax.weight)
    } else {
        ax.nodes.iter().map(|x| x.powi(power as i32)).collect()
    };
    let test = ax.samples(0);
    (0..ax.len())
        .map(|k| test[k * m..(k + 1) * m].iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() * ax.weight)
        .collect()
}

fn kron_all(mats: &[(Vec<f64>, usize)]) -> (Vec<f64>, usize) {
    let mut acc = (vec![1.0], 1usize);
    for (m, n) in mats {
        acc = (kron(&acc.0, acc.1, m, *n), acc.1 * n);
    }
    acc
}

fn kron_vectors(vs: &[Vec<f64>]) -> Vec<f64> {
    let mut acc = vec![1.0];
    for v in vs {
        acc = acc.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
    }
    acc
}

/// Refuses terms that act along axes the catalog does not have.
fn check_axes(term: &Term, factors: &[Factor], catalog: &ModeCatalog) -> Result<()> {
    for axis in [Axis::T, Axis::Q, Axis::P] {
        if catalog.axis(axis).is_some() {
            continue;
        }
        let i = axis.index();
        if term.coefficient.monomials.iter().any(|m| m.powers[i] > 0) {
            return Err(unsupported(format!("coefficient depends on {} but the catalog has no such axis", axis.name())));
        }
        if factors.iter().any(|f| f.orders[i] > 0) {
            return Err(unsupported(format!("derivative along {} but the catalog has no such axis", axis.name())));
        }
    }
    Ok(())
}

fn pole_check(q: &Poly3, catalog: &ModeCatalog) -> Result<()> {
    // sample the catalog box at up to 64 nodes per axis
    let grids: Vec<(usize, Vec<f64>)> = catalog
        .axes
        .iter()
        .map(|a| {
            let stride = (a.quad_len() / 64).max(1);
            (a.axis().index(), a.nodes.iter().step_by(stride).copied().collect())
        })
        .collect();
    let total: usize = grids.iter().map(|g| g.1.len()).product();
    let (mut lo, mut hi, mut min_abs) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    for flat in 0..total {
        let mut x = [0.0; 3];
        let mut rem = flat;
        for (idx, nodes) in grids.iter().rev() {
            x[*idx] = nodes[rem % nodes.len()];
            rem /= nodes.len();
        }
        let v = q.eval(x);
        lo = lo.min(v);
        hi = hi.max(v);
        min_abs = min_abs.min(v.abs());
    }
    let peak = lo.abs().max(hi.abs());
    if lo <= 0.0 && hi >= 0.0 || min_abs <= 1e-12 * peak {
        return Err(Error::PoleInDenominator(min_abs));
    }
    Ok(())
}

/// Builds the `d·Nⁿ` residual functionals of `op` on the catalog.
///
/// When the catalog has a time axis, each equation must read `c ∂_t u_e + R_e(u) = 0`
/// with constant `c`; it is assembled in the integrated form
/// `u_e − u_e(0) + (1/c) ∫₀ᵗ R_e(u) = 0`.
pub fn assemble(op: &OperatorSpec, modes: &ModeCatalog, initial: Option<&InitialData>) -> Result<GalerkinSystem> {
    op.validate()?;
    let (cleared, checkable) = clear_denominator(op);
    for q in checkable.iter().flatten() {
        pole_check(q, modes)?;
    }
    let mut catalog = modes.clone();
    let d = op.components;
    let counts = catalog.counts();
    let per = catalog.size();
    let unknowns = d * per;
    let volterra = catalog.axis(Axis::T).is_some();
    let time_pos = catalog.position(Axis::T);

    // split off the leading ∂_t term of each equation
    let mut lead = vec![None; d];
    let mut body: Vec<(Term, Vec<Factor>)> = Vec::new();
    for t in &cleared.terms {
        let factors = t.expanded_factors()?;
        let has_dt = factors.iter().any(|f| f.orders[0] > 0);
        if has_dt {
            if !volterra {
                return Err(unsupported("time derivative without a time axis"));
            }
            let is_lead = factors.len() == 1
                && factors[0].orders == [1, 0, 0]
                && factors[0].component == t.equation
                && t.coefficient.monomials.iter().all(|m| m.powers == [0; 3]);
            if !is_lead {
                return Err(unsupported("only a constant-coefficient ∂_t u_e may carry a time derivative"));
            }
            let c: f64 = t.coefficient.monomials.iter().map(|m| m.coeff).sum();
            lead[t.equation] = Some(lead[t.equation].unwrap_or(0.0) + c);
            continue;
        }
        check_axes(t, &factors, &catalog)?;
        body.push((t.clone(), factors));
    }
    let scales: Vec<f64> = if volterra {
        lead.iter()
            .enumerate()
            .map(|(e, c)| match c {
                Some(c) if *c != 0.0 => Ok(1.0 / c),
                _ => Err(unsupported(format!("equation {e} has no time derivative"))),
            })
            .collect::<Result<_>>()?
    } else {
        vec![1.0; d]
    };

    for (_, factors) in &body {
        for f in factors {
            for (k, ax) in catalog.axes.clone().iter().enumerate() {
                catalog.ensure_order(k, f.orders[ax.axis().index()])?;
            }
        }
    }

    let mut matrix = vec![0.0; unknowns * unknowns];
    let mut rhs = vec![0.0; unknowns];
    let add_block = |matrix: &mut Vec<f64>, e: usize, c: usize, block: &[f64]| {
        matrix.par_chunks_mut(unknowns).skip(e * per).take(per).enumerate().for_each(|(k, row)| {
            for (dst, src) in row[c * per..(c + 1) * per].iter_mut().zip(&block[k * per..(k + 1) * per]) {
                *dst += src;
            }
        });
    };

    if volterra {
        // u_e − u_e(0)
        let grams: Vec<(Vec<f64>, usize)> =
            catalog.axes.iter().map(|ax| (axis_operator(ax, 0, 0, false), ax.len())).collect();
        let (gram, _) = kron_all(&grams);
        let tp = time_pos.expect("time axis");
        let ones = axis_source(&catalog.axes[tp], 0, false);
        for e in 0..d {
            add_block(&mut matrix, e, e, &gram);
            if let Some(init) = initial {
                let b0 = init.coefficients.get(e).ok_or_else(|| {
                    Error::ShapeMismatch(format!("initial data has {} components, need {d}", init.coefficients.len()))
                })?;
                if b0.len() * ones.len() != per {
                    return Err(Error::ShapeMismatch(format!(
                        "initial data has {} spatial coefficients, catalog needs {}",
                        b0.len(),
                        per / ones.len()
                    )));
                }
                for (k, v) in kron_vectors(&[ones.clone(), b0.clone()]).into_iter().enumerate() {
                    rhs[e * per + k] += v;
                }
            }
        }
    }

    let mut nonlinear = Vec::new();
    for (term, factors) in body {
        let e = term.equation;
        let scale = scales[e];
        match factors.len() {
            0 => {
                for mono in &term.coefficient.monomials {
                    let vs: Vec<Vec<f64>> = catalog
                        .axes
                        .iter()
                        .map(|ax| axis_source(ax, mono.powers[ax.axis().index()], volterra && ax.axis() == Axis::T))
                        .collect();
                    for (k, v) in kron_vectors(&vs).into_iter().enumerate() {
                        rhs[e * per + k] -= scale * mono.coeff * v;
                    }
                }
            }
            1 => {
                let f = factors[0];
                for mono in &term.coefficient.monomials {
                    let mats: Vec<(Vec<f64>, usize)> = catalog
                        .axes
                        .iter()
                        .map(|ax| {
                            let i = ax.axis().index();
                            let integrate = volterra && ax.axis() == Axis::T;
                            (axis_operator(ax, mono.powers[i], f.orders[i], integrate), ax.len())
                        })
                        .collect();
                    let (mut block, _) = kron_all(&mats);
                    let s = scale * mono.coeff;
                    block.par_iter_mut().for_each(|v| *v *= s);
                    add_block(&mut matrix, e, f.component, &block);
                }
            }
            _ => nonlinear.push(GridTerm { equation: e, scale, coefficient: term.coefficient.clone(), factors }),
        }
    }

    log::debug!("assembled {unknowns} unknowns ({} nonlinear terms)", nonlinear.len());
    Ok(GalerkinSystem {
        components: d,
        axes: catalog.axes.iter().map(|a| a.axis()).collect(),
        counts,
        unknowns,
        equations: unknowns,
        volterra,
        matrix,
        rhs,
        nonlinear,
        catalog,
    })
}

impl GalerkinSystem {
    pub fn is_linear(&self) -> bool {
        self.nonlinear.is_empty()
    }

    pub fn catalog(&self) -> &ModeCatalog {
        &self.catalog
    }

    /// Modes per component.
    pub fn block_size(&self) -> usize {
        self.unknowns / self.components
    }

    /// Polynomial degree of the residual in the unknowns.
    pub fn degree(&self) -> usize {
        self.nonlinear.iter().map(|t| t.factors.len()).max().unwrap_or(1)
    }

    /// `ℓ(a) = M a + n(a) − r`.
    pub fn residual(&self, a: &[f64]) -> Result<Vec<f64>> {
        if a.len() != self.unknowns {
            return Err(Error::LengthMismatch { expected: self.unknowns, got: a.len() });
        }
        let mut r = matvec(&self.matrix, self.equations, self.unknowns, a);
        for (v, b) in r.iter_mut().zip(&self.rhs) {
            *v -= b;
        }
        let per = self.block_size();
        for term in &self.nonlinear {
            let fields: Vec<Vec<f64>> = term.factors.iter().map(|f| self.field(&a[f.component * per..][..per], f)).collect();
            let mut g = self.coefficient_field(&term.coefficient);
            for fld in &fields {
                g.iter_mut().zip(fld).for_each(|(x, y)| *x *= y);
            }
            let p = self.project_grid(g);
            for (k, v) in p.into_iter().enumerate() {
                r[term.equation * per + k] += term.scale * v;
            }
        }
        Ok(r)
    }

    /// `∂ℓ/∂a` at `a`.
    pub fn jacobian(&self, a: &[f64]) -> Result<Vec<f64>> {
        if a.len() != self.unknowns {
            return Err(Error::LengthMismatch { expected: self.unknowns, got: a.len() });
        }
        let mut jac = self.matrix.clone();
        let per = self.block_size();
        let u = self.unknowns;
        for term in &self.nonlinear {
            let fields: Vec<Vec<f64>> = term.factors.iter().map(|f| self.field(&a[f.component * per..][..per], f)).collect();
            let coef = self.coefficient_field(&term.coefficient);
            for (i, f) in term.factors.iter().enumerate() {
                let mut g: Vec<f64> = coef.iter().map(|c| c * term.scale).collect();
                for (l, fld) in fields.iter().enumerate() {
                    if l != i {
                        g.iter_mut().zip(fld).for_each(|(x, y)| *x *= y);
                    }
                }
                let block = self.pair_matrix(&g, f.orders);
                for k in 0..per {
                    let row = &mut jac[(term.equation * per + k) * u + f.component * per..][..per];
                    for (dst, src) in row.iter_mut().zip(&block[k * per..(k + 1) * per]) {
                        *dst += src;
                    }
                }
            }
        }
        Ok(jac)
    }

    fn integrates(&self, ax: &AxisModes) -> bool {
        self.volterra && ax.axis() == Axis::T
    }

    fn grid_dims(&self) -> Vec<usize> {
        self.catalog.axes.iter().map(|ax| ax.quad_len() + usize::from(self.integrates(ax))).collect()
    }

    /// `∂^orders u` on the (time-extended) quadrature grid.
    fn field(&self, coeffs: &[f64], f: &Factor) -> Vec<f64> {
        let mut data = coeffs.to_vec();
        let mut dims = self.counts.clone();
        for (k, ax) in self.catalog.axes.iter().enumerate() {
            let order = f.orders[ax.axis().index()];
            let (n, m) = (ax.len(), ax.quad_len() + usize::from(self.integrates(ax)));
            let x = if self.integrates(ax) { ax.samples_extended(order) } else { ax.samples(order).to_vec() };
            let xt: Vec<f64> = (0..m * n).map(|idx| x[(idx % n) * m + idx / n]).collect();
            data = apply_along(&data, &dims, k, &xt, m);
            dims[k] = m;
        }
        data
    }

    fn coefficient_field(&self, poly: &Poly3) -> Vec<f64> {
        let nodes: Vec<(usize, Vec<f64>)> = self
            .catalog
            .axes
            .iter()
            .map(|ax| (ax.axis().index(), if self.integrates(ax) { ax.nodes_extended() } else { ax.nodes.clone() }))
            .collect();
        let dims = self.grid_dims();
        let total: usize = dims.iter().product();
        (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut x = [0.0; 3];
                let mut rem = flat;
                for (idx, nd) in nodes.iter().rev() {
                    x[*idx] = nd[rem % nd.len()];
                    rem /= nd.len();
                }
                poly.eval(x)
            })
            .collect()
    }

    /// `⟨g, Ψ_K⟩` (with `∫₀ᵗ` first along time for integrated problems).
    fn project_grid(&self, mut data: Vec<f64>) -> Vec<f64> {
        let mut dims = self.grid_dims();
        for (k, ax) in self.catalog.axes.iter().enumerate() {
            if self.integrates(ax) {
                data = cumulative_along(&data, &dims, k, ax.weight);
                dims[k] -= 1;
            }
            let mat: Vec<f64> = ax.samples(0).iter().map(|v| v * ax.weight).collect();
            data = apply_along(&data, &dims, k, &mat, ax.len());
            dims[k] = ax.len();
        }
        data
    }

    /// `B[K, J] = ⟨g ∂^orders Ψ_J, Ψ_K⟩` (trial side integrated in time when required).
    fn pair_matrix(&self, g: &[f64], orders: [usize; 3]) -> Vec<f64> {
        let mut data = g.to_vec();
        let grid = self.grid_dims();
        let axes = &self.catalog.axes;
        let mut outer = 1usize;
        for (k, ax) in axes.iter().enumerate() {
            let n = ax.len();
            let len = grid[k];
            let inner: usize = grid[k + 1..].iter().product();
            let integrate = self.integrates(ax);
            let trial = if integrate { ax.samples_extended(orders[ax.axis().index()]) } else { ax.samples(orders[ax.axis().index()]).to_vec() };
            let test = ax.samples(0);
            let m = ax.quad_len();
            let w = ax.weight;
            let src = &data;
            let pieces: Vec<Vec<f64>> = (0..outer * inner)
                .into_par_iter()
                .map(|idx| {
                    let (o, r) = (idx / inner, idx % inner);
                    let line: Vec<f64> = (0..len).map(|t| src[(o * len + t) * inner + r]).collect();
                    let mut out = vec![0.0; n * n];
                    for j in 0..n {
                        let mut h: Vec<f64> = (0..len).map(|t| trial[j * len + t] * line[t]).collect();
                        if integrate {
                            h = cumulative_integral(&h, w);
                        }
                        for kk in 0..n {
                            out[kk * n + j] = test[kk * m..(kk + 1) * m].iter().zip(&h).map(|(a, b)| a * b).sum::<f64>() * w;
                        }
                    }
                    out
                })
                .collect();
            let mut next = vec![0.0; outer * n * n * inner];
            for (idx, piece) in pieces.into_iter().enumerate() {
                let (o, r) = (idx / inner, idx % inner);
                for (p, v) in piece.into_iter().enumerate() {
                    next[(o * n * n + p) * inner + r] = v;
                }
            }
            data = next;
            outer *= n * n;
        }
        // data is indexed by (k0 j0, k1 j1, …); regroup into (K, J)
        let per = self.block_size();
        let mut out = vec![0.0; per * per];
        for (flat, v) in data.into_iter().enumerate() {
            let mut rem = flat;
            let (mut kk, mut jj, mut stride) = (0usize, 0usize, 1usize);
            for ax in axes.iter().rev() {
                let n = ax.len();
                let pair = rem % (n * n);
                rem /= n * n;
                kk += (pair / n) * stride;
                jj += (pair % n) * stride;
                stride *= n;
            }
            out[kk * per + jj] = v;
        }
        out
    }
}
