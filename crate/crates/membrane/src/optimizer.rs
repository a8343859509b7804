//! Rearrangement fixed point for the composite membrane problem: alternate a
//! ground-state solve with the measure-constrained sublevel-set update
//! `D ← {u ≤ c}`, which is the minimizing rearrangement at fixed `u`, so the
//! eigenvalue descends monotonically until both the eigenvalue and the set
//! stagnate.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::error::{Error, Result};
use crate::geometry::{
    rasterize_domain, weighted_quantile, DomainMask, DomainSpec, Grid2D, ScalarField,
};
use crate::spectral::{ground_state_from, SchrodingerOperator};

/// Initial potential region for the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitSet {
    /// Start from the plain-Laplacian ground state's sublevel set.
    Empty,
    /// Bernoulli cell inclusion with the given seed, smoothed and projected
    /// to measure `A` by the quantile.
    Seeded(u64),
    /// Cells nearest the boundary, projected to measure `A` (annulus-like).
    Annulus,
}

/// One record per fixed-point iteration.
#[derive(Debug, Clone, Copy)]
pub struct IterRecord {
    pub lambda: f64,
    pub c: f64,
    /// Measure of `D_{k+1} Δ D_k`.
    pub symdiff: f64,
}

/// Solver parameters; `tol` controls the eigenvalue stagnation test and the
/// eigensolver runs one order tighter.
#[derive(Debug, Clone, Copy)]
pub struct OptimizeParams {
    pub tol: f64,
    pub max_iter: usize,
    pub eigen_tol: f64,
}

impl Default for OptimizeParams {
    fn default() -> Self {
        OptimizeParams { tol: 1e-8, max_iter: 200, eigen_tol: 1e-9 }
    }
}

/// Converged (or best-effort) optimal configuration.
#[derive(Debug, Clone)]
pub struct OptimalPair {
    pub u: ScalarField,
    pub d: Arc<DomainMask>,
    pub c: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub a_target: f64,
    pub history: Vec<IterRecord>,
    pub converged: bool,
    /// Whether the standing assumption `α < Λ` holds.
    pub subcritical: bool,
    pub eigen_residual: f64,
}

impl OptimalPair {
    pub fn mask(&self) -> &Arc<DomainMask> {
        self.u.mask()
    }

    /// Wrap a plain eigenpair (no potential region) so that diagnostics that
    /// only need `(u, Λ, α, c, D)` can run on it.
    pub fn from_eigenpair(ep: &crate::spectral::EigenPair, mask: &Arc<DomainMask>) -> OptimalPair {
        let empty = DomainMask::from_cell_weights(mask, vec![0.0; mask.grid().n_cells()]);
        OptimalPair {
            u: ep.u.clone(),
            d: empty,
            c: 0.0,
            lambda: ep.lambda,
            alpha: 0.0,
            a_target: 0.0,
            history: Vec::new(),
            converged: true,
            subcritical: true,
            eigen_residual: ep.residual,
        }
    }
}

/// Point on the `Λ(A)` curve.
#[derive(Debug, Clone, Copy)]
pub struct CurveSample {
    pub a: f64,
    pub lambda: f64,
    pub c: f64,
    pub iterations: usize,
    pub subcritical: bool,
    pub converged: bool,
}

/// Ordered samples of `A ↦ Λ_Ω(α, A)` for fixed `α` and `Ω`.
#[derive(Debug, Clone)]
pub struct LambdaCurve {
    pub alpha: f64,
    pub samples: Vec<CurveSample>,
}

/// Per-sample residual of the shape-derivative identity `dΛ/dA = αc²`.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeResidual {
    pub a: f64,
    pub dlambda_da: f64,
    pub alpha_c2: f64,
    pub rel_residual: f64,
    /// Set when `c = 0` made the sample unusable.
    pub skipped: bool,
}

/// Summary of [`shape_derivative_residual`].
#[derive(Debug, Clone)]
pub struct DerivativeReport {
    pub samples: Vec<DerivativeResidual>,
    pub median: f64,
    pub max: f64,
}

/// Minimize `λ(α, D)` over `|D| = A` by the quantile fixed point.
pub fn optimize(
    spec: &DomainSpec,
    grid: &Arc<Grid2D>,
    alpha: f64,
    a_target: f64,
    init: InitSet,
    params: OptimizeParams,
) -> Result<OptimalPair> {
    let mask = rasterize_domain(spec, grid)?;
    optimize_on(&mask, alpha, a_target, init, params)
}

/// [`optimize`] on an already rasterized domain.
pub fn optimize_on(
    mask: &Arc<DomainMask>,
    alpha: f64,
    a_target: f64,
    init: InitSet,
    params: OptimizeParams,
) -> Result<OptimalPair> {
    if !(alpha > 0.0) {
        return Err(Error::invalid("optimize needs α > 0"));
    }
    if !(a_target > 0.0 && a_target < mask.measure()) {
        return Err(Error::invalid(format!(
            "target measure {a_target} must lie strictly inside (0, {})",
            mask.measure()
        )));
    }
    let d0 = initial_set(mask, a_target, init, params)?;
    run_fixed_point(mask, alpha, a_target, d0, None, params)
}

/// Warm-started variant used by sweeps: previous set and eigenvector.
pub fn optimize_warm(
    mask: &Arc<DomainMask>,
    alpha: f64,
    a_target: f64,
    d0: Arc<DomainMask>,
    u0: Option<&ScalarField>,
    params: OptimizeParams,
) -> Result<OptimalPair> {
    run_fixed_point(mask, alpha, a_target, d0, u0, params)
}

fn initial_set(
    mask: &Arc<DomainMask>,
    a_target: f64,
    init: InitSet,
    params: OptimizeParams,
) -> Result<Arc<DomainMask>> {
    match init {
        InitSet::Empty => {
            let op = SchrodingerOperator::laplacian(mask);
            let ep = ground_state_from(&op, params.eigen_tol, None)?;
            Ok(weighted_quantile(&ep.u, mask, a_target)?.d)
        }
        InitSet::Annulus => {
            // Distance to the boundary: small near ∂Ω, so the quantile picks
            // the annulus adjacent to the boundary.
            let spec = mask
                .spec()
                .ok_or_else(|| Error::invalid("annulus init needs a shape-backed mask"))?
                .clone();
            let dist = ScalarField::from_fn(mask, |x, y| -spec.signed_distance(x, y));
            Ok(weighted_quantile(&dist, mask, a_target)?.d)
        }
        InitSet::Seeded(seed) => {
            let grid = mask.grid().clone();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = (a_target / mask.measure()).clamp(0.05, 0.95);
            // Bernoulli cell indicator, transferred to nodes and smoothed so
            // the quantile cut produces a workable (non-fractal) start set.
            let mut node = vec![0.0f64; grid.n_nodes()];
            for j in 0..grid.ny - 1 {
                for i in 0..grid.nx - 1 {
                    if mask.cell_weight(grid.cell_idx(i, j)) > 0.0 && rng.gen::<f64>() < p {
                        for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                            node[grid.idx(i + di, j + dj)] += 0.25;
                        }
                    }
                }
            }
            let mut smooth = ScalarField::from_values(mask, node);
            for _ in 0..2 {
                smooth = five_point_average(&smooth);
            }
            // Higher indicator means "more likely in D": quantile keeps the
            // smallest values, so flip the sign.
            let flipped = ScalarField::from_values(
                mask,
                smooth.values().iter().map(|v| -v).collect(),
            );
            Ok(weighted_quantile(&flipped, mask, a_target)?.d)
        }
    }
}

fn five_point_average(f: &ScalarField) -> ScalarField {
    let g = f.grid().clone();
    let mut out = vec![0.0; g.n_nodes()];
    for j in 0..g.ny {
        for i in 0..g.nx {
            let mut s = f.at(i, j);
            let mut n = 1.0;
            if i > 0 {
                s += f.at(i - 1, j);
                n += 1.0;
            }
            if i + 1 < g.nx {
                s += f.at(i + 1, j);
                n += 1.0;
            }
            if j > 0 {
                s += f.at(i, j - 1);
                n += 1.0;
            }
            if j + 1 < g.ny {
                s += f.at(i, j + 1);
                n += 1.0;
            }
            out[g.idx(i, j)] = s / n;
        }
    }
    ScalarField::from_values(f.mask(), out)
}

fn run_fixed_point(
    mask: &Arc<DomainMask>,
    alpha: f64,
    a_target: f64,
    mut d: Arc<DomainMask>,
    u0: Option<&ScalarField>,
    params: OptimizeParams,
) -> Result<OptimalPair> {
    let cell = mask.grid().cell_area();
    let mut history: Vec<IterRecord> = Vec::new();
    let mut warm: Option<ScalarField> = u0.cloned();
    let mut prev_lambda = f64::MAX;
    for _k in 0..params.max_iter {
        let op = SchrodingerOperator::assemble(mask, &d, alpha)?;
        let ep = ground_state_from(&op, params.eigen_tol, warm.as_ref())?;
        let cut = weighted_quantile(&ep.u, mask, a_target)?;
        let symdiff = d.symdiff_measure(&cut.d);
        history.push(IterRecord { lambda: ep.lambda, c: cut.c, symdiff });

        let lambda_stalled = (prev_lambda - ep.lambda).abs() < params.tol;
        let set_stalled = symdiff < cell;
        prev_lambda = ep.lambda;
        if lambda_stalled && set_stalled {
            return Ok(OptimalPair {
                subcritical: alpha < ep.lambda,
                u: ep.u,
                d: cut.d,
                c: cut.c,
                lambda: ep.lambda,
                alpha,
                a_target,
                history,
                converged: true,
                eigen_residual: ep.residual,
            });
        }
        d = cut.d;
        warm = Some(ep.u);
    }
    // Non-convergence is reported with the full history, not silently.
    let op = SchrodingerOperator::assemble(mask, &d, alpha)?;
    let ep = ground_state_from(&op, params.eigen_tol, warm.as_ref())?;
    let cut = weighted_quantile(&ep.u, mask, a_target)?;
    Ok(OptimalPair {
        subcritical: alpha < ep.lambda,
        u: ep.u,
        d: cut.d,
        c: cut.c,
        lambda: ep.lambda,
        alpha,
        a_target,
        history,
        converged: false,
        eigen_residual: ep.residual,
    })
}

/// Sweep `Λ(A)` over an increasing list of targets, warm-starting each sample
/// from the previous converged set.
pub fn sweep(
    mask: &Arc<DomainMask>,
    alpha: f64,
    a_list: &[f64],
    init: InitSet,
    params: OptimizeParams,
) -> Result<(LambdaCurve, Vec<OptimalPair>)> {
    if a_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("A-list must be strictly increasing"));
    }
    if a_list.is_empty()
        || a_list[0] <= 0.0
        || *a_list.last().unwrap() >= mask.measure()
    {
        return Err(Error::invalid("A-list must lie strictly inside (0, |Ω|)"));
    }
    let mut samples = Vec::new();
    let mut pairs = Vec::new();
    let mut warm: Option<(Arc<DomainMask>, ScalarField)> = None;
    for &a in a_list {
        let run = match &warm {
            None => optimize_on(mask, alpha, a, init, params),
            Some((d_prev, u_prev)) => {
                // Re-project the previous set to the new measure before the solve.
                let d0 = weighted_quantile(u_prev, mask, a)
                    .map(|cut| cut.d)
                    .unwrap_or_else(|_| d_prev.clone());
                optimize_warm(mask, alpha, a, d0, Some(u_prev), params)
            }
        };
        match run {
            Ok(pair) => {
                samples.push(CurveSample {
                    a,
                    lambda: pair.lambda,
                    c: pair.c,
                    iterations: pair.history.len(),
                    subcritical: pair.subcritical,
                    converged: pair.converged,
                });
                warm = Some((pair.d.clone(), pair.u.clone()));
                pairs.push(pair);
            }
            Err(e) => {
                // Propagate per-sample failures without aborting the sweep.
                samples.push(CurveSample {
                    a,
                    lambda: f64::NAN,
                    c: f64::NAN,
                    iterations: 0,
                    subcritical: false,
                    converged: false,
                });
                eprintln!("sweep sample A={a} failed: {e}");
            }
        }
    }
    Ok((LambdaCurve { alpha, samples }, pairs))
}

/// Central-difference check of `dΛ/dA = αc²` on the interior curve samples.
pub fn shape_derivative_residual(curve: &LambdaCurve, alpha: f64) -> Result<DerivativeReport> {
    let s = &curve.samples;
    if s.len() < 3 {
        return Err(Error::invalid("need at least 3 curve samples"));
    }
    let mut samples = Vec::new();
    for i in 1..s.len() - 1 {
        let (lo, mid, hi) = (&s[i - 1], &s[i], &s[i + 1]);
        if !lo.lambda.is_finite() || !mid.lambda.is_finite() || !hi.lambda.is_finite() {
            continue;
        }
        let dlambda_da = (hi.lambda - lo.lambda) / (hi.a - lo.a);
        let alpha_c2 = alpha * mid.c * mid.c;
        if alpha_c2 <= 0.0 {
            samples.push(DerivativeResidual {
                a: mid.a,
                dlambda_da,
                alpha_c2,
                rel_residual: f64::NAN,
                skipped: true,
            });
            continue;
        }
        samples.push(DerivativeResidual {
            a: mid.a,
            dlambda_da,
            alpha_c2,
            rel_residual: (dlambda_da - alpha_c2).abs() / alpha_c2,
            skipped: false,
        });
    }
    let mut vals: Vec<f64> = samples
        .iter()
        .filter(|r| !r.skipped)
        .map(|r| r.rel_residual)
        .collect();
    if vals.is_empty() {
        return Err(Error::invalid("no usable interior samples (c = 0 everywhere)"));
    }
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = vals[vals.len() / 2];
    let max = *vals.last().unwrap();
    Ok(DerivativeReport { samples, median, max })
}
