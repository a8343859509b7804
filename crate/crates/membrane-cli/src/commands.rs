//! Subcommand implementations. Each consumes the run config and writes the
//! CSV/PGM/manifest outputs for its module; all outputs are deterministic
//! for a fixed config and seed.

use std::path::Path;
use std::sync::Arc;

use membrane::diagnostics::{
    gradient_on_boundary, levelset_thickness, pohozaev_residual, symmetry_singularity_check,
    weak_uniqueness_experiment, DEFAULT_TAU,
};
use membrane::freeboundary::{
    blowup, extract_contour, to_two_phase, DMode, TwoPhaseField, WeissMode, DEFAULT_GAMMA,
    DEFAULT_TOL_W,
};
use membrane::geometry::{rasterize_domain, DomainMask, Grid2D, ScalarField};
use membrane::homogeneous2d::{
    blank_profile, halfplane, nonnegative, pde_residual, weiss_constancy,
};
use membrane::optimizer::{
    optimize_on, shape_derivative_residual, sweep, InitSet, OptimalPair, OptimizeParams,
};

use crate::config::RunConfig;
use crate::output::{fmt, Manifest, OutDir};

/// Exit-code-bearing command error.
pub enum CmdError {
    /// Bad configuration or input (exit 1).
    Config(String),
    /// Numerical non-convergence or failed experiment (exit 2).
    Numerics(String),
}

impl From<crate::config::ConfigError> for CmdError {
    fn from(e: crate::config::ConfigError) -> Self {
        CmdError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Config(format!("io error: {e}"))
    }
}

fn numerics(e: membrane::Error) -> CmdError {
    match e {
        membrane::Error::InvalidInput(m) => CmdError::Config(m),
        membrane::Error::Io(m) => CmdError::Config(format!("io error: {m}")),
        other => CmdError::Numerics(other.to_string()),
    }
}

type CmdResult = Result<(), CmdError>;

pub struct Ctx {
    pub cfg: RunConfig,
    pub out: OutDir,
    pub threads: usize,
    pub seed_override: Option<u64>,
}

impl Ctx {
    fn mask(&self) -> Result<Arc<DomainMask>, CmdError> {
        let spec = self.cfg.domain()?;
        let (bbox, nx, ny) = self.cfg.grid_dims(&spec)?;
        let grid = Arc::new(Grid2D::new(bbox, nx, ny).map_err(numerics)?);
        rasterize_domain(&spec, &grid).map_err(numerics)
    }

    fn params(&self) -> Result<OptimizeParams, CmdError> {
        Ok(OptimizeParams {
            tol: self.cfg.f64_or("solver.tol", 1e-8)?,
            max_iter: self.cfg.usize_or("solver.max_iter", 200)?,
            eigen_tol: self.cfg.f64_or("eigen.tol", 1e-9)?,
        })
    }

    fn area(&self, mask: &DomainMask) -> Result<f64, CmdError> {
        let area = match (self.cfg.f64_at("solver.area")?, self.cfg.f64_at("solver.area_frac")?) {
            (Some(a), _) => a,
            (None, Some(f)) => f * mask.measure(),
            (None, None) => {
                return Err(CmdError::Config(
                    "missing required key 'solver.area' (or 'solver.area_frac')".into(),
                ))
            }
        };
        if !(area > 0.0 && area < mask.measure()) {
            return Err(CmdError::Config(format!(
                "solver.area: target measure {area} outside (0, |Omega|) = (0, {})",
                mask.measure()
            )));
        }
        Ok(area)
    }

    fn init(&self) -> Result<InitSet, CmdError> {
        let seed = self
            .seed_override
            .map(Ok)
            .unwrap_or_else(|| self.cfg.u64_or("solver.seed", 1))?;
        Ok(match self.cfg.get("solver.init").unwrap_or("annulus") {
            "empty" => InitSet::Empty,
            "annulus" => InitSet::Annulus,
            "seeded" => InitSet::Seeded(seed),
            other => return Err(CmdError::Config(format!("solver.init: unknown mode '{other}'"))),
        })
    }

    fn tau(&self) -> Result<f64, CmdError> {
        Ok(self.cfg.f64_or("diag.tau", DEFAULT_TAU)?)
    }

    fn manifest(&self, command: &str) -> Manifest {
        let mut m = Manifest::new(command, self.cfg.hash());
        m.push_int("threads", self.threads as i64);
        if let Some(seed) = self.seed_override {
            m.push_int("seed_override", seed as i64);
        }
        for (key, default) in [
            ("solver.tol", 1e-8),
            ("eigen.tol", 1e-9),
            ("weiss.tol_w", DEFAULT_TOL_W),
            ("weiss.gamma", DEFAULT_GAMMA),
            ("diag.tau", DEFAULT_TAU),
        ] {
            m.push_num(&key.replace('.', "_"), self.cfg.f64_or(key, default).unwrap_or(default));
        }
        m
    }

    fn solve_fresh(&self, mask: &Arc<DomainMask>) -> Result<OptimalPair, CmdError> {
        let alpha = self.cfg.f64_req("solver.alpha")?;
        let area = self.area(mask)?;
        optimize_on(mask, alpha, area, self.init()?, self.params()?).map_err(numerics)
    }

    /// Reload a solved pair from a previous `solve` output directory, or run
    /// a fresh solve when no input directory is configured.
    fn pair(&self, mask: &Arc<DomainMask>) -> Result<OptimalPair, CmdError> {
        match self.cfg.get("diag.input_dir") {
            None => self.solve_fresh(mask),
            Some(dir) => {
                let dir = Path::new(dir);
                let kv = std::fs::read_to_string(dir.join("pair.txt"))
                    .map_err(|e| CmdError::Config(format!("diag.input_dir: {e}")))?;
                let lookup = |key: &str| -> Result<f64, CmdError> {
                    kv.lines()
                        .find_map(|l| {
                            let (k, v) = l.split_once('=')?;
                            (k.trim() == key).then(|| v.trim().parse::<f64>().ok())?
                        })
                        .ok_or_else(|| CmdError::Config(format!("pair.txt: missing '{key}'")))
                };
                let alpha = lookup("alpha")?;
                let area = lookup("area")?;
                let u = ScalarField::load(&dir.join("u.txt"), mask).map_err(numerics)?;
                let cut =
                    membrane::geometry::weighted_quantile(&u, mask, area).map_err(numerics)?;
                let lambda = lookup("lambda")?;
                Ok(OptimalPair {
                    u,
                    d: cut.d,
                    c: cut.c,
                    lambda,
                    alpha,
                    a_target: area,
                    history: Vec::new(),
                    converged: lookup("converged")? != 0.0,
                    subcritical: alpha < lambda,
                    eigen_residual: lookup("eigen_residual")?,
                })
            }
        }
    }
}

fn write_pair_files(ctx: &mut Ctx, pair: &OptimalPair) -> Result<(), CmdError> {
    pair.u.dump(&ctx.out.file("u.txt")).map_err(numerics)?;
    let mut hist = String::from("iteration,Lambda,c,symdiff\n");
    for (k, rec) in pair.history.iter().enumerate() {
        hist.push_str(&format!("{k},{},{},{}\n", fmt(rec.lambda), fmt(rec.c), fmt(rec.symdiff)));
    }
    ctx.out.write_text("history.csv", &hist)?;
    let pair_txt = format!(
        "alpha = {}\narea = {}\nmeasured_area = {}\nc = {}\nlambda = {}\nconverged = {}\nsubcritical = {}\neigen_residual = {}\niterations = {}\n",
        fmt(pair.alpha),
        fmt(pair.a_target),
        fmt(pair.d.measure()),
        fmt(pair.c),
        fmt(pair.lambda),
        pair.converged as i32,
        pair.subcritical as i32,
        fmt(pair.eigen_residual),
        pair.history.len()
    );
    ctx.out.write_text("pair.txt", &pair_txt)?;
    ctx.out.write_pgm("u.pgm", &pair.u)?;
    ctx.out.write_mask_pgm("d.pgm", &pair.d)?;
    Ok(())
}

pub fn cmd_solve(ctx: &mut Ctx) -> CmdResult {
    let mask = ctx.mask()?;
    let pair = ctx.solve_fresh(&mask)?;
    write_pair_files(ctx, &pair)?;
    let mut m = ctx.manifest("solve");
    let g = pair.u.grid();
    m.push_int("grid_nx", g.nx as i64);
    m.push_int("grid_ny", g.ny as i64);
    m.push_str(
        "grid_bbox",
        &format!("[{}, {}, {}, {}]", fmt(g.xmin), fmt(g.xmax), fmt(g.ymin), fmt(g.ymax)),
    );
    m.push_str("init", ctx.cfg.get("solver.init").unwrap_or("annulus"));
    m.push_int(
        "seed",
        ctx.seed_override
            .map(Ok)
            .unwrap_or_else(|| ctx.cfg.u64_or("solver.seed", 1))
            .map_err(CmdError::from)? as i64,
    );
    m.push_num("alpha", pair.alpha);
    m.push_num("area", pair.a_target);
    m.push_num("lambda", pair.lambda);
    m.push_num("c", pair.c);
    m.push_int("converged", pair.converged as i64);
    m.push_int("subcritical", pair.subcritical as i64);
    m.push_int("iterations", pair.history.len() as i64);
    m.write(&ctx.out)?;
    println!(
        "solve: Lambda = {:.8}, c = {:.8}, iterations = {}, converged = {}",
        pair.lambda,
        pair.c,
        pair.history.len(),
        pair.converged
    );
    if pair.converged {
        Ok(())
    } else {
        Err(CmdError::Numerics("fixed point did not converge (outputs written)".into()))
    }
}

pub fn cmd_sweep(ctx: &mut Ctx) -> CmdResult {
    let mask = ctx.mask()?;
    let alpha = ctx.cfg.f64_req("solver.alpha")?;
    let a_list = match (ctx.cfg.f64_list("solver.area_list")?, ctx.cfg.f64_list("solver.area_frac_list")?) {
        (Some(l), _) => l,
        (None, Some(f)) => f.iter().map(|x| x * mask.measure()).collect(),
        (None, None) => {
            return Err(CmdError::Config(
                "missing required key 'solver.area_list' (or 'solver.area_frac_list')".into(),
            ))
        }
    };
    let (curve, _pairs) =
        sweep(&mask, alpha, &a_list, ctx.init()?, ctx.params()?).map_err(numerics)?;
    let mut csv = String::from("A,Lambda,c,iterations,flag_subcritical\n");
    for s in &curve.samples {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(s.a),
            fmt(s.lambda),
            fmt(s.c),
            s.iterations,
            s.subcritical as i32
        ));
    }
    ctx.out.write_text("curve.csv", &csv)?;

    let report = shape_derivative_residual(&curve, alpha).map_err(numerics)?;
    let mut res = String::from("A,dLambda_dA,alpha_c2,rel_residual,skipped\n");
    for r in &report.samples {
        res.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(r.a),
            fmt(r.dlambda_da),
            fmt(r.alpha_c2),
            fmt(r.rel_residual),
            r.skipped as i32
        ));
    }
    ctx.out.write_text("residuals.csv", &res)?;
    ctx.out.write_text(
        "summary.txt",
        &format!(
            "shape_derivative_median_rel_residual = {}\nshape_derivative_max_rel_residual = {}\n",
            fmt(report.median),
            fmt(report.max)
        ),
    )?;
    let mut m = ctx.manifest("sweep");
    m.push_num("alpha", alpha);
    m.push_int("samples", curve.samples.len() as i64);
    m.push_num("shape_derivative_median", report.median);
    m.write(&ctx.out)?;
    println!(
        "sweep: {} samples, shape-derivative residual median {:.4}, max {:.4}",
        curve.samples.len(),
        report.median,
        report.max
    );
    if curve.samples.iter().all(|s| s.converged) {
        Ok(())
    } else {
        Err(CmdError::Numerics("one or more sweep samples did not converge".into()))
    }
}

pub fn cmd_diagnose(ctx: &mut Ctx) -> CmdResult {
    let mask = ctx.mask()?;
    let pair = ctx.pair(&mask)?;
    let tau = ctx.tau()?;
    let params = ctx.params()?;
    let mut rows: Vec<String> = vec!["check,param,value,tolerance,pass".into()];

    // 1. Pohozaev identity at several centers; the residual must not depend
    //    on the center.
    let centers = ctx
        .cfg
        .points("diag.x0_list")?
        .unwrap_or_else(|| vec![(0.0, 0.0), (5.0, -3.0), (-2.0, 7.0)]);
    let mut lhs_all = Vec::new();
    for x0 in &centers {
        let rep = pohozaev_residual(&pair, *x0).map_err(numerics)?;
        lhs_all.push(rep.lhs);
        rows.push(format!(
            "pohozaev,x0=({};{}),{},{},{}",
            fmt(x0.0),
            fmt(x0.1),
            fmt(rep.rel_residual),
            fmt(0.03),
            rep.rel_residual <= 0.03
        ));
    }
    if lhs_all.len() > 1 {
        let mn = lhs_all.iter().cloned().fold(f64::MAX, f64::min);
        let mx = lhs_all.iter().cloned().fold(f64::MIN, f64::max);
        let spread = (mx - mn) / pair.lambda.abs();
        rows.push(format!(
            "pohozaev,x0_spread,{},{},{}",
            fmt(spread),
            fmt(0.05),
            spread <= 0.05
        ));
    }

    // 2. Weak uniqueness of the cut level across seeded restarts.
    let seeds = ctx.cfg.u64_list("solver.seeds")?.unwrap_or_else(|| vec![1, 2, 3, 4, 5]);
    let slope_probe = ctx.cfg.f64_at("diag.slope_probe")?;
    let wu = weak_uniqueness_experiment(
        &mask,
        pair.alpha,
        pair.a_target,
        &seeds,
        params,
        ctx.threads,
        slope_probe,
    )
    .map_err(numerics)?;
    rows.push(format!(
        "weak_uniqueness,c_spread_rel,{},{},{}",
        fmt(wu.c_spread_rel),
        fmt(1e-3),
        wu.c_spread_rel <= 1e-3
    ));
    rows.push(format!(
        "weak_uniqueness,kept_runs,{},{},{}",
        wu.runs.iter().filter(|r| r.kept).count(),
        seeds.len(),
        true
    ));
    if let Some(slope) = wu.dlambda_da {
        rows.push(format!(
            "weak_uniqueness,dlambda_da_vs_alpha_c2,{},{},{}",
            fmt(slope),
            fmt(wu.alpha_c2),
            true
        ));
    }

    // 3. Level-set thinness at the cut level.
    let eps_default: Vec<f64> = [0.1, 0.05, 0.025, 0.0125]
        .iter()
        .map(|f| f * pair.c.max(1e-12))
        .collect();
    let eps = ctx.cfg.f64_list("diag.eps_list")?.unwrap_or(eps_default);
    let lt = levelset_thickness(&pair.u, pair.c, &eps).map_err(numerics)?;
    let monotone = lt.samples.windows(2).all(|w| w[0].1 >= w[1].1 - 1e-12);
    let (eps_min, m_min) = *lt.samples.last().unwrap();
    rows.push(format!(
        "levelset,measure_at_eps_min,{},{},{}",
        fmt(m_min),
        fmt(2.0 * lt.slope * eps_min),
        monotone && m_min <= 2.0 * lt.slope * eps_min + 1e-12
    ));
    rows.push(format!("levelset,slope,{},{},{}", fmt(lt.slope), fmt(f64::INFINITY), true));

    // 4. Gradient along the free boundary (must not vanish identically).
    let gb = gradient_on_boundary(&pair, tau).map_err(numerics)?;
    rows.push(format!(
        "gradient_on_F,max_grad,{},{},{}",
        fmt(gb.max_grad),
        fmt(gb.tau_abs),
        gb.max_grad > gb.tau_abs
    ));
    rows.push(format!(
        "gradient_on_F,singular_fraction,{},{},{}",
        fmt(gb.singular_fraction),
        fmt(1.0),
        true
    ));

    // 5. Symmetric-domain regularity (when the shape declares two axes).
    let spec = ctx.cfg.domain()?;
    if spec.symmetry_axes() == 2 {
        let sc = symmetry_singularity_check(&pair, &spec, tau).map_err(numerics)?;
        rows.push(format!(
            "symmetry,min_grad_on_F,{},{},{}",
            fmt(sc.min_grad_on_f),
            fmt(sc.tau_abs),
            sc.pass
        ));
        rows.push(format!("symmetry,components,{},{},{}", sc.components, 1, sc.components == 1));
    } else {
        rows.push("symmetry,skipped,0,0,true".into());
    }

    ctx.out.write_text("diagnostics.csv", &(rows.join("\n") + "\n"))?;
    let mut m = ctx.manifest("diagnose");
    m.push_num("alpha", pair.alpha);
    m.push_num("lambda", pair.lambda);
    m.push_num("c", pair.c);
    m.write(&ctx.out)?;
    println!("diagnose: {} rows written", rows.len() - 1);
    Ok(())
}

/// Pick a free-boundary center that keeps `B(x0, r_needed)` inside the
/// domain: the admissible contour vertex with the smallest gradient.
fn pick_center(
    pair: &OptimalPair,
    cfg_center: Option<&str>,
    r_needed: f64,
) -> Result<(f64, f64), CmdError> {
    if let Some(s) = cfg_center {
        if s != "auto" {
            let mut it = s.split(',').map(|t| t.trim().parse::<f64>());
            if let (Some(Ok(x)), Some(Ok(y))) = (it.next(), it.next()) {
                return Ok((x, y));
            }
            return Err(CmdError::Config(format!("bad center '{s}'")));
        }
    }
    let grid = pair.u.grid().clone();
    let slack = r_needed + 2.5 * grid.hx.hypot(grid.hy);
    let contour = extract_contour(&pair.u, pair.c).map_err(numerics)?;
    let mut best: Option<(f64, (f64, f64))> = None;
    for v in contour.vertices() {
        if membrane::geometry::ball_is_interior(pair.u.mask(), (v.x, v.y), slack)
            && best.map(|(g, _)| v.grad < g).unwrap_or(true)
        {
            best = Some((v.grad, (v.x, v.y)));
        }
    }
    best.map(|(_, p)| p).ok_or_else(|| {
        CmdError::Numerics(format!(
            "no free-boundary point admits a ball of radius {r_needed:.4} inside the domain"
        ))
    })
}

fn weiss_radii(ctx: &Ctx, h: f64) -> Result<Vec<f64>, CmdError> {
    let spec = ctx.cfg.get("weiss.radii_cells").unwrap_or("4:20");
    let (lo, hi) = spec
        .split_once(':')
        .ok_or_else(|| CmdError::Config(format!("weiss.radii_cells: expected 'lo:hi', got '{spec}'")))?;
    let lo: usize = lo.trim().parse().map_err(|_| CmdError::Config("weiss.radii_cells: bad lo".into()))?;
    let hi: usize = hi.trim().parse().map_err(|_| CmdError::Config("weiss.radii_cells: bad hi".into()))?;
    if lo < 1 || hi <= lo {
        return Err(CmdError::Config("weiss.radii_cells: need 1 <= lo < hi".into()));
    }
    Ok((lo..=hi).map(|k| k as f64 * h).collect())
}

fn two_phase(pair: &OptimalPair) -> Result<TwoPhaseField, CmdError> {
    to_two_phase(pair).map_err(numerics)
}

pub fn cmd_weiss(ctx: &mut Ctx) -> CmdResult {
    let mask = ctx.mask()?;
    let pair = ctx.pair(&mask)?;
    let tp = two_phase(&pair)?;
    let h = mask.grid().hx.max(mask.grid().hy);
    let radii = weiss_radii(ctx, h)?;
    let rmax = *radii.last().unwrap();
    let center = pick_center(&pair, ctx.cfg.get("weiss.center"), rmax)?;
    let gamma = ctx.cfg.f64_or("weiss.gamma", DEFAULT_GAMMA)?;
    let tol_w = ctx.cfg.f64_or("weiss.tol_w", DEFAULT_TOL_W)?;
    let mode = match ctx.cfg.get("weiss.mode").unwrap_or("varying") {
        "varying" => WeissMode::Varying,
        "frozen" => WeissMode::Frozen,
        other => return Err(CmdError::Config(format!("weiss.mode: unknown '{other}'"))),
    };
    let profile = membrane::freeboundary::weiss_profile(
        &tp,
        center,
        &radii,
        gamma,
        DMode::Calibrated,
        mode,
        tol_w,
    )
    .map_err(numerics)?;
    let mut csv = String::from("r,W,e,W1,S,S_over_r2\n");
    for s in &profile.samples {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt(s.r),
            fmt(s.w),
            fmt(s.e),
            fmt(s.w1),
            fmt(s.s),
            fmt(s.s_over_r2)
        ));
    }
    ctx.out.write_text("weiss.csv", &csv)?;
    ctx.out.write_pgm("v.pgm", &tp.v)?;
    let (s0, decaying) = profile.nondegeneracy();
    let mut m = ctx.manifest("weiss");
    m.push_num("center_x", center.0);
    m.push_num("center_y", center.1);
    m.push_num("gamma", profile.gamma);
    m.push_num("D", profile.d);
    m.push_num("tol_w", tol_w);
    m.push_int("monotone", profile.monotone as i64);
    m.push_num("max_violation_rel", profile.max_violation_rel);
    m.push_num("nondegeneracy_s0", s0);
    m.push_int("nondegeneracy_decaying", decaying as i64);
    m.write(&ctx.out)?;
    println!(
        "weiss: center ({:.4}, {:.4}), W1 monotone = {}, s0 = {:.4e}",
        center.0, center.1, profile.monotone, s0
    );
    Ok(())
}

pub fn cmd_blowup(ctx: &mut Ctx) -> CmdResult {
    let mask = ctx.mask()?;
    let pair = ctx.pair(&mask)?;
    let tp = two_phase(&pair)?;
    let h = mask.grid().hx.max(mask.grid().hy);
    let r_max = ctx.cfg.f64_or("blowup.r_max_cells", 32.0)? * h;
    let levels = ctx.cfg.usize_or("blowup.levels", 4)?;
    let mut radii = Vec::new();
    let mut r = r_max;
    for _ in 0..levels {
        if r < 4.0 * h {
            break;
        }
        radii.push(r);
        r *= 0.5;
    }
    if radii.len() < 2 {
        return Err(CmdError::Config(
            "blowup: fewer than two admissible radii above the 4h floor".into(),
        ));
    }
    let center = pick_center(&pair, ctx.cfg.get("blowup.center"), r_max)?;
    let seq = blowup(&tp, center, &radii, ctx.tau()?).map_err(numerics)?;
    let mut csv = String::from("r,T,a11,a12,a22,residual,harmonic_defect\n");
    for l in &seq.levels {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(l.r),
            fmt(l.t),
            fmt(l.fit.a11),
            fmt(l.fit.a12),
            fmt(l.fit.a22),
            fmt(l.fit.rel_residual),
            fmt(l.fit.harmonic_defect)
        ));
    }
    ctx.out.write_text("blowup.csv", &csv)?;
    let mut m = ctx.manifest("blowup");
    m.push_num("center_x", center.0);
    m.push_num("center_y", center.1);
    m.push_str("regime", &seq.regime.to_string());
    m.push_int("warned_regular", seq.warned_regular as i64);
    m.write(&ctx.out)?;
    println!("blowup: center ({:.4}, {:.4}), regime: {}", center.0, center.1, seq.regime);
    if seq.warned_regular {
        println!("blowup: warning: center is not singular (|grad v| above threshold)");
    }
    Ok(())
}

pub fn cmd_exact(ctx: &mut Ctx) -> CmdResult {
    let kind = ctx
        .cfg
        .get("exact.kind")
        .ok_or_else(|| CmdError::Config("missing required key 'exact.kind'".into()))?;
    let f0 = ctx.cfg.f64_or("exact.f0", 1.0)?;
    let sol = match kind {
        "halfplane" => halfplane(f0).map_err(numerics)?,
        "nonnegative" => nonnegative(f0, ctx.cfg.f64_or("exact.a", 0.0)?).map_err(numerics)?,
        "blank" => {
            let g0 = ctx.cfg.f64_req("exact.g0")?;
            blank_profile(f0, g0).map_err(numerics)?
        }
        other => return Err(CmdError::Config(format!("exact.kind: unknown kind '{other}'"))),
    };
    ctx.out.write_text("params.txt", &sol.parameter_block())?;
    let n = ctx.cfg.usize_or("exact.n", 513)?;
    let radii = ctx
        .cfg
        .f64_list("exact.radii")?
        .unwrap_or_else(|| (0..9).map(|k| 0.1 + 0.05 * k as f64).collect());
    let (spread, ws) = weiss_constancy(&sol, &radii, n).map_err(numerics)?;
    let mut csv = String::from("r,W\n");
    for (r, w) in radii.iter().zip(&ws) {
        csv.push_str(&format!("{},{}\n", fmt(*r), fmt(*w)));
    }
    ctx.out.write_text("constancy.csv", &csv)?;
    let grid = Arc::new(
        Grid2D::new((-1.2, 1.2, -1.2, 1.2), n, n).map_err(numerics)?,
    );
    let resid = pde_residual(&sol, &grid);
    ctx.out.write_text(
        "report.txt",
        &format!(
            "weiss_spread_rel = {}\nweiss_mean = {}\npde_residual_off_band = {}\n",
            fmt(spread),
            fmt(ws.iter().sum::<f64>() / ws.len() as f64),
            fmt(resid)
        ),
    )?;
    let mut m = ctx.manifest("exact");
    m.push_str("kind", kind);
    m.push_num("f0", sol.f0);
    m.push_num("g0", sol.g0);
    m.push_num("weiss_spread_rel", spread);
    m.push_num("pde_residual", resid);
    m.write(&ctx.out)?;
    println!("exact: kind = {kind}, Weiss spread = {spread:.3e}, PDE residual = {resid:.3e}");
    Ok(())
}
