//! Lowest Dirichlet eigenpair of `-Δ + α·χ_D` on the masked domain.
//!
//! The operator is the standard 5-point Laplacian on active nodes (value zero
//! at inactive nodes) plus a diagonal potential: at each node, `α` times the
//! `D`-area fraction of the four adjacent cells. The ground state comes from
//! inverse power iteration with diagonally preconditioned conjugate-gradient
//! inner solves, started from the all-ones vector, so runs are deterministic.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{DomainMask, Grid2D, ScalarField};

/// Matrix-free `-Δ + α·χ_D` with homogeneous Dirichlet data on `∂Ω`.
#[derive(Debug, Clone)]
pub struct SchrodingerOperator {
    grid: Arc<Grid2D>,
    mask: Arc<DomainMask>,
    potential: ScalarField,
    alpha: f64,
}

/// Ground-state eigenpair. `u` is non-negative with cell-weighted L² norm 1.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    pub u: ScalarField,
    /// `‖Lu - λu‖₂ / ‖u‖₂` in the plain nodal norm.
    pub residual: f64,
    pub iterations: usize,
}

impl SchrodingerOperator {
    /// Assemble the operator for a potential region `D ⊆ Ω`.
    ///
    /// The nodal potential weight is the mean `D`-fraction of the node's
    /// adjacent cells, so boundary-of-`D` nodes see values in `[0, α]`.
    pub fn assemble(mask: &Arc<DomainMask>, d: &DomainMask, alpha: f64) -> Result<Self> {
        if alpha < 0.0 {
            return Err(Error::invalid("coupling α must be non-negative"));
        }
        if !d.is_subset_of(mask) {
            return Err(Error::invalid("potential region D is not contained in Ω"));
        }
        let grid = mask.grid().clone();
        let mut potential = ScalarField::zeros(mask);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let idx = grid.idx(i, j);
                if !mask.is_active(idx) {
                    continue;
                }
                // D-area fraction of the node's adjacent cells, relative to
                // their Ω-clipped area, so D = Ω gives exactly α everywhere.
                let mut in_d = 0.0;
                let mut in_omega = 0.0;
                for (di, dj) in [(0i64, 0i64), (-1, 0), (0, -1), (-1, -1)] {
                    let ci = i as i64 + di;
                    let cj = j as i64 + dj;
                    if ci >= 0 && cj >= 0 && (ci as usize) < grid.nx - 1 && (cj as usize) < grid.ny - 1
                    {
                        let cell = grid.cell_idx(ci as usize, cj as usize);
                        in_d += d.cell_weight(cell);
                        in_omega += mask.cell_weight(cell);
                    }
                }
                potential.values_mut()[idx] =
                    if in_omega > 0.0 { alpha * in_d / in_omega } else { 0.0 };
            }
        }
        Ok(SchrodingerOperator { grid, mask: mask.clone(), potential, alpha })
    }

    /// Plain Dirichlet Laplacian (`α = 0`, empty `D`).
    pub fn laplacian(mask: &Arc<DomainMask>) -> Self {
        let empty = DomainMask::from_cell_weights(mask, vec![0.0; mask.grid().n_cells()]);
        SchrodingerOperator::assemble(mask, &empty, 0.0).expect("empty D is always a subset")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mask(&self) -> &Arc<DomainMask> {
        &self.mask
    }

    pub fn potential(&self) -> &ScalarField {
        &self.potential
    }

    /// `y = (-Δ + V) x` on active nodes; inactive nodes read as zero.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let g = &self.grid;
        let (ihx2, ihy2) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
        let diag = 2.0 * ihx2 + 2.0 * ihy2;
        let nx = g.nx;
        let act = self.mask.active_nodes();
        let pot = self.potential.values();
        for j in 0..g.ny {
            for i in 0..nx {
                let idx = j * nx + i;
                if !act[idx] {
                    y[idx] = 0.0;
                    continue;
                }
                let left = if i > 0 && act[idx - 1] { x[idx - 1] } else { 0.0 };
                let right = if i + 1 < nx && act[idx + 1] { x[idx + 1] } else { 0.0 };
                let down = if j > 0 && act[idx - nx] { x[idx - nx] } else { 0.0 };
                let up = if idx + nx < x.len() && act[idx + nx] { x[idx + nx] } else { 0.0 };
                y[idx] = (diag + pot[idx]) * x[idx] - ihx2 * (left + right) - ihy2 * (down + up);
            }
        }
    }

    fn diag(&self) -> Vec<f64> {
        let g = &self.grid;
        let d0 = 2.0 / (g.hx * g.hx) + 2.0 / (g.hy * g.hy);
        self.potential
            .values()
            .iter()
            .zip(self.mask.active_nodes())
            .map(|(&p, &a)| if a { d0 + p } else { 1.0 })
            .collect()
    }
}

/// Discrete Rayleigh quotient `⟨Lu, u⟩ / ⟨u, u⟩` with the same stencil inner
/// products used by the operator (plain nodal sums over active nodes).
pub fn rayleigh(u: &ScalarField, op: &SchrodingerOperator) -> Result<f64> {
    let x = u.values();
    let mut lx = vec![0.0; x.len()];
    op.apply(x, &mut lx);
    let num = dot_masked(&lx, x, op.mask.active_nodes());
    let den = dot_masked(x, x, op.mask.active_nodes());
    if den <= 0.0 {
        return Err(Error::invalid("Rayleigh quotient of the zero field"));
    }
    Ok(num / den)
}

/// Smallest eigenpair by inverse power iteration (shift 0), all-ones start.
pub fn ground_state(op: &SchrodingerOperator, tol: f64) -> Result<EigenPair> {
    ground_state_from(op, tol, None)
}

/// Same as [`ground_state`] but warm-started from a previous eigenvector.
pub fn ground_state_from(
    op: &SchrodingerOperator,
    tol: f64,
    start: Option<&ScalarField>,
) -> Result<EigenPair> {
    if !(tol > 0.0) {
        return Err(Error::invalid("eigen tolerance must be positive"));
    }
    let n = op.grid.n_nodes();
    let act = op.mask.active_nodes().to_vec();
    if !act.iter().any(|&a| a) {
        return Err(Error::invalid("empty interior: no active nodes"));
    }

    let mut x: Vec<f64> = match start {
        Some(f) => f.values().to_vec(),
        None => act.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect(),
    };
    normalize(&mut x, &act);

    let diag = op.diag();
    let mut lambda = {
        let mut lx = vec![0.0; n];
        op.apply(&x, &mut lx);
        dot_masked(&lx, &x, &act)
    };
    let mut z = vec![0.0; n];
    let mut residual = f64::MAX;
    let max_outer = 600;
    for it in 0..max_outer {
        // Inverse iteration step: solve L z = x to a tolerance one order
        // tighter than the eigen target.
        for (zi, (&xi, &a)) in z.iter_mut().zip(x.iter().zip(&act)) {
            *zi = if a { xi / lambda.max(1e-300) } else { 0.0 };
        }
        cg_solve(op, &x, &mut z, &diag, tol / 10.0, 20 * (n as f64).sqrt() as usize + 200)?;
        normalize(&mut z, &act);
        std::mem::swap(&mut x, &mut z);

        let mut lx = vec![0.0; n];
        op.apply(&x, &mut lx);
        lambda = dot_masked(&lx, &x, &act);
        let mut r2 = 0.0;
        for idx in 0..n {
            if act[idx] {
                let r = lx[idx] - lambda * x[idx];
                r2 += r * r;
            }
        }
        residual = r2.sqrt();
        if residual <= tol * lambda.abs().max(1.0) {
            // Ground state is signed so its mean is positive.
            let mean: f64 = x.iter().zip(&act).filter(|(_, &a)| a).map(|(&v, _)| v).sum();
            if mean < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            let mut u = ScalarField::from_values(&op.mask, x);
            // Cell-weighted normalization for the returned field.
            let norm = u.norm_l2();
            if norm <= 0.0 {
                return Err(Error::invalid("degenerate eigenvector"));
            }
            u.values_mut().iter_mut().for_each(|v| *v /= norm);
            return Ok(EigenPair { lambda, u, residual: residual / 1.0, iterations: it + 1 });
        }
    }
    Err(Error::Convergence {
        what: "inverse power iteration".into(),
        iterations: max_outer,
        residual,
    })
}

/// Diagonally preconditioned CG for `L z = b`; `z` holds the initial guess.
fn cg_solve(
    op: &SchrodingerOperator,
    b: &[f64],
    z: &mut [f64],
    diag: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<()> {
    let n = b.len();
    let act = op.mask.active_nodes();
    let bnorm = dot_masked(b, b, act).sqrt();
    if bnorm == 0.0 {
        z.iter_mut().for_each(|v| *v = 0.0);
        return Ok(());
    }
    let mut r = vec![0.0; n];
    op.apply(z, &mut r);
    for idx in 0..n {
        r[idx] = if act[idx] { b[idx] - r[idx] } else { 0.0 };
    }
    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut rz_old = 0.0;
    let target = rel_tol * bnorm;
    for _ in 0..max_iter {
        let rnorm = dot_masked(&r, &r, act).sqrt();
        if rnorm <= target {
            return Ok(());
        }
        // Apply the Jacobi preconditioner.
        let mut rz = 0.0;
        for idx in 0..n {
            if act[idx] {
                s[idx] = r[idx] / diag[idx];
                rz += r[idx] * s[idx];
            }
        }
        if rz_old == 0.0 {
            p.copy_from_slice(&s);
        } else {
            let beta = rz / rz_old;
            for idx in 0..n {
                p[idx] = s[idx] + beta * p[idx];
            }
        }
        rz_old = rz;
        let mut ap = vec![0.0; n];
        op.apply(&p, &mut ap);
        let pap = dot_masked(&p, &ap, act);
        if pap <= 0.0 {
            return Err(Error::Convergence {
                what: "conjugate gradients (indefinite direction)".into(),
                iterations: 0,
                residual: rnorm,
            });
        }
        let alpha = rz / pap;
        for idx in 0..n {
            if act[idx] {
                z[idx] += alpha * p[idx];
                r[idx] -= alpha * ap[idx];
            }
        }
    }
    let rnorm = dot_masked(&r, &r, act).sqrt();
    if rnorm <= target * 10.0 {
        // Close enough that the outer iteration can still make progress.
        return Ok(());
    }
    Err(Error::Convergence {
        what: "conjugate gradients".into(),
        iterations: max_iter,
        residual: rnorm / bnorm,
    })
}

fn dot_masked(a: &[f64], b: &[f64], act: &[bool]) -> f64 {
    let mut s = 0.0;
    for idx in 0..a.len() {
        if act[idx] {
            s += a[idx] * b[idx];
        }
    }
    s
}

fn normalize(x: &mut [f64], act: &[bool]) {
    let n = dot_masked(x, x, act).sqrt();
    if n > 0.0 {
        for (v, &a) in x.iter_mut().zip(act) {
            *v = if a { *v / n } else { 0.0 };
        }
    }
}

/// Discrete ground eigenvalue of the 5-point Laplacian on the unit square
/// with `m` interior nodes per direction: `(8/h²)·sin²(πh/2)`, `h = 1/(m+1)`.
pub fn unit_square_discrete_lambda(m: usize) -> f64 {
    let h = 1.0 / (m as f64 + 1.0);
    8.0 / (h * h) * (std::f64::consts::PI * h / 2.0).sin().powi(2)
}

impl EigenPair {
    /// Dump as a one-line `lambda residual iterations` header plus the field.
    pub fn dump(&self, path: &std::path::Path) -> Result<()> {
        use std::io::Write;
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        writeln!(
            w,
            "{} {} {}",
            crate::geometry::g17(self.lambda),
            crate::geometry::g17(self.residual),
            self.iterations
        )?;
        self.u.write_to(&mut w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Grid2D;
    use crate::test_util::unit_square_setup;


    #[test]
    fn square_matches_discrete_formula() {
        let m = 31;
        let mask = unit_square_setup(m);
        assert_eq!(mask.n_active(), m * m);
        let op = SchrodingerOperator::laplacian(&mask);
        let ep = ground_state(&op, 1e-11).unwrap();
        let exact = unit_square_discrete_lambda(m);
        assert!(
            ((ep.lambda - exact) / exact).abs() < 1e-10,
            "lambda {} vs {}",
            ep.lambda,
            exact
        );
    }

    #[test]
    fn ground_state_is_positive_and_normalized() {
        let mask = unit_square_setup(19);
        let op = SchrodingerOperator::laplacian(&mask);
        let ep = ground_state(&op, 1e-9).unwrap();
        assert!((ep.u.norm_l2() - 1.0).abs() < 1e-12);
        for (idx, &v) in ep.u.values().iter().enumerate() {
            if mask.is_active(idx) {
                assert!(v > 0.0, "interior node with non-positive value");
            }
        }
    }

    #[test]
    fn constant_shift_when_d_is_omega() {
        let mask = unit_square_setup(15);
        let alpha = 7.25;
        let full_d = DomainMask::from_cell_weights(&mask, mask.cell_weights().to_vec());
        let op0 = SchrodingerOperator::laplacian(&mask);
        let op1 = SchrodingerOperator::assemble(&mask, &full_d, alpha).unwrap();
        let e0 = ground_state(&op0, 1e-11).unwrap();
        let e1 = ground_state(&op1, 1e-11).unwrap();
        assert!(
            ((e1.lambda - e0.lambda - alpha) / alpha).abs() < 1e-8,
            "shift {} vs alpha {}",
            e1.lambda - e0.lambda,
            alpha
        );
    }

    #[test]
    fn stencil_matches_hand_arithmetic_on_5x5() {
        // All nodes active on a 5x5 grid with h = 1: center value of -Δx for
        // the given pattern follows the 5-point formula by hand.
        let g = Arc::new(Grid2D::new((0.0, 4.0, 0.0, 4.0), 5, 5).unwrap());
        let mask = DomainMask::full(g.clone());
        let op = SchrodingerOperator::laplacian(&mask);
        let mut x = vec![0.0; 25];
        x[g.idx(2, 2)] = 3.0;
        x[g.idx(1, 2)] = 1.0;
        x[g.idx(3, 2)] = -2.0;
        x[g.idx(2, 1)] = 0.5;
        x[g.idx(2, 3)] = 4.0;
        let mut y = vec![0.0; 25];
        op.apply(&x, &mut y);
        // (4·3 - (1 + (-2) + 0.5 + 4)) / 1² = 12 - 3.5
        assert!((y[g.idx(2, 2)] - 8.5).abs() < 1e-14);
        // Constant vector: the stencil cancels to zero in the interior; grid
        // edge nodes read the missing (Dirichlet) neighbors as zero.
        let ones = vec![1.0; 25];
        let mut ly = vec![0.0; 25];
        op.apply(&ones, &mut ly);
        assert!(ly[g.idx(2, 2)].abs() < 1e-14);
        assert!((ly[g.idx(0, 2)] - 1.0).abs() < 1e-14); // one missing neighbor
        assert!((ly[g.idx(0, 0)] - 2.0).abs() < 1e-14); // two missing neighbors
    }

    #[test]
    fn rayleigh_of_ground_state_and_lower_bound() {
        let mask = unit_square_setup(15);
        let op = SchrodingerOperator::laplacian(&mask);
        let ep = ground_state(&op, 1e-10).unwrap();
        let q = rayleigh(&ep.u, &op).unwrap();
        assert!((q - ep.lambda).abs() < 1e-9);
        // Any other field gives a not-smaller quotient.
        let probe = ScalarField::from_fn(&mask, |x, y| (x * 9.1).sin().abs() + y);
        assert!(rayleigh(&probe, &op).unwrap() >= ep.lambda - 1e-9);
        let zero = ScalarField::zeros(&mask);
        assert!(rayleigh(&zero, &op).is_err());
    }

    #[test]
    fn potential_monotonicity_in_d() {
        let mask = unit_square_setup(15);
        // Nested potential regions: quantile sublevel sets of a fixed field.
        let f = ScalarField::from_fn(&mask, |x, y| ((x - 0.3) * 3.0).sin() + y);
        let mut prev = None;
        for frac in [0.2, 0.5, 0.8] {
            let cut =
                crate::geometry::weighted_quantile(&f, &mask, frac * mask.measure()).unwrap();
            let op = SchrodingerOperator::assemble(&mask, &cut.d, 10.0).unwrap();
            let ep = ground_state(&op, 1e-10).unwrap();
            if let Some(p) = prev {
                assert!(ep.lambda >= p - 1e-8, "lambda not monotone: {} < {}", ep.lambda, p);
            }
            prev = Some(ep.lambda);
        }
    }

    #[test]
    fn eigenpair_dump_has_header_and_field() {
        let mask = unit_square_setup(9);
        let op = SchrodingerOperator::laplacian(&mask);
        let ep = ground_state(&op, 1e-9).unwrap();
        let dir = std::env::temp_dir().join("membrane_eigen_dump");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("eig.txt");
        ep.dump(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        let head: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
        assert_eq!(head.len(), 3); // lambda residual iterations
        assert_eq!(head[0].parse::<f64>().unwrap(), ep.lambda);
        assert_eq!(head[2].parse::<usize>().unwrap(), ep.iterations);
        // The remainder is a loadable field dump.
        let field_part: String = text.splitn(2, '\n').nth(1).unwrap().to_string();
        let field_path = dir.join("field_only.txt");
        std::fs::write(&field_path, field_part).unwrap();
        let back = crate::geometry::ScalarField::load(&field_path, &mask).unwrap();
        assert_eq!(back.values(), ep.u.values());
    }

    #[test]
    fn d_not_subset_rejected() {
        let mask = unit_square_setup(9);
        let full = DomainMask::full(mask.grid().clone());
        let too_big = DomainMask::from_cell_weights(&full, full.cell_weights().to_vec());
        assert!(SchrodingerOperator::assemble(&mask, &too_big, 1.0).is_err());
    }
}
