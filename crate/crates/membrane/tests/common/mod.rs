#![allow(dead_code)] // each test binary uses its own subset of these oracles

//! Shared oracles for the integration tests: closed-form and 1D reference
//! solutions computed independently of the 2D solver under test.

use std::sync::Arc;

use membrane::geometry::{rasterize_domain, DomainMask, DomainSpec, Grid2D};

/// Bessel `J₀` by its power series (accurate for the |x| ≤ 4 range used here).
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// First positive root of `J₀` by bisection; the ground Dirichlet eigenvalue
/// of the unit disk is its square.
pub fn j01() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    assert!(bessel_j0(lo) > 0.0 && bessel_j0(hi) < 0.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Radial reference solution on the unit disk: ground state of
/// `−u'' − u'/r + α·χ_{r ≥ r*} u = λ u` with `u'(0) = 0`, `u(1) = 0`,
/// solved by inverse power iteration on a fine 1D grid.
pub struct RadialSolution {
    pub lambda: f64,
    pub r_star: f64,
    /// Cut level: `u(r*)` with `∫_disk u² = 1`.
    pub c: f64,
    pub u: Vec<f64>,
    pub dr: f64,
}

/// `a_target` is the annulus measure: `r* = sqrt(1 − A/π)`.
pub fn radial_disk_solution(alpha: f64, a_target: f64, m: usize) -> RadialSolution {
    let r_star = (1.0 - a_target / std::f64::consts::PI).max(0.0).sqrt();
    let dr = 1.0 / m as f64;
    let n = m; // unknowns at i = 0..m-1 (u(1) = 0)
    let pot: Vec<f64> = (0..n)
        .map(|i| {
            let lo = (i as f64 - 0.5) * dr;
            let hi = (i as f64 + 0.5) * dr;
            let lo = lo.max(0.0);
            let beyond = (hi.min(1.0) - r_star.max(lo)).max(0.0) / (hi - lo);
            alpha * beyond
        })
        .collect();

    // Tridiagonal action of the radial operator.
    let idr2 = 1.0 / (dr * dr);
    let sub = |i: usize| -> f64 {
        // coefficient of u_{i-1} in row i (i >= 1)
        -idr2 + 1.0 / (2.0 * (i as f64) * dr * dr)
    };
    let sup = |i: usize| -> f64 {
        if i == 0 {
            -4.0 * idr2
        } else {
            -idr2 - 1.0 / (2.0 * (i as f64) * dr * dr)
        }
    };
    let diag: Vec<f64> = (0..n)
        .map(|i| if i == 0 { 4.0 * idr2 + pot[0] } else { 2.0 * idr2 + pot[i] })
        .collect();

    // Inverse power iteration with the Thomas algorithm.
    let mut u = vec![1.0; n];
    let mut lambda = 0.0;
    for _ in 0..400 {
        let mut a = vec![0.0; n];
        let mut b = diag.clone();
        let mut cc = vec![0.0; n];
        for i in 0..n {
            if i > 0 {
                a[i] = sub(i);
            }
            if i + 1 < n {
                cc[i] = sup(i);
            }
        }
        let mut rhs = u.clone();
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] -= w * cc[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut z = vec![0.0; n];
        z[n - 1] = rhs[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            z[i] = (rhs[i] - cc[i] * z[i + 1]) / b[i];
        }
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in z.iter_mut() {
            *v /= norm;
        }
        // Rayleigh quotient in the r-weighted inner product.
        let apply = |x: &[f64], i: usize| -> f64 {
            let mut s = diag[i] * x[i];
            if i > 0 {
                s += sub(i) * x[i - 1];
            }
            if i + 1 < n {
                s += sup(i) * x[i + 1];
            }
            s
        };
        let weight = |i: usize| if i == 0 { dr * dr / 8.0 } else { (i as f64) * dr * dr };
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            num += apply(&z, i) * z[i] * weight(i);
            den += z[i] * z[i] * weight(i);
        }
        let new_lambda = num / den;
        let done = (new_lambda - lambda).abs() < 1e-12 * new_lambda.abs().max(1.0);
        lambda = new_lambda;
        u = z;
        if done {
            break;
        }
    }
    // Normalize so the 2D integral ∫ u² = 2π ∫ u(r)² r dr equals 1.
    let mut int_u2 = 0.0;
    for i in 0..n {
        let w = if i == 0 { dr * dr / 8.0 } else { (i as f64) * dr * dr };
        int_u2 += u[i] * u[i] * w;
    }
    int_u2 *= 2.0 * std::f64::consts::PI;
    let scale = int_u2.sqrt();
    for v in u.iter_mut() {
        *v /= scale;
    }
    // Interpolate u at r*.
    let pos = r_star / dr;
    let i0 = (pos.floor() as usize).min(n - 1);
    let frac = pos - i0 as f64;
    let u_at = |i: usize| -> f64 {
        if i < n {
            u[i]
        } else {
            0.0
        }
    };
    let c = u_at(i0) * (1.0 - frac) + u_at(i0 + 1) * frac;
    RadialSolution { lambda, r_star, c, u, dr }
}

pub fn disk_mask(n: usize) -> Arc<DomainMask> {
    let g = Arc::new(Grid2D::new((-1.1, 1.1, -1.1, 1.1), n, n).unwrap());
    rasterize_domain(&DomainSpec::disk(0.0, 0.0, 1.0).unwrap(), &g).unwrap()
}

pub fn ellipse_mask(n: usize) -> Arc<DomainMask> {
    let g = Arc::new(Grid2D::new((-1.08, 1.08, -0.58, 0.58), n, n).unwrap());
    rasterize_domain(&DomainSpec::ellipse(0.0, 0.0, 1.0, 0.5).unwrap(), &g).unwrap()
}

pub fn rectangle_mask(n: usize) -> Arc<DomainMask> {
    let g = Arc::new(Grid2D::new((-1.08, 1.08, -0.58, 0.58), n, n).unwrap());
    rasterize_domain(&DomainSpec::rectangle(0.0, 0.0, 1.0, 0.5).unwrap(), &g).unwrap()
}
