//! Domain shapes: bounded open sets with analytic boundaries.

use crate::error::{Error, Result};

/// A point on the domain boundary, used for arc-length quadrature.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    pub x: f64,
    pub y: f64,
    /// Unit outward normal.
    pub nx: f64,
    pub ny: f64,
    /// Arc-length weight of this sample.
    pub ds: f64,
}

/// Supported domain shapes. All are axis-aligned; `Polygon` vertices must be
/// given in counter-clockwise order (the constructor re-orients if needed).
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Disk { cx: f64, cy: f64, radius: f64 },
    Rectangle { cx: f64, cy: f64, half_width: f64, half_height: f64 },
    Ellipse { cx: f64, cy: f64, a: f64, b: f64 },
    /// Rectangle of half-length `half_length` capped by two half-disks of
    /// radius `radius` (total length `2·half_length + 2·radius`).
    Stadium { cx: f64, cy: f64, half_length: f64, radius: f64 },
    Polygon { vertices: Vec<(f64, f64)> },
}

impl DomainSpec {
    pub fn disk(cx: f64, cy: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid("disk radius must be positive"));
        }
        Ok(DomainSpec::Disk { cx, cy, radius })
    }

    pub fn rectangle(cx: f64, cy: f64, half_width: f64, half_height: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_height > 0.0) {
            return Err(Error::invalid("rectangle half-extents must be positive"));
        }
        Ok(DomainSpec::Rectangle { cx, cy, half_width, half_height })
    }

    pub fn ellipse(cx: f64, cy: f64, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::invalid("ellipse semi-axes must be positive"));
        }
        Ok(DomainSpec::Ellipse { cx, cy, a, b })
    }

    pub fn stadium(cx: f64, cy: f64, half_length: f64, radius: f64) -> Result<Self> {
        if !(half_length > 0.0 && radius > 0.0) {
            return Err(Error::invalid("stadium parameters must be positive"));
        }
        Ok(DomainSpec::Stadium { cx, cy, half_length, radius })
    }

    pub fn polygon(mut vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::invalid("polygon needs at least 3 vertices"));
        }
        let area2 = shoelace2(&vertices);
        if area2.abs() < 1e-300 {
            return Err(Error::invalid("polygon has zero area"));
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        Ok(DomainSpec::Polygon { vertices })
    }

    /// Tight bounding box `(xmin, xmax, ymin, ymax)`.
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        match *self {
            DomainSpec::Disk { cx, cy, radius } => (cx - radius, cx + radius, cy - radius, cy + radius),
            DomainSpec::Rectangle { cx, cy, half_width, half_height } => {
                (cx - half_width, cx + half_width, cy - half_height, cy + half_height)
            }
            DomainSpec::Ellipse { cx, cy, a, b } => (cx - a, cx + a, cy - b, cy + b),
            DomainSpec::Stadium { cx, cy, half_length, radius } => {
                (cx - half_length - radius, cx + half_length + radius, cy - radius, cy + radius)
            }
            DomainSpec::Polygon { ref vertices } => {
                let mut bb = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
                for &(x, y) in vertices {
                    bb.0 = bb.0.min(x);
                    bb.1 = bb.1.max(x);
                    bb.2 = bb.2.min(y);
                    bb.3 = bb.3.max(y);
                }
                bb
            }
        }
    }

    /// Signed distance to the boundary, negative inside. Exact for disk,
    /// rectangle, stadium and polygon; first-order accurate near the boundary
    /// for the ellipse (normalized algebraic distance).
    pub fn signed_distance(&self, x: f64, y: f64) -> f64 {
        match *self {
            DomainSpec::Disk { cx, cy, radius } => ((x - cx).hypot(y - cy)) - radius,
            DomainSpec::Rectangle { cx, cy, half_width, half_height } => {
                let dx = (x - cx).abs() - half_width;
                let dy = (y - cy).abs() - half_height;
                if dx > 0.0 || dy > 0.0 {
                    dx.max(0.0).hypot(dy.max(0.0))
                } else {
                    dx.max(dy)
                }
            }
            DomainSpec::Ellipse { cx, cy, a, b } => {
                let dx = x - cx;
                let dy = y - cy;
                let q = (dx / a).powi(2) + (dy / b).powi(2);
                let grad = 2.0 * ((dx / (a * a)).powi(2) + (dy / (b * b)).powi(2)).sqrt();
                if grad < 1e-14 {
                    return -a.min(b);
                }
                (q - 1.0) / grad
            }
            DomainSpec::Stadium { cx, cy, half_length, radius } => {
                let dx = (x - cx).abs() - half_length;
                let px = dx.max(0.0);
                px.hypot(y - cy) - radius
            }
            DomainSpec::Polygon { ref vertices } => {
                let mut dmin = f64::MAX;
                let n = vertices.len();
                for k in 0..n {
                    let a = vertices[k];
                    let b = vertices[(k + 1) % n];
                    dmin = dmin.min(dist_to_segment(x, y, a, b));
                }
                if point_in_polygon(x, y, vertices) {
                    -dmin
                } else {
                    dmin
                }
            }
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.signed_distance(x, y) <= 0.0
    }

    /// Number of declared coordinate-axis symmetries (through the shape center).
    pub fn symmetry_axes(&self) -> usize {
        match self {
            DomainSpec::Disk { .. }
            | DomainSpec::Rectangle { .. }
            | DomainSpec::Ellipse { .. }
            | DomainSpec::Stadium { .. } => 2,
            DomainSpec::Polygon { vertices } => {
                let (cx, cy) = polygon_centroid(vertices);
                let mut axes = 0;
                if polygon_symmetric(vertices, |&(x, y)| (2.0 * cx - x, y)) {
                    axes += 1;
                }
                if polygon_symmetric(vertices, |&(x, y)| (x, 2.0 * cy - y)) {
                    axes += 1;
                }
                axes
            }
        }
    }

    /// Exact area where a closed form exists (all supported shapes).
    pub fn area_exact(&self) -> f64 {
        match *self {
            DomainSpec::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
            DomainSpec::Rectangle { half_width, half_height, .. } => 4.0 * half_width * half_height,
            DomainSpec::Ellipse { a, b, .. } => std::f64::consts::PI * a * b,
            DomainSpec::Stadium { half_length, radius, .. } => {
                4.0 * half_length * radius + std::f64::consts::PI * radius * radius
            }
            DomainSpec::Polygon { ref vertices } => 0.5 * shoelace2(vertices).abs(),
        }
    }

    /// Sample the boundary at roughly `spacing` arc length. Samples sit at
    /// sub-segment midpoints, so polygon and rectangle corners are never hit.
    pub fn boundary_points(&self, spacing: f64) -> Vec<BoundaryPoint> {
        let mut pts = Vec::new();
        match *self {
            DomainSpec::Disk { cx, cy, radius } => {
                let len = 2.0 * std::f64::consts::PI * radius;
                let n = n_samples(len, spacing);
                let dth = 2.0 * std::f64::consts::PI / n as f64;
                for k in 0..n {
                    let th = (k as f64 + 0.5) * dth;
                    let (s, c) = th.sin_cos();
                    pts.push(BoundaryPoint {
                        x: cx + radius * c,
                        y: cy + radius * s,
                        nx: c,
                        ny: s,
                        ds: radius * dth,
                    });
                }
            }
            DomainSpec::Ellipse { cx, cy, a, b } => {
                // Midpoint rule in the angle parameter; ds carries |r'(θ)|.
                let len_est = std::f64::consts::PI * (3.0 * (a + b) - ((3.0 * a + b) * (a + 3.0 * b)).sqrt());
                let n = n_samples(len_est, spacing);
                let dth = 2.0 * std::f64::consts::PI / n as f64;
                for k in 0..n {
                    let th = (k as f64 + 0.5) * dth;
                    let (s, c) = th.sin_cos();
                    let speed = ((a * s).powi(2) + (b * c).powi(2)).sqrt();
                    let nn = ((c / a).powi(2) + (s / b).powi(2)).sqrt();
                    pts.push(BoundaryPoint {
                        x: cx + a * c,
                        y: cy + b * s,
                        nx: (c / a) / nn,
                        ny: (s / b) / nn,
                        ds: speed * dth,
                    });
                }
            }
            DomainSpec::Rectangle { cx, cy, half_width, half_height } => {
                let corners = [
                    (cx - half_width, cy - half_height),
                    (cx + half_width, cy - half_height),
                    (cx + half_width, cy + half_height),
                    (cx - half_width, cy + half_height),
                ];
                for k in 0..4 {
                    sample_edge(&mut pts, corners[k], corners[(k + 1) % 4], spacing);
                }
            }
            DomainSpec::Stadium { cx, cy, half_length, radius } => {
                sample_edge(
                    &mut pts,
                    (cx - half_length, cy - radius),
                    (cx + half_length, cy - radius),
                    spacing,
                );
                sample_arc(&mut pts, (cx + half_length, cy), radius, -0.5, 0.5, spacing);
                sample_edge(
                    &mut pts,
                    (cx + half_length, cy + radius),
                    (cx - half_length, cy + radius),
                    spacing,
                );
                sample_arc(&mut pts, (cx - half_length, cy), radius, 0.5, 1.5, spacing);
            }
            DomainSpec::Polygon { ref vertices } => {
                let n = vertices.len();
                for k in 0..n {
                    sample_edge(&mut pts, vertices[k], vertices[(k + 1) % n], spacing);
                }
            }
        }
        pts
    }
}

fn n_samples(len: f64, spacing: f64) -> usize {
    ((len / spacing).ceil() as usize).max(16)
}

/// Midpoint samples along a straight edge; outward normal is to the right of
/// the travel direction for counter-clockwise traversal.
fn sample_edge(pts: &mut Vec<BoundaryPoint>, a: (f64, f64), b: (f64, f64), spacing: f64) {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len = dx.hypot(dy);
    let n = n_samples(len, spacing).max(2);
    let ds = len / n as f64;
    let (tx, ty) = (dx / len, dy / len);
    for k in 0..n {
        let t = (k as f64 + 0.5) / n as f64;
        pts.push(BoundaryPoint {
            x: a.0 + t * dx,
            y: a.1 + t * dy,
            nx: ty,
            ny: -tx,
            ds,
        });
    }
}

/// Midpoint samples along a circular arc from `t0·π` to `t1·π` (CCW).
fn sample_arc(pts: &mut Vec<BoundaryPoint>, c: (f64, f64), r: f64, t0: f64, t1: f64, spacing: f64) {
    let len = (t1 - t0).abs() * std::f64::consts::PI * r;
    let n = n_samples(len, spacing);
    let dth = (t1 - t0) * std::f64::consts::PI / n as f64;
    for k in 0..n {
        let th = t0 * std::f64::consts::PI + (k as f64 + 0.5) * dth;
        let (s, co) = th.sin_cos();
        pts.push(BoundaryPoint {
            x: c.0 + r * co,
            y: c.1 + r * s,
            nx: co,
            ny: s,
            ds: r * dth.abs(),
        });
    }
}

fn shoelace2(v: &[(f64, f64)]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for k in 0..n {
        let a = v[k];
        let b = v[(k + 1) % n];
        s += a.0 * b.1 - b.0 * a.1;
    }
    s
}

fn polygon_centroid(v: &[(f64, f64)]) -> (f64, f64) {
    let n = v.len() as f64;
    let (mut cx, mut cy) = (0.0, 0.0);
    for &(x, y) in v {
        cx += x;
        cy += y;
    }
    (cx / n, cy / n)
}

fn polygon_symmetric(v: &[(f64, f64)], reflect: impl Fn(&(f64, f64)) -> (f64, f64)) -> bool {
    let scale = v.iter().map(|&(x, y)| x.abs().max(y.abs())).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    v.iter().all(|p| {
        let r = reflect(p);
        v.iter().any(|q| (q.0 - r.0).abs() < tol && (q.1 - r.1).abs() < tol)
    })
}

fn dist_to_segment(x: f64, y: f64, a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((x - a.0) * dx + (y - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (x - a.0 - t * dx).hypot(y - a.1 - t * dy)
}

fn point_in_polygon(x: f64, y: f64, v: &[(f64, f64)]) -> bool {
    // Even-odd ray casting.
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = v[i];
        let (xj, yj) = v[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}
