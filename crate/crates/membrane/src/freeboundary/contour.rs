//! Marching-squares extraction of the free boundary `{u = c}` and the
//! regular/singular classification of its vertices by `|∇u|`.

use crate::error::{Error, Result};
use crate::geometry::ScalarField;

#[derive(Debug, Clone, Copy)]
pub struct ContourVertex {
    pub x: f64,
    pub y: f64,
    /// `|∇u|` bilinearly interpolated at the vertex.
    pub grad: f64,
}

#[derive(Debug, Clone)]
pub struct Polyline {
    pub closed: bool,
    pub vertices: Vec<ContourVertex>,
}

/// Level set `{u = c}` as polylines with per-vertex gradient magnitude.
#[derive(Debug, Clone)]
pub struct Contour {
    pub level: f64,
    pub polylines: Vec<Polyline>,
}

impl Contour {
    pub fn n_vertices(&self) -> usize {
        self.polylines.iter().map(|p| p.vertices.len()).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &ContourVertex> {
        self.polylines.iter().flat_map(|p| p.vertices.iter())
    }

    pub fn min_grad(&self) -> f64 {
        self.vertices().map(|v| v.grad).fold(f64::MAX, f64::min)
    }

    pub fn max_grad(&self) -> f64 {
        self.vertices().map(|v| v.grad).fold(f64::MIN, f64::max)
    }
}

/// Indices `(polyline, vertex)` split into regular and singular lists.
#[derive(Debug, Clone, Default)]
pub struct Classified {
    pub regular: Vec<(usize, usize)>,
    pub singular: Vec<(usize, usize)>,
}

/// Vertices with `|∇u|` below the absolute threshold `tau_abs` are singular.
pub fn classify_points(contour: &Contour, tau_abs: f64) -> Classified {
    let mut out = Classified::default();
    for (pi, poly) in contour.polylines.iter().enumerate() {
        for (vi, v) in poly.vertices.iter().enumerate() {
            if v.grad < tau_abs {
                out.singular.push((pi, vi));
            } else {
                out.regular.push((pi, vi));
            }
        }
    }
    out
}

/// Extract `{u = c}` by marching squares with linear edge interpolation.
///
/// Cells are scanned in row-major order over the sub-grid whose four corners
/// are all active; the "inside" phase is `u ≤ c` (ties go to the sublevel
/// set) and the two ambiguous saddle cases are resolved by the cell-center
/// average, so the output is deterministic.
pub fn extract_contour(u: &ScalarField, c: f64) -> Result<Contour> {
    let g = u.grid().clone();
    let mask = u.mask();
    let (gx, gy) = u.gradient();

    // Global edge ids: horizontal edge (i,j) carries the crossing on the
    // segment from node (i,j) to (i+1,j); vertical edge (i,j) from (i,j) to
    // (i,j+1).
    let h_id = |i: usize, j: usize| j * (g.nx - 1) + i;
    let v_id = |i: usize, j: usize| g.nx * g.ny + j * g.nx + i;

    let vertex_on_h = |i: usize, j: usize| -> ContourVertex {
        let (u0, u1) = (u.at(i, j), u.at(i + 1, j));
        let t = if u1 != u0 { ((c - u0) / (u1 - u0)).clamp(0.0, 1.0) } else { 0.5 };
        let x = g.x(i) + t * g.hx;
        let y = g.y(j);
        ContourVertex { x, y, grad: gx.bilinear(x, y).hypot(gy.bilinear(x, y)) }
    };
    let vertex_on_v = |i: usize, j: usize| -> ContourVertex {
        let (u0, u1) = (u.at(i, j), u.at(i, j + 1));
        let t = if u1 != u0 { ((c - u0) / (u1 - u0)).clamp(0.0, 1.0) } else { 0.5 };
        let x = g.x(i);
        let y = g.y(j) + t * g.hy;
        ContourVertex { x, y, grad: gx.bilinear(x, y).hypot(gy.bilinear(x, y)) }
    };

    // Segments as (edge id, edge id) plus cached vertices.
    let mut seg_edges: Vec<(usize, usize)> = Vec::new();
    let mut seg_verts: Vec<(ContourVertex, ContourVertex)> = Vec::new();
    let mut push = |ea: usize, eb: usize, va: ContourVertex, vb: ContourVertex| {
        seg_edges.push((ea, eb));
        seg_verts.push((va, vb));
    };

    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let ids = [g.idx(i, j), g.idx(i + 1, j), g.idx(i + 1, j + 1), g.idx(i, j + 1)];
            if ids.iter().any(|&id| !mask.is_active(id)) {
                continue;
            }
            let inside = [
                u.values()[ids[0]] <= c,
                u.values()[ids[1]] <= c,
                u.values()[ids[2]] <= c,
                u.values()[ids[3]] <= c,
            ];
            let case = (inside[0] as u8)
                | (inside[1] as u8) << 1
                | (inside[2] as u8) << 2
                | (inside[3] as u8) << 3;
            if case == 0 || case == 15 {
                continue;
            }
            // Edge handles for this cell.
            let b = (h_id(i, j), vertex_on_h(i, j));
            let t = (h_id(i, j + 1), vertex_on_h(i, j + 1));
            let l = (v_id(i, j), vertex_on_v(i, j));
            let r = (v_id(i + 1, j), vertex_on_v(i + 1, j));
            match case {
                1 | 14 => push(l.0, b.0, l.1, b.1),
                2 | 13 => push(b.0, r.0, b.1, r.1),
                3 | 12 => push(l.0, r.0, l.1, r.1),
                4 | 11 => push(r.0, t.0, r.1, t.1),
                6 | 9 => push(b.0, t.0, b.1, t.1),
                7 | 8 => push(l.0, t.0, l.1, t.1),
                5 | 10 => {
                    // Saddle: the center average decides which diagonal pair
                    // of corners stays connected.
                    let center = ids.iter().map(|&id| u.values()[id]).sum::<f64>() / 4.0;
                    let center_inside = center <= c;
                    let join_inside_diag = (case == 5) == center_inside;
                    if join_inside_diag {
                        push(b.0, r.0, b.1, r.1);
                        push(t.0, l.0, t.1, l.1);
                    } else {
                        push(l.0, b.0, l.1, b.1);
                        push(r.0, t.0, r.1, t.1);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    if seg_edges.is_empty() {
        return Err(Error::EmptyContour);
    }

    // Chain segments into polylines through shared edges.
    let mut by_edge: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for (si, &(a, b)) in seg_edges.iter().enumerate() {
        by_edge.entry(a).or_default().push(si);
        by_edge.entry(b).or_default().push(si);
    }
    let mut used = vec![false; seg_edges.len()];
    let mut polylines = Vec::new();
    for start in 0..seg_edges.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut edge_chain = vec![seg_edges[start].0, seg_edges[start].1];
        let mut verts = vec![seg_verts[start].0, seg_verts[start].1];
        // Extend forward from the tail, then backward from the head.
        for dir in 0..2 {
            loop {
                let tail = if dir == 0 { *edge_chain.last().unwrap() } else { edge_chain[0] };
                let next = by_edge
                    .get(&tail)
                    .and_then(|list| list.iter().find(|&&si| !used[si]))
                    .copied();
                let Some(si) = next else { break };
                used[si] = true;
                let (a, b) = seg_edges[si];
                let (va, vb) = seg_verts[si];
                let (new_edge, new_vert) = if a == tail { (b, vb) } else { (a, va) };
                if dir == 0 {
                    edge_chain.push(new_edge);
                    verts.push(new_vert);
                } else {
                    edge_chain.insert(0, new_edge);
                    verts.insert(0, new_vert);
                }
            }
        }
        let closed = edge_chain.len() > 2 && edge_chain.first() == edge_chain.last();
        if closed {
            edge_chain.pop();
            verts.pop();
        }
        polylines.push(Polyline { closed, vertices: verts });
    }
    Ok(Contour { level: c, polylines })
}
