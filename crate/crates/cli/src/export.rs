//! Interface and field dumps.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use mof_core::fields::{Grid, MofState};
use mof_core::geometry::{interface_polygon, interface_segment_2d};
use mof_core::reconstruction::{reconstruct, MofTarget};

/// Reconstructed plane of a mixed cell in unit-cell coordinates.
fn cell_plane(state: &MofState, grid: &Grid, id: usize) -> Option<([f64; 3], f64)> {
    if !state.is_mixed(id) {
        return None;
    }
    let target = MofTarget {
        volume_fraction: state.c[id],
        centroid: state.xc[id],
    };
    let plane = reconstruct(&target, grid.spacing, grid.dim).ok()?;
    Some(plane.unit_form(grid.spacing))
}

/// 2D: one `x1 y1 x2 y2` line per mixed cell after a header line.
pub fn interface_segments(state: &MofState, grid: &Grid) -> String {
    let mut out = String::from("# x1 y1 x2 y2\n");
    for id in 0..grid.len() {
        let Some((n, alpha)) = cell_plane(state, grid, id) else {
            continue;
        };
        let Some(seg) = interface_segment_2d([n[0], n[1]], alpha, [1.0, 1.0]) else {
            continue;
        };
        let [i, j, k] = grid.ijk(id);
        let o = grid.cell_corner(i, j, k);
        let h = grid.spacing;
        let p = |q: [f64; 2]| [o[0] + q[0] * h[0], o[1] + q[1] * h[1]];
        let (a, b) = (p(seg[0]), p(seg[1]));
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e} {:.16e}", a[0], a[1], b[0], b[1]);
    }
    out
}

/// 3D: interface polygons as legacy ASCII VTK polydata.
pub fn interface_vtk(state: &MofState, grid: &Grid) -> String {
    let mut points: Vec<[f64; 3]> = Vec::new();
    let mut polys: Vec<Vec<usize>> = Vec::new();
    for id in 0..grid.len() {
        let Some((n, alpha)) = cell_plane(state, grid, id) else {
            continue;
        };
        let poly = interface_polygon(n, alpha, [1.0; 3]);
        if poly.len() < 3 {
            continue;
        }
        let [i, j, k] = grid.ijk(id);
        let o = grid.cell_corner(i, j, k);
        let h = grid.spacing;
        let start = points.len();
        for q in &poly {
            points.push([o[0] + q[0] * h[0], o[1] + q[1] * h[1], o[2] + q[2] * h[2]]);
        }
        polys.push((start..points.len()).collect());
    }
    let mut out = String::from("# vtk DataFile Version 3.0\nmof interfaces\nASCII\nDATASET POLYDATA\n");
    let _ = writeln!(out, "POINTS {} double", points.len());
    for p in &points {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2]);
    }
    let size: usize = polys.iter().map(|p| p.len() + 1).sum();
    let _ = writeln!(out, "POLYGONS {} {}", polys.len(), size);
    for p in &polys {
        let ids: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{} {}", p.len(), ids.join(" "));
    }
    out
}

/// Write the interface of `state` to `path`: segments in 2D, VTK in 3D.
pub fn export_interfaces(state: &MofState, grid: &Grid, path: &Path) -> io::Result<()> {
    let text = if grid.dim == 2 {
        interface_segments(state, grid)
    } else {
        interface_vtk(state, grid)
    };
    std::fs::write(path, text)
}

/// Per-cell `i j k C xc yc zc`, centroids in cell-local fractions.
pub fn export_fields(state: &MofState, grid: &Grid, path: &Path) -> io::Result<()> {
    let mut out = String::from("# i j k C xc yc zc\n");
    for id in 0..grid.len() {
        let [i, j, k] = grid.ijk(id);
        let x = state.xc[id];
        let _ = writeln!(
            out,
            "{i} {j} {k} {:.16e} {:.16e} {:.16e} {:.16e}",
            state.c[id], x[0], x[1], x[2]
        );
    }
    std::fs::write(path, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mof_core::fields::Boundary;

    #[test]
    fn half_cell_gives_one_spanning_segment() {
        let g = Grid::cube(2, 4, Boundary::Periodic).unwrap();
        let mut s = MofState::uniform(&g, 0.0);
        let id = g.idx(1, 2, 0);
        s.c[id] = 0.5;
        s.xc[id] = [0.25, 0.5, 0.5];
        let text = interface_segments(&s, &g);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let v: Vec<f64> = lines[1].split(' ').map(|t| t.parse().unwrap()).collect();
        // vertical line x = 0.375 from y = 0.5 to 0.75
        assert!((v[0] - 0.375).abs() < 1e-9 && (v[2] - 0.375).abs() < 1e-9);
        let (lo, hi) = (v[1].min(v[3]), v[1].max(v[3]));
        assert!((lo - 0.5).abs() < 1e-9 && (hi - 0.75).abs() < 1e-9);
    }

    #[test]
    fn pure_fields_have_header_only() {
        let g = Grid::cube(2, 4, Boundary::Periodic).unwrap();
        assert_eq!(interface_segments(&MofState::uniform(&g, 1.0), &g), "# x1 y1 x2 y2\n");
        let g = Grid::cube(3, 4, Boundary::Periodic).unwrap();
        let vtk = interface_vtk(&MofState::uniform(&g, 0.0), &g);
        assert!(vtk.starts_with("# vtk DataFile Version 3.0\n"));
        assert!(vtk.contains("POINTS 0 double\nPOLYGONS 0 0\n"));
    }
}
