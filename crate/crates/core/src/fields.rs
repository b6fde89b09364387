//! Uniform structured grids, staggered face velocities and per-cell MOF state.
//!
//! 2D grids are stored as 3D with a single cell along z; the z centroid of
//! every cell is then 0.5 and the z face velocity is zero.

use thiserror::Error;

/// Volume fractions within `EPS` of 0 or 1 count as pure.
pub const EPS: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("grid needs at least 4 cells per active axis, got {0:?}")]
    TooFewCells([usize; 3]),
    #[error("grid spacing must be positive, got {0:?}")]
    BadSpacing([f64; 3]),
    #[error("field shapes do not match the grid")]
    ShapeMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    ZeroGradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
    pub dim: usize,
    pub boundary: [Boundary; 3],
}

impl Grid {
    pub fn new_2d(
        dims: [usize; 2],
        spacing: [f64; 2],
        origin: [f64; 2],
        boundary: [Boundary; 2],
    ) -> Result<Self, FieldError> {
        let g = Grid {
            dims: [dims[0], dims[1], 1],
            spacing: [spacing[0], spacing[1], 1.0],
            origin: [origin[0], origin[1], 0.0],
            dim: 2,
            boundary: [boundary[0], boundary[1], Boundary::Periodic],
        };
        g.validate()?;
        Ok(g)
    }

    pub fn new_3d(
        dims: [usize; 3],
        spacing: [f64; 3],
        origin: [f64; 3],
        boundary: [Boundary; 3],
    ) -> Result<Self, FieldError> {
        let g = Grid {
            dims,
            spacing,
            origin,
            dim: 3,
            boundary,
        };
        g.validate()?;
        Ok(g)
    }

    /// `n` cells per axis on the unit square or cube.
    pub fn cube(dim: usize, n: usize, boundary: Boundary) -> Result<Self, FieldError> {
        let h = 1.0 / n as f64;
        if dim == 2 {
            Grid::new_2d([n, n], [h, h], [0.0, 0.0], [boundary; 2])
        } else {
            Grid::new_3d([n; 3], [h; 3], [0.0; 3], [boundary; 3])
        }
    }

    fn validate(&self) -> Result<(), FieldError> {
        if self.dims[..self.dim].iter().any(|&n| n < 4) {
            return Err(FieldError::TooFewCells(self.dims));
        }
        if self.spacing.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(FieldError::BadSpacing(self.spacing));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn ijk(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let r = idx / self.dims[0];
        [i, r % self.dims[1], r / self.dims[1]]
    }

    /// Distance between successive cells along `axis` in the flat index.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => 1,
            1 => self.dims[0],
            _ => self.dims[0] * self.dims[1],
        }
    }

    pub fn cell_volume(&self) -> f64 {
        let mut v = self.spacing[0] * self.spacing[1];
        if self.dim == 3 {
            v *= self.spacing[2];
        }
        v
    }

    pub fn cell_center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let c = [i, j, k];
        std::array::from_fn(|a| self.origin[a] + (c[a] as f64 + 0.5) * self.spacing[a])
    }

    /// Lower corner of a cell.
    pub fn cell_corner(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let c = [i, j, k];
        std::array::from_fn(|a| self.origin[a] + c[a] as f64 * self.spacing[a])
    }

    /// Cell index along `axis` shifted by `off`, wrapped or clamped per the
    /// boundary kind of that axis.
    #[inline]
    pub fn shift(&self, axis: usize, pos: usize, off: isize) -> usize {
        let n = self.dims[axis] as isize;
        let p = pos as isize + off;
        match self.boundary[axis] {
            Boundary::Periodic => p.rem_euclid(n) as usize,
            Boundary::ZeroGradient => p.clamp(0, n - 1) as usize,
        }
    }

    /// Shape of the face array normal to `axis`.
    pub fn face_dims(&self, axis: usize) -> [usize; 3] {
        let mut d = self.dims;
        d[axis] += 1;
        d
    }
}

/// Volume fraction and cell-local centroid (fractions of the spacing).
#[derive(Debug, Clone, PartialEq)]
pub struct MofState {
    pub c: Vec<f64>,
    pub xc: Vec<[f64; 3]>,
}

impl MofState {
    pub fn uniform(grid: &Grid, value: f64) -> Self {
        MofState {
            c: vec![value; grid.len()],
            xc: vec![[0.5; 3]; grid.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    #[inline]
    pub fn is_mixed(&self, idx: usize) -> bool {
        let c = self.c[idx];
        c > EPS && c < 1.0 - EPS
    }
}

/// Face-centered velocity components; component `a` has shape
/// `grid.face_dims(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceVelocity {
    pub u: [Vec<f64>; 3],
    pub dims: [usize; 3],
}

impl FaceVelocity {
    pub fn zeros(grid: &Grid) -> Self {
        FaceVelocity {
            u: std::array::from_fn(|a| {
                let d = grid.face_dims(a);
                vec![0.0; d[0] * d[1] * d[2]]
            }),
            dims: grid.dims,
        }
    }

    pub fn uniform(grid: &Grid, v: [f64; 3]) -> Self {
        let mut f = Self::zeros(grid);
        for a in 0..grid.dim {
            f.u[a].iter_mut().for_each(|x| *x = v[a]);
        }
        f
    }

    #[inline]
    pub fn face_index(&self, axis: usize, i: usize, j: usize, k: usize) -> usize {
        let mut d = self.dims;
        d[axis] += 1;
        i + d[0] * (j + d[1] * k)
    }

    #[inline]
    pub fn get(&self, axis: usize, i: usize, j: usize, k: usize) -> f64 {
        self.u[axis][self.face_index(axis, i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, axis: usize, i: usize, j: usize, k: usize, v: f64) {
        let f = self.face_index(axis, i, j, k);
        self.u[axis][f] = v;
    }

    pub fn matches(&self, grid: &Grid) -> bool {
        self.dims == grid.dims
            && (0..3).all(|a| {
                let d = grid.face_dims(a);
                self.u[a].len() == d[0] * d[1] * d[2]
            })
    }

    pub fn scaled(&self, s: f64) -> Self {
        FaceVelocity {
            u: std::array::from_fn(|a| self.u[a].iter().map(|v| v * s).collect()),
            dims: self.dims,
        }
    }

    /// Largest `|u| dt / dx` over all faces.
    pub fn max_courant(&self, grid: &Grid, dt: f64) -> f64 {
        (0..grid.dim)
            .map(|a| {
                self.u[a].iter().fold(0.0f64, |m, v| m.max(v.abs())) * dt / grid.spacing[a]
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|u| / dx` over all faces and axes.
    pub fn max_rate(&self, grid: &Grid) -> f64 {
        self.max_courant(grid, 1.0)
    }
}

/// Clamp out-of-range fractions and centroids; returns the number of cells
/// that were actually out of range. Pure cells get the cell-center centroid.
pub fn bound_repair(state: &mut MofState, dim: usize) -> usize {
    let mut count = 0;
    for (c, xc) in state.c.iter_mut().zip(state.xc.iter_mut()) {
        if repair_cell(c, xc, dim) {
            count += 1;
        }
    }
    count
}

/// Single-cell form of [`bound_repair`]; true when the cell was out of range.
#[inline]
pub fn repair_cell(c: &mut f64, xc: &mut [f64; 3], dim: usize) -> bool {
    let mut hit = false;
    if *c < 0.0 {
        *c = EPS;
        hit = true;
    } else if *c > 1.0 {
        *c = 1.0 - EPS;
        hit = true;
    }
    if *c <= EPS || *c >= 1.0 - EPS {
        *xc = [0.5; 3];
    } else {
        for x in xc.iter_mut().take(dim) {
            if !(*x >= 0.0 && *x <= 1.0) {
                *x = if x.is_nan() { 0.5 } else { x.clamp(EPS, 1.0 - EPS) };
                hit = true;
            }
        }
        if dim == 2 {
            xc[2] = 0.5;
        }
    }
    hit
}

/// Per-cell `sum_axes (u_out - u_in) / dx`.
pub fn discrete_divergence(vel: &FaceVelocity, grid: &Grid) -> Result<Vec<f64>, FieldError> {
    if !vel.matches(grid) {
        return Err(FieldError::ShapeMismatch);
    }
    let [nx, ny, nz] = grid.dims;
    let mut out = vec![0.0; grid.len()];
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let mut d = 0.0;
                for a in 0..grid.dim {
                    let mut hi = [i, j, k];
                    hi[a] += 1;
                    d += (vel.get(a, hi[0], hi[1], hi[2]) - vel.get(a, i, j, k)) / grid.spacing[a];
                }
                out[grid.idx(i, j, k)] = d;
            }
        }
    }
    Ok(out)
}

/// `sum C * cell volume`, summed in ascending cell order.
pub fn total_mass(state: &MofState, grid: &Grid) -> f64 {
    let mut s = 0.0;
    for c in &state.c {
        s += c;
    }
    s * grid.cell_volume()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repair_overfull_cell() {
        let g = Grid::cube(2, 4, Boundary::Periodic).unwrap();
        let mut s = MofState::uniform(&g, 0.0);
        s.c[3] = 1.0000000001;
        s.xc[3] = [0.3, 0.6, 0.5];
        assert_eq!(bound_repair(&mut s, 2), 1);
        assert_eq!(s.c[3], 1.0 - EPS);
        assert_eq!(s.xc[3], [0.5; 3]);
    }

    #[test]
    fn repair_outside_centroid() {
        let g = Grid::cube(3, 4, Boundary::Periodic).unwrap();
        let mut s = MofState::uniform(&g, 0.0);
        s.c[5] = 0.3;
        s.xc[5] = [1.2, 0.5, 0.5];
        assert_eq!(bound_repair(&mut s, 3), 1);
        assert!(s.xc[5][0] < 1.0 && s.xc[5][0] > 0.99);
        assert_eq!(bound_repair(&mut s, 3), 0);
    }

    #[test]
    fn repair_noop_in_bounds() {
        let g = Grid::cube(2, 4, Boundary::Periodic).unwrap();
        let mut s = MofState::uniform(&g, 0.4);
        s.xc[1] = [0.2, 0.7, 0.5];
        let before = s.clone();
        assert_eq!(bound_repair(&mut s, 2), 0);
        assert_eq!(s, before);
    }

    #[test]
    fn divergence_of_simple_fields() {
        let g = Grid::cube(3, 4, Boundary::Periodic).unwrap();
        let v = FaceVelocity::uniform(&g, [0.3, -1.0, 2.0]);
        assert!(discrete_divergence(&v, &g).unwrap().iter().all(|d| d.abs() < 1e-15));
        // u = x
        let mut v = FaceVelocity::zeros(&g);
        for k in 0..4 {
            for j in 0..4 {
                for i in 0..5 {
                    v.set(0, i, j, k, i as f64 * g.spacing[0]);
                }
            }
        }
        for d in discrete_divergence(&v, &g).unwrap() {
            assert!((d - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn mass_of_full_grid() {
        let g = Grid::new_3d([5, 4, 6], [1.0; 3], [0.0; 3], [Boundary::Periodic; 3]).unwrap();
        assert_eq!(total_mass(&MofState::uniform(&g, 1.0), &g), 120.0);
        assert_eq!(total_mass(&MofState::uniform(&g, 0.0), &g), 0.0);
    }

    #[test]
    fn small_grid_rejected() {
        assert!(Grid::cube(2, 3, Boundary::Periodic).is_err());
    }

    #[test]
    fn shift_wraps_and_clamps() {
        let mut g = Grid::cube(2, 4, Boundary::Periodic).unwrap();
        assert_eq!(g.shift(0, 0, -1), 3);
        assert_eq!(g.shift(0, 3, 1), 0);
        g.boundary[0] = Boundary::ZeroGradient;
        assert_eq!(g.shift(0, 0, -1), 0);
        assert_eq!(g.shift(0, 3, 1), 3);
    }
}
