//! Benchmark problems: shapes, analytic flows, initial fields and error
//! metrics.
//!
//! Flows are built from discrete stream functions on grid nodes, so the
//! staggered fields are divergence free up to rounding.

use std::f64::consts::PI;

use thiserror::Error;

use crate::fields::{Boundary, FaceVelocity, FieldError, Grid, MofState};

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("unknown case {0:?}")]
    UnknownCase(String),
    #[error("states do not match the grid")]
    GridMismatch,
    #[error("errors must be positive, got {0} and {1}")]
    NonPositive(f64, f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Implicit shapes, negative inside. Every distance is 1-Lipschitz so the
/// subdivision classifier can trust it.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Everything,
    Nothing,
    /// Points with `normal . x <= offset`; `normal` has unit length.
    HalfSpace { normal: [f64; 3], offset: f64 },
    Circle { center: [f64; 2], radius: f64 },
    Sphere { center: [f64; 3], radius: f64 },
    /// Disk with a vertical slot cut from `slot_bottom` up through the rim.
    SlottedDisk {
        center: [f64; 2],
        radius: f64,
        slot_width: f64,
        slot_bottom: f64,
    },
    /// Sphere with the slotted-disk cross section extruded along z.
    SlottedSphere {
        center: [f64; 3],
        radius: f64,
        slot_width: f64,
        slot_bottom: f64,
    },
}

fn box_sdf(p: [f64; 2], lo: [f64; 2], hi: [f64; 2]) -> f64 {
    let c = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let h = [0.5 * (hi[0] - lo[0]), 0.5 * (hi[1] - lo[1])];
    let q = [(p[0] - c[0]).abs() - h[0], (p[1] - c[1]).abs() - h[1]];
    let out = (q[0].max(0.0).powi(2) + q[1].max(0.0).powi(2)).sqrt();
    out + q[0].max(q[1]).min(0.0)
}

impl Shape {
    pub fn sdf(&self, p: [f64; 3]) -> f64 {
        match *self {
            Shape::Everything => -1e300,
            Shape::Nothing => 1e300,
            Shape::HalfSpace { normal, offset } => {
                normal[0] * p[0] + normal[1] * p[1] + normal[2] * p[2] - offset
            }
            Shape::Circle { center, radius } => {
                (p[0] - center[0]).hypot(p[1] - center[1]) - radius
            }
            Shape::Sphere { center, radius } => {
                let d = [p[0] - center[0], p[1] - center[1], p[2] - center[2]];
                (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() - radius
            }
            Shape::SlottedDisk {
                center,
                radius,
                slot_width,
                slot_bottom,
            } => {
                let disk = (p[0] - center[0]).hypot(p[1] - center[1]) - radius;
                let slot = box_sdf(
                    [p[0], p[1]],
                    [center[0] - 0.5 * slot_width, slot_bottom],
                    [center[0] + 0.5 * slot_width, center[1] + 2.0 * radius],
                );
                disk.max(-slot)
            }
            Shape::SlottedSphere {
                center,
                radius,
                slot_width,
                slot_bottom,
            } => {
                let d = [p[0] - center[0], p[1] - center[1], p[2] - center[2]];
                let ball = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() - radius;
                let slot = box_sdf(
                    [p[0], p[1]],
                    [center[0] - 0.5 * slot_width, slot_bottom],
                    [center[0] + 0.5 * slot_width, center[1] + 2.0 * radius],
                );
                ball.max(-slot)
            }
        }
    }
}

/// Base (t = 0) flow of each case.
#[derive(Debug, Clone, PartialEq)]
pub enum Flow {
    Still,
    /// Solid-body rotation about `center`, plus a uniform `w` in 3D.
    Rotation { center: [f64; 2], omega: f64, w: f64 },
    /// Rider–Kothe single vortex.
    SingleVortex,
    /// Periodic array of 4 x 4 vortices.
    ReverseVortex,
    /// Single vortex in x-y plus a laminar pipe profile along z.
    VortexPipe { pipe_radius: f64 },
    /// LeVeque deformation field.
    Deformation3d,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCase {
    pub name: &'static str,
    pub dim: usize,
    /// Domain size; a grid has `N * extent` cells per axis.
    pub extent: [f64; 3],
    pub boundary: [Boundary; 3],
    pub shape: Shape,
    pub flow: Flow,
    pub period: f64,
    /// Whether the flow carries the cos(pi t / T) reversal factor.
    pub reversing: bool,
    pub resolutions: &'static [usize],
    pub cfls: &'static [f64],
}

pub const CASE_NAMES: [&str; 8] = [
    "zalesak2d",
    "singlevortex2d",
    "reversevortex2d",
    "zalesak3d",
    "singlevortex3d",
    "reversevortex3d",
    "static2d",
    "static3d",
];

const CFLS: &[f64] = &[0.05, 0.1, 0.15, 0.2, 0.25, 0.5, 0.8, 1.0];

pub fn case(name: &str) -> Result<BenchCase, BenchError> {
    use Boundary::*;
    let c2 = |name, boundary, shape, flow, period, reversing| BenchCase {
        name,
        dim: 2,
        extent: [1.0, 1.0, 1.0],
        boundary: [boundary, boundary, Periodic],
        shape,
        flow,
        period,
        reversing,
        resolutions: &[32, 64, 128],
        cfls: CFLS,
    };
    let c3 = |name, extent, boundary, shape, flow, period, reversing| BenchCase {
        name,
        dim: 3,
        extent,
        boundary,
        shape,
        flow,
        period,
        reversing,
        resolutions: &[32, 64],
        cfls: CFLS,
    };
    let disk = Shape::SlottedDisk {
        center: [0.5, 0.75],
        radius: 0.15,
        slot_width: 0.05,
        slot_bottom: 0.6,
    };
    Ok(match name.trim().to_ascii_lowercase().as_str() {
        "zalesak2d" => c2(
            "zalesak2d",
            ZeroGradient,
            disk,
            Flow::Rotation {
                center: [0.5, 0.5],
                omega: 2.0 * PI,
                w: 0.0,
            },
            1.0,
            false,
        ),
        "singlevortex2d" => c2(
            "singlevortex2d",
            Periodic,
            Shape::Circle {
                center: [0.5, 0.75],
                radius: 0.15,
            },
            Flow::SingleVortex,
            8.0,
            true,
        ),
        "reversevortex2d" => c2(
            "reversevortex2d",
            Periodic,
            Shape::Circle {
                center: [0.5, 0.5],
                radius: 0.15,
            },
            Flow::ReverseVortex,
            2.0,
            true,
        ),
        "static2d" => c2(
            "static2d",
            Periodic,
            Shape::Circle {
                center: [0.5, 0.5],
                radius: 0.3,
            },
            Flow::Still,
            1.0,
            false,
        ),
        "zalesak3d" => c3(
            "zalesak3d",
            [1.0; 3],
            [ZeroGradient, ZeroGradient, Periodic],
            Shape::SlottedSphere {
                center: [0.5, 0.75, 0.5],
                radius: 0.15,
                slot_width: 0.05,
                slot_bottom: 0.6,
            },
            Flow::Rotation {
                center: [0.5, 0.5],
                omega: 2.0 * PI,
                w: 1.0,
            },
            1.0,
            false,
        ),
        "singlevortex3d" => c3(
            "singlevortex3d",
            [1.0, 1.0, 2.0],
            [Periodic, Periodic, ZeroGradient],
            Shape::Sphere {
                center: [0.5, 0.75, 0.25],
                radius: 0.15,
            },
            Flow::VortexPipe { pipe_radius: 0.5 },
            3.0,
            true,
        ),
        "reversevortex3d" => c3(
            "reversevortex3d",
            [1.0; 3],
            [Periodic; 3],
            Shape::Sphere {
                center: [0.35, 0.35, 0.35],
                radius: 0.15,
            },
            Flow::Deformation3d,
            3.0,
            true,
        ),
        "static3d" => c3(
            "static3d",
            [1.0; 3],
            [Periodic; 3],
            Shape::Sphere {
                center: [0.5, 0.5, 0.5],
                radius: 0.3,
            },
            Flow::Still,
            1.0,
            false,
        ),
        _ => return Err(BenchError::UnknownCase(name.to_string())),
    })
}

impl BenchCase {
    pub fn grid(&self, n: usize) -> Result<Grid, BenchError> {
        let h = 1.0 / n as f64;
        let dims: [usize; 3] = std::array::from_fn(|a| (self.extent[a] * n as f64).round() as usize);
        Ok(if self.dim == 2 {
            Grid::new_2d([dims[0], dims[1]], [h, h], [0.0, 0.0], [self.boundary[0], self.boundary[1]])?
        } else {
            Grid::new_3d(dims, [h; 3], [0.0; 3], self.boundary)?
        })
    }

    pub fn time_factor(&self, t: f64) -> f64 {
        if self.reversing {
            (PI * t / self.period).cos()
        } else {
            1.0
        }
    }

    /// Flow at time `t`.
    pub fn velocity(&self, grid: &Grid, t: f64) -> FaceVelocity {
        base_velocity(&self.flow, grid).scaled(self.time_factor(t))
    }
}

/// Staggered velocity from a node stream function: u = d psi/dy, v = -d psi/dx.
fn from_stream_2d(grid: &Grid, psi: impl Fn(f64, f64) -> f64, vel: &mut FaceVelocity) {
    let [nx, ny, nz] = grid.dims;
    let [hx, hy, _] = grid.spacing;
    let node = |i: usize, j: usize| {
        psi(
            grid.origin[0] + i as f64 * hx,
            grid.origin[1] + j as f64 * hy,
        )
    };
    let mut nodes = vec![0.0; (nx + 1) * (ny + 1)];
    for j in 0..=ny {
        for i in 0..=nx {
            nodes[i + (nx + 1) * j] = node(i, j);
        }
    }
    let p = |i: usize, j: usize| nodes[i + (nx + 1) * j];
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..=nx {
                vel.set(0, i, j, k, (p(i, j + 1) - p(i, j)) / hy);
            }
        }
        for j in 0..=ny {
            for i in 0..nx {
                vel.set(1, i, j, k, -(p(i + 1, j) - p(i, j)) / hx);
            }
        }
    }
}

pub fn base_velocity(flow: &Flow, grid: &Grid) -> FaceVelocity {
    let mut vel = FaceVelocity::zeros(grid);
    match *flow {
        Flow::Still => {}
        Flow::Rotation { center, omega, w } => {
            from_stream_2d(
                grid,
                |x, y| -0.5 * omega * ((x - center[0]).powi(2) + (y - center[1]).powi(2)),
                &mut vel,
            );
            if grid.dim == 3 {
                vel.u[2].iter_mut().for_each(|v| *v = w);
            }
        }
        Flow::SingleVortex => from_stream_2d(
            grid,
            |x, y| (PI * x).sin().powi(2) * (PI * y).sin().powi(2) / PI,
            &mut vel,
        ),
        Flow::ReverseVortex => from_stream_2d(
            grid,
            |x, y| (4.0 * PI * x).sin() * (4.0 * PI * y).sin() / (4.0 * PI),
            &mut vel,
        ),
        Flow::VortexPipe { pipe_radius } => {
            from_stream_2d(
                grid,
                |x, y| (PI * x).sin().powi(2) * (PI * y).sin().powi(2) / PI,
                &mut vel,
            );
            let [nx, ny, nz] = grid.dims;
            for k in 0..=nz {
                for j in 0..ny {
                    for i in 0..nx {
                        let c = grid.cell_center(i, j, 0);
                        let r = (c[0] - 0.5).hypot(c[1] - 0.5);
                        let w = if r < pipe_radius {
                            (1.0 - r / pipe_radius).powi(2)
                        } else {
                            0.0
                        };
                        vel.set(2, i, j, k, w);
                    }
                }
            }
        }
        Flow::Deformation3d => deformation_3d(grid, &mut vel),
    }
    vel
}

/// Discrete curl of the edge potential A = (0, -psi2, psi1): u = Dy psi1 +
/// Dz psi2, v = -Dx psi1, w = -Dx psi2. Each edge value enters two faces of
/// a cell with opposite signs, so the divergence cancels exactly.
fn deformation_3d(grid: &Grid, vel: &mut FaceVelocity) {
    let [nx, ny, nz] = grid.dims;
    let [hx, hy, hz] = grid.spacing;
    let [ox, oy, oz] = grid.origin;
    let s2 = |v: f64| (PI * v).sin().powi(2);
    let s = |v: f64| (2.0 * PI * v).sin();
    // psi1 on z-edges, psi2 on y-edges
    let psi1 = |i: usize, j: usize, k: usize| {
        let (x, y, z) = (ox + i as f64 * hx, oy + j as f64 * hy, oz + (k as f64 + 0.5) * hz);
        s2(x) * s2(y) * s(z) / PI
    };
    let psi2 = |i: usize, j: usize, k: usize| {
        let (x, y, z) = (ox + i as f64 * hx, oy + (j as f64 + 0.5) * hy, oz + k as f64 * hz);
        s2(x) * s2(z) * s(y) / PI
    };
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..=nx {
                let u = (psi1(i, j + 1, k) - psi1(i, j, k)) / hy + (psi2(i, j, k + 1) - psi2(i, j, k)) / hz;
                vel.set(0, i, j, k, u);
            }
        }
    }
    for k in 0..nz {
        for j in 0..=ny {
            for i in 0..nx {
                vel.set(1, i, j, k, -(psi1(i + 1, j, k) - psi1(i, j, k)) / hx);
            }
        }
    }
    for k in 0..=nz {
        for j in 0..ny {
            for i in 0..nx {
                vel.set(2, i, j, k, -(psi2(i + 1, j, k) - psi2(i, j, k)) / hx);
            }
        }
    }
}

/// Volume fractions and centroids by recursive bisection of every cell.
/// Sub-boxes clear of the surface are classified exactly; the ones still
/// straddling it at `depth` count by their center point, so the per-cell
/// volume error is O(2^-depth) of the cell in the interface cells only.
pub fn init_fractions(shape: &Shape, grid: &Grid, depth: u32) -> MofState {
    let depth = depth.max(1);
    let mut state = MofState::uniform(grid, 0.0);
    let d = grid.dim;
    for id in 0..grid.len() {
        let [i, j, k] = grid.ijk(id);
        let corner = grid.cell_corner(i, j, k);
        let mut acc = (0.0, [0.0; 3]);
        refine(shape, grid, corner, [0.0; 3], 1.0, 0, depth, d, &mut acc);
        let (v, m) = acc;
        state.c[id] = v;
        state.xc[id] = if v > 0.0 {
            [m[0] / v, m[1] / v, if d == 3 { m[2] / v } else { 0.5 }]
        } else {
            [0.5; 3]
        };
    }
    crate::fields::bound_repair(&mut state, d);
    state
}

#[allow(clippy::too_many_arguments)]
fn refine(
    shape: &Shape,
    grid: &Grid,
    corner: [f64; 3],
    lo: [f64; 3],
    size: f64,
    level: u32,
    depth: u32,
    dim: usize,
    acc: &mut (f64, [f64; 3]),
) {
    let mut p = [0.0; 3];
    let mut r2 = 0.0;
    for a in 0..3 {
        let h = grid.spacing[a];
        if a < dim {
            p[a] = corner[a] + (lo[a] + 0.5 * size) * h;
            r2 += (0.5 * size * h).powi(2);
        } else {
            p[a] = corner[a] + 0.5 * h;
        }
    }
    let dist = shape.sdf(p);
    let r = r2.sqrt();
    if dist >= r {
        return;
    }
    if dist <= -r || level == depth {
        if dist <= -r || dist < 0.0 {
            let v = size.powi(dim as i32);
            acc.0 += v;
            for a in 0..3 {
                acc.1[a] += v * if a < dim { lo[a] + 0.5 * size } else { 0.5 };
            }
        }
        return;
    }
    let half = 0.5 * size;
    let n = 1usize << dim;
    for c in 0..n {
        let mut sub = lo;
        for a in 0..dim {
            if c >> a & 1 == 1 {
                sub[a] += half;
            }
        }
        refine(shape, grid, corner, sub, half, level + 1, depth, dim, acc);
    }
}

fn check(a: &MofState, b: &MofState, grid: &Grid) -> Result<(), BenchError> {
    if a.len() != grid.len() || b.len() != grid.len() {
        return Err(BenchError::GridMismatch);
    }
    Ok(())
}

/// Compensated sum, so metrics at the 1e-12 level are not polluted by the
/// summation itself.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0f64;
    let mut comp = 0.0;
    for v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            comp += (s - t) + v;
        } else {
            comp += (v - t) + s;
        }
        s = t;
    }
    s + comp
}

fn norm(grid: &Grid) -> f64 {
    (grid.dims[0] as f64).powi(grid.dim as i32)
}

/// Sum of |C_final - C_ref| over N^dim, N the x resolution.
pub fn geometric_error(final_state: &MofState, reference: &MofState, grid: &Grid) -> Result<f64, BenchError> {
    check(final_state, reference, grid)?;
    let s = neumaier_sum(final_state.c.iter().zip(&reference.c).map(|(a, b)| (a - b).abs()));
    Ok(s / norm(grid))
}

/// |sum C_final - sum C_initial| over N^dim.
pub fn mass_error(final_state: &MofState, initial: &MofState, grid: &Grid) -> Result<f64, BenchError> {
    check(final_state, initial, grid)?;
    Ok(mass_difference(final_state, initial).abs() / norm(grid))
}

/// Mass drift relative to the initial mass.
pub fn relative_mass_drift(final_state: &MofState, initial: &MofState) -> f64 {
    let m0 = neumaier_sum(initial.c.iter().copied());
    if m0 == 0.0 {
        return mass_difference(final_state, initial).abs();
    }
    mass_difference(final_state, initial).abs() / m0
}

fn mass_difference(a: &MofState, b: &MofState) -> f64 {
    neumaier_sum(a.c.iter().copied().chain(b.c.iter().map(|v| -v)))
}

/// log2(E_coarse / E_fine) for grids one halving apart.
pub fn convergence_order(coarse: f64, fine: f64) -> Result<f64, BenchError> {
    if !(coarse > 0.0 && fine > 0.0) {
        return Err(BenchError::NonPositive(coarse, fine));
    }
    Ok((coarse / fine).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::discrete_divergence;

    #[test]
    fn full_domain() {
        let g = Grid::cube(2, 8, Boundary::Periodic).unwrap();
        let s = init_fractions(&Shape::Everything, &g, 6);
        assert!(s.c.iter().all(|&c| c == 1.0));
        assert!(s.xc.iter().all(|x| *x == [0.5; 3]));
    }

    #[test]
    fn half_plane_column() {
        let g = Grid::cube(2, 8, Boundary::Periodic).unwrap();
        // x <= 3.5 h: columns 0..3 full, column 3 half, rest empty
        let shape = Shape::HalfSpace {
            normal: [1.0, 0.0, 0.0],
            offset: 3.5 / 8.0,
        };
        let s = init_fractions(&shape, &g, 6);
        for j in 0..8 {
            for i in 0..8 {
                let id = g.idx(i, j, 0);
                let want = match i {
                    0..=2 => 1.0,
                    3 => 0.5,
                    _ => 0.0,
                };
                assert_eq!(s.c[id], want);
                if i == 3 {
                    assert_eq!(s.xc[id], [0.25, 0.5, 0.5]);
                }
            }
        }
    }

    #[test]
    fn circle_area() {
        // unit circle on a 64 x 64 grid covering [-1.25, 1.25]^2
        let h = 2.5 / 64.0;
        let g = Grid::new_2d([64, 64], [h, h], [-1.25, -1.25], [Boundary::Periodic; 2]).unwrap();
        let shape = Shape::Circle {
            center: [0.0, 0.0],
            radius: 1.0,
        };
        let s = init_fractions(&shape, &g, 6);
        let area = neumaier_sum(s.c.iter().copied()) * g.cell_volume();
        assert!((area - PI).abs() / PI <= 1e-5, "{area}");
    }

    #[test]
    fn sdf_is_lipschitz() {
        let c = case("zalesak3d").unwrap();
        let mut x = 0.1f64;
        for _ in 0..2000 {
            // cheap deterministic sequence
            x = (x * 7.31 + 0.123).fract();
            let p = [x, (x * 3.7).fract(), (x * 5.3).fract()];
            let q = [p[0] + 1e-3 * x, p[1] - 1e-3, p[2] + 5e-4];
            let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
            assert!((c.shape.sdf(p) - c.shape.sdf(q)).abs() <= d * (1.0 + 1e-12));
        }
    }

    #[test]
    fn discrete_divergence_free() {
        for name in CASE_NAMES {
            let c = case(name).unwrap();
            let g = c.grid(16).unwrap();
            for t in [0.0, 0.3 * c.period, c.period] {
                let v = c.velocity(&g, t);
                let div = discrete_divergence(&v, &g).unwrap();
                let scale = v.max_rate(&g).max(1.0);
                let worst = div.iter().fold(0.0f64, |m, d| m.max(d.abs()));
                assert!(worst <= 1e-13 * scale, "{name} {worst}");
            }
        }
    }

    #[test]
    fn zalesak_is_solid_rotation() {
        let c = case("zalesak2d").unwrap();
        let g = c.grid(32).unwrap();
        let v = c.velocity(&g, 0.37);
        let w = 2.0 * PI;
        for j in 0..32 {
            for i in 0..=32 {
                let y = (j as f64 + 0.5) / 32.0;
                assert!((v.get(0, i, j, 0) + w * (y - 0.5)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn vortex_stops_at_half_period() {
        let c = case("singlevortex2d").unwrap();
        let g = c.grid(16).unwrap();
        let v = c.velocity(&g, 0.5 * c.period);
        assert!(v.max_rate(&g) <= 1e-15);
    }

    #[test]
    fn reverse_vortex_cell_walls() {
        // psi vanishes on x = m/4, so v is zero on those y-faces... and u on
        // the x-faces at y = m/4 lines is zero by the same symmetry.
        let c = case("reversevortex2d").unwrap();
        let g = c.grid(32).unwrap();
        let v = c.velocity(&g, 0.0);
        for m in 0..=4 {
            let face = m * 8;
            for i in 0..32 {
                assert!(v.get(1, i, face.min(32), 0).abs() <= 1e-12 || face > 32);
            }
            for j in 0..32 {
                assert!(v.get(0, face, j, 0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn metric_examples() {
        let g = Grid::cube(2, 64, Boundary::Periodic).unwrap();
        let a = MofState::uniform(&g, 0.0);
        let mut b = a.clone();
        assert_eq!(geometric_error(&a, &a, &g).unwrap(), 0.0);
        b.c[17] = 1.0;
        assert_eq!(geometric_error(&b, &a, &g).unwrap(), 1.0 / 4096.0);
        b.c[17] = 0.5;
        assert_eq!(mass_error(&b, &a, &g).unwrap(), 0.5 / 4096.0);
        assert_eq!(convergence_order(0.2, 0.1).unwrap(), 1.0);
        assert_eq!(convergence_order(0.4, 0.1).unwrap(), 2.0);
        assert!(convergence_order(0.0, 0.1).is_err());
        let small = MofState::uniform(&Grid::cube(2, 8, Boundary::Periodic).unwrap(), 0.0);
        assert_eq!(geometric_error(&small, &a, &g), Err(BenchError::GridMismatch));
    }

    #[test]
    fn liovic_grid_is_elongated() {
        let c = case("singlevortex3d").unwrap();
        let g = c.grid(8).unwrap();
        assert_eq!(g.dims, [8, 8, 16]);
        assert!(case("nope").is_err());
    }
}
