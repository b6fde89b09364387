//! Splitting a 3D solenoidal field into three planar solenoidal fields.

use super::AdvectionError;
use crate::fields::{FaceVelocity, Grid};

/// u = u1 + u2 + u3 with u1 in the x-y plane, u2 in x-z and u3 in y-z.
#[derive(Debug, Clone)]
pub struct DecomposedVelocity {
    pub u1: FaceVelocity,
    pub u2: FaceVelocity,
    pub u3: FaceVelocity,
    /// Largest decomposed face speed over the largest original one.
    pub amplification: f64,
}

impl DecomposedVelocity {
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            u1: self.u1.scaled(s),
            u2: self.u2.scaled(s),
            u3: self.u3.scaled(s),
            amplification: self.amplification,
        }
    }
}

fn max_abs(v: &FaceVelocity) -> f64 {
    v.u.iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Half of u goes to each of u1 and u2; v1 and w2 are then marched from
/// half the boundary value so each planar field is discretely divergence
/// free. u3 takes the rest.
pub fn decompose_velocity_3d(grid: &Grid, vel: &FaceVelocity) -> Result<DecomposedVelocity, AdvectionError> {
    if grid.dim != 3 || !vel.matches(grid) {
        return Err(AdvectionError::Shape);
    }
    let [nx, ny, nz] = grid.dims;
    let [hx, hy, hz] = grid.spacing;
    let mut u1 = FaceVelocity::zeros(grid);
    let mut u2 = FaceVelocity::zeros(grid);
    let mut u3 = FaceVelocity::zeros(grid);
    for (i, v) in vel.u[0].iter().enumerate() {
        u1.u[0][i] = 0.5 * v;
        u2.u[0][i] = 0.5 * v;
    }
    for k in 0..nz {
        for i in 0..nx {
            let mut v = 0.5 * vel.get(1, i, 0, k);
            u1.set(1, i, 0, k, v);
            for j in 0..ny {
                v -= (u1.get(0, i + 1, j, k) - u1.get(0, i, j, k)) * hy / hx;
                u1.set(1, i, j + 1, k, v);
            }
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            let mut w = 0.5 * vel.get(2, i, j, 0);
            u2.set(2, i, j, 0, w);
            for k in 0..nz {
                w -= (u2.get(0, i + 1, j, k) - u2.get(0, i, j, k)) * hz / hx;
                u2.set(2, i, j, k + 1, w);
            }
        }
    }
    for (i, v) in vel.u[1].iter().enumerate() {
        u3.u[1][i] = v - u1.u[1][i];
    }
    for (i, w) in vel.u[2].iter().enumerate() {
        u3.u[2][i] = w - u2.u[2][i];
    }
    let orig = max_abs(vel);
    let dec = max_abs(&u1).max(max_abs(&u2)).max(max_abs(&u3));
    Ok(DecomposedVelocity {
        u1,
        u2,
        u3,
        amplification: if orig > 0.0 { dec / orig } else { 0.0 },
    })
}
