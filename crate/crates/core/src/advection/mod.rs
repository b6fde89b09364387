//! Directionally split MOF advection.
//!
//! Every sweep moves both the volume fraction and the material centroid.
//! A full step strings sweeps together according to a [`Scheme`].

mod decompose;
mod sweep;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::fields::{FaceVelocity, Grid, MofState};
use crate::reconstruction::Options;

pub use decompose::{decompose_velocity_3d, DecomposedVelocity};
use sweep::{sweep, Kind, SweepArgs};

#[derive(Debug, Error, PartialEq)]
pub enum AdvectionError {
    #[error("Courant number {courant} exceeds 1 along axis {axis}")]
    Cfl { axis: usize, courant: f64 },
    #[error("non-positive cell mapping factor {factor} along axis {axis}")]
    Mapping { axis: usize, factor: f64 },
    #[error("scheme {scheme} does not support {dim}D grids")]
    Dimension { scheme: Scheme, dim: usize },
    #[error("velocity field does not match the grid")]
    Shape,
    #[error("time step must be positive and finite, got {0}")]
    TimeStep(f64),
}

/// The four one-dimensional sweep flavours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    EulerianImplicit,
    LagrangianExplicit,
    /// Only meaningful as the middle sweep of a 3D step.
    EulerianAlgebraic,
    WeymouthYueEI,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Ei,
    Le,
    Eile2d,
    Leei2d,
    Eile3d,
    Eile3ds,
    Eieale,
    Wy,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::Ei,
        Scheme::Le,
        Scheme::Eile2d,
        Scheme::Leei2d,
        Scheme::Eile3d,
        Scheme::Eile3ds,
        Scheme::Eieale,
        Scheme::Wy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ei => "EI",
            Scheme::Le => "LE",
            Scheme::Eile2d => "EILE2D",
            Scheme::Leei2d => "LEEI2D",
            Scheme::Eile3d => "EILE3D",
            Scheme::Eile3ds => "EILE3DS",
            Scheme::Eieale => "EIEALE",
            Scheme::Wy => "WY",
        }
    }

    pub fn supports(self, dim: usize) -> bool {
        match self {
            Scheme::Ei | Scheme::Le | Scheme::Wy => dim == 2 || dim == 3,
            Scheme::Eile2d | Scheme::Leei2d => dim == 2,
            Scheme::Eile3d | Scheme::Eile3ds | Scheme::Eieale => dim == 3,
        }
    }

    /// Schemes valid on grids of the given dimension.
    pub fn for_dim(dim: usize) -> Vec<Scheme> {
        Scheme::ALL.into_iter().filter(|s| s.supports(dim)).collect()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown scheme {0:?}")]
pub struct UnknownScheme(pub String);

impl FromStr for Scheme {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownScheme(s.to_string()))
    }
}

fn check(grid: &Grid, vel: &FaceVelocity, dt: f64) -> Result<(), AdvectionError> {
    if !vel.matches(grid) {
        return Err(AdvectionError::Shape);
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(AdvectionError::TimeStep(dt));
    }
    Ok(())
}

fn run(
    grid: &Grid,
    state: &mut MofState,
    vel: &FaceVelocity,
    dt: f64,
    axis: usize,
    kind: Kind,
    flank: Option<(usize, usize)>,
    ctilde: Option<&[bool]>,
) -> Result<usize, AdvectionError> {
    let recon = Options::default();
    let args = SweepArgs {
        axis,
        kind,
        dt,
        flank,
        ctilde,
        recon: &recon,
    };
    sweep(grid, state, vel, &args)
}

/// Eulerian implicit sweep along `axis`. Returns the number of repaired cells.
pub fn ei_sweep(
    grid: &Grid,
    state: &mut MofState,
    vel: &FaceVelocity,
    dt: f64,
    axis: usize,
) -> Result<usize, AdvectionError> {
    check(grid, vel, dt)?;
    run(grid, state, vel, dt, axis, Kind::Ei, None, None)
}

/// Lagrangian explicit sweep along `axis`.
pub fn le_sweep(
    grid: &Grid,
    state: &mut MofState,
    vel: &FaceVelocity,
    dt: f64,
    axis: usize,
) -> Result<usize, AdvectionError> {
    check(grid, vel, dt)?;
    run(grid, state, vel, dt, axis, Kind::Le, None, None)
}

/// Eulerian algebraic sweep along `axis`, sandwiched between an EI sweep
/// along `prev_axis` and an LE sweep along `next_axis`.
pub fn ea_sweep(
    grid: &Grid,
    state: &mut MofState,
    vel: &FaceVelocity,
    dt: f64,
    axis: usize,
    prev_axis: usize,
    next_axis: usize,
) -> Result<usize, AdvectionError> {
    check(grid, vel, dt)?;
    run(grid, state, vel, dt, axis, Kind::Ea, Some((prev_axis, next_axis)), None)
}

/// EI-style sweep with the Weymouth–Yue correction. `ctilde` must be frozen
/// at the start of the step, see [`wy_indicator`].
pub fn wy_sweep(
    grid: &Grid,
    state: &mut MofState,
    vel: &FaceVelocity,
    dt: f64,
    axis: usize,
    ctilde: &[bool],
) -> Result<usize, AdvectionError> {
    check(grid, vel, dt)?;
    assert_eq!(ctilde.len(), state.len());
    run(grid, state, vel, dt, axis, Kind::Wy, None, Some(ctilde))
}

/// Correction indicator: set where C >= 1/2.
pub fn wy_indicator(state: &MofState) -> Vec<bool> {
    state.c.iter().map(|&c| c >= 0.5).collect()
}

/// Sweep sequence of one step (1-based `step_index`). EILE3D runs on
/// decomposed fields and has no single-field plan.
pub fn sweep_plan(scheme: Scheme, dim: usize, step_index: usize) -> Vec<(SweepKind, usize)> {
    use SweepKind::*;
    let odd = step_index % 2 == 1;
    let axes: Vec<usize> = if dim == 2 {
        if odd {
            vec![0, 1]
        } else {
            vec![1, 0]
        }
    } else {
        let r = step_index.saturating_sub(1) % 3;
        vec![r, (r + 1) % 3, (r + 2) % 3]
    };
    let all = |k: SweepKind| axes.iter().map(|&a| (k, a)).collect();
    match scheme {
        Scheme::Ei => all(EulerianImplicit),
        Scheme::Le => all(LagrangianExplicit),
        Scheme::Wy => all(WeymouthYueEI),
        Scheme::Eile2d => vec![(EulerianImplicit, axes[0]), (LagrangianExplicit, axes[1])],
        Scheme::Leei2d => vec![(LagrangianExplicit, axes[0]), (EulerianImplicit, axes[1])],
        Scheme::Eile3ds => {
            if odd {
                vec![(EulerianImplicit, 0), (LagrangianExplicit, 1), (EulerianImplicit, 2)]
            } else {
                vec![(LagrangianExplicit, 0), (EulerianImplicit, 1), (LagrangianExplicit, 2)]
            }
        }
        Scheme::Eieale => vec![
            (EulerianImplicit, axes[0]),
            (EulerianAlgebraic, axes[1]),
            (LagrangianExplicit, axes[2]),
        ],
        Scheme::Eile3d => Vec::new(),
    }
}

fn run_plan(
    grid: &Grid,
    state: &mut MofState,
    vel: &FaceVelocity,
    dt: f64,
    plan: &[(SweepKind, usize)],
    ctilde: Option<&[bool]>,
) -> Result<usize, AdvectionError> {
    let mut repairs = 0;
    for (s, &(kind, axis)) in plan.iter().enumerate() {
        repairs += match kind {
            SweepKind::EulerianImplicit => run(grid, state, vel, dt, axis, Kind::Ei, None, None)?,
            SweepKind::LagrangianExplicit => run(grid, state, vel, dt, axis, Kind::Le, None, None)?,
            SweepKind::WeymouthYueEI => run(grid, state, vel, dt, axis, Kind::Wy, None, ctilde)?,
            SweepKind::EulerianAlgebraic => {
                let prev = plan[s - 1].1;
                let next = plan[s + 1].1;
                run(grid, state, vel, dt, axis, Kind::Ea, Some((prev, next)), None)?
            }
        };
    }
    Ok(repairs)
}

/// Advance one full step. `vel` is the field at mid-step. Returns the number
/// of repaired cells over all sweeps.
pub fn step(
    grid: &Grid,
    state: &mut MofState,
    vel: &FaceVelocity,
    dt: f64,
    scheme: Scheme,
    step_index: usize,
) -> Result<usize, AdvectionError> {
    if !scheme.supports(grid.dim) {
        return Err(AdvectionError::Dimension {
            scheme,
            dim: grid.dim,
        });
    }
    check(grid, vel, dt)?;
    if scheme == Scheme::Eile3d {
        let dec = decompose_velocity_3d(grid, vel)?;
        return step_decomposed(grid, state, &dec, dt, step_index);
    }
    let plan = sweep_plan(scheme, grid.dim, step_index);
    let ctilde = (scheme == Scheme::Wy).then(|| wy_indicator(state));
    run_plan(grid, state, vel, dt, &plan, ctilde.as_deref())
}

/// One EILE3D step on an already decomposed field: an EILE2D pass on each
/// of the planar fields, each with the full `dt`.
pub fn step_decomposed(
    grid: &Grid,
    state: &mut MofState,
    dec: &DecomposedVelocity,
    dt: f64,
    step_index: usize,
) -> Result<usize, AdvectionError> {
    if grid.dim != 3 {
        return Err(AdvectionError::Dimension {
            scheme: Scheme::Eile3d,
            dim: grid.dim,
        });
    }
    check(grid, &dec.u1, dt)?;
    let odd = step_index % 2 == 1;
    let mut passes = [(&dec.u1, 0, 1), (&dec.u2, 0, 2), (&dec.u3, 1, 2)];
    if !odd {
        passes.reverse();
    }
    let mut repairs = 0;
    for (v, a, b) in passes {
        let (first, second) = if odd { (a, b) } else { (b, a) };
        let plan = [
            (SweepKind::EulerianImplicit, first),
            (SweepKind::LagrangianExplicit, second),
        ];
        repairs += run_plan(grid, state, v, dt, &plan, None)?;
    }
    Ok(repairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!("eile2d".parse::<Scheme>().unwrap(), Scheme::Eile2d);
        assert!("EILE4D".parse::<Scheme>().is_err());
    }

    #[test]
    fn dimension_tables() {
        assert_eq!(Scheme::for_dim(2).len(), 5);
        assert_eq!(Scheme::for_dim(3).len(), 6);
        assert!(!Scheme::Eile2d.supports(3));
        assert!(!Scheme::Eieale.supports(2));
    }

    #[test]
    fn plans() {
        use SweepKind::*;
        assert_eq!(
            sweep_plan(Scheme::Eile2d, 2, 1),
            vec![(EulerianImplicit, 0), (LagrangianExplicit, 1)]
        );
        assert_eq!(
            sweep_plan(Scheme::Eile2d, 2, 2),
            vec![(EulerianImplicit, 1), (LagrangianExplicit, 0)]
        );
        assert_eq!(
            sweep_plan(Scheme::Eieale, 3, 2),
            vec![(EulerianImplicit, 1), (EulerianAlgebraic, 2), (LagrangianExplicit, 0)]
        );
        assert_eq!(sweep_plan(Scheme::Ei, 3, 3), vec![(EulerianImplicit, 2), (EulerianImplicit, 0), (EulerianImplicit, 1)]);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let g = Grid::cube(3, 4, crate::fields::Boundary::Periodic).unwrap();
        let mut s = MofState::uniform(&g, 0.0);
        let v = FaceVelocity::zeros(&g);
        assert!(matches!(
            step(&g, &mut s, &v, 0.1, Scheme::Eile2d, 1),
            Err(AdvectionError::Dimension { .. })
        ));
    }
}
