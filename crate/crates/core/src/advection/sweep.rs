//! One-dimensional geometric sweeps.
//!
//! Each donor cell is split along the sweep axis into at most three slabs:
//! the part leaving through the lower face, the part staying, and the part
//! leaving through the upper face. Recipients then gather the slabs that land
//! in them. Slab moments come from the analytic cut of the reconstructed
//! plane restricted to the slab.

use super::AdvectionError;
use crate::fields::{repair_cell, Boundary, FaceVelocity, Grid, MofState, EPS};
use crate::geometry::unit_cut;
use crate::reconstruction::{reconstruct_with, MofTarget, Options};

/// Results this close to 0 or 1 are rounding, not bound violations.
const SNAP: f64 = 1e-14;
/// Slack on the Courant limit.
const CFL_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    Ei,
    Le,
    Ea,
    Wy,
}

#[derive(Clone, Copy, Default)]
struct Piece {
    /// fluid volume, fraction of the donor cell
    f: f64,
    /// fluid first moment in donor-local coordinates
    m: [f64; 3],
}

pub(crate) struct SweepArgs<'a> {
    pub axis: usize,
    pub kind: Kind,
    pub dt: f64,
    /// EA: axes of the flanking EI and LE sweeps.
    pub flank: Option<(usize, usize)>,
    /// WY: correction indicator frozen at the start of the step.
    pub ctilde: Option<&'a [bool]>,
    pub recon: &'a Options,
}

#[inline]
fn slab(n: [f64; 3], alpha: f64, axis: usize, p: f64, q: f64) -> Piece {
    let len = q - p;
    if len <= 0.0 {
        return Piece::default();
    }
    let mut ns = n;
    ns[axis] *= len;
    let (v, mut c) = unit_cut(ns, alpha - n[axis] * p);
    c[axis] = p + len * c[axis];
    let f = v * len;
    Piece {
        f,
        m: [f * c[0], f * c[1], f * c[2]],
    }
}

#[inline]
fn uniform(c: f64, axis: usize, p: f64, q: f64) -> Piece {
    let len = (q - p).max(0.0);
    let f = c * len;
    let mut m = [0.5 * f; 3];
    m[axis] = 0.5 * (p + q) * f;
    Piece {
        f,
        m,
    }
}

/// Split points of a donor cell along the sweep axis.
#[inline]
fn breaks(kind: Kind, al: f64, ar: f64) -> (f64, f64) {
    if kind == Kind::Le {
        let g = 1.0 + (ar - al);
        ((-al / g).max(0.0), ((1.0 - al) / g).min(1.0))
    } else {
        ((-al).max(0.0), (1.0 - ar).min(1.0))
    }
}

#[allow(clippy::too_many_arguments)]
fn donor(
    c: f64,
    xc: [f64; 3],
    al: f64,
    ar: f64,
    kind: Kind,
    axis: usize,
    grid: &Grid,
    recon: &Options,
) -> [Piece; 3] {
    let (p, q) = breaks(kind, al, ar);
    if c <= EPS || c >= 1.0 - EPS {
        return [uniform(c, axis, 0.0, p), uniform(c, axis, p, q), uniform(c, axis, q, 1.0)];
    }
    if p <= 0.0 && q >= 1.0 {
        let whole = Piece {
            f: c,
            m: [c * xc[0], c * xc[1], c * xc[2]],
        };
        return [Piece::default(), whole, Piece::default()];
    }
    let target = MofTarget {
        volume_fraction: c,
        centroid: xc,
    };
    let plane = match reconstruct_with(&target, grid.spacing, grid.dim, recon) {
        Ok(r) => r.plane,
        Err(_) => return [uniform(c, axis, 0.0, p), uniform(c, axis, p, q), uniform(c, axis, q, 1.0)],
    };
    let (n, alpha) = plane.unit_form(grid.spacing);
    let mut out = [slab(n, alpha, axis, 0.0, p), slab(n, alpha, axis, p, q), slab(n, alpha, axis, q, 1.0)];
    // make the slabs add up to the cell's own fluid volume
    let big = (0..3).max_by(|&a, &b| out[a].f.total_cmp(&out[b].f)).unwrap();
    let sum: f64 = out.iter().map(|s| s.f).sum();
    out[big].f = (out[big].f + (c - sum)).max(0.0);
    out
}

/// Run one sweep in place. Returns the number of repaired cells.
pub(crate) fn sweep(
    grid: &Grid,
    state: &mut MofState,
    vel: &FaceVelocity,
    args: &SweepArgs,
) -> Result<usize, AdvectionError> {
    let axis = args.axis;
    let h = grid.spacing[axis];
    let scale = args.dt / h;
    let cmax = vel.u[axis].iter().fold(0.0f64, |m, v| m.max(v.abs())) * scale;
    if !(cmax <= 1.0 + CFL_SLACK) {
        return Err(AdvectionError::Cfl {
            axis,
            courant: cmax,
        });
    }
    let n = grid.dims[axis];
    let others: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
    let (b, c) = (others[0], others[1]);
    let stride = grid.stride(axis);
    let fd = grid.face_dims(axis);
    let fstride = match axis {
        0 => 1,
        1 => fd[0],
        _ => fd[0] * fd[1],
    };
    let periodic = grid.boundary[axis] == Boundary::Periodic;

    let mut pieces = vec![[Piece::default(); 3]; n];
    let mut al = vec![0.0; n];
    let mut ar = vec![0.0; n];
    let mut new_c = vec![0.0; n];
    let mut new_x = vec![[0.5; 3]; n];
    let mut repairs = 0;

    for ic in 0..grid.dims[c] {
        for ib in 0..grid.dims[b] {
            let mut ijk = [0usize; 3];
            ijk[b] = ib;
            ijk[c] = ic;
            let base = grid.idx(ijk[0], ijk[1], ijk[2]);
            let fbase = vel.face_index(axis, ijk[0], ijk[1], ijk[2]);

            let mut all_zero = true;
            let mut all_one = true;
            for p in 0..n {
                let v = state.c[base + p * stride];
                all_zero &= v == 0.0;
                all_one &= v == 1.0;
                if let Some(ct) = args.ctilde {
                    all_zero &= !ct[base + p * stride];
                }
            }
            if all_zero || (all_one && matches!(args.kind, Kind::Ei | Kind::Le)) {
                continue;
            }

            for p in 0..n {
                al[p] = vel.u[axis][fbase + p * fstride] * scale;
                ar[p] = vel.u[axis][fbase + (p + 1) * fstride] * scale;
                let jac = if args.kind == Kind::Le {
                    1.0 + (ar[p] - al[p])
                } else {
                    1.0 + (al[p] - ar[p])
                };
                if !(jac > 0.0) {
                    return Err(AdvectionError::Mapping { axis, factor: jac });
                }
            }
            for p in 0..n {
                let id = base + p * stride;
                pieces[p] = donor(
                    state.c[id],
                    state.xc[id],
                    al[p],
                    ar[p],
                    args.kind,
                    axis,
                    grid,
                    args.recon,
                );
            }

            for i in 0..n {
                let id = base + i * stride;
                let still = al[i] == 0.0 && ar[i] == 0.0;
                let ea_still = args.kind == Kind::Ea
                    && args.flank.is_some_and(|(pa, na)| {
                        divergence_at(grid, vel, id, pa, args.dt) == 0.0
                            && divergence_at(grid, vel, id, na, args.dt) == 0.0
                    });
                if still && (args.kind != Kind::Ea || ea_still) {
                    new_c[i] = state.c[id];
                    new_x[i] = state.xc[id];
                    continue;
                }
                // slabs arriving from the lower and upper neighbors, with
                // the LE stretch of their donor and their image offset
                // relative to this cell's lower face displacement
                let le = args.kind == Kind::Le;
                let stretch = |p: usize| if le { 1.0 + (ar[p] - al[p]) } else { 1.0 };
                let offset = |p: usize, off: f64| if le { off + (al[p] - al[i]) } else { off };
                let from_lo = if i > 0 {
                    Some((pieces[i - 1][2], stretch(i - 1), offset(i - 1, -1.0)))
                } else if periodic {
                    Some((pieces[n - 1][2], stretch(n - 1), offset(n - 1, -1.0)))
                } else if al[0] > 0.0 {
                    // zero-gradient ghost: a copy of this cell moving uniformly
                    let g = donor(state.c[id], state.xc[id], al[0], al[0], args.kind, axis, grid, args.recon);
                    Some((g[2], 1.0, -1.0))
                } else {
                    None
                };
                let from_hi = if i + 1 < n {
                    Some((pieces[i + 1][0], stretch(i + 1), offset(i + 1, 1.0)))
                } else if periodic {
                    Some((pieces[0][0], stretch(0), offset(0, 1.0)))
                } else if ar[n - 1] < 0.0 {
                    let a = ar[n - 1];
                    let g = donor(state.c[id], state.xc[id], a, a, args.kind, axis, grid, args.recon);
                    Some((g[0], 1.0, if le { 1.0 + (a - al[i]) } else { 1.0 }))
                } else {
                    None
                };

                // x' = g * xi + shift for LE, xi + shift otherwise
                let mut f = 0.0;
                let mut m = [0.0; 3];
                let mut add = |pc: Piece, g: f64, shift: f64| {
                    f += g * pc.f;
                    for k in 0..3 {
                        m[k] += if k == axis {
                            g * (g * pc.m[k] + shift * pc.f)
                        } else {
                            g * pc.m[k]
                        };
                    }
                };
                add(pieces[i][1], stretch(i), 0.0);
                if let Some((pc, g, sh)) = from_lo {
                    add(pc, g, sh);
                }
                if let Some((pc, g, sh)) = from_hi {
                    add(pc, g, sh);
                }
                let cold = state.c[id];
                // EI: fluid of the departure interval over its length. LE:
                // the images tile the cell. WY and EA add their corrections
                // to the EI-style flux balance.
                let cn = match args.kind {
                    Kind::Ei => f / (1.0 + (al[i] - ar[i])),
                    Kind::Le => f,
                    Kind::Wy => {
                        let ct = args.ctilde.is_some_and(|t| t[id]);
                        f + if ct { ar[i] - al[i] } else { 0.0 }
                    }
                    Kind::Ea => {
                        let (pa, na) = args.flank.expect("flanking axes");
                        let dp = divergence_at(grid, vel, id, pa, args.dt);
                        let dn = divergence_at(grid, vel, id, na, args.dt);
                        (f - dp * cold) / (1.0 + dn)
                    }
                };
                let mut x = if f > 0.0 {
                    [m[0] / f, m[1] / f, m[2] / f]
                } else {
                    [0.5; 3]
                };
                if f > 0.0 {
                    x[axis] += al[i];
                    if !le {
                        // departure interval [-a_l, 1 - a_r] stretched onto the cell
                        x[axis] /= 1.0 + (al[i] - ar[i]);
                    }
                }
                for v in x.iter_mut() {
                    *v = v.clamp(0.0, 1.0);
                }
                if grid.dim == 2 {
                    x[2] = 0.5;
                }
                let mut cn = cn;
                if cn < 0.0 && cn > -SNAP {
                    cn = 0.0;
                } else if cn > 1.0 && cn < 1.0 + SNAP {
                    cn = 1.0;
                }
                new_c[i] = cn;
                new_x[i] = x;
            }
            for i in 0..n {
                let id = base + i * stride;
                let mut cv = new_c[i];
                let mut xv = new_x[i];
                if repair_cell(&mut cv, &mut xv, grid.dim) {
                    repairs += 1;
                }
                state.c[id] = cv;
                state.xc[id] = xv;
            }
        }
    }
    Ok(repairs)
}

/// Courant-number difference across cell `id` along `axis`.
pub(crate) fn divergence_at(grid: &Grid, vel: &FaceVelocity, id: usize, axis: usize, dt: f64) -> f64 {
    let [i, j, k] = grid.ijk(id);
    let mut hi = [i, j, k];
    hi[axis] += 1;
    (vel.get(axis, hi[0], hi[1], hi[2]) - vel.get(axis, i, j, k)) * dt / grid.spacing[axis]
}
