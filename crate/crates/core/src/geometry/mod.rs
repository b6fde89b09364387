//! Plane/cuboid (3D) and line/rectangle (2D) intersection and flood kernels.
//!
//! A cut is the set `{x in [0, dx] : m . x <= alpha}` with `x` measured from
//! the lower cell corner. Centroids are reported as fractions of `dx`.

mod kernel;
mod oracle;

pub use oracle::{
    interface_polygon, interface_segment_2d, oracle_clip, oracle_clip_2d, polygon_area_centroid,
    ClipPolyhedron,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("cutting plane has an all-zero normal")]
    DegenerateNormal,
    #[error("cut is empty, centroid undefined")]
    EmptyCut,
    #[error("volume fraction {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("cell edge lengths must be positive and finite")]
    BadCell,
}

/// Components below this fraction of the largest `|m_i dx_i|` are zeroed.
pub const NORMAL_ZERO_TOL: f64 = 1e-12;

/// Plane cut of a `D`-dimensional box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutSpec<const D: usize> {
    pub m: [f64; D],
    pub dx: [f64; D],
    pub alpha: f64,
}

impl<const D: usize> CutSpec<D> {
    pub fn scaled_normal(&self) -> [f64; D] {
        let mut n = [0.0; D];
        for i in 0..D {
            n[i] = self.m[i] * self.dx[i];
        }
        n
    }

    pub fn alpha_max(&self) -> f64 {
        self.scaled_normal().iter().map(|v| v.abs()).sum()
    }
}

/// Volume fraction and centroid (fractions of the edge lengths).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutResult<const D: usize> {
    pub volume_fraction: f64,
    pub centroid: [f64; D],
}

/// Mirror flips, axis permutation and complement flag that take a raw cut
/// to its canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutTransform<const D: usize> {
    /// Canonical axis `k` is raw axis `perm[k]`.
    pub perm: [usize; D],
    pub flip: [bool; D],
    pub complement: bool,
}

impl<const D: usize> CutTransform<D> {
    /// Map a canonical-frame result back to the raw frame.
    pub fn apply(&self, canonical: CutResult<D>) -> CutResult<D> {
        let (v, c) = self.apply_parts(canonical.volume_fraction, canonical.centroid);
        CutResult {
            volume_fraction: v,
            centroid: c,
        }
    }

    #[inline]
    pub(crate) fn apply_parts(&self, vc: f64, cc: [f64; D]) -> (f64, [f64; D]) {
        let mut c = [0.5; D];
        for k in 0..D {
            c[self.perm[k]] = cc[k];
        }
        let v = if self.complement {
            let v = 1.0 - vc;
            for ci in c.iter_mut() {
                *ci = (0.5 - vc * (1.0 - *ci)) / v;
            }
            v
        } else {
            if vc <= 0.0 {
                return (0.0, [0.5; D]);
            }
            vc
        };
        for i in 0..D {
            if self.flip[i] {
                c[i] = 1.0 - c[i];
            }
        }
        (v, c)
    }
}

/// Normal in unit-cube coordinates, made non-negative and sorted.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Oriented<const D: usize> {
    pub n: [f64; D],
    pub perm: [usize; D],
    pub flip: [bool; D],
    /// Offset taking a raw alpha to the oriented one: flipped components
    /// plus half of each dropped one.
    pub shift: f64,
    pub sum: f64,
}

#[inline]
pub(crate) fn orient<const D: usize>(raw: [f64; D]) -> Option<Oriented<D>> {
    let big = raw.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(big > 0.0) || !big.is_finite() {
        return None;
    }
    let tol = NORMAL_ZERO_TOL * big;
    let mut a = [0.0; D];
    let mut flip = [false; D];
    let mut shift = 0.0;
    for i in 0..D {
        let v = raw[i];
        if v.abs() < tol {
            // the nearly parallel interface spans this axis, so v x_i
            // averages to v / 2; dropping it entirely would bias alpha
            shift -= 0.5 * v;
            continue;
        }
        if v < 0.0 {
            flip[i] = true;
            shift -= v;
            a[i] = -v;
        } else {
            a[i] = v;
        }
    }
    let mut perm = [0usize; D];
    for (k, p) in perm.iter_mut().enumerate() {
        *p = k;
    }
    // insertion sort, D <= 3
    for i in 1..D {
        let mut j = i;
        while j > 0 && a[perm[j - 1]] > a[perm[j]] {
            perm.swap(j - 1, j);
            j -= 1;
        }
    }
    let mut n = [0.0; D];
    let mut sum = 0.0;
    for k in 0..D {
        n[k] = a[perm[k]];
        sum += n[k];
    }
    Some(Oriented {
        n,
        perm,
        flip,
        shift,
        sum,
    })
}

impl<const D: usize> Oriented<D> {
    /// Canonical alpha and complement flag for a raw plane constant.
    #[inline]
    pub fn canonical_alpha(&self, alpha: f64) -> (f64, bool) {
        let a1 = (alpha + self.shift).clamp(0.0, self.sum);
        if a1 > 0.5 * self.sum {
            (self.sum - a1, true)
        } else {
            (a1, false)
        }
    }

    pub fn transform(&self, complement: bool) -> CutTransform<D> {
        CutTransform {
            perm: self.perm,
            flip: self.flip,
            complement,
        }
    }
}

fn check_cell<const D: usize>(dx: &[f64; D]) -> Result<(), GeometryError> {
    if dx.iter().all(|d| d.is_finite() && *d > 0.0) {
        Ok(())
    } else {
        Err(GeometryError::BadCell)
    }
}

fn scale<const D: usize>(m: &[f64; D], dx: &[f64; D]) -> [f64; D] {
    let mut n = [0.0; D];
    for i in 0..D {
        n[i] = m[i] * dx[i];
    }
    n
}

/// Reduce a raw cut to canonical form.
pub fn canonicalize<const D: usize>(
    m_raw: [f64; D],
    alpha_raw: f64,
    dx: [f64; D],
) -> Result<(CutSpec<D>, CutTransform<D>), GeometryError> {
    check_cell(&dx)?;
    let o = orient(scale(&m_raw, &dx)).ok_or(GeometryError::DegenerateNormal)?;
    let (alpha, complement) = o.canonical_alpha(alpha_raw);
    let mut m = [0.0; D];
    let mut d = [0.0; D];
    for k in 0..D {
        d[k] = dx[o.perm[k]];
        m[k] = o.n[k] / d[k];
    }
    Ok((CutSpec { m, dx: d, alpha }, o.transform(complement)))
}

fn canonical_n<const D: usize>(spec: &CutSpec<D>) -> [f64; D] {
    spec.scaled_normal()
}

/// Volume fraction of a canonical 3D cut.
pub fn cut_volume(spec: &CutSpec<3>) -> f64 {
    kernel::volume3(canonical_n(spec), spec.alpha)
}

/// Volume fraction and centroid of a canonical 3D cut, in the canonical frame.
pub fn cut_centroid(spec: &CutSpec<3>) -> Result<CutResult<3>, GeometryError> {
    let (v, c) = kernel::moments3(canonical_n(spec), spec.alpha);
    if v <= 0.0 {
        return Err(GeometryError::EmptyCut);
    }
    Ok(CutResult {
        volume_fraction: v,
        centroid: c,
    })
}

/// Area fraction of a canonical 2D cut.
pub fn cut_volume_2d(spec: &CutSpec<2>) -> f64 {
    kernel::moments2(canonical_n(spec), spec.alpha).0
}

/// Area fraction and centroid of a canonical 2D cut, in the canonical frame.
pub fn cut_centroid_2d(spec: &CutSpec<2>) -> Result<CutResult<2>, GeometryError> {
    let (v, c) = kernel::moments2(canonical_n(spec), spec.alpha);
    if v <= 0.0 {
        return Err(GeometryError::EmptyCut);
    }
    Ok(CutResult {
        volume_fraction: v,
        centroid: c,
    })
}

/// Cut of the raw plane `m . x <= alpha` with the box `[0, dx]`.
/// An empty cut reports the cell center as centroid.
pub fn cut<const D: usize>(
    m: [f64; D],
    alpha: f64,
    dx: [f64; D],
) -> Result<CutResult<D>, GeometryError> {
    check_cell(&dx)?;
    let o = orient(scale(&m, &dx)).ok_or(GeometryError::DegenerateNormal)?;
    let (a, comp) = o.canonical_alpha(alpha);
    let (vc, cc) = kernel::moments(o.n, a);
    let (v, c) = o.transform(comp).apply_parts(vc, cc);
    Ok(CutResult {
        volume_fraction: v,
        centroid: c,
    })
}

/// Unit-cube cut for a normal already expressed in cell-fraction
/// coordinates. The normal must not be all zero.
#[inline]
pub(crate) fn unit_cut<const D: usize>(n: [f64; D], alpha: f64) -> (f64, [f64; D]) {
    match orient(n) {
        Some(o) => {
            let (a, comp) = o.canonical_alpha(alpha);
            let (vc, cc) = kernel::moments(o.n, a);
            o.transform(comp).apply_parts(vc, cc)
        }
        None => (0.0, [0.5; D]),
    }
}

fn check_target(target: f64) -> Result<(), GeometryError> {
    if (0.0..=1.0).contains(&target) {
        Ok(())
    } else {
        Err(GeometryError::OutOfRange(target))
    }
}

/// Solve for the oriented canonical alpha; returns (canonical alpha, complement).
#[inline]
fn solve_oriented<const D: usize>(o: &Oriented<D>, target: f64) -> (f64, bool) {
    if target > 0.5 {
        (kernel::flood(o.n, 1.0 - target), true)
    } else {
        (kernel::flood(o.n, target), false)
    }
}

#[inline]
fn raw_alpha<const D: usize>(o: &Oriented<D>, a: f64, complement: bool) -> f64 {
    let a1 = if complement { o.sum - a } else { a };
    a1 - o.shift
}

fn flood_generic<const D: usize>(
    m: [f64; D],
    dx: [f64; D],
    target: f64,
) -> Result<f64, GeometryError> {
    check_cell(&dx)?;
    check_target(target)?;
    let o = orient(scale(&m, &dx)).ok_or(GeometryError::DegenerateNormal)?;
    let (a, comp) = solve_oriented(&o, target);
    Ok(raw_alpha(&o, a, comp))
}

fn flood_centroid_generic<const D: usize>(
    m: [f64; D],
    dx: [f64; D],
    target: f64,
) -> Result<(f64, CutResult<D>), GeometryError> {
    check_cell(&dx)?;
    check_target(target)?;
    if target == 0.0 {
        return Err(GeometryError::EmptyCut);
    }
    let o = orient(scale(&m, &dx)).ok_or(GeometryError::DegenerateNormal)?;
    let (a, comp) = solve_oriented(&o, target);
    let (vc, cc) = kernel::moments(o.n, a);
    let (v, c) = o.transform(comp).apply_parts(vc, cc);
    Ok((
        raw_alpha(&o, a, comp),
        CutResult {
            volume_fraction: v,
            centroid: c,
        },
    ))
}

/// Plane constant whose 3D cut has the given volume fraction.
pub fn flood_alpha(m: [f64; 3], dx: [f64; 3], target: f64) -> Result<f64, GeometryError> {
    flood_generic(m, dx, target)
}

/// `flood_alpha` followed by the centroid of the resulting cut (raw frame).
pub fn flood_centroid(
    m: [f64; 3],
    dx: [f64; 3],
    target: f64,
) -> Result<(f64, CutResult<3>), GeometryError> {
    flood_centroid_generic(m, dx, target)
}

/// Plane constant whose 2D cut has the given area fraction.
pub fn flood_alpha_2d(m: [f64; 2], dx: [f64; 2], target: f64) -> Result<f64, GeometryError> {
    flood_generic(m, dx, target)
}

pub fn flood_centroid_2d(
    m: [f64; 2],
    dx: [f64; 2],
    target: f64,
) -> Result<(f64, CutResult<2>), GeometryError> {
    flood_centroid_generic(m, dx, target)
}

/// Flood and centroid on the unit cube with a normal in cell-fraction
/// coordinates; `target` must lie in (0, 1).
#[inline]
pub(crate) fn unit_flood_centroid<const D: usize>(n: [f64; D], target: f64) -> (f64, [f64; D]) {
    match orient(n) {
        Some(o) => {
            let (a, comp) = solve_oriented(&o, target);
            let (vc, cc) = kernel::moments(o.n, a);
            let (_, c) = o.transform(comp).apply_parts(vc, cc);
            (raw_alpha(&o, a, comp), c)
        }
        None => (0.0, [0.5; D]),
    }
}
