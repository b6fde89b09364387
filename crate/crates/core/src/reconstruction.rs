//! Moment-of-fluid plane reconstruction.
//!
//! The normal is parameterized by angles and fitted so the flooded cut's
//! centroid matches the reference centroid. The volume constraint is exact
//! at every iterate because each evaluation floods the cell first.

use crate::geometry::unit_flood_centroid;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructionError {
    #[error("volume fraction {0} is not strictly between 0 and 1")]
    PureCell(f64),
    #[error("unsupported dimension {0}")]
    Dimension(usize),
}

/// Fluid is `{x : normal . x <= alpha}`, `x` measured in physical units from
/// the lower cell corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneInterface {
    pub normal: [f64; 3],
    pub alpha: f64,
}

impl PlaneInterface {
    /// Normal and constant in cell-fraction coordinates.
    #[inline]
    pub fn unit_form(&self, dx: [f64; 3]) -> ([f64; 3], f64) {
        (
            [
                self.normal[0] * dx[0],
                self.normal[1] * dx[1],
                self.normal[2] * dx[2],
            ],
            self.alpha,
        )
    }
}

/// Reference moments of a mixed cell; centroid in fractions of the spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MofTarget {
    pub volume_fraction: f64,
    pub centroid: [f64; 3],
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub fd_step: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_iterations: 10,
            tolerance: 1e-8,
            fd_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Reconstruction {
    pub plane: PlaneInterface,
    /// Centroid of the flooded cut, fractions of the spacing.
    pub centroid: [f64; 3],
    /// Centroid mismatch, in units of the largest cell edge.
    pub objective: f64,
    pub iterations: usize,
}

/// Residual below which a fit is taken as exact.
const EXACT: f64 = 1e-15;

#[derive(Clone, Copy)]
struct Problem<const D: usize> {
    c: f64,
    target: [f64; D],
    dx: [f64; D],
    /// residual weights `dx / max(dx)`
    w: [f64; D],
    /// polar axis first, then the two azimuthal axes (3D only)
    axes: [usize; 3],
}

struct Eval<const D: usize> {
    f: [f64; D],
    e: f64,
    centroid: [f64; D],
    alpha: f64,
    normal: [f64; D],
}

impl<const D: usize> Problem<D> {
    fn new(c: f64, target: [f64; D], dx: [f64; D]) -> Self {
        let l = dx.iter().fold(0.0f64, |a, b| a.max(*b));
        Problem {
            c,
            target,
            dx,
            w: std::array::from_fn(|i| dx[i] / l),
            axes: [2, 0, 1],
        }
    }

    #[inline]
    fn normal(&self, p: [f64; 2]) -> [f64; D] {
        let mut n = [0.0; D];
        if D == 2 {
            n[0] = p[1].cos();
            n[1] = p[1].sin();
        } else {
            let [a, b, c] = self.axes;
            let s = p[0].sin();
            n[a] = p[0].cos();
            n[b] = s * p[1].cos();
            n[c] = s * p[1].sin();
        }
        n
    }

    fn angles(&self, n: [f64; D]) -> [f64; 2] {
        if D == 2 {
            [0.0, n[1].atan2(n[0])]
        } else {
            let [a, b, c] = self.axes;
            let r = n.iter().map(|v| v * v).sum::<f64>().sqrt();
            [(n[a] / r).clamp(-1.0, 1.0).acos(), n[c].atan2(n[b])]
        }
    }

    #[inline]
    fn eval(&self, p: [f64; 2]) -> Eval<D> {
        let normal = self.normal(p);
        let mut nu = [0.0; D];
        for i in 0..D {
            nu[i] = normal[i] * self.dx[i];
        }
        let (alpha, centroid) = unit_flood_centroid(nu, self.c);
        let mut f = [0.0; D];
        let mut e = 0.0;
        for i in 0..D {
            f[i] = (self.target[i] - centroid[i]) * self.w[i];
            e += f[i] * f[i];
        }
        Eval {
            f,
            e: e.sqrt(),
            centroid,
            alpha,
            normal,
        }
    }

    /// Centered-difference Jacobian of the residual, one column per angle.
    fn jacobian(&self, p: [f64; 2], h: f64) -> [[f64; D]; 2] {
        let mut jac = [[0.0; D]; 2];
        let first = if D == 2 { 1 } else { 0 };
        for (q, col) in jac.iter_mut().enumerate().skip(first) {
            let mut pp = p;
            let mut pm = p;
            pp[q] += h;
            pm[q] -= h;
            let (fp, fm) = (self.eval(pp).f, self.eval(pm).f);
            for i in 0..D {
                col[i] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        jac
    }

    fn gradient(&self, p: [f64; 2], h: f64) -> [f64; 2] {
        let ev = self.eval(p);
        let jac = self.jacobian(p, h);
        let mut g = [0.0; 2];
        if ev.e > 0.0 {
            for q in 0..2 {
                g[q] = (0..D).map(|i| jac[q][i] * ev.f[i]).sum::<f64>() / ev.e;
            }
        }
        g
    }
}

fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    (0..D).map(|i| a[i] * b[i]).sum()
}

fn solve<const D: usize>(
    prob: &Problem<D>,
    opts: &Options,
) -> (Eval<D>, usize) {
    let mut init = [0.0; D];
    for i in 0..D {
        init[i] = (0.5 - prob.target[i]) / prob.dx[i];
    }
    if init.iter().all(|v| v.abs() < 1e-300) {
        init[0] = 1.0;
    }
    let mut prob = *prob;
    if D == 3 {
        // polar axis along the smallest component keeps the start off the pole
        let a = (0..3)
            .min_by(|&x, &y| init[x].abs().total_cmp(&init[y].abs()))
            .unwrap();
        prob.axes = [a, (a + 1) % 3, (a + 2) % 3];
    }
    let mut p = prob.angles(init);
    let mut cur = prob.eval(p);
    let mut iters = 0;
    while iters < opts.max_iterations {
        if cur.e <= EXACT {
            break;
        }
        iters += 1;
        let jac = prob.jacobian(p, opts.fd_step);
        let act: &[usize] = if D == 2 { &[1] } else { &[0, 1] };
        let g = [dot(&jac[0], &cur.f), dot(&jac[1], &cur.f)];
        let jnorm = (dot(&jac[0], &jac[0]) + dot(&jac[1], &jac[1])).sqrt();
        let gnorm = (g[0] * g[0] + g[1] * g[1]).sqrt();
        if gnorm <= opts.tolerance * jnorm * cur.e {
            break;
        }
        // Gauss-Newton step on the normal equations
        let mut step = [0.0; 2];
        let a00 = dot(&jac[0], &jac[0]);
        let a01 = dot(&jac[0], &jac[1]);
        let a11 = dot(&jac[1], &jac[1]);
        let mut ok = false;
        if act.len() == 1 {
            if a11 > 0.0 {
                step[1] = -g[1] / a11;
                ok = true;
            }
        } else {
            let det = a00 * a11 - a01 * a01;
            if det > 1e-12 * (a00 + a11) * (a00 + a11) {
                step[0] = -(a11 * g[0] - a01 * g[1]) / det;
                step[1] = -(a00 * g[1] - a01 * g[0]) / det;
                ok = true;
            }
        }
        if !ok {
            // flat direction: one steepest-descent (Cauchy) step
            let jg: [f64; D] = std::array::from_fn(|i| jac[0][i] * g[0] + jac[1][i] * g[1]);
            let jj = dot(&jg, &jg);
            if jj <= 0.0 {
                break;
            }
            let s = gnorm * gnorm / jj;
            step = [-s * g[0], -s * g[1]];
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let trial = [p[0] + lambda * step[0], p[1] + lambda * step[1]];
            let ev = prob.eval(trial);
            if ev.e < cur.e {
                accepted = Some((trial, ev));
                break;
            }
            lambda *= 0.5;
        }
        let Some((trial, ev)) = accepted else { break };
        let decrease = cur.e - ev.e;
        p = trial;
        cur = ev;
        if decrease <= opts.tolerance * (cur.e + decrease) && cur.e > EXACT {
            break;
        }
    }
    (cur, iters)
}

fn check(target: &MofTarget) -> Result<(), ReconstructionError> {
    let c = target.volume_fraction;
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(ReconstructionError::PureCell(c))
    }
}

/// Fit a plane to a reference volume fraction and centroid.
pub fn reconstruct_with(
    target: &MofTarget,
    dx: [f64; 3],
    dim: usize,
    opts: &Options,
) -> Result<Reconstruction, ReconstructionError> {
    check(target)?;
    let c = target.volume_fraction;
    match dim {
        2 => {
            let prob = Problem::<2>::new(c, [target.centroid[0], target.centroid[1]], [dx[0], dx[1]]);
            let (ev, iterations) = solve(&prob, opts);
            Ok(Reconstruction {
                plane: PlaneInterface {
                    normal: [ev.normal[0], ev.normal[1], 0.0],
                    alpha: ev.alpha,
                },
                centroid: [ev.centroid[0], ev.centroid[1], 0.5],
                objective: ev.e,
                iterations,
            })
        }
        3 => {
            let prob = Problem::<3>::new(c, target.centroid, dx);
            let (ev, iterations) = solve(&prob, opts);
            Ok(Reconstruction {
                plane: PlaneInterface {
                    normal: ev.normal,
                    alpha: ev.alpha,
                },
                centroid: ev.centroid,
                objective: ev.e,
                iterations,
            })
        }
        d => Err(ReconstructionError::Dimension(d)),
    }
}

pub fn reconstruct(
    target: &MofTarget,
    dx: [f64; 3],
    dim: usize,
) -> Result<PlaneInterface, ReconstructionError> {
    reconstruct_with(target, dx, dim, &Options::default()).map(|r| r.plane)
}

/// Centroid mismatch for normal `(sin phi cos theta, sin phi sin theta, cos phi)`.
/// Returns the mismatch and the centroid of the flooded cut.
pub fn objective(
    phi: f64,
    theta: f64,
    target: &MofTarget,
    dx: [f64; 3],
) -> Result<(f64, [f64; 3]), ReconstructionError> {
    check(target)?;
    let prob = Problem::<3>::new(target.volume_fraction, target.centroid, dx);
    let ev = prob.eval([phi, theta]);
    Ok((ev.e, ev.centroid))
}

/// 2D mismatch for normal `(cos theta, sin theta)`.
pub fn objective_2d(
    theta: f64,
    target: &MofTarget,
    dx: [f64; 2],
) -> Result<(f64, [f64; 2]), ReconstructionError> {
    check(target)?;
    let prob = Problem::<2>::new(
        target.volume_fraction,
        [target.centroid[0], target.centroid[1]],
        dx,
    );
    let ev = prob.eval([0.0, theta]);
    Ok((ev.e, ev.centroid))
}

/// Gradient of `objective` with respect to `(phi, theta)` as estimated by the
/// optimizer: `J^T f / |f|` from the centered-difference Jacobian.
pub fn objective_gradient(
    phi: f64,
    theta: f64,
    target: &MofTarget,
    dx: [f64; 3],
) -> Result<[f64; 2], ReconstructionError> {
    check(target)?;
    let prob = Problem::<3>::new(target.volume_fraction, target.centroid, dx);
    Ok(prob.gradient([phi, theta], Options::default().fd_step))
}

/// Gradient of `objective_2d` with respect to `theta`, as estimated by the optimizer.
pub fn objective_gradient_2d(
    theta: f64,
    target: &MofTarget,
    dx: [f64; 2],
) -> Result<f64, ReconstructionError> {
    check(target)?;
    let prob = Problem::<2>::new(
        target.volume_fraction,
        [target.centroid[0], target.centroid[1]],
        dx,
    );
    Ok(prob.gradient([0.0, theta], Options::default().fd_step)[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn axis_aligned_half_cell() {
        let t = MofTarget {
            volume_fraction: 0.5,
            centroid: [0.25, 0.5, 0.5],
        };
        let r = reconstruct_with(&t, [1.0; 3], 3, &Options::default()).unwrap();
        assert_abs_diff_eq!(r.plane.normal[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.plane.alpha, 0.5, epsilon = 1e-12);
        assert!(r.objective <= 1e-12);
    }

    #[test]
    fn horizontal_interface_2d() {
        let t = MofTarget {
            volume_fraction: 0.5,
            centroid: [0.5, 0.25, 0.5],
        };
        let p = reconstruct(&t, [1.0, 1.0, 1.0], 2).unwrap();
        assert_abs_diff_eq!(p.normal[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.normal[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.alpha, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn pure_cell_rejected() {
        let t = MofTarget {
            volume_fraction: 1.0,
            centroid: [0.5; 3],
        };
        assert!(matches!(
            reconstruct(&t, [1.0; 3], 3),
            Err(ReconstructionError::PureCell(_))
        ));
    }

    #[test]
    fn objective_zero_at_generating_angles() {
        let (phi, theta) = (1.1f64, 0.4f64);
        let n = [phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos()];
        let dx = [1.0, 0.5, 2.0];
        let m = [n[0], n[1], n[2]];
        let (_, r) = crate::geometry::flood_centroid(m, dx, 0.3).unwrap();
        let t = MofTarget {
            volume_fraction: 0.3,
            centroid: r.centroid,
        };
        let (e, _) = objective(phi, theta, &t, dx).unwrap();
        assert!(e < 1e-14);
        let (e2, _) = objective(phi + 0.01, theta, &t, dx).unwrap();
        assert!(e2 > 0.0);
    }

    #[test]
    fn objective_2d_periodic() {
        let t = MofTarget {
            volume_fraction: 0.3,
            centroid: [0.3, 0.4, 0.5],
        };
        let (a, _) = objective_2d(0.7, &t, [1.0, 1.0]).unwrap();
        let (b, _) = objective_2d(0.7 + 2.0 * std::f64::consts::PI, &t, [1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-13);
    }
}
