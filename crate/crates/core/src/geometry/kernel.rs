//! Closed-form moments on the unit cube/square in canonical position:
//! normal components non-negative and ascending, `0 <= a <= sum(n) / 2`.
//!
//! Configurations follow the shape of the cut: 1 tetrahedron, 2 quadrilateral
//! section, 3 pentagon, 4 hexagon, 5 quadrilateral crossing the tall axis.
//! Correction terms are written with ratios like `c / n1` so that no
//! intermediate overflows when a component is small.

#[inline]
pub(crate) fn moments<const D: usize>(n: [f64; D], a: f64) -> (f64, [f64; D]) {
    let mut out = [0.5; D];
    let v = match D {
        3 => {
            let (v, c) = moments3([n[0], n[1], n[2]], a);
            out.copy_from_slice(&c);
            v
        }
        2 => {
            let (v, c) = moments2([n[0], n[1]], a);
            out.copy_from_slice(&c);
            v
        }
        1 => {
            let v = if n[0] > 0.0 { a / n[0] } else { 0.0 };
            out[0] = 0.5 * v;
            v
        }
        _ => unreachable!("unsupported dimension"),
    };
    (v, out)
}

#[inline]
pub(crate) fn flood<const D: usize>(n: [f64; D], v: f64) -> f64 {
    match D {
        3 => flood3([n[0], n[1], n[2]], v),
        2 => flood2([n[0], n[1]], v),
        1 => v * n[0],
        _ => unreachable!("unsupported dimension"),
    }
}

/// Which of the five configurations `a` falls in (degenerate normals excluded).
pub(crate) fn config3(n: [f64; 3], a: f64) -> u8 {
    let [n1, n2, n3] = n;
    if a <= n1 {
        1
    } else if a <= n2 {
        2
    } else if a <= (n1 + n2).min(n3) {
        3
    } else if n3 <= n1 + n2 {
        4
    } else {
        5
    }
}

pub(crate) fn volume3(n: [f64; 3], a: f64) -> f64 {
    let [n1, n2, n3] = n;
    if a <= 0.0 {
        return 0.0;
    }
    if n2 == 0.0 {
        return a / n3;
    }
    if n1 == 0.0 {
        return moments2([n2, n3], a).0;
    }
    match config3(n, a) {
        1 => a * (a / n1) * (a / n2) / (6.0 * n3),
        2 => {
            let b = a - n1;
            (a * a + a * b + b * b) / (6.0 * n2 * n3)
        }
        _ => upper_volume(n, a),
    }
}

#[inline]
fn cube_term(y: f64, n1: f64, n2: f64) -> f64 {
    if y > 0.0 {
        y * (y / n1) * (y / n2)
    } else {
        0.0
    }
}

#[inline]
fn upper_volume(n: [f64; 3], a: f64) -> f64 {
    let [n1, n2, n3] = n;
    let t = cube_term(n1 + n2 - a, n1, n2);
    let tb = cube_term(a - n3, n1, n2);
    (3.0 * (2.0 * a - n1 - n2) + t - tb) / (6.0 * n3)
}

#[inline]
fn upper_slope(n: [f64; 3], a: f64) -> f64 {
    let [n1, n2, n3] = n;
    let c = n1 + n2 - a;
    let b = a - n3;
    let mut s = 0.0;
    if c > 0.0 {
        s += (c / n1) * (c / n2);
    }
    if b > 0.0 {
        s += (b / n1) * (b / n2);
    }
    (1.0 - 0.5 * s) / n3
}

pub(crate) fn moments3(n: [f64; 3], a: f64) -> (f64, [f64; 3]) {
    let [n1, n2, n3] = n;
    if a <= 0.0 {
        return (0.0, [0.5; 3]);
    }
    if n2 == 0.0 {
        let v = a / n3;
        return (v, [0.5, 0.5, 0.5 * v]);
    }
    if n1 == 0.0 {
        let (v, c) = moments2([n2, n3], a);
        return (v, [0.5, c[0], c[1]]);
    }
    match config3(n, a) {
        1 => {
            let v = a * (a / n1) * (a / n2) / (6.0 * n3);
            (v, [0.25 * a / n1, 0.25 * a / n2, 0.25 * a / n3])
        }
        2 => {
            let b = a - n1;
            let d = a * a + a * b + b * b;
            let v = d / (6.0 * n2 * n3);
            let e = (a + b) * (a * a + b * b) / (4.0 * d);
            (
                v,
                [(a * a + 2.0 * a * b + 3.0 * b * b) / (4.0 * d), e / n2, e / n3],
            )
        }
        _ => {
            let c = n1 + n2 - a;
            let b = a - n3;
            let t = cube_term(c, n1, n2);
            let tb = cube_term(b, n1, n2);
            let v = (3.0 * (2.0 * a - n1 - n2) + t - tb) / (6.0 * n3);
            let (mut m1, mut m2) = (
                12.0 * (a - 0.5 * n2 - 2.0 * n1 / 3.0),
                12.0 * (a - 0.5 * n1 - 2.0 * n2 / 3.0),
            );
            let h = a - 0.5 * (n1 + n2);
            let mut m3 = 12.0 * h * h + n1 * n1 + n2 * n2;
            if c > 0.0 {
                m1 += t * (4.0 - c / n1);
                m2 += t * (4.0 - c / n2);
                m3 -= c * t;
            }
            if b > 0.0 {
                m1 -= tb * (b / n1);
                m2 -= tb * (b / n2);
                m3 -= (b + 4.0 * n3) * tb;
            }
            let w = 24.0 * n3 * v;
            (v, [m1 / w, m2 / w, m3 / (w * n3)])
        }
    }
}

pub(crate) fn moments2(n: [f64; 2], a: f64) -> (f64, [f64; 2]) {
    let [n1, n2] = n;
    if a <= 0.0 {
        return (0.0, [0.5; 2]);
    }
    if n1 == 0.0 {
        let v = a / n2;
        return (v, [0.5, 0.5 * v]);
    }
    if a <= n1 {
        let v = a * (a / n1) / (2.0 * n2);
        (v, [a / (3.0 * n1), a / (3.0 * n2)])
    } else {
        let w = 2.0 * a - n1;
        let v = w / (2.0 * n2);
        (
            v,
            [
                (3.0 * a - 2.0 * n1) / (3.0 * w),
                (a * a - a * n1 + n1 * n1 / 3.0) / (n2 * w),
            ],
        )
    }
}

pub(crate) fn flood2(n: [f64; 2], v: f64) -> f64 {
    let [n1, n2] = n;
    if v <= 0.0 {
        return 0.0;
    }
    if n1 == 0.0 {
        return v * n2;
    }
    if v <= 0.5 * n1 / n2 {
        (2.0 * n1 * n2 * v).sqrt()
    } else {
        v * n2 + 0.5 * n1
    }
}

pub(crate) fn flood3(n: [f64; 3], v: f64) -> f64 {
    let [n1, n2, n3] = n;
    if v <= 0.0 {
        return 0.0;
    }
    if n2 == 0.0 {
        return v * n3;
    }
    if n1 == 0.0 {
        return flood2([n2, n3], v);
    }
    let r = n1 / n2;
    if v <= r * (n1 / n3) / 6.0 {
        return (6.0 * v * n1 * n2 * n3).cbrt();
    }
    let b = n2 - n1;
    if v <= (n2 * n2 + n2 * b + b * b) / (6.0 * n2 * n3) {
        let q = (2.0 * n2 * n3 * v - n1 * n1 / 12.0).max(0.0);
        return 0.5 * n1 + q.sqrt();
    }
    let s = n1 + n2 + n3;
    let lin = v * n3 + 0.5 * (n1 + n2);
    if n3 > n1 + n2 && lin >= n1 + n2 {
        return lin;
    }
    // configurations 3 and 4: safeguarded Newton on a cubic
    let mut lo = n2;
    let mut hi = 0.5 * s;
    let mut a = lin.clamp(lo, hi);
    for _ in 0..60 {
        let f = upper_volume(n, a) - v;
        if f == 0.0 {
            return a;
        }
        if f > 0.0 {
            hi = a;
        } else {
            lo = a;
        }
        let mut next = a - f / upper_slope(n, a);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - a).abs() <= 4.0 * f64::EPSILON * s;
        a = next;
        if done || hi - lo <= f64::EPSILON * s {
            break;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn continuity_across_configurations() {
        let n = [0.2, 0.35, 0.9];
        for edge in [0.2, 0.35, 0.55] {
            let (v0, c0) = moments3(n, edge * (1.0 - 1e-13));
            let (v1, c1) = moments3(n, edge * (1.0 + 1e-13));
            assert_abs_diff_eq!(v0, v1, epsilon = 1e-12);
            for k in 0..3 {
                assert_abs_diff_eq!(c0[k], c1[k], epsilon = 1e-11);
            }
        }
        let n = [0.3, 0.5, 0.6];
        for edge in [0.3, 0.5, 0.6] {
            let (v0, c0) = moments3(n, edge * (1.0 - 1e-13));
            let (v1, c1) = moments3(n, edge * (1.0 + 1e-13));
            assert_abs_diff_eq!(v0, v1, epsilon = 1e-12);
            for k in 0..3 {
                assert_abs_diff_eq!(c0[k], c1[k], epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn dispatch() {
        let n = [0.2, 0.35, 0.9];
        assert_eq!(config3(n, 0.2), 1);
        assert_eq!(config3(n, 0.3), 2);
        assert_eq!(config3(n, 0.5), 3);
        assert_eq!(config3(n, 0.7), 5);
        assert_eq!(config3([0.3, 0.5, 0.6], 0.65), 4);
    }

    #[test]
    fn half_volume_at_midpoint() {
        for n in [[0.1, 0.2, 0.3], [0.3, 0.5, 0.6], [0.1, 0.1, 0.9], [1.0, 1.0, 1.0]] {
            let s: f64 = n.iter().sum();
            assert_abs_diff_eq!(volume3(n, 0.5 * s), 0.5, epsilon = 1e-15);
        }
    }
}
