//! Brute-force clipping of a box by a half-space. Slow, but independent of
//! the closed forms; used as a reference and for timing.

type P3 = [f64; 3];

#[inline]
fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross(a: P3, b: P3) -> P3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Convex polyhedron as vertices plus outward-oriented face loops.
#[derive(Debug, Clone, Default)]
pub struct ClipPolyhedron {
    pub vertices: Vec<P3>,
    pub faces: Vec<Vec<usize>>,
}

impl ClipPolyhedron {
    /// Volume and first moment, by tetrahedra fanned from the vertex average.
    pub fn moments(&self) -> (f64, P3) {
        if self.vertices.is_empty() {
            return (0.0, [0.0; 3]);
        }
        let inv = 1.0 / self.vertices.len() as f64;
        let mut r = [0.0; 3];
        for v in &self.vertices {
            for k in 0..3 {
                r[k] += v[k] * inv;
            }
        }
        let mut vol = 0.0;
        let mut mom = [0.0; 3];
        for f in &self.faces {
            if f.len() < 3 {
                continue;
            }
            let p0 = self.vertices[f[0]];
            let a = sub(p0, r);
            for w in f[1..].windows(2) {
                let (p1, p2) = (self.vertices[w[0]], self.vertices[w[1]]);
                let t = dot(a, cross(sub(p1, r), sub(p2, r))) / 6.0;
                vol += t;
                for k in 0..3 {
                    mom[k] += t * 0.25 * (r[k] + p0[k] + p1[k] + p2[k]);
                }
            }
        }
        (vol, mom)
    }

    pub fn volume(&self) -> f64 {
        self.moments().0
    }

    /// `None` for an empty polyhedron.
    pub fn centroid(&self) -> Option<P3> {
        let (v, m) = self.moments();
        if v > 0.0 {
            Some([m[0] / v, m[1] / v, m[2] / v])
        } else {
            None
        }
    }
}

#[inline]
fn lex_less(a: &P3, b: &P3) -> bool {
    a.partial_cmp(b) == Some(std::cmp::Ordering::Less)
}

/// Edge/plane intersection evaluated in a fixed endpoint order, so the two
/// faces sharing an edge produce bitwise-identical points.
fn edge_point(p: P3, dp: f64, q: P3, dq: f64) -> P3 {
    let (a, da, b, db) = if lex_less(&p, &q) {
        (p, dp, q, dq)
    } else {
        (q, dq, p, dp)
    };
    let t = da / (da - db);
    [
        a[0] + t * (b[0] - a[0]),
        a[1] + t * (b[1] - a[1]),
        a[2] + t * (b[2] - a[2]),
    ]
}

fn box_faces(dx: P3) -> [[P3; 4]; 6] {
    let p = |i: usize, j: usize, k: usize| [i as f64 * dx[0], j as f64 * dx[1], k as f64 * dx[2]];
    [
        [p(0, 0, 0), p(0, 0, 1), p(0, 1, 1), p(0, 1, 0)],
        [p(1, 0, 0), p(1, 1, 0), p(1, 1, 1), p(1, 0, 1)],
        [p(0, 0, 0), p(1, 0, 0), p(1, 0, 1), p(0, 0, 1)],
        [p(0, 1, 0), p(0, 1, 1), p(1, 1, 1), p(1, 1, 0)],
        [p(0, 0, 0), p(0, 1, 0), p(1, 1, 0), p(1, 0, 0)],
        [p(0, 0, 1), p(1, 0, 1), p(1, 1, 1), p(0, 1, 1)],
    ]
}

fn index_of(verts: &mut Vec<P3>, p: P3) -> usize {
    if let Some(i) = verts.iter().position(|v| *v == p) {
        return i;
    }
    verts.push(p);
    verts.len() - 1
}

/// Sort points counter-clockwise as seen from the tip of `normal`.
fn order_around(points: &mut [P3], normal: P3) {
    let len = dot(normal, normal).sqrt();
    let nh = [normal[0] / len, normal[1] / len, normal[2] / len];
    let mut e = [0.0; 3];
    let k = (0..3)
        .min_by(|&a, &b| nh[a].abs().total_cmp(&nh[b].abs()))
        .unwrap();
    e[k] = 1.0;
    let u = cross(nh, e);
    let v = cross(nh, u);
    let inv = 1.0 / points.len() as f64;
    let mut c = [0.0; 3];
    for p in points.iter() {
        for i in 0..3 {
            c[i] += p[i] * inv;
        }
    }
    // u x v is along nh, so increasing angle runs counter-clockwise
    points.sort_by(|a, b| {
        let ta = dot(sub(*a, c), v).atan2(dot(sub(*a, c), u));
        let tb = dot(sub(*b, c), v).atan2(dot(sub(*b, c), u));
        ta.total_cmp(&tb)
    });
}

/// Clip the box `[0, dx]` to the half-space `m . x <= alpha`.
pub fn oracle_clip(dx: P3, m: P3, alpha: f64) -> ClipPolyhedron {
    let mut out = ClipPolyhedron::default();
    let mut cap: Vec<P3> = Vec::new();
    for face in box_faces(dx) {
        let d: Vec<f64> = face.iter().map(|p| dot(m, *p) - alpha).collect();
        let mut poly: Vec<P3> = Vec::with_capacity(6);
        for i in 0..4 {
            let j = (i + 1) % 4;
            let (p, q) = (face[i], face[j]);
            if d[i] <= 0.0 {
                poly.push(p);
                if d[i] == 0.0 && !cap.contains(&p) {
                    cap.push(p);
                }
            }
            if (d[i] < 0.0 && d[j] > 0.0) || (d[i] > 0.0 && d[j] < 0.0) {
                let x = edge_point(p, d[i], q, d[j]);
                poly.push(x);
                if !cap.contains(&x) {
                    cap.push(x);
                }
            }
        }
        if poly.len() >= 3 {
            let loop_: Vec<usize> = poly
                .into_iter()
                .map(|p| index_of(&mut out.vertices, p))
                .collect();
            out.faces.push(loop_);
        }
    }
    if cap.len() >= 3 && !out.faces.is_empty() {
        order_around(&mut cap, m);
        let loop_: Vec<usize> = cap
            .into_iter()
            .map(|p| index_of(&mut out.vertices, p))
            .collect();
        out.faces.push(loop_);
    }
    out
}

/// Polygon where the plane `m . x = alpha` crosses the box `[0, dx]`,
/// ordered counter-clockwise around `m`. Empty when the plane misses.
pub fn interface_polygon(m: P3, alpha: f64, dx: P3) -> Vec<P3> {
    let mut pts: Vec<P3> = Vec::new();
    for face in box_faces(dx) {
        for i in 0..4 {
            let j = (i + 1) % 4;
            let (p, q) = (face[i], face[j]);
            let (dp, dq) = (dot(m, p) - alpha, dot(m, q) - alpha);
            if dp == 0.0 && !pts.contains(&p) {
                pts.push(p);
            }
            if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
                let x = edge_point(p, dp, q, dq);
                if !pts.contains(&x) {
                    pts.push(x);
                }
            }
        }
    }
    if pts.len() < 3 {
        return Vec::new();
    }
    order_around(&mut pts, m);
    pts
}

fn clip_polygon_2d(poly: &[[f64; 2]], m: [f64; 2], alpha: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let k = poly.len();
    for i in 0..k {
        let (p, q) = (poly[i], poly[(i + 1) % k]);
        let dp = m[0] * p[0] + m[1] * p[1] - alpha;
        let dq = m[0] * q[0] + m[1] * q[1] - alpha;
        if dp <= 0.0 {
            out.push(p);
        }
        if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
            let t = dp / (dp - dq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Clip the rectangle `[0, dx]` to `m . x <= alpha`; counter-clockwise polygon.
pub fn oracle_clip_2d(dx: [f64; 2], m: [f64; 2], alpha: f64) -> Vec<[f64; 2]> {
    let rect = [[0.0, 0.0], [dx[0], 0.0], [dx[0], dx[1]], [0.0, dx[1]]];
    clip_polygon_2d(&rect, m, alpha)
}

/// Shoelace area and centroid; centroid is `None` for a degenerate polygon.
pub fn polygon_area_centroid(poly: &[[f64; 2]]) -> (f64, Option<[f64; 2]>) {
    if poly.len() < 3 {
        return (0.0, None);
    }
    let o = poly[0];
    let mut a2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for w in poly[1..].windows(2) {
        let (p, q) = ([w[0][0] - o[0], w[0][1] - o[1]], [w[1][0] - o[0], w[1][1] - o[1]]);
        let cr = p[0] * q[1] - q[0] * p[1];
        a2 += cr;
        cx += cr * (p[0] + q[0]);
        cy += cr * (p[1] + q[1]);
    }
    let area = 0.5 * a2;
    if area > 0.0 {
        (area, Some([o[0] + cx / (3.0 * a2), o[1] + cy / (3.0 * a2)]))
    } else {
        (area.max(0.0), None)
    }
}

/// Segment where the line `m . x = alpha` crosses the rectangle `[0, dx]`.
pub fn interface_segment_2d(m: [f64; 2], alpha: f64, dx: [f64; 2]) -> Option<[[f64; 2]; 2]> {
    let rect = [[0.0, 0.0], [dx[0], 0.0], [dx[0], dx[1]], [0.0, dx[1]]];
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(2);
    for i in 0..4 {
        let (p, q) = (rect[i], rect[(i + 1) % 4]);
        let dp = m[0] * p[0] + m[1] * p[1] - alpha;
        let dq = m[0] * q[0] + m[1] * q[1] - alpha;
        if dp == 0.0 && !pts.contains(&p) {
            pts.push(p);
        }
        if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
            let t = dp / (dp - dq);
            pts.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    if pts.len() >= 2 {
        Some([pts[0], pts[1]])
    } else {
        None
    }
}
