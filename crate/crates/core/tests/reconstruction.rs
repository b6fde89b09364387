use mof_core::geometry::flood_centroid;
use mof_core::reconstruction::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> [f64; 3] {
    loop {
        let mut n = [0.0f64; 3];
        for v in n.iter_mut().take(dim) {
            *v = rng.gen_range(-1.0..1.0);
        }
        let r = n.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 0.1 && r <= 1.0 {
            return [n[0] / r, n[1] / r, n[2] / r];
        }
    }
}

fn forward(n: [f64; 3], c: f64, dx: [f64; 3], dim: usize) -> MofTarget {
    let centroid = if dim == 2 {
        let (_, r) = mof_core::geometry::flood_centroid_2d([n[0], n[1]], [dx[0], dx[1]], c).unwrap();
        [r.centroid[0], r.centroid[1], 0.5]
    } else {
        flood_centroid(n, dx, c).unwrap().1.centroid
    };
    MofTarget {
        volume_fraction: c,
        centroid,
    }
}

fn round_trip(dim: usize, count: usize, seed: u64) -> (f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut max_iter = 0;
    for _ in 0..count {
        let n = random_unit(&mut rng, dim);
        let c = rng.gen_range(0.01..0.99);
        // stretched cells up to 4:1
        let mut dx: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.5..2.0));
        if dim == 2 {
            dx[2] = 1.0;
        }
        let t = forward(n, c, dx, dim);
        let r = reconstruct_with(&t, dx, dim, &Options::default()).unwrap();
        let back = forward(r.plane.normal, c, dx, dim);
        for k in 0..dim {
            worst = worst.max((back.centroid[k] - t.centroid[k]).abs());
        }
        max_iter = max_iter.max(r.iterations);
    }
    (worst, max_iter)
}

#[test]
fn round_trip_3d() {
    let (worst, it) = round_trip(3, 2000, 1);
    assert!(worst <= 1e-6, "worst centroid error {worst}");
    assert!(it <= 10);
}

#[test]
fn round_trip_2d() {
    let (worst, it) = round_trip(2, 2000, 2);
    assert!(worst <= 1e-6, "worst centroid error {worst}");
    assert!(it <= 10);
}

#[test]
fn recovers_generating_normal() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..500 {
        let n = random_unit(&mut rng, 3);
        let c = rng.gen_range(0.05..0.95);
        let dx = [0.7, 1.3, 1.0];
        let t = forward(n, c, dx, 3);
        let r = reconstruct_with(&t, dx, 3, &Options::default()).unwrap();
        assert!(r.objective <= 1e-8, "{}", r.objective);
        let cosang: f64 = (0..3).map(|k| r.plane.normal[k] * n[k]).sum();
        assert!(cosang > 1.0 - 1e-8);
        let len: f64 = r.plane.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((len - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 200 {
        let t = MofTarget {
            volume_fraction: rng.gen_range(0.1..0.9),
            centroid: [
                rng.gen_range(0.3..0.7),
                rng.gen_range(0.3..0.7),
                rng.gen_range(0.3..0.7),
            ],
        };
        let phi = rng.gen_range(0.3..2.8);
        let theta = rng.gen_range(-3.0..3.0);
        let dx = [1.0, 1.0, 1.0];
        let g = objective_gradient(phi, theta, &t, dx).unwrap();
        let h = 1e-5;
        let e = |p: f64, q: f64| objective(p, q, &t, dx).unwrap().0;
        let fd = [
            (e(phi + h, theta) - e(phi - h, theta)) / (2.0 * h),
            (e(phi, theta + h) - e(phi, theta - h)) / (2.0 * h),
        ];
        // second difference flags configuration boundaries
        let curv = (e(phi + h, theta) - 2.0 * e(phi, theta) + e(phi - h, theta)).abs();
        let norm = (fd[0] * fd[0] + fd[1] * fd[1]).sqrt();
        if norm < 1e-3 || curv > 1e-6 {
            continue;
        }
        for q in 0..2 {
            assert!((g[q] - fd[q]).abs() <= 1e-5 * norm, "{g:?} {fd:?}");
        }
        checked += 1;
    }
}

#[test]
fn gradient_2d_matches_finite_differences() {
    let t = MofTarget {
        volume_fraction: 0.35,
        centroid: [0.4, 0.3, 0.5],
    };
    for theta in [0.3, 1.0, 2.0, -2.5] {
        let g = objective_gradient_2d(theta, &t, [1.0, 1.0]).unwrap();
        let h = 1e-5;
        let e = |q: f64| objective_2d(q, &t, [1.0, 1.0]).unwrap().0;
        let fd = (e(theta + h) - e(theta - h)) / (2.0 * h);
        assert!((g - fd).abs() <= 1e-5 * fd.abs().max(1e-3));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn mirror_equivariance(
        n in prop::array::uniform3(-1.0f64..1.0),
        c in 0.05f64..0.95,
        axis in 0usize..3,
    ) {
        let r = n.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(r > 0.1);
        let n = [n[0] / r, n[1] / r, n[2] / r];
        let dx = [1.0; 3];
        let t = forward(n, c, dx, 3);
        let mut tm = t;
        tm.centroid[axis] = 1.0 - tm.centroid[axis];
        let a = reconstruct(&t, dx, 3).unwrap();
        let b = reconstruct(&tm, dx, 3).unwrap();
        for k in 0..3 {
            let expect = if k == axis { -a.normal[k] } else { a.normal[k] };
            prop_assert!((b.normal[k] - expect).abs() <= 1e-6);
        }
    }
}
