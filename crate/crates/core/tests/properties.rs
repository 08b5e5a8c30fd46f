use ljl::analysis::{distance_score, distance_score_filtered, periodogram, radial_stats};
use ljl::geometry::{noise_score, Surface, TriangleMesh};
use ljl::pipelines::Boundary;
use ljl::*;
use proptest::prelude::*;

fn xy_cloud(max: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 2..max)
        .prop_map(|v| PointCloud::from_xy(&v.into_iter().map(|(x, y)| [x, y]).collect::<Vec<_>>()).unwrap())
}

fn xyz_cloud(max: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((-1.5..1.5f64, -1.5..1.5f64, -1.5..1.5f64), 2..max)
        .prop_map(|v| PointCloud::from_xyz(&v.into_iter().map(|(x, y, z)| [x, y, z]).collect::<Vec<_>>()).unwrap())
}

fn vec3() -> impl Strategy<Value = Vec3> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn wrap(p: &Vec3) -> Vec3 {
    let mut q = *p;
    Boundary::Periodic.apply(&mut q);
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn force_is_minus_potential_slope(r_over_sigma in 0.5..20.0f64, sigma in 0.01..3.0f64, eps in 0.1..5.0f64, attraction: bool) {
        let p = LjParams::new(eps, sigma).unwrap().with_attraction(attraction);
        let r = r_over_sigma * sigma;
        let h = 1e-4 * r;
        let fd = -(lj_potential(r + h, &p).unwrap() - lj_potential(r - h, &p).unwrap()) / (2.0 * h);
        let f = lj_force(r, &p).unwrap();
        prop_assert!((f - fd).abs() <= 1e-4 * f.abs() + 1e-9 * eps / sigma, "r={r} f={f} fd={fd}");
    }

    #[test]
    fn pair_step_is_antisymmetric(a in (0.0..1.0f64, 0.0..1.0f64), angle in 0.0..std::f64::consts::TAU, sep in 0.001..0.2f64, dt in 0.0..1.0f64) {
        let b = (a.0 + sep * angle.cos(), a.1 + sep * angle.sin());
        let cloud = PointCloud::from_xy(&[[a.0, a.1], [b.0, b.1]]).unwrap();
        let p = LjParams::new(2.0, 0.05).unwrap();
        let pairs = PairAssignment::new(vec![vec![1], vec![0]]).unwrap();
        let out = ljl_step(&cloud, &pairs, dt, &p, Metric::Euclidean, 0).unwrap();
        let d0 = out.points()[0] - cloud.points()[0];
        let d1 = out.points()[1] - cloud.points()[1];
        prop_assert!((d0 + d1).norm() < 1e-15);
        prop_assert!(d0.norm() <= dt * dt / 2.0 + 1e-15);
    }

    #[test]
    fn periodic_step_commutes_with_translation(cloud in xy_cloud(40), sx in 0.0..1.0f64, sy in 0.0..1.0f64) {
        let shift = Vec3::new(sx, sy, 0.0);
        let moved = PointCloud::new(2, cloud.iter().map(|p| wrap(&(p + shift))).collect()).unwrap();
        let p = LjParams::new(2.0, 0.1).unwrap();
        let step = |c: &PointCloud| {
            let index = SpatialIndex::build(c, Metric::Periodic).unwrap();
            let pairs = PairAssignment::k_nearest(&index, 1).unwrap();
            (pairs.clone(), ljl_step(c, &pairs, 0.3, &p, Metric::Periodic, 1).unwrap())
        };
        let (pa, a) = step(&cloud);
        let (pb, b) = step(&moved);
        // Neighbor choice can legitimately differ only on near-ties.
        prop_assume!(pa == pb);
        for (x, y) in a.iter().zip(b.iter()) {
            prop_assert!(Metric::Periodic.distance(&(x + shift), y) < 1e-12);
        }
    }

    #[test]
    fn distance_score_permutation_and_scale(cloud in xyz_cloud(60), s in 0.1..10.0f64, rot in 0usize..59) {
        let base = distance_score(&cloud, Metric::Euclidean).unwrap();
        let mut pts = cloud.points().to_vec();
        let r = rot % pts.len();
        pts.rotate_left(r);
        pts.reverse();
        let permuted = PointCloud::new(3, pts.clone()).unwrap();
        prop_assert!((distance_score(&permuted, Metric::Euclidean).unwrap() - base).abs() <= 1e-12 * base.max(1.0));
        let scaled = PointCloud::new(3, pts.iter().map(|p| p * s).collect()).unwrap();
        let got = distance_score(&scaled, Metric::Euclidean).unwrap();
        prop_assert!((got - s * base).abs() <= 1e-12 * (s * base).max(1e-300));
    }

    #[test]
    fn filtered_score_with_pi_is_plain(cloud in xyz_cloud(40), seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let normals: Vec<Vec3> = (0..cloud.len())
            .map(|_| {
                let v = Vec3::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                if v.norm() < 1e-6 { Vec3::z() } else { v.normalize() }
            })
            .collect();
        let plain = distance_score(&cloud, Metric::Euclidean).unwrap();
        let filtered = distance_score_filtered(&cloud, &normals, std::f64::consts::PI).unwrap();
        prop_assert!((plain - filtered).abs() <= 1e-12 * plain.max(1.0));
    }

    #[test]
    fn periodogram_ignores_wrapped_translation(cloud in xy_cloud(24), sx in 0.0..1.0f64, sy in 0.0..1.0f64) {
        let shift = Vec3::new(sx, sy, 0.0);
        let moved = PointCloud::new(2, cloud.iter().map(|p| wrap(&(p + shift))).collect()).unwrap();
        let a = periodogram(&cloud, 8).unwrap();
        let b = periodogram(&moved, 8).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn radial_stats_of_copies(cloud in xy_cloud(24), k in 1usize..5) {
        let g = periodogram(&cloud, 6).unwrap();
        let one = radial_stats(std::slice::from_ref(&g)).unwrap();
        let many = radial_stats(&vec![g; k]).unwrap();
        for (a, b) in one.radial_power.iter().zip(&many.radial_power) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        for (a, b) in one.anisotropy_db.iter().zip(&many.anisotropy_db) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn bvh_agrees_with_brute_force(tris in prop::collection::vec((vec3(), vec3(), vec3()), 1..40), qs in prop::collection::vec(vec3(), 1..20)) {
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        for (a, b, c) in tris {
            if (b - a).cross(&(c - a)).norm() / 2.0 > 1e-6 {
                let base = vertices.len();
                vertices.extend([a, b, c]);
                faces.push([base, base + 1, base + 2]);
            }
        }
        prop_assume!(!faces.is_empty());
        let mesh = TriangleMesh::new(vertices, faces).unwrap();
        for q in qs {
            let fast = mesh.closest_point(&q);
            let slow = mesh.closest_point_brute(&q);
            prop_assert_eq!(fast.face, slow.face);
            prop_assert_eq!(fast.distance, slow.distance);
        }
    }

    #[test]
    fn mesh_distance_is_lipschitz(q1 in vec3(), q2 in vec3()) {
        let mesh = TriangleMesh::icosphere(2);
        let d1 = mesh.distance(&q1);
        let d2 = mesh.distance(&q2);
        prop_assert!((d1 - d2).abs() <= (q1 - q2).norm() + 1e-12);
        let p = mesh.closest_point(&q1);
        prop_assert!(mesh.closest_point(&p.point).distance <= 1e-9);
    }

    #[test]
    fn noise_score_ignores_order(cloud in xyz_cloud(50)) {
        let mesh = TriangleMesh::icosphere(1);
        let mut pts = cloud.points().to_vec();
        pts.reverse();
        let a = noise_score(&cloud, &mesh).unwrap();
        let b = noise_score(&PointCloud::new(3, pts).unwrap(), &mesh).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn adaptive_step_decreases(alpha in 0.01..5.0f64, beta in 0.0..0.5f64, disp in 1e-6..1.0f64, t in 1usize..500) {
        let s = Schedule::adaptive(alpha, beta).unwrap();
        prop_assert!(s.dt_adaptive(t + 1, disp).unwrap() < s.dt_adaptive(t, disp).unwrap());
    }
}
