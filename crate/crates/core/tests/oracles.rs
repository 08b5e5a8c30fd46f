//! Indexed and accelerated routines checked against independent brute force.

use ljl::analysis::{distance_score, distance_score_filtered, periodogram, radial_stats};
use ljl::geometry::{closest_point_on_triangle, TriangleMesh};
use ljl::{nearest_normal_filtered, Metric, PointCloud, SpatialIndex, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn d2(metric: Metric, a: &Vec3, b: &Vec3) -> f64 {
    let mut d = a - b;
    if metric == Metric::Periodic {
        for c in 0..2 {
            d[c] -= d[c].round();
        }
    }
    d.norm_squared()
}

fn brute_k(cloud: &PointCloud, metric: Metric, i: usize, k: usize) -> Vec<usize> {
    let p = cloud.points();
    let mut all: Vec<(f64, usize)> = (0..p.len())
        .filter(|&j| j != i)
        .map(|j| (d2(metric, &p[i], &p[j]), j))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(_, j)| j).collect()
}

fn random_cloud(rng: &mut ChaCha8Rng, dim: usize) -> PointCloud {
    let n = rng.random_range(2..=2048usize);
    // Every fourth cloud lives on a coarse lattice so exact ties are common.
    let lattice = rng.random_range(0..4) == 0;
    let coord = |rng: &mut ChaCha8Rng| {
        if lattice {
            rng.random_range(0..16) as f64 / 16.0
        } else {
            rng.random::<f64>()
        }
    };
    let pts = (0..n)
        .map(|_| Vec3::new(coord(rng), coord(rng), if dim == 3 { coord(rng) } else { 0.0 }))
        .collect();
    PointCloud::new(dim, pts).unwrap()
}

#[test]
fn index_matches_brute_force_including_ties() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..60 {
        let (dim, metric) = match trial % 3 {
            0 => (2, Metric::Euclidean),
            1 => (2, Metric::Periodic),
            _ => (3, Metric::Euclidean),
        };
        let cloud = random_cloud(&mut rng, dim);
        let index = SpatialIndex::build(&cloud, metric).unwrap();
        let k = rng.random_range(1..=cloud.len().min(8) - 1).max(1);
        let step = (cloud.len() / 200).max(1);
        for i in (0..cloud.len()).step_by(step) {
            let want = brute_k(&cloud, metric, i, k);
            assert_eq!(index.k_nearest(i, k).unwrap(), want, "trial {trial} point {i}");
            assert_eq!(index.nearest(i).unwrap(), brute_k(&cloud, metric, i, 1)[0]);
        }
    }
}

#[test]
fn filtered_nearest_matches_brute_force() {
    let mesh = TriangleMesh::icosphere(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cloud = PointCloud::random_cube(400, &mut rng);
    let projs = mesh.project_cloud(&cloud);
    let normals: Vec<Vec3> = projs.iter().map(|p| mesh.point_normal(p)).collect();
    let pts = cloud.points();
    let theta = std::f64::consts::FRAC_PI_4;
    let index = SpatialIndex::build(&cloud, Metric::Euclidean).unwrap();
    let mut sum = 0.0;
    let mut count = 0;
    for i in 0..pts.len() {
        let brute = (0..pts.len())
            .filter(|&j| j != i && normals[i].dot(&normals[j]).clamp(-1.0, 1.0).acos() < theta)
            .min_by(|&a, &b| {
                (pts[i] - pts[a])
                    .norm_squared()
                    .total_cmp(&(pts[i] - pts[b]).norm_squared())
                    .then(a.cmp(&b))
            });
        assert_eq!(nearest_normal_filtered(&cloud, &normals, i, theta).unwrap(), brute);
        let indexed = index
            .nearest_where(i, |j| normals[i].dot(&normals[j]).clamp(-1.0, 1.0).acos() < theta)
            .unwrap();
        assert_eq!(indexed, brute);
        if let Some(j) = brute {
            sum += (pts[i] - pts[j]).norm();
            count += 1;
        }
    }
    let score = distance_score_filtered(&cloud, &normals, theta).unwrap();
    assert!((score - sum / count as f64).abs() < 1e-12);
}

#[test]
fn mesh_closest_point_matches_brute_force() {
    let mesh = TriangleMesh::icosphere(3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..2000 {
        let q = Vec3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let fast = mesh.closest_point(&q);
        let slow = mesh.closest_point_brute(&q);
        assert_eq!(fast.face, slow.face);
        assert!((fast.distance - slow.distance).abs() < 1e-9);

        // Independent scan using only the per-triangle routine.
        let best = (0..mesh.faces().len())
            .map(|f| {
                let [a, b, c] = mesh.triangle(f);
                (q - closest_point_on_triangle(&q, &a, &b, &c)).norm()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((fast.distance - best).abs() < 1e-9);

        let n = mesh.point_normal(&fast);
        let radial = fast.point.normalize();
        assert!(n.dot(&radial).clamp(-1.0, 1.0).acos() < 15f64.to_radians());
        assert!(mesh.closest_point(&fast.point).distance <= 1e-9);
    }
}

#[test]
fn distance_score_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for metric in [Metric::Euclidean, Metric::Periodic] {
        let cloud = PointCloud::random_unit_square(700, &mut rng);
        let p = cloud.points();
        let brute: f64 = (0..p.len())
            .map(|i| d2(metric, &p[i], &p[brute_k(&cloud, metric, i, 1)[0]]).sqrt())
            .sum::<f64>()
            / p.len() as f64;
        assert!((distance_score(&cloud, metric).unwrap() - brute).abs() < 1e-12);
    }
}

fn white_noise_stats(f_max: usize) -> ljl::analysis::SpectralStats {
    let grids: Vec<_> = (0..10u64)
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            periodogram(&PointCloud::random_unit_square(1024, &mut rng), f_max).unwrap()
        })
        .collect();
    radial_stats(&grids).unwrap()
}

#[test]
fn white_noise_has_unit_power_within_sampling_error() {
    let f = 128i64;
    let stats = white_noise_stats(f as usize);
    // Each annulus averages exponential(1) variates; half the bins are
    // conjugates of the other half.
    let mut bins = vec![0usize; f as usize];
    for fy in -f..=f {
        for fx in -f..=f {
            let r = ((fx * fx + fy * fy) as f64).sqrt().round() as usize;
            if (1..=f as usize).contains(&r) && (fx, fy) != (0, 0) {
                bins[r - 1] += 1;
            }
        }
    }
    for (i, p) in stats.radial_power.iter().enumerate().skip(1) {
        let independent = (bins[i] / 2 * stats.runs) as f64;
        let se = 1.0 / independent.sqrt();
        assert!((p - 1.0).abs() < 4.0 * se, "radius {} power {p} se {se}", i + 1);
    }
}

#[test]
#[ignore = "sampling noise: the radius-3 annulus reads 1.2206 for seeds 0..9"]
fn white_noise_radial_power_in_band() {
    let stats = white_noise_stats(128);
    for (i, p) in stats.radial_power.iter().enumerate().skip(1) {
        assert!((0.8..=1.2).contains(p), "radius {} power {p}", i + 1);
    }
}

#[test]
fn square_lattice_spectrum() {
    // 32 x 32 grid: power N at multiples of 32, zero elsewhere.
    let m = 32usize;
    let pts: Vec<[f64; 2]> = (0..m * m)
        .map(|i| [(i % m) as f64 / m as f64, (i / m) as f64 / m as f64])
        .collect();
    let cloud = PointCloud::from_xy(&pts).unwrap();
    let p = periodogram(&cloud, 70).unwrap();
    for fy in -70i64..=70 {
        for fx in -70i64..=70 {
            let want = if fx % 32 == 0 && fy % 32 == 0 { 1024.0 } else { 0.0 };
            assert!((p.get(fx, fy) - want).abs() < 1e-6, "({fx},{fy}) {}", p.get(fx, fy));
        }
    }
}
