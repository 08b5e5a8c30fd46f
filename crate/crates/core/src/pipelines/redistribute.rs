use super::{sigma_prime, Initial, RunReport, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::analysis::distance_score_filtered;
use crate::cloud::{mix_seed, PointCloud, Vec3};
use crate::error::{invalid, LjlError, Result};
use crate::geometry::TriangleMesh;
use crate::lj::{ljl_step, LjParams, PairAssignment, Schedule, ScheduleKind};
use crate::neighbors::{normals_compatible, Metric, SpatialIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RedistributeConfig {
    pub params: LjParams,
    pub schedule: Schedule,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Pairs whose normals differ by this angle or more do not interact.
    pub theta_max: f64,
}

impl RedistributeConfig {
    /// eps 2, sigma = `sigma_mult * sigma'(n)`, alpha 0.5, beta 0.01, pi/4 gate.
    pub fn for_count(n: usize, sigma_mult: f64) -> Result<Self> {
        Ok(Self {
            params: LjParams::new(2.0, sigma_prime(n.max(2))? * sigma_mult)?,
            schedule: Schedule::exponential(0.5, 0.01)?,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
            theta_max: FRAC_PI_4,
        })
    }
}

/// Project every point onto the mesh, returning the projected cloud and the
/// face normal under each point.
pub fn project_onto(mesh: &TriangleMesh, cloud: &PointCloud) -> Result<(PointCloud, Vec<Vec3>)> {
    if cloud.dim() != 3 {
        return Err(LjlError::DimensionMismatch("mesh projection needs a 3D cloud".into()));
    }
    let projs = mesh.project_cloud(cloud);
    let normals = projs.iter().map(|p| mesh.point_normal(p)).collect();
    let points = projs.into_iter().map(|p| p.point).collect();
    Ok((PointCloud::new(3, points)?, normals))
}

/// Even out points over a mesh surface: gated LJL steps with a projection
/// back onto the surface after each one.
///
/// A point whose nearest neighbor lies across the surface (normal angle not
/// below `theta_max`) keeps its position for that iteration.
pub fn redistribute_on_mesh(
    init: Initial,
    mesh: &TriangleMesh,
    cfg: &RedistributeConfig,
) -> Result<(PointCloud, RunReport)> {
    cfg.params.validate()?;
    if cfg.schedule.kind != ScheduleKind::Exponential {
        return Err(invalid("schedule", "mesh redistribution uses the exponential schedule"));
    }
    let cloud0 = match init {
        Initial::Random(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            PointCloud::random_cube(n, &mut rng)
        }
        Initial::Cloud(c) => c,
    };
    if cloud0.len() < 2 {
        return Err(LjlError::TooFewPoints {
            needed: 2,
            got: cloud0.len(),
        });
    }
    if cfg.params.k + 1 > cloud0.len() {
        return Err(LjlError::NeighborCount {
            k: cfg.params.k,
            n: cloud0.len(),
        });
    }

    let (mut cloud, mut normals) = project_onto(mesh, &cloud0)?;
    let mut report = RunReport::new(cfg.seed, true);
    for it in 0..cfg.max_iter {
        let index = SpatialIndex::build(&cloud, Metric::Euclidean)?;
        let mut pairs = PairAssignment::k_nearest(&index, cfg.params.k)?;
        // Partner lists are sorted by distance, so `ps[0]` is the nearest.
        pairs.freeze_unless(|i, ps| {
            ps.first()
                .is_some_and(|&j| normals_compatible(&normals[i], &normals[j], cfg.theta_max))
        });
        let dt = cfg.schedule.dt_exponential(it);
        let stepped = ljl_step(
            &cloud,
            &pairs,
            dt,
            &cfg.params,
            Metric::Euclidean,
            mix_seed(cfg.seed, it as u64, 2),
        )?;
        let (next, next_normals) = project_onto(mesh, &stepped)?;
        let max_disp = next.max_displacement(&cloud)?;
        let noise = crate::geometry::noise_score(&next, mesh)?;
        let spread = distance_score_filtered(&next, &next_normals, cfg.theta_max)
            .or_else(|e| match e {
                LjlError::NoQualifiedNeighbor => Ok(0.0),
                other => Err(other),
            })?;
        cloud = next;
        normals = next_normals;
        report.record(max_disp, spread, Some(noise));
        if max_disp < cfg.tol {
            break;
        }
    }
    Ok((cloud, report))
}
