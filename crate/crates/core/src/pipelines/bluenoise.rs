use super::{sigma_prime, Boundary, Initial, RunReport, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::analysis::distance_score;
use crate::cloud::{mix_seed, PointCloud};
use crate::error::{invalid, LjlError, Result};
use crate::lj::{ljl_step, LjParams, PairAssignment, Schedule, ScheduleKind};
use crate::neighbors::SpatialIndex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlueNoiseConfig {
    pub boundary: Boundary,
    pub params: LjParams,
    pub schedule: Schedule,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl BlueNoiseConfig {
    /// Defaults for `n` points: eps 2, sigma = `sigma_mult * sigma'`,
    /// alpha 0.5, beta 0.01, periodic boundary.
    pub fn for_count(n: usize, sigma_mult: f64) -> Result<Self> {
        let sigma = sigma_prime(n.max(2))? * sigma_mult;
        Ok(Self {
            boundary: Boundary::Periodic,
            params: LjParams::new(2.0, sigma)?,
            schedule: Schedule::exponential(0.5, 0.01)?,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
        })
    }
}

/// Spread 2D points into a blue-noise arrangement by repeated LJL steps.
///
/// Stops once the largest per-point move drops below `tol`, or after
/// `max_iter` steps.
pub fn bluenoise_2d(init: Initial, cfg: &BlueNoiseConfig) -> Result<(PointCloud, RunReport)> {
    cfg.params.validate()?;
    if cfg.schedule.kind != ScheduleKind::Exponential {
        return Err(invalid("schedule", "blue-noise synthesis uses the exponential schedule"));
    }
    if !(cfg.tol >= 0.0) {
        return Err(invalid("tol", "must be non-negative"));
    }
    let mut cloud = match init {
        Initial::Random(n) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            PointCloud::random_unit_square(n, &mut rng)
        }
        Initial::Cloud(c) => c,
    };
    if cloud.dim() != 2 {
        return Err(LjlError::DimensionMismatch("blue-noise synthesis is 2D".into()));
    }
    if cloud.is_empty() {
        return Err(LjlError::EmptyCloud);
    }
    let mut report = RunReport::new(cfg.seed, false);
    if cloud.len() == 1 {
        return Ok((cloud, report));
    }
    if cfg.params.k + 1 > cloud.len() {
        return Err(LjlError::NeighborCount {
            k: cfg.params.k,
            n: cloud.len(),
        });
    }

    let metric = cfg.boundary.metric();
    if cfg.boundary == Boundary::Periodic {
        let mut pts = cloud.points().to_vec();
        pts.iter_mut().for_each(|p| cfg.boundary.apply(p));
        cloud = PointCloud::new(2, pts)?;
    }

    for it in 0..cfg.max_iter {
        let index = SpatialIndex::build(&cloud, metric)?;
        let pairs = PairAssignment::k_nearest(&index, cfg.params.k)?;
        let dt = cfg.schedule.dt_exponential(it);
        let stepped = ljl_step(&cloud, &pairs, dt, &cfg.params, metric, mix_seed(cfg.seed, it as u64, 1))?;
        let mut pts = stepped.into_points();
        pts.iter_mut().for_each(|p| cfg.boundary.apply(p));
        let max_disp = pts
            .iter()
            .zip(cloud.points())
            .map(|(a, b)| metric.distance(a, b))
            .fold(0.0, f64::max);
        cloud = PointCloud::new(2, pts)?;
        report.record(max_disp, distance_score(&cloud, metric)?, None);
        if max_disp < cfg.tol {
            break;
        }
    }
    Ok((cloud, report))
}
