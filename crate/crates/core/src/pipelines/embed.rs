use super::{sigma_prime, Initial, RunReport};
use crate::analysis::{distance_score, increment_report, ScoreReport, Scores};
use crate::cloud::{mix_seed, PointCloud, Vec3};
use crate::error::{invalid, LjlError, Result};
use crate::geometry::Surface;
use crate::lj::{ljl_step, LjParams, PairAssignment, Schedule};
use crate::neighbors::{Metric, SpatialIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

/// Gaussian initial clouds are `GAUSSIAN_INIT_SCALE * N(0, I)`.
pub const GAUSSIAN_INIT_SCALE: f64 = 0.5;

/// An iterative point-cloud process (generator or denoiser) that LJL steps
/// can be interleaved with. Called once per step, in order.
pub trait Refiner {
    fn step(&mut self, t: usize, cloud: &PointCloud) -> Result<PointCloud>;
}

impl<R: Refiner + ?Sized> Refiner for Box<R> {
    fn step(&mut self, t: usize, cloud: &PointCloud) -> Result<PointCloud> {
        (**self).step(t, cloud)
    }
}

/// Which refiner steps are followed by an LJL step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RefineWindow {
    total: usize,
    active: Option<(usize, usize)>,
}

impl RefineWindow {
    /// LJL after steps `start..=end` of `total`; needs `1 <= start <= end <= total`.
    pub fn new(total: usize, start: usize, end: usize) -> Result<Self> {
        if !(1 <= start && start <= end && end <= total) {
            return Err(LjlError::InvalidWindow { total, start, end });
        }
        Ok(Self {
            total,
            active: Some((start, end)),
        })
    }

    /// Refiner only.
    pub fn empty(total: usize) -> Self {
        Self { total, active: None }
    }

    /// `start = 0.6 T`, `end = 0.95 T`.
    pub fn defaults(total: usize) -> Result<Self> {
        let start = ((0.6 * total as f64).round() as usize).max(1);
        let end = ((0.95 * total as f64).floor() as usize).max(start);
        Self::new(total, start, end)
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn bounds(&self) -> Option<(usize, usize)> {
        self.active
    }

    pub fn contains(&self, t: usize) -> bool {
        self.active.is_some_and(|(s, e)| s <= t && t <= e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedConfig {
    pub window: RefineWindow,
    pub params: LjParams,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
}

impl EmbedConfig {
    /// eps 2, sigma = 5 sigma'(n), default window for `total` steps.
    pub fn for_count(n: usize, total: usize, alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            window: RefineWindow::defaults(total)?,
            params: LjParams::new(2.0, 5.0 * sigma_prime(n.max(2))?)?,
            alpha,
            beta,
            seed: 0,
        })
    }
}

/// `N` points from `GAUSSIAN_INIT_SCALE * N(0, I)`.
pub fn gaussian_init(n: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x6a, 0));
    PointCloud::gaussian(n, GAUSSIAN_INIT_SCALE, &mut rng)
}

/// Run `refiner` for `T` steps, following each step inside the window with
/// one LJL step whose size adapts to the refiner's last move.
///
/// When `surface` is given the trace also records the noise score.
pub fn embed_refine(
    refiner: &mut dyn Refiner,
    init: Initial,
    cfg: &EmbedConfig,
    surface: Option<&dyn Surface>,
) -> Result<(PointCloud, RunReport)> {
    cfg.params.validate()?;
    let schedule = Schedule::adaptive(cfg.alpha, cfg.beta)?;
    let mut cloud = match init {
        Initial::Random(n) => gaussian_init(n, cfg.seed),
        Initial::Cloud(c) => c,
    };
    if cloud.len() < 2 {
        return Err(LjlError::TooFewPoints {
            needed: 2,
            got: cloud.len(),
        });
    }
    if cfg.window.active.is_some() && cfg.params.k + 1 > cloud.len() {
        return Err(LjlError::NeighborCount {
            k: cfg.params.k,
            n: cloud.len(),
        });
    }

    let mut report = RunReport::new(cfg.seed, surface.is_some());
    for t in 1..=cfg.window.total {
        let mut next = refiner.step(t, &cloud)?;
        next.check_same_shape(&cloud)?;
        let max_disp = next.max_displacement(&cloud)?;
        if cfg.window.contains(t) {
            let dt = schedule.dt_adaptive(t, max_disp)?;
            if dt > 0.0 {
                let index = SpatialIndex::build(&next, Metric::Euclidean)?;
                let pairs = PairAssignment::k_nearest(&index, cfg.params.k)?;
                next = ljl_step(&next, &pairs, dt, &cfg.params, Metric::Euclidean, mix_seed(cfg.seed, t as u64, 3))?;
            }
        }
        let noise = surface.map(|s| mean_distance(&next, s));
        let spread = distance_score(&next, Metric::Euclidean)?;
        let final_disp = next.max_displacement(&cloud)?;
        cloud = next;
        report.record(final_disp, spread, noise);
    }
    Ok((cloud, report))
}

pub(crate) fn mean_distance(cloud: &PointCloud, surface: &dyn Surface) -> f64 {
    // Sequential sum so the result does not depend on the thread count.
    let d: Vec<f64> = cloud.points().par_iter().map(|p| surface.distance(p)).collect();
    let total: f64 = d.iter().sum();
    total / cloud.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyRefinerParams {
    /// Fraction of the way to the surface covered per step.
    pub lambda: f64,
    /// Noise scale at step 0.
    pub noise0: f64,
    /// Per-step noise decay.
    pub decay: f64,
}

impl Default for ToyRefinerParams {
    fn default() -> Self {
        Self {
            lambda: 0.2,
            noise0: 0.05,
            decay: 0.9,
        }
    }
}

impl ToyRefinerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(invalid("lambda", "must lie in (0, 1]"));
        }
        if !(self.noise0 >= 0.0 && self.noise0.is_finite()) {
            return Err(invalid("noise0", "must be finite and non-negative"));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(invalid("decay", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Stand-in for a trained refiner: pulls every point a fixed fraction of the
/// way onto a target surface and adds decaying Gaussian noise,
/// `x + lambda (P(x) - x) + noise0 decay^t g`.
pub struct ToyRefiner<S> {
    surface: S,
    params: ToyRefinerParams,
    rng: ChaCha8Rng,
}

impl<S: Surface> ToyRefiner<S> {
    pub fn new(surface: S, params: ToyRefinerParams, seed: u64) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            surface,
            params,
            rng: ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x70, 0)),
        })
    }

    pub fn surface(&self) -> &S {
        &self.surface
    }
}

impl<S: Surface> Refiner for ToyRefiner<S> {
    fn step(&mut self, t: usize, cloud: &PointCloud) -> Result<PointCloud> {
        if cloud.dim() != 3 {
            return Err(LjlError::DimensionMismatch("toy refiner works in 3D".into()));
        }
        let scale = self.params.noise0 * self.params.decay.powi(t as i32);
        let lambda = self.params.lambda;
        let pulled: Vec<Vec3> = cloud
            .points()
            .par_iter()
            .map(|x| x + (self.surface.closest(x) - x) * lambda)
            .collect();
        // Noise is drawn for every point whatever the scale, so paired runs
        // consume identical random streams.
        let points = pulled
            .into_iter()
            .map(|p| {
                let g = Vec3::new(
                    self.rng.sample(StandardNormal),
                    self.rng.sample(StandardNormal),
                    self.rng.sample(StandardNormal),
                );
                p + g * scale
            })
            .collect();
        PointCloud::new(3, points)
    }
}

/// Paired refiner-only and LJL-embedded runs from the same start and seed.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub base: (PointCloud, RunReport),
    pub ljl: (PointCloud, RunReport),
    pub report: ScoreReport,
}

/// Run a fresh refiner twice, once without and once with the LJL window, and
/// compare final distance and noise scores.
pub fn compare_embed<R, F>(
    mut make_refiner: F,
    init: Initial,
    cfg: &EmbedConfig,
    surface: &dyn Surface,
) -> Result<Comparison>
where
    R: Refiner,
    F: FnMut() -> Result<R>,
{
    let cloud0 = match init {
        Initial::Random(n) => gaussian_init(n, cfg.seed),
        Initial::Cloud(c) => c,
    };
    let base_cfg = EmbedConfig {
        window: RefineWindow::empty(cfg.window.total),
        ..*cfg
    };
    let base = embed_refine(&mut make_refiner()?, Initial::Cloud(cloud0.clone()), &base_cfg, Some(surface))?;
    let ljl = embed_refine(&mut make_refiner()?, Initial::Cloud(cloud0), cfg, Some(surface))?;
    let scores = |c: &PointCloud| -> Result<Scores> {
        Ok(Scores {
            distance_score: distance_score(c, Metric::Euclidean)?,
            noise_score: mean_distance(c, surface),
        })
    };
    let report = increment_report(scores(&base.0)?, scores(&ljl.0)?)?;
    Ok(Comparison { base, ljl, report })
}
