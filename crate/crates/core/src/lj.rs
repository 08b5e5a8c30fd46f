//! Lennard-Jones potential, force, step-size schedules and the LJL update.

use crate::cloud::{mix_seed, random_unit, PointCloud, Vec3};
use crate::error::{invalid, LjlError, Result};
use crate::neighbors::{Metric, SpatialIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Separations below this are treated as coincident points.
pub const COINCIDENT_TOL: f64 = 1e-12;

/// Equilibrium distance of the potential in units of sigma, `2^(1/6)`.
pub fn equilibrium_factor() -> f64 {
    2f64.powf(1.0 / 6.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LjParams {
    /// Potential depth.
    pub epsilon: f64,
    /// Zero crossing of the potential.
    pub sigma: f64,
    pub clamp_lo_factor: f64,
    pub clamp_hi_factor: f64,
    /// Number of neighbors each point interacts with.
    pub k: usize,
    /// Include the attractive `(sigma/r)^6` term.
    pub attraction: bool,
}

impl Default for LjParams {
    fn default() -> Self {
        Self {
            epsilon: 2.0,
            sigma: 1.0,
            clamp_lo_factor: 0.9,
            clamp_hi_factor: 100.0,
            k: 1,
            attraction: true,
        }
    }
}

impl LjParams {
    pub fn new(epsilon: f64, sigma: f64) -> Result<Self> {
        let p = Self {
            epsilon,
            sigma,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_attraction(mut self, on: bool) -> Self {
        self.attraction = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid("epsilon", "must be positive and finite"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma", "must be positive and finite"));
        }
        if !(self.clamp_lo_factor > 0.0 && self.clamp_lo_factor < self.clamp_hi_factor) {
            return Err(invalid("clamp", "need 0 < clamp_lo_factor < clamp_hi_factor"));
        }
        if !self.clamp_hi_factor.is_finite() {
            return Err(invalid("clamp", "upper clamp must be finite"));
        }
        if self.k == 0 {
            return Err(invalid("k", "must be at least 1"));
        }
        Ok(())
    }

    fn attraction_weight(&self) -> f64 {
        if self.attraction {
            1.0
        } else {
            0.0
        }
    }
}

/// `V(r) = 4 eps ((sigma/r)^12 - a (sigma/r)^6)`, unclamped.
pub fn lj_potential(r: f64, p: &LjParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(LjlError::NonPositiveDistance(r));
    }
    let s6 = (p.sigma / r).powi(6);
    Ok(4.0 * p.epsilon * (s6 * s6 - p.attraction_weight() * s6))
}

/// `-dV/dr`. Positive values push a pair apart.
pub fn lj_force(r: f64, p: &LjParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(LjlError::NonPositiveDistance(r));
    }
    let s6 = (p.sigma / r).powi(6);
    Ok(24.0 * p.epsilon / r * (2.0 * s6 * s6 - p.attraction_weight() * s6))
}

pub fn clamp_distance(r: f64, p: &LjParams) -> f64 {
    r.max(p.clamp_lo_factor * p.sigma)
        .min(p.clamp_hi_factor * p.sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    /// `alpha * exp(-beta * i)`
    Exponential,
    /// `(alpha / i) * max_disp * exp(-beta * i)`
    Adaptive,
}

/// Decaying time-step schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub alpha: f64,
    pub beta: f64,
    pub kind: ScheduleKind,
}

impl Schedule {
    pub fn exponential(alpha: f64, beta: f64) -> Result<Self> {
        Self::checked(alpha, beta, ScheduleKind::Exponential)
    }

    pub fn adaptive(alpha: f64, beta: f64) -> Result<Self> {
        Self::checked(alpha, beta, ScheduleKind::Adaptive)
    }

    fn checked(alpha: f64, beta: f64, kind: ScheduleKind) -> Result<Self> {
        // alpha = 0 is accepted: it switches the layer off.
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(invalid("alpha", "must be finite and non-negative"));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(invalid("beta", "must be finite and non-negative"));
        }
        Ok(Self { alpha, beta, kind })
    }

    pub fn dt_exponential(&self, i: usize) -> f64 {
        self.alpha * (-self.beta * i as f64).exp()
    }

    pub fn dt_adaptive(&self, i: usize, max_disp: f64) -> Result<f64> {
        if i == 0 {
            return Err(LjlError::ZeroIteration);
        }
        if !(max_disp >= 0.0) {
            return Err(invalid("max_disp", "must be non-negative"));
        }
        let i = i as f64;
        Ok(self.alpha / i * max_disp * (-self.beta * i).exp())
    }

    /// Step size for iteration `i` under this schedule's kind.
    pub fn dt(&self, i: usize, max_disp: f64) -> Result<f64> {
        match self.kind {
            ScheduleKind::Exponential => Ok(self.dt_exponential(i)),
            ScheduleKind::Adaptive => self.dt_adaptive(i, max_disp),
        }
    }
}

/// Interaction partners for every point of a cloud.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairAssignment {
    neighbor_of: Vec<Vec<usize>>,
}

impl PairAssignment {
    /// An empty partner list leaves that point in place.
    pub fn new(neighbor_of: Vec<Vec<usize>>) -> Result<Self> {
        let n = neighbor_of.len();
        for (i, partners) in neighbor_of.iter().enumerate() {
            for &j in partners {
                if j == i {
                    return Err(invalid("pairs", format!("point {i} paired with itself")));
                }
                if j >= n {
                    return Err(LjlError::IndexOutOfRange { index: j, len: n });
                }
            }
        }
        Ok(Self { neighbor_of })
    }

    /// `k` nearest neighbors of every indexed point.
    pub fn k_nearest(index: &SpatialIndex, k: usize) -> Result<Self> {
        let n = index.len();
        if k == 0 || k + 1 > n {
            return Err(LjlError::NeighborCount { k, n });
        }
        let neighbor_of = (0..n)
            .into_par_iter()
            .map(|i| index.k_nearest(i, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { neighbor_of })
    }

    pub fn len(&self) -> usize {
        self.neighbor_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbor_of.is_empty()
    }

    pub fn partners(&self, i: usize) -> &[usize] {
        &self.neighbor_of[i]
    }

    /// Clear the partner list of every point `i` for which `keep(i, partners)`
    /// is false, freezing it for the step.
    pub fn freeze_unless<F: Fn(usize, &[usize]) -> bool + Sync>(&mut self, keep: F) {
        self.neighbor_of.par_iter_mut().enumerate().for_each(|(i, ps)| {
            if !keep(i, ps) {
                ps.clear();
            }
        });
    }
}

/// Direction for a coincident pair. Antisymmetric in `(i, j)` so both points
/// separate along the same line.
fn coincident_direction(seed: u64, dim: usize, i: usize, j: usize) -> Vec3 {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, lo as u64, hi as u64));
    let u = random_unit(dim, &mut rng);
    if i < j {
        u
    } else {
        -u
    }
}

/// One Lennard-Jones layer: every point moves by
/// `tanh(F(clamp(r))) * dt^2 / 2` along the line away from each partner.
///
/// All reads come from `cloud`, so the update is simultaneous. `seed` only
/// matters when a pair is coincident.
pub fn ljl_step(
    cloud: &PointCloud,
    pairs: &PairAssignment,
    dt: f64,
    params: &LjParams,
    metric: Metric,
    seed: u64,
) -> Result<PointCloud> {
    params.validate()?;
    if pairs.len() != cloud.len() {
        return Err(LjlError::DimensionMismatch(format!(
            "pair assignment covers {} points, cloud has {}",
            pairs.len(),
            cloud.len()
        )));
    }
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(invalid("dt", "must be finite and non-negative"));
    }
    if metric == Metric::Periodic && cloud.dim() != 2 {
        return Err(LjlError::DimensionMismatch(
            "periodic metric is only defined on the unit square".into(),
        ));
    }
    let pts = cloud.points();
    let half_dt2 = 0.5 * dt * dt;
    let dim = cloud.dim();
    let moved: Vec<Vec3> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut step = Vec3::zeros();
            for &j in pairs.partners(i) {
                let sep = metric.delta(&pts[i], &pts[j]);
                let r_raw = sep.norm();
                let r = clamp_distance(r_raw, params);
                // r is clamped to >= clamp_lo * sigma > 0, so the force is defined.
                let force = lj_force(r, params).expect("clamped distance is positive");
                let magnitude = force.tanh() * half_dt2;
                let dir = if r_raw < COINCIDENT_TOL {
                    coincident_direction(seed, dim, i, j)
                } else {
                    sep / r_raw
                };
                step += dir * magnitude;
            }
            pts[i] + step
        })
        .collect();
    Ok(cloud.with_points(moved))
}
