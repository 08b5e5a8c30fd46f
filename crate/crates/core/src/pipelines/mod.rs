//! End-to-end procedures built on the LJL step.

mod bluenoise;
mod embed;
mod redistribute;
pub mod sweep;

pub use bluenoise::{bluenoise_2d, BlueNoiseConfig};
pub use embed::{
    compare_embed, embed_refine, gaussian_init, Comparison, EmbedConfig, RefineWindow, Refiner,
    ToyRefiner, ToyRefinerParams, GAUSSIAN_INIT_SCALE,
};
pub use redistribute::{project_onto, redistribute_on_mesh, RedistributeConfig};

use crate::cloud::{PointCloud, Vec3};
use crate::error::{LjlError, Result};
use crate::format::round9;
use crate::neighbors::Metric;
use serde::{Deserialize, Serialize};

pub const DEFAULT_TOL: f64 = 1e-5;
pub const DEFAULT_MAX_ITER: usize = 2000;

/// Hexagonal-packing estimate of the ideal spacing for `n` points on the
/// unit square, `sqrt(2 / (sqrt(3) n))`.
pub fn sigma_prime(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(LjlError::TooFewPoints { needed: 2, got: n });
    }
    Ok((2.0 / (3f64.sqrt() * n as f64)).sqrt())
}

/// How points are started.
#[derive(Debug, Clone)]
pub enum Initial {
    /// Draw this many points from the pipeline's default distribution.
    Random(usize),
    Cloud(PointCloud),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Points may leave the unit square.
    None,
    /// Coordinates are clamped to `[0, 1]` after every step.
    Fixed,
    /// Coordinates wrap into `[0, 1)`; distances use the minimum image.
    #[default]
    Periodic,
}

impl Boundary {
    pub fn metric(self) -> Metric {
        match self {
            Boundary::Periodic => Metric::Periodic,
            _ => Metric::Euclidean,
        }
    }

    pub fn apply(self, p: &mut Vec3) {
        match self {
            Boundary::None => {}
            Boundary::Fixed => {
                p.x = p.x.clamp(0.0, 1.0);
                p.y = p.y.clamp(0.0, 1.0);
            }
            Boundary::Periodic => {
                p.x = wrap_unit(p.x);
                p.y = wrap_unit(p.y);
            }
        }
    }
}

fn wrap_unit(x: f64) -> f64 {
    let w = x.rem_euclid(1.0);
    // rem_euclid of a tiny negative rounds up to exactly 1.0
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Score traces of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub distance_score: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub noise_score: Option<Vec<f64>>,
}

/// Summary of one pipeline run. Trace entry `t` describes the cloud after
/// iteration `t + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub iterations: usize,
    pub final_max_disp: f64,
    pub seed: u64,
    pub trace: Trace,
}

impl RunReport {
    fn new(seed: u64, with_noise: bool) -> Self {
        Self {
            iterations: 0,
            final_max_disp: 0.0,
            seed,
            trace: Trace {
                distance_score: Vec::new(),
                noise_score: with_noise.then(Vec::new),
            },
        }
    }

    fn record(&mut self, max_disp: f64, distance: f64, noise: Option<f64>) {
        self.iterations += 1;
        self.final_max_disp = max_disp;
        self.trace.distance_score.push(distance);
        if let (Some(trace), Some(v)) = (self.trace.noise_score.as_mut(), noise) {
            trace.push(v);
        }
    }

    /// JSON with every float rounded to 9 significant digits.
    pub fn to_json(&self) -> String {
        let mut rounded = self.clone();
        rounded.final_max_disp = round9(rounded.final_max_disp);
        rounded.trace.distance_score.iter_mut().for_each(|v| *v = round9(*v));
        if let Some(n) = rounded.trace.noise_score.as_mut() {
            n.iter_mut().for_each(|v| *v = round9(*v));
        }
        serde_json::to_string(&rounded).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sigma_prime_values() {
        // mpmath: 0.03358031036948568...
        assert_abs_diff_eq!(sigma_prime(1024).unwrap(), 0.0335803103694857, epsilon = 1e-12);
        assert_abs_diff_eq!(sigma_prime(2).unwrap(), 0.759835685651593, epsilon = 1e-12);
        for n in [2usize, 17, 300, 1024] {
            assert_abs_diff_eq!(sigma_prime(4 * n).unwrap(), sigma_prime(n).unwrap() / 2.0, epsilon = 1e-15);
        }
        assert!(sigma_prime(1).is_err());
    }

    #[test]
    fn boundaries() {
        let mut p = Vec3::new(-0.25, 1.5, 0.0);
        Boundary::Fixed.apply(&mut p);
        assert_eq!((p.x, p.y), (0.0, 1.0));
        let mut p = Vec3::new(-0.25, 1.5, 0.0);
        Boundary::Periodic.apply(&mut p);
        assert_eq!((p.x, p.y), (0.75, 0.5));
        let mut p = Vec3::new(-1e-18, 0.0, 0.0);
        Boundary::Periodic.apply(&mut p);
        assert!(p.x >= 0.0 && p.x < 1.0);
        let mut p = Vec3::new(-3.0, 7.0, 0.0);
        Boundary::None.apply(&mut p);
        assert_eq!((p.x, p.y), (-3.0, 7.0));
    }

    #[test]
    fn report_json_shape() {
        let mut r = RunReport::new(7, true);
        r.record(0.123456789012, 0.5, Some(0.25));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["iterations"], 1);
        assert_eq!(v["seed"], 7);
        assert_eq!(v["final_max_disp"], 0.123456789);
        assert_eq!(v["trace"]["distance_score"][0], 0.5);
        assert_eq!(v["trace"]["noise_score"][0], 0.25);
    }
}
