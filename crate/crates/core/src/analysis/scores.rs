use crate::cloud::{PointCloud, Vec3};
use crate::error::{LjlError, Result};
use crate::neighbors::{check_normals, normals_compatible, Metric, SpatialIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Mean distance from each point to its nearest neighbor.
pub fn distance_score(cloud: &PointCloud, metric: Metric) -> Result<f64> {
    if cloud.len() < 2 {
        return Err(LjlError::TooFewPoints {
            needed: 2,
            got: cloud.len(),
        });
    }
    let index = SpatialIndex::build(cloud, metric)?;
    let pts = cloud.points();
    let total: f64 = (0..pts.len())
        .into_par_iter()
        .map(|i| index.nearest(i).map(|j| metric.distance(&pts[i], &pts[j])))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    Ok(total / pts.len() as f64)
}

/// Mean distance to the nearest neighbor whose normal lies within
/// `theta_max`. Points without such a neighbor are left out of the mean.
pub fn distance_score_filtered(cloud: &PointCloud, normals: &[Vec3], theta_max: f64) -> Result<f64> {
    check_normals(cloud, normals, theta_max)?;
    if cloud.len() < 2 {
        return Err(LjlError::TooFewPoints {
            needed: 2,
            got: cloud.len(),
        });
    }
    let index = SpatialIndex::build(cloud, Metric::Euclidean)?;
    let pts = cloud.points();
    let found: Vec<Option<f64>> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            index
                .nearest_where(i, |j| normals_compatible(&normals[i], &normals[j], theta_max))
                .map(|o| o.map(|j| (pts[i] - pts[j]).norm()))
        })
        .collect::<Result<_>>()?;
    let (sum, count) = found
        .into_iter()
        .flatten()
        .fold((0.0, 0usize), |(s, c), d| (s + d, c + 1));
    if count == 0 {
        return Err(LjlError::NoQualifiedNeighbor);
    }
    Ok(sum / count as f64)
}

/// Distance and noise score of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub distance_score: f64,
    pub noise_score: f64,
}

/// Relative change of a layered run against its baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub distance_score_base: f64,
    pub distance_score_ljl: f64,
    pub noise_score_base: f64,
    pub noise_score_ljl: f64,
    pub distance_increment: f64,
    pub noise_increment: f64,
    /// `noise_increment / distance_increment`, only when the latter is positive.
    pub ratio: Option<f64>,
}

pub fn increment_report(base: Scores, ljl: Scores) -> Result<ScoreReport> {
    if base.distance_score == 0.0 {
        return Err(LjlError::ZeroBaseline("distance score"));
    }
    if base.noise_score == 0.0 {
        return Err(LjlError::ZeroBaseline("noise score"));
    }
    let distance_increment = (ljl.distance_score - base.distance_score) / base.distance_score;
    let noise_increment = (ljl.noise_score - base.noise_score) / base.noise_score;
    let ratio = (distance_increment > 0.0).then(|| noise_increment / distance_increment);
    Ok(ScoreReport {
        distance_score_base: base.distance_score,
        distance_score_ljl: ljl.distance_score,
        noise_score_base: base.noise_score,
        noise_score_ljl: ljl.noise_score,
        distance_increment,
        noise_increment,
        ratio,
    })
}
