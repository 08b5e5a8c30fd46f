//! Point cloud container shared by every stage of the pipeline.

use crate::error::{LjlError, Result};
use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Vec3 = Vector3<f64>;

/// An ordered set of 2D or 3D points.
///
/// 2D points are stored with a zero `z` coordinate so that all geometry can
/// share one vector type; the `dim` tag decides which axes are meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec3>,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<Vec3>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(LjlError::DimensionMismatch(format!(
                "dimension must be 2 or 3, got {dim}"
            )));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.iter().all(|c| c.is_finite()) {
                return Err(crate::error::invalid(
                    "points",
                    format!("point {i} has a non-finite coordinate"),
                ));
            }
            if dim == 2 && p.z != 0.0 {
                return Err(LjlError::DimensionMismatch(format!(
                    "2D point {i} has non-zero z"
                )));
            }
        }
        Ok(Self { dim, points })
    }

    pub fn from_xy(xy: &[[f64; 2]]) -> Result<Self> {
        Self::new(2, xy.iter().map(|p| Vec3::new(p[0], p[1], 0.0)).collect())
    }

    pub fn from_xyz(xyz: &[[f64; 3]]) -> Result<Self> {
        Self::new(3, xyz.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect())
    }

    /// Uniform random points in the unit square.
    pub fn random_unit_square<R: Rng>(n: usize, rng: &mut R) -> Self {
        let points = (0..n)
            .map(|_| Vec3::new(rng.random::<f64>(), rng.random::<f64>(), 0.0))
            .collect();
        Self { dim: 2, points }
    }

    /// Uniform random points in the cube `[-1, 1]^3`.
    pub fn random_cube<R: Rng>(n: usize, rng: &mut R) -> Self {
        let points = (0..n)
            .map(|_| {
                Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
            })
            .collect();
        Self { dim: 3, points }
    }

    /// Isotropic Gaussian points `scale * N(0, I)` in 3D.
    pub fn gaussian<R: Rng>(n: usize, scale: f64, rng: &mut R) -> Self {
        let points = (0..n)
            .map(|_| {
                let g: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
                Vec3::new(g[0], g[1], g[2]) * scale
            })
            .collect();
        Self { dim: 3, points }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec3> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<Vec3> {
        self.points
    }

    /// Replace positions without re-validating. Callers keep `dim` consistent.
    pub(crate) fn with_points(&self, points: Vec<Vec3>) -> Self {
        debug_assert_eq!(points.len(), self.points.len());
        Self {
            dim: self.dim,
            points,
        }
    }

    /// Largest per-point Euclidean displacement between two clouds of equal size.
    pub fn max_displacement(&self, other: &PointCloud) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub(crate) fn check_same_shape(&self, other: &PointCloud) -> Result<()> {
        if self.dim != other.dim || self.len() != other.len() {
            return Err(LjlError::DimensionMismatch(format!(
                "clouds differ in shape: {}x{} vs {}x{}",
                self.len(),
                self.dim,
                other.len(),
                other.dim
            )));
        }
        Ok(())
    }
}

/// Random unit vector in the first `dim` axes.
pub(crate) fn random_unit<R: Rng>(dim: usize, rng: &mut R) -> Vec3 {
    loop {
        let mut v = Vec3::zeros();
        for c in 0..dim {
            v[c] = StandardNormal.sample(rng);
        }
        let n = v.norm();
        if n > 1e-9 {
            return v / n;
        }
    }
}

/// splitmix64 finalizer, used to derive independent stream seeds.
pub(crate) fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F).rotate_left(17);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
