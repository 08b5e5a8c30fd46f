//! Triangle meshes, surface projection and point/mesh file formats.

mod bvh;
pub mod io;
mod mesh;

pub use mesh::{closest_point_on_triangle, noise_score, Projection, TriangleMesh, MIN_FACE_AREA};

use crate::cloud::Vec3;

/// Anything points can be projected onto.
pub trait Surface: Sync {
    fn closest(&self, q: &Vec3) -> Vec3;

    fn distance(&self, q: &Vec3) -> f64 {
        (q - self.closest(q)).norm()
    }
}

impl<S: Surface + ?Sized> Surface for &S {
    fn closest(&self, q: &Vec3) -> Vec3 {
        (**self).closest(q)
    }

    fn distance(&self, q: &Vec3) -> f64 {
        (**self).distance(q)
    }
}

impl Surface for TriangleMesh {
    fn closest(&self, q: &Vec3) -> Vec3 {
        self.closest_point(q).point
    }

    fn distance(&self, q: &Vec3) -> f64 {
        self.closest_point(q).distance
    }
}

/// Analytic sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

impl Sphere {
    pub fn unit() -> Self {
        Self {
            center: Vec3::zeros(),
            radius: 1.0,
        }
    }
}

impl Surface for Sphere {
    fn closest(&self, q: &Vec3) -> Vec3 {
        let d = q - self.center;
        let n = d.norm();
        if n < 1e-12 {
            // Every surface point is equally close to the center.
            return self.center + Vec3::z() * self.radius;
        }
        self.center + d * (self.radius / n)
    }

    fn distance(&self, q: &Vec3) -> f64 {
        ((q - self.center).norm() - self.radius).abs()
    }
}
