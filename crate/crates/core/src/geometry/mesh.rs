use super::bvh::Bvh;
use crate::cloud::{PointCloud, Vec3};
use crate::error::{LjlError, Result};
use rayon::prelude::*;
use std::collections::HashMap;

/// Faces at or below this area are degenerate.
pub const MIN_FACE_AREA: f64 = 1e-12;

/// Indexed triangle soup with flat per-face normals.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    face_normals: Vec<Vec3>,
    bvh: Bvh,
}

/// Closest point on a mesh to some query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub point: Vec3,
    pub face: usize,
    pub distance: f64,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.is_empty() || faces.is_empty() {
            return Err(LjlError::InvalidMesh("mesh has no faces".into()));
        }
        if let Some(v) = vertices.iter().position(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(LjlError::InvalidMesh(format!("vertex {v} is not finite")));
        }
        let mut face_normals = Vec::with_capacity(faces.len());
        for (f, tri) in faces.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&v| v >= vertices.len()) {
                return Err(LjlError::InvalidMesh(format!(
                    "face {f} references vertex {bad}, mesh has {}",
                    vertices.len()
                )));
            }
            let [a, b, c] = tri.map(|v| vertices[v]);
            let cross = (b - a).cross(&(c - a));
            let norm = cross.norm();
            if !(norm > 0.0) {
                return Err(LjlError::InvalidMesh(format!("face {f} is degenerate")));
            }
            face_normals.push(cross / norm);
        }
        let bvh = Bvh::build(&vertices, &faces);
        Ok(Self {
            vertices,
            faces,
            face_normals,
            bvh,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_normals(&self) -> &[Vec3] {
        &self.face_normals
    }

    pub fn triangle(&self, f: usize) -> [Vec3; 3] {
        self.faces[f].map(|v| self.vertices[v])
    }

    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }

    /// Uniformly scale and translate so the bounding box is centered at the
    /// origin and its longest side spans `[-1, 1]`.
    pub fn normalized(&self) -> Result<Self> {
        let (lo, hi) = self.bounds();
        let longest = (hi - lo).max();
        if !(longest > 0.0) {
            return Err(LjlError::InvalidMesh("mesh has zero extent".into()));
        }
        let center = (lo + hi) * 0.5;
        let scale = 2.0 / longest;
        let vertices: Vec<Vec3> = self.vertices.iter().map(|v| (v - center) * scale).collect();
        for (f, tri) in self.faces.iter().enumerate() {
            let [a, b, c] = tri.map(|v| vertices[v]);
            if 0.5 * (b - a).cross(&(c - a)).norm() <= MIN_FACE_AREA {
                return Err(LjlError::InvalidMesh(format!(
                    "face {f} is degenerate after normalization"
                )));
            }
        }
        Self::new(vertices, self.faces.clone())
    }

    /// Nearest point on the mesh, ties to the lowest face index.
    pub fn closest_point(&self, q: &Vec3) -> Projection {
        let (face, point, d2) = self.bvh.closest(q, &self.vertices, &self.faces);
        Projection {
            point,
            face,
            distance: d2.sqrt(),
        }
    }

    /// Reference linear scan over all faces.
    pub fn closest_point_brute(&self, q: &Vec3) -> Projection {
        let mut best: Option<(f64, usize, Vec3)> = None;
        for f in 0..self.faces.len() {
            let [a, b, c] = self.triangle(f);
            let p = closest_point_on_triangle(q, &a, &b, &c);
            let d2 = (q - p).norm_squared();
            if best.is_none_or(|(bd, _, _)| d2 < bd) {
                best = Some((d2, f, p));
            }
        }
        let (d2, face, point) = best.expect("mesh has faces");
        Projection {
            point,
            face,
            distance: d2.sqrt(),
        }
    }

    pub fn project_cloud(&self, cloud: &PointCloud) -> Vec<Projection> {
        cloud
            .points()
            .par_iter()
            .map(|q| self.closest_point(q))
            .collect()
    }

    /// Flat-shaded normal at a projection.
    pub fn point_normal(&self, proj: &Projection) -> Vec3 {
        self.face_normals[proj.face]
    }

    /// Unit icosphere with `subdivisions` rounds of 4-way splitting and
    /// outward-facing normals.
    pub fn icosphere(subdivisions: u32) -> Self {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut vertices: Vec<Vec3> = [
            [-1.0, t, 0.0],
            [1.0, t, 0.0],
            [-1.0, -t, 0.0],
            [1.0, -t, 0.0],
            [0.0, -1.0, t],
            [0.0, 1.0, t],
            [0.0, -1.0, -t],
            [0.0, 1.0, -t],
            [t, 0.0, -1.0],
            [t, 0.0, 1.0],
            [-t, 0.0, -1.0],
            [-t, 0.0, 1.0],
        ]
        .iter()
        .map(|v| Vec3::new(v[0], v[1], v[2]).normalize())
        .collect();
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
            let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vec3>| {
                let key = (a.min(b), a.max(b));
                *midpoint.entry(key).or_insert_with(|| {
                    vertices.push(((vertices[a] + vertices[b]) * 0.5).normalize());
                    vertices.len() - 1
                })
            };
            let mut next = Vec::with_capacity(faces.len() * 4);
            for [a, b, c] in faces {
                let ab = mid(a, b, &mut vertices);
                let bc = mid(b, c, &mut vertices);
                let ca = mid(c, a, &mut vertices);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            faces = next;
        }
        Self::new(vertices, faces).expect("icosphere is well formed")
    }
}

/// Closest point on the closed triangle `abc` (Ericson, Real-Time Collision
/// Detection, 5.1.5).
pub fn closest_point_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// Mean point-to-mesh distance.
pub fn noise_score(cloud: &PointCloud, mesh: &TriangleMesh) -> Result<f64> {
    if cloud.is_empty() {
        return Err(LjlError::EmptyCloud);
    }
    if cloud.dim() != 3 {
        return Err(LjlError::DimensionMismatch("noise score needs a 3D cloud".into()));
    }
    let total: f64 = mesh.project_cloud(cloud).iter().map(|p| p.distance).sum();
    Ok(total / cloud.len() as f64)
}
