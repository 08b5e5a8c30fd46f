//! Bounding-volume hierarchy for closest-point queries.
//!
//! Nodes are pruned only when their box is strictly farther than the current
//! best, and candidates compare by `(squared distance, face)`, so the winner
//! is the same face a linear scan picks.

use super::mesh::closest_point_on_triangle;
use crate::cloud::Vec3;

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
struct Node {
    lo: Vec3,
    hi: Vec3,
    /// Leaf: range into `order`. Inner: `start` is the right child, left is `self + 1`.
    start: usize,
    count: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Bvh {
    nodes: Vec<Node>,
    order: Vec<usize>,
}

impl Bvh {
    pub(crate) fn build(vertices: &[Vec3], faces: &[[usize; 3]]) -> Self {
        let centroids: Vec<Vec3> = faces
            .iter()
            .map(|t| (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0)
            .collect();
        let mut bvh = Bvh {
            nodes: Vec::with_capacity(2 * faces.len() / LEAF_SIZE + 1),
            order: (0..faces.len()).collect(),
        };
        bvh.split(0, faces.len(), vertices, faces, &centroids);
        bvh
    }

    fn split(
        &mut self,
        start: usize,
        end: usize,
        vertices: &[Vec3],
        faces: &[[usize; 3]],
        centroids: &[Vec3],
    ) -> usize {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        let mut clo = lo;
        let mut chi = hi;
        for &f in &self.order[start..end] {
            for &v in &faces[f] {
                lo = lo.inf(&vertices[v]);
                hi = hi.sup(&vertices[v]);
            }
            clo = clo.inf(&centroids[f]);
            chi = chi.sup(&centroids[f]);
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            lo,
            hi,
            start,
            count: end - start,
        });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let extent = chi - clo;
        let axis = extent.imax();
        let mid = (start + end) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centroids[a][axis]
                .total_cmp(&centroids[b][axis])
                .then(a.cmp(&b))
        });
        self.split(start, mid, vertices, faces, centroids);
        let right = self.split(mid, end, vertices, faces, centroids);
        self.nodes[id].start = right;
        self.nodes[id].count = 0;
        id
    }

    fn box_distance2(node: &Node, q: &Vec3) -> f64 {
        let mut d2 = 0.0;
        for a in 0..3 {
            let v = q[a];
            let gap = if v < node.lo[a] {
                node.lo[a] - v
            } else if v > node.hi[a] {
                v - node.hi[a]
            } else {
                0.0
            };
            d2 += gap * gap;
        }
        d2
    }

    /// Returns `(face, point, squared distance)`.
    pub(crate) fn closest(&self, q: &Vec3, vertices: &[Vec3], faces: &[[usize; 3]]) -> (usize, Vec3, f64) {
        let mut best = (usize::MAX, Vec3::zeros(), f64::INFINITY);
        let mut stack: Vec<(usize, f64)> = Vec::with_capacity(64);
        stack.push((0, Self::box_distance2(&self.nodes[0], q)));
        while let Some((id, bound)) = stack.pop() {
            // Box distances are a lower bound; equality must still be visited
            // because a tied face with a lower index may live there.
            if bound > best.2 * (1.0 + 1e-12) + 1e-300 {
                continue;
            }
            let node = &self.nodes[id];
            if node.count > 0 {
                for &f in &self.order[node.start..node.start + node.count] {
                    let [a, b, c] = faces[f].map(|v| vertices[v]);
                    let p = closest_point_on_triangle(q, &a, &b, &c);
                    let d2 = (q - p).norm_squared();
                    if d2 < best.2 || (d2 == best.2 && f < best.0) {
                        best = (f, p, d2);
                    }
                }
            } else {
                let left = id + 1;
                let right = node.start;
                let dl = Self::box_distance2(&self.nodes[left], q);
                let dr = Self::box_distance2(&self.nodes[right], q);
                // Push the farther child first so the nearer one is explored first.
                if dl <= dr {
                    stack.push((right, dr));
                    stack.push((left, dl));
                } else {
                    stack.push((left, dl));
                    stack.push((right, dr));
                }
            }
        }
        best
    }
}
