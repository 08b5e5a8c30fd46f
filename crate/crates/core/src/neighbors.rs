//! Nearest-neighbor queries over a point-cloud snapshot.
//!
//! The index is a uniform grid searched in Chebyshev rings around the query
//! cell. Candidates are ranked by `(squared distance, index)`, so results are
//! identical to a linear scan, ties included.

use crate::cloud::{PointCloud, Vec3};
use crate::error::{LjlError, Result};
use std::cmp::Ordering;

/// Distance convention used for neighbor queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
    /// Minimum-image distance on the unit square. 2D only.
    Periodic,
}

impl Metric {
    /// Separation vector `a - b`, using the nearest periodic copy of `b` when periodic.
    #[inline]
    pub fn delta(self, a: &Vec3, b: &Vec3) -> Vec3 {
        let mut d = a - b;
        if self == Metric::Periodic {
            d.x -= d.x.round();
            d.y -= d.y.round();
        }
        d
    }

    #[inline]
    pub fn distance_squared(self, a: &Vec3, b: &Vec3) -> f64 {
        self.delta(a, b).norm_squared()
    }

    #[inline]
    pub fn distance(self, a: &Vec3, b: &Vec3) -> f64 {
        self.distance_squared(a, b).sqrt()
    }
}

#[inline]
fn rank(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Immutable acceleration structure over a cloud snapshot.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    metric: Metric,
    points: Vec<Vec3>,
    origin: Vec3,
    cell: f64,
    dims: [usize; 3],
    cell_start: Vec<usize>,
    items: Vec<usize>,
}

impl SpatialIndex {
    pub fn build(cloud: &PointCloud, metric: Metric) -> Result<Self> {
        if cloud.is_empty() {
            return Err(LjlError::EmptyCloud);
        }
        if metric == Metric::Periodic && cloud.dim() != 2 {
            return Err(LjlError::DimensionMismatch(
                "periodic metric is only defined on the unit square".into(),
            ));
        }
        let points = cloud.points().to_vec();
        let n = points.len();
        let axes = cloud.dim();

        let (origin, cell, dims) = match metric {
            Metric::Periodic => {
                let m = ((n as f64 / 2.0).sqrt().floor() as usize).max(1);
                (Vec3::zeros(), 1.0 / m as f64, [m, m, 1])
            }
            Metric::Euclidean => {
                let mut lo = points[0];
                let mut hi = points[0];
                for p in &points {
                    lo = lo.inf(p);
                    hi = hi.sup(p);
                }
                let extent = hi - lo;
                let live: Vec<f64> = (0..axes).map(|a| extent[a]).filter(|&e| e > 0.0).collect();
                let cell = if live.is_empty() {
                    1.0
                } else {
                    let volume: f64 = live.iter().product();
                    let target_cells = (n as f64 / 2.0).max(1.0);
                    (volume / target_cells).powf(1.0 / live.len() as f64)
                };
                let mut dims = [1usize; 3];
                for (a, d) in dims.iter_mut().enumerate().take(axes) {
                    *d = ((extent[a] / cell).floor() as usize + 1).clamp(1, 4 * n + 1);
                }
                (lo, cell, dims)
            }
        };

        let mut index = Self {
            metric,
            points,
            origin,
            cell,
            dims,
            cell_start: Vec::new(),
            items: Vec::new(),
        };
        let total = dims[0] * dims[1] * dims[2];
        let cells: Vec<usize> = index
            .points
            .iter()
            .map(|p| index.flat(index.cell_of(p)))
            .collect();
        let mut counts = vec![0usize; total + 1];
        for &c in &cells {
            counts[c + 1] += 1;
        }
        for c in 0..total {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut items = vec![0usize; n];
        for (i, &c) in cells.iter().enumerate() {
            items[fill[c]] = i;
            fill[c] += 1;
        }
        index.cell_start = counts;
        index.items = items;
        Ok(index)
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Vec3 {
        &self.points[i]
    }

    fn cell_of(&self, p: &Vec3) -> [isize; 3] {
        let mut c = [0isize; 3];
        for (a, slot) in c.iter_mut().enumerate() {
            if self.dims[a] == 1 {
                continue;
            }
            let mut x = p[a] - self.origin[a];
            if self.metric == Metric::Periodic {
                x = x.rem_euclid(1.0);
            }
            let k = (x / self.cell).floor();
            *slot = (k.max(0.0) as isize).min(self.dims[a] as isize - 1);
        }
        c
    }

    fn flat(&self, c: [isize; 3]) -> usize {
        (c[2] as usize * self.dims[1] + c[1] as usize) * self.dims[0] + c[0] as usize
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.points.len() {
            return Err(LjlError::IndexOutOfRange {
                index: i,
                len: self.points.len(),
            });
        }
        Ok(())
    }

    /// Nearest other point to point `i`; ties go to the lowest index.
    pub fn nearest(&self, i: usize) -> Result<usize> {
        self.check_index(i)?;
        if self.points.len() < 2 {
            return Err(LjlError::TooFewPoints {
                needed: 2,
                got: self.points.len(),
            });
        }
        Ok(self.search(&self.points[i], 1, Some(i), |_| true)[0].1)
    }

    /// The `k` nearest other points to `i`, ascending by `(distance, index)`.
    pub fn k_nearest(&self, i: usize, k: usize) -> Result<Vec<usize>> {
        self.check_index(i)?;
        let n = self.points.len();
        if k == 0 || k + 1 > n {
            return Err(LjlError::NeighborCount { k, n });
        }
        Ok(self
            .search(&self.points[i], k, Some(i), |_| true)
            .into_iter()
            .map(|(_, j)| j)
            .collect())
    }

    /// Nearest other point to `i` among those accepted by `accept`.
    pub fn nearest_where<F>(&self, i: usize, accept: F) -> Result<Option<usize>>
    where
        F: Fn(usize) -> bool,
    {
        self.check_index(i)?;
        Ok(self
            .search(&self.points[i], 1, Some(i), accept)
            .first()
            .map(|&(_, j)| j))
    }

    /// Ring search returning up to `k` `(squared distance, index)` pairs.
    fn search<F>(&self, q: &Vec3, k: usize, exclude: Option<usize>, accept: F) -> Vec<(f64, usize)>
    where
        F: Fn(usize) -> bool,
    {
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        let offer = |j: usize, best: &mut Vec<(f64, usize)>| {
            if Some(j) == exclude || !accept(j) {
                return;
            }
            let cand = (self.metric.distance_squared(q, &self.points[j]), j);
            if best.len() == k && rank(&cand, &best[k - 1]) != Ordering::Less {
                return;
            }
            let at = best.partition_point(|b| rank(b, &cand) == Ordering::Less);
            best.insert(at, cand);
            best.truncate(k);
        };

        let center = self.cell_of(q);
        let max_dim = *self.dims.iter().max().unwrap();
        let mut ring = 0usize;
        loop {
            if self.metric == Metric::Periodic && 2 * ring + 1 > self.dims[0] {
                // Ring would wrap onto itself; finish with a full scan.
                best.clear();
                for j in 0..self.points.len() {
                    offer(j, &mut best);
                }
                return best;
            }
            self.visit_ring(center, ring, |cell| {
                let (s, e) = (self.cell_start[cell], self.cell_start[cell + 1]);
                for &j in &self.items[s..e] {
                    offer(j, &mut best);
                }
            });
            let reach = ring as f64 * self.cell;
            if best.len() == k && best[k - 1].0 < reach * reach * (1.0 - 1e-9) {
                return best;
            }
            if self.metric == Metric::Euclidean && ring >= max_dim {
                return best;
            }
            ring += 1;
        }
    }

    fn visit_ring<F: FnMut(usize)>(&self, center: [isize; 3], ring: usize, mut f: F) {
        let r = ring as isize;
        let span = |a: usize| if self.dims[a] == 1 { 0 } else { r };
        let (rx, ry, rz) = (span(0), span(1), span(2));
        for dz in -rz..=rz {
            for dy in -ry..=ry {
                for dx in -rx..=rx {
                    if dx.abs().max(dy.abs()).max(dz.abs()) != r {
                        continue;
                    }
                    let mut c = [center[0] + dx, center[1] + dy, center[2] + dz];
                    let mut inside = true;
                    for (a, v) in c.iter_mut().enumerate() {
                        let d = self.dims[a] as isize;
                        if self.metric == Metric::Periodic {
                            *v = v.rem_euclid(d);
                        } else if *v < 0 || *v >= d {
                            inside = false;
                        }
                    }
                    if inside {
                        f(self.flat(c));
                    }
                }
            }
        }
    }
}

/// Angle between two unit normals, in radians.
#[inline]
pub fn normal_angle(a: &Vec3, b: &Vec3) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

/// Whether two normals pass the same-side test for `theta_max`.
///
/// `theta_max >= pi` accepts every pair, including antipodal normals.
#[inline]
pub fn normals_compatible(a: &Vec3, b: &Vec3, theta_max: f64) -> bool {
    theta_max >= std::f64::consts::PI || normal_angle(a, b) < theta_max
}

pub(crate) fn check_normals(cloud: &PointCloud, normals: &[Vec3], theta_max: f64) -> Result<()> {
    if normals.len() != cloud.len() {
        return Err(LjlError::DimensionMismatch(format!(
            "{} normals for {} points",
            normals.len(),
            cloud.len()
        )));
    }
    if !(theta_max > 0.0 && theta_max <= std::f64::consts::PI) {
        return Err(crate::error::invalid("theta_max", "must lie in (0, pi]"));
    }
    for (index, n) in normals.iter().enumerate() {
        let norm = n.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(LjlError::NonUnitNormal { index, norm });
        }
    }
    Ok(())
}

/// Nearest `j != i` whose normal is within `theta_max` of `normals[i]`.
///
/// Linear scan; [`SpatialIndex::nearest_where`] is the indexed equivalent.
pub fn nearest_normal_filtered(
    cloud: &PointCloud,
    normals: &[Vec3],
    i: usize,
    theta_max: f64,
) -> Result<Option<usize>> {
    check_normals(cloud, normals, theta_max)?;
    if i >= cloud.len() {
        return Err(LjlError::IndexOutOfRange {
            index: i,
            len: cloud.len(),
        });
    }
    let pts = cloud.points();
    let mut best: Option<(f64, usize)> = None;
    for j in 0..pts.len() {
        if j == i || !normals_compatible(&normals[i], &normals[j], theta_max) {
            continue;
        }
        let cand = ((pts[i] - pts[j]).norm_squared(), j);
        if best.is_none_or(|b| rank(&cand, &b) == Ordering::Less) {
            best = Some(cand);
        }
    }
    Ok(best.map(|(_, j)| j))
}
