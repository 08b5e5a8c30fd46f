use crate::cloud::PointCloud;
use crate::error::{LjlError, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;
use std::io::Write;

/// Anisotropy reported for zero-variance annuli.
pub const ANISOTROPY_FLOOR_DB: f64 = -100.0;

/// `P(f) = |sum_j exp(-2 pi i f . x_j)|^2 / N` on the lattice `[-F, F]^2`.
///
/// Row-major with `fy` as the slow axis. The DC bin (value `N`) is kept but
/// excluded from every statistic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Periodogram {
    pub f_max: usize,
    pub values: Vec<f64>,
}

impl Periodogram {
    pub fn side(&self) -> usize {
        2 * self.f_max + 1
    }

    pub fn get(&self, fx: i64, fy: i64) -> f64 {
        let f = self.f_max as i64;
        self.values[((fy + f) as usize) * self.side() + (fx + f) as usize]
    }

    pub fn is_dc(fx: i64, fy: i64) -> bool {
        fx == 0 && fy == 0
    }
}

pub fn periodogram(cloud: &PointCloud, f_max: usize) -> Result<Periodogram> {
    if cloud.is_empty() {
        return Err(LjlError::EmptyCloud);
    }
    if cloud.dim() != 2 {
        return Err(LjlError::DimensionMismatch("periodogram needs a 2D cloud".into()));
    }
    let side = 2 * f_max + 1;
    let n = cloud.len();
    let f = f_max as i64;
    // exp(-2 pi i f x) per point and per frequency, separable in x and y.
    let phasor = |coord: f64| -> Vec<Complex64> {
        (-f..=f)
            .map(|k| Complex64::from_polar(1.0, -TAU * (k as f64) * coord))
            .collect()
    };
    let xs: Vec<Vec<Complex64>> = cloud.points().iter().map(|p| phasor(p.x)).collect();
    let ys: Vec<Vec<Complex64>> = cloud.points().iter().map(|p| phasor(p.y)).collect();
    let values: Vec<f64> = (0..side)
        .into_par_iter()
        .flat_map_iter(|row| {
            let mut acc = vec![Complex64::new(0.0, 0.0); side];
            for (px, py) in xs.iter().zip(&ys) {
                let ey = py[row];
                for (a, ex) in acc.iter_mut().zip(px) {
                    *a += ex * ey;
                }
            }
            acc.into_iter().map(move |s| s.norm_sqr() / n as f64)
        })
        .collect();
    Ok(Periodogram { f_max, values })
}

/// Radially averaged statistics of one or more periodograms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralStats {
    pub f_max: usize,
    /// Mean periodogram over runs.
    pub grid: Vec<f64>,
    /// Index `r - 1` holds annulus radius `r`, for `r` in `1..=F`.
    pub radial_power: Vec<f64>,
    pub anisotropy_db: Vec<f64>,
    pub runs: usize,
}

pub fn radial_stats(grids: &[Periodogram]) -> Result<SpectralStats> {
    let first = grids.first().ok_or(LjlError::EmptyCloud)?;
    if grids.iter().any(|g| g.f_max != first.f_max || g.values.len() != first.values.len()) {
        return Err(LjlError::DimensionMismatch("periodograms differ in shape".into()));
    }
    let runs = grids.len();
    let mut grid = vec![0.0; first.values.len()];
    for g in grids {
        for (m, v) in grid.iter_mut().zip(&g.values) {
            *m += v;
        }
    }
    for m in &mut grid {
        *m /= runs as f64;
    }

    let f = first.f_max as i64;
    let side = first.side();
    let mut rings: Vec<Vec<f64>> = vec![Vec::new(); first.f_max];
    for fy in -f..=f {
        for fx in -f..=f {
            if Periodogram::is_dc(fx, fy) {
                continue;
            }
            let r = ((fx * fx + fy * fy) as f64).sqrt().round() as usize;
            if r >= 1 && r <= first.f_max {
                rings[r - 1].push(grid[((fy + f) as usize) * side + (fx + f) as usize]);
            }
        }
    }
    let mut radial_power = Vec::with_capacity(rings.len());
    let mut anisotropy_db = Vec::with_capacity(rings.len());
    for ring in &rings {
        let count = ring.len() as f64;
        let mean = ring.iter().sum::<f64>() / count;
        let var = ring.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
        radial_power.push(mean);
        let db = if mean > 0.0 && var > 0.0 {
            10.0 * (var / (mean * mean)).log10()
        } else {
            ANISOTROPY_FLOOR_DB
        };
        anisotropy_db.push(db.max(ANISOTROPY_FLOOR_DB));
    }
    Ok(SpectralStats {
        f_max: first.f_max,
        grid,
        radial_power,
        anisotropy_db,
        runs,
    })
}

impl SpectralStats {
    /// Radius of the annulus with the largest mean power.
    pub fn peak_radius(&self) -> usize {
        self.radial_power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i + 1)
            .unwrap_or(1)
    }

    /// Mean radial power over radii `lo..=hi`, clipped to `1..=F`.
    pub fn band_mean(&self, lo: usize, hi: usize) -> Option<f64> {
        let lo = lo.max(1);
        let hi = hi.min(self.f_max);
        (lo <= hi).then(|| self.radial_power[lo - 1..hi].iter().sum::<f64>() / (hi - lo + 1) as f64)
    }

    /// `(low, plateau)`: mean power over `1..=floor(r/2)` and over
    /// `ceil(1.5 r)..=floor(2.5 r)` for a peak radius `r`.
    pub fn suppression_bands(&self, peak: usize) -> Option<(f64, f64)> {
        let low = self.band_mean(1, peak / 2)?;
        let plateau = self.band_mean((3 * peak).div_ceil(2), (5 * peak) / 2)?;
        Some((low, plateau))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        use crate::format::sig9;
        writeln!(w, "radius,radial_power,anisotropy_db")?;
        for (i, (p, a)) in self.radial_power.iter().zip(&self.anisotropy_db).enumerate() {
            writeln!(w, "{},{},{}", i + 1, sig9(*p), sig9(*a))?;
        }
        Ok(())
    }

    /// 8-bit ASCII PGM of the mean grid, `log(1 + P)` scaled to the largest
    /// non-DC bin. DC saturates at 255.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let side = 2 * self.f_max + 1;
        let dc = self.f_max * side + self.f_max;
        let peak = self
            .grid
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != dc)
            .map(|(_, v)| v.ln_1p())
            .fold(0.0, f64::max);
        writeln!(w, "P2\n{side} {side}\n255")?;
        for row in 0..side {
            let line: Vec<String> = (0..side)
                .map(|col| {
                    let i = row * side + col;
                    let level = if i == dc || peak <= 0.0 {
                        255.0
                    } else {
                        (self.grid[i].ln_1p() / peak * 255.0).round().clamp(0.0, 255.0)
                    };
                    (level as u8).to_string()
                })
                .collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_point_is_flat() {
        let c = PointCloud::from_xy(&[[0.3141, 0.2718]]).unwrap();
        let p = periodogram(&c, 8).unwrap();
        for v in &p.values {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn regular_grid_lattice_peaks() {
        // 4x4 grid: power N at multiples of 4 along both axes, zero elsewhere.
        let m = 4usize;
        let pts: Vec<[f64; 2]> = (0..m * m)
            .map(|i| [(i % m) as f64 / m as f64 + 0.1, (i / m) as f64 / m as f64 + 0.05])
            .collect();
        let c = PointCloud::from_xy(&pts).unwrap();
        let p = periodogram(&c, 9).unwrap();
        for fy in -9i64..=9 {
            for fx in -9i64..=9 {
                let expected = if fx % 4 == 0 && fy % 4 == 0 { 16.0 } else { 0.0 };
                assert_abs_diff_eq!(p.get(fx, fy), expected, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn constant_grid_stats() {
        let g = Periodogram { f_max: 6, values: vec![2.5; 13 * 13] };
        let s = radial_stats(&[g.clone()]).unwrap();
        assert_eq!(s.radial_power.len(), 6);
        for (p, a) in s.radial_power.iter().zip(&s.anisotropy_db) {
            assert_abs_diff_eq!(*p, 2.5, epsilon = 1e-12);
            assert_eq!(*a, ANISOTROPY_FLOOR_DB);
        }
        let three = radial_stats(&[g.clone(), g.clone(), g.clone()]).unwrap();
        assert_eq!(three.radial_power, s.radial_power);
        assert_eq!(three.runs, 3);
    }

    #[test]
    fn stats_reject_bad_input() {
        assert!(radial_stats(&[]).is_err());
        let a = Periodogram { f_max: 2, values: vec![1.0; 25] };
        let b = Periodogram { f_max: 3, values: vec![1.0; 49] };
        assert!(radial_stats(&[a, b]).is_err());
    }

    #[test]
    fn radially_symmetric_grid_hits_floor() {
        let f = 10i64;
        let side = 21usize;
        let mut values = vec![0.0; side * side];
        for fy in -f..=f {
            for fx in -f..=f {
                let r = ((fx * fx + fy * fy) as f64).sqrt().round();
                values[((fy + f) as usize) * side + (fx + f) as usize] = 1.0 + 0.37 * r;
            }
        }
        let s = radial_stats(&[Periodogram { f_max: 10, values }]).unwrap();
        assert!(s.anisotropy_db.iter().all(|&a| a == ANISOTROPY_FLOOR_DB));
        assert_abs_diff_eq!(s.radial_power[2], 1.0 + 0.37 * 3.0, epsilon = 1e-12);
    }

    #[test]
    fn bands_and_outputs() {
        let mut power: Vec<f64> = vec![0.1; 40];
        power[9] = 3.0;
        let s = SpectralStats {
            f_max: 40,
            grid: vec![1.0; 81 * 81],
            radial_power: power,
            anisotropy_db: vec![-3.0; 40],
            runs: 1,
        };
        assert_eq!(s.peak_radius(), 10);
        let (low, plateau) = s.suppression_bands(10).unwrap();
        assert_abs_diff_eq!(low, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(plateau, 0.1, epsilon = 1e-12);
        assert!(s.suppression_bands(1).is_none());

        let mut csv = Vec::new();
        s.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("radius,radial_power,anisotropy_db\n1,0.1,-3\n"));
        assert_eq!(text.lines().count(), 41);

        let mut pgm = Vec::new();
        s.write_pgm(&mut pgm).unwrap();
        let text = String::from_utf8(pgm).unwrap();
        assert!(text.starts_with("P2\n81 81\n255\n"));
        assert_eq!(text.lines().count(), 3 + 81);
    }
}
