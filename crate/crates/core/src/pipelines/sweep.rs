//! Parameter sweeps over the refiner embedding, one CSV row per value and seed.

use super::embed::{compare_embed, EmbedConfig, RefineWindow, ToyRefiner, ToyRefinerParams};
use super::{sigma_prime, Initial};
use crate::cloud::{mix_seed, PointCloud};
use crate::error::{invalid, Result};
use crate::format::sig9;
use crate::geometry::Surface;
use crate::lj::LjParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::io::Write;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// First LJL-active step of the generation harness.
    Ss,
    /// Generation harness step scale.
    Alpha,
    /// Generation harness damping.
    Beta,
    /// Step scale of the denoising harness.
    AlphaDenoise,
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ss" => Ok(Self::Ss),
            "alpha" => Ok(Self::Alpha),
            "beta" => Ok(Self::Beta),
            "alpha_denoise" => Ok(Self::AlphaDenoise),
            other => Err(format!("unknown sweep axis {other:?}")),
        }
    }
}

/// Fixed settings shared by every run of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSettings {
    pub n: usize,
    pub total: usize,
    pub ss: usize,
    pub t_prime: usize,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub noise0: f64,
    pub decay: f64,
    /// Denoising harness: steps, input noise level.
    pub denoise_total: usize,
    pub denoise_noise: f64,
    pub denoise_alpha: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            n: 2048,
            total: 100,
            ss: 60,
            t_prime: 95,
            alpha: 2.5,
            beta: 0.01,
            lambda: 0.2,
            noise0: 0.05,
            decay: 0.9,
            denoise_total: 30,
            denoise_noise: 0.02,
            denoise_alpha: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub seed: u64,
    pub distance_score: f64,
    pub noise_score: f64,
    pub distance_increment: f64,
    pub noise_increment: f64,
    pub ratio: Option<f64>,
}

/// Noisy copy of surface samples: uniform cube points projected onto the
/// surface, then jittered by `noise * N(0, I)`.
pub fn noisy_surface_samples(surface: &dyn Surface, n: usize, noise: f64, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0xd0, 0));
    let cube = PointCloud::random_cube(n, &mut rng);
    let points = cube
        .iter()
        .map(|p| {
            let g = crate::Vec3::new(
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            );
            surface.closest(p) + g * noise
        })
        .collect();
    PointCloud::new(3, points).expect("finite samples")
}

/// One paired run (refiner only vs. LJL-embedded) for a single axis value.
pub fn sweep_point(
    axis: SweepAxis,
    value: f64,
    seed: u64,
    s: &SweepSettings,
    surface: &dyn Surface,
) -> Result<SweepRow> {
    let params = LjParams::new(2.0, 5.0 * sigma_prime(s.n)?)?;
    let (total, window, alpha, beta, toy, init) = match axis {
        SweepAxis::AlphaDenoise => {
            let toy = ToyRefinerParams {
                lambda: s.lambda,
                noise0: s.noise0,
                decay: s.decay,
            };
            let init = Initial::Cloud(noisy_surface_samples(surface, s.n, s.denoise_noise, seed));
            (s.denoise_total, RefineWindow::defaults(s.denoise_total)?, value, s.beta, toy, init)
        }
        _ => {
            let toy = ToyRefinerParams {
                lambda: s.lambda,
                noise0: s.noise0,
                decay: s.decay,
            };
            let (start, alpha, beta) = match axis {
                SweepAxis::Ss => (value, s.alpha, s.beta),
                SweepAxis::Alpha => (s.ss as f64, value, s.beta),
                _ => (s.ss as f64, s.alpha, value),
            };
            if !(start >= 0.0 && start.fract() == 0.0) {
                return Err(invalid("ss", "must be a non-negative integer"));
            }
            // SS = 0 behaves like SS = 1 (steps start at 1); SS past T' disables the layer.
            let start = (start as usize).max(1);
            let window = if start > s.t_prime {
                RefineWindow::empty(s.total)
            } else {
                RefineWindow::new(s.total, start, s.t_prime)?
            };
            (s.total, window, alpha, beta, toy, Initial::Random(s.n))
        }
    };
    let cfg = EmbedConfig {
        window,
        params,
        alpha,
        beta,
        seed,
    };
    debug_assert_eq!(cfg.window.total(), total);
    let cmp = compare_embed(|| ToyRefiner::new(surface, toy, seed), init, &cfg, surface)?;
    let r = cmp.report;
    Ok(SweepRow {
        value,
        seed,
        distance_score: r.distance_score_ljl,
        noise_score: r.noise_score_ljl,
        distance_increment: r.distance_increment,
        noise_increment: r.noise_increment,
        ratio: r.ratio,
    })
}

pub fn run_sweep(
    axis: SweepAxis,
    values: &[f64],
    seeds: &[u64],
    s: &SweepSettings,
    surface: &dyn Surface,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(invalid("values", "sweep needs at least one value"));
    }
    if seeds.is_empty() {
        return Err(invalid("seeds", "sweep needs at least one seed"));
    }
    let mut rows = Vec::with_capacity(values.len() * seeds.len());
    for &v in values {
        for &seed in seeds {
            rows.push(sweep_point(axis, v, seed, s, surface)?);
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "value,seed,distance_score,noise_score,distance_increment,noise_increment,ratio")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            sig9(r.value),
            r.seed,
            sig9(r.distance_score),
            sig9(r.noise_score),
            sig9(r.distance_increment),
            sig9(r.noise_increment),
            r.ratio.map(sig9).unwrap_or_default()
        )?;
    }
    Ok(())
}

/// Mean of a column over seeds, per distinct value, in sweep order.
pub fn mean_by_value<F: Fn(&SweepRow) -> Option<f64>>(rows: &[SweepRow], column: F) -> Vec<(f64, Option<f64>)> {
    let mut out: Vec<(f64, Vec<f64>, bool)> = Vec::new();
    for r in rows {
        let slot = match out.iter_mut().find(|(v, _, _)| *v == r.value) {
            Some(s) => s,
            None => {
                out.push((r.value, Vec::new(), true));
                out.last_mut().unwrap()
            }
        };
        match column(r) {
            Some(x) => slot.1.push(x),
            None => slot.2 = false,
        }
    }
    out.into_iter()
        .map(|(v, xs, complete)| {
            let mean = (complete && !xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
            (v, mean)
        })
        .collect()
}
