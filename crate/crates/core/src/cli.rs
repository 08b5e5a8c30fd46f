//! `ljl` command-line frontend.
//!
//! Every command prints one JSON line to stdout holding the effective
//! parameters and key scores. Exit codes: 0 success, 1 I/O failure,
//! 2 invalid command line or configuration.

use crate::analysis::{distance_score, distance_score_filtered, periodogram, radial_stats};
use crate::error::{LjlError, Result};
use crate::format::round9;
use crate::geometry::{io, noise_score, Sphere, Surface, TriangleMesh};
use crate::lj::{LjParams, Schedule};
use crate::neighbors::Metric;
use crate::pipelines::sweep::{mean_by_value, run_sweep, write_sweep_csv, SweepAxis, SweepSettings};
use crate::pipelines::{
    bluenoise_2d, compare_embed, embed_refine, project_onto, redistribute_on_mesh, sigma_prime,
    BlueNoiseConfig, Boundary, EmbedConfig, Initial, RedistributeConfig, RefineWindow, RunReport,
    ToyRefiner, ToyRefinerParams, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::PointCloud;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "ljl", version, about = "Lennard-Jones point-cloud distribution normalization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Blue-noise points on the unit square.
    Bluenoise(BlueNoiseArgs),
    /// Spread points evenly over a mesh surface.
    Redistribute(RedistributeArgs),
    /// Toy refiner with LJL steps embedded, optionally paired with a refiner-only run.
    Embed(EmbedArgs),
    /// Periodogram, radial power and anisotropy of 2D clouds.
    Analyze(AnalyzeArgs),
    /// Distance score, plus noise score against a mesh.
    Score(ScoreArgs),
    /// Sweep one embedding parameter over values and seeds.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundaryArg {
    None,
    Fixed,
    Periodic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::None => Boundary::None,
            BoundaryArg::Fixed => Boundary::Fixed,
            BoundaryArg::Periodic => Boundary::Periodic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    Periodic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxisArg {
    Ss,
    Alpha,
    Beta,
    AlphaDenoise,
}

#[derive(Debug, Args)]
struct LjArgs {
    /// sigma as a multiple of sigma'(N) [default: 1 in 2D, 5 in 3D]
    #[arg(long)]
    sigma_mult: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    epsilon: f64,
    /// Neighbors per point.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Drop the attractive term of the force.
    #[arg(long)]
    no_attraction: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl LjArgs {
    fn params(&self, n: usize, default_mult: f64) -> Result<(f64, LjParams)> {
        let mult = self.sigma_mult.unwrap_or(default_mult);
        if !(mult.is_finite() && mult > 0.0) {
            return Err(crate::error::invalid("sigma-mult", "must be positive"));
        }
        let p = LjParams::new(self.epsilon, sigma_prime(n)? * mult)?
            .with_k(self.k)
            .with_attraction(!self.no_attraction);
        p.validate()?;
        Ok((mult, p))
    }

    fn echo(&self, summary: &mut Map<String, Value>, mult: f64, p: &LjParams) {
        summary.insert("seed".into(), json!(self.seed));
        summary.insert("sigma_mult".into(), json!(round9(mult)));
        summary.insert("sigma".into(), json!(round9(p.sigma)));
        summary.insert("epsilon".into(), json!(round9(p.epsilon)));
        summary.insert("k".into(), json!(p.k));
        summary.insert("attraction".into(), json!(p.attraction));
    }
}

#[derive(Debug, Args)]
struct BlueNoiseArgs {
    #[arg(long, default_value_t = 1024)]
    n: usize,
    /// Start from this 2D XYZ file instead of uniform random points.
    #[arg(long)]
    init: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Periodic)]
    boundary: BoundaryArg,
    #[command(flatten)]
    lj: LjArgs,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run report (JSON).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MeshArgs {
    /// Triangle mesh (OBJ).
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Use the mesh as read instead of normalizing it into [-1, 1]^3.
    #[arg(long)]
    raw_mesh: bool,
}

impl MeshArgs {
    fn load(&self) -> Result<Option<TriangleMesh>> {
        let Some(path) = &self.mesh else { return Ok(None) };
        let mesh = io::read_obj(path)?;
        Ok(Some(if self.raw_mesh { mesh } else { mesh.normalized()? }))
    }

    fn echo(&self, summary: &mut Map<String, Value>) {
        summary.insert("mesh".into(), path_json(self.mesh.as_deref()));
        summary.insert("mesh_normalized".into(), json!(self.mesh.is_some() && !self.raw_mesh));
    }
}

#[derive(Debug, Args)]
struct RedistributeArgs {
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long, default_value_t = 3000)]
    n: usize,
    /// Start from this 3D XYZ file instead of uniform points in [-1, 1]^3.
    #[arg(long)]
    init: Option<PathBuf>,
    #[command(flatten)]
    lj: LjArgs,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ToyArgs {
    #[arg(long, default_value_t = 0.2)]
    lambda: f64,
    #[arg(long, default_value_t = 0.05)]
    noise0: f64,
    #[arg(long, default_value_t = 0.9)]
    decay: f64,
}

impl ToyArgs {
    fn params(&self) -> Result<ToyRefinerParams> {
        let p = ToyRefinerParams {
            lambda: self.lambda,
            noise0: self.noise0,
            decay: self.decay,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Args)]
struct EmbedArgs {
    /// Refiner target; the unit sphere when omitted.
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long, default_value_t = 2048)]
    n: usize,
    /// Start from this 3D XYZ file instead of Gaussian noise.
    #[arg(long)]
    init: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    t: usize,
    /// First LJL step [default: round(0.6 T)]
    #[arg(long)]
    ss: Option<usize>,
    /// Last LJL step [default: floor(0.95 T)]
    #[arg(long)]
    tprime: Option<usize>,
    #[command(flatten)]
    lj: LjArgs,
    #[arg(long, default_value_t = 2.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    #[command(flatten)]
    toy: ToyArgs,
    /// Also run the refiner alone and report score increments.
    #[arg(long)]
    compare: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// 2D XYZ files; periodograms are averaged over all of them.
    #[arg(long, required = true, num_args = 1..)]
    cloud: Vec<PathBuf>,
    /// Frequencies cover [-freq, freq]^2.
    #[arg(long, default_value_t = 128)]
    freq: usize,
    /// Radial power and anisotropy per radius.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Mean periodogram image.
    #[arg(long)]
    pgm: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long)]
    cloud: PathBuf,
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    metric: MetricArg,
    /// Adds the noise score and the normal-filtered distance score.
    #[command(flatten)]
    mesh: MeshArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    axis: AxisArg,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', conflicts_with = "range")]
    values: Vec<f64>,
    /// Inclusive range `start:stop:step`.
    #[arg(long)]
    range: Option<String>,
    #[arg(long, value_delimiter = ',', default_values_t = [0u64, 1, 2, 3, 4])]
    seeds: Vec<u64>,
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long, default_value_t = 2048)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    t: usize,
    #[arg(long, default_value_t = 60)]
    ss: usize,
    #[arg(long, default_value_t = 95)]
    tprime: usize,
    #[arg(long, default_value_t = 2.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    #[command(flatten)]
    toy: ToyArgs,
    /// Steps of the denoising harness.
    #[arg(long, default_value_t = 30)]
    denoise_t: usize,
    /// Jitter of the denoising harness input.
    #[arg(long, default_value_t = 0.02)]
    denoise_noise: f64,
    #[arg(long, default_value_t = 0.3)]
    denoise_alpha: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn path_json(p: Option<&Path>) -> Value {
    p.map_or(Value::Null, |p| json!(p.display().to_string()))
}

fn f9(x: f64) -> Value {
    json!(round9(x))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_report(path: Option<&Path>, report: &RunReport) -> Result<()> {
    if let Some(p) = path {
        let mut w = create(p)?;
        writeln!(w, "{}", report.to_json())?;
        w.flush()?;
    }
    Ok(())
}

fn write_cloud(path: Option<&Path>, cloud: &PointCloud) -> Result<()> {
    match path {
        Some(p) => io::write_xyz(cloud, p),
        None => Ok(()),
    }
}

fn read_cloud(path: &Path, dim: usize) -> Result<PointCloud> {
    let c = io::read_xyz(path)?;
    if c.dim() != dim {
        return Err(LjlError::DimensionMismatch(format!(
            "{} holds {}D points, expected {dim}D",
            path.display(),
            c.dim()
        )));
    }
    Ok(c)
}

fn run_bluenoise(a: &BlueNoiseArgs) -> Result<Map<String, Value>> {
    let init = match &a.init {
        Some(p) => Initial::Cloud(read_cloud(p, 2)?),
        None => Initial::Random(a.n),
    };
    let n = match &init {
        Initial::Cloud(c) => c.len(),
        Initial::Random(n) => *n,
    };
    let (mult, params) = a.lj.params(n, 1.0)?;
    let cfg = BlueNoiseConfig {
        boundary: a.boundary.into(),
        params,
        schedule: Schedule::exponential(a.alpha, a.beta)?,
        tol: a.tol,
        max_iter: a.max_iter,
        seed: a.lj.seed,
    };
    let (cloud, report) = bluenoise_2d(init, &cfg)?;
    write_cloud(a.out.as_deref(), &cloud)?;
    write_report(a.report.as_deref(), &report)?;

    let mut s = Map::new();
    s.insert("command".into(), json!("bluenoise"));
    s.insert("n".into(), json!(n));
    s.insert("init".into(), path_json(a.init.as_deref()));
    s.insert("boundary".into(), json!(cfg.boundary));
    a.lj.echo(&mut s, mult, &params);
    s.insert("alpha".into(), f9(a.alpha));
    s.insert("beta".into(), f9(a.beta));
    s.insert("tol".into(), f9(a.tol));
    s.insert("max_iter".into(), json!(a.max_iter));
    s.insert("iterations".into(), json!(report.iterations));
    s.insert("final_max_disp".into(), f9(report.final_max_disp));
    let ds = if cloud.len() >= 2 {
        f9(distance_score(&cloud, cfg.boundary.metric())?)
    } else {
        Value::Null
    };
    s.insert("distance_score".into(), ds);
    s.insert("out".into(), path_json(a.out.as_deref()));
    s.insert("report".into(), path_json(a.report.as_deref()));
    Ok(s)
}

fn run_redistribute(a: &RedistributeArgs) -> Result<Map<String, Value>> {
    let mesh = a
        .mesh
        .load()?
        .ok_or_else(|| crate::error::invalid("mesh", "redistribute needs --mesh"))?;
    let init = match &a.init {
        Some(p) => Initial::Cloud(read_cloud(p, 3)?),
        None => Initial::Random(a.n),
    };
    let n = match &init {
        Initial::Cloud(c) => c.len(),
        Initial::Random(n) => *n,
    };
    let (mult, params) = a.lj.params(n, 5.0)?;
    let cfg = RedistributeConfig {
        params,
        schedule: Schedule::exponential(a.alpha, a.beta)?,
        tol: a.tol,
        max_iter: a.max_iter,
        seed: a.lj.seed,
        ..RedistributeConfig::for_count(n, mult)?
    };
    let (cloud, report) = redistribute_on_mesh(init, &mesh, &cfg)?;
    write_cloud(a.out.as_deref(), &cloud)?;
    write_report(a.report.as_deref(), &report)?;

    let mut s = Map::new();
    s.insert("command".into(), json!("redistribute"));
    a.mesh.echo(&mut s);
    s.insert("n".into(), json!(n));
    s.insert("init".into(), path_json(a.init.as_deref()));
    a.lj.echo(&mut s, mult, &params);
    s.insert("alpha".into(), f9(a.alpha));
    s.insert("beta".into(), f9(a.beta));
    s.insert("tol".into(), f9(a.tol));
    s.insert("max_iter".into(), json!(a.max_iter));
    s.insert("theta_max".into(), f9(cfg.theta_max));
    s.insert("iterations".into(), json!(report.iterations));
    s.insert("final_max_disp".into(), f9(report.final_max_disp));
    s.insert(
        "distance_score".into(),
        json!(report.trace.distance_score.last().copied().map(round9)),
    );
    s.insert("noise_score".into(), f9(noise_score(&cloud, &mesh)?));
    s.insert("out".into(), path_json(a.out.as_deref()));
    s.insert("report".into(), path_json(a.report.as_deref()));
    Ok(s)
}

fn embed_window(t: usize, ss: Option<usize>, tprime: Option<usize>) -> Result<RefineWindow> {
    let d = RefineWindow::defaults(t)?;
    let (ds, de) = d.bounds().expect("default window is active");
    RefineWindow::new(t, ss.unwrap_or(ds), tprime.unwrap_or(de))
}

fn run_embed(a: &EmbedArgs) -> Result<Map<String, Value>> {
    let mesh = a.mesh.load()?;
    let sphere = Sphere::unit();
    let surface: &dyn Surface = match &mesh {
        Some(m) => m,
        None => &sphere,
    };
    let init = match &a.init {
        Some(p) => Initial::Cloud(read_cloud(p, 3)?),
        None => Initial::Random(a.n),
    };
    let n = match &init {
        Initial::Cloud(c) => c.len(),
        Initial::Random(n) => *n,
    };
    let (mult, params) = a.lj.params(n, 5.0)?;
    let window = embed_window(a.t, a.ss, a.tprime)?;
    let cfg = EmbedConfig {
        window,
        params,
        alpha: a.alpha,
        beta: a.beta,
        seed: a.lj.seed,
    };
    Schedule::adaptive(a.alpha, a.beta)?;
    let toy = a.toy.params()?;
    let seed = a.lj.seed;

    let mut s = Map::new();
    s.insert("command".into(), json!("embed"));
    a.mesh.echo(&mut s);
    s.insert("n".into(), json!(n));
    s.insert("init".into(), path_json(a.init.as_deref()));
    s.insert("t".into(), json!(a.t));
    let (ss, tp) = window.bounds().expect("window is active");
    s.insert("ss".into(), json!(ss));
    s.insert("tprime".into(), json!(tp));
    a.lj.echo(&mut s, mult, &params);
    s.insert("alpha".into(), f9(a.alpha));
    s.insert("beta".into(), f9(a.beta));
    s.insert("lambda".into(), f9(toy.lambda));
    s.insert("noise0".into(), f9(toy.noise0));
    s.insert("decay".into(), f9(toy.decay));
    s.insert("compare".into(), json!(a.compare));

    let (cloud, report) = if a.compare {
        let cmp = compare_embed(|| ToyRefiner::new(surface, toy, seed), init, &cfg, surface)?;
        let r = &cmp.report;
        s.insert("distance_score_base".into(), f9(r.distance_score_base));
        s.insert("distance_score_ljl".into(), f9(r.distance_score_ljl));
        s.insert("noise_score_base".into(), f9(r.noise_score_base));
        s.insert("noise_score_ljl".into(), f9(r.noise_score_ljl));
        s.insert("distance_increment".into(), f9(r.distance_increment));
        s.insert("noise_increment".into(), f9(r.noise_increment));
        s.insert("ratio".into(), json!(r.ratio.map(round9)));
        cmp.ljl
    } else {
        let mut refiner = ToyRefiner::new(surface, toy, seed)?;
        embed_refine(&mut refiner, init, &cfg, Some(surface))?
    };
    s.insert("iterations".into(), json!(report.iterations));
    s.insert("distance_score".into(), json!(report.trace.distance_score.last().copied().map(round9)));
    s.insert(
        "noise_score".into(),
        json!(report
            .trace
            .noise_score
            .as_ref()
            .and_then(|v| v.last().copied())
            .map(round9)),
    );
    write_cloud(a.out.as_deref(), &cloud)?;
    write_report(a.report.as_deref(), &report)?;
    s.insert("out".into(), path_json(a.out.as_deref()));
    s.insert("report".into(), path_json(a.report.as_deref()));
    Ok(s)
}

fn run_analyze(a: &AnalyzeArgs) -> Result<Map<String, Value>> {
    if a.freq == 0 {
        return Err(crate::error::invalid("freq", "must be at least 1"));
    }
    let mut grids = Vec::with_capacity(a.cloud.len());
    for p in &a.cloud {
        grids.push(periodogram(&read_cloud(p, 2)?, a.freq)?);
    }
    let stats = radial_stats(&grids)?;
    if let Some(p) = &a.csv {
        let mut w = create(p)?;
        stats.write_csv(&mut w)?;
        w.flush()?;
    }
    if let Some(p) = &a.pgm {
        let mut w = create(p)?;
        stats.write_pgm(&mut w)?;
        w.flush()?;
    }
    let peak = stats.peak_radius();
    let bands = stats.suppression_bands(peak);
    let mut s = Map::new();
    s.insert("command".into(), json!("analyze"));
    s.insert(
        "clouds".into(),
        json!(a.cloud.iter().map(|p| p.display().to_string()).collect::<Vec<_>>()),
    );
    s.insert("freq".into(), json!(a.freq));
    s.insert("peak_radius".into(), json!(peak));
    s.insert("peak_power".into(), f9(stats.radial_power[peak - 1]));
    s.insert("low_band".into(), json!(bands.map(|b| round9(b.0))));
    s.insert("plateau".into(), json!(bands.map(|b| round9(b.1))));
    s.insert(
        "low_over_plateau".into(),
        json!(bands.and_then(|(l, p)| (p > 0.0).then(|| round9(l / p)))),
    );
    let mean_aniso = stats.anisotropy_db.iter().sum::<f64>() / stats.anisotropy_db.len() as f64;
    s.insert("mean_anisotropy_db".into(), f9(mean_aniso));
    s.insert("csv".into(), path_json(a.csv.as_deref()));
    s.insert("pgm".into(), path_json(a.pgm.as_deref()));
    Ok(s)
}

fn run_score(a: &ScoreArgs) -> Result<Map<String, Value>> {
    let cloud = io::read_xyz(&a.cloud)?;
    let metric = match a.metric {
        MetricArg::Euclidean => Metric::Euclidean,
        MetricArg::Periodic => Metric::Periodic,
    };
    let mut s = Map::new();
    s.insert("command".into(), json!("score"));
    s.insert("cloud".into(), json!(a.cloud.display().to_string()));
    s.insert("n".into(), json!(cloud.len()));
    s.insert("dim".into(), json!(cloud.dim()));
    s.insert(
        "metric".into(),
        json!(match metric {
            Metric::Euclidean => "euclidean",
            Metric::Periodic => "periodic",
        }),
    );
    s.insert("seed".into(), json!(0));
    s.insert("distance_score".into(), f9(distance_score(&cloud, metric)?));
    a.mesh.echo(&mut s);
    if let Some(mesh) = a.mesh.load()? {
        if cloud.dim() != 3 {
            return Err(LjlError::DimensionMismatch("mesh scores need a 3D cloud".into()));
        }
        s.insert("noise_score".into(), f9(noise_score(&cloud, &mesh)?));
        let (_, normals) = project_onto(&mesh, &cloud)?;
        let theta = std::f64::consts::FRAC_PI_4;
        let filtered = match distance_score_filtered(&cloud, &normals, theta) {
            Ok(v) => f9(v),
            Err(LjlError::NoQualifiedNeighbor) => Value::Null,
            Err(e) => return Err(e),
        };
        s.insert("theta_max".into(), f9(theta));
        s.insert("distance_score_filtered".into(), filtered);
    }
    Ok(s)
}

fn parse_range(text: &str) -> Result<Vec<f64>> {
    let bad = || crate::error::invalid("range", "expected start:stop:step with step > 0");
    let parts: Vec<f64> = text
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0 && start.is_finite() && stop.is_finite()) || stop < start {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn run_sweep_cmd(a: &SweepArgs) -> Result<Map<String, Value>> {
    let values = match &a.range {
        Some(r) => parse_range(r)?,
        None => a.values.clone(),
    };
    if values.is_empty() {
        return Err(crate::error::invalid("values", "sweep needs --values or --range"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(crate::error::invalid("values", "must be finite"));
    }
    let axis = match a.axis {
        AxisArg::Ss => SweepAxis::Ss,
        AxisArg::Alpha => SweepAxis::Alpha,
        AxisArg::Beta => SweepAxis::Beta,
        AxisArg::AlphaDenoise => SweepAxis::AlphaDenoise,
    };
    if axis == SweepAxis::Ss && values.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
        return Err(crate::error::invalid("values", "ss values must be non-negative integers"));
    }
    let toy = a.toy.params()?;
    let settings = SweepSettings {
        n: a.n,
        total: a.t,
        ss: a.ss,
        t_prime: a.tprime,
        alpha: a.alpha,
        beta: a.beta,
        lambda: toy.lambda,
        noise0: toy.noise0,
        decay: toy.decay,
        denoise_total: a.denoise_t,
        denoise_noise: a.denoise_noise,
        denoise_alpha: a.denoise_alpha,
    };
    let mesh = a.mesh.load()?;
    let sphere = Sphere::unit();
    let surface: &dyn Surface = match &mesh {
        Some(m) => m,
        None => &sphere,
    };
    let rows = run_sweep(axis, &values, &a.seeds, &settings, surface)?;
    if let Some(p) = &a.csv {
        let mut w = create(p)?;
        write_sweep_csv(&rows, &mut w)?;
        w.flush()?;
    }
    let means = |f: fn(&crate::pipelines::sweep::SweepRow) -> Option<f64>| -> Value {
        json!(mean_by_value(&rows, f)
            .into_iter()
            .map(|(_, m)| m.map(round9))
            .collect::<Vec<_>>())
    };
    let mut s = Map::new();
    s.insert("command".into(), json!("sweep"));
    s.insert("axis".into(), json!(axis));
    s.insert("values".into(), json!(values.iter().map(|v| round9(*v)).collect::<Vec<_>>()));
    s.insert("seeds".into(), json!(a.seeds));
    s.insert("seed".into(), json!(a.seeds.first()));
    a.mesh.echo(&mut s);
    let mut settings_json = serde_json::to_value(settings).expect("settings serialize");
    if let Value::Object(m) = &mut settings_json {
        for v in m.values_mut() {
            if let Some(x) = v.as_f64().filter(|_| !v.is_u64()) {
                *v = f9(x);
            }
        }
    }
    s.insert("settings".into(), settings_json);
    s.insert("rows".into(), json!(rows.len()));
    s.insert("mean_distance_increment".into(), means(|r| Some(r.distance_increment)));
    s.insert("mean_noise_increment".into(), means(|r| Some(r.noise_increment)));
    s.insert("mean_ratio".into(), means(|r| r.ratio));
    s.insert("csv".into(), path_json(a.csv.as_deref()));
    Ok(s)
}

fn init_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var("LJL_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("LJL_THREADS must be a positive integer, got {raw:?}"))?;
    // A pool that already exists (repeated in-process runs) is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn exit_code(e: &LjlError) -> i32 {
    match e {
        LjlError::Io(_) | LjlError::Parse { .. } => 1,
        _ => 2,
    }
}

/// Parse `argv` (including the program name), run the command and return
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    let result = match &cli.command {
        Command::Bluenoise(a) => run_bluenoise(a),
        Command::Redistribute(a) => run_redistribute(a),
        Command::Embed(a) => run_embed(a),
        Command::Analyze(a) => run_analyze(a),
        Command::Score(a) => run_score(a),
        Command::Sweep(a) => run_sweep_cmd(a),
    };
    match result {
        Ok(summary) => {
            println!("{}", Value::Object(summary));
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
