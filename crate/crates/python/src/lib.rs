//! Python bindings. Point clouds cross the boundary as lists of `[x, y]` or
//! `[x, y, z]` rows.

use ljl::analysis::{self, SpectralStats};
use ljl::geometry::{self, io, Sphere, Surface, TriangleMesh};
use ljl::pipelines::{self, Boundary, Initial, RunReport};
use ljl::{LjlError, Metric, PointCloud, Schedule, Vec3};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: LjlError) -> PyErr {
    match e {
        LjlError::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_cloud(rows: Vec<Vec<f64>>) -> PyResult<PointCloud> {
    let dim = rows.first().map_or(3, Vec::len);
    if rows.iter().any(|r| r.len() != dim) || !(dim == 2 || dim == 3) {
        return Err(PyValueError::new_err("points must all be [x, y] or all [x, y, z]"));
    }
    let pts = rows
        .iter()
        .map(|r| Vec3::new(r[0], r[1], r.get(2).copied().unwrap_or(0.0)))
        .collect();
    PointCloud::new(dim, pts).map_err(err)
}

fn from_cloud(c: &PointCloud) -> Vec<Vec<f64>> {
    c.iter()
        .map(|p| if c.dim() == 2 { vec![p.x, p.y] } else { vec![p.x, p.y, p.z] })
        .collect()
}

fn metric(name: &str) -> PyResult<Metric> {
    match name {
        "euclidean" => Ok(Metric::Euclidean),
        "periodic" => Ok(Metric::Periodic),
        other => Err(PyValueError::new_err(format!("unknown metric {other:?}"))),
    }
}

fn report_dict<'py>(py: Python<'py>, r: &RunReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("iterations", r.iterations)?;
    d.set_item("final_max_disp", r.final_max_disp)?;
    d.set_item("seed", r.seed)?;
    d.set_item("distance_score", r.trace.distance_score.clone())?;
    d.set_item("noise_score", r.trace.noise_score.clone())?;
    Ok(d)
}

/// Lennard-Jones parameters.
#[pyclass(name = "LjParams", module = "pyljl", from_py_object)]
#[derive(Clone)]
struct PyLjParams {
    inner: ljl::LjParams,
}

#[pymethods]
impl PyLjParams {
    #[new]
    #[pyo3(signature = (epsilon = 2.0, sigma = 1.0, k = 1, attraction = true))]
    fn new(epsilon: f64, sigma: f64, k: usize, attraction: bool) -> PyResult<Self> {
        let inner = ljl::LjParams::new(epsilon, sigma)
            .map_err(err)?
            .with_k(k)
            .with_attraction(attraction);
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn attraction(&self) -> bool {
        self.inner.attraction
    }

    fn potential(&self, r: f64) -> PyResult<f64> {
        ljl::lj_potential(r, &self.inner).map_err(err)
    }

    fn force(&self, r: f64) -> PyResult<f64> {
        ljl::lj_force(r, &self.inner).map_err(err)
    }

    /// Distance with the force evaluated, i.e. clamped to `[0.9, 100] sigma`.
    fn clamp(&self, r: f64) -> f64 {
        ljl::clamp_distance(r, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "LjParams(epsilon={}, sigma={}, k={}, attraction={})",
            self.inner.epsilon,
            self.inner.sigma,
            self.inner.k,
            if self.inner.attraction { "True" } else { "False" }
        )
    }
}

/// Triangle mesh with closest-point queries.
#[pyclass(name = "Mesh", module = "pyljl", frozen)]
struct PyMesh {
    inner: TriangleMesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    fn new(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> PyResult<Self> {
        let v = vertices.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect();
        Ok(Self {
            inner: TriangleMesh::new(v, faces).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_obj(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: io::read_obj(path).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (subdivisions = 3))]
    fn icosphere(subdivisions: u32) -> Self {
        Self {
            inner: TriangleMesh::icosphere(subdivisions),
        }
    }

    /// Copy scaled and centered into `[-1, 1]^3`.
    fn normalized(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.normalized().map_err(err)?,
        })
    }

    #[getter]
    fn face_count(&self) -> usize {
        self.inner.faces().len()
    }

    /// `(point, face, distance)` of the closest surface point.
    fn closest_point(&self, q: [f64; 3]) -> ([f64; 3], usize, f64) {
        let p = self.inner.closest_point(&Vec3::new(q[0], q[1], q[2]));
        ([p.point.x, p.point.y, p.point.z], p.face, p.distance)
    }

    fn noise_score(&self, points: Vec<Vec<f64>>) -> PyResult<f64> {
        geometry::noise_score(&to_cloud(points)?, &self.inner).map_err(err)
    }
}

#[pyfunction]
#[pyo3(signature = (r, epsilon = 2.0, sigma = 1.0, attraction = true))]
fn lj_potential(r: f64, epsilon: f64, sigma: f64, attraction: bool) -> PyResult<f64> {
    let p = ljl::LjParams::new(epsilon, sigma).map_err(err)?.with_attraction(attraction);
    ljl::lj_potential(r, &p).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, epsilon = 2.0, sigma = 1.0, attraction = true))]
fn lj_force(r: f64, epsilon: f64, sigma: f64, attraction: bool) -> PyResult<f64> {
    let p = ljl::LjParams::new(epsilon, sigma).map_err(err)?.with_attraction(attraction);
    ljl::lj_force(r, &p).map_err(err)
}

#[pyfunction]
fn sigma_prime(n: usize) -> PyResult<f64> {
    pipelines::sigma_prime(n).map_err(err)
}

/// One simultaneous LJL step with each point paired to its `k` nearest
/// neighbors.
#[pyfunction]
#[pyo3(signature = (points, dt, params = None, metric = "euclidean", seed = 0))]
fn ljl_step(points: Vec<Vec<f64>>, dt: f64, params: Option<PyLjParams>, metric: &str, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let cloud = to_cloud(points)?;
    let p = params.map_or_else(ljl::LjParams::default, |p| p.inner);
    let m = self::metric(metric)?;
    let index = ljl::SpatialIndex::build(&cloud, m).map_err(err)?;
    let pairs = ljl::PairAssignment::k_nearest(&index, p.k).map_err(err)?;
    let out = ljl::ljl_step(&cloud, &pairs, dt, &p, m, seed).map_err(err)?;
    Ok(from_cloud(&out))
}

#[pyfunction]
#[pyo3(signature = (n = 1024, boundary = "periodic", sigma_mult = 1.0, epsilon = 2.0, alpha = 0.5, beta = 0.01, tol = pipelines::DEFAULT_TOL, max_iter = pipelines::DEFAULT_MAX_ITER, seed = 0, init = None))]
#[allow(clippy::too_many_arguments)]
fn bluenoise<'py>(
    py: Python<'py>,
    n: usize,
    boundary: &str,
    sigma_mult: f64,
    epsilon: f64,
    alpha: f64,
    beta: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
    init: Option<Vec<Vec<f64>>>,
) -> PyResult<(Vec<Vec<f64>>, Bound<'py, PyDict>)> {
    let boundary = match boundary {
        "none" => Boundary::None,
        "fixed" => Boundary::Fixed,
        "periodic" => Boundary::Periodic,
        other => return Err(PyValueError::new_err(format!("unknown boundary {other:?}"))),
    };
    let init = match init {
        Some(rows) => Initial::Cloud(to_cloud(rows)?),
        None => Initial::Random(n),
    };
    let count = match &init {
        Initial::Cloud(c) => c.len(),
        Initial::Random(n) => *n,
    };
    let base = pipelines::BlueNoiseConfig::for_count(count, sigma_mult).map_err(err)?;
    let cfg = pipelines::BlueNoiseConfig {
        boundary,
        params: ljl::LjParams::new(epsilon, base.params.sigma).map_err(err)?,
        schedule: Schedule::exponential(alpha, beta).map_err(err)?,
        tol,
        max_iter,
        seed,
    };
    let (cloud, report) = py.detach(|| pipelines::bluenoise_2d(init, &cfg)).map_err(err)?;
    Ok((from_cloud(&cloud), report_dict(py, &report)?))
}

#[pyfunction]
#[pyo3(signature = (mesh, n = 3000, sigma_mult = 5.0, epsilon = 2.0, alpha = 0.5, beta = 0.01, tol = pipelines::DEFAULT_TOL, max_iter = pipelines::DEFAULT_MAX_ITER, seed = 0, init = None))]
#[allow(clippy::too_many_arguments)]
fn redistribute<'py>(
    py: Python<'py>,
    mesh: &PyMesh,
    n: usize,
    sigma_mult: f64,
    epsilon: f64,
    alpha: f64,
    beta: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
    init: Option<Vec<Vec<f64>>>,
) -> PyResult<(Vec<Vec<f64>>, Bound<'py, PyDict>)> {
    let init = match init {
        Some(rows) => Initial::Cloud(to_cloud(rows)?),
        None => Initial::Random(n),
    };
    let count = match &init {
        Initial::Cloud(c) => c.len(),
        Initial::Random(n) => *n,
    };
    let base = pipelines::RedistributeConfig::for_count(count, sigma_mult).map_err(err)?;
    let cfg = pipelines::RedistributeConfig {
        params: ljl::LjParams::new(epsilon, base.params.sigma).map_err(err)?,
        schedule: Schedule::exponential(alpha, beta).map_err(err)?,
        tol,
        max_iter,
        seed,
        ..base
    };
    let (cloud, report) = py
        .detach(|| pipelines::redistribute_on_mesh(init, &mesh.inner, &cfg))
        .map_err(err)?;
    Ok((from_cloud(&cloud), report_dict(py, &report)?))
}

/// Toy refiner pulled toward `mesh` (the unit sphere when omitted) with LJL
/// steps embedded in `ss..=tprime`. With `compare`, the returned dict also
/// holds the refiner-only baseline and the score increments.
#[pyfunction]
#[pyo3(signature = (n = 2048, t = 100, ss = None, tprime = None, alpha = 2.5, beta = 0.01, seed = 0, mesh = None, compare = false, lam = 0.2, noise0 = 0.05, decay = 0.9))]
#[allow(clippy::too_many_arguments)]
fn embed<'py>(
    py: Python<'py>,
    n: usize,
    t: usize,
    ss: Option<usize>,
    tprime: Option<usize>,
    alpha: f64,
    beta: f64,
    seed: u64,
    mesh: Option<&PyMesh>,
    compare: bool,
    lam: f64,
    noise0: f64,
    decay: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let defaults = pipelines::RefineWindow::defaults(t).map_err(err)?;
    let (ds, de) = defaults.bounds().expect("default window is active");
    let window = pipelines::RefineWindow::new(t, ss.unwrap_or(ds), tprime.unwrap_or(de)).map_err(err)?;
    let cfg = pipelines::EmbedConfig {
        window,
        seed,
        ..pipelines::EmbedConfig::for_count(n, t, alpha, beta).map_err(err)?
    };
    let toy = pipelines::ToyRefinerParams {
        lambda: lam,
        noise0,
        decay,
    };
    toy.validate().map_err(err)?;
    let sphere = Sphere::unit();
    let surface: &dyn Surface = match mesh {
        Some(m) => &m.inner,
        None => &sphere,
    };
    let d = PyDict::new(py);
    if compare {
        let cmp = py
            .detach(|| {
                pipelines::compare_embed(
                    || pipelines::ToyRefiner::new(surface, toy, seed),
                    Initial::Random(n),
                    &cfg,
                    surface,
                )
            })
            .map_err(err)?;
        let r = &cmp.report;
        d.set_item("points", from_cloud(&cmp.ljl.0))?;
        d.set_item("report", report_dict(py, &cmp.ljl.1)?)?;
        d.set_item("base_points", from_cloud(&cmp.base.0))?;
        d.set_item("distance_score_base", r.distance_score_base)?;
        d.set_item("distance_score_ljl", r.distance_score_ljl)?;
        d.set_item("noise_score_base", r.noise_score_base)?;
        d.set_item("noise_score_ljl", r.noise_score_ljl)?;
        d.set_item("distance_increment", r.distance_increment)?;
        d.set_item("noise_increment", r.noise_increment)?;
        d.set_item("ratio", r.ratio)?;
    } else {
        let (cloud, report) = py
            .detach(|| {
                let mut refiner = pipelines::ToyRefiner::new(surface, toy, seed)?;
                pipelines::embed_refine(&mut refiner, Initial::Random(n), &cfg, Some(surface))
            })
            .map_err(err)?;
        d.set_item("points", from_cloud(&cloud))?;
        d.set_item("report", report_dict(py, &report)?)?;
    }
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (points, metric = "euclidean"))]
fn distance_score(points: Vec<Vec<f64>>, metric: &str) -> PyResult<f64> {
    analysis::distance_score(&to_cloud(points)?, self::metric(metric)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (points, normals, theta_max = std::f64::consts::FRAC_PI_4))]
fn distance_score_filtered(points: Vec<Vec<f64>>, normals: Vec<[f64; 3]>, theta_max: f64) -> PyResult<f64> {
    let normals: Vec<Vec3> = normals.iter().map(|n| Vec3::new(n[0], n[1], n[2])).collect();
    analysis::distance_score_filtered(&to_cloud(points)?, &normals, theta_max).map_err(err)
}

/// Periodogram on `[-f_max, f_max]^2` as rows indexed by `fy + f_max`.
#[pyfunction]
#[pyo3(signature = (points, f_max = 128))]
fn periodogram(points: Vec<Vec<f64>>, f_max: usize) -> PyResult<Vec<Vec<f64>>> {
    let p = analysis::periodogram(&to_cloud(points)?, f_max).map_err(err)?;
    Ok(p.values.chunks(p.side()).map(<[f64]>::to_vec).collect())
}

fn stats_dict<'py>(py: Python<'py>, s: &SpectralStats) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let peak = s.peak_radius();
    d.set_item("f_max", s.f_max)?;
    d.set_item("runs", s.runs)?;
    d.set_item("radial_power", s.radial_power.clone())?;
    d.set_item("anisotropy_db", s.anisotropy_db.clone())?;
    d.set_item("peak_radius", peak)?;
    d.set_item("suppression_bands", s.suppression_bands(peak))?;
    Ok(d)
}

/// Radial power and anisotropy averaged over several 2D clouds.
#[pyfunction]
#[pyo3(signature = (clouds, f_max = 128))]
fn spectral_stats<'py>(py: Python<'py>, clouds: Vec<Vec<Vec<f64>>>, f_max: usize) -> PyResult<Bound<'py, PyDict>> {
    let mut grids = Vec::with_capacity(clouds.len());
    for c in clouds {
        grids.push(analysis::periodogram(&to_cloud(c)?, f_max).map_err(err)?);
    }
    let stats = analysis::radial_stats(&grids).map_err(err)?;
    stats_dict(py, &stats)
}

#[pyfunction]
fn read_xyz(path: &str) -> PyResult<Vec<Vec<f64>>> {
    Ok(from_cloud(&io::read_xyz(path).map_err(err)?))
}

#[pyfunction]
fn write_xyz(path: &str, points: Vec<Vec<f64>>) -> PyResult<()> {
    io::write_xyz(&to_cloud(points)?, path).map_err(err)
}

#[pymodule]
fn pyljl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLjParams>()?;
    m.add_class::<PyMesh>()?;
    m.add_function(wrap_pyfunction!(lj_potential, m)?)?;
    m.add_function(wrap_pyfunction!(lj_force, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_prime, m)?)?;
    m.add_function(wrap_pyfunction!(ljl_step, m)?)?;
    m.add_function(wrap_pyfunction!(bluenoise, m)?)?;
    m.add_function(wrap_pyfunction!(redistribute, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(distance_score, m)?)?;
    m.add_function(wrap_pyfunction!(distance_score_filtered, m)?)?;
    m.add_function(wrap_pyfunction!(periodogram, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_stats, m)?)?;
    m.add_function(wrap_pyfunction!(read_xyz, m)?)?;
    m.add_function(wrap_pyfunction!(write_xyz, m)?)?;
    Ok(())
}
