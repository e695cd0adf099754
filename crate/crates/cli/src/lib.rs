//! Drivers behind the `ddm` command: single solves, parameter sweeps and
//! spectral diagnostics, with CSV and JSON artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use ddm_core::assembly::{Medium, MediumPreset, OmegaPrime, PlaneWave, SourceSpec};
use ddm_core::kernels::PcgConfig;
use ddm_core::mesh_partition::{
    disk_mesh, load_mesh, partition_from_file, partition_pie, rings_for, Decomposition, Mesh, SkeletonPolicy,
};
use ddm_core::solvers::{
    coercivity_constant, solve, spectrum, ProblemOptions, SkeletonProblem, Solution, SolveReport, SolverConfig,
    SpectrumOf, SpectrumSummary,
};
use ddm_core::trace_algebra::InductanceKind;
use serde::Serialize;
use serde_json::{json, Value};

/// Version of the `report.json` layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Smallest accepted number of points per wavelength.
pub const MIN_NLAMBDA: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    /// Structured disk centred at the origin, refined from `nlambda`.
    Disk { radius: f64 },
    File(PathBuf),
}

impl FromStr for MeshSource {
    type Err = anyhow::Error;

    /// `disk`, `disk:R` or a path to a mesh file.
    fn from_str(s: &str) -> Result<Self> {
        if s == "disk" {
            return Ok(Self::Disk { radius: 1.0 });
        }
        if let Some(r) = s.strip_prefix("disk:") {
            let radius: f64 = r.parse().with_context(|| format!("bad disk radius {r:?}"))?;
            if !(radius > 0.0) {
                bail!("disk radius must be positive, got {radius}");
            }
            return Ok(Self::Disk { radius });
        }
        Ok(Self::File(PathBuf::from(s)))
    }
}

impl std::fmt::Display for MeshSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Disk { radius } => write!(f, "disk:{radius}"),
            Self::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionSource {
    /// `J` equal sectors around the origin.
    Pie(usize),
    File(PathBuf),
}

impl FromStr for PartitionSource {
    type Err = anyhow::Error;

    /// `pie:J`, `file:PATH` or a path.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(j) = s.strip_prefix("pie:") {
            let j: usize = j.parse().with_context(|| format!("bad subdomain count {j:?}"))?;
            if j == 0 {
                bail!("a pie partition needs at least one sector");
            }
            return Ok(Self::Pie(j));
        }
        Ok(Self::File(PathBuf::from(s.strip_prefix("file:").unwrap_or(s))))
    }
}

impl std::fmt::Display for PartitionSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Pie(j) => write!(f, "pie:{j}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MediumSource {
    Preset(MediumPreset),
    File(PathBuf),
}

impl FromStr for MediumSource {
    type Err = anyhow::Error;

    /// A preset name or a path to a JSON coefficient file.
    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<MediumPreset>() {
            Ok(p) => Ok(Self::Preset(p)),
            Err(_) if Path::new(s).exists() || s.ends_with(".json") => Ok(Self::File(PathBuf::from(s))),
            Err(e) => Err(e.into()),
        }
    }
}

impl std::fmt::Display for MediumSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Preset(p) => write!(f, "{p}"),
            Self::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Parses `whole` or `layers:k`.
pub fn parse_omega_prime(s: &str) -> Result<OmegaPrime> {
    if s == "whole" {
        return Ok(OmegaPrime::Whole);
    }
    let k = s
        .strip_prefix("layers:")
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| anyhow!("auxiliary domain must be `whole` or `layers:k`, got {s:?}"))?;
    Ok(OmegaPrime::Layers(k))
}

/// Everything describing one run.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub mesh: MeshSource,
    /// Points per wavelength for generated meshes.
    pub nlambda: f64,
    pub kappa: f64,
    pub partition: PartitionSource,
    pub skeleton: SkeletonPolicy,
    pub inductance: InductanceKind,
    pub omega_prime: OmegaPrime,
    pub solver: SolverConfig,
    pub medium: MediumSource,
    /// Compare against the undecomposed direct solve.
    pub reference: bool,
    pub out: Option<PathBuf>,
    pub write_solution: bool,
    /// Compute the coercivity constant from the dense operator.
    pub estimate_alpha: bool,
    pub threads: Option<usize>,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            mesh: MeshSource::Disk { radius: 1.0 },
            nlambda: 20.0,
            kappa: 5.0,
            partition: PartitionSource::Pie(3),
            skeleton: SkeletonPolicy::Thin,
            inductance: InductanceKind::Despres { interface_decouple: false },
            omega_prime: OmegaPrime::Whole,
            solver: SolverConfig::default(),
            medium: MediumSource::Preset(MediumPreset::Homogeneous),
            reference: true,
            out: None,
            write_solution: false,
            estimate_alpha: false,
            threads: None,
        }
    }
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.nlambda >= MIN_NLAMBDA) {
            bail!("points per wavelength must be at least {MIN_NLAMBDA}, got {}", self.nlambda);
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            bail!("wavenumber must be positive, got {}", self.kappa);
        }
        for path in [
            match &self.mesh {
                MeshSource::File(p) => Some(p),
                _ => None,
            },
            match &self.partition {
                PartitionSource::File(p) => Some(p),
                _ => None,
            },
            match &self.medium {
                MediumSource::File(p) => Some(p),
                _ => None,
            },
        ]
        .into_iter()
        .flatten()
        {
            if !path.exists() {
                bail!("{} does not exist", path.display());
            }
        }
        if self.threads == Some(0) {
            bail!("thread count must be at least 1");
        }
        self.solver.validate()?;
        Ok(())
    }
}

/// Mesh, decomposition, medium and assembled skeleton problem of a run.
pub struct Setup {
    pub mesh: Mesh,
    pub decomposition: Arc<Decomposition>,
    pub medium: Medium,
    pub problem: SkeletonProblem,
}

fn build_mesh(spec: &RunSpec) -> Result<Mesh> {
    Ok(match &spec.mesh {
        MeshSource::Disk { radius } => disk_mesh(*radius, rings_for(*radius, spec.kappa, spec.nlambda), [0.0, 0.0])?,
        MeshSource::File(p) => load_mesh(p)?,
    })
}

/// Builds the mesh, partition and skeleton problem.
pub fn prepare(spec: &RunSpec) -> Result<Setup> {
    spec.validate()?;
    let mesh = build_mesh(spec)?;
    let partition = match &spec.partition {
        PartitionSource::Pie(j) => partition_pie(&mesh, *j, [0.0, 0.0])?,
        PartitionSource::File(p) => partition_from_file(&mesh, p)?,
    };
    let decomposition = Arc::new(Decomposition::new(&mesh, partition, spec.skeleton));
    let medium = match &spec.medium {
        MediumSource::Preset(p) => Medium::preset(&mesh, *p, spec.kappa),
        MediumSource::File(p) => Medium::load(&mesh, p)?,
    };
    let options = ProblemOptions {
        inductance: spec.inductance,
        omega_prime: spec.omega_prime,
        pcg: PcgConfig::default(),
        reference: spec.reference,
    };
    let source = SourceSpec::plane_wave(PlaneWave::from_left());
    let problem = SkeletonProblem::build(&mesh, decomposition.clone(), &medium, &source, options)?;
    Ok(Setup {
        mesh,
        decomposition,
        medium,
        problem,
    })
}

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(f))
        }
    }
}

fn solver_config(spec: &RunSpec) -> SolverConfig {
    SolverConfig {
        track_error: spec.reference,
        ..spec.solver
    }
}

/// Outcome of a single solve.
pub struct SolveOutcome {
    pub solution: Solution,
    pub alpha: Option<f64>,
    pub report: Value,
}

impl SolveOutcome {
    pub fn converged(&self) -> bool {
        self.solution.report.converged()
    }
}

/// `iter,residual,error,pcg_iters` rows of a solve.
pub fn history_csv(report: &SolveReport) -> String {
    let mut out = String::from("iter,residual,error,pcg_iters\n");
    for (k, r) in report.residual_history.iter().enumerate() {
        let e = report.error_history.get(k).map(|e| format!("{e:.15e}")).unwrap_or_default();
        let pcg = report.pcg_iterations.get(k).copied().unwrap_or(0);
        writeln!(out, "{k},{r:.15e},{e},{pcg}").unwrap();
    }
    out
}

fn mesh_stats(mesh: &Mesh, source: &MeshSource) -> Value {
    json!({
        "source": source.to_string(),
        "vertices": mesh.num_vertices(),
        "triangles": mesh.num_triangles(),
        "edges": mesh.num_edges(),
        "h_max": mesh.max_edge_length(),
        "h_mean": mesh.mean_edge_length(),
    })
}

fn run_metadata(spec: &RunSpec, setup: &Setup, command: &str) -> Value {
    let d = &setup.decomposition;
    json!({
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": command,
        "mesh": mesh_stats(&setup.mesh, &spec.mesh),
        "nlambda": spec.nlambda,
        "partition": { "source": spec.partition.to_string(), "subdomains": d.count() },
        "skeleton": { "policy": spec.skeleton.to_string(), "single_size": d.single_size(), "n_sys": d.n_sys() },
        "inductance": spec.inductance.to_string(),
        "auxiliary_domain": match spec.omega_prime {
            OmegaPrime::Whole => "whole".to_string(),
            OmegaPrime::Layers(k) => format!("layers:{k}"),
        },
        "medium": {
            "name": setup.medium.label,
            "kappa": setup.medium.kappa,
            "kappa0": setup.medium.kappa0,
        },
    })
}

/// Fields every `report.json` carries.
const REQUIRED_FIELDS: [&str; 8] = [
    "schema_version",
    "command",
    "mesh",
    "partition",
    "skeleton",
    "inductance",
    "medium",
    "result",
];

/// Checks the version and required fields of a report.
pub fn validate_report(report: &Value) -> Result<()> {
    let version = report
        .get("schema_version")
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("report has no schema_version"))?;
    if version != u64::from(REPORT_SCHEMA_VERSION) {
        bail!("unsupported report schema version {version}");
    }
    for field in REQUIRED_FIELDS {
        if report.get(field).is_none() {
            bail!("report misses field {field:?}");
        }
    }
    let result = &report["result"];
    for field in ["status", "iterations", "converged"] {
        if result.get(field).is_none() {
            bail!("report result misses field {field:?}");
        }
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn out_dir(spec: &RunSpec) -> Result<Option<&Path>> {
    match &spec.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            Ok(Some(dir.as_path()))
        }
        None => Ok(None),
    }
}

/// Solves one configuration and writes `history.csv`, `report.json` and,
/// on request, `solution.json`.
pub fn run_solve(spec: &RunSpec) -> Result<SolveOutcome> {
    with_threads(spec.threads, || -> Result<SolveOutcome> {
        let setup = prepare(spec)?;
        let solution = solve(&setup.problem, &solver_config(spec))?;
        let alpha = if spec.estimate_alpha {
            Some(coercivity_constant(&setup.problem)?)
        } else {
            None
        };
        let r = &solution.report;
        let mut report = run_metadata(spec, &setup, "solve");
        report["solver"] = serde_json::to_value(solver_config(spec))?;
        report["result"] = json!({
            "status": r.status,
            "converged": r.converged(),
            "iterations": r.iterations,
            "final_residual": r.residual_history.last(),
            "final_error": r.final_error,
            "pcg_iters_max": r.pcg_iters_max,
            "wall_time": r.wall_time,
            "alpha_estimate": alpha,
        });
        if let Some(dir) = out_dir(spec)? {
            fs::write(dir.join("history.csv"), history_csv(r))?;
            write_json(&dir.join("report.json"), &report)?;
            if spec.write_solution {
                let u = &solution.u_global;
                let sol = json!({
                    "edges": u.len(),
                    "re": u.iter().map(|v| v.re).collect::<Vec<_>>(),
                    "im": u.iter().map(|v| v.im).collect::<Vec<_>>(),
                });
                write_json(&dir.join("solution.json"), &sol)?;
            }
        }
        Ok(SolveOutcome {
            solution,
            alpha,
            report,
        })
    })?
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    NLambda,
    /// Wavenumber with `κ³h²` held fixed.
    Kappa,
    /// Subdomain count of a pie partition with the disk radius growing like `√J`.
    Subdomains,
}

impl FromStr for SweepAxis {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nlambda" => Ok(Self::NLambda),
            "kappa" => Ok(Self::Kappa),
            "subdomains" => Ok(Self::Subdomains),
            _ => bail!("sweep axis must be nlambda, kappa or subdomains, got {s:?}"),
        }
    }
}

/// One sweep row; `None` marks a failed or non-converged run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub iters_despres: Option<usize>,
    pub iters_schur: Option<usize>,
    pub pcg_max: Option<usize>,
}

/// The spec of sweep point `value`.
pub fn sweep_point(base: &RunSpec, axis: SweepAxis, value: f64) -> Result<RunSpec> {
    let mut spec = base.clone();
    spec.out = None;
    spec.write_solution = false;
    spec.estimate_alpha = false;
    match axis {
        SweepAxis::NLambda => spec.nlambda = value,
        SweepAxis::Kappa => {
            // h ∝ κ^{-3/2} keeps κ³h² fixed, so N_λ = 2π/(κh) grows like √κ
            spec.kappa = value;
            spec.nlambda = base.nlambda * (value / base.kappa).sqrt();
        }
        SweepAxis::Subdomains => {
            let (MeshSource::Disk { radius }, PartitionSource::Pie(j0)) = (&base.mesh, &base.partition) else {
                bail!("a subdomain sweep needs a disk mesh and a pie partition");
            };
            if value < 1.0 || value.fract() != 0.0 {
                bail!("subdomain counts must be positive integers, got {value}");
            }
            let j = value as usize;
            spec.partition = PartitionSource::Pie(j);
            spec.mesh = MeshSource::Disk {
                radius: radius * (j as f64 / *j0 as f64).sqrt(),
            };
        }
    }
    Ok(spec)
}

/// Iteration counts of the Després and Schur inductances along `axis`.
pub fn run_sweep(base: &RunSpec, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        bail!("sweep values must be strictly increasing");
    }
    values
        .iter()
        .map(|&value| {
            let spec = sweep_point(base, axis, value)?;
            let run = |kind: InductanceKind| {
                let s = RunSpec {
                    inductance: kind,
                    ..spec.clone()
                };
                run_solve(&s).ok().filter(SolveOutcome::converged).map(|o| o.solution.report)
            };
            let despres = run(InductanceKind::Despres { interface_decouple: false });
            let schur = run(InductanceKind::SchurSubdomain);
            let pcg_max = match (&despres, &schur) {
                (None, None) => None,
                _ => Some(despres.iter().chain(&schur).map(|r| r.pcg_iters_max).max().unwrap_or(0)),
            };
            Ok(SweepRow {
                value,
                iters_despres: despres.map(|r| r.iterations),
                iters_schur: schur.map(|r| r.iterations),
                pcg_max,
            })
        })
        .collect()
}

/// `value,iters_despres,iters_schur,pcg_max` with `NaN` for failed runs.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("value,iters_despres,iters_schur,pcg_max\n");
    let cell = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_else(|| "NaN".into());
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.value,
            cell(r.iters_despres),
            cell(r.iters_schur),
            cell(r.pcg_max)
        )
        .unwrap();
    }
    out
}

/// Runs a sweep and writes `sweep.csv` into the output directory.
pub fn run_sweep_command(base: &RunSpec, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    base.validate()?;
    let rows = run_sweep(base, axis, values)?;
    if let Some(dir) = out_dir(base)? {
        fs::write(dir.join("sweep.csv"), sweep_csv(&rows))?;
    }
    Ok(rows)
}

pub struct SpectrumOutcome {
    pub eigenvalues: Vec<num_complex::Complex64>,
    pub summary: SpectrumSummary,
    pub alpha: f64,
    pub report: Value,
}

/// `re,im` rows.
pub fn spectrum_csv(eigenvalues: &[num_complex::Complex64]) -> String {
    let mut out = String::from("re,im\n");
    for l in eigenvalues {
        writeln!(out, "{:.15e},{:.15e}", l.re, l.im).unwrap();
    }
    out
}

/// Eigenvalues of `Id + ΠS`, written to `spectrum.csv` with a summary in `report.json`.
pub fn run_spectrum(spec: &RunSpec) -> Result<SpectrumOutcome> {
    with_threads(spec.threads, || -> Result<SpectrumOutcome> {
        let spec = RunSpec {
            reference: false,
            ..spec.clone()
        };
        let setup = prepare(&spec)?;
        let eigenvalues = spectrum(&setup.problem, SpectrumOf::SkeletonOperator)?;
        let summary = SpectrumSummary::of(&eigenvalues);
        let alpha = coercivity_constant(&setup.problem)?;
        let mut report = run_metadata(&spec, &setup, "spectrum");
        report["result"] = json!({
            "status": "converged",
            "converged": true,
            "iterations": 0,
            "size": summary.size,
            "min_abs": summary.min_abs,
            "max_dist_from_one": summary.max_dist_from_one,
            "alpha_estimate": alpha,
        });
        if let Some(dir) = out_dir(&spec)? {
            fs::write(dir.join("spectrum.csv"), spectrum_csv(&eigenvalues))?;
            write_json(&dir.join("report.json"), &report)?;
        }
        Ok(SpectrumOutcome {
            eigenvalues,
            summary,
            alpha,
            report,
        })
    })?
}
