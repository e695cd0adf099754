use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use super::problem::SkeletonProblem;
use crate::kernels::vector::norm2;
use crate::kernels::{gmres_solve, GmresConfig, GmresStatus};
use crate::{Error, Result, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Richardson,
    Gmres,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Richardson => "richardson",
            Self::Gmres => "gmres",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "richardson" => Ok(Self::Richardson),
            "gmres" => Ok(Self::Gmres),
            _ => Err(Error::InvalidArgument(format!("unknown solver {s:?}"))),
        }
    }
}

/// Quantity compared against the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopOn {
    /// Relative residual of the skeleton system.
    Residual,
    /// Relative energy-norm error against the direct solution (Richardson only).
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub method: Method,
    /// Richardson damping `r ∈ (0, 1]`.
    pub damping: f64,
    pub restart: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub stop_on: StopOn,
    /// Record the error against the direct solution at every iteration.
    pub track_error: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Gmres,
            damping: 0.5,
            restart: 20,
            tol: 1e-8,
            max_iters: 1000,
            stop_on: StopOn::Residual,
            track_error: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidArgument(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if self.restart == 0 {
            return Err(Error::InvalidArgument("restart must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.stop_on == StopOn::Error && self.method == Method::Gmres {
            return Err(Error::Unsupported("gmres stops on the residual only".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Stagnated,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub method: Method,
    pub status: SolveStatus,
    pub iterations: usize,
    /// Relative skeleton residual, starting with the initial guess.
    pub residual_history: Vec<f64>,
    /// Relative energy error of the recovered volume field, when tracked.
    pub error_history: Vec<f64>,
    /// Projection iterations spent at each outer step.
    pub pcg_iterations: Vec<usize>,
    pub pcg_iters_max: usize,
    pub final_error: Option<f64>,
    pub wall_time: f64,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Result of an outer solve.
#[derive(Debug, Clone)]
pub struct Solution {
    pub p: Vec<C64>,
    /// Broken volume field.
    pub u: Vec<C64>,
    /// Merged global field.
    pub u_global: Vec<C64>,
    pub report: SolveReport,
}

fn volume_error(problem: &SkeletonProblem, p: &[C64]) -> Result<f64> {
    let (_, merged) = problem.recover_volume(p);
    problem.error_vs_reference(&merged)
}

pub fn solve(problem: &SkeletonProblem, config: &SolverConfig) -> Result<Solution> {
    match config.method {
        Method::Richardson => solve_richardson(problem, config),
        Method::Gmres => solve_gmres(problem, config),
    }
}

/// Damped Richardson: `p ← p + 2r(iBu − Qv)` with `u = (A − iBᵀTB)⁻¹(BᵀTp + f)`
/// and `v = (QᵀTQ)⁻¹QᵀT(p + 2iBu)`; `2(iBu − Qv)` is the skeleton residual.
pub fn solve_richardson(problem: &SkeletonProblem, config: &SolverConfig) -> Result<Solution> {
    config.validate()?;
    let start = Instant::now();
    let d = &problem.decomposition;
    let track = config.track_error || config.stop_on == StopOn::Error;
    if track && problem.reference.is_none() {
        return Err(Error::Unsupported("error tracking needs the reference solution".into()));
    }
    let g_norm = norm2(&problem.rhs.g);
    let scale = if g_norm > 0.0 { g_norm } else { 1.0 };
    let mut p = vec![C64::new(0.0, 0.0); problem.n_sys()];
    let mut residuals = Vec::new();
    let mut errors = Vec::new();
    let mut pcg = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    loop {
        problem.projector.reset_stats();
        let u = problem.scattering.solve(true, Some(&p));
        let bu = d.trace(&u);
        let w: Vec<C64> = p.iter().zip(&bu).map(|(x, y)| x + 2.0 * I * y).collect();
        let qv = d.lift(&problem.projector.project_coefficients(&w)?);
        let r: Vec<C64> = bu.iter().zip(&qv).map(|(y, z)| 2.0 * (I * y - z)).collect();
        pcg.push(problem.projector.max_iterations());
        let rel = norm2(&r) / scale;
        residuals.push(rel);
        let measured = if track {
            let e = problem.error_vs_reference(&d.merge(&u))?;
            errors.push(e);
            e
        } else {
            rel
        };
        let done = match config.stop_on {
            StopOn::Residual => rel <= config.tol,
            StopOn::Error => measured <= config.tol,
        };
        if done {
            status = SolveStatus::Converged;
            break;
        }
        if iterations >= config.max_iters {
            break;
        }
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi += config.damping * ri;
        }
        iterations += 1;
    }
    finish(problem, config, p, status, iterations, residuals, errors, pcg, start)
}

/// Restarted GMRES on `(Id + ΠS) p = b` from `p = 0`.
pub fn solve_gmres(problem: &SkeletonProblem, config: &SolverConfig) -> Result<Solution> {
    config.validate()?;
    let start = Instant::now();
    if config.track_error && problem.reference.is_none() {
        return Err(Error::Unsupported("error tracking needs the reference solution".into()));
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let apply = |p: &[C64]| -> Vec<C64> {
        problem.projector.reset_stats();
        match problem.apply_skeleton_operator(p) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                vec![C64::new(0.0, 0.0); p.len()]
            }
        }
    };
    let mut errors = Vec::new();
    let mut pcg = vec![problem.projector.last_iterations()];
    if config.track_error {
        errors.push(volume_error(problem, &vec![C64::new(0.0, 0.0); problem.n_sys()])?);
    }
    let mut observer = |_: usize, p: &[C64]| {
        pcg.push(problem.projector.max_iterations());
        if config.track_error {
            match volume_error(problem, p) {
                Ok(e) => errors.push(e),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                }
            }
        }
    };
    let gcfg = GmresConfig {
        restart: config.restart,
        tol: config.tol,
        max_iters: config.max_iters,
    };
    let out = gmres_solve(apply, &problem.rhs.b, None, gcfg, Some(&mut observer));
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let status = match out.status {
        GmresStatus::Converged => SolveStatus::Converged,
        GmresStatus::MaxIterations => SolveStatus::MaxIterations,
        GmresStatus::Stagnated => SolveStatus::Stagnated,
    };
    finish(problem, config, out.x, status, out.iterations, out.residual_history, errors, pcg, start)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    problem: &SkeletonProblem,
    config: &SolverConfig,
    p: Vec<C64>,
    status: SolveStatus,
    iterations: usize,
    residual_history: Vec<f64>,
    error_history: Vec<f64>,
    pcg_iterations: Vec<usize>,
    start: Instant,
) -> Result<Solution> {
    let (u, u_global) = problem.recover_volume(&p);
    let final_error = match &problem.reference {
        Some(_) => Some(problem.error_vs_reference(&u_global)?),
        None => None,
    };
    let report = SolveReport {
        method: config.method,
        status,
        iterations,
        residual_history,
        error_history,
        pcg_iters_max: pcg_iterations.iter().copied().max().unwrap_or(0),
        pcg_iterations,
        final_error,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok(Solution {
        p,
        u,
        u_global,
        report,
    })
}
