use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use ddm_cli::{
    parse_omega_prime, run_solve, run_spectrum, run_sweep_command, sweep_csv, MediumSource, MeshSource,
    PartitionSource, RunSpec, SweepAxis,
};
use ddm_core::mesh_partition::SkeletonPolicy;
use ddm_core::solvers::{Method, SolverConfig, StopOn};
use ddm_core::trace_algebra::InductanceKind;

#[derive(Parser)]
#[command(name = "ddm", version, about = "Skeleton domain decomposition for 2D time-harmonic wave problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration.
    Solve(RunArgs),
    /// Iteration counts of both inductances along a parameter axis.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// nlambda, kappa or subdomains.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated increasing values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Eigenvalues of the skeleton operator.
    Spectrum(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// `disk`, `disk:R` or a mesh file.
    #[arg(long, default_value = "disk")]
    mesh: MeshSource,
    /// Points per wavelength of the generated disk mesh.
    #[arg(long, default_value_t = 20.0)]
    nlambda: f64,
    #[arg(long, default_value_t = 5.0)]
    kappa: f64,
    /// `pie:J` or a partition file.
    #[arg(long, default_value = "pie:3")]
    partition: PartitionSource,
    /// thin, layers:k or with-boundary.
    #[arg(long, default_value = "thin")]
    skeleton: SkeletonPolicy,
    /// despres, schur or schur-interface.
    #[arg(long, default_value = "despres")]
    inductance: InductanceKind,
    /// Drop couplings between different interfaces.
    #[arg(long)]
    interface_decouple: bool,
    /// Auxiliary domain of the Schur inductance: whole or layers:k.
    #[arg(long, default_value = "whole", value_parser = parse_omega_prime)]
    auxiliary: ddm_core::assembly::OmegaPrime,
    /// richardson or gmres.
    #[arg(long, default_value = "gmres")]
    solver: Method,
    #[arg(long, default_value_t = 0.5)]
    damping: f64,
    #[arg(long, default_value_t = 20)]
    restart: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    /// Stop Richardson on the relative error instead of the residual.
    #[arg(long)]
    stop_on_error: bool,
    /// homogeneous, flower-heterogeneous, flower-dissipative, flower-averaged or a JSON file.
    #[arg(long, default_value = "homogeneous")]
    medium: MediumSource,
    /// Skip the undecomposed direct solve.
    #[arg(long)]
    no_reference: bool,
    /// Also write solution.json.
    #[arg(long)]
    solution: bool,
    /// Estimate the coercivity constant from the dense operator.
    #[arg(long)]
    alpha: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn spec(&self) -> RunSpec {
        let inductance = match (self.inductance, self.interface_decouple) {
            (InductanceKind::Despres { .. }, true) => InductanceKind::Despres { interface_decouple: true },
            (InductanceKind::SchurSubdomain, true) => InductanceKind::SchurInterface,
            (kind, _) => kind,
        };
        RunSpec {
            mesh: self.mesh.clone(),
            nlambda: self.nlambda,
            kappa: self.kappa,
            partition: self.partition.clone(),
            skeleton: self.skeleton,
            inductance,
            omega_prime: self.auxiliary,
            solver: SolverConfig {
                method: self.solver,
                damping: self.damping,
                restart: self.restart,
                tol: self.tol,
                max_iters: self.max_iters,
                stop_on: if self.stop_on_error { StopOn::Error } else { StopOn::Residual },
                track_error: !self.no_reference,
            },
            medium: self.medium.clone(),
            reference: !self.no_reference,
            out: self.out.clone(),
            write_solution: self.solution,
            estimate_alpha: self.alpha,
            threads: self.threads,
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve(args) => {
            let outcome = run_solve(&args.spec())?;
            let r = &outcome.solution.report;
            print!(
                "{:?} after {} iterations, residual {:.3e}",
                r.status,
                r.iterations,
                r.residual_history.last().copied().unwrap_or(0.0)
            );
            if let Some(e) = r.final_error {
                print!(", error {e:.3e}");
            }
            if let Some(a) = outcome.alpha {
                print!(", alpha {a:.3e}");
            }
            println!();
            Ok(outcome.converged())
        }
        Command::Sweep { run, axis, values } => {
            let rows = run_sweep_command(&run.spec(), axis, &values)?;
            print!("{}", sweep_csv(&rows));
            Ok(rows.iter().all(|r| r.iters_despres.is_some() && r.iters_schur.is_some()))
        }
        Command::Spectrum(args) => {
            let outcome = run_spectrum(&args.spec())?;
            println!(
                "{} eigenvalues, min |l| {:.3e}, max |1 - l| {:.12}, alpha {:.3e}",
                outcome.summary.size, outcome.summary.min_abs, outcome.summary.max_dist_from_one, outcome.alpha
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
