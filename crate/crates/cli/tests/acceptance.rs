//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use ddm_cli::{run_solve, run_sweep, MediumSource, PartitionSource, RunSpec, SweepAxis};
use ddm_core::assembly::{assemble_all_local, assemble_global, Medium, MediumPreset, PlaneWave, SourceSpec};
use ddm_core::mesh_partition::{disk_mesh, partition_pie, rings_for, Decomposition, SkeletonPolicy};
use ddm_core::solvers::{
    coercivity_constant, spectrum, Method, ProblemOptions, SkeletonProblem, SolverConfig, SpectrumOf,
    SpectrumSummary, StopOn,
};
use ddm_core::trace_algebra::InductanceKind;
use ddm_core::{oracle, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const DESPRES: InductanceKind = InductanceKind::Despres { interface_decouple: false };
const DECOUPLED: InductanceKind = InductanceKind::Despres { interface_decouple: true };
const SCHUR: InductanceKind = InductanceKind::SchurSubdomain;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
}

fn diff_norm(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn disk_spec(nlambda: f64, j: usize, kind: InductanceKind) -> RunSpec {
    RunSpec {
        nlambda,
        kappa: 5.0,
        partition: PartitionSource::Pie(j),
        inductance: kind,
        threads: Some(1),
        ..RunSpec::default()
    }
}

fn gmres(spec: RunSpec) -> RunSpec {
    RunSpec {
        solver: SolverConfig {
            method: Method::Gmres,
            restart: 20,
            tol: 1e-8,
            ..SolverConfig::default()
        },
        ..spec
    }
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    for kind in [DESPRES, SCHUR] {
        for j in [3, 6] {
            let spec = gmres(disk_spec(20.0, j, kind));
            let start = Instant::now();
            let out = run_solve(&spec).map_err(|e| e.to_string())?;
            let secs = start.elapsed().as_secs_f64();
            let r = &out.solution.report;
            let err = r.final_error.unwrap();
            check(r.converged(), || format!("{kind} J={j} did not converge"))?;
            check(err <= 1e-6, || format!("{kind} J={j}: error {err:e}"))?;
            check(secs <= 60.0, || format!("{kind} J={j}: {secs:.1} s"))?;
            notes.push(format!("{kind} J={j}: {} it, err {err:.1e}, {secs:.2} s", r.iterations));
        }
    }
    Ok(notes.join("; "))
}

struct InvariantCase {
    name: String,
    problem: SkeletonProblem,
}

fn build(mesh_rings: usize, j: usize, preset: MediumPreset, policy: SkeletonPolicy, kind: InductanceKind) -> InvariantCase {
    let mesh = disk_mesh(1.0, mesh_rings, [0.0, 0.0]).unwrap();
    let d = Arc::new(Decomposition::new(&mesh, partition_pie(&mesh, j, [0.0, 0.0]).unwrap(), policy));
    let medium = Medium::preset(&mesh, preset, 5.0);
    let options = ProblemOptions {
        inductance: kind,
        ..ProblemOptions::default()
    };
    let src = SourceSpec::plane_wave(PlaneWave::from_left());
    InvariantCase {
        name: format!("rings={mesh_rings} J={j} {preset} {policy} {kind}"),
        problem: SkeletonProblem::build(&mesh, d, &medium, &src, options).unwrap(),
    }
}

fn invariant_cases() -> Vec<InvariantCase> {
    let rings = rings_for(1.0, 5.0, 10.0);
    let mut out = Vec::new();
    for preset in [MediumPreset::Homogeneous, MediumPreset::FlowerDissipative] {
        for j in [3, 6] {
            for kind in [DESPRES, DECOUPLED, SCHUR, InductanceKind::SchurInterface] {
                out.push(build(rings, j, preset, SkeletonPolicy::Thin, kind));
            }
        }
    }
    for policy in [SkeletonPolicy::Layers(1), SkeletonPolicy::WithExternalBoundary] {
        for kind in [DESPRES, SCHUR] {
            out.push(build(rings, 4, MediumPreset::FlowerHeterogeneous, policy, kind));
        }
    }
    out
}

fn criterion_2() -> Outcome {
    let cases = invariant_cases();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut alpha_min = f64::INFINITY;
    for case in &cases {
        let pb = &case.problem;
        let t = &pb.inductance;
        let n = pb.n_sys();
        for _ in 0..100 {
            let x = random_vec(&mut rng, n);
            let pix = pb.projector.communicate(&x).map_err(|e| e.to_string())?;
            let pipix = pb.projector.communicate(&pix).map_err(|e| e.to_string())?;
            check(diff_norm(&pipix, &x) <= 1e-9 * norm(&x), || format!("{}: Π² ≠ Id", case.name))?;
            let (nx, npx) = (t.norm(&x), t.norm(&pix));
            check((npx - nx).abs() <= 1e-9 * nx, || format!("{}: Π not isometric", case.name))?;
            let (q, v) = pb.scattering.apply_s(&x);
            let nq = t.norm(&q);
            check(nq <= nx * (1.0 + 1e-10), || format!("{}: S expands", case.name))?;
            let energy = nq * nq + 4.0 * pb.scattering.dissipation(&v) - nx * nx;
            check(energy.abs() <= 1e-9 * nx * nx, || format!("{}: energy defect {energy:e}", case.name))?;
            let mx = pb.apply_skeleton_operator(&x).map_err(|e| e.to_string())?;
            let re = t.inner(&mx, &x).re;
            check(re >= -1e-10 * nx * nx, || format!("{}: Re(p, Mp)_T = {re:e}", case.name))?;
        }
        let alpha = coercivity_constant(pb).map_err(|e| e.to_string())?;
        check(alpha > 0.0, || format!("{}: alpha = {alpha:e}", case.name))?;
        alpha_min = alpha_min.min(alpha);
    }
    Ok(format!("{} cases x 100 draws, smallest alpha {alpha_min:.3e}", cases.len()))
}

fn criterion_3() -> Outcome {
    // 7 rings give 462 edges
    let rings = 7;
    let mut worst_s: f64 = 0.0;
    let mut worst_split: f64 = 0.0;
    let mut worst_disk: f64 = 0.0;
    let mut min_abs = f64::INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut count = 0;
    for preset in [MediumPreset::Homogeneous, MediumPreset::FlowerHeterogeneous] {
        for j in [3, 5] {
            for kind in [DESPRES, SCHUR] {
                let case = build(rings, j, preset, SkeletonPolicy::Thin, kind);
                let pb = &case.problem;
                check(pb.decomposition.num_edges() <= 500, || "case exceeds 500 edges".into())?;
                let s = oracle::dense_scattering(pb).map_err(|e| e.to_string())?;
                let n = pb.n_sys();
                let p = random_vec(&mut rng, n);
                let dense: Vec<C64> = (&s * DMatrix::from_column_slice(n, 1, &p)).iter().copied().collect();
                let (q, _) = pb.scattering.apply_s(&p);
                let rel = diff_norm(&q, &dense) / norm(&p);
                check(rel <= 1e-9, || format!("{}: Cayley mismatch {rel:e}", case.name))?;
                worst_s = worst_s.max(rel);
                let ev = spectrum(pb, SpectrumOf::SkeletonOperator).map_err(|e| e.to_string())?;
                let summary = SpectrumSummary::of(&ev);
                check(summary.max_dist_from_one <= 1.0 + 1e-8, || format!("{}: |1-l| too large", case.name))?;
                check(summary.min_abs > 1e-10, || format!("{}: singular operator", case.name))?;
                worst_disk = worst_disk.max(summary.max_dist_from_one);
                min_abs = min_abs.min(summary.min_abs);
                count += 1;
            }
            let mesh = disk_mesh(1.0, rings, [0.0, 0.0]).unwrap();
            let d = Decomposition::new(&mesh, partition_pie(&mesh, j, [0.0, 0.0]).unwrap(), SkeletonPolicy::Thin);
            let medium = Medium::preset(&mesh, preset, 5.0);
            let src = SourceSpec::plane_wave(PlaneWave::from_left());
            let global = assemble_global(&mesh, &medium, &src).map_err(|e| e.to_string())?;
            let locals = assemble_all_local(&mesh, &d, &medium, &src).map_err(|e| e.to_string())?;
            let ne = mesh.num_edges();
            let mut sum = DMatrix::<C64>::zeros(ne, ne);
            for (k, sys) in locals.iter().enumerate() {
                let edges = d.edge_sets.local_edges(k);
                for (r, c, v) in sys.a.triplets() {
                    sum[(edges[r], edges[c])] += v;
                }
            }
            let rel = (sum - global.a.to_dense()).camax() / global.a.max_abs();
            check(rel <= 1e-13, || format!("splitting defect {rel:e}"))?;
            worst_split = worst_split.max(rel);
        }
    }
    Ok(format!(
        "{count} cases: S defect {worst_s:.1e}, max|1-l| {worst_disk:.9}, min|l| {min_abs:.3e}, splitting {worst_split:.1e}"
    ))
}

fn criterion_4() -> Outcome {
    let base = RunSpec {
        reference: false,
        ..gmres(disk_spec(10.0, 4, DESPRES))
    };
    let rows = run_sweep(&base, SweepAxis::NLambda, &[10.0, 20.0, 40.0]).map_err(|e| e.to_string())?;
    let schur: Vec<usize> = rows.iter().map(|r| r.iters_schur.ok_or("schur run failed")).collect::<Result<_, _>>()?;
    let despres: Vec<usize> = rows
        .iter()
        .map(|r| r.iters_despres.ok_or("despres run failed"))
        .collect::<Result<_, _>>()?;
    let (lo, hi) = (*schur.iter().min().unwrap() as f64, *schur.iter().max().unwrap() as f64);
    let note = format!("schur {schur:?}, despres {despres:?}");
    check(hi <= 1.2 * lo, || format!("schur varies by more than 20%: {note}"))?;
    check(despres.windows(2).all(|w| w[1] > w[0]), || format!("despres not increasing: {note}"))?;
    Ok(note)
}

fn criterion_5() -> Outcome {
    let spec = RunSpec {
        solver: SolverConfig {
            method: Method::Richardson,
            damping: 0.5,
            tol: 1e-6,
            max_iters: 2000,
            stop_on: StopOn::Error,
            ..SolverConfig::default()
        },
        ..disk_spec(20.0, 3, SCHUR)
    };
    let out = run_solve(&spec).map_err(|e| e.to_string())?;
    let r = &out.solution.report;
    let err = r.final_error.unwrap();
    check(r.converged() && err <= 1e-6, || format!("error {err:e} after {} iterations", r.iterations))?;
    check(r.iterations <= 2000, || "too many iterations".into())?;
    let e = &r.error_history;
    let half = r.iterations / 2;
    let lag = 10.min(e.len() - 1 - half).max(1);
    for n in half..e.len() - lag {
        check(e[n + lag] < e[n], || format!("error rises between iterations {n} and {}", n + lag))?;
    }
    Ok(format!("{} iterations, error {err:.2e}", r.iterations))
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    for nlambda in [10.0, 20.0, 40.0] {
        for j in [3, 6] {
            let spec = RunSpec {
                reference: false,
                ..gmres(disk_spec(nlambda, j, DECOUPLED))
            };
            let out = run_solve(&spec).map_err(|e| e.to_string())?;
            let r = &out.solution.report;
            check(r.pcg_iterations.iter().all(|&k| k == 1), || {
                format!("N_lambda={nlambda} J={j}: pcg counts {:?}", r.pcg_iterations)
            })?;
        }
    }
    notes.push("decoupled despres: 1 pcg iteration on every call".to_string());
    let mut schur_max = 0;
    for nlambda in [10.0, 20.0, 40.0] {
        for j in [3, 4, 6, 9] {
            let spec = RunSpec {
                reference: false,
                ..gmres(disk_spec(nlambda, j, SCHUR))
            };
            let out = run_solve(&spec).map_err(|e| format!("N_lambda={nlambda} J={j}: {e}"))?;
            schur_max = schur_max.max(out.solution.report.pcg_iters_max);
        }
    }
    check(schur_max <= 500, || format!("schur pcg needs {schur_max} iterations"))?;
    notes.push(format!("schur: at most {schur_max} pcg iterations to 1e-12"));
    Ok(notes.join("; "))
}

fn criterion_7() -> Outcome {
    let mut counts = Vec::new();
    for preset in [
        MediumPreset::FlowerHeterogeneous,
        MediumPreset::FlowerAveraged,
        MediumPreset::FlowerDissipative,
    ] {
        let spec = RunSpec {
            medium: MediumSource::Preset(preset),
            reference: false,
            ..gmres(disk_spec(20.0, 9, SCHUR))
        };
        let out = run_solve(&spec).map_err(|e| e.to_string())?;
        check(out.converged(), || format!("{preset} did not converge"))?;
        counts.push((preset, out.solution.report.iterations));
    }
    let note = counts.iter().map(|(p, n)| format!("{p} {n}")).collect::<Vec<_>>().join(", ");
    let dissipative = counts[2].1;
    check(counts[..2].iter().all(|(_, n)| dissipative < *n), || format!("dissipative is not fastest: {note}"))?;
    Ok(note)
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let status = Command::new(env!("CARGO_BIN_EXE_ddm"))
            .args(["solve", "--partition", "pie:4", "--inductance", "schur", "--nlambda", "10", "--threads", "1"])
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        check(status.success(), || format!("run {k} exited with {status}"))?;
        files.push(std::fs::read(out.join("history.csv")).map_err(|e| e.to_string())?);
    }
    check(files[0] == files[1], || "history.csv differs between runs".into())?;
    Ok(format!("{} identical bytes", files[0].len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("equivalence to the direct solve", criterion_1),
        ("randomized invariants", criterion_2),
        ("dense oracles", criterion_3),
        ("mesh-robustness trend", criterion_4),
        ("richardson convergence", criterion_5),
        ("projection pcg", criterion_6),
        ("heterogeneous media", criterion_7),
        ("determinism", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("criterion {} PASS  {name} ({secs:.1} s): {note}", k + 1),
            Err(note) => {
                failed += 1;
                println!("criterion {} FAIL  {name} ({secs:.1} s): {note}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
