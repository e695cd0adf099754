mod common;

use std::sync::{Arc, OnceLock};

use common::*;
use ddm_core::assembly::{energy_gram, MediumPreset};
use ddm_core::mesh_partition::{Decomposition, Partition, SkeletonPolicy};
use ddm_core::solvers::{
    coercivity_constant, dense_operator, energy_norm_error, solve, spectrum, Method, ProblemOptions, SkeletonProblem,
    SolveStatus, SolverConfig, SpectrumOf, SpectrumSummary, StopOn,
};
use ddm_core::trace_algebra::InductanceKind;
use ddm_core::{oracle, Error, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

const DESPRES: InductanceKind = InductanceKind::Despres { interface_decouple: false };

fn gmres(tol: f64) -> SolverConfig {
    SolverConfig {
        method: Method::Gmres,
        tol,
        ..SolverConfig::default()
    }
}

fn richardson(tol: f64, max_iters: usize) -> SolverConfig {
    SolverConfig {
        method: Method::Richardson,
        tol,
        max_iters,
        ..SolverConfig::default()
    }
}

fn mat_vec(m: &DMatrix<C64>, x: &[C64]) -> Vec<C64> {
    (m * DMatrix::from_column_slice(x.len(), 1, x)).iter().copied().collect()
}

fn two_triangle_problem(kind: InductanceKind) -> SkeletonProblem {
    let (mesh, d) = two_triangle_decomposition(SkeletonPolicy::Thin);
    let medium = ddm_core::assembly::Medium::homogeneous(&mesh, 1.5);
    let options = ProblemOptions {
        inductance: kind,
        ..ProblemOptions::default()
    };
    SkeletonProblem::build(&mesh, d, &medium, &plane_wave(), options).unwrap()
}

#[test]
fn richardson_on_two_triangles_reaches_the_direct_solution() {
    let problem = two_triangle_problem(DESPRES);
    let config = SolverConfig {
        stop_on: StopOn::Error,
        ..richardson(1e-8, 500)
    };
    let sol = solve(&problem, &config).unwrap();
    assert!(sol.report.converged());
    assert!(sol.report.final_error.unwrap() <= 1e-8);
    assert_eq!(sol.report.residual_history.len(), sol.report.iterations + 1);
    assert_eq!(sol.report.error_history.len(), sol.report.iterations + 1);
}

#[test]
fn richardson_steps_match_the_hand_iteration() {
    let problem = two_triangle_problem(DESPRES);
    let m = oracle::dense_skeleton_operator(&problem).unwrap();
    let r = 0.5;
    let g = &problem.rhs.g;
    let mut p = vec![C64::new(0.0, 0.0); problem.n_sys()];
    for steps in 1..=3 {
        let mp = mat_vec(&m, &p);
        p = p.iter().zip(g).zip(&mp).map(|((x, gi), y)| x + r * (gi - y)).collect();
        let config = SolverConfig {
            track_error: false,
            tol: 1e-300,
            ..richardson(1e-300, steps)
        };
        let sol = solve(&problem, &config).unwrap();
        assert_eq!(sol.report.iterations, steps);
        assert_eq!(sol.report.status, SolveStatus::MaxIterations);
        assert!(diff_norm(&sol.p, &p) <= 1e-12 * norm(&p));
    }
}

#[test]
fn zero_source_keeps_richardson_at_zero() {
    let case = pie_case(4, 3, MediumPreset::Homogeneous, SkeletonPolicy::Thin);
    let src = ddm_core::assembly::SourceSpec::volume(vec![[C64::new(0.0, 0.0); 2]; case.mesh.num_triangles()]);
    let options = ProblemOptions {
        reference: false,
        ..ProblemOptions::default()
    };
    let problem = SkeletonProblem::build(&case.mesh, case.decomposition.clone(), &case.medium, &src, options).unwrap();
    let config = SolverConfig {
        track_error: false,
        ..richardson(1e-8, 5)
    };
    let sol = solve(&problem, &config).unwrap();
    assert!(sol.p.iter().chain(&sol.u).all(|x| *x == C64::new(0.0, 0.0)));
}

#[test]
fn dense_composition_matches_the_operator() {
    let mut rng = rng(31);
    for case in small_cases() {
        for kind in kinds() {
            let problem = problem(&case, kind);
            let m = oracle::dense_skeleton_operator(&problem).unwrap();
            let p = random_vec(&mut rng, problem.n_sys());
            let dense = mat_vec(&m, &p);
            let fast = problem.apply_skeleton_operator(&p).unwrap();
            let composed = problem.apply_skeleton_operator_composed(&p).unwrap();
            assert!(diff_norm(&fast, &dense) <= 1e-9 * norm(&p), "{} {kind}", case.name);
            assert!(diff_norm(&composed, &dense) <= 1e-9 * norm(&p), "{} {kind}", case.name);
            let zero = problem.apply_skeleton_operator(&vec![C64::new(0.0, 0.0); p.len()]).unwrap();
            assert!(zero.iter().all(|x| *x == C64::new(0.0, 0.0)));
        }
    }
}

#[test]
fn exact_skeleton_datum_recovers_the_direct_solution() {
    for case in small_cases() {
        let problem = problem(&case, InductanceKind::SchurSubdomain);
        let m = oracle::dense_skeleton_operator(&problem).unwrap();
        let n = problem.n_sys();
        let p: Vec<C64> = m
            .full_piv_lu()
            .solve(&DMatrix::from_column_slice(n, 1, &problem.rhs.g))
            .unwrap()
            .iter()
            .copied()
            .collect();
        let (u, merged) = problem.recover_volume(&p);
        let reference = problem.reference.as_ref().unwrap();
        assert!(diff_norm(&merged, reference) <= 1e-9 * norm(reference), "{}", case.name);
        let bu = problem.decomposition.trace(&u);
        let pbu = problem.projector.project(&bu).unwrap();
        assert!(diff_norm(&pbu, &bu) <= 1e-6 * norm(&bu));
    }
}

#[test]
fn gmres_and_richardson_agree() {
    let case = pie_case(5, 3, MediumPreset::Homogeneous, SkeletonPolicy::Thin);
    let problem = problem(&case, InductanceKind::SchurSubdomain);
    let g = solve(&problem, &gmres(1e-11)).unwrap();
    let r = solve(&problem, &richardson(1e-11, 3000)).unwrap();
    assert!(g.report.converged() && r.report.converged());
    assert!(diff_norm(&g.p, &r.p) <= 1e-6);
    for report in [&g.report, &r.report] {
        assert_eq!(report.residual_history.len(), report.iterations + 1);
        assert_eq!(report.error_history.len(), report.iterations + 1);
        assert_eq!(report.pcg_iterations.len(), report.iterations + 1);
        assert!(report.final_error.unwrap() <= 1e-8);
    }
}

#[test]
fn schur_gmres_on_four_subdomains_matches_the_direct_solve() {
    let case = pie_case(8, 4, MediumPreset::Homogeneous, SkeletonPolicy::Thin);
    let problem = problem(&case, InductanceKind::SchurSubdomain);
    let sol = solve(&problem, &gmres(1e-8)).unwrap();
    assert!(sol.report.converged());
    assert!(sol.report.final_error.unwrap() <= 1e-6);
}

#[test]
fn schur_path_and_densified_path_iterate_identically() {
    let case = pie_case(4, 3, MediumPreset::FlowerDissipative, SkeletonPolicy::Thin);
    let schur = problem(&case, InductanceKind::SchurSubdomain);
    let dense = SkeletonProblem::with_inductance(
        &case.mesh,
        case.decomposition.clone(),
        &case.medium,
        &plane_wave(),
        Arc::new(schur.inductance.densified().unwrap()),
        ProblemOptions::default(),
    )
    .unwrap();
    for config in [gmres(1e-10), richardson(1e-10, 2000)] {
        let a = solve(&schur, &config).unwrap();
        let b = solve(&dense, &config).unwrap();
        assert_eq!(a.report.iterations, b.report.iterations);
        assert!(diff_norm(&a.p, &b.p) <= 1e-9 * norm(&b.p));
        for (x, y) in a.report.residual_history.iter().zip(&b.report.residual_history) {
            assert!((x - y).abs() <= 1e-9);
        }
    }
}

#[test]
fn single_subdomain_problems() {
    let case = pie_case(4, 1, MediumPreset::Homogeneous, SkeletonPolicy::Thin);
    for policy in [SkeletonPolicy::Thin, SkeletonPolicy::WithExternalBoundary] {
        let d = Arc::new(Decomposition::new(&case.mesh, Partition::single(&case.mesh), policy));
        let problem =
            SkeletonProblem::build(&case.mesh, d, &case.medium, &plane_wave(), ProblemOptions::default()).unwrap();
        let sol = solve(&problem, &gmres(1e-10)).unwrap();
        assert!(sol.report.converged());
        if policy == SkeletonPolicy::Thin {
            assert_eq!(problem.n_sys(), 0);
            assert_eq!(sol.report.iterations, 0);
        }
        assert_eq!(sol.u, sol.u_global);
        assert!(sol.report.final_error.unwrap() <= 1e-10);
    }
}

#[test]
fn energy_norm_error_examples() {
    let case = pie_case(4, 3, MediumPreset::Homogeneous, SkeletonPolicy::Thin);
    let gram = energy_gram(&case.mesh, case.medium.kappa).unwrap();
    let u = random_vec(&mut rng(32), case.mesh.num_edges());
    assert_eq!(energy_norm_error(&gram, &u, &u).unwrap(), 0.0);
    let twice: Vec<C64> = u.iter().map(|x| 2.0 * x).collect();
    assert!((energy_norm_error(&gram, &twice, &u).unwrap() - 1.0).abs() < 1e-14);
    let delta = C64::new(1e-3, -2e-3);
    let mut perturbed = u.clone();
    perturbed[7] += delta;
    let unorm = ddm_core::kernels::vector::dotc(&u, &gram.mul_vec(&u)).re.sqrt();
    let expected = (delta.norm_sqr() * gram.get(7, 7).re).sqrt() / unorm;
    assert!((energy_norm_error(&gram, &perturbed, &u).unwrap() - expected).abs() < 1e-12 * expected.max(1.0));
    let zero = vec![C64::new(0.0, 0.0); u.len()];
    assert!(energy_norm_error(&gram, &u, &zero).is_err());
}

#[test]
fn spectra_lie_in_the_punctured_disk() {
    for case in small_cases() {
        for kind in kinds() {
            let problem = problem(&case, kind);
            let ev = spectrum(&problem, SpectrumOf::SkeletonOperator).unwrap();
            let summary = SpectrumSummary::of(&ev);
            assert_eq!(summary.size, problem.n_sys());
            assert!(summary.max_dist_from_one <= 1.0 + 1e-8, "{} {kind}", case.name);
            assert!(summary.min_abs > 1e-10, "{} {kind}", case.name);
            let it = spectrum(&problem, SpectrumOf::IterationOperator).unwrap();
            assert!(it.iter().all(|l| l.norm() <= 1.0 + 1e-8));
            let alpha = coercivity_constant(&problem).unwrap();
            assert!(alpha > 0.0, "{} {kind}: alpha = {alpha}", case.name);
        }
    }
}

#[test]
fn dense_work_is_capped() {
    let case = pie_case(24, 2, MediumPreset::Homogeneous, SkeletonPolicy::Layers(100));
    let options = ProblemOptions {
        reference: false,
        ..ProblemOptions::default()
    };
    let problem = SkeletonProblem::build(&case.mesh, case.decomposition.clone(), &case.medium, &plane_wave(), options)
        .unwrap();
    assert!(problem.n_sys() > 2000);
    assert!(matches!(dense_operator(&problem), Err(Error::TooLarge { .. })));
}

#[test]
fn invalid_configurations_are_rejected() {
    let problem = two_triangle_problem(DESPRES);
    for config in [
        SolverConfig { damping: 0.0, ..SolverConfig::default() },
        SolverConfig { damping: 1.5, ..SolverConfig::default() },
        SolverConfig { restart: 0, ..SolverConfig::default() },
        SolverConfig { stop_on: StopOn::Error, ..SolverConfig::default() },
    ] {
        assert!(config.validate().is_err());
        assert!(solve(&problem, &config).is_err());
    }
}

struct Fixture {
    problems: Vec<(String, SkeletonProblem)>,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let mut problems = Vec::new();
        for case in small_cases() {
            for kind in kinds() {
                problems.push((format!("{} {kind}", case.name), problem(&case, kind)));
            }
        }
        Fixture { problems }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn skeleton_operator_is_coercive_and_bounded(seed in any::<u64>()) {
        let mut rng = rng(seed);
        for (name, problem) in &fixture().problems {
            let p = random_vec(&mut rng, problem.n_sys());
            let mp = problem.apply_skeleton_operator(&p).unwrap();
            let t = &problem.inductance;
            let np = t.norm(&p);
            prop_assert!(t.inner(&mp, &p).re >= -1e-10 * np * np, "{}", name);
            prop_assert!(t.norm(&mp) <= 2.0 * np * (1.0 + 1e-9), "{}", name);
        }
    }
}
