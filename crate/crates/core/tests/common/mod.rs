#![allow(dead_code)]

use std::sync::Arc;

use ddm_core::assembly::{Medium, MediumPreset, OmegaPrime, PlaneWave, SourceSpec};
use ddm_core::kernels::PcgConfig;
use ddm_core::mesh_partition::{disk_mesh, parse_mesh, partition_pie, Decomposition, Mesh, Partition, SkeletonPolicy};
use ddm_core::solvers::{ProblemOptions, SkeletonProblem};
use ddm_core::trace_algebra::{Inductance, InductanceKind, Projector};
use ddm_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
}

pub fn diff_norm(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Two triangles of the square `[0, 2]²` split along the diagonal.
pub fn two_triangles() -> Mesh {
    parse_mesh(r#"{"vertices": [[0,0],[2,0],[2,2],[0,2]], "triangles": [[0,1,2],[0,2,3]]}"#).unwrap()
}

pub fn two_triangle_decomposition(policy: SkeletonPolicy) -> (Mesh, Arc<Decomposition>) {
    let mesh = two_triangles();
    let p = Partition::from_labels(vec![1, 2], 2).unwrap();
    let d = Decomposition::new(&mesh, p, policy);
    (mesh, Arc::new(d))
}

/// A small configuration: mesh, decomposition and medium.
pub struct Case {
    pub name: String,
    pub mesh: Mesh,
    pub decomposition: Arc<Decomposition>,
    pub medium: Medium,
}

pub fn pie_case(rings: usize, j: usize, preset: MediumPreset, policy: SkeletonPolicy) -> Case {
    let mesh = disk_mesh(1.0, rings, [0.0, 0.0]).unwrap();
    let d = Decomposition::new(&mesh, partition_pie(&mesh, j, [0.0, 0.0]).unwrap(), policy);
    let medium = Medium::preset(&mesh, preset, 5.0);
    Case {
        name: format!("disk{rings}/pie{j}/{preset}/{policy}"),
        mesh,
        decomposition: Arc::new(d),
        medium,
    }
}

pub fn small_cases() -> Vec<Case> {
    vec![
        pie_case(4, 3, MediumPreset::Homogeneous, SkeletonPolicy::Thin),
        pie_case(5, 5, MediumPreset::FlowerHeterogeneous, SkeletonPolicy::Layers(1)),
        pie_case(4, 4, MediumPreset::FlowerDissipative, SkeletonPolicy::WithExternalBoundary),
    ]
}

pub fn kinds() -> Vec<InductanceKind> {
    vec![
        InductanceKind::Despres { interface_decouple: false },
        InductanceKind::Despres { interface_decouple: true },
        InductanceKind::SchurSubdomain,
        InductanceKind::SchurInterface,
        InductanceKind::Scalar(2.0),
    ]
}

pub fn projector(case: &Case, kind: InductanceKind) -> Projector {
    let t = Inductance::build(kind, &case.mesh, &case.decomposition, &case.medium, OmegaPrime::Whole).unwrap();
    Projector::new(case.decomposition.clone(), Arc::new(t), PcgConfig::default()).unwrap()
}

pub fn plane_wave() -> SourceSpec {
    SourceSpec::plane_wave(PlaneWave::from_left())
}

pub fn problem(case: &Case, kind: InductanceKind) -> SkeletonProblem {
    let options = ProblemOptions {
        inductance: kind,
        ..ProblemOptions::default()
    };
    SkeletonProblem::build(&case.mesh, case.decomposition.clone(), &case.medium, &plane_wave(), options).unwrap()
}
