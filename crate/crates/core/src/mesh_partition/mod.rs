//! Meshes, partitions and the combinatorics of the decomposition: edge sets,
//! thin and thick skeletons, multiplicities and the boolean maps `R`, `Q`,
//! `B`, `B_c`.
//!
//! Vectors on the broken space `E_⊕` and on the multi-trace space `Γ_⊕` are
//! flat, with subdomain blocks stored one after another in subdomain order.

mod disk;
mod edge_sets;
mod index_map;
mod io;
mod mesh;
mod partition;
mod skeleton;

use std::ops::{AddAssign, Range};

pub use disk::{disk_mesh, rings_for};
pub use edge_sets::EdgeSets;
pub use index_map::{build_index_maps, IndexMap, MapKind, SubdomainMaps};
pub use io::{load_mesh, mesh_to_json, parse_mesh, write_mesh_json};
pub use mesh::{Mesh, Point};
pub use partition::{parse_partition, partition_from_file, partition_pie, sector_of, Partition};
pub use skeleton::{Skeleton, SkeletonPolicy};

use crate::C64;

/// Everything combinatorial about a partitioned mesh.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub partition: Partition,
    pub edge_sets: EdgeSets,
    pub skeleton: Skeleton,
    pub maps: Vec<SubdomainMaps>,
    broken_offsets: Vec<usize>,
}

impl Decomposition {
    pub fn new(mesh: &Mesh, partition: Partition, policy: SkeletonPolicy) -> Self {
        let edge_sets = EdgeSets::new(mesh, &partition);
        let skeleton = Skeleton::new(&edge_sets, mesh, policy);
        let maps = build_index_maps(&edge_sets, &skeleton);
        let mut broken_offsets = vec![0];
        for j in 0..edge_sets.count() {
            broken_offsets.push(broken_offsets[j] + edge_sets.local_edges(j).len());
        }
        Self {
            partition,
            edge_sets,
            skeleton,
            maps,
            broken_offsets,
        }
    }

    /// Number of subdomains `J`.
    pub fn count(&self) -> usize {
        self.maps.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_sets.num_edges()
    }

    /// `#Γ`.
    pub fn single_size(&self) -> usize {
        self.skeleton.gamma().len()
    }

    /// `#Γ_⊕ = n_sys`.
    pub fn n_sys(&self) -> usize {
        self.skeleton.n_sys()
    }

    /// `#E_⊕`.
    pub fn broken_size(&self) -> usize {
        *self.broken_offsets.last().unwrap()
    }

    pub fn broken_range(&self, j: usize) -> Range<usize> {
        self.broken_offsets[j]..self.broken_offsets[j + 1]
    }

    pub fn trace_range(&self, j: usize) -> Range<usize> {
        self.skeleton.block_range(j)
    }

    /// `R y`.
    pub fn restrict<T: Copy>(&self, y: &[T]) -> Vec<T> {
        self.maps.iter().flat_map(|m| m.r.apply(y)).collect()
    }

    /// `Rᵀ u`.
    pub fn restrict_transpose<T: Copy + AddAssign + Default>(&self, u: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); self.num_edges()];
        for (j, m) in self.maps.iter().enumerate() {
            m.r.apply_transpose_add(&u[self.broken_range(j)], &mut out);
        }
        out
    }

    /// `(RᵀR)⁻¹ Rᵀ u`: average of the copies of every edge.
    pub fn merge(&self, u: &[C64]) -> Vec<C64> {
        let mut out = self.restrict_transpose(u);
        for (e, v) in out.iter_mut().enumerate() {
            *v /= self.edge_sets.multiplicity(e) as f64;
        }
        out
    }

    /// `B u`.
    pub fn trace<T: Copy>(&self, u: &[T]) -> Vec<T> {
        self.maps
            .iter()
            .enumerate()
            .flat_map(|(j, m)| m.b.apply(&u[self.broken_range(j)]))
            .collect()
    }

    /// `Bᵀ p`.
    pub fn trace_transpose<T: Copy + AddAssign + Default>(&self, p: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); self.broken_size()];
        for (j, m) in self.maps.iter().enumerate() {
            let r = self.broken_range(j);
            m.b.apply_transpose_add(&p[self.trace_range(j)], &mut out[r]);
        }
        out
    }

    /// `Q v`.
    pub fn lift<T: Copy>(&self, v: &[T]) -> Vec<T> {
        self.maps.iter().flat_map(|m| m.q.apply(v)).collect()
    }

    /// `Qᵀ p`.
    pub fn lift_transpose<T: Copy + AddAssign + Default>(&self, p: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); self.single_size()];
        for (j, m) in self.maps.iter().enumerate() {
            m.q.apply_transpose_add(&p[self.trace_range(j)], &mut out);
        }
        out
    }

    /// Multiplicity `d_e` of every edge of `Γ`, in `Γ` order.
    pub fn skeleton_multiplicities(&self) -> Vec<usize> {
        self.skeleton.gamma().iter().map(|&e| self.edge_sets.multiplicity(e)).collect()
    }
}
