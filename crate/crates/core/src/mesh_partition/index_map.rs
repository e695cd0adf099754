use std::ops::AddAssign;

use super::edge_sets::EdgeSets;
use super::skeleton::Skeleton;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// `R_j : E → E_j`.
    Restriction,
    /// `Q_j : Γ → Γ_j`.
    SkeletonRestriction,
    /// `B_j : E_j → Γ_j`.
    Trace,
    /// `B_{j,c} : E_j → E_j ∖ Γ_j`.
    Complement,
    /// `B'_j : E'_j → Γ_j`.
    AuxiliaryTrace,
}

/// Boolean matrix with a single unit entry per row, stored as the column of
/// that entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexMap {
    domain_size: usize,
    targets: Vec<usize>,
    kind: MapKind,
}

impl IndexMap {
    pub fn new(domain_size: usize, targets: Vec<usize>, kind: MapKind) -> Self {
        debug_assert!(targets.iter().all(|&t| t < domain_size));
        Self {
            domain_size,
            targets,
            kind,
        }
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn codomain_size(&self) -> usize {
        self.targets.len()
    }

    /// Column of the unit entry of each row.
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn apply<T: Copy>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.domain_size);
        self.targets.iter().map(|&t| x[t]).collect()
    }

    /// `out += Mᵀ y`.
    pub fn apply_transpose_add<T: Copy + AddAssign>(&self, y: &[T], out: &mut [T]) {
        assert_eq!(y.len(), self.targets.len());
        assert_eq!(out.len(), self.domain_size);
        for (&t, &v) in self.targets.iter().zip(y) {
            out[t] += v;
        }
    }

    pub fn apply_transpose<T: Copy + AddAssign + Default>(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); self.domain_size];
        self.apply_transpose_add(y, &mut out);
        out
    }
}

/// The four boolean maps attached to one subdomain.
#[derive(Debug, Clone)]
pub struct SubdomainMaps {
    pub r: IndexMap,
    pub q: IndexMap,
    pub b: IndexMap,
    pub bc: IndexMap,
}

pub fn build_index_maps(edge_sets: &EdgeSets, skeleton: &Skeleton) -> Vec<SubdomainMaps> {
    (0..edge_sets.count())
        .map(|j| {
            let local = edge_sets.local_edges(j);
            let gamma_j = skeleton.gamma_j(j);
            let r = IndexMap::new(edge_sets.num_edges(), local.to_vec(), MapKind::Restriction);
            let q = IndexMap::new(
                skeleton.gamma().len(),
                gamma_j.iter().map(|&e| skeleton.gamma_index(e).unwrap()).collect(),
                MapKind::SkeletonRestriction,
            );
            let b = IndexMap::new(
                local.len(),
                gamma_j.iter().map(|&e| edge_sets.local_index(j, e).unwrap()).collect(),
                MapKind::Trace,
            );
            let bc = IndexMap::new(
                local.len(),
                (0..local.len())
                    .filter(|&i| skeleton.gamma_index(local[i]).is_none())
                    .collect(),
                MapKind::Complement,
            );
            SubdomainMaps { r, q, b, bc }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_partition::mesh::tests::unit_square;
    use crate::mesh_partition::partition::Partition;
    use crate::mesh_partition::skeleton::SkeletonPolicy;

    #[test]
    fn transpose_is_scatter_add() {
        let m = IndexMap::new(4, vec![2, 0, 2], MapKind::Restriction);
        assert_eq!(m.apply(&[1.0, 2.0, 3.0, 4.0]), vec![3.0, 1.0, 3.0]);
        assert_eq!(m.apply_transpose(&[1.0, 2.0, 5.0]), vec![2.0, 0.0, 6.0, 0.0]);
    }

    #[test]
    fn split_square_maps() {
        let mesh = unit_square();
        let p = Partition::from_labels(vec![1, 2], 2).unwrap();
        let es = EdgeSets::new(&mesh, &p);
        let sk = Skeleton::new(&es, &mesh, SkeletonPolicy::Thin);
        let maps = build_index_maps(&es, &sk);
        for m in &maps {
            assert_eq!(m.r.codomain_size(), 3);
            assert_eq!(m.q.targets(), &[0]);
            assert_eq!(m.b.codomain_size(), 1);
            assert_eq!(m.bc.codomain_size(), 2);
        }
    }
}
