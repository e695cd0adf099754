use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use super::edge_sets::EdgeSets;
use super::mesh::Mesh;
use crate::{Error, Result};

/// How far the skeleton `Γ` extends beyond the thin skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkeletonPolicy {
    /// `Γ = Σ*`.
    Thin,
    /// Edges of all triangles within `k` adjacency hops of a triangle
    /// touching `Σ*`.
    Layers(usize),
    /// `Σ*` together with every edge of `∂Ω`.
    WithExternalBoundary,
}

impl fmt::Display for SkeletonPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Thin => write!(f, "thin"),
            Self::Layers(k) => write!(f, "layers:{k}"),
            Self::WithExternalBoundary => write!(f, "with-boundary"),
        }
    }
}

impl FromStr for SkeletonPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thin" => Ok(Self::Thin),
            "with-boundary" | "with-external-boundary" => Ok(Self::WithExternalBoundary),
            _ => {
                let k = s
                    .strip_prefix("layers:")
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown skeleton policy {s:?}")))?;
                let k: i64 = k
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad layer count in {s:?}")))?;
                if k < 0 {
                    return Err(Error::InvalidArgument(format!("layer count must be >= 0, got {k}")));
                }
                Ok(Self::Layers(k as usize))
            }
        }
    }
}

/// The skeleton `Γ`, its per-subdomain parts `Γ_j = Γ ∩ E_j` and the layout
/// of the multi-trace space (blocks ordered by subdomain, entries by edge id).
#[derive(Debug, Clone)]
pub struct Skeleton {
    policy: SkeletonPolicy,
    gamma: Vec<usize>,
    gamma_index: Vec<Option<usize>>,
    gamma_j: Vec<Vec<usize>>,
    offsets: Vec<usize>,
}

impl Skeleton {
    pub fn new(edge_sets: &EdgeSets, mesh: &Mesh, policy: SkeletonPolicy) -> Self {
        let ne = mesh.num_edges();
        let mut in_gamma = vec![false; ne];
        for &e in edge_sets.thin_skeleton() {
            in_gamma[e] = true;
        }
        match policy {
            SkeletonPolicy::Thin => {}
            SkeletonPolicy::WithExternalBoundary => {
                for &e in mesh.boundary_edges() {
                    in_gamma[e] = true;
                }
            }
            SkeletonPolicy::Layers(k) => {
                let mut dist = vec![usize::MAX; mesh.num_triangles()];
                let mut queue = VecDeque::new();
                for &e in edge_sets.thin_skeleton() {
                    for &t in mesh.edge_triangles(e) {
                        if dist[t] == usize::MAX {
                            dist[t] = 0;
                            queue.push_back(t);
                        }
                    }
                }
                while let Some(t) = queue.pop_front() {
                    if dist[t] == k {
                        continue;
                    }
                    for s in mesh.triangle_neighbors(t) {
                        if dist[s] == usize::MAX {
                            dist[s] = dist[t] + 1;
                            queue.push_back(s);
                        }
                    }
                }
                for (t, &d) in dist.iter().enumerate() {
                    if d <= k {
                        for e in mesh.triangle_edges(t) {
                            in_gamma[e] = true;
                        }
                    }
                }
            }
        }
        let gamma: Vec<usize> = (0..ne).filter(|&e| in_gamma[e]).collect();
        let mut gamma_index = vec![None; ne];
        for (i, &e) in gamma.iter().enumerate() {
            gamma_index[e] = Some(i);
        }
        let gamma_j: Vec<Vec<usize>> = (0..edge_sets.count())
            .map(|j| edge_sets.local_edges(j).iter().copied().filter(|&e| in_gamma[e]).collect())
            .collect();
        let mut offsets = vec![0];
        for g in &gamma_j {
            offsets.push(offsets.last().unwrap() + g.len());
        }
        Self {
            policy,
            gamma,
            gamma_index,
            gamma_j,
            offsets,
        }
    }

    pub fn policy(&self) -> SkeletonPolicy {
        self.policy
    }

    /// Sorted global edge ids of `Γ`.
    pub fn gamma(&self) -> &[usize] {
        &self.gamma
    }

    /// Position of global edge `e` in `Γ`.
    pub fn gamma_index(&self, e: usize) -> Option<usize> {
        self.gamma_index[e]
    }

    /// Sorted global edge ids of `Γ_j`.
    pub fn gamma_j(&self, j: usize) -> &[usize] {
        &self.gamma_j[j]
    }

    pub fn count(&self) -> usize {
        self.gamma_j.len()
    }

    /// Start of each block in the multi-trace vector; `offsets[J] = n_sys`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn block_range(&self, j: usize) -> std::ops::Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    /// `Σ_j #Γ_j`.
    pub fn n_sys(&self) -> usize {
        *self.offsets.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_partition::mesh::tests::unit_square;
    use crate::mesh_partition::partition::Partition;

    fn split_square() -> (Mesh, EdgeSets) {
        let m = unit_square();
        let p = Partition::from_labels(vec![1, 2], 2).unwrap();
        let es = EdgeSets::new(&m, &p);
        (m, es)
    }

    #[test]
    fn thin_is_the_diagonal() {
        let (m, es) = split_square();
        let s = Skeleton::new(&es, &m, SkeletonPolicy::Thin);
        assert_eq!(s.gamma(), es.thin_skeleton());
        assert_eq!(s.n_sys(), 2);
    }

    #[test]
    fn zero_layers_take_all_incident_triangles() {
        let (m, es) = split_square();
        let s = Skeleton::new(&es, &m, SkeletonPolicy::Layers(0));
        assert_eq!(s.gamma(), &[0, 1, 2, 3, 4]);
        assert_eq!(s.n_sys(), 6);
    }

    #[test]
    fn external_boundary_completes_the_square() {
        let (m, es) = split_square();
        let s = Skeleton::new(&es, &m, SkeletonPolicy::WithExternalBoundary);
        assert_eq!(s.gamma().len(), 5);
        assert_eq!(s.gamma_j(0).len(), 3);
        assert_eq!(s.block_range(1), 3..6);
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("thin".parse::<SkeletonPolicy>().unwrap(), SkeletonPolicy::Thin);
        assert_eq!("layers:2".parse::<SkeletonPolicy>().unwrap(), SkeletonPolicy::Layers(2));
        assert!("layers:-1".parse::<SkeletonPolicy>().is_err());
        assert!("thick".parse::<SkeletonPolicy>().is_err());
        assert_eq!(SkeletonPolicy::Layers(3).to_string(), "layers:3");
    }
}
