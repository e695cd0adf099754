use std::collections::VecDeque;

use super::element::Element;
use super::medium::Medium;
use crate::kernels::{SparseMatrix, TripletBuilder};
use crate::mesh_partition::{Decomposition, IndexMap, MapKind, Mesh};
use crate::{Error, Result};

/// Després inductance `T_j` on `Γ_j`: the tangential-trace mass matrix
/// weighted by `κ/η̄`.
///
/// Tangential traces of lowest-order edge functions live on a single edge,
/// so the matrix is diagonal with entries `κ / (η̄_e L_e)`. With
/// `interface_decouple`, entries coupling edges of different classes are
/// dropped.
pub fn assemble_despres(
    j: usize,
    mesh: &Mesh,
    decomposition: &Decomposition,
    medium: &Medium,
    interface_decouple: bool,
) -> SparseMatrix {
    let gamma_j = decomposition.skeleton.gamma_j(j);
    let n = gamma_j.len();
    let mut builder = TripletBuilder::with_capacity(n, n, n);
    for (i, &e) in gamma_j.iter().enumerate() {
        let eta = medium.mean_impedance(mesh, e);
        builder.push(i, i, medium.kappa / (eta * mesh.edge_length(e)));
    }
    let t = builder.build();
    if interface_decouple {
        decouple_classes(&t, gamma_j, decomposition)
    } else {
        t
    }
}

/// Drops the entries of a `Γ_j` operator that couple different classes.
pub fn decouple_classes(t: &SparseMatrix, gamma_j: &[usize], decomposition: &Decomposition) -> SparseMatrix {
    let es = &decomposition.edge_sets;
    let mut builder = TripletBuilder::with_capacity(t.nrows(), t.ncols(), t.nnz());
    for (r, c, v) in t.triplets() {
        if es.class(gamma_j[r]) == es.class(gamma_j[c]) {
            builder.push(r, c, v);
        }
    }
    builder.build()
}

/// Which triangles make up the auxiliary domain `Ω'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaPrime {
    #[default]
    Whole,
    /// Triangles within `k` adjacency hops of a triangle touching `Γ`.
    Layers(usize),
}

/// Real coercive matrix `C_j` on `E'_j` and the trace map `B'_j : E'_j → Γ_j`.
#[derive(Debug, Clone)]
pub struct AuxiliarySystem {
    pub c: SparseMatrix,
    pub bp: IndexMap,
    /// Sorted global ids of `E'_j`.
    pub edges: Vec<usize>,
    /// Triangles of `Ω'_j`.
    pub triangles: Vec<usize>,
}

fn omega_prime_mask(mesh: &Mesh, decomposition: &Decomposition, policy: OmegaPrime) -> Vec<bool> {
    match policy {
        OmegaPrime::Whole => vec![true; mesh.num_triangles()],
        OmegaPrime::Layers(k) => {
            let mut dist = vec![usize::MAX; mesh.num_triangles()];
            let mut queue = VecDeque::new();
            for &e in decomposition.skeleton.gamma() {
                for &t in mesh.edge_triangles(e) {
                    if dist[t] == usize::MAX {
                        dist[t] = 0;
                        queue.push_back(t);
                    }
                }
            }
            while let Some(t) = queue.pop_front() {
                if dist[t] < k {
                    for s in mesh.triangle_neighbors(t) {
                        if dist[s] == usize::MAX {
                            dist[s] = dist[t] + 1;
                            queue.push_back(s);
                        }
                    }
                }
            }
            dist.iter().map(|&d| d <= k).collect()
        }
    }
}

/// Builds `C_j` from `Re μ⁻¹` curl-curl, `κ² Re ε` mass and a `Re(κ/η)`
/// boundary term on `∂Ω'_j` outside `Γ_j`, plus on `Γ_j ∩ ∂Ω`.
///
/// Boundary edges of `Ω'_j` interior to `Ω` use the mean impedance of their
/// neighbouring triangles.
pub fn assemble_auxiliary(
    j: usize,
    mesh: &Mesh,
    decomposition: &Decomposition,
    medium: &Medium,
    policy: OmegaPrime,
) -> Result<AuxiliarySystem> {
    let in_prime = omega_prime_mask(mesh, decomposition, policy);
    let triangles: Vec<usize> = decomposition
        .edge_sets
        .local_triangles(j)
        .iter()
        .copied()
        .filter(|&t| in_prime[t])
        .collect();
    let mut edges: Vec<usize> = triangles.iter().flat_map(|&t| mesh.triangle_edges(t)).collect();
    edges.sort_unstable();
    edges.dedup();
    let gamma_j = decomposition.skeleton.gamma_j(j);
    let bp_targets = gamma_j
        .iter()
        .map(|e| {
            edges.binary_search(e).map_err(|_| {
                Error::InvalidArgument(format!("auxiliary domain misses skeleton edge {e} of subdomain {j}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let n = edges.len();
    let k2 = medium.kappa * medium.kappa;
    let mut builder = TripletBuilder::with_capacity(n, n, 9 * triangles.len() + n);
    let mut owned = vec![0u8; n];
    for &t in &triangles {
        let el = Element::new(mesh, t)?;
        let curls = el.curls();
        let mass = el.mass();
        let inv_mu = (1.0 / medium.mu[t]).re;
        let eps = medium.eps[t].re;
        let ids = el.edges.map(|e| edges.binary_search(&e).unwrap());
        for k in 0..3 {
            owned[ids[k]] += 1;
            for l in 0..3 {
                builder.push(ids[k], ids[l], inv_mu * curls[k] * curls[l] * el.area + k2 * eps * mass[k][l]);
            }
        }
    }
    for (i, &e) in edges.iter().enumerate() {
        let on_boundary = owned[i] == 1;
        let in_gamma = gamma_j.binary_search(&e).is_ok();
        let exterior = mesh.is_boundary_edge(e);
        if on_boundary && (!in_gamma || exterior) {
            let weight = if exterior {
                (medium.kappa / medium.eta[e]).re
            } else {
                medium.kappa / medium.mean_impedance(mesh, e)
            };
            builder.push(i, i, weight / mesh.edge_length(e));
        }
    }
    Ok(AuxiliarySystem {
        c: builder.build(),
        bp: IndexMap::new(n, bp_targets, MapKind::AuxiliaryTrace),
        edges,
        triangles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_partition::{disk_mesh, partition_pie, Partition, SkeletonPolicy};

    #[test]
    fn despres_single_edge() {
        let mesh = crate::mesh_partition::parse_mesh(
            r#"{"vertices": [[0,0],[2,0],[2,2],[0,2]], "triangles": [[0,1,2],[0,2,3]]}"#,
        )
        .unwrap();
        let p = Partition::from_labels(vec![1, 2], 2).unwrap();
        let d = Decomposition::new(&mesh, p, SkeletonPolicy::Thin);
        let medium = Medium::homogeneous(&mesh, 3.0);
        let t = assemble_despres(0, &mesh, &d, &medium, false);
        // ∫_e (1/L)² ds = 1/L with L = 2√2
        let expected = 3.0 / (2.0 * 2f64.sqrt());
        assert_eq!(t.nrows(), 1);
        assert!((t.get(0, 0).re - expected).abs() < 1e-14);
        assert_eq!(t, assemble_despres(1, &mesh, &d, &medium, false));
    }

    #[test]
    fn auxiliary_contains_the_skeleton() {
        let mesh = disk_mesh(1.0, 6, [0.0, 0.0]).unwrap();
        let d = Decomposition::new(&mesh, partition_pie(&mesh, 3, [0.0, 0.0]).unwrap(), SkeletonPolicy::Thin);
        let medium = Medium::homogeneous(&mesh, 5.0);
        for policy in [OmegaPrime::Whole, OmegaPrime::Layers(0), OmegaPrime::Layers(2)] {
            for j in 0..3 {
                let aux = assemble_auxiliary(j, &mesh, &d, &medium, policy).unwrap();
                assert!(aux.c.symmetry_defect() < 1e-14);
                assert!(aux.c.values().iter().all(|v| v.im == 0.0));
                assert_eq!(aux.bp.codomain_size(), d.skeleton.gamma_j(j).len());
                for (r, &col) in aux.bp.targets().iter().enumerate() {
                    assert_eq!(aux.edges[col], d.skeleton.gamma_j(j)[r]);
                }
            }
        }
        let whole = assemble_auxiliary(0, &mesh, &d, &medium, OmegaPrime::Whole).unwrap();
        assert_eq!(whole.edges, d.edge_sets.local_edges(0));
    }
}
