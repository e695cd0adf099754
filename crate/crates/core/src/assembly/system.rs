use rayon::prelude::*;

use super::element::Element;
use super::medium::Medium;
use super::source::{plane_wave_load, SourceSpec};
use crate::kernels::{SparseMatrix, TripletBuilder};
use crate::mesh_partition::{Decomposition, Mesh};
use crate::{Result, C64, I};

/// Local matrix `A_j` and load `f_j`, numbered by the sorted edges of `E_j`.
#[derive(Debug, Clone)]
pub struct LocalSystem {
    pub a: SparseMatrix,
    pub f: Vec<C64>,
}

/// Assembles `a(φ_f, φ_e)` and `ℓ(φ_e)` over `triangles`, with edges numbered
/// by their position in the sorted list `edges`. Every mesh boundary edge in
/// `edges` carries the impedance term.
fn assemble_on(
    mesh: &Mesh,
    triangles: &[usize],
    edges: &[usize],
    medium: &Medium,
    source: Option<&SourceSpec>,
) -> Result<LocalSystem> {
    let n = edges.len();
    let local = |e: usize| edges.binary_search(&e).expect("triangle edge belongs to the edge set");
    let k2 = medium.kappa * medium.kappa;
    let mut builder = TripletBuilder::with_capacity(n, n, 9 * triangles.len() + n);
    let mut f = vec![C64::new(0.0, 0.0); n];
    for &t in triangles {
        let el = Element::new(mesh, t)?;
        let curls = el.curls();
        let mass = el.mass();
        let inv_mu = 1.0 / medium.mu[t];
        let ids = el.edges.map(local);
        for k in 0..3 {
            for l in 0..3 {
                let v = inv_mu * (curls[k] * curls[l] * el.area) - k2 * medium.eps[t] * mass[k][l];
                builder.push(ids[k], ids[l], v);
            }
        }
        if let Some(vol) = source.and_then(|s| s.volume.as_ref()) {
            let [fx, fy] = vol[t];
            for (k, int) in el.integrals().iter().enumerate() {
                f[ids[k]] += fx * int[0] + fy * int[1];
            }
        }
    }
    for (i, &e) in edges.iter().enumerate() {
        if !mesh.is_boundary_edge(e) {
            continue;
        }
        let eta = medium.eta[e];
        builder.push(i, i, -I * (medium.kappa / eta) / mesh.edge_length(e));
        if let Some(wave) = source.and_then(|s| s.plane_wave.as_ref()) {
            let t = mesh.edge_triangles(e)[0];
            f[i] += plane_wave_load(mesh, e, wave, medium.kappa, medium.mu[t], eta);
        }
    }
    Ok(LocalSystem { a: builder.build(), f })
}

/// Global matrix `A_Ω` and load `f_Ω` over all edges.
pub fn assemble_global(mesh: &Mesh, medium: &Medium, source: &SourceSpec) -> Result<LocalSystem> {
    medium.validate(mesh)?;
    source.validate(mesh)?;
    let triangles: Vec<usize> = (0..mesh.num_triangles()).collect();
    let edges: Vec<usize> = (0..mesh.num_edges()).collect();
    assemble_on(mesh, &triangles, &edges, medium, Some(source))
}

/// `A_j`, `f_j` of subdomain `j` (0-based); the impedance term lives only on
/// `∂Ω_j ∩ ∂Ω`.
pub fn assemble_local(
    j: usize,
    mesh: &Mesh,
    decomposition: &Decomposition,
    medium: &Medium,
    source: &SourceSpec,
) -> Result<LocalSystem> {
    medium.validate(mesh)?;
    source.validate(mesh)?;
    let es = &decomposition.edge_sets;
    assemble_on(mesh, es.local_triangles(j), es.local_edges(j), medium, Some(source))
}

/// All local systems, in subdomain order.
pub fn assemble_all_local(
    mesh: &Mesh,
    decomposition: &Decomposition,
    medium: &Medium,
    source: &SourceSpec,
) -> Result<Vec<LocalSystem>> {
    medium.validate(mesh)?;
    source.validate(mesh)?;
    let es = &decomposition.edge_sets;
    (0..decomposition.count())
        .into_par_iter()
        .map(|j| assemble_on(mesh, es.local_triangles(j), es.local_edges(j), medium, Some(source)))
        .collect()
}

/// Gram matrix `M + κ⁻² K` of the energy norm `‖u‖² + κ⁻²‖curl u‖²`.
pub fn energy_gram(mesh: &Mesh, kappa: f64) -> Result<SparseMatrix> {
    let n = mesh.num_edges();
    let mut builder = TripletBuilder::with_capacity(n, n, 9 * mesh.num_triangles());
    let k2 = kappa * kappa;
    for t in 0..mesh.num_triangles() {
        let el = Element::new(mesh, t)?;
        let curls = el.curls();
        let mass = el.mass();
        for k in 0..3 {
            for l in 0..3 {
                builder.push(el.edges[k], el.edges[l], mass[k][l] + curls[k] * curls[l] * el.area / k2);
            }
        }
    }
    Ok(builder.build())
}

/// Value and curl of the edge-element field `coeffs` (global numbering) at
/// barycentric coordinates `lambda` of triangle `t`.
pub fn evaluate_field(mesh: &Mesh, coeffs: &[C64], t: usize, lambda: [f64; 3]) -> Result<([C64; 2], C64)> {
    let el = Element::new(mesh, t)?;
    let vals = el.values(lambda);
    let curls = el.curls();
    let mut v = [C64::new(0.0, 0.0); 2];
    let mut c = C64::new(0.0, 0.0);
    for k in 0..3 {
        let u = coeffs[el.edges[k]];
        v[0] += u * vals[k][0];
        v[1] += u * vals[k][1];
        c += u * curls[k];
    }
    Ok((v, c))
}
