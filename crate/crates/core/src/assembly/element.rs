//! Lowest-order Whitney edge elements on a triangle.
//!
//! The basis function of an edge `(a, b)` with `a < b` is
//! `λ_a ∇λ_b − λ_b ∇λ_a`; its tangential component along the canonical
//! tangent is `1/L` on the edge and zero on the other two edges.

use crate::mesh_partition::Mesh;
use crate::{Error, Result};

/// Closed-form element data of one triangle.
#[derive(Debug, Clone, Copy)]
pub struct Element {
    pub area: f64,
    /// Global ids of the local edges (edge `k` is opposite vertex `k`).
    pub edges: [usize; 3],
    /// `±1`: canonical orientation of local edge `k` against the local one.
    pub signs: [f64; 3],
    /// Gradients of the barycentric coordinates.
    pub grads: [[f64; 2]; 3],
}

const REL_DEGENERACY: f64 = 1e-14;

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

impl Element {
    pub fn new(mesh: &Mesh, t: usize) -> Result<Self> {
        let p = mesh.triangle_points(t);
        let area = mesh.area(t);
        let scale = mesh.bounding_box_diameter();
        if !(area >= REL_DEGENERACY * scale * scale) {
            return Err(Error::DegenerateTriangle { triangle: t, area });
        }
        let mut grads = [[0.0; 2]; 3];
        for (k, g) in grads.iter_mut().enumerate() {
            let (q, r) = (p[(k + 1) % 3], p[(k + 2) % 3]);
            *g = [(q[1] - r[1]) / (2.0 * area), (r[0] - q[0]) / (2.0 * area)];
        }
        Ok(Self {
            area,
            edges: mesh.triangle_edges(t),
            signs: [0, 1, 2].map(|k| mesh.local_edge_sign(t, k)),
            grads,
        })
    }

    fn ends(k: usize) -> (usize, usize) {
        ((k + 1) % 3, (k + 2) % 3)
    }

    /// Constant scalar curl of each basis function.
    pub fn curls(&self) -> [f64; 3] {
        [0, 1, 2].map(|k| {
            let (i, j) = Self::ends(k);
            self.signs[k] * 2.0 * cross(self.grads[i], self.grads[j])
        })
    }

    /// `∫ φ_k · φ_l`.
    pub fn mass(&self) -> [[f64; 3]; 3] {
        let m = |i: usize, j: usize| self.area * if i == j { 2.0 } else { 1.0 } / 12.0;
        let g = |i: usize, j: usize| dot(self.grads[i], self.grads[j]);
        let mut out = [[0.0; 3]; 3];
        for k in 0..3 {
            let (a, b) = Self::ends(k);
            for l in 0..3 {
                let (c, d) = Self::ends(l);
                let v = m(a, c) * g(b, d) - m(a, d) * g(b, c) - m(b, c) * g(a, d) + m(b, d) * g(a, c);
                out[k][l] = self.signs[k] * self.signs[l] * v;
            }
        }
        out
    }

    /// `∫ φ_k`.
    pub fn integrals(&self) -> [[f64; 2]; 3] {
        [0, 1, 2].map(|k| {
            let (a, b) = Self::ends(k);
            let s = self.signs[k] * self.area / 3.0;
            [s * (self.grads[b][0] - self.grads[a][0]), s * (self.grads[b][1] - self.grads[a][1])]
        })
    }

    /// Values of the three basis functions at barycentric coordinates `lambda`.
    pub fn values(&self, lambda: [f64; 3]) -> [[f64; 2]; 3] {
        [0, 1, 2].map(|k| {
            let (a, b) = Self::ends(k);
            let (ga, gb) = (self.grads[a], self.grads[b]);
            [
                self.signs[k] * (lambda[a] * gb[0] - lambda[b] * ga[0]),
                self.signs[k] * (lambda[a] * gb[1] - lambda[b] * ga[1]),
            ]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> Mesh {
        Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], &[]).unwrap()
    }

    #[test]
    fn unit_tangential_circulation() {
        let mesh = reference();
        let el = Element::new(&mesh, 0).unwrap();
        for k in 0..3 {
            let e = el.edges[k];
            let [a, b] = mesh.edges()[e];
            let t = mesh.tangent(e);
            let la = mesh.edge_length(e);
            // midpoint of edge e: barycentric 1/2 at both ends
            let tri = mesh.triangles()[0];
            let mut lambda = [0.0; 3];
            for (i, &v) in tri.iter().enumerate() {
                if v == a || v == b {
                    lambda[i] = 0.5;
                }
            }
            let vals = el.values(lambda);
            for (l, v) in vals.iter().enumerate() {
                let tangential = dot(*v, t);
                let expected = if l == k { 1.0 / la } else { 0.0 };
                assert!((tangential - expected).abs() < 1e-14, "k={k} l={l}");
            }
        }
    }

    #[test]
    fn curls_match_area() {
        let el = Element::new(&reference(), 0).unwrap();
        for c in el.curls() {
            assert!((c.abs() - 1.0 / el.area).abs() < 1e-14);
        }
    }

    #[test]
    fn mass_matches_quadrature() {
        let mesh = Mesh::new(vec![[0.1, 0.2], [1.3, -0.1], [0.4, 0.9]], vec![[0, 1, 2]], &[]).unwrap();
        let el = Element::new(&mesh, 0).unwrap();
        // degree-2 rule exact for products of affine fields
        let pts = [[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0]];
        let mut q = [[0.0; 3]; 3];
        for p in pts {
            let v = el.values(p);
            for k in 0..3 {
                for l in 0..3 {
                    q[k][l] += el.area / 3.0 * dot(v[k], v[l]);
                }
            }
        }
        let m = el.mass();
        for k in 0..3 {
            for l in 0..3 {
                assert!((m[k][l] - q[k][l]).abs() < 1e-14);
            }
        }
        let ints = el.integrals();
        let mut qi = [[0.0; 2]; 3];
        for p in pts {
            for (k, v) in el.values(p).iter().enumerate() {
                qi[k][0] += el.area / 3.0 * v[0];
                qi[k][1] += el.area / 3.0 * v[1];
            }
        }
        for k in 0..3 {
            assert!((ints[k][0] - qi[k][0]).abs() < 1e-14 && (ints[k][1] - qi[k][1]).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        let mesh = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1e-17]], vec![[0, 1, 2]], &[]).unwrap();
        assert!(matches!(Element::new(&mesh, 0), Err(Error::DegenerateTriangle { .. })));
    }
}
