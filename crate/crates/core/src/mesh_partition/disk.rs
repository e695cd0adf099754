//! Structured triangulation of a disk by concentric rings.
//!
//! Ring `k` (radius `k R / n`) carries `6k` equally spaced vertices and the
//! annulus between rings `k-1` and `k` holds `6(2k-1)` triangles, so the disk
//! has `6n^2` nearly equilateral triangles of size about `R / n`.

use std::f64::consts::PI;

use super::mesh::Mesh;
use crate::{Error, Result};

/// Disk mesh with `rings` rings around `center`.
pub fn disk_mesh(radius: f64, rings: usize, center: [f64; 2]) -> Result<Mesh> {
    if rings == 0 || !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "disk mesh needs radius > 0 and at least one ring (radius {radius}, rings {rings})"
        )));
    }
    let mut vertices = vec![center];
    let mut ring_start = vec![0usize];
    for k in 1..=rings {
        ring_start.push(vertices.len());
        let r = radius * k as f64 / rings as f64;
        let m = 6 * k;
        for i in 0..m {
            let theta = 2.0 * PI * i as f64 / m as f64;
            vertices.push([center[0] + r * theta.cos(), center[1] + r * theta.sin()]);
        }
    }
    let mut triangles = Vec::with_capacity(6 * rings * rings);
    for o in 0..6 {
        triangles.push([0, ring_start[1] + o, ring_start[1] + (o + 1) % 6]);
    }
    for k in 2..=rings {
        let (inner, outer) = (ring_start[k - 1], ring_start[k]);
        let (m, n) = (6 * (k - 1), 6 * k);
        let (mut i, mut o) = (0usize, 0usize);
        while i < m || o < n {
            // advance along whichever ring has the smaller next angle
            let advance_outer = i == m || (o < n && (o + 1) * m <= (i + 1) * n);
            if advance_outer {
                triangles.push([inner + i % m, outer + o, outer + (o + 1) % n]);
                o += 1;
            } else {
                triangles.push([inner + i, outer + o % n, inner + (i + 1) % m]);
                i += 1;
            }
        }
    }
    Mesh::new(vertices, triangles, &[])
}

/// Number of rings giving at least `n_lambda` points per wavelength `2π/κ`.
pub fn rings_for(radius: f64, kappa: f64, n_lambda: f64) -> usize {
    let wavelength = 2.0 * PI / kappa;
    let h = wavelength / n_lambda;
    (radius / h).ceil().max(1.0) as usize
}
