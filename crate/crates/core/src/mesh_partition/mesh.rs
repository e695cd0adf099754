use std::collections::{BTreeMap, HashMap};

use crate::{Error, Result};

pub type Point = [f64; 2];

/// 2D conforming triangulation with globally numbered, canonically oriented edges.
///
/// Edge ids follow the lexicographic order of `(v_min, v_max)`, and the
/// tangent of every edge points from its lower to its higher vertex id.
/// Local edge `k` of a triangle is the edge opposite to its local vertex `k`.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    edge_triangles: Vec<Vec<usize>>,
    boundary_edges: Vec<usize>,
    boundary_tags: BTreeMap<usize, i64>,
    tangents: Vec<Point>,
    lengths: Vec<f64>,
}

fn signed_area(p: Point, q: Point, r: Point) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

impl Mesh {
    /// Builds a mesh from vertices and triangles; clockwise triangles are reoriented.
    ///
    /// `boundary_tags` maps vertex pairs (either order) to a marker; every
    /// tagged pair must be a boundary edge of the triangulation.
    pub fn new(
        vertices: Vec<Point>,
        mut triangles: Vec<[usize; 3]>,
        boundary_tags: &[([usize; 2], i64)],
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter_mut().enumerate() {
            for &v in tri.iter() {
                if v >= vertices.len() {
                    return Err(Error::Mesh(format!("triangle {t} references missing vertex {v}")));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Mesh(format!("triangle {t} repeats a vertex")));
            }
            if signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]) < 0.0 {
                tri.swap(1, 2);
            }
        }

        let mut pairs: Vec<[usize; 2]> = triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| canonical(t[(k + 1) % 3], t[(k + 2) % 3])))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        let edge_id: HashMap<[usize; 2], usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();

        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut edge_triangles = vec![Vec::new(); pairs.len()];
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0usize; 3];
            for (k, slot) in te.iter_mut().enumerate() {
                let e = edge_id[&canonical(tri[(k + 1) % 3], tri[(k + 2) % 3])];
                *slot = e;
                edge_triangles[e].push(t);
            }
            triangle_edges.push(te);
        }
        for (e, ts) in edge_triangles.iter().enumerate() {
            if ts.len() > 2 {
                return Err(Error::Mesh(format!(
                    "non-conforming triangulation: edge {:?} shared by {} triangles",
                    pairs[e],
                    ts.len()
                )));
            }
        }
        let boundary_edges: Vec<usize> = (0..pairs.len()).filter(|&e| edge_triangles[e].len() == 1).collect();

        let mut tags = BTreeMap::new();
        for &(pair, tag) in boundary_tags {
            let key = canonical(pair[0], pair[1]);
            match edge_id.get(&key) {
                Some(&e) if edge_triangles[e].len() == 1 => {
                    tags.insert(e, tag);
                }
                Some(_) => {
                    return Err(Error::Mesh(format!("tagged edge {key:?} is not on the boundary")));
                }
                None => return Err(Error::Mesh(format!("tagged edge {key:?} is not a mesh edge"))),
            }
        }

        let mut tangents = Vec::with_capacity(pairs.len());
        let mut lengths = Vec::with_capacity(pairs.len());
        for &[a, b] in &pairs {
            let d = [vertices[b][0] - vertices[a][0], vertices[b][1] - vertices[a][1]];
            let len = d[0].hypot(d[1]);
            lengths.push(len);
            tangents.push([d[0] / len, d[1] / len]);
        }

        Ok(Self {
            vertices,
            triangles,
            edges: pairs,
            triangle_edges,
            edge_triangles,
            boundary_edges,
            boundary_tags: tags,
            tangents,
            lengths,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Global edge ids of the local edges of triangle `t`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    /// Triangles incident to edge `e` (one or two).
    pub fn edge_triangles(&self, e: usize) -> &[usize] {
        &self.edge_triangles[e]
    }

    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_triangles[e].len() == 1
    }

    pub fn boundary_tag(&self, e: usize) -> Option<i64> {
        self.boundary_tags.get(&e).copied()
    }

    pub fn boundary_tags(&self) -> &BTreeMap<usize, i64> {
        &self.boundary_tags
    }

    /// Unit tangent from the lower to the higher vertex id.
    pub fn tangent(&self, e: usize) -> Point {
        self.tangents[e]
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Positive area of triangle `t`.
    pub fn area(&self, t: usize) -> f64 {
        let [p, q, r] = self.triangle_points(t);
        signed_area(p, q, r)
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [p, q, r] = self.triangle_points(t);
        [(p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0]
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edges[e];
        let (p, q) = (self.vertices[a], self.vertices[b]);
        [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]
    }

    /// Sign relating the canonical tangent of boundary edge `e` to the
    /// counterclockwise orientation of the boundary (domain on the left).
    pub fn boundary_orientation(&self, e: usize) -> f64 {
        let t = self.edge_triangles[e][0];
        let tri = self.triangles[t];
        let k = self.triangle_edges[t].iter().position(|&x| x == e).unwrap();
        // positively oriented triangle traverses (k+1 -> k+2) counterclockwise
        let from = tri[(k + 1) % 3];
        if from == self.edges[e][0] {
            1.0
        } else {
            -1.0
        }
    }

    /// Sign of the canonical tangent of local edge `k` relative to the
    /// counterclockwise traversal of triangle `t`.
    pub fn local_edge_sign(&self, t: usize, k: usize) -> f64 {
        let tri = self.triangles[t];
        if tri[(k + 1) % 3] < tri[(k + 2) % 3] {
            1.0
        } else {
            -1.0
        }
    }

    /// Length of the diagonal of the bounding box.
    pub fn bounding_box_diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (hi[0] - lo[0]).hypot(hi[1] - lo[1])
    }

    /// Largest edge length.
    pub fn max_edge_length(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    /// Mean edge length, the typical mesh size `h`.
    pub fn mean_edge_length(&self) -> f64 {
        self.lengths.iter().sum::<f64>() / self.lengths.len() as f64
    }

    /// Triangles sharing an edge with `t`.
    pub fn triangle_neighbors(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.triangle_edges[t]
            .into_iter()
            .flat_map(move |e| self.edge_triangles[e].iter().copied().filter(move |&s| s != t))
    }
}

fn canonical(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}
