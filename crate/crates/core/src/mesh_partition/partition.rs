use std::f64::consts::PI;
use std::path::Path;

use super::mesh::Mesh;
use crate::{Error, Result};

/// Assignment of every triangle to one subdomain.
///
/// Labels are 1-based (`1..=J`). Code that indexes per-subdomain blocks uses
/// the 0-based block index `label - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Builds a partition from 1-based labels.
    pub fn from_labels(labels: Vec<usize>, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Partition("partition needs at least one subdomain".into()));
        }
        if let Some((t, &l)) = labels.iter().enumerate().find(|(_, &l)| l == 0 || l > count) {
            return Err(Error::Partition(format!("triangle {t} has label {l} outside 1..={count}")));
        }
        Ok(Self { labels, count })
    }

    /// Everything in subdomain 1.
    pub fn single(mesh: &Mesh) -> Self {
        Self {
            labels: vec![1; mesh.num_triangles()],
            count: 1,
        }
    }

    /// Number of subdomains `J`.
    pub fn count(&self) -> usize {
        self.count
    }

    /// 1-based subdomain of triangle `t`.
    pub fn subdomain_of(&self, t: usize) -> usize {
        self.labels[t]
    }

    /// 0-based block index of triangle `t`.
    pub fn block_of(&self, t: usize) -> usize {
        self.labels[t] - 1
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_triangles(&self) -> usize {
        self.labels.len()
    }

    /// Triangles of each block, in increasing id order.
    pub fn triangles_by_block(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (t, &l) in self.labels.iter().enumerate() {
            out[l - 1].push(t);
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = String::with_capacity(self.labels.len() * 3);
        for l in &self.labels {
            text.push_str(&l.to_string());
            text.push('\n');
        }
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Sector index (1-based) of angle `theta` among `count` equal sectors.
pub fn sector_of(theta: f64, count: usize) -> usize {
    let mut th = theta.rem_euclid(2.0 * PI);
    if th >= 2.0 * PI {
        th = 0.0;
    }
    let s = (th * count as f64 / (2.0 * PI)).floor() as usize;
    s.min(count - 1) + 1
}

/// Splits the mesh into `count` pie wedges around `center`, assigning each
/// triangle by the polar angle of its centroid with half-open sectors
/// `[2π(j-1)/J, 2πj/J)`.
pub fn partition_pie(mesh: &Mesh, count: usize, center: [f64; 2]) -> Result<Partition> {
    if count == 0 {
        return Err(Error::Partition("pie partition needs J >= 1".into()));
    }
    let labels = (0..mesh.num_triangles())
        .map(|t| {
            let c = mesh.centroid(t);
            sector_of((c[1] - center[1]).atan2(c[0] - center[0]), count)
        })
        .collect();
    Partition::from_labels(labels, count)
}

/// Parses one integer label per line; 0-based files are shifted to 1-based.
pub fn parse_partition(mesh: &Mesh, text: &str) -> Result<Partition> {
    let mut raw = Vec::with_capacity(mesh.num_triangles());
    for (n, line) in text.lines().enumerate() {
        let tok = line.trim();
        if tok.is_empty() {
            continue;
        }
        let v: i64 = tok
            .parse()
            .map_err(|_| Error::Parse(format!("partition line {}: not an integer: {tok:?}", n + 1)))?;
        if v < 0 {
            return Err(Error::Parse(format!("partition line {}: negative label {v}", n + 1)));
        }
        raw.push(v as usize);
    }
    if raw.is_empty() {
        return Err(Error::Partition("partition file has no labels".into()));
    }
    if raw.len() != mesh.num_triangles() {
        return Err(Error::Partition(format!(
            "partition has {} labels but the mesh has {} triangles",
            raw.len(),
            mesh.num_triangles()
        )));
    }
    let zero_based = raw.contains(&0);
    let labels: Vec<usize> = raw.into_iter().map(|v| if zero_based { v + 1 } else { v }).collect();
    let count = *labels.iter().max().unwrap();
    Partition::from_labels(labels, count)
}

pub fn partition_from_file(mesh: &Mesh, path: impl AsRef<Path>) -> Result<Partition> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_partition(mesh, &text)
}
