use super::mesh::Mesh;
use super::partition::Partition;

/// Per-subdomain edge sets, the thin skeleton and edge multiplicities.
///
/// Subdomains are addressed by 0-based block index throughout.
#[derive(Debug, Clone)]
pub struct EdgeSets {
    local_edges: Vec<Vec<usize>>,
    local_triangles: Vec<Vec<usize>>,
    thin_skeleton: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl EdgeSets {
    pub fn new(mesh: &Mesh, partition: &Partition) -> Self {
        let count = partition.count();
        let mut classes: Vec<Vec<usize>> = vec![Vec::new(); mesh.num_edges()];
        let mut local_edges = vec![Vec::new(); count];
        for t in 0..mesh.num_triangles() {
            let j = partition.block_of(t);
            for e in mesh.triangle_edges(t) {
                classes[e].push(j);
                local_edges[j].push(e);
            }
        }
        for c in &mut classes {
            c.sort_unstable();
            c.dedup();
        }
        for es in &mut local_edges {
            es.sort_unstable();
            es.dedup();
        }
        let thin_skeleton = (0..mesh.num_edges()).filter(|&e| classes[e].len() >= 2).collect();
        Self {
            local_edges,
            local_triangles: partition.triangles_by_block(),
            thin_skeleton,
            classes,
        }
    }

    pub fn count(&self) -> usize {
        self.local_edges.len()
    }

    pub fn num_edges(&self) -> usize {
        self.classes.len()
    }

    /// Sorted global ids of `E_j`.
    pub fn local_edges(&self, j: usize) -> &[usize] {
        &self.local_edges[j]
    }

    pub fn local_triangles(&self, j: usize) -> &[usize] {
        &self.local_triangles[j]
    }

    /// Sorted edges shared by at least two subdomains.
    pub fn thin_skeleton(&self) -> &[usize] {
        &self.thin_skeleton
    }

    /// Number of subdomains containing edge `e`.
    pub fn multiplicity(&self, e: usize) -> usize {
        self.classes[e].len()
    }

    /// Sorted blocks containing edge `e`.
    pub fn class(&self, e: usize) -> &[usize] {
        &self.classes[e]
    }

    /// Position of global edge `e` inside `E_j`.
    pub fn local_index(&self, j: usize, e: usize) -> Option<usize> {
        self.local_edges[j].binary_search(&e).ok()
    }

    /// Total length of the broken space, `Σ_j #E_j`.
    pub fn broken_size(&self) -> usize {
        self.local_edges.iter().map(Vec::len).sum()
    }
}
