//! Mesh readers and writers: an ASCII MSH 2.2 subset and a native JSON format.
//!
//! The JSON format is
//! `{"vertices": [[x, y], ...], "triangles": [[a, b, c], ...], "boundary_tags": [[a, b, tag], ...]}`
//! with 0-based vertex ids; `boundary_tags` is optional.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mesh::{Mesh, Point};
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct JsonMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    #[serde(default)]
    boundary_tags: Vec<[i64; 3]>,
}

/// Loads a mesh, detecting the format from the file contents.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mesh(&text)
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        parse_json(trimmed)
    } else if trimmed.starts_with("$MeshFormat") {
        parse_msh(trimmed)
    } else {
        Err(Error::Parse("unrecognized mesh format (expected MSH 2.2 or JSON)".into()))
    }
}

fn parse_json(text: &str) -> Result<Mesh> {
    let raw: JsonMesh = serde_json::from_str(text).map_err(|e| Error::Parse(format!("json mesh: {e}")))?;
    let tags = raw
        .boundary_tags
        .iter()
        .map(|&[a, b, tag]| {
            if a < 0 || b < 0 {
                Err(Error::Parse(format!("negative vertex id in boundary tag [{a}, {b}, {tag}]")))
            } else {
                Ok(([a as usize, b as usize], tag))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Mesh::new(raw.vertices, raw.triangles, &tags)
}

pub fn mesh_to_json(mesh: &Mesh) -> String {
    let raw = JsonMesh {
        vertices: mesh.vertices().to_vec(),
        triangles: mesh.triangles().to_vec(),
        boundary_tags: mesh
            .boundary_tags()
            .iter()
            .map(|(&e, &tag)| {
                let [a, b] = mesh.edges()[e];
                [a as i64, b as i64, tag]
            })
            .collect(),
    };
    serde_json::to_string(&raw).expect("mesh serializes")
}

pub fn write_mesh_json(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, mesh_to_json(mesh)).map_err(|e| Error::io(path, e))
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_nonempty(&mut self) -> Result<(usize, &'a str)> {
        for (n, line) in self.inner.by_ref() {
            let line = line.trim();
            if !line.is_empty() {
                return Ok((n + 1, line));
            }
        }
        Err(Error::Parse("unexpected end of MSH file".into()))
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        let (n, line) = self.next_nonempty()?;
        if line == token {
            Ok(())
        } else {
            Err(Error::Parse(format!("line {n}: expected {token}, found {line:?}")))
        }
    }

    fn skip_section(&mut self, name: &str) -> Result<()> {
        let end = format!("$End{}", &name[1..]);
        loop {
            let (_, line) = self.next_nonempty()?;
            if line == end {
                return Ok(());
            }
        }
    }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("line {line}: bad {what}")))
}

/// ASCII MSH 2.2: `$Nodes` and `$Elements` with element types 1 (line) and
/// 2 (triangle). The first tag of a line element is its boundary marker.
/// Other element types and sections are skipped.
fn parse_msh(text: &str) -> Result<Mesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    lines.expect("$MeshFormat")?;
    let (n, header) = lines.next_nonempty()?;
    let mut it = header.split_whitespace();
    let version: String = parse_num(it.next(), n, "version")?;
    if !version.starts_with('2') {
        return Err(Error::Parse(format!("line {n}: unsupported MSH version {version}")));
    }
    let file_type: i32 = parse_num(it.next(), n, "file type")?;
    if file_type != 0 {
        return Err(Error::Parse("binary MSH files are not supported".into()));
    }
    lines.expect("$EndMeshFormat")?;

    let mut node_index: HashMap<i64, usize> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut tagged: Vec<([usize; 2], i64)> = Vec::new();
    let mut seen_nodes = false;
    let mut seen_elements = false;

    while let Ok((n, line)) = lines.next_nonempty() {
        match line {
            "$Nodes" => {
                let (n, count) = lines.next_nonempty()?;
                let count: usize = parse_num(Some(count), n, "node count")?;
                for _ in 0..count {
                    let (n, l) = lines.next_nonempty()?;
                    let mut it = l.split_whitespace();
                    let id: i64 = parse_num(it.next(), n, "node id")?;
                    let x: f64 = parse_num(it.next(), n, "x coordinate")?;
                    let y: f64 = parse_num(it.next(), n, "y coordinate")?;
                    if node_index.insert(id, vertices.len()).is_some() {
                        return Err(Error::Parse(format!("line {n}: duplicate node id {id}")));
                    }
                    vertices.push([x, y]);
                }
                lines.expect("$EndNodes")?;
                seen_nodes = true;
            }
            "$Elements" => {
                if !seen_nodes {
                    return Err(Error::Parse(format!("line {n}: $Elements before $Nodes")));
                }
                let (n, count) = lines.next_nonempty()?;
                let count: usize = parse_num(Some(count), n, "element count")?;
                for _ in 0..count {
                    let (n, l) = lines.next_nonempty()?;
                    let toks: Vec<&str> = l.split_whitespace().collect();
                    let mut it = toks.iter().copied();
                    let _id: i64 = parse_num(it.next(), n, "element id")?;
                    let kind: i64 = parse_num(it.next(), n, "element type")?;
                    let ntags: usize = parse_num(it.next(), n, "tag count")?;
                    let tags: Vec<i64> = (0..ntags)
                        .map(|_| parse_num(it.next(), n, "tag"))
                        .collect::<Result<_>>()?;
                    let nodes: Vec<i64> = it.map(|t| parse_num(Some(t), n, "node reference")).collect::<Result<_>>()?;
                    let lookup = |id: &i64| {
                        node_index
                            .get(id)
                            .copied()
                            .ok_or_else(|| Error::Parse(format!("line {n}: unknown node {id}")))
                    };
                    match kind {
                        1 => {
                            if nodes.len() != 2 {
                                return Err(Error::Parse(format!("line {n}: line element needs 2 nodes")));
                            }
                            let pair = [lookup(&nodes[0])?, lookup(&nodes[1])?];
                            tagged.push((pair, tags.first().copied().unwrap_or(0)));
                        }
                        2 => {
                            if nodes.len() != 3 {
                                return Err(Error::Parse(format!("line {n}: triangle needs 3 nodes")));
                            }
                            triangles.push([lookup(&nodes[0])?, lookup(&nodes[1])?, lookup(&nodes[2])?]);
                        }
                        _ => {}
                    }
                }
                lines.expect("$EndElements")?;
                seen_elements = true;
            }
            s if s.starts_with('$') && !s.starts_with("$End") => lines.skip_section(s)?,
            other => return Err(Error::Parse(format!("line {n}: unexpected {other:?}"))),
        }
    }
    if !seen_nodes || !seen_elements {
        return Err(Error::Parse("MSH file lacks $Nodes or $Elements".into()));
    }
    Mesh::new(vertices, triangles, &tagged)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE_MSH: &str = "$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
1
1 7 \"outer\"
$EndPhysicalNames
$Nodes
4
10 0 0 0
11 1 0 0
12 1 1 0
13 0 1 0
$EndNodes
$Elements
4
1 15 2 0 1 10
2 1 2 7 1 10 11
3 2 2 0 1 10 11 12
4 2 2 0 1 10 12 13
$EndElements
";

    #[test]
    fn msh_square_with_tagged_line() {
        let m = parse_mesh(SQUARE_MSH).unwrap();
        assert_eq!(m.num_triangles(), 2);
        assert_eq!(m.num_edges(), 5);
        let e = m.edges().iter().position(|&p| p == [0, 1]).unwrap();
        assert_eq!(m.boundary_tag(e), Some(7));
    }

    #[test]
    fn msh_unknown_node_is_malformed() {
        let bad = SQUARE_MSH.replace("1 10 12 13", "1 10 12 99");
        assert!(matches!(parse_mesh(&bad), Err(Error::Parse(_))));
    }

    #[test]
    fn msh_truncated_is_malformed() {
        let bad = &SQUARE_MSH[..SQUARE_MSH.find("$EndElements").unwrap()];
        assert!(parse_mesh(bad).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"vertices": [[0,0],[1,0],[1,1],[0,1]], "triangles": [[0,1,2],[0,2,3]], "boundary_tags": [[2,3,5]]}"#;
        let m = parse_mesh(text).unwrap();
        let again = parse_mesh(&mesh_to_json(&m)).unwrap();
        assert_eq!(again.triangles(), m.triangles());
        assert_eq!(again.boundary_tags(), m.boundary_tags());
    }

    #[test]
    fn unknown_format() {
        assert!(matches!(parse_mesh("hello"), Err(Error::Parse(_))));
    }

    #[test]
    fn json_empty_mesh_rejected() {
        assert!(matches!(
            parse_mesh(r#"{"vertices": [], "triangles": []}"#),
            Err(Error::Mesh(_))
        ));
    }
}
