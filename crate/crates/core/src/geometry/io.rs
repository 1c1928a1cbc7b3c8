//! `RMESH1` text format.
//!
//! ```text
//! RMESH1
//! <num_nodes> <num_triangles>
//! x y z            (one line per node)
//! i j k label      (one line per triangle, 0-based node indices)
//! ```
//!
//! Coordinates are written with the shortest representation that parses
//! back to the same `f64`, so a save/load round trip is bit-exact.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{GeometryError, TriangleMesh, Vec3};

const MAGIC: &str = "RMESH1";

pub fn write_mesh(mesh: &TriangleMesh, mut out: impl Write) -> Result<(), GeometryError> {
    let mut s = String::with_capacity(64 * (mesh.nodes().len() + mesh.triangles().len()));
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "{} {}", mesh.nodes().len(), mesh.triangles().len());
    for p in mesh.nodes() {
        let _ = writeln!(s, "{:?} {:?} {:?}", p.x, p.y, p.z);
    }
    for (t, l) in mesh.triangles().iter().zip(mesh.labels()) {
        let _ = writeln!(s, "{} {} {} {}", t[0], t[1], t[2], l);
    }
    out.write_all(s.as_bytes()).map_err(|e| GeometryError::Io(e.to_string()))
}

pub fn save_mesh(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<(), GeometryError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| GeometryError::Io(format!("{}: {e}", path.display())))?;
    write_mesh(mesh, std::io::BufWriter::new(file))
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh, GeometryError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| GeometryError::Io(format!("{}: {e}", path.display())))?;
    read_mesh(file)
}

pub fn read_mesh(input: impl Read) -> Result<TriangleMesh, GeometryError> {
    let mut lines = BufReader::new(input).lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> Result<(usize, String), GeometryError> {
        match lines.next() {
            Some((n, Ok(l))) => Ok((n, l)),
            Some((n, Err(e))) => Err(GeometryError::Parse { line: n, message: e.to_string() }),
            None => Err(GeometryError::Parse { line: 0, message: format!("unexpected end of file, expected {what}") }),
        }
    };
    let err = |line, message: String| GeometryError::Parse { line, message };

    let (n, magic) = next("header")?;
    if magic.trim() != MAGIC {
        return Err(err(n, format!("expected `{MAGIC}`, found `{}`", magic.trim())));
    }
    let (n, counts) = next("node and triangle counts")?;
    let counts: Vec<usize> = parse_fields(&counts, n)?;
    let [num_nodes, num_tris] = counts[..] else {
        return Err(err(n, "expected `<num_nodes> <num_triangles>`".into()));
    };

    let mut nodes = Vec::with_capacity(num_nodes);
    for _ in 0..num_nodes {
        let (n, line) = next("node line")?;
        let v: Vec<f64> = parse_fields(&line, n)?;
        let [x, y, z] = v[..] else {
            return Err(err(n, format!("expected 3 coordinates, found {}", v.len())));
        };
        nodes.push(Vec3::new(x, y, z));
    }
    let mut triangles = Vec::with_capacity(num_tris);
    let mut labels = Vec::with_capacity(num_tris);
    for _ in 0..num_tris {
        let (n, line) = next("triangle line")?;
        let v: Vec<usize> = parse_fields(&line, n)?;
        let [i, j, k, label] = v[..] else {
            return Err(err(n, format!("expected `i j k label`, found {} fields", v.len())));
        };
        let label = u32::try_from(label).map_err(|_| err(n, "label out of range".into()))?;
        triangles.push([i, j, k]);
        labels.push(label);
    }
    TriangleMesh::with_labels(nodes, triangles, labels)
}

fn parse_fields<T: std::str::FromStr>(line: &str, n: usize) -> Result<Vec<T>, GeometryError>
where
    T::Err: std::fmt::Display,
{
    line.split_whitespace()
        .map(|f| f.parse::<T>().map_err(|e| GeometryError::Parse { line: n, message: format!("`{f}`: {e}") }))
        .collect()
}
