//! Triangulated conducting surfaces.
//!
//! A [`TriangleMesh`] is validated once on construction and is immutable
//! afterwards; the edge topology needed by the RWG basis is computed at the
//! same time and cached on the mesh.

mod canonical;
mod io;
mod regions;

use std::collections::HashMap;

use nalgebra::Vector3;
use thiserror::Error;

pub use canonical::{make_canonical, GeometryParams, Resolution, Shape};
pub use io::{load_mesh, read_mesh, save_mesh, write_mesh};
pub use regions::{parse_rects, plate_case, tag_subregions, PlateCase, Rect};

pub type Vec3 = Vector3<f64>;

/// Relative area below which a triangle is considered degenerate.
const DEGENERATE_AREA: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("non-positive dimension `{name}` = {value}")]
    NonPositiveDimension { name: &'static str, value: f64 },
    #[error("maximum edge length fraction must lie in (0, 1], got {0}")]
    BadRefinement(f64),
    #[error("refinement yields {0} triangles, at least 8 are required")]
    TooCoarse(usize),
    #[error("{0}")]
    Unsupported(String),
    #[error("triangle {triangle} references node {node}, but the mesh has {nodes} nodes")]
    IndexOutOfRange { triangle: usize, node: usize, nodes: usize },
    #[error("triangle {0} is degenerate (zero area)")]
    Degenerate(usize),
    #[error("triangles {0} and {1} are duplicates")]
    DuplicateTriangle(usize, usize),
    #[error("edge ({0}, {1}) is shared by more than two triangles")]
    NonManifoldEdge(usize, usize),
    #[error("expected {expected} region labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("rectangle {index} is not aligned with the plate grid")]
    NotGridAligned { index: usize },
    #[error("rectangle {index} lies outside the plate")]
    OutsidePlate { index: usize },
    #[error("mesh is not a structured plate: {0}")]
    NotPlate(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}

/// An edge of the mesh together with the one or two triangles sharing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshEdge {
    /// End points, lower node index first.
    pub nodes: [usize; 2],
    pub triangles: [usize; 2],
    /// `1` for boundary edges, `2` for interior edges.
    pub count: u8,
}

impl MeshEdge {
    pub fn is_interior(&self) -> bool {
        self.count == 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    nodes: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    labels: Vec<u32>,
    edges: Vec<MeshEdge>,
}

impl TriangleMesh {
    /// Builds a mesh with every region label set to 0.
    pub fn new(nodes: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self, GeometryError> {
        let labels = vec![0; triangles.len()];
        Self::with_labels(nodes, triangles, labels)
    }

    pub fn with_labels(nodes: Vec<Vec3>, triangles: Vec<[usize; 3]>, labels: Vec<u32>) -> Result<Self, GeometryError> {
        if labels.len() != triangles.len() {
            return Err(GeometryError::LabelCount { expected: triangles.len(), got: labels.len() });
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &node in tri {
                if node >= nodes.len() {
                    return Err(GeometryError::IndexOutOfRange { triangle: t, node, nodes: nodes.len() });
                }
            }
            let [a, b, c] = tri.map(|i| nodes[i]);
            let longest = (b - a).norm().max((c - b).norm()).max((a - c).norm());
            let area = 0.5 * (b - a).cross(&(c - a)).norm();
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(GeometryError::Degenerate(t));
            }
            if area <= DEGENERATE_AREA * longest * longest {
                return Err(GeometryError::Degenerate(t));
            }
        }

        let mut seen: HashMap<[usize; 3], usize> = HashMap::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut key = *tri;
            key.sort_unstable();
            if let Some(&first) = seen.get(&key) {
                return Err(GeometryError::DuplicateTriangle(first, t));
            }
            seen.insert(key, t);
        }

        let edges = build_edges(&triangles)?;
        Ok(Self { nodes, triangles, labels, edges })
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    /// Returns a copy of this mesh carrying new region labels.
    pub fn relabeled(&self, labels: Vec<u32>) -> Result<Self, GeometryError> {
        if labels.len() != self.triangles.len() {
            return Err(GeometryError::LabelCount { expected: self.triangles.len(), got: labels.len() });
        }
        Ok(Self { labels, ..self.clone() })
    }

    pub fn num_interior_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.is_interior()).count()
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.edges.len() - self.num_interior_edges()
    }

    pub fn is_closed(&self) -> bool {
        self.num_boundary_edges() == 0
    }

    /// V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.nodes.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn vertices(&self, t: usize) -> [Vec3; 3] {
        self.triangles[t].map(|i| self.nodes[i])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.vertices(t);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn centroid(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.vertices(t);
        (a + b + c) / 3.0
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Total area of the triangles carrying `label`.
    pub fn labeled_area(&self, label: u32) -> f64 {
        (0..self.triangles.len()).filter(|&t| self.labels[t] == label).map(|t| self.triangle_area(t)).sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| (self.nodes[e.nodes[0]] - self.nodes[e.nodes[1]]).norm()).fold(0.0, f64::max)
    }

    /// Radius of the smallest origin-centred sphere containing the mesh.
    pub fn circumscribing_radius(&self) -> f64 {
        self.nodes.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }
}

fn build_edges(triangles: &[[usize; 3]]) -> Result<Vec<MeshEdge>, GeometryError> {
    let mut index: HashMap<[usize; 2], usize> = HashMap::with_capacity(triangles.len() * 2);
    let mut edges: Vec<MeshEdge> = Vec::with_capacity(triangles.len() * 2);
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = [a.min(b), a.max(b)];
            match index.get(&key) {
                Some(&e) => {
                    let edge = &mut edges[e];
                    if edge.count == 2 {
                        return Err(GeometryError::NonManifoldEdge(key[0], key[1]));
                    }
                    edge.triangles[1] = t;
                    edge.count = 2;
                }
                None => {
                    index.insert(key, edges.len());
                    edges.push(MeshEdge { nodes: key, triangles: [t, t], count: 1 });
                }
            }
        }
    }
    Ok(edges)
}
