use std::ops::Index;

use crate::geometry::{TriangleMesh, Vec3};

use super::OperatorError;

/// One RWG function on the pair of triangles sharing an interior edge.
///
/// On the plus triangle `ψ = l/(2A⁺) (r - v⁺)`, on the minus triangle
/// `ψ = l/(2A⁻) (v⁻ - r)`, where `v±` are the vertices opposite the edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwgFunction {
    pub edge: usize,
    pub plus: usize,
    pub minus: usize,
    /// Local vertex index (0..3) of the free vertex in the plus triangle.
    pub plus_vertex: usize,
    pub minus_vertex: usize,
    pub length: f64,
}

impl RwgFunction {
    pub fn triangles(&self) -> [usize; 2] {
        [self.plus, self.minus]
    }
}

/// A basis function seen from one of its two triangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalBasis {
    pub function: usize,
    /// Local index of the free vertex.
    pub vertex: usize,
    /// `+1` on the plus triangle, `-1` on the minus triangle.
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    functions: Vec<RwgFunction>,
    per_triangle: Vec<Vec<LocalBasis>>,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[RwgFunction] {
        &self.functions
    }

    pub fn num_triangles(&self) -> usize {
        self.per_triangle.len()
    }

    pub fn on_triangle(&self, t: usize) -> &[LocalBasis] {
        &self.per_triangle[t]
    }

    /// Point value of a basis function on triangle `t` at `r`.
    pub fn evaluate(&self, mesh: &TriangleMesh, local: &LocalBasis, r: &Vec3) -> Vec3 {
        let f = &self.functions[local.function];
        let t = if local.sign > 0.0 { f.plus } else { f.minus };
        let area = mesh.triangle_area(t);
        let v = mesh.vertices(t)[local.vertex];
        (r - v) * (local.sign * f.length / (2.0 * area))
    }

    /// Surface divergence of a basis function on its `local` triangle.
    pub fn divergence(&self, mesh: &TriangleMesh, local: &LocalBasis) -> f64 {
        let f = &self.functions[local.function];
        let t = if local.sign > 0.0 { f.plus } else { f.minus };
        local.sign * f.length / mesh.triangle_area(t)
    }
}

impl Index<usize> for BasisSet {
    type Output = RwgFunction;

    fn index(&self, i: usize) -> &RwgFunction {
        &self.functions[i]
    }
}

/// One function per interior edge, in edge order. The plus triangle is the
/// one with the lower index.
pub fn build_rwg(mesh: &TriangleMesh) -> Result<BasisSet, OperatorError> {
    let tris = mesh.triangles();
    let free_vertex = |t: usize, edge: [usize; 2]| {
        (0..3).find(|&k| tris[t][k] != edge[0] && tris[t][k] != edge[1]).expect("edge belongs to triangle")
    };
    let mut functions = Vec::new();
    let mut per_triangle = vec![Vec::new(); tris.len()];
    for (e, edge) in mesh.edges().iter().enumerate().filter(|(_, e)| e.is_interior()) {
        let (plus, minus) = (edge.triangles[0].min(edge.triangles[1]), edge.triangles[0].max(edge.triangles[1]));
        let f = RwgFunction {
            edge: e,
            plus,
            minus,
            plus_vertex: free_vertex(plus, edge.nodes),
            minus_vertex: free_vertex(minus, edge.nodes),
            length: (mesh.nodes()[edge.nodes[0]] - mesh.nodes()[edge.nodes[1]]).norm(),
        };
        let p = functions.len();
        per_triangle[plus].push(LocalBasis { function: p, vertex: f.plus_vertex, sign: 1.0 });
        per_triangle[minus].push(LocalBasis { function: p, vertex: f.minus_vertex, sign: -1.0 });
        functions.push(f);
    }
    if functions.is_empty() {
        return Err(OperatorError::NoInteriorEdges);
    }
    Ok(BasisSet { functions, per_triangle })
}
