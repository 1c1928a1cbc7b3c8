//! Galerkin EFIE in mixed-potential form:
//!
//! `Z_pq = jkZ₀ ∫∫ [ψ_p·ψ_q − (∇·ψ_p)(∇·ψ_q)/k²] g(R) dA dA'`,
//! `g = e^{−jkR}/(4πR)` (time convention `e^{jωt}`).
//!
//! Well-separated triangle pairs use a symmetric product rule (3 or 6
//! points, see [`AssemblyConfig`]). Near pairs use the 6-point rule, and the
//! `1/(4πR)` part of `g` is integrated over the source triangle in closed
//! form. When the two triangles share a node, the outer integral of that
//! closed form is log-singular at the shared boundary and gets a collapsed
//! Gauss rule instead.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::singular::static_potentials;
use super::{BasisSet, OperatorError};
use crate::config::AssemblyConfig;
use crate::geometry::{TriangleMesh, Vec3};
use crate::quadrature::TriangleRule;

#[derive(Debug, Clone)]
pub struct EfieAssembly {
    /// Complex-symmetric impedance matrix (ohms).
    pub z: DMatrix<Complex64>,
    /// `‖Z − Zᵀ‖_F / ‖Z‖_F` before the final symmetrization; a measure of
    /// quadrature error in the off-diagonal pair integrals.
    pub reciprocity_residual: f64,
}

struct Element {
    nodes: [usize; 3],
    vertices: [Vec3; 3],
    area: f64,
    centroid: Vec3,
    longest: f64,
    far: Vec<Vec3>,
    near: Vec<Vec3>,
    touching: Vec<Vec3>,
}

impl Element {
    fn touches(&self, other: &Element) -> bool {
        self.nodes.iter().any(|n| other.nodes.contains(n))
    }
}

/// Integrals over a triangle pair, in the free-vertex form used by RWG:
/// `scalar = ∫∫ g`, `vertex[i][j] = ∫∫ (r − v_i)·(r' − v'_j) g`.
struct PairIntegrals {
    scalar: Complex64,
    vertex: [[Complex64; 3]; 3],
}

const TRIANGLES_PER_CHUNK: usize = 128;

pub fn assemble_z(
    mesh: &TriangleMesh,
    basis: &BasisSet,
    k: f64,
    config: &AssemblyConfig,
) -> Result<EfieAssembly, OperatorError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(OperatorError::BadWavenumber(k));
    }
    if basis.num_triangles() != mesh.triangles().len() {
        return Err(OperatorError::Mismatch {
            basis: basis.len(),
            rows: mesh.triangles().len(),
            cols: basis.num_triangles(),
        });
    }
    let far = match config.far_points {
        3 => TriangleRule::three_point(),
        6 => TriangleRule::six_point(),
        other => return Err(OperatorError::Format(format!("unsupported far-field rule with {other} points"))),
    };
    let near = TriangleRule::six_point();
    let touching = TriangleRule::collapsed_gauss(config.touching_order.max(1));
    let elements: Vec<Element> = (0..mesh.triangles().len())
        .map(|t| {
            let v = mesh.vertices(t);
            Element {
                nodes: mesh.triangles()[t],
                vertices: v,
                area: mesh.triangle_area(t),
                centroid: mesh.centroid(t),
                longest: (v[1] - v[0]).norm().max((v[2] - v[1]).norm()).max((v[0] - v[2]).norm()),
                far: far.map(&v),
                near: near.map(&v),
                touching: touching.map(&v),
            }
        })
        .collect();

    let nb = basis.len();
    let prefactor = Complex64::new(0.0, k * config.z0);
    let mut z = DMatrix::<Complex64>::zeros(nb, nb);
    let active: Vec<usize> = (0..elements.len()).filter(|&t| !basis.on_triangle(t).is_empty()).collect();

    for chunk in active.chunks(TRIANGLES_PER_CHUNK) {
        let rows: Vec<Vec<Complex64>> = chunk
            .par_iter()
            .map(|&m| {
                let test = basis.on_triangle(m);
                let em = &elements[m];
                let mut buffer = vec![Complex64::new(0.0, 0.0); test.len() * nb];
                for &n in &active {
                    let en = &elements[n];
                    let pair = if em.touches(en) {
                        pair_integrals(&em.touching, &touching.weights, em, &en.near, &near.weights, en, true, k)
                    } else if (em.centroid - en.centroid).norm() < config.near_factor * em.longest.max(en.longest) {
                        pair_integrals(&em.near, &near.weights, em, &en.near, &near.weights, en, true, k)
                    } else {
                        pair_integrals(&em.far, &far.weights, em, &en.far, &far.weights, en, false, k)
                    };
                    for (ia, a) in test.iter().enumerate() {
                        let la = basis[a.function].length;
                        for b in basis.on_triangle(n) {
                            let lb = basis[b.function].length;
                            let vector = pair.vertex[a.vertex][b.vertex] / (4.0 * em.area * en.area);
                            let charge = pair.scalar / (k * k * em.area * en.area);
                            buffer[ia * nb + b.function] += prefactor * (a.sign * b.sign * la * lb) * (vector - charge);
                        }
                    }
                }
                buffer
            })
            .collect();
        for (&m, buffer) in chunk.iter().zip(rows) {
            for (ia, a) in basis.on_triangle(m).iter().enumerate() {
                for q in 0..nb {
                    z[(a.function, q)] += buffer[ia * nb + q];
                }
            }
        }
    }

    let norm = z.norm();
    let asym = (&z - z.transpose()).norm();
    let reciprocity_residual = if norm > 0.0 { asym / norm } else { 0.0 };
    let zt = z.transpose();
    z += zt;
    z *= Complex64::new(0.5, 0.0);
    Ok(EfieAssembly { z, reciprocity_residual })
}

#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
fn pair_integrals(
    test_pts: &[Vec3],
    test_weights: &[f64],
    test: &Element,
    source_pts: &[Vec3],
    source_weights: &[f64],
    source: &Element,
    near: bool,
    k: f64,
) -> PairIntegrals {
    let inv4pi = 1.0 / (4.0 * PI);
    let zero = Complex64::new(0.0, 0.0);
    let mut scalar = zero;
    let mut vertex = [[zero; 3]; 3];
    for (r1, w1) in test_pts.iter().zip(test_weights) {
        let mut phi = zero;
        let mut phi_r = [zero; 3];
        for (r2, w2) in source_pts.iter().zip(source_weights) {
            let dist = (r1 - r2).norm();
            let kernel = if near {
                // (e^{-jkR} - 1) / (4πR), with limit -jk/(4π) at R = 0.
                if dist * k < 1e-8 {
                    Complex64::new(-0.5 * k * k * dist, -k) * inv4pi
                } else {
                    let (s, c) = (k * dist).sin_cos();
                    Complex64::new(c - 1.0, -s) * (inv4pi / dist)
                }
            } else {
                let (s, c) = (k * dist).sin_cos();
                Complex64::new(c, -s) * (inv4pi / dist)
            };
            let weighted = kernel * (w2 * source.area);
            phi += weighted;
            for d in 0..3 {
                phi_r[d] += weighted * r2[d];
            }
        }
        if near {
            let p = static_potentials(r1, &source.vertices);
            phi += p.scalar * inv4pi;
            for d in 0..3 {
                phi_r[d] += (p.vector[d] + r1[d] * p.scalar) * inv4pi;
            }
        }
        let w = w1 * test.area;
        scalar += phi * w;
        for i in 0..3 {
            let arm = r1 - test.vertices[i];
            for j in 0..3 {
                let vj = source.vertices[j];
                let mut dot = zero;
                for d in 0..3 {
                    dot += (phi_r[d] - phi * vj[d]) * arm[d];
                }
                vertex[i][j] += dot * w;
            }
        }
    }
    PairIntegrals { scalar, vertex }
}
