//! Method-of-moments operators on RWG basis functions.
//!
//! Currents are coefficient vectors against the [`BasisSet`]. The operators
//! assembled here are the EFIE impedance matrix `Z`, the Gram matrix `Psi`
//! and the loss matrix `R_omega = R_s Psi` of a uniform resistive sheet.

mod efie;
mod rwg;
pub mod singular;

use nalgebra::DMatrix;
use thiserror::Error;

pub use efie::{assemble_z, EfieAssembly};
pub use rwg::{build_rwg, BasisSet, LocalBasis, RwgFunction};

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("mesh has no interior edges, so no RWG functions can be built")]
    NoInteriorEdges,
    #[error("wavenumber must be positive, got {0}")]
    BadWavenumber(f64),
    #[error("surface resistance must be positive, got {0}")]
    BadSurfaceResistance(f64),
    #[error("basis has {basis} functions but the operator is {rows}x{cols}")]
    Mismatch { basis: usize, rows: usize, cols: usize },
    #[error("{0}")]
    Format(String),
}

/// Gram matrix `Psi_pq = ∫ ψ_p · ψ_q dA`, evaluated in closed form.
pub fn assemble_gram(mesh: &crate::geometry::TriangleMesh, basis: &BasisSet) -> DMatrix<f64> {
    let n = basis.len();
    let mut psi = DMatrix::<f64>::zeros(n, n);
    for t in 0..mesh.triangles().len() {
        let v = mesh.vertices(t);
        let area = mesh.triangle_area(t);
        let locals = basis.on_triangle(t);
        for a in locals {
            for b in locals {
                let moment = vertex_moment(&v, area, a.vertex, b.vertex);
                let scale = a.sign * b.sign * basis[a.function].length * basis[b.function].length / (4.0 * area * area);
                psi[(a.function, b.function)] += scale * moment;
            }
        }
    }
    psi
}

/// `∫_T (r - v_i) · (r - v_j) dA` from the barycentric moments
/// `∫ λ_a λ_b dA = A (1 + δ_ab) / 12`.
pub(crate) fn vertex_moment(v: &[crate::geometry::Vec3; 3], area: f64, i: usize, j: usize) -> f64 {
    let mut sum = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let m = if a == b { 2.0 } else { 1.0 };
            sum += m * (v[a] - v[i]).dot(&(v[b] - v[j]));
        }
    }
    area * sum / 12.0
}

/// `R_omega = R_s · Psi`.
pub fn loss_matrix(psi: &DMatrix<f64>, surface_resistance: f64) -> Result<DMatrix<f64>, OperatorError> {
    if !(surface_resistance > 0.0 && surface_resistance.is_finite()) {
        return Err(OperatorError::BadSurfaceResistance(surface_resistance));
    }
    Ok(psi * surface_resistance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_canonical, GeometryParams, Resolution, Shape, TriangleMesh, Vec3};
    use crate::quadrature::TriangleRule;

    fn unit_pair() -> TriangleMesh {
        let nodes = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
        ];
        TriangleMesh::new(nodes, vec![[0, 1, 2], [1, 3, 2]]).unwrap()
    }

    #[test]
    fn single_rwg_self_product() {
        // ψ = (√2 / (2·½)) (r - v) on each half; ∫|r - v|² over a unit right
        // triangle from its right-angle vertex is 1/6, so Psi = 2 · 2 · 1/6.
        let mesh = unit_pair();
        let basis = build_rwg(&mesh).unwrap();
        let psi = assemble_gram(&mesh, &basis);
        assert_eq!(psi.shape(), (1, 1));
        assert!((psi[(0, 0)] - 2.0 / 3.0).abs() < 1e-15);
    }

    fn plate(nx: usize, ny: usize) -> TriangleMesh {
        make_canonical(&GeometryParams::new(Shape::Plate { length: 1.0, aspect: 0.5 }, Resolution::Grid { nx, ny }))
            .unwrap()
    }

    #[test]
    fn gram_matches_quadrature_of_basis_functions() {
        let mesh = plate(4, 3);
        let basis = build_rwg(&mesh).unwrap();
        let psi = assemble_gram(&mesh, &basis);
        let rule = TriangleRule::collapsed_gauss(4);
        let n = basis.len();
        let mut reference = DMatrix::<f64>::zeros(n, n);
        for t in 0..mesh.triangles().len() {
            let area = mesh.triangle_area(t);
            let pts = rule.map(&mesh.vertices(t));
            for (r, w) in pts.iter().zip(&rule.weights) {
                for a in basis.on_triangle(t) {
                    for b in basis.on_triangle(t) {
                        let fa = basis.evaluate(&mesh, a, r);
                        let fb = basis.evaluate(&mesh, b, r);
                        reference[(a.function, b.function)] += w * area * fa.dot(&fb);
                    }
                }
            }
        }
        assert!((&psi - &reference).norm() < 1e-13 * psi.norm());
    }

    #[test]
    fn gram_is_spd_and_sparse() {
        let mesh = plate(6, 4);
        let basis = build_rwg(&mesh).unwrap();
        let psi = assemble_gram(&mesh, &basis);
        assert_eq!(psi, psi.transpose());
        let eig = psi.clone().symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&l| l > 0.0));
        for p in 0..basis.len() {
            for q in 0..basis.len() {
                let share = basis[p].triangles().iter().any(|t| basis[q].triangles().contains(t));
                if !share {
                    assert_eq!(psi[(p, q)], 0.0);
                }
            }
        }
    }

    #[test]
    fn loss_is_scaled_gram() {
        let mesh = plate(5, 3);
        let basis = build_rwg(&mesh).unwrap();
        let psi = assemble_gram(&mesh, &basis);
        let r = loss_matrix(&psi, 0.01).unwrap();
        assert!((r.trace() - 0.01 * psi.trace()).abs() < 1e-15 * psi.trace());
        for p in 0..basis.len() {
            assert_eq!(r[(p, p)], 0.01 * psi[(p, p)]);
        }
        assert_eq!(loss_matrix(&psi, 0.0), Err(OperatorError::BadSurfaceResistance(0.0)));
        assert!(loss_matrix(&psi, -1.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn loss_quadratic_form_is_nonnegative(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mesh = plate(4, 2);
            let basis = build_rwg(&mesh).unwrap();
            let r = loss_matrix(&assemble_gram(&mesh, &basis), 0.02).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x = nalgebra::DVector::<f64>::from_fn(basis.len(), |_, _| rng.random_range(-1.0..1.0));
            proptest::prop_assert!(x.dot(&(&r * &x)) >= 0.0);
        }
    }
}
