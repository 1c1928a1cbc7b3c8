//! Operators of a controlled sub-region with induced currents elsewhere.
//!
//! Basis functions are split into controlled (`a`) and induced (`g`) sets.
//! The induced currents follow from the `g` rows of the impedance equation,
//! `I_g = −Z_gg⁻¹ Z_ga I_a = Z_t I_a`, and every quadratic form of the full
//! structure is pulled back onto `I_a` by the congruence `[1; Z_t]`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::config::CHOLESKY_SHIFT;
use crate::geometry::TriangleMesh;
use crate::linalg::{condition_estimate, to_complex, CMatrix};
use crate::modes::{radiation_modes, radiation_modes_real, ModeError, ModeSpectrum};
use crate::mom::BasisSet;
use crate::operators::{cmx, OperatorBundle};

#[derive(Debug, Error, PartialEq)]
pub enum SubregionError {
    #[error("no basis function lies entirely on the selected labels")]
    EmptyControlled,
    #[error("sub-region does not match the operators: {0}")]
    Mismatch(String),
    #[error(
        "induced block Z_gg is numerically singular (condition estimate {condition:e}); \
         the remainder of the structure may be at an internal resonance"
    )]
    SingularInducedBlock { condition: f64 },
    #[error(
        "reduced loss matrix is not positive definite even after a diagonal shift (smallest eigenvalue {smallest:e})"
    )]
    NotPositiveDefinite { smallest: f64 },
    #[error("reference eigenvalue must be positive, got {0}")]
    BadReference(f64),
    #[error("{0}")]
    Io(String),
}

/// Condition estimates of `Z_gg` above this are treated as singular.
const SINGULAR_CONDITION: f64 = 1e14;

/// Condition estimates of `Z_gg` above this are flagged as a possible
/// internal resonance.
const RESONANCE_CONDITION: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubregionSpec {
    /// Region labels whose triangles are controlled.
    pub labels: Vec<u32>,
    /// Controlled basis functions, ascending.
    pub controlled: Vec<usize>,
    /// Induced basis functions, ascending.
    pub induced: Vec<usize>,
}

impl SubregionSpec {
    pub fn num_basis(&self) -> usize {
        self.controlled.len() + self.induced.len()
    }
}

/// Splits the basis by region labels: a function is controlled when both of
/// its triangles carry one of `labels`.
pub fn partition(mesh: &TriangleMesh, basis: &BasisSet, labels: &[u32]) -> Result<SubregionSpec, SubregionError> {
    if basis.num_triangles() != mesh.triangles().len() {
        return Err(SubregionError::Mismatch(format!(
            "basis spans {} triangles, mesh has {}",
            basis.num_triangles(),
            mesh.triangles().len()
        )));
    }
    let selected: BTreeSet<u32> = labels.iter().copied().collect();
    let tri_labels = mesh.labels();
    let (controlled, induced): (Vec<usize>, Vec<usize>) = (0..basis.len())
        .partition(|&n| basis.functions()[n].triangles().iter().all(|&t| selected.contains(&tri_labels[t])));
    if controlled.is_empty() {
        return Err(SubregionError::EmptyControlled);
    }
    Ok(SubregionSpec { labels: selected.into_iter().collect(), controlled, induced })
}

/// Every non-zero label present on the mesh.
pub fn all_region_labels(mesh: &TriangleMesh) -> Vec<u32> {
    let set: BTreeSet<u32> = mesh.labels().iter().copied().filter(|&l| l != 0).collect();
    set.into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct ReducedOperators {
    pub spec: SubregionSpec,
    /// `|g| × |a|` map from controlled to induced currents.
    pub z_t: CMatrix,
    pub psi_p: CMatrix,
    pub s_p: CMatrix,
    pub r_omega_p: CMatrix,
    pub r_r_p: CMatrix,
    pub surface_resistance: f64,
    /// 1-norm condition estimate of `Z_gg` (1 when there is no induced part).
    pub zgg_condition: f64,
    pub resonance_suspected: bool,
}

fn block(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn columns(m: &CMatrix, cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Pulls the bundle's operators back onto the controlled currents, using
/// the lossy impedance `Z + R_Ω`.
pub fn reduce_operators(bundle: &OperatorBundle, spec: &SubregionSpec) -> Result<ReducedOperators, SubregionError> {
    let nb = bundle.basis.len();
    if spec.num_basis() != nb || spec.controlled.iter().chain(&spec.induced).any(|&i| i >= nb) {
        return Err(SubregionError::Mismatch(format!(
            "partition covers {} functions, bundle has {nb}",
            spec.num_basis()
        )));
    }
    let (a, g) = (&spec.controlled, &spec.induced);
    let z = bundle.lossy_z();
    let (z_t, zgg_condition) = if g.is_empty() {
        (CMatrix::zeros(0, a.len()), 1.0)
    } else {
        let zgg = block(&z, g, g);
        let condition = condition_estimate(&zgg);
        if condition.is_nan() || condition >= SINGULAR_CONDITION {
            return Err(SubregionError::SingularInducedBlock { condition });
        }
        let rhs = -block(&z, g, a);
        let z_t = zgg.lu().solve(&rhs).ok_or(SubregionError::SingularInducedBlock { condition })?;
        (z_t, condition)
    };

    let psi = to_complex(&bundle.psi);
    let zh = z_t.adjoint();
    let psi_ag_zt = block(&psi, a, g) * &z_t;
    let psi_p = block(&psi, a, a) + &psi_ag_zt + psi_ag_zt.adjoint() + &zh * block(&psi, g, g) * &z_t;
    let psi_p = hermitian_part(&psi_p);
    let s_p = columns(&bundle.s, a) + columns(&bundle.s, g) * &z_t;
    let rs = bundle.meta.surface_resistance;
    let r_omega_p = &psi_p * Complex64::new(rs, 0.0);
    let r_r_p = hermitian_part(&(s_p.adjoint() * &s_p));
    Ok(ReducedOperators {
        spec: spec.clone(),
        z_t,
        psi_p,
        s_p,
        r_omega_p,
        r_r_p,
        surface_resistance: rs,
        zgg_condition,
        resonance_suspected: zgg_condition > RESONANCE_CONDITION,
    })
}

impl ReducedOperators {
    /// Full current `[I_a; Z_t I_a]` in the bundle's basis ordering.
    pub fn expand(&self, controlled: &nalgebra::DVector<Complex64>) -> nalgebra::DVector<Complex64> {
        let induced = &self.z_t * controlled;
        let mut full = nalgebra::DVector::zeros(self.spec.num_basis());
        for (k, &i) in self.spec.controlled.iter().enumerate() {
            full[i] = controlled[k];
        }
        for (k, &i) in self.spec.induced.iter().enumerate() {
            full[i] = induced[k];
        }
        full
    }

    /// Writes `Z_t.cmx`, `Psi_p.cmx`, `S_p.cmx`, `R_omega_p.cmx`,
    /// `R_r_p.cmx` and `subregion.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), crate::Error> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        cmx::save_complex(&self.z_t, dir.join("Z_t.cmx"))?;
        cmx::save_complex(&self.psi_p, dir.join("Psi_p.cmx"))?;
        cmx::save_complex(&self.s_p, dir.join("S_p.cmx"))?;
        cmx::save_complex(&self.r_omega_p, dir.join("R_omega_p.cmx"))?;
        cmx::save_complex(&self.r_r_p, dir.join("R_r_p.cmx"))?;
        let meta = serde_json::json!({
            "labels": self.spec.labels,
            "controlled": self.spec.controlled,
            "induced": self.spec.induced,
            "surface_resistance": self.surface_resistance,
            "zgg_condition": self.zgg_condition,
            "resonance_suspected": self.resonance_suspected,
        });
        let text = serde_json::to_string_pretty(&meta).map_err(|e| SubregionError::Io(e.to_string()))?;
        fs::write(dir.join("subregion.json"), text + "\n")?;
        Ok(())
    }
}

/// Radiation modes of a sub-region with strengths divided by a reference.
#[derive(Debug, Clone)]
pub struct SubregionModes {
    pub spectrum: ModeSpectrum,
    pub normalized: Vec<f64>,
    pub reference: f64,
    /// Diagonal shift added to `R_Ω,p` when it was not positive definite.
    pub shift: Option<f64>,
}

/// Strongest radiation mode of the whole structure, the usual reference.
pub fn full_reference(bundle: &OperatorBundle) -> Result<f64, ModeError> {
    Ok(radiation_modes_real(&bundle.s, &bundle.r_omega, Some(1))?.rho[0])
}

pub fn subregion_modes(
    reduced: &ReducedOperators,
    count: Option<usize>,
    reference: f64,
) -> Result<SubregionModes, crate::Error> {
    if !(reference > 0.0 && reference.is_finite()) {
        return Err(SubregionError::BadReference(reference).into());
    }
    let (spectrum, shift) = match radiation_modes(&reduced.s_p, &reduced.r_omega_p, count) {
        Ok(s) => (s, None),
        Err(ModeError::NotPositiveDefinite { .. }) => {
            let n = reduced.r_omega_p.nrows();
            let shift = CHOLESKY_SHIFT * reduced.r_omega_p.trace().re / n as f64;
            let mut shifted = reduced.r_omega_p.clone();
            for i in 0..n {
                shifted[(i, i)] += Complex64::new(shift, 0.0);
            }
            match radiation_modes(&reduced.s_p, &shifted, count) {
                Ok(s) => (s, Some(shift)),
                Err(ModeError::NotPositiveDefinite { smallest }) => {
                    return Err(SubregionError::NotPositiveDefinite { smallest }.into())
                }
                Err(e) => return Err(e.into()),
            }
        }
        Err(e) => return Err(e.into()),
    };
    let normalized = spectrum.rho.iter().map(|r| r / reference).collect();
    Ok(SubregionModes { spectrum, normalized, reference, shift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_canonical, plate_case, tag_subregions, GeometryParams, PlateCase, Resolution, Shape};
    use crate::linalg::CVector;
    use crate::operators::BundleOptions;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plate(nx: usize, ny: usize) -> TriangleMesh {
        make_canonical(&GeometryParams::new(Shape::Plate { length: 1.0, aspect: 0.5 }, Resolution::Grid { nx, ny }))
            .unwrap()
    }

    fn case_bundle(case: PlateCase, nx: usize, ny: usize, ka: f64) -> OperatorBundle {
        let mesh = tag_subregions(&plate(nx, ny), &plate_case(case, 1.0, 0.5)).unwrap();
        OperatorBundle::assemble(mesh, &BundleOptions::new(ka, 0.01)).unwrap()
    }

    fn random_current(n: usize, seed: u64) -> CVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CVector::from_fn(n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    /// Controlled functions counted directly: interior edges whose two
    /// triangles both lie in the labelled patch.
    fn patch_interior_edges(mesh: &TriangleMesh, label: u32) -> usize {
        mesh.edges()
            .iter()
            .filter(|e| e.is_interior() && e.triangles.iter().all(|&t| mesh.labels()[t] == label))
            .count()
    }

    #[test]
    fn partition_examples() {
        let mesh = tag_subregions(&plate(20, 10), &plate_case(PlateCase::A, 1.0, 0.5)).unwrap();
        let basis = crate::mom::build_rwg(&mesh).unwrap();
        let spec = partition(&mesh, &basis, &[1]).unwrap();
        // 2×1 cells: two diagonals and one shared side.
        assert_eq!(spec.controlled.len(), 3);
        assert_eq!(spec.controlled.len(), patch_interior_edges(&mesh, 1));
        assert_eq!(spec.num_basis(), basis.len());

        let all = partition(&mesh, &basis, &[0, 1]).unwrap();
        assert!(all.induced.is_empty());
        assert_eq!(partition(&mesh, &basis, &[]), Err(SubregionError::EmptyControlled));
        assert_eq!(partition(&mesh, &basis, &[7]), Err(SubregionError::EmptyControlled));
    }

    #[test]
    fn identity_reduction() {
        let bundle = case_bundle(PlateCase::A, 10, 10, 0.5);
        let spec = partition(&bundle.mesh, &bundle.basis, &[0, 1]).unwrap();
        let red = reduce_operators(&bundle, &spec).unwrap();
        assert_eq!(red.z_t.nrows(), 0);
        assert!((&red.psi_p - to_complex(&bundle.psi)).norm() < 1e-15);
        assert!((&red.s_p - &bundle.s).norm() < 1e-15);
        let reference = full_reference(&bundle).unwrap();
        let sub = subregion_modes(&red, None, reference).unwrap();
        let full = radiation_modes_real(&bundle.s, &bundle.r_omega, None).unwrap();
        for (a, b) in sub.spectrum.rho.iter().zip(&full.rho) {
            assert!((a - b).abs() <= 1e-8 * full.rho[0]);
        }
        assert!((sub.normalized[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn block_identities() {
        let bundle = case_bundle(PlateCase::C, 10, 10, 0.56);
        let spec = partition(&bundle.mesh, &bundle.basis, &[1, 2]).unwrap();
        let red = reduce_operators(&bundle, &spec).unwrap();
        let z = bundle.lossy_z();
        let psi = to_complex(&bundle.psi);
        for seed in 0..5 {
            let ia = random_current(spec.controlled.len(), seed);
            let full = red.expand(&ia);
            // g rows of (Z + R_Ω) I vanish.
            let zi = &z * &full;
            let g_res: f64 = spec.induced.iter().map(|&i| zi[i].norm_sqr()).sum::<f64>().sqrt();
            let scale: f64 = spec
                .induced
                .iter()
                .map(|&i| (z.row(i).map(|c| c.norm()) * full.map(|c| c.norm()))[0].powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(g_res < 1e-10 * scale, "{g_res} vs {scale}");
            let lhs = (full.adjoint() * &psi * &full)[0];
            let rhs = (ia.adjoint() * &red.psi_p * &ia)[0];
            assert!((lhs - rhs).norm() < 1e-10 * lhs.norm());
            let sf = &bundle.s * &full;
            assert!((&sf - &red.s_p * &ia).norm() < 1e-10 * sf.norm());
        }
    }

    #[test]
    fn reduced_spectrum_is_dominated_by_full() {
        let bundle = case_bundle(PlateCase::E, 10, 10, 0.56);
        let spec = partition(&bundle.mesh, &bundle.basis, &all_region_labels(&bundle.mesh)).unwrap();
        let red = reduce_operators(&bundle, &spec).unwrap();
        let reference = full_reference(&bundle).unwrap();
        let sub = subregion_modes(&red, None, reference).unwrap();
        let full = radiation_modes_real(&bundle.s, &bundle.r_omega, None).unwrap();
        for (a, b) in sub.spectrum.rho.iter().zip(&full.rho) {
            assert!(*a <= b * (1.0 + 1e-9), "{a} > {b}");
        }
        assert!(sub.normalized[0] <= 1.0 + 1e-9);
        assert!(sub.shift.is_none());
    }

    #[test]
    fn rejects_foreign_partition() {
        let bundle = case_bundle(PlateCase::A, 10, 10, 0.5);
        let spec = SubregionSpec { labels: vec![1], controlled: vec![0], induced: vec![1, 2] };
        assert!(matches!(reduce_operators(&bundle, &spec), Err(SubregionError::Mismatch(_))));
    }

    #[test]
    fn rank_deficient_loss_is_shifted() {
        let bundle = case_bundle(PlateCase::A, 10, 10, 0.5);
        let spec = partition(&bundle.mesh, &bundle.basis, &[0, 1]).unwrap();
        let mut red = reduce_operators(&bundle, &spec).unwrap();
        // Duplicate a column so the loss matrix loses rank.
        let n = red.r_omega_p.nrows();
        let c0 = red.r_omega_p.column(0).into_owned();
        let mut p = CMatrix::from_fn(n, n, |i, j| if j < 2 && i < 2 { c0[0] } else { red.r_omega_p[(i, j)] });
        for i in 2..n {
            p[(i, 1)] = red.r_omega_p[(i, 0)];
            p[(1, i)] = red.r_omega_p[(0, i)];
        }
        red.r_omega_p = p;
        red.s_p.set_column(1, &red.s_p.column(0).into_owned());
        let sub = subregion_modes(&red, Some(3), 1.0).unwrap();
        assert!(sub.shift.is_some());
        assert!(sub.spectrum.rho.iter().all(|r| r.is_finite()));
    }

    #[test]
    fn bad_reference() {
        let bundle = case_bundle(PlateCase::A, 10, 10, 0.5);
        let spec = partition(&bundle.mesh, &bundle.basis, &[0, 1]).unwrap();
        let red = reduce_operators(&bundle, &spec).unwrap();
        assert!(subregion_modes(&red, None, 0.0).is_err());
    }

    #[test]
    fn export_writes_all_files() {
        let bundle = case_bundle(PlateCase::A, 10, 10, 0.5);
        let spec = partition(&bundle.mesh, &bundle.basis, &[1]).unwrap();
        let red = reduce_operators(&bundle, &spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        red.save(dir.path()).unwrap();
        for f in ["Z_t.cmx", "Psi_p.cmx", "S_p.cmx", "R_omega_p.cmx", "R_r_p.cmx", "subregion.json"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let zt = cmx::load_matrix(dir.path().join("Z_t.cmx")).unwrap().into_complex();
        assert_eq!(zt, red.z_t);
    }
}
