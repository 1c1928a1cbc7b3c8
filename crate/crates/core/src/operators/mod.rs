//! The assembled operator set of one geometry at one frequency, and its
//! on-disk layout.

pub mod cmx;

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::AssemblyConfig;
use crate::geometry::{load_mesh, save_mesh, TriangleMesh};
use crate::linalg::condition_estimate;
use crate::mom::{assemble_gram, assemble_z, build_rwg, loss_matrix, BasisSet, OperatorError};
use crate::spherical::{assemble_s, mode_index_map, radiation_matrix, truncation_order, SphericalModeSet};
use crate::{Error, Result};

/// Inputs of [`OperatorBundle::assemble`] besides the mesh.
#[derive(Debug, Clone)]
pub struct BundleOptions {
    pub ka: f64,
    /// Surface resistance in ohms per square.
    pub surface_resistance: f64,
    /// Spherical truncation order; the default rule is used when `None`.
    pub order: Option<usize>,
    /// Circumscribing radius; taken from the mesh when `None`.
    pub radius: Option<f64>,
    /// Surface area; taken from the mesh when `None`.
    pub area: Option<f64>,
    /// Free-form geometry identifier carried into outputs.
    pub geometry: String,
    pub assembly: AssemblyConfig,
}

impl BundleOptions {
    pub fn new(ka: f64, surface_resistance: f64) -> Self {
        Self {
            ka,
            surface_resistance,
            order: None,
            radius: None,
            area: None,
            geometry: String::from("mesh"),
            assembly: AssemblyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub geometry: String,
    /// Wavenumber (rad/m).
    pub k: f64,
    /// Circumscribing radius (m).
    pub a: f64,
    pub ka: f64,
    /// Surface resistance (ohm/square).
    pub surface_resistance: f64,
    /// Spherical truncation order.
    pub order: usize,
    pub z0: f64,
    /// Surface area (m²).
    pub area: f64,
    pub num_basis: usize,
    pub num_spherical: usize,
    /// Estimated 1-norm condition number of the lossless `Z`.
    pub z_condition: f64,
    /// Set when `z_condition` exceeds the configured resonance threshold.
    pub resonance_suspected: bool,
    /// `‖Z − Zᵀ‖_F/‖Z‖_F` before symmetrization.
    pub reciprocity_residual: f64,
}

#[derive(Debug, Clone)]
pub struct OperatorBundle {
    pub mesh: TriangleMesh,
    pub basis: BasisSet,
    pub z: DMatrix<Complex64>,
    pub psi: DMatrix<f64>,
    pub r_omega: DMatrix<f64>,
    pub s: DMatrix<Complex64>,
    pub r_r: DMatrix<f64>,
    pub modes: SphericalModeSet,
    pub meta: BundleMeta,
}

/// The operators needed for radiation modes only: everything in a bundle
/// except the EFIE matrix, which dominates assembly time.
#[derive(Debug, Clone)]
pub struct RadiationOperators {
    pub basis: BasisSet,
    pub psi: DMatrix<f64>,
    pub r_omega: DMatrix<f64>,
    pub s: DMatrix<Complex64>,
    pub r_r: DMatrix<f64>,
    pub modes: SphericalModeSet,
    /// Wavenumber (rad/m).
    pub k: f64,
    /// Circumscribing radius (m).
    pub a: f64,
    pub area: f64,
}

impl RadiationOperators {
    pub fn assemble(mesh: &TriangleMesh, options: &BundleOptions) -> Result<Self> {
        let ka = options.ka;
        if !(ka > 0.0 && ka.is_finite()) {
            return Err(OperatorError::BadWavenumber(ka).into());
        }
        let a = options.radius.unwrap_or_else(|| mesh.circumscribing_radius());
        let k = ka / a;
        let basis = build_rwg(mesh)?;
        let psi = assemble_gram(mesh, &basis);
        let r_omega = loss_matrix(&psi, options.surface_resistance)?;
        let order = options.order.unwrap_or_else(|| truncation_order(ka));
        let modes = mode_index_map(order)?;
        let s = assemble_s(mesh, &basis, k, &modes, &options.assembly)?;
        let r_r = radiation_matrix(&s);
        let area = options.area.unwrap_or_else(|| mesh.total_area());
        Ok(Self { basis, psi, r_omega, s, r_r, modes, k, a, area })
    }
}

impl OperatorBundle {
    pub fn assemble(mesh: TriangleMesh, options: &BundleOptions) -> Result<Self> {
        let rad = RadiationOperators::assemble(&mesh, options)?;
        let config = &options.assembly;
        let efie = assemble_z(&mesh, &rad.basis, rad.k, config)?;
        let z_condition = condition_estimate(&efie.z);
        let meta = BundleMeta {
            geometry: options.geometry.clone(),
            k: rad.k,
            a: rad.a,
            ka: options.ka,
            surface_resistance: options.surface_resistance,
            order: rad.modes.order(),
            z0: config.z0,
            area: rad.area,
            num_basis: rad.basis.len(),
            num_spherical: rad.modes.len(),
            z_condition,
            resonance_suspected: z_condition > config.resonance_condition,
            reciprocity_residual: efie.reciprocity_residual,
        };
        let RadiationOperators { basis, psi, r_omega, s, r_r, modes, .. } = rad;
        Ok(Self { mesh, basis, z: efie.z, psi, r_omega, s, r_r, modes, meta })
    }

    /// Same geometry and frequency with a different surface resistance.
    pub fn with_surface_resistance(&self, surface_resistance: f64) -> Result<Self> {
        let mut out = self.clone();
        out.r_omega = loss_matrix(&self.psi, surface_resistance)?;
        out.meta.surface_resistance = surface_resistance;
        Ok(out)
    }

    /// `Z + R_omega`: the impedance of the resistive sheet.
    pub fn lossy_z(&self) -> DMatrix<Complex64> {
        &self.z + self.r_omega.map(|x| Complex64::new(x, 0.0))
    }

    /// Writes `mesh.rmesh`, `meta.json`, `S.modes` and one `CMX1` file per
    /// operator into `dir`, creating it if needed.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        save_mesh(&self.mesh, dir.join("mesh.rmesh"))?;
        cmx::save_complex(&self.z, dir.join("Z.cmx"))?;
        cmx::save_real(&self.psi, dir.join("Psi.cmx"))?;
        cmx::save_real(&self.r_omega, dir.join("R_omega.cmx"))?;
        cmx::save_complex(&self.s, dir.join("S.cmx"))?;
        cmx::save_real(&self.r_r, dir.join("R_r.cmx"))?;
        fs::write(dir.join("S.modes"), self.modes.header())?;
        let meta = serde_json::to_string_pretty(&self.meta).map_err(|e| OperatorError::Format(e.to_string()))?;
        fs::write(dir.join("meta.json"), meta + "\n")?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let meta: BundleMeta = serde_json::from_str(&fs::read_to_string(dir.join("meta.json"))?)
            .map_err(|e| OperatorError::Format(format!("meta.json: {e}")))?;
        let mesh = load_mesh(dir.join("mesh.rmesh"))?;
        let basis = build_rwg(&mesh)?;
        let modes = SphericalModeSet::parse_header(&fs::read_to_string(dir.join("S.modes"))?)?;
        let z = cmx::load_matrix(dir.join("Z.cmx"))?.into_complex();
        let psi = cmx::load_matrix(dir.join("Psi.cmx"))?.into_real()?;
        let r_omega = cmx::load_matrix(dir.join("R_omega.cmx"))?.into_real()?;
        let s = cmx::load_matrix(dir.join("S.cmx"))?.into_complex();
        let r_r = cmx::load_matrix(dir.join("R_r.cmx"))?.into_real()?;
        let nb = basis.len();
        for (m, name) in [(z.shape(), "Z"), (psi.shape(), "Psi"), (r_omega.shape(), "R_omega"), (r_r.shape(), "R_r")] {
            if m != (nb, nb) {
                return Err(Error::Operator(OperatorError::Format(format!(
                    "{name} is {}x{} but the mesh has {nb} basis functions",
                    m.0, m.1
                ))));
            }
        }
        if s.shape() != (modes.len(), nb) {
            return Err(Error::Operator(OperatorError::Format(format!(
                "S is {}x{}, expected {}x{nb}",
                s.nrows(),
                s.ncols(),
                modes.len()
            ))));
        }
        Ok(Self { mesh, basis, z, psi, r_omega, s, r_r, modes, meta })
    }
}
