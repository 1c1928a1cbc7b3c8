use thiserror::Error;

use crate::bound::BoundError;
use crate::geometry::GeometryError;
use crate::modes::ModeError;
use crate::mom::OperatorError;
use crate::spherical::SphericalError;
use crate::subregion::SubregionError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("mom_operators: {0}")]
    Operator(#[from] OperatorError),
    #[error("spherical: {0}")]
    Spherical(#[from] SphericalError),
    #[error("modes: {0}")]
    Modes(#[from] ModeError),
    #[error("bound: {0}")]
    Bound(#[from] BoundError),
    #[error("subregion: {0}")]
    Subregion(#[from] SubregionError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Modes(ModeError::NotPositiveDefinite { .. })
                | Error::Subregion(SubregionError::SingularInducedBlock { .. })
                | Error::Subregion(SubregionError::NotPositiveDefinite { .. })
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
