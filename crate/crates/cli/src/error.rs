use std::path::Path;

use beamshape::af::AfError;
use beamshape::pto::PtoError;
use beamshape::radar::RadarError;
use beamshape::tpt::TptError;
use beamshape::uplane::UPlaneError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
            CliError::Unsupported(_) => 3,
        }
    }
}

impl From<AfError> for CliError {
    fn from(e: AfError) -> Self {
        match e {
            AfError::Aperiodic | AfError::GridMismatch => CliError::Unsupported(e.to_string()),
            AfError::LengthMismatch { .. } | AfError::AngleOutOfRange(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<UPlaneError> for CliError {
    fn from(e: UPlaneError) -> Self {
        match e {
            UPlaneError::NonConvexSector => CliError::Unsupported(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<TptError> for CliError {
    fn from(e: TptError) -> Self {
        match e {
            TptError::Af(a) => a.into(),
            TptError::NotSeparable => CliError::Unsupported(e.to_string()),
            TptError::HalfWidthOutOfRange(..) => CliError::Config(e.to_string()),
            TptError::WeightOutOfRange { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<PtoError> for CliError {
    fn from(e: PtoError) -> Self {
        match e {
            PtoError::Af(a) => a.into(),
            PtoError::UPlane(u) => u.into(),
            PtoError::InvalidCost(_) | PtoError::NothingToOptimize => CliError::Config(e.to_string()),
        }
    }
}

impl From<RadarError> for CliError {
    fn from(e: RadarError) -> Self {
        match e {
            RadarError::Af(a) => a.into(),
            RadarError::LengthMismatch(..) => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
