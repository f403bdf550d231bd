//! Array lattices, direction conventions and the excitation type shared by the
//! rest of the crate.
//!
//! The array lies in the yz-plane and radiates into `x > 0`. Directions are
//! given by elevation `α` (measured from the xy-plane towards +z) and azimuth
//! `φ` (measured from +x towards +y). Angles cross the public API in degrees;
//! everything internal works in radians.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Magnitude tolerance for the unit-amplitude transmit constraint.
pub const PHASE_ONLY_TOL: f64 = 1e-12;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("element counts must be at least 1, got {ny} x {nz}")]
    EmptyLattice { ny: usize, nz: usize },
    #[error("lattice needs at least one element")]
    NoElements,
    #[error("{name} = {value} deg is outside [-90, 90]")]
    AngleOutOfRange { name: &'static str, value: f64 },
    #[error("{axis} scan limits out of order: min {min} deg > max {max} deg")]
    SectorOrder {
        axis: &'static str,
        min: f64,
        max: f64,
    },
    #[error("coefficient {index} has magnitude {magnitude}; phase-only excitation requires 1")]
    NotUnitMagnitude { index: usize, magnitude: f64 },
}

fn check_angle(name: &'static str, value: f64) -> Result<(), GeometryError> {
    if value.is_finite() && (-90.0..=90.0).contains(&value) {
        Ok(())
    } else {
        Err(GeometryError::AngleOutOfRange { name, value })
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), GeometryError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::NonPositive { name, value })
    }
}

/// Free-space wavenumber for a wavelength in meters.
pub fn wavenumber(wavelength: f64) -> f64 {
    2.0 * std::f64::consts::PI / wavelength
}

/// An observation or steering direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub elevation_deg: f64,
    pub azimuth_deg: f64,
}

impl Direction {
    pub fn new(elevation_deg: f64, azimuth_deg: f64) -> Result<Self, GeometryError> {
        check_angle("elevation", elevation_deg)?;
        check_angle("azimuth", azimuth_deg)?;
        Ok(Self {
            elevation_deg,
            azimuth_deg,
        })
    }

    pub const fn boresight() -> Self {
        Self {
            elevation_deg: 0.0,
            azimuth_deg: 0.0,
        }
    }

    /// `(cos α cos φ, cos α sin φ, sin α)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (sa, ca) = self.elevation_deg.to_radians().sin_cos();
        let (sp, cp) = self.azimuth_deg.to_radians().sin_cos();
        [ca * cp, ca * sp, sa]
    }

    /// The yz-components `(k cos α sin φ, k sin α)` of the wavevector `k r̂`.
    pub fn transverse_wavevector(&self, k: f64) -> (f64, f64) {
        let (sa, ca) = self.elevation_deg.to_radians().sin_cos();
        let sp = self.azimuth_deg.to_radians().sin();
        (k * ca * sp, k * sa)
    }
}

/// Elevation/azimuth limits of the steering domain, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSector {
    pub elevation_min_deg: f64,
    pub elevation_max_deg: f64,
    pub azimuth_min_deg: f64,
    pub azimuth_max_deg: f64,
}

impl ScanSector {
    pub fn new(
        elevation_min_deg: f64,
        elevation_max_deg: f64,
        azimuth_min_deg: f64,
        azimuth_max_deg: f64,
    ) -> Result<Self, GeometryError> {
        check_angle("elevation_min", elevation_min_deg)?;
        check_angle("elevation_max", elevation_max_deg)?;
        check_angle("azimuth_min", azimuth_min_deg)?;
        check_angle("azimuth_max", azimuth_max_deg)?;
        if elevation_min_deg > elevation_max_deg {
            return Err(GeometryError::SectorOrder {
                axis: "elevation",
                min: elevation_min_deg,
                max: elevation_max_deg,
            });
        }
        if azimuth_min_deg > azimuth_max_deg {
            return Err(GeometryError::SectorOrder {
                axis: "azimuth",
                min: azimuth_min_deg,
                max: azimuth_max_deg,
            });
        }
        Ok(Self {
            elevation_min_deg,
            elevation_max_deg,
            azimuth_min_deg,
            azimuth_max_deg,
        })
    }

    /// `±elevation` by `±azimuth`.
    pub fn symmetric(elevation_deg: f64, azimuth_deg: f64) -> Result<Self, GeometryError> {
        let (e, a) = (elevation_deg.abs(), azimuth_deg.abs());
        Self::new(-e, e, -a, a)
    }

    /// Broadside only.
    pub fn broadside() -> Self {
        Self {
            elevation_min_deg: 0.0,
            elevation_max_deg: 0.0,
            azimuth_min_deg: 0.0,
            azimuth_max_deg: 0.0,
        }
    }

    pub fn contains_broadside(&self) -> bool {
        self.elevation_min_deg <= 0.0
            && self.elevation_max_deg >= 0.0
            && self.azimuth_min_deg <= 0.0
            && self.azimuth_max_deg >= 0.0
    }
}

/// Whether a regular lattice is centred on the origin or starts there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    #[default]
    Centered,
    Corner,
}

/// Layout of a regular rectangular lattice. Element `(iy, iz)` sits at
/// `origin + (iy Δy, iz Δz)` and has linear index `iz * ny + iy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularGrid {
    pub ny: usize,
    pub nz: usize,
    pub dy: f64,
    pub dz: f64,
    pub origin: (f64, f64),
}

impl RegularGrid {
    pub fn index(&self, iy: usize, iz: usize) -> usize {
        iz * self.ny + iy
    }

    pub fn y_coords(&self) -> Vec<f64> {
        (0..self.ny)
            .map(|i| self.origin.0 + i as f64 * self.dy)
            .collect()
    }

    pub fn z_coords(&self) -> Vec<f64> {
        (0..self.nz)
            .map(|i| self.origin.1 + i as f64 * self.dz)
            .collect()
    }
}

/// Element positions (meters) in the yz-plane plus the design wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayLattice {
    positions: Vec<(f64, f64)>,
    wavelength: f64,
    grid: Option<RegularGrid>,
}

impl ArrayLattice {
    /// Regular `ny × nz` lattice with spacings `dy`, `dz` (meters).
    pub fn regular(
        ny: usize,
        nz: usize,
        dy: f64,
        dz: f64,
        wavelength: f64,
        centering: Centering,
    ) -> Result<Self, GeometryError> {
        if ny == 0 || nz == 0 {
            return Err(GeometryError::EmptyLattice { ny, nz });
        }
        check_positive("dy", dy)?;
        check_positive("dz", dz)?;
        check_positive("wavelength", wavelength)?;
        let origin = match centering {
            Centering::Centered => (
                -0.5 * (ny - 1) as f64 * dy,
                -0.5 * (nz - 1) as f64 * dz,
            ),
            Centering::Corner => (0.0, 0.0),
        };
        let grid = RegularGrid {
            ny,
            nz,
            dy,
            dz,
            origin,
        };
        let ys = grid.y_coords();
        let positions = grid
            .z_coords()
            .into_iter()
            .flat_map(|z| ys.iter().map(move |&y| (y, z)))
            .collect();
        Ok(Self {
            positions,
            wavelength,
            grid: Some(grid),
        })
    }

    /// Lattice from explicit positions (meters). Treated as aperiodic.
    pub fn from_positions(
        positions: Vec<(f64, f64)>,
        wavelength: f64,
    ) -> Result<Self, GeometryError> {
        if positions.is_empty() {
            return Err(GeometryError::NoElements);
        }
        check_positive("wavelength", wavelength)?;
        Ok(Self {
            positions,
            wavelength,
            grid: None,
        })
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        wavenumber(self.wavelength)
    }

    pub fn grid(&self) -> Option<&RegularGrid> {
        self.grid.as_ref()
    }

    pub fn is_regular(&self) -> bool {
        self.grid.is_some()
    }

    /// Aperture length and height `(L, H)` used for Nyquist sampling.
    ///
    /// Regular lattices use `N Δ` per axis. Explicit lattices use the
    /// position extent plus half a wavelength.
    pub fn aperture(&self) -> (f64, f64) {
        match &self.grid {
            Some(g) => (g.ny as f64 * g.dy, g.nz as f64 * g.dz),
            None => {
                let extent = |f: fn(&(f64, f64)) -> f64| {
                    let (lo, hi) = self
                        .positions
                        .iter()
                        .map(f)
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                            (lo.min(v), hi.max(v))
                        });
                    hi - lo + 0.5 * self.wavelength
                };
                (extent(|p| p.0), extent(|p| p.1))
            }
        }
    }

    /// Point-reflected copy (`r → −r`), returned as an explicit lattice with
    /// the same element order.
    pub fn reflected(&self) -> Self {
        Self {
            positions: self.positions.iter().map(|&(y, z)| (-y, -z)).collect(),
            wavelength: self.wavelength,
            grid: None,
        }
    }
}

/// Complex element excitations `I_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Excitation {
    coefficients: Vec<Complex64>,
    phase_only: bool,
}

impl Excitation {
    /// Unit-magnitude excitation; rejects any `||I_n| − 1| > 1e-12`.
    pub fn phase_only(coefficients: Vec<Complex64>) -> Result<Self, GeometryError> {
        if let Some((index, c)) = coefficients
            .iter()
            .enumerate()
            .find(|(_, c)| (c.norm() - 1.0).abs() > PHASE_ONLY_TOL)
        {
            return Err(GeometryError::NotUnitMagnitude {
                index,
                magnitude: c.norm(),
            });
        }
        Ok(Self {
            coefficients,
            phase_only: true,
        })
    }

    /// `I_n = exp(j phase_n)`.
    pub fn from_phases(phases: &[f64]) -> Self {
        Self {
            coefficients: phases.iter().map(|&p| Complex64::cis(p)).collect(),
            phase_only: true,
        }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            coefficients: vec![Complex64::new(1.0, 0.0); n],
            phase_only: true,
        }
    }

    /// Unconstrained (amplitude and phase) excitation.
    pub fn weighted(coefficients: Vec<Complex64>) -> Self {
        Self {
            coefficients,
            phase_only: false,
        }
    }

    pub fn from_real_weights(weights: &[f64]) -> Self {
        Self::weighted(weights.iter().map(|&w| Complex64::new(w, 0.0)).collect())
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn is_phase_only(&self) -> bool {
        self.phase_only
    }

    /// `Σ |I_n|`, the largest magnitude the array factor can reach.
    pub fn total_magnitude(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).sum()
    }

    /// Phases `arg(I_n)` in radians.
    pub fn phases(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.arg()).collect()
    }
}
