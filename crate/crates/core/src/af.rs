//! Array factor evaluation.
//!
//! `AF(u) = Σ_n I_n exp(j (y_n u_y + z_n u_z))`, either summed directly at
//! arbitrary u-points or, for regular lattices on an aligned raster, through a
//! zero-padded 2-D inverse FFT.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ArrayLattice, Excitation};
use crate::uplane::{UGrid, UPoint};

/// Floor applied when converting magnitudes to dB.
pub const DB_FLOOR: f64 = -120.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AfError {
    #[error("excitation has {got} coefficients but the lattice has {expected} elements")]
    LengthMismatch { expected: usize, got: usize },
    #[error("FFT evaluation needs a regular lattice; use the direct path for aperiodic lattices")]
    Aperiodic,
    #[error("grid raster is not aligned with this lattice's FFT layout")]
    GridMismatch,
    #[error("angle {0} deg is outside [-90, 90]")]
    AngleOutOfRange(f64),
}

/// `20 log10(mag / peak)`, floored at [`DB_FLOOR`].
pub fn to_db(mag: f64, peak: f64) -> f64 {
    if peak <= 0.0 || mag <= 0.0 {
        return DB_FLOOR;
    }
    (20.0 * (mag / peak).log10()).max(DB_FLOOR)
}

/// Principal-plane cut through the beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutAxis {
    /// `φ = φ_0 = 0`, sweeping `α`: `u = (0, k (sin α − sin α_0))`.
    Elevation,
    /// `α = α_0 = 0`, sweeping `φ`: `u = (k (sin φ − sin φ_0), 0)`.
    Azimuth,
}

/// Where a pattern was sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PatternDomain {
    Points,
    /// In-boundary points of a raster with the given step; `indices` are the
    /// raster coordinates of each point.
    Grid {
        step: (f64, f64),
        indices: Vec<(i64, i64)>,
    },
    Cut {
        axis: CutAxis,
        angles_deg: Vec<f64>,
        steer_deg: f64,
    },
}

/// Complex array-factor samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    pub domain: PatternDomain,
    pub points: Vec<UPoint>,
    pub values: Vec<Complex64>,
    /// Wavenumber the points refer to.
    pub k: f64,
    /// `Σ |I_n|` of the excitation that produced the pattern.
    pub reference: f64,
}

impl Pattern {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Magnitudes in dB relative to the pattern's own peak.
    pub fn db(&self) -> Vec<f64> {
        let peak = self.peak();
        self.values.iter().map(|v| to_db(v.norm(), peak)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.peak() == 0.0
    }

    /// Rebuild a cut from stored magnitudes (phase is not retained).
    pub fn from_cut_magnitudes(
        axis: CutAxis,
        angles_deg: Vec<f64>,
        steer_deg: f64,
        k: f64,
        magnitudes: &[f64],
    ) -> Self {
        let points = cut_points(axis, &angles_deg, steer_deg, k);
        Self {
            domain: PatternDomain::Cut {
                axis,
                angles_deg,
                steer_deg,
            },
            points,
            values: magnitudes.iter().map(|&m| Complex64::new(m, 0.0)).collect(),
            k,
            reference: magnitudes.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Rebuild a raster pattern from stored magnitudes.
    pub fn from_grid_magnitudes(
        points: Vec<UPoint>,
        indices: Vec<(i64, i64)>,
        step: (f64, f64),
        k: f64,
        magnitudes: &[f64],
    ) -> Self {
        Self {
            domain: PatternDomain::Grid { step, indices },
            points,
            values: magnitudes.iter().map(|&m| Complex64::new(m, 0.0)).collect(),
            k,
            reference: magnitudes.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Local maxima of a raster pattern (8-neighbourhood over in-domain
    /// points), as `(sample index, dB relative to peak)`. Empty for other
    /// domains.
    pub fn grid_lobes(&self) -> Vec<(usize, f64)> {
        let PatternDomain::Grid { indices, .. } = &self.domain else {
            return Vec::new();
        };
        let lookup: HashMap<(i64, i64), usize> =
            indices.iter().enumerate().map(|(n, &ij)| (ij, n)).collect();
        let mags = self.magnitudes();
        let peak = self.peak();
        let mut out = Vec::new();
        for (n, &(i, j)) in indices.iter().enumerate() {
            let m = mags[n];
            let mut is_max = true;
            'nb: for di in -1..=1 {
                for dj in -1..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    if let Some(&o) = lookup.get(&(i + di, j + dj)) {
                        if mags[o] > m {
                            is_max = false;
                            break 'nb;
                        }
                    }
                }
            }
            if is_max && m > 0.0 {
                out.push((n, to_db(m, peak)));
            }
        }
        out
    }

    /// Whether raster sample `n` has a missing 4-neighbour (lies on the
    /// domain edge).
    pub fn on_grid_edge(&self, n: usize) -> bool {
        let PatternDomain::Grid { indices, .. } = &self.domain else {
            return false;
        };
        let (i, j) = indices[n];
        let set: HashSet<(i64, i64)> = indices.iter().copied().collect();
        let present = |ij: (i64, i64)| set.contains(&ij);
        !(present((i + 1, j)) && present((i - 1, j)) && present((i, j + 1)) && present((i, j - 1)))
    }
}

fn check_len(lattice: &ArrayLattice, excitation: &Excitation) -> Result<(), AfError> {
    if lattice.len() != excitation.len() {
        return Err(AfError::LengthMismatch {
            expected: lattice.len(),
            got: excitation.len(),
        });
    }
    Ok(())
}

fn direct_sum(positions: &[(f64, f64)], coeffs: &[Complex64], p: &UPoint) -> Complex64 {
    positions
        .iter()
        .zip(coeffs)
        .fold(Complex64::new(0.0, 0.0), |acc, (&(y, z), &c)| {
            acc + c * Complex64::cis(y * p.uy + z * p.uz)
        })
}

/// Direct summation at arbitrary points. Each point is reduced in element
/// order, so results do not depend on how the points are partitioned.
pub fn evaluate_direct(
    lattice: &ArrayLattice,
    excitation: &Excitation,
    points: &[UPoint],
) -> Result<Pattern, AfError> {
    check_len(lattice, excitation)?;
    let values = evaluate_values(lattice, excitation, points);
    Ok(Pattern {
        domain: PatternDomain::Points,
        points: points.to_vec(),
        values,
        k: lattice.wavenumber(),
        reference: excitation.total_magnitude(),
    })
}

fn evaluate_values(lattice: &ArrayLattice, excitation: &Excitation, points: &[UPoint]) -> Vec<Complex64> {
    let positions = lattice.positions();
    let coeffs = excitation.coefficients();
    points
        .par_iter()
        .map(|p| direct_sum(positions, coeffs, p))
        .collect()
}

/// Direct summation over a [`UGrid`], keeping the raster layout.
pub fn evaluate_grid_direct(
    lattice: &ArrayLattice,
    excitation: &Excitation,
    grid: &UGrid,
) -> Result<Pattern, AfError> {
    check_len(lattice, excitation)?;
    Ok(Pattern {
        domain: PatternDomain::Grid {
            step: grid.step,
            indices: grid.indices.clone(),
        },
        points: grid.points.clone(),
        values: evaluate_values(lattice, excitation, &grid.points),
        k: grid.boundary.k,
        reference: excitation.total_magnitude(),
    })
}

/// FFT evaluation over a [`UGrid`] built for this lattice.
pub fn evaluate_fft(
    lattice: &ArrayLattice,
    excitation: &Excitation,
    grid: &UGrid,
) -> Result<Pattern, AfError> {
    check_len(lattice, excitation)?;
    let g = lattice.grid().ok_or(AfError::Aperiodic)?;
    let layout = grid.fft.ok_or(AfError::GridMismatch)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let aligned = |step: f64, d: f64, n: usize| ((step * d * n as f64) / two_pi - 1.0).abs() < 1e-12;
    if !(aligned(grid.step.0, g.dy, layout.ny) && aligned(grid.step.1, g.dz, layout.nz))
        || layout.ny < g.ny
        || layout.nz < g.nz
    {
        return Err(AfError::GridMismatch);
    }

    let (ny, nz) = (layout.ny, layout.nz);
    let mut buf = vec![Complex64::new(0.0, 0.0); ny * nz];
    let coeffs = excitation.coefficients();
    for iz in 0..g.nz {
        for iy in 0..g.ny {
            buf[iz * ny + iy] = coeffs[g.index(iy, iz)];
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft_y = planner.plan_fft_inverse(ny);
    for row in buf.chunks_exact_mut(ny).take(g.nz) {
        fft_y.process(row);
    }
    let fft_z = planner.plan_fft_inverse(nz);
    let mut column = vec![Complex64::new(0.0, 0.0); nz];
    for iy in 0..ny {
        for iz in 0..nz {
            column[iz] = buf[iz * ny + iy];
        }
        fft_z.process(&mut column);
        for iz in 0..nz {
            buf[iz * ny + iy] = column[iz];
        }
    }

    let (y0, z0) = g.origin;
    let values = grid
        .indices
        .iter()
        .map(|&(i, j)| {
            let v = buf[j.rem_euclid(nz as i64) as usize * ny + i.rem_euclid(ny as i64) as usize];
            v * Complex64::cis(y0 * i as f64 * grid.step.0 + z0 * j as f64 * grid.step.1)
        })
        .collect();
    Ok(Pattern {
        domain: PatternDomain::Grid {
            step: grid.step,
            indices: grid.indices.clone(),
        },
        points: grid.points.clone(),
        values,
        k: grid.boundary.k,
        reference: excitation.total_magnitude(),
    })
}

/// u-points of a principal-plane cut at `angles_deg`, steered to `steer_deg`
/// in the same plane.
pub fn cut_points(axis: CutAxis, angles_deg: &[f64], steer_deg: f64, k: f64) -> Vec<UPoint> {
    let s0 = steer_deg.to_radians().sin();
    angles_deg
        .iter()
        .map(|a| {
            let u = k * (a.to_radians().sin() - s0);
            match axis {
                CutAxis::Elevation => UPoint::new(0.0, u),
                CutAxis::Azimuth => UPoint::new(u, 0.0),
            }
        })
        .collect()
}

/// Evenly spaced angles from `from` to `to` inclusive.
pub fn angle_range(from_deg: f64, to_deg: f64, step_deg: f64) -> Vec<f64> {
    crate::uplane::sweep(from_deg, to_deg, step_deg)
}

fn principal_cut(
    axis: CutAxis,
    lattice: &ArrayLattice,
    excitation: &Excitation,
    angles_deg: &[f64],
    steer_deg: f64,
    k: f64,
) -> Result<Pattern, AfError> {
    check_len(lattice, excitation)?;
    if let Some(&a) = angles_deg
        .iter()
        .chain(std::iter::once(&steer_deg))
        .find(|a| !(-90.0..=90.0).contains(*a))
    {
        return Err(AfError::AngleOutOfRange(a));
    }
    let points = cut_points(axis, angles_deg, steer_deg, k);
    let values = evaluate_values(lattice, excitation, &points);
    Ok(Pattern {
        domain: PatternDomain::Cut {
            axis,
            angles_deg: angles_deg.to_vec(),
            steer_deg,
        },
        points,
        values,
        k,
        reference: excitation.total_magnitude(),
    })
}

/// Elevation cut (`φ = φ_0 = 0`) at wavenumber `k`, steered to `α_0`.
pub fn elevation_cut(
    lattice: &ArrayLattice,
    excitation: &Excitation,
    angles_deg: &[f64],
    steer_elevation_deg: f64,
    k: f64,
) -> Result<Pattern, AfError> {
    principal_cut(CutAxis::Elevation, lattice, excitation, angles_deg, steer_elevation_deg, k)
}

/// Azimuth cut (`α = α_0 = 0`) at wavenumber `k`, steered to `φ_0`.
pub fn azimuth_cut(
    lattice: &ArrayLattice,
    excitation: &Excitation,
    angles_deg: &[f64],
    steer_azimuth_deg: f64,
    k: f64,
) -> Result<Pattern, AfError> {
    principal_cut(CutAxis::Azimuth, lattice, excitation, angles_deg, steer_azimuth_deg, k)
}
