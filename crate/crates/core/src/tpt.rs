//! Time-varying phase tapering.
//!
//! Real weights `w_n` are realised with unit-magnitude excitations by
//! alternating `I^o = exp(−j acos w)` and `I^e = exp(+j acos w)` from pulse
//! to pulse; the half-sum of the two array factors is the `w`-weighted one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::af::{self, AfError, CutAxis, Pattern};
use crate::geometry::{ArrayLattice, Excitation};
use crate::uplane::{UGrid, UPoint};

/// Weights beyond `±1` by at most this much are clamped.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TptError {
    #[error("desired half-width {0} deg must lie in (0, 90)")]
    HalfWidthOutOfRange(f64),
    #[error("separable design needs a regular lattice")]
    NotSeparable,
    #[error("weight {value} at element {index} has magnitude above 1")]
    WeightOutOfRange { index: usize, value: f64 },
    #[error(transparent)]
    Af(#[from] AfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    Rectangular,
    #[default]
    Hamming,
}

impl Window {
    /// Window value for element `n` of `len`.
    pub fn value(self, n: usize, len: usize) -> f64 {
        match self {
            Window::Rectangular => 1.0,
            Window::Hamming if len < 2 => 1.0,
            Window::Hamming => {
                0.54 - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / (len - 1) as f64).cos()
            }
        }
    }
}

/// Inverse transform of the ideal flat-top `|u| ≤ u_d`, sampled at the
/// element positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// `sin(u_d ζ)/(u_d ζ)`.
    #[default]
    Sinc,
    /// `sin(u_d ζ)/(N sin(u_d ζ/N))`, periodic over the axis length `N`.
    Dirichlet,
}

impl Kernel {
    pub fn value(self, u_d: f64, zeta: f64, len: usize) -> f64 {
        let x = u_d * zeta;
        if x.abs() < 1e-12 {
            return 1.0;
        }
        match self {
            Kernel::Sinc => x.sin() / x,
            Kernel::Dirichlet => {
                let n = len as f64;
                x.sin() / (n * (x / n).sin())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignWarning {
    /// The kernel's first null `π/u_d` lies outside the half-aperture: the
    /// requested beam is narrower than the aperture can broaden to.
    KernelWiderThanAperture,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDesign {
    /// `k sin φ_d`, absent for elevation-only designs.
    pub u_d_y: Option<f64>,
    pub u_d_z: f64,
    pub window: Window,
    pub kernel: Kernel,
    pub w_y: Vec<f64>,
    pub w_z: Vec<f64>,
    /// Per-element weights in lattice order, `w_y[iy] · w_z[iz]`.
    pub weights: Vec<f64>,
    pub warnings: Vec<DesignWarning>,
}

fn axis_weights(
    coords: &[f64],
    u_d: f64,
    window: Window,
    kernel: Kernel,
    aperture: f64,
    warnings: &mut Vec<DesignWarning>,
) -> Vec<f64> {
    let n = coords.len();
    if std::f64::consts::PI / u_d > 0.5 * aperture && !warnings.contains(&DesignWarning::KernelWiderThanAperture) {
        warnings.push(DesignWarning::KernelWiderThanAperture);
    }
    let raw: Vec<f64> = coords
        .iter()
        .enumerate()
        .map(|(i, &z)| kernel.value(u_d, z, n) * window.value(i, n))
        .collect();
    let max = raw.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    raw.into_iter().map(|w| w / max).collect()
}

/// Separable flat-top weights for half-widths `α_d` (elevation) and
/// optionally `φ_d` (azimuth). Without `φ_d` all `w^y = 1`.
pub fn design_weights(
    lattice: &ArrayLattice,
    alpha_d_deg: f64,
    phi_d_deg: Option<f64>,
    window: Window,
    kernel: Kernel,
    k: f64,
) -> Result<WeightDesign, TptError> {
    for a in std::iter::once(alpha_d_deg).chain(phi_d_deg) {
        if !(a > 0.0 && a < 90.0) {
            return Err(TptError::HalfWidthOutOfRange(a));
        }
    }
    let g = lattice.grid().ok_or(TptError::NotSeparable)?;
    let (ap_y, ap_z) = lattice.aperture();
    let mut warnings = Vec::new();
    let u_d_z = k * alpha_d_deg.to_radians().sin();
    let w_z = axis_weights(&g.z_coords(), u_d_z, window, kernel, ap_z, &mut warnings);
    let u_d_y = phi_d_deg.map(|p| k * p.to_radians().sin());
    let w_y = match u_d_y {
        Some(u) => axis_weights(&g.y_coords(), u, window, kernel, ap_y, &mut warnings),
        None => vec![1.0; g.ny],
    };
    let mut weights = vec![0.0; lattice.len()];
    for iz in 0..g.nz {
        for iy in 0..g.ny {
            weights[g.index(iy, iz)] = w_y[iy] * w_z[iz];
        }
    }
    Ok(WeightDesign {
        u_d_y,
        u_d_z,
        window,
        kernel,
        w_y,
        w_z,
        weights,
        warnings,
    })
}

/// Odd and even pulse excitations realising a set of real weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulsePair {
    pub odd: Excitation,
    pub even: Excitation,
}

impl PulsePair {
    /// `Re(I^o)`, the effective weights.
    pub fn weights(&self) -> Vec<f64> {
        self.odd.coefficients().iter().map(|c| c.re).collect()
    }
}

pub fn odd_even_excitations(weights: &[f64]) -> Result<PulsePair, TptError> {
    let mut theta = Vec::with_capacity(weights.len());
    for (index, &w) in weights.iter().enumerate() {
        if !(w.abs() <= 1.0 + CLAMP_TOL) {
            return Err(TptError::WeightOutOfRange { index, value: w });
        }
        theta.push(w.clamp(-1.0, 1.0).acos());
    }
    let odd: Vec<f64> = theta.iter().map(|t| -t).collect();
    Ok(PulsePair {
        odd: Excitation::from_phases(&odd),
        even: Excitation::from_phases(&theta),
    })
}

fn half_sum(mut a: Pattern, b: Pattern, pair: &PulsePair) -> Pattern {
    for (x, y) in a.values.iter_mut().zip(b.values) {
        *x = 0.5 * (*x + y);
    }
    a.reference = pair.weights().iter().map(|w| w.abs()).sum();
    a
}

/// `½ (AF^o + AF^e)` at arbitrary points.
pub fn effective_af(lattice: &ArrayLattice, pair: &PulsePair, points: &[UPoint]) -> Result<Pattern, TptError> {
    let o = af::evaluate_direct(lattice, &pair.odd, points)?;
    let e = af::evaluate_direct(lattice, &pair.even, points)?;
    Ok(half_sum(o, e, pair))
}

/// `½ (AF^o + AF^e)` on a u-plane grid, through the FFT path when the
/// lattice is regular.
pub fn effective_af_grid(lattice: &ArrayLattice, pair: &PulsePair, grid: &UGrid) -> Result<Pattern, TptError> {
    let eval = |e: &Excitation| {
        if lattice.is_regular() && grid.fft.is_some() {
            af::evaluate_fft(lattice, e, grid)
        } else {
            af::evaluate_grid_direct(lattice, e, grid)
        }
    };
    let o = eval(&pair.odd)?;
    let e = eval(&pair.even)?;
    Ok(half_sum(o, e, pair))
}

/// `½ (AF^o + AF^e)` along a principal-plane cut.
pub fn effective_cut(
    lattice: &ArrayLattice,
    pair: &PulsePair,
    axis: CutAxis,
    angles_deg: &[f64],
    steer_deg: f64,
    k: f64,
) -> Result<Pattern, TptError> {
    let cut = |e: &Excitation| match axis {
        CutAxis::Elevation => af::elevation_cut(lattice, e, angles_deg, steer_deg, k),
        CutAxis::Azimuth => af::azimuth_cut(lattice, e, angles_deg, steer_deg, k),
    };
    let o = cut(&pair.odd)?;
    let e = cut(&pair.even)?;
    Ok(half_sum(o, e, pair))
}

/// Phases of the odd and even excitations (radians), per element.
pub fn pulse_phases(pair: &PulsePair) -> (Vec<f64>, Vec<f64>) {
    (pair.odd.phases(), pair.even.phases())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::af::angle_range;
    use crate::geometry::Centering;
    use crate::metrics::{measure_metrics, MainLobeRegion};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn line(n: usize) -> ArrayLattice {
        ArrayLattice::regular(1, n, 0.5, 0.5, 1.0, Centering::Centered).unwrap()
    }

    #[test]
    fn pulse_pair_examples() {
        let p = odd_even_excitations(&[1.0, 0.0, -1.0]).unwrap();
        let (o, e) = (p.odd.coefficients(), p.even.coefficients());
        assert_abs_diff_eq!((o[0] - Complex64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((e[0] - Complex64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((o[1] - Complex64::new(0.0, -1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((e[1] - Complex64::new(0.0, 1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((o[2] - Complex64::new(-1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((e[2] - Complex64::new(-1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert!(p.odd.is_phase_only() && p.even.is_phase_only());
    }

    #[test]
    fn weights_slightly_above_one_are_clamped() {
        assert!(odd_even_excitations(&[1.0 + 5e-13, -1.0 - 5e-13]).is_ok());
        assert_eq!(
            odd_even_excitations(&[0.5, 1.0 + 1e-9]),
            Err(TptError::WeightOutOfRange { index: 1, value: 1.0 + 1e-9 })
        );
        assert!(odd_even_excitations(&[f64::NAN]).is_err());
    }

    #[test]
    fn center_element_weight_is_one() {
        let l = line(15);
        let d = design_weights(&l, 15.0, None, Window::Hamming, Kernel::Sinc, l.wavenumber()).unwrap();
        assert_abs_diff_eq!(d.w_z[7], 1.0, epsilon = 1e-15);
        assert!(d.w_z.iter().all(|w| w.abs() <= 1.0));
    }

    #[test]
    fn sign_changes_follow_kernel_nulls() {
        let l = line(16);
        let k = l.wavenumber();
        let d = design_weights(&l, 25.0, None, Window::Hamming, Kernel::Sinc, k).unwrap();
        let u_d = k * 25f64.to_radians().sin();
        for (w, z) in d.w_z.iter().zip(l.grid().unwrap().z_coords()) {
            // The window is positive, so the sign is that of sin(u_d z)/z.
            assert_eq!(*w < 0.0, (u_d * z).sin() / z < 0.0, "z = {z}");
        }
        assert!(d.w_z.iter().any(|&w| w < 0.0));
        assert!(d.warnings.is_empty());
    }

    #[test]
    fn narrow_design_is_flagged() {
        let l = line(16);
        let d = design_weights(&l, 2.0, None, Window::Hamming, Kernel::Sinc, l.wavenumber()).unwrap();
        assert_eq!(d.warnings, vec![DesignWarning::KernelWiderThanAperture]);
    }

    #[test]
    fn invalid_designs_are_rejected() {
        let l = line(16);
        let k = l.wavenumber();
        assert!(matches!(
            design_weights(&l, 0.0, None, Window::Hamming, Kernel::Sinc, k),
            Err(TptError::HalfWidthOutOfRange(_))
        ));
        let explicit = ArrayLattice::from_positions(l.positions().to_vec(), 1.0).unwrap();
        assert_eq!(
            design_weights(&explicit, 10.0, None, Window::Hamming, Kernel::Sinc, k),
            Err(TptError::NotSeparable)
        );
    }

    #[test]
    fn separable_two_axis_design() {
        let l = ArrayLattice::regular(8, 12, 0.5, 0.5, 1.0, Centering::Centered).unwrap();
        let d = design_weights(&l, 20.0, Some(30.0), Window::Hamming, Kernel::Dirichlet, l.wavenumber()).unwrap();
        let g = l.grid().unwrap();
        for iz in 0..g.nz {
            for iy in 0..g.ny {
                assert_eq!(d.weights[g.index(iy, iz)], d.w_y[iy] * d.w_z[iz]);
            }
        }
        let max = d.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        assert_abs_diff_eq!(max, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn all_ones_reproduce_uniform_pattern() {
        let l = line(16);
        let pair = odd_even_excitations(&[1.0; 16]).unwrap();
        let pts: Vec<_> = (0..50).map(|i| UPoint::new(0.0, 0.1 * i as f64)).collect();
        let eff = effective_af(&l, &pair, &pts).unwrap();
        let uni = af::evaluate_direct(&l, &Excitation::uniform(16), &pts).unwrap();
        for (a, b) in eff.values.iter().zip(&uni.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugacy_of_pulse_patterns() {
        let l = ArrayLattice::regular(4, 6, 0.5, 0.5, 1.0, Centering::Centered).unwrap();
        let w: Vec<f64> = (0..24).map(|i| ((i * 7) % 11) as f64 / 5.5 - 1.0).collect();
        let pair = odd_even_excitations(&w).unwrap();
        let pts: Vec<_> = (0..30).map(|i| UPoint::new(0.37 * i as f64 - 5.0, 0.21 * i as f64 - 3.0)).collect();
        let neg: Vec<_> = pts.iter().map(|p| UPoint::new(-p.uy, -p.uz)).collect();
        let e = af::evaluate_direct(&l, &pair.even, &pts).unwrap();
        let o = af::evaluate_direct(&l, &pair.odd, &neg).unwrap();
        for (a, b) in e.values.iter().zip(&o.values) {
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn hamming_lowers_sidelobes_of_rect_design() {
        let l = line(16);
        let k = l.wavenumber();
        let angles = angle_range(-90.0, 90.0, 0.05);
        for alpha_d in [10.0, 15.0, 25.0] {
            let sll = |window| {
                let d = design_weights(&l, alpha_d, None, window, Kernel::Sinc, k).unwrap();
                let cut = af::elevation_cut(&l, &Excitation::from_real_weights(&d.weights), &angles, 0.0, k).unwrap();
                let ml = MainLobeRegion::elevation_broadening(k, 2.0 * alpha_d, 1.0);
                measure_metrics(&cut, &ml, -6.0).peak_sll_db.unwrap()
            };
            let (rect, ham) = (sll(Window::Rectangular), sll(Window::Hamming));
            assert!(rect - ham >= 15.0, "alpha_d {alpha_d}: rect {rect}, hamming {ham}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn tapering_identity(w in prop::collection::vec(-1.0..=1.0f64, 12), uz in -4.0*PI..4.0*PI, uy in -4.0*PI..4.0*PI) {
            let l = ArrayLattice::regular(3, 4, 0.5, 0.5, 1.0, Centering::Centered).unwrap();
            let pair = odd_even_excitations(&w).unwrap();
            prop_assert!(pair.odd.is_phase_only() && pair.even.is_phase_only());
            for (a, b) in pair.weights().iter().zip(&w) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let p = [UPoint::new(uy, uz)];
            let eff = effective_af(&l, &pair, &p).unwrap();
            let direct = af::evaluate_direct(&l, &Excitation::from_real_weights(&w), &p).unwrap();
            prop_assert!((eff.values[0] - direct.values[0]).norm() <= 1e-12 * w.iter().map(|x| x.abs()).sum::<f64>().max(1.0));
        }
    }
}
