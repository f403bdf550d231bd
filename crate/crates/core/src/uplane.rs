//! The `(u_y, u_z)` plane.
//!
//! For a planar array in the yz-plane the array factor depends on frequency,
//! observation direction and steering direction only through
//! `u = k_T − k_0T`, the difference of the transverse wavevectors. This module
//! computes the outer boundary of the set of `u` reachable for a scan sector,
//! a brute-force enumeration of that set used as an oracle, and the Nyquist
//! raster that samples it.
//!
//! The reachable set is the Minkowski sum of the observation disk (radius
//! `k`) with the reflected scan image. Each quadrant of its boundary is made
//! of three pieces: a horizontal run at the top (observer at zenith, scan
//! sweeping the bottom edge of the sector), a circular arc about the scan
//! corner, and the parallel curve of the sector's side edge.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ArrayLattice, Direction, ScanSector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UPlaneError {
    #[error("wavenumber must be positive, got {0}")]
    BadWavenumber(f64),
    #[error("angular step must be positive, got {0} deg")]
    BadStep(f64),
    #[error("scan sector must include broadside in both axes (non-convex scan image otherwise)")]
    NonConvexSector,
    #[error("oversampling ratio must exceed 1, got {0}")]
    Undersampled(f64),
}

/// A point of the u-plane, rad/m.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UPoint {
    pub uy: f64,
    pub uz: f64,
}

impl UPoint {
    pub const ORIGIN: UPoint = UPoint { uy: 0.0, uz: 0.0 };

    pub const fn new(uy: f64, uz: f64) -> Self {
        Self { uy, uz }
    }

    /// `u = k_T(observation) − k_0T(steering)`.
    pub fn from_directions(k: f64, observation: Direction, steering: Direction) -> Self {
        let (ky, kz) = observation.transverse_wavevector(k);
        let (ky0, kz0) = steering.transverse_wavevector(k);
        Self::new(ky - ky0, kz - kz0)
    }

    pub fn norm(&self) -> f64 {
        self.uy.hypot(self.uz)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.uy * factor, self.uz * factor)
    }

    pub fn distance(&self, other: &UPoint) -> f64 {
        (self.uy - other.uy).hypot(self.uz - other.uz)
    }
}

/// Which construction produced a boundary vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    /// Observer at zenith, scan sweeping the sector's bottom edge.
    I = 1,
    /// Observer sweeping down from zenith, scan fixed at the sector corner.
    II = 2,
    /// Observer and scan swept together with matched slopes.
    III = 3,
}

impl Segment {
    pub fn id(self) -> u8 {
        self as u8
    }
}

/// One quadrant of the boundary, stored in local coordinates where both
/// components are non-negative. `signs` maps it back to the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantBoundary {
    pub signs: (f64, f64),
    /// `|α_0|` at the relevant sector corner, degrees.
    pub elevation_corner_deg: f64,
    /// `|φ_0|` at the relevant sector corner, degrees.
    pub azimuth_corner_deg: f64,
    /// Observation elevation where the corner arc meets the side curve.
    pub alpha_b_deg: f64,
    pub p: UPoint,
    pub q: UPoint,
    pub m: UPoint,
    pub s: UPoint,
    /// Vertices ordered P → Q → … → M → … → S, tagged by segment.
    pub vertices: Vec<(UPoint, Segment)>,
    k: f64,
}

impl QuadrantBoundary {
    fn build(k: f64, elevation_corner_deg: f64, azimuth_corner_deg: f64, signs: (f64, f64), step_deg: f64) -> Self {
        let a0 = elevation_corner_deg.to_radians();
        let (sa, ca) = a0.sin_cos();
        let s = azimuth_corner_deg.to_radians().sin();
        let alpha_b = (sa * s).atan2(ca);

        let p = UPoint::new(0.0, k * (1.0 + sa));
        let q = UPoint::new(k * ca * s, k * (1.0 + sa));
        let corner_arc = |alpha: f64| {
            let (sn, cs) = alpha.sin_cos();
            UPoint::new(k * cs + k * ca * s, k * sn + k * sa)
        };
        let side = |scan: f64| {
            let alpha = (scan.sin() * s).atan2(scan.cos());
            let (sn, cs) = alpha.sin_cos();
            UPoint::new(k * cs + k * s * scan.cos(), k * sn + k * scan.sin())
        };
        let m = corner_arc(alpha_b);
        let s_pt = side(0.0);

        let mut vertices = vec![(p, Segment::I), (q, Segment::I)];
        let step = step_deg.to_radians();
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut j = 1;
        loop {
            let alpha = half_pi - j as f64 * step;
            if alpha <= alpha_b {
                break;
            }
            vertices.push((corner_arc(alpha), Segment::II));
            j += 1;
        }
        if alpha_b < half_pi {
            vertices.push((m, Segment::II));
        }
        let mut j = 1;
        loop {
            let scan = a0 - j as f64 * step;
            if scan <= 0.0 {
                break;
            }
            vertices.push((side(scan), Segment::III));
            j += 1;
        }
        if a0 > 0.0 {
            vertices.push((s_pt, Segment::III));
        }

        Self {
            signs,
            elevation_corner_deg,
            azimuth_corner_deg,
            alpha_b_deg: alpha_b.to_degrees(),
            p,
            q,
            m,
            s: s_pt,
            vertices,
            k,
        }
    }

    /// Largest local `u_y` on the boundary at height `z ∈ [0, P_z]`, from the
    /// analytic segment curves (not the sampled polyline).
    pub fn extent_at(&self, z: f64) -> f64 {
        let k = self.k;
        if z >= self.m.uz {
            let (sa, ca) = self.elevation_corner_deg.to_radians().sin_cos();
            let s = self.azimuth_corner_deg.to_radians().sin();
            let dz = (z - k * sa).min(k);
            return k * ca * s + (k * k - dz * dz).max(0.0).sqrt();
        }
        // Side curve: solve z(scan) = z for scan ∈ [0, a0]; z is increasing.
        let s = self.azimuth_corner_deg.to_radians().sin();
        let eval = |scan: f64| {
            let (ss, cs) = scan.sin_cos();
            let alpha = (ss * s).atan2(cs);
            let (sn, cn) = alpha.sin_cos();
            (k * cn + k * s * cs, k * sn + k * ss)
        };
        let (mut lo, mut hi) = (0.0, self.elevation_corner_deg.to_radians());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if eval(mid).1 < z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        eval(0.5 * (lo + hi)).0
    }

    fn contains_local(&self, y: f64, z: f64, tol: f64) -> bool {
        if z > self.p.uz + tol {
            return false;
        }
        if z >= self.p.uz {
            return y <= self.q.uy + tol;
        }
        if z <= self.m.uz {
            if y <= self.m.uy + tol {
                return true;
            }
            if y > self.s.uy + tol {
                return false;
            }
        }
        y <= self.extent_at(z.max(0.0)) + tol
    }

    /// Vertices mapped into plane coordinates.
    pub fn plane_vertices(&self) -> impl Iterator<Item = (UPoint, Segment)> + '_ {
        let (sy, sz) = self.signs;
        self.vertices
            .iter()
            .map(move |(v, seg)| (UPoint::new(sy * v.uy, sz * v.uz), *seg))
    }
}

/// Closed outer boundary of the reachable u-set.
///
/// All four quadrants are stored; for sectors symmetric in both axes they are
/// mirror images of `quadrants[0]` (first quadrant) and
/// [`BoundaryPolyline::is_symmetric`] reports it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPolyline {
    pub k: f64,
    pub step_deg: f64,
    /// Order: (+,+), (−,+), (−,−), (+,−).
    pub quadrants: [QuadrantBoundary; 4],
}

/// Default angular step for sampling Segments II and III.
pub const DEFAULT_BOUNDARY_STEP_DEG: f64 = 0.25;

/// Default containment tolerance relative to `k`.
pub const DEFAULT_CONTAINMENT_TOL: f64 = 1e-9;

/// Analytic outer boundary of the u-domain for a scan sector at wavenumber
/// `k_max`.
///
/// A sector with zero extent degenerates to the circle of radius `k_max`.
pub fn compute_boundary(
    sector: &ScanSector,
    k_max: f64,
    step_deg: f64,
) -> Result<BoundaryPolyline, UPlaneError> {
    if !(k_max.is_finite() && k_max > 0.0) {
        return Err(UPlaneError::BadWavenumber(k_max));
    }
    if !(step_deg.is_finite() && step_deg > 0.0) {
        return Err(UPlaneError::BadStep(step_deg));
    }
    if !sector.contains_broadside() {
        return Err(UPlaneError::NonConvexSector);
    }
    // Top quadrants take the lowest elevation scan, right quadrants the
    // leftmost azimuth scan, and so on.
    let top = -sector.elevation_min_deg;
    let bottom = sector.elevation_max_deg;
    let right = -sector.azimuth_min_deg;
    let left = sector.azimuth_max_deg;
    let q = |el: f64, az: f64, signs| QuadrantBoundary::build(k_max, el, az, signs, step_deg);
    Ok(BoundaryPolyline {
        k: k_max,
        step_deg,
        quadrants: [
            q(top, right, (1.0, 1.0)),
            q(top, left, (-1.0, 1.0)),
            q(bottom, left, (-1.0, -1.0)),
            q(bottom, right, (1.0, -1.0)),
        ],
    })
}

impl BoundaryPolyline {
    pub fn quadrant1(&self) -> &QuadrantBoundary {
        &self.quadrants[0]
    }

    pub fn is_symmetric(&self) -> bool {
        let q0 = &self.quadrants[0];
        self.quadrants.iter().all(|q| {
            q.elevation_corner_deg == q0.elevation_corner_deg
                && q.azimuth_corner_deg == q0.azimuth_corner_deg
        })
    }

    fn quadrant_for(&self, p: &UPoint) -> &QuadrantBoundary {
        match (p.uy >= 0.0, p.uz >= 0.0) {
            (true, true) => &self.quadrants[0],
            (false, true) => &self.quadrants[1],
            (false, false) => &self.quadrants[2],
            (true, false) => &self.quadrants[3],
        }
    }

    /// Whether `p` lies inside or on the boundary, within `tol` (rad/m).
    pub fn contains(&self, p: &UPoint, tol: f64) -> bool {
        self.quadrant_for(p)
            .contains_local(p.uy.abs(), p.uz.abs(), tol)
    }

    /// Closed polygon through all vertices, counter-clockwise, starting on
    /// the positive u_z axis.
    pub fn polygon(&self) -> Vec<UPoint> {
        let mut out = Vec::new();
        // (+,+) runs P→S clockwise, so walk it reversed; (−,+) forwards, etc.
        let q = &self.quadrants;
        let mut push = |it: &mut dyn Iterator<Item = UPoint>| {
            for v in it {
                if out.last().is_none_or(|l: &UPoint| l.distance(&v) > 0.0) {
                    out.push(v);
                }
            }
        };
        push(&mut q[1].plane_vertices().map(|v| v.0));
        push(&mut q[2].plane_vertices().map(|v| v.0).collect::<Vec<_>>().into_iter().rev());
        push(&mut q[3].plane_vertices().map(|v| v.0));
        push(&mut q[0].plane_vertices().map(|v| v.0).collect::<Vec<_>>().into_iter().rev());
        if out.len() > 1 && out[0].distance(out.last().unwrap()) == 0.0 {
            out.pop();
        }
        out
    }

    /// Area enclosed by [`BoundaryPolyline::polygon`] (shoelace), rad²/m².
    pub fn area(&self) -> f64 {
        let poly = self.polygon();
        let n = poly.len();
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (poly[i], poly[(i + 1) % n]);
                a.uy * b.uz - b.uy * a.uz
            })
            .sum::<f64>()
            .abs()
    }

    /// Half-widths of the bounding box, `(max |u_y|, max |u_z|)`.
    pub fn max_extent(&self) -> (f64, f64) {
        self.quadrants.iter().fold((0.0f64, 0.0f64), |(y, z), q| {
            (y.max(q.s.uy), z.max(q.p.uz))
        })
    }

    /// All vertices in plane coordinates with their segment tags.
    pub fn plane_vertices(&self) -> Vec<(UPoint, Segment)> {
        self.quadrants
            .iter()
            .flat_map(|q| q.plane_vertices())
            .collect()
    }
}

/// Angles from `min` to `max` inclusive at `step`, the last one pinned to
/// `max`.
pub fn sweep(min: f64, max: f64, step: f64) -> Vec<f64> {
    if max <= min {
        return vec![min];
    }
    let n = ((max - min) / step - 1e-9).ceil() as usize;
    let mut out: Vec<f64> = (0..n).map(|i| min + i as f64 * step).collect();
    out.push(max);
    out
}

/// The brute-force support: every `k_T − k_0T` for observation directions on
/// an angular grid over `±90°` and steering directions on the same grid over
/// the scan sector.
///
/// The cloud is held as its two factor sets; points are generated on demand
/// because the full product is far too large to materialise at fine steps.
#[derive(Debug, Clone)]
pub struct SupportCloud {
    observation: Vec<(f64, f64)>,
    scan: Vec<(f64, f64)>,
}

/// Result of checking a cloud against a boundary in a single pass.
#[derive(Debug, Clone)]
pub struct CloudSurvey {
    pub total: u64,
    pub outside: u64,
    /// Largest `u_z` and `u_y` over the cloud.
    pub max_uz: f64,
    pub max_uy: f64,
    /// Outermost cloud point per angular bin around the origin.
    pub frontier: Vec<UPoint>,
}

pub fn brute_force_support(
    sector: &ScanSector,
    k_max: f64,
    step_deg: f64,
) -> Result<SupportCloud, UPlaneError> {
    if !(k_max.is_finite() && k_max > 0.0) {
        return Err(UPlaneError::BadWavenumber(k_max));
    }
    if !(step_deg.is_finite() && step_deg > 0.0) {
        return Err(UPlaneError::BadStep(step_deg));
    }
    let obs_angles = sweep(-90.0, 90.0, step_deg);
    let mut observation = Vec::with_capacity(obs_angles.len() * obs_angles.len());
    for &a in &obs_angles {
        for &p in &obs_angles {
            observation.push(Direction { elevation_deg: a, azimuth_deg: p }.transverse_wavevector(k_max));
        }
    }
    let el = sweep(sector.elevation_min_deg, sector.elevation_max_deg, step_deg);
    let az = sweep(sector.azimuth_min_deg, sector.azimuth_max_deg, step_deg);
    let mut scan = Vec::with_capacity(el.len() * az.len());
    for &a in &el {
        for &p in &az {
            scan.push(Direction { elevation_deg: a, azimuth_deg: p }.transverse_wavevector(k_max));
        }
    }
    Ok(SupportCloud { observation, scan })
}

impl SupportCloud {
    pub fn len(&self) -> usize {
        self.observation.len() * self.scan.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = UPoint> + '_ {
        self.scan.iter().flat_map(move |&(sy, sz)| {
            self.observation
                .iter()
                .map(move |&(oy, oz)| UPoint::new(oy - sy, oz - sz))
        })
    }

    /// Materialise the cloud. Only sensible for coarse steps.
    pub fn to_vec(&self) -> Vec<UPoint> {
        self.iter().collect()
    }

    /// Check every cloud point against `boundary`, collecting the outermost
    /// point in each of `bins` angular sectors.
    ///
    /// Evaluated in parallel over steering directions; all reductions are
    /// order-independent.
    pub fn survey(&self, boundary: &BoundaryPolyline, tol: f64, bins: usize) -> CloudSurvey {
        let bins = bins.max(4);
        // Only points beyond this radius can be frontier candidates.
        let inner = {
            let poly = boundary.polygon();
            let r = poly.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
            0.9 * r
        };
        let inner2 = inner * inner;

        #[derive(Clone)]
        struct Acc {
            outside: u64,
            max_uz: f64,
            max_uy: f64,
            frontier: Vec<Option<(f64, UPoint)>>,
        }
        let empty = || Acc {
            outside: 0,
            max_uz: f64::NEG_INFINITY,
            max_uy: f64::NEG_INFINITY,
            frontier: vec![None; bins],
        };
        let better = |a: &Option<(f64, UPoint)>, b: &Option<(f64, UPoint)>| -> Option<(f64, UPoint)> {
            match (a, b) {
                (None, x) | (x, None) => *x,
                (Some(x), Some(y)) => {
                    let key = |v: &(f64, UPoint)| (v.0, v.1.uy, v.1.uz);
                    let (kx, ky) = (key(x), key(y));
                    let ord = kx
                        .0
                        .total_cmp(&ky.0)
                        .then(kx.1.total_cmp(&ky.1))
                        .then(kx.2.total_cmp(&ky.2));
                    Some(if ord.is_ge() { *x } else { *y })
                }
            }
        };

        let acc = self
            .scan
            .par_iter()
            .fold(empty, |mut acc, &(sy, sz)| {
                for &(oy, oz) in &self.observation {
                    let p = UPoint::new(oy - sy, oz - sz);
                    if !boundary.contains(&p, tol) {
                        acc.outside += 1;
                    }
                    acc.max_uz = acc.max_uz.max(p.uz);
                    acc.max_uy = acc.max_uy.max(p.uy);
                    let r2 = p.uy * p.uy + p.uz * p.uz;
                    if r2 >= inner2 {
                        // Pseudo-angle in [0, 4) (no trig in the hot loop).
                        let d = p.uy.abs() + p.uz.abs();
                        let t = p.uy / d;
                        let pa = if p.uz >= 0.0 { 1.0 - t } else { 3.0 + t };
                        let b = ((pa / 4.0 * bins as f64) as usize).min(bins - 1);
                        let cand = Some((r2, p));
                        acc.frontier[b] = better(&acc.frontier[b], &cand);
                    }
                }
                acc
            })
            .reduce(empty, |mut a, b| {
                a.outside += b.outside;
                a.max_uz = a.max_uz.max(b.max_uz);
                a.max_uy = a.max_uy.max(b.max_uy);
                for (x, y) in a.frontier.iter_mut().zip(&b.frontier) {
                    *x = better(x, y);
                }
                a
            });

        CloudSurvey {
            total: self.len() as u64,
            outside: acc.outside,
            max_uz: acc.max_uz,
            max_uy: acc.max_uy,
            frontier: acc.frontier.into_iter().flatten().map(|(_, p)| p).collect(),
        }
    }
}

/// Raster layout aligned with a zero-padded 2-D FFT of a regular lattice:
/// `step · Δ · n_fft = 2π` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FftLayout {
    pub ny: usize,
    pub nz: usize,
    pub dy: f64,
    pub dz: f64,
}

/// Nyquist raster over the u-domain, clipped to the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UGrid {
    pub boundary: BoundaryPolyline,
    pub oversampling: f64,
    /// `(δu_y, δu_z)`, rad/m.
    pub step: (f64, f64),
    /// Raster indices run over `−half_counts.0 ..= half_counts.0` (and the
    /// same for z); the full raster is `(2I+1) × (2J+1)`.
    pub half_counts: (usize, usize),
    /// `(L, H)` used to set the step.
    pub aperture: (f64, f64),
    pub fft: Option<FftLayout>,
    /// In-boundary sample points and their raster indices `(i, j)`.
    pub points: Vec<UPoint>,
    pub indices: Vec<(i64, i64)>,
    /// Area of the domain, `A_u`.
    pub area: f64,
}

impl UGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn raster_dims(&self) -> (usize, usize) {
        (2 * self.half_counts.0 + 1, 2 * self.half_counts.1 + 1)
    }

    /// Sample count predicted by `Ω² L H A_u / 4π²`.
    pub fn predicted_count(&self) -> f64 {
        self.area / (self.step.0 * self.step.1)
    }

    /// Area of one raster cell.
    pub fn cell_area(&self) -> f64 {
        self.step.0 * self.step.1
    }
}

/// Sample the domain at `2π/(ΩL)` by `2π/(ΩH)`.
///
/// For regular lattices the step is tightened to `2π/(n_fft Δ)` with
/// `n_fft = ⌈Ω N⌉` so that the raster lines up with an FFT of the lattice.
pub fn sampling_grid(
    boundary: &BoundaryPolyline,
    lattice: &ArrayLattice,
    oversampling: f64,
) -> Result<UGrid, UPlaneError> {
    if !(oversampling.is_finite() && oversampling > 1.0) {
        return Err(UPlaneError::Undersampled(oversampling));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let aperture = lattice.aperture();
    let (step, fft) = match lattice.grid() {
        Some(g) => {
            let ny = (oversampling * g.ny as f64 - 1e-9).ceil() as usize;
            let nz = (oversampling * g.nz as f64 - 1e-9).ceil() as usize;
            (
                (two_pi / (ny as f64 * g.dy), two_pi / (nz as f64 * g.dz)),
                Some(FftLayout {
                    ny,
                    nz,
                    dy: g.dy,
                    dz: g.dz,
                }),
            )
        }
        None => (
            (two_pi / (oversampling * aperture.0), two_pi / (oversampling * aperture.1)),
            None,
        ),
    };
    let (ymax, zmax) = boundary.max_extent();
    let half = ((ymax / step.0).floor() as usize, (zmax / step.1).floor() as usize);
    let tol = DEFAULT_CONTAINMENT_TOL * boundary.k;
    let mut points = Vec::new();
    let mut indices = Vec::new();
    for j in -(half.1 as i64)..=half.1 as i64 {
        for i in -(half.0 as i64)..=half.0 as i64 {
            let p = UPoint::new(i as f64 * step.0, j as f64 * step.1);
            if boundary.contains(&p, tol) {
                points.push(p);
                indices.push((i, j));
            }
        }
    }
    Ok(UGrid {
        boundary: boundary.clone(),
        oversampling,
        step,
        half_counts: half,
        aperture,
        fft,
        points,
        indices,
        area: boundary.area(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Centering;
    use approx::assert_abs_diff_eq;

    fn reference_sector() -> ScanSector {
        ScanSector::symmetric(25.0, 25.0).unwrap()
    }

    #[test]
    fn key_points_for_25_degree_sector() {
        let b = compute_boundary(&reference_sector(), 1.0, DEFAULT_BOUNDARY_STEP_DEG).unwrap();
        let q = b.quadrant1();
        // Closed forms evaluated independently.
        let s25 = 25f64.to_radians().sin();
        let c25 = 25f64.to_radians().cos();
        assert_abs_diff_eq!(q.p.uy, 0.0);
        assert_abs_diff_eq!(q.p.uz, 1.0 + s25, epsilon = 1e-15);
        assert_abs_diff_eq!(q.q.uy, c25 * s25, epsilon = 1e-15);
        assert_abs_diff_eq!(q.p.uz, 1.4226, epsilon = 5e-5);
        assert_abs_diff_eq!(q.q.uy, 0.3830, epsilon = 5e-5);
        let ab = (25f64.to_radians().tan() * s25).atan();
        assert_abs_diff_eq!(q.alpha_b_deg, ab.to_degrees(), epsilon = 1e-12);
        assert_abs_diff_eq!(q.alpha_b_deg, 11.15, epsilon = 5e-3);
        assert_abs_diff_eq!(q.m.uy, ab.cos() + c25 * s25, epsilon = 1e-14);
        assert_abs_diff_eq!(q.m.uz, ab.sin() + s25, epsilon = 1e-14);
        assert_abs_diff_eq!(q.m.uy, 1.3641, epsilon = 1e-4);
        assert_abs_diff_eq!(q.m.uz, 0.6160, epsilon = 1e-4);
        assert_abs_diff_eq!(q.s.uy, 1.0 + s25, epsilon = 1e-15);
        assert_abs_diff_eq!(q.s.uz, 0.0, epsilon = 1e-15);
        assert!(b.is_symmetric());
    }

    #[test]
    fn vertices_are_monotone_and_on_segment_i_level() {
        let b = compute_boundary(&reference_sector(), 2.0, 0.25).unwrap();
        let q = b.quadrant1();
        for w in q.vertices.windows(2) {
            assert!(w[1].0.uz <= w[0].0.uz + 1e-15);
            assert!(w[1].0.uy >= w[0].0.uy - 1e-15);
        }
        for (v, seg) in &q.vertices {
            if *seg == Segment::I {
                assert_abs_diff_eq!(v.uz, q.p.uz, epsilon = 1e-15);
            }
        }
        assert_eq!(q.vertices.last().unwrap().0, q.s);
    }

    #[test]
    fn zero_sector_is_the_observation_circle() {
        let b = compute_boundary(&ScanSector::broadside(), 3.0, 0.25).unwrap();
        for (v, _) in b.plane_vertices() {
            assert_abs_diff_eq!(v.norm(), 3.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(b.area(), std::f64::consts::PI * 9.0, epsilon = 1e-3);
        assert!(b.contains(&UPoint::new(0.0, 3.0), 1e-9));
        assert!(!b.contains(&UPoint::new(2.2, 2.2), 1e-9));
    }

    #[test]
    fn containment_examples() {
        let b = compute_boundary(&reference_sector(), 1.0, 0.25).unwrap();
        let tol = 1e-9;
        assert!(b.contains(&UPoint::ORIGIN, tol));
        let top = b.quadrant1().p.uz;
        assert!(!b.contains(&UPoint::new(0.0, top + 10.0 * tol), tol));
        assert!(b.contains(&UPoint::new(0.0, top), tol));
        assert!(b.contains(&UPoint::new(0.38, 1.42), tol));
        assert!(b.contains(&UPoint::new(-0.38, -1.42), tol));
        assert!(!b.contains(&UPoint::new(1.2, 1.2), tol));
    }

    #[test]
    fn extent_matches_side_curve_construction() {
        let b = compute_boundary(&ScanSector::symmetric(30.0, 20.0).unwrap(), 1.0, 0.25).unwrap();
        let q = b.quadrant1();
        for (v, seg) in &q.vertices {
            if *seg != Segment::I {
                assert_abs_diff_eq!(q.extent_at(v.uz), v.uy, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn boundary_scales_with_wavenumber() {
        let s = ScanSector::new(-25.0, 10.0, -5.0, 25.0).unwrap();
        let b1 = compute_boundary(&s, 1.0, 0.25).unwrap();
        let b2 = compute_boundary(&s, 2.0, 0.25).unwrap();
        for ((v1, _), (v2, _)) in b1.plane_vertices().iter().zip(b2.plane_vertices()) {
            assert_abs_diff_eq!(v2.uy, 2.0 * v1.uy, epsilon = 1e-14);
            assert_abs_diff_eq!(v2.uz, 2.0 * v1.uz, epsilon = 1e-14);
        }
    }

    #[test]
    fn side_curve_slopes_match() {
        // Along Segment III the observation slope tan α equals the scan
        // slope tan|α_0| sin|φ_0| (checked by finite differences).
        let sector = reference_sector();
        let s = 25f64.to_radians().sin();
        let h = 1e-6;
        for scan_deg in [1.0, 5.0, 12.5, 20.0, 24.9] {
            let a0 = f64::to_radians(scan_deg);
            let alpha = (a0.sin() * s).atan2(a0.cos());
            // observation arc: (cos α, sin α); dy/dz
            let obs = |a: f64| (a.cos(), a.sin());
            let (y1, z1) = obs(alpha - h);
            let (y2, z2) = obs(alpha + h);
            let d_obs = ((y2 - y1) / (z2 - z1)).abs();
            // scan side edge: (cos α0 s, sin α0)
            let sc = |a: f64| (a.cos() * s, a.sin());
            let (y1, z1) = sc(a0 - h);
            let (y2, z2) = sc(a0 + h);
            let d_scan = ((y2 - y1) / (z2 - z1)).abs();
            assert!((d_obs - d_scan).abs() < 1e-6, "{d_obs} vs {d_scan}");
        }
        // Segment II slopes decrease from unbounded at Q to tan α_B at M.
        let b = compute_boundary(&sector, 1.0, 0.25).unwrap();
        let q = b.quadrant1();
        let mut last = f64::INFINITY;
        for (v, seg) in &q.vertices {
            if *seg == Segment::II {
                let alpha = (v.uz - 25f64.to_radians().sin()).asin();
                let slope = alpha.tan();
                assert!(slope <= last);
                last = slope;
            }
        }
        assert_abs_diff_eq!(last, q.alpha_b_deg.to_radians().tan(), epsilon = 1e-12);
    }

    #[test]
    fn coarse_cloud_is_contained_and_attains_the_top() {
        let s = reference_sector();
        let b = compute_boundary(&s, 1.0, 0.25).unwrap();
        let cloud = brute_force_support(&s, 1.0, 2.5).unwrap();
        let survey = cloud.survey(&b, 1e-9, 720);
        assert_eq!(survey.outside, 0);
        assert_eq!(survey.total as usize, cloud.len());
        assert_abs_diff_eq!(survey.max_uz, b.quadrant1().p.uz, epsilon = 1e-12);
    }

    #[test]
    fn zero_sector_cloud_fills_the_unit_disk() {
        let s = ScanSector::broadside();
        let cloud = brute_force_support(&s, 1.0, 1.0).unwrap();
        assert_eq!(cloud.len(), 181 * 181);
        let pts = cloud.to_vec();
        assert!(pts.iter().all(|p| p.norm() <= 1.0 + 1e-12));
        // Every disk point at radius < 0.99 has a cloud point nearby.
        for i in 0..36 {
            let t = i as f64 * 10f64.to_radians();
            let target = UPoint::new(0.9 * t.cos(), 0.9 * t.sin());
            let d = pts.iter().map(|p| p.distance(&target)).fold(f64::MAX, f64::min);
            assert!(d < 0.02, "gap {d} near {target:?}");
        }
    }

    #[test]
    fn sweep_includes_endpoints() {
        assert_eq!(sweep(-1.0, 1.0, 0.5), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(sweep(0.0, 0.0, 0.5), vec![0.0]);
        let s = sweep(0.0, 1.0, 0.3);
        assert_eq!(s.len(), 5);
        assert_eq!(*s.last().unwrap(), 1.0);
    }

    #[test]
    fn sampling_grid_for_reference_configuration() {
        let lam = 1.0;
        let k = 2.0 * std::f64::consts::PI / lam;
        let lattice =
            ArrayLattice::regular(16, 16, 0.5, 0.5, lam, Centering::Centered).unwrap();
        let b = compute_boundary(&reference_sector(), k, 0.25).unwrap();
        let g = sampling_grid(&b, &lattice, 4.0).unwrap();
        assert_abs_diff_eq!(g.step.0 / k, 1.0 / 32.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.step.1 / k, 1.0 / 32.0, epsilon = 1e-15);
        assert_eq!(g.fft.unwrap().ny, 64);
        assert!(g.points.iter().all(|p| b.contains(p, 1e-9 * k)));
        let rel = (g.len() as f64 - g.predicted_count()).abs() / g.predicted_count();
        assert!(rel < 0.02, "count {} vs predicted {}", g.len(), g.predicted_count());
    }

    #[test]
    fn sampling_grid_edge_cases() {
        let lattice = ArrayLattice::regular(2, 2, 0.5, 0.5, 1.0, Centering::Centered).unwrap();
        let b = compute_boundary(&reference_sector(), 2.0 * std::f64::consts::PI, 1.0).unwrap();
        assert!(matches!(
            sampling_grid(&b, &lattice, 1.0),
            Err(UPlaneError::Undersampled(_))
        ));
        let g = sampling_grid(&b, &lattice, 1.01).unwrap();
        assert!(!g.is_empty());
        assert!(g.step.0 <= 2.0 * std::f64::consts::PI / (1.01 * g.aperture.0) + 1e-12);

        let explicit = ArrayLattice::from_positions(vec![(0.0, 0.0), (0.4, 0.1), (-0.3, 0.7)], 1.0).unwrap();
        let g = sampling_grid(&b, &explicit, 3.0).unwrap();
        assert!(g.fft.is_none());
        assert_abs_diff_eq!(g.step.0, 2.0 * std::f64::consts::PI / (3.0 * g.aperture.0), epsilon = 1e-15);
    }

    #[test]
    fn rejects_non_convex_sector() {
        let s = ScanSector::new(5.0, 20.0, -10.0, 10.0).unwrap();
        assert_eq!(compute_boundary(&s, 1.0, 0.25), Err(UPlaneError::NonConvexSector));
    }
}
