//! Pattern metrics: beamwidth, ripple, peak sidelobe level and the
//! main-lobe/sidelobe energy ratio.

use serde::{Deserialize, Serialize};

use crate::af::{Pattern, PatternDomain, CutAxis, DB_FLOOR};
use crate::uplane::UPoint;

/// Default level (dB below peak) at which beamwidth is measured.
pub const DEFAULT_BW_LEVEL_DB: f64 = -6.0;

/// Rectangular main-lobe region in the u-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainLobeRegion {
    pub center: UPoint,
    pub half_width_y: f64,
    pub half_width_z: f64,
}

impl MainLobeRegion {
    pub fn new(center: UPoint, half_width_y: f64, half_width_z: f64) -> Self {
        Self {
            center,
            half_width_y,
            half_width_z,
        }
    }

    /// Elevation-broadened beam of full width `bw_deg` about broadside:
    /// `|u_z| ≤ k sin(bw/2)`, `|u_y| ≤ half_width_y`.
    pub fn elevation_broadening(k: f64, bw_deg: f64, half_width_y: f64) -> Self {
        Self::new(UPoint::ORIGIN, half_width_y, k * (0.5 * bw_deg).to_radians().sin())
    }

    /// Null-to-null half width `2π/L` of an unweighted aperture of length `L`.
    pub fn natural_half_width(aperture: f64) -> f64 {
        2.0 * std::f64::consts::PI / aperture
    }

    pub fn contains(&self, p: &UPoint) -> bool {
        (p.uy - self.center.uy).abs() <= self.half_width_y
            && (p.uz - self.center.uz).abs() <= self.half_width_z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricFlag {
    ZeroPattern,
    EmptyMainLobe,
    PeakOnEdge,
    UndefinedBeamwidth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternMetrics {
    pub bw_alpha_deg: Option<f64>,
    pub bw_phi_deg: Option<f64>,
    pub peak_sll_db: Option<f64>,
    pub ripple_db: Option<f64>,
    pub p_ml: f64,
    pub p_sl: f64,
    /// `P_ML / P_SL`; absent when either region carries no energy.
    pub energy_ratio: Option<f64>,
    pub bw_level_db: f64,
    pub main_lobe: MainLobeRegion,
    pub flags: Vec<MetricFlag>,
}

impl PatternMetrics {
    fn empty(main_lobe: MainLobeRegion, level_db: f64) -> Self {
        Self {
            bw_alpha_deg: None,
            bw_phi_deg: None,
            peak_sll_db: None,
            ripple_db: None,
            p_ml: 0.0,
            p_sl: 0.0,
            energy_ratio: None,
            bw_level_db: level_db,
            main_lobe,
            flags: Vec::new(),
        }
    }

    fn flag(&mut self, f: MetricFlag) {
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
    }

    pub fn has_flag(&self, f: MetricFlag) -> bool {
        self.flags.contains(&f)
    }
}

/// Shape of a 1-D cut around its main lobe.
#[derive(Debug, Clone, PartialEq)]
pub struct CutAnalysis {
    pub peak_index: usize,
    /// Interpolated outermost crossings of the level, in degrees.
    pub crossings: Option<(f64, f64)>,
    pub bw_deg: Option<f64>,
    /// Peak minus the deepest interior local minimum between the outermost
    /// crossings; 0 for a single-humped top.
    pub ripple_db: f64,
    /// Main lobe index span, extended from the crossings down to the first
    /// local minima on each side.
    pub lobe: (usize, usize),
    pub peak_sll_db: Option<f64>,
    pub peak_on_edge: bool,
}

/// Analyze a cut given its angles and dB values relative to the peak
/// (maximum 0 dB). Returns `None` for an all-floor cut.
pub fn analyze_cut(angles_deg: &[f64], db: &[f64], level_db: f64) -> Option<CutAnalysis> {
    let n = db.len();
    assert_eq!(n, angles_deg.len());
    let (peak_index, &peak) = db
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))?;
    if peak <= DB_FLOOR {
        return None;
    }
    let first = db.iter().position(|&d| d >= peak + level_db)?;
    let last = db.iter().rposition(|&d| d >= peak + level_db)?;
    let level = peak + level_db;

    let crossings = if first == 0 || last == n - 1 {
        None
    } else {
        let interp = |a: usize, b: usize| {
            let t = (level - db[a]) / (db[b] - db[a]);
            angles_deg[a] + t * (angles_deg[b] - angles_deg[a])
        };
        Some((interp(first - 1, first), interp(last + 1, last)))
    };

    let ripple_db = (first + 1..last)
        .filter(|&i| db[i] < db[i - 1] && db[i] <= db[i + 1])
        .map(|i| peak - db[i])
        .fold(0.0, f64::max);

    let mut lo = first;
    while lo > 0 && db[lo - 1] <= db[lo] {
        lo -= 1;
    }
    let mut hi = last;
    while hi + 1 < n && db[hi + 1] <= db[hi] {
        hi += 1;
    }
    let peak_sll_db = db[..lo]
        .iter()
        .chain(&db[hi + 1..])
        .copied()
        .reduce(f64::max)
        .map(|d| d - peak);

    Some(CutAnalysis {
        peak_index,
        crossings,
        bw_deg: crossings.map(|(a, b)| (b - a).abs()),
        ripple_db,
        lobe: (lo, hi),
        peak_sll_db,
        peak_on_edge: peak_index == 0 || peak_index == n - 1,
    })
}

/// Midpoint-rule weights for samples at increasing positions `x`.
fn midpoint_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let a = if i == 0 { x[0] } else { 0.5 * (x[i - 1] + x[i]) };
            let b = if i + 1 == n { x[n - 1] } else { 0.5 * (x[i] + x[i + 1]) };
            (b - a).abs()
        })
        .collect()
}

/// Split `Σ w |AF|²` between the main-lobe region and the rest.
fn energies(p: &Pattern, ml: &MainLobeRegion, weights: &[f64]) -> (f64, f64, bool) {
    let mut ml_e = 0.0;
    let mut sl_e = 0.0;
    let mut any_ml = false;
    for ((pt, v), w) in p.points.iter().zip(&p.values).zip(weights) {
        let e = w * v.norm_sqr();
        if ml.contains(pt) {
            ml_e += e;
            any_ml = true;
        } else {
            sl_e += e;
        }
    }
    (ml_e, sl_e, any_ml)
}

/// Metrics of a single pattern.
///
/// Cuts yield the beamwidth for their axis, ripple, peak SLL and a 1-D energy
/// split along the cut. Grids yield the 2-D energy split and the peak SLL
/// over local maxima outside the main-lobe region; beamwidth and ripple are
/// left to cuts.
pub fn measure_metrics(p: &Pattern, ml: &MainLobeRegion, level_db: f64) -> PatternMetrics {
    let mut m = PatternMetrics::empty(*ml, level_db);
    if p.is_zero() {
        m.flag(MetricFlag::ZeroPattern);
        return m;
    }
    let db = p.db();
    let weights = match &p.domain {
        PatternDomain::Cut { axis, angles_deg, .. } => {
            match analyze_cut(angles_deg, &db, level_db) {
                Some(c) => {
                    match axis {
                        CutAxis::Elevation => m.bw_alpha_deg = c.bw_deg,
                        CutAxis::Azimuth => m.bw_phi_deg = c.bw_deg,
                    }
                    if c.bw_deg.is_none() {
                        m.flag(MetricFlag::UndefinedBeamwidth);
                    }
                    if c.peak_on_edge {
                        m.flag(MetricFlag::PeakOnEdge);
                    }
                    m.ripple_db = Some(c.ripple_db);
                    m.peak_sll_db = c.peak_sll_db;
                }
                None => m.flag(MetricFlag::ZeroPattern),
            }
            let coord: Vec<f64> = p
                .points
                .iter()
                .map(|q| match axis {
                    CutAxis::Elevation => q.uz,
                    CutAxis::Azimuth => q.uy,
                })
                .collect();
            midpoint_weights(&coord)
        }
        PatternDomain::Grid { step, .. } => {
            let (peak_n, _) = db
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .expect("non-zero pattern has samples");
            if p.on_grid_edge(peak_n) {
                m.flag(MetricFlag::PeakOnEdge);
            }
            m.peak_sll_db = p
                .grid_lobes()
                .into_iter()
                .filter(|&(n, _)| !ml.contains(&p.points[n]))
                .map(|(_, d)| d)
                .reduce(f64::max);
            vec![step.0 * step.1; p.len()]
        }
        PatternDomain::Points => {
            m.peak_sll_db = p
                .points
                .iter()
                .zip(&db)
                .filter(|(q, _)| !ml.contains(q))
                .map(|(_, &d)| d)
                .reduce(f64::max);
            vec![1.0; p.len()]
        }
    };
    let (p_ml, p_sl, any_ml) = energies(p, ml, &weights);
    if !any_ml {
        m.flag(MetricFlag::EmptyMainLobe);
    }
    m.p_ml = p_ml;
    m.p_sl = p_sl;
    m.energy_ratio = (p_ml > 0.0 && p_sl > 0.0).then(|| p_ml / p_sl);
    m
}

/// Combine cut and grid metrics: beamwidths and ripple from the cuts (ripple
/// is the larger of the cuts'), peak SLL as the worst over all inputs, and
/// energies from the grid when given, otherwise from the first cut.
pub fn measure_composite(
    cuts: &[&Pattern],
    grid: Option<&Pattern>,
    ml: &MainLobeRegion,
    level_db: f64,
) -> PatternMetrics {
    let parts: Vec<PatternMetrics> = cuts.iter().map(|c| measure_metrics(c, ml, level_db)).collect();
    let grid_m = grid.map(|g| measure_metrics(g, ml, level_db));
    let mut out = match (&grid_m, parts.first()) {
        (Some(g), _) => g.clone(),
        (None, Some(c)) => c.clone(),
        (None, None) => PatternMetrics::empty(*ml, level_db),
    };
    for c in &parts {
        out.bw_alpha_deg = out.bw_alpha_deg.or(c.bw_alpha_deg);
        out.bw_phi_deg = out.bw_phi_deg.or(c.bw_phi_deg);
        out.ripple_db = match (out.ripple_db, c.ripple_db) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        out.peak_sll_db = match (out.peak_sll_db, c.peak_sll_db) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        for &f in &c.flags {
            if f != MetricFlag::EmptyMainLobe || grid_m.is_none() {
                out.flag(f);
            }
        }
    }
    out
}
