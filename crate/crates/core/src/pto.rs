//! Polynomial phase tapering optimization.
//!
//! The taper `I_n = exp(−j [P_y(y_n) + P_z(z_n)])` uses even polynomials
//! without constant term, `P(ζ) = Σ_i p_i ζ^{2i}`. Coefficients are searched
//! with the downhill simplex from random starts; the cost trades main-lobe
//! energy against beamwidth error and ripple.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::af::{self, to_db, AfError, CutAxis};
use crate::geometry::{ArrayLattice, Excitation};
use crate::metrics::{analyze_cut, measure_composite, MainLobeRegion, PatternMetrics, DEFAULT_BW_LEVEL_DB};
use crate::simplex::{self, SimplexConfig};
use crate::uplane::{sampling_grid, BoundaryPolyline, UGrid, UPlaneError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PtoError {
    #[error("invalid cost configuration: {0}")]
    InvalidCost(String),
    #[error("at least one polynomial term and one restart are required")]
    NothingToOptimize,
    #[error(transparent)]
    UPlane(#[from] UPlaneError),
    #[error(transparent)]
    Af(#[from] AfError),
}

/// Even-polynomial phase coefficients, radians per metre^{2i}.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PolynomialTaper {
    pub p_y: Vec<f64>,
    pub p_z: Vec<f64>,
}

fn even_poly(p: &[f64], x: f64) -> f64 {
    let x2 = x * x;
    let mut pow = x2;
    let mut acc = 0.0;
    for c in p {
        acc += c * pow;
        pow *= x2;
    }
    acc
}

impl PolynomialTaper {
    pub fn phase_y(&self, y: f64) -> f64 {
        even_poly(&self.p_y, y)
    }

    pub fn phase_z(&self, z: f64) -> f64 {
        even_poly(&self.p_z, z)
    }

    pub fn phase(&self, y: f64, z: f64) -> f64 {
        self.phase_y(y) + self.phase_z(z)
    }
}

/// `I_n = exp(−j P(y_n, z_n))`.
pub fn taper_to_excitation(taper: &PolynomialTaper, lattice: &ArrayLattice) -> Excitation {
    let phases: Vec<f64> = lattice
        .positions()
        .iter()
        .map(|&(y, z)| -taper.phase(y, z))
        .collect();
    Excitation::from_phases(&phases)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostConfig {
    /// Desired elevation beamwidth, degrees.
    pub bw_alpha_deg: f64,
    /// Desired azimuth beamwidth, degrees; only used with `c_bw_phi > 0`.
    pub bw_phi_deg: Option<f64>,
    pub c_bw_alpha: f64,
    pub c_bw_phi: f64,
    pub c_ripple: f64,
    pub a1: u32,
    pub bw_level_db: f64,
    pub undefined_bw_penalty: f64,
    /// Main-lobe half-width in `u_y` (rad/m); the natural `2π/L_y` when
    /// absent.
    pub ml_half_width_y: Option<f64>,
}

impl Default for CostConfig {
    fn default() -> Self {
        Self {
            bw_alpha_deg: 30.0,
            bw_phi_deg: None,
            c_bw_alpha: 0.01,
            c_bw_phi: 0.0,
            c_ripple: 2.0,
            a1: 2,
            bw_level_db: DEFAULT_BW_LEVEL_DB,
            undefined_bw_penalty: 1e6,
            ml_half_width_y: None,
        }
    }
}

impl CostConfig {
    pub fn validate(&self) -> Result<(), PtoError> {
        let bad = |m: &str| Err(PtoError::InvalidCost(m.to_string()));
        if !(self.bw_alpha_deg > 0.0 && self.bw_alpha_deg < 180.0) {
            return bad("bw_alpha_deg must lie in (0, 180)");
        }
        if !(self.c_bw_alpha > 0.0 && self.c_ripple > 0.0 && self.c_bw_phi >= 0.0) {
            return bad("beamwidth and ripple weights must be positive");
        }
        if self.c_bw_phi > 0.0 && !matches!(self.bw_phi_deg, Some(b) if b > 0.0 && b < 180.0) {
            return bad("c_bw_phi > 0 needs bw_phi_deg in (0, 180)");
        }
        if self.a1 < 1 {
            return bad("a1 must be at least 1");
        }
        if !(self.bw_level_db < 0.0) {
            return bad("bw_level_db must be negative");
        }
        Ok(())
    }

    fn azimuth_active(&self) -> bool {
        self.c_bw_phi > 0.0
    }

    /// Main-lobe region for a lattice at wavenumber `k`.
    pub fn main_lobe(&self, lattice: &ArrayLattice, k: f64) -> MainLobeRegion {
        let half_y = match (self.azimuth_active(), self.bw_phi_deg) {
            (true, Some(bw)) => k * (0.5 * bw).to_radians().sin(),
            _ => self
                .ml_half_width_y
                .unwrap_or_else(|| MainLobeRegion::natural_half_width(lattice.aperture().0)),
        };
        MainLobeRegion::elevation_broadening(k, self.bw_alpha_deg, half_y)
    }
}

/// `−P_ML/P_SL + c_φ (BW_φ − BW_φd)^{2a} + c_α (BW_α − BW_αd)^{2a} + c_R R`.
///
/// A missing beamwidth on an active term adds `undefined_bw_penalty`; a
/// missing energy ratio or ripple contributes nothing.
pub fn evaluate_cost(m: &PatternMetrics, cfg: &CostConfig) -> f64 {
    let pow = 2 * cfg.a1 as i32;
    let bw_term = |bw: Option<f64>, target: f64, c: f64| match bw {
        Some(b) => c * (b - target).powi(pow),
        None => cfg.undefined_bw_penalty,
    };
    let mut cost = -m.energy_ratio.unwrap_or(0.0);
    cost += bw_term(m.bw_alpha_deg, cfg.bw_alpha_deg, cfg.c_bw_alpha);
    if cfg.azimuth_active() {
        cost += bw_term(m.bw_phi_deg, cfg.bw_phi_deg.unwrap_or(0.0), cfg.c_bw_phi);
    }
    cost + cfg.c_ripple * m.ripple_db.unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PtoSettings {
    pub simplex: SimplexConfig,
    /// Angular step of the cuts evaluated inside the cost. Verification
    /// should use the same step: optima tend to park a shoulder right at the
    /// beamwidth level, where a different sampling flips the outermost
    /// crossing.
    pub cut_step_deg: f64,
    pub energy_oversampling: f64,
    pub verify_oversampling: f64,
    pub verify_cut_step_deg: f64,
}

impl Default for PtoSettings {
    fn default() -> Self {
        Self {
            simplex: SimplexConfig::default(),
            cut_step_deg: 0.1,
            energy_oversampling: 2.0,
            verify_oversampling: 4.0,
            verify_cut_step_deg: 0.1,
        }
    }
}

/// `exp(j ζ_n u_s)` for every sample `s` and element coordinate `ζ_n`.
#[derive(Debug, Clone)]
struct AxisTable {
    width: usize,
    table: Vec<Complex64>,
}

impl AxisTable {
    fn new(coords: &[f64], samples: impl Iterator<Item = f64>) -> Self {
        let mut table = Vec::new();
        for u in samples {
            table.extend(coords.iter().map(|&c| Complex64::cis(c * u)));
        }
        Self {
            width: coords.len(),
            table,
        }
    }

    fn power(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.table
            .chunks_exact(self.width)
            .map(|row| {
                row.iter()
                    .zip(coeffs)
                    .fold(Complex64::new(0.0, 0.0), |acc, (e, c)| acc + e * c)
                    .norm_sqr()
            })
            .collect()
    }
}

/// Cost evaluation through `AF = AF^y(u_y) · AF^z(u_z)` on a regular
/// lattice.
#[derive(Debug, Clone)]
struct SeparableEvaluator {
    y: Vec<f64>,
    z: Vec<f64>,
    cut_angles: Vec<f64>,
    el_cut: AxisTable,
    az_cut: Option<AxisTable>,
    grid_y: AxisTable,
    grid_z: AxisTable,
    /// Per raster point: row in `grid_y`, row in `grid_z`, inside main lobe.
    cells: Vec<(usize, usize, bool)>,
    cell_area: f64,
}

/// Cost evaluation by direct summation on any lattice.
#[derive(Debug, Clone)]
struct GenericEvaluator {
    cut_angles: Vec<f64>,
    grid: UGrid,
}

#[derive(Debug, Clone)]
enum Evaluator {
    Separable(Box<SeparableEvaluator>),
    Generic(Box<GenericEvaluator>),
}

/// A configured optimization: lattice, cost, polynomial orders and the
/// sampling used inside the cost.
#[derive(Debug, Clone)]
pub struct PtoProblem {
    pub lattice: ArrayLattice,
    pub k: f64,
    pub cost: CostConfig,
    pub terms_y: usize,
    pub terms_z: usize,
    pub settings: PtoSettings,
    pub boundary: BoundaryPolyline,
    pub main_lobe: MainLobeRegion,
    half_aperture: (f64, f64),
    evaluator: Evaluator,
}

impl PtoProblem {
    pub fn new(
        lattice: ArrayLattice,
        cost: CostConfig,
        terms_y: usize,
        terms_z: usize,
        boundary: BoundaryPolyline,
        settings: PtoSettings,
    ) -> Result<Self, PtoError> {
        cost.validate()?;
        if terms_y + terms_z == 0 {
            return Err(PtoError::NothingToOptimize);
        }
        let k = boundary.k;
        let main_lobe = cost.main_lobe(&lattice, k);
        let grid = sampling_grid(&boundary, &lattice, settings.energy_oversampling)?;
        let cut_angles = af::angle_range(-90.0, 90.0, settings.cut_step_deg);
        let (ap_y, ap_z) = lattice.aperture();
        let evaluator = match lattice.grid() {
            Some(g) => {
                let (y, z) = (g.y_coords(), g.z_coords());
                let sines = || cut_angles.iter().map(|a| k * a.to_radians().sin());
                let (i_min, i_max) = minmax(grid.indices.iter().map(|p| p.0));
                let (j_min, j_max) = minmax(grid.indices.iter().map(|p| p.1));
                let cells = grid
                    .indices
                    .iter()
                    .zip(&grid.points)
                    .map(|(&(i, j), p)| ((i - i_min) as usize, (j - j_min) as usize, main_lobe.contains(p)))
                    .collect();
                Evaluator::Separable(Box::new(SeparableEvaluator {
                    el_cut: AxisTable::new(&z, sines()),
                    az_cut: cost.azimuth_active().then(|| AxisTable::new(&y, sines())),
                    grid_y: AxisTable::new(&y, (i_min..=i_max).map(|i| i as f64 * grid.step.0)),
                    grid_z: AxisTable::new(&z, (j_min..=j_max).map(|j| j as f64 * grid.step.1)),
                    cells,
                    cell_area: grid.cell_area(),
                    cut_angles,
                    y,
                    z,
                }))
            }
            None => Evaluator::Generic(Box::new(GenericEvaluator { cut_angles, grid })),
        };
        Ok(Self {
            lattice,
            k,
            cost,
            terms_y,
            terms_z,
            settings,
            boundary,
            main_lobe,
            half_aperture: (0.5 * ap_y, 0.5 * ap_z),
            evaluator,
        })
    }

    pub fn dimension(&self) -> usize {
        self.terms_y + self.terms_z
    }

    /// Physical coefficients from normalized ones: `p_i = π x_i / h^{2i}`
    /// with `h` the half-aperture, so `|x_i| ≤ 1` bounds each term's phase
    /// swing over the aperture by `π`.
    pub fn taper_from_normalized(&self, x: &[f64]) -> PolynomialTaper {
        let scale = |xs: &[f64], h: f64| -> Vec<f64> {
            xs.iter()
                .enumerate()
                .map(|(i, v)| std::f64::consts::PI * v / h.powi(2 * (i as i32 + 1)))
                .collect()
        };
        PolynomialTaper {
            p_y: scale(&x[..self.terms_y], self.half_aperture.0),
            p_z: scale(&x[self.terms_y..], self.half_aperture.1),
        }
    }

    pub fn candidate_excitation(&self, x: &[f64]) -> Excitation {
        taper_to_excitation(&self.taper_from_normalized(x), &self.lattice)
    }

    /// Metrics used inside the cost: beamwidths and ripple from the cuts,
    /// energies from the coarse grid. Peak SLL is not computed.
    pub fn cost_metrics(&self, x: &[f64]) -> PatternMetrics {
        let taper = self.taper_from_normalized(x);
        let level = self.cost.bw_level_db;
        let mut m = PatternMetrics {
            bw_alpha_deg: None,
            bw_phi_deg: None,
            peak_sll_db: None,
            ripple_db: None,
            p_ml: 0.0,
            p_sl: 0.0,
            energy_ratio: None,
            bw_level_db: level,
            main_lobe: self.main_lobe,
            flags: Vec::new(),
        };
        let db_of = |power: &[f64]| {
            let peak = power.iter().copied().fold(0.0, f64::max).sqrt();
            power.iter().map(|p| to_db(p.sqrt(), peak)).collect::<Vec<_>>()
        };
        match &self.evaluator {
            Evaluator::Separable(ev) => {
                let cy: Vec<Complex64> = ev.y.iter().map(|&y| Complex64::cis(-taper.phase_y(y))).collect();
                let cz: Vec<Complex64> = ev.z.iter().map(|&z| Complex64::cis(-taper.phase_z(z))).collect();
                let el = analyze_cut(&ev.cut_angles, &db_of(&ev.el_cut.power(&cz)), level);
                m.bw_alpha_deg = el.as_ref().and_then(|c| c.bw_deg);
                let mut ripple = el.map_or(0.0, |c| c.ripple_db);
                if let Some(az_table) = &ev.az_cut {
                    let az = analyze_cut(&ev.cut_angles, &db_of(&az_table.power(&cy)), level);
                    m.bw_phi_deg = az.as_ref().and_then(|c| c.bw_deg);
                    ripple = ripple.max(az.map_or(0.0, |c| c.ripple_db));
                }
                m.ripple_db = Some(ripple);
                let py = ev.grid_y.power(&cy);
                let pz = ev.grid_z.power(&cz);
                for &(i, j, inside) in &ev.cells {
                    let e = py[i] * pz[j];
                    if inside {
                        m.p_ml += e;
                    } else {
                        m.p_sl += e;
                    }
                }
                m.p_ml *= ev.cell_area;
                m.p_sl *= ev.cell_area;
            }
            Evaluator::Generic(ev) => {
                let exc = taper_to_excitation(&taper, &self.lattice);
                let cut = af::elevation_cut(&self.lattice, &exc, &ev.cut_angles, 0.0, self.k)
                    .expect("excitation length matches lattice");
                let el = analyze_cut(&ev.cut_angles, &cut.db(), level);
                m.bw_alpha_deg = el.as_ref().and_then(|c| c.bw_deg);
                let mut ripple = el.map_or(0.0, |c| c.ripple_db);
                if self.cost.azimuth_active() {
                    let cut = af::azimuth_cut(&self.lattice, &exc, &ev.cut_angles, 0.0, self.k)
                        .expect("excitation length matches lattice");
                    let az = analyze_cut(&ev.cut_angles, &cut.db(), level);
                    m.bw_phi_deg = az.as_ref().and_then(|c| c.bw_deg);
                    ripple = ripple.max(az.map_or(0.0, |c| c.ripple_db));
                }
                m.ripple_db = Some(ripple);
                let g = af::evaluate_grid_direct(&self.lattice, &exc, &ev.grid)
                    .expect("excitation length matches lattice");
                let cell = ev.grid.cell_area();
                for (p, v) in g.points.iter().zip(&g.values) {
                    if self.main_lobe.contains(p) {
                        m.p_ml += cell * v.norm_sqr();
                    } else {
                        m.p_sl += cell * v.norm_sqr();
                    }
                }
            }
        }
        m.energy_ratio = (m.p_ml > 0.0 && m.p_sl > 0.0).then(|| m.p_ml / m.p_sl);
        m
    }

    pub fn cost_at(&self, x: &[f64]) -> f64 {
        evaluate_cost(&self.cost_metrics(x), &self.cost)
    }

    /// Full metrics of a taper: fine elevation (and azimuth) cuts and the
    /// verification grid through the array-factor engine.
    pub fn verify(&self, taper: &PolynomialTaper) -> Result<PatternMetrics, PtoError> {
        let exc = taper_to_excitation(taper, &self.lattice);
        let angles = af::angle_range(-90.0, 90.0, self.settings.verify_cut_step_deg);
        let el = af::elevation_cut(&self.lattice, &exc, &angles, 0.0, self.k)?;
        let az = af::azimuth_cut(&self.lattice, &exc, &angles, 0.0, self.k)?;
        let grid = sampling_grid(&self.boundary, &self.lattice, self.settings.verify_oversampling)?;
        let g = if self.lattice.is_regular() {
            af::evaluate_fft(&self.lattice, &exc, &grid)?
        } else {
            af::evaluate_grid_direct(&self.lattice, &exc, &grid)?
        };
        let level = self.cost.bw_level_db;
        let mut m = measure_composite(&[&el, &az], Some(&g), &self.main_lobe, level);
        if !self.cost.azimuth_active() {
            // Ripple follows the cost: the elevation cut alone.
            m.ripple_db = crate::metrics::measure_metrics(&el, &self.main_lobe, level).ripple_db;
        }
        Ok(m)
    }

    /// Cut of a taper's pattern for display.
    pub fn cut(&self, taper: &PolynomialTaper, axis: CutAxis, angles_deg: &[f64]) -> Result<af::Pattern, PtoError> {
        let exc = taper_to_excitation(taper, &self.lattice);
        Ok(match axis {
            CutAxis::Elevation => af::elevation_cut(&self.lattice, &exc, angles_deg, 0.0, self.k)?,
            CutAxis::Azimuth => af::azimuth_cut(&self.lattice, &exc, angles_deg, 0.0, self.k)?,
        })
    }
}

fn minmax(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(a, b), v| (a.min(v), b.max(v)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub index: usize,
    /// Normalized start point.
    pub initial: Vec<f64>,
    /// Normalized end point.
    pub x: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best vertex cost after each simplex iteration.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub seed: u64,
    pub restarts: Vec<RestartOutcome>,
    /// Best cost over the first `r + 1` restarts.
    pub running_best: Vec<f64>,
    pub best_restart: usize,
    pub best_cost: f64,
    pub best_normalized: Vec<f64>,
    pub best_taper: PolynomialTaper,
    /// Metrics used by the cost at the optimum.
    pub cost_metrics: PatternMetrics,
    /// Metrics at the optimum on the verification sampling.
    pub verification: PatternMetrics,
    /// Cost recomputed from the verification metrics.
    pub verified_cost: f64,
}

/// Random start for restart `index`: normalized coefficients uniform in
/// `±1`, from a ChaCha stream keyed by `(seed, index)`.
pub fn initial_point(seed: u64, index: usize, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// Multi-start simplex search. Restarts run in parallel; the report does not
/// depend on scheduling.
pub fn optimize(problem: &PtoProblem, restarts: usize, seed: u64) -> Result<OptimizationReport, PtoError> {
    if restarts == 0 {
        return Err(PtoError::NothingToOptimize);
    }
    let dim = problem.dimension();
    let outcomes: Vec<RestartOutcome> = (0..restarts)
        .into_par_iter()
        .map(|index| {
            let initial = initial_point(seed, index, dim);
            let r = simplex::minimize(|x| problem.cost_at(x), &initial, &problem.settings.simplex);
            RestartOutcome {
                index,
                initial,
                x: r.x,
                cost: r.cost,
                iterations: r.iterations,
                evaluations: r.evaluations,
                converged: r.converged,
                history: r.history,
            }
        })
        .collect();

    let mut running_best = Vec::with_capacity(restarts);
    let mut best_restart = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.cost < outcomes[best_restart].cost {
            best_restart = i;
        }
        running_best.push(outcomes[best_restart].cost);
    }
    let best = &outcomes[best_restart];
    let best_taper = problem.taper_from_normalized(&best.x);
    let verification = problem.verify(&best_taper)?;
    Ok(OptimizationReport {
        seed,
        best_cost: best.cost,
        best_normalized: best.x.clone(),
        cost_metrics: problem.cost_metrics(&best.x),
        verified_cost: evaluate_cost(&verification, &problem.cost),
        verification,
        best_taper,
        best_restart,
        running_best,
        restarts: outcomes,
    })
}
