//! Run configuration: one JSON file per invocation.

use std::path::{Path, PathBuf};

use beamshape::geometry::{ArrayLattice, Centering, ScanSector, SPEED_OF_LIGHT};
use beamshape::pto::{CostConfig, PtoSettings};
use beamshape::radar::{Compensation, Noise};
use beamshape::tpt::{Kernel, Window};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub sector: SectorSpec,
    #[serde(default)]
    pub band: BandSpec,
    /// Grid oversampling `Ω`.
    #[serde(default = "default_oversampling")]
    pub oversampling: f64,
    #[serde(default)]
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub domain: Option<DomainBlock>,
    pub af: Option<AfBlock>,
    pub pto: Option<PtoBlock>,
    pub tpt: Option<TptBlock>,
    pub simulate: Option<SimulateBlock>,
    pub metrics: Option<MetricsBlock>,
}

fn default_oversampling() -> f64 {
    2.0
}

/// Either a regular lattice or a CSV of positions in wavelengths.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub ny: Option<usize>,
    pub nz: Option<usize>,
    pub dy_over_lambda: Option<f64>,
    pub dz_over_lambda: Option<f64>,
    #[serde(default)]
    pub corner_anchored: bool,
    /// Columns `y_over_lambda, z_over_lambda`.
    pub positions_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorSpec {
    pub elevation_deg: [f64; 2],
    pub azimuth_deg: [f64; 2],
}

impl Default for SectorSpec {
    fn default() -> Self {
        Self {
            elevation_deg: [-25.0, 25.0],
            azimuth_deg: [-25.0, 25.0],
        }
    }
}

/// Operating wavelength, or a band whose upper edge sets it.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub wavelength_m: Option<f64>,
    pub f_min_hz: Option<f64>,
    pub f_max_hz: Option<f64>,
}

impl Default for BandSpec {
    fn default() -> Self {
        Self {
            wavelength_m: Some(1.0),
            f_min_hz: None,
            f_max_hz: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBlock {
    #[serde(default = "default_boundary_step")]
    pub boundary_step_deg: f64,
    /// Emit the brute-force cloud at this step.
    pub cloud_step_deg: Option<f64>,
}

fn default_boundary_step() -> f64 {
    beamshape::uplane::DEFAULT_BOUNDARY_STEP_DEG
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExcitationSpec {
    Uniform,
    /// Radians per metre^{2i}, as written by `pto`.
    Polynomial {
        #[serde(default)]
        p_y: Vec<f64>,
        #[serde(default)]
        p_z: Vec<f64>,
    },
    /// One phase per element in lattice order (z-major), radians.
    Phases { values: Vec<f64> },
    /// One real amplitude weight per element in lattice order.
    Weights { values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Auto,
    Fft,
    Direct,
}

/// Main-lobe region and beamwidth level shared by the metric-producing
/// subcommands.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    #[serde(default = "default_level")]
    pub bw_level_db: f64,
    /// Elevation extent of the main-lobe region; natural `λ/H` half-width in
    /// `u_z/k` when absent.
    pub main_lobe_bw_deg: Option<f64>,
}

impl Default for MetricSpec {
    fn default() -> Self {
        Self {
            bw_level_db: default_level(),
            main_lobe_bw_deg: None,
        }
    }
}

fn default_level() -> f64 {
    beamshape::metrics::DEFAULT_BW_LEVEL_DB
}

fn default_cut_step() -> f64 {
    0.1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AfBlock {
    pub excitation: ExcitationSpec,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "default_cut_step")]
    pub cut_step_deg: f64,
    #[serde(default)]
    pub metrics: MetricSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PtoBlock {
    pub targets_deg: Vec<f64>,
    #[serde(default)]
    pub terms_y: usize,
    #[serde(default = "default_terms_z")]
    pub terms_z: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// `bw_alpha_deg` is taken from each target.
    #[serde(default)]
    pub cost: CostConfig,
    #[serde(default)]
    pub settings: PtoSettings,
}

fn default_terms_z() -> usize {
    4
}

fn default_restarts() -> usize {
    20
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TptBlock {
    pub alpha_d_deg: Vec<f64>,
    pub phi_d_deg: Option<f64>,
    #[serde(default)]
    pub window: Window,
    #[serde(default)]
    pub kernel: Kernel,
    #[serde(default = "default_cut_step")]
    pub cut_step_deg: f64,
    /// Also emit the effective pattern over the u-plane grid.
    #[serde(default)]
    pub grid: bool,
    #[serde(default = "default_level")]
    pub bw_level_db: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    pub pulses: usize,
    pub pri_s: f64,
    /// TPT design transmitted by the odd/even pulses.
    pub design: TptDesign,
    pub targets: Vec<TargetSpec>,
    #[serde(default)]
    pub compensation: Compensation,
    pub noise_snr_db: Option<f64>,
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TptDesign {
    pub alpha_d_deg: f64,
    pub phi_d_deg: Option<f64>,
    #[serde(default)]
    pub window: Window,
    #[serde(default)]
    pub kernel: Kernel,
}

/// Velocity either in m/s or as the normalized Doppler phase `kvT/π`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub radial_velocity_mps: Option<f64>,
    pub kvt_over_pi: Option<f64>,
    #[serde(default)]
    pub elevation_deg: f64,
    #[serde(default)]
    pub azimuth_deg: f64,
    #[serde(default = "default_range")]
    pub range_m: f64,
    /// `[re, im]`.
    #[serde(default = "unit_reflectivity")]
    pub reflectivity: [f64; 2],
}

fn default_range() -> f64 {
    1000.0
}

fn unit_reflectivity() -> [f64; 2] {
    [1.0, 0.0]
}

/// Elevation sweep of the target direction at azimuth 0.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub from_deg: f64,
    pub to_deg: f64,
    pub step_deg: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsBlock {
    /// Grid CSV `u_y/k, u_z/k, mag_dB`.
    pub grid_csv: Option<PathBuf>,
    /// Cut CSVs `alpha_deg, mag_dB` or `phi_deg, mag_dB`.
    #[serde(default)]
    pub cut_csvs: Vec<PathBuf>,
    #[serde(default)]
    pub metrics: MetricSpec,
}

/// Subcommands that take a config block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Domain,
    Af,
    Pto,
    Tpt,
    Simulate,
    Metrics,
}

impl Block {
    pub fn name(self) -> &'static str {
        match self {
            Block::Domain => "domain",
            Block::Af => "af",
            Block::Pto => "pto",
            Block::Tpt => "tpt",
            Block::Simulate => "simulate",
            Block::Metrics => "metrics",
        }
    }
}

/// Parse a config, reporting the failing field path.
pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config(format!("{path}: {inner}"))
    })
}

/// Config text (for hashing) and the parsed config.
pub fn load(path: &Path) -> Result<(String, RunConfig), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg = parse(&text)?;
    cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok((text, cfg))
}

impl RunConfig {
    /// Make input paths relative to the config file's directory.
    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.lattice.positions_csv.as_mut() {
            fix(p);
        }
        if let Some(m) = self.metrics.as_mut() {
            if let Some(p) = m.grid_csv.as_mut() {
                fix(p);
            }
            m.cut_csvs.iter_mut().for_each(fix);
        }
    }

    /// Exactly one subcommand block may be present, and it must be `block`.
    pub fn check_block(&self, block: Block) -> Result<(), CliError> {
        let present: Vec<&str> = [
            (self.domain.is_some(), Block::Domain),
            (self.af.is_some(), Block::Af),
            (self.pto.is_some(), Block::Pto),
            (self.tpt.is_some(), Block::Tpt),
            (self.simulate.is_some(), Block::Simulate),
            (self.metrics.is_some(), Block::Metrics),
        ]
        .into_iter()
        .filter(|(on, _)| *on)
        .map(|(_, b)| b.name())
        .collect();
        match present.as_slice() {
            [one] if *one == block.name() => Ok(()),
            [] => Err(CliError::Config(format!("{}: block missing", block.name()))),
            _ => Err(CliError::Config(format!(
                "expected exactly one subcommand block `{}`, found [{}]",
                block.name(),
                present.join(", ")
            ))),
        }
    }

    pub fn wavelength(&self) -> Result<f64, CliError> {
        let b = &self.band;
        let bad = |m: String| Err(CliError::Config(format!("band: {m}")));
        match (b.wavelength_m, b.f_min_hz, b.f_max_hz) {
            (Some(l), None, None) if l > 0.0 && l.is_finite() => Ok(l),
            (Some(l), None, None) => bad(format!("wavelength_m must be positive, got {l}")),
            (None, Some(lo), Some(hi)) => {
                if !(lo > 0.0 && hi.is_finite()) {
                    bad(format!("frequencies must be positive, got {lo}..{hi}"))
                } else if lo > hi {
                    bad(format!("f_min_hz {lo} exceeds f_max_hz {hi}"))
                } else {
                    Ok(SPEED_OF_LIGHT / hi)
                }
            }
            _ => bad("give either wavelength_m or both f_min_hz and f_max_hz".into()),
        }
    }

    pub fn lattice(&self) -> Result<ArrayLattice, CliError> {
        let l = &self.lattice;
        let lambda = self.wavelength()?;
        let cfg = |e: beamshape::geometry::GeometryError| CliError::Config(format!("lattice: {e}"));
        match (&l.positions_csv, l.ny, l.nz, l.dy_over_lambda, l.dz_over_lambda) {
            (None, Some(ny), Some(nz), Some(dy), Some(dz)) => {
                let centering = if l.corner_anchored {
                    Centering::Corner
                } else {
                    Centering::Centered
                };
                ArrayLattice::regular(ny, nz, dy * lambda, dz * lambda, lambda, centering).map_err(cfg)
            }
            (Some(path), None, None, None, None) => {
                let positions = crate::output::read_positions(path)?
                    .into_iter()
                    .map(|(y, z)| (y * lambda, z * lambda))
                    .collect();
                ArrayLattice::from_positions(positions, lambda).map_err(cfg)
            }
            _ => Err(CliError::Config(
                "lattice: give either ny, nz, dy_over_lambda, dz_over_lambda or positions_csv".into(),
            )),
        }
    }

    pub fn sector(&self) -> Result<ScanSector, CliError> {
        let s = &self.sector;
        ScanSector::new(s.elevation_deg[0], s.elevation_deg[1], s.azimuth_deg[0], s.azimuth_deg[1])
            .map_err(|e| CliError::Config(format!("sector: {e}")))
    }
}

impl SimulateBlock {
    pub fn noise(&self, seed: u64) -> Option<Noise> {
        self.noise_snr_db.map(|snr_db| Noise { snr_db, seed })
    }
}
