//! Subcommand bodies. Each writes its artifacts through [`Outputs`] and
//! reports whether any emitted pattern was degenerate.

use std::f64::consts::PI;
use std::path::PathBuf;

use beamshape::af::{self, angle_range, to_db, CutAxis, Pattern};
use beamshape::geometry::{ArrayLattice, Direction, Excitation};
use beamshape::metrics::{measure_composite, MainLobeRegion, MetricFlag, PatternMetrics};
use beamshape::pto::{optimize, taper_to_excitation, CostConfig, PolynomialTaper, PtoProblem};
use beamshape::radar::{
    self, process, signed_bin, simulate_returns, PulseTrainScenario, Target, TransmitValues,
};
use beamshape::tpt::{self, design_weights, odd_even_excitations, PulsePair};
use beamshape::uplane::{brute_force_support, compute_boundary, sampling_grid, BoundaryPolyline, UPoint};
use log::{info, warn};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{
    AfBlock, DomainBlock, ExcitationSpec, Method, MetricSpec, MetricsBlock, PtoBlock, RunConfig, SimulateBlock,
    TptBlock, TptDesign,
};
use crate::error::CliError;
use crate::output::{fmt9, read_pattern, Outputs};

/// Shared inputs of one run.
pub struct Run {
    pub cfg: RunConfig,
    pub lattice: ArrayLattice,
    pub k: f64,
    pub seed: u64,
    pub out: Outputs,
    /// Set when an emitted pattern is flagged degenerate.
    pub degenerate: Option<String>,
}

impl Run {
    pub fn new(cfg: RunConfig, seed: u64, out: Outputs) -> Result<Self, CliError> {
        let lattice = cfg.lattice()?;
        let k = lattice.wavenumber();
        if !(cfg.oversampling > 1.0) {
            return Err(CliError::Config(format!("oversampling: must exceed 1, got {}", cfg.oversampling)));
        }
        Ok(Self {
            cfg,
            lattice,
            k,
            seed,
            out,
            degenerate: None,
        })
    }

    fn boundary(&self, step_deg: f64) -> Result<BoundaryPolyline, CliError> {
        Ok(compute_boundary(&self.cfg.sector()?, self.k, step_deg)?)
    }

    fn default_boundary(&self) -> Result<BoundaryPolyline, CliError> {
        self.boundary(beamshape::uplane::DEFAULT_BOUNDARY_STEP_DEG)
    }

    /// Natural `λ/L_y` half-width of the main-lobe region, in `u/k`.
    fn natural_half_y(&self) -> f64 {
        MainLobeRegion::natural_half_width(self.lattice.aperture().0) / self.k
    }

    fn main_lobe(&self, spec: &MetricSpec) -> MainLobeRegion {
        let hy = self.natural_half_y();
        match spec.main_lobe_bw_deg {
            Some(bw) => MainLobeRegion::elevation_broadening(1.0, bw, hy),
            None => MainLobeRegion::new(
                UPoint::ORIGIN,
                hy,
                MainLobeRegion::natural_half_width(self.lattice.aperture().1) / self.k,
            ),
        }
    }

    /// Metrics of written pattern files, so that reloading them reproduces
    /// the emitted JSON.
    fn metrics_json(
        &mut self,
        name: &str,
        grid: Option<&PathBuf>,
        cuts: &[PathBuf],
        ml: &MainLobeRegion,
        level_db: f64,
    ) -> Result<PatternMetrics, CliError> {
        let m = metrics_from_files(grid, cuts, ml, level_db)?;
        self.out.json(name, &m)?;
        for flag in [MetricFlag::ZeroPattern, MetricFlag::EmptyMainLobe] {
            if m.has_flag(flag) && self.degenerate.is_none() {
                self.degenerate = Some(format!("{name}: {flag:?}"));
            }
        }
        Ok(m)
    }

    fn cut_angles(step: f64) -> Result<Vec<f64>, CliError> {
        if !(step > 0.0 && step <= 90.0) {
            return Err(CliError::Config(format!("cut_step_deg: must lie in (0, 90], got {step}")));
        }
        Ok(angle_range(-90.0, 90.0, step))
    }
}

pub fn metrics_from_files(
    grid: Option<&PathBuf>,
    cuts: &[PathBuf],
    ml: &MainLobeRegion,
    level_db: f64,
) -> Result<PatternMetrics, CliError> {
    if grid.is_none() && cuts.is_empty() {
        return Err(CliError::Config("metrics: give grid_csv or cut_csvs".into()));
    }
    let grid = grid.map(|p| read_pattern(p)).transpose()?;
    let cuts = cuts.iter().map(|p| read_pattern(p)).collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&Pattern> = cuts.iter().collect();
    Ok(measure_composite(&refs, grid.as_ref(), ml, level_db))
}

fn normalized(p: UPoint, k: f64) -> [f64; 2] {
    [p.uy / k, p.uz / k]
}

#[derive(Serialize)]
struct QuadrantJson {
    signs: [f64; 2],
    elevation_corner_deg: f64,
    azimuth_corner_deg: f64,
    alpha_b_deg: f64,
    p: [f64; 2],
    q: [f64; 2],
    m: [f64; 2],
    s: [f64; 2],
}

#[derive(Serialize)]
struct GridJson {
    k: f64,
    oversampling: f64,
    step_over_k: [f64; 2],
    half_counts: [usize; 2],
    raster_dims: [usize; 2],
    in_boundary_count: usize,
    predicted_count: f64,
    area_over_k2: f64,
    aperture_over_lambda: [f64; 2],
    fft_size: Option<[usize; 2]>,
    boundary_extent_over_k: [f64; 2],
    quadrants: Vec<QuadrantJson>,
}

#[derive(Serialize)]
struct CloudJson {
    step_deg: f64,
    total: u64,
    outside: u64,
    max_uz_over_k: f64,
    max_uy_over_k: f64,
}

pub fn domain(run: &mut Run, block: &DomainBlock) -> Result<(), CliError> {
    let k = run.k;
    let boundary = run.boundary(block.boundary_step_deg)?;
    let rows = boundary.plane_vertices().into_iter().map(|(v, seg)| {
        let [y, z] = normalized(v, k);
        [y, z, seg.id() as f64]
    });
    run.out.csv("boundary.csv", &["u_y/k", "u_z/k", "segment_id"], rows)?;

    let grid = sampling_grid(&boundary, &run.lattice, run.cfg.oversampling)?;
    let lambda = run.lattice.wavelength();
    let extent = boundary.max_extent();
    let meta = GridJson {
        k,
        oversampling: grid.oversampling,
        step_over_k: [grid.step.0 / k, grid.step.1 / k],
        half_counts: [grid.half_counts.0, grid.half_counts.1],
        raster_dims: [grid.raster_dims().0, grid.raster_dims().1],
        in_boundary_count: grid.len(),
        predicted_count: grid.predicted_count(),
        area_over_k2: grid.area / (k * k),
        aperture_over_lambda: [grid.aperture.0 / lambda, grid.aperture.1 / lambda],
        fft_size: grid.fft.map(|f| [f.ny, f.nz]),
        boundary_extent_over_k: [extent.0 / k, extent.1 / k],
        quadrants: boundary
            .quadrants
            .iter()
            .map(|q| QuadrantJson {
                signs: [q.signs.0, q.signs.1],
                elevation_corner_deg: q.elevation_corner_deg,
                azimuth_corner_deg: q.azimuth_corner_deg,
                alpha_b_deg: q.alpha_b_deg,
                p: normalized(q.p, k),
                q: normalized(q.q, k),
                m: normalized(q.m, k),
                s: normalized(q.s, k),
            })
            .collect(),
    };
    run.out.json("grid.json", &meta)?;

    if let Some(step) = block.cloud_step_deg {
        let sector = run.cfg.sector()?;
        let cloud = brute_force_support(&sector, k, step)?;
        if cloud.len() > 50_000_000 {
            warn!("writing {} cloud points", cloud.len());
        }
        run.out
            .csv("cloud.csv", &["u_y/k", "u_z/k"], cloud.iter().map(|p| normalized(p, k)))?;
        let survey = cloud.survey(&boundary, beamshape::uplane::DEFAULT_CONTAINMENT_TOL * k, 720);
        if survey.outside > 0 {
            warn!("{} cloud points fall outside the boundary", survey.outside);
        }
        run.out.json(
            "cloud.json",
            &CloudJson {
                step_deg: step,
                total: survey.total,
                outside: survey.outside,
                max_uz_over_k: survey.max_uz / k,
                max_uy_over_k: survey.max_uy / k,
            },
        )?;
    }
    Ok(())
}

fn excitation(run: &Run, spec: &ExcitationSpec) -> Result<Excitation, CliError> {
    let n = run.lattice.len();
    let check = |len: usize| {
        if len == n {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "af.excitation.values: {len} values for {n} elements"
            )))
        }
    };
    Ok(match spec {
        ExcitationSpec::Uniform => Excitation::uniform(n),
        ExcitationSpec::Polynomial { p_y, p_z } => taper_to_excitation(
            &PolynomialTaper {
                p_y: p_y.clone(),
                p_z: p_z.clone(),
            },
            &run.lattice,
        ),
        ExcitationSpec::Phases { values } => {
            check(values.len())?;
            Excitation::from_phases(values)
        }
        ExcitationSpec::Weights { values } => {
            check(values.len())?;
            Excitation::from_real_weights(values)
        }
    })
}

pub fn af(run: &mut Run, block: &AfBlock) -> Result<(), CliError> {
    let exc = excitation(run, &block.excitation)?;
    let boundary = run.default_boundary()?;
    let grid = sampling_grid(&boundary, &run.lattice, run.cfg.oversampling)?;
    let use_fft = match block.method {
        Method::Auto => run.lattice.is_regular(),
        Method::Fft => true,
        Method::Direct => false,
    };
    let pattern = if use_fft {
        af::evaluate_fft(&run.lattice, &exc, &grid)?
    } else {
        af::evaluate_grid_direct(&run.lattice, &exc, &grid)?
    };
    info!("evaluated {} grid points ({})", grid.len(), if use_fft { "FFT" } else { "direct" });
    let angles = Run::cut_angles(block.cut_step_deg)?;
    let el = af::elevation_cut(&run.lattice, &exc, &angles, 0.0, run.k)?;
    let az = af::azimuth_cut(&run.lattice, &exc, &angles, 0.0, run.k)?;
    let g = run.out.grid_pattern("pattern.csv", &pattern)?;
    let cuts = vec![
        run.out.cut_pattern("elevation_cut.csv", &el)?,
        run.out.cut_pattern("azimuth_cut.csv", &az)?,
    ];
    let ml = run.main_lobe(&block.metrics);
    run.metrics_json("metrics.json", Some(&g), &cuts, &ml, block.metrics.bw_level_db)?;
    Ok(())
}

pub fn metrics(run: &mut Run, block: &MetricsBlock) -> Result<(), CliError> {
    let ml = run.main_lobe(&block.metrics);
    run.metrics_json(
        "metrics.json",
        block.grid_csv.as_ref(),
        &block.cut_csvs,
        &ml,
        block.metrics.bw_level_db,
    )?;
    Ok(())
}

fn tag(prefix: &str, value: f64) -> String {
    format!("{prefix}{}", fmt9(value).replace('.', "p").replace('-', "m"))
}

#[derive(Serialize)]
struct RestartJson {
    index: usize,
    cost: f64,
    iterations: usize,
    evaluations: usize,
    converged: bool,
}

#[derive(Serialize)]
struct PtoJson<'a> {
    target_bw_alpha_deg: f64,
    cost: &'a CostConfig,
    seed: u64,
    /// Radians per metre^{2i}.
    taper: &'a PolynomialTaper,
    /// `p_i h^{2i} / π`.
    normalized: &'a [f64],
    best_cost: f64,
    verified_cost: f64,
    best_restart: usize,
    running_best: &'a [f64],
    restarts: Vec<RestartJson>,
}

fn axis_coords(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn pto(run: &mut Run, block: &PtoBlock, prefix: &str) -> Result<(), CliError> {
    if block.targets_deg.is_empty() {
        return Err(CliError::Config("pto.targets_deg: at least one target".into()));
    }
    let boundary = run.default_boundary()?;
    let lambda = run.lattice.wavelength();
    for &target in &block.targets_deg {
        let cost = CostConfig {
            bw_alpha_deg: target,
            ..block.cost.clone()
        };
        let problem = PtoProblem::new(
            run.lattice.clone(),
            cost,
            block.terms_y,
            block.terms_z,
            boundary.clone(),
            block.settings.clone(),
        )?;
        let report = optimize(&problem, block.restarts, run.seed)?;
        info!("target {target} deg: best cost {:.4} from restart {}", report.best_cost, report.best_restart);
        let t = tag(&format!("{prefix}bw"), target);
        run.out.json(
            &format!("{t}_coefficients.json"),
            &PtoJson {
                target_bw_alpha_deg: target,
                cost: &problem.cost,
                seed: run.seed,
                taper: &report.best_taper,
                normalized: &report.best_normalized,
                best_cost: report.best_cost,
                verified_cost: report.verified_cost,
                best_restart: report.best_restart,
                running_best: &report.running_best,
                restarts: report
                    .restarts
                    .iter()
                    .map(|r| RestartJson {
                        index: r.index,
                        cost: r.cost,
                        iterations: r.iterations,
                        evaluations: r.evaluations,
                        converged: r.converged,
                    })
                    .collect(),
            },
        )?;
        let zs = axis_coords(run.lattice.positions().iter().map(|p| p.1));
        let taper = &report.best_taper;
        run.out.csv(
            &format!("{t}_phase_z.csv"),
            &["z_over_lambda", "phase_rad"],
            zs.iter().map(|&z| [z / lambda, taper.phase_z(z)]),
        )?;
        if block.terms_y > 0 {
            let ys = axis_coords(run.lattice.positions().iter().map(|p| p.0));
            run.out.csv(
                &format!("{t}_phase_y.csv"),
                &["y_over_lambda", "phase_rad"],
                ys.iter().map(|&y| [y / lambda, taper.phase_y(y)]),
            )?;
        }
        let angles = Run::cut_angles(block.settings.verify_cut_step_deg)?;
        let mut cuts = vec![run
            .out
            .cut_pattern(&format!("{t}_cut.csv"), &problem.cut(taper, CutAxis::Elevation, &angles)?)?];
        if problem.cost.c_bw_phi > 0.0 {
            let az = problem.cut(taper, CutAxis::Azimuth, &angles)?;
            cuts.push(run.out.cut_pattern(&format!("{t}_azimuth_cut.csv"), &az)?);
        }
        let grid = sampling_grid(&boundary, &run.lattice, block.settings.verify_oversampling)?;
        let exc = taper_to_excitation(taper, &run.lattice);
        let g = if run.lattice.is_regular() {
            af::evaluate_fft(&run.lattice, &exc, &grid)?
        } else {
            af::evaluate_grid_direct(&run.lattice, &exc, &grid)?
        };
        let g = run.out.grid_pattern(&format!("{t}_uplane.csv"), &g)?;
        let ml = problem.main_lobe;
        let ml = MainLobeRegion::new(UPoint::ORIGIN, ml.half_width_y / run.k, ml.half_width_z / run.k);
        run.metrics_json(&format!("{t}_metrics.json"), Some(&g), &cuts, &ml, problem.cost.bw_level_db)?;
    }
    Ok(())
}

fn design_pair(run: &Run, d: &TptDesign) -> Result<(tpt::WeightDesign, PulsePair), CliError> {
    let design = design_weights(&run.lattice, d.alpha_d_deg, d.phi_d_deg, d.window, d.kernel, run.k)?;
    for w in &design.warnings {
        warn!("alpha_d {}: {w:?}", d.alpha_d_deg);
    }
    let pair = odd_even_excitations(&design.weights)?;
    Ok((design, pair))
}

#[derive(Serialize)]
struct DesignJson<'a> {
    alpha_d_deg: f64,
    phi_d_deg: Option<f64>,
    u_d_z_over_k: f64,
    u_d_y_over_k: Option<f64>,
    window: tpt::Window,
    kernel: tpt::Kernel,
    warnings: &'a [tpt::DesignWarning],
}

pub fn tpt(run: &mut Run, block: &TptBlock, prefix: &str) -> Result<(), CliError> {
    if block.alpha_d_deg.is_empty() {
        return Err(CliError::Config("tpt.alpha_d_deg: at least one half-width".into()));
    }
    let lambda = run.lattice.wavelength();
    let angles = Run::cut_angles(block.cut_step_deg)?;
    for &alpha_d in &block.alpha_d_deg {
        let spec = TptDesign {
            alpha_d_deg: alpha_d,
            phi_d_deg: block.phi_d_deg,
            window: block.window,
            kernel: block.kernel,
        };
        let (design, pair) = design_pair(run, &spec)?;
        let t = tag(&format!("{prefix}ad"), alpha_d);
        run.out.json(
            &format!("{t}_design.json"),
            &DesignJson {
                alpha_d_deg: alpha_d,
                phi_d_deg: block.phi_d_deg,
                u_d_z_over_k: design.u_d_z / run.k,
                u_d_y_over_k: design.u_d_y.map(|u| u / run.k),
                window: design.window,
                kernel: design.kernel,
                warnings: &design.warnings,
            },
        )?;
        let positions = run.lattice.positions().to_vec();
        run.out.csv(
            &format!("{t}_weights.csv"),
            &["y_over_lambda", "z_over_lambda", "weight"],
            positions.iter().zip(&design.weights).map(|(&(y, z), &w)| [y / lambda, z / lambda, w]),
        )?;
        // Phases along z on the column nearest y = 0.
        let grid = run.lattice.grid().expect("separable designs need a regular lattice").clone();
        let iy = (grid.ny - 1) / 2;
        let (odd, even) = tpt::pulse_phases(&pair);
        run.out.csv(
            &format!("{t}_phases.csv"),
            &["z_over_lambda", "odd_rad", "even_rad"],
            (0..grid.nz).map(|iz| {
                let n = grid.index(iy, iz);
                [positions[n].1 / lambda, odd[n], even[n]]
            }),
        )?;
        let cut = tpt::effective_cut(&run.lattice, &pair, CutAxis::Elevation, &angles, 0.0, run.k)?;
        let cuts = vec![run.out.cut_pattern(&format!("{t}_cut.csv"), &cut)?];
        let g = if block.grid {
            let boundary = run.default_boundary()?;
            let ugrid = sampling_grid(&boundary, &run.lattice, run.cfg.oversampling)?;
            let p = tpt::effective_af_grid(&run.lattice, &pair, &ugrid)?;
            Some(run.out.grid_pattern(&format!("{t}_uplane.csv"), &p)?)
        } else {
            None
        };
        let ml = MainLobeRegion::elevation_broadening(1.0, 2.0 * alpha_d, run.natural_half_y());
        run.metrics_json(&format!("{t}_metrics.json"), g.as_ref(), &cuts, &ml, block.bw_level_db)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TargetJson {
    elevation_deg: f64,
    azimuth_deg: f64,
    radial_velocity_mps: f64,
    kvt_over_pi: f64,
    peak_bin: i64,
    estimated_velocity_mps: f64,
    velocity_error_bins: f64,
    compensation_velocity_mps: f64,
    /// `|S^eff|` at the peak bin.
    recovered_magnitude: f64,
    /// `N_p |AF^eff ρ|`.
    expected_magnitude: f64,
    recovered_vs_expected_db: f64,
    af_odd_magnitude: f64,
    af_even_magnitude: f64,
    af_effective_magnitude: f64,
}

struct Processed {
    bin: i64,
    v_hat: f64,
    v_comp: f64,
    recovered: f64,
}

fn run_train(sc: &PulseTrainScenario, tx: &TransmitValues, block: &SimulateBlock) -> Result<Processed, CliError> {
    let samples = simulate_returns(sc, tx)?;
    let p = process(&samples, sc.k, sc.pri, block.compensation)?;
    let m = sc.pulses / 2;
    let bin = (p.estimated_velocity * sc.k * sc.pulses as f64 * sc.pri / PI).round() as i64;
    let l = bin.rem_euclid(m as i64) as usize;
    Ok(Processed {
        bin: signed_bin(l, m),
        v_hat: p.estimated_velocity,
        v_comp: p.compensation_velocity,
        recovered: p.effective.bins[l].norm(),
    })
}

pub fn simulate(run: &mut Run, block: &SimulateBlock) -> Result<(), CliError> {
    if block.targets.is_empty() {
        return Err(CliError::Config("simulate.targets: at least one target".into()));
    }
    let (_, pair) = design_pair(run, &block.design)?;
    let (k, pri) = (run.k, block.pri_s);
    let bin_velocity = PI / (k * block.pulses as f64 * pri);
    let mut first_velocity = 0.0;
    for (i, t) in block.targets.iter().enumerate() {
        let velocity = match (t.radial_velocity_mps, t.kvt_over_pi) {
            (Some(v), None) => v,
            (None, Some(x)) => x * PI / (k * pri),
            _ => {
                return Err(CliError::Config(format!(
                    "simulate.targets[{i}]: give either radial_velocity_mps or kvt_over_pi"
                )))
            }
        };
        if i == 0 {
            first_velocity = velocity;
        }
        let dir = Direction::new(t.elevation_deg, t.azimuth_deg)
            .map_err(|e| CliError::Config(format!("simulate.targets[{i}]: {e}")))?;
        let (uy, uz) = dir.transverse_wavevector(k);
        let rho = Complex64::new(t.reflectivity[0], t.reflectivity[1]);
        let sc = PulseTrainScenario {
            pulses: block.pulses,
            pri,
            k,
            target: Target {
                range_m: t.range_m,
                radial_velocity: velocity,
                reflectivity: rho,
                direction: UPoint::new(uy, uz),
            },
            af_receive: Complex64::new(1.0, 0.0),
            noise: block.noise(run.seed.wrapping_add(i as u64)),
        };
        sc.validate()?;
        let tx = radar::transmit_values(&run.lattice, &pair, sc.target.direction)?;
        let r = run_train(&sc, &tx, block)?;
        let expected = block.pulses as f64 * (tx.effective() * rho).norm();
        run.out.json(
            &format!("simulate_target{i}.json"),
            &TargetJson {
                elevation_deg: t.elevation_deg,
                azimuth_deg: t.azimuth_deg,
                radial_velocity_mps: velocity,
                kvt_over_pi: sc.doppler_phase() / PI,
                peak_bin: r.bin,
                estimated_velocity_mps: r.v_hat,
                velocity_error_bins: (r.v_hat - velocity) / bin_velocity,
                compensation_velocity_mps: r.v_comp,
                recovered_magnitude: r.recovered,
                expected_magnitude: expected,
                recovered_vs_expected_db: to_db(r.recovered, expected),
                af_odd_magnitude: tx.odd.norm(),
                af_even_magnitude: tx.even.norm(),
                af_effective_magnitude: tx.effective().norm(),
            },
        )?;
    }

    if let Some(sw) = &block.sweep {
        if !(sw.step_deg > 0.0) || sw.from_deg > sw.to_deg || sw.from_deg < -90.0 || sw.to_deg > 90.0 {
            return Err(CliError::Config("simulate.sweep: need -90 <= from_deg <= to_deg <= 90, step_deg > 0".into()));
        }
        let angles = angle_range(sw.from_deg, sw.to_deg, sw.step_deg);
        let mut recovered = Vec::with_capacity(angles.len());
        let mut analytic = Vec::with_capacity(angles.len());
        for &a in &angles {
            let u = UPoint::new(0.0, k * a.to_radians().sin());
            let sc = PulseTrainScenario {
                pulses: block.pulses,
                pri,
                k,
                target: Target {
                    radial_velocity: first_velocity,
                    direction: u,
                    ..Default::default()
                },
                af_receive: Complex64::new(1.0, 0.0),
                noise: block.noise(run.seed),
            };
            let tx = radar::transmit_values(&run.lattice, &pair, u)?;
            recovered.push(run_train(&sc, &tx, block)?.recovered);
            analytic.push(tx.effective().norm());
        }
        let db = |v: &[f64]| {
            let peak = v.iter().copied().fold(0.0, f64::max);
            v.iter().map(|&x| to_db(x, peak)).collect::<Vec<_>>()
        };
        let (rec, ana) = (db(&recovered), db(&analytic));
        run.out.csv(
            "simulate_sweep.csv",
            &["alpha_deg", "recovered_dB", "analytic_dB"],
            angles.iter().zip(rec.iter().zip(&ana)).map(|(&a, (&r, &e))| [a, r, e]),
        )?;
    }
    Ok(())
}

/// Figure recipes on the configured lattice (16×16, 0.5λ, ±25° by default).
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    /// Elevation cuts of the PTO solutions at 10, 30 and 50 degrees.
    Fig4,
    /// Phase along z of the PTO solutions.
    Fig5,
    /// u-plane pattern of the narrow PTO solution.
    Fig6,
    /// Elevation cuts of TPT designs with half-widths 10, 15 and 25 degrees.
    Fig7,
    /// Odd/even phase along z of the TPT designs.
    Fig8,
}

pub fn reproduce(run: &mut Run, figure: Figure) -> Result<(), CliError> {
    let pto_block = |targets: Vec<f64>| PtoBlock {
        targets_deg: targets,
        terms_y: 0,
        terms_z: 4,
        restarts: 20,
        cost: CostConfig::default(),
        settings: Default::default(),
    };
    let tpt_block = TptBlock {
        alpha_d_deg: vec![10.0, 15.0, 25.0],
        phi_d_deg: None,
        window: Default::default(),
        kernel: Default::default(),
        cut_step_deg: 0.1,
        grid: false,
        bw_level_db: beamshape::metrics::DEFAULT_BW_LEVEL_DB,
    };
    match figure {
        Figure::Fig4 => pto(run, &pto_block(vec![10.0, 30.0, 50.0]), "fig4_"),
        Figure::Fig5 => pto(run, &pto_block(vec![10.0, 30.0, 50.0]), "fig5_"),
        Figure::Fig6 => pto(run, &pto_block(vec![10.0]), "fig6_"),
        Figure::Fig7 => tpt(run, &tpt_block, "fig7_"),
        Figure::Fig8 => tpt(run, &tpt_block, "fig8_"),
    }
}
