//! Slow-time pulse-train simulation and split odd/even Doppler processing.
//!
//! Pulse `p` (0-based, time `pT`) carries the odd excitation when `p` is
//! even and the even excitation when `p` is odd. Each parity subsequence is
//! transformed separately; the even spectrum is phase-compensated by
//! `exp(−j 2k v̂ T)` and added to the odd one.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::af::{self, AfError};
use crate::geometry::ArrayLattice;
use crate::tpt::PulsePair;
use crate::uplane::UPoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadarError {
    #[error("pulse count {0} must be even and at least 2")]
    PulseCount(usize),
    #[error("PRI must be positive, got {0}")]
    Pri(f64),
    #[error("wavenumber must be positive, got {0}")]
    Wavenumber(f64),
    #[error("spectra lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Af(#[from] AfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Target {
    pub range_m: f64,
    pub radial_velocity: f64,
    pub reflectivity: Complex64,
    pub direction: UPoint,
}

impl Default for Target {
    fn default() -> Self {
        Self {
            range_m: 1000.0,
            radial_velocity: 0.0,
            reflectivity: Complex64::new(1.0, 0.0),
            direction: UPoint::ORIGIN,
        }
    }
}

/// Complex white Gaussian noise with per-sample variance `10^{−snr/10}`
/// relative to a unit-amplitude return.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Noise {
    pub snr_db: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseTrainScenario {
    pub pulses: usize,
    pub pri: f64,
    pub k: f64,
    pub target: Target,
    /// Receive pattern at the target direction.
    pub af_receive: Complex64,
    pub noise: Option<Noise>,
}

impl PulseTrainScenario {
    pub fn validate(&self) -> Result<(), RadarError> {
        if self.pulses < 2 || !self.pulses.is_multiple_of(2) {
            return Err(RadarError::PulseCount(self.pulses));
        }
        if !(self.pri > 0.0) {
            return Err(RadarError::Pri(self.pri));
        }
        if !(self.k > 0.0) {
            return Err(RadarError::Wavenumber(self.k));
        }
        Ok(())
    }

    /// `k v T` of the target.
    pub fn doppler_phase(&self) -> f64 {
        self.k * self.target.radial_velocity * self.pri
    }
}

/// Transmit array factors of the two pulse parities at one direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmitValues {
    pub odd: Complex64,
    pub even: Complex64,
}

impl TransmitValues {
    pub fn constant(v: Complex64) -> Self {
        Self { odd: v, even: v }
    }

    /// `½ (AF^o + AF^e)`.
    pub fn effective(&self) -> Complex64 {
        0.5 * (self.odd + self.even)
    }
}

pub fn transmit_values(lattice: &ArrayLattice, pair: &PulsePair, direction: UPoint) -> Result<TransmitValues, RadarError> {
    let o = af::evaluate_direct(lattice, &pair.odd, &[direction])?;
    let e = af::evaluate_direct(lattice, &pair.even, &[direction])?;
    Ok(TransmitValues {
        odd: o.values[0],
        even: e.values[0],
    })
}

/// `s_p = AF_T^{(p)} · AF_R · ρ · exp(−j 2k (R_0 − v p T))`, plus optional
/// noise.
pub fn simulate_returns(sc: &PulseTrainScenario, tx: &TransmitValues) -> Result<Vec<Complex64>, RadarError> {
    sc.validate()?;
    let t = &sc.target;
    // The range phase is split off so the per-pulse argument stays small.
    let base = sc.af_receive * t.reflectivity * Complex64::cis(-2.0 * sc.k * t.range_m);
    let mut out: Vec<Complex64> = (0..sc.pulses)
        .map(|p| {
            let af_t = if p % 2 == 0 { tx.odd } else { tx.even };
            af_t * base * Complex64::cis(2.0 * sc.doppler_phase() * p as f64)
        })
        .collect();
    if let Some(n) = sc.noise {
        let sigma = (0.5 * 10f64.powf(-n.snr_db / 10.0)).sqrt();
        let normal = Normal::new(0.0, sigma).expect("finite standard deviation");
        let mut rng = ChaCha8Rng::seed_from_u64(n.seed);
        for s in &mut out {
            *s += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
    }
    Ok(out)
}

fn forward_dft(mut x: Vec<Complex64>) -> Vec<Complex64> {
    let fft = FftPlanner::<f64>::new().plan_fft_forward(x.len());
    fft.process(&mut x);
    x
}

/// Unnormalized `S(l) = Σ_n x_n exp(−j 2π n l / (N_p/2))` of the odd-pulse
/// (even index) and even-pulse (odd index) subsequences.
pub fn split_fft(samples: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>), RadarError> {
    if samples.len() < 2 || !samples.len().is_multiple_of(2) {
        return Err(RadarError::PulseCount(samples.len()));
    }
    let odd = samples.iter().step_by(2).copied().collect();
    let even = samples.iter().skip(1).step_by(2).copied().collect();
    Ok((forward_dft(odd), forward_dft(even)))
}

/// Bin `l` of a length-`n` spectrum as a signed frequency in `[−n/2, n/2)`.
pub fn signed_bin(l: usize, n: usize) -> i64 {
    if l >= n.div_ceil(2) {
        l as i64 - n as i64
    } else {
        l as i64
    }
}

/// `v = l π / (k N_p T)`.
pub fn estimate_velocity(bin: i64, k: f64, pulses: usize, pri: f64) -> f64 {
    bin as f64 * PI / (k * pulses as f64 * pri)
}

/// Largest `|v|` a conventional full-rate train resolves: `π / (2kT)`.
pub fn conventional_unambiguous_velocity(k: f64, pri: f64) -> f64 {
    PI / (2.0 * k * pri)
}

/// Largest `|v|` under odd/even alternation, with effective PRI `2T`.
pub fn tpt_unambiguous_velocity(k: f64, pri: f64) -> f64 {
    conventional_unambiguous_velocity(k, 2.0 * pri)
}

/// Worst-case (half-bin) peak loss in dB of a length-`m` unwindowed DFT.
pub fn scalloping_loss_db(m: usize) -> f64 {
    let m = m as f64;
    -20.0 * (1.0 / (m * (PI / (2.0 * m)).sin())).log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DopplerSpectrum {
    pub bins: Vec<Complex64>,
    pub peak_bin: usize,
    /// Velocity at the signed peak bin.
    pub velocity: f64,
}

fn peak_index(power: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, p) in power.enumerate() {
        if p > best.1 {
            best = (i, p);
        }
    }
    best.0
}

impl DopplerSpectrum {
    pub fn new(bins: Vec<Complex64>, k: f64, pulses: usize, pri: f64) -> Self {
        let peak_bin = peak_index(bins.iter().map(|b| b.norm_sqr()));
        let velocity = estimate_velocity(signed_bin(peak_bin, bins.len()), k, pulses, pri);
        Self {
            bins,
            peak_bin,
            velocity,
        }
    }

    pub fn peak(&self) -> Complex64 {
        self.bins[self.peak_bin]
    }
}

/// `S^eff(l) = S^o(l) + exp(−j 2k v̂ T) S^e(l)`.
pub fn combine(
    s_odd: &[Complex64],
    s_even: &[Complex64],
    v_hat: f64,
    k: f64,
    pri: f64,
) -> Result<DopplerSpectrum, RadarError> {
    if s_odd.len() != s_even.len() {
        return Err(RadarError::LengthMismatch(s_odd.len(), s_even.len()));
    }
    let c = Complex64::cis(-2.0 * k * v_hat * pri);
    let bins = s_odd.iter().zip(s_even).map(|(o, e)| o + c * e).collect();
    Ok(DopplerSpectrum::new(bins, k, 2 * s_odd.len(), pri))
}

/// Velocity used for compensation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Compensation {
    /// From the peak bin of `|S^o|² + |S^e|²`.
    #[default]
    Estimated,
    Known(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessedTrain {
    pub odd: DopplerSpectrum,
    pub even: DopplerSpectrum,
    pub effective: DopplerSpectrum,
    /// Velocity from the split-spectrum peak bin.
    pub estimated_velocity: f64,
    pub compensation_velocity: f64,
}

/// Split transforms, velocity estimate and compensated combination.
pub fn process(samples: &[Complex64], k: f64, pri: f64, compensation: Compensation) -> Result<ProcessedTrain, RadarError> {
    let (so, se) = split_fft(samples)?;
    let n = samples.len();
    let l = peak_index(so.iter().zip(&se).map(|(o, e)| o.norm_sqr() + e.norm_sqr()));
    let estimated_velocity = estimate_velocity(signed_bin(l, so.len()), k, n, pri);
    let v = match compensation {
        Compensation::Estimated => estimated_velocity,
        Compensation::Known(v) => v,
    };
    let effective = combine(&so, &se, v, k, pri)?;
    Ok(ProcessedTrain {
        odd: DopplerSpectrum::new(so, k, n, pri),
        even: DopplerSpectrum::new(se, k, n, pri),
        effective,
        estimated_velocity,
        compensation_velocity: v,
    })
}
