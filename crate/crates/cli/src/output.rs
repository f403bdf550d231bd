//! CSV and JSON artifacts. Every float is written at 9 significant digits.

use std::path::{Path, PathBuf};

use beamshape::af::{CutAxis, DB_FLOOR, Pattern, PatternDomain};
use beamshape::uplane::UPoint;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const GRID_HEADER: [&str; 3] = ["u_y/k", "u_z/k", "mag_dB"];

/// `x` rounded to 9 significant digits, without trailing zeros.
pub fn fmt9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let rounded: f64 = sci.parse().expect("valid float");
        trim(&format!("{rounded:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Round every float in a JSON tree to 9 significant digits.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = fmt9(x).parse().expect("formatted float parses");
            *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Output directory plus the list of files written so far.
pub struct Outputs {
    dir: PathBuf,
    pub files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv<R, I>(&mut self, name: &str, header: &[&str], rows: R) -> Result<PathBuf, CliError>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = f64>,
    {
        let path = self.path(name);
        let io = |e: csv::Error| CliError::io(&path, std::io::Error::other(e));
        let mut w = csv::Writer::from_path(&path).map_err(io)?;
        w.write_record(header).map_err(io)?;
        for row in rows {
            w.write_record(row.into_iter().map(fmt9)).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(path)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut v = serde_json::to_value(value).map_err(|e| CliError::Numerical(e.to_string()))?;
        round_json(&mut v);
        let text = serde_json::to_string_pretty(&v).expect("JSON value serializes");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(path)
    }

    /// Grid pattern as `u_y/k, u_z/k, mag_dB`.
    pub fn grid_pattern(&mut self, name: &str, p: &Pattern) -> Result<PathBuf, CliError> {
        let db = p.db();
        let rows = p.points.iter().zip(db).map(|(q, d)| [q.uy / p.k, q.uz / p.k, d]);
        self.csv(name, &GRID_HEADER, rows)
    }

    /// Cut pattern as `alpha_deg, mag_dB` or `phi_deg, mag_dB`.
    pub fn cut_pattern(&mut self, name: &str, p: &Pattern) -> Result<PathBuf, CliError> {
        let PatternDomain::Cut { axis, angles_deg, .. } = &p.domain else {
            return Err(CliError::Numerical("cut output needs a cut pattern".into()));
        };
        let db = p.db();
        let rows = angles_deg.iter().zip(db).map(|(&a, d)| [a, d]);
        self.csv(name, &[cut_column(*axis), "mag_dB"], rows)
    }
}

fn cut_column(axis: CutAxis) -> &'static str {
    match axis {
        CutAxis::Elevation => "alpha_deg",
        CutAxis::Azimuth => "phi_deg",
    }
}

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let cfg = |m: String| CliError::Config(format!("{}: {m}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => CliError::io(path, std::io::Error::other(e)),
        _ => cfg(e.to_string()),
    })?;
    let header: Vec<String> = r.headers().map_err(|e| cfg(e.to_string()))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| cfg(e.to_string()))?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| cfg(format!("row {}: {e}", line + 2)))?;
        if row.len() != header.len() {
            return Err(cfg(format!("row {} has {} fields, header has {}", line + 2, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

#[derive(Deserialize)]
struct PositionRow {
    y_over_lambda: f64,
    z_over_lambda: f64,
}

pub fn read_positions(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    r.deserialize::<PositionRow>()
        .map(|row| {
            row.map(|p| (p.y_over_lambda, p.z_over_lambda))
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        })
        .collect()
}

/// Samples at the dB floor reload as zero.
fn magnitudes(db: impl Iterator<Item = f64>) -> Vec<f64> {
    db.map(|d| if d <= DB_FLOOR { 0.0 } else { 10f64.powf(d / 20.0) }).collect()
}

/// Smallest positive gap between distinct coordinates.
fn raster_step(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut sorted: Vec<f64> = values.collect();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).map(|w| w[1] - w[0]).filter(|&d| d > 0.0).reduce(f64::min)
}

/// Reload a pattern CSV. Grids come back in `u/k` units (`k = 1`); the
/// raster step is the smallest coordinate gap.
pub fn read_pattern(path: &Path) -> Result<Pattern, CliError> {
    let (header, rows) = read_table(path)?;
    let cfg = |m: &str| CliError::Config(format!("{}: {m}", path.display()));
    if rows.is_empty() {
        return Err(cfg("no samples"));
    }
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    match h.as_slice() {
        ["u_y/k", "u_z/k", "mag_dB"] => {
            let points: Vec<UPoint> = rows.iter().map(|r| UPoint::new(r[0], r[1])).collect();
            let sy = raster_step(points.iter().map(|p| p.uy));
            let sz = raster_step(points.iter().map(|p| p.uz));
            let (Some(sy), Some(sz)) = (sy, sz) else {
                return Err(cfg("grid needs at least two distinct coordinates per axis"));
            };
            let indices = points
                .iter()
                .map(|p| ((p.uy / sy).round() as i64, (p.uz / sz).round() as i64))
                .collect();
            let mags = magnitudes(rows.iter().map(|r| r[2]));
            Ok(Pattern::from_grid_magnitudes(points, indices, (sy, sz), 1.0, &mags))
        }
        [axis @ ("alpha_deg" | "phi_deg"), "mag_dB"] => {
            let axis = if *axis == "alpha_deg" {
                CutAxis::Elevation
            } else {
                CutAxis::Azimuth
            };
            let angles: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            if angles.iter().any(|a| a.abs() > 90.0) {
                return Err(cfg("cut angles must lie in [-90, 90]"));
            }
            let mags = magnitudes(rows.iter().map(|r| r[1]));
            Ok(Pattern::from_cut_magnitudes(axis, angles, 0.0, 1.0, &mags))
        }
        _ => Err(cfg(&format!("unrecognized pattern header [{}]", header.join(", ")))),
    }
}
