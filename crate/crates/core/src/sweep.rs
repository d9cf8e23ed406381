//! Grid sweeps over `(η, μ)` and their CSV/JSON encodings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{evaluate, Argmax, CapacityPoint, Quantity};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::optimize::OptimizerConfig;

/// Inclusive arithmetic grid `start, start + step, ..., stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) || start > stop {
            return Err(Error::Domain(format!("grid [{start}, {stop}] must lie in [0, 1]")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Domain(format!("grid step {step} must be positive")));
        }
        Ok(Self { start, stop, step })
    }

    /// `[0, 1]` with the given step.
    pub fn unit(step: f64) -> Result<Self> {
        Self::new(0.0, 1.0, step)
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| (self.start + i as f64 * self.step).min(self.stop)).collect()
    }
}

/// Default surface grid: step 0.02 in both parameters.
pub const DEFAULT_STEP: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub eta: GridRange,
    pub mu: GridRange,
}

impl Grid {
    pub fn square(step: f64) -> Result<Self> {
        Ok(Self { eta: GridRange::unit(step)?, mu: GridRange::unit(step)? })
    }

    /// `(i, j, η, μ)` in row-major order: η outer, μ inner.
    pub fn points(&self) -> Vec<(usize, usize, f64, f64)> {
        let mus = self.mu.values();
        self.eta
            .values()
            .into_iter()
            .enumerate()
            .flat_map(|(i, eta)| mus.iter().enumerate().map(move |(j, &mu)| (i, j, eta, mu)))
            .collect()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Optimizer seed for grid cell `(i, j)`.
pub fn point_seed(base: u64, eta_index: usize, mu_index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ eta_index as u64) ^ mu_index as u64)
}

/// Evaluates `quantity` on every grid point using `jobs` worker threads.
/// Results come back in grid order and do not depend on `jobs`.
pub fn run_sweep(
    quantity: Quantity,
    grid: &Grid,
    cfg: &OptimizerConfig,
    phase_search: bool,
    jobs: usize,
) -> Result<Vec<CapacityPoint>> {
    cfg.validate()?;
    let points = grid.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        points
            .par_iter()
            .map(|&(i, j, eta, mu)| {
                let local = cfg.with_seed(point_seed(cfg.seed, i, j));
                evaluate(quantity, ChannelParams::new(eta, mu)?, &local, phase_search)
            })
            .collect()
    })
}

/// Shortest decimal form of `x` rounded to 12 significant digits; exponent
/// notation below `1e-5`.
pub fn format_value(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded != 0.0 && rounded.abs() < 1e-5 {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

/// The CSV view of a point: what survives a round trip through a file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub mu: f64,
    pub value: f64,
    pub argmax: Argmax,
    pub evals: usize,
    pub converged: bool,
}

impl SweepRow {
    /// The row as it reads back after formatting.
    pub fn rounded(point: &CapacityPoint) -> Result<Self> {
        let r = |x: f64| format_value(x).parse::<f64>().expect("formatted float parses");
        let values: Vec<f64> = point.argmax.values().into_iter().map(r).collect();
        Ok(Self {
            eta: r(point.eta),
            mu: r(point.mu),
            value: r(point.value),
            argmax: Argmax::from_values(point.quantity, &values)?,
            evals: point.evals,
            converged: point.converged,
        })
    }
}

pub fn csv_header(quantity: Quantity) -> Vec<&'static str> {
    let mut header = vec!["eta", "mu", "value"];
    header.extend_from_slice(quantity.argmax_fields());
    header.extend_from_slice(&["evals", "converged"]);
    header
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("csv: {e}"))
}

/// CSV text with a header row; one row per point in the given order.
pub fn to_csv(quantity: Quantity, points: &[CapacityPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_header(quantity)).map_err(csv_error)?;
    for p in points {
        if p.quantity != quantity {
            return Err(Error::Domain(format!("{} point in a {quantity} table", p.quantity)));
        }
        let mut record = vec![format_value(p.eta), format_value(p.mu), format_value(p.value)];
        record.extend(p.argmax.values().into_iter().map(format_value));
        record.push(p.evals.to_string());
        record.push(p.converged.to_string());
        w.write_record(&record).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(csv_error)?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn parse_csv(quantity: Quantity, text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_error)?.iter().map(str::to_owned).collect();
    if header != csv_header(quantity) {
        return Err(Error::Config(format!("unexpected csv header {header:?} for {quantity}")));
    }
    let n_args = quantity.argmax_fields().len();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_error)?;
        let num = |k: usize| -> Result<f64> { record[k].parse::<f64>().map_err(csv_error) };
        let args = (3..3 + n_args).map(num).collect::<Result<Vec<_>>>()?;
        rows.push(SweepRow {
            eta: num(0)?,
            mu: num(1)?,
            value: num(2)?,
            argmax: Argmax::from_values(quantity, &args)?,
            evals: record[3 + n_args].parse().map_err(csv_error)?,
            converged: record[4 + n_args].parse().map_err(csv_error)?,
        });
    }
    Ok(rows)
}

/// Pretty JSON array of points.
pub fn to_json(points: &[CapacityPoint]) -> Result<String> {
    serde_json::to_string_pretty(points).map_err(|e| Error::Config(format!("json: {e}")))
}

pub fn parse_json(text: &str) -> Result<Vec<CapacityPoint>> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("json: {e}")))
}
