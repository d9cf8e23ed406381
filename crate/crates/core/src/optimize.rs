//! Deterministic derivative-free maximization.
//!
//! Multistart Nelder–Mead over a product of a probability simplex and a box.
//! The simplex part is searched in unconstrained coordinates `u` mapped to
//! `p_i = u_i² / Σ u_j²`; box coordinates are clamped onto the box whenever a
//! trial vertex is generated. Start points are the domain center, the simplex
//! vertices, the box corners (small boxes only) and then a randomly shifted
//! Halton sequence, so a run with `2k` restarts always includes the starts of a
//! run with `k`.

use std::cell::Cell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Restarts whose value is this close to the best take part in the tie-break.
pub const TIE_TOL: f64 = 1e-10;

const HALTON_BASES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_evals_per_restart: usize,
    /// Spread of objective values across the Nelder–Mead simplex (bits).
    pub f_tol: f64,
    /// Largest vertex distance from the best vertex, in search coordinates.
    pub x_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 32, max_evals_per_restart: 2000, f_tol: 1e-10, x_tol: 1e-8, seed: 0x6d61_6463 }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be positive".into()));
        }
        if self.max_evals_per_restart == 0 {
            return Err(Error::Config("max_evals_per_restart must be positive".into()));
        }
        for (name, tol) in [("f_tol", self.f_tol), ("x_tol", self.x_tol)] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::Config(format!("{name} = {tol} must lie in (0, 1)")));
            }
        }
        Ok(())
    }
}

/// Search domain: an optional probability simplex followed by box coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    simplex_dim: usize,
    bounds: Vec<(f64, f64)>,
}

impl Domain {
    pub fn boxed(bounds: Vec<(f64, f64)>) -> Result<Self> {
        Self::simplex_and_box(0, bounds)
    }

    pub fn simplex(k: usize) -> Result<Self> {
        Self::simplex_and_box(k, Vec::new())
    }

    /// Points are `[p_1..p_k, x_1..x_m]` with `p` on the `k`-simplex and
    /// `x` in the box.
    pub fn simplex_and_box(k: usize, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if k == 1 {
            return Err(Error::Domain("a probability simplex needs at least two coordinates".into()));
        }
        if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
            return Err(Error::Domain(format!("bad interval [{lo}, {hi}]")));
        }
        let dim = k + bounds.len();
        if dim == 0 || dim > HALTON_BASES.len() {
            return Err(Error::Domain(format!("dimension {dim} not supported")));
        }
        Ok(Self { simplex_dim: k, bounds })
    }

    pub fn dim(&self) -> usize {
        self.simplex_dim + self.bounds.len()
    }

    pub fn simplex_dim(&self) -> usize {
        self.simplex_dim
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Whether a mapped point lies in the domain.
    pub fn contains(&self, x: &[f64]) -> bool {
        let k = self.simplex_dim;
        x.len() == self.dim()
            && x[..k].iter().all(|p| (0.0..=1.0).contains(p))
            && (k == 0 || (x[..k].iter().sum::<f64>() - 1.0).abs() <= 1e-14)
            && x[k..].iter().zip(&self.bounds).all(|(v, (lo, hi))| (*lo..=*hi).contains(v))
    }

    fn clamp(&self, raw: &mut [f64]) {
        for (v, (lo, hi)) in raw[self.simplex_dim..].iter_mut().zip(&self.bounds) {
            *v = v.clamp(*lo, *hi);
        }
    }

    fn map_into(&self, raw: &[f64], out: &mut [f64]) {
        let k = self.simplex_dim;
        if k > 0 {
            let total: f64 = raw[..k].iter().map(|u| u * u).sum();
            if total > 0.0 && total.is_finite() {
                for (o, u) in out[..k].iter_mut().zip(&raw[..k]) {
                    *o = u * u / total;
                }
            } else {
                out[..k].fill(1.0 / k as f64);
            }
        }
        out[k..].copy_from_slice(&raw[k..]);
    }

    /// Maps search coordinates to a domain point.
    pub fn map(&self, raw: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.map_into(raw, &mut out);
        out
    }

    fn initial_steps(&self) -> Vec<f64> {
        let mut steps = vec![0.25; self.simplex_dim];
        steps.extend(self.bounds.iter().map(|(lo, hi)| 0.1 * (hi - lo)));
        steps
    }

    fn center(&self) -> Vec<f64> {
        let k = self.simplex_dim;
        let mut raw = vec![(1.0 / k as f64).sqrt(); k];
        raw.extend(self.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)));
        raw
    }

    fn structured_starts(&self) -> Vec<Vec<f64>> {
        let k = self.simplex_dim;
        let center = self.center();
        let mut starts = vec![center.clone()];
        for vertex in 0..k {
            let mut raw = center.clone();
            raw[..k].fill(0.0);
            raw[vertex] = 1.0;
            starts.push(raw);
        }
        let m = self.bounds.len();
        if (1..=3).contains(&m) {
            for mask in 0..(1usize << m) {
                let mut raw = center.clone();
                for (j, (lo, hi)) in self.bounds.iter().enumerate() {
                    raw[k + j] = if mask >> j & 1 == 0 { *lo } else { *hi };
                }
                starts.push(raw);
            }
        }
        starts
    }

    fn unit_cube_to_raw(&self, u: &[f64]) -> Vec<f64> {
        let k = self.simplex_dim;
        let mut raw = Vec::with_capacity(self.dim());
        if k > 0 {
            // Uniform on the simplex via normalized exponentials.
            let e: Vec<f64> = u[..k].iter().map(|&x| -(1.0 - x).max(f64::MIN_POSITIVE).ln()).collect();
            let total: f64 = e.iter().sum();
            raw.extend(e.iter().map(|x| (x / total).sqrt()));
        }
        raw.extend(u[k..].iter().zip(&self.bounds).map(|(x, (lo, hi))| lo + x * (hi - lo)));
        raw
    }

    /// The first `count` start points for `seed`.
    pub fn start_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut starts = self.structured_starts();
        starts.truncate(count);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..self.dim()).map(|_| rng.random::<f64>()).collect();
        let mut index = 1u64;
        while starts.len() < count {
            let u: Vec<f64> = shift
                .iter()
                .zip(HALTON_BASES)
                .map(|(s, b)| (radical_inverse(index, b) + s).fract())
                .collect();
            starts.push(self.unit_cube_to_raw(&u));
            index += 1;
        }
        starts
    }
}

fn radical_inverse(mut n: u64, base: u32) -> f64 {
    let b = base as u64;
    let (mut value, mut scale) = (0.0, 1.0 / base as f64);
    while n > 0 {
        value += (n % b) as f64 * scale;
        n /= b;
        scale /= base as f64;
    }
    value
}

/// Outcome of [`maximize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Maximum {
    /// Best point, in domain coordinates. Among restarts within [`TIE_TOL`]
    /// of the best value, the one with the smallest norm.
    pub x: Vec<f64>,
    /// Best value over all restarts; `f(x)` is within [`TIE_TOL`] of it.
    pub value: f64,
    /// Objective evaluations over all restarts.
    pub evals: usize,
    pub restarts_used: usize,
    /// Whether the reported restart met both tolerances within its budget.
    pub converged: bool,
    pub converged_restarts: usize,
}

struct LocalResult {
    raw: Vec<f64>,
    value: f64,
    evals: usize,
    converged: bool,
}

/// Maximizes `f` over `domain`. `f` receives domain coordinates; NaN counts
/// as `-inf`.
pub fn maximize<F>(f: F, domain: &Domain, cfg: &OptimizerConfig) -> Result<Maximum>
where
    F: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    let starts = domain.start_points(cfg.restarts, cfg.seed);
    let mut locals = Vec::with_capacity(starts.len());
    for start in starts {
        locals.push(nelder_mead(&f, domain, start, cfg));
    }
    let best = locals.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    let norm = |r: &LocalResult| domain.map(&r.raw).iter().map(|v| v * v).sum::<f64>();
    let chosen = locals
        .iter()
        .filter(|r| r.value >= best - TIE_TOL)
        .min_by(|a, b| norm(a).total_cmp(&norm(b)))
        .expect("at least one restart");
    Ok(Maximum {
        x: domain.map(&chosen.raw),
        value: best,
        evals: locals.iter().map(|r| r.evals).sum(),
        restarts_used: locals.len(),
        converged: chosen.converged,
        converged_restarts: locals.iter().filter(|r| r.converged).count(),
    })
}

fn nelder_mead<F>(f: &F, domain: &Domain, start: Vec<f64>, cfg: &OptimizerConfig) -> LocalResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = domain.dim();
    let (reflect, expand, contract, shrink) = if n <= 2 {
        (1.0, 2.0, 0.5, 0.5)
    } else {
        let nf = n as f64;
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    };
    let mut scratch = vec![0.0; n];
    let evals = Cell::new(0usize);
    // Minimize the negated objective.
    let mut cost = |raw: &[f64]| {
        evals.set(evals.get() + 1);
        domain.map_into(raw, &mut scratch);
        let v = f(&scratch);
        if v.is_nan() {
            f64::INFINITY
        } else {
            -v
        }
    };

    let mut x0 = start;
    domain.clamp(&mut x0);
    let steps = domain.initial_steps();
    let mut simplex = vec![x0.clone()];
    for (i, step) in steps.iter().enumerate() {
        let mut v = x0.clone();
        v[i] += step;
        if i >= domain.simplex_dim && v[i] > domain.bounds[i - domain.simplex_dim].1 {
            v[i] = x0[i] - step;
        }
        domain.clamp(&mut v);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| cost(v)).collect();

    let mut converged = false;
    let mut order: Vec<usize> = (0..=n).collect();
    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (ib, iw) = (order[0], order[n]);
        let spread = values[iw] - values[ib];
        let size = simplex
            .iter()
            .map(|v| v.iter().zip(&simplex[ib]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= cfg.f_tol && size <= cfg.x_tol {
            converged = true;
            break;
        }
        if evals.get() >= cfg.max_evals_per_restart {
            break;
        }

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / n as f64;
            }
        }
        let toward = |t: f64, from: &[f64]| -> Vec<f64> {
            let mut p: Vec<f64> = centroid.iter().zip(from).map(|(c, x)| c + t * (c - x)).collect();
            domain.clamp(&mut p);
            p
        };

        let xr = toward(reflect, &simplex[iw]);
        let fr = cost(&xr);
        if fr < values[ib] {
            let xe = toward(reflect * expand, &simplex[iw]);
            let fe = cost(&xe);
            if fe < fr {
                simplex[iw] = xe;
                values[iw] = fe;
            } else {
                simplex[iw] = xr;
                values[iw] = fr;
            }
            continue;
        }
        if fr < values[order[n - 1]] {
            simplex[iw] = xr;
            values[iw] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr < values[iw] {
            let xc = toward(reflect * contract, &simplex[iw]);
            let fc = cost(&xc);
            (xc, fc, fc <= fr)
        } else {
            let xc = toward(-contract, &simplex[iw]);
            let fc = cost(&xc);
            (xc, fc, fc < values[iw])
        };
        if accept {
            simplex[iw] = xc;
            values[iw] = fc;
            continue;
        }
        let best = simplex[ib].clone();
        for &i in &order[1..] {
            let mut v: Vec<f64> = best.iter().zip(&simplex[i]).map(|(b, x)| b + shrink * (x - b)).collect();
            domain.clamp(&mut v);
            values[i] = cost(&v);
            simplex[i] = v;
        }
    }
    let ib = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    LocalResult { raw: simplex[ib].clone(), value: -values[ib], evals: evals.get(), converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;

    #[test]
    fn one_dimensional_quadratic() {
        let domain = Domain::boxed(vec![(0.0, 1.0)]).unwrap();
        let m = maximize(|x| -(x[0] - 0.3).powi(2), &domain, &OptimizerConfig::default()).unwrap();
        assert!((m.x[0] - 0.3).abs() < 1e-8, "{m:?}");
        assert!(m.value.abs() < 1e-8);
        assert!(m.converged);
    }

    #[test]
    fn constant_objective_converges() {
        let domain = Domain::simplex_and_box(3, vec![(0.0, 2.0)]).unwrap();
        let m = maximize(|_| 1.25, &domain, &OptimizerConfig::default()).unwrap();
        assert_eq!(m.value, 1.25);
        assert!(m.converged);
    }

    #[test]
    fn boundary_maximum_is_reached_exactly() {
        let domain = Domain::boxed(vec![(0.0, 1.0), (-1.0, 1.0)]).unwrap();
        let m = maximize(|x| x[0] - x[1] * x[1], &domain, &OptimizerConfig::default()).unwrap();
        assert_eq!(m.x[0], 1.0);
        assert!(m.x[1].abs() < 1e-8);
    }

    #[test]
    fn simplex_entropy_maximum_is_uniform() {
        let domain = Domain::simplex(4).unwrap();
        let entropy = |p: &[f64]| -p.iter().filter(|&&v| v > 0.0).map(|v| v * v.log2()).sum::<f64>();
        let m = maximize(entropy, &domain, &OptimizerConfig::default()).unwrap();
        assert!((m.value - 2.0).abs() < 1e-9);
        assert!(m.x.iter().all(|p| (p - 0.25).abs() < 1e-4));
    }

    #[test]
    fn every_evaluation_is_inside_the_domain() {
        let domain = Domain::simplex_and_box(3, vec![(0.0, 0.5), (1.0, 2.0)]).unwrap();
        let seen = RefCell::new(Vec::new());
        let f = |x: &[f64]| {
            seen.borrow_mut().push(x.to_vec());
            -(x[0] - 0.2).powi(2) - (x[3] - 0.7).powi(2) - (x[4] - 1.1).powi(2)
        };
        let cfg = OptimizerConfig { restarts: 6, ..Default::default() };
        maximize(f, &domain, &cfg).unwrap();
        assert!(seen.borrow().iter().all(|x| domain.contains(x)));
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let domain = Domain::boxed(vec![(-1.0, 1.0); 3]).unwrap();
        let cfg = OptimizerConfig { restarts: 2, max_evals_per_restart: 10, ..Default::default() };
        let m = maximize(|x| -x.iter().map(|v| (v - 0.123).powi(2)).sum::<f64>(), &domain, &cfg).unwrap();
        assert!(!m.converged);
        assert!(m.value.is_finite());
    }

    #[test]
    fn nan_is_never_the_maximum() {
        let domain = Domain::boxed(vec![(0.0, 1.0)]).unwrap();
        let m = maximize(|x| if x[0] > 0.6 { f64::NAN } else { x[0] }, &domain, &OptimizerConfig::default()).unwrap();
        assert!(m.value <= 0.6 && m.value > 0.59);
    }

    #[test]
    fn tie_break_prefers_small_norm() {
        // Two global maxima at x = ±0.8 shifted into [0, 2]: 0.2 and 1.8.
        let domain = Domain::boxed(vec![(0.0, 2.0)]).unwrap();
        let m = maximize(|x| -((x[0] - 1.0).powi(2) - 0.64).powi(2), &domain, &OptimizerConfig::default()).unwrap();
        assert!((m.x[0] - 0.2).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn config_validation() {
        let bad = [
            OptimizerConfig { restarts: 0, ..Default::default() },
            OptimizerConfig { max_evals_per_restart: 0, ..Default::default() },
            OptimizerConfig { f_tol: 0.0, ..Default::default() },
            OptimizerConfig { x_tol: 1.5, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
        assert!(OptimizerConfig::default().validate().is_ok());
        assert!(Domain::simplex(1).is_err());
        assert!(Domain::boxed(vec![(1.0, 0.0)]).is_err());
    }

    #[test]
    fn start_points_are_prefix_stable() {
        let domain = Domain::simplex_and_box(4, vec![(0.0, 1.0)]).unwrap();
        let short = domain.start_points(8, 5);
        let long = domain.start_points(16, 5);
        assert_eq!(short[..], long[..8]);
        assert_ne!(domain.start_points(16, 6), long);
    }
}
