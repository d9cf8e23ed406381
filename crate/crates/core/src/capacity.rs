//! Holevo lower bounds, coherent information, quantum-capacity bounds, the
//! entanglement-assisted capacity and the threshold finders.
//!
//! All entropies are in bits. Objectives used inside the optimizer go through
//! the closed-form channel output; for diagonal inputs the output and the
//! environment spectra are written out explicitly.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{single_qubit_kraus, system_output_matrix, ChannelParams};
use crate::ensembles::{build_g1, build_g2, Ensemble, G1Params, G2Params, Populations};
use crate::error::{Error, Result};
use crate::optimize::{maximize, Domain, Maximum, OptimizerConfig, TIE_TOL};
use crate::qmat::{matrix_entropy, re, spectrum_entropy, ComplexMatrix, C64};

/// Values at or below this count as zero quantum capacity.
pub const Q_ZERO_TOL: f64 = 1e-9;
/// `|11>` population above which it counts as occupied.
pub const POPULATION_TOL: f64 = 1e-6;
/// Absolute μ resolution of the threshold bisections.
pub const THRESHOLD_MU_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    ChiG1,
    ChiG2,
    QLwb,
    QUpb,
    Ce,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [Quantity::ChiG1, Quantity::ChiG2, Quantity::QLwb, Quantity::QUpb, Quantity::Ce];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::ChiG1 => "chi-g1",
            Quantity::ChiG2 => "chi-g2",
            Quantity::QLwb => "q-lwb",
            Quantity::QUpb => "q-upb",
            Quantity::Ce => "ce",
        }
    }

    /// Names of the argmax columns, in output order.
    pub fn argmax_fields(self) -> &'static [&'static str] {
        match self {
            Quantity::ChiG1 => &["abar", "bbar", "cbar", "phi1", "phi2", "phi3"],
            Quantity::ChiG2 => &["beta", "theta1", "theta2", "phi1", "phi2"],
            Quantity::QLwb | Quantity::Ce => &["alpha", "beta", "gamma", "delta"],
            Quantity::QUpb => &["q_memoryless", "q_full"],
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown quantity '{s}' (expected chi-g1, chi-g2, q-lwb, q-upb or ce)")))
    }
}

/// Parameters at which a quantity attains its reported value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Argmax {
    G1(G1Params),
    G2(G2Params),
    Diagonal(Populations),
    /// `q_upb` has no maximization of its own; it records the endpoint values.
    Endpoints { q_memoryless: f64, q_full: f64 },
}

impl Argmax {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Argmax::G1(g) => vec![g.abar, g.bbar, g.cbar, g.phi1, g.phi2, g.phi3],
            Argmax::G2(g) => vec![g.beta, g.theta1, g.theta2, g.phi1, g.phi2],
            Argmax::Diagonal(d) => d.as_array().to_vec(),
            Argmax::Endpoints { q_memoryless, q_full } => vec![q_memoryless, q_full],
        }
    }

    /// Inverse of [`Argmax::values`].
    pub fn from_values(quantity: Quantity, v: &[f64]) -> Result<Self> {
        if v.len() != quantity.argmax_fields().len() {
            return Err(Error::Domain(format!("{quantity} expects {} argmax fields", quantity.argmax_fields().len())));
        }
        Ok(match quantity {
            Quantity::ChiG1 => {
                Argmax::G1(G1Params { abar: v[0], bbar: v[1], cbar: v[2], phi1: v[3], phi2: v[4], phi3: v[5] })
            }
            Quantity::ChiG2 => Argmax::G2(G2Params { beta: v[0], theta1: v[1], theta2: v[2], phi1: v[3], phi2: v[4] }),
            Quantity::QLwb | Quantity::Ce => {
                Argmax::Diagonal(Populations { alpha: v[0], beta: v[1], gamma: v[2], delta: v[3] })
            }
            Quantity::QUpb => Argmax::Endpoints { q_memoryless: v[0], q_full: v[1] },
        })
    }

    /// Input populations implied by the argmax, when it describes an input.
    pub fn populations(&self) -> Option<Populations> {
        match self {
            Argmax::G1(g) => Some(g.populations()),
            Argmax::G2(g) => Some(g.populations()),
            Argmax::Diagonal(d) => Some(*d),
            Argmax::Endpoints { .. } => None,
        }
    }

    /// The optimal ensemble for the two Holevo bounds.
    pub fn ensemble(&self) -> Option<Result<Ensemble>> {
        match self {
            Argmax::G1(g) => Some(build_g1(g)),
            Argmax::G2(g) => Some(build_g2(g)),
            _ => None,
        }
    }
}

/// One optimized value at one channel parameter pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    pub quantity: Quantity,
    pub eta: f64,
    pub mu: f64,
    /// Reported value: the best objective, floored at zero.
    pub value: f64,
    /// Best objective before flooring.
    pub raw_value: f64,
    pub argmax: Argmax,
    pub evals: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

impl CapacityPoint {
    fn from_max(quantity: Quantity, p: ChannelParams, m: &Maximum, argmax: Argmax) -> Self {
        Self {
            quantity,
            eta: p.eta(),
            mu: p.mu(),
            value: m.value.max(0.0),
            raw_value: m.value,
            argmax,
            evals: m.evals,
            restarts_used: m.restarts_used,
            converged: m.converged,
        }
    }
}

fn output_entropy(m: &ComplexMatrix, p: ChannelParams) -> f64 {
    matrix_entropy(&system_output_matrix(m, p)).unwrap_or(f64::NAN)
}

fn state_output_entropy(amps: &[C64], p: ChannelParams) -> f64 {
    output_entropy(&ComplexMatrix::outer(amps), p)
}

/// Diagonal of `E_μ(diag(α, β, γ, δ))`, which is itself diagonal.
pub fn diagonal_output(d: &Populations, p: ChannelParams) -> [f64; 4] {
    let Populations { alpha, beta, gamma, delta } = *d;
    let (eta, mu) = (p.eta(), p.mu());
    let (lm, damp) = (1.0 - mu, 1.0 - eta);
    [
        lm * (alpha + damp * (beta + gamma) + damp * damp * delta) + mu * (alpha + damp * delta),
        lm * eta * (beta + damp * delta) + mu * beta,
        lm * eta * (gamma + damp * delta) + mu * gamma,
        delta * eta * (lm * eta + mu),
    ]
}

fn symmetric_pair_eigenvalues(a: f64, c: f64, b: f64) -> [f64; 2] {
    let mean = 0.5 * (a + c);
    let radius = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    [mean - radius, mean + radius]
}

/// Spectrum of the environment+memory output for a diagonal input: one 2×2
/// block on `{000, 001}`, two scalars, and a rank-one block on `{110, 111}`.
fn diagonal_environment_spectrum(d: &Populations, p: ChannelParams) -> [f64; 6] {
    let Populations { alpha, beta, gamma, delta } = *d;
    let (eta, mu) = (p.eta(), p.mu());
    let (lm, damp, se) = (1.0 - mu, 1.0 - eta, eta.sqrt());
    let cross = (mu * lm).sqrt();
    let top = symmetric_pair_eigenvalues(
        lm * (alpha + eta * (beta + gamma) + eta * eta * delta),
        mu * (1.0 - damp * delta),
        cross * (alpha + se * (beta + gamma) + eta * se * delta),
    );
    [
        top[0],
        top[1],
        lm * damp * (beta + eta * delta),
        lm * damp * (gamma + eta * delta),
        damp * delta * (lm * damp + mu),
        0.0,
    ]
}

/// `I_c = S(ρ') - S(ρ^EM')` for the input `diag(α, β, γ, δ)`.
pub fn coherent_information(d: &Populations, p: ChannelParams) -> f64 {
    let s_out = spectrum_entropy(&diagonal_output(d, p)).unwrap_or(f64::NAN);
    let s_env = spectrum_entropy(&diagonal_environment_spectrum(d, p)).unwrap_or(f64::NAN);
    s_out - s_env
}

/// Mutual information `S(ρ) + I_c` for a diagonal input.
pub fn mutual_information(d: &Populations, p: ChannelParams) -> f64 {
    spectrum_entropy(&d.as_array()).unwrap_or(f64::NAN) + coherent_information(d, p)
}

/// `χ = S(E(Σ p_k ψ_k)) - Σ p_k S(E(ψ_k))` for any two-qubit ensemble.
pub fn holevo(p: ChannelParams, e: &Ensemble) -> Result<f64> {
    if e.dim() != 4 {
        return Err(Error::Domain(format!("Holevo quantity needs two-qubit states, got dimension {}", e.dim())));
    }
    let mut mixture = ComplexMatrix::zeros(4);
    let mut average = 0.0;
    for (w, psi) in e.items() {
        let proj = ComplexMatrix::outer(psi.amps());
        if *w > 0.0 {
            average += w * matrix_entropy(&system_output_matrix(&proj, p))?;
        }
        mixture = &mixture + &proj.scale(*w);
    }
    Ok(matrix_entropy(&system_output_matrix(&mixture, p))? - average)
}

/// `χ` of the G1 ensemble. Every member has the same output entropy, so only
/// the seed state is pushed through the channel.
pub fn chi_g1(g: &G1Params, p: ChannelParams) -> f64 {
    let s_mix = spectrum_entropy(&diagonal_output(&g.populations(), p)).unwrap_or(f64::NAN);
    s_mix - state_output_entropy(&g.seed_amplitudes(), p)
}

/// `χ` of the G2 ensemble.
pub fn chi_g2(g: &G2Params, p: ChannelParams) -> f64 {
    let [single, _] = g.single_excitation_pair();
    let [bell, _] = g.bell_like_pair();
    chi_g2_from(g, p, state_output_entropy(single.amps(), p), state_output_entropy(bell.amps(), p))
}

fn chi_g2_from(g: &G2Params, p: ChannelParams, s_single: f64, s_bell: f64) -> f64 {
    let s_mix = spectrum_entropy(&diagonal_output(&g.populations(), p)).unwrap_or(f64::NAN);
    s_mix - 2.0 * g.beta * s_single - (1.0 - 2.0 * g.beta) * s_bell
}

fn g1_from_point(x: &[f64]) -> G1Params {
    let phases = if x.len() > 4 { [x[4], x[5], x[6]] } else { [0.0; 3] };
    G1Params {
        abar: x[0].sqrt(),
        bbar: x[1].sqrt(),
        cbar: x[2].sqrt(),
        phi1: phases[0],
        phi2: phases[1],
        phi3: phases[2],
    }
}

/// Maximizes `χ` over the G1 seed amplitudes, and over the three relative
/// phases when `phase_search` is set.
pub fn chi_lwb_g1(p: ChannelParams, cfg: &OptimizerConfig, phase_search: bool) -> Result<CapacityPoint> {
    let domain = if phase_search {
        Domain::simplex_and_box(4, vec![(0.0, TAU); 3])?
    } else {
        Domain::simplex(4)?
    };
    let m = maximize(|x| chi_g1(&g1_from_point(x), p), &domain, cfg)?;
    Ok(CapacityPoint::from_max(Quantity::ChiG1, p, &m, Argmax::G1(g1_from_point(&m.x))))
}

/// Maximizes `χ` of G2 over `(β, θ2) ∈ [0, 1/2] × [0, π/2]` with the other
/// angles at zero.
pub fn chi_lwb_g2(p: ChannelParams, cfg: &OptimizerConfig) -> Result<CapacityPoint> {
    let domain = Domain::boxed(vec![(0.0, 0.5), (0.0, FRAC_PI_2)])?;
    let s_single = state_output_entropy(G2Params::reduced(0.0, 0.0).single_excitation_pair()[0].amps(), p);
    let objective = |x: &[f64]| {
        let g = G2Params::reduced(x[0], x[1]);
        let [bell, _] = g.bell_like_pair();
        chi_g2_from(&g, p, s_single, state_output_entropy(bell.amps(), p))
    };
    let m = maximize(objective, &domain, cfg)?;
    Ok(CapacityPoint::from_max(Quantity::ChiG2, p, &m, Argmax::G2(G2Params::reduced(m.x[0], m.x[1]))))
}

fn pops_from_point(x: &[f64]) -> Populations {
    Populations { alpha: x[0], beta: x[1], gamma: x[2], delta: x[3] }
}

/// `max(max_ρ I_c, 0)` over diagonal inputs.
///
/// Every pure input has `I_c = 0`, so when nothing beats zero the maximizer is
/// not unique; the vacuum `|00>` is then reported.
pub fn q_lwb(p: ChannelParams, cfg: &OptimizerConfig) -> Result<CapacityPoint> {
    let mut m = maximize(|x| coherent_information(&pops_from_point(x), p), &Domain::simplex(4)?, cfg)?;
    let vacuum = Populations { alpha: 1.0, beta: 0.0, gamma: 0.0, delta: 0.0 };
    let at_vacuum = coherent_information(&vacuum, p);
    if at_vacuum >= m.value - TIE_TOL {
        m.value = m.value.max(at_vacuum);
        m.x = vacuum.as_array().to_vec();
    }
    let mut point = CapacityPoint::from_max(Quantity::QLwb, p, &m, Argmax::Diagonal(pops_from_point(&m.x)));
    // round-off above an exact zero is not capacity
    if point.value <= Q_ZERO_TOL {
        point.value = 0.0;
    }
    Ok(point)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Memoryless,
    Full,
}

/// Quantum capacity of the `μ = 0` or `μ = 1` channel, where the optimum over
/// diagonal inputs is the capacity.
pub fn q_endpoint(eta: f64, which: Endpoint, cfg: &OptimizerConfig) -> Result<f64> {
    let mu = match which {
        Endpoint::Memoryless => 0.0,
        Endpoint::Full => 1.0,
    };
    Ok(q_lwb(ChannelParams::new(eta, mu)?, cfg)?.value)
}

/// `(1-μ) Q(E_0) + μ Q(E_1)`.
pub fn q_upb(p: ChannelParams, cfg: &OptimizerConfig) -> Result<CapacityPoint> {
    let memoryless = q_lwb(p.with_mu(0.0)?, cfg)?;
    let full = q_lwb(p.with_mu(1.0)?, cfg)?;
    let value = (1.0 - p.mu()) * memoryless.value + p.mu() * full.value;
    Ok(CapacityPoint {
        quantity: Quantity::QUpb,
        eta: p.eta(),
        mu: p.mu(),
        value,
        raw_value: value,
        argmax: Argmax::Endpoints { q_memoryless: memoryless.value, q_full: full.value },
        evals: memoryless.evals + full.evals,
        restarts_used: memoryless.restarts_used + full.restarts_used,
        converged: memoryless.converged && full.converged,
    })
}

/// `C_E`: maximum of `S(ρ) + I_c` over `diag(α, β, β, δ)`.
pub fn entanglement_assisted(p: ChannelParams, cfg: &OptimizerConfig) -> Result<CapacityPoint> {
    let pops = |x: &[f64]| Populations { alpha: x[0], beta: 0.5 * x[1], gamma: 0.5 * x[1], delta: x[2] };
    let m = maximize(|x| mutual_information(&pops(x), p), &Domain::simplex(3)?, cfg)?;
    Ok(CapacityPoint::from_max(Quantity::Ce, p, &m, Argmax::Diagonal(pops(&m.x))))
}

/// Dispatches on `quantity`; `phase_search` only affects `chi-g1`.
pub fn evaluate(quantity: Quantity, p: ChannelParams, cfg: &OptimizerConfig, phase_search: bool) -> Result<CapacityPoint> {
    match quantity {
        Quantity::ChiG1 => chi_lwb_g1(p, cfg, phase_search),
        Quantity::ChiG2 => chi_lwb_g2(p, cfg),
        Quantity::QLwb => q_lwb(p, cfg),
        Quantity::QUpb => q_upb(p, cfg),
        Quantity::Ce => entanglement_assisted(p, cfg),
    }
}

/// Bisection for the switch of `active(μ)` from false to true on `[0, 1]`.
/// Returns the largest μ verified inactive, or `None` when `active` already
/// holds at μ = 0 or never holds at μ = 1.
fn bisect_onset(mut active: impl FnMut(f64) -> Result<bool>) -> Result<Option<f64>> {
    if active(0.0)? || !active(1.0)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > THRESHOLD_MU_TOL {
        let mid = 0.5 * (lo + hi);
        if active(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(lo))
}

/// Memory degree up to which `q_lwb` vanishes.
pub fn find_q_threshold(eta: f64, cfg: &OptimizerConfig) -> Result<Option<f64>> {
    bisect_onset(|mu| Ok(q_lwb(ChannelParams::new(eta, mu)?, cfg)?.value > Q_ZERO_TOL))
}

/// Memory degree up to which the optimal G2 ensemble leaves `|11>` empty.
pub fn find_g2_population_threshold(eta: f64, cfg: &OptimizerConfig) -> Result<Option<f64>> {
    bisect_onset(|mu| {
        let point = chi_lwb_g2(ChannelParams::new(eta, mu)?, cfg)?;
        Ok(point.argmax.populations().is_some_and(|d| d.delta > POPULATION_TOL))
    })
}

/// Single-use Holevo capacity of the qubit amplitude damping channel,
/// maximized over two-state ensembles with real amplitudes.
pub fn single_qubit_holevo_capacity(eta: f64, cfg: &OptimizerConfig) -> Result<f64> {
    let kraus = single_qubit_kraus(eta)?;
    let entropy = |m: &ComplexMatrix| matrix_entropy(&kraus.apply(m)).unwrap_or(f64::NAN);
    let objective = |x: &[f64]| {
        let (w, t0, t1) = (x[0], x[1], x[2]);
        let a = [re(t0.cos()), re(t0.sin())];
        let b = [re(t1.cos()), re(t1.sin())];
        let (pa, pb) = (ComplexMatrix::outer(&a), ComplexMatrix::outer(&b));
        let mix = &pa.scale(w) + &pb.scale(1.0 - w);
        entropy(&mix) - w * entropy(&pa) - (1.0 - w) * entropy(&pb)
    };
    let domain = Domain::boxed(vec![(0.0, 1.0), (0.0, PI), (0.0, PI)])?;
    Ok(maximize(objective, &domain, cfg)?.value.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdditivityReport {
    pub eta: f64,
    pub chi_g1: f64,
    pub chi_g2: f64,
    /// Twice the single-qubit Holevo capacity.
    pub two_c1: f64,
    /// Both bounds stay within `two_c1 + ADDITIVITY_TOL`.
    pub no_violation: bool,
}

pub const ADDITIVITY_TOL: f64 = 1e-6;

/// Compares both two-use Holevo bounds of the memoryless channel with twice
/// the single-use capacity.
pub fn c2_additivity_probe(eta: f64, cfg: &OptimizerConfig) -> Result<AdditivityReport> {
    let p = ChannelParams::new(eta, 0.0)?;
    let chi_g1 = chi_lwb_g1(p, cfg, false)?.value;
    let chi_g2 = chi_lwb_g2(p, cfg)?.value;
    let two_c1 = 2.0 * single_qubit_holevo_capacity(eta, cfg)?;
    let no_violation = chi_g1 <= two_c1 + ADDITIVITY_TOL && chi_g2 <= two_c1 + ADDITIVITY_TOL;
    Ok(AdditivityReport { eta, chi_g1, chi_g2, two_c1, no_violation })
}
