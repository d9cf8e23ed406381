//! Symmetrized pure-state input ensembles.
//!
//! `G1` is the orbit of one seed state `a|00> + b|01> + c|10> + d|11>` under the
//! sign flips `R1, R2, R3` and the swap, eight states with weight 1/8 each.
//! `G2` is two pairs: `{cosθ1|01> + e^{iφ1} sinθ1|10>, -sinθ1|01> + e^{iφ1} cosθ1|10>}`
//! with weight `β` each and `cosθ2|00> ± e^{iφ2} sinθ2|11>` with weight
//! `(1-2β)/2` each. Both ensembles have a diagonal density operator with equal
//! `|01>` and `|10>` populations.

use serde::{Deserialize, Serialize};

use crate::channel::covariance_ops;
use crate::error::{Error, Result};
use crate::qmat::{entanglement_entropy, re, C64, ComplexMatrix, DensityMatrix, PureState};

/// Probability-sum tolerance.
pub const PROB_TOL: f64 = 1e-12;

/// Weighted list of pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    items: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(items: Vec<(f64, PureState)>) -> Result<Self> {
        let dim = items.first().map(|(_, s)| s.dim()).ok_or_else(|| Error::Domain("empty ensemble".into()))?;
        if items.iter().any(|(_, s)| s.dim() != dim) {
            return Err(Error::Domain("ensemble states of different dimensions".into()));
        }
        if let Some(&(p, _)) = items.iter().find(|(p, _)| p.is_nan() || *p < 0.0) {
            return Err(Error::OutOfRange { name: "probability", value: p, range: "[0, 1]" });
        }
        let total: f64 = items.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::OutOfRange { name: "total probability", value: total, range: "{1}" });
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[(f64, PureState)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.items[0].1.dim()
    }
}

/// Diagonal of a two-qubit density operator in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Populations {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Populations {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let pops = Self { alpha, beta, gamma, delta };
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta)] {
            Error::unit_interval(name, v)?;
        }
        let total = alpha + beta + gamma + delta;
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::OutOfRange { name: "population sum", value: total, range: "{1}" });
        }
        Ok(pops)
    }

    /// `diag(α, β, β, 1 - α - 2β)` style constructor for swap-symmetric inputs.
    pub fn symmetric(alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        Self::new(alpha, beta, beta, delta)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(ComplexMatrix::from_real_diag(&self.as_array()))
    }
}

/// Seed-state parameters of the eight-state ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G1Params {
    pub abar: f64,
    pub bbar: f64,
    pub cbar: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

impl G1Params {
    /// Real amplitudes, zero phases.
    pub fn real(abar: f64, bbar: f64, cbar: f64) -> Self {
        Self { abar, bbar, cbar, phi1: 0.0, phi2: 0.0, phi3: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("abar", self.abar), ("bbar", self.bbar), ("cbar", self.cbar)] {
            Error::unit_interval(name, v)?;
        }
        let norm = self.abar.powi(2) + self.bbar.powi(2) + self.cbar.powi(2);
        if norm > 1.0 + PROB_TOL {
            return Err(Error::OutOfRange { name: "abar² + bbar² + cbar²", value: norm, range: "[0, 1]" });
        }
        for (name, v) in [("phi1", self.phi1), ("phi2", self.phi2), ("phi3", self.phi3)] {
            if !v.is_finite() {
                return Err(Error::OutOfRange { name, value: v, range: "finite" });
            }
        }
        Ok(())
    }

    /// `|d|`, the remaining amplitude on `|11>`.
    pub fn dbar(&self) -> f64 {
        (1.0 - self.abar.powi(2) - self.bbar.powi(2) - self.cbar.powi(2)).max(0.0).sqrt()
    }

    pub(crate) fn seed_amplitudes(&self) -> [C64; 4] {
        [
            re(self.abar),
            C64::from_polar(self.bbar, self.phi1),
            C64::from_polar(self.cbar, self.phi2),
            C64::from_polar(self.dbar(), self.phi3),
        ]
    }

    pub fn seed_state(&self) -> Result<PureState> {
        self.validate()?;
        Ok(PureState::normalized(self.seed_amplitudes().to_vec())?)
    }

    pub fn populations(&self) -> Populations {
        let side = 0.5 * (self.bbar.powi(2) + self.cbar.powi(2));
        let alpha = self.abar.powi(2);
        Populations { alpha, beta: side, gamma: side, delta: (1.0 - alpha - 2.0 * side).max(0.0) }
    }
}

/// Parameters of the Bell-pair ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G2Params {
    pub beta: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl G2Params {
    /// Separable `{|01>, |10>}` pair (`θ1 = φ1 = 0`) and real `φ2 = 0`.
    pub fn reduced(beta: f64, theta2: f64) -> Self {
        Self { beta, theta1: 0.0, theta2, phi1: 0.0, phi2: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.beta) {
            return Err(Error::OutOfRange { name: "beta", value: self.beta, range: "[0, 1/2]" });
        }
        for (name, v) in [("theta1", self.theta1), ("theta2", self.theta2), ("phi1", self.phi1), ("phi2", self.phi2)] {
            if !v.is_finite() {
                return Err(Error::OutOfRange { name, value: v, range: "finite" });
            }
        }
        Ok(())
    }

    /// `cosθ1|01> + e^{iφ1} sinθ1|10>` and its orthogonal partner.
    pub fn single_excitation_pair(&self) -> [PureState; 2] {
        let (c1, s1) = (self.theta1.cos(), self.theta1.sin());
        let phase = C64::from_polar(1.0, self.phi1);
        let zero = C64::new(0.0, 0.0);
        [
            PureState::from_amps_unchecked(vec![zero, re(c1), phase * s1, zero]),
            PureState::from_amps_unchecked(vec![zero, re(-s1), phase * c1, zero]),
        ]
    }

    /// `cosθ2|00> ± e^{iφ2} sinθ2|11>`.
    pub fn bell_like_pair(&self) -> [PureState; 2] {
        let (c2, s2) = (self.theta2.cos(), self.theta2.sin());
        let phase = C64::from_polar(1.0, self.phi2);
        let zero = C64::new(0.0, 0.0);
        [
            PureState::from_amps_unchecked(vec![re(c2), zero, zero, phase * s2]),
            PureState::from_amps_unchecked(vec![re(c2), zero, zero, -phase * s2]),
        ]
    }

    pub fn populations(&self) -> Populations {
        let rest = 1.0 - 2.0 * self.beta;
        Populations {
            alpha: rest * self.theta2.cos().powi(2),
            beta: self.beta,
            gamma: self.beta,
            delta: rest * self.theta2.sin().powi(2),
        }
    }
}

pub fn build_g1(g: &G1Params) -> Result<Ensemble> {
    let psi = g.seed_state()?;
    let ops = covariance_ops();
    let swapped = psi.apply(&ops.swap);
    let mut items = Vec::with_capacity(8);
    for base in [&psi, &swapped] {
        items.push((0.125, base.clone()));
        for r in [&ops.r1, &ops.r2, &ops.r3] {
            items.push((0.125, base.apply(r)));
        }
    }
    Ensemble::new(items)
}

pub fn build_g2(g: &G2Params) -> Result<Ensemble> {
    g.validate()?;
    let side = 0.5 * (1.0 - 2.0 * g.beta);
    let [vp, vm] = g.single_excitation_pair();
    let [bp, bm] = g.bell_like_pair();
    Ensemble::new(vec![(g.beta, vp), (g.beta, vm), (side, bp), (side, bm)])
}

/// `Σ p_k |ψ_k><ψ_k|`
pub fn ensemble_density(e: &Ensemble) -> DensityMatrix {
    let mut rho = ComplexMatrix::zeros(e.dim());
    for (p, psi) in e.items() {
        rho = &rho + &ComplexMatrix::outer(psi.amps()).scale(*p);
    }
    DensityMatrix::from_matrix_unchecked(rho)
}

/// `Σ p_k E(|ψ_k>)` with `E` the entropy of entanglement.
pub fn average_entanglement(e: &Ensemble) -> Result<f64> {
    let mut total = 0.0;
    for (p, psi) in e.items() {
        if *p > 0.0 {
            total += p * entanglement_entropy(psi)?;
        }
    }
    Ok(total)
}
