//! The two-use amplitude damping channel with memory degree `mu`.
//!
//! `E_mu = (1 - mu) E⊗E + mu E_full`, where `E` damps a single qubit with
//! transmissivity `eta` and `E_full` damps `|11>` as a whole while leaving the
//! rest of the two-qubit space untouched.
//!
//! Three independent routes to the output are provided: Kraus sums, closed-form
//! matrix elements, and the isometric dilation onto system ⊗ environment ⊗
//! memory register. Basis order is `|00>, |01>, |10>, |11>` for the system,
//! `|e1 e2 m>` lexicographic for the 8-dimensional environment+memory register,
//! and S ⊗ E ⊗ M for the 32-dimensional dilated state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{re, ComplexMatrix, DensityMatrix, PureState, C64};

/// Completeness tolerance of a [`KrausSet`].
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Transmissivity and memory degree, both in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    eta: f64,
    mu: f64,
}

impl ChannelParams {
    pub fn new(eta: f64, mu: f64) -> Result<Self> {
        Ok(Self { eta: Error::unit_interval("eta", eta)?, mu: Error::unit_interval("mu", mu)? })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.eta, mu)
    }
}

/// Kraus operators `{K_i}` with `Σ K_i† K_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dim: usize,
    ops: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = ops.first().map(ComplexMatrix::dim).ok_or_else(|| Error::Domain("empty Kraus set".into()))?;
        if ops.iter().any(|k| k.dim() != dim) {
            return Err(Error::Domain("Kraus operators of different dimensions".into()));
        }
        let set = Self { dim, ops };
        let residual = set.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::Domain(format!("Kraus completeness violated by {residual:.3e}")));
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    /// `max |Σ K†K - 1|`
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim), |acc, k| &acc + &(&k.adjoint() * k));
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// `Σ K ρ K†`
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.ops
            .iter()
            .fold(ComplexMatrix::zeros(self.dim), |acc, k| &acc + &rho.conjugate_by(k))
    }
}

/// Single-qubit damping `E0 = diag(1, √η)`, `E1 = √(1-η) |0><1|`.
pub fn single_qubit_kraus(eta: f64) -> Result<KrausSet> {
    let eta = Error::unit_interval("eta", eta)?;
    let e0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, eta.sqrt()]])?;
    let e1 = ComplexMatrix::from_real_rows(&[&[0.0, (1.0 - eta).sqrt()], &[0.0, 0.0]])?;
    KrausSet::new(vec![e0, e1])
}

/// `A_0..A_3 = E0⊗E0, E0⊗E1, E1⊗E0, E1⊗E1`.
pub fn memoryless_kraus(eta: f64) -> Result<KrausSet> {
    let single = single_qubit_kraus(eta)?;
    let [e0, e1] = [&single.ops[0], &single.ops[1]];
    KrausSet::new(vec![e0.kron(e0), e0.kron(e1), e1.kron(e0), e1.kron(e1)])
}

/// `B_0 = diag(1, 1, 1, √η)`, `B_1 = √(1-η) |00><11|`.
pub fn full_memory_kraus(eta: f64) -> Result<KrausSet> {
    let eta = Error::unit_interval("eta", eta)?;
    let b0 = ComplexMatrix::from_real_diag(&[1.0, 1.0, 1.0, eta.sqrt()]);
    let mut b1 = ComplexMatrix::zeros(4);
    b1[(0, 3)] = re((1.0 - eta).sqrt());
    KrausSet::new(vec![b0, b1])
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::Domain(format!("expected a two-qubit state, got dimension {}", rho.dim())));
    }
    Ok(())
}

/// `(1-μ) Σ A_i ρ A_i† + μ Σ B_i ρ B_i†`
pub fn apply_mu(rho: &DensityMatrix, p: ChannelParams) -> Result<DensityMatrix> {
    check_two_qubit(rho)?;
    let memoryless = memoryless_kraus(p.eta)?.apply(rho.matrix());
    let full = full_memory_kraus(p.eta)?.apply(rho.matrix());
    let out = &memoryless.scale(1.0 - p.mu) + &full.scale(p.mu);
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Input entries in the naming of the closed-form expressions:
/// diagonal `α β γ δ`, upper triangle `κ λ ξ / ν o / π`.
struct Entries {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    kappa: C64,
    lambda: C64,
    xi: C64,
    nu: C64,
    o: C64,
    pi: C64,
}

impl Entries {
    fn of(m: &ComplexMatrix) -> Self {
        Self {
            alpha: m[(0, 0)].re,
            beta: m[(1, 1)].re,
            gamma: m[(2, 2)].re,
            delta: m[(3, 3)].re,
            kappa: m[(0, 1)],
            lambda: m[(0, 2)],
            xi: m[(0, 3)],
            nu: m[(1, 2)],
            o: m[(1, 3)],
            pi: m[(2, 3)],
        }
    }
}

/// Closed-form system output on a raw 4×4 matrix (upper triangle read only).
pub(crate) fn system_output_matrix(m: &ComplexMatrix, p: ChannelParams) -> ComplexMatrix {
    let Entries { alpha, beta, gamma, delta, kappa, lambda, xi, nu, o, pi } = Entries::of(m);
    let (eta, mu) = (p.eta, p.mu);
    let (se, lm) = (eta.sqrt(), 1.0 - mu);
    let damp = 1.0 - eta;
    let mut s = ComplexMatrix::zeros(4);
    s[(0, 0)] = re(lm * (alpha + damp * (beta + gamma) + damp * damp * delta) + mu * (alpha + damp * delta));
    s[(0, 1)] = (kappa * se + pi * (se * damp)) * lm + kappa * mu;
    s[(0, 2)] = (lambda * se + o * (se * damp)) * lm + lambda * mu;
    s[(0, 3)] = xi * (lm * eta + mu * se);
    s[(1, 1)] = re(lm * (eta * beta + eta * damp * delta) + mu * beta);
    s[(1, 2)] = nu * (lm * eta + mu);
    s[(1, 3)] = o * (lm * eta * se + mu * se);
    s[(2, 2)] = re(lm * (eta * gamma + eta * damp * delta) + mu * gamma);
    s[(2, 3)] = pi * (lm * eta * se + mu * se);
    s[(3, 3)] = re(lm * eta * eta * delta + mu * eta * delta);
    s.hermitian_completion()
}

/// Closed-form environment+memory output on a raw 4×4 matrix.
pub(crate) fn environment_output_matrix(m: &ComplexMatrix, p: ChannelParams) -> ComplexMatrix {
    let Entries { alpha, beta, gamma, delta, kappa, lambda, xi, nu, o, pi } = Entries::of(m);
    let (eta, mu) = (p.eta, p.mu);
    let lm = 1.0 - mu;
    let damp = 1.0 - eta;
    let se = eta.sqrt();
    let sd = damp.sqrt();
    let cross = (mu * lm).sqrt();
    let mut e = ComplexMatrix::zeros(8);
    // row 000
    e[(0, 0)] = re(lm * (alpha + eta * (beta + gamma) + eta * eta * delta));
    e[(0, 1)] = re(cross * (alpha + se * (beta + gamma) + eta * se * delta));
    e[(0, 2)] = (kappa + pi * eta) * (lm * sd);
    e[(0, 4)] = (lambda + o * eta) * (lm * sd);
    e[(0, 6)] = xi * (lm * damp);
    e[(0, 7)] = xi * (cross * sd);
    // row 001
    e[(1, 1)] = re(mu * (1.0 - damp * delta));
    e[(1, 2)] = (kappa + pi * se) * (cross * sd);
    e[(1, 4)] = (lambda + o * se) * (cross * sd);
    e[(1, 6)] = xi * (cross * damp);
    e[(1, 7)] = xi * (mu * sd);
    // row 010
    e[(2, 2)] = re(lm * damp * (beta + eta * delta));
    e[(2, 4)] = nu * (lm * damp);
    e[(2, 6)] = o * (lm * damp * sd);
    e[(2, 7)] = o * (cross * damp);
    // rows 011 and 101 vanish
    e[(4, 4)] = re(lm * damp * (gamma + eta * delta));
    e[(4, 6)] = pi * (lm * damp * sd);
    e[(4, 7)] = pi * (cross * damp);
    e[(6, 6)] = re(lm * damp * damp * delta);
    e[(6, 7)] = re(cross * damp * sd * delta);
    e[(7, 7)] = re(mu * damp * delta);
    e.hermitian_completion()
}

/// `ρ^S' = E_μ(ρ)` from the closed-form matrix elements.
pub fn system_output_closed_form(rho: &DensityMatrix, p: ChannelParams) -> Result<DensityMatrix> {
    check_two_qubit(rho)?;
    Ok(DensityMatrix::from_matrix_unchecked(system_output_matrix(rho.matrix(), p)))
}

/// `ρ^EM'`, the joint environment+memory state after the channel, from the
/// closed-form matrix elements.
pub fn environment_output_closed_form(rho: &DensityMatrix, p: ChannelParams) -> Result<DensityMatrix> {
    check_two_qubit(rho)?;
    Ok(DensityMatrix::from_matrix_unchecked(environment_output_matrix(rho.matrix(), p)))
}

#[inline]
fn dilated_index(system: usize, env: usize, memory: usize) -> usize {
    system * 8 + env * 2 + memory
}

/// Evolves `|ψ>_S ⊗ |000>_EM` through the dilation; the result lives on
/// S(4) ⊗ E(4) ⊗ M(2).
pub fn dilation_evolve(psi: &PureState, p: ChannelParams) -> Result<PureState> {
    if psi.dim() != 4 {
        return Err(Error::Domain(format!("expected a two-qubit state, got dimension {}", psi.dim())));
    }
    let (eta, mu) = (p.eta, p.mu);
    let (lm, damp) = (1.0 - mu, 1.0 - eta);
    let [a, b, cc, d] = [psi.amps()[0], psi.amps()[1], psi.amps()[2], psi.amps()[3]];
    let mut out = vec![C64::new(0.0, 0.0); 32];
    let mut put = |s: usize, e: usize, m: usize, amp: C64| out[dilated_index(s, e, m)] += amp;
    // Environment index e = 2·e1 + e2; system index s = 2·q1 + q2.
    put(0, 0, 0, a * lm.sqrt());
    put(0, 0, 1, a * mu.sqrt());

    put(1, 0, 0, b * (lm * eta).sqrt());
    put(0, 1, 0, b * (lm * damp).sqrt());
    put(1, 0, 1, b * mu.sqrt());

    put(2, 0, 0, cc * (lm * eta).sqrt());
    put(0, 2, 0, cc * (lm * damp).sqrt());
    put(2, 0, 1, cc * mu.sqrt());

    put(3, 0, 0, d * (lm.sqrt() * eta));
    put(1, 2, 0, d * (lm * eta * damp).sqrt());
    put(2, 1, 0, d * (lm * eta * damp).sqrt());
    put(0, 3, 0, d * (lm.sqrt() * damp));
    put(3, 0, 1, d * (mu * eta).sqrt());
    put(0, 3, 1, d * (mu * damp).sqrt());
    Ok(PureState::from_amps_unchecked(out))
}

/// The covariance unitaries `σz⊗1`, `1⊗σz`, `σz⊗σz` and the swap gate.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceOps {
    pub r1: ComplexMatrix,
    pub r2: ComplexMatrix,
    pub r3: ComplexMatrix,
    pub swap: ComplexMatrix,
}

impl CovarianceOps {
    pub fn all(&self) -> [&ComplexMatrix; 4] {
        [&self.r1, &self.r2, &self.r3, &self.swap]
    }
}

pub fn covariance_ops() -> CovarianceOps {
    let r1 = ComplexMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]);
    let r2 = ComplexMatrix::from_real_diag(&[1.0, -1.0, 1.0, -1.0]);
    let r3 = &r1 * &r2;
    let mut swap = ComplexMatrix::zeros(4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[(i, j)] = re(1.0);
    }
    CovarianceOps { r1, r2, r3, swap }
}
