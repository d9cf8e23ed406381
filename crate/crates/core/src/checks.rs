//! Randomized consistency suites for the channel representations.
//!
//! Both suites are seeded and deterministic; they back the `check` command and
//! the acceptance tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{
    apply_mu, covariance_ops, dilation_evolve, environment_output_closed_form, system_output_closed_form,
    ChannelParams,
};
use crate::error::Result;
use crate::qmat::{c, hermitian_eigen, partial_trace, ComplexMatrix, DensityMatrix, PureState, C64};

fn gaussian(rng: &mut impl Rng) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_pure_state(rng: &mut impl Rng, dim: usize) -> PureState {
    loop {
        let amps = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(psi) = PureState::normalized(amps) {
            return psi;
        }
    }
}

/// Full-rank random density matrix `G G† / Tr(G G†)` with `G` Ginibre.
pub fn random_density_matrix(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.scale(1.0 / tr).hermitian_completion()).expect("Ginibre sample is a density matrix")
}

pub fn random_params(rng: &mut impl Rng) -> ChannelParams {
    ChannelParams::new(rng.random::<f64>(), rng.random::<f64>()).expect("unit-interval sample")
}

/// Reduced system and environment states obtained by purifying `rho`
/// (spectral decomposition) and pushing every branch through the dilation.
pub fn dilation_reductions(rho: &DensityMatrix, p: ChannelParams) -> Result<(DensityMatrix, DensityMatrix)> {
    let (weights, vectors) = hermitian_eigen(rho.matrix())?;
    let mut system = ComplexMatrix::zeros(4);
    let mut environment = ComplexMatrix::zeros(8);
    for (k, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        let branch = PureState::normalized((0..4).map(|i| vectors[(i, k)]).collect())?;
        let joint = dilation_evolve(&branch, p)?.projector();
        system = &system + &partial_trace(&joint, &[4, 8], &[0])?.matrix().scale(w);
        environment = &environment + &partial_trace(&joint, &[4, 8], &[1])?.matrix().scale(w);
    }
    Ok((DensityMatrix::new(system.hermitian_completion())?, DensityMatrix::new(environment.hermitian_completion())?))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AgreementReport {
    pub trials: usize,
    /// Kraus sum vs closed-form system output.
    pub system_kraus_vs_closed: f64,
    /// Dilation reduction vs closed-form system output.
    pub system_dilation_vs_closed: f64,
    /// Dilation reduction vs Kraus sum.
    pub system_dilation_vs_kraus: f64,
    /// Dilation reduction vs closed-form environment output.
    pub environment_dilation_vs_closed: f64,
}

impl AgreementReport {
    pub fn worst(&self) -> f64 {
        self.system_kraus_vs_closed
            .max(self.system_dilation_vs_closed)
            .max(self.system_dilation_vs_kraus)
            .max(self.environment_dilation_vs_closed)
    }
}

/// Compares the three channel representations on `trials` random `(ρ, η, μ)`.
pub fn representation_agreement(trials: usize, seed: u64) -> Result<AgreementReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AgreementReport { trials, ..Default::default() };
    for _ in 0..trials {
        let rho = random_density_matrix(&mut rng, 4);
        let p = random_params(&mut rng);
        let kraus = apply_mu(&rho, p)?;
        let closed = system_output_closed_form(&rho, p)?;
        let env_closed = environment_output_closed_form(&rho, p)?;
        let (sys_dil, env_dil) = dilation_reductions(&rho, p)?;
        let r = &mut report;
        r.system_kraus_vs_closed = r.system_kraus_vs_closed.max(kraus.matrix().max_abs_diff(closed.matrix()));
        r.system_dilation_vs_closed = r.system_dilation_vs_closed.max(sys_dil.matrix().max_abs_diff(closed.matrix()));
        r.system_dilation_vs_kraus = r.system_dilation_vs_kraus.max(sys_dil.matrix().max_abs_diff(kraus.matrix()));
        r.environment_dilation_vs_closed =
            r.environment_dilation_vs_closed.max(env_dil.matrix().max_abs_diff(env_closed.matrix()));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CovarianceReport {
    pub states: usize,
    pub params_per_state: usize,
    /// Worst `|E(RρR) - R E(ρ) R|` over the three σz-type unitaries.
    pub sign_flips: f64,
    /// Same for the swap gate.
    pub swap: f64,
}

impl CovarianceReport {
    pub fn worst(&self) -> f64 {
        self.sign_flips.max(self.swap)
    }
}

/// Checks `E_μ(UρU†) = U E_μ(ρ) U†` for the covariance unitaries, using the
/// Kraus route.
pub fn covariance_residuals(states: usize, params_per_state: usize, seed: u64) -> Result<CovarianceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ops = covariance_ops();
    let mut report = CovarianceReport { states, params_per_state, ..Default::default() };
    for _ in 0..states {
        let rho = random_density_matrix(&mut rng, 4);
        for _ in 0..params_per_state {
            let p = random_params(&mut rng);
            let out = apply_mu(&rho, p)?;
            for (k, u) in ops.all().into_iter().enumerate() {
                let rotated_in = DensityMatrix::new(rho.matrix().conjugate_by(u))?;
                let lhs = apply_mu(&rotated_in, p)?;
                let rhs = out.matrix().conjugate_by(u);
                let residual = lhs.matrix().max_abs_diff(&rhs);
                if k < 3 {
                    report.sign_flips = report.sign_flips.max(residual);
                } else {
                    report.swap = report.swap.max(residual);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_states_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2, 4, 8] {
            let rho = random_density_matrix(&mut rng, dim);
            assert_eq!(rho.dim(), dim);
            assert!((random_pure_state(&mut rng, dim).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn small_suites_pass() {
        let agreement = representation_agreement(20, 1).unwrap();
        assert!(agreement.worst() <= 1e-12, "{agreement:?}");
        let cov = covariance_residuals(10, 3, 2).unwrap();
        assert!(cov.worst() <= 1e-12, "{cov:?}");
    }

    #[test]
    fn suites_are_deterministic() {
        assert_eq!(representation_agreement(5, 9).unwrap(), representation_agreement(5, 9).unwrap());
        assert_eq!(covariance_residuals(4, 2, 9).unwrap(), covariance_residuals(4, 2, 9).unwrap());
    }
}
