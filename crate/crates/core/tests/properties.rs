use madc::capacity::{chi_g1, chi_g2, coherent_information, holevo, mutual_information};
use madc::channel::{apply_mu, covariance_ops, system_output_closed_form, ChannelParams};
use madc::checks::{dilation_reductions, random_density_matrix, random_pure_state};
use madc::ensembles::{build_g1, build_g2, ensemble_density, G1Params, G2Params, Populations};
use madc::optimize::{maximize, Domain, OptimizerConfig};
use madc::qmat::{hermitian_eigen, hermitian_eigenvalues, partial_trace, von_neumann_entropy, DensityMatrix};
use madc::sweep::format_value;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn simplex4() -> impl Strategy<Value = Populations> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_filter_map("nonzero", |(a, b, c, d)| {
        let t = a + b + c + d;
        (t > 1e-6).then(|| Populations { alpha: a / t, beta: b / t, gamma: c / t, delta: d / t })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_sum_to_trace(seed in any::<u64>(), dim in prop::sample::select(vec![2usize, 3, 4, 8])) {
        let rho = random_density_matrix(&mut rng(seed), dim);
        let vals = hermitian_eigenvalues(rho.matrix()).unwrap();
        prop_assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density_matrix(&mut r, 4);
        let (_, u) = hermitian_eigen(random_density_matrix(&mut r, 4).matrix()).unwrap();
        let rotated = DensityMatrix::new(rho.matrix().conjugate_by(&u).hermitian_completion()).unwrap();
        prop_assert!((von_neumann_entropy(&rho).unwrap() - von_neumann_entropy(&rotated).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn pure_state_reductions_share_entropy(seed in any::<u64>()) {
        let psi = random_pure_state(&mut rng(seed), 8);
        let a = partial_trace(&psi.projector(), &[2, 4], &[0]).unwrap();
        let b = partial_trace(&psi.projector(), &[2, 4], &[1]).unwrap();
        prop_assert!((von_neumann_entropy(&a).unwrap() - von_neumann_entropy(&b).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn entropy_is_concave(seed in any::<u64>(), p in unit()) {
        let mut r = rng(seed);
        let (x, y) = (random_density_matrix(&mut r, 4), random_density_matrix(&mut r, 4));
        let mix = DensityMatrix::new(&x.matrix().scale(p) + &y.matrix().scale(1.0 - p)).unwrap();
        let lhs = von_neumann_entropy(&mix).unwrap();
        let rhs = p * von_neumann_entropy(&x).unwrap() + (1.0 - p) * von_neumann_entropy(&y).unwrap();
        prop_assert!(lhs >= rhs - 1e-12);
        prop_assert!(lhs <= 2.0 + 1e-12);
    }

    #[test]
    fn channel_outputs_are_states(seed in any::<u64>(), eta in unit(), mu in unit()) {
        let rho = random_density_matrix(&mut rng(seed), 4);
        let p = ChannelParams::new(eta, mu).unwrap();
        let out = apply_mu(&rho, p).unwrap();
        prop_assert!(DensityMatrix::new(out.matrix().clone()).is_ok());
        let closed = system_output_closed_form(&rho, p).unwrap();
        prop_assert!(out.matrix().max_abs_diff(closed.matrix()) < 1e-12);
    }

    #[test]
    fn channel_is_covariant(seed in any::<u64>(), eta in unit(), mu in unit()) {
        let rho = random_density_matrix(&mut rng(seed), 4);
        let p = ChannelParams::new(eta, mu).unwrap();
        let out = apply_mu(&rho, p).unwrap();
        for u in covariance_ops().all() {
            let lhs = apply_mu(&DensityMatrix::new(rho.matrix().conjugate_by(u)).unwrap(), p).unwrap();
            prop_assert!(lhs.matrix().max_abs_diff(&out.matrix().conjugate_by(u)) < 1e-12);
        }
    }

    #[test]
    fn g1_density_is_symmetric_and_diagonal(a in unit(), b in unit(), c in unit(), phases in prop::array::uniform3(0.0..6.3f64)) {
        let t = (a * a + b * b + c * c).max(1.0);
        let g = G1Params { abar: a / t.sqrt(), bbar: b / t.sqrt(), cbar: c / t.sqrt(), phi1: phases[0], phi2: phases[1], phi3: phases[2] };
        let rho = ensemble_density(&build_g1(&g).unwrap());
        let m = rho.matrix();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    prop_assert!(m[(i, j)].norm() < 1e-12);
                }
            }
        }
        prop_assert!((m[(1, 1)].re - m[(2, 2)].re).abs() < 1e-12);
    }

    #[test]
    fn holevo_bounds_and_fast_paths(
        a in unit(), b in unit(), c in unit(), phases in prop::array::uniform3(0.0..6.3f64),
        beta in 0.0..=0.5f64, t1 in 0.0..1.6f64, t2 in 0.0..1.6f64, eta in unit(), mu in unit(),
    ) {
        let p = ChannelParams::new(eta, mu).unwrap();
        let t = (a * a + b * b + c * c).max(1.0);
        let g1 = G1Params { abar: a / t.sqrt(), bbar: b / t.sqrt(), cbar: c / t.sqrt(), phi1: phases[0], phi2: phases[1], phi3: phases[2] };
        let general = holevo(p, &build_g1(&g1).unwrap()).unwrap();
        prop_assert!((-1e-12..=2.0 + 1e-12).contains(&general));
        prop_assert!((chi_g1(&g1, p) - general).abs() < 1e-10);
        let g2 = G2Params { beta, theta1: t1, theta2: t2, phi1: phases[0], phi2: phases[1] };
        let general = holevo(p, &build_g2(&g2).unwrap()).unwrap();
        prop_assert!((-1e-12..=2.0 + 1e-12).contains(&general));
        prop_assert!((chi_g2(&g2, p) - general).abs() < 1e-10);
    }

    #[test]
    fn coherent_information_matches_dilation(d in simplex4(), eta in unit(), mu in unit()) {
        let p = ChannelParams::new(eta, mu).unwrap();
        let (sys, env) = dilation_reductions(&d.density(), p).unwrap();
        let oracle = von_neumann_entropy(&sys).unwrap() - von_neumann_entropy(&env).unwrap();
        prop_assert!((coherent_information(&d, p) - oracle).abs() < 1e-9);
        let s_in = von_neumann_entropy(&d.density()).unwrap();
        // Coherent information never exceeds the input entropy.
        prop_assert!(coherent_information(&d, p) <= s_in + 1e-12);
        prop_assert!(mutual_information(&d, p) >= -1e-12);
    }

    #[test]
    fn optimizer_is_deterministic_and_stays_in_domain(seed in any::<u64>(), cx in unit(), cy in 0.0..=0.5f64) {
        let domain = Domain::simplex_and_box(3, vec![(0.0, 0.5)]).unwrap();
        let f = |x: &[f64]| {
            assert!(domain.contains(x));
            -(x[0] - cx).powi(2) - (x[3] - cy).powi(2)
        };
        let cfg = OptimizerConfig { restarts: 4, seed, ..Default::default() };
        let a = maximize(f, &domain, &cfg).unwrap();
        let b = maximize(f, &domain, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn more_restarts_never_hurt(seed in any::<u64>(), eta in unit(), mu in unit()) {
        let p = ChannelParams::new(eta, mu).unwrap();
        let domain = Domain::simplex(4).unwrap();
        let f = |x: &[f64]| coherent_information(&Populations { alpha: x[0], beta: x[1], gamma: x[2], delta: x[3] }, p);
        let k = OptimizerConfig { restarts: 3, seed, ..Default::default() };
        let two_k = OptimizerConfig { restarts: 6, ..k };
        prop_assert!(maximize(f, &domain, &two_k).unwrap().value >= maximize(f, &domain, &k).unwrap().value);
    }

    #[test]
    fn formatted_values_are_stable(x in -10.0..10.0f64, scale in -12i32..2) {
        let v = x * 10f64.powi(scale);
        let once = format_value(v);
        let parsed: f64 = once.parse().unwrap();
        prop_assert_eq!(format_value(parsed), once);
        prop_assert!((parsed - v).abs() <= v.abs() * 1e-11);
    }
}
