//! Model invariants as property tests.

use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use recoherence_core::analytic::{global_overlap, BranchLedger};
use recoherence_core::classicality::{
    certify, decoherence_functional, lgi_k3, sieve, CertifierConfig, Insertion, ProjectorSet,
};
use recoherence_core::lindblad::dephasing_propagate;
use recoherence_core::model::{
    fragment_rate, kernel, ControlChannel, EnvParticle, Fragment, ModelParams, SystemAmplitudes,
};
use recoherence_core::ops;

fn particle() -> impl Strategy<Value = EnvParticle> {
    prop_oneof![
        (0.1..3.0f64, 0.1..3.0f64).prop_map(|(g, gamma)| EnvParticle::lorentzian(g, gamma).unwrap()),
        (-3.0..3.0f64, 0.0..=1.0f64).prop_map(|(g, p)| EnvParticle::dichotomic(g, p).unwrap()),
    ]
}

fn lorentzian_model() -> impl Strategy<Value = ModelParams> {
    prop::collection::vec((0.1..2.0f64, 0.1..2.0f64), 1..8).prop_map(|ps| {
        ModelParams::new(ps.into_iter().map(|(g, gamma)| EnvParticle::lorentzian(g, gamma).unwrap()).collect()).unwrap()
    })
}

fn amplitudes() -> impl Strategy<Value = SystemAmplitudes> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(a, b, c, d)| a.abs() + b.abs() + c.abs() + d.abs() > 1e-3)
        .prop_map(|(a, b, c, d)| SystemAmplitudes::normalized(Complex64::new(a, b), Complex64::new(c, d)).unwrap())
}

fn increasing_times(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01..1.5f64, n).prop_map(|gaps| {
        gaps.iter()
            .scan(0.0, |acc, g| {
                *acc += g;
                Some(*acc)
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn kernel_is_multiplicative_hermitian_and_bounded(
        particles in prop::collection::vec(particle(), 2..8),
        split in 1usize..7,
        u in -20.0..20.0f64,
    ) {
        let params = ModelParams::new(particles).unwrap();
        let split = split.min(params.len() - 1);
        let f = Fragment::prefix(split);
        let g = f.complement(&params);
        let whole = kernel(&params, &f.union(&g), u).unwrap();
        let product = kernel(&params, &f, u).unwrap() * kernel(&params, &g, u).unwrap();
        prop_assert!((whole - product).norm() < 1e-14);
        prop_assert!((kernel(&params, &f, -u).unwrap() - kernel(&params, &f, u).unwrap().conj()).norm() < 1e-15);
        prop_assert!(whole.norm() <= 1.0 + 1e-15);
        prop_assert_eq!(kernel(&params, &f, 0.0).unwrap(), Complex64::from(1.0));
    }

    #[test]
    fn lorentzian_kernel_is_exponential_in_rate(params in lorentzian_model(), u in -10.0..10.0f64) {
        let full = params.full();
        let rate = fragment_rate(&params, &full).unwrap();
        prop_assert!((kernel(&params, &full, u).unwrap() - (-rate * u.abs()).exp()).norm() < 1e-12);
    }

    #[test]
    fn echo_identity(sys in amplitudes(), params in lorentzian_model(), t_star in 0.01..5.0f64) {
        let init = BranchLedger::initial(&sys, Arc::new(params));
        let echoed = init
            .apply_operator(&ops::sigma_x(), false).unwrap()
            .evolve(t_star).unwrap()
            .apply_operator(&ops::sigma_x(), false).unwrap()
            .evolve(t_star).unwrap();
        prop_assert!((global_overlap(&init, &echoed).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_preserves_gram_norm_and_matches_master_equation(
        sys in amplitudes(),
        params in lorentzian_model(),
        t in 0.0..5.0f64,
    ) {
        let rate = params.total_rate().unwrap();
        let init = BranchLedger::initial(&sys, Arc::new(params));
        let evolved = init.evolve(t).unwrap();
        prop_assert!((evolved.gram_norm() - 1.0).abs() < 1e-12);
        let exact = evolved.reduced_density().unwrap();
        let markov = dephasing_propagate(&init.reduced_density().unwrap(), t, rate).unwrap();
        prop_assert!(exact.max_abs_diff(&markov) < 1e-12);
    }

    #[test]
    fn histories_decohere_with_and_without_flip(
        sys in amplitudes(),
        params in lorentzian_model(),
        times in (1usize..=4).prop_flat_map(increasing_times),
        insert_at in 0.0..1.0f64,
    ) {
        let params = Arc::new(params);
        let plain = decoherence_functional(params.clone(), &sys, &times, &[]).unwrap();
        prop_assert!(plain.max_off_diagonal() <= 1e-12);
        prop_assert!((plain.diagonal_sum() - 1.0).abs() < 1e-10);
        let flip = Insertion { time: insert_at * times[times.len() - 1], operator: ops::sigma_x() };
        let flipped = decoherence_functional(params, &sys, &times, &[flip]).unwrap();
        prop_assert!(flipped.max_off_diagonal() <= 1e-12);
        prop_assert!((flipped.diagonal_sum() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn k3_is_one(sys in amplitudes(), params in lorentzian_model(), times in increasing_times(3)) {
        let r = lgi_k3(Arc::new(params), &sys, [times[0], times[1], times[2]]).unwrap();
        prop_assert!((r.k - 1.0).abs() < 1e-12);
        prop_assert!(r.k <= 1.0 + 1e-12);
    }

    #[test]
    fn sieve_entropy_is_nondecreasing(params in lorentzian_model(), phi in 0.0..std::f64::consts::PI) {
        let times: Vec<f64> = (0..40).map(|k| 0.1 * k as f64).collect();
        let table = sieve(Arc::new(params), &[phi], &times).unwrap();
        prop_assert!(table.entropy[0].windows(2).all(|w| w[1] >= w[0] - 1e-15));
    }
}

#[test]
fn diagonal_unitaries_never_beat_the_decay_bound() {
    let params = Arc::new(ModelParams::uniform_lorentzian(3, 1.0, 0.4).unwrap());
    let phase = |a: f64| {
        ops::Mat2::new(
            Complex64::from_polar(1.0, a),
            Complex64::from(0.0),
            Complex64::from(0.0),
            Complex64::from_polar(1.0, -0.3 * a),
        )
    };
    let controls = vec![
        ControlChannel::phase_flip(),
        ControlChannel::unitary(phase(0.7)).unwrap(),
        ControlChannel::unitary(phase(2.1)).unwrap(),
    ];
    let tau = 0.8;
    let rate = params.total_rate().unwrap();
    let config = CertifierConfig {
        epsilon: 0.5 * (-rate * tau).exp(),
        tau,
        controls,
        max_ops: 2,
        times: (0..12).map(|k| 0.3 * k as f64).collect(),
        initial_states: CertifierConfig::default_initial_states(),
    };
    let verdict = certify(params, &ProjectorSet::pointer(), &config).unwrap();
    assert!(verdict.pass, "{verdict:?}");
}
