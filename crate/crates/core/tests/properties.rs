use qenergy_core::control::{average_fidelity, average_fidelity_monte_carlo, build_dilation, control_channel, Gate, LadderControl};
use qenergy_core::landauer::{erase, ErasureConfig};
use qenergy_core::ledger::{
    corollary2_lower, log_falling_factorial, prop4_bruteforce, run_classical_ensemble, run_framework, theorem2_upper,
    theorem3_upper, theorem4_lower, Algorithm, BoundConstants, CircuitShape, CostModel,
};
use qenergy_core::quantum::{haar_state, random_density};
use qenergy_core::rng::trial_rng;
use qenergy_core::simon::{prp_instance, sample_instance_with_bit, PrpConfig};
use qenergy_core::C64;

#[test]
fn dilation_preserves_total_energy() {
    let ctrl = LadderControl::new(12, 2, 1.5).unwrap();
    let energies = ctrl.total_energies();
    for (k, g) in [Gate::X, Gate::H, Gate::Random(3)].into_iter().enumerate() {
        let v = build_dilation(&g.matrix(), &ctrl).unwrap();
        let psi = haar_state(2, &mut trial_rng(7, k as u64));
        let phi = ctrl.control_state();
        let input: Vec<C64> = psi.iter().flat_map(|&p| phi.iter().map(move |&a| p * a)).collect();
        let output = v.mul_vec(&input).unwrap();
        let e = |s: &[C64]| s.iter().zip(&energies).map(|(a, e)| a.norm_sqr() * e).sum::<f64>();
        assert!((e(&input) - e(&output)).abs() < 1e-9);
    }
}

#[test]
fn joint_output_is_pure() {
    let ctrl = LadderControl::new(16, 1, 1.0).unwrap();
    for i in 0..5 {
        let psi = haar_state(2, &mut trial_rng(8, i));
        let (s, c) = control_channel(&Gate::H.matrix(), &ctrl, &psi).unwrap();
        assert!((s.entropy() - c.entropy()).abs() < 1e-9);
    }
}

#[test]
fn infidelity_decreases_with_ladder_length() {
    for g in [Gate::X, Gate::H, Gate::T, Gate::Random(21)] {
        let f: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&l| 1.0 - average_fidelity(&g.matrix(), &LadderControl::new(l, 1, 1.0).unwrap()).unwrap())
            .collect();
        assert!(f.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{g:?} {f:?}");
    }
}

#[test]
fn fidelity_identity_matches_large_sample() {
    let ctrl = LadderControl::new(16, 1, 1.0).unwrap();
    let u = Gate::X.matrix();
    let exact = average_fidelity(&u, &ctrl).unwrap();
    let (mean, se) = average_fidelity_monte_carlo(&u, &ctrl, 100_000, 5).unwrap();
    assert!((exact - mean).abs() <= 3.0 * se, "{exact} {mean} {se}");
}

#[test]
fn prp_oracle_runs_through_the_ledger() {
    let cfg = PrpConfig::new(b"ledger".to_vec(), 4).unwrap();
    let inst = prp_instance(3, 1, 5, &cfg).unwrap();
    let cost = CostModel::default();
    let mut rng = trial_rng(1, 0);
    let (l, out) = run_framework(&inst, Algorithm::QuantumSimon { rounds: 13 }, &cost, &mut rng).unwrap();
    assert_eq!(out.a, 1);
    assert!(l.total_w() <= theorem2_upper(&l.shape(), &cost, &BoundConstants::matched(&cost)));
}

#[test]
fn ensemble_entropy_bound_across_sizes() {
    let cost = CostModel { epsilon: 1e-3, ..CostModel::default() };
    for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 3), (3, 2)] {
        let run = run_classical_ensemble(n, m, &cost).unwrap();
        assert!(run.ledger.total_w() >= theorem4_lower(&run.outcome, cost.beta), "n={n} m={m}");
        assert!(run.outcome.s_c_given_a <= (2 * n as usize * m) as f64 * core::f64::consts::LN_2 + 1e-12);
    }
}

#[test]
fn brute_force_entropy_ignores_query_choice() {
    let exact = log_falling_factorial(3, 3);
    for xs in [[0u32, 1, 2], [7, 3, 5], [6, 0, 4]] {
        assert!((prop4_bruteforce(3, &xs).unwrap() - exact).abs() < 1e-9);
    }
}

#[test]
fn bounds_monotone_in_shape_parameters() {
    let cost = CostModel::default();
    let k = BoundConstants::default();
    let base = CircuitShape::simon(5, &cost).unwrap();
    let b2 = theorem2_upper(&base, &cost, &k);
    let b3 = theorem3_upper(&base, &cost, &k);
    let mut wider = base.clone();
    wider.w += 10;
    let mut deeper = base.clone();
    deeper.depths[0] += 5;
    let mut longer = base.clone();
    longer.m += 1;
    longer.depths.insert(0, 1);
    for s in [&wider, &deeper, &longer] {
        assert!(theorem2_upper(s, &cost, &k) > b2);
        assert!(theorem3_upper(s, &cost, &k) > b3);
    }
    let sharper = CostModel { eta: cost.eta / 2.0, ..cost };
    assert!(theorem2_upper(&base, &sharper, &k) > b2);
    assert!(theorem3_upper(&base, &sharper, &k) > b3);
}

#[test]
fn low_temperature_bound_scales_with_temperature() {
    let a = corollary2_lower(80, 1.0, None).unwrap();
    let b = corollary2_lower(80, 0.5, None).unwrap();
    assert!((b / a - 2.0).abs() < 1e-12);
}

#[test]
fn erasure_of_random_qutrits() {
    let cfg = ErasureConfig::new(2.0, 0.05, 0.2, 3).unwrap();
    for i in 0..20 {
        let rho = random_density(3, &mut trial_rng(9, i));
        let r = erase(&rho, &cfg).unwrap();
        assert!(r.excess >= -1e-9 && r.excess <= cfg.eta + 1e-9);
        assert!(r.final_infidelity <= cfg.epsilon + 1e-9);
    }
}

#[test]
fn instance_sampling_is_seeded() {
    let a = sample_instance_with_bit(6, 1, &mut trial_rng(3, 4)).unwrap();
    let b = sample_instance_with_bit(6, 1, &mut trial_rng(3, 4)).unwrap();
    assert_eq!(a, b);
    let c = sample_instance_with_bit(6, 1, &mut trial_rng(3, 5)).unwrap();
    assert_ne!(a, c);
}
