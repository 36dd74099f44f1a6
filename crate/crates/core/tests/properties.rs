use std::f64::consts::PI;

use proptest::prelude::*;

use spmac_core::analytic::one_sender::{acc_info_one_sender, PovmTerm, SymmetricPovmParams};
use spmac_core::capacity::{ba_mac_rate_sum, ba_point_to_point, BaOptions, MacOptions};
use spmac_core::info::{holevo_chi, mutual_information_product, JointDistribution};
use spmac_core::mac::classical::canonical_classical_mac;
use spmac_core::mac::protocols::{n_sender_assisted_protocol, one_sender_assisted};
use spmac_core::mac::{build_mac, EncodingStrategy, SenderEncoding, TransitionMatrix};
use spmac_core::quantum::{CMatrix, CVector, DensityOperator, ModeSpace, NpeBranch, NpeOperation, PureState, C64};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

fn angle() -> impl Strategy<Value = f64> {
    0.0..(2.0 * PI)
}

fn branch() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.01..1.0f64, unit(), angle(), angle())
}

fn npe(parts: &[(f64, f64, f64, f64)]) -> NpeOperation {
    let total: f64 = parts.iter().map(|p| p.0).sum();
    NpeOperation::new(parts.iter().map(|p| NpeBranch { weight: p.0 / total, gamma: p.1, phi1: p.2, phi2: p.3 }).collect())
        .unwrap()
}

fn pure_state(space: ModeSpace, raw: &[(f64, f64)]) -> PureState {
    let v = CVector::from_iterator(space.dimension(), raw.iter().map(|(a, b)| C64::new(*a, *b)));
    let n = v.norm();
    PureState::new(space, v / C64::new(n, 0.0)).unwrap()
}

fn amplitudes(d: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d).prop_filter("nonzero", |v| {
        v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
    })
}

fn distribution(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01..1.0f64, k).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

fn channel(inputs: Vec<usize>, outputs: usize) -> impl Strategy<Value = TransitionMatrix> {
    let n: usize = inputs.iter().product();
    prop::collection::vec(distribution(outputs), n).prop_map(move |cols| TransitionMatrix::new(inputs.clone(), outputs, cols).unwrap())
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn npe_kraus_is_trace_preserving(parts in prop::collection::vec(branch(), 1..4), paths in 1usize..4, target in 0usize..3) {
        let space = ModeSpace::new(paths).unwrap();
        let target = 1 + target % paths;
        let ks = npe(&parts).embedded_kraus(space, target).unwrap();
        let d = space.dimension();
        let sum = ks.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        prop_assert!((sum - CMatrix::identity(d, d)).norm() < 1e-12);
    }

    #[test]
    fn npe_action_is_convex_in_branches(a in branch(), b in branch(), raw in amplitudes(3)) {
        let space = ModeSpace::new(2).unwrap();
        let rho = pure_state(space, &raw).density();
        let mixed = npe(&[a, b]).apply(1, &rho).unwrap();
        let wa = a.0 / (a.0 + b.0);
        let ra = npe(&[(1.0, a.1, a.2, a.3)]).apply(1, &rho).unwrap();
        let rb = npe(&[(1.0, b.1, b.2, b.3)]).apply(1, &rho).unwrap();
        let want = ra.matrix() * C64::new(wa, 0.0) + rb.matrix() * C64::new(1.0 - wa, 0.0);
        prop_assert!((mixed.matrix() - want).norm() < 1e-12);
    }

    #[test]
    fn phases_compose(p1 in angle(), p2 in angle(), raw in amplitudes(4)) {
        let space = ModeSpace::new(3).unwrap();
        let rho = pure_state(space, &raw).density();
        let twice = NpeOperation::phase(p2).apply(2, &NpeOperation::phase(p1).apply(2, &rho).unwrap()).unwrap();
        let once = NpeOperation::phase(p1 + p2).apply(2, &rho).unwrap();
        prop_assert!(twice.max_deviation(&once) < 1e-12);
    }

    #[test]
    fn vacuum_is_fixed(parts in prop::collection::vec(branch(), 1..4), target in 1usize..4) {
        let space = ModeSpace::new(3).unwrap();
        let vac = DensityOperator::vacuum(space);
        let out = npe(&parts).apply(target, &vac).unwrap();
        prop_assert!(out.max_deviation(&vac) < 1e-14);
    }

    #[test]
    fn built_macs_are_column_stochastic(ops in prop::collection::vec(branch(), 4), theta in 0.0..1.5f64) {
        let space = ModeSpace::new(2).unwrap();
        let initial = PureState::from_path_amplitudes(space, &[theta.cos(), theta.sin()]).unwrap().density();
        let enc = EncodingStrategy::new(vec![
            SenderEncoding::uniform(1, vec![npe(&ops[0..1]), npe(&ops[1..2])]),
            SenderEncoding::uniform(2, vec![npe(&ops[2..3]), npe(&ops[3..4])]),
        ]).unwrap();
        let povm = one_sender_assisted(0.5, 0.5, PI).unwrap().povm;
        let tm = build_mac(&initial, &enc, &povm).unwrap();
        for col in tm.columns() {
            prop_assert!((col.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(col.iter().all(|p| *p >= -1e-15));
        }
    }

    #[test]
    fn holevo_is_unitarily_invariant(q in 0.05..0.95f64, theta in 0.05..1.5f64, phases in prop::collection::vec(angle(), 3)) {
        let ens = one_sender_assisted(q, theta, PI).unwrap().ensemble().unwrap();
        let u = CMatrix::from_diagonal(&CVector::from_iterator(3, phases.iter().map(|p| C64::from_polar(1.0, *p))));
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut mix = CMatrix::identity(3, 3);
        mix[(1, 1)] = h;
        mix[(1, 2)] = h;
        mix[(2, 1)] = -h;
        mix[(2, 2)] = h;
        let rotated = ens.conjugate(&(mix * u)).unwrap();
        prop_assert!((holevo_chi(&ens) - holevo_chi(&rotated)).abs() < 1e-10);
    }

    #[test]
    fn chain_rule(tm in channel(vec![2, 3], 3), p1 in distribution(2), p2 in distribution(3)) {
        let j = JointDistribution::from_channel(&tm, &[p1, p2]).unwrap();
        let whole = j.mutual_information(&[0, 1], &[2]).unwrap();
        let split = j.mutual_information(&[0], &[2]).unwrap() + j.conditional_mutual_information(&[1], &[2], &[0]).unwrap();
        prop_assert!((whole - split).abs() < 1e-12);
    }

    #[test]
    fn post_processing_never_helps(tm in channel(vec![2, 2], 3), k in prop::collection::vec(distribution(2), 3), p1 in distribution(2), p2 in distribution(2)) {
        let priors = vec![p1, p2];
        let after = tm.post_process(&k).unwrap();
        prop_assert!(mutual_information_product(&after, &priors) <= mutual_information_product(&tm, &priors) + 1e-12);
    }

    #[test]
    fn channel_information_below_holevo(q in 0.0..=1.0f64, theta in 0.0..std::f64::consts::FRAC_PI_2, alpha in angle()) {
        let p = one_sender_assisted(q, theta, alpha).unwrap();
        let mi = mutual_information_product(&p.channel().unwrap(), &p.encoding.priors());
        prop_assert!(mi <= holevo_chi(&p.ensemble().unwrap()) + 1e-10);
    }

    #[test]
    fn sender_order_does_not_matter(tm in channel(vec![2, 3], 3)) {
        let swapped = tm.relabel(&[1, 0], &[vec![0, 1, 2], vec![0, 1]], &[0, 1, 2]).unwrap();
        let opts = MacOptions { upper_bound: false, ..MacOptions::default() };
        let a = ba_mac_rate_sum(&tm, &opts).unwrap().value_bits;
        let b = ba_mac_rate_sum(&swapped, &opts).unwrap().value_bits;
        prop_assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn fixing_a_sender_cannot_raise_the_rate_sum(w in 0.0..=1.0f64, which in 0usize..2, value in 0usize..2) {
        let tm = canonical_classical_mac(&[w, 1.0 - w]).unwrap();
        let opts = MacOptions { upper_bound: false, ..MacOptions::default() };
        let full = ba_mac_rate_sum(&tm, &opts).unwrap().value_bits;
        let fixed = ba_point_to_point(&tm.fix_sender(which, value).unwrap(), &BaOptions::default()).unwrap().value_bits;
        prop_assert!(fixed <= full + 1e-8);
    }

    #[test]
    fn split_terms_change_nothing(q in 0.05..0.95f64, theta in 0.05..1.5f64, lo in 0.0..0.5f64, hi in 0.5..1.0f64, beta in prop::sample::select(vec![0.0, PI])) {
        let w = (hi - 0.5) / (hi - lo);
        let one = SymmetricPovmParams { terms: vec![
            PovmTerm { weight: w, sigma: lo, beta },
            PovmTerm { weight: 1.0 - w, sigma: hi, beta },
        ], alpha: PI };
        let two = SymmetricPovmParams { terms: vec![
            PovmTerm { weight: w / 2.0, sigma: lo, beta },
            PovmTerm { weight: w / 2.0, sigma: lo, beta },
            PovmTerm { weight: 1.0 - w, sigma: hi, beta },
        ], alpha: PI };
        prop_assert!((one.value(q, theta).unwrap() - two.value(q, theta).unwrap()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn ba_is_monotone_and_sandwiched(tm in channel(vec![4], 3)) {
        let r = ba_point_to_point(&tm, &BaOptions { record_history: true, ..BaOptions::default() }).unwrap();
        prop_assert!(r.history.windows(2).all(|w| w[1] >= w[0] - 1e-13));
        prop_assert!(r.value_bits <= r.upper_bound_bits.unwrap() + 1e-12);
        prop_assert!(r.upper_bound_bits.unwrap() - r.value_bits <= 1e-10);
    }

    #[test]
    fn mac_rate_sum_below_flattened_capacity(tm in channel(vec![2, 2], 3)) {
        let r = ba_mac_rate_sum(&tm, &MacOptions::default()).unwrap();
        prop_assert!(r.value_bits <= r.upper_bound_bits.unwrap() + 1e-9);
    }

    #[test]
    fn physical_povms_stay_below_acc_info(
        q in 0.02..0.98f64,
        theta in 0.02..1.55f64,
        pairs in prop::collection::vec((0.0..0.5f64, 0.5..1.0f64, 0.01..1.0f64, any::<bool>()), 1..4),
    ) {
        // every (lo, hi) pair averages to 1/2, so the mixture does too
        let total: f64 = pairs.iter().map(|p| p.2).sum();
        let mut terms = Vec::new();
        for (lo, hi, m, flip) in pairs {
            let beta = if flip { PI } else { 0.0 };
            let w = if hi > lo { (hi - 0.5) / (hi - lo) } else { 1.0 };
            terms.push(PovmTerm { weight: m / total * w, sigma: lo, beta });
            terms.push(PovmTerm { weight: m / total * (1.0 - w), sigma: hi, beta });
        }
        let params = SymmetricPovmParams { terms, alpha: PI };
        prop_assume!(params.validate().is_ok());
        let v = params.value(q, theta).unwrap();
        prop_assert!(v <= acc_info_one_sender(q, theta).unwrap().value_bits + 1e-9);
    }

    #[test]
    fn acc_info_is_continuous(q in 0.02..0.98f64, theta in 0.02..1.55f64) {
        let h = 1e-6;
        let a = acc_info_one_sender(q, theta).unwrap().value_bits;
        let b = acc_info_one_sender(q + h, theta).unwrap().value_bits;
        let c = acc_info_one_sender(q, theta + h).unwrap().value_bits;
        prop_assert!((a - b).abs() < 1e-4 && (a - c).abs() < 1e-4);
    }
}

#[test]
fn assisted_rate_sums_nest() {
    let opts = MacOptions { upper_bound: false, ..MacOptions::default() };
    let r: Vec<f64> = (2..=5).map(|n| ba_mac_rate_sum(&n_sender_assisted_protocol(n).unwrap().channel().unwrap(), &opts).unwrap().value_bits).collect();
    assert!(r.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{r:?}");
}
