use proptest::prelude::*;

use threestage::channel::{EveBasis, StageSet};
use threestage::{
    alice_stage1, alice_stage3, apply, bob_stage2, bob_stage4, commutator_norm, compose,
    decode_bit, encode_bit, fidelity, keydist_round, random_qubit, rotation, run_experiment,
    run_three_stage, serialize_report, verify_frame, AdversaryStrategy, ComplexAmp, Error,
    ExperimentConfig, FrameSpec, OrthogonalPair, PairChoice, PartyState, Qubit, ReportFormat,
    RngStream, SecretTransform, SessionConfig, SessionStatus, TransformPolicy, Unitary2,
};

fn angle() -> impl Strategy<Value = f64> {
    0.0..std::f64::consts::TAU
}

fn qubit() -> impl Strategy<Value = Qubit> {
    any::<u64>().prop_map(|s| random_qubit(&mut RngStream::from_seed(s)))
}

/// `[q | e^{iγ} q⊥]` is unitary for any state `q` and phase `γ`.
fn unitary() -> impl Strategy<Value = Unitary2> {
    (qubit(), angle()).prop_map(|(q, gamma)| {
        let p = q.orthogonal();
        let ph = ComplexAmp::from_polar(1.0, gamma);
        Unitary2::new([[q.amp0(), ph * p.amp0()], [q.amp1(), ph * p.amp1()]]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn norm_preserved(u in unitary(), q in qubit()) {
        prop_assert!((apply(&u, &q).norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn group_law(t in angle(), p in angle()) {
        let lhs = compose(&rotation(t).unwrap(), &rotation(p).unwrap());
        prop_assert!(lhs.max_deviation(&rotation(t + p).unwrap()) <= 1e-12);
        prop_assert!(commutator_norm(&rotation(t).unwrap(), &rotation(p).unwrap()) <= 1e-12);
    }

    #[test]
    fn adjoint_inverts(u in unitary(), q in qubit()) {
        let back = apply(&u.adjoint(), &apply(&u, &q));
        prop_assert!(fidelity(&back, &q) >= 1.0 - 1e-12);
    }

    #[test]
    fn three_stage_round_trip(t in angle(), p in angle(), x in qubit()) {
        let pair = OrthogonalPair::computational();
        let ub = SecretTransform::rotation(p).unwrap();
        let mut a = PartyState::alice(SecretTransform::rotation(t).unwrap(), pair);
        let mut b = PartyState::bob(ub, pair);
        let m1 = alice_stage1(&x, 0, 0, &mut a).unwrap();
        let m2 = bob_stage2(&m1, &mut b).unwrap();
        let m3 = alice_stage3(&m2, &mut a).unwrap();
        prop_assert!(fidelity(&m3.payload, &ub.unitary().apply(&x)) >= 1.0 - 1e-12);
        let out = bob_stage4(&m3, &mut b).unwrap();
        prop_assert!(fidelity(&out, &x) >= 1.0 - 1e-12);
    }

    #[test]
    fn keydist_agrees(t in angle(), p in angle(), x in qubit()) {
        let pair = OrthogonalPair::hadamard();
        let a = PartyState::alice(SecretTransform::rotation(t).unwrap(), pair);
        let b = PartyState::bob(SecretTransform::rotation(p).unwrap(), pair);
        prop_assert!(keydist_round(&x, &a, &b).unwrap().agreement_fidelity >= 1.0 - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Setup fails exactly when the commutator exceeds the tolerance.
    #[test]
    fn non_commuting_rejection(t in angle(), u in unitary(), use_rotation in any::<bool>()) {
        let bob = if use_rotation { SecretTransform::rotation(t).unwrap() } else { SecretTransform::general(u) };
        let alice = SecretTransform::rotation(t * 0.5).unwrap();
        let cfg = SessionConfig {
            session_id: 0,
            frame: FrameSpec::new(4, 4, vec![]).unwrap(),
            pair: PairChoice::Computational,
            transforms: TransformPolicy::Fixed { alice, bob },
        };
        let norm = commutator_norm(alice.unitary(), bob.unitary());
        let res = run_three_stage(&[0, 1, 1, 0], &cfg, &AdversaryStrategy::Passthrough, &mut RngStream::from_seed(0));
        prop_assert_eq!(matches!(res, Err(Error::NonCommutingTransforms { .. })), norm > 1e-9);
    }
}

#[test]
fn passthrough_matches_channel_free_pipeline() {
    let frame = FrameSpec::new(32, 8, vec![1, 1, 0, 1]).unwrap();
    let cfg = SessionConfig {
        session_id: 5,
        frame: frame.clone(),
        pair: PairChoice::General {
            alpha: 0.6,
            beta: 0.8,
        },
        transforms: TransformPolicy::PerBitRandom,
    };
    let mut rng = RngStream::from_seed(123);
    let data = rng.bits(32);
    let mut twin = rng.clone();
    let t = run_three_stage(&data, &cfg, &AdversaryStrategy::Passthrough, &mut rng).unwrap();

    // Same stream, no channel at all.
    let pair = OrthogonalPair::general(0.6, 0.8).unwrap();
    let framed = threestage::build_frame(&data, &frame).unwrap();
    let mut messages = Vec::new();
    let mut decoded = Vec::new();
    let mut a = PartyState::alice(SecretTransform::identity(), pair);
    let mut b = PartyState::bob(SecretTransform::identity(), pair);
    for (i, &bit) in framed.iter().enumerate() {
        a.rekey(SecretTransform::rotation(twin.angle()).unwrap());
        b.rekey(SecretTransform::rotation(twin.angle()).unwrap());
        let m1 = alice_stage1(&encode_bit(bit, &pair), 5, i, &mut a).unwrap();
        let m2 = bob_stage2(&m1, &mut b).unwrap();
        let m3 = alice_stage3(&m2, &mut a).unwrap();
        let out = bob_stage4(&m3, &mut b).unwrap();
        messages.extend([m1, m2, m3]);
        decoded.push(decode_bit(&out, &pair, &mut twin));
    }
    assert_eq!(t.messages, messages);
    assert_eq!(t.decoded, decoded);
    assert_eq!(t.verdict, verify_frame(&decoded, &frame).unwrap());
    assert_eq!(t.status, SessionStatus::Delivered);
    assert!(t.observations.is_empty());
    assert_eq!(rng.uniform().to_bits(), twin.uniform().to_bits());
}

#[test]
fn report_independent_of_thread_count() {
    let cfg = ExperimentConfig::three_stage(40, 64, 31, 8, 8)
        .unwrap()
        .with_strategy(AdversaryStrategy::intercept_resend(
            EveBasis::Fixed(OrthogonalPair::hadamard()),
            StageSet::new(&[1, 2]).unwrap(),
        ));
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                serialize_report(
                    &run_experiment(&cfg).unwrap().without_wall_time(),
                    ReportFormat::Json,
                )
            })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn different_seeds_different_reports() {
    let a = ExperimentConfig::three_stage(64, 20, 1, 8, 8)
        .unwrap()
        .with_strategy(AdversaryStrategy::intercept_resend(
            EveBasis::HaarRandom,
            StageSet::single(1).unwrap(),
        ));
    let mut b = a.clone();
    b.seed = 2;
    let ra = run_experiment(&a).unwrap();
    let rb = run_experiment(&b).unwrap();
    assert_ne!(ra.stage(1).unwrap().counts, rb.stage(1).unwrap().counts);
}

#[test]
fn random_frame_acceptance_rate() {
    // m = 4, b = 4, n = 8: acceptance probability 2^-6.
    let spec = FrameSpec::new(8, 4, vec![1, 0, 1, 0]).unwrap();
    let mut rng = RngStream::from_seed(64);
    let n = 100_000;
    let acc = (0..n)
        .filter(|_| {
            verify_frame(&rng.bits(spec.frame_length()), &spec)
                .unwrap()
                .accepted
        })
        .count() as f64;
    let p = 1.0 / 64.0;
    assert_eq!(spec.random_acceptance_probability(), p);
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    assert!((acc - n as f64 * p).abs() <= 3.0 * sigma, "{acc}");
}

#[test]
fn known_state_qubit_is_a_pair_state() {
    assert_eq!(
        encode_bit(0, &OrthogonalPair::computational()),
        Qubit::zero()
    );
}
