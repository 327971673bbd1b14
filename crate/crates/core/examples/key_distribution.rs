//! Two-stage key distribution on a public state and on an authority-issued
//! state. Both parties end up holding the same unmeasured qubit.

use threestage::{
    authority_issue, keydist_round, run_experiment, ExperimentConfig, OrthogonalPair, PartyState,
    ProtocolKind, Qubit, RngStream, SecretTransform,
};

fn main() -> threestage::Result<()> {
    let pair = OrthogonalPair::computational();
    let alice = PartyState::alice(SecretTransform::rotation(0.4)?, pair);
    let bob = PartyState::bob(SecretTransform::rotation(1.1)?, pair);

    let out = keydist_round(&Qubit::zero(), &alice, &bob)?;
    println!("public |0>:  alice {:?}", out.alice_state);
    println!("             bob   {:?}", out.bob_state);
    println!("             agreement {:.15}", out.agreement_fidelity);

    let (x, _) = authority_issue(&mut RngStream::from_seed(9));
    let out = keydist_round(&x, &alice, &bob)?;
    println!("authority X: agreement {:.15}", out.agreement_fidelity);

    for protocol in [ProtocolKind::KeyDist, ProtocolKind::KeyDistAuthority] {
        let cfg = ExperimentConfig::three_stage(100, 10, 3, 0, 4)?.with_protocol(protocol);
        let k = run_experiment(&cfg)?.keydist.expect("key distribution run");
        println!(
            "{protocol:?}: {}/{} rounds agree, min fidelity {:.15}",
            k.agreeing_rounds, k.rounds, k.min_agreement_fidelity
        );
    }
    Ok(())
}
