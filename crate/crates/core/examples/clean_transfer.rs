//! One framed transfer from Alice to Bob over an honest channel, with a
//! look at the first bit's three messages.

use threestage::{
    fidelity, run_three_stage, AdversaryStrategy, FrameSpec, PairChoice, RngStream, SessionConfig,
    TransformPolicy,
};

fn main() -> threestage::Result<()> {
    let mut rng = RngStream::from_seed(2024);
    let known = rng.bits(16);
    let cfg = SessionConfig {
        session_id: 1,
        frame: FrameSpec::new(32, 8, known)?,
        pair: PairChoice::General {
            alpha: 0.6,
            beta: 0.8,
        },
        transforms: TransformPolicy::PerBitRandom,
    };
    let data = rng.bits(32);
    let t = run_three_stage(&data, &cfg, &AdversaryStrategy::Passthrough, &mut rng)?;

    println!("sent     {:?}", data);
    println!("received {:?}", t.decoded_data());
    println!("status   {:?}, verdict {:?}", t.status, t.verdict);
    for m in &t.messages[..3] {
        println!(
            "  bit {} stage {} payload {:?}",
            m.bit_index, m.stage, m.payload
        );
    }
    let worst = t.recovered_fidelity.iter().copied().fold(1.0, f64::min);
    println!("worst recovered fidelity {worst:.15}");

    let stage3 = t.messages[2].payload;
    let stage1 = t.messages[0].payload;
    println!(
        "overlap of stage-1 and stage-3 payloads: {:.4}",
        fidelity(&stage1, &stage3)
    );
    Ok(())
}
