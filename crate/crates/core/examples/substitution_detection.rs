//! Eve swaps stage-1 qubits for her own. The parity bits and the agreed
//! known sequence catch it; detection improves with the number of checked bits.

use threestage::channel::StageSet;
use threestage::{run_experiment, AdversaryStrategy, ExperimentConfig};

fn main() -> threestage::Result<()> {
    let eve = AdversaryStrategy::substitute(StageSet::single(1)?);
    println!("known bits | parity bits | detection rate | 1 - 2^-(checked)");
    for known in [0, 1, 2, 4, 8, 32] {
        let cfg = ExperimentConfig::three_stage(8, 20_000, 6, known, 8)?.with_strategy(eve);
        let r = run_experiment(&cfg)?;
        let expected = 1.0 - cfg.frame.random_acceptance_probability();
        println!(
            "{known:>10} | {:>11} | {:>14.5} | {expected:.5}",
            cfg.frame.parity_bits(),
            r.detection_rate
        );
    }
    Ok(())
}
