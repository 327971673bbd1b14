//! What happens if the parties never refresh their transforms: with the
//! identity rotation the stage-1 qubit is the raw encoded state.

use threestage::channel::{EveBasis, StageSet};
use threestage::{run_experiment, AdversaryStrategy, AngleMode, ExperimentConfig, OrthogonalPair};

fn main() -> threestage::Result<()> {
    let eve = AdversaryStrategy::intercept_resend(
        EveBasis::Fixed(OrthogonalPair::computational()),
        StageSet::single(1)?,
    );
    for (label, mode) in [
        (
            "fixed theta=0     ",
            AngleMode::Fixed {
                theta: 0.0,
                phi: 0.0,
            },
        ),
        (
            "fixed theta=0.3   ",
            AngleMode::Fixed {
                theta: 0.3,
                phi: 1.0,
            },
        ),
        ("fresh every bit   ", AngleMode::PerBitRandom),
    ] {
        let cfg = ExperimentConfig::three_stage(64, 500, 5, 0, 8)?
            .with_angles(mode)
            .with_strategy(eve);
        let r = run_experiment(&cfg)?;
        let mi = r.eve_mutual_information().expect("stage 1 observed");
        println!("{label} Eve MI = {:.5} bits ± {:.5}", mi.bits, mi.std_error);
    }
    Ok(())
}
