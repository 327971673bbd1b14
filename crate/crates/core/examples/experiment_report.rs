//! A full seeded experiment written out in both report formats.

use threestage::channel::{EveBasis, StageSet};
use threestage::{
    run_experiment, serialize_report, AdversaryStrategy, ExperimentConfig, PairChoice, ReportFormat,
};

fn main() -> threestage::Result<()> {
    let cfg = ExperimentConfig::three_stage(64, 100, 42, 32, 8)?
        .with_pair(PairChoice::Hadamard)
        .with_strategy(AdversaryStrategy::intercept_resend(
            EveBasis::HaarRandom,
            StageSet::new(&[1, 2, 3])?,
        ));
    let r = run_experiment(&cfg)?;
    println!(
        "{}",
        String::from_utf8_lossy(&serialize_report(&r, ReportFormat::Csv))
    );
    let json = serialize_report(&r, ReportFormat::Json);
    println!("json report: {} bytes", json.len());
    Ok(())
}
