//! Seeded Monte Carlo experiments over many sessions, and their reports.
//!
//! Trial `i` of a run with seed `s` draws from `RngStream::derive(s, i)` and
//! nothing else, so a report depends only on its config, never on how the
//! trials were scheduled. Aggregates are integer counts and minima, which
//! combine in any order.

use serde::{Deserialize, Serialize};
use std::time::Instant;

use rayon::prelude::*;

use crate::channel::{eve_statistics, AdversaryStrategy, JointCounts};
use crate::encoding::{FrameSpec, PairChoice};
use crate::error::{Error, Result};
use crate::protocol::{
    authority_issue, keydist_round, run_three_stage, KeyDistTranscript, KeySource, PartyState,
    SessionConfig, SessionStatus, SessionTranscript, TransformPolicy,
};
use crate::qubit::SecretTransform;
use crate::rng::RngStream;
use crate::stats::MiEstimate;

/// Stream index reserved for drawing the agreed known sequence.
const KNOWN_SEQUENCE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    ThreeStage,
    KeyDist,
    KeyDistAuthority,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AngleMode {
    PerBitRandom,
    Fixed { theta: f64, phi: f64 },
}

impl AngleMode {
    fn policy(&self) -> Result<TransformPolicy> {
        match *self {
            AngleMode::PerBitRandom => Ok(TransformPolicy::PerBitRandom),
            AngleMode::Fixed { theta, phi } => TransformPolicy::fixed_angles(theta, phi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub protocol: ProtocolKind,
    /// Data bits per session (three-stage) or rounds per trial (key distribution).
    pub n_bits: usize,
    pub trials: u64,
    pub seed: u64,
    pub angle_mode: AngleMode,
    pub pair: PairChoice,
    pub strategy: AdversaryStrategy,
    pub frame: FrameSpec,
}

impl ExperimentConfig {
    /// A three-stage config whose known sequence is drawn from `seed`.
    pub fn three_stage(
        n_bits: usize,
        trials: u64,
        seed: u64,
        known_bits: usize,
        parity_block: usize,
    ) -> Result<Self> {
        Ok(Self {
            protocol: ProtocolKind::ThreeStage,
            n_bits,
            trials,
            seed,
            angle_mode: AngleMode::PerBitRandom,
            pair: PairChoice::Computational,
            strategy: AdversaryStrategy::Passthrough,
            frame: seeded_frame(n_bits, parity_block, known_bits, seed)?,
        })
    }

    pub fn with_protocol(mut self, protocol: ProtocolKind) -> Self {
        self.protocol = protocol;
        self
    }

    pub fn with_angles(mut self, mode: AngleMode) -> Self {
        self.angle_mode = mode;
        self
    }

    pub fn with_pair(mut self, pair: PairChoice) -> Self {
        self.pair = pair;
        self
    }

    pub fn with_strategy(mut self, strategy: AdversaryStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.n_bits == 0 {
            return Err(Error::InvalidConfig("bit count must be at least 1".into()));
        }
        self.pair.pair()?;
        self.angle_mode.policy()?;
        match self.protocol {
            ProtocolKind::ThreeStage => {
                if self.frame.data_length() != self.n_bits {
                    return Err(Error::InvalidConfig(format!(
                        "frame data length {} does not match bit count {}",
                        self.frame.data_length(),
                        self.n_bits
                    )));
                }
            }
            ProtocolKind::KeyDist | ProtocolKind::KeyDistAuthority => {
                if self.strategy != AdversaryStrategy::Passthrough {
                    return Err(Error::InvalidConfig(
                        "adversaries are only modelled for the three-stage protocol".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Frame layout with a known sequence of `known_bits` drawn from `seed`.
pub fn seeded_frame(
    n_bits: usize,
    parity_block: usize,
    known_bits: usize,
    seed: u64,
) -> Result<FrameSpec> {
    let known = RngStream::derive(seed, KNOWN_SEQUENCE_STREAM).bits(known_bits);
    FrameSpec::new(n_bits, parity_block, known)
}

/// What Eve learned on one hop, over all trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageInformation {
    pub stage: u8,
    pub counts: JointCounts,
    /// `P(Eve outcome 0 | true bit b)` for `b = 0, 1`; `None` if no such bits.
    pub p_outcome0_given_bit: [Option<f64>; 2],
    pub mutual_information: Option<MiEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyDistSummary {
    pub rounds: u64,
    /// Rounds with agreement fidelity at least `1 − 1e-12`.
    pub agreeing_rounds: u64,
    pub min_agreement_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub sessions: u64,
    pub delivered: u64,
    pub rejected: u64,
    pub detection_rate: f64,
    pub data_bits: u64,
    pub bit_errors: u64,
    pub bit_error_rate: f64,
    pub min_recovered_fidelity: Option<f64>,
    pub eve: Vec<StageInformation>,
    pub keydist: Option<KeyDistSummary>,
    pub wall_time_ms: f64,
}

impl ExperimentReport {
    /// MI estimate for the first hop Eve acted on, if she observed anything.
    pub fn eve_mutual_information(&self) -> Option<MiEstimate> {
        self.eve.first().and_then(|s| s.mutual_information)
    }

    pub fn stage(&self, stage: u8) -> Option<&StageInformation> {
        self.eve.iter().find(|s| s.stage == stage)
    }

    /// The report with wall time zeroed, for reproducibility comparisons.
    pub fn without_wall_time(&self) -> Self {
        Self {
            wall_time_ms: 0.0,
            ..self.clone()
        }
    }
}

/// Agreement threshold used for key-distribution summaries.
pub const AGREEMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Default)]
struct TrialTally {
    sessions: u64,
    delivered: u64,
    data_bits: u64,
    bit_errors: u64,
    min_fidelity: Option<f64>,
    eve: [JointCounts; 3],
    rounds: u64,
    agreeing: u64,
    min_agreement: Option<f64>,
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl TrialTally {
    fn merge(mut self, other: TrialTally) -> TrialTally {
        self.sessions += other.sessions;
        self.delivered += other.delivered;
        self.data_bits += other.data_bits;
        self.bit_errors += other.bit_errors;
        self.min_fidelity = min_opt(self.min_fidelity, other.min_fidelity);
        for (a, b) in self.eve.iter_mut().zip(&other.eve) {
            a.merge(b);
        }
        self.rounds += other.rounds;
        self.agreeing += other.agreeing;
        self.min_agreement = min_opt(self.min_agreement, other.min_agreement);
        self
    }
}

/// One trial's raw output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Transcript {
    ThreeStage(Box<SessionTranscript>),
    KeyDist { rounds: Vec<KeyDistTranscript> },
}

fn run_trial(cfg: &ExperimentConfig, trial: u64) -> Result<(TrialTally, Transcript)> {
    let mut rng = RngStream::derive(cfg.seed, trial);
    let mut tally = TrialTally::default();
    match cfg.protocol {
        ProtocolKind::ThreeStage => {
            let session = SessionConfig {
                session_id: trial,
                frame: cfg.frame.clone(),
                pair: cfg.pair,
                transforms: cfg.angle_mode.policy()?,
            };
            let data = rng.bits(cfg.n_bits);
            let t = run_three_stage(&data, &session, &cfg.strategy, &mut rng)?;
            tally.sessions = 1;
            tally.delivered = u64::from(t.status == SessionStatus::Delivered);
            tally.data_bits = t.data_bits() as u64;
            tally.bit_errors = t.data_bit_errors() as u64;
            tally.min_fidelity = t.recovered_fidelity.iter().copied().reduce(f64::min);
            for (stage, counts) in (1u8..=3).zip(tally.eve.iter_mut()) {
                *counts = eve_statistics(&t.observations, &t.sent_frame, stage)?;
            }
            Ok((tally, Transcript::ThreeStage(Box::new(t))))
        }
        ProtocolKind::KeyDist | ProtocolKind::KeyDistAuthority => {
            let pair = cfg.pair.pair()?;
            let mut rounds = Vec::with_capacity(cfg.n_bits);
            for r in 0..cfg.n_bits {
                let (alice_t, bob_t) = match cfg.angle_mode {
                    AngleMode::PerBitRandom => (
                        SecretTransform::rotation(rng.angle())?,
                        SecretTransform::rotation(rng.angle())?,
                    ),
                    AngleMode::Fixed { theta, phi } => (
                        SecretTransform::rotation(theta)?,
                        SecretTransform::rotation(phi)?,
                    ),
                };
                let (source, x_alice, x_bob) = if cfg.protocol == ProtocolKind::KeyDistAuthority {
                    let (a, b) = authority_issue(&mut rng);
                    (KeySource::Authority, a, b)
                } else {
                    (KeySource::Public, *pair.state0(), *pair.state0())
                };
                let alice = PartyState::alice(alice_t, pair);
                let bob = PartyState::bob(bob_t, pair);
                // Both copies are the same state, so the round sees one public input.
                debug_assert_eq!(x_alice, x_bob);
                let outcome = keydist_round(&x_alice, &alice, &bob)?;
                tally.rounds += 1;
                tally.agreeing += u64::from(outcome.agreement_fidelity >= 1.0 - AGREEMENT_TOL);
                tally.min_agreement =
                    min_opt(tally.min_agreement, Some(outcome.agreement_fidelity));
                rounds.push(KeyDistTranscript {
                    session_id: trial * cfg.n_bits as u64 + r as u64,
                    source,
                    alice_input: x_alice,
                    bob_input: x_bob,
                    alice_transform: alice_t,
                    bob_transform: bob_t,
                    outcome,
                });
            }
            Ok((tally, Transcript::KeyDist { rounds }))
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn stage_information(stage: u8, counts: JointCounts) -> Result<StageInformation> {
    let cond = |b: u8| {
        let total = counts.truth_total(b);
        (total > 0).then(|| counts.0[usize::from(b)][0] as f64 / total as f64)
    };
    let mutual_information = if counts.total() > 0 {
        Some(MiEstimate::from_counts(&counts)?)
    } else {
        None
    };
    Ok(StageInformation {
        stage,
        counts,
        p_outcome0_given_bit: [cond(0), cond(1)],
        mutual_information,
    })
}

fn execute(
    cfg: &ExperimentConfig,
    keep_transcripts: bool,
) -> Result<(ExperimentReport, Vec<Transcript>)> {
    cfg.validate()?;
    let start = Instant::now();
    let results: Vec<(TrialTally, Option<Transcript>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(cfg, trial).map(|(tally, t)| (tally, keep_transcripts.then_some(t))))
        .collect::<Result<_>>()?;

    let mut transcripts = Vec::new();
    let mut total = TrialTally::default();
    for (tally, t) in results {
        total = total.merge(tally);
        transcripts.extend(t);
    }

    let eve = match cfg.strategy {
        AdversaryStrategy::InterceptResend { stages, .. } => stages
            .iter()
            .map(|s| stage_information(s, total.eve[usize::from(s - 1)]))
            .collect::<Result<Vec<_>>>()?,
        _ => Vec::new(),
    };
    let keydist = (cfg.protocol != ProtocolKind::ThreeStage).then(|| KeyDistSummary {
        rounds: total.rounds,
        agreeing_rounds: total.agreeing,
        min_agreement_fidelity: total.min_agreement.unwrap_or(0.0),
    });
    let rejected = total.sessions - total.delivered;
    let report = ExperimentReport {
        config: cfg.clone(),
        sessions: total.sessions,
        delivered: total.delivered,
        rejected,
        detection_rate: ratio(rejected, total.sessions),
        data_bits: total.data_bits,
        bit_errors: total.bit_errors,
        bit_error_rate: ratio(total.bit_errors, total.data_bits),
        min_recovered_fidelity: total.min_fidelity,
        eve,
        keydist,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((report, transcripts))
}

/// Runs `cfg.trials` independent trials and aggregates them.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    execute(cfg, false).map(|(r, _)| r)
}

/// Like [`run_experiment`], also returning every trial's transcript in trial order.
pub fn run_experiment_with_transcripts(
    cfg: &ExperimentConfig,
) -> Result<(ExperimentReport, Vec<Transcript>)> {
    execute(cfg, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Canonical report document. JSON is lossless and parses back with
/// [`parse_report`]; CSV is a flat summary with one row per observed hop.
pub fn serialize_report(report: &ExperimentReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report is always serializable");
            out.push(b'\n');
            out
        }
        ReportFormat::Csv => report_csv(report),
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<ExperimentReport> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn report_csv(report: &ExperimentReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = [
        "protocol",
        "seed",
        "trials",
        "n_bits",
        "sessions",
        "delivered",
        "rejected",
        "detection_rate",
        "data_bits",
        "bit_errors",
        "bit_error_rate",
        "min_recovered_fidelity",
        "eve_stage",
        "eve_mi_bits",
        "eve_mi_std_error",
        "keydist_rounds",
        "min_agreement_fidelity",
        "wall_time_ms",
    ];
    w.write_record(header).expect("in-memory write");
    let protocol = serde_json::to_value(report.config.protocol).expect("enum serializes");
    let protocol = protocol.as_str().unwrap_or_default().to_string();
    let base = |stage: Option<&StageInformation>| -> Vec<String> {
        let mi = stage.and_then(|s| s.mutual_information);
        vec![
            protocol.clone(),
            report.config.seed.to_string(),
            report.config.trials.to_string(),
            report.config.n_bits.to_string(),
            report.sessions.to_string(),
            report.delivered.to_string(),
            report.rejected.to_string(),
            report.detection_rate.to_string(),
            report.data_bits.to_string(),
            report.bit_errors.to_string(),
            report.bit_error_rate.to_string(),
            fmt_opt(report.min_recovered_fidelity),
            stage.map(|s| s.stage.to_string()).unwrap_or_default(),
            fmt_opt(mi.map(|m| m.bits)),
            fmt_opt(mi.map(|m| m.std_error)),
            report
                .keydist
                .as_ref()
                .map(|k| k.rounds.to_string())
                .unwrap_or_default(),
            fmt_opt(report.keydist.as_ref().map(|k| k.min_agreement_fidelity)),
            report.wall_time_ms.to_string(),
        ]
    };
    if report.eve.is_empty() {
        w.write_record(base(None)).expect("in-memory write");
    }
    for s in &report.eve {
        w.write_record(base(Some(s))).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// One JSON document per line, in trial order.
pub fn serialize_transcripts(transcripts: &[Transcript]) -> Vec<u8> {
    let mut out = Vec::new();
    for t in transcripts {
        serde_json::to_writer(&mut out, t).expect("transcript is always serializable");
        out.push(b'\n');
    }
    out
}

pub fn serialize_transcript(t: &Transcript) -> Vec<u8> {
    serde_json::to_vec(t).expect("transcript is always serializable")
}

pub fn parse_transcript(bytes: &[u8]) -> Result<Transcript> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))
}
