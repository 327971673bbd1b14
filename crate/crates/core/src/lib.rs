//! Simulator for the three-stage quantum transfer protocol, where Alice and
//! Bob each apply a private commuting unitary to a qubit that travels
//! Alice → Bob → Alice → Bob, and for the related two-stage key distribution.
//!
//! Everything is a deterministic function of an explicit [`RngStream`], so
//! sessions, adversaries and whole Monte Carlo experiments reproduce exactly
//! from a seed.
//!
//! ```
//! use threestage::{run_three_stage, AdversaryStrategy, FrameSpec, PairChoice,
//!                  RngStream, SessionConfig, SessionStatus, TransformPolicy};
//!
//! let cfg = SessionConfig {
//!     session_id: 0,
//!     frame: FrameSpec::new(16, 8, vec![1, 0, 1, 1]).unwrap(),
//!     pair: PairChoice::Hadamard,
//!     transforms: TransformPolicy::PerBitRandom,
//! };
//! let mut rng = RngStream::from_seed(7);
//! let data = rng.bits(16);
//! let t = run_three_stage(&data, &cfg, &AdversaryStrategy::Passthrough, &mut rng).unwrap();
//! assert_eq!(t.status, SessionStatus::Delivered);
//! assert_eq!(t.decoded_data(), &data[..]);
//! ```

pub mod channel;
pub mod encoding;
pub mod error;
pub mod experiment;
pub mod protocol;
pub mod qubit;
pub mod rng;
pub mod stats;

pub use channel::{
    eve_statistics, transmit, AdversaryStrategy, EveBasis, EveObservation, JointCounts, StageSet,
};
pub use encoding::{
    build_frame, decode_bit, encode_bit, general_pair, standard_pairs, verify_frame, FrameSpec,
    FrameVerdict, OrthogonalPair, PairChoice,
};
pub use error::{Error, Result};
pub use experiment::{
    parse_report, parse_transcript, run_experiment, run_experiment_with_transcripts, seeded_frame,
    serialize_report, serialize_transcript, serialize_transcripts, AngleMode, ExperimentConfig,
    ExperimentReport, ProtocolKind, ReportFormat, Transcript,
};
pub use protocol::{
    alice_stage1, alice_stage3, authority_issue, bob_stage2, bob_stage4, keydist_round,
    run_three_stage, KeyDistOutcome, PartyState, Role, SessionConfig, SessionStatus,
    SessionTranscript, StageMessage, TransformPolicy,
};
pub use qubit::{
    adjoint, apply, commutator_norm, compose, fidelity, make_qubit, measure, random_qubit,
    rotation, ComplexAmp, Qubit, SecretTransform, Unitary2, NORM_TOL, UNITARY_TOL,
};
pub use rng::RngStream;
pub use stats::{mutual_information, MiEstimate};
