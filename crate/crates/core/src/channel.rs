//! The public channel between Alice and Bob, and what an eavesdropper on it
//! can do.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::encoding::OrthogonalPair;
use crate::error::{Error, Result};
use crate::protocol::StageMessage;
use crate::qubit::{measure, random_qubit};
use crate::rng::RngStream;

/// A non-empty subset of the three hops `{1, 2, 3}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct StageSet(u8);

impl StageSet {
    pub fn new(stages: &[u8]) -> Result<Self> {
        let mut mask = 0u8;
        for &s in stages {
            if !(1..=3).contains(&s) {
                return Err(Error::InvalidConfig(format!(
                    "stage {s} is not one of 1, 2, 3"
                )));
            }
            mask |= 1 << (s - 1);
        }
        if mask == 0 {
            return Err(Error::InvalidConfig("adversary stage set is empty".into()));
        }
        Ok(Self(mask))
    }

    pub fn single(stage: u8) -> Result<Self> {
        Self::new(&[stage])
    }

    pub fn contains(&self, stage: u8) -> bool {
        (1..=3).contains(&stage) && self.0 & (1 << (stage - 1)) != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=3).filter(|&s| self.contains(s))
    }

    /// Parses `"1,3"`-style lists.
    pub fn parse(list: &str) -> Result<Self> {
        let stages = list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u8>()
                    .map_err(|_| Error::InvalidConfig(format!("bad stage list {list:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&stages)
    }
}

impl fmt::Debug for StageSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl TryFrom<Vec<u8>> for StageSet {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(&v)
    }
}

impl From<StageSet> for Vec<u8> {
    fn from(s: StageSet) -> Self {
        s.iter().collect()
    }
}

/// The basis Eve measures in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveBasis {
    Fixed(OrthogonalPair),
    /// A fresh Haar-random basis for every interception.
    HaarRandom,
}

impl EveBasis {
    fn draw(&self, rng: &mut RngStream) -> OrthogonalPair {
        match self {
            EveBasis::Fixed(pair) => *pair,
            EveBasis::HaarRandom => OrthogonalPair::around(random_qubit(rng)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AdversaryStrategy {
    Passthrough,
    /// Measure targeted hops and forward the collapsed state.
    InterceptResend {
        basis: EveBasis,
        stages: StageSet,
    },
    /// Replace targeted hops with Haar-random states. Records nothing.
    Substitute {
        stages: StageSet,
    },
}

impl AdversaryStrategy {
    pub fn intercept_resend(basis: EveBasis, stages: StageSet) -> Self {
        AdversaryStrategy::InterceptResend { basis, stages }
    }

    pub fn substitute(stages: StageSet) -> Self {
        AdversaryStrategy::Substitute { stages }
    }

    pub fn stages(&self) -> Option<StageSet> {
        match self {
            AdversaryStrategy::Passthrough => None,
            AdversaryStrategy::InterceptResend { stages, .. }
            | AdversaryStrategy::Substitute { stages } => Some(*stages),
        }
    }
}

/// What Eve learned from one intercepted hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveObservation {
    pub bit_index: usize,
    pub stage: u8,
    pub outcome: u8,
    pub basis: OrthogonalPair,
}

/// Moves one message across the channel.
///
/// Passthrough and untargeted hops draw nothing from `rng`, so an idle
/// adversary leaves the session's random stream untouched.
pub fn transmit(
    msg: StageMessage,
    strategy: &AdversaryStrategy,
    rng: &mut RngStream,
) -> (StageMessage, Option<EveObservation>) {
    match strategy {
        AdversaryStrategy::Passthrough => (msg, None),
        AdversaryStrategy::InterceptResend { basis, stages } if stages.contains(msg.stage) => {
            let basis = basis.draw(rng);
            let (outcome, collapsed) = measure(&msg.payload, &basis, rng);
            let obs = EveObservation {
                bit_index: msg.bit_index,
                stage: msg.stage,
                outcome,
                basis,
            };
            (
                StageMessage {
                    payload: collapsed,
                    ..msg
                },
                Some(obs),
            )
        }
        AdversaryStrategy::Substitute { stages } if stages.contains(msg.stage) => {
            let fake = random_qubit(rng);
            (
                StageMessage {
                    payload: fake,
                    ..msg
                },
                None,
            )
        }
        _ => (msg, None),
    }
}

/// 2×2 table of (true bit, Eve's outcome) counts, indexed `[truth][outcome]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointCounts(pub [[u64; 2]; 2]);

impl JointCounts {
    pub fn record(&mut self, truth: u8, outcome: u8) {
        self.0[usize::from(truth)][usize::from(outcome)] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn merge(&mut self, other: &JointCounts) {
        for i in 0..2 {
            for j in 0..2 {
                self.0[i][j] += other.0[i][j];
            }
        }
    }

    /// Number of observations with the given true bit.
    pub fn truth_total(&self, truth: u8) -> u64 {
        self.0[usize::from(truth)].iter().sum()
    }
}

/// Tabulates Eve's outcomes on `stage` against the bits she was trying to learn.
pub fn eve_statistics(
    observations: &[EveObservation],
    truths: &[u8],
    stage: u8,
) -> Result<JointCounts> {
    let mut counts = JointCounts::default();
    for obs in observations.iter().filter(|o| o.stage == stage) {
        let truth = *truths
            .get(obs.bit_index)
            .ok_or(Error::MisalignedIndices(obs.bit_index))?;
        counts.record(truth, obs.outcome);
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::encode_bit;
    use crate::qubit::{fidelity, rotation, Qubit};

    fn msg(stage: u8, payload: Qubit) -> StageMessage {
        StageMessage {
            session_id: 0,
            bit_index: 0,
            stage,
            payload,
        }
    }

    fn comp_intercept(stages: &[u8]) -> AdversaryStrategy {
        AdversaryStrategy::intercept_resend(
            EveBasis::Fixed(OrthogonalPair::computational()),
            StageSet::new(stages).unwrap(),
        )
    }

    #[test]
    fn stage_set_validation() {
        assert!(StageSet::new(&[]).is_err());
        assert!(StageSet::new(&[4]).is_err());
        let s = StageSet::parse("1,3").unwrap();
        assert!(s.contains(1) && !s.contains(2) && s.contains(3));
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,3]");
        assert!(serde_json::from_str::<StageSet>("[]").is_err());
    }

    #[test]
    fn passthrough_is_identity_and_draws_nothing() {
        let mut rng = RngStream::from_seed(1);
        let mut twin = rng.clone();
        let m = msg(1, Qubit::plus());
        let (out, obs) = transmit(m, &AdversaryStrategy::Passthrough, &mut rng);
        assert_eq!(out, m);
        assert!(obs.is_none());
        assert_eq!(rng.uniform().to_bits(), twin.uniform().to_bits());
    }

    #[test]
    fn intercept_eigenstate() {
        let mut rng = RngStream::from_seed(2);
        let (out, obs) = transmit(msg(1, Qubit::one()), &comp_intercept(&[1]), &mut rng);
        let obs = obs.unwrap();
        assert_eq!(obs.outcome, 1);
        assert_eq!(obs.stage, 1);
        assert_eq!(out.payload, Qubit::one());
    }

    #[test]
    fn untargeted_stage_passes() {
        let mut rng = RngStream::from_seed(2);
        let m = msg(2, Qubit::plus());
        let (out, obs) = transmit(m, &comp_intercept(&[1, 3]), &mut rng);
        assert_eq!(out, m);
        assert!(obs.is_none());
    }

    #[test]
    fn collapse_lands_on_basis_state() {
        let mut rng = RngStream::from_seed(3);
        let strat =
            AdversaryStrategy::intercept_resend(EveBasis::HaarRandom, StageSet::single(2).unwrap());
        for _ in 0..100 {
            let q = random_qubit(&mut rng);
            let (out, obs) = transmit(msg(2, q), &strat, &mut rng);
            let obs = obs.unwrap();
            assert_eq!(&out.payload, obs.basis.state(obs.outcome));
        }
    }

    #[test]
    fn substitute_replaces_without_observation() {
        let mut rng = RngStream::from_seed(4);
        let m = msg(1, Qubit::zero());
        let (out, obs) = transmit(
            m,
            &AdversaryStrategy::substitute(StageSet::single(1).unwrap()),
            &mut rng,
        );
        assert!(obs.is_none());
        assert!(fidelity(&out.payload, &Qubit::zero()) < 1.0);
    }

    #[test]
    fn intercepting_rotated_state_is_uninformative() {
        // P(outcome 0) = (1/2π)∫cos²θ dθ = 1/2 for bit 0 and ∫sin²θ = 1/2 for bit 1.
        let strat = comp_intercept(&[1]);
        let pair = OrthogonalPair::computational();
        let mut rng = RngStream::from_seed(5);
        let n = 100_000;
        for bit in 0..2u8 {
            let zeros = (0..n)
                .filter(|_| {
                    let theta = rng.angle();
                    let q = rotation(theta).unwrap().apply(&encode_bit(bit, &pair));
                    transmit(msg(1, q), &strat, &mut rng).1.unwrap().outcome == 0
                })
                .count() as f64;
            let sigma = (n as f64 * 0.25).sqrt();
            assert!(
                (zeros - n as f64 / 2.0).abs() < 3.0 * sigma,
                "bit {bit}: {zeros}"
            );
        }
    }

    #[test]
    fn statistics_diagonal_when_correlated() {
        let pair = OrthogonalPair::computational();
        let truths = vec![0, 1, 1, 0, 1];
        let obs: Vec<EveObservation> = truths
            .iter()
            .enumerate()
            .map(|(i, &b)| EveObservation {
                bit_index: i,
                stage: 1,
                outcome: b,
                basis: pair,
            })
            .collect();
        let c = eve_statistics(&obs, &truths, 1).unwrap();
        assert_eq!(c, JointCounts([[2, 0], [0, 3]]));
        assert_eq!(eve_statistics(&obs, &truths, 2).unwrap().total(), 0);
    }

    #[test]
    fn statistics_misaligned() {
        let obs = [EveObservation {
            bit_index: 9,
            stage: 1,
            outcome: 0,
            basis: OrthogonalPair::computational(),
        }];
        assert_eq!(
            eve_statistics(&obs, &[0, 1], 1),
            Err(Error::MisalignedIndices(9))
        );
    }

    #[test]
    fn strategy_serde_round_trip() {
        let s = comp_intercept(&[1, 2]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<AdversaryStrategy>(&j).unwrap(), s);
    }
}
