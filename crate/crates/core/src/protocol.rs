//! Alice and Bob's side of the three-stage exchange, and the two-stage key
//! distribution that reuses the same commuting transforms.
//!
//! For one bit `x` with commuting `U_A`, `U_B`:
//!
//! ```text
//! Alice --U_A x-----------> Bob          stage 1
//! Alice <----U_B U_A x----- Bob          stage 2
//! Alice --U_A^dag U_B U_A x = U_B x--> Bob   stage 3
//!                           Bob: U_B^dag U_B x = x
//! ```
//!
//! Neither party ever measures a transiting qubit; only Bob reads the final
//! state out in the agreed basis.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::channel::{transmit, AdversaryStrategy, EveObservation};
use crate::encoding::{
    build_frame, decode_bit, encode_bit, verify_frame, FrameSpec, FrameVerdict, OrthogonalPair,
    PairChoice,
};
use crate::error::{Error, Result};
use crate::qubit::{commutator_norm, fidelity, random_qubit, Qubit, SecretTransform, UNITARY_TOL};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Alice,
    Bob,
}

/// One qubit in flight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageMessage {
    pub session_id: u64,
    pub bit_index: usize,
    pub stage: u8,
    pub payload: Qubit,
}

/// A party's secret transform, agreed encoding and per-bit progress.
#[derive(Debug, Clone)]
pub struct PartyState {
    role: Role,
    transform: SecretTransform,
    pair: OrthogonalPair,
    cursor: BTreeMap<usize, u8>,
}

impl PartyState {
    pub fn new(role: Role, transform: SecretTransform, pair: OrthogonalPair) -> Self {
        Self {
            role,
            transform,
            pair,
            cursor: BTreeMap::new(),
        }
    }

    pub fn alice(transform: SecretTransform, pair: OrthogonalPair) -> Self {
        Self::new(Role::Alice, transform, pair)
    }

    pub fn bob(transform: SecretTransform, pair: OrthogonalPair) -> Self {
        Self::new(Role::Bob, transform, pair)
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn transform(&self) -> &SecretTransform {
        &self.transform
    }

    pub fn pair(&self) -> &OrthogonalPair {
        &self.pair
    }

    /// Swaps in a fresh secret transform. Progress of bits already in flight
    /// is kept, so refresh only between bits.
    pub fn rekey(&mut self, transform: SecretTransform) {
        self.transform = transform;
    }

    /// Last stage this party handled for `bit_index`.
    pub fn stage_of(&self, bit_index: usize) -> Option<u8> {
        self.cursor.get(&bit_index).copied()
    }

    fn expect_role(&self, role: Role) -> Result<()> {
        if self.role == role {
            Ok(())
        } else {
            Err(Error::WrongRole { expected: role })
        }
    }

    /// Checks that `msg` is at `stage` and that this party last touched the
    /// bit at `previous`.
    fn advance(
        &mut self,
        msg_stage: u8,
        bit_index: usize,
        stage: u8,
        previous: Option<u8>,
    ) -> Result<()> {
        if msg_stage != stage || self.stage_of(bit_index) != previous {
            return Err(Error::StageOrderViolation {
                bit_index,
                expected: stage,
                found: msg_stage,
            });
        }
        Ok(())
    }

    fn mark(&mut self, bit_index: usize, stage: u8) {
        self.cursor.insert(bit_index, stage);
    }
}

/// Fails unless the two transforms commute within [`UNITARY_TOL`].
pub fn check_commuting(a: &SecretTransform, b: &SecretTransform) -> Result<()> {
    let norm = commutator_norm(a.unitary(), b.unitary());
    if norm > UNITARY_TOL {
        return Err(Error::NonCommutingTransforms { norm });
    }
    Ok(())
}

/// Stage 1: Alice sends `U_A x`.
pub fn alice_stage1(
    x: &Qubit,
    session_id: u64,
    bit_index: usize,
    alice: &mut PartyState,
) -> Result<StageMessage> {
    alice.expect_role(Role::Alice)?;
    if alice.stage_of(bit_index).is_some() {
        return Err(Error::StageOrderViolation {
            bit_index,
            expected: 1,
            found: alice.stage_of(bit_index).unwrap_or(0),
        });
    }
    alice.mark(bit_index, 1);
    Ok(StageMessage {
        session_id,
        bit_index,
        stage: 1,
        payload: alice.transform.unitary().apply(x),
    })
}

/// Stage 2: Bob applies `U_B` and returns the qubit.
pub fn bob_stage2(msg: &StageMessage, bob: &mut PartyState) -> Result<StageMessage> {
    bob.expect_role(Role::Bob)?;
    bob.advance(msg.stage, msg.bit_index, 1, None)?;
    bob.mark(msg.bit_index, 2);
    Ok(StageMessage {
        stage: 2,
        payload: bob.transform.unitary().apply(&msg.payload),
        ..*msg
    })
}

/// Stage 3: Alice removes `U_A`, leaving `U_B x` on the wire.
pub fn alice_stage3(msg: &StageMessage, alice: &mut PartyState) -> Result<StageMessage> {
    alice.expect_role(Role::Alice)?;
    alice.advance(msg.stage, msg.bit_index, 2, Some(1))?;
    alice.mark(msg.bit_index, 3);
    Ok(StageMessage {
        stage: 3,
        payload: alice.transform.unitary().adjoint().apply(&msg.payload),
        ..*msg
    })
}

/// Bob removes `U_B` and holds the recovered (unmeasured) state.
pub fn bob_stage4(msg: &StageMessage, bob: &mut PartyState) -> Result<Qubit> {
    bob.expect_role(Role::Bob)?;
    bob.advance(msg.stage, msg.bit_index, 3, Some(2))?;
    bob.mark(msg.bit_index, 4);
    Ok(bob.transform.unitary().adjoint().apply(&msg.payload))
}

/// How the parties pick their secret transforms during a session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TransformPolicy {
    /// Fresh independent `R(θ)`, `R(φ)` with `θ, φ ~ U[0, 2π)` for every bit.
    PerBitRandom,
    /// The same pair for every bit. Checked for commutativity at setup.
    Fixed {
        alice: SecretTransform,
        bob: SecretTransform,
    },
}

impl TransformPolicy {
    pub fn fixed_angles(theta: f64, phi: f64) -> Result<Self> {
        Ok(TransformPolicy::Fixed {
            alice: SecretTransform::rotation(theta)?,
            bob: SecretTransform::rotation(phi)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub session_id: u64,
    pub frame: FrameSpec,
    pub pair: PairChoice,
    pub transforms: TransformPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Delivered,
    Rejected,
}

/// Everything that happened in one session, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub config: SessionConfig,
    /// Framed bits Alice sent.
    pub sent_frame: Vec<u8>,
    /// Messages as emitted by their sender, three per framed bit.
    pub messages: Vec<StageMessage>,
    pub observations: Vec<EveObservation>,
    /// Bob's readout of every framed bit.
    pub decoded: Vec<u8>,
    /// Fidelity of Bob's recovered state with the state Alice encoded.
    pub recovered_fidelity: Vec<f64>,
    pub verdict: FrameVerdict,
    pub status: SessionStatus,
}

impl SessionTranscript {
    pub fn data_bits(&self) -> usize {
        self.config.frame.data_length()
    }

    /// Data-section bits Bob decoded differently from what Alice sent.
    pub fn data_bit_errors(&self) -> usize {
        let n = self.data_bits();
        self.sent_frame[..n]
            .iter()
            .zip(&self.decoded[..n])
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn decoded_data(&self) -> &[u8] {
        &self.decoded[..self.data_bits()]
    }
}

/// Runs a full framed transfer of `data` from Alice to Bob through `channel`.
///
/// Per framed bit the stream is consumed as: Alice's and Bob's angles (in
/// random mode), channel draws for hops 1, 2 and 3, then Bob's readout.
pub fn run_three_stage(
    data: &[u8],
    cfg: &SessionConfig,
    channel: &AdversaryStrategy,
    rng: &mut RngStream,
) -> Result<SessionTranscript> {
    let pair = cfg.pair.pair()?;
    let (alice_t, bob_t) = match cfg.transforms {
        TransformPolicy::PerBitRandom => (SecretTransform::identity(), SecretTransform::identity()),
        TransformPolicy::Fixed { alice, bob } => {
            check_commuting(&alice, &bob)?;
            (alice, bob)
        }
    };
    let frame = build_frame(data, &cfg.frame)?;

    let mut alice = PartyState::alice(alice_t, pair);
    let mut bob = PartyState::bob(bob_t, pair);
    let mut messages = Vec::with_capacity(3 * frame.len());
    let mut observations = Vec::new();
    let mut decoded = Vec::with_capacity(frame.len());
    let mut recovered_fidelity = Vec::with_capacity(frame.len());

    for (i, &bit) in frame.iter().enumerate() {
        if cfg.transforms == TransformPolicy::PerBitRandom {
            alice.rekey(SecretTransform::rotation(rng.angle())?);
            bob.rekey(SecretTransform::rotation(rng.angle())?);
        }
        let x = encode_bit(bit, &pair);

        let m1 = alice_stage1(&x, cfg.session_id, i, &mut alice)?;
        messages.push(m1);
        let (m1, obs) = transmit(m1, channel, rng);
        observations.extend(obs);

        let m2 = bob_stage2(&m1, &mut bob)?;
        messages.push(m2);
        let (m2, obs) = transmit(m2, channel, rng);
        observations.extend(obs);

        let m3 = alice_stage3(&m2, &mut alice)?;
        messages.push(m3);
        let (m3, obs) = transmit(m3, channel, rng);
        observations.extend(obs);

        let recovered = bob_stage4(&m3, &mut bob)?;
        recovered_fidelity.push(fidelity(&recovered, &x));
        decoded.push(decode_bit(&recovered, &pair, rng));
    }

    let verdict = verify_frame(&decoded, &cfg.frame)?;
    let status = if verdict.accepted {
        SessionStatus::Delivered
    } else {
        SessionStatus::Rejected
    };
    Ok(SessionTranscript {
        config: cfg.clone(),
        sent_frame: frame,
        messages,
        observations,
        decoded,
        recovered_fidelity,
        verdict,
        status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyDistOutcome {
    pub alice_state: Qubit,
    pub bob_state: Qubit,
    pub agreement_fidelity: f64,
}

/// Two-stage key distribution on a public state `x`.
///
/// Each side sends its transform of `x`, then applies its own transform to
/// what it receives, so both end up holding `U_A U_B x`. Nothing is measured.
pub fn keydist_round(
    x_public: &Qubit,
    alice: &PartyState,
    bob: &PartyState,
) -> Result<KeyDistOutcome> {
    alice.expect_role(Role::Alice)?;
    bob.expect_role(Role::Bob)?;
    check_commuting(alice.transform(), bob.transform())?;
    let ua = alice.transform().unitary();
    let ub = bob.transform().unitary();

    let to_bob = ua.apply(x_public);
    let to_alice = ub.apply(x_public);
    let alice_state = ua.apply(&to_alice);
    let bob_state = ub.apply(&to_bob);
    Ok(KeyDistOutcome {
        alice_state,
        bob_state,
        agreement_fidelity: fidelity(&alice_state, &bob_state),
    })
}

/// A registration authority prepares two copies of one Haar-random state.
pub fn authority_issue(rng: &mut RngStream) -> (Qubit, Qubit) {
    let x = random_qubit(rng);
    (x, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeySource {
    Public,
    Authority,
}

/// One key-distribution round as recorded by the harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyDistTranscript {
    pub session_id: u64,
    pub source: KeySource,
    /// The state each party started from (the two authority copies are equal).
    pub alice_input: Qubit,
    pub bob_input: Qubit,
    pub alice_transform: SecretTransform,
    pub bob_transform: SecretTransform,
    pub outcome: KeyDistOutcome,
}
