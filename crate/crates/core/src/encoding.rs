//! Bit encodings and the integrity frame.
//!
//! A classical bit is carried as one of two orthogonal qubit states agreed on
//! in advance. Messages travel as frames laid out as
//!
//! ```text
//! [ data (n bits) | even parity, one bit per block of b data bits | known sequence (m bits) ]
//! ```
//!
//! so that a receiver can notice when transiting qubits were replaced.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::{measure, Qubit, NORM_TOL};
use crate::rng::RngStream;

/// Two orthogonal states encoding bit 0 and bit 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct OrthogonalPair {
    state0: Qubit,
    state1: Qubit,
}

#[derive(Deserialize)]
struct RawPair {
    state0: Qubit,
    state1: Qubit,
}

impl TryFrom<RawPair> for OrthogonalPair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        OrthogonalPair::new(raw.state0, raw.state1)
    }
}

impl OrthogonalPair {
    pub fn new(state0: Qubit, state1: Qubit) -> Result<Self> {
        let overlap = state0.inner(&state1).norm();
        if overlap > NORM_TOL {
            return Err(Error::DegenerateBasis { overlap });
        }
        Ok(Self { state0, state1 })
    }

    /// `{|0⟩, |1⟩}`
    pub fn computational() -> Self {
        Self {
            state0: Qubit::zero(),
            state1: Qubit::one(),
        }
    }

    /// `{|+⟩, |−⟩}`
    pub fn hadamard() -> Self {
        Self {
            state0: Qubit::plus(),
            state1: Qubit::minus(),
        }
    }

    /// `{α|0⟩ + β|1⟩, β|0⟩ − α|1⟩}` for real `α, β` with `α² + β² = 1`.
    pub fn general(alpha: f64, beta: f64) -> Result<Self> {
        let state0 = Qubit::from_real(alpha, beta)?;
        let state1 = Qubit::from_real(beta, -alpha)?;
        Self::new(state0, state1)
    }

    /// The basis `{q, q⊥}` built around an arbitrary state.
    pub fn around(q: Qubit) -> Self {
        Self {
            state0: q,
            state1: q.orthogonal(),
        }
    }

    pub fn state0(&self) -> &Qubit {
        &self.state0
    }

    pub fn state1(&self) -> &Qubit {
        &self.state1
    }

    pub fn state(&self, bit: u8) -> &Qubit {
        if bit == 0 {
            &self.state0
        } else {
            &self.state1
        }
    }
}

/// Named encodings the parties may agree on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PairChoice {
    Computational,
    Hadamard,
    General { alpha: f64, beta: f64 },
}

impl PairChoice {
    pub fn pair(&self) -> Result<OrthogonalPair> {
        match *self {
            PairChoice::Computational => Ok(OrthogonalPair::computational()),
            PairChoice::Hadamard => Ok(OrthogonalPair::hadamard()),
            PairChoice::General { alpha, beta } => OrthogonalPair::general(alpha, beta),
        }
    }
}

/// The catalogue of encodings: computational, Hadamard, and a sample
/// real general pair `(α, β) = (0.6, 0.8)`. Other general pairs come from
/// [`OrthogonalPair::general`].
pub fn standard_pairs() -> Vec<(&'static str, OrthogonalPair)> {
    vec![
        ("computational", OrthogonalPair::computational()),
        ("hadamard", OrthogonalPair::hadamard()),
        (
            "general",
            OrthogonalPair::general(0.6, 0.8).expect("0.36 + 0.64 = 1"),
        ),
    ]
}

pub fn general_pair(alpha: f64, beta: f64) -> Result<OrthogonalPair> {
    OrthogonalPair::general(alpha, beta)
}

pub fn encode_bit(bit: u8, pair: &OrthogonalPair) -> Qubit {
    *pair.state(bit)
}

/// Projective readout in the pair basis.
pub fn decode_bit(q: &Qubit, pair: &OrthogonalPair, rng: &mut RngStream) -> u8 {
    measure(q, pair, rng).0
}

/// Frame layout shared by sender and receiver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFrameSpec")]
pub struct FrameSpec {
    known_sequence: Vec<u8>,
    parity_block_size: usize,
    data_length: usize,
}

#[derive(Deserialize)]
struct RawFrameSpec {
    known_sequence: Vec<u8>,
    parity_block_size: usize,
    data_length: usize,
}

impl TryFrom<RawFrameSpec> for FrameSpec {
    type Error = Error;

    fn try_from(raw: RawFrameSpec) -> Result<Self> {
        FrameSpec::new(raw.data_length, raw.parity_block_size, raw.known_sequence)
    }
}

fn check_bits(bits: &[u8]) -> Result<()> {
    match bits.iter().position(|&b| b > 1) {
        Some(index) => Err(Error::InvalidBit {
            index,
            value: bits[index],
        }),
        None => Ok(()),
    }
}

impl FrameSpec {
    pub const DEFAULT_BLOCK_SIZE: usize = 8;
    pub const DEFAULT_KNOWN_BITS: usize = 32;

    pub fn new(
        data_length: usize,
        parity_block_size: usize,
        known_sequence: Vec<u8>,
    ) -> Result<Self> {
        if data_length == 0 {
            return Err(Error::InvalidFrameSpec(
                "data length must be positive".into(),
            ));
        }
        if parity_block_size == 0 {
            return Err(Error::InvalidFrameSpec(
                "parity block size must be positive".into(),
            ));
        }
        if !data_length.is_multiple_of(parity_block_size) {
            return Err(Error::InvalidFrameSpec(format!(
                "parity block size {parity_block_size} does not divide data length {data_length}"
            )));
        }
        check_bits(&known_sequence)?;
        Ok(Self {
            known_sequence,
            parity_block_size,
            data_length,
        })
    }

    pub fn data_length(&self) -> usize {
        self.data_length
    }

    pub fn parity_block_size(&self) -> usize {
        self.parity_block_size
    }

    pub fn known_sequence(&self) -> &[u8] {
        &self.known_sequence
    }

    pub fn parity_bits(&self) -> usize {
        self.data_length / self.parity_block_size
    }

    /// `n + n/b + m`
    pub fn frame_length(&self) -> usize {
        self.data_length + self.parity_bits() + self.known_sequence.len()
    }

    /// Probability that a uniformly random string of frame length passes
    /// verification: `2^-(m + n/b)`.
    pub fn random_acceptance_probability(&self) -> f64 {
        let checked = (self.known_sequence.len() + self.parity_bits()) as i32;
        2f64.powi(-checked)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameVerdict {
    pub accepted: bool,
    /// Indices of data blocks whose parity bit did not match.
    pub parity_failures: Vec<usize>,
    /// Positions within the known-sequence section that did not match.
    pub sequence_mismatch_positions: Vec<usize>,
}

fn block_parities(data: &[u8], block: usize) -> impl Iterator<Item = u8> + '_ {
    data.chunks(block)
        .map(|c| c.iter().fold(0, |acc, b| acc ^ b))
}

pub fn build_frame(data: &[u8], spec: &FrameSpec) -> Result<Vec<u8>> {
    if data.len() != spec.data_length {
        return Err(Error::LengthMismatch {
            expected: spec.data_length,
            actual: data.len(),
        });
    }
    check_bits(data)?;
    let mut frame = Vec::with_capacity(spec.frame_length());
    frame.extend_from_slice(data);
    frame.extend(block_parities(data, spec.parity_block_size));
    frame.extend_from_slice(&spec.known_sequence);
    Ok(frame)
}

pub fn verify_frame(received: &[u8], spec: &FrameSpec) -> Result<FrameVerdict> {
    if received.len() != spec.frame_length() {
        return Err(Error::LengthMismatch {
            expected: spec.frame_length(),
            actual: received.len(),
        });
    }
    check_bits(received)?;
    let n = spec.data_length;
    let p = spec.parity_bits();
    let (data, rest) = received.split_at(n);
    let (parity, known) = rest.split_at(p);

    let parity_failures: Vec<usize> = block_parities(data, spec.parity_block_size)
        .zip(parity)
        .enumerate()
        .filter(|(_, (want, got))| want != *got)
        .map(|(i, _)| i)
        .collect();
    let sequence_mismatch_positions: Vec<usize> = known
        .iter()
        .zip(&spec.known_sequence)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i)
        .collect();

    Ok(FrameVerdict {
        accepted: parity_failures.is_empty() && sequence_mismatch_positions.is_empty(),
        parity_failures,
        sequence_mismatch_positions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::{fidelity, random_qubit};

    #[test]
    fn catalogue_pairs_are_orthogonal() {
        let pairs = standard_pairs();
        assert_eq!(pairs.len(), 3);
        for (name, p) in &pairs {
            assert!(p.state0().inner(p.state1()).norm() < 1e-15, "{name}");
            assert_eq!(
                fidelity(&encode_bit(0, p), &encode_bit(1, p)),
                0.0,
                "{name}"
            );
        }
    }

    #[test]
    fn general_pair_reduces_to_computational() {
        assert_eq!(general_pair(1.0, 0.0).unwrap().state0(), &Qubit::zero());
        let g = general_pair(1.0, 0.0).unwrap();
        assert!((fidelity(g.state1(), &Qubit::one()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn general_pair_inner_product_vanishes() {
        let g = general_pair(0.6, 0.8).unwrap();
        // 0.6·0.8 − 0.8·0.6
        assert!(g.state0().inner(g.state1()).norm() < 1e-15);
    }

    #[test]
    fn general_pair_rejects_unnormalized() {
        assert!(matches!(
            general_pair(0.6, 0.6),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn degenerate_basis_rejected() {
        assert!(matches!(
            OrthogonalPair::new(Qubit::zero(), Qubit::plus()),
            Err(Error::DegenerateBasis { .. })
        ));
    }

    #[test]
    fn encode_examples() {
        assert_eq!(
            encode_bit(0, &OrthogonalPair::computational()),
            Qubit::zero()
        );
        assert_eq!(encode_bit(1, &OrthogonalPair::hadamard()), Qubit::minus());
    }

    #[test]
    fn decode_of_encoded_is_identity() {
        let mut rng = RngStream::from_seed(0);
        for (_, p) in standard_pairs() {
            for b in 0..2 {
                for _ in 0..200 {
                    assert_eq!(decode_bit(&encode_bit(b, &p), &p, &mut rng), b);
                }
            }
        }
    }

    #[test]
    fn decode_plus_in_computational_is_fair() {
        let mut rng = RngStream::from_seed(21);
        let n = 100_000;
        let comp = OrthogonalPair::computational();
        let zeros = (0..n)
            .filter(|_| decode_bit(&Qubit::plus(), &comp, &mut rng) == 0)
            .count() as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((zeros - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn decode_haar_state_is_fair() {
        let mut rng = RngStream::from_seed(22);
        let n = 100_000;
        let p = OrthogonalPair::general(0.6, 0.8).unwrap();
        let zeros = (0..n)
            .filter(|_| {
                let q = random_qubit(&mut rng);
                decode_bit(&q, &p, &mut rng) == 0
            })
            .count() as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((zeros - n as f64 / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn build_frame_example() {
        let spec = FrameSpec::new(4, 2, vec![0, 1]).unwrap();
        assert_eq!(
            build_frame(&[1, 0, 1, 1], &spec).unwrap(),
            vec![1, 0, 1, 1, 1, 0, 0, 1]
        );
    }

    #[test]
    fn build_frame_zeros() {
        let spec = FrameSpec::new(8, 4, vec![]).unwrap();
        assert_eq!(build_frame(&[0; 8], &spec).unwrap(), vec![0; 10]);
    }

    #[test]
    fn build_frame_length_mismatch() {
        let spec = FrameSpec::new(4, 2, vec![]).unwrap();
        assert_eq!(
            build_frame(&[], &spec),
            Err(Error::LengthMismatch {
                expected: 4,
                actual: 0
            })
        );
    }

    #[test]
    fn frame_spec_rejects_bad_layouts() {
        assert!(FrameSpec::new(0, 1, vec![]).is_err());
        assert!(FrameSpec::new(8, 0, vec![]).is_err());
        assert!(FrameSpec::new(10, 4, vec![]).is_err());
        assert!(matches!(
            FrameSpec::new(8, 4, vec![0, 2]),
            Err(Error::InvalidBit { index: 1, value: 2 })
        ));
    }

    #[test]
    fn verify_rejects_wrong_length() {
        let spec = FrameSpec::new(4, 2, vec![1]).unwrap();
        assert!(matches!(
            verify_frame(&[0; 6], &spec),
            Err(Error::LengthMismatch { expected: 7, .. })
        ));
    }

    #[test]
    fn single_data_flip_hits_one_block() {
        let spec = FrameSpec::new(16, 4, vec![1, 0, 1, 1]).unwrap();
        let data: Vec<u8> = (0..16).map(|i| ((i * 7) % 3 == 0) as u8).collect();
        let frame = build_frame(&data, &spec).unwrap();
        for i in 0..16 {
            let mut f = frame.clone();
            f[i] ^= 1;
            let v = verify_frame(&f, &spec).unwrap();
            assert!(!v.accepted);
            assert_eq!(v.parity_failures, vec![i / 4]);
            assert!(v.sequence_mismatch_positions.is_empty());
        }
    }

    #[test]
    fn known_sequence_flip_reports_position() {
        let spec = FrameSpec::new(8, 4, vec![1, 1, 0, 0, 1]).unwrap();
        let frame = build_frame(&[0, 1, 1, 0, 1, 0, 0, 0], &spec).unwrap();
        for j in 0..5 {
            let mut f = frame.clone();
            f[8 + 2 + j] ^= 1;
            let v = verify_frame(&f, &spec).unwrap();
            assert!(!v.accepted);
            assert!(v.parity_failures.is_empty());
            assert_eq!(v.sequence_mismatch_positions, vec![j]);
        }
    }

    #[test]
    fn random_frames_rarely_pass() {
        let spec = FrameSpec::new(8, 8, vec![0; 32]).unwrap();
        let mut rng = RngStream::from_seed(8);
        let accepted = (0..100_000)
            .filter(|_| {
                let f = rng.bits(spec.frame_length());
                verify_frame(&f, &spec).unwrap().accepted
            })
            .count();
        assert_eq!(accepted, 0);
    }

    #[test]
    fn frame_spec_serde_validates() {
        let bad = r#"{"known_sequence":[],"parity_block_size":3,"data_length":8}"#;
        assert!(serde_json::from_str::<FrameSpec>(bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn spec_and_data() -> impl Strategy<Value = (FrameSpec, Vec<u8>)> {
            (1usize..=4, 1usize..=8, prop::collection::vec(0u8..2, 0..8)).prop_flat_map(
                |(blocks, b, known)| {
                    let spec = FrameSpec::new(blocks * b, b, known).unwrap();
                    let n = spec.data_length();
                    (Just(spec), prop::collection::vec(0u8..2, n))
                },
            )
        }

        proptest! {
            #[test]
            fn round_trip_accepts((spec, data) in spec_and_data()) {
                let frame = build_frame(&data, &spec).unwrap();
                prop_assert_eq!(frame.len(), spec.frame_length());
                prop_assert!(verify_frame(&frame, &spec).unwrap().accepted);
            }

            #[test]
            fn any_single_flip_rejected((spec, data) in spec_and_data(), pos in any::<prop::sample::Index>()) {
                let mut frame = build_frame(&data, &spec).unwrap();
                let i = pos.index(frame.len());
                frame[i] ^= 1;
                prop_assert!(!verify_frame(&frame, &spec).unwrap().accepted);
            }
        }
    }
}
