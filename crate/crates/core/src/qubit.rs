//! Single-qubit state-vector algebra.
//!
//! States are pairs of complex amplitudes and evolutions are 2×2 unitaries.
//! Constructors validate their invariants and never renormalize; a state that
//! drifts off the unit sphere is a bug and is reported as one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::encoding::OrthogonalPair;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Complex amplitude. Serializes as `[re, im]`.
pub type ComplexAmp = Complex64;

/// Validation tolerance for state norms.
pub const NORM_TOL: f64 = 1e-9;
/// Validation tolerance for `U^dag U = I`.
pub const UNITARY_TOL: f64 = 1e-9;

const ZERO: ComplexAmp = Complex64::new(0.0, 0.0);
const ONE: ComplexAmp = Complex64::new(1.0, 0.0);

fn amp_is_finite(c: ComplexAmp) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

/// A normalized single-qubit pure state `amp0|0⟩ + amp1|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQubit")]
pub struct Qubit {
    amp0: ComplexAmp,
    amp1: ComplexAmp,
}

#[derive(Deserialize)]
struct RawQubit {
    amp0: ComplexAmp,
    amp1: ComplexAmp,
}

impl TryFrom<RawQubit> for Qubit {
    type Error = Error;

    fn try_from(raw: RawQubit) -> Result<Self> {
        Qubit::new(raw.amp0, raw.amp1)
    }
}

impl Qubit {
    /// Builds a state, rejecting anything whose squared norm is further than
    /// [`NORM_TOL`] from one.
    pub fn new(amp0: ComplexAmp, amp1: ComplexAmp) -> Result<Self> {
        if !amp_is_finite(amp0) || !amp_is_finite(amp1) {
            return Err(Error::NonFiniteInput("qubit amplitude"));
        }
        let norm_sq = amp0.norm_sqr() + amp1.norm_sqr();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amp0, amp1 })
    }

    /// Real-amplitude convenience constructor.
    pub fn from_real(a0: f64, a1: f64) -> Result<Self> {
        Self::new(Complex64::new(a0, 0.0), Complex64::new(a1, 0.0))
    }

    pub fn zero() -> Self {
        Self {
            amp0: ONE,
            amp1: ZERO,
        }
    }

    pub fn one() -> Self {
        Self {
            amp0: ZERO,
            amp1: ONE,
        }
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self { amp0: h, amp1: h }
    }

    /// `(|0⟩ − |1⟩)/√2`
    pub fn minus() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self { amp0: h, amp1: -h }
    }

    pub fn amp0(&self) -> ComplexAmp {
        self.amp0
    }

    pub fn amp1(&self) -> ComplexAmp {
        self.amp1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Qubit) -> ComplexAmp {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }

    /// The state orthogonal to `self` with the convention `(a, b) ↦ (−b*, a*)`.
    pub fn orthogonal(&self) -> Qubit {
        Qubit {
            amp0: -self.amp1.conj(),
            amp1: self.amp0.conj(),
        }
    }
}

/// Same as [`Qubit::new`].
pub fn make_qubit(amp0: ComplexAmp, amp1: ComplexAmp) -> Result<Qubit> {
    Qubit::new(amp0, amp1)
}

/// A 2×2 unitary matrix, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUnitary")]
pub struct Unitary2 {
    m00: ComplexAmp,
    m01: ComplexAmp,
    m10: ComplexAmp,
    m11: ComplexAmp,
}

#[derive(Deserialize)]
struct RawUnitary {
    m00: ComplexAmp,
    m01: ComplexAmp,
    m10: ComplexAmp,
    m11: ComplexAmp,
}

impl TryFrom<RawUnitary> for Unitary2 {
    type Error = Error;

    fn try_from(raw: RawUnitary) -> Result<Self> {
        Unitary2::new([[raw.m00, raw.m01], [raw.m10, raw.m11]])
    }
}

impl Unitary2 {
    /// Validates `U^dag U = I` entrywise within [`UNITARY_TOL`].
    pub fn new(m: [[ComplexAmp; 2]; 2]) -> Result<Self> {
        if m.iter().flatten().any(|c| !amp_is_finite(*c)) {
            return Err(Error::NonFiniteInput("matrix entry"));
        }
        let u = Self::from_rows_unchecked(m);
        let deviation = u.adjoint().compose(&u).max_deviation(&Self::identity());
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    fn from_rows_unchecked(m: [[ComplexAmp; 2]; 2]) -> Self {
        Self {
            m00: m[0][0],
            m01: m[0][1],
            m10: m[1][0],
            m11: m[1][1],
        }
    }

    pub fn identity() -> Self {
        Self::from_rows_unchecked([[ONE, ZERO], [ZERO, ONE]])
    }

    /// Pauli Z, `diag(1, −1)`. Does not commute with non-trivial rotations.
    pub fn pauli_z() -> Self {
        Self::from_rows_unchecked([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// The real rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`.
    pub fn rotation(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFiniteInput("rotation angle"));
        }
        let (s, c) = theta.sin_cos();
        Ok(Self::from_rows_unchecked([
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ]))
    }

    pub fn rows(&self) -> [[ComplexAmp; 2]; 2] {
        [[self.m00, self.m01], [self.m10, self.m11]]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_rows_unchecked([
            [self.m00.conj(), self.m10.conj()],
            [self.m01.conj(), self.m11.conj()],
        ])
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Unitary2) -> Self {
        let a = self.rows();
        let b = other.rows();
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::from_rows_unchecked(out)
    }

    pub fn apply(&self, q: &Qubit) -> Qubit {
        let out = Qubit {
            amp0: self.m00 * q.amp0 + self.m01 * q.amp1,
            amp1: self.m10 * q.amp0 + self.m11 * q.amp1,
        };
        debug_assert!((out.norm_sqr() - 1.0).abs() <= NORM_TOL);
        out
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_deviation(&self, other: &Unitary2) -> f64 {
        let a = self.rows();
        let b = other.rows();
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius norm of `self − other`.
    pub fn frobenius_distance(&self, other: &Unitary2) -> f64 {
        let a = self.rows();
        let b = other.rows();
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub fn rotation(theta: f64) -> Result<Unitary2> {
    Unitary2::rotation(theta)
}

pub fn apply(u: &Unitary2, q: &Qubit) -> Qubit {
    u.apply(q)
}

pub fn adjoint(u: &Unitary2) -> Unitary2 {
    u.adjoint()
}

pub fn compose(u: &Unitary2, v: &Unitary2) -> Unitary2 {
    u.compose(v)
}

/// Frobenius norm of `uv − vu`. Zero exactly when the pair can be used as
/// the two parties' secret transforms.
pub fn commutator_norm(u: &Unitary2, v: &Unitary2) -> f64 {
    u.compose(v).frobenius_distance(&v.compose(u))
}

/// A party's secret transform, remembering the rotation angle when it has one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTransform")]
pub struct SecretTransform {
    unitary: Unitary2,
    angle: Option<f64>,
}

#[derive(Deserialize)]
struct RawTransform {
    unitary: Unitary2,
    angle: Option<f64>,
}

impl TryFrom<RawTransform> for SecretTransform {
    type Error = Error;

    fn try_from(raw: RawTransform) -> Result<Self> {
        match raw.angle {
            Some(theta) => {
                let t = SecretTransform::rotation(theta)?;
                let deviation = t.unitary.max_deviation(&raw.unitary);
                if deviation > UNITARY_TOL {
                    return Err(Error::NotUnitary { deviation });
                }
                Ok(Self {
                    unitary: raw.unitary,
                    angle: raw.angle,
                })
            }
            None => Ok(SecretTransform::general(raw.unitary)),
        }
    }
}

impl SecretTransform {
    pub fn rotation(theta: f64) -> Result<Self> {
        Ok(Self {
            unitary: Unitary2::rotation(theta)?,
            angle: Some(theta),
        })
    }

    /// Any unitary; the session setup decides whether it commutes with the
    /// other party's choice.
    pub fn general(unitary: Unitary2) -> Self {
        Self {
            unitary,
            angle: None,
        }
    }

    pub fn identity() -> Self {
        Self {
            unitary: Unitary2::identity(),
            angle: Some(0.0),
        }
    }

    pub fn unitary(&self) -> &Unitary2 {
        &self.unitary
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }
}

/// Projective measurement of `q` in `basis`.
///
/// Returns bit `b` with probability `|⟨basis_b|q⟩|²` together with the
/// collapsed state `basis_b`. Draws exactly one uniform variate.
pub fn measure(q: &Qubit, basis: &OrthogonalPair, rng: &mut RngStream) -> (u8, Qubit) {
    let p0 = fidelity(basis.state0(), q);
    if rng.uniform() < p0 {
        (0, *basis.state0())
    } else {
        (1, *basis.state1())
    }
}

/// `|⟨a|b⟩|²`, clamped into `[0, 1]`.
pub fn fidelity(a: &Qubit, b: &Qubit) -> f64 {
    a.inner(b).norm_sqr().clamp(0.0, 1.0)
}

/// Haar-uniform pure state: two independent standard complex Gaussians,
/// normalized. Draws four normal variates.
pub fn random_qubit(rng: &mut RngStream) -> Qubit {
    loop {
        let a = Complex64::new(rng.gaussian(), rng.gaussian());
        let b = Complex64::new(rng.gaussian(), rng.gaussian());
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        // Probability zero, but a zero vector has no direction.
        if norm > 1e-150 {
            return Qubit {
                amp0: a / norm,
                amp1: b / norm,
            };
        }
    }
}
