//! Prime-order cyclic groups.
//!
//! Everything above this module is generic over [`Group`]. Two
//! instantiations exist:
//!
//! - [`ToyGroup`]: a small Schnorr subgroup of `Z_p^*` (default `p = 23`,
//!   `q = 11`, `g = 2`). Discrete logs are found by exhaustive search, which
//!   makes it the test bed for exponent identities and brute-force checks.
//! - [`Ristretto255`]: the prime-order ristretto group over Curve25519,
//!   roughly 128-bit security. [`Group::dlog`] refuses to run here.
//!
//! The group law is written multiplicatively (`mul`, `exp`) regardless of
//! the underlying representation.

mod params;
mod ristretto;
mod toy;

pub use params::{GroupKind, GroupParams};
pub use ristretto::Ristretto255;
pub use toy::{ToyElement, ToyGroup, ToyScalar};

use std::fmt::Debug;

use rand_core::{CryptoRng, RngCore};

use crate::error::Result;

/// A cyclic group of prime order `q` together with its scalar field `Z_q`.
///
/// Scalars and elements are plain values; all arithmetic goes through the
/// group object so that runtime-parameterized groups can reduce correctly.
pub trait Group: Clone + Debug + Send + Sync + 'static {
    type Scalar: Copy + Eq + Debug + Send + Sync;
    type Element: Copy + Eq + Debug + Send + Sync;

    fn kind(&self) -> GroupKind;

    fn generator(&self) -> Self::Element;
    fn identity(&self) -> Self::Element;
    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn exp(&self, base: &Self::Element, s: &Self::Scalar) -> Self::Element;

    fn is_identity(&self, e: &Self::Element) -> bool {
        *e == self.identity()
    }

    /// `g^s`.
    fn exp_g(&self, s: &Self::Scalar) -> Self::Element {
        self.exp(&self.generator(), s)
    }

    fn scalar_from_u64(&self, v: u64) -> Self::Scalar;
    fn scalar_add(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_mul(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_neg(&self, a: &Self::Scalar) -> Self::Scalar;

    fn scalar_sub(&self, a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar {
        self.scalar_add(a, &self.scalar_neg(b))
    }

    fn scalar_zero(&self) -> Self::Scalar {
        self.scalar_from_u64(0)
    }

    fn scalar_one(&self) -> Self::Scalar {
        self.scalar_from_u64(1)
    }

    /// Uniform over `[0, q)`.
    fn scalar_random<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Result<Self::Scalar>;

    /// Uniform over `[1, q)`.
    fn scalar_random_nonzero<R: RngCore + CryptoRng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<Self::Scalar> {
        loop {
            let s = self.scalar_random(rng)?;
            if s != self.scalar_zero() {
                return Ok(s);
            }
        }
    }

    /// Interprets `bytes` as a big-endian integer and reduces it mod `q`.
    /// At most 64 bytes are accepted.
    fn scalar_from_wide_bytes(&self, bytes: &[u8]) -> Self::Scalar;

    /// Width in bytes of a canonical scalar encoding.
    fn scalar_len(&self) -> usize;
    /// Width in bytes of a canonical element encoding.
    fn element_len(&self) -> usize;

    /// Fixed-width big-endian encoding of the reduced value.
    fn encode_scalar(&self, s: &Self::Scalar) -> Vec<u8>;
    fn decode_scalar(&self, bytes: &[u8]) -> Result<Self::Scalar>;

    fn encode_element(&self, e: &Self::Element) -> Vec<u8>;
    /// Rejects anything that is not the canonical encoding of an element of
    /// the order-`q` subgroup.
    fn decode_element(&self, bytes: &[u8]) -> Result<Self::Element>;

    /// Returns `s` with `g^s = h`. Only brute-forceable groups implement it.
    fn dlog(&self, _h: &Self::Element) -> Result<Self::Scalar> {
        Err(crate::Error::DlogUnsupported)
    }
}

/// Product of `bases[i]^exps[i]`.
pub fn multi_exp<G: Group>(group: &G, terms: &[(G::Element, G::Scalar)]) -> G::Element {
    terms.iter().fold(group.identity(), |acc, (b, s)| {
        group.mul(&acc, &group.exp(b, s))
    })
}
