use curve25519_dalek::constants::RISTRETTO_BASEPOINT_POINT;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use curve25519_dalek::traits::Identity;
use rand_core::{CryptoRng, RngCore};

use super::{Group, GroupKind};
use crate::error::{Error, Result};

/// The ristretto255 prime-order group.
///
/// Scalars travel big-endian on the wire even though dalek stores them
/// little-endian internally.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Ristretto255;

impl Group for Ristretto255 {
    type Scalar = Scalar;
    type Element = RistrettoPoint;

    fn kind(&self) -> GroupKind {
        GroupKind::Production
    }

    fn generator(&self) -> RistrettoPoint {
        RISTRETTO_BASEPOINT_POINT
    }

    fn identity(&self) -> RistrettoPoint {
        RistrettoPoint::identity()
    }

    fn mul(&self, a: &RistrettoPoint, b: &RistrettoPoint) -> RistrettoPoint {
        a + b
    }

    fn exp(&self, base: &RistrettoPoint, s: &Scalar) -> RistrettoPoint {
        base * s
    }

    fn scalar_from_u64(&self, v: u64) -> Scalar {
        Scalar::from(v)
    }

    fn scalar_add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a + b
    }

    fn scalar_mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }

    fn scalar_neg(&self, a: &Scalar) -> Scalar {
        -a
    }

    fn scalar_random<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Result<Scalar> {
        let mut wide = [0u8; 64];
        rng.try_fill_bytes(&mut wide)
            .map_err(|e| Error::Rng(e.to_string()))?;
        Ok(Scalar::from_bytes_mod_order_wide(&wide))
    }

    fn scalar_from_wide_bytes(&self, bytes: &[u8]) -> Scalar {
        assert!(bytes.len() <= 64, "wide reduction takes at most 64 bytes");
        let mut le = [0u8; 64];
        for (dst, src) in le.iter_mut().zip(bytes.iter().rev()) {
            *dst = *src;
        }
        Scalar::from_bytes_mod_order_wide(&le)
    }

    fn scalar_len(&self) -> usize {
        32
    }

    fn element_len(&self) -> usize {
        32
    }

    fn encode_scalar(&self, s: &Scalar) -> Vec<u8> {
        let mut out = s.to_bytes().to_vec();
        out.reverse();
        out
    }

    fn decode_scalar(&self, bytes: &[u8]) -> Result<Scalar> {
        let mut le: [u8; 32] = bytes
            .try_into()
            .map_err(|_| Error::Encoding(format!("expected 32 bytes, got {}", bytes.len())))?;
        le.reverse();
        Option::from(Scalar::from_canonical_bytes(le))
            .ok_or_else(|| Error::Encoding("scalar not reduced mod q".into()))
    }

    fn encode_element(&self, e: &RistrettoPoint) -> Vec<u8> {
        e.compress().to_bytes().to_vec()
    }

    fn decode_element(&self, bytes: &[u8]) -> Result<RistrettoPoint> {
        let c = CompressedRistretto::from_slice(bytes)
            .map_err(|_| Error::Encoding(format!("expected 32 bytes, got {}", bytes.len())))?;
        c.decompress().ok_or(Error::NotInSubgroup)
    }
}
