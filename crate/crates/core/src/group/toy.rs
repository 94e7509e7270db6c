use rand_core::{CryptoRng, RngCore};

use super::{Group, GroupKind};
use crate::error::{Error, Result};

/// Largest subgroup order for which the exhaustive discrete log is allowed.
pub const MAX_TOY_ORDER: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToyScalar(u64);

impl ToyScalar {
    pub fn value(self) -> u64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToyElement(u64);

impl ToyElement {
    pub fn value(self) -> u64 {
        self.0
    }
}

/// Order-`q` subgroup of `Z_p^*` generated by `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyGroup {
    p: u64,
    q: u64,
    g: u64,
    scalar_len: usize,
    element_len: usize,
}

impl Default for ToyGroup {
    fn default() -> Self {
        Self::new(23, 11, 2).expect("default toy parameters are valid")
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn byte_width(max: u64) -> usize {
    let bits = 64 - max.leading_zeros() as usize;
    bits.div_ceil(8).max(1)
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

impl ToyGroup {
    /// Validates `p`, `q`, `g` and builds the group.
    ///
    /// Requires `p < 2^32` (products fit in a `u64`), `q | p - 1`, both
    /// prime, `q <= 2^20`, and `g` of exact order `q`.
    pub fn new(p: u64, q: u64, g: u64) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if p >= 1 << 32 {
            return bad("p must be below 2^32");
        }
        if !is_prime(p) {
            return bad("p is not prime");
        }
        if !is_prime(q) {
            return bad("q is not prime");
        }
        if q > MAX_TOY_ORDER {
            return bad("q exceeds 2^20, too large for exhaustive search");
        }
        if !(p - 1).is_multiple_of(q) {
            return bad("q does not divide p - 1");
        }
        if g <= 1 || g >= p {
            return bad("g must lie in [2, p)");
        }
        if pow_mod(g, q, p) != 1 {
            return bad("g does not have order q");
        }
        Ok(Self {
            p,
            q,
            g,
            scalar_len: byte_width(q - 1),
            element_len: byte_width(p - 1),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn g(&self) -> u64 {
        self.g
    }

    /// Reduces an arbitrary integer into a scalar.
    pub fn scalar(&self, v: u64) -> ToyScalar {
        ToyScalar(v % self.q)
    }

    /// Builds an element from its residue, checking subgroup membership.
    pub fn element(&self, v: u64) -> Result<ToyElement> {
        if v == 0 || v >= self.p || pow_mod(v, self.q, self.p) != 1 {
            return Err(Error::NotInSubgroup);
        }
        Ok(ToyElement(v))
    }

    /// All scalars `0..q`.
    pub fn scalars(&self) -> impl Iterator<Item = ToyScalar> {
        (0..self.q).map(ToyScalar)
    }
}

impl Group for ToyGroup {
    type Scalar = ToyScalar;
    type Element = ToyElement;

    fn kind(&self) -> GroupKind {
        GroupKind::Toy
    }

    fn generator(&self) -> ToyElement {
        ToyElement(self.g)
    }

    fn identity(&self) -> ToyElement {
        ToyElement(1)
    }

    fn mul(&self, a: &ToyElement, b: &ToyElement) -> ToyElement {
        ToyElement(a.0 * b.0 % self.p)
    }

    fn exp(&self, base: &ToyElement, s: &ToyScalar) -> ToyElement {
        ToyElement(pow_mod(base.0, s.0, self.p))
    }

    fn scalar_from_u64(&self, v: u64) -> ToyScalar {
        self.scalar(v)
    }

    fn scalar_add(&self, a: &ToyScalar, b: &ToyScalar) -> ToyScalar {
        ToyScalar((a.0 + b.0) % self.q)
    }

    fn scalar_mul(&self, a: &ToyScalar, b: &ToyScalar) -> ToyScalar {
        ToyScalar(a.0 * b.0 % self.q)
    }

    fn scalar_neg(&self, a: &ToyScalar) -> ToyScalar {
        ToyScalar((self.q - a.0) % self.q)
    }

    fn scalar_random<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> Result<ToyScalar> {
        // rejection sampling keeps the draw exactly uniform
        let zone = u64::MAX - (u64::MAX % self.q);
        loop {
            let mut buf = [0u8; 8];
            rng.try_fill_bytes(&mut buf)
                .map_err(|e| Error::Rng(e.to_string()))?;
            let v = u64::from_be_bytes(buf);
            if v < zone {
                return Ok(ToyScalar(v % self.q));
            }
        }
    }

    fn scalar_from_wide_bytes(&self, bytes: &[u8]) -> ToyScalar {
        let v = bytes
            .iter()
            .fold(0u64, |acc, b| ((acc << 8) | u64::from(*b)) % self.q);
        ToyScalar(v)
    }

    fn scalar_len(&self) -> usize {
        self.scalar_len
    }

    fn element_len(&self) -> usize {
        self.element_len
    }

    fn encode_scalar(&self, s: &ToyScalar) -> Vec<u8> {
        s.0.to_be_bytes()[8 - self.scalar_len..].to_vec()
    }

    fn decode_scalar(&self, bytes: &[u8]) -> Result<ToyScalar> {
        let v = be_value(bytes, self.scalar_len)?;
        if v >= self.q {
            return Err(Error::Encoding("scalar not reduced mod q".into()));
        }
        Ok(ToyScalar(v))
    }

    fn encode_element(&self, e: &ToyElement) -> Vec<u8> {
        e.0.to_be_bytes()[8 - self.element_len..].to_vec()
    }

    fn decode_element(&self, bytes: &[u8]) -> Result<ToyElement> {
        let v = be_value(bytes, self.element_len)?;
        self.element(v)
    }

    fn dlog(&self, h: &ToyElement) -> Result<ToyScalar> {
        let mut acc = 1u64;
        for s in 0..self.q {
            if acc == h.0 {
                return Ok(ToyScalar(s));
            }
            acc = acc * self.g % self.p;
        }
        Err(Error::DlogNotFound)
    }
}

fn be_value(bytes: &[u8], width: usize) -> Result<u64> {
    if bytes.len() != width {
        return Err(Error::Encoding(format!(
            "expected {width} bytes, got {}",
            bytes.len()
        )));
    }
    Ok(bytes.iter().fold(0u64, |acc, b| (acc << 8) | u64::from(*b)))
}
