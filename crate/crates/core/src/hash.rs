//! The two random-oracle hashes.
//!
//! `H1(ID || R)` maps an identity and its KGC commitment to a scalar;
//! `H2(sid, Z_1, .., Z_n)` derives the 32-byte session key. Every pre-image
//! starts with an 8-byte domain tag, and the tags are pairwise distinct.

use std::fmt;

use sha2::{Digest, Sha256, Sha512};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::identity::{put_prefixed, Identity};

pub const H1_TAG: &[u8; 8] = b"CLKE-H1\0";
pub const H2_TAG: &[u8; 8] = b"CLKE-H2\0";
pub const SIG_TAG: &[u8; 8] = b"CLKE-SG\0";

/// 32-byte session key.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SessionKey(pub [u8; 32]);

impl SessionKey {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl fmt::Display for SessionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for SessionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SessionKey({self})")
    }
}

/// Hash-to-scalar over an already-tagged pre-image: SHA-512, keep the first
/// `2 * scalar_len` bytes, reduce big-endian mod q.
pub(crate) fn hash_to_scalar<G: Group>(group: &G, preimage: &[u8]) -> G::Scalar {
    let wide = 2 * group.scalar_len();
    assert!(wide <= 64, "scalar width above 32 bytes is not supported");
    let digest = Sha512::digest(preimage);
    group.scalar_from_wide_bytes(&digest[..wide])
}

pub fn h1_preimage<G: Group>(group: &G, id: &Identity, r: &G::Element) -> Vec<u8> {
    let mut buf = H1_TAG.to_vec();
    buf.extend_from_slice(&id.framed());
    buf.extend_from_slice(&group.encode_element(r));
    buf
}

pub fn h1<G: Group>(group: &G, id: &Identity, r: &G::Element) -> G::Scalar {
    hash_to_scalar(group, &h1_preimage(group, id, r))
}

/// Variant label bound into H2: `O` for seven values, `I` for nine.
fn variant_label(count: usize) -> Result<u8> {
    match count {
        7 => Ok(b'O'),
        9 => Ok(b'I'),
        n => Err(Error::ZCount(n)),
    }
}

/// `tag || label || count || len32(sid) || sid || (len16(Z_i) || Z_i)*`.
pub fn h2_preimage<G: Group>(group: &G, sid: &[u8], zs: &[G::Element]) -> Result<Vec<u8>> {
    let label = variant_label(zs.len())?;
    let mut buf = H2_TAG.to_vec();
    buf.push(label);
    buf.push(zs.len() as u8);
    let sid_len = u32::try_from(sid.len()).map_err(|_| Error::Encoding("sid too long".into()))?;
    buf.extend_from_slice(&sid_len.to_be_bytes());
    buf.extend_from_slice(sid);
    for z in zs {
        put_prefixed(&mut buf, &group.encode_element(z));
    }
    Ok(buf)
}

pub fn h2<G: Group>(group: &G, sid: &[u8], zs: &[G::Element]) -> Result<SessionKey> {
    let pre = h2_preimage(group, sid, zs)?;
    Ok(SessionKey(Sha256::digest(pre).into()))
}
