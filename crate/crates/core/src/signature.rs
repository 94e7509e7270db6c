//! Schnorr signatures over the protocol group, used by the KGC to certify
//! `ID || R_ID`.
//!
//! The protocol treats signatures as opaque bytes; only this module knows
//! the layout `encode(R) || encode(s)`.

use rand_core::{CryptoRng, RngCore};

use crate::error::Result;
use crate::group::Group;
use crate::hash::{hash_to_scalar, SIG_TAG};
use crate::identity::put_prefixed;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SigningKey<G: Group>(pub(crate) G::Scalar);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyingKey<G: Group>(pub G::Element);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureKeyPair<G: Group> {
    pub sk: SigningKey<G>,
    pub vk: VerifyingKey<G>,
}

/// Opaque signature bytes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature(pub Vec<u8>);

impl<G: Group> SigningKey<G> {
    pub fn scalar(&self) -> &G::Scalar {
        &self.0
    }
}

fn challenge<G: Group>(
    group: &G,
    vk: &VerifyingKey<G>,
    commit: &G::Element,
    msg: &[u8],
) -> G::Scalar {
    let mut pre = SIG_TAG.to_vec();
    pre.extend_from_slice(&group.encode_element(&vk.0));
    pre.extend_from_slice(&group.encode_element(commit));
    let len = u32::try_from(msg.len()).expect("message below 4 GiB");
    pre.extend_from_slice(&len.to_be_bytes());
    pre.extend_from_slice(msg);
    hash_to_scalar(group, &pre)
}

pub fn ds_keygen<G: Group, R: RngCore + CryptoRng + ?Sized>(
    group: &G,
    rng: &mut R,
) -> Result<SignatureKeyPair<G>> {
    let sk = group.scalar_random_nonzero(rng)?;
    Ok(SignatureKeyPair {
        sk: SigningKey(sk),
        vk: VerifyingKey(group.exp_g(&sk)),
    })
}

pub fn ds_sign<G: Group, R: RngCore + CryptoRng + ?Sized>(
    group: &G,
    keys: &SignatureKeyPair<G>,
    msg: &[u8],
    rng: &mut R,
) -> Result<Signature> {
    let k = group.scalar_random_nonzero(rng)?;
    let commit = group.exp_g(&k);
    let c = challenge(group, &keys.vk, &commit, msg);
    let s = group.scalar_add(&k, &group.scalar_mul(&c, &keys.sk.0));
    let mut out = group.encode_element(&commit);
    out.extend_from_slice(&group.encode_scalar(&s));
    Ok(Signature(out))
}

/// Never errors: anything malformed is simply rejected.
pub fn ds_verify<G: Group>(group: &G, vk: &VerifyingKey<G>, msg: &[u8], sig: &Signature) -> bool {
    let el = group.element_len();
    if sig.0.len() != el + group.scalar_len() {
        return false;
    }
    let (Ok(commit), Ok(s)) = (
        group.decode_element(&sig.0[..el]),
        group.decode_scalar(&sig.0[el..]),
    ) else {
        return false;
    };
    let c = challenge(group, vk, &commit, msg);
    group.exp_g(&s) == group.mul(&commit, &group.exp(&vk.0, &c))
}

impl Signature {
    pub(crate) fn framed_into(&self, out: &mut Vec<u8>) {
        put_prefixed(out, &self.0);
    }
}
