//! Key Generation Center: system setup and partial private key extraction.

use rand_core::{CryptoRng, RngCore};

use crate::error::Result;
use crate::group::Group;
use crate::hash::h1;
use crate::identity::Identity;
use crate::signature::{ds_keygen, ds_sign, ds_verify, Signature, SignatureKeyPair, VerifyingKey};

/// `msk = (x, sk)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasterKeys<G: Group> {
    pub x: G::Scalar,
    pub signing: SignatureKeyPair<G>,
}

/// `mpk = (y, vk)` with `y = g^x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasterPublicKey<G: Group> {
    pub y: G::Element,
    pub vk: VerifyingKey<G>,
}

/// `D_ID = (R_ID, delta_ID, z_ID)` where `R_ID = g^a` and
/// `z_ID = a + H1(ID || R_ID) x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialPrivateKey<G: Group> {
    pub r: G::Element,
    pub delta: Signature,
    pub z: G::Scalar,
}

/// The byte string the KGC signs: `len(ID) || ID || encode(R_ID)`.
pub fn signed_payload<G: Group>(group: &G, id: &Identity, r: &G::Element) -> Vec<u8> {
    let mut m = id.framed();
    m.extend_from_slice(&group.encode_element(r));
    m
}

pub fn setup<G: Group, R: RngCore + CryptoRng + ?Sized>(
    group: &G,
    rng: &mut R,
) -> Result<(MasterKeys<G>, MasterPublicKey<G>)> {
    let x = group.scalar_random_nonzero(rng)?;
    let signing = ds_keygen(group, rng)?;
    let mpk = MasterPublicKey {
        y: group.exp_g(&x),
        vk: signing.vk.clone(),
    };
    Ok((MasterKeys { x, signing }, mpk))
}

/// Issues `D_ID`. The nonce `a` is drawn from `[1, q)` so `R_ID` is never
/// the identity.
pub fn extract_id_based_key<G: Group, R: RngCore + CryptoRng + ?Sized>(
    group: &G,
    msk: &MasterKeys<G>,
    id: &Identity,
    rng: &mut R,
) -> Result<PartialPrivateKey<G>> {
    let a = group.scalar_random_nonzero(rng)?;
    let r = group.exp_g(&a);
    let h = h1(group, id, &r);
    let z = group.scalar_add(&a, &group.scalar_mul(&h, &msk.x));
    let delta = ds_sign(group, &msk.signing, &signed_payload(group, id, &r), rng)?;
    Ok(PartialPrivateKey { r, delta, z })
}

/// Accepts iff `g^z = R * y^H1(ID || R)` and `delta` verifies under `vk`.
pub fn verify_partial_key<G: Group>(
    group: &G,
    mpk: &MasterPublicKey<G>,
    id: &Identity,
    d: &PartialPrivateKey<G>,
) -> bool {
    let h = h1(group, id, &d.r);
    let schnorr = group.exp_g(&d.z) == group.mul(&d.r, &group.exp(&mpk.y, &h));
    schnorr && ds_verify(group, &mpk.vk, &signed_payload(group, id, &d.r), &d.delta)
}

/// `R_ID * y^H1(ID || R_ID)`, which equals `g^{z_ID}`.
pub fn implied_public<G: Group>(
    group: &G,
    mpk: &MasterPublicKey<G>,
    id: &Identity,
    r: &G::Element,
) -> G::Element {
    group.mul(r, &group.exp(&mpk.y, &h1(group, id, r)))
}
