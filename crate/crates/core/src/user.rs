//! User-side key material.
//!
//! Note that `delta_ID` certifies only `(ID, R_ID)`. `U_ID` is not bound by
//! anything the KGC signs, so a public key can be replaced wholesale.

use rand_core::{CryptoRng, RngCore};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::identity::Identity;
use crate::kgc::{signed_payload, verify_partial_key, MasterPublicKey, PartialPrivateKey};
use crate::signature::{ds_verify, Signature};

/// `pk_ID = (U_ID, R_ID, delta_ID)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserPublicKey<G: Group> {
    pub u: G::Element,
    pub r: G::Element,
    pub delta: Signature,
}

/// `sk_ID = (D_ID, S_ID)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserPrivateKey<G: Group> {
    pub partial: PartialPrivateKey<G>,
    pub secret: G::Scalar,
}

impl<G: Group> UserPublicKey<G> {
    /// `encode(U) || encode(R) || len(delta) || delta`.
    pub fn encode(&self, group: &G) -> Vec<u8> {
        let mut out = group.encode_element(&self.u);
        out.extend_from_slice(&group.encode_element(&self.r));
        self.delta.framed_into(&mut out);
        out
    }
}

/// Draws `S_ID` uniformly from `[1, q)`.
///
/// Neither `mpk` nor `id` influences the draw; they are accepted to keep
/// the algorithm's shape.
pub fn set_secret_value<G: Group, R: RngCore + CryptoRng + ?Sized>(
    group: &G,
    _mpk: &MasterPublicKey<G>,
    _id: &Identity,
    rng: &mut R,
) -> Result<G::Scalar> {
    group.scalar_random_nonzero(rng)
}

pub fn set_public_key<G: Group>(
    group: &G,
    mpk: &MasterPublicKey<G>,
    id: &Identity,
    partial: &PartialPrivateKey<G>,
    secret: &G::Scalar,
) -> Result<UserPublicKey<G>> {
    if !verify_partial_key(group, mpk, id, partial) {
        return Err(Error::InvalidPartialKey);
    }
    Ok(UserPublicKey {
        u: group.exp_g(secret),
        r: partial.r,
        delta: partial.delta.clone(),
    })
}

pub fn set_private_key<G: Group>(
    _mpk: &MasterPublicKey<G>,
    partial: &PartialPrivateKey<G>,
    secret: &G::Scalar,
) -> UserPrivateKey<G> {
    UserPrivateKey {
        partial: partial.clone(),
        secret: *secret,
    }
}

/// Accepts iff `delta` verifies on `ID || R` and both `U`, `R` are
/// non-identity.
pub fn validate_public_key<G: Group>(
    group: &G,
    mpk: &MasterPublicKey<G>,
    id: &Identity,
    pk: &UserPublicKey<G>,
) -> bool {
    !group.is_identity(&pk.u)
        && !group.is_identity(&pk.r)
        && ds_verify(group, &mpk.vk, &signed_payload(group, id, &pk.r), &pk.delta)
}

/// A fully provisioned user: identity plus both halves of its key pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserKeys<G: Group> {
    pub id: Identity,
    pub pk: UserPublicKey<G>,
    pub sk: UserPrivateKey<G>,
}

impl<G: Group> UserKeys<G> {
    /// Runs extraction, secret-value choice and key assembly in one go.
    pub fn provision<R: RngCore + CryptoRng + ?Sized>(
        group: &G,
        msk: &crate::kgc::MasterKeys<G>,
        mpk: &MasterPublicKey<G>,
        id: Identity,
        rng: &mut R,
    ) -> Result<Self> {
        let partial = crate::kgc::extract_id_based_key(group, msk, &id, rng)?;
        let secret = set_secret_value(group, mpk, &id, rng)?;
        let pk = set_public_key(group, mpk, &id, &partial, &secret)?;
        let sk = set_private_key(mpk, &partial, &secret);
        Ok(Self { id, pk, sk })
    }
}

#[cfg(test)]
mod tests {
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    use super::*;
    use crate::group::{Ristretto255, ToyGroup};
    use crate::kgc::{extract_id_based_key, setup};

    fn id(s: &str) -> Identity {
        Identity::try_from(s).unwrap()
    }

    #[test]
    fn toy_public_key_examples() {
        let g = ToyGroup::default();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (msk, mpk) = setup(&g, &mut rng).unwrap();
        let d = extract_id_based_key(&g, &msk, &id("alice"), &mut rng).unwrap();
        let pk = set_public_key(&g, &mpk, &id("alice"), &d, &g.scalar(4)).unwrap();
        assert_eq!(pk.u.value(), 16);
        assert_eq!(pk.r, d.r);
        assert_eq!(pk.delta, d.delta);

        let zero = set_public_key(&g, &mpk, &id("alice"), &d, &g.scalar(0)).unwrap();
        assert_eq!(zero.u, g.identity());
        assert!(!validate_public_key(&g, &mpk, &id("alice"), &zero));
    }

    #[test]
    fn secret_value_ignores_identity_and_is_seeded() {
        let g = ToyGroup::default();
        let (_, mpk) = setup(&g, &mut ChaCha20Rng::seed_from_u64(0)).unwrap();
        let draw = |who: &str, seed| {
            set_secret_value(&g, &mpk, &id(who), &mut ChaCha20Rng::seed_from_u64(seed)).unwrap()
        };
        assert_eq!(draw("alice", 77), draw("bob", 77));
        // regression fixture: ChaCha20 seeded with 77, first draw
        assert_eq!(
            draw("alice", 77),
            g.scalar_random_nonzero(&mut ChaCha20Rng::seed_from_u64(77))
                .unwrap()
        );
        let mut rng = ChaCha20Rng::seed_from_u64(78);
        for _ in 0..500 {
            let s = set_secret_value(&g, &mpk, &id("x"), &mut rng)
                .unwrap()
                .value();
            assert!((1..11).contains(&s));
        }
    }

    #[test]
    fn private_key_bundles_inputs() {
        let g = Ristretto255;
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let (msk, mpk) = setup(&g, &mut rng).unwrap();
        for name in ["a", "b", "c"] {
            let d = extract_id_based_key(&g, &msk, &id(name), &mut rng).unwrap();
            let s = set_secret_value(&g, &mpk, &id(name), &mut rng).unwrap();
            let sk = set_private_key(&mpk, &d, &s);
            assert_eq!(sk.partial, d);
            assert_eq!(sk.secret, s);
        }
    }

    #[test]
    fn validation() {
        let g = Ristretto255;
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let (msk, mpk) = setup(&g, &mut rng).unwrap();
        let alice = UserKeys::provision(&g, &msk, &mpk, id("alice"), &mut rng).unwrap();
        assert!(validate_public_key(&g, &mpk, &alice.id, &alice.pk));
        assert_eq!(g.exp_g(&alice.sk.secret), alice.pk.u);
        assert!(!validate_public_key(&g, &mpk, &id("bob"), &alice.pk));
        let mut ident = alice.pk.clone();
        ident.u = g.identity();
        assert!(!validate_public_key(&g, &mpk, &alice.id, &ident));
    }

    #[test]
    fn set_public_key_requires_valid_partial() {
        let g = Ristretto255;
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let (msk, mpk) = setup(&g, &mut rng).unwrap();
        let d = extract_id_based_key(&g, &msk, &id("alice"), &mut rng).unwrap();
        assert_eq!(
            set_public_key(&g, &mpk, &id("mallory"), &d, &g.scalar_one()),
            Err(Error::InvalidPartialKey)
        );
    }
}
