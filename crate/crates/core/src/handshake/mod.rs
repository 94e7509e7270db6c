//! The one-round key exchange.
//!
//! ```text
//! A -> B : ID_A, pk_A, E_A = g^{e_A}
//! B -> A : ID_B, pk_B, E_B = g^{e_B}
//! ssk     = H2(sid, Z_1, .., Z_7)          original
//! ssk     = H2(sid, Z_1, .., Z_9)          improved
//! sid     = ID_A, ID_B, pk_A, E_A, pk_B, E_B
//! ```
//!
//! A session is a [`SessionRecord`] owned by one party. It is created by
//! [`start_session`], which also yields the outgoing message, and completes
//! when the peer's message is fed to [`derive_initiator`] or
//! [`derive_responder`] (or [`SessionRecord::complete`], which dispatches on
//! the role).

mod wire;
mod zvalues;

pub use wire::{Direction, Transcript};
pub use zvalues::{compute_z_values, OwnSecrets, PeerElements, ZValues};

use std::fmt;
use std::str::FromStr;

use rand_core::{CryptoRng, RngCore};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::hash::{h1, h2, SessionKey};
use crate::identity::{put_prefixed, Identity};
use crate::kgc::MasterPublicKey;
use crate::user::{validate_public_key, UserKeys, UserPublicKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Original,
    Improved,
}

impl Variant {
    /// Number of shared values hashed into the session key.
    pub fn z_count(self) -> usize {
        match self {
            Variant::Original => 7,
            Variant::Improved => 9,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Original => "original",
            Variant::Improved => "improved",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Variant::Original),
            "improved" => Ok(Variant::Improved),
            other => Err(Error::Parse(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Initiator,
    Responder,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Initiator => "initiator",
            Role::Responder => "responder",
        })
    }
}

/// `(e, E = g^e)` with `e != 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EphemeralKeyPair<G: Group> {
    pub secret: G::Scalar,
    pub public: G::Element,
}

impl<G: Group> EphemeralKeyPair<G> {
    /// Resamples until `e` is nonzero, so `E` is never the identity.
    pub fn generate<R: RngCore + CryptoRng + ?Sized>(group: &G, rng: &mut R) -> Result<Self> {
        let secret = group.scalar_random_nonzero(rng)?;
        Ok(Self {
            secret,
            public: group.exp_g(&secret),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandshakeMessage<G: Group> {
    pub id: Identity,
    pub pk: UserPublicKey<G>,
    pub ephemeral: G::Element,
}

/// `ID_A, ID_B, pk_A, E_A, pk_B, E_B`, each field length-prefixed, the
/// initiator's fields always first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SessionId(pub Vec<u8>);

impl SessionId {
    pub fn new<G: Group>(
        group: &G,
        initiator: &HandshakeMessage<G>,
        responder: &HandshakeMessage<G>,
    ) -> Self {
        let mut out = Vec::new();
        put_prefixed(&mut out, initiator.id.as_bytes());
        put_prefixed(&mut out, responder.id.as_bytes());
        put_prefixed(&mut out, &initiator.pk.encode(group));
        put_prefixed(&mut out, &group.encode_element(&initiator.ephemeral));
        put_prefixed(&mut out, &responder.pk.encode(group));
        put_prefixed(&mut out, &group.encode_element(&responder.ephemeral));
        Self(out)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SessionState {
    AwaitingPeer,
    Accepted,
    Rejected,
}

/// Per-instance state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionRecord<G: Group> {
    pub role: Role,
    pub variant: Variant,
    pub own: UserKeys<G>,
    pub ephemeral: EphemeralKeyPair<G>,
    pub outgoing: HandshakeMessage<G>,
    pub peer: Option<HandshakeMessage<G>>,
    pub sid: Option<SessionId>,
    pub z: Option<ZValues<G>>,
    pub ssk: Option<SessionKey>,
    pub state: SessionState,
}

impl<G: Group> SessionRecord<G> {
    pub fn accepted(&self) -> bool {
        self.state == SessionState::Accepted
    }

    /// Partner identity, known once a peer message has been processed.
    pub fn pid(&self) -> Option<&Identity> {
        self.peer.as_ref().map(|m| &m.id)
    }

    /// Feeds the peer message to the derivation matching this record's role.
    pub fn complete(
        &mut self,
        group: &G,
        mpk: &MasterPublicKey<G>,
        peer: &HandshakeMessage<G>,
    ) -> Result<SessionKey> {
        match self.role {
            Role::Initiator => derive_initiator(group, mpk, self, peer),
            Role::Responder => derive_responder(group, mpk, self, peer),
        }
    }
}

pub fn start_session<G: Group, R: RngCore + CryptoRng + ?Sized>(
    group: &G,
    variant: Variant,
    role: Role,
    own: &UserKeys<G>,
    rng: &mut R,
) -> Result<(SessionRecord<G>, HandshakeMessage<G>)> {
    let ephemeral = EphemeralKeyPair::generate(group, rng)?;
    let outgoing = HandshakeMessage {
        id: own.id.clone(),
        pk: own.pk.clone(),
        ephemeral: ephemeral.public,
    };
    let rec = SessionRecord {
        role,
        variant,
        own: own.clone(),
        ephemeral,
        outgoing: outgoing.clone(),
        peer: None,
        sid: None,
        z: None,
        ssk: None,
        state: SessionState::AwaitingPeer,
    };
    Ok((rec, outgoing))
}

pub fn derive_initiator<G: Group>(
    group: &G,
    mpk: &MasterPublicKey<G>,
    rec: &mut SessionRecord<G>,
    peer: &HandshakeMessage<G>,
) -> Result<SessionKey> {
    if rec.role != Role::Initiator {
        return Err(Error::SessionState("not an initiator session"));
    }
    derive(group, mpk, rec, peer)
}

pub fn derive_responder<G: Group>(
    group: &G,
    mpk: &MasterPublicKey<G>,
    rec: &mut SessionRecord<G>,
    peer: &HandshakeMessage<G>,
) -> Result<SessionKey> {
    if rec.role != Role::Responder {
        return Err(Error::SessionState("not a responder session"));
    }
    derive(group, mpk, rec, peer)
}

/// Checks a received message: the public key must validate under `mpk` and
/// `E` must not be the identity.
pub fn validate_peer<G: Group>(
    group: &G,
    mpk: &MasterPublicKey<G>,
    peer: &HandshakeMessage<G>,
) -> Result<()> {
    if !validate_public_key(group, mpk, &peer.id, &peer.pk) {
        return Err(Error::InvalidPeerKey);
    }
    if group.is_identity(&peer.ephemeral) {
        return Err(Error::InvalidPeerEphemeral);
    }
    Ok(())
}

fn derive<G: Group>(
    group: &G,
    mpk: &MasterPublicKey<G>,
    rec: &mut SessionRecord<G>,
    peer: &HandshakeMessage<G>,
) -> Result<SessionKey> {
    if rec.state != SessionState::AwaitingPeer {
        return Err(Error::SessionState("session already completed"));
    }
    if let Err(e) = validate_peer(group, mpk, peer) {
        rec.state = SessionState::Rejected;
        return Err(e);
    }
    let own = OwnSecrets {
        ephemeral: rec.ephemeral.secret,
        secret: rec.own.sk.secret,
        id_key: rec.own.sk.partial.z,
    };
    let peer_el = PeerElements {
        u: peer.pk.u,
        r: peer.pk.r,
        ephemeral: peer.ephemeral,
        h: h1(group, &peer.id, &peer.pk.r),
    };
    let z = compute_z_values(group, rec.variant, rec.role, &mpk.y, &own, &peer_el);
    let sid = match rec.role {
        Role::Initiator => SessionId::new(group, &rec.outgoing, peer),
        Role::Responder => SessionId::new(group, peer, &rec.outgoing),
    };
    let ssk = h2(group, sid.as_bytes(), z.as_slice())?;
    rec.peer = Some(peer.clone());
    rec.sid = Some(sid);
    rec.z = Some(z);
    rec.ssk = Some(ssk);
    rec.state = SessionState::Accepted;
    Ok(ssk)
}

/// Both sides of one honest run.
#[derive(Clone, Debug)]
pub struct HonestRun<G: Group> {
    pub initiator: SessionRecord<G>,
    pub responder: SessionRecord<G>,
    pub transcript: Transcript,
}

/// Runs initiator `a` against responder `b` with messages relayed
/// faithfully.
pub fn run_honest<G: Group, R: RngCore + CryptoRng + ?Sized>(
    group: &G,
    mpk: &MasterPublicKey<G>,
    variant: Variant,
    a: &UserKeys<G>,
    b: &UserKeys<G>,
    rng: &mut R,
) -> Result<HonestRun<G>> {
    let (mut ra, ma) = start_session(group, variant, Role::Initiator, a, rng)?;
    let (mut rb, mb) = start_session(group, variant, Role::Responder, b, rng)?;
    derive_responder(group, mpk, &mut rb, &ma)?;
    derive_initiator(group, mpk, &mut ra, &mb)?;
    let mut transcript = Transcript::default();
    transcript.push(Direction::AToB, ma.encode(group));
    transcript.push(Direction::BToA, mb.encode(group));
    Ok(HonestRun {
        initiator: ra,
        responder: rb,
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    use super::*;
    use crate::group::{Ristretto255, ToyGroup};
    use crate::kgc::{setup, MasterKeys};

    fn world<G: Group>(
        group: &G,
        seed: u64,
    ) -> (
        MasterKeys<G>,
        MasterPublicKey<G>,
        UserKeys<G>,
        UserKeys<G>,
        ChaCha20Rng,
    ) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (msk, mpk) = setup(group, &mut rng).unwrap();
        let a = UserKeys::provision(
            group,
            &msk,
            &mpk,
            Identity::try_from("alice").unwrap(),
            &mut rng,
        )
        .unwrap();
        let b = UserKeys::provision(
            group,
            &msk,
            &mpk,
            Identity::try_from("bob").unwrap(),
            &mut rng,
        )
        .unwrap();
        (msk, mpk, a, b, rng)
    }

    #[test]
    fn start_session_populates_message() {
        let g = Ristretto255;
        let (_, _, a, _, mut rng) = world(&g, 1);
        let (rec, msg) =
            start_session(&g, Variant::Improved, Role::Initiator, &a, &mut rng).unwrap();
        assert_eq!(msg.ephemeral, g.exp_g(&rec.ephemeral.secret));
        assert_eq!(msg.id, a.id);
        assert_eq!(HandshakeMessage::decode(&g, &msg.encode(&g)).unwrap(), msg);
        let (_, msg2) =
            start_session(&g, Variant::Improved, Role::Initiator, &a, &mut rng).unwrap();
        assert_ne!(msg.ephemeral, msg2.ephemeral);
        assert!(!rec.accepted());
    }

    #[test]
    fn production_agreement_both_variants() {
        let g = Ristretto255;
        let (_, mpk, a, b, mut rng) = world(&g, 2);
        for v in [Variant::Original, Variant::Improved] {
            let run = run_honest(&g, &mpk, v, &a, &b, &mut rng).unwrap();
            assert_eq!(run.initiator.ssk, run.responder.ssk);
            assert_eq!(run.initiator.sid, run.responder.sid);
            assert_eq!(run.initiator.z, run.responder.z);
            assert_eq!(run.initiator.z.as_ref().unwrap().len(), v.z_count());
            assert_eq!(run.initiator.pid(), Some(&b.id));
            assert_eq!(run.responder.pid(), Some(&a.id));
        }
    }

    #[test]
    fn variants_differ_on_same_transcript() {
        let g = ToyGroup::default();
        let (_, mpk, a, b, mut rng) = world(&g, 3);
        let (ra, ma) = start_session(&g, Variant::Original, Role::Initiator, &a, &mut rng).unwrap();
        let (rb, mb) = start_session(&g, Variant::Original, Role::Responder, &b, &mut rng).unwrap();
        let mut orig = ra.clone();
        let mut impr = ra;
        impr.variant = Variant::Improved;
        let k_orig = derive_initiator(&g, &mpk, &mut orig, &mb).unwrap();
        let k_impr = derive_initiator(&g, &mpk, &mut impr, &mb).unwrap();
        assert_ne!(k_orig, k_impr);
        let _ = (rb, ma);
    }

    #[test]
    fn rejects_identity_ephemeral_and_bad_keys() {
        let g = ToyGroup::default();
        let (_, mpk, a, b, mut rng) = world(&g, 4);
        let (mut ra, _) =
            start_session(&g, Variant::Improved, Role::Initiator, &a, &mut rng).unwrap();
        let (_, mut mb) =
            start_session(&g, Variant::Improved, Role::Responder, &b, &mut rng).unwrap();
        mb.ephemeral = g.identity();
        assert_eq!(
            derive_initiator(&g, &mpk, &mut ra, &mb),
            Err(Error::InvalidPeerEphemeral)
        );
        assert_eq!(ra.state, SessionState::Rejected);
        assert!(ra.ssk.is_none());

        let (mut ra, _) =
            start_session(&g, Variant::Improved, Role::Initiator, &a, &mut rng).unwrap();
        let (_, mut mb) =
            start_session(&g, Variant::Improved, Role::Responder, &b, &mut rng).unwrap();
        mb.id = Identity::try_from("mallory").unwrap();
        assert_eq!(
            derive_initiator(&g, &mpk, &mut ra, &mb),
            Err(Error::InvalidPeerKey)
        );
    }

    #[test]
    fn role_mismatch_and_double_completion() {
        let g = ToyGroup::default();
        let (_, mpk, a, b, mut rng) = world(&g, 5);
        let (mut ra, ma) =
            start_session(&g, Variant::Original, Role::Initiator, &a, &mut rng).unwrap();
        let (mut rb, mb) =
            start_session(&g, Variant::Original, Role::Responder, &b, &mut rng).unwrap();
        assert!(derive_responder(&g, &mpk, &mut ra, &mb).is_err());
        rb.complete(&g, &mpk, &ma).unwrap();
        assert_eq!(
            rb.complete(&g, &mpk, &ma),
            Err(Error::SessionState("session already completed"))
        );
    }

    #[test]
    fn self_session_agrees() {
        let g = ToyGroup::default();
        let (_, mpk, a, _, mut rng) = world(&g, 6);
        let run = run_honest(&g, &mpk, Variant::Improved, &a, &a, &mut rng).unwrap();
        assert_eq!(run.initiator.ssk, run.responder.ssk);
    }

    #[test]
    fn reflected_ephemeral_is_processed() {
        let g = ToyGroup::default();
        let (_, mpk, a, _, mut rng) = world(&g, 7);
        let (mut ra, ma) =
            start_session(&g, Variant::Original, Role::Initiator, &a, &mut rng).unwrap();
        assert!(derive_initiator(&g, &mpk, &mut ra, &ma).is_ok());
    }

    #[test]
    fn tampered_sid_field_changes_key() {
        let g = Ristretto255;
        let (_, mpk, a, b, mut rng) = world(&g, 8);
        let (ra, ma) = start_session(&g, Variant::Improved, Role::Initiator, &a, &mut rng).unwrap();
        let (mut rb, mb) =
            start_session(&g, Variant::Improved, Role::Responder, &b, &mut rng).unwrap();
        let kb = derive_responder(&g, &mpk, &mut rb, &ma).unwrap();
        let mut forged = mb.clone();
        forged.ephemeral = g.mul(&mb.ephemeral, &g.generator());
        let mut ra2 = ra.clone();
        let ka = derive_initiator(&g, &mpk, &mut ra2, &forged).unwrap();
        assert_ne!(ka, kb);
        let mut ra3 = ra;
        assert_eq!(derive_initiator(&g, &mpk, &mut ra3, &mb).unwrap(), kb);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn toy_agreement(seed in any::<u64>(), improved in any::<bool>()) {
            let g = ToyGroup::default();
            let (_, mpk, a, b, mut rng) = world(&g, seed);
            let v = if improved { Variant::Improved } else { Variant::Original };
            let run = run_honest(&g, &mpk, v, &a, &b, &mut rng).unwrap();
            prop_assert_eq!(run.initiator.ssk, run.responder.ssk);
        }
    }
}
