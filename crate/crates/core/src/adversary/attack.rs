//! The leakage attack on the original variant.
//!
//! The adversary reveals both identity-based keys, the initiator's
//! ephemeral and the responder's secret value, then rebuilds the seven
//! shared values from the public transcript.

use std::fmt;

use super::game::{GameState, Query, Response};
use super::profile::LeakageProfile;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::handshake::{HandshakeMessage, SessionId, Variant};
use crate::hash::{h2, SessionKey};
use crate::identity::Identity;
use crate::kgc::{implied_public, MasterPublicKey};

/// `{z_A, z_B, e_A, S_B}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LeakedSecrets<G: Group> {
    pub z_a: G::Scalar,
    pub z_b: G::Scalar,
    pub e_a: G::Scalar,
    pub s_b: G::Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackOutcome<G: Group> {
    pub z: Vec<G::Element>,
    pub ssk: SessionKey,
}

/// Computes, from the transcript `(msg_a, msg_b)` and the leakage:
///
/// ```text
/// Z1 = E_B^{e_A}                 Z2 = U_A^{S_B}
/// Z3 = (R_B y^{h_B})^{z_A}       Z4 = U_B^{e_A}
/// Z5 = E_A^{S_B}                 Z6 = (E_B R_B y^{h_B})^{e_A+z_A}
/// Z7 = (U_A R_A y^{h_A})^{S_B+z_B}
/// ```
///
/// and `ssk = H2(sid, Z1..Z7)`.
pub fn attack_original<G: Group>(
    group: &G,
    mpk: &MasterPublicKey<G>,
    msg_a: &HandshakeMessage<G>,
    msg_b: &HandshakeMessage<G>,
    leaked: &LeakedSecrets<G>,
) -> Result<AttackOutcome<G>> {
    let g = group;
    let qa = implied_public(g, mpk, &msg_a.id, &msg_a.pk.r);
    let qb = implied_public(g, mpk, &msg_b.id, &msg_b.pk.r);
    let (ua, ea) = (&msg_a.pk.u, &msg_a.ephemeral);
    let (ub, eb) = (&msg_b.pk.u, &msg_b.ephemeral);
    let z = vec![
        g.exp(eb, &leaked.e_a),
        g.exp(ua, &leaked.s_b),
        g.exp(&qb, &leaked.z_a),
        g.exp(ub, &leaked.e_a),
        g.exp(ea, &leaked.s_b),
        g.exp(&g.mul(eb, &qb), &g.scalar_add(&leaked.e_a, &leaked.z_a)),
        g.exp(&g.mul(ua, &qa), &g.scalar_add(&leaked.s_b, &leaked.z_b)),
    ];
    let sid = SessionId::new(g, msg_a, msg_b);
    let ssk = h2(g, sid.as_bytes(), &z)?;
    Ok(AttackOutcome { z, ssk })
}

/// One game run of the attack with everything needed to judge it.
#[derive(Clone, Debug)]
pub struct AttackReport<G: Group> {
    pub variant: Variant,
    pub initiator: (Identity, u32),
    pub responder: (Identity, u32),
    pub leaked: LeakedSecrets<G>,
    /// The relayed messages, initiator's first.
    pub messages: (HandshakeMessage<G>, HandshakeMessage<G>),
    pub attack: AttackOutcome<G>,
    /// The Z values both honest parties computed.
    pub honest_z: Vec<G::Element>,
    pub honest_ssk: SessionKey,
    pub exposed: [bool; 2],
    pub fresh: [bool; 2],
    pub log: String,
    group: G,
}

impl<G: Group> AttackReport<G> {
    pub fn matched(&self) -> bool {
        self.attack.ssk == self.honest_ssk
    }

    /// Per index, whether the attacker's value equals the honest one.
    pub fn z_matches(&self) -> Vec<bool> {
        (0..self.honest_z.len())
            .map(|i| self.attack.z.get(i) == Some(&self.honest_z[i]))
            .collect()
    }
}

fn expect<G: Group, T>(r: Response<G>, f: impl FnOnce(Response<G>) -> Option<T>) -> Result<T> {
    f(r).ok_or(Error::SessionState("unexpected reveal response"))
}

/// Plays the attack inside a fresh game seeded by `seed`: two users, one
/// honest session, the four reveals, then [`attack_original`] on the
/// relayed messages.
pub fn reproduce_attack<G: Group>(
    group: G,
    variant: Variant,
    seed: u64,
) -> Result<AttackReport<G>> {
    let mut game = GameState::new(group.clone(), variant, seed)?;
    let a = Identity::try_from("alice")?;
    let b = Identity::try_from("bob")?;
    game.query(Query::CreateUser(a.clone()))?;
    game.query(Query::CreateUser(b.clone()))?;
    let (ma, mb) = game.run_session(&a, 1, &b, 1)?;

    let z_a = expect(
        game.query(Query::RevealIdBasedKey(a.clone()))?,
        |r| match r {
            Response::IdBasedKey(d) => Some(d.z),
            _ => None,
        },
    )?;
    let z_b = expect(
        game.query(Query::RevealIdBasedKey(b.clone()))?,
        |r| match r {
            Response::IdBasedKey(d) => Some(d.z),
            _ => None,
        },
    )?;
    let e_a = expect(
        game.query(Query::RevealEphemeralKey(a.clone(), 1))?,
        |r| match r {
            Response::EphemeralKey(e) => Some(e),
            _ => None,
        },
    )?;
    let s_b = expect(
        game.query(Query::RevealSecretValue(b.clone()))?,
        |r| match r {
            Response::SecretValue(s) => Some(s),
            _ => None,
        },
    )?;
    let leaked = LeakedSecrets { z_a, z_b, e_a, s_b };
    let attack = attack_original(&group, game.mpk(), &ma, &mb, &leaked)?;

    let rec = &game.instance(&a, 1).expect("created").record;
    let honest_z = rec.z.as_ref().map(|z| z.0.clone()).unwrap_or_default();
    let honest_ssk = rec
        .ssk
        .ok_or(Error::SessionState("initiator did not accept"))?;
    let exposed = [game.is_exposed(&a, 1)?, game.is_exposed(&b, 1)?];
    let fresh = [game.is_fresh(&a, 1)?, game.is_fresh(&b, 1)?];
    debug_assert_eq!(
        game.leakage_profile(&a, 1)?,
        LeakageProfile::forward_secrecy()
    );

    Ok(AttackReport {
        variant,
        initiator: (a, 1),
        responder: (b, 1),
        leaked,
        messages: (ma, mb),
        attack,
        honest_z,
        honest_ssk,
        exposed,
        fresh,
        log: game.log_text(),
        group,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl<G: Group> fmt::Display for AttackReport<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let el = |e: &G::Element| hex::encode(self.group.encode_element(e));
        let sc = |s: &G::Scalar| hex::encode(self.group.encode_scalar(s));
        writeln!(f, "game log:")?;
        for line in self.log.lines() {
            writeln!(f, "  {line}")?;
        }
        let l = &self.leaked;
        writeln!(
            f,
            "leaked: z_A={} z_B={} e_A={} S_B={}",
            sc(&l.z_a),
            sc(&l.z_b),
            sc(&l.e_a),
            sc(&l.s_b)
        )?;
        let matches = self.z_matches();
        for (i, honest) in self.honest_z.iter().enumerate() {
            match self.attack.z.get(i) {
                Some(z) => writeln!(
                    f,
                    "Z{} attack={} honest={} {}",
                    i + 1,
                    el(z),
                    el(honest),
                    if matches[i] { "equal" } else { "differ" }
                )?,
                None => writeln!(f, "Z{} attack=(none) honest={} differ", i + 1, el(honest))?,
            }
        }
        writeln!(f, "attack ssk: {}", self.attack.ssk)?;
        writeln!(f, "honest ssk: {}", self.honest_ssk)?;
        for ((who, i), (exp, fresh)) in [&self.initiator, &self.responder]
            .into_iter()
            .zip(self.exposed.into_iter().zip(self.fresh))
        {
            writeln!(
                f,
                "instance ({who},{i}): exposed={} fresh={}",
                yes_no(exp),
                yes_no(fresh)
            )?;
        }
        writeln!(
            f,
            "verdict: {}",
            if self.matched() { "MATCH" } else { "NO-MATCH" }
        )
    }
}
