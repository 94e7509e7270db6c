//! Query-level security game.
//!
//! Every query is logged, together with a summary of its response, before
//! the response is returned. Exposure and freshness are decided from the
//! log alone.

use std::collections::BTreeMap;
use std::fmt;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use super::poly::Party;
use super::profile::{LeakageProfile, PartyLeakage};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::handshake::{start_session, HandshakeMessage, Role, SessionRecord, Variant};
use crate::hash::SessionKey;
use crate::identity::Identity;
use crate::kgc::{setup, MasterKeys, MasterPublicKey, PartialPrivateKey};
use crate::user::{UserKeys, UserPrivateKey, UserPublicKey};

#[derive(Clone, Debug)]
pub enum SendInput<G: Group> {
    /// Start an initiator instance aimed at `peer`.
    Activate { peer: Identity },
    /// Deliver a message. An instance that does not exist yet is created
    /// as a responder.
    Deliver(HandshakeMessage<G>),
}

#[derive(Clone, Debug)]
pub enum Query<G: Group> {
    CreateUser(Identity),
    Send {
        user: Identity,
        instance: u32,
        input: SendInput<G>,
    },
    RevealMasterKey,
    RevealIdBasedKey(Identity),
    RevealSecretValue(Identity),
    RevealSecretKey(Identity),
    RevealEphemeralKey(Identity, u32),
    RevealSessionKey(Identity, u32),
    /// The adversary must supply the secret behind the new `U`.
    ReplacePublicKey {
        user: Identity,
        pk: UserPublicKey<G>,
        secret: G::Scalar,
    },
    Test(Identity, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Response<G: Group> {
    UserCreated(UserPublicKey<G>),
    Outgoing(HandshakeMessage<G>),
    Accepted,
    Rejected(String),
    MasterKey(G::Scalar),
    IdBasedKey(PartialPrivateKey<G>),
    SecretValue(G::Scalar),
    SecretKey(UserPrivateKey<G>),
    EphemeralKey(G::Scalar),
    SessionKey(SessionKey),
    /// `⊥`: the instance has not accepted.
    NotAccepted,
    Replaced,
    TestKey(SessionKey),
}

/// A logged query without its payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryKind {
    CreateUser(Identity),
    Send(Identity, u32),
    RevealMasterKey,
    RevealIdBasedKey(Identity),
    RevealSecretValue(Identity),
    RevealSecretKey(Identity),
    RevealEphemeralKey(Identity, u32),
    RevealSessionKey(Identity, u32),
    ReplacePublicKey(Identity),
    Test(Identity, u32),
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryKind::CreateUser(u) => write!(f, "CreateUser({u})"),
            QueryKind::Send(u, i) => write!(f, "Send({u},{i})"),
            QueryKind::RevealMasterKey => write!(f, "RevealMasterKey()"),
            QueryKind::RevealIdBasedKey(u) => write!(f, "RevealIDBasedKey({u})"),
            QueryKind::RevealSecretValue(u) => write!(f, "RevealSecretValue({u})"),
            QueryKind::RevealSecretKey(u) => write!(f, "RevealSecretKey({u})"),
            QueryKind::RevealEphemeralKey(u, i) => write!(f, "RevealEphemeralKey({u},{i})"),
            QueryKind::RevealSessionKey(u, i) => write!(f, "RevealSessionKey({u},{i})"),
            QueryKind::ReplacePublicKey(u) => write!(f, "ReplacePublicKey({u})"),
            QueryKind::Test(u, i) => write!(f, "Test({u},{i})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogEntry {
    pub query: QueryKind,
    pub response: String,
    /// False when the query was refused with an error.
    pub ok: bool,
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.query, self.response)
    }
}

#[derive(Clone, Debug)]
struct UserEntry<G: Group> {
    original: UserKeys<G>,
    /// Key pair installed by ReplacePublicKey.
    replaced: Option<(UserPublicKey<G>, G::Scalar)>,
}

impl<G: Group> UserEntry<G> {
    fn current(&self) -> UserKeys<G> {
        let mut keys = self.original.clone();
        if let Some((pk, s)) = &self.replaced {
            keys.pk = pk.clone();
            keys.sk.secret = *s;
        }
        keys
    }
}

#[derive(Clone, Debug)]
pub struct GameInstance<G: Group> {
    pub record: SessionRecord<G>,
    pub intended_peer: Option<Identity>,
    pub used_replaced_key: bool,
    /// Log index of the query that made the instance accept.
    pub accepted_at: Option<usize>,
}

pub struct GameState<G: Group> {
    group: G,
    variant: Variant,
    msk: MasterKeys<G>,
    mpk: MasterPublicKey<G>,
    users: BTreeMap<Identity, UserEntry<G>>,
    instances: BTreeMap<(Identity, u32), GameInstance<G>>,
    log: Vec<LogEntry>,
    rng: ChaCha20Rng,
    forced_coin: Option<bool>,
    test: Option<(Identity, u32, bool)>,
}

impl<G: Group> GameState<G> {
    /// Runs Setup with a generator seeded by `seed`. All later randomness,
    /// including the Test coin, comes from the same generator.
    pub fn new(group: G, variant: Variant, seed: u64) -> Result<Self> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (msk, mpk) = setup(&group, &mut rng)?;
        Ok(Self {
            group,
            variant,
            msk,
            mpk,
            users: BTreeMap::new(),
            instances: BTreeMap::new(),
            log: Vec::new(),
            rng,
            forced_coin: None,
            test: None,
        })
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn mpk(&self) -> &MasterPublicKey<G> {
        &self.mpk
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    /// Overrides the Test coin. `Some(true)` returns the real key.
    pub fn force_coin(&mut self, coin: Option<bool>) {
        self.forced_coin = coin;
    }

    /// The coin drawn by the Test query, once made.
    pub fn test_coin(&self) -> Option<bool> {
        self.test.as_ref().map(|t| t.2)
    }

    pub fn instance(&self, user: &Identity, i: u32) -> Option<&GameInstance<G>> {
        self.instances.get(&(user.clone(), i))
    }

    pub fn public_key(&self, user: &Identity) -> Option<UserPublicKey<G>> {
        self.users.get(user).map(|e| e.current().pk)
    }

    pub fn query(&mut self, q: Query<G>) -> Result<Response<G>> {
        let kind = kind_of(&q);
        let idx = self.log.len();
        self.log.push(LogEntry {
            query: kind,
            response: String::new(),
            ok: false,
        });
        let result = self.answer(q, idx);
        let (ok, response) = match &result {
            Ok(r) => (true, self.summary(r)),
            Err(e) => (false, format!("error: {e}")),
        };
        self.log[idx].ok = ok;
        self.log[idx].response = response;
        result
    }

    fn summary(&self, r: &Response<G>) -> String {
        let g = &self.group;
        match r {
            Response::UserCreated(pk) => format!("pk={}", hex::encode(pk.encode(g))),
            Response::Outgoing(m) => format!("msg={}", hex::encode(m.encode(g))),
            Response::Accepted => "accepted".into(),
            Response::Rejected(why) => format!("rejected ({why})"),
            Response::MasterKey(x) => format!("x={}", hex::encode(g.encode_scalar(x))),
            Response::IdBasedKey(d) => format!("z={}", hex::encode(g.encode_scalar(&d.z))),
            Response::SecretValue(s) => format!("S={}", hex::encode(g.encode_scalar(s))),
            Response::SecretKey(sk) => format!(
                "z={} S={}",
                hex::encode(g.encode_scalar(&sk.partial.z)),
                hex::encode(g.encode_scalar(&sk.secret))
            ),
            Response::EphemeralKey(e) => format!("e={}", hex::encode(g.encode_scalar(e))),
            Response::SessionKey(k) => format!("ssk={k}"),
            Response::NotAccepted => "⊥".into(),
            Response::Replaced => "replaced".into(),
            Response::TestKey(k) => format!("key={k}"),
        }
    }

    fn user(&self, id: &Identity) -> Result<&UserEntry<G>> {
        self.users
            .get(id)
            .ok_or_else(|| Error::UnknownUser(id.to_string()))
    }

    fn inst(&self, id: &Identity, i: u32) -> Result<&GameInstance<G>> {
        self.instances
            .get(&(id.clone(), i))
            .ok_or_else(|| Error::UnknownInstance(id.to_string(), i))
    }

    fn answer(&mut self, q: Query<G>, idx: usize) -> Result<Response<G>> {
        match q {
            Query::CreateUser(id) => {
                if self.users.contains_key(&id) {
                    return Err(Error::DuplicateUser(id.to_string()));
                }
                let keys = UserKeys::provision(
                    &self.group,
                    &self.msk,
                    &self.mpk,
                    id.clone(),
                    &mut self.rng,
                )?;
                let pk = keys.pk.clone();
                self.users.insert(
                    id,
                    UserEntry {
                        original: keys,
                        replaced: None,
                    },
                );
                Ok(Response::UserCreated(pk))
            }
            Query::Send {
                user,
                instance,
                input,
            } => self.send(user, instance, input, idx),
            Query::RevealMasterKey => Ok(Response::MasterKey(self.msk.x)),
            Query::RevealIdBasedKey(id) => Ok(Response::IdBasedKey(
                self.user(&id)?.original.sk.partial.clone(),
            )),
            Query::RevealSecretValue(id) => {
                Ok(Response::SecretValue(self.user(&id)?.current().sk.secret))
            }
            Query::RevealSecretKey(id) => Ok(Response::SecretKey(self.user(&id)?.current().sk)),
            Query::RevealEphemeralKey(id, i) => Ok(Response::EphemeralKey(
                self.inst(&id, i)?.record.ephemeral.secret,
            )),
            Query::RevealSessionKey(id, i) => Ok(match self.inst(&id, i)?.record.ssk {
                Some(k) => Response::SessionKey(k),
                None => Response::NotAccepted,
            }),
            Query::ReplacePublicKey { user, pk, secret } => {
                self.user(&user)?;
                if self.group.exp_g(&secret) != pk.u {
                    return Err(Error::ReplacementMismatch);
                }
                self.users.get_mut(&user).expect("checked").replaced = Some((pk, secret));
                Ok(Response::Replaced)
            }
            Query::Test(id, i) => {
                if self.test.is_some() {
                    return Err(Error::RepeatedTest);
                }
                let inst = self.inst(&id, i)?;
                let Some(real) = inst.record.ssk.filter(|_| inst.record.accepted()) else {
                    return Err(Error::TestNotAccepted);
                };
                if !self.is_fresh(&id, i)? {
                    return Err(Error::Unfresh);
                }
                let coin = match self.forced_coin {
                    Some(b) => b,
                    None => self.rng.next_u32() & 1 == 1,
                };
                self.test = Some((id, i, coin));
                if coin {
                    Ok(Response::TestKey(real))
                } else {
                    let mut k = [0u8; 32];
                    self.rng.fill_bytes(&mut k);
                    Ok(Response::TestKey(SessionKey(k)))
                }
            }
        }
    }

    fn send(
        &mut self,
        user: Identity,
        i: u32,
        input: SendInput<G>,
        idx: usize,
    ) -> Result<Response<G>> {
        let entry = self.user(&user)?;
        let used_replaced_key = entry.replaced.is_some();
        let own = entry.current();
        let key = (user.clone(), i);
        match input {
            SendInput::Activate { peer } => {
                if self.instances.contains_key(&key) {
                    return Err(Error::DuplicateInstance(user.to_string(), i));
                }
                self.user(&peer)?;
                let (record, msg) = start_session(
                    &self.group,
                    self.variant,
                    Role::Initiator,
                    &own,
                    &mut self.rng,
                )?;
                self.instances.insert(
                    key,
                    GameInstance {
                        record,
                        intended_peer: Some(peer),
                        used_replaced_key,
                        accepted_at: None,
                    },
                );
                Ok(Response::Outgoing(msg))
            }
            SendInput::Deliver(msg) => {
                if !self.instances.contains_key(&key) {
                    let (record, _) = start_session(
                        &self.group,
                        self.variant,
                        Role::Responder,
                        &own,
                        &mut self.rng,
                    )?;
                    self.instances.insert(
                        key.clone(),
                        GameInstance {
                            record,
                            intended_peer: None,
                            used_replaced_key,
                            accepted_at: None,
                        },
                    );
                }
                let (group, mpk) = (&self.group, &self.mpk);
                let inst = self.instances.get_mut(&key).expect("present");
                if inst.intended_peer.as_ref().is_some_and(|p| *p != msg.id) {
                    return Ok(Response::Rejected("unexpected peer".into()));
                }
                match inst.record.complete(group, mpk, &msg) {
                    Ok(_) => {
                        inst.accepted_at = Some(idx);
                        Ok(match inst.record.role {
                            Role::Responder => Response::Outgoing(inst.record.outgoing.clone()),
                            Role::Initiator => Response::Accepted,
                        })
                    }
                    Err(e @ Error::SessionState(_)) => Err(e),
                    Err(e) => Ok(Response::Rejected(e.to_string())),
                }
            }
        }
    }

    fn made(&self, pred: impl Fn(&QueryKind) -> bool) -> bool {
        self.log.iter().any(|e| e.ok && pred(&e.query))
    }

    fn made_before(&self, end: usize, pred: impl Fn(&QueryKind) -> bool) -> bool {
        self.log[..end].iter().any(|e| e.ok && pred(&e.query))
    }

    /// The exposure conditions (numbered 1 to 4) that hold for `(U, i)`.
    pub fn exposure_conditions(&self, u: &Identity, i: u32) -> Result<Vec<u8>> {
        let inst = self.inst(u, i)?;
        let session_key =
            self.made(|q| matches!(q, QueryKind::RevealSessionKey(v, j) if v == u && *j == i));
        let secret_key = self.made(|q| matches!(q, QueryKind::RevealSecretKey(v) if v == u));
        let ephemeral =
            self.made(|q| matches!(q, QueryKind::RevealEphemeralKey(v, j) if v == u && *j == i));
        let master_or_id = self.made(|q| {
            matches!(q, QueryKind::RevealMasterKey)
                || matches!(q, QueryKind::RevealIdBasedKey(v) if v == u)
        });
        let secret_value = self.made(|q| matches!(q, QueryKind::RevealSecretValue(v) if v == u));
        let mut out = Vec::new();
        if session_key {
            out.push(1);
        }
        if secret_key && ephemeral {
            out.push(2);
        }
        if master_or_id && secret_value && ephemeral {
            out.push(3);
        }
        if inst.used_replaced_key && master_or_id && ephemeral {
            out.push(4);
        }
        Ok(out)
    }

    pub fn is_exposed(&self, u: &Identity, i: u32) -> Result<bool> {
        Ok(!self.exposure_conditions(u, i)?.is_empty())
    }

    /// An accepted instance of the peer with the same sid and the opposite
    /// role.
    pub fn partner(&self, u: &Identity, i: u32) -> Result<Option<(Identity, u32)>> {
        let inst = self.inst(u, i)?;
        let (Some(sid), Some(v)) = (inst.record.sid.as_ref(), inst.record.pid()) else {
            return Ok(None);
        };
        Ok(self
            .instances
            .iter()
            .find(|((w, _), o)| {
                w == v
                    && o.record.accepted()
                    && o.record.role != inst.record.role
                    && o.record.sid.as_ref() == Some(sid)
            })
            .map(|(k, _)| k.clone()))
    }

    /// Why `(U, i)` is unfresh: `"1"`, `"2"`, `"3a"`, `"3b"`, `"3c"`, or
    /// `"not accepted"`. Empty means fresh.
    ///
    /// Case 3c reads "ReplacePK(V, U, i)" as: the public key of V was
    /// replaced before `(U, i)` accepted.
    pub fn unfreshness_reasons(&self, u: &Identity, i: u32) -> Result<Vec<&'static str>> {
        let inst = self.inst(u, i)?;
        let mut out = Vec::new();
        let (Some(v), Some(accepted_at)) = (inst.record.pid(), inst.accepted_at) else {
            return Ok(vec!["not accepted"]);
        };
        if self.is_exposed(u, i)? {
            out.push("1");
        }
        match self.partner(u, i)? {
            Some((w, j)) => {
                if self.is_exposed(&w, j)? {
                    out.push("2");
                }
            }
            None => {
                let master_or_id = self.made(|q| {
                    matches!(q, QueryKind::RevealMasterKey)
                        || matches!(q, QueryKind::RevealIdBasedKey(w) if w == v)
                });
                if master_or_id
                    && self.made(|q| matches!(q, QueryKind::RevealSecretValue(w) if w == v))
                {
                    out.push("3a");
                }
                if self.made(|q| matches!(q, QueryKind::RevealSecretKey(w) if w == v)) {
                    out.push("3b");
                }
                if master_or_id
                    && self.made_before(
                        accepted_at,
                        |q| matches!(q, QueryKind::ReplacePublicKey(w) if w == v),
                    )
                {
                    out.push("3c");
                }
            }
        }
        Ok(out)
    }

    pub fn is_fresh(&self, u: &Identity, i: u32) -> Result<bool> {
        Ok(self.unfreshness_reasons(u, i)?.is_empty())
    }

    /// Summarises the log as leakage about the session of `(U, i)`, with
    /// the initiator as party A. Ephemerals count only for `(U, i)` and its
    /// partner.
    pub fn leakage_profile(&self, u: &Identity, i: u32) -> Result<LeakageProfile> {
        let inst = self.inst(u, i)?;
        let peer = inst.record.pid().cloned();
        let partner = self.partner(u, i)?;
        let party = |who: Option<&Identity>, instance: Option<(&Identity, u32)>| {
            let Some(w) = who else {
                return PartyLeakage::NONE;
            };
            let secret_key = self.made(|q| matches!(q, QueryKind::RevealSecretKey(v) if v == w));
            PartyLeakage {
                id_based_key: secret_key
                    || self.made(|q| matches!(q, QueryKind::RevealIdBasedKey(v) if v == w)),
                secret_value: secret_key
                    || self.made(|q| matches!(q, QueryKind::RevealSecretValue(v) if v == w)),
                ephemeral: instance.is_some_and(|(v, j)| {
                    self.made(
                        |q| matches!(q, QueryKind::RevealEphemeralKey(x, k) if x == v && *k == j),
                    )
                }),
                replaced_pk: self.made(|q| matches!(q, QueryKind::ReplacePublicKey(v) if v == w)),
            }
        };
        let own = party(Some(u), Some((u, i)));
        let other = party(peer.as_ref(), partner.as_ref().map(|(w, j)| (w, *j)));
        let (a, b) = match inst.record.role {
            Role::Initiator => (own, other),
            Role::Responder => (other, own),
        };
        Ok(LeakageProfile {
            master_key: self.made(|q| matches!(q, QueryKind::RevealMasterKey)),
            a,
            b,
        })
    }

    /// Which party label `(U, i)` carries in its own session.
    pub fn party_of(&self, u: &Identity, i: u32) -> Result<Party> {
        Ok(match self.inst(u, i)?.record.role {
            Role::Initiator => Party::A,
            Role::Responder => Party::B,
        })
    }

    /// Drives an honest exchange between new instances `(a, i)` and
    /// `(b, j)` and returns both messages.
    pub fn run_session(
        &mut self,
        a: &Identity,
        i: u32,
        b: &Identity,
        j: u32,
    ) -> Result<(HandshakeMessage<G>, HandshakeMessage<G>)> {
        let Response::Outgoing(ma) = self.query(Query::Send {
            user: a.clone(),
            instance: i,
            input: SendInput::Activate { peer: b.clone() },
        })?
        else {
            return Err(Error::SessionState("initiator produced no message"));
        };
        let Response::Outgoing(mb) = self.query(Query::Send {
            user: b.clone(),
            instance: j,
            input: SendInput::Deliver(ma.clone()),
        })?
        else {
            return Err(Error::SessionState("responder rejected"));
        };
        match self.query(Query::Send {
            user: a.clone(),
            instance: i,
            input: SendInput::Deliver(mb.clone()),
        })? {
            Response::Accepted => Ok((ma, mb)),
            _ => Err(Error::SessionState("initiator rejected")),
        }
    }

    pub fn log_text(&self) -> String {
        self.log.iter().map(|e| format!("{e}\n")).collect()
    }
}

fn kind_of<G: Group>(q: &Query<G>) -> QueryKind {
    match q {
        Query::CreateUser(u) => QueryKind::CreateUser(u.clone()),
        Query::Send { user, instance, .. } => QueryKind::Send(user.clone(), *instance),
        Query::RevealMasterKey => QueryKind::RevealMasterKey,
        Query::RevealIdBasedKey(u) => QueryKind::RevealIdBasedKey(u.clone()),
        Query::RevealSecretValue(u) => QueryKind::RevealSecretValue(u.clone()),
        Query::RevealSecretKey(u) => QueryKind::RevealSecretKey(u.clone()),
        Query::RevealEphemeralKey(u, i) => QueryKind::RevealEphemeralKey(u.clone(), *i),
        Query::RevealSessionKey(u, i) => QueryKind::RevealSessionKey(u.clone(), *i),
        Query::ReplacePublicKey { user, .. } => QueryKind::ReplacePublicKey(user.clone()),
        Query::Test(u, i) => QueryKind::Test(u.clone(), *i),
    }
}
