use std::fmt;
use std::str::FromStr;

use super::HandshakeMessage;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::identity::{put_prefixed, Identity, Reader};
use crate::signature::Signature;
use crate::user::UserPublicKey;

impl<G: Group> HandshakeMessage<G> {
    /// `len(id) || id || encode(U) || encode(R) || len(delta) || delta || encode(E)`,
    /// lengths two-byte big-endian.
    pub fn encode(&self, group: &G) -> Vec<u8> {
        let mut out = Vec::new();
        put_prefixed(&mut out, self.id.as_bytes());
        out.extend_from_slice(&self.pk.encode(group));
        out.extend_from_slice(&group.encode_element(&self.ephemeral));
        out
    }

    /// Parses and subgroup-checks every element. Identity elements are
    /// still accepted here; the handshake rejects them.
    pub fn decode(group: &G, bytes: &[u8]) -> Result<Self> {
        let el = group.element_len();
        let mut r = Reader::new(bytes);
        let id = Identity::new(r.take_prefixed()?)?;
        let u = group.decode_element(r.take(el)?)?;
        let rr = group.decode_element(r.take(el)?)?;
        let delta = Signature(r.take_prefixed()?.to_vec());
        let ephemeral = group.decode_element(r.take(el)?)?;
        r.finish()?;
        Ok(Self {
            id,
            pk: UserPublicKey { u, r: rr, delta },
            ephemeral,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    AToB,
    BToA,
}

impl Direction {
    fn prefix(self) -> &'static str {
        match self {
            Direction::AToB => "A->B:",
            Direction::BToA => "B->A:",
        }
    }
}

/// Line-oriented transcript: one hex-encoded message per line, prefixed
/// with `A->B:` or `B->A:`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub lines: Vec<(Direction, Vec<u8>)>,
}

impl Transcript {
    pub fn push(&mut self, dir: Direction, msg: Vec<u8>) {
        self.lines.push((dir, msg));
    }

    /// First message travelling in `dir`.
    pub fn first(&self, dir: Direction) -> Option<&[u8]> {
        self.lines
            .iter()
            .find(|(d, _)| *d == dir)
            .map(|(_, m)| m.as_slice())
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (dir, msg) in &self.lines {
            writeln!(f, "{}{}", dir.prefix(), hex::encode(msg))?;
        }
        Ok(())
    }
}

impl FromStr for Transcript {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut t = Transcript::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (dir, rest) = if let Some(rest) = line.strip_prefix("A->B:") {
                (Direction::AToB, rest)
            } else if let Some(rest) = line.strip_prefix("B->A:") {
                (Direction::BToA, rest)
            } else {
                return Err(Error::Parse(format!(
                    "line {}: missing direction prefix",
                    n + 1
                )));
            };
            let msg = hex::decode(rest.trim())
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
            t.push(dir, msg);
        }
        Ok(t)
    }
}
