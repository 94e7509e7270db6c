//! Line-oriented key files: one `field=hex` pair per line.
//!
//! ```text
//! mpk.y=08
//! mpk.vk=0d
//! id=616c696365
//! R=09
//! delta=0002...
//! z=04
//! ```
//!
//! An `id` line opens a per-identity record; the lines that follow belong to
//! it until the next `id`. User key files add `U` and `S` to each record.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::identity::Identity;
use crate::kgc::{MasterPublicKey, PartialPrivateKey};
use crate::signature::{Signature, VerifyingKey};
use crate::user::{UserKeys, UserPrivateKey, UserPublicKey};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyFile {
    pub entries: Vec<(String, Vec<u8>)>,
}

impl KeyFile {
    pub fn push(&mut self, field: &str, value: Vec<u8>) {
        self.entries.push((field.to_string(), value));
    }

    pub fn get(&self, field: &str) -> Option<&[u8]> {
        self.entries
            .iter()
            .find(|(f, _)| f == field)
            .map(|(_, v)| v.as_slice())
    }

    fn require(&self, field: &str) -> Result<&[u8]> {
        self.get(field)
            .ok_or_else(|| Error::Parse(format!("missing field {field}")))
    }

    /// Splits the entries after the header into per-identity records.
    fn records(&self) -> Result<Vec<KeyFile>> {
        let mut out: Vec<KeyFile> = Vec::new();
        for (f, v) in &self.entries {
            if f == "id" {
                out.push(KeyFile::default());
            }
            if f.starts_with("mpk.") {
                continue;
            }
            match out.last_mut() {
                Some(rec) => rec.push(f, v.clone()),
                None => return Err(Error::Parse(format!("field {f} outside an id record"))),
            }
        }
        Ok(out)
    }

    pub fn with_master_public_key<G: Group>(group: &G, mpk: &MasterPublicKey<G>) -> Self {
        let mut kf = KeyFile::default();
        kf.push("mpk.y", group.encode_element(&mpk.y));
        kf.push("mpk.vk", group.encode_element(&mpk.vk.0));
        kf
    }

    pub fn master_public_key<G: Group>(&self, group: &G) -> Result<MasterPublicKey<G>> {
        Ok(MasterPublicKey {
            y: group.decode_element(self.require("mpk.y")?)?,
            vk: VerifyingKey(group.decode_element(self.require("mpk.vk")?)?),
        })
    }

    pub fn push_partial_key<G: Group>(
        &mut self,
        group: &G,
        id: &Identity,
        d: &PartialPrivateKey<G>,
    ) {
        self.push("id", id.as_bytes().to_vec());
        self.push("R", group.encode_element(&d.r));
        self.push("delta", d.delta.0.clone());
        self.push("z", group.encode_scalar(&d.z));
    }

    pub fn partial_keys<G: Group>(
        &self,
        group: &G,
    ) -> Result<Vec<(Identity, PartialPrivateKey<G>)>> {
        self.records()?
            .iter()
            .map(|rec| {
                let id = Identity::new(rec.require("id")?)?;
                let d = PartialPrivateKey {
                    r: group.decode_element(rec.require("R")?)?,
                    delta: Signature(rec.require("delta")?.to_vec()),
                    z: group.decode_scalar(rec.require("z")?)?,
                };
                Ok((id, d))
            })
            .collect()
    }

    pub fn push_user<G: Group>(&mut self, group: &G, user: &UserKeys<G>) {
        self.push_partial_key(group, &user.id, &user.sk.partial);
        self.push("U", group.encode_element(&user.pk.u));
        self.push("S", group.encode_scalar(&user.sk.secret));
    }

    pub fn users<G: Group>(&self, group: &G) -> Result<Vec<UserKeys<G>>> {
        let partials = self.partial_keys(group)?;
        partials
            .into_iter()
            .zip(self.records()?)
            .map(|((id, partial), rec)| {
                let u = group.decode_element(rec.require("U")?)?;
                let secret = group.decode_scalar(rec.require("S")?)?;
                Ok(UserKeys {
                    id,
                    pk: UserPublicKey {
                        u,
                        r: partial.r,
                        delta: partial.delta.clone(),
                    },
                    sk: UserPrivateKey { partial, secret },
                })
            })
            .collect()
    }
}

impl fmt::Display for KeyFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (field, value) in &self.entries {
            writeln!(f, "{field}={}", hex::encode(value))?;
        }
        Ok(())
    }
}

impl FromStr for KeyFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut kf = KeyFile::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (field, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected field=hex", n + 1)))?;
            let value = hex::decode(value.trim())
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
            kf.push(field.trim(), value);
        }
        Ok(kf)
    }
}

#[cfg(test)]
mod tests {
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    use super::*;
    use crate::group::{Ristretto255, ToyGroup};
    use crate::kgc::{extract_id_based_key, setup, verify_partial_key};

    #[test]
    fn kgc_file_round_trip() {
        let g = Ristretto255;
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (msk, mpk) = setup(&g, &mut rng).unwrap();
        let mut kf = KeyFile::with_master_public_key(&g, &mpk);
        let ids: Vec<Identity> = ["alice", "bob"]
            .iter()
            .map(|s| Identity::try_from(*s).unwrap())
            .collect();
        for id in &ids {
            let d = extract_id_based_key(&g, &msk, id, &mut rng).unwrap();
            kf.push_partial_key(&g, id, &d);
        }
        let parsed: KeyFile = kf.to_string().parse().unwrap();
        assert_eq!(parsed, kf);
        let mpk2 = parsed.master_public_key(&g).unwrap();
        assert_eq!(mpk2, mpk);
        let keys = parsed.partial_keys(&g).unwrap();
        assert_eq!(keys.len(), 2);
        for (id, d) in keys {
            assert!(verify_partial_key(&g, &mpk2, &id, &d));
        }
    }

    #[test]
    fn user_file_round_trip() {
        let g = ToyGroup::default();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (msk, mpk) = setup(&g, &mut rng).unwrap();
        let u = UserKeys::provision(
            &g,
            &msk,
            &mpk,
            Identity::try_from("carol").unwrap(),
            &mut rng,
        )
        .unwrap();
        let mut kf = KeyFile::with_master_public_key(&g, &mpk);
        kf.push_user(&g, &u);
        let text = kf.to_string();
        assert!(text.lines().all(|l| l.contains('=')));
        let back = text.parse::<KeyFile>().unwrap().users(&g).unwrap();
        assert_eq!(back, vec![u]);
    }

    #[test]
    fn malformed_files() {
        assert!("novalue".parse::<KeyFile>().is_err());
        assert!("a=xyz".parse::<KeyFile>().is_err());
        let orphan: KeyFile = "R=01".parse().unwrap();
        assert!(orphan.partial_keys(&ToyGroup::default()).is_err());
        let missing: KeyFile = "mpk.y=02".parse().unwrap();
        assert!(missing.master_public_key(&ToyGroup::default()).is_err());
    }
}
