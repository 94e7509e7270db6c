use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use super::ToyGroup;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Toy,
    Production,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Toy => "toy",
            GroupKind::Production => "production",
        })
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toy" => Ok(GroupKind::Toy),
            "production" => Ok(GroupKind::Production),
            other => Err(Error::Parse(format!("unknown group {other:?}"))),
        }
    }
}

/// Group selection as read from a config file.
///
/// ```toml
/// group = "toy"
/// p = 23
/// q = 11
/// g = 2
/// ```
///
/// `p`, `q`, `g` are only meaningful for the toy group and default to
/// 23, 11 and 2.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupParams {
    pub group: GroupKind,
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub g: Option<u64>,
}

impl GroupParams {
    pub fn toy() -> Self {
        Self {
            group: GroupKind::Toy,
            p: None,
            q: None,
            g: None,
        }
    }

    pub fn production() -> Self {
        Self {
            group: GroupKind::Production,
            p: None,
            q: None,
            g: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let params: Self =
            toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))?;
        if params.group == GroupKind::Production
            && (params.p.is_some() || params.q.is_some() || params.g.is_some())
        {
            return Err(Error::Parse("p, q, g only apply to the toy group".into()));
        }
        Ok(params)
    }

    /// Builds the toy group these parameters describe.
    pub fn toy_group(&self) -> Result<ToyGroup> {
        if self.group != GroupKind::Toy {
            return Err(Error::InvalidParams("not a toy configuration".into()));
        }
        ToyGroup::new(
            self.p.unwrap_or(23),
            self.q.unwrap_or(11),
            self.g.unwrap_or(2),
        )
    }
}
