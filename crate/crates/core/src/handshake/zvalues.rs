//! The shared values `Z_1 .. Z_9` as pure functions of one party's secrets
//! and the other party's public elements.
//!
//! Both roles label the values by their exponent, with A as the initiator:
//!
//! | value | exponent of g                    |
//! |-------|----------------------------------|
//! | Z1    | e_A e_B                          |
//! | Z2    | S_A S_B                          |
//! | Z3    | z_A z_B                          |
//! | Z4    | e_A S_B                          |
//! | Z5    | S_A e_B                          |
//! | Z6    | (e_A + z_A)(e_B + z_B)           |
//! | Z7    | (S_A + z_A)(S_B + z_B)           |
//! | Z8    | (S_A + z_A + e_A)(e_B + z_B)     |
//! | Z9    | (S_A + e_A)(S_B + e_B)           |
//!
//! Z8 and Z9 exist only in the improved variant. The responder computes Z4
//! as `E_A^{S_B}` and Z5 as `U_A^{e_B}`; with the opposite assignment the two
//! sides would hash the pair in different orders and never agree.

use super::{Role, Variant};
use crate::group::Group;

/// One party's secret scalars for a session.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OwnSecrets<G: Group> {
    /// ephemeral `e`
    pub ephemeral: G::Scalar,
    /// secret value `S`
    pub secret: G::Scalar,
    /// identity-based key `z`
    pub id_key: G::Scalar,
}

/// The counterpart's public elements, plus `h = H1(ID || R)` for it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeerElements<G: Group> {
    pub u: G::Element,
    pub r: G::Element,
    pub ephemeral: G::Element,
    pub h: G::Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZValues<G: Group>(pub Vec<G::Element>);

impl<G: Group> ZValues<G> {
    /// 1-based, matching the Z numbering.
    pub fn get(&self, i: usize) -> Option<&G::Element> {
        i.checked_sub(1).and_then(|i| self.0.get(i))
    }

    pub fn as_slice(&self) -> &[G::Element] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn compute_z_values<G: Group>(
    group: &G,
    variant: Variant,
    role: Role,
    y: &G::Element,
    own: &OwnSecrets<G>,
    peer: &PeerElements<G>,
) -> ZValues<G> {
    let g = group;
    let add = |a: &G::Scalar, b: &G::Scalar| g.scalar_add(a, b);
    // R_peer * y^h_peer = g^{z_peer}
    let q = g.mul(&peer.r, &g.exp(y, &peer.h));
    let (e, s, z) = (&own.ephemeral, &own.secret, &own.id_key);
    let (pu, pe) = (&peer.u, &peer.ephemeral);

    let z1 = g.exp(pe, e);
    let z2 = g.exp(pu, s);
    let z3 = g.exp(&q, z);
    let (z4, z5) = match role {
        Role::Initiator => (g.exp(pu, e), g.exp(pe, s)),
        Role::Responder => (g.exp(pe, s), g.exp(pu, e)),
    };
    let z6 = g.exp(&g.mul(pe, &q), &add(e, z));
    let z7 = g.exp(&g.mul(pu, &q), &add(s, z));
    let mut out = vec![z1, z2, z3, z4, z5, z6, z7];

    if variant == Variant::Improved {
        let (z8, z9) = match role {
            Role::Initiator => (
                g.exp(&g.mul(pe, &q), &add(&add(s, z), e)),
                g.exp(&g.mul(pu, pe), &add(s, e)),
            ),
            Role::Responder => (
                g.exp(&g.mul(&g.mul(pe, pu), &q), &add(e, z)),
                g.exp(&g.mul(pu, pe), &add(s, e)),
            ),
        };
        out.push(z8);
        out.push(z9);
    }
    ZValues(out)
}
