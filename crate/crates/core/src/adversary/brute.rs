//! Exhaustive search on the toy group for the forward-secrecy leakage.
//!
//! With `z_A, z_B, e_A, S_B` (and the public `h_A, h_B`) fixed, every public
//! element is a product of `g, y, U_A, E_B` with known exponents:
//! `U_B = g^{S_B}`, `E_A = g^{e_A}`, `R_P = g^{z_P} y^{-h_P}`. Any value the
//! adversary can combine is therefore `g^{c0} y^{c1} U_A^{c2} E_B^{c3}` for
//! some `c` in `Z_q^4`. A combination matches `Z_k` when it agrees with it
//! for every choice of the unknowns `x, S_A, e_B`.

use super::poly::Party;
use crate::group::{Group, ToyGroup, ToyScalar};
use crate::handshake::{compute_z_values, OwnSecrets, PeerElements, Role, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnownValues {
    pub z_a: ToyScalar,
    pub z_b: ToyScalar,
    pub e_a: ToyScalar,
    pub s_b: ToyScalar,
    pub h_a: ToyScalar,
    pub h_b: ToyScalar,
}

impl KnownValues {
    pub fn h(&self, p: Party) -> ToyScalar {
        match p {
            Party::A => self.h_a,
            Party::B => self.h_b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteRow {
    /// 1-based Z index.
    pub index: usize,
    /// Every `c = (c0, c1, c2, c3)` that matches identically.
    pub matches: Vec<[u64; 4]>,
}

/// Honest `Z` values, from the initiator's own computation, for unknowns
/// `(x, S_A, e_B)`.
fn honest(
    group: &ToyGroup,
    variant: Variant,
    k: &KnownValues,
    x: ToyScalar,
    sa: ToyScalar,
    eb: ToyScalar,
) -> Vec<u64> {
    let g = group;
    let y = g.exp_g(&x);
    let own = OwnSecrets::<ToyGroup> {
        ephemeral: k.e_a,
        secret: sa,
        id_key: k.z_a,
    };
    // R_B = g^{z_B - h_B x}
    let ab = g.scalar_sub(&k.z_b, &g.scalar_mul(&k.h_b, &x));
    let peer = PeerElements::<ToyGroup> {
        u: g.exp_g(&k.s_b),
        r: g.exp_g(&ab),
        ephemeral: g.exp_g(&eb),
        h: k.h_b,
    };
    compute_z_values(g, variant, Role::Initiator, &y, &own, &peer)
        .0
        .iter()
        .map(|e| e.value())
        .collect()
}

pub fn brute_force_forward_secrecy(
    group: &ToyGroup,
    variant: Variant,
    known: &KnownValues,
) -> Vec<BruteRow> {
    let q = group.q();
    let scalars: Vec<ToyScalar> = group.scalars().collect();
    let mut table = Vec::with_capacity(scalars.len().pow(3));
    for x in &scalars {
        for sa in &scalars {
            for eb in &scalars {
                table.push((
                    [x.value(), sa.value(), eb.value()],
                    honest(group, variant, known, *x, *sa, *eb),
                ));
            }
        }
    }

    (1..=variant.z_count())
        .map(|index| {
            let mut matches = Vec::new();
            for c0 in 0..q {
                for c1 in 0..q {
                    for c2 in 0..q {
                        for c3 in 0..q {
                            let hit = table.iter().all(|([x, sa, eb], z)| {
                                let e = (c0 + c1 * x + c2 * sa + c3 * eb) % q;
                                group.exp_g(&group.scalar(e)).value() == z[index - 1]
                            });
                            if hit {
                                matches.push([c0, c1, c2, c3]);
                            }
                        }
                    }
                }
            }
            BruteRow { index, matches }
        })
        .collect()
}
