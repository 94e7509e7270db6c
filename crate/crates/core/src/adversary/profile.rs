//! Leakage profiles and per-Z reachability reports.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand_core::{CryptoRng, RngCore};

use super::poly::{ExponentPoly, Party, Sym};
use super::span::{span_check, Certificate, SpanVerdict, Witness};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::handshake::Variant;

/// `2^61 - 1`. Large enough that no coefficient arising in the analysis
/// wraps around.
pub const ANALYSIS_MODULUS: u64 = (1 << 61) - 1;

/// Public elements visible to any adversary, in a fixed order.
pub const ELEMENT_NAMES: [&str; 8] = ["g", "y", "U_A", "U_B", "R_A", "R_B", "E_A", "E_B"];

/// What one party has leaked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PartyLeakage {
    pub id_based_key: bool,
    pub secret_value: bool,
    pub ephemeral: bool,
    /// `U` was replaced by an adversarial key whose secret it chose.
    pub replaced_pk: bool,
}

impl PartyLeakage {
    pub const NONE: Self = Self {
        id_based_key: false,
        secret_value: false,
        ephemeral: false,
        replaced_pk: false,
    };

    pub fn secret_key() -> Self {
        Self {
            id_based_key: true,
            secret_value: true,
            ..Self::NONE
        }
    }

    pub fn union(self, o: Self) -> Self {
        Self {
            id_based_key: self.id_based_key || o.id_based_key,
            secret_value: self.secret_value || o.secret_value,
            ephemeral: self.ephemeral || o.ephemeral,
            replaced_pk: self.replaced_pk || o.replaced_pk,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct LeakageProfile {
    pub master_key: bool,
    pub a: PartyLeakage,
    pub b: PartyLeakage,
}

/// Names accepted by [`LeakageProfile::builtin`].
pub const BUILTIN_PROFILES: [&str; 7] = [
    "forward-secrecy",
    "kci",
    "pkg-forward",
    "session-info",
    "session-info-idkeys",
    "session-info-ephemerals",
    "full-compromise",
];

impl LeakageProfile {
    pub fn party(&self, p: Party) -> &PartyLeakage {
        match p {
            Party::A => &self.a,
            Party::B => &self.b,
        }
    }

    fn party_mut(&mut self, p: Party) -> &mut PartyLeakage {
        match p {
            Party::A => &mut self.a,
            Party::B => &mut self.b,
        }
    }

    /// The leakage of the original attack: both identity-based keys, A's
    /// ephemeral and B's secret value.
    pub fn forward_secrecy() -> Self {
        Self {
            master_key: false,
            a: PartyLeakage {
                id_based_key: true,
                ephemeral: true,
                ..PartyLeakage::NONE
            },
            b: PartyLeakage {
                id_based_key: true,
                secret_value: true,
                ..PartyLeakage::NONE
            },
        }
    }

    /// A's full private key.
    pub fn kci() -> Self {
        Self {
            a: PartyLeakage::secret_key(),
            ..Self::default()
        }
    }

    /// Master key plus every identity-based key the KGC issued.
    pub fn pkg_forward() -> Self {
        let id = PartyLeakage {
            id_based_key: true,
            ..PartyLeakage::NONE
        };
        Self {
            master_key: true,
            a: id,
            b: id,
        }
    }

    pub fn session_info_id_keys() -> Self {
        let id = PartyLeakage {
            id_based_key: true,
            ..PartyLeakage::NONE
        };
        Self {
            master_key: false,
            a: id,
            b: id,
        }
    }

    pub fn session_info_ephemerals() -> Self {
        let e = PartyLeakage {
            ephemeral: true,
            ..PartyLeakage::NONE
        };
        Self {
            master_key: false,
            a: e,
            b: e,
        }
    }

    /// Both full private keys and both ephemerals.
    pub fn full_compromise() -> Self {
        let all = PartyLeakage {
            ephemeral: true,
            ..PartyLeakage::secret_key()
        };
        Self {
            master_key: false,
            a: all,
            b: all,
        }
    }

    /// Resolves a built-in name. `session-info` has two readings and
    /// expands to both.
    pub fn builtin(name: &str) -> Option<Vec<(String, LeakageProfile)>> {
        let one = |n: &str, p| Some(vec![(n.to_string(), p)]);
        match name {
            "forward-secrecy" => one(name, Self::forward_secrecy()),
            "kci" => one(name, Self::kci()),
            "pkg-forward" => one(name, Self::pkg_forward()),
            "session-info-idkeys" => one(name, Self::session_info_id_keys()),
            "session-info-ephemerals" => one(name, Self::session_info_ephemerals()),
            "session-info" => Some(vec![
                (
                    "session-info-idkeys".to_string(),
                    Self::session_info_id_keys(),
                ),
                (
                    "session-info-ephemerals".to_string(),
                    Self::session_info_ephemerals(),
                ),
            ]),
            "full-compromise" => one(name, Self::full_compromise()),
            _ => None,
        }
    }

    /// Scalars the adversary holds. The `h` values are public hash outputs.
    pub fn known_symbols(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::from([Sym::IdHash(Party::A), Sym::IdHash(Party::B)]);
        if self.master_key {
            out.insert(Sym::Master);
        }
        for p in [Party::A, Party::B] {
            let l = self.party(p);
            if l.id_based_key {
                out.insert(Sym::IdKey(p));
            }
            if l.secret_value || l.replaced_pk {
                out.insert(Sym::Secret(p));
            }
            if l.ephemeral {
                out.insert(Sym::Ephemeral(p));
            }
        }
        out
    }

    /// The exponent of `g^{z_P}` in this profile's variables: `z_P` itself
    /// when revealed, otherwise `a_P + h_P x`.
    fn id_key_poly(&self, p: Party, modulus: u64) -> ExponentPoly {
        if self.party(p).id_based_key {
            ExponentPoly::var(modulus, Sym::IdKey(p))
        } else {
            let hx = &ExponentPoly::var(modulus, Sym::IdHash(p))
                * &ExponentPoly::var(modulus, Sym::Master);
            &ExponentPoly::var(modulus, Sym::IdNonce(p)) + &hx
        }
    }

    /// Exponent polynomials of [`ELEMENT_NAMES`].
    pub fn element_polys(&self, modulus: u64) -> Vec<(String, ExponentPoly)> {
        let v = |s| ExponentPoly::var(modulus, s);
        let r = |p: Party| {
            let hx = &v(Sym::IdHash(p)) * &v(Sym::Master);
            &self.id_key_poly(p, modulus) - &hx
        };
        let polys = [
            ExponentPoly::constant(modulus, 1),
            v(Sym::Master),
            v(Sym::Secret(Party::A)),
            v(Sym::Secret(Party::B)),
            r(Party::A),
            r(Party::B),
            v(Sym::Ephemeral(Party::A)),
            v(Sym::Ephemeral(Party::B)),
        ];
        ELEMENT_NAMES
            .iter()
            .map(|n| n.to_string())
            .zip(polys)
            .collect()
    }

    /// Exponents of `Z1..Z7` (or `Z1..Z9`).
    pub fn target_polys(&self, variant: Variant, modulus: u64) -> Vec<ExponentPoly> {
        target_exponents(variant, modulus, |p| self.id_key_poly(p, modulus))
    }

    /// Parses a comma-separated reveal list such as `z_A,z_B,e_A,S_B`.
    ///
    /// Tokens: `x` or `master`, `z_P`, `S_P`, `e_P`, `sk_P` (both `z_P` and
    /// `S_P`), `pk_P` (replaced public key), with `P` one of `A`, `B`.
    pub fn parse_reveals(spec: &str) -> Result<Self> {
        let mut out = Self::default();
        for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if tok == "x" || tok == "master" {
                out.master_key = true;
                continue;
            }
            let (kind, party) = tok
                .rsplit_once('_')
                .ok_or_else(|| Error::Parse(format!("unknown reveal {tok:?}")))?;
            let party = match party {
                "A" => Party::A,
                "B" => Party::B,
                _ => return Err(Error::Parse(format!("unknown party in {tok:?}"))),
            };
            let l = out.party_mut(party);
            let add = match kind {
                "z" => PartyLeakage {
                    id_based_key: true,
                    ..PartyLeakage::NONE
                },
                "S" => PartyLeakage {
                    secret_value: true,
                    ..PartyLeakage::NONE
                },
                "e" => PartyLeakage {
                    ephemeral: true,
                    ..PartyLeakage::NONE
                },
                "sk" => PartyLeakage::secret_key(),
                "pk" => PartyLeakage {
                    replaced_pk: true,
                    ..PartyLeakage::NONE
                },
                _ => return Err(Error::Parse(format!("unknown reveal {tok:?}"))),
            };
            *l = l.union(add);
        }
        Ok(out)
    }
}

impl FromStr for LeakageProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_reveals(s)
    }
}

impl fmt::Display for LeakageProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.master_key {
            parts.push("x".to_string());
        }
        for p in [Party::A, Party::B] {
            let l = self.party(p);
            if l.id_based_key {
                parts.push(format!("z_{p}"));
            }
            if l.secret_value {
                parts.push(format!("S_{p}"));
            }
            if l.ephemeral {
                parts.push(format!("e_{p}"));
            }
            if l.replaced_pk {
                parts.push(format!("pk_{p}"));
            }
        }
        if parts.is_empty() {
            f.write_str("(nothing)")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

/// The Z exponent table, with `g^{z_P}` given by `id_key`.
fn target_exponents(
    variant: Variant,
    modulus: u64,
    id_key: impl Fn(Party) -> ExponentPoly,
) -> Vec<ExponentPoly> {
    let v = |s| ExponentPoly::var(modulus, s);
    let (ea, eb) = (v(Sym::Ephemeral(Party::A)), v(Sym::Ephemeral(Party::B)));
    let (sa, sb) = (v(Sym::Secret(Party::A)), v(Sym::Secret(Party::B)));
    let (za, zb) = (id_key(Party::A), id_key(Party::B));
    let mut out = vec![
        &ea * &eb,
        &sa * &sb,
        &za * &zb,
        &ea * &sb,
        &sa * &eb,
        &(&ea + &za) * &(&eb + &zb),
        &(&sa + &za) * &(&sb + &zb),
    ];
    if variant == Variant::Improved {
        out.push(&(&(&sa + &za) + &ea) * &(&eb + &zb));
        out.push(&(&sa + &ea) * &(&sb + &eb));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZVerdict {
    /// 1-based.
    pub index: usize,
    pub target: ExponentPoly,
    pub verdict: SpanVerdict,
}

#[derive(Clone, Debug)]
pub struct ReachabilityReport {
    pub name: String,
    pub profile: LeakageProfile,
    pub variant: Variant,
    pub knowns: BTreeSet<Sym>,
    pub elements: Vec<(String, ExponentPoly)>,
    pub rows: Vec<ZVerdict>,
}

impl ReachabilityReport {
    pub fn verdict(&self, index: usize) -> Option<&SpanVerdict> {
        self.rows
            .iter()
            .find(|r| r.index == index)
            .map(|r| &r.verdict)
    }

    pub fn is_reachable(&self, index: usize) -> bool {
        self.verdict(index).is_some_and(SpanVerdict::is_reachable)
    }

    pub fn unreachable(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| !r.verdict.is_reachable())
            .map(|r| r.index)
            .collect()
    }

    /// The session key is derivable iff every Z is.
    pub fn session_key_derivable(&self) -> bool {
        self.rows.iter().all(|r| r.verdict.is_reachable())
    }
}

/// `E_B^(e_A) * g^(z_A·z_B)`.
pub fn describe_witness(w: &Witness) -> String {
    let parts: Vec<String> = w
        .support()
        .map(|(name, c)| {
            if c == &ExponentPoly::constant(c.modulus(), 1) {
                name.clone()
            } else {
                format!("{name}^({c})")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" * ")
    }
}

pub fn describe_certificate(c: &Certificate) -> String {
    match c {
        Certificate::MissingMonomial(m) => format!("no source for monomial {m}"),
        Certificate::Dual(d) => {
            let support: Vec<String> = d.iter().map(|(m, _)| m.to_string()).collect();
            format!("dual functional on {{{}}}", support.join(", "))
        }
    }
}

impl fmt::Display for ReachabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let knowns: Vec<String> = self.knowns.iter().map(Sym::to_string).collect();
        writeln!(f, "profile: {} [{}]", self.name, self.profile)?;
        writeln!(f, "variant: {}", self.variant)?;
        writeln!(f, "known scalars: {}", knowns.join(", "))?;
        for r in &self.rows {
            match &r.verdict {
                SpanVerdict::Reachable(w) => {
                    writeln!(f, "Z{}  Reachable    {}", r.index, describe_witness(w))?
                }
                SpanVerdict::Unreachable(c) => {
                    writeln!(f, "Z{}  Unreachable  {}", r.index, describe_certificate(c))?
                }
            }
        }
        if self.session_key_derivable() {
            writeln!(f, "session key: derivable")
        } else {
            let zs: Vec<String> = self.unreachable().iter().map(|i| format!("Z{i}")).collect();
            writeln!(
                f,
                "session key: not derivable ({} unreachable)",
                zs.join(", ")
            )
        }
    }
}

pub fn profile_analysis(
    name: &str,
    profile: &LeakageProfile,
    variant: Variant,
) -> ReachabilityReport {
    profile_analysis_mod(name, profile, variant, ANALYSIS_MODULUS)
}

/// As [`profile_analysis`] with polynomials over `Z_modulus`.
pub fn profile_analysis_mod(
    name: &str,
    profile: &LeakageProfile,
    variant: Variant,
    modulus: u64,
) -> ReachabilityReport {
    let knowns = profile.known_symbols();
    let elements = profile.element_polys(modulus);
    let rows = profile
        .target_polys(variant, modulus)
        .into_iter()
        .enumerate()
        .map(|(i, target)| {
            let verdict = span_check(&knowns, &elements, &target);
            ZVerdict {
                index: i + 1,
                target,
                verdict,
            }
        })
        .collect();
    ReachabilityReport {
        name: name.to_string(),
        profile: *profile,
        variant,
        knowns,
        elements,
        rows,
    }
}

/// Concrete values for every symbol of a two-party world.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SecretAssignment<G: Group> {
    pub x: G::Scalar,
    pub a: [G::Scalar; 2],
    pub h: [G::Scalar; 2],
    pub e: [G::Scalar; 2],
    pub s: [G::Scalar; 2],
}

fn idx(p: Party) -> usize {
    match p {
        Party::A => 0,
        Party::B => 1,
    }
}

impl<G: Group> SecretAssignment<G> {
    pub fn random<R: RngCore + CryptoRng + ?Sized>(group: &G, rng: &mut R) -> Result<Self> {
        let mut r = || group.scalar_random(rng);
        Ok(Self {
            x: r()?,
            a: [r()?, r()?],
            h: [r()?, r()?],
            e: [r()?, r()?],
            s: [r()?, r()?],
        })
    }

    pub fn z(&self, group: &G, p: Party) -> G::Scalar {
        let i = idx(p);
        group.scalar_add(&self.a[i], &group.scalar_mul(&self.h[i], &self.x))
    }

    pub fn value(&self, group: &G, s: Sym) -> G::Scalar {
        match s {
            Sym::Master => self.x,
            Sym::IdNonce(p) => self.a[idx(p)],
            Sym::IdKey(p) => self.z(group, p),
            Sym::Ephemeral(p) => self.e[idx(p)],
            Sym::Secret(p) => self.s[idx(p)],
            Sym::IdHash(p) => self.h[idx(p)],
        }
    }

    /// The elements of [`ELEMENT_NAMES`], computed directly.
    pub fn elements(&self, group: &G) -> Vec<G::Element> {
        let [aa, ab] = self.a;
        let [sa, sb] = self.s;
        let [ea, eb] = self.e;
        [group.scalar_one(), self.x, sa, sb, aa, ab, ea, eb]
            .iter()
            .map(|v| group.exp_g(v))
            .collect()
    }

    /// `g^Z_i` for every index, from the exponent table.
    pub fn z_values(&self, group: &G, variant: Variant) -> Vec<G::Element> {
        (1..=variant.z_count())
            .map(|i| group.exp_g(&self.z_exponent(group, variant, i)))
            .collect()
    }

    /// The scalar exponent of `Z_i`.
    pub fn z_exponent(&self, group: &G, variant: Variant, i: usize) -> G::Scalar {
        let add = |a: &G::Scalar, b: &G::Scalar| group.scalar_add(a, b);
        let mul = |a: &G::Scalar, b: &G::Scalar| group.scalar_mul(a, b);
        let [ea, eb] = self.e;
        let [sa, sb] = self.s;
        let (za, zb) = (self.z(group, Party::A), self.z(group, Party::B));
        match (i, variant) {
            (1, _) => mul(&ea, &eb),
            (2, _) => mul(&sa, &sb),
            (3, _) => mul(&za, &zb),
            (4, _) => mul(&ea, &sb),
            (5, _) => mul(&sa, &eb),
            (6, _) => mul(&add(&ea, &za), &add(&eb, &zb)),
            (7, _) => mul(&add(&sa, &za), &add(&sb, &zb)),
            (8, Variant::Improved) => mul(&add(&add(&sa, &za), &ea), &add(&eb, &zb)),
            (9, Variant::Improved) => mul(&add(&sa, &ea), &add(&sb, &eb)),
            _ => panic!("no Z{i} in the {variant} variant"),
        }
    }
}

#[cfg(test)]
mod tests {
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    use super::*;
    use crate::adversary::poly::Monomial;
    use crate::group::ToyGroup;

    fn eb_sa() -> Monomial {
        Monomial::from_syms(&[Sym::Ephemeral(Party::B), Sym::Secret(Party::A)])
    }

    #[test]
    fn forward_secrecy_on_improved() {
        let r = profile_analysis("fs", &LeakageProfile::forward_secrecy(), Variant::Improved);
        for i in [1, 2, 3, 4, 6, 7] {
            assert!(r.is_reachable(i), "Z{i}\n{r}");
        }
        for i in [5, 8, 9] {
            assert_eq!(
                r.verdict(i).and_then(SpanVerdict::certificate),
                Some(&Certificate::MissingMonomial(eb_sa())),
                "Z{i}"
            );
        }
        assert!(!r.session_key_derivable());
    }

    #[test]
    fn full_compromise_reaches_everything() {
        let r = profile_analysis(
            "full",
            &LeakageProfile::full_compromise(),
            Variant::Improved,
        );
        assert!(r.session_key_derivable(), "{r}");
    }

    #[test]
    fn witnesses_rebuild_elements_on_the_toy_group() {
        let g = ToyGroup::default();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for name in BUILTIN_PROFILES {
            for (n, p) in LeakageProfile::builtin(name).unwrap() {
                let r = profile_analysis(&n, &p, Variant::Improved);
                for row in &r.rows {
                    let Some(w) = row.verdict.witness() else {
                        continue;
                    };
                    let lifted = Witness {
                        coefficients: w
                            .coefficients
                            .iter()
                            .map(|(k, c)| (k.clone(), c.lift_to(11)))
                            .collect(),
                    };
                    for _ in 0..20 {
                        let sa = SecretAssignment::random(&g, &mut rng).unwrap();
                        let got = lifted.instantiate(&g, &sa.elements(&g), |s| sa.value(&g, s));
                        assert_eq!(
                            got,
                            sa.z_values(&g, Variant::Improved)[row.index - 1],
                            "{n} Z{}",
                            row.index
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn reveal_lists() {
        let p: LeakageProfile = "z_A, z_B,e_A,S_B".parse().unwrap();
        assert_eq!(p, LeakageProfile::forward_secrecy());
        assert_eq!(p.to_string(), "z_A,e_A,z_B,S_B");
        assert_eq!(
            "sk_A".parse::<LeakageProfile>().unwrap(),
            LeakageProfile::kci()
        );
        assert!("q_A".parse::<LeakageProfile>().is_err());
        assert!("z_C".parse::<LeakageProfile>().is_err());
    }
}
