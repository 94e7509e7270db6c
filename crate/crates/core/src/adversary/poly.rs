//! Multivariate polynomials over `Z_q` in the protocol's secret scalars.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::group::Group;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::A => "A",
            Party::B => "B",
        })
    }
}

/// A named scalar of the two-party world.
///
/// The declaration order fixes how monomials print: `e_B·S_A`, not
/// `S_A·e_B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    /// master secret `x`
    Master,
    /// KGC nonce `a` behind `R = g^a`
    IdNonce(Party),
    /// identity-based key `z = a + h x`
    IdKey(Party),
    /// ephemeral `e`
    Ephemeral(Party),
    /// secret value `S`
    Secret(Party),
    /// `h = H1(ID || R)`, public
    IdHash(Party),
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Master => f.write_str("x"),
            Sym::IdNonce(p) => write!(f, "a_{p}"),
            Sym::IdKey(p) => write!(f, "z_{p}"),
            Sym::Ephemeral(p) => write!(f, "e_{p}"),
            Sym::Secret(p) => write!(f, "S_{p}"),
            Sym::IdHash(p) => write!(f, "h_{p}"),
        }
    }
}

/// Product of symbols with positive exponents. The empty monomial is `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(BTreeMap<Sym, u32>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(s: Sym) -> Self {
        Self(BTreeMap::from([(s, 1)]))
    }

    pub fn from_syms(syms: &[Sym]) -> Self {
        syms.iter().fold(Self::one(), |m, s| m.mul(&Self::var(*s)))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (s, k) in &other.0 {
            *out.entry(*s).or_insert(0) += k;
        }
        Monomial(out)
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn syms(&self) -> impl Iterator<Item = (Sym, u32)> + '_ {
        self.0.iter().map(|(s, k)| (*s, *k))
    }

    /// Splits into the factor over `pred`-symbols and the rest.
    pub fn split(&self, pred: impl Fn(Sym) -> bool) -> (Monomial, Monomial) {
        let (yes, no): (BTreeMap<_, _>, BTreeMap<_, _>) =
            self.0.iter().partition(|(s, _)| pred(**s));
        (Monomial(yes), Monomial(no))
    }

    /// All monomials over `syms` of total degree at most `max_degree`.
    pub fn all_up_to(syms: &[Sym], max_degree: u32) -> Vec<Monomial> {
        let mut out = vec![Monomial::one()];
        let mut frontier = vec![(Monomial::one(), 0usize)];
        for _ in 0..max_degree {
            let mut next = Vec::new();
            for (m, start) in &frontier {
                for (i, s) in syms.iter().enumerate().skip(*start) {
                    let grown = m.mul(&Monomial::var(*s));
                    out.push(grown.clone());
                    next.push((grown, i));
                }
            }
            frontier = next;
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        for (s, k) in &self.0 {
            if !first {
                f.write_str("·")?;
            }
            first = false;
            if *k == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{k}")?;
            }
        }
        Ok(())
    }
}

pub(crate) fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (u128::from(a) * u128::from(b) % u128::from(m)) as u64
}

pub(crate) fn inv_mod(a: u64, m: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(m));
    mod_pow(a, m - 2, m)
}

/// Polynomial with coefficients reduced mod a prime `modulus`; zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentPoly {
    modulus: u64,
    terms: BTreeMap<Monomial, u64>,
}

impl ExponentPoly {
    pub fn zero(modulus: u64) -> Self {
        Self {
            modulus,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(modulus: u64, c: i64) -> Self {
        Self::term(modulus, Monomial::one(), c)
    }

    pub fn var(modulus: u64, s: Sym) -> Self {
        Self::term(modulus, Monomial::var(s), 1)
    }

    pub fn term(modulus: u64, m: Monomial, c: i64) -> Self {
        let mut p = Self::zero(modulus);
        p.add_term(m, reduce_signed(c, modulus));
        p
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coefficient(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: u64) {
        let c = c % self.modulus;
        if c == 0 {
            return;
        }
        let sum = (self.coefficient(&m) + c) % self.modulus;
        if sum == 0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        let mut out = Self::zero(self.modulus);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), mul_mod(*v, c, self.modulus));
        }
        out
    }

    /// Multiplies every term by the monomial `m`.
    pub fn shift(&self, m: &Monomial) -> Self {
        let mut out = Self::zero(self.modulus);
        for (k, v) in &self.terms {
            out.add_term(k.mul(m), *v);
        }
        out
    }

    pub fn symbols(&self) -> Vec<Sym> {
        let mut out: Vec<Sym> = self
            .terms
            .keys()
            .flat_map(|m| m.syms().map(|(s, _)| s))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Replaces every occurrence of `s` by `with`.
    pub fn substitute(&self, s: Sym, with: &ExponentPoly) -> Self {
        let mut out = Self::zero(self.modulus);
        for (m, c) in &self.terms {
            let (hit, rest) = m.split(|t| t == s);
            let k = hit.degree();
            let mut piece = Self::term(self.modulus, rest, 1).scale(*c);
            for _ in 0..k {
                piece = &piece * with;
            }
            out = &out + &piece;
        }
        out
    }

    /// Evaluates mod `modulus` with `assign` giving each symbol's value.
    pub fn eval(&self, assign: impl Fn(Sym) -> u64) -> u64 {
        let m = self.modulus;
        self.terms.iter().fold(0, |acc, (mono, c)| {
            let v = mono.syms().fold(*c, |t, (s, k)| {
                mul_mod(t, mod_pow(assign(s), u64::from(k), m), m)
            });
            (acc + v) % m
        })
    }

    /// Evaluates in the scalar field of `group`. Meaningful only when the
    /// group order equals `modulus`.
    pub fn eval_in<G: Group>(&self, group: &G, assign: impl Fn(Sym) -> G::Scalar) -> G::Scalar {
        self.terms
            .iter()
            .fold(group.scalar_zero(), |acc, (mono, c)| {
                let v = mono.syms().fold(group.scalar_from_u64(*c), |t, (s, k)| {
                    (0..k).fold(t, |t, _| group.scalar_mul(&t, &assign(s)))
                });
                group.scalar_add(&acc, &v)
            })
    }

    /// Re-reads the coefficients as small signed integers and reduces them
    /// under another modulus. Sound as long as every coefficient's
    /// magnitude is below half of both moduli.
    pub fn lift_to(&self, modulus: u64) -> Self {
        let mut out = Self::zero(modulus);
        for (m, c) in &self.terms {
            let (neg, mag) = self.signed(*c);
            let c = i64::try_from(mag).expect("coefficient fits i64");
            out.add_term(m.clone(), reduce_signed(if neg { -c } else { c }, modulus));
        }
        out
    }

    fn signed(&self, c: u64) -> (bool, u64) {
        if c > self.modulus / 2 {
            (true, self.modulus - c)
        } else {
            (false, c)
        }
    }
}

fn reduce_signed(c: i64, m: u64) -> u64 {
    let r = i128::from(c).rem_euclid(i128::from(m));
    r as u64
}

impl fmt::Display for ExponentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = self.signed(*c);
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let is_one = m.degree() == 0;
            match (mag, is_one) {
                (1, true) => f.write_str("1")?,
                (1, false) => write!(f, "{m}")?,
                (_, true) => write!(f, "{mag}")?,
                (_, false) => write!(f, "{mag}·{m}")?,
            }
        }
        Ok(())
    }
}

impl Add for &ExponentPoly {
    type Output = ExponentPoly;

    fn add(self, rhs: &ExponentPoly) -> ExponentPoly {
        assert_eq!(self.modulus, rhs.modulus, "mixed moduli");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }
}

impl Neg for &ExponentPoly {
    type Output = ExponentPoly;

    fn neg(self) -> ExponentPoly {
        self.scale(self.modulus - 1)
    }
}

impl Sub for &ExponentPoly {
    type Output = ExponentPoly;

    fn sub(self, rhs: &ExponentPoly) -> ExponentPoly {
        self + &(-rhs)
    }
}

impl Mul for &ExponentPoly {
    type Output = ExponentPoly;

    fn mul(self, rhs: &ExponentPoly) -> ExponentPoly {
        assert_eq!(self.modulus, rhs.modulus, "mixed moduli");
        let mut out = ExponentPoly::zero(self.modulus);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), mul_mod(*ca, *cb, self.modulus));
            }
        }
        out
    }
}
