//! Exponent-span derivability.
//!
//! A generic-group adversary holding elements `g^{P_1}, .., g^{P_n}` can
//! multiply them and raise them to scalars it knows. Everything it can build
//! is therefore `g^{sum c_i P_i}` where each `c_i` is a function of known
//! scalars only. [`span_check`] decides whether a target exponent `T` has
//! that form, with each `c_i` a polynomial in the known symbols.
//!
//! Hash outputs are opaque known constants and exponentiation by an unknown
//! is not available.
//!
//! Decision procedure:
//!
//! 1. Split every monomial into its known and unknown factor. If some
//!    monomial of `T` has an unknown factor that occurs in no `P_i`, no
//!    choice of coefficients can produce it. That factor is returned as a
//!    [`Certificate::MissingMonomial`].
//! 2. Otherwise solve `sum_{i,m} c_{i,m} (m P_i) = T` over `Z_q`. Here `m`
//!    ranges over monomials in the known symbols up to the known-degree of
//!    `T`. A solution is a [`Witness`]. Inconsistency yields a dual vector
//!    that vanishes on every generator but not on `T`.

use std::collections::{BTreeMap, BTreeSet};

use super::poly::{inv_mod, mul_mod, ExponentPoly, Monomial, Sym};
use crate::group::Group;

/// Coefficient polynomials (in known symbols only), one per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub coefficients: Vec<(String, ExponentPoly)>,
}

impl Witness {
    /// `sum c_i P_i`, which equals the target for a valid witness.
    pub fn combine(&self, elements: &[(String, ExponentPoly)]) -> ExponentPoly {
        let modulus = elements.first().map_or(2, |(_, p)| p.modulus());
        self.coefficients
            .iter()
            .zip(elements)
            .fold(ExponentPoly::zero(modulus), |acc, ((_, c), (_, p))| {
                &acc + &(c * p)
            })
    }

    /// Builds `prod element_i^{c_i}` with the coefficients evaluated under
    /// `assign`, the way an adversary would on a concrete instance.
    pub fn instantiate<G: Group>(
        &self,
        group: &G,
        elements: &[G::Element],
        assign: impl Fn(Sym) -> G::Scalar + Copy,
    ) -> G::Element {
        self.coefficients
            .iter()
            .zip(elements)
            .fold(group.identity(), |acc, ((_, c), el)| {
                group.mul(&acc, &group.exp(el, &c.eval_in(group, assign)))
            })
    }

    /// Elements with a nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = &(String, ExponentPoly)> {
        self.coefficients.iter().filter(|(_, c)| !c.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Unknown factor of a target monomial with no source among the elements.
    MissingMonomial(Monomial),
    /// Linear functional on monomials that is zero on every generator
    /// `m P_i` and nonzero on the target.
    Dual(Vec<(Monomial, u64)>),
}

impl Certificate {
    pub fn monomial(&self) -> Option<&Monomial> {
        match self {
            Certificate::MissingMonomial(m) => Some(m),
            Certificate::Dual(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpanVerdict {
    Reachable(Witness),
    Unreachable(Certificate),
}

impl SpanVerdict {
    pub fn is_reachable(&self) -> bool {
        matches!(self, SpanVerdict::Reachable(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SpanVerdict::Reachable(w) => Some(w),
            SpanVerdict::Unreachable(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            SpanVerdict::Unreachable(c) => Some(c),
            SpanVerdict::Reachable(_) => None,
        }
    }
}

fn known_degree(m: &Monomial, knowns: &BTreeSet<Sym>) -> u32 {
    m.syms()
        .filter(|(s, _)| knowns.contains(s))
        .map(|(_, k)| k)
        .sum()
}

/// Runs the check with coefficient degree bounded by the target's degree
/// in known symbols.
pub fn span_check(
    knowns: &BTreeSet<Sym>,
    elements: &[(String, ExponentPoly)],
    target: &ExponentPoly,
) -> SpanVerdict {
    let bound = target
        .terms()
        .map(|(m, _)| known_degree(m, knowns))
        .max()
        .unwrap_or(0);
    span_check_bounded(knowns, elements, target, bound)
}

pub fn span_check_bounded(
    knowns: &BTreeSet<Sym>,
    elements: &[(String, ExponentPoly)],
    target: &ExponentPoly,
    max_coefficient_degree: u32,
) -> SpanVerdict {
    let modulus = target.modulus();
    let is_known = |s: Sym| knowns.contains(&s);

    let sources: BTreeSet<Monomial> = elements
        .iter()
        .flat_map(|(_, p)| {
            p.terms()
                .map(|(m, _)| m.split(is_known).1)
                .collect::<Vec<_>>()
        })
        .collect();
    if let Some(missing) = target
        .terms()
        .map(|(m, _)| m.split(is_known).1)
        .find(|u| !sources.contains(u))
    {
        return SpanVerdict::Unreachable(Certificate::MissingMonomial(missing));
    }

    let mut used: BTreeSet<Sym> = target.symbols().into_iter().collect();
    for (_, p) in elements {
        used.extend(p.symbols());
    }
    let coefficient_syms: Vec<Sym> = used.into_iter().filter(|s| is_known(*s)).collect();
    let shifts = Monomial::all_up_to(&coefficient_syms, max_coefficient_degree);

    let generators: Vec<(usize, &Monomial, ExponentPoly)> = elements
        .iter()
        .enumerate()
        .flat_map(|(i, (_, p))| shifts.iter().map(move |m| (i, m, p.shift(m))))
        .filter(|(_, _, p)| !p.is_zero())
        .collect();

    let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
    for (_, _, p) in &generators {
        for (m, _) in p.terms() {
            let n = rows.len();
            rows.entry(m.clone()).or_insert(n);
        }
    }
    for (m, _) in target.terms() {
        let n = rows.len();
        rows.entry(m.clone()).or_insert(n);
    }

    let ncols = generators.len();
    let mut system = vec![vec![0u64; ncols + 1]; rows.len()];
    for (col, (_, _, p)) in generators.iter().enumerate() {
        for (m, c) in p.terms() {
            system[rows[m]][col] = c;
        }
    }
    for (m, c) in target.terms() {
        system[rows[m]][ncols] = c;
    }

    match solve(system.clone(), ncols, modulus, false) {
        Solve::Solution(sol) => {
            let mut coefficients: Vec<(String, ExponentPoly)> = elements
                .iter()
                .map(|(n, _)| (n.clone(), ExponentPoly::zero(modulus)))
                .collect();
            for (col, (i, m, _)) in generators.iter().enumerate() {
                if sol[col] != 0 {
                    let t = ExponentPoly::term(modulus, (*m).clone(), 1).scale(sol[col]);
                    coefficients[*i].1 = &coefficients[*i].1 + &t;
                }
            }
            SpanVerdict::Reachable(Witness { coefficients })
        }
        Solve::Inconsistent(_) => {
            let Solve::Inconsistent(Some(lambda)) = solve(system, ncols, modulus, true) else {
                unreachable!("tracked elimination reproduces the inconsistency");
            };
            let by_index: BTreeMap<usize, &Monomial> = rows.iter().map(|(m, i)| (*i, m)).collect();
            let dual = lambda
                .into_iter()
                .enumerate()
                .filter(|(_, v)| *v != 0)
                .map(|(i, v)| (by_index[&i].clone(), v))
                .collect();
            SpanVerdict::Unreachable(Certificate::Dual(dual))
        }
    }
}

/// Applies a dual functional to a polynomial.
pub fn apply_dual(dual: &[(Monomial, u64)], p: &ExponentPoly) -> u64 {
    dual.iter().fold(0, |acc, (m, v)| {
        (acc + mul_mod(*v, p.coefficient(m), p.modulus())) % p.modulus()
    })
}

enum Solve {
    Solution(Vec<u64>),
    Inconsistent(Option<Vec<u64>>),
}

/// Gauss-Jordan over `Z_modulus` on an augmented matrix. With `track`, row
/// operations are mirrored on an identity matrix so an inconsistent row
/// comes with the combination of original rows that produced it.
fn solve(mut a: Vec<Vec<u64>>, ncols: usize, modulus: u64, track: bool) -> Solve {
    let nrows = a.len();
    let mut t: Vec<Vec<u64>> = if track {
        (0..nrows)
            .map(|i| {
                let mut r = vec![0; nrows];
                r[i] = 1;
                r
            })
            .collect()
    } else {
        Vec::new()
    };
    let sub_scaled = |dst: &mut Vec<u64>, src: &[u64], f: u64| {
        for (d, s) in dst.iter_mut().zip(src) {
            if *s != 0 {
                *d = (*d + modulus - mul_mod(f, *s, modulus)) % modulus;
            }
        }
    };

    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        let Some(r) = (next..nrows).find(|r| a[*r][col] != 0) else {
            continue;
        };
        a.swap(r, next);
        if track {
            t.swap(r, next);
        }
        let inv = inv_mod(a[next][col], modulus);
        for v in a[next].iter_mut() {
            *v = mul_mod(*v, inv, modulus);
        }
        if track {
            for v in t[next].iter_mut() {
                *v = mul_mod(*v, inv, modulus);
            }
        }
        let pivot_row = a[next].clone();
        let pivot_track = if track { t[next].clone() } else { Vec::new() };
        for rr in 0..nrows {
            if rr != next && a[rr][col] != 0 {
                let f = a[rr][col];
                sub_scaled(&mut a[rr], &pivot_row, f);
                if track {
                    sub_scaled(&mut t[rr], &pivot_track, f);
                }
            }
        }
        pivots.push((next, col));
        next += 1;
        if next == nrows {
            break;
        }
    }

    if let Some(bad) = (next..nrows).find(|r| a[*r][ncols] != 0) {
        return Solve::Inconsistent(track.then(|| t[bad].clone()));
    }
    let mut sol = vec![0; ncols];
    for (r, c) in pivots {
        sol[c] = a[r][ncols];
    }
    Solve::Solution(sol)
}
