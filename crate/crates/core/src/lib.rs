//! Pairing-free certificateless key exchange.
//!
//! The crate provides:
//!
//! - a prime-order [`group`] abstraction with a brute-forceable toy group
//!   and ristretto255;
//! - the KGC ([`kgc`]) and user ([`user`]) algorithms of a certificateless
//!   scheme with Schnorr-style partial private keys;
//! - the one-round [`handshake`] in two variants, `Original` (seven shared
//!   values) and `Improved` (nine);
//! - an [`adversary`] toolkit: a query-level security-game simulator with
//!   exposure and freshness rules, the leakage attack against the original
//!   variant, and a symbolic exponent-span analyzer that decides which
//!   shared values a given leakage profile can rebuild.
//!
//! A guide with worked examples lives in the `book/` directory of the
//! repository; its code listings are compiled as doctests of this crate.
//!
//! ```
//! use clke::group::ToyGroup;
//! use clke::handshake::{run_honest, Variant};
//! use clke::identity::Identity;
//! use clke::kgc::setup;
//! use clke::user::UserKeys;
//! use rand_chacha::ChaCha20Rng;
//! use rand_core::SeedableRng;
//!
//! let group = ToyGroup::default();
//! let mut rng = ChaCha20Rng::seed_from_u64(42);
//! let (msk, mpk) = setup(&group, &mut rng)?;
//! let alice = UserKeys::provision(&group, &msk, &mpk, Identity::new("alice")?, &mut rng)?;
//! let bob = UserKeys::provision(&group, &msk, &mpk, Identity::new("bob")?, &mut rng)?;
//! let run = run_honest(&group, &mpk, Variant::Improved, &alice, &bob, &mut rng)?;
//! assert_eq!(run.initiator.ssk, run.responder.ssk);
//! # Ok::<(), clke::Error>(())
//! ```

pub mod adversary;
mod error;
pub mod group;
pub mod handshake;
pub mod hash;
pub mod identity;
pub mod keyfile;
pub mod kgc;
pub mod signature;
pub mod user;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/keys.md")]
    mod keys {}
    #[doc = include_str!("../../../book/src/handshake.md")]
    mod handshake {}
    #[doc = include_str!("../../../book/src/attack.md")]
    mod attack {}
    #[doc = include_str!("../../../book/src/span.md")]
    mod span {}
    #[doc = include_str!("../../../book/src/game.md")]
    mod game {}
}
