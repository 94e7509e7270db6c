//! Adversary toolkit.

mod attack;
mod brute;
mod game;
mod poly;
mod profile;
mod span;

pub use attack::{attack_original, reproduce_attack, AttackOutcome, AttackReport, LeakedSecrets};
pub use brute::{brute_force_forward_secrecy, BruteRow, KnownValues};
pub use game::{GameInstance, GameState, LogEntry, Query, QueryKind, Response, SendInput};
pub use poly::{ExponentPoly, Monomial, Party, Sym};
pub use profile::{
    describe_certificate, describe_witness, profile_analysis, profile_analysis_mod, LeakageProfile,
    PartyLeakage, ReachabilityReport, SecretAssignment, ZVerdict, ANALYSIS_MODULUS,
    BUILTIN_PROFILES, ELEMENT_NAMES,
};
pub use span::{apply_dual, span_check, span_check_bounded, Certificate, SpanVerdict, Witness};
