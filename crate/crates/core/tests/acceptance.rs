//! Acceptance criteria 1 to 8, one function each.
//!
//! Runs with a small harness of its own so that every criterion prints a
//! PASS or FAIL line in `cargo test` output. Arguments that do not start
//! with `-` filter criteria by substring.

use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};

use clke::adversary::{
    brute_force_forward_secrecy, profile_analysis, profile_analysis_mod, reproduce_attack,
    Certificate, GameState, KnownValues, LeakageProfile, Monomial, Party, Query, Response,
    SecretAssignment, SendInput, SpanVerdict, Sym, Witness, BUILTIN_PROFILES,
};
use clke::group::{Group, Ristretto255, ToyGroup};
use clke::handshake::{run_honest, HandshakeMessage, Variant};
use clke::identity::Identity;
use clke::kgc::setup;
use clke::user::UserKeys;
use clke::Error;
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn id(s: &str) -> Identity {
    Identity::try_from(s).unwrap()
}

fn honest_runs<G: Group>(
    group: &G,
    variant: Variant,
    seeds: std::ops::Range<u64>,
) -> Result<usize, String> {
    let mut agreed = 0;
    for seed in seeds {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (msk, mpk) = setup(group, &mut rng).unwrap();
        let a = UserKeys::provision(group, &msk, &mpk, id("alice"), &mut rng).unwrap();
        let b = UserKeys::provision(group, &msk, &mpk, id("bob"), &mut rng).unwrap();
        let run = run_honest(group, &mpk, variant, &a, &b, &mut rng)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(
            run.initiator.ssk.is_some() && run.initiator.ssk == run.responder.ssk,
            || format!("{variant} seed {seed}: keys differ"),
        )?;
        agreed += 1;
    }
    Ok(agreed)
}

fn criterion_1() -> Check {
    let mut lines = Vec::new();
    for v in [Variant::Original, Variant::Improved] {
        let toy = honest_runs(&ToyGroup::default(), v, 0..1000)?;
        let prod = honest_runs(&Ristretto255, v, 0..10)?;
        lines.push(format!("{v}: toy {toy}/1000, production {prod}/10"));
    }
    Ok(lines.join("; "))
}

fn criterion_2() -> Check {
    let g = ToyGroup::default();
    let q = g.q();
    for seed in 0..100 {
        let mut rng = ChaCha20Rng::seed_from_u64(10_000 + seed);
        let (msk, mpk) = setup(&g, &mut rng).unwrap();
        let a = UserKeys::provision(&g, &msk, &mpk, id("alice"), &mut rng).unwrap();
        let b = UserKeys::provision(&g, &msk, &mpk, id("bob"), &mut rng).unwrap();
        let run = run_honest(&g, &mpk, Variant::Improved, &a, &b, &mut rng).unwrap();
        let (ra, rb) = (&run.initiator, &run.responder);
        let (ea, sa, za) = (
            ra.ephemeral.secret.value(),
            a.sk.secret.value(),
            a.sk.partial.z.value(),
        );
        let (eb, sb, zb) = (
            rb.ephemeral.secret.value(),
            b.sk.secret.value(),
            b.sk.partial.z.value(),
        );
        let want = [
            ea * eb,
            sa * sb,
            za * zb,
            ea * sb,
            sa * eb,
            (ea + za) * (eb + zb),
            (sa + za) * (sb + zb),
            (sa + za + ea) * (eb + zb),
            (sa + ea) * (sb + eb),
        ];
        for (side, rec) in [("initiator", ra), ("responder", rb)] {
            let z = rec.z.as_ref().unwrap();
            for (i, w) in want.iter().enumerate() {
                let got = g.dlog(&z.0[i]).unwrap().value();
                ensure(got == w % q, || {
                    format!(
                        "seed {seed} {side} Z{}: dlog {got}, expected {}",
                        i + 1,
                        w % q
                    )
                })?;
            }
        }
    }
    Ok("100 instances, Z1..Z9, both roles".into())
}

fn criterion_3() -> Check {
    let mut matched = 0;
    let mut fresh = 0;
    let mut z5_only = 0;
    for seed in 0..1000 {
        let r = reproduce_attack(ToyGroup::default(), Variant::Original, seed)
            .map_err(|e| e.to_string())?;
        if r.matched() {
            matched += 1;
        }
        if r.exposed == [false, false] && r.fresh == [true, true] {
            fresh += 1;
        }
        let m = r.z_matches();
        if m.iter().enumerate().all(|(i, ok)| *ok || i == 4) {
            z5_only += 1;
        }
    }
    let detail = format!(
        "attack key equals honest key in {matched}/1000; unexposed and fresh in {fresh}/1000; \
         all Z except Z5 reproduced in {z5_only}/1000"
    );
    ensure(matched == 1000 && fresh == 1000, || detail.clone())?;
    Ok(detail)
}

fn eb_sa() -> Monomial {
    Monomial::from_syms(&[Sym::Ephemeral(Party::B), Sym::Secret(Party::A)])
}

fn random_known(g: &ToyGroup, rng: &mut ChaCha20Rng) -> KnownValues {
    let mut r = || g.scalar_random(rng).unwrap();
    KnownValues {
        z_a: r(),
        z_b: r(),
        e_a: r(),
        s_b: r(),
        h_a: r(),
        h_b: r(),
    }
}

fn criterion_4() -> Check {
    let report = profile_analysis(
        "forward-secrecy",
        &LeakageProfile::forward_secrecy(),
        Variant::Improved,
    );
    for i in [8, 9] {
        let cert = report.verdict(i).and_then(SpanVerdict::certificate);
        ensure(cert == Some(&Certificate::MissingMonomial(eb_sa())), || {
            format!("Z{i}: expected certificate e_B·S_A, got {cert:?}")
        })?;
    }
    let g = ToyGroup::default();
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let fixings = 20;
    for _ in 0..fixings {
        let known = random_known(&g, &mut rng);
        let rows = brute_force_forward_secrecy(&g, Variant::Improved, &known);
        for row in &rows[7..] {
            ensure(row.matches.is_empty(), || {
                format!("Z{} matched by {:?} with {known:?}", row.index, row.matches)
            })?;
        }
    }
    Ok(format!(
        "Z8, Z9 unreachable (e_B·S_A); 0 counterexamples among 11^4 combinations x {fixings} leak fixings"
    ))
}

fn lift(w: &Witness, q: u64) -> Witness {
    Witness {
        coefficients: w
            .coefficients
            .iter()
            .map(|(n, c)| (n.clone(), c.lift_to(q)))
            .collect(),
    }
}

fn criterion_5() -> Check {
    let g = ToyGroup::default();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut witnesses = 0;
    for name in BUILTIN_PROFILES {
        for (n, p) in LeakageProfile::builtin(name).unwrap() {
            for v in [Variant::Original, Variant::Improved] {
                let report = profile_analysis(&n, &p, v);
                for row in &report.rows {
                    let Some(w) = row.verdict.witness() else {
                        continue;
                    };
                    let w = lift(w, g.q());
                    witnesses += 1;
                    for _ in 0..100 {
                        let sa = SecretAssignment::random(&g, &mut rng).unwrap();
                        let got = w.instantiate(&g, &sa.elements(&g), |s| sa.value(&g, s));
                        let want = sa.z_values(&g, v)[row.index - 1];
                        ensure(got == want, || {
                            format!(
                                "{n} {v} Z{}: witness gives {got:?}, want {want:?}",
                                row.index
                            )
                        })?;
                    }
                }
            }
        }
    }
    let report = profile_analysis(
        "forward-secrecy",
        &LeakageProfile::forward_secrecy(),
        Variant::Improved,
    );
    let toy_report = profile_analysis_mod(
        "forward-secrecy",
        &LeakageProfile::forward_secrecy(),
        Variant::Improved,
        g.q(),
    );
    for _ in 0..10 {
        let known = random_known(&g, &mut rng);
        for row in brute_force_forward_secrecy(&g, Variant::Improved, &known) {
            let span = report.is_reachable(row.index);
            ensure(span == toy_report.is_reachable(row.index), || {
                format!("Z{}: modulus changes verdict", row.index)
            })?;
            ensure(span == !row.matches.is_empty(), || {
                format!(
                    "Z{}: span says {span}, brute force found {:?}",
                    row.index, row.matches
                )
            })?;
        }
    }
    Ok(format!(
        "{witnesses} witnesses x 100 instances reproduce their targets; brute force agrees on Z1..Z9"
    ))
}

fn criterion_6() -> Check {
    let mut g =
        GameState::new(ToyGroup::default(), Variant::Improved, 6).map_err(|e| e.to_string())?;
    let (a, b, c) = (id("alice"), id("bob"), id("carol"));
    for u in [&a, &b, &c] {
        g.query(Query::CreateUser(u.clone()))
            .map_err(|e| e.to_string())?;
    }
    ensure(
        matches!(
            g.query(Query::CreateUser(a.clone())),
            Err(Error::DuplicateUser(_))
        ),
        || "duplicate CreateUser accepted".into(),
    )?;

    let Ok(Response::Outgoing(ma)) = g.query(Query::Send {
        user: a.clone(),
        instance: 1,
        input: SendInput::Activate { peer: b.clone() },
    }) else {
        return Err("Activate produced no message".into());
    };
    ensure(
        g.query(Query::RevealSessionKey(a.clone(), 1)) == Ok(Response::NotAccepted),
        || "RevealSessionKey on an unaccepted instance is not ⊥".into(),
    )?;
    ensure(
        matches!(
            g.query(Query::Test(a.clone(), 1)),
            Err(Error::TestNotAccepted)
        ),
        || "Test on an unaccepted instance allowed".into(),
    )?;
    let Ok(Response::Outgoing(mb)) = g.query(Query::Send {
        user: b.clone(),
        instance: 1,
        input: SendInput::Deliver(ma),
    }) else {
        return Err("responder produced no message".into());
    };
    ensure(
        g.query(Query::Send {
            user: a.clone(),
            instance: 1,
            input: SendInput::Deliver(mb),
        }) == Ok(Response::Accepted),
        || "initiator did not accept".into(),
    )?;
    let real = g
        .instance(&b, 1)
        .and_then(|i| i.record.ssk)
        .ok_or("responder has no key")?;
    ensure(
        g.query(Query::RevealSessionKey(b.clone(), 1)) == Ok(Response::SessionKey(real)),
        || "RevealSessionKey returned the wrong key".into(),
    )?;
    ensure(
        matches!(g.query(Query::RevealMasterKey), Ok(Response::MasterKey(_))),
        || "RevealMasterKey".into(),
    )?;
    ensure(
        matches!(
            g.query(Query::RevealIdBasedKey(c.clone())),
            Ok(Response::IdBasedKey(_))
        ),
        || "RevealIDBasedKey".into(),
    )?;
    ensure(
        matches!(
            g.query(Query::RevealSecretValue(c.clone())),
            Ok(Response::SecretValue(_))
        ),
        || "RevealSecretValue".into(),
    )?;
    ensure(
        matches!(
            g.query(Query::RevealSecretKey(c.clone())),
            Ok(Response::SecretKey(_))
        ),
        || "RevealSecretKey".into(),
    )?;
    ensure(
        matches!(
            g.query(Query::RevealEphemeralKey(a.clone(), 1)),
            Ok(Response::EphemeralKey(_))
        ),
        || "RevealEphemeralKey".into(),
    )?;
    let mut pk = g.public_key(&c).unwrap();
    let s = g.group().scalar(3);
    pk.u = g.group().exp_g(&s);
    ensure(
        g.query(Query::ReplacePublicKey {
            user: c.clone(),
            pk,
            secret: s,
        }) == Ok(Response::Replaced),
        || "ReplacePublicKey".into(),
    )?;
    // bob's key was revealed, so alice's partner is exposed
    ensure(
        matches!(g.query(Query::Test(a.clone(), 1)), Err(Error::Unfresh)),
        || "Test on an instance with an exposed partner allowed".into(),
    )?;

    let scenarios = ["1", "2", "3a", "3b", "3c"];
    for case in scenarios {
        scenario(case)?;
    }

    // A clean session still passes Test with the coin forced to 1.
    let mut g =
        GameState::new(ToyGroup::default(), Variant::Improved, 66).map_err(|e| e.to_string())?;
    g.query(Query::CreateUser(a.clone())).unwrap();
    g.query(Query::CreateUser(b.clone())).unwrap();
    g.run_session(&a, 1, &b, 1).map_err(|e| e.to_string())?;
    g.force_coin(Some(true));
    let real = g.instance(&a, 1).unwrap().record.ssk.unwrap();
    ensure(
        g.query(Query::Test(a.clone(), 1)) == Ok(Response::TestKey(real)),
        || "Test with coin 1 did not return the real key".into(),
    )?;
    ensure(
        matches!(g.query(Query::Test(a.clone(), 1)), Err(Error::RepeatedTest)),
        || "second Test allowed".into(),
    )?;
    let log = g.log_text();
    ensure(log.lines().all(|l| l.contains(" -> ")), || {
        "log line without response".into()
    })?;
    Ok(format!(
        "all ten query types answered; Test refused as unfresh in cases {}",
        scenarios.join(", ")
    ))
}

/// Drives one unfreshness case of the freshness definition and checks that
/// Test is refused.
fn scenario(case: &str) -> Result<(), String> {
    let mut g =
        GameState::new(ToyGroup::default(), Variant::Improved, 600).map_err(|e| e.to_string())?;
    let (a, b) = (id("alice"), id("bob"));
    g.query(Query::CreateUser(a.clone())).unwrap();
    g.query(Query::CreateUser(b.clone())).unwrap();
    let send = |g: &mut GameState<ToyGroup>, u: &Identity, i, input| {
        g.query(Query::Send {
            user: u.clone(),
            instance: i,
            input,
        })
        .unwrap()
    };
    let out = |r: Response<ToyGroup>| match r {
        Response::Outgoing(m) => m,
        r => panic!("{r:?}"),
    };
    match case {
        "1" | "2" => {
            g.run_session(&a, 1, &b, 1).map_err(|e| e.to_string())?;
            let target = if case == "1" { &a } else { &b };
            g.query(Query::RevealSessionKey(target.clone(), 1)).unwrap();
        }
        _ => {
            let mine = out(send(&mut g, &a, 1, SendInput::Activate { peer: b.clone() }));
            let other: HandshakeMessage<ToyGroup> = (2..)
                .map(|i| out(send(&mut g, &a, i, SendInput::Activate { peer: b.clone() })))
                .find(|m| *m != mine)
                .unwrap();
            let mb = out(send(&mut g, &b, 1, SendInput::Deliver(other)));
            if case == "3c" {
                let mut pk = g.public_key(&b).unwrap();
                let s = g.group().scalar(5);
                pk.u = g.group().exp_g(&s);
                g.query(Query::ReplacePublicKey {
                    user: b.clone(),
                    pk,
                    secret: s,
                })
                .unwrap();
            }
            ensure(
                send(&mut g, &a, 1, SendInput::Deliver(mb)) == Response::Accepted,
                || format!("case {case}: alice did not accept"),
            )?;
            ensure(g.partner(&a, 1).unwrap().is_none(), || {
                format!("case {case}: unexpected partner")
            })?;
            ensure(g.is_fresh(&a, 1).unwrap(), || {
                format!("case {case}: unfresh before any reveal")
            })?;
            match case {
                "3a" => {
                    g.query(Query::RevealIdBasedKey(b.clone())).unwrap();
                    g.query(Query::RevealSecretValue(b.clone())).unwrap();
                }
                "3b" => {
                    g.query(Query::RevealSecretKey(b.clone())).unwrap();
                }
                _ => {
                    g.query(Query::RevealIdBasedKey(b.clone())).unwrap();
                }
            }
        }
    }
    let reasons = g.unfreshness_reasons(&a, 1).unwrap();
    ensure(reasons.contains(&case), || {
        format!("case {case}: reasons {reasons:?}")
    })?;
    ensure(
        matches!(g.query(Query::Test(a.clone(), 1)), Err(Error::Unfresh)),
        || format!("case {case}: Test allowed"),
    )
}

fn criterion_7() -> Check {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let full = profile_analysis(
        "full-compromise",
        &LeakageProfile::full_compromise(),
        Variant::Improved,
    );
    if !full.session_key_derivable() {
        failures.push(format!(
            "full-compromise: unreachable {:?}",
            full.unreachable()
        ));
    }
    let kci = profile_analysis("kci", &LeakageProfile::kci(), Variant::Improved);
    if kci.is_reachable(7) {
        failures.push(format!(
            "kci: Z7 is Reachable ({})",
            kci.rows[6]
                .verdict
                .witness()
                .map_or(String::new(), |w| { clke::adversary::describe_witness(w) })
        ));
    }
    notes.push(format!(
        "kci session key derivable: {}",
        kci.session_key_derivable()
    ));
    let fs = profile_analysis(
        "forward-secrecy",
        &LeakageProfile::forward_secrecy(),
        Variant::Improved,
    );
    for i in [8, 9] {
        if fs.is_reachable(i) {
            failures.push(format!("forward-secrecy: Z{i} Reachable"));
        }
    }
    for (name, p) in LeakageProfile::builtin("session-info").unwrap() {
        let r = profile_analysis(&name, &p, Variant::Improved);
        notes.push(format!("{name}: unreachable {:?}", r.unreachable()));
    }
    let detail = notes.join("; ");
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", failures.join("; ")))
    }
}

fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn cli(args: &[&str]) -> Result<(Vec<u8>, Option<i32>), String> {
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let out = Command::new(cargo)
        .current_dir(workspace_root())
        .args(["run", "--quiet", "-p", "clke-cli", "--"])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code()))
}

fn criterion_8() -> Check {
    let cases: [&[&str]; 3] = [
        &["handshake", "--seed", "42"],
        &["attack", "--seed", "42"],
        &["analyze", "--seed", "42", "--profile", "forward-secrecy"],
    ];
    for args in cases {
        let first = cli(args)?;
        let second = cli(args)?;
        ensure(!first.0.is_empty(), || format!("{args:?}: no output"))?;
        ensure(first == second, || format!("{args:?}: outputs differ"))?;
    }
    Ok("handshake, attack, analyze with --seed 42 are byte-identical across runs".into())
}

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let criteria: [Criterion; 8] = [
        ("criterion_1_protocol_correctness", criterion_1),
        ("criterion_2_exponent_identities", criterion_2),
        ("criterion_3_attack_reproduction", criterion_3),
        ("criterion_4_fix_effectiveness", criterion_4),
        ("criterion_5_span_check_soundness", criterion_5),
        ("criterion_6_game_conformance", criterion_6),
        ("criterion_7_profile_suite", criterion_7),
        ("criterion_8_determinism", criterion_8),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    let mut ran = 0;
    for (name, f) in criteria {
        if !filters.is_empty() && !filters.iter().any(|flt| name.contains(flt.as_str())) {
            continue;
        }
        ran += 1;
        let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("{name} ... PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("{name} ... FAIL ({detail})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
