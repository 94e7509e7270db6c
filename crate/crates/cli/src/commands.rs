use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use clke::adversary::{
    brute_force_forward_secrecy, describe_certificate, profile_analysis, reproduce_attack,
    KnownValues, LeakageProfile, SpanVerdict,
};
use clke::group::{Group, GroupKind, Ristretto255, ToyGroup};
use clke::handshake::{
    start_session, Direction, HandshakeMessage, Role, SessionRecord, Transcript, Variant,
};
use clke::hash::h1;
use clke::identity::Identity;
use clke::keyfile::KeyFile;
use clke::kgc::{extract_id_based_key, setup};
use clke::user::UserKeys;
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

use crate::{Common, Failure, Outcome};

fn header(out: &mut String, c: &Common, group: &str, seed: Option<u64>) {
    writeln!(out, "group: {group}").unwrap();
    writeln!(out, "variant: {}", c.variant).unwrap();
    if let Some(seed) = seed {
        writeln!(out, "seed: {seed}").unwrap();
    }
}

fn toy_name(g: &ToyGroup) -> String {
    format!("toy (p={}, q={}, g={})", g.p(), g.q(), g.g())
}

const PRODUCTION_NAME: &str = "production (ristretto255)";

fn identity(s: &str) -> Result<Identity, Failure> {
    Ok(Identity::try_from(s)?)
}

pub fn kgc(c: &Common, ids: &[String]) -> Result<Outcome, Failure> {
    let params = c.params()?;
    let seed = c.seed();
    let ids = ids
        .iter()
        .map(|s| identity(s))
        .collect::<Result<Vec<_>, _>>()?;
    let file = match params.group {
        GroupKind::Toy => kgc_in(&params.toy_group()?, seed, &ids)?,
        GroupKind::Production => kgc_in(&Ristretto255, seed, &ids)?,
    };
    Ok(Outcome {
        text: file.clone(),
        artifact: Some(file),
        expected: true,
    })
}

fn kgc_in<G: Group>(group: &G, seed: u64, ids: &[Identity]) -> Result<String, Failure> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (msk, mpk) = setup(group, &mut rng)?;
    let mut kf = KeyFile::with_master_public_key(group, &mpk);
    for id in ids {
        let d = extract_id_based_key(group, &msk, id, &mut rng)?;
        kf.push_partial_key(group, id, &d);
    }
    Ok(format!("# seed {seed}\n{kf}"))
}

struct HandshakeRun<G: Group> {
    text: String,
    transcript: String,
    agreed: bool,
    records: (SessionRecord<G>, SessionRecord<G>),
}

pub fn handshake(
    c: &Common,
    check_exponents: bool,
    replay: Option<&Path>,
) -> Result<Outcome, Failure> {
    let params = c.params()?;
    if check_exponents && params.group != GroupKind::Toy {
        return Err(Failure::Usage(
            "--check-exponents needs the toy group".into(),
        ));
    }
    let replay = replay
        .map(|p| {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            text.parse::<Transcript>().map_err(Failure::from)
        })
        .transpose()?;
    let seed = c.seed();
    let (text, transcript, expected) = match params.group {
        GroupKind::Toy => {
            let g = params.toy_group()?;
            let mut run = handshake_in(&g, c, &toy_name(&g), seed, replay.as_ref())?;
            let mut ok = run.agreed;
            if check_exponents {
                ok &= check_exponents_toy(&g, c.variant, &run.records, &mut run.text);
            }
            (run.text, run.transcript, ok)
        }
        GroupKind::Production => {
            let run = handshake_in(&Ristretto255, c, PRODUCTION_NAME, seed, replay.as_ref())?;
            (run.text, run.transcript, run.agreed)
        }
    };
    Ok(Outcome {
        text,
        artifact: Some(transcript),
        expected,
    })
}

fn decode_line<G: Group>(
    group: &G,
    t: &Transcript,
    dir: Direction,
) -> Result<Result<HandshakeMessage<G>, String>, Failure> {
    let bytes = t
        .first(dir)
        .ok_or_else(|| Failure::Usage(format!("replay transcript has no {dir:?} message")))?;
    Ok(HandshakeMessage::decode(group, bytes).map_err(|e| e.to_string()))
}

fn handshake_in<G: Group>(
    group: &G,
    c: &Common,
    name: &str,
    seed: u64,
    replay: Option<&Transcript>,
) -> Result<HandshakeRun<G>, Failure> {
    let mut out = String::new();
    header(&mut out, c, name, Some(seed));
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (msk, mpk) = setup(group, &mut rng)?;
    let alice = UserKeys::provision(group, &msk, &mpk, identity("alice")?, &mut rng)?;
    let bob = UserKeys::provision(group, &msk, &mpk, identity("bob")?, &mut rng)?;
    let (mut ra, ma) = start_session(group, c.variant, Role::Initiator, &alice, &mut rng)?;
    let (mut rb, mb) = start_session(group, c.variant, Role::Responder, &bob, &mut rng)?;

    let (to_b, to_a) = match replay {
        Some(t) => {
            writeln!(out, "replaying transcript").unwrap();
            (
                decode_line(group, t, Direction::AToB)?,
                decode_line(group, t, Direction::BToA)?,
            )
        }
        None => (Ok(ma), Ok(mb)),
    };
    let mut transcript = Transcript::default();
    if let Ok(m) = &to_b {
        transcript.push(Direction::AToB, m.encode(group));
    }
    if let Ok(m) = &to_a {
        transcript.push(Direction::BToA, m.encode(group));
    }
    let transcript = transcript.to_string();
    out.push_str(&transcript);

    let key_b = to_b.and_then(|m| rb.complete(group, &mpk, &m).map_err(|e| e.to_string()));
    let key_a = to_a.and_then(|m| ra.complete(group, &mpk, &m).map_err(|e| e.to_string()));
    let show = |k: &Result<clke::hash::SessionKey, String>| match k {
        Ok(k) => k.to_string(),
        Err(e) => format!("rejected ({e})"),
    };
    writeln!(out, "initiator ssk: {}", show(&key_a)).unwrap();
    writeln!(out, "responder ssk: {}", show(&key_b)).unwrap();
    let agreed = matches!((&key_a, &key_b), (Ok(a), Ok(b)) if a == b);
    writeln!(out, "{}", if agreed { "AGREE" } else { "DISAGREE" }).unwrap();
    Ok(HandshakeRun {
        text: out,
        transcript,
        agreed,
        records: (ra, rb),
    })
}

/// Compares `dlog(Z_i)` on both sides with the exponent formula evaluated
/// in plain integer arithmetic.
fn check_exponents_toy(
    g: &ToyGroup,
    variant: Variant,
    (ra, rb): &(SessionRecord<ToyGroup>, SessionRecord<ToyGroup>),
    out: &mut String,
) -> bool {
    let (Some(za_vals), Some(zb_vals)) = (&ra.z, &rb.z) else {
        writeln!(out, "exponent check skipped: a session was rejected").unwrap();
        return false;
    };
    let q = g.q();
    let (ea, sa, za) = (
        ra.ephemeral.secret.value(),
        ra.own.sk.secret.value(),
        ra.own.sk.partial.z.value(),
    );
    let (eb, sb, zb) = (
        rb.ephemeral.secret.value(),
        rb.own.sk.secret.value(),
        rb.own.sk.partial.z.value(),
    );
    let expected = [
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
    let mut all = true;
    for (i, e) in expected.iter().enumerate().take(variant.z_count()) {
        let want = e % q;
        let da = g.dlog(&za_vals.0[i]).map(|s| s.value());
        let db = g.dlog(&zb_vals.0[i]).map(|s| s.value());
        let ok = da.as_ref().ok() == Some(&want) && db.as_ref().ok() == Some(&want);
        all &= ok;
        let show = |d: &Result<u64, clke::Error>| {
            d.as_ref().map_or_else(|e| e.to_string(), u64::to_string)
        };
        writeln!(
            out,
            "Z{} dlog initiator={} responder={} expected={} {}",
            i + 1,
            show(&da),
            show(&db),
            want,
            if ok { "ok" } else { "FAIL" }
        )
        .unwrap();
    }
    if all {
        writeln!(
            out,
            "all {} exponent identities verified",
            variant.z_count()
        )
        .unwrap();
    }
    all
}

pub fn attack(c: &Common, brute_check: bool) -> Result<Outcome, Failure> {
    let params = c.params()?;
    if brute_check && params.group != GroupKind::Toy {
        return Err(Failure::Usage("--brute-check needs the toy group".into()));
    }
    let seed = c.seed();
    let mut out = String::new();
    let (matched, brute_ok) = match params.group {
        GroupKind::Toy => {
            let g = params.toy_group()?;
            header(&mut out, c, &toy_name(&g), Some(seed));
            let report = reproduce_attack(g.clone(), c.variant, seed)?;
            write!(out, "{report}").unwrap();
            let brute_ok = if brute_check {
                let (ma, mb) = &report.messages;
                let l = &report.leaked;
                let known = KnownValues {
                    z_a: l.z_a,
                    z_b: l.z_b,
                    e_a: l.e_a,
                    s_b: l.s_b,
                    h_a: h1(&g, &ma.id, &ma.pk.r),
                    h_b: h1(&g, &mb.id, &mb.pk.r),
                };
                brute_section(&g, c.variant, &known, &mut out)
            } else {
                true
            };
            (report.matched(), brute_ok)
        }
        GroupKind::Production => {
            header(&mut out, c, PRODUCTION_NAME, Some(seed));
            let report = reproduce_attack(Ristretto255, c.variant, seed)?;
            write!(out, "{report}").unwrap();
            (report.matched(), true)
        }
    };

    let analysis = profile_analysis(
        "forward-secrecy",
        &LeakageProfile::forward_secrecy(),
        c.variant,
    );
    for row in &analysis.rows {
        if let SpanVerdict::Unreachable(cert) = &row.verdict {
            writeln!(
                out,
                "span: Z{} unreachable, {}",
                row.index,
                describe_certificate(cert)
            )
            .unwrap();
        }
    }
    let want_match = c.variant == Variant::Original;
    let expected = matched == want_match && brute_ok;
    if !expected {
        let why = if matched == want_match {
            "brute-force search disagrees with the span analysis".to_string()
        } else {
            format!(
                "expected {} for the {} variant",
                if want_match { "MATCH" } else { "NO-MATCH" },
                c.variant
            )
        };
        writeln!(out, "anomaly: {why}").unwrap();
    }
    Ok(Outcome {
        text: out,
        artifact: None,
        expected,
    })
}

fn brute_section(g: &ToyGroup, variant: Variant, known: &KnownValues, out: &mut String) -> bool {
    let analysis = profile_analysis(
        "forward-secrecy",
        &LeakageProfile::forward_secrecy(),
        variant,
    );
    let rows = brute_force_forward_secrecy(g, variant, known);
    writeln!(
        out,
        "brute force over all c in Z_{}^4 (g^c0 y^c1 U_A^c2 E_B^c3):",
        g.q()
    )
    .unwrap();
    let mut consistent = true;
    for row in &rows {
        let found = !row.matches.is_empty();
        let agrees = found == analysis.is_reachable(row.index);
        consistent &= agrees;
        let what = match row.matches.as_slice() {
            [] => "no combination".to_string(),
            [c] => format!("c={c:?}"),
            many => format!("{} combinations", many.len()),
        };
        writeln!(
            out,
            "Z{} {} ({})",
            row.index,
            what,
            if agrees {
                "agrees with span"
            } else {
                "DISAGREES with span"
            }
        )
        .unwrap();
    }
    consistent
}

pub fn analyze(c: &Common, profile: &str) -> Result<Outcome, Failure> {
    let profiles = match LeakageProfile::builtin(profile) {
        Some(p) => p,
        None if profile.contains('_') || profile == "x" || profile == "master" => {
            vec![("custom".to_string(), profile.parse::<LeakageProfile>()?)]
        }
        None => {
            return Err(Failure::Usage(format!(
                "unknown profile {profile:?}; expected one of {} or a reveal list",
                clke::adversary::BUILTIN_PROFILES.join(", ")
            )))
        }
    };
    let text = profiles
        .iter()
        .map(|(name, p)| profile_analysis(name, p, c.variant).to_string())
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome {
        text,
        artifact: None,
        expected: true,
    })
}
