//! Replays the checked-in fuzz corpus through every decoder with the same
//! round-trip properties the fuzz targets assert, so seeds stay valid on
//! stable toolchains. `DESK_FUZZ_REGEN=1` rewrites the seeds from live
//! protocol objects.

use std::fs;
use std::path::{Path, PathBuf};

use desk_notary::algebra::Curve;
use desk_notary::circuits::{build_comparator_circuit, build_multiplier_circuit, parse_circuit, serialize_circuit};
use desk_notary::encoding::Direction;
use desk_notary::garble::{garble, GarbledCircuit};
use desk_notary::harness::{run_session, SessionConfig};
use desk_notary::notarize::{decode_leaves, encode_leaves, verify_attestation, Attestation, Range};
use desk_notary::record::EncryptedRecord;
use desk_notary::transport::PartyMessage;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const TARGETS: [&str; 9] = [
    "circuit_text",
    "attestation_json",
    "party_message",
    "garbled_circuit",
    "encrypted_record",
    "leaves_frame",
    "session_config",
    "curve_point",
    "range_list",
];

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus")
}

fn check(target: &str, data: &[u8]) -> bool {
    let text = std::str::from_utf8(data).ok();
    match target {
        "circuit_text" => text
            .and_then(|t| parse_circuit(t).ok())
            .is_some_and(|c| parse_circuit(&serialize_circuit(&c)).as_ref() == Ok(&c)),
        "attestation_json" => text.and_then(|t| Attestation::from_json(t).ok()).is_some_and(|a| {
            let _ = verify_attestation(&a, &[0; 32], None);
            let _ = a.redact(&[Range::new(0, 1)]);
            Attestation::from_json(&a.to_json()).as_ref() == Ok(&a)
        }),
        "party_message" => PartyMessage::decode(data).is_ok_and(|m| m.encode() == data),
        "garbled_circuit" => GarbledCircuit::from_bytes(data).is_ok_and(|g| g.to_bytes() == data),
        "encrypted_record" => EncryptedRecord::decode(data).is_ok_and(|r| r.encode() == data),
        "leaves_frame" => decode_leaves(data).is_ok_and(|l| encode_leaves(&l) == data),
        "session_config" => text
            .and_then(|t| SessionConfig::from_json(t).ok())
            .is_some_and(|c| SessionConfig::from_json(&c.to_json()).is_ok_and(|d| d == c)),
        "curve_point" => [Curve::toy(), Curve::p256()].iter().any(|c| {
            c.decode_point(data)
                .is_ok_and(|p| p.is_on_curve() && c.decode_point(&p.encode()).as_ref() == Ok(&p))
        }),
        "range_list" => text.is_some_and(|t| {
            t.split(',').all(|p| {
                p.parse::<Range>()
                    .is_ok_and(|r| r.to_string().parse::<Range>() == Ok(r))
            })
        }),
        other => panic!("unknown fuzz target {other}"),
    }
}

fn seeds() -> Vec<(&'static str, Vec<Vec<u8>>)> {
    let cfg = SessionConfig::default().with_session_seed(5);
    let r = run_session(&cfg);
    let att = r.attestation.clone().expect("seed session succeeds");
    let redacted = att.redact(&[Range::new(2, 6)]).expect("redaction in range");
    let frames: Vec<Vec<u8>> = r.transcript.messages.iter().take(6).map(PartyMessage::encode).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let mul = build_multiplier_circuit();
    let (gc, _, _) = garble(&mul.circuit, &mut rng);
    let record = |dir, ct: &[u8], tag| EncryptedRecord {
        direction: dir,
        seq: 3,
        ciphertext: ct.to_vec(),
        tag,
    };
    let toy = Curve::toy();
    let p256 = Curve::p256();
    vec![
        (
            "circuit_text",
            vec![
                serialize_circuit(&mul.circuit).into_bytes(),
                serialize_circuit(&build_comparator_circuit(4).circuit).into_bytes(),
            ],
        ),
        (
            "attestation_json",
            vec![att.to_json().into_bytes(), redacted.to_json().into_bytes()],
        ),
        ("party_message", frames),
        ("garbled_circuit", vec![gc.to_bytes()]),
        (
            "encrypted_record",
            vec![
                record(Direction::Sent, b"GET /", Some(0xbeef)).encode(),
                record(Direction::Received, b"", None).encode(),
            ],
        ),
        (
            "leaves_frame",
            vec![encode_leaves(&[[1; 32], [2; 32], [3; 32], [4; 32]]), encode_leaves(&[])],
        ),
        ("session_config", vec![cfg.to_json().into_bytes()]),
        (
            "curve_point",
            vec![
                toy.generator().encode(),
                p256.generator().encode(),
                toy.identity().encode(),
            ],
        ),
        ("range_list", vec![b"0..5,7..9".to_vec(), b"12..13".to_vec()]),
    ]
}

#[test]
fn corpus_seeds_round_trip() {
    if std::env::var_os("DESK_FUZZ_REGEN").is_some() {
        for (target, items) in seeds() {
            let dir = corpus_dir().join(target);
            fs::create_dir_all(&dir).unwrap();
            for (i, data) in items.iter().enumerate() {
                fs::write(dir.join(format!("seed-{i}")), data).unwrap();
            }
        }
    }
    for target in TARGETS {
        let dir = corpus_dir().join(target);
        let mut n = 0;
        for entry in fs::read_dir(&dir).unwrap_or_else(|e| panic!("{}: {e}", dir.display())) {
            let path = entry.unwrap().path();
            let data = fs::read(&path).unwrap();
            assert!(check(target, &data), "{} does not round-trip", path.display());
            n += 1;
        }
        assert!(n > 0, "no seeds for {target}");
    }
}

#[test]
fn garbage_never_panics_any_decoder() {
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    for _ in 0..2000 {
        let len = rand::Rng::gen_range(&mut rng, 0..200);
        let data: Vec<u8> = (0..len).map(|_| rand::Rng::gen(&mut rng)).collect();
        for target in TARGETS {
            let _ = check(target, &data);
        }
    }
}
