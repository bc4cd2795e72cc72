//! Command-line front end: run a notarized session, redact, verify, and
//! print the reproduced fixtures.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use desk_notary::harness::{run_session, vectors, SessionConfig};
use desk_notary::notarize::{verify_attestation, Attestation, Range};
use serde_json::json;

#[derive(Parser)]
#[command(name = "desk-notary", version, about = "Desk-scale MPC-TLS notarization")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a full Client/Notary/Server session and write the attestation.
    Notarize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Derive all party seeds from this session number.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Remove byte ranges (global offsets over sent then received bytes).
    Redact {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated half-open ranges, e.g. `4..8,20..24`.
        #[arg(long, value_delimiter = ',')]
        ranges: Vec<Range>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an attestation; exits 0 on accept and 1 on reject.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Notary Ed25519 verification key, 32 bytes hex.
        #[arg(long)]
        notary_key: String,
    },
    /// Built-in fixtures and a sample configuration.
    Demo {
        #[command(subcommand)]
        what: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Recompute the published fixtures.
    Vectors,
    /// Print a default session configuration.
    Config,
}

type CliResult = Result<ExitCode, String>;

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &PathBuf, s: &str) -> Result<(), String> {
    fs::write(path, s).map_err(|e| format!("{}: {e}", path.display()))
}

fn print(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn notarize(config: &PathBuf, out: &PathBuf, seed: Option<u64>) -> CliResult {
    let mut cfg = SessionConfig::from_json(&read(config)?).map_err(|e| e.to_string())?;
    if let Some(n) = seed {
        cfg = cfg.with_session_seed(n);
    }
    let r = run_session(&cfg);
    match &r.attestation {
        Some(a) if r.aborts.is_empty() => {
            write(out, &a.to_json())?;
            print(&json!({
                "status": "notarized",
                "out": out.display().to_string(),
                "notary_key": hex::encode(r.notary_key),
                "leaf_count": a.header.metadata.leaf_count,
                "messages": r.transcript.messages.len(),
            }));
            Ok(ExitCode::SUCCESS)
        }
        _ => {
            print(&json!({ "status": "aborted", "aborts": r.aborts }));
            Ok(ExitCode::from(2))
        }
    }
}

fn redact(input: &PathBuf, ranges: &[Range], out: &PathBuf) -> CliResult {
    let a = Attestation::from_json(&read(input)?).map_err(|e| e.to_string())?;
    let red = a.redact(ranges).map_err(|e| e.to_string())?;
    write(out, &red.to_json())?;
    print(&json!({ "status": "redacted", "redactions": red.redactions }));
    Ok(ExitCode::SUCCESS)
}

fn verify(input: &PathBuf, key: &str) -> CliResult {
    let key: [u8; 32] = hex::decode(key)
        .ok()
        .and_then(|k| k.try_into().ok())
        .ok_or("notary key must be 32 bytes of hex")?;
    let a = match Attestation::from_json(&read(input)?) {
        Ok(a) => a,
        Err(e) => {
            print(&json!({
                "accepted": false,
                "checks": [{ "name": "load", "passed": false, "detail": e.to_string() }],
            }));
            return Ok(ExitCode::from(1));
        }
    };
    let report = verify_attestation(&a, &key, None);
    print(&serde_json::to_value(&report).expect("report serializes"));
    Ok(if report.accepted {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn demo_vectors() -> CliResult {
    let v = vectors::all_vectors();
    let ok = v.iter().all(|c| c.ok);
    print(&json!({ "all_ok": ok, "checks": v }));
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.cmd {
        Cmd::Notarize { config, out, seed } => notarize(config, out, *seed),
        Cmd::Redact { input, ranges, out } => redact(input, ranges, out),
        Cmd::Verify { input, notary_key } => verify(input, notary_key),
        Cmd::Demo { what: Demo::Vectors } => demo_vectors(),
        Cmd::Demo { what: Demo::Config } => {
            println!("{}", SessionConfig::default().to_json());
            Ok(ExitCode::SUCCESS)
        }
    };
    r.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
