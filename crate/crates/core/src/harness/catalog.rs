//! Scripted misbehavior and where each case must be caught.

use serde::Serialize;

use super::config::SessionConfig;
use super::session::{inject_adversary, run_session, SessionResult};
use crate::deap::{MSG_CHECK_OPEN, MSG_LABELS, MSG_OUTPUT, MSG_RHO_OPEN};
use crate::error::{AbortCause, ProtocolError};
use crate::ole::MSG_MASKED;
use crate::record::MSG_CONSISTENCY;
use crate::transport::{
    AdversaryRule, AdversaryScript, ChannelError, FaultKind, Mutation, Party, PartyFault, Transcript,
};

/// A message mutation aimed at the first frame of a type sent in a phase.
#[derive(Clone, Debug)]
pub struct Target {
    pub sender: Party,
    pub receiver: Party,
    pub msg_type: &'static str,
    pub phase_prefix: &'static str,
    pub mutation: Mutation,
}

#[derive(Clone, Debug)]
pub struct CatalogCase {
    pub name: &'static str,
    pub target: Option<Target>,
    pub faults: Vec<PartyFault>,
    /// Party expected to detect the deviation.
    pub detector: Party,
    pub error: ProtocolError,
    /// The detector's phase at the abort must start with this.
    pub phase_prefix: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub observed: Vec<String>,
}

fn flip(offset: usize, mask: u8) -> Mutation {
    Mutation::FlipBits { offset, mask }
}

fn fault(party: Party, kind: FaultKind, phase_prefix: &str) -> Vec<PartyFault> {
    vec![PartyFault {
        party,
        kind,
        phase_prefix: phase_prefix.into(),
    }]
}

/// The shipped catalog.
pub fn abort_catalog() -> Vec<CatalogCase> {
    use Party::{Client, Notary, Server};
    let t = |sender, receiver, msg_type, phase_prefix, mutation| {
        Some(Target {
            sender,
            receiver,
            msg_type,
            phase_prefix,
            mutation,
        })
    };
    vec![
        CatalogCase {
            name: "client input labels altered in execution",
            // Past the 4-byte count and the 32 key-share labels: a plaintext
            // label, which feeds XOR gates only.
            target: t(
                Client,
                Notary,
                MSG_LABELS,
                "record.sent/block0",
                flip(4 + 16 * 32 + 3, 0x01),
            ),
            faults: vec![],
            detector: Notary,
            error: ProtocolError::NotaryAbort(AbortCause::CommitmentMismatch),
            phase_prefix: "record.sent/block0/deap.execution",
        },
        CatalogCase {
            name: "notary garbles a different function",
            target: None,
            faults: fault(Notary, FaultKind::WrongGarbledFunction, "record.sent/block0"),
            detector: Client,
            error: ProtocolError::ClientAbort(AbortCause::RegarbleMismatch),
            phase_prefix: "record.sent/block0/deap.equality",
        },
        CatalogCase {
            name: "notary OT randomness off the committed schedule",
            target: None,
            faults: fault(Notary, FaultKind::OtOffSchedule, "keys"),
            detector: Client,
            error: ProtocolError::ClientAbort(AbortCause::OtReplayMismatch),
            phase_prefix: "keys/deap.equality",
        },
        CatalogCase {
            name: "server ciphertext altered before MAC check",
            target: t(Server, Client, super::MSG_RESPONSE, "tls/response", flip(17, 0x04)),
            faults: vec![],
            detector: Notary,
            error: ProtocolError::MacMismatch,
            phase_prefix: "record.recv/mac",
        },
        CatalogCase {
            name: "zero receiver input in a handshake OLE",
            target: None,
            faults: fault(Client, FaultKind::ZeroOleInput, "handshake/run1"),
            detector: Notary,
            error: ProtocolError::ZeroInputDetected,
            phase_prefix: "handshake/run1",
        },
        CatalogCase {
            name: "handshake runs disagree",
            target: t(Client, Notary, MSG_MASKED, "handshake/run2", flip(1, 0x02)),
            faults: vec![],
            detector: Notary,
            error: ProtocolError::EqualityCheckFailed,
            phase_prefix: "handshake/equality",
        },
        CatalogCase {
            name: "notary output labels altered",
            target: t(Notary, Client, MSG_OUTPUT, "record.sent/block0", flip(20, 0x10)),
            faults: vec![],
            detector: Client,
            error: ProtocolError::ClientAbort(AbortCause::InauthenticLabels),
            phase_prefix: "record.sent/block0/deap.execution",
        },
        CatalogCase {
            name: "client OT choices differ from its garbler input",
            target: None,
            faults: fault(Client, FaultKind::InconsistentInput, "record.sent/block0"),
            detector: Notary,
            error: ProtocolError::NotaryAbort(AbortCause::CheckMismatch),
            phase_prefix: "record.sent/block0/deap.equality",
        },
        CatalogCase {
            name: "notary seed opening altered",
            target: t(Notary, Client, MSG_RHO_OPEN, "keys", flip(0, 0x01)),
            faults: vec![],
            detector: Client,
            error: ProtocolError::ClientAbort(AbortCause::CommitmentOpenFailure),
            phase_prefix: "keys/deap.equality",
        },
        CatalogCase {
            name: "client check opening altered",
            target: t(Client, Notary, MSG_CHECK_OPEN, "keys", flip(0, 0x01)),
            faults: vec![],
            detector: Notary,
            error: ProtocolError::NotaryAbort(AbortCause::CommitmentOpenFailure),
            phase_prefix: "keys/deap.equality",
        },
        CatalogCase {
            name: "forged decryption consistency proof",
            target: t(Client, Notary, MSG_CONSISTENCY, "record.recv", flip(6, 0x10)),
            faults: vec![],
            detector: Notary,
            error: ProtocolError::ConsistencyRejected,
            phase_prefix: "record.recv/consistency",
        },
        CatalogCase {
            name: "request ciphertext altered in transit",
            target: t(Client, Server, super::MSG_REQUEST, "tls/request", flip(17, 0x01)),
            faults: vec![],
            detector: Server,
            error: ProtocolError::MacMismatch,
            phase_prefix: "tls/request",
        },
        CatalogCase {
            name: "encoder seed opening altered",
            target: t(
                Notary,
                Client,
                crate::notarize::MSG_SEED_OPEN,
                "notarize/reveal",
                flip(5, 0x80),
            ),
            faults: vec![],
            detector: Client,
            error: ProtocolError::ClientAbort(AbortCause::CommitmentOpenFailure),
            phase_prefix: "notarize/reveal",
        },
        CatalogCase {
            name: "commitment frames reordered",
            target: t(
                Client,
                Notary,
                crate::notarize::MSG_LEAVES,
                "notarize/commit",
                Mutation::Reorder,
            ),
            faults: vec![],
            detector: Notary,
            error: ProtocolError::Channel(ChannelError::UnexpectedMessage {
                expected: crate::notarize::MSG_LEAVES.into(),
                got: crate::notarize::MSG_SERVER_ID.into(),
            }),
            phase_prefix: "notarize/commit",
        },
        CatalogCase {
            name: "dropped notary key share",
            target: t(
                Notary,
                Client,
                crate::handshake::MSG_NOTARY_SHARE,
                "handshake",
                Mutation::Drop,
            ),
            faults: vec![],
            detector: Client,
            error: ProtocolError::Channel(ChannelError::Deadlock),
            phase_prefix: "handshake",
        },
    ]
}

/// Index of the first `(sender, receiver, msg_type)` frame sent in a phase
/// starting with `prefix`, counted among frames of that type.
fn locate(t: &Transcript, target: &Target) -> Option<usize> {
    t.messages
        .iter()
        .filter(|m| m.sender == target.sender && m.receiver == target.receiver && m.msg_type == target.msg_type)
        .position(|m| m.phase.starts_with(target.phase_prefix))
}

fn describe(r: &SessionResult) -> Vec<String> {
    r.aborts
        .iter()
        .map(|a| format!("{} at {}: {}", a.party, a.phase, a.error))
        .collect()
}

/// Runs one case; `honest` is the transcript of the same configuration
/// without interference, used to aim the mutation.
pub fn run_case(case: &CatalogCase, cfg: &SessionConfig, honest: &Transcript) -> CaseOutcome {
    let script = match &case.target {
        Some(t) => match locate(honest, t) {
            Some(index) => AdversaryScript::single(AdversaryRule {
                sender: t.sender,
                receiver: Some(t.receiver),
                msg_type: t.msg_type.into(),
                index,
                mutation: t.mutation.clone(),
            }),
            None => {
                return CaseOutcome {
                    name: case.name,
                    passed: false,
                    observed: vec![format!("no {} frame in {}", t.msg_type, t.phase_prefix)],
                }
            }
        },
        None => AdversaryScript::none(),
    };
    let r = inject_adversary(cfg, script, case.faults.clone());
    let passed = r.attestation.is_none()
        && r.aborts
            .iter()
            .any(|a| a.party == case.detector && a.error == case.error && a.phase.starts_with(case.phase_prefix));
    CaseOutcome {
        name: case.name,
        passed,
        observed: describe(&r),
    }
}

/// Runs the whole catalog against one configuration.
pub fn run_catalog(cfg: &SessionConfig) -> Vec<CaseOutcome> {
    let honest = run_session(cfg);
    abort_catalog()
        .iter()
        .map(|c| run_case(c, cfg, &honest.transcript))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_cases_abort_where_expected() {
        let cfg = SessionConfig::default();
        let out = run_catalog(&cfg);
        let failed: Vec<_> = out.iter().filter(|o| !o.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(out.len() >= 8);
    }
}
