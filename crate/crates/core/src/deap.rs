//! Dual execution with asymmetric privacy.
//!
//! Both parties garble the same circuit. The Notary evaluates the Client's
//! garbling and returns the output labels, which the Client authenticates
//! against its own encoding; that fixes the output. The Client evaluates the
//! Notary's garbling only for the equality check, where it commits to
//! `H(Y_C || Y_N)` before the Notary opens the seed that generated its
//! garbling and its committed OTs. The Client then re-garbles and replays
//! the OTs, and only opens its check value if both verify.
//!
//! Opening that seed reveals the Notary's inputs, so instances holding
//! session secrets defer the equality check until the TLS connection has
//! closed.

use std::collections::BTreeMap;

use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::circuits::CircuitBundle;
use crate::codec::{Reader, Writer};
use crate::commit::{commit_payload, random_salt, Commitment, SALT_LEN};
use crate::error::{AbortCause, ProtocolError};
use crate::garble::{
    encode, evaluate_all, garble_with, read_labels, write_labels, GarbleError, GarbleOptions, GarbledCircuit, Garbling,
    Label,
};
use crate::ot::{ot_receive, ot_send, CommittedOtReceiver, CommittedOtSeed, CommittedOtSender};
use crate::prg::Prg;
use crate::transport::{FaultKind, Link};

pub const MSG_RHO_COM: &str = "deap.rho_com";
pub const MSG_GC: &str = "deap.gc";
pub const MSG_OUT_COM: &str = "deap.out_com";
pub const MSG_LABELS: &str = "deap.garbler_labels";
pub const MSG_OUTPUT: &str = "deap.output_labels";
pub const MSG_CHECK_COM: &str = "deap.check_com";
pub const MSG_RHO_OPEN: &str = "deap.rho_open";
pub const MSG_CHECK_OPEN: &str = "deap.check_open";

const GARBLE_DOMAIN: &str = "garble";

/// Phase names of one instance: `<base>/deap.setup` and so on.
pub fn phase_name(base: &str, step: &str) -> String {
    format!("{base}/deap.{step}")
}

fn label_hash(wire: usize, l: Label) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"deap-out");
    h.update((wire as u64).to_le_bytes());
    h.update(l.to_bytes());
    h.finalize().into()
}

fn check_value(y_c: &[Label], y_n: &[Label]) -> Vec<u8> {
    let mut h = Sha256::new();
    h.update(b"deap-check");
    for l in y_c.iter().chain(y_n) {
        h.update(l.to_bytes());
    }
    h.finalize().to_vec()
}

fn labels_frame(labels: &[Label]) -> Vec<u8> {
    let mut w = Writer::new();
    write_labels(&mut w, labels);
    w.finish()
}

fn parse_labels(buf: &[u8], expected: usize) -> Result<Vec<Label>, ProtocolError> {
    let mut r = Reader::new(buf);
    let l = read_labels(&mut r)?;
    r.finish()?;
    if l.len() != expected {
        return Err(ProtocolError::LengthMismatch(format!(
            "{} labels, expected {expected}",
            l.len()
        )));
    }
    Ok(l)
}

fn label_pairs(g: &Garbling, wires: std::ops::Range<usize>) -> Vec<(Vec<u8>, Vec<u8>)> {
    g.encoding.pairs[wires]
        .iter()
        .map(|(a, b)| (a.to_bytes().to_vec(), b.to_bytes().to_vec()))
        .collect()
}

fn flatten(
    bundle: &CircuitBundle,
    groups: std::ops::Range<usize>,
    inputs: &[Vec<bool>],
) -> Result<Vec<bool>, ProtocolError> {
    let c = &bundle.circuit;
    if inputs.len() != groups.len() {
        return Err(ProtocolError::LengthMismatch(format!(
            "{} input groups, expected {}",
            inputs.len(),
            groups.len()
        )));
    }
    for (g, x) in groups.zip(inputs) {
        if c.groups()[g].width != x.len() {
            return Err(ProtocolError::LengthMismatch(format!(
                "group {} has {} bits, expected {}",
                c.groups()[g].name,
                x.len(),
                c.groups()[g].width
            )));
        }
    }
    Ok(inputs.concat())
}

fn client_wires(bundle: &CircuitBundle) -> std::ops::Range<usize> {
    let c = &bundle.circuit;
    let end = if bundle.client_groups == 0 {
        0
    } else {
        c.group_wires(bundle.client_groups - 1).end
    };
    0..end
}

/// Client side of one instance.
pub struct DeapClient {
    bundle: CircuitBundle,
    base: String,
    deferred: bool,
    own: Garbling,
    peer_gc: GarbledCircuit,
    rho_com: Commitment,
    ot: CommittedOtReceiver,
    peer_input_labels: Vec<Label>,
    y_c: Vec<Label>,
    wires_n: Vec<Label>,
    output: Vec<bool>,
}

impl DeapClient {
    /// Garbles, exchanges garbled circuits and output commitments.
    pub fn setup<R: RngCore + ?Sized>(
        link: &mut Link<'_>,
        bundle: &CircuitBundle,
        base: &str,
        deferred: bool,
        rng: &mut R,
    ) -> Result<Self, ProtocolError> {
        link.set_phase(&phase_name(base, "setup"));
        let c = &bundle.circuit;
        let rho_com = Commitment {
            digest: link
                .recv(MSG_RHO_COM)?
                .try_into()
                .map_err(|_| ProtocolError::Malformed("seed commitment".into()))?,
        };
        let own = garble_with(c, rng, &GarbleOptions::default());
        link.send(MSG_GC, own.garbled.to_bytes())?;
        let mut w = Writer::new();
        for k in 0..c.num_outputs() {
            let (l0, l1) = own.output_pair(c, k);
            w.fixed(&label_hash(k, l0));
            w.fixed(&label_hash(k, l1));
        }
        link.send(MSG_OUT_COM, w.finish())?;
        let peer_gc = GarbledCircuit::from_bytes(&link.recv(MSG_GC)?)?;
        if peer_gc.circuit_digest != c.digest() {
            return Err(ProtocolError::ClientAbort(AbortCause::CircuitMismatch));
        }
        Ok(Self {
            bundle: bundle.clone(),
            base: base.to_string(),
            deferred,
            own,
            peer_gc,
            rho_com,
            ot: CommittedOtReceiver::new(rho_com),
            peer_input_labels: Vec::new(),
            y_c: Vec::new(),
            wires_n: Vec::new(),
            output: Vec::new(),
        })
    }

    /// Runs both evaluations; returns the authenticated output.
    pub fn execute<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        inputs: &[Vec<bool>],
        rng: &mut R,
    ) -> Result<Vec<bool>, ProtocolError> {
        link.set_phase(&phase_name(&self.base, "execution"));
        let c = &self.bundle.circuit;
        let cw = client_wires(&self.bundle);
        let x = flatten(&self.bundle, 0..self.bundle.client_groups, inputs)?;
        let own_labels: Vec<Label> = self.own.encoding.pairs[cw.clone()]
            .iter()
            .zip(&x)
            .map(|(&(l0, l1), &b)| if b { l1 } else { l0 })
            .collect();
        link.send(MSG_LABELS, labels_frame(&own_labels))?;
        let nw = cw.end..c.num_inputs();
        self.peer_input_labels = parse_labels(&link.recv(MSG_LABELS)?, nw.len())?;

        let mut choices = x.clone();
        if link.fault_active(FaultKind::InconsistentInput) {
            if let Some(b) = choices.first_mut() {
                *b = !*b;
            }
        }
        let mine = self.ot.receive_batch(link, &choices, rng)?;
        ot_send(link, &label_pairs(&self.own, nw.clone()), rng)?;

        let mut active: Vec<Label> = mine
            .into_iter()
            .map(|m| {
                <[u8; 16]>::try_from(m.as_slice())
                    .map(Label::from_bytes)
                    .map_err(|_| ProtocolError::Malformed("OT label width".into()))
            })
            .collect::<Result<_, _>>()?;
        active.extend(self.peer_input_labels.iter().copied());
        self.wires_n = evaluate_all(c, &self.peer_gc, &active).map_err(|e| match e {
            GarbleError::RowTagFailure { .. } => ProtocolError::ClientAbort(AbortCause::EvaluationFailure),
            other => other.into(),
        })?;

        let y_c = parse_labels(&link.recv(MSG_OUTPUT)?, c.num_outputs())?;
        let mut out = Vec::with_capacity(y_c.len());
        for (k, l) in y_c.iter().enumerate() {
            let (l0, l1) = self.own.output_pair(c, k);
            match *l {
                v if v == l0 => out.push(false),
                v if v == l1 => out.push(true),
                _ => return Err(ProtocolError::ClientAbort(AbortCause::InauthenticLabels)),
            }
        }
        self.y_c = y_c;
        self.output = out.clone();
        Ok(out)
    }

    pub fn output(&self) -> &[bool] {
        &self.output
    }

    /// Active labels of every wire of the Notary's garbling.
    pub fn peer_wire_labels(&self) -> &[Label] {
        &self.wires_n
    }

    pub fn bundle(&self) -> &CircuitBundle {
        &self.bundle
    }

    pub fn is_deferred(&self) -> bool {
        self.deferred
    }

    /// The equality check. `opts` are the Notary's garbling presets, which
    /// the Client must know by now to re-garble.
    pub fn equality<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        opts: &GarbleOptions,
        tls_closed: bool,
        rng: &mut R,
    ) -> Result<(), ProtocolError> {
        if self.deferred && !tls_closed {
            return Err(ProtocolError::Precondition(format!(
                "equality check of {} before the TLS connection closed",
                self.base
            )));
        }
        link.set_phase(&phase_name(&self.base, "equality"));
        let c = &self.bundle.circuit;
        let y_n = self.wires_n[c.output_wires()].to_vec();
        let check = check_value(&self.y_c, &y_n);
        let salt = random_salt(rng);
        link.send(MSG_CHECK_COM, commit_payload(&check, &salt).digest.to_vec())?;

        let open = link.recv(MSG_RHO_OPEN)?;
        let mut r = Reader::new(&open);
        let rho: [u8; 32] = r.array()?;
        let rho_salt: [u8; SALT_LEN] = r.array()?;
        r.finish()?;
        if !self.rho_com.opens_to(&rho, &rho_salt) {
            return Err(ProtocolError::ClientAbort(AbortCause::CommitmentOpenFailure));
        }
        let seed = Prg::derive_seed(&rho, GARBLE_DOMAIN);
        let honest = garble_with(c, &mut Prg::new(&seed, GARBLE_DOMAIN), opts);
        if honest.garbled.to_bytes() != self.peer_gc.to_bytes() {
            return Err(ProtocolError::ClientAbort(AbortCause::RegarbleMismatch));
        }
        let cw = client_wires(&self.bundle);
        for (l, pair) in self.peer_input_labels.iter().zip(&honest.encoding.pairs[cw.end..]) {
            if *l != pair.0 && *l != pair.1 {
                return Err(ProtocolError::ClientAbort(AbortCause::InputLabelMismatch));
            }
        }
        self.ot
            .replay(&rho, &rho_salt, &[label_pairs(&honest, cw)])
            .map_err(|_| ProtocolError::ClientAbort(AbortCause::OtReplayMismatch))?;

        let mut w = Writer::new();
        w.fixed(&check);
        w.fixed(&salt);
        link.send(MSG_CHECK_OPEN, w.finish())?;
        Ok(())
    }
}

/// Notary side of one instance.
pub struct DeapNotary {
    bundle: CircuitBundle,
    base: String,
    deferred: bool,
    seed: CommittedOtSeed,
    own: Garbling,
    peer_gc: GarbledCircuit,
    out_com: Vec<([u8; 32], [u8; 32])>,
    y_c: Vec<Label>,
    output: Vec<bool>,
}

impl DeapNotary {
    /// `opts` fixes the offset and selected input labels of the Notary's
    /// garbling; everything else comes from the committed seed.
    pub fn setup<R: RngCore + ?Sized>(
        link: &mut Link<'_>,
        bundle: &CircuitBundle,
        base: &str,
        deferred: bool,
        opts: &GarbleOptions,
        rng: &mut R,
    ) -> Result<Self, ProtocolError> {
        link.set_phase(&phase_name(base, "setup"));
        let c = &bundle.circuit;
        let seed = CommittedOtSeed::generate(rng);
        link.send(MSG_RHO_COM, seed.commitment.digest.to_vec())?;
        let peer_gc = GarbledCircuit::from_bytes(&link.recv(MSG_GC)?)?;
        if peer_gc.circuit_digest != c.digest() {
            return Err(ProtocolError::NotaryAbort(AbortCause::CircuitMismatch));
        }
        let com = link.recv(MSG_OUT_COM)?;
        let mut r = Reader::new(&com);
        let out_com = (0..c.num_outputs())
            .map(|_| Ok((r.array()?, r.array()?)))
            .collect::<Result<Vec<_>, ProtocolError>>()?;
        r.finish()?;

        let mut garble_opts = opts.clone();
        if link.fault_active(FaultKind::WrongGarbledFunction) {
            garble_opts.tamper_gate = c
                .gates()
                .iter()
                .position(|g| matches!(g, crate::circuits::Gate::And { .. }));
        }
        let gseed = Prg::derive_seed(&seed.rho, GARBLE_DOMAIN);
        let own = garble_with(c, &mut Prg::new(&gseed, GARBLE_DOMAIN), &garble_opts);
        link.send(MSG_GC, own.garbled.to_bytes())?;
        Ok(Self {
            bundle: bundle.clone(),
            base: base.to_string(),
            deferred,
            seed,
            own,
            peer_gc,
            out_com,
            y_c: Vec::new(),
            output: Vec::new(),
        })
    }

    pub fn execute<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        inputs: &[Vec<bool>],
        rng: &mut R,
    ) -> Result<Vec<bool>, ProtocolError> {
        link.set_phase(&phase_name(&self.base, "execution"));
        let c = &self.bundle.circuit;
        let groups = self.bundle.client_groups..c.groups().len();
        let x = flatten(&self.bundle, groups, inputs)?;
        let cw = client_wires(&self.bundle);
        let nw = cw.end..c.num_inputs();
        let own_labels = encode(
            &crate::garble::EncodingInfo {
                pairs: self.own.encoding.pairs[nw.clone()].to_vec(),
            },
            &x,
        )?;
        link.send(MSG_LABELS, labels_frame(&own_labels))?;
        let peer_labels = parse_labels(&link.recv(MSG_LABELS)?, cw.len())?;

        let mut sender = CommittedOtSender::new(self.seed.clone());
        sender.send_batch(link, &label_pairs(&self.own, cw))?;
        let mine = ot_receive(link, &x, rng)?;

        let mut active = peer_labels;
        for m in mine {
            let b: [u8; 16] = m
                .as_slice()
                .try_into()
                .map_err(|_| ProtocolError::Malformed("OT label width".into()))?;
            active.push(Label::from_bytes(b));
        }
        let wires = evaluate_all(c, &self.peer_gc, &active).map_err(|e| match e {
            GarbleError::RowTagFailure { .. } => ProtocolError::NotaryAbort(AbortCause::EvaluationFailure),
            other => other.into(),
        })?;
        let y_c = wires[c.output_wires()].to_vec();
        let mut out = Vec::with_capacity(y_c.len());
        for (k, (l, (h0, h1))) in y_c.iter().zip(&self.out_com).enumerate() {
            let h = label_hash(k, *l);
            if h == *h0 {
                out.push(false);
            } else if h == *h1 {
                out.push(true);
            } else {
                return Err(ProtocolError::NotaryAbort(AbortCause::CommitmentMismatch));
            }
        }
        link.send(MSG_OUTPUT, labels_frame(&y_c))?;
        self.y_c = y_c;
        self.output = out.clone();
        Ok(out)
    }

    pub fn output(&self) -> &[bool] {
        &self.output
    }

    pub fn garbling(&self) -> &Garbling {
        &self.own
    }

    pub fn bundle(&self) -> &CircuitBundle {
        &self.bundle
    }

    pub fn is_deferred(&self) -> bool {
        self.deferred
    }

    pub fn equality(&mut self, link: &mut Link<'_>, tls_closed: bool) -> Result<(), ProtocolError> {
        if self.deferred && !tls_closed {
            return Err(ProtocolError::Precondition(format!(
                "equality check of {} before the TLS connection closed",
                self.base
            )));
        }
        link.set_phase(&phase_name(&self.base, "equality"));
        let c = &self.bundle.circuit;
        let com: [u8; 32] = link
            .recv(MSG_CHECK_COM)?
            .try_into()
            .map_err(|_| ProtocolError::Malformed("check commitment".into()))?;
        let mut w = Writer::new();
        w.fixed(&self.seed.rho);
        w.fixed(&self.seed.salt);
        link.send(MSG_RHO_OPEN, w.finish())?;

        let open = link.recv(MSG_CHECK_OPEN)?;
        let mut r = Reader::new(&open);
        let check: [u8; 32] = r.array()?;
        let salt: [u8; SALT_LEN] = r.array()?;
        r.finish()?;
        if !(Commitment { digest: com }).opens_to(&check, &salt) {
            return Err(ProtocolError::NotaryAbort(AbortCause::CommitmentOpenFailure));
        }
        let expected: Vec<Label> = (0..c.num_outputs())
            .map(|k| {
                let (l0, l1) = self.own.output_pair(c, k);
                if self.output[k] {
                    l1
                } else {
                    l0
                }
            })
            .collect();
        if check_value(&self.y_c, &expected) != check {
            return Err(ProtocolError::NotaryAbort(AbortCause::CheckMismatch));
        }
        Ok(())
    }
}

/// Garbling presets for the Notary: a fixed offset plus fixed 0-labels for
/// some input wires.
pub fn preset_options(delta: Label, input_labels: BTreeMap<usize, Label>) -> GarbleOptions {
    GarbleOptions {
        delta: Some(delta),
        input_labels,
        tamper_gate: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{
        build_comparator_circuit, build_multiplier_circuit, build_record_block_circuit, eval_plain, to_bits,
    };
    use crate::transport::{run_two, AdversaryRule, AdversaryScript, Endpoint, HubConfig, Mutation, Party, PartyFault};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    type Outcome = (Result<Vec<bool>, ProtocolError>, Result<Vec<bool>, ProtocolError>);

    fn run_instance(
        cfg: &HubConfig,
        bundle: &CircuitBundle,
        xc: Vec<Vec<bool>>,
        xn: Vec<Vec<bool>>,
        seed: u64,
    ) -> Outcome {
        let (b1, b2) = (bundle.clone(), bundle.clone());
        let (c, n, _) = run_two(
            cfg,
            (Party::Client, move |e: &mut Endpoint| {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                let mut l = e.link(Party::Notary);
                let mut d = DeapClient::setup(&mut l, &b1, "t", true, &mut rng)?;
                let out = d.execute(&mut l, &xc, &mut rng)?;
                d.equality(&mut l, &GarbleOptions::default(), true, &mut rng)?;
                Ok(out)
            }),
            (Party::Notary, move |e: &mut Endpoint| {
                let mut rng = ChaCha20Rng::seed_from_u64(seed + 1);
                let mut l = e.link(Party::Client);
                let mut d = DeapNotary::setup(&mut l, &b2, "t", true, &GarbleOptions::default(), &mut rng)?;
                let out = d.execute(&mut l, &xn, &mut rng)?;
                d.equality(&mut l, true)?;
                Ok(out)
            }),
        );
        (c, n)
    }

    fn mult_inputs(a: u128, b: u128) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
        (vec![to_bits(a, 2)], vec![to_bits(b, 2)])
    }

    #[test]
    fn honest_multiplier_all_inputs() {
        let bundle = build_multiplier_circuit();
        for a in 0..4 {
            for b in 0..4 {
                let (xc, xn) = mult_inputs(a, b);
                let expect = eval_plain(&bundle.circuit, &[xc[0].clone(), xn[0].clone()]).unwrap();
                let (c, n) = run_instance(&HubConfig::default(), &bundle, xc, xn, (a * 4 + b) as u64);
                assert_eq!(c.unwrap(), expect);
                assert_eq!(n.unwrap(), expect);
                assert_eq!(crate::circuits::from_bits(&expect), a * b);
            }
        }
    }

    fn with_fault(party: Party, kind: FaultKind) -> HubConfig {
        HubConfig {
            faults: vec![PartyFault {
                party,
                kind,
                phase_prefix: String::new(),
            }],
            ..HubConfig::default()
        }
    }

    fn with_flip(sender: Party, msg_type: &str) -> HubConfig {
        HubConfig {
            script: AdversaryScript::single(AdversaryRule {
                sender,
                receiver: None,
                msg_type: msg_type.into(),
                index: 0,
                mutation: Mutation::FlipBits { offset: 8, mask: 0x01 },
            }),
            ..HubConfig::default()
        }
    }

    #[test]
    fn faults_abort_with_expected_cause() {
        let bundle = build_multiplier_circuit();
        let (xc, xn) = mult_inputs(3, 2);
        let cases = [
            (
                with_fault(Party::Notary, FaultKind::WrongGarbledFunction),
                Party::Client,
                AbortCause::RegarbleMismatch,
            ),
            (
                with_fault(Party::Notary, FaultKind::OtOffSchedule),
                Party::Client,
                AbortCause::OtReplayMismatch,
            ),
            (
                with_fault(Party::Client, FaultKind::InconsistentInput),
                Party::Notary,
                AbortCause::CheckMismatch,
            ),
            (
                with_flip(Party::Client, MSG_LABELS),
                Party::Notary,
                AbortCause::EvaluationFailure,
            ),
            (
                with_flip(Party::Notary, MSG_OUTPUT),
                Party::Client,
                AbortCause::InauthenticLabels,
            ),
            (
                with_flip(Party::Notary, MSG_RHO_OPEN),
                Party::Client,
                AbortCause::CommitmentOpenFailure,
            ),
            (
                with_flip(Party::Client, MSG_CHECK_OPEN),
                Party::Notary,
                AbortCause::CommitmentOpenFailure,
            ),
        ];
        for (i, (cfg, who, cause)) in cases.into_iter().enumerate() {
            let (c, n) = run_instance(&cfg, &bundle, xc.clone(), xn.clone(), 40 + i as u64);
            let err = if who == Party::Client {
                c.unwrap_err()
            } else {
                n.unwrap_err()
            };
            let want = if who == Party::Client {
                ProtocolError::ClientAbort(cause)
            } else {
                ProtocolError::NotaryAbort(cause)
            };
            assert_eq!(err, want, "case {i}");
        }
    }

    #[test]
    fn flipped_client_label_in_xor_only_region_is_commitment_mismatch() {
        // The p group of the record block only feeds XOR gates, so a bad label
        // evaluates cleanly and is caught by the output commitment.
        let bundle = build_record_block_circuit(0x8001);
        let xc = vec![to_bits(0xdead_beef, 32), to_bits(0x1234, 16)];
        let xn = vec![to_bits(0x0bad_f00d, 32)];
        let cfg = HubConfig {
            script: AdversaryScript::single(AdversaryRule {
                sender: Party::Client,
                receiver: None,
                msg_type: MSG_LABELS.into(),
                index: 0,
                mutation: Mutation::FlipBits {
                    offset: 4 + 16 * 32 + 3,
                    mask: 0x10,
                },
            }),
            ..HubConfig::default()
        };
        let (_, n) = run_instance(&cfg, &bundle, xc, xn, 5);
        assert_eq!(
            n.unwrap_err(),
            ProtocolError::NotaryAbort(AbortCause::CommitmentMismatch)
        );
    }

    #[test]
    fn deferred_equality_requires_closed_connection() {
        let bundle = build_comparator_circuit(4);
        let (b1, b2) = (bundle.clone(), bundle.clone());
        let (c, n, _) = run_two(
            &HubConfig::default(),
            (Party::Client, move |e: &mut Endpoint| {
                let mut rng = ChaCha20Rng::seed_from_u64(1);
                let mut l = e.link(Party::Notary);
                let mut d = DeapClient::setup(&mut l, &b1, "t", true, &mut rng)?;
                d.execute(&mut l, &[to_bits(5, 4)], &mut rng)?;
                d.equality(&mut l, &GarbleOptions::default(), false, &mut rng)
            }),
            (Party::Notary, move |e: &mut Endpoint| {
                let mut rng = ChaCha20Rng::seed_from_u64(2);
                let mut l = e.link(Party::Client);
                let mut d = DeapNotary::setup(&mut l, &b2, "t", true, &GarbleOptions::default(), &mut rng)?;
                d.execute(&mut l, &[to_bits(5, 4)], &mut rng)?;
                d.equality(&mut l, false)
            }),
        );
        assert!(matches!(c, Err(ProtocolError::Precondition(_))));
        assert!(matches!(n, Err(ProtocolError::Precondition(_))));
    }

    #[test]
    fn presets_are_honoured_and_verified() {
        let bundle = build_record_block_circuit(0x8002);
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let delta = Label::random_delta(&mut rng);
        let p = bundle.circuit.group_wires(1);
        let presets: BTreeMap<usize, Label> = p.clone().map(|w| (w, Label::random(&mut rng))).collect();
        let opts = preset_options(delta, presets.clone());
        let (o1, o2) = (opts.clone(), opts.clone());
        let (b1, b2) = (bundle.clone(), bundle.clone());
        let xp = to_bits(0xbeef, 16);
        let xp2 = xp.clone();
        let (c, n, _) = run_two(
            &HubConfig::default(),
            (Party::Client, move |e: &mut Endpoint| {
                let mut rng = ChaCha20Rng::seed_from_u64(1);
                let mut l = e.link(Party::Notary);
                let mut d = DeapClient::setup(&mut l, &b1, "t", true, &mut rng)?;
                d.execute(&mut l, &[to_bits(7, 32), xp2], &mut rng)?;
                let labels = d.peer_wire_labels().to_vec();
                d.equality(&mut l, &o1, true, &mut rng)?;
                Ok::<_, ProtocolError>(labels)
            }),
            (Party::Notary, move |e: &mut Endpoint| {
                let mut rng = ChaCha20Rng::seed_from_u64(2);
                let mut l = e.link(Party::Client);
                let mut d = DeapNotary::setup(&mut l, &b2, "t", true, &o2, &mut rng)?;
                d.execute(&mut l, &[to_bits(9, 32)], &mut rng)?;
                d.equality(&mut l, true)?;
                Ok::<_, ProtocolError>(d.garbling().delta)
            }),
        );
        let labels = c.unwrap();
        assert_eq!(n.unwrap(), delta);
        for (i, w) in p.enumerate() {
            assert_eq!(labels[w], presets[&w].select(xp[i], delta));
        }
    }
}
