//! The two-party record layer over the toy cipher in GCM-like mode.
//!
//! Key material never exists in one place: the key schedule, the GHASH key,
//! the tag mask and every keystream block come out of dual-execution
//! instances whose Notary-side garblings are opened only after the TLS
//! connection closes. Blocks are 16 bits; bytes map to blocks big-endian.
//!
//! Sent records are encrypted block by block with the plaintext as a Client
//! input, so the Client learns the Notary's encoding of the plaintext as a
//! side effect. Received records are first authenticated, then each block's
//! keystream is computed under a Client mask; the Client fetches the
//! encoding of the recovered plaintext by OT and proves, with free-XOR
//! labels only, that it XORs with the keystream to the public ciphertext.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};

use crate::algebra::{FieldElement, Gf2kElement, Gf2kField};
use crate::circuits::{
    block_bits, build_key_schedule_circuit, build_masked_block_circuit, build_record_block_circuit, counter_block,
    from_bits, to_bits, CircuitBundle,
};
use crate::codec::{Reader, Writer};
use crate::deap::{preset_options, DeapClient, DeapNotary};
use crate::encoding::{block_bit_position, Direction, Encoder};
use crate::error::{AbortCause, ProtocolError};
use crate::garble::{read_labels, write_labels, GarbleOptions, Label};
use crate::mac::{blocks_to_elements, bytes_to_blocks, compute_mac_2pc, compute_share_powers, verify_mac_2pc};
use crate::ot::{ot_receive, ot_send};
use crate::transport::Link;

pub const MSG_PLAN: &str = "rec.plan";
pub const MSG_SERVER_RECORD: &str = "rec.server_record";
pub const MSG_CONSISTENCY: &str = "rec.consistency";

/// Nonce of both directions; the keys differ per direction.
pub const RECORD_NONCE: u64 = 1;
/// Counter blocks available per record.
pub const MAX_BLOCKS: usize = 0xfff;

/// One record on the wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptedRecord {
    pub direction: Direction,
    pub seq: u64,
    pub ciphertext: Vec<u8>,
    /// Absent exactly when the ciphertext is empty.
    pub tag: Option<u16>,
}

impl EncryptedRecord {
    pub fn block_count(&self) -> usize {
        self.ciphertext.len().div_ceil(2)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u8(self.direction.tag())
            .u64(self.seq)
            .u32(self.block_count() as u32)
            .bytes(&self.ciphertext);
        match self.tag {
            Some(t) => w.u8(1).fixed(&t.to_be_bytes()),
            None => w.u8(0),
        };
        w.finish()
    }

    pub fn decode(buf: &[u8]) -> Result<Self, ProtocolError> {
        let mut r = Reader::new(buf);
        let direction = match r.u8()? {
            0 => Direction::Sent,
            1 => Direction::Received,
            d => return Err(ProtocolError::Malformed(format!("record direction {d}"))),
        };
        let seq = r.u64()?;
        let blocks = r.u32()? as usize;
        let ciphertext = r.bytes()?.to_vec();
        let tag = match r.u8()? {
            0 => None,
            1 => Some(u16::from_be_bytes(r.array()?)),
            t => return Err(ProtocolError::Malformed(format!("tag flag {t}"))),
        };
        r.finish()?;
        let rec = Self {
            direction,
            seq,
            ciphertext,
            tag,
        };
        if rec.block_count() != blocks || rec.ciphertext.is_empty() != rec.tag.is_none() || blocks > MAX_BLOCKS {
            return Err(ProtocolError::Malformed("record framing".into()));
        }
        Ok(rec)
    }
}

/// How the Notary fixed its garbling of an instance.
#[derive(Clone, Copy, Debug)]
enum Presets {
    Plain,
    /// Session offset only, so tapped wires share the encoder's offset.
    Delta,
    /// Session offset plus encoder 0-labels on the plaintext group.
    Encoder {
        dir: Direction,
        block: usize,
        len: usize,
    },
}

fn presets_options(p: Presets, bundle: &CircuitBundle, enc: &Encoder) -> GarbleOptions {
    match p {
        Presets::Plain => GarbleOptions::default(),
        Presets::Delta => preset_options(enc.delta(), BTreeMap::new()),
        Presets::Encoder { dir, block, len } => {
            let wires = bundle.circuit.group_wires(1);
            let mut labels = BTreeMap::new();
            for (t, w) in wires.enumerate() {
                let (pos, j) = block_bit_position(block, t);
                if (pos as usize) < len {
                    labels.insert(w, enc.zero_label(dir, pos, j));
                }
            }
            preset_options(enc.delta(), labels)
        }
    }
}

fn check_len(len: usize) -> Result<usize, ProtocolError> {
    let n = len.div_ceil(2);
    if n > MAX_BLOCKS {
        return Err(ProtocolError::LengthMismatch(format!(
            "{len} bytes exceed the record limit"
        )));
    }
    Ok(n)
}

fn phase_base(dir: Direction) -> &'static str {
    match dir {
        Direction::Sent => "record.sent",
        Direction::Received => "record.recv",
    }
}

fn u16_from(bits: &[bool]) -> u16 {
    from_bits(bits) as u16
}

fn gf16(v: u16) -> Gf2kElement {
    Gf2kField::Gf16.elem(u128::from(v))
}

fn field_bits(v: &FieldElement) -> Vec<bool> {
    (0..v.field().bits()).map(|i| v.value().bit(i as u64)).collect()
}

#[derive(Default)]
struct DirState {
    h_powers: Vec<Gf2kElement>,
    j0: Option<Gf2kElement>,
    mac_verified: bool,
    plaintext: Vec<u8>,
    ciphertext: Vec<u8>,
    labels: Vec<[Label; 8]>,
    ready: bool,
}

/// Client half of the record layer.
pub struct ClientRecordLayer {
    keys: (u32, u32),
    instances: Vec<(DeapClient, Presets)>,
    sent: DirState,
    recv: DirState,
    pending: Option<EncryptedRecord>,
}

impl ClientRecordLayer {
    fn deap<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        bundle: &CircuitBundle,
        base: &str,
        inputs: &[Vec<bool>],
        presets: Presets,
        rng: &mut R,
    ) -> Result<Vec<bool>, ProtocolError> {
        let mut d = DeapClient::setup(link, bundle, base, true, rng)?;
        let out = d.execute(link, inputs, rng)?;
        self.instances.push((d, presets));
        Ok(out)
    }

    /// Runs the key schedule on the Client's premaster share.
    pub fn setup<R: RngCore + ?Sized>(
        link: &mut Link<'_>,
        pms_share: &FieldElement,
        rng: &mut R,
    ) -> Result<Self, ProtocolError> {
        let mut s = Self {
            keys: (0, 0),
            instances: Vec::new(),
            sent: DirState::default(),
            recv: DirState::default(),
            pending: None,
        };
        let bundle = build_key_schedule_circuit(pms_share.field().modulus());
        let mask: u64 = rng.gen();
        let v = s.deap(
            link,
            &bundle,
            "keys",
            &[field_bits(pms_share), to_bits(u128::from(mask), 64)],
            Presets::Plain,
            rng,
        )?;
        let k = from_bits(&v) as u64 ^ mask;
        s.keys = (k as u32, (k >> 32) as u32);
        Ok(s)
    }

    fn key(&self, dir: Direction) -> u32 {
        match dir {
            Direction::Sent => self.keys.0,
            Direction::Received => self.keys.1,
        }
    }

    fn dir_mut(&mut self, dir: Direction) -> &mut DirState {
        match dir {
            Direction::Sent => &mut self.sent,
            Direction::Received => &mut self.recv,
        }
    }

    fn dir(&self, dir: Direction) -> &DirState {
        match dir {
            Direction::Sent => &self.sent,
            Direction::Received => &self.recv,
        }
    }

    fn masked_share<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        dir: Direction,
        ctr: u16,
        name: &str,
        rng: &mut R,
    ) -> Result<Gf2kElement, ProtocolError> {
        let mask: u16 = rng.gen();
        let kc = to_bits(u128::from(self.key(dir)), 32);
        let base = format!("{}/{name}", phase_base(dir));
        self.deap(
            link,
            &build_masked_block_circuit(ctr),
            &base,
            &[kc, block_bits(mask)],
            Presets::Plain,
            rng,
        )?;
        Ok(gf16(mask))
    }

    fn prepare<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        dir: Direction,
        blocks: usize,
        rng: &mut R,
    ) -> Result<(), ProtocolError> {
        let h = self.masked_share(link, dir, 0, "h", rng)?;
        let j0 = self.masked_share(link, dir, counter_block(RECORD_NONCE, 0), "j0", rng)?;
        link.set_phase(&format!("{}/powers", phase_base(dir)));
        let powers = compute_share_powers(link, &h, blocks, rng)?;
        let st = self.dir_mut(dir);
        st.h_powers = powers;
        st.j0 = Some(j0);
        st.ready = true;
        Ok(())
    }

    /// Encrypts and tags the request. Empty plaintexts produce an empty,
    /// untagged record without running any subprotocol.
    pub fn encrypt<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        plaintext: &[u8],
        rng: &mut R,
    ) -> Result<EncryptedRecord, ProtocolError> {
        let dir = Direction::Sent;
        link.set_phase(phase_base(dir));
        let n = check_len(plaintext.len())?;
        if self.sent.ready {
            return Err(ProtocolError::Precondition("request already encrypted".into()));
        }
        let mut w = Writer::new();
        w.u32(plaintext.len() as u32);
        link.send(MSG_PLAN, w.finish())?;
        self.sent.plaintext = plaintext.to_vec();
        if n == 0 {
            self.sent.ready = true;
            return Ok(EncryptedRecord {
                direction: dir,
                seq: 0,
                ciphertext: Vec::new(),
                tag: None,
            });
        }
        self.prepare(link, dir, n, rng)?;
        let kc = to_bits(u128::from(self.key(dir)), 32);
        let blocks = bytes_to_blocks(plaintext);
        let mut c = Vec::with_capacity(2 * n);
        let mut labels = vec![[Label(0); 8]; plaintext.len()];
        for (i, &p) in blocks.iter().enumerate() {
            let bundle = build_record_block_circuit(counter_block(RECORD_NONCE, i as u64 + 1));
            let presets = Presets::Encoder {
                dir,
                block: i,
                len: plaintext.len(),
            };
            let out = self.deap(
                link,
                &bundle,
                &format!("record.sent/block{i}"),
                &[kc.clone(), block_bits(p)],
                presets,
                rng,
            )?;
            c.extend(u16_from(&out).to_be_bytes());
            let (d, _) = self.instances.last().expect("instance just pushed");
            let wires = bundle.circuit.group_wires(1);
            for (t, w) in wires.enumerate() {
                let (pos, j) = block_bit_position(i, t);
                if (pos as usize) < plaintext.len() {
                    labels[pos as usize][j as usize] = d.peer_wire_labels()[w];
                }
            }
        }
        c.truncate(plaintext.len());
        link.set_phase("record.sent/mac");
        let st = &self.sent;
        let tag = compute_mac_2pc(
            link,
            &blocks_to_elements(&bytes_to_blocks(&c)),
            &st.h_powers,
            st.j0.as_ref().expect("prepared"),
        )?
        .expect("client receives the tag");
        self.sent.ciphertext = c.clone();
        self.sent.labels = labels;
        Ok(EncryptedRecord {
            direction: dir,
            seq: 0,
            ciphertext: c,
            tag: Some(tag.bits() as u16),
        })
    }

    /// Forwards the server's record to the Notary and checks its tag jointly.
    pub fn verify_response_mac<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        record: &EncryptedRecord,
        rng: &mut R,
    ) -> Result<(), ProtocolError> {
        let dir = Direction::Received;
        link.set_phase(phase_base(dir));
        let n = check_len(record.ciphertext.len())?;
        link.send(MSG_SERVER_RECORD, record.encode())?;
        self.pending = Some(record.clone());
        if n == 0 {
            self.recv.mac_verified = true;
            return Ok(());
        }
        self.prepare(link, dir, n, rng)?;
        link.set_phase("record.recv/mac");
        let tag = gf16(
            record
                .tag
                .ok_or_else(|| ProtocolError::Malformed("missing tag".into()))?,
        );
        let st = &self.recv;
        verify_mac_2pc(
            link,
            &blocks_to_elements(&bytes_to_blocks(&record.ciphertext)),
            &st.h_powers,
            st.j0.as_ref().expect("prepared"),
            &tag,
            rng,
        )?;
        self.recv.mac_verified = true;
        Ok(())
    }

    /// Decrypts the authenticated response. Refused until its tag verified.
    pub fn decrypt_response<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        rng: &mut R,
    ) -> Result<Vec<u8>, ProtocolError> {
        if !self.recv.mac_verified {
            return Err(ProtocolError::Precondition(
                "decryption requested before the MAC verified".into(),
            ));
        }
        let record = self
            .pending
            .take()
            .ok_or_else(|| ProtocolError::Precondition("no pending record".into()))?;
        let c = &record.ciphertext;
        if c.is_empty() {
            return Ok(Vec::new());
        }
        let dir = Direction::Received;
        let kc = to_bits(u128::from(self.key(dir)), 32);
        let cblocks = bytes_to_blocks(c);
        let mut plain = Vec::with_capacity(c.len() + 1);
        let mut ectr_labels = Vec::with_capacity(cblocks.len());
        for (i, &cb) in cblocks.iter().enumerate() {
            let bundle = build_record_block_circuit(counter_block(RECORD_NONCE, i as u64 + 1));
            let z: u16 = rng.gen();
            let out = self.deap(
                link,
                &bundle,
                &format!("record.recv/block{i}"),
                &[kc.clone(), block_bits(z)],
                Presets::Delta,
                rng,
            )?;
            let ectr = u16_from(&out) ^ z;
            plain.extend((cb ^ ectr).to_be_bytes());
            let (d, _) = self.instances.last().expect("instance just pushed");
            let taps: Vec<Label> = bundle.taps["ectr"].iter().map(|&w| d.peer_wire_labels()[w]).collect();
            ectr_labels.push(taps);
        }
        plain.truncate(c.len());

        link.set_phase("record.recv/labels");
        let choices: Vec<bool> = plain
            .iter()
            .flat_map(|b| (0..8).map(move |j| b >> (7 - j) & 1 == 1))
            .collect();
        let got = ot_receive(link, &choices, rng)?;
        let mut labels = vec![[Label(0); 8]; plain.len()];
        for (k, m) in got.into_iter().enumerate() {
            let b: [u8; 16] = m
                .as_slice()
                .try_into()
                .map_err(|_| ProtocolError::Malformed("label width".into()))?;
            labels[k / 8][k % 8] = Label::from_bytes(b);
        }

        link.set_phase("record.recv/consistency");
        let mut proof = Vec::new();
        for (i, taps) in ectr_labels.iter().enumerate() {
            for (t, e) in taps.iter().enumerate() {
                let (pos, j) = block_bit_position(i, t);
                if (pos as usize) < plain.len() {
                    proof.push(labels[pos as usize][j as usize] ^ *e);
                }
            }
        }
        let mut w = Writer::new();
        write_labels(&mut w, &proof);
        link.send(MSG_CONSISTENCY, w.finish())?;
        self.recv.plaintext = plain.clone();
        self.recv.ciphertext = c.clone();
        self.recv.labels = labels;
        Ok(plain)
    }

    pub fn plaintext(&self, dir: Direction) -> &[u8] {
        &self.dir(dir).plaintext
    }

    pub fn ciphertext(&self, dir: Direction) -> &[u8] {
        &self.dir(dir).ciphertext
    }

    /// Active encoder labels per transcript byte, MSB first.
    pub fn labels(&self, dir: Direction) -> &[[Label; 8]] {
        &self.dir(dir).labels
    }

    /// Key shares `(client_write, server_write)`; exposed for tests.
    #[doc(hidden)]
    pub fn key_shares(&self) -> (u32, u32) {
        self.keys
    }

    pub fn instance_count(&self) -> usize {
        self.instances.len()
    }

    /// After the encoder seed is opened: checks every held label against
    /// it, then runs all deferred equality checks.
    pub fn finalize<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        encoder: &Encoder,
        tls_closed: bool,
        rng: &mut R,
    ) -> Result<(), ProtocolError> {
        for dir in [Direction::Sent, Direction::Received] {
            let st = self.dir(dir);
            for (pos, (byte, l)) in st.plaintext.iter().zip(&st.labels).enumerate() {
                if encoder.encode_byte(dir, pos as u64, *byte) != *l {
                    return Err(ProtocolError::ClientAbort(AbortCause::InputLabelMismatch));
                }
            }
        }
        for (d, p) in &mut self.instances {
            let opts = presets_options(*p, d.bundle(), encoder);
            d.equality(link, &opts, tls_closed, rng)?;
        }
        Ok(())
    }
}

/// Notary half of the record layer.
pub struct NotaryRecordLayer {
    keys: (u32, u32),
    encoder: Encoder,
    instances: Vec<DeapNotary>,
    sent: DirState,
    recv: DirState,
}

impl NotaryRecordLayer {
    fn deap<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        bundle: &CircuitBundle,
        base: &str,
        inputs: &[Vec<bool>],
        presets: Presets,
        rng: &mut R,
    ) -> Result<Vec<bool>, ProtocolError> {
        let opts = presets_options(presets, bundle, &self.encoder);
        let mut d = DeapNotary::setup(link, bundle, base, true, &opts, rng)?;
        let out = d.execute(link, inputs, rng)?;
        self.instances.push(d);
        Ok(out)
    }

    pub fn setup<R: RngCore + ?Sized>(
        link: &mut Link<'_>,
        pms_share: &FieldElement,
        encoder: Encoder,
        rng: &mut R,
    ) -> Result<Self, ProtocolError> {
        let mut s = Self {
            keys: (0, 0),
            encoder,
            instances: Vec::new(),
            sent: DirState::default(),
            recv: DirState::default(),
        };
        let bundle = build_key_schedule_circuit(pms_share.field().modulus());
        let mask: u64 = rng.gen();
        s.deap(
            link,
            &bundle,
            "keys",
            &[field_bits(pms_share), to_bits(u128::from(mask), 64)],
            Presets::Plain,
            rng,
        )?;
        s.keys = (mask as u32, (mask >> 32) as u32);
        Ok(s)
    }

    fn key(&self, dir: Direction) -> u32 {
        match dir {
            Direction::Sent => self.keys.0,
            Direction::Received => self.keys.1,
        }
    }

    fn dir_mut(&mut self, dir: Direction) -> &mut DirState {
        match dir {
            Direction::Sent => &mut self.sent,
            Direction::Received => &mut self.recv,
        }
    }

    fn masked_share<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        dir: Direction,
        ctr: u16,
        name: &str,
        rng: &mut R,
    ) -> Result<Gf2kElement, ProtocolError> {
        let mask: u16 = rng.gen();
        let kn = to_bits(u128::from(self.key(dir)), 32);
        let base = format!("{}/{name}", phase_base(dir));
        let v = self.deap(
            link,
            &build_masked_block_circuit(ctr),
            &base,
            &[kn, block_bits(mask)],
            Presets::Plain,
            rng,
        )?;
        Ok(gf16(u16_from(&v) ^ mask))
    }

    fn prepare<R: RngCore + ?Sized>(
        &mut self,
        link: &mut Link<'_>,
        dir: Direction,
        blocks: usize,
        rng: &mut R,
    ) -> Result<(), ProtocolError> {
        let h = self.masked_share(link, dir, 0, "h", rng)?;
        let j0 = self.masked_share(link, dir, counter_block(RECORD_NONCE, 0), "j0", rng)?;
        link.set_phase(&format!("{}/powers", phase_base(dir)));
        let powers = compute_share_powers(link, &h, blocks, rng)?;
        let st = self.dir_mut(dir);
        st.h_powers = powers;
        st.j0 = Some(j0);
        st.ready = true;
        Ok(())
    }

    /// Notary side of [`ClientRecordLayer::encrypt`]; returns the ciphertext.
    pub fn encrypt<R: RngCore + ?Sized>(&mut self, link: &mut Link<'_>, rng: &mut R) -> Result<Vec<u8>, ProtocolError> {
        let dir = Direction::Sent;
        link.set_phase(phase_base(dir));
        let plan = link.recv(MSG_PLAN)?;
        let mut r = Reader::new(&plan);
        let len = r.u32()? as usize;
        r.finish()?;
        let n = check_len(len)?;
        if n == 0 {
            return Ok(Vec::new());
        }
        self.prepare(link, dir, n, rng)?;
        let kn = to_bits(u128::from(self.key(dir)), 32);
        let mut c = Vec::with_capacity(2 * n);
        for i in 0..n {
            let bundle = build_record_block_circuit(counter_block(RECORD_NONCE, i as u64 + 1));
            let presets = Presets::Encoder { dir, block: i, len };
            let out = self.deap(
                link,
                &bundle,
                &format!("record.sent/block{i}"),
                std::slice::from_ref(&kn),
                presets,
                rng,
            )?;
            c.extend(u16_from(&out).to_be_bytes());
        }
        c.truncate(len);
        link.set_phase("record.sent/mac");
        let st = &self.sent;
        compute_mac_2pc(
            link,
            &blocks_to_elements(&bytes_to_blocks(&c)),
            &st.h_powers,
            st.j0.as_ref().expect("prepared"),
        )?;
        self.sent.ciphertext = c.clone();
        Ok(c)
    }

    /// Notary side of MAC verification followed by decryption; the Notary
    /// never starts a decryption instance for an unauthenticated record.
    pub fn decrypt<R: RngCore + ?Sized>(&mut self, link: &mut Link<'_>, rng: &mut R) -> Result<Vec<u8>, ProtocolError> {
        let dir = Direction::Received;
        link.set_phase(phase_base(dir));
        let record = EncryptedRecord::decode(&link.recv(MSG_SERVER_RECORD)?)?;
        let c = record.ciphertext.clone();
        let n = check_len(c.len())?;
        if n == 0 {
            return Ok(Vec::new());
        }
        self.prepare(link, dir, n, rng)?;
        link.set_phase("record.recv/mac");
        let tag = gf16(
            record
                .tag
                .ok_or_else(|| ProtocolError::Malformed("missing tag".into()))?,
        );
        let st = &self.recv;
        verify_mac_2pc(
            link,
            &blocks_to_elements(&bytes_to_blocks(&c)),
            &st.h_powers,
            st.j0.as_ref().expect("prepared"),
            &tag,
            rng,
        )?;
        self.recv.mac_verified = true;

        let kn = to_bits(u128::from(self.key(dir)), 32);
        let mut ectr_zero = Vec::with_capacity(n);
        for i in 0..n {
            let bundle = build_record_block_circuit(counter_block(RECORD_NONCE, i as u64 + 1));
            self.deap(
                link,
                &bundle,
                &format!("record.recv/block{i}"),
                std::slice::from_ref(&kn),
                Presets::Delta,
                rng,
            )?;
            let g = self.instances.last().expect("instance just pushed").garbling();
            let taps: Vec<Label> = bundle.taps["ectr"].iter().map(|&w| g.zero_labels[w]).collect();
            ectr_zero.push(taps);
        }

        link.set_phase("record.recv/labels");
        let mut pairs = Vec::with_capacity(8 * c.len());
        for pos in 0..c.len() as u64 {
            for j in 0..8 {
                let l0 = self.encoder.zero_label(dir, pos, j);
                let l1 = l0 ^ self.encoder.delta();
                pairs.push((l0.to_bytes().to_vec(), l1.to_bytes().to_vec()));
            }
        }
        ot_send(link, &pairs, rng)?;

        link.set_phase("record.recv/consistency");
        let frame = link.recv(MSG_CONSISTENCY)?;
        let mut r = Reader::new(&frame);
        let proof = read_labels(&mut r)?;
        r.finish()?;
        if proof.len() != 8 * c.len() {
            return Err(ProtocolError::ConsistencyRejected);
        }
        let cblocks = bytes_to_blocks(&c);
        let delta = self.encoder.delta();
        let mut k = 0;
        for (i, taps) in ectr_zero.iter().enumerate() {
            for (t, e0) in taps.iter().enumerate() {
                let (pos, j) = block_bit_position(i, t);
                if pos as usize >= c.len() {
                    continue;
                }
                let bit = cblocks[i] >> t & 1 == 1;
                let expect = (self.encoder.zero_label(dir, pos, j) ^ *e0).select(bit, delta);
                if proof[k] != expect {
                    return Err(ProtocolError::ConsistencyRejected);
                }
                k += 1;
            }
        }
        self.recv.ciphertext = c.clone();
        Ok(c)
    }

    pub fn ciphertext(&self, dir: Direction) -> &[u8] {
        match dir {
            Direction::Sent => &self.sent.ciphertext,
            Direction::Received => &self.recv.ciphertext,
        }
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    #[doc(hidden)]
    pub fn key_shares(&self) -> (u32, u32) {
        self.keys
    }

    pub fn finalize(&mut self, link: &mut Link<'_>, tls_closed: bool) -> Result<(), ProtocolError> {
        for d in &mut self.instances {
            d.equality(link, tls_closed)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Field, PrimeField};
    use crate::circuits::spn;
    use crate::mac::{toy_gcm_open, toy_gcm_seal};
    use crate::transport::{run_two, Endpoint, HubConfig, Party};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    /// Request record, decrypted response, key shares.
    type ClientView = (EncryptedRecord, Vec<u8>, (u32, u32));

    struct Outcome {
        client: Result<ClientView, ProtocolError>,
        notary: Result<(u32, u32), ProtocolError>,
        pms: FieldElement,
    }

    /// Runs key schedule, request encryption, and response decryption where
    /// `respond` plays the server on the combined key.
    fn session(
        cfg: &HubConfig,
        seed: u64,
        request: Vec<u8>,
        respond: impl FnOnce(u32, &EncryptedRecord) -> EncryptedRecord + Send + 'static,
    ) -> Outcome {
        let f = PrimeField::toy();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (sc, sn) = (f.random(&mut rng), f.random(&mut rng));
        let pms = sc.add(&sn);
        let (cw, sw) = spn::derive_keys(&pms.to_bytes());
        let enc = Encoder::new([seed as u8; 32]);
        let enc2 = enc.clone();
        let (client, notary, _) = run_two(
            cfg,
            (Party::Client, move |e: &mut Endpoint| {
                let mut rng = ChaCha20Rng::seed_from_u64(seed + 1);
                let mut l = e.link(Party::Notary);
                let mut rl = ClientRecordLayer::setup(&mut l, &sc, &mut rng)?;
                let req = rl.encrypt(&mut l, &request, &mut rng)?;
                let resp = respond(sw, &req);
                rl.verify_response_mac(&mut l, &resp, &mut rng)?;
                let plain = rl.decrypt_response(&mut l, &mut rng)?;
                rl.finalize(&mut l, &enc2, true, &mut rng)?;
                Ok((req, plain, rl.key_shares()))
            }),
            (Party::Notary, move |e: &mut Endpoint| {
                let mut rng = ChaCha20Rng::seed_from_u64(seed + 2);
                let mut l = e.link(Party::Client);
                let mut rl = NotaryRecordLayer::setup(&mut l, &sn, enc, &mut rng)?;
                rl.encrypt(&mut l, &mut rng)?;
                rl.decrypt(&mut l, &mut rng)?;
                rl.finalize(&mut l, true)?;
                Ok(rl.key_shares())
            }),
        );
        let _ = cw;
        Outcome { client, notary, pms }
    }

    fn echo_server(reply: Vec<u8>) -> impl FnOnce(u32, &EncryptedRecord) -> EncryptedRecord + Send + 'static {
        move |sw, _| {
            let (c, t) = toy_gcm_seal(sw, RECORD_NONCE, &reply);
            EncryptedRecord {
                direction: Direction::Received,
                seq: 0,
                ciphertext: c,
                tag: if reply.is_empty() { None } else { Some(t) },
            }
        }
    }

    #[test]
    fn round_trip_against_single_party_cipher() {
        for (seed, req, resp) in [
            (1u64, b"GET /".to_vec(), b"200 OK".to_vec()),
            (2, b"x".to_vec(), b"hello world!!".to_vec()),
            (3, b"abcd".to_vec(), b"z".to_vec()),
        ] {
            let o = session(&HubConfig::default(), seed, req.clone(), echo_server(resp.clone()));
            let (record, plain, kc) = o.client.unwrap();
            let kn = o.notary.unwrap();
            let (cw, sw) = spn::derive_keys(&o.pms.to_bytes());
            assert_eq!((kc.0 ^ kn.0, kc.1 ^ kn.1), (cw, sw));
            let (c, t) = toy_gcm_seal(cw, RECORD_NONCE, &req);
            assert_eq!(record.ciphertext, c);
            assert_eq!(record.tag, Some(t));
            assert_eq!(toy_gcm_open(cw, RECORD_NONCE, &record.ciphertext, t).unwrap(), req);
            assert_eq!(plain, resp);
        }
    }

    #[test]
    fn empty_records_run_no_blocks() {
        let o = session(&HubConfig::default(), 4, Vec::new(), echo_server(Vec::new()));
        let (record, plain, _) = o.client.unwrap();
        assert!(record.ciphertext.is_empty() && record.tag.is_none());
        assert!(plain.is_empty());
    }

    #[test]
    fn tampered_response_fails_mac_before_decryption() {
        let o = session(&HubConfig::default(), 5, b"hi".to_vec(), |sw, _| {
            let (mut c, t) = toy_gcm_seal(sw, RECORD_NONCE, b"secret");
            c[2] ^= 0x02;
            EncryptedRecord {
                direction: Direction::Received,
                seq: 0,
                ciphertext: c,
                tag: Some(t),
            }
        });
        assert_eq!(o.client.unwrap_err(), ProtocolError::MacMismatch);
        assert_eq!(o.notary.unwrap_err(), ProtocolError::MacMismatch);
    }

    #[test]
    fn forged_consistency_proof_rejected() {
        use crate::transport::{AdversaryRule, AdversaryScript, Mutation};
        let cfg = HubConfig {
            script: AdversaryScript::single(AdversaryRule {
                sender: Party::Client,
                receiver: None,
                msg_type: MSG_CONSISTENCY.into(),
                index: 0,
                mutation: Mutation::FlipBits { offset: 6, mask: 0x10 },
            }),
            ..HubConfig::default()
        };
        let o = session(&cfg, 6, b"q".to_vec(), echo_server(b"ok".to_vec()));
        assert_eq!(o.notary.unwrap_err(), ProtocolError::ConsistencyRejected);
        assert!(o.client.is_err());
    }

    #[test]
    fn decrypt_refused_before_mac() {
        let f = PrimeField::toy();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let (sc, sn) = (f.random(&mut rng), f.random(&mut rng));
        let (client, _, _) = run_two(
            &HubConfig::default(),
            (Party::Client, move |e: &mut Endpoint| {
                let mut rng = ChaCha20Rng::seed_from_u64(1);
                let mut l = e.link(Party::Notary);
                let mut rl = ClientRecordLayer::setup(&mut l, &sc, &mut rng)?;
                rl.decrypt_response(&mut l, &mut rng)
            }),
            (Party::Notary, move |e: &mut Endpoint| {
                let mut rng = ChaCha20Rng::seed_from_u64(2);
                let mut l = e.link(Party::Client);
                NotaryRecordLayer::setup(&mut l, &sn, Encoder::new([0; 32]), &mut rng).map(|_| ())
            }),
        );
        assert!(matches!(client.unwrap_err(), ProtocolError::Precondition(_)));
    }

    #[test]
    fn record_frame_round_trip_and_rejects_bad_framing() {
        let r = EncryptedRecord {
            direction: Direction::Received,
            seq: 9,
            ciphertext: vec![1, 2, 3],
            tag: Some(0xabcd),
        };
        assert_eq!(EncryptedRecord::decode(&r.encode()).unwrap(), r);
        let mut bad = r.clone();
        bad.tag = None;
        assert!(EncryptedRecord::decode(&bad.encode()).is_err());
        let mut buf = r.encode();
        buf[9] = 7;
        assert!(EncryptedRecord::decode(&buf).is_err());
    }
}
