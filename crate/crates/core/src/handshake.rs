//! Three-party ECDH: the Client and Notary end up with additive shares of
//! the premaster secret while the Server runs plain single-party ECDH.
//!
//! Each party multiplies the server key by its own secret, giving points
//! `(x_C, y_C)` and `(x_N, y_N)`. The x-coordinate of their sum is
//! `lambda^2 - x_C - x_N` with `lambda = (y_N - y_C) / (x_N - x_C)`, so the
//! parties convert both differences to multiplicative shares, square the
//! local quotients, and convert back to additive shares of `lambda^2`.
//!
//! The conversion is run twice with the roles swapped and the two results
//! are compared inside a garbled comparator.

use num_bigint::BigUint;
use rand::RngCore;

use crate::algebra::{Curve, CurvePoint, Field, FieldElement};
use crate::circuits::build_comparator_circuit;
use crate::deap::{DeapClient, DeapNotary};
use crate::error::ProtocolError;
use crate::garble::GarbleOptions;
use crate::ole::{a2m_multiplier, a2m_other, m2a_receive, m2a_send};
use crate::transport::{Link, Party};

pub const MSG_SERVER_KEY: &str = "hs.server_key";
pub const MSG_NOTARY_SHARE: &str = "hs.notary_share";
pub const PHASE: &str = "handshake";

/// Fresh Notary keys drawn after a zero-slope collision before giving up.
pub const MAX_RETRIES: usize = 8;

/// The session public key sent to the server: `P_C + P_N`.
pub fn combine_session_pubkey(client: &CurvePoint, notary: &CurvePoint) -> CurvePoint {
    client.add(notary)
}

/// What the server computes: the x-coordinate of `S_sk * P_pk`.
pub fn server_premaster(server_sk: &BigUint, session_pk: &CurvePoint) -> Result<FieldElement, ProtocolError> {
    session_pk
        .mul(server_sk)
        .x()
        .ok_or_else(|| ProtocolError::Precondition("premaster point at infinity".into()))
}

#[derive(Clone, Debug)]
pub struct ClientHandshake {
    pub pms_share: FieldElement,
    pub session_pk: CurvePoint,
    pub notary_pk: CurvePoint,
    pub attempts: usize,
}

#[derive(Clone, Debug)]
pub struct NotaryHandshake {
    pub pms_share: FieldElement,
    pub server_pk: CurvePoint,
    pub attempts: usize,
}

fn coords(p: &CurvePoint) -> Result<(FieldElement, FieldElement), ProtocolError> {
    match (p.x(), p.y()) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(ProtocolError::Precondition("shared point at infinity".into())),
    }
}

/// One conversion run: returns this party's additive share of the
/// x-coordinate of the summed point. `lead` selects the a2m multiplier
/// and m2a sender role.
pub fn compute_pms_shares<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    point: &CurvePoint,
    lead: bool,
    rng: &mut R,
) -> Result<FieldElement, ProtocolError> {
    let (x, y) = coords(point)?;
    let client = link.me() == Party::Client;
    let signed = |v: &FieldElement| if client { v.neg() } else { v.clone() };
    let a2m = |link: &mut Link<'_>, v: &FieldElement, rng: &mut R| {
        if lead {
            a2m_multiplier(link, v, rng)
        } else {
            a2m_other(link, v, rng)
        }
    };
    let b = a2m(link, &signed(&x), rng).map_err(|e| match e {
        ProtocolError::ZeroSum => ProtocolError::PointCollision,
        e => e,
    })?;
    let a = a2m(link, &signed(&y), rng).map_err(|e| match e {
        ProtocolError::ZeroSum => ProtocolError::ZeroSlope,
        e => e,
    })?;
    let c = a.mul(&b.inv()?).square();
    let d = if lead {
        m2a_send(link, &c, rng)?
    } else {
        m2a_receive(link, &c, rng)?
    };
    Ok(d.sub(&x))
}

fn comparator_inputs(d: &FieldElement) -> Vec<Vec<bool>> {
    let w = d.field().bits();
    let v = d.value();
    vec![(0..w).map(|i| v.bit(i as u64)).collect()]
}

fn run_both<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    point: &CurvePoint,
    rng: &mut R,
) -> Result<(FieldElement, FieldElement), ProtocolError> {
    let notary_leads_first = link.me() == Party::Notary;
    link.set_phase(&format!("{PHASE}/run1"));
    let s1 = compute_pms_shares(link, point, notary_leads_first, rng)?;
    link.set_phase(&format!("{PHASE}/run2"));
    let s2 = compute_pms_shares(link, point, !notary_leads_first, rng)?;
    Ok((s1, s2))
}

/// Client side. `server_pk` comes from the server's key exchange message and
/// is forwarded to the Notary.
pub fn client_handshake<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    curve: &Curve,
    server_pk: &CurvePoint,
    rng: &mut R,
) -> Result<ClientHandshake, ProtocolError> {
    link.set_phase(PHASE);
    link.send(MSG_SERVER_KEY, server_pk.encode())?;
    let sk = curve.random_scalar(rng);
    let own = server_pk.mul(&sk);
    for attempt in 1..=MAX_RETRIES {
        link.set_phase(PHASE);
        let pn = curve.decode_point(&link.recv(MSG_NOTARY_SHARE)?)?;
        let (s1, s2) = match run_both(link, &own, rng) {
            Err(ProtocolError::ZeroSlope) => continue,
            other => other?,
        };
        let base = format!("{PHASE}/equality");
        let bundle = build_comparator_circuit(curve.field().bits());
        let mut deap = DeapClient::setup(link, &bundle, &base, false, rng)?;
        let out = deap.execute(link, &comparator_inputs(&s1.sub(&s2)), rng)?;
        deap.equality(link, &GarbleOptions::default(), false, rng)?;
        if out != [true] {
            return Err(ProtocolError::EqualityCheckFailed);
        }
        let pc = curve.generator().mul(&sk);
        return Ok(ClientHandshake {
            pms_share: s1,
            session_pk: combine_session_pubkey(&pc, &pn),
            notary_pk: pn,
            attempts: attempt,
        });
    }
    Err(ProtocolError::ZeroSlope)
}

/// Notary side. `fixed_sk` pins the first secret key (tests only).
pub fn notary_handshake<R: RngCore + ?Sized>(
    link: &mut Link<'_>,
    curve: &Curve,
    fixed_sk: Option<BigUint>,
    rng: &mut R,
) -> Result<NotaryHandshake, ProtocolError> {
    link.set_phase(PHASE);
    let server_pk = curve.decode_point(&link.recv(MSG_SERVER_KEY)?)?;
    if server_pk.is_identity() {
        return Err(ProtocolError::Malformed("server key is the identity".into()));
    }
    let mut fixed = fixed_sk;
    for attempt in 1..=MAX_RETRIES {
        link.set_phase(PHASE);
        let sk = fixed.take().unwrap_or_else(|| curve.random_scalar(rng));
        link.send(MSG_NOTARY_SHARE, curve.generator().mul(&sk).encode())?;
        let own = server_pk.mul(&sk);
        let (s1, s2) = match run_both(link, &own, rng) {
            Err(ProtocolError::ZeroSlope) => continue,
            other => other?,
        };
        let base = format!("{PHASE}/equality");
        let bundle = build_comparator_circuit(curve.field().bits());
        let mut deap = DeapNotary::setup(link, &bundle, &base, false, &GarbleOptions::default(), rng)?;
        let out = deap.execute(link, &comparator_inputs(&s2.sub(&s1)), rng)?;
        deap.equality(link, false)?;
        if out != [true] {
            return Err(ProtocolError::EqualityCheckFailed);
        }
        return Ok(NotaryHandshake {
            pms_share: s1,
            server_pk,
            attempts: attempt,
        });
    }
    Err(ProtocolError::ZeroSlope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::{run_two, AdversaryRule, AdversaryScript, Endpoint, HubConfig, Mutation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    type Out = (
        Result<ClientHandshake, ProtocolError>,
        Result<NotaryHandshake, ProtocolError>,
    );

    fn run(cfg: &HubConfig, curve: &Curve, seed: u64, notary_sk: Option<BigUint>) -> (Out, BigUint, CurvePoint) {
        let mut srng = ChaCha20Rng::seed_from_u64(seed ^ 0x5e);
        let ssk = curve.random_scalar(&mut srng);
        let spk = curve.generator().mul(&ssk);
        let (c1, c2, spk2) = (curve.clone(), curve.clone(), spk.clone());
        let (c, n, _) = run_two(
            cfg,
            (Party::Client, move |e: &mut Endpoint| {
                client_handshake(
                    &mut e.link(Party::Notary),
                    &c1,
                    &spk2,
                    &mut ChaCha20Rng::seed_from_u64(seed),
                )
            }),
            (Party::Notary, move |e: &mut Endpoint| {
                notary_handshake(
                    &mut e.link(Party::Client),
                    &c2,
                    notary_sk,
                    &mut ChaCha20Rng::seed_from_u64(seed + 1),
                )
            }),
        );
        ((c, n), ssk, spk)
    }

    #[test]
    fn shares_sum_to_server_premaster() {
        let curve = Curve::toy();
        for seed in 0..30 {
            let ((c, n), ssk, _) = run(&HubConfig::default(), &curve, seed, None);
            let (c, n) = (c.unwrap(), n.unwrap());
            assert_eq!(
                c.pms_share.add(&n.pms_share),
                server_premaster(&ssk, &c.session_pk).unwrap()
            );
        }
        let curve = Curve::p256();
        let ((c, n), ssk, _) = run(&HubConfig::default(), &curve, 99, None);
        let (c, n) = (c.unwrap(), n.unwrap());
        assert_eq!(
            c.pms_share.add(&n.pms_share),
            server_premaster(&ssk, &c.session_pk).unwrap()
        );
    }

    #[test]
    fn equal_x_coordinates_collide() {
        let curve = Curve::toy();
        // Recover the client scalar by replaying its rng, then pin the
        // notary key to it and to its negation.
        let sk_c = curve.random_scalar(&mut ChaCha20Rng::seed_from_u64(7));
        for sk_n in [sk_c.clone(), curve.order() - &sk_c] {
            let ((c, n), _, _) = run(&HubConfig::default(), &curve, 7, Some(sk_n));
            assert_eq!(c.unwrap_err(), ProtocolError::PointCollision);
            assert_eq!(n.unwrap_err(), ProtocolError::PointCollision);
        }
    }

    #[test]
    fn tampered_second_run_fails_equality() {
        let curve = Curve::toy();
        let cfg = HubConfig {
            script: AdversaryScript::single(AdversaryRule {
                sender: Party::Client,
                receiver: None,
                msg_type: crate::ole::MSG_MASKED.into(),
                index: 0,
                mutation: Mutation::FlipBits { offset: 1, mask: 0x02 },
            }),
            ..HubConfig::default()
        };
        let ((c, n), _, _) = run(&cfg, &curve, 11, None);
        assert_eq!(c.unwrap_err(), ProtocolError::EqualityCheckFailed);
        assert_eq!(n.unwrap_err(), ProtocolError::EqualityCheckFailed);
    }

    #[test]
    fn identity_server_key_rejected() {
        let curve = Curve::toy();
        let (c1, c2) = (curve.clone(), curve.clone());
        let (_, n, _) = run_two(
            &HubConfig::default(),
            (Party::Client, move |e: &mut Endpoint| {
                client_handshake(
                    &mut e.link(Party::Notary),
                    &c1,
                    &c1.identity(),
                    &mut ChaCha20Rng::seed_from_u64(1),
                )
            }),
            (Party::Notary, move |e: &mut Endpoint| {
                notary_handshake(
                    &mut e.link(Party::Client),
                    &c2,
                    None,
                    &mut ChaCha20Rng::seed_from_u64(2),
                )
            }),
        );
        assert!(n.is_err());
    }
}
