//! In-process transport: framed messages, a hub with per-link FIFO queues,
//! two schedulers, adversarial interposition and transcript capture.

mod adversary;
mod fault;
mod hub;
mod message;

pub use adversary::{AdversaryRule, AdversaryScript, AppliedMutation, Mutation};
pub use fault::{FaultKind, PartyFault};
pub use hub::{
    run_pair, run_three, run_two, Direction, Endpoint, Hub, HubConfig, Link, Scheduler, Transcript, ViewEntry,
};
pub use message::{Party, PartyMessage};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChannelError {
    #[error("{peer} finished without sending the expected message")]
    Closed { peer: Party },
    #[error("every live party is blocked")]
    Deadlock,
    #[error("expected message {expected}, got {got}")]
    UnexpectedMessage { expected: String, got: String },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ping_pong(ep: &mut Endpoint, peer: Party, first: bool, rounds: u8) -> Vec<u8> {
        let mut seen = Vec::new();
        for i in 0..rounds {
            if first {
                ep.send(peer, "ping", vec![i]).unwrap();
                seen.extend(ep.recv(peer, "pong").unwrap());
            } else {
                let m = ep.recv(peer, "ping").unwrap();
                seen.extend(&m);
                ep.send(peer, "pong", vec![m[0] + 100]).unwrap();
            }
        }
        seen
    }

    fn run_with(sched: Scheduler) -> Transcript {
        let cfg = HubConfig {
            scheduler: sched,
            ..Default::default()
        };
        let (a, b, t) = run_two(
            &cfg,
            (Party::Client, |ep: &mut Endpoint| ping_pong(ep, Party::Notary, true, 5)),
            (Party::Notary, |ep: &mut Endpoint| {
                ping_pong(ep, Party::Client, false, 5)
            }),
        );
        assert_eq!(a, vec![100, 101, 102, 103, 104]);
        assert_eq!(b, vec![0, 1, 2, 3, 4]);
        t
    }

    #[test]
    fn schedulers_agree_on_views() {
        let a = run_with(Scheduler::Concurrent);
        let b = run_with(Scheduler::RoundRobin);
        assert_eq!(a, b);
        assert_eq!(a.messages.len(), 10);
    }

    #[test]
    fn views_are_exactly_own_traffic() {
        let t = run_with(Scheduler::Concurrent);
        for p in [Party::Client, Party::Notary] {
            for e in t.view(p) {
                match e.direction {
                    Direction::Sent => assert_eq!(e.message.sender, p),
                    Direction::Received => assert_eq!(e.message.receiver, p),
                }
            }
            assert_eq!(t.view(p).len(), 10);
        }
    }

    #[test]
    fn mutual_wait_is_deadlock() {
        for sched in [Scheduler::Concurrent, Scheduler::RoundRobin] {
            let cfg = HubConfig {
                scheduler: sched,
                ..Default::default()
            };
            let (a, b, _) = run_two(
                &cfg,
                (Party::Client, |ep: &mut Endpoint| ep.recv(Party::Notary, "x")),
                (Party::Notary, |ep: &mut Endpoint| ep.recv(Party::Client, "x")),
            );
            assert_eq!(a, Err(ChannelError::Deadlock));
            assert_eq!(b, Err(ChannelError::Deadlock));
        }
    }

    #[test]
    fn waiting_on_finished_peer_is_closed() {
        let (a, _, _) = run_two(
            &HubConfig::default(),
            (Party::Client, |ep: &mut Endpoint| ep.recv(Party::Notary, "x")),
            (Party::Notary, |_: &mut Endpoint| ()),
        );
        assert_eq!(a, Err(ChannelError::Closed { peer: Party::Notary }));
    }

    #[test]
    fn drop_and_reorder_are_observable() {
        let cfg = HubConfig {
            script: AdversaryScript {
                rules: vec![AdversaryRule {
                    sender: Party::Client,
                    receiver: None,
                    msg_type: "a".into(),
                    index: 0,
                    mutation: Mutation::Reorder,
                }],
            },
            ..Default::default()
        };
        let (_, b, t) = run_two(
            &cfg,
            (Party::Client, |ep: &mut Endpoint| {
                ep.send(Party::Notary, "a", vec![1]).unwrap();
                ep.send(Party::Notary, "b", vec![2]).unwrap();
            }),
            (Party::Notary, |ep: &mut Endpoint| ep.recv(Party::Client, "a")),
        );
        assert_eq!(
            b,
            Err(ChannelError::UnexpectedMessage {
                expected: "a".into(),
                got: "b".into()
            })
        );
        assert_eq!(t.mutations.len(), 1);

        let cfg = HubConfig {
            script: AdversaryScript {
                rules: vec![AdversaryRule {
                    sender: Party::Client,
                    receiver: None,
                    msg_type: "a".into(),
                    index: 0,
                    mutation: Mutation::Drop,
                }],
            },
            ..Default::default()
        };
        let (_, b, _) = run_two(
            &cfg,
            (Party::Client, |ep: &mut Endpoint| {
                ep.send(Party::Notary, "a", vec![1]).unwrap();
                ep.recv(Party::Notary, "ack")
            }),
            (Party::Notary, |ep: &mut Endpoint| ep.recv(Party::Client, "a")),
        );
        assert_eq!(b, Err(ChannelError::Deadlock));
    }

    #[test]
    fn three_party_relay() {
        let (c, n, s, t) = run_three(
            &HubConfig {
                scheduler: Scheduler::RoundRobin,
                ..Default::default()
            },
            |ep: &mut Endpoint| {
                ep.send(Party::Server, "hello", b"hi".to_vec()).unwrap();
                ep.recv(Party::Notary, "fwd").unwrap()
            },
            |ep: &mut Endpoint| {
                let m = ep.recv(Party::Server, "reply").unwrap();
                ep.send(Party::Client, "fwd", m).unwrap();
            },
            |ep: &mut Endpoint| {
                let m = ep.recv(Party::Client, "hello").unwrap();
                ep.send(Party::Notary, "reply", [m, b"!".to_vec()].concat()).unwrap();
            },
        );
        assert_eq!(c, b"hi!".to_vec());
        let _ = (n, s);
        assert_eq!(t.messages.len(), 3);
    }
}
