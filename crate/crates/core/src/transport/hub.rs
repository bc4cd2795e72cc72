use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};

use serde::{Deserialize, Serialize};

use super::adversary::{Action, AdversaryScript, AdversaryState, AppliedMutation};
use super::fault::{FaultKind, PartyFault};
use super::message::{Party, PartyMessage};
use super::ChannelError;

/// How party threads are interleaved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheduler {
    /// Parties run freely in parallel.
    #[default]
    Concurrent,
    /// Exactly one party runs at a time; control passes in fixed party order
    /// whenever the running party blocks or finishes.
    RoundRobin,
}

#[derive(Clone, Debug, Default)]
pub struct HubConfig {
    pub session: u64,
    pub scheduler: Scheduler,
    pub script: AdversaryScript,
    pub faults: Vec<PartyFault>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Running,
    Waiting(Party),
    Done,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Sent,
    Received,
}

/// One event in a party's own view of the session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewEntry {
    pub direction: Direction,
    pub message: PartyMessage,
}

/// Everything that crossed the hub during one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    /// Delivered messages in canonical `(sender, seq)` order, as the
    /// receiver saw them (after any mutation).
    pub messages: Vec<PartyMessage>,
    /// Per-party views: what each party sent (before mutation) and received.
    pub views: BTreeMap<Party, Vec<ViewEntry>>,
    pub mutations: Vec<AppliedMutation>,
}

impl Transcript {
    pub fn view(&self, party: Party) -> &[ViewEntry] {
        self.views.get(&party).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Message count and payload bytes per phase.
    pub fn summary(&self) -> BTreeMap<String, (usize, usize)> {
        let mut out: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for m in &self.messages {
            let e = out.entry(m.phase.clone()).or_default();
            e.0 += 1;
            e.1 += m.payload.len();
        }
        out
    }
}

struct State {
    session: u64,
    faults: Vec<PartyFault>,
    scheduler: Scheduler,
    order: Vec<Party>,
    status: HashMap<Party, Status>,
    turn: Option<Party>,
    queues: HashMap<(Party, Party), VecDeque<PartyMessage>>,
    held: HashMap<(Party, Party), Vec<PartyMessage>>,
    adversary: AdversaryState,
    delivered: Vec<PartyMessage>,
    views: BTreeMap<Party, Vec<ViewEntry>>,
    deadlocked: bool,
}

impl State {
    fn has_mail(&self, p: Party) -> bool {
        match self.status[&p] {
            // A waiter on a finished peer can run: it will observe `Closed`.
            Status::Waiting(from) => {
                self.queues.get(&(from, p)).is_some_and(|q| !q.is_empty()) || self.status[&from] == Status::Done
            }
            Status::Running => true,
            Status::Done => false,
        }
    }

    fn runnable(&self, p: Party) -> bool {
        self.status[&p] != Status::Done && self.has_mail(p)
    }

    /// Next party after `me` in cyclic order that can make progress.
    fn next_runnable(&self, me: Party) -> Option<Party> {
        let i = self.order.iter().position(|&p| p == me).unwrap_or(0);
        (1..=self.order.len())
            .map(|k| self.order[(i + k) % self.order.len()])
            .find(|&p| self.runnable(p))
    }

    fn all_stuck(&self) -> bool {
        self.order.iter().all(|p| !self.runnable(*p))
    }

    fn enqueue(&mut self, msg: PartyMessage) {
        self.delivered.push(msg.clone());
        self.queues
            .entry((msg.sender, msg.receiver))
            .or_default()
            .push_back(msg);
    }

    fn release_held(&mut self, sender: Party) {
        let keys: Vec<_> = self.held.keys().filter(|k| k.0 == sender).copied().collect();
        for k in keys {
            for m in self.held.remove(&k).unwrap_or_default() {
                self.enqueue(m);
            }
        }
    }
}

/// The in-process message switch shared by all party endpoints of one run.
#[derive(Clone)]
pub struct Hub {
    inner: Arc<(Mutex<State>, Condvar)>,
}

impl Hub {
    pub fn new(config: &HubConfig, parties: &[Party]) -> Self {
        let state = State {
            session: config.session,
            faults: config.faults.clone(),
            scheduler: config.scheduler,
            order: parties.to_vec(),
            status: parties.iter().map(|&p| (p, Status::Running)).collect(),
            turn: parties.first().copied(),
            queues: HashMap::new(),
            held: HashMap::new(),
            adversary: AdversaryState::new(&config.script),
            delivered: Vec::new(),
            views: parties.iter().map(|&p| (p, Vec::new())).collect(),
            deadlocked: false,
        };
        Self {
            inner: Arc::new((Mutex::new(state), Condvar::new())),
        }
    }

    fn lock(&self) -> MutexGuard<'_, State> {
        self.inner.0.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn wait<'a>(&self, g: MutexGuard<'a, State>) -> MutexGuard<'a, State> {
        self.inner.1.wait(g).unwrap_or_else(|e| e.into_inner())
    }

    fn notify(&self) {
        self.inner.1.notify_all();
    }

    pub fn endpoint(&self, me: Party) -> Endpoint {
        let faults = self.lock().faults.iter().filter(|f| f.party == me).cloned().collect();
        Endpoint {
            faults,
            hub: self.clone(),
            me,
            seq: 0,
            phase: String::new(),
            started: false,
        }
    }

    /// Collects the transcript. Call after every endpoint has finished.
    pub fn transcript(&self) -> Transcript {
        let st = self.lock();
        let mut messages = st.delivered.clone();
        messages.sort_by_key(|m| (m.sender, m.seq));
        Transcript {
            messages,
            views: st.views.clone(),
            mutations: st.adversary.log.clone(),
        }
    }
}

/// One party's handle on the hub.
pub struct Endpoint {
    faults: Vec<PartyFault>,
    hub: Hub,
    me: Party,
    seq: u64,
    phase: String,
    started: bool,
}

impl Endpoint {
    pub fn party(&self) -> Party {
        self.me
    }

    pub fn phase(&self) -> &str {
        &self.phase
    }

    pub fn set_phase(&mut self, phase: &str) {
        self.phase = phase.to_string();
    }

    /// Whether a scripted deviation applies to this party in its current phase.
    pub fn fault_active(&self, kind: FaultKind) -> bool {
        self.faults
            .iter()
            .any(|f| f.kind == kind && self.phase.starts_with(&f.phase_prefix))
    }

    /// A two-party view of this endpoint.
    pub fn link(&mut self, peer: Party) -> Link<'_> {
        Link { ep: self, peer }
    }

    /// Blocks until this party holds the round-robin baton.
    fn start(&mut self) {
        if self.started {
            return;
        }
        self.started = true;
        let mut st = self.hub.lock();
        while st.scheduler == Scheduler::RoundRobin && st.turn != Some(self.me) && !st.deadlocked {
            st = self.hub.wait(st);
        }
    }

    pub fn send(&mut self, to: Party, msg_type: &str, payload: Vec<u8>) -> Result<(), ChannelError> {
        self.start();
        let mut st = self.hub.lock();
        let msg = PartyMessage {
            session: st.session,
            sender: self.me,
            receiver: to,
            phase: self.phase.clone(),
            msg_type: msg_type.to_string(),
            payload,
            seq: self.seq,
        };
        self.seq += 1;
        st.views.entry(self.me).or_default().push(ViewEntry {
            direction: Direction::Sent,
            message: msg.clone(),
        });
        let link = (self.me, to);
        match st.adversary.intercept(msg) {
            Action::Deliver(m) => {
                st.enqueue(m);
                for h in st.held.remove(&link).unwrap_or_default() {
                    st.enqueue(h);
                }
            }
            Action::Drop => {}
            Action::Hold(m) => st.held.entry(link).or_default().push(m),
        }
        drop(st);
        self.hub.notify();
        Ok(())
    }

    /// Receives the next message from `from`, which must have type `msg_type`.
    pub fn recv(&mut self, from: Party, msg_type: &str) -> Result<Vec<u8>, ChannelError> {
        self.start();
        let me = self.me;
        let mut st = self.hub.lock();
        st.release_held(me);
        loop {
            if st.deadlocked {
                return Err(ChannelError::Deadlock);
            }
            let rr_ok = st.scheduler == Scheduler::Concurrent || st.turn == Some(me);
            if rr_ok {
                if let Some(m) = st.queues.get_mut(&(from, me)).and_then(VecDeque::pop_front) {
                    st.status.insert(me, Status::Running);
                    st.views.entry(me).or_default().push(ViewEntry {
                        direction: Direction::Received,
                        message: m.clone(),
                    });
                    if m.msg_type != msg_type {
                        return Err(ChannelError::UnexpectedMessage {
                            expected: msg_type.to_string(),
                            got: m.msg_type,
                        });
                    }
                    return Ok(m.payload);
                }
                if st.status[&from] == Status::Done && !st.held.contains_key(&(from, me)) {
                    st.status.insert(me, Status::Running);
                    return Err(ChannelError::Closed { peer: from });
                }
                st.status.insert(me, Status::Waiting(from));
                if st.scheduler == Scheduler::RoundRobin {
                    match st.next_runnable(me) {
                        Some(p) => st.turn = Some(p),
                        None => st.deadlocked = true,
                    }
                    self.hub.notify();
                } else if st.all_stuck() {
                    st.deadlocked = true;
                    self.hub.notify();
                }
                if st.deadlocked {
                    return Err(ChannelError::Deadlock);
                }
            }
            st = self.hub.wait(st);
        }
    }

    fn finish(&mut self) {
        self.start();
        let me = self.me;
        let mut st = self.hub.lock();
        st.release_held(me);
        st.status.insert(me, Status::Done);
        let live = st.status.values().any(|s| *s != Status::Done);
        if st.scheduler == Scheduler::RoundRobin {
            st.turn = st.next_runnable(me);
            if st.turn.is_none() && live {
                st.deadlocked = true;
            }
        } else if live && st.all_stuck() {
            st.deadlocked = true;
        }
        drop(st);
        self.hub.notify();
    }
}

impl Drop for Endpoint {
    fn drop(&mut self) {
        self.finish();
    }
}

/// An endpoint paired with a fixed peer, for two-party protocols.
pub struct Link<'a> {
    ep: &'a mut Endpoint,
    peer: Party,
}

impl Link<'_> {
    pub fn peer(&self) -> Party {
        self.peer
    }

    pub fn me(&self) -> Party {
        self.ep.me
    }

    pub fn phase(&self) -> &str {
        self.ep.phase()
    }

    pub fn set_phase(&mut self, phase: &str) {
        self.ep.set_phase(phase);
    }

    pub fn send(&mut self, msg_type: &str, payload: Vec<u8>) -> Result<(), ChannelError> {
        self.ep.send(self.peer, msg_type, payload)
    }

    pub fn recv(&mut self, msg_type: &str) -> Result<Vec<u8>, ChannelError> {
        self.ep.recv(self.peer, msg_type)
    }

    pub fn endpoint(&mut self) -> &mut Endpoint {
        self.ep
    }

    pub fn fault_active(&self, kind: FaultKind) -> bool {
        self.ep.fault_active(kind)
    }
}

/// Runs two parties on their own threads and returns their results with the transcript.
pub fn run_two<A, B, FA, FB>(config: &HubConfig, a: (Party, FA), b: (Party, FB)) -> (A, B, Transcript)
where
    A: Send,
    B: Send,
    FA: FnOnce(&mut Endpoint) -> A + Send,
    FB: FnOnce(&mut Endpoint) -> B + Send,
{
    let hub = Hub::new(config, &[a.0, b.0]);
    let (ra, rb) = std::thread::scope(|s| {
        let ha = {
            let mut ep = hub.endpoint(a.0);
            s.spawn(move || (a.1)(&mut ep))
        };
        let hb = {
            let mut ep = hub.endpoint(b.0);
            s.spawn(move || (b.1)(&mut ep))
        };
        (join(ha), join(hb))
    });
    (ra, rb, hub.transcript())
}

/// Three-party variant of [`run_two`]; party order is Client, Notary, Server.
pub fn run_three<C, N, S, FC, FN, FS>(config: &HubConfig, fc: FC, fnot: FN, fs: FS) -> (C, N, S, Transcript)
where
    C: Send,
    N: Send,
    S: Send,
    FC: FnOnce(&mut Endpoint) -> C + Send,
    FN: FnOnce(&mut Endpoint) -> N + Send,
    FS: FnOnce(&mut Endpoint) -> S + Send,
{
    let hub = Hub::new(config, &Party::ALL);
    let (rc, rn, rs) = std::thread::scope(|s| {
        let mut ec = hub.endpoint(Party::Client);
        let mut en = hub.endpoint(Party::Notary);
        let mut es = hub.endpoint(Party::Server);
        let hc = s.spawn(move || fc(&mut ec));
        let hn = s.spawn(move || fnot(&mut en));
        let hs = s.spawn(move || fs(&mut es));
        (join(hc), join(hn), join(hs))
    });
    (rc, rn, rs, hub.transcript())
}

fn join<T>(h: std::thread::ScopedJoinHandle<'_, T>) -> T {
    match h.join() {
        Ok(v) => v,
        Err(e) => std::panic::resume_unwind(e),
    }
}

/// Runs a Client/Notary protocol pair under the default configuration.
pub fn run_pair<A, B, FA, FB>(fa: FA, fb: FB) -> (A, B)
where
    A: Send,
    B: Send,
    FA: FnOnce(&mut Link<'_>) -> A + Send,
    FB: FnOnce(&mut Link<'_>) -> B + Send,
{
    let (a, b, _) = run_two(
        &HubConfig::default(),
        (Party::Client, move |ep: &mut Endpoint| fa(&mut ep.link(Party::Notary))),
        (Party::Notary, move |ep: &mut Endpoint| fb(&mut ep.link(Party::Client))),
    );
    (a, b)
}
