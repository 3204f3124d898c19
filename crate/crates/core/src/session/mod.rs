//! Live sessions: one engine thread per edited room, driven by a bounded
//! command queue and fanning its events out to any number of subscribers.
//!
//! Commands are applied only between generations, in arrival order, and
//! every applied command is logged with the generation it landed on, so a
//! session can be replayed exactly with [`replay`].

mod editor;
mod protocol;
mod server;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, SyncSender, TryRecvError, TrySendError};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Instant;

use thiserror::Error;

use crate::config::{validate_dims, EngineConfig};
use crate::engine::{EliteBroadcast, Engine, EngineError};
use crate::room::Room;

pub use editor::{
    render_suggestions, AxisView, Brush, BrushSize, Connection, EditorState, SuggestionGridView,
    SuggestionView, DEBOUNCE,
};
pub use protocol::{
    decode, read_frame, write_frame, ClientMessage, Envelope, ErrorCode, OpenRequest,
    ServerMessage, SessionCommand, SessionEvent, SessionStats, Suggestion, MAX_FRAME,
};
pub use server::{serve, Client};

/// Depth of each session's command queue; senders block when it is full.
pub const COMMAND_QUEUE: usize = 64;
/// Depth of each subscriber's event queue.
pub const EVENT_QUEUE: usize = 256;
/// Published broadcasts a suggestion may still refer to.
pub const SUGGESTION_HISTORY: usize = 16;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("unknown session {0}")]
    UnknownSession(u64),
    #[error("session {0} has stopped")]
    Closed(u64),
    #[error("{0}")]
    OutsideRoom(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl SessionError {
    pub fn code(&self) -> ErrorCode {
        match self {
            SessionError::UnknownSession(_) => ErrorCode::UnknownSession,
            SessionError::Closed(_) => ErrorCode::SessionClosed,
            SessionError::OutsideRoom(_) => ErrorCode::MalformedRoom,
            SessionError::Engine(EngineError::Dimensions(_)) => ErrorCode::InvalidDimensions,
            SessionError::Engine(_) => ErrorCode::MalformedRoom,
        }
    }
}

/// A session's engine plus its command log; no threads involved.
pub struct SessionCore {
    engine: Engine,
    log: Vec<(u64, SessionCommand)>,
    recent: VecDeque<EliteBroadcast>,
}

impl SessionCore {
    pub fn new(config: EngineConfig, target: Room) -> Result<Self, EngineError> {
        Ok(SessionCore {
            engine: Engine::new(config, target)?,
            log: Vec::new(),
            recent: VecDeque::new(),
        })
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    /// Applied commands with the generation each took effect before.
    pub fn command_log(&self) -> &[(u64, SessionCommand)] {
        &self.log
    }

    /// Applies one command; returns false once the session should stop.
    pub fn apply(&mut self, cmd: SessionCommand, out: &mut Vec<SessionEvent>) -> bool {
        self.log.push((self.engine.generation(), cmd.clone()));
        match cmd {
            SessionCommand::SetTarget(room) => {
                if room.same_layout(self.engine.target()) {
                    self.engine
                        .update_target(room.clone())
                        .expect("layout checked");
                } else {
                    self.engine.reset_target(room.clone());
                    self.recent.clear();
                }
                out.push(SessionEvent::TargetEcho(room));
            }
            SessionCommand::LockTiles(coords) => {
                let set: BTreeSet<_> = coords.into_iter().collect();
                match self.engine.target().clone().with_locked(set) {
                    Ok(room) => {
                        self.engine
                            .update_target(room.clone())
                            .expect("same layout");
                        out.push(SessionEvent::TargetEcho(room));
                    }
                    Err(e) => {
                        out.push(SessionEvent::error(ErrorCode::MalformedRoom, e.to_string()))
                    }
                }
            }
            SessionCommand::SetDimensions(dims) => {
                if let Err(e) = self.engine.change_dimensions(dims) {
                    out.push(SessionEvent::error(
                        ErrorCode::InvalidDimensions,
                        e.to_string(),
                    ));
                }
            }
            SessionCommand::ApplySuggestion(pick) => match self.suggested(&pick) {
                Ok(room) => {
                    let locks = self.engine.target().locked().clone();
                    let room = room.with_locked(locks).expect("locks valid on the target");
                    self.engine
                        .update_target(room.clone())
                        .expect("layout checked");
                    out.push(SessionEvent::TargetEcho(room));
                }
                Err((code, message)) => out.push(SessionEvent::error(code, message)),
            },
            SessionCommand::Restart => {
                self.engine.restart();
                self.recent.clear();
            }
            SessionCommand::Stop => return false,
        }
        true
    }

    /// The elite a client saw in a published broadcast.
    fn suggested(&self, pick: &Suggestion) -> Result<Room, (ErrorCode, String)> {
        let b = self
            .recent
            .iter()
            .rev()
            .find(|b| b.generation == pick.generation)
            .ok_or((
                ErrorCode::StaleSuggestion,
                format!("no broadcast for generation {}", pick.generation),
            ))?;
        let room = b
            .cells
            .iter()
            .find(|c| c.coords == pick.coords)
            .and_then(|c| c.elite.clone())
            .ok_or((
                ErrorCode::EmptyCell,
                format!("no feasible elite at {:?}", pick.coords),
            ))?;
        if !room.same_layout(self.engine.target()) {
            return Err((
                ErrorCode::StaleSuggestion,
                "suggestion predates the current layout".into(),
            ));
        }
        Ok(room)
    }

    /// Runs one generation, pushing the broadcast if one was due.
    pub fn advance(&mut self, out: &mut Vec<SessionEvent>) -> bool {
        match self.engine.advance() {
            Some(b) => {
                if self.recent.len() == SUGGESTION_HISTORY {
                    self.recent.pop_front();
                }
                self.recent.push_back(b.clone());
                out.push(SessionEvent::ElitesUpdated(b));
                true
            }
            None => false,
        }
    }
}

/// Re-runs a recorded session for `generations` generations and returns its
/// events. Stats are never produced, since they carry wall-clock rates.
pub fn replay(
    config: EngineConfig,
    target: Room,
    script: &[(u64, SessionCommand)],
    generations: u64,
) -> Result<Vec<SessionEvent>, EngineError> {
    let mut core = SessionCore::new(config, target)?;
    let mut events = Vec::new();
    let mut next = 0;
    for gen in 0..generations {
        while next < script.len() && script[next].0 <= gen {
            if !core.apply(script[next].1.clone(), &mut events) {
                return Ok(events);
            }
            next += 1;
        }
        core.advance(&mut events);
    }
    Ok(events)
}

type Subscribers = Arc<Mutex<Vec<SyncSender<SessionEvent>>>>;

fn publish(subscribers: &Subscribers, events: &mut Vec<SessionEvent>) {
    if events.is_empty() {
        return;
    }
    let subs = std::mem::take(&mut *subscribers.lock().expect("subscriber lock"));
    let mut alive = Vec::with_capacity(subs.len());
    for tx in subs {
        let ok = events.iter().all(|e| match e {
            // stats are advisory; a slow subscriber just misses some
            SessionEvent::Stats(_) => {
                !matches!(tx.try_send(e.clone()), Err(TrySendError::Disconnected(_)))
            }
            _ => tx.send(e.clone()).is_ok(),
        });
        if ok {
            alive.push(tx);
        }
    }
    // subscribers added while publishing were pushed to the emptied list
    let mut list = subscribers.lock().expect("subscriber lock");
    alive.append(&mut list);
    *list = alive;
    events.clear();
}

fn run_session(
    mut core: SessionCore,
    commands: Receiver<SessionCommand>,
    subscribers: Subscribers,
) -> SessionCore {
    let mut events = Vec::new();
    let mut window = (Instant::now(), core.engine().generation());
    loop {
        loop {
            match commands.try_recv() {
                Ok(cmd) => {
                    if !core.apply(cmd, &mut events) {
                        publish(&subscribers, &mut events);
                        return core;
                    }
                }
                Err(TryRecvError::Empty) => break,
                Err(TryRecvError::Disconnected) => return core,
            }
        }
        if core.advance(&mut events) {
            let engine = core.engine();
            let elapsed = window.0.elapsed().as_secs_f64().max(1e-9);
            let done = engine.generation().saturating_sub(window.1);
            events.push(SessionEvent::Stats(SessionStats {
                generation: engine.generation(),
                occupied_feasible: engine
                    .archive()
                    .occupied(crate::engine::Population::Feasible)
                    .len(),
                stored: engine.archive().len(),
                gens_per_sec: done as f64 / elapsed,
            }));
            window = (Instant::now(), engine.generation());
        }
        publish(&subscribers, &mut events);
    }
}

struct SessionHandle {
    commands: SyncSender<SessionCommand>,
    subscribers: Subscribers,
    thread: Option<JoinHandle<SessionCore>>,
    cols: usize,
    rows: usize,
}

/// Owns every live session of a process.
#[derive(Default)]
pub struct SessionManager {
    sessions: Mutex<HashMap<u64, SessionHandle>>,
    next_id: AtomicU64,
}

impl SessionManager {
    pub fn new() -> Self {
        SessionManager {
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    /// Starts a session; its engine begins evolving immediately.
    pub fn open_session(&self, config: EngineConfig, target: Room) -> Result<u64, SessionError> {
        let (cols, rows) = (target.cols(), target.rows());
        let core = SessionCore::new(config, target)?;
        let (tx, rx) = mpsc::sync_channel(COMMAND_QUEUE);
        let subscribers: Subscribers = Arc::default();
        let subs = Arc::clone(&subscribers);
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let thread = thread::Builder::new()
            .name(format!("session-{id}"))
            .spawn(move || run_session(core, rx, subs))
            .expect("spawn session thread");
        let handle = SessionHandle {
            commands: tx,
            subscribers,
            thread: Some(thread),
            cols,
            rows,
        };
        self.sessions
            .lock()
            .expect("session lock")
            .insert(id, handle);
        Ok(id)
    }

    fn validate(cmd: &SessionCommand, cols: usize, rows: usize) -> Result<(), SessionError> {
        match cmd {
            SessionCommand::LockTiles(coords) => {
                if let Some(c) = coords.iter().find(|c| c.x >= cols || c.y >= rows) {
                    return Err(SessionError::OutsideRoom(format!(
                        "lock {c:?} outside the {cols}x{rows} room"
                    )));
                }
            }
            SessionCommand::SetDimensions(dims) => {
                validate_dims(dims).map_err(EngineError::Dimensions)?
            }
            _ => {}
        }
        Ok(())
    }

    /// Validates and enqueues a command; blocks while the queue is full.
    pub fn send(&self, id: u64, cmd: SessionCommand) -> Result<(), SessionError> {
        let tx = {
            let sessions = self.sessions.lock().expect("session lock");
            let h = sessions.get(&id).ok_or(SessionError::UnknownSession(id))?;
            Self::validate(&cmd, h.cols, h.rows)?;
            h.commands.clone()
        };
        if let SessionCommand::SetTarget(room) = &cmd {
            let mut sessions = self.sessions.lock().expect("session lock");
            if let Some(h) = sessions.get_mut(&id) {
                (h.cols, h.rows) = (room.cols(), room.rows());
            }
        }
        tx.send(cmd).map_err(|_| SessionError::Closed(id))
    }

    pub fn subscribe(&self, id: u64) -> Result<Receiver<SessionEvent>, SessionError> {
        let sessions = self.sessions.lock().expect("session lock");
        let h = sessions.get(&id).ok_or(SessionError::UnknownSession(id))?;
        let (tx, rx) = mpsc::sync_channel(EVENT_QUEUE);
        h.subscribers.lock().expect("subscriber lock").push(tx);
        Ok(rx)
    }

    /// Stops a session and hands back its final state.
    pub fn stop(&self, id: u64) -> Result<SessionCore, SessionError> {
        let mut handle = self
            .sessions
            .lock()
            .expect("session lock")
            .remove(&id)
            .ok_or(SessionError::UnknownSession(id))?;
        // the engine may already have stopped on its own Stop command
        let _ = handle.commands.send(SessionCommand::Stop);
        // subscribers must not stall the final publish
        handle.subscribers.lock().expect("subscriber lock").clear();
        let core = handle
            .thread
            .take()
            .expect("joined once")
            .join()
            .map_err(|_| SessionError::Closed(id))?;
        Ok(core)
    }

    pub fn session_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = self
            .sessions
            .lock()
            .expect("session lock")
            .keys()
            .copied()
            .collect();
        ids.sort_unstable();
        ids
    }
}

impl Drop for SessionManager {
    fn drop(&mut self) {
        for id in self.session_ids() {
            let _ = self.stop(id);
        }
    }
}
