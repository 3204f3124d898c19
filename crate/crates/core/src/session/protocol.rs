//! Wire format: 4-byte big-endian length prefix followed by one JSON object
//! `{session, seq, type, payload}`.

use std::io::{self, Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::EngineConfig;
use crate::dimensions::DimensionDescriptor;
use crate::engine::EliteBroadcast;
use crate::room::{Coord, Room};

/// Frames larger than this are rejected before allocation.
pub const MAX_FRAME: usize = 16 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum SessionCommand {
    SetTarget(Room),
    /// Replaces the whole lock set of the target.
    LockTiles(Vec<Coord>),
    SetDimensions(Vec<DimensionDescriptor>),
    ApplySuggestion(Suggestion),
    Restart,
    Stop,
}

/// A cell of the broadcast published at `generation`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub generation: u64,
    pub coords: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    UnknownSession,
    MalformedMessage,
    MalformedRoom,
    InvalidDimensions,
    EmptyCell,
    /// The suggestion names a broadcast the session no longer holds.
    StaleSuggestion,
    SessionClosed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionStats {
    pub generation: u64,
    pub occupied_feasible: usize,
    pub stored: usize,
    pub gens_per_sec: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum SessionEvent {
    ElitesUpdated(EliteBroadcast),
    TargetEcho(Room),
    Error { code: ErrorCode, message: String },
    Stats(SessionStats),
}

impl SessionEvent {
    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        SessionEvent::Error {
            code,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenRequest {
    pub target: Room,
    /// Server defaults apply when absent.
    #[serde(default)]
    pub config: Option<EngineConfig>,
}

/// Everything a client may send.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ClientMessage {
    Open(OpenRequest),
    /// Attach this connection to an existing session's events.
    Subscribe,
    SetTarget(Room),
    LockTiles(Vec<Coord>),
    SetDimensions(Vec<DimensionDescriptor>),
    ApplySuggestion(Suggestion),
    Restart,
    Stop,
}

impl ClientMessage {
    pub fn command(self) -> Option<SessionCommand> {
        Some(match self {
            ClientMessage::Open(_) | ClientMessage::Subscribe => return None,
            ClientMessage::SetTarget(r) => SessionCommand::SetTarget(r),
            ClientMessage::LockTiles(c) => SessionCommand::LockTiles(c),
            ClientMessage::SetDimensions(d) => SessionCommand::SetDimensions(d),
            ClientMessage::ApplySuggestion(c) => SessionCommand::ApplySuggestion(c),
            ClientMessage::Restart => SessionCommand::Restart,
            ClientMessage::Stop => SessionCommand::Stop,
        })
    }
}

impl From<SessionCommand> for ClientMessage {
    fn from(c: SessionCommand) -> Self {
        match c {
            SessionCommand::SetTarget(r) => ClientMessage::SetTarget(r),
            SessionCommand::LockTiles(c) => ClientMessage::LockTiles(c),
            SessionCommand::SetDimensions(d) => ClientMessage::SetDimensions(d),
            SessionCommand::ApplySuggestion(c) => ClientMessage::ApplySuggestion(c),
            SessionCommand::Restart => ClientMessage::Restart,
            SessionCommand::Stop => ClientMessage::Stop,
        }
    }
}

/// Everything the server may send.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum ServerMessage {
    Opened,
    ElitesUpdated(EliteBroadcast),
    TargetEcho(Room),
    Error { code: ErrorCode, message: String },
    Stats(SessionStats),
}

impl From<SessionEvent> for ServerMessage {
    fn from(e: SessionEvent) -> Self {
        match e {
            SessionEvent::ElitesUpdated(b) => ServerMessage::ElitesUpdated(b),
            SessionEvent::TargetEcho(r) => ServerMessage::TargetEcho(r),
            SessionEvent::Error { code, message } => ServerMessage::Error { code, message },
            SessionEvent::Stats(s) => ServerMessage::Stats(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub session: u64,
    pub seq: u64,
    #[serde(flatten)]
    pub body: T,
}

pub fn write_frame<W: Write, T: Serialize>(w: &mut W, message: &T) -> io::Result<()> {
    let bytes = serde_json::to_vec(message)?;
    if bytes.len() > MAX_FRAME {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "frame too large",
        ));
    }
    w.write_all(&(bytes.len() as u32).to_be_bytes())?;
    w.write_all(&bytes)?;
    w.flush()
}

/// Reads one raw frame; `Ok(None)` on a clean end of stream.
pub fn read_frame<R: Read>(r: &mut R) -> io::Result<Option<Vec<u8>>> {
    let mut len = [0u8; 4];
    match r.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    let len = u32::from_be_bytes(len) as usize;
    if len > MAX_FRAME {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("frame of {len} bytes"),
        ));
    }
    let mut buf = vec![0; len];
    r.read_exact(&mut buf)?;
    Ok(Some(buf))
}

pub fn decode<T: DeserializeOwned>(frame: &[u8]) -> serde_json::Result<T> {
    serde_json::from_slice(frame)
}
