//! TCP binding of the session protocol: one reader thread per connection,
//! one writer thread, and one forwarder per subscribed session.

use std::io::{self, BufReader, BufWriter};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Sender};
use std::sync::Arc;
use std::thread;

use super::protocol::{
    decode, read_frame, write_frame, ClientMessage, Envelope, ErrorCode, ServerMessage,
};
use super::{SessionError, SessionManager};
use crate::config::EngineConfig;
use crate::room::Room;

/// Accepts connections until the listener fails.
pub fn serve(
    manager: Arc<SessionManager>,
    listener: TcpListener,
    defaults: EngineConfig,
) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let manager = Arc::clone(&manager);
        let defaults = defaults.clone();
        thread::spawn(move || {
            let _ = handle_connection(&manager, stream, &defaults);
        });
    }
    Ok(())
}

struct Outbound {
    tx: Sender<Envelope<ServerMessage>>,
    seq: Arc<AtomicU64>,
}

impl Outbound {
    fn send(&self, session: u64, body: ServerMessage) -> bool {
        let seq = self.seq.fetch_add(1, Ordering::Relaxed);
        self.tx.send(Envelope { session, seq, body }).is_ok()
    }

    fn error(&self, session: u64, code: ErrorCode, message: impl Into<String>) {
        self.send(
            session,
            ServerMessage::Error {
                code,
                message: message.into(),
            },
        );
    }

    fn clone(&self) -> Outbound {
        Outbound {
            tx: self.tx.clone(),
            seq: Arc::clone(&self.seq),
        }
    }
}

fn forward(manager: &SessionManager, session: u64, out: &Outbound) -> Result<(), SessionError> {
    let events = manager.subscribe(session)?;
    let out = out.clone();
    thread::spawn(move || {
        for e in events {
            if !out.send(session, e.into()) {
                break;
            }
        }
    });
    Ok(())
}

fn handle_connection(
    manager: &SessionManager,
    stream: TcpStream,
    defaults: &EngineConfig,
) -> io::Result<()> {
    stream.set_nodelay(true)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let (tx, rx) = mpsc::channel::<Envelope<ServerMessage>>();
    let writer = thread::spawn(move || {
        let mut w = BufWriter::new(stream);
        for msg in rx {
            if write_frame(&mut w, &msg).is_err() {
                break;
            }
        }
    });
    let out = Outbound {
        tx,
        seq: Arc::new(AtomicU64::new(0)),
    };

    while let Some(frame) = read_frame(&mut reader)? {
        let msg: Envelope<ClientMessage> = match decode(&frame) {
            Ok(m) => m,
            Err(e) => {
                // recover what we can if the frame is at least JSON
                let value = serde_json::from_slice::<serde_json::Value>(&frame).ok();
                let session = value
                    .as_ref()
                    .and_then(|v| v.get("session")?.as_u64())
                    .unwrap_or(0);
                let kind = value.as_ref().and_then(|v| v.get("type")?.as_str());
                let code = if value.as_ref().and_then(bad_room).is_some() {
                    ErrorCode::MalformedRoom
                } else if kind == Some("set_dimensions") {
                    ErrorCode::InvalidDimensions
                } else {
                    ErrorCode::MalformedMessage
                };
                out.error(session, code, e.to_string());
                continue;
            }
        };
        let session = msg.session;
        let result = match msg.body {
            ClientMessage::Open(req) => {
                let config = req.config.unwrap_or_else(|| defaults.clone());
                match manager.open_session(config, req.target) {
                    Ok(id) => {
                        out.send(id, ServerMessage::Opened);
                        forward(manager, id, &out)
                    }
                    Err(e) => Err(e),
                }
            }
            ClientMessage::Subscribe => forward(manager, session, &out),
            ClientMessage::Stop => manager.stop(session).map(|_| ()),
            other => manager.send(session, other.command().expect("non-control message")),
        };
        if let Err(e) = result {
            out.error(session, e.code(), e.to_string());
        }
    }
    drop(out);
    let _ = writer.join();
    Ok(())
}

/// The room error, if the frame carries a room that does not parse.
fn bad_room(v: &serde_json::Value) -> Option<String> {
    let room = match v.get("type")?.as_str()? {
        "set_target" => v.get("payload")?,
        "open" => v.get("payload")?.get("target")?,
        _ => return None,
    };
    serde_json::from_value::<Room>(room.clone())
        .err()
        .map(|e| e.to_string())
}

/// Minimal blocking client, mainly for tests and examples.
pub struct Client {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
    seq: u64,
}

impl Client {
    pub fn connect(addr: impl ToSocketAddrs) -> io::Result<Client> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        Ok(Client {
            reader: BufReader::new(stream.try_clone()?),
            writer: BufWriter::new(stream),
            seq: 0,
        })
    }

    /// Bounds how long `recv` blocks; `None` waits forever.
    pub fn set_read_timeout(&self, timeout: Option<std::time::Duration>) -> io::Result<()> {
        self.reader.get_ref().set_read_timeout(timeout)
    }

    /// Sends one message and returns its sequence number.
    pub fn send(&mut self, session: u64, body: ClientMessage) -> io::Result<u64> {
        self.seq += 1;
        write_frame(
            &mut self.writer,
            &Envelope {
                session,
                seq: self.seq,
                body,
            },
        )?;
        Ok(self.seq)
    }

    /// Sends an arbitrary pre-encoded frame.
    pub fn send_raw(&mut self, bytes: &[u8]) -> io::Result<()> {
        use std::io::Write;
        self.writer.write_all(&(bytes.len() as u32).to_be_bytes())?;
        self.writer.write_all(bytes)?;
        self.writer.flush()
    }

    pub fn recv(&mut self) -> io::Result<Envelope<ServerMessage>> {
        let frame = read_frame(&mut self.reader)?.ok_or_else(|| {
            io::Error::new(io::ErrorKind::UnexpectedEof, "server closed the connection")
        })?;
        decode(&frame).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    /// Receives until `pick` accepts a message.
    pub fn recv_until<T>(
        &mut self,
        mut pick: impl FnMut(&Envelope<ServerMessage>) -> Option<T>,
    ) -> io::Result<T> {
        loop {
            let msg = self.recv()?;
            if let Some(t) = pick(&msg) {
                return Ok(t);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::OpenRequest;
    use crate::targets::basic_room;

    #[test]
    fn open_command_and_malformed_input_over_tcp() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let manager = Arc::new(SessionManager::new());
        let defaults = EngineConfig {
            pop_size: 100,
            publish_gen: 10,
            ..Default::default()
        };
        let m = Arc::clone(&manager);
        thread::spawn(move || serve(m, listener, defaults));

        let mut c = Client::connect(addr).unwrap();
        c.send(
            0,
            ClientMessage::Open(OpenRequest {
                target: basic_room(),
                config: None,
            }),
        )
        .unwrap();
        let id = c
            .recv_until(|m| matches!(m.body, ServerMessage::Opened).then_some(m.session))
            .unwrap();
        c.recv_until(|m| matches!(m.body, ServerMessage::ElitesUpdated(_)).then_some(()))
            .unwrap();

        c.send_raw(b"{not json").unwrap();
        let code = c.recv_until(|m| match &m.body {
            ServerMessage::Error { code, .. } => Some(*code),
            _ => None,
        });
        assert_eq!(code.unwrap(), ErrorCode::MalformedMessage);

        c.send(999, ClientMessage::Restart).unwrap();
        let (s, code) = c
            .recv_until(|m| match &m.body {
                ServerMessage::Error { code, .. } => Some((m.session, *code)),
                _ => None,
            })
            .unwrap();
        assert_eq!((s, code), (999, ErrorCode::UnknownSession));

        // the session survived both errors
        c.recv_until(|m| matches!(m.body, ServerMessage::ElitesUpdated(_)).then_some(()))
            .unwrap();
        c.send(id, ClientMessage::Stop).unwrap();
        drop(c);
    }
}
