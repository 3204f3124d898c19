//! Starts the session service on a free port and drives it like an editor:
//! open a session, paint a wall, lock a tile, apply a suggestion.

use std::net::TcpListener;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use room_elites::config::EngineConfig;
use room_elites::dimensions::{DimensionDescriptor, DimensionKind};
use room_elites::room::{Coord, Tile};
use room_elites::session::{
    serve, Client, ClientMessage, EditorState, OpenRequest, ServerMessage, SessionManager,
};
use room_elites::targets;

fn main() -> std::io::Result<()> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let defaults = EngineConfig {
        pop_size: 300,
        ..Default::default()
    };
    thread::spawn(move || serve(Arc::new(SessionManager::new()), listener, defaults));

    let dims = [
        DimensionDescriptor {
            kind: DimensionKind::Nsp,
            granularity: 5,
        },
        DimensionDescriptor {
            kind: DimensionKind::Symmetry,
            granularity: 5,
        },
    ];
    let mut editor = EditorState::new(targets::basic_room(), dims);
    let mut client = Client::connect(addr)?;
    client.send(
        0,
        ClientMessage::Open(OpenRequest {
            target: editor.current_room.clone(),
            config: None,
        }),
    )?;
    let session =
        client.recv_until(|m| matches!(m.body, ServerMessage::Opened).then_some(m.session))?;
    editor.session = Some(session);
    println!("session {session} opened");

    let pump = |editor: &mut EditorState,
                client: &mut Client,
                want_broadcast: bool|
     -> std::io::Result<()> {
        for msg in editor.drain_outbox() {
            client.send(session, msg)?;
        }
        loop {
            let msg = client.recv()?;
            let done = matches!(msg.body, ServerMessage::ElitesUpdated(_)) || !want_broadcast;
            editor.receive(msg.body);
            if done {
                return Ok(());
            }
        }
    };

    pump(&mut editor, &mut client, true)?;
    let t = Instant::now();
    editor.paint(Coord::new(6, 3), t);
    editor.tick(t + Duration::from_millis(200));
    editor.toggle_lock(&[Coord::new(6, 3)]);
    pump(&mut editor, &mut client, true)?;
    pump(&mut editor, &mut client, true)?;

    let view = editor.render().unwrap();
    for row in &view.cells {
        let line: Vec<String> = row
            .iter()
            .map(|c| c.fitness_badge.clone().unwrap_or_else(|| "  -  ".into()))
            .collect();
        println!("{}", line.join(" "));
    }
    let pick = view
        .cells
        .iter()
        .flatten()
        .find(|c| c.rows.is_some())
        .unwrap()
        .coords
        .clone();
    assert!(editor.apply_suggestion(pick.clone()));
    for msg in editor.drain_outbox() {
        client.send(session, msg)?;
    }
    let echo = client.recv_until(|m| match &m.body {
        ServerMessage::TargetEcho(room) => Some(room.clone()),
        _ => None,
    })?;
    editor.receive(ServerMessage::TargetEcho(echo));
    println!(
        "applied suggestion {pick:?}; wall kept: {}",
        editor.current_room.get(Coord::new(6, 3)) == Tile::Wall
    );
    print!("{}", editor.current_room);
    client.send(session, ClientMessage::Stop)?;
    Ok(())
}
