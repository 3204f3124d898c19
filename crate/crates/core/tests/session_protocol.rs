//! The live session service end to end over localhost TCP.

use std::collections::BTreeSet;
use std::net::TcpListener;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use room_elites::config::EngineConfig;
use room_elites::dimensions::{DimensionDescriptor, DimensionKind};
use room_elites::engine::EliteBroadcast;
use room_elites::room::{Coord, Tile};
use room_elites::session::{
    render_suggestions, replay, Client, ClientMessage, EditorState, ErrorCode, OpenRequest,
    ServerMessage, SessionCommand, SessionEvent, SessionManager, Suggestion,
};
use room_elites::targets::{basic_room, complex_room};

fn start() -> (Arc<SessionManager>, Client, EngineConfig) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let manager = Arc::new(SessionManager::new());
    let defaults = EngineConfig {
        pop_size: 100,
        publish_gen: 20,
        ..Default::default()
    };
    let (m, d) = (Arc::clone(&manager), defaults.clone());
    thread::spawn(move || serve_quietly(m, listener, d));
    let client = Client::connect(addr).unwrap();
    client
        .set_read_timeout(Some(Duration::from_secs(60)))
        .unwrap();
    (manager, client, defaults)
}

fn serve_quietly(m: Arc<SessionManager>, l: TcpListener, d: EngineConfig) {
    let _ = room_elites::session::serve(m, l, d);
}

fn open(c: &mut Client, config: Option<EngineConfig>) -> u64 {
    c.send(
        0,
        ClientMessage::Open(OpenRequest {
            target: basic_room(),
            config,
        }),
    )
    .unwrap();
    c.recv_until(|m| matches!(m.body, ServerMessage::Opened).then_some(m.session))
        .unwrap()
}

fn next_broadcast(c: &mut Client) -> EliteBroadcast {
    c.recv_until(|m| match &m.body {
        ServerMessage::ElitesUpdated(b) => Some(b.clone()),
        _ => None,
    })
    .unwrap()
}

fn next_error(c: &mut Client) -> (u64, ErrorCode) {
    c.recv_until(|m| match &m.body {
        ServerMessage::Error { code, .. } => Some((m.session, *code)),
        _ => None,
    })
    .unwrap()
}

#[test]
fn editor_round_trip_keeps_locks_in_every_suggestion() {
    let (_m, mut c, _) = start();
    let id = open(&mut c, None);
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
    let mut editor = EditorState::new(basic_room(), dims);
    editor.session = Some(id);
    editor.receive(ServerMessage::ElitesUpdated(next_broadcast(&mut c)));
    assert!(editor.render().is_some());

    let locks = [
        Coord::new(2, 2),
        Coord::new(3, 2),
        Coord::new(9, 4),
        Coord::new(6, 3),
    ];
    editor.toggle_lock(&locks);
    for msg in editor.drain_outbox() {
        c.send(id, msg).unwrap();
    }
    let echo = c
        .recv_until(|m| match &m.body {
            ServerMessage::TargetEcho(r) => Some(r.clone()),
            _ => None,
        })
        .unwrap();
    assert_eq!(
        echo.locked(),
        &locks.iter().copied().collect::<BTreeSet<_>>()
    );
    editor.receive(ServerMessage::TargetEcho(echo.clone()));

    // the first broadcast after the echo reflects the locks everywhere
    let b = next_broadcast(&mut c);
    assert!(b.occupied_feasible() > 0);
    for (coords, room, _) in b.elites() {
        for &l in &locks {
            assert_eq!(
                room.get(l),
                echo.get(l),
                "suggestion {coords:?} changed locked {l:?}"
            );
        }
        assert_eq!(room.doors(), echo.doors());
    }
    editor.receive(ServerMessage::ElitesUpdated(b.clone()));
    let view = editor.render().unwrap();
    let rendered: Vec<_> = view
        .cells
        .iter()
        .flatten()
        .filter_map(|s| s.rows.as_ref())
        .collect();
    assert_eq!(rendered.len(), b.occupied_feasible());
    for rows in rendered {
        for &l in &locks {
            assert_eq!(rows[l.y].chars().nth(l.x).unwrap(), echo.get(l).to_char());
        }
    }

    // applying a suggestion makes it the target, locks included
    let (coords, room, _) = b
        .elites()
        .next()
        .map(|(c, r, f)| (c.to_vec(), r.clone(), f))
        .unwrap();
    assert!(editor.apply_suggestion(coords));
    for msg in editor.drain_outbox() {
        c.send(id, msg).unwrap();
    }
    let applied = c
        .recv_until(|m| match &m.body {
            ServerMessage::TargetEcho(r) => Some(r.clone()),
            _ => None,
        })
        .unwrap();
    assert_eq!(applied.tiles(), room.tiles());
    assert_eq!(applied.locked(), echo.locked());
    c.send(id, ClientMessage::Stop).unwrap();
}

#[test]
fn set_dimensions_reshapes_the_next_broadcasts() {
    let (_m, mut c, _) = start();
    let id = open(&mut c, None);
    next_broadcast(&mut c);
    let dims = vec![
        DimensionDescriptor {
            kind: DimensionKind::Linearity,
            granularity: 3,
        },
        DimensionDescriptor {
            kind: DimensionKind::Leniency,
            granularity: 4,
        },
        DimensionDescriptor {
            kind: DimensionKind::Similarity,
            granularity: 2,
        },
    ];
    c.send(id, ClientMessage::SetDimensions(dims.clone()))
        .unwrap();
    // at most one broadcast was already in flight
    let mut b = next_broadcast(&mut c);
    if b.dims != dims {
        b = next_broadcast(&mut c);
    }
    assert_eq!(b.dims, dims);
    for cell in &b.cells {
        assert_eq!(cell.coords.len(), 3);
        assert!(cell
            .coords
            .iter()
            .zip(&dims)
            .all(|(&i, d)| i < d.granularity));
    }
    // a 3-D grid cannot be drawn as a 2-D suggestion panel
    assert!(render_suggestions(&b).is_none());
    c.send(id, ClientMessage::Stop).unwrap();
}

#[test]
fn idle_session_keeps_publishing() {
    let (_m, mut c, _) = start();
    let id = open(&mut c, None);
    let start = Instant::now();
    let mut gens = Vec::new();
    let mut stats = 0;
    while gens.len() < 4 {
        let msg = c.recv().unwrap();
        match msg.body {
            ServerMessage::ElitesUpdated(b) => gens.push(b.generation),
            ServerMessage::Stats(s) => {
                stats += 1;
                assert!(s.gens_per_sec > 0.0);
            }
            _ => {}
        }
    }
    assert!(gens.windows(2).all(|w| w[1] > w[0]), "{gens:?}");
    assert!(stats >= 2);
    assert!(start.elapsed() < Duration::from_secs(60));
    c.send(id, ClientMessage::Stop).unwrap();
}

#[test]
fn bad_input_is_reported_and_the_session_survives() {
    let (manager, mut c, _) = start();
    let id = open(&mut c, None);

    c.send_raw(b"\x00\x01garbage").unwrap();
    assert_eq!(next_error(&mut c).1, ErrorCode::MalformedMessage);

    let bad_room = format!(
        r#"{{"session":{id},"seq":9,"type":"set_target","payload":{{"cols":13,"rows":7,"tiles":["fff"],"doors":[[0,3]]}}}}"#
    );
    c.send_raw(bad_room.as_bytes()).unwrap();
    assert_eq!(next_error(&mut c), (id, ErrorCode::MalformedRoom));

    c.send(
        id,
        ClientMessage::SetDimensions(vec![DimensionDescriptor {
            kind: DimensionKind::Nsp,
            granularity: 0,
        }]),
    )
    .unwrap();
    assert_eq!(next_error(&mut c).1, ErrorCode::InvalidDimensions);

    c.send(id, ClientMessage::LockTiles(vec![Coord::new(40, 40)]))
        .unwrap();
    assert_eq!(next_error(&mut c).1, ErrorCode::MalformedRoom);

    let generation = next_broadcast(&mut c).generation;
    c.send(
        id,
        ClientMessage::ApplySuggestion(Suggestion {
            generation,
            coords: vec![99, 99],
        }),
    )
    .unwrap();
    assert_eq!(next_error(&mut c).1, ErrorCode::EmptyCell);
    c.send(
        id,
        ClientMessage::ApplySuggestion(Suggestion {
            generation: generation + 1,
            coords: vec![0, 0],
        }),
    )
    .unwrap();
    assert_eq!(next_error(&mut c).1, ErrorCode::StaleSuggestion);

    c.send(id + 1000, ClientMessage::Restart).unwrap();
    assert_eq!(next_error(&mut c), (id + 1000, ErrorCode::UnknownSession));

    let g = next_broadcast(&mut c).generation;
    assert!(next_broadcast(&mut c).generation > g);
    assert_eq!(manager.session_ids(), vec![id]);
    c.send(id, ClientMessage::Stop).unwrap();
}

#[test]
fn live_session_replays_identically_from_its_log() {
    let (manager, mut c, _) = start();
    let config = EngineConfig {
        pop_size: 80,
        publish_gen: 25,
        rng_seed: 11,
        ..Default::default()
    };
    let id = open(&mut c, Some(config.clone()));
    let mut seen = vec![next_broadcast(&mut c)];
    let edited = basic_room().with_tile(Coord::new(4, 4), Tile::Treasure);
    c.send(id, ClientMessage::SetTarget(edited)).unwrap();
    seen.push(next_broadcast(&mut c));
    c.send(
        id,
        ClientMessage::LockTiles(vec![Coord::new(4, 4), Coord::new(5, 5)]),
    )
    .unwrap();
    c.send(
        id,
        ClientMessage::SetDimensions(vec![
            DimensionDescriptor {
                kind: DimensionKind::Symmetry,
                granularity: 4,
            },
            DimensionDescriptor {
                kind: DimensionKind::Linearity,
                granularity: 4,
            },
        ]),
    )
    .unwrap();
    seen.push(next_broadcast(&mut c));
    seen.push(next_broadcast(&mut c));

    let core = manager.stop(id).unwrap();
    // three edits, then the stop itself
    assert_eq!(core.command_log().len(), 4);
    assert_eq!(core.command_log()[3].1, SessionCommand::Stop);
    let events = replay(
        config,
        basic_room(),
        core.command_log(),
        core.engine().generation(),
    )
    .unwrap();
    let replayed: Vec<&EliteBroadcast> = events
        .iter()
        .filter_map(|e| match e {
            SessionEvent::ElitesUpdated(b) => Some(b),
            _ => None,
        })
        .collect();
    for live in &seen {
        let twin = replayed
            .iter()
            .find(|r| r.generation == live.generation)
            .expect("broadcast replayed");
        assert_eq!(*twin, live, "generation {}", live.generation);
    }
    assert!(replayed.last().unwrap().generation >= seen.last().unwrap().generation);
    assert!(manager.session_ids().is_empty());
}

#[test]
fn sessions_are_isolated() {
    let (manager, mut c, _) = start();
    let a = open(&mut c, None);
    c.send(
        0,
        ClientMessage::Open(OpenRequest {
            target: complex_room(),
            config: None,
        }),
    )
    .unwrap();
    let b = c
        .recv_until(|m| matches!(m.body, ServerMessage::Opened).then_some(m.session))
        .unwrap();
    assert_ne!(a, b);
    c.send(a, ClientMessage::Stop).unwrap();
    // b still publishes after a is gone
    let seen = c.recv_until(|m| {
        matches!(m.body, ServerMessage::ElitesUpdated(_) if m.session == b).then_some(m.session)
    });
    assert_eq!(seen.unwrap(), b);
    let deadline = Instant::now() + Duration::from_secs(10);
    while manager.session_ids().contains(&a) {
        assert!(Instant::now() < deadline);
        thread::sleep(Duration::from_millis(10));
    }
    c.send(b, ClientMessage::Stop).unwrap();
}
