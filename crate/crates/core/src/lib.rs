//! Interactive constrained MAP-Elites for tile-grid dungeon rooms.
//!
//! The crate is organised bottom-up:
//!
//! * [`room`]: rooms, feasibility, the dungeon stub and room file formats;
//! * [`patterns`]: micro/spatial/meso pattern detection;
//! * [`fitness`] and [`dimensions`]: quality and the seven behavioural axes;
//! * [`engine`]: the two-population MAP-Elites archive and its evolution loop,
//!   plus the archive-free objective baseline in [`baseline`];
//! * [`era`]: expressive-range logging and analytics;
//! * [`session`]: the live, command-driven service a room editor talks to;
//! * [`experiments`]: batch drivers behind the `icme` binary.

pub mod baseline;
pub mod config;
pub mod dimensions;
pub mod engine;
pub mod era;
pub mod eval;
pub mod experiments;
pub mod fitness;
pub mod patterns;
pub mod room;
pub mod session;
pub mod svg;
pub mod targets;

pub use dimensions::{DimensionDescriptor, DimensionKind, DimensionScores, LeniencyWeights};
pub use engine::{EliteBroadcast, Engine};
pub use eval::{EvalContext, Evaluation};
pub use fitness::FitnessValue;
pub use room::{Coord, DungeonStub, Room, Tile};
