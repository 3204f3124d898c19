//! Scores a handful of rooms on all seven axes against the basic target.

use room_elites::dimensions::DimensionKind;
use room_elites::room::{Coord, Tile};
use room_elites::{targets, EvalContext, LeniencyWeights};

fn main() {
    let target = targets::basic_room();
    let ctx = EvalContext::new(target.clone(), LeniencyWeights::default());
    let variants = [
        ("target", target.clone()),
        (
            "extra enemy",
            target.clone().with_tile(Coord::new(6, 3), Tile::Enemy),
        ),
        (
            "wall block",
            target
                .clone()
                .with_tile(Coord::new(5, 3), Tile::Wall)
                .with_tile(Coord::new(6, 3), Tile::Wall),
        ),
        ("complex room", targets::complex_room()),
    ];
    print!("{:<14}", "room");
    for k in DimensionKind::ALL {
        print!(" {:>9.9}", k.name());
    }
    println!(" {:>8}", "fitness");
    for (name, room) in variants {
        let e = ctx.evaluate(&room).unwrap();
        print!("{name:<14}");
        for k in DimensionKind::ALL {
            print!(" {:>9.3}", e.score(k));
        }
        println!(
            " {:>8.3}{}",
            e.fitness.total,
            if e.feasible { "" } else { " (infeasible)" }
        );
    }
}
