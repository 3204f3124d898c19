use room_elites::patterns::{detect, MicroKind, SpatialKind};
use room_elites::targets;

fn main() {
    let room = targets::complex_room();
    let report = detect(&room);
    print!("{room}");
    for kind in MicroKind::ALL {
        println!("{kind:?} clusters: {}", report.clusters(kind).count());
    }
    for kind in [
        SpatialKind::Chamber,
        SpatialKind::Corridor,
        SpatialKind::Connector,
        SpatialKind::Nothing,
    ] {
        println!(
            "{kind:?}: {} patterns over {} tiles",
            report.count(kind),
            report.cells_of(kind)
        );
    }
    for m in &report.meso {
        println!("{:?} in chamber #{}", m.kind, m.chamber);
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&report.to_json()).unwrap()
    );
}
