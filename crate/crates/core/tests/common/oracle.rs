//! Slow, literal re-implementations of every dimension score, written
//! without reference to the library code.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use room_elites::dimensions::{self, count_simple_paths, DimensionKind, LeniencyWeights};
use room_elites::fitness::door_safety;
use room_elites::patterns::{cluster_micro, detect, MicroKind, PatternReport};
use room_elites::room::{Coord, Room, Tile};
use room_elites::EvalContext;

use super::{random_room, rooms};

const TOL: f64 = 1e-9;

fn at(room: &Room, x: usize, y: usize) -> Tile {
    room.get(Coord::new(x, y))
}

fn symmetry_oracle(room: &Room) -> f64 {
    let (w, h) = (room.cols(), room.rows());
    let mut walls = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if at(room, x, y) == Tile::Wall {
                walls.push((x, y));
            }
        }
    }
    if walls.is_empty() {
        return 1.0;
    }
    let s = w.min(h);
    let count = |mirror: &dyn Fn((usize, usize), (usize, usize)) -> bool| {
        walls
            .iter()
            .filter(|&&p| walls.iter().any(|&q| mirror(p, q)))
            .count()
    };
    let mut best = count(&|(x, y), (u, v)| v == y && x + u == w - 1)
        .max(count(&|(x, y), (u, v)| u == x && y + v == h - 1));
    // both nearest-centred squares when the size difference is odd
    let mut offsets = vec![];
    for ox in [(w - s) / 2, (w - s).div_ceil(2)] {
        for oy in [(h - s) / 2, (h - s).div_ceil(2)] {
            offsets.push((ox, oy));
        }
    }
    for (ox, oy) in offsets {
        let inside = |(x, y): (usize, usize)| x >= ox && x < ox + s && y >= oy && y < oy + s;
        let main =
            count(&|p, q| inside(p) && inside(q) && q.0 - ox == p.1 - oy && q.1 - oy == p.0 - ox);
        let anti = count(&|p, q| {
            inside(p)
                && inside(q)
                && (q.0 - ox) + (p.1 - oy) == s - 1
                && (q.1 - oy) + (p.0 - ox) == s - 1
        });
        best = best.max(main).max(anti);
    }
    best as f64 / walls.len() as f64
}

fn similarity_oracle(a: &Room, b: &Room) -> f64 {
    let mut same = 0;
    for y in 0..a.rows() {
        for x in 0..a.cols() {
            same += (at(a, x, y) == at(b, x, y)) as usize;
        }
    }
    same as f64 / (a.cols() * a.rows()) as f64
}

/// Union-find clustering of 4-adjacent tiles of one kind.
fn clusters_oracle(room: &Room, tile: Tile) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = (room.cols(), room.rows());
    let mut parent: Vec<usize> = (0..w * h).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for y in 0..h {
        for x in 0..w {
            if at(room, x, y) != tile {
                continue;
            }
            for (u, v) in [(x + 1, y), (x, y + 1)] {
                if u < w && v < h && at(room, u, v) == tile {
                    let (a, b) = (find(&mut parent, y * w + x), find(&mut parent, v * w + u));
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
    for y in 0..h {
        for x in 0..w {
            if at(room, x, y) == tile {
                let r = find(&mut parent, y * w + x);
                groups.entry(r).or_default().push((x, y));
            }
        }
    }
    groups.into_values().collect()
}

fn theta(tile: Tile) -> f64 {
    if tile == Tile::Wall {
        6.0
    } else {
        4.0
    }
}

fn den_oracle(clusters: &[Vec<(usize, usize)>], tile: Tile) -> f64 {
    if clusters.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for c in clusters {
        sum += f64::min(1.0, c.len() as f64 / theta(tile));
    }
    sum / clusters.len() as f64
}

fn centroid(c: &[(usize, usize)]) -> (f64, f64) {
    let n = c.len() as f64;
    (
        c.iter().map(|p| p.0 as f64).sum::<f64>() / n,
        c.iter().map(|p| p.1 as f64).sum::<f64>() / n,
    )
}

fn spa_oracle(clusters: &[Vec<(usize, usize)>], room_size: usize) -> f64 {
    let n = clusters.len();
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let (a, b) = (centroid(&clusters[i]), centroid(&clusters[j]));
                let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
                sum += d / room_size as f64;
            }
        }
    }
    sum / (n * (n - 1)) as f64
}

/// (den, spa) for enemy, treasure, wall.
fn distribution_oracle(room: &Room) -> [(f64, f64); 3] {
    [Tile::Enemy, Tile::Treasure, Tile::Wall].map(|t| {
        let c = clusters_oracle(room, t);
        (den_oracle(&c, t), spa_oracle(&c, room.cols() * room.rows()))
    })
}

fn inner_similarity_oracle(room: &Room, target: &Room) -> f64 {
    let (g, t) = (distribution_oracle(room), distribution_oracle(target));
    let d: f64 = (0..3)
        .map(|i| (g[i].0 - t[i].0).abs() + (g[i].1 - t[i].1).abs())
        .sum();
    f64::max(0.0, 1.0 - d / 6.0)
}

fn log10_or_zero(v: f64) -> f64 {
    if v < 1.0 {
        0.0
    } else {
        v.log10()
    }
}

fn leniency_oracle(room: &Room, safety: f64) -> f64 {
    let count = |t: Tile| room.tiles().iter().filter(|&&x| x == t).count() as f64;
    let [en, tre, _] = distribution_oracle(room);
    let (w0, w1, w2) = (0.4, 0.4, 0.2);
    let non_lenient = w0 * log10_or_zero(count(Tile::Enemy) * en.1)
        + w1 * log10_or_zero(count(Tile::Enemy) * en.0)
        + w2 * (1.0 - safety);
    let lenient = 0.5 * log10_or_zero(count(Tile::Treasure) * tre.1)
        + 0.5 * log10_or_zero(count(Tile::Treasure) * tre.0);
    (1.0 - (non_lenient - 0.5 * lenient)).clamp(0.0, 1.0)
}

/// Walking-distance door safety by plain BFS from every door.
fn door_safety_oracle(room: &Room) -> f64 {
    let (w, h) = (room.cols(), room.rows());
    let scale = (w + h) as f64 / 2.0;
    let mut total = 0.0;
    for &d in room.doors() {
        let mut dist = vec![vec![usize::MAX; w]; h];
        let mut queue = std::collections::VecDeque::from([(d.x, d.y)]);
        dist[d.y][d.x] = 0;
        let mut found = None;
        while let Some((x, y)) = queue.pop_front() {
            if at(room, x, y) == Tile::Enemy {
                found = Some(dist[y][x]);
                break;
            }
            let next = [
                (x.wrapping_sub(1), y),
                (x + 1, y),
                (x, y.wrapping_sub(1)),
                (x, y + 1),
            ];
            for (u, v) in next {
                if u < w && v < h && dist[v][u] == usize::MAX && at(room, u, v) != Tile::Wall {
                    dist[v][u] = dist[y][x] + 1;
                    queue.push_back((u, v));
                }
            }
        }
        total += found.map_or(1.0, |s| f64::min(1.0, s as f64 / scale));
    }
    total / room.doors().len() as f64
}

/// Every simple path between two nodes, listed explicitly.
fn all_simple_paths(adj: &[Vec<usize>], from: usize, to: usize) -> Vec<Vec<usize>> {
    fn walk(adj: &[Vec<usize>], path: &mut Vec<usize>, to: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if last == to {
            out.push(path.clone());
            return;
        }
        for &n in &adj[last] {
            if !path.contains(&n) {
                path.push(n);
                walk(adj, path, to, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(adj, &mut vec![from], to, &mut out);
    out
}

/// Pattern adjacency rebuilt from the cell lists alone.
fn adjacency_oracle(report: &PatternReport) -> Vec<BTreeSet<usize>> {
    let n = report.spatial.len();
    let mut adj = vec![BTreeSet::new(); n];
    for (i, row) in adj.iter_mut().enumerate() {
        for j in 0..n {
            if i == j {
                continue;
            }
            let touch = report.spatial[i].cells.iter().any(|a| {
                report.spatial[j]
                    .cells
                    .iter()
                    .any(|b| a.x.abs_diff(b.x) + a.y.abs_diff(b.y) == 1)
            });
            if touch {
                row.insert(j);
            }
        }
    }
    adj
}

fn linearity_oracle(room: &Room, report: &PatternReport) -> f64 {
    let adj: Vec<Vec<usize>> = adjacency_oracle(report)
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect();
    let owner = |c: Coord| report.spatial.iter().position(|p| p.cells.contains(&c));
    let door_pats: BTreeSet<usize> = room.doors().iter().filter_map(|&d| owner(d)).collect();
    let door_pats: Vec<usize> = door_pats.into_iter().collect();
    let mut paths = 0;
    for i in 0..door_pats.len() {
        for j in i + 1..door_pats.len() {
            paths += all_simple_paths(&adj, door_pats[i], door_pats[j])
                .len()
                .min(1000);
        }
    }
    let neighbours: usize = room
        .doors()
        .iter()
        .filter_map(|&d| owner(d))
        .map(|p| adj[p].len())
        .sum();
    let denom = (report.spatial.len() + neighbours).max(1) as f64;
    (1.0 - paths as f64 / denom).clamp(0.0, 1.0)
}

pub fn check_dimension_formulas() {
    let rooms = rooms(11, 100);
    let target = super::rooms(12, 1).pop().unwrap();
    let ctx = EvalContext::new(target.clone(), LeniencyWeights::default());
    for room in &rooms {
        let report = detect(room);
        let e = ctx.evaluate(room).unwrap();
        let check = |kind: DimensionKind, want: f64| {
            let got = e.score(kind);
            assert!(
                (got - want).abs() < TOL,
                "{kind}: {got} vs oracle {want}\n{room}"
            );
        };
        check(DimensionKind::Symmetry, symmetry_oracle(room));
        check(DimensionKind::Similarity, similarity_oracle(room, &target));
        let max_chambers = (room.cols() / 3) * (room.rows() / 3);
        check(
            DimensionKind::Nmp,
            f64::min(report.meso.len() as f64 / max_chambers as f64, 1.0),
        );
        check(
            DimensionKind::Nsp,
            f64::min(report.spatial.len() as f64 / (13.0 * 4.0), 1.0),
        );
        check(
            DimensionKind::InnerSimilarity,
            inner_similarity_oracle(room, &target),
        );
        let safety = door_safety_oracle(room);
        assert!((safety - door_safety(room)).abs() < TOL);
        check(DimensionKind::Leniency, leniency_oracle(room, safety));

        // density and sparsity separately, per kind
        let lib = dimensions::MicroDistribution::of(room, &report);
        let oracle = distribution_oracle(room);
        for (i, kind) in MicroKind::ALL.into_iter().enumerate() {
            let ds = lib.get(kind);
            assert!((ds.den - oracle[i].0).abs() < TOL, "den {kind:?}");
            assert!((ds.spa - oracle[i].1).abs() < TOL, "spa {kind:?}");
            let mut got: Vec<Vec<(usize, usize)>> = cluster_micro(room, kind)
                .iter()
                .map(|c| {
                    let mut m: Vec<_> = c.members.iter().map(|p| (p.x, p.y)).collect();
                    m.sort_by_key(|&(x, y)| (y, x));
                    m
                })
                .collect();
            let mut want = clusters_oracle(room, kind.tile());
            got.sort();
            want.sort();
            assert_eq!(got, want, "clusters {kind:?}");
        }
    }
}

pub fn check_pattern_adjacency() {
    for room in rooms(13, 60) {
        let report = detect(&room);
        let want = adjacency_oracle(&report);
        for (i, n) in report.adjacency.iter().enumerate() {
            assert_eq!(n.iter().copied().collect::<BTreeSet<_>>(), want[i]);
        }
    }
}

pub fn check_path_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..400 {
        let n = rng.random_range(2..=8);
        let p: f64 = rng.random_range(0.2..0.9);
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(p) {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    assert_eq!(
                        count_simple_paths(&adj, a, b, 1000),
                        all_simple_paths(&adj, a, b).len().min(1000)
                    );
                }
            }
        }
    }
    // K8 between two nodes: sum over k of 6!/(6-k)! = 1957
    let k8: Vec<Vec<usize>> = (0..8)
        .map(|i| (0..8).filter(|&j| j != i).collect())
        .collect();
    assert_eq!(all_simple_paths(&k8, 0, 7).len(), 1957);
    assert_eq!(count_simple_paths(&k8, 0, 7, 1000), 1000);
}

pub fn check_linearity() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut checked = 0;
    while checked < 100 {
        let wall = rng.random_range(0.0..0.15);
        let room = random_room(&mut rng, 13, 7, wall);
        let report = detect(&room);
        if report.spatial.len() > 8 {
            continue;
        }
        checked += 1;
        let got = dimensions::linearity(&report, &room);
        let want = linearity_oracle(&room, &report);
        assert!((got - want).abs() < TOL, "{got} vs {want}\n{room}");
    }
}
