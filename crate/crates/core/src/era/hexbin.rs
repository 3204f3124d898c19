use std::collections::BTreeMap;
use std::io;

use serde::Serialize;

use super::EraDataset;
use crate::dimensions::DimensionKind;
use crate::svg::{heat, Svg};

/// Hexagon columns across the unit interval.
pub const HEX_COLUMNS: usize = 30;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Circumradius of one pointy-top hexagon.
fn hex_size() -> f64 {
    1.0 / (HEX_COLUMNS as f64 * SQRT3)
}

/// Axial (q, r) coordinate of the hexagon containing (x, y).
fn axial_of(x: f64, y: f64) -> (i64, i64) {
    let s = hex_size();
    let q = (SQRT3 / 3.0 * x - y / 3.0) / s;
    let r = (2.0 / 3.0 * y) / s;
    // cube rounding
    let (cx, cz) = (q, r);
    let cy = -cx - cz;
    let (mut rx, ry, mut rz) = (cx.round(), cy.round(), cz.round());
    let (dx, dy, dz) = ((rx - cx).abs(), (ry - cy).abs(), (rz - cz).abs());
    if dx > dy && dx > dz {
        rx = -ry - rz;
    } else if dy <= dz {
        rz = -rx - ry;
    }
    (rx as i64, rz as i64)
}

fn center_of(q: i64, r: i64) -> (f64, f64) {
    let s = hex_size();
    (
        s * (SQRT3 * q as f64 + SQRT3 / 2.0 * r as f64),
        s * 1.5 * r as f64,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HexBin {
    pub q: i64,
    pub r: i64,
    pub x: f64,
    pub y: f64,
    pub count: usize,
}

/// Non-empty hexagons of one axis pair, ordered by (r, q).
#[derive(Debug, Clone, PartialEq)]
pub struct HexGrid {
    pub x_axis: DimensionKind,
    pub y_axis: DimensionKind,
    pub bins: Vec<HexBin>,
}

impl HexGrid {
    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for b in &self.bins {
            w.serialize(b)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Heat plot, lighter is denser; `mark` is drawn as an orange dot.
    pub fn to_svg(&self, mark: Option<(f64, f64)>) -> String {
        let (side, pad) = (480.0, 40.0);
        let mut svg = Svg::new(side + 2.0 * pad, side + 2.0 * pad);
        svg.rect(pad, pad, side, side, "#141852");
        let max = self.bins.iter().map(|b| b.count).max().unwrap_or(1) as f64;
        let px = |x: f64, y: f64| (pad + x * side, pad + (1.0 - y) * side);
        let s = hex_size();
        for b in &self.bins {
            let corners: Vec<(f64, f64)> = (0..6)
                .map(|k| {
                    let a = std::f64::consts::PI / 180.0 * (60.0 * k as f64 - 30.0);
                    px(b.x + s * a.cos(), b.y + s * a.sin())
                })
                .collect();
            svg.polygon(&corners, &heat((b.count as f64 / max).sqrt()));
        }
        if let Some((x, y)) = mark {
            let (cx, cy) = px(x, y);
            svg.circle(cx, cy, 6.0, "#ff7f0e");
        }
        svg.text(pad, side + 1.7 * pad, 14.0, self.x_axis.name());
        svg.text(4.0, pad * 0.7, 14.0, self.y_axis.name());
        svg.finish()
    }
}

/// Counts every unique room of the dataset on a fixed pointy-top lattice.
pub fn hexbin(dataset: &EraDataset, x_axis: DimensionKind, y_axis: DimensionKind) -> HexGrid {
    let mut counts: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for r in dataset.records() {
        let (q, rr) = axial_of(r.score(x_axis), r.score(y_axis));
        *counts.entry((rr, q)).or_default() += 1;
    }
    let bins = counts
        .into_iter()
        .map(|((r, q), count)| {
            let (x, y) = center_of(q, r);
            HexBin { q, r, x, y, count }
        })
        .collect();
    HexGrid {
        x_axis,
        y_axis,
        bins,
    }
}
