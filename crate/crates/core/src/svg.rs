//! Minimal SVG writer for the analysis plots and elite-grid montages.

use std::fmt::Write;

use crate::room::{Room, Tile};

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        let mut s = Svg {
            width,
            height,
            body: String::new(),
        };
        s.rect(0.0, 0.0, width, height, "#ffffff");
        s
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) -> &mut Self {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#
        );
        self
    }

    pub fn outline(&mut self, x: f64, y: f64, w: f64, h: f64, stroke: &str) -> &mut Self {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="{stroke}"/>"#
        );
        self
    }

    pub fn polygon(&mut self, points: &[(f64, f64)], fill: &str) -> &mut Self {
        let pts: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}"/>"#,
            pts.join(" ")
        );
        self
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) -> &mut Self {
        let pts: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        self
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) -> &mut Self {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{fill}"/>"#
        );
        self
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) -> &mut Self {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}"/>"#
        );
        self
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, content: &str) -> &mut Self {
        let escaped = content
            .replace('&', "&amp;")
            .replace('<', "&lt;")
            .replace('>', "&gt;");
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="{size:.1}">{escaped}</text>"#
        );
        self
    }

    /// Draws `room` with its top-left corner at (x, y).
    pub fn room(&mut self, room: &Room, x: f64, y: f64, tile: f64) -> &mut Self {
        for (i, &t) in room.tiles().iter().enumerate() {
            let c = room.coord_of(i);
            self.rect(
                x + c.x as f64 * tile,
                y + c.y as f64 * tile,
                tile,
                tile,
                tile_color(t),
            );
        }
        for &c in room.locked() {
            self.outline(
                x + c.x as f64 * tile,
                y + c.y as f64 * tile,
                tile,
                tile,
                "#d62728",
            );
        }
        self
    }

    pub fn finish(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

pub fn tile_color(t: Tile) -> &'static str {
    match t {
        Tile::Floor => "#e8e0c8",
        Tile::Wall => "#4a4a4a",
        Tile::Treasure => "#f2c200",
        Tile::Enemy => "#c0392b",
        Tile::Door => "#2e86de",
    }
}

/// Dark-to-light ramp for `t` in [0, 1].
pub fn heat(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(20.0, 250.0),
        lerp(24.0, 235.0),
        lerp(82.0, 120.0)
    )
}
