use std::io;

use serde::Serialize;

use super::{EraDataset, BUCKET_WIDTH};
use crate::dimensions::DimensionKind;
use crate::svg::Svg;

/// Pearson correlation; 0 when either side has no variance or fewer than
/// two points are given.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= f64::EPSILON * n as f64 || syy <= f64::EPSILON * n as f64 {
        return 0.0;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Score/fitness pairs of feasible uniques along one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionFitness {
    pub kind: DimensionKind,
    pub r: f64,
    pub points: Vec<(f64, f64)>,
}

impl DimensionFitness {
    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["score", "fitness"])?;
        for (s, f) in &self.points {
            w.write_record([s.to_string(), f.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_svg(&self) -> String {
        let (side, pad) = (360.0, 40.0);
        let mut svg = Svg::new(side + 2.0 * pad, side + 2.0 * pad);
        svg.outline(pad, pad, side, side, "#333333");
        for &(s, f) in &self.points {
            svg.circle(pad + s * side, pad + (1.0 - f) * side, 1.5, "#1f77b4");
        }
        svg.text(
            pad,
            side + 1.7 * pad,
            14.0,
            &format!("{} (r = {:.3})", self.kind, self.r),
        );
        svg.text(4.0, pad * 0.7, 14.0, "fitness");
        svg.finish()
    }
}

/// One scatter per dimension with its Pearson r against fitness.
pub fn fitness_by_dimension(dataset: &EraDataset) -> Vec<DimensionFitness> {
    let feasible: Vec<_> = dataset.feasible().collect();
    let fitness: Vec<f64> = feasible.iter().map(|r| r.fitness.total).collect();
    DimensionKind::ALL
        .iter()
        .map(|&kind| {
            let scores: Vec<f64> = feasible.iter().map(|r| r.score(kind)).collect();
            DimensionFitness {
                kind,
                r: pearson(&scores, &fitness),
                points: scores.into_iter().zip(fitness.iter().copied()).collect(),
            }
        })
        .collect()
}

/// Feasible-unique fitness summary of one generation bucket. Buckets without
/// records keep `n = 0` and no statistics, so plots show a gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BucketStats {
    pub bucket: u64,
    pub n: usize,
    pub mean: Option<f64>,
    pub max: Option<f64>,
    /// 95% normal-approximation interval of the mean.
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

pub fn fitness_over_time(dataset: &EraDataset) -> Vec<BucketStats> {
    let Some(last) = dataset.records().last().map(|r| r.bucket) else {
        return Vec::new();
    };
    (0..=last / BUCKET_WIDTH)
        .map(|i| {
            let bucket = i * BUCKET_WIDTH;
            let vals: Vec<f64> = dataset
                .feasible()
                .filter(|r| r.bucket == bucket)
                .map(|r| r.fitness.total)
                .collect();
            let n = vals.len();
            if n == 0 {
                return BucketStats {
                    bucket,
                    n,
                    mean: None,
                    max: None,
                    ci_low: None,
                    ci_high: None,
                };
            }
            let mean = vals.iter().sum::<f64>() / n as f64;
            let var = if n > 1 {
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
            } else {
                0.0
            };
            let half = 1.96 * (var / n as f64).sqrt();
            BucketStats {
                bucket,
                n,
                mean: Some(mean),
                max: vals.iter().copied().reduce(f64::max),
                ci_low: Some(mean - half),
                ci_high: Some(mean + half),
            }
        })
        .collect()
}

pub fn write_over_time_csv<W: io::Write>(stats: &[BucketStats], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for s in stats {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean (blue) and max (red) lines with the interval band; gaps break lines.
pub fn over_time_svg(stats: &[BucketStats]) -> String {
    let (w, h, pad) = (600.0, 300.0, 40.0);
    let mut svg = Svg::new(w + 2.0 * pad, h + 2.0 * pad);
    svg.outline(pad, pad, w, h, "#333333");
    let span = stats.len().max(2) as f64 - 1.0;
    let px = |i: usize, v: f64| {
        (
            pad + i as f64 / span * w,
            pad + (1.0 - v.clamp(0.0, 1.0)) * h,
        )
    };
    let mut runs: Vec<Vec<usize>> = Vec::new();
    for (i, s) in stats.iter().enumerate() {
        match (s.n, runs.last_mut()) {
            (0, _) => runs.push(Vec::new()),
            (_, Some(run)) => run.push(i),
            (_, None) => runs.push(vec![i]),
        }
    }
    for run in runs.iter().filter(|r| !r.is_empty()) {
        let mut band: Vec<(f64, f64)> = run
            .iter()
            .map(|&i| px(i, stats[i].ci_high.unwrap_or(0.0)))
            .collect();
        band.extend(
            run.iter()
                .rev()
                .map(|&i| px(i, stats[i].ci_low.unwrap_or(0.0))),
        );
        svg.polygon(&band, "#aec7e8");
        let mean: Vec<_> = run
            .iter()
            .map(|&i| px(i, stats[i].mean.unwrap_or(0.0)))
            .collect();
        let max: Vec<_> = run
            .iter()
            .map(|&i| px(i, stats[i].max.unwrap_or(0.0)))
            .collect();
        svg.polyline(&mean, "#1f77b4");
        svg.polyline(&max, "#d62728");
    }
    svg.text(pad, h + 1.7 * pad, 14.0, "generation bucket");
    svg.finish()
}
