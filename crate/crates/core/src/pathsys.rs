//! Target-motion paths for the dynamic gaze test: straight lines and cubic
//! bezier segments, traversed at constant speed through a chordal
//! arc-length table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 256;

/// Maximum gap allowed between the end of one segment and the start of the next.
pub const JOIN_TOLERANCE_M: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSegment {
    Line {
        p0: Vec3,
        p1: Vec3,
    },
    CubicBezier {
        p0: Vec3,
        c0: Vec3,
        c1: Vec3,
        p1: Vec3,
    },
}

impl PathSegment {
    pub fn start(&self) -> Vec3 {
        match *self {
            PathSegment::Line { p0, .. } | PathSegment::CubicBezier { p0, .. } => p0,
        }
    }

    pub fn end(&self) -> Vec3 {
        match *self {
            PathSegment::Line { p1, .. } | PathSegment::CubicBezier { p1, .. } => p1,
        }
    }

    pub fn reversed(&self) -> PathSegment {
        match *self {
            PathSegment::Line { p0, p1 } => PathSegment::Line { p0: p1, p1: p0 },
            PathSegment::CubicBezier { p0, c0, c1, p1 } => PathSegment::CubicBezier {
                p0: p1,
                c0: c1,
                c1: c0,
                p1: p0,
            },
        }
    }

    fn points(&self) -> Vec<Vec3> {
        match *self {
            PathSegment::Line { p0, p1 } => vec![p0, p1],
            PathSegment::CubicBezier { p0, c0, c1, p1 } => vec![p0, c0, c1, p1],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pts = self.points();
        if pts.iter().any(|p| !p.is_finite()) {
            return Err(Error::config("path.segment", "non-finite control point"));
        }
        let poly: f64 = pts.windows(2).map(|w| w[0].distance(w[1])).sum();
        match self {
            PathSegment::Line { .. } if poly == 0.0 => {
                Err(Error::config("path.segment", "line endpoints coincide"))
            }
            PathSegment::CubicBezier { .. } if poly == 0.0 => Err(Error::config(
                "path.segment",
                "bezier control polygon has zero length",
            )),
            _ => Ok(()),
        }
    }

    /// Position at parameter `t ∈ [0, 1]`; cubic segments use de Casteljau.
    pub fn eval(&self, t: f64) -> Result<Vec3> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!(
                "segment parameter {t} outside [0, 1]"
            )));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: f64) -> Vec3 {
        match *self {
            PathSegment::Line { p0, p1 } => p0 + (p1 - p0) * t,
            PathSegment::CubicBezier { p0, c0, c1, p1 } => {
                let a = p0.lerp(c0, t);
                let b = c0.lerp(c1, t);
                let c = c1.lerp(p1, t);
                let d = a.lerp(b, t);
                let e = b.lerp(c, t);
                d.lerp(e, t)
            }
        }
    }
}

/// Evaluates a segment at `t`.
pub fn eval_segment(seg: &PathSegment, t: f64) -> Result<Vec3> {
    seg.eval(t)
}

/// A non-empty, C0-continuous chain of segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Path {
    pub segments: Vec<PathSegment>,
}

impl Path {
    pub fn new(segments: Vec<PathSegment>) -> Result<Path> {
        let p = Path { segments };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::config("path.segments", "path has no segments"));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            seg.validate().map_err(|e| match e {
                Error::Config { message, .. } => {
                    Error::config(format!("path.segments[{i}]"), message)
                }
                other => other,
            })?;
        }
        for (i, w) in self.segments.windows(2).enumerate() {
            let gap = w[0].end().distance(w[1].start());
            if gap > JOIN_TOLERANCE_M {
                return Err(Error::config(
                    format!("path.segments[{}]", i + 1),
                    format!("segment does not start where the previous one ends (gap {gap} m)"),
                ));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> Vec3 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Vec3 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn reversed(&self) -> Path {
        Path {
            segments: self
                .segments
                .iter()
                .rev()
                .map(PathSegment::reversed)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct SegmentTable {
    /// Parameter values, uniformly spaced in `[0, 1]`.
    params: Vec<f64>,
    /// Cumulative chord length from the segment start at each parameter.
    lengths: Vec<f64>,
}

/// Chordal arc-length table over every segment of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcLengthTable {
    segments: Vec<SegmentTable>,
    /// Path distance at the start of each segment.
    offsets: Vec<f64>,
    total: f64,
}

impl ArcLengthTable {
    pub fn total_length(&self) -> f64 {
        self.total
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        self.segments
            .iter()
            .map(|s| *s.lengths.last().unwrap())
            .collect()
    }

    /// Path distance at which each segment starts (first entry is 0).
    pub fn segment_offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// `(t_param, cumulative_length)` samples of one segment.
    pub fn samples(&self, segment: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let s = &self.segments[segment];
        s.params.iter().copied().zip(s.lengths.iter().copied())
    }
}

pub fn build_arc_length_table(path: &Path, samples_per_segment: usize) -> Result<ArcLengthTable> {
    if samples_per_segment < 2 {
        return Err(Error::Domain(format!(
            "samples_per_segment must be >= 2, got {samples_per_segment}"
        )));
    }
    let n = samples_per_segment;
    let mut segments = Vec::with_capacity(path.segments.len());
    let mut offsets = Vec::with_capacity(path.segments.len());
    let mut total = 0.0;
    for seg in &path.segments {
        let params: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let mut lengths = Vec::with_capacity(n);
        let mut acc = 0.0;
        let mut prev = seg.eval_unchecked(0.0);
        lengths.push(0.0);
        for &t in &params[1..] {
            let p = seg.eval_unchecked(t);
            acc += p.distance(prev);
            lengths.push(acc);
            prev = p;
        }
        offsets.push(total);
        total += acc;
        segments.push(SegmentTable { params, lengths });
    }
    Ok(ArcLengthTable {
        segments,
        offsets,
        total,
    })
}

/// Point at path distance `s`, by inverting the arc-length table with linear
/// interpolation between samples.
/// Distances within a relative 1e-12 of either end are clamped onto it.
pub fn position_at_distance(path: &Path, table: &ArcLengthTable, s: f64) -> Result<Vec3> {
    let slack = 1e-12 * table.total.max(1.0);
    if !(-slack..=table.total + slack).contains(&s) {
        return Err(Error::Domain(format!(
            "distance {s} outside [0, {}]",
            table.total
        )));
    }
    let s = s.clamp(0.0, table.total);
    if s == table.total {
        return Ok(path.end());
    }
    // Last segment whose offset is <= s; zero-length trailing tables are skipped
    // naturally because their offset equals the total.
    let seg_idx = match table.offsets.partition_point(|&o| o <= s) {
        0 => 0,
        k => k - 1,
    };
    let seg_table = &table.segments[seg_idx];
    let local = s - table.offsets[seg_idx];
    let lengths = &seg_table.lengths;
    let i = lengths
        .partition_point(|&l| l <= local)
        .clamp(1, lengths.len() - 1);
    let (l0, l1) = (lengths[i - 1], lengths[i]);
    let (t0, t1) = (seg_table.params[i - 1], seg_table.params[i]);
    let t = if l1 > l0 {
        t0 + (t1 - t0) * ((local - l0) / (l1 - l0))
    } else {
        t0
    };
    Ok(path.segments[seg_idx].eval_unchecked(t.clamp(0.0, 1.0)))
}

/// Standard cubic approximation constant for a circular quarter arc.
pub const QUARTER_CIRCLE_KAPPA: f64 = 0.552_284_749_830_793_4;
