//! Frame-stream kinematics and aggregate scoring.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angular_change, angular_speed};
use crate::protocols::ProtocolResults;
use crate::script::{EvaluationConfig, SegmentationConfig};
use crate::session::{GazeFrame, DROPOUT_FACTOR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedSample {
    /// Timestamp of the later frame of the pair.
    pub t_ms: u64,
    pub speed_deg_per_s: f64,
}

/// Angular gaze speed for each consecutive frame pair, using world-space
/// gaze directions and the actual time between frames. Pairs that touch a
/// closed-eye frame or span a dropout produce no sample.
pub fn speed_series(frames: &[GazeFrame], frame_dt_ms: f64) -> Vec<SpeedSample> {
    let tol = DROPOUT_FACTOR * frame_dt_ms;
    frames
        .windows(2)
        .filter_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let gap = b.t_ms.checked_sub(a.t_ms)?;
            if !a.eyes_open() || !b.eyes_open() || gap == 0 || gap as f64 > tol {
                return None;
            }
            let da = a.head.rotation.rotate_dir(a.gaze_local);
            let db = b.head.rotation.rotate_dir(b.gaze_local);
            let speed = angular_speed(angular_change(da, db), gap as f64 / 1000.0).ok()?;
            Some(SpeedSample {
                t_ms: b.t_ms,
                speed_deg_per_s: speed,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EyeEventKind {
    Fixation,
    Saccade,
    Blink,
    Dropout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EyeEventSegment {
    pub kind: EyeEventKind,
    pub start_ms: u64,
    pub end_ms: u64,
}

/// Velocity-threshold segmentation into fixations, saccades, blinks and
/// dropouts. Each frame owns the time up to the next frame (one nominal
/// interval for the last frame or before a dropout); the returned segments
/// tile `[first frame, last frame + interval)` with no gaps or overlaps.
pub fn segment_events(
    speeds: &[SpeedSample],
    frames: &[GazeFrame],
    frame_dt_ms: f64,
    cfg: &SegmentationConfig,
) -> Vec<EyeEventSegment> {
    if frames.is_empty() {
        return Vec::new();
    }
    let nominal = frame_dt_ms.ceil().max(1.0) as u64;
    let tol = DROPOUT_FACTOR * frame_dt_ms;
    let mut kinds: Vec<EyeEventKind> = frames
        .iter()
        .map(|f| {
            if f.eyes_open() {
                EyeEventKind::Fixation
            } else {
                EyeEventKind::Blink
            }
        })
        .collect();

    // A speed sample at frame j describes the movement during frame j-1's interval.
    let mut run: Vec<usize> = Vec::new();
    let mut prev_frame: Option<usize> = None;
    let min_run = cfg.saccade_min_samples.max(1);
    let flush = |run: &mut Vec<usize>, kinds: &mut Vec<EyeEventKind>| {
        if run.len() >= min_run {
            for &i in run.iter() {
                if kinds[i] == EyeEventKind::Fixation {
                    kinds[i] = EyeEventKind::Saccade;
                }
            }
        }
        run.clear();
    };
    for s in speeds {
        let Ok(j) = frames.binary_search_by_key(&s.t_ms, |f| f.t_ms) else {
            continue;
        };
        if j == 0 {
            continue;
        }
        let contiguous = prev_frame.is_none_or(|p| p + 1 == j);
        if !contiguous || s.speed_deg_per_s <= cfg.saccade_threshold_deg_per_s {
            flush(&mut run, &mut kinds);
        }
        if s.speed_deg_per_s > cfg.saccade_threshold_deg_per_s {
            run.push(j - 1);
        }
        prev_frame = Some(j);
    }
    flush(&mut run, &mut kinds);

    let mut pieces: Vec<EyeEventSegment> = Vec::with_capacity(frames.len());
    for (i, f) in frames.iter().enumerate() {
        let t = f.t_ms;
        match frames.get(i + 1) {
            Some(n) if (n.t_ms - t) as f64 > tol => {
                let own_end = (t + nominal).min(n.t_ms);
                pieces.push(EyeEventSegment {
                    kind: kinds[i],
                    start_ms: t,
                    end_ms: own_end,
                });
                if own_end < n.t_ms {
                    pieces.push(EyeEventSegment {
                        kind: EyeEventKind::Dropout,
                        start_ms: own_end,
                        end_ms: n.t_ms,
                    });
                }
            }
            Some(n) => pieces.push(EyeEventSegment {
                kind: kinds[i],
                start_ms: t,
                end_ms: n.t_ms,
            }),
            None => pieces.push(EyeEventSegment {
                kind: kinds[i],
                start_ms: t,
                end_ms: t + nominal,
            }),
        }
    }
    let mut merged: Vec<EyeEventSegment> = Vec::new();
    for p in pieces {
        match merged.last_mut() {
            Some(last) if last.kind == p.kind && last.end_ms == p.start_ms => {
                last.end_ms = p.end_ms
            }
            _ => merged.push(p),
        }
    }
    merged
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Grade {
    Poor,
    Fair,
    Good,
    Excellent,
}

impl Grade {
    /// Thresholds are inclusive: 85 is Excellent, 70 Good, 50 Fair.
    pub fn from_total(total: f64) -> Grade {
        if total >= 85.0 {
            Grade::Excellent
        } else if total >= 70.0 {
            Grade::Good
        } else if total >= 50.0 {
            Grade::Fair
        } else {
            Grade::Poor
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Grade::Excellent => "Excellent",
            Grade::Good => "Good",
            Grade::Fair => "Fair",
            Grade::Poor => "Poor",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverallEvaluation {
    /// Scores in `[0, 100]`; a protocol that was not tested has no score.
    pub static_score: Option<f64>,
    pub dynamic_score: Option<f64>,
    pub saccadic_score: Option<f64>,
    pub total: f64,
    pub grade: Grade,
}

/// Maps a mean reaction time onto `[0, 100]`: full marks at `rt_full_ms`,
/// zero at `rt_zero_ms`, linear in between.
pub fn reaction_time_score(mean_rt_ms: f64, cfg: &EvaluationConfig) -> f64 {
    100.0 * ((cfg.rt_zero_ms - mean_rt_ms) / (cfg.rt_zero_ms - cfg.rt_full_ms)).clamp(0.0, 1.0)
}

pub fn overall_evaluation(
    results: &ProtocolResults,
    cfg: &EvaluationConfig,
) -> Result<OverallEvaluation> {
    let accuracies: Vec<f64> = results
        .static_gaze
        .iter()
        .flat_map(|p| p.points.iter().map(|pt| pt.stats.accuracy))
        .collect();
    let static_score = (!accuracies.is_empty())
        .then(|| 100.0 * accuracies.iter().sum::<f64>() / accuracies.len() as f64);

    let dynamic_score = (!results.dynamic_gaze.is_empty()).then(|| {
        let fits: Vec<f64> = results
            .dynamic_gaze
            .iter()
            .flat_map(|p| p.fit_series.iter().map(|s| s.fit))
            .collect();
        if fits.is_empty() {
            0.0
        } else {
            100.0 * fits.iter().sum::<f64>() / fits.len() as f64
        }
    });

    let entries: Vec<_> = results
        .saccadic
        .iter()
        .flat_map(|p| p.entries.iter())
        .collect();
    let saccadic_score = (!entries.is_empty()).then(|| {
        let rts: Vec<f64> = entries
            .iter()
            .filter_map(|e| e.reaction_time_ms.map(|r| r as f64))
            .collect();
        if rts.is_empty() {
            0.0
        } else {
            reaction_time_score(rts.iter().sum::<f64>() / rts.len() as f64, cfg)
        }
    });

    let parts = [
        (static_score, cfg.static_weight),
        (dynamic_score, cfg.dynamic_weight),
        (saccadic_score, cfg.saccadic_weight),
    ];
    let weight: f64 = parts
        .iter()
        .filter(|(s, _)| s.is_some())
        .map(|(_, w)| w)
        .sum();
    if parts.iter().all(|(s, _)| s.is_none()) {
        return Err(Error::NoData("no protocol results to evaluate".into()));
    }
    if weight <= 0.0 {
        return Err(Error::config(
            "analysis.evaluation",
            "weights of the tested protocols sum to zero",
        ));
    }
    let raw: f64 = parts
        .iter()
        .filter_map(|(s, w)| s.map(|s| s * w))
        .sum::<f64>()
        / weight;
    // Snap accumulated rounding error so that grade boundaries are exact.
    let total = ((raw * 1e9).round() / 1e9).clamp(0.0, 100.0);
    Ok(OverallEvaluation {
        static_score,
        dynamic_score,
        saccadic_score,
        total,
        grade: Grade::from_total(total),
    })
}
