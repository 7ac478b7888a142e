//! The three test-protocol analyzers (static holds, dynamic pursuit,
//! saccadic stimuli) and the hold-scoring machinery they share.
//!
//! Time accounting: every frame inside a window owns the interval up to the
//! next frame (clipped to the window end). The first frame of a window also
//! owns the lead-in from the window start, so the frames of an unbroken
//! stream tile the window exactly. Across a dropout a frame owns one nominal
//! frame interval. Frames with either eye closed are not countable: they add
//! to neither the on-target nor the total duration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    angular_change, classify_zone, classify_zone_clamped, direction_to, project_to_screen,
    ray_sphere_hit, world_gaze_ray, GazeRay, HeadPose, ScreenZone, UnitDir, Vec3, VirtualScreen,
};
use crate::metrics::{speed_series, SpeedSample};
use crate::pathsys::{build_arc_length_table, position_at_distance, ArcLengthTable, Path};
use crate::script::{
    AnalysisConfig, DynamicGazeConfig, PhaseProtocol, RtMode, SaccadicConfig, StaticGazeConfig,
    TestScript,
};
use crate::session::{frames_in, GazeFrame, SessionRecord, DROPOUT_FACTOR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeHoldStats {
    pub offset_count: u32,
    pub offset_duration_ms: u64,
    pub total_duration_ms: u64,
    /// `(total - offset) / total`; zero when nothing was countable.
    pub accuracy: f64,
}

impl GazeHoldStats {
    pub fn new(offset_count: u32, offset_duration_ms: u64, total_duration_ms: u64) -> Self {
        let accuracy = if total_duration_ms == 0 {
            0.0
        } else {
            (total_duration_ms - offset_duration_ms) as f64 / total_duration_ms as f64
        };
        GazeHoldStats {
            offset_count,
            offset_duration_ms,
            total_duration_ms,
            accuracy,
        }
    }

    /// Sums counts and durations, then recomputes accuracy.
    pub fn combine<'a>(items: impl IntoIterator<Item = &'a GazeHoldStats>) -> GazeHoldStats {
        let (mut c, mut o, mut t) = (0, 0, 0);
        for s in items {
            c += s.offset_count;
            o += s.offset_duration_ms;
            t += s.total_duration_ms;
        }
        GazeHoldStats::new(c, o, t)
    }
}

/// One frame's contribution to a hold window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HoldSample {
    pub t_ms: u64,
    pub duration_ms: u64,
    /// `None` when the eyes were closed.
    pub on_target: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleLabel {
    /// Eyes closed; not countable.
    Closed,
    /// Before the target was first acquired.
    Searching,
    /// The target was never acquired; the whole window is off target.
    Unacquired,
    OnTarget,
    Offset {
        run_start: bool,
    },
}

/// Labels a window's samples. An offset is a maximal run of off-target
/// countable samples after first acquisition; closed-eye samples neither
/// break nor extend a run. Runs shorter than `debounce_frames` are treated
/// as on target.
pub fn label_hold(samples: &[HoldSample], debounce_frames: u32) -> Vec<SampleLabel> {
    let min_run = debounce_frames.max(1) as usize;
    let mut labels: Vec<SampleLabel> = samples
        .iter()
        .map(|s| match s.on_target {
            None => SampleLabel::Closed,
            Some(_) => SampleLabel::Searching,
        })
        .collect();
    let Some(first) = samples.iter().position(|s| s.on_target == Some(true)) else {
        for l in labels.iter_mut().filter(|l| **l != SampleLabel::Closed) {
            *l = SampleLabel::Unacquired;
        }
        return labels;
    };

    let mut run: Vec<usize> = Vec::new();
    let flush = |run: &mut Vec<usize>, labels: &mut Vec<SampleLabel>| {
        let counted = run.len() >= min_run;
        for (k, &i) in run.iter().enumerate() {
            labels[i] = if counted {
                SampleLabel::Offset { run_start: k == 0 }
            } else {
                SampleLabel::OnTarget
            };
        }
        run.clear();
    };
    for i in first..samples.len() {
        match samples[i].on_target {
            None => {}
            Some(true) => {
                flush(&mut run, &mut labels);
                labels[i] = SampleLabel::OnTarget;
            }
            Some(false) => run.push(i),
        }
    }
    flush(&mut run, &mut labels);
    labels
}

/// Hold statistics over the samples selected by `keep`.
pub fn stats_from_labels(
    samples: &[HoldSample],
    labels: &[SampleLabel],
    mut keep: impl FnMut(usize) -> bool,
) -> GazeHoldStats {
    let (mut count, mut offset, mut total) = (0u32, 0u64, 0u64);
    for (i, (s, l)) in samples.iter().zip(labels).enumerate() {
        if !keep(i) {
            continue;
        }
        match l {
            SampleLabel::Closed => continue,
            SampleLabel::Offset { run_start } => {
                count += u32::from(*run_start);
                offset += s.duration_ms;
            }
            SampleLabel::Unacquired => offset += s.duration_ms,
            SampleLabel::Searching | SampleLabel::OnTarget => {}
        }
        total += s.duration_ms;
    }
    GazeHoldStats::new(count, offset, total)
}

pub fn hold_stats(samples: &[HoldSample], debounce_frames: u32) -> GazeHoldStats {
    let labels = label_hold(samples, debounce_frames);
    stats_from_labels(samples, &labels, |_| true)
}

/// Index range of `frames` inside `[start, end)` with each frame's owned
/// duration in that window.
fn window_durations(
    frames: &[GazeFrame],
    start: u64,
    end: u64,
    frame_dt_ms: f64,
) -> (usize, Vec<u64>) {
    let lo = frames.partition_point(|f| f.t_ms < start);
    let hi = frames.partition_point(|f| f.t_ms < end).max(lo);
    let nominal = frame_dt_ms.ceil().max(1.0) as u64;
    let tol = DROPOUT_FACTOR * frame_dt_ms;
    let durations = (lo..hi)
        .map(|i| {
            let t = frames[i].t_ms;
            let next = match frames.get(i + 1) {
                Some(n) if ((n.t_ms - t) as f64) <= tol => n.t_ms,
                _ => t + nominal,
            };
            let from = if i == lo { start } else { t };
            next.min(end) - from
        })
        .collect();
    (lo, durations)
}

/// Shared per-analysis context.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisContext {
    pub phase_start_ms: u64,
    pub frame_dt_ms: f64,
    pub eye_offset: Vec3,
    pub screen: VirtualScreen,
    pub config: AnalysisConfig,
}

impl AnalysisContext {
    pub fn new(phase_start_ms: u64, frame_dt_ms: f64) -> Self {
        AnalysisContext {
            phase_start_ms,
            frame_dt_ms,
            eye_offset: Vec3::ZERO,
            screen: VirtualScreen::default(),
            config: AnalysisConfig::default(),
        }
    }

    fn ray(&self, f: &GazeFrame) -> GazeRay {
        world_gaze_ray(&f.head, f.gaze_local, self.eye_offset)
    }

    fn on_target(&self, f: &GazeFrame, center: Vec3, radius: f64) -> Option<bool> {
        f.eyes_open()
            .then(|| ray_sphere_hit(&self.ray(f), center, radius).is_some())
    }

    fn zone_of_target(&self, head: &HeadPose, target: Vec3) -> ScreenZone {
        let origin = head.to_world_point(self.eye_offset);
        let dir =
            direction_to(origin, target).unwrap_or(head.rotation.rotate_dir(UnitDir::FORWARD));
        classify_zone_clamped(project_to_screen(
            &GazeRay {
                origin,
                direction: dir,
            },
            head,
            &self.screen,
        ))
    }
}

// ---------------------------------------------------------------- static

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticPointResult {
    pub index: usize,
    pub zone: ScreenZone,
    pub onset_ms: u64,
    pub end_ms: u64,
    pub acquired: bool,
    /// Onset to first on-target frame; absent when never acquired.
    pub reaction_time_ms: Option<u64>,
    pub stats: GazeHoldStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticZoneResult {
    pub points: u32,
    pub stats: GazeHoldStats,
    pub mean_reaction_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticPhaseResult {
    pub phase_id: String,
    pub overall: GazeHoldStats,
    pub points: Vec<StaticPointResult>,
    pub zones: BTreeMap<ScreenZone, StaticZoneResult>,
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (mut s, mut n) = (0.0, 0usize);
    for v in values {
        s += v;
        n += 1;
    }
    (n > 0).then(|| s / n as f64)
}

/// Per-zone aggregation of point results.
pub fn aggregate_static_zones(
    points: &[StaticPointResult],
) -> BTreeMap<ScreenZone, StaticZoneResult> {
    let mut by_zone: BTreeMap<ScreenZone, Vec<&StaticPointResult>> = BTreeMap::new();
    for p in points {
        by_zone.entry(p.zone).or_default().push(p);
    }
    by_zone
        .into_iter()
        .map(|(z, ps)| {
            let stats = GazeHoldStats::combine(ps.iter().map(|p| &p.stats));
            let rt = mean(
                ps.iter()
                    .filter_map(|p| p.reaction_time_ms.map(|r| r as f64)),
            );
            (
                z,
                StaticZoneResult {
                    points: ps.len() as u32,
                    stats,
                    mean_reaction_time_ms: rt,
                },
            )
        })
        .collect()
}

/// Scores each static point over its presentation window. `frames` may be
/// the whole session or any superset of the phase's windows.
pub fn analyze_static(
    phase_id: &str,
    frames: &[GazeFrame],
    cfg: &StaticGazeConfig,
    ctx: &AnalysisContext,
) -> Result<StaticPhaseResult> {
    if frames.is_empty() {
        return Err(Error::NoData(format!("phase {phase_id:?} has no frames")));
    }
    let mut points = Vec::with_capacity(cfg.points.len());
    for (index, (point, (ws, we))) in cfg.points.iter().zip(cfg.windows()).enumerate() {
        if we <= ws {
            return Err(Error::config(
                format!("points[{index}].hold_ms"),
                "zero-length presentation window",
            ));
        }
        let (start, end) = (ctx.phase_start_ms + ws, ctx.phase_start_ms + we);
        let (lo, durations) = window_durations(frames, start, end, ctx.frame_dt_ms);
        let samples: Vec<HoldSample> = durations
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                let f = &frames[lo + k];
                HoldSample {
                    t_ms: f.t_ms,
                    duration_ms: d,
                    on_target: ctx.on_target(f, point.position, point.radius),
                }
            })
            .collect();
        let labels = label_hold(&samples, ctx.config.debounce_frames);
        let stats = stats_from_labels(&samples, &labels, |_| true);
        let first_hit = samples.iter().find(|s| s.on_target == Some(true));
        points.push(StaticPointResult {
            index,
            zone: point.zone,
            onset_ms: start,
            end_ms: end,
            acquired: first_hit.is_some(),
            reaction_time_ms: first_hit.map(|s| s.t_ms - start),
            stats,
        });
    }
    let zones = aggregate_static_zones(&points);
    let overall = GazeHoldStats::combine(points.iter().map(|p| &p.stats));
    Ok(StaticPhaseResult {
        phase_id: phase_id.to_string(),
        overall,
        points,
        zones,
    })
}

// --------------------------------------------------------------- dynamic

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSample {
    pub t_ms: u64,
    pub fit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicPhaseResult {
    pub phase_id: String,
    pub overall: GazeHoldStats,
    /// Keyed by the zone the target projects into at each frame.
    pub zones: BTreeMap<ScreenZone, GazeHoldStats>,
    pub fit_series: Vec<FitSample>,
    pub mean_fit: f64,
    /// Phase start to first on-target frame.
    pub reaction_time_ms: Option<u64>,
}

/// Moving target of a dynamic phase.
#[derive(Debug, Clone)]
pub struct PathTarget {
    path: Path,
    table: ArcLengthTable,
    speed_m_per_s: f64,
}

impl PathTarget {
    pub fn new(cfg: &DynamicGazeConfig) -> Result<PathTarget> {
        cfg.path.validate()?;
        let table = build_arc_length_table(&cfg.path, cfg.samples_per_segment)?;
        Ok(PathTarget {
            path: cfg.path.clone(),
            table,
            speed_m_per_s: cfg.target_speed,
        })
    }

    /// Position `elapsed_ms` after the phase start; parks at the path end.
    pub fn position(&self, elapsed_ms: f64) -> Vec3 {
        let s = (self.speed_m_per_s * elapsed_ms.max(0.0) / 1000.0).min(self.table.total_length());
        position_at_distance(&self.path, &self.table, s).expect("distance clamped into range")
    }

    pub fn traversal_ms(&self) -> f64 {
        self.table.total_length() / self.speed_m_per_s * 1000.0
    }

    pub fn table(&self) -> &ArcLengthTable {
        &self.table
    }
}

/// Pursuit fit for an angular error: 1 at zero error, falling linearly to 0
/// at `cap_deg` and beyond.
/// Angular errors at or below this are floating-point residue from the
/// head-frame round trip and count as zero.
pub const ANGLE_RESOLUTION_DEG: f64 = 1e-9;

pub fn fit_degree(angular_error_deg: f64, cap_deg: f64) -> f64 {
    if angular_error_deg <= ANGLE_RESOLUTION_DEG {
        return 1.0;
    }
    1.0 - angular_error_deg.min(cap_deg) / cap_deg
}

pub fn analyze_dynamic(
    phase_id: &str,
    frames: &[GazeFrame],
    phase_end_ms: u64,
    cfg: &DynamicGazeConfig,
    ctx: &AnalysisContext,
) -> Result<DynamicPhaseResult> {
    let start = ctx.phase_start_ms;
    let target = PathTarget::new(cfg)?;
    if target.traversal_ms() > (phase_end_ms - start) as f64 {
        return Err(Error::config(
            "target_speed",
            format!(
                "path needs {:.1} ms but phase {phase_id:?} lasts {} ms",
                target.traversal_ms(),
                phase_end_ms - start
            ),
        ));
    }
    let (lo, durations) = window_durations(frames, start, phase_end_ms, ctx.frame_dt_ms);
    if durations.is_empty() {
        return Err(Error::NoData(format!("phase {phase_id:?} has no frames")));
    }
    let cap = ctx.config.fit_cap_deg;
    let mut samples = Vec::with_capacity(durations.len());
    let mut zones = Vec::with_capacity(durations.len());
    let mut fit_series = Vec::new();
    for (k, &d) in durations.iter().enumerate() {
        let f = &frames[lo + k];
        let pos = target.position((f.t_ms.max(start) - start) as f64);
        let on = ctx.on_target(f, pos, cfg.radius);
        samples.push(HoldSample {
            t_ms: f.t_ms,
            duration_ms: d,
            on_target: on,
        });
        zones.push(ctx.zone_of_target(&f.head, pos));
        if f.eyes_open() {
            let ray = ctx.ray(f);
            let fit = match direction_to(ray.origin, pos) {
                Ok(ideal) => fit_degree(angular_change(ray.direction, ideal), cap),
                Err(_) => 1.0,
            };
            fit_series.push(FitSample { t_ms: f.t_ms, fit });
        }
    }
    let labels = label_hold(&samples, ctx.config.debounce_frames);
    let overall = stats_from_labels(&samples, &labels, |_| true);
    let mut zone_stats = BTreeMap::new();
    for z in ScreenZone::ALL {
        if zones.contains(&z) {
            zone_stats.insert(z, stats_from_labels(&samples, &labels, |i| zones[i] == z));
        }
    }
    let mean_fit = mean(fit_series.iter().map(|s| s.fit)).unwrap_or(0.0);
    let reaction_time_ms = samples
        .iter()
        .find(|s| s.on_target == Some(true))
        .map(|s| s.t_ms.max(start) - start);
    Ok(DynamicPhaseResult {
        phase_id: phase_id.to_string(),
        overall,
        zones: zone_stats,
        fit_series,
        mean_fit,
        reaction_time_ms,
    })
}

// -------------------------------------------------------------- saccadic

/// A stimulus with an absolute onset time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledStimulus {
    pub event_id: String,
    pub onset_ms: u64,
    pub position: Vec3,
    pub zone: Option<ScreenZone>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaccadicResultEntry {
    pub event_id: String,
    pub onset_ms: u64,
    pub zone: ScreenZone,
    pub reaction_time_ms: Option<u64>,
    pub timed_out: bool,
    /// Angular speed over `[onset - trace_pre_ms, onset + timeout]`.
    pub trace: Vec<SpeedSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaccadicPhaseResult {
    pub phase_id: String,
    pub entries: Vec<SaccadicResultEntry>,
    /// Mean reaction time per zone over events that did not time out.
    pub zone_mean_rt_ms: BTreeMap<ScreenZone, f64>,
    pub mean_reaction_time_ms: Option<f64>,
    pub timed_out_count: u32,
}

pub fn schedule_stimuli(cfg: &SaccadicConfig, phase_start_ms: u64) -> Vec<ScheduledStimulus> {
    cfg.stimuli
        .iter()
        .map(|s| ScheduledStimulus {
            event_id: s.event_id.clone(),
            onset_ms: phase_start_ms + s.offset_ms,
            position: s.position,
            zone: s.zone,
        })
        .collect()
}

/// Zone a stimulus is presented in: as configured, otherwise where it
/// projects from the head pose at the first frame at or after onset.
pub fn stimulus_zone(
    frames: &[GazeFrame],
    onset_ms: u64,
    position: Vec3,
    zone: Option<ScreenZone>,
    eye_offset: Vec3,
    screen: &VirtualScreen,
) -> ScreenZone {
    if let Some(z) = zone {
        return z;
    }
    let i = frames
        .partition_point(|f| f.t_ms < onset_ms)
        .min(frames.len().saturating_sub(1));
    let head = frames.get(i).map(|f| f.head).unwrap_or_default();
    let origin = head.to_world_point(eye_offset);
    let Ok(dir) = direction_to(origin, position) else {
        return ScreenZone::Center;
    };
    let p = project_to_screen(
        &GazeRay {
            origin,
            direction: dir,
        },
        &head,
        screen,
    );
    classify_zone(p).unwrap_or_else(|_| classify_zone_clamped(p))
}

pub fn analyze_saccadic(
    phase_id: &str,
    frames: &[GazeFrame],
    cfg: &SaccadicConfig,
    ctx: &AnalysisContext,
) -> Result<SaccadicPhaseResult> {
    let stimuli = schedule_stimuli(cfg, ctx.phase_start_ms);
    for w in stimuli.windows(2) {
        if w[0].onset_ms + cfg.timeout_ms > w[1].onset_ms {
            return Err(Error::config(
                "stimuli",
                format!(
                    "response windows of {:?} and {:?} overlap",
                    w[0].event_id, w[1].event_id
                ),
            ));
        }
    }
    let speeds = speed_series(frames, ctx.frame_dt_ms);
    let threshold = ctx.config.segmentation.saccade_threshold_deg_per_s;
    let mut entries = Vec::with_capacity(stimuli.len());
    for s in &stimuli {
        let (lo_t, hi_t) = (s.onset_ms, s.onset_ms + cfg.timeout_ms);
        let rt = match cfg.rt_mode {
            RtMode::TargetHit => frames_in(frames, lo_t, hi_t)
                .iter()
                .find(|f| ctx.on_target(f, s.position, cfg.radius) == Some(true))
                .map(|f| f.t_ms - s.onset_ms),
            RtMode::VelocityOnset => speeds
                .iter()
                .find(|p| p.t_ms >= lo_t && p.t_ms < hi_t && p.speed_deg_per_s > threshold)
                .map(|p| p.t_ms - s.onset_ms),
        };
        let trace_from = s.onset_ms.saturating_sub(ctx.config.trace_pre_ms);
        let trace = speeds
            .iter()
            .filter(|p| p.t_ms >= trace_from && p.t_ms <= hi_t)
            .copied()
            .collect();
        entries.push(SaccadicResultEntry {
            event_id: s.event_id.clone(),
            onset_ms: s.onset_ms,
            zone: stimulus_zone(
                frames,
                s.onset_ms,
                s.position,
                s.zone,
                ctx.eye_offset,
                &ctx.screen,
            ),
            reaction_time_ms: rt,
            timed_out: rt.is_none(),
            trace,
        });
    }
    Ok(summarize_saccadic(phase_id, entries))
}

pub fn summarize_saccadic(
    phase_id: &str,
    entries: Vec<SaccadicResultEntry>,
) -> SaccadicPhaseResult {
    let mut by_zone: BTreeMap<ScreenZone, Vec<f64>> = BTreeMap::new();
    for e in &entries {
        if let Some(rt) = e.reaction_time_ms {
            by_zone.entry(e.zone).or_default().push(rt as f64);
        }
    }
    let zone_mean_rt_ms = by_zone
        .into_iter()
        .map(|(z, v)| (z, mean(v).unwrap()))
        .collect();
    let mean_reaction_time_ms = mean(
        entries
            .iter()
            .filter_map(|e| e.reaction_time_ms.map(|r| r as f64)),
    );
    let timed_out_count = entries.iter().filter(|e| e.timed_out).count() as u32;
    SaccadicPhaseResult {
        phase_id: phase_id.to_string(),
        entries,
        zone_mean_rt_ms,
        mean_reaction_time_ms,
        timed_out_count,
    }
}

// ---------------------------------------------------------------- session

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResults {
    pub static_gaze: Vec<StaticPhaseResult>,
    pub dynamic_gaze: Vec<DynamicPhaseResult>,
    pub saccadic: Vec<SaccadicPhaseResult>,
}

impl ProtocolResults {
    pub fn is_empty(&self) -> bool {
        self.static_gaze.is_empty() && self.dynamic_gaze.is_empty() && self.saccadic.is_empty()
    }
}

/// Runs every scripted phase against the matching phase of the session.
pub fn analyze_session(session: &SessionRecord, script: &TestScript) -> Result<ProtocolResults> {
    script.validate()?;
    let mut results = ProtocolResults::default();
    for sp in &script.phases {
        let phase = session
            .phases
            .iter()
            .find(|p| p.phase_id == sp.phase_id)
            .ok_or_else(|| {
                Error::validation(
                    format!("phases.{}", sp.phase_id),
                    format!(
                        "scripted phase {:?} is missing from the session",
                        sp.phase_id
                    ),
                )
            })?;
        if phase.kind != sp.protocol.kind() {
            return Err(Error::validation(
                format!("phases.{}.kind", sp.phase_id),
                format!(
                    "session has {} but the script expects {}",
                    phase.kind.as_str(),
                    sp.protocol.kind().as_str()
                ),
            ));
        }
        let ctx = AnalysisContext {
            phase_start_ms: phase.start_ms,
            frame_dt_ms: session.meta.frame_dt_ms,
            eye_offset: script.eye_offset,
            screen: script.screen,
            config: script.analysis,
        };
        let frames = frames_in(&session.frames, phase.start_ms, phase.end_ms);
        let with_phase = |e: Error| match e {
            Error::Config { field, message } => {
                Error::config(format!("phases.{}.{field}", sp.phase_id), message)
            }
            other => other,
        };
        match &sp.protocol {
            PhaseProtocol::StaticGaze(c) => {
                let total: u64 = c.points.iter().map(|p| p.hold_ms).sum();
                if total > phase.duration_ms() {
                    return Err(Error::validation(
                        format!("phases.{}", sp.phase_id),
                        "session phase is shorter than the scripted holds",
                    ));
                }
                results
                    .static_gaze
                    .push(analyze_static(&sp.phase_id, frames, c, &ctx).map_err(with_phase)?)
            }
            PhaseProtocol::DynamicGaze(c) => results.dynamic_gaze.push(
                analyze_dynamic(&sp.phase_id, frames, phase.end_ms, c, &ctx).map_err(with_phase)?,
            ),
            PhaseProtocol::Saccadic(c) => results
                .saccadic
                .push(analyze_saccadic(&sp.phase_id, frames, c, &ctx).map_err(with_phase)?),
        }
    }
    Ok(results)
}
