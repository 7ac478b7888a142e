//! Session data model and its JSON interchange format.
//!
//! A session file is a single JSON object:
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "meta":   { "name", "age", "gender", "device", "frame_dt_ms", "seed"? },
//!   "frames": [ { "t_ms", "head": { "position": [x,y,z], "rotation": [w,x,y,z] },
//!                 "gaze_local": [x,y,z], "left_open", "right_open" } ],
//!   "phases": [ { "phase_id", "kind", "start_ms", "end_ms", "config_ref" } ],
//!   "events": [ { "event_id", "onset_ms", "target_position": [x,y,z], "zone" } ]
//! }
//! ```
//!
//! Serialization is canonical (see [`crate::canonical`]), so a parsed
//! canonical file re-serializes to identical bytes.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::canonical::{parse_json, to_canonical_bytes};
use crate::error::{Error, Result};
use crate::geometry::{HeadPose, ScreenZone, UnitDir, Vec3};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_FRAME_DT_MS: f64 = 14.0;
/// Gaps larger than this multiple of the nominal frame interval are dropouts.
pub const DROPOUT_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GazeFrame {
    pub t_ms: u64,
    pub head: HeadPose,
    pub gaze_local: UnitDir,
    pub left_open: bool,
    pub right_open: bool,
}

impl GazeFrame {
    pub fn eyes_open(&self) -> bool {
        self.left_open && self.right_open
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StimulusEvent {
    pub event_id: String,
    pub onset_ms: u64,
    pub target_position: Vec3,
    pub zone: ScreenZone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    StaticGaze,
    DynamicGaze,
    Saccadic,
}

impl PhaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseKind::StaticGaze => "static_gaze",
            PhaseKind::DynamicGaze => "dynamic_gaze",
            PhaseKind::Saccadic => "saccadic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDescriptor {
    pub phase_id: String,
    pub kind: PhaseKind,
    pub start_ms: u64,
    pub end_ms: u64,
    /// Id of the test-script phase whose configuration drove this phase.
    pub config_ref: String,
}

impl PhaseDescriptor {
    pub fn contains(&self, t_ms: u64) -> bool {
        self.start_ms <= t_ms && t_ms < self.end_ms
    }

    pub fn duration_ms(&self) -> u64 {
        self.end_ms - self.start_ms
    }
}

fn default_frame_dt() -> f64 {
    DEFAULT_FRAME_DT_MS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionMeta {
    pub name: String,
    pub age: u32,
    pub gender: String,
    pub device: String,
    #[serde(default = "default_frame_dt")]
    pub frame_dt_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for SessionMeta {
    fn default() -> Self {
        SessionMeta {
            name: String::new(),
            age: 0,
            gender: String::new(),
            device: String::new(),
            frame_dt_ms: DEFAULT_FRAME_DT_MS,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionRecord {
    pub meta: SessionMeta,
    pub frames: Vec<GazeFrame>,
    pub phases: Vec<PhaseDescriptor>,
    pub events: Vec<StimulusEvent>,
}

#[derive(Serialize)]
struct SessionDocRef<'a> {
    schema_version: u32,
    #[serde(flatten)]
    record: &'a SessionRecord,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SessionDoc {
    schema_version: u32,
    meta: SessionMeta,
    frames: Vec<GazeFrame>,
    phases: Vec<PhaseDescriptor>,
    events: Vec<StimulusEvent>,
}

/// Phase and event ids appear as keys and paths in reports, so they are
/// restricted to a conservative character set.
pub(crate) fn validate_id(field: &str, id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | ':' | '/'));
    if ok {
        Ok(())
    } else {
        Err(Error::validation(
            field,
            format!("invalid identifier {id:?} (use 1-128 of [A-Za-z0-9_-:/])"),
        ))
    }
}

impl SessionRecord {
    pub fn validate(&self) -> Result<()> {
        let dt = self.meta.frame_dt_ms;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::validation(
                "meta.frame_dt_ms",
                format!("must be > 0, got {dt}"),
            ));
        }
        if self.frames.is_empty() {
            return Err(Error::validation("frames", "session has no frames"));
        }
        if let Some(i) = self.frames.windows(2).position(|w| w[1].t_ms <= w[0].t_ms) {
            let i = i + 1;
            return Err(Error::validation(
                format!("frames[{i}].t_ms"),
                format!(
                    "timestamps must be strictly increasing; first offending index {i} ({} after {})",
                    self.frames[i].t_ms,
                    self.frames[i - 1].t_ms
                ),
            ));
        }

        let mut seen = HashSet::new();
        for (i, p) in self.phases.iter().enumerate() {
            validate_id(&format!("phases[{i}].phase_id"), &p.phase_id)?;
            validate_id(&format!("phases[{i}].config_ref"), &p.config_ref)?;
            if p.start_ms >= p.end_ms {
                return Err(Error::validation(
                    format!("phases[{i}]"),
                    "start_ms must be < end_ms",
                ));
            }
            if !seen.insert(p.phase_id.as_str()) {
                return Err(Error::validation(
                    format!("phases[{i}].phase_id"),
                    format!("duplicate phase {:?}", p.phase_id),
                ));
            }
            if i > 0 && p.start_ms < self.phases[i - 1].end_ms {
                return Err(Error::validation(
                    format!("phases[{i}].start_ms"),
                    "phases must be ordered and non-overlapping",
                ));
            }
        }

        let horizon = self.time_range().1;
        let mut seen = HashSet::new();
        for (i, e) in self.events.iter().enumerate() {
            validate_id(&format!("events[{i}].event_id"), &e.event_id)?;
            if !seen.insert(e.event_id.as_str()) {
                return Err(Error::validation(
                    format!("events[{i}].event_id"),
                    format!("duplicate event {:?}", e.event_id),
                ));
            }
            if e.onset_ms as f64 > horizon {
                return Err(Error::validation(
                    format!("events[{i}].onset_ms"),
                    format!(
                        "onset {} is after the session ends ({horizon} ms)",
                        e.onset_ms
                    ),
                ));
            }
        }
        Ok(())
    }

    /// `[first frame time, last frame time + one frame interval]` in ms.
    pub fn time_range(&self) -> (f64, f64) {
        match (self.frames.first(), self.frames.last()) {
            (Some(a), Some(b)) => (a.t_ms as f64, b.t_ms as f64 + self.meta.frame_dt_ms),
            _ => (0.0, 0.0),
        }
    }

    /// Indices `i` whose gap from frame `i - 1` exceeds the dropout tolerance.
    pub fn dropouts(&self) -> Vec<usize> {
        let tol = DROPOUT_FACTOR * self.meta.frame_dt_ms;
        self.frames
            .windows(2)
            .enumerate()
            .filter(|(_, w)| (w[1].t_ms - w[0].t_ms) as f64 > tol)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn phase(&self, phase_id: &str) -> Result<&PhaseDescriptor> {
        self.phases
            .iter()
            .find(|p| p.phase_id == phase_id)
            .ok_or_else(|| Error::NotFound(format!("phase {phase_id:?}")))
    }
}

/// Parses and validates a session document.
pub fn parse_session(bytes: &[u8]) -> Result<SessionRecord> {
    let doc: SessionDoc = parse_json(bytes)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::validation(
            "schema_version",
            format!(
                "unsupported version {} (expected {SCHEMA_VERSION})",
                doc.schema_version
            ),
        ));
    }
    let record = SessionRecord {
        meta: doc.meta,
        frames: doc.frames,
        phases: doc.phases,
        events: doc.events,
    };
    record.validate()?;
    Ok(record)
}

/// Canonical, newline-terminated JSON encoding.
pub fn serialize_session(record: &SessionRecord) -> Vec<u8> {
    to_canonical_bytes(&SessionDocRef {
        schema_version: SCHEMA_VERSION,
        record,
    })
}

/// Frames with `start_ms <= t_ms < end_ms` of the named phase.
pub fn slice_phase<'a>(record: &'a SessionRecord, phase_id: &str) -> Result<&'a [GazeFrame]> {
    let phase = record.phase(phase_id)?;
    Ok(frames_in(&record.frames, phase.start_ms, phase.end_ms))
}

/// Contiguous sub-slice of time-ordered frames inside `[start_ms, end_ms)`.
pub fn frames_in(frames: &[GazeFrame], start_ms: u64, end_ms: u64) -> &[GazeFrame] {
    let lo = frames.partition_point(|f| f.t_ms < start_ms);
    let hi = frames.partition_point(|f| f.t_ms < end_ms).max(lo);
    &frames[lo..hi]
}
