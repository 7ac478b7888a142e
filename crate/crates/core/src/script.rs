//! Test scripts: the declarative description of a session's phases and the
//! analysis parameters used to score them.
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "name": "...",
//!   "participant": { "name", "age", "gender" },      // optional
//!   "screen": { "distance", "half_width", "half_height" },   // optional
//!   "eye_offset": [x, y, z],                          // optional, head-local
//!   "analysis": { ... },                              // optional, see AnalysisConfig
//!   "phases": [ { "phase_id", "kind", "duration_ms", "config": { ... } } ]
//! }
//! ```
//!
//! Phases run back to back from t = 0 in the order listed.

use std::collections::{BTreeMap, HashSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::canonical::parse_json;
use crate::error::{Error, Result};
use crate::geometry::{ScreenZone, Vec3, VirtualScreen};
use crate::pathsys::{Path, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::session::{validate_id, PhaseDescriptor, PhaseKind};

pub const SCRIPT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticPoint {
    pub position: Vec3,
    pub radius: f64,
    pub hold_ms: u64,
    pub zone: ScreenZone,
}

/// A distractor shown during a static hold. Carried through for reporting;
/// it does not change how holds are scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Distractor {
    pub offset_ms: u64,
    pub duration_ms: u64,
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticGazeConfig {
    /// Presented one after another from the phase start, each for `hold_ms`.
    pub points: Vec<StaticPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_per_zone: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub distractors: Vec<Distractor>,
}

impl StaticGazeConfig {
    /// `(start, end)` of each point's presentation window relative to the phase start.
    pub fn windows(&self) -> Vec<(u64, u64)> {
        let mut t = 0;
        self.points
            .iter()
            .map(|p| {
                let w = (t, t + p.hold_ms);
                t += p.hold_ms;
                w
            })
            .collect()
    }

    pub fn validate(&self, duration_ms: u64) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::config(
                "config.points",
                "static phase needs at least one point",
            ));
        }
        let mut per_zone: BTreeMap<ScreenZone, u32> = BTreeMap::new();
        for (i, p) in self.points.iter().enumerate() {
            if !(p.radius.is_finite() && p.radius > 0.0) {
                return Err(Error::config(
                    format!("config.points[{i}].radius"),
                    "must be > 0",
                ));
            }
            if p.hold_ms == 0 {
                return Err(Error::config(
                    format!("config.points[{i}].hold_ms"),
                    "zero-length presentation window",
                ));
            }
            if !p.position.is_finite() {
                return Err(Error::config(
                    format!("config.points[{i}].position"),
                    "must be finite",
                ));
            }
            *per_zone.entry(p.zone).or_default() += 1;
        }
        if let Some(max) = self.max_per_zone {
            if let Some((z, n)) = per_zone.iter().find(|(_, &n)| n > max) {
                return Err(Error::config(
                    "config.points",
                    format!("zone {z} used {n} times (max_per_zone {max})"),
                ));
            }
        }
        let total: u64 = self.points.iter().map(|p| p.hold_ms).sum();
        if total > duration_ms {
            return Err(Error::config(
                "config.points",
                format!("holds add up to {total} ms but the phase lasts {duration_ms} ms"),
            ));
        }
        Ok(())
    }
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES_PER_SEGMENT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicGazeConfig {
    pub path: Path,
    /// Meters per second along the path.
    pub target_speed: f64,
    /// Radius of the gaze-on tolerance sphere around the moving target.
    pub radius: f64,
    #[serde(default = "default_samples")]
    pub samples_per_segment: usize,
}

impl DynamicGazeConfig {
    pub fn validate(&self, duration_ms: u64) -> Result<()> {
        self.path.validate().map_err(|e| match e {
            Error::Config { field, message } => Error::config(format!("config.{field}"), message),
            other => other,
        })?;
        if !(self.target_speed.is_finite() && self.target_speed > 0.0) {
            return Err(Error::config("config.target_speed", "must be > 0"));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::config("config.radius", "must be > 0"));
        }
        if self.samples_per_segment < 2 {
            return Err(Error::config("config.samples_per_segment", "must be >= 2"));
        }
        let table = crate::pathsys::build_arc_length_table(&self.path, self.samples_per_segment)?;
        let needed_ms = table.total_length() / self.target_speed * 1000.0;
        if needed_ms > duration_ms as f64 {
            return Err(Error::config(
                "config.target_speed",
                format!("path takes {needed_ms:.1} ms at this speed but the phase lasts {duration_ms} ms"),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RtMode {
    /// Onset until the gaze first lands on the stimulus.
    #[default]
    TargetHit,
    /// Onset until angular speed first exceeds the saccade threshold.
    VelocityOnset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaccadicStimulus {
    pub event_id: String,
    /// Onset relative to the phase start.
    pub offset_ms: u64,
    pub position: Vec3,
    /// Zone the stimulus is presented in; derived from the head pose at
    /// onset when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone: Option<ScreenZone>,
}

fn default_fixation() -> Vec3 {
    Vec3::new(0.0, 0.0, 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaccadicConfig {
    pub stimuli: Vec<SaccadicStimulus>,
    pub timeout_ms: u64,
    pub radius: f64,
    /// Where the gaze rests before the first stimulus.
    #[serde(default = "default_fixation")]
    pub fixation: Vec3,
    #[serde(default)]
    pub rt_mode: RtMode,
}

impl SaccadicConfig {
    pub fn validate(&self, duration_ms: u64) -> Result<()> {
        if self.timeout_ms == 0 {
            return Err(Error::config("config.timeout_ms", "must be > 0"));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::config("config.radius", "must be > 0"));
        }
        let mut ids = HashSet::new();
        for (i, s) in self.stimuli.iter().enumerate() {
            validate_id(&format!("config.stimuli[{i}].event_id"), &s.event_id).map_err(
                |e| match e {
                    Error::Validation { field, message } => Error::Config { field, message },
                    other => other,
                },
            )?;
            if !ids.insert(s.event_id.as_str()) {
                return Err(Error::config(
                    format!("config.stimuli[{i}].event_id"),
                    "duplicate stimulus id",
                ));
            }
            if i > 0 {
                let prev = &self.stimuli[i - 1];
                if s.offset_ms < prev.offset_ms {
                    return Err(Error::config(
                        format!("config.stimuli[{i}].offset_ms"),
                        "stimuli must be ordered by onset",
                    ));
                }
                if prev.offset_ms + self.timeout_ms > s.offset_ms {
                    return Err(Error::config(
                        format!("config.stimuli[{i}].offset_ms"),
                        format!(
                            "response window of {:?} overlaps this stimulus",
                            prev.event_id
                        ),
                    ));
                }
            }
            if s.offset_ms + self.timeout_ms > duration_ms {
                return Err(Error::config(
                    format!("config.stimuli[{i}].offset_ms"),
                    "response window extends past the end of the phase",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "config", rename_all = "snake_case")]
pub enum PhaseProtocol {
    StaticGaze(StaticGazeConfig),
    DynamicGaze(DynamicGazeConfig),
    Saccadic(SaccadicConfig),
}

impl PhaseProtocol {
    pub fn kind(&self) -> PhaseKind {
        match self {
            PhaseProtocol::StaticGaze(_) => PhaseKind::StaticGaze,
            PhaseProtocol::DynamicGaze(_) => PhaseKind::DynamicGaze,
            PhaseProtocol::Saccadic(_) => PhaseKind::Saccadic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScriptPhase {
    pub phase_id: String,
    pub duration_ms: u64,
    #[serde(flatten)]
    pub protocol: PhaseProtocol,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentationConfig {
    pub saccade_threshold_deg_per_s: f64,
    pub saccade_min_samples: usize,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig {
            saccade_threshold_deg_per_s: 100.0,
            saccade_min_samples: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationConfig {
    pub static_weight: f64,
    pub dynamic_weight: f64,
    pub saccadic_weight: f64,
    /// Mean reaction time that earns full saccadic marks.
    pub rt_full_ms: f64,
    /// Mean reaction time at which the saccadic score reaches zero.
    pub rt_zero_ms: f64,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            static_weight: 0.4,
            dynamic_weight: 0.4,
            saccadic_weight: 0.2,
            rt_full_ms: 150.0,
            rt_zero_ms: 600.0,
        }
    }
}

impl EvaluationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("static_weight", self.static_weight),
            ("dynamic_weight", self.dynamic_weight),
            ("saccadic_weight", self.saccadic_weight),
        ] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::config(
                    format!("analysis.evaluation.{name}"),
                    "must be >= 0",
                ));
            }
        }
        if !(self.rt_full_ms.is_finite()
            && self.rt_zero_ms.is_finite()
            && self.rt_zero_ms > self.rt_full_ms)
        {
            return Err(Error::config(
                "analysis.evaluation.rt_zero_ms",
                "must be greater than rt_full_ms",
            ));
        }
        Ok(())
    }
}

fn default_debounce() -> u32 {
    1
}
fn default_fit_cap() -> f64 {
    10.0
}
fn default_trace_pre() -> u64 {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Minimum off-target run length, in frames, that counts as an offset.
    #[serde(default = "default_debounce")]
    pub debounce_frames: u32,
    /// Angular error at which pursuit fit reaches zero.
    #[serde(default = "default_fit_cap")]
    pub fit_cap_deg: f64,
    /// How far before each stimulus onset the speed trace starts.
    #[serde(default = "default_trace_pre")]
    pub trace_pre_ms: u64,
    #[serde(default)]
    pub segmentation: SegmentationConfig,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            debounce_frames: default_debounce(),
            fit_cap_deg: default_fit_cap(),
            trace_pre_ms: default_trace_pre(),
            segmentation: SegmentationConfig::default(),
            evaluation: EvaluationConfig::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fit_cap_deg.is_finite() && self.fit_cap_deg > 0.0) {
            return Err(Error::config("analysis.fit_cap_deg", "must be > 0"));
        }
        let s = &self.segmentation;
        if !(s.saccade_threshold_deg_per_s.is_finite() && s.saccade_threshold_deg_per_s > 0.0) {
            return Err(Error::config(
                "analysis.segmentation.saccade_threshold_deg_per_s",
                "must be > 0",
            ));
        }
        if s.saccade_min_samples == 0 {
            return Err(Error::config(
                "analysis.segmentation.saccade_min_samples",
                "must be >= 1",
            ));
        }
        self.evaluation.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Participant {
    pub name: String,
    pub age: u32,
    pub gender: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestScript {
    pub schema_version: u32,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub participant: Option<Participant>,
    pub screen: VirtualScreen,
    pub eye_offset: Vec3,
    pub analysis: AnalysisConfig,
    pub phases: Vec<ScriptPhase>,
}

impl TestScript {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCRIPT_SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported version {}", self.schema_version),
            ));
        }
        self.screen.validate()?;
        if !self.eye_offset.is_finite() {
            return Err(Error::config("eye_offset", "must be finite"));
        }
        self.analysis.validate()?;
        if self.phases.is_empty() {
            return Err(Error::config("phases", "script has no phases"));
        }
        let mut ids = HashSet::new();
        for (i, p) in self.phases.iter().enumerate() {
            let prefix = format!("phases[{i}]");
            validate_id(&format!("{prefix}.phase_id"), &p.phase_id).map_err(|e| match e {
                Error::Validation { field, message } => Error::Config { field, message },
                other => other,
            })?;
            if !ids.insert(p.phase_id.as_str()) {
                return Err(Error::config(
                    format!("{prefix}.phase_id"),
                    format!("duplicate phase {:?}", p.phase_id),
                ));
            }
            if p.duration_ms == 0 {
                return Err(Error::config(
                    format!("{prefix}.duration_ms"),
                    "must be > 0",
                ));
            }
            let r = match &p.protocol {
                PhaseProtocol::StaticGaze(c) => c.validate(p.duration_ms),
                PhaseProtocol::DynamicGaze(c) => c.validate(p.duration_ms),
                PhaseProtocol::Saccadic(c) => c.validate(p.duration_ms),
            };
            r.map_err(|e| match e {
                Error::Config { field, message } => {
                    Error::config(format!("{prefix}.{field}"), message)
                }
                other => other,
            })?;
        }
        Ok(())
    }

    /// Back-to-back phase layout starting at t = 0.
    pub fn phase_layout(&self) -> Vec<PhaseDescriptor> {
        let mut t = 0;
        self.phases
            .iter()
            .map(|p| {
                let d = PhaseDescriptor {
                    phase_id: p.phase_id.clone(),
                    kind: p.protocol.kind(),
                    start_ms: t,
                    end_ms: t + p.duration_ms,
                    config_ref: p.phase_id.clone(),
                };
                t += p.duration_ms;
                d
            })
            .collect()
    }

    pub fn total_duration_ms(&self) -> u64 {
        self.phases.iter().map(|p| p.duration_ms).sum()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhase {
    phase_id: String,
    kind: PhaseKind,
    duration_ms: u64,
    config: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScript {
    schema_version: u32,
    name: String,
    #[serde(default)]
    participant: Option<Participant>,
    #[serde(default)]
    screen: Option<VirtualScreen>,
    #[serde(default)]
    eye_offset: Option<Vec3>,
    #[serde(default)]
    analysis: AnalysisConfig,
    phases: Vec<RawPhase>,
}

fn typed_config<T: DeserializeOwned>(index: usize, v: Value) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." {
            format!("phases[{index}].config")
        } else {
            format!("phases[{index}].config.{path}")
        };
        let msg = e.into_inner().to_string();
        Error::Validation {
            field,
            message: msg,
        }
    })
}

/// Parses and validates a test script.
pub fn parse_script(bytes: &[u8]) -> Result<TestScript> {
    let raw: RawScript = parse_json(bytes)?;
    let mut phases = Vec::with_capacity(raw.phases.len());
    for (i, p) in raw.phases.into_iter().enumerate() {
        let protocol = match p.kind {
            PhaseKind::StaticGaze => PhaseProtocol::StaticGaze(typed_config(i, p.config)?),
            PhaseKind::DynamicGaze => PhaseProtocol::DynamicGaze(typed_config(i, p.config)?),
            PhaseKind::Saccadic => PhaseProtocol::Saccadic(typed_config(i, p.config)?),
        };
        phases.push(ScriptPhase {
            phase_id: p.phase_id,
            duration_ms: p.duration_ms,
            protocol,
        });
    }
    let script = TestScript {
        schema_version: raw.schema_version,
        name: raw.name,
        participant: raw.participant,
        screen: raw.screen.unwrap_or_default(),
        eye_offset: raw.eye_offset.unwrap_or(Vec3::ZERO),
        analysis: raw.analysis,
        phases,
    };
    script.validate()?;
    Ok(script)
}
