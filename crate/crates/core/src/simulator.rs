//! Deterministic synthetic gazer: turns a test script into a session frame
//! stream, standing in for a headset.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64(seed)`. Independent concerns draw from separate ChaCha
//! streams of that seed, so the excursion schedule of a phase does not
//! depend on how much noise was drawn before it:
//!
//! | stream            | use                          |
//! |-------------------|------------------------------|
//! | 1                 | gaze noise                   |
//! | 2                 | blink schedule               |
//! | 16 + phase index  | excursion schedule and axes  |

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angular_change, direction_to, HeadPose, Quat, UnitDir, Vec3};
use crate::protocols::{stimulus_zone, PathTarget};
use crate::script::{PhaseProtocol, TestScript};
use crate::session::{
    GazeFrame, PhaseDescriptor, SessionMeta, SessionRecord, StimulusEvent, DEFAULT_FRAME_DT_MS,
};

const NOISE_STREAM: u64 = 1;
const BLINK_STREAM: u64 = 2;
const EXCURSION_STREAM_BASE: u64 = 16;

/// An excursion with an explicit absolute start time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduledExcursion {
    pub start_ms: u64,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GazerModel {
    Ideal,
    Delayed {
        latency_ms: f64,
    },
    Noisy {
        noise_sigma_deg: f64,
    },
    Distracted {
        excursion_rate_per_s: f64,
        excursion_amplitude_deg: f64,
        excursion_duration_ms: u64,
        /// Replaces the random schedule when present.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schedule: Option<Vec<ScheduledExcursion>>,
    },
    /// Children are applied Delayed → Noisy → Distracted regardless of order.
    Composite {
        children: Vec<GazerModel>,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct DistractionParams {
    rate_per_s: f64,
    amplitude_deg: f64,
    duration_ms: u64,
    schedule: Option<Vec<ScheduledExcursion>>,
}

/// The model reduced to its three effects.
#[derive(Debug, Clone, PartialEq, Default)]
struct Effects {
    latency_ms: f64,
    sigma_deg: f64,
    distraction: Option<DistractionParams>,
}

impl GazerModel {
    pub fn validate(&self) -> Result<()> {
        self.effects().map(|_| ())
    }

    fn effects(&self) -> Result<Effects> {
        let mut e = Effects::default();
        let mut seen = [false; 3];
        self.collect(&mut e, &mut seen, true)?;
        Ok(e)
    }

    fn collect(&self, e: &mut Effects, seen: &mut [bool; 3], top: bool) -> Result<()> {
        let mut mark = |i: usize, name: &str| {
            if std::mem::replace(&mut seen[i], true) {
                Err(Error::config(
                    "gazer.children",
                    format!("more than one {name} child"),
                ))
            } else {
                Ok(())
            }
        };
        match self {
            GazerModel::Ideal => {}
            GazerModel::Delayed { latency_ms } => {
                mark(0, "delayed")?;
                if !(latency_ms.is_finite() && *latency_ms >= 0.0) {
                    return Err(Error::config("gazer.latency_ms", "must be >= 0"));
                }
                e.latency_ms = *latency_ms;
            }
            GazerModel::Noisy { noise_sigma_deg } => {
                mark(1, "noisy")?;
                if !(noise_sigma_deg.is_finite() && *noise_sigma_deg >= 0.0) {
                    return Err(Error::config("gazer.noise_sigma_deg", "must be >= 0"));
                }
                e.sigma_deg = *noise_sigma_deg;
            }
            GazerModel::Distracted {
                excursion_rate_per_s,
                excursion_amplitude_deg,
                excursion_duration_ms,
                schedule,
            } => {
                mark(2, "distracted")?;
                if !(excursion_rate_per_s.is_finite() && *excursion_rate_per_s >= 0.0) {
                    return Err(Error::config("gazer.excursion_rate_per_s", "must be >= 0"));
                }
                if !(excursion_amplitude_deg.is_finite() && *excursion_amplitude_deg > 0.0) {
                    return Err(Error::config(
                        "gazer.excursion_amplitude_deg",
                        "must be > 0",
                    ));
                }
                if *excursion_duration_ms == 0 {
                    return Err(Error::config("gazer.excursion_duration_ms", "must be > 0"));
                }
                if let Some(s) = schedule {
                    for (i, w) in s.windows(2).enumerate() {
                        if w[0].start_ms + w[0].duration_ms > w[1].start_ms {
                            return Err(Error::config(
                                format!("gazer.schedule[{}]", i + 1),
                                "excursions must be ordered and non-overlapping",
                            ));
                        }
                    }
                    if let Some(i) = s.iter().position(|x| x.duration_ms == 0) {
                        return Err(Error::config(
                            format!("gazer.schedule[{i}].duration_ms"),
                            "must be > 0",
                        ));
                    }
                }
                e.distraction = Some(DistractionParams {
                    rate_per_s: *excursion_rate_per_s,
                    amplitude_deg: *excursion_amplitude_deg,
                    duration_ms: *excursion_duration_ms,
                    schedule: schedule.clone(),
                });
            }
            GazerModel::Composite { children } => {
                if !top {
                    return Err(Error::config(
                        "gazer.children",
                        "composites cannot be nested",
                    ));
                }
                for c in children {
                    c.collect(e, seen, false)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HeadMotion {
    #[default]
    Static,
    /// Sinusoidal yaw about +y.
    SmallSway { amplitude_deg: f64, period_ms: f64 },
}

impl HeadMotion {
    pub fn pose_at(&self, t_ms: f64) -> HeadPose {
        match *self {
            HeadMotion::Static => HeadPose::default(),
            HeadMotion::SmallSway {
                amplitude_deg,
                period_ms,
            } => {
                let yaw =
                    amplitude_deg.to_radians() * (std::f64::consts::TAU * t_ms / period_ms).sin();
                let up = UnitDir::new(Vec3::new(0.0, 1.0, 0.0)).unwrap();
                HeadPose::new(Vec3::ZERO, Quat::from_axis_angle(up, yaw))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlinkConfig {
    pub rate_per_s: f64,
    pub duration_ms: u64,
}

fn default_dt() -> f64 {
    DEFAULT_FRAME_DT_MS
}

/// Simulation settings other than the seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSettings {
    #[serde(default = "default_dt")]
    pub frame_dt_ms: f64,
    #[serde(default)]
    pub head_motion: HeadMotion,
    /// Blinks are off unless configured.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blinks: Option<BlinkConfig>,
    /// When set, gaze shifts travel along a great circle at this speed
    /// instead of jumping instantly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saccade_speed_deg_per_s: Option<f64>,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            frame_dt_ms: DEFAULT_FRAME_DT_MS,
            head_motion: HeadMotion::Static,
            blinks: None,
            saccade_speed_deg_per_s: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub settings: SimSettings,
}

impl SimConfig {
    pub fn new(seed: u64) -> Self {
        SimConfig {
            seed,
            settings: SimSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.settings;
        if !(s.frame_dt_ms.is_finite() && s.frame_dt_ms > 0.0) {
            return Err(Error::config("sim.frame_dt_ms", "must be > 0"));
        }
        if let HeadMotion::SmallSway {
            amplitude_deg,
            period_ms,
        } = s.head_motion
        {
            if !(amplitude_deg.is_finite() && period_ms.is_finite() && period_ms > 0.0) {
                return Err(Error::config(
                    "sim.head_motion",
                    "amplitude must be finite and period > 0",
                ));
            }
        }
        if let Some(b) = s.blinks {
            if !(b.rate_per_s.is_finite() && b.rate_per_s >= 0.0) || b.duration_ms == 0 {
                return Err(Error::config(
                    "sim.blinks",
                    "rate must be >= 0 and duration > 0",
                ));
            }
        }
        if let Some(v) = s.saccade_speed_deg_per_s {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config("sim.saccade_speed_deg_per_s", "must be > 0"));
            }
        }
        Ok(())
    }
}

/// The model file accepted by the command line: `{"gazer": ..., "sim": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub gazer: GazerModel,
    #[serde(default)]
    pub sim: SimSettings,
}

/// One gaze excursion: the gaze is rotated off target by the model's
/// amplitude, about an axis at `axis_angle_rad` around the gaze direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Excursion {
    pub start_ms: u64,
    pub duration_ms: u64,
    pub axis_angle_rad: f64,
}

impl Excursion {
    pub fn contains(&self, t_ms: u64) -> bool {
        self.start_ms <= t_ms && t_ms < self.start_ms + self.duration_ms
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Poisson arrivals of non-overlapping intervals inside `[start, end)`.
fn poisson_intervals(
    rng: &mut ChaCha8Rng,
    rate_per_s: f64,
    duration_ms: u64,
    start: u64,
    end: u64,
) -> Vec<(u64, f64)> {
    let mut out = Vec::new();
    if rate_per_s <= 0.0 {
        return out;
    }
    let exp = Exp::new(rate_per_s / 1000.0).expect("rate is positive");
    let mut t = start as f64;
    loop {
        t += exp.sample(rng);
        let s = t.round();
        if s >= end as f64 {
            break;
        }
        let axis: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        out.push((s as u64, axis));
        t = s + duration_ms as f64;
    }
    out
}

/// The exact excursion schedule the simulator uses for one phase of the
/// script. Empty for models without a distraction component.
pub fn scripted_excursions(
    model: &GazerModel,
    cfg: &SimConfig,
    script: &TestScript,
    phase_index: usize,
) -> Result<Vec<Excursion>> {
    let effects = model.effects()?;
    let layout = script.phase_layout();
    let phase = layout
        .get(phase_index)
        .ok_or_else(|| Error::NotFound(format!("phase index {phase_index}")))?;
    Ok(phase_excursions(&effects, cfg.seed, phase, phase_index))
}

fn phase_excursions(
    effects: &Effects,
    seed: u64,
    phase: &PhaseDescriptor,
    phase_index: usize,
) -> Vec<Excursion> {
    let Some(d) = &effects.distraction else {
        return Vec::new();
    };
    let mut rng = stream_rng(seed, EXCURSION_STREAM_BASE + phase_index as u64);
    match &d.schedule {
        Some(list) => list
            .iter()
            .filter(|x| phase.contains(x.start_ms))
            .map(|x| Excursion {
                start_ms: x.start_ms,
                duration_ms: x.duration_ms,
                axis_angle_rad: rng.gen_range(0.0..std::f64::consts::TAU),
            })
            .collect(),
        None => poisson_intervals(
            &mut rng,
            d.rate_per_s,
            d.duration_ms,
            phase.start_ms,
            phase.end_ms,
        )
        .into_iter()
        .map(|(s, axis)| Excursion {
            start_ms: s,
            duration_ms: d.duration_ms,
            axis_angle_rad: axis,
        })
        .collect(),
    }
}

/// Where the script wants the gaze at time `t_ms`.
struct Timeline<'a> {
    script: &'a TestScript,
    layout: Vec<PhaseDescriptor>,
    targets: Vec<Option<PathTarget>>,
}

impl<'a> Timeline<'a> {
    fn new(script: &'a TestScript) -> Result<Self> {
        let targets = script
            .phases
            .iter()
            .map(|p| match &p.protocol {
                PhaseProtocol::DynamicGaze(c) => PathTarget::new(c).map(Some),
                _ => Ok(None),
            })
            .collect::<Result<_>>()?;
        Ok(Timeline {
            script,
            layout: script.phase_layout(),
            targets,
        })
    }

    fn target_at(&self, t_ms: f64) -> Vec3 {
        let t = t_ms.max(0.0);
        let i = self
            .layout
            .iter()
            .rposition(|p| p.start_ms as f64 <= t)
            .unwrap_or(0);
        let start = self.layout[i].start_ms;
        let local = t - start as f64;
        match &self.script.phases[i].protocol {
            PhaseProtocol::StaticGaze(c) => {
                let w = c.windows();
                let k = w.iter().rposition(|(s, _)| *s as f64 <= local).unwrap_or(0);
                c.points[k].position
            }
            PhaseProtocol::DynamicGaze(_) => self.targets[i]
                .as_ref()
                .expect("dynamic phase has a target")
                .position(local),
            PhaseProtocol::Saccadic(c) => c
                .stimuli
                .iter()
                .rev()
                .find(|s| s.offset_ms as f64 <= local)
                .map_or(c.fixation, |s| s.position),
        }
    }
}

/// Rotates `dir` by `angle_rad` about the perpendicular axis selected by
/// `axis_angle_rad` around it.
fn deflect(dir: UnitDir, angle_rad: f64, axis_angle_rad: f64) -> UnitDir {
    if angle_rad == 0.0 {
        return dir;
    }
    let e1 = dir.any_perpendicular();
    let e2 = UnitDir::new(dir.vec().cross(e1.vec())).expect("perpendicular");
    let (s, c) = axis_angle_rad.sin_cos();
    let axis = UnitDir::new(e1.vec() * c + e2.vec() * s).expect("unit combination");
    dir.rotated(axis, angle_rad)
}

/// Steps `from` towards `to` by at most `max_deg` along the great circle.
fn step_towards(from: UnitDir, to: UnitDir, max_deg: f64) -> UnitDir {
    let angle = angular_change(from, to);
    if angle <= max_deg {
        return to;
    }
    let axis = match UnitDir::new(from.vec().cross(to.vec())) {
        Ok(a) => a,
        Err(_) => from.any_perpendicular(),
    };
    from.rotated(axis, max_deg.to_radians())
}

pub fn simulate_session(
    script: &TestScript,
    model: &GazerModel,
    cfg: &SimConfig,
) -> Result<SessionRecord> {
    if script.phases.is_empty() {
        return Err(Error::config("phases", "script has no phases"));
    }
    script.validate()?;
    cfg.validate()?;
    let effects = model.effects()?;
    let timeline = Timeline::new(script)?;
    let s = &cfg.settings;
    let total = script.total_duration_ms();

    let excursions: Vec<Excursion> = timeline
        .layout
        .iter()
        .enumerate()
        .flat_map(|(i, p)| phase_excursions(&effects, cfg.seed, p, i))
        .collect();
    let blinks: Vec<(u64, u64)> = match s.blinks {
        Some(b) => {
            let mut rng = stream_rng(cfg.seed, BLINK_STREAM);
            poisson_intervals(&mut rng, b.rate_per_s, b.duration_ms, 0, total)
                .into_iter()
                .map(|(st, _)| (st, st + b.duration_ms))
                .collect()
        }
        None => Vec::new(),
    };
    let mut noise_rng = stream_rng(cfg.seed, NOISE_STREAM);
    let noise = (effects.sigma_deg > 0.0)
        .then(|| Normal::new(0.0, effects.sigma_deg).expect("sigma is finite"));

    let mut frames = Vec::new();
    let mut current: Option<UnitDir> = None;
    for k in 0u64.. {
        let t = (k as f64 * s.frame_dt_ms).round() as u64;
        if t >= total {
            break;
        }
        if frames.last().is_some_and(|f: &GazeFrame| f.t_ms == t) {
            continue;
        }
        let head = s.head_motion.pose_at(t as f64);
        let eye = head.to_world_point(script.eye_offset);
        let target = timeline.target_at(t as f64 - effects.latency_ms);
        let mut dir = direction_to(eye, target)
            .unwrap_or_else(|_| head.rotation.rotate_dir(UnitDir::FORWARD));
        if let (Some(speed), Some(prev)) = (s.saccade_speed_deg_per_s, current) {
            dir = step_towards(prev, dir, speed * s.frame_dt_ms / 1000.0);
        }
        current = Some(dir);
        if let Some(n) = &noise {
            let angle: f64 = n.sample(&mut noise_rng);
            let axis: f64 = noise_rng.gen_range(0.0..std::f64::consts::TAU);
            dir = deflect(dir, angle.abs().to_radians(), axis);
        }
        if let (Some(d), Some(x)) = (
            &effects.distraction,
            excursions.iter().find(|x| x.contains(t)),
        ) {
            dir = deflect(dir, d.amplitude_deg.to_radians(), x.axis_angle_rad);
        }
        let closed = blinks.iter().any(|&(a, b)| a <= t && t < b);
        frames.push(GazeFrame {
            t_ms: t,
            head,
            gaze_local: UnitDir::new(head.to_local_vec(dir.vec()))?,
            left_open: !closed,
            right_open: !closed,
        });
    }

    let mut events = Vec::new();
    for (phase, sp) in timeline.layout.iter().zip(&script.phases) {
        match &sp.protocol {
            PhaseProtocol::StaticGaze(c) => {
                for (i, (p, (ws, _))) in c.points.iter().zip(c.windows()).enumerate() {
                    events.push(StimulusEvent {
                        event_id: format!("{}/p{i}", sp.phase_id),
                        onset_ms: phase.start_ms + ws,
                        target_position: p.position,
                        zone: p.zone,
                    });
                }
            }
            PhaseProtocol::Saccadic(c) => {
                for st in &c.stimuli {
                    let onset = phase.start_ms + st.offset_ms;
                    events.push(StimulusEvent {
                        event_id: format!("{}/{}", sp.phase_id, st.event_id),
                        onset_ms: onset,
                        target_position: st.position,
                        zone: stimulus_zone(
                            &frames,
                            onset,
                            st.position,
                            st.zone,
                            script.eye_offset,
                            &script.screen,
                        ),
                    });
                }
            }
            PhaseProtocol::DynamicGaze(_) => {}
        }
    }

    let (name, age, gender) = match &script.participant {
        Some(p) => (p.name.clone(), p.age, p.gender.clone()),
        None => ("simulated".to_string(), 0, "unspecified".to_string()),
    };
    let record = SessionRecord {
        meta: SessionMeta {
            name,
            age,
            gender,
            device: "simulator".into(),
            frame_dt_ms: s.frame_dt_ms,
            seed: Some(cfg.seed),
        },
        frames,
        phases: timeline.layout.clone(),
        events,
    };
    record.validate()?;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::parse_script;

    const SCRIPT: &str = r#"{"schema_version":1,"name":"t","phases":[
        {"phase_id":"cal","kind":"static_gaze","duration_ms":10000,
         "config":{"points":[{"position":[0,0,2],"radius":0.05,"hold_ms":10000,"zone":"Center"}]}},
        {"phase_id":"sac","kind":"saccadic","duration_ms":3000,
         "config":{"stimuli":[{"event_id":"a","offset_ms":500,"position":[0.4,0.4,2]}],"timeout_ms":1000,"radius":0.05}}]}"#;

    fn distracted(rate: f64) -> GazerModel {
        GazerModel::Distracted {
            excursion_rate_per_s: rate,
            excursion_amplitude_deg: 20.0,
            excursion_duration_ms: 42,
            schedule: None,
        }
    }

    #[test]
    fn excursion_schedule_rules() {
        let script = parse_script(SCRIPT.as_bytes()).unwrap();
        let cfg = SimConfig::new(7);
        assert!(scripted_excursions(&distracted(0.0), &cfg, &script, 0)
            .unwrap()
            .is_empty());
        assert!(scripted_excursions(&GazerModel::Ideal, &cfg, &script, 0)
            .unwrap()
            .is_empty());
        let a = scripted_excursions(&distracted(0.5), &cfg, &script, 0).unwrap();
        let b = scripted_excursions(&distracted(0.5), &cfg, &script, 0).unwrap();
        assert_eq!(a, b);
        assert!(a
            .windows(2)
            .all(|w| w[0].start_ms + w[0].duration_ms <= w[1].start_ms));
        assert!(a.iter().all(|x| x.start_ms < 10000));
    }

    #[test]
    fn excursion_count_statistics() {
        // Over 100 seeds a 10 s phase at 0.5/s should average close to 5
        // (slightly less, since each excursion blocks 42 ms).
        let script = parse_script(SCRIPT.as_bytes()).unwrap();
        let n: usize = (0..100u64)
            .map(|seed| {
                scripted_excursions(&distracted(0.5), &SimConfig::new(seed), &script, 0)
                    .unwrap()
                    .len()
            })
            .sum();
        let mean = n as f64 / 100.0;
        // Poisson(5) over 100 draws: standard error ~0.22; allow 4 SE.
        assert!((mean - 5.0).abs() < 0.9, "mean {mean}");
    }

    #[test]
    fn model_validation() {
        assert!(GazerModel::Delayed { latency_ms: -1.0 }.validate().is_err());
        assert!(GazerModel::Composite {
            children: vec![
                GazerModel::Noisy {
                    noise_sigma_deg: 1.0
                },
                GazerModel::Noisy {
                    noise_sigma_deg: 2.0
                }
            ]
        }
        .validate()
        .is_err());
        let m: GazerModel = serde_json::from_str(r#"{"kind":"composite","children":[{"kind":"delayed","latency_ms":150},{"kind":"ideal"}]}"#).unwrap();
        m.validate().unwrap();
        assert!(serde_json::from_str::<GazerModel>(
            r#"{"kind":"distracted","excursion_rate_per_s":1}"#
        )
        .is_err());
    }

    #[test]
    fn frames_and_events() {
        let script = parse_script(SCRIPT.as_bytes()).unwrap();
        let s = simulate_session(&script, &GazerModel::Ideal, &SimConfig::new(1)).unwrap();
        assert_eq!(s.frames.first().unwrap().t_ms, 0);
        assert!(s.frames.windows(2).all(|w| w[1].t_ms - w[0].t_ms == 14));
        assert!(s.frames.last().unwrap().t_ms < 13000);
        assert_eq!(s.events.len(), 2);
        assert_eq!(s.events[1].event_id, "sac/a");
        assert_eq!(s.events[1].onset_ms, 10500);
        assert_eq!(s.events[1].zone, crate::geometry::ScreenZone::TopRight);
        assert_eq!(s.meta.seed, Some(1));
    }

    #[test]
    fn saccade_transition_is_rate_limited() {
        let script = parse_script(SCRIPT.as_bytes()).unwrap();
        let mut cfg = SimConfig::new(1);
        cfg.settings.saccade_speed_deg_per_s = Some(300.0);
        let s = simulate_session(&script, &GazerModel::Ideal, &cfg).unwrap();
        let sp = crate::metrics::speed_series(&s.frames, 14.0);
        let max = sp.iter().map(|x| x.speed_deg_per_s).fold(0.0, f64::max);
        assert!(max <= 300.0 + 1e-6 && max > 250.0, "max {max}");
    }

    #[test]
    fn blinks_close_both_eyes() {
        let script = parse_script(SCRIPT.as_bytes()).unwrap();
        let mut cfg = SimConfig::new(3);
        cfg.settings.blinks = Some(BlinkConfig {
            rate_per_s: 0.5,
            duration_ms: 150,
        });
        let s = simulate_session(&script, &GazerModel::Ideal, &cfg).unwrap();
        let closed = s.frames.iter().filter(|f| !f.left_open).count();
        assert!(closed > 0);
        assert!(s.frames.iter().all(|f| f.left_open == f.right_open));
    }
}
