//! Acceptance suite. Runs as a plain binary so each criterion prints its
//! own PASS/FAIL line regardless of output capturing; exits non-zero if any
//! criterion fails.

use std::f64::consts::FRAC_PI_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use vrgaze::cli::{self, ResultsFile};
use vrgaze::geometry::{classify_zone, HeadPose, Quat, ScreenPoint, ScreenZone, UnitDir, Vec3};
use vrgaze::metrics::{speed_series, Grade};
use vrgaze::pathsys::{
    build_arc_length_table, position_at_distance, Path, PathSegment, QUARTER_CIRCLE_KAPPA,
};
use vrgaze::protocols::{analyze_session, ProtocolResults};
use vrgaze::questionnaire::{cohort_summary, parse_responses};
use vrgaze::report::{format_value, lookup};
use vrgaze::script::parse_script;
use vrgaze::session::{
    parse_session, serialize_session, GazeFrame, PhaseDescriptor, PhaseKind, SessionMeta,
    SessionRecord, StimulusEvent,
};
use vrgaze::simulator::{simulate_session, GazerModel, ScheduledExcursion, SimConfig};

type Outcome = Result<String, String>;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn read_fixture(rel: &str) -> Vec<u8> {
    std::fs::read(fixtures().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit {
        Err(format!("took {took:?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

// 1

fn table1() -> Outcome {
    let start = Instant::now();
    // Published pilot means, participants 1..8.
    let printed = [
        ["4.00", "4.00", "4.00"],
        ["5.00", "5.00", "5.00"],
        ["2.33", "2.33", "3.80"],
        ["4.00", "4.33", "3.80"],
        ["2.33", "3.00", "2.40"],
        ["5.00", "4.00", "4.60"],
        ["4.33", "4.67", "4.40"],
        ["4.00", "3.00", "4.00"],
    ];
    let records = parse_responses(&read_fixture("questionnaire/pilot_responses.json"))
        .map_err(|e| e.to_string())?;
    let summary = cohort_summary(&records).map_err(|e| e.to_string())?;
    ensure!(
        summary.participants.len() == 8,
        "expected 8 participants, got {}",
        summary.participants.len()
    );
    let mut matched = 0;
    for (i, row) in summary.participants.iter().enumerate() {
        ensure!(
            row.participant_id == format!("P{}", i + 1),
            "unexpected participant order at {i}"
        );
        let got = [row.cognitive, row.behavioral, row.affective].map(|v| format!("{v:.2}"));
        for k in 0..3 {
            ensure!(
                got[k] == printed[i][k],
                "P{} group {k}: got {}, printed {}",
                i + 1,
                got[k],
                printed[i][k]
            );
            matched += 1;
        }
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("{matched}/24 means match"))
}

// 2

fn ideal_gazer() -> Outcome {
    let start = Instant::now();
    let script =
        parse_script(&read_fixture("scripts/full_assessment.json")).map_err(|e| e.to_string())?;
    let session = simulate_session(&script, &GazerModel::Ideal, &SimConfig::new(42))
        .map_err(|e| e.to_string())?;
    let res = cli::analyze(&session, &script).map_err(|e| e.to_string())?;
    let p = &res.protocols;
    ensure!(
        !p.static_gaze.is_empty() && !p.dynamic_gaze.is_empty() && !p.saccadic.is_empty(),
        "a protocol is missing"
    );
    let perfect = |s: &vrgaze::protocols::GazeHoldStats| {
        s.offset_count == 0 && s.offset_duration_ms == 0 && s.accuracy == 1.0
    };
    let mut checked = 0;
    for ph in &p.static_gaze {
        ensure!(perfect(&ph.overall), "static overall {:?}", ph.overall);
        for pt in &ph.points {
            ensure!(
                perfect(&pt.stats),
                "static point {} {:?}",
                pt.index,
                pt.stats
            );
            checked += 1;
        }
        for (z, zr) in &ph.zones {
            ensure!(perfect(&zr.stats), "static zone {z} {:?}", zr.stats);
        }
    }
    for ph in &p.dynamic_gaze {
        ensure!(perfect(&ph.overall), "dynamic overall {:?}", ph.overall);
        for (z, s) in &ph.zones {
            ensure!(perfect(s), "dynamic zone {z} {s:?}");
        }
        ensure!(
            ph.fit_series.iter().all(|f| f.fit == 1.0),
            "fit series is not identically 1"
        );
        checked += ph.fit_series.len();
    }
    let mut max_rt = 0;
    for ph in &p.saccadic {
        for e in &ph.entries {
            let rt = e
                .reaction_time_ms
                .ok_or_else(|| format!("{} timed out", e.event_id))?;
            ensure!(rt <= 14, "{} RT {rt} ms", e.event_id);
            max_rt = max_rt.max(rt);
        }
    }
    let eval = res.evaluation.ok_or("no evaluation")?;
    ensure!(eval.grade == Grade::Excellent, "grade {:?}", eval.grade);
    within(Duration::from_secs(5), start)?;
    Ok(format!(
        "{checked} points/fit samples perfect, max RT {max_rt} ms, total {:.2}",
        eval.total
    ))
}

// 3

fn battery_script(n: usize) -> Vec<u8> {
    let ring = [
        (0.0, 0.7),
        (0.7, 0.7),
        (0.7, 0.0),
        (0.7, -0.7),
        (0.0, -0.7),
        (-0.7, -0.7),
        (-0.7, 0.0),
        (-0.7, 0.7),
    ];
    let stimuli: Vec<Value> = (0..n)
        .map(|k| {
            // Skip around the ring so consecutive targets differ.
            let (x, y) = ring[(k * 3) % ring.len()];
            json!({"event_id": format!("s{k}"), "offset_ms": 500 + 1200 * k, "position": [x, y, 2.0]})
        })
        .collect();
    let duration = 500 + 1200 * n as u64 + 500;
    serde_json::to_vec(&json!({
        "schema_version": 1, "name": "latency battery",
        "phases": [{"phase_id": "sac", "kind": "saccadic", "duration_ms": duration,
                    "config": {"stimuli": stimuli, "timeout_ms": 1000, "radius": 0.06}}]
    }))
    .unwrap()
}

fn latency_recovery() -> Outcome {
    let start = Instant::now();
    let script = parse_script(&battery_script(24)).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for latency in [50u64, 150, 300] {
        let model = GazerModel::Delayed {
            latency_ms: latency as f64,
        };
        let session = simulate_session(&script, &model, &SimConfig::new(latency))
            .map_err(|e| e.to_string())?;
        let res = analyze_session(&session, &script).map_err(|e| e.to_string())?;
        let entries = &res.saccadic[0].entries;
        ensure!(entries.len() >= 20, "only {} stimuli", entries.len());
        let (mut lo, mut hi) = (u64::MAX, 0);
        for e in entries {
            let rt = e
                .reaction_time_ms
                .ok_or_else(|| format!("L={latency}: {} timed out", e.event_id))?;
            ensure!(
                (latency..=latency + 14).contains(&rt),
                "L={latency}: {} RT {rt} ms",
                e.event_id
            );
            lo = lo.min(rt);
            hi = hi.max(rt);
        }
        parts.push(format!(
            "L={latency}: {} RTs in [{lo}, {hi}]",
            entries.len()
        ));
    }
    within(Duration::from_secs(10), start)?;
    Ok(parts.join("; "))
}

// 4

fn offset_exactness() -> Outcome {
    let script =
        parse_script(&read_fixture("scripts/calibration_9zone.json")).map_err(|e| e.to_string())?;
    let vrgaze::script::PhaseProtocol::StaticGaze(cfg) = &script.phases[0].protocol else {
        return Err("fixture's first phase is not static".into());
    };
    let windows = cfg.windows();
    let radius_deg = (cfg
        .points
        .iter()
        .map(|p| p.radius / p.position.norm())
        .fold(0.0, f64::max))
    .asin()
    .to_degrees();
    let amplitude = 20.0;
    let dt = 14;
    let duration = 3 * dt;
    ensure!(
        amplitude > radius_deg,
        "amplitude must exceed the target radius"
    );
    let mut parts = Vec::new();
    for n in [1usize, 5, 17] {
        // Spread the excursions over the holds, at most two per hold, well
        // inside each window.
        let mut schedule: Vec<ScheduledExcursion> = (0..n)
            .map(|k| {
                let (s, _) = windows[k % windows.len()];
                ScheduledExcursion {
                    start_ms: s + 300 + 500 * (k / windows.len()) as u64,
                    duration_ms: duration,
                }
            })
            .collect();
        schedule.sort_by_key(|x| x.start_ms);
        let scheduled_total: u64 = schedule.iter().map(|x| x.duration_ms).sum();
        let model = GazerModel::Distracted {
            excursion_rate_per_s: 0.0,
            excursion_amplitude_deg: amplitude,
            excursion_duration_ms: duration,
            schedule: Some(schedule),
        };
        let session = simulate_session(&script, &model, &SimConfig::new(n as u64))
            .map_err(|e| e.to_string())?;
        let res = analyze_session(&session, &script).map_err(|e| e.to_string())?;
        let overall = res.static_gaze[0].overall;
        ensure!(
            overall.offset_count as usize == n,
            "N={n}: offset_count {}",
            overall.offset_count
        );
        let diff = overall.offset_duration_ms.abs_diff(scheduled_total);
        ensure!(
            diff <= dt * n as u64,
            "N={n}: offset {} ms vs scheduled {scheduled_total} ms",
            overall.offset_duration_ms
        );
        parts.push(format!(
            "N={n}: count {n}, {} ms vs {scheduled_total} ms",
            overall.offset_duration_ms
        ));
    }
    Ok(parts.join("; "))
}

// 5

fn sweep_session(omega_deg_per_s: f64, frames: usize) -> SessionRecord {
    let dt = 14u64;
    let axis = UnitDir::new(Vec3::new(0.0, 1.0, 0.0)).unwrap();
    let frames: Vec<GazeFrame> = (0..frames as u64)
        .map(|k| {
            let t = k * dt;
            let angle = (omega_deg_per_s * t as f64 / 1000.0).to_radians();
            GazeFrame {
                t_ms: t,
                head: HeadPose::default(),
                gaze_local: UnitDir::FORWARD.rotated(axis, angle),
                left_open: true,
                right_open: true,
            }
        })
        .collect();
    let end = frames.last().unwrap().t_ms + dt;
    SessionRecord {
        meta: SessionMeta {
            name: "sweep".into(),
            device: "constructed".into(),
            ..SessionMeta::default()
        },
        frames,
        phases: vec![PhaseDescriptor {
            phase_id: "sweep".into(),
            kind: PhaseKind::DynamicGaze,
            start_ms: 0,
            end_ms: end,
            config_ref: "sweep".into(),
        }],
        events: Vec::new(),
    }
}

fn sweep_kinematics() -> Outcome {
    let mut parts = Vec::new();
    for omega in [30.0, 100.0, 300.0] {
        // Keep the sweep under a half turn.
        let n = ((170.0 / omega) * 1000.0 / 14.0) as usize;
        let s = sweep_session(omega, n);
        s.validate().map_err(|e| e.to_string())?;
        let speeds = speed_series(&s.frames, s.meta.frame_dt_ms);
        ensure!(
            speeds.len() == n - 1,
            "{omega}: {} samples for {n} frames",
            speeds.len()
        );
        let worst = speeds
            .iter()
            .map(|x| ((x.speed_deg_per_s - omega) / omega).abs())
            .fold(0.0, f64::max);
        ensure!(worst <= 1e-6, "{omega} deg/s: relative error {worst:e}");
        parts.push(format!(
            "{omega} deg/s: {} samples, max rel err {worst:.1e}",
            speeds.len()
        ));
    }
    Ok(parts.join("; "))
}

// 6

fn path_geometry() -> Outcome {
    let k = QUARTER_CIRCLE_KAPPA;
    let arc = PathSegment::CubicBezier {
        p0: Vec3::new(1.0, 0.0, 2.0),
        c0: Vec3::new(1.0, k, 2.0),
        c1: Vec3::new(k, 1.0, 2.0),
        p1: Vec3::new(0.0, 1.0, 2.0),
    };
    let quarter = Path::new(vec![arc]).map_err(|e| e.to_string())?;
    let table = build_arc_length_table(&quarter, 256).map_err(|e| e.to_string())?;
    let rel = (table.total_length() - FRAC_PI_2).abs() / FRAC_PI_2;
    ensure!(
        rel <= 0.002,
        "quarter circle length {} (rel err {rel:e})",
        table.total_length()
    );

    // Line, quarter circle, line.
    let path = Path::new(vec![
        PathSegment::Line {
            p0: Vec3::new(1.0, -1.0, 2.0),
            p1: Vec3::new(1.0, 0.0, 2.0),
        },
        arc,
        PathSegment::Line {
            p0: Vec3::new(0.0, 1.0, 2.0),
            p1: Vec3::new(-1.0, 1.0, 2.0),
        },
    ])
    .map_err(|e| e.to_string())?;
    let table = build_arc_length_table(&path, 256).map_err(|e| e.to_string())?;
    let joints = table.segment_offsets()[1..].to_vec();
    let step = 0.3 * 0.014;
    let steps = (table.total_length() / step) as usize;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut prev = position_at_distance(&path, &table, 0.0).map_err(|e| e.to_string())?;
    for i in 1..=steps {
        let (s0, s1) = ((i - 1) as f64 * step, i as f64 * step);
        let cur = position_at_distance(&path, &table, s1).map_err(|e| e.to_string())?;
        if !joints.iter().any(|&j| s0 <= j && j <= s1) {
            worst = worst.max(((cur - prev).norm() - step).abs() / step);
            checked += 1;
        }
        prev = cur;
    }
    ensure!(worst <= 0.005, "chord relative error {worst:e}");
    Ok(format!(
        "length rel err {rel:.1e}; {checked} chords, max rel err {worst:.1e}"
    ))
}

// 7

fn zone_grid() -> Outcome {
    // Independent oracle in integer arithmetic: u = i/100 < 1/3 iff 3i < 100.
    let band = |i: u32| {
        if 3 * i < 100 {
            0
        } else if 3 * i > 200 {
            2
        } else {
            1
        }
    };
    let names = [
        ["BottomLeft", "Bottom", "BottomRight"],
        ["Left", "Center", "Right"],
        ["TopLeft", "Top", "TopRight"],
    ];
    let mut agree = 0;
    for i in 0..=100u32 {
        for j in 0..=100u32 {
            let z = classify_zone(ScreenPoint::new(i as f64 / 100.0, j as f64 / 100.0))
                .map_err(|e| e.to_string())?;
            let want = names[band(j)][band(i)];
            ensure!(z.as_str() == want, "({i}, {j}): {z} vs oracle {want}");
            agree += 1;
        }
    }
    Ok(format!("{agree}/10201 agree"))
}

// 8

/// Single pass over the boolean stream: count off-target runs after the
/// first on-target sample; an all-off stream is entirely offset time.
fn offset_oracle(on: &[bool], dt: u64) -> (u32, u64) {
    if !on.contains(&true) {
        return (0, on.len() as u64 * dt);
    }
    let (mut count, mut dur, mut seen, mut in_run) = (0, 0, false, false);
    for &b in on {
        if b {
            seen = true;
            in_run = false;
        } else if seen {
            if !in_run {
                count += 1;
            }
            in_run = true;
            dur += dt;
        }
    }
    (count, dur)
}

fn boolean_fixture(on: &[bool]) -> (vrgaze::script::TestScript, SessionRecord) {
    let dt = 14u64;
    let n = on.len() as u64;
    let script = parse_script(
        &serde_json::to_vec(&json!({
            "schema_version": 1, "name": "hold",
            "phases": [{"phase_id": "hold", "kind": "static_gaze", "duration_ms": n * dt,
                        "config": {"points": [{"position": [0.0, 0.0, 2.0], "radius": 0.05, "hold_ms": n * dt, "zone": "Center"}]}}]
        }))
        .unwrap(),
    )
    .unwrap();
    let away = UnitDir::FORWARD.rotated(
        UnitDir::new(Vec3::new(1.0, 0.0, 0.0)).unwrap(),
        10f64.to_radians(),
    );
    let frames = on
        .iter()
        .enumerate()
        .map(|(k, &b)| GazeFrame {
            t_ms: k as u64 * dt,
            head: HeadPose::default(),
            gaze_local: if b { UnitDir::FORWARD } else { away },
            left_open: true,
            right_open: true,
        })
        .collect();
    let session = SessionRecord {
        meta: SessionMeta {
            name: "oracle".into(),
            device: "constructed".into(),
            ..SessionMeta::default()
        },
        frames,
        phases: script.phase_layout(),
        events: Vec::new(),
    };
    (script, session)
}

fn boolean_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut total_offsets = 0;
    for case in 0..500 {
        let len = rng.gen_range(1..=120);
        let p_on: f64 = rng.gen_range(0.05..0.95);
        let on: Vec<bool> = (0..len).map(|_| rng.gen_bool(p_on)).collect();
        let (script, session) = boolean_fixture(&on);
        let res = analyze_session(&session, &script).map_err(|e| e.to_string())?;
        let got = res.static_gaze[0].overall;
        let (count, dur) = offset_oracle(&on, 14);
        ensure!(
            got.offset_count == count && got.offset_duration_ms == dur,
            "case {case}: analyzer ({}, {}) vs oracle ({count}, {dur})",
            got.offset_count,
            got.offset_duration_ms
        );
        total_offsets += count;
    }
    Ok(format!(
        "500/500 fixtures agree ({total_offsets} offsets in total)"
    ))
}

// 9

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

fn random_session(rng: &mut ChaCha8Rng) -> SessionRecord {
    let n = rng.gen_range(1..40);
    let mut t = 0u64;
    let frames: Vec<GazeFrame> = (0..n)
        .map(|_| {
            t += rng.gen_range(1..60);
            let q = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0f64),
            ];
            let qn = q.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
            let rotation = Quat::from_near_unit(q[0] / qn, q[1] / qn, q[2] / qn, q[3] / qn)
                .unwrap_or(Quat::IDENTITY);
            GazeFrame {
                t_ms: t,
                head: HeadPose::new(
                    Vec3::new(
                        rng.gen_range(-2.0..2.0),
                        rng.gen_range(0.0..2.0),
                        rng.gen_range(-2.0..2.0),
                    ),
                    rotation,
                ),
                gaze_local: UnitDir::from_near_unit(random_unit(rng)).unwrap(),
                left_open: rng.gen_bool(0.9),
                right_open: rng.gen_bool(0.9),
            }
        })
        .collect();
    let last = frames.last().unwrap().t_ms;
    let kinds = [
        PhaseKind::StaticGaze,
        PhaseKind::DynamicGaze,
        PhaseKind::Saccadic,
    ];
    let mut phases = Vec::new();
    let mut start = 0;
    for i in 0..rng.gen_range(1..4) {
        let end = start + rng.gen_range(1..=last.max(1));
        phases.push(PhaseDescriptor {
            phase_id: format!("p{i}"),
            kind: kinds[i % 3],
            start_ms: start,
            end_ms: end,
            config_ref: format!("p{i}"),
        });
        start = end;
    }
    let events = (0..rng.gen_range(0..4))
        .map(|i| StimulusEvent {
            event_id: format!("p0/e{i}"),
            onset_ms: rng.gen_range(0..=last),
            target_position: Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 2.0),
            zone: ScreenZone::ALL[rng.gen_range(0..9)],
        })
        .collect();
    SessionRecord {
        meta: SessionMeta {
            name: format!("subject {}", rng.gen::<u16>()),
            age: rng.gen_range(5..90),
            gender: "unspecified".into(),
            device: "random".into(),
            frame_dt_ms: 14.0,
            seed: rng.gen_bool(0.5).then(|| rng.gen()),
        },
        frames,
        phases,
        events,
    }
}

const JSON_BYTES: &[u8] = b"{}[]\":,-0123456789.eE ntfu\\";

fn mutate(rng: &mut ChaCha8Rng, src: &[u8]) -> Vec<u8> {
    let mut b = src.to_vec();
    for _ in 0..rng.gen_range(1..4) {
        if b.is_empty() {
            b.push(b'{');
        }
        let i = rng.gen_range(0..b.len());
        match rng.gen_range(0..7) {
            0 => b[i] ^= 1 << rng.gen_range(0..8),
            1 => b[i] = rng.gen(),
            2 => {
                let j = rng.gen_range(i..=b.len().min(i + 16));
                b.drain(i..j);
            }
            3 => b.insert(i, JSON_BYTES[rng.gen_range(0..JSON_BYTES.len())]),
            4 => {
                let j = rng.gen_range(i..=b.len().min(i + 32));
                let chunk = b[i..j].to_vec();
                let at = rng.gen_range(0..=b.len());
                b.splice(at..at, chunk);
            }
            5 => b.truncate(i),
            _ => {
                if b[i].is_ascii_digit() {
                    b[i] = b"0123456789"[rng.gen_range(0..10)];
                }
            }
        }
    }
    b
}

fn round_trip() -> Outcome {
    let mut stable = 0;
    for rel in [
        "sessions/minimal.json",
        "sessions/ideal_saccades.json",
        "sessions/realistic_calibration.json",
    ] {
        let bytes = read_fixture(rel);
        let s = parse_session(&bytes).map_err(|e| format!("{rel}: {e}"))?;
        ensure!(serialize_session(&s) == bytes, "{rel} is not byte-stable");
        stable += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..100 {
        let s = random_session(&mut rng);
        s.validate()
            .map_err(|e| format!("generator produced an invalid session: {e}"))?;
        let bytes = serialize_session(&s);
        let back = parse_session(&bytes).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(back == s, "case {case}: structure changed");
        ensure!(
            serialize_session(&back) == bytes,
            "case {case}: second serialization differs"
        );
    }

    let seeds = [
        read_fixture("sessions/minimal.json"),
        serialize_session(&random_session(&mut rng)),
    ];
    let (mut accepted, mut rejected) = (0, 0);
    for case in 0..10_000 {
        let m = mutate(&mut rng, &seeds[case % 2]);
        match catch_unwind(AssertUnwindSafe(|| parse_session(&m))) {
            Ok(Ok(_)) => accepted += 1,
            Ok(Err(_)) => rejected += 1,
            Err(_) => return Err(format!("parser panicked on mutation case {case}")),
        }
    }
    Ok(format!("{stable} fixtures byte-stable; 100/100 random sessions identical; fuzz 10000 cases: {accepted} accepted, {rejected} rejected, 0 crashes"))
}

// 10

fn run_all(dir: &std::path::Path, seed: &str) -> Result<(), String> {
    let f = fixtures();
    let code = cli::run([
        "vrgaze".as_ref(),
        "run-all".as_ref(),
        "--script".as_ref(),
        f.join("scripts/full_assessment.json").as_os_str(),
        "--model".as_ref(),
        f.join("models/realistic.json").as_os_str(),
        "--seed".as_ref(),
        seed.as_ref(),
        "--out-dir".as_ref(),
        dir.as_os_str(),
        "--responses".as_ref(),
        f.join("questionnaire/pilot_responses.json").as_os_str(),
    ] as [&std::ffi::OsStr; 12]);
    ensure!(code == 0, "run-all exited with {code}");
    Ok(())
}

/// Compares one summary value against the analyzer's value at the same
/// path of the results file.
fn same(summary: &Value, skey: &str, results: &Value, rkey: &str) -> Result<(), String> {
    let a = lookup(summary, skey).ok_or_else(|| format!("summary lacks {skey}"))?;
    let b = lookup(results, rkey).ok_or_else(|| format!("results lack {rkey}"))?;
    ensure!(a == b, "{skey} = {a} but analyzer {rkey} = {b}");
    Ok(())
}

fn report_consistency() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_all(&a, "2024")?;
    run_all(&b, "2024")?;
    let files = [
        "session.json",
        "results.json",
        "report.html",
        "summary.json",
        "scores.json",
    ];
    for f in files {
        let (x, y) = (
            std::fs::read(a.join(f)).map_err(|e| e.to_string())?,
            std::fs::read(b.join(f)).map_err(|e| e.to_string())?,
        );
        ensure!(x == y, "{f} differs between runs");
    }

    let results_bytes = std::fs::read(a.join("results.json")).unwrap();
    let typed: ResultsFile =
        vrgaze::canonical::parse_json(&results_bytes).map_err(|e| e.to_string())?;
    let results: Value = serde_json::from_slice(&results_bytes).unwrap();
    let summary: Value =
        serde_json::from_slice(&std::fs::read(a.join("summary.json")).unwrap()).unwrap();
    let mut compared = 0;
    let mut cmp = |s: String, r: String| -> Result<(), String> {
        compared += 1;
        same(&summary, &s, &results, &r)
    };
    let ProtocolResults {
        static_gaze,
        dynamic_gaze,
        saccadic,
    } = &typed.protocols;
    let stat_keys = [
        "accuracy",
        "offset_count",
        "offset_duration_ms",
        "total_duration_ms",
    ];
    for (i, p) in static_gaze.iter().enumerate() {
        let (sp, rp) = (
            format!("static_gaze.{}", p.phase_id),
            format!("protocols.static_gaze.{i}"),
        );
        for k in stat_keys {
            cmp(format!("{sp}.overall.{k}"), format!("{rp}.overall.{k}"))?;
        }
        for z in p.zones.keys() {
            for k in stat_keys {
                cmp(
                    format!("{sp}.zones.{z}.{k}"),
                    format!("{rp}.zones.{z}.stats.{k}"),
                )?;
            }
            cmp(
                format!("{sp}.zones.{z}.mean_reaction_time_ms"),
                format!("{rp}.zones.{z}.mean_reaction_time_ms"),
            )?;
        }
    }
    for (i, p) in dynamic_gaze.iter().enumerate() {
        let (sp, rp) = (
            format!("dynamic_gaze.{}", p.phase_id),
            format!("protocols.dynamic_gaze.{i}"),
        );
        for k in stat_keys {
            cmp(format!("{sp}.overall.{k}"), format!("{rp}.overall.{k}"))?;
        }
        for z in p.zones.keys() {
            for k in stat_keys {
                cmp(format!("{sp}.zones.{z}.{k}"), format!("{rp}.zones.{z}.{k}"))?;
            }
        }
        cmp(format!("{sp}.mean_fit"), format!("{rp}.mean_fit"))?;
        for (j, _) in p.fit_series.iter().enumerate() {
            cmp(
                format!("{sp}.fit_series.{j}.0"),
                format!("{rp}.fit_series.{j}.t_ms"),
            )?;
            cmp(
                format!("{sp}.fit_series.{j}.1"),
                format!("{rp}.fit_series.{j}.fit"),
            )?;
        }
    }
    for (i, p) in saccadic.iter().enumerate() {
        let (sp, rp) = (
            format!("saccadic.{}", p.phase_id),
            format!("protocols.saccadic.{i}"),
        );
        for (j, _) in p.entries.iter().enumerate() {
            for k in [
                "event_id",
                "onset_ms",
                "zone",
                "reaction_time_ms",
                "timed_out",
            ] {
                cmp(
                    format!("{sp}.entries.{j}.{k}"),
                    format!("{rp}.entries.{j}.{k}"),
                )?;
            }
        }
        for z in p.zone_mean_rt_ms.keys() {
            cmp(
                format!("{sp}.zone_mean_rt_ms.{z}"),
                format!("{rp}.zone_mean_rt_ms.{z}"),
            )?;
        }
        cmp(
            format!("{sp}.timed_out_count"),
            format!("{rp}.timed_out_count"),
        )?;
    }
    for k in [
        "static_score",
        "dynamic_score",
        "saccadic_score",
        "total",
        "grade",
    ] {
        cmp(format!("overall.{k}"), format!("evaluation.{k}"))?;
    }
    cmp("general.overall_score".into(), "evaluation.total".into())?;

    // Every printed number equals its summary value at printed precision.
    let html = std::fs::read_to_string(a.join("report.html")).unwrap();
    let doc = roxmltree::Document::parse(html.trim_start_matches("<!DOCTYPE html>\n"))
        .map_err(|e| format!("report is not well-formed: {e}"))?;
    let mut printed = 0;
    for node in doc
        .descendants()
        .filter(|n| n.attribute("data-key").is_some())
    {
        let key = node.attribute("data-key").unwrap();
        let fmt = node
            .attribute("data-fmt")
            .ok_or_else(|| format!("{key} lacks data-fmt"))?;
        let v = lookup(&summary, key)
            .ok_or_else(|| format!("printed key {key} missing from summary"))?;
        let want =
            format_value(v, fmt).ok_or_else(|| format!("{key}: {v} cannot be printed as {fmt}"))?;
        let text = node.text().unwrap_or("");
        ensure!(
            text == want,
            "{key}: printed {text:?}, summary renders {want:?}"
        );
        printed += 1;
    }
    Ok(format!("5 outputs byte-identical; {compared} summary values match the analyzer; {printed} printed numbers match the summary"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("questionnaire means reproduce the pilot table", table1),
        ("ideal gazer scores perfectly", ideal_gazer),
        ("delayed gazer latency is recovered", latency_recovery),
        ("scheduled excursions are counted exactly", offset_exactness),
        ("constant sweeps yield constant speed", sweep_kinematics),
        ("path length and constant-speed chords", path_geometry),
        ("zone grid matches the thirds oracle", zone_grid),
        ("offsets match the brute-force oracle", boolean_oracle),
        ("session round-trip and mutation fuzz", round_trip),
        (
            "run-all is deterministic and consistent",
            report_consistency,
        ),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(f).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail}) [{ms} ms]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{ms} ms]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
