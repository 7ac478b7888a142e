//! Static HTML assessment report with inline SVG charts, plus a summary
//! JSON holding every number the report shows.
//!
//! Every printed number is wrapped in an element carrying `data-key` (a
//! dotted path into the summary JSON) and `data-fmt` (`int`, `f0` or `f2`),
//! so the two outputs can be cross-checked mechanically. Colors: speed
//! traces green (`#2e9e44`), stimulus markers red (`#d62728`), bars blue
//! (`#3b6fb6`), pursuit fit orange (`#e07b00`).

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::canonical::to_canonical_string;
use crate::error::{Error, Result};
use crate::geometry::ScreenZone;
use crate::metrics::{speed_series, OverallEvaluation};
use crate::protocols::{GazeHoldStats, ProtocolResults};
use crate::questionnaire::ScoreRow;
use crate::session::{frames_in, SessionRecord};

const SPEED_COLOR: &str = "#2e9e44";
const STIMULUS_COLOR: &str = "#d62728";
const BAR_COLOR: &str = "#3b6fb6";
const FIT_COLOR: &str = "#e07b00";

const CHART_W: f64 = 640.0;
const CHART_H: f64 = 240.0;
const MARGIN: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportDocument {
    pub html: String,
    /// Canonical JSON.
    pub summary: String,
}

#[derive(Clone, Copy)]
enum Fmt {
    Int,
    F0,
    F2,
}

impl Fmt {
    fn name(self) -> &'static str {
        match self {
            Fmt::Int => "int",
            Fmt::F0 => "f0",
            Fmt::F2 => "f2",
        }
    }
}

/// Renders a summary value the way the report prints it.
pub fn format_value(v: &Value, fmt: &str) -> Option<String> {
    match fmt {
        "int" => v
            .as_u64()
            .map(|n| n.to_string())
            .or_else(|| v.as_i64().map(|n| n.to_string())),
        "f0" => v.as_f64().map(|x| format!("{x:.0}")),
        "f2" => v.as_f64().map(|x| format!("{x:.2}")),
        _ => None,
    }
}

/// Looks up a dotted path (`a.b.3.c`) in a JSON value.
pub fn lookup<'a>(root: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(root, |v, part| match v {
        Value::Object(m) => m.get(part),
        Value::Array(a) => part.parse::<usize>().ok().and_then(|i| a.get(i)),
        _ => None,
    })
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

/// Coordinates inside SVG markup; fixed precision keeps output stable.
fn coord(x: f64) -> String {
    format!("{x:.2}")
}

struct Builder {
    summary: Value,
}

impl Builder {
    fn set(&mut self, path: &str, v: Value) {
        let mut cur = &mut self.summary;
        let parts: Vec<&str> = path.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let last = i + 1 == parts.len();
            let map = cur.as_object_mut().expect("summary paths traverse objects");
            if last {
                map.insert(part.to_string(), v);
                return;
            }
            cur = map
                .entry(part.to_string())
                .or_insert_with(|| Value::Object(Map::new()));
        }
    }

    /// Stores `v` at `key` and returns the markup that prints it.
    fn num(&mut self, tag: &str, key: &str, v: Value, fmt: Fmt, attrs: &str) -> String {
        let text = format_value(&v, fmt.name()).expect("value matches its format");
        self.set(key, v);
        format!(
            "<{tag}{attrs} data-key=\"{}\" data-fmt=\"{}\">{}</{tag}>",
            escape(key),
            fmt.name(),
            escape(&text)
        )
    }

    fn cell(&mut self, key: &str, v: Value, fmt: Fmt) -> String {
        format!(
            "<td>{}</td>",
            self.num("span", key, v, fmt, " class=\"num\"")
        )
    }
}

fn stats_json(s: &GazeHoldStats) -> [(&'static str, Value, Fmt); 4] {
    [
        ("accuracy", json!(s.accuracy), Fmt::F2),
        ("offset_count", json!(s.offset_count), Fmt::Int),
        ("offset_duration_ms", json!(s.offset_duration_ms), Fmt::Int),
        ("total_duration_ms", json!(s.total_duration_ms), Fmt::Int),
    ]
}

const STATS_HEADER: &str =
    "<tr><th>Area</th><th>Accuracy</th><th>Offset count</th><th>Offset time (ms)</th><th>Total time (ms)</th>";

struct Bar {
    label: String,
    key: String,
    value: Value,
    fmt: Fmt,
}

fn bar_chart(b: &mut Builder, title: &str, bars: Vec<Bar>, fixed_max: Option<f64>) -> String {
    let mut svg = String::new();
    let max = fixed_max
        .unwrap_or_else(|| {
            bars.iter()
                .filter_map(|x| x.value.as_f64())
                .fold(0.0, f64::max)
        })
        .max(1e-9);
    let n = bars.len().max(1) as f64;
    let plot_w = CHART_W - 2.0 * MARGIN;
    let plot_h = CHART_H - 2.0 * MARGIN;
    let slot = plot_w / n;
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" role=\"img\"><title>{t}</title>",
        w = CHART_W,
        h = CHART_H,
        t = escape(title)
    );
    let _ = write!(
        svg,
        "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#444\"/>",
        x0 = MARGIN,
        x1 = CHART_W - MARGIN,
        y = CHART_H - MARGIN
    );
    for (i, bar) in bars.into_iter().enumerate() {
        let v = bar.value.as_f64().unwrap_or(0.0);
        let h = plot_h * (v / max).clamp(0.0, 1.0);
        let x = MARGIN + slot * i as f64 + slot * 0.15;
        let y = CHART_H - MARGIN - h;
        let _ = write!(
            svg,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{BAR_COLOR}\"/>",
            coord(x),
            coord(y),
            coord(slot * 0.7),
            coord(h)
        );
        let cx = coord(x + slot * 0.35);
        let attrs = format!(
            " x=\"{cx}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\"",
            coord(y - 4.0)
        );
        svg.push_str(&b.num("text", &bar.key, bar.value, bar.fmt, &attrs));
        let _ = write!(
            svg,
            "<text x=\"{cx}\" y=\"{}\" text-anchor=\"middle\" font-size=\"10\">{}</text>",
            coord(CHART_H - MARGIN + 14.0),
            escape(&bar.label)
        );
    }
    svg.push_str("</svg>");
    svg
}

struct Series<'a> {
    points: &'a [(f64, f64)],
    color: &'a str,
}

/// Line chart over `[x0, x1] × [0, y_max]` with optional vertical markers.
fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    x_range: (f64, f64),
    y_max: f64,
    series: &[Series<'_>],
    markers: &[f64],
) -> String {
    let (x0, x1) = x_range;
    let span = (x1 - x0).max(1e-9);
    let y_max = y_max.max(1e-9);
    let plot_w = CHART_W - 2.0 * MARGIN;
    let plot_h = CHART_H - 2.0 * MARGIN;
    let px = |x: f64| MARGIN + plot_w * ((x - x0) / span).clamp(0.0, 1.0);
    let py = |y: f64| CHART_H - MARGIN - plot_h * (y / y_max).clamp(0.0, 1.0);
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" role=\"img\"><title>{t}</title>",
        w = CHART_W,
        h = CHART_H,
        t = escape(title)
    );
    let _ = write!(
        svg,
        "<polyline points=\"{m},{top} {m},{b} {r},{b}\" fill=\"none\" stroke=\"#444\"/>",
        m = MARGIN,
        top = MARGIN,
        b = CHART_H - MARGIN,
        r = CHART_W - MARGIN
    );
    for s in series {
        if s.points.is_empty() {
            continue;
        }
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", coord(px(x)), coord(py(y))))
            .collect();
        let _ = write!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            pts.join(" "),
            s.color
        );
    }
    for &m in markers {
        let _ = write!(
            svg,
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{STIMULUS_COLOR}\"/>",
            coord(px(m)),
            coord(CHART_H - MARGIN)
        );
    }
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{}</text>",
        coord(CHART_W / 2.0),
        coord(CHART_H - 8.0),
        escape(x_label)
    );
    let _ = write!(
        svg,
        "<text x=\"4\" y=\"{}\" font-size=\"11\">{}</text>",
        coord(MARGIN - 8.0),
        escape(y_label)
    );
    svg.push_str("</svg>");
    svg
}

fn zone_bars(
    b: &mut Builder,
    prefix: &str,
    zones: &[(ScreenZone, GazeHoldStats)],
) -> (String, String) {
    let acc: Vec<Bar> = zones
        .iter()
        .map(|(z, s)| Bar {
            label: z.to_string(),
            key: format!("{prefix}.{z}.accuracy"),
            value: json!(s.accuracy),
            fmt: Fmt::F2,
        })
        .collect();
    let cnt: Vec<Bar> = zones
        .iter()
        .map(|(z, s)| Bar {
            label: z.to_string(),
            key: format!("{prefix}.{z}.offset_count"),
            value: json!(s.offset_count),
            fmt: Fmt::Int,
        })
        .collect();
    (
        bar_chart(b, "Accuracy by area", acc, Some(1.0)),
        bar_chart(b, "Offset count by area", cnt, None),
    )
}

const STYLE: &str = "body{font-family:sans-serif;margin:24px;color:#222}table{border-collapse:collapse;margin:8px 0}\
td,th{border:1px solid #bbb;padding:4px 8px;text-align:right}th{background:#eee}\
section{margin-bottom:32px}.na{color:#888;font-style:italic}";

/// Builds the report and its summary. `scores` are one participant's
/// questionnaire means, if available.
pub fn generate_report(
    session: &SessionRecord,
    results: &ProtocolResults,
    evaluation: Option<&OverallEvaluation>,
    scores: Option<&ScoreRow>,
) -> Result<ReportDocument> {
    for id in results
        .static_gaze
        .iter()
        .map(|p| &p.phase_id)
        .chain(results.dynamic_gaze.iter().map(|p| &p.phase_id))
        .chain(results.saccadic.iter().map(|p| &p.phase_id))
    {
        if session.phase(id).is_err() {
            return Err(Error::validation(
                format!("results.{id}"),
                format!("phase {id:?} is not in the session"),
            ));
        }
    }

    let mut b = Builder { summary: json!({}) };
    let mut h = String::new();
    h.push_str("<!DOCTYPE html>\n<html xmlns=\"http://www.w3.org/1999/xhtml\" lang=\"en\"><head><meta charset=\"utf-8\"/>");
    let _ = write!(
        h,
        "<title>Eye-tracking assessment: {}</title><style>{STYLE}</style></head><body>",
        escape(&session.meta.name)
    );

    // General information
    h.push_str("<section id=\"general\"><h1>General information</h1><table>");
    let _ = write!(
        h,
        "<tr><th>Name</th><td>{}</td></tr>",
        escape(&session.meta.name)
    );
    b.set("general.name", json!(session.meta.name));
    let _ = write!(
        h,
        "<tr><th>Age</th>{}</tr>",
        b.cell("general.age", json!(session.meta.age), Fmt::Int)
    );
    let _ = write!(
        h,
        "<tr><th>Gender</th><td>{}</td></tr>",
        escape(&session.meta.gender)
    );
    b.set("general.gender", json!(session.meta.gender));
    match evaluation {
        Some(e) => {
            let _ = write!(
                h,
                "<tr><th>Overall test score</th>{}</tr>",
                b.cell("general.overall_score", json!(e.total), Fmt::F2)
            );
            let _ = write!(h, "<tr><th>Grade</th><td>{}</td></tr>", e.grade.as_str());
            b.set("general.grade", json!(e.grade.as_str()));
        }
        None => {
            h.push_str("<tr><th>Overall test score</th><td class=\"na\">not available</td></tr>")
        }
    }
    h.push_str("</table></section>");

    // Static gaze
    h.push_str("<section id=\"static\"><h1>Static gaze test</h1>");
    if results.static_gaze.is_empty() {
        h.push_str("<p class=\"na\">not tested</p>");
    }
    for p in &results.static_gaze {
        let prefix = format!("static_gaze.{}", p.phase_id);
        let _ = write!(
            h,
            "<h2>Phase {}</h2><table>{STATS_HEADER}<th>Mean reaction time (ms)</th></tr>",
            escape(&p.phase_id)
        );
        let _ = write!(h, "<tr><th>All</th>");
        for (k, v, f) in stats_json(&p.overall) {
            h.push_str(&b.cell(&format!("{prefix}.overall.{k}"), v, f));
        }
        h.push_str("<td></td></tr>");
        for (z, zr) in &p.zones {
            let _ = write!(h, "<tr><th>{z}</th>");
            for (k, v, f) in stats_json(&zr.stats) {
                h.push_str(&b.cell(&format!("{prefix}.zones.{z}.{k}"), v, f));
            }
            match zr.mean_reaction_time_ms {
                Some(rt) => h.push_str(&b.cell(
                    &format!("{prefix}.zones.{z}.mean_reaction_time_ms"),
                    json!(rt),
                    Fmt::F0,
                )),
                None => {
                    b.set(
                        &format!("{prefix}.zones.{z}.mean_reaction_time_ms"),
                        Value::Null,
                    );
                    h.push_str("<td class=\"na\">n/a</td>");
                }
            }
            h.push_str("</tr>");
        }
        h.push_str("</table>");
        let zones: Vec<_> = p.zones.iter().map(|(z, r)| (*z, r.stats)).collect();
        let (acc, cnt) = zone_bars(&mut b, &format!("{prefix}.zones"), &zones);
        let _ = write!(h, "<div class=\"charts\">{acc}{cnt}</div>");
    }
    h.push_str("</section>");

    // Dynamic gaze
    h.push_str("<section id=\"dynamic\"><h1>Dynamic gaze test</h1>");
    if results.dynamic_gaze.is_empty() {
        h.push_str("<p class=\"na\">not tested</p>");
    }
    for p in &results.dynamic_gaze {
        let prefix = format!("dynamic_gaze.{}", p.phase_id);
        let _ = write!(
            h,
            "<h2>Phase {}</h2><table>{STATS_HEADER}</tr><tr><th>All</th>",
            escape(&p.phase_id)
        );
        for (k, v, f) in stats_json(&p.overall) {
            h.push_str(&b.cell(&format!("{prefix}.overall.{k}"), v, f));
        }
        h.push_str("</tr>");
        for (z, s) in &p.zones {
            let _ = write!(h, "<tr><th>{z}</th>");
            for (k, v, f) in stats_json(s) {
                h.push_str(&b.cell(&format!("{prefix}.zones.{z}.{k}"), v, f));
            }
            h.push_str("</tr>");
        }
        h.push_str("</table>");
        let _ = write!(
            h,
            "<p>Mean fitting degree: {}</p>",
            b.num(
                "span",
                &format!("{prefix}.mean_fit"),
                json!(p.mean_fit),
                Fmt::F2,
                " class=\"num\""
            )
        );
        let pts: Vec<(f64, f64)> = p
            .fit_series
            .iter()
            .map(|s| (s.t_ms as f64, s.fit))
            .collect();
        b.set(
            &format!("{prefix}.fit_series"),
            json!(p
                .fit_series
                .iter()
                .map(|s| json!([s.t_ms, s.fit]))
                .collect::<Vec<_>>()),
        );
        let range = (
            pts.first().map_or(0.0, |p| p.0),
            pts.last().map_or(1.0, |p| p.0),
        );
        h.push_str(&line_chart(
            "Fitting degree",
            "time",
            "fit",
            range,
            1.0,
            &[Series {
                points: &pts,
                color: FIT_COLOR,
            }],
            &[],
        ));
        let zones: Vec<_> = p.zones.iter().map(|(z, s)| (*z, *s)).collect();
        let (acc, cnt) = zone_bars(&mut b, &format!("{prefix}.zones"), &zones);
        let _ = write!(h, "<div class=\"charts\">{acc}{cnt}</div>");
    }
    h.push_str("</section>");

    // Saccadic
    h.push_str("<section id=\"saccadic\"><h1>Saccadic test</h1>");
    if results.saccadic.is_empty() {
        h.push_str("<p class=\"na\">not tested</p>");
    }
    for p in &results.saccadic {
        let prefix = format!("saccadic.{}", p.phase_id);
        let phase = session.phase(&p.phase_id)?;
        let frames = frames_in(&session.frames, phase.start_ms, phase.end_ms);
        let speeds = speed_series(frames, session.meta.frame_dt_ms);
        let pts: Vec<(f64, f64)> = speeds
            .iter()
            .map(|s| (s.t_ms as f64, s.speed_deg_per_s))
            .collect();
        b.set(
            &format!("{prefix}.speed_series"),
            json!(speeds
                .iter()
                .map(|s| json!([s.t_ms, s.speed_deg_per_s]))
                .collect::<Vec<_>>()),
        );
        let y_max = pts.iter().map(|p| p.1).fold(0.0, f64::max);
        let markers: Vec<f64> = p.entries.iter().map(|e| e.onset_ms as f64).collect();
        let _ = write!(h, "<h2>Phase {}</h2>", escape(&p.phase_id));
        h.push_str(&line_chart(
            "Eye movement speed and stimulation events",
            "time",
            "deg/s",
            (phase.start_ms as f64, phase.end_ms as f64),
            y_max,
            &[Series {
                points: &pts,
                color: SPEED_COLOR,
            }],
            &markers,
        ));
        h.push_str("<table><tr><th>Event</th><th>Area</th><th>Onset (ms)</th><th>Reaction time (ms)</th></tr>");
        for (i, e) in p.entries.iter().enumerate() {
            let ek = format!("{prefix}.entries.{i}");
            b.set(&format!("{ek}.event_id"), json!(e.event_id));
            b.set(&format!("{ek}.zone"), json!(e.zone.as_str()));
            b.set(&format!("{ek}.timed_out"), json!(e.timed_out));
            let _ = write!(h, "<tr><th>{}</th><td>{}</td>", escape(&e.event_id), e.zone);
            h.push_str(&b.cell(&format!("{ek}.onset_ms"), json!(e.onset_ms), Fmt::Int));
            match e.reaction_time_ms {
                Some(rt) => {
                    h.push_str(&b.cell(&format!("{ek}.reaction_time_ms"), json!(rt), Fmt::Int))
                }
                None => {
                    b.set(&format!("{ek}.reaction_time_ms"), Value::Null);
                    h.push_str("<td class=\"na\">timed out</td>");
                }
            }
            h.push_str("</tr>");
        }
        h.push_str("</table><table><tr><th>Area</th><th>Mean reaction time (ms)</th></tr>");
        for (z, rt) in &p.zone_mean_rt_ms {
            let _ = write!(
                h,
                "<tr><th>{z}</th>{}</tr>",
                b.cell(&format!("{prefix}.zone_mean_rt_ms.{z}"), json!(rt), Fmt::F0)
            );
        }
        h.push_str("</table>");
        let _ = write!(
            h,
            "<p>Timed out: {}</p>",
            b.num(
                "span",
                &format!("{prefix}.timed_out_count"),
                json!(p.timed_out_count),
                Fmt::Int,
                " class=\"num\""
            )
        );
    }
    h.push_str("</section>");

    // Overall
    h.push_str("<section id=\"overall\"><h1>Overall evaluation</h1>");
    match evaluation {
        Some(e) => {
            h.push_str("<table>");
            for (label, key, v) in [
                ("Static gaze", "static_score", e.static_score),
                ("Dynamic gaze", "dynamic_score", e.dynamic_score),
                ("Saccadic", "saccadic_score", e.saccadic_score),
            ] {
                match v {
                    Some(v) => {
                        let _ = write!(
                            h,
                            "<tr><th>{label}</th>{}</tr>",
                            b.cell(&format!("overall.{key}"), json!(v), Fmt::F2)
                        );
                    }
                    None => {
                        b.set(&format!("overall.{key}"), Value::Null);
                        let _ = write!(
                            h,
                            "<tr><th>{label}</th><td class=\"na\">not tested</td></tr>"
                        );
                    }
                }
            }
            let _ = write!(
                h,
                "<tr><th>Total</th>{}</tr>",
                b.cell("overall.total", json!(e.total), Fmt::F2)
            );
            let _ = write!(
                h,
                "<tr><th>Grade</th><td>{}</td></tr></table>",
                e.grade.as_str()
            );
            b.set("overall.grade", json!(e.grade.as_str()));
        }
        None => h.push_str("<p class=\"na\">not available</p>"),
    }
    if let Some(s) = scores {
        h.push_str("<h2>Engagement questionnaire</h2><table>");
        b.set("engagement.participant_id", json!(s.participant_id));
        for (label, key, v) in [
            ("Cognitive", "cognitive", s.cognitive),
            ("Behavioral", "behavioral", s.behavioral),
            ("Affective", "affective", s.affective),
        ] {
            let _ = write!(
                h,
                "<tr><th>{label}</th>{}</tr>",
                b.cell(&format!("engagement.{key}"), json!(v), Fmt::F2)
            );
        }
        h.push_str("</table>");
    }
    h.push_str("</section></body></html>\n");

    Ok(ReportDocument {
        html: h,
        summary: to_canonical_string(&b.summary),
    })
}
