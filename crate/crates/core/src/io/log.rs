//! Probabilistic logs as JSON (all cases in one document) or CSV (one
//! activity-by-event matrix per case).

use std::collections::BTreeSet;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::petri::ActivityId;
use crate::problog::{
    validate_log, DetTrace, LogViolation, ProbEvent, ProbEventLog, ProbTrace, SUM_TOLERANCE,
};

pub const PROBLOG_VERSION: &str = "probalign-problog/1";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadOptions {
    /// Rescale each event to sum 1 instead of rejecting sum violations.
    pub renormalize: bool,
    pub tolerance: f64,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions { renormalize: false, tolerance: SUM_TOLERANCE }
    }
}

/// Event object that keeps key order and refuses repeated keys.
struct RawEvent(Vec<(String, f64)>);

impl<'de> Deserialize<'de> for RawEvent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RawEvent;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping activities to probabilities")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<RawEvent, A::Error> {
                let mut out: Vec<(String, f64)> = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, f64>()? {
                    if out.iter().any(|(seen, _)| *seen == k) {
                        return Err(serde::de::Error::custom(format!("activity `{k}` listed twice")));
                    }
                    out.push((k, v));
                }
                Ok(RawEvent(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrace {
    case_id: String,
    events: Vec<RawEvent>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLog {
    version: String,
    traces: Vec<RawTrace>,
}

#[derive(Serialize)]
struct OutTrace<'a> {
    case_id: &'a str,
    events: Vec<std::collections::BTreeMap<&'a str, f64>>,
}

#[derive(Serialize)]
struct OutLog<'a> {
    version: &'static str,
    traces: Vec<OutTrace<'a>>,
}

fn build_event(
    case_id: &str,
    index: usize,
    raw: Vec<(String, f64)>,
    bad: &mut Vec<LogViolation>,
) -> Result<Option<ProbEvent>> {
    let mut candidates = Vec::with_capacity(raw.len());
    let mut ok = true;
    for (name, p) in raw {
        let activity = ActivityId::new(name)?;
        if !(0.0..=1.0).contains(&p) {
            bad.push(LogViolation::ProbabilityOutOfRange {
                case_id: case_id.to_string(),
                event: index,
                activity,
                probability: p,
            });
            ok = false;
        } else {
            candidates.push((activity, p));
        }
    }
    if !ok {
        return Ok(None);
    }
    ProbEvent::new(candidates)
        .map(Some)
        .map_err(|e| Error::InvalidLog(format!("case `{case_id}` event {index}: {e}")))
}

/// Case id and, per event, its (activity, probability) pairs in file order.
type RawCase = (String, Vec<Vec<(String, f64)>>);

/// Turn raw cases into a log, collecting every violation before failing.
fn assemble(cases: Vec<RawCase>, opts: &ReadOptions) -> Result<ProbEventLog> {
    let mut seen = BTreeSet::new();
    let mut bad = Vec::new();
    let mut traces = Vec::with_capacity(cases.len());
    for (case_id, events) in cases {
        if !seen.insert(case_id.clone()) {
            return Err(Error::InvalidLog(format!("case `{case_id}` appears twice")));
        }
        let mut built = Vec::with_capacity(events.len());
        for (i, raw) in events.into_iter().enumerate() {
            if let Some(e) = build_event(&case_id, i, raw, &mut bad)? {
                built.push(e);
            }
        }
        if bad.is_empty() {
            let trace = ProbTrace::new(case_id.clone(), built)
                .map_err(|_| Error::InvalidLog(format!("case `{case_id}` has no events")))?;
            traces.push(trace);
        }
    }
    if !bad.is_empty() {
        return Err(Error::LogValidation(bad));
    }
    let mut log = ProbEventLog::from_traces(traces);
    if opts.renormalize {
        log = log.renormalized();
    }
    let violations = validate_log(&log, opts.tolerance);
    if violations.is_empty() {
        Ok(log)
    } else {
        Err(Error::LogValidation(violations))
    }
}

pub fn read_prob_log_json(bytes: &[u8], opts: &ReadOptions) -> Result<ProbEventLog> {
    let raw: RawLog = serde_json::from_slice(bytes)?;
    if raw.version != PROBLOG_VERSION {
        return Err(Error::InvalidLog(format!(
            "unsupported version `{}`, expected `{PROBLOG_VERSION}`",
            raw.version
        )));
    }
    let cases =
        raw.traces.into_iter().map(|t| (t.case_id, t.events.into_iter().map(|e| e.0).collect())).collect();
    assemble(cases, opts)
}

pub fn write_prob_log_json(log: &ProbEventLog) -> String {
    write_traces_json(&log.traces)
}

pub fn write_traces_json(traces: &[ProbTrace]) -> String {
    let doc = OutLog {
        version: PROBLOG_VERSION,
        traces: traces
            .iter()
            .map(|t| OutTrace {
                case_id: &t.case_id,
                events: t
                    .events()
                    .iter()
                    .map(|e| e.candidates().map(|(a, p)| (a.as_str(), p)).collect())
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("log documents always serialize");
    s.push('\n');
    s
}

/// Certain-event log: every event must have one candidate with probability 1.
pub fn read_det_log_json(bytes: &[u8]) -> Result<Vec<DetTrace>> {
    let log = read_prob_log_json(bytes, &ReadOptions::default())?;
    log.traces
        .iter()
        .map(|t| {
            if !t.is_deterministic() {
                return Err(Error::InvalidLog(format!(
                    "case `{}` has uncertain events; expected one activity per event",
                    t.case_id
                )));
            }
            Ok(crate::problog::argmax_trace(t))
        })
        .collect()
}

pub fn write_det_log_json(traces: &[DetTrace]) -> String {
    let lifted: Vec<ProbTrace> = traces
        .iter()
        .map(|t| crate::problog::lift_deterministic(t).expect("deterministic traces are non-empty"))
        .collect();
    write_traces_json(&lifted)
}

/// One case as a matrix: header `activity,e0,e1,...`, one row per activity.
pub fn read_prob_trace_csv(bytes: &[u8], case_id: &str, opts: &ReadOptions) -> Result<ProbEventLog> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header = reader.headers()?.clone();
    if header.get(0) != Some("activity") {
        return Err(Error::parse("row 1, column 1", "first header must be `activity`"));
    }
    let m = header.len() - 1;
    if m == 0 {
        return Err(Error::parse("row 1", "no event columns"));
    }
    for (i, h) in header.iter().skip(1).enumerate() {
        if h != format!("e{i}") {
            return Err(Error::parse(
                format!("row 1, column {}", i + 2),
                format!("expected `e{i}`, found `{h}`"),
            ));
        }
    }
    let mut events: Vec<Vec<(String, f64)>> = vec![Vec::new(); m];
    let mut seen = BTreeSet::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = r + 2;
        let activity = record.get(0).unwrap_or("").trim().to_string();
        if activity.is_empty() {
            return Err(Error::parse(format!("row {row}, column 1"), "empty activity name"));
        }
        if !seen.insert(activity.clone()) {
            return Err(Error::parse(
                format!("row {row}, column 1"),
                format!("activity `{activity}` listed twice"),
            ));
        }
        for (i, cell) in record.iter().skip(1).enumerate() {
            let p: f64 = cell.trim().parse().map_err(|_| {
                Error::parse(format!("row {row}, column {}", i + 2), format!("`{cell}` is not a number"))
            })?;
            events[i].push((activity.clone(), p));
        }
    }
    if seen.is_empty() {
        return Err(Error::parse("row 2", "no activity rows"));
    }
    assemble(vec![(case_id.to_string(), events)], opts)
}

pub fn write_prob_trace_csv(trace: &ProbTrace) -> String {
    let activities: BTreeSet<&ActivityId> =
        trace.events().iter().flat_map(|e| e.candidates().map(|(a, _)| a)).collect();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["activity".to_string()];
    header.extend((0..trace.len()).map(|i| format!("e{i}")));
    w.write_record(&header).expect("in-memory write");
    for a in activities {
        let mut row = vec![a.to_string()];
        row.extend(trace.events().iter().map(|e| format!("{}", e.probability(a))));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}
