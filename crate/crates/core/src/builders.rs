//! Trace models and synchronous product nets.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::petri::{ensure_valid, ActivityId, Label, Marking, PetriNet};
use crate::problog::{lift_deterministic, DetTrace, ProbTrace};

/// Placeholder for the missing side of a move.
pub const SKIP: &str = ">>";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// Event and model transition with the same activity fire together.
    Sync,
    /// Only the trace side fires.
    Log,
    /// Only a visible model transition fires.
    Model,
    /// Only a silent model transition fires.
    TauModel,
}

impl MoveKind {
    /// Position in the expansion preference order (lower goes first).
    pub fn rank(self) -> u8 {
        match self {
            MoveKind::Sync => 0,
            MoveKind::TauModel => 1,
            MoveKind::Model => 2,
            MoveKind::Log => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MoveKind::Sync => "sync",
            MoveKind::Log => "log",
            MoveKind::Model => "model",
            MoveKind::TauModel => "tau_model",
        }
    }

    pub fn consumes_event(self) -> bool {
        matches!(self, MoveKind::Sync | MoveKind::Log)
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Transition id used for candidate `activity` of event `event`.
pub fn trace_transition_id(event: usize, activity: &ActivityId) -> String {
    format!("t(e{event},{activity})")
}

fn trace_place_id(i: usize) -> String {
    format!("P{i}")
}

/// Linear net `P0 -> a0 -> P1 -> ... -> Pm` for a deterministic trace.
pub fn build_trace_model(trace: &DetTrace) -> Result<PetriNet> {
    Ok(build_weighted_trace_model(&lift_deterministic(trace)?)?.net)
}

/// A trace model where each event has one transition per candidate activity.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTraceModel {
    pub net: PetriNet,
    /// Candidate probability per trace transition.
    pub weights: BTreeMap<String, f64>,
    /// Event index per trace transition.
    pub events: BTreeMap<String, usize>,
}

impl WeightedTraceModel {
    pub fn event_count(&self) -> usize {
        self.net.places.len() - 1
    }
}

pub fn build_weighted_trace_model(trace: &ProbTrace) -> Result<WeightedTraceModel> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let m = trace.len();
    let mut net = PetriNet::new(format!("trace:{}", trace.case_id));
    for i in 0..=m {
        net.add_place(trace_place_id(i));
    }
    let mut weights = BTreeMap::new();
    let mut events = BTreeMap::new();
    for (i, event) in trace.events().iter().enumerate() {
        for (activity, p) in event.candidates() {
            let t = trace_transition_id(i, activity);
            net.add_transition(&t, Label::Activity(activity.clone()));
            net.add_arc(trace_place_id(i), &t);
            net.add_arc(&t, trace_place_id(i + 1));
            weights.insert(t.clone(), p);
            events.insert(t, i);
        }
    }
    net.initial_marking = Marking::of([trace_place_id(0)]);
    net.final_marking = Marking::of([trace_place_id(m)]);
    Ok(WeightedTraceModel { net, weights, events })
}

/// The declared final marking, or one token on every place without outgoing arcs.
pub fn resolve_final_marking(model: &PetriNet) -> Result<Marking> {
    if !model.final_marking.is_empty() {
        return Ok(model.final_marking.clone());
    }
    let sinks: Vec<&String> =
        model.places.iter().filter(|p| !model.arcs.iter().any(|a| &a.source == *p)).collect();
    if sinks.is_empty() {
        return Err(Error::InvalidNet(format!(
            "{}: no final marking declared and no sink place to infer one from",
            model.name
        )));
    }
    Ok(Marking::of(sinks.into_iter().cloned()))
}

/// Where a product transition came from and what firing it means.
#[derive(Clone, Debug, PartialEq)]
pub struct MoveInfo {
    pub kind: MoveKind,
    /// Probability carried from the trace side; 1 for model moves.
    pub weight: f64,
    pub model_transition: Option<String>,
    pub trace_transition: Option<String>,
    pub model_label: Option<Label>,
    pub trace_label: Option<ActivityId>,
    /// Index of the consumed event for log and synchronous moves.
    pub event: Option<usize>,
}

/// Weighted synchronous product of a process model and a weighted trace model.
#[derive(Clone, Debug, PartialEq)]
pub struct SyncProductNet {
    pub net: PetriNet,
    pub moves: BTreeMap<String, MoveInfo>,
    pub event_count: usize,
}

impl SyncProductNet {
    pub fn kind(&self, transition: &str) -> Option<MoveKind> {
        self.moves.get(transition).map(|m| m.kind)
    }

    pub fn weight(&self, transition: &str) -> Option<f64> {
        self.moves.get(transition).map(|m| m.weight)
    }

    pub fn origin(&self, transition: &str) -> Option<(Option<&str>, Option<&str>)> {
        self.moves.get(transition).map(|m| (m.model_transition.as_deref(), m.trace_transition.as_deref()))
    }

    pub fn count(&self, kind: MoveKind) -> usize {
        self.moves.values().filter(|m| m.kind == kind).count()
    }
}

pub fn model_place(p: &str) -> String {
    format!("m:{p}")
}

pub fn trace_place(p: &str) -> String {
    format!("t:{p}")
}

fn product_id(model: Option<&str>, trace: Option<&str>) -> String {
    format!("({},{})", model.unwrap_or(SKIP), trace.unwrap_or(SKIP))
}

pub fn build_sync_product(model: &PetriNet, trace: &WeightedTraceModel) -> Result<SyncProductNet> {
    ensure_valid(model)?;
    ensure_valid(&trace.net)?;
    let model_final = resolve_final_marking(model)?;

    let mut net = PetriNet::new(format!("{} x {}", model.name, trace.net.name));
    for p in &model.places {
        net.add_place(model_place(p));
    }
    for p in &trace.net.places {
        net.add_place(trace_place(p));
    }
    let mut moves = BTreeMap::new();

    let mut add = |net: &mut PetriNet, m: Option<&str>, t: Option<&str>, info: MoveInfo| {
        let id = product_id(m, t);
        let label = match (&info.model_label, &info.trace_label) {
            (Some(l), _) => l.clone(),
            (None, Some(a)) => Label::Activity(a.clone()),
            (None, None) => Label::Silent,
        };
        net.add_transition(&id, label);
        if let Some(m) = m {
            for p in model.preset(m) {
                net.add_arc(model_place(p), &id);
            }
            for p in model.postset(m) {
                net.add_arc(&id, model_place(p));
            }
        }
        if let Some(t) = t {
            for p in trace.net.preset(t) {
                net.add_arc(trace_place(p), &id);
            }
            for p in trace.net.postset(t) {
                net.add_arc(&id, trace_place(p));
            }
        }
        moves.insert(id, info);
    };

    for mt in &model.transitions {
        let label = model.labels[mt].clone();
        let kind = if label.is_silent() { MoveKind::TauModel } else { MoveKind::Model };
        add(
            &mut net,
            Some(mt),
            None,
            MoveInfo {
                kind,
                weight: 1.0,
                model_transition: Some(mt.clone()),
                trace_transition: None,
                model_label: Some(label),
                trace_label: None,
                event: None,
            },
        );
    }
    for tt in &trace.net.transitions {
        let activity = trace.net.labels[tt].activity().cloned();
        add(
            &mut net,
            None,
            Some(tt),
            MoveInfo {
                kind: MoveKind::Log,
                weight: trace.weights[tt],
                model_transition: None,
                trace_transition: Some(tt.clone()),
                model_label: None,
                trace_label: activity,
                event: Some(trace.events[tt]),
            },
        );
    }
    for mt in &model.transitions {
        let Some(model_activity) = model.labels[mt].activity() else {
            continue;
        };
        for tt in &trace.net.transitions {
            if trace.net.labels[tt].activity() != Some(model_activity) {
                continue;
            }
            add(
                &mut net,
                Some(mt),
                Some(tt),
                MoveInfo {
                    kind: MoveKind::Sync,
                    weight: trace.weights[tt],
                    model_transition: Some(mt.clone()),
                    trace_transition: Some(tt.clone()),
                    model_label: Some(Label::Activity(model_activity.clone())),
                    trace_label: Some(model_activity.clone()),
                    event: Some(trace.events[tt]),
                },
            );
        }
    }

    let lift = |m: &Marking, f: fn(&str) -> String| {
        let mut out = Marking::new();
        for (p, n) in m.iter() {
            out.add(f(p), n);
        }
        out
    };
    net.initial_marking =
        lift(&model.initial_marking, model_place).union(&lift(&trace.net.initial_marking, trace_place));
    net.final_marking = lift(&model_final, model_place).union(&lift(&trace.net.final_marking, trace_place));

    Ok(SyncProductNet { net, moves, event_count: trace.event_count() })
}

/// Classic synchronous product of a model and a deterministic trace (all weights 1).
pub fn build_classic_product(model: &PetriNet, trace: &DetTrace) -> Result<SyncProductNet> {
    build_sync_product(model, &build_weighted_trace_model(&lift_deterministic(trace)?)?)
}
