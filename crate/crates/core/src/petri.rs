//! Labelled place/transition nets with unit arcs, markings and firing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of an observable activity. Never empty; silence is [`Label::Silent`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ActivityId(String);

impl ActivityId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidActivity("activity name is empty".into()));
        }
        Ok(ActivityId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ActivityId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        ActivityId::new(value)
    }
}

impl TryFrom<&str> for ActivityId {
    type Error = Error;

    fn try_from(value: &str) -> Result<Self> {
        ActivityId::new(value)
    }
}

impl From<ActivityId> for String {
    fn from(value: ActivityId) -> Self {
        value.0
    }
}

impl fmt::Display for ActivityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Transition label: an activity or the silent step τ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Activity(ActivityId),
    Silent,
}

impl Label {
    pub fn activity(&self) -> Option<&ActivityId> {
        match self {
            Label::Activity(a) => Some(a),
            Label::Silent => None,
        }
    }

    pub fn is_silent(&self) -> bool {
        matches!(self, Label::Silent)
    }
}

impl From<ActivityId> for Label {
    fn from(value: ActivityId) -> Self {
        Label::Activity(value)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Activity(a) => a.fmt(f),
            Label::Silent => f.write_str("τ"),
        }
    }
}

/// Token counts per place. Places that are absent hold zero tokens.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Marking(BTreeMap<String, u32>);

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    /// Marking with one token in each of `places`.
    pub fn of<I, S>(places: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut m = Marking::new();
        for p in places {
            m.add(p, 1);
        }
        m
    }

    pub fn get(&self, place: &str) -> u32 {
        self.0.get(place).copied().unwrap_or(0)
    }

    pub fn set(&mut self, place: impl Into<String>, tokens: u32) {
        let place = place.into();
        if tokens == 0 {
            self.0.remove(&place);
        } else {
            self.0.insert(place, tokens);
        }
    }

    pub fn add(&mut self, place: impl Into<String>, tokens: u32) {
        let place = place.into();
        let current = self.get(&place);
        self.set(place, current + tokens);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.values().map(|&n| u64::from(n)).sum()
    }

    /// Places holding at least one token, with their counts.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(p, &n)| (p.as_str(), n))
    }

    /// Pointwise sum of two markings.
    pub fn union(&self, other: &Marking) -> Marking {
        let mut out = self.clone();
        for (p, n) in other.iter() {
            out.add(p, n);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub source: String,
    pub target: String,
}

/// A labelled Petri net with explicit initial and final markings.
///
/// Fields are public so that readers and builders can assemble nets freely;
/// [`validate`] reports everything that breaks the structural invariants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PetriNet {
    pub name: String,
    pub places: Vec<String>,
    pub transitions: Vec<String>,
    pub arcs: Vec<Arc>,
    pub labels: BTreeMap<String, Label>,
    pub initial_marking: Marking,
    pub final_marking: Marking,
}

impl PetriNet {
    pub fn new(name: impl Into<String>) -> Self {
        PetriNet { name: name.into(), ..Default::default() }
    }

    pub fn add_place(&mut self, id: impl Into<String>) {
        self.places.push(id.into());
    }

    pub fn add_transition(&mut self, id: impl Into<String>, label: Label) {
        let id = id.into();
        self.labels.insert(id.clone(), label);
        self.transitions.push(id);
    }

    pub fn add_arc(&mut self, source: impl Into<String>, target: impl Into<String>) {
        self.arcs.push(Arc { source: source.into(), target: target.into() });
    }

    pub fn label(&self, transition: &str) -> Option<&Label> {
        self.labels.get(transition)
    }

    pub fn has_transition(&self, id: &str) -> bool {
        self.transitions.iter().any(|t| t == id)
    }

    /// Input places of `transition`, in arc order.
    pub fn preset<'a>(&'a self, transition: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.arcs.iter().filter(move |a| a.target == transition).map(|a| a.source.as_str())
    }

    /// Output places of `transition`, in arc order.
    pub fn postset<'a>(&'a self, transition: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.arcs.iter().filter(move |a| a.source == transition).map(|a| a.target.as_str())
    }

    /// Observable activities used by the net, sorted.
    pub fn activities(&self) -> BTreeSet<ActivityId> {
        self.labels.values().filter_map(|l| l.activity().cloned()).collect()
    }
}

/// Transitions whose every input place holds at least one token in `marking`,
/// in declaration order.
pub fn enabled_transitions(net: &PetriNet, marking: &Marking) -> Vec<String> {
    net.transitions.iter().filter(|t| is_enabled(net, marking, t)).cloned().collect()
}

fn is_enabled(net: &PetriNet, marking: &Marking, transition: &str) -> bool {
    net.preset(transition).all(|p| marking.get(p) >= 1)
}

/// Fire `transition` at `marking`, returning the successor marking.
pub fn fire(net: &PetriNet, marking: &Marking, transition: &str) -> Result<Marking> {
    if !net.has_transition(transition) {
        return Err(Error::UnknownTransition(transition.to_string()));
    }
    if !is_enabled(net, marking, transition) {
        return Err(Error::NotEnabled(transition.to_string()));
    }
    let mut next = marking.clone();
    for p in net.preset(transition) {
        let n = next.get(p);
        next.set(p, n - 1);
    }
    for p in net.postset(transition) {
        next.add(p, 1);
    }
    Ok(next)
}

/// A broken structural invariant, naming the offending element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicatePlace(String),
    DuplicateTransition(String),
    /// Id used both as a place and as a transition.
    AmbiguousNode(String),
    DanglingArc {
        source: String,
        target: String,
        missing: String,
    },
    NonBipartiteArc {
        source: String,
        target: String,
    },
    UnlabelledTransition(String),
    LabelWithoutTransition(String),
    InitialMarkingOnUnknownPlace(String),
    FinalMarkingOnUnknownPlace(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicatePlace(p) => write!(f, "duplicate place `{p}`"),
            Violation::DuplicateTransition(t) => write!(f, "duplicate transition `{t}`"),
            Violation::AmbiguousNode(n) => write!(f, "`{n}` is both a place and a transition"),
            Violation::DanglingArc { source, target, missing } => {
                write!(f, "arc {source} -> {target} references unknown node `{missing}`")
            }
            Violation::NonBipartiteArc { source, target } => {
                write!(f, "arc {source} -> {target} does not connect a place and a transition")
            }
            Violation::UnlabelledTransition(t) => write!(f, "transition `{t}` has no label"),
            Violation::LabelWithoutTransition(t) => write!(f, "label for unknown transition `{t}`"),
            Violation::InitialMarkingOnUnknownPlace(p) => {
                write!(f, "initial marking on unknown place `{p}`")
            }
            Violation::FinalMarkingOnUnknownPlace(p) => {
                write!(f, "final marking on unknown place `{p}`")
            }
        }
    }
}

/// Check every structural invariant; an empty result means the net is well formed.
pub fn validate(net: &PetriNet) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut places = BTreeSet::new();
    for p in &net.places {
        if !places.insert(p.as_str()) {
            out.push(Violation::DuplicatePlace(p.clone()));
        }
    }
    let mut transitions = BTreeSet::new();
    for t in &net.transitions {
        if !transitions.insert(t.as_str()) {
            out.push(Violation::DuplicateTransition(t.clone()));
        }
        if places.contains(t.as_str()) {
            out.push(Violation::AmbiguousNode(t.clone()));
        }
        if !net.labels.contains_key(t) {
            out.push(Violation::UnlabelledTransition(t.clone()));
        }
    }
    for t in net.labels.keys() {
        if !transitions.contains(t.as_str()) {
            out.push(Violation::LabelWithoutTransition(t.clone()));
        }
    }
    for arc in &net.arcs {
        let known = |n: &str| places.contains(n) || transitions.contains(n);
        let mut dangling = false;
        for end in [&arc.source, &arc.target] {
            if !known(end) {
                dangling = true;
                out.push(Violation::DanglingArc {
                    source: arc.source.clone(),
                    target: arc.target.clone(),
                    missing: end.clone(),
                });
            }
        }
        if dangling {
            continue;
        }
        let p_to_t = places.contains(arc.source.as_str()) && transitions.contains(arc.target.as_str());
        let t_to_p = transitions.contains(arc.source.as_str()) && places.contains(arc.target.as_str());
        if !(p_to_t || t_to_p) {
            out.push(Violation::NonBipartiteArc { source: arc.source.clone(), target: arc.target.clone() });
        }
    }
    for (p, _) in net.initial_marking.iter() {
        if !places.contains(p) {
            out.push(Violation::InitialMarkingOnUnknownPlace(p.to_string()));
        }
    }
    for (p, _) in net.final_marking.iter() {
        if !places.contains(p) {
            out.push(Violation::FinalMarkingOnUnknownPlace(p.to_string()));
        }
    }
    out
}

/// Fail with [`Error::InvalidNet`] listing all violations, if any.
pub fn ensure_valid(net: &PetriNet) -> Result<()> {
    let violations = validate(net);
    if violations.is_empty() {
        return Ok(());
    }
    let msg = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
    Err(Error::InvalidNet(format!("{}: {msg}", net.name)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{act, choice_model};
    use proptest::prelude::*;

    fn linear_abc() -> PetriNet {
        let mut net = PetriNet::new("abc");
        for p in ["p0", "p1", "p2", "p3"] {
            net.add_place(p);
        }
        for (i, a) in ["a", "b", "c"].iter().enumerate() {
            let t = format!("t_{a}");
            net.add_transition(&t, act(a).into());
            net.add_arc(format!("p{i}"), &t);
            net.add_arc(&t, format!("p{}", i + 1));
        }
        net.initial_marking = Marking::of(["p0"]);
        net.final_marking = Marking::of(["p3"]);
        net
    }

    #[test]
    fn linear_net_enables_only_its_source_transition() {
        let net = linear_abc();
        assert_eq!(enabled_transitions(&net, &net.initial_marking), vec!["t_a"]);
    }

    #[test]
    fn empty_marking_enables_nothing() {
        let net = linear_abc();
        assert!(enabled_transitions(&net, &Marking::new()).is_empty());
        let model = choice_model();
        assert!(enabled_transitions(&model, &Marking::new()).is_empty());
    }

    #[test]
    fn fire_moves_one_token_along_the_chain() {
        let net = linear_abc();
        let m = fire(&net, &net.initial_marking, "t_a").unwrap();
        assert_eq!(m, Marking::of(["p1"]));
        assert_eq!(net.initial_marking, Marking::of(["p0"]));
    }

    #[test]
    fn firing_the_whole_chain_reaches_the_final_marking() {
        let net = linear_abc();
        let mut m = net.initial_marking.clone();
        for t in ["t_a", "t_b", "t_c"] {
            m = fire(&net, &m, t).unwrap();
        }
        assert_eq!(m, net.final_marking);
    }

    #[test]
    fn firing_a_disabled_transition_fails() {
        let net = linear_abc();
        let err = fire(&net, &net.initial_marking, "t_b").unwrap_err();
        assert!(matches!(err, Error::NotEnabled(t) if t == "t_b"));
        assert!(matches!(fire(&net, &net.initial_marking, "nope"), Err(Error::UnknownTransition(_))));
    }

    #[test]
    fn choice_model_is_well_formed() {
        assert_eq!(validate(&choice_model()), vec![]);
    }

    #[test]
    fn dangling_arc_is_reported() {
        let mut net = linear_abc();
        net.add_arc("t_c", "ghost");
        assert_eq!(
            validate(&net),
            vec![Violation::DanglingArc {
                source: "t_c".into(),
                target: "ghost".into(),
                missing: "ghost".into()
            }]
        );
    }

    #[test]
    fn unlabelled_transition_is_reported() {
        let mut net = linear_abc();
        net.transitions.push("t_x".into());
        assert_eq!(validate(&net), vec![Violation::UnlabelledTransition("t_x".into())]);
    }

    #[test]
    fn place_to_place_arc_is_reported() {
        let mut net = linear_abc();
        net.add_arc("p0", "p1");
        assert_eq!(
            validate(&net),
            vec![Violation::NonBipartiteArc { source: "p0".into(), target: "p1".into() }]
        );
    }

    #[test]
    fn markings_on_unknown_places_are_reported() {
        let mut net = linear_abc();
        net.initial_marking.add("nowhere", 1);
        net.final_marking.add("elsewhere", 2);
        let v = validate(&net);
        assert!(v.contains(&Violation::InitialMarkingOnUnknownPlace("nowhere".into())));
        assert!(v.contains(&Violation::FinalMarkingOnUnknownPlace("elsewhere".into())));
    }

    #[test]
    fn empty_activity_name_is_rejected() {
        assert!(ActivityId::new("").is_err());
    }

    proptest! {
        #[test]
        fn firing_conserves_tokens_per_arc(steps in proptest::collection::vec(0usize..8, 0..12)) {
            let net = choice_model();
            let mut m = net.initial_marking.clone();
            for s in steps {
                let enabled = enabled_transitions(&net, &m);
                if enabled.is_empty() {
                    break;
                }
                let t = &enabled[s % enabled.len()];
                let before = m.clone();
                m = fire(&net, &before, t).unwrap();
                for p in &net.places {
                    let is_in = net.preset(t).any(|q| q == p) as i64;
                    let is_out = net.postset(t).any(|q| q == p) as i64;
                    let delta = i64::from(m.get(p)) - i64::from(before.get(p));
                    prop_assert_eq!(delta, is_out - is_in);
                    prop_assert!(delta.abs() <= 1);
                }
            }
        }
    }
}
