use crate::petri::{ActivityId, Label, Marking, PetriNet};
use crate::problog::{ProbEvent, ProbTrace};

pub fn act(name: &str) -> ActivityId {
    ActivityId::new(name).unwrap()
}

/// `a`, then `b` or `d`, then either `c` or `e` followed by a silent step.
pub fn choice_model() -> PetriNet {
    let mut net = PetriNet::new("choice");
    for p in ["start", "p1", "p2", "p3", "end"] {
        net.add_place(p);
    }
    let steps = [
        ("t_a", Some("a"), "start", "p1"),
        ("t_b", Some("b"), "p1", "p2"),
        ("t_d", Some("d"), "p1", "p2"),
        ("t_c", Some("c"), "p2", "end"),
        ("t_e", Some("e"), "p2", "p3"),
        ("t_tau", None, "p3", "end"),
    ];
    for (id, label, from, to) in steps {
        let label = label.map_or(Label::Silent, |a| Label::Activity(act(a)));
        net.add_transition(id, label);
        net.add_arc(from, id);
        net.add_arc(id, to);
    }
    net.initial_marking = Marking::of(["start"]);
    net.final_marking = Marking::of(["end"]);
    net
}

/// The three-event probability matrix over `a`, `b`, `c` used by the worked example.
pub fn uncertain_abc() -> ProbTrace {
    let ev = |pairs: &[(&str, f64)]| ProbEvent::new(pairs.iter().map(|&(a, p)| (act(a), p))).unwrap();
    ProbTrace::new(
        "abc",
        vec![ev(&[("a", 0.3), ("b", 0.7)]), ev(&[("b", 0.7), ("c", 0.3)]), ev(&[("b", 0.3), ("c", 0.7)])],
    )
    .unwrap()
}
