//! Random block-structured process models and conforming playouts.
//!
//! Models are process trees translated into sound workflow nets with one
//! source and one sink place. Parallel blocks use silent split and join
//! transitions; loops use silent entry and exit transitions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::petri::{ActivityId, Label, Marking, PetriNet};
use crate::problog::DetTrace;

#[derive(Clone, Debug, PartialEq)]
pub enum ProcessTree {
    Activity(ActivityId),
    Tau,
    Seq(Vec<ProcessTree>),
    Xor(Vec<ProcessTree>),
    And(Vec<ProcessTree>),
    /// Body, then any number of (redo, body) rounds.
    Loop(Box<ProcessTree>, Box<ProcessTree>),
}

impl ProcessTree {
    pub fn visible_count(&self) -> usize {
        match self {
            ProcessTree::Activity(_) => 1,
            ProcessTree::Tau => 0,
            ProcessTree::Seq(c) | ProcessTree::Xor(c) | ProcessTree::And(c) => {
                c.iter().map(ProcessTree::visible_count).sum()
            }
            ProcessTree::Loop(a, b) => a.visible_count() + b.visible_count(),
        }
    }

    pub fn to_petri_net(&self, name: &str) -> PetriNet {
        let mut b = NetBuilder { net: PetriNet::new(name), places: 0, silent: 0, visible: 0 };
        b.net.add_place("source");
        b.net.add_place("sink");
        b.translate(self, "source", "sink");
        b.net.initial_marking = Marking::of(["source"]);
        b.net.final_marking = Marking::of(["sink"]);
        b.net
    }
}

struct NetBuilder {
    net: PetriNet,
    places: usize,
    silent: usize,
    visible: usize,
}

impl NetBuilder {
    fn place(&mut self) -> String {
        let id = format!("p{}", self.places);
        self.places += 1;
        self.net.add_place(id.clone());
        id
    }

    fn transition(&mut self, label: Label, inputs: &[&str], outputs: &[&str]) {
        let id = match &label {
            Label::Silent => {
                self.silent += 1;
                format!("tau{}", self.silent - 1)
            }
            Label::Activity(a) => {
                self.visible += 1;
                format!("t{}_{a}", self.visible - 1)
            }
        };
        self.net.add_transition(id.clone(), label);
        for p in inputs {
            self.net.add_arc(*p, id.clone());
        }
        for p in outputs {
            self.net.add_arc(id.clone(), *p);
        }
    }

    fn translate(&mut self, tree: &ProcessTree, from: &str, to: &str) {
        match tree {
            ProcessTree::Activity(a) => self.transition(Label::Activity(a.clone()), &[from], &[to]),
            ProcessTree::Tau => self.transition(Label::Silent, &[from], &[to]),
            ProcessTree::Seq(children) => {
                let mut current = from.to_string();
                for (i, c) in children.iter().enumerate() {
                    let next = if i + 1 == children.len() { to.to_string() } else { self.place() };
                    self.translate(c, &current, &next);
                    current = next;
                }
            }
            ProcessTree::Xor(children) => {
                for c in children {
                    self.translate(c, from, to);
                }
            }
            ProcessTree::And(children) => {
                let ends: Vec<(String, String)> =
                    children.iter().map(|_| (self.place(), self.place())).collect();
                let starts: Vec<&str> = ends.iter().map(|(s, _)| s.as_str()).collect();
                let stops: Vec<&str> = ends.iter().map(|(_, e)| e.as_str()).collect();
                self.transition(Label::Silent, &[from], &starts);
                for (c, (s, e)) in children.iter().zip(&ends) {
                    self.translate(c, s, e);
                }
                self.transition(Label::Silent, &stops, &[to]);
            }
            ProcessTree::Loop(body, redo) => {
                let (enter, leave) = (self.place(), self.place());
                self.transition(Label::Silent, &[from], &[&enter]);
                self.translate(body, &enter, &leave);
                self.translate(redo, &leave, &enter);
                self.transition(Label::Silent, &[&leave], &[to]);
            }
        }
    }
}

/// Random tree over the given leaves, each used exactly once.
pub fn random_tree(rng: &mut impl Rng, mut leaves: Vec<ProcessTree>) -> ProcessTree {
    if leaves.len() == 1 {
        return leaves.pop().expect("one leaf");
    }
    let n = leaves.len();
    let roll: f64 = rng.random();
    let k = if n == 2 { 2 } else { rng.random_range(2..=n.min(3)) };
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts[..k - 1].to_vec();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut rest = leaves;
    for &c in cuts.iter().rev() {
        parts.push(rest.split_off(c));
    }
    parts.push(rest);
    parts.reverse();
    let mut children: Vec<ProcessTree> = parts.into_iter().map(|p| random_tree(rng, p)).collect();
    if roll < 0.5 {
        ProcessTree::Seq(children)
    } else if roll < 0.72 {
        ProcessTree::Xor(children)
    } else if roll < 0.9 {
        ProcessTree::And(children)
    } else {
        let redo = children.split_off(1);
        let redo =
            if redo.len() == 1 { redo.into_iter().next().expect("one") } else { ProcessTree::Seq(redo) };
        ProcessTree::Loop(Box::new(children.pop().expect("body")), Box::new(redo))
    }
}

fn numbered(prefix: &str, n: usize) -> Vec<ActivityId> {
    let width = n.to_string().len();
    (0..n).map(|i| ActivityId::new(format!("{prefix}{i:0width$}")).expect("non-empty")).collect()
}

/// Tree over `n` distinct activities `a00, a01, ...` with a few optional ones.
pub fn random_model(seed: u64, n: usize) -> ProcessTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves = numbered("a", n)
        .into_iter()
        .map(|a| {
            if rng.random_bool(0.1) {
                ProcessTree::Xor(vec![ProcessTree::Activity(a), ProcessTree::Tau])
            } else {
                ProcessTree::Activity(a)
            }
        })
        .collect();
    random_tree(&mut rng, leaves)
}

/// Small model with 3 to 6 visible transitions, one choice between two
/// activities and one silent skip, the rest arranged at random.
pub fn small_model(rng: &mut impl Rng) -> ProcessTree {
    let n = rng.random_range(3..=6usize);
    let acts = numbered("a", n);
    let act = |i: usize| ProcessTree::Activity(acts[i].clone());
    let mut leaves =
        vec![ProcessTree::Xor(vec![act(0), act(1)]), ProcessTree::Xor(vec![act(2), ProcessTree::Tau])];
    leaves.extend((3..n).map(act));
    leaves.shuffle(rng);
    random_tree(rng, leaves)
}

const LOOP_REPEAT: f64 = 0.3;
const MAX_LOOP_ROUNDS: usize = 2;

pub fn play(tree: &ProcessTree, rng: &mut impl Rng, out: &mut Vec<ActivityId>) {
    match tree {
        ProcessTree::Activity(a) => out.push(a.clone()),
        ProcessTree::Tau => {}
        ProcessTree::Seq(children) => children.iter().for_each(|c| play(c, rng, out)),
        ProcessTree::Xor(children) => {
            let i = rng.random_range(0..children.len());
            play(&children[i], rng, out);
        }
        ProcessTree::And(children) => {
            let mut runs: Vec<std::collections::VecDeque<ActivityId>> = children
                .iter()
                .map(|c| {
                    let mut v = Vec::new();
                    play(c, rng, &mut v);
                    v.into()
                })
                .collect();
            // uniform over interleavings: pick a branch proportionally to what it has left
            let mut left: usize = runs.iter().map(|r| r.len()).sum();
            while left > 0 {
                let mut k = rng.random_range(0..left);
                for r in runs.iter_mut() {
                    if k < r.len() {
                        out.push(r.pop_front().expect("non-empty"));
                        break;
                    }
                    k -= r.len();
                }
                left -= 1;
            }
        }
        ProcessTree::Loop(body, redo) => {
            play(body, rng, out);
            let mut rounds = 0;
            while rounds < MAX_LOOP_ROUNDS && rng.random_bool(LOOP_REPEAT) {
                play(redo, rng, out);
                play(body, rng, out);
                rounds += 1;
            }
        }
    }
}

/// `n` non-empty conforming traces named `case0000, case0001, ...`.
pub fn playout(tree: &ProcessTree, n: usize, seed: u64) -> Result<Vec<DetTrace>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = n.saturating_sub(1).to_string().len().max(4);
    (0..n)
        .map(|i| {
            for _ in 0..1000 {
                let mut acts = Vec::new();
                play(tree, &mut rng, &mut acts);
                if !acts.is_empty() {
                    return DetTrace::new(format!("case{i:0width$}"), acts);
                }
            }
            Err(Error::InvalidInput("model only produces empty traces".into()))
        })
        .collect()
}
