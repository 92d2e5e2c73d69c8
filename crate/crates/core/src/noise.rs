//! Synthetic probabilistic logs from deterministic ground-truth traces.
//!
//! Every event keeps its original activity with probability `p` and gains one
//! alternative activity with probability `1 - p`. A fraction `p_h` of the
//! events of each trace draws `p` from (0.5, 1), the rest from (0, 0.5).
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`).
//! For each trace the generator first shuffles the event positions and marks
//! the first `round(p_h * m)` as high-probability, then draws, event by event,
//! the alternative activity (uniform over the universe without the original,
//! in sorted order) followed by `p` (uniform, exact interval bounds rejected).
//! Trace `i` of a log uses seed `seed ^ splitmix64(i)`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::EventClass;
use crate::petri::ActivityId;
use crate::problog::{DetTrace, ProbEvent, ProbTrace};

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseConfig {
    pub p_h: f64,
    pub seed: u64,
    pub activity_universe: BTreeSet<ActivityId>,
}

impl NoiseConfig {
    pub fn new(p_h: f64, seed: u64, activity_universe: BTreeSet<ActivityId>) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_h) {
            return Err(Error::InvalidInput(format!("p_h {p_h} is outside [0, 1]")));
        }
        if activity_universe.len() < 2 {
            return Err(Error::InvalidInput("activity universe needs at least two activities".into()));
        }
        Ok(NoiseConfig { p_h, seed, activity_universe })
    }
}

/// What the generator did to one event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InjectedEvent {
    pub original: ActivityId,
    pub added: ActivityId,
    /// Probability kept by the original activity.
    pub p: f64,
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed used for the trace at position `index` of a log.
pub fn trace_seed(seed: u64, index: usize) -> u64 {
    seed ^ splitmix64(index as u64)
}

fn uniform_open(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let p = lo + (hi - lo) * rng.random::<f64>();
        if p > lo && p < hi {
            return p;
        }
    }
}

/// Add one alternative per event of `trace`, seeded by `cfg.seed`.
pub fn inject(trace: &DetTrace, cfg: &NoiseConfig) -> Result<(ProbTrace, Vec<InjectedEvent>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let m = trace.len();
    let high_count = (cfg.p_h * m as f64).round() as usize;
    let mut positions: Vec<usize> = (0..m).collect();
    positions.shuffle(&mut rng);
    let mut high = vec![false; m];
    for &i in &positions[..high_count] {
        high[i] = true;
    }

    let mut events = Vec::with_capacity(m);
    let mut raw = Vec::with_capacity(m);
    for (i, original) in trace.activities().iter().enumerate() {
        let choices: Vec<&ActivityId> = cfg.activity_universe.iter().filter(|a| *a != original).collect();
        if choices.is_empty() {
            return Err(Error::UniverseTooSmall(original.to_string()));
        }
        let added = choices[rng.random_range(0..choices.len() as u64) as usize].clone();
        let p = if high[i] { uniform_open(&mut rng, 0.5, 1.0) } else { uniform_open(&mut rng, 0.0, 0.5) };
        events.push(ProbEvent::new([(original.clone(), p), (added.clone(), 1.0 - p)])?);
        raw.push(InjectedEvent { original: original.clone(), added, p });
    }
    Ok((ProbTrace::new(trace.case_id.clone(), events)?, raw))
}

/// [`inject`] over a whole log with per-trace derived seeds.
pub fn inject_log(traces: &[DetTrace], cfg: &NoiseConfig) -> Result<Vec<(ProbTrace, Vec<InjectedEvent>)>> {
    traces
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let per_trace = NoiseConfig { seed: trace_seed(cfg.seed, i), ..cfg.clone() };
            inject(t, &per_trace)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelledEvent {
    #[serde(flatten)]
    pub event: InjectedEvent,
    pub label: EventClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub case_id: String,
    pub events: Vec<LabelledEvent>,
}

impl GroundTruth {
    pub fn labels(&self) -> Vec<EventClass> {
        self.events.iter().map(|e| e.label).collect()
    }

    pub fn relabelled(&self, t_d: f64) -> GroundTruth {
        let raw: Vec<InjectedEvent> = self.events.iter().map(|e| e.event.clone()).collect();
        label_ground_truth(self.case_id.clone(), &raw, t_d)
    }
}

/// Normal iff the odds of the original activity `p / (1 - p)` reach `t_d`.
pub fn classify_odds(p: f64, t_d: f64) -> EventClass {
    if p / (1.0 - p) >= t_d {
        EventClass::Normal
    } else {
        EventClass::Deviation
    }
}

pub fn label_ground_truth(case_id: impl Into<String>, raw: &[InjectedEvent], t_d: f64) -> GroundTruth {
    GroundTruth {
        case_id: case_id.into(),
        events: raw
            .iter()
            .map(|e| LabelledEvent { event: e.clone(), label: classify_odds(e.p, t_d) })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problog::argmax_trace;
    use crate::testutil::act;
    use proptest::prelude::*;

    fn universe(n: usize) -> BTreeSet<ActivityId> {
        (0..n).map(|i| act(&format!("a{i:02}"))).collect()
    }

    fn trace(len: usize) -> DetTrace {
        DetTrace::new("c", (0..len).map(|i| act(&format!("a{:02}", i % 7))).collect()).unwrap()
    }

    #[test]
    fn full_high_share_keeps_the_argmax() {
        let t = trace(25);
        let cfg = NoiseConfig::new(1.0, 7, universe(10)).unwrap();
        let (pt, raw) = inject(&t, &cfg).unwrap();
        assert!(raw.iter().all(|e| e.p > 0.5));
        assert_eq!(argmax_trace(&pt), t);
    }

    #[test]
    fn zero_high_share_flips_every_event() {
        let cfg = NoiseConfig::new(0.0, 7, universe(10)).unwrap();
        let (_, raw) = inject(&trace(25), &cfg).unwrap();
        assert!(raw.iter().all(|e| e.p < 0.5 && e.p > 0.0));
        assert!(raw.iter().all(|e| e.added != e.original));
    }

    #[test]
    fn same_seed_same_output() {
        let cfg = NoiseConfig::new(0.4, 99, universe(6)).unwrap();
        assert_eq!(inject(&trace(12), &cfg).unwrap(), inject(&trace(12), &cfg).unwrap());
        let other = NoiseConfig { seed: 100, ..cfg.clone() };
        assert_ne!(inject(&trace(12), &cfg).unwrap(), inject(&trace(12), &other).unwrap());
    }

    #[test]
    fn tiny_universe_is_rejected() {
        assert!(NoiseConfig::new(0.5, 1, universe(1)).is_err());
        assert!(NoiseConfig::new(1.5, 1, universe(3)).is_err());
        let cfg = NoiseConfig::new(0.5, 1, [act("a00"), act("zz")].into()).unwrap();
        let t = DetTrace::new("c", vec![act("q")]).unwrap();
        // `q` is outside the universe, so both universe members are alternatives
        assert!(inject(&t, &cfg).is_ok());
        let lonely = NoiseConfig { activity_universe: [act("a00"), act("a00")].into(), ..cfg };
        let t = DetTrace::new("c", vec![act("a00")]).unwrap();
        assert!(matches!(inject(&t, &lonely), Err(Error::UniverseTooSmall(_))));
    }

    #[test]
    fn odds_rule_examples() {
        assert_eq!(classify_odds(0.3, 0.5), EventClass::Deviation);
        assert_eq!(classify_odds(0.4, 0.5), EventClass::Normal);
        for p in [1e-9, 0.01, 0.2, 0.49] {
            assert_eq!(classify_odds(p, 0.0), EventClass::Normal);
        }
        // odds of exactly T_d count as normal: p = 0.2 gives 0.25
        assert_eq!(classify_odds(0.2, 0.25), EventClass::Normal);
    }

    proptest! {
        #[test]
        fn injected_columns_sum_to_one(seed in any::<u64>(), p_h in 0.0f64..=1.0, len in 1usize..30) {
            let cfg = NoiseConfig::new(p_h, seed, universe(5)).unwrap();
            let (pt, raw) = inject(&trace(len), &cfg).unwrap();
            for e in pt.events() {
                prop_assert_eq!(e.sum(), 1.0);
            }
            let high = raw.iter().filter(|e| e.p > 0.5).count();
            prop_assert_eq!(high, (p_h * len as f64).round() as usize);
        }

        #[test]
        fn deviations_grow_with_the_threshold(seed in any::<u64>(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let cfg = NoiseConfig::new(0.3, seed, universe(5)).unwrap();
            let (_, raw) = inject(&trace(40), &cfg).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let count = |t_d| label_ground_truth("c", &raw, t_d)
                .labels()
                .iter()
                .filter(|l| **l == EventClass::Deviation)
                .count();
            prop_assert!(count(lo) <= count(hi));
        }
    }
}
