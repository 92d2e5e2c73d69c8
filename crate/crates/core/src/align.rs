//! Optimal alignments over (weighted) synchronous product nets.
//!
//! The search is uniform-cost by default; an admissible lower bound on the
//! cost of the unconsumed events can be plugged in via [`Heuristic`].
//!
//! Costs are compared on a fixed grid of [`COST_RESOLUTION`]. Among
//! alignments of equal cost on that grid the one whose
//! log moves sit on the earliest events wins. Remaining ties go to the path
//! discovered first, with successors generated in the order synchronous,
//! silent model, model, log moves and then by transition id.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::builders::{build_sync_product, build_weighted_trace_model, resolve_final_marking};
use crate::builders::{MoveKind, SyncProductNet};
use crate::error::{Error, Result};
use crate::petri::{ensure_valid, fire, ActivityId, Label, Marking, PetriNet};
use crate::problog::ProbTrace;
use crate::search::{to_units, CompiledNet, Step};
pub use crate::search::{SearchBudget, SearchStats, COST_RESOLUTION, DEFAULT_MAX_EXPANSIONS};

/// Smallest accepted trust threshold; the largest is `1 - MIN_EPSILON`.
pub const MIN_EPSILON: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostFunction {
    /// Unit cost for log and visible model moves, zero otherwise.
    Standard,
    /// Log-probability costs with trust threshold `epsilon`.
    Weighted { epsilon: f64 },
}

impl CostFunction {
    pub fn weighted(epsilon: f64) -> Result<Self> {
        let cf = CostFunction::Weighted { epsilon };
        cf.validate()?;
        Ok(cf)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CostFunction::Standard => Ok(()),
            CostFunction::Weighted { epsilon } => {
                if (MIN_EPSILON..=1.0 - MIN_EPSILON).contains(&epsilon) {
                    Ok(())
                } else {
                    Err(Error::InvalidEpsilon(epsilon))
                }
            }
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            CostFunction::Standard => None,
            CostFunction::Weighted { epsilon } => Some(epsilon),
        }
    }
}

/// Cost of firing one product transition.
pub fn move_cost(kind: MoveKind, weight: f64, cf: CostFunction) -> Result<f64> {
    match cf {
        CostFunction::Standard => Ok(match kind {
            MoveKind::Sync | MoveKind::TauModel => 0.0,
            MoveKind::Log | MoveKind::Model => 1.0,
        }),
        CostFunction::Weighted { epsilon } => {
            cf.validate()?;
            if !(weight > 0.0 && weight <= 1.0) {
                return Err(Error::InvalidWeight(weight));
            }
            // `+ 0.0` turns -0.0 from ln(1) into 0.0
            let cost = match kind {
                MoveKind::TauModel => 0.0,
                MoveKind::Sync => -weight.ln(),
                MoveKind::Log => -weight.ln() - epsilon.ln(),
                MoveKind::Model => -epsilon.ln(),
            };
            Ok(cost + 0.0)
        }
    }
}

/// Search-side cost of a move: the probability and trust terms are rounded
/// to the grid separately, so alignments that differ only in how the same
/// terms are grouped tie exactly. Inputs are already validated.
fn move_units(kind: MoveKind, weight: f64, cf: CostFunction) -> u64 {
    match cf {
        CostFunction::Standard => match kind {
            MoveKind::Sync | MoveKind::TauModel => 0,
            MoveKind::Log | MoveKind::Model => to_units(1.0),
        },
        CostFunction::Weighted { epsilon } => {
            let (w, e) = (to_units(-weight.ln()), to_units(-epsilon.ln()));
            match kind {
                MoveKind::TauModel => 0,
                MoveKind::Sync => w,
                MoveKind::Log => w + e,
                MoveKind::Model => e,
            }
        }
    }
}

/// Lower bound used to steer the search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Heuristic {
    #[default]
    Zero,
    /// Every unconsumed event costs at least its cheapest sync or log move.
    RemainingEvents,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SearchOptions {
    pub budget: SearchBudget,
    pub heuristic: Heuristic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlignedMove {
    pub transition: String,
    pub kind: MoveKind,
    /// `None` stands for the skip symbol; `Some(Label::Silent)` for τ.
    pub model_label: Option<Label>,
    pub trace_label: Option<ActivityId>,
    pub event: Option<usize>,
    pub weight: f64,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Alignment {
    pub moves: Vec<AlignedMove>,
    pub total_cost: f64,
    pub cost_function: CostFunction,
    pub event_count: usize,
    pub stats: SearchStats,
}

impl Alignment {
    /// `(trace label, model label)` pairs with `>>` for skips, handy for display and tests.
    pub fn pairs(&self) -> Vec<(String, String)> {
        self.moves
            .iter()
            .map(|m| {
                let log = m.trace_label.as_ref().map_or(">>".to_string(), ToString::to_string);
                let model = m.model_label.as_ref().map_or(">>".to_string(), ToString::to_string);
                (log, model)
            })
            .collect()
    }

    pub fn count(&self, kind: MoveKind) -> usize {
        self.moves.iter().filter(|m| m.kind == kind).count()
    }
}

struct Compiled {
    net: CompiledNet,
    ids: Vec<String>,
    /// Trace position per place index, for places of the trace model.
    trace_positions: Vec<Option<usize>>,
    /// Minimum cost of consuming events `k..` for each `k`, in grid units.
    remaining: Vec<u64>,
}

fn compile(product: &SyncProductNet, cf: CostFunction) -> Result<Compiled> {
    let places: HashMap<&str, u32> =
        product.net.places.iter().enumerate().map(|(i, p)| (p.as_str(), i as u32)).collect();
    let to_vec = |m: &Marking| -> Result<Vec<u32>> {
        let mut v = vec![0; places.len()];
        for (p, n) in m.iter() {
            let idx =
                places.get(p).ok_or_else(|| Error::InvalidNet(format!("marking on unknown place `{p}`")))?;
            v[*idx as usize] = n;
        }
        Ok(v)
    };

    let mut order: Vec<&String> = product.net.transitions.iter().collect();
    order.sort_by_key(|t| (product.moves[*t].kind.rank(), t.as_str()));

    let mut inputs: HashMap<&str, Vec<u32>> = HashMap::new();
    let mut outputs: HashMap<&str, Vec<u32>> = HashMap::new();
    for arc in &product.net.arcs {
        if let Some(&p) = places.get(arc.source.as_str()) {
            inputs.entry(arc.target.as_str()).or_default().push(p);
        } else if let Some(&p) = places.get(arc.target.as_str()) {
            outputs.entry(arc.source.as_str()).or_default().push(p);
        }
    }

    let mut per_event = vec![u64::MAX; product.event_count];
    let mut steps = Vec::with_capacity(order.len());
    for t in &order {
        let info = &product.moves[t.as_str()];
        let cost = move_cost(info.kind, info.weight, cf)?;
        let units = move_units(info.kind, info.weight, cf);
        let tie = match (info.kind, info.event) {
            (MoveKind::Log, Some(e)) => e as u64,
            _ => 0,
        };
        if let Some(e) = info.event {
            per_event[e] = per_event[e].min(units);
        }
        steps.push(Step {
            inputs: inputs.remove(t.as_str()).unwrap_or_default(),
            outputs: outputs.remove(t.as_str()).unwrap_or_default(),
            cost,
            units,
            tie,
        });
    }
    let mut remaining = vec![0u64; product.event_count + 1];
    for k in (0..product.event_count).rev() {
        remaining[k] = remaining[k + 1].saturating_add(per_event[k]);
    }
    let trace_positions =
        product.net.places.iter().map(|p| p.strip_prefix("t:P").and_then(|k| k.parse().ok())).collect();

    Ok(Compiled {
        net: CompiledNet {
            steps,
            initial: to_vec(&product.net.initial_marking)?,
            target: to_vec(&product.net.final_marking)?,
        },
        ids: order.into_iter().cloned().collect(),
        trace_positions,
        remaining,
    })
}

pub fn align(product: &SyncProductNet, cf: CostFunction) -> Result<Alignment> {
    align_with(product, cf, &SearchOptions::default())
}

pub fn align_with(product: &SyncProductNet, cf: CostFunction, options: &SearchOptions) -> Result<Alignment> {
    cf.validate()?;
    let compiled = compile(product, cf)?;
    let found = match options.heuristic {
        Heuristic::Zero => compiled.net.shortest_path(&options.budget, &|_| 0)?,
        Heuristic::RemainingEvents => {
            let estimate = |m: &[u32]| {
                m.iter()
                    .zip(&compiled.trace_positions)
                    .filter(|(&n, _)| n > 0)
                    .filter_map(|(_, k)| k.map(|k| compiled.remaining[k]))
                    .sum()
            };
            compiled.net.shortest_path(&options.budget, &estimate)?
        }
    };
    let moves: Vec<AlignedMove> = found
        .path
        .iter()
        .map(|&s| {
            let id = &compiled.ids[s];
            let info = &product.moves[id];
            AlignedMove {
                transition: id.clone(),
                kind: info.kind,
                model_label: info.model_label.clone(),
                trace_label: info.trace_label.clone(),
                event: info.event,
                weight: info.weight,
                cost: compiled.net.steps[s].cost,
            }
        })
        .collect();
    Ok(Alignment {
        total_cost: moves.iter().map(|m| m.cost).sum(),
        moves,
        cost_function: cf,
        event_count: product.event_count,
        stats: found.stats,
    })
}

/// Build the weighted trace model and product for `trace`, then align.
pub fn align_trace(model: &PetriNet, trace: &ProbTrace, cf: CostFunction) -> Result<Alignment> {
    align_trace_with(model, trace, cf, &SearchOptions::default())
}

pub fn align_trace_with(
    model: &PetriNet,
    trace: &ProbTrace,
    cf: CostFunction,
    options: &SearchOptions,
) -> Result<Alignment> {
    let product = build_sync_product(model, &build_weighted_trace_model(trace)?)?;
    align_with(&product, cf, options)
}

/// Re-fire the alignment on the product from its initial marking.
pub fn replay(product: &SyncProductNet, alignment: &Alignment) -> Result<Marking> {
    let mut m = product.net.initial_marking.clone();
    for mv in &alignment.moves {
        m = fire(&product.net, &m, &mv.transition)?;
    }
    Ok(m)
}

/// Cost of the cheapest complete run of `model` under standard costs
/// (one per visible transition, zero per silent one).
pub fn cheapest_model_run(model: &PetriNet) -> Result<f64> {
    ensure_valid(model)?;
    let final_marking = resolve_final_marking(model)?;
    let places: HashMap<&str, u32> =
        model.places.iter().enumerate().map(|(i, p)| (p.as_str(), i as u32)).collect();
    let to_vec = |m: &Marking| {
        let mut v = vec![0; places.len()];
        for (p, n) in m.iter() {
            v[places[p] as usize] = n;
        }
        v
    };
    let steps = model
        .transitions
        .iter()
        .map(|t| Step {
            inputs: model.preset(t).map(|p| places[p]).collect(),
            outputs: model.postset(t).map(|p| places[p]).collect(),
            cost: if model.labels[t].is_silent() { 0.0 } else { 1.0 },
            units: if model.labels[t].is_silent() { 0 } else { to_units(1.0) },
            tie: 0,
        })
        .collect();
    let net = CompiledNet { steps, initial: to_vec(&model.initial_marking), target: to_vec(&final_marking) };
    Ok(net.shortest_path(&SearchBudget::default(), &|_| 0)?.cost)
}

/// `1 - cost / (trace_len + cheapest model run)`, for standard-cost alignments.
pub fn fitness(alignment: &Alignment, model: &PetriNet, trace_len: usize) -> Result<f64> {
    if alignment.cost_function != CostFunction::Standard {
        return Err(Error::InvalidInput(
            "fitness is only defined for alignments under the standard cost".into(),
        ));
    }
    let worst = trace_len as f64 + cheapest_model_run(model)?;
    if worst == 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 - alignment.total_cost / worst).clamp(0.0, 1.0))
}
