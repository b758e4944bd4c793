//! LTL model checking of finite Kripke structures and timed automata:
//! translate the negated property, build the product, search it for an
//! accepting lasso.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use crate::buchi::{buchi_accepts_lasso, translate_to_buchi, BuchiAutomaton};
use crate::graph::{nested_dfs, shortest_lasso, BuchiGraph, GraphLasso};
use crate::kripke::FiniteKripke;
use crate::ltl::{eval_lasso, Lasso, Ltl};
use crate::model::{HybridAutomaton, Valuation};
use crate::rational::Rational;
use crate::regions::{region_graph, RegionError, RegionGraph};
use crate::semantics::{path_feasible, simulate, Feasibility, PathQuery, Run, SemanticsError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum McheckError {
    #[error("proposition `{0}` does not occur in the model")]
    UnknownProposition(String),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductState {
    pub kripke: usize,
    pub buchi: usize,
}

/// Reachable part of `K ⊗ B` as a Büchi graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductGraph {
    pub states: Vec<ProductState>,
    pub graph: BuchiGraph,
}

/// Product of `k` and `b`. A step `(s,q) → (s',q')` needs `s → s'` in `k`
/// and a `b` edge `q → q'` whose guard accepts the label of `s`.
pub fn synchronized_product(k: &FiniteKripke, b: &BuchiAutomaton) -> ProductGraph {
    let ksucc = k.successors();
    let bout = b.out_edges();
    let mut index: BTreeMap<ProductState, usize> = BTreeMap::new();
    let mut states = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |p: ProductState, states: &mut Vec<ProductState>, succ: &mut Vec<Vec<usize>>, queue: &mut VecDeque<usize>| {
        *index.entry(p).or_insert_with(|| {
            states.push(p);
            succ.push(Vec::new());
            queue.push_back(states.len() - 1);
            states.len() - 1
        })
    };
    let mut initial = Vec::new();
    for &s in &k.initial {
        for &q in &b.initial {
            let id = intern(ProductState { kripke: s, buchi: q }, &mut states, &mut succ, &mut queue);
            if !initial.contains(&id) {
                initial.push(id);
            }
        }
    }
    while let Some(i) = queue.pop_front() {
        let ProductState { kripke: s, buchi: q } = states[i];
        let label = &k.labels[s];
        let mut out = Vec::new();
        for &t in &ksucc[s] {
            for e in &bout[q] {
                if e.guard.matches(label) {
                    let j = intern(ProductState { kripke: t, buchi: e.to }, &mut states, &mut succ, &mut queue);
                    if !out.contains(&j) {
                        out.push(j);
                    }
                }
            }
        }
        succ[i] = out;
    }
    let accepting = states.iter().map(|p| b.accepting.contains(&p.buchi)).collect();
    ProductGraph { states, graph: BuchiGraph { succ, initial, accepting } }
}

/// Searches for a reachable accepting cycle.
pub fn nested_dfs_emptiness(g: &BuchiGraph) -> Option<GraphLasso> {
    nested_dfs(g)
}

/// One position of a counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// Kripke state.
    pub state: usize,
    /// Mode name (or Kripke state name for plain structures).
    pub mode: String,
    pub labels: BTreeSet<String>,
    /// Action taken from this position.
    pub action: String,
    /// Time waited before the action, when concretized.
    pub delay: Option<Rational>,
    /// Valuation on reaching this position, when concretized.
    pub valuation: Option<Valuation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub stem: Vec<TraceStep>,
    pub cycle: Vec<TraceStep>,
    /// The accepting lasso in the product graph.
    pub product: GraphLasso,
    /// Label trace of the Kripke lasso.
    pub trace: Lasso,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated(Box<Counterexample>),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Holds => None,
            Verdict::Violated(c) => Some(c),
        }
    }
}

/// Decides whether every trace of `k` satisfies `f`.
pub fn check(k: &FiniteKripke, f: &Ltl) -> Result<Verdict, McheckError> {
    for p in f.props() {
        if !k.props.contains(&p) {
            return Err(McheckError::UnknownProposition(p));
        }
    }
    let negated = translate_to_buchi(&f.clone().not());
    let product = synchronized_product(k, &negated);
    let Some(found) = nested_dfs_emptiness(&product.graph) else {
        return Ok(Verdict::Holds);
    };
    let lasso = shortest_lasso(&product.graph).unwrap_or(found);
    assert!(product.graph.validates(&lasso), "product lasso does not validate");
    let project = |ids: &[usize]| -> Vec<usize> { ids.iter().map(|&i| product.states[i].kripke).collect() };
    let (stem_states, cycle_states) = normalize(project(&lasso.stem), project(&lasso.cycle));
    let labels = |ss: &[usize]| ss.iter().map(|&s| k.labels[s].clone()).collect();
    let trace = Lasso::new(labels(&stem_states), labels(&cycle_states));
    assert!(buchi_accepts_lasso(&negated, &trace), "counterexample rejected by the negated automaton");
    debug_assert!(!eval_lasso(f, &trace));
    let path: Vec<usize> = stem_states.iter().chain(&cycle_states).copied().collect();
    let next_of = |i: usize| if i + 1 < path.len() { path[i + 1] } else { cycle_states[0] };
    let steps: Vec<TraceStep> = (0..path.len())
        .map(|i| {
            let s = path[i];
            let action = k.transition_between(s, next_of(i)).map(|t| t.action.clone()).unwrap_or_default();
            TraceStep {
                state: s,
                mode: k.states[s].clone(),
                labels: k.labels[s].clone(),
                action,
                delay: None,
                valuation: None,
            }
        })
        .collect();
    let (stem, cycle) = steps.split_at(stem_states.len());
    Ok(Verdict::Violated(Box::new(Counterexample {
        stem: stem.to_vec(),
        cycle: cycle.to_vec(),
        product: lasso,
        trace,
    })))
}

/// Rolls the stem into the cycle and cuts the cycle to its shortest period.
fn normalize(mut stem: Vec<usize>, mut cycle: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
    while let (Some(&a), Some(&b)) = (stem.last(), cycle.last()) {
        if a != b {
            break;
        }
        stem.pop();
        cycle.rotate_right(1);
    }
    let n = cycle.len();
    if let Some(p) = (1..n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| cycle[i] == cycle[i - p])) {
        cycle.truncate(p);
    }
    (stem, cycle)
}

/// A concrete timed run realizing a region-level counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concretization {
    /// Edge sequence: the stem followed by the loop repeated `unrollings` times.
    pub edges: Vec<usize>,
    pub unrollings: usize,
    pub run: Run,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedVerdict {
    pub verdict: Verdict,
    pub graph: RegionGraph,
    pub concrete: Option<Concretization>,
}

/// Model checks a diagonal-free timed automaton through its region graph.
/// A counterexample is mapped back to exact delays when the edge sequence
/// of its stem and (up to three times unrolled) loop is feasible.
pub fn check_timed(a: &HybridAutomaton, f: &Ltl) -> Result<TimedVerdict, McheckError> {
    let graph = region_graph(a)?;
    let mut verdict = check(&graph.kripke, f)?;
    let mut concrete = None;
    if let Verdict::Violated(cex) = &mut verdict {
        let edge_of = |step: &TraceStep, next: usize| graph.kripke.transition_between(step.state, next).and_then(|t| t.edge);
        let path: Vec<&TraceStep> = cex.stem.iter().chain(&cex.cycle).collect();
        let loop_start = cex.cycle[0].state;
        let step_edges: Vec<Option<usize>> = (0..path.len())
            .map(|i| edge_of(path[i], path.get(i + 1).map_or(loop_start, |s| s.state)))
            .collect();
        let (stem_edges, loop_edges) = step_edges.split_at(cex.stem.len());
        for unrollings in 1..=3 {
            let mut edges: Vec<usize> = stem_edges.iter().flatten().copied().collect();
            for _ in 0..unrollings {
                edges.extend(loop_edges.iter().flatten());
            }
            let delays = match edges.first() {
                None => Vec::new(),
                Some(_) => match path_feasible(a, &PathQuery::new(edges.clone()))? {
                    Feasibility::Infeasible => continue,
                    Feasibility::Feasible { delays, .. } => delays,
                },
            };
            let script: Vec<(Rational, usize)> = delays.into_iter().zip(edges.iter().copied()).collect();
            let run = simulate(a, &script)?;
            annotate(cex, &step_edges, &run, a);
            concrete = Some(Concretization { edges, unrollings, run });
            break;
        }
    }
    Ok(TimedVerdict { verdict, graph, concrete })
}

/// Copies delays and valuations of the first pass through the lasso into
/// its steps, and replaces Kripke state names by mode names.
fn annotate(cex: &mut Counterexample, step_edges: &[Option<usize>], run: &Run, a: &HybridAutomaton) {
    let mut pos = 0;
    let mut current = run.start.clone();
    for (i, step) in cex.stem.iter_mut().chain(cex.cycle.iter_mut()).enumerate() {
        step.mode = a.modes[current.mode].clone();
        step.valuation = Some(current.valuation.clone());
        if step_edges[i].is_some() {
            let taken = &run.steps[pos];
            step.delay = Some(taken.delay.clone());
            current = taken.after.clone();
            pos += 1;
        }
    }
}
