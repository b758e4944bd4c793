//! Exact concrete semantics for constant-rate automata: time and discrete
//! successors, scripted runs, bounded exploration, symbolic path
//! feasibility, run durations, and the bouncing-ball closed form.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::kripke::{FiniteKripke, KTransition};
use crate::linsys::{Constraint, LinExpr, LinearSystem, LinsysError};
use crate::model::{eval_predicate, Atom, Configuration, HybridAutomaton, ModelError, Predicate, RelOp, Valuation};
use crate::rational::{int, sqrt, to_text, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("flow of `{var}` in mode `{mode}` is not a constant rate")]
    NonConstantFlow { mode: String, var: String },
    #[error("invariant of mode `{mode}` violated at the {at} of the delay")]
    InvariantViolated { mode: String, at: &'static str },
    #[error("guard of transition {0} does not hold")]
    GuardFailed(usize),
    #[error("target invariant of transition {0} does not hold after the jump")]
    TargetInvariantFailed(usize),
    #[error("transition {edge} does not leave mode `{mode}`")]
    WrongSource { edge: usize, mode: String },
    #[error("no transition with index {0}")]
    UnknownEdge(usize),
    #[error("negative delay {0}")]
    NegativeDelay(String),
    #[error("mode `{0}` is not initial")]
    NotInitial(String),
    #[error("start valuation violates the initial condition or the invariant")]
    BadStart,
    #[error("the initial condition does not determine a single valuation")]
    NoInitialPoint,
    #[error("step {index}: {source}")]
    AtStep { index: usize, source: Box<SemanticsError> },
    #[error("fixed delay list has {got} entries for {expected} edges")]
    DelayCount { expected: usize, got: usize },
    #[error("{0}")]
    Domain(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
}

fn const_rates(a: &HybridAutomaton, mode: usize) -> Result<BTreeMap<&str, i64>, SemanticsError> {
    a.vars
        .iter()
        .map(|x| match a.rate(mode, x).as_const() {
            Some(r) => Ok((x.as_str(), r)),
            None => Err(SemanticsError::NonConstantFlow { mode: a.modes[mode].clone(), var: x.clone() }),
        })
        .collect()
}

/// `ν ⊕ t` under the constant flow of the current mode, with the invariant
/// checked at both endpoints.
pub fn timed_successor(
    a: &HybridAutomaton,
    c: &Configuration,
    t: &Rational,
) -> Result<Configuration, SemanticsError> {
    if t.is_negative() {
        return Err(SemanticsError::NegativeDelay(to_text(t)));
    }
    let rates = const_rates(a, c.mode)?;
    let inv = &a.invariants[c.mode];
    let violated = |at| SemanticsError::InvariantViolated { mode: a.modes[c.mode].clone(), at };
    if !eval_predicate(inv, &c.valuation)? {
        return Err(violated("start"));
    }
    let mut v = c.valuation.clone();
    for (x, value) in v.iter_mut() {
        *value += int(rates[x.as_str()]) * t;
    }
    if !eval_predicate(inv, &v)? {
        return Err(violated("end"));
    }
    Ok(Configuration { mode: c.mode, valuation: v })
}

/// Takes transition `edge` from `c` without letting time pass.
pub fn discrete_successor(
    a: &HybridAutomaton,
    c: &Configuration,
    edge: usize,
) -> Result<Configuration, SemanticsError> {
    let t = a.transitions.get(edge).ok_or(SemanticsError::UnknownEdge(edge))?;
    if t.source != c.mode {
        return Err(SemanticsError::WrongSource { edge, mode: a.modes[c.mode].clone() });
    }
    if !eval_predicate(&t.guard, &c.valuation)? {
        return Err(SemanticsError::GuardFailed(edge));
    }
    let v = t.jump.apply(&c.valuation);
    if !eval_predicate(&a.invariants[t.target], &v)? {
        return Err(SemanticsError::TargetInvariantFailed(edge));
    }
    Ok(Configuration { mode: t.target, valuation: v })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStep {
    pub delay: Rational,
    pub edge: usize,
    pub action: String,
    pub after: Configuration,
}

/// `(m₀,ν₀) –(t₁,a₁)→ (m₁,ν₁) → …`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub start: Configuration,
    pub steps: Vec<RunStep>,
}

impl Run {
    pub fn delays(&self) -> Vec<Rational> {
        self.steps.iter().map(|s| s.delay.clone()).collect()
    }

    pub fn end(&self) -> &Configuration {
        self.steps.last().map_or(&self.start, |s| &s.after)
    }

    pub fn total_time(&self) -> Rational {
        total_time(&self.delays())
    }
}

/// The initial configuration in `mode` given by the initial condition.
pub fn initial_configuration(a: &HybridAutomaton, mode: usize) -> Result<Configuration, SemanticsError> {
    let valuation = a.initial_point().ok_or(SemanticsError::NoInitialPoint)?;
    Ok(Configuration { mode, valuation })
}

/// Runs `script` from the initial configuration of the first edge's source
/// mode (or of the first initial mode for an empty script).
pub fn simulate(a: &HybridAutomaton, script: &[(Rational, usize)]) -> Result<Run, SemanticsError> {
    let mode = match script.first() {
        Some((_, e)) => a.transitions.get(*e).ok_or(SemanticsError::UnknownEdge(*e))?.source,
        None => a.initial[0],
    };
    if !a.initial.contains(&mode) {
        return Err(SemanticsError::NotInitial(a.modes[mode].clone()));
    }
    let start = initial_configuration(a, mode)?;
    if !eval_predicate(&a.init_valuations, &start.valuation)? {
        return Err(SemanticsError::BadStart);
    }
    simulate_from(a, start, script)
}

/// Runs `script` from an arbitrary configuration.
pub fn simulate_from(
    a: &HybridAutomaton,
    start: Configuration,
    script: &[(Rational, usize)],
) -> Result<Run, SemanticsError> {
    if !eval_predicate(&a.invariants[start.mode], &start.valuation)? {
        return Err(SemanticsError::BadStart);
    }
    let mut current = start.clone();
    let mut steps = Vec::with_capacity(script.len());
    for (index, (delay, edge)) in script.iter().enumerate() {
        let at = |e: SemanticsError| SemanticsError::AtStep { index, source: Box::new(e) };
        let waited = timed_successor(a, &current, delay).map_err(at)?;
        let after = discrete_successor(a, &waited, *edge).map_err(at)?;
        steps.push(RunStep {
            delay: delay.clone(),
            edge: *edge,
            action: a.transitions[*edge].action.clone(),
            after: after.clone(),
        });
        current = after;
    }
    Ok(Run { start, steps })
}

/// Label of an explored step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReachStep {
    Delay(Rational),
    Edge(usize),
}

/// Result of [`bounded_reach`]: configurations in discovery order, the steps
/// between them, and whether unexplored configurations remained at the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reach {
    pub configs: Vec<Configuration>,
    pub steps: Vec<(usize, ReachStep, usize)>,
    pub budget_exceeded: bool,
}

impl Reach {
    /// The explored graph as a Kripke structure labeled by mode labels.
    pub fn kripke(&self, a: &HybridAutomaton) -> FiniteKripke {
        let mut k = FiniteKripke::new();
        k.props = a.propositions();
        for c in &self.configs {
            let vals: Vec<String> = c.valuation.iter().map(|(x, v)| format!("{x}={}", to_text(v))).collect();
            let name = if vals.is_empty() {
                a.modes[c.mode].clone()
            } else {
                format!("{} {}", a.modes[c.mode], vals.join(","))
            };
            k.add_labeled_state(name, a.labels[c.mode].clone());
        }
        k.initial = self.initial_indices(a);
        for (from, step, to) in &self.steps {
            let (action, edge) = match step {
                ReachStep::Delay(d) => (to_text(d), None),
                ReachStep::Edge(e) => (a.transitions[*e].action.clone(), Some(*e)),
            };
            k.transitions.push(KTransition { from: *from, action, to: *to, edge });
        }
        k
    }

    fn initial_indices(&self, a: &HybridAutomaton) -> Vec<usize> {
        let v0 = a.initial_point();
        (0..self.configs.len())
            .filter(|&i| a.initial.contains(&self.configs[i].mode) && Some(&self.configs[i].valuation) == v0.as_ref())
            .collect()
    }
}

/// Breadth-first exploration with delays from `menu` and discrete edges, for
/// at most `budget` rounds.
pub fn bounded_reach(a: &HybridAutomaton, budget: usize, menu: &[Rational]) -> Result<Reach, SemanticsError> {
    for m in 0..a.modes.len() {
        const_rates(a, m)?;
    }
    let mut index: BTreeMap<Configuration, usize> = BTreeMap::new();
    let mut configs = Vec::new();
    let mut frontier = Vec::new();
    for &m in &a.initial {
        let c = initial_configuration(a, m)?;
        if eval_predicate(&a.invariants[m], &c.valuation)? && !index.contains_key(&c) {
            index.insert(c.clone(), configs.len());
            frontier.push(configs.len());
            configs.push(c);
        }
    }
    let mut steps = BTreeSet::new();
    for _ in 0..budget {
        if frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for &i in &frontier {
            let mut succ: Vec<(ReachStep, Configuration)> = Vec::new();
            for d in menu {
                if let Ok(c) = timed_successor(a, &configs[i], d) {
                    succ.push((ReachStep::Delay(d.clone()), c));
                }
            }
            for e in a.outgoing(configs[i].mode) {
                if let Ok(c) = discrete_successor(a, &configs[i], e) {
                    succ.push((ReachStep::Edge(e), c));
                }
            }
            for (step, c) in succ {
                let j = match index.get(&c) {
                    Some(&j) => j,
                    None => {
                        let j = configs.len();
                        index.insert(c.clone(), j);
                        configs.push(c);
                        next.push(j);
                        j
                    }
                };
                steps.insert((i, step, j));
            }
        }
        frontier = next;
    }
    Ok(Reach { configs, steps: steps.into_iter().collect(), budget_exceeded: !frontier.is_empty() })
}

/// An explicit edge sequence with optional fixed delays. Delay `i` is spent
/// in the source mode of edge `i` before taking it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathQuery {
    pub edges: Vec<usize>,
    pub fixed_delays: Option<Vec<Option<Rational>>>,
    /// Start valuation; defaults to the initial point.
    pub start: Option<Valuation>,
}

impl PathQuery {
    pub fn new(edges: Vec<usize>) -> PathQuery {
        PathQuery { edges, ..PathQuery::default() }
    }

    pub fn from(mut self, start: Valuation) -> PathQuery {
        self.start = Some(start);
        self
    }

    pub fn with_delays(mut self, delays: Vec<Option<Rational>>) -> PathQuery {
        self.fixed_delays = Some(delays);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible {
        delays: Vec<Rational>,
        /// Every delay was forced to a single value.
        unique: bool,
        end: Configuration,
    },
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }

    pub fn delays(&self) -> Option<&[Rational]> {
        match self {
            Feasibility::Feasible { delays, .. } => Some(delays),
            Feasibility::Infeasible => None,
        }
    }
}

fn atom_constraint(atom: &Atom, vals: &BTreeMap<&str, LinExpr>) -> Result<Constraint, SemanticsError> {
    let get = |x: &str| vals.get(x).cloned().ok_or_else(|| ModelError::UnknownVariable(x.into()));
    let lhs = match atom {
        Atom::Rect { var, .. } => get(var)?,
        Atom::Diag { left, right, .. } => get(left)?.minus(&get(right)?),
    };
    Ok(Constraint::compare(&lhs, atom.op(), &LinExpr::constant(int(atom.bound()))))
}

fn add_predicate(
    sys: &mut LinearSystem,
    pred: &Predicate,
    vals: &BTreeMap<&str, LinExpr>,
) -> Result<(), SemanticsError> {
    for atom in &pred.atoms {
        sys.push(atom_constraint(atom, vals)?);
    }
    Ok(())
}

/// Decides whether the edge sequence can be realized by some delays, by
/// expressing every variable as a linear function of the delays and solving
/// the resulting system exactly.
pub fn path_feasible(a: &HybridAutomaton, q: &PathQuery) -> Result<Feasibility, SemanticsError> {
    let n = q.edges.len();
    if let Some(fixed) = &q.fixed_delays {
        if fixed.len() != n {
            return Err(SemanticsError::DelayCount { expected: n, got: fixed.len() });
        }
    }
    let start_mode = match q.edges.first() {
        Some(e) => a.transitions.get(*e).ok_or(SemanticsError::UnknownEdge(*e))?.source,
        None => a.initial[0],
    };
    let start = match &q.start {
        Some(v) => v.clone(),
        None => a.initial_point().ok_or(SemanticsError::NoInitialPoint)?,
    };
    let mut vals: BTreeMap<&str, LinExpr> = BTreeMap::new();
    for x in &a.vars {
        let v = start.get(x).ok_or_else(|| ModelError::UnknownVariable(x.clone()))?;
        vals.insert(x.as_str(), LinExpr::constant(v.clone()));
    }
    let mut sys = LinearSystem::new(n);
    let mut mode = start_mode;
    add_predicate(&mut sys, &a.invariants[mode], &vals)?;
    for (i, &e) in q.edges.iter().enumerate() {
        let t = a.transitions.get(e).ok_or(SemanticsError::UnknownEdge(e))?;
        if t.source != mode {
            return Err(SemanticsError::AtStep {
                index: i,
                source: Box::new(SemanticsError::WrongSource { edge: e, mode: a.modes[mode].clone() }),
            });
        }
        let rates = const_rates(a, mode)?;
        sys.push(Constraint::compare(&LinExpr::var(i), RelOp::Ge, &LinExpr::default()));
        if let Some(Some(d)) = q.fixed_delays.as_ref().map(|f| &f[i]) {
            sys.push(Constraint::compare(&LinExpr::var(i), RelOp::Eq, &LinExpr::constant(d.clone())));
        }
        for (x, expr) in vals.iter_mut() {
            expr.add_term(i, &int(rates[x]));
        }
        add_predicate(&mut sys, &a.invariants[mode], &vals)?;
        add_predicate(&mut sys, &t.guard, &vals)?;
        for (x, c) in &t.jump.assign {
            let slot = vals.get_mut(x.as_str()).ok_or_else(|| ModelError::UnknownVariable(x.clone()))?;
            *slot = LinExpr::constant(int(*c));
        }
        mode = t.target;
        add_predicate(&mut sys, &a.invariants[mode], &vals)?;
    }
    Ok(match sys.solve()? {
        None => Feasibility::Infeasible,
        Some(sol) => {
            let valuation = vals.iter().map(|(x, e)| ((*x).into(), e.eval(&sol.values))).collect();
            Feasibility::Feasible { delays: sol.values, unique: sol.unique, end: Configuration { mode, valuation } }
        }
    })
}

/// `Σ tᵢ`.
pub fn total_time(delays: &[Rational]) -> Rational {
    delays.iter().fold(Rational::zero(), |acc, d| acc + d)
}

/// Duration of an infinite lasso-shaped run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LassoTime {
    /// The loop takes positive time, so time grows without bound.
    Diverging { stem: Rational, loop_time: Rational },
    /// The loop takes no time at all: infinitely many steps at one instant.
    ZenoSuspect { stem: Rational },
}

pub fn lasso_time(stem: &[Rational], cycle: &[Rational]) -> LassoTime {
    let stem = total_time(stem);
    let loop_time = total_time(cycle);
    if loop_time.is_zero() {
        LassoTime::ZenoSuspect { stem }
    } else {
        LassoTime::Diverging { stem, loop_time }
    }
}

/// A nonnegative duration or `+∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TimeValue {
    Finite(Rational),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallRun {
    /// Time of the first impact, `√(2ℓ/g)`.
    pub t1: Rational,
    /// Whether `t1` is exact; otherwise it is within `10⁻¹³` below the root.
    pub t1_exact: bool,
    /// Cumulative impact times.
    pub impact_times: Vec<Rational>,
    /// Limit of the impact times; infinite for a perfectly elastic ball.
    pub zeno_time: TimeValue,
}

/// Closed-form run of a ball dropped from height `l` under gravity `g` with
/// restitution `c`: first impact at `t₁`, then gaps `2cᵏt₁`. Reports up to
/// `n` impacts.
pub fn bouncing_ball(l: &Rational, c: &Rational, g: &Rational, n: usize) -> Result<BallRun, SemanticsError> {
    if !l.is_positive() {
        return Err(SemanticsError::Domain("drop height must be positive"));
    }
    if !g.is_positive() {
        return Err(SemanticsError::Domain("gravity must be positive"));
    }
    if c.is_negative() || *c > Rational::one() {
        return Err(SemanticsError::Domain("restitution must lie in [0, 1]"));
    }
    let (t1, t1_exact) = sqrt(&(int(2) * l / g));
    let mut impact_times = Vec::with_capacity(n);
    if n > 0 {
        impact_times.push(t1.clone());
    }
    if !c.is_zero() {
        let mut ck = Rational::one();
        let mut at = t1.clone();
        for _ in 1..n {
            ck *= c;
            at += int(2) * &ck * &t1;
            impact_times.push(at.clone());
        }
    }
    let zeno_time = if c.is_one() {
        TimeValue::Infinite
    } else {
        TimeValue::Finite(&t1 * (Rational::one() + c) / (Rational::one() - c))
    };
    Ok(BallRun { t1, t1_exact, impact_times, zeno_time })
}
