//! Automaton, predicate and valuation types.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::rational::{int, Rational};

/// Comparison operator of an atomic constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl RelOp {
    pub fn holds<T: PartialOrd>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            RelOp::Lt => lhs < rhs,
            RelOp::Le => lhs <= rhs,
            RelOp::Eq => lhs == rhs,
            RelOp::Ge => lhs >= rhs,
            RelOp::Gt => lhs > rhs,
        }
    }

    /// The operator obtained by swapping the two sides (`a < b` iff `b > a`).
    pub fn flipped(self) -> RelOp {
        match self {
            RelOp::Lt => RelOp::Gt,
            RelOp::Le => RelOp::Ge,
            RelOp::Eq => RelOp::Eq,
            RelOp::Ge => RelOp::Le,
            RelOp::Gt => RelOp::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Eq => "=",
            RelOp::Ge => ">=",
            RelOp::Gt => ">",
        }
    }
}

impl fmt::Display for RelOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `x ⋈ c` or `x - y ⋈ c` with an integer constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Rect { var: String, op: RelOp, bound: i64 },
    Diag { left: String, right: String, op: RelOp, bound: i64 },
}

impl Atom {
    pub fn rect(var: &str, op: RelOp, bound: i64) -> Atom {
        Atom::Rect { var: var.to_string(), op, bound }
    }

    pub fn diag(left: &str, right: &str, op: RelOp, bound: i64) -> Atom {
        Atom::Diag { left: left.to_string(), right: right.to_string(), op, bound }
    }

    pub fn bound(&self) -> i64 {
        match self {
            Atom::Rect { bound, .. } | Atom::Diag { bound, .. } => *bound,
        }
    }

    pub fn op(&self) -> RelOp {
        match self {
            Atom::Rect { op, .. } | Atom::Diag { op, .. } => *op,
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        let (a, b) = match self {
            Atom::Rect { var, .. } => (var.as_str(), None),
            Atom::Diag { left, right, .. } => (left.as_str(), Some(right.as_str())),
        };
        core::iter::once(a).chain(b)
    }

    pub fn eval(&self, v: &Valuation) -> Result<bool, ModelError> {
        let get = |name: &str| {
            v.get(name).ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
        };
        Ok(match self {
            Atom::Rect { var, op, bound } => op.holds(get(var)?, &int(*bound)),
            Atom::Diag { left, right, op, bound } => {
                let diff = get(left)? - get(right)?;
                op.holds(&diff, &int(*bound))
            }
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Rect { var, op, bound } => write!(f, "{var} {op} {bound}"),
            Atom::Diag { left, right, op, bound } => write!(f, "{left} - {right} {op} {bound}"),
        }
    }
}

/// Conjunction of atoms; the empty conjunction is `true`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    pub atoms: Vec<Atom>,
}

impl Predicate {
    pub fn top() -> Predicate {
        Predicate { atoms: Vec::new() }
    }

    pub fn new(atoms: Vec<Atom>) -> Predicate {
        Predicate { atoms }
    }

    pub fn is_top(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn and(&self, other: &Predicate) -> Predicate {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        Predicate { atoms }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.atoms.iter().flat_map(Atom::variables)
    }

    pub fn has_diagonal(&self) -> bool {
        self.atoms.iter().any(|a| matches!(a, Atom::Diag { .. }))
    }

    /// When every variable in `vars` is pinned by exactly one equality atom
    /// and no other atoms appear, returns that point.
    pub fn as_point(&self, vars: &[String]) -> Option<Valuation> {
        let mut point = Valuation::new();
        for atom in &self.atoms {
            match atom {
                Atom::Rect { var, op: RelOp::Eq, bound } => {
                    if point.insert(var.clone(), int(*bound)).is_some() {
                        return None;
                    }
                }
                _ => return None,
            }
        }
        if point.len() == vars.len() && vars.iter().all(|x| point.contains_key(x)) {
            Some(point)
        } else {
            None
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("true");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" && ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Evaluates a predicate exactly. The empty conjunction is `true`.
pub fn eval_predicate(pred: &Predicate, v: &Valuation) -> Result<bool, ModelError> {
    let mut all = true;
    for atom in &pred.atoms {
        // evaluate every atom so unknown variables are always reported
        all &= atom.eval(v)?;
    }
    Ok(all)
}

/// Constant assignments `x' = c`; unassigned variables keep their value.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Jump {
    pub assign: BTreeMap<String, i64>,
}

impl Jump {
    pub fn identity() -> Jump {
        Jump::default()
    }

    pub fn resets(pairs: &[(&str, i64)]) -> Jump {
        Jump { assign: pairs.iter().map(|(x, c)| (x.to_string(), *c)).collect() }
    }

    pub fn reset_set(&self) -> BTreeSet<&str> {
        self.assign.keys().map(String::as_str).collect()
    }

    pub fn apply(&self, v: &Valuation) -> Valuation {
        let mut out = v.clone();
        for (x, c) in &self.assign {
            out.insert(x.clone(), int(*c));
        }
        out
    }
}

/// Rate of one variable in one mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rate {
    Const(i64),
    Interval(i64, i64),
    /// `ẋ = Σ coeff·y + constant`; only the general class uses these.
    Affine { terms: BTreeMap<String, i64>, constant: i64 },
}

impl Rate {
    pub fn as_const(&self) -> Option<i64> {
        match self {
            Rate::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Interval view of constant and interval rates.
    pub fn bounds(&self) -> Option<(i64, i64)> {
        match self {
            Rate::Const(c) => Some((*c, *c)),
            Rate::Interval(lo, hi) => Some((*lo, *hi)),
            Rate::Affine { .. } => None,
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Const(c) => write!(f, "{c}"),
            Rate::Interval(lo, hi) => write!(f, "[{lo}, {hi}]"),
            Rate::Affine { terms, constant } => {
                let mut first = true;
                for (y, k) in terms {
                    let (sign, mag) = if *k < 0 { ("-", -k) } else { ("+", *k) };
                    if first {
                        if *k < 0 {
                            f.write_str("-")?;
                        }
                    } else {
                        write!(f, " {sign} ")?;
                    }
                    if mag == 1 {
                        write!(f, "{y}")?;
                    } else {
                        write!(f, "{mag}*{y}")?;
                    }
                    first = false;
                }
                if first {
                    write!(f, "{constant}")
                } else if *constant != 0 {
                    let sign = if *constant < 0 { "-" } else { "+" };
                    write!(f, " {sign} {}", constant.abs())
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Valuation: variable name to exact value.
pub type Valuation = BTreeMap<String, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: usize,
    pub guard: Predicate,
    pub action: String,
    pub jump: Jump,
    pub target: usize,
}

/// A hybrid automaton with a mode labeling.
///
/// Modes and transitions are addressed by index. `flows[m]` holds a rate for
/// every variable; `labels[m]` is the proposition set of mode `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridAutomaton {
    pub name: String,
    pub modes: Vec<String>,
    pub initial: Vec<usize>,
    pub actions: BTreeSet<String>,
    pub vars: Vec<String>,
    pub transitions: Vec<Transition>,
    pub invariants: Vec<Predicate>,
    pub flows: Vec<BTreeMap<String, Rate>>,
    pub init_valuations: Predicate,
    pub labels: Vec<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("mode index {0} out of range")]
    ModeOutOfRange(usize),
    #[error("automaton `{0}` has no initial mode")]
    NoInitialMode(String),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("mode `{mode}` has no rate for variable `{var}`")]
    MissingRate { mode: String, var: String },
    #[error("rate interval [{lo}, {hi}] is empty")]
    EmptyRateInterval { lo: i64, hi: i64 },
    #[error("diagonal constraint `{0}` compares a variable with itself")]
    DegenerateDiagonal(String),
}

impl HybridAutomaton {
    /// Checks the structural invariants: endpoints declared, variables known,
    /// flows total, at least one initial mode.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.modes.len();
        let mut seen = BTreeSet::new();
        for m in &self.modes {
            if !seen.insert(m) {
                return Err(ModelError::Duplicate { kind: "mode", name: m.clone() });
            }
        }
        let mut seen = BTreeSet::new();
        for x in &self.vars {
            if !seen.insert(x) {
                return Err(ModelError::Duplicate { kind: "variable", name: x.clone() });
            }
        }
        if self.initial.is_empty() {
            return Err(ModelError::NoInitialMode(self.name.clone()));
        }
        if let Some(&m) = self.initial.iter().find(|&&m| m >= n) {
            return Err(ModelError::ModeOutOfRange(m));
        }
        if self.invariants.len() != n || self.flows.len() != n || self.labels.len() != n {
            return Err(ModelError::ModeOutOfRange(n));
        }
        let known = |x: &str| -> Result<(), ModelError> {
            if self.vars.iter().any(|v| v == x) {
                Ok(())
            } else {
                Err(ModelError::UnknownVariable(x.to_string()))
            }
        };
        let check_pred = |p: &Predicate| -> Result<(), ModelError> {
            for a in &p.atoms {
                if let Atom::Diag { left, right, .. } = a {
                    if left == right {
                        return Err(ModelError::DegenerateDiagonal(a.to_string()));
                    }
                }
                for x in a.variables() {
                    known(x)?;
                }
            }
            Ok(())
        };
        for t in &self.transitions {
            for m in [t.source, t.target] {
                if m >= n {
                    return Err(ModelError::ModeOutOfRange(m));
                }
            }
            check_pred(&t.guard)?;
            for x in t.jump.assign.keys() {
                known(x)?;
            }
        }
        for p in &self.invariants {
            check_pred(p)?;
        }
        check_pred(&self.init_valuations)?;
        for (m, flow) in self.flows.iter().enumerate() {
            for x in &self.vars {
                match flow.get(x) {
                    None => {
                        return Err(ModelError::MissingRate {
                            mode: self.modes[m].clone(),
                            var: x.clone(),
                        })
                    }
                    Some(Rate::Interval(lo, hi)) if lo > hi => {
                        return Err(ModelError::EmptyRateInterval { lo: *lo, hi: *hi })
                    }
                    Some(Rate::Affine { terms, .. }) => {
                        for y in terms.keys() {
                            known(y)?;
                        }
                    }
                    _ => {}
                }
            }
            for x in flow.keys() {
                known(x)?;
            }
        }
        Ok(())
    }

    pub fn mode_index(&self, name: &str) -> Option<usize> {
        self.modes.iter().position(|m| m == name)
    }

    pub fn rate(&self, mode: usize, var: &str) -> &Rate {
        &self.flows[mode][var]
    }

    /// Indices of the transitions leaving `mode`, in declaration order.
    pub fn outgoing(&self, mode: usize) -> impl Iterator<Item = usize> + '_ {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.source == mode)
            .map(|(i, _)| i)
    }

    /// All propositions used by the labeling.
    pub fn propositions(&self) -> BTreeSet<String> {
        self.labels.iter().flatten().cloned().collect()
    }

    /// The unique initial valuation, when the initial predicate pins every variable.
    pub fn initial_point(&self) -> Option<Valuation> {
        self.init_valuations.as_point(&self.vars)
    }
}

/// `(mode, valuation)` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub mode: usize,
    pub valuation: Valuation,
}

/// Incremental constructor for [`HybridAutomaton`], used by tests and by the
/// encoders. Variables default to rate 1 in every mode, modes default to the
/// label `{name}` and the initial predicate defaults to all variables zero.
#[derive(Debug, Clone)]
pub struct AutomatonBuilder {
    name: String,
    modes: Vec<String>,
    initial: Vec<usize>,
    actions: BTreeSet<String>,
    vars: Vec<String>,
    transitions: Vec<Transition>,
    invariants: Vec<Predicate>,
    flows: Vec<BTreeMap<String, Rate>>,
    init_valuations: Option<Predicate>,
    labels: Vec<Option<BTreeSet<String>>>,
}

impl AutomatonBuilder {
    pub fn new(name: &str) -> AutomatonBuilder {
        AutomatonBuilder {
            name: name.to_string(),
            modes: Vec::new(),
            initial: Vec::new(),
            actions: BTreeSet::new(),
            vars: Vec::new(),
            transitions: Vec::new(),
            invariants: Vec::new(),
            flows: Vec::new(),
            init_valuations: None,
            labels: Vec::new(),
        }
    }

    pub fn var(mut self, name: &str) -> Self {
        self.vars.push(name.to_string());
        self
    }

    pub fn mode(mut self, name: &str) -> Self {
        self.modes.push(name.to_string());
        self.invariants.push(Predicate::top());
        self.flows.push(BTreeMap::new());
        self.labels.push(None);
        self
    }

    pub fn initial_mode(mut self, name: &str) -> Self {
        self = self.mode(name);
        self.initial.push(self.modes.len() - 1);
        self
    }

    fn idx(&self, mode: &str) -> usize {
        self.modes
            .iter()
            .position(|m| m == mode)
            .unwrap_or_else(|| panic!("builder: unknown mode {mode}"))
    }

    pub fn rate(mut self, mode: &str, var: &str, rate: Rate) -> Self {
        let m = self.idx(mode);
        self.flows[m].insert(var.to_string(), rate);
        self
    }

    /// Sets the rate of `var` in every mode declared so far.
    pub fn rate_everywhere(mut self, var: &str, rate: Rate) -> Self {
        for flow in &mut self.flows {
            flow.insert(var.to_string(), rate.clone());
        }
        self
    }

    pub fn invariant(mut self, mode: &str, atoms: Vec<Atom>) -> Self {
        let m = self.idx(mode);
        self.invariants[m] = Predicate::new(atoms);
        self
    }

    pub fn label(mut self, mode: &str, props: &[&str]) -> Self {
        let m = self.idx(mode);
        self.labels[m] = Some(props.iter().map(|p| p.to_string()).collect());
        self
    }

    pub fn action(mut self, action: &str) -> Self {
        self.actions.insert(action.to_string());
        self
    }

    pub fn init(mut self, atoms: Vec<Atom>) -> Self {
        self.init_valuations = Some(Predicate::new(atoms));
        self
    }

    pub fn edge(mut self, src: &str, dst: &str, action: &str, guard: Vec<Atom>, jump: Jump) -> Self {
        let (source, target) = (self.idx(src), self.idx(dst));
        self.actions.insert(action.to_string());
        self.transitions.push(Transition {
            source,
            guard: Predicate::new(guard),
            action: action.to_string(),
            jump,
            target,
        });
        self
    }

    pub fn build(self) -> Result<HybridAutomaton, ModelError> {
        let vars = self.vars;
        let flows = self
            .flows
            .into_iter()
            .map(|mut f| {
                for x in &vars {
                    f.entry(x.clone()).or_insert(Rate::Const(1));
                }
                f
            })
            .collect();
        let labels = self
            .labels
            .into_iter()
            .zip(&self.modes)
            .map(|(l, m)| l.unwrap_or_else(|| core::iter::once(m.clone()).collect()))
            .collect();
        let init_valuations = self.init_valuations.unwrap_or_else(|| {
            Predicate::new(vars.iter().map(|x| Atom::rect(x, RelOp::Eq, 0)).collect())
        });
        let a = HybridAutomaton {
            name: self.name,
            modes: self.modes,
            initial: self.initial,
            actions: self.actions,
            vars,
            transitions: self.transitions,
            invariants: self.invariants,
            flows,
            init_valuations,
            labels,
        };
        a.validate()?;
        Ok(a)
    }
}

/// Convenience: builds a valuation from `(name, value)` pairs.
pub fn valuation(pairs: &[(&str, Rational)]) -> Valuation {
    pairs.iter().map(|(x, v)| (x.to_string(), v.clone())).collect()
}
