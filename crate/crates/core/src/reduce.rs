//! Reductions of initialized rectangular automata to multi-rate automata and
//! of initialized multi-rate automata to timed automata.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::classify::{classify, Class, InitCheck};
use crate::model::{Atom, HybridAutomaton, Jump, ModelError, Predicate, Rate, RelOp, Transition, Valuation};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error("expected at most class {expected}, got {got}")]
    WrongClass { expected: Class, got: Class },
    #[error("transition {transition} changes the rate of `{variable}` without resetting it")]
    NotInitialized { transition: usize, variable: String },
    #[error("initial valuation must fix every variable")]
    NoInitialPoint,
    #[error("generated name `{0}` is already in use")]
    NameCollision(String),
    #[error("rescaled constant {0} does not fit in 64 bits")]
    ConstantOverflow(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn require(a: &HybridAutomaton, expected: Class) -> Result<(), ReduceError> {
    let report = classify(a);
    if !report.class.within(expected) {
        return Err(ReduceError::WrongClass { expected, got: report.class });
    }
    if let Ok(InitCheck::Violated { transition, variable }) = crate::classify::is_initialized(a) {
        return Err(ReduceError::NotInitialized { transition, variable });
    }
    Ok(())
}

/// Result of [`rect_to_multirate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectSplit {
    pub automaton: HybridAutomaton,
    /// Original transition of every new transition.
    pub origin: Vec<usize>,
    /// Interval variable to its `(lower, upper)` tracking pair.
    pub bounds: BTreeMap<String, (String, String)>,
}

/// One alternative for a guard atom: extra atoms plus clamping resets.
type Case = (Vec<Atom>, Vec<(String, i64)>);

fn split_atom(op: RelOp, c: i64, lo: &str, hi: &str) -> Vec<Case> {
    let at = Atom::rect;
    let clamp = |v: &str| vec![(v.to_string(), c)];
    match op {
        RelOp::Le | RelOp::Lt => {
            let (strict, weak) = if op == RelOp::Lt { (RelOp::Lt, RelOp::Ge) } else { (RelOp::Le, RelOp::Gt) };
            vec![(vec![at(hi, strict, c)], vec![]), (vec![at(lo, strict, c), at(hi, weak, c)], clamp(hi))]
        }
        RelOp::Ge | RelOp::Gt => {
            let (strict, weak) = if op == RelOp::Gt { (RelOp::Gt, RelOp::Le) } else { (RelOp::Ge, RelOp::Lt) };
            vec![(vec![at(lo, strict, c)], vec![]), (vec![at(hi, strict, c), at(lo, weak, c)], clamp(lo))]
        }
        RelOp::Eq => vec![(
            vec![at(lo, RelOp::Le, c), at(hi, RelOp::Ge, c)],
            vec![(lo.to_string(), c), (hi.to_string(), c)],
        )],
    }
}

/// Replaces every variable with an interval rate somewhere by a lower and an
/// upper tracking variable (`x_l`, `x_u`). Guard atoms on such variables
/// split their transition into the cases where the bound is already
/// respected or has to be clamped.
pub fn rect_to_multirate(a: &HybridAutomaton) -> Result<RectSplit, ReduceError> {
    require(a, Class::Rectangular)?;
    let split: BTreeSet<&String> = a
        .vars
        .iter()
        .filter(|x| a.flows.iter().any(|f| matches!(f.get(*x), Some(Rate::Interval(..)))))
        .collect();
    let mut bounds = BTreeMap::new();
    let mut vars = Vec::new();
    for x in &a.vars {
        if split.contains(x) {
            let pair = (format!("{x}_l"), format!("{x}_u"));
            for n in [&pair.0, &pair.1] {
                if a.vars.contains(n) {
                    return Err(ReduceError::NameCollision(n.clone()));
                }
            }
            vars.push(pair.0.clone());
            vars.push(pair.1.clone());
            bounds.insert(x.clone(), pair);
        } else {
            vars.push(x.clone());
        }
    }

    let flows = a
        .flows
        .iter()
        .map(|f| {
            let mut out = BTreeMap::new();
            for (x, r) in f {
                match bounds.get(x) {
                    Some((lo, hi)) => {
                        let (a, b) = r.bounds().expect("rectangular rate");
                        out.insert(lo.clone(), Rate::Const(a));
                        out.insert(hi.clone(), Rate::Const(b));
                    }
                    None => {
                        out.insert(x.clone(), r.clone());
                    }
                }
            }
            out
        })
        .collect();

    let both = |p: &Predicate| {
        let mut atoms = Vec::new();
        for atom in &p.atoms {
            match atom {
                Atom::Rect { var, op, bound } if bounds.contains_key(var) => {
                    let (lo, hi) = &bounds[var];
                    atoms.push(Atom::rect(lo, *op, *bound));
                    atoms.push(Atom::rect(hi, *op, *bound));
                }
                _ => atoms.push(atom.clone()),
            }
        }
        Predicate::new(atoms)
    };
    // Some slope in [a, b] keeps x inside a convex bound iff the matching
    // tracking variable does.
    let relaxed = |p: &Predicate| {
        let mut atoms = Vec::new();
        for atom in &p.atoms {
            match atom {
                Atom::Rect { var, op, bound } if bounds.contains_key(var) => {
                    let (lo, hi) = &bounds[var];
                    match op {
                        RelOp::Lt | RelOp::Le => atoms.push(Atom::rect(lo, *op, *bound)),
                        RelOp::Gt | RelOp::Ge => atoms.push(Atom::rect(hi, *op, *bound)),
                        RelOp::Eq => {
                            atoms.push(Atom::rect(lo, RelOp::Le, *bound));
                            atoms.push(Atom::rect(hi, RelOp::Ge, *bound));
                        }
                    }
                }
                _ => atoms.push(atom.clone()),
            }
        }
        Predicate::new(atoms)
    };

    let mut transitions = Vec::new();
    let mut origin = Vec::new();
    for (i, t) in a.transitions.iter().enumerate() {
        let mut jump = Jump::identity();
        for (x, c) in &t.jump.assign {
            match bounds.get(x) {
                Some((lo, hi)) => {
                    jump.assign.insert(lo.clone(), *c);
                    jump.assign.insert(hi.clone(), *c);
                }
                None => {
                    jump.assign.insert(x.clone(), *c);
                }
            }
        }
        let mut cases: Vec<Case> = vec![(Vec::new(), Vec::new())];
        for atom in &t.guard.atoms {
            let alternatives = match atom {
                Atom::Rect { var, op, bound } if bounds.contains_key(var) => {
                    let (lo, hi) = &bounds[var];
                    split_atom(*op, *bound, lo, hi)
                }
                _ => vec![(vec![atom.clone()], vec![])],
            };
            cases = cases
                .iter()
                .flat_map(|(atoms, clamps)| {
                    alternatives.iter().map(move |(more, extra)| {
                        let mut atoms = atoms.clone();
                        atoms.extend(more.iter().cloned());
                        let mut clamps = clamps.clone();
                        clamps.extend(extra.iter().cloned());
                        (atoms, clamps)
                    })
                })
                .collect();
        }
        for (atoms, clamps) in cases {
            let mut jump = jump.clone();
            let mut clamped: BTreeMap<String, i64> = BTreeMap::new();
            for (v, c) in clamps {
                let lower = v.ends_with("_l");
                clamped
                    .entry(v)
                    .and_modify(|old| *old = if lower { (*old).max(c) } else { (*old).min(c) })
                    .or_insert(c);
            }
            for (v, c) in clamped {
                jump.assign.entry(v).or_insert(c);
            }
            transitions.push(Transition {
                source: t.source,
                guard: Predicate::new(atoms),
                action: t.action.clone(),
                jump,
                target: t.target,
            });
            origin.push(i);
        }
    }

    let out = HybridAutomaton {
        name: a.name.clone(),
        modes: a.modes.clone(),
        initial: a.initial.clone(),
        actions: a.actions.clone(),
        vars,
        transitions,
        invariants: a.invariants.iter().map(relaxed).collect(),
        flows,
        init_valuations: both(&a.init_valuations),
        labels: a.labels.clone(),
    };
    out.validate()?;
    Ok(RectSplit { automaton: out, origin, bounds })
}

/// A mode of the timed automaton: a copy of an original mode together with
/// the value every variable had at its last reset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeCopy {
    pub original: usize,
    pub anchors: BTreeMap<String, Rational>,
}

/// How to read the timed automaton back as the multi-rate one: in copy `m`
/// with clock value `t`, variable `x` has value `anchor + rate · t / factor`,
/// and a delay `d` of the original takes `factor · d` time units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleCertificate {
    pub factor: i64,
    pub modes: Vec<ModeCopy>,
    /// Rates of the original automaton, per copy.
    pub rates: Vec<BTreeMap<String, i64>>,
    /// Original transition of every new transition.
    pub edges: Vec<usize>,
}

impl ScaleCertificate {
    pub fn value(&self, mode: usize, var: &str, clock: &Rational) -> Rational {
        let rate = int(self.rates[mode][var]);
        self.modes[mode].anchors[var].clone() + rate * clock / int(self.factor)
    }

    /// Maps a path of original transitions, starting in timed mode `start`,
    /// to the corresponding path of timed transitions. `None` when some step
    /// was removed because its guard can never hold.
    pub fn map_path(&self, reduced: &HybridAutomaton, start: usize, path: &[usize]) -> Option<Vec<usize>> {
        let mut mode = start;
        let mut out = Vec::new();
        for &e in path {
            let next = (0..self.edges.len()).find(|&i| self.edges[i] == e && reduced.transitions[i].source == mode)?;
            out.push(next);
            mode = reduced.transitions[next].target;
        }
        Some(out)
    }

    /// The original-valuation view of a timed configuration.
    pub fn valuation(&self, mode: usize, clocks: &Valuation) -> Valuation {
        clocks.iter().map(|(x, t)| (x.clone(), self.value(mode, x, t))).collect()
    }
}

/// A translated atom: statically decided, or `clock ⋈ bound` before scaling.
enum Translated {
    Const(bool),
    Clock(String, RelOp, Rational),
}

fn translate_atom(atom: &Atom, anchors: &BTreeMap<String, Rational>, rates: &BTreeMap<String, i64>) -> Translated {
    let Atom::Rect { var, op, bound } = atom else {
        unreachable!("multi-rate automata have no diagonal constraints")
    };
    let c = &anchors[var];
    let r = rates[var];
    if r == 0 {
        return Translated::Const(op.holds(c, &int(*bound)));
    }
    let b = (int(*bound) - c) / int(r);
    let op = if r < 0 { op.flipped() } else { *op };
    if b.is_negative() {
        return Translated::Const(matches!(op, RelOp::Gt | RelOp::Ge));
    }
    if b.is_zero() {
        match op {
            RelOp::Ge => return Translated::Const(true),
            RelOp::Lt => return Translated::Const(false),
            _ => {}
        }
    }
    Translated::Clock(var.clone(), op, b)
}

/// `None` when the conjunction is statically false.
fn translate_predicate(
    p: &Predicate,
    anchors: &BTreeMap<String, Rational>,
    rates: &BTreeMap<String, i64>,
) -> Option<Vec<(String, RelOp, Rational)>> {
    let mut out = Vec::new();
    for atom in &p.atoms {
        match translate_atom(atom, anchors, rates) {
            Translated::Const(true) => {}
            Translated::Const(false) => return None,
            Translated::Clock(x, op, b) => out.push((x, op, b)),
        }
    }
    Some(out)
}

/// Rescales every variable to a unit-rate clock. Modes are copied once per
/// reachable vector of reset values, so that each copy knows the affine map
/// between clock and variable.
pub fn multirate_to_timed(a: &HybridAutomaton) -> Result<(HybridAutomaton, ScaleCertificate), ReduceError> {
    require(a, Class::MultiRate)?;
    let v0 = a.initial_point().ok_or(ReduceError::NoInitialPoint)?;
    let rates: Vec<BTreeMap<String, i64>> = (0..a.modes.len())
        .map(|m| a.vars.iter().map(|x| (x.clone(), a.rate(m, x).as_const().expect("constant rate"))).collect())
        .collect();

    let mut copies: Vec<ModeCopy> = Vec::new();
    let mut index: BTreeMap<(usize, Vec<Rational>), usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |m: usize, anchors: BTreeMap<String, Rational>, copies: &mut Vec<ModeCopy>, queue: &mut VecDeque<usize>| {
        let key = (m, anchors.values().cloned().collect::<Vec<_>>());
        *index.entry(key).or_insert_with(|| {
            copies.push(ModeCopy { original: m, anchors });
            queue.push_back(copies.len() - 1);
            copies.len() - 1
        })
    };
    let mut initial = Vec::new();
    for &m in &a.initial {
        initial.push(intern(m, v0.clone(), &mut copies, &mut queue));
    }
    // (source copy, original edge, target copy, translated guard)
    let mut raw_edges = Vec::new();
    while let Some(ci) = queue.pop_front() {
        let ModeCopy { original: m, anchors } = copies[ci].clone();
        for e in a.outgoing(m) {
            let t = &a.transitions[e];
            let Some(guard) = translate_predicate(&t.guard, &anchors, &rates[m]) else {
                continue;
            };
            let mut next = anchors.clone();
            for (x, c) in &t.jump.assign {
                next.insert(x.clone(), int(*c));
            }
            let target = intern(t.target, next, &mut copies, &mut queue);
            raw_edges.push((ci, e, target, guard));
        }
    }
    let invariants: Vec<Option<Vec<(String, RelOp, Rational)>>> = copies
        .iter()
        .map(|c| translate_predicate(&a.invariants[c.original], &c.anchors, &rates[c.original]))
        .collect();

    let mut factor = num_bigint::BigInt::one();
    let all_bounds = raw_edges.iter().flat_map(|r| &r.3).chain(invariants.iter().flatten().flatten());
    for (_, _, b) in all_bounds {
        factor = factor.lcm(b.denom());
    }
    let factor_i = factor.to_i64().ok_or_else(|| ReduceError::ConstantOverflow(factor.to_string()))?;
    let scale = |atoms: &[(String, RelOp, Rational)]| -> Result<Predicate, ReduceError> {
        atoms
            .iter()
            .map(|(x, op, b)| {
                let v = (b * int(factor_i)).to_integer();
                let v = v.to_i64().ok_or_else(|| ReduceError::ConstantOverflow(v.to_string()))?;
                Ok(Atom::rect(x, *op, v))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Predicate::new)
    };

    let mut per_mode: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &copies {
        *per_mode.entry(c.original).or_default() += 1;
    }
    let mut seen_copy: BTreeMap<usize, usize> = BTreeMap::new();
    let mut modes = Vec::new();
    for c in &copies {
        let base = &a.modes[c.original];
        let name = if per_mode[&c.original] == 1 {
            base.clone()
        } else {
            let k = seen_copy.entry(c.original).or_default();
            *k += 1;
            let name = format!("{base}.{k}");
            if a.modes.contains(&name) {
                return Err(ReduceError::NameCollision(name));
            }
            name
        };
        modes.push(name);
    }
    let mut out_invariants = Vec::new();
    for inv in &invariants {
        out_invariants.push(match inv {
            Some(atoms) => scale(atoms)?,
            // empty mode copy: no clock is ever negative
            None => Predicate::new(vec![Atom::rect(&a.vars[0], RelOp::Lt, 0)]),
        });
    }
    let mut transitions = Vec::new();
    let mut edges = Vec::new();
    for (src, e, dst, guard) in &raw_edges {
        let t = &a.transitions[*e];
        transitions.push(Transition {
            source: *src,
            guard: scale(guard)?,
            action: t.action.clone(),
            jump: Jump { assign: t.jump.assign.keys().map(|x| (x.clone(), 0)).collect() },
            target: *dst,
        });
        edges.push(*e);
    }
    let out = HybridAutomaton {
        name: a.name.clone(),
        modes,
        initial,
        actions: a.actions.clone(),
        vars: a.vars.clone(),
        transitions,
        invariants: out_invariants,
        flows: copies.iter().map(|_| a.vars.iter().map(|x| (x.clone(), Rate::Const(1))).collect()).collect(),
        init_valuations: Predicate::new(a.vars.iter().map(|x| Atom::rect(x, RelOp::Eq, 0)).collect()),
        labels: copies.iter().map(|c| a.labels[c.original].clone()).collect(),
    };
    out.validate()?;
    let cert_rates = copies.iter().map(|c| rates[c.original].clone()).collect();
    Ok((out, ScaleCertificate { factor: factor_i, modes: copies, rates: cert_rates, edges }))
}
