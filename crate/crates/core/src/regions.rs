//! Clock regions and the region graph of a timed automaton.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::classify::{classify, max_constant, Class};
use crate::kripke::{FiniteKripke, KTransition};
use crate::model::{Atom, HybridAutomaton, Predicate, RelOp, Valuation};
use crate::rational::{floor, fract, int, Rational};

/// Equivalence class of clock valuations for constant bound `k`.
///
/// Clocks are addressed by position. `ints[i]` is `None` when clock `i`
/// exceeds `k`. Bounded clocks are either in `zero` (integral value) or in
/// exactly one of `blocks`, which lists the clocks with equal fractional
/// parts in increasing order of that fraction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Region {
    pub k: u64,
    pub ints: Vec<Option<u64>>,
    pub zero: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    #[error("clock `{0}` has a negative value")]
    NegativeClock(String),
    #[error("diagonal constraint `{0}` is not supported by the region abstraction")]
    DiagonalUnsupported(String),
    #[error("region graphs need a timed automaton, got {0}")]
    WrongClass(Class),
    #[error("valuations range over different clocks")]
    ClockMismatch,
}

/// The region of `v` (clocks in key order).
pub fn region_of(v: &Valuation, k: u64) -> Result<Region, RegionError> {
    let kr = Rational::from_integer(k.into());
    let mut ints = Vec::with_capacity(v.len());
    let mut zero = Vec::new();
    let mut fracs: Vec<(Rational, usize)> = Vec::new();
    for (i, (x, value)) in v.iter().enumerate() {
        if value.is_negative() {
            return Err(RegionError::NegativeClock(x.clone()));
        }
        if *value > kr {
            ints.push(None);
            continue;
        }
        ints.push(Some(floor(value).to_u64().expect("bounded by k")));
        let fr = fract(value);
        if fr.is_zero() {
            zero.push(i);
        } else {
            fracs.push((fr, i));
        }
    }
    fracs.sort();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut last: Option<Rational> = None;
    for (fr, i) in fracs {
        if last.as_ref() == Some(&fr) {
            blocks.last_mut().unwrap().push(i);
        } else {
            blocks.push(vec![i]);
            last = Some(fr);
        }
    }
    Ok(Region { k, ints, zero, blocks })
}

/// Whether `v` and `w` lie in the same region.
pub fn region_equiv(v: &Valuation, w: &Valuation, k: u64) -> Result<bool, RegionError> {
    if v.keys().ne(w.keys()) {
        return Err(RegionError::ClockMismatch);
    }
    Ok(region_of(v, k)? == region_of(w, k)?)
}

impl Region {
    /// The region of the all-zero valuation over `n` clocks.
    pub fn zero(n: usize, k: u64) -> Region {
        Region { k, ints: vec![Some(0); n], zero: (0..n).collect(), blocks: Vec::new() }
    }

    pub fn clocks(&self) -> usize {
        self.ints.len()
    }

    /// True when every clock exceeds `k`.
    pub fn is_unbounded(&self) -> bool {
        self.ints.iter().all(Option::is_none)
    }

    /// The next region reached by letting time pass; the all-unbounded
    /// region is its own successor.
    pub fn time_successor(&self) -> Region {
        let mut r = self.clone();
        if !r.zero.is_empty() {
            let mut moving = Vec::new();
            for x in core::mem::take(&mut r.zero) {
                if r.ints[x] == Some(r.k) {
                    r.ints[x] = None;
                } else {
                    moving.push(x);
                }
            }
            if !moving.is_empty() {
                r.blocks.insert(0, moving);
            }
        } else if let Some(last) = r.blocks.pop() {
            for &x in &last {
                r.ints[x] = r.ints[x].map(|n| n + 1);
            }
            r.zero = last;
        }
        r
    }

    /// Sets the given clocks to zero.
    pub fn reset(&self, clocks: &[usize]) -> Region {
        let mut r = self.clone();
        for &x in clocks {
            r.ints[x] = Some(0);
            for b in &mut r.blocks {
                b.retain(|&y| y != x);
            }
            if !r.zero.contains(&x) {
                r.zero.push(x);
            }
        }
        r.blocks.retain(|b| !b.is_empty());
        r.zero.sort_unstable();
        r
    }

    /// Truth of `x ⋈ c` for clock `x`, for `c ≤ k`.
    pub fn satisfies(&self, x: usize, op: RelOp, c: i64) -> bool {
        let Some(n) = self.ints[x] else {
            return matches!(op, RelOp::Gt | RelOp::Ge);
        };
        let n = n as i64;
        if self.zero.contains(&x) {
            return op.holds(&n, &c);
        }
        // n < value < n + 1
        match op {
            RelOp::Lt | RelOp::Le => n < c,
            RelOp::Eq => false,
            RelOp::Gt | RelOp::Ge => n >= c,
        }
    }

    /// A valuation inside the region, as values in clock order.
    pub fn sample(&self) -> Vec<Rational> {
        let m = self.blocks.len() as i64;
        let mut out = vec![Rational::zero(); self.clocks()];
        for (x, n) in self.ints.iter().enumerate() {
            out[x] = match n {
                Some(n) => int(*n as i64),
                None => int(self.k as i64 + 1),
            };
        }
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                out[x] += Rational::new((i as i64 + 1).into(), (m + 1).into());
            }
        }
        out
    }

    /// Renders the region with clock names.
    pub fn describe(&self, clocks: &[String]) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (x, n) in self.ints.iter().enumerate() {
            let name = &clocks[x];
            parts.push(match n {
                None => format!("{name}>{}", self.k),
                Some(n) if self.zero.contains(&x) => format!("{name}={n}"),
                Some(n) => format!("{n}<{name}<{}", n + 1),
            });
        }
        if self.blocks.iter().map(Vec::len).sum::<usize>() > 1 {
            let order: Vec<String> = self
                .blocks
                .iter()
                .map(|b| b.iter().map(|&x| clocks[x].as_str()).collect::<Vec<_>>().join("="))
                .collect();
            parts.push(format!("frac {}", order.join("<")));
        }
        parts.join(" ")
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.clocks()).map(|i| format!("c{i}")).collect();
        f.write_str(&self.describe(&names))
    }
}

/// `|M| · |X|! · 2^|X| · (2K+2)^|X|`.
pub fn region_count_bound(modes: u64, clocks: u64, k: u64) -> BigUint {
    let mut out = BigUint::from(modes);
    for i in 1..=clocks {
        out *= BigUint::from(i) * 2u32 * BigUint::from(2 * k + 2);
    }
    out
}

/// Finite Kripke structure over reachable `(mode, region)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionGraph {
    pub kripke: FiniteKripke,
    /// `(mode, region)` of each Kripke state.
    pub states: Vec<(usize, Region)>,
    pub clocks: Vec<String>,
    pub k: u64,
    /// States that only had time left to pass and received a stutter loop.
    pub deadlocks: Vec<usize>,
}

struct Builder<'a> {
    a: &'a HybridAutomaton,
    clocks: Vec<String>,
    index: BTreeMap<(usize, Region), usize>,
    states: Vec<(usize, Region)>,
    chains: BTreeMap<(usize, Region), Vec<Region>>,
}

impl Builder<'_> {
    fn clock(&self, x: &str) -> usize {
        self.clocks.iter().position(|c| c == x).expect("validated clock")
    }

    fn holds(&self, p: &Predicate, r: &Region) -> bool {
        p.atoms.iter().all(|atom| match atom {
            Atom::Rect { var, op, bound } => r.satisfies(self.clock(var), *op, *bound),
            Atom::Diag { .. } => unreachable!("diagonals are rejected up front"),
        })
    }

    /// Regions reachable from `r` by letting time pass in `mode`.
    fn chain(&mut self, mode: usize, r: &Region) -> Vec<Region> {
        if let Some(c) = self.chains.get(&(mode, r.clone())) {
            return c.clone();
        }
        let inv = &self.a.invariants[mode];
        let mut out = Vec::new();
        if self.holds(inv, r) {
            let mut cur = r.clone();
            out.push(cur.clone());
            loop {
                let next = cur.time_successor();
                if next == cur || !self.holds(inv, &next) {
                    break;
                }
                out.push(next.clone());
                cur = next;
            }
        }
        self.chains.insert((mode, r.clone()), out.clone());
        out
    }

    fn state(&mut self, mode: usize, r: Region, queue: &mut VecDeque<usize>) -> usize {
        let key = (mode, r);
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.states.len();
        self.index.insert(key.clone(), i);
        self.states.push(key);
        queue.push_back(i);
        i
    }
}

/// Region graph of a diagonal-free timed automaton, with `K` the largest
/// constant of the automaton.
pub fn region_graph(a: &HybridAutomaton) -> Result<RegionGraph, RegionError> {
    region_graph_with_k(a, 0)
}

/// Like [`region_graph`] with `K` raised to at least `k`.
///
/// A state `(m, r)` is a mode entered (or started) together with a region
/// reached by waiting. Each Kripke transition is one discrete edge, preceded
/// and followed by time passing, so the target is any region in the time
/// chain after the jump. States with no transition get a stutter loop.
pub fn region_graph_with_k(a: &HybridAutomaton, k: u64) -> Result<RegionGraph, RegionError> {
    let report = classify(a);
    if report.class != Class::Timed {
        return Err(RegionError::WrongClass(report.class));
    }
    let diag = a
        .transitions
        .iter()
        .map(|t| &t.guard)
        .chain(&a.invariants)
        .flat_map(|p| &p.atoms)
        .find(|atom| matches!(atom, Atom::Diag { .. }));
    if let Some(atom) = diag {
        return Err(RegionError::DiagonalUnsupported(format!("{atom}")));
    }
    let mut clocks = a.vars.clone();
    clocks.sort();
    let k = k.max(max_constant(a));
    let mut b = Builder { a, clocks, index: BTreeMap::new(), states: Vec::new(), chains: BTreeMap::new() };
    let mut queue = VecDeque::new();
    let mut initial = Vec::new();
    let zero = Region::zero(b.clocks.len(), k);
    for &m in &a.initial {
        for r in b.chain(m, &zero) {
            let s = b.state(m, r, &mut queue);
            if !initial.contains(&s) {
                initial.push(s);
            }
        }
    }
    let mut edges: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    while let Some(s) = queue.pop_front() {
        let (mode, region) = b.states[s].clone();
        for r in b.chain(mode, &region) {
            for e in a.outgoing(mode) {
                let t = &a.transitions[e];
                if !b.holds(&t.guard, &r) {
                    continue;
                }
                let resets: Vec<usize> = t.jump.assign.keys().map(|x| b.clock(x)).collect();
                let after = r.reset(&resets);
                for r2 in b.chain(t.target, &after) {
                    let s2 = b.state(t.target, r2, &mut queue);
                    edges.insert((s, e, s2));
                }
            }
        }
    }
    let mut kripke = FiniteKripke::new();
    kripke.props = a.propositions();
    for (m, r) in &b.states {
        kripke.add_labeled_state(format!("{} {}", a.modes[*m], r.describe(&b.clocks)), a.labels[*m].clone());
    }
    kripke.initial = initial;
    kripke.transitions = edges
        .into_iter()
        .map(|(from, e, to)| KTransition { from, action: a.transitions[e].action.clone(), to, edge: Some(e) })
        .collect();
    let deadlocks = kripke.close_deadlocks();
    Ok(RegionGraph { kripke, states: b.states, clocks: b.clocks, k, deadlocks })
}

/// Valuation from values in clock order.
pub fn valuation_of(clocks: &[String], values: &[Rational]) -> Valuation {
    clocks.iter().cloned().zip(values.iter().cloned()).collect()
}

/// Delays after which some clock of `v` crosses an integer up to `k + 1`,
/// plus midpoints between them; every region of the time chain of `v` is hit
/// by one of these delays.
pub fn witness_delays(v: &Valuation, k: u64) -> Vec<Rational> {
    let mut events: BTreeSet<Rational> = BTreeSet::new();
    events.insert(Rational::zero());
    for value in v.values() {
        for n in 0..=k as i64 + 1 {
            let d = int(n) - value;
            if !d.is_negative() {
                events.insert(d);
            }
        }
    }
    let events: Vec<Rational> = events.into_iter().collect();
    let mut out = events.clone();
    for w in events.windows(2) {
        out.push((&w[0] + &w[1]) / int(2));
    }
    out.push(events.last().unwrap() + Rational::one());
    out.sort();
    out
}
