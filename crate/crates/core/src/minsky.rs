//! Two-counter Minsky machines and their encoding as a hybrid automaton whose
//! runs simulate the machine, with counters stored as `x = 1/2^c`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ltl::Ltl;
use crate::model::{Atom, AutomatonBuilder, HybridAutomaton, Jump, Rate, RelOp, Valuation};
use crate::rational::{int, Rational};
use crate::semantics::{path_feasible, Feasibility, PathQuery, SemanticsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Counter {
    C1,
    C2,
}

impl Counter {
    fn index(self) -> usize {
        match self {
            Counter::C1 => 0,
            Counter::C2 => 1,
        }
    }

    /// Variable holding this counter in the encoding.
    pub fn var(self) -> &'static str {
        match self {
            Counter::C1 => "x1",
            Counter::C2 => "x2",
        }
    }

    pub fn other(self) -> Counter {
        match self {
            Counter::C1 => Counter::C2,
            Counter::C2 => Counter::C1,
        }
    }
}

impl fmt::Display for Counter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Counter::C1 => "c1",
            Counter::C2 => "c2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instr {
    Inc { counter: Counter, next: usize },
    TestDec { counter: Counter, pos: usize, zero: usize },
    Halt,
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Inc { counter, next } => write!(f, "INC {counter} -> {next}"),
            Instr::TestDec { counter, pos, zero } => write!(f, "DEC {counter} ? {pos} : {zero}"),
            Instr::Halt => f.write_str("HALT"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MinskyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("instruction {at} jumps to {target}, past the last instruction")]
    TargetOutOfRange { at: usize, target: usize },
    #[error("the last instruction, and only it, must be HALT")]
    HaltPlacement,
    #[error("machine still running after {0} steps")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinskyMachine {
    instrs: Vec<Instr>,
}

impl MinskyMachine {
    pub fn new(instrs: Vec<Instr>) -> Result<MinskyMachine, MinskyError> {
        let n = instrs.len();
        if n == 0 || instrs[n - 1] != Instr::Halt || instrs[..n - 1].contains(&Instr::Halt) {
            return Err(MinskyError::HaltPlacement);
        }
        for (at, i) in instrs.iter().enumerate() {
            let targets = match *i {
                Instr::Inc { next, .. } => vec![next],
                Instr::TestDec { pos, zero, .. } => vec![pos, zero],
                Instr::Halt => vec![],
            };
            if let Some(&target) = targets.iter().find(|&&t| t >= n) {
                return Err(MinskyError::TargetOutOfRange { at, target });
            }
        }
        Ok(MinskyMachine { instrs })
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }

    pub fn halt_index(&self) -> usize {
        self.instrs.len() - 1
    }
}

impl fmt::Display for MinskyMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.instrs {
            writeln!(f, "{i}")?;
        }
        Ok(())
    }
}

/// One instruction per line: `INC c1 -> 3`, `DEC c2 ? 4 : 5`, `HALT`.
/// Blank lines and `#` comments are skipped.
impl FromStr for MinskyMachine {
    type Err = MinskyError;

    fn from_str(text: &str) -> Result<MinskyMachine, MinskyError> {
        let mut instrs = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| MinskyError::Parse { line: no + 1, message: message.to_string() };
            let counter = |w: Option<&str>| match w {
                Some("c1") => Ok(Counter::C1),
                Some("c2") => Ok(Counter::C2),
                _ => Err(err("expected counter c1 or c2")),
            };
            let target = |w: Option<&str>| w.and_then(|w| w.parse::<usize>().ok()).ok_or_else(|| err("expected instruction number"));
            let words: Vec<&str> = line.split_whitespace().collect();
            let mut it = words.iter().copied();
            let instr = match it.next() {
                Some("HALT") => Instr::Halt,
                Some("INC") => {
                    let counter = counter(it.next())?;
                    if it.next() != Some("->") {
                        return Err(err("expected `->`"));
                    }
                    Instr::Inc { counter, next: target(it.next())? }
                }
                Some("DEC") => {
                    let counter = counter(it.next())?;
                    if it.next() != Some("?") {
                        return Err(err("expected `?`"));
                    }
                    let pos = target(it.next())?;
                    if it.next() != Some(":") {
                        return Err(err("expected `:`"));
                    }
                    Instr::TestDec { counter, pos, zero: target(it.next())? }
                }
                _ => return Err(err("expected INC, DEC or HALT")),
            };
            if it.next().is_some() {
                return Err(err("trailing input"));
            }
            instrs.push(instr);
        }
        MinskyMachine::new(instrs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MinskyConfig {
    pub pc: usize,
    pub counters: [u64; 2],
}

impl MinskyConfig {
    pub fn initial() -> MinskyConfig {
        MinskyConfig { pc: 0, counters: [0, 0] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Next(MinskyConfig),
    Halted,
}

pub fn step(m: &MinskyMachine, cfg: &MinskyConfig) -> Step {
    let mut next = *cfg;
    match m.instrs[cfg.pc] {
        Instr::Halt => return Step::Halted,
        Instr::Inc { counter, next: to } => {
            next.counters[counter.index()] += 1;
            next.pc = to;
        }
        Instr::TestDec { counter, pos, zero } => {
            let c = &mut next.counters[counter.index()];
            if *c == 0 {
                next.pc = zero;
            } else {
                *c -= 1;
                next.pc = pos;
            }
        }
    }
    Step::Next(next)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    /// Number of executed instructions and the configuration at HALT.
    Halted { steps: usize, last: MinskyConfig },
    Running(MinskyConfig),
}

/// Configurations visited from `(ℓ₀, 0, 0)`, at most `max_steps` steps.
pub fn trace(m: &MinskyMachine, max_steps: usize) -> Vec<MinskyConfig> {
    let mut cfg = MinskyConfig::initial();
    let mut out = vec![cfg];
    for _ in 0..max_steps {
        match step(m, &cfg) {
            Step::Next(n) => {
                cfg = n;
                out.push(cfg);
            }
            Step::Halted => break,
        }
    }
    out
}

pub fn run_bounded(m: &MinskyMachine, max_steps: usize) -> RunOutcome {
    let t = trace(m, max_steps);
    let last = *t.last().unwrap();
    if m.instrs[last.pc] == Instr::Halt {
        RunOutcome::Halted { steps: t.len() - 1, last }
    } else {
        RunOutcome::Running(last)
    }
}

/// Edge ids of the module simulating one instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Module {
    Inc {
        /// `ℓ → A`, `A → B`, `B → next`.
        edges: [usize; 3],
        /// Self-loops resetting the other counter in `ℓ`, `A`, `B`.
        wraps: [usize; 3],
    },
    TestDec {
        zero: usize,
        /// `ℓ → A`, `A → B`, `B → C`, `C → next`.
        edges: [usize; 4],
        wraps: [usize; 4],
    },
    Halt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    pub automaton: HybridAutomaton,
    /// `ℓ₀ ∧ ◇HALT`.
    pub formula: Ltl,
    /// Mode `ℓᵢ` of every instruction.
    pub entry: Vec<usize>,
    pub modules: Vec<Module>,
}

pub const HALT: &str = "HALT";

fn rect(x: &str, op: RelOp, c: i64) -> Atom {
    Atom::rect(x, op, c)
}

/// Builds the automaton over `x1, x2, y, z, z1, u` (`ż1 = 2`, every other
/// rate 1) with one module per instruction.
pub fn encode(m: &MinskyMachine) -> Encoding {
    use RelOp::*;
    let vars = ["x1", "x2", "y", "z", "z1", "u"];
    let mut b = AutomatonBuilder::new("minsky");
    for v in vars {
        b = b.var(v);
    }
    let l = |i: usize| format!("l{i}");
    for (i, instr) in m.instrs.iter().enumerate() {
        b = if i == 0 { b.initial_mode(&l(i)) } else { b.mode(&l(i)) };
        b = if *instr == Instr::Halt { b.label(&l(i), &[&l(i), HALT]) } else { b.label(&l(i), &[&l(i)]) };
        let extra: &[&str] = match instr {
            Instr::Inc { .. } => &["A", "B"],
            Instr::TestDec { .. } => &["A", "B", "C"],
            Instr::Halt => &[],
        };
        for s in extra {
            let name = format!("{s}{i}");
            b = b.mode(&name).label(&name, &[]);
        }
    }
    b = b
        .rate_everywhere("z1", Rate::Const(2))
        .init(vec![rect("x1", Eq, 1), rect("x2", Eq, 1), rect("y", Eq, 0), rect("z", Eq, 0), rect("z1", Eq, 0), rect("u", Eq, 0)]);

    let mut next_edge = 0;
    let mut edge = |b: AutomatonBuilder, src: &str, dst: &str, action: &str, guard: Vec<Atom>, jump: Jump| {
        next_edge += 1;
        (b.edge(src, dst, action, guard, jump), next_edge - 1)
    };
    let mut modules = Vec::new();
    for (i, instr) in m.instrs.iter().enumerate() {
        let (li, a, bb, c) = (l(i), format!("A{i}"), format!("B{i}"), format!("C{i}"));
        let wrap_loops = |b: AutomatonBuilder, modes: &[&str], other: &str, edge: &mut dyn FnMut(AutomatonBuilder, &str, &str, &str, Vec<Atom>, Jump) -> (AutomatonBuilder, usize)| {
            let mut b = b;
            let mut ids = Vec::new();
            for s in modes {
                let (nb, id) = edge(b, s, s, &format!("wrap{i}"), vec![rect(other, Eq, 1)], Jump::resets(&[(other, 0)]));
                b = nb;
                ids.push(id);
            }
            (b, ids)
        };
        match *instr {
            Instr::Inc { counter, next } => {
                let (own, other) = (counter.var(), counter.other().var());
                let (b1, e0) = edge(b, &li, &a, &format!("start{i}"), vec![rect(own, Eq, 1)], Jump::resets(&[("z", 0)]));
                let (b2, e1) = edge(
                    b1,
                    &a,
                    &bb,
                    &format!("halve{i}"),
                    vec![rect(own, Gt, 1), rect(other, Lt, 1), rect("y", Lt, 1)],
                    Jump::resets(&[(own, 0), ("z1", 0)]),
                );
                let (b3, e2) = edge(
                    b2,
                    &bb,
                    &l(next),
                    &format!("exit{i}"),
                    vec![Atom::diag("z", "z1", Eq, 0), rect("y", Eq, 1), rect(other, Le, 1)],
                    Jump::resets(&[("y", 0)]),
                );
                let (b4, w) = wrap_loops(b3, &[&li, &a, &bb], other, &mut edge);
                b = b4;
                modules.push(Module::Inc { edges: [e0, e1, e2], wraps: [w[0], w[1], w[2]] });
            }
            Instr::TestDec { counter, pos, zero } => {
                let (own, other) = (counter.var(), counter.other().var());
                let (b0, ez) = edge(b, &li, &l(zero), &format!("zero{i}"), vec![rect("y", Eq, 0), rect(own, Eq, 1)], Jump::identity());
                let (b1, e0) = edge(b0, &li, &a, &format!("start{i}"), vec![rect("y", Eq, 0), rect(own, Lt, 1)], Jump::resets(&[("u", 0)]));
                let (b2, e1) = edge(b1, &a, &bb, &format!("mark{i}"), vec![rect(own, Eq, 1)], Jump::resets(&[("z1", 0)]));
                let (b3, e2) = edge(b2, &bb, &c, &format!("double{i}"), vec![Atom::diag("z1", "u", Eq, 0)], Jump::resets(&[(own, 0)]));
                let (b4, e3) = edge(
                    b3,
                    &c,
                    &l(pos),
                    &format!("exit{i}"),
                    vec![rect("y", Eq, 2), rect(other, Le, 1)],
                    Jump::resets(&[("y", 0)]),
                );
                let (b5, w) = wrap_loops(b4, &[&li, &a, &bb, &c], other, &mut edge);
                b = b5;
                modules.push(Module::TestDec { zero: ez, edges: [e0, e1, e2, e3], wraps: [w[0], w[1], w[2], w[3]] });
            }
            Instr::Halt => modules.push(Module::Halt),
        }
    }
    let automaton = b.build().expect("encoder produces a well-formed automaton");
    let entry = (0..m.instrs.len()).map(|i| automaton.mode_index(&l(i)).unwrap()).collect();
    let formula = Ltl::prop("l0").and(Ltl::prop(HALT).eventually());
    Encoding { automaton, formula, entry, modules }
}

/// `1/2^c`.
pub fn encode_counter(c: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << c)
}

/// Valuation on entry to a module for counters `(c, d)`.
pub fn entry_valuation(counters: [u64; 2]) -> Valuation {
    let mut v = Valuation::new();
    v.insert("x1".into(), encode_counter(counters[0]));
    v.insert("x2".into(), encode_counter(counters[1]));
    for x in ["y", "z", "z1", "u"] {
        v.insert(x.into(), Rational::zero());
    }
    v
}

impl Encoding {
    /// The edge sequence simulating instruction `cfg.pc` from counters
    /// `cfg.counters`, with the other counter's wrap-arounds placed where it
    /// reaches 1. A wrap at the same instant as a module edge comes first.
    pub fn module_path(&self, m: &MinskyMachine, cfg: &MinskyConfig) -> Vec<usize> {
        let (counter, dwell, edges, wraps): (Counter, Vec<Rational>, Vec<usize>, Vec<usize>) =
            match (&m.instrs[cfg.pc], &self.modules[cfg.pc]) {
                (Instr::Inc { counter, .. }, Module::Inc { edges, wraps }) => {
                    let v = encode_counter(cfg.counters[counter.index()]);
                    let half = &v / int(2);
                    (*counter, vec![Rational::one() - &v, half.clone(), half], edges.to_vec(), wraps.to_vec())
                }
                (Instr::TestDec { counter, .. }, Module::TestDec { zero, edges, wraps }) => {
                    let c = cfg.counters[counter.index()];
                    if c == 0 {
                        return vec![*zero];
                    }
                    let v = encode_counter(c);
                    let rest = Rational::one() - &v;
                    (*counter, vec![Rational::zero(), rest.clone(), rest, &v * int(2)], edges.to_vec(), wraps.to_vec())
                }
                _ => return vec![],
            };
        let total: Rational = dwell.iter().fold(Rational::zero(), |a, d| a + d);
        let w = encode_counter(cfg.counters[counter.other().index()]);
        let mut wrap_times = Vec::new();
        let mut t = Rational::one() - w;
        while t < total {
            wrap_times.push(t.clone());
            t += Rational::one();
        }
        let mut path = Vec::new();
        let mut start = Rational::zero();
        for (seg, d) in dwell.iter().enumerate() {
            let end = &start + d;
            for t in &wrap_times {
                let inside = if seg == 0 { *t >= start && *t <= end } else { *t > start && *t <= end };
                if inside {
                    path.push(wraps[seg]);
                }
            }
            path.push(edges[seg]);
            start = end;
        }
        path
    }
}

/// Runs the machine for at most `max_steps` steps; when it halts, checks that
/// the encoded automaton realizes the induced edge sequence from its initial
/// configuration and ends in the HALT mode.
pub fn halting_path_check(m: &MinskyMachine, max_steps: usize) -> Result<bool, MinskyError> {
    let configs = trace(m, max_steps);
    let last = configs.last().unwrap();
    if m.instrs[last.pc] != Instr::Halt {
        return Err(MinskyError::BudgetExceeded(max_steps));
    }
    let enc = encode(m);
    let path: Vec<usize> = configs.iter().flat_map(|c| enc.module_path(m, c)).collect();
    Ok(match path_feasible(&enc.automaton, &PathQuery::new(path))? {
        Feasibility::Feasible { end, .. } => end.mode == enc.entry[m.halt_index()] && enc.automaton.labels[end.mode].contains(HALT),
        Feasibility::Infeasible => false,
    })
}

/// Propositions used by the encoding: every `ℓᵢ` and HALT.
pub fn propositions(m: &MinskyMachine) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = (0..m.instrs.len()).map(|i| format!("l{i}")).collect();
    out.insert(HALT.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::semantics::simulate;
    use rand::{Rng, SeedableRng};
    use Counter::*;

    fn machine(text: &str) -> MinskyMachine {
        text.parse().unwrap()
    }

    #[test]
    fn interpreter() {
        let m = machine("INC c1 -> 1\nHALT\n");
        assert_eq!(step(&m, &MinskyConfig::initial()), Step::Next(MinskyConfig { pc: 1, counters: [1, 0] }));
        assert_eq!(step(&m, &MinskyConfig { pc: 1, counters: [1, 0] }), Step::Halted);
        assert_eq!(run_bounded(&m, 10), RunOutcome::Halted { steps: 1, last: MinskyConfig { pc: 1, counters: [1, 0] } });
        assert_eq!(run_bounded(&m, 0), RunOutcome::Running(MinskyConfig::initial()));
        let d = machine("DEC c1 ? 1 : 2\nINC c1 -> 0\nHALT");
        assert_eq!(step(&d, &MinskyConfig { pc: 0, counters: [0, 5] }), Step::Next(MinskyConfig { pc: 2, counters: [0, 5] }));
        let forever = machine("INC c1 -> 0\nHALT");
        assert_eq!(run_bounded(&forever, 100), RunOutcome::Running(MinskyConfig { pc: 0, counters: [100, 0] }));
    }

    #[test]
    fn program_text() {
        let m = machine("# add\nINC c2 -> 1\n\nDEC c2 ? 2 : 2\nHALT\n");
        assert_eq!(
            m.instrs(),
            [Instr::Inc { counter: C2, next: 1 }, Instr::TestDec { counter: C2, pos: 2, zero: 2 }, Instr::Halt]
        );
        assert_eq!(machine(&m.to_string()), m);
        assert!(matches!("INC c3 -> 1\nHALT".parse::<MinskyMachine>(), Err(MinskyError::Parse { line: 1, .. })));
        assert_eq!("INC c1 -> 7\nHALT".parse::<MinskyMachine>(), Err(MinskyError::TargetOutOfRange { at: 0, target: 7 }));
        assert_eq!("HALT\nINC c1 -> 0".parse::<MinskyMachine>(), Err(MinskyError::HaltPlacement));
    }

    fn run_module(enc: &Encoding, m: &MinskyMachine, cfg: &MinskyConfig) -> Feasibility {
        let path = enc.module_path(m, cfg);
        path_feasible(&enc.automaton, &PathQuery::new(path).from(entry_valuation(cfg.counters))).unwrap()
    }

    #[test]
    fn increment_halves() {
        let m = machine("INC c1 -> 1\nHALT");
        let enc = encode(&m);
        for c in 0..4 {
            for d in 0..3 {
                let cfg = MinskyConfig { pc: 0, counters: [c, d] };
                let Feasibility::Feasible { delays, unique, end } = run_module(&enc, &m, &cfg) else {
                    panic!("increment infeasible for {c},{d}");
                };
                assert!(unique);
                assert_eq!(end.valuation["x1"], encode_counter(c + 1));
                assert_eq!(end.valuation["x2"], encode_counter(d));
                assert_eq!(end.valuation["y"], Rational::zero());
                assert_eq!(crate::semantics::total_time(&delays), Rational::one());
            }
        }
        // c = 1: both dwells after the start edge are 1/4
        let cfg = MinskyConfig { pc: 0, counters: [1, 1] };
        let path = enc.module_path(&m, &cfg);
        let Feasibility::Feasible { delays, .. } = run_module(&enc, &m, &cfg) else { panic!() };
        let start = path.iter().position(|&e| e == 0).unwrap();
        let k: Rational = delays[start + 1..path.iter().position(|&e| e == 1).unwrap() + 1].iter().sum();
        let l: Rational = delays[path.iter().position(|&e| e == 1).unwrap() + 1..].iter().sum();
        assert_eq!((k, l), (ratio(1, 4), ratio(1, 4)));
    }

    #[test]
    fn decrement_doubles() {
        let m = machine("DEC c1 ? 1 : 1\nHALT");
        let enc = encode(&m);
        for c in 0..5 {
            for d in 0..3 {
                let cfg = MinskyConfig { pc: 0, counters: [c, d] };
                let Feasibility::Feasible { delays, unique, end } = run_module(&enc, &m, &cfg) else {
                    panic!("decrement infeasible for {c},{d}");
                };
                assert!(unique);
                assert_eq!(end.valuation["x1"], encode_counter(c.saturating_sub(1)));
                assert_eq!(end.valuation["x2"], encode_counter(d));
                let expected = if c == 0 { 0 } else { 2 };
                assert_eq!(crate::semantics::total_time(&delays), int(expected));
            }
        }
    }

    #[test]
    fn second_counter_modules() {
        let m = machine("INC c2 -> 1\nDEC c2 ? 0 : 2\nHALT");
        let enc = encode(&m);
        for (pc, c, d) in [(0, 2, 0), (0, 0, 3), (1, 1, 2), (1, 3, 0)] {
            let cfg = MinskyConfig { pc, counters: [c, d] };
            let Feasibility::Feasible { end, .. } = run_module(&enc, &m, &cfg) else { panic!("{cfg:?}") };
            let Step::Next(after) = step(&m, &cfg) else { unreachable!() };
            assert_eq!(end.mode, enc.entry[after.pc]);
            assert_eq!(end.valuation["x1"], encode_counter(after.counters[0]));
            assert_eq!(end.valuation["x2"], encode_counter(after.counters[1]));
        }
    }

    #[test]
    fn wrong_counter_values_are_rejected() {
        // the increment cannot leave with anything but the halved value
        let m = machine("INC c1 -> 1\nHALT");
        let enc = encode(&m);
        let cfg = MinskyConfig { pc: 0, counters: [1, 0] };
        let path = enc.module_path(&m, &cfg);
        let Feasibility::Feasible { delays, .. } = run_module(&enc, &m, &cfg) else { panic!() };
        let mut wrong: Vec<Option<Rational>> = delays.iter().cloned().map(Some).collect();
        let last = wrong.len() - 1;
        wrong[last] = Some(&delays[last] + ratio(1, 8));
        let q = PathQuery::new(path).from(entry_valuation(cfg.counters)).with_delays(wrong);
        assert!(!path_feasible(&enc.automaton, &q).unwrap().is_feasible());
    }

    #[test]
    fn encoding_shape() {
        let m = machine("INC c1 -> 1\nDEC c1 ? 1 : 2\nHALT");
        let enc = encode(&m);
        let a = &enc.automaton;
        assert_eq!(a.modes, ["l0", "A0", "B0", "l1", "A1", "B1", "C1", "l2"]);
        assert_eq!(a.rate(0, "z1"), &Rate::Const(2));
        assert_eq!(a.rate(0, "x1"), &Rate::Const(1));
        assert!(a.labels[7].contains(HALT));
        assert_eq!(enc.formula.to_string(), "l0 && F HALT");
        assert_eq!(a.propositions(), propositions(&m));
    }

    #[test]
    fn single_increment_program_reaches_halt() {
        let m = machine("INC c1 -> 1\nHALT");
        let enc = encode(&m);
        let path = enc.module_path(&m, &MinskyConfig::initial());
        let f = path_feasible(&enc.automaton, &PathQuery::new(path.clone())).unwrap();
        let Feasibility::Feasible { delays, end, .. } = f else { panic!() };
        assert_eq!(end.mode, enc.entry[1]);
        let script: Vec<(Rational, usize)> = delays.into_iter().zip(path).collect();
        let run = simulate(&enc.automaton, &script).unwrap();
        assert_eq!(run.end().valuation["x1"], ratio(1, 2));
        assert!(halting_path_check(&m, 10).unwrap());
    }

    pub(crate) fn sample_programs() -> Vec<MinskyMachine> {
        [
            "INC c1 -> 1\nHALT",
            // c1 := 3, then move it to c2
            "INC c1 -> 1\nINC c1 -> 2\nINC c1 -> 3\nDEC c1 ? 4 : 5\nINC c2 -> 3\nHALT",
            // count down c2 after raising it twice
            "INC c2 -> 1\nINC c2 -> 2\nDEC c2 ? 2 : 3\nHALT",
            // zero test on an untouched counter
            "DEC c1 ? 0 : 1\nINC c2 -> 2\nDEC c2 ? 3 : 3\nHALT",
            // c1 := 2; c2 := 2 * c1
            "INC c1 -> 1\nINC c1 -> 2\nDEC c1 ? 3 : 5\nINC c2 -> 4\nINC c2 -> 2\nHALT",
        ]
        .iter()
        .map(|t| machine(t))
        .collect()
    }

    #[test]
    fn halting_programs() {
        for m in sample_programs() {
            let RunOutcome::Halted { steps, .. } = run_bounded(&m, 30) else { panic!("{m}") };
            assert!(steps <= 30);
            assert!(halting_path_check(&m, 30).unwrap(), "{m}");
        }
        let forever = machine("INC c1 -> 0\nHALT");
        assert_eq!(halting_path_check(&forever, 50), Err(MinskyError::BudgetExceeded(50)));
    }

    #[test]
    fn encoding_invariant_on_prefixes() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        let mut checked = 0;
        while checked < 40 {
            let n = rng.gen_range(2..=5);
            let counter = |rng: &mut rand::rngs::StdRng| if rng.gen_bool(0.5) { C1 } else { C2 };
            let mut instrs: Vec<Instr> = (0..n - 1)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        Instr::Inc { counter: counter(&mut rng), next: rng.gen_range(0..n) }
                    } else {
                        Instr::TestDec { counter: counter(&mut rng), pos: rng.gen_range(0..n), zero: rng.gen_range(0..n) }
                    }
                })
                .collect();
            instrs.push(Instr::Halt);
            let m = MinskyMachine::new(instrs).unwrap();
            let enc = encode(&m);
            let configs = trace(&m, 12);
            let mut path = Vec::new();
            for w in configs.windows(2) {
                if w[1].counters.iter().any(|&c| c > 4) {
                    break;
                }
                path.extend(enc.module_path(&m, &w[0]));
                let Feasibility::Feasible { end, unique, .. } = path_feasible(&enc.automaton, &PathQuery::new(path.clone())).unwrap()
                else {
                    panic!("prefix infeasible: {m}");
                };
                assert!(unique);
                assert_eq!(end.mode, enc.entry[w[1].pc]);
                assert_eq!(end.valuation, entry_valuation(w[1].counters).into_iter().map(|(x, v)| {
                    let v = if ["z", "z1", "u"].contains(&x.as_str()) { end.valuation[&x].clone() } else { v };
                    (x, v)
                }).collect());
                checked += 1;
            }
        }
    }
}
