//! LTL to Büchi translation by tableau expansion into a generalized Büchi
//! automaton, followed by counter degeneralization.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{has_accepting_cycle, BuchiGraph};
use crate::ltl::{to_nnf, Lasso, Ltl};

/// Edge condition: propositions that must hold and must not hold.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guard {
    pub pos: BTreeSet<String>,
    pub neg: BTreeSet<String>,
}

impl Guard {
    pub fn matches(&self, letter: &BTreeSet<String>) -> bool {
        self.pos.iter().all(|p| letter.contains(p)) && self.neg.iter().all(|p| !letter.contains(p))
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits: Vec<String> = self
            .pos
            .iter().cloned()
            .chain(self.neg.iter().map(|p| format!("!{p}")))
            .collect();
        if lits.is_empty() {
            f.write_str("true")
        } else {
            f.write_str(&lits.join(" && "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BuchiEdge {
    pub from: usize,
    pub guard: Guard,
    pub to: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuchiAutomaton {
    pub states: Vec<String>,
    pub initial: Vec<usize>,
    pub edges: Vec<BuchiEdge>,
    pub accepting: BTreeSet<usize>,
}

impl BuchiAutomaton {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Outgoing edges per state, in edge order.
    pub fn out_edges(&self) -> Vec<Vec<&BuchiEdge>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for e in &self.edges {
            out[e.from].push(e);
        }
        out
    }
}

/// A tableau node under construction.
#[derive(Debug, Clone)]
struct Node {
    incoming: BTreeSet<usize>,
    new: Vec<Ltl>,
    old: BTreeSet<Ltl>,
    next: BTreeSet<Ltl>,
}

/// Id standing for the virtual initial node in `incoming` sets.
const INIT: usize = 0;

struct Tableau {
    /// Finished nodes; ids are index + 1.
    done: Vec<Node>,
}

impl Tableau {
    fn expand(&mut self, start: Node) {
        let mut work = vec![start];
        while let Some(mut node) = work.pop() {
            let Some(f) = node.new.pop() else {
                if let Some(existing) =
                    self.done.iter_mut().find(|d| d.old == node.old && d.next == node.next)
                {
                    existing.incoming.extend(node.incoming);
                    continue;
                }
                let id = self.done.len() + 1;
                let successor = Node {
                    incoming: [id].into_iter().collect(),
                    new: node.next.iter().cloned().collect(),
                    old: BTreeSet::new(),
                    next: BTreeSet::new(),
                };
                self.done.push(node);
                work.push(successor);
                continue;
            };
            if node.old.contains(&f) {
                work.push(node);
                continue;
            }
            match &f {
                Ltl::True => {
                    node.old.insert(f);
                    work.push(node);
                }
                Ltl::False => {}
                Ltl::Prop(_) | Ltl::Not(_) => {
                    let contradiction = match &f {
                        Ltl::Prop(p) => node.old.contains(&Ltl::prop(p).not()),
                        Ltl::Not(inner) => node.old.contains(inner),
                        _ => unreachable!(),
                    };
                    if !contradiction {
                        node.old.insert(f);
                        work.push(node);
                    }
                }
                Ltl::And(a, b) => {
                    for g in [a, b] {
                        if !node.old.contains(g) {
                            node.new.push((**g).clone());
                        }
                    }
                    node.old.insert(f);
                    work.push(node);
                }
                Ltl::Next(a) => {
                    node.next.insert((**a).clone());
                    node.old.insert(f);
                    work.push(node);
                }
                Ltl::Always(a) => {
                    // a R-false: a now and again next
                    node.new.push((**a).clone());
                    node.next.insert(f.clone());
                    node.old.insert(f);
                    work.push(node);
                }
                Ltl::Or(..) | Ltl::Until(..) | Ltl::Release(..) | Ltl::Eventually(..) => {
                    let (now1, next1, now2): (Vec<&Ltl>, bool, Vec<&Ltl>) = match &f {
                        Ltl::Or(a, b) => (vec![a], false, vec![b]),
                        Ltl::Until(a, b) => (vec![a], true, vec![b]),
                        Ltl::Release(a, b) => (vec![b], true, vec![a, b]),
                        Ltl::Eventually(b) => (vec![], true, vec![b]),
                        _ => unreachable!(),
                    };
                    let mut first = node.clone();
                    let mut second = node;
                    for g in now1 {
                        if !first.old.contains(g) {
                            first.new.push(g.clone());
                        }
                    }
                    if next1 {
                        first.next.insert(f.clone());
                    }
                    first.old.insert(f.clone());
                    for g in now2 {
                        if !second.old.contains(g) {
                            second.new.push(g.clone());
                        }
                    }
                    second.old.insert(f);
                    // explore the first branch first
                    work.push(second);
                    work.push(first);
                }
                Ltl::Implies(..) => unreachable!("formula is in negation normal form"),
            }
        }
    }
}

fn subformulas<'a>(f: &'a Ltl, out: &mut Vec<&'a Ltl>) {
    for c in f.children() {
        subformulas(c, out);
    }
    if !out.contains(&f) {
        out.push(f);
    }
}

/// Generalized Büchi automaton: states, initial states, edges, and one
/// accepting set per eventuality.
#[derive(Debug, Clone)]
pub struct GeneralizedBuchi {
    pub states: Vec<String>,
    pub initial: Vec<usize>,
    pub edges: Vec<BuchiEdge>,
    pub accepting_sets: Vec<BTreeSet<usize>>,
}

/// Tableau expansion of `f` (normalized internally). State 0 is the initial
/// state; state `i > 0` is tableau node `i`. The letter read on an edge is
/// constrained by the literals of the edge's target node.
pub fn translate_generalized(f: &Ltl) -> GeneralizedBuchi {
    let f = to_nnf(f);
    let mut t = Tableau { done: Vec::new() };
    t.expand(Node {
        incoming: [INIT].into_iter().collect(),
        new: vec![f.clone()],
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    });
    let mut states = vec![String::from("init")];
    let mut edges = Vec::new();
    for (i, node) in t.done.iter().enumerate() {
        let id = i + 1;
        let mut guard = Guard::default();
        for lit in &node.old {
            match lit {
                Ltl::Prop(p) => {
                    guard.pos.insert(p.clone());
                }
                Ltl::Not(inner) => {
                    if let Ltl::Prop(p) = &**inner {
                        guard.neg.insert(p.clone());
                    }
                }
                _ => {}
            }
        }
        states.push(format!("n{id}"));
        for &src in &node.incoming {
            edges.push(BuchiEdge { from: src, guard: guard.clone(), to: id });
        }
    }
    edges.sort();
    let mut subs = Vec::new();
    subformulas(&f, &mut subs);
    let mut accepting_sets = Vec::new();
    for sub in subs {
        let rhs = match sub {
            Ltl::Until(_, b) | Ltl::Eventually(b) => b,
            _ => continue,
        };
        let set = t
            .done
            .iter()
            .enumerate()
            .filter(|(_, n)| !n.old.contains(sub) || n.old.contains(rhs.as_ref()))
            .map(|(i, _)| i + 1)
            .collect();
        accepting_sets.push(set);
    }
    GeneralizedBuchi { states, initial: vec![INIT], edges, accepting_sets }
}

/// Counter construction: state `(q, i)` waits for accepting set `i`.
pub fn degeneralize(g: &GeneralizedBuchi) -> BuchiAutomaton {
    let k = g.accepting_sets.len().max(1);
    let in_set = |q: usize, i: usize| -> bool {
        q != INIT && g.accepting_sets.get(i).is_none_or(|s| s.contains(&q))
    };
    let mut out_edges: BTreeMap<usize, Vec<&BuchiEdge>> = BTreeMap::new();
    for e in &g.edges {
        out_edges.entry(e.from).or_default().push(e);
    }
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    for &q in &g.initial {
        index.insert((q, 0), order.len());
        order.push((q, 0));
        queue.push_back((q, 0));
    }
    let mut edges = Vec::new();
    while let Some((q, i)) = queue.pop_front() {
        let from = index[&(q, i)];
        let j = if in_set(q, i) { (i + 1) % k } else { i };
        for e in out_edges.get(&q).into_iter().flatten() {
            let key = (e.to, j);
            let to = *index.entry(key).or_insert_with(|| {
                order.push(key);
                queue.push_back(key);
                order.len() - 1
            });
            edges.push(BuchiEdge { from, guard: e.guard.clone(), to });
        }
    }
    let states = order.iter().map(|(q, i)| format!("{}.{i}", g.states[*q])).collect();
    let accepting = order
        .iter()
        .enumerate()
        .filter(|(_, (q, i))| *i == 0 && in_set(*q, 0))
        .map(|(s, _)| s)
        .collect();
    let initial = (0..g.initial.len()).collect();
    BuchiAutomaton { states, initial, edges, accepting }
}

/// Büchi automaton accepting exactly the traces that satisfy `f`.
pub fn translate_to_buchi(f: &Ltl) -> BuchiAutomaton {
    degeneralize(&translate_generalized(f))
}

/// Product of `b` with the positions of `sigma`; accepted iff an accepting
/// product node lies on a reachable cycle.
pub fn buchi_accepts_lasso(b: &BuchiAutomaton, sigma: &Lasso) -> bool {
    let n = sigma.len();
    let node = |q: usize, pos: usize| q * n + pos;
    let mut g = BuchiGraph::new(b.len() * n);
    for e in &b.edges {
        for pos in 0..n {
            if e.guard.matches(sigma.letter(pos)) {
                g.add_edge(node(e.from, pos), node(e.to, sigma.succ(pos)));
            }
        }
    }
    for &q in &b.initial {
        g.initial.push(node(q, 0));
    }
    for &q in &b.accepting {
        for pos in 0..n {
            g.accepting[node(q, pos)] = true;
        }
    }
    has_accepting_cycle(&g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::eval_lasso;
    use crate::ltl::Ltl::*;
    use proptest::prelude::*;

    fn p() -> Ltl {
        Ltl::prop("p")
    }

    fn all_lassos(props: &[&str], max_stem: usize, max_loop: usize) -> Vec<Lasso> {
        let letters: Vec<BTreeSet<String>> = (0..1usize << props.len())
            .map(|bits| props.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, p)| String::from(*p)).collect())
            .collect();
        let words = |len: usize| -> Vec<Vec<BTreeSet<String>>> {
            let mut out = vec![Vec::new()];
            for _ in 0..len {
                out = out
                    .into_iter()
                    .flat_map(|w| letters.iter().map(move |l| {
                        let mut w2 = w.clone();
                        w2.push(l.clone());
                        w2
                    }))
                    .collect();
            }
            out
        };
        let mut out = Vec::new();
        for s in 0..=max_stem {
            for l in 1..=max_loop {
                for stem in words(s) {
                    for cycle in words(l) {
                        out.push(Lasso::new(stem.clone(), cycle));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn eventually_p() {
        let f = p().eventually();
        let b = translate_to_buchi(&f);
        for l in all_lassos(&["p"], 2, 2) {
            assert_eq!(buchi_accepts_lasso(&b, &l), eval_lasso(&f, &l), "{l:?}");
        }
        assert!(buchi_accepts_lasso(&b, &Lasso::from_strs(&[&[]], &[&["p"]])));
        assert!(b.len() <= 4);
    }

    #[test]
    fn false_is_empty() {
        let b = translate_to_buchi(&False);
        for l in all_lassos(&["p"], 1, 2) {
            assert!(!buchi_accepts_lasso(&b, &l));
        }
    }

    #[test]
    fn until_and_always() {
        let f = p().until(Ltl::prop("q"));
        let b = translate_to_buchi(&f);
        assert!(buchi_accepts_lasso(&b, &Lasso::from_strs(&[&["q"]], &[&[]])));
        assert!(!buchi_accepts_lasso(&b, &Lasso::from_strs(&[], &[&["p"]])));
        let g = translate_to_buchi(&p().always());
        assert!(!buchi_accepts_lasso(&g, &Lasso::from_strs(&[], &[&["p"], &[]])));
    }

    #[test]
    fn exhaustive_small_formulas() {
        let q = || Ltl::prop("q");
        let formulas = [
            p().always().eventually(),
            p().eventually().always(),
            p().until(q()).not(),
            p().next().until(q().not()),
            p().implies(q().eventually()).always(),
            p().always().or(q().eventually()).not(),
            p().until(q().until(p().not())),
            Ltl::True.eventually().always(),
            p().until(Ltl::True),
        ];
        let lassos = all_lassos(&["p", "q"], 2, 2);
        for f in &formulas {
            let b = translate_to_buchi(f);
            for l in &lassos {
                assert_eq!(buchi_accepts_lasso(&b, l), eval_lasso(f, l), "{f:?} on {l:?}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]
        #[test]
        fn agrees_with_direct_evaluation(
            f in crate::ltl::tests::formula(2),
            ls in proptest::collection::vec(crate::ltl::tests::lasso(2), 8),
        ) {
            let b = translate_to_buchi(&f);
            for l in &ls {
                prop_assert_eq!(buchi_accepts_lasso(&b, l), eval_lasso(&f, l));
            }
        }
    }
}
