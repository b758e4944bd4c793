//! Finite labeled transition graphs.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

/// Action placed on the self-loop added to deadlocked states.
pub const STUTTER: &str = "τ-stutter";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KTransition {
    pub from: usize,
    pub action: String,
    pub to: usize,
    /// Automaton transition realizing this step, when the graph was derived
    /// from an automaton.
    pub edge: Option<usize>,
}

/// A finite Kripke structure. `props` is the declared proposition universe;
/// it always contains every proposition used by `labels`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiniteKripke {
    pub states: Vec<String>,
    pub labels: Vec<BTreeSet<String>>,
    pub initial: Vec<usize>,
    pub transitions: Vec<KTransition>,
    pub props: BTreeSet<String>,
}

impl FiniteKripke {
    pub fn new() -> FiniteKripke {
        FiniteKripke::default()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn add_state(&mut self, name: &str, props: &[&str]) -> usize {
        let label: BTreeSet<String> = props.iter().map(|p| p.to_string()).collect();
        self.add_labeled_state(name.to_string(), label)
    }

    pub fn add_labeled_state(&mut self, name: String, label: BTreeSet<String>) -> usize {
        self.props.extend(label.iter().cloned());
        self.states.push(name);
        self.labels.push(label);
        self.states.len() - 1
    }

    pub fn add_transition(&mut self, from: usize, action: &str, to: usize) {
        self.transitions.push(KTransition { from, action: action.to_string(), to, edge: None });
    }

    /// Sorted, deduplicated successor lists.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.states.len()];
        for t in &self.transitions {
            succ[t.from].push(t.to);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        succ
    }

    /// Adds a stutter self-loop to every state without successors and
    /// returns those states.
    pub fn close_deadlocks(&mut self) -> Vec<usize> {
        let mut has_succ = vec![false; self.states.len()];
        for t in &self.transitions {
            has_succ[t.from] = true;
        }
        let dead: Vec<usize> = (0..self.states.len()).filter(|&s| !has_succ[s]).collect();
        for &s in &dead {
            self.transitions.push(KTransition { from: s, action: STUTTER.to_string(), to: s, edge: None });
        }
        dead
    }

    /// First transition from `from` to `to`, in insertion order.
    pub fn transition_between(&self, from: usize, to: usize) -> Option<&KTransition> {
        self.transitions.iter().find(|t| t.from == from && t.to == to)
    }

    /// States reachable from the initial states.
    pub fn reachable(&self) -> BTreeSet<usize> {
        let succ = self.successors();
        let mut seen: BTreeSet<usize> = self.initial.iter().copied().collect();
        let mut stack: Vec<usize> = self.initial.clone();
        while let Some(s) = stack.pop() {
            for &t in &succ[s] {
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen
    }
}
