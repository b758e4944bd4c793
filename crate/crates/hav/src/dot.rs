//! Graphviz export. Nodes are emitted in index order and edges in stored
//! order, so equal inputs give byte-identical output.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use hav_core::buchi::BuchiAutomaton;
use hav_core::kripke::FiniteKripke;
use hav_core::mcheck::ProductGraph;
use hav_core::model::HybridAutomaton;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn props(label: &BTreeSet<String>) -> String {
    let items: Vec<&str> = label.iter().map(String::as_str).collect();
    format!("{{{}}}", items.join(","))
}

struct Digraph {
    text: String,
}

impl Digraph {
    fn new(name: &str) -> Digraph {
        let mut text = String::new();
        let _ = writeln!(text, "digraph {} {{", quote(name));
        text.push_str("  node [shape=box];\n");
        Digraph { text }
    }

    fn node(&mut self, id: usize, label: &str, initial: bool, accepting: bool) {
        let mut attrs = vec![format!("label={}", quote(label))];
        if initial {
            attrs.push("style=bold".into());
        }
        if accepting {
            attrs.push("peripheries=2".into());
        }
        let _ = writeln!(self.text, "  n{id} [{}];", attrs.join(", "));
    }

    fn edge(&mut self, from: usize, to: usize, label: &str) {
        let _ = writeln!(self.text, "  n{from} -> n{to} [label={}];", quote(label));
    }

    fn finish(mut self) -> String {
        self.text.push_str("}\n");
        self.text
    }
}

/// One node per state, labeled with its name and proposition set.
pub fn kripke_dot(k: &FiniteKripke, name: &str) -> String {
    let mut g = Digraph::new(name);
    for (i, (state, label)) in k.states.iter().zip(&k.labels).enumerate() {
        g.node(i, &format!("{state}\n{}", props(label)), k.initial.contains(&i), false);
    }
    for t in &k.transitions {
        g.edge(t.from, t.to, &t.action);
    }
    g.finish()
}

/// Control graph of an automaton: modes with labels, invariants and rates;
/// edges with action, guard and resets.
pub fn automaton_dot(a: &HybridAutomaton) -> String {
    let mut g = Digraph::new(&a.name);
    for (m, mode) in a.modes.iter().enumerate() {
        let mut text = format!("{mode}\n{}", props(&a.labels[m]));
        if !a.invariants[m].is_top() {
            let _ = write!(text, "\ninv {}", a.invariants[m]);
        }
        g.node(m, &text, a.initial.contains(&m), false);
    }
    for t in &a.transitions {
        let mut text = t.action.clone();
        if !t.guard.is_top() {
            let _ = write!(text, "\n{}", t.guard);
        }
        for (x, c) in &t.jump.assign {
            let _ = write!(text, "\n{x}:={c}");
        }
        g.edge(t.source, t.target, &text);
    }
    g.finish()
}

pub fn buchi_dot(b: &BuchiAutomaton) -> String {
    let mut g = Digraph::new("buchi");
    for (i, s) in b.states.iter().enumerate() {
        g.node(i, s, b.initial.contains(&i), b.accepting.contains(&i));
    }
    for e in &b.edges {
        g.edge(e.from, e.to, &e.guard.to_string());
    }
    g.finish()
}

/// Product of a Kripke structure and a Büchi automaton.
pub fn product_dot(p: &ProductGraph, k: &FiniteKripke, b: &BuchiAutomaton) -> String {
    let mut g = Digraph::new("product");
    for (i, s) in p.states.iter().enumerate() {
        let label = format!("{}, {}\n{}", k.states[s.kripke], b.states[s.buchi], props(&k.labels[s.kripke]));
        g.node(i, &label, p.graph.initial.contains(&i), p.graph.accepting[i]);
    }
    for (i, succ) in p.graph.succ.iter().enumerate() {
        for &j in succ {
            g.edge(i, j, "");
        }
    }
    g.finish()
}
