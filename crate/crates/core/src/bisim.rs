//! Coarsest bisimulation of finite Kripke structures.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::kripke::FiniteKripke;

/// Action carried by every quotient transition.
pub const TAU: &str = "τ";

/// Blocks are sorted and numbered by their smallest state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
    pub block_of: Vec<usize>,
}

impl Partition {
    fn from_blocks(mut blocks: Vec<Vec<usize>>, n: usize) -> Partition {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort_unstable_by_key(|b| b[0]);
        let mut block_of = vec![0; n];
        for (i, b) in blocks.iter().enumerate() {
            for &s in b {
                block_of[s] = i;
            }
        }
        Partition { blocks, block_of }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn same_block(&self, s: usize, t: usize) -> bool {
        self.block_of[s] == self.block_of[t]
    }
}

/// Largest bisimulation on the states of `k`, as a partition.
pub fn coarsest_partition(k: &FiniteKripke) -> Partition {
    let n = k.len();
    let mut pred = vec![Vec::new(); n];
    for (s, succ) in k.successors().into_iter().enumerate() {
        for t in succ {
            pred[t].push(s);
        }
    }

    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![0; n];
    for s in 0..n {
        match (0..s).find(|&r| k.labels[r] == k.labels[s]) {
            Some(r) => {
                block_of[s] = block_of[r];
                blocks[block_of[r]].push(s);
            }
            None => {
                block_of[s] = blocks.len();
                blocks.push(vec![s]);
            }
        }
    }

    let mut queued = vec![true; blocks.len()];
    let mut work: Vec<usize> = (0..blocks.len()).rev().collect();
    let mut mark = vec![false; n];
    while let Some(b) = work.pop() {
        queued[b] = false;
        let mut hit: Vec<usize> = Vec::new();
        for &t in &blocks[b] {
            for &s in &pred[t] {
                if !mark[s] {
                    mark[s] = true;
                    hit.push(s);
                }
            }
        }
        let touched: BTreeSet<usize> = hit.iter().map(|&s| block_of[s]).collect();
        for c in touched {
            let (inside, outside): (Vec<usize>, Vec<usize>) = blocks[c].iter().partition(|&&s| mark[s]);
            if outside.is_empty() {
                continue;
            }
            let fresh = blocks.len();
            for &s in &outside {
                block_of[s] = fresh;
            }
            blocks[c] = inside;
            blocks.push(outside);
            queued.push(false);
            for d in [c, fresh] {
                if !queued[d] {
                    queued[d] = true;
                    work.push(d);
                }
            }
        }
        for s in hit {
            mark[s] = false;
        }
    }
    let p = Partition::from_blocks(blocks, n);
    for b in &p.blocks {
        assert!(b.iter().all(|&s| k.labels[s] == k.labels[b[0]]), "block with mixed labels");
    }
    p
}

/// The quotient over the coarsest bisimulation. Blocks become states named
/// `[s]` after their smallest member; all transitions carry [`TAU`].
pub fn coarsest_quotient(k: &FiniteKripke) -> (FiniteKripke, Partition) {
    let p = coarsest_partition(k);
    let mut q = FiniteKripke::new();
    for b in &p.blocks {
        q.add_labeled_state(format!("[{}]", k.states[b[0]]), k.labels[b[0]].clone());
    }
    q.props = k.props.clone();
    let initial: BTreeSet<usize> = k.initial.iter().map(|&s| p.block_of[s]).collect();
    q.initial = initial.into_iter().collect();
    let edges: BTreeSet<(usize, usize)> = k.transitions.iter().map(|t| (p.block_of[t.from], p.block_of[t.to])).collect();
    for (a, b) in edges {
        q.add_transition(a, TAU, b);
    }
    (q, p)
}

/// True iff a bisimulation relates every initial state of each structure to
/// some initial state of the other.
pub fn is_bisimilar(k1: &FiniteKripke, k2: &FiniteKripke) -> bool {
    let off = k1.len();
    let mut u = FiniteKripke::new();
    for (name, label) in k1.states.iter().zip(&k1.labels).chain(k2.states.iter().zip(&k2.labels)) {
        u.add_labeled_state(name.to_string(), label.clone());
    }
    for t in &k1.transitions {
        u.add_transition(t.from, &t.action, t.to);
    }
    for t in &k2.transitions {
        u.add_transition(t.from + off, &t.action, t.to + off);
    }
    let p = coarsest_partition(&u);
    let covers = |from: &[usize], from_off: usize, to: &[usize], to_off: usize| {
        from.iter().all(|&s| to.iter().any(|&t| p.same_block(s + from_off, t + to_off)))
    };
    covers(&k1.initial, 0, &k2.initial, off) && covers(&k2.initial, off, &k1.initial, 0)
}
