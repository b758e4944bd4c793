//! Emptiness of finite Büchi graphs: nested depth-first search with lasso
//! extraction, and an SCC-based decision procedure used as its oracle.

use alloc::vec;
use alloc::vec::Vec;

/// A finite graph with initial and accepting nodes. Successor lists are
/// explored in the stored order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuchiGraph {
    pub succ: Vec<Vec<usize>>,
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
}

/// Nodes `stem · cycle^ω` starting at an initial node; the cycle contains an
/// accepting node and its last node has an edge back to its first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphLasso {
    pub stem: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl BuchiGraph {
    pub fn new(n: usize) -> BuchiGraph {
        BuchiGraph { succ: vec![Vec::new(); n], initial: Vec::new(), accepting: vec![false; n] }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        self.succ[from].push(to);
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from].contains(&to)
    }

    /// Checks that `l` is a path from an initial node into an accepting cycle.
    pub fn validates(&self, l: &GraphLasso) -> bool {
        if l.cycle.is_empty() {
            return false;
        }
        let path: Vec<usize> = l.stem.iter().chain(&l.cycle).copied().collect();
        self.initial.contains(&path[0])
            && path.windows(2).all(|w| self.has_edge(w[0], w[1]))
            && self.has_edge(*l.cycle.last().unwrap(), l.cycle[0])
            && l.cycle.iter().any(|&s| self.accepting[s])
    }
}

/// Two-phase nested DFS. The inner search from an accepting node stops at
/// any node still on the outer stack, which closes a cycle through it.
pub fn nested_dfs(g: &BuchiGraph) -> Option<GraphLasso> {
    let n = g.len();
    let mut outer_seen = vec![false; n];
    let mut inner_seen = vec![false; n];
    let mut on_stack = vec![false; n];
    for &root in &g.initial {
        if outer_seen[root] {
            continue;
        }
        // frames: (node, index of the next successor to try)
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        outer_seen[root] = true;
        on_stack[root] = true;
        while let Some(&mut (s, ref mut next)) = stack.last_mut() {
            if let Some(&t) = g.succ[s].get(*next) {
                *next += 1;
                if !outer_seen[t] {
                    outer_seen[t] = true;
                    on_stack[t] = true;
                    stack.push((t, 0));
                }
                continue;
            }
            if g.accepting[s] {
                if let Some(path) = inner_dfs(g, s, &on_stack, &mut inner_seen) {
                    let outer: Vec<usize> = stack.iter().map(|f| f.0).collect();
                    let lasso = close_cycle(&outer, &path);
                    debug_assert!(g.validates(&lasso));
                    return Some(lasso);
                }
            }
            on_stack[s] = false;
            stack.pop();
        }
    }
    None
}

/// Path `seed → … → t` (at least one edge) with `t` on the outer stack.
fn inner_dfs(g: &BuchiGraph, seed: usize, on_stack: &[bool], seen: &mut [bool]) -> Option<Vec<usize>> {
    seen[seed] = true;
    let mut stack: Vec<(usize, usize)> = vec![(seed, 0)];
    while let Some(&mut (s, ref mut next)) = stack.last_mut() {
        if let Some(&t) = g.succ[s].get(*next) {
            *next += 1;
            if on_stack[t] {
                let mut path: Vec<usize> = stack.iter().map(|f| f.0).collect();
                path.push(t);
                return Some(path);
            }
            if !seen[t] {
                seen[t] = true;
                stack.push((t, 0));
            }
            continue;
        }
        stack.pop();
    }
    None
}

/// `outer` ends with the seed; `inner` runs from the seed to a node `t` on
/// `outer`.
fn close_cycle(outer: &[usize], inner: &[usize]) -> GraphLasso {
    let t = *inner.last().unwrap();
    let at = outer.iter().position(|&s| s == t).unwrap();
    let mut cycle: Vec<usize> = outer[at..].to_vec();
    cycle.extend_from_slice(&inner[1..inner.len() - 1]);
    GraphLasso { stem: outer[..at].to_vec(), cycle }
}

/// Strongly connected components (Tarjan), in reverse topological order.
pub fn sccs(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on[root] = true;
        while let Some(&mut (v, ref mut next)) = work.last_mut() {
            if let Some(&w) = succ[v].get(*next) {
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on[w] = true;
                    work.push((w, 0));
                } else if on[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            work.pop();
            if let Some(&(parent, _)) = work.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// Nodes reachable from the initial nodes.
pub fn reachable(g: &BuchiGraph) -> Vec<bool> {
    let mut seen = vec![false; g.len()];
    let mut stack: Vec<usize> = g.initial.clone();
    for &s in &g.initial {
        seen[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &t in &g.succ[s] {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

fn bfs_tree(g: &BuchiGraph, sources: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut dist = vec![usize::MAX; g.len()];
    let mut parent = vec![usize::MAX; g.len()];
    let mut queue = alloc::collections::VecDeque::new();
    for &s in sources {
        if dist[s] == usize::MAX {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        for &t in &g.succ[s] {
            if dist[t] == usize::MAX {
                dist[t] = dist[s] + 1;
                parent[t] = s;
                queue.push_back(t);
            }
        }
    }
    (dist, parent)
}

fn path_to(parent: &[usize], dist: &[usize], target: usize) -> Vec<usize> {
    let mut path = vec![target];
    let mut cur = target;
    while dist[cur] > 0 {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// A lasso with the shortest stem to an accepting node on a cycle, closed by
/// the shortest cycle through that node. Ties go to the smallest node id.
pub fn shortest_lasso(g: &BuchiGraph) -> Option<GraphLasso> {
    let (dist, parent) = bfs_tree(g, &g.initial);
    let mut cyclic = vec![false; g.len()];
    for comp in sccs(&g.succ) {
        if comp.len() > 1 || g.succ[comp[0]].contains(&comp[0]) {
            for s in comp {
                cyclic[s] = true;
            }
        }
    }
    let target = (0..g.len())
        .filter(|&s| g.accepting[s] && cyclic[s] && dist[s] != usize::MAX)
        .min_by_key(|&s| (dist[s], s))?;
    let stem = path_to(&parent, &dist, target);
    let mut cycle = vec![target];
    if !g.has_edge(target, target) {
        let (cdist, cparent) = bfs_tree(g, &g.succ[target]);
        let back = (0..g.len())
            .filter(|&s| cdist[s] != usize::MAX && g.has_edge(s, target))
            .min_by_key(|&s| (cdist[s], s))?;
        cycle.extend(path_to(&cparent, &cdist, back));
    }
    Some(GraphLasso { stem: stem[..stem.len() - 1].to_vec(), cycle })
}

/// True iff some reachable accepting node lies on a cycle.
pub fn has_accepting_cycle(g: &BuchiGraph) -> bool {
    let seen = reachable(g);
    sccs(&g.succ).iter().any(|comp| {
        let cyclic = comp.len() > 1 || g.succ[comp[0]].contains(&comp[0]);
        cyclic && comp.iter().any(|&s| seen[s] && g.accepting[s])
    })
}
