//! Synchronized product of a network of hybrid automata.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{HybridAutomaton, Jump, ModelError, Predicate, Transition};

/// Ordered list of component automata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    pub components: Vec<HybridAutomaton>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComposeError {
    #[error("action `{0}` does not occur in any component")]
    UnknownAction(String),
    #[error("shared variable `{var}` has rate {left} in `{left_mode}` but {right} in `{right_mode}`")]
    FlowConflict { var: String, left_mode: String, left: String, right_mode: String, right: String },
    #[error("network has no components")]
    Empty,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Separator between component mode names in product mode names.
pub const MODE_SEPARATOR: &str = ".";

impl Network {
    pub fn new(components: Vec<HybridAutomaton>) -> Network {
        Network { components }
    }

    /// Components whose alphabet contains `action`.
    pub fn sync_set(&self, action: &str) -> Result<BTreeSet<usize>, ComposeError> {
        let set: BTreeSet<usize> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, h)| h.actions.contains(action))
            .map(|(i, _)| i)
            .collect();
        if set.is_empty() {
            Err(ComposeError::UnknownAction(action.to_string()))
        } else {
            Ok(set)
        }
    }

    /// Rejects shared variables whose rates differ in some pair of modes.
    pub fn check_flows(&self) -> Result<(), ComposeError> {
        for (i, a) in self.components.iter().enumerate() {
            for b in &self.components[i + 1..] {
                for x in a.vars.iter().filter(|x| b.vars.contains(x)) {
                    for (ma, fa) in a.flows.iter().enumerate() {
                        for (mb, fb) in b.flows.iter().enumerate() {
                            if fa[x] != fb[x] {
                                return Err(ComposeError::FlowConflict {
                                    var: x.clone(),
                                    left_mode: a.modes[ma].clone(),
                                    left: fa[x].to_string(),
                                    right_mode: b.modes[mb].clone(),
                                    right: fb[x].to_string(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds the product automaton over all mode tuples.
    ///
    /// A product transition on `a` exists from a tuple iff every component in
    /// the sync set of `a` has an `a`-edge from its mode; the others stutter.
    /// Guards and jumps are conjoined; combinations whose jumps assign one
    /// variable two different constants are unsatisfiable and dropped.
    pub fn product(&self) -> Result<HybridAutomaton, ComposeError> {
        if self.components.is_empty() {
            return Err(ComposeError::Empty);
        }
        self.check_flows()?;
        let comps = &self.components;
        let dims: Vec<usize> = comps.iter().map(|h| h.modes.len()).collect();
        let total: usize = dims.iter().product();
        let decode = |mut idx: usize| -> Vec<usize> {
            let mut tuple = vec![0; dims.len()];
            for k in (0..dims.len()).rev() {
                tuple[k] = idx % dims[k];
                idx /= dims[k];
            }
            tuple
        };
        let encode = |tuple: &[usize]| -> usize { tuple.iter().zip(&dims).fold(0, |acc, (m, d)| acc * d + m) };

        let mut vars: Vec<String> = Vec::new();
        for h in comps {
            for x in &h.vars {
                if !vars.contains(x) {
                    vars.push(x.clone());
                }
            }
        }
        let actions: BTreeSet<String> = comps.iter().flat_map(|h| h.actions.iter().cloned()).collect();

        let mut modes = Vec::with_capacity(total);
        let mut invariants = Vec::with_capacity(total);
        let mut flows = Vec::with_capacity(total);
        let mut labels = Vec::with_capacity(total);
        for idx in 0..total {
            let tuple = decode(idx);
            let names: Vec<&str> = tuple.iter().zip(comps).map(|(&m, h)| h.modes[m].as_str()).collect();
            modes.push(names.join(MODE_SEPARATOR));
            let mut inv = Predicate::top();
            let mut flow = BTreeMap::new();
            let mut label = BTreeSet::new();
            for (&m, h) in tuple.iter().zip(comps) {
                inv = inv.and(&h.invariants[m]);
                for (x, r) in &h.flows[m] {
                    flow.entry(x.clone()).or_insert_with(|| r.clone());
                }
                label.extend(h.labels[m].iter().cloned());
            }
            invariants.push(inv);
            flows.push(flow);
            labels.push(label);
        }

        let mut initial = Vec::new();
        let mut init_tuple = vec![0usize; comps.len()];
        collect_tuples(comps.iter().map(|h| h.initial.as_slice()).collect::<Vec<_>>().as_slice(), 0, &mut init_tuple, &mut |t| {
            initial.push(encode(t))
        });
        initial.sort_unstable();

        let mut transitions = Vec::new();
        for idx in 0..total {
            let tuple = decode(idx);
            for action in &actions {
                let sync: Vec<usize> = (0..comps.len()).filter(|&i| comps[i].actions.contains(action)).collect();
                let choices: Vec<Vec<usize>> = sync
                    .iter()
                    .map(|&i| {
                        comps[i]
                            .outgoing(tuple[i])
                            .filter(|&e| comps[i].transitions[e].action == *action)
                            .collect()
                    })
                    .collect();
                if choices.iter().any(Vec::is_empty) {
                    continue;
                }
                let mut pick = vec![0usize; sync.len()];
                'combos: loop {
                    let mut target = tuple.clone();
                    let mut guard = Predicate::top();
                    let mut jump = Jump::identity();
                    let mut consistent = true;
                    for (k, &i) in sync.iter().enumerate() {
                        let t = &comps[i].transitions[choices[k][pick[k]]];
                        target[i] = t.target;
                        guard = guard.and(&t.guard);
                        for (x, c) in &t.jump.assign {
                            if jump.assign.insert(x.clone(), *c).is_some_and(|prev| prev != *c) {
                                consistent = false;
                            }
                        }
                    }
                    if consistent {
                        transitions.push(Transition {
                            source: idx,
                            guard,
                            action: action.clone(),
                            jump,
                            target: encode(&target),
                        });
                    }
                    // odometer over the per-component edge choices
                    let mut k = sync.len();
                    loop {
                        if k == 0 {
                            break 'combos;
                        }
                        k -= 1;
                        pick[k] += 1;
                        if pick[k] < choices[k].len() {
                            break;
                        }
                        pick[k] = 0;
                    }
                }
            }
        }

        let init_valuations = comps.iter().fold(Predicate::top(), |acc, h| acc.and(&h.init_valuations));
        let name = comps.iter().map(|h| h.name.as_str()).collect::<Vec<_>>().join("_");
        let product = HybridAutomaton {
            name,
            modes,
            initial,
            actions,
            vars,
            transitions,
            invariants,
            flows,
            init_valuations: dedup_atoms(init_valuations),
            labels,
        };
        product.validate()?;
        Ok(product)
    }
}

fn dedup_atoms(p: Predicate) -> Predicate {
    let mut seen = BTreeSet::new();
    Predicate::new(p.atoms.into_iter().filter(|a| seen.insert(a.clone())).collect())
}

fn collect_tuples(sets: &[&[usize]], k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if k == sets.len() {
        f(cur);
        return;
    }
    for &m in sets[k] {
        cur[k] = m;
        collect_tuples(sets, k + 1, cur, f);
    }
}

/// Modes reachable from the initial modes along transitions, guards ignored.
pub fn reachable_modes(a: &HybridAutomaton) -> BTreeSet<usize> {
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); a.modes.len()];
    for t in &a.transitions {
        succ[t.source].push(t.target);
    }
    let mut seen: BTreeSet<usize> = a.initial.iter().copied().collect();
    let mut queue: VecDeque<usize> = a.initial.iter().copied().collect();
    while let Some(m) = queue.pop_front() {
        for &n in &succ[m] {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen
}

/// Restricts an automaton to the modes reachable in its discrete graph.
pub fn prune_unreachable(a: &HybridAutomaton) -> HybridAutomaton {
    let keep = reachable_modes(a);
    let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    HybridAutomaton {
        name: a.name.clone(),
        modes: keep.iter().map(|&m| a.modes[m].clone()).collect(),
        initial: a.initial.iter().map(|m| remap[m]).collect(),
        actions: a.actions.clone(),
        vars: a.vars.clone(),
        transitions: a
            .transitions
            .iter()
            .filter(|t| keep.contains(&t.source))
            .map(|t| Transition { source: remap[&t.source], target: remap[&t.target], ..t.clone() })
            .collect(),
        invariants: keep.iter().map(|&m| a.invariants[m].clone()).collect(),
        flows: keep.iter().map(|&m| a.flows[m].clone()).collect(),
        init_valuations: a.init_valuations.clone(),
        labels: keep.iter().map(|&m| a.labels[m].clone()).collect(),
    }
}
