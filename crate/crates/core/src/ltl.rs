//! Linear temporal logic: syntax, negation normal form, and direct
//! evaluation on ultimately periodic traces.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ltl {
    True,
    False,
    Prop(String),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Eventually(Box<Ltl>),
    Always(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    /// Dual of `Until`; only produced by [`to_nnf`].
    Release(Box<Ltl>, Box<Ltl>),
}

use Ltl::*;

impl Ltl {
    pub fn prop(name: &str) -> Ltl {
        Prop(name.to_string())
    }

    pub fn not(self) -> Ltl {
        Not(Box::new(self))
    }

    pub fn and(self, rhs: Ltl) -> Ltl {
        And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Ltl) -> Ltl {
        Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Ltl) -> Ltl {
        Implies(Box::new(self), Box::new(rhs))
    }

    pub fn next(self) -> Ltl {
        Next(Box::new(self))
    }

    pub fn eventually(self) -> Ltl {
        Eventually(Box::new(self))
    }

    pub fn always(self) -> Ltl {
        Always(Box::new(self))
    }

    pub fn until(self, rhs: Ltl) -> Ltl {
        Until(Box::new(self), Box::new(rhs))
    }

    pub fn release(self, rhs: Ltl) -> Ltl {
        Release(Box::new(self), Box::new(rhs))
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Ltl> {
        match self {
            True | False | Prop(_) => vec![],
            Not(a) | Next(a) | Eventually(a) | Always(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b) => vec![a, b],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        if let Prop(p) = self {
            out.insert(p.clone());
        }
        for c in self.children() {
            c.collect_props(out);
        }
    }

    /// True when negation only appears directly above propositions and no
    /// implication is left.
    pub fn is_nnf(&self) -> bool {
        match self {
            Not(a) => matches!(**a, Prop(_)),
            Implies(..) => false,
            _ => self.children().iter().all(|c| c.is_nnf()),
        }
    }
}

/// Pushes negations down to propositions.
pub fn to_nnf(f: &Ltl) -> Ltl {
    nnf(f, false)
}

fn nnf(f: &Ltl, neg: bool) -> Ltl {
    let b = |g: &Ltl, n: bool| Box::new(nnf(g, n));
    match (f, neg) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Prop(_), false) => f.clone(),
        (Prop(_), true) => f.clone().not(),
        (Not(a), _) => nnf(a, !neg),
        (And(x, y), false) | (Or(x, y), true) => And(b(x, neg), b(y, neg)),
        (Or(x, y), false) | (And(x, y), true) => Or(b(x, neg), b(y, neg)),
        (Implies(x, y), false) => Or(b(x, true), b(y, false)),
        (Implies(x, y), true) => And(b(x, false), b(y, true)),
        (Next(a), _) => Next(b(a, neg)),
        (Eventually(a), false) | (Always(a), true) => Eventually(b(a, neg)),
        (Always(a), false) | (Eventually(a), true) => Always(b(a, neg)),
        (Until(x, y), false) => Until(b(x, false), b(y, false)),
        (Until(x, y), true) => Release(b(x, true), b(y, true)),
        (Release(x, y), false) => Release(b(x, false), b(y, false)),
        (Release(x, y), true) => Until(b(x, true), b(y, true)),
    }
}

/// The infinite trace `stem · cycle^ω` over proposition sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lasso {
    pub stem: Vec<BTreeSet<String>>,
    pub cycle: Vec<BTreeSet<String>>,
}

impl Lasso {
    pub fn new(stem: Vec<BTreeSet<String>>, cycle: Vec<BTreeSet<String>>) -> Lasso {
        assert!(!cycle.is_empty(), "lasso loop must be nonempty");
        Lasso { stem, cycle }
    }

    /// Builds a lasso from string slices, e.g. `&[&["p"], &[]]`.
    pub fn from_strs(stem: &[&[&str]], cycle: &[&[&str]]) -> Lasso {
        let conv = |xs: &[&[&str]]| -> Vec<BTreeSet<String>> {
            xs.iter().map(|s| s.iter().map(|p| p.to_string()).collect()).collect()
        };
        Lasso::new(conv(stem), conv(cycle))
    }

    /// Number of distinct positions.
    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letter(&self, i: usize) -> &BTreeSet<String> {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[i - self.stem.len()]
        }
    }

    /// Position following `i`, wrapping the loop.
    pub fn succ(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.stem.len()
        }
    }
}

/// Decides `σ ⊨ φ` directly: a truth table per subformula over the finitely
/// many lasso positions, least fixpoints for `U`/`F`, greatest for `R`/`G`.
pub fn eval_lasso(f: &Ltl, sigma: &Lasso) -> bool {
    let mut memo = BTreeMap::new();
    table(f, sigma, &mut memo)[0]
}

fn table<'f>(f: &'f Ltl, s: &Lasso, memo: &mut BTreeMap<&'f Ltl, Vec<bool>>) -> Vec<bool> {
    if let Some(t) = memo.get(f) {
        return t.clone();
    }
    let n = s.len();
    let out = match f {
        True => vec![true; n],
        False => vec![false; n],
        Prop(p) => (0..n).map(|i| s.letter(i).contains(p)).collect(),
        Not(a) => table(a, s, memo).into_iter().map(|v| !v).collect(),
        And(a, b) => zip(table(a, s, memo), table(b, s, memo), |x, y| x && y),
        Or(a, b) => zip(table(a, s, memo), table(b, s, memo), |x, y| x || y),
        Implies(a, b) => zip(table(a, s, memo), table(b, s, memo), |x, y| !x || y),
        Next(a) => {
            let t = table(a, s, memo);
            (0..n).map(|i| t[s.succ(i)]).collect()
        }
        Eventually(a) => fixpoint(s, &vec![true; n], &table(a, s, memo), false),
        Always(a) => fixpoint(s, &table(a, s, memo), &vec![false; n], true),
        Until(a, b) => fixpoint(s, &table(a, s, memo), &table(b, s, memo), false),
        // a R b ≡ b ∧ (a ∨ X(a R b)), the greatest solution
        Release(a, b) => {
            let ta = table(a, s, memo);
            let tb = table(b, s, memo);
            let mut v = vec![true; n];
            loop {
                let next: Vec<bool> = (0..n).map(|i| tb[i] && (ta[i] || v[s.succ(i)])).collect();
                if next == v {
                    break v;
                }
                v = next;
            }
        }
    };
    memo.insert(f, out.clone());
    out
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Solves `v = hold_now ∨ (keep ∧ X v)` from below (`greatest = false`) or
/// `v = keep ∧ X v` from above (`greatest = true`, `hold_now` ignored).
fn fixpoint(s: &Lasso, keep: &[bool], hold_now: &[bool], greatest: bool) -> Vec<bool> {
    let n = s.len();
    let mut v = vec![greatest; n];
    loop {
        let next: Vec<bool> = (0..n)
            .map(|i| if greatest { keep[i] && v[s.succ(i)] } else { hold_now[i] || (keep[i] && v[s.succ(i)]) })
            .collect();
        if next == v {
            return v;
        }
        v = next;
    }
}

/// Concrete syntax: `! X F G` prefix, infix `U R && || ->`. Nested binary
/// operators are parenthesized, so printing and parsing round-trip.
impl core::fmt::Display for Ltl {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        fn operand(f: &mut core::fmt::Formatter<'_>, a: &Ltl) -> core::fmt::Result {
            if a.children().len() == 2 {
                write!(f, "({a})")
            } else {
                write!(f, "{a}")
            }
        }
        let (op, a, b) = match self {
            True => return f.write_str("true"),
            False => return f.write_str("false"),
            Prop(p) => return f.write_str(p),
            Not(a) | Next(a) | Eventually(a) | Always(a) => {
                f.write_str(match self {
                    Not(_) => "!",
                    Next(_) => "X ",
                    Eventually(_) => "F ",
                    _ => "G ",
                })?;
                return operand(f, a);
            }
            And(a, b) => ("&&", a, b),
            Or(a, b) => ("||", a, b),
            Implies(a, b) => ("->", a, b),
            Until(a, b) => ("U", a, b),
            Release(a, b) => ("R", a, b),
        };
        operand(f, a)?;
        write!(f, " {op} ")?;
        operand(f, b)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> Ltl {
        Ltl::prop("p")
    }

    fn q() -> Ltl {
        Ltl::prop("q")
    }

    fn ts1_trace() -> Lasso {
        Lasso::from_strs(&[], &[&["q"], &["p", "q"]])
    }

    #[test]
    fn trace_of_the_three_state_example() {
        let phi1 = p().and(q().not()).eventually();
        assert!(!eval_lasso(&phi1, &ts1_trace()));
        let phi2 = q().always().or(p().always().eventually());
        assert!(eval_lasso(&phi2, &ts1_trace()));
        assert!(eval_lasso(&True, &ts1_trace()));
    }

    #[test]
    fn until_includes_the_present() {
        let s = Lasso::from_strs(&[&["q"]], &[&[]]);
        assert!(eval_lasso(&p().until(q()), &s));
        let s = Lasso::from_strs(&[], &[&["p"]]);
        assert!(!eval_lasso(&p().until(q()), &s));
    }

    #[test]
    fn nnf_shapes() {
        assert_eq!(to_nnf(&p().eventually().not()), p().not().always());
        assert_eq!(to_nnf(&p().not().not()), p());
        let f = to_nnf(&p().until(q()).not());
        assert!(f.is_nnf());
        assert_eq!(f, p().not().release(q().not()));
    }

    pub(crate) fn formula(props: usize) -> impl Strategy<Value = Ltl> {
        let names = ["p", "q", "r"];
        let leaf = prop_oneof![
            Just(True),
            Just(False),
            (0..props).prop_map(move |i| Ltl::prop(names[i])),
        ];
        leaf.prop_recursive(4, 12, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Ltl::not),
                inner.clone().prop_map(Ltl::next),
                inner.clone().prop_map(Ltl::eventually),
                inner.clone().prop_map(Ltl::always),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
                (inner.clone(), inner).prop_map(|(a, b)| a.until(b)),
            ]
        })
    }

    pub(crate) fn lasso(props: usize) -> impl Strategy<Value = Lasso> {
        let names = ["p", "q", "r"];
        let letter = proptest::collection::vec(any::<bool>(), props).prop_map(move |bits| {
            bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| names[i].to_string()).collect()
        });
        (proptest::collection::vec(letter.clone(), 0..4), proptest::collection::vec(letter, 1..4))
            .prop_map(|(stem, cycle)| Lasso::new(stem, cycle))
    }

    proptest! {
        #[test]
        fn negation_flips(f in formula(2), s in lasso(2)) {
            prop_assert_eq!(eval_lasso(&f.clone().not(), &s), !eval_lasso(&f, &s));
        }

        #[test]
        fn nnf_preserves_truth(f in formula(3), s in lasso(3)) {
            let g = to_nnf(&f);
            prop_assert!(g.is_nnf());
            prop_assert_eq!(eval_lasso(&g, &s), eval_lasso(&f, &s));
        }

        #[test]
        fn expansion_laws(a in formula(2), b in formula(2), s in lasso(2)) {
            let u = a.clone().until(b.clone());
            let unfolded = b.clone().or(a.clone().and(u.clone().next()));
            prop_assert_eq!(eval_lasso(&u, &s), eval_lasso(&unfolded, &s));
            let g = a.clone().always();
            prop_assert_eq!(eval_lasso(&g, &s), eval_lasso(&a.clone().and(g.clone().next()), &s));
            let e = a.clone().eventually();
            prop_assert_eq!(eval_lasso(&e, &s), eval_lasso(&a.clone().or(e.clone().next()), &s));
        }
    }
}
