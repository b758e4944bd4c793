//! Exact linear constraint systems over rationals, decided by Fourier–Motzkin
//! elimination with strictness tracking.
//!
//! Variables are eliminated from the highest index down. Equalities are used
//! for substitution first; the remaining variable is projected out of the
//! inequalities pairwise. A witness is rebuilt by back-substitution from the
//! lowest index up, taking for each variable the midpoint of its allowed
//! interval (the lower bound, or one above a strict lower bound, when the
//! interval is unbounded above).

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::model::RelOp;
use crate::rational::{int, Rational};

/// `Σ coeffs[i]·v_i + constant`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinExpr {
    pub coeffs: BTreeMap<usize, Rational>,
    pub constant: Rational,
}

impl LinExpr {
    pub fn constant(c: Rational) -> LinExpr {
        LinExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(i: usize) -> LinExpr {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(i, Rational::one());
        LinExpr { coeffs, constant: Rational::zero() }
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, i: usize, k: &Rational) {
        if k.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(i).or_insert_with(Rational::zero);
        *entry += k;
        if entry.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn plus(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (i, k) in &other.coeffs {
            out.add_term(*i, k);
        }
        out.constant += &other.constant;
        out
    }

    pub fn scaled(&self, k: &Rational) -> LinExpr {
        if k.is_zero() {
            return LinExpr::default();
        }
        LinExpr {
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn minus(&self, other: &LinExpr) -> LinExpr {
        self.plus(&other.scaled(&int(-1)))
    }

    pub fn eval(&self, values: &[Rational]) -> Rational {
        self.coeffs.iter().fold(self.constant.clone(), |acc, (i, k)| acc + k * &values[*i])
    }

    /// Replaces variable `v` by `def`.
    fn substitute(&self, v: usize, def: &LinExpr) -> LinExpr {
        match self.coeffs.get(&v) {
            None => self.clone(),
            Some(k) => {
                let mut rest = self.clone();
                rest.coeffs.remove(&v);
                rest.plus(&def.scaled(k))
            }
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }
}

/// Relation of a normalized constraint `expr ⋈ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rel {
    Eq,
    Le,
    Lt,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub expr: LinExpr,
    pub rel: Rel,
}

impl Constraint {
    /// `lhs ⋈ rhs`.
    pub fn compare(lhs: &LinExpr, op: RelOp, rhs: &LinExpr) -> Constraint {
        let (expr, rel) = match op {
            RelOp::Lt => (lhs.minus(rhs), Rel::Lt),
            RelOp::Le => (lhs.minus(rhs), Rel::Le),
            RelOp::Eq => (lhs.minus(rhs), Rel::Eq),
            RelOp::Ge => (rhs.minus(lhs), Rel::Le),
            RelOp::Gt => (rhs.minus(lhs), Rel::Lt),
        };
        Constraint { expr, rel }
    }

    pub fn holds(&self, values: &[Rational]) -> bool {
        let v = self.expr.eval(values);
        match self.rel {
            Rel::Eq => v.is_zero(),
            Rel::Le => !v.is_positive(),
            Rel::Lt => v.is_negative(),
        }
    }

    /// Scales so the lowest-index coefficient has magnitude one (and is
    /// positive for equalities).
    fn normalized(mut self) -> Constraint {
        if let Some((_, lead)) = self.expr.coeffs.iter().next() {
            let k = match self.rel {
                Rel::Eq => lead.recip(),
                _ => lead.abs().recip(),
            };
            self.expr = self.expr.scaled(&k);
        }
        self
    }

    /// For constraints without variables: whether they hold.
    fn constant_truth(&self) -> Option<bool> {
        if self.expr.coeffs.is_empty() {
            Some(self.holds(&[]))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub values: Vec<Rational>,
    /// True when every variable was forced to a single value.
    pub unique: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinsysError {
    #[error("constraint references variable {0} but the system declares {1}")]
    UndeclaredVariable(usize, usize),
}

enum Stage {
    Defined(LinExpr),
    Bounded(Vec<Constraint>),
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> LinearSystem {
        LinearSystem { num_vars, constraints: Vec::new() }
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn satisfied_by(&self, values: &[Rational]) -> bool {
        self.constraints.iter().all(|c| c.holds(values))
    }

    /// Decides satisfiability; on success returns a witness.
    pub fn solve(&self) -> Result<Option<Solution>, LinsysError> {
        for c in &self.constraints {
            if let Some(v) = c.expr.max_var() {
                if v >= self.num_vars {
                    return Err(LinsysError::UndeclaredVariable(v, self.num_vars));
                }
            }
        }
        let mut current = match simplify(self.constraints.clone()) {
            Some(cs) => cs,
            None => return Ok(None),
        };
        let mut stages = Vec::with_capacity(self.num_vars);
        for v in (0..self.num_vars).rev() {
            let eq = current.iter().position(|c| c.rel == Rel::Eq && c.expr.coeffs.contains_key(&v));
            let next = if let Some(pos) = eq {
                let eq = current.swap_remove(pos);
                let k = eq.expr.coeff(v);
                let mut rest = eq.expr.clone();
                rest.coeffs.remove(&v);
                let def = rest.scaled(&(-k.recip()));
                let next: Vec<Constraint> = current
                    .iter()
                    .map(|c| Constraint { expr: c.expr.substitute(v, &def), rel: c.rel })
                    .collect();
                stages.push(Stage::Defined(def));
                next
            } else {
                let (with, mut next): (Vec<Constraint>, Vec<Constraint>) =
                    current.into_iter().partition(|c| c.expr.coeffs.contains_key(&v));
                let (upper, lower): (Vec<&Constraint>, Vec<&Constraint>) =
                    with.iter().partition(|c| c.expr.coeff(v).is_positive());
                for u in &upper {
                    for l in &lower {
                        let a = u.expr.coeff(v);
                        let b = -l.expr.coeff(v);
                        let mut expr = u.expr.scaled(&b).plus(&l.expr.scaled(&a));
                        expr.coeffs.remove(&v);
                        let rel = if u.rel == Rel::Lt || l.rel == Rel::Lt { Rel::Lt } else { Rel::Le };
                        next.push(Constraint { expr, rel });
                    }
                }
                stages.push(Stage::Bounded(with));
                next
            };
            current = match simplify(next) {
                Some(cs) => cs,
                None => return Ok(None),
            };
        }
        debug_assert!(current.is_empty());

        let mut values = vec![Rational::zero(); self.num_vars];
        let mut unique = true;
        for (v, stage) in (0..self.num_vars).zip(stages.iter().rev()) {
            match stage {
                Stage::Defined(def) => values[v] = def.eval(&values),
                Stage::Bounded(cs) => {
                    let (value, point) = pick_value(v, cs, &values);
                    values[v] = value;
                    unique &= point;
                }
            }
        }
        debug_assert!(self.satisfied_by(&values));
        Ok(Some(Solution { values, unique }))
    }
}

/// Chooses a value for `v` given already-fixed lower-index variables.
fn pick_value(v: usize, cs: &[Constraint], values: &[Rational]) -> (Rational, bool) {
    let mut lo: Option<(Rational, bool)> = None;
    let mut hi: Option<(Rational, bool)> = None;
    for c in cs {
        let a = c.expr.coeff(v);
        let mut rest = c.expr.clone();
        rest.coeffs.remove(&v);
        let bound = -rest.eval(values) / &a;
        let strict = c.rel == Rel::Lt;
        if a.is_positive() {
            hi = Some(match hi {
                Some((h, s)) if h < bound || (h == bound && s) => (h, s),
                _ => (bound, strict),
            });
        } else {
            lo = Some(match lo {
                Some((l, s)) if l > bound || (l == bound && s) => (l, s),
                _ => (bound, strict),
            });
        }
    }
    match (lo, hi) {
        (Some((l, _)), Some((h, _))) if l == h => (l, true),
        (Some((l, _)), Some((h, _))) => ((l + h) / int(2), false),
        (Some((l, strict)), None) => (if strict { l + int(1) } else { l }, false),
        (None, Some((h, strict))) => (if strict { h - int(1) } else { h }, false),
        (None, None) => (Rational::zero(), false),
    }
}

/// Normalizes, drops tautologies, keeps the tightest of parallel
/// inequalities. Returns `None` on a false constant constraint.
fn simplify(cs: Vec<Constraint>) -> Option<Vec<Constraint>> {
    let mut eqs: Vec<Constraint> = Vec::new();
    let mut ineqs: BTreeMap<BTreeMap<usize, Rational>, (Rational, Rel)> = BTreeMap::new();
    for c in cs {
        match c.constant_truth() {
            Some(true) => continue,
            Some(false) => return None,
            None => {}
        }
        let c = c.normalized();
        if c.rel == Rel::Eq {
            if !eqs.contains(&c) {
                eqs.push(c);
            }
            continue;
        }
        // a·t + k ⋈ 0: larger k is tighter; on ties strict wins
        let LinExpr { coeffs, constant } = c.expr;
        let tighter = match ineqs.get(&coeffs) {
            None => true,
            Some((k, rel)) => constant > *k || (constant == *k && c.rel == Rel::Lt && *rel == Rel::Le),
        };
        if tighter {
            ineqs.insert(coeffs, (constant, c.rel));
        }
    }
    eqs.extend(
        ineqs
            .into_iter()
            .map(|(coeffs, (constant, rel))| Constraint { expr: LinExpr { coeffs, constant }, rel }),
    );
    Some(eqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use rand::{Rng, SeedableRng};

    fn c(terms: &[(usize, i64)], constant: i64, rel: Rel) -> Constraint {
        let mut expr = LinExpr::constant(int(constant));
        for (i, k) in terms {
            expr.add_term(*i, &int(*k));
        }
        Constraint { expr, rel }
    }

    #[test]
    fn single_equality() {
        let mut s = LinearSystem::new(1);
        s.push(c(&[(0, 1)], -3, Rel::Eq));
        s.push(c(&[(0, -1)], 0, Rel::Le));
        let sol = s.solve().unwrap().unwrap();
        assert_eq!(sol.values, vec![int(3)]);
        assert!(sol.unique);
    }

    #[test]
    fn strict_pair_is_infeasible() {
        // t < 1 and t > 1
        let mut s = LinearSystem::new(1);
        s.push(c(&[(0, 1)], -1, Rel::Lt));
        s.push(c(&[(0, -1)], 1, Rel::Lt));
        assert_eq!(s.solve().unwrap(), None);
        // t <= 1 and t >= 1 is the single point
        let mut s = LinearSystem::new(1);
        s.push(c(&[(0, 1)], -1, Rel::Le));
        s.push(c(&[(0, -1)], 1, Rel::Le));
        let sol = s.solve().unwrap().unwrap();
        assert_eq!(sol.values, vec![int(1)]);
        assert!(sol.unique);
    }

    #[test]
    fn midpoint_and_unbounded_choices() {
        // 0 <= t0 < 60; t1 >= 0 free above; t2 > 2
        let mut s = LinearSystem::new(3);
        s.push(c(&[(0, -1)], 0, Rel::Le));
        s.push(c(&[(0, 1)], -60, Rel::Lt));
        s.push(c(&[(1, -1)], 0, Rel::Le));
        s.push(c(&[(2, -1)], 2, Rel::Lt));
        let sol = s.solve().unwrap().unwrap();
        assert_eq!(sol.values, vec![int(30), int(0), int(3)]);
        assert!(!sol.unique);
    }

    #[test]
    fn forced_delays_of_increment_equations() {
        // k + l = 1/2, 2k = 1/2 + ... written as: k - l = 0, k + l - 1/2 = 0
        let mut s = LinearSystem::new(2);
        let mut e = LinExpr::var(0).plus(&LinExpr::var(1));
        e.constant = ratio(-1, 2);
        s.push(Constraint { expr: e, rel: Rel::Eq });
        s.push(c(&[(0, 1), (1, -1)], 0, Rel::Eq));
        let sol = s.solve().unwrap().unwrap();
        assert_eq!(sol.values, vec![ratio(1, 4), ratio(1, 4)]);
        assert!(sol.unique);
    }

    #[test]
    fn undeclared_variable() {
        let mut s = LinearSystem::new(1);
        s.push(c(&[(3, 1)], 0, Rel::Le));
        assert_eq!(s.solve(), Err(LinsysError::UndeclaredVariable(3, 1)));
    }

    fn random_system(rng: &mut rand::rngs::StdRng, n: usize) -> LinearSystem {
        let mut s = LinearSystem::new(n);
        for i in 0..n {
            s.push(c(&[(i, -1)], 0, Rel::Le));
        }
        for _ in 0..rng.gen_range(1..6) {
            let mut terms = Vec::new();
            for i in 0..n {
                if rng.gen_bool(0.6) {
                    terms.push((i, rng.gen_range(-3..=3)));
                }
            }
            let rel = [Rel::Eq, Rel::Le, Rel::Lt][rng.gen_range(0..3)];
            let rel = if rel == Rel::Eq && rng.gen_bool(0.6) { Rel::Le } else { rel };
            s.push(c(&terms, rng.gen_range(-6..=6), rel));
        }
        s
    }

    /// Infeasible verdicts are checked by random sampling; feasible ones by
    /// substituting the witness.
    #[test]
    fn elimination_is_sound() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut infeasible_seen = 0;
        for round in 0..60 {
            let n = 1 + round % 4;
            let s = random_system(&mut rng, n);
            match s.solve().unwrap() {
                Some(sol) => assert!(s.satisfied_by(&sol.values), "witness fails {s:?}"),
                None => {
                    infeasible_seen += 1;
                    let samples = if round < 6 { 100_000 } else { 4_000 };
                    for _ in 0..samples {
                        let point: Vec<Rational> =
                            (0..n).map(|_| ratio(rng.gen_range(0..48), rng.gen_range(1..9))).collect();
                        assert!(!s.satisfied_by(&point), "sample {point:?} satisfies {s:?}");
                    }
                }
            }
        }
        assert!(infeasible_seen > 0);
    }
}
