//! Syntactic subclass detection: timed, multi-rate, rectangular, general.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{Atom, HybridAutomaton, Predicate, Rate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    Timed,
    MultiRate,
    Rectangular,
    General,
}

impl Class {
    pub fn keyword(self) -> &'static str {
        match self {
            Class::Timed => "timed",
            Class::MultiRate => "multirate",
            Class::Rectangular => "rect",
            Class::General => "general",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Class> {
        Some(match s {
            "timed" => Class::Timed,
            "multirate" => Class::MultiRate,
            "rect" => Class::Rectangular,
            "general" => Class::General,
            _ => return None,
        })
    }

    /// Whether an automaton of class `self` also belongs to `other`.
    pub fn within(self, other: Class) -> bool {
        self <= other
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Transition(usize),
    Mode(usize),
    Initial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: Location,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassReport {
    pub class: Class,
    pub initialized: bool,
    /// Reasons the automaton misses the next tighter class.
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassError {
    #[error("operation requires a rectangular, multi-rate or timed automaton, got {0}")]
    WrongClass(Class),
}

/// Outcome of [`is_initialized`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitCheck {
    Initialized,
    /// The transition changes the rate of `variable` without resetting it.
    Violated { transition: usize, variable: String },
}

fn check_atoms(
    pred: &Predicate,
    loc: &Location,
    allow_diag: bool,
    out: &mut Vec<Violation>,
) {
    for atom in &pred.atoms {
        if !allow_diag && matches!(atom, Atom::Diag { .. }) {
            out.push(Violation { location: loc.clone(), reason: format!("diagonal constraint `{atom}`") });
        }
        if atom.bound() < 0 {
            out.push(Violation { location: loc.clone(), reason: format!("negative constant in `{atom}`") });
        }
    }
}

/// Violations against the rectangular class: rectangular natural-constant
/// guards and invariants, constant or interval rates.
pub fn rect_violations(a: &HybridAutomaton) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, t) in a.transitions.iter().enumerate() {
        check_atoms(&t.guard, &Location::Transition(i), false, &mut out);
    }
    for (m, inv) in a.invariants.iter().enumerate() {
        check_atoms(inv, &Location::Mode(m), false, &mut out);
        for (x, r) in &a.flows[m] {
            if matches!(r, Rate::Affine { .. }) {
                out.push(Violation { location: Location::Mode(m), reason: format!("non-constant flow for `{x}`") });
            }
        }
    }
    out
}

/// Violations against the multi-rate class: the rectangular conditions plus
/// constant rates everywhere.
pub fn multirate_violations(a: &HybridAutomaton) -> Vec<Violation> {
    let mut out = rect_violations(a);
    for (m, flow) in a.flows.iter().enumerate() {
        for (x, r) in flow {
            if let Rate::Interval(lo, hi) = r {
                out.push(Violation {
                    location: Location::Mode(m),
                    reason: format!("interval rate [{lo}, {hi}] for `{x}`"),
                });
            }
        }
    }
    out
}

/// Violations against the timed class: rectangular or diagonal natural
/// constraints, resets to zero, unit rates, all-zero initial valuation.
pub fn timed_violations(a: &HybridAutomaton) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, t) in a.transitions.iter().enumerate() {
        check_atoms(&t.guard, &Location::Transition(i), true, &mut out);
        for (x, c) in &t.jump.assign {
            if *c != 0 {
                out.push(Violation { location: Location::Transition(i), reason: format!("reset `{x}' = {c}` is not to zero") });
            }
        }
    }
    for (m, inv) in a.invariants.iter().enumerate() {
        check_atoms(inv, &Location::Mode(m), true, &mut out);
        for (x, r) in &a.flows[m] {
            if *r != Rate::Const(1) {
                out.push(Violation { location: Location::Mode(m), reason: format!("rate of `{x}` is {r}, not 1") });
            }
        }
    }
    let zeros = a
        .init_valuations
        .as_point(&a.vars)
        .is_some_and(|p| p.values().all(num_traits::Zero::is_zero));
    if !zeros {
        out.push(Violation { location: Location::Initial, reason: String::from("initial valuation is not all-zero") });
    }
    out
}

/// Reports the tightest class the automaton belongs to.
pub fn classify(a: &HybridAutomaton) -> ClassReport {
    let timed = timed_violations(a);
    let (class, violations) = if timed.is_empty() {
        (Class::Timed, timed)
    } else {
        let multi = multirate_violations(a);
        if multi.is_empty() {
            (Class::MultiRate, timed)
        } else {
            let rect = rect_violations(a);
            if rect.is_empty() {
                (Class::Rectangular, multi)
            } else {
                (Class::General, rect)
            }
        }
    };
    let initialized = class != Class::General && initialization(a) == InitCheck::Initialized;
    ClassReport { class, initialized, violations }
}

fn initialization(a: &HybridAutomaton) -> InitCheck {
    for (i, t) in a.transitions.iter().enumerate() {
        for x in &a.vars {
            if a.rate(t.source, x) != a.rate(t.target, x) && !t.jump.assign.contains_key(x) {
                return InitCheck::Violated { transition: i, variable: x.clone() };
            }
        }
    }
    InitCheck::Initialized
}

/// Checks that every rate-changing transition resets the affected variable.
pub fn is_initialized(a: &HybridAutomaton) -> Result<InitCheck, ClassError> {
    let report = classify(a);
    if report.class == Class::General {
        return Err(ClassError::WrongClass(Class::General));
    }
    Ok(initialization(a))
}

/// Largest absolute constant over guards and invariants; 0 when there are none.
pub fn max_constant(a: &HybridAutomaton) -> u64 {
    a.transitions
        .iter()
        .map(|t| &t.guard)
        .chain(&a.invariants)
        .flat_map(|p| &p.atoms)
        .map(|atom| atom.bound().unsigned_abs())
        .max()
        .unwrap_or(0)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AutomatonBuilder, Jump, RelOp};
    use crate::samples;
    use alloc::vec;

    #[test]
    fn login_is_timed() {
        let r = classify(&samples::login());
        assert_eq!(r.class, Class::Timed);
        assert!(r.initialized);
        assert_eq!(max_constant(&samples::login()), 60);
    }

    #[test]
    fn fig_rect_is_initialized_rectangular() {
        let a = samples::rect_fig();
        let r = classify(&a);
        assert_eq!(r.class, Class::Rectangular);
        assert!(r.initialized);
        assert_eq!(is_initialized(&a).unwrap(), InitCheck::Initialized);
    }

    #[test]
    fn dropping_the_reset_breaks_initialization() {
        let mut a = samples::rect_fig();
        let mid = a.mode_index("B").unwrap();
        let right = a.mode_index("C").unwrap();
        let i = a.transitions.iter().position(|t| t.source == mid && t.target == right).unwrap();
        a.transitions[i].jump = Jump::identity();
        assert_eq!(
            is_initialized(&a).unwrap(),
            InitCheck::Violated { transition: i, variable: "x".into() }
        );
        assert!(!classify(&a).initialized);
    }

    #[test]
    fn single_mode_is_initialized() {
        let a = AutomatonBuilder::new("one")
            .var("x")
            .initial_mode("m")
            .rate("m", "x", Rate::Interval(1, 3))
            .edge("m", "m", "a", vec![], Jump::identity())
            .build()
            .unwrap();
        assert_eq!(is_initialized(&a).unwrap(), InitCheck::Initialized);
    }

    #[test]
    fn bouncing_ball_is_general() {
        let a = samples::bouncing_ball();
        assert_eq!(classify(&a).class, Class::General);
        assert_eq!(is_initialized(&a), Err(ClassError::WrongClass(Class::General)));
    }

    #[test]
    fn constant_bounds() {
        let a = AutomatonBuilder::new("empty").var("x").initial_mode("m").build().unwrap();
        assert_eq!(max_constant(&a), 0);
        assert_eq!(max_constant(&samples::jobshop_timed_product()), 4);
    }

    #[test]
    fn hybrid_jobshop_is_multirate_not_initialized() {
        let r = classify(&samples::jobshop_hybrid_product());
        assert_eq!(r.class, Class::MultiRate);
        assert!(!r.initialized);
    }

    #[test]
    fn diagonal_timed_automaton() {
        let a = AutomatonBuilder::new("d")
            .var("x")
            .var("y")
            .initial_mode("m")
            .edge("m", "m", "a", vec![Atom::diag("x", "y", RelOp::Le, 2)], Jump::resets(&[("x", 0)]))
            .build()
            .unwrap();
        assert_eq!(classify(&a).class, Class::Timed);
        assert!(!multirate_violations(&a).is_empty());
    }

    #[test]
    fn timed_reports_pass_looser_checks() {
        for a in [samples::login(), samples::counter(), samples::jobshop_timed_product()] {
            let r = classify(&a);
            if r.class == Class::Timed && !a.transitions.iter().any(|t| t.guard.has_diagonal()) {
                assert!(multirate_violations(&a).is_empty());
                assert!(rect_violations(&a).is_empty());
            }
        }
    }
}
