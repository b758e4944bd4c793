//! Small reference models used throughout the tests and the CLI fixtures:
//! the login protocol, the job-shop network, the mod-4 counter, the
//! initialized rectangular automaton, the bouncing ball, and the three-state
//! Kripke structure over `{p, q}`.

use alloc::vec;

use crate::compose::Network;
use crate::kripke::FiniteKripke;
use crate::model::{Atom, AutomatonBuilder, HybridAutomaton, Jump, Rate, RelOp};

use RelOp::*;

fn build(b: AutomatonBuilder) -> HybridAutomaton {
    b.build().expect("sample automaton is well-formed")
}

/// Login protocol with one clock and five modes.
pub fn login() -> HybridAutomaton {
    build(
        AutomatonBuilder::new("login")
            .var("x")
            .initial_mode("standby")
            .mode("valid")
            .mode("delay")
            .mode("error")
            .mode("connect")
            .edge("standby", "valid", "user_name", vec![], Jump::resets(&[("x", 0)]))
            .edge("valid", "standby", "restart", vec![Atom::rect("x", Gt, 60)], Jump::identity())
            .edge("delay", "standby", "restart", vec![Atom::rect("x", Ge, 10)], Jump::identity())
            .edge("error", "delay", "retry", vec![], Jump::resets(&[("x", 0)]))
            .edge("valid", "error", "pw_fail", vec![Atom::rect("x", Lt, 60)], Jump::identity())
            .edge("valid", "connect", "pw_match", vec![Atom::rect("x", Lt, 60)], Jump::identity()),
    )
}

/// Initialized rectangular automaton: rates `[1,2]`, `[1,2]`, `[7,8]`.
pub fn rect_fig() -> HybridAutomaton {
    build(
        AutomatonBuilder::new("rect")
            .var("x")
            .initial_mode("A")
            .mode("B")
            .mode("C")
            .rate("A", "x", Rate::Interval(1, 2))
            .rate("B", "x", Rate::Interval(1, 2))
            .rate("C", "x", Rate::Interval(7, 8))
            .edge("A", "B", "go", vec![Atom::rect("x", Le, 10)], Jump::identity())
            .edge("B", "C", "up", vec![], Jump::resets(&[("x", 3)]))
            .edge("C", "B", "down", vec![], Jump::resets(&[("x", 0)])),
    )
}

/// Mod-4 counter with pause: `x` advances with time in `count`, freezes in
/// `pause`; the `x = 3` tick wraps it to zero.
pub fn counter() -> HybridAutomaton {
    build(
        AutomatonBuilder::new("counter")
            .var("x")
            .initial_mode("count")
            .mode("pause")
            .rate("count", "x", Rate::Const(1))
            .rate("pause", "x", Rate::Const(0))
            .invariant("count", vec![Atom::rect("x", Le, 3)])
            .edge("count", "count", "tick", vec![Atom::rect("x", Lt, 3)], Jump::identity())
            .edge("count", "count", "tick", vec![Atom::rect("x", Eq, 3)], Jump::resets(&[("x", 0)]))
            .edge("count", "pause", "pause", vec![], Jump::identity())
            .edge("pause", "count", "on", vec![], Jump::identity())
            .edge("pause", "pause", "tick", vec![], Jump::identity()),
    )
}

/// Bouncing ball with affine flow `ẋ₁ = x₂`. The damping jump `x₂' = -c·x₂`
/// is not a constant assignment and is left out; the closed form lives in
/// [`crate::semantics::bouncing_ball`].
pub fn bouncing_ball() -> HybridAutomaton {
    build(
        AutomatonBuilder::new("ball")
            .var("x1")
            .var("x2")
            .initial_mode("fall")
            .rate("fall", "x1", Rate::Affine { terms: [("x2".into(), 1)].into_iter().collect(), constant: 0 })
            .rate("fall", "x2", Rate::Const(-10))
            .invariant("fall", vec![Atom::rect("x1", Ge, 0)])
            .edge("fall", "fall", "impact", vec![Atom::rect("x1", Eq, 0)], Jump::identity())
            .init(vec![Atom::rect("x1", Eq, 10), Atom::rect("x2", Eq, 0)]),
    )
}

/// Job-shop network with paused clocks and `done` flags: job 1 takes 3 time
/// units, job 2 takes 4 and must wait for job 1; both run on one machine.
pub fn jobshop_hybrid_network() -> Network {
    let j1 = build(
        AutomatonBuilder::new("j1")
            .var("x1")
            .var("done1")
            .initial_mode("U1")
            .mode("S1")
            .mode("F1")
            .rate_everywhere("x1", Rate::Const(0))
            .rate_everywhere("done1", Rate::Const(0))
            .rate("S1", "x1", Rate::Const(1))
            .label("F1", &["j1_finish"])
            .edge("U1", "S1", "begin1", vec![], Jump::identity())
            .edge("S1", "F1", "finish1", vec![Atom::rect("x1", Eq, 3)], Jump::resets(&[("done1", 1)])),
    );
    let j2 = build(
        AutomatonBuilder::new("j2")
            .var("x2")
            .var("done2")
            .var("done1")
            .initial_mode("U2")
            .mode("S2")
            .mode("F2")
            .rate_everywhere("x2", Rate::Const(0))
            .rate_everywhere("done2", Rate::Const(0))
            .rate_everywhere("done1", Rate::Const(0))
            .rate("S2", "x2", Rate::Const(1))
            .label("F2", &["j2_finish"])
            .edge("U2", "S2", "begin2", vec![Atom::rect("done1", Eq, 1)], Jump::identity())
            .edge("S2", "F2", "finish2", vec![Atom::rect("x2", Eq, 4)], Jump::resets(&[("done2", 1)])),
    );
    Network::new(vec![j1, j2, machine()])
}

fn machine() -> HybridAutomaton {
    build(
        AutomatonBuilder::new("m1")
            .initial_mode("I1")
            .mode("P11")
            .mode("P12")
            .edge("I1", "P11", "begin1", vec![], Jump::identity())
            .edge("P11", "I1", "finish1", vec![], Jump::identity())
            .edge("I1", "P12", "begin2", vec![], Jump::identity())
            .edge("P12", "I1", "finish2", vec![], Jump::identity()),
    )
}

pub fn jobshop_hybrid_product() -> HybridAutomaton {
    jobshop_hybrid_network().product().expect("job-shop network composes")
}

/// Timed variant of the job-shop network: every clock runs at rate 1 and is
/// reset when its job begins. The precedence of job 1 over job 2 is enforced
/// by job 1 joining `begin2` only from its finished mode.
pub fn jobshop_timed_network() -> Network {
    let j1 = build(
        AutomatonBuilder::new("j1")
            .var("x1")
            .initial_mode("U1")
            .mode("S1")
            .mode("F1")
            .label("F1", &["j1_finish"])
            .edge("U1", "S1", "begin1", vec![], Jump::resets(&[("x1", 0)]))
            .edge("S1", "F1", "finish1", vec![Atom::rect("x1", Eq, 3)], Jump::identity())
            .edge("F1", "F1", "begin2", vec![], Jump::identity()),
    );
    let j2 = build(
        AutomatonBuilder::new("j2")
            .var("x2")
            .initial_mode("U2")
            .mode("S2")
            .mode("F2")
            .label("F2", &["j2_finish"])
            .edge("U2", "S2", "begin2", vec![], Jump::resets(&[("x2", 0)]))
            .edge("S2", "F2", "finish2", vec![Atom::rect("x2", Eq, 4)], Jump::identity()),
    );
    Network::new(vec![j1, j2, machine()])
}

pub fn jobshop_timed_product() -> HybridAutomaton {
    jobshop_timed_network().product().expect("job-shop network composes")
}

/// Three-state structure: `m0 {q} ⇄ m1 {p,q}`, `m1 → m2 {p}`, `m2` loops.
pub fn ts1_automaton() -> HybridAutomaton {
    build(
        AutomatonBuilder::new("ts1")
            .initial_mode("m0")
            .mode("m1")
            .mode("m2")
            .label("m0", &["q"])
            .label("m1", &["p", "q"])
            .label("m2", &["p"])
            .edge("m0", "m1", "a", vec![], Jump::identity())
            .edge("m1", "m0", "a", vec![], Jump::identity())
            .edge("m1", "m2", "b", vec![], Jump::identity())
            .edge("m2", "m2", "b", vec![], Jump::identity()),
    )
}

pub fn ts1() -> FiniteKripke {
    let mut k = FiniteKripke::new();
    let m0 = k.add_state("m0", &["q"]);
    let m1 = k.add_state("m1", &["p", "q"]);
    let m2 = k.add_state("m2", &["p"]);
    k.initial.push(m0);
    k.add_transition(m0, "a", m1);
    k.add_transition(m1, "a", m0);
    k.add_transition(m1, "b", m2);
    k.add_transition(m2, "b", m2);
    k
}
