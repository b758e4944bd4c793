use std::collections::{BTreeMap, BTreeSet};

use hav::textfmt::{parse_ltl, parse_model, print_ltl, print_model, AutomatonDecl, ErrorKind, ModelDocument, NetworkDecl};
use hav_core::classify::{classify, Class};
use hav_core::ltl::Ltl;
use hav_core::model::{Atom, HybridAutomaton, Jump, Predicate, Rate, RelOp, Transition};
use hav_core::samples;
use proptest::prelude::*;

fn model_file(name: &str) -> String {
    let path = format!("{}/../../models/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn only(doc: &ModelDocument) -> &HybridAutomaton {
    assert_eq!(doc.automata.len(), 1);
    &doc.automata[0].automaton
}

#[test]
fn model_files_match_reference_models() {
    let login = parse_model(&model_file("login.hav")).unwrap();
    assert_eq!(only(&login), &samples::login());
    assert_eq!(login.automata[0].class, Some(Class::Timed));
    assert_eq!(only(&parse_model(&model_file("rect.hav")).unwrap()), &samples::rect_fig());
    assert_eq!(only(&parse_model(&model_file("counter.hav")).unwrap()), &samples::counter());
    assert_eq!(only(&parse_model(&model_file("ts1.hav")).unwrap()), &samples::ts1_automaton());
    assert_eq!(only(&parse_model(&model_file("ball.hav")).unwrap()), &samples::bouncing_ball());

    let shop = parse_model(&model_file("jobshop.hav")).unwrap();
    assert_eq!(shop.network("all").unwrap(), samples::jobshop_timed_network());
    let hybrid = parse_model(&model_file("jobshop_hybrid.hav")).unwrap();
    assert_eq!(hybrid.network("all").unwrap(), samples::jobshop_hybrid_network());
}

#[test]
fn login_shape() {
    let doc = parse_model(&model_file("login.hav")).unwrap();
    let a = only(&doc);
    assert_eq!(a.modes.len(), 5);
    assert_eq!(a.vars, ["x"]);
    let consts: BTreeSet<i64> = a.transitions.iter().flat_map(|t| &t.guard.atoms).map(Atom::bound).collect();
    assert_eq!(consts, BTreeSet::from([10, 60]));
    assert_eq!(classify(a).class, Class::Timed);
}

#[test]
fn syntax_errors_carry_positions() {
    let e = parse_model("").unwrap_err();
    assert_eq!((e.kind, e.span.line, e.span.column), (ErrorKind::Syntax, 1, 1));

    let e = parse_model("automaton a {\n  mode m { init; }\n  edge m -> m when x < 1;\n}").unwrap_err();
    assert_eq!(e.kind, ErrorKind::Syntax);
    assert_eq!((e.span.line, e.span.column), (3, 15));
    assert!(e.message.contains("`on`"), "{e}");

    let e = parse_model("automaton a { mode m { init; } } $").unwrap_err();
    assert_eq!((e.span.line, e.span.column), (1, 34));
    assert!(parse_model("automaton a { mode m { init; inv x <= 99999999999999999999; } }").is_err());
}

#[test]
fn semantic_errors_name_the_culprit() {
    let cases = [
        ("automaton a { vars: x; mode m { init; inv z <= 3; } }", "`z`"),
        ("automaton a { mode m { init; } edge m -> n on go; }", "`n`"),
        ("automaton a { vars: x, x; mode m { init; } }", "`x`"),
        ("automaton a { mode m { init; } mode m { } }", "`m`"),
        ("automaton a { mode m { } }", "no `init` mode"),
        ("automaton a { vars: x; mode m { init; } edge m -> m on go reset y; }", "`y`"),
        ("automaton a { vars: x; mode m { init; rate x = 2*w; } }", "`w`"),
        ("automaton a { vars: x; mode m { init; rate x in [3, 1]; } }", "[3, 1]"),
        ("automaton a { vars: x; mode m { init; inv x - x <= 1; } }", "itself"),
        ("automaton a { mode m { init; } } network n = a, b;", "`b`"),
        ("automaton a { mode m { init; } } automaton a { mode m { init; } }", "`a`"),
    ];
    for (src, needle) in cases {
        let e = parse_model(src).unwrap_err();
        assert_eq!(e.kind, ErrorKind::Semantic, "{src}: {e}");
        assert!(e.message.contains(needle), "{src}: {e}");
    }
}

#[test]
fn error_display_includes_file() {
    let e = parse_model("automaton").unwrap_err().in_file("m.hav");
    assert!(e.to_string().starts_with("m.hav:1:10: syntax error"), "{e}");
}

#[test]
fn ltl_grammar() {
    let p = || Ltl::prop("p");
    let q = || Ltl::prop("q");
    assert_eq!(parse_ltl("!p U q").unwrap(), p().not().until(q()));
    assert_eq!(parse_ltl("p R q && q").unwrap(), p().release(q()).and(q()));
    assert_eq!(parse_ltl("p -> q -> p").unwrap(), p().implies(q().implies(p())));
    assert_eq!(parse_ltl("G F p").unwrap(), p().eventually().always());
    assert_eq!(parse_ltl("true U false").unwrap(), Ltl::True.until(Ltl::False));
    assert_eq!(parse_ltl("((p))").unwrap(), p());
    for bad in ["", "p &&", "(p", "p)", "&& p", "p $ q", "p q"] {
        assert!(parse_ltl(bad).is_err(), "{bad}");
    }
    let e = parse_ltl("p && (q || )").unwrap_err();
    assert_eq!(e.span.column, 12);
}

fn ltl_strategy() -> impl Strategy<Value = Ltl> {
    let leaf = prop_oneof![
        Just(Ltl::True),
        Just(Ltl::False),
        prop::sample::select(vec!["p", "q", "r", "done_1", "a.b"]).prop_map(Ltl::prop),
    ];
    leaf.prop_recursive(5, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Ltl::not),
            inner.clone().prop_map(Ltl::next),
            inner.clone().prop_map(Ltl::eventually),
            inner.clone().prop_map(Ltl::always),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.until(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.release(b)),
        ]
    })
}

proptest! {
    #[test]
    fn ltl_round_trip(f in ltl_strategy().prop_filter("size", |f| f.size() <= 12)) {
        prop_assert_eq!(parse_ltl(&print_ltl(&f)).unwrap(), f);
    }
}

const VAR_POOL: [&str; 4] = ["x", "y", "z1", "clk_b"];
const PROP_POOL: [&str; 4] = ["p", "q", "HALT", "j1_finish"];
const ACTION_POOL: [&str; 4] = ["go", "tick", "on", "reset"];

fn op_strategy() -> impl Strategy<Value = RelOp> {
    prop::sample::select(vec![RelOp::Lt, RelOp::Le, RelOp::Eq, RelOp::Ge, RelOp::Gt])
}

fn atom_strategy(nvars: usize) -> impl Strategy<Value = Atom> {
    let rect = (0..nvars, op_strategy(), -5i64..40).prop_map(|(x, op, c)| Atom::rect(VAR_POOL[x], op, c));
    let diag = (0..nvars, 1..nvars.max(2), op_strategy(), -5i64..10).prop_map(move |(x, d, op, c)| {
        Atom::diag(VAR_POOL[x], VAR_POOL[(x + d) % nvars.max(2)], op, c)
    });
    if nvars >= 2 {
        prop_oneof![3 => rect, 1 => diag].boxed()
    } else {
        rect.boxed()
    }
}

fn pred_strategy(nvars: usize) -> BoxedStrategy<Predicate> {
    if nvars == 0 {
        return Just(Predicate::top()).boxed();
    }
    prop::collection::vec(atom_strategy(nvars), 0..3).prop_map(Predicate::new).boxed()
}

fn rate_strategy(nvars: usize) -> impl Strategy<Value = Rate> {
    let affine = (prop::collection::btree_map(0..nvars, prop_oneof![-3i64..=-1, 1i64..=3], 1..3), -4i64..4).prop_map(
        |(terms, constant)| Rate::Affine {
            terms: terms.into_iter().map(|(x, k)| (VAR_POOL[x].to_string(), k)).collect(),
            constant,
        },
    );
    prop_oneof![
        3 => (-3i64..4).prop_map(Rate::Const),
        1 => (0i64..4, 0i64..4).prop_map(|(lo, w)| Rate::Interval(lo, lo + w)),
        1 => affine,
    ]
}

fn automaton_strategy(name: String) -> impl Strategy<Value = AutomatonDecl> {
    (0usize..=3, 1usize..=4).prop_flat_map(move |(nvars, nmodes)| {
        let name = name.clone();
        let vars: Vec<String> = VAR_POOL[..nvars].iter().map(|s| s.to_string()).collect();
        let mode_names: Vec<String> = (0..nmodes).map(|i| format!("{}m{i}", if i % 2 == 0 { "" } else { "B." })).collect();
        let flow = prop::collection::vec(rate_strategy(nvars.max(1)), nvars);
        let label = prop_oneof![
            2 => Just(None),
            1 => prop::collection::btree_set(prop::sample::select(PROP_POOL.to_vec()), 0..3).prop_map(Some),
        ];
        let mode = (pred_strategy(nvars), flow, label);
        let edge = (
            0..nmodes,
            0..nmodes,
            prop::sample::select(ACTION_POOL.to_vec()),
            pred_strategy(nvars),
            prop::collection::btree_map(0..nvars.max(1), -2i64..5, 0..=nvars),
        );
        (
            prop::collection::vec(mode, nmodes),
            prop::collection::btree_set(0..nmodes, 1..=nmodes),
            prop::collection::vec(edge, 0..5),
            prop::option::of(pred_strategy(nvars)),
            prop::collection::btree_set(prop::sample::select(vec!["idle", "sync"]), 0..2),
            any::<bool>(),
        )
            .prop_map(move |(modes, initial, edges, init, extra_actions, declare_class)| {
                let mut actions: BTreeSet<String> = extra_actions.into_iter().map(String::from).collect();
                let transitions: Vec<Transition> = edges
                    .into_iter()
                    .map(|(source, target, action, guard, resets)| {
                        actions.insert(action.to_string());
                        let assign: BTreeMap<String, i64> = if nvars == 0 {
                            BTreeMap::new()
                        } else {
                            resets.into_iter().map(|(x, c)| (vars[x].clone(), c)).collect()
                        };
                        Transition { source, guard, action: action.to_string(), jump: Jump { assign }, target }
                    })
                    .collect();
                let a = HybridAutomaton {
                    name: name.clone(),
                    modes: mode_names.clone(),
                    initial: initial.into_iter().collect(),
                    actions,
                    vars: vars.clone(),
                    transitions,
                    invariants: modes.iter().map(|m| m.0.clone()).collect(),
                    flows: modes
                        .iter()
                        .map(|m| {
                            vars.iter()
                                .zip(&m.1)
                                .map(|(x, r)| {
                                    let r = match r {
                                        Rate::Affine { .. } if nvars == 0 => Rate::Const(1),
                                        r => r.clone(),
                                    };
                                    (x.clone(), r)
                                })
                                .collect()
                        })
                        .collect(),
                    init_valuations: init.unwrap_or_else(|| {
                        Predicate::new(vars.iter().map(|x| Atom::rect(x, RelOp::Eq, 0)).collect())
                    }),
                    labels: modes
                        .iter()
                        .zip(&mode_names)
                        .map(|(m, n)| match &m.2 {
                            Some(l) => l.iter().map(|s| s.to_string()).collect(),
                            None => BTreeSet::from([n.clone()]),
                        })
                        .collect(),
                };
                let class = declare_class.then(|| classify(&a).class);
                AutomatonDecl { automaton: a, class }
            })
    })
}

fn document_strategy() -> impl Strategy<Value = ModelDocument> {
    (1usize..=3).prop_flat_map(|n| {
        let automata: Vec<_> = (0..n).map(|i| automaton_strategy(format!("a{i}"))).collect();
        (automata, prop::collection::vec(prop::collection::vec(0..n, 1..=3), 0..3)).prop_map(|(automata, nets)| {
            let networks = nets
                .into_iter()
                .enumerate()
                .map(|(i, members)| NetworkDecl {
                    name: format!("net{i}"),
                    members: members.into_iter().map(|m| format!("a{m}")).collect(),
                })
                .collect();
            ModelDocument { automata, networks }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn model_round_trip(doc in document_strategy()) {
        for d in &doc.automata {
            d.automaton.validate().unwrap();
        }
        let text = print_model(&doc);
        let back = parse_model(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, doc);
    }
}
