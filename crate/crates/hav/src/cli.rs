//! The `hav` command line. Results go to the output stream or to the file
//! named by `-o`, `--json PATH` or `--dot PATH`; diagnostics go to the error
//! stream. Exit codes: 0 success or property holds, 1 property violated,
//! 2 usage, input or parse error, 3 unsupported automaton class.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use hav_core::bisim::coarsest_quotient;
use hav_core::buchi::translate_to_buchi;
use hav_core::classify::{classify, max_constant, Class};
use hav_core::compose::{prune_unreachable, ComposeError};
use hav_core::kripke::FiniteKripke;
use hav_core::mcheck::{check_timed, Counterexample, McheckError, Verdict};
use hav_core::minsky::{encode, halting_path_check, MinskyError, MinskyMachine};
use hav_core::model::HybridAutomaton;
use hav_core::rational::{self, floor, int, to_text, Rational};
use hav_core::reduce::{multirate_to_timed, rect_to_multirate, ReduceError, ScaleCertificate};
use hav_core::regions::{region_count_bound, region_graph_with_k, RegionError};
use hav_core::semantics::{bouncing_ball, simulate, SemanticsError, TimeValue};

use crate::dot;
use crate::json::{self, CertificateJson};
use crate::textfmt::{self, ModelDocument};

#[derive(Parser, Debug)]
#[command(name = "hav", version, about = "Hybrid automata verification toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Select {
    /// Use the product of this network.
    #[arg(long)]
    network: Option<String>,
    /// Use this automaton (default: the only one in the file).
    #[arg(long)]
    automaton: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Model check an LTL formula.
    Check {
        model: String,
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        select: Select,
        /// Write the counterexample as JSON (to stdout without a path).
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
        /// Write the region graph as DOT.
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        dot: Option<String>,
    },
    /// Replay a script of delays and edges.
    Simulate {
        model: String,
        /// JSON array of `{"delay": "1/2", "action": "go"}` or `{"delay": 1, "edge": 0}`.
        #[arg(long)]
        script: String,
        #[command(flatten)]
        select: Select,
    },
    /// Build the region graph of a timed automaton.
    Regions {
        model: String,
        #[command(flatten)]
        select: Select,
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        dot: Option<String>,
        /// Print state count and the theoretical bound.
        #[arg(long)]
        stats: bool,
        /// Raise the maximal constant to at least this value.
        #[arg(long, default_value_t = 0)]
        k: u64,
    },
    /// Materialize the product of a network.
    Compose {
        model: String,
        #[arg(long)]
        network: String,
        #[arg(short = 'o', long)]
        output: Option<String>,
        /// Drop unreachable mode tuples.
        #[arg(long)]
        reachable: bool,
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        dot: Option<String>,
    },
    /// Bisimulation quotient of a finite abstraction.
    Quotient {
        model: String,
        #[command(flatten)]
        select: Select,
        #[arg(long, value_enum, default_value_t = Pipeline::Regions)]
        pipeline: Pipeline,
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        dot: Option<String>,
    },
    /// Reduce a rectangular or multi-rate automaton.
    Reduce {
        model: String,
        #[command(flatten)]
        select: Select,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(short = 'o', long)]
        output: Option<String>,
        #[arg(long)]
        certificate: Option<String>,
    },
    /// Translate an LTL formula to a Büchi automaton.
    Ltl2buchi {
        formula: String,
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        dot: Option<String>,
    },
    /// Encode a two-counter machine as a hybrid automaton.
    EncodeMinsky {
        program: String,
        #[arg(short = 'o', long)]
        output: Option<String>,
        #[arg(long)]
        formula_out: Option<String>,
        /// Also run the machine for at most this many steps and check the
        /// encoded halting path.
        #[arg(long)]
        check: Option<usize>,
    },
    /// Closed-form bouncing ball run.
    Ball {
        #[arg(long, default_value = "10")]
        l: String,
        #[arg(long, default_value = "9.8")]
        g: String,
        #[arg(long, default_value = "0.5")]
        c: String,
        #[arg(long, default_value_t = 40)]
        n: usize,
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        json: Option<String>,
    },
    /// Report the class, initialization and largest constant.
    Classify {
        model: String,
        #[command(flatten)]
        select: Select,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Pipeline {
    /// Region graph of a timed automaton.
    Regions,
    /// Control graph: modes and edges, ignoring variables.
    Modes,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Multirate,
    Timed,
}

enum Failure {
    Input(String),
    Unsupported(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Unsupported(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Unsupported(m) => m,
        }
    }
}

impl From<ReduceError> for Failure {
    fn from(e: ReduceError) -> Failure {
        match e {
            ReduceError::WrongClass { .. } | ReduceError::NotInitialized { .. } | ReduceError::NoInitialPoint => {
                Failure::Unsupported(e.to_string())
            }
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<RegionError> for Failure {
    fn from(e: RegionError) -> Failure {
        match e {
            RegionError::WrongClass(_) | RegionError::DiagonalUnsupported(_) => Failure::Unsupported(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<McheckError> for Failure {
    fn from(e: McheckError) -> Failure {
        match e {
            McheckError::Region(r) => r.into(),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<ComposeError> for Failure {
    fn from(e: ComposeError) -> Failure {
        Failure::Input(e.to_string())
    }
}

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Failure {
        Failure::Input(e.to_string())
    }
}

impl From<MinskyError> for Failure {
    fn from(e: MinskyError) -> Failure {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let mut ctx = Ctx { out, err };
    match ctx.dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(ctx.err, "error: {}", f.message());
            f.code()
        }
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

fn read(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn load(path: &str) -> Result<ModelDocument, Failure> {
    let text = read(path)?;
    textfmt::parse_model(&text).map_err(|e| Failure::Input(e.in_file(path).to_string()))
}

fn formula(text: &str) -> Result<hav_core::ltl::Ltl, Failure> {
    textfmt::parse_ltl(text).map_err(|e| Failure::Input(format!("formula {e}")))
}

fn select(doc: &ModelDocument, sel: &Select) -> Result<HybridAutomaton, Failure> {
    match (&sel.network, &sel.automaton) {
        (Some(_), Some(_)) => Err(Failure::Input("give either --network or --automaton, not both".into())),
        (Some(n), None) => {
            let net = doc.network(n).ok_or_else(|| Failure::Input(format!("no network `{n}`")))?;
            Ok(net.product()?)
        }
        (None, Some(a)) => doc.automaton(a).cloned().ok_or_else(|| Failure::Input(format!("no automaton `{a}`"))),
        (None, None) => match doc.automata.as_slice() {
            [one] => Ok(one.automaton.clone()),
            _ => Err(Failure::Input("the file declares several automata; choose one with --automaton or --network".into())),
        },
    }
}

/// Rounds `r` toward minus infinity to `digits` decimal places.
fn decimal(r: &Rational, digits: u32) -> String {
    let scale = int(10i64.pow(digits));
    let scaled = floor(&(r * &scale));
    let neg = scaled < 0.into();
    let mut s = scaled.magnitude().to_string();
    while s.len() <= digits as usize {
        s.insert(0, '0');
    }
    let (whole, frac) = s.split_at(s.len() - digits as usize);
    format!("{}{whole}.{frac}", if neg { "-" } else { "" })
}

/// Reduced timed automaton for model checking, with the scale certificate
/// when the input was not already timed.
struct Prepared {
    timed: HybridAutomaton,
    scale: Option<(ScaleCertificate, HybridAutomaton)>,
}

fn prepare(a: HybridAutomaton) -> Result<Prepared, Failure> {
    let report = classify(&a);
    match report.class {
        Class::Timed => Ok(Prepared { timed: a, scale: None }),
        Class::MultiRate => {
            let (timed, cert) = multirate_to_timed(&a)?;
            Ok(Prepared { timed, scale: Some((cert, a)) })
        }
        Class::Rectangular => {
            let split = rect_to_multirate(&a)?;
            let (timed, cert) = multirate_to_timed(&split.automaton)?;
            Ok(Prepared { timed, scale: Some((cert, split.automaton)) })
        }
        Class::General => Err(Failure::Unsupported(format!(
            "automaton `{}` is of class general; model checking needs a timed, multirate or rect automaton",
            a.name
        ))),
    }
}

/// Rewrites a counterexample of the reduced automaton in terms of the
/// multi-rate one: original mode names, unscaled delays and values.
fn unscale(cex: &mut Counterexample, reduced: &HybridAutomaton, cert: &ScaleCertificate, original: &HybridAutomaton) {
    let factor = int(cert.factor);
    for step in cex.stem.iter_mut().chain(cex.cycle.iter_mut()) {
        let Some(m) = reduced.mode_index(&step.mode) else { continue };
        step.mode = original.modes[cert.modes[m].original].clone();
        if let Some(d) = &mut step.delay {
            *d = &*d / &factor;
        }
        if let Some(v) = &mut step.valuation {
            *v = cert.valuation(m, v);
        }
    }
}

#[derive(Deserialize)]
struct ScriptStep {
    delay: serde_json::Value,
    #[serde(default)]
    action: Option<String>,
    #[serde(default)]
    edge: Option<usize>,
}

#[derive(Serialize)]
struct RunStepJson {
    delay: String,
    edge: usize,
    action: String,
    mode: String,
    valuation: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct RunJson {
    mode: String,
    valuation: BTreeMap<String, String>,
    steps: Vec<RunStepJson>,
    total_time: String,
}

#[derive(Serialize)]
struct BallJson {
    t1: String,
    t1_exact: bool,
    zeno_time: Option<String>,
    impact_times: Vec<String>,
}

fn texts(v: &hav_core::model::Valuation) -> BTreeMap<String, String> {
    v.iter().map(|(x, r)| (x.clone(), to_text(r))).collect()
}

impl Ctx<'_> {
    /// Writes `text` to stdout for `-` or no path, else to the file.
    fn emit(&mut self, path: Option<&str>, text: &str) -> Result<(), Failure> {
        match path {
            None | Some("-") => self.out.write_all(text.as_bytes()).map_err(|e| Failure::Input(e.to_string())),
            Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{p}: {e}"))),
        }
    }

    fn dispatch(&mut self, cmd: Command) -> Outcome {
        match cmd {
            Command::Check { model, formula: f, select: sel, json, dot } => self.check(&model, &f, &sel, json, dot),
            Command::Simulate { model, script, select: sel } => self.simulate(&model, &script, &sel),
            Command::Regions { model, select: sel, dot, stats, k } => self.regions(&model, &sel, dot, stats, k),
            Command::Compose { model, network, output, reachable, dot } => {
                self.compose(&model, &network, output, reachable, dot)
            }
            Command::Quotient { model, select: sel, pipeline, dot } => self.quotient(&model, &sel, pipeline, dot),
            Command::Reduce { model, select: sel, to, output, certificate } => {
                self.reduce(&model, &sel, to, output, certificate)
            }
            Command::Ltl2buchi { formula: f, dot } => self.ltl2buchi(&f, dot),
            Command::EncodeMinsky { program, output, formula_out, check } => {
                self.encode_minsky(&program, output, formula_out, check)
            }
            Command::Ball { l, g, c, n, json } => self.ball(&l, &g, &c, n, json),
            Command::Classify { model, select: sel } => self.classify(&model, &sel),
        }
    }

    fn check(&mut self, model: &str, f: &str, sel: &Select, json: Option<String>, dot: Option<String>) -> Outcome {
        let phi = formula(f)?;
        let doc = load(model)?;
        let a = select(&doc, sel)?;
        let prepared = prepare(a)?;
        let mut result = check_timed(&prepared.timed, &phi)?;
        if let Some(path) = &dot {
            self.emit(Some(path), &dot::kripke_dot(&result.graph.kripke, &prepared.timed.name))?;
        }
        let Verdict::Violated(cex) = &mut result.verdict else {
            if json.as_deref() != Some("-") {
                writeln!(self.out, "holds").map_err(|e| Failure::Input(e.to_string()))?;
            }
            return Ok(0);
        };
        if let Some((cert, original)) = &prepared.scale {
            unscale(cex, &prepared.timed, cert, original);
        }
        match json.as_deref() {
            Some("-") => self.emit(None, &json::emit_counterexample(cex))?,
            Some(path) => {
                self.emit(Some(path), &json::emit_counterexample(cex))?;
                self.emit(None, &describe(cex))?;
            }
            None => self.emit(None, &describe(cex))?,
        }
        Ok(1)
    }

    fn simulate(&mut self, model: &str, script: &str, sel: &Select) -> Outcome {
        let doc = load(model)?;
        let a = select(&doc, sel)?;
        let steps: Vec<ScriptStep> =
            serde_json::from_str(&read(script)?).map_err(|e| Failure::Input(format!("{script}: {e}")))?;
        let mut plan: Vec<(Rational, usize)> = Vec::new();
        for (i, s) in steps.iter().enumerate() {
            let delay_text = match &s.delay {
                serde_json::Value::String(t) => t.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                _ => return Err(Failure::Input(format!("step {i}: delay must be a number or a string"))),
            };
            let delay = rational::parse(&delay_text).map_err(|e| Failure::Input(format!("step {i}: {e}")))?;
            let edge = match (s.edge, &s.action) {
                (Some(e), _) => e,
                (None, Some(act)) => {
                    let mode = simulate(&a, &plan)?.end().mode;
                    let candidates: Vec<usize> = a.outgoing(mode).filter(|&e| &a.transitions[e].action == act).collect();
                    let mut chosen = None;
                    for e in &candidates {
                        let mut trial = plan.clone();
                        trial.push((delay.clone(), *e));
                        if simulate(&a, &trial).is_ok() {
                            chosen = Some(*e);
                            break;
                        }
                    }
                    match (chosen, candidates.first()) {
                        (Some(e), _) | (None, Some(&e)) => e,
                        (None, None) => {
                            return Err(Failure::Input(format!(
                                "step {i}: no `{act}` edge leaves mode `{}`",
                                a.modes[mode]
                            )))
                        }
                    }
                }
                (None, None) => return Err(Failure::Input(format!("step {i}: give an `action` or an `edge`"))),
            };
            plan.push((delay, edge));
        }
        let run = simulate(&a, &plan)?;
        let view = RunJson {
            mode: a.modes[run.start.mode].clone(),
            valuation: texts(&run.start.valuation),
            steps: run
                .steps
                .iter()
                .map(|s| RunStepJson {
                    delay: to_text(&s.delay),
                    edge: s.edge,
                    action: s.action.clone(),
                    mode: a.modes[s.after.mode].clone(),
                    valuation: texts(&s.after.valuation),
                })
                .collect(),
            total_time: to_text(&run.total_time()),
        };
        self.emit(None, &json::to_string(&view))?;
        Ok(0)
    }

    fn regions(&mut self, model: &str, sel: &Select, dot: Option<String>, stats: bool, k: u64) -> Outcome {
        let doc = load(model)?;
        let a = select(&doc, sel)?;
        let g = region_graph_with_k(&a, k)?;
        if stats || dot.as_deref().is_none_or(|p| p != "-") {
            let bound = region_count_bound(a.modes.len() as u64, g.clocks.len() as u64, g.k);
            let text = format!(
                "states: {}\nbound: {bound}\nmodes: {}\nclocks: {}\nK: {}\n",
                g.kripke.len(),
                a.modes.len(),
                g.clocks.len(),
                g.k
            );
            self.emit(None, &text)?;
        }
        if let Some(path) = &dot {
            self.emit(Some(path), &dot::kripke_dot(&g.kripke, &a.name))?;
        }
        Ok(0)
    }

    fn compose(
        &mut self,
        model: &str,
        network: &str,
        output: Option<String>,
        reachable: bool,
        dot: Option<String>,
    ) -> Outcome {
        let doc = load(model)?;
        let net = doc.network(network).ok_or_else(|| Failure::Input(format!("no network `{network}`")))?;
        let mut p = net.product()?;
        p.name = network.to_string();
        if reachable {
            p = prune_unreachable(&p);
        }
        if let Some(path) = &dot {
            self.emit(Some(path), &dot::automaton_dot(&p))?;
        }
        if dot.as_deref() != Some("-") || output.is_some() {
            self.emit(output.as_deref(), &textfmt::print_automaton(&p, None))?;
        }
        Ok(0)
    }

    fn quotient(&mut self, model: &str, sel: &Select, pipeline: Pipeline, dot: Option<String>) -> Outcome {
        let doc = load(model)?;
        let a = select(&doc, sel)?;
        let k = match pipeline {
            Pipeline::Regions => region_graph_with_k(&a, 0)?.kripke,
            Pipeline::Modes => control_graph(&a),
        };
        let (q, _) = coarsest_quotient(&k);
        if dot.as_deref() != Some("-") {
            self.emit(None, &format!("states: {}\nquotient: {}\n", k.len(), q.len()))?;
        }
        if let Some(path) = &dot {
            self.emit(Some(path), &dot::kripke_dot(&q, &a.name))?;
        }
        Ok(0)
    }

    fn reduce(
        &mut self,
        model: &str,
        sel: &Select,
        to: Target,
        output: Option<String>,
        certificate: Option<String>,
    ) -> Outcome {
        let doc = load(model)?;
        let a = select(&doc, sel)?;
        let class = classify(&a).class;
        if class == Class::General {
            return Err(Failure::Unsupported(format!("automaton `{}` is of class general", a.name)));
        }
        let mut cert = CertificateJson::default();
        let multirate = if class == Class::Rectangular {
            let split = rect_to_multirate(&a)?;
            cert.split = Some(json::split_json(&split));
            split.automaton
        } else {
            a
        };
        let (result, result_class) = match to {
            Target::Multirate => (multirate, Class::MultiRate),
            Target::Timed => {
                let (timed, scale) = multirate_to_timed(&multirate)?;
                cert.scale = Some(json::scale_json(&scale, &multirate, &timed));
                (timed, Class::Timed)
            }
        };
        self.emit(output.as_deref(), &textfmt::print_automaton(&result, Some(result_class)))?;
        if let Some(path) = &certificate {
            self.emit(Some(path), &json::to_string(&cert))?;
        }
        Ok(0)
    }

    fn ltl2buchi(&mut self, f: &str, dot: Option<String>) -> Outcome {
        let phi = formula(f)?;
        let b = translate_to_buchi(&phi);
        if let Some(path) = &dot {
            self.emit(Some(path), &dot::buchi_dot(&b))?;
        }
        if dot.as_deref() != Some("-") {
            let mut text = String::new();
            let _ = writeln!(text, "formula: {phi}");
            let _ = writeln!(text, "states: {}", b.len());
            let names = |ids: &mut dyn Iterator<Item = usize>| ids.map(|i| b.states[i].clone()).collect::<Vec<_>>().join(" ");
            let _ = writeln!(text, "initial: {}", names(&mut b.initial.iter().copied()));
            let _ = writeln!(text, "accepting: {}", names(&mut b.accepting.iter().copied()));
            for e in &b.edges {
                let _ = writeln!(text, "{} -> {} [{}]", b.states[e.from], b.states[e.to], e.guard);
            }
            self.emit(None, &text)?;
        }
        Ok(0)
    }

    fn encode_minsky(
        &mut self,
        program: &str,
        output: Option<String>,
        formula_out: Option<String>,
        check: Option<usize>,
    ) -> Outcome {
        let m: MinskyMachine = read(program)?.parse().map_err(|e: MinskyError| Failure::Input(format!("{program}: {e}")))?;
        let enc = encode(&m);
        let text = format!("# formula: {}\n{}", enc.formula, textfmt::print_automaton(&enc.automaton, None));
        self.emit(output.as_deref(), &text)?;
        if let Some(path) = &formula_out {
            self.emit(Some(path), &format!("{}\n", enc.formula))?;
        }
        if let Some(budget) = check {
            let ok = halting_path_check(&m, budget)?;
            writeln!(self.err, "halting path feasible: {ok}").map_err(|e| Failure::Input(e.to_string()))?;
            if !ok {
                return Ok(1);
            }
        }
        Ok(0)
    }

    fn ball(&mut self, l: &str, g: &str, c: &str, n: usize, json: Option<String>) -> Outcome {
        let num = |name: &str, text: &str| {
            rational::parse(text).map_err(|e| Failure::Input(format!("--{name}: {e}")))
        };
        let run = bouncing_ball(&num("l", l)?, &num("c", c)?, &num("g", g)?, n)?;
        let zeno = match &run.zeno_time {
            TimeValue::Finite(t) => Some(t.clone()),
            TimeValue::Infinite => None,
        };
        if let Some(path) = &json {
            let view = BallJson {
                t1: to_text(&run.t1),
                t1_exact: run.t1_exact,
                zeno_time: zeno.as_ref().map(to_text),
                impact_times: run.impact_times.iter().map(to_text).collect(),
            };
            self.emit(Some(path), &json::to_string(&view))?;
            if path == "-" {
                return Ok(0);
            }
        }
        let mut text = String::new();
        let _ = writeln!(text, "t1: {} ({})", to_text(&run.t1), if run.t1_exact { "exact" } else { "approximate" });
        match &zeno {
            Some(t) => {
                let _ = writeln!(text, "zeno time: {} ~ {}", to_text(t), decimal(t, 12));
            }
            None => {
                let _ = writeln!(text, "zeno time: none, the run diverges");
            }
        }
        let _ = writeln!(text, "impacts: {}", run.impact_times.len());
        if let Some(last) = run.impact_times.last() {
            let _ = writeln!(text, "last impact: {}", decimal(last, 12));
        }
        self.emit(None, &text)?;
        Ok(0)
    }

    fn classify(&mut self, model: &str, sel: &Select) -> Outcome {
        let doc = load(model)?;
        let line = |a: &HybridAutomaton| {
            let r = classify(a);
            let init = if r.initialized { "initialized" } else { "not initialized" };
            format!("{}, {init}, K={}", r.class, max_constant(a))
        };
        let text = if sel.network.is_none() && sel.automaton.is_none() && doc.automata.len() > 1 {
            doc.automata.iter().map(|d| format!("{}: {}\n", d.automaton.name, line(&d.automaton))).collect()
        } else {
            format!("{}\n", line(&select(&doc, sel)?))
        };
        self.emit(None, &text)?;
        Ok(0)
    }
}

/// Modes and edges of `a` as a Kripke structure.
fn control_graph(a: &HybridAutomaton) -> FiniteKripke {
    let mut k = FiniteKripke::new();
    for (m, name) in a.modes.iter().enumerate() {
        k.add_labeled_state(name.clone(), a.labels[m].clone());
    }
    k.props = a.propositions();
    k.initial = a.initial.clone();
    for (i, t) in a.transitions.iter().enumerate() {
        k.add_transition(t.source, &t.action, t.target);
        k.transitions.last_mut().unwrap().edge = Some(i);
    }
    k.close_deadlocks();
    k
}

fn describe(cex: &Counterexample) -> String {
    let mut text = String::from("violated\n");
    let mut total = Rational::from_integer(0.into());
    let mut timed = false;
    for (part, steps) in [("stem", &cex.stem), ("loop", &cex.cycle)] {
        let _ = writeln!(text, "{part}:");
        for s in steps.iter() {
            let labels: Vec<&str> = s.labels.iter().map(String::as_str).collect();
            let _ = write!(text, "  {} {{{}}}", s.mode, labels.join(","));
            if let Some(v) = s.valuation.as_ref().filter(|v| !v.is_empty()) {
                let vals: Vec<String> = v.iter().map(|(x, r)| format!("{x}={}", to_text(r))).collect();
                let _ = write!(text, " [{}]", vals.join(", "));
            }
            if let Some(d) = &s.delay {
                let _ = write!(text, " wait {}", to_text(d));
                if part == "stem" {
                    total += d;
                    timed = true;
                }
            }
            let _ = writeln!(text, " --{}-->", s.action);
        }
    }
    if timed {
        let _ = writeln!(text, "stem time: {}", to_text(&total));
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals() {
        assert_eq!(decimal(&rational::ratio(30, 7), 4), "4.2857");
        assert_eq!(decimal(&rational::ratio(1, 20), 3), "0.050");
        assert_eq!(decimal(&rational::ratio(-1, 2), 2), "-0.50");
    }
}
