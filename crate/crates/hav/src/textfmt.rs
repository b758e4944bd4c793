//! The `.hav` model language and the LTL surface syntax.
//!
//! ```text
//! automaton login {
//!   vars: x;
//!   class: timed;
//!   mode standby { init; }
//!   mode valid { inv x <= 60; label valid; }
//!   edge standby -> valid on user_name reset x;
//!   edge valid -> connect on pw_match when x < 60;
//! }
//! network all = j1, j2, m1;
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use hav_core::classify::{classify, Class};
use hav_core::compose::Network;
use hav_core::ltl::Ltl;
use hav_core::model::{Atom, HybridAutomaton, Jump, Predicate, Rate, RelOp, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {} error: {message}", match kind { ErrorKind::Syntax => "syntax", ErrorKind::Semantic => "semantic" })]
pub struct ParseError {
    pub kind: ErrorKind,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseError {
    fn syntax(span: SourceSpan, message: impl Into<String>) -> ParseError {
        ParseError { kind: ErrorKind::Syntax, message: message.into(), span }
    }

    fn semantic(span: SourceSpan, message: impl Into<String>) -> ParseError {
        ParseError { kind: ErrorKind::Semantic, message: message.into(), span }
    }

    pub fn in_file(mut self, file: &str) -> ParseError {
        self.span.file = Some(file.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonDecl {
    pub automaton: HybridAutomaton,
    /// Class named by the `class:` clause, if any.
    pub class: Option<Class>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkDecl {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelDocument {
    pub automata: Vec<AutomatonDecl>,
    pub networks: Vec<NetworkDecl>,
}

impl ModelDocument {
    pub fn automaton(&self, name: &str) -> Option<&HybridAutomaton> {
        self.automata.iter().map(|d| &d.automaton).find(|a| a.name == name)
    }

    pub fn network(&self, name: &str) -> Option<Network> {
        let decl = self.networks.iter().find(|n| n.name == name)?;
        let members = decl.members.iter().map(|m| self.automaton(m).cloned()).collect::<Option<Vec<_>>>()?;
        Some(Network::new(members))
    }
}

// ---------------------------------------------------------------- lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

const SYMBOLS: [&str; 23] = [
    "->", ":=", "<=", ">=", "==", "&&", "||", "{", "}", ";", ",", ":", "=", "<", ">", "-", "+", "*", "[", "]", "(", ")",
    "!",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let span = |line, column, length| SourceSpan { file: None, line, column, length };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if is_ident_start(c) {
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Ident(word), span: span(line, col, i - start) });
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits
                .parse::<i64>()
                .map_err(|_| ParseError::syntax(span(line, col, i - start), format!("integer `{digits}` is too large")))?;
            out.push(Token { tok: Tok::Int(n), span: span(line, col, i - start) });
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                return Err(ParseError::syntax(span(line, col, 1), format!("unexpected character `{c}`")));
            };
            i += sym.chars().count();
            out.push(Token { tok: Tok::Sym(sym), span: span(line, col, sym.len()) });
        }
        col += i - start;
    }
    out.push(Token { tok: Tok::Eof, span: span(line, col, 0) });
    Ok(out)
}

// ---------------------------------------------------------------- model parser

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type Spanned<T> = (T, SourceSpan);

/// Atom as written, before variable resolution.
#[derive(Debug, Clone)]
struct RawAtom {
    atom: Atom,
    spans: Vec<Spanned<String>>,
}

#[derive(Default)]
struct RawMode {
    name: Spanned<String>,
    initial: bool,
    rates: Vec<(Spanned<String>, Rate, Vec<Spanned<String>>)>,
    inv: Vec<RawAtom>,
    label: Option<Vec<String>>,
}

struct RawEdge {
    src: Spanned<String>,
    dst: Spanned<String>,
    action: String,
    guard: Vec<RawAtom>,
    resets: Vec<(Spanned<String>, i64)>,
}

struct RawAutomaton {
    name: Spanned<String>,
    vars: Vec<Spanned<String>>,
    class: Option<Spanned<Class>>,
    init: Option<Vec<RawAtom>>,
    actions: Vec<String>,
    modes: Vec<RawMode>,
    edges: Vec<RawEdge>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == w)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::syntax(t.span.clone(), format!("expected {expected}, found {}", t.tok))
    }

    fn sym(&mut self, s: &str) -> Result<SourceSpan, ParseError> {
        if self.is_sym(s) {
            Ok(self.next().span)
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn word(&mut self, w: &str) -> Result<SourceSpan, ParseError> {
        if self.is_word(w) {
            Ok(self.next().span)
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<Spanned<String>, ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if s != "true" => {
                let t = self.next();
                let Tok::Ident(s) = t.tok else { unreachable!() };
                Ok((s, t.span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let neg = self.is_sym("-");
        if neg {
            self.next();
        }
        match self.peek().tok {
            Tok::Int(n) => {
                self.next();
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn ident_list(&mut self, what: &str) -> Result<Vec<Spanned<String>>, ParseError> {
        let mut out = Vec::new();
        if self.is_sym(";") {
            return Ok(out);
        }
        out.push(self.ident(what)?);
        while self.is_sym(",") {
            self.next();
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    fn relop(&mut self) -> Result<RelOp, ParseError> {
        let op = match &self.peek().tok {
            Tok::Sym("<") => RelOp::Lt,
            Tok::Sym("<=") => RelOp::Le,
            Tok::Sym("=") | Tok::Sym("==") => RelOp::Eq,
            Tok::Sym(">=") => RelOp::Ge,
            Tok::Sym(">") => RelOp::Gt,
            _ => return Err(self.unexpected("a comparison")),
        };
        self.next();
        Ok(op)
    }

    /// `ATOM (&& ATOM)*` with `ATOM ::= x REL INT | x - y REL INT | true`.
    fn conj(&mut self) -> Result<Vec<RawAtom>, ParseError> {
        let mut out = Vec::new();
        loop {
            if self.is_word("true") {
                self.next();
            } else {
                let x = self.ident("a variable or `true`")?;
                if self.is_sym("-") {
                    self.next();
                    let y = self.ident("a variable")?;
                    let op = self.relop()?;
                    let c = self.int()?;
                    out.push(RawAtom { atom: Atom::diag(&x.0, &y.0, op, c), spans: vec![x, y] });
                } else {
                    let op = self.relop()?;
                    let c = self.int()?;
                    out.push(RawAtom { atom: Atom::rect(&x.0, op, c), spans: vec![x] });
                }
            }
            if !self.is_sym("&&") {
                return Ok(out);
            }
            self.next();
        }
    }

    /// `INT`, `[INT, INT]` after `in`, or an affine sum `2*y - x + 3`.
    fn rate(&mut self) -> Result<(Rate, Vec<Spanned<String>>), ParseError> {
        if self.is_word("in") {
            self.next();
            self.sym("[")?;
            let lo = self.int()?;
            self.sym(",")?;
            let hi = self.int()?;
            self.sym("]")?;
            return Ok((Rate::Interval(lo, hi), vec![]));
        }
        self.sym("=")?;
        let mut terms: BTreeMap<String, i64> = BTreeMap::new();
        let mut constant = 0i64;
        let mut refs = Vec::new();
        let mut sign = 1;
        if self.is_sym("-") {
            self.next();
            sign = -1;
        }
        loop {
            match self.peek().tok.clone() {
                Tok::Int(n) => {
                    self.next();
                    if self.is_sym("*") {
                        self.next();
                        let y = self.ident("a variable")?;
                        *terms.entry(y.0.clone()).or_default() += sign * n;
                        refs.push(y);
                    } else {
                        constant += sign * n;
                    }
                }
                Tok::Ident(_) => {
                    let y = self.ident("a variable")?;
                    *terms.entry(y.0.clone()).or_default() += sign;
                    refs.push(y);
                }
                _ => return Err(self.unexpected("a rate")),
            }
            if self.is_sym("+") {
                sign = 1;
            } else if self.is_sym("-") {
                sign = -1;
            } else {
                break;
            }
            self.next();
        }
        let rate = if terms.is_empty() { Rate::Const(constant) } else { Rate::Affine { terms, constant } };
        Ok((rate, refs))
    }

    fn mode(&mut self) -> Result<RawMode, ParseError> {
        self.word("mode")?;
        let mut m = RawMode { name: self.ident("a mode name")?, ..Default::default() };
        self.sym("{")?;
        while !self.is_sym("}") {
            let kw = self.peek().clone();
            match &kw.tok {
                Tok::Ident(w) if w == "init" => {
                    self.next();
                    m.initial = true;
                }
                Tok::Ident(w) if w == "rate" => {
                    self.next();
                    let x = self.ident("a variable")?;
                    let (rate, refs) = self.rate()?;
                    m.rates.push((x, rate, refs));
                }
                Tok::Ident(w) if w == "inv" => {
                    self.next();
                    m.inv.extend(self.conj()?);
                }
                Tok::Ident(w) if w == "label" => {
                    self.next();
                    let props = self.ident_list("a proposition")?;
                    m.label.get_or_insert_with(Vec::new).extend(props.into_iter().map(|p| p.0));
                }
                _ => return Err(self.unexpected("`init`, `rate`, `inv`, `label` or `}`")),
            }
            if self.is_sym(";") {
                self.next();
            }
        }
        self.sym("}")?;
        Ok(m)
    }

    fn edge(&mut self) -> Result<RawEdge, ParseError> {
        self.word("edge")?;
        let src = self.ident("a mode name")?;
        self.sym("->")?;
        let dst = self.ident("a mode name")?;
        self.word("on")?;
        let action = self.ident("an action name")?.0;
        let mut guard = Vec::new();
        if self.is_word("when") {
            self.next();
            guard = self.conj()?;
        }
        let mut resets = Vec::new();
        if self.is_word("reset") {
            self.next();
            loop {
                let x = self.ident("a variable")?;
                let c = if self.is_sym(":=") {
                    self.next();
                    self.int()?
                } else {
                    0
                };
                resets.push((x, c));
                if !self.is_sym(",") {
                    break;
                }
                self.next();
            }
        }
        self.sym(";")?;
        Ok(RawEdge { src, dst, action, guard, resets })
    }

    fn automaton(&mut self) -> Result<RawAutomaton, ParseError> {
        self.word("automaton")?;
        let name = self.ident("an automaton name")?;
        self.sym("{")?;
        let mut a =
            RawAutomaton { name, vars: vec![], class: None, init: None, actions: vec![], modes: vec![], edges: vec![] };
        while !self.is_sym("}") {
            let kw = self.peek().clone();
            match &kw.tok {
                Tok::Ident(w) if w == "vars" => {
                    self.next();
                    self.sym(":")?;
                    a.vars.extend(self.ident_list("a variable name")?);
                    self.sym(";")?;
                }
                Tok::Ident(w) if w == "class" => {
                    self.next();
                    self.sym(":")?;
                    let t = self.next();
                    let class = match &t.tok {
                        Tok::Ident(w) => Class::from_keyword(w),
                        _ => None,
                    }
                    .ok_or_else(|| ParseError::syntax(t.span.clone(), "expected timed, multirate, rect or general"))?;
                    a.class = Some((class, t.span));
                    self.sym(";")?;
                }
                Tok::Ident(w) if w == "init" => {
                    self.next();
                    self.sym(":")?;
                    a.init.get_or_insert_with(Vec::new).extend(self.conj()?);
                    self.sym(";")?;
                }
                Tok::Ident(w) if w == "actions" => {
                    self.next();
                    self.sym(":")?;
                    a.actions.extend(self.ident_list("an action name")?.into_iter().map(|x| x.0));
                    self.sym(";")?;
                }
                Tok::Ident(w) if w == "mode" => a.modes.push(self.mode()?),
                Tok::Ident(w) if w == "edge" => a.edges.push(self.edge()?),
                _ => return Err(self.unexpected("`vars`, `class`, `init`, `actions`, `mode`, `edge` or `}`")),
            }
        }
        self.sym("}")?;
        Ok(a)
    }
}

fn resolve(raw: RawAutomaton) -> Result<AutomatonDecl, ParseError> {
    let mut vars: Vec<String> = Vec::new();
    for (x, span) in &raw.vars {
        if vars.contains(x) {
            return Err(ParseError::semantic(span.clone(), format!("variable `{x}` declared twice")));
        }
        vars.push(x.clone());
    }
    let check_var = |(x, span): &Spanned<String>| {
        if vars.contains(x) {
            Ok(())
        } else {
            Err(ParseError::semantic(span.clone(), format!("undeclared variable `{x}`")))
        }
    };
    let pred = |atoms: &[RawAtom]| -> Result<Predicate, ParseError> {
        for a in atoms {
            for s in &a.spans {
                check_var(s)?;
            }
            if let Atom::Diag { left, right, .. } = &a.atom {
                if left == right {
                    return Err(ParseError::semantic(a.spans[0].1.clone(), format!("`{}` compares a variable with itself", a.atom)));
                }
            }
        }
        Ok(Predicate::new(atoms.iter().map(|a| a.atom.clone()).collect()))
    };

    let mut modes: Vec<String> = Vec::new();
    let mut initial = Vec::new();
    let mut invariants = Vec::new();
    let mut flows = Vec::new();
    let mut labels = Vec::new();
    for (i, m) in raw.modes.iter().enumerate() {
        if modes.contains(&m.name.0) {
            return Err(ParseError::semantic(m.name.1.clone(), format!("mode `{}` declared twice", m.name.0)));
        }
        modes.push(m.name.0.clone());
        if m.initial {
            initial.push(i);
        }
        invariants.push(pred(&m.inv)?);
        let mut flow: BTreeMap<String, Rate> = vars.iter().map(|x| (x.clone(), Rate::Const(1))).collect();
        for (x, rate, refs) in &m.rates {
            check_var(x)?;
            for r in refs {
                check_var(r)?;
            }
            if let Rate::Interval(lo, hi) = rate {
                if lo > hi {
                    return Err(ParseError::semantic(x.1.clone(), format!("empty rate interval [{lo}, {hi}]")));
                }
            }
            flow.insert(x.0.clone(), rate.clone());
        }
        flows.push(flow);
        labels.push(match &m.label {
            Some(props) => props.iter().cloned().collect(),
            None => BTreeSet::from([m.name.0.clone()]),
        });
    }
    if initial.is_empty() {
        return Err(ParseError::semantic(raw.name.1.clone(), format!("automaton `{}` has no `init` mode", raw.name.0)));
    }
    let mode_of = |(m, span): &Spanned<String>| {
        modes.iter().position(|x| x == m).ok_or_else(|| ParseError::semantic(span.clone(), format!("undeclared mode `{m}`")))
    };
    let mut actions: BTreeSet<String> = raw.actions.iter().cloned().collect();
    let mut transitions = Vec::new();
    for e in &raw.edges {
        let mut jump = Jump::identity();
        for (x, c) in &e.resets {
            check_var(x)?;
            jump.assign.insert(x.0.clone(), *c);
        }
        actions.insert(e.action.clone());
        transitions.push(Transition {
            source: mode_of(&e.src)?,
            guard: pred(&e.guard)?,
            action: e.action.clone(),
            jump,
            target: mode_of(&e.dst)?,
        });
    }
    let init_valuations = match &raw.init {
        Some(atoms) => pred(atoms)?,
        None => Predicate::new(vars.iter().map(|x| Atom::rect(x, RelOp::Eq, 0)).collect()),
    };
    let automaton = HybridAutomaton {
        name: raw.name.0.clone(),
        modes,
        initial,
        actions,
        vars,
        transitions,
        invariants,
        flows,
        init_valuations,
        labels,
    };
    automaton.validate().map_err(|e| ParseError::semantic(raw.name.1.clone(), e.to_string()))?;
    let class = match raw.class {
        Some((declared, span)) => {
            let actual = classify(&automaton).class;
            if !actual.within(declared) {
                return Err(ParseError::semantic(
                    span,
                    format!("automaton `{}` is declared {declared} but is {actual}", automaton.name),
                ));
            }
            Some(declared)
        }
        None => None,
    };
    Ok(AutomatonDecl { automaton, class })
}

/// Parses a `.hav` document. Every automaton is validated and checked
/// against its declared class; network members must be declared automata.
pub fn parse_model(text: &str) -> Result<ModelDocument, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut doc = ModelDocument::default();
    let mut names: Vec<String> = Vec::new();
    if p.peek().tok == Tok::Eof {
        return Err(p.unexpected("`automaton` or `network`"));
    }
    while p.peek().tok != Tok::Eof {
        if p.is_word("automaton") {
            let raw = p.automaton()?;
            if names.contains(&raw.name.0) {
                return Err(ParseError::semantic(raw.name.1.clone(), format!("`{}` declared twice", raw.name.0)));
            }
            names.push(raw.name.0.clone());
            doc.automata.push(resolve(raw)?);
        } else if p.is_word("network") {
            p.next();
            let (name, span) = p.ident("a network name")?;
            if names.contains(&name) {
                return Err(ParseError::semantic(span, format!("`{name}` declared twice")));
            }
            p.sym("=")?;
            let members = p.ident_list("an automaton name")?;
            p.sym(";")?;
            for (m, span) in &members {
                if !doc.automata.iter().any(|d| &d.automaton.name == m) {
                    return Err(ParseError::semantic(span.clone(), format!("undeclared automaton `{m}`")));
                }
            }
            if members.is_empty() {
                return Err(ParseError::semantic(span, format!("network `{name}` has no members")));
            }
            names.push(name.clone());
            doc.networks.push(NetworkDecl { name, members: members.into_iter().map(|m| m.0).collect() });
        } else {
            return Err(p.unexpected("`automaton` or `network`"));
        }
    }
    Ok(doc)
}

// ---------------------------------------------------------------- printer

fn print_conj(p: &Predicate) -> String {
    if p.atoms.is_empty() {
        return "true".into();
    }
    p.atoms.iter().map(ToString::to_string).collect::<Vec<_>>().join(" && ")
}

pub fn print_automaton(a: &HybridAutomaton, class: Option<Class>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "automaton {} {{", a.name);
    if !a.vars.is_empty() {
        let _ = writeln!(s, "  vars: {};", a.vars.join(", "));
    }
    if let Some(c) = class {
        let _ = writeln!(s, "  class: {c};");
    }
    let zeros = Predicate::new(a.vars.iter().map(|x| Atom::rect(x, RelOp::Eq, 0)).collect());
    if a.init_valuations != zeros {
        let _ = writeln!(s, "  init: {};", print_conj(&a.init_valuations));
    }
    let used: BTreeSet<&String> = a.transitions.iter().map(|t| &t.action).collect();
    let extra: Vec<&str> = a.actions.iter().filter(|x| !used.contains(x)).map(String::as_str).collect();
    if !extra.is_empty() {
        let _ = writeln!(s, "  actions: {};", extra.join(", "));
    }
    for (m, name) in a.modes.iter().enumerate() {
        let mut items = Vec::new();
        if a.initial.contains(&m) {
            items.push("init;".to_string());
        }
        for x in &a.vars {
            match &a.flows[m][x] {
                Rate::Const(1) => {}
                Rate::Interval(lo, hi) => items.push(format!("rate {x} in [{lo}, {hi}];")),
                r => items.push(format!("rate {x} = {r};")),
            }
        }
        if !a.invariants[m].is_top() {
            items.push(format!("inv {};", print_conj(&a.invariants[m])));
        }
        if a.labels[m] != BTreeSet::from([name.clone()]) {
            let props: Vec<&str> = a.labels[m].iter().map(String::as_str).collect();
            items.push(if props.is_empty() { "label;".into() } else { format!("label {};", props.join(", ")) });
        }
        if items.is_empty() {
            let _ = writeln!(s, "  mode {name} {{ }}");
        } else {
            let _ = writeln!(s, "  mode {name} {{ {} }}", items.join(" "));
        }
    }
    for t in &a.transitions {
        let _ = write!(s, "  edge {} -> {} on {}", a.modes[t.source], a.modes[t.target], t.action);
        if !t.guard.is_top() {
            let _ = write!(s, " when {}", print_conj(&t.guard));
        }
        if !t.jump.assign.is_empty() {
            let resets: Vec<String> = t
                .jump
                .assign
                .iter()
                .map(|(x, c)| if *c == 0 { x.clone() } else { format!("{x} := {c}") })
                .collect();
            let _ = write!(s, " reset {}", resets.join(", "));
        }
        s.push_str(";\n");
    }
    s.push_str("}\n");
    s
}

/// Inverse of [`parse_model`].
pub fn print_model(doc: &ModelDocument) -> String {
    let mut parts: Vec<String> = doc.automata.iter().map(|d| print_automaton(&d.automaton, d.class)).collect();
    for n in &doc.networks {
        parts.push(format!("network {} = {};\n", n.name, n.members.join(", ")));
    }
    parts.join("\n")
}

// ---------------------------------------------------------------- LTL

/// Parses `true false IDENT ! && || -> X F G U R ( )`. Unary operators bind
/// tightest, then `U`/`R` (right-associative), `&&`, `||`, and `->`
/// (right-associative).
pub fn parse_ltl(text: &str) -> Result<Ltl, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = ltl_implies(&mut p)?;
    if p.peek().tok != Tok::Eof {
        return Err(p.unexpected("an operator or end of formula"));
    }
    Ok(f)
}

fn ltl_implies(p: &mut Parser) -> Result<Ltl, ParseError> {
    let lhs = ltl_or(p)?;
    if p.is_sym("->") {
        p.next();
        return Ok(lhs.implies(ltl_implies(p)?));
    }
    Ok(lhs)
}

fn ltl_or(p: &mut Parser) -> Result<Ltl, ParseError> {
    let mut f = ltl_and(p)?;
    while p.is_sym("||") {
        p.next();
        f = f.or(ltl_and(p)?);
    }
    Ok(f)
}

fn ltl_and(p: &mut Parser) -> Result<Ltl, ParseError> {
    let mut f = ltl_until(p)?;
    while p.is_sym("&&") {
        p.next();
        f = f.and(ltl_until(p)?);
    }
    Ok(f)
}

fn ltl_until(p: &mut Parser) -> Result<Ltl, ParseError> {
    let lhs = ltl_unary(p)?;
    if p.is_word("U") {
        p.next();
        return Ok(lhs.until(ltl_until(p)?));
    }
    if p.is_word("R") {
        p.next();
        return Ok(lhs.release(ltl_until(p)?));
    }
    Ok(lhs)
}

fn ltl_unary(p: &mut Parser) -> Result<Ltl, ParseError> {
    let t = p.peek().clone();
    match &t.tok {
        Tok::Sym("!") => {
            p.next();
            Ok(ltl_unary(p)?.not())
        }
        Tok::Sym("(") => {
            p.next();
            let f = ltl_implies(p)?;
            p.sym(")")?;
            Ok(f)
        }
        Tok::Ident(w) => {
            p.next();
            Ok(match w.as_str() {
                "X" => ltl_unary(p)?.next(),
                "F" => ltl_unary(p)?.eventually(),
                "G" => ltl_unary(p)?.always(),
                "true" => Ltl::True,
                "false" => Ltl::False,
                "U" | "R" => return Err(ParseError::syntax(t.span, format!("binary operator `{w}` needs a left operand"))),
                _ => Ltl::prop(w),
            })
        }
        _ => Err(p.unexpected("a formula")),
    }
}

/// Inverse of [`parse_ltl`].
pub fn print_ltl(f: &Ltl) -> String {
    f.to_string()
}
