//! JSON exports. Rationals are written as exact `"p/q"` strings.

use std::collections::BTreeMap;

use serde::Serialize;

use hav_core::mcheck::{Counterexample, TraceStep};
use hav_core::model::{HybridAutomaton, Valuation};
use hav_core::rational::to_text;
use hav_core::reduce::{RectSplit, ScaleCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepJson {
    pub mode: String,
    pub labels: Vec<String>,
    pub action: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valuation: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LassoJson {
    pub stem: Vec<StepJson>,
    #[serde(rename = "loop")]
    pub cycle: Vec<StepJson>,
}

fn valuation_json(v: &Valuation) -> BTreeMap<String, String> {
    v.iter().map(|(x, r)| (x.clone(), to_text(r))).collect()
}

fn step_json(s: &TraceStep) -> StepJson {
    StepJson {
        mode: s.mode.clone(),
        labels: s.labels.iter().cloned().collect(),
        action: s.action.clone(),
        delay: s.delay.as_ref().map(to_text),
        valuation: s.valuation.as_ref().map(valuation_json),
    }
}

pub fn lasso_json(stem: &[TraceStep], cycle: &[TraceStep]) -> LassoJson {
    LassoJson { stem: stem.iter().map(step_json).collect(), cycle: cycle.iter().map(step_json).collect() }
}

/// `{"stem":[step...],"loop":[step...]}` with
/// `step = {mode, labels, action, delay?, valuation?}`.
pub fn emit_counterexample(cex: &Counterexample) -> String {
    to_string(&lasso_json(&cex.stem, &cex.cycle))
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitJson {
    /// Interval variable to its lower and upper tracking variables.
    pub bounds: BTreeMap<String, [String; 2]>,
    /// Original transition index of each new transition.
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaleModeJson {
    pub mode: String,
    pub original: String,
    pub anchors: BTreeMap<String, String>,
    pub rates: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaleJson {
    pub factor: i64,
    pub modes: Vec<ScaleModeJson>,
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CertificateJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<ScaleJson>,
}

pub fn split_json(s: &RectSplit) -> SplitJson {
    SplitJson {
        bounds: s.bounds.iter().map(|(x, (lo, hi))| (x.clone(), [lo.clone(), hi.clone()])).collect(),
        edges: s.origin.clone(),
    }
}

/// `original` is the automaton handed to the multi-rate reduction.
pub fn scale_json(c: &ScaleCertificate, original: &HybridAutomaton, reduced: &HybridAutomaton) -> ScaleJson {
    ScaleJson {
        factor: c.factor,
        modes: c
            .modes
            .iter()
            .enumerate()
            .map(|(i, m)| ScaleModeJson {
                mode: reduced.modes[i].clone(),
                original: original.modes[m.original].clone(),
                anchors: valuation_json(&m.anchors),
                rates: c.rates[i].clone(),
            })
            .collect(),
        edges: c.edges.clone(),
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}
