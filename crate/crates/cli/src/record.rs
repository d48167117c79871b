//! Result schema written by every subcommand.

use std::collections::BTreeMap;

use bellrelax::lp::DualWitness;
use bellrelax::measures::RelaxationResult;
use bellrelax::num::{Mode, Scalar};
use bellrelax::scenario::ScenarioSpec;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// Arguments after the program name.
    pub command: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// `num/den` in rational mode, a decimal in float mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_decimal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_bits: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<DistributionSummary>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

/// Dual certificate; `z` prices the observed distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub z: Vec<String>,
    pub u: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w: Vec<String>,
    pub v: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSummary {
    pub strategies: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<String>,
    pub dual_feasible: bool,
    /// Nonzero weights of the optimal model as `(strategy, weight)`.
    pub support: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub scenario: ScenarioSpec,
    pub nonsignalling: bool,
    pub signalling_violation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chsh: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chsh_max: Option<String>,
}

pub fn texts<T: Scalar>(v: &[T]) -> Vec<String> {
    v.iter().map(|x| x.to_text()).collect()
}

impl ResultRecord {
    pub fn new(command: Vec<String>, status: &str) -> Self {
        ResultRecord {
            command,
            measure: None,
            status: status.into(),
            mode: None,
            value: None,
            value_decimal: None,
            entropy_bits: None,
            witness: None,
            optimizer: None,
            summary: None,
            details: BTreeMap::new(),
            timing_ms: None,
            diagnostics: Vec::new(),
        }
    }

    pub fn set_value<T: Scalar>(&mut self, v: &T) {
        self.mode = Some(T::MODE);
        self.value = Some(v.to_text());
        self.value_decimal = Some(v.to_f64());
    }

    pub fn from_relaxation<T: Scalar>(command: Vec<String>, r: &RelaxationResult<T>) -> Self {
        let mut rec = ResultRecord::new(command, "optimal");
        rec.measure = Some(r.measure.label().into());
        rec.set_value(&r.value);
        rec.entropy_bits = r.entropy_bits;
        rec.witness = r.witness.as_ref().map(witness);
        rec.optimizer = Some(OptimizerSummary {
            strategies: r.strategies,
            gap: r.gap.as_ref().map(|g| g.to_text()),
            dual_feasible: r.dual_feasible,
            support: r
                .q
                .iter()
                .enumerate()
                .filter(|(_, w)| w.sign_tol(1e-12) != 0)
                .map(|(i, w)| (i, w.to_text()))
                .collect(),
        });
        rec.diagnostics = r.diagnostics.clone();
        rec
    }

    /// First row is the header.
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let dec = self.value_decimal.map(|v| bellrelax::num::format_sig(v, 12)).unwrap_or_default();
        vec![
            vec!["measure".into(), "status".into(), "value".into(), "value_decimal".into(), "entropy_bits".into()],
            vec![
                self.measure.clone().unwrap_or_default(),
                self.status.clone(),
                self.value.clone().unwrap_or_default(),
                dec,
                self.entropy_bits.map(|v| bellrelax::num::format_sig(v, 12)).unwrap_or_default(),
            ],
        ]
    }
}

fn witness<T: Scalar>(w: &DualWitness<T>) -> WitnessRecord {
    WitnessRecord { z: texts(&w.z), u: w.u.to_text(), x: texts(&w.x), w: texts(&w.w), v: w.v.to_text() }
}
