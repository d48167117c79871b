//! Keyed entry schema shared by distribution and functional files.
//!
//! Every entry names its outcomes with `a`, `b`, `c` and its inputs with
//! `x`, `y`, `z`, in party order. An input key may be omitted for a party
//! with a single input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{Rational, Scalar};
use crate::scenario::{Distribution, ScenarioSpec};

const OUTPUT_KEYS: [&str; 3] = ["a", "b", "c"];
const INPUT_KEYS: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryIndex {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<usize>,
}

impl EntryIndex {
    fn outputs(&self) -> [Option<usize>; 3] {
        [self.a, self.b, self.c]
    }

    fn inputs(&self) -> [Option<usize>; 3] {
        [self.x, self.y, self.z]
    }

    /// Builds the keyed index of observable `j`.
    pub fn from_index(sc: &ScenarioSpec, j: usize) -> Result<Self> {
        let (o, i) = sc.split(j)?;
        let get = |v: &Vec<usize>, k: usize| v.get(k).copied();
        Ok(EntryIndex { a: get(&o, 0), b: get(&o, 1), c: get(&o, 2), x: get(&i, 0), y: get(&i, 1), z: get(&i, 2) })
    }

    /// Resolves the keys to an observable index of `sc`.
    pub fn resolve(&self, sc: &ScenarioSpec) -> Result<usize> {
        let n = sc.parties();
        let mut outs = Vec::with_capacity(n);
        let mut ins = Vec::with_capacity(n);
        for k in 0..3 {
            let (o, i) = (self.outputs()[k], self.inputs()[k]);
            if k >= n {
                if o.is_some() || i.is_some() {
                    return Err(Error::Parse(format!(
                        "key '{}' or '{}' given for a {n}-party scenario",
                        OUTPUT_KEYS[k], INPUT_KEYS[k]
                    )));
                }
                continue;
            }
            outs.push(o.ok_or_else(|| Error::Parse(format!("missing key '{}'", OUTPUT_KEYS[k])))?);
            ins.push(match i {
                Some(v) => v,
                None if sc.inputs[k] == 1 => 0,
                None => return Err(Error::Parse(format!("missing key '{}'", INPUT_KEYS[k]))),
            });
        }
        sc.index(&outs, &ins)
    }
}

/// `{"scenario": {...}, "entries": [{"a":0,"b":0,"x":0,"y":0,"p":"1/2"}, ...]}`.
/// Probabilities are `num/den` or decimal strings (plain JSON numbers are
/// accepted too); omitted entries are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionFile {
    pub scenario: ScenarioSpec,
    pub entries: Vec<DistributionEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionEntry {
    #[serde(flatten)]
    pub index: EntryIndex,
    pub p: serde_json::Value,
}

fn at(path: &str, e: Error) -> Error {
    let msg = match e {
        Error::Parse(m) | Error::InvalidDistribution(m) | Error::InvalidScenario(m) | Error::OutOfRange(m) => m,
        other => other.to_string(),
    };
    Error::Parse(format!("{path}: {msg}"))
}

impl DistributionFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Exact entries; normalization is checked exactly.
    pub fn to_rational(&self) -> Result<Distribution<Rational>> {
        let sc = ScenarioSpec::new(self.scenario.inputs.clone(), self.scenario.outputs.clone())
            .map_err(|e| at("/scenario", e))?;
        let mut entries = vec![Rational::from_integer(0); sc.len()];
        let mut seen = vec![false; sc.len()];
        for (k, e) in self.entries.iter().enumerate() {
            let path = format!("/entries/{k}");
            let j = e.index.resolve(&sc).map_err(|err| at(&path, err))?;
            if seen[j] {
                return Err(Error::Parse(format!("{path}: duplicate entry for {}", sc.label(j))));
            }
            seen[j] = true;
            let text = match &e.p {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                _ => return Err(Error::Parse(format!("{path}/p: expected a string or number"))),
            };
            let v: Rational = text.parse().map_err(|err| at(&format!("{path}/p"), err))?;
            if v.signum() < 0 {
                return Err(Error::Parse(format!("{path}/p: probability {text} is negative")));
            }
            entries[j] = v;
        }
        Distribution::new(sc, entries).map_err(|e| at("/entries", e))
    }

    /// Float entries, normalization checked to `1e-9`.
    pub fn to_float(&self) -> Result<Distribution<f64>> {
        let sc = ScenarioSpec::new(self.scenario.inputs.clone(), self.scenario.outputs.clone())
            .map_err(|e| at("/scenario", e))?;
        let mut entries = vec![0.0; sc.len()];
        for (k, e) in self.entries.iter().enumerate() {
            let path = format!("/entries/{k}");
            let j = e.index.resolve(&sc).map_err(|err| at(&path, err))?;
            let text = match &e.p {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                _ => return Err(Error::Parse(format!("{path}/p: expected a string or number"))),
            };
            let v: Rational = text.parse().map_err(|err| at(&format!("{path}/p"), err))?;
            if v.signum() < 0 {
                return Err(Error::Parse(format!("{path}/p: probability {text} is negative")));
            }
            entries[j] = v.to_f64();
        }
        Distribution::new(sc, entries).map_err(|e| at("/entries", e))
    }

    /// Nonzero entries only, with exact text in rational mode and shortest
    /// round-trip decimals in float mode.
    pub fn from_distribution<T: Scalar>(p: &Distribution<T>) -> Result<Self> {
        let sc = p.scenario();
        let mut entries = Vec::new();
        for (j, v) in p.entries().iter().enumerate() {
            if v.is_zero_val() {
                continue;
            }
            entries.push(DistributionEntry {
                index: EntryIndex::from_index(sc, j)?,
                p: serde_json::Value::String(v.to_text()),
            });
        }
        Ok(DistributionFile { scenario: sc.clone(), entries })
    }
}
