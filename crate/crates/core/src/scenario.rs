//! Bell scenarios, causal-model variants, deterministic strategies and
//! response matrices.
//!
//! Observable index: input tuple slowest, then output tuple, both in party
//! order with the last party fastest. For two parties with binary inputs
//! and outputs, `j = ((x*2 + y)*2 + a)*2 + b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::{Rational, Scalar};

/// Default cap on the number of deterministic strategies.
pub const DEFAULT_STRATEGY_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

fn mixed_radix(digits: &[usize], radices: &[usize]) -> usize {
    digits.iter().zip(radices).fold(0, |acc, (d, r)| acc * r + d)
}

fn mixed_radix_inverse(mut k: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for (o, r) in out.iter_mut().zip(radices).rev() {
        *o = k % r;
        k /= r;
    }
    out
}

impl ScenarioSpec {
    pub fn new(inputs: Vec<usize>, outputs: Vec<usize>) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::InvalidScenario("inputs and outputs list different party counts".into()));
        }
        if !(2..=3).contains(&inputs.len()) {
            return Err(Error::InvalidScenario(format!("{} parties; expected 2 or 3", inputs.len())));
        }
        if inputs.iter().chain(&outputs).any(|&c| c == 0) {
            return Err(Error::InvalidScenario("all input and output counts must be at least 1".into()));
        }
        Ok(ScenarioSpec { inputs, outputs })
    }

    pub fn bipartite(mx: usize, my: usize, oa: usize, ob: usize) -> Self {
        Self::new(vec![mx, my], vec![oa, ob]).expect("valid bipartite scenario")
    }

    /// Two binary inputs and two binary outputs per party.
    pub fn chsh() -> Self {
        Self::bipartite(2, 2, 2, 2)
    }

    /// Entanglement-swapping scenario: binary outer outputs, one middle input.
    pub fn bilocal(mx: usize, mz: usize, ob: usize) -> Self {
        Self::new(vec![mx, 1, mz], vec![2, ob, 2]).expect("valid bilocal scenario")
    }

    pub fn parties(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_input_tuples(&self) -> usize {
        self.inputs.iter().product()
    }

    pub fn num_output_tuples(&self) -> usize {
        self.outputs.iter().product()
    }

    /// Length of every distribution vector over this scenario.
    pub fn len(&self) -> usize {
        self.num_input_tuples() * self.num_output_tuples()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn input_tuple_index(&self, inputs: &[usize]) -> usize {
        mixed_radix(inputs, &self.inputs)
    }

    pub fn input_tuple(&self, k: usize) -> Vec<usize> {
        mixed_radix_inverse(k, &self.inputs)
    }

    pub fn output_tuple_index(&self, outputs: &[usize]) -> usize {
        mixed_radix(outputs, &self.outputs)
    }

    pub fn output_tuple(&self, k: usize) -> Vec<usize> {
        mixed_radix_inverse(k, &self.outputs)
    }

    /// Index of `p(outputs | inputs)`.
    pub fn index(&self, outputs: &[usize], inputs: &[usize]) -> Result<usize> {
        let n = self.parties();
        if outputs.len() != n || inputs.len() != n {
            return Err(Error::OutOfRange(format!("expected {n} outputs and {n} inputs")));
        }
        for k in 0..n {
            if outputs[k] >= self.outputs[k] || inputs[k] >= self.inputs[k] {
                return Err(Error::OutOfRange(format!(
                    "party {k}: output {} of {}, input {} of {}",
                    outputs[k], self.outputs[k], inputs[k], self.inputs[k]
                )));
            }
        }
        Ok(self.index_unchecked(outputs, inputs))
    }

    pub fn index_unchecked(&self, outputs: &[usize], inputs: &[usize]) -> usize {
        self.input_tuple_index(inputs) * self.num_output_tuples() + self.output_tuple_index(outputs)
    }

    /// Inverse of [`ScenarioSpec::index`]: `(outputs, inputs)`.
    pub fn split(&self, j: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        if j >= self.len() {
            return Err(Error::OutOfRange(format!("index {j} of {}", self.len())));
        }
        let no = self.num_output_tuples();
        Ok((self.output_tuple(j % no), self.input_tuple(j / no)))
    }

    /// Human-readable label such as `p(01|10)`.
    pub fn label(&self, j: usize) -> String {
        let (o, i) = self.split(j).expect("index in range");
        let join = |v: &[usize]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("");
        format!("p({}|{})", join(&o), join(&i))
    }
}

/// Observed conditional distribution `p(outputs | inputs)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<T> {
    scenario: ScenarioSpec,
    entries: Vec<T>,
}

/// Tolerance for normalization checks in float mode.
pub const FLOAT_NORMALIZATION_TOL: f64 = 1e-9;

impl<T: Scalar> Distribution<T> {
    /// Validates length, nonnegativity and normalization.
    pub fn new(scenario: ScenarioSpec, entries: Vec<T>) -> Result<Self> {
        if entries.len() != scenario.len() {
            return Err(Error::Dimension(format!(
                "distribution has {} entries, scenario needs {}",
                entries.len(),
                scenario.len()
            )));
        }
        let tol = FLOAT_NORMALIZATION_TOL;
        for (j, e) in entries.iter().enumerate() {
            if e.sign_tol(tol) < 0 {
                return Err(Error::InvalidDistribution(format!("{} = {} is negative", scenario.label(j), e)));
            }
        }
        let d = Distribution { scenario, entries };
        for k in 0..d.scenario.num_input_tuples() {
            let s = crate::num::sum(d.block(k));
            if !s.approx_eq(&T::one(), tol) {
                return Err(Error::InvalidDistribution(format!(
                    "outcomes for input tuple {:?} sum to {}",
                    d.scenario.input_tuple(k),
                    s
                )));
            }
        }
        Ok(d)
    }

    pub fn scenario(&self) -> &ScenarioSpec {
        &self.scenario
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    pub fn get(&self, outputs: &[usize], inputs: &[usize]) -> T {
        self.entries[self.scenario.index_unchecked(outputs, inputs)].clone()
    }

    /// Entries for one input tuple, outputs in index order.
    pub fn block(&self, input_tuple: usize) -> &[T] {
        let no = self.scenario.num_output_tuples();
        &self.entries[input_tuple * no..(input_tuple + 1) * no]
    }

    pub fn uniform(scenario: ScenarioSpec) -> Self {
        let no = scenario.num_output_tuples() as i64;
        let entries = vec![T::from_frac(1, no); scenario.len()];
        Distribution { scenario, entries }
    }

    /// `w * self + (1 - w) * other`
    pub fn mix(&self, other: &Self, w: &T) -> Result<Self> {
        if self.scenario != other.scenario {
            return Err(Error::Dimension("mixing distributions over different scenarios".into()));
        }
        let wc = T::one() - w.clone();
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| w.clone() * a.clone() + wc.clone() * b.clone())
            .collect();
        Ok(Distribution { scenario: self.scenario.clone(), entries })
    }

    pub fn convert<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Distribution<U> {
        Distribution { scenario: self.scenario.clone(), entries: self.entries.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Distribution<f64> {
        self.convert(|x| x.to_f64())
    }

    /// Marginal of the parties in `keep` with the other parties' inputs fixed
    /// to zero. Meaningful when the distribution is nonsignalling.
    pub fn marginal(&self, keep: &[usize]) -> Vec<T> {
        let sub_inputs: Vec<usize> = keep.iter().map(|&k| self.scenario.inputs[k]).collect();
        let sub_outputs: Vec<usize> = keep.iter().map(|&k| self.scenario.outputs[k]).collect();
        let n_in: usize = sub_inputs.iter().product();
        let n_out: usize = sub_outputs.iter().product();
        let mut out = vec![T::zero(); n_in * n_out];
        for j in 0..self.scenario.len() {
            let (o, i) = self.scenario.split(j).expect("in range");
            if (0..self.scenario.parties()).any(|k| !keep.contains(&k) && i[k] != 0) {
                continue;
            }
            let si: Vec<usize> = keep.iter().map(|&k| i[k]).collect();
            let so: Vec<usize> = keep.iter().map(|&k| o[k]).collect();
            let idx = mixed_radix(&si, &sub_inputs) * n_out + mixed_radix(&so, &sub_outputs);
            out[idx] += self.entries[j].clone();
        }
        out
    }

    /// Largest change of any single-party-removed marginal under a change
    /// of the removed party's input.
    pub fn signalling_violation(&self) -> f64 {
        nonsignalling_rows::<T>(&self.scenario)
            .iter()
            .map(|row| crate::num::dot(row, &self.entries).to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn is_nonsignalling(&self, tol: f64) -> bool {
        if T::is_exact() {
            nonsignalling_rows::<T>(&self.scenario).iter().all(|r| crate::num::dot(r, &self.entries).is_zero_val())
        } else {
            self.signalling_violation() <= tol
        }
    }
}

impl Distribution<f64> {
    /// Rounds every entry to the nearest fraction with denominator at most
    /// `max_den`, failing if any entry moves by more than `tol`.
    pub fn rationalize(&self, max_den: i64, tol: f64) -> Result<Distribution<Rational>> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for (j, &x) in self.entries.iter().enumerate() {
            let best = Rational::convergents(x, max_den)
                .into_iter()
                .min_by(|a, b| (a.to_f64() - x).abs().partial_cmp(&(b.to_f64() - x).abs()).unwrap())
                .ok_or_else(|| Error::InvalidDistribution(format!("{} is not finite", self.scenario.label(j))))?;
            if (best.to_f64() - x).abs() > tol {
                return Err(Error::InvalidDistribution(format!(
                    "{} = {x} has no fraction with denominator <= {max_den} within {tol}",
                    self.scenario.label(j)
                )));
            }
            entries.push(best);
        }
        Distribution::new(self.scenario.clone(), entries)
    }
}

/// Linear functionals whose vanishing expresses nonsignalling: for every
/// party, the marginal of the remaining parties at input value `i_k` equals
/// the one at `i_k = 0`.
pub fn nonsignalling_rows<T: Scalar>(sc: &ScenarioSpec) -> Vec<Vec<T>> {
    let n = sc.parties();
    let mut rows = Vec::new();
    for k in 0..n {
        let others: Vec<usize> = (0..n).filter(|&i| i != k).collect();
        let other_in: Vec<usize> = others.iter().map(|&i| sc.inputs[i]).collect();
        let other_out: Vec<usize> = others.iter().map(|&i| sc.outputs[i]).collect();
        let n_oi: usize = other_in.iter().product();
        let n_oo: usize = other_out.iter().product();
        for xk in 1..sc.inputs[k] {
            for oi in 0..n_oi {
                let rest_in = mixed_radix_inverse(oi, &other_in);
                for oo in 0..n_oo {
                    let rest_out = mixed_radix_inverse(oo, &other_out);
                    let mut row = vec![T::zero(); sc.len()];
                    for ok in 0..sc.outputs[k] {
                        for (val, sign) in [(xk, 1i64), (0, -1i64)] {
                            let mut inp = vec![0; n];
                            let mut out = vec![0; n];
                            for (t, &p) in others.iter().enumerate() {
                                inp[p] = rest_in[t];
                                out[p] = rest_out[t];
                            }
                            inp[k] = val;
                            out[k] = ok;
                            row[sc.index_unchecked(&out, &inp)] += T::from_int(sign);
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }
    rows
}

/// Normalization functionals: one per input tuple, summing its outcomes.
pub fn normalization_rows<T: Scalar>(sc: &ScenarioSpec) -> Vec<Vec<T>> {
    let no = sc.num_output_tuples();
    (0..sc.num_input_tuples())
        .map(|k| {
            let mut row = vec![T::zero(); sc.len()];
            for o in 0..no {
                row[k * no + o] = T::one();
            }
            row
        })
        .collect()
}

/// Causal structure that generates the hidden-variable strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Common source only.
    Lhv,
    /// Alice's outcome feeds Bob's mechanism.
    OutcomeSignalling,
    /// Alice's input feeds Bob's mechanism.
    InputSignalling,
    /// Alice sends Bob one bit computed from her input, outcome and the source.
    MessageCommunication,
    /// The inputs share a common ancestor with the source.
    MeasurementDependence,
    /// Two independent sources, each shared by the middle party and one outer party.
    Bilocal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CausalModel {
    pub variant: Variant,
    pub scenario: ScenarioSpec,
}

impl CausalModel {
    pub fn new(variant: Variant, scenario: ScenarioSpec) -> Result<Self> {
        let n = scenario.parties();
        match variant {
            Variant::Bilocal => {
                if n != 3 {
                    return Err(Error::InvalidModel("the bilocal model needs three parties".into()));
                }
                if scenario.inputs[1] != 1 {
                    return Err(Error::InvalidModel("the middle bilocal party has a single input".into()));
                }
            }
            Variant::MeasurementDependence | Variant::Lhv => {}
            _ => {
                if n != 2 {
                    return Err(Error::InvalidModel(format!("{variant:?} needs two parties")));
                }
            }
        }
        Ok(CausalModel { variant, scenario })
    }

    /// Number of deterministic strategies, without enumerating them.
    pub fn strategy_count(&self) -> u128 {
        layout(self).iter().map(|c| c.radix as u128).product()
    }
}

/// One labelled coordinate of a deterministic strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub radix: usize,
}

fn layout(model: &CausalModel) -> Vec<Component> {
    let sc = &model.scenario;
    let comp = |name: String, radix: usize| Component { name, radix };
    let party_names = ["alpha", "beta", "gamma"];
    let input_names = ["mu_x", "mu_y", "mu_z"];
    let lhv = |out: &mut Vec<Component>| {
        for (k, name) in party_names.iter().enumerate().take(sc.parties()) {
            for i in 0..sc.inputs[k] {
                out.push(comp(format!("{name}[{i}]"), sc.outputs[k]));
            }
        }
    };
    let mut out = Vec::new();
    match model.variant {
        Variant::Lhv | Variant::Bilocal => lhv(&mut out),
        Variant::InputSignalling => {
            for x in 0..sc.inputs[0] {
                out.push(comp(format!("alpha[{x}]"), sc.outputs[0]));
            }
            for x in 0..sc.inputs[0] {
                for y in 0..sc.inputs[1] {
                    out.push(comp(format!("beta[{x},{y}]"), sc.outputs[1]));
                }
            }
        }
        Variant::OutcomeSignalling => {
            for x in 0..sc.inputs[0] {
                out.push(comp(format!("alpha[{x}]"), sc.outputs[0]));
            }
            for a in 0..sc.outputs[0] {
                for y in 0..sc.inputs[1] {
                    out.push(comp(format!("beta[{a},{y}]"), sc.outputs[1]));
                }
            }
        }
        Variant::MessageCommunication => {
            for x in 0..sc.inputs[0] {
                out.push(comp(format!("alpha[{x}]"), sc.outputs[0]));
            }
            for m in 0..2 {
                for y in 0..sc.inputs[1] {
                    out.push(comp(format!("beta[{m},{y}]"), sc.outputs[1]));
                }
            }
            for x in 0..sc.inputs[0] {
                for a in 0..sc.outputs[0] {
                    out.push(comp(format!("m[{x},{a}]"), 2));
                }
            }
        }
        Variant::MeasurementDependence => {
            for (k, name) in input_names.iter().enumerate().take(sc.parties()) {
                out.push(comp(name.to_string(), sc.inputs[k]));
            }
            lhv(&mut out);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicStrategy {
    pub labels: Vec<u16>,
}

/// Do-intervention on an observable variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Intervention {
    /// The first party's input, as seen by the second party's mechanism, is forced to the value.
    Input { value: usize },
    /// The first party's outcome is forced to the value; its mechanism is erased and the
    /// second party's mechanism receives the forced value.
    Outcome { value: usize },
}

#[derive(Clone, Debug)]
pub struct StrategySpace {
    pub model: CausalModel,
    pub components: Vec<Component>,
    pub strategies: Vec<DeterministicStrategy>,
}

pub fn enumerate_strategies(model: &CausalModel) -> Result<StrategySpace> {
    enumerate_strategies_capped(model, DEFAULT_STRATEGY_CAP)
}

pub fn enumerate_strategies_capped(model: &CausalModel, cap: u128) -> Result<StrategySpace> {
    let components = layout(model);
    let count = model.strategy_count();
    if count > cap {
        return Err(Error::Capacity(format!("{count} strategies exceed the cap of {cap}")));
    }
    let radices: Vec<usize> = components.iter().map(|c| c.radix).collect();
    let strategies = (0..count as usize)
        .map(|k| DeterministicStrategy {
            labels: mixed_radix_inverse(k, &radices).into_iter().map(|d| d as u16).collect(),
        })
        .collect();
    Ok(StrategySpace { model: model.clone(), components, strategies })
}

impl StrategySpace {
    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn scenario(&self) -> &ScenarioSpec {
        &self.model.scenario
    }

    fn position(&self, name: &str) -> usize {
        self.components.iter().position(|c| c.name == name).expect("component exists")
    }

    /// Label of the named component in strategy `s`.
    pub fn label(&self, s: usize, name: &str) -> usize {
        self.strategies[s].labels[self.position(name)] as usize
    }

    /// For measurement-dependent spaces: number of strategies per input tuple.
    pub fn hidden_block_size(&self) -> usize {
        match self.model.variant {
            Variant::MeasurementDependence => self.len() / self.scenario().num_input_tuples(),
            _ => self.len(),
        }
    }

    /// Input tuple a measurement-dependent strategy is bound to.
    pub fn bound_inputs(&self, s: usize) -> Option<Vec<usize>> {
        if self.model.variant != Variant::MeasurementDependence {
            return None;
        }
        let n = self.scenario().parties();
        Some(self.strategies[s].labels[..n].iter().map(|&d| d as usize).collect())
    }

    fn validate(&self, iv: Option<&Intervention>) -> Result<()> {
        let sc = self.scenario();
        match (iv, self.model.variant) {
            (None, _) => Ok(()),
            (Some(Intervention::Input { value }), Variant::InputSignalling) => {
                if *value < sc.inputs[0] {
                    Ok(())
                } else {
                    Err(Error::InvalidIntervention(format!("input value {value} out of range")))
                }
            }
            (Some(Intervention::Outcome { value }), Variant::OutcomeSignalling) => {
                if *value < sc.outputs[0] {
                    Ok(())
                } else {
                    Err(Error::InvalidIntervention(format!("outcome value {value} out of range")))
                }
            }
            (Some(iv), v) => Err(Error::InvalidIntervention(format!("{iv:?} is not exposed by {v:?}"))),
        }
    }

    /// Outcome tuple produced by strategy `s` on `inputs`.
    pub fn respond(&self, s: usize, inputs: &[usize], iv: Option<&Intervention>) -> Vec<usize> {
        let sc = self.scenario();
        let l = &self.strategies[s].labels;
        let lab = |i: usize| l[i] as usize;
        match self.model.variant {
            Variant::Lhv | Variant::Bilocal | Variant::MeasurementDependence => {
                let mut off = if self.model.variant == Variant::MeasurementDependence { sc.parties() } else { 0 };
                let mut out = Vec::with_capacity(sc.parties());
                for k in 0..sc.parties() {
                    out.push(lab(off + inputs[k]));
                    off += sc.inputs[k];
                }
                out
            }
            Variant::InputSignalling => {
                let a = lab(inputs[0]);
                let xb = match iv {
                    Some(Intervention::Input { value }) => *value,
                    _ => inputs[0],
                };
                let b = lab(sc.inputs[0] + xb * sc.inputs[1] + inputs[1]);
                vec![a, b]
            }
            Variant::OutcomeSignalling => {
                let a = match iv {
                    Some(Intervention::Outcome { value }) => *value,
                    _ => lab(inputs[0]),
                };
                let b = lab(sc.inputs[0] + a * sc.inputs[1] + inputs[1]);
                vec![a, b]
            }
            Variant::MessageCommunication => {
                let a = lab(inputs[0]);
                let m = lab(sc.inputs[0] + 2 * sc.inputs[1] + inputs[0] * sc.outputs[0] + a);
                let b = lab(sc.inputs[0] + m * sc.inputs[1] + inputs[1]);
                vec![a, b]
            }
        }
    }

    /// Binary message sent by a communication strategy, if any.
    pub fn message(&self, s: usize, inputs: &[usize]) -> Option<usize> {
        if self.model.variant != Variant::MessageCommunication {
            return None;
        }
        let sc = self.scenario();
        let a = self.respond(s, inputs, None)[0];
        Some(self.strategies[s].labels[sc.inputs[0] + 2 * sc.inputs[1] + inputs[0] * sc.outputs[0] + a] as usize)
    }
}

/// Response matrix `T` (or the intervened `T′`): column `λ` is the
/// deterministic distribution of strategy `λ`.
///
/// For measurement-dependent spaces rows are the joint events `(inputs,
/// outcomes)` before conditioning, so column `λ` is supported on the input
/// tuple the strategy is bound to and sums to one.
pub fn build_response_matrix<T: Scalar>(space: &StrategySpace, intervention: Option<&Intervention>) -> Result<Matrix<T>> {
    space.validate(intervention)?;
    let sc = space.scenario();
    let mut t = Matrix::zeros(sc.len(), space.len());
    for s in 0..space.len() {
        match space.bound_inputs(s) {
            Some(inp) => {
                let out = space.respond(s, &inp, intervention);
                t[(sc.index_unchecked(&out, &inp), s)] = T::one();
            }
            None => {
                for k in 0..sc.num_input_tuples() {
                    let inp = sc.input_tuple(k);
                    let out = space.respond(s, &inp, intervention);
                    t[(sc.index_unchecked(&out, &inp), s)] = T::one();
                }
            }
        }
    }
    Ok(t)
}

/// Deterministic distribution of one strategy of a model without measurement dependence.
pub fn deterministic_distribution<T: Scalar>(space: &StrategySpace, s: usize) -> Distribution<T> {
    let sc = space.scenario().clone();
    let mut e = vec![T::zero(); sc.len()];
    for k in 0..sc.num_input_tuples() {
        let inp = sc.input_tuple(k);
        let out = space.respond(s, &inp, None);
        e[sc.index_unchecked(&out, &inp)] = T::one();
    }
    Distribution { scenario: sc, entries: e }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(v: Variant, sc: ScenarioSpec) -> StrategySpace {
        enumerate_strategies(&CausalModel::new(v, sc).unwrap()).unwrap()
    }

    #[test]
    fn chsh_index_corners() {
        let sc = ScenarioSpec::chsh();
        assert_eq!(sc.index(&[0, 0], &[0, 0]).unwrap(), 0);
        assert_eq!(sc.index(&[1, 1], &[1, 1]).unwrap(), 15);
        assert_eq!(sc.index(&[1, 0], &[0, 1]).unwrap(), 6);
        assert!(sc.index(&[2, 0], &[0, 0]).is_err());
        for k in 0..sc.len() {
            let (o, i) = sc.split(k).unwrap();
            assert_eq!(sc.index(&o, &i).unwrap(), k);
        }
        assert!(sc.split(16).is_err());
    }

    #[test]
    fn strategy_counts_match_formulas() {
        let sc = ScenarioSpec::chsh();
        assert_eq!(space(Variant::Lhv, sc.clone()).len(), 16);
        assert_eq!(space(Variant::InputSignalling, sc.clone()).len(), 64);
        assert_eq!(space(Variant::OutcomeSignalling, sc.clone()).len(), 64);
        assert_eq!(space(Variant::MeasurementDependence, sc.clone()).len(), 64);
        assert_eq!(space(Variant::MessageCommunication, sc.clone()).len(), 4 * 16 * 16);
        assert_eq!(space(Variant::Bilocal, ScenarioSpec::bilocal(2, 2, 4)).len(), 64);
        let s3322 = ScenarioSpec::bipartite(3, 3, 2, 2);
        assert_eq!(CausalModel::new(Variant::InputSignalling, s3322).unwrap().strategy_count(), 8 * 512);
    }

    #[test]
    fn model_validation() {
        assert!(CausalModel::new(Variant::Bilocal, ScenarioSpec::chsh()).is_err());
        assert!(CausalModel::new(Variant::InputSignalling, ScenarioSpec::bilocal(2, 2, 4)).is_err());
        let ghz = ScenarioSpec::new(vec![2, 2, 2], vec![2, 2, 2]).unwrap();
        assert!(CausalModel::new(Variant::MeasurementDependence, ghz).is_ok());
        assert!(ScenarioSpec::new(vec![2, 0], vec![2, 2]).is_err());
        assert!(ScenarioSpec::new(vec![2], vec![2]).is_err());
    }

    #[test]
    fn capacity_error() {
        let model = CausalModel::new(Variant::InputSignalling, ScenarioSpec::bipartite(3, 3, 2, 2)).unwrap();
        assert!(matches!(enumerate_strategies_capped(&model, 1000), Err(Error::Capacity(_))));
    }

    #[test]
    fn constant_strategy_column() {
        let sp = space(Variant::Lhv, ScenarioSpec::chsh());
        let t: Matrix<Rational> = build_response_matrix(&sp, None).unwrap();
        let sc = ScenarioSpec::chsh();
        for j in 0..16 {
            let (o, _) = sc.split(j).unwrap();
            let expect = if o == vec![0, 0] { 1 } else { 0 };
            assert_eq!(t[(j, 0)], Rational::from_integer(expect));
        }
    }

    #[test]
    fn intervention_rules() {
        let sp = space(Variant::InputSignalling, ScenarioSpec::chsh());
        assert!(build_response_matrix::<f64>(&sp, Some(&Intervention::Outcome { value: 0 })).is_err());
        assert!(build_response_matrix::<f64>(&sp, Some(&Intervention::Input { value: 2 })).is_err());
        let t1 = build_response_matrix::<f64>(&sp, Some(&Intervention::Input { value: 1 })).unwrap();
        let sc = ScenarioSpec::chsh();
        for s in 0..sp.len() {
            for j in 0..16 {
                let (o, i) = sc.split(j).unwrap();
                let a = sp.label(s, &format!("alpha[{}]", i[0]));
                let b = sp.label(s, &format!("beta[1,{}]", i[1]));
                let expect = if o == vec![a, b] { 1.0 } else { 0.0 };
                assert_eq!(t1[(j, s)], expect);
            }
        }
        let lhv = space(Variant::Lhv, sc);
        assert!(build_response_matrix::<f64>(&lhv, Some(&Intervention::Input { value: 0 })).is_err());
    }

    #[test]
    fn measurement_dependent_columns_are_joint_events() {
        let sp = space(Variant::MeasurementDependence, ScenarioSpec::chsh());
        let t: Matrix<f64> = build_response_matrix(&sp, None).unwrap();
        let sc = ScenarioSpec::chsh();
        for s in [0usize, 17, 33, 50, 63] {
            let inp = sp.bound_inputs(s).unwrap();
            let col = t.column(s);
            assert_eq!(col.iter().sum::<f64>(), 1.0);
            let a = sp.label(s, &format!("alpha[{}]", inp[0]));
            let b = sp.label(s, &format!("beta[{}]", inp[1]));
            assert_eq!(col[sc.index(&[a, b], &inp).unwrap()], 1.0);
        }
    }

    #[test]
    fn marginals_and_signalling() {
        let sc = ScenarioSpec::chsh();
        let u: Distribution<Rational> = Distribution::uniform(sc.clone());
        assert!(u.is_nonsignalling(0.0));
        assert_eq!(u.marginal(&[0]), vec![Rational::new(1, 2); 4]);
        // Bob copies Alice's input: signalling.
        let mut e = vec![Rational::from_integer(0); 16];
        for x in 0..2 {
            for y in 0..2 {
                e[sc.index(&[0, x], &[x, y]).unwrap()] = Rational::from_integer(1);
            }
        }
        let d = Distribution::new(sc, e).unwrap();
        assert!(!d.is_nonsignalling(0.0));
        assert_eq!(d.signalling_violation(), 1.0);
    }

    #[test]
    fn rejects_bad_distributions() {
        let sc = ScenarioSpec::chsh();
        assert!(Distribution::new(sc.clone(), vec![0.25f64; 15]).is_err());
        let mut e = vec![0.25f64; 16];
        e[0] = -0.1;
        e[1] = 0.6;
        assert!(Distribution::new(sc.clone(), e).is_err());
        let mut e = vec![0.25f64; 16];
        e[0] = 0.3;
        assert!(Distribution::new(sc, e).is_err());
    }
}
