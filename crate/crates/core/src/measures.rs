//! Concrete relaxation measures: direct causal influence, binary-message
//! entropy, measurement dependence (with mutual-information bounds) and the
//! dual functionals behind their closed forms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::BellFunctional;
use crate::lp::simplex::{solve_general, GeneralLp, Outcome, RowSense};
use crate::lp::{minimize_linear, minimize_linf, minimize_max_l1, DualWitness, ProgramSolution, Status};
use crate::matrix::Matrix;
use crate::num::{binary_entropy, sum, Mode, Rational, Scalar};
use crate::polytope::{linf_dual_region, VertexSet};
use crate::scenario::{
    build_response_matrix, enumerate_strategies, nonsignalling_rows, normalization_rows, CausalModel, Distribution,
    Intervention, ScenarioSpec, StrategySpace, Variant,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureKind {
    #[serde(rename = "C_X->B")]
    CausalInfluenceXB,
    #[serde(rename = "C_A->B")]
    CausalInfluenceAB,
    #[serde(rename = "H(m)")]
    MessageEntropy,
    #[serde(rename = "M")]
    MeasurementDependence,
    #[serde(rename = "M_Hall")]
    MeasurementDependenceHall,
    #[serde(rename = "M_BL")]
    NonBilocality,
}

impl MeasureKind {
    pub fn label(&self) -> &'static str {
        match self {
            MeasureKind::CausalInfluenceXB => "C_X->B",
            MeasureKind::CausalInfluenceAB => "C_A->B",
            MeasureKind::MessageEntropy => "H(m)",
            MeasureKind::MeasurementDependence => "M",
            MeasureKind::MeasurementDependenceHall => "M_Hall",
            MeasureKind::NonBilocality => "M_BL",
        }
    }
}

/// Which edge into Bob's mechanism is relaxed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfluenceVariant {
    XToB,
    AToB,
}

impl InfluenceVariant {
    pub fn model_variant(self) -> Variant {
        match self {
            InfluenceVariant::XToB => Variant::InputSignalling,
            InfluenceVariant::AToB => Variant::OutcomeSignalling,
        }
    }

    pub fn measure(self) -> MeasureKind {
        match self {
            InfluenceVariant::XToB => MeasureKind::CausalInfluenceXB,
            InfluenceVariant::AToB => MeasureKind::CausalInfluenceAB,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RelaxationResult<T> {
    pub measure: MeasureKind,
    /// Optimal value of the underlying LP. For `H(m)` this is `min p(m=0)`.
    pub value: T,
    /// `h(value)` in bits, for the message entropy.
    pub entropy_bits: Option<f64>,
    /// Optimal distribution over deterministic strategies.
    pub q: Vec<T>,
    pub witness: Option<DualWitness<T>>,
    pub status: Status,
    pub mode: Mode,
    /// `⟨c, ξ⟩ - ⟨ζ, b⟩` of the solved standard form.
    pub gap: Option<T>,
    pub dual_feasible: bool,
    pub strategies: usize,
    pub diagnostics: Vec<String>,
}

impl<T: Scalar> RelaxationResult<T> {
    /// Value in the measure's own units.
    pub fn measure_value(&self) -> f64 {
        self.entropy_bits.unwrap_or_else(|| self.value.to_f64())
    }
}

fn package<T: Scalar>(measure: MeasureKind, sol: ProgramSolution<T>, strategies: usize) -> Result<RelaxationResult<T>> {
    match sol.status {
        Status::Optimal => {}
        Status::Infeasible => {
            return Err(Error::Infeasible(format!(
                "no hidden-variable model of the relaxed structure reproduces the data ({})",
                measure.label()
            )))
        }
        s => return Err(Error::Solver(format!("{} program ended with {s:?}", measure.label()))),
    }
    Ok(RelaxationResult {
        measure,
        value: sol.value.clone().expect("optimal"),
        entropy_bits: None,
        q: sol.q,
        witness: sol.witness,
        status: sol.status,
        mode: T::MODE,
        gap: sol.gap,
        dual_feasible: sol.dual_feasible,
        strategies,
        diagnostics: sol.lp.diagnostics,
    })
}

fn space_for(variant: Variant, sc: &ScenarioSpec) -> Result<StrategySpace> {
    enumerate_strategies(&CausalModel::new(variant, sc.clone())?)
}

/// Rows `(v < v', y, b)` of `|δ_{b,f_B(v,y,λ)} - δ_{b,f_B(v',y,λ)}|`, where
/// `v` ranges over the intervened variable (Alice's input for `X→B`, her
/// outcome for `A→B`). Bob's response under `do(v)` is read off the
/// intervened response matrix.
pub fn causal_influence_matrix<T: Scalar>(space: &StrategySpace, variant: InfluenceVariant) -> Result<Matrix<T>> {
    if space.model.variant != variant.model_variant() {
        return Err(Error::InvalidModel(format!(
            "{:?} influence needs the {:?} strategy space",
            variant,
            variant.model_variant()
        )));
    }
    let sc = space.scenario();
    let values = match variant {
        InfluenceVariant::XToB => sc.inputs[0],
        InfluenceVariant::AToB => sc.outputs[0],
    };
    let (my, ob, oa) = (sc.inputs[1], sc.outputs[1], sc.outputs[0]);
    let mut bob: Vec<Matrix<T>> = Vec::with_capacity(values);
    for v in 0..values {
        let iv = match variant {
            InfluenceVariant::XToB => Intervention::Input { value: v },
            InfluenceVariant::AToB => Intervention::Outcome { value: v },
        };
        let t = build_response_matrix::<T>(space, Some(&iv))?;
        let mut m = Matrix::zeros(my * ob, space.len());
        for y in 0..my {
            for b in 0..ob {
                for a in 0..oa {
                    let j = sc.index_unchecked(&[a, b], &[0, y]);
                    for s in 0..space.len() {
                        let e = t[(j, s)].clone();
                        m[(y * ob + b, s)] += e;
                    }
                }
            }
        }
        bob.push(m);
    }
    let mut rows = Vec::new();
    for v in 0..values {
        for w in v + 1..values {
            for r in 0..my * ob {
                rows.push((0..space.len()).map(|s| (bob[v][(r, s)].clone() - bob[w][(r, s)].clone()).abs_val()).collect());
            }
        }
    }
    Ok(Matrix::from_rows(rows, space.len()))
}

/// Minimal direct causal influence over all models of the relaxed
/// structure reproducing `p`.
pub fn min_causal_influence<T: Scalar>(p: &Distribution<T>, variant: InfluenceVariant) -> Result<RelaxationResult<T>> {
    let space = space_for(variant.model_variant(), p.scenario())?;
    let t = build_response_matrix::<T>(&space, None)?;
    let c = causal_influence_matrix::<T>(&space, variant)?;
    let sol = minimize_linf(&t, p.entries(), &c, None)?;
    package(variant.measure(), sol, space.len())
}

/// Rows `R T` and right-hand side for the constraints
/// `⟨V, p⟩ + offset = value`, optional nonsignalling and normalization on
/// the reproduced distribution `p = T q`.
fn value_constraints<T: Scalar>(
    f: &BellFunctional<T>,
    value: &T,
    nonsignalling: bool,
    t: &Matrix<T>,
) -> (Matrix<T>, Vec<T>) {
    let mut rows = vec![t.vec_mul(&f.coefficients)];
    let mut rhs = vec![value.clone() - f.offset.clone()];
    if nonsignalling {
        for r in nonsignalling_rows::<T>(&f.scenario) {
            rows.push(t.vec_mul(&r));
            rhs.push(T::zero());
        }
    }
    for r in normalization_rows::<T>(&f.scenario) {
        rows.push(t.vec_mul(&r));
        rhs.push(T::one());
    }
    (Matrix::from_rows(rows, t.cols()), rhs)
}

/// Minimal causal influence over every distribution with the prescribed
/// functional value (and optionally nonsignalling) and every model
/// reproducing it.
pub fn min_causal_influence_given_value<T: Scalar>(
    f: &BellFunctional<T>,
    value: &T,
    nonsignalling: bool,
    variant: InfluenceVariant,
) -> Result<RelaxationResult<T>> {
    let space = space_for(variant.model_variant(), &f.scenario)?;
    let t = build_response_matrix::<T>(&space, None)?;
    let c = causal_influence_matrix::<T>(&space, variant)?;
    let (a, rhs) = value_constraints(f, value, nonsignalling, &t);
    let sol = minimize_linf(&a, &rhs, &c, None)?;
    package(variant.measure(), sol, space.len())
}

/// `v_λ = (1/m_x) Σ_x [m(x, f_A(x,λ), λ) = 0]`, so `⟨v, q⟩ = p(m=0)` under
/// uniform inputs of the sender.
pub fn message_zero_weights<T: Scalar>(space: &StrategySpace) -> Result<Vec<T>> {
    if space.model.variant != Variant::MessageCommunication {
        return Err(Error::InvalidModel("message weights need the communication strategy space".into()));
    }
    let mx = space.scenario().inputs[0];
    Ok((0..space.len())
        .map(|s| {
            let zeros = (0..mx).filter(|&x| space.message(s, &[x, 0]) == Some(0)).count();
            T::from_frac(zeros as i64, mx as i64)
        })
        .collect())
}

/// Minimal entropy of a binary message. `value` carries `min p(m=0)`;
/// relabeling the message shows `min p(m=0) ≤ 1/2`, so `H = h(min p(m=0))`.
pub fn min_communication<T: Scalar>(p: &Distribution<T>) -> Result<RelaxationResult<T>> {
    let space = space_for(Variant::MessageCommunication, p.scenario())?;
    let t = build_response_matrix::<T>(&space, None)?;
    let v = message_zero_weights::<T>(&space)?;
    let sol = minimize_linear(&t, p.entries(), &v)?;
    let mut r = package(MeasureKind::MessageEntropy, sol, space.len())?;
    r.entropy_bits = Some(binary_entropy(r.value.to_f64()));
    Ok(r)
}

/// Data a measurement-dependence program is conditioned on.
#[derive(Clone, Debug)]
pub enum MdTarget<T> {
    Distribution(Distribution<T>),
    Value { functional: BellFunctional<T>, value: T, nonsignalling: bool },
}

impl<T: Scalar> MdTarget<T> {
    pub fn scenario(&self) -> &ScenarioSpec {
        match self {
            MdTarget::Distribution(p) => p.scenario(),
            MdTarget::Value { functional, .. } => &functional.scenario,
        }
    }
}

/// Measurement-dependence program over joint strategies `(inputs, λ)`:
/// `q` is the joint `p(x, y[, z], λ)` and the column of strategy `(k, λ)`
/// reproduces `p(outcomes | k)` scaled by `1/π_k`.
#[derive(Clone, Debug)]
pub struct MdProgram<T> {
    pub space: StrategySpace,
    pub prior: Vec<T>,
    pub a: Matrix<T>,
    pub p: Vec<T>,
    /// Rows `(k, λ)` of `q(k,λ) - π_k Σ_k' q(k',λ)`.
    pub m: Matrix<T>,
}

fn uniform_prior<T: Scalar>(k: usize) -> Vec<T> {
    vec![T::from_frac(1, k as i64); k]
}

impl<T: Scalar> MdProgram<T> {
    pub fn new(target: &MdTarget<T>, prior: Option<&[T]>) -> Result<Self> {
        let sc = target.scenario().clone();
        let space = space_for(Variant::MeasurementDependence, &sc)?;
        let k = sc.num_input_tuples();
        let prior = match prior {
            Some(pr) => pr.to_vec(),
            None => uniform_prior(k),
        };
        if prior.len() != k {
            return Err(Error::Dimension(format!("prior has {} entries, expected {k}", prior.len())));
        }
        if prior.iter().any(|v| v.sign_tol(0.0) <= 0) || !sum(&prior).approx_eq(&T::one(), 1e-9) {
            return Err(Error::InvalidDistribution("input prior must be positive and sum to one".into()));
        }
        let block = space.hidden_block_size();
        let mut t = build_response_matrix::<T>(&space, None)?;
        for j in 0..t.rows() {
            let kj = j / sc.num_output_tuples();
            let inv = T::one() / prior[kj].clone();
            for v in t.row_mut(j) {
                if !v.is_zero_val() {
                    *v = v.clone() * inv.clone();
                }
            }
        }
        let mut m = Matrix::zeros(k * block, space.len());
        for kk in 0..k {
            for lam in 0..block {
                for k2 in 0..k {
                    let col = k2 * block + lam;
                    let mut e = -prior[kk].clone();
                    if k2 == kk {
                        e += T::one();
                    }
                    m[(kk * block + lam, col)] = e;
                }
            }
        }
        let (a, p) = match target {
            MdTarget::Distribution(d) => {
                if d.scenario() != &sc {
                    return Err(Error::Dimension("target scenario mismatch".into()));
                }
                (t, d.entries().to_vec())
            }
            MdTarget::Value { functional, value, nonsignalling } => {
                value_constraints(functional, value, *nonsignalling, &t)
            }
        };
        Ok(MdProgram { space, prior, a, p, m })
    }

    pub fn solve(&self) -> Result<RelaxationResult<T>> {
        let sol = minimize_max_l1(&self.a, &self.p, std::slice::from_ref(&self.m))?;
        package(MeasureKind::MeasurementDependence, sol, self.space.len())
    }

    /// `L = K²` matrices with rows `q(k1,λ)/π_k1 - q(k2,λ)/π_k2`: the
    /// largest ℓ1 distance between hidden-variable distributions conditioned
    /// on two input tuples.
    pub fn hall_matrices(&self) -> Vec<Matrix<T>> {
        let k = self.prior.len();
        let block = self.space.hidden_block_size();
        let mut out = Vec::with_capacity(k * k);
        for k1 in 0..k {
            for k2 in 0..k {
                let mut m = Matrix::zeros(block, self.space.len());
                if k1 != k2 {
                    for lam in 0..block {
                        m[(lam, k1 * block + lam)] = T::one() / self.prior[k1].clone();
                        m[(lam, k2 * block + lam)] = -(T::one() / self.prior[k2].clone());
                    }
                }
                out.push(m);
            }
        }
        out
    }

    pub fn solve_hall(&self) -> Result<RelaxationResult<T>> {
        let sol = minimize_max_l1(&self.a, &self.p, &self.hall_matrices())?;
        package(MeasureKind::MeasurementDependenceHall, sol, self.space.len())
    }
}

/// Minimal measurement dependence `M` (uniform input prior by default).
pub fn min_measurement_dependence<T: Scalar>(target: &MdTarget<T>, prior: Option<&[T]>) -> Result<RelaxationResult<T>> {
    MdProgram::new(target, prior)?.solve()
}

/// Minimal Hall-type measurement dependence.
pub fn min_measurement_dependence_hall<T: Scalar>(
    target: &MdTarget<T>,
    prior: Option<&[T]>,
) -> Result<RelaxationResult<T>> {
    MdProgram::new(target, prior)?.solve_hall()
}

/// Constant of the Pinsker-type lower bound `I ≥ κ M² log₂ e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PinskerConvention {
    /// `κ = 1/2`, the usual relative-entropy form; it reproduces the
    /// `I_d ≈ 3.214` crossing of 0.0663 bits.
    Standard,
    /// `κ = 1`, as the bound is commonly quoted without the factor 1/2.
    Stated,
}

impl PinskerConvention {
    pub fn lower_bound(self, m: f64) -> f64 {
        let k = match self {
            PinskerConvention::Standard => 0.5,
            PinskerConvention::Stated => 1.0,
        };
        k * m * m * std::f64::consts::LOG2_E
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MIBound {
    /// Bits, by convention.
    pub lower: BTreeMap<String, f64>,
    /// Convention reported as `lower_default`.
    pub convention: PinskerConvention,
    pub lower_default: f64,
    /// `I(inputs : Λ)` of the LP optimizer, bits.
    pub upper_vertex: f64,
    /// Smallest `I` found over models attaining the minimal `M`, bits.
    pub upper: f64,
    /// Frank-Wolfe gap of the refinement, bits.
    pub refinement_gap: Option<f64>,
}

/// Mutual information `I(K : Λ)` in bits of a joint distribution laid out
/// as `q[k * block + λ]`.
pub fn mutual_information_bits(q: &[f64], prior: &[f64], block: usize) -> f64 {
    let k = prior.len();
    let mut r = vec![0.0; block];
    for kk in 0..k {
        for lam in 0..block {
            r[lam] += q[kk * block + lam].max(0.0);
        }
    }
    let mut total = 0.0;
    for kk in 0..k {
        for lam in 0..block {
            let v = q[kk * block + lam];
            if v > 0.0 && r[lam] > 0.0 {
                total += v * (v / (prior[kk] * r[lam])).log2();
            }
        }
    }
    total.max(0.0)
}

/// Bounds from the value and optimizer alone, with no refinement.
pub fn mi_bounds<T: Scalar>(result: &RelaxationResult<T>, prior: &[T], block: usize) -> Result<MIBound> {
    if result.measure != MeasureKind::MeasurementDependence {
        return Err(Error::InvalidModel("MI bounds need a measurement-dependence result".into()));
    }
    let m = result.value.to_f64();
    let pf: Vec<f64> = prior.iter().map(|v| v.to_f64()).collect();
    let qf: Vec<f64> = result.q.iter().map(|v| v.to_f64()).collect();
    let upper = mutual_information_bits(&qf, &pf, block);
    let mut lower = BTreeMap::new();
    for c in [PinskerConvention::Standard, PinskerConvention::Stated] {
        lower.insert(format!("{c:?}").to_lowercase(), c.lower_bound(m));
    }
    let convention = PinskerConvention::Standard;
    Ok(MIBound {
        lower_default: convention.lower_bound(m),
        lower,
        convention,
        upper_vertex: upper,
        upper,
        refinement_gap: None,
    })
}

/// Frank-Wolfe descent with away steps on `I(K : Λ)` over
/// `{q ≥ 0 : A q = p, ‖M q‖₁ ≤ cap}`, started from `q0`. Returns the final
/// point, its value in bits and the last duality gap.
pub fn minimize_mutual_information(
    a: &Matrix<f64>,
    p: &[f64],
    m: &Matrix<f64>,
    cap: f64,
    prior: &[f64],
    q0: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<(Vec<f64>, f64, f64)> {
    let n = a.cols();
    let l = m.rows();
    let block = n / prior.len();
    // Oracle LP over (q, t): A q = p, M q - t ≤ 0, -M q - t ≤ 0, Σ t ≤ cap.
    let mut rows = Vec::new();
    let mut sense = Vec::new();
    let mut rhs = Vec::new();
    for r in 0..a.rows() {
        let mut row = a.row(r).to_vec();
        row.resize(n + l, 0.0);
        rows.push(row);
        sense.push(RowSense::Eq);
        rhs.push(p[r]);
    }
    for r in 0..l {
        for sgn in [1.0, -1.0] {
            let mut row: Vec<f64> = m.row(r).iter().map(|v| sgn * v).collect();
            row.resize(n + l, 0.0);
            row[n + r] = -1.0;
            rows.push(row);
            sense.push(RowSense::Le);
            rhs.push(0.0);
        }
    }
    let mut row = vec![0.0; n + l];
    for v in row.iter_mut().skip(n) {
        *v = 1.0;
    }
    rows.push(row);
    sense.push(RowSense::Le);
    rhs.push(cap);
    let base = Matrix::from_rows(rows, n + l);
    let oracle = |g: &[f64]| -> Result<Vec<f64>> {
        let mut c = g.to_vec();
        c.resize(n + l, 0.0);
        let lp = GeneralLp { c, a: base.clone(), sense: sense.clone(), rhs: rhs.clone() };
        match solve_general(&lp) {
            Outcome::Optimal { x, .. } => Ok(x[..n].iter().map(|v| v.max(0.0)).collect()),
            _ => Err(Error::Solver("mutual-information oracle failed".into())),
        }
    };
    let grad = |q: &[f64]| -> Vec<f64> {
        let mut r = vec![0.0; block];
        for (i, v) in q.iter().enumerate() {
            r[i % block] += v;
        }
        q.iter()
            .enumerate()
            .map(|(i, &v)| {
                let (kk, lam) = (i / block, i % block);
                (v.max(1e-300) / (prior[kk] * r[lam].max(1e-300))).log2()
            })
            .collect()
    };
    let f = |q: &[f64]| mutual_information_bits(q, prior, block);
    let dotv = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut active: Vec<(Vec<f64>, f64)> = vec![(q0.to_vec(), 1.0)];
    let mut q = q0.to_vec();
    let mut gap = f64::INFINITY;
    for _ in 0..max_iter {
        let g = grad(&q);
        let s = oracle(&g)?;
        let gq = dotv(&g, &q);
        gap = gq - dotv(&g, &s);
        if gap <= tol {
            break;
        }
        let (ai, away_val) = active
            .iter()
            .enumerate()
            .map(|(i, (v, _))| (i, dotv(&g, v)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let use_fw = gap >= away_val - gq;
        let (d, gmax): (Vec<f64>, f64) = if use_fw {
            (s.iter().zip(&q).map(|(a, b)| a - b).collect(), 1.0)
        } else {
            let w = active[ai].1;
            (q.iter().zip(&active[ai].0).map(|(a, b)| a - b).collect(), w / (1.0 - w).max(1e-300))
        };
        // Golden-section line search on the convex restriction.
        let phi = |t: f64| -> f64 {
            let z: Vec<f64> = q.iter().zip(&d).map(|(a, b)| (a + t * b).max(0.0)).collect();
            f(&z)
        };
        let (mut lo, mut hi) = (0.0, gmax);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut c1 = hi - r * (hi - lo);
        let mut c2 = lo + r * (hi - lo);
        let (mut f1, mut f2) = (phi(c1), phi(c2));
        for _ in 0..60 {
            if f1 <= f2 {
                hi = c2;
                c2 = c1;
                f2 = f1;
                c1 = hi - r * (hi - lo);
                f1 = phi(c1);
            } else {
                lo = c1;
                c1 = c2;
                f1 = f2;
                c2 = lo + r * (hi - lo);
                f2 = phi(c2);
            }
        }
        let mut step = 0.5 * (lo + hi);
        if phi(gmax) <= phi(step) {
            step = gmax;
        }
        if step <= 0.0 {
            break;
        }
        for (qi, di) in q.iter_mut().zip(&d) {
            *qi = (*qi + step * di).max(0.0);
        }
        if use_fw {
            for (_, w) in active.iter_mut() {
                *w *= 1.0 - step;
            }
            match active.iter_mut().find(|(v, _)| v.iter().zip(&s).all(|(a, b)| (a - b).abs() < 1e-12)) {
                Some((_, w)) => *w += step,
                None => active.push((s, step)),
            }
        } else {
            for (_, w) in active.iter_mut() {
                *w *= 1.0 + step;
            }
            active[ai].1 -= step;
        }
        active.retain(|(_, w)| *w > 1e-14);
    }
    let val = f(&q);
    Ok((q, val, gap))
}

impl<T: Scalar> MdProgram<T> {
    /// [`mi_bounds`] plus a refined upper bound: the smallest mutual
    /// information found over models attaining the optimal `M`.
    pub fn mi_bounds_refined(&self, result: &RelaxationResult<T>, max_iter: usize) -> Result<MIBound> {
        let block = self.space.hidden_block_size();
        let mut b = mi_bounds(result, &self.prior, block)?;
        let af = self.a.map(|v| v.to_f64());
        let pf: Vec<f64> = self.p.iter().map(|v| v.to_f64()).collect();
        let mf = self.m.map(|v| v.to_f64());
        let prior: Vec<f64> = self.prior.iter().map(|v| v.to_f64()).collect();
        let q0: Vec<f64> = result.q.iter().map(|v| v.to_f64()).collect();
        let cap = result.value.to_f64() * (1.0 + 1e-9) + 1e-12;
        let (_, val, gap) = minimize_mutual_information(&af, &pf, &mf, cap, &prior, &q0, max_iter, 1e-9)?;
        b.upper = val.min(b.upper_vertex);
        b.refinement_gap = Some(gap);
        Ok(b)
    }
}

/// Exact vertex set of the dual region of `min ‖C q‖∞, T q = p` for the
/// given scenario: functionals on `p` (one coordinate per observable; a
/// trailing constant appears only when normalization is not implied).
pub fn causal_influence_functionals(sc: &ScenarioSpec, variant: InfluenceVariant) -> Result<VertexSet> {
    let space = space_for(variant.model_variant(), sc)?;
    let t = build_response_matrix::<Rational>(&space, None)?;
    let c = causal_influence_matrix::<Rational>(&space, variant)?;
    linf_dual_region(&t, &c)?.functionals()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{chsh, chsh_max, i3322};
    use crate::quantum::{chsh_distribution, i3322_mixture};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn pr_box() -> Distribution<Rational> {
        let sc = ScenarioSpec::chsh();
        let mut e = vec![q(0, 1); 16];
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    e[sc.index_unchecked(&[a, a ^ (x & y)], &[x, y])] = q(1, 2);
                }
            }
        }
        Distribution::new(sc, e).unwrap()
    }

    #[test]
    fn influence_matrix_shapes() {
        let sc = ScenarioSpec::chsh();
        let s = space_for(Variant::InputSignalling, &sc).unwrap();
        let c = causal_influence_matrix::<Rational>(&s, InfluenceVariant::XToB).unwrap();
        assert_eq!((c.rows(), c.cols()), (4, 64));
        assert!(causal_influence_matrix::<Rational>(&s, InfluenceVariant::AToB).is_err());
    }

    #[test]
    fn pr_box_influence_and_message() {
        let p = pr_box();
        // b = a at y = 0 forces full outcome influence.
        for (v, want) in [(InfluenceVariant::XToB, q(1, 2)), (InfluenceVariant::AToB, q(1, 1))] {
            let r = min_causal_influence(&p, v).unwrap();
            assert_eq!(r.value, want);
            assert_eq!(r.gap, Some(q(0, 1)));
            let w = r.witness.unwrap();
            assert_eq!(w.objective(p.entries(), None), want);
        }
        let r = min_communication(&p).unwrap();
        assert_eq!(r.value, q(1, 2));
        assert!((r.measure_value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_needs_nothing() {
        let u = Distribution::<Rational>::uniform(ScenarioSpec::chsh());
        assert_eq!(min_causal_influence(&u, InfluenceVariant::XToB).unwrap().value, q(0, 1));
        assert_eq!(min_communication(&u).unwrap().value, q(0, 1));
        let md = min_measurement_dependence(&MdTarget::Distribution(u.clone()), None).unwrap();
        assert_eq!(md.value, q(0, 1));
    }

    #[test]
    fn tsirelson_point() {
        let p = chsh_distribution(1.0).unwrap();
        let want = std::f64::consts::FRAC_1_SQRT_2 - 0.5;
        let r = min_causal_influence(&p, InfluenceVariant::XToB).unwrap();
        assert!((r.value - want).abs() < 1e-9);
        assert!((chsh_max(&p).unwrap() - want).abs() < 1e-12);
        let h = min_communication(&p).unwrap().measure_value();
        assert!((h - 0.736).abs() < 1e-3, "H = {h}");
    }

    #[test]
    fn i3322_full_distribution() {
        for (v, want) in [(q(1, 1), q(1, 2)), (q(3, 4), q(1, 4)), (q(1, 4), q(0, 1))] {
            let p = i3322_mixture(&v).unwrap();
            let r = min_causal_influence(&p, InfluenceVariant::XToB).unwrap();
            assert_eq!(r.value, want, "v = {v}");
        }
    }

    #[test]
    fn i3322_given_value() {
        let f = i3322();
        for (i, want) in [(q(1, 2), q(1, 5)), (q(1, 1), q(1, 2)), (q(-3, 10), q(0, 1))] {
            let r = min_causal_influence_given_value(&f, &i, true, InfluenceVariant::XToB).unwrap();
            assert_eq!(r.value, want, "I = {i}");
        }
    }

    #[test]
    fn md_chsh_value() {
        let f = chsh();
        for (val, want) in [(q(1, 4), q(1, 4)), (q(0, 1), q(0, 1))] {
            let t = MdTarget::Value { functional: f.clone(), value: val, nonsignalling: true };
            assert_eq!(min_measurement_dependence(&t, None).unwrap().value, want);
        }
    }

    #[test]
    fn hall_zero_on_local() {
        let u = Distribution::<Rational>::uniform(ScenarioSpec::chsh());
        let r = min_measurement_dependence_hall(&MdTarget::Distribution(u), None).unwrap();
        assert_eq!(r.value, q(0, 1));
        let r = min_measurement_dependence_hall(&MdTarget::Distribution(pr_box()), None).unwrap();
        assert!(r.value > q(0, 1));
    }

    #[test]
    fn pinsker_conventions() {
        let m = 0.3035;
        assert!(PinskerConvention::Standard.lower_bound(m) > 0.0663);
        assert!((PinskerConvention::Stated.lower_bound(m) - 2.0 * PinskerConvention::Standard.lower_bound(m)).abs() < 1e-15);
    }
    const CHSH_XB_VERTICES: [&str; 13] = [
        "0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0",
        "0 -1/2 0 1/2 0 -1/2 -1 -1/2 0 -1/2 0 1/2 0 1/2 0 -1/2",
        "0 -1/2 0 1/2 0 -1/2 -1 -1/2 0 1/2 0 -1/2 0 -1/2 0 1/2",
        "0 -1/2 0 1/2 0 1/2 0 -1/2 0 -1/2 0 1/2 0 -1/2 -1 -1/2",
        "0 -1/2 0 1/2 0 1/2 0 -1/2 0 1/2 0 -1/2 -1 -1/2 0 -1/2",
        "0 1/2 0 -1/2 0 -1/2 0 1/2 0 -1/2 0 1/2 0 -1/2 -1 -1/2",
        "0 1/2 0 -1/2 0 -1/2 0 1/2 0 1/2 0 -1/2 -1 -1/2 0 -1/2",
        "0 1/2 0 -1/2 0 1/2 1 1/2 0 -1/2 0 1/2 -1 -1/2 -1 -3/2",
        "0 1/2 0 -1/2 0 1/2 1 1/2 0 1/2 0 -1/2 -1 -3/2 -1 -1/2",
        "0 -1 0 -1 0 0 0 0 0 1 0 1 0 0 0 0",
        "0 0 0 0 0 -1 0 -1 0 0 0 0 0 1 0 1",
        "0 0 0 0 0 1 0 1 0 0 0 0 0 -1 0 -1",
        "0 1 0 1 0 0 0 0 0 -1 0 -1 0 0 0 0",
    ];

    #[test]
    fn chsh_input_influence_vertices() {
        let vs = causal_influence_functionals(&ScenarioSpec::chsh(), InfluenceVariant::XToB).unwrap();
        let mut want: Vec<Vec<Rational>> =
            CHSH_XB_VERTICES.iter().map(|r| r.split_whitespace().map(|t| t.parse().unwrap()).collect()).collect();
        want.sort();
        assert_eq!(vs.vertices, want);
    }
    #[test]
    fn cglmp2_mutual_information() {
        let p = crate::quantum::cglmp2_optimal().unwrap();
        let prog = MdProgram::new(&MdTarget::Distribution(p), None).unwrap();
        let r = prog.solve().unwrap();
        assert!((r.value - (std::f64::consts::FRAC_1_SQRT_2 - 0.5)).abs() < 1e-9);
        let b = prog.mi_bounds_refined(&r, 3000).unwrap();
        assert!((b.upper - 0.0463).abs() < 5e-4, "{b:?}");
        assert!(b.upper <= b.upper_vertex && b.lower["standard"] <= b.upper);
        // The factor-one form exceeds an attained value here.
        assert!(b.lower["stated"] > b.upper);
    }

    #[test]
    fn outcome_influence_doubles_chsh() {
        let p = chsh_distribution(0.9).unwrap();
        let a = min_causal_influence(&p, InfluenceVariant::AToB).unwrap().value;
        assert!((a - 2.0 * chsh_max(&p).unwrap()).abs() < 1e-9);
    }
}
