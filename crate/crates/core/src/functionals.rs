//! Linear Bell functionals `⟨V, p⟩ + offset` and the named instances used
//! by the measures: CHSH and its relabelings, `I_{A→B}`, `I_3322`, CGLMP,
//! Mermin and the bilocal `I`, `J`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::EntryIndex;
use crate::lp::{solve, StandardLP, Status};
use crate::matrix::Matrix;
use crate::num::{dot, Rational, Scalar};
use crate::scenario::{
    deterministic_distribution, enumerate_strategies, nonsignalling_rows, normalization_rows, CausalModel,
    Distribution, ScenarioSpec, Variant,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellFunctional<T> {
    pub name: String,
    pub scenario: ScenarioSpec,
    pub coefficients: Vec<T>,
    pub offset: T,
    /// Maximum over the model the functional was derived for (LHV unless
    /// the name says otherwise).
    pub classical_bound: T,
}

impl<T: Scalar> BellFunctional<T> {
    pub fn new(name: &str, scenario: ScenarioSpec, coefficients: Vec<T>, offset: T, classical_bound: T) -> Result<Self> {
        if coefficients.len() != scenario.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for a scenario of size {}",
                coefficients.len(),
                scenario.len()
            )));
        }
        Ok(BellFunctional { name: name.to_string(), scenario, coefficients, offset, classical_bound })
    }

    pub fn evaluate(&self, p: &Distribution<T>) -> Result<T> {
        if p.scenario() != &self.scenario {
            return Err(Error::Dimension(format!("{} is defined on a different scenario", self.name)));
        }
        Ok(self.evaluate_slice(p.entries()))
    }

    /// `⟨V, p⟩ + offset` on a raw vector of the right length.
    pub fn evaluate_slice(&self, p: &[T]) -> T {
        dot(&self.coefficients, p) + self.offset.clone()
    }

    pub fn convert<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BellFunctional<U> {
        BellFunctional {
            name: self.name.clone(),
            scenario: self.scenario.clone(),
            coefficients: self.coefficients.iter().map(&f).collect(),
            offset: f(&self.offset),
            classical_bound: f(&self.classical_bound),
        }
    }

    /// Same functional with `V ↦ sV` and offset scaled alike.
    pub fn scaled(&self, s: &T, name: &str) -> Self {
        BellFunctional {
            name: name.to_string(),
            scenario: self.scenario.clone(),
            coefficients: self.coefficients.iter().map(|c| c.clone() * s.clone()).collect(),
            offset: self.offset.clone() * s.clone(),
            classical_bound: self.classical_bound.clone() * s.clone(),
        }
    }

    /// Image under a relabeling: the relabeled functional takes the same
    /// value on the relabeled distribution.
    pub fn relabel(&self, r: &Relabeling) -> Result<Self> {
        Ok(BellFunctional {
            name: self.name.clone(),
            scenario: self.scenario.clone(),
            coefficients: r.apply(&self.scenario, &self.coefficients)?,
            offset: self.offset.clone(),
            classical_bound: self.classical_bound.clone(),
        })
    }

    /// Coordinates on the nonsignalling subspace: marginals `p_A(a|x)` and
    /// `p_B(b|y)` for all but the last outcome, then joint `p(ab|xy)` for all
    /// but the last outcomes, followed by the constant term. Two
    /// functionals agree on every nonsignalling distribution iff these
    /// coordinates agree.
    pub fn collins_gisin(&self) -> Result<(Vec<T>, T)> {
        let sc = &self.scenario;
        if sc.parties() != 2 {
            return Err(Error::Unsupported("Collins-Gisin form is implemented for two parties".into()));
        }
        let (mx, my, oa, ob) = (sc.inputs[0], sc.inputs[1], sc.outputs[0], sc.outputs[1]);
        let na = mx * (oa - 1);
        let nb = my * (ob - 1);
        let pa = |a: usize, x: usize| x * (oa - 1) + a;
        let pb = |b: usize, y: usize| na + y * (ob - 1) + b;
        let pj = |a: usize, b: usize, x: usize, y: usize| na + nb + ((x * my + y) * (oa - 1) + a) * (ob - 1) + b;
        let mut cg = vec![T::zero(); na + nb + mx * my * (oa - 1) * (ob - 1)];
        let mut constant = self.offset.clone();
        for x in 0..mx {
            for y in 0..my {
                for a in 0..oa {
                    for b in 0..ob {
                        let v = self.coefficients[sc.index_unchecked(&[a, b], &[x, y])].clone();
                        if v.is_zero_val() {
                            continue;
                        }
                        let (la, lb) = (a == oa - 1, b == ob - 1);
                        match (la, lb) {
                            (false, false) => cg[pj(a, b, x, y)] += v,
                            (false, true) => {
                                cg[pa(a, x)] += v.clone();
                                for b2 in 0..ob - 1 {
                                    cg[pj(a, b2, x, y)] -= v.clone();
                                }
                            }
                            (true, false) => {
                                cg[pb(b, y)] += v.clone();
                                for a2 in 0..oa - 1 {
                                    cg[pj(a2, b, x, y)] -= v.clone();
                                }
                            }
                            (true, true) => {
                                constant += v.clone();
                                for a2 in 0..oa - 1 {
                                    cg[pa(a2, x)] -= v.clone();
                                }
                                for b2 in 0..ob - 1 {
                                    cg[pb(b2, y)] -= v.clone();
                                }
                                for a2 in 0..oa - 1 {
                                    for b2 in 0..ob - 1 {
                                        cg[pj(a2, b2, x, y)] += v.clone();
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok((cg, constant))
    }
}

impl BellFunctional<Rational> {
    /// Maximum over deterministic local strategies.
    pub fn local_max(&self) -> Result<Rational> {
        let space = enumerate_strategies(&CausalModel::new(Variant::Lhv, self.scenario.clone())?)?;
        (0..space.len())
            .map(|s| self.evaluate_slice(deterministic_distribution::<Rational>(&space, s).entries()))
            .max()
            .ok_or_else(|| Error::InvalidModel("empty strategy space".into()))
    }

    /// Maximum over the nonsignalling polytope, by exact LP.
    pub fn nonsignalling_max(&self) -> Result<Rational> {
        let sc = &self.scenario;
        let n = sc.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for r in normalization_rows::<Rational>(sc) {
            rows.push(r.iter().map(|v| -v.clone()).collect());
            rhs.push(Rational::from_integer(-1));
            rows.push(r);
            rhs.push(Rational::from_integer(1));
        }
        for r in nonsignalling_rows::<Rational>(sc) {
            rows.push(r.iter().map(|v| -v.clone()).collect());
            rhs.push(Rational::from_integer(0));
            rows.push(r);
            rhs.push(Rational::from_integer(0));
        }
        let c: Vec<Rational> = self.coefficients.iter().map(|v| -v.clone()).collect();
        let lp = StandardLP::new(c, rhs, Matrix::from_rows(rows, n))?;
        let sol = solve(&lp);
        match (sol.status, sol.value) {
            (Status::Optimal, Some(v)) => Ok(-v + self.offset.clone()),
            (s, _) => Err(Error::Solver(format!("nonsignalling maximum: {s:?}"))),
        }
    }
}

/// Relabeling of inputs, outputs (per input) and parties of a bipartite
/// scenario with equal party shapes when parties are swapped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeling {
    /// `input_perm[k][x]` is the new input of party `k` for old input `x`.
    pub input_perm: Vec<Vec<usize>>,
    /// `output_perm[k][x][a]` is the new outcome of party `k` for old
    /// outcome `a` at old input `x`.
    pub output_perm: Vec<Vec<Vec<usize>>>,
    pub swap_parties: bool,
}

impl Relabeling {
    pub fn identity(sc: &ScenarioSpec) -> Self {
        let n = sc.parties();
        Relabeling {
            input_perm: (0..n).map(|k| (0..sc.inputs[k]).collect()).collect(),
            output_perm: (0..n).map(|k| (0..sc.inputs[k]).map(|_| (0..sc.outputs[k]).collect()).collect()).collect(),
            swap_parties: false,
        }
    }

    /// Image index of observable `j`.
    pub fn map_index(&self, sc: &ScenarioSpec, j: usize) -> Result<usize> {
        let (o, i) = sc.split(j)?;
        let mut no: Vec<usize> = (0..o.len()).map(|k| self.output_perm[k][i[k]][o[k]]).collect();
        let mut ni: Vec<usize> = (0..i.len()).map(|k| self.input_perm[k][i[k]]).collect();
        if self.swap_parties {
            no.reverse();
            ni.reverse();
        }
        sc.index(&no, &ni)
    }

    /// `v'[σ(j)] = v[j]`.
    pub fn apply<T: Scalar>(&self, sc: &ScenarioSpec, v: &[T]) -> Result<Vec<T>> {
        if self.swap_parties && (sc.parties() != 2 || sc.inputs[0] != sc.inputs[1] || sc.outputs[0] != sc.outputs[1]) {
            return Err(Error::InvalidScenario("party swap needs two parties of equal shape".into()));
        }
        let mut out = vec![T::zero(); v.len()];
        for (j, x) in v.iter().enumerate() {
            out[self.map_index(sc, j)?] = x.clone();
        }
        Ok(out)
    }

    pub fn apply_distribution<T: Scalar>(&self, p: &Distribution<T>) -> Result<Distribution<T>> {
        Distribution::new(p.scenario().clone(), self.apply(p.scenario(), p.entries())?)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in (0..n).rev() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every relabeling of a two-party scenario: input permutations, output
/// permutations per input, and party swap when shapes agree. For the CHSH
/// scenario this is the 128-element group.
pub fn relabeling_group(sc: &ScenarioSpec) -> Vec<Relabeling> {
    let n = sc.parties();
    let mut partial: Vec<(Vec<Vec<usize>>, Vec<Vec<Vec<usize>>>)> = vec![(Vec::new(), Vec::new())];
    for k in 0..n {
        let mut next = Vec::new();
        let ins = permutations(sc.inputs[k]);
        let outs = permutations(sc.outputs[k]);
        let mut per_input: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        for _ in 0..sc.inputs[k] {
            per_input = per_input
                .into_iter()
                .flat_map(|acc| {
                    outs.iter().map(move |o| {
                        let mut a = acc.clone();
                        a.push(o.clone());
                        a
                    })
                })
                .collect();
        }
        for (ip, op) in &partial {
            for i in &ins {
                for o in &per_input {
                    let mut ip2 = ip.clone();
                    ip2.push(i.clone());
                    let mut op2 = op.clone();
                    op2.push(o.clone());
                    next.push((ip2, op2));
                }
            }
        }
        partial = next;
    }
    let swaps: &[bool] =
        if n == 2 && sc.inputs[0] == sc.inputs[1] && sc.outputs[0] == sc.outputs[1] { &[false, true] } else { &[false] };
    let mut out = Vec::new();
    for &s in swaps {
        for (ip, op) in &partial {
            out.push(Relabeling { input_perm: ip.clone(), output_perm: op.clone(), swap_parties: s });
        }
    }
    out
}

fn fr(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// `p(00|00) + p(00|01) + p(00|10) - p(00|11) - p_A(0|0) - p_B(0|0)`, local
/// bound 0. The marginals are read at the other party's input 0.
pub fn chsh() -> BellFunctional<Rational> {
    let sc = ScenarioSpec::chsh();
    let mut v = vec![int(0); sc.len()];
    let idx = |a, b, x, y| sc.index_unchecked(&[a, b], &[x, y]);
    for (x, y, s) in [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, -1)] {
        v[idx(0, 0, x, y)] += int(s);
    }
    for b in 0..2 {
        v[idx(0, b, 0, 0)] -= int(1);
    }
    for a in 0..2 {
        v[idx(a, 0, 0, 0)] -= int(1);
    }
    BellFunctional::new("CHSH", sc, v, int(0), int(0)).expect("sized")
}

/// The distinct images of [`chsh`] under [`relabeling_group`], compared on
/// the nonsignalling subspace. The unrelabeled form comes first.
pub fn chsh_symmetries() -> Vec<BellFunctional<Rational>> {
    let base = chsh();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in relabeling_group(&base.scenario) {
        let f = base.relabel(&r).expect("CHSH scenario is symmetric");
        let (cg, c) = f.collins_gisin().expect("bipartite");
        let mut key = cg;
        key.push(c);
        if seen.insert(key) {
            out.push(f);
        }
    }
    for (k, f) in out.iter_mut().enumerate() {
        f.name = format!("CHSH#{k}");
    }
    out
}

/// Largest value of any CHSH symmetry on `p`.
pub fn chsh_max<T: Scalar>(p: &Distribution<T>) -> Result<T> {
    let mut best: Option<T> = None;
    for f in chsh_symmetries() {
        let v = f.convert(T::from_rational).evaluate(p)?;
        if best.as_ref().map_or(true, |b| v > *b) {
            best = Some(v);
        }
    }
    Ok(best.expect("eight symmetries"))
}

/// Correlator `E_{xy} = Σ (-1)^{a+b} p(ab|xy)` as coefficient vector in a
/// bipartite binary-outcome scenario.
pub fn correlator_coefficients(sc: &ScenarioSpec, x: usize, y: usize) -> Vec<Rational> {
    let mut v = vec![int(0); sc.len()];
    for a in 0..2 {
        for b in 0..2 {
            v[sc.index_unchecked(&[a, b], &[x, y])] = int(if (a + b) % 2 == 0 { 1 } else { -1 });
        }
    }
    v
}

fn correlator_functional(
    name: &str,
    sc: ScenarioSpec,
    terms: &[(usize, usize, i64)],
    bound: Rational,
) -> BellFunctional<Rational> {
    let mut v = vec![int(0); sc.len()];
    for &(x, y, s) in terms {
        for (acc, c) in v.iter_mut().zip(correlator_coefficients(&sc, x, y)) {
            *acc += c * int(s);
        }
    }
    BellFunctional::new(name, sc, v, int(0), bound).expect("sized")
}

/// `E00 - E02 - E11 + E12 - E20 + E21`, bounded by 4 for the model where
/// Alice's outcome feeds Bob's mechanism.
pub fn i_a_to_b() -> BellFunctional<Rational> {
    correlator_functional(
        "I_A->B",
        ScenarioSpec::bipartite(3, 3, 2, 2),
        &[(0, 0, 1), (0, 2, -1), (1, 1, -1), (1, 2, 1), (2, 0, -1), (2, 1, 1)],
        int(4),
    )
}

/// `I_3322` with local bound 0, normalized so that the uniform distribution
/// gives -1 and [`crate::quantum::i3322_mixture`] at full weight gives 1:
///
/// `Σ_{x+y≤2} s_xy p(00|xy) - p_A(0|0) - 2 p_B(0|0) - p_B(0|1)` with
/// `s_12 = s_21 = -1` and all other signs `+1`; marginals read at the
/// other party's input 0.
pub fn i3322() -> BellFunctional<Rational> {
    let sc = ScenarioSpec::bipartite(3, 3, 2, 2);
    let mut v = vec![int(0); sc.len()];
    let idx = |a, b, x, y| sc.index_unchecked(&[a, b], &[x, y]);
    for (x, y, s) in [(0, 0, 1), (0, 1, 1), (0, 2, 1), (1, 0, 1), (1, 1, 1), (1, 2, -1), (2, 0, 1), (2, 1, -1)] {
        v[idx(0, 0, x, y)] += int(s);
    }
    for b in 0..2 {
        v[idx(0, b, 0, 0)] -= int(1);
    }
    for (y, w) in [(0, 2), (1, 1)] {
        for a in 0..2 {
            v[idx(a, 0, 0, y)] -= int(w);
        }
    }
    BellFunctional::new("I3322", sc, v, int(0), int(0)).expect("sized")
}

/// Mermin functional `E000 - E011 - E101 - E110`, local bound 2.
pub fn mermin() -> BellFunctional<Rational> {
    let sc = ScenarioSpec::new(vec![2, 2, 2], vec![2, 2, 2]).expect("valid");
    let mut v = vec![int(0); sc.len()];
    for (inp, s) in [([0, 0, 0], 1), ([0, 1, 1], -1), ([1, 0, 1], -1), ([1, 1, 0], -1)] {
        for k in 0..8usize {
            let out = [k >> 2, (k >> 1) & 1, k & 1];
            let parity = out.iter().sum::<usize>() % 2;
            v[sc.index_unchecked(&out, &inp)] += int(if parity == 0 { s } else { -s });
        }
    }
    BellFunctional::new("Mermin", sc, v, int(0), int(2)).expect("sized")
}

/// Bilocal correlators over the binary-input scenario with a four-outcome
/// middle party, `b = 2 b0 + b1`:
/// `I = 1/4 Σ_{x,z} ⟨A_x B^0 C_z⟩` and `J = 1/4 Σ_{x,z} (-1)^{x+z} ⟨A_x B^1 C_z⟩`.
pub fn bilocal_ij() -> (BellFunctional<Rational>, BellFunctional<Rational>) {
    let sc = ScenarioSpec::bilocal(2, 2, 4);
    let mut vi = vec![int(0); sc.len()];
    let mut vj = vec![int(0); sc.len()];
    for j in 0..sc.len() {
        let (o, i) = sc.split(j).expect("in range");
        let (a, b, c, x, z) = (o[0], o[1], o[2], i[0], i[2]);
        let (b0, b1) = (b >> 1, b & 1);
        let sgn = |e: usize| if e % 2 == 0 { 1 } else { -1 };
        vi[j] = fr(sgn(a + b0 + c), 4);
        vj[j] = fr(sgn(x + z) * sgn(a + b1 + c), 4);
    }
    (
        BellFunctional::new("bilocal-I", sc.clone(), vi, int(0), int(1)).expect("sized"),
        BellFunctional::new("bilocal-J", sc, vj, int(0), int(1)).expect("sized"),
    )
}

/// `B = √|I| + √|J|`; bilocal models satisfy `B ≤ 1`.
pub fn bilocal_b<T: Scalar>(p: &Distribution<T>) -> Result<f64> {
    let (i, j) = bilocal_ij();
    let pf = p.to_f64();
    let vi = i.convert(|r| r.to_f64()).evaluate(&pf)?;
    let vj = j.convert(|r| r.to_f64()).evaluate(&pf)?;
    Ok(vi.abs().sqrt() + vj.abs().sqrt())
}

/// Versioned functional file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionalFile {
    pub version: u32,
    pub name: String,
    pub scenario: ScenarioSpec,
    #[serde(default = "zero_text")]
    pub offset: String,
    pub classical_bound: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonsignalling_max: Option<String>,
    pub terms: Vec<FunctionalTerm>,
}

fn zero_text() -> String {
    "0".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionalTerm {
    #[serde(flatten)]
    pub index: EntryIndex,
    pub coefficient: String,
}

pub const FUNCTIONAL_FILE_VERSION: u32 = 1;

fn parse_rational(s: &str, what: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|e| Error::Parse(format!("{what}: {e}")))
}

impl FunctionalFile {
    pub fn to_functional(&self) -> Result<BellFunctional<Rational>> {
        if self.version != FUNCTIONAL_FILE_VERSION {
            return Err(Error::Parse(format!("unsupported functional file version {}", self.version)));
        }
        let sc = ScenarioSpec::new(self.scenario.inputs.clone(), self.scenario.outputs.clone())?;
        let mut v = vec![int(0); sc.len()];
        for (k, t) in self.terms.iter().enumerate() {
            let j = t.index.resolve(&sc).map_err(|e| Error::Parse(format!("/terms/{k}: {e}")))?;
            v[j] += parse_rational(&t.coefficient, &format!("/terms/{k}/coefficient"))?;
        }
        BellFunctional::new(
            &self.name,
            sc,
            v,
            parse_rational(&self.offset, "/offset")?,
            parse_rational(&self.classical_bound, "/classical_bound")?,
        )
    }

    pub fn from_functional(f: &BellFunctional<Rational>) -> Result<Self> {
        let mut terms = Vec::new();
        for (j, c) in f.coefficients.iter().enumerate() {
            if !c.is_zero_val() {
                terms.push(FunctionalTerm { index: EntryIndex::from_index(&f.scenario, j)?, coefficient: c.to_string() });
            }
        }
        Ok(FunctionalFile {
            version: FUNCTIONAL_FILE_VERSION,
            name: f.name.clone(),
            scenario: f.scenario.clone(),
            offset: f.offset.to_string(),
            classical_bound: f.classical_bound.to_string(),
            nonsignalling_max: None,
            terms,
        })
    }
}

pub fn load_functional_str(json: &str) -> Result<BellFunctional<Rational>> {
    let file: FunctionalFile = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_functional()
}

const CGLMP_FILES: [&str; 7] = [
    include_str!("../data/cglmp_d2.json"),
    include_str!("../data/cglmp_d3.json"),
    include_str!("../data/cglmp_d4.json"),
    include_str!("../data/cglmp_d5.json"),
    include_str!("../data/cglmp_d6.json"),
    include_str!("../data/cglmp_d7.json"),
    include_str!("../data/cglmp_d8.json"),
];

/// CGLMP `I_d` as shipped in the data files, `2 ≤ d ≤ 8`. Local bound 2,
/// nonsignalling maximum 4.
pub fn cglmp(d: usize) -> Result<BellFunctional<Rational>> {
    if !(2..=8).contains(&d) {
        return Err(Error::OutOfRange(format!("CGLMP data ships for 2 <= d <= 8, got {d}")));
    }
    load_functional_str(CGLMP_FILES[d - 2])
}

/// CGLMP `I_d` from the closed formula with inputs `A1, A2, B1, B2 ↦ x=0, x=1, y=0, y=1`:
/// `Σ_k (1 - 2k/(d-1)) [P(A1=B1+k) + P(B1=A2+k+1) + P(A2=B2+k) + P(B2=A1+k)
///  - P(A1=B1-k-1) - P(B1=A2-k) - P(A2=B2-k-1) - P(B2=A1-k-1)]`.
pub fn cglmp_formula(d: usize) -> BellFunctional<Rational> {
    let sc = ScenarioSpec::bipartite(2, 2, d, d);
    let mut v = vec![int(0); sc.len()];
    let m = |n: i64| n.rem_euclid(d as i64);
    for k in 0..(d / 2) as i64 {
        let w = int(1) - fr(2 * k, d as i64 - 1);
        for a in 0..d as i64 {
            for b in 0..d as i64 {
                let conds = [
                    (0, 0, m(a) == m(b + k), 1),
                    (1, 0, m(b) == m(a + k + 1), 1),
                    (1, 1, m(a) == m(b + k), 1),
                    (0, 1, m(b) == m(a + k), 1),
                    (0, 0, m(a) == m(b - k - 1), -1),
                    (1, 0, m(b) == m(a - k), -1),
                    (1, 1, m(a) == m(b - k - 1), -1),
                    (0, 1, m(b) == m(a - k - 1), -1),
                ];
                for (x, y, hit, s) in conds {
                    if hit {
                        v[sc.index_unchecked(&[a as usize, b as usize], &[x, y])] += w.clone() * int(s);
                    }
                }
            }
        }
    }
    BellFunctional::new(&format!("CGLMP d={d}"), sc, v, int(0), int(2)).expect("sized")
}

/// Single-row constraint `(V, value - offset)` imposing `⟨V, p⟩ + offset = value`.
pub fn value_constraint<T: Scalar>(f: &BellFunctional<T>, value: &T) -> (Vec<T>, T) {
    (f.coefficients.clone(), value.clone() - f.offset.clone())
}
