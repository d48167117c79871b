//! Reference quantum distributions from the Born rule on small qubit
//! systems, plus closed forms that are exactly rational.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Rational;
use crate::scenario::{Distribution, ScenarioSpec};

/// Qubit source shared by the parties.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum StateSpec {
    /// `v |Ψ⁻⟩⟨Ψ⁻| + (1 - v) I/4`
    WernerSinglet { v: f64 },
    /// `√ε |00⟩ + √(1-ε) |11⟩`
    NonMaxEntangled { eps: f64 },
    /// Two independent Werner singlets; the middle party holds one qubit of each.
    DoubleWerner { v: f64 },
    /// `(|000⟩ + |111⟩)/√2`
    Ghz,
}

/// Dichotomic qubit observable `n·σ` with unit Bloch vector `n`; outcome
/// `a` projects onto eigenvalue `(-1)^a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub bloch: [f64; 3],
}

impl Observable {
    /// `cos θ Z + sin θ X`
    pub fn planar(theta: f64) -> Self {
        Observable { bloch: [theta.sin(), 0.0, theta.cos()] }
    }

    /// `cos φ X + sin φ Y`
    pub fn equatorial(phi: f64) -> Self {
        Observable { bloch: [phi.cos(), phi.sin(), 0.0] }
    }

    pub fn x() -> Self {
        Observable { bloch: [1.0, 0.0, 0.0] }
    }

    pub fn y() -> Self {
        Observable { bloch: [0.0, 1.0, 0.0] }
    }

    pub fn z() -> Self {
        Observable { bloch: [0.0, 0.0, 1.0] }
    }

    fn projector(&self, outcome: usize) -> CMat {
        let s = if outcome == 0 { 0.5 } else { -0.5 };
        let [nx, ny, nz] = self.bloch;
        CMat {
            n: 2,
            data: vec![
                Complex64::new(0.5 + s * nz, 0.0),
                Complex64::new(s * nx, -s * ny),
                Complex64::new(s * nx, s * ny),
                Complex64::new(0.5 - s * nz, 0.0),
            ],
        }
    }
}

/// Per-party observables indexed by input. For [`StateSpec::DoubleWerner`]
/// the middle party measures in the Bell basis and its entry is ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSpec {
    pub parties: Vec<Vec<Observable>>,
}

impl MeasurementSpec {
    /// Alice `(Z, X)`, Bob `(-3π/4, 3π/4)` in the XZ plane: the Tsirelson point on the singlet.
    pub fn chsh_optimal() -> Self {
        let pi = std::f64::consts::PI;
        MeasurementSpec {
            parties: vec![
                vec![Observable::planar(0.0), Observable::planar(pi / 2.0)],
                vec![Observable::planar(-3.0 * pi / 4.0), Observable::planar(3.0 * pi / 4.0)],
            ],
        }
    }

    /// `X` for input 0 and `Y` for input 1 at every party.
    pub fn mermin() -> Self {
        MeasurementSpec { parties: vec![vec![Observable::x(), Observable::y()]; 3] }
    }

    /// Outer parties measure `(Z+X)/√2` and `(Z-X)/√2`.
    pub fn bilocal_binary() -> Self {
        let pi = std::f64::consts::PI;
        let outer = vec![Observable::planar(pi / 4.0), Observable::planar(-pi / 4.0)];
        MeasurementSpec { parties: vec![outer.clone(), Vec::new(), outer] }
    }

    /// Outer parties measure `X`, `Y`, `Z`.
    pub fn bilocal_xyz() -> Self {
        let outer = vec![Observable::x(), Observable::y(), Observable::z()];
        MeasurementSpec { parties: vec![outer.clone(), Vec::new(), outer] }
    }
}

#[derive(Clone, Debug)]
struct CMat {
    n: usize,
    data: Vec<Complex64>,
}

impl CMat {
    fn kron(&self, o: &CMat) -> CMat {
        let n = self.n * o.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self.data[i * self.n + j];
                for k in 0..o.n {
                    for l in 0..o.n {
                        data[(i * o.n + k) * n + j * o.n + l] = a * o.data[k * o.n + l];
                    }
                }
            }
        }
        CMat { n, data }
    }

    fn pure(psi: &[Complex64]) -> CMat {
        let n = psi.len();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = psi[i] * psi[j].conj();
            }
        }
        CMat { n, data }
    }

    fn mix_identity(&self, v: f64) -> CMat {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= v;
        }
        for i in 0..self.n {
            out.data[i * self.n + i] += (1.0 - v) / self.n as f64;
        }
        out
    }

    /// `Re Tr(self · o)`
    fn trace_product(&self, o: &CMat) -> f64 {
        let n = self.n;
        let mut t = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                t += self.data[i * n + k] * o.data[k * n + i];
            }
        }
        t.re
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn singlet() -> Vec<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(0.0), c(h), c(-h), c(0.0)]
}

/// Bell basis `Φ⁺, Φ⁻, Ψ⁺, Ψ⁻` for outcomes `b = 2 b0 + b1 = 0..3`.
fn bell_projector(b: usize) -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = match b {
        0 => vec![c(h), c(0.0), c(0.0), c(h)],
        1 => vec![c(h), c(0.0), c(0.0), c(-h)],
        2 => vec![c(0.0), c(h), c(h), c(0.0)],
        _ => vec![c(0.0), c(h), c(-h), c(0.0)],
    };
    CMat::pure(&psi)
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || !x.is_finite() {
        return Err(Error::OutOfRange(format!("{name} = {x} must lie in [0, 1]")));
    }
    Ok(())
}

fn check_observables(meas: &MeasurementSpec, parties: &[usize]) -> Result<Vec<usize>> {
    let mut counts = Vec::new();
    for &k in parties {
        let obs = meas
            .parties
            .get(k)
            .ok_or_else(|| Error::InvalidScenario(format!("no observables for party {k}")))?;
        if obs.is_empty() {
            return Err(Error::InvalidScenario(format!("party {k} has no inputs")));
        }
        for o in obs {
            let norm: f64 = o.bloch.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidScenario(format!("observable of party {k} is not a unit Bloch vector")));
            }
        }
        counts.push(obs.len());
    }
    Ok(counts)
}

/// Born-rule distribution of `state` under `meas`.
pub fn born_distribution(state: &StateSpec, meas: &MeasurementSpec) -> Result<Distribution<f64>> {
    let (rho, sc, locals): (CMat, ScenarioSpec, Vec<usize>) = match *state {
        StateSpec::WernerSinglet { v } => {
            check_unit("v", v)?;
            let m = check_observables(meas, &[0, 1])?;
            (CMat::pure(&singlet()).mix_identity(v), ScenarioSpec::bipartite(m[0], m[1], 2, 2), vec![0, 1])
        }
        StateSpec::NonMaxEntangled { eps } => {
            check_unit("eps", eps)?;
            let m = check_observables(meas, &[0, 1])?;
            let psi = vec![c(eps.sqrt()), c(0.0), c(0.0), c((1.0 - eps).sqrt())];
            (CMat::pure(&psi), ScenarioSpec::bipartite(m[0], m[1], 2, 2), vec![0, 1])
        }
        StateSpec::DoubleWerner { v } => {
            check_unit("v", v)?;
            let m = check_observables(meas, &[0, 2])?;
            let w = CMat::pure(&singlet()).mix_identity(v);
            (w.kron(&w), ScenarioSpec::bilocal(m[0], m[1], 4), vec![0, 2])
        }
        StateSpec::Ghz => {
            let m = check_observables(meas, &[0, 1, 2])?;
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let mut psi = vec![c(0.0); 8];
            psi[0] = c(h);
            psi[7] = c(h);
            (CMat::pure(&psi), ScenarioSpec::new(m.clone(), vec![2, 2, 2])?, vec![0, 1, 2])
        }
    };
    let bell = matches!(state, StateSpec::DoubleWerner { .. });
    let mut entries = vec![0.0; sc.len()];
    for (j, e) in entries.iter_mut().enumerate() {
        let (o, i) = sc.split(j)?;
        let mut proj: Option<CMat> = None;
        for k in 0..sc.parties() {
            let local = if bell && k == 1 {
                bell_projector(o[1])
            } else {
                debug_assert!(locals.contains(&k));
                meas.parties[k][i[k]].projector(o[k])
            };
            proj = Some(match proj {
                None => local,
                Some(p) => p.kron(&local),
            });
        }
        *e = rho.trace_product(&proj.expect("at least two parties")).max(0.0);
    }
    Distribution::new(sc, entries)
}

/// Werner singlet with visibility `v` at the Tsirelson settings; the CHSH
/// value is `v/√2 - 1/2`.
pub fn chsh_distribution(v: f64) -> Result<Distribution<f64>> {
    born_distribution(&StateSpec::WernerSinglet { v }, &MeasurementSpec::chsh_optimal())
}

/// `v p_PR + (1 - v) p_W` on three binary inputs: `p_PR = 1/2` on
/// anticorrelated outcomes when `x + y = 3`, on correlated outcomes
/// otherwise. Its `I_3322` value is `2v - 1`.
pub fn i3322_mixture(v: &Rational) -> Result<Distribution<Rational>> {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    if *v < zero || *v > one {
        return Err(Error::OutOfRange(format!("v = {v} must lie in [0, 1]")));
    }
    let sc = ScenarioSpec::bipartite(3, 3, 2, 2);
    let mut pr = vec![zero; sc.len()];
    for x in 0..3 {
        for y in 0..3 {
            for a in 0..2 {
                let b = if x + y == 3 { 1 - a } else { a };
                pr[sc.index_unchecked(&[a, b], &[x, y])] = Rational::new(1, 2);
            }
        }
    }
    Distribution::new(sc.clone(), pr)?.mix(&Distribution::uniform(sc), v)
}

/// `E_xy = cos θA_x cos θB_y + 2√(ε(1-ε)) sin θA_x sin θB_y`.
pub fn nonmax_correlators(eps: f64, theta_a: &[f64], theta_b: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_unit("eps", eps)?;
    let s = 2.0 * (eps * (1.0 - eps)).sqrt();
    Ok(theta_a
        .iter()
        .map(|ta| theta_b.iter().map(|tb| ta.cos() * tb.cos() + s * ta.sin() * tb.sin()).collect())
        .collect())
}

/// Born-rule distribution of the state `√ε|00⟩ + √(1-ε)|11⟩` with planar
/// observables at the given angles. Marginals follow the state.
pub fn nonmax_distribution(eps: f64, theta_a: &[f64], theta_b: &[f64]) -> Result<Distribution<f64>> {
    let meas = MeasurementSpec {
        parties: vec![
            theta_a.iter().map(|&t| Observable::planar(t)).collect(),
            theta_b.iter().map(|&t| Observable::planar(t)).collect(),
        ],
    };
    born_distribution(&StateSpec::NonMaxEntangled { eps }, &meas)
}

/// Binary-outcome distribution with correlators `E` and unbiased marginals:
/// `p(ab|xy) = (1 + (-1)^{a+b} E_xy)/4`.
pub fn distribution_from_correlators(e: &[Vec<f64>]) -> Result<Distribution<f64>> {
    let mx = e.len();
    let my = e.first().map(|r| r.len()).unwrap_or(0);
    if mx == 0 || my == 0 || e.iter().any(|r| r.len() != my) {
        return Err(Error::Dimension("correlator table must be a nonempty rectangle".into()));
    }
    let sc = ScenarioSpec::bipartite(mx, my, 2, 2);
    let mut entries = vec![0.0; sc.len()];
    for x in 0..mx {
        for y in 0..my {
            if e[x][y].abs() > 1.0 + 1e-12 {
                return Err(Error::OutOfRange(format!("|E_{x}{y}| = {} exceeds 1", e[x][y].abs())));
            }
            for a in 0..2 {
                for b in 0..2 {
                    let s = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                    entries[sc.index_unchecked(&[a, b], &[x, y])] = ((1.0 + s * e[x][y]) / 4.0).max(0.0);
                }
            }
        }
    }
    Distribution::new(sc, entries)
}

/// Maximal quantum violation of CGLMP `I_2`: `E00 = E01 = E11 = -E10 = 1/√2`.
pub fn cglmp2_optimal() -> Result<Distribution<f64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    distribution_from_correlators(&[vec![h, h], vec![-h, h]])
}

/// `v² p + (1 - v²)/16` with
/// `p(a,b,c|x,z) = (1 + (-1)^{a+c}((-1)^{b0} + (-1)^{x+z+b1})/2)/16`, `b = 2 b0 + b1`,
/// where `v_sq` is `v²`. Exact for rational `v²`.
pub fn bilocal_distribution_sq(v_sq: &Rational) -> Result<Distribution<Rational>> {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    if *v_sq < zero || *v_sq > one {
        return Err(Error::OutOfRange(format!("v² = {v_sq} must lie in [0, 1]")));
    }
    let sc = ScenarioSpec::bilocal(2, 2, 4);
    let mut entries = Vec::with_capacity(sc.len());
    for j in 0..sc.len() {
        let (o, i) = sc.split(j)?;
        let (a, b, cc, x, z) = (o[0], o[1], o[2], i[0], i[2]);
        let sgn = |e: usize| if e % 2 == 0 { 1i64 } else { -1 };
        // 16 p = 1 + sgn(a+c) (sgn(b0) + sgn(x+z+b1)) / 2
        let inner = sgn(a + cc) * (sgn(b >> 1) + sgn(x + z + (b & 1)));
        let p = Rational::new(2 + inner, 32);
        entries.push(v_sq.clone() * p + (one.clone() - v_sq.clone()) * Rational::new(1, 16));
    }
    Distribution::new(sc, entries)
}

/// [`bilocal_distribution_sq`] at `v²`, exact when `v` is rational.
pub fn bilocal_distribution(v: &Rational) -> Result<Distribution<Rational>> {
    if *v < Rational::from_integer(0) {
        return Err(Error::OutOfRange(format!("v = {v} must lie in [0, 1]")));
    }
    bilocal_distribution_sq(&(v.clone() * v.clone()))
}

/// Two singlets with the outer parties measuring `X`, `Y`, `Z`; rational
/// with denominator dividing 16.
pub fn double_singlet_xyz() -> Result<Distribution<Rational>> {
    born_distribution(&StateSpec::DoubleWerner { v: 1.0 }, &MeasurementSpec::bilocal_xyz())?.rationalize(64, 1e-12)
}

/// GHZ distribution under `meas`.
pub fn ghz_distribution(meas: &MeasurementSpec) -> Result<Distribution<f64>> {
    born_distribution(&StateSpec::Ghz, meas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{bilocal_ij, chsh, i3322, mermin};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};


    #[test]
    fn chsh_family() {
        let f = chsh().convert(|r| r.to_f64());
        for (v, expect) in [(1.0, FRAC_1_SQRT_2 - 0.5), (FRAC_1_SQRT_2, 0.0), (0.0, -0.5)] {
            let p = chsh_distribution(v).unwrap();
            assert!(p.is_nonsignalling(1e-12));
            assert!((f.evaluate(&p).unwrap() - expect).abs() < 1e-12, "v = {v}");
        }
    }

    #[test]
    fn nonmax_matches_correlator_formula() {
        let ta = [0.0, PI, PI / 2.0];
        for eps in [0.1, 0.3, 0.5, 0.0] {
            let tb = [0.0, 0.3, -PI];
            let e = nonmax_correlators(eps, &ta, &tb).unwrap();
            let p = nonmax_distribution(eps, &ta, &tb).unwrap();
            assert!(p.is_nonsignalling(1e-12));
            for x in 0..3 {
                for y in 0..3 {
                    let mut corr = 0.0;
                    for a in 0..2 {
                        for b in 0..2 {
                            let s = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
                            corr += s * p.get(&[a, b], &[x, y]);
                        }
                    }
                    assert!((corr - e[x][y]).abs() < 1e-12);
                }
            }
        }
        // At ε = 1/2 the state is Φ⁺; rotated Tsirelson angles reproduce the singlet point.
        let e = nonmax_correlators(0.5, &[0.0, PI / 2.0], &[PI / 4.0, -PI / 4.0]).unwrap();
        let q = distribution_from_correlators(&e).unwrap();
        for (a, b) in q.entries().iter().zip(chsh_distribution(1.0).unwrap().entries()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn i3322_mixture_values() {
        let f = i3322();
        for (v, want) in [(Rational::new(1, 1), 1), (Rational::new(0, 1), -1)] {
            assert_eq!(f.evaluate(&i3322_mixture(&v).unwrap()).unwrap(), Rational::from_integer(want));
        }
        assert_eq!(f.evaluate(&i3322_mixture(&Rational::new(1, 2)).unwrap()).unwrap(), Rational::from_integer(0));
    }

    #[test]
    fn bilocal_closed_form_matches_born_rule() {
        for v in [1.0, 0.8, 0.3] {
            let born = born_distribution(&StateSpec::DoubleWerner { v }, &MeasurementSpec::bilocal_binary()).unwrap();
            let r = Rational::from_f64_exact(v * v).unwrap();
            let exact = bilocal_distribution_sq(&r).unwrap();
            for (a, b) in born.entries().iter().zip(exact.entries()) {
                assert!((a - b.to_f64()).abs() < 1e-12);
            }
        }
        let (i, j) = bilocal_ij();
        let p = bilocal_distribution(&Rational::new(4, 5)).unwrap();
        assert_eq!(i.evaluate(&p).unwrap(), Rational::new(8, 25));
        assert_eq!(j.evaluate(&p).unwrap(), Rational::new(8, 25));
        assert_eq!(p.marginal(&[0]), vec![Rational::new(1, 2); 4]);
    }

    #[test]
    fn xyz_distribution_is_rational() {
        let p = double_singlet_xyz().unwrap();
        assert_eq!(p.scenario(), &ScenarioSpec::bilocal(3, 3, 4));
        assert!(p.entries().iter().all(|e| (e.clone() * Rational::from_integer(16)).is_integer()));
    }

    #[test]
    fn ghz_settings() {
        let zz = MeasurementSpec { parties: vec![vec![Observable::z(), Observable::z()]; 3] };
        let p = ghz_distribution(&zz).unwrap();
        for k in 0..8usize {
            let o = [k >> 2, (k >> 1) & 1, k & 1];
            let want = if k == 0 || k == 7 { 0.5 } else { 0.0 };
            assert!((p.get(&o, &[1, 0, 1]) - want).abs() < 1e-12);
        }
        let p = ghz_distribution(&MeasurementSpec::mermin()).unwrap();
        assert!(p.is_nonsignalling(1e-12));
        let m = mermin().convert(|r| r.to_f64());
        assert!((m.evaluate(&p).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(chsh_distribution(1.5).is_err());
        assert!(i3322_mixture(&Rational::new(-1, 2)).is_err());
        assert!(distribution_from_correlators(&[vec![2.0]]).is_err());
    }
}
