//! Non-bilocality `M_BL` in the two-source chain `A - B - C`.
//!
//! For fixed values `ν` of the free coordinates of Alice's strategy marginal
//! `q^a`, `M_BL(ν) = min ‖q^{ac} - f(ν) ⊗ q^c‖₁` is an ℓ1 program. The
//! measure is then minimized over a grid of `ν` inside the window allowed by
//! the observed distribution.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{minimize_linear, minimize_max_l1, Status};
use crate::matrix::{solve_affine, AffineSolution, Matrix};
use crate::num::{format_sig, sum, Rational, Scalar};
use crate::scenario::{build_response_matrix, enumerate_strategies, CausalModel, Distribution, StrategySpace, Variant};

/// Max denominator used when a float point is moved onto the exact grid.
const SNAP_DENOMINATOR: i64 = 1_000_000;

fn snap<T: Scalar>(x: f64) -> T {
    if T::is_exact() {
        let c = Rational::convergents(x, SNAP_DENOMINATOR);
        T::from_rational(c.last().unwrap_or(&Rational::from_integer(0)))
    } else {
        T::from_f64(x)
    }
}

#[derive(Clone, Debug)]
pub struct BilocalProgram<T> {
    pub space: StrategySpace,
    pub a: Matrix<T>,
    pub p: Vec<T>,
    /// Index of `ᾱ` per strategy, `Σ_x α_x o_a^{m_x-1-x}` (so `α_0` is slowest).
    pub alpha: Vec<usize>,
    /// Index of `γ̄` per strategy, same convention.
    pub gamma: Vec<usize>,
    pub na: usize,
    pub nc: usize,
    /// `q^a = particular + Σ_j ν_j directions_j`, with `ν_j = q^a_{free[j]}`.
    pub marginal: AffineSolution<T>,
}

#[derive(Clone, Debug)]
pub struct BilocalPoint<T> {
    pub nu: Vec<T>,
    pub value: T,
    pub q: Vec<T>,
    pub gap: Option<T>,
}

impl<T: Scalar> BilocalProgram<T> {
    pub fn new(p: &Distribution<T>) -> Result<Self> {
        let sc = p.scenario().clone();
        if sc.parties() != 3 || sc.inputs[1] != 1 {
            return Err(Error::InvalidModel("bilocality needs three parties with a single middle input".into()));
        }
        let space = enumerate_strategies(&CausalModel::new(Variant::Bilocal, sc.clone())?)?;
        let a = build_response_matrix::<T>(&space, None)?;
        let (mx, mz, oa, oc) = (sc.inputs[0], sc.inputs[2], sc.outputs[0], sc.outputs[2]);
        let na = oa.pow(mx as u32);
        let nc = oc.pow(mz as u32);
        let mut alpha = Vec::with_capacity(space.len());
        let mut gamma = Vec::with_capacity(space.len());
        for s in 0..space.len() {
            let (mut ia, mut ic) = (0, 0);
            for x in 0..mx {
                ia = ia * oa + space.respond(s, &[x, 0, 0], None)[0];
            }
            for z in 0..mz {
                ic = ic * oc + space.respond(s, &[0, 0, z], None)[2];
            }
            alpha.push(ia);
            gamma.push(ic);
        }
        // p(a|x) = Σ_ᾱ δ(a, α_x) q^a_ᾱ fixes q^a up to the free coordinates.
        let digit = |ia: usize, x: usize| (ia / oa.pow((mx - 1 - x) as u32)) % oa;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for x in 0..mx {
            for av in 0..oa {
                rows.push((0..na).map(|ia| if digit(ia, x) == av { T::one() } else { T::zero() }).collect());
                let mut m = T::zero();
                for b in 0..sc.outputs[1] {
                    for c in 0..oc {
                        m += p.get(&[av, b, c], &[x, 0, 0]);
                    }
                }
                rhs.push(m);
            }
        }
        let marginal = solve_affine(&Matrix::from_rows(rows, na), &rhs)
            .ok_or_else(|| Error::InvalidDistribution("Alice's marginals are inconsistent".into()))?;
        Ok(BilocalProgram { space, a, p: p.entries().to_vec(), alpha, gamma, na, nc, marginal })
    }

    /// Marginal coordinates left free by the observed `p(a|x)`.
    pub fn free_parameters(&self) -> &[usize] {
        &self.marginal.free
    }

    fn alpha_row(&self, ia: usize) -> Vec<T> {
        self.alpha.iter().map(|&k| if k == ia { T::one() } else { T::zero() }).collect()
    }

    fn constraints_with(&self, fixed: &[(usize, T)]) -> (Matrix<T>, Vec<T>) {
        let mut a = self.a.clone();
        let mut p = self.p.clone();
        for (ia, v) in fixed {
            a.push_row(self.alpha_row(*ia));
            p.push(v.clone());
        }
        (a, p)
    }

    /// Exact range of `q^a_{component}` over models reproducing `p` with the
    /// listed marginal coordinates held fixed. `None` when nothing is feasible.
    pub fn window(&self, component: usize, fixed: &[(usize, T)]) -> Result<Option<(T, T)>> {
        if component >= self.na {
            return Err(Error::Dimension(format!("marginal coordinate {component} out of range")));
        }
        let (a, p) = self.constraints_with(fixed);
        let c = self.alpha_row(component);
        let lo = minimize_linear(&a, &p, &c)?;
        if lo.status == Status::Infeasible {
            return Ok(None);
        }
        let neg: Vec<T> = c.iter().map(|v| -v.clone()).collect();
        let hi = minimize_linear(&a, &p, &neg)?;
        match (lo.value, hi.value) {
            (Some(l), Some(h)) => Ok(Some((l, -h))),
            _ => Err(Error::Solver("window program did not reach optimality".into())),
        }
    }

    /// `f(ν)`, the full `q^a` for the free coordinates `ν`.
    pub fn alice_marginal(&self, nu: &[T]) -> Result<Vec<T>> {
        if nu.len() != self.marginal.free.len() {
            return Err(Error::Dimension(format!(
                "{} free parameters, {} values given",
                self.marginal.free.len(),
                nu.len()
            )));
        }
        Ok(self.marginal.evaluate(nu))
    }

    /// Rows `(ᾱ, γ̄)` of `δ_{ᾱᾱ'} δ_{γ̄γ̄'} - f_ᾱ(ν) δ_{γ̄γ̄'}`.
    pub fn m_matrix(&self, nu: &[T]) -> Result<Matrix<T>> {
        let f = self.alice_marginal(nu)?;
        let mut m = Matrix::zeros(self.na * self.nc, self.space.len());
        for s in 0..self.space.len() {
            let (ia, ic) = (self.alpha[s], self.gamma[s]);
            for (k, fk) in f.iter().enumerate() {
                let mut e = -fk.clone();
                if k == ia {
                    e += T::one();
                }
                m[(k * self.nc + ic, s)] = e;
            }
        }
        Ok(m)
    }

    /// `min ‖M^ν q‖₁` over models reproducing `p` with `q^a = f(ν)`; `None`
    /// when `ν` lies outside the feasible window.
    pub fn solve_at(&self, nu: &[T]) -> Result<Option<BilocalPoint<T>>> {
        let m = self.m_matrix(nu)?;
        let fixed: Vec<(usize, T)> = self.marginal.free.iter().copied().zip(nu.iter().cloned()).collect();
        let (a, p) = self.constraints_with(&fixed);
        let sol = minimize_max_l1(&a, &p, std::slice::from_ref(&m))?;
        match sol.status {
            Status::Optimal => {}
            Status::Infeasible => return Ok(None),
            s => return Err(Error::Solver(format!("bilocal program ended with {s:?}"))),
        }
        Ok(Some(BilocalPoint { nu: nu.to_vec(), value: sol.value.expect("optimal"), q: sol.q, gap: sol.gap }))
    }

    pub fn marginals(&self, q: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
        let mut qa = vec![T::zero(); self.na];
        let mut qc = vec![T::zero(); self.nc];
        let mut qac = vec![T::zero(); self.na * self.nc];
        for (s, v) in q.iter().enumerate() {
            qa[self.alpha[s]] += v.clone();
            qc[self.gamma[s]] += v.clone();
            qac[self.alpha[s] * self.nc + self.gamma[s]] += v.clone();
        }
        (qa, qc, qac)
    }

    /// `Σ |q^{ac} - q^a q^c|` of a strategy distribution.
    pub fn factorization_residual(&self, q: &[T]) -> T {
        let (qa, qc, qac) = self.marginals(q);
        let mut r = T::zero();
        for i in 0..self.na {
            for k in 0..self.nc {
                r += (qac[i * self.nc + k].clone() - qa[i].clone() * qc[k].clone()).abs_val();
            }
        }
        r
    }

    /// `A q = p` and exact (or tolerance-level) factorization.
    pub fn is_bilocal_model(&self, q: &[T], tol: f64) -> bool {
        let repro = self.a.mul_vec(q).iter().zip(&self.p).all(|(x, y)| x.approx_eq(y, tol));
        let normalized = sum(q).approx_eq(&T::one(), tol) && q.iter().all(|v| v.sign_tol(tol) >= 0);
        repro && normalized && self.factorization_residual(q).sign_tol(tol) == 0
    }
}

/// Range of the marginal coordinate `q^a_{component}` allowed by `p`.
pub fn free_parameter_range<T: Scalar>(p: &Distribution<T>, component: usize) -> Result<(T, T)> {
    BilocalProgram::new(p)?
        .window(component, &[])?
        .ok_or_else(|| Error::Infeasible("no model of the bilocal structure reproduces the data".into()))
}

/// `M_BL(ν)` for the free coordinates `ν`.
pub fn min_bilocality_at<T: Scalar>(p: &Distribution<T>, nu: &[T]) -> Result<BilocalPoint<T>> {
    BilocalProgram::new(p)?
        .solve_at(nu)?
        .ok_or_else(|| Error::Infeasible("ν lies outside the feasible window".into()))
}

/// Points per parameter of a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grid<T> {
    /// Evenly spaced over the current window, both ends included.
    Uniform(usize),
    /// Explicit values; those outside the window are skipped.
    Values(Vec<T>),
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Golden-section pass around the best grid point (single parameter only).
    pub refine: bool,
    pub refine_iterations: usize,
    /// Grid steps above this trigger a resolution warning.
    pub max_step: f64,
    /// `0` uses the global rayon pool.
    pub threads: usize,
    /// Float zero tolerance; exact mode ignores it.
    pub tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { refine: true, refine_iterations: 40, max_step: 0.05, threads: 0, tol: 1e-9 }
    }
}

pub const DEFAULT_GRID_POINTS: usize = 41;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// A factorizing model was found.
    BilocalCertified,
    /// No zero found at this resolution; not a proof of non-bilocality.
    NotCertified,
}

#[derive(Clone, Debug)]
pub struct ScanResult<T> {
    /// Marginal coordinates scanned, outermost first.
    pub parameters: Vec<usize>,
    /// Window of the outermost parameter.
    pub window: (T, T),
    /// Every evaluated feasible point, in scan order.
    pub points: Vec<BilocalPoint<T>>,
    pub minimum: T,
    pub argmin: Vec<T>,
    /// Optimal strategy distribution at `argmin`.
    pub q: Vec<T>,
    pub verdict: Verdict,
    pub resolution_limited: bool,
    pub warnings: Vec<String>,
}

impl<T: Scalar> ScanResult<T> {
    /// `ν_1, …, ν_d, m_bl` rows with 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let head: Vec<String> = (0..self.parameters.len()).map(|k| format!("nu_{}", k + 1)).collect();
        writeln!(out, "{},m_bl", head.join(","))?;
        for pt in &self.points {
            let cols: Vec<String> = pt.nu.iter().map(|v| format_sig(v.to_f64(), 12)).collect();
            writeln!(out, "{},{}", cols.join(","), format_sig(pt.value.to_f64(), 12))?;
        }
        Ok(())
    }
}

fn grid_values<T: Scalar>(grid: &Grid<T>, lo: &T, hi: &T, warnings: &mut Vec<String>, max_step: f64) -> Vec<T> {
    match grid {
        Grid::Uniform(n) => {
            let n = (*n).max(1);
            if n == 1 || lo == hi {
                let mid = (lo.clone() + hi.clone()) * T::from_frac(1, 2);
                return vec![if lo == hi { lo.clone() } else { mid }];
            }
            let step = (hi.clone() - lo.clone()) * T::from_frac(1, (n - 1) as i64);
            if step.to_f64() > max_step {
                warnings.push(format!("grid step {:.3e} exceeds {:.3e}", step.to_f64(), max_step));
            }
            (0..n).map(|i| lo.clone() + step.clone() * T::from_int(i as i64)).collect()
        }
        Grid::Values(vs) => {
            let inside: Vec<T> = vs.iter().filter(|v| **v >= *lo && **v <= *hi).cloned().collect();
            if inside.len() < vs.len() {
                warnings.push(format!("{} grid values outside the window were skipped", vs.len() - inside.len()));
            }
            inside
        }
    }
}

fn run_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Solver(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn is_zero<T: Scalar>(v: &T, tol: f64) -> bool {
    v.sign_tol(tol) == 0
}

/// Evaluates `nus` in parallel, keeping input order.
fn evaluate_all<T: Scalar + Send + Sync>(prog: &BilocalProgram<T>, nus: Vec<Vec<T>>) -> Result<Vec<BilocalPoint<T>>> {
    let out: Vec<Result<Option<BilocalPoint<T>>>> = nus.par_iter().map(|nu| prog.solve_at(nu)).collect();
    let mut pts = Vec::new();
    for r in out {
        if let Some(p) = r? {
            pts.push(p);
        }
    }
    Ok(pts)
}

/// Smallest value, ties broken by lexicographic `ν`.
fn best<T: Scalar>(pts: &[BilocalPoint<T>]) -> Option<usize> {
    (0..pts.len()).min_by(|&i, &j| {
        pts[i]
            .value
            .partial_cmp(&pts[j].value)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| pts[i].nu.partial_cmp(&pts[j].nu).unwrap_or(std::cmp::Ordering::Equal))
    })
}

fn finish<T: Scalar>(
    prog: &BilocalProgram<T>,
    window: (T, T),
    points: Vec<BilocalPoint<T>>,
    mut warnings: Vec<String>,
    tol: f64,
) -> Result<ScanResult<T>> {
    let i = best(&points).ok_or_else(|| Error::Infeasible("no grid point is feasible".into()))?;
    let bp = points[i].clone();
    let certified = is_zero(&bp.value, tol) && prog.is_bilocal_model(&bp.q, tol.max(1e-12));
    if is_zero(&bp.value, tol) && !certified {
        warnings.push("zero value without an exactly factorizing model".into());
    }
    Ok(ScanResult {
        parameters: prog.free_parameters().to_vec(),
        window,
        minimum: bp.value,
        argmin: bp.nu,
        q: bp.q,
        points,
        verdict: if certified { Verdict::BilocalCertified } else { Verdict::NotCertified },
        resolution_limited: !certified,
        warnings,
    })
}

/// Single-parameter scan: grid over the window plus an optional
/// golden-section pass between the neighbours of the best grid point.
pub fn min_bilocality<T: Scalar + Send + Sync>(
    p: &Distribution<T>,
    grid: &Grid<T>,
    opts: &ScanOptions,
) -> Result<ScanResult<T>> {
    let prog = BilocalProgram::new(p)?;
    if prog.free_parameters().len() != 1 {
        return Err(Error::InvalidModel(format!(
            "{} free marginal parameters; use the nested scan",
            prog.free_parameters().len()
        )));
    }
    let comp = prog.free_parameters()[0];
    let (lo, hi) = prog
        .window(comp, &[])?
        .ok_or_else(|| Error::Infeasible("no model of the bilocal structure reproduces the data".into()))?;
    let mut warnings = Vec::new();
    let nus: Vec<Vec<T>> = grid_values(grid, &lo, &hi, &mut warnings, opts.max_step).into_iter().map(|v| vec![v]).collect();
    let mut points = run_pool(opts.threads, || evaluate_all(&prog, nus))??;
    if let (true, Some(i)) = (opts.refine, best(&points)) {
        if !is_zero(&points[i].value, opts.tol) && points.len() > 2 {
            let a = if i > 0 { points[i - 1].nu[0].to_f64() } else { lo.to_f64() };
            let b = if i + 1 < points.len() { points[i + 1].nu[0].to_f64() } else { hi.to_f64() };
            let refined = golden(&prog, a, b, opts.refine_iterations)?;
            points.extend(refined);
        }
    }
    finish(&prog, (lo, hi), points, warnings, opts.tol)
}

fn golden<T: Scalar>(prog: &BilocalProgram<T>, mut a: f64, mut b: f64, iters: usize) -> Result<Vec<BilocalPoint<T>>> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut out = Vec::new();
    let eval = |x: f64, out: &mut Vec<BilocalPoint<T>>| -> Result<f64> {
        match prog.solve_at(&[snap::<T>(x)])? {
            Some(pt) => {
                let v = pt.value.to_f64();
                out.push(pt);
                Ok(v)
            }
            None => Ok(f64::INFINITY),
        }
    };
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = eval(c, &mut out)?;
    let mut fd = eval(d, &mut out)?;
    for _ in 0..iters {
        if (b - a).abs() < 1e-9 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = eval(c, &mut out)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = eval(d, &mut out)?;
        }
    }
    Ok(out)
}

/// Scan over all free parameters. Each inner window is recomputed with the
/// outer parameters fixed; the scan stops at the first certified zero.
pub fn nested_scan<T: Scalar + Send + Sync>(
    p: &Distribution<T>,
    grids: &[Grid<T>],
    opts: &ScanOptions,
) -> Result<ScanResult<T>> {
    let prog = BilocalProgram::new(p)?;
    let free = prog.free_parameters().to_vec();
    if grids.len() != free.len() {
        return Err(Error::Dimension(format!("{} grids for {} free parameters", grids.len(), free.len())));
    }
    let outer = prog
        .window(free[0], &[])?
        .ok_or_else(|| Error::Infeasible("no model of the bilocal structure reproduces the data".into()))?;
    let mut warnings = Vec::new();
    let mut points = Vec::new();
    run_pool(opts.threads, || descend(&prog, grids, opts, &mut Vec::new(), &mut points, &mut warnings))??;
    warnings.sort();
    warnings.dedup();
    finish(&prog, outer, points, warnings, opts.tol)
}

/// Returns `true` once a certified zero has been found.
fn descend<T: Scalar + Send + Sync>(
    prog: &BilocalProgram<T>,
    grids: &[Grid<T>],
    opts: &ScanOptions,
    prefix: &mut Vec<T>,
    points: &mut Vec<BilocalPoint<T>>,
    warnings: &mut Vec<String>,
) -> Result<bool> {
    let free = prog.free_parameters();
    let level = prefix.len();
    let fixed: Vec<(usize, T)> = free.iter().copied().zip(prefix.iter().cloned()).collect();
    let Some((lo, hi)) = prog.window(free[level], &fixed)? else { return Ok(false) };
    let vals = grid_values(&grids[level], &lo, &hi, warnings, opts.max_step);
    if level + 1 == free.len() {
        let nus: Vec<Vec<T>> = vals
            .into_iter()
            .map(|v| {
                let mut nu = prefix.clone();
                nu.push(v);
                nu
            })
            .collect();
        let pts = evaluate_all(prog, nus)?;
        let hit = pts.iter().any(|pt| is_zero(&pt.value, opts.tol) && prog.is_bilocal_model(&pt.q, opts.tol.max(1e-12)));
        points.extend(pts);
        return Ok(hit);
    }
    for v in vals {
        prefix.push(v);
        let hit = descend(prog, grids, opts, prefix, points, warnings)?;
        prefix.pop();
        if hit {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::bilocal_b;
    use crate::quantum::{bilocal_distribution, bilocal_distribution_sq, double_singlet_xyz};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn single_free_parameter() {
        let p = bilocal_distribution(&q(1, 1)).unwrap();
        let prog = BilocalProgram::new(&p).unwrap();
        assert_eq!(prog.free_parameters(), &[0]);
        assert_eq!(prog.alice_marginal(&[q(1, 4)]).unwrap(), vec![q(1, 4); 4]);
        assert_eq!(prog.window(0, &[]).unwrap(), Some((q(1, 4), q(1, 4))));
    }

    #[test]
    fn window_at_point_eight() {
        let (lo, hi) = free_parameter_range(&bilocal_distribution(&q(4, 5)).unwrap(), 0).unwrap();
        assert_eq!((lo, hi), (q(4, 25), q(17, 50)));
    }

    #[test]
    fn quarter_values() {
        let p = bilocal_distribution(&q(1, 1)).unwrap();
        assert_eq!(min_bilocality_at(&p, &[q(1, 4)]).unwrap().value, q(1, 1));
        let p = bilocal_distribution_sq(&q(1, 2)).unwrap();
        let pt = min_bilocality_at(&p, &[q(1, 4)]).unwrap();
        assert_eq!(pt.value, q(0, 1));
        assert!(BilocalProgram::new(&p).unwrap().is_bilocal_model(&pt.q, 0.0));
        // v² = 0.85² on the violating branch: 2v² - 1 = B² - 1.
        let v2 = q(289, 400);
        let p = bilocal_distribution_sq(&v2).unwrap();
        let m = min_bilocality_at(&p, &[q(1, 4)]).unwrap().value;
        assert_eq!(m, q(89, 200));
        let b = bilocal_b(&p).unwrap();
        assert!((b * b - 1.0 - m.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn scan_finds_minimum() {
        let opts = ScanOptions::default();
        let p = bilocal_distribution(&q(17, 20)).unwrap().to_f64();
        let r = min_bilocality(&p, &Grid::Uniform(DEFAULT_GRID_POINTS), &opts).unwrap();
        assert!((r.minimum - 0.445).abs() < 1e-9);
        assert!((r.argmin[0] - 0.25).abs() < 1e-6);
        assert_eq!(r.verdict, Verdict::NotCertified);
        let p = bilocal_distribution(&q(1, 2)).unwrap();
        let r = min_bilocality(&p, &Grid::Uniform(DEFAULT_GRID_POINTS), &opts).unwrap();
        assert_eq!(r.minimum, q(0, 1));
        assert_eq!(r.verdict, Verdict::BilocalCertified);
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("nu_1,m_bl\n"));
    }

    #[test]
    fn nested_matches_single_parameter_path() {
        let opts = ScanOptions { refine: false, ..Default::default() };
        let p = bilocal_distribution(&q(4, 5)).unwrap();
        let a = min_bilocality(&p, &Grid::Uniform(9), &opts).unwrap();
        let b = nested_scan(&p, &[Grid::Uniform(9)], &opts).unwrap();
        assert_eq!(a.minimum, b.minimum);
        assert_eq!(a.argmin, b.argmin);
    }

    #[test]
    fn ternary_certificate() {
        let p = double_singlet_xyz().unwrap();
        let prog = BilocalProgram::new(&p).unwrap();
        assert_eq!(prog.free_parameters(), &[0, 1, 2, 4]);
        let nu = vec![q(0, 1), q(1, 4), q(1, 4), q(1, 4)];
        let grids: Vec<Grid<Rational>> = nu.iter().map(|v| Grid::Values(vec![v.clone()])).collect();
        let r = nested_scan(&p, &grids, &ScanOptions::default()).unwrap();
        assert_eq!(r.minimum, q(0, 1));
        assert_eq!(r.verdict, Verdict::BilocalCertified);
        assert_eq!(prog.factorization_residual(&r.q), q(0, 1));
    }
}
