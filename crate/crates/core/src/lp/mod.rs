//! Standard-form linear programs and their solution.
//!
//! A [`StandardLP`] is the triple `(c, b, Φ)` together with the sense of the
//! program being posed: the primal `min ⟨c, ξ⟩ s.t. Φξ ≥ b, ξ ≥ 0` or the
//! dual `max ⟨ζ, b⟩ s.t. Φᵀζ ≤ c, ζ ≥ 0`. Both share the same data, so
//! [`StandardLP::dualize`] only flips the sense.

pub mod programs;
pub mod simplex;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::{dot, Mode, Scalar};
use simplex::{solve_general, GeneralLp, Outcome, RowSense};

pub use programs::*;

/// Residual above which a float solve carries an instability diagnostic.
pub const INSTABILITY_TOL: f64 = 1e-6;
/// Feasibility tolerance for float points.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Duality gap accepted in float mode.
pub const DUALITY_GAP_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    /// `min ⟨c, ξ⟩ s.t. Φξ ≥ b, ξ ≥ 0`
    Primal,
    /// `max ⟨ζ, b⟩ s.t. Φᵀζ ≤ c, ζ ≥ 0`
    Dual,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StandardLP<T> {
    pub c: Vec<T>,
    pub b: Vec<T>,
    pub phi: Matrix<T>,
    pub sense: Sense,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct LPSolution<T> {
    pub status: Status,
    /// Optimal value of the posed program.
    pub value: Option<T>,
    /// `ξ`, the primal variables.
    pub primal_point: Vec<T>,
    /// `ζ`, the dual variables.
    pub dual_point: Vec<T>,
    pub mode: Mode,
    pub diagnostics: Vec<String>,
}

impl<T: Scalar> StandardLP<T> {
    pub fn new(c: Vec<T>, b: Vec<T>, phi: Matrix<T>) -> Result<Self> {
        if phi.rows() != b.len() || phi.cols() != c.len() {
            return Err(Error::Dimension(format!(
                "Φ is {}x{}, b has {} entries, c has {}",
                phi.rows(),
                phi.cols(),
                b.len(),
                c.len()
            )));
        }
        Ok(StandardLP { c, b, phi, sense: Sense::Primal })
    }

    /// The other program of the pair: same data, opposite sense.
    pub fn dualize(&self) -> Self {
        let sense = match self.sense {
            Sense::Primal => Sense::Dual,
            Sense::Dual => Sense::Primal,
        };
        StandardLP { c: self.c.clone(), b: self.b.clone(), phi: self.phi.clone(), sense }
    }

    pub fn primal_objective(&self, xi: &[T]) -> T {
        dot(&self.c, xi)
    }

    pub fn dual_objective(&self, zeta: &[T]) -> T {
        dot(zeta, &self.b)
    }

    /// Largest violation of `Φξ ≥ b, ξ ≥ 0`.
    pub fn primal_violation(&self, xi: &[T]) -> T {
        let mut worst = T::zero();
        for v in xi {
            let neg = -v.clone();
            if neg > worst {
                worst = neg;
            }
        }
        for (r, bi) in self.phi.mul_vec(xi).into_iter().zip(&self.b) {
            let gap = bi.clone() - r;
            if gap > worst {
                worst = gap;
            }
        }
        worst
    }

    /// Largest violation of `Φᵀζ ≤ c, ζ ≥ 0`.
    pub fn dual_violation(&self, zeta: &[T]) -> T {
        let mut worst = T::zero();
        for v in zeta {
            let neg = -v.clone();
            if neg > worst {
                worst = neg;
            }
        }
        for (r, cj) in self.phi.vec_mul(zeta).into_iter().zip(&self.c) {
            let gap = r - cj.clone();
            if gap > worst {
                worst = gap;
            }
        }
        worst
    }

    pub fn is_primal_feasible(&self, xi: &[T]) -> bool {
        self.primal_violation(xi).sign_tol(FEASIBILITY_TOL) <= 0
    }

    pub fn is_dual_feasible(&self, zeta: &[T]) -> bool {
        self.dual_violation(zeta).sign_tol(FEASIBILITY_TOL) <= 0
    }
}

fn row_key<T: Scalar>(row: &[T], rhs: &T) -> Option<String> {
    if !T::is_exact() {
        return None;
    }
    let mut s = String::new();
    for v in row.iter().chain(std::iter::once(rhs)) {
        s.push_str(&v.to_text());
        s.push(',');
    }
    Some(s)
}

fn is_negation<T: Scalar>(a: &[T], b: &[T], ra: &T, rb: &T) -> bool {
    let tol = 1e-12;
    a.iter().zip(b).all(|(x, y)| (x.clone() + y.clone()).sign_tol(tol) == 0)
        && (ra.clone() + rb.clone()).sign_tol(tol) == 0
}

/// Pairs of rows `(i, j)` with `Φ_j = -Φ_i` and `b_j = -b_i`.
fn negated_row_pairs<T: Scalar>(phi: &Matrix<T>, b: &[T]) -> Vec<(usize, usize)> {
    let m = phi.rows();
    let mut pairs = Vec::new();
    let mut used = vec![false; m];
    if T::is_exact() {
        let mut seen: HashMap<String, Vec<usize>> = HashMap::new();
        for i in 0..m {
            if let Some(k) = row_key(phi.row(i), &b[i]) {
                seen.entry(k).or_default().push(i);
            }
        }
        for i in 0..m {
            if used[i] {
                continue;
            }
            let neg: Vec<T> = phi.row(i).iter().map(|v| -v.clone()).collect();
            let Some(k) = row_key(&neg, &(-b[i].clone())) else { continue };
            if let Some(js) = seen.get(&k) {
                if let Some(&j) = js.iter().find(|&&j| j != i && !used[j]) {
                    used[i] = true;
                    used[j] = true;
                    pairs.push((i.min(j), i.max(j)));
                }
            }
        }
    } else {
        // Bucket by a coarse signature so only plausible pairs are compared.
        let sig = |row: &[T], sign: f64| -> (i64, i64) {
            let s: f64 = row.iter().map(|v| v.to_f64()).sum::<f64>() * sign;
            let nz = row.iter().position(|v| !v.is_zero_val()).map(|p| p as i64).unwrap_or(-1);
            ((s * 1e6).round() as i64, nz)
        };
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for i in 0..m {
            buckets.entry(sig(phi.row(i), 1.0)).or_default().push(i);
        }
        for i in 0..m {
            if used[i] {
                continue;
            }
            if let Some(js) = buckets.get(&sig(phi.row(i), -1.0)) {
                if let Some(&j) =
                    js.iter().find(|&&j| j != i && !used[j] && is_negation(phi.row(i), phi.row(j), &b[i], &b[j]))
                {
                    used[i] = true;
                    used[j] = true;
                    pairs.push((i.min(j), i.max(j)));
                }
            }
        }
    }
    pairs.sort();
    pairs
}

/// Solves the posed program of the pair and returns both points.
pub fn solve<T: Scalar>(lp: &StandardLP<T>) -> LPSolution<T> {
    match lp.sense {
        Sense::Primal => solve_primal(lp),
        Sense::Dual => solve_dual(lp),
    }
}

fn finish<T: Scalar>(lp: &StandardLP<T>, mut sol: LPSolution<T>) -> LPSolution<T> {
    if sol.status == Status::Optimal && !T::is_exact() {
        let pv = lp.primal_violation(&sol.primal_point).to_f64();
        let dv = lp.dual_violation(&sol.dual_point).to_f64();
        let gap = (lp.primal_objective(&sol.primal_point) - lp.dual_objective(&sol.dual_point)).to_f64().abs();
        let scale = sol.value.as_ref().map(|v| v.to_f64().abs()).unwrap_or(0.0).max(1.0);
        if pv > INSTABILITY_TOL || dv > INSTABILITY_TOL {
            sol.diagnostics.push(format!(
                "numerical instability: primal residual {pv:.3e}, dual residual {dv:.3e}"
            ));
        }
        if gap > DUALITY_GAP_TOL * scale {
            sol.diagnostics.push(format!("duality gap {gap:.3e} exceeds tolerance"));
        }
    }
    sol
}

fn empty<T: Scalar>(status: Status, diag: &str) -> LPSolution<T> {
    LPSolution {
        status,
        value: None,
        primal_point: Vec::new(),
        dual_point: Vec::new(),
        mode: T::MODE,
        diagnostics: if diag.is_empty() { Vec::new() } else { vec![diag.to_string()] },
    }
}

fn solve_primal<T: Scalar>(lp: &StandardLP<T>) -> LPSolution<T> {
    let m = lp.phi.rows();
    let pairs = negated_row_pairs(&lp.phi, &lp.b);
    let mut partner = vec![usize::MAX; m];
    for &(i, j) in &pairs {
        partner[i] = j;
        partner[j] = i;
    }
    let mut rows = Vec::new();
    let mut sense = Vec::new();
    let mut rhs = Vec::new();
    let mut origin = Vec::new();
    for i in 0..m {
        if partner[i] != usize::MAX && partner[i] < i {
            continue;
        }
        rows.push(lp.phi.row(i).to_vec());
        rhs.push(lp.b[i].clone());
        sense.push(if partner[i] == usize::MAX { RowSense::Ge } else { RowSense::Eq });
        origin.push(i);
    }
    let general = GeneralLp { c: lp.c.clone(), a: Matrix::from_rows(rows, lp.phi.cols()), sense, rhs };
    match solve_general(&general) {
        Outcome::Optimal { x, y, value } => {
            let mut zeta = vec![T::zero(); m];
            for (k, &i) in origin.iter().enumerate() {
                let yk = y[k].clone();
                if partner[i] == usize::MAX {
                    zeta[i] = if yk.sign_tol(0.0) < 0 { T::zero() } else { yk };
                } else if yk.sign_tol(0.0) >= 0 {
                    zeta[i] = yk;
                } else {
                    zeta[partner[i]] = -yk;
                }
            }
            finish(
                lp,
                LPSolution {
                    status: Status::Optimal,
                    value: Some(value),
                    primal_point: x,
                    dual_point: zeta,
                    mode: T::MODE,
                    diagnostics: Vec::new(),
                },
            )
        }
        Outcome::Infeasible => empty(Status::Infeasible, ""),
        Outcome::Unbounded => empty(Status::Unbounded, ""),
        Outcome::IterationLimit => empty(Status::IterationLimit, "iteration limit reached"),
    }
}

fn solve_dual<T: Scalar>(lp: &StandardLP<T>) -> LPSolution<T> {
    let n = lp.phi.cols();
    let general = GeneralLp {
        c: lp.b.iter().map(|v| -v.clone()).collect(),
        a: lp.phi.transpose(),
        sense: vec![RowSense::Le; n],
        rhs: lp.c.clone(),
    };
    match solve_general(&general) {
        Outcome::Optimal { x, y, value } => {
            let xi = y.into_iter().map(|v| if v.sign_tol(0.0) > 0 { T::zero() } else { -v }).collect();
            finish(
                lp,
                LPSolution {
                    status: Status::Optimal,
                    value: Some(-value),
                    primal_point: xi,
                    dual_point: x,
                    mode: T::MODE,
                    diagnostics: Vec::new(),
                },
            )
        }
        Outcome::Infeasible => empty(Status::Infeasible, ""),
        Outcome::Unbounded => empty(Status::Unbounded, ""),
        Outcome::IterationLimit => empty(Status::IterationLimit, "iteration limit reached"),
    }
}

impl<T: Scalar> LPSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// `⟨c, ξ⟩ - ⟨ζ, b⟩` for the returned points.
    pub fn duality_gap(&self, lp: &StandardLP<T>) -> Option<T> {
        if !self.is_optimal() {
            return None;
        }
        Some(lp.primal_objective(&self.primal_point) - lp.dual_objective(&self.dual_point))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn one_variable() {
        let lp = StandardLP::new(vec![q(1)], vec![q(3)], Matrix::from_rows(vec![vec![q(1)]], 1)).unwrap();
        let sol = solve(&lp);
        assert_eq!(sol.value, Some(q(3)));
        assert_eq!(sol.dual_point, vec![q(1)]);
        let d = solve(&lp.dualize());
        assert_eq!(d.value, Some(q(3)));
        assert_eq!(lp.dualize().dualize(), lp);
    }

    #[test]
    fn dimension_check() {
        assert!(StandardLP::new(vec![q(1)], vec![q(3), q(1)], Matrix::from_rows(vec![vec![q(1)]], 1)).is_err());
    }

    #[test]
    fn paired_rows_become_equalities() {
        // min x0 s.t. x0 + x1 = 2 (as two rows), x1 <= 1 (as -x1 >= -1)
        let phi = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(-1), q(-1)], vec![q(0), q(-1)]], 2);
        let lp = StandardLP::new(vec![q(1), q(0)], vec![q(2), q(-2), q(-1)], phi).unwrap();
        let sol = solve(&lp);
        assert_eq!(sol.value, Some(q(1)));
        assert_eq!(sol.duality_gap(&lp), Some(q(0)));
        assert!(lp.is_dual_feasible(&sol.dual_point));
        assert!(lp.is_primal_feasible(&sol.primal_point));
    }
}
