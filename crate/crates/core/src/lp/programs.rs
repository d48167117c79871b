//! The four program shapes behind every measure: min-max ℓ1, ℓ∞ under an
//! ℓ1 budget, plain ℓ∞ and linear, each over stochastic `q` with `A q = p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{independent_rows_reverse, Matrix, RowReduction};
use crate::num::{dot, sum, Scalar};

use super::{solve, LPSolution, StandardLP, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProgramKind {
    MinMaxL1,
    MinLinfSubjectL1,
    MinLinf,
    MinLinear,
}

#[derive(Clone, Debug)]
pub struct MeasureProgram<T> {
    pub kind: ProgramKind,
    pub a: Matrix<T>,
    pub p: Vec<T>,
    pub m_terms: Vec<Matrix<T>>,
    pub n_term: Option<Matrix<T>>,
    pub weights: Option<Vec<T>>,
    pub budget: Option<T>,
}

/// Dual certificate in the simplified variables of the program shape.
#[derive(Clone, Debug, PartialEq)]
pub struct DualWitness<T> {
    /// One entry per row of the original `A`; rows dropped as redundant carry zero.
    pub z: Vec<T>,
    pub u: T,
    /// ℓ∞ multipliers, empty for programs without an ℓ∞ objective.
    pub x: Vec<T>,
    pub y: Vec<Vec<T>>,
    pub w: Vec<T>,
    /// Multiplier of the ℓ1 budget.
    pub v: T,
}

impl<T: Scalar> DualWitness<T> {
    /// `⟨p, z⟩ + u - c v`
    pub fn objective(&self, p: &[T], budget: Option<&T>) -> T {
        let mut val = dot(p, &self.z) + self.u.clone();
        if let Some(c) = budget {
            val -= c.clone() * self.v.clone();
        }
        val
    }

    /// Largest violation of the simplified dual constraints
    /// `Aᵀz + u1 ≤ Σ Mᵢᵀyᵢ + Nᵀx`, `|yᵢ| ≤ wᵢ`, `Σwᵢ ≤ v` (or `≤ 1`), `‖x‖₁ ≤ 1`.
    pub fn violation(&self, a: &Matrix<T>, ms: &[Matrix<T>], n: Option<&Matrix<T>>, has_budget: bool) -> f64 {
        let mut worst: f64 = 0.0;
        let mut lhs = a.vec_mul(&self.z);
        for l in lhs.iter_mut() {
            *l += self.u.clone();
        }
        let mut rhs = vec![T::zero(); a.cols()];
        for (m, y) in ms.iter().zip(&self.y) {
            for (r, v) in rhs.iter_mut().zip(m.vec_mul(y)) {
                *r += v;
            }
        }
        if let Some(n) = n {
            for (r, v) in rhs.iter_mut().zip(n.vec_mul(&self.x)) {
                *r += v;
            }
            let l1: f64 = self.x.iter().map(|v| v.to_f64().abs()).sum();
            worst = worst.max(l1 - 1.0);
        }
        for (l, r) in lhs.iter().zip(&rhs) {
            worst = worst.max((l.clone() - r.clone()).to_f64());
        }
        for (y, w) in self.y.iter().zip(&self.w) {
            for yi in y {
                worst = worst.max(yi.to_f64().abs() - w.to_f64());
            }
            worst = worst.max(-w.to_f64());
        }
        if !self.y.is_empty() {
            let cap = if has_budget { self.v.to_f64() } else { 1.0 };
            worst = worst.max(sum(&self.w).to_f64() - cap);
        }
        worst
    }
}

#[derive(Clone, Debug)]
pub struct ProgramSolution<T> {
    pub kind: ProgramKind,
    pub status: Status,
    pub value: Option<T>,
    /// Optimal hidden-variable distribution.
    pub q: Vec<T>,
    pub witness: Option<DualWitness<T>>,
    /// `⟨c, ξ⟩ - ⟨ζ, b⟩` for the solved standard form.
    pub gap: Option<T>,
    /// Whether the returned `ζ` satisfies the standard dual system.
    pub dual_feasible: bool,
    pub lp: LPSolution<T>,
}

impl<T: Scalar> ProgramSolution<T> {
    fn infeasible(kind: ProgramKind) -> Self {
        ProgramSolution {
            kind,
            status: Status::Infeasible,
            value: None,
            q: Vec::new(),
            witness: None,
            gap: None,
            dual_feasible: false,
            lp: LPSolution {
                status: Status::Infeasible,
                value: None,
                primal_point: Vec::new(),
                dual_point: Vec::new(),
                mode: T::MODE,
                diagnostics: vec!["the equality system A q = p is inconsistent".into()],
            },
        }
    }
}

fn hstack_row<T: Scalar>(parts: &[(&[T], usize)], width: usize) -> Vec<T> {
    let mut row = vec![T::zero(); width];
    for (vals, off) in parts {
        for (k, v) in vals.iter().enumerate() {
            row[off + k] = v.clone();
        }
    }
    row
}

fn check_dims<T: Scalar>(a: &Matrix<T>, p: &[T], ms: &[Matrix<T>], n: Option<&Matrix<T>>) -> Result<()> {
    if a.rows() != p.len() {
        return Err(Error::Dimension(format!("A has {} rows, p has {} entries", a.rows(), p.len())));
    }
    let k0 = ms.first().map(|m| m.rows());
    for m in ms {
        if m.cols() != a.cols() {
            return Err(Error::Dimension("measure matrix column count differs from A".into()));
        }
        if Some(m.rows()) != k0 {
            return Err(Error::Dimension("all measure matrices must share a row count".into()));
        }
    }
    if let Some(n) = n {
        if n.cols() != a.cols() {
            return Err(Error::Dimension("ℓ∞ matrix column count differs from A".into()));
        }
    }
    Ok(())
}

/// Standard form of the min-max ℓ1 program with `ξ = v ⊕ t_1 ⊕ … ⊕ t_L ⊕ q`
/// and `(L + 2Lk + 2m + 2) x (1 + Lk + n)` block matrix `Φ`.
pub fn max_l1_lp<T: Scalar>(a: &Matrix<T>, p: &[T], ms: &[Matrix<T>]) -> Result<StandardLP<T>> {
    check_dims(a, p, ms, None)?;
    let (m, n) = (a.rows(), a.cols());
    let l = ms.len();
    let k = ms.first().map(|x| x.rows()).unwrap_or(0);
    let width = 1 + l * k + n;
    let qoff = 1 + l * k;
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(l + 2 * l * k + 2 * m + 2);
    let mut b = Vec::with_capacity(l + 2 * l * k + 2 * m + 2);
    for i in 0..l {
        let mut row = vec![T::zero(); width];
        row[0] = T::one();
        for r in 0..k {
            row[1 + i * k + r] = -T::one();
        }
        rows.push(row);
        b.push(T::zero());
    }
    for (i, mi) in ms.iter().enumerate() {
        for sign in [1i64, -1] {
            for r in 0..k {
                let mut row = vec![T::zero(); width];
                row[1 + i * k + r] = T::one();
                for c in 0..n {
                    let v = &mi[(r, c)];
                    if !v.is_zero_val() {
                        row[qoff + c] = if sign > 0 { v.clone() } else { -v.clone() };
                    }
                }
                rows.push(row);
                b.push(T::zero());
            }
        }
    }
    for sign in [1i64, -1] {
        for r in 0..m {
            let vals: Vec<T> = a.row(r).iter().map(|v| if sign > 0 { v.clone() } else { -v.clone() }).collect();
            rows.push(hstack_row(&[(&vals, qoff)], width));
            b.push(if sign > 0 { p[r].clone() } else { -p[r].clone() });
        }
    }
    for sign in [1i64, -1] {
        rows.push(hstack_row(&[(&vec![T::from_int(sign); n], qoff)], width));
        b.push(T::from_int(sign));
    }
    let mut c = vec![T::zero(); width];
    c[0] = T::one();
    StandardLP::new(c, b, Matrix::from_rows(rows, width))
}

/// Maps a standard dual point of [`max_l1_lp`] to `(w, y, z, u)`.
pub fn max_l1_witness<T: Scalar>(zeta: &[T], l: usize, k: usize, m: usize) -> DualWitness<T> {
    let w = zeta[..l].to_vec();
    let mut y = Vec::with_capacity(l);
    for i in 0..l {
        let base = l + 2 * i * k;
        y.push((0..k).map(|r| zeta[base + k + r].clone() - zeta[base + r].clone()).collect());
    }
    let zoff = l + 2 * l * k;
    let z = (0..m).map(|r| zeta[zoff + r].clone() - zeta[zoff + m + r].clone()).collect();
    let u = zeta[zoff + 2 * m].clone() - zeta[zoff + 2 * m + 1].clone();
    DualWitness { z, u, x: Vec::new(), y, w, v: T::zero() }
}

/// Standard form of the ℓ∞ program under an ℓ1 budget `c`.
/// `ξ̃ = ṽ ⊕ v ⊕ t_1 ⊕ … ⊕ t_L ⊕ q`.
pub fn budgeted_linf_lp<T: Scalar>(
    a: &Matrix<T>,
    p: &[T],
    n_mat: &Matrix<T>,
    ms: &[Matrix<T>],
    budget: &T,
) -> Result<StandardLP<T>> {
    check_dims(a, p, ms, Some(n_mat))?;
    let inner = max_l1_lp(a, p, ms)?;
    let l_rows = n_mat.rows();
    let width = 1 + inner.phi.cols();
    let qoff = width - a.cols();
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for sign in [1i64, -1] {
        for r in 0..l_rows {
            let vals: Vec<T> = n_mat.row(r).iter().map(|v| if sign > 0 { v.clone() } else { -v.clone() }).collect();
            let mut row = hstack_row(&[(&vals, qoff)], width);
            row[0] = T::one();
            rows.push(row);
            b.push(T::zero());
        }
    }
    let mut row = vec![T::zero(); width];
    row[1] = -T::one();
    rows.push(row);
    b.push(-budget.clone());
    for r in 0..inner.phi.rows() {
        let mut row = vec![T::zero(); width];
        row[1..].clone_from_slice(inner.phi.row(r));
        rows.push(row);
        b.push(inner.b[r].clone());
    }
    let mut c = vec![T::zero(); width];
    c[0] = T::one();
    StandardLP::new(c, b, Matrix::from_rows(rows, width))
}

/// Maps a standard dual point of [`budgeted_linf_lp`] to the simplified variables.
pub fn budgeted_linf_witness<T: Scalar>(zeta: &[T], l_rows: usize, l: usize, k: usize, m: usize) -> DualWitness<T> {
    let x = (0..l_rows).map(|r| zeta[l_rows + r].clone() - zeta[r].clone()).collect();
    let v = zeta[2 * l_rows].clone();
    let mut w = max_l1_witness(&zeta[2 * l_rows + 1..], l, k, m);
    w.x = x;
    w.v = v;
    w
}

/// Standard form of the ℓ∞ program without a budget, `ξ = ṽ ⊕ q`. When
/// `N ≥ 0` the lower bound `-ṽ1 ≤ Nq` is implied by `q ≥ 0` and omitted.
pub fn linf_lp<T: Scalar>(a: &Matrix<T>, p: &[T], n_mat: &Matrix<T>, normalized: bool) -> Result<StandardLP<T>> {
    check_dims(a, p, &[], Some(n_mat))?;
    let n = a.cols();
    let width = 1 + n;
    let mut rows = Vec::new();
    let mut b = Vec::new();
    let signs: &[i64] = if n_mat.is_nonnegative() { &[-1] } else { &[-1, 1] };
    for &sign in signs {
        for r in 0..n_mat.rows() {
            let vals: Vec<T> = n_mat.row(r).iter().map(|v| if sign > 0 { v.clone() } else { -v.clone() }).collect();
            let mut row = hstack_row(&[(&vals, 1)], width);
            row[0] = T::one();
            rows.push(row);
            b.push(T::zero());
        }
    }
    for sign in [1i64, -1] {
        for r in 0..a.rows() {
            let vals: Vec<T> = a.row(r).iter().map(|v| if sign > 0 { v.clone() } else { -v.clone() }).collect();
            rows.push(hstack_row(&[(&vals, 1)], width));
            b.push(if sign > 0 { p[r].clone() } else { -p[r].clone() });
        }
    }
    if normalized {
        for sign in [1i64, -1] {
            rows.push(hstack_row(&[(&vec![T::from_int(sign); n], 1)], width));
            b.push(T::from_int(sign));
        }
    }
    let mut c = vec![T::zero(); width];
    c[0] = T::one();
    StandardLP::new(c, b, Matrix::from_rows(rows, width))
}

fn linf_witness<T: Scalar>(zeta: &[T], l_rows: usize, both: bool, m: usize, normalized: bool) -> DualWitness<T> {
    let x: Vec<T> = (0..l_rows)
        .map(|r| {
            let plus = zeta[r].clone();
            if both {
                plus - zeta[l_rows + r].clone()
            } else {
                plus
            }
        })
        .collect();
    let zoff = if both { 2 * l_rows } else { l_rows };
    let z = (0..m).map(|r| zeta[zoff + r].clone() - zeta[zoff + m + r].clone()).collect();
    let u = if normalized { zeta[zoff + 2 * m].clone() - zeta[zoff + 2 * m + 1].clone() } else { T::zero() };
    DualWitness { z, u, x, y: Vec::new(), w: Vec::new(), v: T::zero() }
}

/// Standard form of `min ⟨v, q⟩` over stochastic `q` with `A q = p`.
pub fn linear_lp<T: Scalar>(a: &Matrix<T>, p: &[T], v: &[T]) -> Result<StandardLP<T>> {
    check_dims(a, p, &[], None)?;
    if v.len() != a.cols() {
        return Err(Error::Dimension("weight vector length differs from A's column count".into()));
    }
    let n = a.cols();
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for sign in [1i64, -1] {
        for r in 0..a.rows() {
            rows.push(a.row(r).iter().map(|x| if sign > 0 { x.clone() } else { -x.clone() }).collect());
            b.push(if sign > 0 { p[r].clone() } else { -p[r].clone() });
        }
    }
    for sign in [1i64, -1] {
        rows.push(vec![T::from_int(sign); n]);
        b.push(T::from_int(sign));
    }
    StandardLP::new(v.to_vec(), b, Matrix::from_rows(rows, n))
}

/// Drops rows of `A q = p` that depend on later rows. `None` means the
/// system is inconsistent.
pub fn reduce_constraints<T: Scalar>(a: &Matrix<T>, p: &[T]) -> Option<(Matrix<T>, Vec<T>, Vec<usize>)> {
    match independent_rows_reverse(a, Some(p)) {
        RowReduction::Inconsistent(_) => None,
        RowReduction::Independent(keep) => {
            let pa = keep.iter().map(|&i| p[i].clone()).collect();
            Some((a.select_rows(&keep), pa, keep))
        }
    }
}

fn expand_z<T: Scalar>(z: Vec<T>, keep: &[usize], m: usize) -> Vec<T> {
    let mut full = vec![T::zero(); m];
    for (v, &i) in z.into_iter().zip(keep) {
        full[i] = v;
    }
    full
}

fn package<T: Scalar>(
    kind: ProgramKind,
    lp: &StandardLP<T>,
    sol: LPSolution<T>,
    n: usize,
    witness: impl FnOnce(&[T]) -> DualWitness<T>,
) -> ProgramSolution<T> {
    if !sol.is_optimal() {
        return ProgramSolution {
            kind,
            status: sol.status,
            value: None,
            q: Vec::new(),
            witness: None,
            gap: None,
            dual_feasible: false,
            lp: sol,
        };
    }
    let q = sol.primal_point[sol.primal_point.len() - n..].to_vec();
    let gap = sol.duality_gap(lp);
    let dual_feasible = lp.is_dual_feasible(&sol.dual_point);
    ProgramSolution {
        kind,
        status: sol.status,
        value: sol.value.clone(),
        q,
        witness: Some(witness(&sol.dual_point)),
        gap,
        dual_feasible,
        lp: sol,
    }
}

/// `min_q max_i ‖M_i q‖₁` over stochastic `q` with `A q = p`.
pub fn minimize_max_l1<T: Scalar>(a: &Matrix<T>, p: &[T], ms: &[Matrix<T>]) -> Result<ProgramSolution<T>> {
    check_dims(a, p, ms, None)?;
    let kind = ProgramKind::MinMaxL1;
    let Some((ar, pr, keep)) = reduce_constraints(a, p) else { return Ok(ProgramSolution::infeasible(kind)) };
    let lp = max_l1_lp(&ar, &pr, ms)?;
    let sol = solve(&lp);
    let (l, k, m) = (ms.len(), ms.first().map(|x| x.rows()).unwrap_or(0), ar.rows());
    Ok(package(kind, &lp, sol, a.cols(), |zeta| {
        let mut w = max_l1_witness(zeta, l, k, m);
        w.z = expand_z(std::mem::take(&mut w.z), &keep, a.rows());
        w
    }))
}

/// `min_q ‖N q‖∞` over stochastic `q` with `A q = p`, optionally subject to
/// `max_i ‖M_i q‖₁ ≤ c`.
pub fn minimize_linf<T: Scalar>(
    a: &Matrix<T>,
    p: &[T],
    n_mat: &Matrix<T>,
    budget: Option<(&[Matrix<T>], T)>,
) -> Result<ProgramSolution<T>> {
    let ms = budget.as_ref().map(|(m, _)| *m).unwrap_or(&[]);
    check_dims(a, p, ms, Some(n_mat))?;
    let kind = if budget.is_some() { ProgramKind::MinLinfSubjectL1 } else { ProgramKind::MinLinf };
    let Some((ar, pr, keep)) = reduce_constraints(a, p) else { return Ok(ProgramSolution::infeasible(kind)) };
    let m_full = a.rows();
    match budget {
        Some((ms, c)) => {
            let lp = budgeted_linf_lp(&ar, &pr, n_mat, ms, &c)?;
            let sol = solve(&lp);
            let (l, k, m) = (ms.len(), ms.first().map(|x| x.rows()).unwrap_or(0), ar.rows());
            let lr = n_mat.rows();
            Ok(package(kind, &lp, sol, a.cols(), |zeta| {
                let mut w = budgeted_linf_witness(zeta, lr, l, k, m);
                w.z = expand_z(std::mem::take(&mut w.z), &keep, m_full);
                w
            }))
        }
        None => {
            let lp = linf_lp(&ar, &pr, n_mat, true)?;
            let sol = solve(&lp);
            let both = !n_mat.is_nonnegative();
            let (lr, m) = (n_mat.rows(), ar.rows());
            Ok(package(kind, &lp, sol, a.cols(), |zeta| {
                let mut w = linf_witness(zeta, lr, both, m, true);
                w.z = expand_z(std::mem::take(&mut w.z), &keep, m_full);
                w
            }))
        }
    }
}

/// `min_q ⟨v, q⟩` over stochastic `q` with `A q = p`.
pub fn minimize_linear<T: Scalar>(a: &Matrix<T>, p: &[T], v: &[T]) -> Result<ProgramSolution<T>> {
    check_dims(a, p, &[], None)?;
    let kind = ProgramKind::MinLinear;
    let Some((ar, pr, keep)) = reduce_constraints(a, p) else { return Ok(ProgramSolution::infeasible(kind)) };
    let lp = linear_lp(&ar, &pr, v)?;
    let sol = solve(&lp);
    let m = ar.rows();
    Ok(package(kind, &lp, sol, a.cols(), |zeta| DualWitness {
        z: expand_z((0..m).map(|r| zeta[r].clone() - zeta[m + r].clone()).collect(), &keep, a.rows()),
        u: zeta[2 * m].clone() - zeta[2 * m + 1].clone(),
        x: Vec::new(),
        y: Vec::new(),
        w: Vec::new(),
        v: T::zero(),
    }))
}

impl<T: Scalar> MeasureProgram<T> {
    pub fn solve(&self) -> Result<ProgramSolution<T>> {
        match self.kind {
            ProgramKind::MinMaxL1 => minimize_max_l1(&self.a, &self.p, &self.m_terms),
            ProgramKind::MinLinf => {
                let n = self.n_term.as_ref().ok_or_else(|| Error::Dimension("missing ℓ∞ matrix".into()))?;
                minimize_linf(&self.a, &self.p, n, None)
            }
            ProgramKind::MinLinfSubjectL1 => {
                let n = self.n_term.as_ref().ok_or_else(|| Error::Dimension("missing ℓ∞ matrix".into()))?;
                let c = self.budget.clone().ok_or_else(|| Error::Dimension("missing ℓ1 budget".into()))?;
                minimize_linf(&self.a, &self.p, n, Some((&self.m_terms, c)))
            }
            ProgramKind::MinLinear => {
                let v = self.weights.as_ref().ok_or_else(|| Error::Dimension("missing weights".into()))?;
                minimize_linear(&self.a, &self.p, v)
            }
        }
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
    fn max_l1_dimensions() {
        let a = Matrix::<Rational>::zeros(3, 5);
        let ms = vec![Matrix::zeros(4, 5), Matrix::zeros(4, 5)];
        let lp = max_l1_lp(&a, &[q(0), q(0), q(0)], &ms).unwrap();
        assert_eq!(lp.phi.rows(), 2 + 2 * 2 * 4 + 2 * 3 + 2);
        assert_eq!(lp.phi.cols(), 1 + 2 * 4 + 5);
    }

    #[test]
    fn l1_identity_pinned() {
        // A = I pins q = p; ‖q‖₁ = 1.
        let p = vec![Rational::new(1, 2), Rational::new(1, 3), Rational::new(1, 6)];
        let a = Matrix::identity(3);
        let sol = minimize_max_l1(&a, &p, &[Matrix::identity(3)]).unwrap();
        assert_eq!(sol.value, Some(q(1)));
        assert_eq!(sol.gap, Some(q(0)));
        let w = sol.witness.unwrap();
        assert_eq!(w.objective(&p, None), q(1));
        assert!(w.violation(&a, &[Matrix::identity(3)], None, false) <= 0.0);
    }

    #[test]
    fn inconsistent_system_is_infeasible() {
        let a = Matrix::from_rows(vec![vec![q(1), q(0)], vec![q(1), q(0)]], 2);
        let sol = minimize_linear(&a, &[q(1), q(0)], &[q(0), q(0)]).unwrap();
        assert_eq!(sol.status, Status::Infeasible);
    }

    #[test]
    fn zero_linf_objective() {
        let a = Matrix::from_rows(vec![vec![q(1), q(0)]], 2);
        let p = vec![Rational::new(1, 3)];
        let sol = minimize_linf(&a, &p, &Matrix::zeros(2, 2), None).unwrap();
        assert_eq!(sol.value, Some(q(0)));
    }

    #[test]
    fn budgeted_linf() {
        // q in simplex^3, N = [1 0 0], M = [[0,1,0]], budget ‖Mq‖₁ ≤ 1/4, A: q0 + q1 = 1/2.
        let a = Matrix::from_rows(vec![vec![q(1), q(1), q(0)]], 3);
        let p = vec![Rational::new(1, 2)];
        let n = Matrix::from_rows(vec![vec![q(1), q(0), q(0)]], 3);
        let m = Matrix::from_rows(vec![vec![q(0), q(1), q(0)]], 3);
        let sol = minimize_linf(&a, &p, &n, Some((&[m.clone()], Rational::new(1, 4)))).unwrap();
        assert_eq!(sol.value, Some(Rational::new(1, 4)));
        assert_eq!(sol.gap, Some(q(0)));
        let w = sol.witness.unwrap();
        assert_eq!(w.objective(&p, Some(&Rational::new(1, 4))), Rational::new(1, 4));
        assert!(w.violation(&a, &[m], Some(&n), true) <= 0.0);
    }
}
