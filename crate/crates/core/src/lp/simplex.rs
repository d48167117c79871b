//! Two-phase dense tableau simplex over a general form
//! `min c·x` subject to rows with `≤`, `=` or `≥` and `x ≥ 0`.
//!
//! Both modes price with Devex reference weights (an approximation of
//! steepest edge, kept in `f64` even in exact mode). Ratio-test ties are
//! broken lexicographically on the rows of `B⁻¹`, which prevents stalling on
//! the highly degenerate ℓ1 programs. After a long run of degenerate pivots
//! the solver falls back to Bland's rule; every nondegenerate pivot strictly
//! improves the objective and Bland's rule ends any degenerate stretch, so
//! exact mode terminates.

use crate::matrix::Matrix;
use crate::num::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct GeneralLp<T> {
    pub c: Vec<T>,
    pub a: Matrix<T>,
    pub sense: Vec<RowSense>,
    pub rhs: Vec<T>,
}

#[derive(Clone, Debug)]
pub enum Outcome<T> {
    /// `y` holds one multiplier per row: `≥ 0` for `≥` rows, `≤ 0` for `≤` rows.
    Optimal { x: Vec<T>, y: Vec<T>, value: T },
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Float tolerances.
pub const PIVOT_TOL: f64 = 1e-9;
pub const COST_TOL: f64 = 1e-9;
pub const FEAS_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 2000;

struct Tableau<T> {
    m: usize,
    width: usize,
    t: Vec<T>,
    d: Vec<T>,
    basis: Vec<usize>,
    blocked: Vec<bool>,
    weights: Vec<f64>,
    scratch: Vec<usize>,
    /// Column holding `B⁻¹ e_i` for each original row, for lexicographic ties.
    unit_col: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.t[i * self.width + self.width - 1]
    }

    fn at(&self, i: usize, j: usize) -> &T {
        &self.t[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let piv = self.t[r * w + q].clone();
        self.scratch.clear();
        for j in 0..w {
            let v = &mut self.t[r * w + j];
            if !v.is_zero_val() {
                if j == q {
                    *v = T::one();
                } else {
                    *v = v.clone() / piv.clone();
                    v.chop();
                }
                if !v.is_zero_val() {
                    self.scratch.push(j);
                }
            }
        }
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        let nz = &self.scratch;
        let eliminate = |row: &mut [T]| {
            let f = row[q].clone();
            if f.is_zero_val() {
                return;
            }
            for &j in nz {
                row[j].sub_mul(&f, &prow[j]);
                row[j].chop();
            }
            row[q] = T::zero();
        };
        for row in before.chunks_mut(w) {
            eliminate(row);
        }
        for row in after.chunks_mut(w) {
            eliminate(row);
        }
        eliminate(&mut self.d);
        {
            let aq = piv.to_f64();
            let wq = self.weights[q].max(1.0);
            for &j in nz.iter() {
                if j == w - 1 || j == q {
                    continue;
                }
                let ratio = prow[j].to_f64();
                let cand = ratio * ratio * wq;
                if cand > self.weights[j] {
                    self.weights[j] = cand;
                }
            }
            let leaving = self.basis[r];
            self.weights[leaving] = (wq / (aq * aq)).max(1.0);
        }
        self.basis[r] = q;
    }

    fn choose_entering(&self, bland: bool) -> Option<usize> {
        let n = self.width - 1;
        if bland {
            return (0..n).find(|&j| !self.blocked[j] && self.d[j].sign_tol(COST_TOL) < 0);
        }
        let mut best = None;
        let mut best_score = 0.0;
        for j in 0..n {
            if self.blocked[j] || self.d[j].sign_tol(COST_TOL) >= 0 {
                continue;
            }
            let dj = self.d[j].to_f64();
            let score = dj * dj / self.weights[j].max(1e-12);
            if score > best_score {
                best_score = score;
                best = Some(j);
            }
        }
        best
    }

    /// `true` if row `i` beats row `b` on the lexicographic tie-break of
    /// `(B⁻¹)_row / a_row` for entering column `q`.
    fn lex_less(&self, i: usize, b: usize, q: usize) -> bool {
        let (ai, ab) = (self.at(i, q).clone(), self.at(b, q).clone());
        for &u in &self.unit_col {
            let l = self.at(i, u).clone() * ab.clone();
            let r = self.at(b, u).clone() * ai.clone();
            let d = (l - r).sign_tol(1e-12);
            if d != 0 {
                return d < 0;
            }
        }
        false
    }

    fn choose_leaving(&self, q: usize, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for i in 0..self.m {
            let a = self.at(i, q);
            if a.sign_tol(PIVOT_TOL) <= 0 {
                continue;
            }
            let ratio = self.rhs(i).clone() / a.clone();
            match &best {
                None => best = Some((i, ratio)),
                Some((bi, br)) => {
                    let diff = ratio.clone() - br.clone();
                    let tie_tol = if T::is_exact() { 0.0 } else { 1e-12 };
                    match diff.sign_tol(tie_tol) {
                        d if d < 0 => best = Some((i, ratio)),
                        0 => {
                            let better = if bland {
                                self.basis[i] < self.basis[*bi]
                            } else {
                                self.lex_less(i, *bi, q)
                            };
                            if better {
                                best = Some((i, ratio));
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    /// Runs simplex iterations on the current reduced costs.
    fn optimize(&mut self, max_iter: usize) -> Result<(), Outcome<T>> {
        let mut degenerate_run = 0usize;
        for _ in 0..max_iter {
            let bland = degenerate_run > DEGENERATE_RUN;
            let Some(q) = self.choose_entering(bland) else { return Ok(()) };
            let Some(r) = self.choose_leaving(q, bland) else { return Err(Outcome::Unbounded) };
            if self.rhs(r).sign_tol(FEAS_TOL) == 0 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, q);
        }
        Err(Outcome::IterationLimit)
    }
}

/// Solves the program. Rows are normalized to nonnegative right-hand sides;
/// `≤` rows start with a slack in the basis, the others with an artificial.
pub fn solve_general<T: Scalar>(lp: &GeneralLp<T>) -> Outcome<T> {
    let m = lp.a.rows();
    let n = lp.a.cols();
    assert_eq!(lp.c.len(), n);
    assert_eq!(lp.sense.len(), m);
    assert_eq!(lp.rhs.len(), m);

    // Normalized sense and sign per row.
    let mut sign = vec![1i64; m];
    let mut sense = lp.sense.clone();
    for i in 0..m {
        let s = lp.rhs[i].sign_tol(0.0);
        let flip = s < 0 || (s == 0 && sense[i] == RowSense::Ge);
        if flip {
            sign[i] = -1;
            sense[i] = match sense[i] {
                RowSense::Le => RowSense::Ge,
                RowSense::Ge => RowSense::Le,
                RowSense::Eq => RowSense::Eq,
            };
        }
    }

    // Column layout: structural, then one slack/surplus per inequality, then artificials.
    let mut slack_col = vec![usize::MAX; m];
    let mut art_col = vec![usize::MAX; m];
    let mut ncols = n;
    for i in 0..m {
        if sense[i] != RowSense::Eq {
            slack_col[i] = ncols;
            ncols += 1;
        }
    }
    let first_art = ncols;
    for i in 0..m {
        if sense[i] != RowSense::Le {
            art_col[i] = ncols;
            ncols += 1;
        }
    }
    let width = ncols + 1;
    let mut t = vec![T::zero(); m * width];
    let mut basis = vec![0usize; m];
    for i in 0..m {
        let s = T::from_int(sign[i]);
        let row = &mut t[i * width..(i + 1) * width];
        for j in 0..n {
            let v = &lp.a[(i, j)];
            if !v.is_zero_val() {
                row[j] = if sign[i] < 0 { -v.clone() } else { v.clone() };
            }
        }
        row[width - 1] = lp.rhs[i].clone() * s;
        match sense[i] {
            RowSense::Le => {
                row[slack_col[i]] = T::one();
                basis[i] = slack_col[i];
            }
            RowSense::Ge => {
                row[slack_col[i]] = -T::one();
                row[art_col[i]] = T::one();
                basis[i] = art_col[i];
            }
            RowSense::Eq => {
                row[art_col[i]] = T::one();
                basis[i] = art_col[i];
            }
        }
    }
    // The column carrying B^{-1} e_i for row i.
    let unit_col: Vec<usize> =
        (0..m).map(|i| if sense[i] == RowSense::Le { slack_col[i] } else { art_col[i] }).collect();

    let mut tab = Tableau {
        m,
        width,
        t,
        d: vec![T::zero(); width],
        basis,
        blocked: vec![false; ncols],
        weights: vec![1.0; ncols],
        scratch: Vec::new(),
        unit_col: unit_col.clone(),
    };
    let max_iter = 50 * (m + ncols) + 1000;

    // Phase 1.
    let has_art = first_art < ncols;
    if has_art {
        for i in 0..m {
            if tab.basis[i] >= first_art {
                for j in 0..width {
                    if j >= first_art && j < ncols {
                        continue;
                    }
                    let v = tab.t[i * width + j].clone();
                    if !v.is_zero_val() {
                        tab.d[j] -= v;
                    }
                }
            }
        }
        if let Err(e) = tab.optimize(max_iter) {
            return match e {
                Outcome::Unbounded => Outcome::Infeasible,
                other => other,
            };
        }
        let infeas = -tab.d[width - 1].clone();
        let scale = lp.rhs.iter().map(|x| x.to_f64().abs()).fold(1.0, f64::max);
        if infeas.sign_tol(FEAS_TOL * scale) > 0 {
            return Outcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] < first_art {
                continue;
            }
            let mut best: Option<usize> = None;
            for j in 0..first_art {
                let v = tab.at(i, j);
                if v.sign_tol(PIVOT_TOL) == 0 {
                    continue;
                }
                match best {
                    None => best = Some(j),
                    Some(b) if !T::is_exact() && v.to_f64().abs() > tab.at(i, b).to_f64().abs() => best = Some(j),
                    _ => {}
                }
            }
            if let Some(j) = best {
                tab.pivot(i, j);
            }
        }
        for j in first_art..ncols {
            tab.blocked[j] = true;
        }
    }

    // Phase 2 reduced costs.
    let cost = |j: usize| -> T {
        if j < n {
            lp.c[j].clone()
        } else {
            T::zero()
        }
    };
    let mut d = vec![T::zero(); width];
    for (j, dj) in d.iter_mut().enumerate().take(ncols) {
        *dj = cost(j);
    }
    for i in 0..m {
        let cb = cost(tab.basis[i]);
        if cb.is_zero_val() {
            continue;
        }
        for (j, dj) in d.iter_mut().enumerate() {
            let v = &tab.t[i * width + j];
            if !v.is_zero_val() {
                dj.sub_mul(&cb, v);
            }
        }
    }
    for i in 0..m {
        d[tab.basis[i]] = T::zero();
    }
    tab.d = d;
    tab.weights.iter_mut().for_each(|w| *w = 1.0);
    if let Err(e) = tab.optimize(max_iter) {
        return e;
    }

    let mut x = vec![T::zero(); n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs(i).clone();
        }
    }
    let y: Vec<T> = (0..m)
        .map(|i| {
            let yi = -tab.d[unit_col[i]].clone();
            if sign[i] < 0 {
                -yi
            } else {
                yi
            }
        })
        .collect();
    let value = crate::num::dot(&lp.c, &x);
    Outcome::Optimal { x, y, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn small_mixed_program() {
        // min x0 + 2 x1  s.t.  x0 + x1 >= 2,  x0 - x1 = 0,  x0 <= 5
        let lp = GeneralLp {
            c: vec![q(1), q(2)],
            a: Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(1), q(-1)], vec![q(1), q(0)]], 2),
            sense: vec![RowSense::Ge, RowSense::Eq, RowSense::Le],
            rhs: vec![q(2), q(0), q(5)],
        };
        match solve_general(&lp) {
            Outcome::Optimal { x, y, value } => {
                assert_eq!(value, q(3));
                assert_eq!(x, vec![q(1), q(1)]);
                // dual objective equals primal
                let dual: Rational = y.iter().zip(&lp.rhs).fold(q(0), |s, (a, b)| s + a.clone() * b.clone());
                assert_eq!(dual, q(3));
                assert!(y[0] >= q(0));
                assert!(y[2] <= q(0));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let lp = GeneralLp {
            c: vec![q(1)],
            a: Matrix::from_rows(vec![vec![q(1)], vec![q(1)]], 1),
            sense: vec![RowSense::Ge, RowSense::Le],
            rhs: vec![q(3), q(2)],
        };
        assert!(matches!(solve_general(&lp), Outcome::Infeasible));
        let lp = GeneralLp {
            c: vec![q(-1)],
            a: Matrix::from_rows(vec![vec![q(1)]], 1),
            sense: vec![RowSense::Ge],
            rhs: vec![q(3)],
        };
        assert!(matches!(solve_general(&lp), Outcome::Unbounded));
    }

    #[test]
    fn redundant_equalities() {
        // x0 + x1 = 1 twice, min -x0
        let lp = GeneralLp {
            c: vec![-1.0, 0.0],
            a: Matrix::from_rows(vec![vec![1.0, 1.0], vec![2.0, 2.0]], 2),
            sense: vec![RowSense::Eq, RowSense::Eq],
            rhs: vec![1.0, 2.0],
        };
        match solve_general(&lp) {
            Outcome::Optimal { value, .. } => assert!((value + 1.0).abs() < 1e-12),
            o => panic!("{o:?}"),
        }
    }
}
