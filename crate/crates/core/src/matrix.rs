//! Dense row-major matrices and the small amount of exact linear algebra
//! the programs need.

use std::fmt;

use crate::num::Scalar;

/// Tolerance used for rank decisions in float mode.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows; an empty list gives a `0 x cols` matrix.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Matrix { rows: n, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "mul_vec dimension");
        (0..self.rows).map(|r| crate::num::dot(self.row(r), x)).collect()
    }

    /// `xᵀ M`
    pub fn vec_mul(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows, "vec_mul dimension");
        let mut out = vec![T::zero(); self.cols];
        for (r, xr) in x.iter().enumerate() {
            if xr.is_zero_val() {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                let v = &self[(r, c)];
                if !v.is_zero_val() {
                    *o += xr.clone() * v.clone();
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "matrix product dimension");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero_val() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero_val() {
                        out[(r, c)] += a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix<T> {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix<T> {
        let mut m = Self::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            for (k, &c) in idx.iter().enumerate() {
                m[(r, k)] = self[(r, c)].clone();
            }
        }
        m
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.cols, "vstack column count");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn push_row(&mut self, row: Vec<T>) {
        assert_eq!(row.len(), self.cols, "push_row length");
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, s: &T) -> Matrix<T> {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn neg(&self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| x.sign_tol(0.0) >= 0)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

/// Incremental row-echelon basis used to test linear independence.
struct EchelonBasis<T> {
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Scalar> EchelonBasis<T> {
    fn new() -> Self {
        EchelonBasis { rows: Vec::new() }
    }

    /// Reduces `v` against the basis; returns the residual.
    fn reduce(&self, mut v: Vec<T>) -> Vec<T> {
        for (pc, b) in &self.rows {
            let f = v[*pc].clone();
            if f.is_zero_val() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b) {
                if !y.is_zero_val() {
                    x.sub_mul(&f, y);
                }
            }
            v[*pc] = T::zero();
        }
        v
    }

    /// Adds the residual if it is nonzero in the first `n` coordinates.
    fn insert(&mut self, v: Vec<T>, n: usize, scale: f64) -> bool {
        let mut r = self.reduce(v);
        let tol = RANK_TOL * scale.max(1.0);
        let pc = match (0..n).max_by(|&a, &b| {
            r[a].abs_val().partial_cmp(&r[b].abs_val()).unwrap_or(std::cmp::Ordering::Equal)
        }) {
            Some(p) if r[p].sign_tol(tol) != 0 => p,
            _ => return false,
        };
        // In exact mode any nonzero pivot works; pick the first for determinism.
        let pc = if T::is_exact() { (0..n).find(|&c| !r[c].is_zero_val()).unwrap_or(pc) } else { pc };
        let piv = r[pc].clone();
        for x in r.iter_mut() {
            if !x.is_zero_val() {
                *x = x.clone() / piv.clone();
            }
        }
        self.rows.push((pc, r));
        true
    }
}

/// Outcome of scanning an equality system `A q = p` for redundant rows.
#[derive(Clone, Debug, PartialEq)]
pub enum RowReduction {
    /// Indices of the kept rows, in their original order.
    Independent(Vec<usize>),
    /// Some redundant row disagrees with the rows it depends on.
    Inconsistent(usize),
}

fn max_abs<T: Scalar>(xs: &[T]) -> f64 {
    xs.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

/// Scans the rows of `[A | p]` from last to first, keeping a row only if it
/// is independent of the rows kept so far.
pub fn independent_rows_reverse<T: Scalar>(a: &Matrix<T>, p: Option<&[T]>) -> RowReduction {
    let n = a.cols();
    let scale = max_abs(a.data());
    let mut basis = EchelonBasis::new();
    let mut kept = Vec::new();
    for r in (0..a.rows()).rev() {
        let mut v = a.row(r).to_vec();
        if let Some(p) = p {
            v.push(p[r].clone());
        }
        if basis.insert(v.clone(), n, scale) {
            kept.push(r);
        } else if p.is_some() {
            let res = basis.reduce(v);
            let pscale = scale.max(max_abs(p.unwrap()));
            if res[n].sign_tol(RANK_TOL * pscale.max(1.0)) != 0 {
                return RowReduction::Inconsistent(r);
            }
        }
    }
    kept.reverse();
    RowReduction::Independent(kept)
}

pub fn rank<T: Scalar>(a: &Matrix<T>) -> usize {
    match independent_rows_reverse(a, None) {
        RowReduction::Independent(k) => k.len(),
        RowReduction::Inconsistent(_) => unreachable!(),
    }
}

/// Whether `v` lies in the row space of `a`.
pub fn in_row_space<T: Scalar>(a: &Matrix<T>, v: &[T]) -> bool {
    let scale = max_abs(a.data()).max(max_abs(v));
    let mut basis = EchelonBasis::new();
    for r in 0..a.rows() {
        basis.insert(a.row(r).to_vec(), a.cols(), scale);
    }
    basis.reduce(v.to_vec()).iter().all(|x| x.sign_tol(RANK_TOL * scale.max(1.0)) == 0)
}

/// Affine parameterization of the solutions of `K x = r`: `x = x0 + B f`
/// where `f` ranges over the free coordinates.
#[derive(Clone, Debug)]
pub struct AffineSolution<T> {
    /// Free coordinates of `x`, in increasing order.
    pub free: Vec<usize>,
    /// Particular solution with all free coordinates set to zero.
    pub particular: Vec<T>,
    /// Column `j` gives the change of `x` per unit of `free[j]`.
    pub directions: Vec<Vec<T>>,
}

impl<T: Scalar> AffineSolution<T> {
    pub fn evaluate(&self, f: &[T]) -> Vec<T> {
        let mut x = self.particular.clone();
        for (d, fj) in self.directions.iter().zip(f) {
            for (xi, di) in x.iter_mut().zip(d) {
                if !di.is_zero_val() {
                    *xi += di.clone() * fj.clone();
                }
            }
        }
        x
    }
}

/// Solves `K x = r` choosing pivot columns from the last column backwards,
/// so the free coordinates are the earliest ones. Returns `None` if the
/// system is inconsistent.
pub fn solve_affine<T: Scalar>(k: &Matrix<T>, r: &[T]) -> Option<AffineSolution<T>> {
    let (m, n) = (k.rows(), k.cols());
    let scale = max_abs(k.data()).max(1.0);
    let tol = RANK_TOL * scale;
    let mut t: Vec<Vec<T>> = (0..m)
        .map(|i| {
            let mut row = k.row(i).to_vec();
            row.push(r[i].clone());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next_row = 0;
    for c in (0..n).rev() {
        if next_row == m {
            break;
        }
        let best = (next_row..m)
            .filter(|&i| t[i][c].sign_tol(tol) != 0)
            .max_by(|&a, &b| {
                t[a][c].abs_val().partial_cmp(&t[b][c].abs_val()).unwrap_or(std::cmp::Ordering::Equal)
            });
        let Some(pr) = best else { continue };
        t.swap(next_row, pr);
        let piv = t[next_row][c].clone();
        for x in t[next_row].iter_mut() {
            *x = x.clone() / piv.clone();
        }
        let prow = t[next_row].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == next_row {
                continue;
            }
            let f = row[c].clone();
            if f.is_zero_val() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&prow) {
                x.sub_mul(&f, y);
                x.chop();
            }
        }
        pivots.push((next_row, c));
        next_row += 1;
    }
    for row in t.iter().skip(next_row) {
        if row[n].sign_tol(tol) != 0 {
            return None;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let mut particular = vec![T::zero(); n];
    for &(row, c) in &pivots {
        particular[c] = t[row][n].clone();
    }
    let directions = free
        .iter()
        .map(|&f| {
            let mut d = vec![T::zero(); n];
            d[f] = T::one();
            for &(row, c) in &pivots {
                d[c] = -t[row][f].clone();
            }
            d
        })
        .collect();
    Some(AffineSolution { free, particular, directions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn reverse_scan_keeps_later_rows() {
        let a = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(1), q(0)], vec![q(0), q(1)]], 2);
        assert_eq!(independent_rows_reverse(&a, None), RowReduction::Independent(vec![1, 2]));
        let p = vec![q(3), q(1), q(1)];
        assert_eq!(independent_rows_reverse(&a, Some(&p)), RowReduction::Inconsistent(0));
        let p = vec![q(2), q(1), q(1)];
        assert_eq!(independent_rows_reverse(&a, Some(&p)), RowReduction::Independent(vec![1, 2]));
    }

    #[test]
    fn affine_solution_frees_early_columns() {
        // x0 + x1 = 1/2, x2 + x3 = 1/2, x0 + x2 = 1/2
        let k = Matrix::from_rows(
            vec![vec![q(1), q(1), q(0), q(0)], vec![q(0), q(0), q(1), q(1)], vec![q(1), q(0), q(1), q(0)]],
            4,
        );
        let h = Rational::new(1, 2);
        let sol = solve_affine(&k, &[h.clone(), h.clone(), h.clone()]).unwrap();
        assert_eq!(sol.free, vec![0]);
        let x = sol.evaluate(&[Rational::new(1, 5)]);
        assert_eq!(k.mul_vec(&x), vec![h.clone(), h.clone(), h]);
        assert_eq!(x[0], Rational::new(1, 5));
    }

    #[test]
    fn row_space_membership() {
        let a = Matrix::from_rows(vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]], 3);
        assert!(in_row_space(&a, &[1.0, 2.0, 1.0]));
        assert!(!in_row_space(&a, &[1.0, 0.0, 0.0]));
        assert_eq!(rank(&a), 2);
    }
}
