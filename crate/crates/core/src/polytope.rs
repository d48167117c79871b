//! Vertex enumeration of dual feasible regions and the closed-form maxima
//! they induce.
//!
//! Enumeration uses the double-description method in exact arithmetic on
//! the homogenized cone `{(t, y) : t b - A y ≥ 0, t ≥ 0}`. Generators with
//! `t > 0` are vertices and generators with `t = 0` are rays; rays are
//! reported but never enter a maximum.

use std::collections::BTreeSet;
use std::io::Write;

use crate::error::{Error, Result};
use crate::lp::simplex::{solve_general, GeneralLp, Outcome, RowSense};
use crate::matrix::{independent_rows_reverse, Matrix, RowReduction};
use crate::num::{dot, Rational, Scalar};

fn zero() -> Rational {
    Rational::from_integer(0)
}

fn one() -> Rational {
    Rational::from_integer(1)
}

/// Default cap on the dimension of an enumerated region.
pub const DEFAULT_DIMENSION_CAP: usize = 30;
/// Cap on intermediate generators during enumeration.
pub const GENERATOR_CAP: usize = 2_000_000;

/// `{y : A y ≤ b}`
#[derive(Clone, Debug, PartialEq)]
pub struct Polyhedron {
    pub a: Matrix<Rational>,
    pub b: Vec<Rational>,
}

impl Polyhedron {
    pub fn new(a: Matrix<Rational>, b: Vec<Rational>) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::Dimension(format!("{} rows and {} bounds", a.rows(), b.len())));
        }
        Ok(Polyhedron { a, b })
    }

    /// `{ζ : Φᵀζ ≤ c, ζ ≥ 0}` given `Φᵀ` and `c`.
    pub fn dual_region(phi_t: &Matrix<Rational>, c: &[Rational]) -> Result<Self> {
        let m = phi_t.cols();
        let a = phi_t.vstack(&Matrix::<Rational>::identity(m).neg());
        let mut b = c.to_vec();
        b.extend(std::iter::repeat(zero()).take(m));
        Self::new(a, b)
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn contains(&self, y: &[Rational]) -> bool {
        self.a.mul_vec(y).iter().zip(&self.b).all(|(l, r)| l <= r)
    }

    /// Rows holding with equality at `y`.
    pub fn active_rows(&self, y: &[Rational]) -> Vec<usize> {
        self.a.mul_vec(y).iter().zip(&self.b).enumerate().filter(|(_, (l, r))| l == r).map(|(i, _)| i).collect()
    }
}

#[derive(Clone, Debug)]
pub struct VertexSet {
    pub dim: usize,
    /// Sorted lexicographically, without duplicates.
    pub vertices: Vec<Vec<Rational>>,
    /// Extreme rays of the recession cone, excluded from every maximum.
    pub rays: Vec<Vec<Rational>>,
    pub discarded_ray_count: usize,
    pub region: Polyhedron,
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn contains_all(&self, sub: &Bits) -> bool {
        self.0.iter().zip(&sub.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    v: Vec<Rational>,
    zero: Bits,
}

fn normalize(v: &mut [Rational]) {
    if let Some(first) = v.iter().find(|x| x.signum() != 0).map(|x| x.abs()) {
        for x in v.iter_mut() {
            if x.signum() != 0 {
                *x = &*x / &first;
            }
        }
    }
}

fn combine(sa: &Rational, a: &[Rational], sb: &Rational, b: &[Rational]) -> Vec<Rational> {
    // sa * a - sb * b
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut r = zero();
            if x.signum() != 0 {
                r = sa * x;
            }
            if y.signum() != 0 {
                r = &r - &(sb * y);
            }
            r
        })
        .collect()
}

/// Enumerates vertices and extreme rays of a pointed polyhedron `{y : A y ≤ b}`.
pub fn enumerate_vertices(poly: &Polyhedron) -> Result<VertexSet> {
    enumerate_vertices_capped(poly, DEFAULT_DIMENSION_CAP)
}

pub fn enumerate_vertices_capped(poly: &Polyhedron, max_dim: usize) -> Result<VertexSet> {
    let d = poly.dim();
    if d > max_dim {
        return Err(Error::Capacity(format!("region dimension {d} exceeds the cap of {max_dim}")));
    }
    let hd = d + 1;
    let mut cons: Vec<Vec<Rational>> = Vec::with_capacity(poly.a.rows() + 1);
    let mut t0 = vec![zero(); hd];
    t0[0] = one();
    cons.push(t0);
    for i in 0..poly.a.rows() {
        let mut h = Vec::with_capacity(hd);
        h.push(poly.b[i].clone());
        h.extend(poly.a.row(i).iter().map(|x| -x.clone()));
        cons.push(h);
    }
    let nc = cons.len();
    let mut lines: Vec<Vec<Rational>> = (0..hd)
        .map(|k| {
            let mut e = vec![zero(); hd];
            e[k] = one();
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (ci, h) in cons.iter().enumerate() {
        let line_vals: Vec<Rational> = lines.iter().map(|l| dot(h, l)).collect();
        if let Some(pos) = line_vals.iter().position(|v| v.signum() != 0) {
            let mut lstar = lines.remove(pos);
            let mut sstar = line_vals[pos].clone();
            if sstar.signum() < 0 {
                lstar.iter_mut().for_each(|x| *x = -x.clone());
                sstar = -sstar;
            }
            let others: Vec<Rational> =
                line_vals.iter().enumerate().filter(|&(k, _)| k != pos).map(|(_, v)| v.clone()).collect();
            for (l, sl) in lines.iter_mut().zip(others) {
                if sl.signum() != 0 {
                    *l = combine(&sstar, l, &sl, &lstar);
                    normalize(l);
                }
            }
            for r in rays.iter_mut() {
                let sr = dot(h, &r.v);
                if sr.signum() != 0 {
                    r.v = combine(&sstar, &r.v, &sr, &lstar);
                    normalize(&mut r.v);
                }
                r.zero.set(ci);
            }
            let mut zero = Bits::new(nc);
            for k in 0..ci {
                zero.set(k);
            }
            normalize(&mut lstar);
            rays.push(Ray { v: lstar, zero });
            continue;
        }
        let vals: Vec<i32> = rays.iter().map(|r| dot(h, &r.v).signum()).collect();
        let raw: Vec<Rational> = rays.iter().map(|r| dot(h, &r.v)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] > 0).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < 0).collect();
        if minus.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if vals[k] == 0 {
                    r.zero.set(ci);
                }
            }
            continue;
        }
        let cone_dim = hd - lines.len();
        let need = cone_dim.saturating_sub(2) as u32;
        let mut new_rays = Vec::new();
        for &pi in &plus {
            for &ni in &minus {
                let common = rays[pi].zero.and(&rays[ni].zero);
                if common.count() < need {
                    continue;
                }
                let adjacent = (0..rays.len()).all(|k| k == pi || k == ni || !rays[k].zero.contains_all(&common));
                if !adjacent {
                    continue;
                }
                // (h·p) n - (h·n) p lies on the hyperplane.
                let mut v = combine(&raw[pi], &rays[ni].v, &raw[ni], &rays[pi].v);
                normalize(&mut v);
                let mut zero = common;
                zero.set(ci);
                new_rays.push(Ray { v, zero });
            }
        }
        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + new_rays.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            match vals[k] {
                0 => {
                    r.zero.set(ci);
                    kept.push(r);
                }
                1 => kept.push(r),
                _ => {}
            }
        }
        kept.extend(new_rays);
        if kept.len() > GENERATOR_CAP {
            return Err(Error::Capacity(format!("more than {GENERATOR_CAP} intermediate generators")));
        }
        rays = kept;
    }
    if !lines.is_empty() {
        return Err(Error::Unsupported(format!(
            "the region contains a {}-dimensional linear subspace and has no vertices",
            lines.len()
        )));
    }
    let mut verts = BTreeSet::new();
    let mut ray_set = BTreeSet::new();
    for r in rays {
        let t = r.v[0].clone();
        if t.signum() > 0 {
            verts.insert(r.v[1..].iter().map(|x| x / &t).collect::<Vec<_>>());
        } else {
            let mut y = r.v[1..].to_vec();
            normalize(&mut y);
            ray_set.insert(y);
        }
    }
    let rays: Vec<Vec<Rational>> = ray_set.into_iter().collect();
    Ok(VertexSet {
        dim: d,
        vertices: verts.into_iter().collect(),
        discarded_ray_count: rays.len(),
        rays,
        region: poly.clone(),
    })
}

/// Vertices of `{ζ : Φᵀζ ≤ c, ζ ≥ 0}`.
pub fn enumerate_dual_vertices(phi_t: &Matrix<Rational>, c: &[Rational]) -> Result<VertexSet> {
    if phi_t.rows() != c.len() {
        return Err(Error::Dimension("Φᵀ row count differs from c".into()));
    }
    enumerate_vertices(&Polyhedron::dual_region(phi_t, c)?)
}

/// Whether `target` is a convex combination of `points` plus a conic
/// combination of `dirs`.
fn in_conv_cone(points: &[&Vec<Rational>], dirs: &[Vec<Rational>], target: &[Rational]) -> bool {
    let dim = target.len();
    let ncols = points.len() + dirs.len();
    if points.is_empty() {
        return false;
    }
    let mut rows = Vec::with_capacity(dim + 1);
    for k in 0..dim {
        let mut row: Vec<Rational> = points.iter().map(|p| p[k].clone()).collect();
        row.extend(dirs.iter().map(|d| d[k].clone()));
        rows.push(row);
    }
    let mut sum_row = vec![one(); points.len()];
    sum_row.extend(std::iter::repeat(zero()).take(dirs.len()));
    rows.push(sum_row);
    let mut rhs = target.to_vec();
    rhs.push(one());
    let lp = GeneralLp {
        c: vec![zero(); ncols],
        a: Matrix::from_rows(rows, ncols),
        sense: vec![RowSense::Eq; dim + 1],
        rhs,
    };
    matches!(solve_general(&lp), Outcome::Optimal { .. })
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Distinct images of the vertices under the coordinate projection
    /// `coords`, including images that are not extreme in the projected set.
    pub fn vertex_images(&self, coords: &[usize]) -> Vec<Vec<Rational>> {
        let pick = |v: &Vec<Rational>| coords.iter().map(|&c| v[c].clone()).collect::<Vec<_>>();
        self.vertices.iter().map(pick).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Vertices of the image under the coordinate projection `coords`.
    /// Images that are not extreme in the projected set are dropped.
    pub fn project(&self, coords: &[usize]) -> VertexSet {
        let pick = |v: &Vec<Rational>| coords.iter().map(|&c| v[c].clone()).collect::<Vec<_>>();
        let cand: Vec<Vec<Rational>> = self.vertices.iter().map(pick).collect::<BTreeSet<_>>().into_iter().collect();
        let mut dirs: BTreeSet<Vec<Rational>> = BTreeSet::new();
        for r in &self.rays {
            let mut y = pick(r);
            if y.iter().any(|x| x.signum() != 0) {
                normalize(&mut y);
                dirs.insert(y);
            }
        }
        let dirs: Vec<Vec<Rational>> = dirs.into_iter().collect();
        let extreme: Vec<Vec<Rational>> = (0..cand.len())
            .filter(|&i| {
                let others: Vec<&Vec<Rational>> =
                    cand.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).collect();
                !in_conv_cone(&others, &dirs, &cand[i])
            })
            .map(|i| cand[i].clone())
            .collect();
        VertexSet {
            dim: coords.len(),
            vertices: extreme,
            discarded_ray_count: dirs.len(),
            rays: dirs,
            region: self.region.clone(),
        }
    }

    /// Writes the vertices as CSV with a numerator and a denominator column
    /// per coordinate.
    pub fn write_csv<W: Write>(&self, labels: &[String], out: W) -> Result<()> {
        if labels.len() != self.dim {
            return Err(Error::Dimension(format!("{} labels for {} coordinates", labels.len(), self.dim)));
        }
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<String> = labels.iter().flat_map(|l| [format!("{l}_num"), format!("{l}_den")]).collect();
        w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
        for v in &self.vertices {
            let rec: Vec<String> = v.iter().flat_map(|x| [x.numer().to_string(), x.denom().to_string()]).collect();
            w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }
}

/// `max_i ⟨v_i, observed⟩` and the index of the maximizing vertex.
pub fn evaluate_closed_form<T: Scalar>(vs: &VertexSet, observed: &[T]) -> Result<(T, usize)> {
    if observed.len() != vs.dim {
        return Err(Error::Dimension(format!("observed has {} entries, vertices {}", observed.len(), vs.dim)));
    }
    let mut best: Option<(T, usize)> = None;
    for (i, v) in vs.vertices.iter().enumerate() {
        let vt: Vec<T> = v.iter().map(T::from_rational).collect();
        let val = dot(&vt, observed);
        if best.as_ref().map(|(b, _)| val > *b).unwrap_or(true) {
            best = Some((val, i));
        }
    }
    best.ok_or_else(|| Error::Dimension("empty vertex set".into()))
}

/// Dual region of the ℓ∞ program without budget, in the variables
/// `(z, [u], x)` (or `(z, [u], x', x'')` when `N` has negative entries).
///
/// Rows of `[1ᵀ; A]` depending on later rows are removed first, which fixes
/// the gauge of `z` and drops `u` whenever normalization is implied by
/// `A q = p`.
#[derive(Clone, Debug)]
pub struct DualFunctionalRegion {
    pub polyhedron: Polyhedron,
    /// Rows of the original `A` that carry a `z` coordinate.
    pub kept_rows: Vec<usize>,
    pub has_u: bool,
    pub original_rows: usize,
}

pub fn linf_dual_region(a: &Matrix<Rational>, n_mat: &Matrix<Rational>) -> Result<DualFunctionalRegion> {
    if a.cols() != n_mat.cols() {
        return Err(Error::Dimension("A and N column counts differ".into()));
    }
    let ncols = a.cols();
    let ext = Matrix::from_rows(vec![vec![one(); ncols]], ncols).vstack(a);
    let keep = match independent_rows_reverse(&ext, None) {
        RowReduction::Independent(k) => k,
        RowReduction::Inconsistent(_) => unreachable!(),
    };
    let has_u = keep.first() == Some(&0);
    let kept_rows: Vec<usize> = keep.iter().filter(|&&r| r > 0).map(|&r| r - 1).collect();
    let mz = kept_rows.len();
    let nu = usize::from(has_u);
    let l = n_mat.rows();
    let split = !n_mat.is_nonnegative();
    let nx = if split { 2 * l } else { l };
    let dim = mz + nu + nx;
    let mut rows = Vec::new();
    let mut b = Vec::new();
    // Aᵀz + u1 - Nᵀx ≤ 0, one row per strategy.
    for col in 0..ncols {
        let mut row = vec![zero(); dim];
        for (k, &r) in kept_rows.iter().enumerate() {
            row[k] = a[(r, col)].clone();
        }
        if has_u {
            row[mz] = one();
        }
        for r in 0..l {
            let v = n_mat[(r, col)].clone();
            row[mz + nu + r] = -v.clone();
            if split {
                row[mz + nu + l + r] = v;
            }
        }
        rows.push(row);
        b.push(zero());
    }
    for k in 0..nx {
        let mut row = vec![zero(); dim];
        row[mz + nu + k] = -one();
        rows.push(row);
        b.push(zero());
    }
    let mut row = vec![zero(); dim];
    for k in 0..nx {
        row[mz + nu + k] = one();
    }
    rows.push(row);
    b.push(one());
    Ok(DualFunctionalRegion {
        polyhedron: Polyhedron::new(Matrix::from_rows(rows, dim), b)?,
        kept_rows,
        has_u,
        original_rows: a.rows(),
    })
}

impl DualFunctionalRegion {
    /// Images of the region's vertices on `(z, u)`, with `z` expanded to one
    /// coordinate per original row of `A` and `u` last when present. Images
    /// inside the hull of others (such as `z = 0`) are kept.
    pub fn functionals(&self) -> Result<VertexSet> {
        let full = enumerate_vertices(&self.polyhedron)?;
        let mz = self.kept_rows.len();
        let nu = usize::from(self.has_u);
        let coords: Vec<usize> = (0..mz + nu).collect();
        let proj = full.project(&coords);
        let width = self.original_rows + nu;
        let expand = |v: &Vec<Rational>| {
            let mut out = vec![zero(); width];
            for (k, &r) in self.kept_rows.iter().enumerate() {
                out[r] = v[k].clone();
            }
            if self.has_u {
                out[width - 1] = v[mz].clone();
            }
            out
        };
        let vertices: BTreeSet<Vec<Rational>> = full.vertex_images(&coords).iter().map(expand).collect();
        let rays: Vec<Vec<Rational>> = proj.rays.iter().map(expand).collect();
        Ok(VertexSet {
            dim: width,
            vertices: vertices.into_iter().collect(),
            discarded_ray_count: rays.len(),
            rays,
            region: self.polyhedron.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn unit_square() {
        let id = Matrix::<Rational>::identity(2);
        let vs = enumerate_dual_vertices(&id, &[q(1), q(1)]).unwrap();
        assert_eq!(vs.vertices, vec![vec![q(0), q(0)], vec![q(0), q(1)], vec![q(1), q(0)], vec![q(1), q(1)]]);
        assert_eq!(vs.discarded_ray_count, 0);
    }

    #[test]
    fn half_line() {
        let empty = Matrix::<Rational>::zeros(0, 1);
        let vs = enumerate_dual_vertices(&empty, &[]).unwrap();
        assert_eq!(vs.vertices, vec![vec![q(0)]]);
        assert_eq!(vs.discarded_ray_count, 1);
        assert_eq!(vs.rays, vec![vec![q(1)]]);
    }

    #[test]
    fn cube_and_simplex() {
        let id = Matrix::<Rational>::identity(3);
        let vs = enumerate_dual_vertices(&id, &[q(1), q(1), q(1)]).unwrap();
        assert_eq!(vs.len(), 8);
        let ones = Matrix::from_rows(vec![vec![q(1), q(1), q(1)]], 3);
        let vs = enumerate_dual_vertices(&ones, &[q(1)]).unwrap();
        assert_eq!(vs.len(), 4);
        for v in &vs.vertices {
            assert!(vs.region.contains(v));
            assert!(vs.region.active_rows(v).len() >= 3);
        }
    }

    #[test]
    fn lines_are_rejected() {
        // {y : y0 ≤ 1} in 2D has a line.
        let a = Matrix::from_rows(vec![vec![q(1), q(0)]], 2);
        assert!(enumerate_vertices(&Polyhedron::new(a, vec![q(1)]).unwrap()).is_err());
    }

    #[test]
    fn dimension_cap() {
        let id = Matrix::<Rational>::identity(4);
        let poly = Polyhedron::dual_region(&id, &vec![q(1); 4]).unwrap();
        assert!(matches!(enumerate_vertices_capped(&poly, 3), Err(Error::Capacity(_))));
    }

    #[test]
    fn projection_drops_interior_points() {
        // Triangle (0,0),(2,0),(0,2) lifted with a third coordinate; projecting onto
        // the first coordinate gives the segment [0, 2].
        let a = Matrix::from_rows(
            vec![vec![q(-1), q(0)], vec![q(0), q(-1)], vec![q(1), q(1)]],
            2,
        );
        let vs = enumerate_vertices(&Polyhedron::new(a, vec![q(0), q(0), q(2)]).unwrap()).unwrap();
        assert_eq!(vs.len(), 3);
        let p = vs.project(&[0]);
        assert_eq!(p.vertices, vec![vec![q(0)], vec![q(2)]]);
    }

    #[test]
    fn csv_export() {
        let id = Matrix::<Rational>::identity(1);
        let vs = enumerate_dual_vertices(&id, &[Rational::new(1, 3)]).unwrap();
        let mut buf = Vec::new();
        vs.write_csv(&["z".to_string()], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "z_num,z_den\n0,1\n1,3\n");
    }
}
