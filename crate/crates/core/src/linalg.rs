//! Exact linear algebra over `F_p`: reduced row echelon form, kernels, duals
//! of images and uniform sampling from affine solution sets.

use rand::RngCore;

use crate::field::{Elem, Field};
use crate::value::{RandomSampler, Sampler, Value};
use crate::Error;

/// Dense row-major matrix. Row and column order are fixed at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds from row vectors; `cols` is needed for the zero-row case.
    pub fn from_rows(rows: &[Vec<Elem>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "row length mismatch");
            data.extend_from_slice(r);
        }
        Matrix { rows: rows.len(), cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Elem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, f: &Field, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|r| f.dot(self.row(r), v)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn push_row(&mut self, row: &[Elem]) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }
}

/// Output of [`rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_cols(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.matrix.cols()];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.matrix.cols()).filter(|&c| !is_pivot[c]).collect()
    }

    /// The nonzero rows.
    pub fn basis_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rank()).map(|r| self.matrix.row(r).to_vec()).collect()
    }
}

/// Gauss-Jordan elimination; every row operation is mirrored on `track`.
fn eliminate(f: &Field, m: &mut Matrix, mut track: Option<&mut Matrix>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        let Some(k) = (r..m.rows()).find(|&k| m.get(k, c) != 0) else {
            continue;
        };
        if k != r {
            for j in 0..m.cols() {
                m.data.swap(k * m.cols + j, r * m.cols + j);
            }
            if let Some(t) = track.as_deref_mut() {
                for j in 0..t.cols() {
                    t.data.swap(k * t.cols + j, r * t.cols + j);
                }
            }
        }
        let inv = f.inv(m.get(r, c));
        if inv != 1 {
            for x in m.row_mut(r) {
                *x = f.mul(*x, inv);
            }
            if let Some(t) = track.as_deref_mut() {
                for x in t.row_mut(r) {
                    *x = f.mul(*x, inv);
                }
            }
        }
        for k in 0..m.rows() {
            if k == r {
                continue;
            }
            let factor = m.get(k, c);
            if factor == 0 {
                continue;
            }
            for j in c..m.cols() {
                let v = f.sub(m.get(k, j), f.mul(factor, m.get(r, j)));
                m.set(k, j, v);
            }
            if let Some(t) = track.as_deref_mut() {
                for j in 0..t.cols() {
                    let v = f.sub(t.get(k, j), f.mul(factor, t.get(r, j)));
                    t.set(k, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Unique reduced row echelon form and its pivot columns.
pub fn rref(f: &Field, m: &Matrix) -> Rref {
    let mut out = m.clone();
    let pivots = eliminate(f, &mut out, None);
    Rref { matrix: out, pivots }
}

pub fn rank(f: &Field, m: &Matrix) -> usize {
    rref(f, m).rank()
}

/// Basis of `ker(M)`, one vector per free column.
///
/// The vector for free column `j` has its last nonzero entry at `j`, so the
/// list is in echelon form with respect to the column order.
pub fn kernel_basis(f: &Field, m: &Matrix) -> Vec<Vec<Elem>> {
    let rr = rref(f, m);
    let mut out = Vec::new();
    for j in rr.free_cols() {
        let mut v = vec![0; m.cols()];
        v[j] = 1;
        for (r, &p) in rr.pivots.iter().enumerate() {
            v[p] = f.neg(rr.matrix.get(r, j));
        }
        out.push(v);
    }
    out
}

/// Basis of the orthogonal complement of `span(vectors)` inside `F^n`.
pub fn dual_basis(f: &Field, vectors: &[Vec<Elem>], n: usize) -> Vec<Vec<Elem>> {
    kernel_basis(f, &Matrix::from_rows(vectors, n))
}

/// Canonical basis (nonzero RREF rows) of `span(vectors)`.
pub fn row_basis(f: &Field, vectors: &[Vec<Elem>], n: usize) -> Vec<Vec<Elem>> {
    rref(f, &Matrix::from_rows(vectors, n)).basis_rows()
}

pub fn span_rank(f: &Field, vectors: &[Vec<Elem>], n: usize) -> usize {
    rank(f, &Matrix::from_rows(vectors, n))
}

/// Equality of spans, via canonical bases.
pub fn span_eq(f: &Field, a: &[Vec<Elem>], b: &[Vec<Elem>], n: usize) -> bool {
    row_basis(f, a, n) == row_basis(f, b, n)
}

pub fn in_span(f: &Field, v: &[Elem], basis: &[Vec<Elem>], n: usize) -> bool {
    let r = span_rank(f, basis, n);
    let mut ext = basis.to_vec();
    ext.push(v.to_vec());
    span_rank(f, &ext, n) == r
}

/// Given `M` and a basis `bperp` of `U^⊥` (for `U ≤ F^{cols(M)}`), returns a
/// basis of `(M U)^⊥`.
///
/// Steps: basis `B'` of `U`, then `A = M B'`, then the column span of `A`,
/// then its dual.
pub fn image_dual_basis(f: &Field, m: &Matrix, bperp: &[Vec<Elem>]) -> Result<Vec<Vec<Elem>>, Error> {
    let n = m.cols();
    if let Some(bad) = bperp.iter().find(|v| v.len() != n) {
        return Err(Error::Dimension { expected: n, found: bad.len() });
    }
    let u_basis = dual_basis(f, bperp, n);
    let b_prime = Matrix::from_rows(&u_basis, n).transpose();
    let a = m.mul(f, &b_prime);
    Ok(kernel_basis(f, &a.transpose()))
}

/// Reduced form of `A x = b` for generic right-hand sides.
#[derive(Clone, Debug)]
pub struct SolvePlan {
    pub rref: Rref,
    /// `E` with `E A = rref(A)`.
    pub transform: Matrix,
}

impl SolvePlan {
    pub fn new(f: &Field, a: &Matrix) -> Self {
        let mut m = a.clone();
        let mut t = Matrix::identity(a.rows());
        let pivots = eliminate(f, &mut m, Some(&mut t));
        SolvePlan { rref: Rref { matrix: m, pivots }, transform: t }
    }

    /// Uniform solution: free variables drawn from `sampler`, pivots solved.
    /// Returns `None` if some reduced equation `0 = c` has `c` not
    /// identically zero.
    pub fn solve<V: Value, S: Sampler<V>>(&self, f: &Field, b: &[V], sampler: &mut S) -> Option<Vec<V>> {
        let a = &self.rref.matrix;
        assert_eq!(b.len(), a.rows(), "rhs length mismatch");
        let rhs: Vec<V> = (0..a.rows())
            .map(|r| {
                let mut acc = V::constant(0);
                for (k, bk) in b.iter().enumerate() {
                    let e = self.transform.get(r, k);
                    if e != 0 {
                        acc.add_scaled(f, e, bk);
                    }
                }
                acc
            })
            .collect();
        let rank = self.rref.rank();
        if rhs[rank..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        let mut x: Vec<Option<V>> = vec![None; a.cols()];
        for j in self.rref.free_cols() {
            x[j] = Some(sampler.fresh());
        }
        for (r, &p) in self.rref.pivots.iter().enumerate() {
            let mut v = rhs[r].clone();
            for j in p + 1..a.cols() {
                let c = a.get(r, j);
                if c != 0 {
                    let xj = x[j].as_ref().expect("free variable assigned");
                    v.add_scaled(f, f.neg(c), xj);
                }
            }
            x[p] = Some(v);
        }
        Some(x.into_iter().map(|v| v.expect("all variables assigned")).collect())
    }
}

/// Uniformly random solution of `A x = b`, or `None` if inconsistent.
pub fn sample_affine<R: RngCore + ?Sized>(f: &Field, a: &Matrix, b: &[Elem], rng: &mut R) -> Option<Vec<Elem>> {
    let plan = SolvePlan::new(f, a);
    plan.solve(f, b, &mut RandomSampler { field: *f, rng })
}

/// Every solution of `A x = b` (exact-enumeration mode).
pub fn affine_solutions(f: &Field, a: &Matrix, b: &[Elem]) -> Vec<Vec<Elem>> {
    let plan = SolvePlan::new(f, a);
    let free = plan.rref.free_cols().len();
    let mut out = Vec::new();
    let total = (f.p() as usize).pow(free as u32);
    for idx in 0..total {
        let mut digits = Vec::with_capacity(free);
        let mut t = idx;
        for _ in 0..free {
            digits.push((t % f.size()) as Elem);
            t /= f.size();
        }
        let mut it = digits.into_iter();
        struct Fixed<'a, I: Iterator<Item = Elem>>(&'a mut I);
        impl<I: Iterator<Item = Elem>> Sampler<Elem> for Fixed<'_, I> {
            fn fresh(&mut self) -> Elem {
                self.0.next().unwrap()
            }
        }
        match plan.solve(f, b, &mut Fixed(&mut it)) {
            Some(x) => out.push(x),
            None => return Vec::new(),
        }
    }
    out
}
