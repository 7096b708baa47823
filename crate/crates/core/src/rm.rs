//! Reed–Muller codes with individual degree bounds: generators, exact
//! constraint detection (plain and zero-code), and `𝒜`-closure of point sets.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::field::{Elem, Field};
use crate::linalg::{image_dual_basis, kernel_basis, Matrix};
use crate::point::{Point, ProductSet};
use crate::poly::{monomial_count, monomial_row, vanishing, DegreeVector};
use crate::Error;

/// `RM[F, m, dv]`, optionally restricted to the subcode vanishing on `zero_on`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeView {
    pub field: Field,
    pub m: usize,
    pub dv: DegreeVector,
    pub zero_on: Option<ProductSet>,
}

impl CodeView {
    pub fn new(field: Field, dv: &[usize]) -> Self {
        CodeView { field, m: dv.len(), dv: dv.to_vec(), zero_on: None }
    }

    pub fn with_zero_on(mut self, s: ProductSet) -> Self {
        self.zero_on = Some(s);
        self
    }

    pub fn dimension(&self) -> usize {
        monomial_count(&self.dv)
    }

    fn check_points(&self, pts: &[Point]) -> Result<(), Error> {
        match pts.iter().find(|p| p.len() != self.m) {
            Some(p) => Err(Error::Arity { expected: self.m, found: p.len() }),
            None => Ok(()),
        }
    }
}

/// A basis of constraints: each row `z` of `z` satisfies `z · w|_domain = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintBasis {
    pub domain: Vec<Point>,
    #[serde(serialize_with = "ser_matrix")]
    pub z: Matrix,
}

pub(crate) fn ser_matrix<S: serde::Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
    m.to_rows().serialize(s)
}

impl ConstraintBasis {
    pub fn is_empty(&self) -> bool {
        self.z.rows() == 0
    }

    pub fn rows(&self) -> Vec<Vec<Elem>> {
        self.z.to_rows()
    }
}

/// Removes repeated points, keeping first occurrences in order.
pub fn dedup_points(pts: &[Point]) -> Vec<Point> {
    let mut seen = BTreeSet::new();
    pts.iter().filter(|p| seen.insert((*p).clone())).cloned().collect()
}

/// One row per point, one column per monomial of `dv`.
pub fn rm_generator(view: &CodeView, pts: &[Point]) -> Result<Matrix, Error> {
    view.check_points(pts)?;
    let rows: Vec<Vec<Elem>> = pts.iter().map(|x| monomial_row(&view.field, &view.dv, x.coords())).collect();
    Ok(Matrix::from_rows(&rows, view.dimension()))
}

/// Constraints on a list of points, repeated points included (repeats give
/// equality rows). The caller is responsible for arity.
pub(crate) fn detector_rows(f: &Field, dv: &[usize], pts: &[Point]) -> Vec<Vec<Elem>> {
    let rows: Vec<Vec<Elem>> = pts.iter().map(|x| monomial_row(f, dv, x.coords())).collect();
    let g = Matrix::from_rows(&rows, monomial_count(dv));
    kernel_basis(f, &g.transpose())
}

/// Basis of the dual of `RM|_I`.
pub fn cd_rm(view: &CodeView, pts: &[Point]) -> Result<ConstraintBasis, Error> {
    if view.zero_on.is_some() {
        return cd_zero_rm(view, pts);
    }
    view.check_points(pts)?;
    let domain = dedup_points(pts);
    let rows = detector_rows(&view.field, &view.dv, &domain);
    let z = Matrix::from_rows(&rows, domain.len());
    Ok(ConstraintBasis { domain, z })
}

/// Basis of the dual of `Z_𝒮(RM)|_I`.
///
/// Every codeword of the zero code is `Σ_i Z_{S_i}(X_i) T_i` with `T_i` of
/// degree `dv` lowered by `|S_i|` on axis `i`. The values of the `T_i` on `I`
/// range over a product of smaller RM codes whose dual is block diagonal; the
/// map to `w|_I` is then pushed through [`image_dual_basis`]. An axis with
/// `d_i = |S_i| − 1` contributes no term.
pub fn cd_zero_rm(view: &CodeView, pts: &[Point]) -> Result<ConstraintBasis, Error> {
    let f = &view.field;
    let s = view.zero_on.as_ref().ok_or_else(|| Error::Params("zero code needs a vanishing set".into()))?;
    if s.m() != view.m {
        return Err(Error::Arity { expected: view.m, found: s.m() });
    }
    for i in 0..view.m {
        if view.dv[i] + 1 < s.factors()[i].len() {
            return Err(Error::Degree(format!("d_{} = {} below |S_{}| - 1 = {}", i + 1, view.dv[i], i + 1, s.factors()[i].len() - 1)));
        }
    }
    view.check_points(pts)?;
    let domain = dedup_points(pts);
    let n = domain.len();
    let m = view.m;
    // block diagonal dual of (T_1|_I, …, T_m|_I)
    let mut bperp: Vec<Vec<Elem>> = Vec::new();
    for i in 0..m {
        let rows = match crate::poly::lowered(&view.dv, i, s.factors()[i].len()) {
            Some(dvi) => detector_rows(f, &dvi, &domain),
            None => (0..n).map(|k| unit(n, k)).collect(),
        };
        for r in rows {
            let mut full = vec![0; m * n];
            full[i * n..(i + 1) * n].copy_from_slice(&r);
            bperp.push(full);
        }
    }
    // w(x) = Σ_i Z_{S_i}(x_i) T_i(x)
    let mut a = Matrix::zeros(n, m * n);
    for i in 0..m {
        let z = vanishing(f, &s.factors()[i]);
        for (k, x) in domain.iter().enumerate() {
            a.set(k, i * n + k, z.eval_unchecked(f, &[x.coords()[i]]));
        }
    }
    let rows = image_dual_basis(f, &a, &bperp)?;
    Ok(ConstraintBasis { domain, z: Matrix::from_rows(&rows, n) })
}

pub(crate) fn unit(n: usize, k: usize) -> Vec<Elem> {
    let mut v = vec![0; n];
    v[k] = 1;
    v
}

/// Smallest `𝒜`-closed superset of `x`: closed under prefixes, and whenever
/// a point of length `ℓ ≥ 1` is present so are all its siblings over `A_ℓ`.
pub fn a_closure(x: &[Point], a: &ProductSet) -> BTreeSet<Point> {
    let mut out = BTreeSet::new();
    for p in x {
        out.insert(p.clone());
        let mut cur = p.clone();
        while let Some(parent) = cur.parent() {
            for &b in a.factor(cur.len()) {
                out.insert(parent.child(b));
            }
            out.insert(parent.clone());
            cur = parent;
        }
    }
    out
}

pub fn is_a_closed(s: &BTreeSet<Point>, a: &ProductSet) -> bool {
    s.iter().all(|p| match p.parent() {
        None => true,
        Some(parent) => s.contains(&parent) && a.factor(p.len()).iter().all(|&b| s.contains(&parent.child(b))),
    })
}
