//! Constraint location for uniformly random low-degree extensions.
//!
//! The encoding maps `f: 𝒜 → F` to the evaluation table of a uniform
//! `Q ∈ F[X]^{≤dv}` with `Q|_𝒜 = f`. Given query points `I`, [`rm_locate`]
//! finds the few message positions `R ⊆ 𝒜` that the answers on `I` can depend
//! on, together with all linear relations between `f|_R` and the answers.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::linalg::{rref, Matrix};
use crate::point::{Point, ProductSet};
use crate::rm::{cd_rm, cd_zero_rm, dedup_points, detector_rows, ser_matrix, CodeView};
use crate::Error;

/// `(R, Z)`: `(m|_R, β) ∈ ker(Z)` iff `β` is a possible answer vector on `i`
/// for message `m`. Columns of `z` are `r` followed by `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocatorOutput {
    pub r: Vec<Point>,
    pub i: Vec<Point>,
    #[serde(serialize_with = "ser_matrix")]
    pub z: Matrix,
}

impl LocatorOutput {
    /// Columns of `z` that carry a nonzero entry in some row.
    pub fn touches(&self, col: usize) -> bool {
        (0..self.z.rows()).any(|r| self.z.get(r, col) != 0)
    }
}

/// True iff `I ∪ 𝒮` is constrained for the code of `view`.
///
/// Needs `d_i ≥ |S_i| − 1`; see [`cd_zero_rm`].
pub fn check_constraints(view: &CodeView, pts: &[Point], s: &ProductSet) -> Result<bool, Error> {
    let outside: Vec<Point> = pts.iter().filter(|p| !s.contains(p.coords())).cloned().collect();
    let zview = CodeView { zero_on: Some(s.clone()), ..view.clone() };
    Ok(!cd_zero_rm(&zview, &outside)?.is_empty())
}

/// Unconstrained `I′ ⊆ I` that determines the rest of `I`: the free columns
/// of the reduced detector matrix.
pub fn interpolating_set(view: &CodeView, pts: &[Point]) -> Result<Vec<Point>, Error> {
    let z = cd_rm(view, pts)?;
    let rr = rref(&view.field, &z.z);
    Ok(rr.free_cols().into_iter().map(|c| z.domain[c].clone()).collect())
}

/// Depth-first search for the points of `𝒜` involved in a constraint with
/// `pts`, tested at degree `view.dv`. Also returns the number of accepting
/// prefixes per level.
pub fn search(view: &CodeView, a: &ProductSet, pts: &[Point]) -> Result<(Vec<Point>, Vec<usize>), Error> {
    let m = a.m();
    let mut found = Vec::new();
    let mut accepting = vec![0; m];
    fn rec(
        view: &CodeView,
        a: &ProductSet,
        pts: &[Point],
        prefix: &mut Vec<u64>,
        found: &mut Vec<Point>,
        accepting: &mut [usize],
    ) -> Result<(), Error> {
        let i = prefix.len();
        if i == a.m() {
            found.push(Point::new(prefix));
            return Ok(());
        }
        for &s in a.factor(i + 1) {
            prefix.push(s);
            let mut factors: Vec<Vec<u64>> = prefix.iter().map(|&x| vec![x]).collect();
            factors.extend(a.factors()[i + 1..].iter().cloned());
            let sub = ProductSet::new(factors)?;
            if check_constraints(view, pts, &sub)? {
                accepting[i] += 1;
                rec(view, a, pts, prefix, found, accepting)?;
            }
            prefix.pop();
        }
        Ok(())
    }
    rec(view, a, pts, &mut Vec::new(), &mut found, &mut accepting)?;
    Ok((found, accepting))
}

fn check_locator_params(view: &CodeView, a: &ProductSet) -> Result<(), Error> {
    if a.m() != view.m {
        return Err(Error::Arity { expected: view.m, found: a.m() });
    }
    a.check_field(&view.field)?;
    for i in 0..view.m {
        let need = 2 * (a.factors()[i].len() - 1);
        if view.dv[i] < need {
            return Err(Error::Degree(format!("d_{} = {} < 2(|A_{}| - 1) = {}", i + 1, view.dv[i], i + 1, need)));
        }
    }
    Ok(())
}

/// Lowered degree `d_i − (|A_i| − 1)` used by the search.
pub fn search_degree(view: &CodeView, a: &ProductSet) -> Vec<usize> {
    view.dv.iter().zip(a.factors()).map(|(d, ai)| d - (ai.len() - 1)).collect()
}

/// Constraint locator for the uniform low-degree extension of `f: 𝒜 → F`.
///
/// Query points already in `𝒜` are systematic and go straight into `R`; the
/// search runs on an interpolating set of the remaining points. The returned
/// matrix is the detector on the multiset `R ⊔ I`, so a query that repeats a
/// message position gets an equality row.
pub fn rm_locate(view: &CodeView, a: &ProductSet, pts: &[Point]) -> Result<LocatorOutput, Error> {
    check_locator_params(view, a)?;
    let plain = CodeView { zero_on: None, ..view.clone() };
    let i = dedup_points(pts);
    if let Some(p) = i.iter().find(|p| p.len() != view.m) {
        return Err(Error::Arity { expected: view.m, found: p.len() });
    }
    let (inside, outside): (Vec<Point>, Vec<Point>) = i.iter().cloned().partition(|p| a.contains(p.coords()));
    let iprime = interpolating_set(&plain, &outside)?;
    let low = CodeView { dv: search_degree(view, a), ..plain.clone() };
    let (found, _) = search(&low, a, &iprime)?;
    let r: Vec<Point> = inside.into_iter().chain(found).collect::<BTreeSet<_>>().into_iter().collect();
    let mut all = r.clone();
    all.extend(i.iter().cloned());
    let rows = detector_rows(&view.field, &view.dv, &all);
    Ok(LocatorOutput { z: Matrix::from_rows(&rows, all.len()), r, i })
}
