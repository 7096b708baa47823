//! Subcube sums of random low-degree extensions.
//!
//! For `F: 𝒜 → F` the encoding picks a uniform extension `F̂` of degree `dv`
//! and outputs `Σ[F̂]` on all of `F^{≤m}`: the value at a prefix `s` is the sum
//! of `F̂(s, a)` over `a ∈ A_{|s|+1} × … × A_m`. The message is `Σ[F]` on the
//! prefixes `𝒜̄` of `𝒜` (its value at ⊥ is the full sum).

use std::collections::{BTreeMap, BTreeSet};

use crate::field::{Elem, Field};
use crate::linalg::{image_dual_basis, Matrix};
use crate::locator::{rm_locate, LocatorOutput};
use crate::point::{Point, ProductSet};
use crate::poly::{lagrange_uni, subcube_sum, MultiPoly};
use crate::rm::{a_closure, cd_rm, cd_zero_rm, dedup_points, CodeView};
use crate::Error;

/// `Σ[P]` at each point.
pub fn sum_word(f: &Field, p: &MultiPoly, a: &ProductSet, pts: &[Point]) -> Result<Vec<Elem>, Error> {
    pts.iter().map(|x| subcube_sum(f, p, a, x.coords())).collect()
}

/// Summation constraints `z_s` for every `s` in `dom` with a child in `dom`:
/// `1` on `s`, `−1` on each `(s, a)`, `a ∈ A_{|s|+1}`. `dom` must be closed.
pub fn summation_rows(f: &Field, a: &ProductSet, dom: &[Point]) -> Vec<Vec<Elem>> {
    let idx: BTreeMap<&Point, usize> = dom.iter().enumerate().map(|(k, p)| (p, k)).collect();
    let mut parents: BTreeSet<Point> = BTreeSet::new();
    for p in dom {
        if let Some(q) = p.parent() {
            parents.insert(q);
        }
    }
    let mut rows = Vec::new();
    for s in parents {
        let mut row = vec![0; dom.len()];
        row[idx[&s]] = 1;
        for &b in a.factor(s.len() + 1) {
            row[idx[&s.child(b)]] = f.neg(1);
        }
        rows.push(row);
    }
    rows
}

/// Spanning set for the dual of `ΣRM|_S` (or of its zero-on-`𝒜` subcode) on
/// an `𝒜`-closed `S`: summation constraints plus, per length `i`, the dual of
/// the `i`-variate RM code (zero on `A_1 × … × A_i` for the subcode) on the
/// length-`i` points. For the subcode, length 0 contributes the unit row at ⊥.
pub fn dual_decomposition(view: &CodeView, a: &ProductSet, s: &[Point], zero_on_a: bool) -> Result<Vec<Vec<Elem>>, Error> {
    let f = &view.field;
    let idx: BTreeMap<&Point, usize> = s.iter().enumerate().map(|(k, p)| (p, k)).collect();
    let mut rows = summation_rows(f, a, s);
    if zero_on_a {
        if let Some(&k) = idx.get(&Point::bot()) {
            rows.push(crate::rm::unit(s.len(), k));
        }
    }
    for i in 1..=view.m {
        let level: Vec<Point> = s.iter().filter(|p| p.len() == i).cloned().collect();
        if level.is_empty() {
            continue;
        }
        let mut sub = CodeView::new(*f, &view.dv[..i]);
        if zero_on_a {
            sub = sub.with_zero_on(a.prefix_set(i));
        }
        let cb = if zero_on_a { cd_zero_rm(&sub, &level)? } else { cd_rm(&sub, &level)? };
        for r in cb.rows() {
            let mut full = vec![0; s.len()];
            for (p, v) in cb.domain.iter().zip(r) {
                full[idx[p]] = v;
            }
            rows.push(full);
        }
    }
    Ok(rows)
}

/// The flattening map `Q_{i,a}`: folds the length-`i` entries of `z` onto
/// their parents with weights `L_{A_i,a}`. Returns the points of `S ∖ S_i`
/// and the new vector on them. Only the tests use it.
pub fn flatten(f: &Field, z: &[Elem], i: usize, a_elem: Elem, s: &[Point], a: &ProductSet) -> Result<(Vec<Point>, Vec<Elem>), Error> {
    if z.len() != s.len() {
        return Err(Error::Dimension { expected: s.len(), found: z.len() });
    }
    let lag = lagrange_uni(f, a.factor(i), a_elem)?;
    let mut out: BTreeMap<Point, Elem> = BTreeMap::new();
    for (p, &v) in s.iter().zip(z) {
        if p.len() != i {
            out.insert(p.clone(), v);
        }
    }
    for (p, &v) in s.iter().zip(z) {
        if p.len() == i && v != 0 {
            let parent = p.parent().expect("i ≥ 1");
            let w = lag.eval_unchecked(f, &[p.coords()[i - 1]]);
            let e = out.get_mut(&parent).ok_or_else(|| Error::NotInSet(parent.to_string()))?;
            *e = f.add(*e, f.mul(v, w));
        }
    }
    let pts: Vec<Point> = s.iter().filter(|p| p.len() != i).cloned().collect();
    let vals = pts.iter().map(|p| out[p]).collect();
    Ok((pts, vals))
}

/// Locality bound `|I| · m · (m(a + 1) + 1)²` with `a = max |A_i|`.
pub fn locality_bound(a: &ProductSet, n: usize) -> u128 {
    let m = a.m() as u128;
    let amax = a.factors().iter().map(|x| x.len()).max().unwrap_or(0) as u128;
    n as u128 * m * (m * (amax + 1) + 1).pow(2)
}

/// Constraint locator for subcube sums of a uniform LDE.
///
/// Steps: close `I`; locate each length `i ≥ 1` of the closure with the
/// `i`-variate RM locator; close the union of the located sets (⊥ is always
/// a message position when `I` is nonempty); write the per-length RM rows
/// and the summation rows over `U = R̂ ∪ Î`; project onto `R̂ ⊔ I`.
pub fn sigma_rm_locate(view: &CodeView, a: &ProductSet, pts: &[Point]) -> Result<LocatorOutput, Error> {
    let f = &view.field;
    let m = view.m;
    if a.m() != m {
        return Err(Error::Arity { expected: m, found: a.m() });
    }
    a.check_field(f)?;
    for k in 0..m {
        let need = 2 * (a.factors()[k].len() - 1);
        if view.dv[k] < need {
            return Err(Error::Degree(format!("d_{} = {} < 2(|A_{}| - 1) = {}", k + 1, view.dv[k], k + 1, need)));
        }
    }
    let i = dedup_points(pts);
    if let Some(p) = i.iter().find(|p| p.len() > m) {
        return Err(Error::Arity { expected: m, found: p.len() });
    }
    let ihat = a_closure(&i, a);
    let mut r: BTreeSet<Point> = BTreeSet::new();
    if ihat.contains(&Point::bot()) {
        r.insert(Point::bot());
    }
    let mut level_outputs = Vec::new();
    for lvl in 1..=m {
        let il: Vec<Point> = ihat.iter().filter(|p| p.len() == lvl).cloned().collect();
        if il.is_empty() {
            continue;
        }
        let out = rm_locate(&CodeView::new(*f, &view.dv[..lvl]), &a.prefix_set(lvl), &il)?;
        r.extend(out.r.iter().cloned());
        level_outputs.push(out);
    }
    let rhat: Vec<Point> = a_closure(&r.into_iter().collect::<Vec<_>>(), a).into_iter().collect();
    let u: Vec<Point> = rhat.iter().chain(ihat.iter()).cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let idx: BTreeMap<&Point, usize> = u.iter().enumerate().map(|(k, p)| (p, k)).collect();

    let mut rows: Vec<Vec<Elem>> = Vec::new();
    for out in &level_outputs {
        let cols: Vec<&Point> = out.r.iter().chain(out.i.iter()).collect();
        for row in out.z.to_rows() {
            let mut full = vec![0; u.len()];
            for (p, v) in cols.iter().zip(row) {
                let k = idx[*p];
                full[k] = f.add(full[k], v);
            }
            if full.iter().any(|&x| x != 0) {
                rows.push(full);
            }
        }
    }
    rows.extend(summation_rows(f, a, &u));

    let outer: Vec<&Point> = rhat.iter().chain(i.iter()).collect();
    let mut copy = Matrix::zeros(outer.len(), u.len());
    for (k, p) in outer.iter().enumerate() {
        copy.set(k, idx[*p], 1);
    }
    let b = image_dual_basis(f, &copy, &rows)?;
    Ok(LocatorOutput { z: Matrix::from_rows(&b, outer.len()), r: rhat, i })
}
