//! Antisymmetric masks on a reversal-symmetric cube and their sum code.
//!
//! A function `w: 𝒜 → F` is antisymmetric when `w(x) = −w(rev x)`. The mask
//! space used throughout is `{g − g∘rev}`, which is the same space in odd
//! characteristic; in characteristic 2 it also forces zeros on palindromes.
//!
//! A prefix `a ∈ 𝒜̄` stands for its suffix cube `{a} × A_{|a|+1} × … × A_m`,
//! and `Σ[w](a)` is the sum of `w` over that cube.

use std::collections::{BTreeMap, BTreeSet};

use rand::RngCore;
use serde::Serialize;

use crate::field::{Elem, Field};
use crate::linalg::{image_dual_basis, Matrix};
use crate::locator::LocatorOutput;
use crate::point::{Point, ProductSet};
use crate::rm::dedup_points;
use crate::Error;

pub fn rev_point(a: &Point) -> Point {
    a.rev()
}

fn check_symmetric(a: &ProductSet) -> Result<(), Error> {
    if a.is_reversal_symmetric() {
        Ok(())
    } else {
        Err(Error::NotSymmetric)
    }
}

fn check_prefix(a: &ProductSet, x: &Point) -> Result<(), Error> {
    if a.contains_prefix(x.coords()) {
        Ok(())
    } else {
        Err(Error::NotInSet(x.to_string()))
    }
}

/// Size of the suffix cube of `x`.
pub fn cube_size(a: &ProductSet, x: &Point) -> u128 {
    a.range_size(x.len() + 1, a.m())
}

/// `|x ∩ rev(y)|` for prefixes `x, y` of a reversal-symmetric `𝒜`.
pub fn rev_cube_intersection_size(x: &Point, y: &Point, a: &ProductSet) -> Result<u128, Error> {
    check_symmetric(a)?;
    check_prefix(a, x)?;
    check_prefix(a, y)?;
    Ok(rev_inter(x, y, a))
}

fn rev_inter(x: &Point, y: &Point, a: &ProductSet) -> u128 {
    let m = a.m();
    let (lx, ly) = (x.len(), y.len());
    if lx + ly < m {
        return a.range_size(lx + 1, m - ly);
    }
    // positions i (1-based) with m+1-|y| ≤ i ≤ |x| are fixed by both
    let ok = (m + 1 - ly..=lx).all(|i| x.coords()[i - 1] == y.coords()[m - i]);
    u128::from(ok)
}

/// `|∪H|` for a prefix-free `H`.
pub fn union_size(a: &ProductSet, h: &[Point]) -> u128 {
    h.iter().map(|x| cube_size(a, x)).sum()
}

/// `∪H = ∪H_rev` for a prefix-free `H`, by counting `|∪H ∩ ∪H_rev|`.
pub fn is_symmetric(a: &ProductSet, h: &[Point]) -> Result<bool, Error> {
    check_symmetric(a)?;
    let inter: u128 = h.iter().flat_map(|x| h.iter().map(move |y| (x, y))).map(|(x, y)| rev_inter(x, y, a)).sum();
    Ok(inter == union_size(a, h))
}

pub fn is_prefix_free(g: &[Point]) -> bool {
    g.iter().all(|x| g.iter().all(|y| x == y || !x.is_prefix_of(y)))
}

/// Prefix-free `G` together with a disjoint cover `Λ_a ⊆ G` of every input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixFreeFamily {
    pub g: Vec<Point>,
    pub lambda: BTreeMap<Point, Vec<Point>>,
}

/// Refines `I` into a prefix-free family.
///
/// While some element of `G` is a strict prefix of another, take the
/// shortest such `a*` and the shortest `a′ ⊋ a*` in `G` (ties broken
/// lexicographically), and replace `a*` by `a′` and the siblings along the
/// path from `a*` to `a′`.
pub fn prefix_free(a: &ProductSet, pts: &[Point]) -> Result<PrefixFreeFamily, Error> {
    for x in pts {
        check_prefix(a, x)?;
    }
    let inputs = dedup_points(pts);
    let mut g: BTreeSet<Point> = inputs.iter().cloned().collect();
    let mut lambda: BTreeMap<Point, BTreeSet<Point>> = inputs.iter().map(|x| (x.clone(), BTreeSet::from([x.clone()]))).collect();
    loop {
        let found = g.iter().find_map(|s| g.iter().find(|t| t.len() > s.len() && s.is_prefix_of(t)).map(|t| (s.clone(), t.clone())));
        let Some((star, prime)) = found else { break };
        g.remove(&star);
        let mut repl = vec![prime.clone()];
        for j in star.len() + 1..=prime.len() {
            for &b in a.factor(j) {
                if b != prime.coords()[j - 1] {
                    repl.push(prime.prefix(j - 1).child(b));
                }
            }
        }
        g.extend(repl.iter().cloned());
        for cover in lambda.values_mut() {
            if cover.remove(&star) {
                cover.extend(repl.iter().cloned());
            }
        }
    }
    Ok(PrefixFreeFamily { g: g.into_iter().collect(), lambda: lambda.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect() })
}

/// Size bound for [`prefix_free`]: `|I| · Σ_j (|A_j| − 1)`, which is
/// `|I| · m` on a binary cube.
pub fn prefix_free_bound(a: &ProductSet, n: usize) -> usize {
    n * a.factors().iter().map(|f| f.len() - 1).sum::<usize>()
}

/// Minimal symmetric subsets of a prefix-free `G`: the connected components
/// of the graph with edges `x ∩ rev(y) ≠ ∅` that are themselves symmetric.
pub fn sym_sets(a: &ProductSet, g: &[Point]) -> Result<Vec<Vec<Point>>, Error> {
    check_symmetric(a)?;
    for x in g {
        check_prefix(a, x)?;
    }
    let g = dedup_points(g);
    if !is_prefix_free(&g) {
        return Err(Error::Params("set is not prefix-free".into()));
    }
    let n = g.len();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = s;
        let mut stack = vec![s];
        let mut members = Vec::new();
        while let Some(u) = stack.pop() {
            members.push(u);
            for v in 0..n {
                if comp[v] == usize::MAX && rev_inter(&g[u], &g[v], a) > 0 {
                    comp[v] = s;
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        let h: Vec<Point> = members.into_iter().map(|k| g[k].clone()).collect();
        if is_symmetric(a, &h)? {
            out.push(h);
        }
    }
    Ok(out)
}

/// `|∪H| ≥ (K/2)(1+√(1−4t/K))` or `|∪H| ≤ (K/2)(1−√(1−4t/K))` with
/// `t = |H|·|G|`, decided exactly as `u² − Ku + Kt ≥ 0`. `None` when
/// `4t > K`, where nothing is claimed.
pub fn reverse_set_bound_holds(u: u128, t: u128, k: u128) -> Option<bool> {
    if 4 * t > k {
        return None;
    }
    let (u, t, k) = (u as i128, t as i128, k as i128);
    Some(u * u - k * u + k * t >= 0)
}

/// Upper bound on `|R|` for [`antisym_locate`] on `n` query points:
/// `1 + ⌊(K/2)(1 − √(1 − 4g²/K))⌋` with `g` the [`prefix_free_bound`], or
/// `1 + K` when `4g² > K`.
pub fn locality_bound(a: &ProductSet, n: usize) -> u128 {
    let k = a.size();
    let g = prefix_free_bound(a, n) as u128;
    let t = g * g;
    if 4 * t > k {
        return 1 + k;
    }
    // largest u ≤ K/2 with u² − Ku + Kt ≥ 0; the form decreases on [0, K/2]
    let (mut lo, mut hi) = (0u128, k / 2);
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if reverse_set_bound_holds(mid, t, k) == Some(true) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    1 + lo
}

/// Offset and length of the block of cube indices (lex order) under `x`.
pub fn cube_block(a: &ProductSet, x: &Point) -> Option<(usize, usize)> {
    let len = cube_size(a, x) as usize;
    let mut off = 0usize;
    for (j, v) in x.coords().iter().enumerate() {
        let k = a.factors()[j].binary_search(v).ok()?;
        off += k * a.range_size(j + 2, a.m()) as usize;
    }
    Some((off, len))
}

/// `Σ[w](x)` for each `x`, with `w` given on the cube in lex order.
pub fn sigma_word(f: &Field, a: &ProductSet, w: &[Elem], pts: &[Point]) -> Result<Vec<Elem>, Error> {
    if w.len() as u128 != a.size() {
        return Err(Error::Dimension { expected: a.size() as usize, found: w.len() });
    }
    pts.iter()
        .map(|x| {
            let (off, len) = cube_block(a, x).ok_or_else(|| Error::NotInSet(x.to_string()))?;
            Ok(f.sum(w[off..off + len].iter().copied()))
        })
        .collect()
}

/// `g − g∘rev` for uniform `g`, on the cube in lex order.
pub fn random_antisym<R: RngCore + ?Sized>(f: &Field, a: &ProductSet, rng: &mut R) -> Result<Vec<Elem>, Error> {
    check_symmetric(a)?;
    let pts = a.points();
    let g = f.sample_vec(pts.len(), rng);
    Ok(pts.iter().enumerate().map(|(k, x)| f.sub(g[k], g[a.index_of(x.rev().coords()).expect("symmetric")])).collect())
}

/// A message for the antisymmetric sum code: values on `𝒜`, with ⊥ fixed
/// to their sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiSymMessage {
    pub values: Vec<Elem>,
    pub bot: Elem,
}

impl AntiSymMessage {
    pub fn new(f: &Field, a: &ProductSet, values: Vec<Elem>) -> Result<Self, Error> {
        if values.len() as u128 != a.size() {
            return Err(Error::Dimension { expected: a.size() as usize, found: values.len() });
        }
        let bot = f.sum(values.iter().copied());
        Ok(AntiSymMessage { values, bot })
    }

    pub fn get(&self, a: &ProductSet, x: &Point) -> Option<Elem> {
        if x.is_bot() {
            Some(self.bot)
        } else {
            a.index_of(x.coords()).map(|k| self.values[k])
        }
    }
}

/// Cube points under some element of `h`.
fn expand(a: &ProductSet, h: &[Point], out: &mut BTreeSet<Point>) {
    for x in h {
        let rest = a.suffix_set(x.len()).points();
        out.extend(rest.into_iter().map(|s| Point(x.coords().iter().chain(s.coords()).copied().collect())));
    }
}

/// Cube points under no element of `h`.
fn complement(a: &ProductSet, h: &[Point], out: &mut BTreeSet<Point>) {
    fn rec(a: &ProductSet, h: &[Point], x: Point, out: &mut BTreeSet<Point>) {
        if h.iter().any(|y| y.is_prefix_of(&x)) {
            return;
        }
        if !h.iter().any(|y| x.is_prefix_of(y)) {
            expand(a, &[x], out);
            return;
        }
        for &b in a.factor(x.len() + 1) {
            rec(a, h, x.child(b), out);
        }
    }
    rec(a, h, Point::bot(), out);
}

/// Constraint locator for `Σ[F|_𝒜 + G]` with `G` a uniform antisymmetric
/// mask, messages `F` on `𝒜 ∪ {⊥}` with `F(⊥) = ΣF`.
///
/// Symmetric components `H` with `|∪H| ≤ |𝒜|/2` read `F` on `∪H`; larger
/// ones read `F(⊥)` and `F` on the complement. Message positions that end up
/// in no relation are dropped from `R`.
pub fn antisym_locate(f: &Field, a: &ProductSet, pts: &[Point]) -> Result<LocatorOutput, Error> {
    check_symmetric(a)?;
    a.check_field(f)?;
    let i = dedup_points(pts);
    let pf = prefix_free(a, &i)?;
    let g = &pf.g;
    let hs = sym_sets(a, g)?;
    let k = a.size();

    let mut r: BTreeSet<Point> = BTreeSet::from([Point::bot()]);
    let mut small = Vec::with_capacity(hs.len());
    for h in &hs {
        let is_small = 2 * union_size(a, h) <= k;
        if is_small {
            expand(a, h, &mut r);
        } else {
            complement(a, h, &mut r);
        }
        small.push(is_small);
    }
    let r: Vec<Point> = r.into_iter().collect();
    let ridx: BTreeMap<&Point, usize> = r.iter().enumerate().map(|(k, p)| (p, k)).collect();
    let gidx: BTreeMap<&Point, usize> = g.iter().enumerate().map(|(k, p)| (p, r.len() + k)).collect();
    let ioff = r.len() + g.len();
    let n = ioff + i.len();
    let one = 1 % f.p();
    let minus = f.neg(one);

    let mut rows: Vec<Vec<Elem>> = Vec::new();
    for (h, &is_small) in hs.iter().zip(&small) {
        let mut row = vec![0; n];
        let mut cover = BTreeSet::new();
        if is_small {
            expand(a, h, &mut cover);
            for x in &cover {
                row[ridx[x]] = one;
            }
        } else {
            complement(a, h, &mut cover);
            row[ridx[&Point::bot()]] = one;
            for x in &cover {
                row[ridx[x]] = minus;
            }
        }
        for x in h {
            row[gidx[x]] = minus;
        }
        rows.push(row);
    }
    for (k, x) in i.iter().enumerate() {
        let mut row = vec![0; n];
        for y in &pf.lambda[x] {
            row[gidx[y]] = one;
        }
        row[ioff + k] = minus;
        rows.push(row);
    }

    let outer: Vec<usize> = (0..r.len()).chain(ioff..n).collect();
    let mut copy = Matrix::zeros(outer.len(), n);
    for (row, &c) in outer.iter().enumerate() {
        copy.set(row, c, 1);
    }
    let z = image_dual_basis(f, &copy, &rows)?;
    let keep: Vec<usize> = (0..r.len()).filter(|&c| z.iter().any(|row| row[c] != 0)).collect();
    let cols: Vec<usize> = keep.iter().copied().chain(r.len()..outer.len()).collect();
    let z = Matrix::from_rows(&z, outer.len()).select_cols(&cols);
    Ok(LocatorOutput { r: keep.into_iter().map(|c| r[c].clone()).collect(), i, z })
}
