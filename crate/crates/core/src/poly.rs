//! Multivariate polynomials with individual degree bounds.
//!
//! Coefficients are stored densely. The exponent vector `e` lives at index
//! `Σ e_i · stride_i` with `stride_0 = 1` and `stride_{i+1} = stride_i (d_i + 1)`.

use rand::RngCore;

use crate::field::{Elem, Field};
use crate::point::{Point, ProductSet};
use crate::Error;

/// Per-variable degree bounds `(d_1, …, d_m)`.
pub type DegreeVector = Vec<usize>;

/// Number of monomials `∏ (d_i + 1)`.
pub fn monomial_count(dv: &[usize]) -> usize {
    dv.iter().map(|d| d + 1).product()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    dv: DegreeVector,
    coeffs: Vec<Elem>,
}

impl MultiPoly {
    pub fn zero(dv: &[usize]) -> Self {
        MultiPoly { dv: dv.to_vec(), coeffs: vec![0; monomial_count(dv)] }
    }

    pub fn constant(m: usize, c: Elem) -> Self {
        MultiPoly { dv: vec![0; m], coeffs: vec![c] }
    }

    pub fn from_coeffs(dv: &[usize], coeffs: Vec<Elem>) -> Result<Self, Error> {
        if coeffs.len() != monomial_count(dv) {
            return Err(Error::Dimension { expected: monomial_count(dv), found: coeffs.len() });
        }
        Ok(MultiPoly { dv: dv.to_vec(), coeffs })
    }

    /// Univariate polynomial from coefficients, constant term first.
    pub fn univariate(coeffs: Vec<Elem>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0] } else { coeffs };
        MultiPoly { dv: vec![coeffs.len() - 1], coeffs }
    }

    /// `X_i` (0-based `i`) in `m` variables.
    pub fn var(m: usize, i: usize) -> Self {
        let mut dv = vec![0; m];
        dv[i] = 1;
        let mut p = MultiPoly::zero(&dv);
        p.coeffs[1] = 1;
        p
    }

    /// Uniformly random polynomial with degree vector `dv`.
    pub fn random<R: RngCore + ?Sized>(f: &Field, dv: &[usize], rng: &mut R) -> Self {
        MultiPoly { dv: dv.to_vec(), coeffs: f.sample_vec(monomial_count(dv), rng) }
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.dv.len()
    }

    pub fn dv(&self) -> &[usize] {
        &self.dv
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Exponent vector stored at `idx`.
    pub fn exponent(dv: &[usize], mut idx: usize) -> Vec<usize> {
        dv.iter()
            .map(|d| {
                let e = idx % (d + 1);
                idx /= d + 1;
                e
            })
            .collect()
    }

    pub fn index(dv: &[usize], e: &[usize]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (x, d) in e.iter().zip(dv) {
            idx += x * stride;
            stride *= d + 1;
        }
        idx
    }

    pub fn coeff(&self, e: &[usize]) -> Elem {
        if e.iter().zip(&self.dv).any(|(x, d)| x > d) {
            0
        } else {
            self.coeffs[Self::index(&self.dv, e)]
        }
    }

    /// Actual individual degrees (0 for the zero polynomial).
    pub fn degrees(&self) -> Vec<usize> {
        let mut out = vec![0; self.m()];
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                for (o, e) in out.iter_mut().zip(Self::exponent(&self.dv, idx)) {
                    *o = (*o).max(e);
                }
            }
        }
        out
    }

    /// Re-expresses under a new bound; fails if a nonzero term does not fit.
    pub fn with_dv(&self, dv: &[usize]) -> Result<Self, Error> {
        if dv.len() != self.m() {
            return Err(Error::Arity { expected: self.m(), found: dv.len() });
        }
        let mut out = MultiPoly::zero(dv);
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let e = Self::exponent(&self.dv, idx);
            if e.iter().zip(dv).any(|(x, d)| x > d) {
                return Err(Error::Degree(format!("term {e:?} exceeds {dv:?}")));
            }
            out.coeffs[Self::index(dv, &e)] = c;
        }
        Ok(out)
    }

    /// Embeds a univariate polynomial as a polynomial in `X_i` of arity `m`.
    pub fn in_var(uni: &MultiPoly, i: usize, m: usize) -> Self {
        assert_eq!(uni.m(), 1);
        let mut dv = vec![0; m];
        dv[i] = uni.dv[0];
        MultiPoly { dv, coeffs: uni.coeffs.clone() }
    }

    pub fn eval(&self, f: &Field, x: &[Elem]) -> Result<Elem, Error> {
        if x.len() != self.m() {
            return Err(Error::Arity { expected: self.m(), found: x.len() });
        }
        Ok(self.eval_unchecked(f, x))
    }

    /// Nested Horner: eliminates `X_1` first, then `X_2`, and so on.
    pub fn eval_unchecked(&self, f: &Field, x: &[Elem]) -> Elem {
        let mut cur: Vec<Elem> = self.coeffs.clone();
        for (i, &xi) in x.iter().enumerate() {
            let w = self.dv[i] + 1;
            let next: Vec<Elem> = cur
                .chunks(w)
                .map(|block| block.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, xi), c)))
                .collect();
            cur = next;
        }
        cur[0]
    }

    /// Full evaluation table over `F^m`, lexicographic point order.
    pub fn eval_table(&self, f: &Field) -> Vec<Elem> {
        let p = f.size();
        let m = self.m();
        // axis by axis: replace the coefficient axis of length d_i+1 by p values
        let mut shape: Vec<usize> = self.dv.iter().map(|d| d + 1).collect();
        let mut cur = self.coeffs.clone();
        for i in 0..m {
            let inner: usize = shape[..i].iter().product();
            let outer: usize = shape[i + 1..].iter().product();
            let w = shape[i];
            let mut next = vec![0; inner * p * outer];
            for o in 0..outer {
                for x in 0..p {
                    for k in 0..inner {
                        let mut acc = 0;
                        for e in (0..w).rev() {
                            acc = f.add(f.mul(acc, x as Elem), cur[k + inner * (e + w * o)]);
                        }
                        next[k + inner * (x + p * o)] = acc;
                    }
                }
            }
            cur = next;
            shape[i] = p;
        }
        // cur is indexed with X_1 least significant; reorder to lex
        let total = p.pow(m as u32);
        let mut out = vec![0; total];
        for (idx, &v) in cur.iter().enumerate() {
            let mut t = idx;
            let mut lex = 0;
            let mut digits = vec![0; m];
            for d in digits.iter_mut() {
                *d = t % p;
                t /= p;
            }
            for d in digits {
                lex = lex * p + d;
            }
            out[lex] = v;
        }
        out
    }

    fn zip_with(&self, f: &Field, other: &MultiPoly, op: impl Fn(Elem, Elem) -> Elem) -> MultiPoly {
        assert_eq!(self.m(), other.m(), "arity mismatch");
        let dv: Vec<usize> = self.dv.iter().zip(&other.dv).map(|(a, b)| *a.max(b)).collect();
        let a = self.with_dv(&dv).expect("fits larger bound");
        let b = other.with_dv(&dv).expect("fits larger bound");
        let _ = f;
        MultiPoly { dv, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| op(*x, *y)).collect() }
    }

    pub fn add(&self, f: &Field, other: &MultiPoly) -> MultiPoly {
        self.zip_with(f, other, |x, y| f.add(x, y))
    }

    pub fn sub(&self, f: &Field, other: &MultiPoly) -> MultiPoly {
        self.zip_with(f, other, |x, y| f.sub(x, y))
    }

    pub fn scale(&self, f: &Field, c: Elem) -> MultiPoly {
        MultiPoly { dv: self.dv.clone(), coeffs: self.coeffs.iter().map(|&x| f.mul(x, c)).collect() }
    }

    pub fn mul(&self, f: &Field, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.m(), other.m(), "arity mismatch");
        let dv: Vec<usize> = self.dv.iter().zip(&other.dv).map(|(a, b)| a + b).collect();
        let mut out = MultiPoly::zero(&dv);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let ea = Self::exponent(&self.dv, i);
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let eb = Self::exponent(&other.dv, j);
                let e: Vec<usize> = ea.iter().zip(&eb).map(|(x, y)| x + y).collect();
                let k = Self::index(&dv, &e);
                out.coeffs[k] = f.add(out.coeffs[k], f.mul(a, b));
            }
        }
        out
    }

    /// `P(X_m, …, X_1)`.
    pub fn rev(&self) -> MultiPoly {
        let mut dv = self.dv.clone();
        dv.reverse();
        let mut out = MultiPoly::zero(&dv);
        for (idx, &c) in self.coeffs.iter().enumerate() {
            let mut e = Self::exponent(&self.dv, idx);
            e.reverse();
            out.coeffs[Self::index(&dv, &e)] = c;
        }
        out
    }
}

/// Values of every monomial of `dv` at `x`, in coefficient-index order.
pub fn monomial_row(f: &Field, dv: &[usize], x: &[Elem]) -> Vec<Elem> {
    let mut row = vec![1 % f.p()];
    for (i, &xi) in x.iter().enumerate() {
        let mut powers = Vec::with_capacity(dv[i] + 1);
        let mut acc = 1 % f.p();
        for _ in 0..=dv[i] {
            powers.push(acc);
            acc = f.mul(acc, xi);
        }
        let mut next = Vec::with_capacity(row.len() * powers.len());
        for &pw in &powers {
            for &r in &row {
                next.push(f.mul(r, pw));
            }
        }
        row = next;
    }
    row
}

/// `Z_S(X) = ∏_{s∈S} (X − s)`, univariate.
pub fn vanishing(f: &Field, s: &[Elem]) -> MultiPoly {
    let mut c = vec![1 % f.p()];
    for &r in s {
        // multiply by (X - r)
        let mut next = vec![0; c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k + 1] = f.add(next[k + 1], a);
            next[k] = f.sub(next[k], f.mul(a, r));
        }
        c = next;
    }
    MultiPoly::univariate(c)
}

/// Univariate `L_{A,a}`: 1 at `a`, 0 on `A ∖ {a}`, degree `|A| − 1`.
pub fn lagrange_uni(f: &Field, a_set: &[Elem], a: Elem) -> Result<MultiPoly, Error> {
    if !a_set.contains(&a) {
        return Err(Error::NotInSet(format!("({a})")));
    }
    let others: Vec<Elem> = a_set.iter().copied().filter(|&b| b != a).collect();
    let num = vanishing(f, &others);
    let denom = f.inv(others.iter().fold(1 % f.p(), |acc, &b| f.mul(acc, f.sub(a, b))));
    Ok(num.scale(f, denom))
}

/// `L_{S,w} = ∏_i L_{S_i, w_i}(X_i)`.
pub fn lagrange(f: &Field, s: &ProductSet, w: &[Elem]) -> Result<MultiPoly, Error> {
    if !s.contains(w) {
        return Err(Error::NotInSet(Point::new(w).to_string()));
    }
    let m = s.m();
    let mut out = MultiPoly::constant(m, 1 % f.p());
    for i in 0..m {
        let li = lagrange_uni(f, s.factors()[i].as_slice(), w[i])?;
        out = out.mul(f, &MultiPoly::in_var(&li, i, m));
    }
    Ok(out)
}

/// Unique interpolant of degree `(|S_i| − 1)_i`; `values` follow `S.points()`.
pub fn interpolate(f: &Field, s: &ProductSet, values: &[Elem]) -> Result<MultiPoly, Error> {
    let pts = s.points();
    if values.len() != pts.len() {
        return Err(Error::Dimension { expected: pts.len(), found: values.len() });
    }
    let dv: Vec<usize> = s.factors().iter().map(|a| a.len() - 1).collect();
    let mut out = MultiPoly::zero(&dv);
    for (w, &v) in pts.iter().zip(values) {
        if v != 0 {
            out = out.add(f, &lagrange(f, s, w.coords())?.scale(f, v));
        }
    }
    Ok(out)
}

/// Degree vector with axis `i` lowered by `by`, or `None` if it would go negative.
pub fn lowered(dv: &[usize], i: usize, by: usize) -> Option<DegreeVector> {
    let mut out = dv.to_vec();
    out[i] = dv[i].checked_sub(by)?;
    Some(out)
}

/// Uniformly random member of `LD_dv[values]`: the interpolant plus
/// `Σ_i Z_{S_i}(X_i) T_i` with each `T_i` uniform of degree `dv` lowered by
/// `|S_i|` on axis `i`.
pub fn sample_lde<R: RngCore + ?Sized>(f: &Field, s: &ProductSet, values: &[Elem], dv: &[usize], rng: &mut R) -> Result<MultiPoly, Error> {
    let m = s.m();
    if dv.len() != m {
        return Err(Error::Arity { expected: m, found: dv.len() });
    }
    for i in 0..m {
        if dv[i] + 1 < s.factors()[i].len() {
            return Err(Error::Degree(format!("d_{} = {} < |S_{}| - 1", i + 1, dv[i], i + 1)));
        }
    }
    let mut out = interpolate(f, s, values)?.with_dv(dv)?;
    for i in 0..m {
        let si = &s.factors()[i];
        if let Some(dvi) = lowered(dv, i, si.len()) {
            let t = MultiPoly::random(f, &dvi, rng);
            let z = MultiPoly::in_var(&vanishing(f, si), i, m);
            out = out.add(f, &z.mul(f, &t));
        }
    }
    out.with_dv(dv)
}

/// `Σ_{a ∈ A_{|prefix|+1} × … × A_m} P(prefix, a)` by explicit iteration.
pub fn subcube_sum(f: &Field, p: &MultiPoly, a: &ProductSet, prefix: &[Elem]) -> Result<Elem, Error> {
    if a.m() != p.m() {
        return Err(Error::Arity { expected: p.m(), found: a.m() });
    }
    if prefix.len() > p.m() {
        return Err(Error::Arity { expected: p.m(), found: prefix.len() });
    }
    let suffix = a.suffix_set(prefix.len());
    let mut acc = 0;
    let mut x = prefix.to_vec();
    for s in suffix.points() {
        x.truncate(prefix.len());
        x.extend_from_slice(s.coords());
        acc = f.add(acc, p.eval_unchecked(f, &x));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn f(p: u64) -> Field {
        Field::new(p).unwrap()
    }

    fn x1x2() -> MultiPoly {
        MultiPoly::var(2, 0).mul(&f(5), &MultiPoly::var(2, 1))
    }

    #[test]
    fn eval_examples() {
        let f5 = f(5);
        assert_eq!(x1x2().eval(&f5, &[2, 3]).unwrap(), 1);
        assert_eq!(MultiPoly::zero(&[2, 2]).eval(&f5, &[4, 1]).unwrap(), 0);
        let q = MultiPoly::univariate(vec![0, 4, 1]); // X^2 - X
        assert_eq!(q.eval(&f5, &[2]).unwrap(), 2);
        assert!(q.eval(&f5, &[1, 2]).is_err());
    }

    #[test]
    fn lagrange_examples() {
        let f5 = f(5);
        let cube = ProductSet::cube(&[0, 1], 2).unwrap();
        let l = lagrange(&f5, &cube, &[1, 1]).unwrap();
        assert_eq!(l.with_dv(&[1, 1]).unwrap(), x1x2().with_dv(&[1, 1]).unwrap());
        let s1 = ProductSet::cube(&[0, 1], 1).unwrap();
        assert_eq!(lagrange(&f5, &s1, &[0]).unwrap().coeffs(), &[1, 4]);
        let s3 = ProductSet::cube(&[0, 1, 2], 1).unwrap();
        let l = lagrange(&f5, &s3, &[2]).unwrap();
        // 3·X·(X−1) = 3X^2 − 3X
        assert_eq!(l.coeffs(), &[0, 2, 3]);
        assert!(lagrange(&f5, &s3, &[3]).is_err());
    }

    #[test]
    fn vanishing_examples() {
        let f5 = f(5);
        assert_eq!(vanishing(&f5, &[0, 1]).coeffs(), &[0, 4, 1]);
        assert_eq!(vanishing(&f5, &[]).coeffs(), &[1]);
        assert_eq!(vanishing(&f5, &[1, 2]).coeffs(), &[2, 2, 1]);
    }

    #[test]
    fn vanishing_zero_set_is_exact() {
        let f7 = f(7);
        for mask in 0u32..128 {
            let s: Vec<Elem> = (0..7).filter(|b| mask >> b & 1 == 1).collect();
            let z = vanishing(&f7, &s);
            for x in 0..7 {
                assert_eq!(z.eval(&f7, &[x]).unwrap() == 0, s.contains(&x));
            }
        }
    }

    #[test]
    fn subcube_sum_examples() {
        let f5 = f(5);
        let cube = ProductSet::cube(&[0, 1], 2).unwrap();
        assert_eq!(subcube_sum(&f5, &MultiPoly::constant(2, 1), &cube, &[]).unwrap(), 4);
        assert_eq!(subcube_sum(&f5, &x1x2(), &cube, &[1]).unwrap(), 1);
        assert_eq!(subcube_sum(&f5, &x1x2(), &cube, &[2]).unwrap(), 2);
        assert_eq!(subcube_sum(&f5, &x1x2(), &cube, &[2, 3]).unwrap(), 1);
    }

    #[test]
    fn sample_lde_examples() {
        let f3 = f(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = ProductSet::cube(&[0, 1], 1).unwrap();
        // tight degree: no randomness
        let a = sample_lde(&f3, &s, &[2, 1], &[1], &mut rng).unwrap();
        let b = sample_lde(&f3, &s, &[2, 1], &[1], &mut rng).unwrap();
        assert_eq!(a, b);
        // f = 0 on {0,1}, d = 2: c·(X^2 − X)
        let mut seen = BTreeMap::new();
        for _ in 0..900 {
            let q = sample_lde(&f3, &s, &[0, 0], &[2], &mut rng).unwrap();
            let c = q.coeffs()[2];
            assert_eq!(q.coeffs(), &[0, f3.neg(c), c]);
            *seen.entry(c).or_insert(0) += 1;
        }
        assert_eq!(seen.len(), 3);
        for (_, n) in seen {
            assert!((230..370).contains(&n));
        }
        // extension property
        let cube = ProductSet::cube(&[0, 1], 2).unwrap();
        let vals = [0, 0, 0, 1];
        for _ in 0..20 {
            let q = sample_lde(&f(5), &cube, &vals, &[2, 2], &mut rng).unwrap();
            for (pt, v) in cube.points().iter().zip(vals) {
                assert_eq!(q.eval(&f(5), pt.coords()).unwrap(), v);
            }
        }
        assert!(sample_lde(&f3, &ProductSet::cube(&[0, 1, 2], 1).unwrap(), &[0, 0, 0], &[1], &mut rng).is_err());
    }

    /// Exact mode: the image of the mask coefficients equals the brute-force
    /// set of extensions.
    #[test]
    fn sample_lde_exact_matches_filtering() {
        let f3 = f(3);
        let s = ProductSet::new(vec![vec![0, 1], vec![1]]).unwrap();
        let vals = [2, 1];
        let dv = [2, 1];
        let n = monomial_count(&dv);
        let mut brute = std::collections::BTreeSet::new();
        for idx in 0..3usize.pow(n as u32) {
            let c: Vec<Elem> = (0..n).map(|k| (idx / 3usize.pow(k as u32) % 3) as Elem).collect();
            let q = MultiPoly::from_coeffs(&dv, c.clone()).unwrap();
            if s.points().iter().zip(vals).all(|(p, v)| q.eval(&f3, p.coords()).unwrap() == v) {
                brute.insert(c);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut sampled = std::collections::BTreeSet::new();
        for _ in 0..4000 {
            sampled.insert(sample_lde(&f3, &s, &vals, &dv, &mut rng).unwrap().coeffs().to_vec());
        }
        assert_eq!(brute, sampled);
    }

    #[test]
    fn eval_table_matches_pointwise() {
        let f5 = f(5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let q = MultiPoly::random(&f5, &[2, 3, 1], &mut rng);
        let t = q.eval_table(&f5);
        for (i, p) in crate::point::field_points(&f5, 3).iter().enumerate() {
            assert_eq!(t[i], q.eval(&f5, p.coords()).unwrap());
        }
    }

    #[test]
    fn rev_swaps_arguments() {
        let f7 = f(7);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = MultiPoly::random(&f7, &[2, 1, 3], &mut rng);
        let r = q.rev();
        assert_eq!(r.eval(&f7, &[1, 2, 3]).unwrap(), q.eval(&f7, &[3, 2, 1]).unwrap());
    }

    proptest! {
        #[test]
        fn interpolation_identity(vals in proptest::collection::vec(0u64..7, 6), seed in 0u64..100) {
            let f7 = f(7);
            let s = ProductSet::new(vec![vec![0, 3, 5], vec![1, 6]]).unwrap();
            let q = interpolate(&f7, &s, &vals).unwrap();
            for (p, v) in s.points().iter().zip(&vals) {
                prop_assert_eq!(q.eval(&f7, p.coords()).unwrap(), *v);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = sample_lde(&f7, &s, &vals, &[3, 2], &mut rng).unwrap();
            for (p, v) in s.points().iter().zip(&vals) {
                prop_assert_eq!(e.eval(&f7, p.coords()).unwrap(), *v);
            }
        }

        #[test]
        fn summation_recurrence(seed in 0u64..200, prefix in proptest::collection::vec(0u64..5, 0..3)) {
            let f5 = f(5);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = MultiPoly::random(&f5, &[2, 2, 2], &mut rng);
            let a = ProductSet::new(vec![vec![0, 1], vec![0, 2, 4], vec![3]]).unwrap();
            let lhs = subcube_sum(&f5, &q, &a, &prefix).unwrap();
            let rhs = f5.sum(a.factor(prefix.len() + 1).iter().map(|&x| {
                let mut c = prefix.clone();
                c.push(x);
                subcube_sum(&f5, &q, &a, &c).unwrap()
            }));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
