//! Points of `F^{≤m}` (including the empty tuple ⊥) and product sets.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field::{Elem, Field};
use crate::Error;

/// A tuple of field elements of length `0..=m`; length 0 is ⊥.
///
/// Ordered by length first, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct Point(pub Vec<Elem>);

impl Point {
    pub fn bot() -> Self {
        Point(Vec::new())
    }

    pub fn new(coords: &[Elem]) -> Self {
        Point(coords.to_vec())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[Elem] {
        &self.0
    }

    pub fn is_bot(&self) -> bool {
        self.0.is_empty()
    }

    /// Drops the last coordinate. ⊥ has no parent.
    pub fn parent(&self) -> Option<Point> {
        if self.0.is_empty() {
            None
        } else {
            Some(Point(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn child(&self, a: Elem) -> Point {
        let mut v = self.0.clone();
        v.push(a);
        Point(v)
    }

    pub fn prefix(&self, len: usize) -> Point {
        Point(self.0[..len].to_vec())
    }

    /// True if `self` is a (not necessarily strict) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Point) -> bool {
        self.len() <= other.len() && other.0[..self.len()] == self.0[..]
    }

    /// Coordinates reversed.
    pub fn rev(&self) -> Point {
        let mut v = self.0.clone();
        v.reverse();
        Point(v)
    }

    /// Parses `⊥`, `()`, `_`, or a comma separated tuple with optional
    /// parentheses, e.g. `(0,1)` or `2,3`.
    pub fn parse(s: &str, field: &Field) -> Result<Point, Error> {
        let t = s.trim();
        if t == "⊥" || t == "_" || t == "bot" {
            return Ok(Point::bot());
        }
        let t = t.strip_prefix('(').unwrap_or(t);
        let t = t.strip_suffix(')').unwrap_or(t).trim();
        if t.is_empty() {
            return Ok(Point::bot());
        }
        let mut coords = Vec::new();
        for part in t.split(',') {
            let v: i64 = part.trim().parse().map_err(|_| Error::Parse(format!("bad coordinate {part:?} in {s:?}")))?;
            coords.push(field.from_i64(v));
        }
        Ok(Point(coords))
    }

    /// Parses a `;`-separated list of points.
    pub fn parse_list(s: &str, field: &Field) -> Result<Vec<Point>, Error> {
        if s.trim().is_empty() {
            return Ok(Vec::new());
        }
        s.split(';').map(|p| Point::parse(p, field)).collect()
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "⊥");
        }
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<Elem>> for Point {
    fn from(v: Vec<Elem>) -> Self {
        Point(v)
    }
}

impl From<&[Elem]> for Point {
    fn from(v: &[Elem]) -> Self {
        Point(v.to_vec())
    }
}

/// `A_1 × … × A_m`; each factor nonempty with distinct elements, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProductSet {
    factors: Vec<Vec<Elem>>,
}

impl ProductSet {
    pub fn new(mut factors: Vec<Vec<Elem>>) -> Result<Self, Error> {
        for (i, a) in factors.iter_mut().enumerate() {
            if a.is_empty() {
                return Err(Error::ProductSet(format!("factor {} is empty", i + 1)));
            }
            a.sort_unstable();
            if a.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::ProductSet(format!("factor {} has repeated elements", i + 1)));
            }
        }
        Ok(ProductSet { factors })
    }

    /// `A^m`.
    pub fn cube(a: &[Elem], m: usize) -> Result<Self, Error> {
        ProductSet::new(vec![a.to_vec(); m])
    }

    /// Checks every element is below `p`.
    pub fn check_field(&self, f: &Field) -> Result<(), Error> {
        if self.factors.iter().flatten().any(|&x| x >= f.p()) {
            return Err(Error::ProductSet(format!("element outside F_{}", f.p())));
        }
        Ok(())
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Vec<Elem>] {
        &self.factors
    }

    /// `A_i`, 1-based as in the usual notation.
    pub fn factor(&self, i: usize) -> &[Elem] {
        &self.factors[i - 1]
    }

    pub fn size(&self) -> u128 {
        self.factors.iter().map(|a| a.len() as u128).product()
    }

    /// `∏_{j=lo}^{hi} |A_j|` (1-based, empty product is 1).
    pub fn range_size(&self, lo: usize, hi: usize) -> u128 {
        (lo..=hi).filter(|&j| j >= 1 && j <= self.m()).map(|j| self.factors[j - 1].len() as u128).product()
    }

    pub fn contains(&self, x: &[Elem]) -> bool {
        x.len() == self.m() && x.iter().zip(&self.factors).all(|(v, a)| a.binary_search(v).is_ok())
    }

    /// True if `x` has length ≤ m and coordinate `j` lies in `A_j`.
    pub fn contains_prefix(&self, x: &[Elem]) -> bool {
        x.len() <= self.m() && x.iter().zip(&self.factors).all(|(v, a)| a.binary_search(v).is_ok())
    }

    /// `A_1 × … × A_i`.
    pub fn prefix_set(&self, i: usize) -> ProductSet {
        ProductSet { factors: self.factors[..i].to_vec() }
    }

    /// `A_{i+1} × … × A_m`.
    pub fn suffix_set(&self, i: usize) -> ProductSet {
        ProductSet { factors: self.factors[i..].to_vec() }
    }

    /// Points in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        let mut out = vec![Vec::new()];
        for a in &self.factors {
            let mut next = Vec::with_capacity(out.len() * a.len());
            for p in &out {
                for &x in a {
                    let mut q: Vec<Elem> = p.clone();
                    q.push(x);
                    next.push(q);
                }
            }
            out = next;
        }
        out.into_iter().map(Point).collect()
    }

    /// Index of `x` in [`ProductSet::points`] order.
    pub fn index_of(&self, x: &[Elem]) -> Option<usize> {
        if x.len() != self.m() {
            return None;
        }
        let mut idx = 0;
        for (v, a) in x.iter().zip(&self.factors) {
            let k = a.binary_search(v).ok()?;
            idx = idx * a.len() + k;
        }
        Some(idx)
    }

    /// All prefixes `𝒜̄ = ∪_{i≤m} A_1×…×A_i` in (length, lex) order.
    pub fn all_prefixes(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for i in 0..=self.m() {
            out.extend(self.prefix_set(i).points());
        }
        out
    }

    /// `A_i = A_{m-i+1}` for all `i`.
    pub fn is_reversal_symmetric(&self) -> bool {
        let m = self.m();
        (0..m).all(|i| self.factors[i] == self.factors[m - 1 - i])
    }
}

/// All points of `F^m` in lexicographic order, as flat index → coordinates.
pub fn field_points(f: &Field, m: usize) -> Vec<Point> {
    ProductSet::cube(&(0..f.p()).collect::<Vec<_>>(), m).expect("field is a valid factor").points()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_length_then_lex() {
        let mut v = vec![Point::new(&[1, 0]), Point::new(&[2]), Point::bot(), Point::new(&[0, 3]), Point::new(&[0])];
        v.sort();
        let s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["⊥", "(0)", "(2)", "(0,3)", "(1,0)"]);
    }

    #[test]
    fn parsing() {
        let f = Field::new(5).unwrap();
        assert_eq!(Point::parse("⊥", &f).unwrap(), Point::bot());
        assert_eq!(Point::parse("()", &f).unwrap(), Point::bot());
        assert_eq!(Point::parse("(0, 7)", &f).unwrap(), Point::new(&[0, 2]));
        assert_eq!(Point::parse("-1", &f).unwrap(), Point::new(&[4]));
        assert!(Point::parse("(a)", &f).is_err());
        let l = Point::parse_list("(0,0);(2,2)", &f).unwrap();
        assert_eq!(l.len(), 2);
    }

    #[test]
    fn product_set_basics() {
        let s = ProductSet::new(vec![vec![1, 0], vec![0, 1, 2]]).unwrap();
        assert_eq!(s.size(), 6);
        let pts = s.points();
        assert_eq!(pts[0], Point::new(&[0, 0]));
        assert_eq!(pts[5], Point::new(&[1, 2]));
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(s.index_of(p.coords()), Some(i));
        }
        assert!(ProductSet::new(vec![vec![]]).is_err());
        assert!(ProductSet::new(vec![vec![1, 1]]).is_err());
        assert_eq!(s.all_prefixes().len(), 1 + 2 + 6);
        assert!(!s.is_reversal_symmetric());
    }
}
