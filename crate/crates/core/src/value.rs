//! Scalars that the linear solvers and simulators are generic over.
//!
//! A concrete run uses plain field elements and an RNG. The exact audits run
//! the same code with [`Affine`] values: every "uniform" draw becomes a fresh
//! formal variable, and the answers come out as affine forms in those
//! variables.

use rand::RngCore;

use crate::field::{Elem, Field};

pub trait Value: Clone + std::fmt::Debug {
    fn constant(c: Elem) -> Self;
    /// `self += c * other`
    fn add_scaled(&mut self, f: &Field, c: Elem, other: &Self);
    /// True when the value is identically zero.
    fn is_zero(&self) -> bool;
    fn as_constant(&self) -> Option<Elem>;

    fn scaled(&self, f: &Field, c: Elem) -> Self {
        let mut out = Self::constant(0);
        out.add_scaled(f, c, self);
        out
    }

    fn sub(&self, f: &Field, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(f, f.neg(1), other);
        out
    }
}

impl Value for Elem {
    fn constant(c: Elem) -> Self {
        c
    }
    fn add_scaled(&mut self, f: &Field, c: Elem, other: &Self) {
        *self = f.add(*self, f.mul(c, *other));
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn as_constant(&self) -> Option<Elem> {
        Some(*self)
    }
}

/// `c + sum_k terms[k] * u_k` over formal uniform variables `u_k`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Affine {
    pub c: Elem,
    pub terms: Vec<Elem>,
}

impl Affine {
    pub fn var(k: usize) -> Self {
        let mut terms = vec![0; k + 1];
        terms[k] = 1;
        Affine { c: 0, terms }
    }

    /// Coefficient vector padded to `n` variables.
    pub fn coeffs(&self, n: usize) -> Vec<Elem> {
        let mut v = self.terms.clone();
        v.resize(n.max(v.len()), 0);
        v.truncate(n);
        v
    }

    pub fn eval(&self, f: &Field, u: &[Elem]) -> Elem {
        let mut acc = self.c;
        for (k, &t) in self.terms.iter().enumerate() {
            if t != 0 {
                acc = f.add(acc, f.mul(t, u[k]));
            }
        }
        acc
    }
}

impl Value for Affine {
    fn constant(c: Elem) -> Self {
        Affine { c, terms: Vec::new() }
    }
    fn add_scaled(&mut self, f: &Field, c: Elem, other: &Self) {
        if c == 0 {
            return;
        }
        self.c = f.add(self.c, f.mul(c, other.c));
        if self.terms.len() < other.terms.len() {
            self.terms.resize(other.terms.len(), 0);
        }
        for (k, &t) in other.terms.iter().enumerate() {
            if t != 0 {
                self.terms[k] = f.add(self.terms[k], f.mul(c, t));
            }
        }
    }
    fn is_zero(&self) -> bool {
        self.c == 0 && self.terms.iter().all(|&t| t == 0)
    }
    fn as_constant(&self) -> Option<Elem> {
        if self.terms.iter().all(|&t| t == 0) {
            Some(self.c)
        } else {
            None
        }
    }
}

/// Source of fresh uniform values.
pub trait Sampler<V> {
    fn fresh(&mut self) -> V;
}

pub struct RandomSampler<'a, R: RngCore + ?Sized> {
    pub field: Field,
    pub rng: &'a mut R,
}

impl<R: RngCore + ?Sized> Sampler<Elem> for RandomSampler<'_, R> {
    fn fresh(&mut self) -> Elem {
        self.field.sample(self.rng)
    }
}

/// Hands out formal variables `u_0, u_1, ...`.
#[derive(Debug, Default)]
pub struct SymbolicSampler {
    pub count: usize,
}

impl Sampler<Affine> for SymbolicSampler {
    fn fresh(&mut self) -> Affine {
        let v = Affine::var(self.count);
        self.count += 1;
        v
    }
}
