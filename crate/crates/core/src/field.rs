//! Prime-field arithmetic on canonical `u64` representatives.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::Error;

/// A field element: always the canonical representative in `[0, p)`.
pub type Elem = u64;

/// The prime field `F_p`.
///
/// Moduli are limited to `p < 2^32` so that products fit in a `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    p: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut q = n + 1;
    while !is_prime(q) {
        q += 1;
    }
    q
}

impl Field {
    pub fn new(p: u64) -> Result<Self, Error> {
        if !is_prime(p) || p >= 1 << 32 {
            return Err(Error::BadModulus(p));
        }
        Ok(Field { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of elements as a `usize`.
    #[inline]
    pub fn size(&self) -> usize {
        self.p as usize
    }

    #[inline]
    pub fn elem(&self, v: u64) -> Elem {
        v % self.p
    }

    pub fn from_i64(&self, v: i64) -> Elem {
        v.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        a * b % self.p
    }

    pub fn pow(&self, mut a: Elem, mut e: u64) -> Elem {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }

    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, it: I) -> Elem {
        it.into_iter().fold(0, |acc, x| self.add(acc, x))
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.p
    }

    /// Uniform element by rejection sampling on the low `bits(p)` bits.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Elem {
        let bits = 64 - (self.p - 1).leading_zeros();
        let mask = if bits == 0 { 0 } else { (1u64 << bits) - 1 };
        loop {
            let v = rng.next_u64() & mask;
            if v < self.p {
                return v;
            }
        }
    }

    pub fn sample_vec<R: RngCore + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Elem> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Dot product of two equal-length vectors.
    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        debug_assert_eq!(a.len(), b.len());
        let mut acc = 0u64;
        for (x, y) in a.iter().zip(b) {
            acc = (acc + x * y) % self.p;
        }
        acc
    }
}
