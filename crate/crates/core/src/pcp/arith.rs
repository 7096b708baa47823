//! #SAT as a sum over the Boolean cube.

use serde::{Deserialize, Serialize};

use crate::field::{next_prime, Elem, Field};
use crate::poly::MultiPoly;
use crate::Error;

use super::PcpParams;

/// CNF over variables `1..=num_vars`; literal `-i` is the negation of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfInstance {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl CnfInstance {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, Error> {
        for c in &clauses {
            if let Some(&l) = c.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > num_vars) {
                return Err(Error::Parse(format!("literal {l} out of range 1..={num_vars}")));
            }
        }
        Ok(CnfInstance { num_vars, clauses })
    }

    /// Clauses with repeated literals merged and tautologies dropped.
    pub fn normalized(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for c in &self.clauses {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            if c.iter().any(|l| c.contains(&-l)) {
                continue;
            }
            out.push(c);
        }
        out
    }

    /// Number of (normalized) clauses mentioning each variable.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.num_vars];
        for c in self.normalized() {
            for l in c {
                occ[l.unsigned_abs() as usize - 1] += 1;
            }
        }
        occ
    }

    pub fn satisfied_by(&self, bits: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| bits[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    /// `∏_C (1 − ∏_{ℓ∈C} (1 − enc(ℓ)))` at `x`, straight from the clauses.
    pub fn eval_arith(&self, f: &Field, x: &[Elem]) -> Elem {
        let one = 1 % f.p();
        let mut acc = one;
        for c in self.normalized() {
            let mut miss = one;
            for l in c {
                let xi = x[l.unsigned_abs() as usize - 1];
                let lit = if l > 0 { xi } else { f.sub(one, xi) };
                miss = f.mul(miss, f.sub(one, lit));
            }
            acc = f.mul(acc, f.sub(one, miss));
        }
        acc
    }
}

/// Number of satisfying assignments, by truth table.
pub fn model_count(cnf: &CnfInstance) -> u128 {
    let n = cnf.num_vars;
    (0u64..1 << n).filter(|&mask| cnf.satisfied_by(&(0..n).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>())).count() as u128
}

/// The arithmetization as a polynomial; the degree in `X_i` is the number of
/// clauses mentioning variable `i`.
pub fn arithmetize(f: &Field, cnf: &CnfInstance) -> MultiPoly {
    let m = cnf.num_vars;
    let one = 1 % f.p();
    let mut acc = MultiPoly::constant(m, one);
    for c in cnf.normalized() {
        let mut miss = MultiPoly::constant(m, one);
        for l in c {
            let i = l.unsigned_abs() as usize - 1;
            let xi = MultiPoly::var(m, i);
            // 1 − enc(ℓ) is 1 − X_i or X_i
            let factor = if l > 0 { MultiPoly::constant(m, one).sub(f, &xi) } else { xi };
            miss = miss.mul(f, &factor);
        }
        acc = acc.mul(f, &MultiPoly::constant(m, one).sub(f, &miss));
    }
    let occ = cnf.occurrences();
    acc.with_dv(&occ).expect("degree equals occurrence count")
}

/// Parameters for proving `#Φ = count`: `H = {0,1}`, `m = n`,
/// `d = max(3, max occurrence)`, and `p` the smallest prime above both
/// `10·m·d` and `2^n` unless `field` overrides it.
pub fn sharp_sat_params(cnf: &CnfInstance, count: u128, field: Option<u64>) -> Result<PcpParams, Error> {
    let m = cnf.num_vars;
    if m == 0 {
        return Err(Error::Params("formula has no variables".into()));
    }
    if m >= 32 {
        return Err(Error::Params(format!("{m} variables: counts do not fit the field size limit")));
    }
    let d = cnf.occurrences().into_iter().max().unwrap_or(0).max(3);
    let bound = 1u64 << m;
    let p = match field {
        Some(p) => {
            if p <= bound {
                return Err(Error::Params(format!("p = {p} must exceed 2^{m} = {bound} so counts do not wrap")));
            }
            p
        }
        None => next_prime((10 * m * d) as u64).max(next_prime(bound)),
    };
    let gamma = (count % p as u128) as u64;
    PcpParams::new(p, m, d, &[0, 1], gamma)
}
