//! Masked sumcheck proof: the prover sends subcube sums of `F + R` for a
//! random mask `R = Q − Q_rev + Σ Z_H(X_i) T_i`, together with the tables of
//! `Q` and the `T_i`. The verifier runs the unrolled sumcheck, recomputes
//! `R` at the final point from the mask tables, and tests the mask tables
//! for low individual degree.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::field::{Elem, Field};
use crate::point::{Point, ProductSet};
use crate::Error;

pub mod arith;
pub mod format;
pub mod prover;
pub mod simulator;
pub mod verifier;

pub use arith::{arithmetize, model_count, sharp_sat_params, CnfInstance};
pub use prover::{prove, prove_lazy, LazyProof, Oracle, ProofOracle};
pub use simulator::{PcpSimulator, SimMode};
pub use verifier::{sample_coins, verify, verify_with_coins, Coins, Verdict};

/// Table size limit for materialised proofs.
pub const DEFAULT_CAP: u128 = 1 << 24;

/// Common input `(F, m, d, H, γ)` plus the sumcheck reading set `D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PcpParams {
    pub p: u64,
    pub m: usize,
    pub d: usize,
    pub h: Vec<Elem>,
    /// `H` followed by the smallest other elements, `min(d+1, p)` in total,
    /// sorted.
    pub d_nodes: Vec<Elem>,
    pub gamma: Elem,
}

impl PcpParams {
    pub fn new(p: u64, m: usize, d: usize, h: &[Elem], gamma: u64) -> Result<Self, Error> {
        let field = Field::new(p)?;
        if m == 0 {
            return Err(Error::Params("m must be at least 1".into()));
        }
        let mut h = h.to_vec();
        h.sort_unstable();
        h.dedup();
        if h.is_empty() {
            return Err(Error::Params("H is empty".into()));
        }
        if let Some(x) = h.iter().find(|&&x| x >= p) {
            return Err(Error::Params(format!("{x} is not an element of F_{p}")));
        }
        if d < h.len() + 1 {
            return Err(Error::Params(format!("d = {d} < |H| + 1 = {}", h.len() + 1)));
        }
        let want = (d + 1).min(p as usize);
        let mut nodes = h.clone();
        let mut x = 0;
        while nodes.len() < want {
            if !h.contains(&x) {
                nodes.push(x);
            }
            x += 1;
        }
        nodes.sort_unstable();
        Ok(PcpParams { p, m, d, h, d_nodes: nodes, gamma: field.elem(gamma) })
    }

    pub fn field(&self) -> Field {
        Field::new(self.p).expect("validated at construction")
    }

    /// `(d, …, d)`
    pub fn dv(&self) -> Vec<usize> {
        vec![self.d; self.m]
    }

    /// Degree vector of `T_i` (0-based `i`): `d − |H|` on axis `i`.
    pub fn t_dv(&self, i: usize) -> Vec<usize> {
        let mut dv = self.dv();
        dv[i] = self.d - self.h.len();
        dv
    }

    /// `H^m`
    pub fn cube(&self) -> ProductSet {
        ProductSet::cube(&self.h, self.m).expect("H validated")
    }

    /// `m·d < p/10`, needed for the soundness bound but not for the
    /// construction itself.
    pub fn soundness_precondition(&self) -> bool {
        10 * ((self.m * self.d) as u128) < u128::from(self.p)
    }

    /// `|F|^m`
    pub fn table_len(&self) -> u128 {
        (self.p as u128).pow(self.m as u32)
    }

    /// `|F^{≤m}|`
    pub fn sigma_len(&self) -> u128 {
        (0..=self.m as u32).map(|l| (self.p as u128).pow(l)).sum()
    }

    pub fn with_gamma(&self, gamma: u64) -> Self {
        PcpParams { gamma: gamma % self.p, ..self.clone() }
    }
}

/// Which proof table a query goes to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum OracleId {
    Sigma,
    Q,
    /// `T_i`, 1-based.
    T(usize),
}

impl fmt::Display for OracleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleId::Sigma => write!(f, "sigma"),
            OracleId::Q => write!(f, "q"),
            OracleId::T(i) => write!(f, "t{i}"),
        }
    }
}

impl FromStr for OracleId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sigma" | "pi_sigma" | "s" => Ok(OracleId::Sigma),
            "q" | "pi_q" => Ok(OracleId::Q),
            t => {
                let n = t.strip_prefix("pi_").unwrap_or(t).strip_prefix('t').and_then(|n| n.parse::<usize>().ok());
                match n {
                    Some(i) if i >= 1 => Ok(OracleId::T(i)),
                    _ => Err(Error::Parse(format!("unknown oracle {s:?}"))),
                }
            }
        }
    }
}

impl From<OracleId> for String {
    fn from(o: OracleId) -> String {
        o.to_string()
    }
}

impl TryFrom<String> for OracleId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl OracleId {
    /// Checks the oracle exists and the point has the right length.
    pub fn check(&self, params: &PcpParams, x: &Point) -> Result<(), Error> {
        if x.coords().iter().any(|&c| c >= params.p) {
            return Err(Error::NotInSet(x.to_string()));
        }
        match self {
            OracleId::Sigma if x.len() <= params.m => Ok(()),
            OracleId::Q if x.len() == params.m => Ok(()),
            OracleId::T(i) if (1..=params.m).contains(i) && x.len() == params.m => Ok(()),
            OracleId::T(i) if !(1..=params.m).contains(i) => Err(Error::Params(format!("no table t{i} for m = {}", params.m))),
            _ => Err(Error::Arity { expected: params.m, found: x.len() }),
        }
    }
}

/// Lexicographic index of `x` among the points of `F^{|x|}`.
pub fn lex_index(p: u64, x: &[Elem]) -> usize {
    x.iter().fold(0usize, |acc, &c| acc * p as usize + c as usize)
}

/// Index of `x` in `F^{≤m}` ordered by length, then lexicographically.
pub fn sigma_index(p: u64, x: &[Elem]) -> usize {
    let below: usize = (0..x.len() as u32).map(|l| (p as usize).pow(l)).sum();
    below + lex_index(p, x)
}

/// A query and its answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub oracle: OracleId,
    pub point: Point,
    pub answer: Elem,
}
