//! Verifier: unrolled sumcheck over the reading set `D`, the final mask
//! check, and line tests on the mask tables.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::field::{Elem, Field};
use crate::point::Point;
use crate::poly::vanishing;

use super::prover::Oracle;
use super::{OracleId, PcpParams, QueryRecord};

/// Lines per table: `⌈4(m+2)·ln 2⌉`.
pub fn line_count(m: usize) -> usize {
    (4.0 * (m as f64 + 2.0) * std::f64::consts::LN_2).ceil() as usize
}

/// One axis-parallel line: all points agreeing with `base` off `axis`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineTest {
    pub table: OracleId,
    /// 0-based.
    pub axis: usize,
    pub base: Vec<Elem>,
}

/// All of the verifier's randomness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coins {
    pub path: Vec<Elem>,
    pub lines: Vec<LineTest>,
}

pub fn sample_coins<R: RngCore + ?Sized>(params: &PcpParams, rng: &mut R) -> Coins {
    let f = params.field();
    let path = f.sample_vec(params.m, rng);
    let r = line_count(params.m);
    let tables = std::iter::once(OracleId::Q).chain((1..=params.m).map(OracleId::T));
    let mut lines = Vec::new();
    for table in tables {
        for _ in 0..r {
            let axis = rng.gen_range(0..params.m);
            let base = f.sample_vec(params.m, rng);
            lines.push(LineTest { table, axis, base });
        }
    }
    Coins { path, lines }
}

/// A check that failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Check {
    /// `π_Σ(⊥) ≠ γ`
    Root,
    /// Round `i` (1-based): the sum of `g_i` over `H` is not the previous claim.
    Round(usize),
    /// `g_m(c_m) ≠ F(c) + R(c)`.
    Final,
    LowDegree(OracleId),
    /// The proof could not answer a query.
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub accept: bool,
    pub failures: Vec<Check>,
    pub log: Vec<QueryRecord>,
}

/// `Σ_k vals[k] L_k(c)` for the Lagrange basis of `nodes`.
pub fn interpolate_at(f: &Field, nodes: &[Elem], vals: &[Elem], c: Elem) -> Elem {
    if let Some(k) = nodes.iter().position(|&x| x == c) {
        return vals[k];
    }
    let mut acc = 0;
    for (k, &xk) in nodes.iter().enumerate() {
        let mut num = 1 % f.p();
        let mut den = 1 % f.p();
        for (j, &xj) in nodes.iter().enumerate() {
            if j != k {
                num = f.mul(num, f.sub(c, xj));
                den = f.mul(den, f.sub(xk, xj));
            }
        }
        acc = f.add(acc, f.mul(vals[k], f.div(num, den)));
    }
    acc
}

/// Values at `0, 1, …, n−1` (with `n ≤ p`) come from a polynomial of
/// degree `≤ deg` iff the `(deg+1)`-th finite differences vanish.
pub fn low_degree_line(f: &Field, vals: &[Elem], deg: usize) -> bool {
    if vals.len() <= deg + 1 {
        return true;
    }
    let mut cur = vals.to_vec();
    for _ in 0..=deg {
        cur = cur.windows(2).map(|w| f.sub(w[1], w[0])).collect();
    }
    cur.iter().all(|&x| x == 0)
}

struct Reader<'a> {
    oracle: &'a dyn Oracle,
    log: Vec<QueryRecord>,
    failures: Vec<Check>,
}

impl Reader<'_> {
    fn read(&mut self, id: OracleId, x: Point) -> Option<Elem> {
        match self.oracle.read(id, &x) {
            Ok(v) => {
                self.log.push(QueryRecord { oracle: id, point: x, answer: v });
                Some(v)
            }
            Err(e) => {
                self.failures.push(Check::Malformed(format!("{id}{x}: {e}")));
                None
            }
        }
    }
}

/// Runs every check with the given coins. `f_eval` evaluates `F` on `F^m`.
pub fn verify_with_coins(params: &PcpParams, f_eval: &dyn Fn(&[Elem]) -> Elem, oracle: &dyn Oracle, coins: &Coins) -> Verdict {
    let f = params.field();
    let m = params.m;
    let mut rd = Reader { oracle, log: Vec::new(), failures: Vec::new() };

    if let Some(root) = rd.read(OracleId::Sigma, Point::bot()) {
        if root != params.gamma {
            rd.failures.push(Check::Root);
        }
    }
    let mut claim = Some(params.gamma);
    for i in 1..=m {
        let prefix = &coins.path[..i - 1];
        let vals: Option<Vec<Elem>> =
            params.d_nodes.iter().map(|&x| rd.read(OracleId::Sigma, Point(prefix.iter().copied().chain([x]).collect()))).collect();
        let Some(vals) = vals else {
            claim = None;
            break;
        };
        let hsum = f.sum(params.h.iter().map(|a| vals[params.d_nodes.binary_search(a).expect("H inside D")]));
        if Some(hsum) != claim {
            rd.failures.push(Check::Round(i));
        }
        claim = Some(interpolate_at(&f, &params.d_nodes, &vals, coins.path[i - 1]));
    }

    let alpha = Point(coins.path.clone());
    let q = rd.read(OracleId::Q, alpha.clone());
    let qr = rd.read(OracleId::Q, alpha.rev());
    let ts: Option<Vec<Elem>> = (1..=m).map(|i| rd.read(OracleId::T(i), alpha.clone())).collect();
    if let (Some(claim), Some(q), Some(qr), Some(ts)) = (claim, q, qr, ts) {
        let z = vanishing(&f, &params.h);
        let mut r = f.sub(q, qr);
        for (i, t) in ts.iter().enumerate() {
            r = f.add(r, f.mul(z.eval_unchecked(&f, &[alpha.coords()[i]]), *t));
        }
        if claim != f.add(f_eval(alpha.coords()), r) {
            rd.failures.push(Check::Final);
        }
    }

    for line in &coins.lines {
        let deg = match line.table {
            OracleId::T(i) => params.t_dv(i - 1)[line.axis],
            _ => params.d,
        };
        let vals: Option<Vec<Elem>> = (0..params.p)
            .map(|t| {
                let mut x = line.base.clone();
                x[line.axis] = t;
                rd.read(line.table, Point(x))
            })
            .collect();
        if let Some(vals) = vals {
            if !low_degree_line(&f, &vals, deg) && !rd.failures.contains(&Check::LowDegree(line.table)) {
                rd.failures.push(Check::LowDegree(line.table));
            }
        }
    }

    Verdict { accept: rd.failures.is_empty(), failures: rd.failures, log: rd.log }
}

pub fn verify<R: RngCore + ?Sized>(params: &PcpParams, f_eval: &dyn Fn(&[Elem]) -> Elem, oracle: &dyn Oracle, rng: &mut R) -> Verdict {
    let coins = sample_coins(params, rng);
    verify_with_coins(params, f_eval, oracle, &coins)
}

/// Upper bound on queries per run: the sumcheck reads, `m + 2` mask reads,
/// and `p` reads per line.
pub fn query_bound(params: &PcpParams) -> usize {
    1 + params.m * params.d_nodes.len() + params.m + 2 + (params.m + 1) * line_count(params.m) * params.p as usize
}
