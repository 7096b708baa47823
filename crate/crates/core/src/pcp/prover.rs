//! Honest prover and proof access.

use rand::RngCore;

use crate::field::{Elem, Field};
use crate::point::Point;
use crate::poly::{vanishing, MultiPoly};
use crate::Error;

use super::{lex_index, sigma_index, OracleId, PcpParams};

/// Read access to a proof.
pub trait Oracle {
    fn params(&self) -> &PcpParams;
    fn read(&self, id: OracleId, x: &Point) -> Result<Elem, Error>;
}

/// The prover's random polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Masks {
    pub q: MultiPoly,
    pub t: Vec<MultiPoly>,
}

pub fn sample_masks<R: RngCore + ?Sized>(params: &PcpParams, rng: &mut R) -> Masks {
    let f = params.field();
    let q = MultiPoly::random(&f, &params.dv(), rng);
    let t = (0..params.m).map(|i| MultiPoly::random(&f, &params.t_dv(i), rng)).collect();
    Masks { q, t }
}

/// `R = Q − Q_rev + Σ_i Z_H(X_i) T_i`
pub fn mask_poly(params: &PcpParams, masks: &Masks) -> MultiPoly {
    let f = params.field();
    let z = vanishing(&f, &params.h);
    let mut r = masks.q.sub(&f, &masks.q.rev());
    for (i, t) in masks.t.iter().enumerate() {
        r = r.add(&f, &MultiPoly::in_var(&z, i, params.m).mul(&f, t));
    }
    r.with_dv(&params.dv()).expect("mask has degree d")
}

fn lift(params: &PcpParams, fpoly: &MultiPoly) -> Result<MultiPoly, Error> {
    if fpoly.m() != params.m {
        return Err(Error::Arity { expected: params.m, found: fpoly.m() });
    }
    fpoly.with_dv(&params.dv())
}

/// Proof with full tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofOracle {
    pub params: PcpParams,
    /// Indexed by [`sigma_index`].
    pub pi_sigma: Vec<Elem>,
    /// Indexed by [`lex_index`].
    pub pi_q: Vec<Elem>,
    pub pi_t: Vec<Vec<Elem>>,
}

impl Oracle for ProofOracle {
    fn params(&self) -> &PcpParams {
        &self.params
    }

    fn read(&self, id: OracleId, x: &Point) -> Result<Elem, Error> {
        id.check(&self.params, x)?;
        let p = self.params.p;
        let (table, k) = match id {
            OracleId::Sigma => (&self.pi_sigma, sigma_index(p, x.coords())),
            OracleId::Q => (&self.pi_q, lex_index(p, x.coords())),
            OracleId::T(i) => (&self.pi_t[i - 1], lex_index(p, x.coords())),
        };
        table.get(k).copied().ok_or_else(|| Error::Parse(format!("proof table {id} has no entry for {x}")))
    }
}

/// Subcube sums of a table over `H^{m−l}` for every level `l`, in
/// [`sigma_index`] order.
pub fn sigma_table(params: &PcpParams, full: &[Elem]) -> Vec<Elem> {
    let f = params.field();
    let p = params.p as usize;
    let mut levels: Vec<Vec<Elem>> = vec![full.to_vec()];
    for _ in 0..params.m {
        let above = levels.last().expect("nonempty");
        let next: Vec<Elem> = (0..above.len() / p).map(|k| f.sum(params.h.iter().map(|&a| above[k * p + a as usize]))).collect();
        levels.push(next);
    }
    levels.into_iter().rev().flatten().collect()
}

/// Honest proof for `Σ_{H^m} F = γ` with materialised tables.
pub fn prove<R: RngCore + ?Sized>(params: &PcpParams, fpoly: &MultiPoly, rng: &mut R, cap: u128) -> Result<ProofOracle, Error> {
    let need = params.sigma_len() + (params.m as u128 + 1) * params.table_len();
    if need > cap {
        return Err(Error::Cap(need, cap));
    }
    let f = params.field();
    let fl = lift(params, fpoly)?;
    let masks = sample_masks(params, rng);
    Ok(proof_from_masks(params, &f, &fl, &masks))
}

pub fn proof_from_masks(params: &PcpParams, f: &Field, fpoly: &MultiPoly, masks: &Masks) -> ProofOracle {
    let total = fpoly.add(f, &mask_poly(params, masks));
    ProofOracle {
        params: params.clone(),
        pi_sigma: sigma_table(params, &total.eval_table(f)),
        pi_q: masks.q.eval_table(f),
        pi_t: masks.t.iter().map(|t| t.eval_table(f)).collect(),
    }
}

/// Proof that evaluates its entries on demand from the polynomials.
#[derive(Clone, Debug)]
pub struct LazyProof {
    pub params: PcpParams,
    pub total: MultiPoly,
    pub masks: Masks,
}

pub fn prove_lazy<R: RngCore + ?Sized>(params: &PcpParams, fpoly: &MultiPoly, rng: &mut R) -> Result<LazyProof, Error> {
    let f = params.field();
    let fl = lift(params, fpoly)?;
    let masks = sample_masks(params, rng);
    Ok(LazyProof { params: params.clone(), total: fl.add(&f, &mask_poly(params, &masks)), masks })
}

impl LazyProof {
    pub fn materialize(&self, cap: u128) -> Result<ProofOracle, Error> {
        let need = self.params.sigma_len() + (self.params.m as u128 + 1) * self.params.table_len();
        if need > cap {
            return Err(Error::Cap(need, cap));
        }
        let f = self.params.field();
        Ok(ProofOracle {
            params: self.params.clone(),
            pi_sigma: sigma_table(&self.params, &self.total.eval_table(&f)),
            pi_q: self.masks.q.eval_table(&f),
            pi_t: self.masks.t.iter().map(|t| t.eval_table(&f)).collect(),
        })
    }
}

impl Oracle for LazyProof {
    fn params(&self) -> &PcpParams {
        &self.params
    }

    fn read(&self, id: OracleId, x: &Point) -> Result<Elem, Error> {
        id.check(&self.params, x)?;
        let f = self.params.field();
        Ok(match id {
            OracleId::Sigma => crate::poly::subcube_sum(&f, &self.total, &self.params.cube(), x.coords())?,
            OracleId::Q => self.masks.q.eval_unchecked(&f, x.coords()),
            OracleId::T(i) => self.masks.t[i - 1].eval_unchecked(&f, x.coords()),
        })
    }
}
