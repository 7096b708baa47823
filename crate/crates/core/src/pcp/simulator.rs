//! Simulator for the masked sumcheck proof.
//!
//! `π_Σ` answers follow the composed sum encoding of `(F|_{H^m}, γ)`: its
//! locator gives the relations between the answered `π_Σ` positions and the
//! message. The mask tables are answered at `α` and `rev α` together, and a
//! full-length `π_Σ` query fixes them as well. Each step draws the new values
//! uniformly from the solutions of the stacked system
//!
//! * locator rows on every answered `π_Σ` position,
//! * `Q(x) − Q(rev x) + Σ_i Z_H(x_i) T_i(x) = π_Σ(x) − F(x)` at each resolved `x`,
//! * the detector rows of each table's RM code on its answered points,
//! * `π_Σ(y) − R(y) = F(y)` at every other full-length `y` where the mask
//!   values after the step determine `R(y)`,
//!
//! with every earlier answer substituted as a constant. The last kind keeps
//! later prefix sums through `y` consistent with the hidden mask values.

use std::cell::RefCell;
use std::collections::BTreeSet;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::encoding::{enc_pcp_spec, CubeMessage, EncodingSpec, MessageOracle, QueryAnswerSet};
use crate::field::{Elem, Field};
use crate::linalg::{Matrix, SolvePlan};
use crate::point::Point;
use crate::poly::{monomial_count, monomial_row, subcube_sum, vanishing, DegreeVector, MultiPoly};
use crate::rm::{cd_rm, CodeView};
use crate::value::{RandomSampler, Sampler, Value};
use crate::Error;

use super::prover::Oracle;
use super::verifier::{verify_with_coins, Coins, Verdict};
use super::{OracleId, PcpParams, QueryRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SimMode {
    #[default]
    Faithful,
    /// Drops the rows tying the mask tables to `π_Σ`. Test fixture only.
    OmitMaskRow,
}

#[derive(Clone, Debug)]
pub struct PcpSimulator<V> {
    pub params: PcpParams,
    pub fpoly: MultiPoly,
    pub mode: SimMode,
    pub spec: EncodingSpec,
    pub sigma: QueryAnswerSet<V>,
    pub q: QueryAnswerSet<V>,
    pub t: Vec<QueryAnswerSet<V>>,
    /// Message positions read.
    pub reads: BTreeSet<Point>,
    pub transcript: Vec<(OracleId, Point, V)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Col {
    Sigma(Point),
    Q(Point),
    T(usize, Point),
}

/// Rows over the unknown columns, right-hand sides over known values.
/// Largest `p^m` for which stored mask values are checked against every
/// full-length point after each step.
pub const CLOSURE_CAP: u128 = 1 << 12;

struct ZeroSampler;

impl Sampler<Elem> for ZeroSampler {
    fn fresh(&mut self) -> Elem {
        0
    }
}

struct System<'a, V> {
    f: Field,
    cols: &'a [Col],
    rows: Vec<Vec<Elem>>,
    rhs: Vec<V>,
}

impl<V: Value> System<'_, V> {
    /// Adds `Σ c·value = base`; each value is a column or already known.
    fn push(&mut self, terms: impl IntoIterator<Item = (Col, Elem, Option<V>)>, base: V) {
        let f = self.f;
        let mut row = vec![0; self.cols.len()];
        let mut b = base;
        for (col, c, known) in terms {
            match known {
                Some(v) => b.add_scaled(&f, f.neg(c), &v),
                None => {
                    let k = self.cols.iter().position(|x| *x == col).expect("unknown value has a column");
                    row[k] = f.add(row[k], c);
                }
            }
        }
        self.rows.push(row);
        self.rhs.push(b);
    }
}

impl<V: Value> PcpSimulator<V> {
    /// Errors if `γ ≠ Σ_{H^m} F`.
    pub fn new(params: &PcpParams, fpoly: &MultiPoly, mode: SimMode) -> Result<Self, Error> {
        let f = params.field();
        let fpoly = fpoly.with_dv(&params.dv())?;
        let actual = subcube_sum(&f, &fpoly, &params.cube(), &[])?;
        if actual != params.gamma {
            return Err(Error::FalseStatement { claimed: params.gamma, actual });
        }
        let spec = enc_pcp_spec(f, &params.h, &params.dv())?;
        Ok(PcpSimulator {
            params: params.clone(),
            fpoly,
            mode,
            spec,
            sigma: QueryAnswerSet::default(),
            q: QueryAnswerSet::default(),
            t: vec![QueryAnswerSet::default(); params.m],
            reads: BTreeSet::new(),
            transcript: Vec::new(),
        })
    }

    pub fn query<S: Sampler<V>>(&mut self, id: OracleId, x: &Point, sampler: &mut S) -> Result<V, Error> {
        id.check(&self.params, x)?;
        let table = match id {
            OracleId::Sigma => &self.sigma,
            OracleId::Q => &self.q,
            OracleId::T(i) => &self.t[i - 1],
        };
        if table.get(x).is_none() {
            self.extend(x, id == OracleId::Sigma, sampler)?;
        }
        let table = match id {
            OracleId::Sigma => &self.sigma,
            OracleId::Q => &self.q,
            OracleId::T(i) => &self.t[i - 1],
        };
        let v = table.get(x).expect("answered").clone();
        self.transcript.push((id, x.clone(), v.clone()));
        Ok(v)
    }

    /// Answers `x` in `π_Σ` (if `sigma`), and for a full-length `x` every
    /// table at `x` and `rev x`.
    fn extend<S: Sampler<V>>(&mut self, x: &Point, sigma: bool, sampler: &mut S) -> Result<(), Error> {
        let m = self.params.m;
        let mut full: Vec<Point> = Vec::new();
        if x.len() == m && self.q.get(x).is_none() {
            full.push(x.clone());
            if x.rev() != *x {
                full.push(x.rev());
            }
        }
        let mut new_sigma: Vec<Point> = Vec::new();
        if sigma && self.sigma.get(x).is_none() {
            new_sigma.push(x.clone());
        }
        for y in &full {
            if !new_sigma.contains(y) && self.sigma.get(y).is_none() {
                new_sigma.push(y.clone());
            }
        }
        let forced = if full.is_empty() || self.mode != SimMode::Faithful { Vec::new() } else { self.forced_sigma(&full, &new_sigma) };
        for (y, _) in &forced {
            new_sigma.push(y.clone());
        }
        self.solve_step(x, new_sigma, &full, forced, sampler)
    }

    /// Full-length points outside `π_Σ` where the mask values stored or
    /// about to be drawn at `full` fix `R(y)`, with `R(y)` as a combination
    /// of those values. Skipped above [`CLOSURE_CAP`] points.
    fn forced_sigma(&self, full: &[Point], skip: &[Point]) -> Vec<(Point, Vec<(Col, Elem)>)> {
        let f = self.params.field();
        let m = self.params.m;
        let Some(n) = u128::from(self.params.p).checked_pow(m as u32).filter(|&n| n <= CLOSURE_CAP) else {
            return Vec::new();
        };
        let dv = self.params.dv();
        let tdv: Vec<DegreeVector> = (0..m).map(|i| self.params.t_dv(i)).collect();
        let span = |dv: &[usize], set: &QueryAnswerSet<V>| {
            let mut pts = set.points();
            pts.extend(full.iter().cloned());
            let cols: Vec<Vec<Elem>> = pts.iter().map(|x| monomial_row(&f, dv, x.coords())).collect();
            let a = Matrix::from_rows(&cols, monomial_count(dv)).transpose();
            (pts, SolvePlan::new(&f, &a))
        };
        let qspan = span(&dv, &self.q);
        let tspans: Vec<_> = (0..m).map(|i| span(&tdv[i], &self.t[i])).collect();
        // `target = Σ c_x mono(x)` over the points of a span
        let combine = |(pts, plan): &(Vec<Point>, SolvePlan), target: Vec<Elem>| -> Option<Vec<(Point, Elem)>> {
            let c = plan.solve(&f, &target, &mut ZeroSampler)?;
            Some(pts.iter().cloned().zip(c).filter(|t| t.1 != 0).collect())
        };
        let z = vanishing(&f, &self.params.h);
        let p = u128::from(self.params.p);
        let mut out = Vec::new();
        'points: for k in 0..n {
            let mut coords = vec![0; m];
            let mut r = k;
            for c in coords.iter_mut().rev() {
                *c = (r % p) as Elem;
                r /= p;
            }
            let y = Point(coords);
            if self.sigma.get(&y).is_some() || skip.contains(&y) {
                continue;
            }
            let mut target = monomial_row(&f, &dv, y.coords());
            let back = monomial_row(&f, &dv, y.rev().coords());
            target.iter_mut().zip(back).for_each(|(a, b)| *a = f.sub(*a, b));
            let Some(qc) = combine(&qspan, target) else { continue };
            let mut terms: Vec<(Col, Elem)> = qc.into_iter().map(|(x, c)| (Col::Q(x), c)).collect();
            for i in 0..m {
                let zc = z.eval_unchecked(&f, &[y.coords()[i]]);
                if zc == 0 {
                    continue;
                }
                let Some(tc) = combine(&tspans[i], monomial_row(&f, &tdv[i], y.coords())) else { continue 'points };
                terms.extend(tc.into_iter().map(|(x, c)| (Col::T(i, x), f.mul(zc, c))));
            }
            out.push((y, terms));
        }
        out
    }

    fn solve_step<S: Sampler<V>>(
        &mut self,
        x: &Point,
        new_sigma: Vec<Point>,
        full: &[Point],
        forced: Vec<(Point, Vec<(Col, Elem)>)>,
        sampler: &mut S,
    ) -> Result<(), Error> {
        let f = self.params.field();
        let m = self.params.m;
        let mut cols: Vec<Col> = new_sigma.iter().cloned().map(Col::Sigma).collect();
        cols.extend(full.iter().cloned().map(Col::Q));
        for i in 0..m {
            cols.extend(full.iter().map(|y| Col::T(i, y.clone())));
        }
        let mut sys = System { f, cols: &cols, rows: Vec::new(), rhs: Vec::new() };

        let mut spts = self.sigma.points();
        spts.extend(new_sigma.iter().cloned());
        let out = self.spec.locate(&spts)?;
        let fp = &self.fpoly;
        let eval = |y: &[Elem]| fp.eval_unchecked(&f, y);
        let msg = CubeMessage { h: self.params.cube(), gamma: self.params.gamma, eval: &eval };
        let mut rvals = Vec::with_capacity(out.r.len());
        for y in &out.r {
            self.reads.insert(y.clone());
            rvals.push(msg.message(y)?);
        }
        for r in 0..out.z.rows() {
            let mut base = V::constant(0);
            for (k, &mv) in rvals.iter().enumerate() {
                base.add_scaled(&f, f.neg(out.z.get(r, k)), &V::constant(mv));
            }
            let terms = out.i.iter().enumerate().map(|(k, y)| (Col::Sigma(y.clone()), out.z.get(r, out.r.len() + k), self.sigma.get(y).cloned()));
            sys.push(terms.filter(|t| t.1 != 0), base);
        }

        if self.mode == SimMode::Faithful {
            let z = vanishing(&f, &self.params.h);
            for y in full {
                let ry = y.rev();
                let mut terms = vec![(Col::Sigma(y.clone()), f.neg(1), self.sigma.get(y).cloned())];
                if ry != *y {
                    terms.push((Col::Q(y.clone()), 1, None));
                    terms.push((Col::Q(ry), f.neg(1), None));
                }
                for i in 0..m {
                    let c = z.eval_unchecked(&f, &[y.coords()[i]]);
                    if c != 0 {
                        terms.push((Col::T(i, y.clone()), c, None));
                    }
                }
                sys.push(terms, V::constant(f.neg(fp.eval_unchecked(&f, y.coords()))));
            }
        }
        // σ(y) − R(y) = F(y) where the mask values fix R(y)
        for (y, terms) in forced {
            let known = |c: &Col| match c {
                Col::Q(x) => self.q.get(x).cloned(),
                Col::T(i, x) => self.t[*i].get(x).cloned(),
                Col::Sigma(x) => self.sigma.get(x).cloned(),
            };
            let mut row = vec![(Col::Sigma(y.clone()), 1, None)];
            row.extend(terms.into_iter().map(|(c, k)| {
                let v = known(&c);
                (c, f.neg(k), v)
            }));
            sys.push(row, V::constant(fp.eval_unchecked(&f, y.coords())));
        }

        if !full.is_empty() {
            let mut qdom = self.q.points();
            qdom.extend(full.iter().cloned());
            let qcd = cd_rm(&CodeView::new(f, &self.params.dv()), &qdom)?;
            for r in 0..qcd.z.rows() {
                let terms = qcd.domain.iter().enumerate().map(|(k, y)| (Col::Q(y.clone()), qcd.z.get(r, k), self.q.get(y).cloned()));
                sys.push(terms.filter(|t| t.1 != 0).collect::<Vec<_>>(), V::constant(0));
            }
            for i in 0..m {
                let mut tdom = self.t[i].points();
                tdom.extend(full.iter().cloned());
                let tcd = cd_rm(&CodeView::new(f, &self.params.t_dv(i)), &tdom)?;
                for r in 0..tcd.z.rows() {
                    let terms = tcd.domain.iter().enumerate().map(|(k, y)| (Col::T(i, y.clone()), tcd.z.get(r, k), self.t[i].get(y).cloned()));
                    sys.push(terms.filter(|t| t.1 != 0).collect::<Vec<_>>(), V::constant(0));
                }
            }
        }

        let a = Matrix::from_rows(&sys.rows, cols.len());
        let sol = SolvePlan::new(&f, &a).solve(&f, &sys.rhs, sampler).ok_or_else(|| Error::Inconsistent(format!("answers before {x}")))?;
        for (col, v) in cols.into_iter().zip(sol) {
            match col {
                Col::Sigma(y) => self.sigma.insert(y, v)?,
                Col::Q(y) => self.q.insert(y, v)?,
                Col::T(i, y) => self.t[i].insert(y, v)?,
            }
        }
        Ok(())
    }
}

/// Coins and answers of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViewRecord {
    pub coins: Coins,
    pub transcript: Vec<QueryRecord>,
}

/// [`Oracle`] view of a simulator with concrete randomness.
pub struct SimOracle<'a, R: RngCore + ?Sized> {
    params: PcpParams,
    pub sim: RefCell<PcpSimulator<Elem>>,
    rng: RefCell<&'a mut R>,
}

impl<'a, R: RngCore + ?Sized> SimOracle<'a, R> {
    pub fn new(sim: PcpSimulator<Elem>, rng: &'a mut R) -> Self {
        SimOracle { params: sim.params.clone(), sim: RefCell::new(sim), rng: RefCell::new(rng) }
    }
}

impl<R: RngCore + ?Sized> Oracle for SimOracle<'_, R> {
    fn params(&self) -> &PcpParams {
        &self.params
    }

    fn read(&self, id: OracleId, x: &Point) -> Result<Elem, Error> {
        let mut rng = self.rng.borrow_mut();
        let mut sampler = RandomSampler { field: self.params.field(), rng: &mut **rng };
        self.sim.borrow_mut().query(id, x, &mut sampler)
    }
}

/// Runs the honest verifier with `coins` against a fresh simulator.
pub fn simulate_verifier<R: RngCore + ?Sized>(
    params: &PcpParams,
    fpoly: &MultiPoly,
    coins: &Coins,
    rng: &mut R,
) -> Result<(ViewRecord, Verdict), Error> {
    let f: Field = params.field();
    let sim = PcpSimulator::new(params, fpoly, SimMode::Faithful)?;
    let oracle = SimOracle::new(sim, rng);
    let fe = |x: &[Elem]| fpoly.eval_unchecked(&f, x);
    let verdict = verify_with_coins(params, &fe, &oracle, coins);
    let view = ViewRecord { coins: coins.clone(), transcript: verdict.log.clone() };
    Ok((view, verdict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcp::verifier::sample_coins;
    use crate::value::{Affine, SymbolicSampler};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn instance(p: u64, rng: &mut ChaCha8Rng) -> (PcpParams, MultiPoly) {
        let pp = PcpParams::new(p, 2, 3, &[0, 1], 0).unwrap();
        let f = pp.field();
        let fpoly = MultiPoly::random(&f, &pp.dv(), rng);
        let gamma = subcube_sum(&f, &fpoly, &pp.cube(), &[]).unwrap();
        (pp.with_gamma(gamma), fpoly)
    }

    #[test]
    fn false_statement_is_refused() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (pp, fpoly) = instance(5, &mut rng);
        let bad = pp.with_gamma(pp.gamma + 1);
        assert!(matches!(PcpSimulator::<Elem>::new(&bad, &fpoly, SimMode::Faithful), Err(Error::FalseStatement { .. })));
    }

    #[test]
    fn simple_answers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (pp, fpoly) = instance(5, &mut rng);
        let mut sim = PcpSimulator::<Affine>::new(&pp, &fpoly, SimMode::Faithful).unwrap();
        let mut s = SymbolicSampler::default();
        assert_eq!(sim.query(OracleId::Sigma, &Point::bot(), &mut s).unwrap(), Affine::constant(pp.gamma));
        let q = sim.query(OracleId::Q, &Point::new(&[2, 3]), &mut s).unwrap();
        assert!(q.as_constant().is_none());
        // repeated queries return the cached answer
        assert_eq!(sim.query(OracleId::Q, &Point::new(&[2, 3]), &mut s).unwrap(), q);
        assert_eq!(sim.transcript.len(), 3);
        // the joint mask row holds
        let f = pp.field();
        let z = vanishing(&f, &pp.h);
        let a = Point::new(&[2, 3]);
        let mut r = sim.q.get(&a).unwrap().sub(&f, sim.q.get(&a.rev()).unwrap());
        for i in 0..2 {
            r.add_scaled(&f, z.eval_unchecked(&f, &[a.coords()[i]]), sim.t[i].get(&a).unwrap());
        }
        let beta = sim.sigma.get(&a).unwrap().clone();
        let mut diff = r.sub(&f, &beta);
        diff.add_scaled(&f, 1, &Affine::constant(fpoly.eval_unchecked(&f, a.coords())));
        assert!(diff.is_zero());
    }

    #[test]
    fn honest_verifier_accepts_simulated_proof() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let (pp, fpoly) = instance(5, &mut rng);
            let coins = sample_coins(&pp, &mut rng);
            let (view, verdict) = simulate_verifier(&pp, &fpoly, &coins, &mut rng).unwrap();
            assert!(verdict.accept, "{:?}", verdict.failures);
            assert_eq!(view.transcript.len(), verdict.log.len());
        }
    }
}
