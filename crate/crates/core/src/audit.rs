//! Exact comparison of the honest view law with the simulator's.
//!
//! The prover's randomness is the coefficient vector of `Q, T_1, …, T_m`,
//! and every proof entry is an affine function of it. Along one path of a
//! script the real answers are therefore uniform on an affine image,
//! conditioned on the affine events chosen by the branches. The simulator is
//! run with symbolic draws and gives its law in the same form.

use serde::Serialize;

use crate::field::{Elem, Field};
use crate::linalg::{in_span, row_basis, span_eq, span_rank, SolvePlan};
use crate::pcp::{verify_with_coins, Coins, OracleId, PcpParams, PcpSimulator, SimMode};
use crate::point::{Point, ProductSet};
use crate::poly::{monomial_count, monomial_row, vanishing, MultiPoly};
use crate::script::{Script, ScriptPath, Step};
use crate::value::{Affine, SymbolicSampler, Value};
use crate::Error;

/// Default limit on the prover's coefficient dimension.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Proof entries as affine forms in the mask coefficients.
#[derive(Clone, Debug)]
pub struct AffineLawOracle {
    pub params: PcpParams,
    fpoly: MultiPoly,
    z: MultiPoly,
    /// Start of each block: `Q`, then `T_1..T_m`.
    offsets: Vec<usize>,
    dim: usize,
}

impl AffineLawOracle {
    pub fn new(params: &PcpParams, fpoly: &MultiPoly, cap: usize) -> Result<Self, Error> {
        let f = params.field();
        let mut offsets = vec![0];
        let mut dim = monomial_count(&params.dv());
        for i in 0..params.m {
            offsets.push(dim);
            dim += monomial_count(&params.t_dv(i));
        }
        if dim > cap {
            return Err(Error::Cap(dim as u128, cap as u128));
        }
        Ok(AffineLawOracle { params: params.clone(), fpoly: fpoly.with_dv(&params.dv())?, z: vanishing(&f, &params.h), offsets, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficients of `R(y)`.
    fn mask_form(&self, f: &Field, y: &[Elem]) -> Vec<Elem> {
        let pp = &self.params;
        let mut v = vec![0; self.dim];
        let rev: Vec<Elem> = y.iter().rev().copied().collect();
        for (k, (a, b)) in monomial_row(f, &pp.dv(), y).into_iter().zip(monomial_row(f, &pp.dv(), &rev)).enumerate() {
            v[k] = f.sub(a, b);
        }
        for i in 0..pp.m {
            let c = self.z.eval_unchecked(f, &[y[i]]);
            if c != 0 {
                for (k, a) in monomial_row(f, &pp.t_dv(i), y).into_iter().enumerate() {
                    v[self.offsets[i + 1] + k] = f.mul(c, a);
                }
            }
        }
        v
    }

    pub fn answer(&self, id: OracleId, x: &Point) -> Result<Affine, Error> {
        let pp = &self.params;
        id.check(pp, x)?;
        let f = pp.field();
        let mut terms = vec![0; self.dim];
        let mut c = 0;
        match id {
            OracleId::Sigma => {
                let tails: Vec<Point> = if x.len() == pp.m { vec![Point::bot()] } else { ProductSet::cube(&pp.h, pp.m - x.len())?.points() };
                for h in tails {
                    let y: Vec<Elem> = x.coords().iter().chain(h.coords()).copied().collect();
                    c = f.add(c, self.fpoly.eval_unchecked(&f, &y));
                    for (t, r) in terms.iter_mut().zip(self.mask_form(&f, &y)) {
                        *t = f.add(*t, r);
                    }
                }
            }
            OracleId::Q => {
                for (k, a) in monomial_row(&f, &pp.dv(), x.coords()).into_iter().enumerate() {
                    terms[k] = a;
                }
            }
            OracleId::T(i) => {
                for (k, a) in monomial_row(&f, &pp.t_dv(i - 1), x.coords()).into_iter().enumerate() {
                    terms[self.offsets[i] + k] = a;
                }
            }
        }
        Ok(Affine { c, terms })
    }
}

/// Law of an answer vector on one path: probability `p^{-rank}` of the
/// branch conditions (`None` if they are impossible) and, given them,
/// uniform on `offset + span(gens)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathLaw {
    pub rank: Option<usize>,
    pub offset: Vec<Elem>,
    pub gens: Vec<Vec<Elem>>,
}

pub fn path_law(f: &Field, forms: &[Affine], conditions: &[(usize, Elem)]) -> PathLaw {
    let n = forms.iter().map(|a| a.terms.len()).max().unwrap_or(0);
    let rows: Vec<Vec<Elem>> = conditions.iter().map(|&(k, _)| forms[k].coeffs(n)).collect();
    let rhs: Vec<Affine> = conditions.iter().map(|&(k, w)| Affine::constant(f.sub(w, forms[k].c))).collect();
    let plan = SolvePlan::new(f, &crate::linalg::Matrix::from_rows(&rows, n));
    let mut s = SymbolicSampler::default();
    let Some(u) = plan.solve(f, &rhs, &mut s) else {
        return PathLaw { rank: None, offset: Vec::new(), gens: Vec::new() };
    };
    let answers: Vec<Affine> = forms
        .iter()
        .map(|a| {
            let mut out = Affine::constant(a.c);
            for (k, &t) in a.terms.iter().enumerate() {
                out.add_scaled(f, t, &u[k]);
            }
            out
        })
        .collect();
    let gens: Vec<Vec<Elem>> = (0..s.count).map(|j| answers.iter().map(|a| a.terms.get(j).copied().unwrap_or(0)).collect()).collect();
    PathLaw { rank: Some(plan.rref.rank()), offset: answers.iter().map(|a| a.c).collect(), gens: row_basis(f, &gens, forms.len()) }
}

/// `Σ_x |P_a(x) − P_b(x)|` over the answer vectors of one path.
pub fn path_l1(f: &Field, a: &PathLaw, b: &PathLaw) -> f64 {
    let p = f.p() as f64;
    let mass = |l: &PathLaw| l.rank.map_or(0.0, |r| p.powi(-(r as i32)));
    let (wa, wb) = (mass(a), mass(b));
    let (Some(_), Some(_)) = (a.rank, b.rank) else {
        return wa + wb;
    };
    let n = a.offset.len();
    let (da, db) = (a.gens.len() as i32, b.gens.len() as i32);
    let mut both = a.gens.clone();
    both.extend(b.gens.iter().cloned());
    let diff: Vec<Elem> = b.offset.iter().zip(&a.offset).map(|(&x, &y)| f.sub(x, y)).collect();
    if !in_span(f, &diff, &both, n) {
        return wa + wb;
    }
    let di = da + db - span_rank(f, &both, n) as i32;
    let (ia, ib) = (p.powi(di - da), p.powi(di - db));
    (wa * ia - wb * ib).abs() + wa * (1.0 - ia) + wb * (1.0 - ib)
}

/// Same probability and same conditional law.
pub fn same_path_law(f: &Field, a: &PathLaw, b: &PathLaw) -> bool {
    match (a.rank, b.rank) {
        (None, None) => true,
        (Some(ra), Some(rb)) if ra == rb => {
            let n = a.offset.len();
            let diff: Vec<Elem> = b.offset.iter().zip(&a.offset).map(|(&x, &y)| f.sub(x, y)).collect();
            span_eq(f, &a.gens, &b.gens, n) && in_span(f, &diff, &a.gens, n)
        }
        _ => false,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PathReport {
    pub conditions: Vec<(usize, Elem)>,
    pub queries: usize,
    pub real_rank: Option<usize>,
    pub sim_rank: Option<usize>,
    pub same_support: bool,
    pub same_law: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub script: String,
    pub paths: usize,
    pub depth: usize,
    pub real_dim: usize,
    pub same_support: bool,
    /// Exact: every path has the same probability and conditional law.
    pub identical: bool,
    pub tv: f64,
    pub mismatches: Vec<PathReport>,
}

/// Simulator answers along one path, as forms in its symbolic draws.
pub fn simulated_forms(params: &PcpParams, fpoly: &MultiPoly, mode: SimMode, path: &ScriptPath) -> Result<Vec<Affine>, Error> {
    let mut sim = PcpSimulator::<Affine>::new(params, fpoly, mode)?;
    let mut s = SymbolicSampler::default();
    path.queries.iter().map(|(id, x)| sim.query(*id, x, &mut s)).collect()
}

pub fn audit_script(oracle: &AffineLawOracle, fpoly: &MultiPoly, script: &Script, mode: SimMode) -> Result<AuditReport, Error> {
    let pp = &oracle.params;
    script.validate(pp)?;
    let f = pp.field();
    let paths = script.paths(pp.p);
    let mut l1 = 0.0;
    let mut identical = true;
    let mut same_support = true;
    let mut mismatches = Vec::new();
    for path in &paths {
        let real: Vec<Affine> = path.queries.iter().map(|(id, x)| oracle.answer(*id, x)).collect::<Result<_, _>>()?;
        let sim = simulated_forms(pp, fpoly, mode, path)?;
        let (a, b) = (path_law(&f, &real, &path.conditions), path_law(&f, &sim, &path.conditions));
        let same = same_path_law(&f, &a, &b);
        let support = match (a.rank, b.rank) {
            (Some(_), Some(_)) => {
                let n = a.offset.len();
                let diff: Vec<Elem> = b.offset.iter().zip(&a.offset).map(|(&x, &y)| f.sub(x, y)).collect();
                span_eq(&f, &a.gens, &b.gens, n) && in_span(&f, &diff, &a.gens, n)
            }
            (ra, rb) => ra.is_none() == rb.is_none(),
        };
        if !same {
            identical = false;
            l1 += path_l1(&f, &a, &b);
            mismatches.push(PathReport {
                conditions: path.conditions.clone(),
                queries: path.queries.len(),
                real_rank: a.rank,
                sim_rank: b.rank,
                same_support: support,
                same_law: false,
            });
        }
        same_support &= support;
    }
    Ok(AuditReport {
        script: script.name.clone(),
        paths: paths.len(),
        depth: script.depth(),
        real_dim: oracle.dim(),
        same_support,
        identical,
        tv: if identical { 0.0 } else { l1 / 2.0 },
        mismatches,
    })
}

/// The honest verifier's queries for `coins`, as a script.
pub fn verifier_script(params: &PcpParams, fpoly: &MultiPoly, coins: &Coins) -> Result<Script, Error> {
    let oracle = AffineLawOracle::new(params, fpoly, usize::MAX)?;
    struct Zero<'a>(&'a AffineLawOracle);
    impl crate::pcp::Oracle for Zero<'_> {
        fn params(&self) -> &PcpParams {
            &self.0.params
        }
        fn read(&self, id: OracleId, x: &Point) -> Result<Elem, Error> {
            self.0.answer(id, x).map(|a| a.c)
        }
    }
    let f = params.field();
    let fe = |x: &[Elem]| fpoly.eval_unchecked(&f, x);
    let v = verify_with_coins(params, &fe, &Zero(&oracle), coins);
    Ok(Script { name: "verifier".into(), steps: v.log.into_iter().map(|r| Step::Query { oracle: r.oracle, point: r.point }).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcp::prover::{proof_from_masks, Masks, Oracle};
    use crate::pcp::sample_coins;
    use crate::poly::subcube_sum;
    use crate::script::{query, random_script};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn instance(p: u64, seed: u64) -> (PcpParams, MultiPoly) {
        let pp = PcpParams::new(p, 2, 3, &[0, 1], 0).unwrap();
        let f = pp.field();
        let fpoly = MultiPoly::random(&f, &pp.dv(), &mut ChaCha8Rng::seed_from_u64(seed));
        let gamma = subcube_sum(&f, &fpoly, &pp.cube(), &[]).unwrap();
        (pp.with_gamma(gamma), fpoly)
    }

    #[test]
    fn oracle_matches_prover() {
        let (pp, fpoly) = instance(3, 1);
        let f = pp.field();
        let oracle = AffineLawOracle::new(&pp, &fpoly, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(oracle.dim(), 32);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = f.sample_vec(32, &mut rng);
        let q = MultiPoly::from_coeffs(&pp.dv(), u[..16].to_vec()).unwrap();
        let t = (0..2).map(|i| MultiPoly::from_coeffs(&pp.t_dv(i), u[16 + 8 * i..24 + 8 * i].to_vec()).unwrap()).collect();
        let proof = proof_from_masks(&pp, &f, &fpoly, &Masks { q, t });
        for l in 0..=2 {
            for x in crate::point::field_points(&f, l) {
                assert_eq!(oracle.answer(OracleId::Sigma, &x).unwrap().eval(&f, &u), proof.read(OracleId::Sigma, &x).unwrap());
                if l == 2 {
                    for id in [OracleId::Q, OracleId::T(1), OracleId::T(2)] {
                        assert_eq!(oracle.answer(id, &x).unwrap().eval(&f, &u), proof.read(id, &x).unwrap());
                    }
                }
            }
        }
        assert!(AffineLawOracle::new(&pp, &fpoly, 10).is_err());
    }

    #[test]
    fn l1_of_simple_laws() {
        let f = Field::new(3).unwrap();
        let uniform = PathLaw { rank: Some(0), offset: vec![0], gens: vec![vec![1]] };
        let point = PathLaw { rank: Some(0), offset: vec![1], gens: vec![] };
        let none = PathLaw { rank: None, offset: vec![], gens: vec![] };
        assert!(same_path_law(&f, &uniform, &uniform));
        assert!(!same_path_law(&f, &uniform, &point));
        // |1/3 − 1| + 2·(1/3)
        assert!((path_l1(&f, &uniform, &point) - 4.0 / 3.0).abs() < 1e-12);
        assert!((path_l1(&f, &uniform, &none) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn example_scripts() {
        for (p, pt) in [(3, [2, 0]), (5, [2, 3])] {
            let (pp, fpoly) = instance(p, 3);
            let oracle = AffineLawOracle::new(&pp, &fpoly, DEFAULT_DIM_CAP).unwrap();
            let single = Script { name: "q".into(), steps: vec![query(OracleId::Q, &pt)] };
            let r = audit_script(&oracle, &fpoly, &single, SimMode::Faithful).unwrap();
            assert!(r.identical);
            let root = Script { name: "root".into(), steps: vec![query(OracleId::Sigma, &[])] };
            assert!(audit_script(&oracle, &fpoly, &root, SimMode::Faithful).unwrap().identical);
            let mixed = Script {
                name: "mixed".into(),
                steps: vec![query(OracleId::Sigma, &[2]), query(OracleId::Q, &pt), query(OracleId::Sigma, &[2, 0])],
            };
            let r = audit_script(&oracle, &fpoly, &mixed, SimMode::Faithful).unwrap();
            assert!(r.identical, "{r:?}");
            assert_eq!(r.tv, 0.0);
        }
    }

    #[test]
    fn broken_simulator_is_flagged() {
        let (pp, fpoly) = instance(3, 4);
        let oracle = AffineLawOracle::new(&pp, &fpoly, DEFAULT_DIM_CAP).unwrap();
        let s = Script { name: "tie".into(), steps: vec![query(OracleId::Sigma, &[2, 2]), query(OracleId::T(1), &[2, 2]), query(OracleId::T(2), &[2, 2])] };
        let r = audit_script(&oracle, &fpoly, &s, SimMode::OmitMaskRow).unwrap();
        assert!(!r.identical);
        assert!(r.tv > 0.0);
        assert!(audit_script(&oracle, &fpoly, &s, SimMode::Faithful).unwrap().identical);
    }

    #[test]
    fn random_scripts_have_zero_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in [3, 5] {
            let (pp, fpoly) = instance(p, p);
            let oracle = AffineLawOracle::new(&pp, &fpoly, DEFAULT_DIM_CAP).unwrap();
            for k in 0..15 {
                let s = random_script(&pp, 4, &format!("r{k}"), &mut rng);
                let r = audit_script(&oracle, &fpoly, &s, SimMode::Faithful).unwrap();
                assert!(r.identical, "{s:?} {r:?}");
            }
        }
    }

    #[test]
    fn long_scripts_have_zero_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (pp, fpoly) = instance(5, 9);
        let oracle = AffineLawOracle::new(&pp, &fpoly, DEFAULT_DIM_CAP).unwrap();
        // a prefix sum drawn between mask reads that later fix R(3,3)
        let fixed = Script {
            name: "closure".into(),
            steps: vec![
                query(OracleId::T(1), &[3, 4]),
                query(OracleId::Q, &[3, 2]),
                query(OracleId::Sigma, &[3]),
                query(OracleId::T(1), &[3, 3]),
            ],
        };
        assert!(audit_script(&oracle, &fpoly, &fixed, SimMode::Faithful).unwrap().identical);
        for k in 0..10 {
            let s = random_script(&pp, 16, &format!("r{k}"), &mut rng);
            let r = audit_script(&oracle, &fpoly, &s, SimMode::Faithful).unwrap();
            assert!(r.identical, "{s:?} {r:?}");
        }
    }

    #[test]
    fn honest_verifier_view() {
        let (pp, fpoly) = instance(3, 6);
        let oracle = AffineLawOracle::new(&pp, &fpoly, DEFAULT_DIM_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2 {
            let coins = sample_coins(&pp, &mut rng);
            let s = verifier_script(&pp, &fpoly, &coins).unwrap();
            let r = audit_script(&oracle, &fpoly, &s, SimMode::Faithful).unwrap();
            assert!(r.identical, "{r:?}");
        }
    }
}
