//! Acceptance run: one PASS/FAIL line per criterion. Oracles here are brute
//! force and use only evaluation and elimination from the library.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pzkpcp::antisym::{antisym_locate, is_prefix_free, is_symmetric, prefix_free, random_antisym, reverse_set_bound_holds, sigma_word, sym_sets, union_size};
use pzkpcp::audit::{audit_script, AffineLawOracle, DEFAULT_DIM_CAP};
use pzkpcp::linalg::{dual_basis, kernel_basis, span_eq};
use pzkpcp::locator::rm_locate;
use pzkpcp::pcp::prover::{prove, prove_lazy, Oracle};
use pzkpcp::pcp::simulator::SimMode;
use pzkpcp::pcp::verifier::{sample_coins, verify, verify_with_coins, Check};
use pzkpcp::pcp::{arithmetize, CnfInstance, OracleId, PcpParams};
use pzkpcp::poly::{monomial_count, monomial_row, subcube_sum};
use pzkpcp::rm::{a_closure, CodeView};
use pzkpcp::script::{query, random_script, Script, Step};
use pzkpcp::sigma_rm::{dual_decomposition, locality_bound as sigma_bound, sigma_rm_locate, sum_word};
use pzkpcp::{Elem, Field, Matrix, MultiPoly, Point, ProductSet};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(n: usize, name: &str, limit: Option<Duration>, f: fn() -> Outcome) -> bool {
    let t = Instant::now();
    let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Outcome { pass: false, detail: "panicked".into() });
    let el = t.elapsed();
    let late = limit.is_some_and(|l| el > l);
    let pass = out.pass && !late;
    let budget = limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
    println!("criterion {n} {name}: {} {}; {:.1}s{budget}", if pass { "PASS" } else { "FAIL" }, out.detail, el.as_secs_f64());
    pass
}

fn main() {
    let results = [
        run(1, "rm locator oracle equivalence", Some(Duration::from_secs(60)), rm_oracle),
        run(2, "locality bounds", None, locality),
        run(3, "sigma-rm dual decomposition", Some(Duration::from_secs(300)), sigma_dual),
        run(4, "antisymmetric sums", None, antisym),
        run(5, "perfect zero knowledge", Some(Duration::from_secs(120)), zero_knowledge),
        run(6, "completeness", None, completeness),
        run(7, "soundness", None, soundness),
        run(8, "arithmetization", None, arithmetization),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn digits(mut k: usize, p: usize, n: usize) -> Vec<Elem> {
    let mut out = vec![0; n];
    for d in out.iter_mut().rev() {
        *d = (k % p) as Elem;
        k /= p;
    }
    out
}

fn rm_oracle() -> Outcome {
    let p = 5usize;
    let f = Field::new(5).unwrap();
    let dv = [2usize, 2];
    let a = ProductSet::cube(&[0, 1], 2).unwrap();
    let view = CodeView::new(f, &dv);
    let grid: Vec<Point> = (0..25).map(|k| Point(digits(k, p, 2))).collect();
    let cube: Vec<usize> = a.points().iter().map(|x| grid.iter().position(|g| g == x).unwrap()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut sets: Vec<Vec<usize>> = (0..25).map(|k| vec![k]).collect();
    while sets.len() < 125 {
        let n = rng.gen_range(1..=3);
        let s: BTreeSet<usize> = (0..n).map(|_| rng.gen_range(0..25)).collect();
        sets.push(s.into_iter().collect());
    }

    // evaluations of all 5^9 polynomials, three coefficient groups at a time
    let rows: Vec<Vec<Elem>> = grid.iter().map(|x| monomial_row(&f, &dv, x.coords())).collect();
    let group = |g: usize| -> Vec<[u8; 25]> {
        (0..125)
            .map(|c| {
                let cs = digits(c, p, 3);
                let mut ev = [0u8; 25];
                for (k, row) in rows.iter().enumerate() {
                    ev[k] = (f.sum((0..3).map(|j| f.mul(cs[j], row[3 * g + j])))) as u8;
                }
                ev
            })
            .collect()
    };
    let (g0, g1, g2) = (group(0), group(1), group(2));
    let mut seen: Vec<Vec<bool>> = sets.iter().map(|s| vec![false; 625 * 5usize.pow(s.len() as u32)]).collect();
    let mut ev = [0u8; 25];
    for e0 in &g0 {
        for e1 in &g1 {
            for e2 in &g2 {
                for k in 0..25 {
                    ev[k] = (e0[k] + e1[k] + e2[k]) % 5;
                }
                let msg = cube.iter().fold(0usize, |acc, &k| acc * 5 + ev[k] as usize);
                for (s, mark) in sets.iter().zip(seen.iter_mut()) {
                    let key = s.iter().fold(msg, |acc, &k| acc * 5 + ev[k] as usize);
                    mark[key] = true;
                }
            }
        }
    }

    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for (s, mark) in sets.iter().zip(&seen) {
        let pts: Vec<Point> = s.iter().map(|&k| grid[k].clone()).collect();
        let out = rm_locate(&view, &a, &pts).unwrap();
        let ridx: Vec<usize> = out.r.iter().map(|x| a.index_of(x.coords()).unwrap()).collect();
        let order: Vec<usize> = out.i.iter().map(|x| pts.iter().position(|y| y == x).unwrap()).collect();
        for (key, &hit) in mark.iter().enumerate() {
            let all = digits(key, p, 4 + s.len());
            let (msg, beta) = all.split_at(4);
            let v: Vec<Elem> = ridx.iter().map(|&k| msg[k]).chain(order.iter().map(|&k| beta[k])).collect();
            let inker = (0..out.z.rows()).all(|r| f.dot(out.z.row(r), &v) == 0);
            checked += 1;
            if inker != hit {
                mismatches += 1;
            }
        }
    }
    Outcome { pass: mismatches == 0, detail: format!("{} query sets, {checked} (message, answer) pairs, {mismatches} mismatches", sets.len()) }
}

fn random_points<R: Rng>(rng: &mut R, p: u64, lens: std::ops::RangeInclusive<usize>, n: usize) -> Vec<Point> {
    (0..n).map(|_| Point((0..rng.gen_range(lens.clone())).map(|_| rng.gen_range(0..p)).collect())).collect()
}

fn locality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut rm_bad, mut sig_bad, mut g_bad) = (0, 0, 0);
    let (mut rm_max, mut sig_max) = (0.0f64, 0.0f64);
    for t in 0..1000 {
        let n = rng.gen_range(1..=6);
        let (p, m) = [(5u64, 2usize), (7, 3)][t % 2];
        let f = Field::new(p).unwrap();
        let a = ProductSet::cube(&[0, 1], m).unwrap();
        let view = CodeView::new(f, &vec![3; m]);
        let pts = random_points(&mut rng, p, m..=m, n);
        let r = rm_locate(&view, &a, &pts).unwrap().r.len();
        rm_bad += usize::from(r > n);
        rm_max = rm_max.max(r as f64 / n as f64);

        let pts = random_points(&mut rng, p, 0..=m, n);
        let r = sigma_rm_locate(&view, &a, &pts).unwrap().r.len() as u128;
        let bound = sigma_bound(&a, n);
        sig_bad += usize::from(r > bound);
        sig_max = sig_max.max(r as f64 / bound as f64);

        let ma = 2 + t % 3;
        let b = ProductSet::cube(&[0, 1], ma).unwrap();
        let pts = random_points(&mut rng, 2, 0..=ma, n);
        let g = prefix_free(&b, &pts).unwrap().g.len();
        g_bad += usize::from(g > ma * n);
        antisym_locate(&Field::new(3).unwrap(), &b, &pts).unwrap();
    }
    Outcome {
        pass: rm_bad + sig_bad + g_bad == 0,
        detail: format!(
            "1000 sets each; violations rm {rm_bad}, sigma-rm {sig_bad}, prefix-free {g_bad}; max |R|/|I| {rm_max:.2}, max |R|/bound {sig_max:.4}"
        ),
    }
}

/// Rows of the sum code on `s`: one per basis polynomial (or per basis
/// polynomial vanishing on `a`).
fn sigma_rows(f: &Field, dv: &[usize], a: &ProductSet, s: &[Point], zero: bool) -> Vec<Vec<Elem>> {
    let n = monomial_count(dv);
    let basis: Vec<Vec<Elem>> = if zero {
        let ev: Vec<Vec<Elem>> = a.points().iter().map(|x| monomial_row(f, dv, x.coords())).collect();
        kernel_basis(f, &Matrix::from_rows(&ev, n))
    } else {
        (0..n).map(|k| (0..n).map(|j| u64::from(j == k)).collect()).collect()
    };
    basis.into_iter().map(|c| sum_word(f, &MultiPoly::from_coeffs(dv, c).unwrap(), a, s).unwrap()).collect()
}

fn sigma_dual() -> Outcome {
    let f = Field::new(3).unwrap();
    let a = ProductSet::cube(&[0, 1], 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut fails = 0;
    let mut cases = 0;
    for d in [2usize, 3] {
        let view = CodeView::new(f, &[d, d]);
        let mut made = 0;
        while made < 50 {
            let k = rng.gen_range(1..4);
            let seeds = random_points(&mut rng, 3, 0..=2, k);
            let s: Vec<Point> = a_closure(&seeds, &a).into_iter().collect();
            if s.len() > 20 {
                continue;
            }
            made += 1;
            for zero in [false, true] {
                let got = dual_decomposition(&view, &a, &s, zero).unwrap();
                let want = dual_basis(&f, &sigma_rows(&f, &[d, d], &a, &s, zero), s.len());
                cases += 1;
                fails += usize::from(!span_eq(&f, &got, &want, s.len()));
            }
        }
    }
    Outcome { pass: fails == 0, detail: format!("{cases} (S, X, d) cases, {fails} span mismatches") }
}

fn all_prefix_free(a: &ProductSet, max: usize) -> Vec<Vec<Point>> {
    fn rec(all: &[Point], start: usize, cur: &mut Vec<Point>, max: usize, out: &mut Vec<Vec<Point>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for k in start..all.len() {
            if cur.iter().all(|y| !y.is_prefix_of(&all[k]) && !all[k].is_prefix_of(y)) {
                cur.push(all[k].clone());
                rec(all, k + 1, cur, max, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&a.all_prefixes(), 0, &mut Vec::new(), max, &mut out);
    out
}

fn antisym() -> Outcome {
    let mut span_fail = 0;
    let mut families = 0;
    let (mut bound_checked, mut bound_fail) = (0, 0);
    for p in [3u64, 5] {
        let f = Field::new(p).unwrap();
        for m in 1..=3 {
            let a = ProductSet::cube(&[0, 1], m).unwrap();
            let cube = a.points();
            for g in all_prefix_free(&a, 5) {
                families += 1;
                // mask sums of e_x − e_{rev x}, one row per cube point
                let gen: Vec<Vec<Elem>> = cube
                    .iter()
                    .map(|x| {
                        let mut w = vec![0; cube.len()];
                        w[a.index_of(x.coords()).unwrap()] = 1;
                        let r = a.index_of(x.rev().coords()).unwrap();
                        w[r] = f.sub(w[r], 1);
                        sigma_word(&f, &a, &w, &g).unwrap()
                    })
                    .collect();
                let dual = dual_basis(&f, &gen, g.len());
                let hs = sym_sets(&a, &g).unwrap();
                let ind: Vec<Vec<Elem>> = hs.iter().map(|h| g.iter().map(|x| u64::from(h.contains(x))).collect()).collect();
                span_fail += usize::from(!span_eq(&f, &ind, &dual, g.len()));
                if p == 3 {
                    for h in &hs {
                        let t = (h.len() * h.len()) as u128;
                        if let Some(ok) = reverse_set_bound_holds(union_size(&a, h), t, a.size()) {
                            bound_checked += 1;
                            bound_fail += usize::from(!ok);
                        }
                    }
                }
            }
        }
    }

    // 5×5 antisymmetric matrices: rows 2, 3 and seven single entries (1-based)
    let a = ProductSet::cube(&[0, 1, 2, 3, 4], 2).unwrap();
    let x = [vec![1], vec![2], vec![0, 1], vec![0, 2], vec![3, 1], vec![3, 2], vec![4, 1], vec![4, 2], vec![4, 4]];
    let x: Vec<Point> = x.iter().map(|c| Point::new(c)).collect();
    let r = x.iter().filter(|p| p.len() == 1).count();
    let t = x.len() - r;
    let fig_ok = r == 2 && t == 7 && is_prefix_free(&x) && is_symmetric(&a, &x).unwrap();
    let f = Field::new(101).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut nonzero = 0;
    for _ in 0..10_000 {
        let w = random_antisym(&f, &a, &mut rng).unwrap();
        nonzero += usize::from(f.sum(sigma_word(&f, &a, &w, &x).unwrap()) != 0);
    }
    Outcome {
        pass: span_fail == 0 && bound_fail == 0 && bound_checked > 0 && fig_ok && nonzero == 0,
        detail: format!(
            "{families} prefix-free families, {span_fail} span mismatches; square-root bound {bound_checked} sets, {bound_fail} violations; 5x5 element r={r} t={t}, {nonzero} of 10000 nonzero sums"
        ),
    }
}

fn instance(p: u64, m: usize, d: usize, rng: &mut ChaCha8Rng) -> (PcpParams, MultiPoly) {
    let pp = PcpParams::new(p, m, d, &[0, 1], 0).unwrap();
    let f = pp.field();
    let fpoly = MultiPoly::random(&f, &pp.dv(), rng);
    let gamma = subcube_sum(&f, &fpoly, &pp.cube(), &[]).unwrap();
    (pp.with_gamma(gamma), fpoly)
}

fn zero_knowledge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut scripts = 0;
    let mut adaptive = 0;
    let mut bad = Vec::new();
    let mut max_tv = 0.0f64;
    for (p, pt) in [(3u64, [2, 0]), (5, [2, 3])] {
        let (pp, fpoly) = instance(p, 2, 3, &mut rng);
        let oracle = AffineLawOracle::new(&pp, &fpoly, DEFAULT_DIM_CAP).unwrap();
        let mut list = vec![Script {
            name: "mixed".into(),
            steps: vec![query(OracleId::Sigma, &[2]), query(OracleId::Q, &pt), query(OracleId::Sigma, &[2, 0])],
        }];
        while list.len() < 16 {
            let s = random_script(&pp, 4, &format!("r{}", list.len()), &mut rng);
            if s.steps.iter().any(|x| matches!(x, Step::Branch { .. })) {
                list.push(s);
            }
        }
        for s in &list {
            let r = audit_script(&oracle, &fpoly, s, SimMode::Faithful).unwrap();
            scripts += 1;
            adaptive += usize::from(r.paths > 1);
            max_tv = max_tv.max(r.tv);
            if !r.identical {
                bad.push(format!("F{p}/{}", s.name));
            }
        }
    }
    let (pp, fpoly) = instance(3, 2, 3, &mut rng);
    let oracle = AffineLawOracle::new(&pp, &fpoly, DEFAULT_DIM_CAP).unwrap();
    let tie = Script { name: "tie".into(), steps: vec![query(OracleId::Sigma, &[2, 2]), query(OracleId::T(1), &[2, 2]), query(OracleId::T(2), &[2, 2])] };
    let broken = audit_script(&oracle, &fpoly, &tie, SimMode::OmitMaskRow).unwrap();
    let flagged = !broken.identical && broken.tv > 0.0;
    Outcome {
        pass: bad.is_empty() && adaptive >= 20 && flagged,
        detail: format!(
            "{scripts} scripts ({adaptive} adaptive), max TV {max_tv}, not identical: {bad:?}; broken simulator TV {:.4}",
            broken.tv
        ),
    }
}

fn completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut paths = 0;
    let mut rejected = 0;
    for _ in 0..5 {
        let (pp, fpoly) = instance(11, 1, 3, &mut rng);
        let f = pp.field();
        let proof = prove(&pp, &fpoly, &mut rng, 1 << 20).unwrap();
        let fe = |x: &[Elem]| fpoly.eval_unchecked(&f, x);
        let mut coins = sample_coins(&pp, &mut rng);
        // with m = 1 every line is the whole table, so the path is the only free coin
        for c in 0..11 {
            coins.path = vec![c];
            paths += 1;
            rejected += usize::from(!verify_with_coins(&pp, &fe, &proof, &coins).accept);
        }
    }
    let mut trial_rejects = 0;
    for k in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k);
        let (pp, fpoly) = instance(101, 3, 3, &mut rng);
        let f = pp.field();
        let proof = prove_lazy(&pp, &fpoly, &mut rng).unwrap();
        let fe = |x: &[Elem]| fpoly.eval_unchecked(&f, x);
        trial_rejects += usize::from(!verify(&pp, &fe, &proof, &mut rng).accept);
    }
    Outcome {
        pass: rejected == 0 && trial_rejects == 0,
        detail: format!("p=11 m=1: {paths} coin paths, {rejected} rejected; p=101 m=3: 1000 trials, {trial_rejects} rejected"),
    }
}

fn soundness() -> Outcome {
    let (mut root_rej, mut shift_rej, mut ldt_rej) = (0, 0, 0);
    for k in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + k);
        let m = 1 + (k as usize % 3);
        let (pp, fpoly) = instance(101, m, 3, &mut rng);
        let f = pp.field();
        let fe = |x: &[Elem]| fpoly.eval_unchecked(&f, x);
        let delta = 1 + rng.gen_range(0..100);
        let wrong = pp.with_gamma(f.add(pp.gamma, delta));

        // honest proof for F, root claimed as γ′
        let proof = prove_lazy(&pp, &fpoly, &mut rng).unwrap();
        root_rej += usize::from(!verify(&wrong, &fe, &proof, &mut rng).accept);

        // honest proof for F + δ·x_1⋯x_m, whose cube sum is γ′
        let mut mono = MultiPoly::constant(m, delta);
        for i in 0..m {
            mono = mono.mul(&f, &MultiPoly::var(m, i));
        }
        let shifted = fpoly.add(&f, &mono.with_dv(&pp.dv()).unwrap());
        let proof = prove_lazy(&wrong, &shifted, &mut rng).unwrap();
        shift_rej += usize::from(!verify(&wrong, &fe, &proof, &mut rng).accept);

        // honest proof with π_Q replaced by a random table
        if m <= 2 {
            let mut full = prove(&pp, &fpoly, &mut rng, 1 << 24).unwrap();
            full.pi_q = f.sample_vec(full.pi_q.len(), &mut rng);
            let v = verify(&pp, &fe, &full, &mut rng);
            ldt_rej += usize::from(v.failures.contains(&Check::LowDegree(OracleId::Q)));
        }
    }
    // π_Q corruption at m = 3: a lazily read random table
    for k in 0..333u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + k);
        let (pp, fpoly) = instance(101, 3, 3, &mut rng);
        let f = pp.field();
        let fe = |x: &[Elem]| fpoly.eval_unchecked(&f, x);
        let proof = prove_lazy(&pp, &fpoly, &mut rng).unwrap();
        let noise = RandomQ { inner: &proof, seed: rng.gen() };
        ldt_rej += usize::from(verify(&pp, &fe, &noise, &mut rng).failures.contains(&Check::LowDegree(OracleId::Q)));
    }
    Outcome {
        pass: root_rej >= 500 && shift_rej >= 500 && ldt_rej >= 500,
        detail: format!(
            "p=101 m=1..3, 1000 trials each: wrong root rejected {root_rej}, shifted F rejected {shift_rej}, random pi_Q caught by line test {ldt_rej} of 1000"
        ),
    }
}

/// A proof whose `π_Q` is a fixed random function of the point.
struct RandomQ<'a> {
    inner: &'a dyn Oracle,
    seed: u64,
}

impl Oracle for RandomQ<'_> {
    fn params(&self) -> &PcpParams {
        self.inner.params()
    }

    fn read(&self, id: OracleId, x: &Point) -> Result<Elem, pzkpcp::Error> {
        if id != OracleId::Q {
            return self.inner.read(id, x);
        }
        let key = x.coords().iter().fold(self.seed, |h, &c| h.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(c + 1));
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        Ok(self.params().field().sample(&mut rng))
    }
}

fn arithmetization() -> Outcome {
    let f = Field::new(101).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let clauses: Vec<Vec<i64>> = (0..rng.gen_range(0..=5))
            .map(|_| {
                (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let v = rng.gen_range(1..=n as i64);
                        if rng.gen_bool(0.5) {
                            -v
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        let count = (0..1u32 << n)
            .filter(|bits| clauses.iter().all(|c| c.iter().any(|&l| (bits >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0))))
            .count() as u64;
        let cnf = CnfInstance::new(n, clauses).unwrap();
        let poly = arithmetize(&f, &cnf);
        let sum = subcube_sum(&f, &poly, &ProductSet::cube(&[0, 1], n).unwrap(), &[]).unwrap();
        bad += usize::from(sum != count);
    }
    Outcome { pass: bad == 0, detail: format!("200 formulas, {bad} mismatches") }
}
