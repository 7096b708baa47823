//! Command-line front end. Every command prints one JSON record per line and
//! exits nonzero when a check fails.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use pzkpcp::antisym::antisym_locate;
use pzkpcp::audit::{audit_script, AffineLawOracle, DEFAULT_DIM_CAP};
use pzkpcp::dimacs;
use pzkpcp::encoding::enc_pcp_spec;
use pzkpcp::locator::{rm_locate, LocatorOutput};
use pzkpcp::pcp::format::{read_proof, write_proof};
use pzkpcp::pcp::simulator::{simulate_verifier, PcpSimulator, SimMode};
use pzkpcp::pcp::verifier::{sample_coins, verify_with_coins};
use pzkpcp::pcp::{arithmetize, prove, sharp_sat_params, PcpParams, DEFAULT_CAP};
use pzkpcp::poly::subcube_sum;
use pzkpcp::rm::{cd_rm, CodeView};
use pzkpcp::script::{random_script, Script};
use pzkpcp::sigma_rm::sigma_rm_locate;
use pzkpcp::value::RandomSampler;
use pzkpcp::{Elem, Field, MultiPoly, Point, ProductSet};

#[derive(Parser)]
#[command(name = "pzkpcp", version, about = "Zero-knowledge PCP for #SAT: prover, verifier, simulator and audits")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a proof that a DIMACS formula has `--count` models.
    Prove {
        #[command(flatten)]
        stmt: Statement,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Check a proof file against a formula and claimed count.
    Verify {
        #[command(flatten)]
        stmt: Statement,
        #[arg(long)]
        proof: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Independent verifier runs; trial k uses seed + k.
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
        /// Print every query of the first trial.
        #[arg(long)]
        log: bool,
    },
    /// Answer a query script (or the honest verifier) with the simulator.
    Simulate {
        #[command(flatten)]
        inst: Instance,
        /// JSON script file; without it the honest verifier is simulated.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the simulator's exact answer law with the real one.
    AuditZk {
        #[command(flatten)]
        inst: Instance,
        /// JSON script file (one script or an array); without it
        /// `--trials` random scripts of `--length` queries are used.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        length: usize,
        /// Largest mask coefficient space to enumerate.
        #[arg(long, default_value_t = DEFAULT_DIM_CAP as u128)]
        cap: u128,
        /// Use the simulator with the mask rows removed.
        #[arg(long)]
        broken: bool,
    },
    /// Run a constraint locator and print `(R, Z)`.
    Locate {
        code: Code,
        #[command(flatten)]
        code_args: CodeArgs,
    },
    /// Print a basis of the dual of the Reed-Muller code restricted to the points.
    Detect {
        #[command(flatten)]
        code_args: CodeArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Code {
    Rm,
    SigmaRm,
    Antisym,
    /// The composed encoding behind `π_Σ`.
    Pcp,
}

#[derive(Args)]
struct Statement {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long)]
    count: u128,
    /// Field modulus; defaults to the smallest prime above `10·m·d` and `2^m`.
    #[arg(long)]
    field: Option<u64>,
}

/// A statement from a formula, or a random `F` of the given shape.
#[derive(Args)]
struct Instance {
    #[arg(long, conflicts_with_all = ["m", "degree", "h_set"])]
    cnf: Option<PathBuf>,
    #[arg(long, requires = "cnf")]
    count: Option<u128>,
    /// Defaults to 5, or for a formula to the prover's choice.
    #[arg(long)]
    field: Option<u64>,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    degree: usize,
    #[arg(long = "h-set", default_value = "0,1")]
    h_set: String,
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long, default_value_t = 5)]
    field: u64,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// One degree for every variable, or a comma separated vector.
    #[arg(long, default_value = "2")]
    degree: String,
    /// Factor of the cube `𝒜 = H^m`.
    #[arg(long = "h-set", default_value = "0,1")]
    h_set: String,
    /// `;`-separated points such as `(0,1);(2,3)`; `⊥` or `()` is the empty point.
    #[arg(long, allow_hyphen_values = true)]
    points: String,
}

fn elems(s: &str, what: &str) -> Result<Vec<u64>> {
    s.split(',').map(|x| x.trim().parse::<u64>().with_context(|| format!("bad {what} entry {x:?}"))).collect()
}

fn read_cnf(path: &Path) -> Result<pzkpcp::pcp::CnfInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(dimacs::parse(&text)?)
}

impl Statement {
    fn load(&self) -> Result<(PcpParams, MultiPoly)> {
        let cnf = read_cnf(&self.cnf)?;
        let pp = sharp_sat_params(&cnf, self.count, self.field)?;
        let fpoly = arithmetize(&pp.field(), &cnf);
        Ok((pp, fpoly))
    }
}

impl Instance {
    /// Parameters with the true `γ`, and `F`. A random `F` is drawn from `seed`.
    fn load(&self, seed: u64) -> Result<(PcpParams, MultiPoly)> {
        if let Some(path) = &self.cnf {
            let cnf = read_cnf(path)?;
            let pp = sharp_sat_params(&cnf, self.count.unwrap_or(0), self.field)?;
            let fpoly = arithmetize(&pp.field(), &cnf);
            let gamma = subcube_sum(&pp.field(), &fpoly, &pp.cube(), &[])?;
            if self.count.is_some() && gamma != pp.gamma {
                bail!("the formula does not have {} models", self.count.unwrap_or(0));
            }
            return Ok((pp.with_gamma(gamma), fpoly));
        }
        let pp = PcpParams::new(self.field.unwrap_or(5), self.m, self.degree, &elems(&self.h_set, "H")?, 0)?;
        let f = pp.field();
        let fpoly = MultiPoly::random(&f, &pp.dv(), &mut ChaCha8Rng::seed_from_u64(seed));
        let gamma = subcube_sum(&f, &fpoly, &pp.cube(), &[])?;
        Ok((pp.with_gamma(gamma), fpoly))
    }
}

impl CodeArgs {
    fn load(&self) -> Result<(Field, Vec<usize>, ProductSet, Vec<Point>)> {
        let f = Field::new(self.field)?;
        let dv: Vec<usize> = elems(&self.degree, "degree")?.into_iter().map(|d| d as usize).collect();
        let dv = match dv.len() {
            1 => vec![dv[0]; self.m],
            n if n == self.m => dv,
            n => bail!("degree vector has {n} entries for m = {}", self.m),
        };
        let a = ProductSet::cube(&elems(&self.h_set, "H")?, self.m)?;
        a.check_field(&f)?;
        let pts = Point::parse_list(&self.points, &f)?;
        Ok((f, dv, a, pts))
    }
}

fn emit(out: &mut impl Write, v: serde_json::Value) -> Result<()> {
    writeln!(out, "{v}")?;
    Ok(())
}

fn locator_record(code: &str, out: &LocatorOutput) -> serde_json::Value {
    let show = |v: &[Point]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
    json!({"code": code, "r": show(&out.r), "i": show(&out.i), "z": out.z.to_rows()})
}

fn run(cli: Cli) -> Result<bool> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.cmd {
        Cmd::Prove { stmt, seed, out: path, cap } => {
            let (pp, fpoly) = stmt.load()?;
            let actual = subcube_sum(&pp.field(), &fpoly, &pp.cube(), &[])?;
            if actual != pp.gamma {
                bail!("the formula does not have {} models", stmt.count);
            }
            let proof = prove(&pp, &fpoly, &mut ChaCha8Rng::seed_from_u64(seed), cap)?;
            let mut buf = Vec::new();
            write_proof(&mut buf, &proof)?;
            fs::write(&path, &buf).with_context(|| format!("writing {}", path.display()))?;
            emit(&mut out, json!({"proof": path.display().to_string(), "p": pp.p, "m": pp.m, "d": pp.d, "bytes": buf.len()}))?;
            Ok(true)
        }
        Cmd::Verify { stmt, proof, seed, trials, cap, log } => {
            let (pp, fpoly) = stmt.load()?;
            let f = pp.field();
            let bytes = fs::read(&proof).with_context(|| format!("reading {}", proof.display()))?;
            let oracle = read_proof(&mut bytes.as_slice(), pp.gamma, cap)?;
            if oracle.params != pp {
                bail!("proof parameters (p = {}, m = {}, d = {}) do not match the statement", oracle.params.p, oracle.params.m, oracle.params.d);
            }
            let fe = |x: &[Elem]| fpoly.eval_unchecked(&f, x);
            let mut all = true;
            for k in 0..trials {
                let coins = sample_coins(&pp, &mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(k)));
                let v = verify_with_coins(&pp, &fe, &oracle, &coins);
                if log && k == 0 {
                    for q in &v.log {
                        emit(&mut out, json!({"query": q.oracle, "point": q.point.to_string(), "answer": q.answer}))?;
                    }
                }
                emit(&mut out, json!({"trial": k, "accept": v.accept, "failures": v.failures, "queries": v.log.len()}))?;
                all &= v.accept;
            }
            Ok(all)
        }
        Cmd::Simulate { inst, script, seed, out: path } => {
            let (pp, fpoly) = inst.load(seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let records = match script {
                None => {
                    let coins = sample_coins(&pp, &mut rng);
                    let (view, verdict) = simulate_verifier(&pp, &fpoly, &coins, &mut rng)?;
                    let mut recs = vec![json!({"coins": view.coins})];
                    recs.extend(view.transcript.iter().map(|q| json!({"oracle": q.oracle, "point": q.point.to_string(), "answer": q.answer})));
                    recs.push(json!({"accept": verdict.accept, "failures": verdict.failures}));
                    recs
                }
                Some(file) => {
                    let scripts = load_scripts(&file, &pp)?;
                    let mut recs = Vec::new();
                    for s in scripts {
                        let mut sim = PcpSimulator::<Elem>::new(&pp, &fpoly, SimMode::Faithful)?;
                        let mut sampler = RandomSampler { field: pp.field(), rng: &mut rng };
                        let ans = s.run(|id, x| sim.query(id, x, &mut sampler), |v, w| *v == w)?;
                        recs.extend(ans.iter().map(|(id, x, v)| json!({"script": s.name, "oracle": id, "point": x.to_string(), "answer": v})));
                    }
                    recs
                }
            };
            match path {
                Some(p) => {
                    let text: String = records.iter().map(|r| format!("{r}\n")).collect();
                    fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
                    emit(&mut out, json!({"view": p.display().to_string(), "records": records.len()}))?;
                }
                None => {
                    for r in records {
                        emit(&mut out, r)?;
                    }
                }
            }
            Ok(true)
        }
        Cmd::AuditZk { inst, script, seed, trials, length, cap, broken } => {
            let (pp, fpoly) = inst.load(seed)?;
            let oracle = AffineLawOracle::new(&pp, &fpoly, cap.min(usize::MAX as u128) as usize)?;
            let scripts = match script {
                Some(file) => load_scripts(&file, &pp)?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..trials).map(|k| random_script(&pp, length, &format!("random-{k}"), &mut rng)).collect()
                }
            };
            let mode = if broken { SimMode::OmitMaskRow } else { SimMode::Faithful };
            let mut all = true;
            for s in &scripts {
                let r = audit_script(&oracle, &fpoly, s, mode)?;
                all &= r.identical;
                emit(
                    &mut out,
                    json!({"script": r.script, "paths": r.paths, "depth": r.depth, "real_dim": r.real_dim,
                           "same_support": r.same_support, "identical": r.identical, "tv": r.tv}),
                )?;
            }
            Ok(all)
        }
        Cmd::Locate { code, code_args } => {
            let (f, dv, a, pts) = code_args.load()?;
            let view = CodeView::new(f, &dv);
            let rec = match code {
                Code::Rm => locator_record("rm", &rm_locate(&view, &a, &pts)?),
                Code::SigmaRm => locator_record("sigma-rm", &sigma_rm_locate(&view, &a, &pts)?),
                Code::Antisym => locator_record("antisym", &antisym_locate(&f, &a, &pts)?),
                Code::Pcp => locator_record("pcp", &enc_pcp_spec(f, a.factor(1), &dv)?.locate(&pts)?),
            };
            emit(&mut out, rec)?;
            Ok(true)
        }
        Cmd::Detect { code_args } => {
            let (f, dv, _, pts) = code_args.load()?;
            let cb = cd_rm(&CodeView::new(f, &dv), &pts)?;
            let domain: Vec<String> = cb.domain.iter().map(|p| p.to_string()).collect();
            emit(&mut out, json!({"domain": domain, "z": cb.rows()}))?;
            Ok(true)
        }
    }
}

fn load_scripts(path: &Path, pp: &PcpParams) -> Result<Vec<Script>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let scripts = Script::parse(&text)?;
    for s in &scripts {
        s.validate(pp).with_context(|| format!("script {:?}", s.name))?;
    }
    Ok(scripts)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
