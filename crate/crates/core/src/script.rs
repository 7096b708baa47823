//! Query scripts for a (possibly malicious) verifier.
//!
//! A script is JSON:
//!
//! ```json
//! {"name": "mixed",
//!  "steps": [
//!    {"query": {"oracle": "sigma", "point": [2]}},
//!    {"branch": {"answer": 0, "equals": 1,
//!                "then": [{"query": {"oracle": "q", "point": [2, 3]}}],
//!                "else": [{"query": {"oracle": "t1", "point": [0, 4]}}]}}
//!  ]}
//! ```
//!
//! `answer` is the 0-based position of an earlier answer on the same path. A
//! branch ends its step list.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::field::Elem;
use crate::pcp::{OracleId, PcpParams};
use crate::point::Point;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Script {
    pub name: String,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Query { oracle: OracleId, point: Point },
    Branch {
        answer: usize,
        equals: Elem,
        then: Vec<Step>,
        #[serde(rename = "else", default)]
        otherwise: Vec<Step>,
    },
}

impl Script {
    pub fn parse(s: &str) -> Result<Vec<Script>, Error> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Parse(format!("script: {e}")))?;
        let scripts = if v.is_array() { serde_json::from_value(v) } else { serde_json::from_value(v).map(|s| vec![s]) };
        scripts.map_err(|e| Error::Parse(format!("script: {e}")))
    }

    /// Checks every query against the parameters and every branch against
    /// the answers available on its path.
    pub fn validate(&self, params: &PcpParams) -> Result<(), Error> {
        fn walk(steps: &[Step], params: &PcpParams, mut answers: usize) -> Result<(), Error> {
            for (k, s) in steps.iter().enumerate() {
                match s {
                    Step::Query { oracle, point } => {
                        oracle.check(params, point)?;
                        answers += 1;
                    }
                    Step::Branch { answer, equals, then, otherwise } => {
                        if *answer >= answers {
                            return Err(Error::Parse(format!("branch on answer {answer} but only {answers} answers so far")));
                        }
                        if k + 1 != steps.len() {
                            return Err(Error::Parse("a branch must be the last step of its list".into()));
                        }
                        if *equals >= params.p {
                            return Err(Error::Parse(format!("branch value {equals} is not in F_{}", params.p)));
                        }
                        walk(then, params, answers)?;
                        walk(otherwise, params, answers)?;
                        return Ok(());
                    }
                }
            }
            Ok(())
        }
        walk(&self.steps, params, 0)
    }

    /// Queries on the path taken when `answer` supplies each answer.
    pub fn run<V: Clone>(
        &self,
        mut answer: impl FnMut(OracleId, &Point) -> Result<V, Error>,
        equals: impl Fn(&V, Elem) -> bool,
    ) -> Result<Vec<(OracleId, Point, V)>, Error> {
        let mut out: Vec<(OracleId, Point, V)> = Vec::new();
        let mut steps: &[Step] = &self.steps;
        let mut k = 0;
        while k < steps.len() {
            match &steps[k] {
                Step::Query { oracle, point } => {
                    let v = answer(*oracle, point)?;
                    out.push((*oracle, point.clone(), v));
                    k += 1;
                }
                Step::Branch { answer: a, equals: w, then, otherwise } => {
                    let v = &out.get(*a).ok_or_else(|| Error::Parse(format!("branch on missing answer {a}")))?.2;
                    steps = if equals(v, *w) { then } else { otherwise };
                    k = 0;
                }
            }
        }
        Ok(out)
    }

    /// Every path through the branches: the queries made and the conditions
    /// `answer[k] = w` that lead there. An `else` arm splits into one path
    /// per value `w' ≠ w`.
    pub fn paths(&self, p: u64) -> Vec<ScriptPath> {
        fn walk(steps: &[Step], p: u64, cur: ScriptPath, out: &mut Vec<ScriptPath>) {
            let mut cur = cur;
            for s in steps {
                match s {
                    Step::Query { oracle, point } => cur.queries.push((*oracle, point.clone())),
                    Step::Branch { answer, equals, then, otherwise } => {
                        let mut yes = cur.clone();
                        yes.conditions.push((*answer, *equals));
                        walk(then, p, yes, out);
                        for w in (0..p).filter(|w| w != equals) {
                            let mut no = cur.clone();
                            no.conditions.push((*answer, w));
                            walk(otherwise, p, no, out);
                        }
                        return;
                    }
                }
            }
            out.push(cur);
        }
        let mut out = Vec::new();
        walk(&self.steps, p, ScriptPath::default(), &mut out);
        out
    }

    /// Longest number of queries on any path.
    pub fn depth(&self) -> usize {
        fn walk(steps: &[Step]) -> usize {
            let mut n = 0;
            for s in steps {
                match s {
                    Step::Query { .. } => n += 1,
                    Step::Branch { then, otherwise, .. } => return n + walk(then).max(walk(otherwise)),
                }
            }
            n
        }
        walk(&self.steps)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScriptPath {
    pub queries: Vec<(OracleId, Point)>,
    pub conditions: Vec<(usize, Elem)>,
}

pub fn query(oracle: OracleId, point: &[Elem]) -> Step {
    Step::Query { oracle, point: Point::new(point) }
}

/// A random script with at most `len` queries per path, mixing all tables.
/// With probability one half a branch on an earlier answer is inserted.
pub fn random_script<R: RngCore + ?Sized>(params: &PcpParams, len: usize, name: &str, rng: &mut R) -> Script {
    fn random_query<R: RngCore + ?Sized>(params: &PcpParams, rng: &mut R) -> Step {
        let oracle = match rng.gen_range(0..3) {
            0 => OracleId::Sigma,
            1 => OracleId::Q,
            _ => OracleId::T(rng.gen_range(1..=params.m)),
        };
        let n = if oracle == OracleId::Sigma { rng.gen_range(0..=params.m) } else { params.m };
        let pt: Vec<Elem> = (0..n).map(|_| rng.gen_range(0..params.p)).collect();
        query(oracle, &pt)
    }
    let len = len.max(1);
    let mut steps: Vec<Step> = Vec::new();
    let split = if len >= 2 && rng.gen_bool(0.5) { Some(rng.gen_range(1..len)) } else { None };
    match split {
        None => steps.extend((0..len).map(|_| random_query(params, rng))),
        Some(s) => {
            steps.extend((0..s).map(|_| random_query(params, rng)));
            let then = (0..len - s).map(|_| random_query(params, rng)).collect();
            let otherwise = (0..len - s).map(|_| random_query(params, rng)).collect();
            steps.push(Step::Branch { answer: rng.gen_range(0..s), equals: rng.gen_range(0..params.p), then, otherwise });
        }
    }
    Script { name: name.to_string(), steps }
}
