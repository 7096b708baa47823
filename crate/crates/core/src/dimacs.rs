//! DIMACS CNF.
//!
//! `c` lines are comments, `p cnf <vars> <clauses>` is the header, and each
//! clause is a run of nonzero literals closed by `0`. Clauses may span lines.
//! A line holding only `%` ends the input (SATLIB files).

use crate::pcp::CnfInstance;
use crate::Error;

fn err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("dimacs line {line}: {msg}"))
}

pub fn parse(text: &str) -> Result<CnfInstance, Error> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut cur: Vec<i64> = Vec::new();
    let mut last = 0;
    for (k, line) in text.lines().enumerate() {
        let n = k + 1;
        last = n;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line == "%" {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(n, "second header"));
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 || f[0] != "p" || f[1] != "cnf" {
                return Err(err(n, format!("bad header {line:?}")));
            }
            let vars = f[2].parse().map_err(|_| err(n, format!("bad variable count {:?}", f[2])))?;
            let count = f[3].parse().map_err(|_| err(n, format!("bad clause count {:?}", f[3])))?;
            header = Some((vars, count));
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(err(n, "clause before the header"));
        };
        for tok in line.split_whitespace() {
            let l: i64 = tok.parse().map_err(|_| err(n, format!("bad literal {tok:?}")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else if l.unsigned_abs() as usize > vars {
                return Err(err(n, format!("literal {l} exceeds {vars} variables")));
            } else {
                cur.push(l);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| err(last, "missing header"))?;
    if !cur.is_empty() {
        return Err(err(last, "last clause is not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(err(last, format!("header declares {count} clauses, found {}", clauses.len())));
    }
    CnfInstance::new(vars, clauses)
}

pub fn to_string(cnf: &CnfInstance) -> String {
    let mut s = format!("p cnf {} {}\n", cnf.num_vars, cnf.clauses.len());
    for c in &cnf.clauses {
        for l in c {
            s.push_str(&format!("{l} "));
        }
        s.push_str("0\n");
    }
    s
}
