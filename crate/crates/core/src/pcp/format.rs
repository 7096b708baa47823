//! Binary proof files.
//!
//! Layout, every number a little-endian `u64`: the magic `ZKP1`, then
//! `p, m, d, |H|, H…, |D|, D…`, then `π_Σ` in length-then-lex order, `π_Q`
//! and each `π_{T_i}` in lex order. `γ` is not stored.

use std::io::{Read, Write};

use crate::Error;

use super::prover::ProofOracle;
use super::PcpParams;

pub const MAGIC: &[u8; 4] = b"ZKP1";

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(format!("proof file: {e}"))
}

pub fn write_proof<W: Write>(w: &mut W, proof: &ProofOracle) -> Result<(), Error> {
    let pp = &proof.params;
    let mut out = Vec::with_capacity(8 * (proof.pi_sigma.len() + (pp.m + 1) * proof.pi_q.len() + 16));
    out.extend_from_slice(MAGIC);
    let mut put = |x: u64| out.extend_from_slice(&x.to_le_bytes());
    put(pp.p);
    put(pp.m as u64);
    put(pp.d as u64);
    put(pp.h.len() as u64);
    pp.h.iter().for_each(|&x| put(x));
    put(pp.d_nodes.len() as u64);
    pp.d_nodes.iter().for_each(|&x| put(x));
    for table in std::iter::once(&proof.pi_sigma).chain([&proof.pi_q]).chain(proof.pi_t.iter()) {
        table.iter().for_each(|&x| put(x));
    }
    w.write_all(&out).map_err(io_err)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Cursor<'_> {
    fn u64(&mut self) -> Result<u64, Error> {
        let end = self.at + 8;
        let chunk = self.bytes.get(self.at..end).ok_or_else(|| Error::Parse(format!("proof file truncated at byte {}", self.at)))?;
        self.at = end;
        Ok(u64::from_le_bytes(chunk.try_into().expect("8 bytes")))
    }

    fn usize(&mut self, what: &str, max: u64) -> Result<usize, Error> {
        let v = self.u64()?;
        if v > max {
            return Err(Error::Parse(format!("{what} = {v} is too large")));
        }
        Ok(v as usize)
    }

    fn table(&mut self, len: u128, p: u64) -> Result<Vec<u64>, Error> {
        let have = (self.bytes.len() - self.at) as u128 / 8;
        if have < len {
            return Err(Error::Parse(format!("proof file truncated: need {len} more entries, have {have}")));
        }
        let mut out = Vec::with_capacity(len as usize);
        for _ in 0..len {
            let x = self.u64()?;
            if x >= p {
                return Err(Error::Parse(format!("entry {x} is not an element of F_{p}")));
            }
            out.push(x);
        }
        Ok(out)
    }
}

/// Reads a proof; `gamma` is the claim it is checked against.
pub fn read_proof<R: Read>(r: &mut R, gamma: u64, cap: u128) -> Result<ProofOracle, Error> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io_err)?;
    if bytes.get(..4) != Some(MAGIC.as_slice()) {
        return Err(Error::Parse("not a proof file (bad magic)".into()));
    }
    let mut c = Cursor { bytes: &bytes, at: 4 };
    let p = c.u64()?;
    let m = c.usize("m", 64)?;
    let d = c.usize("d", 1 << 20)?;
    let nh = c.usize("|H|", p)?;
    let h: Vec<u64> = (0..nh).map(|_| c.u64()).collect::<Result<_, _>>()?;
    let nd = c.usize("|D|", p)?;
    let d_nodes: Vec<u64> = (0..nd).map(|_| c.u64()).collect::<Result<_, _>>()?;
    let params = PcpParams::new(p, m, d, &h, gamma)?;
    if params.h != h || params.d_nodes != d_nodes {
        return Err(Error::Parse(format!("header sets H = {h:?}, D = {d_nodes:?} do not match the expected layout")));
    }
    let need = params.sigma_len() + (m as u128 + 1) * params.table_len();
    if need > cap {
        return Err(Error::Cap(need, cap));
    }
    let pi_sigma = c.table(params.sigma_len(), p)?;
    let pi_q = c.table(params.table_len(), p)?;
    let pi_t = (0..m).map(|_| c.table(params.table_len(), p)).collect::<Result<_, _>>()?;
    if c.at != bytes.len() {
        return Err(Error::Parse(format!("{} trailing bytes after the proof", bytes.len() - c.at)));
    }
    Ok(ProofOracle { params, pi_sigma, pi_q, pi_t })
}
