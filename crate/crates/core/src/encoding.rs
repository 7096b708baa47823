//! Local simulation of linear randomised encodings from their constraint
//! locators, and composition of encodings.
//!
//! An encoding maps a message to a random codeword. Its locator, given query
//! points `I`, returns message positions `R` and a matrix `Z` such that the
//! answers on `I` are uniform over `{β : Z (m|_R, β) = 0}`. A [`Session`]
//! answers queries one at a time with exactly the conditional law of the
//! real codeword given the previous answers, reading the message only on
//! located positions.

use std::collections::{BTreeMap, BTreeSet};

use crate::antisym::{self, antisym_locate};
use crate::field::{Elem, Field};
use crate::linalg::{image_dual_basis, Matrix};
use crate::locator::{rm_locate, LocatorOutput};
use crate::point::{Point, ProductSet};
use crate::rm::{dedup_points, CodeView};
use crate::sigma_rm::{self, sigma_rm_locate};
use crate::value::{Sampler, Value};
use crate::Error;

/// Message or codeword index set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Matches every domain; used by the identity encoding.
    Any,
    /// `𝒜`
    Cube(ProductSet),
    /// `𝒜 ∪ {⊥}`
    CubeBot(ProductSet),
    /// `𝒜̄`, all prefixes of `𝒜`
    Prefixes(ProductSet),
    /// `F^m`
    FieldPoints { p: u64, m: usize },
    /// `F^{≤m}`
    FieldPrefixes { p: u64, m: usize },
}

impl Domain {
    pub fn contains(&self, x: &Point) -> bool {
        match self {
            Domain::Any => true,
            Domain::Cube(a) => a.contains(x.coords()),
            Domain::CubeBot(a) => x.is_bot() || a.contains(x.coords()),
            Domain::Prefixes(a) => a.contains_prefix(x.coords()),
            Domain::FieldPoints { p, m } => x.len() == *m && x.coords().iter().all(|c| c < p),
            Domain::FieldPrefixes { p, m } => x.len() <= *m && x.coords().iter().all(|c| c < p),
        }
    }

    fn matches(&self, other: &Domain) -> bool {
        matches!(self, Domain::Any) || matches!(other, Domain::Any) || self == other
    }
}

/// The encodings the crate knows how to locate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EncodingSpec {
    /// Codeword = message.
    Identity { field: Field },
    /// Uniform LDE of `f: 𝒜 → F`, evaluated on `F^m`.
    Rm { view: CodeView, a: ProductSet },
    /// Subcube sums of a uniform LDE, message `Σ[f]` on `𝒜̄`.
    SigmaRm { view: CodeView, a: ProductSet },
    /// `Σ[F|_𝒜 + G]` on `𝒜̄` with `G` a uniform antisymmetric mask.
    AntiSym { field: Field, a: ProductSet },
    /// `outer ∘ inner`: the inner codeword is the outer message.
    Composed { inner: Box<EncodingSpec>, outer: Box<EncodingSpec> },
}

impl EncodingSpec {
    pub fn field(&self) -> Field {
        match self {
            EncodingSpec::Identity { field } | EncodingSpec::AntiSym { field, .. } => *field,
            EncodingSpec::Rm { view, .. } | EncodingSpec::SigmaRm { view, .. } => view.field,
            EncodingSpec::Composed { inner, .. } => inner.field(),
        }
    }

    pub fn message_domain(&self) -> Domain {
        match self {
            EncodingSpec::Identity { .. } => Domain::Any,
            EncodingSpec::Rm { a, .. } => Domain::Cube(a.clone()),
            EncodingSpec::SigmaRm { a, .. } => Domain::Prefixes(a.clone()),
            EncodingSpec::AntiSym { a, .. } => Domain::CubeBot(a.clone()),
            EncodingSpec::Composed { inner, .. } => inner.message_domain(),
        }
    }

    pub fn output_domain(&self) -> Domain {
        match self {
            EncodingSpec::Identity { .. } => Domain::Any,
            EncodingSpec::Rm { view, .. } => Domain::FieldPoints { p: view.field.p(), m: view.m },
            EncodingSpec::SigmaRm { view, .. } => Domain::FieldPrefixes { p: view.field.p(), m: view.m },
            EncodingSpec::AntiSym { a, .. } => Domain::Prefixes(a.clone()),
            EncodingSpec::Composed { outer, .. } => outer.output_domain(),
        }
    }

    /// Locator for this encoding. Columns of `z` are `r` then `i`.
    pub fn locate(&self, pts: &[Point]) -> Result<LocatorOutput, Error> {
        let dom = self.output_domain();
        if let Some(x) = pts.iter().find(|x| !dom.contains(x)) {
            return Err(Error::NotInSet(x.to_string()));
        }
        match self {
            EncodingSpec::Identity { field } => {
                let i = dedup_points(pts);
                let n = i.len();
                let mut z = Matrix::zeros(n, 2 * n);
                for k in 0..n {
                    z.set(k, k, 1);
                    z.set(k, n + k, field.neg(1));
                }
                Ok(LocatorOutput { r: i.clone(), i, z })
            }
            EncodingSpec::Rm { view, a } => rm_locate(view, a, pts),
            EncodingSpec::SigmaRm { view, a } => sigma_rm_locate(view, a, pts),
            EncodingSpec::AntiSym { field, a } => antisym_locate(field, a, pts),
            EncodingSpec::Composed { inner, outer } => compose_locate(inner, outer, pts),
        }
    }

    /// Upper bound on `|R|` for `n` query points.
    pub fn locality_bound(&self, n: usize) -> u128 {
        match self {
            EncodingSpec::Identity { .. } | EncodingSpec::Rm { .. } => n as u128,
            EncodingSpec::SigmaRm { a, .. } => sigma_rm::locality_bound(a, n),
            EncodingSpec::AntiSym { a, .. } => antisym::locality_bound(a, n),
            EncodingSpec::Composed { inner, outer } => {
                let mid = outer.locality_bound(n);
                inner.locality_bound(usize::try_from(mid).unwrap_or(usize::MAX))
            }
        }
    }
}

/// `outer ∘ inner`. The inner output domain must be the outer message domain.
pub fn compose(inner: EncodingSpec, outer: EncodingSpec) -> Result<EncodingSpec, Error> {
    if !inner.output_domain().matches(&outer.message_domain()) {
        return Err(Error::Params(format!(
            "inner output domain {:?} differs from outer message domain {:?}",
            inner.output_domain(),
            outer.message_domain()
        )));
    }
    if inner.field() != outer.field() {
        return Err(Error::Params("encodings over different fields".into()));
    }
    Ok(EncodingSpec::Composed { inner: Box::new(inner), outer: Box::new(outer) })
}

/// Locate with the outer locator, locate its message positions with the
/// inner one, stack both relation sets and eliminate the intermediate
/// coordinates.
fn compose_locate(inner: &EncodingSpec, outer: &EncodingSpec, pts: &[Point]) -> Result<LocatorOutput, Error> {
    let f = inner.field();
    let out = outer.locate(pts)?;
    let inn = inner.locate(&out.r)?;
    let (nr, nm, ni) = (inn.r.len(), out.r.len(), out.i.len());
    let n = nr + nm + ni;
    let mid: BTreeMap<&Point, usize> = out.r.iter().enumerate().map(|(k, p)| (p, nr + k)).collect();

    let mut rows = Vec::new();
    for row in out.z.to_rows() {
        let mut full = vec![0; n];
        full[nr..].copy_from_slice(&row);
        rows.push(full);
    }
    for row in inn.z.to_rows() {
        let mut full = vec![0; n];
        full[..nr].copy_from_slice(&row[..nr]);
        for (x, &v) in inn.i.iter().zip(&row[nr..]) {
            let k = mid[x];
            full[k] = f.add(full[k], v);
        }
        rows.push(full);
    }
    let outer_cols: Vec<usize> = (0..nr).chain(nr + nm..n).collect();
    let mut copy = Matrix::zeros(outer_cols.len(), n);
    for (r, &c) in outer_cols.iter().enumerate() {
        copy.set(r, c, 1);
    }
    let z = image_dual_basis(&f, &copy, &rows)?;
    let keep: Vec<usize> = (0..nr).filter(|&c| z.iter().any(|row| row[c] != 0)).collect();
    let cols: Vec<usize> = keep.iter().copied().chain(nr..nr + ni).collect();
    let z = Matrix::from_rows(&z, nr + ni).select_cols(&cols);
    Ok(LocatorOutput { r: keep.into_iter().map(|c| inn.r[c].clone()).collect(), i: out.i, z })
}

/// Message access for a simulator.
pub trait MessageOracle {
    fn message(&self, x: &Point) -> Result<Elem, Error>;
}

impl MessageOracle for BTreeMap<Point, Elem> {
    fn message(&self, x: &Point) -> Result<Elem, Error> {
        self.get(x).copied().ok_or_else(|| Error::NotInSet(x.to_string()))
    }
}

/// Message of the composed proof encoding: `F` on the cube, `γ` at ⊥.
pub struct CubeMessage<'a> {
    pub h: ProductSet,
    pub gamma: Elem,
    pub eval: &'a dyn Fn(&[Elem]) -> Elem,
}

impl MessageOracle for CubeMessage<'_> {
    fn message(&self, x: &Point) -> Result<Elem, Error> {
        if x.is_bot() {
            Ok(self.gamma)
        } else if self.h.contains(x.coords()) {
            Ok((self.eval)(x.coords()))
        } else {
            Err(Error::NotInSet(x.to_string()))
        }
    }
}

/// Ordered query-answer pairs with distinct points.
#[derive(Clone, Debug)]
pub struct QueryAnswerSet<V> {
    entries: Vec<(Point, V)>,
    index: BTreeMap<Point, usize>,
}

impl<V> Default for QueryAnswerSet<V> {
    fn default() -> Self {
        QueryAnswerSet { entries: Vec::new(), index: BTreeMap::new() }
    }
}

impl<V: Clone> QueryAnswerSet<V> {
    pub fn get(&self, x: &Point) -> Option<&V> {
        self.index.get(x).map(|&k| &self.entries[k].1)
    }

    pub fn entries(&self) -> &[(Point, V)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.entries.iter().map(|(p, _)| p.clone()).collect()
    }

    /// Records `x ↦ v`; errors if `x` already has an entry.
    pub fn insert(&mut self, x: Point, v: V) -> Result<(), Error> {
        if self.index.contains_key(&x) {
            return Err(Error::Inconsistent(x.to_string()));
        }
        self.index.insert(x.clone(), self.entries.len());
        self.entries.push((x, v));
        Ok(())
    }
}

/// Simulator state for one encoding: the answers so far and every message
/// position read.
#[derive(Clone, Debug)]
pub struct Session<V> {
    pub spec: EncodingSpec,
    pub t: QueryAnswerSet<V>,
    pub reads: BTreeSet<Point>,
}

impl<V: Value> Session<V> {
    pub fn new(spec: EncodingSpec) -> Self {
        Session { spec, t: QueryAnswerSet::default(), reads: BTreeSet::new() }
    }

    /// Answer at `alpha` drawn from its law given the answers so far.
    pub fn query<S: Sampler<V>>(&mut self, msg: &dyn MessageOracle, alpha: &Point, sampler: &mut S) -> Result<V, Error> {
        let v = simulate_query(&self.spec, msg, &self.t, alpha, sampler, &mut self.reads)?;
        if self.t.get(alpha).is_none() {
            self.t.insert(alpha.clone(), v.clone())?;
        }
        Ok(v)
    }
}

/// One step of the local simulator: locate `supp(T) ∪ {α}`, read the
/// message on `R`, and either solve for the answer at `α` from a relation
/// that involves it or draw it fresh. Positions read are added to `reads`.
pub fn simulate_query<V: Value, S: Sampler<V>>(
    spec: &EncodingSpec,
    msg: &dyn MessageOracle,
    t: &QueryAnswerSet<V>,
    alpha: &Point,
    sampler: &mut S,
    reads: &mut BTreeSet<Point>,
) -> Result<V, Error> {
    if let Some(v) = t.get(alpha) {
        return Ok(v.clone());
    }
    let f = spec.field();
    let mut pts = t.points();
    pts.push(alpha.clone());
    let out = spec.locate(&pts)?;
    let mut known: Vec<Option<V>> = Vec::with_capacity(out.r.len() + out.i.len());
    for x in &out.r {
        reads.insert(x.clone());
        known.push(Some(V::constant(msg.message(x)?)));
    }
    let mut col = None;
    for (k, x) in out.i.iter().enumerate() {
        match t.get(x) {
            Some(v) => known.push(Some(v.clone())),
            None => {
                col = Some(out.r.len() + k);
                known.push(None);
            }
        }
    }
    let col = col.expect("query point is among the located points");

    let mut forced: Option<V> = None;
    for r in 0..out.z.rows() {
        let mut acc = V::constant(0);
        for (c, v) in known.iter().enumerate() {
            let z = out.z.get(r, c);
            if z != 0 {
                if let Some(v) = v {
                    acc.add_scaled(&f, z, v);
                }
            }
        }
        let za = out.z.get(r, col);
        if za == 0 {
            if !acc.is_zero() {
                return Err(Error::Inconsistent(format!("answers before {alpha}")));
            }
            continue;
        }
        // za·β + acc = 0
        let val = acc.scaled(&f, f.neg(f.inv(za)));
        match &forced {
            None => forced = Some(val),
            Some(prev) => {
                if !prev.sub(&f, &val).is_zero() {
                    return Err(Error::Inconsistent(alpha.to_string()));
                }
            }
        }
    }
    Ok(forced.unwrap_or_else(|| sampler.fresh()))
}

/// `Σ-RM ∘ Σ-AntiSym` over `𝒜 = H^m` with degree vector `dv`: the encoding
/// under which the proof's summation table is distributed.
pub fn enc_pcp_spec(field: Field, h: &[Elem], dv: &[usize]) -> Result<EncodingSpec, Error> {
    let m = dv.len();
    let a = ProductSet::cube(h, m)?;
    a.check_field(&field)?;
    for (i, &d) in dv.iter().enumerate() {
        if d < 2 * (h.len() - 1) {
            return Err(Error::Degree(format!("d_{} = {d} < 2(|H| - 1) = {}", i + 1, 2 * (h.len() - 1))));
        }
    }
    let inner = EncodingSpec::AntiSym { field, a: a.clone() };
    let outer = EncodingSpec::SigmaRm { view: CodeView::new(field, dv), a };
    compose(inner, outer)
}
