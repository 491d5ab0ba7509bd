//! The two elementary rewriting moves: twists along admissible pairs and
//! reductions along pseudo-transpositions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::DiagramIso;
use crate::classify::{self, opposition_involution, spherical_subsets};
use crate::diagram::{CoxeterMatrix, DiagramError, Label, VertexSet};
use crate::oracle::{CycNumber, GeometricRep, OracleError, ProductOrder, DEFAULT_BOUND, DEFAULT_MAX_MODULUS};

/// Largest rank for which admissible pairs are enumerated by default.
pub const DEFAULT_RANK_CAP: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("invalid admissible pair: {0}")]
    InvalidPair(String),
    #[error("`{0}` is not a pseudo-transposition")]
    NotPseudoTransposition(String),
    #[error("rank {rank} exceeds the enumeration cap {cap}")]
    RankCapExceeded { rank: usize, cap: usize },
    #[error("oracle could not determine the label between `{0}` and `{1}`")]
    Undetermined(String, String),
    #[error("replayed move does not match the record: {0}")]
    ReplayMismatch(String),
    #[error("cannot parse move `{0}`")]
    Syntax(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveOptions {
    /// Largest cyclotomic modulus the oracle may use.
    pub max_modulus: u32,
    /// Matrix powers tried when computing an order.
    pub bound: u32,
    /// Ask the oracle for the labels between `K` and `L` after a twist
    /// instead of keeping them infinite.
    pub hybrid_twist: bool,
    /// Largest rank for which admissible pairs are enumerated.
    pub rank_cap: usize,
}

impl Default for MoveOptions {
    fn default() -> Self {
        MoveOptions {
            max_modulus: DEFAULT_MAX_MODULUS,
            bound: DEFAULT_BOUND,
            hybrid_twist: false,
            rank_cap: DEFAULT_RANK_CAP,
        }
    }
}

/// A pair `(J, K)` of vertex sets of a fixed diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissiblePair {
    pub j: VertexSet,
    pub k: VertexSet,
}

impl AdmissiblePair {
    pub fn from_names<S: AsRef<str>>(m: &CoxeterMatrix, j: &[S], k: &[S]) -> Result<Self, MoveError> {
        Ok(AdmissiblePair {
            j: m.set_of(j)?,
            k: m.set_of(k)?,
        })
    }

    /// `L`: everything outside `J ∪ J^⊥ ∪ K`.
    pub fn l(&self, m: &CoxeterMatrix) -> VertexSet {
        m.vertex_set()
            .difference(self.j)
            .difference(m.perp_unchecked(self.j))
            .difference(self.k)
    }

    pub fn is_nontrivial(&self, m: &CoxeterMatrix) -> bool {
        !self.k.is_empty() && !self.l(m).is_empty()
    }

    /// Checks both admissibility conditions.
    pub fn validate(&self, m: &CoxeterMatrix) -> Result<(), MoveError> {
        let all = m.vertex_set();
        if !self.j.is_subset(all) || !self.k.is_subset(all) {
            return Err(MoveError::InvalidPair("vertex set outside the diagram".into()));
        }
        if !classify::is_spherical_unchecked(m, self.j) {
            return Err(MoveError::InvalidPair("J is not spherical".into()));
        }
        if !self.k.is_disjoint(self.j.union(m.perp_unchecked(self.j))) {
            return Err(MoveError::InvalidPair("K meets J or its orthogonal complement".into()));
        }
        let l = self.l(m);
        for a in self.k.iter() {
            for b in l.iter() {
                if m.label(a, b).is_finite() {
                    return Err(MoveError::InvalidPair(format!(
                        "label between {} in K and {} in L is finite",
                        m.name(a),
                        m.name(b)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn record(&self, m: &CoxeterMatrix) -> MoveRecord {
        MoveRecord::Twist {
            j: m.set_names(self.j),
            k: m.set_names(self.k),
        }
    }
}

/// `τ` whose only finite label other than 2 is `2(2k+1)` to `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PseudoTransposition {
    pub tau: String,
    pub t: String,
    pub k: u32,
}

impl PseudoTransposition {
    /// The label `2(2k+1)` between `τ` and `t`.
    pub fn n(&self) -> u32 {
        2 * (2 * self.k + 1)
    }
}

impl fmt::Display for PseudoTransposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tau={} t={} label={}", self.tau, self.t, self.n())
    }
}

/// One elementary move, in the vertex names of the diagram it applies to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "RecordRepr", try_from = "RecordRepr")]
pub enum MoveRecord {
    Twist {
        j: Vec<String>,
        k: Vec<String>,
    },
    Reduction {
        tau: String,
        t: String,
        k: u32,
        u: String,
        rho: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Twist,
    Reduction,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Payload {
    Twist { j: Vec<String>, k: Vec<String> },
    Reduction { tau: String, t: String, k: u32, u: String, rho: String },
}

/// JSON shape: `kind`, `payload`, and `vertex_map` listing the input
/// vertices that were replaced (all others keep their names).
#[derive(Serialize, Deserialize)]
struct RecordRepr {
    kind: MoveKind,
    payload: Payload,
    vertex_map: BTreeMap<String, Vec<String>>,
}

impl From<MoveRecord> for RecordRepr {
    fn from(r: MoveRecord) -> Self {
        let kind = r.kind();
        let vertex_map = r.vertex_map();
        let payload = match r {
            MoveRecord::Twist { j, k } => Payload::Twist { j, k },
            MoveRecord::Reduction { tau, t, k, u, rho } => Payload::Reduction { tau, t, k, u, rho },
        };
        RecordRepr {
            kind,
            payload,
            vertex_map,
        }
    }
}

impl TryFrom<RecordRepr> for MoveRecord {
    type Error = String;

    fn try_from(r: RecordRepr) -> Result<Self, String> {
        let rec = match (r.kind, r.payload) {
            (MoveKind::Twist, Payload::Twist { j, k }) => MoveRecord::Twist { j, k },
            (MoveKind::Reduction, Payload::Reduction { tau, t, k, u, rho }) => {
                MoveRecord::Reduction { tau, t, k, u, rho }
            }
            _ => return Err("move kind does not match its payload".into()),
        };
        if rec.vertex_map() != r.vertex_map {
            return Err("vertex_map does not match the payload".into());
        }
        Ok(rec)
    }
}

impl MoveRecord {
    pub fn kind(&self) -> MoveKind {
        match self {
            MoveRecord::Twist { .. } => MoveKind::Twist,
            MoveRecord::Reduction { .. } => MoveKind::Reduction,
        }
    }

    /// Replaced input vertices and their replacements.
    pub fn vertex_map(&self) -> BTreeMap<String, Vec<String>> {
        match self {
            MoveRecord::Twist { .. } => BTreeMap::new(),
            MoveRecord::Reduction { tau, u, rho, .. } => {
                BTreeMap::from([(tau.clone(), vec![u.clone(), rho.clone()])])
            }
        }
    }

    /// The same move on a relabeled copy. Fresh reduction names are not
    /// vertices of the source and are kept.
    pub fn renamed(&self, iso: &DiagramIso) -> MoveRecord {
        let r = |x: &String| iso.get(x).map_or_else(|| x.clone(), str::to_string);
        match self {
            MoveRecord::Twist { j, k } => MoveRecord::Twist {
                j: j.iter().map(r).collect(),
                k: k.iter().map(r).collect(),
            },
            MoveRecord::Reduction { tau, t, k, u, rho } => MoveRecord::Reduction {
                tau: r(tau),
                t: r(t),
                k: *k,
                u: u.clone(),
                rho: rho.clone(),
            },
        }
    }

    /// Parses one line against the diagram it applies to; reduction lines
    /// name only `τ` and the fresh vertices, so `t` and `k` are read off `m`.
    pub fn parse_line(line: &str, m: &CoxeterMatrix) -> Result<MoveRecord, MoveError> {
        let err = || MoveError::Syntax(line.to_string());
        let set = |s: &str, key: &str| -> Option<Vec<String>> {
            let inner = s.strip_prefix(key)?.strip_prefix("={")?.strip_suffix('}')?;
            Some(
                inner
                    .split(',')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(str::to_string)
                    .collect(),
            )
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["twist", j, k] => Ok(MoveRecord::Twist {
                j: set(j, "J").ok_or_else(err)?,
                k: set(k, "K").ok_or_else(err)?,
            }),
            ["reduce", tau, "->", u, rho] => {
                let tau = tau.strip_prefix("tau=").ok_or_else(err)?;
                let u = u.strip_prefix("u=").ok_or_else(err)?;
                let rho = rho.strip_prefix("rho=").ok_or_else(err)?;
                let pt = pseudo_transpositions(m)
                    .into_iter()
                    .find(|p| p.tau == tau)
                    .ok_or_else(|| MoveError::NotPseudoTransposition(tau.to_string()))?;
                Ok(MoveRecord::Reduction {
                    tau: pt.tau,
                    t: pt.t,
                    k: pt.k,
                    u: u.to_string(),
                    rho: rho.to_string(),
                })
            }
            _ => Err(err()),
        }
    }
}

impl fmt::Display for MoveRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveRecord::Twist { j, k } => write!(f, "twist J={{{}}} K={{{}}}", j.join(","), k.join(",")),
            MoveRecord::Reduction { tau, u, rho, .. } => write!(f, "reduce tau={tau} -> u={u} rho={rho}"),
        }
    }
}

/// All nontrivial admissible pairs. `J` runs over nonempty spherical subsets;
/// `K` over nonempty proper unions of the components of
/// `V \ (J ∪ J^⊥)` under the finite labels, which are exactly the sets with
/// only infinite labels to the rest.
pub fn admissible_pairs(m: &CoxeterMatrix, rank_cap: usize) -> Result<Vec<AdmissiblePair>, MoveError> {
    if m.rank() > rank_cap {
        return Err(MoveError::RankCapExceeded {
            rank: m.rank(),
            cap: rank_cap,
        });
    }
    let mut out = Vec::new();
    for j in spherical_subsets(m, m.rank()) {
        let rest = m.vertex_set().difference(j).difference(m.perp_unchecked(j));
        let comps = m.components_by(rest, Label::is_finite);
        if comps.len() < 2 {
            continue;
        }
        for mask in 1u64..(1u64 << comps.len()) - 1 {
            let k = comps
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(VertexSet::EMPTY, |acc, (_, c)| acc.union(*c));
            out.push(AdmissiblePair { j, k });
        }
    }
    Ok(out)
}

/// Twisted diagram over the same names: labels between `J` and `L` are
/// permuted by the opposition involution of `J`; everything else is kept,
/// except that in hybrid mode the `K`–`L` labels are recomputed.
pub fn apply_twist(
    m: &CoxeterMatrix,
    pair: &AdmissiblePair,
    opts: &MoveOptions,
) -> Result<(CoxeterMatrix, MoveRecord), MoveError> {
    pair.validate(m)?;
    let record = pair.record(m);
    let l = pair.l(m);
    if pair.k.is_empty() || l.is_empty() {
        return Ok((m.clone(), record));
    }
    let sigma = opposition_involution(m, pair.j).map_err(OracleError::from)?;
    let mut out = m.clone();
    for j in pair.j.iter() {
        for x in l.iter() {
            out.set_label(j, x, m.label(sigma.apply(j), x));
        }
    }
    if opts.hybrid_twist {
        for a in pair.k.iter() {
            for b in l.iter() {
                let label = twisted_order(m, pair.j, a, b, opts)?;
                out.set_label(a, b, label);
            }
        }
    }
    Ok((out, record))
}

/// Order of `a · ρ_J b ρ_J`, computed in the parabolic subgroup on `J ∪ {a, b}`.
fn twisted_order(
    m: &CoxeterMatrix,
    j: VertexSet,
    a: usize,
    b: usize,
    opts: &MoveOptions,
) -> Result<Label, MoveError> {
    let support = j.with(a).with(b);
    let sub = m.subdiagram(support)?;
    let rep = GeometricRep::<CycNumber>::with_max_modulus(&sub, opts.max_modulus)?;
    let jj = sub.set_of(&m.set_names(j))?;
    let rho = rep.longest_element(jj)?;
    let ia = sub.index_of(m.name(a)).expect("in support");
    let ib = sub.index_of(m.name(b)).expect("in support");
    let conj = rep.conjugate(&rho, &rep.generator(ib));
    rep.order_of_product(&rep.generator(ia), &conj, opts.bound)?
        .label()
        .ok_or_else(|| MoveError::Undetermined(m.name(a).into(), m.name(b).into()))
}

/// One entry of a twist check where the diagram and the oracle disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistMismatch {
    pub u: String,
    pub v: String,
    pub combinatorial: Label,
    pub oracle: ProductOrder,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistCheck {
    pub twisted: CoxeterMatrix,
    pub mismatches: Vec<TwistMismatch>,
}

impl TwistCheck {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the twisted diagram with the orders of products in the twisted
/// reflection set `J ∪ J^⊥ ∪ K ∪ ρ_J L ρ_J` of the original group.
pub fn verify_twist(m: &CoxeterMatrix, pair: &AdmissiblePair, opts: &MoveOptions) -> Result<TwistCheck, MoveError> {
    let (twisted, _) = apply_twist(m, pair, opts)?;
    let rep = GeometricRep::<CycNumber>::with_max_modulus(m, opts.max_modulus)?;
    let l = pair.l(m);
    let rho = rep.longest_element(pair.j)?;
    let set: Vec<_> = (0..m.rank())
        .map(|i| {
            let g = rep.generator(i);
            if l.contains(i) {
                rep.conjugate(&rho, &g)
            } else {
                g
            }
        })
        .collect();
    let mut mismatches = Vec::new();
    for a in 0..m.rank() {
        for b in a + 1..m.rank() {
            let order = rep.order_of_product(&set[a], &set[b], opts.bound)?;
            let label = twisted.label(a, b);
            if order.label() != Some(label) {
                mismatches.push(TwistMismatch {
                    u: m.name(a).into(),
                    v: m.name(b).into(),
                    combinatorial: label,
                    oracle: order,
                });
            }
        }
    }
    Ok(TwistCheck { twisted, mismatches })
}

fn pt_at(m: &CoxeterMatrix, tau: usize) -> Option<PseudoTransposition> {
    let mut witness = None;
    for s in 0..m.rank() {
        if s == tau {
            continue;
        }
        match m.label(tau, s) {
            Label::Finite(2) | Label::Infinity => {}
            Label::Finite(n) => {
                if witness.is_some() || n % 4 != 2 || n < 6 {
                    return None;
                }
                witness = Some((s, n));
            }
        }
    }
    let (t, n) = witness?;
    let pt2 = (0..m.rank())
        .filter(|&s| s != tau && s != t && m.label(s, tau) == Label::TWO)
        .all(|s| m.label(s, t) == Label::TWO);
    pt2.then(|| PseudoTransposition {
        tau: m.name(tau).to_string(),
        t: m.name(t).to_string(),
        k: (n / 2 - 1) / 2,
    })
}

/// All pseudo-transpositions, in vertex order.
pub fn pseudo_transpositions(m: &CoxeterMatrix) -> Vec<PseudoTransposition> {
    (0..m.rank()).filter_map(|tau| pt_at(m, tau)).collect()
}

fn fresh_name(m: &CoxeterMatrix, taken: &[String], base: String) -> String {
    let free = |n: &str| m.index_of(n).is_none() && !taken.iter().any(|x| x == n);
    if free(&base) {
        return base;
    }
    (2..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| free(n))
        .expect("some suffix is free")
}

/// Replaces `τ` by `u = τtτ` and `r = (τt)^{2k+1}`. Labels towards vertices
/// with an infinite label to `τ` are computed by the oracle.
pub fn apply_reduction(
    m: &CoxeterMatrix,
    pt: &PseudoTransposition,
    opts: &MoveOptions,
) -> Result<(CoxeterMatrix, MoveRecord), MoveError> {
    let tau = m
        .index_of(&pt.tau)
        .ok_or_else(|| MoveError::NotPseudoTransposition(pt.tau.clone()))?;
    if pt_at(m, tau).as_ref() != Some(pt) {
        return Err(MoveError::NotPseudoTransposition(pt.tau.clone()));
    }
    let t = m.index_of(&pt.t).expect("validated");
    let u_name = fresh_name(m, &[], format!("{}_u", pt.tau));
    let r_name = fresh_name(m, std::slice::from_ref(&u_name), format!("{}_rho", pt.tau));

    let mut names = Vec::with_capacity(m.rank() + 1);
    // old index -> new index, for every old vertex other than tau
    let mut pos = vec![usize::MAX; m.rank()];
    for i in 0..m.rank() {
        if i == tau {
            names.push(u_name.clone());
            names.push(r_name.clone());
        } else {
            pos[i] = names.len();
            names.push(m.name(i).to_string());
        }
    }
    let (u, r) = (tau, tau + 1);
    let mut out = CoxeterMatrix::new(names)?;
    for (a, b, l) in m.edges() {
        if a != tau && b != tau {
            out.set_label(pos[a], pos[b], l);
        }
    }
    out.set_label(pos[t], u, Label::Finite(2 * pt.k + 1));
    for s in 0..m.rank() {
        if s == tau || s == t || m.label(s, tau) != Label::Infinity {
            continue;
        }
        let (lu, lr) = reduction_labels(m, s, tau, t, pt.k, opts)?;
        out.set_label(pos[s], u, lu);
        out.set_label(pos[s], r, lr);
    }
    let record = MoveRecord::Reduction {
        tau: pt.tau.clone(),
        t: pt.t.clone(),
        k: pt.k,
        u: u_name,
        rho: r_name,
    };
    Ok((out, record))
}

/// Orders of `s · τtτ` and `s · (τt)^{2k+1}` in the parabolic on `{s, τ, t}`.
fn reduction_labels(
    m: &CoxeterMatrix,
    s: usize,
    tau: usize,
    t: usize,
    k: u32,
    opts: &MoveOptions,
) -> Result<(Label, Label), MoveError> {
    let sub = m.subdiagram(VertexSet::singleton(s).with(tau).with(t))?;
    let rep = GeometricRep::<CycNumber>::with_max_modulus(&sub, opts.max_modulus)?;
    let idx = |i: usize| sub.index_of(m.name(i)).expect("in support");
    let (is, itau, it) = (idx(s), idx(tau), idx(t));
    let gs = rep.generator(is);
    let u = rep.element_from_indices(&[itau, it, itau]);
    let rho_word: Vec<usize> = (0..2 * k + 1).flat_map(|_| [itau, it]).collect();
    let rho = rep.element_from_indices(&rho_word);
    let undetermined = |x: &str| MoveError::Undetermined(m.name(s).into(), x.into());
    let lu = rep
        .order_of_product(&gs, &u, opts.bound)?
        .label()
        .ok_or_else(|| undetermined("u"))?;
    let lr = rep
        .element_order(&rep.mul(&gs, &rho), opts.bound)
        .label()
        .ok_or_else(|| undetermined("rho"))?;
    Ok((lu, lr))
}

/// Reduces the lexicographically least `τ` until no pseudo-transposition is
/// left. Returns the reduced diagram and the trace.
pub fn reduced_reduction(m: &CoxeterMatrix, opts: &MoveOptions) -> Result<(CoxeterMatrix, Vec<MoveRecord>), MoveError> {
    let mut cur = m.clone();
    let mut trace = Vec::new();
    while let Some(pt) = pseudo_transpositions(&cur).into_iter().min_by(|a, b| a.tau.cmp(&b.tau)) {
        let (next, rec) = apply_reduction(&cur, &pt, opts)?;
        cur = next;
        trace.push(rec);
    }
    Ok((cur, trace))
}

/// Replays a record on `m`, checking that it reproduces itself.
pub fn apply_record(m: &CoxeterMatrix, record: &MoveRecord, opts: &MoveOptions) -> Result<CoxeterMatrix, MoveError> {
    let (out, replayed) = match record {
        MoveRecord::Twist { j, k } => apply_twist(m, &AdmissiblePair::from_names(m, j, k)?, opts)?,
        MoveRecord::Reduction { tau, t, k, .. } => {
            let pt = PseudoTransposition {
                tau: tau.clone(),
                t: t.clone(),
                k: *k,
            };
            apply_reduction(m, &pt, opts)?
        }
    };
    let same = match (&replayed, record) {
        (MoveRecord::Twist { j: a, k: b }, MoveRecord::Twist { j: c, k: d }) => {
            sorted(a) == sorted(c) && sorted(b) == sorted(d)
        }
        _ => replayed == *record,
    };
    if !same {
        return Err(MoveError::ReplayMismatch(format!("expected `{record}`, got `{replayed}`")));
    }
    Ok(out)
}

fn sorted(v: &[String]) -> Vec<&String> {
    let mut v: Vec<&String> = v.iter().collect();
    v.sort();
    v
}

/// Parses a trace (one move per line, blank lines and `#` comments ignored),
/// replaying it from `m`. Returns the records and the final diagram.
pub fn parse_trace(
    text: &str,
    m: &CoxeterMatrix,
    opts: &MoveOptions,
) -> Result<(Vec<MoveRecord>, CoxeterMatrix), MoveError> {
    let mut cur = m.clone();
    let mut out = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let rec = MoveRecord::parse_line(line, &cur)?;
        cur = apply_record(&cur, &rec, opts)?;
        out.push(rec);
    }
    Ok((out, cur))
}
