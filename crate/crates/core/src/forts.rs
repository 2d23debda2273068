//! Forts: non-empty sets with no outside vertex having exactly one neighbor inside.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcing::is_zero_forcing_set;
use crate::graph::Graph;
use crate::vertex_set::{binomial, VertexSet};

/// Default cap on candidate subsets for size-restricted scans.
pub const DEFAULT_BUDGET: u128 = 100_000_000;
/// Largest graph for which the full `2^n` minimal-fort census runs.
pub const CENSUS_LIMIT: usize = 16;
/// Largest graph for which the failed zero forcing number is cross-checked directly.
pub const DIRECT_FAILED_ZF_LIMIT: usize = 13;

/// Outside vertices paired with their unique neighbor inside the set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub violations: Vec<(usize, usize)>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FortCheck {
    Fort,
    Empty,
    Violations(ViolationReport),
}

impl FortCheck {
    pub fn is_fort(&self) -> bool {
        matches!(self, FortCheck::Fort)
    }
}

/// Every outside vertex with exactly one neighbor in `f`, ascending.
pub fn fort_violations(g: &Graph, f: &VertexSet) -> ViolationReport {
    let n = g.n();
    let mut count = vec![0u8; n];
    let mut inside = vec![0usize; n];
    for v in f.iter() {
        for w in g.neighbors(v) {
            count[w] = count[w].saturating_add(1);
            inside[w] = v;
        }
    }
    let violations = (0..n)
        .filter(|&w| count[w] == 1 && !f.contains(w))
        .map(|w| (w, inside[w]))
        .collect();
    ViolationReport { violations }
}

pub fn check_fort(g: &Graph, f: &VertexSet) -> FortCheck {
    if f.is_empty() {
        return FortCheck::Empty;
    }
    let report = fort_violations(g, f);
    if report.is_empty() {
        FortCheck::Fort
    } else {
        FortCheck::Violations(report)
    }
}

pub fn is_fort(g: &Graph, f: &VertexSet) -> bool {
    check_fort(g, f).is_fort()
}

/// A fort is minimal iff `(V \ F) ∪ {v}` forces the graph for every `v ∈ F`:
/// that set misses exactly the forts inside `F \ {v}`.
pub fn is_minimal_fort(g: &Graph, f: &VertexSet) -> Result<bool> {
    if !is_fort(g, f) {
        return Err(Error::NotAFort);
    }
    let outside = f.complement();
    Ok(f.iter().all(|v| {
        let mut s = outside.clone();
        s.insert(v);
        is_zero_forcing_set(g, &s)
    }))
}

/// Minimal forts of a graph, with a size histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FortCensus {
    pub graph_id: String,
    pub n: usize,
    pub minimal_forts: Vec<VertexSet>,
    /// True iff the full enumeration ran.
    pub complete: bool,
    pub by_size: BTreeMap<usize, usize>,
}

impl FortCensus {
    pub fn new(g: &Graph, mut minimal_forts: Vec<VertexSet>, complete: bool) -> Self {
        minimal_forts.sort();
        minimal_forts.dedup();
        let mut by_size = BTreeMap::new();
        for f in &minimal_forts {
            *by_size.entry(f.len()).or_insert(0) += 1;
        }
        FortCensus {
            graph_id: g.canonical_hash(),
            n: g.n(),
            minimal_forts,
            complete,
            by_size,
        }
    }

    pub fn len(&self) -> usize {
        self.minimal_forts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minimal_forts.is_empty()
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.complete {
            Ok(())
        } else {
            Err(Error::IncompleteCensus)
        }
    }

    /// Re-checks every member against `g`.
    pub fn verify(&self, g: &Graph) -> Result<()> {
        if self.graph_id != g.canonical_hash() || self.n != g.n() {
            return Err(Error::InternalConsistency(
                "census belongs to a different graph".into(),
            ));
        }
        if self.minimal_forts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InternalConsistency(
                "census not sorted or has duplicates".into(),
            ));
        }
        for f in &self.minimal_forts {
            if !is_minimal_fort(g, f).unwrap_or(false) {
                return Err(Error::InternalConsistency(format!(
                    "{f:?} is not a minimal fort"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> FortCensusJson {
        FortCensusJson {
            graph_id: self.graph_id.clone(),
            n: self.n,
            count: self.minimal_forts.len(),
            complete: self.complete,
            by_size: self.by_size.clone(),
            minimal_forts: self.minimal_forts.iter().map(VertexSet::to_vec).collect(),
        }
    }

    pub fn from_json(json: &FortCensusJson) -> Result<Self> {
        let minimal_forts = json
            .minimal_forts
            .iter()
            .map(|f| VertexSet::from_indices(json.n, f.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        let mut by_size = BTreeMap::new();
        for f in &minimal_forts {
            *by_size.entry(f.len()).or_insert(0) += 1;
        }
        if by_size != json.by_size || json.count != minimal_forts.len() {
            return Err(Error::Parse(
                "census histogram does not match its members".into(),
            ));
        }
        Ok(FortCensus {
            graph_id: json.graph_id.clone(),
            n: json.n,
            minimal_forts,
            complete: json.complete,
            by_size,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FortCensusJson {
    pub graph_id: String,
    pub n: usize,
    pub count: usize,
    pub complete: bool,
    pub by_size: BTreeMap<usize, usize>,
    pub minimal_forts: Vec<Vec<usize>>,
}

/// Scans all `2^n - 1` non-empty subsets. Requires `n <= CENSUS_LIMIT`.
pub fn enumerate_minimal_forts(g: &Graph) -> Result<FortCensus> {
    let n = g.n();
    if n > CENSUS_LIMIT {
        return Err(Error::GraphTooLarge {
            n,
            limit: CENSUS_LIMIT,
            what: "full minimal-fort census (use enumerate_forts_of_size)",
        });
    }
    const CHUNK: u64 = 1 << 10;
    let total = 1u64 << n;
    let forts: Vec<VertexSet> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| {
            let lo = (c * CHUNK).max(1);
            let hi = ((c + 1) * CHUNK).min(total);
            (lo..hi)
                .map(|mask| VertexSet::from_mask(n, mask))
                .filter(|f| is_fort(g, f) && is_minimal_fort(g, f).unwrap_or(false))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(FortCensus::new(g, forts, true))
}

/// All forts of exactly `k` vertices, sorted by bitmask.
pub fn enumerate_forts_of_size(g: &Graph, k: usize, budget: u128) -> Result<Vec<VertexSet>> {
    let n = g.n();
    if k == 0 || k > n {
        return Ok(Vec::new());
    }
    let candidates = binomial(n, k);
    if candidates > budget {
        return Err(Error::BudgetExceeded { candidates, budget });
    }
    let rows = g.rows()?;
    let mut out: Vec<VertexSet> = (0..=n - k)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut scan = SubsetScan::new(n, k, rows);
            scan.run_from(first);
            scan.found
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Depth-first `k`-subset scan that tracks, per depth, which vertices have
/// exactly one (`once`) and at least two (`many`) neighbors in the prefix.
struct SubsetScan<'a> {
    n: usize,
    k: usize,
    words: usize,
    rows: &'a [VertexSet],
    once: Vec<u64>,
    many: Vec<u64>,
    members: Vec<u64>,
    found: Vec<VertexSet>,
}

impl<'a> SubsetScan<'a> {
    fn new(n: usize, k: usize, rows: &'a [VertexSet]) -> Self {
        let words = n.div_ceil(64);
        SubsetScan {
            n,
            k,
            words,
            rows,
            once: vec![0; (k + 1) * words],
            many: vec![0; (k + 1) * words],
            members: vec![0; (k + 1) * words],
            found: Vec::new(),
        }
    }

    fn run_from(&mut self, first: usize) {
        self.push(0, first);
        self.descend(1, first);
    }

    fn push(&mut self, depth: usize, v: usize) {
        let w = self.words;
        let (src, dst) = (depth * w, (depth + 1) * w);
        let row = self.rows[v].words();
        for (i, &r) in row.iter().enumerate().take(w) {
            let (o, m) = (self.once[src + i], self.many[src + i]);
            self.many[dst + i] = m | (o & r);
            self.once[dst + i] = (o ^ r) & !(m | (o & r));
            self.members[dst + i] = self.members[src + i];
        }
        self.members[dst + v / 64] |= 1 << (v % 64);
    }

    fn descend(&mut self, depth: usize, last: usize) {
        let w = self.words;
        if depth == self.k {
            let base = depth * w;
            let clean = (0..w).all(|i| self.once[base + i] & !self.members[base + i] == 0);
            if clean {
                self.found
                    .push(VertexSet::from_words(self.n, &self.members[base..base + w]));
            }
            return;
        }
        for v in last + 1..=self.n - (self.k - depth) {
            self.push(depth, v);
            self.descend(depth + 1, v);
        }
    }
}

/// Smallest fort, scanning sizes upward. The witness is the lexicographically
/// smallest one as a sorted index list.
pub fn minimum_fort(g: &Graph, budget: u128) -> Result<(usize, VertexSet)> {
    let mut spent: u128 = 0;
    for k in 1..=g.n() {
        spent = spent.saturating_add(binomial(g.n(), k));
        if spent > budget {
            return Err(Error::BudgetExceeded {
                candidates: spent,
                budget,
            });
        }
        if let Some(f) = enumerate_forts_of_size(g, k, budget)?
            .into_iter()
            .min_by_key(|f| f.to_vec())
        {
            return Ok((k, f));
        }
    }
    unreachable!("the full vertex set is always a fort")
}

/// Failed zero forcing number, `n - (minimum fort size)`. For small graphs
/// the value is also found by maximizing over all non-forcing subsets.
pub fn failed_zf_number(g: &Graph, budget: u128) -> Result<usize> {
    let (k, _) = minimum_fort(g, budget)?;
    let value = g.n() - k;
    if g.n() <= DIRECT_FAILED_ZF_LIMIT {
        let direct = direct_failed_zf_number(g);
        if direct != value {
            return Err(Error::InternalConsistency(format!(
                "failed zero forcing number: fort complement gives {value}, direct scan gives {direct}"
            )));
        }
    }
    Ok(value)
}

fn direct_failed_zf_number(g: &Graph) -> usize {
    let n = g.n();
    (0u64..1 << n)
        .into_par_iter()
        .map(|mask| VertexSet::from_mask(n, mask))
        .filter(|s| !is_zero_forcing_set(g, s))
        .map(|s| s.len())
        .max()
        .unwrap_or(0)
}

/// Minimal forts with at most `max_size` vertices. Always flagged incomplete.
pub fn partial_census(g: &Graph, max_size: usize, budget: u128) -> Result<FortCensus> {
    let mut out = Vec::new();
    for k in 1..=max_size.min(g.n()) {
        for f in enumerate_forts_of_size(g, k, budget)? {
            if is_minimal_fort(g, &f)? {
                out.push(f);
            }
        }
    }
    Ok(FortCensus::new(g, out, false))
}
