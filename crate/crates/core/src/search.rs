//! Exact combinatorial optimization: set cover and set packing by branch and
//! bound, zero forcing numbers, propagation-time spectra, fort numbers, and
//! domination-type parameters.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forcing::{closure, is_zero_forcing_set};
use crate::forts::{is_fort, FortCensus};
use crate::graph::Graph;
use crate::vertex_set::{binomial, for_each_combination, VertexSet};

/// Size guard for the domination-type solvers.
pub const DOMINATION_LIMIT: usize = 16;
/// Size guard for the exhaustive zero forcing fallback scan.
pub const ZFS_SCAN_LIMIT: usize = 16;

// ---------------------------------------------------------------------------
// set cover

/// Minimum set of columns hitting every row. Rows are sets over `0..n_cols`.
/// Returns `None` if some row is empty.
pub fn min_set_cover(n_cols: usize, rows: &[VertexSet]) -> Option<VertexSet> {
    if rows.iter().any(VertexSet::is_empty) {
        return None;
    }
    let mut best = greedy_cover(n_cols, rows);
    let uncovered: Vec<usize> = (0..rows.len()).collect();
    let mut search = CoverSearch {
        rows,
        best: &mut best,
    };
    search.branch(
        VertexSet::empty(n_cols),
        VertexSet::empty(n_cols),
        uncovered,
    );
    Some(best)
}

fn greedy_cover(n_cols: usize, rows: &[VertexSet]) -> VertexSet {
    let mut chosen = VertexSet::empty(n_cols);
    let mut open: Vec<&VertexSet> = rows.iter().collect();
    while !open.is_empty() {
        let col = (0..n_cols)
            .max_by_key(|&c| {
                (
                    open.iter().filter(|r| r.contains(c)).count(),
                    std::cmp::Reverse(c),
                )
            })
            .expect("non-empty column range");
        chosen.insert(col);
        open.retain(|r| !r.contains(col));
    }
    chosen
}

struct CoverSearch<'a, 'b> {
    rows: &'a [VertexSet],
    best: &'b mut VertexSet,
}

impl CoverSearch<'_, '_> {
    fn branch(&mut self, chosen: VertexSet, mut excluded: VertexSet, uncovered: Vec<usize>) {
        if uncovered.is_empty() {
            if chosen.len() < self.best.len() {
                *self.best = chosen;
            }
            return;
        }
        let mut avail: Vec<(usize, VertexSet)> = uncovered
            .iter()
            .map(|&r| (r, self.rows[r].difference(&excluded)))
            .collect();
        avail.sort_by_key(|(r, a)| (a.len(), *r));
        if avail[0].1.is_empty() {
            return;
        }
        // rows with pairwise disjoint candidate columns each need their own column
        let mut used = VertexSet::empty(chosen.universe());
        let mut bound = 0;
        for (_, a) in &avail {
            if a.is_disjoint(&used) {
                used.union_with(a);
                bound += 1;
            }
        }
        if chosen.len() + bound >= self.best.len() {
            return;
        }
        let mut cols: Vec<usize> = avail[0].1.to_vec();
        cols.sort_by_key(|&c| {
            let hits = uncovered
                .iter()
                .filter(|&&r| self.rows[r].contains(c))
                .count();
            (std::cmp::Reverse(hits), c)
        });
        for c in cols {
            let mut next = chosen.clone();
            next.insert(c);
            let rest: Vec<usize> = uncovered
                .iter()
                .copied()
                .filter(|&r| !self.rows[r].contains(c))
                .collect();
            self.branch(next, excluded.clone(), rest);
            excluded.insert(c);
        }
    }
}

// ---------------------------------------------------------------------------
// set packing

/// Maximum family of pairwise disjoint items, returned as item indices
/// (ascending). Empty items are always included.
pub fn max_set_packing(items: &[VertexSet]) -> Vec<usize> {
    let universe = items.first().map_or(0, VertexSet::universe);
    let mut free: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = Vec::new();
    for (i, s) in items.iter().enumerate() {
        if s.is_empty() {
            free.push(i);
        } else {
            order.push(i);
        }
    }
    order.sort_by(|&a, &b| {
        items[a]
            .len()
            .cmp(&items[b].len())
            .then(items[a].cmp(&items[b]))
    });
    let mut search = PackSearch {
        items,
        order: &order,
        universe,
        best: Vec::new(),
    };
    let mut chosen = Vec::new();
    search.branch(0, VertexSet::empty(universe), &mut chosen);
    let mut out = search.best;
    out.extend(free);
    out.sort_unstable();
    out
}

struct PackSearch<'a> {
    items: &'a [VertexSet],
    order: &'a [usize],
    universe: usize,
    best: Vec<usize>,
}

impl PackSearch<'_> {
    fn branch(&mut self, from: usize, used: VertexSet, chosen: &mut Vec<usize>) {
        if chosen.len() > self.best.len() {
            self.best = chosen.clone();
        }
        let free = self.universe - used.len();
        for pos in from..self.order.len() {
            let item = &self.items[self.order[pos]];
            // items are sorted by size, so this one is the smallest still available
            if chosen.len() + free / item.len() <= self.best.len() {
                return;
            }
            if !item.is_disjoint(&used) {
                continue;
            }
            chosen.push(self.order[pos]);
            self.branch(pos + 1, used.union(item), chosen);
            chosen.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// zero forcing

/// Calls `pred` on every `k`-subset in parallel; returns the accepted ones
/// sorted by bitmask.
fn scan_subsets<P>(n: usize, k: usize, budget: u128, pred: P) -> Result<Vec<VertexSet>>
where
    P: Fn(&VertexSet) -> bool + Sync,
{
    let candidates = binomial(n, k);
    if candidates > budget {
        return Err(Error::BudgetExceeded { candidates, budget });
    }
    if k == 0 {
        let empty = VertexSet::empty(n);
        return Ok(if pred(&empty) {
            vec![empty]
        } else {
            Vec::new()
        });
    }
    if k > n {
        return Ok(Vec::new());
    }
    let mut out: Vec<VertexSet> = (0..=n - k)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut found = Vec::new();
            let mut s = VertexSet::empty(n);
            for_each_combination(n - first - 1, k - 1, |rest| {
                s.insert(first);
                for &r in rest {
                    s.insert(first + 1 + r);
                }
                if pred(&s) {
                    found.push(s.clone());
                }
                s = VertexSet::empty(n);
                true
            });
            found
        })
        .collect();
    out.sort();
    Ok(out)
}

/// All zero forcing sets with exactly `k` vertices.
pub fn enumerate_zfs_of_size(g: &Graph, k: usize, budget: u128) -> Result<Vec<VertexSet>> {
    scan_subsets(g.n(), k, budget, |s| is_zero_forcing_set(g, s))
}

/// All minimum zero forcing sets, given `z = Z(G)`.
pub fn enumerate_minimum_zfs(g: &Graph, z: usize, budget: u128) -> Result<Vec<VertexSet>> {
    enumerate_zfs_of_size(g, z, budget)
}

/// Zero forcing number with a witness. With a complete census this is a
/// minimum cover of the minimal forts; otherwise sizes are scanned upward.
pub fn min_zero_forcing_number(
    g: &Graph,
    census: Option<&FortCensus>,
    budget: u128,
) -> Result<(usize, VertexSet)> {
    let (z, witness) = match census.filter(|c| c.complete) {
        Some(c) => {
            if c.n != g.n() {
                return Err(Error::InternalConsistency(
                    "census belongs to a different graph".into(),
                ));
            }
            let cover = min_set_cover(g.n(), &c.minimal_forts)
                .ok_or_else(|| Error::InternalConsistency("empty fort in census".into()))?;
            (cover.len(), cover)
        }
        None => {
            if g.n() > ZFS_SCAN_LIMIT {
                return Err(Error::GraphTooLarge {
                    n: g.n(),
                    limit: ZFS_SCAN_LIMIT,
                    what: "exhaustive zero forcing scan without a fort census",
                });
            }
            let mut spent = 0u128;
            let mut hit = None;
            for k in 0..=g.n() {
                spent = spent.saturating_add(binomial(g.n(), k));
                if spent > budget {
                    return Err(Error::BudgetExceeded {
                        candidates: spent,
                        budget,
                    });
                }
                if let Some(s) = enumerate_zfs_of_size(g, k, budget)?.into_iter().next() {
                    hit = Some((k, s));
                    break;
                }
            }
            hit.expect("V is a zero forcing set")
        }
    };
    if !is_zero_forcing_set(g, &witness) {
        return Err(Error::InternalConsistency(format!(
            "fort cover {witness:?} does not force the graph"
        )));
    }
    Ok((z, witness))
}

/// Propagation times over all minimum zero forcing sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PtSpectrum {
    pub z: usize,
    pub minimum_zfs_count: usize,
    pub pt_min: usize,
    pub pt_max: usize,
    /// Propagation time mapped to its smallest-bitmask witness.
    pub witnesses: BTreeMap<usize, VertexSet>,
}

impl PtSpectrum {
    pub fn spectrum(&self) -> Vec<usize> {
        self.witnesses.keys().copied().collect()
    }

    pub fn is_full_interval(&self) -> bool {
        self.witnesses.len() == self.pt_max - self.pt_min + 1
    }
}

pub fn pt_spectrum(g: &Graph, census: Option<&FortCensus>, budget: u128) -> Result<PtSpectrum> {
    let (z, _) = min_zero_forcing_number(g, census, budget)?;
    let sets = enumerate_minimum_zfs(g, z, budget)?;
    let times: Vec<usize> = sets
        .par_iter()
        .map(|s| closure(g, s).propagation_time())
        .collect();
    let mut witnesses = BTreeMap::new();
    for (s, t) in sets.iter().zip(times) {
        witnesses.entry(t).or_insert_with(|| s.clone());
    }
    let pt_min = *witnesses.keys().next().expect("at least one minimum ZFS");
    let pt_max = *witnesses.keys().next_back().unwrap();
    Ok(PtSpectrum {
        z,
        minimum_zfs_count: sets.len(),
        pt_min,
        pt_max,
        witnesses,
    })
}

// ---------------------------------------------------------------------------
// fort number

/// Maximum number of pairwise disjoint forts, packed from the minimal forts.
pub fn fort_number(g: &Graph, census: &FortCensus) -> Result<(usize, Vec<VertexSet>)> {
    census.require_complete()?;
    let picked = max_set_packing(&census.minimal_forts);
    let family: Vec<VertexSet> = picked
        .iter()
        .map(|&i| census.minimal_forts[i].clone())
        .collect();
    for (i, f) in family.iter().enumerate() {
        if !is_fort(g, f) || family[..i].iter().any(|e| !e.is_disjoint(f)) {
            return Err(Error::InternalConsistency(
                "fort packing witness invalid".into(),
            ));
        }
    }
    Ok((family.len(), family))
}

// ---------------------------------------------------------------------------
// domination-type parameters

fn domination_guard(g: &Graph) -> Result<()> {
    if g.n() > DOMINATION_LIMIT {
        return Err(Error::GraphTooLarge {
            n: g.n(),
            limit: DOMINATION_LIMIT,
            what: "domination-type solvers",
        });
    }
    Ok(())
}

pub fn is_dominating_set(g: &Graph, s: &VertexSet) -> bool {
    (0..g.n()).all(|v| s.contains(v) || g.neighbors(v).any(|w| s.contains(w)))
}

pub fn is_total_dominating_set(g: &Graph, s: &VertexSet) -> bool {
    (0..g.n()).all(|v| g.neighbors(v).any(|w| s.contains(w)))
}

/// Pairwise disjoint open neighborhoods.
pub fn is_open_packing(g: &Graph, s: &VertexSet) -> bool {
    let mut seen = VertexSet::empty(g.n());
    for v in s.iter() {
        for w in g.neighbors(v) {
            if !seen.insert(w) {
                return false;
            }
        }
    }
    true
}

pub fn domination_number(g: &Graph) -> Result<(usize, VertexSet)> {
    domination_guard(g)?;
    let rows = (0..g.n())
        .map(|v| g.closed_neighborhood(v))
        .collect::<Result<Vec<_>>>()?;
    let s = min_set_cover(g.n(), &rows).expect("closed neighborhoods are non-empty");
    if !is_dominating_set(g, &s) {
        return Err(Error::InternalConsistency(
            "dominating set witness invalid".into(),
        ));
    }
    Ok((s.len(), s))
}

pub fn total_domination_number(g: &Graph) -> Result<(usize, VertexSet)> {
    domination_guard(g)?;
    let rows = (0..g.n())
        .map(|v| g.neighborhood(v))
        .collect::<Result<Vec<_>>>()?;
    let s = min_set_cover(g.n(), &rows).ok_or_else(|| Error::Precondition {
        failed: vec!["graph has an isolated vertex, so no total dominating set exists".into()],
    })?;
    if !is_total_dominating_set(g, &s) {
        return Err(Error::InternalConsistency(
            "total dominating set witness invalid".into(),
        ));
    }
    Ok((s.len(), s))
}

pub fn open_packing_number(g: &Graph) -> Result<(usize, VertexSet)> {
    domination_guard(g)?;
    let rows = (0..g.n())
        .map(|v| g.neighborhood(v))
        .collect::<Result<Vec<_>>>()?;
    let picked = max_set_packing(&rows);
    let s = VertexSet::from_indices(g.n(), picked)?;
    if !is_open_packing(g, &s) {
        return Err(Error::InternalConsistency(
            "open packing witness invalid".into(),
        ));
    }
    Ok((s.len(), s))
}

// ---------------------------------------------------------------------------
// report

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParameterReport {
    pub graph_id: String,
    #[serde(rename = "Z", skip_serializing_if = "Option::is_none")]
    pub z: Option<usize>,
    #[serde(rename = "Z_witnesses", skip_serializing_if = "Option::is_none")]
    pub z_witnesses: Option<Vec<VertexSet>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zstar: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ft: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ft_witness: Option<Vec<VertexSet>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pt_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pt_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pt_spectrum: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_t: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_open: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_zf: Option<usize>,
}

impl ParameterReport {
    pub fn new(g: &Graph) -> Self {
        ParameterReport {
            graph_id: g.canonical_hash(),
            ..Default::default()
        }
    }

    /// Re-verifies every present witness and the ordering invariants.
    pub fn verify(&self, g: &Graph) -> Result<()> {
        let fail = |m: &str| Err(Error::InternalConsistency(format!("parameter report: {m}")));
        if let (Some(z), Some(ws)) = (self.z, &self.z_witnesses) {
            if ws
                .iter()
                .any(|w| w.len() != z || !is_zero_forcing_set(g, w))
            {
                return fail("Z witness");
            }
        }
        if let (Some(ft), Some(fam)) = (self.ft, &self.ft_witness) {
            let disjoint = fam
                .iter()
                .enumerate()
                .all(|(i, f)| fam[..i].iter().all(|e| e.is_disjoint(f)));
            if fam.len() != ft || !disjoint || fam.iter().any(|f| !is_fort(g, f)) {
                return fail("fort packing witness");
            }
        }
        if let (Some(lo), Some(hi)) = (self.pt_min, self.pt_max) {
            if lo > hi {
                return fail("pt_min > pt_max");
            }
            if let Some(spectrum) = &self.pt_spectrum {
                if spectrum.iter().any(|&t| t < lo || t > hi) {
                    return fail("pt spectrum outside [pt_min, pt_max]");
                }
            }
        }
        Ok(())
    }
}
