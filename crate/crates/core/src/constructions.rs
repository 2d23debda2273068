//! Fort constructions on Cartesian products and the zero forcing set lift
//! `Q_d -> Q_{d+1}`. Every output is re-verified on the explicit product.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forcing::{is_zero_forcing_set, propagation_time};
use crate::forts::{enumerate_minimal_forts, is_fort, is_minimal_fort};
use crate::graph::Graph;
use crate::search::enumerate_zfs_of_size;
use crate::symmetry::orbit;
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Guarantee {
    Fort,
    MinimalFort,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreconditionCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionResult {
    pub result: VertexSet,
    pub guarantee: Guarantee,
    pub preconditions_checked: Vec<PreconditionCheck>,
}

struct Checks(Vec<PreconditionCheck>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn record(&mut self, name: &str, holds: bool) -> bool {
        self.0.push(PreconditionCheck {
            name: name.to_string(),
            holds,
        });
        holds
    }

    /// Fails with every violated predicate whose name is in `required`.
    fn require(&self, required: &[&str]) -> Result<()> {
        let failed: Vec<String> = self
            .0
            .iter()
            .filter(|c| !c.holds && required.contains(&c.name.as_str()))
            .map(|c| c.name.clone())
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::Precondition { failed })
        }
    }
}

fn check_universe(g: &Graph, f: &VertexSet, what: &str) -> Result<()> {
    if f.universe() != g.n() {
        return Err(Error::Parse(format!(
            "{what} is a set over {} vertices but its graph has {}",
            f.universe(),
            g.n()
        )));
    }
    Ok(())
}

fn minimal(g: &Graph, f: &VertexSet) -> bool {
    is_minimal_fort(g, f).unwrap_or(false)
}

fn independent(g: &Graph, f: &VertexSet) -> bool {
    f.iter().all(|v| g.neighbors(v).all(|w| !f.contains(w)))
}

fn inner_degrees<'a>(g: &'a Graph, f: &'a VertexSet) -> impl Iterator<Item = usize> + 'a {
    f.iter()
        .map(move |v| g.neighbors(v).filter(|&w| f.contains(w)).count())
}

/// `A × B` under the product index map `u * |V(H)| + u'`.
pub fn product_set(a: &VertexSet, b: &VertexSet) -> VertexSet {
    let nh = b.universe();
    let mut out = VertexSet::empty(a.universe() * nh);
    for u in a.iter() {
        for up in b.iter() {
            out.insert(u * nh + up);
        }
    }
    out
}

fn verify(p: &Graph, result: &VertexSet, guarantee: Guarantee, what: &str) -> Result<()> {
    if !is_fort(p, result) {
        return Err(Error::InternalConsistency(format!(
            "{what}: {result:?} is not a fort"
        )));
    }
    if guarantee == Guarantee::MinimalFort && !minimal(p, result) {
        return Err(Error::InternalConsistency(format!(
            "{what}: {result:?} is not a minimal fort"
        )));
    }
    Ok(())
}

const F_MINIMAL: &str = "F is a minimal fort of G";
const FP_MINIMAL: &str = "F' is a minimal fort of H";
const F_INDEPENDENT: &str = "no two vertices of F are adjacent";
const F_FORT: &str = "F is a fort of G";
const FP_FORT: &str = "F' is a fort of H";
const F_NEIGHBOR: &str = "every vertex of F has a neighbor in F";
const FP_NEIGHBOR: &str = "every vertex of F' has a neighbor in F'";
const FP_ONE_NEIGHBOR: &str = "every vertex of F' has exactly one neighbor in F'";

/// `F × F'` for minimal forts `F` of `G` and `F'` of `H`. The result is a
/// fort of `G □ H`; it is guaranteed minimal when `F` is independent.
pub fn product_fort(
    g: &Graph,
    f: &VertexSet,
    h: &Graph,
    fp: &VertexSet,
) -> Result<ConstructionResult> {
    check_universe(g, f, "F")?;
    check_universe(h, fp, "F'")?;
    let mut checks = Checks::new();
    checks.record(F_MINIMAL, minimal(g, f));
    checks.record(FP_MINIMAL, minimal(h, fp));
    checks.require(&[F_MINIMAL, FP_MINIMAL])?;
    let guarantee = if checks.record(F_INDEPENDENT, independent(g, f)) {
        Guarantee::MinimalFort
    } else {
        Guarantee::Fort
    };
    let p = g.cartesian_product(h)?;
    let result = product_set(f, fp);
    verify(&p, &result, guarantee, "product fort")?;
    Ok(ConstructionResult {
        result,
        guarantee,
        preconditions_checked: checks.0,
    })
}

/// `(F ∩ V_1) × (F' ∩ V'_1) ∪ (F ∩ V_2) × (F' ∩ V'_2)` on bipartite factors.
/// `V_1` is the part holding vertex 0; `swap_parts` exchanges the parts of `H`.
pub fn bipartite_parity_fort(
    g: &Graph,
    f: &VertexSet,
    h: &Graph,
    fp: &VertexSet,
    require_minimal: bool,
    swap_parts: bool,
) -> Result<ConstructionResult> {
    check_universe(g, f, "F")?;
    check_universe(h, fp, "F'")?;
    let parts_g = g.bipartition()?;
    let mut parts_h = h.bipartition()?;
    if swap_parts {
        parts_h = parts_h.swapped();
    }
    let mut checks = Checks::new();
    checks.record("G is bipartite", true);
    checks.record("H is bipartite", true);
    checks.record(F_FORT, is_fort(g, f));
    checks.record(FP_FORT, is_fort(h, fp));
    checks.record(F_NEIGHBOR, inner_degrees(g, f).all(|k| k >= 1));
    checks.record(FP_NEIGHBOR, inner_degrees(h, fp).all(|k| k >= 1));
    let mut required = vec![F_FORT, FP_FORT, F_NEIGHBOR, FP_NEIGHBOR];
    if require_minimal {
        checks.record(F_MINIMAL, minimal(g, f));
        checks.record(FP_MINIMAL, minimal(h, fp));
        checks.record(FP_ONE_NEIGHBOR, inner_degrees(h, fp).all(|k| k == 1));
        required.extend([F_MINIMAL, FP_MINIMAL, FP_ONE_NEIGHBOR]);
    }
    checks.require(&required)?;
    let guarantee = if require_minimal {
        Guarantee::MinimalFort
    } else {
        Guarantee::Fort
    };
    let mut result = product_set(
        &f.intersection(&parts_g.first),
        &fp.intersection(&parts_h.first),
    );
    result.union_with(&product_set(
        &f.intersection(&parts_g.second),
        &fp.intersection(&parts_h.second),
    ));
    let p = g.cartesian_product(h)?;
    verify(&p, &result, guarantee, "bipartite parity fort")?;
    Ok(ConstructionResult {
        result,
        guarantee,
        preconditions_checked: checks.0,
    })
}

/// True iff `s` forces `g` and no set one smaller does.
pub fn is_minimum_zfs(g: &Graph, s: &VertexSet, budget: u128) -> Result<bool> {
    if !is_zero_forcing_set(g, s) {
        return Ok(false);
    }
    // zero forcing sets are closed upward, so checking one size down suffices
    Ok(s.is_empty() || enumerate_zfs_of_size(g, s.len() - 1, budget)?.is_empty())
}

/// Lifts a minimum zero forcing set of `Q_d` to `S × {0} ∪ S × {1}` in
/// `Q_{d+1}`, keeping its propagation time.
pub fn lift_zfs(g: &Graph, s: &VertexSet, budget: u128) -> Result<VertexSet> {
    if g.hypercube_dim().is_none() {
        return Err(Error::Precondition {
            failed: vec!["G is a hypercube".into()],
        });
    }
    check_universe(g, s, "S")?;
    if !is_minimum_zfs(g, s, budget)? {
        return Err(Error::Precondition {
            failed: vec!["S is a minimum zero forcing set of G".into()],
        });
    }
    let q1 = Graph::hypercube(1)?;
    let next = g.cartesian_product(&q1)?;
    let lifted = product_set(s, &q1.vertices());
    let before = propagation_time(g, s)?;
    let after = propagation_time(&next, &lifted).map_err(|_| {
        Error::InternalConsistency(format!("lifted set {lifted:?} does not force Q_(d+1)"))
    })?;
    if before != after {
        return Err(Error::InternalConsistency(format!(
            "lift changed propagation time from {before} to {after}"
        )));
    }
    if !is_minimum_zfs(&next, &lifted, budget)? {
        return Err(Error::InternalConsistency(format!(
            "lifted set {lifted:?} is not minimum"
        )));
    }
    Ok(lifted)
}

/// Outputs of every construction applied to `Q_{d-1}` and `Q_1` in both
/// factor orders and both part alignments.
#[derive(Debug, Clone, Serialize)]
pub struct ConstructionSweep {
    pub d: usize,
    /// Every set any invocation returned, whatever its guarantee.
    pub all_outputs: Vec<VertexSet>,
    /// Neighborhoods plus outputs carrying the minimal-fort guarantee.
    pub guaranteed_minimal: Vec<VertexSet>,
    /// `guaranteed_minimal` closed under the automorphisms of `Q_d`.
    pub closed_under_symmetry: Vec<VertexSet>,
}

pub fn construction_sweep(d: usize) -> Result<ConstructionSweep> {
    if !(2..=5).contains(&d) {
        return Err(Error::DimensionOutOfRange { d, max: 5 });
    }
    let small = Graph::hypercube(d - 1)?;
    let q1 = Graph::hypercube(1)?;
    let qd = Graph::hypercube(d)?;
    let small_forts = enumerate_minimal_forts(&small)?.minimal_forts;
    let edge = q1.vertices();

    let mut all = BTreeSet::new();
    let mut guaranteed = BTreeSet::new();
    let mut keep = |r: ConstructionResult| {
        if r.guarantee == Guarantee::MinimalFort {
            guaranteed.insert(r.result.clone());
        }
        all.insert(r.result);
    };
    for f in &small_forts {
        for (g, a, h, b) in [(&small, f, &q1, &edge), (&q1, &edge, &small, f)] {
            if let Ok(r) = product_fort(g, a, h, b) {
                keep(r);
            }
            for require_minimal in [false, true] {
                for swap in [false, true] {
                    match bipartite_parity_fort(g, a, h, b, require_minimal, swap) {
                        Ok(r) => keep(r),
                        Err(Error::Precondition { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    for v in 0..qd.n() {
        let nb = qd.neighborhood(v)?;
        all.insert(nb.clone());
        guaranteed.insert(nb);
    }
    let mut closed = BTreeSet::new();
    for s in &guaranteed {
        if !closed.contains(s) {
            closed.extend(orbit(d, s)?);
        }
    }
    for s in &closed {
        if !minimal(&qd, s) {
            return Err(Error::InternalConsistency(format!(
                "automorphic image {s:?} of a constructed fort is not minimal"
            )));
        }
    }
    Ok(ConstructionSweep {
        d,
        all_outputs: all.into_iter().collect(),
        guaranteed_minimal: guaranteed.into_iter().collect(),
        closed_under_symmetry: closed.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forts::DEFAULT_BUDGET;

    fn set(d: usize, labels: &[&str]) -> VertexSet {
        VertexSet::from_indices(
            1 << d,
            labels.iter().map(|l| usize::from_str_radix(l, 2).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn product_examples() {
        let q1 = Graph::hypercube(1).unwrap();
        let q2 = Graph::hypercube(2).unwrap();
        let q3 = Graph::hypercube(3).unwrap();
        let r = product_fort(&q3, &set(3, &["001", "010", "100"]), &q1, &q1.vertices()).unwrap();
        assert_eq!(r.guarantee, Guarantee::MinimalFort);
        assert_eq!(
            r.result,
            set(4, &["0100", "1000", "0010", "0101", "1001", "0011"])
        );

        let r = product_fort(&q2, &set(2, &["01", "10"]), &q1, &q1.vertices()).unwrap();
        assert_eq!(r.result, set(3, &["010", "100", "011", "101"]));
        assert_eq!(r.guarantee, Guarantee::MinimalFort);

        let r = product_fort(
            &q3,
            &set(3, &["000", "011", "111", "100"]),
            &q1,
            &q1.vertices(),
        )
        .unwrap();
        assert_eq!(r.guarantee, Guarantee::Fort);
        let doubled = set(
            4,
            &[
                "0000", "0001", "0110", "0111", "1110", "1111", "1000", "1001",
            ],
        );
        assert_eq!(r.result, doubled);
        assert!(!is_minimal_fort(&Graph::hypercube(4).unwrap(), &r.result).unwrap());
    }

    #[test]
    fn product_rejects_non_minimal_factor() {
        let q1 = Graph::hypercube(1).unwrap();
        let q3 = Graph::hypercube(3).unwrap();
        let non_min = set(3, &["001", "010", "100", "110", "101", "011"]);
        assert!(is_fort(&q3, &non_min));
        match product_fort(&q3, &non_min, &q1, &q1.vertices()) {
            Err(Error::Precondition { failed }) => assert_eq!(failed, vec![F_MINIMAL.to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parity_examples() {
        let q1 = Graph::hypercube(1).unwrap();
        let q3 = Graph::hypercube(3).unwrap();
        let q4 = Graph::hypercube(4).unwrap();
        let r = bipartite_parity_fort(
            &q3,
            &set(3, &["000", "100", "111", "011"]),
            &q1,
            &q1.vertices(),
            false,
            false,
        )
        .unwrap();
        assert_eq!(r.result, set(4, &["0000", "1111", "0110", "1001"]));
        assert_eq!(r.guarantee, Guarantee::Fort);

        let r = bipartite_parity_fort(
            &q3,
            &set(3, &["010", "100", "011", "101"]),
            &q1,
            &q1.vertices(),
            true,
            false,
        )
        .unwrap();
        assert_eq!(r.guarantee, Guarantee::MinimalFort);
        assert!(is_minimal_fort(&q4, &r.result).unwrap());
        assert!(r.preconditions_checked.iter().all(|c| c.holds));
    }

    #[test]
    fn parity_precondition_failures() {
        let tadpole =
            Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)])
                .unwrap();
        let q1 = Graph::hypercube(1).unwrap();
        let gray = VertexSet::from_indices(7, [2, 5]).unwrap();
        match bipartite_parity_fort(&tadpole, &gray, &q1, &q1.vertices(), false, false) {
            Err(Error::Precondition { failed }) => {
                assert!(failed.contains(&F_NEIGHBOR.to_string()), "{failed:?}");
            }
            other => panic!("{other:?}"),
        }
        let k3 = Graph::complete(3).unwrap();
        assert!(matches!(
            bipartite_parity_fort(&k3, &k3.vertices(), &q1, &q1.vertices(), false, false),
            Err(Error::NotBipartite { .. })
        ));
    }

    #[test]
    fn tadpole_square_is_a_non_minimal_fort() {
        let tadpole =
            Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)])
                .unwrap();
        let white = VertexSet::from_indices(7, [0, 1, 3, 4, 6]).unwrap();
        assert!(is_minimal_fort(&tadpole, &white).unwrap());
        let r = bipartite_parity_fort(&tadpole, &white, &tadpole, &white, false, false).unwrap();
        let square = tadpole.cartesian_product(&tadpole).unwrap();
        assert!(is_fort(&square, &r.result));
        assert!(r.result.contains(0));
        assert!(!is_minimal_fort(&square, &r.result).unwrap());
        let mut smaller = r.result.clone();
        smaller.remove(0);
        assert!(is_fort(&square, &smaller));
    }

    #[test]
    fn lifts() {
        let q1 = Graph::hypercube(1).unwrap();
        let lifted = lift_zfs(
            &q1,
            &VertexSet::from_indices(2, [0]).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(lifted.to_vec(), vec![0, 1]);
        let q3 = Graph::hypercube(3).unwrap();
        let q4 = Graph::hypercube(4).unwrap();
        let pt1 = lift_zfs(&q3, &set(3, &["000", "010", "011", "001"]), DEFAULT_BUDGET).unwrap();
        assert_eq!(pt1.len(), 8);
        assert_eq!(propagation_time(&q4, &pt1).unwrap(), 1);
        let pt2 = lift_zfs(&q3, &set(3, &["000", "010", "101", "001"]), DEFAULT_BUDGET).unwrap();
        assert_eq!(propagation_time(&q4, &pt2).unwrap(), 2);
        assert!(matches!(
            lift_zfs(&q3, &q3.vertices(), DEFAULT_BUDGET),
            Err(Error::Precondition { .. })
        ));
        let path = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(lift_zfs(
            &path,
            &VertexSet::from_indices(2, [0]).unwrap(),
            DEFAULT_BUDGET
        )
        .is_err());
    }

    #[test]
    fn q3_sweep_reaches_full_census() {
        let sweep = construction_sweep(3).unwrap();
        assert_eq!(sweep.closed_under_symmetry.len(), 14);
    }
}
