use std::collections::BTreeSet;

use fortlib::constructions::{product_fort, Guarantee};
use fortlib::forcing::{closure, forcing_step, is_stalled, is_zero_forcing_set};
use fortlib::forts::{
    enumerate_forts_of_size, enumerate_minimal_forts, fort_violations, is_fort, is_minimal_fort,
    DEFAULT_BUDGET,
};
use fortlib::lp::{certify, fractional_zf, rational, solve_covering_lp, CoveringLp, LpStatus};
use fortlib::search::{fort_number, min_zero_forcing_number, pt_spectrum};
use fortlib::symmetry::{canonical_form, group_order, orbit, SignedPermutation};
use fortlib::{Graph, VertexSet};
use proptest::prelude::*;

/// Random simple graph on `1..=max_n` vertices.
fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let m = pairs.len();
        proptest::collection::vec(any::<bool>(), m).prop_map(move |keep| {
            let edges: Vec<_> = pairs
                .iter()
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(&e, _)| e)
                .collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn graph_and_set(max_n: usize) -> impl Strategy<Value = (Graph, VertexSet)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (
            Just(g),
            any::<u64>().prop_map(move |m| VertexSet::from_mask(n, m & ((1 << n) - 1))),
        )
    })
}

fn subsets(n: usize) -> impl Iterator<Item = VertexSet> {
    (0u64..1 << n).map(move |m| VertexSet::from_mask(n, m))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, rng_seed: proptest::test_runner::RngSeed::Fixed(11), ..ProptestConfig::default() })]

    #[test]
    fn closure_is_monotone_and_idempotent((g, s) in graph_and_set(12), extra in any::<usize>()) {
        let c = closure(&g, &s);
        prop_assert!(s.is_subset(&c.final_set));
        prop_assert_eq!(&closure(&g, &c.final_set).final_set, &c.final_set);
        let mut t = s.clone();
        t.insert(extra % g.n());
        prop_assert!(c.final_set.is_subset(&closure(&g, &t).final_set));
        let total: usize = c.steps.iter().map(Vec::len).sum();
        prop_assert_eq!(s.len() + total, c.final_set.len());
    }

    #[test]
    fn forces_are_valid((g, s) in graph_and_set(12)) {
        let (forces, next) = forcing_step(&g, &s);
        for &(u, v) in &forces {
            prop_assert!(s.contains(u) && !s.contains(v) && g.has_edge(u, v));
            prop_assert_eq!(g.neighbors(u).filter(|&w| !s.contains(w)).count(), 1);
        }
        prop_assert_eq!(next.len(), s.len() + forces.len());
    }

    #[test]
    fn fort_iff_stalled_complement((g, s) in graph_and_set(12)) {
        if !s.is_empty() {
            prop_assert_eq!(is_fort(&g, &s), is_stalled(&g, &s.complement()));
            prop_assert_eq!(is_fort(&g, &s), fort_violations(&g, &s).is_empty());
        }
    }

    #[test]
    fn zfs_iff_meets_every_minimal_fort((g, s) in graph_and_set(9)) {
        let census = enumerate_minimal_forts(&g).unwrap();
        let hits = census.minimal_forts.iter().all(|f| !f.is_disjoint(&s));
        prop_assert_eq!(hits, is_zero_forcing_set(&g, &s));
    }

    #[test]
    fn census_matches_brute_force(g in graph(8)) {
        let n = g.n();
        let forts: Vec<VertexSet> = subsets(n).filter(|s| !s.is_empty() && is_fort(&g, s)).collect();
        let mut minimal: Vec<VertexSet> = forts
            .iter()
            .filter(|f| !forts.iter().any(|e| e != *f && e.is_subset(f)))
            .cloned()
            .collect();
        minimal.sort();
        prop_assert_eq!(&enumerate_minimal_forts(&g).unwrap().minimal_forts, &minimal);
        for k in 1..=n {
            let mut sized: Vec<_> = forts.iter().filter(|f| f.len() == k).cloned().collect();
            sized.sort();
            prop_assert_eq!(enumerate_forts_of_size(&g, k, DEFAULT_BUDGET).unwrap(), sized);
        }
    }

    #[test]
    fn weak_duality(g in graph(9)) {
        let census = enumerate_minimal_forts(&g).unwrap();
        let (z, w) = min_zero_forcing_number(&g, Some(&census), DEFAULT_BUDGET).unwrap();
        let (z_scan, _) = min_zero_forcing_number(&g, None, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(z, z_scan);
        prop_assert!(is_zero_forcing_set(&g, &w));
        let zstar = fractional_zf(&g, &census).unwrap();
        let (ft, _) = fort_number(&g, &census).unwrap();
        prop_assert!(rational(ft as i64, 1) <= zstar);
        prop_assert!(zstar <= rational(z as i64, 1));
    }

    #[test]
    fn covering_lp_is_certified(rows in proptest::collection::vec(1u64..1 << 7, 1..10)) {
        let rows: Vec<VertexSet> = rows.into_iter().map(|m| VertexSet::from_mask(7, m)).collect();
        let lp = CoveringLp::new(7, rows.clone()).unwrap();
        let sol = solve_covering_lp(&lp).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!(certify(&lp, &sol).is_ok());
        prop_assert!(sol.value >= rational(1, 1));
        prop_assert!(sol.value <= rational(rows.len() as i64, 1));
    }

    #[test]
    fn canonical_form_is_invariant(mask in any::<u64>(), pick in any::<usize>(), d in 2usize..=5) {
        let n = 1usize << d;
        let s = VertexSet::from_mask(n, if n == 64 { mask } else { mask & ((1 << n) - 1) });
        let group = SignedPermutation::all(d).unwrap();
        let sigma = &group[pick % group.len()];
        let a = canonical_form(d, &s).unwrap();
        prop_assert_eq!(&a, &canonical_form(d, &sigma.apply_set(&s)).unwrap());
        prop_assert!(a.canonical <= s);
        prop_assert_eq!(group_order(d) % a.orbit_size, 0);
    }

    #[test]
    fn json_round_trip(g in graph(10)) {
        let text = serde_json::to_string(&g.to_json()).unwrap();
        let back = Graph::from_json_str(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.canonical_hash(), g.canonical_hash());
        let again = Graph::from_edge_list_text(&g.to_edge_list_text()).unwrap();
        prop_assert_eq!(again, g);
    }
}

#[test]
fn brute_force_automorphisms_of_q3() {
    let g = Graph::hypercube(3).unwrap();
    let mut found = BTreeSet::new();
    let mut perm: Vec<usize> = (0..8).collect();
    // Heap's algorithm over all 8! vertex permutations
    fn heap(k: usize, perm: &mut Vec<usize>, g: &Graph, found: &mut BTreeSet<Vec<usize>>) {
        if k == 1 {
            if g.edges().all(|(u, v)| g.has_edge(perm[u], perm[v])) {
                found.insert(perm.clone());
            }
            return;
        }
        for i in 0..k {
            heap(k - 1, perm, g, found);
            if k.is_multiple_of(2) {
                perm.swap(i, k - 1);
            } else {
                perm.swap(0, k - 1);
            }
        }
    }
    heap(8, &mut perm, &g, &mut found);
    assert_eq!(found.len(), 48);
    let signed: BTreeSet<Vec<usize>> = SignedPermutation::all(3)
        .unwrap()
        .iter()
        .map(|s| (0..8).map(|v| s.apply(v)).collect())
        .collect();
    assert_eq!(signed, found);
}

#[test]
fn orbit_size_matches_distinct_images() {
    for d in 2..=4 {
        let census = enumerate_minimal_forts(&Graph::hypercube(d).unwrap()).unwrap();
        for f in &census.minimal_forts {
            let cf = canonical_form(d, f).unwrap();
            assert_eq!(cf.orbit_size as usize, orbit(d, f).unwrap().len());
        }
    }
}

#[test]
fn minimum_forts_are_independent() {
    for d in 2..=5 {
        let g = Graph::hypercube(d).unwrap();
        let forts = enumerate_forts_of_size(&g, d, DEFAULT_BUDGET).unwrap();
        assert!(!forts.is_empty());
        for f in forts {
            assert!(
                f.iter().all(|u| f.iter().all(|v| !g.has_edge(u, v))),
                "Q{d}: {f:?}"
            );
        }
    }
}

#[test]
fn minimal_fort_members_stay_minimal_under_symmetry() {
    let g = Graph::hypercube(4).unwrap();
    let census = enumerate_minimal_forts(&g).unwrap();
    let members: BTreeSet<_> = census.minimal_forts.iter().cloned().collect();
    for sigma in SignedPermutation::all(4).unwrap().iter().step_by(37) {
        for f in &census.minimal_forts {
            assert!(members.contains(&sigma.apply_set(f)));
        }
    }
}

#[test]
fn pt_witnesses_are_not_automorphic() {
    for d in [3, 4] {
        let g = Graph::hypercube(d).unwrap();
        let census = enumerate_minimal_forts(&g).unwrap();
        let s = pt_spectrum(&g, Some(&census), DEFAULT_BUDGET).unwrap();
        let forms: BTreeSet<_> = s
            .witnesses
            .values()
            .map(|w| canonical_form(d, w).unwrap().canonical)
            .collect();
        assert_eq!(forms.len(), s.witnesses.len());
    }
}

#[test]
fn product_forts_on_random_factors() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for _ in 0..40 {
        let n = rng.gen_range(2..6);
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let h = Graph::hypercube(rng.gen_range(1..3)).unwrap();
        let fg = enumerate_minimal_forts(&g).unwrap();
        let fh = enumerate_minimal_forts(&h).unwrap();
        let p = g.cartesian_product(&h).unwrap();
        for f in &fg.minimal_forts {
            for fp in &fh.minimal_forts {
                let r = product_fort(&g, f, &h, fp).unwrap();
                assert!(is_fort(&p, &r.result));
                if r.guarantee == Guarantee::MinimalFort {
                    assert!(is_minimal_fort(&p, &r.result).unwrap());
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 40);
}
