use proptest::prelude::*;

use hpl_core::augment::sample_gnp;
use hpl_core::bounds::{janson_generic_bound, janson_inputs_for_family, union_bound};
use hpl_core::constructions::{blowup_kminus, is_proper_coloring, pminus, pminus_coloring};
use hpl_core::edgelist;
use hpl_core::experiments::wilson_interval;
use hpl_core::search::{brute_force_oracle, find_power_ham_cycle, verify_certificate, SearchBudget, SearchOutcome};
use hpl_core::seq::is_power_seq;
use hpl_core::{Graph, SeqKind};

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(graph_on)
}

fn graph_pair(max_n: usize) -> impl Strategy<Value = (Graph, Graph)> {
    (4..=max_n).prop_flat_map(|n| (graph_on(n), graph_on(n)))
}

fn graph_on(n: usize) -> impl Strategy<Value = Graph> {
    proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
        let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
    })
}

fn within(n: usize, d: &[Vec<usize>], u: usize, v: usize, k: usize) -> bool {
    u != v && u < n && d[u][v] <= k
}

fn floyd(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut d = vec![vec![usize::MAX / 2; n]; n];
    for u in 0..n {
        d[u][u] = 0;
    }
    for (u, v) in g.edges() {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for w in 0..n {
        for u in 0..n {
            for v in 0..n {
                d[u][v] = d[u][v].min(d[u][w] + d[w][v]);
            }
        }
    }
    d
}

proptest! {
    #[test]
    fn power_matches_distances(g in graph(10), k in 0usize..5) {
        let d = floyd(&g);
        let p = g.power(k);
        for u in 0..g.n() {
            for v in 0..g.n() {
                prop_assert_eq!(p.has_edge(u, v), within(g.n(), &d, u, v, k));
            }
        }
    }

    #[test]
    fn powers_nest(g in graph(10), k in 0usize..4) {
        prop_assert!(g.power(k).is_subgraph_of(&g.power(k + 1)));
        prop_assert_eq!(g.power(1), g.clone());
    }

    #[test]
    fn gnp_is_coupled(n in 2usize..30, a in 0.0f64..1.0, b in 0.0f64..1.0, seed: u64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small = sample_gnp(n, lo, seed).unwrap().graph;
        let large = sample_gnp(n, hi, seed).unwrap().graph;
        prop_assert!(small.is_subgraph_of(&large));
        prop_assert_eq!(sample_gnp(n, lo, seed).unwrap().graph, small);
    }

    #[test]
    fn search_agrees_with_oracle(g in graph(7), r in 1usize..3) {
        prop_assume!(g.n() >= r + 2);
        let fast = find_power_ham_cycle(&g, r, SearchBudget::generous()).unwrap();
        prop_assert_eq!(fast.is_found(), brute_force_oracle(&g, r).unwrap());
    }

    #[test]
    fn certificates_survive_supergraphs((g, extra) in graph_pair(8), r in 1usize..3) {
        if let SearchOutcome::Found(c) = find_power_ham_cycle(&g, r, SearchBudget::generous()).unwrap() {
            prop_assert!(verify_certificate(&g, &c));
            prop_assert!(verify_certificate(&g.union(&extra).unwrap(), &c));
        }
    }

    #[test]
    fn power_paths_reverse(g in graph(9), r in 1usize..4) {
        let seq: Vec<usize> = (0..g.n()).collect();
        let rev: Vec<usize> = seq.iter().rev().copied().collect();
        prop_assert_eq!(
            is_power_seq(&g, &seq, r, SeqKind::Path),
            is_power_seq(&g, &rev, r, SeqKind::Path)
        );
        prop_assert_eq!(
            is_power_seq(&g, &seq, r, SeqKind::Path),
            is_power_seq(&g.power(1), &seq, r, SeqKind::Walk)
        );
    }

    #[test]
    fn edge_lists_round_trip(g in graph(12)) {
        prop_assert_eq!(edgelist::parse(&edgelist::to_string(&g)).unwrap(), g);
    }

    #[test]
    fn wilson_contains_rate(n in 1usize..500, frac in 0.0f64..=1.0, conf in 0.5f64..0.999) {
        let s = ((n as f64) * frac).round() as usize;
        let (lo, hi) = wilson_interval(s, n, conf);
        let rate = s as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= rate + 1e-12 && rate <= hi + 1e-12 && hi <= 1.0);
    }

    #[test]
    fn union_bound_dominates_parts(parts in proptest::collection::vec(0.0f64..=1.0, 1..10)) {
        let b = union_bound(&parts).bound;
        prop_assert!(parts.iter().all(|&p| p <= b + 1e-12) && b <= 1.0);
    }

    #[test]
    fn janson_is_monotone_in_family(p in 0.01f64..0.99, extra in 1usize..4) {
        // adding copies can only raise lambda; for disjoint copies the bound falls
        let base: Vec<Vec<(usize, usize)>> = vec![vec![(0, 1)]];
        let mut more = base.clone();
        for i in 0..extra {
            more.push(vec![(2 * i + 2, 2 * i + 3)]);
        }
        let a = janson_generic_bound(&janson_inputs_for_family(&base, p)).bound;
        let b = janson_generic_bound(&janson_inputs_for_family(&more, p)).bound;
        prop_assert!(b <= a);
    }
}

#[test]
fn gadgets_are_coloured_and_sized() {
    for k in 0..6 {
        let g = pminus(k);
        assert_eq!(g.n(), 2 * k + 2);
        assert!(is_proper_coloring(&g, &pminus_coloring(k)));
        for m in 1..4 {
            assert_eq!(blowup_kminus(k, m).n(), (k + 2) * m);
        }
    }
}
