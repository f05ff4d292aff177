mod common;

use common::{check_all_queries, for_each_ordered_graph, random_graph, PathOracle, SmallGraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn exhaustive_up_to_four_nodes_with_bow_arcs() {
    let mut graphs = 0;
    let mut queries = 0;
    for n in 2..=4 {
        for_each_ordered_graph(n, true, true, |g| {
            queries += check_all_queries(g).unwrap();
            graphs += 1;
        });
    }
    assert_eq!(graphs, 4 + 4usize.pow(3) + 4usize.pow(6));
    assert!(queries > 0);
}

#[test]
fn random_seven_node_graphs_agree_with_path_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for _ in 0..300 {
        let g = random_graph(&mut rng, 7, 0.3, 0.15);
        check_all_queries(&g).unwrap();
    }
}

/// Six-node ADMGs without bow arcs, one representative per topological
/// relabeling: 3^15 graphs. Run with `cargo test -- --ignored`.
#[test]
#[ignore]
fn exhaustive_six_node_admgs_without_bow_arcs() {
    for_each_ordered_graph(6, false, true, |g| {
        check_all_queries(g).unwrap();
    });
}

/// The full six-node sweep including bow arcs: 4^15 graphs.
#[test]
#[ignore]
fn exhaustive_six_node_admgs_with_bow_arcs() {
    for_each_ordered_graph(6, true, true, |g| {
        check_all_queries(g).unwrap();
    });
}

fn arb_graph(max_nodes: usize) -> impl Strategy<Value = SmallGraph> {
    (2..=max_nodes).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (Just(n), proptest::collection::vec(0u8..4, pairs), Just(()).prop_perturb(move |_, mut rng| {
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                order.swap(i, rng.random_range(0..=i));
            }
            order
        }))
            .prop_map(|(n, states, order)| {
                let mut g = SmallGraph { n, directed: Vec::new(), bidirected: Vec::new() };
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if states[k] & 1 != 0 {
                            g.directed.push((order[i], order[j]));
                        }
                        if states[k] & 2 != 0 {
                            g.bidirected.push((order[i], order[j]));
                        }
                        k += 1;
                    }
                }
                g
            })
    })
}

fn subsets(n: usize, src: usize, dst: usize) -> impl Iterator<Item = Vec<usize>> {
    let others: Vec<usize> = (0..n).filter(|&v| v != src && v != dst).collect();
    (0u32..(1 << others.len()))
        .map(move |bits| others.iter().enumerate().filter(|(k, _)| bits & (1 << k) != 0).map(|(_, &v)| v).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn d_separation_is_symmetric(g in arb_graph(7)) {
        let admg = g.to_admg();
        for src in 0..g.n {
            for dst in src + 1..g.n {
                for z in subsets(g.n, src, dst) {
                    prop_assert_eq!(admg.d_separated_idx(src, dst, &z), admg.d_separated_idx(dst, src, &z));
                }
            }
        }
    }

    #[test]
    fn adding_an_edge_never_separates(g in arb_graph(7), pick in any::<prop::sample::Index>(), bidirected in any::<bool>()) {
        let admg = g.to_admg();
        let oracle = PathOracle::new(&g);
        let mut bigger = g.clone();
        let candidates: Vec<(usize, usize)> = (0..g.n)
            .flat_map(|u| (0..g.n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v)
            .collect();
        let (u, v) = candidates[pick.index(candidates.len())];
        if bidirected {
            bigger.bidirected.push((u, v));
        } else {
            bigger.directed.push((u, v));
        }
        prop_assume!(bigger.is_acyclic());
        let bigger_admg = bigger.to_admg();
        for src in 0..g.n {
            for dst in src + 1..g.n {
                for z in subsets(g.n, src, dst) {
                    let zmask = z.iter().fold(0u32, |m, &v| m | 1 << v);
                    prop_assert_eq!(admg.d_separated_idx(src, dst, &z), !oracle.connected(src, dst, zmask));
                    if !admg.d_separated_idx(src, dst, &z) {
                        prop_assert!(!bigger_admg.d_separated_idx(src, dst, &z));
                    }
                }
            }
        }
    }
}
