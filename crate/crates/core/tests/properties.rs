use proptest::prelude::*;

use sparse_qaoa::alignment::aligned_levels;
use sparse_qaoa::graph::{cut_value, partition_edges};
use sparse_qaoa::sim::{trial_state, Gamma, Layer};
use sparse_qaoa::sparsify::{
    kept_count, remove_k_noncut_edges, sparsify, sparsify_by_solution, Method, SparsifyConfig,
};
use sparse_qaoa::{Assignment, CutSolution, Graph, PhaseSpec, QaoaParams};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |mask| {
            let all = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            Graph::new(n, all.zip(mask).filter(|(_, keep)| *keep).map(|(e, _)| e)).unwrap()
        })
    })
}

fn graph_and_assignment(max_n: usize) -> impl Strategy<Value = (Graph, Assignment)> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.num_vertices();
        (Just(g), 0u64..(1 << n)).prop_map(move |(g, bits)| (g, Assignment::new(bits, n).unwrap()))
    })
}

fn is_subgraph(sub: &Graph, g: &Graph) -> bool {
    sub.num_vertices() == g.num_vertices()
        && sub
            .edges()
            .iter()
            .all(|&(u, v)| g.edge_index(u, v).is_some())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complement_has_same_cut((g, a) in graph_and_assignment(10)) {
        prop_assert_eq!(cut_value(&g, &a).unwrap(), cut_value(&g, &a.complement()).unwrap());
    }

    #[test]
    fn partition_covers_every_edge((g, a) in graph_and_assignment(10)) {
        let sol = CutSolution::evaluate(&g, a).unwrap();
        let (cut, rest) = partition_edges(&g, &sol).unwrap();
        prop_assert_eq!(cut.len() + rest.len(), g.num_edges());
        prop_assert_eq!(cut.len(), sol.value);
    }

    #[test]
    fn cut_table_agrees_with_direct_evaluation(g in graph_strategy(8)) {
        let table = g.cut_table().unwrap();
        for (bits, &c) in table.iter().enumerate() {
            prop_assert_eq!(c as usize, g.cut_of_bits(bits as u64));
        }
    }

    #[test]
    fn assignment_text_round_trips((_, a) in graph_and_assignment(12)) {
        let back: Assignment = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn filters_keep_round_ratio_m(g in graph_strategy(9), seed in any::<u64>(), step in 1usize..=10) {
        prop_assume!(g.num_edges() > 0);
        let ratio = step as f64 / 10.0;
        for method in Method::ALL {
            let sparse = sparsify(&g, &SparsifyConfig::new(method, ratio, seed)).unwrap();
            prop_assert_eq!(sparse.num_edges(), kept_count(g.num_edges(), ratio));
            prop_assert!(is_subgraph(&sparse, &g));
        }
    }

    #[test]
    fn solution_guided_removal_keeps_cut_edges(
        (g, a) in graph_and_assignment(10),
        p_e in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let sol = CutSolution::evaluate(&g, a).unwrap();
        let (cut, _) = partition_edges(&g, &sol).unwrap();
        let sparse = sparsify_by_solution(&g, &sol, p_e, seed).unwrap();
        prop_assert!(is_subgraph(&sparse, &g));
        for (u, v) in cut {
            prop_assert!(sparse.edge_index(u, v).is_some());
        }
        prop_assert_eq!(sparsify_by_solution(&g, &sol, 1.0, seed).unwrap().num_edges(), sol.value);
        prop_assert_eq!(sparsify_by_solution(&g, &sol, 0.0, seed).unwrap(), g.clone());
    }

    #[test]
    fn remove_k_is_nested((g, a) in graph_and_assignment(9), seed in any::<u64>()) {
        let sol = CutSolution::evaluate(&g, a).unwrap();
        let (_, rest) = partition_edges(&g, &sol).unwrap();
        let mut previous = g.clone();
        for k in 0..=rest.len() {
            let sparse = remove_k_noncut_edges(&g, &sol, k, seed).unwrap();
            prop_assert_eq!(sparse.num_edges(), g.num_edges() - k);
            prop_assert!(is_subgraph(&sparse, &previous));
            previous = sparse;
        }
        prop_assert!(remove_k_noncut_edges(&g, &sol, rest.len() + 1, seed).is_err());
    }

    #[test]
    fn trial_states_stay_normalized(
        g in graph_strategy(7),
        angles in proptest::collection::vec(-10.0f64..10.0, 2..=6),
    ) {
        let params = QaoaParams {
            layers: angles
                .chunks(2)
                .filter(|c| c.len() == 2)
                .map(|c| Layer { gamma: Gamma::Single(c[0]), beta: c[1] })
                .collect(),
        };
        let state = trial_state(g.num_vertices(), &PhaseSpec::standard(g.clone()), &params).unwrap();
        prop_assert!((state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_parameters_round_trip(
        flat in proptest::collection::vec(-7.0f64..7.0, 1..=4),
        arity in 1usize..=2,
    ) {
        let width = arity + 1;
        let flat: Vec<f64> = flat.iter().cycle().take(width * flat.len()).copied().collect();
        let params = QaoaParams::from_flat(&flat, arity).unwrap();
        prop_assert_eq!(params.to_flat(), flat);
    }

    #[test]
    fn alignment_is_symmetric(g in graph_strategy(7), seed in any::<u64>(), step in 1usize..=10) {
        prop_assume!(g.num_edges() > 0);
        let sparse = sparsify(&g, &SparsifyConfig::new(Method::Random, step as f64 / 10.0, seed)).unwrap();
        let ab = aligned_levels(&g, &sparse).unwrap().aligned_levels;
        let ba = aligned_levels(&sparse, &g).unwrap().aligned_levels;
        prop_assert_eq!(ab, ba);
    }
}
