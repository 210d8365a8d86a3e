//! Property tests for the structural invariants that must hold for every
//! graph, policy and parameter combination, not just the handpicked unit
//! fixtures.

use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gossipbench::engine::{run_simulation, RunConfig, Termination};
use gossipbench::graph::{
    classify_groups, generate_pa, largest_connected_component, parse_edge_list, Graph, GraphKind,
    Group, SignPolicy,
};
use gossipbench::net::{LinkParams, LinkTable, MessageSize};
use gossipbench::policy::{init_policy_state, select_targets, Policy};
use gossipbench::protocol::{fanout_count, FanoutConfig};
use gossipbench::stopping::{Criterion, StoppingConfig};
use gossipbench::NodeId;

/// Arbitrary undirected edge lists over up to 40 labels; may contain
/// duplicates and self-loops, which the parser must normalize away.
fn raw_edges() -> impl Strategy<Value = Vec<(u8, u8)>> {
    prop::collection::vec((0u8..40, 0u8..40), 1..120)
}

fn parse_undirected(edges: &[(u8, u8)]) -> Graph {
    let text: String = edges
        .iter()
        .map(|(u, v)| format!("{u} {v}\n"))
        .collect();
    parse_edge_list(text.as_bytes(), GraphKind::Undirected, SignPolicy::default())
        .expect("synthetic edge list parses")
}

proptest! {
    #[test]
    fn undirected_degree_sum_is_twice_edge_count(edges in raw_edges()) {
        let g = parse_undirected(&edges);
        let sum: u64 = g.out_degrees().iter().map(|&d| d as u64).sum();
        prop_assert_eq!(sum, 2 * g.edge_count());
    }

    #[test]
    fn adjacency_is_sorted_deduped_and_symmetric(edges in raw_edges()) {
        let g = parse_undirected(&edges);
        for v in 0..g.node_count() as NodeId {
            let nb = g.out_neighbors(v);
            prop_assert!(nb.windows(2).all(|w| w[0] < w[1]), "sorted, no dups");
            prop_assert!(!nb.contains(&v), "no self-loops");
            for &u in nb {
                prop_assert!(g.out_neighbors(u).contains(&v), "undirected symmetry");
            }
        }
    }

    #[test]
    fn edge_list_round_trips_through_parser(edges in raw_edges()) {
        let g = parse_undirected(&edges);
        let text = g.to_edge_list();
        let h = parse_edge_list(text.as_bytes(), GraphKind::Undirected, SignPolicy::default());
        // Isolated nodes cannot survive an edge list, so compare over the
        // LCC-free invariant instead: same edges, possibly fewer nodes.
        match h {
            Ok(h) => {
                prop_assert_eq!(h.edge_count(), g.edge_count());
                let degrees = |g: &Graph| {
                    let mut d: Vec<u32> = g.out_degrees().into_iter().filter(|&d| d > 0).collect();
                    d.sort_unstable();
                    d
                };
                prop_assert_eq!(degrees(&h), degrees(&g));
            }
            // All self-loop input: empty edge list is a legal outcome.
            Err(_) => prop_assert_eq!(g.edge_count(), 0),
        }
    }

    #[test]
    fn lcc_is_idempotent_and_connected(edges in raw_edges()) {
        let g = parse_undirected(&edges);
        if g.edge_count() == 0 {
            return Ok(());
        }
        let lcc = largest_connected_component(&g).expect("lcc");
        let again = largest_connected_component(&lcc).expect("lcc twice");
        prop_assert_eq!(&again, &lcc);

        // Connectivity: BFS from node 0 must reach everything.
        let mut seen = vec![false; lcc.node_count()];
        let mut stack = vec![0 as NodeId];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in lcc.out_neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    stack.push(u);
                }
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn groups_partition_nodes(edges in raw_edges(), pct in 0.5f64..0.99) {
        let g = parse_undirected(&edges);
        if g.edge_count() == 0 {
            return Ok(());
        }
        let lcc = largest_connected_component(&g).expect("lcc");
        let groups = classify_groups(&lcc, pct).expect("classify");
        let t = groups.threshold_degree();
        let mut total = 0;
        for grp in [Group::Singleton, Group::Middle, Group::Giant] {
            total += groups.size(grp);
        }
        prop_assert_eq!(total, lcc.node_count());
        for v in 0..lcc.node_count() as NodeId {
            let d = lcc.out_degree(v);
            match groups.group(v) {
                Group::Singleton => prop_assert_eq!(d, 1),
                Group::Giant => prop_assert!(d >= t && d > 1),
                Group::Middle => prop_assert!(d > 1 && d < t),
            }
        }
    }

    #[test]
    fn quasirandom_covers_every_neighbor_each_cycle(
        degree in 1usize..25,
        policy_idx in 0usize..5,
        fanout in 1u32..4,
        seed in 0u64..1000,
    ) {
        let policy = [Policy::Q, Policy::Qp, Policy::Qu, Policy::Qpu, Policy::Qup][policy_idx];
        let neighbors: Vec<NodeId> = (1..=degree as NodeId).collect();
        let out_degrees: Vec<u32> = (0..=degree as u32).map(|v| v * 7 % 13 + 1).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ps = init_policy_state(&neighbors, policy, 0, &out_degrees, &mut rng)
            .expect("quasirandom state");
        let f = (fanout as usize).min(degree);
        // One full cycle of d picks, in chunks of f.
        let mut picked = Vec::new();
        while picked.len() < degree {
            let take = f.min(degree - picked.len());
            picked.extend(select_targets(&mut ps, &neighbors, take, &mut rng));
        }
        let set: HashSet<NodeId> = picked.iter().copied().collect();
        prop_assert_eq!(set.len(), degree, "cycle covers each neighbor exactly once");
    }

    #[test]
    fn memory_one_never_repeats_last_contact(
        degree in 2usize..20,
        seed in 0u64..1000,
    ) {
        let neighbors: Vec<NodeId> = (1..=degree as NodeId).collect();
        let out_degrees = vec![1u32; degree + 1];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ps = init_policy_state(&neighbors, Policy::Random, 1, &out_degrees, &mut rng)
            .expect("random state");
        let mut last: Option<NodeId> = None;
        for _ in 0..200 {
            let pick = select_targets(&mut ps, &neighbors, 1, &mut rng)[0];
            if let Some(prev) = last {
                prop_assert_ne!(pick, prev, "memory 1 forbids immediate repeats");
            }
            last = Some(pick);
        }
    }

    #[test]
    fn selected_targets_are_distinct_valid_neighbors(
        degree in 1usize..20,
        fanout in 1usize..6,
        memory in 0usize..4,
        seed in 0u64..1000,
    ) {
        let neighbors: Vec<NodeId> = (10..10 + degree as NodeId).collect();
        let out_degrees = vec![1u32; 64];
        let f = fanout.min(degree);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ps = init_policy_state(&neighbors, Policy::Random, memory, &out_degrees, &mut rng)
            .expect("random state");
        for _ in 0..50 {
            let picks = select_targets(&mut ps, &neighbors, f, &mut rng);
            prop_assert_eq!(picks.len(), f);
            let set: HashSet<NodeId> = picks.iter().copied().collect();
            prop_assert_eq!(set.len(), f, "no duplicate targets in one tick");
            prop_assert!(picks.iter().all(|t| neighbors.contains(t)));
        }
    }

    #[test]
    fn message_delay_symmetric_and_monotone(
        a in 0usize..30,
        b in 0usize..30,
        bytes in 1u64..10_000,
        seed in 0u64..1000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let links = LinkTable::assign(30, &LinkParams::default(), &mut rng);
        let d_ab = links.message_delay(a as NodeId, b as NodeId, bytes);
        let d_ba = links.message_delay(b as NodeId, a as NodeId, bytes);
        prop_assert!((d_ab - d_ba).abs() < 1e-15, "delay is symmetric");
        let bigger = links.message_delay(a as NodeId, b as NodeId, bytes + 1);
        prop_assert!(bigger > d_ab, "more bytes take longer");
        // Two latencies in [10ms, 100ms] plus serialization bound the range.
        prop_assert!(d_ab > 0.020 && d_ab < 0.200 + bytes as f64 * 8.0 / 3e6);
    }

    #[test]
    fn fanout_count_stays_within_degree(
        d in 1u32..300,
        f_abs in 1u32..10,
        f_rel in 0.001f64..1.0,
    ) {
        let abs = fanout_count(0, &FanoutConfig::absolute(f_abs), None, d);
        prop_assert!(abs >= 1 && abs <= d && abs <= f_abs);
        let rel = fanout_count(0, &FanoutConfig::relative(f_rel), None, d);
        prop_assert!(rel >= 1 && rel <= d);
        // Relative never exceeds the exact product by a full contact.
        prop_assert!((rel as f64) < f_rel * d as f64 + 1.0 + 1e-6);
    }

    #[test]
    fn tick_budget_monotone_in_n(
        n1 in 2usize..100_000,
        delta in 0usize..100_000,
        crit_idx in 0usize..4,
    ) {
        let criterion = [
            Criterion::Log3PlusLnLn,
            Criterion::LogN,
            Criterion::LogSqN,
            Criterion::NLogN,
        ][crit_idx];
        let cfg = StoppingConfig::with_criterion(criterion);
        let b1 = gossipbench::stopping::tick_budget(&cfg, n1).expect("budget");
        let b2 = gossipbench::stopping::tick_budget(&cfg, n1 + delta).expect("budget");
        prop_assert!(b1 >= 1);
        prop_assert!(b2 >= b1, "budgets grow with n");
    }
}

proptest! {
    // Whole-simulation properties are costlier; fewer, bigger cases.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn connected_runs_inform_everyone(
        n in 2usize..40,
        attach in 1usize..4,
        seed in 0u64..10_000,
        originator_pick in 0usize..1000,
    ) {
        let attach = attach.min(n - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate_pa(n, attach, &mut rng).expect("pa graph");
        let cfg = RunConfig {
            originator: (originator_pick % g.node_count()) as NodeId,
            ..RunConfig::default()
        };
        let links = LinkTable::assign(g.node_count(), &cfg.link_params, &mut rng);
        let outcome = run_simulation(&g, &links, &cfg, None, &mut rng, None).expect("run");
        prop_assert_eq!(outcome.termination, Termination::AllInformed);
        prop_assert_eq!(outcome.metrics.informed_count(), g.node_count());
        // Originator is informed at time zero, before anyone else.
        prop_assert_eq!(outcome.metrics.first_informed_at(cfg.originator), Some(0.0));
        for v in 0..g.node_count() as NodeId {
            let t = outcome.metrics.first_informed_at(v).expect("informed");
            prop_assert!(t >= 0.0 && t <= outcome.metrics.end_time());
        }
    }

    #[test]
    fn rumour_size_accounting_matches_counts(
        n in 3usize..30,
        seed in 0u64..10_000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate_pa(n, 2, &mut rng).expect("pa graph");
        let cfg = RunConfig::default();
        let links = LinkTable::assign(g.node_count(), &cfg.link_params, &mut rng);
        let outcome = run_simulation(&g, &links, &cfg, None, &mut rng, None).expect("run");
        let c = outcome.metrics.message_counts();
        prop_assert_eq!(
            c.total(),
            c.push + c.pull_request + c.pull_reply_rumour + c.pull_reply_empty
        );
        // Every pull request is answered unless the run ended first, so
        // replies never exceed requests.
        prop_assert!(c.pull_reply_rumour + c.pull_reply_empty <= c.pull_request);
        let _ = MessageSize::PUSH;
    }
}
