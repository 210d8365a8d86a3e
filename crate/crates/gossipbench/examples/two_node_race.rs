//! The smallest interesting simulation: two connected nodes, one rumour.
//!
//! Whoever's exponential clock fires first decides how the rumour crosses:
//! the informed node pushes it, or the uninformed node pulls it. Pushes need
//! one 28-byte message; pulls need a 20-byte request answered by a 28-byte
//! reply, so pull informs take two hops of latency. Over many seeds the race
//! splits close to 50/50.
//!
//! ```bash
//! cargo run --example two_node_race
//! ```

use gossipbench::engine::{run_simulation, RunConfig};
use gossipbench::graph::{parse_edge_list, GraphKind, SignPolicy};
use gossipbench::net::LinkTable;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let g = parse_edge_list(
        "0 1\n".as_bytes(),
        GraphKind::Undirected,
        SignPolicy::default(),
    )
    .expect("two-node graph");
    let cfg = RunConfig::default();

    let mut push_first = 0u64;
    let runs = 10_000u64;
    let mut sum_time = 0.0;
    for seed in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let links = LinkTable::assign(g.node_count(), &cfg.link_params, &mut rng);
        let mut trace = Vec::new();
        let outcome =
            run_simulation(&g, &links, &cfg, None, &mut rng, Some(&mut trace)).expect("run");
        let m = &outcome.metrics;
        sum_time += m.time_to_fraction(1.0).expect("both informed");
        // The arrival that informs node 1 names the winner of the race.
        let text = String::from_utf8(trace).expect("utf8 trace");
        let informing = text
            .lines()
            .map(|l| l.split('\t').collect::<Vec<_>>())
            .find(|f| f[1] == "arrival" && f[3] == "1" && f[4] != "pull_reply_empty")
            .expect("node 1 gets the rumour");
        match informing[4] {
            "push" => push_first += 1,
            "pull_reply_rumour" => {}
            other => panic!("unexpected informing message {other}"),
        }
    }

    println!("runs                {runs}");
    println!(
        "push crossed first  {push_first} ({:.1}%)",
        100.0 * push_first as f64 / runs as f64
    );
    println!(
        "pull crossed first  {} ({:.1}%)",
        runs - push_first,
        100.0 * (runs - push_first) as f64 / runs as f64
    );
    println!("mean time to cross  {:.4} s", sum_time / runs as f64);
}
