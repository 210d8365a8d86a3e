//! Compare the six neighbor-selection policies on one graph.
//!
//! `random` picks fresh uniform targets each tick. The quasirandom family
//! walks a fixed permutation of the neighbor list from a random start:
//! `q` keeps adjacency order, `qp` most-popular-first, `qu` least-popular-
//! first, and `qpu`/`qup` interleave the two ends. Cycling guarantees a node
//! revisits nobody until it has contacted every neighbor once.
//!
//! ```bash
//! cargo run --release --example neighbor_policies
//! ```

use gossipbench::experiment::{prepare, run_experiment, DatasetSpec, ExperimentConfig};
use gossipbench::metrics::{mean, stddev_pop};
use gossipbench::policy::Policy;

fn main() {
    let base = ExperimentConfig {
        dataset: DatasetSpec::Pa { n: 2000, attach: 2 },
        reps: 20,
        base_seed: 7,
        targets: vec![1.0],
        ..ExperimentConfig::default()
    };

    println!("time to inform all of a 2000-node graph, 20 runs each\n");
    println!("{:<8} {:>10} {:>10} {:>12}", "policy", "mean s", "stddev s", "messages");
    for policy in [
        Policy::Random,
        Policy::Q,
        Policy::Qp,
        Policy::Qu,
        Policy::Qpu,
        Policy::Qup,
    ] {
        let cfg = ExperimentConfig {
            policy,
            ..base.clone()
        };
        let prep = prepare(cfg).expect("prepare");
        let results = run_experiment(&prep, false).expect("run");
        let times: Vec<f64> = results
            .iter()
            .map(|r| r.outcome.metrics.time_to_fraction(1.0).expect("informed"))
            .collect();
        let msgs: Vec<f64> = results
            .iter()
            .map(|r| r.outcome.metrics.total_messages() as f64)
            .collect();
        println!(
            "{:<8} {:>10.2} {:>10.2} {:>12.0}",
            policy.as_str(),
            mean(&times),
            stddev_pop(&times),
            mean(&msgs),
        );
    }
}
