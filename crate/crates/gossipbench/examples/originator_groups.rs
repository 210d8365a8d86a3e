//! Does it matter where a rumour starts?
//!
//! Nodes fall into three popularity groups: the degree-1 fringe (G1), the
//! high-degree giant core above the 90th degree percentile (G3), and the
//! middle (G2). Each run picks its originator uniformly from a fixed sample
//! of the chosen group, so replications average over starting points within
//! the group.
//!
//! ```bash
//! cargo run --release --example originator_groups
//! ```

use gossipbench::experiment::{
    prepare, run_experiment, DatasetSpec, ExperimentConfig, OriginatorScheme,
};
use gossipbench::graph::Group;
use gossipbench::metrics::mean;

fn main() {
    // An attach-1 preferential-attachment tree keeps a large degree-1
    // fringe, so every group is populated.
    let base = ExperimentConfig {
        dataset: DatasetSpec::Pa { n: 2000, attach: 1 },
        reps: 30,
        base_seed: 3,
        targets: vec![0.97],
        ..ExperimentConfig::default()
    };

    println!("time to reach 97% on a 2000-node tree, 30 runs each\n");
    println!("{:<26} {:>10} {:>12}", "originator", "mean s", "pool size");
    for (scheme, label) in [
        (OriginatorScheme::MaxDegree, "max-degree node"),
        (
            OriginatorScheme::GroupSample {
                group: Group::Giant,
                fraction: 0.10,
            },
            "G3 giant-core sample",
        ),
        (
            OriginatorScheme::GroupSample {
                group: Group::Middle,
                fraction: 0.10,
            },
            "G2 middle sample",
        ),
        (
            OriginatorScheme::GroupSample {
                group: Group::Singleton,
                fraction: 0.10,
            },
            "G1 fringe sample",
        ),
    ] {
        let cfg = ExperimentConfig {
            originator: scheme,
            ..base.clone()
        };
        let prep = prepare(cfg).expect("prepare");
        let results = run_experiment(&prep, false).expect("run");
        let times: Vec<f64> = results
            .iter()
            .filter_map(|r| r.outcome.metrics.time_to_fraction(0.97))
            .collect();
        let pool = prep.originator_pool().len();
        println!(
            "{:<26} {:>10.2} {:>12}",
            label,
            mean(&times),
            if pool == 0 { "fixed".into() } else { pool.to_string() },
        );
    }
}
