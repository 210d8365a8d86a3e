//! The standard experiment: random neighbor selection, fan-out 1, no
//! stopping rule, run until everyone knows the rumour.
//!
//! Prints the per-target summary plus the first CSV rows of the result. The
//! whole experiment is a pure function of (dataset, seed, config): rerunning
//! it reproduces the CSV byte for byte.
//!
//! ```bash
//! cargo run --release --example baseline_run
//! ```

use gossipbench::experiment::{prepare, render_csv, run_experiment, DatasetSpec, ExperimentConfig};
use gossipbench::metrics::mean;

fn main() {
    let cfg = ExperimentConfig {
        dataset: DatasetSpec::Pa { n: 2000, attach: 2 },
        reps: 20,
        base_seed: 42,
        targets: vec![0.97, 1.0],
        ..ExperimentConfig::default()
    };

    let prep = prepare(cfg).expect("prepare");
    println!(
        "graph: {} nodes, {} edges, originator = max-degree node",
        prep.graph.node_count(),
        prep.graph.edge_count()
    );

    let results = run_experiment(&prep, false).expect("run");

    for &target in &prep.cfg.targets {
        let times: Vec<f64> = results
            .iter()
            .filter_map(|r| r.outcome.metrics.time_to_fraction(target))
            .collect();
        let loads: Vec<f64> = results
            .iter()
            .filter_map(|r| r.outcome.metrics.network_load(target))
            .collect();
        println!(
            "{:>4.0}% informed: mean {:.2} s over {}/{} runs, mean load {:.0} msg/s",
            target * 100.0,
            mean(&times),
            times.len(),
            results.len(),
            mean(&loads),
        );
    }

    // The exact artifact the `run` subcommand writes.
    let csv = render_csv(&prep, &results);
    println!("\nfirst CSV lines:");
    for line in csv.lines().take(4) {
        println!("  {line}");
    }
    let rerun = render_csv(&prep, &run_experiment(&prep, false).expect("rerun"));
    assert_eq!(csv, rerun, "same seed, same bytes");
    println!("\nrerun with the same seed reproduced {} bytes exactly", csv.len());
}
