//! Stopping rules: when should a node give up repeating the rumour?
//!
//! Without one, nodes gossip forever and the run only ends because every
//! node is informed. Tick budgets stop each node after a fixed number of
//! active rounds once informed (log n, log^2 n, (log n)^3 ln ln n, n log n).
//! The median-counter rule needs no global knowledge beyond n: nodes attach
//! a phase counter to the rumour and retire once they have seen enough
//! evidence that the median counter moved on.
//!
//! Runs here use `until_quiescent`, so a too-aggressive rule shows up as a
//! final informed fraction below 100%.
//!
//! ```bash
//! cargo run --release --example stopping_criteria
//! ```

use gossipbench::experiment::{prepare, run_experiment, DatasetSpec, ExperimentConfig};
use gossipbench::metrics::mean;
use gossipbench::stopping::Criterion;

fn main() {
    let base = ExperimentConfig {
        dataset: DatasetSpec::Pa { n: 2000, attach: 2 },
        reps: 15,
        base_seed: 19,
        targets: vec![0.97],
        ..ExperimentConfig::default()
    };

    println!("2000 nodes, random policy, 15 runs each\n");
    println!(
        "{:<10} {:>11} {:>13} {:>12}",
        "stopping", "final %", "messages", "t(97%) s"
    );
    for criterion in [
        Criterion::None,
        Criterion::NLogN,
        Criterion::Log3PlusLnLn,
        Criterion::LogSqN,
        Criterion::LogN,
        Criterion::MedianCounter,
    ] {
        let mut cfg = base.clone();
        cfg.stopping.criterion = criterion;
        let prep = prepare(cfg).expect("prepare");
        let results = run_experiment(&prep, false).expect("run");

        let final_pct: Vec<f64> = results
            .iter()
            .map(|r| r.outcome.metrics.final_informed_fraction() * 100.0)
            .collect();
        let msgs: Vec<f64> = results
            .iter()
            .map(|r| r.outcome.metrics.total_messages() as f64)
            .collect();
        let times: Vec<f64> = results
            .iter()
            .filter_map(|r| r.outcome.metrics.time_to_fraction(0.97))
            .collect();
        let t97 = if times.is_empty() {
            "-".to_string()
        } else {
            format!("{:.2}", mean(&times))
        };
        println!(
            "{:<10} {:>11.2} {:>13.0} {:>12}",
            criterion.as_str(),
            mean(&final_pct),
            mean(&msgs),
            t97,
        );
    }
}
