//! Effect of neighbor memory on the random policy.
//!
//! With memory m, a node excludes its m most recent contacts (capped so at
//! least the fan-out remains eligible) before drawing targets, trading a
//! little bookkeeping for fewer wasted repeat contacts. This sweeps
//! m = 0, 1, 2, 4, 8 through the `memory` axis, which pins the policy to
//! `random`: memory is undefined for the cycling quasirandom family.
//!
//! ```bash
//! cargo run --release --example neighbor_memory
//! ```

use gossipbench::experiment::{run_sweep, DatasetSpec, ExperimentConfig, SweepAxis};

fn main() {
    let base = ExperimentConfig {
        dataset: DatasetSpec::Pa { n: 2000, attach: 2 },
        reps: 15,
        base_seed: 11,
        targets: vec![1.0],
        ..ExperimentConfig::default()
    };

    let values: Vec<String> = ["0", "1", "2", "4", "8"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let csv = run_sweep(&base, SweepAxis::Memory, &values).expect("sweep");

    // The sweep CSV carries one summary block per memory value.
    println!("{:<8} {:>12} {:>14}", "memory", "mean time s", "mean messages");
    let mut value_idx = 0;
    for line in csv.lines() {
        if !line.starts_with("# summary") {
            continue;
        }
        let field = |name: &str| {
            line.split_whitespace()
                .find_map(|f| f.strip_prefix(name))
                .expect("summary field")
                .to_string()
        };
        println!(
            "{:<8} {:>12} {:>14}",
            values[value_idx],
            field("mean_time_s="),
            field("mean_messages="),
        );
        value_idx += 1;
    }
}
