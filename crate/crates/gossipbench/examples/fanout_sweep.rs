//! Fan-out: how many neighbors a node addresses per tick.
//!
//! Absolute fan-out sends to min(F, degree) neighbors; relative fan-out
//! scales with degree as min(d, max(1, floor(f * d))), so hubs work harder
//! than fringe nodes. More fan-out buys speed with messages.
//!
//! ```bash
//! cargo run --release --example fanout_sweep
//! ```

use gossipbench::experiment::{run_sweep, DatasetSpec, ExperimentConfig, SweepAxis};

fn summary_fields(csv: &str, name: &str) -> Vec<String> {
    csv.lines()
        .filter(|l| l.starts_with("# summary"))
        .map(|line| {
            line.split_whitespace()
                .find_map(|f| f.strip_prefix(name))
                .expect("summary field")
                .to_string()
        })
        .collect()
}

fn main() {
    let base = ExperimentConfig {
        dataset: DatasetSpec::Pa { n: 2000, attach: 2 },
        reps: 15,
        base_seed: 23,
        targets: vec![1.0],
        ..ExperimentConfig::default()
    };

    let abs: Vec<String> = ["1", "2", "3", "4"].iter().map(|s| s.to_string()).collect();
    let abs_csv = run_sweep(&base, SweepAxis::FAbs, &abs).expect("absolute sweep");

    let rel: Vec<String> = ["0.02", "0.04", "0.08", "0.16"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rel_csv = run_sweep(&base, SweepAxis::FRel, &rel).expect("relative sweep");

    println!("{:<14} {:>12} {:>14}", "fan-out", "mean time s", "mean messages");
    for (values, csv, tag) in [(&abs, &abs_csv, "abs"), (&rel, &rel_csv, "rel")] {
        let times = summary_fields(csv, "mean_time_s=");
        let msgs = summary_fields(csv, "mean_messages=");
        for ((v, t), m) in values.iter().zip(&times).zip(&msgs) {
            println!("{:<14} {:>12} {:>14}", format!("{tag} {v}"), t, m);
        }
    }
}
