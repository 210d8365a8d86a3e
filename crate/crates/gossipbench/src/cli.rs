//! Command-line interface.
//!
//! Three subcommands: `stats` prints topology statistics of a dataset's
//! largest connected component, `run` executes one experiment and emits the
//! result CSV, `sweep` repeats an experiment across the values of one
//! parameter axis. Settings come from defaults, then an optional
//! `key = value` config file, then flags, later sources winning. Exit code
//! 0 on success, 2 on any usage, config or execution error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::experiment::{
    self, fmt_sig6, run_experiment, run_sweep, ExperimentConfig, ExperimentError, SweepAxis,
};
use crate::graph::{classify_groups, graph_stats, Group};

#[derive(Parser)]
#[command(
    name = "gossipbench",
    version,
    about = "Discrete-event simulator for asynchronous push & pull rumour spreading"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print statistics of a dataset's largest connected component
    Stats(StatsArgs),
    /// Run one experiment and write its result CSV
    Run(RunArgs),
    /// Run one experiment per value of a swept parameter axis
    Sweep(SweepArgs),
}

/// Settings shared by every subcommand. Each flag mirrors one config-file
/// key; both funnel through the same setter.
#[derive(Args, Default)]
struct CommonArgs {
    /// Config file with one `key = value` per line
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Edge-list file, bare name under $GOSSIPBENCH_DATA, or pa:<n>:<attach>
    #[arg(long)]
    dataset: Option<String>,

    /// Graph kind: undirected, directed or signed
    #[arg(long)]
    kind: Option<String>,

    /// Signed-edge handling: positive or all
    #[arg(long)]
    sign_policy: Option<String>,

    /// Neighbor selection: random, q, qp, qu, qpu or qup
    #[arg(long)]
    policy: Option<String>,

    /// Neighbor memory size (random policy only)
    #[arg(long)]
    memory: Option<usize>,

    /// Stopping criterion: none, log3lnln, logn, log2n, nlogn or median
    #[arg(long)]
    stopping: Option<String>,

    /// Logarithm base of the budget formulas
    #[arg(long)]
    log_base: Option<f64>,

    /// Fan-out mode: absolute, relative or hybrid
    #[arg(long)]
    fanout_mode: Option<String>,

    /// Absolute fan-out (contacts per tick); selects absolute mode
    #[arg(long)]
    f_abs: Option<u32>,

    /// Relative fan-out (fraction of degree); selects relative mode
    #[arg(long)]
    f_rel: Option<f64>,

    /// Absolute fan-out of middle-group nodes in hybrid mode
    #[arg(long)]
    hybrid_middle_abs: Option<u32>,

    /// Originator scheme: max_degree, node:<id> or group:<1|2|3>:<fraction>
    #[arg(long)]
    originator: Option<String>,

    /// Number of replications
    #[arg(long)]
    reps: Option<usize>,

    /// Base seed; run r uses a seed derived from it
    #[arg(long)]
    seed: Option<u64>,

    /// Termination: until_all_informed or until_quiescent
    #[arg(long)]
    run_mode: Option<String>,

    /// Simulated-time cap in seconds
    #[arg(long)]
    max_sim_time: Option<f64>,

    /// Mean seconds between a node's ticks
    #[arg(long)]
    clock_mean_s: Option<f64>,

    /// Informed-fraction targets, comma separated, each in (0, 1]
    #[arg(long)]
    targets: Option<String>,

    /// Reply of removed nodes to pull requests: empty or rumour
    #[arg(long)]
    removed_replies: Option<String>,

    /// Degree percentile separating the giant-component core
    #[arg(long)]
    group_percentile: Option<f64>,

    /// Worker threads for replications; 0 uses all cores
    #[arg(long)]
    workers: Option<usize>,

    /// Apply the enhanced-protocol preset
    #[arg(long)]
    enhanced: bool,

    /// Extra `key=value` settings (repeatable), e.g. --set lat_max_ms=50
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl CommonArgs {
    fn build_config(&self) -> Result<ExperimentConfig, ExperimentError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_config_text(&fs::read_to_string(path)?)?;
        }
        let mut kv: Vec<(&str, String)> = Vec::new();
        macro_rules! flag {
            ($key:literal, $field:expr) => {
                if let Some(v) = &$field {
                    kv.push(($key, v.to_string()));
                }
            };
        }
        flag!("dataset", self.dataset);
        flag!("kind", self.kind);
        flag!("sign_policy", self.sign_policy);
        flag!("policy", self.policy);
        flag!("memory", self.memory);
        flag!("stopping", self.stopping);
        flag!("log_base", self.log_base);
        flag!("fanout_mode", self.fanout_mode);
        flag!("f_abs", self.f_abs);
        flag!("f_rel", self.f_rel);
        flag!("hybrid_middle_abs", self.hybrid_middle_abs);
        flag!("originator", self.originator);
        flag!("reps", self.reps);
        flag!("seed", self.seed);
        flag!("run_mode", self.run_mode);
        flag!("max_sim_time", self.max_sim_time);
        flag!("clock_mean_s", self.clock_mean_s);
        flag!("targets", self.targets);
        flag!("removed_replies", self.removed_replies);
        flag!("group_percentile", self.group_percentile);
        flag!("workers", self.workers);
        if self.enhanced {
            kv.push(("enhanced", "true".into()));
        }
        for (key, value) in kv {
            cfg.set(key, &value)?;
        }
        for pair in &self.set {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                ExperimentError::Config(format!("--set expects key=value, got `{pair}`"))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Write one event trace per run into this directory
    #[arg(long, value_name = "DIR")]
    trace_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Axis to sweep: policy, memory, stopping, f_abs, f_rel or originator
    #[arg(long)]
    axis: String,

    /// Comma-separated axis values, one experiment block each
    #[arg(long)]
    values: String,

    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), ExperimentError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_stats(args: &StatsArgs) -> Result<(), ExperimentError> {
    let cfg = args.common.build_config()?;
    cfg.validate()?;
    let lcc = experiment::load_graph(&cfg)?;
    let stats = graph_stats(&lcc);
    let groups = classify_groups(&lcc, cfg.group_percentile)?;
    let mut out = String::new();
    out.push_str(&format!("dataset\t{}\n", cfg.dataset.name()));
    out.push_str(&format!("lcc_nodes\t{}\n", stats.node_count));
    out.push_str(&format!("lcc_edges\t{}\n", stats.edge_count));
    out.push_str(&format!("min_out_degree\t{}\n", stats.min_out_degree));
    out.push_str(&format!("max_out_degree\t{}\n", stats.max_out_degree));
    out.push_str(&format!(
        "mean_out_degree\t{}\n",
        fmt_sig6(stats.mean_out_degree)
    ));
    out.push_str(&format!(
        "clustering\t{}\n",
        fmt_sig6(stats.avg_local_clustering)
    ));
    out.push_str(&format!("group_threshold\t{}\n", groups.threshold_degree()));
    out.push_str(&format!("g1_nodes\t{}\n", groups.size(Group::Singleton)));
    out.push_str(&format!("g2_nodes\t{}\n", groups.size(Group::Middle)));
    out.push_str(&format!("g3_nodes\t{}\n", groups.size(Group::Giant)));
    print!("{out}");
    Ok(())
}

fn write_traces(dir: &PathBuf, results: &[experiment::RunResult]) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    for r in results {
        let trace = r.trace.as_ref().expect("traces were requested");
        let name = format!("run_{:04}_seed_{}.trace", r.run_id, r.seed);
        fs::write(dir.join(name), trace)?;
    }
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<(), ExperimentError> {
    let cfg = args.common.build_config()?;
    let prep = experiment::prepare(cfg)?;
    let results = run_experiment(&prep, args.trace_dir.is_some())?;
    if let Some(dir) = &args.trace_dir {
        write_traces(dir, &results)?;
    }
    write_output(&args.out, &experiment::render_csv(&prep, &results))
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), ExperimentError> {
    let cfg = args.common.build_config()?;
    let axis: SweepAxis = args
        .axis
        .parse()
        .map_err(ExperimentError::Config)?;
    let values: Vec<String> = args
        .values
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    let csv = run_sweep(&cfg, axis, &values)?;
    write_output(&args.out, &csv)
}

/// Entry point shared by the binary and the CLI tests; returns the process
/// exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Clap reports help/version through Err as well; those exit 0.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Stats(a) => cmd_stats(a),
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphKind;
    use crate::policy::Policy;
    use crate::protocol::FanoutMode;
    use crate::stopping::Criterion;

    fn common(args: &[&str]) -> CommonArgs {
        #[derive(Parser)]
        struct Probe {
            #[command(flatten)]
            common: CommonArgs,
        }
        Probe::try_parse_from(std::iter::once("probe").chain(args.iter().copied()))
            .expect("probe args parse")
            .common
    }

    #[test]
    fn flags_override_defaults() {
        let cfg = common(&[
            "--dataset",
            "pa:100:2",
            "--policy",
            "qp",
            "--stopping",
            "logn",
            "--f-rel",
            "0.1",
            "--seed",
            "5",
        ])
        .build_config()
        .unwrap();
        assert_eq!(cfg.policy, Policy::Qp);
        assert_eq!(cfg.stopping.criterion, Criterion::LogN);
        assert_eq!(cfg.fanout.mode, FanoutMode::Relative);
        assert!((cfg.fanout.f_rel - 0.1).abs() < 1e-12);
        assert_eq!(cfg.base_seed, 5);
        assert_eq!(cfg.kind, GraphKind::Undirected);
    }

    #[test]
    fn set_flag_reaches_link_params() {
        let cfg = common(&["--set", "lat_max_ms=50", "--set", "bw_min_mbps=10"])
            .build_config()
            .unwrap();
        assert!((cfg.link_params.latency_max_s - 0.050).abs() < 1e-12);
        assert!((cfg.link_params.bandwidth_min_bps - 1e7).abs() < 1e-3);
    }

    #[test]
    fn bad_set_pair_is_an_error() {
        assert!(common(&["--set", "lat_max_ms"]).build_config().is_err());
        assert!(common(&["--set", "no_such_key=1"]).build_config().is_err());
    }

    #[test]
    fn usage_error_exits_2_success_exits_0() {
        assert_eq!(main(["gossipbench", "no-such-command"]), 2);
        assert_eq!(main(["gossipbench", "--version"]), 0);
        assert_eq!(
            main(["gossipbench", "stats", "--dataset", "pa:50:2"]),
            0
        );
        // Unknown config key via --set.
        assert_eq!(
            main([
                "gossipbench",
                "run",
                "--dataset",
                "pa:50:2",
                "--set",
                "bogus=1"
            ]),
            2
        );
    }

    #[test]
    fn enhanced_flag_propagates() {
        let cfg = common(&["--enhanced"]).build_config().unwrap();
        assert!(cfg.enhanced);
    }
}
