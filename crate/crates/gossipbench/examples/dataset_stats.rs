//! Load a dataset, reduce it to its largest connected component and print
//! topology statistics plus the degree-based popularity groups.
//!
//! By default this generates a synthetic preferential-attachment graph so it
//! runs out of the box:
//!
//! ```bash
//! cargo run --example dataset_stats
//! cargo run --example dataset_stats -- petster-hamster-friend.txt
//! ```
//!
//! File arguments are looked up as given and then under `$GOSSIPBENCH_DATA`.

use gossipbench::experiment::{load_graph, DatasetSpec, ExperimentConfig};
use gossipbench::graph::{classify_groups, graph_stats, Group};

fn main() {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "pa:2000:2".into());
    let cfg = ExperimentConfig {
        dataset: DatasetSpec::parse(&spec).expect("dataset spec"),
        ..ExperimentConfig::default()
    };

    let lcc = match load_graph(&cfg) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("cannot load {spec}: {e}");
            std::process::exit(2);
        }
    };
    let stats = graph_stats(&lcc);
    let groups = classify_groups(&lcc, cfg.group_percentile).expect("classify");

    println!("dataset            {}", cfg.dataset.name());
    println!("lcc nodes          {}", stats.node_count);
    println!("lcc edges          {}", stats.edge_count);
    println!(
        "out-degree         min {} / mean {:.2} / max {}",
        stats.min_out_degree, stats.mean_out_degree, stats.max_out_degree
    );
    println!("local clustering   {:.4}", stats.avg_local_clustering);
    println!();
    println!(
        "popularity groups at the {:.0}th degree percentile (threshold degree {}):",
        cfg.group_percentile * 100.0,
        groups.threshold_degree()
    );
    for (g, label) in [
        (Group::Singleton, "G1 fringe (degree 1) "),
        (Group::Middle, "G2 middle            "),
        (Group::Giant, "G3 giant-core        "),
    ] {
        let size = groups.size(g);
        println!(
            "  {label} {size:>6} nodes ({:.1}%)",
            100.0 * size as f64 / stats.node_count as f64
        );
    }
}
