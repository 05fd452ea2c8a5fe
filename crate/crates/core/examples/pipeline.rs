//! Runs an experiment config end to end and writes its artifacts, the same
//! way the `pathorder pipeline` binary does.
//!
//!     cargo run --release --example pipeline [config.json] [out-dir]

use std::path::PathBuf;

use pathorder::cli::output::{to_json, write_artifacts};
use pathorder::cli::{run, Command, CommandResult, ExperimentConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/pipeline.json"), PathBuf::from);
    let out = args.next().map_or_else(|| std::env::temp_dir().join("pathorder-pipeline"), PathBuf::from);

    let config = ExperimentConfig::from_file(&config).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2)
    });
    let report = run(Command::Pipeline, config).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(e.exit_code())
    });
    if let CommandResult::Pipeline(r) = &report.result {
        println!("{} paths, statistical entropy {:.6}", r.distribution.len(), r.entropy.value);
        println!("greatest path(s): {:?}", r.greatest_paths.as_deref().unwrap_or_default());
        if let Some(id) = &r.partition_identity {
            println!("sum exp(1 + ln p) = {:.15} (|error| {:.1e})", id.value, id.abs_error);
        }
    }
    for path in write_artifacts(&report, &out, true).expect("writable output directory") {
        println!("wrote {}", path.display());
    }
    println!("report is {} bytes", to_json(&report).map(|s| s.len()).unwrap_or(0));
}
