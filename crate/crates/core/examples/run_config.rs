// Runs an experiment config end to end and writes results.csv,
// alignment.csv, manifest.json and SVG plots.
//
// `cargo run --example run_config -- examples/configs/solution_quality.toml out/`

use std::path::{Path, PathBuf};

use sparse_qaoa::runner::{run_experiment, write_outputs, ExperimentConfig};
use sparse_qaoa::Result;

pub fn run_config(config_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let config = ExperimentConfig::load(config_path)?;
    let output = run_experiment(&config, config_path.parent().unwrap_or(Path::new(".")))?;
    for f in &output.manifest.failures {
        eprintln!(
            "failed: {} {} p={:?}: {}",
            f.graph_id, f.label, f.p, f.error
        );
    }
    for row in &output.rows {
        println!(
            "{:<12} {:<22} {:<6} p={} ratio={:.4}",
            row.graph_id, row.label, row.detail, row.p, row.ratio
        );
    }
    write_outputs(&output, out_dir)
}

pub fn run_example() -> Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = std::env::temp_dir().join("sparse-qaoa-quick");
    let written = run_config(&root.join("examples/configs/quick.toml"), &out)?;
    println!("wrote {} files under {}", written.len(), out.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.as_slice() {
        [config, out] => {
            run_config(Path::new(config), Path::new(out))?;
            Ok(())
        }
        _ => run_example(),
    }
}
