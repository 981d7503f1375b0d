//! Runs the sample pipelines on the toy dataset, writing outputs under
//! `target/samples/<name>/`.
//!
//!     cargo run -p exekg --example run_samples

use std::path::Path;

use exekg::executor::{execute, MethodRegistry};
use exekg::tabular::load_csv;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let data = load_csv(root.join("examples").join(exekg::samples::DATASET_PATH))?;
    let registry = MethodRegistry::with_defaults();
    for (stem, kg) in exekg::samples::all(exekg::samples::DATASET_PATH)? {
        let out = root.join("../../target/samples").join(stem);
        let report = execute(&kg, &data, &registry, &out)?;
        println!("{stem}: {} tasks, artifacts {:?}", report.tasks.len(), report.artifacts);
    }
    Ok(())
}
