//! Regenerates the sample pipeline fixtures next to this file.
//!
//!     cargo run -p exekg --example write_samples

use std::path::Path;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    for (stem, kg) in exekg::samples::all(exekg::samples::DATASET_PATH)? {
        let path = dir.join(format!("{stem}.ttl"));
        kg.save(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
