use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use mxdisc::benchmark::{generate_instance, TruthFile};
use mxdisc::io::write_multiplex_file;

use crate::config::GenerateConfig;

use super::{ensure_dir, write_json};

#[derive(Serialize)]
struct GenerateManifest<'a> {
    version: u32,
    command: &'static str,
    files: Vec<String>,
    benchmark: &'a mxdisc::benchmark::BenchmarkConfig,
    clipped_probabilities: usize,
}

/// Writes the edge lists, ground truth and manifest for one instance.
pub fn run_generate(mut config: GenerateConfig, out: &Path, seed: Option<u64>) -> Result<i32> {
    if let Some(seed) = seed {
        config.benchmark.seed = seed;
    }
    config.validate()?;
    ensure_dir(out)?;

    let instance = generate_instance(&config.benchmark)?;
    if instance.clipped_probabilities > 0 {
        eprintln!(
            "warning: {} pair probabilities clipped at 1",
            instance.clipped_probabilities
        );
    }

    let files = ["group1.edges", "group2.edges", "truth.json", "manifest.json"];
    write_multiplex_file(&out.join(files[0]), &instance.net1)?;
    write_multiplex_file(&out.join(files[1]), &instance.net2)?;
    write_json(&out.join(files[2]), &TruthFile::from_instance(&instance))?;

    let manifest = GenerateManifest {
        version: 1,
        command: "generate",
        files: files.iter().map(|f| f.to_string()).collect(),
        benchmark: &config.benchmark,
        clipped_probabilities: instance.clipped_probabilities,
    };
    write_json(&out.join(files[3]), &manifest)?;

    for f in &files {
        println!("{}", out.join(f).display());
    }
    Ok(0)
}
