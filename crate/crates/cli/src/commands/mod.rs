mod detect;
mod evaluate;
mod generate;
mod sweep;

pub use detect::run_detect;
pub use evaluate::run_evaluate;
pub use generate::run_generate;
pub use sweep::run_sweep;

use std::path::Path;

use anyhow::{Context, Result};

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub(crate) fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).with_context(|| format!("creating directory {}", path.display()))
}
