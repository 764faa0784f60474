//! One module per subcommand. Each `run` takes the base configuration,
//! applies its own flag overrides (so the stamped config hash reflects
//! exactly what ran), executes, and prints a plain-text summary to stdout.

pub mod coldstart;
pub mod evaluate;
pub mod ingest;
pub mod recommend;
pub mod report;
pub mod scorers;
pub mod similar;
pub mod split;
pub mod train;

use crate::config::Config;
use reco_core::Result;

/// Applies textual flag overrides to a copy of the base config and logs
/// the resolved hash that every artifact of this run will carry.
pub fn finish_config(
    base: &Config,
    overrides: &[(&str, Option<String>)],
) -> Result<Config> {
    let mut config = base.clone();
    for (key, value) in overrides {
        if let Some(value) = value {
            config.set(key, value)?;
        }
    }
    log::info!("resolved config {}", config.hash());
    Ok(config)
}
