//! Artifact plumbing shared by the subcommands: the output root, canonical
//! log serialization, sidecar metadata, and source-fingerprint checks.
//!
//! Every artifact is deterministic in (inputs, config, seed): byte-identical
//! across reruns and worker counts. The only timestamp lives in the sidecar
//! `*.meta.json`, never in the artifact itself.

use std::path::{Path, PathBuf};

use reco_core::{Error, RatingsMatrix, Result};

/// Directory artifacts land in when a command is not given an explicit
/// path: `$RECO_OUT`, or `./reco-out`. The environment variable configures
/// nothing else.
pub fn output_root() -> PathBuf {
    std::env::var_os("RECO_OUT").map_or_else(|| PathBuf::from("reco-out"), PathBuf::from)
}

/// Resolves an optional explicit path against the output root and creates
/// the containing directory.
pub fn resolve_out(explicit: Option<&Path>, default_name: &str) -> Result<PathBuf> {
    let path = explicit.map_or_else(|| output_root().join(default_name), Path::to_path_buf);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    Ok(path)
}

/// Writes logs in the canonical TSV form (`user<TAB>item<TAB>rating[<TAB>date]`),
/// users in id order, each profile in item-id order. The fingerprint header
/// states what the file holds; readers skip `#` lines.
pub fn write_logs(m: &RatingsMatrix, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(m.len() * 16 + 64);
    out.push_str("# reco logs v1\n");
    out.push_str(&format!("# scale: {}\n", m.scale()));
    out.push_str(&format!("# fingerprint: {}\n", m.fingerprint()));
    for u in 0..m.n_users() as u32 {
        for e in m.user_row(u) {
            out.push_str(m.users().name(u));
            out.push('\t');
            out.push_str(m.items().name(e.other));
            out.push('\t');
            out.push_str(&e.rating.to_string());
            if let Some(d) = e.date {
                out.push('\t');
                out.push_str(&d.to_string());
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes `<artifact>.meta.json` beside an artifact: tool version, creation
/// time, resolved config hash, and the fingerprints of every input.
pub fn write_meta(artifact: &Path, config_hash: &str, inputs: &[(&str, &str)]) -> Result<()> {
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let inputs: serde_json::Map<String, serde_json::Value> = inputs
        .iter()
        .map(|&(name, fp)| (name.to_string(), serde_json::Value::from(fp)))
        .collect();
    let meta = serde_json::json!({
        "tool": format!("reco {}", env!("CARGO_PKG_VERSION")),
        "created_unix": created,
        "config_hash": config_hash,
        "inputs": inputs,
    });
    let mut path = artifact.as_os_str().to_owned();
    path.push(".meta.json");
    let path = PathBuf::from(path);
    let text = serde_json::to_string_pretty(&meta).expect("static json shape");
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Gate on an artifact's recorded source fingerprint: a mismatch against
/// the data actually supplied aborts (exit code 3) unless forced down to a
/// warning.
pub fn verify_source(what: &str, recorded: &str, supplied: &str, force: bool) -> Result<()> {
    if recorded == supplied || recorded.is_empty() {
        return Ok(());
    }
    if force {
        log::warn!(
            "{what} was built from data with fingerprint {recorded}, but the supplied data \
             has {supplied}; continuing because --force was given"
        );
        return Ok(());
    }
    log::error!("{what} does not match the supplied data (use --force to override)");
    Err(Error::FingerprintMismatch {
        expected: recorded.to_string(),
        actual: supplied.to_string(),
    })
}
