//! Factor-model persistence: a compact binary container plus a lossless
//! text export for diffing and inspection.
//!
//! Binary layout: an 8-byte magic (`RECO-FM\x01`), a little-endian u32
//! header length, a JSON header (everything but the factor tables), then
//! the user and item tables as raw little-endian f64 — bit-exact, so a
//! saved model reloads to identical predictions.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EpochStats, FactorModel, GravityParams};
use crate::error::{Error, Result};
use crate::ids::IdMap;
use crate::ratings::RatingScale;

const MAGIC: &[u8; 8] = b"RECO-FM\x01";
const SCHEMA: &str = "reco-factor-model-v1";

#[derive(Serialize, Deserialize)]
struct Header {
    schema: String,
    k: usize,
    use_bias: bool,
    scale_min: f64,
    scale_max: f64,
    params: GravityParams,
    users: Vec<String>,
    items: Vec<String>,
    seen_user: Vec<bool>,
    seen_item: Vec<bool>,
    curve: Vec<EpochStats>,
    source_fingerprint: String,
}

fn bad(path: &Path, msg: impl Into<String>) -> Error {
    Error::artifact(path.display().to_string(), msg)
}

impl FactorModel {
    /// Writes the model to `path` in the binary container format.
    pub fn save(&self, path: &Path) -> Result<()> {
        let header = Header {
            schema: SCHEMA.to_string(),
            k: self.k,
            use_bias: self.use_bias,
            scale_min: self.scale.min,
            scale_max: self.scale.max,
            params: self.params.clone(),
            users: self.users.names().map(str::to_string).collect(),
            items: self.items.names().map(str::to_string).collect(),
            seen_user: self.seen_user.clone(),
            seen_item: self.seen_item.clone(),
            curve: self.curve.clone(),
            source_fingerprint: self.source_fingerprint.clone(),
        };
        let header_bytes =
            serde_json::to_vec(&header).map_err(|e| bad(path, format!("header encoding: {e}")))?;
        let header_len = u32::try_from(header_bytes.len())
            .map_err(|_| bad(path, "header too large for the container format"))?;

        let mut out = Vec::with_capacity(
            MAGIC.len() + 4 + header_bytes.len() + (self.p.len() + self.q.len()) * 8,
        );
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&header_len.to_le_bytes());
        out.extend_from_slice(&header_bytes);
        for &x in self.p.iter().chain(&self.q) {
            out.extend_from_slice(&x.to_le_bytes());
        }

        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(&out).map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    /// Reads a model previously written by [`FactorModel::save`].
    pub fn load(path: &Path) -> Result<FactorModel> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.len() < MAGIC.len() + 4 || &bytes[..MAGIC.len()] != MAGIC {
            return Err(bad(path, "not a factor model file (bad magic)"));
        }
        let header_len =
            u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
        let body_start = 12 + header_len;
        if bytes.len() < body_start {
            return Err(bad(path, "truncated header"));
        }
        let header: Header = serde_json::from_slice(&bytes[12..body_start])
            .map_err(|e| bad(path, format!("header decoding: {e}")))?;
        if header.schema != SCHEMA {
            return Err(bad(path, format!("unsupported schema '{}'", header.schema)));
        }
        if header.k != header.params.factors || header.use_bias != header.params.use_bias {
            return Err(bad(path, "header shape disagrees with stored parameters"));
        }
        if header.seen_user.len() != header.users.len()
            || header.seen_item.len() != header.items.len()
        {
            return Err(bad(path, "seen flags do not match the id tables"));
        }

        let n_cells = (header.users.len() + header.items.len()) * header.k;
        let table_bytes = &bytes[body_start..];
        if table_bytes.len() != n_cells * 8 {
            return Err(bad(
                path,
                format!(
                    "factor tables hold {} bytes, expected {}",
                    table_bytes.len(),
                    n_cells * 8
                ),
            ));
        }
        let mut cells = table_bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
        let p: Vec<f64> = cells.by_ref().take(header.users.len() * header.k).collect();
        let q: Vec<f64> = cells.collect();

        let users = intern_all(&header.users)
            .ok_or_else(|| bad(path, "duplicate user ids in header"))?;
        let items = intern_all(&header.items)
            .ok_or_else(|| bad(path, "duplicate item ids in header"))?;
        let scale = RatingScale::new(header.scale_min, header.scale_max)?;

        let mut model = FactorModel::from_parts(users, items, scale, header.params, p, q)?;
        model.set_seen(header.seen_user, header.seen_item);
        model.set_curve(header.curve);
        model.set_source_fingerprint(header.source_fingerprint);
        Ok(model)
    }

    /// Writes a human-readable dump: the header fields as comments, then
    /// one line per vector with full-precision factors. Lossless for
    /// diffing, but [`FactorModel::save`] is the round-trip format.
    pub fn export_text(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str("# reco factor model (text export) v1\n");
        out.push_str(&format!("# k: {}\n# use_bias: {}\n", self.k, self.use_bias));
        out.push_str(&format!("# scale: {}\n", self.scale));
        out.push_str(&format!("# source: {}\n", self.source_fingerprint));
        out.push_str(&format!("# epochs_trained: {}\n", self.curve.len()));
        for (table, ids, seen, tag) in [
            (&self.p, &self.users, &self.seen_user, "user"),
            (&self.q, &self.items, &self.seen_item, "item"),
        ] {
            for (row, name) in ids.names().enumerate() {
                out.push_str(tag);
                out.push('\t');
                out.push_str(name);
                out.push('\t');
                out.push_str(if seen[row] { "seen" } else { "unseen" });
                for slot in 0..self.k {
                    out.push('\t');
                    out.push_str(&format!("{:?}", table[row * self.k + slot]));
                }
                out.push('\n');
            }
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Interns names in order; `None` when a duplicate would break the
/// positional correspondence with the factor tables.
fn intern_all(names: &[String]) -> Option<std::sync::Arc<IdMap>> {
    let mut map = IdMap::new();
    for (expect, name) in names.iter().enumerate() {
        if map.intern(name) as usize != expect {
            return None;
        }
    }
    Some(map.into_shared())
}
