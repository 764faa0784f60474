//! Sparse top-K neighbor lists with export/import, blending, and
//! universe remapping.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ids::{same_universe, IdMap};
use crate::ratings::split::mix64;

/// Per-item neighbor lists: for each item, up to K `(neighbor, weight)`
/// entries sorted by descending weight (ascending id on ties). Entries with
/// weight exactly 0 are never stored — absence means "no evidence".
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    items: Arc<IdMap>,
    k: usize,
    /// Token of the measure that produced the matrix ("pearson", "merge",
    /// "random", "factor-cosine", ...). Informational: carried in exports.
    measure: String,
    /// Fingerprint of the rating set (or model) the matrix was built from.
    source_fingerprint: String,
    rows: Vec<Vec<(u32, f64)>>,
}

impl SimilarityMatrix {
    pub(crate) fn new(
        items: Arc<IdMap>,
        k: usize,
        measure: String,
        source_fingerprint: String,
        rows: Vec<Vec<(u32, f64)>>,
    ) -> SimilarityMatrix {
        debug_assert_eq!(rows.len(), items.len());
        SimilarityMatrix {
            items,
            k,
            measure,
            source_fingerprint,
            rows,
        }
    }

    pub fn items(&self) -> &Arc<IdMap> {
        &self.items
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn measure(&self) -> &str {
        &self.measure
    }

    pub fn source_fingerprint(&self) -> &str {
        &self.source_fingerprint
    }

    /// Neighbor list of `item`, best first. Out-of-range ids yield an
    /// empty slice.
    pub fn neighbors(&self, item: u32) -> &[(u32, f64)] {
        self.rows
            .get(item as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn n_items(&self) -> usize {
        self.rows.len()
    }

    /// Total stored entries.
    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// A copy keeping only the best `k` neighbors per row. Rows are already
    /// sorted, so this is a plain truncation.
    pub fn truncated(&self, k: usize) -> SimilarityMatrix {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().take(k).copied().collect())
            .collect();
        SimilarityMatrix {
            items: Arc::clone(&self.items),
            k: k.min(self.k),
            measure: self.measure.clone(),
            source_fingerprint: self.source_fingerprint.clone(),
            rows,
        }
    }

    /// Translates the matrix onto another item universe by name. Items
    /// absent from `target` are dropped (with their edges); items absent
    /// from the matrix get empty rows. A same-universe remap is a cheap
    /// row-preserving copy.
    pub fn remap(&self, target: &Arc<IdMap>) -> SimilarityMatrix {
        if same_universe(&self.items, target) {
            let mut out = self.clone();
            out.items = Arc::clone(target);
            return out;
        }
        let translate: Vec<Option<u32>> = self
            .items
            .names()
            .map(|name| target.get(name))
            .collect();
        let mut rows = vec![Vec::new(); target.len()];
        let mut dropped = 0usize;
        for (old_i, row) in self.rows.iter().enumerate() {
            let Some(new_i) = translate[old_i] else {
                dropped += row.len();
                continue;
            };
            let new_row: Vec<(u32, f64)> = row
                .iter()
                .filter_map(|&(old_j, w)| translate[old_j as usize].map(|new_j| (new_j, w)))
                .collect();
            dropped += row.len() - new_row.len();
            rows[new_i as usize] = new_row;
        }
        if dropped > 0 {
            log::warn!("similarity remap dropped {dropped} edges outside the target universe");
        }
        SimilarityMatrix {
            items: Arc::clone(target),
            k: self.k,
            measure: self.measure.clone(),
            source_fingerprint: self.source_fingerprint.clone(),
            rows,
        }
    }

    /// Blends two matrices: `w·a + (1−w)·b` per edge over the union of
    /// their item universes (matched by name), re-ranked and cut at `k`.
    /// Missing edges contribute 0, so an edge present on one side only is
    /// scaled by that side's weight.
    pub fn merge(a: &SimilarityMatrix, b: &SimilarityMatrix, w: f64, k: usize) -> Result<SimilarityMatrix> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParam(format!(
                "merge weight must lie in [0, 1], got {w}"
            )));
        }
        let items = if same_universe(a.items(), b.items()) {
            Arc::clone(a.items())
        } else {
            let mut union = IdMap::new();
            for name in a.items.names().chain(b.items.names()) {
                union.intern(name);
            }
            union.into_shared()
        };
        let a = a.remap(&items);
        let b = b.remap(&items);
        let mut rows = Vec::with_capacity(items.len());
        let mut acc: Vec<f64> = vec![0.0; items.len()];
        let mut touched: Vec<u32> = Vec::new();
        for i in 0..items.len() {
            for &(j, s) in &a.rows[i] {
                if acc[j as usize] == 0.0 {
                    touched.push(j);
                }
                acc[j as usize] += w * s;
            }
            for &(j, s) in &b.rows[i] {
                if acc[j as usize] == 0.0 && !touched.contains(&j) {
                    touched.push(j);
                }
                acc[j as usize] += (1.0 - w) * s;
            }
            let mut row: Vec<(u32, f64)> = touched
                .drain(..)
                .filter_map(|j| {
                    let s = std::mem::take(&mut acc[j as usize]);
                    (s != 0.0).then_some((j, s))
                })
                .collect();
            rank_row(&mut row, k);
            rows.push(row);
        }
        Ok(SimilarityMatrix {
            items,
            k,
            measure: format!("merge({}*{w:.3}, {}*{:.3})", a.measure, b.measure, 1.0 - w),
            source_fingerprint: format!("{}+{}", a.source_fingerprint, b.source_fingerprint),
            rows,
        })
    }

    /// A symmetric matrix of reproducible pseudo-random weights in (0, 1):
    /// the weight of an (i, j) edge depends only on `seed` and the unordered
    /// pair of item *names*' positions, never on traversal or thread order.
    /// Every item gets exactly `min(k, n-1)` neighbors.
    pub fn random(items: &Arc<IdMap>, k: usize, seed: u64, source_fingerprint: &str) -> SimilarityMatrix {
        let n = items.len();
        let weight = |i: u32, j: u32| -> f64 {
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            let h = mix64(seed ^ mix64(0x9E37_79B9_7F4A_7C15 ^ u64::from(lo)) ^ mix64(u64::from(hi).wrapping_add(1)));
            // Map to (0, 1): never exactly 0, so no edge is dropped.
            (h >> 11) as f64 / (1u64 << 53) as f64 + f64::EPSILON
        };
        let rows = (0..n as u32)
            .map(|i| {
                let mut row: Vec<(u32, f64)> = (0..n as u32)
                    .filter(|&j| j != i)
                    .map(|j| (j, weight(i, j)))
                    .collect();
                rank_row(&mut row, k);
                row
            })
            .collect();
        SimilarityMatrix {
            items: Arc::clone(items),
            k,
            measure: "random".to_string(),
            source_fingerprint: source_fingerprint.to_string(),
            rows,
        }
    }

    /// Writes the matrix as a line-oriented text artifact: a commented
    /// header followed by `item<TAB>neighbor<TAB>weight` triples in row
    /// order. Weights round-trip losslessly through the default float
    /// formatting.
    pub fn export(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let mut emit = |line: String| -> Result<()> {
            writeln!(w, "{line}").map_err(|e| Error::io(path, e))
        };
        emit("# reco similarity matrix v1".to_string())?;
        emit(format!("# measure: {}", self.measure))?;
        emit(format!("# k: {}", self.k))?;
        emit(format!("# source: {}", self.source_fingerprint))?;
        for (i, row) in self.rows.iter().enumerate() {
            let name_i = self.items.name(i as u32);
            for &(j, s) in row {
                emit(format!("{name_i}\t{}\t{s}", self.items.name(j)))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads a matrix written by [`export`](Self::export). Neighbor order
    /// within a row is preserved as written.
    pub fn import(path: &Path) -> Result<SimilarityMatrix> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let path_str = path.display().to_string();
        let reader = BufReader::new(file);
        let mut measure = String::from("unknown");
        let mut k = 0usize;
        let mut source = String::new();
        let mut items = IdMap::new();
        let mut triples: Vec<(u32, u32, f64)> = Vec::new();
        let mut saw_header = false;
        for (lineno, line) in reader.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line.map_err(|e| Error::io(path, e))?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if rest == "reco similarity matrix v1" {
                    saw_header = true;
                } else if let Some(v) = rest.strip_prefix("measure:") {
                    measure = v.trim().to_string();
                } else if let Some(v) = rest.strip_prefix("k:") {
                    k = v.trim().parse().map_err(|_| {
                        Error::parse(&path_str, lineno, format!("bad k value '{}'", v.trim()))
                    })?;
                } else if let Some(v) = rest.strip_prefix("source:") {
                    source = v.trim().to_string();
                }
                continue;
            }
            let mut parts = line.split('\t');
            let (Some(i), Some(j), Some(s), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::parse(
                    &path_str,
                    lineno,
                    format!("expected item<TAB>neighbor<TAB>weight, got '{line}'"),
                ));
            };
            let weight: f64 = s.parse().map_err(|_| {
                Error::parse(&path_str, lineno, format!("bad weight '{s}'"))
            })?;
            let i = items.intern(i);
            let j = items.intern(j);
            triples.push((i, j, weight));
        }
        if !saw_header {
            return Err(Error::artifact(path_str, "missing similarity matrix header"));
        }
        let items = items.into_shared();
        let mut rows = vec![Vec::new(); items.len()];
        for (i, j, s) in triples {
            rows[i as usize].push((j, s));
        }
        if k == 0 {
            k = rows.iter().map(Vec::len).max().unwrap_or(0);
        }
        Ok(SimilarityMatrix {
            items,
            k,
            measure,
            source_fingerprint: source,
            rows,
        })
    }
}

/// Sorts a candidate row by (weight desc, id asc) and truncates to `k`.
/// Uses a partial selection first so full sorts only touch K elements
/// when the candidate set is much larger.
pub(crate) fn rank_row(row: &mut Vec<(u32, f64)>, k: usize) {
    let by_rank = |a: &(u32, f64), b: &(u32, f64)| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    };
    if row.len() > k {
        row.select_nth_unstable_by(k - 1, by_rank);
        row.truncate(k);
    }
    row.sort_unstable_by(by_rank);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(names: &[&str]) -> Arc<IdMap> {
        let mut m = IdMap::new();
        for n in names {
            m.intern(n);
        }
        m.into_shared()
    }

    fn matrix(names: &[&str], rows: Vec<Vec<(u32, f64)>>, measure: &str) -> SimilarityMatrix {
        let items = map(names);
        let k = rows.iter().map(Vec::len).max().unwrap_or(0);
        SimilarityMatrix::new(items, k, measure.to_string(), "src".to_string(), rows)
    }

    #[test]
    fn rank_row_orders_by_weight_then_id() {
        let mut row = vec![(3, 0.5), (1, 0.9), (2, 0.5), (0, 0.1)];
        rank_row(&mut row, 3);
        assert_eq!(row, vec![(1, 0.9), (2, 0.5), (3, 0.5)]);
    }

    #[test]
    fn merge_blends_edge_weights() {
        let a = matrix(&["x", "y"], vec![vec![(1, 0.8)], vec![(0, 0.8)]], "a");
        let b = matrix(&["x", "y"], vec![vec![(1, 0.4)], vec![(0, 0.4)]], "b");
        let m = SimilarityMatrix::merge(&a, &b, 0.5, 5).unwrap();
        // 0.5·0.8 + 0.5·0.4 = 0.6
        let row = m.neighbors(0);
        assert_eq!(row.len(), 1);
        assert_eq!(row[0].0, 1);
        assert!((row[0].1 - 0.6).abs() < 1e-12);
    }

    #[test]
    fn merge_scales_one_sided_edges() {
        let a = matrix(&["x", "y", "z"], vec![vec![(1, 1.0)], vec![], vec![]], "a");
        let b = matrix(&["x", "y", "z"], vec![vec![(2, 1.0)], vec![], vec![]], "b");
        let m = SimilarityMatrix::merge(&a, &b, 0.75, 5).unwrap();
        assert_eq!(m.neighbors(0), &[(1, 0.75), (2, 0.25)]);
    }

    #[test]
    fn merge_unions_universes_by_name() {
        let a = matrix(&["x", "y"], vec![vec![(1, 0.8)], vec![(0, 0.8)]], "a");
        let b = matrix(&["y", "z"], vec![vec![(1, 0.4)], vec![(0, 0.4)]], "b");
        let m = SimilarityMatrix::merge(&a, &b, 0.5, 5).unwrap();
        assert_eq!(m.items().len(), 3);
        let x = m.items().get("x").unwrap();
        let y = m.items().get("y").unwrap();
        let z = m.items().get("z").unwrap();
        // x–y exists only in a (0.8·0.5), y–z only in b (0.4·0.5).
        assert_eq!(m.neighbors(x), &[(y, 0.4)]);
        assert_eq!(m.neighbors(y), &[(x, 0.4), (z, 0.2)]);
        assert_eq!(m.neighbors(z), &[(y, 0.2)]);
    }

    #[test]
    fn merge_rejects_out_of_range_weight() {
        let a = matrix(&["x"], vec![vec![]], "a");
        assert!(SimilarityMatrix::merge(&a, &a, 1.5, 5).is_err());
    }

    #[test]
    fn random_matrix_is_symmetric_and_deterministic() {
        let items = map(&["a", "b", "c", "d", "e"]);
        let m1 = SimilarityMatrix::random(&items, 3, 42, "fp");
        let m2 = SimilarityMatrix::random(&items, 3, 42, "fp");
        let other = SimilarityMatrix::random(&items, 3, 43, "fp");
        for i in 0..5u32 {
            assert_eq!(m1.neighbors(i), m2.neighbors(i));
            assert_eq!(m1.neighbors(i).len(), 3);
            for &(j, w) in m1.neighbors(i) {
                assert!(w > 0.0 && w < 1.0);
                // The reverse edge carries the identical weight (it may or
                // may not survive j's own top-K cut, so probe the full set).
                let back = SimilarityMatrix::random(&items, 4, 42, "fp");
                let found = back.neighbors(j).iter().find(|&&(b, _)| b == i).unwrap();
                assert_eq!(found.1, w);
            }
        }
        assert_ne!(m1.neighbors(0), other.neighbors(0));
    }

    #[test]
    fn truncated_keeps_best_prefix() {
        let m = matrix(&["x", "y", "z"], vec![vec![(1, 0.9), (2, 0.3)], vec![], vec![]], "t");
        let t = m.truncated(1);
        assert_eq!(t.neighbors(0), &[(1, 0.9)]);
        assert_eq!(t.k(), 1);
    }

    #[test]
    fn remap_translates_and_drops_by_name() {
        let m = matrix(
            &["x", "y", "ghost"],
            vec![vec![(1, 0.9), (2, 0.5)], vec![(0, 0.9)], vec![(0, 0.5)]],
            "t",
        );
        let target = map(&["y", "x", "w"]);
        let r = m.remap(&target);
        assert_eq!(r.n_items(), 3);
        let x = target.get("x").unwrap();
        let y = target.get("y").unwrap();
        let w = target.get("w").unwrap();
        // ghost vanished along with its edges; w has no evidence.
        assert_eq!(r.neighbors(x), &[(y, 0.9)]);
        assert_eq!(r.neighbors(y), &[(x, 0.9)]);
        assert_eq!(r.neighbors(w), &[]);
    }

    #[test]
    fn export_import_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sim.tsv");
        let m = matrix(
            &["x", "y", "z"],
            vec![vec![(1, 0.123456789012345), (2, -0.5)], vec![(0, 0.1)], vec![]],
            "pearson",
        );
        m.export(&path).unwrap();
        let r = SimilarityMatrix::import(&path).unwrap();
        assert_eq!(r.measure(), "pearson");
        assert_eq!(r.source_fingerprint(), "src");
        assert_eq!(r.k(), m.k());
        assert!(same_universe(m.items(), r.items()));
        for i in 0..3u32 {
            assert_eq!(m.neighbors(i), r.neighbors(i));
        }
    }

    #[test]
    fn import_rejects_headerless_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("noheader.tsv");
        std::fs::write(&path, "a\tb\t0.5\n").unwrap();
        assert!(SimilarityMatrix::import(&path).is_err());
    }
}
