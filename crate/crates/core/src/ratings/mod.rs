//! Dual-indexed sparse store of rating logs.
//!
//! A [`RatingsMatrix`] keeps every (user, item, rating, date) log twice — once
//! grouped by user (the profile view `S_u`) and once grouped by item (the
//! rater view `T_i`) — so both user-side scoring and item-side similarity
//! search stream over contiguous, pre-sorted slices. The matrix is immutable
//! after construction and safe to share across any number of reader threads.
//!
//! Derived matrices (splits, folds, transposes) share the parent's id maps,
//! so dense indices remain comparable across train/test pairs.

mod load;
pub(crate) mod split;

pub use load::{load_logs, read_logs, LogFormat};
pub use split::{kfold, split_train_test, split_train_test_with, SplitStrategy};

/// Minimum support before an item mean counts as robust in fallback
/// prediction.
pub const ROBUST_MIN_SUPPORT: usize = 10;

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::ids::IdMap;

/// Inclusive rating scale `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatingScale {
    pub min: f64,
    pub max: f64,
}

impl RatingScale {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidParam(format!(
                "rating scale requires min < max, got [{min}, {max}]"
            )));
        }
        Ok(RatingScale { min, max })
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.min && r <= self.max
    }

    pub fn clamp(&self, r: f64) -> f64 {
        r.clamp(self.min, self.max)
    }

    pub fn midpoint(&self) -> f64 {
        (self.min + self.max) / 2.0
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    /// Maps a rating into `[0, 1]` (factor-model training space).
    pub fn normalize(&self, r: f64) -> f64 {
        (r - self.min) / self.width()
    }

    pub fn denormalize(&self, x: f64) -> f64 {
        self.min + self.width() * x
    }
}

impl fmt::Display for RatingScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

/// Log timestamp: seconds since the Unix epoch.
///
/// Loaders accept ISO-8601 dates (`2004-07-21`) or bare integer timestamps;
/// writers emit the ISO form for midnight-aligned values and raw seconds
/// otherwise, so files round-trip losslessly. Absent dates sort before all
/// present ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LogDate(pub i64);

const SECONDS_PER_DAY: i64 = 86_400;

impl LogDate {
    pub fn parse(text: &str) -> Option<LogDate> {
        if let Ok(date) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
            let days = i64::from(date.num_days_from_ce() - epoch_days_from_ce());
            return Some(LogDate(days * SECONDS_PER_DAY));
        }
        text.parse::<i64>().ok().map(LogDate)
    }
}

fn epoch_days_from_ce() -> i32 {
    NaiveDate::from_ymd_opt(1970, 1, 1).unwrap().num_days_from_ce()
}

impl fmt::Display for LogDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.rem_euclid(SECONDS_PER_DAY) == 0 {
            let days = self.0.div_euclid(SECONDS_PER_DAY);
            let date = NaiveDate::from_num_days_from_ce_opt(
                i32::try_from(days).unwrap_or(0) + epoch_days_from_ce(),
            );
            if let Some(date) = date {
                return write!(f, "{}", date.format("%Y-%m-%d"));
            }
        }
        write!(f, "{}", self.0)
    }
}

/// One raw rating event, before interning and deduplication.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingLog {
    pub user: String,
    pub item: String,
    pub rating: f64,
    pub date: Option<LogDate>,
}

impl RatingLog {
    pub fn new(user: impl Into<String>, item: impl Into<String>, rating: f64) -> Self {
        RatingLog { user: user.into(), item: item.into(), rating, date: None }
    }

    pub fn dated(mut self, date: LogDate) -> Self {
        self.date = Some(date);
        self
    }
}

/// One stored log as seen from either index: `other` is the item id in the
/// by-user view and the user id in the by-item view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub other: u32,
    pub rating: f64,
    pub date: Option<LogDate>,
}

/// Dual-indexed sparse rating store (see module docs).
#[derive(Debug, Clone)]
pub struct RatingsMatrix {
    users: Arc<IdMap>,
    items: Arc<IdMap>,
    scale: RatingScale,
    by_user: Vec<Vec<Entry>>,
    by_item: Vec<Vec<Entry>>,
    len: usize,
    user_means: Vec<f64>,
    item_means: Vec<f64>,
    global_mean: f64,
}

impl RatingsMatrix {
    /// Builds a matrix from raw logs, interning ids in order of first
    /// appearance. Duplicate (user, item) pairs collapse to the latest-dated
    /// log (ties: last occurrence); out-of-scale ratings are rejected.
    pub fn from_logs<I>(logs: I, scale: RatingScale) -> Result<Self>
    where
        I: IntoIterator<Item = RatingLog>,
    {
        let mut built = Self::from_log_sets(vec![logs.into_iter().collect()], scale)?;
        Ok(built.pop().expect("one set in, one matrix out"))
    }

    /// Builds one matrix per log set over a single shared id universe — the
    /// union of every set, interned in encounter order, set by set.
    ///
    /// Evaluation pairs a train and a test matrix and requires their ids to
    /// agree, so loading each file independently is not enough; this is the
    /// constructor for that case. Deduplication matches
    /// [`from_logs`](Self::from_logs), applied within each set.
    pub fn from_log_sets(
        sets: Vec<Vec<RatingLog>>,
        scale: RatingScale,
    ) -> Result<Vec<RatingsMatrix>> {
        let mut users = IdMap::new();
        let mut items = IdMap::new();
        for log in sets.iter().flatten() {
            if !scale.contains(log.rating) {
                return Err(Error::InvalidParam(format!(
                    "rating {} outside scale [{}, {}] in record '{}\t{}\t{}'",
                    log.rating, scale.min, scale.max, log.user, log.item, log.rating
                )));
            }
            users.intern(&log.user);
            items.intern(&log.item);
        }
        let users = users.into_shared();
        let items = items.into_shared();
        Ok(sets
            .into_iter()
            .map(|set| {
                let mut chosen: HashMap<(u32, u32), (usize, f64, Option<LogDate>)> =
                    HashMap::new();
                for (seq, log) in set.into_iter().enumerate() {
                    let u = users.get(&log.user).expect("interned above");
                    let i = items.get(&log.item).expect("interned above");
                    let candidate_key = (log.date.map_or(i64::MIN, |d| d.0), seq);
                    match chosen.entry((u, i)) {
                        std::collections::hash_map::Entry::Occupied(mut slot) => {
                            let (old_seq, _, old_date) = *slot.get();
                            let old_key = (old_date.map_or(i64::MIN, |d| d.0), old_seq);
                            if candidate_key >= old_key {
                                slot.insert((seq, log.rating, log.date));
                            }
                        }
                        std::collections::hash_map::Entry::Vacant(slot) => {
                            slot.insert((seq, log.rating, log.date));
                        }
                    }
                }
                let triples = chosen
                    .into_iter()
                    .map(|((u, i), (_, r, d))| (u, i, r, d))
                    .collect();
                Self::from_parts(Arc::clone(&users), Arc::clone(&items), triples, scale)
            })
            .collect())
    }

    /// Assembles a matrix from already-interned triples over shared id maps.
    /// Callers guarantee in-scale ratings and unique (user, item) pairs.
    pub(crate) fn from_parts(
        users: Arc<IdMap>,
        items: Arc<IdMap>,
        triples: Vec<(u32, u32, f64, Option<LogDate>)>,
        scale: RatingScale,
    ) -> Self {
        let n_users = users.len();
        let n_items = items.len();
        let mut by_user: Vec<Vec<Entry>> = vec![Vec::new(); n_users];
        let mut by_item: Vec<Vec<Entry>> = vec![Vec::new(); n_items];
        let len = triples.len();
        for (u, i, r, d) in triples {
            by_user[u as usize].push(Entry { other: i, rating: r, date: d });
            by_item[i as usize].push(Entry { other: u, rating: r, date: d });
        }
        for row in &mut by_user {
            row.sort_unstable_by_key(|e| e.other);
        }
        for col in &mut by_item {
            col.sort_unstable_by_key(|e| e.other);
        }
        let mean_of = |rows: &[Vec<Entry>]| -> Vec<f64> {
            rows.iter()
                .map(|r| {
                    if r.is_empty() {
                        f64::NAN
                    } else {
                        r.iter().map(|e| e.rating).sum::<f64>() / r.len() as f64
                    }
                })
                .collect()
        };
        let user_means = mean_of(&by_user);
        let item_means = mean_of(&by_item);
        let global_mean = if len == 0 {
            f64::NAN
        } else {
            by_user.iter().flatten().map(|e| e.rating).sum::<f64>() / len as f64
        };
        RatingsMatrix {
            users,
            items,
            scale,
            by_user,
            by_item,
            len,
            user_means,
            item_means,
            global_mean,
        }
    }

    pub fn users(&self) -> &Arc<IdMap> {
        &self.users
    }

    pub fn items(&self) -> &Arc<IdMap> {
        &self.items
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    /// Number of stored logs.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_users(&self) -> usize {
        self.by_user.len()
    }

    pub fn n_items(&self) -> usize {
        self.by_item.len()
    }

    /// The profile `S_u`: this user's logs sorted by item id. Unknown
    /// user ids read as empty profiles.
    pub fn user_row(&self, u: u32) -> &[Entry] {
        self.by_user.get(u as usize).map_or(&[], Vec::as_slice)
    }

    /// The rater set `T_i`: this item's logs sorted by user id. Unknown
    /// item ids read as unrated items.
    pub fn item_col(&self, i: u32) -> &[Entry] {
        self.by_item.get(i as usize).map_or(&[], Vec::as_slice)
    }

    pub fn user_count(&self, u: u32) -> usize {
        self.by_user.get(u as usize).map_or(0, Vec::len)
    }

    pub fn item_count(&self, i: u32) -> usize {
        self.by_item.get(i as usize).map_or(0, Vec::len)
    }

    /// Mean rating of user `u`; `None` for unknown or unrated users.
    pub fn user_mean(&self, u: u32) -> Option<f64> {
        let m = *self.user_means.get(u as usize)?;
        m.is_finite().then_some(m)
    }

    /// Mean rating of item `i`; `None` for unknown or unrated items.
    pub fn item_mean(&self, i: u32) -> Option<f64> {
        let m = *self.item_means.get(i as usize)?;
        m.is_finite().then_some(m)
    }

    /// Item mean, reported only when backed by at least `min_support` ratings.
    pub fn robust_item_mean(&self, i: u32, min_support: usize) -> Option<f64> {
        if self.item_count(i) >= min_support.max(1) {
            self.item_mean(i)
        } else {
            None
        }
    }

    /// Mean over all stored ratings; `None` for an empty matrix.
    pub fn global_mean(&self) -> Option<f64> {
        self.global_mean.is_finite().then_some(self.global_mean)
    }

    /// Rating of (u, i) if stored.
    pub fn rating(&self, u: u32, i: u32) -> Option<f64> {
        let row = self.by_user.get(u as usize)?;
        let idx = row.binary_search_by_key(&i, |e| e.other).ok()?;
        Some(row[idx].rating)
    }

    /// Iterates all logs as (user, item, rating) in user-major order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.by_user.iter().enumerate().flat_map(|(u, row)| {
            row.iter().map(move |e| (u as u32, e.other, e.rating))
        })
    }

    /// Swaps the user and item roles, turning item-item machinery into
    /// user-user machinery. Involutive: `transpose(transpose(m)) == m`.
    pub fn transpose(&self) -> RatingsMatrix {
        RatingsMatrix {
            users: Arc::clone(&self.items),
            items: Arc::clone(&self.users),
            scale: self.scale,
            by_user: self.by_item.clone(),
            by_item: self.by_user.clone(),
            len: self.len,
            user_means: self.item_means.clone(),
            item_means: self.user_means.clone(),
            global_mean: self.global_mean,
        }
    }

    /// Content fingerprint: stable across file rewrites, comments and id
    /// order; sensitive to any (user, item, rating, date) triple and the
    /// scale.
    pub fn fingerprint(&self) -> String {
        let mut order: Vec<(u32, u32)> = Vec::with_capacity(self.len);
        for (u, row) in self.by_user.iter().enumerate() {
            for e in row {
                order.push((u as u32, e.other));
            }
        }
        order.sort_unstable_by(|&(u1, i1), &(u2, i2)| {
            self.users
                .name(u1)
                .cmp(self.users.name(u2))
                .then_with(|| self.items.name(i1).cmp(self.items.name(i2)))
        });
        let mut fp = Fingerprint::new();
        fp.update(format!("scale\t{}\t{}\n", self.scale.min, self.scale.max).as_bytes());
        for (u, i) in order {
            let r = self.rating(u, i).expect("triple listed but not stored");
            let row = &self.by_user[u as usize];
            let idx = row.binary_search_by_key(&i, |e| e.other).unwrap();
            let date = row[idx].date.map_or(i64::MIN, |d| d.0);
            fp.update(
                format!(
                    "{}\t{}\t{:016x}\t{}\n",
                    self.users.name(u),
                    self.items.name(i),
                    r.to_bits(),
                    date
                )
                .as_bytes(),
            );
        }
        fp.finish()
    }

    /// Writes the logs back as canonical TSV, re-loadable by [`load_logs`].
    pub fn write_logs(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let mut emit = || -> std::io::Result<()> {
            writeln!(w, "# rating logs (user<TAB>item<TAB>rating[<TAB>date])")?;
            writeln!(w, "# scale: {}", self.scale)?;
            writeln!(w, "# logs: {}", self.len)?;
            writeln!(w, "# fingerprint: {}", self.fingerprint())?;
            for (u, row) in self.by_user.iter().enumerate() {
                for e in row {
                    let user = self.users.name(u as u32);
                    let item = self.items.name(e.other);
                    match e.date {
                        Some(d) => writeln!(w, "{user}\t{item}\t{}\t{d}", e.rating)?,
                        None => writeln!(w, "{user}\t{item}\t{}", e.rating)?,
                    }
                }
            }
            w.flush()
        };
        emit().map_err(|e| Error::io(path, e))
    }

    /// Restricts the matrix to the given users (dense ids), keeping the id
    /// maps shared. Used by the cold-start simulation.
    pub fn restrict_to_users(&self, keep: &[u32]) -> RatingsMatrix {
        let mut flag = vec![false; self.n_users()];
        for &u in keep {
            if let Some(f) = flag.get_mut(u as usize) {
                *f = true;
            }
        }
        let triples = self
            .by_user
            .iter()
            .enumerate()
            .filter(|(u, _)| flag[*u])
            .flat_map(|(u, row)| {
                row.iter().map(move |e| (u as u32, e.other, e.rating, e.date))
            })
            .collect();
        RatingsMatrix::from_parts(
            Arc::clone(&self.users),
            Arc::clone(&self.items),
            triples,
            self.scale,
        )
    }
}
