//! A user's rating profile, detached from the backing store.
//!
//! Scorers take a [`UserProfile`] rather than a user id so the same
//! prediction code serves both known users (profile built from the
//! training matrix) and ad-hoc visitors who supply a handful of ratings
//! on the spot.

use crate::ratings::{LogDate, RatingsMatrix};

/// An immutable snapshot of one user's known ratings.
#[derive(Debug, Clone)]
pub struct UserProfile {
    /// Dense user id inside the training universe, when the profile
    /// belongs to a known user.
    user: Option<u32>,
    /// `(item, rating, date)`, sorted by item id.
    items: Vec<(u32, f64, Option<LogDate>)>,
    mean: Option<f64>,
    /// Dense `item id → rating` table; `NaN` marks absent items.
    lookup: Vec<f64>,
}

impl UserProfile {
    /// Snapshot of user `u`'s row in `m`. An out-of-range or silent user
    /// yields an empty profile.
    pub fn from_matrix(m: &RatingsMatrix, u: u32) -> UserProfile {
        let row = m.user_row(u);
        let items: Vec<(u32, f64, Option<LogDate>)> =
            row.iter().map(|e| (e.other, e.rating, e.date)).collect();
        Self::build(Some(u), items, m.user_mean(u), m.n_items())
    }

    /// A profile from explicit `(item, rating)` pairs on a universe of
    /// `n_items` items. Later duplicates of an item replace earlier ones.
    pub fn from_ratings(
        user: Option<u32>,
        pairs: impl IntoIterator<Item = (u32, f64)>,
        n_items: usize,
    ) -> UserProfile {
        let mut dedup: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
        for (item, rating) in pairs {
            dedup.insert(item, rating);
        }
        let items: Vec<(u32, f64, Option<LogDate>)> =
            dedup.into_iter().map(|(i, r)| (i, r, None)).collect();
        let mean = if items.is_empty() {
            None
        } else {
            Some(items.iter().map(|&(_, r, _)| r).sum::<f64>() / items.len() as f64)
        };
        Self::build(user, items, mean, n_items)
    }

    fn build(
        user: Option<u32>,
        items: Vec<(u32, f64, Option<LogDate>)>,
        mean: Option<f64>,
        n_items: usize,
    ) -> UserProfile {
        let mut lookup = vec![f64::NAN; n_items];
        for &(i, r, _) in &items {
            if let Some(slot) = lookup.get_mut(i as usize) {
                *slot = r;
            }
        }
        UserProfile {
            user,
            items,
            mean,
            lookup,
        }
    }

    pub fn user(&self) -> Option<u32> {
        self.user
    }

    /// The profile's ratings, sorted by item id.
    pub fn items(&self) -> &[(u32, f64, Option<LogDate>)] {
        &self.items
    }

    /// The user's rating of `item`, if present.
    pub fn rating_of(&self, item: u32) -> Option<f64> {
        let r = *self.lookup.get(item as usize)?;
        if r.is_nan() {
            None
        } else {
            Some(r)
        }
    }

    pub fn contains(&self, item: u32) -> bool {
        self.rating_of(item).is_some()
    }

    /// Mean rating; `None` for an empty profile.
    pub fn mean(&self) -> Option<f64> {
        self.mean
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratings::tests::d1;

    #[test]
    fn snapshot_matches_matrix_row() {
        let m = d1();
        let u2 = m.users().get("u2").unwrap();
        let p = UserProfile::from_matrix(&m, u2);
        assert_eq!(p.len(), 3);
        assert_eq!(p.user(), Some(u2));
        let i3 = m.items().get("i3").unwrap();
        assert_eq!(p.rating_of(i3), Some(4.0));
        assert!((p.mean().unwrap() - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn silent_user_yields_empty_profile() {
        let m = d1();
        let p = UserProfile::from_matrix(&m, 99);
        assert!(p.is_empty());
        assert_eq!(p.mean(), None);
        assert_eq!(p.rating_of(0), None);
    }

    #[test]
    fn explicit_pairs_dedup_and_average() {
        let p = UserProfile::from_ratings(None, vec![(2, 1.0), (0, 4.0), (2, 5.0)], 4);
        assert_eq!(p.len(), 2);
        assert_eq!(p.rating_of(2), Some(5.0), "later duplicate wins");
        assert_eq!(p.rating_of(1), None);
        assert!((p.mean().unwrap() - 4.5).abs() < 1e-12);
        assert_eq!(p.items()[0].0, 0, "items sorted by id");
    }
}
