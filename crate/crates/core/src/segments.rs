//! Popularity/activity segmentation: heavy/light users × popular/unpopular
//! items, thresholded at the train set's average rating counts.
//!
//! The thresholds are the exact (unrounded) averages over objects with at
//! least one train rating. Membership uses strictly-less-than: an object
//! sitting exactly on the average is heavy/popular. Ids unknown to the train
//! set count as zero and therefore classify light/unpopular.

use crate::error::{Error, Result};
use crate::ratings::RatingsMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Segment {
    /// Heavy user × popular item.
    HP,
    /// Heavy user × unpopular item.
    HU,
    /// Light user × popular item.
    LP,
    /// Light user × unpopular item.
    LU,
}

impl Segment {
    pub const ALL: [Segment; 4] = [Segment::HP, Segment::HU, Segment::LP, Segment::LU];

    pub fn index(self) -> usize {
        match self {
            Segment::HP => 0,
            Segment::HU => 1,
            Segment::LP => 2,
            Segment::LU => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Segment::HP => "HP",
            Segment::HU => "HU",
            Segment::LP => "LP",
            Segment::LU => "LU",
        }
    }

    fn of(heavy: bool, popular: bool) -> Segment {
        match (heavy, popular) {
            (true, true) => Segment::HP,
            (true, false) => Segment::HU,
            (false, true) => Segment::LP,
            (false, false) => Segment::LU,
        }
    }
}

impl std::fmt::Display for Segment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The 2×2 segment partition of a train set.
#[derive(Debug, Clone)]
pub struct SegmentGrid {
    user_threshold: f64,
    item_threshold: f64,
    heavy: Vec<bool>,
    popular: Vec<bool>,
    heavy_users: usize,
    light_users: usize,
    popular_items: usize,
    unpopular_items: usize,
    ratings_per_segment: [usize; 4],
}

/// Builds the grid from train-set counts.
pub fn compute_segments(train: &RatingsMatrix) -> Result<SegmentGrid> {
    if train.is_empty() {
        return Err(Error::Empty("cannot segment an empty train set"));
    }
    let rated_users = (0..train.n_users() as u32).filter(|&u| train.user_count(u) > 0).count();
    let rated_items = (0..train.n_items() as u32).filter(|&i| train.item_count(i) > 0).count();
    let user_threshold = train.len() as f64 / rated_users as f64;
    let item_threshold = train.len() as f64 / rated_items as f64;
    let heavy: Vec<bool> = (0..train.n_users() as u32)
        .map(|u| !((train.user_count(u) as f64) < user_threshold))
        .collect();
    let popular: Vec<bool> = (0..train.n_items() as u32)
        .map(|i| !((train.item_count(i) as f64) < item_threshold))
        .collect();
    // Membership counts consider only objects present in train.
    let heavy_users = (0..train.n_users() as u32)
        .filter(|&u| train.user_count(u) > 0 && heavy[u as usize])
        .count();
    let light_users = rated_users - heavy_users;
    let popular_items = (0..train.n_items() as u32)
        .filter(|&i| train.item_count(i) > 0 && popular[i as usize])
        .count();
    let unpopular_items = rated_items - popular_items;
    let mut ratings_per_segment = [0usize; 4];
    for (u, i, _) in train.iter() {
        let seg = Segment::of(heavy[u as usize], popular[i as usize]);
        ratings_per_segment[seg.index()] += 1;
    }
    Ok(SegmentGrid {
        user_threshold,
        item_threshold,
        heavy,
        popular,
        heavy_users,
        light_users,
        popular_items,
        unpopular_items,
        ratings_per_segment,
    })
}

impl SegmentGrid {
    pub fn user_threshold(&self) -> f64 {
        self.user_threshold
    }

    pub fn item_threshold(&self) -> f64 {
        self.item_threshold
    }

    /// Is this user heavy? Ids beyond the train universe are light.
    pub fn is_heavy(&self, u: u32) -> bool {
        self.heavy.get(u as usize).copied().unwrap_or(false)
    }

    /// Is this item popular? Ids beyond the train universe are unpopular.
    pub fn is_popular(&self, i: u32) -> bool {
        self.popular.get(i as usize).copied().unwrap_or(false)
    }

    /// Segment label of a (user, item) pair.
    pub fn segment_of(&self, u: u32, i: u32) -> Segment {
        Segment::of(self.is_heavy(u), self.is_popular(i))
    }

    pub fn heavy_users(&self) -> usize {
        self.heavy_users
    }

    pub fn light_users(&self) -> usize {
        self.light_users
    }

    pub fn popular_items(&self) -> usize {
        self.popular_items
    }

    pub fn unpopular_items(&self) -> usize {
        self.unpopular_items
    }

    /// Train rating counts per segment; they sum to the train size.
    pub fn ratings_per_segment(&self) -> [usize; 4] {
        self.ratings_per_segment
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratings::{RatingLog, RatingScale, RatingsMatrix};

    #[test]
    fn uniform_counts_make_everything_heavy_and_popular() {
        // 2 users × 2 items, all rated: every count equals the average.
        let m = RatingsMatrix::from_logs(
            vec![
                RatingLog::new("u1", "i1", 3.0),
                RatingLog::new("u1", "i2", 3.0),
                RatingLog::new("u2", "i1", 3.0),
                RatingLog::new("u2", "i2", 3.0),
            ],
            RatingScale::new(1.0, 5.0).unwrap(),
        )
        .unwrap();
        let g = compute_segments(&m).unwrap();
        assert_eq!(g.heavy_users(), 2);
        assert_eq!(g.light_users(), 0);
        assert_eq!(g.popular_items(), 2);
        assert_eq!(g.ratings_per_segment(), [4, 0, 0, 0]);
    }

    #[test]
    fn thresholds_and_membership_on_desk_data() {
        let m = crate::ratings::tests::d1();
        let g = compute_segments(&m).unwrap();
        // 7 logs, 3 users, 3 items.
        assert!((g.user_threshold() - 7.0 / 3.0).abs() < 1e-12);
        assert!((g.item_threshold() - 7.0 / 3.0).abs() < 1e-12);
        // u2 has 3 >= 2.33 ratings: heavy; u1, u3 have 2 < 2.33: light.
        assert!(g.is_heavy(m.users().get("u2").unwrap()));
        assert!(!g.is_heavy(m.users().get("u1").unwrap()));
        // i2 has 3 ratings: popular; i1, i3 have 2: unpopular.
        assert!(g.is_popular(m.items().get("i2").unwrap()));
        assert!(!g.is_popular(m.items().get("i1").unwrap()));
        let total: usize = g.ratings_per_segment().iter().sum();
        assert_eq!(total, m.len());
    }

    #[test]
    fn segment_labels_cover_the_grid() {
        let m = crate::ratings::tests::d1();
        let g = compute_segments(&m).unwrap();
        let u = |n: &str| m.users().get(n).unwrap();
        let i = |n: &str| m.items().get(n).unwrap();
        assert_eq!(g.segment_of(u("u2"), i("i2")), Segment::HP);
        assert_eq!(g.segment_of(u("u2"), i("i1")), Segment::HU);
        assert_eq!(g.segment_of(u("u1"), i("i2")), Segment::LP);
        assert_eq!(g.segment_of(u("u1"), i("i1")), Segment::LU);
    }

    #[test]
    fn unknown_ids_classify_light_unpopular() {
        let m = crate::ratings::tests::d1();
        let g = compute_segments(&m).unwrap();
        assert_eq!(g.segment_of(999, 999), Segment::LU);
        assert!(!g.is_heavy(999));
        assert!(!g.is_popular(999));
    }
}
