//! Personalized Top-N assembly: seed selection, neighborhood candidate
//! harvesting, ranking, and the randomized diversity draw — plus the
//! full-catalog variant and the item-to-item list for anonymous sessions.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::{AttributeDictionary, DescriptorCatalog};
use crate::error::{Error, Result};
use crate::predict::{predict_from_preferences, Prediction, PreferenceProfile, Scorer};
use crate::profile::UserProfile;
use crate::ratings::{split::mix64, RatingsMatrix, ROBUST_MIN_SUPPORT};
use crate::similarity::SimilarityMatrix;

/// Restricts neighborhood candidates to one side of the popularity split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailMode {
    #[default]
    Any,
    ShortHead,
    LongTail,
}

impl std::str::FromStr for TailMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "any" => Ok(TailMode::Any),
            "short-head" => Ok(TailMode::ShortHead),
            "long-tail" => Ok(TailMode::LongTail),
            other => Err(Error::InvalidParam(format!("unknown tail mode '{other}'"))),
        }
    }
}

/// How seeds are ordered before the G cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedRecency {
    /// Seeded random order.
    #[default]
    Any,
    /// Most recently rated first; undated items last.
    RecentFirst,
}

impl std::str::FromStr for SeedRecency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "any" => Ok(SeedRecency::Any),
            "recent-first" => Ok(SeedRecency::RecentFirst),
            other => Err(Error::InvalidParam(format!("unknown seed recency '{other}'"))),
        }
    }
}

/// Tuning knobs for one Top-N request.
#[derive(Debug, Clone)]
pub struct TopNRequest {
    /// Items to return.
    pub n: usize,
    /// Maximum number of seed items taken from the profile.
    pub g: usize,
    /// Maximum neighborhood candidates harvested per seed.
    pub c: usize,
    /// Diversity factor: the N returned items are drawn from the top N·D
    /// ranked candidates. 1 = deterministic Top-N.
    pub d: usize,
    pub tail_mode: TailMode,
    /// Fraction of rated items forming the short head (by rating count).
    pub tail_split: f64,
    pub seed_recency: SeedRecency,
    /// Rng seed for seed-order shuffling and the diversity draw.
    pub seed: u64,
}

impl TopNRequest {
    pub fn new(n: usize) -> TopNRequest {
        TopNRequest {
            n,
            g: 10,
            c: 100,
            d: 1,
            tail_mode: TailMode::Any,
            tail_split: 0.2,
            seed_recency: SeedRecency::Any,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("n", self.n), ("g", self.g), ("c", self.c), ("d", self.d)] {
            if v == 0 {
                return Err(Error::InvalidParam(format!("top-n parameter {name} must be ≥ 1")));
            }
        }
        if !(self.tail_split > 0.0 && self.tail_split < 1.0) {
            return Err(Error::InvalidParam(format!(
                "tail split must lie strictly inside (0, 1), got {}",
                self.tail_split
            )));
        }
        Ok(())
    }
}

/// The popularity split over training counts: the top `fraction` of rated
/// items (count descending, id ascending, cut at `round(fraction × rated)`)
/// form the short head. Items never rated in train sit in the long tail.
#[derive(Debug, Clone)]
pub struct ShortHeadSet {
    short: Vec<bool>,
    cut: usize,
}

impl ShortHeadSet {
    pub fn new(m: &RatingsMatrix, fraction: f64) -> ShortHeadSet {
        let mut rated: Vec<u32> = (0..m.n_items() as u32).filter(|&i| m.item_count(i) > 0).collect();
        rated.sort_unstable_by(|&a, &b| {
            m.item_count(b).cmp(&m.item_count(a)).then(a.cmp(&b))
        });
        let cut = (fraction * rated.len() as f64).round() as usize;
        let cut = cut.min(rated.len());
        let mut short = vec![false; m.n_items()];
        for &i in &rated[..cut] {
            short[i as usize] = true;
        }
        ShortHeadSet { short, cut }
    }

    pub fn is_short_head(&self, item: u32) -> bool {
        self.short.get(item as usize).copied().unwrap_or(false)
    }

    /// Number of short-head items.
    pub fn short_head_len(&self) -> usize {
        self.cut
    }

    fn admits(&self, mode: TailMode, item: u32) -> bool {
        match mode {
            TailMode::Any => true,
            TailMode::ShortHead => self.is_short_head(item),
            TailMode::LongTail => !self.is_short_head(item),
        }
    }
}

/// Optional candidate filters applied before ranking.
#[derive(Default)]
pub struct RankFilters<'a> {
    pub veto: Option<VetoFilter<'a>>,
    pub near_dup: Option<NearDupFilter<'a>>,
}

/// Drops candidates whose preference-based score falls below a threshold
/// (a vetoed descriptor pulls the score far under any sensible threshold).
/// Candidates the preferences cannot score are kept.
pub struct VetoFilter<'a> {
    pub prefs: &'a PreferenceProfile,
    pub catalog: &'a DescriptorCatalog,
    pub dict: &'a AttributeDictionary,
    pub threshold: f64,
}

/// Drops candidates too similar to something already in the profile.
pub struct NearDupFilter<'a> {
    pub sm: &'a SimilarityMatrix,
    /// A candidate sharing an edge with weight > ceiling to any profile
    /// item is suppressed.
    pub ceiling: f64,
}

impl RankFilters<'_> {
    fn admits(&self, profile: &UserProfile, item: u32) -> bool {
        if let Some(v) = &self.veto {
            if let Some(score) = predict_from_preferences(v.prefs, item, v.catalog, v.dict) {
                if score < v.threshold {
                    return false;
                }
            }
        }
        if let Some(nd) = &self.near_dup {
            let dup = nd
                .sm
                .neighbors(item)
                .iter()
                .any(|&(j, w)| w > nd.ceiling && profile.contains(j));
            if dup {
                return false;
            }
        }
        true
    }
}

/// Scores `candidates` for the profile and sorts them by descending value
/// (ascending id on ties), after applying the optional filters.
pub fn rank_list(
    profile: &UserProfile,
    candidates: &[u32],
    scorer: &dyn Scorer,
    filters: &RankFilters<'_>,
) -> Vec<(u32, Prediction)> {
    let mut ranked: Vec<(u32, Prediction)> = candidates
        .iter()
        .filter(|&&i| filters.admits(profile, i))
        .map(|&i| (i, scorer.predict(profile, i)))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.value
            .partial_cmp(&a.1.value)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    ranked
}

/// The top neighbors of one item — the anonymous-session recommendation.
/// Unknown items produce an empty list (with a warning) rather than an
/// error, so a stale id cannot take a session down.
pub fn similar_items(sm: &SimilarityMatrix, item: u32, n: usize) -> Vec<(u32, f64)> {
    if item as usize >= sm.n_items() {
        log::warn!("similar_items: item #{item} is not in the similarity matrix");
        return Vec::new();
    }
    sm.neighbors(item).iter().take(n).copied().collect()
}

fn profile_rng(seed: u64, profile: &UserProfile) -> ChaCha8Rng {
    let who = profile.user().map_or(1u64 << 40, u64::from);
    ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(who.wrapping_add(1))))
}

/// Seed items for the personalized Top-N: profile items rated strictly
/// above the profile mean, falling back to the whole profile when nothing
/// clears the bar. Ordered per the recency mode, cut at `g`.
fn select_seeds(profile: &UserProfile, req: &TopNRequest, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mean = match profile.mean() {
        Some(m) => m,
        None => return Vec::new(),
    };
    let mut seeds: Vec<(u32, Option<i64>)> = profile
        .items()
        .iter()
        .filter(|&&(_, r, _)| r > mean)
        .map(|&(i, _, d)| (i, d.map(|d| d.0)))
        .collect();
    if seeds.is_empty() {
        seeds = profile
            .items()
            .iter()
            .map(|&(i, _, d)| (i, d.map(|d| d.0)))
            .collect();
    }
    match req.seed_recency {
        SeedRecency::RecentFirst => {
            // Most recent first; undated entries sink to the end; ties
            // break on ascending id.
            seeds.sort_by(|a, b| match (a.1, b.1) {
                (Some(x), Some(y)) => y.cmp(&x).then(a.0.cmp(&b.0)),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => a.0.cmp(&b.0),
            });
        }
        SeedRecency::Any => seeds.shuffle(rng),
    }
    seeds.truncate(req.g);
    seeds.into_iter().map(|(i, _)| i).collect()
}

/// Popularity list for profileless users: items ranked by robust mean
/// (items too thinly rated to have one rank by the global mean instead),
/// descending, ascending id on ties, minus anything in the profile.
pub fn popularity_top_n(m: &RatingsMatrix, n: usize, profile: &UserProfile) -> Vec<u32> {
    let global = m.global_mean().unwrap_or(0.0);
    let mut ranked: Vec<(u32, f64)> = (0..m.n_items() as u32)
        .filter(|&i| !profile.contains(i))
        .map(|i| (i, m.robust_item_mean(i, ROBUST_MIN_SUPPORT).unwrap_or(global)))
        .collect();
    crate::similarity::rank_row(&mut ranked, n);
    ranked.into_iter().map(|(i, _)| i).collect()
}

/// The five-step personalized Top-N.
///
/// 1. Pick up to G seed items the user rated above their own mean.
/// 2. Harvest up to C neighbors per seed (tail-filtered when requested).
/// 3. Union the candidates and drop everything already in the profile.
/// 4. Rank candidates by the scorer (value descending, id ascending).
/// 5. Draw N items uniformly from the top N·D, returned in rank order.
///
/// An empty profile short-circuits to [`popularity_top_n`]. A profile with
/// no surviving candidates yields an empty list — the caller decides
/// whether to fall back.
pub fn recommend_top_n(
    profile: &UserProfile,
    req: &TopNRequest,
    sm: &SimilarityMatrix,
    m: &RatingsMatrix,
    scorer: &dyn Scorer,
    tails: Option<&ShortHeadSet>,
) -> Result<Vec<u32>> {
    req.validate()?;
    if profile.is_empty() {
        return Ok(popularity_top_n(m, req.n, profile));
    }
    let mut rng = profile_rng(req.seed, profile);
    let seeds = select_seeds(profile, req, &mut rng);

    let computed_tails;
    let tails = match (req.tail_mode, tails) {
        (TailMode::Any, _) => None,
        (_, Some(t)) => Some(t),
        (_, None) => {
            computed_tails = ShortHeadSet::new(m, req.tail_split);
            Some(&computed_tails)
        }
    };

    let mut candidates: Vec<u32> = Vec::new();
    let mut seen = vec![false; sm.n_items()];
    for seed in seeds {
        let mut taken = 0usize;
        for &(j, _) in sm.neighbors(seed) {
            if taken == req.c {
                break;
            }
            if let Some(t) = tails {
                if !t.admits(req.tail_mode, j) {
                    continue;
                }
            }
            taken += 1;
            if !seen[j as usize] && !profile.contains(j) {
                seen[j as usize] = true;
                candidates.push(j);
            }
        }
    }

    let ranked = rank_list(profile, &candidates, scorer, &RankFilters::default());
    Ok(diversity_draw(ranked, req, &mut rng))
}

/// Step 5: keep the top `n·d` ranked candidates, then sample `n` of them
/// without replacement, returned in rank order. `d == 1` degenerates to
/// the plain deterministic head.
fn diversity_draw(
    ranked: Vec<(u32, Prediction)>,
    req: &TopNRequest,
    rng: &mut ChaCha8Rng,
) -> Vec<u32> {
    let window = ranked.len().min(req.n.saturating_mul(req.d));
    if window <= req.n {
        return ranked.into_iter().take(req.n).map(|(i, _)| i).collect();
    }
    let mut picks: Vec<usize> = rand::seq::index::sample(rng, window, req.n).into_vec();
    picks.sort_unstable();
    picks.into_iter().map(|idx| ranked[idx].0).collect()
}

/// Scores the whole catalog (minus the profile) and returns the top `n`.
pub fn full_catalog_top_n(
    profile: &UserProfile,
    n: usize,
    scorer: &dyn Scorer,
    m: &RatingsMatrix,
) -> Vec<u32> {
    let candidates: Vec<u32> = (0..m.n_items() as u32)
        .filter(|&i| !profile.contains(i))
        .collect();
    rank_list(profile, &candidates, scorer, &RankFilters::default())
        .into_iter()
        .take(n)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predict::{DefaultMode, DefaultScorer, KnnScorer, Origin, ScoringMode};
    use crate::ratings::tests::d1;
    use crate::ratings::{LogDate, RatingLog, RatingScale, RatingsMatrix};
    use crate::similarity::{knn_search, SimilarityMeasure};

    /// Scorer stub mapping item id → fixed value.
    struct MapScorer(std::collections::HashMap<u32, f64>);

    impl MapScorer {
        fn new(pairs: &[(u32, f64)]) -> MapScorer {
            MapScorer(pairs.iter().copied().collect())
        }
    }

    impl Scorer for MapScorer {
        fn predict(&self, _profile: &UserProfile, item: u32) -> Prediction {
            Prediction {
                value: self.0.get(&item).copied().unwrap_or(0.0),
                origin: Origin::MainModel,
                confidence: None,
                explanation: None,
            }
        }

        fn label(&self) -> String {
            "stub".to_string()
        }
    }

    #[test]
    fn desk_walk_recommends_the_unseen_item() {
        let m = d1();
        let sm = knn_search(&m, 2, SimilarityMeasure::WeightedPearson).unwrap();
        let u1 = m.users().get("u1").unwrap();
        let profile = UserProfile::from_matrix(&m, u1);
        let scorer = KnnScorer::new(&sm, &m, ScoringMode::MeanBased).unwrap();
        let req = TopNRequest::new(1);
        let out = recommend_top_n(&profile, &req, &sm, &m, &scorer, None).unwrap();
        assert_eq!(out, vec![m.items().get("i3").unwrap()]);
    }

    #[test]
    fn seeds_fall_back_to_whole_profile() {
        // Flat ratings: nothing is strictly above the mean, so every
        // profile item seeds the search.
        let m = RatingsMatrix::from_logs(
            vec![
                RatingLog::new("u", "a", 3.0),
                RatingLog::new("u", "b", 3.0),
                RatingLog::new("v", "a", 4.0),
                RatingLog::new("v", "b", 2.0),
                RatingLog::new("v", "c", 5.0),
                RatingLog::new("w", "b", 2.0),
                RatingLog::new("w", "c", 4.0),
            ],
            RatingScale::new(1.0, 5.0).unwrap(),
        )
        .unwrap();
        let sm = knn_search(&m, 3, SimilarityMeasure::Jaccard).unwrap();
        let u = m.users().get("u").unwrap();
        let profile = UserProfile::from_matrix(&m, u);
        let scorer = DefaultScorer::new(&m, DefaultMode::Collaborative);
        let out = recommend_top_n(&profile, &TopNRequest::new(3), &sm, &m, &scorer, None).unwrap();
        // Neighbors of {a, b} minus the profile leave exactly {c}.
        assert_eq!(out, vec![m.items().get("c").unwrap()]);
    }

    #[test]
    fn window_head_is_deterministic() {
        let profile = UserProfile::from_ratings(None, vec![], 10);
        let scorer = MapScorer::new(&[(0, 1.0), (1, 4.0), (2, 3.0), (3, 2.0)]);
        let ranked = rank_list(&profile, &[0, 1, 2, 3], &scorer, &RankFilters::default());
        let order: Vec<u32> = ranked.iter().map(|&(i, _)| i).collect();
        assert_eq!(order, vec![1, 2, 3, 0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let req = TopNRequest::new(3);
        assert_eq!(diversity_draw(ranked, &req, &mut rng), vec![1, 2, 3]);
    }

    #[test]
    fn diversity_draw_samples_inside_the_window() {
        let profile = UserProfile::from_ratings(None, vec![], 32);
        let pairs: Vec<(u32, f64)> = (0..20u32).map(|i| (i, f64::from(100 - i))).collect();
        let scorer = MapScorer::new(&pairs);
        let items: Vec<u32> = (0..20).collect();
        let ranked = rank_list(&profile, &items, &scorer, &RankFilters::default());
        let mut req = TopNRequest::new(3);
        req.d = 4; // window = 12
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let picked = diversity_draw(ranked.clone(), &req, &mut rng);
        assert_eq!(picked.len(), 3);
        for &p in &picked {
            assert!(p < 12, "drawn outside the top N·D window: {p}");
        }
        // Rank order is preserved within the draw.
        let positions: Vec<usize> = picked
            .iter()
            .map(|&p| ranked.iter().position(|&(i, _)| i == p).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        // Same seed → same draw.
        let mut rng2 = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(diversity_draw(ranked, &req, &mut rng2), picked);
    }

    #[test]
    fn same_request_seed_reproduces_the_list() {
        let m = d1();
        let sm = knn_search(&m, 2, SimilarityMeasure::WeightedPearson).unwrap();
        let u2 = m.users().get("u2").unwrap();
        let profile = UserProfile::from_matrix(&m, u2);
        let scorer = KnnScorer::new(&sm, &m, ScoringMode::MeanBased).unwrap();
        let mut req = TopNRequest::new(2);
        req.d = 3;
        req.seed = 11;
        let a = recommend_top_n(&profile, &req, &sm, &m, &scorer, None).unwrap();
        let b = recommend_top_n(&profile, &req, &sm, &m, &scorer, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn recommendations_never_contain_profile_items() {
        let m = d1();
        let sm = knn_search(&m, 2, SimilarityMeasure::WeightedPearson).unwrap();
        let scorer = KnnScorer::new(&sm, &m, ScoringMode::MeanBased).unwrap();
        for u in 0..m.n_users() as u32 {
            let profile = UserProfile::from_matrix(&m, u);
            let out =
                recommend_top_n(&profile, &TopNRequest::new(5), &sm, &m, &scorer, None).unwrap();
            for i in out {
                assert!(!profile.contains(i));
            }
        }
    }

    #[test]
    fn short_head_is_the_most_rated_fifth() {
        // Ten items: counts 10, 9, ..., 1 → short head = round(0.2·10) = 2.
        let mut logs = Vec::new();
        for i in 0..10u32 {
            for u in 0..(10 - i) {
                logs.push(RatingLog::new(&format!("u{u}"), &format!("i{i}"), 3.0));
            }
        }
        logs.push(RatingLog::new("u0", "never", 2.0)); // will be test-only
        let m = RatingsMatrix::from_logs(logs, RatingScale::new(1.0, 5.0).unwrap()).unwrap();
        let tails = ShortHeadSet::new(&m, 0.2);
        // 11 rated items → round(2.2) = 2 short-head slots.
        assert_eq!(tails.short_head_len(), 2);
        assert!(tails.is_short_head(m.items().get("i0").unwrap()));
        assert!(tails.is_short_head(m.items().get("i1").unwrap()));
        assert!(!tails.is_short_head(m.items().get("i2").unwrap()));
        assert!(!tails.is_short_head(m.items().get("never").unwrap()));
        assert!(!tails.is_short_head(999), "out of range is long tail");
    }

    #[test]
    fn tie_on_counts_breaks_by_ascending_id() {
        let m = RatingsMatrix::from_logs(
            vec![
                RatingLog::new("u1", "a", 3.0),
                RatingLog::new("u2", "a", 3.0),
                RatingLog::new("u1", "b", 3.0),
                RatingLog::new("u2", "b", 3.0),
                RatingLog::new("u1", "c", 3.0),
                RatingLog::new("u1", "d", 3.0),
            ],
            RatingScale::new(1.0, 5.0).unwrap(),
        )
        .unwrap();
        let tails = ShortHeadSet::new(&m, 0.25);
        // round(0.25·4) = 1 slot; a and b tie on count 2, a has the lower id.
        assert_eq!(tails.short_head_len(), 1);
        assert!(tails.is_short_head(m.items().get("a").unwrap()));
        assert!(!tails.is_short_head(m.items().get("b").unwrap()));
    }

    #[test]
    fn tail_mode_filters_candidates() {
        let m = d1();
        // Counts on D1: i1→2, i2→3, i3→2. Split 0.4 → round(1.2) = 1 slot → {i2}.
        let sm = knn_search(&m, 3, SimilarityMeasure::Jaccard).unwrap();
        let u3 = m.users().get("u3").unwrap();
        let profile = UserProfile::from_matrix(&m, u3); // rated i2, i3
        let scorer = KnnScorer::new(&sm, &m, ScoringMode::MeanBased).unwrap();
        let mut req = TopNRequest::new(3);
        req.tail_split = 0.4;
        req.tail_mode = TailMode::ShortHead;
        let out = recommend_top_n(&profile, &req, &sm, &m, &scorer, None).unwrap();
        // The only unseen item is i1, and it is long-tail → filtered out.
        assert!(out.is_empty());
        req.tail_mode = TailMode::LongTail;
        let out = recommend_top_n(&profile, &req, &sm, &m, &scorer, None).unwrap();
        assert_eq!(out, vec![m.items().get("i1").unwrap()]);
    }

    #[test]
    fn recent_first_orders_seeds_by_date() {
        let day = 86_400;
        let m = RatingsMatrix::from_logs(
            vec![
                RatingLog::new("u", "old", 5.0).dated(LogDate(day)),
                RatingLog::new("u", "new", 5.0).dated(LogDate(9 * day)),
                RatingLog::new("u", "undated", 5.0),
                RatingLog::new("v", "old", 2.0),
                RatingLog::new("v", "new", 2.0),
                RatingLog::new("v", "undated", 2.0),
                RatingLog::new("v", "other", 4.0),
                RatingLog::new("w", "new", 3.0),
                RatingLog::new("w", "other", 5.0),
            ],
            RatingScale::new(1.0, 5.0).unwrap(),
        )
        .unwrap();
        let u = m.users().get("u").unwrap();
        let profile = UserProfile::from_matrix(&m, u);
        let mut req = TopNRequest::new(1);
        req.seed_recency = SeedRecency::RecentFirst;
        req.g = 1;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // All three ratings are 5 = the mean → fallback to all, then the
        // dated ones lead, newest first.
        let seeds = select_seeds(&profile, &req, &mut rng);
        assert_eq!(seeds, vec![m.items().get("new").unwrap()]);
        req.g = 3;
        let seeds = select_seeds(&profile, &req, &mut rng);
        assert_eq!(
            seeds,
            vec![
                m.items().get("new").unwrap(),
                m.items().get("old").unwrap(),
                m.items().get("undated").unwrap(),
            ]
        );
    }

    #[test]
    fn similar_items_on_desk_data() {
        let m = d1();
        let sm = knn_search(&m, 2, SimilarityMeasure::WeightedPearson).unwrap();
        let i1 = m.items().get("i1").unwrap();
        let i2 = m.items().get("i2").unwrap();
        let out = similar_items(&sm, i1, 1);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, i2);
        assert!((out[0].1 - 0.4714).abs() < 5e-5);
        // n beyond K just returns everything stored.
        assert_eq!(similar_items(&sm, i1, 99).len(), 2);
        // No self-neighbors, ever.
        for i in 0..m.n_items() as u32 {
            assert!(similar_items(&sm, i, 99).iter().all(|&(j, _)| j != i));
        }
        // Unknown item: empty, not a panic.
        assert!(similar_items(&sm, 777, 3).is_empty());
    }

    #[test]
    fn rank_list_breaks_ties_by_ascending_id() {
        let profile = UserProfile::from_ratings(None, vec![], 8);
        let scorer = MapScorer::new(&[(5, 2.0), (1, 2.0), (3, 4.0)]);
        let ranked = rank_list(&profile, &[5, 1, 3], &scorer, &RankFilters::default());
        let order: Vec<u32> = ranked.iter().map(|&(i, _)| i).collect();
        assert_eq!(order, vec![3, 1, 5]);
        // Argmax consistency: first element maximizes the score.
        assert!(ranked[0].1.value >= ranked[1].1.value);
    }

    #[test]
    fn veto_filter_suppresses_disliked_descriptors() {
        let catalog = crate::catalog::DescriptorCatalog::from_triples(vec![
            ("film".to_string(), "genre".to_string(), "horror".to_string(), 1.0),
            ("other".to_string(), "genre".to_string(), "comedy".to_string(), 1.0),
        ])
        .unwrap();
        let dict = AttributeDictionary::uniform();
        let mut prefs = PreferenceProfile::new(2.0).unwrap();
        prefs.veto("genre=horror");
        let film = catalog.items().get("film").unwrap();
        let other = catalog.items().get("other").unwrap();
        let profile = UserProfile::from_ratings(None, vec![], 2);
        let scorer = MapScorer::new(&[(film, 5.0), (other, 1.0)]);
        let filters = RankFilters {
            veto: Some(VetoFilter {
                prefs: &prefs,
                catalog: &catalog,
                dict: &dict,
                threshold: 0.0,
            }),
            near_dup: None,
        };
        let ranked = rank_list(&profile, &[film, other], &scorer, &filters);
        // film would top the list on score, but the veto removes it; the
        // unseen-by-preferences item survives.
        assert_eq!(ranked.len(), 1);
        assert_eq!(ranked[0].0, other);
    }

    #[test]
    fn near_dup_filter_suppresses_known_lookalikes() {
        let m = d1();
        let sm = knn_search(&m, 2, SimilarityMeasure::Pearson).unwrap();
        let i1 = m.items().get("i1").unwrap();
        let i3 = m.items().get("i3").unwrap();
        // Profile holds i3; Pearson(i1, i3) = 1.0, far above the ceiling.
        let profile = UserProfile::from_ratings(None, vec![(i3, 5.0)], m.n_items());
        let scorer = MapScorer::new(&[(i1, 5.0)]);
        let filters = RankFilters {
            veto: None,
            near_dup: Some(NearDupFilter { sm: &sm, ceiling: 0.95 }),
        };
        assert!(rank_list(&profile, &[i1], &scorer, &filters).is_empty());
        let lax = RankFilters {
            veto: None,
            near_dup: Some(NearDupFilter { sm: &sm, ceiling: 1.0 }),
        };
        assert_eq!(rank_list(&profile, &[i1], &scorer, &lax).len(), 1);
    }

    #[test]
    fn empty_profile_falls_back_to_popularity() {
        // Ten raters make both items robust; "hi" has the better mean.
        let mut logs = Vec::new();
        for u in 0..10 {
            logs.push(RatingLog::new(&format!("u{u}"), "hi", 5.0));
            logs.push(RatingLog::new(&format!("u{u}"), "lo", 2.0));
        }
        logs.push(RatingLog::new("u0", "thin", 5.0)); // 1 rating → not robust
        let m = RatingsMatrix::from_logs(logs, RatingScale::new(1.0, 5.0).unwrap()).unwrap();
        let sm = knn_search(&m, 2, SimilarityMeasure::Jaccard).unwrap();
        let scorer = DefaultScorer::new(&m, DefaultMode::Collaborative);
        let empty = UserProfile::from_ratings(None, vec![], m.n_items());
        let out = recommend_top_n(&empty, &TopNRequest::new(3), &sm, &m, &scorer, None).unwrap();
        let hi = m.items().get("hi").unwrap();
        let lo = m.items().get("lo").unwrap();
        let thin = m.items().get("thin").unwrap();
        // Global mean ≈ 3.52 ranks "thin" (not robust) between the two.
        assert_eq!(out, vec![hi, thin, lo]);
    }

    #[test]
    fn full_catalog_respects_novelty_and_size() {
        let m = d1();
        let scorer = DefaultScorer::new(&m, DefaultMode::Collaborative);
        let u1 = m.users().get("u1").unwrap();
        let profile = UserProfile::from_matrix(&m, u1); // rated i1, i2
        let out = full_catalog_top_n(&profile, 10, &scorer, &m);
        assert_eq!(out, vec![m.items().get("i3").unwrap()]);
    }

    #[test]
    fn full_catalog_with_default_scorer_matches_popularity_on_robust_items() {
        // Every item robust (≥10 raters) → the default cascade ranks items
        // by (r̄_u + r̄_i)/2, a monotone transform of the robust-mean
        // popularity order.
        let mut logs = Vec::new();
        for u in 0..10 {
            logs.push(RatingLog::new(&format!("u{u}"), "a", 2.0));
            logs.push(RatingLog::new(&format!("u{u}"), "b", 5.0));
            logs.push(RatingLog::new(&format!("u{u}"), "c", 3.0));
        }
        logs.push(RatingLog::new("viewer", "c", 3.0));
        let m = RatingsMatrix::from_logs(logs, RatingScale::new(1.0, 5.0).unwrap()).unwrap();
        let viewer = m.users().get("viewer").unwrap();
        let profile = UserProfile::from_matrix(&m, viewer); // rated c
        let scorer = DefaultScorer::new(&m, DefaultMode::Collaborative);
        let by_scorer = full_catalog_top_n(&profile, 5, &scorer, &m);
        let by_popularity = popularity_top_n(&m, 5, &profile);
        assert_eq!(by_scorer, by_popularity);
    }

    #[test]
    fn invalid_requests_are_rejected() {
        let mut req = TopNRequest::new(0);
        assert!(req.validate().is_err());
        req.n = 1;
        req.tail_split = 1.0;
        assert!(req.validate().is_err());
        req.tail_split = 0.2;
        assert!(req.validate().is_ok());
    }
}
