//! Hybrid recommender engine and offline evaluation harness.
//!
//! The crate stores explicit rating logs in a dual-indexed
//! [`RatingsMatrix`], builds item-item [`SimilarityMatrix`] artifacts from
//! eight rating-overlap measures or from a trained [`FactorModel`]'s item
//! vectors, and scores unseen items through [`Scorer`] implementations:
//! neighborhood scoring over a similarity matrix ([`KnnScorer`]), the
//! trained factor model ([`GravityScorer`]), a default predictor cascade
//! ([`DefaultScorer`]), and a seeded uniform baseline ([`RandomScorer`]).
//! Item descriptions ([`DescriptorCatalog`]) feed the same machinery for
//! thematic ("more like this one") recommendation that works without any
//! rating overlap.
//!
//! The [`eval`] module measures any scorer on held-out logs across four
//! tasks — rating accuracy, pairwise ranking, full-catalog Top-N, and
//! seeded Top-N — each broken down over the user-activity ×
//! item-popularity [`SegmentGrid`], plus a cold-start protocol that
//! replays accuracy over growing user samples. [`synth`] generates seeded
//! datasets for benches and pipeline tests.
//!
//! Determinism is a contract throughout: fixed seeds and inputs produce
//! bit-identical artifacts regardless of thread count, and every
//! split/model/report records the fingerprints of what produced it.

pub mod catalog;
pub mod error;
pub mod eval;
pub mod fingerprint;
pub mod gravity;
pub mod ids;
pub mod predict;
pub mod profile;
pub mod ratings;
pub mod segments;
pub mod similarity;
pub mod synth;
pub mod topn;

pub use catalog::{load_catalog, AttributeDictionary, DescriptorCatalog, DescriptorRef};
pub use error::{Error, Result};
pub use fingerprint::{fingerprint_bytes, Fingerprint};
pub use gravity::{
    factor_similarity_matrix, EpochStats, FactorMeasure, FactorModel, GravityParams,
    GravityScorer,
};
pub use ids::{same_universe, IdMap};
pub use predict::{
    DefaultMode, DefaultScorer, Explanation, KnnScorer, Origin, Prediction, RandomScorer, Scorer,
    ScoringMode,
};
pub use profile::UserProfile;
pub use ratings::{
    kfold, load_logs, read_logs, split_train_test, split_train_test_with, Entry, LogDate,
    LogFormat, RatingLog, RatingScale, RatingsMatrix, SplitStrategy, ROBUST_MIN_SUPPORT,
};
pub use segments::{compute_segments, Segment, SegmentGrid};
pub use similarity::{knn_search, knn_search_multi, pair_similarity, SimilarityMatrix, SimilarityMeasure};
pub use topn::{
    full_catalog_top_n, popularity_top_n, recommend_top_n, similar_items, SeedRecency,
    ShortHeadSet, TailMode, TopNRequest,
};
