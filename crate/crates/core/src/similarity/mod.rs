//! Item-item similarity: measures, top-K search, and the neighbor-list
//! matrix artifact.

mod knn;
mod matrix;
mod measure;

pub use knn::{knn_search, knn_search_multi};
pub use matrix::SimilarityMatrix;
pub use measure::{pair_similarity, SimilarityMeasure};

pub(crate) use matrix::rank_row;
