//! Full-pipeline sanity on seeded synthetic data: the model family must
//! sort the way a working engine sorts — informed models beat the default
//! predictor, the default beats random, and factor-space neighborhoods
//! land between native neighborhoods and random ones. Only orderings are
//! asserted; absolute figures belong to dataset-specific runs.

use reco_core::eval::{evaluate_discovery, evaluate_scoring, DiscoveryStrategy};
use reco_core::gravity::{factor_similarity_matrix, train, FactorMeasure, GravityParams};
use reco_core::ratings::split_train_test;
use reco_core::synth::{synthesize, SynthConfig};
use reco_core::{
    compute_segments, knn_search, DefaultMode, DefaultScorer, GravityScorer, KnnScorer,
    RandomScorer, RatingsMatrix, ScoringMode, SegmentGrid, SimilarityMatrix, SimilarityMeasure,
};

struct Fixture {
    train: RatingsMatrix,
    test: RatingsMatrix,
    grid: SegmentGrid,
}

fn fixture() -> Fixture {
    let data = synthesize(&SynthConfig {
        users: 200,
        items: 120,
        logs: 6000,
        factors: 6,
        seed: 42,
    })
    .expect("synthetic corpus");
    let (train, test) = split_train_test(&data.logs, 0.1, 42).expect("split");
    let grid = compute_segments(&train).expect("segments");
    Fixture { train, test, grid }
}

fn rmse_of(f: &Fixture, scorer: &dyn reco_core::Scorer) -> f64 {
    evaluate_scoring(scorer, &f.train, &f.test, &f.grid).expect("evaluation").accuracy.rmse_out
}

#[test]
fn informed_models_beat_the_default_and_everything_beats_random() {
    let f = fixture();
    let sm = knn_search(&f.train, 50, SimilarityMeasure::WeightedPearson).unwrap();
    let knn = KnnScorer::new(&sm, &f.train, ScoringMode::MeanBased).unwrap();
    let model = train(
        &f.train,
        &GravityParams { factors: 8, ..GravityParams::default() },
    )
    .unwrap();
    let gravity = GravityScorer::new(&model, &f.train);
    let default = DefaultScorer::new(&f.train, DefaultMode::Collaborative);
    let random = RandomScorer::new(f.train.scale(), 42);

    let rmse_knn = rmse_of(&f, &knn);
    let rmse_gravity = rmse_of(&f, &gravity);
    let rmse_default = rmse_of(&f, &default);
    let rmse_random = rmse_of(&f, &random);

    assert!(
        rmse_knn < rmse_default,
        "neighborhood model must beat the default predictor: {rmse_knn} vs {rmse_default}"
    );
    assert!(
        rmse_gravity < rmse_default,
        "factor model must beat the default predictor: {rmse_gravity} vs {rmse_default}"
    );
    assert!(
        rmse_default < rmse_random,
        "the default predictor must beat random: {rmse_default} vs {rmse_random}"
    );
}

#[test]
fn factor_space_neighborhoods_sit_between_native_and_random() {
    let f = fixture();
    let native_sm = knn_search(&f.train, 50, SimilarityMeasure::WeightedPearson).unwrap();
    let model = train(
        &f.train,
        &GravityParams { factors: 8, ..GravityParams::default() },
    )
    .unwrap();
    let emulated_sm = factor_similarity_matrix(&model, 50, FactorMeasure::Pearson).unwrap();
    let random_sm =
        SimilarityMatrix::random(f.train.items(), 50, 42, &f.train.fingerprint());

    let native =
        rmse_of(&f, &KnnScorer::new(&native_sm, &f.train, ScoringMode::MeanBased).unwrap());
    let emulated =
        rmse_of(&f, &KnnScorer::new(&emulated_sm, &f.train, ScoringMode::MeanBased).unwrap());
    let random =
        rmse_of(&f, &KnnScorer::new(&random_sm, &f.train, ScoringMode::MeanBased).unwrap());

    assert!(
        native <= emulated,
        "native neighborhoods must not lose to emulated ones: {native} vs {emulated}"
    );
    assert!(
        emulated < random,
        "factor-space neighborhoods must carry real signal: {emulated} vs random {random}"
    );
}

#[test]
fn recommendation_quality_orders_knn_above_random() {
    let f = fixture();
    let sm = knn_search(&f.train, 50, SimilarityMeasure::WeightedPearson).unwrap();
    let knn = KnnScorer::new(&sm, &f.train, ScoringMode::MeanBased).unwrap();
    let random = RandomScorer::new(f.train.scale(), 42);
    let strategy = DiscoveryStrategy::FullCatalog { n: 10 };

    let knn_eval = evaluate_discovery(&knn, &f.train, &f.test, &f.grid, &strategy).unwrap();
    let random_eval =
        evaluate_discovery(&random, &f.train, &f.test, &f.grid, &strategy).unwrap();

    let knn_precision = knn_eval.global.precision.expect("knn lists must be judgeable");
    let random_precision =
        random_eval.global.precision.expect("random lists must be judgeable");
    assert!(
        knn_precision > random_precision,
        "precision: knn {knn_precision} vs random {random_precision}"
    );

    let knn_ami = knn_eval.global.ami.expect("knn impact");
    let random_ami = random_eval.global.ami.expect("random impact");
    assert!(
        random_ami < knn_ami,
        "popularity impact: random {random_ami} must trail knn {knn_ami}"
    );
    assert!(
        random_ami < 0.0,
        "random lists push unpopular unrated items, so their impact is negative: {random_ami}"
    );
}
