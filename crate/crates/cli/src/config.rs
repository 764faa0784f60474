//! Resolved run configuration.
//!
//! One plain-text file of `key=value` lines (# comments allowed), then
//! command-line flags override individual keys. The fully resolved listing
//! is canonical: its SHA-256 prefix is stamped into every artifact and
//! report this run produces, so any two outputs can be checked for having
//! come from the same settings.

use std::path::Path;

use reco_core::eval::{ColdStartMode, ProfileRegime};
use reco_core::ratings::{LogFormat, SplitStrategy};
use reco_core::{
    Error, FactorMeasure, GravityParams, RatingScale, Result, ScoringMode, SimilarityMeasure,
};

#[derive(Debug, Clone)]
pub struct Config {
    pub scale_min: f64,
    pub scale_max: f64,
    pub format: LogFormat,
    pub seed: u64,
    pub test_fraction: f64,
    pub split_strategy: SplitStrategy,
    pub knn_k: usize,
    pub knn_measure: SimilarityMeasure,
    pub scoring: ScoringMode,
    pub factors: usize,
    pub learning_rate: f64,
    pub regularization: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub validation_fraction: f64,
    pub clamp: f64,
    pub init_range: f64,
    pub use_bias: bool,
    pub factor_measure: FactorMeasure,
    pub top_n: usize,
    pub top_g: usize,
    pub top_c: usize,
    pub top_d: usize,
    pub tail_split: f64,
    pub coldstart_counts: Vec<usize>,
    pub coldstart_regime: ProfileRegime,
    pub coldstart_modes: Vec<ColdStartMode>,
    pub coldstart_k: usize,
}

impl Default for Config {
    fn default() -> Config {
        let g = GravityParams::default();
        Config {
            scale_min: 1.0,
            scale_max: 5.0,
            format: LogFormat::Tsv,
            seed: 42,
            test_fraction: 0.1,
            split_strategy: SplitStrategy::PerUser,
            knn_k: 200,
            knn_measure: SimilarityMeasure::WeightedPearson,
            scoring: ScoringMode::MeanBased,
            factors: g.factors,
            learning_rate: g.learning_rate,
            regularization: g.regularization,
            max_epochs: g.max_epochs,
            patience: g.patience,
            validation_fraction: g.validation_fraction,
            clamp: g.clamp,
            init_range: g.init_range,
            use_bias: g.use_bias,
            factor_measure: FactorMeasure::Pearson,
            top_n: 10,
            top_g: 10,
            top_c: 100,
            top_d: 1,
            tail_split: 0.2,
            coldstart_counts: vec![100, 500, 1000, 3000],
            coldstart_regime: ProfileRegime::Long,
            coldstart_modes: vec![
                ColdStartMode::Collaborative,
                ColdStartMode::Thematic,
                ColdStartMode::HybridLight,
            ],
            coldstart_k: 20,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParam(format!("bad value '{value}' for key '{key}'")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|part| parse(key, part.trim())).collect()
}

fn format_token(f: LogFormat) -> &'static str {
    match f {
        LogFormat::Tsv => "tsv",
        LogFormat::MovieLens => "movielens",
    }
}

fn strategy_token(s: SplitStrategy) -> &'static str {
    match s {
        SplitStrategy::PerUser => "per-user",
        SplitStrategy::Global => "global",
    }
}

fn scoring_token(s: ScoringMode) -> &'static str {
    match s {
        ScoringMode::MeanBased => "mean-based",
        ScoringMode::MonoUser => "mono-user",
    }
}

impl Config {
    /// Loads a config file over the defaults. Lines are `key=value`;
    /// blank lines and `#` comments are skipped.
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let shown = path.display().to_string();
        let mut config = Config::default();
        for (idx, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(Error::parse(&shown, idx + 1, format!("expected key=value, got '{trimmed}'")));
            };
            config
                .set(key.trim(), value.trim())
                .map_err(|e| Error::parse(&shown, idx + 1, e.to_string()))?;
        }
        Ok(config)
    }

    /// Sets one key from its text form. Used for file lines and flag
    /// overrides alike, so both spell settings identically.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scale_min" => self.scale_min = parse(key, value)?,
            "scale_max" => self.scale_max = parse(key, value)?,
            "format" => self.format = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "test_fraction" => self.test_fraction = parse(key, value)?,
            "split_strategy" => self.split_strategy = parse(key, value)?,
            "knn_k" => self.knn_k = parse(key, value)?,
            "knn_measure" => self.knn_measure = parse(key, value)?,
            "scoring" => self.scoring = parse(key, value)?,
            "factors" => self.factors = parse(key, value)?,
            "learning_rate" => self.learning_rate = parse(key, value)?,
            "regularization" => self.regularization = parse(key, value)?,
            "max_epochs" => self.max_epochs = parse(key, value)?,
            "patience" => self.patience = parse(key, value)?,
            "validation_fraction" => self.validation_fraction = parse(key, value)?,
            "clamp" => self.clamp = parse(key, value)?,
            "init_range" => self.init_range = parse(key, value)?,
            "use_bias" => self.use_bias = parse(key, value)?,
            "factor_measure" => self.factor_measure = parse(key, value)?,
            "top_n" => self.top_n = parse(key, value)?,
            "top_g" => self.top_g = parse(key, value)?,
            "top_c" => self.top_c = parse(key, value)?,
            "top_d" => self.top_d = parse(key, value)?,
            "tail_split" => self.tail_split = parse(key, value)?,
            "coldstart_counts" => self.coldstart_counts = parse_list(key, value)?,
            "coldstart_regime" => self.coldstart_regime = parse(key, value)?,
            "coldstart_modes" => self.coldstart_modes = parse_list(key, value)?,
            "coldstart_k" => self.coldstart_k = parse(key, value)?,
            other => return Err(Error::InvalidParam(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn scale(&self) -> Result<RatingScale> {
        RatingScale::new(self.scale_min, self.scale_max)
    }

    pub fn gravity_params(&self) -> GravityParams {
        GravityParams {
            factors: self.factors,
            learning_rate: self.learning_rate,
            regularization: self.regularization,
            max_epochs: self.max_epochs,
            patience: self.patience,
            time_cap: None,
            validation_fraction: self.validation_fraction,
            clamp: self.clamp,
            init_range: self.init_range,
            use_bias: self.use_bias,
            seed: self.seed,
        }
    }

    /// The canonical listing: every key in fixed alphabetical order.
    pub fn resolved_lines(&self) -> Vec<String> {
        let counts: Vec<String> = self.coldstart_counts.iter().map(usize::to_string).collect();
        let modes: Vec<&str> = self.coldstart_modes.iter().map(|m| m.token()).collect();
        vec![
            format!("clamp={}", self.clamp),
            format!("coldstart_counts={}", counts.join(",")),
            format!("coldstart_k={}", self.coldstart_k),
            format!("coldstart_modes={}", modes.join(",")),
            format!("coldstart_regime={}", self.coldstart_regime.token()),
            format!("factor_measure={}", self.factor_measure.token()),
            format!("factors={}", self.factors),
            format!("format={}", format_token(self.format)),
            format!("init_range={}", self.init_range),
            format!("knn_k={}", self.knn_k),
            format!("knn_measure={}", self.knn_measure.token()),
            format!("learning_rate={}", self.learning_rate),
            format!("max_epochs={}", self.max_epochs),
            format!("patience={}", self.patience),
            format!("regularization={}", self.regularization),
            format!("scale_max={}", self.scale_max),
            format!("scale_min={}", self.scale_min),
            format!("scoring={}", scoring_token(self.scoring)),
            format!("seed={}", self.seed),
            format!("split_strategy={}", strategy_token(self.split_strategy)),
            format!("tail_split={}", self.tail_split),
            format!("test_fraction={}", self.test_fraction),
            format!("top_c={}", self.top_c),
            format!("top_d={}", self.top_d),
            format!("top_g={}", self.top_g),
            format!("top_n={}", self.top_n),
            format!("use_bias={}", self.use_bias),
            format!("validation_fraction={}", self.validation_fraction),
        ]
    }

    /// Twelve hex characters of SHA-256 over the resolved listing.
    pub fn hash(&self) -> String {
        reco_core::fingerprint_bytes(self.resolved_lines().join("\n").as_bytes())[..12].to_string()
    }
}
