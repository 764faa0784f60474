//! Evaluation report assembly and serialization.
//!
//! A report is run metadata plus a flat list of records, one per
//! task × metric × segment. Two writers exist: an aligned text document
//! for reading, and a TSV for spreadsheets and the cross-model summary.
//! Wall-clock time lives only in metadata and never in the TSV, so a
//! rerun with the same seeds produces a byte-identical records file.

use std::fs;
use std::path::Path;

use super::discovery::DiscoveryEvaluation;
use super::scoring::ScoringEvaluation;
use crate::error::{Error, Result};
use crate::segments::Segment;

/// Identity of one evaluation run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunMeta {
    /// Scorer label, e.g. `knn-wpearson-mean-based`.
    pub model: String,
    /// Fold tag, e.g. `fold0` or `split-0.1-seed7`.
    pub fold: String,
    pub seed: u64,
    /// Total evaluation time. Metadata only; excluded from both written
    /// report forms so reruns are byte-identical.
    pub wall_clock_s: f64,
    /// Hash of the resolved configuration that produced the run.
    pub config_hash: String,
    pub train_fingerprint: String,
    pub test_fingerprint: String,
}

/// One measured value.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    /// decide | compare | discover | explore.
    pub task: String,
    pub metric: String,
    /// global, HP, HU, LP, LU, Huser, or Luser.
    pub segment: String,
    pub value: f64,
    /// Supporting count (test logs, preference pairs, evaluable pairs).
    pub count: u64,
}

/// Assembled report: metadata, free-form notes, records.
#[derive(Debug, Clone, Default)]
pub struct EvaluationReport {
    pub meta: RunMeta,
    pub notes: Vec<String>,
    pub records: Vec<Record>,
}

/// The headline metric per task for cross-model comparison, and whether
/// higher is better.
pub fn headline_metric(task: &str) -> Option<(&'static str, bool)> {
    match task {
        "decide" => Some(("rmse_out", false)),
        "compare" => Some(("percent_compatible", true)),
        "discover" => Some(("precision", true)),
        "explore" => Some(("ami", true)),
        _ => None,
    }
}

const TEXT_HEADER: &str = "# reco evaluation report v1";
const TSV_SCHEMA: &str = "# schema: reco-report-v1";

/// Segment label for ranking's user-activity marginals.
fn activity_name(index: usize) -> &'static str {
    if index == 0 {
        "Huser"
    } else {
        "Luser"
    }
}

impl EvaluationReport {
    pub fn new(meta: RunMeta) -> EvaluationReport {
        EvaluationReport { meta, notes: Vec::new(), records: Vec::new() }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn push(&mut self, task: &str, metric: &str, segment: &str, value: f64, count: u64) {
        self.records.push(Record {
            task: task.into(),
            metric: metric.into(),
            segment: segment.into(),
            value,
            count,
        });
    }

    /// Flattens a scoring evaluation into decide (accuracy) and compare
    /// (ranking) records.
    pub fn push_scoring(&mut self, eval: &ScoringEvaluation) {
        let mut accuracy = |segment: &str, acc: &crate::eval::InOutAccuracy| {
            let n = acc.n as u64;
            self.push("decide", "rmse_out", segment, acc.rmse_out, n);
            self.push("decide", "mae_out", segment, acc.mae_out, n);
            if let (Some(rmse_in), Some(mae_in)) = (acc.rmse_in, acc.mae_in) {
                self.push("decide", "rmse_in", segment, rmse_in, acc.n_main as u64);
                self.push("decide", "mae_in", segment, mae_in, acc.n_main as u64);
            }
            self.push("decide", "coverage", segment, acc.coverage, n);
        };
        accuracy("global", &eval.accuracy);
        for seg in Segment::ALL {
            if let Some(acc) = &eval.accuracy_per_segment[seg.index()] {
                accuracy(seg.name(), acc);
            }
        }
        if let Some(est) = eval.rmse_estimated {
            self.push("decide", "rmse_estimated", "global", est, eval.n_test as u64);
        }

        let mut ranking = |segment: &str, stats: &crate::eval::NdpmStats| {
            let pairs = stats.pairs.total;
            self.push("compare", "ndpm", segment, stats.ndpm, pairs);
            self.push("compare", "percent_compatible", segment, stats.percent_compatible, pairs);
            self.push(
                "compare",
                "pairs_contradictory",
                segment,
                stats.pairs.contradictory as f64,
                pairs,
            );
            self.push("compare", "pairs_tied", segment, stats.pairs.tied as f64, pairs);
        };
        if let Some(stats) = &eval.ranking.global {
            ranking("global", stats);
        }
        for seg in Segment::ALL {
            if let Some(stats) = &eval.ranking.per_segment[seg.index()] {
                ranking(seg.name(), stats);
            }
        }
        for (idx, stats) in eval.ranking.by_user_activity.iter().enumerate() {
            if let Some(stats) = stats {
                ranking(activity_name(idx), stats);
            }
        }
    }

    /// Flattens a discovery evaluation under the given task name
    /// (`discover` for full-catalog lists, `explore` for seeded walks).
    pub fn push_discovery(&mut self, task: &str, eval: &DiscoveryEvaluation) {
        let cell = |this: &mut Self, segment: &str, c: &crate::eval::DiscoveryCell| {
            let h = c.evaluable as u64;
            if let Some(p) = c.precision {
                this.push(task, "precision", segment, p, h);
            }
            if let Some(a) = c.ami {
                this.push(task, "ami", segment, a, h);
            }
            this.push(task, "smi", segment, c.smi, h);
            this.push(task, "relevant", segment, c.relevant as f64, h);
        };
        cell(self, "global", &eval.global);
        for seg in Segment::ALL {
            cell(self, seg.name(), &eval.per_segment[seg.index()]);
        }
        self.push(task, "recommendations", "global", eval.recommendations as f64, eval.users as u64);
        self.push(
            task,
            "users_unjudgeable",
            "global",
            eval.users_unjudgeable as f64,
            eval.users as u64,
        );
    }

    /// Writes the aligned, human-readable document. Like the TSV it is
    /// byte-identical across reruns: wall-clock time stays out of it and
    /// lives only in sidecar metadata and console output.
    pub fn write_text(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(TEXT_HEADER);
        out.push('\n');
        for (key, value) in self.meta_pairs() {
            out.push_str(&format!("{key}: {value}\n"));
        }
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out.push('\n');
        let widths = self.records.iter().fold([4usize, 6, 7], |w, r| {
            [w[0].max(r.task.len()), w[1].max(r.metric.len()), w[2].max(r.segment.len())]
        });
        out.push_str(&format!(
            "{:<w0$}  {:<w1$}  {:<w2$}  {:>18}  {:>10}\n",
            "task",
            "metric",
            "segment",
            "value",
            "count",
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
        ));
        for r in &self.records {
            out.push_str(&format!(
                "{:<w0$}  {:<w1$}  {:<w2$}  {:>18.6}  {:>10}\n",
                r.task,
                r.metric,
                r.segment,
                r.value,
                r.count,
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
            ));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Writes the machine-readable records file. Deterministic for fixed
    /// seeds: no timestamps, full-precision values.
    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(TSV_SCHEMA);
        out.push('\n');
        for (key, value) in self.meta_pairs() {
            out.push_str(&format!("# {key}: {value}\n"));
        }
        for note in &self.notes {
            out.push_str(&format!("# note: {note}\n"));
        }
        out.push_str("task\tmetric\tsegment\tvalue\tcount\n");
        for r in &self.records {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.task, r.metric, r.segment, r.value, r.count
            ));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    fn meta_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("model", self.meta.model.clone()),
            ("fold", self.meta.fold.clone()),
            ("seed", self.meta.seed.to_string()),
            ("config_hash", self.meta.config_hash.clone()),
            ("train_fingerprint", self.meta.train_fingerprint.clone()),
            ("test_fingerprint", self.meta.test_fingerprint.clone()),
        ]
    }

    /// Reads a TSV written by [`EvaluationReport::write_tsv`].
    /// Wall-clock time is not stored there and comes back as 0.
    pub fn read_tsv(path: &Path) -> Result<EvaluationReport> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let path_str = path.display().to_string();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, first)) if first == TSV_SCHEMA => {}
            _ => {
                return Err(Error::artifact(path_str, format!("expected '{TSV_SCHEMA}' header")))
            }
        }
        let mut report = EvaluationReport::default();
        let mut seen_columns = false;
        for (idx, line) in lines {
            let line_no = idx + 1;
            if let Some(meta) = line.strip_prefix("# ") {
                let Some((key, value)) = meta.split_once(": ") else {
                    return Err(Error::parse(&path_str, line_no, "malformed metadata line"));
                };
                match key {
                    "model" => report.meta.model = value.to_string(),
                    "fold" => report.meta.fold = value.to_string(),
                    "seed" => {
                        report.meta.seed = value.parse().map_err(|_| {
                            Error::parse(&path_str, line_no, "seed is not an integer")
                        })?;
                    }
                    "config_hash" => report.meta.config_hash = value.to_string(),
                    "train_fingerprint" => report.meta.train_fingerprint = value.to_string(),
                    "test_fingerprint" => report.meta.test_fingerprint = value.to_string(),
                    "note" => report.notes.push(value.to_string()),
                    _ => {}
                }
                continue;
            }
            if !seen_columns {
                if line != "task\tmetric\tsegment\tvalue\tcount" {
                    return Err(Error::parse(&path_str, line_no, "missing column header"));
                }
                seen_columns = true;
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 5 {
                return Err(Error::parse(
                    &path_str,
                    line_no,
                    format!("expected 5 tab-separated fields, got {}", fields.len()),
                ));
            }
            report.records.push(Record {
                task: fields[0].to_string(),
                metric: fields[1].to_string(),
                segment: fields[2].to_string(),
                value: fields[3]
                    .parse()
                    .map_err(|_| Error::parse(&path_str, line_no, "value is not a number"))?,
                count: fields[4]
                    .parse()
                    .map_err(|_| Error::parse(&path_str, line_no, "count is not an integer"))?,
            });
        }
        if !seen_columns {
            return Err(Error::artifact(path_str, "no records table"));
        }
        Ok(report)
    }

    /// Looks up one record's value.
    pub fn value_of(&self, task: &str, metric: &str, segment: &str) -> Option<f64> {
        self.records
            .iter()
            .find(|r| r.task == task && r.metric == metric && r.segment == segment)
            .map(|r| r.value)
    }
}
