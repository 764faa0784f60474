//! `reco report` — fold one or more evaluation tables into a comparison
//! summary with per-segment winners.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use reco_core::eval::{headline_metric, EvaluationReport};
use reco_core::{Error, Result};

use crate::artifacts::{resolve_out, write_meta};
use crate::config::Config;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Evaluation tables (`*.report.tsv`) to summarize.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    /// Summary destination (default: <output root>/summary.txt).
    #[arg(long)]
    out: Option<PathBuf>,
}

const TASKS: [&str; 4] = ["decide", "compare", "discover", "explore"];
const SEGMENTS: [&str; 5] = ["global", "HP", "HU", "LP", "LU"];

pub fn run(base: &Config, args: &ReportArgs) -> Result<()> {
    let config = super::finish_config(base, &[])?;
    let mut reports = Vec::with_capacity(args.reports.len());
    for path in &args.reports {
        reports.push(EvaluationReport::read_tsv(path)?);
    }
    // Deterministic row order regardless of how the paths were listed.
    reports.sort_by(|a, b| {
        (&a.meta.model, &a.meta.fold, &a.meta.config_hash).cmp(&(
            &b.meta.model,
            &b.meta.fold,
            &b.meta.config_hash,
        ))
    });
    let mut groups: Vec<(String, String)> = reports
        .iter()
        .map(|r| (r.meta.train_fingerprint.clone(), r.meta.test_fingerprint.clone()))
        .collect();
    groups.sort();
    groups.dedup();

    let text = render(&config, &reports, &groups);
    print!("{text}");
    let out = resolve_out(args.out.as_deref(), "summary.txt")?;
    std::fs::write(&out, &text).map_err(|e| Error::io(&out, e))?;
    let named: Vec<(String, String)> = groups
        .iter()
        .enumerate()
        .map(|(i, (train, test))| (format!("group{i}"), format!("{train}/{test}")))
        .collect();
    let inputs: Vec<(&str, &str)> =
        named.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    write_meta(&out, &config.hash(), &inputs)?;
    println!("wrote: {}", out.display());
    Ok(())
}

fn render(
    config: &Config,
    reports: &[EvaluationReport],
    groups: &[(String, String)],
) -> String {
    let mut text = String::new();
    text.push_str("# reco run summary v1\n");
    let _ = writeln!(text, "# config_hash: {}", config.hash());
    let _ = writeln!(text, "reports: {}", reports.len());
    let _ = writeln!(text, "train/test fingerprint groups: {}", groups.len());
    if groups.len() > 1 {
        text.push_str(
            "note: inputs span multiple train/test datasets; values are not directly comparable\n",
        );
    }
    let model_w = reports.iter().map(|r| r.meta.model.len()).chain([5]).max().unwrap();
    let fold_w = reports.iter().map(|r| r.meta.fold.len()).chain([4]).max().unwrap();
    for task in TASKS {
        let Some((metric, higher_better)) = headline_metric(task) else {
            continue;
        };
        let rows: Vec<&EvaluationReport> = reports
            .iter()
            .filter(|r| r.records.iter().any(|rec| rec.task == task))
            .collect();
        if rows.is_empty() {
            continue;
        }
        let direction = if higher_better { "higher is better" } else { "lower is better" };
        let _ = writeln!(text, "\n## {task} — {metric} ({direction})");
        let _ = write!(text, "{:<model_w$}  {:<fold_w$}", "model", "fold");
        for seg in SEGMENTS {
            let _ = write!(text, "  {seg:>12}");
        }
        text.push('\n');
        for r in &rows {
            let _ = write!(text, "{:<model_w$}  {:<fold_w$}", r.meta.model, r.meta.fold);
            for seg in SEGMENTS {
                match r.value_of(task, metric, seg) {
                    Some(v) => {
                        let _ = write!(text, "  {v:>12.6}");
                    }
                    None => {
                        let _ = write!(text, "  {:>12}", "-");
                    }
                }
            }
            text.push('\n');
        }
        for seg in SEGMENTS {
            let best = rows
                .iter()
                .filter_map(|r| r.value_of(task, metric, seg).map(|v| (r, v)))
                .filter(|(_, v)| v.is_finite())
                .reduce(|a, b| {
                    let b_better = if higher_better { b.1 > a.1 } else { b.1 < a.1 };
                    if b_better {
                        b
                    } else {
                        a
                    }
                });
            if let Some((r, v)) = best {
                let _ = writeln!(text, "best {seg}: {} ({v:.6})", r.meta.model);
            }
        }
    }
    text
}
