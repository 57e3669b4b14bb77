use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use governing_pattern::harness::{
    fit_from_spec, ingest_csv, pattern_to_csv, run_from_spec, run_matrix, MatrixSpec, PatternFile,
    RateMode, RunReport, Settings,
};
use governing_pattern::QueryStrategy;

#[derive(Parser)]
#[command(name = "govpat", version, about = "Stream classification with governing patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a pattern on the training split and save it as JSON.
    Fit {
        #[command(flatten)]
        common: Common,
    },
    /// Run one classification session and write its report.
    Run {
        #[command(flatten)]
        common: Common,
        /// Also write a one-line CSV summary here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Repeat sessions over a grid of rates, strategies and budgets.
    Matrix {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "fixed:1")]
        rates: Vec<RateMode>,
        #[arg(long, value_delimiter = ',', default_value = "linear,exponential,fixed-period")]
        strategies: Vec<QueryStrategy>,
        /// `BUDGET/WINDOW` pairs.
        #[arg(long, value_delimiter = ',', default_value = "30/100", value_parser = parse_budget)]
        budgets: Vec<(usize, usize)>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Summarise a saved pattern, or dump its points as CSV.
    Inspect {
        pattern: PathBuf,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Args)]
struct Common {
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

impl Common {
    fn settings(&self) -> Result<Settings> {
        let base = match &self.config {
            Some(p) => Settings::from_toml_file(p).with_context(|| format!("reading {}", p.display()))?,
            None => Settings::default(),
        };
        Ok(base.overridden_by(&self.settings))
    }
}

fn parse_budget(s: &str) -> Result<(usize, usize), String> {
    let (b, w) = s.split_once('/').ok_or_else(|| format!("expected BUDGET/WINDOW, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{s}`: {e}"));
    Ok((parse(b)?, parse(w)?))
}

fn in_file(p: &Path) -> String {
    format!("processing {}", p.display())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Fit { common } => {
            let s = common.settings()?;
            let spec = s.stream_spec()?;
            let file = fit_from_spec(&spec, &s.run_config()?).with_context(|| in_file(&spec.source))?;
            emit(common.out.as_deref(), &serde_json::to_string_pretty(&file)?)
        }
        Command::Run { common, csv } => {
            let s = common.settings()?;
            let spec = s.stream_spec()?;
            let report = run_from_spec(&spec, &s.run_config()?).with_context(|| in_file(&spec.source))?;
            if let Some(p) = csv {
                let text = format!("{}\n{}\n", RunReport::CSV_HEADER, report.summary_row());
                std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
            }
            emit(common.out.as_deref(), &serde_json::to_string_pretty(&report)?)
        }
        Command::Matrix {
            common,
            rates,
            strategies,
            budgets,
            csv,
        } => {
            let s = common.settings()?;
            let spec = s.stream_spec()?;
            let cfg = s.run_config()?;
            for r in &rates {
                r.validate()?;
            }
            let stream = ingest_csv(&spec.source, &spec.columns).with_context(|| in_file(&spec.source))?;
            let grid = MatrixSpec {
                rates,
                strategies,
                budgets,
                split_fraction: spec.split_fraction,
            };
            let report = run_matrix(&stream, &grid, &cfg);
            if let Some(p) = csv {
                std::fs::write(&p, report.to_csv()).with_context(|| format!("writing {}", p.display()))?;
            }
            emit(common.out.as_deref(), &serde_json::to_string_pretty(&report)?)
        }
        Command::Inspect { pattern, csv } => {
            let file = PatternFile::load(&pattern).with_context(|| format!("loading {}", pattern.display()))?;
            if csv {
                print!("{}", pattern_to_csv(&file));
                return Ok(());
            }
            let p = &file.pattern;
            println!("features: {}", file.feature_names.join(", "));
            println!("time span: {} .. {}", p.t_start(), p.t_end());
            for c in p.curves() {
                let name = file.class_names.get(c.class_id()).map_or("?", String::as_str);
                println!(
                    "class {} ({name}): {} points, t {} .. {}",
                    c.class_id(),
                    c.len(),
                    c.t_first(),
                    c.t_last()
                );
            }
            Ok(())
        }
    }
}
