use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use copula_is::harness::config::{Algorithm, ExperimentConfig, ProposalMethod};
use copula_is::harness::fixtures::{compare_report, verify_tables};
use copula_is::harness::Experiment;
use copula_is::proposal::MixingDistribution;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Importance sampling for copula models.
#[derive(Parser)]
#[command(name = "copula-is", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the proposal mixes and print them as a config `[proposal]` table.
    Calibrate(Common),
    /// Write proposal draws with their weights as CSV.
    Sample(Common),
    /// Run a single repetition and print each estimate with its standard error.
    Estimate(Common),
    /// Run the repetition battery and write per-repetition estimates as CSV.
    Benchmark {
        #[command(flatten)]
        common: Common,
        /// Where to write the summary; stderr by default.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Check calibration against the published tables; with a config, also
    /// run it and compare against the published case-study figures.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    /// Draws per repetition.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated subset of mc, rejection, direct.
    #[arg(long)]
    algorithm: Option<String>,
    /// Output file; stdout by default.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let Some(path) = &self.config else { bail!("--config is required") };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: ExperimentConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(reps) = self.reps {
            cfg.reps = reps;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(threads) = self.threads {
            cfg.threads = threads;
        }
        if let Some(list) = &self.algorithm {
            cfg.algorithms = list.split(',').map(|s| Algorithm::parse(s.trim())).collect::<copula_is::Result<_>>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out(&self, cfg: &ExperimentConfig) -> Option<PathBuf> {
        self.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from))
    }
}

fn emit(path: Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ProposalTable {
    method: ProposalMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    rejection_mix: Option<MixingDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    direct_mix: Option<MixingDistribution>,
}

#[derive(Serialize)]
struct ProposalOnly {
    proposal: ProposalTable,
}

fn calibrate(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let exp = Experiment::prepare(&cfg)?;
    let table = ProposalOnly {
        proposal: ProposalTable {
            method: ProposalMethod::Explicit,
            rejection_mix: exp.mix(Algorithm::Rejection).cloned(),
            direct_mix: exp.mix(Algorithm::Direct).cloned(),
        },
    };
    emit(common.out(&cfg), &toml::to_string(&table)?)
}

fn sample(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let [alg] = cfg.algorithms[..] else { bail!("sample needs exactly one --algorithm") };
    let exp = Experiment::prepare(&cfg)?;
    let draws = exp.draw(alg, 0, cfg.n)?;
    let d = exp.copula().dim();
    let mut out = String::new();
    for j in 1..=d {
        write!(out, "u{j},")?;
    }
    out.push_str("weight,lambda,draws_used,branch\n");
    for s in &draws {
        for v in &s.v {
            write!(out, "{v},")?;
        }
        let branch = s.branch.map(|b| b.to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{branch}", s.weight, s.lambda, s.draws_used)?;
    }
    emit(common.out(&cfg), &out)
}

fn estimate(common: &Common) -> Result<()> {
    let cfg = common.load()?;
    let exp = Experiment::prepare(&cfg)?;
    let mut out = String::from("functional,algorithm,estimate,se,draws_used_mean\n");
    let names: Vec<String> = cfg.functionals.iter().map(|f| f.name()).collect();
    for &alg in &cfg.algorithms {
        let rep = exp.repetition(alg, 0)?;
        for (i, name) in names.iter().enumerate() {
            let se = rep.ses[i].map(|s| s.to_string()).unwrap_or_default();
            writeln!(out, "{name},{alg},{},{se},{}", rep.estimates[i], rep.draws_used_mean)?;
        }
    }
    emit(common.out(&cfg), &out)
}

fn benchmark(common: &Common, summary: Option<PathBuf>) -> Result<()> {
    let cfg = common.load()?;
    let report = Experiment::prepare(&cfg)?.run()?;
    let text = report.summary_text()?;
    emit(common.out(&cfg), &report.to_csv())?;
    match summary {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => eprint!("{text}"),
    }
    Ok(())
}

fn verify(common: &Common) -> Result<bool> {
    let mut ok = true;
    for c in verify_tables()? {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    if common.config.is_some() {
        let cfg = common.load()?;
        let report = Experiment::prepare(&cfg)?.run()?;
        let parameter = cfg.copula.parameter.unwrap_or(f64::NAN);
        for line in compare_report(&report, cfg.copula.family, parameter, cfg.dim()?) {
            println!("{line}");
        }
    }
    Ok(ok)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Calibrate(c) => calibrate(&c),
        Command::Sample(c) => sample(&c),
        Command::Estimate(c) => estimate(&c),
        Command::Benchmark { common, summary } => benchmark(&common, summary),
        Command::Verify { common } => {
            if verify(&common)? {
                Ok(())
            } else {
                bail!("verification failed")
            }
        }
    }
}
