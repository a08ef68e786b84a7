use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shadows_core::harness::{
    cmd_estimate, cmd_norm, cmd_sweep, presets, validate, write_sweep_csv, write_sweep_json,
    CampaignConfig, Empirical, EstimateOptions, HarnessError, OutputFormat, SweepAxis,
    SweepOptions,
};

#[derive(Parser)]
#[command(name = "shadows", version, about = "Classical shadows with locally entangled measurements")]
struct Cli {
    /// Sampling threads (0 picks the number of cores).
    #[arg(long, global = true, env = "SHADOWS_WORKERS", default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct CampaignArgs {
    /// Campaign config (JSON).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset campaign instead of a config file.
    #[arg(long)]
    preset: Option<String>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per protocol; overrides the config.
    #[arg(long)]
    shots: Option<u64>,
    /// Output file (stdout when absent); overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl CampaignArgs {
    fn load(&self) -> Result<CampaignConfig, HarnessError> {
        let mut config = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
                CampaignConfig::from_json(&text)?
            }
            (None, Some(name)) => presets::config(name)?,
            (None, None) => return Err(HarnessError::Config("either --config or --preset is required".into())),
        };
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(shots) = self.shots {
            config.shots = shots;
        }
        if self.out.is_some() || self.format.is_some() {
            let output = config.output.get_or_insert(shadows_core::harness::OutputConfig {
                path: None,
                format: OutputFormat::Csv,
                datasets: None,
            });
            if let Some(out) = &self.out {
                output.path = Some(out.clone());
            }
            if let Some(f) = self.format {
                output.format = f.into();
            }
        }
        config.check()?;
        Ok(config)
    }
}

fn output_of(config: &CampaignConfig) -> (Option<PathBuf>, OutputFormat) {
    match &config.output {
        Some(o) => (o.path.clone(), o.format),
        None => (None, OutputFormat::Csv),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analytic shadow norms and sample budgets; no simulation.
    Norm(CampaignArgs),
    /// Sample datasets and estimate every operator.
    Estimate {
        #[command(flatten)]
        campaign: CampaignArgs,
        /// Directory for the JSON-lines datasets; overrides the config.
        #[arg(long)]
        datasets: Option<PathBuf>,
    },
    /// Print the resolved campaign config.
    Echo(CampaignArgs),
    /// Norms as a function of weight, deformation or GHZ block size.
    Sweep {
        #[arg(long, value_parser = parse_axis)]
        axis: SweepAxis,
        /// Operator weights (axis k).
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
        /// Deformations (curves on axis k, grid on axis delta).
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        /// Fixed weight on axis delta.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// GHZ block sizes (axis n).
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Adds sampled second moments and hit frequencies.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Oracle identities (fast) and Monte Carlo checks (full).
    Validate {
        #[arg(long, default_value = "fast", value_parser = parse_level)]
        level: validate::Level,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, hide = true)]
        tamper_bell: bool,
    },
    /// Named campaigns.
    Preset {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    /// Print the preset's config and budget analysis.
    Show { name: String },
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn parse_level(s: &str) -> Result<validate::Level, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn emit(path: Option<&PathBuf>, body: impl FnOnce(&mut dyn Write) -> Result<(), HarnessError>) -> Result<(), HarnessError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let mut w = BufWriter::new(File::create(p)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Norm(args) => {
            let config = args.load()?;
            let report = cmd_norm(&config.resolve()?)?;
            let (path, format) = output_of(&config);
            emit(path.as_ref(), |w| match format {
                OutputFormat::Csv => report.write_csv(w),
                OutputFormat::Json => report.write_json(w),
            })?;
        }
        Command::Estimate { campaign, datasets } => {
            let mut config = campaign.load()?;
            if let Some(dir) = datasets {
                let (path, format) = output_of(&config);
                config.output = Some(shadows_core::harness::OutputConfig {
                    path,
                    format,
                    datasets: Some(dir),
                });
            }
            let report = cmd_estimate(&config.resolve()?, EstimateOptions { workers: cli.workers })?;
            if let Some(dir) = config.output.as_ref().and_then(|o| o.datasets.as_ref()) {
                report.save_datasets(dir)?;
            }
            let (path, format) = output_of(&config);
            emit(path.as_ref(), |w| report.write(format, w))?;
        }
        Command::Echo(args) => {
            let config = args.load()?;
            config.resolve()?;
            emit(None, |w| {
                writeln!(w, "{}", config.to_json())?;
                Ok(())
            })?;
        }
        Command::Sweep {
            axis,
            ks,
            deltas,
            k,
            ns,
            epsilon,
            shots,
            seed,
            out,
            format,
        } => {
            let mut options = SweepOptions::new(axis);
            if let Some(ks) = ks {
                options.ks = ks;
            }
            if let Some(d) = deltas {
                options.deltas = d;
            }
            if let Some(ns) = ns {
                options.ns = ns;
            }
            options.k_fixed = k;
            options.epsilon = epsilon;
            options.empirical = shots.map(|shots| Empirical {
                shots,
                seed,
                workers: cli.workers,
            });
            let rows = cmd_sweep(&options)?;
            emit(out.as_ref(), |w| match format {
                Format::Csv => write_sweep_csv(&rows, w),
                Format::Json => write_sweep_json(&rows, w),
            })?;
        }
        Command::Validate {
            level,
            seed,
            format,
            tamper_bell,
        } => {
            let report = validate::cmd_validate(validate::ValidateOptions {
                level,
                seed,
                workers: cli.workers,
                tamper_bell,
            });
            emit(None, |w| {
                match format {
                    Some(Format::Json) => {
                        serde_json::to_writer_pretty(&mut *w, &report)?;
                        writeln!(w)?;
                    }
                    _ => {
                        for c in &report.checks {
                            writeln!(w, "{c}")?;
                        }
                    }
                }
                Ok(())
            })?;
            if !report.passed() {
                return Err(HarnessError::Validation(format!(
                    "failed checks: {}",
                    report.failures().join(", ")
                )));
            }
        }
        Command::Preset { action } => match action {
            PresetAction::List => emit(None, |w| {
                for p in presets::list() {
                    writeln!(w, "{}\t{}", p.name, p.description)?;
                }
                Ok(())
            })?,
            PresetAction::Show { name } => {
                let config = presets::config(&name)?;
                let shown = serde_json::json!({
                    "config": serde_json::to_value(&config)?,
                    "analysis": presets::analysis(&name)?,
                });
                emit(None, |w| {
                    serde_json::to_writer_pretty(&mut *w, &shown)?;
                    writeln!(w)?;
                    Ok(())
                })?;
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
