use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use qsc::ensemble::{run_pipeline, sample_general, EnsembleSpec, PipelineTrace, SelfDualMatrix};
use qsc::harness::{emit, median, run, verify, Check, ExperimentConfig, Format};
use qsc::spectra::{
    kolmogorov_semicircle, levy_distance, pipeline_inequalities, InequalityReport, Semicircle,
    SpectralSample,
};

#[derive(Parser)]
#[command(name = "qsc", version, about = "Quaternion self-dual random matrices and the semicircle law")]
struct Cli {
    /// Experiment config (JSON); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the base seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one matrix and write it with its spectrum.
    Sample {
        /// Dimension; defaults to `ensemble.n` of the config.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run the convergence sweep over `sizes` × `trials_per_size`.
    Sweep,
    /// Run the structural and inequality checks; exit code 1 on any failure.
    Verify,
    /// Run truncation, centralization and rescaling on one draw.
    Pipeline {
        #[arg(long)]
        n: Option<usize>,
    },
}

fn load_config(cli: &Cli) -> qsc::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.ensemble.seed = s;
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if cli.out.is_some() {
        cfg.output.path = cli.out.clone();
    }
    if cli.jobs.is_some() {
        cfg.jobs = cli.jobs;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn writer(cfg: &ExperimentConfig) -> qsc::Result<Box<dyn Write>> {
    Ok(match &cfg.output.path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json(cfg: &ExperimentConfig, value: &impl Serialize) -> qsc::Result<()> {
    let mut w = writer(cfg)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SampleOutput<'a> {
    spec: &'a EnsembleSpec,
    kolmogorov: f64,
    levy: f64,
    spectrum: &'a SpectralSample,
    matrix: &'a SelfDualMatrix,
}

fn sample_cmd(cfg: &ExperimentConfig, n: Option<usize>) -> qsc::Result<ExitCode> {
    let spec = cfg.spec_for(n.unwrap_or(cfg.ensemble.n), cfg.seed());
    let w = sample_general(&spec)?;
    let spectrum = SpectralSample::from_matrix(&w)?;
    let esd = spectrum.esd();
    match cfg.output.format {
        Format::Csv => {
            let mut out = writer(cfg)?;
            esd.write_csv(&mut out)?;
            out.flush()?;
        }
        Format::Json => write_json(
            cfg,
            &SampleOutput {
                spec: &spec,
                kolmogorov: kolmogorov_semicircle(&esd, 1.0),
                levy: levy_distance(&esd, &Semicircle::default()),
                spectrum: &spectrum,
                matrix: &w,
            },
        )?,
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep_cmd(cfg: &ExperimentConfig) -> qsc::Result<ExitCode> {
    let result = run(cfg)?;
    emit(&result, cfg.output.format, cfg.output.path.as_deref())?;
    for &n in &cfg.sizes {
        let rows: Vec<_> = result.rows.iter().filter(|r| r.n == n).collect();
        let failed = rows.iter().filter(|r| !r.checks_passed()).count();
        eprintln!(
            "n={n:>6}  median Kolmogorov {:.4}  median Levy {:.4}  failed trials {failed}/{}",
            median(rows.iter().map(|r| r.kolmogorov)),
            median(rows.iter().map(|r| r.levy)),
            rows.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_cmd(cfg: &ExperimentConfig) -> qsc::Result<ExitCode> {
    let report = verify(cfg)?;
    for c in &report.checks {
        eprintln!(
            "{:<20} {}  cases {:>5}  failures {:>4}  max residual {:.3e}",
            c.check.name(),
            if c.passed { "PASS" } else { "FAIL" },
            c.cases,
            c.failures,
            c.max_residual
        );
        for d in &c.details {
            eprintln!("    {d}");
        }
    }
    write_json(cfg, &report)?;
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

#[derive(Serialize)]
struct PipelineOutput {
    trace: PipelineTrace,
    inequalities: Option<InequalityReport>,
}

fn pipeline_cmd(cfg: &ExperimentConfig, n: Option<usize>) -> qsc::Result<ExitCode> {
    let spec = cfg.spec_for(n.unwrap_or(cfg.ensemble.n), cfg.seed());
    let (trace, stages) = run_pipeline(&spec)?;
    let inequalities = if cfg.checks.contains(&Check::LevyBounds) || cfg.checks.contains(&Check::RankBounds) {
        Some(pipeline_inequalities(&stages, &trace)?)
    } else {
        None
    };
    let ok = inequalities.as_ref().is_none_or(|r| r.passed()) && trace.final_conditions_hold();
    match cfg.output.format {
        Format::Json => write_json(cfg, &PipelineOutput { trace, inequalities })?,
        Format::Csv => {
            let mut out = writer(cfg)?;
            writeln!(out, "stage,levy,levy_cube_bound,holds")?;
            if let Some(rep) = &inequalities {
                for s in &rep.stages {
                    writeln!(out, "{}->{},{},{},{}", s.from, s.to, s.levy, s.levy_cube_bound, s.holds)?;
                }
                writeln!(out, "rank,{},{},{}", rep.rank_sup_distance, rep.rank_bound, rep.rank_holds)?;
            }
            out.flush()?;
        }
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli).and_then(|cfg| match &cli.command {
        Command::Sample { n } => sample_cmd(&cfg, *n),
        Command::Sweep => sweep_cmd(&cfg),
        Command::Verify => verify_cmd(&cfg),
        Command::Pipeline { n } => pipeline_cmd(&cfg, *n),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
