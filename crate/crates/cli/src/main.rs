//! `decirate`: batch front-end for decimation-rate analysis.
//!
//! Exit codes: 0 on success, 2 on configuration or argument problems
//! (with a line/field diagnostic), 3 on numerical failures (the propagated
//! error name plus context).

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use decirate_core::{
    compaction_mask, decimate, empirical_check, ideal_lowpass_mask, optimize_fir,
    relevant_loss_rate, synthesize_gaussian, theorem2_ratio, BandMask, DecimationModel,
    Error as CoreError, FilterChoice, FirDesignResult, FirFilter, OptimizeOptions, RateReport,
    RationalBandMask, SweepAxis,
};

use config::{parse_filter, ExperimentConfig};
use output::{format_f64, write_binary_dump, write_lines};

/// A command failure carrying its exit code class.
#[derive(Debug)]
pub enum Failure {
    /// Invalid configuration, arguments, or I/O: exit code 2.
    Config(String),
    /// A numerical computation failed on valid inputs: exit code 3.
    Numeric(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numeric(m) => m,
        }
    }
}

/// Wraps a core error produced while *computing* (not while validating
/// configuration) so it reports as a numerical failure.
fn numeric(e: CoreError) -> Failure {
    Failure::Numeric(format!("{}: {e}", error_name(&e)))
}

fn error_name(e: &CoreError) -> &'static str {
    match e {
        CoreError::Divisibility { .. } => "Divisibility",
        CoreError::Range { .. } => "Range",
        CoreError::LengthMismatch { .. } => "LengthMismatch",
        CoreError::GridMismatch { .. } => "GridMismatch",
        CoreError::NegativePsd { .. } => "NegativePsd",
        CoreError::CauchySchwarz { .. } => "CauchySchwarz",
        CoreError::DegenerateDenominator { .. } => "DegenerateDenominator",
        CoreError::SingularMatrix { .. } => "SingularMatrix",
        CoreError::RegularityViolation { .. } => "RegularityViolation",
        CoreError::DivisionByZero { .. } => "DivisionByZero",
        CoreError::Precondition(_) => "Precondition",
        CoreError::IllConditioned { .. } => "IllConditioned",
    }
}

#[derive(Parser)]
#[command(
    name = "decirate",
    version,
    about = "Information rates, compaction filters and loss sweeps for decimation systems"
)]
struct Cli {
    /// Frequency grid size N (used when the config has no grid_size)
    #[arg(long, global = true, default_value_t = 4096)]
    grid: usize,

    /// Seed for all pseudo-random synthesis (default: the config's seed,
    /// then 1)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweep parallelism; affects speed only, never results
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Information rates and the relevant loss for one model and filter
    Inforate {
        /// Experiment config (JSON)
        #[arg(long)]
        config: PathBuf,
        #[arg(
            long,
            default_value = "none",
            help = "Filter: none | ideal_lowpass | fir:[coeffs] | fir_opt:order | compaction"
        )]
        filter: String,
        /// Override the configured noise with white noise of this variance
        #[arg(long)]
        sigma2: Option<f64>,
    },
    /// Write the optimal energy-compaction mask as CSV
    Compaction {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (rows: bin_index, theta, gain, winner_k)
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sigma2: Option<f64>,
    },
    /// Exact rational loss bound of a piecewise-constant rational-edge mask
    RelativeLoss {
        /// Downsampling factor
        #[arg(long = "M")]
        m: usize,
        /// Sub-band resolution per output band
        #[arg(long = "L")]
        l: usize,
        /// Comma-separated pass indicators for the L*M sub-bands, e.g. 1,0
        #[arg(long)]
        pass: String,
    },
    /// Optimize FIR filter coefficients of the given order
    FirOpt {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sigma2: Option<f64>,
    },
    /// Synthesize a Gaussian record, decimate it, dump samples, verify PSD
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Record length (power of two, at least 1024)
        #[arg(long)]
        n: usize,
        /// Output dump path; a JSON sidecar is written next to it
        #[arg(long)]
        out: PathBuf,
        #[arg(
            long,
            default_value = "none",
            help = "Tap-domain filter: none or fir:[coeffs]"
        )]
        filter: String,
    },
    /// Reproduce figure data over the 10·ln(σ²) sweep
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output path
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        // The pool is configured once, before any parallel work starts.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Inforate {
            config,
            filter,
            sigma2,
        } => run_inforate(&config, &filter, sigma2, cli.grid),
        Command::Compaction {
            config,
            out,
            sigma2,
        } => run_compaction(&config, &out, sigma2, cli.grid),
        Command::RelativeLoss { m, l, pass } => run_relative_loss(m, l, &pass),
        Command::FirOpt {
            order,
            config,
            sigma2,
        } => run_fir_opt(order, &config, sigma2, cli.grid),
        Command::Simulate {
            config,
            n,
            out,
            filter,
        } => run_simulate(&config, n, &out, &filter, cli.grid, cli.seed),
        Command::Sweep { config, out } => run_sweep(&config, out.as_deref(), cli.grid),
    }
}

/// Resolves a filter choice into a concrete mask on the model's grid,
/// returning the optimizer report when one was run.
fn resolve_mask(
    choice: &FilterChoice,
    model: &DecimationModel,
) -> Result<(BandMask, Option<FirDesignResult>), Failure> {
    let grid = model.grid();
    match choice {
        FilterChoice::NoFilter => Ok((BandMask::all_pass(grid), None)),
        FilterChoice::IdealLowpass => {
            Ok((ideal_lowpass_mask(grid, model.m()).map_err(numeric)?, None))
        }
        FilterChoice::Fir(taps) => {
            let h = FirFilter::new(taps.clone())
                .map_err(|e| Failure::Config(format!("fir taps: {e}")))?;
            Ok((h.magnitude_squared(grid).map_err(numeric)?, None))
        }
        FilterChoice::FirOpt(order) => {
            let result =
                optimize_fir(*order, model, OptimizeOptions::default()).map_err(numeric)?;
            let mask = result.coeffs.magnitude_squared(grid).map_err(numeric)?;
            Ok((mask, Some(result)))
        }
        FilterChoice::Compaction => {
            let ratio = theorem2_ratio(model).map_err(numeric)?;
            let mask = compaction_mask(&ratio, model.m())
                .map_err(numeric)?
                .into_mask();
            Ok((mask, None))
        }
    }
}

fn rate_report_json(report: &RateReport, model: &DecimationModel) -> serde_json::Value {
    serde_json::json!({
        "mi_rate_input": report.mi_rate_input,
        "mi_rate_output": report.mi_rate_output,
        "relevant_loss": report.relevant_loss,
        "mi_rate_scalar": report.mi_rate_input / model.m() as f64,
        "m": model.m(),
        "grid_size": model.grid().len(),
    })
}

fn run_inforate(
    config: &std::path::Path,
    filter: &str,
    sigma2: Option<f64>,
    grid_flag: usize,
) -> Result<(), Failure> {
    let cfg = ExperimentConfig::load(config)?;
    let model = cfg.build_model(cfg.grid_size_or(grid_flag), sigma2)?;
    let choice = parse_filter(filter)?;
    let (mask, optimized) = resolve_mask(&choice, &model)?;
    let report = relevant_loss_rate(&model, &mask).map_err(numeric)?;
    let mut summary = rate_report_json(&report, &model);
    summary["filter"] = serde_json::json!(choice.label());
    if let Some(design) = optimized {
        summary["optimized_coeffs"] = serde_json::json!(design.coeffs.coeffs());
        summary["objective_evals"] = serde_json::json!(design.objective_evals);
    }
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(())
}

fn run_compaction(
    config: &std::path::Path,
    out: &std::path::Path,
    sigma2: Option<f64>,
    grid_flag: usize,
) -> Result<(), Failure> {
    let cfg = ExperimentConfig::load(config)?;
    let model = cfg.build_model(cfg.grid_size_or(grid_flag), sigma2)?;
    let ratio = theorem2_ratio(&model).map_err(numeric)?;
    let result = compaction_mask(&ratio, model.m()).map_err(numeric)?;

    let grid = model.grid();
    let n_out = grid.len() / model.m();
    let mut lines = Vec::with_capacity(grid.len() + 1);
    lines.push("bin_index,theta,gain,winner_k".to_string());
    for k in 0..grid.len() {
        lines.push(format!(
            "{k},{},{},{}",
            format_f64(grid.theta(k)),
            format_f64(result.mask().gains()[k]),
            result.winner_index()[k % n_out],
        ));
    }
    write_lines(out, &lines)?;

    let passed = result.mask().gains().iter().filter(|&&g| g > 0.0).count();
    let summary = serde_json::json!({
        "out": out.display().to_string(),
        "bins": grid.len(),
        "passed_bins": passed,
        "m": model.m(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(())
}

fn run_relative_loss(m: usize, l: usize, pass: &str) -> Result<(), Failure> {
    let bits: Vec<bool> = pass
        .split(',')
        .map(|token| match token.trim() {
            "1" => Ok(true),
            "0" => Ok(false),
            other => Err(Failure::Config(format!(
                "--pass: expected 0 or 1, found `{other}`"
            ))),
        })
        .collect::<Result<_, _>>()?;
    let mask = RationalBandMask::new(l, m, bits)
        .map_err(|e| Failure::Config(format!("--pass/--L/--M: {e}")))?;
    let result = decirate_core::relative_loss_rate(&mask);
    println!(
        "loss = {} (K={}, L={}, M={})",
        result.loss, result.surviving_groups, l, m
    );
    Ok(())
}

fn run_fir_opt(
    order: usize,
    config: &std::path::Path,
    sigma2: Option<f64>,
    grid_flag: usize,
) -> Result<(), Failure> {
    let cfg = ExperimentConfig::load(config)?;
    let model = cfg.build_model(cfg.grid_size_or(grid_flag), sigma2)?;
    let result = optimize_fir(order, &model, OptimizeOptions::default()).map_err(numeric)?;
    let summary = serde_json::json!({
        "order": order,
        "coeffs": result.coeffs.coeffs(),
        "loss": result.loss,
        "objective_evals": result.objective_evals,
        "converged": result.converged,
        "m": model.m(),
        "grid_size": model.grid().len(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(())
}

fn run_simulate(
    config: &std::path::Path,
    n: usize,
    out: &std::path::Path,
    filter: &str,
    grid_flag: usize,
    seed_flag: Option<u64>,
) -> Result<(), Failure> {
    if !n.is_power_of_two() || n < 1024 {
        return Err(Failure::Config(format!(
            "--n = {n}: record length must be a power of two and at least 1024"
        )));
    }
    let cfg = ExperimentConfig::load(config)?;
    let seed = seed_flag.or(cfg.seed).unwrap_or(1);
    let model = cfg.build_model(cfg.grid_size_or(grid_flag), None)?;
    let h = match parse_filter(filter)? {
        FilterChoice::NoFilter => FirFilter::identity(),
        FilterChoice::Fir(taps) => FirFilter::new(taps)
            .map_err(|e| Failure::Config(format!("fir taps: {e}")))?,
        other => {
            return Err(Failure::Config(format!(
                "simulate needs a tap-domain filter (none or fir:[coeffs]), got `{}`",
                other.label()
            )))
        }
    };

    let observation = model.observation_psd();
    let record = synthesize_gaussian(&observation, n, seed).map_err(numeric)?;
    let decimated = decimate(&record.samples, &h, model.m()).map_err(numeric)?;
    write_binary_dump(out, &decimated)?;

    // Echo the config's model block verbatim into the sidecar.
    let raw: serde_json::Value = std::fs::read_to_string(config)
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok())
        .unwrap_or(serde_json::Value::Null);
    let sidecar_path = PathBuf::from(format!("{}.json", out.display()));
    let sidecar = serde_json::json!({
        "seed": seed,
        "model": raw.get("model").cloned().unwrap_or(serde_json::Value::Null),
        "n": n,
        "m": model.m(),
        "filter": filter,
        "samples_written": decimated.len(),
    });
    write_lines(
        &sidecar_path,
        &[serde_json::to_string_pretty(&sidecar).expect("json")],
    )?;

    let check = empirical_check(&model, &h, n, seed).map_err(numeric)?;
    let mean_power = decimated.iter().map(|v| v * v).sum::<f64>() / decimated.len() as f64;
    let summary = serde_json::json!({
        "out": out.display().to_string(),
        "sidecar": sidecar_path.display().to_string(),
        "n": n,
        "seed": seed,
        "samples_written": decimated.len(),
        "mean_power": mean_power,
        "rms_relative_deviation": check.rms_relative_deviation,
        "bins_compared": check.bins_compared,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(())
}

fn run_sweep(
    config: &std::path::Path,
    out_flag: Option<&std::path::Path>,
    grid_flag: usize,
) -> Result<(), Failure> {
    let cfg = ExperimentConfig::load(config)?;
    let axis: SweepAxis = cfg.sweep_axis()?;
    let grid_size = cfg.grid_size_or(grid_flag);
    let grid = decirate_core::FrequencyGrid::for_decimation(grid_size, cfg.m)
        .map_err(|e| Failure::Config(format!("grid_size/M: {e}")))?;
    let signal = cfg.model.signal.build(grid)?;

    let out: PathBuf = match out_flag {
        Some(p) => p.to_path_buf(),
        None => cfg
            .output
            .clone()
            .map(PathBuf::from)
            .ok_or_else(|| Failure::Config("no output path: set `output` or --out".into()))?,
    };

    let mode = cfg.mode.as_deref().unwrap_or("fig3");
    let (lines, columns) = match mode {
        "fig3" => {
            let filters = cfg.filter_choices()?;
            if filters.is_empty() {
                return Err(Failure::Config(
                    "fig3 mode needs at least one entry in `filters`".into(),
                ));
            }
            let rows =
                decirate_core::sweep_losses(&signal, cfg.m, &filters, &axis).map_err(numeric)?;
            let labels: Vec<String> = filters.iter().map(|f| f.label()).collect();
            let mut header = String::from("ten_ln_sigma2,available_info");
            for label in &labels {
                header.push_str(",loss_");
                header.push_str(label);
            }
            let mut lines = vec![header.clone()];
            for row in &rows {
                let mut line = format!(
                    "{},{}",
                    format_f64(row.ten_ln_sigma2),
                    format_f64(row.available_info)
                );
                for loss in &row.losses {
                    line.push(',');
                    line.push_str(&format_f64(*loss));
                }
                lines.push(line);
            }
            (lines, header)
        }
        "fig4" => {
            let rows = decirate_core::sweep_order2_coefficients(&signal, cfg.m, &axis)
                .map_err(numeric)?;
            let header = "ten_ln_sigma2,c1_opt,c2_opt,c1_minus_sqrt2".to_string();
            let mut lines = vec![header.clone()];
            for row in &rows {
                lines.push(format!(
                    "{},{},{},{}",
                    format_f64(row.ten_ln_sigma2),
                    format_f64(row.c1_opt),
                    format_f64(row.c2_opt),
                    format_f64(row.c1_minus_sqrt2),
                ));
            }
            (lines, header)
        }
        "fig6" => {
            let rows =
                decirate_core::sweep_extra_loss_sqrt2(&signal, cfg.m, &axis).map_err(numeric)?;
            let header = "ten_ln_sigma2,extra_loss_sqrt2".to_string();
            let mut lines = vec![header.clone()];
            for row in &rows {
                lines.push(format!(
                    "{},{}",
                    format_f64(row.ten_ln_sigma2),
                    format_f64(row.extra_loss_sqrt2),
                ));
            }
            (lines, header)
        }
        other => {
            return Err(Failure::Config(format!(
                "mode: unknown figure mode `{other}` (expected fig3 | fig4 | fig6)"
            )))
        }
    };

    write_lines(&out, &lines)?;
    let summary = serde_json::json!({
        "mode": mode,
        "points": lines.len() - 1,
        "output": out.display().to_string(),
        "columns": columns,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    Ok(())
}
