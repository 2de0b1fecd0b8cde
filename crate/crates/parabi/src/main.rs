use clap::{Parser, Subcommand};
use parabi::cli::{
    cmd_bell, cmd_dynamics, cmd_husimi, cmd_spectrum, cmd_validate, write_dynamics_csv,
    write_husimi_csv, write_output, write_spectrum_csv, SweepAxis, SweepSpec,
};
use parabi::config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "parabi",
    about = "Two-qubit Rabi model with a parametric oscillator: adiabatic dynamics, correlations, and phase-space observables",
    version
)]
struct Cli {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for the reconstruction search restarts; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Adiabatic vs exact energy levels along a parameter sweep.
    Spectrum {
        /// Sweep axis: g | lambda1.
        #[arg(long)]
        sweep: SweepAxis,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 24)]
        points: usize,
        /// Number of levels (lowest) per sweep point.
        #[arg(long, default_value_t = 12)]
        levels: usize,
        /// Oracle Fock cutoff.
        #[arg(long, default_value_t = 120)]
        n_fock: usize,
    },
    /// Observable time series on the configured grid.
    Dynamics,
    /// Bell reconstruction report at the given times.
    Bell {
        /// Comma-separated scaled times ωt.
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
    },
    /// Husimi Q field of the oscillator state at one time.
    Husimi {
        /// Scaled time ωt.
        #[arg(long)]
        t: f64,
    },
    /// Run the validation suite and write the machine-readable report.
    Validate {
        /// Mark oracle-backed checks as skipped instead of running them.
        #[arg(long)]
        skip_oracle: bool,
    },
}

fn run(args: Cli) -> parabi::Result<bool> {
    if let Some(k) = args.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| parabi::Error::Config(format!("worker pool: {e}")))?;
    }
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if cfg.model.adiabatic_warning() {
        eprintln!(
            "warning: qubit splitting >= 0.25 omega; the adiabatic treatment degrades there"
        );
    }
    if let Ok(frame) = parabi::model::build_frame(&cfg.model) {
        if frame.near_collapse() {
            eprintln!(
                "warning: Omega/omega = {:.3}; close to the spectral collapse at g = omega/2",
                frame.collapse_proximity()
            );
        }
    }

    match args.command {
        Command::Spectrum {
            sweep,
            from,
            to,
            points,
            levels,
            n_fock,
        } => {
            let rows = cmd_spectrum(
                &cfg,
                SweepSpec {
                    axis: sweep,
                    from,
                    to,
                    points,
                },
                levels,
                n_fock,
            )?;
            let path = write_output(&args.out, "spectrum.csv", &write_spectrum_csv(&rows, sweep))?;
            println!("wrote {} ({} rows)", path.display(), rows.len());
        }
        Command::Dynamics => {
            let table = cmd_dynamics(&cfg)?;
            let path = write_output(&args.out, "dynamics.csv", &write_dynamics_csv(&table))?;
            println!("wrote {} ({} samples)", path.display(), table.rows.len());
        }
        Command::Bell { times } => {
            let report = cmd_bell(&cfg, &times)?;
            let json = serde_json::to_string_pretty(&report)?;
            let path = write_output(&args.out, "bell.json", &json)?;
            for r in &report.records {
                println!(
                    "t = {:>8.1}: C = {:.4}, purity = {:.4}, d_min = {:.4}, dominant {} ({:.4})",
                    r.omega_t,
                    r.concurrence,
                    r.purity,
                    r.reconstruction.d_min,
                    r.dominant,
                    r.dominant_amplitude
                );
            }
            println!("wrote {}", path.display());
        }
        Command::Husimi { t } => {
            let (field, meta) = cmd_husimi(&cfg, t)?;
            let path = write_output(&args.out, "husimi.csv", &write_husimi_csv(&field))?;
            let meta_json = serde_json::to_string_pretty(&meta)?;
            let meta_path = write_output(&args.out, "husimi_meta.json", &meta_json)?;
            println!(
                "t = {t}: V_min = {:.4} ({}), peak at {:.3}{:+.3}i, normalization {:.6}",
                meta.v_min,
                if meta.squeezed { "squeezed" } else { "not squeezed" },
                meta.peak_location.re,
                meta.peak_location.im,
                meta.normalization
            );
            println!("wrote {} and {}", path.display(), meta_path.display());
        }
        Command::Validate { skip_oracle } => {
            let report = cmd_validate(&cfg, skip_oracle);
            for criterion in &report.criteria {
                for line in criterion.summary_lines() {
                    println!("{line}");
                }
            }
            let json = serde_json::to_string_pretty(&report)?;
            let path = write_output(&args.out, "validate.json", &json)?;
            println!("wrote {}", path.display());
            println!(
                "overall: {}",
                if report.passed { "PASS" } else { "FAIL" }
            );
            return Ok(report.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
