use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use blockade::cli::{self, Figure, OutputFormat, ScenarioConfig, SweepQuantity};

/// Two laser-driven two-level atoms with a shifted doubly excited level:
/// transients, steady states, entanglement and photon correlations.
///
/// Rates are in units of the total decay rate gamma, times in units of
/// 1/gamma. Values can come from a flat `key = value` preset file via
/// --config; flags override the file.
#[derive(Parser)]
#[command(name = "blockade", version, about, max_term_width = 100)]
struct Args {
    /// preset file with one `key = value` per line, '#' comments
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// drive strength Omega/gamma
    #[arg(long, global = true, value_name = "X")]
    omega: Option<f64>,

    /// dipole-dipole shift delta/gamma of the doubly excited level
    #[arg(long, global = true, value_name = "X")]
    delta: Option<f64>,

    /// radiative share gamma_s/gamma of the total decay rate, in [0, 1]
    #[arg(long, global = true, value_name = "FRAC")]
    gamma_s_frac: Option<f64>,

    /// initial state for `evolve`: ee, s, a or gg
    #[arg(long, global = true, value_name = "LABEL")]
    initial_state: Option<String>,

    /// end of the integration window, in units of 1/gamma
    #[arg(long, global = true, value_name = "T")]
    t_end: Option<f64>,

    /// number of grid points (time samples, or sweep points per family)
    #[arg(long, global = true, value_name = "N")]
    samples: Option<usize>,

    /// geometric phase of detector 1, radians
    #[arg(long, global = true, value_name = "RAD")]
    phi1: Option<f64>,

    /// geometric phase of detector 2, radians
    #[arg(long, global = true, value_name = "RAD")]
    phi2: Option<f64>,

    /// largest correlation delay, in units of 1/gamma
    #[arg(long, global = true, value_name = "T")]
    tau_max: Option<f64>,

    /// number of delay points (zero plus a log-spaced tail)
    #[arg(long, global = true, value_name = "N")]
    tau_points: Option<usize>,

    /// output file (default stdout); output directory for `figures`
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// table serialization; `steady` always reports JSON
    #[arg(long, global = true, value_enum, value_name = "FMT")]
    format: Option<OutputFormat>,

    /// worker threads for sweeps and figure panels (0 = one per core)
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the master equation and tabulate the transient observables
    Evolve,
    /// Solve the steady state two ways and report diagnostics as JSON
    Steady,
    /// Scan drive strength for families of integer shifts delta/gamma
    Sweep {
        /// which steady-state quantity the families tabulate
        #[arg(long, value_enum, value_name = "Q")]
        quantity: Option<SweepQuantity>,
        /// smallest drive in the scan (must be positive)
        #[arg(long, value_name = "X")]
        omega_min: Option<f64>,
        /// largest drive in the scan
        #[arg(long, value_name = "X")]
        omega_max: Option<f64>,
        /// first integer shift family
        #[arg(long, value_name = "N")]
        delta_min: Option<u32>,
        /// last integer shift family
        #[arg(long, value_name = "N")]
        delta_max: Option<u32>,
    },
    /// Delayed photon-photon cross correlation of the two detectors
    G2,
    /// Write the plot-ready CSV bundle for one of the built-in figures
    Figures {
        #[arg(value_enum)]
        which: Figure,
    },
}

fn merge(args: &Args) -> blockade::Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    if let Some(path) = &args.config {
        cli::apply_config_file(&mut cfg, path)?;
    }
    if let Some(v) = args.omega {
        cfg.omega = v;
    }
    if let Some(v) = args.delta {
        cfg.delta = v;
    }
    if let Some(v) = args.gamma_s_frac {
        cfg.gamma_s_frac = v;
    }
    if let Some(v) = &args.initial_state {
        cfg.initial_state = v.clone();
    }
    if let Some(v) = args.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = args.samples {
        cfg.samples = v;
    }
    if let Some(v) = args.phi1 {
        cfg.phi1 = v;
    }
    if let Some(v) = args.phi2 {
        cfg.phi2 = v;
    }
    if let Some(v) = args.tau_max {
        cfg.tau_max = v;
    }
    if let Some(v) = args.tau_points {
        cfg.tau_points = v;
    }
    if let Some(v) = args.format {
        cfg.format = v;
    }
    if let Some(v) = args.jobs {
        cfg.jobs = Some(v);
    }
    if let Command::Sweep { quantity, omega_min, omega_max, delta_min, delta_max } = &args.command
    {
        if let Some(v) = quantity {
            cfg.quantity = *v;
        }
        if let Some(v) = omega_min {
            cfg.omega_min = *v;
        }
        if let Some(v) = omega_max {
            cfg.omega_max = *v;
        }
        if let Some(v) = delta_min {
            cfg.delta_min = *v;
        }
        if let Some(v) = delta_max {
            cfg.delta_max = *v;
        }
    }
    Ok(cfg)
}

fn run(args: &Args) -> blockade::Result<()> {
    let cfg = merge(args)?;
    let out = args.out.as_deref();
    match &args.command {
        Command::Evolve => cli::write_output(&cli::cmd_evolve(&cfg)?.render(cfg.format), out),
        Command::Steady => cli::write_output(&cli::cmd_steady(&cfg)?, out),
        Command::Sweep { .. } => cli::write_output(&cli::cmd_sweep(&cfg)?.render(cfg.format), out),
        Command::G2 => cli::write_output(&cli::cmd_g2(&cfg)?.render(cfg.format), out),
        Command::Figures { which } => {
            let dir = out.unwrap_or_else(|| std::path::Path::new("."));
            for path in cli::cmd_figures(*which, dir, cfg.jobs)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
