use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cvclone_cli::config::{parse_complex, parse_grid};
use cvclone_cli::{cmd_clone, cmd_povm, cmd_sweep, cmd_verify, CliError, Command, Fault, RunConfig};

const AFTER_HELP: &str = "\
Output formats (all numbers: 12 significant digits, scientific notation):
  sweep   lambda,G1,G2,G3,var_x,var_y,product,fidelity_c,fidelity_a
          one row per lambda; var_x is Var X of clone c, var_y is Var Y of
          clone a, product is var_x*var_y
  clone   clone,mean_x,mean_y,var_x,var_y,fidelity   (rows c and a)
          summary lines lambda=, G1=, G2=, G3= and, for the Fock backend,
          trace_distance= go to stderr
  povm    '#' header lines with lambda, phi, theta, alpha, the parameters
          C, D, E, |delta|, |beta|, |gamma|, xi and the grid integral, then
          x,x_prime,density on an N x N grid over [-XMAX, XMAX]^2
  verify  one PASS/FAIL/SKIP line per check with its timing

Config file (--config): one key=value per line, '#' starts a comment. Keys:
  lambda_min lambda_max steps lambda alpha sigma backend truncation seed out
  phi theta grid. Command-line flags override the file.

Exit status: 0 success, 1 check failure, 2 invalid configuration, 3 I/O error.";

#[derive(Parser)]
#[command(name = "cvclone", version, about = "Continuous-variable 1->2 cloning network simulator", after_help = AFTER_HELP)]
struct Cli {
    /// key=value configuration file; flags take precedence
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Log progress and truncation warnings (repeat for more)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Gains, clone variances and fidelities over a range of lambda
    Sweep(SweepArgs),
    /// Run the network once and report both clones
    Clone(CloneArgs),
    /// Tabulate the finite-lambda outcome density of the joint measurement
    Povm(PovmArgs),
    /// Run the numerical self-checks
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_name = "F")]
    lambda_min: Option<f64>,
    #[arg(long, value_name = "F")]
    lambda_max: Option<f64>,
    /// Number of lambda values, evenly spaced, both ends included
    #[arg(long, value_name = "N")]
    steps: Option<usize>,
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, value_name = "F")]
    sigma: Option<f64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CloneArgs {
    #[arg(long, value_name = "F")]
    lambda: Option<f64>,
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, value_name = "gaussian|fock")]
    backend: Option<String>,
    #[arg(long, value_name = "N")]
    truncation: Option<usize>,
    #[arg(long, value_name = "F")]
    sigma: Option<f64>,
    /// Write the CSV here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PovmArgs {
    #[arg(long, value_name = "F")]
    lambda: Option<f64>,
    #[arg(long, value_name = "F", allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, value_name = "F", allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Points per axis and half-width of the square grid
    #[arg(long, value_name = "N,XMAX")]
    grid: Option<String>,
    /// Coherent input amplitude
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, value_name = "N")]
    truncation: Option<usize>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_name = "N")]
    truncation: Option<usize>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, hide = true)]
    corrupt_gains: bool,
}

fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let command = match cli.command {
        Sub::Sweep(_) => Command::Sweep,
        Sub::Clone(_) => Command::Clone,
        Sub::Povm(_) => Command::Povm,
        Sub::Verify(_) => Command::Verify,
    };
    let mut cfg = RunConfig::defaults(command);
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
        cfg.apply_file(&text)?;
    }
    let alpha = |a: &Option<String>, cfg: &mut RunConfig| -> Result<(), CliError> {
        if let Some(a) = a {
            cfg.alpha = parse_complex(a)?;
        }
        Ok(())
    };
    match &cli.command {
        Sub::Sweep(a) => {
            cfg.lambda_min = a.lambda_min.unwrap_or(cfg.lambda_min);
            cfg.lambda_max = a.lambda_max.unwrap_or(cfg.lambda_max);
            cfg.steps = a.steps.unwrap_or(cfg.steps);
            cfg.sigma = a.sigma.unwrap_or(cfg.sigma);
            cfg.out = a.out.clone().or(cfg.out);
            alpha(&a.alpha, &mut cfg)?;
        }
        Sub::Clone(a) => {
            cfg.lambda = a.lambda.unwrap_or(cfg.lambda);
            cfg.truncation = a.truncation.unwrap_or(cfg.truncation);
            cfg.sigma = a.sigma.unwrap_or(cfg.sigma);
            cfg.out = a.out.clone().or(cfg.out);
            if let Some(b) = &a.backend {
                cfg.backend = b.parse()?;
            }
            alpha(&a.alpha, &mut cfg)?;
        }
        Sub::Povm(a) => {
            cfg.lambda = a.lambda.unwrap_or(cfg.lambda);
            cfg.phi = a.phi.unwrap_or(cfg.phi);
            cfg.theta = a.theta.unwrap_or(cfg.theta);
            cfg.truncation = a.truncation.unwrap_or(cfg.truncation);
            cfg.out = a.out.clone().or(cfg.out);
            if let Some(g) = &a.grid {
                (cfg.grid_points, cfg.grid_extent) = parse_grid(g)?;
            }
            alpha(&a.alpha, &mut cfg)?;
        }
        Sub::Verify(a) => {
            cfg.truncation = a.truncation.unwrap_or(cfg.truncation);
            cfg.seed = a.seed.unwrap_or(cfg.seed);
            if a.corrupt_gains {
                cfg.fault = Some(Fault::CorruptGains);
            }
        }
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = build_config(cli)?;
    let mut stdout = io::stdout().lock();
    match cfg.command {
        Command::Sweep => {
            cmd_sweep(&cfg)?;
        }
        Command::Clone => cmd_clone(&cfg, &mut stdout, &mut io::stderr())?,
        Command::Povm => {
            let integral = cmd_povm(&cfg, &mut stdout)?;
            log::info!("grid integral {integral:.6}");
        }
        Command::Verify => {
            cmd_verify(&cfg, &mut stdout)?;
        }
    }
    stdout.flush().map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        // output piped into something like `head`
        Err(CliError::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
