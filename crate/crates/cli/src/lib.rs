//! `becsq`: parameters, spectra, sweeps and Fock-space evolution from the
//! command line. Exit codes: 0 success, 1 validation failure, 2 usage or
//! configuration error.

// `!(x > 0.0)` is how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use bec_squeeze::Execution;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{Format, Outcome};
use crate::config::{Overrides, Resolved, RunConfig, SweepParameter};
use crate::error::{CliError, EXIT_OK, EXIT_VALIDATION};

#[derive(Debug, Parser)]
#[command(name = "becsq", version, about = "Entangled light from a pumped condensate in a two-mode cavity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Effective couplings and regime checks.
    Params(Common),
    /// Squeezing spectrum on a frequency grid, as CSV.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Add the large-detuning closed form as an S_approx column.
        #[arg(long)]
        approx: bool,
        /// Also write a matplotlib script next to the CSV (needs --out).
        #[arg(long, value_name = "PATH")]
        plot_script: Option<PathBuf>,
    },
    /// Minimum of the spectrum over a kappa or N grid, as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        param: Option<ParamArg>,
        #[arg(long, value_name = "PATH")]
        plot_script: Option<PathBuf>,
    },
    /// Closed-form and numerical evolution of the cavity state.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Evolution time in units of 1/chi.
        #[arg(long)]
        chi_tau: Option<f64>,
        /// Also evolve with the collective mode kept explicitly.
        #[arg(long)]
        three_mode: bool,
    },
    /// Run the invariant suite; exits 1 if any check fails.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Negate one off-diagonal drift term (negative control).
        #[arg(long)]
        flip_drift_sign: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ParamArg {
    Kappa,
    #[value(name = "N", alias = "n")]
    N,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum FormatArg {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML file with a [physical] or [effective] block.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Quadrature angle in radians.
    #[arg(long, value_name = "RAD", allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega_max: Option<f64>,
    #[arg(long)]
    pub omega_points: Option<usize>,
    /// Worker threads; 1 runs sequentially, 0 uses every core.
    #[arg(long, value_name = "K", default_value_t = 0)]
    pub workers: usize,
    /// Report format for params, evolve and validate.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            theta: self.theta,
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            omega_points: self.omega_points,
            ..Default::default()
        }
    }

    fn format(&self) -> Format {
        match self.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        }
    }
}

fn resolve(common: &Common, extra: Overrides) -> Result<Resolved, CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut o = common.overrides();
    o.approx = extra.approx;
    o.flip_drift_sign = extra.flip_drift_sign;
    o.three_mode = extra.three_mode;
    o.chi_tau = extra.chi_tau;
    o.sweep_parameter = extra.sweep_parameter;
    cfg.apply(&o);
    cfg.resolve()
}

/// Runs `f` on a pool of `workers` threads; 1 means sequential.
fn with_workers<T>(
    workers: usize,
    f: impl FnOnce(Execution) -> T + Send,
) -> Result<T, CliError>
where
    T: Send,
{
    match workers {
        0 => Ok(f(Execution::Parallel)),
        1 => Ok(f(Execution::Sequential)),
        k => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Config(format!("cannot start {k} workers: {e}")))?;
            Ok(pool.install(|| f(Execution::Parallel)))
        }
    }
}

fn write_plot(script: Option<&PathBuf>, out: Option<&PathBuf>, body: impl FnOnce(&std::path::Path) -> String) -> Result<(), CliError> {
    let Some(script) = script else { return Ok(()) };
    let Some(csv) = out else {
        return Err(CliError::Config("--plot-script needs --out for the CSV path".into()));
    };
    output::emit(body(csv).as_bytes(), Some(script))
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    let (outcome, out) = match &cli.command {
        Command::Params(c) => (commands::cmd_params(&resolve(c, Overrides::default())?, c.format())?, &c.out),
        Command::Spectrum {
            common,
            approx,
            plot_script,
        } => {
            let r = resolve(common, Overrides { approx: *approx, ..Default::default() })?;
            // fail on a bad plot request before doing the work
            if plot_script.is_some() && common.out.is_none() {
                write_plot(plot_script.as_ref(), None, |_| String::new())?;
            }
            let o = with_workers(common.workers, |x| commands::cmd_spectrum(&r, x))??;
            write_plot(plot_script.as_ref(), common.out.as_ref(), |p| {
                plot::spectrum_script(p, r.config.spectrum.theta, r.config.spectrum.approx)
            })?;
            (o, &common.out)
        }
        Command::Sweep {
            common,
            param,
            plot_script,
        } => {
            let sweep_parameter = param.map(|p| match p {
                ParamArg::Kappa => SweepParameter::Kappa,
                ParamArg::N => SweepParameter::AtomNumber,
            });
            let r = resolve(common, Overrides { sweep_parameter, ..Default::default() })?;
            if plot_script.is_some() && common.out.is_none() {
                write_plot(plot_script.as_ref(), None, |_| String::new())?;
            }
            let o = with_workers(common.workers, |x| commands::cmd_sweep(&r, x))??;
            write_plot(plot_script.as_ref(), common.out.as_ref(), |p| {
                plot::sweep_script(p, commands::swept_is_atoms(&r))
            })?;
            (o, &common.out)
        }
        Command::Evolve {
            common,
            chi_tau,
            three_mode,
        } => {
            let r = resolve(
                common,
                Overrides {
                    chi_tau: *chi_tau,
                    three_mode: *three_mode,
                    ..Default::default()
                },
            )?;
            (commands::cmd_evolve(&r, common.format())?, &common.out)
        }
        Command::Validate {
            common,
            flip_drift_sign,
        } => {
            let r = resolve(
                common,
                Overrides {
                    flip_drift_sign: *flip_drift_sign,
                    ..Default::default()
                },
            )?;
            let fmt = common.format();
            (with_workers(common.workers, |x| commands::cmd_validate(&r, x, fmt))??, &common.out)
        }
    };
    output::emit(&outcome.bytes, out.as_deref())?;
    Ok(outcome)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(o) if o.ok => EXIT_OK,
        Ok(_) => EXIT_VALIDATION,
        Err(e) => {
            eprintln!("becsq: {e}");
            e.exit_code()
        }
    }
}
