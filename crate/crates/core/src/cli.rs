//! The `mspec` command line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::amplitudes::{Process, ProcessSpec};
use crate::config::{self, Assignment, RunConfig};
use crate::covariance::{check_phi_oracle, verify_all, CheckReport, RngSeed};
use crate::error::{Error, Result};
use crate::report::{format_float, report, report_bins, PeakReport};
use crate::spectrum::{integral_mass_spectrum, SpectrumCurve};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "MSPEC_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "mspec",
    version,
    about = "Integral mass spectra of tree-level two-body processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a spectrum, write CSV and a gnuplot script, print its peaks.
    Spectrum,
    /// Re-analyze the peaks of an existing spectrum CSV.
    Peaks {
        /// CSV written by `mspec spectrum`.
        csv: PathBuf,
    },
    /// Run the seeded covariance checks.
    Verify,
    /// Compare closed-form amplitudes with explicit polarization sums.
    Oracle,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration value; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// Output CSV path for `spectrum`.
    #[arg(long, global = true, default_value = "spectrum.csv")]
    pub out: PathBuf,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for `verify` and `oracle`.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Minimum prominence of reported peaks.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub min_prominence: f64,
    /// Reference mass (MeV) for percent deviations.
    #[arg(long, global = true)]
    pub reference_mass: Option<f64>,
    /// qed-lepton or z-boson; overrides the configuration.
    #[arg(long, global = true)]
    pub process: Option<String>,
    /// Trials for `verify` and `oracle`.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
}

/// Process exit status for an error: 2 for configuration problems, 3 for
/// I/O, 1 otherwise.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Io(_) => 3,
        _ => 1,
    }
}

/// Resolves the configuration file and `--set` overrides.
pub fn load_config(opts: &Options) -> Result<RunConfig> {
    let mut assignments: Vec<Assignment> = Vec::new();
    if let Some(path) = &opts.config {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        assignments.extend(config::parse_text(&text, &path.display().to_string())?);
    }
    for s in &opts.set {
        assignments.push(config::parse_assignment(s, "--set")?);
    }
    let process = opts.process.as_deref().map(config::parse_process).transpose()?;
    config::build(&assignments, process)
}

/// `--threads`, else `MSPEC_THREADS`, else 0.
pub fn resolve_threads(flag: Option<usize>, env: Option<&str>) -> Result<usize> {
    match (flag, env) {
        (Some(n), _) => Ok(n),
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got '{v}'"))),
        (None, None) => Ok(0),
    }
}

/// The CSV document for a spectrum: header, one row per bin, then the run
/// configuration and peak rows as `#` comments.
pub fn spectrum_csv(cfg: &RunConfig, curve: &SpectrumCurve, peaks: &PeakReport) -> String {
    let mut s = String::from("m_prime,sigma\n");
    for (m, v) in &curve.bins {
        s.push_str(&format!("{},{}\n", format_float(*m), format_float(*v)));
    }
    for line in cfg.to_lines() {
        s.push_str(&format!("# {line}\n"));
    }
    s.push_str(&peaks.csv_comments());
    s
}

/// Reads the `(mass, density)` rows of a spectrum CSV.
pub fn read_spectrum_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut bins = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (n == 0 && line == "m_prime,sigma") {
            continue;
        }
        let bad = || Error::Config(format!("line {}: expected 'mass,density', got '{line}'", n + 1));
        let (a, b) = line.split_once(',').ok_or_else(bad)?;
        let m: f64 = a.trim().parse().map_err(|_| bad())?;
        let v: f64 = b.trim().parse().map_err(|_| bad())?;
        bins.push((m, v));
    }
    if bins.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Config("bin masses must be strictly increasing".into()));
    }
    Ok(bins)
}

/// A gnuplot script plotting `csv` to a PNG beside it.
pub fn plot_script(csv: &Path, process: Process) -> String {
    let name = csv.display().to_string().replace('\'', "");
    let xlabel = match process {
        Process::QedLepton => "m' (MeV)",
        Process::ZBoson => "M (MeV)",
    };
    format!(
        "set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set terminal pngcairo size 960,600\n\
         set output '{name}.png'\n\
         set title 'integral mass spectrum, {proc}'\n\
         set xlabel \"{xlabel}\"\n\
         set ylabel 'density'\n\
         set key off\n\
         set grid\n\
         plot '{name}' using 1:2 skip 1 with linespoints pt 7\n",
        proc = process.name(),
    )
}

fn print_checks(out: &mut impl Write, reports: &[CheckReport]) -> Result<bool> {
    let mut ok = true;
    for r in reports {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{verdict} {}: {} trials, max residual {:.3e} (tolerance {:.0e}, worst trial {})",
            r.name, r.trials, r.max_residual, r.tolerance, r.worst_trial
        )?;
        ok &= r.passed();
    }
    Ok(ok)
}

/// Executes a parsed command line, writing reports to `out`.
pub fn run(cli: &Cli, out: &mut impl Write) -> Result<()> {
    let opts = &cli.options;
    if !(opts.min_prominence >= 0.0) {
        return Err(Error::Config("--min-prominence must be non-negative".into()));
    }
    if let Some(r) = opts.reference_mass {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Config("--reference-mass must be positive".into()));
        }
    }
    match &cli.command {
        Command::Spectrum => {
            let cfg = load_config(opts)?;
            let threads = resolve_threads(opts.threads, std::env::var(THREADS_ENV).ok().as_deref())?;
            let curve = integral_mass_spectrum(&cfg.spec(), &cfg.quadrature, threads)?;
            let peaks = report(&curve, opts.min_prominence, opts.reference_mass);
            fs::write(&opts.out, spectrum_csv(&cfg, &curve, &peaks))?;
            let mut plot = opts.out.clone().into_os_string();
            plot.push(".plot");
            fs::write(&plot, plot_script(&opts.out, cfg.process))?;
            writeln!(
                out,
                "{} spectrum, {} bins -> {}",
                cfg.process.name(),
                curve.bins.len(),
                opts.out.display()
            )?;
            write!(out, "{}", peaks.table())?;
        }
        Command::Peaks { csv } => {
            let bins = read_spectrum_csv(&fs::read_to_string(csv)?)?;
            write!(
                out,
                "{}",
                report_bins(&bins, opts.min_prominence, opts.reference_mass).table()
            )?;
        }
        Command::Verify => {
            let reports = verify_all(RngSeed(opts.seed), opts.trials.unwrap_or(1000).max(1));
            if !print_checks(out, &reports)? {
                return Err(Error::Verification("covariance checks failed".into()));
            }
        }
        Command::Oracle => {
            let cfg = load_config(opts)?;
            let trials = opts.trials.unwrap_or(200).max(1);
            let specs = [
                ProcessSpec::qed_lepton(cfg.m, cfg.alpha),
                ProcessSpec::z_boson(cfg.m_e, cfg.m_mu, cfg.alpha_w),
            ];
            let reports: Vec<_> = specs
                .iter()
                .map(|s| check_phi_oracle(s, RngSeed(opts.seed), trials))
                .collect();
            if !print_checks(out, &reports)? {
                return Err(Error::Verification("oracle comparison failed".into()));
            }
        }
    }
    Ok(())
}

/// Parses `std::env::args`, runs, and maps errors to exit codes.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mspec: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
