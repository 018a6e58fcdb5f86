//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid input (bad parameters, grid
//! guards, unreadable files), 3 when a numerical method fails to converge.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;

use crate::cavity::{quasi_modes_approx, quasi_modes_exact, MirrorSpec};
use crate::error::{Error, Result};
use crate::harness::config::{ConfigFile, GridConfig, ParamsConfig, RunConfig, SpectrumConfig};
use crate::harness::figures::figure;
use crate::harness::output::{fmt_num, CsvTable};
use crate::harness::sweep::{run_engine, sweep, sweep_table, SweepAxis, SweepSpec};
use crate::harness::{echo_grid, echo_params, echo_spectrum};
use crate::model::{Method, ProbabilityResult};
use crate::oracle::{simulate_detailed, InputChannel};
use crate::par::Execution;
use crate::spectra::SpectralShape;

#[derive(Debug, Parser)]
#[command(name = "entangle", version, about = "Single-photon entanglement of two atoms in a leaky cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Resonances of the one-sided cavity.
    Quasimodes(QuasimodeArgs),
    /// Photon initially inside the cavity.
    Cavity(RunArgs),
    /// Photon packet injected from outside.
    Injected(RunArgs),
    /// Time-domain simulation of one experiment.
    Oracle(OracleArgs),
    /// One-dimensional parameter sweep.
    Sweep(SweepArgs),
    /// Write the data for figure 3, 4 or 5.
    Figure(FigureArgs),
}

#[derive(Debug, Args, Clone, Default)]
struct RunArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_l: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_e: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_lr: Option<f64>,
    /// cavity_photon, lorentzian, gaussian or tabulated.
    #[arg(long)]
    spectrum: Option<String>,
    /// Spectral width in absolute units.
    #[arg(long, allow_hyphen_values = true)]
    kappa_in: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    peak_offset: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// CSV table (dk, re[, im]) for the tabulated spectrum.
    #[arg(long)]
    spectrum_file: Option<PathBuf>,
    #[arg(long)]
    n_modes: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    bandwidth: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_final: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<f64>,
    /// Comma-separated subset of closed_form, quadrature, oracle.
    #[arg(long, value_delimiter = ',')]
    engines: Option<Vec<String>>,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Write populations against time to this CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// ratio_lambdaL_over_lambdaR, kappa_in_over_kappa, delta_e or gamma.
    #[arg(long)]
    axis: String,
    #[arg(long, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, default_value_t = 51)]
    steps: usize,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// 3, 4 or 5.
    id: u8,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct QuasimodeArgs {
    /// Thin-dielectric mirror strength.
    #[arg(long, conflicts_with_all = ["r_re", "r_im"])]
    zeta: Option<f64>,
    /// Real part of a constant lossless reflection coefficient.
    #[arg(long, allow_hyphen_values = true, requires = "r_im")]
    r_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "r_re")]
    r_im: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    n_lo: i64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 10)]
    n_hi: i64,
    /// approx, exact or both.
    #[arg(long, default_value = "both")]
    method: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn as_config(&self) -> Result<ConfigFile> {
        let engines = match &self.engines {
            Some(list) => Some(list.iter().map(|s| s.parse()).collect::<Result<Vec<Method>>>()?),
            None => None,
        };
        let grid = GridConfig { n_modes: self.n_modes, bandwidth: self.bandwidth, t_final: self.t_final, dt: self.dt, tau: None };
        Ok(ConfigFile {
            params: ParamsConfig {
                lambda_l: self.lambda_l,
                lambda_r: self.lambda_r,
                kappa: self.kappa,
                k_c: None,
                delta_e: self.delta_e,
                gamma: self.gamma,
                delta_lr: self.delta_lr,
            },
            spectrum: SpectrumConfig {
                shape: self.spectrum.clone().or(self.spectrum_file.as_ref().map(|_| "tabulated".into())),
                kappa_in: self.kappa_in,
                peak_offset: self.peak_offset,
                tau: self.tau,
                path: self.spectrum_file.clone(),
            },
            grid: (grid != GridConfig::default()).then_some(grid),
            engines,
            output_path: self.out.clone(),
        })
    }

    fn resolve(&self) -> Result<RunConfig> {
        let flags = self.as_config()?;
        let merged = match &self.config {
            Some(path) => ConfigFile::load(path)?.overridden_by(&flags),
            None => flags,
        };
        merged.resolve()
    }
}

fn emit(table: &CsvTable, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => table.save(path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn result_table(run: &RunConfig, results: &[ProbabilityResult]) -> CsvTable {
    let mut t = CsvTable::new(["engine", "p_l", "p_r", "p_loss", "err"]);
    t.meta("entangle-core", env!("CARGO_PKG_VERSION"));
    echo_params(&mut t, &run.params);
    echo_spectrum(&mut t, &run.spectrum);
    for r in results {
        t.push(vec![
            r.method.to_string(),
            fmt_num(r.p_l),
            fmt_num(r.p_r),
            fmt_num(r.p_loss),
            fmt_num(r.err_estimate),
        ]);
    }
    t
}

fn cmd_probabilities(args: &RunArgs, injected: bool) -> Result<()> {
    let run = args.resolve()?;
    let cavity = matches!(run.spectrum.shape, SpectralShape::CavityPhoton);
    if injected && cavity {
        return Err(Error::Config("injected needs --spectrum lorentzian, gaussian or tabulated".into()));
    }
    if !injected && !cavity {
        return Err(Error::Config("cavity runs use the cavity_photon spectrum".into()));
    }
    let engines = run.engines.clone().unwrap_or_else(|| {
        if !injected && run.params.gamma == 0.0 {
            vec![Method::ClosedForm, Method::Quadrature]
        } else {
            vec![Method::Quadrature]
        }
    });
    let grid = run.sim_grid();
    let results = engines
        .iter()
        .map(|&m| run_engine(m, &run.params, &run.spectrum, Some(&grid)))
        .collect::<Result<Vec<_>>>()?;
    let mut t = result_table(&run, &results);
    if engines.contains(&Method::Oracle) {
        echo_grid(&mut t, &grid);
    }
    emit(&t, run.output_path.as_ref())
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let run = args.run.resolve()?;
    let grid = run.sim_grid();
    let detail = simulate_detailed(&run.params, &run.spectrum, &grid, InputChannel::L, Execution::available())?;
    let mut t = result_table(&run, &[detail.result]);
    echo_grid(&mut t, &grid);
    t.meta("refined_p_r", fmt_num(detail.refined.p_r))
        .meta("refined_p_l", fmt_num(detail.refined.p_l))
        .meta("residual_excitation", fmt_num(detail.base.p_e));
    emit(&t, run.output_path.as_ref())?;
    if let Some(path) = &args.trace {
        let mut trace = CsvTable::new(["t", "p_e", "p_l", "p_r", "norm"]);
        echo_params(&mut trace, &run.params);
        echo_grid(&mut trace, &grid);
        for s in &detail.trace {
            trace.push(vec![fmt_num(s.t), fmt_num(s.p_e), fmt_num(s.p_l), fmt_num(s.p_r), fmt_num(s.norm)]);
        }
        trace.save(path)?;
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let axis: SweepAxis = args.axis.parse()?;
    let mut run_args = args.run.clone();
    if axis == SweepAxis::KappaInOverKappa && run_args.kappa_in.is_none() {
        // replaced on every row
        run_args.kappa_in = Some(1.0);
    }
    let run = run_args.resolve()?;
    let mut spec = SweepSpec::new(axis, args.lo, args.hi, args.steps, run.params, run.spectrum.clone());
    if let Some(engines) = &run.engines {
        spec.engines = engines.clone();
    }
    if spec.engines.contains(&Method::Oracle) {
        spec.grid = Some(run.sim_grid());
    }
    let rows = sweep(&spec)?;
    let mut t = sweep_table(&spec, &rows);
    t.metadata.insert(0, ("entangle-core".into(), env!("CARGO_PKG_VERSION").into()));
    emit(&t, run.output_path.as_ref())
}

fn cmd_quasimodes(args: &QuasimodeArgs) -> Result<()> {
    let mirror = match (args.zeta, args.r_re, args.r_im) {
        (Some(z), None, None) => MirrorSpec::thin_dielectric(z, args.length)?,
        (None, Some(re), Some(im)) => MirrorSpec::constant_lossless(C64::new(re, im), args.length)?,
        _ => return Err(Error::Config("give either --zeta or --r-re with --r-im".into())),
    };
    if args.n_lo > args.n_hi {
        return Err(Error::Config(format!("empty mode range {}..{}", args.n_lo, args.n_hi)));
    }
    let (approx, exact) = match args.method.as_str() {
        "approx" => (Some(quasi_modes_approx(&mirror, args.n_lo, args.n_hi)?), None),
        "exact" => (None, Some(quasi_modes_exact(&mirror, args.n_lo, args.n_hi)?)),
        "both" => (
            Some(quasi_modes_approx(&mirror, args.n_lo, args.n_hi)?),
            Some(quasi_modes_exact(&mirror, args.n_lo, args.n_hi)?),
        ),
        other => return Err(Error::Config(format!("unknown method `{other}` (approx, exact or both)"))),
    };
    let mut header = vec!["n"];
    if approx.is_some() {
        header.extend(["k_approx", "kappa_approx", "residual_approx", "fsr_variation"]);
    }
    if exact.is_some() {
        header.extend(["k_exact", "kappa_exact", "residual_exact"]);
    }
    if approx.is_some() && exact.is_some() {
        header.push("kappa_rel_diff");
    }
    let mut t = CsvTable::new(header);
    t.meta("entangle-core", env!("CARGO_PKG_VERSION"));
    match args.zeta {
        Some(z) => t.meta("mirror", "thin_dielectric").meta("zeta", fmt_num(z)),
        None => t
            .meta("mirror", "constant")
            .meta("r", format!("{} {}", fmt_num(args.r_re.unwrap_or(0.0)), fmt_num(args.r_im.unwrap_or(0.0)))),
    };
    t.meta("length", fmt_num(args.length));
    let count = (args.n_hi - args.n_lo + 1) as usize;
    for j in 0..count {
        let n = args.n_lo + j as i64;
        let mut row = vec![n.to_string()];
        if let Some(a) = &approx {
            let m = a[j];
            row.extend([fmt_num(m.k_n), fmt_num(m.kappa_n), fmt_num(m.residual), fmt_num(mirror.fsr_variation(m.k_n))]);
        }
        if let Some(e) = &exact {
            let m = e[j];
            row.extend([fmt_num(m.k_n), fmt_num(m.kappa_n), fmt_num(m.residual)]);
        }
        if let (Some(a), Some(e)) = (&approx, &exact) {
            row.push(fmt_num((a[j].kappa_n - e[j].kappa_n).abs() / e[j].kappa_n));
        }
        t.push(row);
    }
    emit(&t, args.out.as_ref())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Quasimodes(a) => cmd_quasimodes(&a),
        Command::Cavity(a) => cmd_probabilities(&a, false),
        Command::Injected(a) => cmd_probabilities(&a, true),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Figure(a) => {
            for p in figure(a.id, &a.out)? {
                eprintln!("wrote {}", p.display());
            }
            Ok(())
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() || matches!(e, Error::Io(_)) {
        2
    } else {
        3
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
