//! `chernoff`: tabulate densities, run the verification suite, simulate, and
//! compare quadrature with Monte Carlo.
//!
//! Exit codes: 0 ok, 1 a check failed, 2 usage error, 3 numerical or I/O failure.

use chernoff::chernoff::{self as ch, NumericsSpec, Solver, StartState, TableKind};
use chernoff::mcsim::{self, McConfig};
use chernoff::verify::{self, Profile, Suite};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "chernoff", version, about = "Chernoff's distribution and first passage of W(t) - t^2")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "CHERNOFF_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate a density on a uniform grid as CSV.
    #[command(allow_negative_numbers = true)]
    Tabulate(TabulateArgs),
    /// Run the verification suite; exit 1 if any check fails.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Run a simulation and write samples or a histogram as CSV.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Quadrature against Monte Carlo, side by side.
    #[command(allow_negative_numbers = true)]
    Compare(CompareArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct NumericsArgs {
    /// Half the number of nodes on the Bromwich contour.
    #[arg(long, default_value_t = 20)]
    bromwich_nodes: usize,
    /// Absolute tolerance of time integrals over h.
    #[arg(long, default_value_t = 1e-14)]
    time_abs_tol: f64,
    /// Relative tolerance of the imaginary-axis integrals.
    #[arg(long, default_value_t = 1e-12)]
    axis_rel_tol: f64,
    /// Initial trapezoid step of the imaginary-axis integrals.
    #[arg(long, default_value_t = 0.5)]
    axis_step: f64,
    /// Truncation of the x-integral defining psi.
    #[arg(long, default_value_t = 8.0)]
    psi_x_max: f64,
    /// Absolute tolerance of the x-integral defining psi.
    #[arg(long, default_value_t = 1e-10)]
    psi_abs_tol: f64,
    /// Largest t in the extrapolation giving psi(0).
    #[arg(long, default_value_t = 0.04)]
    psi_zero_delta: f64,
    /// Finite-difference step for the one-sided maximum density.
    #[arg(long, default_value_t = 1e-4)]
    fd_step: f64,
}

impl NumericsArgs {
    fn spec(&self) -> NumericsSpec {
        NumericsSpec {
            bromwich_nodes: self.bromwich_nodes,
            time_abs_tol: self.time_abs_tol,
            axis_rel_tol: self.axis_rel_tol,
            axis_step: self.axis_step,
            psi_x_max: self.psi_x_max,
            fd_step: self.fd_step,
            psi_zero_delta: self.psi_zero_delta,
            psi_abs_tol: self.psi_abs_tol,
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct McArgs {
    /// Number of simulated paths.
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    /// Time step.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Horizon (each side for two-sided runs).
    #[arg(long, default_value_t = 4.0)]
    t_max: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Turn off the Brownian-bridge crossing and maximum corrections.
    #[arg(long)]
    no_bridge: bool,
}

impl McArgs {
    fn config(&self) -> McConfig {
        McConfig { n_paths: self.paths, dt: self.dt, t_max: self.t_max, seed: self.seed, bridge_correction: !self.no_bridge }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Which {
    /// f_Z(t), columns t,f
    Chernoff,
    /// two-sided maximum density, columns a,f
    Max2,
    /// joint density of (argmax, max), columns t,a,f
    Joint2,
    /// first-passage density from (s, x), columns t,f
    Firstpassage,
    /// phi(t), columns t,f
    Phi,
    /// h_x(t), columns t,f
    H,
}

#[derive(Args, Debug)]
struct TabulateArgs {
    #[arg(long, value_enum)]
    which: Which,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    step: f64,
    /// Second grid (a) for joint2.
    #[arg(long, default_value_t = 0.1)]
    a_from: f64,
    #[arg(long, default_value_t = 2.0)]
    a_to: f64,
    #[arg(long, default_value_t = 0.1)]
    a_step: f64,
    /// Start time for firstpassage.
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    /// Start level for firstpassage, or the level of h.
    #[arg(long, default_value_t = -1.0)]
    x: f64,
    /// Output path; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    numerics: NumericsArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum SuiteArg {
    All,
    Airy,
    Identities,
    Pde,
    Mc,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Divide every tolerance by 100 and include the unscaled Airy residuals.
    #[arg(long)]
    strict: bool,
    /// Line-delimited JSON report, one record per check.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    numerics: NumericsArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum SimWhat {
    /// argmax samples of two-sided W(t) - t^2
    Argmax,
    /// maximum samples of two-sided W(t) - t^2
    Max,
    /// hitting probability from (s, x)
    Hitting,
    /// first-passage histogram of driftless BM from z
    Passage,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    what: SimWhat,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long, default_value_t = -1.0)]
    x: f64,
    #[arg(long, default_value_t = 1.0)]
    z: f64,
    #[arg(long, default_value_t = 0.1)]
    bin_width: f64,
    #[arg(long, default_value_t = 50)]
    bins: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    mc: McArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Target {
    Argmax,
    Max,
    Hitting,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long, value_enum)]
    target: Target,
    /// Levels a for the maximum comparison.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.5,1.0")]
    a_grid: Vec<f64>,
    /// Width of the window around each a for the empirical density.
    #[arg(long, default_value_t = 0.02)]
    window: f64,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long, default_value_t = -1.0)]
    x: f64,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    numerics: NumericsArgs,
}

#[derive(Debug)]
enum Failure {
    Check,
    Usage(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

fn numerical<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Numerical(e.to_string())
}

/// Write `text` to `out` (or stdout); a file is written beside its target
/// and renamed into place, so a failure never leaves a partial file.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(numerical)
        }
        Some(p) => {
            let tmp = p.with_extension("partial");
            let res = std::fs::write(&tmp, text).and_then(|_| std::fs::rename(&tmp, p));
            if res.is_err() {
                let _ = std::fs::remove_file(&tmp);
            }
            res.map_err(|e| Failure::Numerical(format!("{}: {e}", p.display())))
        }
    }
}

fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(step > 0.0 && to >= from && from.is_finite() && to.is_finite()) {
        return Err(Failure::Usage(format!("invalid grid --from {from} --to {to} --step {step}")));
    }
    ch::uniform_grid(from, to, step).map_err(|e| Failure::Usage(e.to_string()))
}

fn tabulate(a: &TabulateArgs) -> Result<(), Failure> {
    let solver = Solver::new(a.numerics.spec());
    let ts = grid(a.from, a.to, a.step)?;
    let text = if a.which == Which::Joint2 {
        let as_ = grid(a.a_from, a.a_to, a.a_step)?;
        let rows = solver.tabulate_joint(&ts, &as_).map_err(numerical)?;
        let mut s = String::from("t,a,f\n");
        for (t, aa, f) in rows {
            let _ = writeln!(s, "{t:.16e},{aa:.16e},{f:.16e}");
        }
        s
    } else {
        let kind = match a.which {
            Which::Chernoff => TableKind::Argmax,
            Which::Max2 => TableKind::JointMarginal,
            Which::Phi => TableKind::Phi,
            Which::H => {
                if !(a.x < 0.0) {
                    return Err(Failure::Usage(format!("--x must be negative for h (got {})", a.x)));
                }
                TableKind::HKernel { x: a.x }
            }
            Which::Firstpassage => {
                let state = StartState::new(a.s, a.x).map_err(|e| Failure::Usage(e.to_string()))?;
                TableKind::FirstPassage { state }
            }
            Which::Joint2 => unreachable!(),
        };
        let table = solver.tabulate(kind, &ts).map_err(numerical)?;
        if !table.failed.is_empty() {
            return Err(Failure::Numerical(format!(
                "{} grid points failed, first at {}",
                table.failed.len(),
                table.grid[table.failed[0]]
            )));
        }
        eprintln!("trapezoid mass {:.12}", table.trapezoid_mass());
        if let Some(m) = table.meta.mass_target {
            eprintln!("mass target {m:.12} (full range)");
        }
        table.to_csv()
    };
    emit(a.out.as_deref(), &text)
}

fn verify_cmd(a: &VerifyArgs) -> Result<(), Failure> {
    let mut profile = if a.strict { Profile::strict() } else { Profile::default() };
    profile.suites = match a.suite {
        SuiteArg::All => vec![Suite::Airy, Suite::Identities, Suite::Pde, Suite::Mc],
        SuiteArg::Airy => vec![Suite::Airy],
        SuiteArg::Identities => vec![Suite::Identities],
        SuiteArg::Pde => vec![Suite::Pde],
        SuiteArg::Mc => vec![Suite::Mc],
    };
    profile.numerics = a.numerics.spec();
    profile.mc = a.mc.config();
    profile.mc.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let t0 = Instant::now();
    let reports = verify::run_all(&profile).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut human = String::new();
    let mut records = String::new();
    for r in &reports {
        let _ = writeln!(
            human,
            "{} {:<44} computed {:>22.15e} target {:>22.15e} err {:.2e} tol {:.2e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.computed,
            r.target,
            r.abs_err,
            r.tol
        );
        records.push_str(&r.to_record_json());
        records.push('\n');
        eprintln!("{:>8} ms  {}", r.runtime_ms, r.name);
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    let _ = writeln!(human, "{} of {} checks passed", reports.len() - failed.len(), reports.len());
    if !failed.is_empty() {
        let _ = writeln!(human, "failing: {}", failed.join(", "));
    }
    eprintln!("total {:.1} s", t0.elapsed().as_secs_f64());
    emit(None, &human)?;
    if let Some(p) = &a.report {
        emit(Some(p), &records)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let cfg = a.mc.config();
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let text = match a.what {
        SimWhat::Argmax | SimWhat::Max => {
            let paths = mcsim::simulate_two_sided(&cfg).map_err(numerical)?;
            let mut s = String::from("value\n");
            for p in paths {
                let v = if a.what == SimWhat::Argmax { p.argmax } else { p.max };
                let _ = writeln!(s, "{v:.16e}");
            }
            s
        }
        SimWhat::Hitting => {
            let st = StartState::new(a.s, a.x).map_err(|e| Failure::Usage(e.to_string()))?;
            let e = mcsim::estimate_hitting_prob(st, &cfg).map_err(|e| Failure::Usage(e.to_string()))?;
            format!(
                "probability,std_error,horizon_bound\n{:.16e},{:.16e},{:.16e}\n",
                e.probability, e.std_error, e.horizon_bound
            )
        }
        SimWhat::Passage => {
            if !(a.bin_width > 0.0 && a.bins > 0) {
                return Err(Failure::Usage("--bin-width and --bins must be positive".into()));
            }
            mcsim::simulate_pure_bm_passage(a.z, &cfg, a.bin_width, a.bins)
                .map_err(|e| Failure::Usage(e.to_string()))?
                .to_csv()
        }
    };
    emit(a.out.as_deref(), &text)
}

fn compare(a: &CompareArgs) -> Result<(), Failure> {
    let cfg = a.mc.config();
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let solver = Solver::new(a.numerics.spec());
    let mut out = String::new();
    let mut agree = true;
    match a.target {
        Target::Argmax => {
            let cdf = ch::ArgmaxCdf::new(&solver, 4.0, 0.005).map_err(numerical)?;
            let paths = mcsim::simulate_two_sided(&cfg).map_err(numerical)?;
            let mut sample: Vec<f64> = paths.iter().map(|p| p.argmax).collect();
            let (mean, se) = mcsim::mean_and_se(&sample);
            let sq: Vec<f64> = sample.iter().map(|t| t * t).collect();
            let (m2, se2) = mcsim::mean_and_se(&sq);
            let d = mcsim::ks_statistic(&mut sample, |t| cdf.eval(t));
            let bound = 1.63 / (cfg.n_paths as f64).sqrt() + 0.003;
            let q2 = verify::moments(&solver).map_err(numerical)?;
            agree = d < bound;
            out.push_str("quantity,quadrature,monte_carlo,std_error\n");
            let _ = writeln!(out, "mean,{:.16e},{mean:.16e},{se:.16e}", q2.e_tau);
            let _ = writeln!(out, "second_moment,{:.16e},{m2:.16e},{se2:.16e}", q2.e_tau2);
            let _ = writeln!(out, "ks_distance,0,{d:.16e},{bound:.16e}");
        }
        Target::Max => {
            if !(a.window > 0.0) || a.a_grid.iter().any(|&x| !(x > 0.0)) {
                return Err(Failure::Usage("--a-grid values and --window must be positive".into()));
            }
            let paths = mcsim::simulate_two_sided(&cfg).map_err(numerical)?;
            let n = paths.len() as f64;
            let depth = a.a_grid.iter().fold(0.0f64, |m, &x| m.max(x)) + a.window;
            let profile = ch::SurvivalProfile::new(&solver, 0.0, depth).map_err(numerical)?;
            out.push_str("a,quadrature,monte_carlo,std_error\n");
            for &lvl in &a.a_grid {
                let (lo, hi) = (lvl - 0.5 * a.window, lvl + 0.5 * a.window);
                let c = paths.iter().filter(|p| p.max > lo && p.max <= hi).count() as f64;
                let p = c / n;
                let mc = p / a.window;
                let se = (p * (1.0 - p) / n).sqrt() / a.window;
                // window average of the density by 3-point Gauss-Legendre
                let r = (0.6f64).sqrt() * 0.5 * a.window;
                let mut q = 0.0;
                for (off, w) in [(-r, 5.0 / 18.0), (0.0, 8.0 / 18.0), (r, 5.0 / 18.0)] {
                    q += w * solver.max_density_two_sided_with(&profile, lvl + off).map_err(numerical)?.value;
                }
                agree &= (q - mc).abs() <= 3.0 * se;
                let _ = writeln!(out, "{lvl:.16e},{q:.16e},{mc:.16e},{se:.16e}");
            }
        }
        Target::Hitting => {
            let st = StartState::new(a.s, a.x).map_err(|e| Failure::Usage(e.to_string()))?;
            let q = solver.hitting_prob(st).map_err(numerical)?;
            let m = mcsim::estimate_hitting_prob(st, &cfg).map_err(|e| Failure::Usage(e.to_string()))?;
            agree = (q.value - m.probability).abs() <= 3.0 * m.std_error + m.horizon_bound;
            out.push_str("s,x,quadrature,monte_carlo,std_error\n");
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", a.s, a.x, q.value, m.probability, m.std_error);
        }
    }
    emit(None, &out)?;
    if agree {
        Ok(())
    } else {
        eprintln!("quadrature and Monte Carlo disagree beyond the stated bound");
        Err(Failure::Check)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let res = match &cli.command {
        Command::Tabulate(a) => tabulate(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::Compare(a) => compare(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Check => {}
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
