//! `lweak` command-line interface.
//!
//! Exit codes: 0 on success, 1 when a verification row is `VIOLATED`,
//! 2 on usage or configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lweak_core::blocks::{decompose, BlockScheme, DEFAULT_THETA};
use lweak_core::bounds::{slln_schedule, tail_bound, BoundParams};
use lweak_core::coefficients::{cox_grimmett, gamma_sequence, long_run_variance};
use lweak_core::models::{sample_path, ModelSpec};
use lweak_core::verify::{
    check_lipschitz_cov, check_newman, check_quasi_association_counterexample, check_tail_domination,
    clt_ks_distance, empirical_process_path, estimate_gamma_operator, fclt_increment_check, reports_to_csv,
    reports_to_json, slln_rate_fit, LipschitzFunctional, MCConfig, PiecewiseLinear, VerificationReport,
};

mod grid;

use grid::{parse_grid, parse_list};

pub const CHECKS: [(&str, &str); 8] = [
    ("cov", "Lipschitz covariance inequality for disjoint index sets"),
    ("tail", "tail of the odd block sum against the explicit exponential bound"),
    ("newman", "characteristic-function discrepancy against 4t² Σ (n-j) γ_j"),
    ("quasi", "search for a failure of quasi-association after g(x) = e^{-x}"),
    ("slln", "decay exponent of the 0.99-quantile of |S_n/n|"),
    ("clt", "Kolmogorov-Smirnov distance of S_n/√n to N(0, σ²)"),
    ("fclt", "increment variances and covariances of the partial-sum process"),
    ("emp", "empirical process endpoints and covariance operator"),
];

#[derive(Parser, Debug)]
#[command(name = "lweak", version, about = "Dependence coefficients, tail bounds and Monte Carlo checks for L-weakly dependent sequences")]
struct Cli {
    /// List the available verification checks and exit.
    #[arg(long)]
    list_checks: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dependence coefficients γ_k and tail sums v(k) as CSV `k,gamma,v`.
    Coeffs {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n_max: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Block sums Y_j of one sampled path.
    Decompose {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_THETA)]
        theta: f64,
        /// Block length; overrides --theta.
        #[arg(long)]
        p_n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Explicit tail bound for the odd block sum as CSV `x,bound,valid`.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_THETA)]
        theta: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// `start:stop:step` or a comma-separated list.
        #[arg(long)]
        x_grid: String,
        /// Model supplying c, σ² and v(p_n).
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        sigma2: Option<f64>,
        /// Cox-Grimmett coefficient v(p_n) when no model is given.
        #[arg(long, default_value_t = 0.0)]
        v_pn: f64,
        /// Overrides the d_n of the strong-law schedule.
        #[arg(long)]
        d_n: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run one Monte Carlo check and write its report.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write to this file (atomically) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    Cov,
    Tail,
    Newman,
    Quasi,
    Slln,
    Clt,
    Fclt,
    Emp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    check: Check,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    out: Format,
    #[arg(long, default_value_t = 3.0)]
    error_multiplier: f64,
    /// Path length (tail, newman, clt, fclt, emp).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Overrides the d_n of the strong-law schedule (tail).
    #[arg(long)]
    d_n: Option<f64>,
    /// Thresholds x (tail).
    #[arg(long, default_value = "0:400:25")]
    x_grid: String,
    /// Frequencies t (newman).
    #[arg(long, default_value = "0.25,0.5,1")]
    t_grid: String,
    /// 1-based index sets (cov).
    #[arg(long, default_value = "1")]
    i: String,
    #[arg(long, default_value = "2")]
    j: String,
    /// Clip level for the cov test functions; identity when absent.
    #[arg(long)]
    clip: Option<f64>,
    /// α_1 grid and α_2 (quasi).
    #[arg(long, default_value = "1:50:1")]
    alpha1_grid: String,
    #[arg(long, default_value_t = 1.0)]
    alpha2: f64,
    /// Path lengths (slln).
    #[arg(long, default_value = "256,512,1024,2048,4096,8192,16384,32768,65536")]
    n_grid: String,
    #[arg(long, default_value_t = 0.99)]
    quantile: f64,
    /// Long-run variance (clt, fclt); derived from the model when absent.
    #[arg(long)]
    sigma2: Option<f64>,
    /// Increment times (fclt).
    #[arg(long, default_value = "0.25,0.5,1")]
    times: String,
    /// Evaluation points of ζ_n and Γ(s, t) (emp).
    #[arg(long, default_value = "0:1:0.1")]
    grid: String,
    #[arg(long, default_value_t = 0.3)]
    s: f64,
    #[arg(long, default_value_t = 0.7)]
    t: f64,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure carrying the exit code and a one-line message.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

impl From<lweak_core::Error> for Failure {
    fn from(e: lweak_core::Error) -> Self {
        usage(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
            return 2;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message.replace('\n', " "));
            f.code
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    if cli.list_checks {
        for (name, what) in CHECKS {
            println!("{name}\t{what}");
        }
        return Ok(0);
    }
    match cli.command {
        None => Err(usage("no subcommand given; try --help")),
        Some(Command::Coeffs { model, n_max, output }) => {
            let model = load_model(&model)?;
            let gamma = gamma_sequence(&model)?;
            let mut out = String::from("k,gamma,v\n");
            for k in 1..=n_max {
                out.push_str(&format!("{k},{},{}\n", num(gamma.gamma(k)), num(cox_grimmett(&gamma, k))));
            }
            emit(&out, &output)?;
            Ok(0)
        }
        Some(Command::Decompose {
            model,
            n,
            theta,
            p_n,
            seed,
            output,
        }) => {
            let model = load_model(&model)?;
            let scheme = match p_n {
                Some(p) => BlockScheme::new(n, p)?,
                None => {
                    check_theta(theta)?;
                    BlockScheme::with_theta(n, theta)?
                }
            };
            let path = sample_path(&model, n, seed)?;
            let d = decompose(&path, &scheme)?;
            let mut out = String::from("j,Y\n");
            for (j, y) in d.blocks.iter().enumerate() {
                out.push_str(&format!("{},{}\n", j + 1, num(*y)));
            }
            out.push_str("\nquantity,value\n");
            for (k, v) in [
                ("n", n as f64),
                ("p_n", scheme.p_n as f64),
                ("r_n", scheme.r_n as f64),
                ("z_odd", d.z_odd),
                ("z_even", d.z_even),
                ("remainder", d.remainder),
                ("sum", path.sum()),
            ] {
                out.push_str(&format!("{k},{}\n", num(v)));
            }
            emit(&out, &output)?;
            Ok(0)
        }
        Some(Command::Bound {
            n,
            theta,
            alpha,
            x_grid,
            model,
            c,
            sigma2,
            v_pn,
            d_n,
            output,
        }) => {
            let xs = parse_grid(&x_grid)?;
            let (c, sigma2, v_pn, p_override) = match model {
                Some(path) => {
                    let model = load_model(&path)?;
                    let c = model
                        .sup_abs()
                        .ok_or_else(|| usage("bound needs a stationary bounded model"))?;
                    let sigma2 = long_run_variance(&model)?.sigma2;
                    (c, sigma2, None, Some(gamma_sequence(&model)?))
                }
                None => {
                    let c = c.ok_or_else(|| usage("give --model or both --c and --sigma2"))?;
                    let sigma2 = sigma2.ok_or_else(|| usage("give --model or both --c and --sigma2"))?;
                    if !(v_pn >= 0.0) {
                        return Err(usage(format!("--v-pn must be nonnegative, got {v_pn}")));
                    }
                    (c, sigma2, Some(v_pn), None)
                }
            };
            let schedule = slln_schedule(n, theta, alpha, sigma2, c)?;
            let params = BoundParams::new(c, sigma2, schedule.p_n, d_n.unwrap_or(schedule.d_n), n)?;
            let v = match (v_pn, p_override) {
                (Some(v), _) => v,
                (None, Some(gamma)) => cox_grimmett(&gamma, schedule.p_n),
                (None, None) => unreachable!(),
            };
            let mut out = String::from("x,bound,valid\n");
            for x in xs {
                let b = tail_bound(x, &params, v);
                out.push_str(&format!("{},{},{}\n", num(x), num(b.value), b.valid));
            }
            emit(&out, &output)?;
            Ok(0)
        }
        Some(Command::Verify(args)) => run_verify(args),
    }
}

fn run_verify(a: VerifyArgs) -> CliResult<i32> {
    let cfg = MCConfig::with_error_multiplier(a.replicates, a.seed, a.error_multiplier)?;
    let model = load_model(&a.model)?;
    let reports: Vec<VerificationReport> = match a.check {
        Check::Cov => {
            let i_set = parse_indices(&a.i)?;
            let j_set = parse_indices(&a.j)?;
            let profile = match a.clip {
                Some(c) => PiecewiseLinear::clip(c)?,
                None => PiecewiseLinear::identity(),
            };
            let f = LipschitzFunctional::new(profile.clone(), vec![1.0; i_set.len()])?;
            let g = LipschitzFunctional::new(profile, vec![1.0; j_set.len()])?;
            let n = a.n.unwrap_or_else(|| i_set.iter().chain(&j_set).copied().max().unwrap_or(1));
            vec![check_lipschitz_cov(&model, &f, &g, &i_set, &j_set, n, &cfg)?]
        }
        Check::Tail => {
            let n = a.n.unwrap_or(4096);
            let xs = parse_grid(&a.x_grid)?;
            check_theta(a.theta)?;
            let c = model
                .sup_abs()
                .ok_or_else(|| usage("tail check needs a stationary bounded model"))?;
            let sigma2 = long_run_variance(&model)?.sigma2;
            let schedule = slln_schedule(n, a.theta, a.alpha, sigma2, c)?;
            let scheme = BlockScheme::new(n, schedule.p_n)?;
            check_tail_domination(&model, &scheme, a.d_n.unwrap_or(schedule.d_n), &xs, &cfg)?
        }
        Check::Newman => {
            let ts = parse_list(&a.t_grid)?;
            check_newman(&model, a.n.unwrap_or(8), &ts, &cfg)?
        }
        Check::Quasi => {
            let grid = parse_grid(&a.alpha1_grid)?;
            check_quasi_association_counterexample(&grid, a.alpha2, model.law(), &cfg)?.to_reports(&cfg)
        }
        Check::Slln => {
            let grid: Vec<usize> = parse_indices(&a.n_grid)?;
            vec![slln_rate_fit(&model, &grid, a.quantile, &cfg)?.report]
        }
        Check::Clt => clt_ks_distance(&model, a.n.unwrap_or(4096), a.sigma2, &cfg)?.reports,
        Check::Fclt => {
            let times = parse_list(&a.times)?;
            fclt_increment_check(&model, &times, a.n.unwrap_or(4096), a.sigma2, &cfg)?
        }
        Check::Emp => emp_reports(&model, a.n.unwrap_or(1024), &parse_grid(&a.grid)?, a.s, a.t, &cfg)?,
    };
    let text = match a.out {
        Format::Csv => reports_to_csv(&reports),
        Format::Json => reports_to_json(&reports),
    };
    emit(&text, &a.output)?;
    Ok(if reports.iter().any(|r| r.is_violated()) { 1 } else { 0 })
}

/// Endpoint identities of one ζ_n path, then Γ(s, t): against
/// `min(s, t) - st` for i.i.d. models, otherwise nonnegativity of Γ(s, s).
fn emp_reports(
    model: &ModelSpec,
    n: usize,
    grid: &[f64],
    s: f64,
    t: f64,
    cfg: &MCConfig,
) -> CliResult<Vec<VerificationReport>> {
    let mut ends = vec![0.0, 1.0];
    ends.extend_from_slice(grid);
    let path = empirical_process_path(model, n, &ends, cfg.seed)?;
    let endpoint_error = path.values[0].abs() + path.values[1].abs();
    let sup = path.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = vec![VerificationReport::judge(
        "emp_endpoints",
        format!("n={n};sup={sup};transform_lipschitz={}", path.transform_lipschitz),
        endpoint_error,
        0.0,
        0.0,
        true,
        cfg,
    )];
    if matches!(model, ModelSpec::Iid { .. }) {
        let est = estimate_gamma_operator(model, s, t, None, cfg)?;
        let exact = s.min(t) - s * t;
        out.push(VerificationReport::judge(
            "emp_gamma",
            format!("s={s};t={t};gamma={};exact={exact}", est.value),
            (est.value - exact).abs(),
            est.se,
            0.0,
            true,
            cfg,
        ));
    }
    let diag = estimate_gamma_operator(model, s, s, None, cfg)?;
    out.push(VerificationReport::judge(
        "emp_gamma_diag",
        format!("s={s};gamma={}", diag.value),
        -diag.value,
        diag.se,
        0.0,
        true,
        cfg,
    ));
    Ok(out)
}

fn check_theta(theta: f64) -> CliResult<()> {
    if theta > 0.5 && theta < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("theta must lie in (1/2, 1), got {theta}")))
    }
}

fn parse_indices(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("expected a positive integer, got {p:?}")))
        })
        .collect()
}

fn load_model(path: &Path) -> CliResult<ModelSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read model {}: {e}", path.display())))?;
    ModelSpec::from_json(&text).map_err(|e| usage(format!("malformed model {}: {e}", path.display())))
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Writes to stdout, or to a temporary file in the target directory that is
/// then renamed over the destination.
fn emit(text: &str, output: &OutputArgs) -> CliResult<()> {
    match &output.output {
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| usage(format!("cannot write stdout: {e}")))?;
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let fail = |e: std::io::Error| usage(format!("cannot write {}: {e}", path.display()));
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
            tmp.write_all(text.as_bytes()).map_err(fail)?;
            tmp.persist(path).map_err(|e| fail(e.error))?;
            Ok(())
        }
    }
}
