//! The `otelbaev` command-line driver.
//!
//! Every subcommand writes one table (CSV with 17 significant digits, or JSON
//! carrying the same records) and a short summary. With `--out` the table
//! goes to the file and the summary to standard output; otherwise the table
//! goes to standard output followed by `# `-prefixed summary lines.
//!
//! Exit codes: 0 success/PASS, 1 verification FAIL, 2 usage error, 3 numeric
//! error. `OTELBAEV_THREADS` caps the worker pool.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::average::{d_of_x, DEFAULT_D_TOL};
use crate::coefficient::{catalog, CoefficientFunction, UnimodalPair};
use crate::covering::{d_covering, verify_covering, Stop};
use crate::equivalence::{verify_example1, verify_example2, verify_thm33, verify_thm35};
use crate::error::Error;
use crate::expectations as ex;
use crate::grid::{grid, sweep, Spacing};
use crate::kclass::{membership_report, KVerdict};
use crate::kernel::{
    admissibility_estimate, forcing_norm, lp_theta_norm, residual_check, standard_family, Forcing, GreenSolution,
    SpaceParams, Weight, DEFAULT_FD_STEP,
};
use crate::quadrature::{Direction, QuadratureConfig};
use crate::suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "OTELBAEV_THREADS";

#[derive(Debug, Parser)]
#[command(name = "otelbaev", version, about = "Otelbaev averages and Green-operator diagnostics for -y' + q y = f")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Uniform,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThetaArg {
    One,
    Qstar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Coefficient: const:<k>, square, example1:<alpha>:<beta>, example2.
    #[arg(long, default_value = "example2")]
    pub coef: String,
    /// Half-width of the grid [-X, X].
    #[arg(long)]
    pub window: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value = "uniform")]
    pub spacing: SpacingArg,
    /// Exponent p of L_p.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, value_enum, default_value = "qstar")]
    pub theta: ThetaArg,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub exp_cutoff: Option<f64>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// d(x), q*(x) and the defining-identity residual on a grid.
    Profile(#[command(flatten)] Common),
    /// An R(x, b*d) covering of a half-axis.
    Cover {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long, default_value_t = 50)]
        cells: usize,
        /// Stop once the far endpoint passes this point instead of after --cells.
        #[arg(long)]
        reach: Option<f64>,
        #[arg(long, value_enum, default_value = "forward")]
        direction: DirectionArg,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
    },
    /// kappa1, kappa2 and q1*d - 1 on a grid, with an empirical (a, b, gamma).
    Kclass {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10.0)]
        x0: f64,
    },
    /// y = Gf on a grid with the equation residual and norm summary.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Right-hand side from the fixed family.
        #[arg(long = "f", default_value = "gauss")]
        forcing: String,
    },
    /// J, I, S against d.
    VerifyThm33(#[command(flatten)] Common),
    /// F against u*v*(d1 + d2) for a unimodal pair.
    VerifyThm35 {
        #[command(flatten)]
        common: Common,
        /// exp, cubic or cubic-sym.
        #[arg(long, default_value = "cubic")]
        pair: String,
    },
    /// The oscillating coefficient family (1 + cos((1+x^2)^beta)) / (1+x^2)^alpha.
    Example1 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = ex::EXAMPLE1_ALPHA)]
        alpha: f64,
        #[arg(long, default_value_t = ex::EXAMPLE1_BETA)]
        beta: f64,
    },
    /// F1 against cosh(x cos x)/(x^2 + 1) and the e^{±2} sandwich.
    Example2(#[command(flatten)] Common),
    /// ||Gf||_{p,theta} / ||f||_p over the fixed family.
    Admissible(#[command(flatten)] Common),
    /// The full acceptance battery.
    Suite {
        #[command(flatten)]
        common: Common,
        /// Run only these criteria (1-10).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(String),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Configuration(_) => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

/// A table of records plus ordered summary lines.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, String)>,
    /// `Some(false)` marks a verification FAIL.
    pub verdict: Option<bool>,
}

impl Report {
    fn new(headers: &[&'static str]) -> Self {
        Self { headers: headers.to_vec(), ..Default::default() }
    }

    fn row(&mut self, cells: Vec<Cell>) {
        self.rows.push(cells);
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    fn judge(&mut self, passed: bool) {
        self.verdict = Some(passed);
        self.note("result", if passed { "PASS" } else { "FAIL" });
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.headers.join(",");
        s.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::csv).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (h, c) in self.headers.iter().zip(r) {
                    m.insert((*h).to_string(), c.json());
                }
                Value::Object(m)
            })
            .collect();
        let mut summary = Map::new();
        for (k, v) in &self.summary {
            summary.insert(k.clone(), json!(v));
        }
        let doc = json!({ "rows": rows, "summary": Value::Object(summary) });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary_text(&self, prefix: &str) -> String {
        let mut s = String::new();
        for (k, v) in &self.summary {
            let _ = writeln!(s, "{prefix}{k}: {v}");
        }
        s
    }
}

fn config(c: &Common, base: QuadratureConfig) -> CliResult<QuadratureConfig> {
    let cfg = QuadratureConfig {
        abs_tol: c.abs_tol.unwrap_or(base.abs_tol),
        rel_tol: c.rel_tol.unwrap_or(base.rel_tol),
        exponent_cutoff: c.exp_cutoff.unwrap_or(base.exponent_cutoff),
        ..base
    };
    cfg.validate()?;
    Ok(cfg)
}

fn coefficient(label: &str) -> CliResult<CoefficientFunction> {
    catalog::from_label(label).map_err(|e| CliError::Usage(e.to_string()))
}

fn points(c: &Common, window: f64, n: usize) -> CliResult<Vec<f64>> {
    let spacing = match c.spacing {
        SpacingArg::Uniform => Spacing::Uniform,
        SpacingArg::Log => Spacing::Log,
    };
    Ok(grid(c.window.unwrap_or(window), c.n.unwrap_or(n), spacing)?)
}

fn space(c: &Common, q: &CoefficientFunction) -> CliResult<SpaceParams> {
    let theta = match c.theta {
        ThetaArg::One => Weight::One,
        ThetaArg::Qstar => Weight::QStar(q.clone()),
    };
    Ok(SpaceParams::new(c.p, theta)?)
}

fn profile(c: &Common) -> CliResult<Report> {
    let q = coefficient(&c.coef)?;
    let xs = points(c, 10.0, 201)?;
    let values = sweep(&xs, |x| d_of_x(&q, x, DEFAULT_D_TOL))?;
    let mut r = Report::new(&["x", "d", "q_star", "residual"]);
    for v in &values {
        r.row(vec![v.x.into(), v.d.into(), v.q_star().into(), v.residual.into()]);
    }
    r.note("coefficient", q.label());
    r.note("points", values.len());
    let max_res = values.iter().map(|v| v.residual).fold(0.0, f64::max);
    r.note("max_residual", format!("{max_res:.3e}"));
    Ok(r)
}

fn cover(c: &Common, start: f64, cells: usize, reach: Option<f64>, direction: DirectionArg, b: f64) -> CliResult<Report> {
    let q = coefficient(&c.coef)?;
    let dir = match direction {
        DirectionArg::Forward => Direction::Forward,
        DirectionArg::Backward => Direction::Backward,
    };
    let stop = reach.map_or(Stop::Cells(cells), Stop::Reach);
    let cov = d_covering(&q, b, start, dir, stop)?;
    let rep = verify_covering(&cov, Some(&q))?;
    let mut r = Report::new(&["n", "minus", "center", "plus", "cell_mass"]);
    for (i, cell) in cov.cells.iter().enumerate() {
        let mass = q.integrate(cell.minus, cell.plus)?;
        r.row(vec![Cell::Int(i as i64 + 1), cell.minus.into(), cell.center.into(), cell.plus.into(), mass.into()]);
    }
    r.note("coefficient", q.label());
    r.note("kappa", &cov.kappa_label);
    r.note("cells", rep.cells);
    r.note("reach", format!("{:.16e}", cov.reach()));
    r.note("chaining_violations", format!("{:?}", rep.chaining_violations));
    r.note("mass_violations", format!("{:?}", rep.mass_violations));
    r.note("max_center_residual", format!("{:.3e}", rep.max_center_residual));
    let reach_ok = reach.map_or(true, |x| dir.sign() * (cov.reach() - x) >= 0.0);
    r.judge(rep.passed && reach_ok);
    Ok(r)
}

fn kclass(c: &Common, x0: f64) -> CliResult<Report> {
    let q = coefficient(&c.coef)?;
    let xs = points(c, 50.0, 41)?;
    let rep = membership_report(&q, x0, &xs)?;
    let mut r = Report::new(&["x", "kappa1", "kappa2", "q1_d_minus_1", "q_star_over_q1"]);
    for row in &rep.rows {
        r.row(vec![row.x.into(), row.kappa1.into(), row.kappa2.into(), row.epsilon.into(), row.q_star_over_q1.into()]);
    }
    r.note("coefficient", q.label());
    r.note("x0", x0);
    r.note("a", format!("{:.6}", rep.a));
    r.note("b", rep.b);
    r.note("gamma", format!("{:.6}", rep.gamma));
    r.note("epsilon_violations", format!("{:?}", rep.epsilon_violations));
    for t in &rep.trends {
        r.note(&format!("trend {}", t.name), if t.holds { "holds" } else { "fails" });
    }
    r.note("verdict", serde_json::to_value(rep.verdict).expect("verdict serializes").as_str().unwrap_or_default());
    r.judge(rep.verdict != KVerdict::Inconsistent);
    Ok(r)
}

fn solve(c: &Common, forcing: &str) -> CliResult<Report> {
    let q = coefficient(&c.coef)?;
    let f = Forcing::from_label(forcing).map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = config(c, QuadratureConfig::default())?;
    let sp = space(c, &q)?;
    let window = c.window.unwrap_or(5.0);
    let xs = points(c, 5.0, 101)?;
    let res = residual_check(&q, &f, &xs, DEFAULT_FD_STEP)?;
    let mut r = Report::new(&["x", "y", "residual"]);
    for row in &res.rows {
        r.row(vec![row.x.into(), row.y.into(), row.residual.into()]);
    }
    let f_norm = forcing_norm(&f, &SpaceParams::new(c.p, Weight::One)?, window, &cfg)?;
    let y = GreenSolution::new(&q, &f, &cfg)?;
    let mut breaks = f.breakpoints.clone();
    breaks.extend([f.support.0, f.support.1]);
    let y_norm = lp_theta_norm(|t| y.eval(t), &sp, window, &breaks, &cfg)?;
    r.note("coefficient", q.label());
    r.note("f", &f.label);
    r.note("p", c.p);
    r.note("theta", sp.theta.label());
    r.note("f_norm", format!("{f_norm:.16e}"));
    r.note("y_norm", format!("{y_norm:.16e}"));
    r.note("ratio", if f_norm > 0.0 { format!("{:.16e}", y_norm / f_norm) } else { "n/a".into() });
    r.note("max_residual", format!("{:.3e}", res.max_residual));
    Ok(r)
}

fn thm33(c: &Common) -> CliResult<Report> {
    let q = coefficient(&c.coef)?;
    let cfg = config(c, QuadratureConfig::default())?;
    let xs = points(c, ex::THM33_WINDOW, ex::THM33_N)?;
    let rep = verify_thm33(&q, &xs, &cfg)?;
    let mut r = Report::new(&["x", "d", "q_star", "I", "J", "S", "J_over_d", "I_over_d", "S_over_d"]);
    for k in &rep.profile.rows {
        r.row(vec![
            k.x.into(),
            k.d.into(),
            k.q_star.into(),
            k.i.into(),
            k.j.into(),
            k.s.into(),
            k.j_over_d.into(),
            k.i_over_d.into(),
            k.s_over_d.into(),
        ]);
    }
    let (j, i, s) = rep.constants();
    r.note("coefficient", q.label());
    r.note("c_J_over_d", format!("{j:.6}"));
    r.note("c_I_over_d", format!("{i:.6}"));
    r.note("c_S_over_d", format!("{s:.6}"));
    r.note("lower_bound_violations", rep.lower_bound_violations.len());
    r.judge(rep.passed());
    Ok(r)
}

fn thm35(c: &Common, pair: &str) -> CliResult<Report> {
    let pair = UnimodalPair::catalog(pair).map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = config(c, QuadratureConfig::default())?;
    let xs = points(c, 10.0, 101)?;
    let rep = verify_thm35(&pair, &xs, &cfg)?;
    let mut r = Report::new(&["x", "F", "d1", "d2", "predicted", "ratio"]);
    for e in &rep.estimates {
        r.row(vec![e.x.into(), e.f.into(), e.d1.into(), e.d2.into(), e.predicted.into(), e.ratio.into()]);
    }
    r.note("pair", &pair.label);
    r.note("c_estimate", format!("{:.6}", rep.equivalence.c_estimate));
    r.note("argmax_hi", rep.equivalence.argmax_hi);
    r.note("argmax_lo", rep.equivalence.argmax_lo);
    r.judge(rep.equivalence.c_estimate.is_finite());
    Ok(r)
}

fn example1(c: &Common, alpha: f64, beta: f64) -> CliResult<Report> {
    let cfg = config(c, QuadratureConfig::oscillatory())?;
    let spacing_default = Common { spacing: SpacingArg::Log, ..c.clone() };
    let c = if c.spacing == SpacingArg::Uniform && c.window.is_none() { &spacing_default } else { c };
    let xs = points(c, ex::EXAMPLE1_WINDOW, ex::EXAMPLE1_N)?;
    let rep = verify_example1(alpha, beta, &xs, &cfg)?;
    let mut r = Report::new(&["x", "d", "d_over_shape", "J_over_d", "I_over_d"]);
    for ((x, ratio), k) in rep.d_shape.ratios.iter().zip(&rep.thm33.profile.rows) {
        r.row(vec![(*x).into(), k.d.into(), (*ratio).into(), k.j_over_d.into(), k.i_over_d.into()]);
    }
    let (j, i, s) = rep.thm33.constants();
    r.note("alpha", alpha);
    r.note("beta", beta);
    r.note("nu", rep.nu);
    r.note("c_d_vs_shape", format!("{:.6}", rep.d_shape.c_estimate));
    r.note("deviation_10", format!("{:.6}", rep.deviation_10));
    r.note("deviation_100", format!("{:.6}", rep.deviation_100));
    r.note("q0_window_10", format!("{:.6}", rep.q0_window_10));
    r.note("q0_window_100", format!("{:.6}", rep.q0_window_100));
    r.note("c_J_I_S", format!("{j:.6} {i:.6} {s:.6}"));
    r.note("kclass_verdict", serde_json::to_value(rep.kclass.verdict).expect("verdict serializes").as_str().unwrap_or_default());
    r.judge(
        rep.d_shape.c_estimate <= ex::EXAMPLE1_C_ANCHOR && rep.deviation_decays() && rep.q0_decays() && rep.thm33.passed(),
    );
    Ok(r)
}

fn example2(c: &Common) -> CliResult<Report> {
    let cfg = config(c, QuadratureConfig::default())?;
    let xs = points(c, ex::EXAMPLE2_F1_WINDOW, ex::EXAMPLE2_F1_N)?;
    let rep = verify_example2(&xs, &cfg)?;
    let mut r = Report::new(&["x", "F1", "h", "normalized", "sandwich"]);
    for row in &rep.rows {
        r.row(vec![row.x.into(), row.f1.into(), row.h.into(), row.normalized.into(), Cell::Bool(row.sandwich)]);
    }
    let (lo, hi) = rep
        .rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), row| (lo.min(row.normalized), hi.max(row.normalized)));
    r.note("normalized_range", format!("[{lo:.6}, {hi:.6}]"));
    r.note("c_estimate", format!("{:.6}", rep.equivalence.c_estimate));
    r.note("sandwich_violations", rep.sandwich_violations.len());
    let anchor = ex::EXAMPLE2_F1_ANCHOR;
    r.judge(lo >= 1.0 / anchor && hi <= anchor && rep.sandwich_violations.is_empty());
    Ok(r)
}

fn admissible(c: &Common) -> CliResult<Report> {
    let q = coefficient(&c.coef)?;
    let cfg = config(c, QuadratureConfig::default())?;
    let sp = space(c, &q)?;
    let window = c.window.unwrap_or(ex::ADMISSIBLE_WINDOWS.0);
    let rep = admissibility_estimate(&q, &sp, &standard_family(), window, &cfg)?;
    let mut r = Report::new(&["f", "f_norm", "y_norm", "ratio"]);
    for row in &rep.per_f {
        r.row(vec![
            Cell::Text(row.label.clone()),
            row.f_norm.into(),
            row.y_norm.into(),
            row.ratio.map_or(Cell::Text("skipped".into()), Cell::Num),
        ]);
    }
    r.note("coefficient", q.label());
    r.note("family", crate::kernel::FAMILY_VERSION);
    r.note("p", c.p);
    r.note("theta", &rep.theta);
    r.note("window", window);
    r.note("c_estimate", format!("{:.16e}", rep.c_estimate));
    for n in &rep.notes {
        r.note("note", n);
    }
    Ok(r)
}

fn run_suite(only: &[u8]) -> CliResult<Report> {
    if let Some(bad) = only.iter().find(|&&id| !(1..=10).contains(&id)) {
        return Err(CliError::Usage(format!("no criterion {bad}; criteria are numbered 1-10")));
    }
    let ids: Vec<u8> = if only.is_empty() { suite::CRITERIA.iter().map(|c| c.0).collect() } else { only.to_vec() };
    let mut r = Report::new(&["id", "criterion", "passed", "measured", "expected", "seconds", "budget"]);
    let mut all = true;
    for id in ids {
        let res = suite::run_criterion(id);
        all &= res.passed;
        r.row(vec![
            Cell::Int(res.id.into()),
            Cell::Text(res.title.into()),
            Cell::Bool(res.passed),
            Cell::Text(format!("\"{}\"", res.measured.replace('"', "'"))),
            Cell::Text(format!("\"{}\"", res.expected.replace('"', "'"))),
            res.elapsed_s.into(),
            res.budget_s.into(),
        ]);
        r.note(&format!("criterion {:>2}", res.id), res.line());
    }
    r.note("expectations", ex::VERSION);
    r.judge(all);
    Ok(r)
}

fn dispatch(cmd: &Command) -> CliResult<(Report, Common)> {
    Ok(match cmd {
        Command::Profile(c) => (profile(c)?, c.clone()),
        Command::Cover { common, start, cells, reach, direction, b } => {
            (cover(common, *start, *cells, *reach, *direction, *b)?, common.clone())
        }
        Command::Kclass { common, x0 } => (kclass(common, *x0)?, common.clone()),
        Command::Solve { common, forcing } => (solve(common, forcing)?, common.clone()),
        Command::VerifyThm33(c) => (thm33(c)?, c.clone()),
        Command::VerifyThm35 { common, pair } => (thm35(common, pair)?, common.clone()),
        Command::Example1 { common, alpha, beta } => (example1(common, *alpha, *beta)?, common.clone()),
        Command::Example2(c) => (example2(c)?, c.clone()),
        Command::Admissible(c) => (admissible(c)?, c.clone()),
        Command::Suite { common, only } => (run_suite(only)?, common.clone()),
    })
}

fn emit(report: &Report, common: &Common, stdout: &mut dyn Write) -> CliResult<()> {
    let data = match common.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    match &common.out {
        Some(path) => {
            std::fs::write(path, data)?;
            stdout.write_all(report.summary_text("").as_bytes())?;
        }
        None => {
            stdout.write_all(data.as_bytes())?;
            if common.format == Format::Csv {
                stdout.write_all(report.summary_text("# ").as_bytes())?;
            }
        }
    }
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, in which case it is kept.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs the driver on `args` (including the program name), writing data and
/// summaries to `stdout` and diagnostics to `stderr`; returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    configure_threads();
    let outcome = dispatch(&cli.command).and_then(|(report, common)| {
        emit(&report, &common, stdout)?;
        Ok(report.verdict)
    });
    match outcome {
        Ok(Some(false)) => EXIT_FAIL,
        Ok(_) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Numeric(m)) => {
            let _ = writeln!(stderr, "numeric error: {m}");
            EXIT_NUMERIC
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(stderr, "i/o error: {e}");
            EXIT_USAGE
        }
    }
}

/// Runs the driver against the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv: Vec<&str> = std::iter::once("otelbaev").chain(args.iter().copied()).collect();
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn profile_of_constant() {
        let (code, out, _) = call(&["profile", "--coef", "const:1", "--window", "5", "--n", "11"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(lines[0], "x,d,q_star,residual");
        assert_eq!(lines.len(), 12);
        for l in &lines[1..] {
            let f: Vec<f64> = l.split(',').map(|v| v.parse().unwrap()).collect();
            assert!((f[1] - 1.0).abs() < 1e-9 && (f[2] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn unknown_coefficient_is_usage_error() {
        let (code, _, err) = call(&["profile", "--coef", "gauss"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("example2"), "{err}");
    }

    #[test]
    fn bad_flags_are_usage_errors() {
        assert_eq!(call(&["profile", "--n", "2", "--coef", "const:1"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["solve", "--f", "nope", "--coef", "const:1"]).0, EXIT_USAGE);
        assert_eq!(call(&["example1", "--alpha", "0.45", "--beta", "0.04"]).0, EXIT_USAGE);
    }

    #[test]
    fn divergence_is_numeric_error() {
        let (code, _, err) = call(&["verify-thm33", "--coef", "const:0", "--window", "1", "--n", "3"]);
        assert_eq!(code, EXIT_NUMERIC, "{err}");
    }

    #[test]
    fn json_mirrors_csv() {
        let (code, out, _) = call(&["cover", "--coef", "const:1", "--cells", "3", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 3);
        assert!((v["rows"][1]["center"].as_f64().unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(v["summary"]["result"], "PASS");
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        assert_eq!(Cell::Num(0.1).csv(), "1.0000000000000001e-1");
    }
}
