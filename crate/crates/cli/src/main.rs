mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmem_core::arith_builders::AlgoParams;
use qmem_core::counts::{and_to_gates, exact_counts, leading_order_converted, leading_order_counts, CountMode};
use qmem_core::ftec::FtecError;
use qmem_core::optimizer::{default_n_e, evaluate, optimize, sweep_n, sweep_ratio, table_point, OptError, TABLE_DEFAULTS};
use qmem_core::verify::{run_suite, Suite, ALL_SUITES};
use qmem_core::Exec;

use config::{Format, RunConfig};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
pub struct UsageError(pub String);

enum Failure {
    Usage(String),
    Infeasible(String),
    Verify(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<OptError> for Failure {
    fn from(e: OptError) -> Self {
        match e {
            OptError::Ftec(FtecError::AboveThreshold { .. }) | OptError::NoSolution | OptError::Underflow => {
                Failure::Infeasible(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "qmem", version, about = "Resource estimates for factoring with a small processor and a multimode memory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// INI config file (falls back to $QMEM_CONFIG)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// physical error rate
    #[arg(long)]
    p: Option<f64>,
    /// threshold error rate
    #[arg(long)]
    pth: Option<f64>,
    /// cycle time in seconds
    #[arg(long)]
    tc: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// evaluate without the thread pool
    #[arg(long)]
    sequential: bool,
    /// suppress warnings on stderr
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args, Clone, Default)]
struct Params {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ne: Option<usize>,
    #[arg(long)]
    we: Option<usize>,
    #[arg(long)]
    wm: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    N,
    Ratio,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Ir,
    Adders,
    Lookup,
    Coset,
    Modexp,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountsMode {
    Exact,
    Leading,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one parameter point (tabulated defaults fill missing flags)
    Estimate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
    },
    /// Grid search; --we/--wm/--m/--d pin that coordinate
    Optimize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
    },
    /// One optimized row per bit size or per p/p_th ratio
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: Axis,
        /// comma-separated axis values (fractions like 2/15 allowed for ratios)
        #[arg(long)]
        values: Option<String>,
        /// bit size for ratio sweeps
        #[arg(long, default_value_t = 2048)]
        n: usize,
    },
    /// Simulator-backed circuit checks
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 6)]
        max_width: usize,
    },
    /// Gate counts for one parameter point
    Counts {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "exact")]
        mode: CountsMode,
    },
}

fn load_config(c: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::default();
    let path = c.config.clone().or_else(|| std::env::var_os("QMEM_CONFIG").map(PathBuf::from));
    if let Some(path) = path {
        cfg.apply_file(&path)?;
    }
    if let Some(p) = c.p {
        cfg.phys.p = p;
    }
    if let Some(p) = c.pth {
        cfg.phys.p_th = p;
    }
    if let Some(t) = c.tc {
        cfg.phys.t_c = t;
    }
    if let Some(f) = c.format {
        cfg.format = f;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    cfg.out = c.out.clone();
    cfg.quiet |= c.quiet;
    cfg.sequential |= c.sequential;
    Ok(cfg)
}

fn exec(cfg: &RunConfig) -> Exec {
    if cfg.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn warn(cfg: &RunConfig, msg: &str) {
    if !cfg.quiet {
        eprintln!("warning: {msg}");
    }
}

fn n_e_for(cfg: &RunConfig, n: usize, given: Option<usize>) -> usize {
    given.unwrap_or_else(|| {
        let (ne, interpolated) = default_n_e(n);
        if interpolated {
            warn(cfg, &format!("n = {n} is not tabulated; using n_e = ceil(3n/2) = {ne}"));
        }
        ne
    })
}

/// Explicit flags first, then the tabulated row for n.
fn point(cfg: &RunConfig, params: &Params) -> Result<(AlgoParams, usize), Failure> {
    let n = params.n.ok_or_else(|| Failure::Usage("--n is required".into()))?;
    let row = table_point(n);
    let need = |flag: Option<usize>, from_row: Option<usize>, name: &str| {
        flag.or(from_row).ok_or_else(|| {
            Failure::Usage(format!("--{name} is required: n = {n} has no tabulated defaults"))
        })
    };
    let we = need(params.we, row.map(|r| r.0.w_e), "we")?;
    let wm = need(params.wm, row.map(|r| r.0.w_m), "wm")?;
    let m = need(params.m, row.map(|r| r.0.m), "m")?;
    let d = need(params.d, row.map(|r| r.1), "d")?;
    let ne = n_e_for(cfg, n, params.ne);
    let p = AlgoParams::new(n, ne, we, wm, m).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok((p, d))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| Failure::Usage(format!("bad list value {v:?}"))))
        .collect()
}

fn parse_ratio(v: &str) -> Result<f64, Failure> {
    let bad = || Failure::Usage(format!("bad ratio {v:?}"));
    match v.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            Ok(a / b)
        }
        None => v.trim().parse().map_err(|_| bad()),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Estimate { common, params } => {
            let cfg = load_config(&common)?;
            let (p, d) = point(&cfg, &params)?;
            let e = evaluate(&p, d, &cfg.phys, &cfg.conv)?;
            emit(&cfg, &report::estimate(&e, cfg.format))
        }
        Cmd::Optimize { common, params } => {
            let mut cfg = load_config(&common)?;
            let n = params.n.ok_or_else(|| Failure::Usage("--n is required".into()))?;
            let ne = n_e_for(&cfg, n, params.ne);
            for (flag, slot) in [
                (params.we, &mut cfg.space.w_e),
                (params.wm, &mut cfg.space.w_m),
                (params.m, &mut cfg.space.m),
                (params.d, &mut cfg.space.d),
            ] {
                if let Some(v) = flag {
                    *slot = vec![v];
                }
            }
            let e = optimize(n, ne, &cfg.phys, &cfg.space, &cfg.conv, exec(&cfg))?;
            emit(&cfg, &report::estimate(&e, cfg.format))
        }
        Cmd::Sweep { common, axis, values, n } => {
            let cfg = load_config(&common)?;
            let (rows, ratio_axis) = match axis {
                Axis::N => {
                    let ns = match values {
                        Some(v) => parse_list::<usize>(&v)?,
                        None => TABLE_DEFAULTS.iter().map(|r| r.0).collect(),
                    };
                    for &n in &ns {
                        n_e_for(&cfg, n, None);
                    }
                    (sweep_n(&ns, &cfg.phys, &cfg.space, &cfg.conv, exec(&cfg)), false)
                }
                Axis::Ratio => {
                    let rs = match values {
                        Some(v) => v.split(',').map(parse_ratio).collect::<Result<Vec<_>, _>>()?,
                        None => vec![0.05, 0.1, 2.0 / 15.0, 0.2, 0.3, 0.4, 0.5],
                    };
                    if rs.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
                        return Err(Failure::Usage("ratios must lie in (0, 1)".into()));
                    }
                    n_e_for(&cfg, n, None);
                    (sweep_ratio(n, &rs, &cfg.phys, &cfg.space, &cfg.conv, exec(&cfg)), true)
                }
            };
            if rows.is_empty() {
                return Err(Failure::Usage("empty sweep axis".into()));
            }
            for r in &rows {
                if let Err(msg) = &r.result {
                    warn(&cfg, &format!("row {} infeasible: {msg}", r.axis));
                }
            }
            emit(&cfg, &report::sweep(&rows, ratio_axis, cfg.format))?;
            if rows.iter().all(|r| r.result.is_err()) {
                return Err(Failure::Infeasible("every sweep row is infeasible".into()));
            }
            Ok(())
        }
        Cmd::Verify { common, suite, max_width } => {
            let cfg = load_config(&common)?;
            if !(2..=8).contains(&max_width) {
                return Err(Failure::Usage("--max-width must lie in [2, 8]".into()));
            }
            let suites: Vec<Suite> = match suite {
                SuiteArg::Ir => vec![Suite::Ir],
                SuiteArg::Adders => vec![Suite::Adders],
                SuiteArg::Lookup => vec![Suite::Lookup],
                SuiteArg::Coset => vec![Suite::Coset],
                SuiteArg::Modexp => vec![Suite::Modexp],
                SuiteArg::All => ALL_SUITES.to_vec(),
            };
            let mut all = Vec::new();
            for s in suites {
                let name = format!("{s:?}").to_lowercase();
                all.extend(run_suite(s, max_width, exec(&cfg), cfg.seed).into_iter().map(|o| (name.clone(), o)));
            }
            emit(&cfg, &report::outcomes(&all, cfg.format))?;
            let failed = all.iter().filter(|(_, o)| !o.passed()).count();
            if failed > 0 {
                return Err(Failure::Verify(format!("{failed} check(s) failed")));
            }
            Ok(())
        }
        Cmd::Counts { common, params, mode } => {
            let cfg = load_config(&common)?;
            let (p, _) = point(&cfg, &Params { d: Some(params.d.unwrap_or(3)), ..params })?;
            let rows = match mode {
                CountsMode::Exact => {
                    let cost = exact_counts(&p, CountMode::Mean);
                    let mut rows: Vec<(String, _)> = cost.breakdown.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
                    rows.push(("total".into(), cost.counts.clone()));
                    rows.push(("total_converted".into(), and_to_gates(&cost.counts)));
                    rows
                }
                CountsMode::Leading => vec![
                    ("leading".into(), leading_order_counts(&p)),
                    ("leading_converted".into(), leading_order_converted(&p)),
                ],
            };
            emit(&cfg, &report::counts(&rows, cfg.format))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
