mod config;
mod selfcheck;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use orbcert::certify::certify_orbit;
use orbcert::interval::{hexfloat, Bound};
use orbcert::maps::{MapDef, Param};
use orbcert::pdcurve::{self, CurveCertificate, CurveOptions, Window};
use orbcert::sweep::{self, Axis, SweepConfig};
use orbcert::zerofind::{
    newton_refine, Candidate, SeedOptions, SeedStrategy, NEWTON_MAX_ITER, NEWTON_TOL,
};

use config::ConfigFile;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
}

/// Output of a subcommand together with the reason it did not verify, if any.
pub struct Report {
    output: String,
    failure: Option<String>,
}

impl Report {
    fn verified(output: String) -> Self {
        Report {
            output,
            failure: None,
        }
    }

    fn unverified(output: String, reason: impl Into<String>) -> Self {
        Report {
            output,
            failure: Some(reason.into()),
        }
    }

    fn check(output: String, ok: bool, reason: impl Into<String>) -> Self {
        if ok {
            Report::verified(output)
        } else {
            Report::unverified(output, reason)
        }
    }
}

impl CliError {
    fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "orbcert",
    version,
    about = "Computer-assisted proofs of periodic orbits of one-dimensional maps"
)]
struct Cli {
    /// JSON file whose keys are long flag names; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "ORBCERT_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify one candidate orbit, or every orbit found by seeding.
    Certify(CertifyArgs),
    /// Census of certified orbits over a parameter grid.
    Sweep(SweepArgs),
    /// Certify period-doubling candidate curves of the predator-prey map.
    Curve(CurveArgs),
    /// Re-verify an archive and rebuild the census.
    Recount(RecountArgs),
    /// Run the logistic period-2 walkthrough and compare with reference values.
    Selfcheck,
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
}

impl ParamArgs {
    fn resolve(&self, cfg: &ConfigFile) -> Result<Vec<(&'static str, String)>, CliError> {
        let mut out = Vec::new();
        for (key, flag) in [
            ("mu", &self.mu),
            ("beta", &self.beta),
            ("kappa", &self.kappa),
        ] {
            if let Some(text) = cfg.pick(flag.clone(), key)? {
                out.push((key, text));
            }
        }
        Ok(out)
    }
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    map: Option<String>,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    period: Option<usize>,
    /// Candidate orbit, comma separated; seeding is used when absent.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Newton-refine the given candidate first.
    #[arg(long)]
    refine: bool,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// iteration, multi-start, scan or all.
    #[arg(long)]
    strategy: Option<String>,
    /// Radius bound `R`; `inf` for none.
    #[arg(long)]
    r_bound: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    map: Option<String>,
    /// Axes as `start:stop:step` or a single value.
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    p_min: Option<usize>,
    #[arg(long)]
    p_max: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    /// 1 or 2.
    #[arg(long)]
    period: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    kappa_lo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa_hi: Option<String>,
    /// Width of the windows tiling `[kappa-lo, kappa-hi]`; one window by default.
    #[arg(long)]
    width: Option<String>,
    /// Where branches are seeded; must be a window endpoint. Defaults to `kappa-lo`.
    #[arg(long, allow_hyphen_values = true)]
    seed_kappa: Option<String>,
    /// Interpolation nodes `K`.
    #[arg(long)]
    nodes: Option<usize>,
    /// Taylor order `N`.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    r_bound: Option<String>,
    #[arg(long)]
    min_width: Option<String>,
    /// Resolution of the β scan used for seeding.
    #[arg(long)]
    beta_steps: Option<usize>,
    /// Samples per window written to `curve.csv`.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecountArgs {
    #[arg(long)]
    archive: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn number(key: &str, text: &str) -> Result<f64, CliError> {
    hexfloat::parse_number(text)
        .map_err(|_| CliError::Usage(format!("`{key}`: cannot parse {text:?}")))
}

fn r_bound(key: &str, text: Option<String>) -> Result<Bound, CliError> {
    match text {
        None => Ok(Bound::Unbounded),
        Some(t) => match number(key, &t)? {
            r if r == f64::INFINITY => Ok(Bound::Unbounded),
            r if r > 0.0 => Ok(Bound::Finite(r)),
            _ => Err(CliError::Usage(format!("`{key}` must be positive"))),
        },
    }
}

fn strategy(text: Option<String>) -> Result<SeedStrategy, CliError> {
    match text {
        None => Ok(SeedStrategy::All),
        Some(t) => serde_json::from_value(serde_json::Value::String(t.clone()))
            .map_err(|_| CliError::Usage(format!("unknown strategy {t:?}"))),
    }
}

fn required<T>(v: Option<T>, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("missing --{key}")))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(CliError::usage)?;
    std::fs::write(dir.join(name), contents).map_err(CliError::usage)
}

fn cmd_certify(args: CertifyArgs, cfg: &ConfigFile) -> Result<Report, CliError> {
    cfg.check_keys(&[
        "map", "mu", "beta", "kappa", "period", "x", "refine", "budget", "seed", "strategy",
        "r-bound", "workers",
    ])?;
    let map = required(cfg.pick(args.map, "map")?, "map")?;
    let period = required(cfg.pick(args.period, "period")?, "period")?;
    if period == 0 {
        return Err(CliError::Usage("--period must be positive".into()));
    }
    let params = args
        .params
        .resolve(cfg)?
        .into_iter()
        .map(|(k, t)| Param::parse(k, &t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::usage)?;
    let m = MapDef::from_params(&map, &params).map_err(CliError::usage)?;
    let bound = r_bound("r-bound", cfg.pick(args.r_bound, "r-bound")?)?;

    match cfg.pick(args.x, "x")? {
        Some(list) => {
            let x = list
                .split(',')
                .map(|t| number("x", t))
                .collect::<Result<Vec<_>, _>>()?;
            if x.len() != period {
                return Err(CliError::Usage(format!(
                    "--x has {} entries, period is {period}",
                    x.len()
                )));
            }
            let candidate = if cfg.flag(args.refine, "refine")? {
                newton_refine(&m, &x, NEWTON_TOL, NEWTON_MAX_ITER)
            } else {
                Candidate::from_orbit(&m, x)
            };
            let candidate = match candidate {
                Ok(c) => c,
                Err(e) => return Ok(Report::unverified(String::new(), e.to_string())),
            };
            let cert = certify_orbit(&m, &candidate, bound);
            let reason = cert.reason.map(|r| r.to_string()).unwrap_or_default();
            Ok(Report::check(to_json(&cert), cert.verified, reason))
        }
        None => {
            let opts = SeedOptions {
                strategy: strategy(cfg.pick(args.strategy, "strategy")?)?,
                budget: cfg
                    .pick(args.budget, "budget")?
                    .unwrap_or(SweepConfig::default().budget),
                seed: cfg.pick(args.seed, "seed")?.unwrap_or(0),
                ..Default::default()
            };
            let certs = sweep::certified_orbits(&m, period, &opts);
            Ok(Report::check(
                to_json(&certs),
                !certs.is_empty(),
                format!("no period-{period} orbit certified"),
            ))
        }
    }
}

fn axis(name: &str, text: &str) -> Result<Axis, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(Axis::single(name, number(name, v)?)),
        [a, b, s] => Ok(Axis::new(
            name,
            number(name, a)?,
            number(name, b)?,
            number(name, s)?,
        )),
        _ => Err(CliError::Usage(format!(
            "`{name}` must be a value or start:stop:step"
        ))),
    }
}

#[derive(Serialize)]
struct SweepSummary {
    cells: usize,
    orbits: usize,
    periodic_points: usize,
    failures: usize,
}

fn cmd_sweep(
    args: SweepArgs,
    cfg: &ConfigFile,
    workers: Option<usize>,
) -> Result<Report, CliError> {
    cfg.check_keys(&[
        "map", "mu", "beta", "kappa", "p-min", "p-max", "budget", "seed", "strategy", "out",
        "workers",
    ])?;
    let map = cfg
        .pick(args.map, "map")?
        .unwrap_or_else(|| "logistic".into());
    let mut sc = SweepConfig::default_for(&map).map_err(CliError::usage)?;
    for (key, text) in args.params.resolve(cfg)? {
        let slot = sc
            .grid
            .iter_mut()
            .find(|a| a.name == key)
            .ok_or_else(|| CliError::Usage(format!("map `{map}` has no parameter `{key}`")))?;
        *slot = axis(key, &text)?;
    }
    sc.p_min = cfg.pick(args.p_min, "p-min")?.unwrap_or(sc.p_min);
    sc.p_max = cfg.pick(args.p_max, "p-max")?.unwrap_or(sc.p_max);
    sc.budget = cfg.pick(args.budget, "budget")?.unwrap_or(sc.budget);
    sc.seed = cfg.pick(args.seed, "seed")?.unwrap_or(sc.seed);
    if let Some(s) = cfg.pick(args.strategy, "strategy")? {
        sc.strategy = strategy(Some(s))?;
    }
    sc.workers = workers;
    sc.out_dir = cfg
        .pick(args.out.map(|p| p.display().to_string()), "out")?
        .map(PathBuf::from);
    sc.validate().map_err(CliError::usage)?;
    let out = sweep::run_sweep(&sc).map_err(CliError::usage)?;
    Ok(Report::verified(to_json(&SweepSummary {
        cells: sc.cells().len(),
        orbits: out.total_orbits(),
        periodic_points: out.total_points(),
        failures: out.failures.len(),
    })))
}

#[derive(Serialize)]
struct Branch {
    seed: Vec<f64>,
    covered: bool,
    max_r_star: Option<f64>,
    pieces: Vec<CurveCertificate>,
    patches: Vec<Option<String>>,
}

#[derive(Serialize)]
struct BranchSummary {
    seed_beta: f64,
    pieces: usize,
    covered: bool,
    max_r_star: Option<f64>,
}

fn cmd_curve(args: CurveArgs, cfg: &ConfigFile) -> Result<Report, CliError> {
    cfg.check_keys(&[
        "period",
        "kappa-lo",
        "kappa-hi",
        "width",
        "seed-kappa",
        "nodes",
        "order",
        "r-bound",
        "min-width",
        "beta-steps",
        "samples",
        "out",
        "workers",
    ])?;
    let period = required(cfg.pick(args.period, "period")?, "period")?;
    let num = |flag: Option<String>, key: &str| -> Result<Option<f64>, CliError> {
        cfg.pick(flag, key)?.map(|t| number(key, &t)).transpose()
    };
    let lo = required(num(args.kappa_lo, "kappa-lo")?, "kappa-lo")?;
    let hi = required(num(args.kappa_hi, "kappa-hi")?, "kappa-hi")?;
    let width = num(args.width, "width")?.unwrap_or(hi - lo);
    let seed_kappa = num(args.seed_kappa, "seed-kappa")?.unwrap_or(lo);
    if !(hi > lo && width > 0.0) {
        return Err(CliError::Usage(
            "need kappa-lo < kappa-hi and a positive width".into(),
        ));
    }
    let defaults = CurveOptions::default();
    let opts = CurveOptions {
        nodes: cfg.pick(args.nodes, "nodes")?.unwrap_or(defaults.nodes),
        taylor_order: cfg
            .pick(args.order, "order")?
            .unwrap_or(defaults.taylor_order),
        r_bound: num(args.r_bound, "r-bound")?.unwrap_or(defaults.r_bound),
        min_width: num(args.min_width, "min-width")?.unwrap_or(defaults.min_width),
    };
    let beta_steps = cfg.pick(args.beta_steps, "beta-steps")?.unwrap_or(200);
    let samples = cfg.pick(args.samples, "samples")?.unwrap_or(11);

    let count = ((hi - lo) / width).round().max(1.0) as usize;
    let windows = (0..count)
        .map(|j| {
            Window::new(
                lo + width * j as f64,
                if j + 1 == count {
                    hi
                } else {
                    lo + width * (j + 1) as f64
                },
            )
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::usage)?;
    let seeds = pdcurve::extended_seeds(period, seed_kappa, beta_steps).map_err(CliError::usage)?;
    if seeds.is_empty() {
        return Ok(Report::unverified(
            String::new(),
            format!("no period-doubling candidate found at kappa = {seed_kappa}"),
        ));
    }

    let mut branches = Vec::new();
    for seed in seeds {
        let pieces = match pdcurve::follow_branch(period, &windows, seed_kappa, &seed, &opts) {
            Ok(p) => p,
            Err(e @ pdcurve::CurveError::SeedNotAtEndpoint(_)) => return Err(CliError::usage(e)),
            Err(e) => return Ok(Report::unverified(String::new(), e.to_string())),
        };
        let covered = pdcurve::chain_covers(&pieces, lo, hi);
        let max_r_star = pieces
            .iter()
            .map(|c| c.r_star())
            .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)));
        let patches = pdcurve::patch_chain(&pieces)
            .into_iter()
            .map(|r| r.err().map(|e| e.to_string()))
            .collect();
        branches.push(Branch {
            seed,
            covered,
            max_r_star,
            pieces,
            patches,
        });
    }

    if let Some(dir) = cfg
        .pick(args.out.map(|p| p.display().to_string()), "out")?
        .map(PathBuf::from)
    {
        write_file(&dir, "curves.json", &to_json(&branches))?;
        let mut csv = String::from("branch,kappa,beta_lo,beta_hi\n");
        for (i, b) in branches.iter().enumerate() {
            for c in &b.pieces {
                for (k, blo, bhi) in c.samples(samples) {
                    csv.push_str(&format!("{i},{k},{blo},{bhi}\n"));
                }
            }
        }
        write_file(&dir, "curve.csv", &csv)?;
    }
    let summary: Vec<BranchSummary> = branches
        .iter()
        .map(|b| BranchSummary {
            seed_beta: *b.seed.last().expect("beta"),
            pieces: b.pieces.len(),
            covered: b.covered,
            max_r_star: b.max_r_star,
        })
        .collect();
    let covered = branches.iter().all(|b| b.covered);
    Ok(Report::check(
        to_json(&summary),
        covered,
        "some branch is not certified over the whole range",
    ))
}

#[derive(Serialize)]
struct RecountSummary {
    certificates: usize,
    rejected: usize,
    rows: Vec<sweep::CensusRow>,
}

fn cmd_recount(args: RecountArgs, cfg: &ConfigFile) -> Result<Report, CliError> {
    cfg.check_keys(&["archive", "out", "workers"])?;
    let path = required(
        cfg.pick(args.archive.map(|p| p.display().to_string()), "archive")?,
        "archive",
    )?;
    let file = std::fs::File::open(&path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    let certs = sweep::read_archive(std::io::BufReader::new(file)).map_err(CliError::usage)?;
    let (rows, rejected) = sweep::recount(&certs).map_err(CliError::usage)?;
    if let Some(dir) = cfg
        .pick(args.out.map(|p| p.display().to_string()), "out")?
        .map(PathBuf::from)
    {
        let names = match certs.first() {
            Some(c) => MapDef::param_names(&c.map).map_err(CliError::usage)?,
            None => &[],
        };
        let figs = sweep::aggregate_figures(names, &rows, &certs).map_err(CliError::usage)?;
        write_file(&dir, "census.csv", &figs.census)?;
        write_file(&dir, "counts.csv", &figs.counts)?;
    }
    let n_rejected = rejected.len();
    let json = to_json(&RecountSummary {
        certificates: certs.len(),
        rejected: n_rejected,
        rows,
    });
    Ok(Report::check(
        json,
        n_rejected == 0,
        format!("{n_rejected} certificates did not re-verify"),
    ))
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let cfg = ConfigFile::load(cli.config.as_deref())?;
    let workers = cfg.pick(cli.workers, "workers")?;
    if let Some(n) = workers {
        // Only fails if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match cli.command {
        Command::Certify(a) => cmd_certify(a, &cfg),
        Command::Sweep(a) => cmd_sweep(a, &cfg, workers),
        Command::Curve(a) => cmd_curve(a, &cfg),
        Command::Recount(a) => cmd_recount(a, &cfg),
        Command::Selfcheck => {
            cfg.check_keys(&["workers"])?;
            selfcheck::run()
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            if !report.output.is_empty() {
                // A closed stdout is not a verification failure.
                let _ = writeln!(std::io::stdout().lock(), "{}", report.output);
            }
            match report.failure {
                None => ExitCode::SUCCESS,
                Some(reason) => {
                    eprintln!("not verified: {reason}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
