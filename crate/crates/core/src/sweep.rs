//! Parameter sweeps: seed, refine, certify and count orbits on a grid.
//!
//! Counts are lower bounds: they include only orbits that were found by the
//! seeding and then certified as distinct period-`p` orbits.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{certify_orbit, Certificate, Stability};
use crate::interval::{round, Bound};
use crate::maps::{MapDef, MapError, OneDimMap, Param};
use crate::zerofind::{seed_candidates, SeedOptions, SeedStrategy};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("archive line {line}: {message}")]
    Archive { line: usize, message: String },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// `start, start + step, …` up to `stop` (inclusive, with a small tolerance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(name: &str, start: f64, stop: f64, step: f64) -> Self {
        Axis {
            name: name.to_string(),
            start,
            stop,
            step,
        }
    }

    /// A single value.
    pub fn single(name: &str, value: f64) -> Self {
        Axis::new(name, value, value, 1.0)
    }

    /// Grid values as decimal literals, so that `2.8 + 40·0.01` is the real
    /// number 3.2 rather than its floating-point neighbour.
    pub fn values(&self) -> Vec<String> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor();
        if !(count >= 0.0) {
            return Vec::new();
        }
        (0..=count as usize)
            .map(|i| decimal_literal(self.start + i as f64 * self.step))
            .collect()
    }
}

fn decimal_literal(x: f64) -> String {
    let rounded: f64 = format!("{x:.10}").parse().expect("formatted float");
    let text = format!("{rounded}");
    if text == "-0" {
        "0".into()
    } else {
        text
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub map: String,
    /// One axis per map parameter, in the map's parameter order.
    pub grid: Vec<Axis>,
    pub p_min: usize,
    pub p_max: usize,
    /// Seeding budget per (cell, period).
    pub budget: usize,
    /// Seed for the random starts.
    pub seed: u64,
    pub strategy: SeedStrategy,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig::logistic_default()
    }
}

impl SweepConfig {
    /// `μ ∈ [2.8, 4.0]` step 0.01, `p ≤ 16`.
    pub fn logistic_default() -> Self {
        SweepConfig {
            map: "logistic".into(),
            grid: vec![Axis::new("mu", 2.8, 4.0, 0.01)],
            p_min: 1,
            p_max: 16,
            budget: 64,
            seed: 0,
            strategy: SeedStrategy::All,
            workers: None,
            out_dir: None,
        }
    }

    /// `β ∈ [−20, −2]` step 0.25, `κ ∈ [−45, −5]` step 0.5, `p ≤ 6`.
    pub fn predprey_default() -> Self {
        SweepConfig {
            map: "predprey".into(),
            grid: vec![
                Axis::new("beta", -20.0, -2.0, 0.25),
                Axis::new("kappa", -45.0, -5.0, 0.5),
            ],
            p_max: 6,
            ..SweepConfig::logistic_default()
        }
    }

    pub fn default_for(map: &str) -> Result<Self, SweepError> {
        match map {
            "logistic" => Ok(SweepConfig::logistic_default()),
            "predprey" => Ok(SweepConfig::predprey_default()),
            other => Err(MapError::UnknownMap(other.to_string()).into()),
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let names = MapDef::param_names(&self.map)?;
        let axis_names: Vec<&str> = self.grid.iter().map(|a| a.name.as_str()).collect();
        if axis_names != names {
            return Err(SweepError::Config(format!(
                "map `{}` needs axes {names:?}, got {axis_names:?}",
                self.map
            )));
        }
        if self
            .grid
            .iter()
            .any(|a| !(a.step > 0.0) || !a.start.is_finite() || !a.stop.is_finite())
        {
            return Err(SweepError::Config(
                "every axis needs finite bounds and a positive step".into(),
            ));
        }
        if self.p_min < 1 || self.p_max < self.p_min {
            return Err(SweepError::Config(format!(
                "bad period range {}..={}",
                self.p_min, self.p_max
            )));
        }
        Ok(())
    }

    /// Cartesian product of the axes, first axis slowest.
    pub fn cells(&self) -> Vec<Vec<String>> {
        self.grid.iter().fold(vec![Vec::new()], |acc, axis| {
            let vals = axis.values();
            acc.iter()
                .flat_map(|prefix| {
                    vals.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v.clone());
                        p
                    })
                })
                .collect()
        })
    }
}

/// Counts for one parameter point and period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    /// Parameter values as decimal literals, in grid order.
    pub point: Vec<String>,
    pub period: usize,
    pub n_stable: usize,
    pub n_unstable: usize,
    pub n_inconclusive: usize,
    /// Largest period with at least one counted orbit at this point.
    pub max_period: usize,
}

impl CensusRow {
    pub fn total(&self) -> usize {
        self.n_stable + self.n_unstable + self.n_inconclusive
    }
}

/// A (cell, period) item that could not be processed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub point: Vec<String>,
    pub period: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<CensusRow>,
    /// Counted certificates in row order.
    pub archive: Vec<Certificate>,
    pub failures: Vec<CellFailure>,
}

impl SweepOutput {
    /// Orbit-parameter pairs summed over the grid.
    pub fn total_orbits(&self) -> usize {
        self.rows.iter().map(CensusRow::total).sum()
    }

    /// Periodic points (orbits times period) summed over the grid.
    pub fn total_points(&self) -> usize {
        self.rows.iter().map(|r| r.total() * r.period).sum()
    }
}

fn build_map(cfg_map: &str, names: &[&str], point: &[String]) -> Result<MapDef, MapError> {
    let params: Vec<Param> = names
        .iter()
        .zip(point)
        .map(|(n, v)| Param::parse(n, v))
        .collect::<Result<_, _>>()?;
    MapDef::from_params(cfg_map, &params)
}

/// Whether the ball of radius `r_star` about `a` lies inside the uniqueness
/// ball of `b` for some cyclic rotation of `a`, in which case both enclose the
/// same orbit.
pub fn same_orbit(a: &Certificate, b: &Certificate) -> bool {
    let (Some(ra), Some(rb)) = (a.radii, b.radii) else {
        return false;
    };
    if a.period != b.period {
        return false;
    }
    let p = a.period;
    (0..p).any(|shift| {
        let dist = (0..p).fold(0.0, |acc, k| {
            let (x, y) = (a.x_bar[(k + shift) % p], b.x_bar[k]);
            round::add_up(acc, round::sub_up(x, y).max(round::sub_up(y, x)))
        });
        round::add_up(dist, ra.r_star) <= rb.r_uniq
    })
}

/// Keeps the first of any group of certificates enclosing the same orbit.
pub fn dedup_certificates(certs: Vec<Certificate>) -> Vec<Certificate> {
    let mut kept: Vec<Certificate> = Vec::new();
    for c in certs {
        if !kept.iter().any(|k| same_orbit(&c, k) || same_orbit(k, &c)) {
            kept.push(c);
        }
    }
    kept
}

fn tally(point: &[String], period: usize, certs: &[Certificate]) -> CensusRow {
    let count = |s: Stability| certs.iter().filter(|c| c.stability == Some(s)).count();
    CensusRow {
        point: point.to_vec(),
        period,
        n_stable: count(Stability::Stable),
        n_unstable: count(Stability::Unstable),
        n_inconclusive: certs
            .iter()
            .filter(|c| !matches!(c.stability, Some(Stability::Stable | Stability::Unstable)))
            .count(),
        max_period: 0,
    }
}

fn fill_max_period(rows: &mut [CensusRow]) {
    let mut best: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.total() > 0) {
        let e = best.entry(r.point.clone()).or_default();
        *e = (*e).max(r.period);
    }
    for r in rows.iter_mut() {
        r.max_period = best.get(&r.point).copied().unwrap_or(0);
    }
}

/// Seeds, certifies and deduplicates the period-`p` orbits of one map,
/// keeping only those that count.
pub fn certified_orbits<M: OneDimMap + ?Sized>(
    m: &M,
    period: usize,
    opts: &SeedOptions,
) -> Vec<Certificate> {
    let counted: Vec<Certificate> = seed_candidates(m, period, opts)
        .iter()
        .map(|c| certify_orbit(m, c, Bound::Unbounded))
        .filter(Certificate::counts)
        .collect();
    dedup_certificates(counted)
}

type CellResult = (Vec<String>, usize, Result<Vec<Certificate>, MapError>);

fn certify_cell(
    cfg: &SweepConfig,
    names: &[&str],
    point: &[String],
    period: usize,
) -> Result<Vec<Certificate>, MapError> {
    let m = build_map(&cfg.map, names, point)?;
    let opts = SeedOptions {
        strategy: cfg.strategy,
        budget: cfg.budget,
        seed: cfg.seed,
        ..Default::default()
    };
    Ok(certified_orbits(&m, period, &opts))
}

/// Runs the sweep. The result depends only on the configuration, not on the
/// number of workers.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput, SweepError> {
    cfg.validate()?;
    let names = MapDef::param_names(&cfg.map)?;
    let items: Vec<(Vec<String>, usize)> = cfg
        .cells()
        .into_iter()
        .flat_map(|cell| (cfg.p_min..=cfg.p_max).map(move |p| (cell.clone(), p)))
        .collect();
    let work = || -> Vec<CellResult> {
        items
            .par_iter()
            .map(|(cell, p)| (cell.clone(), *p, certify_cell(cfg, names, cell, *p)))
            .collect()
    };
    let results = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| SweepError::Pool(e.to_string()))?
            .install(work),
        None => work(),
    };
    let mut rows = Vec::with_capacity(results.len());
    let mut archive = Vec::new();
    let mut failures = Vec::new();
    for (point, period, res) in results {
        match res {
            Ok(certs) => {
                rows.push(tally(&point, period, &certs));
                archive.extend(certs);
            }
            Err(e) => failures.push(CellFailure {
                point,
                period,
                message: e.to_string(),
            }),
        }
    }
    fill_max_period(&mut rows);
    let out = SweepOutput {
        rows,
        archive,
        failures,
    };
    if let Some(dir) = &cfg.out_dir {
        write_outputs(dir, cfg, &out)?;
    }
    Ok(out)
}

/// One JSON certificate per line.
pub fn write_archive<W: Write>(mut w: W, certs: &[Certificate]) -> Result<(), SweepError> {
    for c in certs {
        serde_json::to_writer(&mut w, c).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_archive<R: BufRead>(r: R) -> Result<Vec<Certificate>, SweepError> {
    r.lines()
        .enumerate()
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|(i, line)| {
            let line = line?;
            serde_json::from_str(&line).map_err(|e| SweepError::Archive {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Re-verifies every archived certificate from its orbit and parameters and
/// rebuilds the nonzero census rows. A certificate passes when the fresh one
/// counts, has the same stability verdict and encloses the same orbit. Certificates that no longer verify are
/// returned separately.
pub fn recount(certs: &[Certificate]) -> Result<(Vec<CensusRow>, Vec<Certificate>), SweepError> {
    let rechecked: Vec<(Certificate, bool)> = certs
        .par_iter()
        .map(|c| {
            let ok = MapDef::from_params(&c.map, &c.params)
                .ok()
                .and_then(|m| {
                    c.candidate(&m)
                        .ok()
                        .map(|cand| certify_orbit(&m, &cand, c.r_bound))
                })
                .is_some_and(|fresh| {
                    fresh.counts() && fresh.stability == c.stability && same_orbit(c, &fresh)
                });
            (c.clone(), ok)
        })
        .collect();
    let mut groups: BTreeMap<(Vec<String>, usize), Vec<Certificate>> = BTreeMap::new();
    let mut rejected = Vec::new();
    for (c, ok) in rechecked {
        if ok {
            let point = c.params.iter().map(|p| decimal_literal(p.value)).collect();
            groups.entry((point, c.period)).or_default().push(c);
        } else {
            rejected.push(c);
        }
    }
    let mut rows: Vec<CensusRow> = groups
        .into_iter()
        .map(|((point, period), certs)| tally(&point, period, &dedup_certificates(certs)))
        .collect();
    fill_max_period(&mut rows);
    Ok((rows, rejected))
}

/// Rows with at least one counted orbit, sorted by point and period.
pub fn nonzero_rows(rows: &[CensusRow]) -> Vec<CensusRow> {
    let mut out: Vec<CensusRow> = rows.iter().filter(|r| r.total() > 0).cloned().collect();
    out.sort_by(|a, b| a.point.cmp(&b.point).then(a.period.cmp(&b.period)));
    out
}

/// Figure-ready tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Figures {
    /// `param…, period, n_stable, n_unstable, n_inconclusive`.
    pub census: String,
    /// `param…, coordinate`, one line per orbit coordinate.
    pub bifurcation: String,
    /// `param…, n_stable, n_unstable, n_inconclusive` summed over periods.
    pub counts: String,
    /// `param…, max_period`.
    pub heatmap: String,
}

fn csv_string(
    header: Vec<String>,
    records: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, SweepError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for r in records {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| SweepError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn aggregate_figures(
    param_names: &[&str],
    rows: &[CensusRow],
    archive: &[Certificate],
) -> Result<Figures, SweepError> {
    let names: Vec<String> = param_names.iter().map(|s| s.to_string()).collect();
    let with = |extra: &[&str]| {
        names
            .iter()
            .cloned()
            .chain(extra.iter().map(|s| s.to_string()))
            .collect::<Vec<_>>()
    };

    let census = csv_string(
        with(&["period", "n_stable", "n_unstable", "n_inconclusive"]),
        rows.iter().map(|r| {
            let mut rec = r.point.clone();
            rec.extend(
                [r.period, r.n_stable, r.n_unstable, r.n_inconclusive].map(|v| v.to_string()),
            );
            rec
        }),
    )?;

    let bifurcation = csv_string(
        with(&["coordinate"]),
        archive.iter().flat_map(|c| {
            let point: Vec<String> = c.params.iter().map(|p| decimal_literal(p.value)).collect();
            c.x_bar.iter().map(move |x| {
                let mut rec = point.clone();
                rec.push(format!("{x}"));
                rec
            })
        }),
    )?;

    let mut per_point: BTreeMap<Vec<String>, (usize, usize, usize, usize)> = BTreeMap::new();
    let mut order: Vec<Vec<String>> = Vec::new();
    for r in rows {
        let e = per_point.entry(r.point.clone()).or_insert_with(|| {
            order.push(r.point.clone());
            (0, 0, 0, 0)
        });
        e.0 += r.n_stable;
        e.1 += r.n_unstable;
        e.2 += r.n_inconclusive;
        e.3 = e.3.max(r.max_period);
    }
    let counts = csv_string(
        with(&["n_stable", "n_unstable", "n_inconclusive"]),
        order.iter().map(|p| {
            let (s, u, i, _) = per_point[p];
            let mut rec = p.clone();
            rec.extend([s, u, i].map(|v| v.to_string()));
            rec
        }),
    )?;
    let heatmap = csv_string(
        with(&["max_period"]),
        order.iter().map(|p| {
            let mut rec = p.clone();
            rec.push(per_point[p].3.to_string());
            rec
        }),
    )?;
    Ok(Figures {
        census,
        bifurcation,
        counts,
        heatmap,
    })
}

/// Writes `archive.jsonl`, the CSV tables, `failures.json` and the
/// configuration used.
pub fn write_outputs(dir: &Path, cfg: &SweepConfig, out: &SweepOutput) -> Result<(), SweepError> {
    std::fs::create_dir_all(dir)?;
    let names = MapDef::param_names(&cfg.map)?;
    let figs = aggregate_figures(names, &out.rows, &out.archive)?;
    write_archive(
        std::io::BufWriter::new(std::fs::File::create(dir.join("archive.jsonl"))?),
        &out.archive,
    )?;
    std::fs::write(dir.join("census.csv"), figs.census)?;
    std::fs::write(dir.join("bifurcation.csv"), figs.bifurcation)?;
    std::fs::write(dir.join("counts.csv"), figs.counts)?;
    std::fs::write(dir.join("heatmap.csv"), figs.heatmap)?;
    std::fs::write(
        dir.join("failures.json"),
        serde_json::to_string_pretty(&out.failures).map_err(std::io::Error::from)?,
    )?;
    std::fs::write(
        dir.join("config.json"),
        serde_json::to_string_pretty(cfg).map_err(std::io::Error::from)?,
    )?;
    Ok(())
}
