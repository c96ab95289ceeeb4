use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use rrg::cycles::build_graph;
use rrg::dynamics::{field_grid, GridSpec};
use rrg::harness::criteria::{run_criterion_with, criterion_config, Suite, CRITERIA};
use rrg::harness::output::{CovRow, LimitRow, SimulateRow, SpectraCsvRow, WordRow};
use rrg::harness::{map_replicas, parse_grid, validation_summary, write_csv, write_json, ExperimentConfig};
use rrg::limitfield::{cov_finite_d, cov_g, cov_u, Covariance, LimitFieldPlan};
use rrg::rng::stream;
use rrg::spectra::spectral_report;
use rrg::tower::{uniform_permutation, Permutation};
use rrg::words::{enumerate_classes, Word};

#[derive(Parser)]
#[command(name = "rrg", version, about = "Random regular graphs evolving in dimension and time")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file with defaults for the experiment parameters.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Word classes of one length with their statistics.
    Words {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Cycle counts of finite graphs on a (t, s) grid.
    Simulate {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long = "T")]
        horizon: Option<f64>,
        #[arg(long = "T0")]
        t0: Option<f64>,
        #[arg(long = "S0")]
        s0: Option<f64>,
        #[arg(long, value_name = "NTxNS")]
        grid: Option<String>,
        #[arg(long)]
        replicas: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Counts of the limiting Poisson field on a (t, s) grid.
    Limit {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long = "K")]
        k_max: Option<usize>,
        /// Truncation length; K + 8 when absent.
        #[arg(long = "L")]
        l_max: Option<usize>,
        #[arg(long = "T0")]
        t0: Option<f64>,
        #[arg(long = "S0")]
        s0: Option<f64>,
        #[arg(long, value_name = "NTxNS")]
        grid: Option<String>,
        #[arg(long)]
        replicas: Option<usize>,
    },
    /// Closed-form covariances at point pairs read from a CSV `t1,s1,t2,s2`.
    Cov {
        #[arg(long, value_enum)]
        mode: CovMode,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        points: PathBuf,
    },
    /// Trace identity and cycle counts of one random graph.
    Spectra {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Run acceptance criteria and write a JSON summary; exits non-zero on failure.
    Validate {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Run only these criteria.
        #[arg(long = "criterion", value_parser = clap::value_parser!(u8).range(1..=9))]
        criteria: Vec<u8>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CovMode {
    Finite,
    #[value(name = "U")]
    U,
    #[value(name = "G")]
    G,
}

#[derive(Deserialize)]
struct PointPair {
    t1: f64,
    s1: f64,
    t2: f64,
    s2: f64,
}

fn read_points(path: &Path) -> Result<Vec<PointPair>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let rows: Result<Vec<PointPair>, _> = r.deserialize().collect();
    Ok(rows?)
}

fn require_positive(pairs: &[(&str, usize)]) -> Result<()> {
    for (name, v) in pairs {
        if *v == 0 {
            bail!("{name} must be positive");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let out = cli.out.as_deref();
    let seed = cfg.seed;
    match cli.cmd {
        Cmd::Words { d, k } => {
            let (d, k) = (d.unwrap_or(cfg.d), k.unwrap_or(cfg.k_max));
            require_positive(&[("d", d), ("k", k)])?;
            let classes = enumerate_classes(d, k)?;
            write_csv(out, classes.iter().map(WordRow::from))?;
        }
        Cmd::Simulate { d, horizon, t0, s0, grid, replicas, kmax } => {
            let d = d.unwrap_or(cfg.d);
            let horizon = horizon.unwrap_or(cfg.horizon);
            let (t0, s0) = (t0.unwrap_or(cfg.t0), s0.unwrap_or(cfg.s0));
            let (nt, ns) = parse_grid(grid.as_deref().unwrap_or(&cfg.grid))?;
            let replicas = replicas.unwrap_or(cfg.replicas);
            let k_max = kmax.unwrap_or(cfg.k_max);
            require_positive(&[("d", d), ("kmax", k_max), ("replicas", replicas)])?;
            if !(t0 >= 0.0 && s0 >= 0.0 && t0 <= horizon) {
                bail!("need 0 <= T0 <= T and S0 >= 0");
            }
            let spec = GridSpec::uniform(t0, s0, nt, ns);
            let classes: Vec<Word> = (1..=k_max).map(|k| enumerate_classes(d, k)).collect::<Result<Vec<_>, _>>()?.concat();
            let per: Vec<Option<Vec<SimulateRow>>> = map_replicas(seed, replicas, |r, rng| {
                let grid = field_grid(d, horizon, t0, s0, &spec, rng).ok()?;
                let counts = grid.word_counts(k_max);
                let mut rows = Vec::new();
                for (i, &t) in grid.ts.iter().enumerate() {
                    for (j, &s) in grid.ss.iter().enumerate() {
                        for w in &classes {
                            let count = counts[i][j].get(w).copied().unwrap_or(0);
                            rows.push(SimulateRow { replica: r, t, s, k: w.len(), word: w.to_string(), count });
                        }
                    }
                }
                Some(rows)
            });
            let skipped = per.iter().filter(|p| p.is_none()).count();
            if skipped > 0 {
                eprintln!("skipped {skipped} replicas whose top dimension was below 2");
            }
            write_csv(out, per.into_iter().flatten().flatten())?;
        }
        Cmd::Limit { d, k_max, l_max, t0, s0, grid, replicas } => {
            let d = d.unwrap_or(cfg.d);
            let k_max = k_max.unwrap_or(cfg.k_max);
            let l_max = l_max.or(cfg.l_max).unwrap_or(k_max + 8);
            let (t0, s0) = (t0.unwrap_or(cfg.t0), s0.unwrap_or(cfg.s0));
            let (nt, ns) = parse_grid(grid.as_deref().unwrap_or(&cfg.grid))?;
            let replicas = replicas.unwrap_or(cfg.replicas);
            require_positive(&[("d", d), ("K", k_max), ("replicas", replicas)])?;
            let spec = GridSpec::uniform(t0, s0, nt, ns);
            let plan = LimitFieldPlan::new(d, l_max, k_max, t0, s0)?;
            let classes: Vec<Word> = (1..=k_max).map(|k| enumerate_classes(d, k)).collect::<Result<Vec<_>, _>>()?.concat();
            let per: Vec<Vec<LimitRow>> = map_replicas(seed, replicas, |r, rng| {
                let sample = plan.sample(rng).grid(&spec.ts, &spec.ss).expect("grid inside window");
                let mut rows = Vec::new();
                for (i, &t) in spec.ts.iter().enumerate() {
                    for (j, &s) in spec.ss.iter().enumerate() {
                        for w in &classes {
                            rows.push(LimitRow { replica: r, t, s, word: w.to_string(), count: sample.count(i, j, w) });
                        }
                    }
                }
                rows
            });
            write_csv(out, per.into_iter().flatten())?;
        }
        Cmd::Cov { mode, d, j, k, points } => {
            let d = d.unwrap_or(cfg.d);
            let k = k.unwrap_or(j);
            require_positive(&[("d", d), ("j", j), ("k", k)])?;
            let mut rows = Vec::new();
            for p in read_points(&points)? {
                let needs_window = !matches!(mode, CovMode::G);
                if needs_window && (p.t1 > 0.0 || p.t2 > 0.0) {
                    bail!("dimensions t must be <= 0");
                }
                if p.s1 < 0.0 || p.s2 < 0.0 {
                    bail!("times s must be >= 0");
                }
                let value = match mode {
                    CovMode::Finite => cov_finite_d(d, j, k, p.t1, p.s1, p.t2, p.s2),
                    CovMode::U => Covariance::Exact(if j == k { cov_u(j, p.t1, p.s1, p.t2, p.s2) } else { 0.0 }),
                    CovMode::G => Covariance::Exact(if j == k { cov_g(j, p.t1, p.s1, p.t2, p.s2) } else { 0.0 }),
                };
                let (cov, lo, hi) = match value {
                    Covariance::Exact(v) => (Some(v), None, None),
                    Covariance::Bounds { lo, hi } => (None, Some(lo), Some(hi)),
                };
                rows.push(CovRow { t1: p.t1, s1: p.s1, t2: p.t2, s2: p.s2, cov, lo, hi });
            }
            write_csv(out, rows)?;
        }
        Cmd::Spectra { d, n, kmax } => {
            let (d, n, k_max) = (d.unwrap_or(cfg.d), n.unwrap_or(cfg.n), kmax.unwrap_or(cfg.k_max));
            require_positive(&[("d", d), ("n", n), ("kmax", k_max)])?;
            let mut rng = stream(seed, &[0]);
            let perms: Vec<Permutation> = (0..d).map(|_| uniform_permutation(n, &mut rng)).collect();
            let report = spectral_report(&build_graph(&perms)?, k_max)?;
            write_csv(out, report.rows.iter().map(SpectraCsvRow::from))?;
        }
        Cmd::Validate { suite, criteria } => {
            let ids: Vec<u8> = if criteria.is_empty() { suite.members().to_vec() } else { criteria };
            debug_assert!(ids.iter().all(|i| CRITERIA.contains(i)));
            let mut outcomes = Vec::new();
            for id in ids {
                let o = run_criterion_with(id, &criterion_config(id, seed));
                eprintln!("{}", o.summary_line());
                outcomes.push(o);
            }
            let summary = validation_summary(suite, seed, &outcomes);
            write_json(out, &summary)?;
            return Ok(outcomes.iter().all(|o| o.pass()));
        }
    }
    Ok(true)
}
