//! Monte Carlo and exact checks. Each returns one report per tested quantity.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use crate::cycles::{build_graph, cnbw_counts, cycle_counts, is_tangle_free};
use crate::dynamics::{field_grid, GridSpec};
use crate::harness::config::ExperimentConfig;
use crate::harness::parallel::map_replicas;
use crate::harness::stats::{
    correlation, covariance_se, ks_normal, mean_se, poisson_tv, StatReport, Tolerance,
};
use crate::harness::tracking::{halving_rates, transposition_rates, HalvingTally, TranspositionTally};
use crate::limitfield::{
    choose_truncation, cov_finite_d, cov_g, cov_u, doubling_chain, halving_chain, scaled_x, tau_mgf, yule_mgf,
    LimitFieldPlan,
};
use crate::spectra::{f_trace, gamma_traces, scaled_eigenvalues};
use crate::tower::{uniform_permutation, Permutation};
use crate::words::{a_count, a_count_f64, enumerate_classes, halvings, orbit, Halving, Word};

fn stamp(mut reports: Vec<StatReport>, start: Instant) -> Vec<StatReport> {
    let secs = start.elapsed().as_secs_f64();
    for r in &mut reports {
        r.runtime = secs;
    }
    reports
}

fn sigmas(cfg: &ExperimentConfig) -> Tolerance {
    Tolerance::sigmas(cfg.sigmas)
}

/// Class identity `Σ 2k/h = a(d,k)` and orbit sizes, for `d ≤ cfg.d`, `k ≤ cfg.k_max`.
pub fn run_word_algebra(cfg: &ExperimentConfig) -> Vec<StatReport> {
    let start = Instant::now();
    let mut out = Vec::new();
    for d in 1..=cfg.d {
        for k in 1..=cfg.k_max {
            let classes = enumerate_classes(d, k).expect("within enumeration budget");
            let weighted: u128 = classes.iter().map(|w| (2 * k / w.h()) as u128).sum();
            let a = a_count(d, k).expect("fits");
            out.push(StatReport::exact(format!("class sum d={d} k={k}"), weighted as f64, a as f64, 0.0));
            let bad = classes
                .iter()
                .filter(|w| orbit(w.letters()).len() != 2 * k / w.h())
                .count();
            out.push(StatReport::exact(format!("orbit mismatches d={d} k={k}"), bad as f64, 0.0, 0.0));
        }
    }
    stamp(out, start)
}

fn random_graph(d: usize, n: usize, rng: &mut crate::rng::StreamRng) -> crate::cycles::MultiGraph {
    let perms: Vec<Permutation> = (0..d).map(|_| uniform_permutation(n, rng)).collect();
    build_graph(&perms).expect("equal sizes")
}

/// Trace identity on `cfg.replicas` graphs cycling through the given `(d, n)` shapes.
pub fn run_spectra_identity(cfg: &ExperimentConfig, shapes: &[(usize, usize)]) -> Vec<StatReport> {
    let start = Instant::now();
    let k_max = cfg.k_max;
    let rows = map_replicas(cfg.seed, cfg.replicas, |r, rng| {
        let (d, n) = shapes[r as usize % shapes.len()];
        let g = random_graph(d, n, rng);
        let eigs = scaled_eigenvalues(&g).expect("symmetric adjacency");
        let traces = gamma_traces(&eigs, d, k_max);
        let walks = cnbw_counts(&g, k_max);
        let q = (2 * d - 1) as f64;
        let residual = (1..=k_max)
            .map(|k| (traces[k] - walks[k] as f64 / q.powf(k as f64 / 2.0)).abs())
            .fold(0.0, f64::max);
        // f traces count cycles only up to the largest tangle-free length
        let free = (1..=k_max).take_while(|&k| is_tangle_free(&g, k, k)).last().unwrap_or(0);
        let cycles = cycle_counts(&g, free);
        let f_err = (1..=free)
            .map(|k| (f_trace(&traces, k, d) - cycles[k] as f64).abs())
            .fold(0.0, f64::max);
        (residual, f_err, free == k_max)
    });
    let max_res = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_f = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let tangled = rows.iter().filter(|r| !r.2).count();
    let out = vec![
        StatReport::new("max trace residual", max_res, 0.0, 0.0, Tolerance::AtMost { bound: 1e-6 }),
        StatReport::new("max |f trace - cycle count| (tangle-free)", max_f, 0.0, 0.0, Tolerance::AtMost { bound: 1e-6 }),
        StatReport::new(
            format!("graphs not ({k_max},{k_max})-tangle-free"),
            tangled as f64,
            0.0,
            0.0,
            Tolerance::AtMost { bound: f64::INFINITY },
        ),
    ];
    stamp(out, start)
}

/// Mean and Poisson TV distance of `k`-cycle counts in `G(n, 2d)`.
pub fn run_poisson_check(cfg: &ExperimentConfig, tv_bound: f64) -> Vec<StatReport> {
    assert!(cfg.n >= 100 * cfg.k_max, "n too small for the Poisson regime");
    let start = Instant::now();
    let (d, n, k_max) = (cfg.d, cfg.n, cfg.k_max);
    let counts = map_replicas(cfg.seed, cfg.replicas, |_, rng| cycle_counts(&random_graph(d, n, rng), k_max));
    let mut out = Vec::new();
    for k in 1..=k_max {
        let lambda = a_count_f64(d, k) / (2 * k) as f64;
        let ck: Vec<u64> = counts.iter().map(|c| c[k]).collect();
        let xs: Vec<f64> = ck.iter().map(|&c| c as f64).collect();
        let (m, se) = mean_se(&xs);
        out.push(StatReport::new(format!("mean C_{k}"), m, se, lambda, sigmas(cfg)));
        out.push(StatReport::new(
            format!("TV(C_{k}, Poisson)"),
            poisson_tv(&ck, lambda, 20),
            0.0,
            0.0,
            Tolerance::AtMost { bound: tv_bound },
        ));
    }
    stamp(out, start)
}

/// Death hazards and birth rates of cycles under random transpositions, over
/// `cfg.replicas` runs of length `cfg.s0`.
pub fn run_bd_rate_check(cfg: &ExperimentConfig) -> Vec<StatReport> {
    assert!(cfg.n >= 1000);
    let start = Instant::now();
    let (d, n, k_max, dur) = (cfg.d, cfg.n, cfg.k_max, cfg.s0);
    let tallies = map_replicas(cfg.seed, cfg.replicas, |_, rng| transposition_rates(d, n, k_max, dur, rng));
    let mut total = TranspositionTally::default();
    for t in &tallies {
        total.merge(t);
    }
    let mut out = Vec::new();
    let named: Word = "p1.p1".parse().expect("word");
    for k in 1..=k_max {
        for w in enumerate_classes(d, k).expect("small") {
            let tally = total.words.get(&w).cloned().unwrap_or_default();
            let (birth, death) = (2.0 * w.b() as f64 / w.h() as f64, 2.0 * w.b() as f64);
            let hazard = tally.deaths as f64 / tally.exposure;
            let brate = tally.births as f64 / total.duration;
            if w.b() == 0 {
                out.push(StatReport::new(
                    format!("hazard {w}"),
                    hazard,
                    0.0,
                    death,
                    Tolerance::AtMost { bound: 5.0 / n as f64 },
                ));
                out.push(StatReport::new(
                    format!("birth rate {w}"),
                    brate,
                    0.0,
                    birth,
                    Tolerance::AtMost { bound: 5.0 / n as f64 },
                ));
                continue;
            }
            let hse = (death / tally.exposure).sqrt();
            let bse = (birth / total.duration).sqrt();
            out.push(StatReport::new(format!("hazard {w}"), hazard, hse, death, sigmas(cfg)));
            out.push(StatReport::new(format!("birth rate {w}"), brate, bse, birth, sigmas(cfg)));
            if w == named {
                out.push(StatReport::new(format!("hazard {w} (5%)"), hazard, hse, death, Tolerance::Relative { tol: 0.05 }));
                out.push(StatReport::new(format!("birth rate {w} (5%)"), brate, bse, birth, Tolerance::Relative { tol: 0.05 }));
            }
        }
    }
    stamp(out, start)
}

/// Rate table of the halving chain: `(w, target) → rate`.
pub fn halving_table(d: usize, k_max: usize) -> BTreeMap<(Word, Halving), f64> {
    let mut table = BTreeMap::new();
    for k in 1..=k_max {
        for w in enumerate_classes(d, k).expect("small") {
            for (_, h) in halvings(&w) {
                *table.entry((w.clone(), h)).or_insert(0.0) += 1.0;
            }
            if k > 1 && k > w.c() {
                *table.entry((w.clone(), Halving::Death)).or_insert(0.0) += (k - w.c()) as f64;
            }
        }
    }
    table
}

/// Backward-in-dimension transition rates of tracked cycles, from `T` down to `T − T0`.
pub fn run_halving_check(cfg: &ExperimentConfig) -> Vec<StatReport> {
    let start = Instant::now();
    let (d, horizon, depth, k_max) = (cfg.d, cfg.horizon, cfg.t0, cfg.k_max);
    let tallies = map_replicas(cfg.seed, cfg.replicas, |_, rng| halving_rates(d, horizon, depth, k_max, rng));
    let mut total = HalvingTally::default();
    for t in &tallies {
        total.merge(t);
    }
    let table = halving_table(d, k_max);
    let mut out = Vec::new();
    for ((w, to), &rate) in &table {
        let exposure = total.exposure.get(w).copied().unwrap_or(0.0);
        let count = total.transitions.get(&(w.clone(), to.clone())).copied().unwrap_or(0);
        let target = match to {
            Halving::Word(u) => u.to_string(),
            Halving::Death => "death".into(),
        };
        out.push(StatReport::new(
            format!("rate {w} -> {target}"),
            count as f64 / exposure,
            (rate / exposure).sqrt(),
            rate,
            sigmas(cfg),
        ));
    }
    let unexpected: u64 = total
        .transitions
        .iter()
        .filter(|(key, _)| !table.contains_key(*key))
        .map(|(_, &c)| c)
        .sum();
    out.push(StatReport::exact("transitions outside the rate table", unexpected as f64, 0.0, 0.0));
    stamp(out, start)
}

/// Point pairs `((ti, si), (ti, si))` used by the covariance check, as grid indices into
/// `ts = [−T0, 0]`, `ss = [0, S0]`.
pub const COV_PAIRS: [((usize, usize), (usize, usize)); 6] = [
    ((1, 0), (1, 0)),
    ((1, 0), (1, 1)),
    ((1, 0), (0, 0)),
    ((1, 0), (0, 1)),
    ((0, 0), (0, 1)),
    ((1, 1), (0, 0)),
];

/// Totals `N_k` on a two-by-two grid, flattened as `[ti][si][k]`.
type GridTotals = Vec<Vec<Vec<f64>>>;

fn cov_reports(
    label: &str,
    samples: &[GridTotals],
    ts: &[f64],
    ss: &[f64],
    cfg: &ExperimentConfig,
) -> Vec<StatReport> {
    let series = |ti: usize, si: usize, k: usize| -> Vec<f64> { samples.iter().map(|g| g[ti][si][k]).collect() };
    let mut out = Vec::new();
    for j in 1..=cfg.k_max {
        for &((a, b), (c, e)) in &COV_PAIRS {
            let reference = cov_finite_d(cfg.d, j, j, ts[a], ss[b], ts[c], ss[e]).exact().expect("same length");
            let (est, se) = covariance_se(&series(a, b, j), &series(c, e, j));
            out.push(StatReport::new(
                format!("{label} cov N_{j}({},{}) N_{j}({},{})", ts[a], ss[b], ts[c], ss[e]),
                est,
                se,
                reference,
                sigmas(cfg),
            ));
        }
    }
    for j in 1..=cfg.k_max {
        for k in j + 1..=cfg.k_max {
            for ti in 0..ts.len() {
                for si in 0..ss.len() {
                    let (est, se) = covariance_se(&series(ti, 0, j), &series(ti, si, k));
                    out.push(StatReport::new(
                        format!("{label} cov N_{j}({},{}) N_{k}({},{})", ts[ti], ss[0], ts[ti], ss[si]),
                        est,
                        se,
                        0.0,
                        sigmas(cfg),
                    ));
                }
            }
        }
    }
    out
}

/// Covariances of cycle counts from the finite-graph field and from the limit point
/// process, against the closed form.
pub fn run_cov_check(cfg: &ExperimentConfig) -> Vec<StatReport> {
    let start = Instant::now();
    let (d, k_max, t0, s0) = (cfg.d, cfg.k_max, cfg.t0, cfg.s0);
    let ts = vec![-t0, 0.0];
    let ss = vec![0.0, s0];
    let spec = GridSpec { ts: ts.clone(), ss: ss.clone() };

    let finite: Vec<Option<GridTotals>> = map_replicas(cfg.seed, cfg.replicas, |_, rng| {
        let grid = field_grid(d, cfg.horizon, t0, s0, &spec, rng).ok()?;
        Some(
            grid.cells
                .iter()
                .map(|row| row.iter().map(|g| cycle_counts(g, k_max).into_iter().map(|c| c as f64).collect()).collect())
                .collect(),
        )
    });
    let skipped = finite.iter().filter(|x| x.is_none()).count();
    let finite: Vec<GridTotals> = finite.into_iter().flatten().collect();

    let l_max = cfg.l_max.unwrap_or_else(|| choose_truncation(d, k_max, t0, 1e-3));
    let plan = LimitFieldPlan::new(d, l_max, k_max, t0, s0).expect("valid plan");
    let limit: Vec<GridTotals> = map_replicas(cfg.seed.wrapping_add(0x9e37_79b9_7f4a_7c15), cfg.replicas, |_, rng| {
        let sample = plan.sample(rng).grid(&ts, &ss).expect("grid inside window");
        (0..ts.len())
            .map(|i| (0..ss.len()).map(|j| (0..=k_max).map(|k| if k == 0 { 0.0 } else { sample.total(i, j, k) as f64 }).collect()).collect())
            .collect()
    });

    let mut out = cov_reports("graph", &finite, &ts, &ss, cfg);
    out.extend(cov_reports("limit", &limit, &ts, &ss, cfg));
    out.push(StatReport::new(
        "graph replicas skipped (n < 2)",
        skipped as f64,
        0.0,
        0.0,
        Tolerance::AtMost { bound: cfg.replicas as f64 * 0.01 },
    ));
    stamp(out, start)
}

/// Analytic limits: `cov_U → cov_G` at `T0`, the Yule transform limit, and `tau_mgf`
/// against its defining sum.
pub fn run_gff_limit_check(t0: f64) -> Vec<StatReport> {
    let start = Instant::now();
    let us = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let vs = [0.0, 0.5, 1.0, 1.5, 2.0];
    let points: Vec<(f64, f64)> = us.iter().flat_map(|&u| vs.iter().map(move |&v| (u, v))).collect();
    let scale = (-t0).exp() / 2.0;
    let mut out = Vec::new();
    for j in 1..=4 {
        let mut err: f64 = 0.0;
        for &(u1, v1) in &points {
            for &(u2, v2) in &points {
                let lhs = cov_u(j, -t0 + u1, v1 * scale, -t0 + u2, v2 * scale);
                err = err.max((lhs - cov_g(j, u1, v1, u2, v2)).abs());
            }
        }
        out.push(StatReport::new(format!("sup |cov_U - cov_G| j={j}"), err, 0.0, 0.0, Tolerance::AtMost { bound: 1e-4 }));
    }
    let theta = 20.0;
    let err = (0..=50)
        .map(|i| {
            let v = i as f64 / 10.0;
            (yule_mgf(theta, v * (-theta).exp() / 2.0) - 1.0 / (1.0 + v)).abs()
        })
        .fold(0.0, f64::max);
    out.push(StatReport::new("sup |yule_mgf - 1/(1+v)| at theta=20", err, 0.0, 0.0, Tolerance::AtMost { bound: 1e-6 }));
    for j in 1..=10 {
        let mut err: f64 = 0.0;
        for s in [0.0, 0.05, 0.3, 1.0] {
            let brute: f64 = (0u32..1 << j)
                .map(|mask| {
                    let changes = (0..j).filter(|&i| (mask >> i & 1) != (mask >> ((i + 1) % j) & 1)).count();
                    (2.0 * s * changes as f64).exp()
                })
                .sum::<f64>()
                / (1u64 << j) as f64;
            err = err.max((tau_mgf(j, s) - brute).abs() / brute);
        }
        out.push(StatReport::new(format!("tau_mgf vs brute force j={j}"), err, 0.0, 0.0, Tolerance::AtMost { bound: 1e-12 }));
    }
    stamp(out, start)
}

/// Words reachable from `w` by halving (including `w`).
fn halving_closure(w: &Word) -> BTreeSet<Word> {
    let mut seen = BTreeSet::from([w.clone()]);
    let mut stack = vec![w.clone()];
    while let Some(x) = stack.pop() {
        for (_, h) in halvings(&x) {
            if let Halving::Word(u) = h {
                if seen.insert(u.clone()) {
                    stack.push(u);
                }
            }
        }
    }
    seen
}

/// Duality of the halving and doubling chains with respect to `1/h`, for indicator
/// functions of words of length `≤ cfg.k_max`, at chain time `cfg.t0`.
pub fn run_duality_check(cfg: &ExperimentConfig) -> Vec<StatReport> {
    let start = Instant::now();
    let u = cfg.t0;
    let words: Vec<Word> = (1..=cfg.k_max)
        .flat_map(|k| enumerate_classes(cfg.d, k).expect("small"))
        .collect();
    let index: HashMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let none = usize::MAX;
    // per replica: halving endpoint and doubling endpoint of every start word
    let ends: Vec<Vec<(usize, usize)>> = map_replicas(cfg.seed, cfg.replicas, |_, rng| {
        words
            .iter()
            .map(|w| {
                let h = halving_chain(w, u, rng).state_at(u).and_then(|x| index.get(x).copied()).unwrap_or(none);
                let dbl = doubling_chain(w, u, rng).state_at(u).and_then(|x| index.get(x).copied()).unwrap_or(none);
                (h, dbl)
            })
            .collect()
    });
    let r = cfg.replicas as f64;
    let m = words.len();
    let mut halve = vec![vec![0.0; m]; m];
    let mut double = vec![vec![0.0; m]; m];
    for row in &ends {
        for (i, &(h, dbl)) in row.iter().enumerate() {
            if h != none {
                halve[i][h] += 1.0;
            }
            if dbl != none {
                double[i][dbl] += 1.0;
            }
        }
    }
    let mut out = Vec::new();
    for (i, w) in words.iter().enumerate() {
        for v in halving_closure(w) {
            let k = index[&v];
            let (p, q) = (halve[i][k] / r, double[k][i] / r);
            let (hw, hv) = (w.h() as f64, v.h() as f64);
            let lhs = p / hw;
            let rhs = q / hv;
            let se = ((p * (1.0 - p) / r) / (hw * hw) + (q * (1.0 - q) / r) / (hv * hv)).sqrt();
            out.push(StatReport::new(format!("duality {w} -> {v}"), lhs - rhs, se, 0.0, sigmas(cfg)));
        }
    }
    stamp(out, start)
}

/// One-point Gaussianity of `X_k` from the limit point process at large `d`: KS distance
/// of `X_{k_max}` (standardised by its exact variance) from the standard normal, exact
/// variances, and correlations between different lengths.
pub fn run_gaussian_check(cfg: &ExperimentConfig, ks_bound: f64) -> Vec<StatReport> {
    let start = Instant::now();
    let (d, k_max, t0, s0) = (cfg.d, cfg.k_max, cfg.t0, cfg.s0);
    let l_max = cfg.l_max.unwrap_or_else(|| choose_truncation(d, k_max, t0, 1e-3));
    let plan = LimitFieldPlan::new(d, l_max, k_max, t0, s0).expect("valid plan");
    let (ts, ss) = ([-t0], [s0]);
    let xs: Vec<Vec<f64>> = map_replicas(cfg.seed, cfg.replicas, |_, rng| {
        let sample = plan.sample(rng).grid(&ts, &ss).expect("grid inside window");
        (1..=k_max).map(|k| scaled_x(&sample, d, k)[0][0]).collect()
    });
    let series = |k: usize| -> Vec<f64> { xs.iter().map(|x| x[k - 1]).collect() };
    let mut out = Vec::new();
    for k in 1..=k_max {
        let var = 2.0 * k as f64 * a_count_f64(d, k) / ((2 * d - 1) as f64).powi(k as i32);
        let x = series(k);
        let (v, se) = covariance_se(&x, &x);
        out.push(StatReport::new(format!("Var X_{k}"), v, se, var, sigmas(cfg)));
        if k == k_max {
            let z: Vec<f64> = x.iter().map(|a| a / var.sqrt()).collect();
            out.push(StatReport::new(
                format!("KS(X_{k}/sd, N(0,1))"),
                ks_normal(&z),
                0.0,
                0.0,
                Tolerance::AtMost { bound: ks_bound },
            ));
        }
    }
    let se = 1.0 / (cfg.replicas as f64).sqrt();
    for j in 1..=k_max {
        for k in j + 1..=k_max {
            out.push(StatReport::new(format!("corr(X_{j}, X_{k})"), correlation(&series(j), &series(k)), se, 0.0, sigmas(cfg)));
        }
    }
    stamp(out, start)
}
