//! Samplers for the limiting count field `N_w(t,s)`.
//!
//! `sample_chi` + `naive_realization` follow the definition literally: every class up to
//! length `L`, one halving chain per atom. `sample_limit_field` draws only atoms that
//! can ever be seen in the window, which is what makes large `d` feasible.
//!
//! The structured sampler writes a cyclic sequence with `m ≥ 2` runs as a skeleton `u`
//! (adjacent letters distinct and not mutually inverse) plus run lengths. Only the
//! `l − m` vertices inside runs can halve; the `m` run boundaries kill. An atom of
//! length `l > K` matters iff `r = l − K` inside-vertex clocks ring before time `T0`
//! and before any boundary clock.

use std::collections::HashMap;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use super::chains::{halving_chain, run_halving, ChainTrajectory};
use crate::rng::stream;
use crate::words::{a_count_f64, ClassEntry, Letter, Word, WordClassTable, WordError};

#[derive(Debug, Error, PartialEq)]
pub enum LimitError {
    #[error("need 1 <= K <= L, got K={k}, L={l}")]
    Truncation { k: usize, l: usize },
    #[error("bad parameter: {0}")]
    BadParameter(&'static str),
    #[error("grid point (t={t}, s={s}) lies outside [-{t0}, 0] x [0, {s0}]")]
    OutOfRange { t: f64, s: f64, t0: f64, s0: f64 },
    #[error(transparent)]
    Word(#[from] WordError),
}

/// An atom of `χ`: born at `z`, alive on `[z, z + v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub z: f64,
    pub v: f64,
    pub word: Word,
}

impl Atom {
    pub fn alive_at(&self, s: f64) -> bool {
        self.z <= s && s < self.z + self.v
    }
}

fn lifetime<R: Rng + ?Sized>(b: usize, rng: &mut R) -> f64 {
    if b == 0 {
        f64::INFINITY
    } else {
        Exp::new(2.0 * b as f64).expect("positive rate").sample(rng)
    }
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        0
    } else {
        Poisson::new(mean).expect("finite mean").sample(rng) as usize
    }
}

/// `χ` restricted to classes of length `≤ L` and to atoms alive somewhere in `[0, S0]`.
pub fn sample_chi<R: Rng + ?Sized>(d: usize, l_max: usize, s0: f64, rng: &mut R) -> Result<Vec<Atom>, LimitError> {
    sample_chi_from(&WordClassTable::build(d, l_max)?, s0, rng)
}

/// [`sample_chi`] over a prebuilt class table.
pub fn sample_chi_from<R: Rng + ?Sized>(table: &WordClassTable, s0: f64, rng: &mut R) -> Result<Vec<Atom>, LimitError> {
    if !(s0 >= 0.0) {
        return Err(LimitError::BadParameter("S0 must be non-negative"));
    }
    let mut atoms = Vec::new();
    for ClassEntry { word, stats: st } in table.iter() {
        let h = st.h as f64;
        for _ in 0..poisson(1.0 / h, rng) {
            atoms.push(Atom { z: 0.0, v: lifetime(st.b, rng), word: word.clone() });
        }
        for _ in 0..poisson(2.0 * st.b as f64 / h * s0, rng) {
            let z = s0 * (1.0 - rng.random::<f64>());
            atoms.push(Atom { z, v: lifetime(st.b, rng), word: word.clone() });
        }
    }
    Ok(atoms)
}

/// An atom with the part of its halving chain that can reach length `≤ K`.
#[derive(Clone, Debug)]
pub struct TrackedAtom {
    pub z: f64,
    pub v: f64,
    /// Length of the atom's word at dimension zero.
    pub length: usize,
    pub chain: ChainTrajectory,
}

/// Everything needed to read `N_w(t,s)` anywhere in `[−T0, 0] × [0, S0]`.
#[derive(Clone, Debug)]
pub struct LimitRealization {
    pub d: usize,
    pub k_max: usize,
    pub t0: f64,
    pub s0: f64,
    pub atoms: Vec<TrackedAtom>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitFieldSample {
    pub ts: Vec<f64>,
    pub ss: Vec<f64>,
    pub k_max: usize,
    /// `cells[i][j][w] = N_w(ts[i], ss[j])`; zero counts are omitted.
    pub cells: Vec<Vec<HashMap<Word, u64>>>,
}

impl LimitFieldSample {
    pub fn count(&self, i: usize, j: usize, w: &Word) -> u64 {
        self.cells[i][j].get(w).copied().unwrap_or(0)
    }

    /// `N_k(ts[i], ss[j])`.
    pub fn total(&self, i: usize, j: usize, k: usize) -> u64 {
        self.cells[i][j]
            .iter()
            .filter(|(w, _)| w.len() == k)
            .map(|(_, &c)| c)
            .sum()
    }
}

impl LimitRealization {
    fn states<'a>(&'a self, t: f64, s: f64) -> impl Iterator<Item = &'a Word> + 'a {
        self.atoms.iter().filter_map(move |a| {
            if a.z <= s && s < a.z + a.v {
                a.chain.state_at(-t).filter(|w| w.len() <= self.k_max)
            } else {
                None
            }
        })
    }

    pub fn count(&self, t: f64, s: f64, w: &Word) -> u64 {
        self.states(t, s).filter(|x| *x == w).count() as u64
    }

    pub fn total(&self, t: f64, s: f64, k: usize) -> u64 {
        self.states(t, s).filter(|x| x.len() == k).count() as u64
    }

    pub fn grid(&self, ts: &[f64], ss: &[f64]) -> Result<LimitFieldSample, LimitError> {
        for &t in ts {
            for &s in ss {
                if !(t >= -self.t0 && t <= 0.0 && s >= 0.0 && s <= self.s0) {
                    return Err(LimitError::OutOfRange { t, s, t0: self.t0, s0: self.s0 });
                }
            }
        }
        let cells = ts
            .iter()
            .map(|&t| {
                ss.iter()
                    .map(|&s| {
                        let mut m: HashMap<Word, u64> = HashMap::new();
                        for w in self.states(t, s) {
                            *m.entry(w.clone()).or_default() += 1;
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        Ok(LimitFieldSample { ts: ts.to_vec(), ss: ss.to_vec(), k_max: self.k_max, cells })
    }
}

/// The literal construction: `χ` over every class in `table` and a full halving chain
/// per atom. `L` is the table's maximum length.
pub fn naive_realization<R: Rng + ?Sized>(
    table: &WordClassTable,
    k_max: usize,
    t0: f64,
    s0: f64,
    rng: &mut R,
) -> Result<LimitRealization, LimitError> {
    check_params(k_max, table.max_len, t0, s0)?;
    let atoms = sample_chi_from(table, s0, rng)?
        .into_iter()
        .map(|a| TrackedAtom { z: a.z, v: a.v, length: a.word.len(), chain: halving_chain(&a.word, t0, rng) })
        .collect();
    Ok(LimitRealization { d: table.d, k_max, t0, s0, atoms })
}

fn check_params(k_max: usize, l_max: usize, t0: f64, s0: f64) -> Result<(), LimitError> {
    if k_max == 0 || l_max < k_max {
        return Err(LimitError::Truncation { k: k_max, l: l_max });
    }
    if !(t0 >= 0.0 && s0 >= 0.0 && t0.is_finite() && s0.is_finite()) {
        return Err(LimitError::BadParameter("T0 and S0 must be finite and non-negative"));
    }
    Ok(())
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Number of proper colourings of an `m`-cycle with `d` generators.
pub fn generator_cycles(d: usize, m: usize) -> f64 {
    let q = d as f64 - 1.0;
    q.powi(m as i32) + q * if m % 2 == 0 { 1.0 } else { -1.0 }
}

/// Skeletons of length `m ≥ 2` with `b` same-sign adjacencies.
pub fn skeleton_count(d: usize, m: usize, b: usize) -> f64 {
    if b > m || (m - b) % 2 == 1 {
        return 0.0;
    }
    2.0 * generator_cycles(d, m) * ln_choose(m, b).exp().round()
}

/// Probability that `r = l − K` of `inside` vertex clocks ring before `T0` and before
/// every boundary clock.
pub fn relevance_probability(inside: usize, r: usize, k_max: usize, t0: f64) -> f64 {
    if r == 0 {
        return 1.0;
    }
    if inside < r {
        return 0.0;
    }
    let xmax = -(-t0).exp_m1();
    if xmax <= 0.0 {
        return 0.0;
    }
    let (a, b) = (r as f64, k_max as f64 + 1.0);
    let ln_c = ln_gamma(inside as f64 + 1.0) - ln_gamma(a) - ln_gamma((inside - r) as f64 + 1.0);
    let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    (ln_c + ln_beta).exp() * beta_reg(a, b, xmax)
}

/// `Beta(a, b)` conditioned on `[0, xmax]`, by inverting the regularised incomplete beta
/// with bracketed Newton steps.
fn truncated_beta<R: Rng + ?Sized>(a: f64, b: f64, xmax: f64, rng: &mut R) -> f64 {
    let target = rng.random::<f64>() * beta_reg(a, b, xmax);
    let ln_b = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let (mut lo, mut hi) = (0.0, xmax);
    let mut x = 0.5 * xmax;
    for _ in 0..200 {
        let f = beta_reg(a, b, x) - target;
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let density = ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_b).exp();
        let next = x - f / density;
        if density > 0.0 && next > lo && next < hi {
            if (next - x).abs() <= 1e-13 * xmax {
                return next;
            }
            x = next;
        } else {
            x = 0.5 * (lo + hi);
        }
        if hi - lo <= 1e-15 * xmax {
            break;
        }
    }
    x
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Stratum {
    m: usize,
    /// Same-sign adjacencies of the skeleton (`m ≥ 2`).
    bu: usize,
    /// Expected number of relevant atoms.
    mean: f64,
}

/// Precomputed strata for `sample_limit_field`.
#[derive(Clone, Debug)]
pub struct LimitFieldPlan {
    pub d: usize,
    pub l_max: usize,
    pub k_max: usize,
    pub t0: f64,
    pub s0: f64,
    strata: Vec<Vec<Stratum>>,
}

impl LimitFieldPlan {
    pub fn new(d: usize, l_max: usize, k_max: usize, t0: f64, s0: f64) -> Result<LimitFieldPlan, LimitError> {
        check_params(k_max, l_max, t0, s0)?;
        if d == 0 {
            return Err(LimitError::BadParameter("d must be at least 1"));
        }
        let mut strata = vec![Vec::new(); l_max + 1];
        for (l, row) in strata.iter_mut().enumerate().skip(1) {
            let r = l.saturating_sub(k_max);
            // m = 1: one word per signed letter
            let b = l as f64;
            let mean1 = 2.0 * d as f64 * (1.0 + 2.0 * s0 * b) / (2 * l) as f64
                * relevance_probability(l, r, k_max, t0);
            if mean1 > 0.0 {
                row.push(Stratum { m: 1, bu: 0, mean: mean1 });
            }
            for m in 2..=l {
                let p = relevance_probability(l - m, r, k_max, t0);
                if p == 0.0 {
                    continue;
                }
                let comps = ln_choose(l - 1, m - 1).exp().round();
                for bu in 0..=m {
                    let count = skeleton_count(d, m, bu);
                    if count == 0.0 {
                        continue;
                    }
                    let b = (l - m + bu) as f64;
                    let mean = count * comps * (1.0 + 2.0 * s0 * b) / (2 * m) as f64 * p;
                    row.push(Stratum { m, bu, mean });
                }
            }
        }
        Ok(LimitFieldPlan { d, l_max, k_max, t0, s0, strata })
    }

    /// Expected number of atoms kept per realization, by initial length.
    pub fn expected_atoms(&self) -> Vec<f64> {
        self.strata.iter().map(|row| row.iter().map(|s| s.mean).sum()).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LimitRealization {
        let base: u64 = rng.random();
        let mut atoms = Vec::new();
        for l in 1..=self.l_max {
            // one stream per length, so raising L only adds atoms
            let mut lr = stream(base, &[l as u64]);
            let row = &self.strata[l];
            let total: f64 = row.iter().map(|s| s.mean).sum();
            for _ in 0..poisson(total, &mut lr) {
                let mut x = lr.random::<f64>() * total;
                let mut pick = row.len() - 1;
                for (i, s) in row.iter().enumerate() {
                    if x < s.mean {
                        pick = i;
                        break;
                    }
                    x -= s.mean;
                }
                atoms.push(self.atom(l, row[pick], &mut lr));
            }
        }
        LimitRealization { d: self.d, k_max: self.k_max, t0: self.t0, s0: self.s0, atoms }
    }

    fn atom<R: Rng + ?Sized>(&self, l: usize, st: Stratum, rng: &mut R) -> TrackedAtom {
        let b = if st.m == 1 { l } else { l - st.m + st.bu };
        let (z, v) = self.times(b, rng);
        let skeleton = if st.m == 1 {
            vec![Letter::from_code(rng.random_range(0..2 * self.d) as u16)]
        } else {
            random_skeleton(self.d, st.m, st.bu, rng)
        };
        let mut runs = random_composition(l, st.m, rng);
        let mut start = 0.0;
        if l > self.k_max {
            let r = l - self.k_max;
            let xmax = -(-self.t0).exp_m1();
            let x = truncated_beta(r as f64, self.k_max as f64 + 1.0, xmax, rng);
            start = -(-x).ln_1p();
            if st.m == 1 {
                runs[0] = self.k_max;
            } else {
                // remove r of the l − m inside vertices
                let slots: Vec<usize> = runs.iter().enumerate().flat_map(|(i, &a)| std::iter::repeat_n(i, a - 1)).collect();
                for idx in sample_indices(rng, slots.len(), r) {
                    runs[slots[idx]] -= 1;
                }
            }
        }
        let raw: Vec<Letter> = skeleton
            .iter()
            .zip(&runs)
            .flat_map(|(&letter, &a)| std::iter::repeat_n(letter, a))
            .collect();
        TrackedAtom { z, v, length: l, chain: run_halving(raw, start, self.t0, rng) }
    }

    /// Alive at `0` with probability `1/(1 + 2bS0)`, otherwise born uniformly on `(0, S0]`.
    fn times<R: Rng + ?Sized>(&self, b: usize, rng: &mut R) -> (f64, f64) {
        let at_zero = 1.0 / (1.0 + 2.0 * b as f64 * self.s0);
        let z = if rng.random::<f64>() < at_zero { 0.0 } else { self.s0 * (1.0 - rng.random::<f64>()) };
        (z, lifetime(b, rng))
    }
}

/// Uniform cyclic sequence of `m` generators with distinct neighbours.
fn random_generator_cycle<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Vec<usize> {
    debug_assert!(generator_cycles(d, m) > 0.0);
    loop {
        let mut g = vec![rng.random_range(0..d)];
        while g.len() < m {
            let prev = *g.last().unwrap();
            let mut x = rng.random_range(0..d - 1);
            if x >= prev {
                x += 1;
            }
            g.push(x);
        }
        if g[m - 1] != g[0] {
            return g;
        }
    }
}

/// Uniform skeleton of length `m ≥ 2` with `b` same-sign adjacencies.
fn random_skeleton<R: Rng + ?Sized>(d: usize, m: usize, b: usize, rng: &mut R) -> Vec<Letter> {
    let gens = random_generator_cycle(d, m, rng);
    // sign changes sit between position i−1 and i
    let mut change = vec![false; m];
    for i in sample_indices(rng, m, m - b) {
        change[i] = true;
    }
    let mut sign: i8 = if rng.random::<bool>() { 1 } else { -1 };
    gens.iter()
        .enumerate()
        .map(|(i, &g)| {
            if i > 0 && change[i] {
                sign = -sign;
            }
            Letter::new(g + 1, sign)
        })
        .collect()
}

/// Uniform composition of `l` into `m` positive parts.
fn random_composition<R: Rng + ?Sized>(l: usize, m: usize, rng: &mut R) -> Vec<usize> {
    let mut cuts: Vec<usize> = sample_indices(rng, l - 1, m - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(m);
    let mut prev = 0;
    for c in cuts {
        parts.push(c - prev);
        prev = c;
    }
    parts.push(l - prev);
    parts
}

/// Expected number of atoms at one cell of dimension `−θ` whose word at dimension zero is
/// longer than `L`. By duality the length is a Yule process run from `j ≤ K`.
pub fn truncation_tail(d: usize, k_max: usize, l_max: usize, theta: f64) -> f64 {
    let p = (-theta).exp();
    let mut total = 0.0;
    for j in 1..=k_max {
        let kept: f64 = (j..=l_max)
            .map(|l| (ln_choose(l - 1, j - 1) + j as f64 * p.ln() + (l - j) as f64 * (-theta).exp_m1().abs().ln()).exp())
            .sum();
        let tail = if theta == 0.0 { 0.0 } else { (1.0 - kept).max(0.0) };
        total += a_count_f64(d, j) / (2 * j) as f64 * tail;
    }
    total
}

/// Smallest `L ≥ K + 8` whose truncation tail at `θ = T0` is below `eps`.
pub fn choose_truncation(d: usize, k_max: usize, t0: f64, eps: f64) -> usize {
    let mut l = k_max + 8;
    while truncation_tail(d, k_max, l, t0) > eps && l < k_max + 200 {
        l += 1;
    }
    l
}

/// Sample the count field on a grid with `L`-truncation.
#[allow(clippy::too_many_arguments)]
pub fn sample_limit_field<R: Rng + ?Sized>(
    d: usize,
    l_max: usize,
    k_max: usize,
    t0: f64,
    s0: f64,
    ts: &[f64],
    ss: &[f64],
    rng: &mut R,
) -> Result<LimitFieldSample, LimitError> {
    LimitFieldPlan::new(d, l_max, k_max, t0, s0)?.sample(rng).grid(ts, ss)
}

/// `(2d−1)^{−k/2} (2k N_k − a(d,k))` on every grid cell.
pub fn scaled_x(sample: &LimitFieldSample, d: usize, k: usize) -> Vec<Vec<f64>> {
    assert!(k >= 1 && k <= sample.k_max);
    let a = a_count_f64(d, k);
    let scale = ((2 * d - 1) as f64).powf(-(k as f64) / 2.0);
    (0..sample.ts.len())
        .map(|i| {
            (0..sample.ss.len())
                .map(|j| scale * (2.0 * k as f64 * sample.total(i, j, k) as f64 - a))
                .collect()
        })
        .collect()
}
