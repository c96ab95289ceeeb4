//! Halving and doubling chains on word classes.
//!
//! Both run on a raw representative. The halving chain puts a rate-one clock on every
//! cyclic vertex: between equal letters it removes one of them, otherwise it kills.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::words::{canonical_unchecked, Letter, Word};

/// Piecewise-constant path: `states[i]` holds on `[times[i], times[i+1])`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Word>,
    pub death: Option<f64>,
    pub horizon: f64,
}

impl ChainTrajectory {
    /// State at chain time `u`; `None` before the start or after death.
    pub fn state_at(&self, u: f64) -> Option<&Word> {
        if self.death.is_some_and(|z| u >= z) {
            return None;
        }
        let i = self.times.partition_point(|&x| x <= u);
        if i == 0 {
            None
        } else {
            Some(&self.states[i - 1])
        }
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn jumps(&self) -> usize {
        self.times.len() - 1 + self.death.is_some() as usize
    }
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Halving chain from the raw word `raw`, running on `[start, horizon]`.
pub fn run_halving<R: Rng + ?Sized>(mut raw: Vec<Letter>, start: f64, horizon: f64, rng: &mut R) -> ChainTrajectory {
    let mut traj = ChainTrajectory {
        times: vec![start],
        states: vec![canonical_unchecked(&raw)],
        death: None,
        horizon,
    };
    let mut now = start;
    loop {
        let k = raw.len();
        now += exp1(rng) / k as f64;
        if now > horizon {
            return traj;
        }
        let i = rng.random_range(0..k);
        let j = (i + 1) % k;
        if k > 1 && raw[i] == raw[j] {
            raw.remove(j);
            traj.times.push(now);
            traj.states.push(canonical_unchecked(&raw));
        } else {
            traj.death = Some(now);
            return traj;
        }
    }
}

pub fn halving_chain<R: Rng + ?Sized>(w: &Word, horizon: f64, rng: &mut R) -> ChainTrajectory {
    assert!(horizon >= 0.0);
    run_halving(w.letters().to_vec(), 0.0, horizon, rng)
}

/// Doubling chain: every letter doubles at rate one, so `|Y|` is a Yule process.
pub fn doubling_chain<R: Rng + ?Sized>(w: &Word, horizon: f64, rng: &mut R) -> ChainTrajectory {
    assert!(horizon >= 0.0);
    let mut raw = w.letters().to_vec();
    let mut traj = ChainTrajectory {
        times: vec![0.0],
        states: vec![w.clone()],
        death: None,
        horizon,
    };
    let mut now = 0.0;
    loop {
        now += exp1(rng) / raw.len() as f64;
        if now > horizon {
            return traj;
        }
        let i = rng.random_range(0..raw.len());
        raw.insert(i, raw[i]);
        traj.times.push(now);
        traj.states.push(canonical_unchecked(&raw));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{enumerate_classes, halvings, Halving};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn simple_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let t = halving_chain(&w("p1p1"), 50.0, &mut rng);
            assert_eq!(t.states.len(), 2);
            assert_eq!(t.states[1], w("p1"));
            assert!(t.death.unwrap() > t.times[1]);
            let t = halving_chain(&w("p1p2"), 50.0, &mut rng);
            assert_eq!(t.states.len(), 1);
            assert!(t.death.is_some());
        }
        let t = halving_chain(&w("p1p1p1"), 0.0, &mut rng);
        assert_eq!(t.state_at(0.0), Some(&w("p1p1p1")));
        assert_eq!(t.jumps(), 0);
    }

    #[test]
    fn kill_rate_of_p1p2() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 20_000;
        let mean: f64 = (0..n)
            .map(|_| halving_chain(&w("p1p2"), f64::INFINITY, &mut rng).death.unwrap())
            .sum::<f64>()
            / n as f64;
        // Exp(2)
        assert!((mean - 0.5).abs() < 4.0 * 0.5 / (n as f64).sqrt());
    }

    #[test]
    fn halving_generator_matches_rate_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let per_word = 6_000;
        let mut failures = 0;
        let mut tests = 0usize;
        for k in 1..=4 {
            for word in enumerate_classes(2, k).unwrap() {
                let mut rates: HashMap<Halving, f64> = HashMap::new();
                for (_, h) in halvings(&word) {
                    *rates.entry(h).or_default() += 1.0;
                }
                let kill = (k - word.c()) as f64;
                if k > 1 {
                    *rates.entry(Halving::Death).or_default() += kill;
                }
                let mut seen: HashMap<Halving, usize> = HashMap::new();
                let mut hold = 0.0;
                for _ in 0..per_word {
                    let t = halving_chain(&word, f64::INFINITY, &mut rng);
                    let (time, target) = if t.states.len() > 1 {
                        (t.times[1], Halving::Word(t.states[1].clone()))
                    } else {
                        (t.death.unwrap(), Halving::Death)
                    };
                    hold += time;
                    *seen.entry(target).or_default() += 1;
                }
                let total: f64 = rates.values().sum();
                assert_eq!(total, k as f64);
                let mean_hold = hold / per_word as f64;
                tests += 1;
                if (mean_hold * k as f64 - 1.0).abs() > 3.0 / (per_word as f64).sqrt() {
                    failures += 1;
                }
                assert!(seen.keys().all(|h| rates.contains_key(h)), "{word}: unexpected target");
                for (h, r) in &rates {
                    let p = r / total;
                    let got = *seen.get(h).unwrap_or(&0) as f64 / per_word as f64;
                    let se = (p * (1.0 - p) / per_word as f64).sqrt();
                    tests += 1;
                    if (got - p).abs() > 3.0 * se {
                        failures += 1;
                    }
                }
            }
        }
        assert!(failures <= tests.div_ceil(100).max(1) + 1, "{failures} of {tests}");
    }

    #[test]
    fn doubling_is_yule_and_b_grows_by_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let theta: f64 = 0.7;
        let n = 20_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let t = doubling_chain(&w("p1p1P2"), theta, &mut rng);
            for pair in t.states.windows(2) {
                assert_eq!(pair[1].len(), pair[0].len() + 1);
                assert_eq!(pair[1].b(), pair[0].b() + 1);
            }
            sum += t.states.last().unwrap().len() as f64;
        }
        let mean = sum / n as f64;
        let expect = 3.0 * theta.exp();
        // Var of Yule from 3: 3 e^θ (e^θ − 1)
        let se = (3.0 * theta.exp() * (theta.exp() - 1.0) / n as f64).sqrt();
        assert!((mean - expect).abs() < 4.0 * se, "{mean} vs {expect}");
    }

    #[test]
    fn duality_with_indicators() {
        // μ_h(w) P_w(X_u = w̄) = μ_h(w̄) P_w̄(Y_u = w)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = 0.5;
        let n = 40_000;
        let pairs = [("p1p1", "p1"), ("p1p1p1", "p1p1"), ("p1p1p2", "p1p2"), ("p1p1P2P2", "p1p1P2"), ("p1p1", "p1p1")];
        for (long, short) in pairs {
            let (lw, sw) = (w(long), w(short));
            let lhs = (0..n)
                .filter(|_| halving_chain(&lw, u, &mut rng).state_at(u) == Some(&sw))
                .count() as f64
                / n as f64
                / lw.h() as f64;
            let rhs = (0..n)
                .filter(|_| doubling_chain(&sw, u, &mut rng).state_at(u) == Some(&lw))
                .count() as f64
                / n as f64
                / sw.h() as f64;
            let se = ((lhs / lw.h() as f64 + rhs / sw.h() as f64) / n as f64).sqrt();
            assert!((lhs - rhs).abs() < 3.5 * se, "{long}->{short}: {lhs} vs {rhs}");
        }
        let exact = (-u as f64).exp() * (1.0 - (-u as f64).exp());
        let lhs = (0..n)
            .filter(|_| halving_chain(&w("p1p1"), u, &mut rng).state_at(u) == Some(&w("p1")))
            .count() as f64
            / n as f64
            / 2.0;
        assert!((lhs - exact).abs() < 4.0 * (exact / 2.0 / n as f64).sqrt());
    }
}
