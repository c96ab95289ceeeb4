//! Following individual short cycles of a finite graph through time (random
//! transpositions) and through dimension (deleting top labels).

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::cycles::{build_graph, enumerate_cycles, for_each_cycle_through, word_of, MultiGraph};
use crate::tower::{sample_dimension, uniform_permutation, Permutation};
use crate::words::{canonical_unchecked, Halving, Letter, Word};

/// Per-word exposure, deaths and births.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WordTally {
    pub exposure: f64,
    pub deaths: u64,
    pub births: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TranspositionTally {
    pub duration: f64,
    pub events: u64,
    pub words: BTreeMap<Word, WordTally>,
}

impl TranspositionTally {
    pub fn merge(&mut self, other: &TranspositionTally) {
        self.duration += other.duration;
        self.events += other.events;
        for (w, t) in &other.words {
            let e = self.words.entry(w.clone()).or_default();
            e.exposure += t.exposure;
            e.deaths += t.deaths;
            e.births += t.births;
        }
    }
}

struct TrackedCycle {
    darts: Vec<u32>,
    word: Word,
}

fn edge_key(darts: &[u32]) -> Vec<u32> {
    let mut k: Vec<u32> = darts.iter().map(|&e| e >> 1).collect();
    k.sort_unstable();
    k
}

/// The darts still close up into a cycle with distinct vertices.
fn still_a_cycle(g: &MultiGraph, darts: &[u32]) -> bool {
    let k = darts.len();
    let mut verts: Vec<usize> = Vec::with_capacity(k);
    for i in 0..k {
        let e = darts[i] as usize;
        if g.head(e) != g.tail(darts[(i + 1) % k] as usize) {
            return false;
        }
        verts.push(g.tail(e));
    }
    verts.sort_unstable();
    verts.windows(2).all(|w| w[0] != w[1])
}

/// Run the transposition dynamics on a fresh `G(n, 2d)` for `duration` and count, for
/// every word of length `≤ k_max`, deaths per unit exposure and births per unit time.
pub fn transposition_rates<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    k_max: usize,
    duration: f64,
    rng: &mut R,
) -> TranspositionTally {
    assert!(n >= 2 && d >= 1);
    let perms: Vec<Permutation> = (0..d).map(|_| uniform_permutation(n, rng)).collect();
    let mut g = build_graph(&perms).expect("equal sizes");
    let mut tracked: HashMap<Vec<u32>, TrackedCycle> = HashMap::new();
    let mut tally = TranspositionTally { duration, ..Default::default() };
    for c in enumerate_cycles(&g, k_max) {
        let darts = c.darts;
        tracked.insert(edge_key(&darts), TrackedCycle { darts, word: c.word });
    }
    let mut alive: BTreeMap<Word, u64> = BTreeMap::new();
    for c in tracked.values() {
        *alive.entry(c.word.clone()).or_default() += 1;
        tally.words.entry(c.word.clone()).or_default();
    }
    let gap = Exp::new(n as f64).expect("positive rate");
    let mut now = 0.0;
    loop {
        let dt: f64 = gap.sample(rng);
        let step = dt.min(duration - now);
        for (w, &c) in &alive {
            tally.words.get_mut(w).expect("tracked word").exposure += c as f64 * step;
        }
        now += dt;
        if now > duration {
            break;
        }
        tally.events += 1;
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        g.left_transpose(i, j);

        let touched: Vec<Vec<u32>> = tracked
            .iter()
            .filter(|(_, c)| c.darts.iter().any(|&e| {
                let (t, h) = (g.tail(e as usize), g.head(e as usize));
                t == i || t == j || h == i || h == j
            }))
            .map(|(k, _)| k.clone())
            .collect();
        for key in touched {
            let ok = still_a_cycle(&g, &tracked[&key].darts);
            if !ok {
                let c = tracked.remove(&key).expect("present");
                tally.words.get_mut(&c.word).expect("tracked word").deaths += 1;
                *alive.get_mut(&c.word).expect("alive") -= 1;
            }
        }
        for v in [i, j] {
            let mut found: Vec<Vec<u32>> = Vec::new();
            for_each_cycle_through(&g, v, k_max, |darts, _| found.push(darts.to_vec()));
            for darts in found {
                let key = edge_key(&darts);
                if tracked.contains_key(&key) {
                    continue;
                }
                let word = word_of(&g, &darts);
                let e = tally.words.entry(word.clone()).or_default();
                e.births += 1;
                *alive.entry(word.clone()).or_default() += 1;
                tracked.insert(key, TrackedCycle { darts, word });
            }
        }
    }
    tally
}

/// Exposure and transition counts of tracked cycles as dimension runs backwards.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HalvingTally {
    pub exposure: BTreeMap<Word, f64>,
    pub transitions: BTreeMap<(Word, Halving), u64>,
    pub replicas: u64,
}

impl HalvingTally {
    pub fn merge(&mut self, other: &HalvingTally) {
        self.replicas += other.replicas;
        for (w, x) in &other.exposure {
            *self.exposure.entry(w.clone()).or_default() += x;
        }
        for (k, c) in &other.transitions {
            *self.transitions.entry(k.clone()).or_default() += c;
        }
    }
}

struct SymbolicCycle {
    vertices: Vec<u32>,
    /// `letters[i]` leads from `vertices[i]` to `vertices[i + 1]`.
    letters: Vec<Letter>,
    word: Word,
}

/// Sample `M` on `[0, T]`, a `G(M_T, 2d)`, and delete top labels back to dimension
/// `T − depth`, following every cycle of length `≤ k_max` present at `T`.
pub fn halving_rates<R: Rng + ?Sized>(d: usize, horizon: f64, depth: f64, k_max: usize, rng: &mut R) -> HalvingTally {
    assert!(depth >= 0.0 && depth <= horizon);
    let clock = sample_dimension(horizon, rng);
    let n = clock.current();
    let mut tally = HalvingTally { replicas: 1, ..Default::default() };
    if n == 0 {
        return tally;
    }
    let perms: Vec<Permutation> = (0..d).map(|_| uniform_permutation(n, rng)).collect();
    let g = build_graph(&perms).expect("equal sizes");
    let mut cycles: Vec<SymbolicCycle> = enumerate_cycles(&g, k_max)
        .into_iter()
        .map(|c| SymbolicCycle {
            vertices: c.vertices,
            letters: c.darts.iter().map(|&e| g.letter(e as usize)).collect(),
            word: c.word,
        })
        .collect();
    let floor = horizon - depth;
    let mut t = horizon;
    // jump into dimension m happened at jumps[m − 1]
    let jumps = clock.jump_times();
    let mut m = n;
    loop {
        let next = if m > 0 { jumps[m - 1] } else { f64::NEG_INFINITY };
        let stop = next.max(floor);
        for c in &cycles {
            *tally.exposure.entry(c.word.clone()).or_default() += t - stop;
        }
        if next <= floor {
            break;
        }
        t = next;
        let top = (m - 1) as u32;
        m -= 1;
        let mut kept = Vec::with_capacity(cycles.len());
        for mut c in cycles.drain(..) {
            let Some(p) = c.vertices.iter().position(|&v| v == top) else {
                kept.push(c);
                continue;
            };
            let k = c.letters.len();
            let incoming = c.letters[(p + k - 1) % k];
            let from = c.word.clone();
            if k > 1 && incoming == c.letters[p] {
                c.vertices.remove(p);
                c.letters.remove(p);
                c.word = canonical_unchecked(&c.letters);
                *tally.transitions.entry((from, Halving::Word(c.word.clone()))).or_default() += 1;
                kept.push(c);
            } else {
                *tally.transitions.entry((from, Halving::Death)).or_default() += 1;
            }
        }
        cycles = kept;
    }
    tally
}
