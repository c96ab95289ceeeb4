//! The 2d-regular multigraph of `d` permutations, its short cycles, non-backtracking
//! walk counts, tangle-freeness and pre-cycles.
//!
//! Every edge `x → π_a(x)` carries two darts: the forward dart reads `π_a`, the
//! backward dart (from `π_a(x)` to `x`) reads `π_a⁻¹`. Darts are numbered
//! `2·(a·n + x) + backward`, so the reversal of dart `e` is `e ^ 1`.

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::tower::Permutation;
use crate::words::{canonical_unchecked, orbit, Letter, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("permutations have different sizes")]
    SizeMismatch,
    #[error("at least one permutation is required")]
    NoPermutations,
    #[error("pre-cycle words need equal signs at both ends")]
    SignMismatch,
    #[error("word uses generator {0} but the graph has {1}")]
    GeneratorOutOfRange(usize, usize),
}

pub type Dart = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    d: usize,
    succ: Vec<u32>,
    pred: Vec<u32>,
}

pub fn build_graph(perms: &[Permutation]) -> Result<MultiGraph, GraphError> {
    let first = perms.first().ok_or(GraphError::NoPermutations)?;
    let n = first.len();
    if perms.iter().any(|p| p.len() != n) {
        return Err(GraphError::SizeMismatch);
    }
    let mut succ = Vec::with_capacity(n * perms.len());
    let mut pred = Vec::with_capacity(n * perms.len());
    for p in perms {
        succ.extend_from_slice(p.images());
        pred.extend_from_slice(p.preimages());
    }
    Ok(MultiGraph {
        n,
        d: perms.len(),
        succ,
        pred,
    })
}

impl MultiGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dart_count(&self) -> usize {
        2 * self.d * self.n
    }

    pub fn permutation(&self, a: usize) -> Permutation {
        Permutation::from_images(self.succ[a * self.n..(a + 1) * self.n].to_vec())
            .expect("stored permutation")
    }

    #[inline]
    pub fn forward_dart(&self, a: usize, x: usize) -> Dart {
        2 * (a * self.n + x)
    }

    #[inline]
    pub fn reversal(&self, e: Dart) -> Dart {
        e ^ 1
    }

    /// Undirected edge id `a·n + x` of the edge `x → π_a(x)`.
    #[inline]
    pub fn edge(&self, e: Dart) -> usize {
        e >> 1
    }

    #[inline]
    pub fn is_forward(&self, e: Dart) -> bool {
        e & 1 == 0
    }

    #[inline]
    pub fn generator(&self, e: Dart) -> usize {
        (e >> 1) / self.n
    }

    #[inline]
    pub fn tail(&self, e: Dart) -> usize {
        let ax = e >> 1;
        if e & 1 == 0 {
            ax % self.n
        } else {
            self.succ[ax] as usize
        }
    }

    #[inline]
    pub fn head(&self, e: Dart) -> usize {
        let ax = e >> 1;
        if e & 1 == 0 {
            self.succ[ax] as usize
        } else {
            ax % self.n
        }
    }

    pub fn letter(&self, e: Dart) -> Letter {
        let g = self.generator(e) + 1;
        if self.is_forward(e) {
            Letter::pos(g)
        } else {
            Letter::neg(g)
        }
    }

    /// The `2d` darts leaving `v`, in generator order (forward, backward).
    #[inline]
    pub fn out_darts(&self, v: usize) -> impl Iterator<Item = Dart> + '_ {
        (0..self.d).flat_map(move |a| {
            let p = self.pred[a * self.n + v] as usize;
            [2 * (a * self.n + v), 2 * (a * self.n + p) + 1]
        })
    }

    /// Follow one letter from `v`.
    #[inline]
    pub fn step(&self, v: usize, l: Letter) -> usize {
        let a = l.generator() - 1;
        if l.is_inverse() {
            self.pred[a * self.n + v] as usize
        } else {
            self.succ[a * self.n + v] as usize
        }
    }

    /// Left-multiply every permutation by `(i j)`.
    pub fn left_transpose(&mut self, i: usize, j: usize) {
        let n = self.n;
        for a in 0..self.d {
            let (pi, pj) = (self.pred[a * n + i], self.pred[a * n + j]);
            self.succ[a * n + pi as usize] = j as u32;
            self.succ[a * n + pj as usize] = i as u32;
            self.pred[a * n + i] = pj;
            self.pred[a * n + j] = pi;
        }
    }

    /// Adjacency matrix; a loop adds 2 on the diagonal.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for e in 0..self.dart_count() {
            m[(self.tail(e), self.head(e))] += 1.0;
        }
        m
    }

    /// Undirected neighbours with multiplicity.
    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_darts(v).map(move |e| self.head(e))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRecord {
    pub vertices: Vec<u32>,
    pub darts: Vec<u32>,
    pub word: Word,
}

impl CycleRecord {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Word class read along `darts`.
pub fn word_of(g: &MultiGraph, darts: &[u32]) -> Word {
    let letters: Vec<Letter> = darts.iter().map(|&e| g.letter(e as usize)).collect();
    canonical_unchecked(&letters)
}

struct Search<'a, F> {
    g: &'a MultiGraph,
    k_max: usize,
    root: usize,
    // when set, only vertices above the root may be visited
    above_root: bool,
    path: Vec<u32>,
    verts: Vec<u32>,
    visit: F,
}

impl<F: FnMut(&[u32], &[u32])> Search<'_, F> {
    fn run(&mut self) {
        let g = self.g;
        let root = self.root;
        self.verts.push(root as u32);
        for e in g.out_darts(root) {
            let h = g.head(e);
            if h == root {
                // a loop is found once, through its forward dart
                if g.is_forward(e) {
                    self.path.push(e as u32);
                    (self.visit)(&self.path, &self.verts);
                    self.path.pop();
                }
                continue;
            }
            if self.above_root && h < root {
                continue;
            }
            if self.k_max >= 2 {
                self.path.push(e as u32);
                self.verts.push(h as u32);
                self.extend(e, h);
                self.verts.pop();
                self.path.pop();
            }
        }
        self.verts.pop();
    }

    fn extend(&mut self, last: Dart, at: usize) {
        let g = self.g;
        let len = self.path.len();
        let first_edge = g.edge(self.path[0] as usize);
        for f in g.out_darts(at) {
            if f == g.reversal(last) {
                continue;
            }
            let h = g.head(f);
            if h == self.root {
                // each cycle is met in two directions; keep the one whose first edge is smaller
                if first_edge < g.edge(f) {
                    self.path.push(f as u32);
                    (self.visit)(&self.path, &self.verts);
                    self.path.pop();
                }
                continue;
            }
            if len + 1 >= self.k_max
                || (self.above_root && h < self.root)
                || self.verts.contains(&(h as u32))
            {
                continue;
            }
            self.path.push(f as u32);
            self.verts.push(h as u32);
            self.extend(f, h);
            self.verts.pop();
            self.path.pop();
        }
    }
}

/// Call `visit(darts, vertices)` once for every cycle of length `≤ k_max`.
pub fn for_each_cycle<F: FnMut(&[u32], &[u32])>(g: &MultiGraph, k_max: usize, visit: F) {
    if k_max == 0 {
        return;
    }
    let mut s = Search {
        g,
        k_max,
        root: 0,
        above_root: true,
        path: Vec::with_capacity(k_max),
        verts: Vec::with_capacity(k_max),
        visit,
    };
    for v in 0..g.n {
        s.root = v;
        s.run();
    }
}

/// Call `visit(darts, vertices)` once for every cycle of length `≤ k_max` through `v`.
/// The walk starts at `v`.
pub fn for_each_cycle_through<F: FnMut(&[u32], &[u32])>(
    g: &MultiGraph,
    v: usize,
    k_max: usize,
    visit: F,
) {
    if k_max == 0 {
        return;
    }
    let mut s = Search {
        g,
        k_max,
        root: v,
        above_root: false,
        path: Vec::with_capacity(k_max),
        verts: Vec::with_capacity(k_max),
        visit,
    };
    s.run();
}

pub fn enumerate_cycles(g: &MultiGraph, k_max: usize) -> Vec<CycleRecord> {
    let mut out = Vec::new();
    for_each_cycle(g, k_max, |darts, verts| {
        out.push(CycleRecord {
            vertices: verts.to_vec(),
            darts: darts.to_vec(),
            word: word_of(g, darts),
        })
    });
    out
}

/// `counts[k]` = number of `k`-cycles, `k ≤ k_max` (index 0 unused).
pub fn cycle_counts(g: &MultiGraph, k_max: usize) -> Vec<u64> {
    let mut counts = vec![0u64; k_max + 1];
    for_each_cycle(g, k_max, |darts, _| counts[darts.len()] += 1);
    counts
}

/// Cycle counts per word class.
pub fn word_counts(g: &MultiGraph, k_max: usize) -> HashMap<Word, u64> {
    let mut counts = HashMap::new();
    for_each_cycle(g, k_max, |darts, _| {
        *counts.entry(word_of(g, darts)).or_insert(0) += 1;
    });
    counts
}

/// `trace(B^k)` for `k = 0..=k_max` (entry 0 is the dart count).
pub fn cnbw_counts(g: &MultiGraph, k_max: usize) -> Vec<u128> {
    let m = g.dart_count();
    let growth = (2 * g.d).saturating_sub(1).max(1) as f64;
    assert!(
        (k_max as f64) * growth.log2() < 62.0,
        "walk counts would overflow"
    );
    let succ: Vec<Vec<u32>> = (0..m)
        .map(|e| {
            g.out_darts(g.head(e))
                .filter(|&f| f != g.reversal(e))
                .map(|f| f as u32)
                .collect()
        })
        .collect();
    let mut out = vec![0u128; k_max + 1];
    out[0] = m as u128;
    let mut cur = vec![0u64; m];
    let mut next = vec![0u64; m];
    let mut active: Vec<u32> = Vec::new();
    let mut next_active: Vec<u32> = Vec::new();
    for start in 0..m {
        cur[start] = 1;
        active.clear();
        active.push(start as u32);
        for k in 1..=k_max {
            for &e in &active {
                let c = cur[e as usize];
                for &f in &succ[e as usize] {
                    if next[f as usize] == 0 {
                        next_active.push(f);
                    }
                    next[f as usize] += c;
                }
            }
            for &e in &active {
                cur[e as usize] = 0;
            }
            std::mem::swap(&mut cur, &mut next);
            std::mem::swap(&mut active, &mut next_active);
            next_active.clear();
            out[k] += cur[start] as u128;
        }
        for &e in &active {
            cur[e as usize] = 0;
        }
    }
    out
}

pub fn cnbw_count(g: &MultiGraph, k: usize) -> u128 {
    cnbw_counts(g, k)[k]
}

fn bfs_hits(
    g: &MultiGraph,
    sources: &[u32],
    max_dist: usize,
    dist: &mut [u32],
    hit: impl Fn(usize) -> bool,
) -> bool {
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s as usize] == u32::MAX {
            dist[s as usize] = 0;
            touched.push(s as usize);
            queue.push_back(s as usize);
        }
    }
    let mut found = false;
    'bfs: while let Some(v) = queue.pop_front() {
        if hit(v) {
            found = true;
            break;
        }
        if dist[v] as usize >= max_dist {
            continue;
        }
        for u in g.neighbours(v) {
            if dist[u] == u32::MAX {
                dist[u] = dist[v] + 1;
                touched.push(u);
                if hit(u) {
                    found = true;
                    break 'bfs;
                }
                queue.push_back(u);
            }
        }
    }
    for v in touched {
        dist[v] = u32::MAX;
    }
    found
}

/// True iff any two distinct cycles of length `≤ l` lie at distance `≥ j`.
pub fn is_tangle_free(g: &MultiGraph, l: usize, j: usize) -> bool {
    let cycles = enumerate_cycles(g, l);
    if cycles.len() < 2 {
        return true;
    }
    let mut owners: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, c) in cycles.iter().enumerate() {
        for &v in &c.vertices {
            owners.entry(v as usize).or_default().push(i);
        }
    }
    let mut dist = vec![u32::MAX; g.n];
    for (i, c) in cycles.iter().enumerate() {
        let other = |v: usize| owners.get(&v).is_some_and(|o| o.iter().any(|&x| x != i));
        if bfs_hits(g, &c.vertices, j.saturating_sub(1), &mut dist, other) {
            return false;
        }
    }
    true
}

/// Number of start vertices whose walk along `u` visits `|u| + 1` distinct vertices.
pub fn precycle_count(g: &MultiGraph, u: &[Letter]) -> Result<usize, GraphError> {
    let (first, last) = match (u.first(), u.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Ok(0),
    };
    if first.sign() != last.sign() {
        return Err(GraphError::SignMismatch);
    }
    if let Some(l) = u.iter().find(|l| l.generator() > g.d) {
        return Err(GraphError::GeneratorOutOfRange(l.generator(), g.d));
    }
    let mut path = Vec::with_capacity(u.len() + 1);
    let mut count = 0;
    'start: for x in 0..g.n {
        path.clear();
        path.push(x);
        let mut v = x;
        for &l in u {
            v = g.step(v, l);
            if path.contains(&v) {
                continue 'start;
            }
            path.push(v);
        }
        count += 1;
    }
    Ok(count)
}

/// `(1/n) Σ |S_u|` over orbit sequences of `w` with equal signs at both ends.
pub fn birth_rate_from_precycles(g: &MultiGraph, w: &Word) -> Result<f64, GraphError> {
    let mut total = 0usize;
    for u in orbit(w.letters()) {
        if u[0].sign() == u[u.len() - 1].sign() {
            total += precycle_count(g, &u)?;
        }
    }
    Ok(total as f64 / g.n as f64)
}
