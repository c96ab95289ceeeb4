//! The coupled field `G(t,s)`: random transpositions in `s`, backward projection in `t`.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

use crate::cycles::{build_graph, word_counts, MultiGraph};
use crate::tower::{sample_dimension, DimensionClock, Permutation, PermutationTower};
use crate::words::Word;
use std::collections::HashMap;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("dimension {0} is too small to evolve (need at least 2 labels)")]
    TooFewLabels(usize),
    #[error("grid is empty")]
    EmptyGrid,
    #[error("grid point (t={t}, s={s}) lies outside [-{t0}, 0] x [0, {s0}]")]
    OutOfRange { t: f64, s: f64, t0: f64, s0: f64 },
    #[error("bad parameter: {0}")]
    BadParameter(&'static str),
    #[error("log event {0} is invalid")]
    BadEvent(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transposition {
    pub time: f64,
    pub i: u32,
    pub j: u32,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TranspositionLog {
    n: usize,
    events: Vec<Transposition>,
}

impl TranspositionLog {
    pub fn new(n: usize) -> TranspositionLog {
        TranspositionLog { n, events: Vec::new() }
    }

    pub fn from_events(n: usize, events: Vec<Transposition>) -> Result<TranspositionLog, DynamicsError> {
        let mut log = TranspositionLog::new(n);
        for (k, e) in events.into_iter().enumerate() {
            log.push(e).map_err(|_| DynamicsError::BadEvent(k))?;
        }
        Ok(log)
    }

    pub fn push(&mut self, e: Transposition) -> Result<(), DynamicsError> {
        let k = self.events.len();
        let increasing = self.events.last().is_none_or(|p| p.time < e.time);
        if !increasing || e.i == e.j || e.i as usize >= self.n || e.j as usize >= self.n {
            return Err(DynamicsError::BadEvent(k));
        }
        self.events.push(e);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn events(&self) -> &[Transposition] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Number of events with time `≤ s`.
    pub fn count_until(&self, s: f64) -> usize {
        self.events.partition_point(|e| e.time <= s)
    }
}

/// Superposed label clocks on `(0, s0]`: total rate `n`, ringing label uniform, partner
/// uniform among the others.
pub fn sample_log<R: Rng + ?Sized>(n: usize, s0: f64, rng: &mut R) -> Result<TranspositionLog, DynamicsError> {
    if !(s0 >= 0.0) {
        return Err(DynamicsError::BadParameter("S0 must be non-negative"));
    }
    let mut log = TranspositionLog::new(n);
    if s0 == 0.0 {
        return Ok(log);
    }
    if n < 2 {
        return Err(DynamicsError::TooFewLabels(n));
    }
    let gap = Exp::new(n as f64).expect("positive rate");
    let mut now = 0.0;
    loop {
        now += gap.sample(rng);
        if now > s0 {
            break;
        }
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        log.events.push(Transposition { time: now, i: i as u32, j: j as u32 });
    }
    Ok(log)
}

/// `σ_s`: the left product of every transposition up to time `s`, earliest innermost.
pub fn sigma_at(log: &TranspositionLog, s: f64) -> Permutation {
    let mut sigma = Permutation::identity(log.n);
    for e in &log.events[..log.count_until(s)] {
        sigma.left_transpose(e.i as usize, e.j as usize);
    }
    sigma
}

/// Keep labels whose `σ`-preimage is below `m`; the rest are `σ(n−1), …, σ(m)`.
fn projection_mask(sigma: &Permutation, m: usize) -> Vec<bool> {
    (0..sigma.len()).map(|x| sigma.preimage(x) < m).collect()
}

/// One replica's worth of randomness: dimension clock, `d` towers, one transposition log.
#[derive(Clone, Debug)]
pub struct FieldState {
    d: usize,
    horizon: f64,
    clock: DimensionClock,
    towers: Vec<PermutationTower>,
    log: TranspositionLog,
}

impl FieldState {
    /// Sample `M` on `[0, T]` and grow `d` independent towers to `M_T`.
    pub fn sample<R: Rng + ?Sized>(d: usize, horizon: f64, rng: &mut R) -> Result<FieldState, DynamicsError> {
        if d == 0 {
            return Err(DynamicsError::BadParameter("d must be at least 1"));
        }
        if !(horizon >= 0.0) {
            return Err(DynamicsError::BadParameter("T must be non-negative"));
        }
        let clock = sample_dimension(horizon, rng);
        let n = clock.current();
        let towers = (0..d)
            .map(|_| {
                let mut tw = PermutationTower::new();
                tw.grow(n, rng);
                tw
            })
            .collect();
        Ok(FieldState { d, horizon, clock, towers, log: TranspositionLog::new(n) })
    }

    pub fn from_parts(
        clock: DimensionClock,
        towers: Vec<PermutationTower>,
        log: TranspositionLog,
    ) -> Result<FieldState, DynamicsError> {
        let n = clock.current();
        if towers.is_empty() {
            return Err(DynamicsError::BadParameter("need at least one tower"));
        }
        if towers.iter().any(|t| t.height() != n) || log.n() != n {
            return Err(DynamicsError::BadParameter("towers, clock and log disagree on n"));
        }
        Ok(FieldState { d: towers.len(), horizon: clock.horizon(), clock, towers, log })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.clock.current()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn clock(&self) -> &DimensionClock {
        &self.clock
    }

    pub fn towers(&self) -> &[PermutationTower] {
        &self.towers
    }

    pub fn log(&self) -> &TranspositionLog {
        &self.log
    }

    /// Dimension of the cell at offset `t ≤ 0` from the horizon.
    pub fn dimension(&self, t: f64) -> usize {
        self.clock.m_at((self.horizon + t).max(0.0))
    }

    /// Replace the log with fresh transpositions on `(0, s0]`.
    pub fn evolve<R: Rng + ?Sized>(&mut self, s0: f64, rng: &mut R) -> Result<&TranspositionLog, DynamicsError> {
        self.log = sample_log(self.n(), s0, rng)?;
        Ok(&self.log)
    }

    /// The `d` top permutations at time `s`, i.e. `σ_s · π_a`.
    pub fn permutations_at(&self, s: f64) -> Vec<Permutation> {
        let sigma = sigma_at(&self.log, s);
        self.towers.iter().map(|t| t.top().left_compose(&sigma)).collect()
    }

    /// Time-`s` permutations with labels `σ_s(n−1), …, σ_s(m)` removed.
    pub fn project(&self, s: f64, m: usize) -> Vec<Permutation> {
        assert!(m <= self.n(), "projection above the top level");
        let sigma = sigma_at(&self.log, s);
        let keep = projection_mask(&sigma, m);
        self.towers
            .iter()
            .map(|t| t.top().left_compose(&sigma).induced(&keep))
            .collect()
    }
}

/// Grid of cells: `ts` are offsets in `[−T0, 0]`, `ss` times in `[0, S0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub ts: Vec<f64>,
    pub ss: Vec<f64>,
}

impl GridSpec {
    /// `nt` points evenly spaced from `−T0` to `0` and `ns` from `0` to `S0`.
    pub fn uniform(t0: f64, s0: f64, nt: usize, ns: usize) -> GridSpec {
        let spaced = |a: f64, b: f64, k: usize| -> Vec<f64> {
            if k == 1 {
                vec![b]
            } else {
                (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
            }
        };
        let ts = spaced(-t0, 0.0, nt);
        let mut ss = spaced(s0, 0.0, ns);
        ss.reverse();
        GridSpec { ts, ss }
    }
}

#[derive(Clone, Debug)]
pub struct FieldGrid {
    pub ts: Vec<f64>,
    pub ss: Vec<f64>,
    pub dims: Vec<usize>,
    /// `cells[i][j]` is `G(ts[i], ss[j])`.
    pub cells: Vec<Vec<MultiGraph>>,
}

impl FieldGrid {
    pub fn cell(&self, i: usize, j: usize) -> &MultiGraph {
        &self.cells[i][j]
    }

    pub fn word_counts(&self, k_max: usize) -> Vec<Vec<HashMap<Word, u64>>> {
        self.cells
            .iter()
            .map(|row| row.iter().map(|g| word_counts(g, k_max)).collect())
            .collect()
    }
}

/// Every cell of the grid read off one realization.
pub fn grid_from_state(state: &FieldState, grid: &GridSpec) -> Result<FieldGrid, DynamicsError> {
    if grid.ts.is_empty() || grid.ss.is_empty() {
        return Err(DynamicsError::EmptyGrid);
    }
    let dims: Vec<usize> = grid.ts.iter().map(|&t| state.dimension(t)).collect();
    let mut order: Vec<usize> = (0..grid.ss.len()).collect();
    order.sort_by(|&a, &b| grid.ss[a].total_cmp(&grid.ss[b]));
    let mut slots: Vec<Vec<Option<MultiGraph>>> = vec![vec![None; grid.ss.len()]; grid.ts.len()];

    let n = state.n();
    let mut sigma = Permutation::identity(n);
    let mut perms: Vec<Permutation> = state.towers.iter().map(|t| t.top().clone()).collect();
    let mut next_event = 0;
    for &j in &order {
        let s = grid.ss[j];
        let upto = state.log.count_until(s);
        for e in &state.log.events[next_event.min(upto)..upto] {
            sigma.left_transpose(e.i as usize, e.j as usize);
            for p in perms.iter_mut() {
                p.left_transpose(e.i as usize, e.j as usize);
            }
        }
        next_event = next_event.max(upto);
        for (i, &m) in dims.iter().enumerate() {
            let keep = projection_mask(&sigma, m);
            let projected: Vec<Permutation> = perms.iter().map(|p| p.induced(&keep)).collect();
            slots[i][j] = Some(build_graph(&projected).expect("projected permutations share a size"));
        }
    }
    let cells = slots
        .into_iter()
        .map(|row| row.into_iter().map(|g| g.expect("every cell filled")).collect())
        .collect();
    Ok(FieldGrid { ts: grid.ts.clone(), ss: grid.ss.clone(), dims, cells })
}

/// Sample the dimension clock, towers and log once, then read every grid cell.
pub fn field_grid<R: Rng + ?Sized>(
    d: usize,
    horizon: f64,
    t0: f64,
    s0: f64,
    grid: &GridSpec,
    rng: &mut R,
) -> Result<FieldGrid, DynamicsError> {
    if !(t0 >= 0.0 && t0 <= horizon) {
        return Err(DynamicsError::BadParameter("need 0 <= T0 <= T"));
    }
    for &t in &grid.ts {
        for &s in &grid.ss {
            if !(t >= -t0 && t <= 0.0 && s >= 0.0 && s <= s0) {
                return Err(DynamicsError::OutOfRange { t, s, t0, s0 });
            }
        }
    }
    let mut state = FieldState::sample(d, horizon, rng)?;
    if state.n() < 2 {
        return Err(DynamicsError::TooFewLabels(state.n()));
    }
    state.evolve(s0, rng)?;
    grid_from_state(&state, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::cycle_counts;
    use crate::tower::uniform_permutation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ev(time: f64, i: u32, j: u32) -> Transposition {
        Transposition { time, i, j }
    }

    #[test]
    fn sigma_examples() {
        let log = TranspositionLog::from_events(3, vec![ev(0.1, 0, 1), ev(0.2, 1, 2)]).unwrap();
        assert_eq!(sigma_at(&log, 0.05), Permutation::identity(3));
        let s = sigma_at(&log, 0.25);
        assert_eq!(s.images(), &[2, 0, 1]);
        let twice = TranspositionLog::from_events(4, vec![ev(0.1, 0, 3), ev(0.2, 3, 0)]).unwrap();
        assert_eq!(sigma_at(&twice, 1.0), Permutation::identity(4));
        assert!(TranspositionLog::from_events(3, vec![ev(0.2, 0, 1), ev(0.1, 1, 2)]).is_err());
        assert!(TranspositionLog::from_events(3, vec![ev(0.2, 1, 1)]).is_err());
        assert!(TranspositionLog::from_events(3, vec![ev(0.2, 1, 3)]).is_err());
    }

    #[test]
    fn empty_and_poisson_event_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_log(100, 0.0, &mut rng).unwrap().is_empty());
        let runs = 10_000;
        let mut sum = 0.0;
        let mut pair_hits = 0usize;
        for _ in 0..runs {
            let log = sample_log(100, 1.0, &mut rng).unwrap();
            sum += log.len() as f64;
            pair_hits += log
                .events()
                .iter()
                .filter(|e| (e.i.min(e.j), e.i.max(e.j)) == (3, 7))
                .count();
        }
        let mean = sum / runs as f64;
        assert!((mean - 100.0).abs() < 3.0 * (100.0 / runs as f64).sqrt() * 1.2, "{mean}");
        // one unordered pair: rate 2/(n−1)
        let pair_rate = pair_hits as f64 / runs as f64;
        let expect = 2.0 / 99.0;
        assert!((pair_rate - expect).abs() < 4.0 * (expect / runs as f64).sqrt());
    }

    #[test]
    fn projection_at_zero_matches_tower_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut state = FieldState::sample(3, 4.0, &mut rng).unwrap();
        state.evolve(0.7, &mut rng).unwrap();
        let n = state.n();
        for m in [0, 1, 2, n / 2, n] {
            let proj = state.project(0.0, m);
            for (p, tw) in proj.iter().zip(state.towers()) {
                assert_eq!(*p, tw.level(m));
            }
            for s in [0.2, 0.7] {
                assert!(state.project(s, m).iter().all(|p| p.len() == m));
            }
        }
        assert_eq!(state.project(0.7, n), state.permutations_at(0.7));
    }

    #[test]
    fn sequential_removal_matches_mask() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut state = FieldState::sample(2, 3.5, &mut rng).unwrap();
        state.evolve(1.0, &mut rng).unwrap();
        let n = state.n();
        let m = n / 3;
        let sigma = sigma_at(state.log(), 0.6);
        let mut expect = state.permutations_at(0.6);
        // remove σ(n−1), …, σ(m) one at a time, relabelling each time
        let mut labels: Vec<usize> = (0..n).collect();
        for k in (m..n).rev() {
            let x = sigma.apply(k);
            let pos = labels.iter().position(|&l| l == x).unwrap();
            expect = expect
                .iter()
                .map(|p| crate::tower::crp_delete(p, pos).unwrap())
                .collect();
            labels.remove(pos);
        }
        assert_eq!(state.project(0.6, m), expect);
    }

    #[test]
    fn grid_matches_direct_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut state = FieldState::sample(2, 5.0, &mut rng).unwrap();
        state.evolve(0.5, &mut rng).unwrap();
        let grid = GridSpec { ts: vec![0.0, -0.5, -2.0], ss: vec![0.5, 0.0, 0.25] };
        let fg = grid_from_state(&state, &grid).unwrap();
        for (i, &t) in grid.ts.iter().enumerate() {
            for (j, &s) in grid.ss.iter().enumerate() {
                let g = build_graph(&state.project(s, state.dimension(t))).unwrap();
                assert_eq!(fg.cell(i, j).n(), g.n());
                for a in 0..2 {
                    assert_eq!(fg.cell(i, j).permutation(a), g.permutation(a));
                }
            }
        }
        assert!(fg.dims.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn grid_is_deterministic_and_validates() {
        let grid = GridSpec::uniform(1.0, 0.5, 3, 2);
        assert_eq!(grid.ts, vec![-1.0, -0.5, 0.0]);
        assert_eq!(grid.ss, vec![0.0, 0.5]);
        let a = field_grid(2, 5.0, 1.0, 0.5, &grid, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = field_grid(2, 5.0, 1.0, 0.5, &grid, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(a.cell(i, j).permutation(1), b.cell(i, j).permutation(1));
            }
        }
        let bad = GridSpec { ts: vec![0.1], ss: vec![0.0] };
        assert!(field_grid(2, 5.0, 1.0, 0.5, &bad, &mut ChaCha8Rng::seed_from_u64(9)).is_err());
        assert!(field_grid(2, 5.0, 6.0, 0.5, &grid, &mut ChaCha8Rng::seed_from_u64(9)).is_err());
        let empty = GridSpec { ts: vec![], ss: vec![0.0] };
        assert_eq!(
            field_grid(2, 5.0, 1.0, 0.5, &empty, &mut ChaCha8Rng::seed_from_u64(9)).unwrap_err(),
            DynamicsError::EmptyGrid
        );
    }

    #[test]
    fn evolved_permutations_stay_uniform() {
        // n = 4: each of the 24 permutations, and pairs via the product of first images
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let runs = 48_000;
        let mut hist = HashMap::new();
        let mut joint = [[0usize; 4]; 4];
        for _ in 0..runs {
            let towers: Vec<PermutationTower> = (0..2)
                .map(|_| {
                    let mut t = PermutationTower::new();
                    t.grow(4, &mut rng);
                    t
                })
                .collect();
            let clock = loop {
                let c = sample_dimension(2.0, &mut rng);
                if c.current() == 4 {
                    break c;
                }
            };
            let mut st = FieldState::from_parts(clock, towers, TranspositionLog::new(4)).unwrap();
            st.evolve(0.8, &mut rng).unwrap();
            let ps = st.permutations_at(0.8);
            *hist.entry(ps[0].images().to_vec()).or_insert(0usize) += 1;
            joint[ps[0].apply(0)][ps[1].apply(0)] += 1;
        }
        assert_eq!(hist.len(), 24);
        let e = runs as f64 / 24.0;
        let chi: f64 = hist.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 23 dof, p = 1e-3 quantile is 49.7
        assert!(chi < 49.7, "{chi}");
        let e2 = runs as f64 / 16.0;
        let chi2: f64 = joint.iter().flatten().map(|&c| (c as f64 - e2).powi(2) / e2).sum();
        // 15 dof, p = 1e-3 quantile is 37.7
        assert!(chi2 < 37.7, "{chi2}");
    }

    #[test]
    fn loop_counts_stationary_in_s() {
        // loops at the top level over s: Poisson(a(d,1)/2) = Poisson(d)
        let d = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let runs = 4000;
        let grid = GridSpec { ts: vec![0.0], ss: vec![0.0, 1.0] };
        let mut sums = [0.0; 2];
        let mut sq = [0.0; 2];
        let mut done = 0;
        while done < runs {
            let mut state = FieldState::sample(d, 5.0, &mut rng).unwrap();
            if state.n() < 2 {
                continue;
            }
            state.evolve(1.0, &mut rng).unwrap();
            let fg = grid_from_state(&state, &grid).unwrap();
            for j in 0..2 {
                let c = cycle_counts(fg.cell(0, j), 1)[1] as f64;
                sums[j] += c;
                sq[j] += c * c;
            }
            done += 1;
        }
        for j in 0..2 {
            let mean = sums[j] / runs as f64;
            let var = sq[j] / runs as f64 - mean * mean;
            assert!((mean - d as f64).abs() < 4.0 * (d as f64 / runs as f64).sqrt(), "{mean}");
            assert!((var - d as f64).abs() < 0.25, "{var}");
        }
    }

    #[test]
    fn uniform_permutation_is_a_valid_tower_top_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = uniform_permutation(10, &mut rng);
        let sigma = Permutation::from_images(vec![1, 0, 2, 3, 4, 5, 6, 7, 8, 9]).unwrap();
        let mut q = p.clone();
        q.left_transpose(0, 1);
        assert_eq!(q, p.left_compose(&sigma));
    }
}
