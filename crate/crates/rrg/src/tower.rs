//! Permutation towers grown by the Chinese restaurant process, and the Poissonized
//! dimension clock.
//!
//! Labels are 0-based: a permutation of size `n` acts on `0..n`.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TowerError {
    #[error("not a permutation")]
    NotAPermutation,
    #[error("label {0} out of range for size {1}")]
    LabelOutOfRange(usize, usize),
    #[error("unsupported log version {0}")]
    BadVersion(u8),
    #[error("truncated or malformed tower log")]
    Malformed,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Permutation {
    fwd: Vec<u32>,
    inv: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        let fwd: Vec<u32> = (0..n as u32).collect();
        Permutation {
            inv: fwd.clone(),
            fwd,
        }
    }

    pub fn from_images(fwd: Vec<u32>) -> Result<Permutation, TowerError> {
        let n = fwd.len();
        let mut inv = vec![u32::MAX; n];
        for (x, &y) in fwd.iter().enumerate() {
            let y = y as usize;
            if y >= n || inv[y] != u32::MAX {
                return Err(TowerError::NotAPermutation);
            }
            inv[y] = x as u32;
        }
        Ok(Permutation { fwd, inv })
    }

    /// Build from disjoint cycles on `0..n`; unlisted labels are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Permutation, TowerError> {
        let mut fwd: Vec<u32> = (0..n as u32).collect();
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x as usize >= n {
                    return Err(TowerError::LabelOutOfRange(x as usize, n));
                }
                fwd[x as usize] = c[(i + 1) % c.len()];
            }
        }
        Permutation::from_images(fwd)
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.fwd[x] as usize
    }

    #[inline]
    pub fn preimage(&self, y: usize) -> usize {
        self.inv[y] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.fwd
    }

    pub fn preimages(&self) -> &[u32] {
        &self.inv
    }

    pub fn is_consistent(&self) -> bool {
        self.fwd.len() == self.inv.len()
            && self
                .fwd
                .iter()
                .enumerate()
                .all(|(x, &y)| self.inv.get(y as usize) == Some(&(x as u32)))
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut c = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                c.push(x as u32);
                x = self.apply(x);
            }
            out.push(c);
        }
        out
    }

    /// Set `self(x) = y`, keeping the inverse in sync. Callers restore bijectivity.
    #[inline]
    fn set(&mut self, x: usize, y: usize) {
        self.fwd[x] = y as u32;
        self.inv[y] = x as u32;
    }

    /// Left-multiply by the transposition `(i j)`: images equal to `i` become `j` and
    /// vice versa.
    pub fn left_transpose(&mut self, i: usize, j: usize) {
        let (a, b) = (self.preimage(i), self.preimage(j));
        self.set(a, j);
        self.set(b, i);
    }

    /// `σ ∘ self`.
    pub fn left_compose(&self, sigma: &Permutation) -> Permutation {
        let fwd = self.fwd.iter().map(|&y| sigma.fwd[y as usize]).collect();
        Permutation::from_images(fwd).expect("composition of permutations")
    }

    /// Insert label `n` (the new top): `choice = 0` makes it a fixed point, otherwise it
    /// follows label `choice - 1` in that label's cycle.
    pub fn insert_top(&mut self, choice: usize) {
        let n = self.len();
        assert!(choice <= n, "insertion choice out of range");
        self.fwd.push(n as u32);
        self.inv.push(n as u32);
        if choice > 0 {
            let x = choice - 1;
            let y = self.apply(x);
            self.set(x, n);
            self.set(n, y);
        }
    }

    /// Remove the top label `n-1` from its cycle.
    pub fn delete_top(&mut self) {
        let n = self.len();
        assert!(n > 0);
        let top = n - 1;
        let (p, q) = (self.preimage(top), self.apply(top));
        if p != top {
            self.set(p, q);
        }
        self.fwd.pop();
        self.inv.pop();
    }

    /// Permutation induced on the labels with `keep[x]`, relabelled order-preservingly.
    pub fn induced(&self, keep: &[bool]) -> Permutation {
        let n = self.len();
        assert_eq!(keep.len(), n);
        let mut new_label = vec![u32::MAX; n];
        let mut m = 0u32;
        for x in 0..n {
            if keep[x] {
                new_label[x] = m;
                m += 1;
            }
        }
        let mut fwd = vec![0u32; m as usize];
        for x in 0..n {
            if keep[x] {
                let mut y = self.apply(x);
                while !keep[y] {
                    y = self.apply(y);
                }
                fwd[new_label[x] as usize] = new_label[y];
            }
        }
        Permutation::from_images(fwd).expect("induced permutation")
    }
}

/// CRP step. Returns the new permutation and the insertion choice that was used.
pub fn crp_insert<R: Rng + ?Sized>(p: &Permutation, rng: &mut R) -> (Permutation, usize) {
    let mut q = p.clone();
    let choice = rng.random_range(0..=p.len());
    q.insert_top(choice);
    (q, choice)
}

/// Bypass `x` in its cycle, then relabel `0..n` minus `x` onto `0..n-1` in order.
pub fn crp_delete(p: &Permutation, x: usize) -> Result<Permutation, TowerError> {
    let n = p.len();
    if x >= n {
        return Err(TowerError::LabelOutOfRange(x, n));
    }
    if x == n - 1 {
        let mut q = p.clone();
        q.delete_top();
        return Ok(q);
    }
    let mut keep = vec![true; n];
    keep[x] = false;
    Ok(p.induced(&keep))
}

const LOG_VERSION: u8 = 1;

/// A CRP tower stored as its top level plus the insertion log.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PermutationTower {
    top: Permutation,
    log: Vec<u32>,
}

impl PermutationTower {
    pub fn new() -> PermutationTower {
        PermutationTower::default()
    }

    pub fn from_log(log: Vec<u32>) -> Result<PermutationTower, TowerError> {
        let mut top = Permutation::identity(0);
        for (i, &c) in log.iter().enumerate() {
            if c as usize > i {
                return Err(TowerError::Malformed);
            }
            top.insert_top(c as usize);
        }
        Ok(PermutationTower { top, log })
    }

    pub fn height(&self) -> usize {
        self.top.len()
    }

    pub fn top(&self) -> &Permutation {
        &self.top
    }

    pub fn log(&self) -> &[u32] {
        &self.log
    }

    pub fn grow<R: Rng + ?Sized>(&mut self, n_target: usize, rng: &mut R) {
        while self.top.len() < n_target {
            let choice = rng.random_range(0..=self.top.len());
            self.top.insert_top(choice);
            self.log.push(choice as u32);
        }
    }

    /// Level `m`, rebuilt from whichever end is closer.
    pub fn level(&self, m: usize) -> Permutation {
        let n = self.height();
        assert!(m <= n, "level above the top");
        if n - m <= m {
            let mut p = self.top.clone();
            for _ in m..n {
                p.delete_top();
            }
            p
        } else {
            let mut p = Permutation::identity(0);
            for &c in &self.log[..m] {
                p.insert_top(c as usize);
            }
            p
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(9 + 4 * self.log.len());
        out.push(LOG_VERSION);
        out.extend_from_slice(&(self.log.len() as u64).to_le_bytes());
        for c in &self.log {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<PermutationTower, TowerError> {
        let (&version, rest) = bytes.split_first().ok_or(TowerError::Malformed)?;
        if version != LOG_VERSION {
            return Err(TowerError::BadVersion(version));
        }
        if rest.len() < 8 {
            return Err(TowerError::Malformed);
        }
        let n = u64::from_le_bytes(rest[..8].try_into().unwrap()) as usize;
        let body = &rest[8..];
        if body.len() != 4 * n {
            return Err(TowerError::Malformed);
        }
        let log = body
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        PermutationTower::from_log(log)
    }
}

/// Grow `tower` to height `n_target`.
pub fn grow_tower<R: Rng + ?Sized>(
    mut tower: PermutationTower,
    n_target: usize,
    rng: &mut R,
) -> PermutationTower {
    tower.grow(n_target, rng);
    tower
}

/// Uniform permutation of size `n` via the CRP.
pub fn uniform_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut p = Permutation::identity(0);
    for i in 0..n {
        p.insert_top(rng.random_range(0..=i));
    }
    p
}

/// Jump times of `M_t`: `jumps[i]` is when `M` reaches `i + 1`; gaps are `Exp(i + 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DimensionClock {
    jumps: Vec<f64>,
    horizon: f64,
}

impl DimensionClock {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jumps
    }

    /// `M_t` for `0 ≤ t ≤ horizon`.
    pub fn m_at(&self, t: f64) -> usize {
        assert!(t <= self.horizon + 1e-12, "clock read past its horizon");
        self.jumps.partition_point(|&x| x <= t)
    }

    pub fn current(&self) -> usize {
        self.jumps.len()
    }
}

pub fn sample_dimension<R: Rng + ?Sized>(t: f64, rng: &mut R) -> DimensionClock {
    assert!(t >= 0.0);
    let mut jumps = Vec::new();
    let mut now = 0.0;
    loop {
        let rate = (jumps.len() + 1) as f64;
        let u: f64 = rng.random();
        now += -(1.0 - u).ln() / rate;
        if now > t {
            break;
        }
        jumps.push(now);
    }
    DimensionClock { jumps, horizon: t }
}
