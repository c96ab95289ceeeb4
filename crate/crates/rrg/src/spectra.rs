//! Scaled adjacency spectrum, Chebyshev and `Γ_k` polynomials, the exact trace
//! identity with non-backtracking walk counts, and the Möbius basis `f_k`.

use nalgebra::SymmetricEigen;
use thiserror::Error;

use crate::cycles::{cnbw_counts, cycle_counts, is_tangle_free, MultiGraph};

pub const MAX_DEGREE: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum SpectraError {
    #[error("adjacency matrix is not symmetric")]
    NotSymmetric,
    #[error("polynomial degree {0} exceeds {MAX_DEGREE}")]
    DegreeTooLarge(usize),
}

/// Polynomial by ascending coefficients; trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialCoeffs(Vec<f64>);

impl PolynomialCoeffs {
    pub fn new(mut c: Vec<f64>) -> PolynomialCoeffs {
        while c.last() == Some(&0.0) {
            c.pop();
        }
        PolynomialCoeffs(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    fn axpy(&mut self, a: f64, other: &PolynomialCoeffs) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0.0);
        }
        for (s, o) in self.0.iter_mut().zip(&other.0) {
            *s += a * o;
        }
        *self = PolynomialCoeffs::new(std::mem::take(&mut self.0));
    }
}

fn chebyshev_integer(k: usize) -> Vec<i128> {
    let mut prev = vec![1i128];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0i128, 1];
    for _ in 1..k {
        let mut next = vec![0i128; cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `T_k`, from the integer recurrence `T_{k+1} = 2x T_k − T_{k−1}`.
pub fn chebyshev_t(k: usize) -> Result<PolynomialCoeffs, SpectraError> {
    if k > MAX_DEGREE {
        return Err(SpectraError::DegreeTooLarge(k));
    }
    Ok(PolynomialCoeffs::new(
        chebyshev_integer(k).into_iter().map(|c| c as f64).collect(),
    ))
}

fn gamma_constant(k: usize, d: usize) -> f64 {
    if k % 2 == 0 {
        (2 * d - 2) as f64 / ((2 * d - 1) as f64).powi((k / 2) as i32)
    } else {
        0.0
    }
}

/// `Γ_0 = 1`, `Γ_{2m} = 2T_{2m} + (2d−2)/(2d−1)^m`, `Γ_{2m+1} = 2T_{2m+1}`.
pub fn gamma_poly(k: usize, d: usize) -> Result<PolynomialCoeffs, SpectraError> {
    if k == 0 {
        return Ok(PolynomialCoeffs::new(vec![1.0]));
    }
    let t = chebyshev_t(k)?;
    let mut c: Vec<f64> = t.coeffs().iter().map(|x| 2.0 * x).collect();
    c[0] += gamma_constant(k, d);
    Ok(PolynomialCoeffs::new(c))
}

/// `Γ_k(x)` for every `k ≤ k_max`, via the three-term recurrence.
pub fn gamma_values(x: f64, d: usize, k_max: usize) -> Vec<f64> {
    let mut out = vec![1.0; k_max + 1];
    let (mut t0, mut t1) = (1.0, x);
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        if k > 1 {
            let t2 = 2.0 * x * t1 - t0;
            t0 = t1;
            t1 = t2;
        }
        *slot = 2.0 * t1 + gamma_constant(k, d);
    }
    out
}

/// Eigenvalues of `A / (2√(2d−1))`, in decreasing order.
pub fn scaled_eigenvalues(g: &MultiGraph) -> Result<Vec<f64>, SpectraError> {
    let a = g.adjacency();
    if a != a.transpose() {
        return Err(SpectraError::NotSymmetric);
    }
    let scale = 2.0 * ((2 * g.d() - 1) as f64).sqrt();
    let mut ev: Vec<f64> = SymmetricEigen::new(a)
        .eigenvalues
        .iter()
        .map(|x| x / scale)
        .collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

/// Largest `‖Av − μv‖` over the eigenpairs of the unscaled adjacency matrix.
pub fn eigen_residual(g: &MultiGraph) -> f64 {
    let a = g.adjacency();
    let eig = SymmetricEigen::new(a.clone());
    (0..a.nrows())
        .map(|i| {
            let v = eig.eigenvectors.column(i);
            (&a * v - v * eig.eigenvalues[i]).norm()
        })
        .fold(0.0, f64::max)
}

/// `Σ_i Γ_k(λ_i)` for `k = 0..=k_max`.
pub fn gamma_traces(eigs: &[f64], d: usize, k_max: usize) -> Vec<f64> {
    let mut out = vec![0.0; k_max + 1];
    for &x in eigs {
        for (o, g) in out.iter_mut().zip(gamma_values(x, d, k_max)) {
            *o += g;
        }
    }
    out
}

pub fn trace_gamma(eigs: &[f64], k: usize, d: usize) -> f64 {
    gamma_traces(eigs, d, k)[k]
}

pub fn mobius(n: usize) -> i32 {
    assert!(n >= 1);
    let mut n = n;
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

fn divisors(k: usize) -> impl Iterator<Item = usize> {
    (1..=k).filter(move |j| k % j == 0)
}

/// `f_k = (1/2k) Σ_{j|k} μ(k/j) (2d−1)^{j/2} Γ_j`.
pub fn f_basis(k: usize, d: usize) -> Result<PolynomialCoeffs, SpectraError> {
    assert!(k >= 1);
    let q = (2 * d - 1) as f64;
    let mut f = PolynomialCoeffs::new(vec![]);
    for j in divisors(k) {
        let mu = mobius(k / j);
        if mu != 0 {
            let w = mu as f64 * q.powf(j as f64 / 2.0) / (2 * k) as f64;
            f.axpy(w, &gamma_poly(j, d)?);
        }
    }
    Ok(f)
}

/// `Σ_i f_k(λ_i)` computed through the `Γ_j` traces.
pub fn f_trace(gamma_tr: &[f64], k: usize, d: usize) -> f64 {
    let q = (2 * d - 1) as f64;
    divisors(k)
        .map(|j| mobius(k / j) as f64 * q.powf(j as f64 / 2.0) * gamma_tr[j])
        .sum::<f64>()
        / (2 * k) as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralRow {
    pub k: usize,
    pub trace_gamma: f64,
    pub cnbw: u128,
    pub residual: f64,
    pub f_trace: f64,
    pub cycle_count: u64,
    pub tangle_free: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub rows: Vec<SpectralRow>,
}

impl SpectralReport {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }
}

/// Trace identity, Möbius traces and cycle counts for `k = 1..=k_max`.
pub fn spectral_report(g: &MultiGraph, k_max: usize) -> Result<SpectralReport, SpectraError> {
    let d = g.d();
    let eigs = scaled_eigenvalues(g)?;
    let tr = gamma_traces(&eigs, d, k_max);
    let walks = cnbw_counts(g, k_max);
    let cycles = cycle_counts(g, k_max);
    let q = (2 * d - 1) as f64;
    // (k,k)-tangle-freeness is monotone in k
    let mut free = vec![false; k_max + 1];
    for k in 1..=k_max {
        free[k] = is_tangle_free(g, k, k);
        if !free[k] {
            break;
        }
    }
    let rows = (1..=k_max)
        .map(|k| SpectralRow {
            k,
            trace_gamma: tr[k],
            cnbw: walks[k],
            residual: tr[k] - walks[k] as f64 / q.powf(k as f64 / 2.0),
            f_trace: f_trace(&tr, k, d),
            cycle_count: cycles[k],
            tangle_free: free[k],
        })
        .collect();
    Ok(SpectralReport {
        eigenvalues: eigs,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::build_graph;
    use crate::tower::{uniform_permutation, Permutation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_graph(n: usize, d: usize, seed: u64) -> MultiGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ps: Vec<Permutation> = (0..d).map(|_| uniform_permutation(n, &mut rng)).collect();
        build_graph(&ps).unwrap()
    }

    #[test]
    fn polynomials() {
        assert_eq!(chebyshev_t(2).unwrap().coeffs(), &[-1.0, 0.0, 2.0]);
        assert_eq!(gamma_poly(2, 1).unwrap().coeffs(), &[-2.0, 0.0, 4.0]);
        let g = gamma_poly(2, 2).unwrap();
        assert!((g.coeffs()[0] - (-2.0 + 2.0 / 3.0)).abs() < 1e-15);
        assert_eq!(gamma_poly(0, 3).unwrap().coeffs(), &[1.0]);
        assert!(chebyshev_t(65).is_err());
        assert_eq!(chebyshev_t(64).unwrap().degree(), Some(64));
    }

    #[test]
    fn chebyshev_matches_cosine() {
        for k in 0..=20 {
            let t = chebyshev_t(k).unwrap();
            for i in 0..=10 {
                let theta = i as f64 * 0.3;
                let x = theta.cos();
                assert!((t.eval(x) - (k as f64 * theta).cos()).abs() < 1e-9, "k={k}");
            }
        }
    }

    #[test]
    fn recurrence_matches_coefficients() {
        for d in 1..=4 {
            for &x in &[-1.2, -0.4, 0.0, 0.77, 1.3] {
                let vals = gamma_values(x, d, 12);
                for (k, v) in vals.iter().enumerate() {
                    let p = gamma_poly(k, d).unwrap().eval(x);
                    assert!((p - v).abs() < 1e-9 * p.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn mobius_values() {
        let expect = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, &m) in expect.iter().enumerate() {
            assert_eq!(mobius(i + 1), m, "n={}", i + 1);
        }
    }

    #[test]
    fn small_spectra() {
        let loop1 = build_graph(&[Permutation::identity(1)]).unwrap();
        assert_eq!(scaled_eigenvalues(&loop1).unwrap(), vec![1.0]);
        assert!((trace_gamma(&[1.0], 1, 1) - 2.0).abs() < 1e-15);
        let swap = build_graph(&[Permutation::from_images(vec![1, 0]).unwrap()]).unwrap();
        let ev = scaled_eigenvalues(&swap).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] + 1.0).abs() < 1e-12);
        assert!((trace_gamma(&ev, 2, 1) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn perron_eigenvalue() {
        for d in 1..=3 {
            let g = random_graph(40, d, d as u64);
            let ev = scaled_eigenvalues(&g).unwrap();
            assert!((ev[0] - d as f64 / ((2 * d - 1) as f64).sqrt()).abs() < 1e-12);
            assert!(eigen_residual(&g) < 1e-9);
        }
    }

    #[test]
    fn trace_identity_on_random_graphs() {
        for (i, (n, d)) in [(30, 1), (50, 2), (80, 3), (200, 2)].into_iter().enumerate() {
            let g = random_graph(n, d, 40 + i as u64);
            let r = spectral_report(&g, 10).unwrap();
            assert!(r.max_residual() < 1e-6, "n={n} d={d}: {}", r.max_residual());
        }
    }

    #[test]
    fn f_basis_shape() {
        for d in 1..=3 {
            let q = (2 * d - 1) as f64;
            let f1 = f_basis(1, d).unwrap();
            assert_eq!(f1.degree(), Some(1));
            assert!((f1.coeffs()[1] - q.sqrt()).abs() < 1e-12);
            for k in 1..=10 {
                let f = f_basis(k, d).unwrap();
                assert_eq!(f.degree(), Some(k));
                // leading coefficient: q^{k/2} · 2 · 2^{k−1} / 2k
                let lead = q.powf(k as f64 / 2.0) * 2f64.powi(k as i32) / (2 * k) as f64;
                assert!((f.coeffs()[k] / lead - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn f_traces_count_cycles_when_tangle_free() {
        let mut seen = 0;
        for seed in 0..10 {
            let g = random_graph(500, 2, 900 + seed);
            let r = spectral_report(&g, 3).unwrap();
            let ev = &r.eigenvalues;
            for row in &r.rows {
                let by_coeffs: f64 = {
                    let f = f_basis(row.k, 2).unwrap();
                    ev.iter().map(|&x| f.eval(x)).sum()
                };
                assert!((by_coeffs - row.f_trace).abs() < 1e-6);
                if row.tangle_free {
                    seen += 1;
                    assert!((row.f_trace - row.cycle_count as f64).abs() < 1e-6, "{row:?}");
                }
            }
        }
        assert!(seen > 0);
    }
}
