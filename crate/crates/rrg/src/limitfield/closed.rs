//! Closed-form rates, generating functions and covariances of the limit field.

use crate::words::{a_count_f64, b_generating_sum, Word};

/// `E exp(−2s·ξ(θ))` for a Yule process `ξ` started at one: geometric with mean `e^θ`.
pub fn yule_mgf(theta: f64, s: f64) -> f64 {
    assert!(theta >= 0.0 && s >= 0.0, "yule_mgf needs theta, s >= 0");
    let pz = (-theta - 2.0 * s).exp();
    // 1 − (1−p)z = (1 − z) + pz, with 1 − z taken through expm1
    pz / (-(-2.0 * s).exp_m1() + pz)
}

/// `E exp(2s·τ)` where `τ` counts sign changes around a `j`-cycle of fair coins.
pub fn tau_mgf(j: usize, s: f64) -> f64 {
    assert!(j >= 1);
    let e = (2.0 * s).exp();
    let ji = j as i32;
    ((1.0 + e).powi(ji) + (1.0 - e).powi(ji)) / 2f64.powi(ji)
}

/// Birth rate of atoms that sit at `w̄` in dimension `t ≤ 0`.
pub fn birth_rate(t: f64, wbar: &Word) -> f64 {
    assert!(t <= 0.0, "birth_rate needs t <= 0");
    let st = wbar.stats();
    let len = st.length as f64;
    2.0 / st.h as f64 * (st.b as f64 - len + (-t).exp() * len)
}

/// `(birth rate, death rate per atom)` of `N_w(0, ·)`.
pub fn bd_generator(w: &Word) -> (f64, f64) {
    let st = w.stats();
    let b = st.b as f64;
    (2.0 * b / st.h as f64, 2.0 * b)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Covariance {
    Exact(f64),
    /// Only bounds are known.
    Bounds { lo: f64, hi: f64 },
}

impl Covariance {
    pub fn exact(self) -> Option<f64> {
        match self {
            Covariance::Exact(x) => Some(x),
            Covariance::Bounds { .. } => None,
        }
    }

    pub fn contains(self, x: f64) -> bool {
        match self {
            Covariance::Exact(y) => x == y,
            Covariance::Bounds { lo, hi } => lo <= x && x <= hi,
        }
    }
}

/// `Cov(N_j(t1,s1), N_k(t2,s2))` for the limit field at fixed `d`.
pub fn cov_finite_d(d: usize, j: usize, k: usize, t1: f64, s1: f64, t2: f64, s2: f64) -> Covariance {
    assert!(d >= 1 && j >= 1 && k >= 1);
    assert!(t1 <= 0.0 && t2 <= 0.0 && s1 >= 0.0 && s2 >= 0.0);
    if j != k {
        if t1 == t2 {
            return Covariance::Exact(0.0);
        }
        // chains only shrink going down in dimension
        let (long_t, short_t) = if j > k { (t1, t2) } else { (t2, t1) };
        if long_t < short_t {
            return Covariance::Exact(0.0);
        }
        let hi = (a_count_f64(d, j) / (2 * j) as f64).min(a_count_f64(d, k) / (2 * k) as f64);
        return Covariance::Bounds { lo: 0.0, hi };
    }
    let theta = -t1.max(t2);
    let s = (s1 - s2).abs();
    let jf = j as f64;
    let x = (-2.0 * s).exp();
    let value = (-jf * (t1 - t2).abs()).exp()
        * (2.0 * s * jf).exp()
        * yule_mgf(theta, s).powi(j as i32)
        * b_generating_sum(d, j, x)
        / (2.0 * jf);
    Covariance::Exact(value)
}

/// Covariance of the `d → ∞` Gaussian field `U_j`.
pub fn cov_u(j: usize, t1: f64, s1: f64, t2: f64, s2: f64) -> f64 {
    assert!(t1 <= 0.0 && t2 <= 0.0 && s1 >= 0.0 && s2 >= 0.0);
    let jf = j as f64;
    let s = (s1 - s2).abs();
    2.0 * jf
        * (-jf * (t1 - t2).abs()).exp()
        * yule_mgf(-t1.max(t2), s).powi(j as i32)
        * tau_mgf(j, s)
}

/// Covariance of the rescaled field `G_j`.
pub fn cov_g(j: usize, u1: f64, v1: f64, u2: f64, v2: f64) -> f64 {
    assert!(v1 >= 0.0 && v2 >= 0.0);
    let base = (-(u1 - u2).abs()).exp() / (1.0 + (v1 - v2).abs() * (-u1.max(u2)).exp());
    2.0 * j as f64 * base.powi(j as i32)
}

/// Factor turning `Cov N_j` into `Cov X_j`.
pub fn scaled_cov_factor(d: usize, j: usize) -> f64 {
    let jf = j as f64;
    4.0 * jf * jf / ((2 * d - 1) as f64).powi(j as i32)
}
