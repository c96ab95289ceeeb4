//! Closed-form covariances and how the scaled finite-d field approaches U_j.

use rrg::limitfield::{cov_finite_d, cov_g, cov_u, scaled_cov_factor, tau_mgf, yule_mgf};

fn main() {
    let (t1, s1, t2, s2) = (-0.3, 0.0, 0.0, 0.4);
    println!("Yule mgf at θ=1, s=0.2: {:.6}", yule_mgf(1.0, 0.2));
    println!("τ mgf for j=3, s=0.2:  {:.6}", tau_mgf(3, 0.2));
    for j in 1..=4 {
        println!("j={j}  U: {:.6}   G: {:.6}", cov_u(j, t1, s1, t2, s2), cov_g(j, t1, s1, t2, s2));
        for d in [2, 5, 20, 100, 1000] {
            let c = cov_finite_d(d, j, j, t1, s1, t2, s2).exact().unwrap() * scaled_cov_factor(d, j);
            println!("    d={d:<5} Cov X_j = {c:.6}");
        }
    }
    println!("different lengths: {:?}", cov_finite_d(3, 2, 4, -0.2, 0.0, 0.0, 0.0));
}
