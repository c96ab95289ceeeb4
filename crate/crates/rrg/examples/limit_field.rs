//! The limiting Poisson field: Monte Carlo means and covariances against closed forms.

use rrg::harness::map_replicas;
use rrg::harness::stats::{covariance, mean};
use rrg::limitfield::{choose_truncation, cov_finite_d, LimitFieldPlan};
use rrg::words::a_count_f64;

fn main() -> anyhow::Result<()> {
    let (d, k_max, t0, s0) = (2, 3, 0.5, 0.5);
    let l = choose_truncation(d, k_max, t0, 1e-3);
    let plan = LimitFieldPlan::new(d, l, k_max, t0, s0)?;
    println!("truncation L={l}, expected atoms by length {:?}", &plan.expected_atoms()[..6]);

    let (ts, ss) = ([-t0, 0.0], [0.0, s0]);
    let reps = 4000;
    let samples = map_replicas(1, reps, |_, rng| plan.sample(rng).grid(&ts, &ss).expect("inside window"));

    for k in 1..=k_max {
        let x: Vec<Vec<f64>> = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| samples.iter().map(|g| g.total(i, j, k) as f64).collect())
            .collect();
        let target = a_count_f64(d, k) / (2 * k) as f64;
        println!("k={k}: mean N_k(0,0) = {:.3}, Poisson mean {target:.3}", mean(&x[3]));
        // cells: 0=(-T0,0) 1=(-T0,S0) 2=(0,0) 3=(0,S0)
        let pairs = [(3, 2, 0.0, s0, 0.0, 0.0), (2, 0, 0.0, 0.0, -t0, 0.0), (1, 2, -t0, s0, 0.0, 0.0)];
        for (a, b, t1, s1, t2, s2) in pairs {
            let exact = cov_finite_d(d, k, k, t1, s1, t2, s2).exact().unwrap();
            println!("    cov(({t1},{s1}),({t2},{s2})) = {:.3}  closed form {exact:.3}", covariance(&x[a], &x[b]));
        }
    }
    Ok(())
}
