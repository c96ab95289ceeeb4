//! Eigenvalue traces against non-backtracking walks and cycle counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrg::cycles::build_graph;
use rrg::spectra::{gamma_poly, spectral_report};
use rrg::tower::uniform_permutation;

fn main() -> anyhow::Result<()> {
    let (d, n, k_max) = (3, 300, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let perms: Vec<_> = (0..d).map(|_| uniform_permutation(n, &mut rng)).collect();
    let report = spectral_report(&build_graph(&perms)?, k_max)?;

    println!("Γ_3 for d={d}: {:?}", gamma_poly(3, d)?.coeffs());
    println!("{:>2} {:>14} {:>10} {:>10} {:>10} {:>6} tangle-free", "k", "tr Γ_k", "CNBW_k", "residual", "f-trace", "C_k");
    for r in &report.rows {
        println!(
            "{:>2} {:>14.6} {:>10} {:>10.2e} {:>10.4} {:>6} {}",
            r.k, r.trace_gamma, r.cnbw, r.residual, r.f_trace, r.cycle_count, r.tangle_free
        );
    }
    println!("max residual {:.2e}", report.max_residual());
    Ok(())
}
