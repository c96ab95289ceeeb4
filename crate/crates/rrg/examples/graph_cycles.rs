//! The 2d-regular multigraph of d random permutations and its short cycles.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrg::cycles::{build_graph, cycle_counts, enumerate_cycles, is_tangle_free, word_counts};
use rrg::tower::uniform_permutation;
use rrg::words::a_count;

fn main() -> anyhow::Result<()> {
    let (d, n, k_max) = (2, 1000, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let perms: Vec<_> = (0..d).map(|_| uniform_permutation(n, &mut rng)).collect();
    let g = build_graph(&perms)?;

    let counts = cycle_counts(&g, k_max);
    for k in 1..=k_max {
        // E C_k -> a(d,k) / 2k
        let mean = a_count(d, k)? as f64 / (2 * k) as f64;
        println!("C_{k} = {:>3}   Poisson mean {mean:.3}   tangle-free: {}", counts[k], is_tangle_free(&g, k, k));
    }

    let by_word: BTreeMap<_, _> = word_counts(&g, 3).into_iter().collect();
    for (w, c) in &by_word {
        println!("{w:<8} {c}");
    }

    for c in enumerate_cycles(&g, 2) {
        println!("cycle {:?} reads {}", c.vertices, c.word);
    }
    Ok(())
}
