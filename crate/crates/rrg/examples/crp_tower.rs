//! A Chinese-restaurant tower of permutations: each level is obtained from the one
//! above by deleting the top label.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrg::tower::{crp_insert, PermutationTower};

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tower = PermutationTower::new();
    tower.grow(12, &mut rng);
    println!("insertion log: {:?}", tower.log());
    for m in [1, 3, 6, 12] {
        let p = tower.level(m);
        println!("level {m:>2}: cycles {:?}", p.cycles());
    }

    let (bigger, choice) = crp_insert(tower.top(), &mut rng);
    println!("one more CRP step chose {choice}: {:?}", bigger.cycles());

    let bytes = tower.to_bytes();
    let back = PermutationTower::from_bytes(&bytes)?;
    assert_eq!(back, tower);
    println!("serialised in {} bytes", bytes.len());

    // number of cycles of a uniform permutation of n is about ln n
    let n = 5000;
    let reps = 2000;
    let mut total = 0;
    for _ in 0..reps {
        let mut t = PermutationTower::new();
        t.grow(n, &mut rng);
        total += t.top().cycles().len();
    }
    let harmonic: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
    println!("mean cycles at n={n}: {:.3} (exact {harmonic:.3})", total as f64 / reps as f64);
    Ok(())
}
