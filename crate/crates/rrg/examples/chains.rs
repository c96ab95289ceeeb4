//! Halving and doubling chains on word classes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrg::limitfield::{doubling_chain, halving_chain};
use rrg::words::Word;

fn main() -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let w: Word = "p1p1p2p2p2".parse()?;
    let h = halving_chain(&w, 3.0, &mut rng);
    println!("halving from {w}:");
    for (t, s) in h.times.iter().zip(&h.states) {
        println!("  {t:.3}  {s}");
    }
    if let Some(z) = h.death {
        println!("  {z:.3}  dies");
    }

    let y = doubling_chain(&"p1P2".parse()?, 1.0, &mut rng);
    println!("doubling from p1.P2 reaches length {} after {} jumps", y.states.last().unwrap().len(), y.jumps());

    // survival of a single letter: the only halving of p1 is death, at rate 1
    let reps = 20000;
    let alive = (0..reps).filter(|_| halving_chain(&"p1".parse().unwrap(), 1.0, &mut rng).death.is_none()).count();
    println!("P(p1 alive at 1) = {:.4}, exp(-1) = {:.4}", alive as f64 / reps as f64, (-1f64).exp());
    Ok(())
}
