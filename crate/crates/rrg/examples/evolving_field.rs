//! One realization of the graph field in dimension offset t and time s.
//!
//! Rows move down in dimension (t from -T0 to 0), columns forward in time.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrg::cycles::cycle_counts;
use rrg::dynamics::{field_grid, GridSpec};

fn main() -> anyhow::Result<()> {
    let (d, horizon, t0, s0, k) = (2, 7.0, 1.0, 1.0, 3);
    let spec = GridSpec::uniform(t0, s0, 3, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = field_grid(d, horizon, t0, s0, &spec, &mut rng)?;

    print!("{:>18}", "");
    for s in &grid.ss {
        print!("  s={s:<5.2}");
    }
    println!();
    for (i, t) in grid.ts.iter().enumerate() {
        print!("t={t:<5.2} n={:<8}", grid.dims[i]);
        for j in 0..grid.ss.len() {
            let c = cycle_counts(grid.cell(i, j), k);
            print!("  {:>7}", format!("{}/{}/{}", c[1], c[2], c[3]));
        }
        println!();
    }
    println!("cells show C_1/C_2/C_3");
    Ok(())
}
