//! Word classes of the free group: enumeration, statistics, halvings.
//!
//! cargo run --example word_classes -- 2 4

use rrg::words::{a_count, enumerate_classes, halvings, Halving, Word};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let k: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4);

    let classes = enumerate_classes(d, k)?;
    let covered: usize = classes.iter().map(|w| w.stats().orbit_size()).sum();
    println!("d={d} k={k}: {} classes covering {covered} of a(d,k)={} sequences", classes.len(), a_count(d, k)?);

    println!("{:<14} {:>2} {:>2} {:>2}  halvings", "word", "h", "b", "c");
    for w in classes.iter().take(20) {
        let st = w.stats();
        let targets: Vec<String> = halvings(w)
            .into_iter()
            .map(|(_, h)| match h {
                Halving::Word(v) => v.to_string(),
                Halving::Death => "death".into(),
            })
            .collect();
        println!("{:<14} {:>2} {:>2} {:>2}  {}", w.to_string(), st.h, st.b, st.c, targets.join(" "));
    }
    if classes.len() > 20 {
        println!("... {} more", classes.len() - 20);
    }

    // parsing accepts any representative and canonicalises it
    let w: Word = "P2P1p2p1".parse()?;
    println!("P2P1p2p1 -> {w}");
    Ok(())
}
