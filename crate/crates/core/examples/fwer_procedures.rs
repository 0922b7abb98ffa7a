//! Bonferroni against fixed sequence testing on the same p-values.

use qltt::fwer::{bonferroni, fixed_sequence_test};

fn main() -> qltt::Result<()> {
    let p = [0.004, 0.03, 0.0001, 0.2, 0.012, 0.04];
    let delta = 0.05;

    let b = bonferroni(&p, delta)?;
    println!("bonferroni (threshold {}): {:?}", b.threshold_used, b.certified);

    // A good prior ordering certifies more than Bonferroni; a bad one stops early.
    for ordering in [[2, 0, 4, 1, 5, 3], [3, 2, 0, 4, 1, 5]] {
        let f = fixed_sequence_test(&p, &ordering, delta)?;
        println!("fst along {ordering:?}: {:?}", f.certified);
    }
    Ok(())
}
