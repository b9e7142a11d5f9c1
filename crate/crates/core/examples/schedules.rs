//! Coulomb-constant schedules side by side: exponential decay, the plain
//! log-sigmoid and the chaotic log-sigmoid actually used by ai-aefa.
//! Prints CSV to stdout.
//!
//!     cargo run --example schedules > schedules.csv

use aefa::schedule::{final_k, ChaoticState, ExponentialK, SigmoidK};

fn main() -> aefa::Result<()> {
    let l_max = 500;
    let exponential = ExponentialK::new(500.0, 30.0)?;
    let sigmoid = SigmoidK::new(500.0, 3.0, 100.0)?;
    let table_defaults = SigmoidK::default();
    let mut chaos = ChaoticState::default();

    println!("l,exponential,sigmoid_3_100,sigmoid_6_300,chaotic_6_300");
    for l in 0..=l_max {
        let chaotic = final_k(&table_defaults, &mut chaos, l, l_max)?;
        println!(
            "{l},{:.6e},{:.6e},{:.6e},{:.6e}",
            exponential.value(l, l_max)?,
            sigmoid.value(l, l_max),
            table_defaults.value(l, l_max),
            chaotic
        );
    }
    Ok(())
}
