// Thue-Morse prefixes, the family blocks built from them, and the
// quasi-greedy expansion of 1 at each ladder base.

use univoque::bases::{quasi_greedy_alpha, Base};
use univoque::family::family_block;
use univoque::words::{thue_morse_prefix, thue_morse_range};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for n in 1..=5 {
        println!("tau_0..tau_{:<3} {}", (1 << n) - 1, thue_morse_prefix(1 << n)?);
    }
    for j in 1..=4 {
        println!("B_{j} = {}", family_block(j));
    }
    for n in 1..=4 {
        let q = Base::level(n)?;
        let alpha = quasi_greedy_alpha(&q, 3 << n)?;
        // periodic with period 2^n: the Thue-Morse prefix with its last digit lowered
        let period = thue_morse_range(1, 1 << n).minus()?;
        assert_eq!(alpha, period.power(3));
        println!("alpha(q_{n}) = {alpha}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
