// Comparisons that no finite enclosure can settle, decided with exact
// arithmetic in the algebraic ladder bases.

use std::cmp::Ordering;

use univoque::bases::{ExactReal, SeriesBase};
use univoque::precise::PrecisionPolicy;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let policy = PrecisionPolicy::default();
    let one = ExactReal::parse("1")?;
    let cases = [("(10)^inf", 1), ("(1100)^inf", 2), ("1101(0)^inf", 2), ("(1)^inf", 1)];
    for (seq, n) in cases {
        let value = ExactReal::series(seq.parse()?, SeriesBase::Level(n));
        let ord = one.compare(&value, policy)?;
        println!("1 vs {value}: {ord:?}");
    }
    let z2 = ExactReal::series("1(10)^inf".parse()?, SeriesBase::Level(2));
    assert_eq!(z2.compare(&ExactReal::parse("1.0507")?, policy)?, Ordering::Greater);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
