// Brute-force cross-check of solver answers: the expansion found at q_s is
// the only one, while slightly below q_s a second expansion appears.

use num_rational::BigRational;
use univoque::bases::{Base, ExactReal};
use univoque::oracle::{expansion_branches, greedy_expansion, rational_below, verify_uniqueness_at, UniquenessVerdict};
use univoque::solver::{qs, SolverOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["2", "1.2", "1.03"] {
        let x = ExactReal::parse(text)?;
        let r = qs(&x, &SolverOptions::default())?;
        let (gamma, level, root) = (r.gamma.unwrap(), r.level.unwrap(), r.qs.unwrap());
        let verdict = verify_uniqueness_at(&x, &gamma, level, &root, 60)?;
        let below = Base::Rational(rational_below(&root, &BigRational::new(1.into(), 100.into())));
        let branches = expansion_branches(&x, &below, 60)?;
        println!("x = {text:<5} at q_s: {verdict:?}; at q_s - 0.01: {branches}");
        assert_eq!(verdict, UniquenessVerdict::Pass);
    }
    let q = Base::golden_ratio();
    println!("greedy 1 at golden ratio: {}", greedy_expansion(&ExactReal::parse("1")?, &q, 12)?);
    println!("branches of 1 at golden ratio: {}", expansion_branches(&ExactReal::parse("1")?, &q, 12)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
