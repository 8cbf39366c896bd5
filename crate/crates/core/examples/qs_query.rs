// q_s for a handful of inputs, one per solver path.

use univoque::bases::ExactReal;
use univoque::solver::{qs, SolverOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let options = SolverOptions::default();
    for text in ["2", "1.2", "1.03", "0.5", "1", "0.7", "1/3"] {
        let x = ExactReal::parse(text)?;
        let r = qs(&x, &options)?;
        let q = r.qs.as_ref().map(|q| q.enclosure().to_string()).unwrap_or_else(|| "-".into());
        let gamma = r.gamma.as_ref().map(|g| g.to_string()).unwrap_or_else(|| "-".into());
        println!("{text:<6}{:<10}{:<22}{q:<22}{gamma}", r.classification.to_string(), r.path.to_string());
    }

    // the closed forms and the level scan agree
    let x = ExactReal::parse("1.4")?;
    let fast = qs(&x, &options)?.qs.unwrap();
    let slow = qs(&x, &SolverOptions::general())?.qs.unwrap();
    assert!((fast.to_f64() - slow.to_f64()).abs() < 1e-11);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
