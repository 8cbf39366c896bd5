// CSV samples of x -> q_s(x) over [z_2, 2], the range where q_s falls from
// q_2 to 3/2.

use univoque::cli::{figure_rows, write_csv};
use univoque::solver::SolverOptions;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rows = figure_rows("1.0508", "2", 24, &SolverOptions::default()).map_err(|e| e.message)?;
    write_csv(&rows, std::io::stdout().lock())?;
    // a sawtooth: q_s falls within each stretch sharing one gamma and jumps up between them
    for pair in rows.windows(2).filter(|w| w[0].gamma == w[1].gamma) {
        let (a, b): (f64, f64) = (pair[0].q_s.parse()?, pair[1].q_s.parse()?);
        assert!(b <= a + 1e-12);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
