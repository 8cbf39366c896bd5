// The base ladder q_1 < q_2 < ... < q_KL, the thresholds z_n and z_{1,k},
// and the endpoints of the three gaps, all with certified widths.

use univoque::cli::constants_table;
use univoque::solver::SolverOptions;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rows = constants_table(5, &SolverOptions::default())?;
    for row in &rows {
        println!("{:<14}{:<24}{}", row.name, row.value, row.width);
    }
    let q2 = rows.iter().find(|r| r.name == "q_2").unwrap();
    assert!(q2.value.starts_with("1.75487"));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
