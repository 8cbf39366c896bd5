// The level-n family of lexicographic unique expansions as an automaton:
// membership, extremal continuations and the smallest member reaching x.

use univoque::bases::ExactReal;
use univoque::family::{smallest_gamma, FamilyAutomaton, DEFAULT_MAX_DEPTH};
use univoque::precise::PrecisionPolicy;
use univoque::words::{BinaryWord, EventuallyPeriodicSeq};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = FamilyAutomaton::build(3)?;
    println!("level 3: {} states", a.state_count());
    for s in ["(1)^inf", "1(10)^inf", "110(1001)^inf", "(1001)^inf", "(110)^inf"] {
        let seq: EventuallyPeriodicSeq = s.parse()?;
        println!("  {s:<16} member: {}", a.is_member(&seq));
    }
    let prefix: BinaryWord = "110".parse()?;
    let state = a.run(&prefix).expect("live prefix");
    let (lo, hi) = a.extremal_continuations(state);
    println!("after 110: smallest {lo}, largest {hi}");

    for text in ["1.03", "1.01"] {
        let x = ExactReal::parse(text)?;
        let found = smallest_gamma(&a, &x, PrecisionPolicy::default(), DEFAULT_MAX_DEPTH)?;
        println!("smallest gamma above {text} at q_2: {}", found.gamma);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
