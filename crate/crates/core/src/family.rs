//! The sequence families `U'_{q_n}` as finite automata.
//!
//! For `q ∈ (q_{n-1}, q_n]` the unique expansions are the sequences
//!
//! ```text
//! B_1^{a_1} B_2^{a_2} ⋯ B_{j-1}^{a_{j-1}} B_j^∞,   1 ≤ j ≤ n, a_i ≥ 0,
//! ```
//!
//! with `B_j = (τ_1 ⋯ τ_{2^{j-1}})^-` (so `B_1 = 0`, `B_2 = 10`,
//! `B_3 = 1100`), together with their reflections. A nondeterministic
//! automaton reads the blocks left to right with nondecreasing index; every
//! infinite run stays inside one orientation and eventually repeats a
//! single block, so a sequence is a member exactly when each of its
//! prefixes has a run. The automaton stored here is the subset
//! construction of that reader: a state is dead-free, and membership means
//! never falling off it.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::bases::{BasesError, ExactReal, SeriesBase, MAX_LEVEL};
use crate::precise::PrecisionPolicy;
use crate::words::{thue_morse_range, BinaryWord, EventuallyPeriodicSeq};

/// Default bound on the number of digits fixed by [`smallest_gamma`].
pub const DEFAULT_MAX_DEPTH: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("level {level} outside 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("no family member found after {depth} digits: {reason}")]
    NotFound { depth: usize, reason: String },
    #[error("search stopped at the depth cap of {depth} digits")]
    DepthExceeded { depth: usize },
    #[error(transparent)]
    Bases(#[from] BasesError),
}

/// `B_j = (τ_1 ⋯ τ_{2^{j-1}})^-`.
pub fn family_block(j: usize) -> BinaryWord {
    assert!(j >= 1, "blocks are numbered from 1");
    thue_morse_range(1, 1 << (j - 1)).minus().expect("τ_{2^k} = 1")
}

/// Index of a subset state.
pub type StateId = usize;

#[derive(Debug, Clone)]
struct Subset {
    next: [Option<StateId>; 2],
}

#[derive(Debug, Clone)]
pub struct FamilyAutomaton {
    level: usize,
    states: Vec<Subset>,
}

/// Positions of the block reader: `(orientation, block, offset)`, offset 0
/// meaning "between blocks, next block index at least `block`".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Position {
    reflected: bool,
    block: usize,
    offset: usize,
}

struct Reader {
    blocks: Vec<BinaryWord>,
    reflected: Vec<BinaryWord>,
}

impl Reader {
    fn block(&self, reflected: bool, j: usize) -> &BinaryWord {
        if reflected {
            &self.reflected[j - 1]
        } else {
            &self.blocks[j - 1]
        }
    }

    fn step(&self, p: Position, digit: u8, out: &mut Vec<Position>) {
        let n = self.blocks.len();
        let advance = |j: usize, offset: usize| {
            let len = self.block(p.reflected, j).len();
            Position { reflected: p.reflected, block: j, offset: (offset + 1) % len }
        };
        if p.offset > 0 {
            if self.block(p.reflected, p.block).digits()[p.offset] == digit {
                out.push(advance(p.block, p.offset));
            }
            return;
        }
        for j in p.block..=n {
            if self.block(p.reflected, j).digits()[0] == digit {
                out.push(advance(j, 0));
            }
        }
    }
}

impl FamilyAutomaton {
    pub fn build(level: usize) -> Result<Self, FamilyError> {
        if !(1..=MAX_LEVEL).contains(&level) {
            return Err(FamilyError::LevelOutOfRange { level, max: MAX_LEVEL });
        }
        let blocks: Vec<BinaryWord> = (1..=level).map(family_block).collect();
        let reflected = blocks.iter().map(BinaryWord::reflect).collect();
        let reader = Reader { blocks, reflected };

        let start = vec![
            Position { reflected: false, block: 1, offset: 0 },
            Position { reflected: true, block: 1, offset: 0 },
        ];
        let mut index: HashMap<Vec<Position>, StateId> = HashMap::new();
        let mut sets = vec![start.clone()];
        index.insert(start, 0);
        let mut states = Vec::new();
        let mut scratch = Vec::new();
        while states.len() < sets.len() {
            let current = sets[states.len()].clone();
            let mut next = [None, None];
            for digit in 0..2u8 {
                scratch.clear();
                for &p in &current {
                    reader.step(p, digit, &mut scratch);
                }
                if scratch.is_empty() {
                    continue;
                }
                scratch.sort();
                scratch.dedup();
                let id = *index.entry(scratch.clone()).or_insert_with(|| {
                    sets.push(scratch.clone());
                    sets.len() - 1
                });
                next[digit as usize] = Some(id);
            }
            states.push(Subset { next });
        }
        Ok(FamilyAutomaton { level, states })
    }

    /// Process-wide automaton for `level`, built on first use.
    pub fn shared(level: usize) -> Result<Arc<Self>, FamilyError> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<FamilyAutomaton>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.lock().unwrap().get(&level) {
            return Ok(hit.clone());
        }
        let built = Arc::new(Self::build(level)?);
        cache.lock().unwrap().insert(level, built.clone());
        Ok(built)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn start(&self) -> StateId {
        0
    }

    pub fn step(&self, state: StateId, digit: u8) -> Option<StateId> {
        self.states[state].next[digit as usize]
    }

    /// State after reading `word` from the start, if `word` is a prefix of
    /// some member.
    pub fn run(&self, word: &BinaryWord) -> Option<StateId> {
        self.run_from(self.start(), word)
    }

    fn run_from(&self, state: StateId, word: &BinaryWord) -> Option<StateId> {
        word.digits().iter().try_fold(state, |s, &d| self.step(s, d))
    }

    pub fn accepts_prefix(&self, word: &BinaryWord) -> bool {
        self.run(word).is_some()
    }

    /// Whether `seq` is a member of the family.
    pub fn is_member(&self, seq: &EventuallyPeriodicSeq) -> bool {
        let Some(mut state) = self.run(seq.preamble()) else {
            return false;
        };
        let mut seen = vec![false; self.states.len()];
        loop {
            if seen[state] {
                return true;
            }
            seen[state] = true;
            match self.run_from(state, seq.cycle()) {
                Some(next) => state = next,
                None => return false,
            }
        }
    }

    fn greedy(&self, state: StateId, preferred: u8) -> EventuallyPeriodicSeq {
        let mut visited: HashMap<StateId, usize> = HashMap::new();
        let mut digits = Vec::new();
        let mut s = state;
        loop {
            if let Some(&at) = visited.get(&s) {
                let preamble = BinaryWord::new(digits[..at].to_vec()).expect("binary");
                let cycle = BinaryWord::new(digits[at..].to_vec()).expect("binary");
                return EventuallyPeriodicSeq::new(preamble, cycle).expect("nonempty cycle");
            }
            visited.insert(s, digits.len());
            let (d, t) = match self.step(s, preferred) {
                Some(t) => (preferred, t),
                None => (1 - preferred, self.step(s, 1 - preferred).expect("live states have successors")),
            };
            digits.push(d);
            s = t;
        }
    }

    /// Lexicographically smallest infinite continuation from `state`.
    pub fn lexmin(&self, state: StateId) -> EventuallyPeriodicSeq {
        self.greedy(state, 0)
    }

    /// Lexicographically largest infinite continuation from `state`.
    pub fn lexmax(&self, state: StateId) -> EventuallyPeriodicSeq {
        self.greedy(state, 1)
    }

    pub fn extremal_continuations(&self, state: StateId) -> (EventuallyPeriodicSeq, EventuallyPeriodicSeq) {
        (self.lexmin(state), self.lexmax(state))
    }
}

/// Outcome of [`smallest_gamma`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaSearchResult {
    pub level: usize,
    pub gamma: EventuallyPeriodicSeq,
    /// Digits fixed by the descent before the tail was emitted.
    pub depth: usize,
    /// `(γ)_{q_{n-1}} > x` was certified.
    pub certified: bool,
}

/// The lexicographically smallest member `γ` of the level-`n` family with
/// `(γ)_{q_{n-1}} > x`.
///
/// Digits are fixed one at a time. A digit is kept when the largest member
/// continuing the new prefix still has value above `x` at `q_{n-1}`; the
/// descent stops as soon as the smallest member continuing the prefix has
/// value above `x`. Pruning relies on values being non-decreasing in
/// lexicographic order at `q_{n-1}`; only the final inequality is
/// certified, and it is certified strictly.
///
/// At level 1, `q_0 = 1` and every member other than `0^∞` has infinite
/// value, so the answer is always `1^∞`.
pub fn smallest_gamma(
    automaton: &FamilyAutomaton,
    x: &ExactReal,
    policy: PrecisionPolicy,
    max_depth: usize,
) -> Result<GammaSearchResult, FamilyError> {
    let level = automaton.level();
    if level == 1 {
        return Ok(GammaSearchResult { level, gamma: EventuallyPeriodicSeq::constant(1), depth: 0, certified: true });
    }
    let base = SeriesBase::Level(level - 1);
    let exceeds = |seq: &EventuallyPeriodicSeq| -> Result<bool, FamilyError> {
        Ok(x.compare_series(seq, base, policy)? == std::cmp::Ordering::Less)
    };

    let mut state = automaton.start();
    let mut prefix = BinaryWord::empty();
    for depth in 0..=max_depth {
        let candidate = automaton.lexmin(state).prepend(&prefix);
        if exceeds(&candidate)? {
            return Ok(GammaSearchResult { level, gamma: candidate, depth, certified: true });
        }
        let mut chosen = None;
        for digit in 0..2u8 {
            let Some(next) = automaton.step(state, digit) else { continue };
            let mut extended = prefix.clone();
            extended.push(digit);
            if exceeds(&automaton.lexmax(next).prepend(&extended))? {
                chosen = Some((extended, next));
                break;
            }
        }
        match chosen {
            Some((extended, next)) => {
                prefix = extended;
                state = next;
            }
            None => {
                return Err(FamilyError::NotFound {
                    depth,
                    reason: format!("no level-{level} member exceeds {x} at q_{}", level - 1),
                })
            }
        }
    }
    Err(FamilyError::DepthExceeded { depth: max_depth })
}
