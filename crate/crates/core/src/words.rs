//! Binary words, eventually periodic binary sequences and the Thue-Morse
//! sequence.
//!
//! Every infinite sequence handled by this crate is eventually periodic, so
//! it is stored as a finite preamble followed by a repeated cycle. Values are
//! kept in canonical form (minimal preamble, primitive cycle), which makes
//! equality structural: two sequences with the same digit stream compare
//! equal with `==` and hash identically.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

/// Largest Thue-Morse prefix that [`thue_morse_prefix`] will build.
pub const THUE_MORSE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("digit {0} is not binary")]
    InvalidDigit(u8),
    #[error("`{op}` needs a word ending in {expected}")]
    Domain { op: &'static str, expected: u8 },
    #[error("cycle must be nonempty")]
    EmptyCycle,
    #[error("requested {requested} Thue-Morse digits, cap is {cap}")]
    TooLarge { requested: usize, cap: usize },
    #[error("cannot parse sequence `{0}`: expected PREAMBLE(CYCLE)^inf")]
    Parse(String),
}

/// A finite word over `{0, 1}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryWord(Vec<u8>);

impl BinaryWord {
    pub fn new(digits: Vec<u8>) -> Result<Self, WordError> {
        if let Some(&d) = digits.iter().find(|&&d| d > 1) {
            return Err(WordError::InvalidDigit(d));
        }
        Ok(BinaryWord(digits))
    }

    pub fn empty() -> Self {
        BinaryWord(Vec::new())
    }

    /// `digit` repeated `count` times.
    pub fn repeat_digit(digit: u8, count: usize) -> Self {
        assert!(digit <= 1, "digit must be binary");
        BinaryWord(vec![digit; count])
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    /// Digit-wise complement `1 - d`.
    pub fn reflect(&self) -> Self {
        BinaryWord(self.0.iter().map(|d| 1 - d).collect())
    }

    /// Decrements the last digit, which must be 1.
    pub fn minus(&self) -> Result<Self, WordError> {
        match self.last() {
            Some(1) => {
                let mut digits = self.0.clone();
                *digits.last_mut().unwrap() = 0;
                Ok(BinaryWord(digits))
            }
            _ => Err(WordError::Domain { op: "minus", expected: 1 }),
        }
    }

    /// Increments the last digit, which must be 0.
    pub fn plus(&self) -> Result<Self, WordError> {
        match self.last() {
            Some(0) => {
                let mut digits = self.0.clone();
                *digits.last_mut().unwrap() = 1;
                Ok(BinaryWord(digits))
            }
            _ => Err(WordError::Domain { op: "plus", expected: 0 }),
        }
    }

    /// The word concatenated with itself `times` times.
    pub fn power(&self, times: usize) -> Self {
        BinaryWord(self.0.repeat(times))
    }

    pub fn concat(&self, other: &BinaryWord) -> Self {
        let mut digits = self.0.clone();
        digits.extend_from_slice(&other.0);
        BinaryWord(digits)
    }

    pub fn push(&mut self, digit: u8) {
        assert!(digit <= 1, "digit must be binary");
        self.0.push(digit);
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&d| d == 1).count()
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for BinaryWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .trim()
            .bytes()
            .map(|b| match b {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(WordError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BinaryWord(digits))
    }
}

/// The Thue-Morse digit `τ_index`: parity of the number of ones in the
/// binary representation of `index`.
pub fn thue_morse_digit(index: u64) -> u8 {
    (index.count_ones() & 1) as u8
}

/// `τ_0 τ_1 ⋯ τ_{n-1}`, built by repeated doubling: the block of length
/// `2^{k+1}` is the block of length `2^k` followed by its reflection.
pub fn thue_morse_prefix(n: usize) -> Result<BinaryWord, WordError> {
    if n > THUE_MORSE_CAP {
        return Err(WordError::TooLarge { requested: n, cap: THUE_MORSE_CAP });
    }
    let mut digits = Vec::with_capacity(n.next_power_of_two().max(1));
    digits.push(0u8);
    while digits.len() < n {
        let reflected: Vec<u8> = digits.iter().map(|d| 1 - d).collect();
        digits.extend(reflected);
    }
    digits.truncate(n);
    Ok(BinaryWord(digits))
}

/// `τ_from ⋯ τ_to` (inclusive on both ends).
pub fn thue_morse_range(from: usize, to: usize) -> BinaryWord {
    BinaryWord((from..=to).map(|i| thue_morse_digit(i as u64)).collect())
}

/// An infinite binary sequence `preamble · cycle^∞` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodicSeq {
    preamble: BinaryWord,
    cycle: BinaryWord,
}

impl EventuallyPeriodicSeq {
    /// Builds and canonicalizes `preamble · cycle^∞`.
    pub fn new(preamble: BinaryWord, cycle: BinaryWord) -> Result<Self, WordError> {
        if cycle.is_empty() {
            return Err(WordError::EmptyCycle);
        }
        Ok(Self::canonical(preamble.0, cycle.0))
    }

    /// `cycle^∞`.
    pub fn periodic(cycle: BinaryWord) -> Result<Self, WordError> {
        Self::new(BinaryWord::empty(), cycle)
    }

    /// `d^∞` for a single digit.
    pub fn constant(digit: u8) -> Self {
        Self::canonical(Vec::new(), vec![digit])
    }

    /// Convenience constructor from digit strings, e.g. `("11", "01")`.
    pub fn from_parts(preamble: &str, cycle: &str) -> Result<Self, WordError> {
        Self::new(preamble.parse()?, cycle.parse()?)
    }

    fn canonical(mut preamble: Vec<u8>, cycle: Vec<u8>) -> Self {
        let mut cycle = primitive_root(cycle);
        // Absorb trailing preamble digits into the cycle by rotating it.
        while let (Some(&p), Some(&c)) = (preamble.last(), cycle.last()) {
            if p != c {
                break;
            }
            preamble.pop();
            cycle.rotate_right(1);
        }
        EventuallyPeriodicSeq { preamble: BinaryWord(preamble), cycle: BinaryWord(cycle) }
    }

    pub fn preamble(&self) -> &BinaryWord {
        &self.preamble
    }

    pub fn cycle(&self) -> &BinaryWord {
        &self.cycle
    }

    /// Digit `d_{index+1}` (zero-based index into the stream).
    pub fn digit(&self, index: usize) -> u8 {
        let pre = self.preamble.len();
        if index < pre {
            self.preamble.0[index]
        } else {
            self.cycle.0[(index - pre) % self.cycle.len()]
        }
    }

    pub fn digits(&self) -> impl Iterator<Item = u8> + '_ {
        (0..).map(move |i| self.digit(i))
    }

    /// The first `count` digits.
    pub fn prefix(&self, count: usize) -> BinaryWord {
        BinaryWord(self.digits().take(count).collect())
    }

    pub fn reflect(&self) -> Self {
        Self::canonical(self.preamble.reflect().0, self.cycle.reflect().0)
    }

    /// `word · self`.
    pub fn prepend(&self, word: &BinaryWord) -> Self {
        Self::canonical(word.concat(&self.preamble).0, self.cycle.0.clone())
    }

    /// True when the sequence has only finitely many ones.
    pub fn is_finite_support(&self) -> bool {
        self.cycle.0.iter().all(|&d| d == 0)
    }

    /// Number of leading digits after which both sequences are known to be
    /// periodic with a common period.
    fn comparison_bound(&self, other: &Self) -> usize {
        let lcm = self.cycle.len().lcm(&other.cycle.len());
        self.preamble.len() + other.preamble.len() + lcm + self.cycle.len().max(other.cycle.len())
    }

    /// Exact lexicographic comparison of the digit streams.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        let bound = self.comparison_bound(other);
        for i in 0..bound {
            match self.digit(i).cmp(&other.digit(i)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

/// Lexicographic comparison of two eventually periodic sequences.
pub fn lex_compare(s: &EventuallyPeriodicSeq, t: &EventuallyPeriodicSeq) -> Ordering {
    s.lex_cmp(t)
}

fn primitive_root(cycle: Vec<u8>) -> Vec<u8> {
    let len = cycle.len();
    for period in 1..len {
        if len.is_multiple_of(period) && (period..len).all(|i| cycle[i] == cycle[i - period]) {
            return cycle[..period].to_vec();
        }
    }
    cycle
}

impl fmt::Display for EventuallyPeriodicSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})^inf", self.preamble, self.cycle)
    }
}

impl FromStr for EventuallyPeriodicSeq {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let err = || WordError::Parse(s.to_string());
        let body = text.strip_suffix(")^inf").ok_or_else(err)?;
        let (preamble, cycle) = body.split_once('(').ok_or_else(err)?;
        if cycle.is_empty() || cycle.contains(['(', ')']) {
            return Err(err());
        }
        let preamble: BinaryWord = preamble.parse().map_err(|_| err())?;
        let cycle: BinaryWord = cycle.parse().map_err(|_| err())?;
        Self::new(preamble, cycle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BinaryWord {
        s.parse().unwrap()
    }

    fn seq(s: &str) -> EventuallyPeriodicSeq {
        s.parse().unwrap()
    }

    #[test]
    fn thue_morse_first_digits() {
        assert_eq!(thue_morse_prefix(8).unwrap(), w("01101001"));
        assert_eq!(thue_morse_prefix(1).unwrap(), w("0"));
        let sixteen = thue_morse_prefix(16).unwrap();
        assert_eq!(&sixteen.digits()[8..], w("01101001").reflect().digits());
        for (i, &d) in sixteen.digits().iter().enumerate() {
            assert_eq!(d, (i as u32).count_ones() as u8 % 2);
        }
    }

    #[test]
    fn thue_morse_cap() {
        assert!(thue_morse_prefix(THUE_MORSE_CAP).is_ok());
        assert_eq!(
            thue_morse_prefix(THUE_MORSE_CAP + 1),
            Err(WordError::TooLarge { requested: THUE_MORSE_CAP + 1, cap: THUE_MORSE_CAP })
        );
    }

    #[test]
    fn reflection_and_last_digit_operators() {
        assert_eq!(w("110").reflect(), w("001"));
        assert_eq!(BinaryWord::empty().reflect(), BinaryWord::empty());
        assert_eq!(w("10010110").reflect().reflect(), w("10010110"));
        assert_eq!(w("1101").minus().unwrap(), w("1100"));
        assert_eq!(w("0010").plus().unwrap(), w("0011"));
        assert_eq!(thue_morse_range(1, 4), w("1101"));
        assert_eq!(thue_morse_range(1, 4).minus().unwrap(), w("1100"));
        assert!(matches!(w("10").minus(), Err(WordError::Domain { .. })));
        assert!(matches!(w("01").plus(), Err(WordError::Domain { .. })));
        assert!(BinaryWord::empty().minus().is_err());
        assert_eq!(BinaryWord::new(vec![0, 2]), Err(WordError::InvalidDigit(2)));
    }

    #[test]
    fn canonical_form() {
        let s = EventuallyPeriodicSeq::from_parts("0", "10").unwrap();
        assert_eq!(s, seq("(01)^inf"));
        assert_eq!(s.to_string(), "(01)^inf");
        assert_eq!(seq("1(0101)^inf"), seq("(10)^inf"));
        assert_eq!(seq("000(00)^inf").to_string(), "(0)^inf");
        assert_eq!(seq("11(01)^inf").to_string(), "1(10)^inf");
        assert_eq!(seq("1101(0)^inf").to_string(), "1101(0)^inf");
        assert!(EventuallyPeriodicSeq::from_parts("1", "").is_err());
    }

    #[test]
    fn lexicographic_examples() {
        assert_eq!(lex_compare(&seq("(10)^inf"), &seq("1(10)^inf")), Ordering::Less);
        assert_eq!(lex_compare(&seq("0(10)^inf"), &seq("(01)^inf")), Ordering::Equal);
        let s = seq("0110(011)^inf");
        assert_eq!(lex_compare(&s, &s), Ordering::Equal);
        // Streams that only differ far into the periodic part.
        let a = seq("(001)^inf");
        let b = seq("(00100)^inf");
        assert_eq!(lex_compare(&a, &b), a.prefix(40).cmp(&b.prefix(40)));
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "(10)", "10^inf", "1(2)^inf", "()^inf", "1((0))^inf"] {
            assert!(bad.parse::<EventuallyPeriodicSeq>().is_err(), "{bad}");
        }
    }
}
