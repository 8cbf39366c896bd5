//! Exit criteria. Each criterion prints one `PASS`/`FAIL` line; the test
//! fails if any criterion does.
//!
//! Reference decimals marked "reference" were computed once with a separate
//! mpmath script (direct root finding on the defining series) and frozen.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use univoque::bases::{kl_interval, level_interval, quasi_greedy_alpha, Base, BaseLadder, ExactReal, SeriesBase};
use univoque::cli::{constants_table, FigureSample};
use univoque::family::{smallest_gamma, FamilyAutomaton, FamilyError, DEFAULT_MAX_DEPTH};
use univoque::oracle::{expansion_branches, rational_below, verify_uniqueness_at, BranchVerdict, UniquenessVerdict};
use univoque::precise::{parse_exact, with_precision, PreciseReal, PrecisionPolicy};
use univoque::solver::{
    classify, exceptional_points, midband_value, qs, z1, z1k, zn, Class, Classification, GapIntervals, SolvePath,
    SolverOptions,
};
use univoque::words::{lex_compare, thue_morse_range, BinaryWord, EventuallyPeriodicSeq};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rat(s: &str) -> BigRational {
    parse_exact(s).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn value(name: &str, rows: &[univoque::cli::ConstantRow]) -> f64 {
    rows.iter().find(|r| r.name == name).unwrap().value.parse().unwrap()
}

/// Random rational in `[lo, hi)` with denominator `10^9`.
fn random_rational(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> BigRational {
    let lo_n = (lo * 1e9).ceil() as i64;
    let hi_n = (hi * 1e9).floor() as i64;
    BigRational::new(BigInt::from(rng.gen_range(lo_n..hi_n)), BigInt::from(1_000_000_000i64))
}

fn f64_of(r: &BigRational) -> f64 {
    ExactReal::Rational(r.clone()).to_f64()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rows = constants_table(6, &SolverOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let q1 = value("q_1", &rows);
    let q2 = value("q_2", &rows);
    let kl = value("q_KL", &rows);
    let z2 = value("z_2", &rows);
    ensure((q1 - golden).abs() < 1e-10, || format!("q_1 = {q1}"))?;
    ensure((q2 - 1.75488).abs() < 5e-6, || format!("q_2 = {q2}"))?;
    ensure((kl - 1.78723).abs() < 5e-6, || format!("q_KL = {kl}"))?;
    ensure((z2 - 1.0507).abs() < 5e-5, || format!("z_2 = {z2}"))?;
    // reference
    ensure((q2 - 1.754_877_666_246_693).abs() < 1e-15, || format!("q_2 = {q2} against reference"))?;
    ensure((kl - 1.787_231_650_182_966).abs() < 1e-15, || format!("q_KL = {kl} against reference"))?;
    ensure(elapsed < 5.0, || format!("took {elapsed:.2} s"))?;
    Ok(format!("q_1 {q1:.12}, q_2 {q2:.8}, q_KL {kl:.8}, z_2 {z2:.6} in {elapsed:.2} s"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let printed = [(0.618034, 0.814527), (0.381966, 0.455748), (0.236068, 0.255002)];
    let gaps = GapIntervals::new();
    let mut shown = Vec::new();
    for (k, (l, r)) in printed.iter().enumerate() {
        let (left, right) = gaps.endpoints(k + 1);
        let (a, b) = (left.to_f64(), right.to_f64());
        ensure((a - l).abs() <= 5e-7 && (b - r).abs() <= 5e-7, || format!("gap {}: [{a}, {b})", k + 1))?;
        shown.push(format!("[{a:.6}, {b:.6})"));
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 5.0, || format!("took {elapsed:.2} s"))?;
    Ok(format!("{} in {elapsed:.2} s", shown.join(" ")))
}

fn criterion_3() -> Outcome {
    let one = qs(&ExactReal::parse("1").unwrap(), &SolverOptions::default()).map_err(|e| e.to_string())?;
    ensure(one.classification == Classification::EqualKL, || format!("q_s(1): {}", one.classification))?;
    let options = SolverOptions { precision_cap: 256, ..SolverOptions::default() };
    for (i, point) in exceptional_points().iter().enumerate().skip(1) {
        let r = qs(point, &options).map_err(|e| e.to_string())?;
        ensure(r.classification == Classification::EqualKL, || format!("{point}: {}", r.classification))?;
        ensure(r.exceptional == Some(i), || format!("{point}: exceptional {:?}", r.exceptional))?;
    }
    Ok("1 and the three series values at q_KL classify EqualKL (cap 256 bits)".into())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let general = SolverOptions::general();
    let z1 = z1().to_f64();
    let mut worst = 0f64;
    for _ in 0..200 {
        let x = random_rational(&mut rng, z1 + 1e-9, 10.0);
        let r = qs(&ExactReal::Rational(x.clone()), &general).map_err(|e| e.to_string())?;
        ensure(r.path == SolvePath::General, || format!("{x}: path {}", r.path))?;
        let closed = 1.0 / f64_of(&x) + 1.0;
        let err = (r.qs.as_ref().unwrap().to_f64() - closed).abs();
        worst = worst.max(err);
        ensure(err <= 2e-12, || format!("x = {x}: general {} vs closed form {closed}", r.qs.unwrap().to_f64()))?;
    }
    let two = qs(&ExactReal::parse("2").unwrap(), &SolverOptions::default()).map_err(|e| e.to_string())?;
    let q = two.qs.unwrap();
    ensure(q.enclosure().contains_rational(&rat("1.5")), || format!("q_s(2) = {}", q.enclosure()))?;
    let q_general = qs(&ExactReal::parse("2").unwrap(), &general).map_err(|e| e.to_string())?.qs.unwrap();
    ensure((q_general.to_f64() - 1.5).abs() <= 1e-12, || format!("general q_s(2) = {}", q_general.to_f64()))?;
    Ok(format!("200 samples, max deviation {worst:.1e}; q_s(2) = 1.5"))
}

/// Root of `(1^{k+1}(01)^∞)_q = x` by plain bisection on `[q_1, q_2]`.
fn midband_bisect(k: usize, x: &BigRational) -> f64 {
    let (mut lo, mut hi) = (rat("1.618"), rat("1.7549"));
    let two = BigRational::from_integer(2.into());
    let x_enc = x.clone();
    for _ in 0..60 {
        let mid = (&lo + &hi) / &two;
        // value = Σ_{i=1}^{k+1} q^{-i} + q^{-(k+1)} / (q^2 - 1), decreasing in q
        let inv = BigRational::from_integer(1.into()) / &mid;
        let mut term = BigRational::from_integer(1.into());
        let mut v = BigRational::from_integer(0.into());
        for _ in 0..=k {
            term = &term * &inv;
            v += &term;
        }
        v += &term / (&mid * &mid - BigRational::from_integer(1.into()));
        if v > x_enc {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    f64_of(&((lo + hi) / two))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let general = SolverOptions::general();
    let (z2, z1) = (zn(2).unwrap().to_f64(), z1().to_f64());
    let cuts: Vec<f64> = (1..=60).map(|k| z1k(k).to_f64()).collect();
    let mut worst = 0f64;
    let mut cells = BTreeSet::new();
    for _ in 0..200 {
        let x = random_rational(&mut rng, z2 + 1e-9, z1 - 1e-9);
        let xf = f64_of(&x);
        // z_{1,k} ≤ x < z_{1,k+1}
        let k = cuts.iter().rposition(|&c| c <= xf).unwrap() + 1;
        cells.insert(k);
        let r = qs(&ExactReal::Rational(x.clone()), &general).map_err(|e| e.to_string())?;
        let expected = EventuallyPeriodicSeq::new(BinaryWord::repeat_digit(1, k + 1), "01".parse().unwrap()).unwrap();
        ensure(r.gamma.as_ref() == Some(&expected), || format!("x = {x}: gamma {:?}, expected {expected}", r.gamma))?;
        let direct = midband_bisect(k, &x);
        let err = (r.qs.as_ref().unwrap().to_f64() - direct).abs();
        worst = worst.max(err);
        ensure(err <= 2e-12, || format!("x = {x}: {} vs bisection {direct}", r.qs.unwrap().to_f64()))?;
    }
    // the solver's own mid-band equation agrees too
    let q = PreciseReal::from_rational(&rat("1.7"));
    let v = midband_value(1, &q).map_err(|e| e.to_string())?.to_f64();
    let w = 1.0 / 1.7 + 1.0 / (1.7f64 * 1.7) + 1.0 / (1.7f64 * 1.7 * (1.7 * 1.7 - 1.0));
    ensure((v - w).abs() < 1e-12, || format!("mid-band value {v} vs {w}"))?;
    Ok(format!("200 samples over partition cells {cells:?}, max deviation {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("figure.csv");
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_univoque"))
        .args(["figure", "--from", "1.0507", "--to", "2", "--samples", "400", "--out"])
        .arg(&path)
        .status()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(status.success(), || format!("exit status {status}"))?;
    ensure(elapsed < 60.0, || format!("took {elapsed:.1} s"))?;
    let mut reader = csv::Reader::from_path(&path).map_err(|e| e.to_string())?;
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    ensure(headers.iter().collect::<Vec<_>>() == ["x", "q_s", "level", "gamma", "class"], || format!("{headers:?}"))?;
    let rows: Vec<FigureSample> = reader.deserialize().collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    ensure(rows.len() == 400, || format!("{} rows", rows.len()))?;

    let ladder = BaseLadder::shared(128).map_err(|e| e.to_string())?;
    let (q1, q2, q3) = (ladder.level(1).to_f64(), ladder.level(2).to_f64(), ladder.level(3).to_f64());
    let (z1, z2) = (z1().to_f64(), zn(2).unwrap().to_f64());
    let mut below_z2 = 0;
    let mut prev: Option<(String, f64)> = None;
    for r in &rows {
        let x: f64 = r.x.parse().unwrap();
        let q: f64 = r.q_s.parse().map_err(|_| format!("x = {}: q_s {:?} ({})", r.x, r.q_s, r.class))?;
        if x < z2 {
            // below z_2 the answer belongs to the next level up
            below_z2 += 1;
            ensure(q > q2 && q <= q3 + 1e-9, || format!("x = {x} < z_2: q_s = {q}"))?;
        } else if x < z1 {
            ensure(q > q1 - 1e-9 && q <= q2 + 1e-9, || format!("x = {x}: q_s = {q}"))?;
        } else {
            ensure((q - (1.0 / x + 1.0)).abs() <= 1e-9, || format!("x = {x}: q_s = {q}"))?;
        }
        if let Some((gamma, last)) = &prev {
            if *gamma == r.gamma {
                ensure(q <= *last, || format!("x = {x}: q_s rises within a cell"))?;
            }
        }
        prev = Some((r.gamma.clone(), q));
    }
    Ok(format!(
        "400 rows in {elapsed:.1} s; {below_z2} sample(s) below z_2 = {z2:.7} checked against (q_2, q_3]"
    ))
}

fn criterion_7() -> Outcome {
    for n in 1..=6 {
        let count = 3 << n;
        let alpha = quasi_greedy_alpha(&Base::level(n).unwrap(), count).map_err(|e| e.to_string())?;
        let expected = thue_morse_range(1, 1 << n).minus().unwrap().power(3);
        ensure(alpha == expected, || format!("n = {n}: {alpha} vs {expected}"))?;
    }
    Ok("alpha(q_n) = (tau_1..tau_{2^n}^-)^inf for n = 1..6 over 3*2^n digits".into())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let options = SolverOptions::default();
    let ranges = [(0.2551, 0.3819), (0.4558, 0.6180), (0.8146, 3.0)];
    let offset = rat("0.01");
    let mut checked = 0;
    let mut multiple = 0;
    while checked < 50 {
        let (lo, hi) = ranges[rng.gen_range(0..ranges.len())];
        let x = ExactReal::Rational(random_rational(&mut rng, lo, hi));
        let r = qs(&x, &options).map_err(|e| format!("{x}: {e}"))?;
        if r.classification != Classification::BelowKL {
            continue;
        }
        let (gamma, level, root) = (r.gamma.unwrap(), r.level.unwrap(), r.qs.unwrap());
        let verdict = verify_uniqueness_at(&x, &gamma, level, &root, 60).map_err(|e| e.to_string())?;
        ensure(verdict == UniquenessVerdict::Pass, || format!("x = {x}: {verdict:?}"))?;
        let below = Base::Rational(rational_below(&root, &offset));
        let branches = expansion_branches(&x, &below, 60).map_err(|e| e.to_string())?;
        ensure(matches!(branches, BranchVerdict::Multiple { .. } | BranchVerdict::Infeasible), || {
            format!("x = {x} at q_s - 0.01: {branches}")
        })?;
        multiple += matches!(branches, BranchVerdict::Multiple { .. }) as usize;
        checked += 1;
    }
    let gaps = GapIntervals::new();
    for k in 1..=3 {
        let (l, r) = gaps.endpoints(k);
        for _ in 0..20 {
            let x = ExactReal::Rational(random_rational(&mut rng, l.to_f64() + 1e-8, r.to_f64() - 1e-8));
            let c = classify(&x, &options).map_err(|e| e.to_string())?;
            ensure(c == Class::InGap(k), || format!("x = {x}: {c:?}"))?;
            let res = qs(&x, &options).map_err(|e| e.to_string())?;
            ensure(res.classification == Classification::AboveKL, || format!("x = {x}: {}", res.classification))?;
        }
    }
    Ok(format!("50 BelowKL results verified ({multiple} Multiple below q_s); 60 gap samples AboveKL"))
}

fn criterion_9() -> Outcome {
    let policy = PrecisionPolicy::default();
    let cmp = |a: &ExactReal, b: &ExactReal| a.compare(b, policy).map_err(|e| e.to_string());
    let one = ExactReal::parse("1").unwrap();
    let z: Vec<ExactReal> = (1..=10).map(|n| zn(n).unwrap()).collect();
    for n in 0..9 {
        ensure(cmp(&z[n], &z[n + 1])? == Ordering::Greater, || format!("z_{} <= z_{}", n + 1, n + 2))?;
    }
    for (n, zn) in z.iter().enumerate() {
        ensure(cmp(zn, &one)? == Ordering::Greater, || format!("z_{} <= 1", n + 1))?;
    }
    ensure(cmp(&z[9], &z[1])? == Ordering::Less, || "z_10 >= z_2".into())?;
    let w: Vec<ExactReal> = (1..=20).map(z1k).collect();
    for k in 0..19 {
        ensure(cmp(&w[k], &w[k + 1])? == Ordering::Less, || format!("z_1,{} >= z_1,{}", k + 1, k + 2))?;
    }
    ensure(cmp(&w[19], &z1())? == Ordering::Less, || "z_1,20 >= z_1".into())?;
    ensure(cmp(&w[0], &one)? == Ordering::Equal, || "z_1,1 != 1".into())?;
    ensure(cmp(&one, &z[1])? == Ordering::Less && cmp(&z[1], &w[1])? == Ordering::Less, || {
        "1 < z_2 < z_1,2 fails".into()
    })?;
    // z_10 - 1 is far below double precision; show the certified gap
    let gap = with_precision(4096, || (&z[9].enclosure().unwrap() - &PreciseReal::one()).lo().to_f64()).unwrap();
    Ok(format!("z_1 > ... > z_10 > 1 (z_10 - 1 = {gap:.2e}), z_1,k increasing to k = 20, z_1,1 = 1 < z_2 < z_1,2"))
}

fn seq(pre: &str, cyc: &str) -> EventuallyPeriodicSeq {
    EventuallyPeriodicSeq::from_parts(pre, cyc).unwrap()
}

/// Members of the explicit lists for levels 1 to 3 with bounded exponents.
fn explicit_members(level: usize, bound: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut add = |s: EventuallyPeriodicSeq| {
        out.insert(s.reflect().to_string());
        out.insert(s.to_string());
    };
    add(seq("", "0"));
    if level >= 2 {
        for a in 0..=bound {
            add(seq(&"0".repeat(a), "10"));
        }
    }
    if level >= 3 {
        for a in 0..=bound {
            for b in 0..=bound {
                add(seq(&format!("{}{}", "0".repeat(a), "10".repeat(b)), "1100"));
            }
        }
    }
    out
}

fn all_words(max_len: usize) -> Vec<String> {
    let mut words = vec![String::new()];
    for len in 1..=max_len {
        for bits in 0..(1u32 << len) {
            words.push((0..len).map(|i| if bits >> (len - 1 - i) & 1 == 1 { '1' } else { '0' }).collect());
        }
    }
    words
}

fn criterion_10() -> Outcome {
    let mut candidates = BTreeSet::new();
    let words = all_words(6);
    for pre in &words {
        for cyc in words.iter().filter(|w| !w.is_empty() && w.len() <= 4) {
            candidates.insert(seq(pre, cyc).to_string());
        }
    }
    let mut members = Vec::new();
    for n in 1..=3 {
        let automaton = FamilyAutomaton::build(n).map_err(|e| e.to_string())?;
        let listed = explicit_members(n, 12);
        let mut count = 0;
        for c in &candidates {
            let s: EventuallyPeriodicSeq = c.parse().unwrap();
            let expected = listed.contains(c);
            ensure(automaton.is_member(&s) == expected, || format!("level {n}: {c} expected member = {expected}"))?;
            count += expected as usize;
        }
        members.push(count);
    }

    // smallest member above x at q_{n-1}, by enumeration
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let policy = PrecisionPolicy::default();
    let mut found = 0;
    for i in 0..100 {
        let n = 2 + i % 2;
        let x = ExactReal::Rational(random_rational(&mut rng, 0.1, 1.5));
        let automaton = FamilyAutomaton::shared(n).map_err(|e| e.to_string())?;
        let mut listed: Vec<EventuallyPeriodicSeq> =
            explicit_members(n, 8).iter().map(|s| s.parse().unwrap()).collect();
        listed.sort_by(lex_compare);
        let base = SeriesBase::Level(n - 1);
        let mut brute = None;
        for s in &listed {
            let v = ExactReal::series(s.clone(), base);
            if v.compare(&x, policy).map_err(|e| e.to_string())? == Ordering::Greater {
                brute = Some(s.clone());
                break;
            }
        }
        let got = match smallest_gamma(&automaton, &x, policy, DEFAULT_MAX_DEPTH) {
            Ok(r) => Some(r.gamma),
            Err(FamilyError::NotFound { .. }) => None,
            Err(e) => return Err(format!("x = {x}: {e}")),
        };
        ensure(got == brute, || format!("level {n}, x = {x}: search {got:?}, enumeration {brute:?}"))?;
        found += got.is_some() as usize;
    }
    Ok(format!(
        "{} candidates; members at levels 1..3: {:?}; smallest_gamma agrees on 100 samples ({found} found)",
        candidates.len(),
        members
    ))
}

#[test]
fn acceptance_criteria() {
    // sanity: the ladder endpoints bracket what the criteria assume
    let kl = kl_interval(128).unwrap();
    assert!(level_interval(2, 128).unwrap().hi < kl.lo);
    assert_eq!(ExactReal::parse("1").unwrap().compare(&z1k(1), PrecisionPolicy::default()), Ok(Ordering::Equal));

    let criteria: [Criterion; 10] = [
        ("constants table", criterion_1),
        ("gap endpoints", criterion_2),
        ("exceptional points", criterion_3),
        ("closed form for x >= z_1", criterion_4),
        ("mid-band closed form", criterion_5),
        ("figure data", criterion_6),
        ("quasi-greedy expansion of 1 at q_n", criterion_7),
        ("oracle cross-validation", criterion_8),
        ("threshold ladders", criterion_9),
        ("family automaton", criterion_10),
    ];
    let mut failed = Vec::new();
    let stderr = std::io::stderr();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let line = match &outcome {
            Ok(detail) => format!("PASS  {:>2}. {name}: {detail} [{secs:.2} s]", i + 1),
            Err(why) => format!("FAIL  {:>2}. {name}: {why} [{secs:.2} s]", i + 1),
        };
        // written straight to the handle so the lines show without --nocapture
        let _ = writeln!(stderr.lock(), "{line}");
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
