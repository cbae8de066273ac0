//! Spiral trajectories, the plain Collatz reference, and the check that the
//! two agree on every `6x +- 1` start.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spiral::{encode, SpiralValue};
use crate::step::next;

/// Step budget used when the caller has no opinion.
pub const DEFAULT_BUDGET: u64 = 100_000;

/// `n/2` for even `n`, `3n + 1` for odd `n`.
pub fn collatz_step(n: &BigInt) -> Result<BigInt> {
    if !n.is_positive() {
        return Err(Error::NonPositive(n.clone()));
    }
    Ok(if n.is_even() { n >> 1 } else { n * 3 + 1 })
}

/// How an iteration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Reached,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollatzTrajectory {
    #[serde(serialize_with = "crate::serde_util::int")]
    pub start: BigInt,
    #[serde(serialize_with = "crate::serde_util::ints")]
    pub iterates: Vec<BigInt>,
    pub outcome: Outcome,
}

/// Full Collatz trajectory from `n` down to 1, at most `budget` steps.
pub fn collatz_trajectory(n: &BigInt, budget: u64) -> Result<CollatzTrajectory> {
    let mut cur = n.clone();
    let mut iterates = vec![cur.clone()];
    let mut steps = 0;
    while !cur.is_one() {
        if steps == budget {
            return Ok(CollatzTrajectory {
                start: n.clone(),
                iterates,
                outcome: Outcome::BudgetExhausted,
            });
        }
        cur = collatz_step(&cur)?;
        iterates.push(cur.clone());
        steps += 1;
    }
    Ok(CollatzTrajectory {
        start: n.clone(),
        iterates,
        outcome: Outcome::Reached,
    })
}

/// The odd values of the Collatz trajectory of `n` (which must be 1 or `+-1 mod 6`), ending at 1.
///
/// `budget` bounds the number of plain Collatz steps.
pub fn odd_trajectory(n: &BigInt, budget: u64) -> Result<Vec<BigInt>> {
    encode(n)?;
    let mut cur = n.clone();
    let mut odds = vec![cur.clone()];
    let mut steps = 0u64;
    while !cur.is_one() {
        cur = collatz_step(&cur)?;
        steps += 1;
        if cur.is_odd() {
            odds.push(cur.clone());
        }
        if steps >= budget && !cur.is_one() {
            return Err(Error::OutOfRange {
                name: "budget",
                min: steps + 1,
                got: budget,
            });
        }
    }
    Ok(odds)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpiralTrajectory {
    pub start: SpiralValue,
    pub steps: Vec<SpiralValue>,
    pub outcome: Outcome,
}

impl SpiralTrajectory {
    pub fn reached_root(&self) -> bool {
        self.outcome == Outcome::Reached
    }

    pub fn decoded(&self) -> Vec<BigInt> {
        self.steps.iter().map(SpiralValue::decode).collect()
    }
}

/// Iterates `next` from `v` until 0, taking at most `budget` steps.
pub fn spiral_trajectory(v: &SpiralValue, budget: u64) -> Result<SpiralTrajectory> {
    if budget == 0 {
        return Err(Error::OutOfRange {
            name: "budget",
            min: 1,
            got: 0,
        });
    }
    let mut steps = vec![v.clone()];
    let mut cur = v.clone();
    let mut taken = 0;
    while !cur.is_zero() {
        if taken == budget {
            return Ok(SpiralTrajectory {
                start: v.clone(),
                steps,
                outcome: Outcome::BudgetExhausted,
            });
        }
        cur = next(&cur);
        steps.push(cur.clone());
        taken += 1;
    }
    Ok(SpiralTrajectory {
        start: v.clone(),
        steps,
        outcome: Outcome::Reached,
    })
}

/// Result of comparing the decoded spiral trajectory with the odd Collatz values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    #[serde(serialize_with = "crate::serde_util::int")]
    pub n: BigInt,
    pub holds: bool,
    #[serde(serialize_with = "crate::serde_util::ints")]
    pub spiral_decoded: Vec<BigInt>,
    #[serde(serialize_with = "crate::serde_util::ints")]
    pub collatz_odds: Vec<BigInt>,
}

/// Checks that decoding the spiral trajectory of `n` gives the odd Collatz iterates of `n`.
///
/// A spiral trajectory that exhausts `budget` is reported as an error.
pub fn verify_equivalence(n: &BigInt, budget: u64) -> Result<Equivalence> {
    let start = encode(n)?;
    let spiral = spiral_trajectory(&start, budget)?;
    if !spiral.reached_root() {
        return Err(Error::OutOfRange {
            name: "budget",
            min: budget + 1,
            got: budget,
        });
    }
    // each odd step costs at least two plain steps, plus the halvings
    let collatz_odds = odd_trajectory(n, budget.saturating_mul(64))?;
    let spiral_decoded = spiral.decoded();
    Ok(Equivalence {
        n: n.clone(),
        holds: spiral_decoded == collatz_odds,
        spiral_decoded,
        collatz_odds,
    })
}

/// Outcome of a range sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub checked: u64,
    pub failed: u64,
    /// Smallest failing starts with their evidence, at most [`SweepReport::MAX_WITNESSES`].
    pub witnesses: Vec<Equivalence>,
    /// Starts whose trajectory did not finish within the budget.
    #[serde(serialize_with = "crate::serde_util::ints")]
    pub exhausted: Vec<BigInt>,
}

impl SweepReport {
    pub const MAX_WITNESSES: usize = 16;

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    fn merge(mut self, mut other: SweepReport) -> SweepReport {
        self.checked += other.checked;
        self.failed += other.failed;
        self.witnesses.append(&mut other.witnesses);
        self.witnesses.sort_by(|a, b| a.n.cmp(&b.n));
        self.witnesses.truncate(Self::MAX_WITNESSES);
        self.exhausted.append(&mut other.exhausted);
        self.exhausted.sort();
        self.exhausted.truncate(Self::MAX_WITNESSES);
        self
    }
}

/// Every `n < max` with `n = +-1 (mod 6)`, ascending.
pub fn six_x_pm_one_below(max: u64) -> impl Iterator<Item = u64> {
    (1..max).filter(|n| matches!(n % 6, 1 | 5))
}

/// Checks the equivalence for every `n = +-1 (mod 6)` with `n < max`, over `jobs` workers.
pub fn sweep(max: u64, budget: u64, jobs: usize) -> SweepReport {
    let check = |n: u64| -> SweepReport {
        let n = BigInt::from(n);
        match verify_equivalence(&n, budget) {
            Ok(eq) if eq.holds => SweepReport {
                checked: 1,
                ..Default::default()
            },
            Ok(eq) => SweepReport {
                checked: 1,
                failed: 1,
                witnesses: vec![eq],
                exhausted: vec![],
            },
            Err(_) => SweepReport {
                checked: 1,
                failed: 1,
                witnesses: vec![],
                exhausted: vec![n],
            },
        }
    };
    if jobs <= 1 {
        return six_x_pm_one_below(max)
            .map(check)
            .fold(SweepReport::default(), SweepReport::merge);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| {
        // chunk over a plain range so workers split evenly
        let blocks = max.div_ceil(6);
        (0..blocks)
            .into_par_iter()
            .flat_map_iter(|b| [6 * b + 1, 6 * b + 5].into_iter().filter(|&n| n < max))
            .map(check)
            .reduce(SweepReport::default, SweepReport::merge)
    })
}

/// Walks the Collatz map from `n` to the first value that is 1 or `+-1 mod 6`.
///
/// Odd multiples of 3 have no spiral representation; their trajectories enter the spiral here.
pub fn enter_spiral(n: &BigInt, budget: u64) -> Result<(Vec<BigInt>, SpiralValue)> {
    let mut prefix = Vec::new();
    let mut cur = n.clone();
    for _ in 0..=budget {
        if let Ok(v) = encode(&cur) {
            return Ok((prefix, v));
        }
        prefix.push(cur.clone());
        cur = collatz_step(&cur)?;
    }
    Err(Error::OutOfRange {
        name: "budget",
        min: budget + 1,
        got: budget,
    })
}

/// Rows `x = 1..=x_max`: `6x + 1` followed by its first `i_max` Collatz iterates.
pub fn iterates_table(x_max: u64, i_max: u64) -> Result<Vec<Vec<BigInt>>> {
    if x_max == 0 || i_max == 0 {
        return Err(Error::OutOfRange {
            name: if x_max == 0 { "x_max" } else { "i_max" },
            min: 1,
            got: 0,
        });
    }
    (1..=x_max)
        .map(|x| {
            let mut row = Vec::with_capacity(i_max as usize + 1);
            let mut cur = BigInt::from(6 * x + 1);
            row.push(cur.clone());
            for _ in 0..i_max {
                cur = collatz_step(&cur)?;
                row.push(cur.clone());
            }
            Ok(row)
        })
        .collect()
}

pub fn iterates_table_csv(rows: &[Vec<BigInt>]) -> String {
    let width = rows.first().map_or(0, |r| r.len());
    let mut out = String::from("x,6x+1");
    for i in 1..width {
        out.push_str(&format!(",T^{i}"));
    }
    out.push('\n');
    for (x, row) in rows.iter().enumerate() {
        out.push_str(&(x + 1).to_string());
        for v in row {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}
