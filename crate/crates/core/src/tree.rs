//! Predecessors under the step dynamics and the tree they form around 0.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spiral::SpiralValue;
use crate::step::{next_with_index, step_map, FamilyIndex, OutputFamily};

/// One predecessor: `next(value) = target` through `f_index`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Predecessor {
    pub index: FamilyIndex,
    pub value: SpiralValue,
}

/// All predecessors on one side: `(m 2^(6n+offset) + 2)/18` when positive, `(4 - m 2^(6n+offset))/18` otherwise, for `n >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedForm {
    /// Predecessors are positive (else non-positive).
    pub positive: bool,
    /// `|6 target - 1|`.
    #[serde(serialize_with = "crate::serde_util::int")]
    pub multiplier: BigInt,
    /// Smallest `|k|`; the others are `offset + 6n`.
    pub offset: u32,
    pub expression: String,
    #[serde(skip)]
    target_positive: bool,
}

impl ClosedForm {
    fn new(target: &SpiralValue, positive: bool) -> ClosedForm {
        let multiplier = (target.get() * BigInt::from(6) - 1u8).abs();
        let target_positive = target.is_positive();
        let offset = (1..=6u32)
            .find(|&k| closed_form_value(&multiplier, target_positive, positive, k).is_some())
            .expect("one offset per side works for every target");
        let power = format!("2^(6n+{offset})");
        let term = if multiplier.is_one() {
            power
        } else {
            format!("{multiplier}*{power}")
        };
        let expression = if positive {
            format!("({term} + 2)/18")
        } else {
            format!("(4 - {term})/18")
        };
        ClosedForm {
            positive,
            multiplier,
            offset,
            expression,
            target_positive,
        }
    }

    pub fn halvings(&self, n: u32) -> u32 {
        self.offset + 6 * n
    }

    pub fn index(&self, n: u32) -> FamilyIndex {
        let k = self.halvings(n) as i64;
        FamilyIndex::new(if self.positive { k } else { -k }).expect("nonzero")
    }

    pub fn value(&self, n: u32) -> BigInt {
        closed_form_value(&self.multiplier, self.target_positive, self.positive, self.halvings(n))
            .expect("offset class is integral")
    }
}

/// `(m 2^k + 2)/18` or `(4 - m 2^k)/18` when it is a predecessor through `f_k` or `f_-k`.
///
/// Solving `f_k(x) = t` gives these forms only when the coefficient sign
/// `(-1)^(k-1)` equals the sign of `6t - 1`, so `k` must be odd exactly for positive targets.
fn closed_form_value(multiplier: &BigInt, target_positive: bool, positive: bool, k: u32) -> Option<BigInt> {
    if (k % 2 == 1) != target_positive {
        return None;
    }
    let scaled = multiplier << k;
    let numerator = if positive { scaled + 2 } else { BigInt::from(4) - scaled };
    let (q, r) = numerator.div_mod_floor(&BigInt::from(18));
    let side_ok = if positive { q.is_positive() } else { !q.is_positive() };
    (r.is_zero() && side_ok).then_some(q)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredecessorFamily {
    pub target: SpiralValue,
    /// Ordered by `|k|`, positive side first; 0 is never listed as its own predecessor.
    pub entries: Vec<Predecessor>,
    pub closed_forms: [ClosedForm; 2],
}

/// The `count` predecessors of `target` with the smallest `|k|`.
pub fn predecessors(target: &SpiralValue, count: usize) -> Result<PredecessorFamily> {
    if count == 0 {
        return Err(Error::OutOfRange {
            name: "count",
            min: 1,
            got: 0,
        });
    }
    let mut entries = Vec::with_capacity(count);
    let mut k: i64 = 1;
    while entries.len() < count {
        for index in [k, -k] {
            if entries.len() == count {
                break;
            }
            let index = FamilyIndex::new(index)?;
            if let Some(x) = solve(index, target) {
                if target.is_zero() && x.is_zero() {
                    continue;
                }
                entries.push(Predecessor {
                    index,
                    value: SpiralValue(x),
                });
            }
        }
        k += 1;
    }
    Ok(PredecessorFamily {
        target: target.clone(),
        entries,
        closed_forms: [ClosedForm::new(target, true), ClosedForm::new(target, false)],
    })
}

/// The `x` in the domain of `f_index` with `f_index(x) = target`, if any.
fn solve(index: FamilyIndex, target: &SpiralValue) -> Option<BigInt> {
    let step = step_map(index);
    // (sign 3 x + N) / 2^k = t  =>  x = (2^k t - N) / (3 sign)
    let numerator = (target.get() << index.halvings()) - step.constant_numerator();
    let divisor = BigInt::from(3 * step.map.sign() as i64);
    let (q, r) = numerator.div_rem(&divisor);
    (r.is_zero() && step.domain.contains(&q)).then_some(q)
}

/// One edge of the functional graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub child: SpiralValue,
    pub parent: SpiralValue,
    pub index: FamilyIndex,
}

/// Edges `v -> next(v)` for `0 < |v| <= radius`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeSlice {
    pub radius: u64,
    pub root: SpiralValue,
    /// Ordered by `|v|`, positive first.
    pub edges: Vec<Edge>,
    /// Every parent chain reached 0 within the budget.
    pub all_reach_root: bool,
    /// Slice members whose chain did not reach 0 within the budget.
    pub unresolved: Vec<SpiralValue>,
}

/// `1, -1, 2, -2, ..., radius, -radius`.
fn slice_members(radius: u64) -> impl Iterator<Item = i64> {
    (1..=radius as i64).flat_map(|v| [v, -v])
}

/// Steps from `v` to 0, or `None` when `budget` runs out first.
fn depth_to_root(v: &SpiralValue, budget: u64) -> Option<u64> {
    let mut cur = v.clone();
    for steps in 0..=budget {
        if cur.is_zero() {
            return Some(steps);
        }
        cur = next_with_index(&cur).1;
    }
    None
}

pub fn build_tree(radius: u64, budget: u64) -> Result<TreeSlice> {
    if radius == 0 {
        return Err(Error::OutOfRange {
            name: "radius",
            min: 1,
            got: 0,
        });
    }
    let mut edges = Vec::new();
    let mut unresolved = Vec::new();
    for v in slice_members(radius) {
        let child = SpiralValue::from(v);
        let (index, parent) = next_with_index(&child);
        if depth_to_root(&child, budget).is_none() {
            unresolved.push(child.clone());
        }
        edges.push(Edge {
            child,
            parent,
            index,
        });
    }
    Ok(TreeSlice {
        radius,
        root: SpiralValue::zero(),
        edges,
        all_reach_root: unresolved.is_empty(),
        unresolved,
    })
}

impl TreeSlice {
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n  rankdir=BT;\n  \"0\" [shape=doublecircle];\n");
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"f{}\"];",
                e.child, e.parent, e.index
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("child,parent,index\n");
        for e in &self.edges {
            let _ = writeln!(out, "{},{},{}", e.child, e.parent, e.index);
        }
        out
    }
}

/// Result of following every `|v| <= radius` down to 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectivityReport {
    pub radius: u64,
    pub checked: u64,
    /// Nodes whose chain ran out of budget.
    pub failed: Vec<SpiralValue>,
    /// Node with the longest chain (smallest `|v|`, positive first, on ties).
    pub farthest: SpiralValue,
    pub farthest_steps: u64,
}

impl ConnectivityReport {
    pub fn connected(&self) -> bool {
        self.failed.is_empty()
    }
}

#[derive(Default)]
struct Reach {
    checked: u64,
    failed: Vec<i64>,
    farthest: Option<(u64, i64)>,
}

/// `a` precedes `b` in slice order.
fn slice_order(a: i64, b: i64) -> std::cmp::Ordering {
    (a.unsigned_abs(), a < 0).cmp(&(b.unsigned_abs(), b < 0))
}

impl Reach {
    fn merge(mut self, other: Reach) -> Reach {
        self.checked += other.checked;
        self.failed.extend(other.failed);
        self.farthest = match (self.farthest, other.farthest) {
            (Some(a), Some(b)) => {
                // longer chain wins; on ties the node earlier in slice order
                if a.0 != b.0 {
                    Some(if a.0 > b.0 { a } else { b })
                } else if slice_order(a.1, b.1).is_le() {
                    Some(a)
                } else {
                    Some(b)
                }
            }
            (a, b) => a.or(b),
        };
        self
    }

    fn one(v: i64, budget: u64) -> Reach {
        match depth_to_root(&SpiralValue::from(v), budget) {
            Some(d) => Reach {
                checked: 1,
                failed: vec![],
                farthest: Some((d, v)),
            },
            None => Reach {
                checked: 1,
                failed: vec![v],
                farthest: None,
            },
        }
    }
}

/// Checks that every `|v| <= radius` reaches 0 under `next` within `budget` steps.
pub fn connectivity_check(radius: u64, budget: u64, jobs: usize) -> Result<ConnectivityReport> {
    if radius == 0 {
        return Err(Error::OutOfRange {
            name: "radius",
            min: 1,
            got: 0,
        });
    }
    let r = radius as i64;
    let reach = if jobs <= 1 {
        (-r..=r).map(|v| Reach::one(v, budget)).fold(Reach::default(), Reach::merge)
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool")
            .install(|| {
                (-r..=r)
                    .into_par_iter()
                    .map(|v| Reach::one(v, budget))
                    .reduce(Reach::default, Reach::merge)
            })
    };
    let mut failed = reach.failed;
    failed.sort_by(|&a, &b| slice_order(a, b));
    let (farthest_steps, farthest) = reach.farthest.unwrap_or((0, 0));
    Ok(ConnectivityReport {
        radius,
        checked: reach.checked,
        failed: failed.into_iter().map(SpiralValue::from).collect(),
        farthest: SpiralValue::from(farthest),
        farthest_steps,
    })
}

/// Whether `v` is in the arithmetic progression of `family`, read from its first term.
pub fn in_progression(family: OutputFamily, v: &BigInt) -> bool {
    let first = BigInt::from(family.first());
    let step = if family.first() > 0 { 3 } else { -3 };
    let (n, r) = (v - first).div_rem(&BigInt::from(step));
    r.is_zero() && !n.is_negative()
}

/// Checks that every `|v| <= radius` lies in exactly one of the six output progressions.
pub fn six_set_check(radius: u64) -> std::result::Result<u64, BigInt> {
    let r = radius as i64;
    let mut checked = 0;
    for v in -r..=r {
        let v = BigInt::from(v);
        let hits = OutputFamily::ALL.iter().filter(|&&f| in_progression(f, &v)).count();
        if hits != 1 {
            return Err(v);
        }
        checked += 1;
    }
    Ok(checked)
}
