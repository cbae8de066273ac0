//! Chains of step maps: exact composites, their realizable domains, sign
//! categories, bounded searches over chains, and facts about the family's lines.
//!
//! Chains are listed in application order: `[f_2, f_-2, f_-1]` applies `f_2` first.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::affine::{AffineMap, Category, FixedPoint};
use crate::error::{Error, Result};
use crate::residue::Domain;
use crate::spiral::SpiralValue;
use crate::step::{next_with_index, step_map, FamilyIndex};

/// `outer . inner`.
pub fn compose(outer: &AffineMap, inner: &AffineMap) -> AffineMap {
    AffineMap::compose(outer, inner)
}

pub fn categorize(map: &AffineMap) -> Category {
    map.category()
}

pub fn is_sink(map: &AffineMap) -> bool {
    map.is_sink()
}

/// A chain of step maps with its composite and the exact set of integers that follow it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionChain {
    pub indices: Vec<FamilyIndex>,
    pub composite: AffineMap,
    /// `None` when no integer follows the chain.
    pub domain: Option<Domain>,
}

/// Fixed point of a composite and whether it is a genuine cycle start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointReport {
    pub point: FixedPoint,
    pub integer: Option<BigInt>,
    pub in_domain: bool,
}

impl CompositionChain {
    pub fn category(&self) -> Category {
        self.composite.category()
    }

    pub fn is_sink(&self) -> bool {
        self.composite.is_sink()
    }

    pub fn is_realizable(&self) -> bool {
        self.domain.is_some()
    }

    /// The domain members nearest zero.
    pub fn smallest_elements(&self, count: usize) -> Vec<BigInt> {
        self.domain.as_ref().map_or_else(Vec::new, |d| d.elements(count))
    }

    /// `composite(x)` for `x` in the domain.
    pub fn apply(&self, x: &BigInt) -> Option<BigInt> {
        if !self.domain.as_ref()?.contains(x) {
            return None;
        }
        self.composite.eval_integer(x)
    }

    /// Runs the step dynamics from `x` and returns the endpoint if every step uses the listed index.
    pub fn simulate(&self, x: &BigInt) -> Option<BigInt> {
        follow(&self.indices, x)
    }

    pub fn fixed_point(&self) -> FixedPointReport {
        let point = self.composite.fixed_point();
        let integer = point.as_integer();
        let in_domain = match (&integer, &self.domain) {
            (Some(x), Some(d)) => d.contains(x),
            _ => false,
        };
        FixedPointReport {
            point,
            integer,
            in_domain,
        }
    }

    pub fn label(&self) -> String {
        chain_label(&self.indices)
    }
}

impl fmt::Display for CompositionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] -> {}", self.label(), self.composite)
    }
}

impl Serialize for CompositionChain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let fp = self.fixed_point();
        let mut st = s.serialize_struct("CompositionChain", 7)?;
        st.serialize_field("indices", &self.indices)?;
        st.serialize_field("composite", &self.composite)?;
        st.serialize_field("domain", &self.domain)?;
        st.serialize_field("category", &self.category())?;
        st.serialize_field("sink", &self.is_sink())?;
        st.serialize_field("fixed_point", &fp.point.to_string())?;
        st.serialize_field("fixed_point_in_domain", &fp.in_domain)?;
        st.end()
    }
}

/// `f2,f-2,f-1` style label in application order.
pub fn chain_label(indices: &[FamilyIndex]) -> String {
    indices
        .iter()
        .map(|i| format!("f{i}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Composes the chain and pulls each step's domain back to the start.
pub fn chain(indices: &[FamilyIndex]) -> Result<CompositionChain> {
    let (first, rest) = indices.split_first().ok_or(Error::EmptyChain)?;
    let head = step_map(*first);
    let mut composite = head.map.clone();
    let mut domain = Some(Domain::from_class(head.domain));
    for &index in rest {
        let step = step_map(index);
        domain = domain.and_then(|d| d.pull_back(&composite, &step.domain));
        composite = step.map.after(&composite);
    }
    Ok(CompositionChain {
        indices: indices.to_vec(),
        composite,
        domain,
    })
}

pub fn chain_i(indices: &[i64]) -> Result<CompositionChain> {
    let indices = indices
        .iter()
        .map(|&k| FamilyIndex::new(k))
        .collect::<Result<Vec<_>>>()?;
    chain(&indices)
}

/// Follows the step dynamics from `x`, requiring the listed index at every step.
pub fn follow(indices: &[FamilyIndex], x: &BigInt) -> Option<BigInt> {
    let mut cur = SpiralValue(x.clone());
    for &want in indices {
        let (got, y) = next_with_index(&cur);
        if got != want {
            return None;
        }
        cur = y;
    }
    Some(cur.0)
}

/// Parses `f2,f-2,f-1`, `2 -2 -1` or glued `f_{-1}f_{-2}f_2`.
///
/// With `right_to_left` the list is read right to left (rightmost applied first).
pub fn parse_chain(s: &str, right_to_left: bool) -> Result<Vec<FamilyIndex>> {
    let normalized = s.replace('\u{2212}', "-");
    let mut out = Vec::new();
    for token in normalized
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let starts: Vec<usize> = token
            .char_indices()
            .filter(|&(_, c)| c == 'f' || c == 'F')
            .map(|(i, _)| i)
            .collect();
        if starts.is_empty() {
            out.push(token.parse()?);
            continue;
        }
        if starts[0] != 0 {
            return Err(Error::ParseIndex(token.to_string()));
        }
        for (n, &a) in starts.iter().enumerate() {
            let b = starts.get(n + 1).copied().unwrap_or(token.len());
            out.push(FamilyIndex::from_str(&token[a..b])?);
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyChain);
    }
    if right_to_left {
        out.reverse();
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Bounded chain enumeration
// ---------------------------------------------------------------------------

/// Step map in 128-bit form: `(sign 3 x + num) / 2^halvings`.
#[derive(Debug, Clone, Copy)]
struct Step {
    index: i64,
    sign: i8,
    num: i128,
    halvings: u32,
}

impl Step {
    fn output_positive(&self) -> bool {
        self.halvings % 2 == 1
    }
}

/// Steps with `|k| <= max_k`, positive side and non-positive side, each by increasing `|k|`.
fn steps(max_k: u32) -> (Vec<Step>, Vec<Step>) {
    let make = |k: i64| {
        let s = step_map(FamilyIndex::new(k).expect("nonzero"));
        Step {
            index: k,
            sign: s.map.sign(),
            num: s.constant_numerator().to_i128().expect("small constant"),
            halvings: k.unsigned_abs() as u32,
        }
    };
    let max_k = max_k as i64;
    (
        (1..=max_k).map(make).collect(),
        (1..=max_k).map(|k| make(-k)).collect(),
    )
}

/// Composite `sign 3^pow3 / 2^pow2 x + num / 2^pow2` in 128-bit integers.
#[derive(Debug, Clone, Copy)]
struct Node {
    sign: i8,
    pow2: u32,
    three_pow: i128,
    num: i128,
    output_positive: bool,
}

impl Node {
    fn seed(s: &Step) -> Node {
        Node {
            sign: s.sign,
            pow2: s.halvings,
            three_pow: 3,
            num: s.num,
            output_positive: s.output_positive(),
        }
    }

    /// `s . self`, or `None` on 128-bit overflow.
    fn extend(&self, s: &Step) -> Option<Node> {
        let scaled = self.num.checked_mul(3 * s.sign as i128)?;
        let shifted = s.num.checked_mul(pow2_i128(self.pow2)?)?;
        Some(Node {
            sign: self.sign * s.sign,
            pow2: self.pow2 + s.halvings,
            three_pow: self.three_pow.checked_mul(3)?,
            num: scaled.checked_add(shifted)?,
            output_positive: s.output_positive(),
        })
    }

    fn category(&self) -> Category {
        match (self.sign > 0, self.num < 0) {
            (true, false) => Category::Cat1,
            (true, true) => Category::Cat2,
            (false, false) => Category::Cat3,
            (false, true) => Category::Cat4,
        }
    }

    /// `num / (2^pow2 - sign 3^pow3)` when it is an integer.
    fn integer_fixed_point(&self) -> Option<i128> {
        let denom = pow2_i128(self.pow2)? - self.sign as i128 * self.three_pow;
        (denom != 0 && self.num % denom == 0).then(|| self.num / denom)
    }

    fn state(&self) -> usize {
        (self.sign > 0) as usize * 2 + self.output_positive as usize
    }
}

fn pow2_i128(e: u32) -> Option<i128> {
    (e < 127).then(|| 1i128 << e)
}

/// Constants `C` from which some continuation of bounded length is Category 2:
/// the union `{C < below} U {C > above}`.
#[derive(Debug, Clone, Default)]
struct Danger {
    below: Option<BigRational>,
    above: Option<BigRational>,
}

impl Danger {
    fn contains(&self, num: i128, pow2: u32) -> bool {
        let c = BigRational::new(BigInt::from(num), BigInt::one() << pow2);
        self.below.as_ref().is_some_and(|b| &c < b) || self.above.as_ref().is_some_and(|u| &c > u)
    }

    fn union(&mut self, other: Danger) {
        self.below = match (self.below.take(), other.below) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.above = match (self.above.take(), other.above) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }

    /// `{x : a x + b in self}`.
    fn preimage(&self, a: &BigRational, b: &BigRational) -> Danger {
        let pull = |t: &BigRational| (t - b) / a;
        let lo = self.below.as_ref().map(pull);
        let hi = self.above.as_ref().map(pull);
        if a > &BigRational::zero() {
            Danger { below: lo, above: hi }
        } else {
            Danger { below: hi, above: lo }
        }
    }
}

/// `table[r][state]`: the danger set with `r` more steps allowed, indexed by [`Node::state`].
fn danger_table(depth: u32, positive: &[Step], non_positive: &[Step]) -> Vec<[Danger; 4]> {
    let base = |state: usize| Danger {
        below: (state >= 2).then(BigRational::zero),
        above: None,
    };
    let mut table: Vec<[Danger; 4]> = vec![std::array::from_fn(base)];
    for r in 1..=depth as usize {
        let row = std::array::from_fn(|state| {
            let coefficient_positive = state >= 2;
            let output_positive = state % 2 == 1;
            let mut d = base(state);
            let candidates = if output_positive { positive } else { non_positive };
            for s in candidates {
                let den = BigInt::one() << s.halvings;
                let a = BigRational::new(BigInt::from(3 * s.sign as i64), den.clone());
                let b = BigRational::new(BigInt::from(s.num), den);
                let child_positive = coefficient_positive == (s.sign > 0);
                let child = child_positive as usize * 2 + s.output_positive() as usize;
                d.union(table[r - 1][child].preimage(&a, &b));
            }
            d
        });
        table.push(row);
    }
    table
}

/// Parameters of a bounded chain search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    /// Longest chain examined.
    pub depth: u32,
    /// Largest `|k|` allowed at any single step.
    pub max_k: u32,
    /// Skip subtrees whose constants cannot lead to a Category 2 composite.
    pub prune: bool,
    pub jobs: usize,
}

impl SearchConfig {
    pub const DEFAULT_DEPTH: u32 = 12;
    pub const DEFAULT_MAX_K: u32 = 4;

    pub fn new(depth: u32) -> Self {
        SearchConfig {
            depth,
            max_k: Self::DEFAULT_MAX_K,
            prune: true,
            jobs: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::OutOfRange {
                name: "depth",
                min: 1,
                got: 0,
            });
        }
        if self.max_k == 0 {
            return Err(Error::OutOfRange {
                name: "max-k",
                min: 1,
                got: 0,
            });
        }
        // denominators reach 2^(depth max_k) and 3^depth must stay below 2^126
        if self.depth as u64 * self.max_k as u64 > 100 || self.depth > 60 {
            return Err(Error::SearchTooLarge {
                depth: self.depth,
                max_k: self.max_k,
            });
        }
        Ok(())
    }
}

/// A Category 2 composite with its smallest realizing input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cat2Witness {
    pub chain: CompositionChain,
    #[serde(serialize_with = "crate::serde_util::opt_int")]
    pub smallest_input: Option<BigInt>,
}

/// A chain whose composite has an integer fixed point inside the chain's domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleWitness {
    pub chain: CompositionChain,
    #[serde(serialize_with = "crate::serde_util::int")]
    pub fixed_point: BigInt,
    /// The self-loop at 0.
    pub trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub depth: u32,
    pub max_k: u32,
    pub pruning: bool,
    /// Chains examined.
    pub visited: u64,
    /// Subtrees skipped by pruning.
    pub pruned_subtrees: u64,
    /// Chains whose composite has an integer fixed point, in domain or not.
    pub integer_fixed_points: u64,
    pub witnesses: Vec<Cat2Witness>,
    /// Only complete when pruning is off.
    pub cycles: Vec<CycleWitness>,
}

impl SearchReport {
    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// Cycle witnesses other than the self-loop at 0.
    pub fn nontrivial_cycles(&self) -> impl Iterator<Item = &CycleWitness> {
        self.cycles.iter().filter(|c| !c.trivial)
    }
}

#[derive(Default)]
struct Tally {
    visited: u64,
    pruned: u64,
    integer_fixed_points: u64,
    cat2: Vec<Vec<i64>>,
    cycles: Vec<(Vec<i64>, i128)>,
    overflow: bool,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.visited += other.visited;
        self.pruned += other.pruned;
        self.integer_fixed_points += other.integer_fixed_points;
        self.cat2.extend(other.cat2);
        self.cycles.extend(other.cycles);
        self.overflow |= other.overflow;
        self
    }
}

struct Explorer {
    positive: Vec<Step>,
    non_positive: Vec<Step>,
    danger: Option<Vec<[Danger; 4]>>,
}

impl Explorer {
    /// Checks one chain and reports whether its extensions still need visiting.
    fn visit(&self, node: &Node, path: &[i64], remaining: u32, tally: &mut Tally) -> bool {
        tally.visited += 1;
        if node.category() == Category::Cat2 {
            tally.cat2.push(path.to_vec());
        }
        if let Some(x) = node.integer_fixed_point() {
            tally.integer_fixed_points += 1;
            let indices: Vec<FamilyIndex> = path.iter().map(|&k| FamilyIndex::new(k).expect("nonzero")).collect();
            if follow(&indices, &BigInt::from(x)) == Some(BigInt::from(x)) {
                tally.cycles.push((path.to_vec(), x));
            }
        }
        if remaining == 0 {
            return false;
        }
        if let Some(table) = &self.danger {
            if !table[remaining as usize][node.state()].contains(node.num, node.pow2) {
                tally.pruned += 1;
                return false;
            }
        }
        true
    }

    fn children(&self, node: &Node) -> &[Step] {
        if node.output_positive {
            &self.positive
        } else {
            &self.non_positive
        }
    }

    fn explore(&self, node: Node, path: &mut Vec<i64>, remaining: u32, tally: &mut Tally) {
        if !self.visit(&node, path, remaining, tally) {
            return;
        }
        for s in self.children(&node) {
            let Some(child) = node.extend(s) else {
                tally.overflow = true;
                continue;
            };
            path.push(s.index);
            self.explore(child, path, remaining - 1, tally);
            path.pop();
        }
    }

    /// Visits the seeds here and hands each seed's children to the pool.
    fn run(&self, seeds: &[Step], depth: u32, jobs: usize) -> Tally {
        let mut tally = Tally::default();
        let mut frontier = Vec::new();
        for s in seeds {
            let node = Node::seed(s);
            if self.visit(&node, &[s.index], depth - 1, &mut tally) {
                for c in self.children(&node) {
                    match node.extend(c) {
                        Some(child) => frontier.push((child, vec![s.index, c.index])),
                        None => tally.overflow = true,
                    }
                }
            }
        }
        let work = |(node, mut path): (Node, Vec<i64>)| {
            let mut t = Tally::default();
            self.explore(node, &mut path, depth - 2, &mut t);
            t
        };
        let rest = if jobs <= 1 {
            frontier.into_iter().map(work).fold(Tally::default(), Tally::merge)
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .expect("thread pool")
                .install(|| {
                    frontier
                        .into_par_iter()
                        .map(work)
                        .reduce(Tally::default, Tally::merge)
                })
        };
        tally.merge(rest)
    }
}

/// Enumerates every chain of length `<= depth` that starts with `f_1` or `f_2`
/// and uses `|k| <= max_k` at each step, reporting Category 2 composites.
///
/// Every sign-compatible chain is realizable, so the enumeration covers all
/// realizable chains within the bounds. With pruning off the report also
/// lists every in-domain integer fixed point.
pub fn search_category2(config: &SearchConfig) -> Result<SearchReport> {
    config.validate()?;
    let (positive, non_positive) = steps(config.max_k);
    let danger = config
        .prune
        .then(|| danger_table(config.depth, &positive, &non_positive));
    let seeds: Vec<Step> = positive.iter().copied().filter(|s| s.index <= 2).collect();
    let explorer = Explorer {
        positive,
        non_positive,
        danger,
    };
    let mut tally = explorer.run(&seeds, config.depth, config.jobs);
    if tally.overflow {
        return Err(Error::SearchTooLarge {
            depth: config.depth,
            max_k: config.max_k,
        });
    }
    tally.cat2.sort();
    tally.cycles.sort();
    let witnesses = tally
        .cat2
        .iter()
        .map(|p| {
            let chain = chain_i(p)?;
            let smallest_input = chain.smallest_elements(1).into_iter().next();
            Ok(Cat2Witness {
                chain,
                smallest_input,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cycles = tally
        .cycles
        .iter()
        .map(|(p, x)| {
            Ok(CycleWitness {
                chain: chain_i(p)?,
                fixed_point: BigInt::from(*x),
                trivial: *x == 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SearchReport {
        depth: config.depth,
        max_k: config.max_k,
        pruning: config.prune,
        visited: tally.visited,
        pruned_subtrees: tally.pruned,
        integer_fixed_points: tally.integer_fixed_points,
        witnesses,
        cycles,
    })
}

/// Sign and parity of an appended step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyTag {
    PositiveOdd,
    PositiveEven,
    NonPositiveOdd,
    NonPositiveEven,
}

impl FamilyTag {
    pub fn of(index: FamilyIndex) -> FamilyTag {
        match (index.is_positive(), index.halvings() % 2 == 1) {
            (true, true) => FamilyTag::PositiveOdd,
            (true, false) => FamilyTag::PositiveEven,
            (false, true) => FamilyTag::NonPositiveOdd,
            (false, false) => FamilyTag::NonPositiveEven,
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyTag::PositiveOdd => "+odd",
            FamilyTag::PositiveEven => "+even",
            FamilyTag::NonPositiveOdd => "-odd",
            FamilyTag::NonPositiveEven => "-even",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub from: Category,
    pub step: FamilyTag,
    pub to: Category,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub depth: u32,
    pub max_k: u32,
    /// Category of each single step map.
    pub singles: Vec<(FamilyIndex, Category)>,
    pub transitions: Vec<Transition>,
}

impl ClosureReport {
    /// Observed transitions from Category 1 or 4 into Category 2.
    pub fn forbidden(&self) -> Vec<&Transition> {
        self.transitions
            .iter()
            .filter(|t| t.to == Category::Cat2 && matches!(t.from, Category::Cat1 | Category::Cat4))
            .collect()
    }

    pub fn holds(&self) -> bool {
        self.forbidden().is_empty()
    }

    /// Categories reached in one step from `from`.
    pub fn targets_from(&self, from: Category) -> Vec<Category> {
        let mut out: Vec<Category> = self
            .transitions
            .iter()
            .filter(|t| t.from == from)
            .map(|t| t.to)
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Records every (category, appended family, new category) transition over all
/// chains of length `<= depth` with `|k| <= max_k`, seeded by every single map.
pub fn category_closure_probe(depth: u32, max_k: u32) -> Result<ClosureReport> {
    if depth < 2 {
        return Err(Error::OutOfRange {
            name: "depth",
            min: 2,
            got: depth as u64,
        });
    }
    SearchConfig {
        depth,
        max_k,
        prune: false,
        jobs: 1,
    }
    .validate()?;
    let (positive, non_positive) = steps(max_k);
    let mut counts: BTreeMap<(Category, FamilyTag, Category), u64> = BTreeMap::new();
    let mut overflow = false;

    fn walk(
        node: &Node,
        remaining: u32,
        positive: &[Step],
        non_positive: &[Step],
        counts: &mut BTreeMap<(Category, FamilyTag, Category), u64>,
        overflow: &mut bool,
    ) {
        if remaining == 0 {
            return;
        }
        let candidates = if node.output_positive { positive } else { non_positive };
        for s in candidates {
            let Some(child) = node.extend(s) else {
                *overflow = true;
                continue;
            };
            let tag = FamilyTag::of(FamilyIndex::new(s.index).expect("nonzero"));
            *counts.entry((node.category(), tag, child.category())).or_default() += 1;
            walk(&child, remaining - 1, positive, non_positive, counts, overflow);
        }
    }

    let mut singles = Vec::new();
    for s in positive.iter().chain(&non_positive) {
        let node = Node::seed(s);
        singles.push((FamilyIndex::new(s.index).expect("nonzero"), node.category()));
        walk(&node, depth - 1, &positive, &non_positive, &mut counts, &mut overflow);
    }
    if overflow {
        return Err(Error::SearchTooLarge { depth, max_k });
    }
    singles.sort_by_key(|(i, _)| (i.halvings(), !i.is_positive()));
    let transitions = counts
        .into_iter()
        .map(|((from, step, to), count)| Transition {
            from,
            step,
            to,
            count,
        })
        .collect();
    Ok(ClosureReport {
        depth,
        max_k,
        singles,
        transitions,
    })
}

// ---------------------------------------------------------------------------
// Line facts
// ---------------------------------------------------------------------------

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionReport {
    pub kmax: u32,
    /// Shared point of the positive-side maps.
    #[serde(serialize_with = "crate::serde_util::display_pair")]
    pub positive_point: (BigRational, BigRational),
    /// Shared point of the non-positive-side maps.
    #[serde(serialize_with = "crate::serde_util::display_pair")]
    pub non_positive_point: (BigRational, BigRational),
    pub checked: u64,
    pub failures: Vec<FamilyIndex>,
}

impl IntersectionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks exactly that every `f_k` passes through `(1/9, 1/6)` and every `f_-k` through `(2/9, 1/6)`.
pub fn intersection_points(kmax: u32) -> Result<IntersectionReport> {
    if kmax == 0 {
        return Err(Error::OutOfRange {
            name: "kmax",
            min: 1,
            got: 0,
        });
    }
    let positive_point = (rational(1, 9), rational(1, 6));
    let non_positive_point = (rational(2, 9), rational(1, 6));
    let mut failures = Vec::new();
    let mut checked = 0;
    for k in 1..=kmax as i64 {
        for (idx, (x, y)) in [(k, &positive_point), (-k, &non_positive_point)] {
            let index = FamilyIndex::new(idx)?;
            checked += 1;
            if &step_map(index).map.eval_rational(x) != y {
                failures.push(index);
            }
        }
    }
    Ok(IntersectionReport {
        kmax,
        positive_point,
        non_positive_point,
        checked,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub kmax: u32,
    /// `k` for which `f_-k(x) = f_k(1/3 - x)` fails.
    pub reflection_failures: Vec<FamilyIndex>,
    /// `k` for which `1/3 - f_k(1/3 - x) = f_-k(x)` fails.
    pub conjugation_failures: Vec<FamilyIndex>,
}

/// Compares each `f_k` with `f_-k` under the reflection `x -> 1/3 - x`, both as a
/// change of input alone and as a full conjugation.
pub fn symmetry_check(kmax: u32) -> Result<SymmetryReport> {
    if kmax == 0 {
        return Err(Error::OutOfRange {
            name: "kmax",
            min: 1,
            got: 0,
        });
    }
    let third = rational(1, 3);
    let mut reflection_failures = Vec::new();
    let mut conjugation_failures = Vec::new();
    for k in 1..=kmax as i64 {
        let pos = step_map(FamilyIndex::new(k)?).map;
        let neg = step_map(FamilyIndex::new(-k)?).map;
        let (a, b) = (pos.coefficient(), pos.constant().to_rational());
        let (a_neg, b_neg) = (neg.coefficient(), neg.constant().to_rational());
        // f_k(1/3 - x) = -a x + (a/3 + b)
        if -a.clone() != a_neg || &a * &third + &b != b_neg {
            reflection_failures.push(FamilyIndex::new(k)?);
        }
        // 1/3 - f_k(1/3 - x) = a x + (1/3 - a/3 - b)
        if a != a_neg || &third - &a * &third - &b != b_neg {
            conjugation_failures.push(FamilyIndex::new(k)?);
        }
    }
    Ok(SymmetryReport {
        kmax,
        reflection_failures,
        conjugation_failures,
    })
}

/// Which sink bound a coefficient `+-3^p/2^q` must meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SinkBound {
    /// `3^p / 2^q < 1`
    CoefLt1,
    /// `-3^p / 2^q > -1/2`
    CoefGtNegHalf,
}

impl FromStr for SinkBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coef_lt_1" | "coef-lt-1" | "lt1" => Ok(SinkBound::CoefLt1),
            "coef_gt_neg_half" | "coef-gt-neg-half" | "gt-neg-half" => Ok(SinkBound::CoefGtNegHalf),
            _ => Err(Error::Unsupported {
                name: "variant",
                detail: format!("`{s}` (expected coef_lt_1 or coef_gt_neg_half)"),
            }),
        }
    }
}

/// Smallest `q` with `3^p < 2^q` (or `2 3^p < 2^q`), by exact integer comparison.
pub fn min_q(p: u32, bound: SinkBound) -> Result<u32> {
    if p == 0 {
        return Err(Error::OutOfRange {
            name: "p",
            min: 1,
            got: 0,
        });
    }
    let mut target = num_traits::pow(BigInt::from(3), p as usize);
    if bound == SinkBound::CoefGtNegHalf {
        target *= 2;
    }
    // 2^(bits - 1) <= target < 2^bits, and target is never a power of two
    Ok(target.bits() as u32)
}

/// A step map as a line: slope and intercept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineRow {
    pub index: FamilyIndex,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub slope: BigRational,
    #[serde(serialize_with = "crate::serde_util::display")]
    pub intercept: BigRational,
}

/// Lines of `f_1, f_-1, ..., f_kmax, f_-kmax`.
pub fn lines(kmax: u32) -> Result<Vec<LineRow>> {
    if kmax == 0 {
        return Err(Error::OutOfRange {
            name: "kmax",
            min: 1,
            got: 0,
        });
    }
    let mut rows = Vec::new();
    for k in 1..=kmax as i64 {
        for idx in [k, -k] {
            let index = FamilyIndex::new(idx)?;
            let map = step_map(index).map;
            rows.push(LineRow {
                index,
                slope: map.coefficient(),
                intercept: map.constant().to_rational(),
            });
        }
    }
    Ok(rows)
}

pub fn lines_csv(rows: &[LineRow]) -> String {
    let dec = |q: &BigRational| q.to_f64().map_or_else(|| "nan".into(), |v| v.to_string());
    let mut out = String::from("index,slope,intercept,slope_decimal,intercept_decimal\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.index,
            r.slope,
            r.intercept,
            dec(&r.slope),
            dec(&r.intercept)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicRational;
    use crate::spiral::canonical_index;
    use crate::step::classify;
    use proptest::prelude::*;

    fn idx(v: &[i64]) -> Vec<FamilyIndex> {
        v.iter().map(|&k| FamilyIndex::new(k).unwrap()).collect()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn q(n: i64, d: i64) -> BigRational {
        rational(n, d)
    }

    #[test]
    fn composition_constant_is_outer_at_inner_constant() {
        let f2 = step_map(FamilyIndex::new(2).unwrap()).map;
        let fm1 = step_map(FamilyIndex::new(-1).unwrap()).map;
        let c = compose(&fm1, &f2);
        assert_eq!(c.constant(), &DyadicRational::new(1, 3));
        let fm2 = step_map(FamilyIndex::new(-2).unwrap()).map;
        let scaled = compose(&fm2, &f2);
        assert_eq!(scaled.constant().to_rational(), q(3, 4) * f2.constant().to_rational());
    }

    #[test]
    fn short_chain_golden() {
        let c = chain(&idx(&[2, -2, -1])).unwrap();
        assert_eq!(c.composite.to_string(), "27/32x + 7/32");
        assert_eq!(c.domain.as_ref().unwrap().to_string(), "x = 27 mod 32, x > 0");
        assert_eq!(c.apply(&big(27)), Some(big(23)));
        assert_eq!(c.apply(&big(59)), Some(big(50)));
        assert_eq!(c.simulate(&big(59)), Some(big(50)));
        assert_eq!(c.category(), Category::Cat1);
        assert!(c.is_sink());
        let fp = c.fixed_point();
        assert_eq!(fp.point, FixedPoint::Point(q(7, 5)));
        assert!(!fp.in_domain);
    }

    #[test]
    fn five_step_chain_composite() {
        let c = chain(&idx(&[2, -1, 1, 1, 4])).unwrap();
        assert_eq!(c.composite.to_string(), "-243/512x + 69/512");
        assert_eq!(c.category(), Category::Cat3);
        assert!(c.is_sink());
        let d = c.domain.as_ref().unwrap();
        assert_eq!(d.class().residue(), &big(487));
        assert_eq!(d.class().modulus(), big(512));
        assert_eq!(c.apply(&big(487)), Some(big(-231)));
        assert_eq!(c.simulate(&big(487)), Some(big(-231)));
        // the chain does not accept 211: its trajectory leaves the chain
        assert_eq!(c.apply(&big(211)), None);
        assert_eq!(c.simulate(&big(211)), None);
    }

    #[test]
    fn long_chain_is_category_four() {
        let c = chain(&idx(&[2, -1, 1, 1, 1, 1, 1, 1, 1, 1, 2])).unwrap();
        assert_eq!(c.composite.coefficient(), q(-177_147, 8192));
        assert_eq!(c.composite.constant().to_rational(), q(-17_635, 8192));
        assert_eq!(c.category(), Category::Cat4);
        let d = c.domain.as_ref().unwrap();
        assert_eq!(d.class().residue(), &big(2503));
        assert_eq!(d.class().modulus(), big(8192));
        assert_eq!(c.apply(&big(2503)), Some(big(-54_128)));
        // the next domain member lands 177147 lower
        assert_eq!(c.apply(&big(2503 + 8192)), Some(big(-54_128 - 177_147)));
    }

    #[test]
    fn alternating_chain() {
        let c = chain(&idx(&[2, -1, 2, -1, 2, -1, 2])).unwrap();
        assert_eq!(c.composite.to_string(), "-2187/2048x - 139/2048");
    }

    #[test]
    fn halved_density_after_one_step() {
        // f_1 accepts x = 0 mod 2; requiring f_2 next cuts that to one class mod 8
        let c = chain(&idx(&[1, 2])).unwrap();
        let d = c.domain.as_ref().unwrap();
        assert_eq!(d.class().modulus(), big(8));
        for x in c.smallest_elements(5) {
            assert_eq!(c.simulate(&x), c.apply(&x));
        }
    }

    #[test]
    fn categories_and_sinks_of_singles() {
        assert_eq!(categorize(&step_map(FamilyIndex::new(1).unwrap()).map), Category::Cat1);
        assert_eq!(categorize(&step_map(FamilyIndex::new(2).unwrap()).map), Category::Cat3);
        assert!(!is_sink(&step_map(FamilyIndex::new(1).unwrap()).map));
        let fm2 = chain(&idx(&[-2])).unwrap();
        let fp = fm2.fixed_point();
        assert_eq!(fp.integer, Some(big(0)));
        assert!(fp.in_domain);
        let f1 = chain(&idx(&[1])).unwrap();
        let fp = f1.fixed_point();
        assert_eq!(fp.integer, Some(big(0)));
        assert!(!fp.in_domain);
    }

    #[test]
    fn parses_chains() {
        assert_eq!(parse_chain("f2,f-2,f-1", false).unwrap(), idx(&[2, -2, -1]));
        assert_eq!(parse_chain("f_{-1}f_{-2}f_2", true).unwrap(), idx(&[2, -2, -1]));
        assert_eq!(parse_chain("2 -2 -1", false).unwrap(), idx(&[2, -2, -1]));
        assert_eq!(parse_chain("f_{\u{2212}1}", false).unwrap(), idx(&[-1]));
        assert!(parse_chain("", false).is_err());
        assert!(parse_chain("f0", false).is_err());
        assert!(parse_chain("2f3", false).is_err());
    }

    fn all_chains(len: usize, max_k: i64) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = (1..=max_k).flat_map(|k| [vec![k], vec![-k]]).collect();
        for _ in 1..len {
            out = out
                .into_iter()
                .flat_map(|c| {
                    let last = *c.last().unwrap();
                    let positive = last.unsigned_abs() % 2 == 1;
                    (1..=max_k).map(move |k| {
                        let mut n = c.clone();
                        n.push(if positive { k } else { -k });
                        n
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn domain_soundness() {
        for len in 1..=6 {
            let max_k = if len <= 4 { 4 } else { 3 };
            for c in all_chains(len, max_k) {
                let ch = chain_i(&c).unwrap();
                assert!(ch.is_realizable(), "{c:?}");
                let xs = ch.smallest_elements(3);
                assert_eq!(xs.len(), 3);
                for x in xs {
                    assert_eq!(ch.simulate(&x), ch.apply(&x), "{c:?} at {x}");
                    assert!(ch.apply(&x).is_some());
                }
            }
        }
    }

    #[test]
    fn domain_completeness() {
        for x in -10_000i64..=10_000 {
            let mut cur = SpiralValue::from(x);
            let mut path = Vec::new();
            for _ in 0..6 {
                let (i, y) = next_with_index(&cur);
                path.push(i);
                cur = y;
                let ch = chain(&path).unwrap();
                assert!(ch.domain.as_ref().unwrap().contains(&big(x)), "{x} {path:?}");
                assert_eq!(ch.apply(&big(x)).as_ref(), Some(&cur.0));
            }
        }
    }

    #[test]
    fn sinks_lower_the_canonical_index() {
        for len in 1..=5 {
            for c in all_chains(len, 4) {
                let ch = chain_i(&c).unwrap();
                if !ch.is_sink() {
                    continue;
                }
                // 0 is the fixed point of f_-2 and keeps its index
                for x in ch.smallest_elements(4).into_iter().filter(|x| !x.is_zero()).take(3) {
                    let y = ch.apply(&x).unwrap();
                    let before = canonical_index(&SpiralValue(x.clone()));
                    let after = canonical_index(&SpiralValue(y.clone()));
                    assert!(after.get() < before.get(), "{c:?}: {x} -> {y}");
                }
            }
        }
    }

    #[test]
    fn enumeration_state_matches_exact_composition() {
        let (positive, non_positive) = steps(4);
        let find = |k: i64| *positive.iter().chain(&non_positive).find(|s| s.index == k).unwrap();
        for c in all_chains(5, 4) {
            let mut node = Node::seed(&find(c[0]));
            for &k in &c[1..] {
                node = node.extend(&find(k)).unwrap();
            }
            let exact = chain_i(&c).unwrap().composite;
            assert_eq!(node.category(), exact.category());
            assert_eq!(BigInt::from(node.num), exact.constant().numerator_over(node.pow2));
            assert_eq!(node.pow2, exact.pow2());
            let fp = exact.fixed_point().as_integer();
            assert_eq!(node.integer_fixed_point().map(BigInt::from), fp);
        }
    }

    #[test]
    fn danger_table_is_exact_on_small_depths() {
        // the pruned and unpruned searches agree, and a brute-force check of
        // the danger sets over sample constants agrees with explicit suffixes
        let (positive, non_positive) = steps(3);
        let table = danger_table(3, &positive, &non_positive);
        let suffixes = |output_positive: bool, r: usize| -> Vec<Vec<Step>> {
            let mut out: Vec<Vec<Step>> = vec![vec![]];
            let mut layer: Vec<Vec<Step>> = vec![vec![]];
            for _ in 0..r {
                let mut next_layer = Vec::new();
                for s in &layer {
                    let pos = s.last().map_or(output_positive, |l| l.output_positive());
                    for c in if pos { &positive } else { &non_positive } {
                        let mut n = s.clone();
                        n.push(*c);
                        next_layer.push(n);
                    }
                }
                out.extend(next_layer.iter().cloned());
                layer = next_layer;
            }
            out
        };
        for state in 0..4 {
            let coefficient_positive = state >= 2;
            let output_positive = state % 2 == 1;
            for r in 0..=3 {
                for num in -40i128..=40 {
                    let pow2 = 4;
                    let c = BigRational::new(BigInt::from(num), BigInt::from(16));
                    let brute = suffixes(output_positive, r).iter().any(|suf| {
                        let mut v = c.clone();
                        let mut sign = coefficient_positive;
                        for s in suf {
                            let den = BigInt::one() << s.halvings;
                            v = BigRational::new(BigInt::from(3 * s.sign as i64), den.clone()) * v
                                + BigRational::new(BigInt::from(s.num), den);
                            sign = sign == (s.sign > 0);
                        }
                        sign && v < BigRational::zero()
                    });
                    assert_eq!(table[r][state].contains(num, pow2), brute, "state {state} r {r} C {c}");
                }
            }
        }
    }

    #[test]
    fn category2_search_small_depths() {
        for depth in 1..=3 {
            let r = search_category2(&SearchConfig::new(depth)).unwrap();
            assert!(r.is_empty());
        }
        let mut cfg = SearchConfig::new(6);
        cfg.prune = false;
        let full = search_category2(&cfg).unwrap();
        assert!(full.is_empty());
        assert_eq!(full.visited, 2 * (4u64.pow(6) - 1) / 3);
        assert_eq!(full.nontrivial_cycles().count(), 0);
        cfg.jobs = 3;
        assert_eq!(search_category2(&cfg).unwrap(), full);
        assert!(search_category2(&SearchConfig::new(0)).is_err());
    }

    #[test]
    fn closure_probe() {
        let r = category_closure_probe(2, 4).unwrap();
        assert!(r.holds());
        for from in [Category::Cat1, Category::Cat4] {
            for to in r.targets_from(from) {
                assert!(matches!(to, Category::Cat1 | Category::Cat3 | Category::Cat4), "{from} -> {to}");
            }
        }
        for (i, cat) in &r.singles {
            if i.is_positive() {
                let expected = if i.halvings() % 2 == 1 { Category::Cat1 } else { Category::Cat3 };
                assert_eq!(*cat, expected);
            }
        }
        assert!(category_closure_probe(1, 4).is_err());
    }

    #[test]
    fn intersection_and_symmetry() {
        let r = intersection_points(32).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked, 64);
        assert_eq!(step_map(FamilyIndex::new(4).unwrap()).map.eval_rational(&q(1, 9)), q(1, 6));
        let s = symmetry_check(32).unwrap();
        assert!(s.reflection_failures.is_empty());
        assert_eq!(s.conjugation_failures.len(), 32);
    }

    #[test]
    fn min_q_lattice() {
        let lt: Vec<u32> = (1..=3).map(|p| min_q(p, SinkBound::CoefLt1).unwrap()).collect();
        let gt: Vec<u32> = (1..=3).map(|p| min_q(p, SinkBound::CoefGtNegHalf).unwrap()).collect();
        assert_eq!(lt, vec![2, 4, 5]);
        assert_eq!(gt, vec![3, 5, 6]);
        for p in 1..200u32 {
            let q = min_q(p, SinkBound::CoefLt1).unwrap();
            let three = num_traits::pow(BigInt::from(3), p as usize);
            assert!(three < BigInt::one() << q);
            assert!(three > BigInt::one() << (q - 1));
        }
        assert!(min_q(0, SinkBound::CoefLt1).is_err());
    }

    #[test]
    fn lines_csv_rows() {
        let csv = lines_csv(&lines(2).unwrap());
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows[1], "1,3/2,0,1.5,0");
        assert_eq!(rows[2], "-1,-3/2,1/2,-1.5,0.5");
        assert_eq!(rows[3], "2,-3/4,1/4,-0.75,0.25");
        assert_eq!(rows[4], "-2,3/4,0,0.75,0");
    }

    proptest! {
        #[test]
        fn composite_constant_is_outer_at_inner_constant(a in 1i64..=20, sa: bool, b in 1i64..=20, sb: bool) {
            let f = step_map(FamilyIndex::new(if sa { a } else { -a }).unwrap()).map;
            let g = step_map(FamilyIndex::new(if sb { b } else { -b }).unwrap()).map;
            let c = compose(&g, &f);
            prop_assert_eq!(c.constant(), &g.eval_dyadic(f.constant()));
            prop_assert_eq!(c.pow2(), f.pow2() + g.pow2());
            prop_assert_eq!(c.pow3(), 2);
        }

        #[test]
        fn classify_agrees_with_single_chain(x in -100_000i64..100_000) {
            let i = classify(&SpiralValue::from(x));
            let ch = chain(&[i]).unwrap();
            prop_assert!(ch.domain.unwrap().contains(&big(x)));
        }
    }
}
