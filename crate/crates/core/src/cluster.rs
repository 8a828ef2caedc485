//! Searching for categorizations that maximize Category Utility.
//!
//! A partitioning is scored block by block: each block is compared with its
//! complement using the chosen Category Utility form, and the block scores are
//! averaged (or summed). Both searches break ties on the exact value where one
//! exists and then lexicographically on member indices, so results never
//! depend on thread scheduling.

use std::cmp::Ordering;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counts::{entropy_nats, value_counts, SquareSums};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::hierarchy::{Category, Hierarchy, Level};
use crate::measures::MeasureOptions;

/// Largest dataset [`best_split_exhaustive`] accepts.
pub const EXHAUSTIVE_MAX: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    #[default]
    CuQuad,
    CuInfo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    #[default]
    Mean,
    Sum,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClusterOptions {
    pub objective: Objective,
    pub aggregation: Aggregation,
    /// Dimension subset, log base (for [`Objective::CuInfo`]) and tie epsilon.
    pub measure: MeasureOptions,
}

/// Blocks of a partition, ordered by smallest member, with their score.
#[derive(Debug, Clone, PartialEq)]
pub struct Partitioning {
    pub blocks: Vec<Category>,
    pub objective: f64,
    /// Merge history, for partitionings built by [`greedy_agglomerate`].
    pub trace: Option<MergeTrace>,
}

impl Partitioning {
    /// Two-level hierarchy: the population, then the blocks.
    pub fn hierarchy(&self, d: &Dataset) -> Result<Hierarchy> {
        let mut levels = vec![Level::new("k=1", vec![population(d)])];
        if self.blocks.len() > 1 {
            levels.push(Level::new(format!("k={}", self.blocks.len()), self.blocks.clone()));
        }
        Hierarchy::new(d, levels)
    }
}

/// One merge: the blocks whose smallest members are `left` and `right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    pub left: usize,
    pub right: usize,
    /// Objective of the partitioning right after the merge.
    pub objective: f64,
}

/// Merges applied in order, starting from singletons of `instances` items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeTrace {
    pub instances: usize,
    pub steps: Vec<MergeStep>,
}

impl MergeTrace {
    pub fn final_blocks(&self) -> usize {
        self.instances.saturating_sub(self.steps.len())
    }
}

/// Value counts of a block on each scored dimension.
#[derive(Clone)]
struct Block {
    members: Vec<usize>,
    counts: Vec<Vec<u64>>,
    weight: u64,
}

struct Scorer<'a> {
    d: &'a Dataset,
    dims: Vec<usize>,
    objective: Objective,
    ln_base: f64,
    eps: f64,
}

impl<'a> Scorer<'a> {
    fn new(d: &'a Dataset, opts: &ClusterOptions) -> Result<Self> {
        Ok(Self {
            d,
            dims: opts.measure.dims(d)?,
            objective: opts.objective,
            ln_base: opts.measure.log_base.ln(),
            eps: opts.measure.tie_epsilon,
        })
    }

    fn block(&self, members: Vec<usize>) -> Block {
        let counts = self.dims.iter().map(|&k| value_counts(self.d, &members, k)).collect();
        let weight = members.iter().map(|&i| self.d.units(i)).sum();
        Block {
            members,
            counts,
            weight,
        }
    }

    fn merged(&self, a: &Block, b: &Block) -> Block {
        let mut members: Vec<usize> = a.members.iter().chain(&b.members).copied().collect();
        members.sort_unstable();
        let counts = a
            .counts
            .iter()
            .zip(&b.counts)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
            .collect();
        Block {
            members,
            counts,
            weight: a.weight + b.weight,
        }
    }

    fn square_sums(&self, b: &Block) -> SquareSums {
        let mut s = SquareSums::default();
        for (counts, &k) in b.counts.iter().zip(&self.dims) {
            s.add_dimension(counts, self.d.marginal_counts(k));
        }
        s
    }

    /// Block-versus-complement score; 0 when either side has no weight.
    fn value(&self, b: &Block) -> f64 {
        let w = self.d.total_units();
        if b.weight == 0 || b.weight == w {
            return 0.0;
        }
        match self.objective {
            Objective::CuQuad => self.square_sums(b).quad_partition_f64(w, b.weight),
            Objective::CuInfo => {
                let (wc, wn) = (b.weight, w - b.weight);
                let (pc, pn) = (wc as f64 / w as f64, wn as f64 / w as f64);
                let nats: f64 = b
                    .counts
                    .iter()
                    .zip(&self.dims)
                    .map(|(counts, &k)| {
                        let marginal = self.d.marginal_counts(k);
                        let rest: Vec<u64> =
                            marginal.iter().zip(counts).map(|(m, n)| m - n).collect();
                        entropy_nats(marginal, w)
                            - pc * entropy_nats(counts, wc)
                            - pn * entropy_nats(&rest, wn)
                    })
                    .sum();
                nats / self.ln_base
            }
        }
    }

    /// Exact quadratic score as an unreduced fraction.
    fn exact(&self, b: &Block) -> Frac {
        let w = self.d.total_units();
        if b.weight == 0 || b.weight == w {
            return Frac::zero();
        }
        let s = self.square_sums(b);
        let (wb, wc, wn) = (BigInt::from(w), BigInt::from(b.weight), BigInt::from(w - b.weight));
        let num = BigInt::from(s.a) * &wn * &wb + BigInt::from(s.b) * &wc * &wb
            - BigInt::from(s.c) * &wc * &wn;
        Frac {
            num,
            den: &wb * &wb * wc * wn,
        }
    }

    fn is_exact(&self) -> bool {
        self.objective == Objective::CuQuad
    }

    /// Whether `x` is close enough to the best float value `best` that the
    /// exact comparison (or the tie rule) has to decide.
    fn near(&self, x: f64, best: f64) -> bool {
        let tol = if self.is_exact() { 1e-9 } else { self.eps };
        best - x <= tol * best.abs().max(x.abs()).max(1.0)
    }
}

/// Nonnegative-denominator fraction compared by cross-multiplication.
#[derive(Debug, Clone)]
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn zero() -> Self {
        Self {
            num: BigInt::from(0),
            den: BigInt::from(1),
        }
    }

    fn add(&self, o: &Frac) -> Frac {
        Frac {
            num: &self.num * &o.den + &o.num * &self.den,
            den: &self.den * &o.den,
        }
    }

    fn sub(&self, o: &Frac) -> Frac {
        Frac {
            num: &self.num * &o.den - &o.num * &self.den,
            den: &self.den * &o.den,
        }
    }

    fn cmp(&self, o: &Frac) -> Ordering {
        (&self.num * &o.den).cmp(&(&o.num * &self.den))
    }
}

fn aggregate(opts: &ClusterOptions, total: f64, blocks: usize) -> f64 {
    match opts.aggregation {
        Aggregation::Mean => total / blocks as f64,
        Aggregation::Sum => total,
    }
}

fn population(d: &Dataset) -> Category {
    Category::from_indices(d, "all", 0..d.len()).expect("indices in range")
}

fn named_blocks(d: &Dataset, k: usize, blocks: &[Vec<usize>]) -> Vec<Category> {
    blocks
        .iter()
        .enumerate()
        .map(|(i, m)| {
            Category::from_indices(d, format!("k{k}-b{}", i + 1), m.iter().copied())
                .expect("indices in range")
        })
        .collect()
}

/// The best split of the dataset into a block and its complement, found by
/// enumerating every proper subset containing the first instance.
pub fn best_split_exhaustive(d: &Dataset, opts: &ClusterOptions) -> Result<Partitioning> {
    let n = d.len();
    if n > EXHAUSTIVE_MAX {
        return Err(Error::TooLarge {
            n,
            max: EXHAUSTIVE_MAX,
        });
    }
    if n < 2 {
        return Err(Error::TooSmall { n, min: 2 });
    }
    let scorer = Scorer::new(d, opts)?;
    let members_of = |mask: u32| -> Vec<usize> {
        std::iter::once(0)
            .chain((1..n).filter(|&i| mask >> (i - 1) & 1 == 1))
            .collect()
    };
    // mask over instances 1..n; the all-ones mask would be the full set
    let masks = (1u32 << (n - 1)) - 1;
    let values: Vec<f64> = (0..masks)
        .into_par_iter()
        .map(|mask| scorer.value(&scorer.block(members_of(mask))))
        .collect();
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut chosen: Option<(Vec<usize>, Option<Frac>)> = None;
    for (mask, &v) in values.iter().enumerate() {
        if !scorer.near(v, best) {
            continue;
        }
        let members = members_of(mask as u32);
        let exact = scorer.is_exact().then(|| scorer.exact(&scorer.block(members.clone())));
        let better = match &chosen {
            None => true,
            Some((cm, ce)) => {
                let by_value = match (&exact, ce) {
                    (Some(x), Some(y)) => x.cmp(y),
                    _ => Ordering::Equal,
                };
                by_value == Ordering::Greater
                    || (by_value == Ordering::Equal && members < *cm)
            }
        };
        if better {
            chosen = Some((members, exact));
        }
    }
    let (members, _) = chosen.expect("at least one split");
    let block = scorer.block(members.clone());
    let rest: Vec<usize> = (0..n).filter(|i| members.binary_search(i).is_err()).collect();
    let v = scorer.value(&block);
    Ok(Partitioning {
        blocks: named_blocks(d, 2, &[members, rest]),
        // a block and its complement score the same
        objective: aggregate(opts, 2.0 * v, 2),
        trace: None,
    })
}

/// Starting from singletons, repeatedly merges the pair of blocks that most
/// improves the objective until `k` blocks remain.
pub fn greedy_agglomerate(d: &Dataset, k: usize, opts: &ClusterOptions) -> Result<Partitioning> {
    let n = d.len();
    if k < 1 || k > n {
        return Err(Error::BlockCount { k, n });
    }
    let scorer = Scorer::new(d, opts)?;
    let mut blocks: Vec<Block> = (0..n).map(|i| scorer.block(vec![i])).collect();
    let mut values: Vec<f64> = blocks.iter().map(|b| scorer.value(b)).collect();
    let mut steps = Vec::with_capacity(n - k);

    while blocks.len() > k {
        let m = blocks.len();
        let pairs: Vec<(usize, usize)> =
            (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        let gains: Vec<(f64, Block)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let merged = scorer.merged(&blocks[i], &blocks[j]);
                let v = scorer.value(&merged);
                (v - values[i] - values[j], merged)
            })
            .collect();
        let best = gains.iter().map(|g| g.0).fold(f64::NEG_INFINITY, f64::max);

        // pairs are enumerated in lexicographic order of their member lists,
        // so the first candidate wins among exact ties
        let mut chosen: Option<(usize, Option<Frac>)> = None;
        for (p, (g, merged)) in gains.iter().enumerate() {
            if !scorer.near(*g, best) {
                continue;
            }
            let exact = scorer.is_exact().then(|| {
                let (i, j) = pairs[p];
                scorer
                    .exact(merged)
                    .sub(&scorer.exact(&blocks[i]))
                    .sub(&scorer.exact(&blocks[j]))
            });
            let better = match (&chosen, &exact) {
                (None, _) => true,
                (Some((_, Some(ce))), Some(x)) => x.cmp(ce) == Ordering::Greater,
                _ => false,
            };
            if better {
                chosen = Some((p, exact));
            }
        }
        let (p, _) = chosen.expect("at least one pair");
        let (i, j) = pairs[p];
        let merged = gains.into_iter().nth(p).expect("candidate exists").1;
        let left = blocks[i].members[0];
        let right = blocks[j].members[0];
        values[i] = scorer.value(&merged);
        blocks[i] = merged;
        blocks.remove(j);
        values.remove(j);
        steps.push(MergeStep {
            left,
            right,
            objective: aggregate(opts, values.iter().sum(), blocks.len()),
        });
    }

    let members: Vec<Vec<usize>> = blocks.iter().map(|b| b.members.clone()).collect();
    Ok(Partitioning {
        blocks: named_blocks(d, k, &members),
        objective: aggregate(opts, values.iter().sum(), blocks.len()),
        trace: Some(MergeTrace {
            instances: n,
            steps,
        }),
    })
}

/// Objective of an arbitrary partitioning under `opts`, exact for the
/// quadratic form.
pub fn partition_objective(d: &Dataset, blocks: &[Category], opts: &ClusterOptions) -> Result<f64> {
    let scorer = Scorer::new(d, opts)?;
    if scorer.is_exact() {
        let total = blocks
            .iter()
            .map(|c| scorer.exact(&scorer.block(c.members().to_vec())))
            .fold(Frac::zero(), |acc, f| acc.add(&f));
        let r = crate::Rational::new(total.num, total.den);
        Ok(aggregate(opts, crate::measures::to_f64(&r), blocks.len()))
    } else {
        let total: f64 = blocks
            .iter()
            .map(|c| scorer.value(&scorer.block(c.members().to_vec())))
            .sum();
        Ok(aggregate(opts, total, blocks.len()))
    }
}

/// Rebuilds a nested hierarchy from a merge trace. `block_counts` selects the
/// levels by number of blocks; empty means `[1, final block count]`. A count
/// of 1 (the whole population) is always available, other counts must have
/// occurred during the merges.
pub fn hierarchy_from_merges(
    d: &Dataset,
    trace: &MergeTrace,
    block_counts: &[usize],
) -> Result<Hierarchy> {
    let n = d.len();
    if trace.instances != n {
        return Err(Error::Trace(format!(
            "trace covers {} instances, dataset has {n}",
            trace.instances
        )));
    }
    if trace.steps.len() >= n {
        return Err(Error::Trace(format!(
            "{} merges cannot be applied to {n} instances",
            trace.steps.len()
        )));
    }
    let last = trace.final_blocks();
    let mut counts: Vec<usize> = if block_counts.is_empty() {
        vec![1, last]
    } else {
        block_counts.to_vec()
    };
    counts.sort_unstable();
    counts.dedup();
    if let Some(&bad) = counts.iter().find(|&&c| c != 1 && (c < last || c > n)) {
        return Err(Error::BlockCount { k: bad, n });
    }

    // owner[i] is the smallest member of i's block
    let mut owner: Vec<usize> = (0..n).collect();
    let mut snapshots = Vec::new();
    let snapshot = |owner: &[usize]| -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for (i, &o) in owner.iter().enumerate() {
            if slot[o] == usize::MAX {
                slot[o] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[slot[o]].push(i);
        }
        blocks
    };
    let mut blocks = n;
    if counts.contains(&blocks) {
        snapshots.push(snapshot(&owner));
    }
    for (s, step) in trace.steps.iter().enumerate() {
        if step.left >= n || step.right >= n {
            return Err(Error::Trace(format!("step {}: index out of range", s + 1)));
        }
        let (a, b) = (owner[step.left], owner[step.right]);
        if a == b {
            return Err(Error::Trace(format!(
                "step {}: instances {} and {} are already in one block",
                s + 1,
                step.left,
                step.right
            )));
        }
        let (keep, gone) = (a.min(b), a.max(b));
        for o in owner.iter_mut() {
            if *o == gone {
                *o = keep;
            }
        }
        blocks -= 1;
        if counts.contains(&blocks) {
            snapshots.push(snapshot(&owner));
        }
    }
    if counts.contains(&1) && blocks != 1 {
        snapshots.push(vec![(0..n).collect()]);
    }
    // snapshots run from fine to coarse
    snapshots.reverse();
    let levels = snapshots
        .iter()
        .map(|s| {
            let k = s.len();
            let cats = if k == 1 {
                vec![population(d)]
            } else {
                named_blocks(d, k, s)
            };
            Level::new(format!("k={k}"), cats)
        })
        .collect();
    Hierarchy::new(d, levels)
}
