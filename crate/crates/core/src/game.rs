//! The guessing game behind the quadratic Category Utility.
//!
//! A sender draws an item (with probability proportional to its weight) and a
//! receiver guesses its value on every dimension, scoring one point per
//! correct dimension. What the receiver knows is set by [`GameCondition`];
//! how it guesses by [`Strategy`].
//!
//! Randomness: trial `t` of a run with seed `s` uses the ChaCha8 generator
//! keyed by `seed_from_u64(s)` on stream `t` (the baseline half of
//! [`empirical_gain`] uses stream `t | 2^63`). Per-trial scores are integers
//! summed exactly, so results do not depend on the number of threads.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counts::value_counts;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::hierarchy::Category;
use crate::measures::Score;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Guess each value with its believed probability.
    Matching,
    /// Always guess the most probable value (lowest index on ties).
    Modal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameCondition {
    /// The receiver knows only the population distribution.
    None,
    /// The receiver is told c or not-c and knows both conditionals.
    Partition,
    /// The receiver knows only the distribution inside c. Items outside c
    /// score as an uninformed guess about a fresh population draw.
    CategoryOnly,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Matching => "matching",
            Strategy::Modal => "modal",
        }
    }
}

impl GameCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            GameCondition::None => "none",
            GameCondition::Partition => "partition",
            GameCondition::CategoryOnly => "category-only",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for GameCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matching" => Ok(Strategy::Matching),
            "modal" => Ok(Strategy::Modal),
            _ => Err(Error::Options(format!("unknown strategy `{s}`"))),
        }
    }
}

impl FromStr for GameCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(GameCondition::None),
            "partition" => Ok(GameCondition::Partition),
            "category-only" => Ok(GameCondition::CategoryOnly),
            _ => Err(Error::Options(format!("unknown condition `{s}`"))),
        }
    }
}

/// Monte Carlo estimate of the expected score per trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Difference between a condition's score and the uninformed baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainEstimate {
    pub gain: f64,
    pub stderr: f64,
    pub condition: ScoreEstimate,
    pub baseline: ScoreEstimate,
}

/// Expected score per trial, exactly.
pub fn closed_form_score(
    d: &Dataset,
    c: Option<&Category>,
    cond: GameCondition,
    strat: Strategy,
) -> Result<Score> {
    let c = required_category(d, c, cond)?;
    let w = d.total_units();
    let wc = c.map_or(0, |c| c.weight_units(d));
    let hit = |counts: &[u64]| -> Rational {
        let t: u64 = counts.iter().sum();
        if t == 0 {
            return Rational::zero();
        }
        // expected hits for an item drawn from this block, times the block weight
        match strat {
            Strategy::Matching => {
                let sq: u128 = counts.iter().map(|&n| u128::from(n) * u128::from(n)).sum();
                Rational::new(sq.into(), t.into())
            }
            Strategy::Modal => Rational::from_integer((*counts.iter().max().unwrap_or(&0)).into()),
        }
    };
    let mut total = Rational::zero();
    for k in 0..d.dimension_count() {
        let marginal = d.marginal_counts(k);
        let pop = hit(marginal);
        total += match (cond, c) {
            (GameCondition::None, _) | (_, None) => pop,
            (GameCondition::Partition, Some(c)) => {
                let block = value_counts(d, c.members(), k);
                let rest: Vec<u64> = marginal.iter().zip(&block).map(|(m, n)| m - n).collect();
                hit(&block) + hit(&rest)
            }
            (GameCondition::CategoryOnly, Some(c)) => {
                let block = value_counts(d, c.members(), k);
                hit(&block) + pop * Rational::new((w - wc).into(), w.into())
            }
        };
    }
    Ok(Score::exact(total / Rational::from_integer(w.into())))
}

fn required_category<'a>(
    d: &Dataset,
    c: Option<&'a Category>,
    cond: GameCondition,
) -> Result<Option<&'a Category>> {
    if cond == GameCondition::None {
        return Ok(None);
    }
    let c = c.ok_or(Error::MissingCategory(cond.as_str()))?;
    if c.weight_units(d) == 0 {
        return Err(Error::EmptyCategory(c.name().to_string()));
    }
    Ok(Some(c))
}

/// Receiver beliefs about one block of items: cumulative counts per
/// dimension and the modal value.
struct Belief {
    cumulative: Vec<Vec<u64>>,
    totals: Vec<u64>,
    modal: Vec<usize>,
}

impl Belief {
    fn new(per_dim: Vec<Vec<u64>>) -> Self {
        let mut cumulative = Vec::with_capacity(per_dim.len());
        let mut totals = Vec::with_capacity(per_dim.len());
        let mut modal = Vec::with_capacity(per_dim.len());
        for counts in per_dim {
            let mut best = 0;
            for (i, &n) in counts.iter().enumerate() {
                if n > counts[best] {
                    best = i;
                }
            }
            modal.push(best);
            let cum: Vec<u64> = counts
                .iter()
                .scan(0u64, |acc, &n| {
                    *acc += n;
                    Some(*acc)
                })
                .collect();
            totals.push(*cum.last().unwrap_or(&0));
            cumulative.push(cum);
        }
        Self {
            cumulative,
            totals,
            modal,
        }
    }

    fn guess(&self, dim: usize, strat: Strategy, rng: &mut ChaCha8Rng) -> usize {
        match strat {
            Strategy::Modal => self.modal[dim],
            Strategy::Matching => {
                let r = rng.random_range(0..self.totals[dim]);
                self.cumulative[dim].partition_point(|&x| x <= r)
            }
        }
    }
}

struct Game<'a> {
    d: &'a Dataset,
    item_cumulative: Vec<u64>,
    in_c: Vec<bool>,
    population: Belief,
    inside: Option<Belief>,
    outside: Option<Belief>,
    cond: GameCondition,
    strat: Strategy,
}

impl<'a> Game<'a> {
    fn new(d: &'a Dataset, c: Option<&Category>, cond: GameCondition, strat: Strategy) -> Self {
        let dims = 0..d.dimension_count();
        let population = Belief::new(dims.clone().map(|k| d.marginal_counts(k).to_vec()).collect());
        let (in_c, inside, outside) = match c {
            Some(c) => {
                let block: Vec<Vec<u64>> =
                    dims.clone().map(|k| value_counts(d, c.members(), k)).collect();
                let rest: Vec<Vec<u64>> = dims
                    .map(|k| {
                        d.marginal_counts(k)
                            .iter()
                            .zip(&block[k])
                            .map(|(m, n)| m - n)
                            .collect()
                    })
                    .collect();
                (
                    c.mask(d.len()),
                    Some(Belief::new(block)),
                    Some(Belief::new(rest)),
                )
            }
            None => (vec![false; d.len()], None, None),
        };
        let item_cumulative = (0..d.len())
            .scan(0u64, |acc, i| {
                *acc += d.units(i);
                Some(*acc)
            })
            .collect();
        Self {
            d,
            item_cumulative,
            in_c,
            population,
            inside,
            outside,
            cond,
            strat,
        }
    }

    fn draw_item(&self, rng: &mut ChaCha8Rng) -> usize {
        let r = rng.random_range(0..self.d.total_units());
        self.item_cumulative.partition_point(|&x| x <= r)
    }

    fn score(&self, item: usize, belief: &Belief, rng: &mut ChaCha8Rng) -> u64 {
        (0..self.d.dimension_count())
            .map(|k| u64::from(belief.guess(k, self.strat, rng) == self.d.value(item, k)))
            .sum()
    }

    fn trial(&self, rng: &mut ChaCha8Rng) -> u64 {
        let item = self.draw_item(rng);
        match self.cond {
            GameCondition::None => self.score(item, &self.population, rng),
            GameCondition::Partition if self.in_c[item] => self.score(item, known(&self.inside), rng),
            GameCondition::Partition => self.score(item, known(&self.outside), rng),
            GameCondition::CategoryOnly if self.in_c[item] => {
                self.score(item, known(&self.inside), rng)
            }
            GameCondition::CategoryOnly => {
                let fresh = self.draw_item(rng);
                self.score(fresh, &self.population, rng)
            }
        }
    }

    fn run(&self, trials: u64, seed: u64, stream_base: u64) -> ScoreEstimate {
        const CHUNK: u64 = 1 << 16;
        let base = ChaCha8Rng::seed_from_u64(seed);
        let chunks = trials.div_ceil(CHUNK);
        let (sum, sum_sq) = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = base.clone();
                let mut sum = 0u64;
                let mut sum_sq = 0u128;
                for t in chunk * CHUNK..((chunk + 1) * CHUNK).min(trials) {
                    rng.set_stream(stream_base | t);
                    rng.set_word_pos(0);
                    let s = self.trial(&mut rng);
                    sum += s;
                    sum_sq += u128::from(s * s);
                }
                (sum, sum_sq)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let n = trials as f64;
        let mean = sum as f64 / n;
        let stderr = if trials > 1 {
            let var = (sum_sq as f64 - sum as f64 * mean) / (n - 1.0);
            (var.max(0.0) / n).sqrt()
        } else {
            0.0
        };
        ScoreEstimate {
            mean,
            stderr,
            trials,
            seed,
        }
    }
}

fn known(b: &Option<Belief>) -> &Belief {
    b.as_ref().expect("category beliefs present")
}

const BASELINE_STREAM: u64 = 1 << 63;

/// Plays `trials` rounds and reports the mean score and its standard error.
pub fn simulate(
    d: &Dataset,
    c: Option<&Category>,
    cond: GameCondition,
    strat: Strategy,
    trials: u64,
    seed: u64,
) -> Result<ScoreEstimate> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let c = required_category(d, c, cond)?;
    Ok(Game::new(d, c, cond, strat).run(trials, seed, 0))
}

/// Score under `cond` minus the uninformed score, each from its own streams.
pub fn empirical_gain(
    d: &Dataset,
    c: Option<&Category>,
    cond: GameCondition,
    strat: Strategy,
    trials: u64,
    seed: u64,
) -> Result<GainEstimate> {
    let condition = simulate(d, c, cond, strat, trials, seed)?;
    let baseline = Game::new(d, None, GameCondition::None, strat).run(trials, seed, BASELINE_STREAM);
    Ok(GainEstimate {
        gain: condition.mean - baseline.mean,
        stderr: condition.stderr.hypot(baseline.stderr),
        condition,
        baseline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeSchema, Dimension, Instance};

    fn d1() -> Dataset {
        let schema =
            AttributeSchema::new(vec![Dimension::new("color", vec!["a".into(), "b".into()])])
                .unwrap();
        Dataset::new(
            schema,
            [("i1", 0), ("i2", 0), ("i3", 1), ("i4", 1)]
                .iter()
                .map(|&(id, v)| Instance::new(id, vec![v]))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn closed_forms_on_d1() {
        let d = d1();
        let c = Category::from_ids(&d, "c", &["i1", "i2"]).unwrap();
        let none = closed_form_score(&d, None, GameCondition::None, Strategy::Matching).unwrap();
        assert_eq!(none.value, 0.5);
        let part =
            closed_form_score(&d, Some(&c), GameCondition::Partition, Strategy::Matching).unwrap();
        assert_eq!(part.value, 1.0);
        let only =
            closed_form_score(&d, Some(&c), GameCondition::CategoryOnly, Strategy::Matching)
                .unwrap();
        assert_eq!(only.value, 0.75);
        assert!(matches!(
            closed_form_score(&d, None, GameCondition::Partition, Strategy::Modal),
            Err(Error::MissingCategory("partition"))
        ));
    }

    #[test]
    fn deterministic_dataset_scores_every_dimension() {
        let schema = AttributeSchema::new(vec![
            Dimension::new("x", vec!["a".into()]),
            Dimension::new("y", vec!["b".into()]),
        ])
        .unwrap();
        let d = Dataset::new(
            schema,
            vec![Instance::new("1", vec![0, 0]), Instance::new("2", vec![0, 0])],
        )
        .unwrap();
        let c = Category::from_ids(&d, "c", &["1"]).unwrap();
        for cond in [GameCondition::None, GameCondition::Partition, GameCondition::CategoryOnly] {
            let e = simulate(&d, Some(&c), cond, Strategy::Matching, 1000, 3).unwrap();
            assert_eq!((e.mean, e.stderr), (2.0, 0.0));
        }
    }

    #[test]
    fn same_seed_same_estimate() {
        let d = d1();
        let a = simulate(&d, None, GameCondition::None, Strategy::Matching, 100_000, 9).unwrap();
        let b = simulate(&d, None, GameCondition::None, Strategy::Matching, 100_000, 9).unwrap();
        assert_eq!(a, b);
        let c = simulate(&d, None, GameCondition::None, Strategy::Matching, 100_000, 10).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn zero_trials_rejected() {
        let d = d1();
        assert!(matches!(
            simulate(&d, None, GameCondition::None, Strategy::Modal, 0, 1),
            Err(Error::ZeroTrials)
        ));
    }

    #[test]
    fn parse_names() {
        assert_eq!("category-only".parse::<GameCondition>().unwrap(), GameCondition::CategoryOnly);
        assert_eq!("modal".parse::<Strategy>().unwrap(), Strategy::Modal);
        assert!("x".parse::<Strategy>().is_err());
    }
}
