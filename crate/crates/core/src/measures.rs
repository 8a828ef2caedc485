//! Category Utility in its entropy and quadratic forms, plus cue validity,
//! category validity and collocation.
//!
//! Every measure is summed over the selected attribute dimensions. The
//! quadratic and rival measures are computed exactly on rationals; the entropy
//! measures in floating point.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::counts::{entropy_nats, value_counts, SquareSums};
use crate::dataset::{Dataset, Distribution};
use crate::error::{Error, Result};
use crate::hierarchy::Category;
use crate::Rational;

/// How the "features of a category" are chosen for the rival measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureRule {
    /// The most frequent value among members on each dimension.
    #[default]
    Modal,
    /// Every value, weighted by its frequency among members.
    AllWeighted,
}

/// How category scores are averaged into a level score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelWeighting {
    #[default]
    Unweighted,
    /// Each category counts in proportion to P(c).
    ByCategoryWeight,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureOptions {
    pub log_base: f64,
    /// Dimensions to include; `None` means all of them.
    pub dimensions: Option<Vec<usize>>,
    pub feature_rule: FeatureRule,
    /// Relative tolerance for comparing floating-point scores.
    pub tie_epsilon: f64,
    pub weighting: LevelWeighting,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            log_base: 2.0,
            dimensions: None,
            feature_rule: FeatureRule::Modal,
            tie_epsilon: 1e-9,
            weighting: LevelWeighting::Unweighted,
        }
    }
}

impl MeasureOptions {
    pub fn with_log_base(mut self, base: f64) -> Self {
        self.log_base = base;
        self
    }

    pub fn with_feature_rule(mut self, rule: FeatureRule) -> Self {
        self.feature_rule = rule;
        self
    }

    pub fn with_dimensions(mut self, dims: Vec<usize>) -> Self {
        self.dimensions = Some(dims);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.log_base.is_finite() && self.log_base > 1.0) {
            return Err(Error::Options(format!(
                "log base must be a finite number above 1, got {}",
                self.log_base
            )));
        }
        if !(self.tie_epsilon.is_finite() && self.tie_epsilon >= 0.0) {
            return Err(Error::Options(format!(
                "tie epsilon must be finite and nonnegative, got {}",
                self.tie_epsilon
            )));
        }
        if let Some(dims) = &self.dimensions {
            if dims.is_empty() {
                return Err(Error::Options("dimension subset is empty".into()));
            }
        }
        Ok(())
    }

    /// The validated list of dimension indices to sum over.
    pub(crate) fn dims(&self, d: &Dataset) -> Result<Vec<usize>> {
        self.validate()?;
        match &self.dimensions {
            None => Ok((0..d.dimension_count()).collect()),
            Some(dims) => {
                let mut seen = vec![false; d.dimension_count()];
                for &k in dims {
                    if k >= seen.len() {
                        return Err(Error::Options(format!("dimension index {k} out of range")));
                    }
                    if std::mem::replace(&mut seen[k], true) {
                        return Err(Error::Options(format!("dimension index {k} repeated")));
                    }
                }
                Ok(dims.clone())
            }
        }
    }
}

/// Identifier of a measure, written in kebab-case on the command line and in
/// reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureId {
    CuInfoPartition,
    CuInfoCategory,
    CuQuadPartition,
    CuQuadCategory,
    CueValidity,
    CategoryValidity,
    Collocation,
}

impl MeasureId {
    /// Report column order.
    pub const ALL: [MeasureId; 7] = [
        MeasureId::CuInfoPartition,
        MeasureId::CuInfoCategory,
        MeasureId::CuQuadPartition,
        MeasureId::CuQuadCategory,
        MeasureId::CueValidity,
        MeasureId::CategoryValidity,
        MeasureId::Collocation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureId::CuInfoPartition => "cu-info-partition",
            MeasureId::CuInfoCategory => "cu-info-category",
            MeasureId::CuQuadPartition => "cu-quad-partition",
            MeasureId::CuQuadCategory => "cu-quad-category",
            MeasureId::CueValidity => "cue-validity",
            MeasureId::CategoryValidity => "category-validity",
            MeasureId::Collocation => "collocation",
        }
    }

    /// Position in [`MeasureId::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// The other version of a Category Utility measure, used to break ties.
    pub fn counterpart(self) -> Option<MeasureId> {
        match self {
            MeasureId::CuInfoPartition => Some(MeasureId::CuQuadPartition),
            MeasureId::CuQuadPartition => Some(MeasureId::CuInfoPartition),
            MeasureId::CuInfoCategory => Some(MeasureId::CuQuadCategory),
            MeasureId::CuQuadCategory => Some(MeasureId::CuInfoCategory),
            _ => None,
        }
    }

    pub fn is_entropy_based(self) -> bool {
        matches!(self, MeasureId::CuInfoPartition | MeasureId::CuInfoCategory)
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownMeasure(s.to_string()))
    }
}

/// A measure value, carrying the exact rational when one is available.
#[derive(Debug, Clone, PartialEq)]
pub struct Score {
    pub value: f64,
    pub exact: Option<Rational>,
}

impl Score {
    pub fn approx(value: f64) -> Self {
        Self { value, exact: None }
    }

    pub fn exact(r: Rational) -> Self {
        Self {
            value: to_f64(&r),
            exact: Some(r),
        }
    }

    pub fn zero_exact() -> Self {
        Self::exact(Rational::zero())
    }

    /// Exact equality when both sides are exact, otherwise
    /// `|a − b| ≤ eps·max(|a|, |b|, 1)`.
    pub fn ties(&self, other: &Score, eps: f64) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => {
                let (a, b) = (self.value, other.value);
                (a - b).abs() <= eps * a.abs().max(b.abs()).max(1.0)
            }
        }
    }

    /// Ordering that treats ties (per [`Score::ties`]) as equal.
    pub fn compare(&self, other: &Score, eps: f64) -> Ordering {
        if self.ties(other, eps) {
            return Ordering::Equal;
        }
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a.cmp(b),
            _ => self.value.total_cmp(&other.value),
        }
    }
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    // BigRational::to_f64 rounds correctly and handles huge parts.
    r.to_f64().unwrap_or(f64::NAN)
}

/// Result of one measure on one category.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureValue {
    pub measure: MeasureId,
    /// Sum over the selected dimensions.
    pub score: Score,
    /// Contribution of each selected dimension, in selection order.
    pub per_dimension: Vec<Score>,
}

impl MeasureValue {
    pub fn value(&self) -> f64 {
        self.score.value
    }

    fn from_exact(measure: MeasureId, parts: Vec<Rational>) -> Self {
        let total: Rational = parts.iter().cloned().sum();
        Self {
            measure,
            score: Score::exact(total),
            per_dimension: parts.into_iter().map(Score::exact).collect(),
        }
    }

    fn from_f64(measure: MeasureId, parts: Vec<f64>) -> Self {
        Self {
            measure,
            score: Score::approx(parts.iter().sum()),
            per_dimension: parts.into_iter().map(Score::approx).collect(),
        }
    }
}

/// U(F) = −Σ p log p, with 0·log 0 = 0.
pub fn uncertainty(p: &Distribution, opts: &MeasureOptions) -> Result<f64> {
    opts.validate()?;
    let nats: f64 = p
        .probabilities
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum();
    Ok((nats / opts.log_base.ln()).max(0.0))
}

/// Block and complement weights, checking the category is usable.
fn weights(d: &Dataset, c: &Category, proper: bool) -> Result<(u64, u64)> {
    let wc = c.weight_units(d);
    if wc == 0 {
        return Err(Error::EmptyCategory(c.name().to_string()));
    }
    if proper && wc == d.total_units() {
        return Err(Error::FullCategory(c.name().to_string()));
    }
    Ok((d.total_units(), wc))
}

/// True when the block's value counts are an exact rescaling of the
/// marginal, i.e. the category carries no information on this dimension.
fn proportional(block: &[u64], marginal: &[u64], wc: u64, w: u64) -> bool {
    block
        .iter()
        .zip(marginal)
        .all(|(&b, &m)| b as u128 * w as u128 == m as u128 * wc as u128)
}

fn complement_counts(marginal: &[u64], block: &[u64]) -> Vec<u64> {
    marginal.iter().zip(block).map(|(m, n)| m - n).collect()
}

/// Expected reduction in attribute uncertainty from learning whether an item
/// is in `c` or in its complement. Equals the mutual information between the
/// two-block partition and the attributes.
pub fn cu_info_partition(d: &Dataset, c: &Category, opts: &MeasureOptions) -> Result<MeasureValue> {
    let dims = opts.dims(d)?;
    let (w, wc) = weights(d, c, true)?;
    Ok(MeasureValue::from_f64(
        MeasureId::CuInfoPartition,
        info_partition_parts(d, c.members(), &dims, w, wc, opts.log_base),
    ))
}

pub(crate) fn info_partition_parts(
    d: &Dataset,
    members: &[usize],
    dims: &[usize],
    w: u64,
    wc: u64,
    log_base: f64,
) -> Vec<f64> {
    let wn = w - wc;
    let (pc, pn) = (wc as f64 / w as f64, wn as f64 / w as f64);
    let ln_base = log_base.ln();
    dims.iter()
        .map(|&k| {
            let marginal = d.marginal_counts(k);
            let block = value_counts(d, members, k);
            if proportional(&block, marginal, wc, w) {
                return 0.0;
            }
            let rest = complement_counts(marginal, &block);
            let nats = entropy_nats(marginal, w)
                - pc * entropy_nats(&block, wc)
                - pn * entropy_nats(&rest, wn);
            nats / ln_base
        })
        .collect()
}

/// P(c)·[U(F) − U(F|c)] summed over dimensions. Negative when members are
/// more varied than the population.
pub fn cu_info_category(d: &Dataset, c: &Category, opts: &MeasureOptions) -> Result<MeasureValue> {
    let dims = opts.dims(d)?;
    let (w, wc) = weights(d, c, false)?;
    let pc = wc as f64 / w as f64;
    let ln_base = opts.log_base.ln();
    let parts = dims
        .iter()
        .map(|&k| {
            if wc == w {
                return 0.0;
            }
            let block = value_counts(d, c.members(), k);
            if proportional(&block, d.marginal_counts(k), wc, w) {
                return 0.0;
            }
            pc * (entropy_nats(d.marginal_counts(k), w) - entropy_nats(&block, wc)) / ln_base
        })
        .collect();
    Ok(MeasureValue::from_f64(MeasureId::CuInfoCategory, parts))
}

fn square_sums(d: &Dataset, c: &Category, k: usize) -> SquareSums {
    let mut s = SquareSums::default();
    s.add_dimension(&value_counts(d, c.members(), k), d.marginal_counts(k));
    s
}

/// Expected gain in correct guesses for a probability-matching receiver told
/// whether the item is in `c` or not.
pub fn cu_quad_partition(d: &Dataset, c: &Category, opts: &MeasureOptions) -> Result<MeasureValue> {
    let dims = opts.dims(d)?;
    let (w, wc) = weights(d, c, true)?;
    let parts = dims
        .iter()
        .map(|&k| square_sums(d, c, k).quad_partition_exact(w, wc))
        .collect();
    Ok(MeasureValue::from_exact(MeasureId::CuQuadPartition, parts))
}

/// P(c)·[ΣP(f|c)² − ΣP(f)²] summed over dimensions.
pub fn cu_quad_category(d: &Dataset, c: &Category, opts: &MeasureOptions) -> Result<MeasureValue> {
    let dims = opts.dims(d)?;
    let (w, wc) = weights(d, c, false)?;
    let parts = dims
        .iter()
        .map(|&k| square_sums(d, c, k).quad_category_exact(w, wc))
        .collect();
    Ok(MeasureValue::from_exact(MeasureId::CuQuadCategory, parts))
}

/// Cue validity, category validity and collocation of one category, each the
/// mean over the selected dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct RivalMeasures {
    pub cue_validity: Score,
    pub category_validity: Score,
    pub collocation: Score,
}

pub fn rival_measures(d: &Dataset, c: &Category, opts: &MeasureOptions) -> Result<RivalMeasures> {
    let dims = opts.dims(d)?;
    let (_, wc) = weights(d, c, false)?;
    let wc_big = BigInt::from(wc);
    let mut cue = Rational::zero();
    let mut cv = Rational::zero();
    let mut col = Rational::zero();
    for &k in &dims {
        let block = value_counts(d, c.members(), k);
        let marginal = d.marginal_counts(k);
        match opts.feature_rule {
            FeatureRule::Modal => {
                // max_by_key keeps the last maximum, so scan for the first.
                let mut f = 0;
                for (i, &n) in block.iter().enumerate() {
                    if n > block[f] {
                        f = i;
                    }
                }
                let p_c_f = Rational::new(block[f].into(), marginal[f].into());
                let p_f_c = Rational::new(block[f].into(), wc_big.clone());
                col += &p_c_f * &p_f_c;
                cue += p_c_f;
                cv += p_f_c;
            }
            FeatureRule::AllWeighted => {
                for (&n, &m) in block.iter().zip(marginal) {
                    if n == 0 {
                        continue;
                    }
                    let p_c_f = Rational::new(n.into(), m.into());
                    let p_f_c = Rational::new(n.into(), wc_big.clone());
                    cue += &p_f_c * &p_c_f;
                    cv += &p_f_c * &p_f_c;
                    col += &p_f_c * &p_f_c * &p_c_f;
                }
            }
        }
    }
    let n = Rational::from_integer(dims.len().into());
    Ok(RivalMeasures {
        cue_validity: Score::exact(cue / &n),
        category_validity: Score::exact(cv / &n),
        collocation: Score::exact(col / n),
    })
}

/// All seven measures of one category, in [`MeasureId::ALL`] order. Partition
/// measures of a category covering the whole population are reported as 0.
pub(crate) fn all_measures(d: &Dataset, c: &Category, opts: &MeasureOptions) -> Result<Vec<Score>> {
    let full = c.weight_units(d) == d.total_units() && !c.is_empty();
    let (info_p, quad_p) = if full {
        (Score::approx(0.0), Score::zero_exact())
    } else {
        (
            cu_info_partition(d, c, opts)?.score,
            cu_quad_partition(d, c, opts)?.score,
        )
    };
    let rivals = rival_measures(d, c, opts)?;
    Ok(vec![
        info_p,
        cu_info_category(d, c, opts)?.score,
        quad_p,
        cu_quad_category(d, c, opts)?.score,
        rivals.cue_validity,
        rivals.category_validity,
        rivals.collocation,
    ])
}
