//! Populations of items described by nominal attribute dimensions.

use std::collections::{HashMap, HashSet};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hierarchy::Category;
use crate::Rational;

/// Scaled integer weights must stay exactly representable as `f64`.
const MAX_TOTAL_UNITS: u64 = 1 << 53;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dimension {
    pub name: String,
    pub values: Vec<String>,
}

impl Dimension {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Self {
        Self {
            name: name.into(),
            values,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.values.len()
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }
}

/// Ordered attribute dimensions, each with an ordered list of value labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSchema {
    dimensions: Vec<Dimension>,
}

impl AttributeSchema {
    pub fn new(dimensions: Vec<Dimension>) -> Result<Self> {
        if dimensions.is_empty() {
            return Err(Error::Schema("at least one dimension is required".into()));
        }
        let mut names = HashSet::new();
        for dim in &dimensions {
            if dim.name.is_empty() {
                return Err(Error::Schema("dimension names must be non-empty".into()));
            }
            if !names.insert(dim.name.as_str()) {
                return Err(Error::Schema(format!("duplicate dimension `{}`", dim.name)));
            }
            if dim.values.is_empty() {
                return Err(Error::Schema(format!("dimension `{}` has no values", dim.name)));
            }
            let mut seen = HashSet::new();
            for v in &dim.values {
                if !seen.insert(v.as_str()) {
                    return Err(Error::Schema(format!(
                        "dimension `{}` lists value `{v}` twice",
                        dim.name
                    )));
                }
            }
        }
        Ok(Self { dimensions })
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    pub fn len(&self) -> usize {
        self.dimensions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dimensions.is_empty()
    }

    pub fn dimension(&self, index: usize) -> &Dimension {
        &self.dimensions[index]
    }

    pub fn dimension_index(&self, name: &str) -> Option<usize> {
        self.dimensions.iter().position(|d| d.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    /// One value index per schema dimension.
    pub values: Vec<usize>,
    pub weight: Rational,
}

impl Instance {
    pub fn new(id: impl Into<String>, values: Vec<usize>) -> Self {
        Self {
            id: id.into(),
            values,
            weight: Rational::one(),
        }
    }

    pub fn with_weight(mut self, weight: Rational) -> Self {
        self.weight = weight;
        self
    }
}

/// A finite, immutable population of weighted instances.
///
/// Weights are kept exactly; internally they are rescaled to integer units
/// (clearing denominators, then dividing out common factors), which leaves every
/// probability unchanged and lets counts stay integral.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: AttributeSchema,
    instances: Vec<Instance>,
    index: HashMap<String, usize>,
    units: Vec<u64>,
    total_units: u64,
    marginals: Vec<Vec<u64>>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema && self.instances == other.instances
    }
}

impl Dataset {
    pub fn new(schema: AttributeSchema, instances: Vec<Instance>) -> Result<Self> {
        if instances.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut index = HashMap::with_capacity(instances.len());
        for (i, inst) in instances.iter().enumerate() {
            if inst.values.len() != schema.len() {
                return Err(Error::Instance {
                    id: inst.id.clone(),
                    message: format!(
                        "has {} values for {} dimensions",
                        inst.values.len(),
                        schema.len()
                    ),
                });
            }
            for (d, &v) in inst.values.iter().enumerate() {
                if v >= schema.dimension(d).cardinality() {
                    return Err(Error::Instance {
                        id: inst.id.clone(),
                        message: format!(
                            "value index {v} out of range for dimension `{}`",
                            schema.dimension(d).name
                        ),
                    });
                }
            }
            if inst.weight.is_negative() {
                return Err(Error::Instance {
                    id: inst.id.clone(),
                    message: "weight is negative".into(),
                });
            }
            if index.insert(inst.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(inst.id.clone()));
            }
        }

        let units = scale_to_units(instances.iter().map(|i| &i.weight))?;
        let total_units = units.iter().try_fold(0u64, |acc, &u| {
            acc.checked_add(u)
                .filter(|&t| t <= MAX_TOTAL_UNITS)
                .ok_or(Error::WeightPrecision)
        })?;
        if total_units == 0 {
            return Err(Error::ZeroTotalWeight);
        }

        let mut marginals: Vec<Vec<u64>> = schema
            .dimensions()
            .iter()
            .map(|d| vec![0; d.cardinality()])
            .collect();
        for (inst, &u) in instances.iter().zip(&units) {
            for (d, &v) in inst.values.iter().enumerate() {
                marginals[d][v] += u;
            }
        }

        Ok(Self {
            schema,
            instances,
            index,
            units,
            total_units,
            marginals,
        })
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn dimension_count(&self) -> usize {
        self.schema.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn instance(&self, index: usize) -> &Instance {
        &self.instances[index]
    }

    /// Value index of instance `i` on dimension `dim`.
    #[inline]
    pub fn value(&self, i: usize, dim: usize) -> usize {
        self.instances[i].values[dim]
    }

    /// Integer weight of instance `i` after rescaling.
    #[inline]
    pub fn units(&self, i: usize) -> u64 {
        self.units[i]
    }

    pub fn total_units(&self) -> u64 {
        self.total_units
    }

    /// Weighted value counts for dimension `dim` over the whole population.
    pub fn marginal_counts(&self, dim: usize) -> &[u64] {
        &self.marginals[dim]
    }

    pub fn total_weight(&self) -> Rational {
        self.instances.iter().map(|i| i.weight.clone()).sum()
    }

    /// True when no instance carries a weight other than 1.
    pub fn has_unit_weights(&self) -> bool {
        self.instances.iter().all(|i| i.weight.is_one())
    }

    /// Copy of the dataset with every weight multiplied by `factor` (> 0).
    pub fn rescaled(&self, factor: &Rational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::Weight(factor.to_string()));
        }
        let instances = self
            .instances
            .iter()
            .map(|i| i.clone().with_weight(&i.weight * factor))
            .collect();
        Self::new(self.schema.clone(), instances)
    }
}

fn scale_to_units<'a>(weights: impl Iterator<Item = &'a Rational> + Clone) -> Result<Vec<u64>> {
    let lcm = weights
        .clone()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scaled: Vec<BigInt> = weights.map(|w| w.numer() * (&lcm / w.denom())).collect();
    // dividing out the common factor keeps units small and scale-free
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, u| acc.gcd(u));
    scaled
        .iter()
        .map(|u| {
            let u = if gcd.is_zero() { u.clone() } else { u / &gcd };
            u.to_u64().ok_or(Error::WeightPrecision)
        })
        .collect()
}

/// Parses a nonnegative weight written as an integer, a decimal (`0.4`) or a
/// fraction (`2/5`). Decimals are converted exactly.
pub fn parse_weight(text: &str) -> Result<Rational> {
    let bad = || Error::Weight(text.to_string());
    let t = text.trim();
    if t.is_empty() || t.starts_with('-') {
        return Err(bad());
    }
    let t = t.strip_prefix('+').unwrap_or(t);
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_digits(n).ok_or_else(bad)?;
        let d = parse_digits(d).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let int_part = if int.is_empty() {
        BigInt::zero()
    } else {
        parse_digits(int).ok_or_else(bad)?
    };
    if frac.is_empty() {
        return Ok(Rational::from_integer(int_part));
    }
    let frac_part = parse_digits(frac).ok_or_else(bad)?;
    let scale = num_traits::pow(BigInt::from(10u8), frac.len());
    Ok(Rational::new(int_part * &scale + frac_part, scale))
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// Renders a weight so that [`parse_weight`] reads it back unchanged.
pub fn format_weight(w: &Rational) -> String {
    if w.is_integer() {
        w.numer().to_string()
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}

/// Probability vector over the values of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub dimension: usize,
    pub probabilities: Vec<f64>,
}

impl Distribution {
    /// Builds a distribution from nonnegative weighted counts with a positive sum.
    pub fn from_counts(dimension: usize, counts: &[u64]) -> Option<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return None;
        }
        let t = total as f64;
        Some(Self {
            dimension,
            probabilities: counts.iter().map(|&c| c as f64 / t).collect(),
        })
    }

    pub fn new(dimension: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Options(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Options(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self {
            dimension,
            probabilities,
        })
    }
}

/// Value distribution of `dim` among the members of `category`, or over the
/// whole population when `category` is `None`.
pub fn conditional_distribution(
    d: &Dataset,
    dim: usize,
    category: Option<&Category>,
) -> Result<Distribution> {
    if dim >= d.dimension_count() {
        return Err(Error::Options(format!("dimension index {dim} out of range")));
    }
    let counts = match category {
        None => d.marginal_counts(dim).to_vec(),
        Some(c) => {
            let mut counts = vec![0u64; d.schema().dimension(dim).cardinality()];
            for &i in c.members() {
                counts[d.value(i, dim)] += d.units(i);
            }
            counts
        }
    };
    let name = category.map_or("population", |c| c.name());
    Distribution::from_counts(dim, &counts).ok_or_else(|| Error::EmptyCategory(name.to_string()))
}
