//! Categories (subsets of a dataset) and strictly nested hierarchies of them.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::Rational;

/// A named subset of a dataset's instances, stored as sorted instance indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    name: String,
    members: Vec<usize>,
}

impl Category {
    /// Builds a category from instance ids. Unknown or repeated ids are errors.
    pub fn from_ids<S: AsRef<str>>(
        d: &Dataset,
        name: impl Into<String>,
        ids: &[S],
    ) -> Result<Self> {
        let mut members = Vec::with_capacity(ids.len());
        for id in ids {
            let id = id.as_ref();
            members.push(d.index_of(id).ok_or_else(|| Error::UnknownId(id.to_string()))?);
        }
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Hierarchy(format!(
                "instance `{}` listed twice",
                d.instance(w[0]).id
            )));
        }
        Ok(Self {
            name: name.into(),
            members,
        })
    }

    /// Builds a category from instance indices; duplicates are collapsed.
    pub fn from_indices(
        d: &Dataset,
        name: impl Into<String>,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut members: Vec<usize> = indices.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&i| i >= d.len()) {
            return Err(Error::UnknownId(format!("#{bad}")));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self {
            name: name.into(),
            members,
        })
    }

    pub fn population(d: &Dataset) -> Self {
        Self {
            name: "population".into(),
            members: (0..d.len()).collect(),
        }
    }

    pub fn complement(&self, d: &Dataset) -> Self {
        let mut members = Vec::with_capacity(d.len() - self.members.len());
        let mut it = self.members.iter().peekable();
        for i in 0..d.len() {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                members.push(i);
            }
        }
        Self {
            name: format!("not {}", self.name),
            members,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    pub fn is_subset_of(&self, other: &Category) -> bool {
        self.members.iter().all(|&i| other.contains(i))
    }

    pub fn ids<'a>(&'a self, d: &'a Dataset) -> impl Iterator<Item = &'a str> + 'a {
        self.members.iter().map(move |&i| d.instance(i).id.as_str())
    }

    pub fn weight_units(&self, d: &Dataset) -> u64 {
        self.members.iter().map(|&i| d.units(i)).sum()
    }

    /// P(c): the category's share of the population weight.
    pub fn probability(&self, d: &Dataset) -> Rational {
        Rational::new(
            self.weight_units(d).into(),
            d.total_units().into(),
        )
    }

    pub(crate) fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &i in &self.members {
            mask[i] = true;
        }
        mask
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub name: String,
    pub categories: Vec<Category>,
}

impl Level {
    pub fn new(name: impl Into<String>, categories: Vec<Category>) -> Self {
        Self {
            name: name.into(),
            categories,
        }
    }
}

/// Levels of partitions, most general first, each nested in the one above.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hierarchy {
    levels: Vec<Level>,
}

impl Hierarchy {
    /// Validates that every level partitions `d`, that each category sits
    /// inside one category of the level above, and that levels get finer.
    pub fn new(d: &Dataset, levels: Vec<Level>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Hierarchy("no levels".into()));
        }
        let mut owner_above: Option<Vec<usize>> = None;
        for (k, level) in levels.iter().enumerate() {
            let owner = partition_owner(d, level)?;
            if let Some(above) = &owner_above {
                let prev = &levels[k - 1];
                if level.categories.len() <= prev.categories.len() {
                    return Err(Error::Hierarchy(format!(
                        "level `{}` has {} categories, not more than the {} of level `{}`",
                        level.name,
                        level.categories.len(),
                        prev.categories.len(),
                        prev.name
                    )));
                }
                for c in &level.categories {
                    let parent = above[c.members[0]];
                    if let Some(&stray) = c.members.iter().find(|&&i| above[i] != parent) {
                        return Err(Error::Hierarchy(format!(
                            "nesting violation: category `{}` of level `{}` spans `{}` and `{}` of level `{}`",
                            c.name,
                            level.name,
                            prev.categories[parent].name,
                            prev.categories[above[stray]].name,
                            prev.name
                        )));
                    }
                }
            }
            owner_above = Some(owner);
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, index: usize) -> &Level {
        &self.levels[index]
    }
}

/// Maps every instance to the index of the category holding it, checking that
/// the level is an exhaustive, disjoint cover by non-empty categories.
fn partition_owner(d: &Dataset, level: &Level) -> Result<Vec<usize>> {
    if level.categories.is_empty() {
        return Err(Error::Hierarchy(format!("level `{}` has no categories", level.name)));
    }
    let mut owner = vec![usize::MAX; d.len()];
    for (ci, c) in level.categories.iter().enumerate() {
        if c.is_empty() {
            return Err(Error::Hierarchy(format!(
                "level `{}`: category `{}` is empty",
                level.name, c.name
            )));
        }
        for &i in &c.members {
            if owner[i] != usize::MAX {
                return Err(Error::Hierarchy(format!(
                    "non-partition level `{}`: instance `{}` is in both `{}` and `{}`",
                    level.name,
                    d.instance(i).id,
                    level.categories[owner[i]].name,
                    c.name
                )));
            }
            owner[i] = ci;
        }
    }
    if let Some(missing) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::Hierarchy(format!(
            "non-partition level `{}`: instance `{}` is not covered",
            level.name,
            d.instance(missing).id
        )));
    }
    Ok(owner)
}
