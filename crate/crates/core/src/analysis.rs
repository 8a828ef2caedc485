//! Level-by-level averages of every measure and basic-level prediction.

use std::cmp::Ordering;

use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dataset::Dataset;
use crate::error::Result;
use crate::format::{format_report, json_number};
use crate::hierarchy::{Hierarchy, Level};
use crate::measures::{all_measures, FeatureRule, LevelWeighting, MeasureId, MeasureOptions, Score};
use crate::Rational;

/// Averages of one hierarchy level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRow {
    /// 1-based, most general level first.
    pub level: usize,
    pub name: String,
    pub categories: usize,
    /// One entry per measure, in [`MeasureId::ALL`] order.
    pub means: Vec<Score>,
}

impl LevelRow {
    pub fn mean(&self, m: MeasureId) -> &Score {
        &self.means[m.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub log_base: f64,
    pub feature_rule: FeatureRule,
    pub weighting: LevelWeighting,
    pub tie_epsilon: f64,
    pub rows: Vec<LevelRow>,
}

/// Computes every measure for every category and averages them per level.
/// Partition measures compare each category with its complement in the whole
/// dataset; a category equal to the population scores 0 on them.
pub fn level_report(d: &Dataset, h: &Hierarchy, opts: &MeasureOptions) -> Result<MeasureReport> {
    opts.dims(d)?;
    let rows = h
        .levels()
        .par_iter()
        .enumerate()
        .map(|(k, level)| level_row(d, k + 1, level, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureReport {
        log_base: opts.log_base,
        feature_rule: opts.feature_rule,
        weighting: opts.weighting,
        tie_epsilon: opts.tie_epsilon,
        rows,
    })
}

fn level_row(d: &Dataset, number: usize, level: &Level, opts: &MeasureOptions) -> Result<LevelRow> {
    let n = level.categories.len();
    let total = Rational::from_integer(d.total_units().into());
    let mut sums_f = vec![0.0f64; MeasureId::ALL.len()];
    let mut sums_q = vec![Rational::zero(); MeasureId::ALL.len()];
    for c in &level.categories {
        let scores = all_measures(d, c, opts)?;
        let (wf, wq) = match opts.weighting {
            LevelWeighting::Unweighted => (1.0, Rational::from_integer(1.into())),
            LevelWeighting::ByCategoryWeight => {
                let p = Rational::from_integer(c.weight_units(d).into()) / &total;
                (crate::measures::to_f64(&p), p)
            }
        };
        for (m, s) in scores.into_iter().enumerate() {
            match s.exact {
                Some(q) => sums_q[m] += q * &wq,
                None => sums_f[m] += s.value * wf,
            }
        }
    }
    let divisor = match opts.weighting {
        LevelWeighting::Unweighted => n,
        LevelWeighting::ByCategoryWeight => 1,
    };
    let means = MeasureId::ALL
        .iter()
        .map(|m| {
            let i = m.index();
            if m.is_entropy_based() {
                Score::approx(sums_f[i] / divisor as f64)
            } else {
                Score::exact(sums_q[i].clone() / Rational::from_integer(divisor.into()))
            }
        })
        .collect();
    Ok(LevelRow {
        level: number,
        name: level.name.clone(),
        categories: n,
        means,
    })
}

impl MeasureReport {
    /// Comment line describing the options that produced the report.
    pub fn header_comment(&self) -> String {
        format!(
            "# log-base={} feature-rule={} weighting={}",
            format_report(self.log_base),
            feature_rule_name(self.feature_rule),
            weighting_name(self.weighting)
        )
    }

    /// Tab-separated table: a comment line, a header, then one row per level
    /// with columns `level name categories` followed by the measures in
    /// [`MeasureId::ALL`] order.
    pub fn to_tsv(&self) -> String {
        let mut out = self.header_comment();
        out.push_str("\nlevel\tname\tcategories");
        for m in MeasureId::ALL {
            out.push('\t');
            out.push_str(m.as_str());
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{}\t{}\t{}", row.level, row.name, row.categories));
            for s in &row.means {
                out.push('\t');
                out.push_str(&format_report(s.value));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let means: serde_json::Map<String, Value> = MeasureId::ALL
                    .iter()
                    .map(|m| (m.as_str().to_string(), json_number(row.mean(*m).value)))
                    .collect();
                json!({
                    "level": row.level,
                    "name": row.name,
                    "categories": row.categories,
                    "means": means,
                })
            })
            .collect();
        json!({
            "log_base": json_number(self.log_base),
            "feature_rule": feature_rule_name(self.feature_rule),
            "weighting": weighting_name(self.weighting),
            "levels": rows,
        })
    }
}

fn feature_rule_name(r: FeatureRule) -> &'static str {
    match r {
        FeatureRule::Modal => "modal",
        FeatureRule::AllWeighted => "all-weighted",
    }
}

fn weighting_name(w: LevelWeighting) -> &'static str {
    match w {
        LevelWeighting::Unweighted => "unweighted",
        LevelWeighting::ByCategoryWeight => "by-category-weight",
    }
}

/// Outcome of picking the best level for one measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicLevelPrediction {
    pub measure: MeasureId,
    /// 1-based level number, or `None` when the tie could not be broken.
    pub winner: Option<usize>,
    /// Levels still tied for first place (just the winner when there is one).
    pub tied: Vec<usize>,
    /// The other Category Utility version, when it was consulted to break a tie.
    pub tie_break: Option<MeasureId>,
}

/// Picks the level with the highest mean of `measure`. A tie on one Category
/// Utility version is broken by the other version of the same measure.
pub fn predict_basic_level(report: &MeasureReport, measure: MeasureId) -> BasicLevelPrediction {
    let all: Vec<usize> = (0..report.rows.len()).collect();
    let tied = top_group(report, measure, &all);
    let mut prediction = BasicLevelPrediction {
        measure,
        winner: None,
        tied: tied.iter().map(|&i| report.rows[i].level).collect(),
        tie_break: None,
    };
    if tied.len() == 1 {
        prediction.winner = Some(report.rows[tied[0]].level);
        return prediction;
    }
    if let Some(other) = measure.counterpart() {
        let narrowed = top_group(report, other, &tied);
        prediction.tie_break = Some(other);
        prediction.tied = narrowed.iter().map(|&i| report.rows[i].level).collect();
        if narrowed.len() == 1 {
            prediction.winner = Some(report.rows[narrowed[0]].level);
        }
    }
    prediction
}

/// Row indices among `candidates` that tie with the maximum.
fn top_group(report: &MeasureReport, m: MeasureId, candidates: &[usize]) -> Vec<usize> {
    let eps = report.tie_epsilon;
    let Some(&first) = candidates.first() else {
        return Vec::new();
    };
    let best = candidates.iter().fold(first, |best, &i| {
        if report.rows[i].mean(m).compare(report.rows[best].mean(m), eps) == Ordering::Greater {
            i
        } else {
            best
        }
    });
    let top = report.rows[best].mean(m);
    candidates
        .iter()
        .copied()
        .filter(|&i| report.rows[i].mean(m).ties(top, eps))
        .collect()
}

/// Levels in descending order of `measure`, grouped where they tie. Each
/// group lists 1-based level numbers in ascending order.
pub fn ordering(report: &MeasureReport, measure: MeasureId) -> Vec<Vec<usize>> {
    let eps = report.tie_epsilon;
    let mut idx: Vec<usize> = (0..report.rows.len()).collect();
    idx.sort_by(|&a, &b| {
        let (sa, sb) = (report.rows[a].mean(measure), report.rows[b].mean(measure));
        // exact comparison (or raw float) keeps the sort a total order
        let raw = match (&sa.exact, &sb.exact) {
            (Some(x), Some(y)) => x.cmp(y),
            _ => sa.value.total_cmp(&sb.value),
        };
        raw.reverse().then(a.cmp(&b))
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut lead: Option<usize> = None;
    for i in idx {
        let joins = lead.is_some_and(|l| {
            report.rows[i].mean(measure).ties(report.rows[l].mean(measure), eps)
        });
        if joins {
            groups.last_mut().expect("group exists").push(report.rows[i].level);
        } else {
            lead = Some(i);
            groups.push(vec![report.rows[i].level]);
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups
}
