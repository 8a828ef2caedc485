//! Category Utility over nominal-attribute populations.
//!
//! The crate computes how useful a category is for predicting the attribute
//! values of its members, in two forms:
//!
//! * the information-theoretic form, the expected reduction in attribute
//!   uncertainty (Shannon entropy) from learning category membership, and
//! * the quadratic "guessing game" form, the expected gain in correct guesses
//!   of a probability-matching receiver who is told the category.
//!
//! Alongside these it computes the classic rivals (cue validity, category
//! validity and collocation), averages everything per level of a category
//! hierarchy to predict the preferred ("basic") level, simulates the guessing
//! game, and searches for categorizations that maximize Category Utility.
//!
//! All probabilities are weighted relative frequencies over the dataset, so the
//! population a category is evaluated in is part of the input.

pub mod analysis;
pub mod cluster;
mod counts;
pub mod dataset;
mod error;
pub mod format;
pub mod game;
pub mod hierarchy;
pub mod io;
pub mod measures;

pub use analysis::{
    level_report, ordering, predict_basic_level, BasicLevelPrediction, LevelRow, MeasureReport,
};
pub use cluster::{
    best_split_exhaustive, greedy_agglomerate, hierarchy_from_merges, partition_objective,
    Aggregation, ClusterOptions,
    MergeStep, MergeTrace, Objective, Partitioning,
};
pub use dataset::{
    conditional_distribution, AttributeSchema, Dataset, Dimension, Distribution, Instance,
};
pub use error::{Error, Result};
pub use game::{
    closed_form_score, empirical_gain, simulate, GainEstimate, GameCondition, ScoreEstimate,
    Strategy,
};
pub use hierarchy::{Category, Hierarchy, Level};
pub use io::{
    category_to_json, dataset_to_csv, hierarchy_to_json, parse_category, parse_dataset,
    parse_hierarchy,
};
pub use measures::{
    cu_info_category, cu_info_partition, cu_quad_category, cu_quad_partition, rival_measures,
    uncertainty, FeatureRule, LevelWeighting, MeasureId, MeasureOptions, MeasureValue,
    RivalMeasures, Score,
};

/// Exact rational number used for weights and frequency-derived probabilities.
pub type Rational = num_rational::BigRational;
