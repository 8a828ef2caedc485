//! Shared input generators for the catutil benchmarks in `benches/`.

use catutil::{AttributeSchema, Category, Dataset, Dimension, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded random dataset with `n` unit-weight instances over `dims`
/// dimensions of `values` values each.
pub fn random_dataset(seed: u64, n: usize, dims: usize, values: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schema = AttributeSchema::new(
        (0..dims)
            .map(|k| Dimension::new(format!("d{k}"), (0..values).map(|v| format!("v{v}")).collect()))
            .collect(),
    )
    .expect("valid schema");
    let instances = (0..n)
        .map(|i| Instance::new(format!("x{i}"), (0..dims).map(|_| rng.random_range(0..values)).collect()))
        .collect();
    Dataset::new(schema, instances).expect("valid dataset")
}

/// The first half of the instances.
pub fn half(d: &Dataset) -> Category {
    Category::from_indices(d, "half", 0..d.len() / 2).expect("valid category")
}
