//! Brute-force reference implementations used to check the library.
//!
//! Everything here works from the instance list and the exact instance weights
//! only; nothing reuses the library's counting or scaling code.
#![allow(dead_code)]

use std::path::PathBuf;

use catutil::{AttributeSchema, Category, Dataset, Dimension, Instance, Rational};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn f(x: &Rational) -> f64 {
    x.to_f64().unwrap()
}

/// Dataset with one unit-weight instance per row of value indices; dimension
/// `k` gets `cards[k]` values named `v0, v1, ...`.
pub fn from_rows(cards: &[usize], rows: &[Vec<usize>], weights: Option<&[Rational]>) -> Dataset {
    let schema = AttributeSchema::new(
        cards
            .iter()
            .enumerate()
            .map(|(k, &c)| Dimension::new(format!("d{k}"), (0..c).map(|v| format!("v{v}")).collect()))
            .collect(),
    )
    .unwrap();
    let instances = rows
        .iter()
        .enumerate()
        .map(|(i, vals)| {
            let inst = Instance::new(format!("i{}", i + 1), vals.clone());
            match weights {
                Some(w) => inst.with_weight(w[i].clone()),
                None => inst,
            }
        })
        .collect();
    Dataset::new(schema, instances).unwrap()
}

/// Random dataset: `n` instances, `dims` dimensions of 2..=4 values each,
/// optionally with random weights from {1/2, 1, 2, 3}.
pub fn random_dataset<R: Rng>(rng: &mut R, n: usize, dims: usize, weighted: bool) -> Dataset {
    let cards: Vec<usize> = (0..dims).map(|_| rng.random_range(2..=4)).collect();
    let rows: Vec<Vec<usize>> = (0..n)
        .map(|_| cards.iter().map(|&c| rng.random_range(0..c)).collect())
        .collect();
    let weights: Vec<Rational> = (0..n)
        .map(|_| [r(1, 2), r(1, 1), r(2, 1), r(3, 1)][rng.random_range(0..4)].clone())
        .collect();
    from_rows(&cards, &rows, weighted.then_some(weights.as_slice()))
}

/// Proper non-empty subsets to test: all of them for small `n`, otherwise a
/// random sample of `sample` subsets.
pub fn test_subsets<R: Rng>(rng: &mut R, n: usize, sample: usize) -> Vec<Vec<usize>> {
    if n <= 6 {
        (1u32..(1 << n) - 1)
            .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
            .collect()
    } else {
        (0..sample)
            .map(|_| loop {
                let s: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
                if !s.is_empty() && s.len() < n {
                    break s;
                }
            })
            .collect()
    }
}

pub fn category(d: &Dataset, members: &[usize]) -> Category {
    Category::from_indices(d, "c", members.iter().copied()).unwrap()
}

/// Exact frequency tables computed straight from the instance weights.
pub struct Oracle<'a> {
    pub d: &'a Dataset,
}

impl<'a> Oracle<'a> {
    pub fn new(d: &'a Dataset) -> Self {
        Self { d }
    }

    fn weight(&self, members: &[usize]) -> Rational {
        members
            .iter()
            .map(|&i| self.d.instances()[i].weight.clone())
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn all(&self) -> Vec<usize> {
        (0..self.d.len()).collect()
    }

    pub fn complement(&self, members: &[usize]) -> Vec<usize> {
        (0..self.d.len()).filter(|i| !members.contains(i)).collect()
    }

    pub fn p_c(&self, members: &[usize]) -> Rational {
        self.weight(members) / self.weight(&self.all())
    }

    /// P(value | members) on dimension `k`.
    pub fn dist(&self, k: usize, members: &[usize]) -> Vec<Rational> {
        let card = self.d.schema().dimension(k).values.len();
        let total = self.weight(members);
        (0..card)
            .map(|v| {
                let with: Vec<usize> = members
                    .iter()
                    .copied()
                    .filter(|&i| self.d.instances()[i].values[k] == v)
                    .collect();
                self.weight(&with) / &total
            })
            .collect()
    }

    pub fn dims(&self) -> usize {
        self.d.schema().dimensions().len()
    }

    /// Mutual information between the {c, not c} split and each dimension,
    /// via U(C) + U(F) − U(C, F), summed over dimensions, in bits.
    pub fn info_partition_mi(&self, members: &[usize]) -> f64 {
        let rest = self.complement(members);
        let pc = self.p_c(members);
        let pn = Rational::one() - &pc;
        let u_c = entropy(&[f(&pc), f(&pn)]);
        (0..self.dims())
            .map(|k| {
                let pf: Vec<f64> = self.dist(k, &self.all()).iter().map(f).collect();
                let joint: Vec<f64> = self
                    .dist(k, members)
                    .iter()
                    .map(|p| f(&(p * &pc)))
                    .chain(self.dist(k, &rest).iter().map(|p| f(&(p * &pn))))
                    .collect();
                u_c + entropy(&pf) - entropy(&joint)
            })
            .sum()
    }

    /// P(c)·[U(F) − U(F|c)] summed over dimensions, in bits.
    pub fn info_category(&self, members: &[usize]) -> f64 {
        let pc = f(&self.p_c(members));
        (0..self.dims())
            .map(|k| {
                let pf: Vec<f64> = self.dist(k, &self.all()).iter().map(f).collect();
                let pfc: Vec<f64> = self.dist(k, members).iter().map(f).collect();
                pc * (entropy(&pf) - entropy(&pfc))
            })
            .sum()
    }

    fn sq(p: &[Rational]) -> Rational {
        p.iter().map(|x| x * x).fold(Rational::zero(), |a, b| a + b)
    }

    pub fn quad_partition(&self, members: &[usize]) -> Rational {
        let rest = self.complement(members);
        let pc = self.p_c(members);
        let pn = Rational::one() - &pc;
        (0..self.dims())
            .map(|k| {
                &pc * Self::sq(&self.dist(k, members)) + &pn * Self::sq(&self.dist(k, &rest))
                    - Self::sq(&self.dist(k, &self.all()))
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn quad_category(&self, members: &[usize]) -> Rational {
        let pc = self.p_c(members);
        (0..self.dims())
            .map(|k| &pc * (Self::sq(&self.dist(k, members)) - Self::sq(&self.dist(k, &self.all()))))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// p(c | value v on dimension k).
    pub fn cue(&self, k: usize, v: usize, members: &[usize]) -> Rational {
        let with: Vec<usize> = self
            .all()
            .into_iter()
            .filter(|&i| self.d.instances()[i].values[k] == v)
            .collect();
        let both: Vec<usize> = with.iter().copied().filter(|i| members.contains(i)).collect();
        self.weight(&both) / self.weight(&with)
    }

    /// (cue validity, category validity, collocation) averaged over dimensions.
    pub fn rivals(&self, members: &[usize], modal: bool) -> (Rational, Rational, Rational) {
        let mut out = (Rational::zero(), Rational::zero(), Rational::zero());
        for k in 0..self.dims() {
            let pfc = self.dist(k, members);
            if modal {
                let mut best = 0;
                for v in 1..pfc.len() {
                    if pfc[v] > pfc[best] {
                        best = v;
                    }
                }
                let cue = self.cue(k, best, members);
                out.0 += &cue;
                out.1 += &pfc[best];
                out.2 += &cue * &pfc[best];
            } else {
                for (v, p) in pfc.iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    let cue = self.cue(k, v, members);
                    out.0 += p * &cue;
                    out.1 += p * p;
                    out.2 += p * p * &cue;
                }
            }
        }
        let n = Rational::from_integer(self.dims().into());
        (out.0 / &n, out.1 / &n, out.2 / n)
    }
}

/// Shannon entropy in bits.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// Average ranks (1-based), ties sharing the mean of their positions.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && (x[idx[j + 1]] - x[idx[i]]).abs() <= 1e-12 {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &t in &idx[i..=j] {
            out[t] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation. Two constant vectors agree perfectly (1); a
/// constant against a varying vector carries no agreement (0).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    match (va == 0.0, vb == 0.0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 0.0,
        _ => cov / (va * vb).sqrt(),
    }
}

/// Every split of `0..n` into a block containing 0 and a non-empty rest,
/// scored by `score`; returns the best value. Independent of the library's
/// search.
pub fn brute_force_best_split(n: usize, score: impl Fn(&[usize]) -> Rational) -> Rational {
    let mut best: Option<Rational> = None;
    for m in 0u32..(1 << n) {
        if m & 1 == 0 || m == (1 << n) - 1 {
            continue;
        }
        let s: Vec<usize> = (0..n).filter(|&i| m >> i & 1 == 1).collect();
        let v = score(&s);
        if best.as_ref().map_or(true, |b| v > *b) {
            best = Some(v);
        }
    }
    best.unwrap()
}
