//! RBF-kernel support vector machine trained with SMO.
//!
//! The solver follows Platt's sequential minimal optimization. The outer
//! loop alternates full sweeps with sweeps over the non-bound multipliers.
//! The second multiplier is chosen by the `max |E1 − E2|` heuristic over an
//! error cache kept for every example, falling back to seeded scans. A pass
//! is one full sweep. Training stops after a full sweep changes nothing or
//! after `max_passes` full sweeps; the `converged` flag then records whether
//! every KKT condition holds within `tol`.
//!
//! Decision function: `f(x) = Σ αᵢ yᵢ exp(−γ‖xᵢ − x‖²) + b`. Squared
//! distances are computed from integer counts, so they are exact.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::corpus::Sentiment;
use crate::error::{ensure_arg, Error, Result};
use crate::features::SparseFeatureVector;
use crate::scalar::Scalar;
use crate::seed;

use super::{check_training_set, Classifier};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams<F> {
    pub c: F,
    /// `None` selects `1 / (|V| · Var(X))` over the dense training matrix.
    pub gamma: Option<F>,
    pub tol: F,
    pub max_passes: u32,
    /// Kernel row cache budget in MiB.
    pub cache_mb: usize,
}

impl<F: Scalar> Default for SvmParams<F> {
    fn default() -> Self {
        SvmParams {
            c: F::one(),
            gamma: None,
            tol: F::of(1e-3),
            max_passes: 10,
            cache_mb: 256,
        }
    }
}

/// `1 / (|V| · Var(X))`, the variance taken over all `n · |V|` entries.
pub fn scale_gamma(x: &[SparseFeatureVector], dim: usize) -> f64 {
    let cells = x.len() as f64 * dim as f64;
    let sum: f64 = x.iter().map(|v| v.total() as f64).sum();
    let sum_sq: f64 = x.iter().map(SparseFeatureVector::norm_sq).sum();
    let mean = sum / cells;
    let var = sum_sq / cells - mean * mean;
    if var > 0.0 && dim > 0 {
        1.0 / (dim as f64 * var)
    } else {
        1.0
    }
}

/// Feature id -> (row, count) postings over a set of vectors.
#[derive(Debug, Clone, Default, PartialEq)]
struct InvertedIndex {
    postings: HashMap<u32, Vec<(u32, u32)>>,
    norms: Vec<u64>,
}

impl InvertedIndex {
    fn new(rows: &[SparseFeatureVector]) -> Self {
        let mut postings: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        for (r, v) in rows.iter().enumerate() {
            for &(id, c) in v.pairs() {
                postings.entry(id).or_default().push((r as u32, c));
            }
        }
        let norms = rows
            .iter()
            .map(|v| v.pairs().iter().map(|&(_, c)| c as u64 * c as u64).sum())
            .collect();
        InvertedIndex { postings, norms }
    }

    /// Exact squared distances from `x` to every indexed row.
    fn squared_distances(&self, x: &SparseFeatureVector) -> Vec<u64> {
        let mut dots = vec![0u64; self.norms.len()];
        for &(id, c) in x.pairs() {
            if let Some(list) = self.postings.get(&id) {
                for &(r, rc) in list {
                    dots[r as usize] += c as u64 * rc as u64;
                }
            }
        }
        let xn: u64 = x.pairs().iter().map(|&(_, c)| c as u64 * c as u64).sum();
        dots.iter()
            .zip(&self.norms)
            .map(|(&d, &n)| n + xn - 2 * d)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Svm<F> {
    pub support_vectors: Vec<SparseFeatureVector>,
    pub alphas: Vec<F>,
    pub sv_labels: Vec<i8>,
    pub bias: F,
    pub gamma: F,
    pub c: F,
    pub tol: F,
    pub converged: bool,
    /// Full sweeps performed.
    pub passes: u32,
    /// Successful joint optimization steps.
    pub steps: u64,
    index: InvertedIndex,
}

impl<F: PartialEq> PartialEq for Svm<F> {
    fn eq(&self, other: &Self) -> bool {
        self.support_vectors == other.support_vectors
            && self.alphas == other.alphas
            && self.sv_labels == other.sv_labels
            && self.bias == other.bias
            && self.gamma == other.gamma
            && self.c == other.c
            && self.tol == other.tol
            && self.converged == other.converged
            && self.passes == other.passes
            && self.steps == other.steps
    }
}

/// Least-recently-used cache of full kernel rows.
struct RowCache<F> {
    capacity: usize,
    clock: u64,
    rows: HashMap<usize, (u64, Arc<Vec<F>>)>,
    age: BTreeMap<u64, usize>,
}

impl<F> RowCache<F> {
    fn new(capacity: usize) -> Self {
        RowCache {
            capacity: capacity.max(2),
            clock: 0,
            rows: HashMap::new(),
            age: BTreeMap::new(),
        }
    }

    fn get(&mut self, i: usize) -> Option<Arc<Vec<F>>> {
        let (stamp, row) = self.rows.get_mut(&i)?;
        self.age.remove(stamp);
        self.clock += 1;
        *stamp = self.clock;
        self.age.insert(self.clock, i);
        Some(row.clone())
    }

    fn put(&mut self, i: usize, row: Arc<Vec<F>>) {
        if self.rows.len() >= self.capacity {
            if let Some((_, victim)) = self.age.pop_first() {
                self.rows.remove(&victim);
            }
        }
        self.clock += 1;
        self.age.insert(self.clock, i);
        self.rows.insert(i, (self.clock, row));
    }
}

struct Smo<'a, F> {
    x: &'a [SparseFeatureVector],
    y: Vec<F>,
    alpha: Vec<F>,
    errors: Vec<F>,
    b: F,
    c: F,
    tol: F,
    gamma: F,
    index: InvertedIndex,
    cache: RowCache<F>,
    rng: rand_chacha::ChaCha8Rng,
    steps: u64,
}

const PROGRESS_EPS: f64 = 1e-12;
const PARALLEL_ROW: usize = 4096;

impl<F: Scalar> Smo<'_, F> {
    fn kernel_of_distance(&self, d2: u64) -> F {
        (-self.gamma * F::of(d2 as f64)).exp()
    }

    fn kernel(&self, i: usize, j: usize) -> F {
        if i == j {
            return F::one();
        }
        let d2 = self.x[i].squared_distance(&self.x[j]) as u64;
        self.kernel_of_distance(d2)
    }

    fn row(&mut self, i: usize) -> Arc<Vec<F>> {
        if let Some(r) = self.cache.get(i) {
            return r;
        }
        let d2 = self.index.squared_distances(&self.x[i]);
        let gamma = self.gamma;
        let k = |d: &u64| (-gamma * F::of(*d as f64)).exp();
        let row: Vec<F> = if d2.len() >= PARALLEL_ROW {
            d2.par_iter().map(k).collect()
        } else {
            d2.iter().map(k).collect()
        };
        let row = Arc::new(row);
        self.cache.put(i, row.clone());
        row
    }

    fn non_bound(&self, i: usize) -> bool {
        self.alpha[i] > F::zero() && self.alpha[i] < self.c
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;
        let c = self.c;
        let zero = F::zero();
        let (lo, hi) = if y1 != y2 {
            ((a2 - a1).max(zero), (c + a2 - a1).min(c))
        } else {
            ((a1 + a2 - c).max(zero), (a1 + a2).min(c))
        };
        if lo >= hi {
            return false;
        }
        let k12 = self.kernel(i1, i2);
        let eta = F::of(2.0) - F::of(2.0) * k12;
        let mut a2_new = if eta > F::of(1e-12) {
            (a2 + y2 * (e1 - e2) / eta).max(lo).min(hi)
        } else {
            // identical points: the objective is linear in a2 along the line
            let slope = y2 * (e1 - e2);
            if slope > F::of(PROGRESS_EPS) {
                hi
            } else if slope < -F::of(PROGRESS_EPS) {
                lo
            } else {
                return false;
            }
        };
        let snap = c * F::of(1e-12);
        if a2_new < snap {
            a2_new = zero;
        } else if a2_new > c - snap {
            a2_new = c;
        }
        let eps = F::of(PROGRESS_EPS);
        if (a2_new - a2).abs() < eps * (a2_new + a2 + eps) {
            return false;
        }
        let mut a1_new = a1 + s * (a2 - a2_new);
        if a1_new < snap {
            a1_new = zero;
        } else if a1_new > c - snap {
            a1_new = c;
        }
        let (d1, d2) = (y1 * (a1_new - a1), y2 * (a2_new - a2));
        let b1 = self.b - e1 - d1 - d2 * k12;
        let b2 = self.b - e2 - d1 * k12 - d2;
        let b_new = if a1_new > zero && a1_new < c {
            b1
        } else if a2_new > zero && a2_new < c {
            b2
        } else {
            (b1 + b2) * F::of(0.5)
        };
        let db = b_new - self.b;
        let r1 = self.row(i1);
        let r2 = self.row(i2);
        for ((e, &k1), &k2) in self.errors.iter_mut().zip(r1.iter()).zip(r2.iter()) {
            *e += d1 * k1 + d2 * k2 + db;
        }
        self.alpha[i1] = a1_new;
        self.alpha[i2] = a2_new;
        self.b = b_new;
        self.steps += 1;
        true
    }

    fn violates_kkt(&self, i: usize) -> bool {
        let r = self.errors[i] * self.y[i];
        (r < -self.tol && self.alpha[i] < self.c) || (r > self.tol && self.alpha[i] > F::zero())
    }

    fn examine(&mut self, i2: usize) -> bool {
        if !self.violates_kkt(i2) {
            return false;
        }
        let n = self.x.len();
        let e2 = self.errors[i2];
        let mut best: Option<(usize, F)> = None;
        let mut non_bound = 0usize;
        for i in 0..n {
            if self.non_bound(i) {
                non_bound += 1;
                let gap = (self.errors[i] - e2).abs();
                if best.is_none_or(|(_, g)| gap > g) {
                    best = Some((i, gap));
                }
            }
        }
        if non_bound > 1 {
            if let Some((i1, _)) = best {
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        let start = self.rng.random_range(0..n);
        for k in 0..n {
            let i1 = (start + k) % n;
            if self.non_bound(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        let start = self.rng.random_range(0..n);
        for k in 0..n {
            let i1 = (start + k) % n;
            if self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }
}

impl<F: Scalar> Svm<F> {
    pub fn train(
        x: &[SparseFeatureVector],
        y: &[Sentiment],
        dim: usize,
        params: SvmParams<F>,
        seed: u64,
    ) -> Result<Self> {
        ensure_arg!(params.c > F::zero() && params.c.is_finite(), "C must be positive, got {}", params.c);
        ensure_arg!(params.tol > F::zero(), "tol must be positive, got {}", params.tol);
        ensure_arg!(params.max_passes >= 1, "max_passes must be at least 1");
        if let Some(g) = params.gamma {
            ensure_arg!(g > F::zero() && g.is_finite(), "gamma must be positive, got {g}");
        }
        check_training_set(x, y, dim)?;
        let n = x.len();
        let gamma = params.gamma.unwrap_or_else(|| F::of(scale_gamma(x, dim)));
        let row_bytes = n * std::mem::size_of::<F>();
        let capacity = (params.cache_mb << 20) / row_bytes.max(1);
        let labels: Vec<F> = y.iter().map(|l| F::of(l.sign() as f64)).collect();
        let mut smo = Smo {
            x,
            errors: labels.iter().map(|&l| -l).collect(),
            y: labels,
            alpha: vec![F::zero(); n],
            b: F::zero(),
            c: params.c,
            tol: params.tol,
            gamma,
            index: InvertedIndex::new(x),
            cache: RowCache::new(capacity),
            rng: seed::stage_rng(seed, "smo", 0),
            steps: 0,
        };

        // Hard stop for the non-bound sweeps between two full sweeps.
        let inner_limit = 50 * n.max(100);
        let mut passes = 0u32;
        let mut examine_all = true;
        let mut changed = 0usize;
        while (changed > 0 || examine_all) && passes < params.max_passes {
            changed = 0;
            if examine_all {
                let mut order: Vec<usize> = (0..n).collect();
                rand::seq::SliceRandom::shuffle(&mut order[..], &mut smo.rng);
                for i in order {
                    changed += smo.examine(i) as usize;
                }
                passes += 1;
                examine_all = false;
            } else {
                let mut inner = 0usize;
                loop {
                    let mut round = 0usize;
                    for i in 0..n {
                        if smo.non_bound(i) {
                            round += smo.examine(i) as usize;
                        }
                    }
                    inner += round;
                    if round == 0 || inner > inner_limit {
                        break;
                    }
                }
                changed = inner;
                examine_all = true;
            }
        }
        let converged = (0..n).all(|i| !smo.violates_kkt(i));

        let keep: Vec<usize> = (0..n).filter(|&i| smo.alpha[i] > F::zero()).collect();
        let support_vectors: Vec<SparseFeatureVector> = keep.iter().map(|&i| x[i].clone()).collect();
        Ok(Svm {
            index: InvertedIndex::new(&support_vectors),
            alphas: keep.iter().map(|&i| smo.alpha[i]).collect(),
            sv_labels: keep.iter().map(|&i| y[i].sign()).collect(),
            support_vectors,
            bias: smo.b,
            gamma,
            c: params.c,
            tol: params.tol,
            converged,
            passes,
            steps: smo.steps,
        })
    }

    /// Rebuilds a model from stored parameters.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        support_vectors: Vec<SparseFeatureVector>,
        alphas: Vec<F>,
        sv_labels: Vec<i8>,
        bias: F,
        gamma: F,
        c: F,
        tol: F,
        converged: bool,
        passes: u32,
        steps: u64,
    ) -> Result<Self> {
        let n = support_vectors.len();
        if alphas.len() != n || sv_labels.len() != n {
            return Err(Error::ModelFormat("support vector arrays differ in length".into()));
        }
        if sv_labels.iter().any(|&l| l != 1 && l != -1) {
            return Err(Error::ModelFormat("support vector labels must be +1 or -1".into()));
        }
        if !(gamma > F::zero()) || !(c > F::zero()) || !bias.is_finite() {
            return Err(Error::ModelFormat("invalid SVM scalars".into()));
        }
        if alphas.iter().any(|&a| !(a >= F::zero() && a <= c)) {
            return Err(Error::ModelFormat("multiplier outside [0, C]".into()));
        }
        Ok(Svm {
            index: InvertedIndex::new(&support_vectors),
            support_vectors,
            alphas,
            sv_labels,
            bias,
            gamma,
            c,
            tol,
            converged,
            passes,
            steps,
        })
    }

    /// Kernel values between `x` and every support vector.
    pub fn kernel_row(&self, x: &SparseFeatureVector) -> Vec<F> {
        self.index
            .squared_distances(x)
            .iter()
            .map(|&d| (-self.gamma * F::of(d as f64)).exp())
            .collect()
    }

    /// `Σ αᵢ yᵢ K(xᵢ, x) + b`, summed in support-vector order.
    pub fn decision_value(&self, x: &SparseFeatureVector) -> F {
        let k = self.kernel_row(x);
        let s: F = self
            .alphas
            .iter()
            .zip(&self.sv_labels)
            .zip(&k)
            .map(|((&a, &l), &kv)| a * F::of(l as f64) * kv)
            .sum();
        s + self.bias
    }

    /// Σ αᵢ yᵢ, zero at a feasible dual point.
    pub fn dual_balance(&self) -> F {
        self.alphas
            .iter()
            .zip(&self.sv_labels)
            .map(|(&a, &l)| a * F::of(l as f64))
            .sum()
    }

    pub fn n_support(&self) -> usize {
        self.support_vectors.len()
    }
}

impl<F: Scalar> Classifier<F> for Svm<F> {
    fn decision(&self, x: &SparseFeatureVector) -> F {
        self.decision_value(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentiment::{Negative, Positive};

    fn v(pairs: &[(u32, u32)]) -> SparseFeatureVector {
        SparseFeatureVector::new(pairs.to_vec()).unwrap()
    }

    fn clouds(n: usize, seed: u64) -> (Vec<SparseFeatureVector>, Vec<Sentiment>) {
        let mut rng = seed::rng(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let positive = i % 2 == 0;
            let base = if positive { 0 } else { 10 };
            let mut ids: Vec<u32> = (0..4).map(|_| base + rng.random_range(0..10)).collect();
            ids.push(20 + rng.random_range(0..5));
            x.push(SparseFeatureVector::from_ids(ids));
            y.push(if positive { Positive } else { Negative });
        }
        (x, y)
    }

    #[test]
    fn separates_point_clouds() {
        let (x, y) = clouds(200, 1);
        let m = Svm::<f64>::train(&x, &y, 25, SvmParams::default(), 5).unwrap();
        assert!(m.converged);
        let correct = x.iter().zip(&y).filter(|(q, &l)| m.predict(q) == l).count();
        assert_eq!(correct, x.len());
        assert!(m.dual_balance().abs() < 1e-8);
    }

    #[test]
    fn lone_support_vector_identity() {
        let sv = v(&[(0, 1), (3, 2)]);
        let m = Svm::<f64>::from_parts(vec![sv.clone()], vec![1.0], vec![1], 0.0, 0.5, 1.0, 1e-3, true, 1, 1).unwrap();
        assert_eq!(m.decision_value(&sv), 1.0);
        assert_eq!(m.predict(&sv), Positive);
    }

    #[test]
    fn tiny_gamma_reduces_to_balance_plus_bias() {
        let svs = vec![v(&[(0, 1)]), v(&[(1, 3)]), v(&[(2, 1), (0, 2)])];
        let m = Svm::<f64>::from_parts(svs, vec![0.5, 0.2, 0.3], vec![1, -1, -1], 0.25, 1e-300, 1.0, 1e-3, true, 1, 1)
            .unwrap();
        let d = m.decision_value(&v(&[(5, 7)]));
        assert!((d - (m.dual_balance() + 0.25)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let (x, y) = clouds(10, 1);
        let bad_c = SvmParams { c: 0.0, ..SvmParams::default() };
        assert!(Svm::<f64>::train(&x, &y, 25, bad_c, 0).is_err());
        let bad_gamma = SvmParams {
            gamma: Some(-1.0),
            ..SvmParams::default()
        };
        assert!(Svm::<f64>::train(&x, &y, 25, bad_gamma, 0).is_err());
        let one_class = vec![Positive; 10];
        assert!(matches!(
            Svm::<f64>::train(&x, &one_class, 25, SvmParams::default(), 0),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn handles_duplicate_and_empty_points() {
        let x = vec![v(&[]), v(&[]), v(&[(0, 1)]), v(&[(0, 1)]), v(&[(1, 1)])];
        let y = [Positive, Negative, Positive, Negative, Negative];
        let m = Svm::<f64>::train(&x, &y, 2, SvmParams::default(), 2).unwrap();
        assert!(m.dual_balance().abs() < 1e-8);
        assert!(m.alphas.iter().all(|&a| (0.0..=1.0).contains(&a)));
    }

    #[test]
    fn deterministic_given_seed() {
        let (x, y) = clouds(120, 4);
        let a = Svm::<f64>::train(&x, &y, 25, SvmParams::default(), 8).unwrap();
        let b = Svm::<f64>::train(&x, &y, 25, SvmParams::default(), 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lru_cache_evicts_oldest() {
        let mut c = RowCache::new(2);
        c.put(1, Arc::new(vec![1.0]));
        c.put(2, Arc::new(vec![2.0]));
        assert!(c.get(1).is_some());
        c.put(3, Arc::new(vec![3.0]));
        assert!(c.get(2).is_none());
        assert!(c.get(1).is_some() && c.get(3).is_some());
    }

    #[test]
    fn scale_gamma_matches_dense_variance() {
        let (x, _) = clouds(30, 3);
        let dense: Vec<f64> = x.iter().flat_map(|v| v.to_dense(25)).collect();
        let mean = dense.iter().sum::<f64>() / dense.len() as f64;
        let var = dense.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / dense.len() as f64;
        assert!((scale_gamma(&x, 25) - 1.0 / (25.0 * var)).abs() < 1e-12);
    }
}
