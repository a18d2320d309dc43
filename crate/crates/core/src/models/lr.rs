//! Binary logistic regression (the two-class maximum-entropy model).
//!
//! Minimizes `J(w, b) = (1/n) Σ [softplus(z_i) − y_i z_i] + (l2/2)‖w‖²` with
//! `z_i = w·x_i + b` and `y_i ∈ {0, 1}`. The bias is not regularized.
//!
//! The default solver is SGD over a seeded shuffle per epoch. The L2 term is
//! applied as the proximal step `w ← w / (1 + η·l2)` after every example,
//! kept lazy through a global scale factor so each update costs O(nnz). The
//! reference solver is full-batch gradient descent with Armijo backtracking,
//! whose objective never increases from one epoch to the next.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::Sentiment;
use crate::error::{ensure_arg, Error, Result};
use crate::features::SparseFeatureVector;
use crate::scalar::{sigmoid, Scalar};
use crate::seed;

use super::{check_training_set, Classifier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LrSolver {
    Sgd,
    GradientDescent,
}

impl LrSolver {
    pub fn code(self) -> u8 {
        match self {
            LrSolver::Sgd => 0,
            LrSolver::GradientDescent => 1,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(LrSolver::Sgd),
            1 => Some(LrSolver::GradientDescent),
            _ => None,
        }
    }
}

/// Step size for epoch `t` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LrSchedule {
    /// `η₀ / √t`
    InvSqrt,
    Constant,
}

impl LrSchedule {
    pub fn rate<F: Scalar>(self, base: F, epoch: u32) -> F {
        match self {
            LrSchedule::InvSqrt => base / F::of(epoch as f64).sqrt(),
            LrSchedule::Constant => base,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            LrSchedule::InvSqrt => 0,
            LrSchedule::Constant => 1,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(LrSchedule::InvSqrt),
            1 => Some(LrSchedule::Constant),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrParams<F> {
    pub l2: F,
    pub epochs: u32,
    pub learning_rate: F,
    pub schedule: LrSchedule,
    pub solver: LrSolver,
}

impl<F: Scalar> Default for LrParams<F> {
    fn default() -> Self {
        LrParams {
            l2: F::of(1e-4),
            epochs: 10,
            learning_rate: F::of(0.1),
            schedule: LrSchedule::InvSqrt,
            solver: LrSolver::Sgd,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression<F> {
    pub weights: Vec<F>,
    pub bias: F,
    pub params: LrParams<F>,
    /// Full-data objective after each epoch.
    pub objective_history: Vec<F>,
}

fn sparse_dot<F: Scalar>(w: &[F], x: &SparseFeatureVector) -> F {
    x.pairs()
        .iter()
        .filter(|&&(i, _)| (i as usize) < w.len())
        .map(|&(i, c)| w[i as usize] * F::of_count(c))
        .sum()
}

/// softplus(z) − y z, computed without overflow.
fn example_loss<F: Scalar>(z: F, y: F) -> F {
    let softplus = if z > F::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    };
    softplus - y * z
}

fn target(label: Sentiment) -> f64 {
    label.index() as f64
}

/// J(w, b) as defined in the module docs.
pub fn objective<F: Scalar>(w: &[F], b: F, l2: F, x: &[SparseFeatureVector], y: &[Sentiment]) -> F {
    let n = F::of(x.len() as f64);
    let data: F = x
        .iter()
        .zip(y)
        .map(|(v, &l)| example_loss(sparse_dot(w, v) + b, F::of(target(l))))
        .sum();
    let reg: F = w.iter().map(|&wi| wi * wi).sum();
    data / n + l2 * F::of(0.5) * reg
}

/// Analytic gradient of [`objective`]: `(∂J/∂w, ∂J/∂b)`.
pub fn gradient<F: Scalar>(w: &[F], b: F, l2: F, x: &[SparseFeatureVector], y: &[Sentiment]) -> (Vec<F>, F) {
    let n = F::of(x.len() as f64);
    let mut gw: Vec<F> = w.iter().map(|&wi| l2 * wi).collect();
    let mut gb = F::zero();
    for (v, &l) in x.iter().zip(y) {
        let r = (sigmoid(sparse_dot(w, v) + b) - F::of(target(l))) / n;
        gb += r;
        for &(i, c) in v.pairs() {
            if (i as usize) < gw.len() {
                gw[i as usize] += r * F::of_count(c);
            }
        }
    }
    (gw, gb)
}

impl<F: Scalar> LogisticRegression<F> {
    pub fn train(
        x: &[SparseFeatureVector],
        y: &[Sentiment],
        dim: usize,
        params: LrParams<F>,
        seed: u64,
    ) -> Result<Self> {
        ensure_arg!(params.epochs >= 1, "logistic regression needs at least one epoch");
        ensure_arg!(
            params.l2 >= F::zero() && params.l2.is_finite(),
            "l2 must be finite and non-negative, got {}",
            params.l2
        );
        ensure_arg!(
            params.learning_rate > F::zero() && params.learning_rate.is_finite(),
            "learning rate must be positive, got {}",
            params.learning_rate
        );
        check_training_set(x, y, dim)?;
        match params.solver {
            LrSolver::Sgd => Self::train_sgd(x, y, dim, params, seed),
            LrSolver::GradientDescent => Self::train_gd(x, y, dim, params),
        }
    }

    fn train_sgd(
        x: &[SparseFeatureVector],
        y: &[Sentiment],
        dim: usize,
        params: LrParams<F>,
        seed: u64,
    ) -> Result<Self> {
        // w = scale * v
        let mut v = vec![F::zero(); dim];
        let mut scale = F::one();
        let mut bias = F::zero();
        let mut order: Vec<usize> = (0..x.len()).collect();
        let mut history = Vec::with_capacity(params.epochs as usize);
        let one = F::one();
        for epoch in 1..=params.epochs {
            order.shuffle(&mut seed::stage_rng(seed, "lr-epoch", epoch as u64));
            let eta = params.schedule.rate(params.learning_rate, epoch);
            let shrink = one / (one + eta * params.l2);
            for &i in &order {
                let z = scale * sparse_dot(&v, &x[i]) + bias;
                let g = sigmoid(z) - F::of(target(y[i]));
                let step = eta * g / scale;
                for &(j, c) in x[i].pairs() {
                    v[j as usize] -= step * F::of_count(c);
                }
                bias -= eta * g;
                scale *= shrink;
                if scale < F::of(1e-6) {
                    for vj in &mut v {
                        *vj *= scale;
                    }
                    scale = one;
                }
            }
            let w: Vec<F> = v.iter().map(|&vj| vj * scale).collect();
            let obj = objective(&w, bias, params.l2, x, y);
            if !obj.is_finite() || !bias.is_finite() {
                return Err(Error::Training(format!(
                    "logistic regression diverged at epoch {epoch} (objective {obj})"
                )));
            }
            history.push(obj);
        }
        let weights = v.into_iter().map(|vj| vj * scale).collect();
        Ok(LogisticRegression {
            weights,
            bias,
            params,
            objective_history: history,
        })
    }

    fn train_gd(x: &[SparseFeatureVector], y: &[Sentiment], dim: usize, params: LrParams<F>) -> Result<Self> {
        let mut w = vec![F::zero(); dim];
        let mut b = F::zero();
        let mut current = objective(&w, b, params.l2, x, y);
        let mut step = F::one();
        let armijo = F::of(1e-4);
        let half = F::of(0.5);
        let mut history = Vec::with_capacity(params.epochs as usize);
        for epoch in 1..=params.epochs {
            let (gw, gb) = gradient(&w, b, params.l2, x, y);
            let gnorm: F = gw.iter().map(|&g| g * g).sum::<F>() + gb * gb;
            if gnorm > F::zero() {
                step = (step * F::of(2.0)).min(F::of(1e6));
                for _ in 0..60 {
                    let cw: Vec<F> = w.iter().zip(&gw).map(|(&wi, &gi)| wi - step * gi).collect();
                    let cb = b - step * gb;
                    let candidate = objective(&cw, cb, params.l2, x, y);
                    if candidate.is_finite() && candidate <= current - armijo * step * gnorm {
                        w = cw;
                        b = cb;
                        current = candidate;
                        break;
                    }
                    step *= half;
                }
            }
            if !current.is_finite() {
                return Err(Error::Training(format!(
                    "logistic regression diverged at epoch {epoch} (objective {current})"
                )));
            }
            history.push(current);
        }
        Ok(LogisticRegression {
            weights: w,
            bias: b,
            params,
            objective_history: history,
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn linear(&self, x: &SparseFeatureVector) -> F {
        sparse_dot(&self.weights, x) + self.bias
    }

    /// P(Positive | x).
    pub fn probability(&self, x: &SparseFeatureVector) -> F {
        sigmoid(self.linear(x))
    }

    /// Label (Positive iff probability ≥ 0.5) and the probability.
    pub fn predict_with_probability(&self, x: &SparseFeatureVector) -> (Sentiment, F) {
        let p = self.probability(x);
        let label = if p >= F::of(0.5) { Sentiment::Positive } else { Sentiment::Negative };
        (label, p)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.weights.iter().all(|w| w.is_finite()) && self.bias.is_finite() {
            Ok(())
        } else {
            Err(Error::ModelFormat("non-finite logistic regression weights".into()))
        }
    }
}

impl<F: Scalar> Classifier<F> for LogisticRegression<F> {
    fn decision(&self, x: &SparseFeatureVector) -> F {
        self.linear(x)
    }

    fn predict(&self, x: &SparseFeatureVector) -> Sentiment {
        self.predict_with_probability(x).0
    }
}
