//! Multinomial naive Bayes with additive smoothing.

use crate::corpus::Sentiment;
use crate::error::{ensure_arg, Error, Result};
use crate::features::SparseFeatureVector;
use crate::scalar::{log_add_exp, Scalar};

use super::{check_training_set, Classifier};

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayes<F> {
    /// ln P(c), indexed by [`Sentiment::index`].
    pub log_prior: [F; 2],
    /// ln P(f | c) per class over the vocabulary.
    pub log_likelihood: [Vec<F>; 2],
    pub alpha: F,
}

impl<F: Scalar> NaiveBayes<F> {
    /// P(c) is the class frequency and
    /// P(f|c) = (count of f in c + alpha) / (tokens in c + alpha * |V|).
    pub fn train(x: &[SparseFeatureVector], y: &[Sentiment], dim: usize, alpha: F) -> Result<Self> {
        ensure_arg!(alpha > F::zero() && alpha.is_finite(), "smoothing alpha must be positive, got {alpha}");
        ensure_arg!(dim > 0, "naive Bayes needs a non-empty vocabulary");
        let docs = check_training_set(x, y, dim)?;
        let mut counts = [vec![0u64; dim], vec![0u64; dim]];
        let mut totals = [0u64; 2];
        for (v, label) in x.iter().zip(y) {
            let c = label.index();
            for &(id, n) in v.pairs() {
                counts[c][id as usize] += n as u64;
                totals[c] += n as u64;
            }
        }
        let n = F::of(x.len() as f64);
        let log_prior = [0, 1].map(|c| (F::of(docs[c] as f64) / n).ln());
        let log_likelihood = [0, 1].map(|c| {
            let denom = (F::of(totals[c] as f64) + alpha * F::of(dim as f64)).ln();
            counts[c]
                .iter()
                .map(|&k| (F::of(k as f64) + alpha).ln() - denom)
                .collect()
        });
        Ok(NaiveBayes {
            log_prior,
            log_likelihood,
            alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.log_likelihood[0].len()
    }

    /// ln P(c) + Σ n_i ln P(f_i | c). Ids outside the vocabulary are ignored.
    pub fn log_joint(&self, x: &SparseFeatureVector) -> [F; 2] {
        [0, 1].map(|c| {
            let ll = &self.log_likelihood[c];
            self.log_prior[c]
                + x.pairs()
                    .iter()
                    .filter(|&&(id, _)| (id as usize) < ll.len())
                    .map(|&(id, n)| F::of_count(n) * ll[id as usize])
                    .sum::<F>()
        })
    }

    /// Normalized ln P(c | d).
    pub fn log_posterior(&self, x: &SparseFeatureVector) -> [F; 2] {
        let j = self.log_joint(x);
        let z = log_add_exp(j[0], j[1]);
        [j[0] - z, j[1] - z]
    }

    /// Label (ties toward Positive) and per-class log posterior.
    pub fn predict_with_posterior(&self, x: &SparseFeatureVector) -> (Sentiment, [F; 2]) {
        let lp = self.log_posterior(x);
        let label = if lp[1] >= lp[0] { Sentiment::Positive } else { Sentiment::Negative };
        (label, lp)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let ok = self.alpha > F::zero()
            && self.log_likelihood[0].len() == self.log_likelihood[1].len()
            && self.log_prior.iter().chain(&self.log_likelihood[0]).chain(&self.log_likelihood[1]).all(|v| !v.is_nan());
        if ok {
            Ok(())
        } else {
            Err(Error::ModelFormat("inconsistent naive Bayes parameters".into()))
        }
    }
}

impl<F: Scalar> Classifier<F> for NaiveBayes<F> {
    /// ln P(+ | d) − ln P(− | d).
    fn decision(&self, x: &SparseFeatureVector) -> F {
        let j = self.log_joint(x);
        j[1] - j[0]
    }
}
