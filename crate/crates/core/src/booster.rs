//! From a globally stable learner to a list replicable one.
//!
//! The boosted learner splits its input into `T` batches of `n0` examples
//! followed by a holdout of `n2` examples, runs the inner learner on every
//! batch, keeps the hypotheses produced on at least `(ρ - α/2)·T` batches and
//! returns the most frequent of those whose holdout loss is at most `3ε/2`.
//!
//! Constants: `T = ⌈8 ln(4/δ) / α²⌉` and `n2 = ⌈2 ln(4(L+1)/δ) / ε²⌉`, from
//! two-sided Hoeffding bounds with the failure budget split `δ/2 + δ/2`
//! between the batch frequencies and the holdout losses.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::concepts::Hypothesis;
use crate::distributions::{mistakes, Sample};
use crate::error::{Error, Result};
use crate::learners::{Learner, Outcome};
use crate::seed::Seed;

const MODULE: &str = "booster";

// Guards floor/ceil against representation error, e.g. (0.31 - 0.03) * 100.
const ROUNDING_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoostParams {
    pub rho: f64,
    pub eps: f64,
    pub delta: f64,
    /// `L = ⌊1/ρ⌋`.
    pub list_size: usize,
    /// `α = ρ - 1/(L+1)`.
    pub alpha: f64,
    /// Number of batches `T`.
    pub batches: usize,
    pub n0: usize,
    /// `n1 = T·n0`.
    pub n1: usize,
    pub n2: usize,
}

impl BoostParams {
    /// Batch count a hypothesis needs to become a candidate.
    pub fn frequency_threshold(&self) -> usize {
        threshold_count(self.rho, self.alpha, self.batches)
    }

    pub fn sample_size(&self) -> usize {
        self.n1 + self.n2
    }
}

pub(crate) fn threshold_count(rho: f64, alpha: f64, batches: usize) -> usize {
    ((rho - alpha / 2.0) * batches as f64 - ROUNDING_SLACK).ceil().max(0.0) as usize
}

pub fn boost_params(rho: f64, eps: f64, delta: f64, n0: usize) -> Result<BoostParams> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::argument(MODULE, format!("rho={rho} must lie in (0, 1]")));
    }
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::argument(MODULE, format!("eps={eps} and delta={delta} must lie in (0, 1)")));
    }
    if n0 == 0 {
        return Err(Error::argument(MODULE, "inner sample size n0 must be at least 1"));
    }
    let list_size = (1.0 / rho + ROUNDING_SLACK).floor() as usize;
    let alpha = rho - 1.0 / (list_size + 1) as f64;
    if !(alpha > 0.0) || list_size == 0 {
        return Err(Error::argument(MODULE, format!("rho={rho} gives no positive margin alpha")));
    }
    let batches = (8.0 * (4.0 / delta).ln() / (alpha * alpha) - ROUNDING_SLACK).ceil() as usize;
    let n2 = (2.0 * (4.0 * (list_size + 1) as f64 / delta).ln() / (eps * eps) - ROUNDING_SLACK).ceil() as usize;
    Ok(BoostParams {
        rho,
        eps,
        delta,
        list_size,
        alpha,
        batches: batches.max(1),
        n0,
        n1: batches.max(1) * n0,
        n2: n2.max(1),
    })
}

/// Per-run diagnostics of the boosted learner.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostRun {
    pub outcome: Outcome,
    /// Batch counts of every inner output.
    pub batch_counts: BTreeMap<Hypothesis, usize>,
    /// Candidates passing the frequency test with their holdout losses.
    pub candidates: Vec<(Hypothesis, usize, f64)>,
}

pub struct BoostedLearner<L> {
    inner: L,
    params: BoostParams,
    fallback: Hypothesis,
}

pub fn boost<L: Learner>(inner: L, params: BoostParams, fallback: Hypothesis) -> Result<BoostedLearner<L>> {
    if fallback.len() != inner.domain_len() {
        return Err(Error::domain(MODULE, "fallback hypothesis length differs from the learner's domain"));
    }
    Ok(BoostedLearner {
        inner,
        params,
        fallback,
    })
}

impl<L: Learner> BoostedLearner<L> {
    pub fn params(&self) -> &BoostParams {
        &self.params
    }

    pub fn run(&self, sample: &Sample, seed: Seed) -> Result<BoostRun> {
        let p = &self.params;
        if sample.len() < p.n1 + p.n2 {
            return Err(Error::argument(
                MODULE,
                format!("sample of {} examples, need n1 + n2 = {}", sample.len(), p.n1 + p.n2),
            ));
        }
        let mut batch_counts: BTreeMap<Hypothesis, usize> = BTreeMap::new();
        for b in 0..p.batches {
            let batch = sample.slice(b * p.n0..(b + 1) * p.n0);
            let out = self.inner.learn(&batch, seed.child(b as u64, "batch"))?;
            *batch_counts.entry(out.hypothesis).or_default() += 1;
        }
        let holdout = sample.slice(sample.len() - p.n2..sample.len());
        let threshold = p.frequency_threshold();
        let limit = 1.5 * p.eps;
        let mut candidates = Vec::new();
        for (h, &c) in &batch_counts {
            if c >= threshold {
                let loss = mistakes(h, &holdout)? as f64 / p.n2 as f64;
                candidates.push((*h, c, loss));
            }
        }
        // BTreeMap order makes the first maximum the canonical one.
        let best = candidates
            .iter()
            .filter(|(_, _, loss)| *loss <= limit + ROUNDING_SLACK)
            .fold(None::<(Hypothesis, usize)>, |acc, &(h, c, _)| match acc {
                Some((_, bc)) if bc >= c => acc,
                _ => Some((h, c)),
            });
        let outcome = match best {
            Some((h, _)) => Outcome::new(h),
            None => Outcome::fallback(self.fallback),
        };
        Ok(BoostRun {
            outcome,
            batch_counts,
            candidates,
        })
    }
}

impl<L: Learner> Learner for BoostedLearner<L> {
    fn name(&self) -> String {
        format!(
            "boost(inner={},rho={},eps={},delta={})",
            self.inner.name(),
            self.params.rho,
            self.params.eps,
            self.params.delta
        )
    }
    fn domain_len(&self) -> usize {
        self.inner.domain_len()
    }
    fn learn(&self, sample: &Sample, seed: Seed) -> Result<Outcome> {
        Ok(self.run(sample, seed)?.outcome)
    }
    fn is_deterministic(&self) -> bool {
        self.inner.is_deterministic()
    }
    fn is_proper(&self) -> bool {
        self.inner.is_proper()
    }
    fn required_sample_size(&self) -> Option<usize> {
        Some(self.params.sample_size())
    }
    // Exact laws are out of reach: T inner runs per sample.
    fn output_law(&self, _sample: &Sample) -> Result<Option<crate::learners::OutputLaw>> {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::Label;
    use crate::distributions::{draw_sample, FiniteDistribution, LabeledExample};
    use crate::learners::FixedLawLearner;

    fn h(s: &str) -> Hypothesis {
        s.parse().unwrap()
    }

    #[test]
    fn params_arithmetic() {
        let p = boost_params(0.31, 0.1, 0.05, 1).unwrap();
        assert_eq!(p.list_size, 3);
        assert!((p.alpha - 0.06).abs() < 1e-12);
        let p = boost_params(0.5, 0.1, 0.05, 1).unwrap();
        assert_eq!(p.list_size, 2);
        assert!((p.alpha - 1.0 / 6.0).abs() < 1e-12);
        let p = boost_params(1.0, 0.1, 0.05, 1).unwrap();
        assert_eq!(p.list_size, 1);
        assert!((p.alpha - 0.5).abs() < 1e-12);
        let p = boost_params(1.0 / 3.0, 0.1, 0.05, 1).unwrap();
        assert_eq!(p.list_size, 3);
        assert!(boost_params(0.0, 0.1, 0.05, 1).is_err());
        assert!(boost_params(0.3, 0.1, 0.05, 0).is_err());
    }

    #[test]
    fn constants() {
        let p = boost_params(0.25, 0.1, 0.05, 2).unwrap();
        assert_eq!(p.list_size, 4);
        let t = (8.0 * (80.0f64).ln() / 0.0025).ceil() as usize;
        assert_eq!(p.batches, t);
        assert_eq!(p.n1, 2 * t);
        assert_eq!(p.n2, (2.0 * (400.0f64).ln() / 0.01).ceil() as usize);
    }

    #[test]
    fn threshold_instance() {
        // (0.31 - 0.03) * 100 = 28 hits
        assert_eq!(threshold_count(0.31, 0.06, 100), 28);
    }

    #[test]
    fn fallback_when_nothing_is_frequent() {
        // Eight equally likely outputs, ρ claimed 0.5: none reaches 0.5·T.
        let law: Vec<(Hypothesis, f64)> = (0..8u8)
            .map(|i| {
                let labels: Vec<Label> = (0..3).map(|b| if (i >> b) & 1 == 0 { Label::Plus } else { Label::Minus }).collect();
                (Hypothesis::from_labels(&labels), 0.125)
            })
            .collect();
        let inner = FixedLawLearner::new(law).unwrap();
        let params = boost_params(0.5, 0.2, 0.1, 1).unwrap();
        let b = boost(inner, params, h("+++")).unwrap();
        let d = FiniteDistribution::point_mass(LabeledExample::new(0, Label::Plus));
        let s = draw_sample(&d, params.sample_size(), Seed(1));
        let out = b.learn(&s, Seed(2)).unwrap();
        assert!(out.fallback);
        assert_eq!(out.hypothesis, h("+++"));
        assert!(b.learn(&s.slice(0..10), Seed(2)).is_err());
    }

    #[test]
    fn holdout_filter() {
        // The frequent output errs on the only atom; the rarer one does not.
        let inner = FixedLawLearner::new(vec![(h("-"), 0.6), (h("+"), 0.4)]).unwrap();
        let params = boost_params(0.4, 0.1, 0.1, 1).unwrap();
        let b = boost(inner, params, h("+")).unwrap();
        let d = FiniteDistribution::point_mass(LabeledExample::new(0, Label::Plus));
        let s = draw_sample(&d, params.sample_size(), Seed(5));
        let run = b.run(&s, Seed(6)).unwrap();
        assert_eq!(run.candidates.len(), 2);
        assert_eq!(run.outcome, Outcome::new(h("+")));
    }
}
