//! The learner contract and the concrete learning rules.
//!
//! A learner is a pure function of `(sample, seed)`. Learners that can
//! describe their output law for a fixed sample (deterministic rules, the
//! cube learner whose randomness is a single cutoff, fixed-law synthetic
//! learners) expose it through [`Learner::output_law`], which is what the
//! exact oracle in [`crate::estimators`] enumerates.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::concepts::{threshold, ConceptClass, Hypothesis, Label};
use crate::distributions::{empirical_loss, FiniteDistribution, Sample};
use crate::error::{Error, Result};
use crate::seed::Seed;

const MODULE: &str = "learners";

/// One learner output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub hypothesis: Hypothesis,
    /// Set when the rule had to emit its a priori fixed fallback.
    pub fallback: bool,
}

impl Outcome {
    pub fn new(hypothesis: Hypothesis) -> Self {
        Outcome {
            hypothesis,
            fallback: false,
        }
    }

    pub fn fallback(hypothesis: Hypothesis) -> Self {
        Outcome {
            hypothesis,
            fallback: true,
        }
    }
}

/// Exact law of a learner's output on a fixed sample.
pub type OutputLaw = Vec<(Hypothesis, f64)>;

pub trait Learner: Send + Sync {
    fn name(&self) -> String;

    /// Number of domain points the outputs are defined on.
    fn domain_len(&self) -> usize;

    fn learn(&self, sample: &Sample, seed: Seed) -> Result<Outcome>;

    /// True if the seed is ignored.
    fn is_deterministic(&self) -> bool {
        false
    }

    /// True if every output lies in the learner's concept class.
    fn is_proper(&self) -> bool {
        false
    }

    /// Sample size the learner needs, when it fixes one itself.
    fn required_sample_size(&self) -> Option<usize> {
        None
    }

    /// The output law over the internal randomness for a fixed sample, or
    /// `None` when it cannot be enumerated.
    fn output_law(&self, sample: &Sample) -> Result<Option<OutputLaw>> {
        if self.is_deterministic() {
            Ok(Some(vec![(self.learn(sample, Seed(0))?.hypothesis, 1.0)]))
        } else {
            Ok(None)
        }
    }
}

impl<L: Learner + ?Sized> Learner for Arc<L> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn domain_len(&self) -> usize {
        (**self).domain_len()
    }
    fn learn(&self, sample: &Sample, seed: Seed) -> Result<Outcome> {
        (**self).learn(sample, seed)
    }
    fn is_deterministic(&self) -> bool {
        (**self).is_deterministic()
    }
    fn is_proper(&self) -> bool {
        (**self).is_proper()
    }
    fn required_sample_size(&self) -> Option<usize> {
        (**self).required_sample_size()
    }
    fn output_law(&self, sample: &Sample) -> Result<Option<OutputLaw>> {
        (**self).output_law(sample)
    }
}

fn nonempty(sample: &Sample, who: &str) -> Result<()> {
    if sample.is_empty() {
        Err(Error::argument(MODULE, format!("{who}: empty sample")))
    } else {
        Ok(())
    }
}

/// Canonically-first empirical risk minimizer over a class.
#[derive(Clone, Debug)]
pub struct ErmLearner {
    class: Arc<ConceptClass>,
}

pub fn erm_learner(class: Arc<ConceptClass>) -> Result<ErmLearner> {
    if class.is_empty() {
        return Err(Error::argument(MODULE, "erm: class is empty"));
    }
    Ok(ErmLearner { class })
}

impl ErmLearner {
    pub fn class(&self) -> &ConceptClass {
        &self.class
    }

    /// Minimizer and its mistake count.
    pub fn minimize(&self, sample: &Sample) -> Result<(Hypothesis, usize)> {
        let counts = sample.label_counts(self.class.domain().len())?;
        let mut best: Option<(Hypothesis, usize)> = None;
        for h in self.class.iter() {
            let mistakes: usize = counts
                .iter()
                .enumerate()
                .map(|(x, c)| match h.label(x) {
                    Label::Plus => c[1] as usize,
                    Label::Minus => c[0] as usize,
                })
                .sum();
            if best.is_none_or(|(_, m)| mistakes < m) {
                best = Some((*h, mistakes));
                if mistakes == 0 {
                    break;
                }
            }
        }
        Ok(best.expect("class is nonempty"))
    }
}

impl Learner for ErmLearner {
    fn name(&self) -> String {
        format!("erm(|C|={})", self.class.len())
    }
    fn domain_len(&self) -> usize {
        self.class.domain().len()
    }
    fn learn(&self, sample: &Sample, _seed: Seed) -> Result<Outcome> {
        nonempty(sample, "erm")?;
        Ok(Outcome::new(self.minimize(sample)?.0))
    }
    fn is_deterministic(&self) -> bool {
        true
    }
    fn is_proper(&self) -> bool {
        true
    }
}

/// Randomized-cutoff learner for the full cube `{±}^d`.
///
/// Draws `κ ~ U[0, ε/(2d)]`, keeps the points whose empirical frequency is
/// at least `κ` with their observed labels, and labels everything else `+`.
#[derive(Clone, Debug)]
pub struct CubeLearner {
    d: usize,
    eps: f64,
}

pub fn cube_learner(d: usize, eps: f64) -> Result<CubeLearner> {
    if d == 0 || d > crate::concepts::MAX_DOMAIN {
        return Err(Error::argument(MODULE, format!("cube: d={d} out of range")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::argument(MODULE, format!("cube: eps={eps} must lie in (0, 1)")));
    }
    Ok(CubeLearner { d, eps })
}

impl CubeLearner {
    pub fn cutoff_cap(&self) -> f64 {
        self.eps / (2.0 * self.d as f64)
    }

    /// Empirical frequency and observed label of each point.
    fn frequencies(&self, sample: &Sample) -> Result<Vec<(f64, Label)>> {
        nonempty(sample, "cube")?;
        let counts = sample.label_counts(self.d)?;
        let n = sample.len() as f64;
        counts
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c[0] > 0 && c[1] > 0 {
                    return Err(Error::Realizability(format!(
                        "cube: point {} appears with both labels",
                        i + 1
                    )));
                }
                let label = if c[1] > 0 { Label::Minus } else { Label::Plus };
                Ok(((c[0] + c[1]) as f64 / n, label))
            })
            .collect()
    }

    fn output_for(&self, freq: &[(f64, Label)], kappa: f64) -> Hypothesis {
        let labels: Vec<Label> = freq
            .iter()
            .map(|&(p, l)| if p >= kappa { l } else { Label::Plus })
            .collect();
        Hypothesis::from_labels(&labels)
    }
}

impl Learner for CubeLearner {
    fn name(&self) -> String {
        format!("cube(d={},eps={})", self.d, self.eps)
    }
    fn domain_len(&self) -> usize {
        self.d
    }
    fn learn(&self, sample: &Sample, seed: Seed) -> Result<Outcome> {
        let freq = self.frequencies(sample)?;
        let kappa = seed.rng().gen::<f64>() * self.cutoff_cap();
        Ok(Outcome::new(self.output_for(&freq, kappa)))
    }

    /// `κ` only matters through which frequencies it falls below, so the
    /// cutoff interval splits into at most `d + 1` pieces with a constant
    /// output on each.
    fn output_law(&self, sample: &Sample) -> Result<Option<OutputLaw>> {
        let freq = self.frequencies(sample)?;
        let cap = self.cutoff_cap();
        let mut breaks: Vec<f64> = freq.iter().map(|f| f.0).filter(|&p| p > 0.0 && p < cap).collect();
        breaks.push(cap);
        breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        breaks.dedup();
        let mut law: BTreeMap<Hypothesis, f64> = BTreeMap::new();
        let mut lo = 0.0;
        for hi in breaks {
            // on (lo, hi] the kept set is {i : P(i) >= hi}
            *law.entry(self.output_for(&freq, hi)).or_default() += (hi - lo) / cap;
            lo = hi;
        }
        Ok(Some(law.into_iter().collect()))
    }
}

/// Proper deterministic learner for thresholds: outputs `τ_î` for the
/// smallest `î` with `L_S(τ_î) < σ_î = ε / (2(t - î + 1))`.
#[derive(Clone, Debug)]
pub struct ThresholdLearner {
    t: usize,
    eps: f64,
    sigma: Vec<f64>,
}

pub fn threshold_learner(t: usize, eps: f64) -> Result<ThresholdLearner> {
    if t < 3 {
        return Err(Error::argument(MODULE, format!("thresholds: t={t} must be at least 3")));
    }
    if t - 1 > crate::concepts::MAX_DOMAIN {
        return Err(Error::size(MODULE, format!("thresholds: t={t} too large")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::argument(MODULE, format!("thresholds: eps={eps} must lie in (0, 1)")));
    }
    let sigma: Vec<f64> = (1..=t).map(|i| eps / (2.0 * (t - i + 1) as f64)).collect();
    debug_assert!(sigma
        .windows(2)
        .all(|w| w[1] >= w[0] + eps / (10.0 * (t * t) as f64)));
    Ok(ThresholdLearner { t, eps, sigma })
}

/// Result of one threshold-learner run with its diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdChoice {
    /// 1-based index of the chosen threshold.
    pub index: usize,
    pub empirical_loss: f64,
    pub cutoff: f64,
    pub fallback: bool,
}

impl ThresholdLearner {
    /// `σ_1, ..., σ_t`.
    pub fn cutoffs(&self) -> &[f64] {
        &self.sigma
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `L_S(τ_1), ..., L_S(τ_t)`.
    pub fn losses(&self, sample: &Sample) -> Result<Vec<f64>> {
        nonempty(sample, "thresholds")?;
        let counts = sample.label_counts(self.t - 1)?;
        let n = sample.len() as f64;
        // τ_i errs on + labels left of i and - labels at or right of i.
        let mut plus_left = 0usize;
        let mut minus_right: usize = counts.iter().map(|c| c[1] as usize).sum();
        let mut out = Vec::with_capacity(self.t);
        for i in 1..=self.t {
            out.push((plus_left + minus_right) as f64 / n);
            if i < self.t {
                plus_left += counts[i - 1][0] as usize;
                minus_right -= counts[i - 1][1] as usize;
            }
        }
        Ok(out)
    }

    pub fn choose(&self, sample: &Sample) -> Result<ThresholdChoice> {
        let losses = self.losses(sample)?;
        let pick = losses.iter().zip(&self.sigma).position(|(l, s)| l < s);
        Ok(match pick {
            Some(i) => ThresholdChoice {
                index: i + 1,
                empirical_loss: losses[i],
                cutoff: self.sigma[i],
                fallback: false,
            },
            None => ThresholdChoice {
                index: self.t,
                empirical_loss: losses[self.t - 1],
                cutoff: self.sigma[self.t - 1],
                fallback: true,
            },
        })
    }
}

impl Learner for ThresholdLearner {
    fn name(&self) -> String {
        format!("thresholds(t={},eps={})", self.t, self.eps)
    }
    fn domain_len(&self) -> usize {
        self.t - 1
    }
    fn learn(&self, sample: &Sample, _seed: Seed) -> Result<Outcome> {
        let choice = self.choose(sample)?;
        let h = threshold(self.t, choice.index);
        Ok(if choice.fallback {
            Outcome::fallback(h)
        } else {
            Outcome::new(h)
        })
    }
    fn is_deterministic(&self) -> bool {
        true
    }
    fn is_proper(&self) -> bool {
        true
    }
}

/// Wraps a learner so that its output always has empirical loss at most
/// `ε + δ`, replacing offending outputs by the ERM output.
pub struct Empiricalized<L> {
    inner: L,
    erm: ErmLearner,
    budget: f64,
}

pub fn empiricalize<L: Learner>(inner: L, class: Arc<ConceptClass>, eps: f64, delta: f64) -> Result<Empiricalized<L>> {
    if inner.domain_len() != class.domain().len() {
        return Err(Error::domain(
            MODULE,
            format!(
                "empiricalize: learner domain has {} points, class domain {}",
                inner.domain_len(),
                class.domain().len()
            ),
        ));
    }
    if !(eps >= 0.0 && delta > 0.0) {
        return Err(Error::argument(MODULE, format!("empiricalize: eps={eps}, delta={delta}")));
    }
    Ok(Empiricalized {
        inner,
        erm: erm_learner(class)?,
        budget: eps + delta,
    })
}

impl<L: Learner> Empiricalized<L> {
    pub fn budget(&self) -> f64 {
        self.budget
    }

    fn repair(&self, h: Hypothesis, sample: &Sample) -> Result<Option<Hypothesis>> {
        if empirical_loss(&h, sample)? <= self.budget {
            return Ok(None);
        }
        let (erm, mistakes) = self.erm.minimize(sample)?;
        if (mistakes as f64) / (sample.len() as f64) < self.budget {
            Ok(Some(erm))
        } else {
            Err(Error::EmpiricalViolation(format!(
                "no hypothesis in the class has empirical loss below {}",
                self.budget
            )))
        }
    }
}

impl<L: Learner> Learner for Empiricalized<L> {
    fn name(&self) -> String {
        format!("emp({},budget={})", self.inner.name(), self.budget)
    }
    fn domain_len(&self) -> usize {
        self.inner.domain_len()
    }
    fn learn(&self, sample: &Sample, seed: Seed) -> Result<Outcome> {
        nonempty(sample, "empiricalize")?;
        let out = self.inner.learn(sample, seed)?;
        Ok(match self.repair(out.hypothesis, sample)? {
            Some(h) => Outcome::new(h),
            None => out,
        })
    }
    fn is_deterministic(&self) -> bool {
        self.inner.is_deterministic()
    }
    fn is_proper(&self) -> bool {
        self.inner.is_proper()
    }
    fn required_sample_size(&self) -> Option<usize> {
        self.inner.required_sample_size()
    }
    fn output_law(&self, sample: &Sample) -> Result<Option<OutputLaw>> {
        let Some(law) = self.inner.output_law(sample)? else {
            return Ok(None);
        };
        let mut out: BTreeMap<Hypothesis, f64> = BTreeMap::new();
        for (h, p) in law {
            let h = self.repair(h, sample)?.unwrap_or(h);
            *out.entry(h).or_default() += p;
        }
        Ok(Some(out.into_iter().collect()))
    }
}

/// A coloring of distributions by hypotheses.
pub type Coloring = Arc<dyn Fn(&FiniteDistribution) -> Hypothesis + Send + Sync>;

/// Outputs the color of the empirical distribution of its sample.
pub struct ColoringLearner {
    color: Coloring,
    n: usize,
    domain_len: usize,
}

pub fn coloring_learner(color: Coloring, n: usize, domain_len: usize) -> ColoringLearner {
    ColoringLearner { color, n, domain_len }
}

impl Learner for ColoringLearner {
    fn name(&self) -> String {
        format!("coloring(n={})", self.n)
    }
    fn domain_len(&self) -> usize {
        self.domain_len
    }
    fn learn(&self, sample: &Sample, _seed: Seed) -> Result<Outcome> {
        let empirical = FiniteDistribution::empirical(sample)?;
        empirical.check_domain(self.domain_len)?;
        Ok(Outcome::new((self.color)(&empirical)))
    }
    fn is_deterministic(&self) -> bool {
        true
    }
    fn required_sample_size(&self) -> Option<usize> {
        Some(self.n)
    }
}

impl fmt::Debug for ColoringLearner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ColoringLearner").field("n", &self.n).finish_non_exhaustive()
    }
}

/// Synthetic learner that ignores its sample and draws its output from a
/// fixed law. Useful as a learner with known stability.
#[derive(Clone, Debug)]
pub struct FixedLawLearner {
    law: Vec<(Hypothesis, f64)>,
    cumulative: Vec<f64>,
}

impl FixedLawLearner {
    pub fn new(law: Vec<(Hypothesis, f64)>) -> Result<Self> {
        let Some(first) = law.first() else {
            return Err(Error::argument(MODULE, "fixed law: empty law"));
        };
        let len = first.0.len();
        if law.iter().any(|(h, p)| h.len() != len || !(*p >= 0.0)) {
            return Err(Error::argument(MODULE, "fixed law: mixed lengths or negative mass"));
        }
        let total: f64 = law.iter().map(|l| l.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::argument(MODULE, format!("fixed law: masses sum to {total}")));
        }
        let cumulative = law
            .iter()
            .scan(0.0, |acc, (_, p)| {
                *acc += p / total;
                Some(*acc)
            })
            .collect();
        Ok(FixedLawLearner { law, cumulative })
    }

    pub fn constant(h: Hypothesis) -> Self {
        FixedLawLearner {
            law: vec![(h, 1.0)],
            cumulative: vec![1.0],
        }
    }

    pub fn law(&self) -> &[(Hypothesis, f64)] {
        &self.law
    }
}

impl Learner for FixedLawLearner {
    fn name(&self) -> String {
        let parts: Vec<String> = self.law.iter().map(|(h, p)| format!("{h}:{p}")).collect();
        format!("fixed({})", parts.join(","))
    }
    fn domain_len(&self) -> usize {
        self.law[0].0.len()
    }
    fn learn(&self, _sample: &Sample, seed: Seed) -> Result<Outcome> {
        if self.law.len() == 1 {
            return Ok(Outcome::new(self.law[0].0));
        }
        let u: f64 = seed.rng().gen();
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.law.len() - 1);
        Ok(Outcome::new(self.law[i].0))
    }
    fn is_deterministic(&self) -> bool {
        self.law.len() == 1
    }
    fn output_law(&self, _sample: &Sample) -> Result<Option<OutputLaw>> {
        Ok(Some(self.law.clone()))
    }
}
