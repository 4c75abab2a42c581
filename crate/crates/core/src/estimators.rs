//! Monte Carlo and exact measurement of a learner's output law.
//!
//! Trial `i` of an estimate seeded with `s` draws its sample from
//! `s.child(i, "sample")` and runs the learner with `s.child(i, "learner")`.
//! Trials therefore run in any order on any thread, and histograms over
//! disjoint trial ranges merge by adding counts.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::concepts::Hypothesis;
use crate::distributions::{draw_sample, FiniteDistribution, LabeledExample, Sample};
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::seed::Seed;

const MODULE: &str = "estimators";

/// Default confidence level for Hoeffding half-widths.
pub const DEFAULT_BETA: f64 = 0.01;

/// Default enumeration budget of [`exact_output_distribution`].
pub const EXACT_BUDGET: u64 = 1_000_000;

const CHUNK: u64 = 512;

/// Two-sided Hoeffding half-width `sqrt(ln(2/β) / (2 trials))` for the
/// mean of `trials` variables in `[0, 1]`.
const EXACT_CHUNK: u64 = 4096;

pub fn hoeffding_half_width(trials: u64, beta: f64) -> f64 {
    ((2.0 / beta).ln() / (2.0 * trials as f64)).sqrt()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputHistogram {
    counts: BTreeMap<Hypothesis, u64>,
    trials: u64,
    fallbacks: u64,
    n: usize,
    seed: Seed,
}

impl OutputHistogram {
    pub fn empty(n: usize, seed: Seed) -> Self {
        OutputHistogram {
            counts: BTreeMap::new(),
            trials: 0,
            fallbacks: 0,
            n,
            seed,
        }
    }

    /// Builds a histogram directly from counts.
    pub fn from_counts(counts: impl IntoIterator<Item = (Hypothesis, u64)>, n: usize, seed: Seed) -> Self {
        let mut h = OutputHistogram::empty(n, seed);
        for (hyp, c) in counts {
            if c > 0 {
                *h.counts.entry(hyp).or_default() += c;
                h.trials += c;
            }
        }
        h
    }

    pub fn record(&mut self, h: Hypothesis, fallback: bool) {
        *self.counts.entry(h).or_default() += 1;
        self.trials += 1;
        self.fallbacks += fallback as u64;
    }

    /// Adds the counts of a histogram over a disjoint trial range.
    pub fn merge(&mut self, other: &OutputHistogram) -> Result<()> {
        if other.n != self.n || other.seed != self.seed {
            return Err(Error::argument(MODULE, "merging histograms from different experiments"));
        }
        for (h, c) in &other.counts {
            *self.counts.entry(*h).or_default() += c;
        }
        self.trials += other.trials;
        self.fallbacks += other.fallbacks;
        Ok(())
    }

    pub fn counts(&self) -> &BTreeMap<Hypothesis, u64> {
        &self.counts
    }

    pub fn count(&self, h: &Hypothesis) -> u64 {
        self.counts.get(h).copied().unwrap_or(0)
    }

    pub fn frequency(&self, h: &Hypothesis) -> f64 {
        self.count(h) as f64 / self.trials as f64
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn fallbacks(&self) -> u64 {
        self.fallbacks
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    /// Outputs by decreasing count, canonical order among equal counts.
    pub fn ranked(&self) -> Vec<(Hypothesis, u64)> {
        let mut v: Vec<(Hypothesis, u64)> = self.counts.iter().map(|(h, c)| (*h, *c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    /// The `l` most frequent outputs.
    pub fn top(&self, l: usize) -> Vec<Hypothesis> {
        self.ranked().into_iter().take(l).map(|(h, _)| h).collect()
    }

    /// Exact check of `max f >= Σ f² >= (max f)²` in integer arithmetic.
    pub fn satisfies_sandwich(&self) -> bool {
        let t = self.trials as u128;
        let max = self.counts.values().copied().max().unwrap_or(0) as u128;
        let sq: u128 = self.counts.values().map(|&c| (c as u128) * (c as u128)).sum();
        max * t >= sq && sq >= max * max
    }
}

/// Summary statistics of a histogram.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub rho_hat: f64,
    pub modal: Hypothesis,
    pub collision_hat: f64,
    pub ci_half_width: f64,
    pub beta: f64,
    pub trials: u64,
    pub n: usize,
    pub fallbacks: u64,
}

pub fn stability_report(h: &OutputHistogram) -> Result<StabilityReport> {
    stability_report_at(h, DEFAULT_BETA)
}

pub fn stability_report_at(h: &OutputHistogram, beta: f64) -> Result<StabilityReport> {
    if h.trials == 0 {
        return Err(Error::argument(MODULE, "stability report of an empty histogram"));
    }
    let (modal, max) = h.ranked()[0];
    let t = h.trials as f64;
    let sq: u128 = h.counts.values().map(|&c| (c as u128) * (c as u128)).sum();
    Ok(StabilityReport {
        rho_hat: max as f64 / t,
        modal,
        collision_hat: sq as f64 / (t * t),
        ci_half_width: hoeffding_half_width(h.trials, beta),
        beta,
        trials: h.trials,
        n: h.n,
        fallbacks: h.fallbacks,
    })
}

pub fn output_histogram<L: Learner + ?Sized>(
    learner: &L,
    d: &FiniteDistribution,
    n: usize,
    trials: u64,
    seed: Seed,
) -> Result<OutputHistogram> {
    if trials == 0 {
        return Err(Error::argument(MODULE, "trials must be at least 1"));
    }
    output_histogram_range(learner, d, n, 0..trials, seed)
}

/// Histogram over the trial indices in `range`.
pub fn output_histogram_range<L: Learner + ?Sized>(
    learner: &L,
    d: &FiniteDistribution,
    n: usize,
    range: Range<u64>,
    seed: Seed,
) -> Result<OutputHistogram> {
    d.check_domain(learner.domain_len())?;
    let chunks: Vec<Range<u64>> = (range.start..range.end)
        .step_by(CHUNK as usize)
        .map(|s| s..(s + CHUNK).min(range.end))
        .collect();
    let partials: Vec<Result<OutputHistogram>> = chunks
        .into_par_iter()
        .map(|chunk| {
            let mut hist = OutputHistogram::empty(n, seed);
            for i in chunk {
                let sample = draw_sample(d, n, seed.child(i, "sample"));
                let out = learner
                    .learn(&sample, seed.child(i, "learner"))
                    .map_err(|e| Error::Trial {
                        trial: i,
                        source: Box::new(e),
                    })?;
                hist.record(out.hypothesis, out.fallback);
            }
            Ok(hist)
        })
        .collect();
    let mut total = OutputHistogram::empty(n, seed);
    for p in partials {
        total.merge(&p?)?;
    }
    Ok(total)
}

/// A Monte Carlo probability with its Hoeffding half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub ci_half_width: f64,
    pub trials: u64,
}

fn agreement<L: Learner + ?Sized>(
    learner: &L,
    d: &FiniteDistribution,
    n: usize,
    trials: u64,
    seed: Seed,
    shared: bool,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::argument(MODULE, "trials must be at least 1"));
    }
    d.check_domain(learner.domain_len())?;
    let agree: Result<u64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let r = seed.child(i, "learner");
            let r2 = if shared { r } else { seed.child(i, "learner-prime") };
            let s1 = draw_sample(d, n, seed.child(i, "sample"));
            let s2 = draw_sample(d, n, seed.child(i, "sample-prime"));
            let wrap = |e| Error::Trial {
                trial: i,
                source: Box::new(e),
            };
            let a = learner.learn(&s1, r).map_err(wrap)?;
            let b = learner.learn(&s2, r2).map_err(wrap)?;
            Ok((a.hypothesis == b.hypothesis) as u64)
        })
        .collect::<Result<Vec<u64>>>()
        .map(|v| v.into_iter().sum());
    Ok(Estimate {
        value: agree? as f64 / trials as f64,
        ci_half_width: hoeffding_half_width(trials, DEFAULT_BETA),
        trials,
    })
}

/// `Pr[A(S, r) = A(S', r)]` with the internal randomness shared.
pub fn shared_randomness_replicability<L: Learner + ?Sized>(
    learner: &L,
    d: &FiniteDistribution,
    n: usize,
    trials: u64,
    seed: Seed,
) -> Result<Estimate> {
    agreement(learner, d, n, trials, seed, true)
}

/// `Pr[A(S, r) = A(S', r')]` with independent randomness: the collision
/// probability of the output law.
pub fn independent_replicability<L: Learner + ?Sized>(
    learner: &L,
    d: &FiniteDistribution,
    n: usize,
    trials: u64,
    seed: Seed,
) -> Result<Estimate> {
    agreement(learner, d, n, trials, seed, false)
}

/// An exact output law.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExactLaw {
    probs: BTreeMap<Hypothesis, f64>,
}

impl ExactLaw {
    pub fn probabilities(&self) -> &BTreeMap<Hypothesis, f64> {
        &self.probs
    }

    pub fn get(&self, h: &Hypothesis) -> f64 {
        self.probs.get(h).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn max(&self) -> f64 {
        self.probs.values().copied().fold(0.0, f64::max)
    }

    pub fn collision(&self) -> f64 {
        self.probs.values().map(|p| p * p).sum()
    }

    /// Outputs by decreasing probability, canonical order among ties.
    pub fn ranked(&self) -> Vec<(Hypothesis, f64)> {
        let mut v: Vec<(Hypothesis, f64)> = self.probs.iter().map(|(h, p)| (*h, *p)).collect();
        v.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite").then(a.0.cmp(&b.0)));
        v
    }
}

impl FromIterator<(Hypothesis, f64)> for ExactLaw {
    fn from_iter<I: IntoIterator<Item = (Hypothesis, f64)>>(iter: I) -> Self {
        let mut probs = BTreeMap::new();
        for (h, p) in iter {
            *probs.entry(h).or_default() += p;
        }
        ExactLaw { probs }
    }
}

pub fn exact_output_distribution<L: Learner + ?Sized>(learner: &L, d: &FiniteDistribution, n: usize) -> Result<ExactLaw> {
    exact_output_distribution_with(learner, d, n, EXACT_BUDGET)
}

/// Enumerates every length-`n` sequence over the support of `d` with its
/// probability and mixes the learner's per-sample output law.
pub fn exact_output_distribution_with<L: Learner + ?Sized>(
    learner: &L,
    d: &FiniteDistribution,
    n: usize,
    budget: u64,
) -> Result<ExactLaw> {
    d.check_domain(learner.domain_len())?;
    let atoms: Vec<(LabeledExample, f64)> = d.atoms().to_vec();
    let m = atoms.len() as u64;
    let sequences = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(m).filter(|&v| v <= budget));
    let Some(sequences) = sequences else {
        return Err(Error::size(
            MODULE,
            format!("exact enumeration of {m}^{n} samples exceeds budget {budget}"),
        ));
    };
    // Fixed chunks merged in order keep the floating point sums independent
    // of the thread count.
    let chunks: Vec<Range<u64>> = (0..sequences)
        .step_by(EXACT_CHUNK as usize)
        .map(|s| s..(s + EXACT_CHUNK).min(sequences))
        .collect();
    let partials: Vec<Result<BTreeMap<Hypothesis, f64>>> = chunks
        .into_par_iter()
        .map(|chunk| {
            let mut acc = BTreeMap::new();
            for code in chunk {
                let mut c = code;
                let mut prob = 1.0;
                let mut examples = Vec::with_capacity(n);
                for _ in 0..n {
                    let (e, p) = atoms[(c % m) as usize];
                    c /= m;
                    prob *= p;
                    examples.push(e);
                }
                let law = learner.output_law(&Sample::new(examples))?.ok_or_else(|| {
                    Error::argument(MODULE, format!("learner {} has no enumerable output law", learner.name()))
                })?;
                for (h, q) in law {
                    *acc.entry(h).or_default() += prob * q;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut probs: BTreeMap<Hypothesis, f64> = BTreeMap::new();
    for part in partials {
        for (h, p) in part? {
            *probs.entry(h).or_default() += p;
        }
    }
    Ok(ExactLaw { probs })
}

/// Fraction of trials whose output lies in `list`.
pub fn list_coverage(h: &OutputHistogram, list: &BTreeSet<Hypothesis>) -> f64 {
    if h.trials == 0 {
        return 0.0;
    }
    let hits: u64 = list.iter().map(|x| h.count(x)).sum();
    hits as f64 / h.trials as f64
}
