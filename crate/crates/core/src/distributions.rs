//! Finite-support distributions over labeled examples.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use serde::{Deserialize, Serialize};

use crate::adversary::InstabilityWitness;
use crate::concepts::{ConceptClass, Domain, Hypothesis, Label};
use crate::error::{Error, Result};
use crate::seed::Seed;

const MODULE: &str = "distributions";

/// Masses must sum to 1 within this tolerance before renormalization.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// A domain point index paired with a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledExample {
    pub x: usize,
    pub y: Label,
}

impl LabeledExample {
    pub fn new(x: usize, y: Label) -> Self {
        LabeledExample { x, y }
    }
}

/// Examples in the order they were drawn.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sample {
    examples: Vec<LabeledExample>,
}

impl Sample {
    pub fn new(examples: Vec<LabeledExample>) -> Self {
        Sample { examples }
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Sample {
        Sample::new(self.examples[range].to_vec())
    }

    /// Per-point `(plus, minus)` counts over a domain of `domain_len` points.
    pub fn label_counts(&self, domain_len: usize) -> Result<Vec<[u32; 2]>> {
        let mut counts = vec![[0u32; 2]; domain_len];
        for e in &self.examples {
            let slot = counts.get_mut(e.x).ok_or_else(|| {
                Error::domain(MODULE, format!("sample point {} outside domain of {domain_len}", e.x))
            })?;
            slot[(e.y == Label::Minus) as usize] += 1;
        }
        Ok(counts)
    }
}

impl FromIterator<LabeledExample> for Sample {
    fn from_iter<I: IntoIterator<Item = LabeledExample>>(iter: I) -> Self {
        Sample::new(iter.into_iter().collect())
    }
}

/// Probability mass over finitely many labeled examples.
///
/// Atoms are merged, zero-mass atoms dropped and the remaining masses
/// renormalized at construction. Atoms are kept sorted by `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDistribution {
    atoms: Vec<(LabeledExample, f64)>,
}

impl FiniteDistribution {
    pub fn new(atoms: impl IntoIterator<Item = (LabeledExample, f64)>) -> Result<Self> {
        let mut merged: BTreeMap<LabeledExample, f64> = BTreeMap::new();
        for (e, p) in atoms {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::argument(MODULE, format!("mass {p} at ({}, {}) is not a probability", e.x, e.y)));
            }
            *merged.entry(e).or_default() += p;
        }
        let total: f64 = merged.values().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::argument(MODULE, format!("masses sum to {total}, expected 1")));
        }
        let atoms = merged
            .into_iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|(e, p)| (e, p / total))
            .collect();
        Ok(FiniteDistribution { atoms })
    }

    pub fn point_mass(e: LabeledExample) -> Self {
        FiniteDistribution { atoms: vec![(e, 1.0)] }
    }

    /// The empirical distribution of a nonempty sample.
    pub fn empirical(sample: &Sample) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::argument(MODULE, "empirical distribution of an empty sample"));
        }
        let mut counts: BTreeMap<LabeledExample, usize> = BTreeMap::new();
        for e in sample.examples() {
            *counts.entry(*e).or_default() += 1;
        }
        let n = sample.len() as f64;
        Ok(FiniteDistribution {
            atoms: counts.into_iter().map(|(e, c)| (e, c as f64 / n)).collect(),
        })
    }

    pub fn atoms(&self) -> &[(LabeledExample, f64)] {
        &self.atoms
    }

    pub fn mass(&self, e: LabeledExample) -> f64 {
        self.atoms
            .binary_search_by(|(a, _)| a.cmp(&e))
            .map_or(0.0, |i| self.atoms[i].1)
    }

    /// Marginal mass of each of `domain_len` points.
    pub fn marginals(&self, domain_len: usize) -> Vec<f64> {
        let mut m = vec![0.0; domain_len];
        for (e, p) in &self.atoms {
            if e.x < domain_len {
                m[e.x] += p;
            }
        }
        m
    }

    pub fn max_point(&self) -> Option<usize> {
        self.atoms.iter().map(|(e, _)| e.x).max()
    }

    pub fn check_domain(&self, domain_len: usize) -> Result<()> {
        match self.max_point() {
            Some(x) if x >= domain_len => Err(Error::domain(
                MODULE,
                format!("atom at point index {x} outside domain of {domain_len} points"),
            )),
            _ => Ok(()),
        }
    }

    /// Parses `{"atoms": [{"x": "p1", "y": 1, "p": 0.25}, ...]}` against a domain.
    pub fn from_json(text: &str, domain: &Domain) -> Result<Self> {
        let file: DistributionFile =
            serde_json::from_str(text).map_err(|e| Error::format(MODULE, format!("distribution file: {e}")))?;
        let atoms: Result<Vec<_>> = file
            .atoms
            .into_iter()
            .map(|a| {
                let x = domain
                    .index_of(&a.x)
                    .ok_or_else(|| Error::domain(MODULE, format!("distribution file: unknown point {:?}", a.x)))?;
                Ok((LabeledExample::new(x, a.y), a.p))
            })
            .collect();
        FiniteDistribution::new(atoms?)
    }

    pub fn to_json_value(&self, domain: &Domain) -> serde_json::Value {
        let file = DistributionFile {
            atoms: self
                .atoms
                .iter()
                .map(|(e, p)| AtomRecord {
                    x: domain.name(e.x).to_string(),
                    y: e.y,
                    p: *p,
                })
                .collect(),
        };
        serde_json::to_value(file).expect("distribution serializes")
    }

    pub fn to_json(&self, domain: &Domain) -> String {
        self.to_json_value(domain).to_string()
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionFile {
    atoms: Vec<AtomRecord>,
}

#[derive(Serialize, Deserialize)]
struct AtomRecord {
    x: String,
    y: Label,
    p: f64,
}

/// Mass of the atoms `h` misclassifies.
pub fn population_loss(h: &Hypothesis, d: &FiniteDistribution) -> Result<f64> {
    d.check_domain(h.len())?;
    Ok(d.atoms()
        .iter()
        .filter(|(e, _)| h.label(e.x) != e.y)
        .map(|(_, p)| p)
        .sum())
}

/// Fraction of `sample` misclassified by `h`.
pub fn empirical_loss(h: &Hypothesis, sample: &Sample) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::argument(MODULE, "empirical loss on an empty sample"));
    }
    Ok(mistakes(h, sample)? as f64 / sample.len() as f64)
}

pub(crate) fn mistakes(h: &Hypothesis, sample: &Sample) -> Result<usize> {
    let mut m = 0;
    for e in sample.examples() {
        if e.x >= h.len() {
            return Err(Error::domain(MODULE, format!("sample point {} outside domain of {}", e.x, h.len())));
        }
        m += (h.label(e.x) != e.y) as usize;
    }
    Ok(m)
}

/// True iff some member of `c` has zero population loss.
pub fn is_realizable(d: &FiniteDistribution, c: &ConceptClass) -> Result<bool> {
    d.check_domain(c.domain().len())?;
    Ok(c.iter()
        .any(|h| d.atoms().iter().all(|(e, _)| h.label(e.x) == e.y)))
}

/// `n` i.i.d. draws, reproducible from `seed`.
pub fn draw_sample(d: &FiniteDistribution, n: usize, seed: Seed) -> Sample {
    if n == 0 {
        return Sample::default();
    }
    let weights = d.atoms().iter().map(|(_, p)| *p);
    let index = WeightedIndex::new(weights).expect("normalized distribution has positive mass");
    let mut rng = seed.rng();
    (0..n).map(|_| d.atoms()[index.sample(&mut rng)].0).collect()
}

pub fn tv_distance(a: &FiniteDistribution, b: &FiniteDistribution) -> f64 {
    let mut diff: BTreeMap<LabeledExample, f64> = BTreeMap::new();
    for (e, p) in a.atoms() {
        *diff.entry(*e).or_default() += p;
    }
    for (e, p) in b.atoms() {
        *diff.entry(*e).or_default() -= p;
    }
    0.5 * diff.values().map(|v| v.abs()).sum::<f64>()
}

/// The distribution `D_t` of a witness: mass `|t_j|/k` on `W(j, sign t_j)`
/// and the remainder on the anchor.
pub fn witness_distribution(w: &InstabilityWitness, t: &[f64]) -> Result<FiniteDistribution> {
    let k = w.k();
    if t.len() != k {
        return Err(Error::argument(MODULE, format!("t has {} coordinates, witness size is {k}", t.len())));
    }
    if let Some(bad) = t.iter().find(|v| !(v.abs() <= 1.0)) {
        return Err(Error::argument(MODULE, format!("t coordinate {bad} outside [-1, 1]")));
    }
    let kf = k as f64;
    let mut atoms = Vec::with_capacity(k + 1);
    let mut used = 0.0;
    for (j, &tj) in t.iter().enumerate() {
        let m = tj.abs() / kf;
        used += m;
        atoms.push((w.point(j, Label::of_real(tj)), m));
    }
    atoms.push((w.anchor(), (1.0 - used).max(0.0)));
    FiniteDistribution::new(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::cube_witness;
    use crate::concepts::{make_cube, make_thresholds};
    use proptest::prelude::*;

    fn ex(x: usize, y: i64) -> LabeledExample {
        LabeledExample::new(x, Label::from_sign(y).unwrap())
    }

    fn hyp(s: &str) -> Hypothesis {
        s.parse().unwrap()
    }

    #[test]
    fn realizability() {
        let cube = make_cube(2).unwrap();
        assert!(is_realizable(&FiniteDistribution::point_mass(ex(0, 1)), &cube).unwrap());
        let clash = FiniteDistribution::new([(ex(0, 1), 0.5), (ex(0, -1), 0.5)]).unwrap();
        assert!(!is_realizable(&clash, &cube).unwrap());
        let foreign = FiniteDistribution::point_mass(ex(5, 1));
        assert!(matches!(is_realizable(&foreign, &cube), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn losses() {
        // points "1","2" are indices 0,1 of thresholds(3)
        let d = FiniteDistribution::new([(ex(0, -1), 0.5), (ex(1, 1), 0.5)]).unwrap();
        let c = make_thresholds(3).unwrap();
        let (tau1, tau2) = (c.hypotheses()[0], c.hypotheses()[1]);
        assert_eq!(population_loss(&tau2, &d).unwrap(), 0.0);
        assert_eq!(population_loss(&hyp("++"), &d).unwrap(), 0.5);
        assert_eq!(population_loss(&tau1, &d).unwrap(), 0.5);

        let s = Sample::new(vec![ex(0, 1), ex(0, 1), ex(1, -1)]);
        assert!((empirical_loss(&hyp("++"), &s).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(empirical_loss(&hyp("+-"), &s).unwrap(), 0.0);
        assert!(empirical_loss(&hyp("+-"), &Sample::default()).is_err());
    }

    #[test]
    fn construction_normalizes_and_merges() {
        let d = FiniteDistribution::new([(ex(0, 1), 0.25), (ex(0, 1), 0.25), (ex(1, -1), 0.5 + 5e-10)]).unwrap();
        assert_eq!(d.atoms().len(), 2);
        let total: f64 = d.atoms().iter().map(|a| a.1).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(FiniteDistribution::new([(ex(0, 1), 0.9)]).is_err());
        assert!(FiniteDistribution::new([(ex(0, 1), 1.5), (ex(1, 1), -0.5)]).is_err());
    }

    #[test]
    fn sampling() {
        let d = FiniteDistribution::new([(ex(0, 1), 0.9), (ex(1, 1), 0.1)]).unwrap();
        assert!(draw_sample(&d, 0, Seed(1)).is_empty());
        assert_eq!(draw_sample(&d, 50, Seed(3)), draw_sample(&d, 50, Seed(3)));
        let n = 10_000;
        let s = draw_sample(&d, n, Seed(11));
        let freq = s.examples().iter().filter(|e| e.x == 0).count() as f64 / n as f64;
        // Hoeffding with a union over the two atoms at level 1/2: 3x the
        // half-width sqrt(ln 4 / 2n).
        let bound = 3.0 * ((4.0f64).ln() / (2.0 * n as f64)).sqrt();
        assert!((freq - 0.9).abs() <= bound, "freq {freq}, bound {bound}");
    }

    #[test]
    fn tv_examples() {
        let a = FiniteDistribution::new([(ex(0, 1), 0.5), (ex(1, 1), 0.5)]).unwrap();
        assert_eq!(tv_distance(&a, &a), 0.0);
        let b = FiniteDistribution::point_mass(ex(2, -1));
        assert!((tv_distance(&a, &b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn witness_distribution_examples() {
        let w = cube_witness(3).unwrap();
        let zero = witness_distribution(&w, &[0.0, 0.0]).unwrap();
        assert_eq!(zero.atoms(), &[(w.anchor(), 1.0)]);

        let ones = witness_distribution(&w, &[1.0, 1.0]).unwrap();
        assert_eq!(ones.mass(w.point(0, Label::Plus)), 0.5);
        assert_eq!(ones.mass(w.point(1, Label::Plus)), 0.5);
        assert_eq!(ones.mass(w.anchor()), 0.0);

        let mixed = witness_distribution(&w, &[-0.5, 0.0]).unwrap();
        assert_eq!(mixed.mass(w.point(0, Label::Minus)), 0.25);
        assert_eq!(mixed.mass(w.point(1, Label::Plus)), 0.0);
        assert_eq!(mixed.mass(w.anchor()), 0.75);

        assert!(witness_distribution(&w, &[1.5, 0.0]).is_err());
        assert!(witness_distribution(&w, &[0.0]).is_err());
        assert!(is_realizable(&witness_distribution(&w, &[0.5, -0.5]).unwrap(), &make_cube(3).unwrap()).unwrap());
    }

    #[test]
    fn tv_of_witness_family_is_lipschitz() {
        // |D_t - D_t'| moves at most |t_j - t'_j|/k of mass per coordinate,
        // counted once at each end, so TV <= (2/k) sum |t_j - t'_j|.
        let w = cube_witness(3).unwrap();
        let mut rng = Seed(5).rng();
        for _ in 0..100 {
            let t: Vec<f64> = (0..2).map(|_| rand::Rng::gen_range(&mut rng, -1.0..=1.0)).collect();
            let u: Vec<f64> = (0..2).map(|_| rand::Rng::gen_range(&mut rng, -1.0..=1.0)).collect();
            let tv = tv_distance(&witness_distribution(&w, &t).unwrap(), &witness_distribution(&w, &u).unwrap());
            let k = w.k() as f64;
            let bound: f64 = t.iter().zip(&u).map(|(a, b)| (a - b).abs()).sum::<f64>() * 2.0 / k;
            assert!(tv <= bound + 1e-12, "tv {tv} bound {bound}");
        }
    }

    fn arb_dist() -> impl Strategy<Value = FiniteDistribution> {
        prop::collection::vec((0usize..4, any::<bool>(), 0.01f64..1.0), 1..6).prop_map(|atoms| {
            let total: f64 = atoms.iter().map(|a| a.2).sum();
            FiniteDistribution::new(atoms.into_iter().map(|(x, plus, p)| {
                (LabeledExample::new(x, if plus { Label::Plus } else { Label::Minus }), p / total)
            }))
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn masses_sum_to_one(d in arb_dist()) {
            let total: f64 = d.atoms().iter().map(|a| a.1).sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
            prop_assert!(d.atoms().iter().all(|a| a.1 >= 0.0));
        }

        #[test]
        fn tv_is_a_metric(a in arb_dist(), b in arb_dist(), c in arb_dist()) {
            prop_assert!((tv_distance(&a, &b) - tv_distance(&b, &a)).abs() <= 1e-15);
            prop_assert!(tv_distance(&a, &c) <= tv_distance(&a, &b) + tv_distance(&b, &c) + 1e-12);
        }

        #[test]
        fn empirical_distribution_matches_empirical_loss(
            pts in prop::collection::vec((0usize..4, any::<bool>()), 1..40),
            bits in 0u64..16,
        ) {
            let s: Sample = pts.iter().map(|&(x, p)| LabeledExample::new(x, if p { Label::Plus } else { Label::Minus })).collect();
            let h = Hypothesis::from_labels(&(0..4).map(|i| if (bits >> i) & 1 == 0 { Label::Plus } else { Label::Minus }).collect::<Vec<_>>());
            let d = FiniteDistribution::empirical(&s).unwrap();
            prop_assert!((population_loss(&h, &d).unwrap() - empirical_loss(&h, &s).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn witness_grid_realizable(i in 0usize..11, j in 0usize..11) {
            let w = cube_witness(3).unwrap();
            let t = [i as f64 / 5.0 - 1.0, j as f64 / 5.0 - 1.0];
            let d = witness_distribution(&w, &t).unwrap();
            prop_assert!(is_realizable(&d, &make_cube(3).unwrap()).unwrap());
        }
    }

    #[test]
    fn json_file_format() {
        let dom = Domain::new(["p1", "p2"]).unwrap();
        let d = FiniteDistribution::from_json(r#"{"atoms":[{"x":"p1","y":1,"p":0.25},{"x":"p2","y":-1,"p":0.75}]}"#, &dom).unwrap();
        assert_eq!(d.mass(ex(1, -1)), 0.75);
        assert_eq!(FiniteDistribution::from_json(&d.to_json(&dom), &dom).unwrap(), d);
        assert!(FiniteDistribution::from_json(r#"{"atoms":[{"x":"zz","y":1,"p":1}]}"#, &dom).is_err());
        assert!(FiniteDistribution::from_json(r#"{"atoms":[{"x":"p1","y":2,"p":1}]}"#, &dom).is_err());
    }
}
