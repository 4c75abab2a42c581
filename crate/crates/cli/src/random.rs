use rand::Rng;
use rand_distr::{Dirichlet, Distribution};
use stability_core::{ConceptClass, FiniteDistribution, LabeledExample, Result, Seed};

/// `count` realizable distributions: each picks a class member uniformly,
/// spreads Dirichlet(1) mass over all domain points and labels them by it.
pub fn random_realizable_distributions(c: &ConceptClass, count: usize, seed: Seed) -> Result<Vec<FiniteDistribution>> {
    let points = c.domain().len();
    (0..count)
        .map(|i| {
            let mut rng = seed.child(i as u64, "random-distribution").rng();
            let h = c.hypotheses()[rng.gen_range(0..c.len())];
            let masses = if points == 1 {
                vec![1.0]
            } else {
                Dirichlet::new_with_size(1.0, points).expect("valid concentration").sample(&mut rng)
            };
            FiniteDistribution::new(
                masses
                    .into_iter()
                    .enumerate()
                    .map(|(x, p)| (LabeledExample::new(x, h.label(x)), p)),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use stability_core::{is_realizable, make_cube, make_thresholds};

    #[test]
    fn realizable_and_reproducible() {
        let c = make_cube(3).unwrap();
        let a = random_realizable_distributions(&c, 50, Seed(9)).unwrap();
        let b = random_realizable_distributions(&c, 50, Seed(9)).unwrap();
        assert_eq!(a, b);
        for d in &a {
            assert!(is_realizable(d, &c).unwrap());
            assert!((d.marginals(3).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let t = make_thresholds(8).unwrap();
        for d in random_realizable_distributions(&t, 20, Seed(1)).unwrap() {
            assert!(is_realizable(&d, &t).unwrap());
        }
    }
}
