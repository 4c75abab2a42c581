use std::sync::Arc;

use proptest::prelude::*;
use stability_core::*;

fn h(s: &str) -> Hypothesis {
    s.parse().unwrap()
}

fn plus_at_first_point() -> FiniteDistribution {
    FiniteDistribution::point_mass(LabeledExample::new(0, Label::Plus))
}

proptest! {
    #[test]
    fn boost_params_are_consistent(rho in 0.01f64..=1.0, eps in 0.01f64..0.99, delta in 0.01f64..0.99, n0 in 1usize..50) {
        let p = boost_params(rho, eps, delta, n0).unwrap();
        let l = p.list_size as f64;
        prop_assert!(p.list_size >= 1);
        prop_assert!(p.alpha > 0.0);
        prop_assert!(rho > 1.0 / (l + 1.0) && rho <= 1.0 / l + 1e-12);
        prop_assert!(p.batches >= 1 && p.n2 >= 1);
        prop_assert_eq!(p.n1, p.batches * n0);
    }

    #[test]
    fn list_bound_holds_for_exact_laws(raw in prop::collection::vec(0.01f64..1.0, 1..8)) {
        let total: f64 = raw.iter().sum();
        let law: Vec<(Hypothesis, f64)> = raw
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let labels: Vec<Label> = (0..3).map(|b| if (i >> b) & 1 == 0 { Label::Plus } else { Label::Minus }).collect();
                (Hypothesis::from_labels(&labels), w / total)
            })
            .collect();
        let a = FixedLawLearner::new(law).unwrap();
        let exact = exact_output_distribution(&a, &plus_at_first_point(), 1).unwrap();
        let rho = exact.max();
        let p = boost_params(rho, 0.1, 0.1, 1).unwrap();
        let heavy = exact.probabilities().values().filter(|&&q| q > 1.0 / (p.list_size as f64 + 1.0)).count();
        prop_assert!(heavy <= p.list_size);
    }

    #[test]
    fn g_components_are_bounded(t1 in -1.0f64..=1.0, t2 in -1.0f64..=1.0, seed in 0u64..1000) {
        let c = Arc::new(make_cube(3).unwrap());
        let a = erm_learner(c).unwrap();
        let w = cube_witness(3).unwrap();
        let g = g_vector(&a, &w, &[t1, t2], 0.02, 16, 64, Seed(seed)).unwrap();
        for v in &g.values {
            prop_assert!(v.abs() <= 1.02 + 1e-12);
        }
        let parts: f64 = g.cell_freqs.iter().sum::<f64>() + g.other;
        prop_assert!((parts - 1.0).abs() < 1e-12);
    }
}

#[test]
fn boosted_outputs_respect_the_holdout_test() {
    // Two of the three outputs err on the only atom, so only one can pass.
    let law = vec![(h("+++"), 0.3), (h("-++"), 0.45), (h("-+-"), 0.25)];
    let inner = FixedLawLearner::new(law).unwrap();
    let params = boost_params(0.25, 0.1, 0.1, 1).unwrap();
    let eps = params.eps;
    let b = boost(inner, params, h("+++")).unwrap();
    let d = plus_at_first_point();
    for i in 0..20u64 {
        let s = draw_sample(&d, params.sample_size(), Seed(i));
        let run = b.run(&s, Seed(1000 + i)).unwrap();
        if !run.outcome.fallback {
            let q = s.slice(s.len() - params.n2..s.len());
            assert!(empirical_loss(&run.outcome.hypothesis, &q).unwrap() <= 1.5 * eps);
        }
        assert_eq!(run.outcome.hypothesis, h("+++"));
    }
}

#[test]
fn hollow_star_distributions_are_realizable() {
    for s in 3..=5 {
        let c = make_singletons(s).unwrap();
        let pts: Vec<usize> = (0..s).collect();
        let w = hollow_star_witness(&c, &pts).unwrap();
        let k = w.k();
        let grid: Vec<f64> = (0..=10).map(|i| -1.0 + 0.2 * i as f64).collect();
        let mut idx = vec![0usize; k];
        loop {
            let t: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
            let d = witness_distribution(&w, &t).unwrap();
            assert!(is_realizable(&d, &c).unwrap(), "s={s} t={t:?}");
            let mut pos = 0;
            while pos < k && idx[pos] == 10 {
                idx[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
            idx[pos] += 1;
        }
    }
}

#[test]
fn converged_certificate_balances_the_parts() {
    let c = Arc::new(make_cube(3).unwrap());
    let a = empiricalize(erm_learner(c.clone()).unwrap(), c.clone(), 0.05, 0.02).unwrap();
    let w = cube_witness(3).unwrap();
    let cfg = SolverConfig::default();
    let cert = find_hard_distribution(&a, &w, &c, &c, &cfg, Seed(21)).unwrap();
    assert_eq!(cert.status, CertificateStatus::Converged);
    assert!(cert.residual <= cfg.tol);
    assert!(is_realizable(&cert.distribution, &c).unwrap());
    let k = w.k() as f64;
    let sigma = |p: f64| (p * (1.0 - p) / cert.trials as f64).sqrt();
    for j in 1..=w.k() {
        let gap = (cert.frequencies[0] - cert.frequencies[j]).abs();
        assert!(gap <= cfg.tol + cfg.damping + 2.0 * cert.ci, "part {j}: gap {gap}");
    }
    let cap = 1.0 / (k + 1.0) + k * cfg.damping + cfg.tol;
    for &f in &cert.frequencies {
        assert!(f <= cap + 3.0 * sigma(cap), "{:?}", cert.frequencies);
    }
    let v: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
    for key in ["t_star", "residual", "distribution", "frequencies", "max_frequency", "ci", "bound", "status"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}
