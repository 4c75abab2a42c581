//! Measuring and engineering the replicability of learning rules on finite
//! concept classes.
//!
//! The crate is organised bottom-up:
//!
//! * [`concepts`]: finite domains, ±1 hypotheses, concept classes and
//!   brute-force VC / Littlestone / hollow-star dimensions.
//! * [`distributions`]: finite-support distributions over labeled examples,
//!   sampling, losses and total variation.
//! * [`learners`]: the [`Learner`] contract and the concrete learning rules
//!   (ERM, the randomized-cutoff cube learner, the threshold learner, the
//!   empirical wrapper and the coloring learner).
//! * [`estimators`]: Monte Carlo and exact measurement of output laws,
//!   global stability, collision probability and list coverage.
//! * [`booster`]: turning a globally stable learner into a list replicable one.
//! * [`adversary`]: instability witnesses and the coordinate-bisection search
//!   for a hard distribution.
//!
//! Every random choice is driven by a [`Seed`], so all results are
//! reproducible bit-for-bit regardless of thread count.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod booster;
pub mod concepts;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod learners;
pub mod seed;

pub use adversary::{
    cube_witness, find_hard_distribution, g_vector, hollow_star_witness, validate_witness, Cell,
    CertificateStatus, GVector, InstabilityCertificate, InstabilityWitness, SolverConfig,
    WitnessValidation,
};
pub use booster::{boost, boost_params, BoostParams, BoostRun, BoostedLearner};
pub use concepts::{
    find_hollow_star, hollow_star_number, littlestone_dimension, make_cube, make_singletons,
    make_thresholds, vc_dimension, ConceptClass, Domain, HollowStar, Hypothesis, Label, Limits,
};
pub use distributions::{
    draw_sample, empirical_loss, is_realizable, population_loss, tv_distance,
    witness_distribution, FiniteDistribution, LabeledExample, Sample,
};
pub use error::{Error, Result};
pub use estimators::{
    exact_output_distribution, hoeffding_half_width, independent_replicability, list_coverage,
    output_histogram, shared_randomness_replicability, stability_report, Estimate, ExactLaw,
    OutputHistogram, StabilityReport,
};
pub use learners::{
    coloring_learner, cube_learner, empiricalize, erm_learner, threshold_learner, Coloring,
    FixedLawLearner, Learner, Outcome,
};
pub use seed::Seed;
