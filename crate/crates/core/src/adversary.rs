//! Instability witnesses and the search for hard distributions.
//!
//! A witness of size `k` maps `(j, ±)` to labeled examples and carries an
//! anchor example plus a partition `F_0, …, F_k` of the output class. For
//! `t ∈ [-1, 1]^k` the distribution `D_t` puts `|t_j|/k` on `W(j, sign t_j)`
//! and the rest on the anchor. The damped balance functions
//! `g_j(t) = P[A(S) ∈ F_0] - P[A(S) ∈ F_j] + δ·t_j` are non-positive on the
//! faces `t_j = -1` and non-negative on `t_j = +1` for empirical learners, so
//! they have a common root. At that root every part carries probability at
//! most about `1/(k+1)`, which caps the modal output frequency.
//!
//! The solver runs Gauss–Seidel coordinate bisection on Monte Carlo
//! estimates of `g`. Every evaluation reuses the same trial seeds (common
//! random numbers), so the estimated `g` is a fixed function of `t` and
//! bisection does not chase noise. Budgets are nested: a doubled budget adds
//! trials `[B, 2B)` to the ones already run.

use serde::{Deserialize, Serialize};

use crate::concepts::{hollow_star_center, ConceptClass, Domain, Hypothesis, Label};
use crate::distributions::{witness_distribution, FiniteDistribution, LabeledExample};
use crate::error::{Error, Result};
use crate::estimators::{hoeffding_half_width, output_histogram, output_histogram_range, OutputHistogram, DEFAULT_BETA};
use crate::learners::Learner;
use crate::seed::Seed;

const MODULE: &str = "adversary";

/// Cap on `2^k·|C|` and `|F|·(k+1)` work during validation.
pub const VALIDATION_BUDGET: u64 = 1 << 26;

/// A conjunction of point labels. An empty cell matches everything.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cell {
    constraints: Vec<(usize, Label)>,
}

impl Cell {
    pub fn new(constraints: Vec<(usize, Label)>) -> Self {
        Cell { constraints }
    }

    pub fn constraints(&self) -> &[(usize, Label)] {
        &self.constraints
    }

    pub fn matches(&self, h: &Hypothesis) -> bool {
        self.constraints.iter().all(|&(x, y)| h.label(x) == y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstabilityWitness {
    domain: Domain,
    minus: Vec<LabeledExample>,
    plus: Vec<LabeledExample>,
    anchor: LabeledExample,
    cells: Vec<Cell>,
}

impl InstabilityWitness {
    /// Builds a witness, checking shapes only. Use [`validate_witness`] for
    /// the combinatorial conditions.
    pub fn new(
        domain: Domain,
        minus: Vec<LabeledExample>,
        plus: Vec<LabeledExample>,
        anchor: LabeledExample,
        cells: Vec<Cell>,
    ) -> Result<Self> {
        let k = minus.len();
        if k == 0 || plus.len() != k {
            return Err(Error::argument(
                MODULE,
                format!("witness maps need equal nonzero sizes, got {} and {}", k, plus.len()),
            ));
        }
        if cells.len() != k + 1 {
            return Err(Error::argument(
                MODULE,
                format!("partition has {} parts, size {k} witness needs {}", cells.len(), k + 1),
            ));
        }
        let n = domain.len();
        let points = minus.iter().chain(&plus).chain(std::iter::once(&anchor)).map(|e| e.x);
        let cell_points = cells.iter().flat_map(|c| c.constraints.iter().map(|&(x, _)| x));
        if let Some(x) = points.chain(cell_points).find(|&x| x >= n) {
            return Err(Error::domain(MODULE, format!("witness point index {x} outside domain of {n} points")));
        }
        Ok(InstabilityWitness {
            domain,
            minus,
            plus,
            anchor,
            cells,
        })
    }

    pub fn k(&self) -> usize {
        self.minus.len()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// `W(j, label)` with `j` counted from zero.
    pub fn point(&self, j: usize, label: Label) -> LabeledExample {
        match label {
            Label::Minus => self.minus[j],
            Label::Plus => self.plus[j],
        }
    }

    pub fn anchor(&self) -> LabeledExample {
        self.anchor
    }

    /// Parts `F_0, …, F_k`.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Index of the first part containing `h`, `None` if it lies outside all.
    pub fn part_of(&self, h: &Hypothesis) -> Result<Option<usize>> {
        if h.len() != self.domain.len() {
            return Err(Error::domain(
                MODULE,
                format!("hypothesis on {} points, witness domain has {}", h.len(), self.domain.len()),
            ));
        }
        Ok(self.cells.iter().position(|c| c.matches(h)))
    }

    pub fn to_json(&self) -> String {
        let ex = |e: &LabeledExample| ExampleRecord {
            x: self.domain.name(e.x).to_string(),
            y: e.y,
        };
        let file = WitnessFile {
            domain: self.domain.points().to_vec(),
            minus: self.minus.iter().map(ex).collect(),
            plus: self.plus.iter().map(ex).collect(),
            anchor: ex(&self.anchor),
            partition: self
                .cells
                .iter()
                .map(|c| c.constraints.iter().map(|&(x, y)| ex(&LabeledExample::new(x, y))).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("witness serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WitnessFile =
            serde_json::from_str(text).map_err(|e| Error::format(MODULE, format!("witness file: {e}")))?;
        let domain = Domain::new(file.domain)?;
        let resolve = |r: &ExampleRecord| -> Result<LabeledExample> {
            let x = domain
                .index_of(&r.x)
                .ok_or_else(|| Error::domain(MODULE, format!("witness file: unknown point {:?}", r.x)))?;
            Ok(LabeledExample::new(x, r.y))
        };
        let minus = file.minus.iter().map(resolve).collect::<Result<Vec<_>>>()?;
        let plus = file.plus.iter().map(resolve).collect::<Result<Vec<_>>>()?;
        let anchor = resolve(&file.anchor)?;
        let cells = file
            .partition
            .iter()
            .map(|part| {
                part.iter()
                    .map(|r| resolve(r).map(|e| (e.x, e.y)))
                    .collect::<Result<Vec<_>>>()
                    .map(Cell::new)
            })
            .collect::<Result<Vec<_>>>()?;
        InstabilityWitness::new(domain, minus, plus, anchor, cells)
    }
}

#[derive(Serialize, Deserialize)]
struct ExampleRecord {
    x: String,
    y: Label,
}

#[derive(Serialize, Deserialize)]
struct WitnessFile {
    domain: Vec<String>,
    minus: Vec<ExampleRecord>,
    plus: Vec<ExampleRecord>,
    anchor: ExampleRecord,
    partition: Vec<Vec<ExampleRecord>>,
}

/// Witness of size `d - 1` on the cube over `d` points: `W(j, b) = (x_j, b)`
/// with anchor `(x_0, +)`; `F_0` is `+` on `x_1..x_{d-1}` and `F_j` is `+` on
/// `x_1..x_{j-1}`, `-` on `x_j`.
pub fn cube_witness(d: usize) -> Result<InstabilityWitness> {
    if d < 2 {
        return Err(Error::argument(MODULE, format!("cube witness needs d >= 2, got d={d}")));
    }
    let domain = Domain::numbered(d)?;
    let k = d - 1;
    let minus = (1..=k).map(|j| LabeledExample::new(j, Label::Minus)).collect();
    let plus = (1..=k).map(|j| LabeledExample::new(j, Label::Plus)).collect();
    let mut cells = vec![Cell::new((1..=k).map(|i| (i, Label::Plus)).collect())];
    for j in 1..=k {
        let mut c: Vec<(usize, Label)> = (1..j).map(|i| (i, Label::Plus)).collect();
        c.push((j, Label::Minus));
        cells.push(Cell::new(c));
    }
    InstabilityWitness::new(domain, minus, plus, LabeledExample::new(0, Label::Plus), cells)
}

/// Witness of size `s - 2` from a hollow star on `x_0, …, x_{s-1}`.
///
/// Written for a star whose missing center is all `-`: `W(j, -) = (x_1, -)`,
/// `W(j, +) = (x_{j+1}, -)`, anchor `(x_0, -)`, `F_0` is `+` at `x_1` and
/// `F_j` is `-` on `x_1..x_j` and `+` at `x_{j+1}`. Other centers are handled
/// by reading `-` as the center label and `+` as its flip.
pub fn hollow_star_witness(c: &ConceptClass, star_points: &[usize]) -> Result<InstabilityWitness> {
    let s = star_points.len();
    if s < 3 {
        return Err(Error::argument(MODULE, format!("hollow star witness needs at least 3 points, got {s}")));
    }
    if let Some(&x) = star_points.iter().find(|&&x| x >= c.domain().len()) {
        return Err(Error::domain(MODULE, format!("star point index {x} outside the class domain")));
    }
    let center = hollow_star_center(c, star_points)
        .ok_or_else(|| Error::InvalidWitness(format!("points {star_points:?} do not carry a hollow star")))?;
    // "minus" and "plus" relative to the center.
    let lo = |i: usize| LabeledExample::new(star_points[i], center[i]);
    let hi = |i: usize| (star_points[i], center[i].flip());
    let k = s - 2;
    let minus = (1..=k).map(|_| lo(1)).collect();
    let plus = (1..=k).map(|j| lo(j + 1)).collect();
    let mut cells = vec![Cell::new(vec![hi(1)])];
    for j in 1..=k {
        let mut cell: Vec<(usize, Label)> = (1..=j).map(|i| (lo(i).x, lo(i).y)).collect();
        cell.push(hi(j + 1));
        cells.push(Cell::new(cell));
    }
    InstabilityWitness::new(c.domain().clone(), minus, plus, lo(0), cells)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessValidation {
    pub valid: bool,
    /// One line per violated condition, empty when valid.
    pub detail: Vec<String>,
}

/// Exhaustive check of both witness conditions: realizability of every sign
/// pattern together with the anchor inside `c`, and the partition of `f`
/// with its separation properties.
pub fn validate_witness(w: &InstabilityWitness, c: &ConceptClass, f: &ConceptClass) -> Result<WitnessValidation> {
    let n = w.domain.len();
    if c.domain().len() != n || f.domain().len() != n {
        return Err(Error::domain(
            MODULE,
            format!(
                "witness domain has {n} points, classes have {} and {}",
                c.domain().len(),
                f.domain().len()
            ),
        ));
    }
    let k = w.k();
    let patterns = if k < 63 { 1u64 << k } else { u64::MAX };
    let work = patterns.saturating_mul(c.len() as u64);
    if k >= 63 || work > VALIDATION_BUDGET {
        return Err(Error::size(MODULE, format!("2^{k} sign patterns times {} hypotheses exceeds budget", c.len())));
    }
    if (f.len() as u64).saturating_mul(k as u64 + 1) > VALIDATION_BUDGET {
        return Err(Error::size(MODULE, format!("output class of {} hypotheses exceeds budget", f.len())));
    }
    let mut detail = Vec::new();
    let a = w.anchor;

    // Realizability: bit j of `sigma` set means sign `-` for coordinate j.
    for sigma in 0..patterns {
        let chosen: Vec<LabeledExample> = (0..k)
            .map(|j| w.point(j, if (sigma >> j) & 1 == 1 { Label::Minus } else { Label::Plus }))
            .collect();
        if let Some(j) = chosen.iter().position(|e| *e == a) {
            detail.push(format!("realizability anchor conflict: W({}, ·) equals the anchor", j + 1));
            break;
        }
        let ok = c
            .iter()
            .any(|h| h.label(a.x) == a.y && chosen.iter().all(|e| h.label(e.x) == e.y));
        if !ok {
            let signs: String = (0..k).map(|j| if (sigma >> j) & 1 == 1 { '-' } else { '+' }).collect();
            detail.push(format!("realizability fails for sign pattern {signs}"));
            break;
        }
    }

    let mut uncovered = None;
    let mut overlap = None;
    let mut sep_zero = None;
    let mut sep_part = None;
    for h in f.iter() {
        let parts: Vec<usize> = (0..=k).filter(|&i| w.cells[i].matches(h)).collect();
        match parts.as_slice() {
            [] => {
                uncovered.get_or_insert(*h);
            }
            [0] => {
                if let Some(j) = (0..k).find(|&j| h.label(w.minus[j].x) == w.minus[j].y) {
                    sep_zero.get_or_insert((*h, j));
                }
            }
            [j] => {
                let e = w.plus[j - 1];
                if h.label(e.x) == e.y {
                    sep_part.get_or_insert((*h, *j));
                }
            }
            _ => {
                overlap.get_or_insert((*h, parts[0], parts[1]));
            }
        }
    }
    if let Some((h, i, j)) = overlap {
        detail.push(format!("partition not disjoint: {h} lies in F_{i} and F_{j}"));
    }
    if let Some(h) = uncovered {
        detail.push(format!("partition does not cover: {h} lies in no part"));
    }
    if let Some((h, j)) = sep_zero {
        detail.push(format!("separation (a) fails: {h} in F_0 agrees with W({}, -)", j + 1));
    }
    if let Some((h, j)) = sep_part {
        detail.push(format!("separation (b) fails: {h} in F_{j} agrees with W({j}, +)"));
    }
    Ok(WitnessValidation {
        valid: detail.is_empty(),
        detail,
    })
}

/// Monte Carlo estimate of the damped balance functions at one `t`.
#[derive(Clone, Debug)]
pub struct GVector {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// Half-width for each value (a difference of two frequencies).
    pub ci: f64,
    /// Frequencies of `F_0, …, F_k`.
    pub cell_freqs: Vec<f64>,
    /// Frequency of outputs in no part.
    pub other: f64,
    pub histogram: OutputHistogram,
}

fn gvector_from(w: &InstabilityWitness, t: &[f64], damping: f64, hist: OutputHistogram, beta: f64) -> Result<GVector> {
    let k = w.k();
    let trials = hist.trials() as f64;
    let mut counts = vec![0u64; k + 1];
    let mut other = 0u64;
    for (h, &c) in hist.counts() {
        match w.part_of(h)? {
            Some(i) => counts[i] += c,
            None => other += c,
        }
    }
    let cell_freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / trials).collect();
    let values = (0..k).map(|j| cell_freqs[0] - cell_freqs[j + 1] + damping * t[j]).collect();
    Ok(GVector {
        t: t.to_vec(),
        values,
        ci: 2.0 * hoeffding_half_width(hist.trials(), beta),
        cell_freqs,
        other: other as f64 / trials,
        histogram: hist,
    })
}

/// Estimates `g_1..g_k` at `t` from `mc` trials on samples of size `n`. All
/// coordinates share one histogram.
pub fn g_vector<L: Learner + ?Sized>(
    learner: &L,
    w: &InstabilityWitness,
    t: &[f64],
    damping: f64,
    n: usize,
    mc: u64,
    seed: Seed,
) -> Result<GVector> {
    if learner.domain_len() != w.domain.len() {
        return Err(Error::domain(
            MODULE,
            format!("learner outputs {} points, witness domain has {}", learner.domain_len(), w.domain.len()),
        ));
    }
    let d = witness_distribution(w, t)?;
    let hist = output_histogram(learner, &d, n, mc, seed)?;
    gvector_from(w, t, damping, hist, DEFAULT_BETA)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Damping `δ` in `g_j`.
    pub damping: f64,
    /// Sample size per trial.
    pub n: usize,
    /// Base trial budget per evaluation.
    pub mc: u64,
    /// Target residual `max_j |g_j|`.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Bisection halvings per coordinate update.
    pub bisection_steps: usize,
    /// Sign decisions may grow the budget up to `mc * max_budget_factor`.
    pub max_budget_factor: u64,
    /// Trials for the final measurement at `t*`.
    pub cert_trials: u64,
    pub beta: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            damping: 0.02,
            n: 64,
            mc: 2000,
            tol: 0.02,
            max_sweeps: 20,
            bisection_steps: 30,
            max_budget_factor: 16,
            cert_trials: 5000,
            beta: DEFAULT_BETA,
        }
    }
}

impl SolverConfig {
    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::argument(MODULE, m));
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return bad(format!("damping={} must lie in (0, 1)", self.damping));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol={} must be positive", self.tol));
        }
        if self.n == 0 || self.mc == 0 || self.cert_trials == 0 {
            return bad("n, mc and cert_trials must be at least 1".into());
        }
        if self.max_sweeps == 0 || self.max_budget_factor == 0 {
            return bad("max_sweeps and max_budget_factor must be at least 1".into());
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad(format!("beta={} must lie in (0, 1)", self.beta));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertificateStatus {
    Converged,
    Unconverged,
}

#[derive(Clone, Debug)]
pub struct InstabilityCertificate {
    pub t_star: Vec<f64>,
    /// `max_j |g_j(t*)|` at the base budget.
    pub residual: f64,
    pub distribution: FiniteDistribution,
    pub domain: Domain,
    /// Frequencies of `F_0, …, F_k` at `t*` over the certificate trials.
    pub frequencies: Vec<f64>,
    pub other_frequency: f64,
    pub modal: Hypothesis,
    pub max_frequency: f64,
    /// Hoeffding half-width of each certificate frequency.
    pub ci: f64,
    /// `1/(k+1)`.
    pub bound: f64,
    pub status: CertificateStatus,
    pub sweeps: usize,
    pub evaluations: u64,
    pub trials: u64,
    pub n: usize,
    pub damping: f64,
    /// Per-atom Hoeffding deviation of empirical masses at size `n`, union
    /// bound over the `2k+1` support points at confidence `1 - δ`.
    pub concentration_margin: f64,
}

impl InstabilityCertificate {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "t_star": self.t_star,
            "residual": self.residual,
            "distribution": self.distribution.to_json_value(&self.domain),
            "frequencies": self.frequencies,
            "other_frequency": self.other_frequency,
            "modal": self.modal.to_string(),
            "max_frequency": self.max_frequency,
            "ci": self.ci,
            "bound": self.bound,
            "status": self.status,
            "sweeps": self.sweeps,
            "evaluations": self.evaluations,
            "trials": self.trials,
            "n": self.n,
            "damping": self.damping,
            "concentration_margin": self.concentration_margin,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("certificate serializes")
    }
}

struct Probe<'a, L: ?Sized> {
    learner: &'a L,
    witness: &'a InstabilityWitness,
    cfg: SolverConfig,
    seed: Seed,
    evaluations: u64,
}

impl<L: Learner + ?Sized> Probe<'_, L> {
    fn at(&mut self, t: &[f64], trials: u64) -> Result<GVector> {
        self.evaluations += 1;
        g_vector_seeded(self.learner, self.witness, t, &self.cfg, trials, self.seed)
    }

    /// `g_j(t)` at the base budget, grown while its sign is within noise.
    fn coordinate(&mut self, t: &[f64], j: usize) -> Result<(f64, f64)> {
        let base = self.at(t, self.cfg.mc)?;
        let base_value = base.values[j];
        if base_value.abs() <= self.cfg.tol / 2.0 {
            return Ok((base_value, base_value));
        }
        let cap = self.cfg.mc.saturating_mul(self.cfg.max_budget_factor);
        let d = witness_distribution(self.witness, t)?;
        let mut g = base;
        while g.values[j].abs() < g.ci && g.histogram.trials() < cap {
            let have = g.histogram.trials();
            let more = output_histogram_range(self.learner, &d, self.cfg.n, have..(2 * have).min(cap), self.seed)?;
            let mut hist = g.histogram;
            hist.merge(&more)?;
            self.evaluations += 1;
            g = gvector_from(self.witness, t, self.cfg.damping, hist, self.cfg.beta)?;
        }
        Ok((base_value, g.values[j]))
    }
}

fn g_vector_seeded<L: Learner + ?Sized>(
    learner: &L,
    w: &InstabilityWitness,
    t: &[f64],
    cfg: &SolverConfig,
    trials: u64,
    seed: Seed,
) -> Result<GVector> {
    let d = witness_distribution(w, t)?;
    let hist = output_histogram(learner, &d, cfg.n, trials, seed)?;
    gvector_from(w, t, cfg.damping, hist, cfg.beta)
}

fn residual(g: &GVector) -> f64 {
    g.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Searches `[-1, 1]^k` for a common root of the balance functions of
/// `learner` and measures the output law of the resulting distribution.
///
/// The witness is validated against `class` and `outputs` first, and the
/// face signs are checked before any bisection.
pub fn find_hard_distribution<L: Learner + ?Sized>(
    learner: &L,
    witness: &InstabilityWitness,
    class: &ConceptClass,
    outputs: &ConceptClass,
    cfg: &SolverConfig,
    seed: Seed,
) -> Result<InstabilityCertificate> {
    cfg.check()?;
    let check = validate_witness(witness, class, outputs)?;
    if !check.valid {
        return Err(Error::InvalidWitness(check.detail.join("; ")));
    }
    if learner.domain_len() != witness.domain.len() {
        return Err(Error::domain(
            MODULE,
            format!("learner outputs {} points, witness domain has {}", learner.domain_len(), witness.domain.len()),
        ));
    }
    let k = witness.k();
    let mut probe = Probe {
        learner,
        witness,
        cfg: *cfg,
        seed: seed.derive("solver"),
        evaluations: 0,
    };

    for j in 0..k {
        for side in [-1.0, 1.0] {
            let mut t = vec![0.0; k];
            t[j] = side;
            let g = probe.at(&t, cfg.mc)?;
            let v = g.values[j];
            if (side < 0.0 && v > g.ci) || (side > 0.0 && v < -g.ci) {
                return Err(Error::Precondition(format!(
                    "g_{} = {v:.4} on the face t_{} = {side:+} has the wrong sign (noise half-width {:.4})",
                    j + 1,
                    j + 1,
                    g.ci
                )));
            }
        }
    }

    let mut t = vec![0.0; k];
    let r = residual(&probe.at(&t, cfg.mc)?);
    let mut best = (r, t.clone());
    let mut status = if r <= cfg.tol {
        CertificateStatus::Converged
    } else {
        CertificateStatus::Unconverged
    };
    let mut sweeps = 0;
    'sweep: while status == CertificateStatus::Unconverged && sweeps < cfg.max_sweeps {
        sweeps += 1;
        for j in 0..k {
            let (mut lo, mut hi) = (-1.0f64, 1.0f64);
            // Bracket point with the smallest base-budget |g_j| seen so far.
            let mut closest = (f64::INFINITY, t[j]);
            for _ in 0..cfg.bisection_steps {
                let mid = 0.5 * (lo + hi);
                t[j] = mid;
                let (base, decided) = probe.coordinate(&t, j)?;
                if base.abs() < closest.0 {
                    closest = (base.abs(), mid);
                }
                if base.abs() <= cfg.tol / 2.0 {
                    break;
                }
                if decided > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            t[j] = closest.1;
            let r = residual(&probe.at(&t, cfg.mc)?);
            if r < best.0 {
                best = (r, t.clone());
            }
            if r <= cfg.tol {
                status = CertificateStatus::Converged;
                break 'sweep;
            }
        }
    }
    let (residual, t_star) = best;

    let distribution = witness_distribution(witness, &t_star)?;
    let cert_seed = seed.derive("certificate");
    let hist = output_histogram(learner, &distribution, cfg.n, cfg.cert_trials, cert_seed)?;
    let g = gvector_from(witness, &t_star, cfg.damping, hist, cfg.beta)?;
    let (modal, top) = g.histogram.ranked()[0];
    let kf = k as f64;
    Ok(InstabilityCertificate {
        t_star,
        residual,
        distribution,
        domain: witness.domain.clone(),
        frequencies: g.cell_freqs.clone(),
        other_frequency: g.other,
        modal,
        max_frequency: top as f64 / cfg.cert_trials as f64,
        ci: hoeffding_half_width(cfg.cert_trials, cfg.beta),
        bound: 1.0 / (kf + 1.0),
        status,
        sweeps,
        evaluations: probe.evaluations,
        trials: cfg.cert_trials,
        n: cfg.n,
        damping: cfg.damping,
        concentration_margin: ((2.0 * (2.0 * kf + 1.0) / cfg.damping).ln() / (2.0 * cfg.n as f64)).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concepts::{make_cube, make_singletons};
    use crate::learners::{empiricalize, erm_learner, FixedLawLearner};
    use std::sync::Arc;

    fn ex(x: usize, y: Label) -> LabeledExample {
        LabeledExample::new(x, y)
    }

    #[test]
    fn cube_witness_shape() {
        let w = cube_witness(2).unwrap();
        assert_eq!(w.k(), 1);
        assert_eq!(w.point(0, Label::Plus), ex(1, Label::Plus));
        assert_eq!(w.point(0, Label::Minus), ex(1, Label::Minus));
        assert_eq!(w.anchor(), ex(0, Label::Plus));
        let c = make_cube(2).unwrap();
        let parts: Vec<Option<usize>> = c.iter().map(|h| w.part_of(h).unwrap()).collect();
        // ++, +-, -+, --: F_0 is + at x_1
        assert_eq!(parts, vec![Some(0), Some(1), Some(0), Some(1)]);
        assert!(cube_witness(1).is_err());
    }

    #[test]
    fn cube_witnesses_validate() {
        for d in 2..=5 {
            let c = make_cube(d).unwrap();
            let v = validate_witness(&cube_witness(d).unwrap(), &c, &c).unwrap();
            assert!(v.valid, "d={d}: {:?}", v.detail);
        }
    }

    #[test]
    fn hollow_star_shape() {
        let c = make_singletons(3).unwrap();
        let w = hollow_star_witness(&c, &[0, 1, 2]).unwrap();
        assert_eq!(w.k(), 1);
        assert_eq!(w.anchor(), ex(0, Label::Minus));
        assert_eq!(w.point(0, Label::Minus), ex(1, Label::Minus));
        assert_eq!(w.point(0, Label::Plus), ex(2, Label::Minus));
        // realizability and separation hold; the "+ only at x_0" hypothesis
        // falls outside F_0 ∪ F_1.
        let v = validate_witness(&w, &c, &c).unwrap();
        assert_eq!(v.detail.len(), 1, "{:?}", v.detail);
        assert!(v.detail[0].starts_with("partition does not cover"));
        assert!(hollow_star_witness(&make_cube(3).unwrap(), &[0, 1, 2]).is_err());
    }

    #[test]
    fn corrupted_witnesses() {
        let c = make_cube(3).unwrap();
        let good = cube_witness(3).unwrap();
        let mut cells = good.cells().to_vec();
        cells[2] = Cell::new(vec![(1, Label::Minus)]);
        let overlapping = InstabilityWitness::new(
            good.domain().clone(),
            vec![ex(1, Label::Minus), ex(2, Label::Minus)],
            vec![ex(1, Label::Plus), ex(2, Label::Plus)],
            good.anchor(),
            cells,
        )
        .unwrap();
        let v = validate_witness(&overlapping, &c, &c).unwrap();
        assert!(!v.valid);
        assert!(v.detail.iter().any(|m| m.starts_with("partition not disjoint")), "{:?}", v.detail);

        let clash = InstabilityWitness::new(
            good.domain().clone(),
            vec![ex(0, Label::Plus), ex(2, Label::Minus)],
            vec![ex(1, Label::Plus), ex(2, Label::Plus)],
            good.anchor(),
            good.cells().to_vec(),
        )
        .unwrap();
        let v = validate_witness(&clash, &c, &c).unwrap();
        assert!(v.detail.iter().any(|m| m.starts_with("realizability anchor conflict")), "{:?}", v.detail);

        let learner = erm_learner(Arc::new(c.clone())).unwrap();
        let err = find_hard_distribution(&learner, &overlapping, &c, &c, &SolverConfig::default(), Seed(1));
        assert!(matches!(err, Err(Error::InvalidWitness(_))));
    }

    #[test]
    fn json_round_trip() {
        let w = cube_witness(4).unwrap();
        assert_eq!(InstabilityWitness::from_json(&w.to_json()).unwrap(), w);
        assert!(InstabilityWitness::from_json("{}").is_err());
    }

    #[test]
    fn g_at_origin_and_determinism() {
        let c = Arc::new(make_cube(3).unwrap());
        let a = empiricalize(erm_learner(c.clone()).unwrap(), c, 0.05, 0.02).unwrap();
        let w = cube_witness(3).unwrap();
        let g = g_vector(&a, &w, &[0.0, 0.0], 0.02, 64, 500, Seed(3)).unwrap();
        for j in 0..2 {
            assert_eq!(g.values[j], g.cell_freqs[0] - g.cell_freqs[j + 1]);
            assert!(g.values[j].abs() <= 1.02);
        }
        let again = g_vector(&a, &w, &[0.0, 0.0], 0.02, 64, 500, Seed(3)).unwrap();
        assert_eq!(g.values, again.values);

        // t_1 = -1 puts mass 1/2 on (x_1, -), so F_0 is essentially never hit.
        let g = g_vector(&a, &w, &[-1.0, 0.0], 0.02, 64, 2000, Seed(4)).unwrap();
        let sigma = (0.25f64 / 2000.0).sqrt();
        assert!(g.values[0] <= 3.0 * sigma, "{:?}", g.values);
    }

    #[test]
    fn scalar_bisection_converges() {
        let c = make_cube(2).unwrap();
        let a = erm_learner(Arc::new(c.clone())).unwrap();
        let w = cube_witness(2).unwrap();
        let cfg = SolverConfig {
            mc: 1000,
            cert_trials: 2000,
            ..SolverConfig::default()
        };
        let cert = find_hard_distribution(&a, &w, &c, &c, &cfg, Seed(11)).unwrap();
        assert_eq!(cert.status, CertificateStatus::Converged);
        assert!(cert.residual <= cfg.tol);
        assert_eq!(cert.t_star.len(), 1);
        let again = find_hard_distribution(&a, &w, &c, &c, &cfg, Seed(11)).unwrap();
        assert_eq!(cert.t_star, again.t_star);
        assert_eq!(cert.max_frequency, again.max_frequency);
    }

    #[test]
    fn wrong_face_signs_are_refused() {
        // Always outputs a member of F_0, whatever the sample.
        let c = make_cube(2).unwrap();
        let a = FixedLawLearner::constant("++".parse().unwrap());
        let w = cube_witness(2).unwrap();
        let err = find_hard_distribution(&a, &w, &c, &c, &SolverConfig::default(), Seed(2));
        assert!(matches!(err, Err(Error::Precondition(_))), "{err:?}");
    }

    #[test]
    fn validation_budget() {
        let c = make_cube(2).unwrap();
        let names: Vec<String> = (0..2).map(|i| i.to_string()).collect();
        let k = 40;
        let w = InstabilityWitness::new(
            Domain::new(names).unwrap(),
            vec![ex(1, Label::Minus); k],
            vec![ex(1, Label::Plus); k],
            ex(0, Label::Plus),
            vec![Cell::default(); k + 1],
        )
        .unwrap();
        assert!(validate_witness(&w, &c, &c).unwrap_err().is_size());
    }
}
