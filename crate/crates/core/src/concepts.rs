//! Finite concept classes and brute-force combinatorial dimensions.
//!
//! Hypotheses are stored as bit patterns in domain order with the first
//! domain point in the most significant position and `+` encoded as `0`.
//! Comparing the raw patterns therefore gives the lexicographic order over
//! label sequences with `+` before `-`, which is the canonical order used for
//! every tie-break in the crate.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MODULE: &str = "concepts";

/// Hard limit on the number of domain points a [`Hypothesis`] can carry.
pub const MAX_DOMAIN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Plus,
    Minus,
}

impl Label {
    pub fn from_sign(v: i64) -> Option<Label> {
        match v {
            1 => Some(Label::Plus),
            -1 => Some(Label::Minus),
            _ => None,
        }
    }

    /// `sign(0) = +`.
    pub fn of_real(v: f64) -> Label {
        if v >= 0.0 {
            Label::Plus
        } else {
            Label::Minus
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Label::Plus => 1,
            Label::Minus => -1,
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Plus => Label::Minus,
            Label::Minus => Label::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Label::Plus => '+',
            Label::Minus => '-',
        }
    }

    fn bit(self) -> u64 {
        match self {
            Label::Plus => 0,
            Label::Minus => 1,
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.sign())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Label::from_sign(v).ok_or_else(|| serde::de::Error::custom(format!("label {v} is not ±1")))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Ordered set of distinct, named points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    points: Vec<String>,
    index: HashMap<String, usize>,
}

impl Domain {
    pub fn new<I, S>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        if points.len() > MAX_DOMAIN {
            return Err(Error::size(
                MODULE,
                format!("domain has {} points, at most {MAX_DOMAIN} supported", points.len()),
            ));
        }
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::argument(MODULE, format!("duplicate domain point {p:?}")));
            }
        }
        Ok(Domain { points, index })
    }

    /// Points named `"1"`, ..., `"d"`.
    pub fn numbered(d: usize) -> Result<Self> {
        Domain::new((1..=d).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn name(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

/// A total ±1 labeling of a domain, stored as a bit pattern.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypothesis {
    len: u8,
    bits: u64,
}

impl Hypothesis {
    pub fn from_labels(labels: &[Label]) -> Self {
        assert!(labels.len() <= MAX_DOMAIN, "hypothesis longer than {MAX_DOMAIN}");
        let bits = labels.iter().fold(0u64, |acc, l| (acc << 1) | l.bit());
        Hypothesis {
            len: labels.len() as u8,
            bits,
        }
    }

    pub fn from_signs(signs: &[i64]) -> Option<Self> {
        let labels: Option<Vec<Label>> = signs.iter().map(|&s| Label::from_sign(s)).collect();
        labels.map(|l| Hypothesis::from_labels(&l))
    }

    pub fn all(len: usize, label: Label) -> Self {
        Hypothesis::from_labels(&vec![label; len])
    }

    /// The a priori fixed fallback hypothesis.
    pub fn all_plus(len: usize) -> Self {
        Hypothesis::all(len, Label::Plus)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn shift(&self, point: usize) -> u32 {
        (self.len as usize - 1 - point) as u32
    }

    #[inline]
    pub fn label(&self, point: usize) -> Label {
        debug_assert!(point < self.len());
        if (self.bits >> self.shift(point)) & 1 == 0 {
            Label::Plus
        } else {
            Label::Minus
        }
    }

    pub fn with_label(mut self, point: usize, label: Label) -> Self {
        let mask = 1u64 << self.shift(point);
        self.bits = (self.bits & !mask) | (label.bit() << self.shift(point));
        self
    }

    pub fn labels(&self) -> Vec<Label> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.len()).map(|i| self.label(i).sign()).collect()
    }

    /// Raw pattern, first point most significant, `-` as 1.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Projection onto `points`, first listed point most significant.
    pub fn project(&self, points: &[usize]) -> u64 {
        points
            .iter()
            .fold(0u64, |acc, &p| (acc << 1) | ((self.bits >> self.shift(p)) & 1))
    }

    pub fn hamming(&self, other: &Hypothesis) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", self.label(i).symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hypothesis({self})")
    }
}

impl std::str::FromStr for Hypothesis {
    type Err = Error;

    /// Parses a `+`/`-` pattern such as `"+-+"`.
    fn from_str(s: &str) -> Result<Self> {
        let labels: Result<Vec<Label>> = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Label::Plus),
                '-' => Ok(Label::Minus),
                other => Err(Error::format(MODULE, format!("bad label character {other:?} in {s:?}"))),
            })
            .collect();
        let labels = labels?;
        if labels.len() > MAX_DOMAIN {
            return Err(Error::size(MODULE, format!("pattern longer than {MAX_DOMAIN}")));
        }
        Ok(Hypothesis::from_labels(&labels))
    }
}

impl Serialize for Hypothesis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Hypothesis {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Brute-force limits. Exceeding any of them is an error, never a silent
/// truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest `d` accepted by [`make_cube`].
    pub cube_dim: usize,
    /// Largest domain the dimension searches will enumerate subsets of.
    pub domain: usize,
    /// Largest subset size the VC search will try.
    pub subset: usize,
    /// Largest class the Littlestone recursion accepts.
    pub class_size: usize,
    /// Largest hollow-star cap accepted.
    pub hollow_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            cube_dim: 16,
            domain: 20,
            subset: 12,
            class_size: 1 << 16,
            hollow_cap: 20,
        }
    }
}

/// A domain with a deduplicated, canonically ordered list of hypotheses.
#[derive(Clone, Debug)]
pub struct ConceptClass {
    domain: Domain,
    hypotheses: Vec<Hypothesis>,
    position: HashMap<Hypothesis, usize>,
}

impl PartialEq for ConceptClass {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.hypotheses == other.hypotheses
    }
}

impl ConceptClass {
    /// Builds a class in lexicographic order.
    pub fn new(domain: Domain, mut hypotheses: Vec<Hypothesis>) -> Result<Self> {
        hypotheses.sort_unstable();
        Self::with_order(domain, hypotheses)
    }

    /// Builds a class keeping the supplied order.
    pub fn with_order(domain: Domain, hypotheses: Vec<Hypothesis>) -> Result<Self> {
        let mut position = HashMap::with_capacity(hypotheses.len());
        for (i, h) in hypotheses.iter().enumerate() {
            if h.len() != domain.len() {
                return Err(Error::argument(
                    MODULE,
                    format!("hypothesis {i} has length {}, domain has {}", h.len(), domain.len()),
                ));
            }
            if position.insert(*h, i).is_some() {
                return Err(Error::argument(MODULE, format!("duplicate hypothesis {h}")));
            }
        }
        Ok(ConceptClass {
            domain,
            hypotheses,
            position,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn contains(&self, h: &Hypothesis) -> bool {
        self.position.contains_key(h)
    }

    /// Canonical index of `h` in this class.
    pub fn position(&self, h: &Hypothesis) -> Option<usize> {
        self.position.get(h).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Hypothesis> {
        self.hypotheses.iter()
    }

    /// Distinct patterns of the class on `points`.
    pub fn projection(&self, points: &[usize]) -> HashSet<u64> {
        self.hypotheses.iter().map(|h| h.project(points)).collect()
    }

    /// Parses the JSON class file format
    /// `{"domain": [...], "hypotheses": [[1,-1,...], ...]}`.
    ///
    /// Rows are sorted canonically unless `"explicit_order": true` is set.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ClassFile =
            serde_json::from_str(text).map_err(|e| Error::format(MODULE, format!("class file: {e}")))?;
        let domain = Domain::new(file.domain)?;
        let mut hyps = Vec::with_capacity(file.hypotheses.len());
        for (i, row) in file.hypotheses.iter().enumerate() {
            if row.len() != domain.len() {
                return Err(Error::format(
                    MODULE,
                    format!("class file: row {i} has {} entries, domain has {}", row.len(), domain.len()),
                ));
            }
            let h = Hypothesis::from_signs(row)
                .ok_or_else(|| Error::format(MODULE, format!("class file: row {i} has an entry other than ±1")))?;
            hyps.push(h);
        }
        let mut seen = HashSet::new();
        for (i, h) in hyps.iter().enumerate() {
            if !seen.insert(*h) {
                return Err(Error::format(MODULE, format!("class file: row {i} duplicates an earlier row")));
            }
        }
        if file.explicit_order {
            ConceptClass::with_order(domain, hyps)
        } else {
            ConceptClass::new(domain, hyps)
        }
    }

    pub fn to_json(&self) -> String {
        let file = ClassFile {
            domain: self.domain.points.clone(),
            hypotheses: self
                .hypotheses
                .iter()
                .map(|h| h.signs().into_iter().map(i64::from).collect())
                .collect(),
            explicit_order: false,
        };
        serde_json::to_string(&file).expect("class serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct ClassFile {
    domain: Vec<String>,
    hypotheses: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    explicit_order: bool,
}

/// The full cube `{±}^d`.
pub fn make_cube(d: usize) -> Result<ConceptClass> {
    make_cube_with(d, &Limits::default())
}

pub fn make_cube_with(d: usize, limits: &Limits) -> Result<ConceptClass> {
    if d == 0 {
        return Err(Error::argument(MODULE, "cube dimension d must be at least 1"));
    }
    if d > limits.cube_dim {
        return Err(Error::size(
            MODULE,
            format!("cube dimension d={d} exceeds cap {}", limits.cube_dim),
        ));
    }
    let domain = Domain::numbered(d)?;
    let hyps = (0..1u64 << d).map(|bits| Hypothesis { len: d as u8, bits }).collect();
    ConceptClass::with_order(domain, hyps)
}

/// Thresholds `τ_1, ..., τ_t` on the points `1, ..., t-1`, where
/// `τ_i(x) = +` iff `x >= i`.
pub fn make_thresholds(t: usize) -> Result<ConceptClass> {
    if t < 2 {
        return Err(Error::argument(MODULE, format!("threshold count t={t} must be at least 2")));
    }
    if t - 1 > MAX_DOMAIN {
        return Err(Error::size(MODULE, format!("threshold count t={t} exceeds {}", MAX_DOMAIN + 1)));
    }
    let domain = Domain::numbered(t - 1)?;
    let hyps = (1..=t).map(|i| threshold(t, i)).collect();
    ConceptClass::with_order(domain, hyps)
}

/// `τ_i` over `t - 1` points.
pub(crate) fn threshold(t: usize, i: usize) -> Hypothesis {
    let labels: Vec<Label> = (1..t)
        .map(|x| if x >= i { Label::Plus } else { Label::Minus })
        .collect();
    Hypothesis::from_labels(&labels)
}

/// The `s` singletons on `s` points (the all-minus pattern is excluded).
pub fn make_singletons(s: usize) -> Result<ConceptClass> {
    if s < 2 {
        return Err(Error::argument(MODULE, format!("singleton count s={s} must be at least 2")));
    }
    let domain = Domain::numbered(s)?;
    let hyps = (0..s)
        .map(|i| Hypothesis::all(s, Label::Minus).with_label(i, Label::Plus))
        .collect();
    ConceptClass::new(domain, hyps)
}

fn check_domain(c: &ConceptClass, limits: &Limits, lower_bound: Option<usize>) -> Result<()> {
    if c.domain().len() > limits.domain {
        return Err(Error::Size {
            module: MODULE,
            message: format!("domain of {} points exceeds brute-force cap {}", c.domain().len(), limits.domain),
            lower_bound,
        });
    }
    Ok(())
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order until it
/// returns `true`.
fn any_subset(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return true;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn vc_dimension(c: &ConceptClass) -> Result<usize> {
    vc_dimension_with(c, &Limits::default())
}

pub fn vc_dimension_with(c: &ConceptClass, limits: &Limits) -> Result<usize> {
    check_domain(c, limits, None)?;
    let n = c.domain().len();
    let mut best = 0;
    for k in 1..=n {
        if c.len() < (1usize << k.min(63)) {
            break;
        }
        if k > limits.subset {
            return Err(Error::Size {
                module: MODULE,
                message: format!("VC search would need subsets of size {k} (cap {})", limits.subset),
                lower_bound: Some(best),
            });
        }
        let shattered = any_subset(n, k, |pts| c.projection(pts).len() == 1 << k);
        if !shattered {
            break;
        }
        best = k;
    }
    Ok(best)
}

pub fn littlestone_dimension(c: &ConceptClass) -> Result<usize> {
    littlestone_dimension_with(c, &Limits::default())
}

/// Mistake-tree recursion over subsets of the class, memoized on the subset.
pub fn littlestone_dimension_with(c: &ConceptClass, limits: &Limits) -> Result<usize> {
    check_domain(c, limits, None)?;
    if c.len() > limits.class_size {
        return Err(Error::size(
            MODULE,
            format!("class of {} hypotheses exceeds Littlestone cap {}", c.len(), limits.class_size),
        ));
    }
    let members: Vec<Hypothesis> = c.hypotheses().to_vec();
    let mut memo: HashMap<Vec<Hypothesis>, usize> = HashMap::new();
    Ok(ldim_rec(&members, c.domain().len(), &mut memo))
}

fn ldim_rec(set: &[Hypothesis], n: usize, memo: &mut HashMap<Vec<Hypothesis>, usize>) -> usize {
    if set.len() <= 1 {
        return 0;
    }
    if let Some(&v) = memo.get(set) {
        return v;
    }
    // A depth-k mistake tree needs 2^k leaves.
    let ceiling = (usize::BITS - 1 - set.len().leading_zeros()) as usize;
    let mut best = 0;
    for x in 0..n {
        let (plus, minus): (Vec<Hypothesis>, Vec<Hypothesis>) =
            set.iter().partition(|h| h.label(x) == Label::Plus);
        if plus.is_empty() || minus.is_empty() {
            continue;
        }
        // min(a, b) + 1 can only beat `best` if both sides can.
        if plus.len() < (1 << best) || minus.len() < (1 << best) {
            continue;
        }
        let a = ldim_rec(&plus, n, memo);
        if a < best {
            continue;
        }
        let b = ldim_rec(&minus, n, memo);
        best = best.max(1 + a.min(b));
        if best == ceiling {
            break;
        }
    }
    memo.insert(set.to_vec(), best);
    best
}

/// A hollow star: points `X'` and a missing center pattern whose Hamming
/// neighbors on `X'` all occur in the projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HollowStar {
    pub points: Vec<usize>,
    /// Labels of the missing center on `points`, in the same order.
    pub center: Vec<Label>,
}

fn hollow_center(c: &ConceptClass, pts: &[usize]) -> Option<u64> {
    let s = pts.len();
    let proj = c.projection(pts);
    let mut hits: HashMap<u64, usize> = HashMap::new();
    for &p in &proj {
        for b in 0..s {
            let f = p ^ (1 << b);
            if !proj.contains(&f) {
                *hits.entry(f).or_default() += 1;
            }
        }
    }
    hits.into_iter().filter(|&(_, n)| n == s).map(|(f, _)| f).min()
}

fn pattern_labels(pattern: u64, s: usize) -> Vec<Label> {
    (0..s)
        .map(|i| if (pattern >> (s - 1 - i)) & 1 == 0 { Label::Plus } else { Label::Minus })
        .collect()
}

/// Largest hollow star of size at most `cap`, searching sizes downwards and
/// subsets lexicographically.
pub fn find_hollow_star(c: &ConceptClass, cap: usize) -> Result<Option<HollowStar>> {
    let limits = Limits::default();
    if cap > limits.hollow_cap {
        return Err(Error::size(MODULE, format!("hollow star cap {cap} exceeds {}", limits.hollow_cap)));
    }
    check_domain(c, &limits, None)?;
    let n = c.domain().len();
    for s in (1..=cap.min(n)).rev() {
        let mut found = None;
        any_subset(n, s, |pts| match hollow_center(c, pts) {
            Some(center) => {
                found = Some(HollowStar {
                    points: pts.to_vec(),
                    center: pattern_labels(center, s),
                });
                true
            }
            None => false,
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

pub fn hollow_star_number(c: &ConceptClass, cap: usize) -> Result<usize> {
    Ok(find_hollow_star(c, cap)?.map_or(0, |h| h.points.len()))
}

/// Checks that `points` carry a hollow star and returns its center.
pub fn hollow_star_center(c: &ConceptClass, points: &[usize]) -> Option<Vec<Label>> {
    hollow_center(c, points).map(|p| pattern_labels(p, points.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> Hypothesis {
        s.parse().unwrap()
    }

    #[test]
    fn cube_enumeration() {
        let c1 = make_cube(1).unwrap();
        assert_eq!(c1.hypotheses(), &[h("+"), h("-")]);
        let c2 = make_cube(2).unwrap();
        assert_eq!(c2.hypotheses(), &[h("++"), h("+-"), h("-+"), h("--")]);
        let c3 = make_cube(3).unwrap();
        assert_eq!(c3.len(), 8);
        assert_eq!(vc_dimension(&c3).unwrap(), 3);
    }

    #[test]
    fn cube_cap() {
        assert!(make_cube(17).unwrap_err().is_size());
        assert!(make_cube(0).is_err());
        let big = Limits {
            cube_dim: 20,
            ..Limits::default()
        };
        assert_eq!(make_cube_with(17, &big).unwrap().len(), 1 << 17);
    }

    #[test]
    fn thresholds_layout() {
        let c = make_thresholds(3).unwrap();
        assert_eq!(c.domain().points(), &["1", "2"]);
        assert_eq!(c.hypotheses(), &[h("++"), h("-+"), h("--")]);
        let c = make_thresholds(2).unwrap();
        assert_eq!(c.hypotheses(), &[h("+"), h("-")]);
        assert!(make_thresholds(1).is_err());
    }

    #[test]
    fn singletons_layout() {
        let c = make_singletons(3).unwrap();
        assert_eq!(c.len(), 3);
        for hyp in c.iter() {
            assert_eq!(hyp.labels().iter().filter(|&&l| l == Label::Plus).count(), 1);
        }
        assert!(!c.contains(&Hypothesis::all(3, Label::Minus)));
        assert!(make_singletons(1).is_err());
    }

    #[test]
    fn vc_examples() {
        assert_eq!(vc_dimension(&make_thresholds(5).unwrap()).unwrap(), 1);
        assert_eq!(vc_dimension(&make_singletons(3).unwrap()).unwrap(), 1);
        let single = ConceptClass::new(Domain::numbered(3).unwrap(), vec![h("+-+")]).unwrap();
        assert_eq!(vc_dimension(&single).unwrap(), 0);
    }

    #[test]
    fn singletons_pairs_never_doubly_positive() {
        // Oracle: every pair misses (+,+), so no pair is shattered.
        let c = make_singletons(3).unwrap();
        for a in 0..3 {
            for b in a + 1..3 {
                assert!(!c.projection(&[a, b]).contains(&0));
            }
        }
    }

    #[test]
    fn vc_size_error_carries_lower_bound() {
        let limits = Limits {
            subset: 2,
            ..Limits::default()
        };
        match vc_dimension_with(&make_cube(4).unwrap(), &limits) {
            Err(Error::Size { lower_bound, .. }) => assert_eq!(lower_bound, Some(2)),
            other => panic!("unexpected {other:?}"),
        }
        let wide = ConceptClass::new(Domain::numbered(21).unwrap(), vec![Hypothesis::all_plus(21)]).unwrap();
        assert!(vc_dimension(&wide).unwrap_err().is_size());
    }

    #[test]
    fn ldim_examples() {
        let single = ConceptClass::new(Domain::numbered(2).unwrap(), vec![h("+-")]).unwrap();
        assert_eq!(littlestone_dimension(&single).unwrap(), 0);
        assert_eq!(littlestone_dimension(&make_cube(2).unwrap()).unwrap(), 2);
        assert_eq!(littlestone_dimension(&make_thresholds(5).unwrap()).unwrap(), 2);
        assert_eq!(littlestone_dimension(&make_thresholds(9).unwrap()).unwrap(), 3);
        assert_eq!(littlestone_dimension(&make_thresholds(8).unwrap()).unwrap(), 3);
        assert_eq!(littlestone_dimension(&make_thresholds(4).unwrap()).unwrap(), 2);
    }

    #[test]
    fn hollow_star_examples() {
        assert_eq!(hollow_star_number(&make_singletons(4).unwrap(), 10).unwrap(), 4);
        assert_eq!(hollow_star_number(&make_cube(2).unwrap(), 10).unwrap(), 0);
        assert_eq!(hollow_star_number(&make_thresholds(5).unwrap(), 10).unwrap(), 2);
        assert!(hollow_star_number(&make_cube(2).unwrap(), 21).unwrap_err().is_size());
        let star = find_hollow_star(&make_singletons(4).unwrap(), 10).unwrap().unwrap();
        assert_eq!(star.center, vec![Label::Minus; 4]);
    }

    #[test]
    fn thresholds_have_no_three_point_hollow_star() {
        // Oracle: exhaustive over triples, patterns are monotone -..-+..+.
        let c = make_thresholds(5).unwrap();
        for a in 0..4 {
            for b in a + 1..4 {
                for d in b + 1..4 {
                    assert_eq!(hollow_star_center(&c, &[a, b, d]), None);
                }
            }
        }
        assert_eq!(hollow_star_center(&c, &[0, 1]), Some(vec![Label::Plus, Label::Minus]));
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let c = make_thresholds(4).unwrap();
        assert_eq!(ConceptClass::from_json(&c.to_json()).unwrap(), c);
        let dup = r#"{"domain":["a","b"],"hypotheses":[[1,-1],[1,-1]]}"#;
        assert!(ConceptClass::from_json(dup).is_err());
        let short = r#"{"domain":["a","b"],"hypotheses":[[1]]}"#;
        assert!(ConceptClass::from_json(short).is_err());
        let zero = r#"{"domain":["a"],"hypotheses":[[0]]}"#;
        assert!(ConceptClass::from_json(zero).is_err());
        let unsorted = r#"{"domain":["a","b"],"hypotheses":[[-1,-1],[1,1]]}"#;
        assert_eq!(ConceptClass::from_json(unsorted).unwrap().hypotheses()[0], h("++"));
        let explicit = r#"{"domain":["a","b"],"hypotheses":[[-1,-1],[1,1]],"explicit_order":true}"#;
        assert_eq!(ConceptClass::from_json(explicit).unwrap().hypotheses()[0], h("--"));
    }

    #[test]
    fn hypothesis_bits() {
        let x = h("+-+");
        assert_eq!(x.label(1), Label::Minus);
        assert_eq!(x.with_label(1, Label::Plus), h("+++"));
        assert_eq!(x.project(&[2, 1]), 0b01);
        assert!(h("++") < h("+-") && h("+-") < h("-+"));
        assert_eq!(x.to_string(), "+-+");
    }
}
