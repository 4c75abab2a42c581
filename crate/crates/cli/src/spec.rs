//! Textual specs for classes, learners and distributions.
//!
//! Learner specs look like `name(key=value,...)` where a value may itself be
//! a spec, e.g. `boost(inner=cube(d=3,eps=0.1),rho=0.3,eps=0.2,delta=0.05)`.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use stability_core::{
    boost, boost_params, coloring_learner, cube_learner, empiricalize, erm_learner, make_cube,
    make_singletons, make_thresholds, population_loss, threshold_learner, Coloring, ConceptClass,
    FiniteDistribution, Hypothesis, Learner,
};

use crate::error::{CliError, CliResult};
use crate::random::random_realizable_distributions;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Text(String),
    Spec(Spec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spec {
    pub name: String,
    /// Positional arguments carry an empty key.
    pub args: Vec<(String, Value)>,
}

impl std::fmt::Display for Spec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name)?;
        if self.args.is_empty() {
            return Ok(());
        }
        write!(f, "(")?;
        for (i, (k, v)) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if !k.is_empty() {
                write!(f, "{k}=")?;
            }
            match v {
                Value::Text(t) => write!(f, "{t}")?,
                Value::Spec(s) => write!(f, "{s}")?,
            }
        }
        write!(f, ")")
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    param: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> CliError {
        CliError::config(self.param, format!("{} (at offset {} of {:?})", message.into(), self.pos, self.text))
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    /// Reads up to the next structural character at this nesting level.
    fn atom(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if matches!(c, '(' | ')' | ',' | '=') {
                break;
            }
            self.pos += c.len_utf8();
        }
        self.text[start..self.pos].trim()
    }

    fn spec(&mut self) -> CliResult<Spec> {
        self.skip_ws();
        let name = self.atom().to_string();
        if name.is_empty() {
            return Err(self.err("expected a name"));
        }
        let mut args = Vec::new();
        self.skip_ws();
        if self.peek() == Some('(') {
            self.pos += 1;
            self.skip_ws();
            if self.peek() == Some(')') {
                self.pos += 1;
                return Ok(Spec { name, args });
            }
            loop {
                self.skip_ws();
                let save = self.pos;
                let first = self.atom().to_string();
                let (key, value) = if self.peek() == Some('=') {
                    self.pos += 1;
                    (first, self.value()?)
                } else {
                    self.pos = save;
                    (String::new(), self.value()?)
                };
                args.push((key, value));
                self.skip_ws();
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ')'")),
                }
            }
        }
        Ok(Spec { name, args })
    }

    fn value(&mut self) -> CliResult<Value> {
        self.skip_ws();
        let save = self.pos;
        let head = self.atom();
        if self.peek() == Some('(') {
            self.pos = save;
            return Ok(Value::Spec(self.spec()?));
        }
        if head.is_empty() {
            return Err(self.err("empty value"));
        }
        Ok(Value::Text(head.to_string()))
    }
}

/// Parses a spec string; `param` names the option it came from in errors.
pub fn parse_spec(text: &str, param: &str) -> CliResult<Spec> {
    let mut p = Parser { text, pos: 0, param };
    let spec = p.spec()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.err("trailing characters"));
    }
    Ok(spec)
}

/// Keyed or positional arguments of one spec, consumed as they are read so
/// leftovers can be reported.
struct Args<'a> {
    spec: &'a Spec,
    param: &'a str,
    used: Vec<bool>,
}

impl<'a> Args<'a> {
    fn new(spec: &'a Spec, param: &'a str) -> Self {
        Args {
            spec,
            param,
            used: vec![false; spec.args.len()],
        }
    }

    fn name(&self, key: &str) -> String {
        format!("{}: {}.{key}", self.param, self.spec.name)
    }

    fn take(&mut self, key: &str, position: usize) -> Option<&'a Value> {
        if let Some(i) = self.spec.args.iter().position(|(k, _)| k == key) {
            self.used[i] = true;
            return Some(&self.spec.args[i].1);
        }
        let positional: Vec<usize> = (0..self.spec.args.len()).filter(|&i| self.spec.args[i].0.is_empty()).collect();
        positional.get(position).map(|&i| {
            self.used[i] = true;
            &self.spec.args[i].1
        })
    }

    fn text(&mut self, key: &str, position: usize) -> CliResult<Option<&'a str>> {
        match self.take(key, position) {
            None => Ok(None),
            Some(Value::Text(t)) => Ok(Some(t.as_str())),
            Some(Value::Spec(s)) => Err(CliError::config(self.name(key), format!("expected a plain value, got {s}"))),
        }
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str, position: usize) -> CliResult<Option<T>> {
        match self.text(key, position)? {
            None => Ok(None),
            Some(t) => t
                .parse()
                .map(Some)
                .map_err(|_| CliError::config(self.name(key), format!("cannot parse {t:?} as a number"))),
        }
    }

    fn required<T: std::str::FromStr>(&mut self, key: &str, position: usize) -> CliResult<T> {
        self.number(key, position)?
            .ok_or_else(|| CliError::config(self.name(key), "missing required parameter"))
    }

    /// A nested spec; a bare word such as `erm` counts as one without arguments.
    fn spec(&mut self, key: &str) -> CliResult<Option<Spec>> {
        Ok(self.take(key, usize::MAX).map(|v| match v {
            Value::Spec(s) => s.clone(),
            Value::Text(t) => Spec {
                name: t.clone(),
                args: Vec::new(),
            },
        }))
    }

    fn finish(self) -> CliResult<()> {
        if let Some(i) = self.used.iter().position(|u| !u) {
            let (k, _) = &self.spec.args[i];
            let what = if k.is_empty() { format!("positional argument {}", i + 1) } else { k.clone() };
            return Err(CliError::config(
                format!("{}: {}", self.param, self.spec.name),
                format!("unknown parameter {what}"),
            ));
        }
        Ok(())
    }
}

/// `cube:D`, `thresholds:T`, `singletons:S` or a path to a class file.
pub fn parse_class(text: &str, param: &str) -> CliResult<ConceptClass> {
    let built = match text.split_once(':') {
        Some((kind @ ("cube" | "thresholds" | "singletons"), size)) => {
            let size: usize = size
                .parse()
                .map_err(|_| CliError::config(param, format!("cannot parse size {size:?} in {text:?}")))?;
            match kind {
                "cube" => make_cube(size)?,
                "thresholds" => make_thresholds(size)?,
                _ => make_singletons(size)?,
            }
        }
        _ => {
            let body = read_file(text, param)?;
            ConceptClass::from_json(&body)?
        }
    };
    Ok(built)
}

pub(crate) fn read_file(path: &str, param: &str) -> CliResult<String> {
    if !Path::new(path).is_file() {
        return Err(CliError::config(param, format!("no such file {path:?}")));
    }
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Context a learner spec may lean on when it omits parameters.
#[derive(Clone, Default)]
pub struct BuildContext {
    pub class: Option<Arc<ConceptClass>>,
    pub n: Option<usize>,
}

/// A learner together with the class it naturally learns, if any.
#[derive(Clone)]
pub struct BuiltLearner {
    pub learner: Arc<dyn Learner>,
    pub class: Option<Arc<ConceptClass>>,
    pub spec: String,
}

pub fn build_learner(text: &str, ctx: &BuildContext) -> CliResult<BuiltLearner> {
    let spec = parse_spec(text, "--learner")?;
    build(&spec, ctx, "--learner")
}

fn class_arg(args: &mut Args<'_>, ctx: &BuildContext) -> CliResult<Arc<ConceptClass>> {
    let param = args.name("class");
    match args.text("class", usize::MAX)? {
        Some(t) => Ok(Arc::new(parse_class(t, &param)?)),
        None => ctx
            .class
            .clone()
            .ok_or_else(|| CliError::config(param, "no class given and none implied by --class")),
    }
}

fn build(spec: &Spec, ctx: &BuildContext, param: &str) -> CliResult<BuiltLearner> {
    let mut a = Args::new(spec, param);
    let (learner, class): (Arc<dyn Learner>, Option<Arc<ConceptClass>>) = match spec.name.as_str() {
        "cube" => {
            let d: usize = a.required("d", 0)?;
            let eps: f64 = a.required("eps", 1)?;
            (Arc::new(cube_learner(d, eps)?), Some(Arc::new(make_cube(d)?)))
        }
        "thresholds" => {
            let t: usize = a.required("t", 0)?;
            let eps: f64 = a.required("eps", 1)?;
            (Arc::new(threshold_learner(t, eps)?), Some(Arc::new(make_thresholds(t)?)))
        }
        "erm" => {
            let c = class_arg(&mut a, ctx)?;
            (Arc::new(erm_learner(c.clone())?), Some(c))
        }
        "erm-emp" => {
            let eps: f64 = a.required("eps", 0)?;
            let delta: f64 = a.required("delta", 1)?;
            let c = class_arg(&mut a, ctx)?;
            let inner = erm_learner(c.clone())?;
            (Arc::new(empiricalize(inner, c.clone(), eps, delta)?), Some(c))
        }
        "emp" => {
            let inner_spec = a
                .spec("inner")?
                .ok_or_else(|| CliError::config(a.name("inner"), "missing required parameter"))?;
            let inner = build(&inner_spec, ctx, param)?;
            let eps: f64 = a.required("eps", 0)?;
            let delta: f64 = a.required("delta", 1)?;
            let c = match a.text("class", usize::MAX)? {
                Some(t) => Arc::new(parse_class(t, &a.name("class"))?),
                None => inner.class.clone().or_else(|| ctx.class.clone()).ok_or_else(|| {
                    CliError::config(a.name("class"), "no class given and none implied by the inner learner")
                })?,
            };
            (Arc::new(empiricalize(inner.learner, c.clone(), eps, delta)?), Some(c))
        }
        "boost" => {
            let inner_spec = a
                .spec("inner")?
                .ok_or_else(|| CliError::config(a.name("inner"), "missing required parameter"))?;
            let inner = build(&inner_spec, ctx, param)?;
            let rho: f64 = a.required("rho", usize::MAX)?;
            let eps: f64 = a.required("eps", usize::MAX)?;
            let delta: f64 = a.required("delta", usize::MAX)?;
            let n0 = match a.number::<usize>("n0", usize::MAX)? {
                Some(n0) => n0,
                None => inner
                    .learner
                    .required_sample_size()
                    .ok_or_else(|| CliError::config(a.name("n0"), "missing and not implied by the inner learner"))?,
            };
            let params = boost_params(rho, eps, delta, n0)?;
            let fallback = Hypothesis::all_plus(inner.learner.domain_len());
            (Arc::new(boost(inner.learner, params, fallback)?), inner.class)
        }
        "coloring-erm" => {
            let c = class_arg(&mut a, ctx)?;
            let n = match a.number::<usize>("n", usize::MAX)? {
                Some(n) => n,
                None => ctx.n.ok_or_else(|| CliError::config(a.name("n"), "missing and no --n given"))?,
            };
            let class = c.clone();
            let color: Coloring = Arc::new(move |d: &FiniteDistribution| {
                // canonical first population-loss minimizer
                let mut best = (f64::INFINITY, class.hypotheses()[0]);
                for h in class.iter() {
                    let l = population_loss(h, d).unwrap_or(f64::INFINITY);
                    if l < best.0 {
                        best = (l, *h);
                    }
                }
                best.1
            });
            (Arc::new(coloring_learner(color, n, c.domain().len())), Some(c))
        }
        other => {
            return Err(CliError::config(
                param,
                format!("unknown learner {other:?} (expected cube, thresholds, erm, erm-emp, emp, boost, coloring-erm)"),
            ))
        }
    };
    a.finish()?;
    Ok(BuiltLearner {
        learner,
        class,
        spec: spec.to_string(),
    })
}

/// Distributions named for reports.
pub fn build_distributions(text: &str, class: Option<&ConceptClass>) -> CliResult<Vec<(String, FiniteDistribution)>> {
    let param = "--dist";
    let class = class.ok_or_else(|| CliError::config(param, "distributions need a class (give --class or a class-bound learner)"))?;
    if text.starts_with("random(") {
        let spec = parse_spec(text, param)?;
        let mut a = Args::new(&spec, param);
        let count: usize = a.required("count", 0)?;
        let seed: u64 = a.required("seed", 1)?;
        a.finish()?;
        let list = random_realizable_distributions(class, count, seed.into())?;
        return Ok(list
            .into_iter()
            .enumerate()
            .map(|(i, d)| (format!("random#{i}"), d))
            .collect());
    }
    let body = read_file(text, param)?;
    let d = FiniteDistribution::from_json(&body, class.domain())?;
    let name = Path::new(text)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| text.to_string());
    Ok(vec![(name, d)])
}
