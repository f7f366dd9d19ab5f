//! Line-based `key = value` configuration with `#` comments.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64;

use crate::kernel::{GridSpec, UnitsConfig};
use crate::scenarios::{Scenario, ScenarioParams};

/// What went wrong on one line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IssueKind {
    UnknownKey,
    MissingKey,
    DuplicateKey,
    /// A line with no `=`.
    Malformed,
    BadNumber(String),
    InvalidEnum(String),
    InvalidValue(String),
}

/// One configuration problem. `line` is 1-based; 0 for a key that is absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub line: usize,
    pub key: String,
    pub kind: IssueKind,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.line == 0 {
            "config".to_string()
        } else {
            format!("line {}", self.line)
        };
        match &self.kind {
            IssueKind::UnknownKey => write!(f, "{at}: unknown key `{}`", self.key),
            IssueKind::MissingKey => write!(f, "{at}: missing required key `{}`", self.key),
            IssueKind::DuplicateKey => write!(f, "{at}: key `{}` given more than once", self.key),
            IssueKind::Malformed => write!(f, "{at}: expected `key = value`"),
            IssueKind::BadNumber(v) => write!(f, "{at}: key `{}`: unparsable number `{v}`", self.key),
            IssueKind::InvalidEnum(v) => write!(f, "{at}: key `{}`: invalid choice `{v}`", self.key),
            IssueKind::InvalidValue(why) => write!(f, "{at}: key `{}`: {why}", self.key),
        }
    }
}

/// All issues found in one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, issue) in self.0.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone)]
pub(crate) struct Entry {
    pub line: usize,
    pub value: String,
}

/// Splits `text` into keys and values, reporting malformed and repeated lines.
pub(crate) fn split_entries(text: &str, issues: &mut Vec<ConfigIssue>) -> BTreeMap<String, Entry> {
    let mut out: BTreeMap<String, Entry> = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            issues.push(ConfigIssue {
                line,
                key: body.to_string(),
                kind: IssueKind::Malformed,
            });
            continue;
        };
        let key = key.trim().to_string();
        if out.contains_key(&key) {
            issues.push(ConfigIssue {
                line,
                key,
                kind: IssueKind::DuplicateKey,
            });
            continue;
        }
        out.insert(
            key,
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    out
}

/// Typed reads that record issues instead of stopping at the first one.
pub(crate) struct Reader<'a> {
    pub entries: &'a BTreeMap<String, Entry>,
    pub issues: &'a mut Vec<ConfigIssue>,
}

impl Reader<'_> {
    fn issue(&mut self, key: &str, kind: IssueKind) {
        let line = self.entries.get(key).map_or(0, |e| e.line);
        self.issues.push(ConfigIssue {
            line,
            key: key.to_string(),
            kind,
        });
    }

    pub fn number<T: std::str::FromStr>(&mut self, key: &str, default: T) -> T {
        match self.entries.get(key) {
            None => default,
            Some(e) => match e.value.parse::<T>() {
                Ok(v) => v,
                Err(_) => {
                    let v = e.value.clone();
                    self.issue(key, IssueKind::BadNumber(v));
                    default
                }
            },
        }
    }

    pub fn positive(&mut self, key: &str, default: f64) -> f64 {
        let v = self.number(key, default);
        if !(v > 0.0 && v.is_finite()) {
            self.issue(key, IssueKind::InvalidValue(format!("{v} must be positive")));
        }
        v
    }

    pub fn list(&mut self, key: &str, default: Vec<f64>) -> Vec<f64> {
        let Some(e) = self.entries.get(key) else {
            return default;
        };
        let mut out = Vec::new();
        for item in e.value.split(',').map(str::trim) {
            match item.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push(v),
                _ => {
                    let bad = item.to_string();
                    self.issue(key, IssueKind::BadNumber(bad));
                    return default;
                }
            }
        }
        out
    }

    pub fn text(&self, key: &str) -> Option<String> {
        self.entries.get(key).map(|e| e.value.clone())
    }

    pub fn invalid(&mut self, key: &str, why: impl Into<String>) {
        self.issue(key, IssueKind::InvalidValue(why.into()));
    }

    pub fn invalid_enum(&mut self, key: &str, value: &str) {
        self.issue(key, IssueKind::InvalidEnum(value.to_string()));
    }

    pub fn missing(&mut self, key: &str) {
        self.issues.push(ConfigIssue {
            line: 0,
            key: key.to_string(),
            kind: IssueKind::MissingKey,
        });
    }

    pub fn reject_unknown(&mut self, known: &[&str], pattern: impl Fn(&str) -> bool) {
        let unknown: Vec<(usize, String)> = self
            .entries
            .iter()
            .filter(|(k, _)| !known.contains(&k.as_str()) && !pattern(k))
            .map(|(k, e)| (e.line, k.clone()))
            .collect();
        for (line, key) in unknown {
            self.issues.push(ConfigIssue {
                line,
                key,
                kind: IssueKind::UnknownKey,
            });
        }
    }
}

/// Keys accepted by [`parse_config`], in canonical order.
pub const CONFIG_KEYS: [&str; 22] = [
    "scenario",
    "hbar",
    "mass",
    "eta",
    "sigma0",
    "l",
    "omega",
    "weights_re1",
    "weights_im1",
    "weights_re2",
    "weights_im2",
    "grid_min",
    "grid_max",
    "grid_points",
    "times",
    "seed",
    "output_dir",
    "particles",
    "steps",
    "dt",
    "bins",
    "boundary",
];

/// A complete scenario run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub units: UnitsConfig,
    pub sigma0: f64,
    pub half_separation: f64,
    pub omega: f64,
    pub weights: (Complex64, Complex64),
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    pub times: Vec<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub particles: usize,
    pub steps: usize,
    pub dt: f64,
    pub bins: usize,
    pub absorbing: bool,
}

impl ScenarioConfig {
    /// Defaults for `scenario`; only the scenario name is required in a file.
    pub fn defaults(scenario: Scenario) -> Self {
        let p = ScenarioParams::defaults(scenario);
        let axis = p.grid.axis(0);
        Self {
            scenario,
            units: p.units,
            sigma0: p.sigma0,
            half_separation: p.half_separation,
            omega: p.omega,
            weights: p.weights,
            grid_min: axis.min,
            grid_max: axis.max,
            grid_points: axis.points,
            times: p.times,
            seed: 0,
            output_dir: PathBuf::from(format!("out/{scenario}")),
            particles: 10_000,
            steps: 1000,
            dt: 1e-3,
            bins: 64,
            absorbing: false,
        }
    }

    pub fn grid(&self) -> crate::Result<GridSpec> {
        if self.scenario.dim() == 1 {
            GridSpec::line(self.grid_min, self.grid_max, self.grid_points)
        } else {
            GridSpec::square(self.grid_min, self.grid_max, self.grid_points)
        }
    }

    pub fn params(&self) -> crate::Result<ScenarioParams> {
        Ok(ScenarioParams {
            scenario: self.scenario,
            units: self.units,
            sigma0: self.sigma0,
            half_separation: self.half_separation,
            omega: self.omega,
            weights: self.weights,
            grid: self.grid()?,
            times: self.times.clone(),
        })
    }

    /// Canonical text: every key in [`CONFIG_KEYS`] order, numbers in
    /// shortest round-trip form.
    pub fn canonical(&self) -> String {
        self.pairs().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Canonical key/value pairs.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let (w1, w2) = self.weights;
        let times: Vec<String> = self.times.iter().map(|t| t.to_string()).collect();
        vec![
            ("scenario", self.scenario.to_string()),
            ("hbar", self.units.hbar.to_string()),
            ("mass", self.units.mass.to_string()),
            ("eta", self.units.eta.to_string()),
            ("sigma0", self.sigma0.to_string()),
            ("l", self.half_separation.to_string()),
            ("omega", self.omega.to_string()),
            ("weights_re1", w1.re.to_string()),
            ("weights_im1", w1.im.to_string()),
            ("weights_re2", w2.re.to_string()),
            ("weights_im2", w2.im.to_string()),
            ("grid_min", self.grid_min.to_string()),
            ("grid_max", self.grid_max.to_string()),
            ("grid_points", self.grid_points.to_string()),
            ("times", times.join(", ")),
            ("seed", self.seed.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            ("particles", self.particles.to_string()),
            ("steps", self.steps.to_string()),
            ("dt", self.dt.to_string()),
            ("bins", self.bins.to_string()),
            ("boundary", if self.absorbing { "absorbing" } else { "reflecting" }.to_string()),
        ]
    }
}

/// Parses a scenario configuration, collecting every problem found.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigErrors> {
    let mut issues = Vec::new();
    let entries = split_entries(text, &mut issues);
    let mut r = Reader {
        entries: &entries,
        issues: &mut issues,
    };
    r.reject_unknown(&CONFIG_KEYS, |_| false);
    let scenario = match r.text("scenario") {
        None => {
            r.missing("scenario");
            None
        }
        Some(name) => match name.parse::<Scenario>() {
            Ok(s) => Some(s),
            Err(_) => {
                r.invalid_enum("scenario", &name);
                None
            }
        },
    };
    let mut c = ScenarioConfig::defaults(scenario.unwrap_or(Scenario::FreePacket));
    let hbar = r.positive("hbar", c.units.hbar);
    let mass = r.positive("mass", c.units.mass);
    let eta = r.positive("eta", c.units.eta);
    c.units = UnitsConfig { hbar, mass, eta };
    c.sigma0 = r.positive("sigma0", c.sigma0);
    c.half_separation = r.positive("l", c.half_separation);
    c.omega = r.positive("omega", c.omega);
    let (w1, w2) = c.weights;
    let re1 = r.number("weights_re1", w1.re);
    let im1 = r.number("weights_im1", w1.im);
    let re2 = r.number("weights_re2", w2.re);
    let im2 = r.number("weights_im2", w2.im);
    c.weights = (Complex64::new(re1, im1), Complex64::new(re2, im2));
    if [re1, im1, re2, im2].iter().any(|v| !v.is_finite()) {
        r.invalid("weights_re1", "weights must be finite");
    } else if re1 == 0.0 && im1 == 0.0 && re2 == 0.0 && im2 == 0.0 {
        r.invalid("weights_re1", "weights must not all vanish");
    }
    c.grid_min = r.number("grid_min", c.grid_min);
    c.grid_max = r.number("grid_max", c.grid_max);
    if !(c.grid_min.is_finite() && c.grid_max.is_finite() && c.grid_max > c.grid_min) {
        r.invalid("grid_max", "grid_max must exceed grid_min");
    }
    c.grid_points = r.number("grid_points", c.grid_points);
    if c.grid_points < 8 {
        r.invalid("grid_points", "at least 8 grid points are required");
    }
    c.times = r.list("times", c.times.clone());
    if crate::scenarios::validate_times(&c.times).is_err() {
        r.invalid("times", "times must be non-negative and strictly increasing");
    }
    c.seed = r.number("seed", c.seed);
    if let Some(dir) = r.text("output_dir") {
        if dir.is_empty() {
            r.invalid("output_dir", "empty path");
        }
        c.output_dir = PathBuf::from(dir);
    }
    c.particles = r.number("particles", c.particles);
    if c.particles == 0 {
        r.invalid("particles", "at least one particle is required");
    }
    c.steps = r.number("steps", c.steps);
    c.dt = r.positive("dt", c.dt);
    c.bins = r.number("bins", c.bins);
    if c.bins == 0 {
        r.invalid("bins", "at least one bin is required");
    }
    if let Some(b) = r.text("boundary") {
        match b.as_str() {
            "reflecting" => c.absorbing = false,
            "absorbing" => c.absorbing = true,
            other => r.invalid_enum("boundary", other),
        }
    }
    if issues.is_empty() {
        Ok(c)
    } else {
        issues.sort_by_key(|i| i.line);
        Err(ConfigErrors(issues))
    }
}

/// Inputs of `infer bayes`: a prior and the likelihood of the observed
/// evidence under each hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesConfig {
    pub prior: Vec<f64>,
    pub likelihood: Vec<f64>,
}

/// Inputs of `infer maxent`: a prior (uniform over `outcomes` when absent)
/// and numbered moment constraints `feature<k>`/`target<k>`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntConfig {
    pub prior: Vec<f64>,
    pub constraints: Vec<(Vec<f64>, f64)>,
}

fn numbered(key: &str, stem: &str) -> Option<usize> {
    key.strip_prefix(stem).and_then(|k| k.parse().ok())
}

pub fn parse_bayes_config(text: &str) -> Result<BayesConfig, ConfigErrors> {
    let mut issues = Vec::new();
    let entries = split_entries(text, &mut issues);
    let mut r = Reader {
        entries: &entries,
        issues: &mut issues,
    };
    r.reject_unknown(&["prior", "likelihood"], |_| false);
    for key in ["prior", "likelihood"] {
        if r.text(key).is_none() {
            r.missing(key);
        }
    }
    let prior = r.list("prior", Vec::new());
    let likelihood = r.list("likelihood", Vec::new());
    if !prior.is_empty() && !likelihood.is_empty() && prior.len() != likelihood.len() {
        r.invalid("likelihood", format!("{} values for {} hypotheses", likelihood.len(), prior.len()));
    }
    if issues.is_empty() {
        Ok(BayesConfig { prior, likelihood })
    } else {
        Err(ConfigErrors(issues))
    }
}

pub fn parse_maxent_config(text: &str) -> Result<MaxEntConfig, ConfigErrors> {
    let mut issues = Vec::new();
    let entries = split_entries(text, &mut issues);
    let mut r = Reader {
        entries: &entries,
        issues: &mut issues,
    };
    r.reject_unknown(&["prior", "outcomes"], |k| {
        numbered(k, "feature").is_some() || numbered(k, "target").is_some()
    });
    let outcomes: usize = r.number("outcomes", 0);
    let mut prior = r.list("prior", Vec::new());
    if prior.is_empty() {
        if outcomes == 0 {
            r.missing("prior");
        } else {
            prior = vec![1.0 / outcomes as f64; outcomes];
        }
    } else if outcomes != 0 && outcomes != prior.len() {
        r.invalid("outcomes", format!("prior has {} entries", prior.len()));
    }
    let mut ids: Vec<usize> = entries.keys().filter_map(|k| numbered(k, "feature")).collect();
    ids.extend(entries.keys().filter_map(|k| numbered(k, "target")));
    ids.sort_unstable();
    ids.dedup();
    let mut constraints = Vec::new();
    for k in ids {
        let (fk, tk) = (format!("feature{k}"), format!("target{k}"));
        if r.text(&fk).is_none() {
            r.missing(&fk);
            continue;
        }
        if r.text(&tk).is_none() {
            r.missing(&tk);
            continue;
        }
        let feature = r.list(&fk, Vec::new());
        let target: f64 = r.number(&tk, 0.0);
        if !prior.is_empty() && feature.len() != prior.len() {
            r.invalid(&fk, format!("{} values for {} outcomes", feature.len(), prior.len()));
        }
        constraints.push((feature, target));
    }
    if issues.is_empty() {
        Ok(MaxEntConfig { prior, constraints })
    } else {
        issues.sort_by_key(|i| i.line);
        Err(ConfigErrors(issues))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse_config("scenario = free_packet\n").unwrap();
        assert_eq!(c, ScenarioConfig::defaults(Scenario::FreePacket));
        assert_eq!(c.grid_points, 1024);
        assert_eq!(c.times, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\nscenario = ho_1d   # trailing\n  omega = 2.5\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.scenario, Scenario::Ho1d);
        assert_eq!(c.omega, 2.5);
    }

    #[test]
    fn bad_number_names_line_and_key() {
        let err = parse_config("scenario = double_slit\nweights_im1 = x\n").unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert_eq!(err.0[0].line, 2);
        assert_eq!(err.0[0].key, "weights_im1");
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(err.to_string().contains("weights_im1"), "{err}");
    }

    #[test]
    fn every_error_is_reported() {
        let text = "colour = blue\nscenario = tunnel\nsigma0 = -1\ngrid_points = many\nno equals sign\n";
        let err = parse_config(text).unwrap_err();
        let kinds: Vec<(usize, &IssueKind)> = err.0.iter().map(|i| (i.line, &i.kind)).collect();
        assert!(kinds.contains(&(1, &IssueKind::UnknownKey)));
        assert!(kinds.contains(&(2, &IssueKind::InvalidEnum("tunnel".into()))));
        assert!(matches!(kinds.iter().find(|k| k.0 == 3), Some((3, IssueKind::InvalidValue(_)))));
        assert!(kinds.contains(&(4, &IssueKind::BadNumber("many".into()))));
        assert!(kinds.contains(&(5, &IssueKind::Malformed)));
    }

    #[test]
    fn missing_scenario() {
        let err = parse_config("omega = 1\n").unwrap_err();
        assert_eq!(err.0[0].kind, IssueKind::MissingKey);
        assert_eq!(err.0[0].key, "scenario");
    }

    #[test]
    fn duplicate_key() {
        let err = parse_config("scenario = ho_1d\nomega = 1\nomega = 2\n").unwrap_err();
        assert_eq!(err.0[0].line, 3);
        assert_eq!(err.0[0].kind, IssueKind::DuplicateKey);
    }

    #[test]
    fn canonical_form_of_defaults_reparses() {
        for s in Scenario::ALL {
            let c = ScenarioConfig::defaults(s);
            assert_eq!(parse_config(&c.canonical()).unwrap(), c);
        }
    }

    #[test]
    fn infer_configs() {
        let b = parse_bayes_config("prior = 0.001, 0.999\nlikelihood = 0.9, 0.05\n").unwrap();
        assert_eq!(b.prior.len(), 2);
        assert!(parse_bayes_config("prior = 0.5, 0.5\n").is_err());
        let m = parse_maxent_config("outcomes = 6\nfeature1 = 1,2,3,4,5,6\ntarget1 = 4.5\n").unwrap();
        assert_eq!(m.prior.len(), 6);
        assert_eq!(m.constraints, vec![(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 4.5)]);
        let err = parse_maxent_config("outcomes = 2\nfeature1 = 1,2\nfeature2 = 1,1\ntarget2 = 1\n").unwrap_err();
        assert!(err.0.iter().any(|i| i.key == "target1" && i.kind == IssueKind::MissingKey));
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6f64..1e6, (1e-12f64..1e12).prop_map(|x| x), Just(0.0)]
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            s in 0usize..5,
            hbar in 1e-3f64..1e3,
            sigma0 in 1e-3f64..1e3,
            w in proptest::array::uniform4(finite()),
            lo in -1e3f64..0.0,
            span in 1e-3f64..1e3,
            points in 8usize..5000,
            mut times in proptest::collection::vec(0.0f64..1e4, 1..8),
            seed in any::<u64>(),
            dir in "[a-z][a-z0-9_/]{0,12}",
            absorbing in any::<bool>(),
        ) {
            times.sort_by(f64::total_cmp);
            times.dedup();
            let mut c = ScenarioConfig::defaults(Scenario::ALL[s]);
            c.units.hbar = hbar;
            c.sigma0 = sigma0;
            prop_assume!(w.iter().any(|v| *v != 0.0));
            c.weights = (Complex64::new(w[0], w[1]), Complex64::new(w[2], w[3]));
            c.grid_min = lo;
            c.grid_max = lo + span;
            prop_assume!(c.grid_max > c.grid_min);
            c.grid_points = points;
            c.times = times;
            c.seed = seed;
            c.output_dir = PathBuf::from(dir);
            c.absorbing = absorbing;
            let text = c.canonical();
            let back = parse_config(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(back.canonical(), text);
        }
    }
}
