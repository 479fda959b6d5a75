//! Flat key-value scenario documents.
//!
//! One `key = value` pair per line, dotted section keys, `#` starts a comment.
//! All values are bare numbers in SI units (m, rad, 1/m) or bare words.
//!
//! ```text
//! scenario = collimated_classical
//! params.k = 10
//! params.sigma = 5e-4
//! params.phi = 0.1
//! grid.n = 4096
//! grid.window_factor = 16
//! sweep.parameter = phi
//! sweep.start = 0.05
//! sweep.stop = 0.5
//! sweep.count = 10
//! sweep.scale = linear
//! output.path = deflection.csv
//! output.format = csv
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use weakbeam_core::collimated::{self, CollimatedParams};
use weakbeam_core::fourier::{self, DivergingGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    CollimatedQuantum,
    CollimatedClassical,
    Diverging,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Self::CollimatedQuantum => "collimated_quantum",
            Self::CollimatedClassical => "collimated_classical",
            Self::Diverging => "diverging",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "collimated_quantum" => Some(Self::CollimatedQuantum),
            "collimated_classical" => Some(Self::CollimatedClassical),
            "diverging" => Some(Self::Diverging),
            _ => None,
        }
    }

    pub fn is_collimated(self) -> bool {
        !matches!(self, Self::Diverging)
    }

    /// Parameter names accepted under `params.` (and as sweep targets).
    pub fn parameters(self) -> &'static [&'static str] {
        if self.is_collimated() {
            &["k", "sigma", "phi"]
        } else {
            &["k0", "s_i", "a", "l_lm", "l_md", "k", "phi"]
        }
    }

    fn default_window_factor(self) -> f64 {
        if self.is_collimated() {
            collimated::DEFAULT_WINDOW_FACTOR
        } else {
            fourier::DIVERGING_WINDOW_FACTOR
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioParams {
    Collimated(CollimatedParams),
    Diverging(DivergingGeometry),
}

impl ScenarioParams {
    pub fn get(&self, name: &str) -> Option<f64> {
        match self {
            Self::Collimated(p) => match name {
                "k" => Some(p.k),
                "sigma" => Some(p.sigma),
                "phi" => Some(p.phi),
                _ => None,
            },
            Self::Diverging(g) => match name {
                "k0" => Some(g.k0),
                "s_i" => Some(g.s_i),
                "a" => Some(g.a),
                "l_lm" => Some(g.l_lm),
                "l_md" => Some(g.l_md),
                "k" => Some(g.k),
                "phi" => Some(g.phi),
                _ => None,
            },
        }
    }

    /// Copy with one named parameter replaced.
    pub fn with(&self, name: &str, value: f64) -> Option<Self> {
        let mut out = *self;
        let slot = match &mut out {
            Self::Collimated(p) => match name {
                "k" => &mut p.k,
                "sigma" => &mut p.sigma,
                "phi" => &mut p.phi,
                _ => return None,
            },
            Self::Diverging(g) => match name {
                "k0" => &mut g.k0,
                "s_i" => &mut g.s_i,
                "a" => &mut g.a,
                "l_lm" => &mut g.l_lm,
                "l_md" => &mut g.l_md,
                "k" => &mut g.k,
                "phi" => &mut g.phi,
                _ => return None,
            },
        };
        *slot = value;
        Some(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    /// Sample count; `None` picks the scenario default.
    pub n: Option<usize>,
    /// Window width in beam radii (collimated: of `sigma`, diverging: of
    /// the detector-plane radius).
    pub window_factor: f64,
}

pub const MIN_WINDOW_FACTOR: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: SweepScale,
}

impl SweepConfig {
    /// Sweep values in order; both endpoints are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == last {
                    return self.stop;
                }
                let t = i as f64 / last as f64;
                match self.scale {
                    SweepScale::Linear => self.start + (self.stop - self.start) * t,
                    SweepScale::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub params: ScenarioParams,
    pub grid: GridConfig,
    pub sweep: Option<SweepConfig>,
    pub output: OutputConfig,
}

/// One problem found in a config document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub key: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

/// Every violation found in a document, not just the first.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid config:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
pub struct ConfigInvalid(pub Vec<Violation>);

impl ConfigInvalid {
    pub fn mentions(&self, key: &str) -> bool {
        self.0.iter().any(|v| v.key == key)
    }
}

struct Collector {
    entries: BTreeMap<String, (usize, String)>,
    used: Vec<String>,
    violations: Vec<Violation>,
}

impl Collector {
    fn fail(&mut self, key: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        let value = self.entries.get(key).map(|(_, v)| v.clone());
        if value.is_some() {
            self.used.push(key.to_string());
        }
        value
    }

    fn number(&mut self, key: &str) -> Option<f64> {
        let raw = self.raw(key)?;
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.fail(key, format!("expected a finite number, got {raw:?}"));
                None
            }
        }
    }

    fn required_number(&mut self, key: &str) -> Option<f64> {
        if !self.entries.contains_key(key) {
            self.fail(key, "missing required key");
            return None;
        }
        self.number(key)
    }

    fn check(&mut self, key: &str, value: Option<f64>, ok: impl Fn(f64) -> bool, rule: &str) {
        if let Some(v) = value {
            if !ok(v) {
                self.fail(key, format!("{rule}, got {v}"));
            }
        }
    }
}

/// Parses and validates a document.
pub fn validate_config(raw: &str) -> Result<ScenarioConfig, ConfigInvalid> {
    let mut c = Collector {
        entries: BTreeMap::new(),
        used: Vec::new(),
        violations: Vec::new(),
    };

    for (lineno, line) in raw.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            c.fail(&format!("line {}", lineno + 1), "expected `key = value`");
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            c.fail(&format!("line {}", lineno + 1), "empty key");
            continue;
        }
        if let Some((first, _)) = c.entries.get(key) {
            let msg = format!("duplicate key (first set on line {})", first + 1);
            c.fail(key, msg);
            continue;
        }
        c.entries
            .insert(key.to_string(), (lineno, value.to_string()));
    }

    let scenario = match c.raw("scenario") {
        None => {
            c.fail("scenario", "missing required key");
            None
        }
        Some(s) => Scenario::parse(&s).or_else(|| {
            c.fail(
                "scenario",
                format!(
                    "unknown scenario {s:?} (collimated_quantum, collimated_classical, diverging)"
                ),
            );
            None
        }),
    };

    let params = scenario.and_then(|s| parse_params(&mut c, s));

    let n = c.number("grid.n").and_then(|v| {
        if v.fract() != 0.0 || v < 256.0 || !(v as usize).is_power_of_two() {
            c.fail("grid.n", format!("must be a power of two >= 256, got {v}"));
            None
        } else {
            Some(v as usize)
        }
    });
    let window_factor = c.number("grid.window_factor");
    c.check(
        "grid.window_factor",
        window_factor,
        |v| v >= MIN_WINDOW_FACTOR,
        "must be >= 6",
    );

    let sweep = parse_sweep(&mut c, scenario);

    let path = c.raw("output.path").map(PathBuf::from);
    let format = match c.raw("output.format").as_deref() {
        None | Some("csv") => Some(OutputFormat::Csv),
        Some("jsonl") => Some(OutputFormat::Jsonl),
        Some(other) => {
            c.fail(
                "output.format",
                format!("expected csv or jsonl, got {other:?}"),
            );
            None
        }
    };

    let unknown: Vec<String> = c
        .entries
        .keys()
        .filter(|k| !c.used.contains(k))
        .cloned()
        .collect();
    for key in unknown {
        c.fail(&key, "unknown key for this scenario");
    }

    match (scenario, params, format) {
        (Some(scenario), Some(params), Some(format)) if c.violations.is_empty() => {
            Ok(ScenarioConfig {
                scenario,
                params,
                grid: GridConfig {
                    n,
                    window_factor: window_factor.unwrap_or(scenario.default_window_factor()),
                },
                sweep,
                output: OutputConfig { path, format },
            })
        }
        _ => Err(ConfigInvalid(c.violations)),
    }
}

fn parse_params(c: &mut Collector, scenario: Scenario) -> Option<ScenarioParams> {
    if scenario.is_collimated() {
        let k = c.required_number("params.k");
        let sigma = c.required_number("params.sigma");
        let phi = c.required_number("params.phi");
        c.check("params.sigma", sigma, |v| v > 0.0, "must be > 0");
        Some(ScenarioParams::Collimated(CollimatedParams {
            k: k?,
            sigma: sigma?,
            phi: phi?,
        }))
    } else {
        let k0 = match (
            c.entries.contains_key("params.k0"),
            c.entries.contains_key("params.wavelength"),
        ) {
            (true, true) => {
                c.fail(
                    "params.wavelength",
                    "give either params.k0 or params.wavelength, not both",
                );
                None
            }
            (false, true) => {
                let lambda = c.number("params.wavelength");
                c.check("params.wavelength", lambda, |v| v > 0.0, "must be > 0");
                lambda
                    .filter(|v| *v > 0.0)
                    .map(|l| 2.0 * std::f64::consts::PI / l)
            }
            _ => c.required_number("params.k0"),
        };
        let s_i = c.required_number("params.s_i");
        let a = c.required_number("params.a");
        let l_lm = c.required_number("params.l_lm");
        let l_md = c.required_number("params.l_md");
        let k = c.required_number("params.k");
        let phi = c.required_number("params.phi");
        c.check("params.k0", k0, |v| v > 0.0, "must be > 0");
        c.check("params.s_i", s_i, |v| v != 0.0, "must be nonzero");
        c.check("params.a", a, |v| v > 0.0, "must be > 0");
        c.check("params.l_lm", l_lm, |v| v >= 0.0, "must be >= 0");
        c.check("params.l_md", l_md, |v| v >= 0.0, "must be >= 0");
        Some(ScenarioParams::Diverging(DivergingGeometry {
            k0: k0?,
            s_i: s_i?,
            a: a?,
            l_lm: l_lm?,
            l_md: l_md?,
            k: k?,
            phi: phi?,
        }))
    }
}

fn parse_sweep(c: &mut Collector, scenario: Option<Scenario>) -> Option<SweepConfig> {
    let any = c.entries.keys().any(|k| k.starts_with("sweep."));
    if !any {
        return None;
    }
    let parameter = c.raw("sweep.parameter");
    match (&parameter, scenario) {
        (None, _) => c.fail("sweep.parameter", "missing required key"),
        (Some(p), Some(s)) if !s.parameters().contains(&p.as_str()) => c.fail(
            "sweep.parameter",
            format!(
                "{p:?} is not a {} parameter ({})",
                s.name(),
                s.parameters().join(", ")
            ),
        ),
        _ => {}
    }
    let start = c.required_number("sweep.start");
    let stop = c.required_number("sweep.stop");
    let count = c.required_number("sweep.count").and_then(|v| {
        if v.fract() != 0.0 || v < 2.0 {
            c.fail("sweep.count", format!("must be an integer >= 2, got {v}"));
            None
        } else {
            Some(v as usize)
        }
    });
    let scale = match c.raw("sweep.scale").as_deref() {
        None | Some("linear") => Some(SweepScale::Linear),
        Some("log") => Some(SweepScale::Log),
        Some(other) => {
            c.fail(
                "sweep.scale",
                format!("expected linear or log, got {other:?}"),
            );
            None
        }
    };
    if let (Some(SweepScale::Log), Some(a), Some(b)) = (scale, start, stop) {
        if !(a * b > 0.0) {
            c.fail(
                "sweep.scale",
                "log sweeps need start and stop nonzero with the same sign",
            );
        }
    }
    Some(SweepConfig {
        parameter: parameter?,
        start: start?,
        stop: stop?,
        count: count?,
        scale: scale?,
    })
}

impl ScenarioConfig {
    /// Canonical document: every key present, fixed order, shortest
    /// round-trip float formatting.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        line("scenario", self.scenario.name().to_string());
        for name in self.scenario.parameters() {
            let v = self.params.get(name).expect("scenario parameter");
            line(&format!("params.{name}"), format!("{v:?}"));
        }
        if let Some(n) = self.grid.n {
            line("grid.n", n.to_string());
        }
        line(
            "grid.window_factor",
            format!("{:?}", self.grid.window_factor),
        );
        if let Some(s) = &self.sweep {
            line("sweep.parameter", s.parameter.clone());
            line("sweep.start", format!("{:?}", s.start));
            line("sweep.stop", format!("{:?}", s.stop));
            line("sweep.count", s.count.to_string());
            let scale = match s.scale {
                SweepScale::Linear => "linear",
                SweepScale::Log => "log",
            };
            line("sweep.scale", scale.to_string());
        }
        if let Some(p) = &self.output.path {
            line("output.path", p.display().to_string());
        }
        line("output.format", self.output.format.name().to_string());
        out
    }
}
