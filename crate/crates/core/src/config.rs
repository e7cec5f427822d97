//! Run configuration in `key = value` form.
//!
//! Lines may be pasted from a C-style parameter listing: leading `const`,
//! `double` or `int`, trailing `;` and `//` comments are ignored, and values
//! are arithmetic expressions over numbers, earlier keys, `pi`, `sqrt` and
//! `atan`. Derived quantities such as `delta_integral` or `e` are accepted
//! and evaluated but do not feed the run; every other unknown key is an
//! error.

use std::collections::HashMap;

use crate::amplitudes::{Process, ProcessSpec};
use crate::error::{Error, Result};
use crate::spectrum::{OuterGrid, QuadratureConfig};

/// Physical and quadrature parameters of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub process: Process,
    /// Incoming mass of the QED process (`m`).
    pub m: f64,
    pub alpha: f64,
    pub m_e: f64,
    pub m_mu: f64,
    pub alpha_w: f64,
    pub quadrature: QuadratureConfig,
}

impl RunConfig {
    /// The first lepton listing: muon window.
    pub fn muon_listing() -> Self {
        RunConfig {
            process: Process::QedLepton,
            m: 0.511,
            alpha: 1.0 / 137.036,
            m_e: 0.51099895,
            m_mu: 105.7,
            alpha_w: 1.0e-6,
            quadrature: QuadratureConfig {
                lambda_integral: 200.0,
                n_integral: 5,
                n_int_angle: 5,
                start: 0.0,
                end: 300.0,
                n_m_prime: 16,
                grid: OuterGrid::Box,
            },
        }
    }

    /// The second lepton listing: tau window.
    pub fn tau_listing() -> Self {
        let mut c = Self::muon_listing();
        c.quadrature = QuadratureConfig {
            lambda_integral: 3500.0,
            n_integral: 6,
            n_int_angle: 6,
            start: 200.0,
            end: 3500.0,
            n_m_prime: 16,
            grid: OuterGrid::Box,
        };
        c
    }

    /// The weak-process listing.
    pub fn z_listing() -> Self {
        let m_e = 0.51099895;
        RunConfig {
            process: Process::ZBoson,
            quadrature: QuadratureConfig {
                lambda_integral: 300.0e3 * m_e,
                n_integral: 10,
                n_int_angle: 10,
                start: 50.0e3 * m_e,
                end: 300.0e3 * m_e,
                n_m_prime: 20,
                grid: OuterGrid::Box,
            },
            ..Self::muon_listing()
        }
    }

    pub fn defaults_for(process: Process) -> Self {
        match process {
            Process::QedLepton => Self::muon_listing(),
            Process::ZBoson => Self::z_listing(),
        }
    }

    pub fn spec(&self) -> ProcessSpec {
        match self.process {
            Process::QedLepton => ProcessSpec::qed_lepton(self.m, self.alpha),
            Process::ZBoson => ProcessSpec::z_boson(self.m_e, self.m_mu, self.alpha_w),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        self.spec().validate()
    }

    /// `key = value` lines that reproduce this configuration.
    pub fn to_lines(&self) -> Vec<String> {
        let q = &self.quadrature;
        let mut v = vec![format!("process = {}", self.process.name())];
        match self.process {
            Process::QedLepton => {
                v.push(format!("m = {:?}", self.m));
                v.push(format!("alpha = {:?}", self.alpha));
            }
            Process::ZBoson => {
                v.push(format!("m_e = {:?}", self.m_e));
                v.push(format!("m_mu = {:?}", self.m_mu));
                v.push(format!("alpha_W = {:?}", self.alpha_w));
            }
        }
        v.push(format!("Lambda_integral = {:?}", q.lambda_integral));
        v.push(format!("N_integral = {}", q.n_integral));
        v.push(format!("N_int_angle = {}", q.n_int_angle));
        v.push(format!("Start = {:?}", q.start));
        v.push(format!("End = {:?}", q.end));
        v.push(format!("N_m_prime = {}", q.n_m_prime));
        v.push(format!("grid = {}", q.grid.name()));
        v
    }
}

pub fn parse_process(s: &str) -> Result<Process> {
    match s {
        "qed-lepton" => Ok(Process::QedLepton),
        "z-boson" => Ok(Process::ZBoson),
        _ => Err(Error::Config(format!(
            "unknown process '{s}' (expected qed-lepton or z-boson)"
        ))),
    }
}

/// Accepted for pasted listings; evaluated but not used.
const DERIVED: &[&str] = &[
    "pi",
    "e",
    "g_W",
    "Tiny",
    "delta_integral",
    "delta_int",
    "delta_m_prime",
    "delta_m",
];

/// Keys that only exist for the weak process; their presence selects it
/// when no process is named.
const WEAK_ONLY: &[&str] = &["m_e", "m_mu", "alpha_W", "N_m", "N_int", "Lambda_int"];

/// One `key = value` assignment with its source for error messages.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub key: String,
    pub value: String,
    pub origin: String,
}

/// Splits configuration text into assignments.
pub fn parse_text(text: &str, source: &str) -> Result<Vec<Assignment>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("");
        let line = line.split('#').next().unwrap_or("").trim().trim_end_matches(';').trim();
        if line.is_empty() {
            continue;
        }
        let origin = format!("{source}:{}", n + 1);
        out.push(parse_assignment(line, &origin)?);
    }
    Ok(out)
}

/// Parses a single `key = value`, as given to `--set`.
pub fn parse_assignment(line: &str, origin: &str) -> Result<Assignment> {
    let (lhs, rhs) = line
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("{origin}: expected 'key = value', got '{line}'")))?;
    let mut words: Vec<&str> = lhs.split_whitespace().collect();
    while words.len() > 1 && matches!(words[0], "const" | "double" | "int" | "float") {
        words.remove(0);
    }
    if words.len() != 1 {
        return Err(Error::Config(format!("{origin}: malformed key '{}'", lhs.trim())));
    }
    Ok(Assignment {
        key: words[0].to_string(),
        value: rhs.trim().to_string(),
        origin: origin.to_string(),
    })
}

/// Builds a run configuration from assignments applied in order. The
/// process comes from `process_override`, else a `process` key, else the
/// presence of weak-only keys.
pub fn build(assignments: &[Assignment], process_override: Option<Process>) -> Result<RunConfig> {
    let named = assignments
        .iter()
        .rev()
        .find(|a| a.key == "process")
        .map(|a| parse_process(a.value.trim()));
    let process = match (process_override, named) {
        (Some(p), _) => p,
        (None, Some(p)) => p?,
        (None, None) if assignments.iter().any(|a| WEAK_ONLY.contains(&a.key.as_str())) => Process::ZBoson,
        (None, None) => Process::QedLepton,
    };
    let mut cfg = RunConfig::defaults_for(process);
    let mut env: HashMap<String, f64> = HashMap::new();
    env.insert("pi".into(), std::f64::consts::PI);
    for (k, v) in numeric_fields(&cfg) {
        env.insert(k.to_string(), v);
    }
    for a in assignments {
        let key = a.key.as_str();
        let err = |msg: String| Error::Config(format!("{}: {msg}", a.origin));
        match key {
            "process" => continue,
            "grid" => {
                cfg.quadrature.grid = OuterGrid::parse(a.value.trim())
                    .ok_or_else(|| err(format!("unknown grid '{}' (expected box or sphere)", a.value)))?;
                continue;
            }
            _ => {}
        }
        let value = eval(&a.value, &env).map_err(|m| err(format!("{key}: {m}")))?;
        let count = || -> Result<usize> {
            if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(err(format!("{key} must be a positive integer, got {value}")))
            }
        };
        let q = &mut cfg.quadrature;
        match key {
            "Lambda_integral" | "Lambda_int" => q.lambda_integral = value,
            "N_integral" | "N_int" => q.n_integral = count()?,
            "N_int_angle" => q.n_int_angle = count()?,
            "N_m_prime" | "N_m" => q.n_m_prime = count()?,
            "Start" => q.start = value,
            "End" => q.end = value,
            "alpha" => cfg.alpha = value,
            "m" => cfg.m = value,
            "m_e" => cfg.m_e = value,
            "m_mu" => cfg.m_mu = value,
            "alpha_W" => cfg.alpha_w = value,
            k if DERIVED.contains(&k) => {}
            _ => return Err(err(format!("unknown key '{key}'"))),
        }
        env.insert(key.to_string(), value);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn numeric_fields(c: &RunConfig) -> [(&'static str, f64); 11] {
    let q = &c.quadrature;
    [
        ("Lambda_integral", q.lambda_integral),
        ("N_integral", q.n_integral as f64),
        ("N_int_angle", q.n_int_angle as f64),
        ("N_m_prime", q.n_m_prime as f64),
        ("Start", q.start),
        ("End", q.end),
        ("alpha", c.alpha),
        ("m", c.m),
        ("m_e", c.m_e),
        ("m_mu", c.m_mu),
        ("alpha_W", c.alpha_w),
    ]
}

/// Evaluates an arithmetic expression with `+ - * /`, parentheses, unary
/// signs, `sqrt`, `atan` and named values from `env`.
pub fn eval(expr: &str, env: &HashMap<String, f64>) -> std::result::Result<f64, String> {
    let mut p = ExprParser {
        s: expr.as_bytes(),
        i: 0,
        env,
    };
    let v = p.sum()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(format!("unexpected '{}' in '{expr}'", &expr[p.i..]));
    }
    if !v.is_finite() {
        return Err(format!("'{expr}' is not finite"));
    }
    Ok(v)
}

struct ExprParser<'a> {
    s: &'a [u8],
    i: usize,
    env: &'a HashMap<String, f64>,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn sum(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.product()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let r = self.product()?;
            v = if c == b'+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn product(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.i += 1;
            let r = self.unary()?;
            v = if c == b'*' { v * r } else { v / r };
        }
        Ok(v)
    }

    fn unary(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err("missing ')'".into());
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
                if self.peek() == Some(b'(') {
                    let arg = self.atom()?;
                    return match name {
                        "sqrt" => Ok(arg.sqrt()),
                        "atan" => Ok(arg.atan()),
                        _ => Err(format!("unknown function '{name}'")),
                    };
                }
                self.env
                    .get(name)
                    .copied()
                    .ok_or_else(|| format!("unknown name '{name}'"))
            }
            Some(c) => Err(format!("unexpected '{}'", c as char)),
            None => Err("missing value".into()),
        }
    }

    fn number(&mut self) -> std::result::Result<f64, String> {
        let start = self.i;
        let s = self.s;
        let digits = |i: &mut usize| {
            while *i < s.len() && s[*i].is_ascii_digit() {
                *i += 1;
            }
        };
        digits(&mut self.i);
        if self.i < s.len() && s[self.i] == b'.' {
            self.i += 1;
            digits(&mut self.i);
        }
        if self.i < s.len() && (s[self.i] == b'e' || s[self.i] == b'E') {
            let mut j = self.i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                self.i = j;
                digits(&mut self.i);
            }
        }
        let text = std::str::from_utf8(&s[start..self.i]).expect("ascii");
        text.parse().map_err(|_| format!("bad number '{text}'"))
    }
}
