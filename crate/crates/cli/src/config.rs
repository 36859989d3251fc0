//! Run configuration files.
//!
//! ```text
//! # comment
//! [sweep]
//! epsilon = 0.06, 0.6, 6.0
//! dims = 1, 2, 3
//! seeds = 1, 2, 3, 4, 5
//! noise = sine, seeded-hash
//! ```
//!
//! Sections are `[laws]`, `[stabilize]`, `[sweep]` and `[banach]`. Lists are
//! comma separated. Duplicate keys, unknown keys and unknown sections are
//! errors.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use conestab::lab::{NoiseKind, NoiseSpec, ReportFormat};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: malformed line `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: key `{key}` outside any section")]
    OutsideSection { line: usize, key: String },
    #[error("line {line}: unknown section `[{name}]`")]
    UnknownSection { line: usize, name: String },
    #[error("duplicate `{key}` on lines {first} and {second}")]
    Duplicate {
        key: String,
        first: usize,
        second: usize,
    },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("[{section}] is missing required key `{key}`")]
    MissingKey { section: String, key: String },
    #[error("line {line}: `{key}` expects {expected}, got `{found}`")]
    TypeMismatch {
        line: usize,
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("line {line}: `{key}` must be positive, got {value}")]
    NotPositive {
        line: usize,
        key: String,
        value: String,
    },
    #[error("line {line}: `{key}`: {message}")]
    Invalid {
        line: usize,
        key: String,
        message: String,
    },
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
}

const SECTIONS: [&str; 4] = ["laws", "stabilize", "sweep", "banach"];

#[derive(Debug, Clone, Default, PartialEq)]
struct RawSection {
    line: usize,
    entries: BTreeMap<String, (String, usize)>,
}

/// A parsed `key = value` section with typed accessors; every key must be
/// consumed by [`Section::finish`].
#[derive(Debug)]
struct Section<'a> {
    name: &'a str,
    raw: &'a RawSection,
    used: Vec<&'static str>,
}

trait Positive {
    fn is_positive(&self) -> bool;
}

impl Positive for f64 {
    fn is_positive(&self) -> bool {
        *self > 0.0 && self.is_finite()
    }
}

impl Positive for usize {
    fn is_positive(&self) -> bool {
        *self > 0
    }
}

impl Positive for u32 {
    fn is_positive(&self) -> bool {
        *self > 0
    }
}

impl<'a> Section<'a> {
    fn new(name: &'a str, raw: &'a RawSection) -> Self {
        Section {
            name,
            raw,
            used: Vec::new(),
        }
    }

    fn raw(&mut self, key: &'static str) -> Option<(&'a str, usize)> {
        self.used.push(key);
        self.raw.entries.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn parse_one<T: FromStr>(
        key: &str,
        text: &str,
        line: usize,
        expected: &'static str,
    ) -> Result<T, ConfigError> {
        text.trim().parse().map_err(|_| ConfigError::TypeMismatch {
            line,
            key: key.into(),
            expected,
            found: text.trim().into(),
        })
    }

    fn get<T: FromStr>(
        &mut self,
        key: &'static str,
        expected: &'static str,
    ) -> Result<Option<T>, ConfigError> {
        self.raw(key)
            .map(|(v, line)| Self::parse_one(key, v, line, expected))
            .transpose()
    }

    fn positive<T: FromStr + Positive + ToString>(
        &mut self,
        key: &'static str,
        expected: &'static str,
    ) -> Result<Option<T>, ConfigError> {
        let line = self.raw.entries.get(key).map_or(0, |e| e.1);
        match self.get::<T>(key, expected)? {
            Some(v) if !v.is_positive() => Err(ConfigError::NotPositive {
                line,
                key: key.into(),
                value: v.to_string(),
            }),
            other => Ok(other),
        }
    }

    fn list<T: FromStr>(
        &mut self,
        key: &'static str,
        expected: &'static str,
    ) -> Result<Option<Vec<T>>, ConfigError> {
        let Some((v, line)) = self.raw(key) else {
            return Ok(None);
        };
        v.split(',')
            .map(|item| Self::parse_one(key, item, line, expected))
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }

    fn positive_list<T: FromStr + Positive + ToString>(
        &mut self,
        key: &'static str,
        expected: &'static str,
    ) -> Result<Option<Vec<T>>, ConfigError> {
        let line = self.raw.entries.get(key).map_or(0, |e| e.1);
        let list = self.list::<T>(key, expected)?;
        if let Some(bad) = list.iter().flatten().find(|v| !v.is_positive()) {
            return Err(ConfigError::NotPositive {
                line,
                key: key.into(),
                value: bad.to_string(),
            });
        }
        Ok(list)
    }

    fn required<T>(&self, key: &'static str, value: Option<T>) -> Result<T, ConfigError> {
        value.ok_or_else(|| ConfigError::MissingKey {
            section: self.name.into(),
            key: key.into(),
        })
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self
            .raw
            .entries
            .iter()
            .find(|(k, _)| !self.used.contains(&k.as_str()))
        {
            Some((key, (_, line))) => Err(ConfigError::UnknownKey {
                line: *line,
                section: self.name.into(),
                key: key.clone(),
            }),
            None => Ok(()),
        }
    }
}

/// Options shared by the stabilizing commands.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NumericOptions {
    pub tol: Option<f64>,
    pub max_iter: Option<u32>,
    pub seed: Option<u64>,
    pub dim: Option<usize>,
    pub radius: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawsConfig {
    pub cone: String,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizeConfig {
    pub expr: String,
    pub epsilon: f64,
    pub options: NumericOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanachConfig {
    pub expr: String,
    pub epsilon: f64,
    pub r: Option<f64>,
    pub options: NumericOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub epsilons: Vec<f64>,
    pub dims: Vec<usize>,
    pub seeds: Vec<u64>,
    pub noise: Option<Vec<NoiseSpec>>,
    pub tol: Option<f64>,
    pub max_iter: Option<u32>,
    pub points: Option<usize>,
    pub pairs: Option<usize>,
    pub radius: Option<f64>,
    pub out: Option<String>,
    pub format: Option<ReportFormat>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub laws: Option<LawsConfig>,
    pub stabilize: Option<StabilizeConfig>,
    pub sweep: Option<SweepSection>,
    pub banach: Option<BanachConfig>,
}

/// `kind` or `kind@fraction`, the fraction scaling the `ε/6` budget.
pub fn parse_noise_spec(text: &str) -> Result<NoiseSpec, String> {
    let text = text.trim();
    let (kind, fraction) = match text.split_once('@') {
        Some((k, f)) => (
            k,
            f.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad fraction in `{text}`"))?,
        ),
        None => (text, 1.0),
    };
    let kind: NoiseKind = kind
        .parse()
        .map_err(|e: conestab::lab::LabError| e.to_string())?;
    if !(fraction.is_finite() && fraction >= 0.0) {
        return Err(format!("fraction must be non-negative in `{text}`"));
    }
    Ok(NoiseSpec { kind, fraction })
}

fn numeric(s: &mut Section<'_>) -> Result<NumericOptions, ConfigError> {
    Ok(NumericOptions {
        tol: s.positive("tol", "a positive number")?,
        max_iter: s.get("max_iter", "a non-negative integer")?,
        seed: s.get("seed", "a non-negative integer")?,
        dim: s.positive("dim", "a positive integer")?,
        radius: s.positive("radius", "a positive number")?,
        points: s.positive("points", "a positive integer")?,
    })
}

fn split_sections(text: &str) -> Result<BTreeMap<String, RawSection>, ConfigError> {
    let mut sections: BTreeMap<String, RawSection> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name =
                rest.strip_suffix(']')
                    .map(str::trim)
                    .ok_or_else(|| ConfigError::Malformed {
                        line,
                        text: raw_line.trim().into(),
                    })?;
            if !SECTIONS.contains(&name) {
                return Err(ConfigError::UnknownSection {
                    line,
                    name: name.into(),
                });
            }
            if let Some(prev) = sections.get(name) {
                return Err(ConfigError::Duplicate {
                    key: format!("[{name}]"),
                    first: prev.line,
                    second: line,
                });
            }
            sections.insert(
                name.into(),
                RawSection {
                    line,
                    ..RawSection::default()
                },
            );
            current = Some(name.into());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::Malformed {
                line,
                text: raw_line.trim().into(),
            })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigError::Malformed {
                line,
                text: raw_line.trim().into(),
            });
        }
        let Some(name) = &current else {
            return Err(ConfigError::OutsideSection {
                line,
                key: key.into(),
            });
        };
        let section = sections.get_mut(name).expect("section registered");
        if let Some((_, first)) = section.entries.get(key) {
            return Err(ConfigError::Duplicate {
                key: key.into(),
                first: *first,
                second: line,
            });
        }
        section.entries.insert(key.into(), (value.into(), line));
    }
    Ok(sections)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let sections = split_sections(text)?;
    let mut cfg = RunConfig::default();

    if let Some(raw) = sections.get("laws") {
        let mut s = Section::new("laws", raw);
        let cone = s.get::<String>("cone", "a cone name")?;
        cfg.laws = Some(LawsConfig {
            cone: s.required("cone", cone)?,
            dim: s.positive("dim", "a positive integer")?,
            seed: s.get("seed", "a non-negative integer")?,
        });
        s.finish()?;
    }

    if let Some(raw) = sections.get("stabilize") {
        let mut s = Section::new("stabilize", raw);
        let expr = s.get::<String>("expr", "an expression")?;
        let epsilon = s.positive::<f64>("epsilon", "a positive number")?;
        cfg.stabilize = Some(StabilizeConfig {
            expr: s.required("expr", expr)?,
            epsilon: s.required("epsilon", epsilon)?,
            options: numeric(&mut s)?,
        });
        s.finish()?;
    }

    if let Some(raw) = sections.get("banach") {
        let mut s = Section::new("banach", raw);
        let expr = s.get::<String>("expr", "an expression")?;
        let epsilon = s.positive::<f64>("epsilon", "a positive number")?;
        let r_line = raw.entries.get("r").map_or(0, |e| e.1);
        let r = s.get::<f64>("r", "a number")?;
        if let Some(r) = r.filter(|r| !(*r > 1.0 && r.is_finite())) {
            return Err(ConfigError::Invalid {
                line: r_line,
                key: "r".into(),
                message: format!("must exceed 1, got {r}"),
            });
        }
        cfg.banach = Some(BanachConfig {
            expr: s.required("expr", expr)?,
            epsilon: s.required("epsilon", epsilon)?,
            r,
            options: numeric(&mut s)?,
        });
        s.finish()?;
    }

    if let Some(raw) = sections.get("sweep") {
        let mut s = Section::new("sweep", raw);
        let epsilons = s.positive_list::<f64>("epsilon", "a list of positive numbers")?;
        let dims = s.positive_list::<usize>("dims", "a list of positive integers")?;
        let seeds = s.list::<u64>("seeds", "a list of non-negative integers")?;
        let noise = match s.raw("noise") {
            None => None,
            Some((v, line)) => Some(
                v.split(',')
                    .map(parse_noise_spec)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|message| ConfigError::Invalid {
                        line,
                        key: "noise".into(),
                        message,
                    })?,
            ),
        };
        let format = match s.raw("format") {
            None => None,
            Some((v, line)) => {
                Some(
                    v.parse::<ReportFormat>()
                        .map_err(|_| ConfigError::TypeMismatch {
                            line,
                            key: "format".into(),
                            expected: "csv or jsonl",
                            found: v.into(),
                        })?,
                )
            }
        };
        cfg.sweep = Some(SweepSection {
            epsilons: s.required("epsilon", epsilons)?,
            dims: s.required("dims", dims)?,
            seeds: s.required("seeds", seeds)?,
            noise,
            tol: s.positive("tol", "a positive number")?,
            max_iter: s.get("max_iter", "a non-negative integer")?,
            points: s.positive("points", "a positive integer")?,
            pairs: s.positive("pairs", "a positive integer")?,
            radius: s.positive("radius", "a positive number")?,
            out: s.get("out", "a path")?,
            format,
        });
        s.finish()?;
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}
