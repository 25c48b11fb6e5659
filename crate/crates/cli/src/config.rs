//! Run configuration: built-in defaults, overlaid by a `key=value` file,
//! overlaid by command-line flags. The resolved values are written back out
//! as a manifest in the same format, so a manifest is itself a config file.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use hdc_core::data::MiTarget;
use hdc_core::experiment::TABLE_DIMS;
use hdc_core::{
    EncoderVariant, ExperimentConfig, LabelScheme, SelectionPolicy, SourceKind, SplitMode,
};

/// Bad flags, config keys or values. Maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Every key accepted in a config file, in manifest order.
pub const KEYS: [&str; 22] = [
    "dataset",
    "out",
    "model",
    "scheme",
    "variant",
    "source",
    "dim",
    "seed",
    "alpha",
    "split",
    "fraction",
    "epochs",
    "selection",
    "k",
    "mi_target",
    "flip_rate",
    "schemes",
    "sources",
    "dims",
    "count",
    "bins",
    "jobs",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub out: PathBuf,
    /// Model file; `None` means `<out>/model.amshd`.
    pub model: Option<PathBuf>,
    pub exp: ExperimentConfig,
    pub flip_rate: f64,
    pub schemes: Vec<LabelScheme>,
    pub sources: Vec<SourceKind>,
    pub dims: Vec<usize>,
    pub count: usize,
    pub bins: usize,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            out: PathBuf::from("hdc-out"),
            model: None,
            exp: ExperimentConfig::default(),
            flip_rate: 0.0,
            schemes: vec![LabelScheme::Binary],
            sources: SourceKind::ALL.to_vec(),
            dims: TABLE_DIMS.to_vec(),
            count: 100,
            bins: 50,
            jobs: 1,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| usage(format!("{key}: cannot parse {value:?}: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn optional_path(value: &str) -> Option<PathBuf> {
    let v = value.trim();
    (!v.is_empty()).then(|| PathBuf::from(v))
}

fn mi_target_str(t: MiTarget) -> &'static str {
    match t {
        MiTarget::Binary => "binary",
        MiTarget::RawScore => "score",
    }
}

impl RunConfig {
    /// Sets one key. Unknown keys and unparsable values are usage errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let e = &mut self.exp;
        match key {
            "dataset" => self.dataset = optional_path(value),
            "out" => {
                self.out =
                    optional_path(value).ok_or_else(|| usage("out: empty output directory"))?
            }
            "model" => self.model = optional_path(value),
            "scheme" => e.scheme = parse(key, value)?,
            "variant" => e.variant = parse::<EncoderVariant>(key, value)?,
            "source" => e.source = parse(key, value)?,
            "dim" => e.dim = parse(key, value)?,
            "seed" => e.seed = parse(key, value)?,
            "alpha" => e.alpha = parse(key, value)?,
            "split" => e.split.mode = parse::<SplitMode>(key, value)?,
            "fraction" => e.split.train_fraction = parse(key, value)?,
            "epochs" => e.epochs = parse(key, value)?,
            "selection" => e.selection = parse::<SelectionPolicy>(key, value)?,
            "k" => e.mi_k = parse(key, value)?,
            "mi_target" => {
                e.mi_target = match value.trim().to_ascii_lowercase().as_str() {
                    "binary" | "label" => MiTarget::Binary,
                    "score" | "raw" => MiTarget::RawScore,
                    other => return Err(usage(format!("mi_target: unknown target {other:?}"))),
                }
            }
            "flip_rate" => self.flip_rate = parse(key, value)?,
            "schemes" => self.schemes = parse_list(key, value)?,
            "sources" => self.sources = parse_list(key, value)?,
            "dims" => self.dims = parse_list(key, value)?,
            "count" => self.count = parse(key, value)?,
            "bins" => self.bins = parse(key, value)?,
            "jobs" => self.jobs = parse(key, value)?,
            _ => return Err(usage(format!("unknown config key {key:?}"))),
        }
        // the seed drives the split too
        if key == "seed" {
            e.split.seed = e.seed;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> String {
        let e = &self.exp;
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        match key {
            "dataset" => path(&self.dataset),
            "out" => self.out.display().to_string(),
            "model" => path(&self.model),
            "scheme" => e.scheme.to_string(),
            "variant" => e.variant.to_string(),
            "source" => e.source.to_string(),
            "dim" => e.dim.to_string(),
            "seed" => e.seed.to_string(),
            "alpha" => e.alpha.to_string(),
            "split" => e.split.mode.to_string(),
            "fraction" => e.split.train_fraction.to_string(),
            "epochs" => e.epochs.to_string(),
            "selection" => e.selection.to_string(),
            "k" => e.mi_k.to_string(),
            "mi_target" => mi_target_str(e.mi_target).to_string(),
            "flip_rate" => self.flip_rate.to_string(),
            "schemes" => join(&self.schemes),
            "sources" => join(&self.sources),
            "dims" => join(&self.dims),
            "count" => self.count.to_string(),
            "bins" => self.bins.to_string(),
            "jobs" => self.jobs.to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// Defaults, then `file` (if any), then `flags` in order.
    pub fn resolve(file: Option<&Path>, flags: &[(&str, Option<String>)]) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            for (key, value) in parse_config(&text)? {
                cfg.set(&key, &value)
                    .with_context(|| format!("in config {}", path.display()))?;
            }
        }
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }

    pub fn dataset(&self) -> Result<&Path> {
        self.dataset
            .as_deref()
            .ok_or_else(|| usage("no dataset given (use --dataset or a `dataset=` config line)"))
    }

    pub fn model_path(&self) -> PathBuf {
        self.model
            .clone()
            .unwrap_or_else(|| self.out.join("model.amshd"))
    }

    /// The resolved configuration as a config file.
    pub fn manifest(&self, command: &str) -> String {
        let mut s = format!("# hdc {command}\n");
        for key in KEYS {
            writeln!(s, "{key}={}", self.get(key)).expect("string write");
        }
        s
    }
}

/// Parses `key=value` lines. Blank lines and `#` comments are skipped; keys
/// may use `-` or `_`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            usage(format!(
                "config line {}: expected key=value, got {line:?}",
                n + 1
            ))
        })?;
        out.push((key.trim().replace('-', "_"), value.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trips() {
        let mut cfg = RunConfig::default();
        cfg.set("dataset", "data/x.csv").unwrap();
        cfg.set("alpha", "0.3").unwrap();
        cfg.set("dims", "128,1000").unwrap();
        cfg.set("sources", "pseudo,hadamard").unwrap();
        cfg.set("selection", "top:4").unwrap();
        cfg.set("mi_target", "score").unwrap();
        cfg.set("seed", "7").unwrap();
        let mut back = RunConfig::default();
        for (k, v) in parse_config(&cfg.manifest("train")).unwrap() {
            back.set(&k, &v).unwrap();
        }
        assert_eq!(back, cfg);
        assert_eq!(back.exp.split.seed, 7);
    }

    #[test]
    fn every_key_is_settable() {
        let cfg = RunConfig::default();
        let mut other = RunConfig::default();
        for key in KEYS {
            other
                .set(key, &cfg.get(key))
                .unwrap_or_else(|e| panic!("{key}: {e}"));
        }
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# comment\ndim = 512\nseed=3\n\nmi-target=score\n").unwrap();
        let cfg = RunConfig::resolve(Some(&path), &[("dim", Some("256".into())), ("seed", None)])
            .unwrap();
        assert_eq!(cfg.exp.dim, 256);
        assert_eq!(cfg.exp.seed, 3);
        assert_eq!(cfg.exp.mi_target, MiTarget::RawScore);
    }

    #[test]
    fn bad_input_is_usage() {
        let mut cfg = RunConfig::default();
        for (k, v) in [
            ("colour", "red"),
            ("dim", "lots"),
            ("source", "dice"),
            ("scheme", "ternary"),
        ] {
            let err = cfg.set(k, v).unwrap_err();
            assert!(err.downcast_ref::<UsageError>().is_some(), "{k}");
        }
        assert!(parse_config("no equals here").is_err());
    }
}
