//! `key = value` pipeline configuration.

use std::path::{Path, PathBuf};

use ssdenoise_neural::AdamConfig;

use crate::error::{Error, Result};
use crate::evaluation::Subject;
use crate::predictors::TrainConfig;
use crate::simulator::{NeckPolicy, ViewWidth};

pub const REFERENCE_LOOKBACKS: [usize; 3] = [5, 10, 15];

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub matches: u32,
    pub cycles_per_match: u32,
    pub view_width: ViewWidth,
    pub neck_policy: NeckPolicy,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub lookbacks: Vec<usize>,
    pub architectures: Vec<u8>,
    pub split: [f64; 3],
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub subject: Subject,
    pub min_count: u64,
    pub allow_custom: bool,
    /// Worker threads; never changes results.
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            matches: 50,
            cycles_per_match: 6000,
            view_width: ViewWidth::Normal,
            neck_policy: NeckPolicy::BallFocused,
            seed: 1,
            output_dir: PathBuf::from("out"),
            lookbacks: REFERENCE_LOOKBACKS.to_vec(),
            architectures: (1..=9).collect(),
            split: [0.8, 0.1, 0.1],
            epochs: 20,
            batch_size: 64,
            learning_rate: 1e-3,
            subject: Subject::default(),
            min_count: 30,
            allow_custom: false,
            jobs: 1,
        }
    }
}

pub const KEYS: [&str; 16] = [
    "matches",
    "cycles_per_match",
    "view_width",
    "neck_policy",
    "seed",
    "output_dir",
    "lookbacks",
    "architectures",
    "split",
    "epochs",
    "batch_size",
    "learning_rate",
    "subject",
    "min_count",
    "allow_custom",
    "jobs",
];

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| number(key, s))
        .collect()
}

fn neck_policy_name(p: NeckPolicy) -> &'static str {
    match p {
        NeckPolicy::RotatingScan => "rotating_scan",
        NeckPolicy::BallFocused => "ball_focused",
    }
}

fn subject_name(s: Subject) -> String {
    match s {
        Subject::Player(i) => (i + 1).to_string(),
        Subject::AllOpponents => "all".into(),
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl PipelineConfig {
    /// Applies one setting; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "matches" => self.matches = number(key, value)?,
            "cycles_per_match" => self.cycles_per_match = number(key, value)?,
            "view_width" => self.view_width = ViewWidth::from_degrees(number(key, value)?)?,
            "neck_policy" => {
                self.neck_policy = match value {
                    "rotating_scan" => NeckPolicy::RotatingScan,
                    "ball_focused" => NeckPolicy::BallFocused,
                    _ => {
                        return Err(Error::Config(format!(
                            "`neck_policy` must be rotating_scan or ball_focused, got `{value}`"
                        )))
                    }
                }
            }
            "seed" => self.seed = number(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "lookbacks" => self.lookbacks = list(key, value)?,
            "architectures" => self.architectures = list(key, value)?,
            "split" => {
                let v: Vec<f64> = list(key, value)?;
                self.split = v
                    .try_into()
                    .map_err(|_| Error::Config("`split` needs three fractions".into()))?;
            }
            "epochs" => self.epochs = number(key, value)?,
            "batch_size" => self.batch_size = number(key, value)?,
            "learning_rate" => self.learning_rate = number(key, value)?,
            "subject" => {
                self.subject = if value == "all" {
                    Subject::AllOpponents
                } else {
                    let n: usize = number(key, value)?;
                    if !(1..=11).contains(&n) {
                        return Err(Error::Config(format!("`subject` must be 1..11 or all, got {n}")));
                    }
                    Subject::Player(n - 1)
                }
            }
            "min_count" => self.min_count = number(key, value)?,
            "allow_custom" => self.allow_custom = number(key, value)?,
            "jobs" => self.jobs = number(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_str(text: &str, name: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(name, k + 1, "expected key = value"))?;
            cfg.set(key.trim(), value)
                .map_err(|e| Error::parse(name, k + 1, e.to_string()))?;
        }
        Ok(cfg)
    }

    /// File values (if any) with `overrides` applied on top, validated.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                Self::parse_str(&text, &p.display().to_string())?
            }
            None => Self::default(),
        };
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.matches == 0 || self.cycles_per_match == 0 {
            return Err(Error::Config("`matches` and `cycles_per_match` must be positive".into()));
        }
        if self.lookbacks.is_empty() || self.architectures.is_empty() {
            return Err(Error::Config("`lookbacks` and `architectures` must not be empty".into()));
        }
        for &w in &self.lookbacks {
            if w == 0 || (!self.allow_custom && !REFERENCE_LOOKBACKS.contains(&w)) {
                return Err(Error::Config(format!(
                    "lookback {w} is not one of 5, 10, 15 (set allow_custom to use others)"
                )));
            }
        }
        if let Some(a) = self.architectures.iter().find(|a| !(1..=9).contains(*a)) {
            return Err(Error::Config(format!("architecture {a} is not in 1..9")));
        }
        if self.split.iter().any(|f| !(0.0..=1.0).contains(f)) || (self.split.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!("split {:?} must be fractions summing to 1", self.split)));
        }
        if self.split[0] == 0.0 || self.split[2] == 0.0 {
            return Err(Error::Config("train and test fractions must be positive".into()));
        }
        if self.epochs == 0 || self.batch_size == 0 || !(self.learning_rate > 0.0) || self.jobs == 0 {
            return Err(Error::Config("epochs, batch_size, learning_rate and jobs must be positive".into()));
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            adam: AdamConfig {
                learning_rate: self.learning_rate,
                ..AdamConfig::default()
            },
            seed: self.seed,
            ..TrainConfig::default()
        }
    }

    /// All settings in key order; `jobs` is left out because it never
    /// affects results.
    pub fn canonical(&self) -> String {
        let mut lines = vec![
            format!("matches = {}", self.matches),
            format!("cycles_per_match = {}", self.cycles_per_match),
            format!("view_width = {}", self.view_width.degrees()),
            format!("neck_policy = {}", neck_policy_name(self.neck_policy)),
            format!("seed = {}", self.seed),
            format!("output_dir = {}", self.output_dir.display()),
            format!("lookbacks = {}", join(&self.lookbacks)),
            format!("architectures = {}", join(&self.architectures)),
            format!("split = {}", join(&self.split)),
            format!("epochs = {}", self.epochs),
            format!("batch_size = {}", self.batch_size),
            format!("learning_rate = {}", self.learning_rate),
            format!("subject = {}", subject_name(self.subject)),
            format!("min_count = {}", self.min_count),
            format!("allow_custom = {}", self.allow_custom),
        ];
        lines.push(String::new());
        lines.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        let c = PipelineConfig::parse_str("", "t").unwrap();
        assert_eq!(c, PipelineConfig::default());
        c.validate().unwrap();
    }

    #[test]
    fn canonical_round_trips() {
        let mut c = PipelineConfig::default();
        c.set("subject", "all").unwrap();
        c.set("lookbacks", "5,15").unwrap();
        c.set("neck_policy", "rotating_scan").unwrap();
        let back = PipelineConfig::parse_str(&c.canonical(), "t").unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn errors_name_the_key() {
        let e = PipelineConfig::parse_str("colour = red", "cfg").unwrap_err().to_string();
        assert!(e.contains("colour") && e.contains("line 1"), "{e}");
        let e = PipelineConfig::parse_str("matches = many", "cfg").unwrap_err().to_string();
        assert!(e.contains("matches"), "{e}");
        assert!(PipelineConfig::parse_str("view_width = 90", "cfg").is_err());
    }
}
