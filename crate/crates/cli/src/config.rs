//! Experiment configuration and its key=value file format. Every run is
//! reproducible from (config, seed) alone, so the config must round-trip
//! through the file format losslessly.

use std::fmt;
use std::str::FromStr;

use tqc_core::lattice::{BoundaryMode, LatticeDims};
use tqc_core::noise::{NoiseChannel, NoiseError};
use tqc_core::pipeline::DecodeWindowConfig;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    /// Line without '=' or with an unknown key.
    BadLine { line_no: usize, content: String },
    BadValue { key: &'static str, value: String },
    /// trials ≥ 1, dims ≥ 1, commit_lag < window_sheets, p a probability.
    InvalidField(&'static str),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::BadLine { line_no, content } => {
                write!(f, "config line {line_no}: expected key=value, got {content:?}")
            }
            ConfigError::BadValue { key, value } => {
                write!(f, "config key {key}: cannot parse {value:?}")
            }
            ConfigError::InvalidField(what) => write!(f, "invalid config: {what}"),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// p_x = p_z = p, p_xz = p².
    Symmetric,
    /// Z with probability p only.
    PureZ,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelKind::Symmetric => write!(f, "symmetric"),
            ChannelKind::PureZ => write!(f, "pure-z"),
        }
    }
}

impl FromStr for ChannelKind {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "symmetric" => Ok(ChannelKind::Symmetric),
            "pure-z" => Ok(ChannelKind::PureZ),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeMode {
    Batch,
    Stream,
}

impl fmt::Display for DecodeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeMode::Batch => write!(f, "batch"),
            DecodeMode::Stream => write!(f, "stream"),
        }
    }
}

impl FromStr for DecodeMode {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "batch" => Ok(DecodeMode::Batch),
            "stream" => Ok(DecodeMode::Stream),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub lx: u32,
    pub ly: u32,
    pub lt: u32,
    pub boundary: BoundaryMode,
    pub p: f64,
    pub channel: ChannelKind,
    pub seed: u64,
    pub trials: u64,
    pub mode: DecodeMode,
    pub window: DecodeWindowConfig,
    pub sparsify: bool,
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            lx: 4,
            ly: 4,
            lt: 4,
            boundary: BoundaryMode::Periodic,
            p: 0.005,
            channel: ChannelKind::Symmetric,
            seed: 1,
            trials: 1000,
            mode: DecodeMode::Batch,
            window: DecodeWindowConfig::default(),
            sparsify: false,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn dims(&self) -> Result<LatticeDims, ConfigError> {
        LatticeDims::new(self.lx, self.ly, self.lt, self.boundary)
            .map_err(|_| ConfigError::InvalidField("lattice dimensions must be positive"))
    }

    pub fn noise(&self) -> Result<NoiseChannel, ConfigError> {
        let ch: Result<NoiseChannel, NoiseError> = match self.channel {
            ChannelKind::Symmetric => NoiseChannel::symmetric(self.p),
            ChannelKind::PureZ => NoiseChannel::pure_z(self.p),
        };
        ch.map_err(|_| ConfigError::InvalidField("p must yield a valid channel"))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.dims()?;
        self.noise()?;
        if self.trials == 0 {
            return Err(ConfigError::InvalidField("trials must be at least 1"));
        }
        if self.window.window_sheets == 0 || self.window.commit_lag >= self.window.window_sheets {
            return Err(ConfigError::InvalidField("commit lag must be below the window size"));
        }
        Ok(())
    }

    /// Serialize as key=value lines, one key per line, stable order.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        use std::fmt::Write as _;
        let _ = writeln!(s, "lx={}", self.lx);
        let _ = writeln!(s, "ly={}", self.ly);
        let _ = writeln!(s, "lt={}", self.lt);
        let _ = writeln!(
            s,
            "boundary={}",
            match self.boundary {
                BoundaryMode::Periodic => "periodic",
                BoundaryMode::Open => "open",
            }
        );
        let _ = writeln!(s, "p={}", self.p);
        let _ = writeln!(s, "channel={}", self.channel);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "trials={}", self.trials);
        let _ = writeln!(s, "mode={}", self.mode);
        let _ = writeln!(s, "window={}", self.window.window_sheets);
        let _ = writeln!(s, "lag={}", self.window.commit_lag);
        let _ = writeln!(s, "sparsify={}", self.sparsify);
        if let Some(out) = &self.out {
            let _ = writeln!(s, "out={out}");
        }
        s
    }

    /// Parse key=value text over the defaults. Blank lines and '#' comments
    /// are ignored; later keys override earlier ones.
    pub fn from_kv(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_kv(text)?;
        Ok(cfg)
    }

    pub fn apply_kv(&mut self, text: &str) -> Result<(), ConfigError> {
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::BadLine { line_no: line_no + 1, content: raw.into() });
            };
            self.set(key.trim(), value.trim()).map_err(|mut e| {
                if let ConfigError::BadLine { line_no: n, .. } = &mut e {
                    *n = line_no + 1;
                }
                e
            })?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: FromStr>(key: &'static str, v: &str) -> Result<T, ConfigError> {
            v.parse().map_err(|_| ConfigError::BadValue { key, value: v.into() })
        }
        match key {
            "lx" => self.lx = num("lx", value)?,
            "ly" => self.ly = num("ly", value)?,
            "lt" => self.lt = num("lt", value)?,
            "boundary" => {
                self.boundary = match value {
                    "periodic" => BoundaryMode::Periodic,
                    "open" => BoundaryMode::Open,
                    _ => return Err(ConfigError::BadValue { key: "boundary", value: value.into() }),
                }
            }
            "p" => self.p = num("p", value)?,
            "channel" => {
                self.channel = value
                    .parse()
                    .map_err(|_| ConfigError::BadValue { key: "channel", value: value.into() })?
            }
            "seed" => self.seed = num("seed", value)?,
            "trials" => self.trials = num("trials", value)?,
            "mode" => {
                self.mode = value
                    .parse()
                    .map_err(|_| ConfigError::BadValue { key: "mode", value: value.into() })?
            }
            "window" => self.window.window_sheets = num("window", value)?,
            "lag" => self.window.commit_lag = num("lag", value)?,
            "sparsify" => self.sparsify = num("sparsify", value)?,
            "out" => self.out = Some(value.into()),
            _ => return Err(ConfigError::BadLine { line_no: 0, content: key.into() }),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip_is_lossless() {
        let mut cfg = ExperimentConfig::default();
        cfg.lx = 7;
        cfg.p = 0.0125;
        cfg.channel = ChannelKind::PureZ;
        cfg.boundary = BoundaryMode::Open;
        cfg.mode = DecodeMode::Stream;
        cfg.window = DecodeWindowConfig { window_sheets: 24, commit_lag: 6 };
        cfg.out = Some("results.csv".into());
        let text = cfg.to_kv();
        assert_eq!(ExperimentConfig::from_kv(&text).unwrap(), cfg);
    }

    #[test]
    fn comments_and_blanks_ignored_flags_override() {
        let text = "# comment\n\nlx=5\ntrials=10\nlx=6\n";
        let cfg = ExperimentConfig::from_kv(text).unwrap();
        assert_eq!(cfg.lx, 6);
        assert_eq!(cfg.trials, 10);
    }

    #[test]
    fn bad_lines_are_rejected_with_position() {
        let err = ExperimentConfig::from_kv("lx=4\nnonsense\n").unwrap_err();
        assert_eq!(err, ConfigError::BadLine { line_no: 2, content: "nonsense".into() });
        assert!(ExperimentConfig::from_kv("zz=1\n").is_err());
        assert!(ExperimentConfig::from_kv("trials=minus\n").is_err());
    }

    #[test]
    fn validation_catches_invariants() {
        let mut cfg = ExperimentConfig::default();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.window = DecodeWindowConfig { window_sheets: 4, commit_lag: 4 };
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        cfg.p = 0.9; // symmetric channel needs 2p + p² ≤ 1
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::default().validate().is_ok());
    }
}
