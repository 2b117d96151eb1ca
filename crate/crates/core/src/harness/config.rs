use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{ChannelKind, ChannelModel, TransitionMethod};
use crate::codes::MAX_ENUMERATION_BITS;
use crate::error::{Error, Result};
use crate::gf::{FieldSpec, MAX_BITS};
use crate::sigmap::ConstellationKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Simplex,
    Rm1,
    Scrs,
    Custom,
    CodewordSet,
    Naive,
}

impl Family {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().replace('-', "_").as_str() {
            "simplex" => Self::Simplex,
            "rm1" | "reed_muller" => Self::Rm1,
            "scrs" => Self::Scrs,
            "custom" => Self::Custom,
            "codeword_set" => Self::CodewordSet,
            "naive" => Self::Naive,
            other => return Err(Error::config(format!("unknown code family {other:?}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Simplex => "simplex",
            Self::Rm1 => "rm1",
            Self::Scrs => "scrs",
            Self::Custom => "custom",
            Self::CodewordSet => "codeword_set",
            Self::Naive => "naive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    Ml,
    SubsetMl,
    Hamming,
    Mrc,
    UncodedMajority,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 5] = [
        Self::Ml,
        Self::SubsetMl,
        Self::Hamming,
        Self::Mrc,
        Self::UncodedMajority,
    ];

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == name.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::config(format!("unknown decoder {name:?}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ml => "ml",
            Self::SubsetMl => "subset_ml",
            Self::Hamming => "hamming",
            Self::Mrc => "mrc",
            Self::UncodedMajority => "uncoded_majority",
        }
    }

    /// Needs per-node channel gains and transition tables at the fusion center.
    pub fn needs_tables(self) -> bool {
        matches!(self, Self::Ml | Self::SubsetMl)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    pub family: Option<Family>,
    /// Explicit K x N generator rows for `custom`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<u8>>>,
    /// Codeword-set columns as integers (row 1 is the least significant bit).
    /// Defaults to the optimized QPSK, N = 10 matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<u32>>,
    /// Field polynomial; the default primitive polynomial when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(default = "default_channel_kind")]
    pub kind: ChannelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<Vec<f64>>,
}

fn default_channel_kind() -> ChannelKind {
    ChannelKind::IidRayleigh
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            kind: ChannelKind::IidRayleigh,
            gains: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    /// Channel draws for the outer expectation.
    #[serde(default = "default_rate_draws")]
    pub draws: usize,
    /// Noise samples per channel draw for the centralized-combining estimate.
    #[serde(default = "default_mrc_samples")]
    pub mrc_samples: usize,
}

fn default_rate_draws() -> usize {
    10_000
}

fn default_mrc_samples() -> usize {
    64
}

impl Default for RateConfig {
    fn default() -> Self {
        Self {
            draws: default_rate_draws(),
            mrc_samples: default_mrc_samples(),
        }
    }
}

/// Everything that determines an experiment's output. Worker count is not part
/// of it: results do not depend on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub constellation: String,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(rename = "B")]
    pub b: u32,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Optional; must equal log2(M)/B when given.
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default)]
    pub code: CodeConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default = "default_decoders")]
    pub decoders: Vec<DecoderKind>,
    pub snr_grid_db: Vec<f64>,
    pub trials_per_point: u64,
    #[serde(default)]
    pub master_seed: u64,
    /// Monte-Carlo samples per symbol for transition tables without a closed form.
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    /// Forced table method; closed form when available otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<TransitionMethod>,
    /// Debug switch: no receiver noise.
    #[serde(default)]
    pub noiseless: bool,
    /// `(re, im, label)` triples for `constellation = "custom"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_points: Option<Vec<(f64, f64, usize)>>,
    #[serde(default)]
    pub rate: RateConfig,
}

fn default_decoders() -> Vec<DecoderKind> {
    vec![DecoderKind::Ml]
}

fn default_mc_samples() -> usize {
    100_000
}

impl ExperimentConfig {
    /// Minimal configuration: built-in constellation, Rayleigh fading, ML decoding.
    pub fn new(constellation: &str, b: u32, n: usize, family: Family) -> Self {
        Self {
            constellation: constellation.to_string(),
            m: None,
            b,
            n: Some(n),
            k: None,
            code: CodeConfig {
                family: Some(family),
                ..CodeConfig::default()
            },
            channel: ChannelConfig::default(),
            decoders: default_decoders(),
            snr_grid_db: vec![0.0, 5.0, 10.0],
            trials_per_point: 10_000,
            master_seed: 1,
            mc_samples: default_mc_samples(),
            transition: None,
            noiseless: false,
            custom_points: None,
            rate: RateConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("config file: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(format!("config serialization: {e}")))
    }

    pub fn kind(&self) -> Result<ConstellationKind> {
        ConstellationKind::parse(&self.constellation).map_err(|e| Error::config(e.to_string()))
    }

    /// Constellation order: explicit `M`, the custom point count, or the built-in order.
    pub fn order(&self) -> Option<usize> {
        match self.kind().ok()? {
            ConstellationKind::Custom => self.custom_points.as_ref().map(Vec::len),
            kind => self.m.or(kind.order()),
        }
    }

    /// K = log2(M) / B when that is a positive integer.
    pub fn message_len(&self) -> Option<usize> {
        let m = self.order()?;
        if !m.is_power_of_two() || self.b == 0 {
            return None;
        }
        let bits = m.trailing_zeros();
        (bits % self.b == 0 && bits >= self.b).then(|| (bits / self.b) as usize)
    }

    pub fn family(&self) -> Family {
        self.code.family.unwrap_or(if self.code.matrix.is_some() {
            Family::Custom
        } else {
            Family::Scrs
        })
    }

    pub fn channel_model(&self, nodes: usize) -> ChannelModel {
        ChannelModel {
            kind: self.channel.kind,
            gains: self.channel.gains.clone(),
            nodes,
        }
    }

    /// Check every field, reporting all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs: Vec<String> = Vec::new();
        let kind = match self.kind() {
            Ok(k) => Some(k),
            Err(_) => {
                errs.push(format!("unknown constellation {:?}", self.constellation));
                None
            }
        };
        if let Some(kind) = kind {
            match kind {
                ConstellationKind::Custom => match &self.custom_points {
                    None => errs.push("custom constellation needs custom_points".into()),
                    Some(p) if self.m.is_some_and(|m| m != p.len()) => errs.push(format!(
                        "M = {} but {} custom points given",
                        self.m.unwrap_or(0),
                        p.len()
                    )),
                    Some(_) => {}
                },
                _ => {
                    if let Some(m) = self.m {
                        if kind.order() != Some(m) {
                            errs.push(format!("{} has M = {}, not {m}", kind.name(), kind.order().unwrap_or(0)));
                        }
                    }
                    if self.custom_points.is_some() {
                        errs.push("custom_points given for a built-in constellation".into());
                    }
                }
            }
        }
        if self.b == 0 || self.b > MAX_BITS {
            errs.push(format!("B must be in 1..={MAX_BITS}, got {}", self.b));
        }
        let k = self.message_len();
        match (self.order(), k) {
            (Some(m), None) if self.b > 0 => errs.push(format!(
                "log2(M)/B must be a positive integer (M = {m}, B = {})",
                self.b
            )),
            _ => {}
        }
        if let (Some(given), Some(k)) = (self.k, k) {
            if given != k {
                errs.push(format!("K = {given} but log2(M)/B = {k}"));
            }
        }
        if let Some(k) = k {
            if k as u32 * self.b > MAX_ENUMERATION_BITS {
                errs.push(format!("K*B = {} exceeds {MAX_ENUMERATION_BITS}", k as u32 * self.b));
            }
        }
        if let Some(poly) = self.code.polynomial {
            if let Err(e) = FieldSpec::with_polynomial(self.b, poly) {
                errs.push(e.to_string());
            }
        }
        if self.n == Some(0) {
            errs.push("N must be at least 1".into());
        }
        let family = self.family();
        match family {
            Family::Scrs | Family::Naive if self.n.is_none() => {
                errs.push(format!("family {} needs N", family.name()))
            }
            Family::Scrs => {
                if let (Some(n), Some(k)) = (self.n, k) {
                    if n < k {
                        errs.push(format!("SCRS needs N >= K (N = {n}, K = {k})"));
                    }
                }
            }
            Family::Rm1 if k.is_some_and(|k| k < 2) => errs.push("rm1 needs K >= 2".into()),
            Family::Custom => match &self.code.matrix {
                None => errs.push("custom family needs code.matrix".into()),
                Some(rows) => {
                    if let Some(k) = k {
                        if rows.len() != k {
                            errs.push(format!("code.matrix has {} rows, K = {k}", rows.len()));
                        }
                    }
                    let width = rows.first().map_or(0, Vec::len);
                    if width == 0 || rows.iter().any(|r| r.len() != width) {
                        errs.push("code.matrix rows must be non-empty and equal length".into());
                    } else if self.n.is_some_and(|n| n != width) {
                        errs.push(format!("N = {} but code.matrix has {width} columns", self.n.unwrap_or(0)));
                    }
                    let q = 1usize << self.b.min(MAX_BITS);
                    if rows.iter().flatten().any(|&v| v as usize >= q) {
                        errs.push(format!("code.matrix entries must be below q = {q}"));
                    }
                }
            },
            Family::CodewordSet => {
                if self.b != 1 {
                    errs.push("codeword_set family needs B = 1".into());
                }
                if self.code.columns.is_none() && self.order() != Some(4) {
                    errs.push("the default codeword set matrix is for QPSK".into());
                }
                let ncols = self.code.columns.as_ref().map_or(10, Vec::len);
                if self.n.is_some_and(|n| n != ncols) {
                    errs.push(format!("N = {} but the codeword set has {ncols} columns", self.n.unwrap_or(0)));
                }
                if self.code.columns.as_ref().is_some_and(Vec::is_empty) {
                    errs.push("code.columns is empty".into());
                }
            }
            _ => {}
        }
        if let (Some(n), Some(k), Family::Simplex | Family::Rm1) = (self.n, k, family) {
            let q = 1usize << self.b.min(MAX_BITS);
            let expected = match family {
                Family::Simplex => (q.pow(k as u32) - 1) / (q - 1),
                _ => q.pow(k as u32 - 1),
            };
            if n != expected {
                errs.push(format!("{} with K = {k}, B = {} has N = {expected}, not {n}", family.name(), self.b));
            }
        }
        if self.code.matrix.is_some() && family != Family::Custom {
            errs.push("code.matrix is only used by the custom family".into());
        }
        if self.decoders.is_empty() {
            errs.push("decoders must not be empty".into());
        }
        for (i, d) in self.decoders.iter().enumerate() {
            if self.decoders[..i].contains(d) {
                errs.push(format!("decoder {} listed twice", d.name()));
            }
        }
        if self.snr_grid_db.is_empty() {
            errs.push("snr_grid_db must not be empty".into());
        }
        if self.snr_grid_db.iter().any(|v| !v.is_finite()) {
            errs.push("snr_grid_db entries must be finite".into());
        }
        if self.trials_per_point == 0 {
            errs.push("trials_per_point must be positive".into());
        }
        if self.mc_samples == 0 {
            errs.push("mc_samples must be positive".into());
        }
        if self.rate.draws == 0 || self.rate.mrc_samples == 0 {
            errs.push("rate.draws and rate.mrc_samples must be positive".into());
        }
        if self.transition == Some(TransitionMethod::Analytic) && kind == Some(ConstellationKind::Custom) {
            errs.push("no closed-form transition model for custom constellations".into());
        }
        match (self.channel.kind, &self.channel.gains) {
            (ChannelKind::FixedGain, None) => errs.push("fixed_gain channel needs channel.gains".into()),
            (ChannelKind::FixedGain, Some(g)) => {
                let nodes = self.node_count();
                if nodes.is_some_and(|n| n != g.len()) {
                    errs.push(format!("{} gains for {} nodes", g.len(), nodes.unwrap_or(0)));
                }
                if g.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    errs.push("channel.gains must be finite and positive".into());
                }
            }
            (ChannelKind::IidRayleigh, Some(_)) => errs.push("channel.gains is only used by fixed_gain".into()),
            _ => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Node count implied by the configuration, if determinable.
    pub fn node_count(&self) -> Option<usize> {
        if let Some(n) = self.n {
            return Some(n);
        }
        let k = self.message_len()?;
        let q = 1usize.checked_shl(self.b)?;
        match self.family() {
            Family::Simplex => Some((q.pow(k as u32) - 1) / (q - 1)),
            Family::Rm1 => Some(q.pow(k as u32 - 1)),
            Family::Custom => self.code.matrix.as_ref().and_then(|r| r.first()).map(Vec::len),
            Family::CodewordSet => Some(self.code.columns.as_ref().map_or(10, Vec::len)),
            _ => None,
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let text = r#"
constellation = "qpsk"
B = 1
N = 10
decoders = ["ml", "hamming"]
snr_grid_db = [0.0, 5.0]
trials_per_point = 1000
master_seed = 7

[code]
family = "scrs"
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.message_len(), Some(2));
        assert_eq!(cfg.family(), Family::Scrs);
        let again = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(), again.hash());
    }

    #[test]
    fn lists_every_problem() {
        let mut cfg = ExperimentConfig::new("qpsk", 3, 0, Family::Scrs);
        cfg.trials_per_point = 0;
        cfg.snr_grid_db.clear();
        let Err(Error::Config(errs)) = cfg.validate() else {
            panic!("expected config error")
        };
        assert!(errs.len() >= 4, "{errs:?}");
    }

    #[test]
    fn simplex_length_is_checked() {
        let mut cfg = ExperimentConfig::new("qpsk", 1, 4, Family::Simplex);
        assert!(cfg.validate().is_err());
        cfg.n = Some(3);
        cfg.validate().unwrap();
        cfg.n = None;
        assert_eq!(cfg.node_count(), Some(3));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "constellation = \"qpsk\"\nB = 1\nN = 3\nsnr_grid_db = [0.0]\ntrials_per_point = 1\nbogus = 1\n";
        assert!(ExperimentConfig::from_toml(text).is_err());
    }
}
