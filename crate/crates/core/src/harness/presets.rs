//! Desk-scale presets reproducing the simulation studies.


use sha2::{Digest, Sha256};

use crate::channel::ChannelKind;
use crate::error::{Error, Result};

use super::config::{ChannelConfig, CodeConfig, DecoderKind, ExperimentConfig, Family};
use super::parallel::{RunOptions, Stopwatch};
use super::rate::{achievable_rate, RateResult};
use super::scheme::Scheme;
use super::sweep::{scheme_metadata, sweep_scheme, SweepResult};

pub const PRESETS: [&str; 7] = ["motivating", "fig2", "fig3", "fig4a", "fig4b", "fig5a", "fig5b"];

/// Knobs that scale a preset without changing what it measures.
#[derive(Clone, Copy, Debug, Default)]
pub struct PresetOverrides {
    pub trials: Option<u64>,
    pub draws: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub enum PresetOutput {
    Ser(SweepResult),
    Rate(RateResult),
}

impl PresetOutput {
    pub fn to_csv_string(&self) -> Result<String> {
        match self {
            Self::Ser(r) => r.to_csv_string(),
            Self::Rate(r) => r.to_csv_string(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        match self {
            Self::Ser(r) => r.to_json(),
            Self::Rate(r) => r.to_json(),
        }
    }
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as usize;
    (0..=count).map(|i| lo + step * i as f64).collect()
}

fn base(constellation: &str, b: u32, n: usize, family: Family) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(constellation, b, n, family);
    cfg.master_seed = 20_240_601;
    cfg
}

fn custom(rows: Vec<Vec<u8>>) -> CodeConfig {
    CodeConfig {
        family: Some(Family::Custom),
        matrix: Some(rows),
        ..CodeConfig::default()
    }
}

/// Labelled configurations making up a preset.
pub fn preset_configs(name: &str) -> Result<Vec<(String, ExperimentConfig)>> {
    use DecoderKind::*;
    let mut out = Vec::new();
    match name {
        "motivating" => {
            // node 1: Re, node 2: Im, node 3: Re again (naive) or Re xor Im (coded)
            for (label, rows) in [
                ("naive", vec![vec![1, 0, 1], vec![0, 1, 0]]),
                ("simplex", vec![vec![1, 0, 1], vec![0, 1, 1]]),
            ] {
                let mut cfg = base("qpsk", 1, 3, Family::Custom);
                cfg.code = custom(rows);
                cfg.snr_grid_db = grid(10.0, 25.0, 2.5);
                cfg.trials_per_point = 1_000_000;
                out.push((label.to_string(), cfg));
            }
        }
        "fig2" => {
            for (label, family, decoders) in [
                ("scrs", Family::Scrs, vec![Ml, Hamming, Mrc, UncodedMajority]),
                ("codeword_set", Family::CodewordSet, vec![Ml, Hamming]),
            ] {
                let mut cfg = base("qpsk", 1, 10, family);
                cfg.decoders = decoders;
                cfg.snr_grid_db = grid(0.0, 10.0, 1.0);
                cfg.trials_per_point = 200_000;
                out.push((label.to_string(), cfg));
            }
        }
        "fig3" => {
            for n in [14, 21, 30] {
                let mut cfg = base("8psk", 1, n, Family::Scrs);
                cfg.decoders = vec![Ml, SubsetMl];
                cfg.snr_grid_db = grid(0.0, 12.0, 2.0);
                cfg.trials_per_point = 20_000;
                out.push((format!("scrs_n{n}"), cfg));
            }
        }
        "fig4a" => {
            for n in [7, 10, 14, 21] {
                let mut cfg = base("8psk", 1, n, Family::Scrs);
                cfg.snr_grid_db = grid(0.0, 20.0, 2.0);
                cfg.trials_per_point = 50_000;
                out.push((format!("scrs_n{n}"), cfg));
            }
        }
        "fig4b" => {
            for n in [5, 10, 15, 20] {
                let mut cfg = base("16qam", 2, n, Family::Scrs);
                cfg.snr_grid_db = grid(0.0, 24.0, 3.0);
                cfg.trials_per_point = 20_000;
                out.push((format!("scrs_n{n}"), cfg));
            }
        }
        "fig5a" | "fig5b" => {
            let mut cfg = base("qpsk", 1, 3, Family::Custom);
            cfg.code = custom(vec![vec![1, 0, 1], vec![0, 1, 1]]);
            cfg.snr_grid_db = grid(0.0, 20.0, 2.0);
            if name == "fig5b" {
                cfg.channel = ChannelConfig {
                    kind: ChannelKind::FixedGain,
                    gains: Some(vec![1.5, 0.3, 1.5]),
                };
            }
            out.push(("rate".to_string(), cfg));
        }
        other => {
            return Err(Error::config(format!(
                "unknown preset {other:?}; choose one of {}",
                PRESETS.join(", ")
            )))
        }
    }
    Ok(out)
}

fn apply(cfg: &mut ExperimentConfig, o: &PresetOverrides) {
    if let Some(t) = o.trials {
        cfg.trials_per_point = t;
    }
    if let Some(d) = o.draws {
        cfg.rate.draws = d;
    }
    if let Some(s) = o.seed {
        cfg.master_seed = s;
    }
}

/// Run a preset. SER presets return one sweep with rows labelled `scheme:decoder`.
pub fn reproduce(name: &str, overrides: PresetOverrides, opts: RunOptions) -> Result<PresetOutput> {
    let start = Stopwatch::start();
    let mut configs = preset_configs(name)?;
    for (_, cfg) in configs.iter_mut() {
        apply(cfg, &overrides);
        cfg.validate()?;
    }
    if name.starts_with("fig5") {
        let mut r = achievable_rate(&configs[0].1, opts)?;
        r.metadata.insert(0, ("preset".into(), name.into()));
        return Ok(PresetOutput::Rate(r));
    }
    let mut hasher = Sha256::new();
    for (label, cfg) in &configs {
        hasher.update(label.as_bytes());
        hasher.update(cfg.hash().as_bytes());
    }
    let hash: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    let mut metadata = vec![
        ("preset".to_string(), name.to_string()),
        ("config_hash".to_string(), hash),
        ("seed".to_string(), configs[0].1.master_seed.to_string()),
        ("trials_per_point".to_string(), configs[0].1.trials_per_point.to_string()),
    ];
    let mut rows = Vec::new();
    for (label, cfg) in &configs {
        let scheme = Scheme::from_config(cfg)?;
        metadata.extend(scheme_metadata(cfg, &scheme, Some(label)));
        rows.extend(sweep_scheme(cfg, &scheme, Some(label), opts)?);
    }
    Ok(PresetOutput::Ser(SweepResult {
        metadata,
        rows,
        wall_time_s: start.seconds(),
    }))
}
