//! Average achievable rate of quantized and centralized receivers.
//!
//! For a quantized receiver the per-realization rate is the mutual information
//! between the uniformly drawn symbol and the forwarded output vector,
//! evaluated exactly over all `q^N` outputs; the average over channel draws is
//! Monte-Carlo. The centralized receiver sees the post-combining scalar
//! Gaussian channel with gain `||h||^2`, whose M-ary-input mutual information
//! is estimated by sampling the noise.


use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_channel, sample_cn, TransitionMethod, TransitionModel, TransitionTable};
use crate::codes::naive_generator;
use crate::error::{Error, Result};
use crate::sigmap::Constellation;

use super::config::{ExperimentConfig, Family};
use super::parallel::{point_seed, run_blocks, trial_rng, RunOptions, Stopwatch};
use super::scheme::Scheme;
use super::sweep::{db_to_linear, resolve_method, scheme_metadata};

/// Largest `N B` for which the output alphabet is enumerated.
pub const MAX_OUTPUT_BITS: u32 = 20;

/// Exact `I(s; u)` in bits for independent node outputs with the given tables.
pub fn quantized_mutual_information(tables: &[TransitionTable]) -> Result<f64> {
    let first = tables
        .first()
        .ok_or_else(|| Error::Contract("no transition tables".into()))?;
    let (m, q) = (first.symbols(), first.outputs());
    if tables.iter().any(|t| t.symbols() != m || t.outputs() != q) {
        return Err(Error::Contract("transition tables differ in shape".into()));
    }
    let bits = tables.len() as f64 * (q as f64).log2();
    if bits > MAX_OUTPUT_BITS as f64 {
        return Err(Error::EnumerationTooLarge(bits as u32));
    }
    // Depth-first over nodes, carrying Pr(u_1..u_i | s) for every s.
    fn walk(tables: &[TransitionTable], partial: &[f64], q: usize, acc: &mut f64) {
        let m = partial.len();
        match tables.split_first() {
            None => {
                let mean = partial.iter().sum::<f64>() / m as f64;
                if mean > 0.0 {
                    for &p in partial {
                        if p > 0.0 {
                            *acc += p * (p / mean).log2();
                        }
                    }
                }
            }
            Some((t, rest)) => {
                let mut next = vec![0.0; m];
                for u in 0..q {
                    for (s, slot) in next.iter_mut().enumerate() {
                        *slot = partial[s] * t.get(s, u);
                    }
                    if next.iter().any(|&p| p > 0.0) {
                        walk(rest, &next, q, acc);
                    }
                }
            }
        }
    }
    let mut acc = 0.0;
    walk(tables, &vec![1.0; m], q, &mut acc);
    Ok((acc / m as f64).max(0.0))
}

/// One noise-sample estimate of the M-ary-input mutual information of the
/// combined channel `sqrt(gain_sq) x + n`, averaged over every input symbol.
pub fn combined_mutual_information_sample<R: Rng + ?Sized>(
    gain_sq: f64,
    c: &Constellation,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let g = gain_sq.sqrt();
    let pts = c.points();
    let m = pts.len();
    let mut total = 0.0;
    for _ in 0..samples {
        let n: Complex64 = sample_cn(rng);
        for a in pts {
            let mut s = 0.0;
            for b in pts {
                let d = g * (a - b) + n;
                s += (n.norm_sqr() - d.norm_sqr()).exp();
            }
            total += s.log2();
        }
    }
    (m as f64).log2() - total / (samples * m) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub receiver: String,
    pub snr_db: f64,
    pub draws: u64,
    pub rate: f64,
    pub std_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<RateRow>,
    pub draws: u64,
    pub wall_time_s: f64,
}

impl RateResult {
    pub fn row(&self, receiver: &str, snr_db: f64) -> Option<&RateRow> {
        self.rows
            .iter()
            .find(|r| r.receiver == receiver && (r.snr_db - snr_db).abs() < 1e-9)
    }
}

fn tables_for<R: Rng + ?Sized>(
    scheme: &Scheme,
    c: &Constellation,
    h: &[Complex64],
    method: TransitionMethod,
    mc_samples: usize,
    rng: &mut R,
) -> Result<Vec<TransitionTable>> {
    Ok(TransitionModel::build(h, c, &scheme.maps, scheme.outputs(), method, mc_samples, rng)?.tables)
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Average achievable rate of the configured scheme (`coded`), the per-node
/// uncoded scheme (`naive`) and centralized combining (`centralized`).
pub fn achievable_rate(cfg: &ExperimentConfig, opts: RunOptions) -> Result<RateResult> {
    let start = Stopwatch::start();
    let coded = Scheme::from_config(cfg)?;
    let n = coded.n();
    let bits = n as u32 * coded.field.bits();
    if bits > MAX_OUTPUT_BITS {
        return Err(Error::Config(vec![format!(
            "N*B = {bits} is too large to enumerate all outputs (limit {MAX_OUTPUT_BITS}); reduce N or B"
        )]));
    }
    let k = cfg.message_len().expect("validated");
    let naive = Scheme::linear(
        Family::Naive,
        coded.constellation.clone(),
        &naive_generator(n, k, &coded.field)?,
    )?;
    let model = cfg.channel_model(n);
    let method = resolve_method(cfg, &coded);
    let draws = cfg.rate.draws;
    let mut rows = Vec::new();
    for (p, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let c = coded.constellation.with_energy(db_to_linear(snr_db))?;
        let seed = point_seed(cfg.master_seed, p as u64);
        const CHUNK: usize = 256;
        let chunks = run_blocks(draws.div_ceil(CHUNK), opts, |b| {
            let mut out = Vec::with_capacity(CHUNK);
            for d in b * CHUNK..((b + 1) * CHUNK).min(draws) {
                let mut rng = trial_rng(seed, d as u64);
                let h = sample_channel(&model, &mut rng)?;
                let ic = quantized_mutual_information(&tables_for(&coded, &c, &h, method, cfg.mc_samples, &mut rng)?)?;
                let inv = quantized_mutual_information(&tables_for(&naive, &c, &h, method, cfg.mc_samples, &mut rng)?)?;
                let gain_sq: f64 = h.iter().map(|v| v.norm_sqr()).sum();
                let icent = combined_mutual_information_sample(gain_sq, &c, cfg.rate.mrc_samples, &mut rng);
                out.push([ic, inv, icent]);
            }
            Ok(out)
        })?;
        let per_draw: Vec<[f64; 3]> = chunks.into_iter().flatten().collect();
        for (j, name) in ["coded", "naive", "centralized"].iter().enumerate() {
            let values: Vec<f64> = per_draw.iter().map(|v| v[j]).collect();
            let (rate, std_err) = mean_and_se(&values);
            rows.push(RateRow {
                receiver: name.to_string(),
                snr_db,
                draws: draws as u64,
                rate,
                std_err,
            });
        }
    }
    let mut metadata = vec![
        ("config_hash".to_string(), cfg.hash()),
        ("seed".to_string(), cfg.master_seed.to_string()),
        ("draws".to_string(), draws.to_string()),
        ("mrc_samples".to_string(), cfg.rate.mrc_samples.to_string()),
    ];
    metadata.extend(scheme_metadata(cfg, &coded, Some("coded")));
    metadata.push((
        "generator[naive]".into(),
        (0..k)
            .map(|r| {
                naive.generator().expect("linear").row(r).iter().map(|v| v.to_string()).collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("/"),
    ));
    Ok(RateResult {
        metadata,
        rows,
        draws: draws as u64,
        wall_time_s: start.seconds(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn table(rows: &[&[f64]]) -> TransitionTable {
        TransitionTable::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn binary_symmetric_channel() {
        // I = 1 - H(p) for one BSC node.
        let p: f64 = 0.11;
        let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        let t = table(&[&[1.0 - p, p], &[p, 1.0 - p]]);
        assert_abs_diff_eq!(quantized_mutual_information(&[t]).unwrap(), 1.0 - h, epsilon = 1e-12);
    }

    #[test]
    fn useless_and_perfect_nodes() {
        let flat = table(&[&[0.5, 0.5], &[0.5, 0.5], &[0.5, 0.5], &[0.5, 0.5]]);
        assert_abs_diff_eq!(
            quantized_mutual_information(&[flat.clone(), flat]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let re = table(&[&[1.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[0.0, 1.0]]);
        let im = table(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_abs_diff_eq!(quantized_mutual_information(std::slice::from_ref(&re)).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(quantized_mutual_information(&[re, im]).unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn combined_channel_limits() {
        let c = crate::sigmap::make_constellation(crate::sigmap::ConstellationKind::Qpsk, 4, 1.0).unwrap();
        let mut rng = trial_rng(3, 0);
        assert_abs_diff_eq!(combined_mutual_information_sample(0.0, &c, 10, &mut rng), 0.0, epsilon = 1e-12);
        let high = combined_mutual_information_sample(1e4, &c, 100, &mut rng);
        assert_abs_diff_eq!(high, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn refuses_large_output_alphabets() {
        let cfg = ExperimentConfig::new("qpsk", 1, 21, Family::Scrs);
        assert!(matches!(achievable_rate(&cfg, RunOptions::default()), Err(Error::Config(_))));
    }
}
