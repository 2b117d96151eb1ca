//! Browser bindings for three `codiv` operations. Each returns a JSON string;
//! the `*_json` functions hold the logic so they can be tested natively.

use codiv::codes::{
    build_code, griesmer_report, naive_generator, rm1_generator, scrs_dmin_formula, scrs_generator, scrs_tiling,
    simplex_generator,
};
use codiv::fusion::SubsetPlan;
use codiv::gf::FieldSpec;
use codiv::harness::{
    achievable_rate, fit_rows, run_ser_sweep, ChannelConfig, DecoderKind, ExperimentConfig, Family, RunOptions,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Browser runs stay small enough to finish without freezing the tab.
pub const MAX_TRIALS: u64 = 200_000;
pub const MAX_DRAWS: usize = 5_000;
pub const MAX_DEMO_COLUMNS: usize = 4096;

fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, String> {
    if step.is_nan() || step <= 0.0 || hi < lo || (hi - lo) / step > 40.0 {
        return Err("SNR grid needs step > 0, hi >= lo and at most 41 points".into());
    }
    let count = ((hi - lo) / step).round() as usize;
    Ok((0..=count).map(|i| lo + step * i as f64).collect())
}

fn text(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Generator, distance and bound report for a code family.
/// `n` is ignored by the simplex and Reed-Muller families, whose length is fixed.
pub fn code_json(family: &str, n: usize, k: usize, b: u32) -> Result<String, String> {
    let field = FieldSpec::new(b).map_err(text)?;
    let fam = Family::parse(family).map_err(text)?;
    let g = match fam {
        Family::Simplex => simplex_generator(k, &field),
        Family::Rm1 => rm1_generator(k, &field),
        Family::Scrs => scrs_generator(n, k, &field),
        Family::Naive => naive_generator(n, k, &field),
        other => return Err(format!("the demo builds simplex, rm1, scrs and naive codes, not {}", other.name())),
    }
    .map_err(text)?;
    if g.n() > MAX_DEMO_COLUMNS {
        return Err(format!("N = {} is more than the page can show", g.n()));
    }
    let d = build_code(&g).map_err(text)?.d_min();
    let rows: Vec<&[u8]> = (0..g.k()).map(|r| g.row(r)).collect();
    let mut out = json!({
        "family": fam.name(),
        "n": g.n(),
        "k": g.k(),
        "b": b,
        "generator": rows,
        "d_min": d,
        "bounds": griesmer_report(g.k(), b, d as u64, g.n() as u64),
        "subset_groups": SubsetPlan::from_generator(&g).groups(),
    });
    if fam == Family::Scrs {
        let (n_out, n_in) = scrs_tiling(g.n(), g.k(), b);
        out["scrs"] = json!({ "n_out": n_out, "n_in": n_in, "formula": scrs_dmin_formula(g.n(), g.k(), b) });
    }
    Ok(out.to_string())
}

/// Monte-Carlo SER sweep with a slope fit per decoder where one is estimable.
#[allow(clippy::too_many_arguments)]
pub fn ser_json(
    constellation: &str,
    b: u32,
    n: usize,
    family: &str,
    decoders: &str,
    snr_lo: f64,
    snr_hi: f64,
    snr_step: f64,
    trials: u64,
    seed: u64,
) -> Result<String, String> {
    if trials > MAX_TRIALS {
        return Err(format!("at most {MAX_TRIALS} trials per point in the browser"));
    }
    let mut cfg = ExperimentConfig::new(constellation, b, n, Family::parse(family).map_err(text)?);
    cfg.decoders = decoders
        .split(',')
        .map(str::trim)
        .filter(|d| !d.is_empty())
        .map(DecoderKind::parse)
        .collect::<codiv::Result<_>>()
        .map_err(text)?;
    cfg.snr_grid_db = grid(snr_lo, snr_hi, snr_step)?;
    cfg.trials_per_point = trials;
    cfg.master_seed = seed;
    let result = run_ser_sweep(&cfg, RunOptions::workers(1)).map_err(text)?;
    let fits: Vec<Value> = result
        .decoders()
        .iter()
        .map(|d| match fit_rows(&result.curve(d), None) {
            Ok(f) => json!({ "decoder": d, "fit": f }),
            Err(e) => json!({ "decoder": d, "error": e.to_string() }),
        })
        .collect();
    Ok(json!({ "metadata": result.metadata, "rows": result.rows, "fits": fits }).to_string())
}

/// Coded, naive and centralized rates for the three-node QPSK scheme.
/// `gains` is a comma-separated list of three magnitudes, or empty for Rayleigh fading.
pub fn rate_json(gains: &str, snr_lo: f64, snr_hi: f64, snr_step: f64, draws: usize, seed: u64) -> Result<String, String> {
    if draws == 0 || draws > MAX_DRAWS {
        return Err(format!("draws must be 1..={MAX_DRAWS} in the browser"));
    }
    let mut cfg = ExperimentConfig::new("qpsk", 1, 3, Family::Custom);
    cfg.code.matrix = Some(vec![vec![1, 0, 1], vec![0, 1, 1]]);
    cfg.snr_grid_db = grid(snr_lo, snr_hi, snr_step)?;
    cfg.rate.draws = draws;
    cfg.master_seed = seed;
    if !gains.trim().is_empty() {
        let g = gains
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("gain {v:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        cfg.channel = ChannelConfig {
            kind: codiv::channel::ChannelKind::FixedGain,
            gains: Some(g),
        };
    }
    let result = achievable_rate(&cfg, RunOptions::workers(1)).map_err(text)?;
    Ok(json!({ "metadata": result.metadata, "rows": result.rows }).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = buildCode)]
pub fn build_code_js(family: &str, n: usize, k: usize, b: u32) -> Result<String, JsError> {
    js(code_json(family, n, k, b))
}

#[wasm_bindgen(js_name = serSweep)]
#[allow(clippy::too_many_arguments)]
pub fn ser_sweep_js(
    constellation: &str,
    b: u32,
    n: usize,
    family: &str,
    decoders: &str,
    snr_lo: f64,
    snr_hi: f64,
    snr_step: f64,
    trials: u32,
    seed: u32,
) -> Result<String, JsError> {
    js(ser_json(constellation, b, n, family, decoders, snr_lo, snr_hi, snr_step, trials.into(), seed.into()))
}

#[wasm_bindgen(js_name = achievableRate)]
pub fn achievable_rate_js(
    gains: &str,
    snr_lo: f64,
    snr_hi: f64,
    snr_step: f64,
    draws: usize,
    seed: u32,
) -> Result<String, JsError> {
    js(rate_json(gains, snr_lo, snr_hi, snr_step, draws, seed.into()))
}
