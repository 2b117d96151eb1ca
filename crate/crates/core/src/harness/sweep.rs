
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{
    analytic_confusion, has_analytic, monte_carlo_confusion, sample_cn, ChannelKind, ChannelModel,
    TransitionMethod, TransitionModel, PROB_FLOOR,
};
use crate::error::{Error, Result};
use crate::fusion::{hamming_decode_raw, ml_decode_logs, mrc_combine, uncoded_majority};
use crate::sigmap::Constellation;

use super::config::{DecoderKind, ExperimentConfig};
use super::parallel::{block_count, block_range, point_seed, run_blocks, trial_rng, RunOptions, Stopwatch};
use super::scheme::Scheme;

/// `10^(snr_db / 10)`.
pub fn db_to_linear(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Wilson score interval at 95%.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (centre - half).clamp(0.0, p) };
    let hi = if errors == trials { 1.0 } else { (centre + half).clamp(p, 1.0) };
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub decoder: String,
    pub snr_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub ser: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl SweepRow {
    pub fn new(decoder: impl Into<String>, snr_db: f64, trials: u64, errors: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(errors, trials);
        Self {
            decoder: decoder.into(),
            snr_db,
            trials,
            errors,
            ser: if trials == 0 { 0.0 } else { errors as f64 / trials as f64 },
            ci_lo,
            ci_hi,
        }
    }

    /// Binomial standard deviation of the SER estimate.
    pub fn sigma(&self) -> f64 {
        (self.ser * (1.0 - self.ser) / self.trials as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Ordered `key = value` pairs echoed into the CSV header.
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<SweepRow>,
    /// Not written to CSV so that CSV output is reproducible.
    pub wall_time_s: f64,
}

impl SweepResult {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn decoders(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.decoder.as_str()) {
                out.push(&r.decoder);
            }
        }
        out
    }

    pub fn curve(&self, decoder: &str) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.decoder == decoder).collect()
    }

    pub fn row(&self, decoder: &str, snr_db: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.decoder == decoder && (r.snr_db - snr_db).abs() < 1e-9)
    }
}

/// Where channel gains come from in a simulation.
#[derive(Clone, Debug)]
pub enum ChannelSource {
    Model(ChannelModel),
    /// The same realization on every trial.
    Fixed(Vec<Complex64>),
}

/// Per-point simulation state shared by every trial of that point.
struct Engine<'a> {
    scheme: &'a Scheme,
    constellation: Constellation,
    source: &'a ChannelSource,
    decoders: &'a [DecoderKind],
    method: TransitionMethod,
    mc_samples: usize,
    noiseless: bool,
    need_ll: bool,
}

struct Scratch {
    h: Vec<Complex64>,
    y: Vec<Complex64>,
    det: Vec<usize>,
    u: Vec<u8>,
    ll: Vec<Vec<f64>>,
    nodes: Vec<usize>,
}

impl<'a> Engine<'a> {
    fn new(
        scheme: &'a Scheme,
        rho: f64,
        source: &'a ChannelSource,
        decoders: &'a [DecoderKind],
        method: TransitionMethod,
        mc_samples: usize,
        noiseless: bool,
    ) -> Result<Self> {
        Ok(Self {
            constellation: scheme.constellation.with_energy(rho)?,
            scheme,
            source,
            decoders,
            method,
            mc_samples,
            noiseless,
            need_ll: decoders.iter().any(|d| d.needs_tables()),
        })
    }

    fn scratch(&self) -> Scratch {
        let n = self.scheme.n();
        Scratch {
            h: vec![Complex64::new(0.0, 0.0); n],
            y: vec![Complex64::new(0.0, 0.0); n],
            det: vec![0; n],
            u: vec![0; n],
            ll: vec![vec![0.0; self.scheme.symbols() * self.scheme.outputs()]; n],
            nodes: (0..n).collect(),
        }
    }

    fn trial<R: Rng>(&self, rng: &mut R, s: &mut Scratch, errors: &mut [u64]) -> Result<()> {
        let n = self.scheme.n();
        let m_count = self.scheme.symbols();
        match self.source {
            ChannelSource::Model(model) => match model.kind {
                ChannelKind::IidRayleigh => s.h.iter_mut().for_each(|h| *h = sample_cn(rng)),
                ChannelKind::FixedGain => {
                    let gains = model.gains.as_deref().unwrap_or_default();
                    for (h, &g) in s.h.iter_mut().zip(gains) {
                        *h = Complex64::from_polar(g, rng.random::<f64>() * std::f64::consts::TAU);
                    }
                }
            },
            ChannelSource::Fixed(h) => s.h.copy_from_slice(h),
        }
        let sym = rng.random_range(0..m_count);
        let x = self.constellation.point(sym);
        for i in 0..n {
            let clean = s.h[i] * x;
            s.y[i] = if self.noiseless { clean } else { clean + sample_cn(rng) };
            s.det[i] = self.constellation.detect(s.y[i], s.h[i]);
            s.u[i] = self.scheme.maps[i][s.det[i]];
        }
        if self.need_ll {
            let q = self.scheme.outputs();
            for i in 0..n {
                if s.h[i].norm_sqr() == 0.0 {
                    return Err(Error::DegenerateChannel(format!("h = 0 at node {i}")));
                }
                // Without noise every node detects correctly, and the tables say so.
                let conf = match self.method {
                    _ if self.noiseless => identity_confusion(m_count),
                    TransitionMethod::Analytic => analytic_confusion(s.h[i], &self.constellation)?,
                    TransitionMethod::MonteCarlo => {
                        monte_carlo_confusion(s.h[i], &self.constellation, self.mc_samples, rng)?
                    }
                };
                // Only the column of the observed output matters to the decoder.
                let ui = s.u[i] as usize;
                let map = &self.scheme.maps[i];
                let table = &mut s.ll[i];
                for m in 0..m_count {
                    let p: f64 = (0..m_count)
                        .filter(|&mh| map[mh] as usize == ui)
                        .map(|mh| conf[m * m_count + mh])
                        .sum();
                    table[m * q + ui] = p.max(PROB_FLOOR).ln();
                }
            }
        }
        for (slot, d) in self.decoders.iter().enumerate() {
            let decision = match d {
                DecoderKind::Ml => {
                    ml_decode_logs(&s.u, &s.ll, &s.nodes, m_count, self.scheme.outputs())
                }
                DecoderKind::SubsetMl => {
                    let chosen = self.scheme.plan.select(&s.h);
                    ml_decode_logs(&s.u, &s.ll, &chosen, m_count, self.scheme.outputs())
                }
                DecoderKind::Hamming => hamming_decode_raw(&s.u, &self.scheme.code),
                DecoderKind::Mrc => {
                    let energy: f64 = s.h.iter().map(|v| v.norm_sqr()).sum();
                    if energy == 0.0 {
                        return Err(Error::DegenerateChannel("all channel gains are zero".into()));
                    }
                    self.constellation.nearest(mrc_combine(&s.y, &s.h, energy))
                }
                DecoderKind::UncodedMajority => uncoded_majority(&s.det, m_count),
            };
            errors[slot] += u64::from(decision != sym);
        }
        Ok(())
    }
}

fn identity_confusion(m: usize) -> Vec<f64> {
    (0..m * m).map(|k| if k % (m + 1) == 0 { 1.0 } else { 0.0 }).collect()
}

/// Transition method for a scheme: the configured one, else closed form when available.
pub fn resolve_method(cfg: &ExperimentConfig, scheme: &Scheme) -> TransitionMethod {
    cfg.transition.unwrap_or(if has_analytic(&scheme.constellation) {
        TransitionMethod::Analytic
    } else {
        TransitionMethod::MonteCarlo
    })
}

/// Error counts per decoder for one SNR point.
#[allow(clippy::too_many_arguments)]
pub fn count_errors(
    scheme: &Scheme,
    source: &ChannelSource,
    decoders: &[DecoderKind],
    rho: f64,
    trials: u64,
    seed: u64,
    method: TransitionMethod,
    mc_samples: usize,
    noiseless: bool,
    opts: RunOptions,
) -> Result<Vec<u64>> {
    if let ChannelSource::Fixed(h) = source {
        if h.len() != scheme.n() {
            return Err(Error::LengthMismatch {
                expected: scheme.n(),
                found: h.len(),
            });
        }
    }
    if let ChannelSource::Model(m) = source {
        m.validate()?;
    }
    let engine = Engine::new(scheme, rho, source, decoders, method, mc_samples, noiseless)?;
    let blocks = run_blocks(block_count(trials), opts, |b| {
        let mut scratch = engine.scratch();
        let mut errors = vec![0u64; decoders.len()];
        for t in block_range(b, trials) {
            let mut rng = trial_rng(seed, t);
            engine.trial(&mut rng, &mut scratch, &mut errors)?;
        }
        Ok(errors)
    })?;
    let mut total = vec![0u64; decoders.len()];
    for block in blocks {
        for (t, e) in total.iter_mut().zip(block) {
            *t += e;
        }
    }
    Ok(total)
}

/// Sweep one scheme over the configured SNR grid. Row labels are
/// `prefix:decoder` when a prefix is given.
pub fn sweep_scheme(
    cfg: &ExperimentConfig,
    scheme: &Scheme,
    prefix: Option<&str>,
    opts: RunOptions,
) -> Result<Vec<SweepRow>> {
    let source = ChannelSource::Model(cfg.channel_model(scheme.n()));
    let method = resolve_method(cfg, scheme);
    let mut rows = Vec::new();
    for (p, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let errors = count_errors(
            scheme,
            &source,
            &cfg.decoders,
            db_to_linear(snr_db),
            cfg.trials_per_point,
            point_seed(cfg.master_seed, p as u64),
            method,
            cfg.mc_samples,
            cfg.noiseless,
            opts,
        )?;
        for (d, e) in cfg.decoders.iter().zip(errors) {
            let label = match prefix {
                Some(pre) => format!("{pre}:{}", d.name()),
                None => d.name().to_string(),
            };
            rows.push(SweepRow::new(label, snr_db, cfg.trials_per_point, e));
        }
    }
    Ok(rows)
}

/// Metadata entries describing one configured scheme.
pub fn scheme_metadata(cfg: &ExperimentConfig, scheme: &Scheme, prefix: Option<&str>) -> Vec<(String, String)> {
    let key = |k: &str| match prefix {
        Some(p) => format!("{k}[{p}]"),
        None => k.to_string(),
    };
    let mut meta = vec![
        (key("family"), scheme.family.name().to_string()),
        (key("constellation"), scheme.constellation.kind().name().to_string()),
        (key("M"), scheme.symbols().to_string()),
        (key("B"), cfg.b.to_string()),
        (key("N"), scheme.n().to_string()),
        (key("K"), cfg.message_len().unwrap_or(0).to_string()),
        (key("d_min"), scheme.d_min().to_string()),
        (key("transition"), format!("{:?}", resolve_method(cfg, scheme)).to_lowercase()),
        (
            key("subset_groups"),
            scheme
                .plan
                .groups()
                .iter()
                .map(|g| g.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join(" | "),
        ),
    ];
    if let Some(g) = scheme.generator() {
        let rows: Vec<String> = (0..g.k())
            .map(|r| g.row(r).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""))
            .collect();
        meta.push((key("generator"), rows.join("/")));
    }
    let channel = match cfg.channel.kind {
        ChannelKind::IidRayleigh => "iid_rayleigh".to_string(),
        ChannelKind::FixedGain => format!(
            "fixed_gain {:?} uniform_phase",
            cfg.channel.gains.as_deref().unwrap_or_default()
        ),
    };
    meta.push((key("channel"), channel));
    meta
}

/// Monte-Carlo SER sweep of the configured scheme and decoders.
pub fn run_ser_sweep(cfg: &ExperimentConfig, opts: RunOptions) -> Result<SweepResult> {
    let start = Stopwatch::start();
    let scheme = Scheme::from_config(cfg)?;
    let rows = sweep_scheme(cfg, &scheme, None, opts)?;
    let mut metadata = vec![
        ("config_hash".to_string(), cfg.hash()),
        ("seed".to_string(), cfg.master_seed.to_string()),
        ("trials_per_point".to_string(), cfg.trials_per_point.to_string()),
    ];
    metadata.extend(scheme_metadata(cfg, &scheme, None));
    if cfg.noiseless {
        metadata.push(("noiseless".into(), "true".into()));
    }
    Ok(SweepResult {
        metadata,
        rows,
        wall_time_s: start.seconds(),
    })
}

/// Exact SER of ML decoding for one channel realization, by enumerating
/// every output pattern weighted by the closed-form transition tables.
pub fn exact_ml_ser(scheme: &Scheme, h: &[Complex64], rho: f64) -> Result<f64> {
    let n = scheme.n();
    let q = scheme.outputs();
    let m_count = scheme.symbols();
    let total_bits = n as u32 * scheme.field.bits();
    if total_bits > 20 {
        return Err(Error::EnumerationTooLarge(total_bits));
    }
    let c = scheme.constellation.with_energy(rho)?;
    let mut rng = trial_rng(0, 0);
    let model = TransitionModel::build(h, &c, &scheme.maps, q, TransitionMethod::Analytic, 1, &mut rng)?;
    let logs: Vec<Vec<f64>> = model.tables.iter().map(|t| t.log_probs()).collect();
    let nodes: Vec<usize> = (0..n).collect();
    let mut u = vec![0u8; n];
    let mut correct = 0.0;
    for idx in 0..q.pow(n as u32) {
        let mut rest = idx;
        for slot in u.iter_mut().rev() {
            *slot = (rest % q) as u8;
            rest /= q;
        }
        let d = ml_decode_logs(&u, &logs, &nodes, m_count, q);
        correct += model
            .tables
            .iter()
            .zip(&u)
            .map(|(t, &ui)| t.get(d, ui as usize))
            .product::<f64>();
    }
    Ok(1.0 - correct / m_count as f64)
}
