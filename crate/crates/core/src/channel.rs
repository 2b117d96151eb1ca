//! Fading/noise sampling and per-node transition models `Pr(u_i | s, h_i)`.
//!
//! A node detects `argmin_m |y - h s_m|^2` and forwards `map[m_hat]`. Since the
//! equalized noise `n / h` is circularly symmetric, the symbol confusion
//! matrix `Pr(m_hat | m)` depends on `h` only through `|h|`; node tables are
//! then sums of confusion entries over each output's preimage.
//!
//! Closed forms are available for grid layouts (BPSK, QPSK, 16QAM: products of
//! per-axis PAM slicer probabilities) and for PSK (one-dimensional phase
//! integral evaluated by Gauss-Legendre quadrature). Everything else goes
//! through Monte-Carlo counting.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sigmap::{Constellation, Layout};

/// Entries below this are raised to it before taking logs.
pub const PROB_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    IidRayleigh,
    FixedGain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    /// Per-node amplitudes `|h_i|` for `FixedGain`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<Vec<f64>>,
    pub nodes: usize,
}

impl ChannelModel {
    pub fn rayleigh(nodes: usize) -> Self {
        Self {
            kind: ChannelKind::IidRayleigh,
            gains: None,
            nodes,
        }
    }

    pub fn fixed_gain(gains: Vec<f64>) -> Self {
        Self {
            kind: ChannelKind::FixedGain,
            nodes: gains.len(),
            gains: Some(gains),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, &self.gains) {
            (ChannelKind::FixedGain, None) => Err(Error::ChannelModel(
                "fixed_gain channel requires a gains list".into(),
            )),
            (ChannelKind::FixedGain, Some(g)) if g.len() != self.nodes => Err(Error::ChannelModel(
                format!("{} gains given for {} nodes", g.len(), self.nodes),
            )),
            (ChannelKind::FixedGain, Some(g)) if g.iter().any(|v| !v.is_finite() || *v < 0.0) => {
                Err(Error::ChannelModel("gains must be finite and non-negative".into()))
            }
            _ => Ok(()),
        }
    }
}

/// One draw of CN(0, 1): independent real/imaginary parts of variance 1/2.
#[inline]
pub fn sample_cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Channel vector for one coherence block. Fixed-gain draws a uniform phase per node.
pub fn sample_channel<R: Rng + ?Sized>(model: &ChannelModel, rng: &mut R) -> Result<Vec<Complex64>> {
    model.validate()?;
    Ok(match model.kind {
        ChannelKind::IidRayleigh => (0..model.nodes).map(|_| sample_cn(rng)).collect(),
        ChannelKind::FixedGain => model
            .gains
            .as_ref()
            .expect("validated")
            .iter()
            .map(|&g| Complex64::from_polar(g, rng.random::<f64>() * 2.0 * PI))
            .collect(),
    })
}

#[inline]
pub fn add_noise<R: Rng + ?Sized>(x: Complex64, rng: &mut R) -> Complex64 {
    x + sample_cn(rng)
}

/// Gaussian tail `Q(x) = P(Z > x)`.
#[inline]
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionMethod {
    Analytic,
    MonteCarlo,
}

/// Row-stochastic `M x q` table of `Pr(u | s = s_m, h)` for one node.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionTable {
    symbols: usize,
    outputs: usize,
    probs: Vec<f64>,
}

impl TransitionTable {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let symbols = rows.len();
        let outputs = rows.first().map_or(0, Vec::len);
        if symbols == 0 || outputs == 0 || rows.iter().any(|r| r.len() != outputs) {
            return Err(Error::Contract("transition rows must be non-empty and equal length".into()));
        }
        Ok(Self {
            symbols,
            outputs,
            probs: rows.concat(),
        })
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn get(&self, m: usize, u: usize) -> f64 {
        self.probs[m * self.outputs + u]
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.probs[m * self.outputs..(m + 1) * self.outputs]
    }

    /// Table of `ln max(p, PROB_FLOOR)`, same layout.
    pub fn log_probs(&self) -> Vec<f64> {
        self.probs.iter().map(|&p| p.max(PROB_FLOOR).ln()).collect()
    }

    /// Largest deviation of a row sum from 1.
    pub fn max_row_error(&self) -> f64 {
        (0..self.symbols)
            .map(|m| (self.row(m).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Probability that the output differs from the noiseless output `map[m]`,
    /// averaged over symbols.
    pub fn error_probability(&self, map: &[u8]) -> f64 {
        (0..self.symbols)
            .map(|m| 1.0 - self.get(m, map[m] as usize))
            .sum::<f64>()
            / self.symbols as f64
    }

    /// Aggregate a symbol confusion matrix through a node map.
    pub fn from_confusion(confusion: &[f64], symbols: usize, map: &[u8], outputs: usize) -> Self {
        let mut probs = vec![0.0; symbols * outputs];
        for m in 0..symbols {
            for (m_hat, &u) in map.iter().enumerate() {
                probs[m * outputs + u as usize] += confusion[m * symbols + m_hat];
            }
        }
        Self {
            symbols,
            outputs,
            probs,
        }
    }
}

// 8-point Gauss-Legendre on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let width = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            total += w * f(mid + half * x);
        }
    }
    total * 0.5 * width
}

/// Probability that the received phase of `A + CN(0, 1)` lies in `(theta, pi)`,
/// with `gamma = A^2` and `0 <= theta <= pi`:
/// `(1 / 2 pi) int_0^{pi - theta} exp(-gamma sin^2 theta / sin^2 phi) dphi`.
pub fn phase_tail(theta: f64, gamma: f64) -> f64 {
    if theta >= PI {
        return 0.0;
    }
    let s = theta.sin();
    let a = gamma * s * s;
    if a < 1.0 {
        if a == 0.0 {
            return if theta <= 0.0 { 0.5 } else { (PI - theta) / (2.0 * PI) };
        }
        // The integrand rises from 0 to ~1 around phi ~ sqrt(a): halve the
        // panels toward 0 until it drops below ~1e-18.
        let f = |phi: f64| (-a / phi.sin().powi(2)).exp();
        let floor = (a / 41.5).sqrt();
        let mut hi = PI - theta;
        let mut body = integrate(f, 0.5 * hi, hi, 6);
        hi *= 0.5;
        for _ in 0..64 {
            if hi <= floor {
                break;
            }
            body += integrate(f, 0.5 * hi, hi, 2);
            hi *= 0.5;
        }
        return body / (2.0 * PI);
    }
    // t = cot(phi), v = sqrt(a) t:
    // F = e^{-a} / (2 pi sqrt a) * int_{v0}^inf e^{-v^2} / (1 + v^2 / a) dv,  v0 = -sqrt(a) cot(theta)
    let v0 = -a.sqrt() * theta.cos() / s;
    let lorentz = |v: f64| 1.0 / (1.0 + v * v / a);
    const V_MAX: f64 = 9.0;
    let (log_scale, body) = if v0 <= 0.0 {
        let upper = integrate(|v| (-v * v).exp() * lorentz(v), 0.0, V_MAX, 24);
        let lower = integrate(|v| (-v * v).exp() * lorentz(v), 0.0, (-v0).min(V_MAX), 24);
        (-a, upper + lower)
    } else {
        let len = -v0 + (v0 * v0 + 60.0).sqrt();
        let body = integrate(|w| (-2.0 * v0 * w - w * w).exp() * lorentz(v0 + w), 0.0, len, 16);
        (-a - v0 * v0, body)
    };
    (log_scale + body.ln() - (2.0 * PI * a.sqrt()).ln()).exp()
}

fn pam_transition(levels: &[f64], sigma: f64) -> Vec<f64> {
    // Slicer thresholds at midpoints; returns row-major L x L of Pr(j | i).
    let l = levels.len();
    let mut out = vec![0.0; l * l];
    for i in 0..l {
        let x = levels[i];
        for j in 0..l {
            let lo = if j == 0 { f64::NEG_INFINITY } else { 0.5 * (levels[j - 1] + levels[j]) };
            let hi = if j + 1 == l { f64::INFINITY } else { 0.5 * (levels[j] + levels[j + 1]) };
            let tail = |d: f64| if sigma == 0.0 { f64::from(d <= 0.0) } else { q_function(d / sigma) };
            out[i * l + j] = if lo >= x {
                tail(lo - x) - if hi.is_finite() { tail(hi - x) } else { 0.0 }
            } else if hi <= x {
                tail(x - hi) - if lo.is_finite() { tail(x - lo) } else { 0.0 }
            } else {
                1.0 - if lo.is_finite() { tail(x - lo) } else { 0.0 }
                    - if hi.is_finite() { tail(hi - x) } else { 0.0 }
            }
            .max(0.0);
        }
    }
    out
}

/// Closed-form `Pr(m_hat | m)` (row-major `M x M`) for a node with gain `h`.
pub fn analytic_confusion(h: Complex64, c: &Constellation) -> Result<Vec<f64>> {
    let m = c.order();
    let gain_sq = h.norm_sqr();
    if gain_sq == 0.0 && c.energy() > 0.0 {
        return Err(Error::DegenerateChannel("h = 0 at a receive node".into()));
    }
    match c.layout() {
        Layout::Grid {
            levels_i,
            levels_q,
            coords,
        } => {
            // equalized noise n / h has per-axis variance 1 / (2 |h|^2)
            let sigma = if gain_sq == 0.0 { 1.0 } else { (0.5 / gain_sq).sqrt() };
            let ti = pam_transition(levels_i, sigma);
            let tq = if levels_q.is_empty() { vec![1.0] } else { pam_transition(levels_q, sigma) };
            let (li, lq) = (levels_i.len(), levels_q.len().max(1));
            let mut out = vec![0.0; m * m];
            for (a, &(ai, aq)) in coords.iter().enumerate() {
                for (b, &(bi, bq)) in coords.iter().enumerate() {
                    out[a * m + b] = ti[ai * li + bi] * tq[aq * lq + bq];
                }
            }
            Ok(out)
        }
        Layout::Psk { phase_index } => {
            let gamma = gain_sq * c.energy();
            let half = m / 2;
            let step = PI / m as f64;
            // w[d]: probability of landing d sectors away
            let mut w = vec![0.0; half + 1];
            let tails: Vec<f64> = (0..=half).map(|j| phase_tail((2 * j + 1) as f64 * step, gamma)).collect();
            w[0] = 1.0 - 2.0 * tails[0];
            for d in 1..half {
                w[d] = (tails[d - 1] - tails[d]).max(0.0);
            }
            w[half] = 2.0 * tails[half - 1];
            let mut out = vec![0.0; m * m];
            for a in 0..m {
                for b in 0..m {
                    let d = (phase_index[b] + m - phase_index[a]) % m;
                    out[a * m + b] = w[d.min(m - d)];
                }
            }
            Ok(out)
        }
        Layout::Irregular => Err(Error::UnregisteredAnalytic(format!(
            "{} constellation",
            c.kind().name()
        ))),
    }
}

/// Monte-Carlo estimate of `Pr(m_hat | m)` from `samples` receptions per symbol.
pub fn monte_carlo_confusion<R: Rng + ?Sized>(
    h: Complex64,
    c: &Constellation,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if h.norm_sqr() == 0.0 {
        return Err(Error::DegenerateChannel("h = 0 at a receive node".into()));
    }
    if samples == 0 {
        return Err(Error::Contract("mc_samples must be positive".into()));
    }
    let m = c.order();
    let mut counts = vec![0u64; m * m];
    for sym in 0..m {
        let x = h * c.point(sym);
        for _ in 0..samples {
            let m_hat = c.detect(add_noise(x, rng), h);
            counts[sym * m + m_hat] += 1;
        }
    }
    Ok(counts.iter().map(|&k| k as f64 / samples as f64).collect())
}

/// Transition table of one node with decision map `map` (output per detected symbol).
pub fn transition_table<R: Rng + ?Sized>(
    h: Complex64,
    c: &Constellation,
    map: &[u8],
    outputs: usize,
    method: TransitionMethod,
    mc_samples: usize,
    rng: &mut R,
) -> Result<TransitionTable> {
    if map.len() != c.order() {
        return Err(Error::LengthMismatch {
            expected: c.order(),
            found: map.len(),
        });
    }
    if map.iter().any(|&u| u as usize >= outputs) {
        return Err(Error::Contract("node map output outside the field".into()));
    }
    let confusion = match method {
        TransitionMethod::Analytic => analytic_confusion(h, c)?,
        TransitionMethod::MonteCarlo => monte_carlo_confusion(h, c, mc_samples, rng)?,
    };
    Ok(TransitionTable::from_confusion(&confusion, c.order(), map, outputs))
}

/// Whether a closed-form model exists for this constellation.
pub fn has_analytic(c: &Constellation) -> bool {
    !matches!(c.layout(), Layout::Irregular)
}

/// Per-node tables for one channel realization.
#[derive(Clone, Debug)]
pub struct TransitionModel {
    pub tables: Vec<TransitionTable>,
    pub method: TransitionMethod,
    pub mc_samples: usize,
}

impl TransitionModel {
    pub fn build<R: Rng + ?Sized>(
        h: &[Complex64],
        c: &Constellation,
        maps: &[Vec<u8>],
        outputs: usize,
        method: TransitionMethod,
        mc_samples: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if h.len() != maps.len() {
            return Err(Error::LengthMismatch {
                expected: maps.len(),
                found: h.len(),
            });
        }
        let tables = h
            .iter()
            .zip(maps)
            .map(|(&hi, map)| transition_table(hi, c, map, outputs, method, mc_samples, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            tables,
            method,
            mc_samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigmap::{make_constellation, ConstellationKind};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qpsk(rho: f64) -> Constellation {
        make_constellation(ConstellationKind::Qpsk, 4, rho).unwrap()
    }

    #[test]
    fn q_function_values() {
        assert_relative_eq!(q_function(0.0), 0.5);
        assert_relative_eq!(q_function(1.0), 0.158_655_253_931_457_05, max_relative = 1e-12);
        assert_relative_eq!(q_function(5.0), 2.866_515_718_791_939e-7, max_relative = 1e-10);
    }

    #[test]
    fn rayleigh_unit_power() {
        let model = ChannelModel::rayleigh(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut acc = 0.0;
        let draws = 250_000;
        for _ in 0..draws {
            acc += sample_channel(&model, &mut rng).unwrap().iter().map(|h| h.norm_sqr()).sum::<f64>();
        }
        let mean = acc / (4 * draws) as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean |h|^2 = {mean}");
    }

    #[test]
    fn fixed_gain_and_determinism() {
        let model = ChannelModel::fixed_gain(vec![1.5, 0.3, 1.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = sample_channel(&model, &mut rng).unwrap();
        assert_relative_eq!(h[0].norm(), 1.5, max_relative = 1e-12);
        assert_relative_eq!(h[1].norm(), 0.3, max_relative = 1e-12);
        let again = sample_channel(&model, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(h, again);
        let bad = ChannelModel {
            kind: ChannelKind::FixedGain,
            gains: None,
            nodes: 3,
        };
        assert!(matches!(sample_channel(&bad, &mut rng), Err(Error::ChannelModel(_))));
    }

    #[test]
    fn noise_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let x = Complex64::new(0.3, -2.0);
        let (mut sr, mut si, mut srr, mut sii, mut sri) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let d = add_noise(x, &mut rng) - x;
            sr += d.re;
            si += d.im;
            srr += d.re * d.re;
            sii += d.im * d.im;
            sri += d.re * d.im;
        }
        let nf = n as f64;
        assert!((sr / nf).abs() < 0.01 && (si / nf).abs() < 0.01);
        assert!(((srr + sii) / nf - 1.0).abs() < 0.01);
        assert!((srr / nf - 0.5).abs() < 0.01 && (sii / nf - 0.5).abs() < 0.01);
        assert!((sri / nf).abs() < 0.01);
    }

    #[test]
    fn qpsk_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for &(gain, rho) in &[(1.0, 1.0), (0.4, 10.0), (2.0, 3.0), (0.05, 100.0)] {
            let h = Complex64::from_polar(gain, 0.7);
            let c = qpsk(rho);
            let p = q_function((gain * gain * rho).sqrt());
            // g = [1, 0]: output is the first label bit (m >> 1)
            let t = transition_table(h, &c, &[0, 0, 1, 1], 2, TransitionMethod::Analytic, 0, &mut rng).unwrap();
            for m in 0..4 {
                assert_relative_eq!(t.get(m, 1 - (m >> 1)), p, max_relative = 1e-12);
            }
            // g = [1, 1]: XOR of the label bits
            let t = transition_table(h, &c, &[0, 1, 1, 0], 2, TransitionMethod::Analytic, 0, &mut rng).unwrap();
            for m in 0..4 {
                let wrong = 1 - ((m >> 1) ^ (m & 1));
                assert_relative_eq!(t.get(m, wrong), 2.0 * p * (1.0 - p), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn zero_energy_rows_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h = Complex64::new(0.3, 0.9);
        let t = transition_table(h, &qpsk(0.0), &[0, 1, 1, 0], 2, TransitionMethod::Analytic, 0, &mut rng).unwrap();
        for m in 0..4 {
            assert_relative_eq!(t.get(m, 0), 0.5, max_relative = 1e-12);
        }
        let psk = make_constellation(ConstellationKind::Psk8, 8, 0.0).unwrap();
        let conf = analytic_confusion(h, &psk).unwrap();
        for v in conf {
            assert_relative_eq!(v, 0.125, max_relative = 1e-9);
        }
    }

    #[test]
    fn four_psk_phase_integral_matches_qpsk_product_form() {
        // 4-PSK is QPSK rotated by 45 degrees: adjacent w = P(1-P), opposite w = P^2.
        for &gamma in &[0.01f64, 0.5, 2.0, 10.0, 50.0, 400.0] {
            let p = q_function(gamma.sqrt());
            let step = PI / 4.0;
            let t0 = phase_tail(step, gamma);
            let t1 = phase_tail(3.0 * step, gamma);
            assert_relative_eq!(t0 - t1, p * (1.0 - p), max_relative = 1e-9);
            assert_relative_eq!(2.0 * t1, p * p, max_relative = 1e-9);
        }
    }

    #[test]
    fn phase_tail_limits() {
        assert_relative_eq!(phase_tail(0.0, 5.0), 0.5, max_relative = 1e-9);
        assert_eq!(phase_tail(PI, 5.0), 0.0);
        assert_relative_eq!(phase_tail(PI / 2.0, 0.0), 0.25, max_relative = 1e-12);
        // monotone in theta and in gamma
        let mut prev = 1.0;
        for i in 1..20 {
            let v = phase_tail(i as f64 * PI / 20.0, 3.0);
            assert!(v < prev);
            prev = v;
        }
        assert!(phase_tail(PI / 8.0, 100.0) < phase_tail(PI / 8.0, 10.0));
    }

    #[test]
    fn psk8_analytic_matches_monte_carlo() {
        let c = make_constellation(ConstellationKind::Psk8, 8, 4.0).unwrap();
        let h = Complex64::new(0.8, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples = 200_000;
        let exact = analytic_confusion(h, &c).unwrap();
        let mc = monte_carlo_confusion(h, &c, samples, &mut rng).unwrap();
        for (e, m) in exact.iter().zip(&mc) {
            let sd = (e * (1.0 - e) / samples as f64).sqrt();
            assert!((e - m).abs() <= 4.0 * sd + 1e-12, "exact {e} mc {m}");
        }
    }

    #[test]
    fn qam16_analytic_matches_monte_carlo() {
        let c = make_constellation(ConstellationKind::Qam16, 16, 20.0).unwrap();
        let h = Complex64::new(-0.6, 0.4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples = 100_000;
        let exact = analytic_confusion(h, &c).unwrap();
        let mc = monte_carlo_confusion(h, &c, samples, &mut rng).unwrap();
        for (e, m) in exact.iter().zip(&mc) {
            let sd = (e * (1.0 - e) / samples as f64).sqrt();
            assert!((e - m).abs() <= 4.0 * sd + 1e-12, "exact {e} mc {m}");
        }
    }

    #[test]
    fn rows_are_stochastic_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (kind, m) in [
            (ConstellationKind::Bpsk, 2),
            (ConstellationKind::Qpsk, 4),
            (ConstellationKind::Psk8, 8),
            (ConstellationKind::Qam16, 16),
        ] {
            let c = make_constellation(kind, m, 5.0).unwrap();
            let map: Vec<u8> = (0..m).map(|s| (s % 2) as u8).collect();
            let mut prev = f64::INFINITY;
            for i in 0..60 {
                let gain = 0.05 * 1.15f64.powi(i);
                let t = transition_table(Complex64::new(gain, 0.0), &c, &map, 2, TransitionMethod::Analytic, 0, &mut rng)
                    .unwrap();
                assert!(t.max_row_error() < 1e-9, "{kind:?}");
                assert!(t.probs.iter().all(|&p| (0.0..=1.0).contains(&p)));
                let pe = t.error_probability(&map);
                assert!(pe <= prev + 1e-12, "{kind:?} not monotone at gain {gain}");
                prev = pe;
            }
        }
    }

    #[test]
    fn unregistered_and_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let custom = Constellation::custom(&[(1.0, 0.0, 0), (-1.0, 0.0, 1)], 1.0).unwrap();
        assert!(matches!(
            transition_table(Complex64::new(1.0, 0.0), &custom, &[0, 1], 2, TransitionMethod::Analytic, 0, &mut rng),
            Err(Error::UnregisteredAnalytic(_))
        ));
        let t = transition_table(Complex64::new(1.0, 0.0), &custom, &[0, 1], 2, TransitionMethod::MonteCarlo, 1000, &mut rng)
            .unwrap();
        assert!(t.max_row_error() < 1e-12);
        assert!(matches!(
            analytic_confusion(Complex64::new(0.0, 0.0), &qpsk(1.0)),
            Err(Error::DegenerateChannel(_))
        ));
    }
}
