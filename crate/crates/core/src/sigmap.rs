//! Constellations, bit labels, and the per-node detect-then-quantize rule.
//!
//! Points are stored in label order: point `m` carries the label whose
//! MSB-first bit pattern is the binary expansion of `m`. Labels follow a Gray
//! layout:
//!
//! * BPSK: label 1 at `+sqrt(rho)`, label 0 at `-sqrt(rho)`.
//! * QPSK: first bit is 1 iff `Re >= 0`, second bit is 1 iff `Im >= 0`.
//! * 16QAM: two Gray bits per axis (00, 01, 11, 10 from -3 to +3), in-phase first.
//! * 8PSK: point at phase `2 pi k / 8` carries label `k ^ (k >> 1)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, GfElement, GfVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstellationKind {
    Bpsk,
    Qpsk,
    #[serde(rename = "8psk")]
    Psk8,
    #[serde(rename = "16qam")]
    Qam16,
    Custom,
}

impl ConstellationKind {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name.to_ascii_lowercase().as_str() {
            "bpsk" => Self::Bpsk,
            "qpsk" => Self::Qpsk,
            "8psk" | "psk8" => Self::Psk8,
            "16qam" | "qam16" => Self::Qam16,
            "custom" => Self::Custom,
            other => return Err(Error::Constellation(format!("unknown constellation {other:?}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Bpsk => "bpsk",
            Self::Qpsk => "qpsk",
            Self::Psk8 => "8psk",
            Self::Qam16 => "16qam",
            Self::Custom => "custom",
        }
    }

    pub fn order(self) -> Option<usize> {
        match self {
            Self::Bpsk => Some(2),
            Self::Qpsk => Some(4),
            Self::Psk8 => Some(8),
            Self::Qam16 => Some(16),
            Self::Custom => None,
        }
    }

    /// Built-in constellation of order `m`.
    pub fn for_order(m: usize) -> Result<Self> {
        Ok(match m {
            2 => Self::Bpsk,
            4 => Self::Qpsk,
            8 => Self::Psk8,
            16 => Self::Qam16,
            _ => return Err(Error::Constellation(format!("no built-in constellation with M = {m}"))),
        })
    }
}

/// Geometric structure used by the closed-form transition model.
#[derive(Clone, Debug, PartialEq)]
pub enum Layout {
    /// Product of per-axis PAM slicers. `levels_q` is empty for real-only sets.
    Grid {
        levels_i: Vec<f64>,
        levels_q: Vec<f64>,
        /// Per point: (index into levels_i, index into levels_q).
        coords: Vec<(usize, usize)>,
    },
    /// Equal-energy points at phases `2 pi k / M`; `phase_index[m] = k`.
    Psk { phase_index: Vec<usize> },
    Irregular,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    points: Vec<Complex64>,
    /// Unit-energy shape; decides the limiting regions when the energy is zero.
    unit: Vec<Complex64>,
    energy: f64,
    layout: Layout,
}

fn gray(k: usize) -> usize {
    k ^ (k >> 1)
}

/// Unit-energy layout for a built-in kind.
fn unit_layout(kind: ConstellationKind) -> Result<(Vec<Complex64>, Layout)> {
    Ok(match kind {
        ConstellationKind::Bpsk => (
            vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)],
            Layout::Grid {
                levels_i: vec![-1.0, 1.0],
                levels_q: vec![],
                coords: vec![(0, 0), (1, 0)],
            },
        ),
        ConstellationKind::Qpsk => {
            let a = std::f64::consts::FRAC_1_SQRT_2;
            let mut pts = Vec::new();
            let mut coords = Vec::new();
            for m in 0..4 {
                let (bi, bq) = (m >> 1, m & 1);
                pts.push(Complex64::new(if bi == 1 { a } else { -a }, if bq == 1 { a } else { -a }));
                coords.push((bi, bq));
            }
            (
                pts,
                Layout::Grid {
                    levels_i: vec![-a, a],
                    levels_q: vec![-a, a],
                    coords,
                },
            )
        }
        ConstellationKind::Qam16 => {
            let s = 1.0 / 10f64.sqrt();
            let levels: Vec<f64> = [-3.0, -1.0, 1.0, 3.0].iter().map(|v| v * s).collect();
            // Gray pair -> level index: 00 -> 0, 01 -> 1, 11 -> 2, 10 -> 3
            let level_of = |bits: usize| [0usize, 1, 3, 2][bits];
            let mut pts = Vec::new();
            let mut coords = Vec::new();
            for m in 0..16 {
                let (li, lq) = (level_of(m >> 2), level_of(m & 3));
                pts.push(Complex64::new(levels[li], levels[lq]));
                coords.push((li, lq));
            }
            (
                pts,
                Layout::Grid {
                    levels_i: levels.clone(),
                    levels_q: levels,
                    coords,
                },
            )
        }
        ConstellationKind::Psk8 => {
            let mut phase_index = vec![0usize; 8];
            for k in 0..8 {
                phase_index[gray(k)] = k;
            }
            let pts = phase_index
                .iter()
                .map(|&k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 8.0))
                .collect();
            (pts, Layout::Psk { phase_index })
        }
        ConstellationKind::Custom => {
            return Err(Error::Constellation(
                "custom constellations are built with Constellation::custom".into(),
            ))
        }
    })
}

/// Built-in constellation scaled to average energy `rho`.
pub fn make_constellation(kind: ConstellationKind, m: usize, rho: f64) -> Result<Constellation> {
    if kind.order() != Some(m) {
        return Err(Error::Constellation(format!(
            "unsupported order M = {m} for {}",
            kind.name()
        )));
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Constellation(format!("energy must be finite and >= 0, got {rho}")));
    }
    let (unit, layout) = unit_layout(kind)?;
    let scale = rho.sqrt();
    let layout = match layout {
        Layout::Grid {
            levels_i,
            levels_q,
            coords,
        } => Layout::Grid {
            levels_i: levels_i.iter().map(|v| v * scale).collect(),
            levels_q: levels_q.iter().map(|v| v * scale).collect(),
            coords,
        },
        other => other,
    };
    Ok(Constellation {
        kind,
        points: unit.iter().map(|p| p * scale).collect(),
        unit,
        energy: rho,
        layout,
    })
}

impl Constellation {
    /// Custom point set from `(re, im, label)` triples, rescaled to average energy `rho`.
    /// Labels must be a permutation of `0..M` with M a power of two.
    pub fn custom(triples: &[(f64, f64, usize)], rho: f64) -> Result<Self> {
        let m = triples.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::Constellation(format!("M = {m} is not a power of two >= 2")));
        }
        let mut points = vec![None; m];
        for &(re, im, label) in triples {
            if label >= m {
                return Err(Error::Constellation(format!("label {label} out of range for M = {m}")));
            }
            if points[label].replace(Complex64::new(re, im)).is_some() {
                return Err(Error::Constellation(format!("duplicate label {label}")));
            }
        }
        let points: Vec<Complex64> = points.into_iter().map(|p| p.expect("labels are a permutation")).collect();
        let mean = points.iter().sum::<Complex64>() / m as f64;
        let e = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / m as f64;
        if e <= 0.0 {
            return Err(Error::Constellation("all points at the origin".into()));
        }
        if mean.norm() > 1e-9 * e.sqrt() {
            return Err(Error::Constellation(format!("points are not zero-mean (mean {mean})")));
        }
        let scale = (rho / e).sqrt();
        Ok(Self {
            kind: ConstellationKind::Custom,
            points: points.iter().map(|p| p * scale).collect(),
            unit: points.iter().map(|p| p / e.sqrt()).collect(),
            energy: rho,
            layout: Layout::Irregular,
        })
    }

    /// Same geometry rescaled to a new average energy.
    pub fn with_energy(&self, rho: f64) -> Result<Self> {
        match self.kind {
            ConstellationKind::Custom => {
                let triples: Vec<(f64, f64, usize)> =
                    self.points.iter().enumerate().map(|(m, p)| (p.re, p.im, m)).collect();
                Self::custom(&triples, rho)
            }
            kind => make_constellation(kind, self.points.len(), rho),
        }
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.points.len().trailing_zeros()
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, m: usize) -> Complex64 {
        self.points[m]
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Label bits of point `m`, MSB first.
    pub fn label_bits(&self, m: usize) -> Vec<u8> {
        let nb = self.bits_per_symbol();
        (0..nb).rev().map(|i| ((m >> i) & 1) as u8).collect()
    }

    /// Nearest point to `y_eq` (already equalized), ties to the lowest index.
    #[inline]
    pub fn nearest(&self, y_eq: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (m, p) in self.points.iter().enumerate() {
            let d = (y_eq - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = m;
            }
        }
        best
    }

    /// Coherent detection `argmin_m |y - h s_m|^2` without the zero-channel check.
    /// At zero energy all points coincide; the decision then uses the limiting
    /// regions of the shape (largest projection onto `y conj(h)`).
    #[inline]
    pub(crate) fn detect(&self, y: Complex64, h: Complex64) -> usize {
        if self.energy == 0.0 {
            let w = (y * h.conj()).conj();
            let mut best = 0;
            let mut best_s = f64::NEG_INFINITY;
            for (m, u) in self.unit.iter().enumerate() {
                let s = (w * u).re;
                if s > best_s {
                    best_s = s;
                    best = m;
                }
            }
            return best;
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (m, p) in self.points.iter().enumerate() {
            let d = (y - h * p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = m;
            }
        }
        best
    }
}

/// Group `bits` into B-bit symbols, first bit of each group most significant.
pub fn bits_to_gfvec(bits: &[u8], field: &FieldSpec) -> Result<GfVector> {
    let b = field.bits() as usize;
    if !bits.len().is_multiple_of(b) {
        return Err(Error::LengthMismatch {
            expected: bits.len().div_ceil(b) * b,
            found: bits.len(),
        });
    }
    if let Some(bad) = bits.iter().find(|&&x| x > 1) {
        return Err(Error::Constellation(format!("bit value {bad} is not 0/1")));
    }
    let values = bits
        .chunks(b)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &x| (acc << 1) | x))
        .collect();
    GfVector::new(field, values)
}

/// Message symbols (base-q digits, most significant first) of label `m`.
pub fn label_to_message(m: usize, k: usize, field: &FieldSpec) -> Vec<u8> {
    let b = field.bits() as usize;
    let mask = field.order() - 1;
    (0..k).rev().map(|i| ((m >> (i * b)) & mask) as u8).collect()
}

/// Per-node coherent ML symbol decision.
pub fn hard_detect(y: Complex64, h: Complex64, c: &Constellation) -> Result<usize> {
    if h.norm_sqr() == 0.0 {
        return Err(Error::DegenerateChannel("h = 0 at a receive node".into()));
    }
    Ok(c.detect(y, h))
}

/// Processing rule of one node: the generator column `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeRule {
    g: GfVector,
}

impl NodeRule {
    pub fn new(g: GfVector) -> Self {
        Self { g }
    }

    pub fn g(&self) -> &GfVector {
        &self.g
    }

    /// Output `a(m) g^T` for every detected symbol `m`; the node's whole decision map.
    pub fn output_map(&self, m: usize) -> Vec<u8> {
        let field = self.g.field();
        let k = self.g.len();
        (0..m)
            .map(|sym| field.dot(&label_to_message(sym, k, field), self.g.values()))
            .collect()
    }
}

/// Detect, convert the label to field symbols, and apply the node rule.
pub fn quantize(y: Complex64, h: Complex64, c: &Constellation, rule: &NodeRule) -> Result<GfElement> {
    let m = hard_detect(y, h, c)?;
    let field = rule.g.field();
    let k = rule.g.len();
    if k * field.bits() as usize != c.bits_per_symbol() as usize {
        return Err(Error::LengthMismatch {
            expected: c.bits_per_symbol() as usize,
            found: k * field.bits() as usize,
        });
    }
    let a = bits_to_gfvec(&c.label_bits(m), field)?;
    crate::gf::gf_dot(&a, &rule.g)
}
