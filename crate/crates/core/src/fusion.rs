//! Fusion-center decoders and baseline receivers.
//!
//! All decoders return a symbol index (equal to the message index of the
//! code, see [`crate::codes`]). Ties resolve to the lowest index.

use num_complex::Complex64;

use crate::channel::{TransitionModel, TransitionTable, PROB_FLOOR};
use crate::codes::{Code, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::gf::{symbol_distance, FieldSpec, GfVector};
use crate::sigmap::Constellation;

/// What the fusion center receives for one channel use.
#[derive(Clone, Debug)]
pub struct FusionInput {
    pub u: GfVector,
    pub h: Option<Vec<Complex64>>,
    pub tables: Option<TransitionModel>,
}

impl FusionInput {
    pub fn without_csi(u: GfVector) -> Self {
        Self {
            u,
            h: None,
            tables: None,
        }
    }

    pub fn with_csi(u: GfVector, h: Vec<Complex64>, tables: TransitionModel) -> Self {
        Self {
            u,
            h: Some(h),
            tables: Some(tables),
        }
    }

    fn csi(&self) -> Result<(&[Complex64], &[TransitionTable])> {
        match (&self.h, &self.tables) {
            (Some(h), Some(t)) => Ok((h, &t.tables)),
            _ => Err(Error::Contract("decoder needs channel gains and transition tables".into())),
        }
    }
}

/// Node groups sharing one processing rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetPlan {
    groups: Vec<Vec<usize>>,
}

impl SubsetPlan {
    /// Group nodes with identical decision maps, groups ordered by first member.
    pub fn from_node_maps<T: PartialEq>(maps: &[T]) -> Self {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, map) in maps.iter().enumerate() {
            match groups.iter_mut().find(|g| maps[g[0]] == *map) {
                Some(g) => g.push(i),
                None => groups.push(vec![i]),
            }
        }
        Self { groups }
    }

    /// Group identical generator columns. For SCRS this is the stride-`N_out` grouping.
    pub fn from_generator(g: &GeneratorMatrix) -> Self {
        let cols: Vec<Vec<u8>> = (0..g.n()).map(|i| g.column(i)).collect();
        Self::from_node_maps(&cols)
    }

    pub fn from_groups(groups: Vec<Vec<usize>>) -> Self {
        Self { groups }
    }

    /// Number of distinct rules L.
    pub fn l(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// True when every group has the same size (L divides N).
    pub fn is_balanced(&self) -> bool {
        self.groups.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// Groups must partition `0..N` and each group must share one generator column.
    pub fn check_against(&self, g: &GeneratorMatrix) -> Result<()> {
        let mut seen = vec![false; g.n()];
        for group in &self.groups {
            let first = *group
                .first()
                .ok_or_else(|| Error::Contract("empty subset group".into()))?;
            for &i in group {
                if i >= g.n() || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Contract(format!("node {i} out of range or in two groups")));
                }
                if g.column(i) != g.column(first) {
                    return Err(Error::Contract(format!(
                        "nodes {first} and {i} are grouped but use different rules"
                    )));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Contract("subset plan does not cover every node".into()));
        }
        Ok(())
    }

    /// Strongest node of each group (largest `|h|^2`, lowest index on ties).
    pub fn select(&self, h: &[Complex64]) -> Vec<usize> {
        self.groups
            .iter()
            .map(|group| {
                let mut best = group[0];
                for &i in &group[1..] {
                    if h[i].norm_sqr() > h[best].norm_sqr() {
                        best = i;
                    }
                }
                best
            })
            .collect()
    }
}

/// `argmax_m sum_{i in nodes} ln Pr(u_i | m, h_i)` over precomputed log tables
/// (`log_tables[i]` is row-major M x q).
#[inline]
pub fn ml_decode_logs(u: &[u8], log_tables: &[Vec<f64>], nodes: &[usize], symbols: usize, outputs: usize) -> usize {
    let mut best = 0;
    let mut best_ll = f64::NEG_INFINITY;
    for m in 0..symbols {
        let ll: f64 = nodes
            .iter()
            .map(|&i| log_tables[i][m * outputs + u[i] as usize])
            .sum();
        if ll > best_ll {
            best_ll = ll;
            best = m;
        }
    }
    best
}

fn check_tables(u: &GfVector, tables: &[TransitionTable], code: &Code) -> Result<()> {
    if u.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            found: u.len(),
        });
    }
    if tables.len() != code.n() {
        return Err(Error::Contract(format!(
            "{} transition tables for {} nodes",
            tables.len(),
            code.n()
        )));
    }
    if tables.iter().any(|t| t.symbols() != code.len() || t.outputs() != code.field().order()) {
        return Err(Error::Contract("transition table shape does not match the code".into()));
    }
    Ok(())
}

fn log_tables(tables: &[TransitionTable]) -> Vec<Vec<f64>> {
    tables.iter().map(TransitionTable::log_probs).collect()
}

/// ML decoding with full CSI.
pub fn ml_decode(input: &FusionInput, code: &Code) -> Result<usize> {
    let (_, tables) = input.csi()?;
    check_tables(&input.u, tables, code)?;
    let nodes: Vec<usize> = (0..code.n()).collect();
    Ok(ml_decode_logs(
        input.u.values(),
        &log_tables(tables),
        &nodes,
        code.len(),
        code.field().order(),
    ))
}

/// Selected-subset ML: keep the strongest node of each group, then ML on those.
pub fn subset_ml_decode(input: &FusionInput, code: &Code, plan: &SubsetPlan) -> Result<usize> {
    let (h, tables) = input.csi()?;
    check_tables(&input.u, tables, code)?;
    match code.generator() {
        Some(g) => plan.check_against(g)?,
        None => {
            let cols: Vec<Vec<u8>> = (0..code.n())
                .map(|i| code.codewords().map(|c| c[i]).collect())
                .collect();
            if SubsetPlan::from_node_maps(&cols).l() > plan.l() {
                return Err(Error::Contract("subset plan groups distinct rules".into()));
            }
        }
    }
    if h.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            found: h.len(),
        });
    }
    let chosen = plan.select(h);
    Ok(ml_decode_logs(
        input.u.values(),
        &log_tables(tables),
        &chosen,
        code.len(),
        code.field().order(),
    ))
}

/// Nearest codeword in Hamming distance; no CSI needed.
pub fn hamming_decode(u: &GfVector, code: &Code) -> Result<usize> {
    if u.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            found: u.len(),
        });
    }
    Ok(hamming_decode_raw(u.values(), code))
}

#[inline]
pub(crate) fn hamming_decode_raw(u: &[u8], code: &Code) -> usize {
    let mut best = 0;
    let mut best_d = usize::MAX;
    for (m, c) in code.codewords().enumerate() {
        let d = symbol_distance(c, u);
        if d < best_d {
            best_d = d;
            best = m;
        }
    }
    best
}

/// Centralized maximum-ratio combining of the unquantized observations.
pub fn centralized_mrc(y: &[Complex64], h: &[Complex64], c: &Constellation) -> Result<usize> {
    if y.len() != h.len() {
        return Err(Error::LengthMismatch {
            expected: h.len(),
            found: y.len(),
        });
    }
    let energy: f64 = h.iter().map(|v| v.norm_sqr()).sum();
    if energy == 0.0 {
        return Err(Error::DegenerateChannel("all channel gains are zero".into()));
    }
    Ok(c.nearest(mrc_combine(y, h, energy)))
}

#[inline]
pub(crate) fn mrc_combine(y: &[Complex64], h: &[Complex64], energy: f64) -> Complex64 {
    y.iter().zip(h).map(|(yi, hi)| hi.conj() * yi).sum::<Complex64>() / energy
}

/// Plurality vote over forwarded symbol decisions, ties to the lowest symbol.
pub fn uncoded_majority(votes: &[usize], symbols: usize) -> usize {
    let mut counts = vec![0usize; symbols];
    for &v in votes {
        counts[v] += 1;
    }
    let mut best = 0;
    for m in 1..symbols {
        if counts[m] > counts[best] {
            best = m;
        }
    }
    best
}

/// Codeword-set rule: the node forwards `column[m_hat]`, where `m_hat` is the
/// row (constellation point) it detected.
pub fn codeword_set_quantize(m_hat: usize, column: &[u8]) -> Result<u8> {
    column.get(m_hat).copied().ok_or(Error::LengthMismatch {
        expected: column.len(),
        found: m_hat + 1,
    })
}

/// Non-linear codeword-set matrix given column-wise as integers; bit r of a
/// column integer (least significant first) is the entry of row r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodewordSetMatrix {
    rows: usize,
    columns: Vec<u32>,
}

impl CodewordSetMatrix {
    pub fn new(rows: usize, columns: Vec<u32>) -> Result<Self> {
        if rows == 0 || rows > 32 || columns.is_empty() {
            return Err(Error::Construction("codeword set needs 1..=32 rows and a column".into()));
        }
        if columns.iter().any(|&c| rows < 32 && c >> rows != 0) {
            return Err(Error::Construction(format!("column value exceeds {rows} rows")));
        }
        Ok(Self { rows, columns })
    }

    /// The optimized QPSK / N = 10 matrix `(6,12,4,9,12,9,12,6,1,3)`.
    pub fn prior_art_qpsk_n10() -> Self {
        Self::new(4, vec![6, 12, 4, 9, 12, 9, 12, 6, 1, 3]).expect("valid")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    /// Column `i` expanded to bits, row 0 first.
    pub fn column_bits(&self, i: usize) -> Vec<u8> {
        (0..self.rows).map(|r| ((self.columns[i] >> r) & 1) as u8).collect()
    }

    pub fn row_bits(&self, r: usize) -> Vec<u8> {
        self.columns.iter().map(|c| ((c >> r) & 1) as u8).collect()
    }

    /// Per-node decision maps over constellation indices; `row_of_symbol[m]`
    /// names the matrix row assigned to point `m`.
    pub fn node_maps(&self, row_of_symbol: &[usize]) -> Result<Vec<Vec<u8>>> {
        if row_of_symbol.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                found: row_of_symbol.len(),
            });
        }
        (0..self.n())
            .map(|i| {
                let col = self.column_bits(i);
                row_of_symbol
                    .iter()
                    .map(|&r| codeword_set_quantize(r, &col))
                    .collect()
            })
            .collect()
    }

    /// Binary code whose codeword for point `m` is row `row_of_symbol[m]`.
    pub fn to_code(&self, row_of_symbol: &[usize]) -> Result<Code> {
        let field = FieldSpec::new(1)?;
        let rows: Vec<Vec<u8>> = row_of_symbol.iter().map(|&r| self.row_bits(r)).collect();
        Code::from_codewords(&field, &rows)
    }
}

/// Row assignment for QPSK listed as `(1+j), (1-j), (-1+j), (-1-j)` (rows 0..3).
pub fn qpsk_listing_rows(c: &Constellation) -> Result<Vec<usize>> {
    if c.order() != 4 {
        return Err(Error::Constellation("listing order is defined for QPSK only".into()));
    }
    Ok(c
        .points()
        .iter()
        .map(|p| match (p.re >= 0.0, p.im >= 0.0) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        })
        .collect())
}

/// Floor used when probabilities are multiplied directly (exact enumeration).
pub fn floored(p: f64) -> f64 {
    p.max(PROB_FLOOR)
}
