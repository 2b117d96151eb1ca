//! Generator matrices over GF(2^B), code enumeration and distance bounds.
//!
//! Column `i` of a K x N generator matrix is the rule `g_i` applied by node `i`.
//! Messages are indexed by their integer value with `a_1` as the most
//! significant base-q digit, so message index `m` coincides with the
//! constellation label `m` (see [`crate::sigmap`]).

use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{symbol_distance, FieldSpec, GfVector};

/// Largest K*B for which a code is enumerated.
pub const MAX_ENUMERATION_BITS: u32 = 24;

#[derive(Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    field: FieldSpec,
    k: usize,
    n: usize,
    /// Row-major K x N.
    entries: Vec<u8>,
}

impl GeneratorMatrix {
    /// Build from rows. Zero columns are allowed here (see [`Self::zero_columns`]);
    /// the built-in families never produce them.
    pub fn from_rows(field: &FieldSpec, rows: &[Vec<u8>]) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::Construction("generator needs at least one row".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::Construction("generator needs at least one column".into()));
        }
        let mut entries = Vec::with_capacity(k * n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Construction(format!(
                    "row {} has {} entries, expected {n}",
                    r + 1,
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        if let Some(&bad) = entries.iter().find(|&&v| v as usize >= field.order()) {
            return Err(Error::Construction(format!(
                "entry {bad} outside GF({})",
                field.order()
            )));
        }
        Ok(Self {
            field: field.clone(),
            k,
            n,
            entries,
        })
    }

    fn from_columns(field: &FieldSpec, k: usize, columns: &[Vec<u8>]) -> Self {
        let n = columns.len();
        let mut entries = vec![0u8; k * n];
        for (c, col) in columns.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                entries[r * n + c] = v;
            }
        }
        Self {
            field: field.clone(),
            k,
            n,
            entries,
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Message length K.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Code length N (number of nodes).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    /// Column `i`, i.e. the rule of node `i`.
    pub fn column(&self, col: usize) -> Vec<u8> {
        (0..self.k).map(|r| self.get(r, col)).collect()
    }

    pub fn column_vector(&self, col: usize) -> GfVector {
        GfVector::new(&self.field, self.column(col)).expect("entries validated")
    }

    pub fn zero_columns(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&c| (0..self.k).all(|r| self.get(r, c) == 0))
            .collect()
    }

    /// Codeword `a G` for a message given as K field symbols.
    pub fn encode(&self, message: &[u8]) -> Vec<u8> {
        (0..self.n)
            .map(|c| {
                message
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (r, &a)| acc ^ self.field.mul(a, self.get(r, c)))
            })
            .collect()
    }

    /// Plain-text form: `K N B poly` then K rows of N integers.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} {} {}\n",
            self.k,
            self.n,
            self.field.bits(),
            self.field.polynomial()
        );
        for r in 0..self.k {
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty generator file".into()))?;
        let nums = parse_ints(header)?;
        let [k, n, b, poly] = nums[..] else {
            return Err(Error::Parse(format!(
                "header must be `K N B poly`, got {header:?}"
            )));
        };
        let field = FieldSpec::with_polynomial(b as u32, poly as u32)?;
        let mut rows = Vec::with_capacity(k as usize);
        for r in 0..k {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {}", r + 1)))?;
            let row = parse_ints(line)?;
            if row.len() != n as usize {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, header says N = {n}",
                    r + 1,
                    row.len()
                )));
            }
            let row: Result<Vec<u8>> = row
                .into_iter()
                .map(|v| u8::try_from(v).map_err(|_| Error::Parse(format!("entry {v} too large"))))
                .collect();
            rows.push(row?);
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing rows after K rows".into()));
        }
        Self::from_rows(&field, &rows)
    }
}

fn parse_ints(line: &str) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
        })
        .collect()
}

impl fmt::Debug for GeneratorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GeneratorMatrix {}x{} over {:?}", self.k, self.n, self.field)?;
        for r in 0..self.k {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// All vectors of GF(q)^len in lexicographic order, first entry most significant.
fn lex_vectors(q: usize, len: usize) -> impl Iterator<Item = Vec<u8>> {
    let total = q.pow(len as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0u8; len];
        for slot in v.iter_mut().rev() {
            *slot = (idx % q) as u8;
            idx /= q;
        }
        v
    })
}

/// Number of simplex columns, (q^K - 1)/(q - 1).
pub fn simplex_length(k: usize, bits: u32) -> usize {
    let q = 1usize << bits;
    (q.pow(k as u32) - 1) / (q - 1)
}

/// Simplex code: every nonzero vector of GF(q)^K whose first nonzero entry is 1,
/// in lexicographic column order.
pub fn simplex_generator(k: usize, field: &FieldSpec) -> Result<GeneratorMatrix> {
    if k == 0 {
        return Err(Error::Construction("simplex needs K >= 1".into()));
    }
    check_columns(simplex_length_checked(k, field.bits()))?;
    let q = field.order();
    // More leading zeros sort first; within a block the tail runs in lex order.
    let cols: Vec<Vec<u8>> = (0..k)
        .rev()
        .flat_map(|lead| {
            lex_vectors(q, k - lead - 1).map(move |tail| {
                let mut col = vec![0u8; lead];
                col.push(1);
                col.extend(tail);
                col
            })
        })
        .collect();
    Ok(GeneratorMatrix::from_columns(field, k, &cols))
}

/// Largest generator the built-in families will materialize.
pub const MAX_FAMILY_COLUMNS: usize = 1 << 20;

fn simplex_length_checked(k: usize, bits: u32) -> Option<usize> {
    let q = 1usize << bits;
    q.checked_pow(k as u32).map(|p| (p - 1) / (q - 1))
}

fn check_columns(n: Option<usize>) -> Result<()> {
    match n {
        Some(n) if n <= MAX_FAMILY_COLUMNS => Ok(()),
        _ => Err(Error::Construction(format!(
            "family would need more than {MAX_FAMILY_COLUMNS} columns"
        ))),
    }
}

/// First-order Reed-Muller code: a leading 1 on top of every vector of GF(q)^(K-1).
pub fn rm1_generator(k: usize, field: &FieldSpec) -> Result<GeneratorMatrix> {
    if k < 2 {
        return Err(Error::Construction("first-order Reed-Muller needs K >= 2".into()));
    }
    check_columns((1usize << field.bits()).checked_pow(k as u32 - 1))?;
    let cols: Vec<Vec<u8>> = lex_vectors(field.order(), k - 1)
        .map(|tail| {
            let mut col = Vec::with_capacity(k);
            col.push(1);
            col.extend(tail);
            col
        })
        .collect();
    Ok(GeneratorMatrix::from_columns(field, k, &cols))
}

/// Shortened concatenated repetition-simplex code of length N: the simplex
/// generator tiled `ceil(N / N_out)` times, keeping the first N columns.
pub fn scrs_generator(n: usize, k: usize, field: &FieldSpec) -> Result<GeneratorMatrix> {
    if n < k {
        return Err(Error::Construction(format!(
            "SCRS needs N >= K (N = {n}, K = {k})"
        )));
    }
    let simplex = simplex_generator(k, field)?;
    let n_out = simplex.n();
    let cols: Vec<Vec<u8>> = (0..n).map(|i| simplex.column(i % n_out)).collect();
    Ok(GeneratorMatrix::from_columns(field, k, &cols))
}

/// Per-node "uncoded" rule: node i forwards message symbol `i mod K`.
/// For QPSK with B = 1 and N = 3 this is the naive scheme `[[1,0,1],[0,1,0]]`.
pub fn naive_generator(n: usize, k: usize, field: &FieldSpec) -> Result<GeneratorMatrix> {
    if n == 0 || k == 0 {
        return Err(Error::Construction("naive scheme needs N, K >= 1".into()));
    }
    let cols: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let mut c = vec![0u8; k];
            c[i % k] = 1;
            c
        })
        .collect();
    Ok(GeneratorMatrix::from_columns(field, k, &cols))
}

/// Number of columns of the SCRS tiling before shortening, `(N_out, N_in)`.
pub fn scrs_tiling(n: usize, k: usize, bits: u32) -> (usize, usize) {
    let n_out = simplex_length(k, bits);
    (n_out, n.div_ceil(n_out))
}

/// An enumerated codeword set, one codeword per message/constellation point.
#[derive(Clone, Debug)]
pub struct Code {
    field: FieldSpec,
    n: usize,
    /// Row-major M x N.
    codewords: Vec<u8>,
    d_min: usize,
    generator: Option<GeneratorMatrix>,
}

impl Code {
    /// Build a (possibly non-linear) code from explicit codewords; d_min is the
    /// full pairwise minimum.
    pub fn from_codewords(field: &FieldSpec, rows: &[Vec<u8>]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Construction("a code needs at least two codewords".into()));
        }
        let n = rows[0].len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Construction("codewords must share a nonzero length".into()));
        }
        let codewords: Vec<u8> = rows.concat();
        if codewords.iter().any(|&v| v as usize >= field.order()) {
            return Err(Error::Construction("codeword symbol outside the field".into()));
        }
        let mut code = Self {
            field: field.clone(),
            n,
            codewords,
            d_min: 0,
            generator: None,
        };
        code.d_min = pairwise_min_distance(&code);
        Ok(code)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of codewords M.
    pub fn len(&self) -> usize {
        self.codewords.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn codeword(&self, m: usize) -> &[u8] {
        &self.codewords[m * self.n..(m + 1) * self.n]
    }

    pub fn codeword_vector(&self, m: usize) -> GfVector {
        GfVector::new(&self.field, self.codeword(m).to_vec()).expect("validated")
    }

    pub fn codewords(&self) -> impl Iterator<Item = &[u8]> {
        self.codewords.chunks_exact(self.n)
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    pub fn generator(&self) -> Option<&GeneratorMatrix> {
        self.generator.as_ref()
    }

    pub fn is_linear(&self) -> bool {
        self.generator.is_some()
    }

    /// Code restricted to a subset of positions (used by subset ML).
    pub fn punctured(&self, positions: &[usize]) -> Vec<Vec<u8>> {
        self.codewords()
            .map(|c| positions.iter().map(|&p| c[p]).collect())
            .collect()
    }
}

/// Encode every message `a` in GF(q)^K as `a G`.
pub fn build_code(g: &GeneratorMatrix) -> Result<Code> {
    let kb = g.k() as u32 * g.field().bits();
    if kb > MAX_ENUMERATION_BITS {
        return Err(Error::EnumerationTooLarge(kb));
    }
    let q = g.field().order();
    let mut codewords = Vec::with_capacity(q.pow(g.k() as u32) * g.n());
    for msg in lex_vectors(q, g.k()) {
        codewords.extend(g.encode(&msg));
    }
    let mut code = Code {
        field: g.field().clone(),
        n: g.n(),
        codewords,
        d_min: 0,
        generator: Some(g.clone()),
    };
    code.d_min = min_weight_distance(&code);
    Ok(code)
}

/// Minimum distance of an enumerated code. Linear codes use the minimum
/// nonzero-message weight; others the full pairwise minimum.
pub fn min_distance(code: &Code) -> usize {
    code.d_min
}

/// Minimum weight over codewords of nonzero messages. Only meaningful for
/// linear codes, where codeword 0 is the all-zero word.
pub fn min_weight_distance(code: &Code) -> usize {
    code.codewords()
        .skip(1)
        .map(|c| c.iter().filter(|&&v| v != 0).count())
        .min()
        .unwrap_or(0)
}

/// Minimum Hamming distance over all pairs of distinct codewords.
pub fn pairwise_min_distance(code: &Code) -> usize {
    let m = code.len();
    let mut best = usize::MAX;
    for i in 0..m {
        for j in i + 1..m {
            best = best.min(symbol_distance(code.codeword(i), code.codeword(j)));
        }
    }
    if best == usize::MAX {
        0
    } else {
        best
    }
}

fn pow2(exp: u64) -> Option<u64> {
    1u64.checked_shl(exp as u32).filter(|_| exp < 64)
}

/// Griesmer length `sum_{i<K} ceil(d / 2^{iB})`.
pub fn griesmer_min_length(k: usize, bits: u32, d: u64) -> u64 {
    (0..k as u64)
        .map(|i| match pow2(i * bits as u64) {
            Some(p) => d.div_ceil(p),
            None => u64::from(d > 0),
        })
        .sum()
}

/// Largest d whose Griesmer length fits in N.
pub fn griesmer_max_distance(k: usize, bits: u32, n: u64) -> u64 {
    // griesmer_min_length is increasing in d and >= d, so d <= N.
    let mut lo = 0;
    let mut hi = n;
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if griesmer_min_length(k, bits, mid) <= n {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// q-ary metric ball volume `V(N, t) = sum_{i<=t} C(N, i) (q-1)^i`.
pub fn ball_volume(n: u64, t: i64, bits: u32) -> BigUint {
    if t < 0 {
        return BigUint::from(0u32);
    }
    let q1 = BigUint::from((1u64 << bits) - 1);
    let mut total = BigUint::from(0u32);
    let mut binom = BigUint::from(1u32);
    let mut pw = BigUint::from(1u32);
    for i in 0..=(t as u64).min(n) {
        if i > 0 {
            binom = binom * (n - i + 1) / i;
            pw *= &q1;
        }
        total += &binom * &pw;
    }
    total
}

/// Griesmer, average-weight and metric-ball bound evaluation for a (K, B, d, N) tuple.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub k: usize,
    pub bits: u32,
    pub n: u64,
    pub d: u64,
    /// `sum_{i<K} ceil(d / 2^{iB})`.
    pub griesmer_min_length: u64,
    /// N equals the Griesmer length for d.
    pub griesmer_equality: bool,
    /// Largest distance the Griesmer bound allows at this N.
    pub griesmer_max_d: u64,
    /// d equals `griesmer_max_d`.
    pub attains_griesmer_max: bool,
    /// `N q^{K-1} / (1 + q + ... + q^{K-1})`, an upper bound on d at this N.
    #[serde(serialize_with = "ser_ratio")]
    pub dmin_upper_bound: Ratio<u64>,
    /// `M V(N, floor((d-1)/2)) <= q^N`.
    pub sphere_packing_ok: bool,
    /// Same test with the right-hand side written as `2^N`.
    pub sphere_packing_ok_binary_rhs: bool,
    /// `M V(N-1, d-2) <= q^N`: a linear code with distance d exists.
    pub gilbert_varshamov_exists: bool,
    /// Same test with the right-hand side written as `2^N`.
    pub gilbert_varshamov_binary_rhs: bool,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

pub fn griesmer_report(k: usize, bits: u32, d: u64, n: u64) -> BoundReport {
    let q = 1u64 << bits;
    let min_len = griesmer_min_length(k, bits, d);
    let max_d = griesmer_max_distance(k, bits, n);
    // 1 + q + ... + q^{K-1} and q^{K-1}; saturate for absurdly large K*B.
    let mut geo: u64 = 0;
    let mut top: u64 = 1;
    for i in 0..k {
        if i > 0 {
            top = top.saturating_mul(q);
        }
        geo = geo.saturating_add(top);
    }
    let upper = Ratio::new(n.saturating_mul(top), geo);

    let m = BigUint::from(1u32) << (k as u64 * bits as u64);
    let q_pow_n = BigUint::from(1u32) << (n * bits as u64);
    let two_pow_n = BigUint::from(1u32) << n;
    let packing_lhs = &m * ball_volume(n, (d as i64 - 1).div_euclid(2), bits);
    let gv_lhs = &m * ball_volume(n.saturating_sub(1), d as i64 - 2, bits);
    BoundReport {
        k,
        bits,
        n,
        d,
        griesmer_min_length: min_len,
        griesmer_equality: min_len == n,
        griesmer_max_d: max_d,
        attains_griesmer_max: d == max_d,
        dmin_upper_bound: upper,
        sphere_packing_ok: packing_lhs <= q_pow_n,
        sphere_packing_ok_binary_rhs: packing_lhs <= two_pow_n,
        gilbert_varshamov_exists: gv_lhs <= q_pow_n,
        gilbert_varshamov_binary_rhs: gv_lhs <= two_pow_n,
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: [(&str, String); 11] = [
            ("K B N d", format!("{} {} {} {}", self.k, self.bits, self.n, self.d)),
            ("griesmer_min_length", self.griesmer_min_length.to_string()),
            ("griesmer_equality", self.griesmer_equality.to_string()),
            ("griesmer_max_d_at_N", self.griesmer_max_d.to_string()),
            ("attains_griesmer_max", self.attains_griesmer_max.to_string()),
            (
                "dmin_upper_bound",
                format!(
                    "{}/{} ({:.4})",
                    self.dmin_upper_bound.numer(),
                    self.dmin_upper_bound.denom(),
                    *self.dmin_upper_bound.numer() as f64 / *self.dmin_upper_bound.denom() as f64
                ),
            ),
            ("sphere_packing_ok (q^N)", self.sphere_packing_ok.to_string()),
            ("sphere_packing_ok (2^N)", self.sphere_packing_ok_binary_rhs.to_string()),
            ("gilbert_varshamov (q^N)", self.gilbert_varshamov_exists.to_string()),
            ("gilbert_varshamov (2^N)", self.gilbert_varshamov_binary_rhs.to_string()),
            ("", String::new()),
        ];
        for (name, value) in rows.iter().filter(|r| !r.0.is_empty()) {
            writeln!(f, "{name:<26}{value}")?;
        }
        Ok(())
    }
}

/// Closed-form SCRS minimum distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScrsDistance {
    pub value: u64,
    /// True when `value` is the exact d_min (K = 2), false for the floor lower bound.
    pub exact: bool,
    /// `alpha 2^B + r - 1` as literally stated for K = 2 (differs from `value` at r = 0).
    pub literal_k2: Option<i64>,
}

/// SCRS distance: for K = 2, `alpha 2^B + r - 1` with `N = alpha (2^B + 1) + r`
/// (and `alpha 2^B` when r = 0); otherwise the lower bound
/// `floor(N (2^B - 1)/(2^{KB} - 1)) 2^{(K-1)B}`.
pub fn scrs_dmin_formula(n: usize, k: usize, bits: u32) -> ScrsDistance {
    let q = 1u64 << bits;
    if k == 2 {
        let n_out = q + 1;
        let alpha = n as u64 / n_out;
        let r = n as u64 % n_out;
        let literal = (alpha * q + r) as i64 - 1;
        let value = if r == 0 { alpha * q } else { alpha * q + r - 1 };
        ScrsDistance {
            value,
            exact: true,
            literal_k2: Some(literal),
        }
    } else {
        let n_out = simplex_length(k, bits) as u64;
        ScrsDistance {
            value: (n as u64 / n_out) * q.pow(k as u32 - 1),
            exact: false,
            literal_k2: None,
        }
    }
}
