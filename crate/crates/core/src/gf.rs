//! Arithmetic in GF(2^B) for 1 <= B <= 8, plus fixed-length vectors over it.
//!
//! Elements are stored as their integer representation (`u8`); addition is XOR
//! and multiplication goes through log/antilog tables built once when the
//! [`FieldSpec`] is constructed. `FieldSpec` is cheap to clone (the tables live
//! behind an `Arc`) and immutable, so it can be shared freely across workers.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported number of bits per field symbol.
pub const MAX_BITS: u32 = 8;

/// Default primitive polynomial (bitmask including the leading term) for each `B`.
pub fn default_primitive_polynomial(bits: u32) -> Option<u32> {
    Some(match bits {
        1 => 0b11,         // x + 1
        2 => 0b111,        // x^2 + x + 1
        3 => 0b1011,       // x^3 + x + 1
        4 => 0b1_0011,     // x^4 + x + 1
        5 => 0b10_0101,    // x^5 + x^2 + 1
        6 => 0b100_0011,   // x^6 + x + 1
        7 => 0b1000_1001,  // x^7 + x^3 + 1
        8 => 0b1_0001_1101, // x^8 + x^4 + x^3 + x^2 + 1
        _ => return None,
    })
}

struct Tables {
    bits: u32,
    poly: u32,
    /// exp[i] = x^i, doubled in length so `exp[log a + log b]` needs no reduction.
    exp: Vec<u8>,
    /// log[a] for a != 0; log[0] is unused.
    log: Vec<u16>,
}

/// A concrete field GF(2^B) defined by a primitive polynomial.
#[derive(Clone)]
pub struct FieldSpec {
    tables: Arc<Tables>,
}

impl FieldSpec {
    /// Field with the default primitive polynomial for `bits`.
    pub fn new(bits: u32) -> Result<Self> {
        let poly = default_primitive_polynomial(bits)
            .ok_or_else(|| Error::InvalidField(format!("B = {bits} outside 1..={MAX_BITS}")))?;
        Self::with_polynomial(bits, poly)
    }

    /// Field with an explicit polynomial; the polynomial must have degree `bits`
    /// and be primitive (x must have multiplicative order 2^B - 1).
    pub fn with_polynomial(bits: u32, poly: u32) -> Result<Self> {
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::InvalidField(format!("B = {bits} outside 1..={MAX_BITS}")));
        }
        if poly >> bits != 1 {
            return Err(Error::InvalidField(format!(
                "polynomial {poly:#b} does not have degree {bits}"
            )));
        }
        let order = (1usize << bits) - 1;
        let mut exp = vec![0u8; 2 * order + 1];
        let mut log = vec![0u16; order + 1];
        let mut x: u32 = 1;
        for (i, slot) in exp.iter_mut().enumerate().take(order) {
            if i > 0 && x == 1 {
                return Err(Error::InvalidField(format!(
                    "polynomial {poly:#b} is not primitive: x has order {i}"
                )));
            }
            *slot = x as u8;
            log[x as usize] = i as u16;
            x <<= 1;
            if x >> bits != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::InvalidField(format!(
                "polynomial {poly:#b} is not primitive over GF(2)"
            )));
        }
        for i in order..exp.len() {
            exp[i] = exp[i - order];
        }
        Ok(Self {
            tables: Arc::new(Tables { bits, poly, exp, log }),
        })
    }

    pub fn bits(&self) -> u32 {
        self.tables.bits
    }

    pub fn polynomial(&self) -> u32 {
        self.tables.poly
    }

    /// Field order q = 2^B.
    pub fn order(&self) -> usize {
        1 << self.tables.bits
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &self.tables;
        t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u8) -> Option<u8> {
        if a == 0 {
            return None;
        }
        let t = &self.tables;
        let order = self.order() - 1;
        Some(t.exp[(order - t.log[a as usize] as usize) % order])
    }

    /// Dot product of two raw symbol slices of equal length.
    #[inline]
    pub fn dot(&self, a: &[u8], g: &[u8]) -> u8 {
        a.iter().zip(g).fold(0u8, |acc, (&x, &y)| acc ^ self.mul(x, y))
    }

    pub fn element(&self, value: u8) -> Result<GfElement> {
        if (value as usize) >= self.order() {
            return Err(Error::InvalidField(format!(
                "value {value} not in GF({})",
                self.order()
            )));
        }
        Ok(GfElement {
            value,
            field: self.clone(),
        })
    }

    pub fn vector(&self, values: &[u8]) -> Result<GfVector> {
        GfVector::new(self, values.to_vec())
    }

    fn contains(&self, value: u8) -> bool {
        (value as usize) < self.order()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.bits() == other.bits() && self.polynomial() == other.polynomial()
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}; poly={:#b})", self.bits(), self.polynomial())
    }
}

/// A single field element tagged with its field.
#[derive(Clone, PartialEq, Eq)]
pub struct GfElement {
    value: u8,
    field: FieldSpec,
}

impl GfElement {
    pub fn value(&self) -> u8 {
        self.value
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
}

impl fmt::Debug for GfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn check_same(a: &FieldSpec, b: &FieldSpec) -> Result<()> {
    if a != b {
        return Err(Error::FieldMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

pub fn gf_add(a: &GfElement, b: &GfElement) -> Result<GfElement> {
    check_same(&a.field, &b.field)?;
    Ok(GfElement {
        value: a.value ^ b.value,
        field: a.field.clone(),
    })
}

pub fn gf_mul(a: &GfElement, b: &GfElement) -> Result<GfElement> {
    check_same(&a.field, &b.field)?;
    Ok(GfElement {
        value: a.field.mul(a.value, b.value),
        field: a.field.clone(),
    })
}

/// A vector over GF(2^B); all entries share one field.
#[derive(Clone, PartialEq, Eq)]
pub struct GfVector {
    values: Vec<u8>,
    field: FieldSpec,
}

impl GfVector {
    pub fn new(field: &FieldSpec, values: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|&&v| !field.contains(v)) {
            return Err(Error::InvalidField(format!(
                "value {bad} not in GF({})",
                field.order()
            )));
        }
        Ok(Self {
            values,
            field: field.clone(),
        })
    }

    pub fn zeros(field: &FieldSpec, len: usize) -> Self {
        Self {
            values: vec![0; len],
            field: field.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn get(&self, i: usize) -> Option<GfElement> {
        self.values.get(i).map(|&value| GfElement {
            value,
            field: self.field.clone(),
        })
    }

    /// Hamming weight (number of nonzero symbols).
    pub fn weight(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }
}

impl fmt::Debug for GfVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.values).finish()
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// Inner product `a g^T` over the field: the node rule `u = a g^T`.
pub fn gf_dot(a: &GfVector, g: &GfVector) -> Result<GfElement> {
    check_same(&a.field, &g.field)?;
    check_lengths(a.len(), g.len())?;
    Ok(GfElement {
        value: a.field.dot(&a.values, &g.values),
        field: a.field.clone(),
    })
}

/// Symbol-level Hamming distance.
pub fn hamming_distance(u: &GfVector, v: &GfVector) -> Result<usize> {
    check_lengths(u.len(), v.len())?;
    Ok(symbol_distance(&u.values, &v.values))
}

#[inline]
pub(crate) fn symbol_distance(u: &[u8], v: &[u8]) -> usize {
    u.iter().zip(v).filter(|(a, b)| a != b).count()
}
