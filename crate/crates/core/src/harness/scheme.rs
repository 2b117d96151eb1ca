use crate::codes::{
    build_code, naive_generator, rm1_generator, scrs_generator, simplex_generator, Code, GeneratorMatrix,
};
use crate::error::{Error, Result};
use crate::fusion::{qpsk_listing_rows, CodewordSetMatrix, SubsetPlan};
use crate::gf::FieldSpec;
use crate::sigmap::{make_constellation, Constellation, ConstellationKind, NodeRule};

use super::config::{ExperimentConfig, Family};

/// A complete node-side design: constellation shape, per-node decision maps and
/// the code they induce at the fusion center.
#[derive(Clone, Debug)]
pub struct Scheme {
    pub family: Family,
    /// Unit-energy constellation; rescaled per SNR point.
    pub constellation: Constellation,
    pub field: FieldSpec,
    pub code: Code,
    /// `maps[i][m]`: output of node i when it detects point m.
    pub maps: Vec<Vec<u8>>,
    pub plan: SubsetPlan,
}

impl Scheme {
    /// Linear scheme from a generator matrix.
    pub fn linear(family: Family, constellation: Constellation, g: &GeneratorMatrix) -> Result<Self> {
        let bits = g.k() as u32 * g.field().bits();
        if bits != constellation.bits_per_symbol() {
            return Err(Error::LengthMismatch {
                expected: constellation.bits_per_symbol() as usize,
                found: bits as usize,
            });
        }
        let code = build_code(g)?;
        let maps = (0..g.n())
            .map(|i| NodeRule::new(g.column_vector(i)).output_map(constellation.order()))
            .collect();
        Ok(Self {
            family,
            field: g.field().clone(),
            plan: SubsetPlan::from_generator(g),
            constellation,
            code,
            maps,
        })
    }

    /// Non-linear codeword-set scheme; QPSK points are assigned rows in the
    /// listing order `(1+j), (1-j), (-1+j), (-1-j)`.
    pub fn codeword_set(constellation: Constellation, matrix: &CodewordSetMatrix) -> Result<Self> {
        let rows = if constellation.order() == 4 {
            qpsk_listing_rows(&constellation)?
        } else {
            (0..constellation.order()).collect()
        };
        if matrix.rows() != constellation.order() {
            return Err(Error::LengthMismatch {
                expected: constellation.order(),
                found: matrix.rows(),
            });
        }
        let maps = matrix.node_maps(&rows)?;
        let code = matrix.to_code(&rows)?;
        Ok(Self {
            family: Family::CodewordSet,
            field: code.field().clone(),
            plan: SubsetPlan::from_node_maps(&maps),
            constellation,
            code,
            maps,
        })
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let kind = cfg.kind()?;
        let constellation = match kind {
            ConstellationKind::Custom => {
                Constellation::custom(cfg.custom_points.as_deref().unwrap_or_default(), 1.0)?
            }
            _ => make_constellation(kind, cfg.order().expect("validated"), 1.0)?,
        };
        let field = match cfg.code.polynomial {
            Some(p) => FieldSpec::with_polynomial(cfg.b, p)?,
            None => FieldSpec::new(cfg.b)?,
        };
        let k = cfg.message_len().expect("validated");
        let family = cfg.family();
        let g = match family {
            Family::Simplex => simplex_generator(k, &field)?,
            Family::Rm1 => rm1_generator(k, &field)?,
            Family::Scrs => scrs_generator(cfg.n.expect("validated"), k, &field)?,
            Family::Naive => naive_generator(cfg.n.expect("validated"), k, &field)?,
            Family::Custom => GeneratorMatrix::from_rows(&field, cfg.code.matrix.as_deref().expect("validated"))?,
            Family::CodewordSet => {
                let matrix = match &cfg.code.columns {
                    Some(cols) => CodewordSetMatrix::new(constellation.order(), cols.clone())?,
                    None => CodewordSetMatrix::prior_art_qpsk_n10(),
                };
                return Self::codeword_set(constellation, &matrix);
            }
        };
        Self::linear(family, constellation, &g)
    }

    pub fn n(&self) -> usize {
        self.maps.len()
    }

    pub fn symbols(&self) -> usize {
        self.constellation.order()
    }

    pub fn outputs(&self) -> usize {
        self.field.order()
    }

    pub fn d_min(&self) -> usize {
        self.code.d_min()
    }

    pub fn generator(&self) -> Option<&GeneratorMatrix> {
        self.code.generator()
    }

    /// Same scheme with nodes reordered: node `j` of the result is node `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let maps: Vec<Vec<u8>> = perm.iter().map(|&i| self.maps[i].clone()).collect();
        let words: Vec<Vec<u8>> = self
            .code
            .codewords()
            .map(|c| perm.iter().map(|&i| c[i]).collect())
            .collect();
        let code = match self.code.generator() {
            Some(g) => {
                let rows: Vec<Vec<u8>> = (0..g.k())
                    .map(|r| perm.iter().map(|&i| g.get(r, i)).collect())
                    .collect();
                build_code(&GeneratorMatrix::from_rows(&self.field, &rows)?)?
            }
            None => Code::from_codewords(&self.field, &words)?,
        };
        Ok(Self {
            family: self.family,
            constellation: self.constellation.clone(),
            field: self.field.clone(),
            plan: SubsetPlan::from_node_maps(&maps),
            code,
            maps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_agree_with_codewords() {
        for family in [Family::Scrs, Family::Naive, Family::CodewordSet] {
            let cfg = ExperimentConfig::new("qpsk", 1, 10, family);
            let s = Scheme::from_config(&cfg).unwrap();
            for m in 0..s.symbols() {
                for i in 0..s.n() {
                    assert_eq!(s.maps[i][m], s.code.codeword(m)[i]);
                }
            }
        }
        let s = Scheme::from_config(&ExperimentConfig::new("16qam", 2, 12, Family::Scrs)).unwrap();
        assert_eq!(s.outputs(), 4);
        for m in 0..16 {
            for i in 0..12 {
                assert_eq!(s.maps[i][m], s.code.codeword(m)[i]);
            }
        }
    }

    #[test]
    fn codeword_set_distance_and_grouping() {
        let s = Scheme::from_config(&ExperimentConfig::new("qpsk", 1, 10, Family::CodewordSet)).unwrap();
        assert_eq!(s.d_min(), 5);
        let scrs = Scheme::from_config(&ExperimentConfig::new("qpsk", 1, 10, Family::Scrs)).unwrap();
        assert_eq!(scrs.d_min(), 6);
        assert_eq!(scrs.plan.l(), 3);
    }

    #[test]
    fn permutation_keeps_codewords_consistent() {
        let s = Scheme::from_config(&ExperimentConfig::new("qpsk", 1, 5, Family::Scrs)).unwrap();
        let p = s.permuted(&[4, 2, 0, 1, 3]).unwrap();
        assert_eq!(p.d_min(), s.d_min());
        for m in 0..4 {
            for j in 0..5 {
                assert_eq!(p.maps[j][m], p.code.codeword(m)[j]);
            }
        }
    }
}
