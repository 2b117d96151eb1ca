//! Field arithmetic and code-family examples through the public API.

use codiv::codes::{
    build_code, griesmer_min_length, griesmer_report, min_distance, naive_generator, pairwise_min_distance,
    rm1_generator, scrs_dmin_formula, scrs_generator, simplex_generator, Code, GeneratorMatrix,
};
use codiv::fusion::CodewordSetMatrix;
use codiv::gf::{gf_add, gf_dot, gf_mul, hamming_distance, FieldSpec};
use proptest::prelude::*;

fn gf(b: u32) -> FieldSpec {
    FieldSpec::new(b).unwrap()
}

#[test]
fn addition_is_xor() {
    let f1 = gf(1);
    let one = f1.element(1).unwrap();
    assert_eq!(gf_add(&one, &one).unwrap().value(), 0);
    let f2 = gf(2);
    let s = gf_add(&f2.element(2).unwrap(), &f2.element(3).unwrap()).unwrap();
    assert_eq!(s.value(), 1);
    for a in 0..4 {
        assert_eq!(f2.add(a, 0), a);
    }
}

#[test]
fn gf4_multiplication() {
    let f = FieldSpec::with_polynomial(2, 0b111).unwrap();
    assert_eq!(gf_mul(&f.element(2).unwrap(), &f.element(2).unwrap()).unwrap().value(), 3);
    for b in 1..=8 {
        let f = gf(b);
        for a in 0..f.order() as u16 {
            assert_eq!(f.mul(a as u8, 1), a as u8);
            assert_eq!(f.mul(a as u8, 0), 0);
        }
    }
}

#[test]
fn mixed_fields_are_rejected() {
    let a = gf(1).element(1).unwrap();
    let b = gf(2).element(1).unwrap();
    assert!(gf_add(&a, &b).is_err());
    assert!(gf_mul(&a, &b).is_err());
}

#[test]
fn dot_products() {
    let f = gf(1);
    let g = f.vector(&[1, 1]).unwrap();
    assert_eq!(gf_dot(&f.vector(&[1, 0]).unwrap(), &g).unwrap().value(), 1);
    assert_eq!(gf_dot(&f.vector(&[1, 1]).unwrap(), &g).unwrap().value(), 0);
    let f = FieldSpec::with_polynomial(2, 0b111).unwrap();
    let v = gf_dot(&f.vector(&[1, 2]).unwrap(), &f.vector(&[1, 3]).unwrap()).unwrap();
    assert_eq!(v.value(), 0);
}

#[test]
fn symbol_hamming_distance() {
    let f = gf(2);
    let u = f.vector(&[0, 1, 2]).unwrap();
    assert_eq!(hamming_distance(&u, &u).unwrap(), 0);
    assert_eq!(hamming_distance(&u, &f.vector(&[0, 3, 2]).unwrap()).unwrap(), 1);
    let f = gf(1);
    let a = f.vector(&[0, 0, 0, 1, 0, 1, 0, 0, 1, 1]).unwrap();
    let b = f.vector(&[1, 0, 0, 0, 0, 0, 0, 1, 0, 1]).unwrap();
    assert_eq!(hamming_distance(&a, &b).unwrap(), 5);
}

proptest! {
    #[test]
    fn field_axioms(b in 1u32..=8, x in any::<u8>(), y in any::<u8>(), z in any::<u8>()) {
        let f = gf(b);
        let mask = (f.order() - 1) as u8;
        let (x, y, z) = (x & mask, y & mask, z & mask);
        prop_assert_eq!(f.mul(x, y), f.mul(y, x));
        prop_assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
        prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
        if x != 0 {
            prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
        }
    }
}

fn columns(g: &GeneratorMatrix) -> Vec<Vec<u8>> {
    let mut cols: Vec<Vec<u8>> = (0..g.n()).map(|c| g.column(c)).collect();
    cols.sort();
    cols
}

#[test]
fn simplex_examples() {
    let g = simplex_generator(2, &gf(1)).unwrap();
    assert_eq!(columns(&g), vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
    assert_eq!(build_code(&g).unwrap().d_min(), 2);
    let g = simplex_generator(3, &gf(1)).unwrap();
    assert_eq!((g.n(), build_code(&g).unwrap().d_min()), (7, 4));
    let g = simplex_generator(2, &gf(2)).unwrap();
    assert_eq!(
        columns(&g),
        vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![1, 2], vec![1, 3]]
    );
    assert_eq!(build_code(&g).unwrap().d_min(), 4);
}

#[test]
fn reed_muller_examples() {
    let g = rm1_generator(2, &gf(1)).unwrap();
    assert_eq!(g.n(), 2);
    assert_eq!(columns(&g), vec![vec![1, 0], vec![1, 1]]);
    assert_eq!(build_code(&g).unwrap().d_min(), 1);
    assert_eq!(build_code(&rm1_generator(3, &gf(1)).unwrap()).unwrap().d_min(), 2);
    let g = rm1_generator(2, &gf(2)).unwrap();
    assert_eq!((g.n(), build_code(&g).unwrap().d_min()), (4, 3));
}

#[test]
fn scrs_examples() {
    let f = gf(1);
    let g = scrs_generator(10, 2, &f).unwrap();
    assert_eq!(build_code(&g).unwrap().d_min(), 6);
    // Tiles repeat the simplex generator column for column.
    let s = simplex_generator(2, &f).unwrap();
    for c in 0..10 {
        assert_eq!(g.column(c), s.column(c % 3));
    }
    assert_eq!(scrs_generator(3, 2, &f).unwrap(), s);
    assert_eq!(build_code(&scrs_generator(9, 2, &f).unwrap()).unwrap().d_min(), 6);
    assert!(scrs_generator(1, 2, &f).is_err());
}

#[test]
fn codeword_enumeration() {
    let code = build_code(&simplex_generator(2, &gf(1)).unwrap()).unwrap();
    let mut words: Vec<Vec<u8>> = code.codewords().map(|w| w.to_vec()).collect();
    words.sort();
    assert_eq!(words, vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
    let naive = GeneratorMatrix::from_rows(&gf(1), &[vec![1, 0, 1], vec![0, 1, 0]]).unwrap();
    let code = build_code(&naive).unwrap();
    assert_eq!(code.d_min(), 1);
    assert_eq!(code.codeword(1), &[0, 1, 0]);
    let wide = GeneratorMatrix::from_rows(&gf(8), &vec![vec![1u8; 5]; 4]).unwrap();
    assert!(build_code(&wide).is_err());
    assert!(simplex_generator(4, &gf(8)).is_err());
}

#[test]
fn distances_of_named_codes() {
    let f = gf(1);
    assert_eq!(min_distance(&build_code(&simplex_generator(2, &f).unwrap()).unwrap()), 2);
    assert_eq!(min_distance(&build_code(&scrs_generator(10, 2, &f).unwrap()).unwrap()), 6);
    let set = CodewordSetMatrix::prior_art_qpsk_n10();
    let rows: Vec<Vec<u8>> = (0..4).map(|r| set.row_bits(r)).collect();
    let code = Code::from_codewords(&f, &rows).unwrap();
    assert!(!code.is_linear());
    assert_eq!(min_distance(&code), 5);
}

#[test]
fn naive_family_repeats_unit_vectors() {
    let g = naive_generator(5, 2, &gf(1)).unwrap();
    for c in 0..5 {
        let mut e = vec![0, 0];
        e[c % 2] = 1;
        assert_eq!(g.column(c), e);
    }
}

#[test]
fn griesmer_examples() {
    assert_eq!(griesmer_min_length(2, 1, 6), 9);
    for (k, b) in [(2, 1), (3, 1), (2, 2), (3, 2)] {
        let q = 1u64 << b;
        let n = (q.pow(k as u32) - 1) / (q - 1);
        assert!(griesmer_report(k, b, q.pow(k as u32 - 1), n).griesmer_equality);
    }
    for alpha in 1..10u64 {
        assert!(griesmer_report(2, 1, 2 * alpha + 1, 3 * alpha + 2).griesmer_equality);
    }
    let rep = griesmer_report(2, 1, 6, 10);
    assert!(!rep.griesmer_equality);
    assert!(rep.attains_griesmer_max);
    assert_eq!(rep.griesmer_max_d, 6);
}

#[test]
fn scrs_formula_examples() {
    assert_eq!(scrs_dmin_formula(10, 2, 1).value, 6);
    assert_eq!(scrs_dmin_formula(11, 2, 1).value, 7);
    let r0 = scrs_dmin_formula(9, 2, 1);
    assert_eq!(r0.value, 6);
    assert_eq!(r0.literal_k2, Some(5));
    let f = gf(1);
    for n in [9, 10, 11] {
        let code = build_code(&scrs_generator(n, 2, &f).unwrap()).unwrap();
        assert_eq!(pairwise_min_distance(&code) as u64, scrs_dmin_formula(n, 2, 1).value);
    }
}

#[test]
fn scrs_lower_bound_holds_for_k3() {
    let f = gf(1);
    for n in 3..=20 {
        let code = build_code(&scrs_generator(n, 3, &f).unwrap()).unwrap();
        assert!(code.d_min() as u64 >= scrs_dmin_formula(n, 3, 1).value, "N={n}");
    }
}

#[test]
fn generator_text_round_trip() {
    let g = scrs_generator(7, 2, &gf(2)).unwrap();
    assert_eq!(GeneratorMatrix::from_text(&g.to_text()).unwrap(), g);
}
