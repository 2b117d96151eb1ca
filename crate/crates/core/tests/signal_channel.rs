//! Constellations, node quantizers and transition tables.

use approx::assert_abs_diff_eq;
use codiv::channel::{
    add_noise, analytic_confusion, q_function, sample_channel, sample_cn, transition_table, ChannelModel,
    TransitionMethod,
};
use codiv::gf::FieldSpec;
use codiv::sigmap::{bits_to_gfvec, hard_detect, make_constellation, quantize, ConstellationKind, NodeRule};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn qpsk(rho: f64) -> codiv::sigmap::Constellation {
    make_constellation(ConstellationKind::Qpsk, 4, rho).unwrap()
}

#[test]
fn constellation_points() {
    let c = qpsk(2.0);
    let mut pts: Vec<(i64, i64)> = c.points().iter().map(|p| (p.re.round() as i64, p.im.round() as i64)).collect();
    pts.sort();
    assert_eq!(pts, vec![(-1, -1), (-1, 1), (1, -1), (1, 1)]);
    for p in c.points() {
        assert_abs_diff_eq!(p.norm_sqr(), 2.0, epsilon = 1e-12);
    }
    let b = make_constellation(ConstellationKind::Bpsk, 2, 1.0).unwrap();
    let mut re: Vec<f64> = b.points().iter().map(|p| p.re).collect();
    re.sort_by(f64::total_cmp);
    assert_eq!(re, vec![-1.0, 1.0]);
    let q = make_constellation(ConstellationKind::Qam16, 16, 10.0).unwrap();
    assert_abs_diff_eq!(q.energy(), 10.0, epsilon = 1e-12);
    let inner = q.points().iter().map(|p| p.norm_sqr()).fold(f64::INFINITY, f64::min);
    assert_abs_diff_eq!(inner, 2.0, epsilon = 1e-12);
}

#[test]
fn gray_neighbours_differ_in_one_bit() {
    for (kind, m) in [(ConstellationKind::Psk8, 8), (ConstellationKind::Qam16, 16)] {
        let c = make_constellation(kind, m, 1.0).unwrap();
        let dmin = (0..m)
            .flat_map(|a| (0..m).filter(move |&b| b != a).map(move |b| (a, b)))
            .map(|(a, b)| (c.point(a) - c.point(b)).norm())
            .fold(f64::INFINITY, f64::min);
        for a in 0..m {
            for b in 0..m {
                if a != b && (c.point(a) - c.point(b)).norm() < dmin * 1.001 {
                    let diff = c.label_bits(a).iter().zip(c.label_bits(b)).filter(|(x, y)| **x != *y).count();
                    assert_eq!(diff, 1, "{kind:?} {a} {b}");
                }
            }
        }
    }
}

#[test]
fn bit_grouping() {
    let f1 = FieldSpec::new(1).unwrap();
    assert_eq!(bits_to_gfvec(&[1, 0], &f1).unwrap().values(), &[1, 0]);
    let f2 = FieldSpec::new(2).unwrap();
    assert_eq!(bits_to_gfvec(&[1, 0, 1, 1], &f2).unwrap().values(), &[2, 3]);
    assert_eq!(bits_to_gfvec(&[0; 6], &f2).unwrap().values(), &[0, 0, 0]);
    assert!(bits_to_gfvec(&[1, 0, 1], &f2).is_err());
}

#[test]
fn detection_examples() {
    let c = qpsk(2.0);
    for h in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-0.3, 0.7)] {
        for m in 0..4 {
            assert_eq!(hard_detect(h * c.point(m), h, &c).unwrap(), m);
        }
    }
    let corner = (0..4).find(|&m| c.point(m).re > 0.0 && c.point(m).im > 0.0).unwrap();
    assert_eq!(hard_detect(Complex64::new(10.0, 10.0), Complex64::new(1.0, 0.0), &c).unwrap(), corner);
    assert!(hard_detect(Complex64::new(1.0, 1.0), Complex64::new(0.0, 0.0), &c).is_err());
}

#[test]
fn node_rules_on_qpsk() {
    let c = qpsk(2.0);
    let f = FieldSpec::new(1).unwrap();
    let re = NodeRule::new(f.vector(&[1, 0]).unwrap());
    let im = NodeRule::new(f.vector(&[0, 1]).unwrap());
    let xor = NodeRule::new(f.vector(&[1, 1]).unwrap());
    let h = Complex64::new(0.6, -0.8);
    for (x, y) in [(1.3, 0.2), (-0.4, 2.0), (-1.0, -0.1), (0.7, -0.9)] {
        let eq = Complex64::new(x, y);
        let yv = h * eq;
        let r = quantize(yv, h, &c, &re).unwrap().value();
        let i = quantize(yv, h, &c, &im).unwrap().value();
        let p = quantize(yv, h, &c, &xor).unwrap().value();
        assert_eq!(r, (x >= 0.0) as u8);
        assert_eq!(i, (y >= 0.0) as u8);
        // The XOR rule outputs 0 exactly when both components share a sign.
        assert_eq!(p, r ^ i);
        assert_eq!(p == 0, x * y >= 0.0);
    }
}

#[test]
fn rayleigh_gain_and_noise_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 1_000_000;
    let model = ChannelModel::rayleigh(1);
    let mean_sq: f64 = (0..n).map(|_| sample_channel(&model, &mut rng).unwrap()[0].norm_sqr()).sum::<f64>() / n as f64;
    assert_abs_diff_eq!(mean_sq, 1.0, epsilon = 0.01);
    let x = Complex64::new(0.3, -2.0);
    let (mut sum, mut re2, mut im2, mut cross) = (Complex64::new(0.0, 0.0), 0.0, 0.0, 0.0);
    for _ in 0..n {
        let d = add_noise(x, &mut rng) - x;
        sum += d;
        re2 += d.re * d.re;
        im2 += d.im * d.im;
        cross += d.re * d.im;
    }
    let nf = n as f64;
    assert_abs_diff_eq!(sum.norm() / nf, 0.0, epsilon = 0.01);
    assert_abs_diff_eq!((re2 + im2) / nf, 1.0, epsilon = 0.01);
    assert_abs_diff_eq!(re2 / nf, 0.5, epsilon = 0.01);
    assert_abs_diff_eq!(im2 / nf, 0.5, epsilon = 0.01);
    assert_abs_diff_eq!(cross / nf, 0.0, epsilon = 0.01);
}

#[test]
fn fixed_gains_keep_magnitude() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let model = ChannelModel::fixed_gain(vec![1.5, 0.3, 1.5]);
    for _ in 0..100 {
        let h = sample_channel(&model, &mut rng).unwrap();
        for (hi, g) in h.iter().zip([1.5, 0.3, 1.5]) {
            assert_abs_diff_eq!(hi.norm(), g, epsilon = 1e-12);
        }
    }
}

fn maps(c: &codiv::sigmap::Constellation) -> Vec<Vec<u8>> {
    let f = FieldSpec::new(1).unwrap();
    [[1u8, 0], [0, 1], [1, 1]]
        .iter()
        .map(|g| NodeRule::new(f.vector(g).unwrap()).output_map(c.order()))
        .collect()
}

#[test]
fn analytic_tables_match_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (gain_sq, rho) in [(1.0, 1.0), (0.2, 10.0), (2.5, 3.0)] {
        let c = qpsk(rho);
        let h = Complex64::from_polar(f64::sqrt(gain_sq), 0.4);
        let p = q_function((gain_sq * rho).sqrt());
        let ms = maps(&c);
        for (i, map) in ms.iter().enumerate() {
            let t = transition_table(h, &c, map, 2, TransitionMethod::Analytic, 0, &mut rng).unwrap();
            let wrong = if i < 2 { p } else { 2.0 * p * (1.0 - p) };
            for (m, &right) in map.iter().enumerate() {
                assert_abs_diff_eq!(t.get(m, 1 - right as usize), wrong, epsilon = 1e-12);
                assert_abs_diff_eq!(t.row(m).iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            }
        }
    }
}

#[test]
fn zero_snr_gives_uniform_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let c = qpsk(0.0);
    for map in maps(&c) {
        let t = transition_table(Complex64::new(0.8, 0.1), &c, &map, 2, TransitionMethod::Analytic, 0, &mut rng).unwrap();
        for m in 0..4 {
            for u in 0..2 {
                assert_abs_diff_eq!(t.get(m, u), 0.5, epsilon = 1e-12);
            }
        }
    }
}

#[test]
fn error_probability_shrinks_with_gain() {
    for kind in [ConstellationKind::Qpsk, ConstellationKind::Psk8, ConstellationKind::Qam16] {
        let m = kind.order().unwrap();
        let c = make_constellation(kind, m, 5.0).unwrap();
        let mut last = f64::INFINITY;
        for i in 1..40 {
            let h = Complex64::new(0.1 * i as f64, 0.0);
            let conf = analytic_confusion(h, &c).unwrap();
            let ser: f64 = (0..m).map(|s| 1.0 - conf[s * m + s]).sum::<f64>() / m as f64;
            assert!(ser <= last + 1e-12, "{kind:?} at |h| = {}", h.re);
            last = ser;
        }
    }
}

#[test]
fn monte_carlo_tables_agree_for_other_layouts() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for kind in [ConstellationKind::Psk8, ConstellationKind::Qam16] {
        let m = kind.order().unwrap();
        let c = make_constellation(kind, m, 8.0).unwrap();
        let h = sample_cn(&mut rng);
        let samples = 200_000;
        let exact = analytic_confusion(h, &c).unwrap();
        let mc = codiv::channel::monte_carlo_confusion(h, &c, samples, &mut rng).unwrap();
        for (a, b) in exact.iter().zip(&mc) {
            let sigma = (a * (1.0 - a) / samples as f64).sqrt();
            assert!((a - b).abs() <= 5.0 * sigma + 2.0 / samples as f64, "{kind:?}: {a} vs {b}");
        }
    }
}
