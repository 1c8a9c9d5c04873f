use flatlab_arith::cyclotomic::CycloField;
use flatlab_arith::{circumference_field, matheus_yoccoz_check, trace_field_degree, MinPoly, QPoly};
use flatlab_core::{build_regular_2ngon, horizontal_decomposition, Origami};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn trace_field_degrees() {
    let got: Vec<usize> = (5..=12).map(|n| trace_field_degree(n).unwrap().degree).collect();
    assert_eq!(got, vec![2, 2, 3, 4, 3, 4, 5, 4]);
    for n in 4..=12 {
        let r = trace_field_degree(n).unwrap();
        assert_eq!(r.field_degree, r.degree);
        assert!(r.minimal_polynomial_exact);
        assert!((r.alpha - 1.0 - 2.0 * (std::f64::consts::PI / n as f64).cos()).abs() < 1e-12);
    }
    let six = trace_field_degree(6).unwrap();
    assert!(six.discrepancy && six.claimed_lower_bound == Some(3));
    assert!(!trace_field_degree(7).unwrap().discrepancy);
    assert!(!trace_field_degree(5).unwrap().discrepancy);
    assert!(trace_field_degree(3).is_err());
}

#[test]
fn matheus_yoccoz_powers_are_trivial() {
    for m in [5, 7, 9, 11] {
        let r = matheus_yoccoz_check(m).unwrap();
        assert_eq!(r.roots.len(), m - 1);
        assert!(r.roots.iter().all(|x| x.t_power_identity && x.s_power_identity && x.first_powers_nontrivial));
        assert!(r.trace_matches && r.hyperbolic && r.passed, "m = {m}");
        assert!((r.trace_value - r.trace_expected).abs() < 1e-12);
    }
    let nine = matheus_yoccoz_check(9).unwrap();
    assert!(nine.roots.iter().any(|x| x.order == 3));
    assert!(matheus_yoccoz_check(6).is_err());
    assert!(matheus_yoccoz_check(3).is_err());
}

fn coeffs(m: &MinPoly) -> Vec<i64> {
    match m {
        MinPoly::Found { coeffs, .. } => coeffs.clone(),
        MinPoly::Unresolved { .. } => panic!("unresolved"),
    }
}

#[test]
fn decagon_ratio_field() {
    let d = horizontal_decomposition(&build_regular_2ngon(5).unwrap()).unwrap();
    let f = circumference_field(&d).unwrap();
    assert_eq!(f.degree, Some(2));
    let c = coeffs(&f.circumference_ratios[0].minimal_polynomial);
    // larger over smaller is φ, smaller over larger is φ - 1
    assert!(c == vec![-1, -1, 1] || c == vec![-1, 1, 1], "{c:?}");
    assert!(f.saddle_ratios.iter().any(|r| coeffs(&r.minimal_polynomial) == vec![1, -3, 1]));
}

#[test]
fn fourteen_gon_ratio_field() {
    let d = horizontal_decomposition(&build_regular_2ngon(7).unwrap()).unwrap();
    let f = circumference_field(&d).unwrap();
    assert_eq!(f.degree, Some(trace_field_degree(7).unwrap().degree));
}

#[test]
fn origami_ratio_fields_are_rational() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut done = 0;
    while done < 50 {
        let n = rng.gen_range(2..=8);
        let mut h: Vec<usize> = (0..n).collect();
        let mut v = h.clone();
        h.shuffle(&mut rng);
        v.shuffle(&mut rng);
        let Ok(o) = Origami::new(h, v) else { continue };
        let d = horizontal_decomposition(&o.to_surface()).unwrap();
        if d.len() < 2 {
            continue;
        }
        let f = circumference_field(&d).unwrap();
        assert_eq!(f.degree, Some(1));
        assert!(f.circumference_ratios.iter().all(|r| r.minimal_polynomial.degree() == Some(1)));
        done += 1;
    }
}

#[test]
fn single_cylinder_is_rejected() {
    let d = horizontal_decomposition(&Origami::torus().to_surface()).unwrap();
    assert!(circumference_field(&d).is_err());
}

fn elem() -> impl Strategy<Value = QPoly> {
    prop::collection::vec(-20i64..20, 0..8).prop_map(|c| QPoly::from_ints(&c))
}

proptest! {
    #[test]
    fn cyclotomic_ring_laws(a in elem(), b in elem(), c in elem(), m in prop::sample::select(vec![5usize, 7, 9, 12])) {
        let f = CycloField::new(m);
        let (a, b, c) = (f.elem(a), f.elem(b), f.elem(c));
        prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
        prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
        prop_assert_eq!(f.conj(&f.mul(&a, &b)), f.mul(&f.conj(&a), &f.conj(&b)));
    }
}
