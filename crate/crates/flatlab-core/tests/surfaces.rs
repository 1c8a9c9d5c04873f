mod common;

use flatlab_core::surface::{validate_parts, Diagnostic};
use flatlab_core::{build_regular_2ngon, Edge, Origami, Polygon, Vec2};
use proptest::prelude::*;

#[test]
fn regular_2ngon_strata() {
    for n in 4..=12 {
        let s = build_regular_2ngon(n).unwrap();
        let st = s.stratum().unwrap();
        let expect = if n % 2 == 0 { vec![n as u32 - 2] } else { vec![(n as u32 - 3) / 2; 2] };
        assert_eq!(st.zero_orders, expect, "n = {n}");
        assert_eq!(st.zero_orders.iter().sum::<u32>() + 2, 2 * s.genus());
        assert_eq!(s.genus() as usize, n / 2);
        assert!(s.validate().is_empty());
    }
    assert!(build_regular_2ngon(3).is_err());
}

#[test]
fn decagon_missing_gluing_is_reported() {
    let s = build_regular_2ngon(5).unwrap();
    let mut gl = s.gluings();
    gl.pop();
    let d = validate_parts(s.polygons(), &gl, 1e-9);
    assert!(d.iter().any(|x| x.to_string().contains("gluing not involution")));
}

#[test]
fn square_glued_to_longer_rectangle() {
    let sq = Polygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)]);
    let rect = Polygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0), Vec2::new(2.0, 1.0), Vec2::new(0.0, 1.0)]);
    let gl = vec![
        (Edge::new(0, 0), Edge::new(1, 2)),
        (Edge::new(0, 2), Edge::new(1, 0)),
        (Edge::new(0, 1), Edge::new(0, 3)),
        (Edge::new(1, 1), Edge::new(1, 3)),
    ];
    let d = validate_parts(&[sq, rect], &gl, 1e-9);
    assert!(d.iter().any(|x| matches!(x, Diagnostic::EdgeLengthMismatch { .. })));
    assert!(d.iter().any(|x| x.to_string().contains("edge length mismatch")));
}

#[test]
fn origami_examples() {
    let t3 = Origami::from_one_based(&[2, 3, 1], &[1, 2, 3]).unwrap().to_surface();
    assert!(t3.stratum().unwrap().zero_orders.is_empty());
    assert_eq!(t3.genus(), 1);
    let l = Origami::l_shape().to_surface();
    assert_eq!(l.stratum().unwrap().zero_orders, vec![2]);
    assert_eq!(l.genus(), 2);
    assert!(Origami::from_one_based(&[1, 2], &[1, 2]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn origami_stratum_matches_commutator(o in common::origami_strategy(8)) {
        let s = o.to_surface();
        let st = s.stratum().unwrap();
        prop_assert_eq!(st.zero_orders, o.commutator_zero_orders());
        prop_assert_eq!(s.num_vertices(), o.num_vertices());
    }

    #[test]
    fn relabeling_preserves_stratum(o in common::origami_strategy(6), rot in 0usize..4) {
        let s = o.to_surface();
        let n = o.n();
        let perm: Vec<usize> = (0..n).rev().collect();
        let shift = vec![rot; n];
        let r = s.relabeled(&perm, &shift).unwrap();
        prop_assert_eq!(r.stratum().unwrap(), s.stratum().unwrap());
    }
}
