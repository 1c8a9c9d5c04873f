mod common;

use flatlab_core::cylinders::{balanced_projection, horizontal_decomposition};
use flatlab_core::geom::signed_area2;
use flatlab_core::homology::RelCohomClass;
use flatlab_core::intlin::IntMatrix;
use flatlab_core::{build_regular_2ngon, Homology, Origami, TranslationSurface};
use proptest::prelude::*;

fn families() -> Vec<TranslationSurface> {
    let mut out: Vec<TranslationSurface> = (4..=12).map(|n| build_regular_2ngon(n).unwrap()).collect();
    out.push(Origami::torus().to_surface());
    out.push(Origami::l_shape().to_surface());
    out.extend(common::random_origamis(11, 20, 8).iter().map(|o| o.to_surface()));
    out
}

fn shoelace(s: &TranslationSurface) -> f64 {
    s.polygons().iter().map(|p| signed_area2(&p.vertices) / 2.0).sum()
}

fn is_symplectic(j: &IntMatrix) -> bool {
    j.transpose().to_rows() == j.to_rows().iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()).collect::<Vec<_>>()
        && j.det() == 1
}

#[test]
fn ranks_follow_genus_and_vertices() {
    for s in families() {
        let h = Homology::build(&s).unwrap();
        let g = s.genus() as usize;
        assert_eq!(h.rank(), 2 * g + s.num_vertices() - 1);
        assert_eq!(h.abs_rank(), 2 * g);
    }
    let dec = Homology::build(&build_regular_2ngon(5).unwrap()).unwrap();
    assert_eq!((dec.rank(), dec.abs_rank()), (5, 4));
    let l = Homology::build(&Origami::l_shape().to_surface()).unwrap();
    assert_eq!(l.rank(), 4);
}

#[test]
fn torus_intersection_matrix() {
    let h = Homology::build(&Origami::torus().to_surface()).unwrap();
    assert_eq!(h.intersection_matrix().to_rows(), vec![vec![0, 1], vec![-1, 0]]);
}

#[test]
fn intersection_matrices_are_symplectic() {
    for s in families() {
        let h = Homology::build(&s).unwrap();
        assert!(is_symplectic(h.intersection_matrix()));
    }
}

#[test]
fn area_pairing_matches_shoelace() {
    for s in families() {
        let h = Homology::build(&s).unwrap();
        let hol = h.holonomy(&s);
        let x = RelCohomClass::from_real(h.fingerprint(), &hol.real());
        let y = RelCohomClass::from_real(h.fingerprint(), &hol.imag());
        let a = h.intersection_pairing(&x, &y).unwrap();
        assert!((a - shoelace(&s)).abs() < 1e-9, "{a} vs {}", shoelace(&s));
    }
    let dec = build_regular_2ngon(5).unwrap();
    let h = Homology::build(&dec).unwrap();
    let hol = h.holonomy(&dec);
    let expect = 2.5 / (std::f64::consts::PI / 10.0).tan();
    assert!((h.pairing(&hol.real(), &hol.imag()) - expect).abs() < 1e-9);
}

#[test]
fn holonomy_is_sum_of_edge_vectors() {
    for s in families() {
        let h = Homology::build(&s).unwrap();
        let hol = h.holonomy(&s);
        for e in s.edges() {
            let c = h.edge_class(e);
            let z = hol.eval(&c);
            let v = s.edge_vector(e);
            assert!((z.re - v.x).abs() < 1e-9 && (z.im - v.y).abs() < 1e-9);
            let neg: Vec<i64> = c.iter().map(|k| -k).collect();
            assert!((hol.eval(&neg) + z).norm() < 1e-12);
        }
    }
}

#[test]
fn pairing_rejects_foreign_basis() {
    let s = Origami::l_shape().to_surface();
    let h = Homology::build(&s).unwrap();
    let a = RelCohomClass::from_real("0000000000000000", &[0.0; 4]);
    let b = RelCohomClass::from_real(h.fingerprint(), &[0.0; 4]);
    assert!(h.intersection_pairing(&a, &b).is_err());
}

#[test]
fn balanced_projection_examples() {
    let s = build_regular_2ngon(5).unwrap();
    let h = Homology::build(&s).unwrap();
    let hol = h.holonomy(&s).values;
    let x: Vec<f64> = hol.iter().map(|z| z.re).collect();
    let y: Vec<f64> = hol.iter().map(|z| z.im).collect();
    assert!(balanced_projection(&h, &hol, &x).unwrap().iter().all(|v| v.abs() < 1e-12));

    let d = horizontal_decomposition(&s).unwrap();
    for b in &d.twist0 {
        let p = balanced_projection(&h, &hol, b).unwrap();
        assert!(p.iter().zip(b).all(|(u, v)| (u - v).abs() < 1e-9));
    }
    let total = s.area();
    for c in &d.cylinders {
        let k = c.area / total;
        let p = balanced_projection(&h, &hol, &c.twist_class).unwrap();
        for i in 0..p.len() {
            assert!((p[i] - (c.twist_class[i] - k * y[i])).abs() < 1e-9);
        }
    }
}

#[test]
fn twist_classes_vanish_on_core_curves() {
    for s in families() {
        let d = horizontal_decomposition(&s).unwrap();
        for c in &d.cylinders {
            for other in &d.cylinders {
                let core: Vec<f64> = other.core_class.iter().map(|&k| k as f64).collect();
                let v: f64 = core.iter().zip(&c.twist_class).map(|(a, b)| a * b).sum();
                assert!(v.abs() < 1e-9);
            }
            let cross: f64 = c.transversal_class.iter().zip(&c.twist_class).map(|(&k, b)| k as f64 * b).sum();
            assert!((cross - c.height).abs() < 1e-9);
        }
    }
}

proptest! {
    #[test]
    fn pairing_is_skew(a in prop::collection::vec(-5.0f64..5.0, 5), b in prop::collection::vec(-5.0f64..5.0, 5)) {
        let h = Homology::build(&build_regular_2ngon(5).unwrap()).unwrap();
        prop_assert!(h.pairing(&a, &a).abs() < 1e-9);
        prop_assert!((h.pairing(&a, &b) + h.pairing(&b, &a)).abs() < 1e-9);
    }

    #[test]
    fn origami_area_pairing(o in common::origami_strategy(8)) {
        let s = o.to_surface();
        let h = Homology::build(&s).unwrap();
        let hol = h.holonomy(&s);
        prop_assert!((h.pairing(&hol.real(), &hol.imag()) - o.n() as f64).abs() < 1e-9);
    }
}
