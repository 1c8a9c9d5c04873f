mod common;

use flatlab_core::canonical::canonical_form_marked;
use flatlab_core::dynamics::{
    agy_norm, apply_matrix, apply_matrix_marked, project_stable, stable_param, tremor, twist_torus_sample,
};
use flatlab_core::kz::{marked_origami, push_cohomology, stable_norm_under_flow, OrigamiOrbit};
use flatlab_core::sl2::reduce;
use flatlab_core::{
    build_regular_2ngon, decompose, CylinderDecomposition, Direction, FlatTri, Homology, Mat2, MarkedSurface, Origami,
    TranslationSurface,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn examples() -> Vec<TranslationSurface> {
    let mut v = vec![
        Origami::torus().to_surface(),
        Origami::l_shape().to_surface(),
        build_regular_2ngon(5).unwrap(),
        build_regular_2ngon(6).unwrap(),
        build_regular_2ngon(7).unwrap(),
    ];
    v.extend(common::random_origamis(5, 3, 6).iter().map(|o| o.to_surface()));
    v
}

/// `R(a) diag(k, 1/k) R(b)` with `1 <= k <= 10`.
fn random_sl2(rng: &mut ChaCha8Rng) -> Mat2 {
    let k = rng.gen_range(1.0..10.0);
    Mat2::rotation(rng.gen_range(0.0..6.3)) * Mat2::new(k, 0.0, 0.0, 1.0 / k) * Mat2::rotation(rng.gen_range(0.0..6.3))
}

#[test]
fn holonomy_is_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for s in examples() {
        let h = Homology::build(&s).unwrap();
        let hol = h.holonomy(&s).values;
        for _ in 0..100 {
            let g = random_sl2(&mut rng);
            assert!(g.op_norm() <= 10.0 + 1e-9);
            let gs = apply_matrix(&g, &s).unwrap();
            let got = h.holonomy(&gs).values;
            for (a, b) in got.iter().zip(&hol) {
                assert!((a - g.apply_c(*b)).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn geodesic_and_lower_horocycle_on_holonomy() {
    let s = build_regular_2ngon(5).unwrap();
    let h = Homology::build(&s).unwrap();
    let hol = h.holonomy(&s).values;
    let t = 0.7;
    let a = h.holonomy(&apply_matrix(&Mat2::geodesic(t), &s).unwrap()).values;
    let sig = -0.4;
    let b = h.holonomy(&apply_matrix(&Mat2::horocycle_minus(sig), &s).unwrap()).values;
    for j in 0..h.rank() {
        assert!((a[j].re - t.exp() * hol[j].re).abs() < 1e-9);
        assert!((a[j].im - (-t).exp() * hol[j].im).abs() < 1e-9);
        assert!((b[j].re - hol[j].re).abs() < 1e-9);
        assert!((b[j].im - (sig * hol[j].re + hol[j].im)).abs() < 1e-9);
    }
    assert!(apply_matrix(&Mat2::new(2.0, 0.0, 0.0, 1.0), &s).is_err());
}

fn decomp(s: &TranslationSurface) -> (MarkedSurface, CylinderDecomposition) {
    let (m, _) = MarkedSurface::own(s).unwrap();
    let d = decompose(&m, Direction::Horizontal).unwrap();
    (m, d)
}

#[test]
fn tremors_in_distinct_cylinders_commute() {
    for s in [Origami::l_shape().to_surface(), build_regular_2ngon(5).unwrap(), build_regular_2ngon(7).unwrap()] {
        let (_, d) = decomp(&s);
        for a in 0..d.len() {
            for b in (a + 1)..d.len() {
                let (ba, bb) = (&d.cylinders[a].twist_class, &d.cylinders[b].twist_class);
                let (ta, tb) = (0.37, -0.61);
                let ab = tremor(&decompose(&tremor(&d, ba, ta).unwrap(), Direction::Horizontal).unwrap(), bb, tb)
                    .unwrap();
                let ba_ = tremor(&decompose(&tremor(&d, bb, tb).unwrap(), Direction::Horizontal).unwrap(), ba, ta)
                    .unwrap();
                let x = canonical_form_marked(&ab).unwrap();
                let y = canonical_form_marked(&ba_).unwrap();
                assert!(x.equivalent(&y), "cylinders {a}, {b}: distance {}", x.distance(&y));
            }
        }
    }
}

#[test]
fn tremor_rejects_non_twist_class() {
    let (m, d) = decomp(&Origami::l_shape().to_surface());
    let x = m.reference_holonomy().unwrap().iter().map(|z| z.re).collect::<Vec<_>>();
    assert!(tremor(&d, &x, 0.1).is_err());
}

#[test]
fn torus_sample_mean() {
    let (_, d) = decomp(&Origami::torus().to_surface());
    let pts = twist_torus_sample(&d, 17, 100_000);
    let mean = pts.iter().map(|p| p.coords[0]).sum::<f64>() / pts.len() as f64;
    let sigma = (1.0f64 / 12.0 / 1e5).sqrt();
    assert!((mean - 0.5).abs() < 3.0 * sigma);
}

#[test]
fn decagon_twist0_norm_is_truncation_stable() {
    let s = build_regular_2ngon(5).unwrap();
    let (_, d) = decomp(&s);
    let mut tri = FlatTri::from_surface(&s).unwrap();
    tri.make_delaunay(100_000).unwrap();
    let v: Vec<Complex64> = d.twist0[0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let a = agy_norm(&tri, &v, 20.0).unwrap();
    let b = agy_norm(&tri, &v, 40.0).unwrap();
    assert!(b.saddle_connections > a.saddle_connections);
    assert!((a.value - b.value).abs() < 1e-6, "{} vs {}", a.value, b.value);
}

#[test]
fn agy_norm_needs_saddle_connections() {
    let tri = FlatTri::from_surface(&Origami::torus().to_surface()).unwrap();
    assert!(agy_norm(&tri, &[Complex64::new(1.0, 0.0); 2], 0.5).is_err());
}

#[test]
fn stable_norm_does_not_expand() {
    let orbit = OrigamiOrbit::build(&Origami::l_shape(), 100).unwrap();
    let (q, h) = marked_origami(&orbit.nodes[0]).unwrap();
    let hol = q.reference_holonomy().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..4 {
        let raw: Vec<f64> = (0..h.rank()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = project_stable(h.omega(), &hol, &raw);
        for t in [0.0, 0.5, 1.0, 2.0] {
            let r = stable_norm_under_flow(&orbit, 0, t, &v, 6.0).unwrap();
            assert!(r.holonomy_defect < 1e-9);
            assert!(r.after <= r.before * (1.0 + 1e-6));
            assert!(r.after >= (-2.0 * t).exp() * r.before / (1.0 + 1e-6));
            assert!(r.after_enumerated >= r.after * (1.0 - 1e-9));
        }
    }
}

#[test]
fn torus_stable_param_example() {
    let (m, h) = MarkedSurface::own(&Origami::torus().to_surface()).unwrap();
    let hol = m.reference_holonomy().unwrap();
    let top = (0..h.rank()).find(|&j| hol[j].im.abs() > 0.5).unwrap();
    let mut v = vec![0.0; h.rank()];
    v[top] = 0.1;
    let out = stable_param(&m, &v, 10.0).unwrap();
    let got = out.reference_holonomy().unwrap();
    for j in 0..h.rank() {
        assert!((got[j] - hol[j] - Complex64::new(0.0, v[j])).norm() < 1e-12);
    }
    let same = stable_param(&m, &[0.0; 2], 10.0).unwrap();
    assert!(canonical_form_marked(&same).unwrap().equivalent(&canonical_form_marked(&m).unwrap()));
}

#[test]
fn stable_param_is_equivariant() {
    let t = 1.0;
    let orbit = OrigamiOrbit::build(&Origami::l_shape(), 100).unwrap();
    let (q, h) = marked_origami(&orbit.nodes[0]).unwrap();
    let hol = q.reference_holonomy().unwrap();
    let v = project_stable(h.omega(), &hol, &[0.04, -0.03, 0.02, 0.01]);
    let lhs = apply_matrix_marked(&Mat2::geodesic(t), &stable_param(&q, &v, 10.0).unwrap()).unwrap();
    let lhs = canonical_form_marked(&lhs).unwrap();

    // same marking at g_t q
    let gq = apply_matrix_marked(&Mat2::geodesic(t), &q).unwrap();
    let w: Vec<f64> = v.iter().map(|x| x * (-t).exp()).collect();
    let rhs = canonical_form_marked(&stable_param(&gq, &w, 10.0).unwrap()).unwrap();
    assert!(lhs.distance(&rhs) < 1e-9);

    // square-tiled representative of g_t q, class moved by KZ
    let red = reduce(&Mat2::geodesic(t), 10_000).unwrap();
    let c = orbit.word_action(0, &red.word);
    let (m, _) = marked_origami(&orbit.nodes[c.target]).unwrap();
    let y = apply_matrix_marked(&red.g0, &m).unwrap();
    let wk: Vec<f64> = push_cohomology(&c.product_matrix, &v).iter().map(|x| x * (-t).exp()).collect();
    let rhs = canonical_form_marked(&stable_param(&y, &wk, 10.0).unwrap()).unwrap();
    assert!(lhs.distance(&rhs) < 1e-9, "distance {}", lhs.distance(&rhs));
}
