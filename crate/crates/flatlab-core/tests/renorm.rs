use flatlab_core::canonical::canonical_form_marked;
use flatlab_core::cylinders::{decompose, Direction};
use flatlab_core::dynamics::{apply_matrix_marked, tremor};
use flatlab_core::kz::{kz_along_flow, marked_origami, OrigamiOrbit};
use flatlab_core::{Mat2, Origami};

#[test]
fn renormalization_identity_on_l() {
    let orbit = OrigamiOrbit::build(&Origami::l_shape(), 100).unwrap();
    let (q, _) = marked_origami(&orbit.nodes[0]).unwrap();
    let d = decompose(&q, Direction::Horizontal).unwrap();
    let beta = d.twist0[0].clone();
    let r = 0.01;
    for t in [0.5, 1.0, 2.0] {
        let rb: Vec<f64> = beta.iter().map(|x| r * x).collect();
        let lhs = apply_matrix_marked(&Mat2::geodesic(t), &tremor(&d, &rb, 1.0).unwrap()).unwrap();
        let ret = kz_along_flow(&orbit, 0, t, 0.0, &rb, None).unwrap();
        let (m2, _) = marked_origami(&orbit.nodes[ret.target]).unwrap();
        let y = apply_matrix_marked(&ret.g0, &m2).unwrap();
        let dy = decompose(&y, Direction::Horizontal).unwrap();
        let rhs = tremor(&dy, &ret.beta, 1.0).unwrap();
        let a = canonical_form_marked(&lhs).unwrap();
        let b = canonical_form_marked(&rhs).unwrap();
        let dist = a.distance(&b);
        assert!(dist < 1e-9, "t = {t}: distance {dist}");
        // the untransported class gives a different surface
        let wrong: Vec<f64> = rb.iter().map(|x| x * t.exp()).collect();
        if let Ok(w) = tremor(&dy, &wrong, 1.0) {
            assert!(canonical_form_marked(&w).unwrap().distance(&a) > 1e-6);
        }
    }
}
