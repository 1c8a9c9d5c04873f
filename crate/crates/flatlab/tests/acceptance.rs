//! One line per acceptance criterion; exits nonzero when any fails.

use std::time::{Duration, Instant};

use flatlab::report::to_json;
use flatlab::{run_density_experiment, ExperimentConfig};
use flatlab_arith::{matheus_yoccoz_check, trace_field_degree};
use flatlab_core::canonical::{canonical_form_marked, CanonicalForm};
use flatlab_core::cylinders::{decompose, horizontal_decomposition, Direction};
use flatlab_core::dynamics::{apply_matrix_marked, project_stable, tremor, twist_cylinders};
use flatlab_core::kz::{kz_along_flow, marked_origami, stable_norm_under_flow, OrigamiOrbit};
use flatlab_core::origami::cycles;
use flatlab_core::{build_regular_2ngon, Edge, Homology, Mat2, MarkedSurface, Origami};
use flatlab_rig::{
    a_invariance_test, bounded_image_test, push_arc, subpoly_divergence_probe, tv_fluctuation_scaling, FiberSample,
    LatticeContext, Representation,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Outcome = Result<(bool, String, Vec<String>), String>;

/// A criterion: pass flag, a one-line detail and the JSON artifacts it produced.
struct Criterion {
    id: usize,
    budget: Duration,
    run: fn() -> Outcome,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn strata() -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 5..=12u32 {
        let s = build_regular_2ngon(n as usize).map_err(err)?;
        let st = s.stratum().map_err(err)?;
        let want = if n % 2 == 1 { vec![(n - 3) / 2; 2] } else { vec![n - 2] };
        ok &= st.zero_orders == want && s.genus() == n / 2 && st.genus() == n / 2;
        rows.push(json!({ "n": n, "zero_orders": st.zero_orders, "genus": s.genus() }));
    }
    Ok((ok, "zero orders and genus for n = 5..12".into(), vec![json!(rows).to_string()]))
}

fn trace_degrees() -> Outcome {
    let reports: Vec<_> = (5..=12).map(trace_field_degree).collect::<Result<_, _>>().map_err(err)?;
    let got: Vec<usize> = reports.iter().map(|r| r.degree).collect();
    let flagged: Vec<usize> = reports.iter().filter(|r| r.discrepancy).map(|r| r.n).collect();
    let ok = got == [2, 2, 3, 4, 3, 4, 5, 4] && flagged == [6] && reports.iter().all(|r| r.field_degree == r.degree);
    Ok((ok, format!("degrees {got:?}, discrepancy flagged at n = {flagged:?}"), vec![to_json(&reports).map_err(err)?]))
}

fn matyoc() -> Outcome {
    let reports: Vec<_> = [5, 7, 9, 11].into_iter().map(matheus_yoccoz_check).collect::<Result<_, _>>().map_err(err)?;
    let ok = reports.iter().all(|r| r.passed);
    let roots: usize = reports.iter().map(|r| r.roots.len()).sum();
    Ok((ok, format!("{roots} roots checked for m = 5, 7, 9, 11"), vec![to_json(&reports).map_err(err)?]))
}

fn renormalization() -> Outcome {
    let orbit = OrigamiOrbit::build(&Origami::l_shape(), 100).map_err(err)?;
    let (q, _) = marked_origami(&orbit.nodes[0]).map_err(err)?;
    let d = decompose(&q, Direction::Horizontal).map_err(err)?;
    let rb: Vec<f64> = d.twist0[0].iter().map(|x| 0.01 * x).collect();
    let mut worst = 0.0f64;
    let mut forms = Vec::new();
    for t in [0.5, 1.0, 2.0] {
        let lhs = apply_matrix_marked(&Mat2::geodesic(t), &tremor(&d, &rb, 1.0).map_err(err)?).map_err(err)?;
        let ret = kz_along_flow(&orbit, 0, t, 0.0, &rb, None).map_err(err)?;
        let (m2, _) = marked_origami(&orbit.nodes[ret.target]).map_err(err)?;
        let y = apply_matrix_marked(&ret.g0, &m2).map_err(err)?;
        let dy = decompose(&y, Direction::Horizontal).map_err(err)?;
        let rhs = tremor(&dy, &ret.beta, 1.0).map_err(err)?;
        let a = canonical_form_marked(&lhs).map_err(err)?;
        let b = canonical_form_marked(&rhs).map_err(err)?;
        worst = worst.max(a.distance(&b));
        forms.push(to_json(&[a, b]).map_err(err)?);
    }
    Ok((worst < 1e-9, format!("max canonical distance {worst:.2e}"), forms))
}

fn periodicity() -> Outcome {
    let mut worst = 0.0f64;
    let mut out = Vec::new();
    for s in [build_regular_2ngon(5).map_err(err)?, Origami::l_shape().to_surface()] {
        let (m, _) = MarkedSurface::own(&s).map_err(err)?;
        let d = decompose(&m, Direction::Horizontal).map_err(err)?;
        let base = canonical_form_marked(&m).map_err(err)?;
        let p = d.twist_torus_lattice().periods;
        for i in 0..d.len() {
            let mut sh = vec![0.0; d.len()];
            sh[i] = p[i];
            let cf: CanonicalForm = canonical_form_marked(&twist_cylinders(&d, &sh).map_err(err)?).map_err(err)?;
            worst = worst.max(cf.distance(&base));
            out.push(to_json(&cf).map_err(err)?);
        }
    }
    Ok((worst < 1e-9, format!("max canonical distance {worst:.2e} over all cylinders"), out))
}

fn random_origamis(seed: u64, count: usize, max_n: usize) -> Vec<Origami> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(1..=max_n);
        let mut h: Vec<usize> = (0..n).collect();
        let mut v = h.clone();
        h.shuffle(&mut rng);
        v.shuffle(&mut rng);
        if let Ok(o) = Origami::new(h, v) {
            out.push(o);
        }
    }
    out
}

fn cylinder_oracle() -> Outcome {
    let mut bad = 0;
    let mut all = Vec::new();
    for o in random_origamis(61, 100, 8) {
        let s = o.to_surface();
        let h = Homology::build(&s).map_err(err)?;
        let d = horizontal_decomposition(&s).map_err(err)?;
        let mut want: Vec<(usize, Vec<i64>)> = cycles(o.h())
            .iter()
            .map(|c| {
                let mut core = vec![0i64; h.rank()];
                for &i in c {
                    for (a, b) in core.iter_mut().zip(h.edge_class(Edge::new(i, 0))) {
                        *a += b;
                    }
                }
                (c.len(), core)
            })
            .collect();
        want.sort();
        let mut got: Vec<(usize, Vec<i64>)> = Vec::new();
        let mut unit = true;
        for c in &d.cylinders {
            let w = c.circumference.round();
            unit &= (c.height - 1.0).abs() < 1e-9 && (c.circumference - w).abs() < 1e-9;
            got.push((w as usize, c.core_class.clone()));
        }
        got.sort();
        if !unit || got != want {
            bad += 1;
        }
        all.push(got);
    }
    Ok((bad == 0, format!("{bad} of 100 origamis disagree with the cycles of h"), vec![json!(all).to_string()]))
}

fn decagon_rank() -> Outcome {
    let s = build_regular_2ngon(5).map_err(err)?;
    let h = Homology::build(&s).map_err(err)?;
    let d = horizontal_decomposition(&s).map_err(err)?;
    let p = h.forget(&d.twist0[0]);
    let n = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((d.twist0.len() == 1 && n > 1e-6, format!("|p(β)| = {n:.4}"), vec![json!(p).to_string()]))
}

fn stable_contraction() -> Outcome {
    let orbit = OrigamiOrbit::build(&Origami::l_shape(), 100).map_err(err)?;
    let (q, h) = marked_origami(&orbit.nodes[0]).map_err(err)?;
    let hol = q.reference_holonomy().map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let (mut ratio, mut ok) = (0.0f64, true);
    let mut out = Vec::new();
    for _ in 0..20 {
        let raw: Vec<f64> = (0..h.rank()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = project_stable(h.omega(), &hol, &raw);
        for t in [0.5, 1.0, 2.0] {
            let r = stable_norm_under_flow(&orbit, 0, t, &v, 6.0).map_err(err)?;
            ok &= r.after <= r.before * (1.0 + 1e-6) && r.after >= (-2.0 * t).exp() * r.before / (1.0 + 1e-6);
            ratio = ratio.max(r.after / r.before);
            out.push(to_json(&r).map_err(err)?);
        }
    }
    Ok((ok, format!("max after/before {ratio:.6} over 20 classes"), out))
}

fn std_start(ctx: &LatticeContext) -> Result<FiberSample, String> {
    FiberSample::new(ctx, &Mat2::IDENTITY, &[1f64.cos(), 1f64.sin()]).map_err(err)
}

fn mod2() -> Result<(LatticeContext, FiberSample), String> {
    let ctx = LatticeContext::new(Representation::ModP { p: 2 }).map_err(err)?;
    let z = FiberSample::new(&ctx, &Mat2::IDENTITY, &[1.0, 2f64.sqrt(), 3f64.sqrt()]).map_err(err)?;
    Ok((ctx, z))
}

fn a_invariance() -> Outcome {
    let ctx = LatticeContext::new(Representation::Standard).map_err(err)?;
    let z = std_start(&ctx)?;
    let n = 100_000;
    let d: Vec<_> = [2.0, 4.0, 6.0, 8.0].iter().map(|&t| push_arc(&ctx, &z, t, n, 2024)).collect::<Result<_, _>>().map_err(err)?;
    let early = a_invariance_test(&d[0], &d[1], 2.0).map_err(err)?;
    let late = a_invariance_test(&d[2], &d[3], 2.0).map_err(err)?;
    let ok = late.statistic < 0.05 && late.statistic < early.statistic;
    Ok((
        ok,
        format!("statistic (2,4) = {:.4}, (6,8) = {:.4}", early.statistic, late.statistic),
        vec![to_json(&early).map_err(err)?, to_json(&late).map_err(err)?],
    ))
}

fn bounded_image() -> Outcome {
    let (ctx, z) = mod2()?;
    let r = bounded_image_test(&ctx, &z, 8.0, 100_000, 77).map_err(err)?;
    let f = tv_fluctuation_scaling(&ctx, &z, 8.0, 10_000, 20, 78).map_err(err)?;
    Ok((
        r.tv < 0.1 && f.within_two_sigma,
        format!("TV {:.4} on orbit of {}, ratio {:.2} ± {:.2}", r.tv, r.orbit_size, f.ratio, f.ratio_sigma),
        vec![to_json(&r).map_err(err)?, to_json(&f).map_err(err)?],
    ))
}

fn divergence() -> Outcome {
    let (ctx, _) = mod2()?;
    let x = Mat2::geodesic(0.3) * Mat2::rotation(0.7);
    let r = subpoly_divergence_probe(&ctx, &x, &[1.0, 0.0, 0.0], &[0.0, 1.0, 1.0], 1e4, 40).map_err(err)?;
    let slope = r.slope.unwrap_or(f64::NAN);
    Ok((slope.abs() < 0.02, format!("slope {slope:.2e} over s in [1, 1e4]"), vec![to_json(&r).map_err(err)?]))
}

fn density() -> Outcome {
    let cfg = ExperimentConfig::new("l", (1..=6).map(f64::from).collect(), 10_000, 12);
    let r = run_density_experiment(&cfg).map_err(err)?;
    let fr: Vec<String> = r.rows.iter().map(|x| format!("{:.3}", x.covering_fraction)).collect();
    Ok((
        r.trend.non_decreasing_within_2sigma && r.trend.gain >= 0.1,
        format!("covering [{}], gain {:.3}", fr.join(", "), r.trend.gain),
        vec![to_json(&r).map_err(err)?],
    ))
}

const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, budget: Duration::from_secs(1), run: strata },
    Criterion { id: 2, budget: Duration::from_secs(1), run: trace_degrees },
    Criterion { id: 3, budget: Duration::from_secs(5), run: matyoc },
    Criterion { id: 4, budget: Duration::from_secs(10), run: renormalization },
    Criterion { id: 5, budget: Duration::from_secs(5), run: periodicity },
    Criterion { id: 6, budget: Duration::from_secs(30), run: cylinder_oracle },
    Criterion { id: 7, budget: Duration::from_secs(1), run: decagon_rank },
    Criterion { id: 8, budget: Duration::from_secs(60), run: stable_contraction },
    Criterion { id: 9, budget: Duration::from_secs(300), run: a_invariance },
    Criterion { id: 10, budget: Duration::from_secs(300), run: bounded_image },
    Criterion { id: 11, budget: Duration::from_secs(60), run: divergence },
    Criterion { id: 12, budget: Duration::from_secs(600), run: density },
];

fn line(id: usize, pass: bool, detail: &str, elapsed: Duration) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id}: {verdict}: {detail} ({:.2} s)", elapsed.as_secs_f64());
}

fn main() {
    let mut failures = Vec::new();
    let mut artifacts = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let out = (c.run)();
        let elapsed = start.elapsed();
        match out {
            Ok((pass, detail, files)) => {
                let within = elapsed <= c.budget;
                let detail = if within { detail } else { format!("{detail}; over the {:?} budget", c.budget) };
                line(c.id, pass && within, &detail, elapsed);
                if !(pass && within) {
                    failures.push(c.id);
                }
                artifacts.push(Some(files));
            }
            Err(e) => {
                line(c.id, false, &format!("error: {e}"), elapsed);
                failures.push(c.id);
                artifacts.push(None);
            }
        }
    }

    let start = Instant::now();
    let mut differing = Vec::new();
    for (c, first) in CRITERIA.iter().zip(&artifacts) {
        let again = (c.run)().ok().map(|(_, _, files)| files);
        if first.is_none() || again.as_ref() != first.as_ref() {
            differing.push(c.id);
        }
    }
    let detail = if differing.is_empty() {
        "rerun of criteria 1-12 gives byte-identical artifacts".to_string()
    } else {
        format!("artifacts differ for criteria {differing:?}")
    };
    line(13, differing.is_empty(), &detail, start.elapsed());
    if !differing.is_empty() {
        failures.push(13);
    }

    if !failures.is_empty() {
        println!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
