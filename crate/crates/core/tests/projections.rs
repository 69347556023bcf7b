//! Defining conditions and approximation orders of the projections.

mod common;

use common::random_smooth;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shishkin_ddg::basis::{gauss_legendre, gauss_lobatto_nodes};
use shishkin_ddg::norms::{error_bundle, ErrorBundle, Region};
use shishkin_ddg::problem::make_test_problem;
use shishkin_ddg::projection::*;
use shishkin_ddg::study::loglog_slope;
use shishkin_ddg::*;

fn meshes() -> Vec<Mesh> {
    vec![
        Mesh::uniform(10).unwrap(),
        ShishkinMesh::new(16, 1e-3, 3.0, 2.0).unwrap().as_mesh().clone(),
        Mesh::from_nodes(vec![0.0, 0.1, 0.15, 0.4, 0.8, 0.81, 1.0]).unwrap(),
    ]
}

#[test]
fn theta_projection_conditions_on_random_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..10 {
        let w = random_smooth(&mut rng);
        for mesh in &meshes() {
            for k in 1..=4 {
                for theta in [0.55, 2.0 / 3.0, 0.9, 1.0] {
                    let p = global_theta_project(&w, mesh, k, theta).unwrap();
                    let r = theta_residuals(&w, &p, theta);
                    assert!(r.moment <= 1e-11 && r.flux <= 1e-11 && r.endpoint <= 1e-11, "k={k} theta={theta}: {r:?}");
                }
            }
        }
    }
}

#[test]
fn theta_one_is_gauss_radau() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let w = random_smooth(&mut rng);
        for mesh in &meshes() {
            for k in 1..=4 {
                let p = global_theta_project(&w, mesh, k, 1.0).unwrap();
                let r = gauss_radau_project(&w, mesh, k).unwrap();
                for (a, b) in p.coeffs().iter().zip(r.coeffs()) {
                    assert!((a - b).abs() <= 1e-13);
                }
            }
        }
    }
}

#[test]
fn projections_reproduce_polynomials() {
    let mesh = ShishkinMesh::new(12, 1e-2, 3.0, 2.0).unwrap();
    for k in 1..=4 {
        let c: Vec<f64> = (0..=k).map(|i| 1.0 / (i as f64 + 1.0) - 0.3).collect();
        let (c1, c2) = (c.clone(), c.clone());
        let w = SampledFunction::new(move |x| c1.iter().rev().fold(0.0, |acc, ci| acc * x + ci))
            .with_derivative(move |x| c2.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, ci)| acc * x + i as f64 * ci));
        let g = gauss_lobatto_interpolate(&w, &mesh, k).unwrap();
        for p in [gauss_radau_project(&w, &mesh, k).unwrap(), global_theta_project(&w, &mesh, k, 2.0 / 3.0).unwrap()] {
            for (a, b) in p.coeffs().iter().zip(g.coeffs()) {
                assert!((a - b).abs() <= 1e-12, "k={k}");
            }
        }
        for e in 0..mesh.n_elements() {
            for xh in [-1.0, -0.3, 0.5, 1.0] {
                assert!((g.eval_reference(e, xh)[0] - w.value(mesh.to_physical(e, xh))).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn lobatto_matches_at_nodes() {
    let mesh = ShishkinMesh::new(32, 1e-6, 4.0, 2.0).unwrap();
    let w = make_test_problem(1e-6).unwrap().exact.unwrap();
    for k in 1..=4 {
        let g = gauss_lobatto_interpolate(&w, &mesh, k).unwrap();
        for e in 0..mesh.n_elements() {
            for (s, &z) in gauss_lobatto_nodes(k).iter().enumerate() {
                let x = if s == 0 {
                    mesh.node(e)
                } else if s == k {
                    mesh.node(e + 1)
                } else {
                    mesh.to_physical(e, z)
                };
                assert!((g.eval_reference(e, z)[0] - w.value(x)).abs() <= 1e-12, "k={k} e={e} s={s}");
            }
        }
    }
}

#[test]
fn continuous_w_has_no_transition_jump_for_theta_one() {
    let w = make_test_problem(1e-4).unwrap().exact.unwrap();
    let mesh = ShishkinMesh::new(32, 1e-4, 4.0, 2.0).unwrap();
    for k in 1..=3 {
        let pi = composite_interpolant(&w, &mesh, k, 1.0).unwrap();
        assert!(transition_jump(&w, &pi).abs() <= 1e-12);
    }
    // theta < 1: recorded, not asserted to vanish.
    let pi = composite_interpolant(&w, &mesh, 2, 2.0 / 3.0).unwrap();
    let jump = transition_jump(&w, &pi);
    println!("[w - pi w] at x_N/2, k=2, N=32, theta=2/3: {jump:e}");
    assert!(jump.is_finite());
}

#[test]
fn theta_outside_range_is_rejected() {
    let mesh = Mesh::uniform(4).unwrap();
    let w = SampledFunction::new(|x: f64| x.sin());
    for theta in [0.5, 0.2, 1.1, f64::NAN] {
        assert!(global_theta_project(&w, &mesh, 2, theta).is_err());
    }
}

/// `(N, ||w - pi w||)` over `N = 16..128` on the layer problem with
/// `eps = 1e-6`, `sigma = k + 2`.
fn layer_interpolation_errors(k: usize, region: Region, pick: fn(&ErrorBundle) -> f64) -> Vec<(usize, f64)> {
    let eps = 1e-6;
    let spec = make_test_problem(eps).unwrap();
    let w = spec.exact.clone().unwrap();
    let params = FluxParams::new(2.0 / 3.0, FluxParams::default_beta1(k), Schedule::FullOrder).unwrap();
    [16, 32, 64, 128]
        .into_iter()
        .map(|n| {
            let mesh = ShishkinMesh::new(n, eps, (k + 2) as f64, 2.0).unwrap();
            let pi = composite_interpolant(&w, &mesh, k, 2.0 / 3.0).unwrap();
            (n, pick(&error_bundle(&pi, &w, &mesh, k, &spec, &params, region).unwrap()))
        })
        .collect()
}

#[test]
fn coarse_interpolation_order_in_n() {
    for k in 1..=3 {
        let e = layer_interpolation_errors(k, Region::Coarse, |b| b.l2);
        // Least-squares slope of ln e against ln N.
        let (x, y): (Vec<f64>, Vec<f64>) = e.iter().map(|&(n, v)| ((n as f64).ln(), v.ln())).unzip();
        let xm = x.iter().sum::<f64>() / x.len() as f64;
        let ym = y.iter().sum::<f64>() / y.len() as f64;
        let num: f64 = x.iter().zip(&y).map(|(a, b)| (a - xm) * (b - ym)).sum();
        let den: f64 = x.iter().map(|a| (a - xm) * (a - xm)).sum();
        let order = -num / den;
        println!("k={k} coarse L2 {e:?} order {order:.3}");
        assert!(order >= k as f64 + 0.8, "k={k}: coarse L2 order {order}");
    }
}

#[test]
fn fine_interpolation_order_in_log_n_over_n() {
    let mut short = Vec::new();
    for k in 1..=3 {
        let e = layer_interpolation_errors(k, Region::Fine, |b| b.linf);
        let order = loglog_slope(&e).unwrap();
        println!("k={k} fine Linf {e:?} order {order:.3}");
        if order < k as f64 + 0.8 {
            short.push((k, order));
        }
    }
    assert!(short.is_empty(), "orders below k + 0.8: {short:?}");
}

#[test]
fn lobatto_superapproximation_on_uniform_meshes() {
    let w = SampledFunction::new(|x: f64| (2.0 * x).sin()).with_derivative(|x: f64| 2.0 * (2.0 * x).cos());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 1..=3 {
        // v' for a fixed random global polynomial v of degree k.
        let c: Vec<f64> = (0..=k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dv = |x: f64| c.iter().enumerate().skip(1).map(|(i, ci)| i as f64 * ci * x.powi(i as i32 - 1)).sum::<f64>();
        let rule = gauss_legendre(2 * k + 8);
        let mut points = Vec::new();
        for n in [8, 16, 32, 64] {
            let mesh = Mesh::uniform(n).unwrap();
            let g = gauss_lobatto_interpolate(&w, &mesh, k).unwrap();
            let mut worst = 0.0f64;
            for e in 0..n {
                let h = mesh.width(e);
                let s: f64 = rule
                    .iter()
                    .map(|(xh, q)| {
                        let x = mesh.to_physical(e, xh);
                        q * 0.5 * h * (w.derivative(x).unwrap() - g.eval_reference(e, xh)[1]) * dv(x)
                    })
                    .sum();
                worst = worst.max(s.abs());
            }
            points.push((n as f64, worst));
        }
        if k == 1 {
            // v' is constant and w - G_1 w vanishes at both ends of every element.
            assert!(points.iter().all(|p| p.1 <= 1e-14), "{points:?}");
            continue;
        }
        let order = (points[0].1 / points[3].1).ln() / (points[3].0 / points[0].0).ln();
        println!("k={k} {points:?} order {order:.3}");
        assert!(order >= k as f64 + 0.8, "k={k}: order {order}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn theta_residuals_vanish(seed in any::<u64>(), k in 1usize..=4, theta in 0.51f64..=1.0, n in 2usize..=20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_smooth(&mut rng);
        let mesh = Mesh::uniform(n).unwrap();
        let p = global_theta_project(&w, &mesh, k, theta).unwrap();
        let r = theta_residuals(&w, &p, theta);
        prop_assert!(r.moment <= 1e-11 && r.flux <= 1e-11 && r.endpoint <= 1e-11, "{:?}", r);
    }

    #[test]
    fn composite_rows_come_from_their_sources(seed in any::<u64>(), k in 1usize..=3, half in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_smooth(&mut rng);
        let mesh = ShishkinMesh::new(2 * half, 1e-3, 3.0, 2.0).unwrap();
        let pi = composite_interpolant(&w, &mesh, k, 0.75).unwrap();
        let p = global_theta_project(&w, &mesh, k, 0.75).unwrap();
        let g = gauss_lobatto_interpolate(&w, &mesh, k).unwrap();
        for e in 0..mesh.n_elements() {
            let src = if e < mesh.transition_index() { &p } else { &g };
            prop_assert_eq!(pi.element(e), src.element(e));
        }
    }
}
