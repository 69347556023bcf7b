//! Randomized invariants of meshes, basis, quadrature and norms.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shishkin_ddg::basis::{gauss_legendre, legendre, legendre_all};
use shishkin_ddg::norms::{energy_norm, error_bundle, Region};
use shishkin_ddg::problem::make_test_problem;
use shishkin_ddg::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() }
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn shishkin_mesh_invariants(half in 2usize..=128, log_eps in -12.0f64..0.0, sigma in 1.0f64..6.0, alpha in 0.5f64..4.0) {
        let n = 2 * half;
        let eps = 10f64.powf(log_eps);
        let mesh = ShishkinMesh::new(n, eps, sigma, alpha).unwrap();
        let tau = (sigma * eps / alpha * (n as f64).ln()).min(0.5);
        prop_assert!((mesh.tau() - tau).abs() <= 1e-15 * tau.max(1e-300));
        prop_assert!((mesh.widths().iter().sum::<f64>() - 1.0).abs() <= 1e-13);
        prop_assert_eq!(mesh.node(0), 0.0);
        prop_assert_eq!(mesh.node(n), 1.0);
        prop_assert_eq!(mesh.transition_index(), n / 2);
        prop_assert!((mesh.node(n / 2) - (1.0 - tau)).abs() <= 1e-15);
        prop_assert!(mesh.nodes().windows(2).all(|w| w[1] > w[0]));
        for j in 1..n {
            prop_assert_eq!(mesh.delta_h(j).unwrap(), mesh.width(j - 1).min(mesh.width(j)));
        }
        prop_assert!(mesh.delta_h(n + 1).is_err());
        // Coarse widths dominate fine widths.
        prop_assert!(mesh.width(0) >= mesh.width(n - 1) * (1.0 - 1e-12));
    }

    #[test]
    fn locate_agrees_with_nodes(half in 2usize..=32, x in 0.0f64..=1.0) {
        let mesh = ShishkinMesh::new(2 * half, 1e-3, 3.0, 2.0).unwrap();
        let e = mesh.locate(x);
        prop_assert!(mesh.node(e) <= x && x <= mesh.node(e + 1));
        let xh = mesh.to_reference(e, x);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&xh));
        prop_assert!((mesh.to_physical(e, xh) - x).abs() <= 1e-14);
    }

    #[test]
    fn legendre_derivatives_match_differences(l in 0usize..=8, x in -0.95f64..0.95) {
        let h = 1e-5;
        let (p, pp, pm) = (legendre(l, x), legendre(l, x + h), legendre(l, x - h));
        prop_assert!(((pp[0] - pm[0]) / (2.0 * h) - p[1]).abs() <= 1e-6 * (1.0 + p[1].abs()));
        prop_assert!(((pp[1] - pm[1]) / (2.0 * h) - p[2]).abs() <= 1e-5 * (1.0 + p[2].abs()));
        let all = legendre_all(8, x);
        prop_assert_eq!(all[l], p);
    }

    #[test]
    fn dg_function_is_linear(k in 1usize..=4, n in 2usize..=10, s in -3.0f64..3.0, seed in any::<u64>()) {
        let mesh = Mesh::uniform(n).unwrap();
        let len = n * (k + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || -> Vec<f64> { (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect() };
        let u = DGFunction::from_coeffs(&mesh, k, draw()).unwrap();
        let v = DGFunction::from_coeffs(&mesh, k, draw()).unwrap();
        let mut w = u.clone();
        w.add_scaled(s, &v);
        for x in [0.0, 0.13, 0.5, 0.77, 1.0] {
            prop_assert!((w.eval(x) - (u.eval(x) + s * v.eval(x))).abs() <= 1e-12);
        }
    }
}

#[test]
fn legendre_orthogonality() {
    let rule = gauss_legendre(12);
    for l in 0..=8 {
        for m in 0..=8 {
            let ip = rule.integrate(|x| legendre(l, x)[0] * legendre(m, x)[0]);
            let expected = if l == m { 2.0 / (2 * l + 1) as f64 } else { 0.0 };
            assert!((ip - expected).abs() <= 1e-14, "({l},{m}) {ip}");
        }
    }
}

#[test]
fn gauss_rules_are_exact_to_degree_2n_minus_1() {
    for n in 1..=12 {
        let rule = gauss_legendre(n);
        for d in 0..2 * n {
            let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d + 1) as f64 };
            let got = rule.integrate(|x| x.powi(d as i32));
            assert!((got - exact).abs() <= 1e-13, "n={n} d={d}");
        }
    }
}

fn norm_setup() -> (ProblemSpec, FluxParams) {
    (make_test_problem(1e-2).unwrap(), FluxParams::new(2.0 / 3.0, 0.1, Schedule::FullOrder).unwrap())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn energy_norm_is_a_norm(k in 1usize..=3, half in 2usize..=6, a in coeffs(13 * 4), b in coeffs(13 * 4), s in -4.0f64..4.0) {
        let (spec, params) = norm_setup();
        let mesh = ShishkinMesh::new(2 * half, 1e-2, 3.0, 2.0).unwrap();
        let len = mesh.n_elements() * (k + 1);
        let u = DGFunction::from_coeffs(&mesh, k, a[..len].to_vec()).unwrap();
        let v = DGFunction::from_coeffs(&mesh, k, b[..len].to_vec()).unwrap();
        let (nu, nv) = (energy_norm(&u, &spec, &params), energy_norm(&v, &spec, &params));
        let mut sum = u.clone();
        sum.add_scaled(1.0, &v);
        prop_assert!(energy_norm(&sum, &spec, &params) <= (nu + nv) * (1.0 + 1e-12));
        prop_assert!((energy_norm(&u.scaled(s), &spec, &params) - s.abs() * nu).abs() <= 1e-12 * nu.max(1.0));
        let zero = DGFunction::zeros(&mesh, k);
        let bundle = error_bundle(&u, &zero, &mesh, k, &spec, &params, Region::All).unwrap();
        prop_assert!((bundle.energy - nu).abs() <= 1e-12 * nu.max(1.0));
        prop_assert!(nu >= spec.gamma.sqrt() * bundle.l2 * (1.0 - 1e-12));
        let recomposed = spec.epsilon * bundle.h1_semi_broken.powi(2) + spec.gamma * bundle.l2.powi(2) + bundle.jump_l2.powi(2);
        prop_assert!((recomposed - bundle.energy.powi(2)).abs() <= 1e-12 * recomposed.max(1.0));
        prop_assert!(bundle.linf <= u.coeffs().iter().map(|c| c.abs()).sum::<f64>() + 1e-12);
    }
}
