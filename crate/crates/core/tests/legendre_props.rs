use proptest::prelude::*;
use quadbench_core::estimators::NewRefined;
use quadbench_core::legendre::{
    integral_from_coeffs, l2_norm, legendre_eval, newton_coeffs, solve_coeffs, transform_pair, CoeffVector, Side,
    VandermondeSystem,
};
use quadbench_core::rules::{apply_rule, clenshaw_curtis, gauss_legendre};

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..=max_len)
}

fn distinct_nodes() -> impl Strategy<Value = Vec<f64>> {
    // jittered Chebyshev points keep the system well conditioned
    (2usize..=21, prop::collection::vec(-0.3f64..0.3, 21)).prop_map(|(n, jit)| {
        (0..n)
            .map(|i| {
                let t = std::f64::consts::PI * (i as f64 + 0.5 + jit[i]) / n as f64;
                -t.cos()
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn parseval(c in coeffs(21)) {
        let v = CoeffVector(c.clone());
        let g = gauss_legendre(c.len() + 1).unwrap();
        let q = apply_rule(&g, &|x| v.eval(x).powi(2), -1.0, 1.0).unwrap().0;
        let n2 = l2_norm(&c).powi(2);
        prop_assert!((q - n2).abs() <= 1e-11 * n2.max(1e-300) || n2 == 0.0 && q.abs() < 1e-300);
    }

    #[test]
    fn interpolation_round_trip(nodes in distinct_nodes(), seed in prop::collection::vec(-5.0f64..5.0, 21)) {
        let values = &seed[..nodes.len()];
        let c = solve_coeffs(&nodes, values).unwrap();
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (x, v) in nodes.iter().zip(values) {
            prop_assert!((c.eval(*x) - v).abs() <= 1e-10 * scale, "{} vs {}", c.eval(*x), v);
        }
    }

    #[test]
    fn transform_is_a_change_of_variable(c in coeffs(21), xs in prop::collection::vec(-1.0f64..1.0, 50)) {
        let n = c.len();
        let t = transform_pair(n);
        let parent = CoeffVector(c);
        let left = CoeffVector(t.apply(Side::Left, &parent.0));
        let right = CoeffVector(t.apply(Side::Right, &parent.0));
        let scale = 1.0 + l2_norm(&parent.0);
        for x in xs {
            prop_assert!((left.eval(x) - parent.eval(0.5 * (x - 1.0))).abs() <= 1e-11 * scale);
            prop_assert!((right.eval(x) - parent.eval(0.5 * (x + 1.0))).abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn newton_vector_reconstructs_node_polynomial(nodes in prop::collection::vec(-1.0f64..1.0, 1..=21), x in -1.0f64..1.0) {
        let b = newton_coeffs(&nodes);
        let direct: f64 = nodes.iter().map(|xi| x - xi).product();
        prop_assert!((b.eval(x) - direct).abs() <= 1e-11 * (1.0 + l2_norm(&b.0)));
    }
}

#[test]
fn refined_old_newton_vector_matches_direct_construction() {
    let est = NewRefined::new();
    let nodes = clenshaw_curtis(11).unwrap().nodes().to_vec();
    for (side, shift) in [(Side::Left, 1.0), (Side::Right, -1.0)] {
        // parent node x sits at 2x + 1 (left) or 2x - 1 (right) in the child frame
        let mapped: Vec<f64> = nodes.iter().map(|x| 2.0 * x + shift).collect();
        let direct = newton_coeffs(&mapped);
        let got = est.newton_old(side);
        assert_eq!(got.len(), direct.len());
        let scale = l2_norm(&direct.0);
        for (g, d) in got.iter().zip(&direct.0) {
            assert!((g - d).abs() <= 1e-10 * scale, "{side:?}: {g} vs {d}");
        }
    }
    assert_eq!(est.newton(), &newton_coeffs(&nodes).0[..]);
}

#[test]
fn basis_and_solve_examples() {
    assert!((legendre_eval(0, 0.3) - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((legendre_eval(1, 0.5) - 1.5f64.sqrt() * 0.5).abs() < 1e-15);
    let g10 = gauss_legendre(10).unwrap();
    assert!((apply_rule(&g10, &|x| legendre_eval(3, x).powi(2), -1.0, 1.0).unwrap().0 - 1.0).abs() < 1e-13);

    let nodes = [-0.9, -0.4, 0.1, 0.5, 0.8];
    let vals: Vec<f64> = nodes.iter().map(|&x| legendre_eval(3, x)).collect();
    let c = solve_coeffs(&nodes, &vals).unwrap();
    for (k, v) in c.0.iter().enumerate() {
        assert!((v - if k == 3 { 1.0 } else { 0.0 }).abs() < 1e-12);
    }
    let c = solve_coeffs(&nodes, &[1.0; 5]).unwrap();
    assert!((c.0[0] - 2f64.sqrt()).abs() < 1e-13);
    assert!(solve_coeffs(&[0.0, 0.5, 0.5], &[1.0, 2.0, 3.0]).is_err());
    assert!(VandermondeSystem::new(&[0.0, 0.0]).is_err());
    assert!(solve_coeffs(&[0.0, 0.5], &[1.0, f64::NAN]).is_err());

    let cc = clenshaw_curtis(11).unwrap();
    let vals: Vec<f64> = cc.nodes().iter().map(|&x| legendre_eval(2, x) + 2.0 * legendre_eval(5, x)).collect();
    assert!((solve_coeffs(cc.nodes(), &vals).unwrap().norm() - 5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn norm_and_integral_examples() {
    assert_eq!(l2_norm(&[3.0, 4.0]), 5.0);
    assert_eq!(l2_norm(&[0.0; 4]), 0.0);
    let one = [2f64.sqrt(), 0.0, 0.0];
    assert!((integral_from_coeffs(&one, 0.0, 3.0) - 3.0).abs() < 1e-14);
    let cc = clenshaw_curtis(5).unwrap();
    let vals: Vec<f64> = cc.nodes().iter().map(|x| x * x).collect();
    let c = solve_coeffs(cc.nodes(), &vals).unwrap();
    assert!((integral_from_coeffs(&c.0, -1.0, 1.0) - 2.0 / 3.0).abs() < 1e-14);
    assert_eq!(integral_from_coeffs(&[0.0, 1.0, -2.0], -1.0, 1.0), 0.0);
}

#[test]
fn transform_examples() {
    let t = transform_pair(4);
    let one = [2f64.sqrt(), 0.0, 0.0, 0.0];
    for (g, w) in t.apply(Side::Left, &one).iter().zip(one) {
        assert!((g - w).abs() < 1e-14);
    }
    let x = CoeffVector(t.apply(Side::Left, &[0.0, (2.0f64 / 3.0).sqrt(), 0.0, 0.0]));
    assert!(x.eval(1.0).abs() < 1e-14);
    assert!((x.eval(-1.0) + 1.0).abs() < 1e-14);

    let b = newton_coeffs(&[0.0]);
    assert!(b.0[0].abs() < 1e-15 && (b.0[1] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert!((newton_coeffs(&[-1.0, 1.0]).eval(0.0) + 1.0).abs() < 1e-14);
}
