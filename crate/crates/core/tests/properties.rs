use hermcalc::exp_deriv::{exp_derivative_dd, mat_exp};
use hermcalc::oracle::{fd_derivative, FdConfig};
use hermcalc::rng::{draw_rng, random_hermitian, random_hermitian_with_norm, random_matrix};
use hermcalc::spectral::{apply_function, gstar_derivative_dd};
use hermcalc::{op_norm, Complex64, ComplexMatrix, ScalarFunction};
use proptest::prelude::*;

fn functions() -> impl Strategy<Value = ScalarFunction> {
    prop_oneof![
        Just(ScalarFunction::Exp),
        Just(ScalarFunction::Sin),
        Just(ScalarFunction::Cos),
        Just(ScalarFunction::Gaussian),
        (0u32..6).prop_map(ScalarFunction::Monomial),
        prop::collection::vec(-2.0f64..2.0, 1..7).prop_map(ScalarFunction::Polynomial),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), dim in 1usize..10) {
        let mut rng = draw_rng(seed, 0, 0);
        let x = random_hermitian(&mut rng, dim);
        let eig = x.eig().unwrap();
        let scale = x.matrix().max_abs().max(1.0);
        prop_assert!(eig.reconstruct().max_abs_diff(x.matrix()) <= 1e-12 * scale);
        let u = &eig.eigenvectors;
        prop_assert!((&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(dim)) <= 1e-13);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn op_norm_is_submultiplicative(seed in any::<u64>(), dim in 1usize..7) {
        let mut rng = draw_rng(seed, 0, 0);
        let a = random_matrix(&mut rng, dim);
        let b = random_matrix(&mut rng, dim);
        prop_assert!(op_norm(&(&a * &b)) <= op_norm(&a) * op_norm(&b) * (1.0 + 1e-12));
        prop_assert!(op_norm(&(&a + &b)) <= (op_norm(&a) + op_norm(&b)) * (1.0 + 1e-12));
    }

    #[test]
    fn derivatives_are_symmetric(seed in any::<u64>(), dim in 1usize..6, g in functions()) {
        let mut rng = draw_rng(seed, 0, 0);
        let x = random_hermitian_with_norm(&mut rng, dim, 1.5);
        let v = random_matrix(&mut rng, dim);
        let w = random_matrix(&mut rng, dim);
        let a = gstar_derivative_dd(&g, &x, &[v.clone(), w.clone()]).unwrap().value;
        let b = gstar_derivative_dd(&g, &x, &[w, v]).unwrap().value;
        prop_assert!(a.max_abs_diff(&b) <= 1e-12 * a.max_abs().max(1.0));
    }

    #[test]
    fn first_derivative_is_linear(seed in any::<u64>(), dim in 1usize..6, g in functions(), s in -2.0f64..2.0) {
        let mut rng = draw_rng(seed, 0, 0);
        let x = random_hermitian_with_norm(&mut rng, dim, 1.5);
        let v = random_matrix(&mut rng, dim);
        let w = random_matrix(&mut rng, dim);
        let combo = &v.scale_real(s) + &w;
        let lhs = gstar_derivative_dd(&g, &x, &[combo]).unwrap().value;
        let dv = gstar_derivative_dd(&g, &x, &[v]).unwrap().value;
        let dw = gstar_derivative_dd(&g, &x, &[w]).unwrap().value;
        let rhs = &dv.scale_real(s) + &dw;
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn real_functions_preserve_hermiticity(seed in any::<u64>(), dim in 1usize..6, g in functions()) {
        let mut rng = draw_rng(seed, 0, 0);
        let x = random_hermitian_with_norm(&mut rng, dim, 1.0);
        let v = random_hermitian(&mut rng, dim).into_matrix();
        let w = random_hermitian(&mut rng, dim).into_matrix();
        let gx = apply_function(&g, &x).unwrap();
        prop_assert!(gx.is_exactly_hermitian());
        let d = gstar_derivative_dd(&g, &x, &[v, w]).unwrap().value;
        prop_assert!(d.max_abs_diff(&d.adjoint()) <= 1e-12);
    }

    #[test]
    fn scalar_derivatives_match_differences(t in -3.0f64..3.0, m in 1usize..4, g in functions()) {
        let h = 1e-4;
        let fd = (g.eval(t + h, m - 1).unwrap() - g.eval(t - h, m - 1).unwrap()) / (2.0 * h);
        let exact = g.eval(t, m).unwrap();
        prop_assert!((fd - exact).norm() <= 1e-6 * (1.0 + exact.norm()) * 10f64.powi(m as i32));
    }

    #[test]
    fn matrix_json_round_trip_is_byte_stable(seed in any::<u64>(), dim in 1usize..6) {
        let mut rng = draw_rng(seed, 0, 0);
        let m = random_matrix(&mut rng, dim);
        let text = m.to_json();
        let back = ComplexMatrix::from_json(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn exp_derivative_matches_finite_differences(seed in any::<u64>(), dim in 1usize..5) {
        let mut rng = draw_rng(seed, 0, 0);
        let x = random_hermitian_with_norm(&mut rng, dim, 1.0);
        let v = random_matrix(&mut rng, dim);
        let exp = |m: &ComplexMatrix| mat_exp(m, Complex64::new(1.0, 0.0));
        let fd = fd_derivative(exp, x.matrix(), std::slice::from_ref(&v), &FdConfig::for_order(1)).unwrap();
        let dd = exp_derivative_dd(&x, &[v]).unwrap().value;
        prop_assert!(fd.max_abs_diff(&dd) <= 1e-7 * dd.max_abs().max(1.0));
    }
}
