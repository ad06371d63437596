use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use plsigma::catalog;
use plsigma::checks::sample_points;
use plsigma::group::{
    adjoint, automorphism_defect, coordinate_bivector, decompose, form_preservation_defect,
    frame_matrix, frame_matrix_fd, pi_both, pi_matrix,
};
use plsigma::linalg::{matrix_exp, max_abs};
use plsigma::{DoubleAlgebra, Error, GroupPoint, Subgroup, Tolerances};

fn example(beta: f64) -> DoubleAlgebra {
    catalog::example_beta(beta).double(&Tolerances::default()).unwrap()
}

fn sl2() -> DoubleAlgebra {
    catalog::sl2_standard().double(&Tolerances::default()).unwrap()
}

#[test]
fn origin_maps_to_identity() {
    let d = example(1.0);
    let p = GroupPoint::new(&d, Subgroup::Base, &[0.0, 0.0]).unwrap();
    assert_eq!(adjoint(&p), DMatrix::identity(4, 4));
    assert_eq!(pi_matrix(&d, &p).unwrap(), DMatrix::zeros(2, 2));
    let fr = frame_matrix(&d, &p).unwrap();
    assert_eq!(fr.e, DMatrix::identity(2, 2));
}

#[test]
fn first_factor_scales_second_generator() {
    // Σ α^k/k! ad_{T_0}^k T_1 = e^α T_1 because [T_0, T_1] = T_1
    let d = example(1.0);
    for alpha in [-0.7, 0.2, 1.3] {
        let p = GroupPoint::new(&d, Subgroup::Base, &[alpha, 0.0]).unwrap();
        let image = p.adjoint().column(1).into_owned();
        let mut series = DVector::zeros(4);
        let mut term = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
        let mut fact = 1.0;
        for k in 0..40 {
            if k > 0 {
                term = d.total().ad(0) * term;
                fact *= k as f64;
            }
            series += &term * (alpha.powi(k) / fact);
        }
        assert_abs_diff_eq!(image[1], alpha.exp(), epsilon = 1e-14);
        assert!((image - series).amax() < 1e-14);
    }
}

#[test]
fn reversed_negated_path_inverts_adjoint() {
    let d = sl2();
    for y in sample_points(3, 3, 20, 1.0) {
        let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
        let inv = p.adjoint().clone().try_inverse().unwrap();
        assert!(max_abs(&(inv - p.adjoint_inv())) < 1e-11);
    }
}

#[test]
fn adjoint_preserves_form_and_bracket() {
    for d in [example(1.0), example(-2.0), sl2()] {
        let n = d.half_dim();
        for y in sample_points(5, n, 100, 2.0) {
            for sub in [Subgroup::Base, Subgroup::Dual] {
                let p = GroupPoint::new(&d, sub, &y).unwrap();
                let scale = max_abs(p.adjoint());
                assert!(form_preservation_defect(&d, p.adjoint()) <= 1e-10 * (1.0 + scale * scale));
                assert!(automorphism_defect(&d, p.adjoint()) <= 1e-10 * (1.0 + scale.powi(3)));
            }
        }
    }
}

#[test]
fn decompose_identity_and_reassembly() {
    let dec = decompose(&DMatrix::identity(6, 6), 1e-10).unwrap();
    assert_eq!(dec.a, DMatrix::identity(3, 3));
    assert_eq!(dec.d, DMatrix::identity(3, 3));
    assert_eq!(dec.b, DMatrix::zeros(3, 3));
    let d = sl2();
    for y in sample_points(9, 3, 20, 1.0) {
        let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
        let dec = decompose(p.adjoint_inv(), 1e-10).unwrap();
        assert!(max_abs(&(dec.reassemble() - p.adjoint_inv())) <= 1e-12 * (1.0 + max_abs(p.adjoint_inv())));
    }
}

#[test]
fn decompose_rejects_dual_points() {
    let d = example(1.0);
    let p = GroupPoint::new(&d, Subgroup::Dual, &[0.4, 0.9]).unwrap();
    assert!(matches!(
        decompose(p.adjoint_inv(), 1e-10),
        Err(Error::ZeroBlockViolation { .. })
    ));
}

#[test]
fn zero_cocommutator_gives_zero_b_block() {
    let d = catalog::abelian_dual().double(&Tolerances::default()).unwrap();
    for y in sample_points(1, 2, 30, 1.0) {
        let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
        // g̃ is an ideal, so Ad_{g⁻¹} never maps g̃ into g
        let dec = decompose(p.adjoint_inv(), 1e-10).unwrap();
        assert_eq!(max_abs(&dec.b), 0.0);
        assert_eq!(max_abs(&pi_matrix(&d, &p).unwrap()), 0.0);
    }
}

#[test]
fn example_pi_matches_closed_form() {
    for beta in [-2.0, 0.5, 1.0] {
        let d = example(beta);
        for y in sample_points(21, 2, 100, 1.0) {
            let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
            let pi = pi_matrix(&d, &p).unwrap();
            let expected = beta * y[0].exp() * y[1];
            assert!((pi[(0, 1)] - expected).abs() <= 1e-10 * expected.abs().max(1e-300));
            assert_abs_diff_eq!(pi[(1, 0)], -pi[(0, 1)], epsilon = 1e-15);
            assert_eq!(pi[(0, 0)], 0.0);
            // the block b a⁻¹ itself carries the opposite sign
            let dec = decompose(p.adjoint_inv(), 1e-10).unwrap();
            let bai = &dec.b * dec.a.clone().try_inverse().unwrap();
            assert!((bai[(0, 1)] + expected).abs() <= 1e-10 * (1.0 + expected.abs()));
        }
    }
}

#[test]
fn pi_pipelines_agree_and_are_antisymmetric() {
    for d in [example(1.0), sl2()] {
        let n = d.half_dim();
        for y in sample_points(33, n, 100, 1.0) {
            let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
            let (block, proj) = pi_both(&d, &p).unwrap();
            let scale = 1.0 + max_abs(&block);
            assert!(max_abs(&(&block - proj)) <= 1e-11 * scale);
            assert!(max_abs(&(&block + block.transpose())) <= 1e-12 * scale);
        }
    }
}

#[test]
fn example_frame_is_diagonal_exponential() {
    let d = example(1.0);
    for y in sample_points(4, 2, 100, 1.0) {
        let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
        let fr = frame_matrix(&d, &p).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, y[0].exp()]);
        assert!(max_abs(&(&fr.e - expected)) <= 1e-12);
        assert!(max_abs(&(&fr.e * &fr.f - DMatrix::identity(2, 2))) <= 1e-12);
    }
}

#[test]
fn frame_matches_finite_differences_at_second_order() {
    let d = sl2();
    let p = GroupPoint::new(&d, Subgroup::Base, &[0.4, -0.6, 0.7]).unwrap();
    let e = frame_matrix(&d, &p).unwrap().e;
    let err = |h: f64| max_abs(&(frame_matrix_fd(&d, &p, h).unwrap() - &e));
    let (e1, e2) = (err(1e-2), err(5e-3));
    let ratio = e1 / e2;
    assert!((3.7..=4.3).contains(&ratio), "ratio {ratio}, errors {e1:e} {e2:e}");
}

#[test]
fn example_coordinate_bivector_is_linear() {
    let d = example(0.5);
    for y in sample_points(8, 2, 50, 1.0) {
        let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
        let cb = coordinate_bivector(&d, &p).unwrap();
        assert!((cb[(0, 1)] - 0.5 * y[1]).abs() <= 1e-12 * (1.0 + y[1].abs()));
    }
}

#[test]
fn abelian_base_gives_linear_bivector() {
    let d = catalog::linear_so3().double(&Tolerances::default()).unwrap();
    for y in sample_points(2, 3, 30, 1.0) {
        let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
        let pi = pi_matrix(&d, &p).unwrap();
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            assert_abs_diff_eq!(pi[(i, j)], y[k], epsilon = 1e-13);
        }
    }
}

#[test]
fn sklyanin_matches_pi_for_sl2() {
    let entry = catalog::sl2_standard();
    let d = sl2();
    let r = entry.r().unwrap();
    let a = (&r - r.transpose()) * 0.5;
    for y in sample_points(12, 3, 100, 1.0) {
        let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
        let s = plsigma::bialgebra::sklyanin_components(&p, &a);
        let pi = pi_matrix(&d, &p).unwrap();
        assert!(max_abs(&(&s - &pi)) <= 1e-9);
        assert!(max_abs(&(&s + s.transpose())) <= 1e-12 * (1.0 + max_abs(&s)));
    }
    let e = GroupPoint::identity(&d, Subgroup::Base);
    assert_eq!(plsigma::bialgebra::sklyanin_components(&e, &a), DMatrix::zeros(3, 3));
}

#[test]
fn chart_boundary_is_reported() {
    let mut tol = Tolerances::default();
    tol.chart_condition = 10.0;
    let d = catalog::example_beta(1.0).double(&tol).unwrap();
    let p = GroupPoint::new(&d, Subgroup::Base, &[0.0, 30.0]).unwrap();
    match pi_matrix(&d, &p) {
        Err(Error::ChartBoundary { coords, condition }) => {
            assert_eq!(coords, vec![0.0, 30.0]);
            assert!(condition > 10.0);
        }
        other => panic!("expected chart boundary, got {other:?}"),
    }
}

#[test]
fn exp_product_uses_left_to_right_order() {
    let d = sl2();
    let y = [0.3, -0.5, 0.8];
    let p = GroupPoint::new(&d, Subgroup::Base, &y).unwrap();
    let mut m = DMatrix::identity(6, 6);
    for k in 0..3 {
        m *= matrix_exp(&(d.total().ad(k) * y[k])).unwrap();
    }
    assert!(max_abs(&(m - p.adjoint())) < 1e-14);
}
