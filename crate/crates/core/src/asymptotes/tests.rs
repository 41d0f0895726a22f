use super::*;
use crate::branches::{branch_series, converge};
use crate::expr::parse;
use crate::poles::find_poles;
use crate::Options;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn rational_curve() -> CurveParam {
    CurveParam::new(vec![
        parse("(3*s^4-s-4+5*s^3)/((s-1)*s^3*(s^2+1))").unwrap(),
        parse("(2*s^2-7*s+2)/((s-1)*s^2)").unwrap(),
    ])
    .unwrap()
}

fn meromorphic_curve() -> CurveParam {
    CurveParam::new(vec![
        parse("(sqrt(s)+1)/(sqrt(s)*sin(s))").unwrap(),
        parse("(s^2+s+5)/sin(s)").unwrap(),
    ])
    .unwrap()
}

fn space_curve() -> CurveParam {
    CurveParam::new(vec![
        parse("(sqrt(s+1)+2)^(1/4)/(s*(1+(sqrt(s+1)+2)^(3/4)))").unwrap(),
        parse("sqrt(sqrt(s+1)+2)/(1+(sqrt(s+1)+2)^(3/4))").unwrap(),
        parse("(s+3)/sin(s)").unwrap(),
    ])
    .unwrap()
}

fn pole_at(curve: &CurveParam, window: &Window, z: C) -> PoleData {
    find_poles(curve, window)
        .unwrap()
        .into_iter()
        .find(|p| (p.location - z).norm() < 1e-7)
        .unwrap_or_else(|| panic!("pole {z} not found"))
}

fn coeffs(a: &GAsymptote, coord: usize) -> &[C] {
    &a.coordinates[coord].coefficients
}

fn assert_c(actual: C, re: f64, im: f64, tol: f64) {
    assert!(
        (actual - c(re, im)).norm() < tol,
        "expected {re}+{im}i, got {actual}"
    );
}

#[test]
fn meromorphic_branch_reduces_to_cubic() {
    let curve = meromorphic_curve();
    let pole = pole_at(&curve, &Window::new(-1.0, 1.0, -1.0, 1.0), c(0.0, 0.0));
    let b = branch_series(&curve, &pole, 3).unwrap();
    let a = asymptote_from_branch(&b);
    assert_eq!(a.kind, AsymptoteKind::Generic);
    assert_eq!(a.base_exponent, 3);
    assert_eq!(a.reduction_factor, 1);
    let q = coeffs(&a, 0);
    assert_eq!(q.len(), 3);
    assert_c(q[0], 8.0 / 3.0, 0.0, 1e-9);
    assert_c(q[1], -10.0 / 3.0, 0.0, 1e-9);
    assert_c(q[2], 5.0, 0.0, 1e-9);
}

#[test]
fn cube_root_head_matches_real_leaf_form() {
    let curve = rational_curve();
    let pole = pole_at(&curve, &Window::default(), c(0.0, 0.0));
    let b = branch_series(&curve, &pole, 2).unwrap();
    let a = asymptote_from_branch(&b);
    assert_eq!(a.base_exponent, 3);
    let two: f64 = 2.0;
    let q = coeffs(&a, 0);
    assert_c(q[0], 5.0 / 24.0, 0.0, 1e-9);
    assert_c(q[1], 10.0 / 3.0 * two.powf(1.0 / 3.0), 0.0, 1e-9);
    assert_c(q[2], -two.powf(-1.0 / 3.0), 0.0, 1e-9);
}

#[test]
fn gcd_reduction_with_dropped_middle_coefficient() {
    // head 3 z + eps z^(1/2) + 7 with n1 = 2: beta = 2, reduced to (t, 3t+7)
    let curve = CurveParam::new(vec![
        parse("s^(-2)").unwrap(),
        parse("3*s^(-2) + 7 + 1/100000000000000*s^(-1)").unwrap(),
    ])
    .unwrap();
    let pole = pole_at(&curve, &Window::default(), c(0.0, 0.0));
    let b = branch_series(&curve, &pole, 1).unwrap();
    let a = asymptote_from_branch(&b);
    assert_eq!(a.reduction_factor, 2);
    assert_eq!(a.base_exponent, 1);
    let q = coeffs(&a, 0);
    assert_eq!(q.len(), 2);
    assert_c(q[0], 7.0, 0.0, 1e-9);
    assert_c(q[1], 3.0, 0.0, 1e-9);
}

#[test]
fn horizontal_lines_at_conjugate_poles() {
    let curve = rational_curve();
    let w = Window::default();
    let at_i = horizontal_asymptote(&curve, &pole_at(&curve, &w, c(0.0, 1.0))).unwrap();
    assert_eq!(at_i.kind, AsymptoteKind::HorizontalLine);
    assert_c(coeffs(&at_i, 0)[0], 3.5, -3.5, 1e-9);
    // exact rational annotation survives on a Gaussian-rational pole
    assert!(at_i.coordinates[0].exact[0].is_some());

    let at_minus_i = horizontal_asymptote(&curve, &pole_at(&curve, &w, c(0.0, -1.0))).unwrap();
    assert_c(coeffs(&at_minus_i, 0)[0], 3.5, 3.5, 1e-9);
}

#[test]
fn horizontal_trivial_constant_component() {
    let curve = CurveParam::new(vec![parse("1/s").unwrap(), parse("5").unwrap()]).unwrap();
    let pole = pole_at(&curve, &Window::default(), c(0.0, 0.0));
    let a = horizontal_asymptote(&curve, &pole).unwrap();
    assert_eq!(a.kind, AsymptoteKind::HorizontalLine);
    assert_c(coeffs(&a, 0)[0], 5.0, 0.0, 1e-12);
}

#[test]
fn horizontal_agrees_with_degenerate_cascade_head() {
    let curve = rational_curve();
    let pole = pole_at(&curve, &Window::default(), c(0.0, 1.0));
    let line = horizontal_asymptote(&curve, &pole).unwrap();
    let b = branch_series(&curve, &pole, 2).unwrap();
    let from_cascade = asymptote_from_branch(&b);
    assert_eq!(from_cascade.kind, AsymptoteKind::HorizontalLine);
    assert!(
        (coeffs(&line, 0)[0] - coeffs(&from_cascade, 0)[0]).norm() < 1e-9,
        "line and cascade paths disagree"
    );
}

#[test]
fn vertical_line_from_second_component_pole() {
    let curve = CurveParam::new(vec![parse("s").unwrap(), parse("1/(s-2)").unwrap()]).unwrap();
    let pole = pole_at(&curve, &Window::default(), c(2.0, 0.0));
    let a = vertical_asymptote(&curve, &pole).unwrap();
    assert_eq!(a.kind, AsymptoteKind::VerticalLine);
    assert_eq!(a.pivot, 1);
    assert_c(coeffs(&a, 0)[0], 2.0, 0.0, 1e-10);
}

#[test]
fn vertical_line_at_transcendental_pole() {
    let curve = CurveParam::new(vec![parse("s^2+1").unwrap(), parse("1/sin(s)").unwrap()]).unwrap();
    let pi = std::f64::consts::PI;
    let pole = pole_at(&curve, &Window::default(), c(pi, 0.0));
    let a = vertical_asymptote(&curve, &pole).unwrap();
    assert_c(coeffs(&a, 0)[0], pi * pi + 1.0, 0.0, 1e-9);
}

#[test]
fn full_rational_run_yields_four_asymptotes() {
    let curve = rational_curve();
    let out = all_asymptotes(&curve, &Window::default(), &Options::default()).unwrap();
    assert!(out.failures.is_empty());
    assert_eq!(out.asymptotes.len(), 4);
    let kinds: Vec<_> = out.asymptotes.iter().map(|a| a.kind).collect();
    assert_eq!(
        kinds
            .iter()
            .filter(|k| **k == AsymptoteKind::HorizontalLine)
            .count(),
        2
    );
    assert_eq!(
        kinds
            .iter()
            .filter(|k| **k == AsymptoteKind::Generic)
            .count(),
        2
    );
    // the linear one is (t, -2t + 17)
    let line = out
        .asymptotes
        .iter()
        .find(|a| a.kind == AsymptoteKind::Generic && a.base_exponent == 1)
        .unwrap();
    assert_c(coeffs(line, 0)[0], 17.0, 0.0, 1e-9);
    assert_c(coeffs(line, 0)[1], -2.0, 0.0, 1e-9);
}

#[test]
fn sine_ratio_curve_single_linear_asymptote() {
    let curve = CurveParam::new(vec![
        parse("(cos(s)-1)/(s^(3/2)*sin(s))").unwrap(),
        parse("sin(pi*s)/(s^(1/2)*sin(s))").unwrap(),
    ])
    .unwrap();
    let out = all_asymptotes(
        &curve,
        &Window::new(-1.0, 1.0, -1.0, 1.0),
        &Options::default(),
    )
    .unwrap();
    assert!(out.failures.is_empty());
    assert_eq!(out.asymptotes.len(), 1);
    let a = &out.asymptotes[0];
    assert_eq!(a.base_exponent, 1);
    let q = coeffs(a, 0);
    assert!(q[0].norm() < 1e-9, "a0 should vanish, got {}", q[0]);
    assert_c(q[1], -2.0 * std::f64::consts::PI, 0.0, 1e-9);
}

#[test]
fn diagonal_curve_diagonal_asymptote() {
    let curve = CurveParam::new(vec![parse("1/s").unwrap(), parse("1/s").unwrap()]).unwrap();
    let out = all_asymptotes(&curve, &Window::default(), &Options::default()).unwrap();
    assert_eq!(out.asymptotes.len(), 1);
    let a = &out.asymptotes[0];
    assert_eq!(a.base_exponent, 1);
    let q = coeffs(a, 0);
    assert!(q[0].norm() < 1e-12);
    assert_c(q[1], 1.0, 0.0, 1e-12);
}

#[test]
fn swapped_pivot_when_second_component_dominates() {
    // x = 1/s, y = 1/s^2 traces the parabola y = x^2; the second component
    // carries the deeper pole, so it pivots and the asymptote is (t, t^2)
    // written with pivot 1.
    let curve = CurveParam::new(vec![parse("1/s").unwrap(), parse("1/s^2").unwrap()]).unwrap();
    let out = all_asymptotes(&curve, &Window::default(), &Options::default()).unwrap();
    assert_eq!(out.asymptotes.len(), 1);
    let a = &out.asymptotes[0];
    assert_eq!(a.pivot, 1);
    assert_eq!(a.base_exponent, 2);
    assert_eq!(a.coordinates[0].component, 0);
    let q = coeffs(a, 0);
    assert_eq!(q.len(), 2);
    assert!(q[0].norm() < 1e-12);
    assert_c(q[1], 1.0, 0.0, 1e-12);
    // its points are (u, u^2)
    let p = a.point(c(3.0, 0.0));
    assert_c(p[0], 3.0, 0.0, 1e-12);
    assert_c(p[1], 9.0, 0.0, 1e-12);
}

#[test]
fn swapped_pivot_cascade_with_nontrivial_head() {
    // x = (s+2)/s, y = 1/s^3: with u = 1/s the curve is (1 + 2u, u^3), so
    // the reduced asymptote is (2t + 1, t^3) carried on pivot 1.
    let curve = CurveParam::new(vec![parse("(s+2)/s").unwrap(), parse("1/s^3").unwrap()]).unwrap();
    let out = all_asymptotes(&curve, &Window::default(), &Options::default()).unwrap();
    assert_eq!(out.asymptotes.len(), 1);
    let a = &out.asymptotes[0];
    assert_eq!(a.pivot, 1);
    assert_eq!(a.base_exponent, 3);
    let q = coeffs(a, 0);
    assert_eq!(q.len(), 2);
    assert_c(q[0], 1.0, 0.0, 1e-10);
    assert_c(q[1], 2.0, 0.0, 1e-10);
    // the infinity point of the swapped branch is (0 : 1 : 0)
    assert!(a.infinity_point[0].norm() < 1e-10);
    assert_c(a.infinity_point[1], 1.0, 0.0, 1e-12);
    assert!(a.infinity_point[2].norm() == 0.0);
    // the curve IS this asymptote, so distances sit at float-noise level
    let b = &out.branches[0];
    let d = crate::branches::approach_distance(&curve, &b.pole, a, &[10.0, 1e3]).unwrap();
    assert!(d.iter().all(|&v| v < 1e-6), "distances {d:?}");
}

#[test]
fn fractional_order_pole_away_from_origin() {
    // Orders 3/2 and 1 at tau = 2: gamma = 2 uniformizes through
    // s = 2 + w^2 and the branch is exactly (t^3, t^2).
    let curve = CurveParam::new(vec![
        parse("(s-2)^(-3/2)").unwrap(),
        parse("1/(s-2)").unwrap(),
    ])
    .unwrap();
    let poles = find_poles(&curve, &Window::default()).unwrap();
    assert_eq!(poles.len(), 1);
    let pole = &poles[0];
    assert!((pole.location - c(2.0, 0.0)).norm() < 1e-10);
    assert_eq!(pole.gamma, 2);
    assert_eq!(pole.reduced_orders, vec![3, 2]);
    let b = branch_series(&curve, pole, 2).unwrap();
    let a = asymptote_from_branch(&b);
    assert_eq!(a.pivot, 0);
    assert_eq!(a.base_exponent, 3);
    let q = coeffs(&a, 0);
    assert_eq!(q.len(), 3);
    assert!(q[0].norm() < 1e-10 && q[1].norm() < 1e-10);
    assert_c(q[2], 1.0, 0.0, 1e-10);
    // oracle agrees on the uniformized frame
    let oracle = crate::branches::branch_series_oracle(&curve, pole, 2).unwrap();
    assert!(converge(&b, &oracle));
}

#[test]
fn space_curve_line_x_pole() {
    let curve = space_curve();
    let out = nd_asymptotes(&curve, &Window::default(), &Options::default()).unwrap();
    // the asymptote from the principal pole at 0
    let at_zero = out
        .asymptotes
        .iter()
        .find(|a| a.source_pole.norm() < 1e-9 && a.leaf.is_empty())
        .expect("asymptote at the principal pole");
    assert_eq!(at_zero.pivot, 0);
    assert_eq!(at_zero.base_exponent, 1);
    let three: f64 = 3.0;
    // second coordinate: constant sqrt(3)/(1+3^(3/4))
    let c2 = coeffs(at_zero, 0);
    assert_eq!(c2.len(), 1);
    assert_c(c2[0], three.sqrt() / (1.0 + three.powf(0.75)), 0.0, 1e-9);
    // third coordinate: (3^(3/4)+3^(3/2)) t + (10*3^(3/4)+7)/(8(1+3^(3/4)))
    let c3 = coeffs(at_zero, 1);
    assert_eq!(c3.len(), 2);
    assert_c(c3[1], three.powf(0.75) + three.powf(1.5), 0.0, 1e-9);
    assert_c(
        c3[0],
        (10.0 * three.powf(0.75) + 7.0) / (8.0 * (1.0 + three.powf(0.75))),
        0.0,
        1e-9,
    );
}

#[test]
fn space_curve_leaf_pole_slope() {
    let curve = space_curve();
    let poles = find_poles(&curve, &Window::default()).unwrap();
    let alpha_pole = poles
        .iter()
        .find(|p| (p.location - c(4.5, -4.330127018922193)).norm() < 1e-6)
        .expect("leaf pole");
    let b = branch_series(&curve, alpha_pole, 2).unwrap();
    let a = asymptote_from_branch(&b);
    assert_eq!(a.pivot, 0);
    assert_eq!(a.base_exponent, 1);
    // slope of the second coordinate equals the leaf value of
    // ((s+1)^(1/2)+2)^(1/4) * s at alpha
    let formula = parse("((s+1)^(1/2)+2)^(1/4)*s").unwrap();
    let leafed = alpha_pole.leaf.apply(&formula);
    let expected = crate::expr::evaluate(&leafed, alpha_pole.location).unwrap();
    let slope = coeffs(&a, 0)[1];
    assert!(
        (slope - expected).norm() < 1e-9,
        "slope {slope} vs formula {expected}"
    );
    // third coordinate is the constant (alpha+3)/sin(alpha)
    let p3 = parse("(s+3)/sin(s)").unwrap();
    let expected3 = crate::expr::evaluate(&p3, alpha_pole.location).unwrap();
    assert!((coeffs(&a, 1)[0] - expected3).norm() < 1e-9);
}

#[test]
fn trivial_space_diagonal() {
    let curve = CurveParam::new(vec![
        parse("1/s").unwrap(),
        parse("1/s").unwrap(),
        parse("1/s").unwrap(),
    ])
    .unwrap();
    let out = nd_asymptotes(&curve, &Window::default(), &Options::default()).unwrap();
    assert_eq!(out.asymptotes.len(), 1);
    let a = &out.asymptotes[0];
    assert_eq!(a.base_exponent, 1);
    for coord in &a.coordinates {
        assert!(coord.coefficients[0].norm() < 1e-12);
        assert_c(coord.coefficients[1], 1.0, 0.0, 1e-12);
    }
}

#[test]
fn properness_and_degree_on_all_golden_outputs() {
    let cases: Vec<RunOutcome> = vec![
        all_asymptotes(&rational_curve(), &Window::default(), &Options::default()).unwrap(),
        all_asymptotes(
            &meromorphic_curve(),
            &Window::new(-1.0, 1.0, -1.0, 1.0),
            &Options::default(),
        )
        .unwrap(),
        nd_asymptotes(&space_curve(), &Window::default(), &Options::default()).unwrap(),
    ];
    for out in &cases {
        for (a, b) in out.asymptotes.iter().zip(&out.branches) {
            // properness: gcd of base exponent and surviving exponents is 1
            let mut g = a.base_exponent;
            let scale = a
                .coordinates
                .iter()
                .flat_map(|c| c.coefficients.iter())
                .map(|v| v.norm())
                .fold(0.0f64, f64::max);
            for coord in &a.coordinates {
                for (k, v) in coord.coefficients.iter().enumerate() {
                    if k >= 1 && v.norm() > COEFF_TOL * scale.max(1e-30) {
                        g = crate::expr::gcd_i64(g, k as i64);
                    }
                }
            }
            assert_eq!(g, 1, "output not proper at pole {}", a.source_pole);
            // minimal degree: asymptote degree equals the branch degree
            assert_eq!(
                a.base_exponent, b.degree,
                "asymptote degree differs from branch degree at {}",
                a.source_pole
            );
        }
    }
}

#[test]
fn idempotence_on_own_parametrization() {
    let curve = meromorphic_curve();
    let out = all_asymptotes(
        &curve,
        &Window::new(-1.0, 1.0, -1.0, 1.0),
        &Options::default(),
    )
    .unwrap();
    let a = &out.asymptotes[0];
    let again_curve = a.as_curve().unwrap();
    let again = all_asymptotes(
        &again_curve,
        &Window::new(-0.5, 0.5, -0.5, 0.5),
        &Options::default(),
    )
    .unwrap();
    assert_eq!(again.asymptotes.len(), 1);
    assert!(
        reparametrization_equivalent(a, &again.asymptotes[0], 1e-8),
        "asymptote is not a fixed point of the pipeline"
    );
}

#[test]
fn input_branch_converges_to_output_branch() {
    let curve = rational_curve();
    let out = all_asymptotes(&curve, &Window::default(), &Options::default()).unwrap();
    for (a, b) in out.asymptotes.iter().zip(&out.branches) {
        if a.kind != AsymptoteKind::Generic {
            continue;
        }
        let own = a.as_curve().unwrap();
        let pole = pole_at(&own, &Window::new(-0.5, 0.5, -0.5, 0.5), c(0.0, 0.0));
        let own_branch = branch_series(&own, &pole, 1).unwrap();
        assert!(
            converge(b, &own_branch),
            "output asymptote branch does not converge at {}",
            a.source_pole
        );
    }
}

#[test]
fn reparametrization_equivalence_detects_unity_roots() {
    let curve = rational_curve();
    let pole = pole_at(&curve, &Window::default(), c(0.0, 0.0));
    let b = branch_series(&curve, &pole, 1).unwrap();
    let real_form = asymptote_from_branch(&b);
    // the same asymptote written on the cube-root-of-unity leaf
    let mut other = real_form.clone();
    let xi = c(-0.5, 3.0f64.sqrt() / 2.0);
    let mut power = c(1.0, 0.0);
    for coeff in other.coordinates[0].coefficients.iter_mut() {
        *coeff *= power;
        power *= xi;
    }
    assert!(reparametrization_equivalent(&real_form, &other, 1e-9));
    // while a genuinely different curve is rejected
    let mut wrong = real_form.clone();
    wrong.coordinates[0].coefficients[1] *= c(1.01, 0.0);
    assert!(!reparametrization_equivalent(&real_form, &wrong, 1e-9));
}

#[test]
fn beyond_hypotheses_flagged_for_vanishing_component() {
    // second component -> 0 at the pole: numerator order exceeds denominator
    let curve = CurveParam::new(vec![parse("1/s^2").unwrap(), parse("s^3/s").unwrap()]).unwrap();
    let out = all_asymptotes(&curve, &Window::default(), &Options::default()).unwrap();
    assert_eq!(out.asymptotes.len(), 1);
    let a = &out.asymptotes[0];
    assert!(a.beyond_hypotheses);
    assert_eq!(a.kind, AsymptoteKind::HorizontalLine);
    assert!(coeffs(a, 0)[0].norm() < 1e-12);
}
