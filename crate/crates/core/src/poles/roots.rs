//! Numeric zero finding for denominator factors.
//!
//! Polynomial factors go through an exact square-free reduction (so repeated
//! roots collapse before any floating point is involved) and a
//! Durand-Kerner sweep. Factors of `sin`/`cos` with affine arguments use the
//! zero lattice directly. Everything else falls back to damped Newton from a
//! deterministic grid over the window.

use super::Window;
use crate::expr::eval::{evaluate, GaussianRational};
use crate::expr::transform::polynomial_coefficients_exact;
use crate::expr::{derivative, polynomial_coefficients, Expr, C};
use num::BigRational;

const DK_ITERS: usize = 400;
const NEWTON_ITERS: usize = 80;

/// Roots of a complex-coefficient polynomial (ascending coefficients) via
/// Durand-Kerner. The caller is responsible for square-free input; repeated
/// roots still converge, just slowly, and cluster around the true value.
pub(crate) fn durand_kerner(coeffs: &[C]) -> Vec<C> {
    let mut cs: Vec<C> = coeffs.to_vec();
    while cs.last().map(|c| c.norm() == 0.0) == Some(true) {
        cs.pop();
    }
    if cs.len() < 2 {
        return Vec::new();
    }
    let lead = *cs.last().unwrap();
    for c in cs.iter_mut() {
        *c /= lead;
    }
    let n = cs.len() - 1;
    let radius = 1.0 + cs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<C> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.35) / n as f64;
            C::new(angle.cos(), angle.sin()) * (0.6 * radius)
        })
        .collect();
    let eval = |x: C| -> C {
        let mut acc = C::new(0.0, 0.0);
        for &c in cs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    for _ in 0..DK_ITERS {
        let mut moved = 0.0f64;
        for k in 0..n {
            let mut denom = C::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                z[k] += C::new(1e-6, 2e-6);
                continue;
            }
            let step = eval(z[k]) / denom;
            z[k] -= step;
            moved = moved.max(step.norm() / (1.0 + z[k].norm()));
        }
        if moved < 1e-14 {
            break;
        }
    }
    z
}

type ExactPoly = Vec<GaussianRational>;

fn exact_poly_trim(p: &mut ExactPoly) {
    while p.len() > 1 && p.last().map(GaussianRational::is_zero) == Some(true) {
        p.pop();
    }
}

fn exact_poly_derivative(p: &ExactPoly) -> ExactPoly {
    if p.len() <= 1 {
        return vec![GaussianRational::from_integer(0)];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.product(&GaussianRational::from_integer(k as i64)))
        .collect()
}

/// Remainder of the Euclidean division a mod b over the Gaussian rationals.
fn exact_poly_rem(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
    let mut r = a.clone();
    exact_poly_trim(&mut r);
    let mut bb = b.clone();
    exact_poly_trim(&mut bb);
    let db = bb.len() - 1;
    let lead = bb.last().unwrap().clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let q = r.last().unwrap().quotient(&lead).unwrap();
        for k in 0..=db {
            let t = q.product(&bb[k]);
            r[dr - db + k] = r[dr - db + k].difference(&t);
        }
        r.pop();
        exact_poly_trim(&mut r);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
    }
    r
}

fn exact_poly_gcd(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    exact_poly_trim(&mut x);
    exact_poly_trim(&mut y);
    while !(y.len() == 1 && y[0].is_zero()) {
        let r = exact_poly_rem(&x, &y);
        x = y;
        y = r;
    }
    // monic normalization
    let lead = x.last().unwrap().clone();
    if !lead.is_zero() {
        for c in x.iter_mut() {
            *c = c.quotient(&lead).unwrap();
        }
    }
    x
}

/// Exact quotient a / b when the division is exact (used for p / gcd(p, p')).
fn exact_poly_div(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
    let mut r = a.clone();
    exact_poly_trim(&mut r);
    let mut bb = b.clone();
    exact_poly_trim(&mut bb);
    let db = bb.len() - 1;
    let lead = bb.last().unwrap().clone();
    if r.len() <= db {
        return vec![GaussianRational::from_integer(0)];
    }
    let mut q = vec![GaussianRational::from_integer(0); r.len() - db];
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let qc = r.last().unwrap().quotient(&lead).unwrap();
        q[dr - db] = qc.clone();
        for k in 0..=db {
            let t = qc.product(&bb[k]);
            r[dr - db + k] = r[dr - db + k].difference(&t);
        }
        r.pop();
        exact_poly_trim(&mut r);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
    }
    q
}

/// The square-free part of an exact polynomial: p / gcd(p, p').
pub(crate) fn exact_square_free(p: &ExactPoly) -> ExactPoly {
    let mut q = p.clone();
    exact_poly_trim(&mut q);
    if q.len() <= 2 {
        return q;
    }
    let d = exact_poly_derivative(&q);
    let g = exact_poly_gcd(&q, &d);
    if g.len() <= 1 {
        return q;
    }
    exact_poly_div(&q, &g)
}

/// Newton refinement of a candidate zero of `f`; returns the polished point
/// when it stays finite.
pub(crate) fn newton_polish(f: &Expr, df: &Expr, start: C, iters: usize) -> Option<C> {
    let mut z = start;
    for _ in 0..iters {
        let fv = evaluate(f, z).ok()?;
        if fv.norm() == 0.0 {
            return Some(z);
        }
        let dv = evaluate(df, z).ok()?;
        if dv.norm() == 0.0 {
            return Some(z);
        }
        let mut step = fv / dv;
        let cap = 1.0 + z.norm();
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    if z.is_finite() {
        Some(z)
    } else {
        None
    }
}

/// Local magnitude scale of `f` near `z`, for residual validation.
pub(crate) fn local_scale(f: &Expr, z: C) -> f64 {
    let delta = 1e-3 * (1.0 + z.norm());
    let probes = [
        z + C::new(delta, 0.43 * delta),
        z + C::new(-0.71 * delta, delta),
    ];
    let mut scale = 1.0f64;
    for p in probes {
        if let Ok(v) = evaluate(f, p) {
            scale = scale.max(v.norm());
        }
    }
    scale
}

/// True when the residual at the polished point is small relative to the
/// local magnitude of the factor.
pub(crate) fn residual_ok(f: &Expr, z: C) -> bool {
    match evaluate(f, z) {
        Ok(v) => v.norm() <= 1e-12 * local_scale(f, z),
        Err(_) => false,
    }
}

/// Damped Newton from a deterministic grid across the window.
pub(crate) fn grid_scan(f: &Expr, window: &Window) -> Vec<C> {
    let df = derivative(f);
    let diag = window.diagonal();
    let step_re = ((window.re_max - window.re_min) / 24.0).max(1e-3);
    let step_im = ((window.im_max - window.im_min) / 24.0).max(1e-3);
    let mut found: Vec<C> = Vec::new();
    let mut re = window.re_min + 0.5 * step_re;
    while re < window.re_max {
        let mut im = window.im_min + 0.5 * step_im;
        while im < window.im_max {
            if let Some(z) = newton_scan_from(f, &df, C::new(re, im), diag) {
                if window.contains_loose(z) && residual_ok(f, z) {
                    merge_root(&mut found, z);
                }
            }
            im += step_im;
        }
        re += step_re;
    }
    found
}

fn newton_scan_from(f: &Expr, df: &Expr, start: C, diag: f64) -> Option<C> {
    let mut z = start;
    for _ in 0..NEWTON_ITERS {
        let fv = evaluate(f, z).ok()?;
        let dv = evaluate(df, z).ok()?;
        if dv.norm() == 0.0 {
            return None;
        }
        let mut step = fv / dv;
        let cap = 0.5 * (1.0 + z.norm());
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        z -= step;
        if z.norm() > 4.0 * diag + 20.0 {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

pub(crate) fn merge_root(found: &mut Vec<C>, z: C) {
    for existing in found.iter() {
        if (z - *existing).norm() < 1e-8 * (1.0 + existing.norm()) {
            return;
        }
    }
    found.push(z);
}

/// Attempts to promote a numeric location to an exactly verified Gaussian
/// rational zero of `factor`.
pub(crate) fn exact_promote(factor: &Expr, z: C) -> Option<GaussianRational> {
    let re = rationalize(z.re)?;
    let im = rationalize(z.im)?;
    let cand = GaussianRational::new(re, im);
    let back = cand.to_c();
    if (back - z).norm() > 1e-9 * (1.0 + z.norm()) {
        return None;
    }
    match crate::expr::evaluate_exact(factor, &cand) {
        Some(v) if v.is_zero() => Some(cand),
        _ => None,
    }
}

/// Small-denominator rational reconstruction by continued fractions.
fn rationalize(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.round() as i64, 1i64);
    let mut frac = x - x.round();
    for _ in 0..24 {
        let approx = p1 as f64 / q1 as f64;
        if (approx - x).abs() <= 1e-12 * (1.0 + x.abs()) && q1.abs() <= 1_000_000 {
            return Some(BigRational::new(p1.into(), q1.into()));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.round();
        if a.abs() > 1e15 {
            break;
        }
        frac = inv - a;
        let a = a as i64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    let approx = p1 as f64 / q1 as f64;
    if q1 != 0 && (approx - x).abs() <= 1e-12 * (1.0 + x.abs()) && q1.abs() <= 1_000_000 {
        Some(BigRational::new(p1.into(), q1.into()))
    } else {
        None
    }
}

pub(crate) fn exact_to_c_poly(p: &ExactPoly) -> Vec<C> {
    p.iter().map(GaussianRational::to_c).collect()
}

pub(crate) fn exact_coeffs(e: &Expr) -> Option<ExactPoly> {
    polynomial_coefficients_exact(e)
}

pub(crate) fn float_coeffs(e: &Expr) -> Option<Vec<C>> {
    polynomial_coefficients(e)
}
