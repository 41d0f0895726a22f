//! Pole location inside a search window and fractional order
//! classification.
//!
//! Candidate points come from the multiplicative structure of each
//! component: zeros of every quotient denominator and of every base raised
//! to a negative power, collected recursively. Polynomial factors are
//! reduced to their exact square-free part and solved by Durand-Kerner with
//! Newton polish; `sin`/`cos` factors with affine arguments enumerate their
//! zero lattice; any other factor is scanned by damped Newton from a grid,
//! once per leaf of the fractional powers it contains. Transcendental
//! denominators have infinitely many zeros, which is why a bounded window is
//! part of the contract.
//!
//! Classification then expands numerator and denominator of every component
//! at each candidate and reads off the fractional vanishing orders; a
//! candidate survives as a pole when at least one component blows up.

mod roots;

use crate::expr::transform::LeafAssignment;
use crate::expr::{fractional_power_bases, split, CurveParam, Expr, GaussianRational, Rat, C};
use crate::series::{expand_at_with_tol, SeriesError};
use crate::Options;
use num::{Signed, Zero};

/// Axis-aligned search rectangle in the complex parameter plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            re_min: -10.0,
            re_max: 10.0,
            im_min: -10.0,
            im_max: 10.0,
        }
    }
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Window {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    pub fn contains(&self, z: C) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Containment with a hair of slack so boundary roots are not lost to
    /// rounding.
    pub(crate) fn contains_loose(&self, z: C) -> bool {
        let eps = 1e-9 * (1.0 + self.diagonal());
        z.re >= self.re_min - eps
            && z.re <= self.re_max + eps
            && z.im >= self.im_min - eps
            && z.im <= self.im_max + eps
    }

    pub fn diagonal(&self) -> f64 {
        let dr = self.re_max - self.re_min;
        let di = self.im_max - self.im_min;
        (dr * dr + di * di).sqrt()
    }

    /// Parses `xmin,xmax,ymin,ymax`.
    pub fn parse(text: &str) -> Result<Window, String> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 4 {
            return Err("window needs four comma-separated numbers".into());
        }
        let mut v = [0.0f64; 4];
        for (slot, raw) in v.iter_mut().zip(&parts) {
            *slot = raw
                .trim()
                .parse()
                .map_err(|_| format!("bad window coordinate '{raw}'"))?;
        }
        if v[0] >= v[1] || v[2] >= v[3] {
            return Err("window must have positive extent".into());
        }
        Ok(Window::new(v[0], v[1], v[2], v[3]))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PoleError {
    #[error("unsupported denominator structure: {0}")]
    UnsupportedStructure(String),
    #[error("series expansion failed at a pole candidate: {0}")]
    Series(#[from] SeriesError),
}

/// Vanishing orders of one component at a pole.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentOrders {
    pub numerator: Rat,
    pub denominator: Rat,
}

/// A pole of the parametrization with everything the cascade needs.
#[derive(Clone, Debug)]
pub struct PoleData {
    /// The pole location (refined numerically).
    pub location: C,
    /// Exactly verified Gaussian-rational value of the location, if any.
    pub exact: Option<GaussianRational>,
    /// Per-component fractional orders (numerator, denominator), both
    /// nonnegative after rebalancing.
    pub orders: Vec<ComponentOrders>,
    /// lcm of all order denominators; the reparametrization exponent.
    pub gamma: i64,
    /// Reduced integer blow-up orders per component: positive means the
    /// component tends to infinity at this pole.
    pub reduced_orders: Vec<i64>,
    /// Branch leaf on which this pole lives; principal for ordinary poles.
    pub leaf: LeafAssignment,
    /// Display form of the denominator factor that vanishes here.
    pub defining_factor: Option<String>,
}

impl PoleData {
    /// Index of the component with maximal blow-up (lowest index on ties).
    pub fn pivot(&self) -> usize {
        let mut best = 0;
        for (i, &n) in self.reduced_orders.iter().enumerate() {
            if n > self.reduced_orders[best] {
                best = i;
            }
        }
        best
    }

    pub fn max_reduced_order(&self) -> i64 {
        *self.reduced_orders.iter().max().unwrap()
    }
}

/// Fractional vanishing orders of `numerator` and `denominator` at `tau`,
/// read off as leading exponents of local expansions and rebalanced so both
/// are nonnegative.
pub fn classify_orders(
    numerator: &Expr,
    denominator: &Expr,
    tau: C,
) -> Result<(Rat, Rat), PoleError> {
    classify_orders_with_tol(numerator, denominator, tau, 1e-10)
}

fn classify_orders_with_tol(
    numerator: &Expr,
    denominator: &Expr,
    tau: C,
    tol: f64,
) -> Result<(Rat, Rat), PoleError> {
    let nu = vanishing_order(numerator, tau, tol)?;
    let de = vanishing_order(denominator, tau, tol)?;
    let shift = nu.min(de).min(Rat::zero());
    Ok((nu - shift, de - shift))
}

/// Leading exponent of the local expansion; a series that stays zero out to
/// a deep truncation is treated as vanishing to that whole order.
fn vanishing_order(e: &Expr, tau: C, tol: f64) -> Result<Rat, PoleError> {
    for depth in [8i64, 24, 64] {
        let s = expand_at_with_tol(e, tau, Rat::from_integer(depth), tol)?;
        match s.leading() {
            Ok((lead, _)) => return Ok(lead),
            Err(_) => continue,
        }
    }
    Ok(Rat::from_integer(64))
}

/// Finds every pole of the parametrization inside the window.
pub fn find_poles(curve: &CurveParam, window: &Window) -> Result<Vec<PoleData>, PoleError> {
    find_poles_with(curve, window, &Options::default())
}

pub fn find_poles_with(
    curve: &CurveParam,
    window: &Window,
    options: &Options,
) -> Result<Vec<PoleData>, PoleError> {
    let mut factors: Vec<Expr> = Vec::new();
    for component in curve.components() {
        let mut dens: Vec<Expr> = Vec::new();
        denominator_like(&component.expr, &mut dens);
        for d in dens {
            for f in flatten_factors(&d) {
                if !factors.contains(&f) {
                    factors.push(f);
                }
            }
        }
    }

    let mut candidates: Vec<(C, LeafAssignment, String)> = Vec::new();
    for factor in &factors {
        for (z, leaf) in factor_zeros(factor, window)? {
            push_candidate(&mut candidates, z, leaf, factor.to_string());
        }
    }

    let mut poles = Vec::new();
    for (location, leaf, defining) in candidates {
        if !window.contains_loose(location) {
            continue;
        }
        let leafed = curve.with_leaf(&leaf);
        let mut orders = Vec::with_capacity(curve.dimension());
        let mut gamma = 1i64;
        for component in leafed.components() {
            let (nu, de) = classify_orders_with_tol(
                &component.numerator,
                &component.denominator,
                location,
                options.tolerance,
            )?;
            gamma = crate::expr::lcm_i64(gamma, *nu.denom());
            gamma = crate::expr::lcm_i64(gamma, *de.denom());
            orders.push(ComponentOrders {
                numerator: nu,
                denominator: de,
            });
        }
        let reduced: Vec<i64> = orders
            .iter()
            .map(|o| {
                let n = (o.denominator - o.numerator) * gamma;
                debug_assert!(n.is_integer());
                n.to_integer()
            })
            .collect();
        if reduced.iter().all(|&n| n < 1) {
            continue;
        }
        let exact = exact_location(curve, &leaf, location);
        let location = exact
            .as_ref()
            .map(GaussianRational::to_c)
            .unwrap_or(location);
        poles.push(PoleData {
            location,
            exact,
            orders,
            gamma,
            reduced_orders: reduced,
            leaf,
            defining_factor: Some(defining),
        });
    }

    sort_poles(&mut poles);
    Ok(poles)
}

/// Collects subexpressions whose zeros are pole candidates: denominators of
/// quotients and bases of negative powers, at any depth.
fn denominator_like(e: &Expr, out: &mut Vec<Expr>) {
    match e {
        Expr::Div(a, b) => {
            out.push((**b).clone());
            denominator_like(a, out);
            denominator_like(b, out);
        }
        Expr::Pow { base, exponent, .. } => {
            if exponent.is_negative() {
                out.push((**base).clone());
            }
            denominator_like(base, out);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            denominator_like(a, out);
            denominator_like(b, out);
        }
        Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => denominator_like(a, out),
        _ => {}
    }
}

/// Multiplicative factors of an expression; positive powers defer to their
/// base (same zero set), constants vanish nowhere and are dropped.
fn flatten_factors(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    flatten_rec(e, &mut out);
    out
}

fn flatten_rec(e: &Expr, out: &mut Vec<Expr>) {
    match e {
        Expr::Mul(a, b) => {
            flatten_rec(a, out);
            flatten_rec(b, out);
        }
        Expr::Neg(a) => flatten_rec(a, out),
        Expr::Pow { base, exponent, .. } if exponent.is_positive() => flatten_rec(base, out),
        _ => {
            if !e.is_constant() && !out.contains(e) {
                out.push(e.clone());
            }
        }
    }
}

fn push_candidate(
    candidates: &mut Vec<(C, LeafAssignment, String)>,
    z: C,
    leaf: LeafAssignment,
    defining: String,
) {
    for (existing, existing_leaf, _) in candidates.iter() {
        if existing_leaf == &leaf && (z - *existing).norm() < 1e-8 * (1.0 + existing.norm()) {
            return;
        }
    }
    candidates.push((z, leaf, defining));
}

/// Zeros of one factor inside the window, each tagged with the leaf it was
/// found on.
fn factor_zeros(factor: &Expr, window: &Window) -> Result<Vec<(C, LeafAssignment)>, PoleError> {
    let principal = LeafAssignment::principal();

    if let Some(exact) = roots::exact_coeffs(factor) {
        if exact.len() >= 2 {
            let square_free = roots::exact_square_free(&exact);
            let coeffs = roots::exact_to_c_poly(&square_free);
            return Ok(polished_poly_roots(factor, &coeffs, window)
                .into_iter()
                .map(|z| (z, principal.clone()))
                .collect());
        }
        return Ok(Vec::new());
    }
    if let Some(coeffs) = roots::float_coeffs(factor) {
        if coeffs.len() >= 2 {
            return Ok(polished_poly_roots(factor, &coeffs, window)
                .into_iter()
                .map(|z| (z, principal.clone()))
                .collect());
        }
        return Ok(Vec::new());
    }

    match factor {
        Expr::Exp(_) => Ok(Vec::new()),
        Expr::Sin(g) | Expr::Cos(g) => {
            let offset = if matches!(factor, Expr::Sin(_)) {
                0.0
            } else {
                std::f64::consts::FRAC_PI_2
            };
            if let Some(ab) = affine_parts(g) {
                return Ok(lattice_zeros(factor, ab, offset, window)
                    .into_iter()
                    .map(|z| (z, principal.clone()))
                    .collect());
            }
            scan_with_leaves(factor, window)
        }
        _ => scan_with_leaves(factor, window),
    }
}

/// `g = a*s + b` with `a != 0`, allowing `pi` and `I` in the constants.
fn affine_parts(g: &Expr) -> Option<(C, C)> {
    let coeffs = crate::expr::polynomial_coefficients(g)?;
    match coeffs.len() {
        2 if coeffs[1].norm() > 0.0 => Some((coeffs[1], coeffs[0])),
        _ => None,
    }
}

/// Zeros of sin/cos with an affine argument: the lattice `(k*pi + offset - b)/a`.
fn lattice_zeros(factor: &Expr, (a, b): (C, C), offset: f64, window: &Window) -> Vec<C> {
    let pi = std::f64::consts::PI;
    // |k| bounded by how large |a*z + b| can get over the window.
    let corner_max = [
        C::new(window.re_min, window.im_min),
        C::new(window.re_min, window.im_max),
        C::new(window.re_max, window.im_min),
        C::new(window.re_max, window.im_max),
    ]
    .iter()
    .map(|&z| (a * z + b).norm())
    .fold(0.0, f64::max);
    let kmax = ((corner_max + offset.abs()) / pi).ceil() as i64 + 1;
    let mut out = Vec::new();
    for k in -kmax..=kmax {
        let target = C::new(offset + k as f64 * pi, 0.0);
        let z = (target - b) / a;
        if window.contains_loose(z) && roots::residual_ok(factor, z) {
            roots::merge_root(&mut out, z);
        }
    }
    out
}

fn polished_poly_roots(factor: &Expr, coeffs: &[C], window: &Window) -> Vec<C> {
    let raw = roots::durand_kerner(coeffs);
    let df = crate::expr::derivative(factor);
    let mut out = Vec::new();
    for z in raw {
        let polished = roots::newton_polish(factor, &df, z, 12).unwrap_or(z);
        if window.contains_loose(polished) && roots::residual_ok(factor, polished) {
            roots::merge_root(&mut out, polished);
        }
    }
    out
}

/// Grid Newton over every leaf assignment of the fractional powers in the
/// factor. The principal assignment is always scanned first.
fn scan_with_leaves(factor: &Expr, window: &Window) -> Result<Vec<(C, LeafAssignment)>, PoleError> {
    let bases = fractional_power_bases(factor);
    let mut total: i64 = 1;
    for (_, period) in &bases {
        total = total.saturating_mul(*period);
        if total > 64 {
            return Err(PoleError::UnsupportedStructure(format!(
                "factor {factor} has too many fractional-power leaves"
            )));
        }
    }
    let mut results = Vec::new();
    let mut windings = vec![0i64; bases.len()];
    loop {
        let assignment = LeafAssignment::new(
            bases
                .iter()
                .zip(&windings)
                .map(|((base, _), &w)| (base.clone(), w as i32))
                .collect(),
        );
        let leafed = assignment.apply(factor);
        for z in roots::grid_scan(&leafed, window) {
            results.push((z, assignment.clone()));
        }
        // advance the mixed-radix winding counter
        let mut i = 0;
        loop {
            if i == bases.len() {
                return Ok(results);
            }
            windings[i] += 1;
            if windings[i] < bases[i].1 {
                break;
            }
            windings[i] = 0;
            i += 1;
        }
    }
}

/// Exact promotion: only meaningful on the principal leaf, and only when a
/// vanishing denominator factor admits exact evaluation.
fn exact_location(curve: &CurveParam, leaf: &LeafAssignment, z: C) -> Option<GaussianRational> {
    if !leaf.is_principal() {
        return None;
    }
    for component in curve.components() {
        let (_, den) = split(&component.expr);
        for factor in flatten_factors(&den) {
            if let Ok(v) = crate::expr::evaluate(&factor, z) {
                if v.norm() < 1e-6 {
                    if let Some(exact) = roots::exact_promote(&factor, z) {
                        return Some(exact);
                    }
                }
            }
        }
    }
    None
}

/// Orders a list of poles deterministically (by real part, then imaginary
/// part, then leaf); exposed for callers that assemble their own lists.
pub fn sort_poles(poles: &mut [PoleData]) {
    poles.sort_by(|a, b| {
        (a.location.re, a.location.im, a.leaf.canonical_key())
            .partial_cmp(&(b.location.re, b.location.im, b.leaf.canonical_key()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

#[cfg(test)]
mod tests;
