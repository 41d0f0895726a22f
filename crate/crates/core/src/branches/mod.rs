//! Infinity branches via the limit cascade, with an independent
//! series-reversion oracle.
//!
//! At a pole `tau` the curve runs off to infinity; after pulling the
//! parameter back through `s = tau + w^gamma` every component becomes a
//! Laurent series in the uniformizing variable `w` with integer orders. With
//! `z` the pivot component and `W = z^(1/n1)` its principal root, the branch
//! series
//!
//! ```text
//! r(z) = a_k z^(k/n1) + a_(k-1) z^((k-1)/n1) + ... + a_0 + a_(-1) z^(-1/n1) + ...
//! ```
//!
//! has coefficients that are limits of the recursive differences
//! `g_(i+1) = W * (g_i - a_i)`; in the series ring every such limit is just
//! the constant coefficient of `g_i`, so the whole cascade is exact
//! bookkeeping on truncated series. A diverging limit (a stray negative
//! exponent) means the pole violates the preparation hypotheses and is
//! reported as an error rather than silently mangled.
//!
//! The oracle route computes the same series without any cascade: invert
//! `W(w)` as a power series, compose the other components with the inverse,
//! and read the branch coefficients off directly. The two routes share
//! nothing but the local expansions, which is what makes their agreement a
//! meaningful check.

use crate::asymptotes::GAsymptote;
use crate::expr::eval::cpow;
use crate::expr::{gcd_i64, CurveParam, Rat, C};
use crate::poles::{PoleData, PoleError};
use crate::series::{Center, PuiseuxSeries, SeriesError};
use crate::Options;
use num::{Signed, Zero};

#[derive(Debug, thiserror::Error)]
pub enum BranchError {
    #[error("the component with maximal blow-up does not actually blow up here")]
    NotAPole,
    #[error("cascade limit diverged for component {component}: {detail}")]
    Diverged { component: usize, detail: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Pole(#[from] PoleError),
    #[error("curve sampling failed: {0}")]
    Sampling(String),
}

/// One non-pivot coordinate of a branch: the series `r_j(z)` stored at
/// center infinity (keys are exponents of `1/z`).
#[derive(Clone, Debug)]
pub struct BranchCoord {
    pub component: usize,
    pub series: PuiseuxSeries,
}

impl BranchCoord {
    /// Terms with nonnegative exponent in `z`, as (z-exponent, coefficient).
    pub fn head(&self) -> Vec<(Rat, C)> {
        self.series
            .terms()
            .filter(|(e, _)| !e.is_positive())
            .map(|(e, c)| (-e, c))
            .collect()
    }

    /// Terms with negative exponent in `z`.
    pub fn tail(&self) -> Vec<(Rat, C)> {
        self.series
            .terms()
            .filter(|(e, _)| e.is_positive())
            .map(|(e, c)| (-e, c))
            .collect()
    }
}

/// An infinity branch of the curve at one pole.
#[derive(Clone, Debug)]
pub struct InfinityBranch {
    pub pole: PoleData,
    /// Index of the component playing the role of `z`.
    pub pivot: usize,
    /// Number of leaves of the branch; the pivot blow-up order.
    pub ramification_index: i64,
    /// Branch series of every non-pivot component, in component order.
    pub coords: Vec<BranchCoord>,
    /// Degree of the branch after reducing the nonnegative exponents.
    pub degree: i64,
    /// Projective point the branch tends to, last coordinate 0, leading
    /// nonzero coordinate normalized to 1.
    pub infinity_point: Vec<C>,
}

impl InfinityBranch {
    pub fn coord_for(&self, component: usize) -> Option<&BranchCoord> {
        self.coords.iter().find(|c| c.component == component)
    }
}

/// Shared preparation: local expansions of every component at the pole,
/// pulled back through `s = tau + w^gamma` (exact exponent scaling).
fn uniformized_components(
    curve: &CurveParam,
    pole: &PoleData,
    ramified_depth: i64,
    options: &Options,
) -> Result<Vec<PuiseuxSeries>, BranchError> {
    let leafed = curve.with_leaf(&pole.leaf);
    let gamma = Rat::from_integer(pole.gamma);
    let depth = Rat::from_integer(ramified_depth) / gamma;
    let mut out = Vec::with_capacity(leafed.dimension());
    for component in leafed.components() {
        let s = crate::series::expand_at_with_tol(
            &component.expr,
            pole.location,
            depth,
            options.tolerance,
        )?;
        out.push(s.scale_exponents(gamma));
    }
    Ok(out)
}

struct CascadePrep {
    pivot: usize,
    n1: i64,
    series: Vec<PuiseuxSeries>,
}

fn prepare(
    curve: &CurveParam,
    pole: &PoleData,
    options: &Options,
    tail_terms: usize,
) -> Result<CascadePrep, BranchError> {
    let pivot = pole.pivot();
    let n1 = pole.reduced_orders[pivot];
    if n1 < 1 {
        return Err(BranchError::NotAPole);
    }
    let n2max = pole
        .reduced_orders
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pivot)
        .map(|(_, &n)| n.max(0))
        .max()
        .unwrap_or(0);
    let ramified_depth = n2max + options.head_margin() + tail_terms as i64 + n1 + 4;
    let series = uniformized_components(curve, pole, ramified_depth, options)?;
    Ok(CascadePrep { pivot, n1, series })
}

/// Computes the infinity branch at `pole` by the limit cascade.
pub fn branch_series(
    curve: &CurveParam,
    pole: &PoleData,
    tail_terms: usize,
) -> Result<InfinityBranch, BranchError> {
    branch_series_with(curve, pole, tail_terms, &Options::default())
}

pub fn branch_series_with(
    curve: &CurveParam,
    pole: &PoleData,
    tail_terms: usize,
    options: &Options,
) -> Result<InfinityBranch, BranchError> {
    let prep = prepare(curve, pole, options, tail_terms)?;
    let root = prep.series[prep.pivot].pow_rational(Rat::new(1, prep.n1))?;
    let mut coords = Vec::new();
    for (j, s) in prep.series.iter().enumerate() {
        if j == prep.pivot {
            continue;
        }
        let nj = pole.reduced_orders[j];
        let coeffs = cascade_coefficients(s, &root, nj, tail_terms, j)?;
        coords.push(make_coord(j, prep.n1, tail_terms, coeffs, options));
    }
    Ok(assemble(curve, pole, prep.pivot, prep.n1, coords))
}

/// The recursive limits: `a_k` for `k = start` down to `-tail_terms`.
fn cascade_coefficients(
    component: &PuiseuxSeries,
    root: &PuiseuxSeries,
    start: i64,
    tail_terms: usize,
    index: usize,
) -> Result<Vec<(i64, C)>, BranchError> {
    let stop = -(tail_terms as i64);
    if start < stop {
        return Ok(Vec::new());
    }
    // g = component / W^start
    let mut g = component.mul(&root.powi(-start)?)?;
    let mut out = Vec::with_capacity((start - stop + 1) as usize);
    for k in (stop..=start).rev() {
        if g.truncation() <= Rat::zero() {
            return Err(BranchError::Series(SeriesError::DepthExhausted(format!(
                "cascade for component {index} ran out of series orders at index {k}"
            ))));
        }
        match g.leading() {
            Err(_) => {
                // identically zero to truncation: every further limit is 0
                out.push((k, C::zero()));
            }
            Ok((lead, _)) if lead.is_negative() => {
                return Err(BranchError::Diverged {
                    component: index,
                    detail: format!(
                        "limit at index {k} has leading exponent {lead}; the pole violates \
                         the order hypotheses"
                    ),
                });
            }
            Ok(_) => {
                let a = g.coeff(Rat::zero());
                out.push((k, a));
            }
        }
        if k > stop {
            let a = out.last().unwrap().1;
            let centered = g.sub(&PuiseuxSeries::constant(g.center(), a, g.truncation()))?;
            g = root.mul(&centered)?;
        }
    }
    Ok(out)
}

/// Computes the same branch without the cascade: invert `W(w)` as a series,
/// compose, and read coefficients directly.
pub fn branch_series_oracle(
    curve: &CurveParam,
    pole: &PoleData,
    tail_terms: usize,
) -> Result<InfinityBranch, BranchError> {
    branch_series_oracle_with(curve, pole, tail_terms, &Options::default())
}

pub fn branch_series_oracle_with(
    curve: &CurveParam,
    pole: &PoleData,
    tail_terms: usize,
    options: &Options,
) -> Result<InfinityBranch, BranchError> {
    let prep = prepare(curve, pole, options, tail_terms)?;
    // W(w) = pivot^(-1/n1) has a simple zero; its reversion gives w(W).
    let w_of = prep.series[prep.pivot].pow_rational(Rat::new(-1, prep.n1))?;
    let w_inverse = w_of.revert()?;
    let mut coords = Vec::new();
    for (j, s) in prep.series.iter().enumerate() {
        if j == prep.pivot {
            continue;
        }
        let composed = s.compose(&w_inverse)?;
        if composed.truncation() <= Rat::from_integer(tail_terms as i64) {
            return Err(BranchError::Series(SeriesError::DepthExhausted(format!(
                "oracle composition too shallow for component {j}"
            ))));
        }
        let nj = pole.reduced_orders[j];
        let stop = -(tail_terms as i64);
        let mut coeffs = Vec::new();
        for k in (stop..=nj).rev() {
            coeffs.push((k, composed.coeff(Rat::from_integer(-k))));
        }
        coords.push(make_coord(j, prep.n1, tail_terms, coeffs, options));
    }
    Ok(assemble(curve, pole, prep.pivot, prep.n1, coords))
}

fn make_coord(
    component: usize,
    n1: i64,
    tail_terms: usize,
    coeffs: Vec<(i64, C)>,
    options: &Options,
) -> BranchCoord {
    let terms: Vec<(Rat, C)> = coeffs.iter().map(|&(k, a)| (Rat::new(-k, n1), a)).collect();
    let truncation = Rat::new(tail_terms as i64 + 1, n1);
    BranchCoord {
        component,
        series: PuiseuxSeries::with_tol(Center::Infinity, terms, truncation, options.tolerance),
    }
}

fn assemble(
    curve: &CurveParam,
    pole: &PoleData,
    pivot: usize,
    n1: i64,
    coords: Vec<BranchCoord>,
) -> InfinityBranch {
    // Degree: reduce the nonnegative exponents by their gcd with n1.
    let head_max = coords
        .iter()
        .flat_map(|c| c.head())
        .map(|(_, v)| v.norm())
        .fold(0.0f64, f64::max);
    let threshold = 1e-9 * head_max.max(1e-30);
    let mut g = n1;
    for coord in &coords {
        for (e, v) in coord.head() {
            let k = (e * n1).to_integer();
            if k >= 1 && v.norm() > threshold {
                g = gcd_i64(g, k);
            }
        }
    }
    let degree = n1 / g;

    // Infinity point: normalized direction of the blow-up.
    let mut point = vec![C::zero(); curve.dimension() + 1];
    point[pivot] = C::new(1.0, 0.0);
    for coord in &coords {
        if pole.reduced_orders[coord.component] == n1 {
            point[coord.component] = coord.series.coeff(Rat::new(-n1, n1));
        }
    }

    InfinityBranch {
        pole: pole.clone(),
        pivot,
        ramification_index: n1,
        coords,
        degree,
        infinity_point: point,
    }
}

/// Projective infinity point associated to the pole, computed from the
/// leading behavior of the components (no cascade needed).
pub fn infinity_point(curve: &CurveParam, pole: &PoleData) -> Result<Vec<C>, BranchError> {
    let options = Options::default();
    let prep = prepare(curve, pole, &options, 0)?;
    let mut point = vec![C::zero(); curve.dimension() + 1];
    point[prep.pivot] = C::new(1.0, 0.0);
    for (j, s) in prep.series.iter().enumerate() {
        if j == prep.pivot || pole.reduced_orders[j] != prep.n1 {
            continue;
        }
        let ratio = s.div(&prep.series[prep.pivot])?;
        if let Ok((lead, v)) = ratio.leading() {
            if lead.is_zero() {
                point[j] = v;
            }
        }
    }
    Ok(point)
}

/// Tolerance for comparing branch heads and infinity points.
pub const CONVERGE_TOL: f64 = 1e-9;

/// Two branches converge exactly when the nonnegative-exponent parts of
/// their series agree termwise (after aligning ramifications, which the
/// rational exponent keys do implicitly).
pub fn converge(a: &InfinityBranch, b: &InfinityBranch) -> bool {
    if a.pivot != b.pivot || a.coords.len() != b.coords.len() {
        return false;
    }
    for (ca, cb) in a.coords.iter().zip(&b.coords) {
        if ca.component != cb.component {
            return false;
        }
        let ha = ca.head();
        let hb = cb.head();
        let scale = 1.0
            + ha.iter()
                .chain(hb.iter())
                .map(|(_, v)| v.norm())
                .fold(0.0f64, f64::max);
        let mut exps: Vec<Rat> = ha.iter().chain(hb.iter()).map(|&(e, _)| e).collect();
        exps.sort();
        exps.dedup();
        let get = |h: &[(Rat, C)], e: Rat| {
            h.iter()
                .find(|&&(he, _)| he == e)
                .map(|&(_, v)| v)
                .unwrap_or_else(C::zero)
        };
        for e in exps {
            if (get(&ha, e) - get(&hb, e)).norm() > CONVERGE_TOL * scale {
                return false;
            }
        }
    }
    true
}

/// Angles used when walking the curve toward a pole.
const APPROACH_ANGLES: [f64; 4] = [
    std::f64::consts::PI / 5.0,
    -std::f64::consts::PI / 5.0,
    3.0 * std::f64::consts::PI / 5.0,
    -3.0 * std::f64::consts::PI / 5.0,
];

/// Offsets this close to the pole (in the uniformized variable) are sampled
/// through the local series: direct evaluation of expressions like
/// `cos(s) - 1` loses every significant digit there, while the series
/// coefficients already encode the cancellation.
const SERIES_SAMPLE_RADIUS: f64 = 0.02;

/// Empirical approach check: for each radius, sample curve points whose
/// pivot coordinate reaches that magnitude and measure the Euclidean
/// distance (over real and imaginary parts of every coordinate) to the
/// asymptote, refined from matched root seeds.
pub fn approach_distance(
    curve: &CurveParam,
    pole: &PoleData,
    asymptote: &GAsymptote,
    radii: &[f64],
) -> Result<Vec<f64>, BranchError> {
    approach_distance_with(curve, pole, asymptote, radii, &Options::default())
}

pub fn approach_distance_with(
    curve: &CurveParam,
    pole: &PoleData,
    asymptote: &GAsymptote,
    radii: &[f64],
    options: &Options,
) -> Result<Vec<f64>, BranchError> {
    let sampler = CurveSampler::new(curve, pole, options)?;
    let pivot = asymptote.pivot;
    let mut out = Vec::with_capacity(radii.len());
    for &radius in radii {
        let mut best = f64::INFINITY;
        for &angle in &APPROACH_ANGLES {
            let Some(x) = sampler.point_at_radius(pivot, radius, angle) else {
                continue;
            };
            best = best.min(distance_to_asymptote(asymptote, &x));
        }
        if !best.is_finite() {
            return Err(BranchError::Sampling(format!(
                "could not reach |component {pivot}| = {radius} near the pole"
            )));
        }
        out.push(best);
    }
    Ok(out)
}

/// Evaluates the curve near one pole, switching from direct evaluation to
/// the uniformized local series once the offset is small enough that direct
/// evaluation would cancel catastrophically.
struct CurveSampler {
    leafed: CurveParam,
    tau: C,
    gamma: i64,
    series: Vec<PuiseuxSeries>,
}

impl CurveSampler {
    fn new(curve: &CurveParam, pole: &PoleData, options: &Options) -> Result<Self, BranchError> {
        let depth = pole.max_reduced_order() + 12;
        let series = uniformized_components(curve, pole, depth, options)?;
        Ok(CurveSampler {
            leafed: curve.with_leaf(&pole.leaf),
            tau: pole.location,
            gamma: pole.gamma,
            series,
        })
    }

    /// Component values at the uniformized offset `w` (so `t = tau + w^gamma`).
    fn eval(&self, w: C) -> Option<Vec<C>> {
        if w.norm() < SERIES_SAMPLE_RADIUS {
            let vals: Vec<C> = self.series.iter().map(|s| s.eval(w)).collect();
            if vals.iter().all(|v| v.is_finite()) {
                return Some(vals);
            }
            return None;
        }
        let t = self.tau + cpow(w, Rat::from_integer(self.gamma), 0).ok()?;
        self.leafed.eval(t).ok()
    }

    fn magnitude(&self, pivot: usize, w: C) -> Option<f64> {
        self.eval(w).map(|v| v[pivot].norm())
    }

    /// Walks `|w|` until the pivot magnitude brackets the radius, then
    /// bisects on the log scale.
    fn point_at_radius(&self, pivot: usize, radius: f64, angle: f64) -> Option<Vec<C>> {
        let dir = C::new(angle.cos(), angle.sin());
        let mut hi = 0.3 * (1.0 + self.tau.norm());
        let mut tries = 0;
        loop {
            match self.magnitude(pivot, dir * hi) {
                Some(v) if v < radius => break,
                _ => {
                    hi *= 1.6;
                    tries += 1;
                    if tries > 40 {
                        return None;
                    }
                }
            }
        }
        let lo = 1e-13f64;
        if self.magnitude(pivot, dir * lo)? <= radius {
            return None;
        }
        let (mut llo, mut lhi) = (lo.ln(), hi.ln());
        for _ in 0..90 {
            let mid = 0.5 * (llo + lhi);
            match self.magnitude(pivot, dir * mid.exp()) {
                Some(v) if v >= radius => llo = mid,
                Some(_) => lhi = mid,
                None => llo = mid,
            }
        }
        let w = dir * (0.5 * (llo + lhi)).exp();
        let point = self.eval(w)?;
        if (point[pivot].norm() - radius).abs() > 0.1 * radius {
            return None;
        }
        Some(point)
    }
}

/// Minimum distance from a point of `C^n` (as `R^(2n)`) to the asymptote,
/// starting from the parameter roots matching the pivot coordinate and
/// polishing with damped gradient descent.
pub(crate) fn distance_to_asymptote(asymptote: &GAsymptote, x: &[C]) -> f64 {
    let n = asymptote.base_exponent;
    let pivot_value = x[asymptote.pivot];
    let principal = cpow(pivot_value, Rat::new(1, n), 0).unwrap_or_else(|_| C::zero());
    let mut best = f64::INFINITY;
    for k in 0..n {
        let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let seed = principal * C::new(angle.cos(), angle.sin());
        best = best.min(refine_distance(asymptote, x, seed));
    }
    best
}

fn squared_distance(asymptote: &GAsymptote, x: &[C], u: C) -> f64 {
    asymptote
        .point(u)
        .iter()
        .zip(x)
        .map(|(q, p)| (q - p).norm_sqr())
        .sum()
}

fn refine_distance(asymptote: &GAsymptote, x: &[C], seed: C) -> f64 {
    let mut u = seed;
    let mut d = squared_distance(asymptote, x, u);
    let mut lambda = 0.1 * (1.0 + u.norm());
    for _ in 0..160 {
        let q = asymptote.point(u);
        let dq = asymptote.tangent(u);
        let mut grad = C::zero();
        for ((qc, pc), tc) in q.iter().zip(x).zip(&dq) {
            grad += (qc - pc) * tc.conj();
        }
        let gn = grad.norm();
        if gn < 1e-300 {
            break;
        }
        let step = grad / gn * lambda.min(gn);
        let candidate = u - step;
        let dc = squared_distance(asymptote, x, candidate);
        if dc < d {
            u = candidate;
            d = dc;
            lambda *= 1.4;
        } else {
            lambda *= 0.5;
            if lambda < 1e-14 * (1.0 + u.norm()) {
                break;
            }
        }
    }
    d.sqrt()
}
