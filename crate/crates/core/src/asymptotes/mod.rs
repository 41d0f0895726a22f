//! Generalized asymptotes: proper perfect parametrizations extracted from
//! branch heads, plus the per-pole driver for plane and space curves.
//!
//! An asymptote is stored as a pivot coordinate `t^n` together with one
//! polynomial per remaining coordinate. A branch head
//! `a_k z^(k/n1) + ... + a_0` first drops its negative-exponent tail, then
//! divides every exponent by the gcd of the surviving ones (properness); a
//! head that degenerates to a constant yields a horizontal or vertical line,
//! which also has a direct evaluation path through the pole value.

use crate::branches::{branch_series_with, BranchError, InfinityBranch};
use crate::expr::{evaluate_exact, gcd_i64, CurveParam, Expr, GaussianRational, Rat, C};
use crate::poles::{find_poles_with, PoleData, PoleError, Window};
use crate::series::expand_at_with_tol;
use crate::Options;
use num::{BigRational, Zero};

/// Relative threshold below which a head coefficient does not participate
/// in the properness gcd and is dropped from the output polynomial.
pub const COEFF_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymptoteKind {
    Generic,
    HorizontalLine,
    VerticalLine,
}

/// One non-pivot coordinate polynomial, ascending degree, with optional
/// exact values where a coefficient was produced by exact evaluation.
#[derive(Clone, Debug)]
pub struct AsymCoordinate {
    pub component: usize,
    pub coefficients: Vec<C>,
    pub exact: Vec<Option<GaussianRational>>,
}

impl AsymCoordinate {
    fn from_coefficients(component: usize, coefficients: Vec<C>) -> Self {
        let exact = vec![None; coefficients.len()];
        AsymCoordinate {
            component,
            coefficients,
            exact,
        }
    }

    pub fn eval(&self, u: C) -> C {
        let mut acc = C::zero();
        for &c in self.coefficients.iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    pub fn eval_derivative(&self, u: C) -> C {
        let mut acc = C::zero();
        for (k, &c) in self.coefficients.iter().enumerate().skip(1).rev() {
            acc = acc * u + c * C::new(k as f64, 0.0);
        }
        acc
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }
}

/// A generalized asymptote in reduced proper form.
#[derive(Clone, Debug)]
pub struct GAsymptote {
    pub kind: AsymptoteKind,
    /// Which coordinate carries `t^base_exponent`.
    pub pivot: usize,
    pub base_exponent: i64,
    /// The gcd the exponents were divided by.
    pub reduction_factor: i64,
    /// Non-pivot coordinate polynomials in component order.
    pub coordinates: Vec<AsymCoordinate>,
    pub source_pole: C,
    pub pole_exact: Option<GaussianRational>,
    /// Leaf windings of the source pole (empty for the principal leaf).
    pub leaf: Vec<(String, i32)>,
    pub defining_factor: Option<String>,
    pub infinity_point: Vec<C>,
    /// Set when the pole sits outside the order hypotheses (a component
    /// value vanishing at the pole) and the line value 0 was used.
    pub beyond_hypotheses: bool,
}

impl GAsymptote {
    pub fn dimension(&self) -> usize {
        self.coordinates.len() + 1
    }

    /// The parametrization evaluated at `u`, in original component order.
    pub fn point(&self, u: C) -> Vec<C> {
        let mut out = vec![C::zero(); self.dimension()];
        out[self.pivot] = u.powi(self.base_exponent as i32);
        for coord in &self.coordinates {
            out[coord.component] = coord.eval(u);
        }
        out
    }

    /// Derivative of the parametrization at `u`.
    pub fn tangent(&self, u: C) -> Vec<C> {
        let mut out = vec![C::zero(); self.dimension()];
        let n = self.base_exponent;
        out[self.pivot] = C::new(n as f64, 0.0) * u.powi(n as i32 - 1);
        for coord in &self.coordinates {
            out[coord.component] = coord.eval_derivative(u);
        }
        out
    }

    /// True when every coefficient is real to tolerance, so the asymptote
    /// has a real trace worth plotting.
    pub fn is_real(&self) -> bool {
        self.coordinates.iter().all(|c| {
            c.coefficients
                .iter()
                .all(|v| v.im.abs() <= COEFF_TOL * (1.0 + v.norm()))
        })
    }

    /// Degree of the reduced parametrization (the perfect-curve degree).
    pub fn degree(&self) -> i64 {
        let poly_max = self
            .coordinates
            .iter()
            .map(|c| c.degree() as i64)
            .max()
            .unwrap_or(0);
        self.base_exponent.max(poly_max)
    }

    /// The asymptote itself as a parametrized curve with its single pole at
    /// the origin (`t -> 1/s`), for round-trip checks.
    pub fn as_curve(&self) -> Result<CurveParam, crate::expr::CurveError> {
        let mut components = vec![Expr::integer(0); self.dimension()];
        components[self.pivot] = Expr::pow(Expr::Var, Rat::from_integer(-self.base_exponent));
        for coord in &self.coordinates {
            let mut acc = Expr::integer(0);
            for (k, &c) in coord.coefficients.iter().enumerate() {
                let term = complex_constant(c);
                let monomial = if k == 0 {
                    term
                } else {
                    Expr::mul(term, Expr::pow(Expr::Var, Rat::from_integer(-(k as i64))))
                };
                acc = Expr::add(acc, monomial);
            }
            components[coord.component] = acc;
        }
        CurveParam::new(components)
    }
}

/// Exact binary-float constants keep the round trip faithful.
fn complex_constant(c: C) -> Expr {
    let re = BigRational::from_float(c.re).unwrap_or_else(BigRational::zero);
    let im = BigRational::from_float(c.im).unwrap_or_else(BigRational::zero);
    if im.is_zero() {
        Expr::Number(re)
    } else {
        Expr::add(Expr::Number(re), Expr::mul(Expr::Number(im), Expr::I))
    }
}

/// Extracts the reduced proper asymptote from a branch: drop the tail, gcd
/// the surviving exponents, divide through.
pub fn asymptote_from_branch(branch: &InfinityBranch) -> GAsymptote {
    let n1 = branch.ramification_index;
    let head_max = branch
        .coords
        .iter()
        .flat_map(|c| c.head())
        .map(|(_, v)| v.norm())
        .fold(0.0f64, f64::max);
    let threshold = COEFF_TOL * head_max.max(1e-30);

    // heads in integer index form: coefficient of z^(k/n1) is entry k
    let heads: Vec<(usize, Vec<C>)> = branch
        .coords
        .iter()
        .map(|coord| {
            let mut coeffs = vec![C::zero(); 1];
            for (e, v) in coord.head() {
                let k = (e * n1).to_integer() as usize;
                if coeffs.len() <= k {
                    coeffs.resize(k + 1, C::zero());
                }
                if v.norm() > threshold {
                    coeffs[k] = v;
                }
            }
            (coord.component, coeffs)
        })
        .collect();

    let mut beta = n1;
    for (_, coeffs) in &heads {
        for (k, v) in coeffs.iter().enumerate() {
            if k >= 1 && v.norm() > 0.0 {
                beta = gcd_i64(beta, k as i64);
            }
        }
    }

    let coordinates: Vec<AsymCoordinate> = heads
        .into_iter()
        .map(|(component, coeffs)| {
            let mut reduced = vec![C::zero(); (coeffs.len() - 1) / beta as usize + 1];
            for (k, v) in coeffs.into_iter().enumerate() {
                if v.norm() > 0.0 {
                    reduced[k / beta as usize] = v;
                }
            }
            while reduced.len() > 1 && reduced.last().map(|v| v.norm() == 0.0) == Some(true) {
                reduced.pop();
            }
            AsymCoordinate::from_coefficients(component, reduced)
        })
        .collect();

    let all_constant = coordinates.iter().all(|c| c.degree() == 0);
    let kind = match (all_constant, branch.pivot) {
        (true, 0) => AsymptoteKind::HorizontalLine,
        (true, _) => AsymptoteKind::VerticalLine,
        (false, _) => AsymptoteKind::Generic,
    };
    let beyond = branch
        .coords
        .iter()
        .any(|c| branch.pole.reduced_orders[c.component] < 0);

    GAsymptote {
        kind,
        pivot: branch.pivot,
        base_exponent: n1 / beta,
        reduction_factor: beta,
        coordinates,
        source_pole: branch.pole.location,
        pole_exact: branch.pole.exact.clone(),
        leaf: branch.pole.leaf.describe(),
        defining_factor: branch.pole.defining_factor.clone(),
        infinity_point: branch.infinity_point.clone(),
        beyond_hypotheses: beyond,
    }
}

/// Constant value of a component at the pole: the constant term of its
/// local expansion (finite limits survive removable cancellations), with an
/// exact value when the pole and the component allow exact evaluation.
fn component_value_at(
    curve: &CurveParam,
    pole: &PoleData,
    component: usize,
    options: &Options,
) -> Result<(C, Option<GaussianRational>), BranchError> {
    let leafed = curve.with_leaf(&pole.leaf);
    let series = expand_at_with_tol(
        &leafed.component(component).expr,
        pole.location,
        Rat::from_integer(2),
        options.tolerance,
    )?;
    let value = series.coeff(Rat::zero());
    let exact = match (&pole.exact, pole.leaf.is_principal()) {
        (Some(tau), true) => evaluate_exact(&curve.component(component).expr, tau),
        _ => None,
    };
    let value = exact.as_ref().map(GaussianRational::to_c).unwrap_or(value);
    Ok((value, exact))
}

/// Builds a line asymptote: `t^n` in the pivot coordinate (reduced to `t`),
/// constants everywhere else.
fn line_asymptote(
    curve: &CurveParam,
    pole: &PoleData,
    pivot: usize,
    options: &Options,
) -> Result<GAsymptote, BranchError> {
    let n1 = pole.reduced_orders[pivot];
    if n1 < 1 {
        return Err(BranchError::NotAPole);
    }
    let mut coordinates = Vec::new();
    let mut beyond = false;
    for j in 0..curve.dimension() {
        if j == pivot {
            continue;
        }
        if pole.reduced_orders[j] > 0 {
            return Err(BranchError::Diverged {
                component: j,
                detail: "line path used while another component blows up".into(),
            });
        }
        if pole.reduced_orders[j] < 0 {
            beyond = true;
        }
        let (value, exact) = component_value_at(curve, pole, j, options)?;
        coordinates.push(AsymCoordinate {
            component: j,
            coefficients: vec![value],
            exact: vec![exact],
        });
    }
    let mut infinity_point = vec![C::zero(); curve.dimension() + 1];
    infinity_point[pivot] = C::new(1.0, 0.0);
    Ok(GAsymptote {
        kind: if pivot == 0 {
            AsymptoteKind::HorizontalLine
        } else {
            AsymptoteKind::VerticalLine
        },
        pivot,
        base_exponent: 1,
        reduction_factor: n1,
        coordinates,
        source_pole: pole.location,
        pole_exact: pole.exact.clone(),
        leaf: pole.leaf.describe(),
        defining_factor: pole.defining_factor.clone(),
        infinity_point,
        beyond_hypotheses: beyond,
    })
}

/// Horizontal line `(t, value, ...)`: the first component blows up, every
/// other component has a finite limit.
pub fn horizontal_asymptote(
    curve: &CurveParam,
    pole: &PoleData,
) -> Result<GAsymptote, BranchError> {
    line_asymptote(curve, pole, 0, &Options::default())
}

/// Vertical line `(value, t)` for a plane curve whose second component
/// alone blows up.
pub fn vertical_asymptote(curve: &CurveParam, pole: &PoleData) -> Result<GAsymptote, BranchError> {
    if curve.dimension() != 2 {
        return Err(BranchError::Sampling(
            "vertical_asymptote expects a plane curve".into(),
        ));
    }
    line_asymptote(curve, pole, 1, &Options::default())
}

/// One pole that could not be turned into an asymptote, with the reason.
#[derive(Debug)]
pub struct PoleFailure {
    pub pole: PoleData,
    pub error: BranchError,
}

/// Result of the full per-pole pipeline.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub asymptotes: Vec<GAsymptote>,
    pub branches: Vec<InfinityBranch>,
    pub failures: Vec<PoleFailure>,
}

/// Full pipeline for plane curves: poles of the first component feed the
/// cascade (or the horizontal-line path when the second component stays
/// finite); poles of the second component alone give vertical lines.
pub fn all_asymptotes(
    curve: &CurveParam,
    window: &Window,
    options: &Options,
) -> Result<RunOutcome, PoleError> {
    assert_eq!(curve.dimension(), 2, "all_asymptotes expects a plane curve");
    compute_asymptotes(curve, window, options)
}

/// The n-dimensional driver (n >= 3): per pole, the component of maximal
/// blow-up pivots and every other coordinate gets its cascade polynomial or
/// constant value.
pub fn nd_asymptotes(
    curve: &CurveParam,
    window: &Window,
    options: &Options,
) -> Result<RunOutcome, PoleError> {
    assert!(
        curve.dimension() >= 3,
        "nd_asymptotes expects a space curve"
    );
    compute_asymptotes(curve, window, options)
}

pub(crate) fn compute_asymptotes(
    curve: &CurveParam,
    window: &Window,
    options: &Options,
) -> Result<RunOutcome, PoleError> {
    let poles = find_poles_with(curve, window, options)?;
    let mut outcome = RunOutcome::default();
    for pole in poles {
        match asymptote_at_pole(curve, &pole, options) {
            Ok((asymptote, branch)) => {
                outcome.asymptotes.push(asymptote);
                outcome.branches.push(branch);
            }
            Err(error) => outcome.failures.push(PoleFailure { pole, error }),
        }
    }
    Ok(outcome)
}

fn asymptote_at_pole(
    curve: &CurveParam,
    pole: &PoleData,
    options: &Options,
) -> Result<(GAsymptote, InfinityBranch), BranchError> {
    let pivot = pole.pivot();
    let branch = branch_series_with(curve, pole, options.tail_terms, options)?;
    let pure_line = pole
        .reduced_orders
        .iter()
        .enumerate()
        .all(|(j, &n)| j == pivot || n <= 0);
    let asymptote = if pure_line {
        // Same constants as the degenerate cascade head, but with the exact
        // evaluation upgrade available on rational poles.
        line_asymptote(curve, pole, pivot, options)?
    } else {
        asymptote_from_branch(&branch)
    };
    Ok((asymptote, branch))
}

/// Two proper parametrizations describe the same asymptote when one is the
/// other reparametrized by a root of unity: `q2(t) == q1(xi * t)` with
/// `xi^base == 1`.
pub fn reparametrization_equivalent(a: &GAsymptote, b: &GAsymptote, tol: f64) -> bool {
    if a.pivot != b.pivot
        || a.base_exponent != b.base_exponent
        || a.coordinates.len() != b.coordinates.len()
    {
        return false;
    }
    let n = a.base_exponent;
    let scale = 1.0
        + a.coordinates
            .iter()
            .chain(&b.coordinates)
            .flat_map(|c| c.coefficients.iter())
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
    'roots: for k in 0..n {
        let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let xi = C::new(angle.cos(), angle.sin());
        for (ca, cb) in a.coordinates.iter().zip(&b.coordinates) {
            if ca.component != cb.component {
                return false;
            }
            let len = ca.coefficients.len().max(cb.coefficients.len());
            let mut power = C::new(1.0, 0.0);
            for j in 0..len {
                let va = ca.coefficients.get(j).copied().unwrap_or_else(C::zero) * power;
                let vb = cb.coefficients.get(j).copied().unwrap_or_else(C::zero);
                if (va - vb).norm() > tol * scale {
                    continue 'roots;
                }
                power *= xi;
            }
        }
        return true;
    }
    false
}

#[cfg(test)]
mod tests;
