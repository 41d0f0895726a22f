//! Local Puiseux expansion of expression trees.
//!
//! `expand_at(e, tau, depth)` produces a series in the local offset
//! `h = s - tau` valid along the principal branch, with truncation order at
//! least `depth`. Structural recursion mirrors the expression: quotients
//! expand through series inversion, fractional powers through the binomial
//! series on the principal leaf (adjusted by the node's winding), and
//! `sin`/`cos`/`exp` compose their entire-function series with the argument
//! expansion, splitting off the constant term first.
//!
//! Division and inversion lose truncation orders, so the driver retries with
//! a deeper target until the requested order is reached.

use super::{Center, PuiseuxSeries, SeriesError, DEFAULT_ZERO_TOL};
use crate::expr::eval::winding_phase;
use crate::expr::{Expr, Rat, C};
use num::{Signed, Zero};
use std::f64::consts::PI;

const MAX_ATTEMPTS: usize = 6;
const MAX_COMPOSE_TERMS: usize = 500;

pub fn expand_at(e: &Expr, center: C, depth: Rat) -> Result<PuiseuxSeries, SeriesError> {
    expand_at_with_tol(e, center, depth, DEFAULT_ZERO_TOL)
}

pub fn expand_at_with_tol(
    e: &Expr,
    center: C,
    depth: Rat,
    zero_tol: f64,
) -> Result<PuiseuxSeries, SeriesError> {
    let pad = depth.abs() + Rat::from_integer(4);
    for attempt in 0..MAX_ATTEMPTS {
        let target = depth + pad * (attempt as i64 + 1);
        let s = expand_rec(e, center, target, zero_tol)?;
        if s.truncation() >= depth {
            return Ok(s);
        }
    }
    Err(SeriesError::DepthExhausted(format!(
        "expansion of {e} at {center} to order {depth}"
    )))
}

fn expand_rec(e: &Expr, tau: C, target: Rat, tol: f64) -> Result<PuiseuxSeries, SeriesError> {
    let center = Center::Point(tau);
    let constant = |v: C| PuiseuxSeries::with_tol(center, [(Rat::zero(), v)], target, tol);
    match e {
        Expr::Number(r) => Ok(constant(crate::expr::eval::rational_to_c(r))),
        Expr::I => Ok(constant(C::new(0.0, 1.0))),
        Expr::Pi => Ok(constant(C::new(PI, 0.0))),
        Expr::Var => Ok(PuiseuxSeries::with_tol(
            center,
            [(Rat::zero(), tau), (Rat::from_integer(1), C::new(1.0, 0.0))],
            target,
            tol,
        )),
        Expr::Add(a, b) => expand_rec(a, tau, target, tol)?.add(&expand_rec(b, tau, target, tol)?),
        Expr::Sub(a, b) => expand_rec(a, tau, target, tol)?.sub(&expand_rec(b, tau, target, tol)?),
        Expr::Mul(a, b) => expand_rec(a, tau, target, tol)?.mul(&expand_rec(b, tau, target, tol)?),
        Expr::Div(a, b) => expand_rec(a, tau, target, tol)?.div(&expand_rec(b, tau, target, tol)?),
        Expr::Neg(a) => Ok(expand_rec(a, tau, target, tol)?.neg()),
        Expr::Pow {
            base,
            exponent,
            winding,
        } => {
            let b = expand_rec(base, tau, target, tol)?;
            if b.is_zero() {
                return if exponent.is_integer() && *exponent.numer() >= 0 {
                    b.powi(exponent.to_integer())
                } else {
                    Err(SeriesError::ZeroToTruncation)
                };
            }
            let mut p = b.pow_rational(*exponent)?;
            if *winding != 0 && !exponent.is_integer() {
                p = p.scale(winding_phase(*exponent, *winding));
            }
            Ok(p)
        }
        Expr::Sin(g) => expand_trig(g, tau, target, tol, Head::Sin),
        Expr::Cos(g) => expand_trig(g, tau, target, tol, Head::Cos),
        Expr::Exp(g) => expand_trig(g, tau, target, tol, Head::Exp),
    }
}

enum Head {
    Sin,
    Cos,
    Exp,
}

fn expand_trig(
    g: &Expr,
    tau: C,
    target: Rat,
    tol: f64,
    head: Head,
) -> Result<PuiseuxSeries, SeriesError> {
    let inner = expand_rec(g, tau, target, tol)?;
    let center = inner.center();
    if let Ok((lead, _)) = inner.leading() {
        if lead.is_negative() {
            let name = match head {
                Head::Sin => "sin",
                Head::Cos => "cos",
                Head::Exp => "exp",
            };
            return Err(SeriesError::EssentialSingularity(format!(
                "{name}({g}) at s = {tau}: argument has a pole"
            )));
        }
    }
    let c0 = inner.coeff(Rat::zero());
    let rest = inner.sub(&PuiseuxSeries::with_tol(
        center,
        [(Rat::zero(), c0)],
        inner.truncation(),
        tol,
    ))?;
    match head {
        Head::Sin => {
            let (sin_rest, cos_rest) = sin_cos_series(&rest)?;
            sin_rest.scale(c0.cos()).add(&cos_rest.scale(c0.sin()))
        }
        Head::Cos => {
            let (sin_rest, cos_rest) = sin_cos_series(&rest)?;
            cos_rest.scale(c0.cos()).sub(&sin_rest.scale(c0.sin()))
        }
        Head::Exp => Ok(exp_series(&rest)?.scale(c0.exp())),
    }
}

/// Maclaurin series of sin and cos composed with a series of positive
/// valuation, computed together off one power ladder.
fn sin_cos_series(g: &PuiseuxSeries) -> Result<(PuiseuxSeries, PuiseuxSeries), SeriesError> {
    let trunc = g.truncation();
    let one = PuiseuxSeries::with_tol(
        g.center(),
        [(Rat::zero(), C::new(1.0, 0.0))],
        trunc,
        g.zero_tol(),
    );
    let mut sin_acc = PuiseuxSeries::zero(g.center(), trunc);
    let mut cos_acc = one.clone();
    if g.is_zero() {
        return Ok((sin_acc, cos_acc));
    }
    let lu = g.valuation();
    let mut power = one;
    let mut inv_fact = 1.0f64;
    let mut k: usize = 0;
    loop {
        k += 1;
        if k > MAX_COMPOSE_TERMS {
            return Err(SeriesError::DepthExhausted(
                "sin/cos composition needs too many terms".into(),
            ));
        }
        if lu * (k as i64) >= trunc {
            break;
        }
        power = power.mul(g)?;
        inv_fact /= k as f64;
        let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        let term = power.scale(C::new(sign * inv_fact, 0.0));
        if k % 2 == 1 {
            sin_acc = sin_acc.add(&term)?;
        } else {
            cos_acc = cos_acc.add(&term)?;
        }
    }
    sin_acc = sin_acc.truncate_to(trunc);
    cos_acc = cos_acc.truncate_to(trunc);
    Ok((sin_acc, cos_acc))
}

fn exp_series(g: &PuiseuxSeries) -> Result<PuiseuxSeries, SeriesError> {
    let trunc = g.truncation();
    let one = PuiseuxSeries::with_tol(
        g.center(),
        [(Rat::zero(), C::new(1.0, 0.0))],
        trunc,
        g.zero_tol(),
    );
    let mut acc = one.clone();
    if g.is_zero() {
        return Ok(acc);
    }
    let lu = g.valuation();
    let mut power = one;
    let mut inv_fact = 1.0f64;
    let mut k: usize = 0;
    loop {
        k += 1;
        if k > MAX_COMPOSE_TERMS {
            return Err(SeriesError::DepthExhausted(
                "exp composition needs too many terms".into(),
            ));
        }
        if lu * (k as i64) >= trunc {
            break;
        }
        power = power.mul(g)?;
        inv_fact /= k as f64;
        acc = acc.add(&power.scale(C::new(inv_fact, 0.0)))?;
    }
    Ok(acc.truncate_to(trunc))
}
