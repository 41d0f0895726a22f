//! Numeric and exact evaluation.

use super::{Expr, Rat, C};
use num::{BigRational, One, Signed, Zero};
use std::f64::consts::PI;

/// Magnitude beyond which an evaluation is reported as a pole hit.
const OVERFLOW: f64 = 1e290;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    /// Division blew up: exact zero denominator or magnitude past the
    /// overflow threshold.
    #[error("pole hit during evaluation")]
    PoleHit,
    /// `w^(p/q)` with `w = 0` and `p/q < 0` has no principal value.
    #[error("zero base raised to a negative fractional power")]
    ZeroToNegativePower,
    /// A transcendental overflowed (e.g. `exp` far in the right half plane).
    #[error("numeric overflow during evaluation")]
    Overflow,
}

/// Principal-branch power `w^(p/q)` adjusted by the winding phase
/// `exp(2*pi*i*winding*p/q)`. Integer exponents are exact repeated products.
pub(crate) fn cpow(w: C, r: Rat, winding: i32) -> Result<C, EvalError> {
    if r.is_integer() {
        let k = r.to_integer();
        if w.is_zero() {
            return if k > 0 {
                Ok(C::new(0.0, 0.0))
            } else if k == 0 {
                Ok(C::new(1.0, 0.0))
            } else {
                Err(EvalError::ZeroToNegativePower)
            };
        }
        let k32 = i32::try_from(k).map_err(|_| EvalError::Overflow)?;
        let v = w.powi(k32);
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::Overflow)
        };
    }
    if w.is_zero() {
        return if r.is_positive() {
            Ok(C::new(0.0, 0.0))
        } else {
            Err(EvalError::ZeroToNegativePower)
        };
    }
    let rf = *r.numer() as f64 / *r.denom() as f64;
    let mut v = (w.ln() * rf).exp();
    if winding != 0 {
        v *= winding_phase(r, winding);
    }
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Overflow)
    }
}

/// `exp(2*pi*i * winding * r)` with the angle reduced exactly first.
pub(crate) fn winding_phase(r: Rat, winding: i32) -> C {
    let num = (winding as i64).wrapping_mul(*r.numer());
    let den = *r.denom();
    let frac = num.rem_euclid(den);
    let angle = 2.0 * PI * frac as f64 / den as f64;
    C::new(angle.cos(), angle.sin())
}

pub(crate) fn rational_to_c(r: &BigRational) -> C {
    use num::ToPrimitive;
    let v = r.to_f64().unwrap_or(f64::NAN);
    C::new(v, 0.0)
}

/// Evaluates an expression at a point using principal branches throughout.
pub fn evaluate(e: &Expr, z: C) -> Result<C, EvalError> {
    let v = eval_rec(e, z)?;
    if !v.is_finite() || v.norm() > OVERFLOW {
        return Err(EvalError::Overflow);
    }
    Ok(v)
}

fn eval_rec(e: &Expr, z: C) -> Result<C, EvalError> {
    Ok(match e {
        Expr::Number(r) => rational_to_c(r),
        Expr::I => C::new(0.0, 1.0),
        Expr::Pi => C::new(PI, 0.0),
        Expr::Var => z,
        Expr::Add(a, b) => eval_rec(a, z)? + eval_rec(b, z)?,
        Expr::Sub(a, b) => eval_rec(a, z)? - eval_rec(b, z)?,
        Expr::Mul(a, b) => eval_rec(a, z)? * eval_rec(b, z)?,
        Expr::Div(a, b) => {
            let den = eval_rec(b, z)?;
            if den.is_zero() {
                return Err(EvalError::PoleHit);
            }
            let v = eval_rec(a, z)? / den;
            if !v.is_finite() || v.norm() > OVERFLOW {
                return Err(EvalError::PoleHit);
            }
            v
        }
        Expr::Neg(a) => -eval_rec(a, z)?,
        Expr::Pow {
            base,
            exponent,
            winding,
        } => cpow(eval_rec(base, z)?, *exponent, *winding)?,
        Expr::Sin(a) => eval_rec(a, z)?.sin(),
        Expr::Cos(a) => eval_rec(a, z)?.cos(),
        Expr::Exp(a) => eval_rec(a, z)?.exp(),
    })
}

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_integer(n: i64) -> Self {
        GaussianRational::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn to_c(&self) -> C {
        use num::ToPrimitive;
        C::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub(crate) fn sum(&self, o: &Self) -> Self {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub(crate) fn difference(&self, o: &Self) -> Self {
        GaussianRational::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub(crate) fn product(&self, o: &Self) -> Self {
        GaussianRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub(crate) fn quotient(&self, o: &Self) -> Option<Self> {
        let norm = &o.re * &o.re + &o.im * &o.im;
        if norm.is_zero() {
            return None;
        }
        let conj = GaussianRational::new(o.re.clone(), -o.im.clone());
        let prod = self.product(&conj);
        Some(GaussianRational::new(prod.re / &norm, prod.im / &norm))
    }

    pub(crate) fn powi(&self, mut k: i64) -> Option<Self> {
        let mut base = self.clone();
        if k < 0 {
            base = GaussianRational::from_integer(1).quotient(&base)?;
            k = -k;
        }
        let mut acc = GaussianRational::from_integer(1);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.product(&base);
            }
            base = base.product(&base);
            k >>= 1;
        }
        Some(acc)
    }
}

/// Exact evaluation over the Gaussian rationals. Returns `None` whenever the
/// value is not expressible (pi, fractional powers, transcendentals, or a
/// zero denominator along the way).
pub fn evaluate_exact(e: &Expr, z: &GaussianRational) -> Option<GaussianRational> {
    Some(match e {
        Expr::Number(r) => GaussianRational::new(r.clone(), BigRational::zero()),
        Expr::I => GaussianRational::new(BigRational::zero(), BigRational::one()),
        Expr::Pi => return None,
        Expr::Var => z.clone(),
        Expr::Add(a, b) => evaluate_exact(a, z)?.sum(&evaluate_exact(b, z)?),
        Expr::Sub(a, b) => evaluate_exact(a, z)?.difference(&evaluate_exact(b, z)?),
        Expr::Mul(a, b) => evaluate_exact(a, z)?.product(&evaluate_exact(b, z)?),
        Expr::Div(a, b) => evaluate_exact(a, z)?.quotient(&evaluate_exact(b, z)?)?,
        Expr::Neg(a) => GaussianRational::from_integer(0).difference(&evaluate_exact(a, z)?),
        Expr::Pow { base, exponent, .. } => {
            if !exponent.is_integer() {
                return None;
            }
            let b = evaluate_exact(base, z)?;
            if b.is_zero() && *exponent.numer() < 0 {
                return None;
            }
            b.powi(exponent.to_integer())?
        }
        Expr::Sin(_) | Expr::Cos(_) | Expr::Exp(_) => return None,
    })
}
