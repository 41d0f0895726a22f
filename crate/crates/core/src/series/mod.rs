//! Truncated Puiseux series arithmetic.
//!
//! A series is a finite map from rational exponents to complex coefficients
//! together with a truncation order: exponents at or past the truncation are
//! *unknown*, not zero. Every operation tracks the truncation honestly, so a
//! result never claims more orders than its inputs support. Exponent
//! arithmetic is exact; only coefficients are floating point.
//!
//! Series at the center `Infinity` are stored as series in `1/z`: the key is
//! the exponent of `1/z`, so ascending keys are descending powers of `z`.

pub mod expand;

pub use expand::{expand_at, expand_at_with_tol};

use crate::expr::eval::cpow;
use crate::expr::{lcm_i64, Rat, C};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Default relative magnitude below which a coefficient is treated as an
/// artifact of cancellation and pruned.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

/// Truncation order used for series that are exact (polynomials and other
/// finite expansions); large enough to never bind, small enough that
/// exponent arithmetic cannot overflow.
pub(crate) const EXACT_TRUNC: i64 = 1 << 20;

#[derive(Debug, Clone, thiserror::Error)]
pub enum SeriesError {
    #[error("series is zero up to its truncation order")]
    ZeroToTruncation,
    #[error("division by a series that is zero to its truncation order")]
    ZeroDivisor,
    #[error("essential singularity: {0}")]
    EssentialSingularity(String),
    #[error("composition requires integer exponents in the outer series")]
    NonIntegerExponents,
    #[error("series reversion needs leading exponent exactly 1, got {0}")]
    BadInverseLead(Rat),
    #[error("could not reach the requested truncation order ({0})")]
    DepthExhausted(String),
    #[error("operands have different centers")]
    CenterMismatch,
}

/// Expansion center: a finite point or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Center {
    Point(C),
    /// Series in `1/z`; the orientation flag for branches at infinity.
    Infinity,
}

#[derive(Debug, Clone)]
pub struct PuiseuxSeries {
    center: Center,
    terms: BTreeMap<Rat, C>,
    truncation: Rat,
    zero_tol: f64,
}

// Arithmetic is exposed as inherent fallible methods rather than the std
// ops traits: centers must match and division can fail on a zero divisor.
#[allow(clippy::should_implement_trait)]
impl PuiseuxSeries {
    pub fn new(center: Center, terms: impl IntoIterator<Item = (Rat, C)>, truncation: Rat) -> Self {
        Self::with_tol(center, terms, truncation, DEFAULT_ZERO_TOL)
    }

    pub fn with_tol(
        center: Center,
        terms: impl IntoIterator<Item = (Rat, C)>,
        truncation: Rat,
        zero_tol: f64,
    ) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if !c.is_zero() {
                *map.entry(e).or_insert_with(C::zero) += c;
            }
        }
        let mut s = PuiseuxSeries {
            center,
            terms: map,
            truncation,
            zero_tol,
        };
        s.normalize();
        s
    }

    pub fn zero(center: Center, truncation: Rat) -> Self {
        PuiseuxSeries {
            center,
            terms: BTreeMap::new(),
            truncation,
            zero_tol: DEFAULT_ZERO_TOL,
        }
    }

    pub fn constant(center: Center, value: C, truncation: Rat) -> Self {
        Self::new(center, [(Rat::zero(), value)], truncation)
    }

    pub fn monomial(center: Center, exponent: Rat, value: C, truncation: Rat) -> Self {
        Self::new(center, [(exponent, value)], truncation)
    }

    pub fn center(&self) -> Center {
        self.center
    }

    pub fn truncation(&self) -> Rat {
        self.truncation
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    pub fn terms(&self) -> impl Iterator<Item = (Rat, C)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exponent: Rat) -> C {
        self.terms.get(&exponent).copied().unwrap_or_else(C::zero)
    }

    /// First stored term; errors when the series is zero to its truncation.
    pub fn leading(&self) -> Result<(Rat, C), SeriesError> {
        self.terms
            .iter()
            .next()
            .map(|(&e, &c)| (e, c))
            .ok_or(SeriesError::ZeroToTruncation)
    }

    /// Leading exponent, or the truncation order for a zero series.
    pub fn valuation(&self) -> Rat {
        self.terms.keys().next().copied().unwrap_or(self.truncation)
    }

    /// lcm of the exponent denominators; 1 for a zero series.
    pub fn ramification(&self) -> i64 {
        self.terms
            .keys()
            .fold(1i64, |acc, e| lcm_i64(acc, *e.denom()))
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0f64, f64::max)
    }

    /// Drops unknown-order terms and cancellation residue. A coefficient is
    /// noise when it is tiny relative to the coefficients at lower exponents
    /// (floor 1): partial sums legitimately carry huge transients at high
    /// exponents, and those must not shadow a small true leading term.
    fn normalize(&mut self) {
        let trunc = self.truncation;
        self.terms.retain(|e, c| *e < trunc && c.is_finite());
        let mut scale = 1.0f64;
        let mut dead: Vec<Rat> = Vec::new();
        for (&e, &c) in self.terms.iter() {
            let mag = c.norm();
            if mag <= self.zero_tol * scale {
                dead.push(e);
            } else {
                scale = scale.max(mag);
            }
        }
        for e in dead {
            self.terms.remove(&e);
        }
        // Cancellation residue also shows up as a negligible real or
        // imaginary part riding on an otherwise clean coefficient.
        let tol = self.zero_tol;
        for c in self.terms.values_mut() {
            let mag = c.norm();
            if c.re.abs() <= tol * mag {
                c.re = 0.0;
            }
            if c.im.abs() <= tol * mag {
                c.im = 0.0;
            }
        }
    }

    fn merge_tol(&self, other: &Self) -> f64 {
        self.zero_tol.max(other.zero_tol)
    }

    fn check_center(&self, other: &Self) -> Result<(), SeriesError> {
        let same = match (self.center, other.center) {
            (Center::Infinity, Center::Infinity) => true,
            (Center::Point(a), Center::Point(b)) => a == b,
            _ => false,
        };
        if same {
            Ok(())
        } else {
            Err(SeriesError::CenterMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let truncation = self.truncation.min(other.truncation);
        Ok(Self::with_tol(
            self.center,
            self.terms().chain(other.terms()),
            truncation,
            self.merge_tol(other),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -*c;
        }
        out
    }

    pub fn scale(&self, k: C) -> Self {
        let mut out = self.clone();
        if k.is_zero() {
            out.terms.clear();
            return out;
        }
        for c in out.terms.values_mut() {
            *c *= k;
        }
        out.normalize();
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let truncation =
            (self.truncation + other.valuation()).min(other.truncation + self.valuation());
        let mut acc: BTreeMap<Rat, C> = BTreeMap::new();
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let e = ea + eb;
                if e < truncation {
                    *acc.entry(e).or_insert_with(C::zero) += ca * cb;
                }
            }
        }
        Ok(Self::with_tol(
            self.center,
            acc,
            truncation,
            self.merge_tol(other),
        ))
    }

    /// Multiplies every exponent (and the truncation) by a positive rational;
    /// this is the exact effect on exponents of the reparametrization
    /// `s -> s^k` of the underlying local variable.
    pub fn scale_exponents(&self, k: Rat) -> Self {
        assert!(k.is_positive(), "exponent scale must be positive");
        let terms: Vec<_> = self.terms().map(|(e, c)| (e * k, c)).collect();
        Self::with_tol(self.center, terms, self.truncation * k, self.zero_tol)
    }

    /// Reciprocal via the geometric series on `1 + u`.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let (e, c) = self.leading().map_err(|_| SeriesError::ZeroDivisor)?;
        // self = c h^e (1 + u) with trunc(u) = T - e
        let rel_trunc = self.truncation - e;
        let mut u = self.shift_scale(-e, C::new(1.0, 0.0) / c);
        u.terms.remove(&Rat::zero());
        let mut acc = PuiseuxSeries::with_tol(
            self.center,
            [(Rat::zero(), C::new(1.0, 0.0))],
            rel_trunc,
            self.zero_tol,
        );
        if !u.is_zero() {
            let lu = u.valuation();
            let mut pow = acc.clone();
            let mut k = Rat::zero();
            while k + lu < rel_trunc {
                pow = pow.mul(&u)?.neg();
                acc = acc.add(&pow)?;
                k += lu;
            }
        }
        Ok(acc.shift_scale(-e, C::new(1.0, 0.0) / c))
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        self.mul(&other.inverse()?)
    }

    /// Integer power via binary exponentiation.
    pub fn powi(&self, k: i64) -> Result<Self, SeriesError> {
        if k == 0 {
            return Ok(Self::with_tol(
                self.center,
                [(Rat::zero(), C::new(1.0, 0.0))],
                self.truncation,
                self.zero_tol,
            ));
        }
        let mut base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut k = k.unsigned_abs();
        let mut acc: Option<Self> = None;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.unwrap())
    }

    /// Rational power. The leading coefficient takes its principal root; the
    /// rest is the binomial series on `1 + u`.
    pub fn pow_rational(&self, r: Rat) -> Result<Self, SeriesError> {
        if r.is_integer() {
            return self.powi(r.to_integer());
        }
        let (e, c) = self.leading()?;
        let rel_trunc = self.truncation - e;
        let mut u = self.shift_scale(-e, C::new(1.0, 0.0) / c);
        u.terms.remove(&Rat::zero());
        let one = PuiseuxSeries::with_tol(
            self.center,
            [(Rat::zero(), C::new(1.0, 0.0))],
            rel_trunc,
            self.zero_tol,
        );
        let mut acc = one.clone();
        if !u.is_zero() {
            let lu = u.valuation();
            let rf = *r.numer() as f64 / *r.denom() as f64;
            let mut pow = one;
            let mut binom = C::new(1.0, 0.0);
            let mut k: i64 = 0;
            while Rat::from_integer(k) * lu + lu < rel_trunc {
                pow = pow.mul(&u)?;
                binom *= C::new((rf - k as f64) / (k as f64 + 1.0), 0.0);
                acc = acc.add(&pow.scale(binom))?;
                k += 1;
            }
        }
        let lead_root = cpow(c, r, 0).map_err(|_| SeriesError::ZeroToTruncation)?;
        Ok(acc.shift_scale(e * r, lead_root))
    }

    /// `self * c * h^k` without renormalizing exponents.
    fn shift_scale(&self, k: Rat, c: C) -> Self {
        let terms: Vec<_> = self.terms().map(|(e, v)| (e + k, v * c)).collect();
        Self::with_tol(self.center, terms, self.truncation + k, self.zero_tol)
    }

    /// Substitutes `inner` for the variable of `self`. The outer series must
    /// have integer exponents; the inner series needs a positive valuation.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if self.ramification() != 1 {
            return Err(SeriesError::NonIntegerExponents);
        }
        let l_inner = inner.leading()?.0;
        if !l_inner.is_positive() {
            return Err(SeriesError::BadInverseLead(l_inner));
        }
        let cap = (self.truncation * l_inner).min(Rat::from_integer(EXACT_TRUNC));
        let mut acc =
            PuiseuxSeries::with_tol(inner.center, [], cap, self.zero_tol.max(inner.zero_tol));
        if self.terms.is_empty() {
            return Ok(acc);
        }
        let kmin = self.valuation().to_integer();
        let kmax = self.terms.keys().next_back().unwrap().to_integer();
        let mut power = inner.powi(kmin)?;
        for k in kmin..=kmax {
            let c = self.coeff(Rat::from_integer(k));
            if !c.is_zero() {
                acc = acc.add(&power.scale(c))?;
            }
            if k < kmax {
                power = power.mul(inner)?;
            }
        }
        acc.truncation = acc.truncation.min(cap);
        acc.normalize();
        Ok(acc)
    }

    /// Compositional inverse of a series with leading term `c * h`.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        let (lead, c1) = self.leading()?;
        if lead != Rat::one() || self.ramification() != 1 {
            return Err(SeriesError::BadInverseLead(lead));
        }
        let trunc = self.truncation;
        let identity = PuiseuxSeries::with_tol(
            self.center,
            [(Rat::one(), C::new(1.0, 0.0))],
            trunc,
            self.zero_tol,
        );
        let mut x = identity.scale(C::new(1.0, 0.0) / c1);
        let g_prime = self.derivative();
        let steps = 64 - (trunc.to_integer().max(2) as u64).leading_zeros() + 2;
        for _ in 0..steps {
            let residual = self.compose(&x)?.sub(&identity)?;
            if residual.is_zero() {
                break;
            }
            let slope = g_prime.compose(&x)?;
            x = x.sub(&residual.div(&slope)?)?;
            x.truncation = trunc;
            x.normalize();
        }
        Ok(x)
    }

    pub fn derivative(&self) -> Self {
        let terms: Vec<_> = self
            .terms()
            .filter(|(e, _)| !e.is_zero())
            .map(|(e, c)| {
                (
                    e - Rat::one(),
                    c * C::new(*e.numer() as f64 / *e.denom() as f64, 0.0),
                )
            })
            .collect();
        Self::with_tol(
            self.center,
            terms,
            self.truncation - Rat::one(),
            self.zero_tol,
        )
    }

    pub fn truncate_to(&self, order: Rat) -> Self {
        let mut out = self.clone();
        out.truncation = out.truncation.min(order);
        out.normalize();
        out
    }

    /// Evaluates the truncated series at a local offset (principal powers).
    pub fn eval(&self, h: C) -> C {
        self.terms()
            .map(|(e, c)| c * cpow(h, e, 0).unwrap_or_else(|_| C::new(f64::NAN, f64::NAN)))
            .sum()
    }
}

fn format_coeff(c: C) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im.is_sign_negative() {
        format!("({}-{}i)", c.re, -c.im)
    } else {
        format!("({}+{}i)", c.re, c.im)
    }
}

fn format_power(center: Center, stored_exponent: Rat) -> String {
    let (var, e) = match center {
        Center::Infinity => ("z".to_string(), -stored_exponent),
        Center::Point(tau) => {
            let var = if tau.is_zero() {
                "s".to_string()
            } else if tau.im == 0.0 && tau.re.is_sign_negative() {
                format!("(s+{})", -tau.re)
            } else if tau.im == 0.0 {
                format!("(s-{})", tau.re)
            } else {
                format!("(s-{})", format_coeff(tau))
            };
            (var, stored_exponent)
        }
    };
    if e.is_zero() {
        String::new()
    } else if e.is_one() {
        var
    } else if e.is_integer() {
        format!("{}^{}", var, e.numer())
    } else {
        format!("{}^({}/{})", var, e.numer(), e.denom())
    }
}

impl fmt::Display for PuiseuxSeries {
    /// Terms sorted by exponent as `c * x^(p/q)`; this exact layout is what
    /// the JSON report embeds.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let pow = format_power(self.center, e);
            if pow.is_empty() {
                write!(f, "{}", format_coeff(c))?;
            } else {
                write!(f, "{} * {}", format_coeff(c), pow)?;
            }
        }
        Ok(())
    }
}
