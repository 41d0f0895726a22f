//! Expression trees for the meromorphic component functions of a
//! parametrization.
//!
//! Constants are exact rationals plus the symbols `I` and `pi`; every other
//! numeric value in the crate is complex floating point. Powers carry an
//! exact rational exponent in lowest terms together with a branch *winding*:
//! winding `k` multiplies the principal value of `w^(p/q)` by
//! `exp(2*pi*i*k*p/q)`, selecting one leaf of the multivalued power. Parsed
//! expressions always start on the principal leaf (winding 0).

pub(crate) mod eval;
mod parser;
mod print;
pub(crate) mod transform;

pub use eval::{evaluate, evaluate_exact, EvalError, GaussianRational};
pub use parser::{parse, ParseError};
pub use transform::{
    derivative, fractional_power_bases, polynomial_coefficients, split, substitute_power,
    LeafAssignment,
};

use num::rational::Ratio;
use num::BigRational;
use num::{One, Zero};

/// Exact rational exponent type.
pub type Rat = Ratio<i64>;

/// Complex double used for all approximate numerics.
pub type C = num::complex::Complex64;

/// A meromorphic expression in the single parameter `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Exact rational constant.
    Number(BigRational),
    /// The imaginary unit.
    I,
    /// The constant pi.
    Pi,
    /// The parameter variable `s`.
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// `base^exponent` on the leaf selected by `winding`.
    Pow {
        base: Box<Expr>,
        exponent: Rat,
        winding: i32,
    },
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn integer(n: i64) -> Expr {
        Expr::Number(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::Number(BigRational::new(num.into(), den.into()))
    }

    pub fn as_number(&self) -> Option<&BigRational> {
        match self {
            Expr::Number(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Number(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Number(r) if r.is_one())
    }

    /// Constant-folding constructors (associated functions, not operators:
    /// they take both operands by value and fold rational arithmetic
    /// eagerly so that parsed trees are canonical).
    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Number(x), Expr::Number(y)) => Expr::Number(x + y),
            _ => Expr::Add(a.into(), b.into()),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Number(x), Expr::Number(y)) => Expr::Number(x - y),
            _ => Expr::Sub(a.into(), b.into()),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Number(x), Expr::Number(y)) => Expr::Number(x * y),
            _ => Expr::Mul(a.into(), b.into()),
        }
    }

    /// Quotient; the caller is responsible for rejecting a folded-zero
    /// denominator (the parser does).
    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Number(x), Expr::Number(y)) if !y.is_zero() => Expr::Number(x / y),
            _ => Expr::Div(a.into(), b.into()),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Number(x) => Expr::Number(-x),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(other.into()),
        }
    }

    /// Power with rational exponent. `e^0` folds to 1 and `e^1` to `e`;
    /// integer powers of rational constants fold exactly.
    pub fn pow(base: Expr, exponent: Rat) -> Expr {
        Expr::pow_winding(base, exponent, 0)
    }

    pub fn pow_winding(base: Expr, exponent: Rat, winding: i32) -> Expr {
        if exponent.is_zero() {
            return Expr::integer(1);
        }
        if exponent.is_one() && winding == 0 {
            return base;
        }
        if exponent.is_integer() {
            if let Expr::Number(r) = &base {
                let k = exponent.to_integer();
                if k >= 0 || !r.is_zero() {
                    if let Ok(k32) = i32::try_from(k) {
                        return Expr::Number(r.pow(k32));
                    }
                }
            }
        }
        Expr::Pow {
            base: base.into(),
            exponent,
            winding,
        }
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::pow(a, Rat::new(1, 2))
    }

    /// True when the subtree does not mention the variable.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Number(_) | Expr::I | Expr::Pi => true,
            Expr::Var => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => a.is_constant(),
            Expr::Pow { base, .. } => base.is_constant(),
        }
    }

    /// Folds a constant subtree to an exact rational when possible.
    pub fn fold_rational(&self) -> Option<BigRational> {
        match self {
            Expr::Number(r) => Some(r.clone()),
            Expr::Add(a, b) => Some(a.fold_rational()? + b.fold_rational()?),
            Expr::Sub(a, b) => Some(a.fold_rational()? - b.fold_rational()?),
            Expr::Mul(a, b) => Some(a.fold_rational()? * b.fold_rational()?),
            Expr::Div(a, b) => {
                let d = b.fold_rational()?;
                if d.is_zero() {
                    None
                } else {
                    Some(a.fold_rational()? / d)
                }
            }
            Expr::Neg(a) => Some(-a.fold_rational()?),
            Expr::Pow {
                base,
                exponent,
                winding: 0,
            } if exponent.is_integer() => {
                let b = base.fold_rational()?;
                let k = exponent.to_integer();
                if b.is_zero() && k < 0 {
                    return None;
                }
                let k32 = i32::try_from(k).ok()?;
                Some(b.pow(k32))
            }
            _ => None,
        }
    }
}

/// Errors building a [`CurveParam`].
#[derive(Debug, thiserror::Error)]
pub enum CurveError {
    #[error("a curve parametrization needs at least 2 components, got {0}")]
    TooFewComponents(usize),
    #[error("numerator/denominator split disagrees with component {0} at s = {1}")]
    SplitMismatch(usize, C),
}

/// One component of a parametrization with its cached structural split.
#[derive(Clone, Debug)]
pub struct CurveComponent {
    pub expr: Expr,
    pub numerator: Expr,
    pub denominator: Expr,
}

/// An ordered tuple of `n >= 2` meromorphic components.
#[derive(Clone, Debug)]
pub struct CurveParam {
    components: Vec<CurveComponent>,
}

impl CurveParam {
    pub fn new(components: Vec<Expr>) -> Result<CurveParam, CurveError> {
        if components.len() < 2 {
            return Err(CurveError::TooFewComponents(components.len()));
        }
        let mut out = Vec::with_capacity(components.len());
        for (i, expr) in components.into_iter().enumerate() {
            let (numerator, denominator) = split(&expr);
            verify_split(i, &expr, &numerator, &denominator)?;
            out.push(CurveComponent {
                expr,
                numerator,
                denominator,
            });
        }
        Ok(CurveParam { components: out })
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[CurveComponent] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &CurveComponent {
        &self.components[i]
    }

    /// Evaluates the full tuple at a parameter value.
    pub fn eval(&self, z: C) -> Result<Vec<C>, EvalError> {
        self.components
            .iter()
            .map(|c| evaluate(&c.expr, z))
            .collect()
    }

    /// The same curve with branch windings applied to every component.
    pub fn with_leaf(&self, leaf: &LeafAssignment) -> CurveParam {
        if leaf.is_principal() {
            return self.clone();
        }
        let components = self
            .components
            .iter()
            .map(|c| CurveComponent {
                expr: leaf.apply(&c.expr),
                numerator: leaf.apply(&c.numerator),
                denominator: leaf.apply(&c.denominator),
            })
            .collect();
        CurveParam { components }
    }
}

/// Spot-checks `num/den == expr` at a few regular points.
fn verify_split(index: usize, expr: &Expr, num: &Expr, den: &Expr) -> Result<(), CurveError> {
    let probes = [
        C::new(0.7, 0.31),
        C::new(1.9, -0.45),
        C::new(-1.3, 0.8),
        C::new(2.6, 1.7),
        C::new(0.23, -1.1),
        C::new(-0.6, -2.3),
    ];
    let mut checked = 0;
    for &z in &probes {
        let (e, n, d) = match (evaluate(expr, z), evaluate(num, z), evaluate(den, z)) {
            (Ok(e), Ok(n), Ok(d)) => (e, n, d),
            _ => continue,
        };
        if d.norm() < 1e-12 || e.norm() > 1e8 {
            continue;
        }
        let ratio = n / d;
        if (ratio - e).norm() > 1e-6 * (1.0 + e.norm()) {
            return Err(CurveError::SplitMismatch(index, z));
        }
        checked += 1;
        if checked >= 3 {
            break;
        }
    }
    Ok(())
}

/// Signed gcd helpers shared across the crate.
pub(crate) fn gcd_i64(a: i64, b: i64) -> i64 {
    num::integer::gcd(a.abs(), b.abs())
}

pub(crate) fn lcm_i64(a: i64, b: i64) -> i64 {
    num::integer::lcm(a.abs().max(1), b.abs().max(1))
}
