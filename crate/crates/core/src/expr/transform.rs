//! Structural manipulations: numerator/denominator split, the `s -> s^g`
//! reparametrization, differentiation, leaf selection, and polynomial
//! coefficient extraction.

use super::eval::{rational_to_c, GaussianRational};
use super::{Expr, Rat, C};
use num::{BigRational, One, Zero};
use std::f64::consts::PI;

/// Product that prunes multiplicative units.
fn m(a: Expr, b: Expr) -> Expr {
    if a.is_one() {
        b
    } else if b.is_one() {
        a
    } else {
        Expr::mul(a, b)
    }
}

/// Structural numerator/denominator split. Quotients split, products and
/// integer powers distribute, everything else stays atomic on the numerator
/// side; fractional powers never split through their base, which keeps the
/// principal-branch value of the recombined quotient equal to the original.
pub fn split(e: &Expr) -> (Expr, Expr) {
    let one = Expr::integer(1);
    match e {
        Expr::Div(a, b) => {
            let (na, da) = split(a);
            let (nb, db) = split(b);
            (m(na, db), m(da, nb))
        }
        Expr::Mul(a, b) => {
            let (na, da) = split(a);
            let (nb, db) = split(b);
            (m(na, nb), m(da, db))
        }
        Expr::Add(a, b) => {
            let (na, da) = split(a);
            let (nb, db) = split(b);
            if da.is_one() && db.is_one() {
                (e.clone(), one)
            } else {
                (Expr::add(m(na, db.clone()), m(nb, da.clone())), m(da, db))
            }
        }
        Expr::Sub(a, b) => {
            let (na, da) = split(a);
            let (nb, db) = split(b);
            if da.is_one() && db.is_one() {
                (e.clone(), one)
            } else {
                (Expr::sub(m(na, db.clone()), m(nb, da.clone())), m(da, db))
            }
        }
        Expr::Neg(a) => {
            let (na, da) = split(a);
            (Expr::neg(na), da)
        }
        Expr::Pow {
            base,
            exponent,
            winding,
        } => {
            if exponent.is_integer() {
                let (nb, db) = split(base);
                if *exponent.numer() >= 0 {
                    (
                        Expr::pow_winding(nb, *exponent, *winding),
                        Expr::pow_winding(db, *exponent, *winding),
                    )
                } else {
                    (
                        Expr::pow_winding(db, -*exponent, *winding),
                        Expr::pow_winding(nb, -*exponent, *winding),
                    )
                }
            } else if *exponent.numer() < 0 {
                (
                    one,
                    Expr::pow_winding((**base).clone(), -*exponent, *winding),
                )
            } else {
                (e.clone(), one)
            }
        }
        _ => (e.clone(), one),
    }
}

/// Replaces `s` by `s^g`, combining exponents formally on pure powers of the
/// variable so that e.g. `sqrt(s)` with `g = 2` becomes `s`.
pub fn substitute_power(e: &Expr, gamma: i64) -> Expr {
    assert!(gamma >= 1, "substitution exponent must be positive");
    match e {
        Expr::Var => Expr::pow(Expr::Var, Rat::from_integer(gamma)),
        Expr::Pow {
            base,
            exponent,
            winding,
        } => match **base {
            Expr::Var => Expr::pow_winding(Expr::Var, *exponent * gamma, *winding),
            _ => Expr::pow_winding(substitute_power(base, gamma), *exponent, *winding),
        },
        Expr::Number(_) | Expr::I | Expr::Pi => e.clone(),
        Expr::Add(a, b) => Expr::add(substitute_power(a, gamma), substitute_power(b, gamma)),
        Expr::Sub(a, b) => Expr::sub(substitute_power(a, gamma), substitute_power(b, gamma)),
        Expr::Mul(a, b) => Expr::mul(substitute_power(a, gamma), substitute_power(b, gamma)),
        Expr::Div(a, b) => Expr::div(substitute_power(a, gamma), substitute_power(b, gamma)),
        Expr::Neg(a) => Expr::neg(substitute_power(a, gamma)),
        Expr::Sin(a) => Expr::Sin(substitute_power(a, gamma).into()),
        Expr::Cos(a) => Expr::Cos(substitute_power(a, gamma).into()),
        Expr::Exp(a) => Expr::Exp(substitute_power(a, gamma).into()),
    }
}

/// Symbolic derivative, used by the Newton refinements in pole finding.
pub fn derivative(e: &Expr) -> Expr {
    let zero = Expr::integer(0);
    match e {
        Expr::Number(_) | Expr::I | Expr::Pi => zero,
        Expr::Var => Expr::integer(1),
        Expr::Add(a, b) => dadd(derivative(a), derivative(b)),
        Expr::Sub(a, b) => dsub(derivative(a), derivative(b)),
        Expr::Mul(a, b) => dadd(
            dmul(derivative(a), (**b).clone()),
            dmul((**a).clone(), derivative(b)),
        ),
        Expr::Div(a, b) => {
            let num = dsub(
                dmul(derivative(a), (**b).clone()),
                dmul((**a).clone(), derivative(b)),
            );
            if num.is_zero() {
                zero
            } else {
                Expr::div(num, Expr::pow((**b).clone(), Rat::from_integer(2)))
            }
        }
        Expr::Neg(a) => Expr::neg(derivative(a)),
        Expr::Pow {
            base,
            exponent,
            winding,
        } => {
            // d(w^r) = r * w^(r-1) * w', with the winding carried along; the
            // phase is unchanged because exp(2*pi*i*k*(r-1)) = exp(2*pi*i*k*r).
            let db = derivative(base);
            if db.is_zero() {
                return zero;
            }
            let r = Expr::Number(BigRational::new(
                (*exponent.numer()).into(),
                (*exponent.denom()).into(),
            ));
            dmul(
                dmul(
                    r,
                    Expr::pow_winding((**base).clone(), *exponent - Rat::one(), *winding),
                ),
                db,
            )
        }
        Expr::Sin(a) => dmul(Expr::Cos(a.clone()), derivative(a)),
        Expr::Cos(a) => Expr::neg(dmul(Expr::Sin(a.clone()), derivative(a))),
        Expr::Exp(a) => dmul(Expr::Exp(a.clone()), derivative(a)),
    }
}

fn dadd(a: Expr, b: Expr) -> Expr {
    if a.is_zero() {
        b
    } else if b.is_zero() {
        a
    } else {
        Expr::add(a, b)
    }
}

fn dsub(a: Expr, b: Expr) -> Expr {
    if b.is_zero() {
        a
    } else if a.is_zero() {
        Expr::neg(b)
    } else {
        Expr::sub(a, b)
    }
}

fn dmul(a: Expr, b: Expr) -> Expr {
    if a.is_zero() || b.is_zero() {
        Expr::integer(0)
    } else {
        m(a, b)
    }
}

/// Distinct base subexpressions appearing under a fractional power, each
/// with the winding period (lcm of the exponent denominators on that base).
pub fn fractional_power_bases(e: &Expr) -> Vec<(Expr, i64)> {
    let mut out: Vec<(Expr, i64)> = Vec::new();
    collect_bases(e, &mut out);
    out
}

fn collect_bases(e: &Expr, out: &mut Vec<(Expr, i64)>) {
    match e {
        Expr::Pow { base, exponent, .. } => {
            if !exponent.is_integer() {
                let q = *exponent.denom();
                match out.iter_mut().find(|(b, _)| b == &**base) {
                    Some((_, period)) => *period = num::integer::lcm(*period, q),
                    None => out.push(((**base).clone(), q)),
                }
            }
            collect_bases(base, out);
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            collect_bases(a, out);
            collect_bases(b, out);
        }
        Expr::Neg(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => collect_bases(a, out),
        _ => {}
    }
}

/// A choice of leaf for every fractional-power base: base expression paired
/// with its winding. An empty assignment is the principal leaf.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeafAssignment(Vec<(Expr, i32)>);

impl LeafAssignment {
    pub fn principal() -> Self {
        LeafAssignment(Vec::new())
    }

    pub fn new(mut entries: Vec<(Expr, i32)>) -> Self {
        entries.retain(|(_, w)| *w != 0);
        entries.sort_by_key(|(b, _)| b.to_string());
        LeafAssignment(entries)
    }

    pub fn is_principal(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[(Expr, i32)] {
        &self.0
    }

    /// Rewrites every fractional power whose base matches an entry to carry
    /// that winding. Matching is on the original (principal) base structure.
    pub fn apply(&self, e: &Expr) -> Expr {
        if self.is_principal() {
            return e.clone();
        }
        self.apply_rec(e)
    }

    fn apply_rec(&self, e: &Expr) -> Expr {
        match e {
            Expr::Pow {
                base,
                exponent,
                winding,
            } => {
                let w = if exponent.is_integer() {
                    *winding
                } else {
                    self.0
                        .iter()
                        .find(|(b, _)| b == &**base)
                        .map(|(_, w)| *w)
                        .unwrap_or(*winding)
                };
                Expr::Pow {
                    base: self.apply_rec(base).into(),
                    exponent: *exponent,
                    winding: w,
                }
            }
            Expr::Add(a, b) => Expr::Add(self.apply_rec(a).into(), self.apply_rec(b).into()),
            Expr::Sub(a, b) => Expr::Sub(self.apply_rec(a).into(), self.apply_rec(b).into()),
            Expr::Mul(a, b) => Expr::Mul(self.apply_rec(a).into(), self.apply_rec(b).into()),
            Expr::Div(a, b) => Expr::Div(self.apply_rec(a).into(), self.apply_rec(b).into()),
            Expr::Neg(a) => Expr::Neg(self.apply_rec(a).into()),
            Expr::Sin(a) => Expr::Sin(self.apply_rec(a).into()),
            Expr::Cos(a) => Expr::Cos(self.apply_rec(a).into()),
            Expr::Exp(a) => Expr::Exp(self.apply_rec(a).into()),
            other => other.clone(),
        }
    }

    pub fn describe(&self) -> Vec<(String, i32)> {
        self.0.iter().map(|(b, w)| (b.to_string(), *w)).collect()
    }

    /// Stable identity used to dedup poles found on the same leaf.
    pub fn canonical_key(&self) -> String {
        self.0
            .iter()
            .map(|(b, w)| format!("{b}@{w}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

const POLY_DEGREE_CAP: usize = 64;

/// Ascending complex coefficients when the expression is polynomial in `s`
/// (constants may involve `I` and `pi`); `None` otherwise.
pub fn polynomial_coefficients(e: &Expr) -> Option<Vec<C>> {
    let mut v = poly_rec(e)?;
    while v.len() > 1 && v.last().map(|c| c.norm() == 0.0) == Some(true) {
        v.pop();
    }
    Some(v)
}

fn poly_rec(e: &Expr) -> Option<Vec<C>> {
    Some(match e {
        Expr::Number(r) => vec![rational_to_c(r)],
        Expr::I => vec![C::new(0.0, 1.0)],
        Expr::Pi => vec![C::new(PI, 0.0)],
        Expr::Var => vec![C::new(0.0, 0.0), C::new(1.0, 0.0)],
        Expr::Add(a, b) => poly_add(&poly_rec(a)?, &poly_rec(b)?, 1.0),
        Expr::Sub(a, b) => poly_add(&poly_rec(a)?, &poly_rec(b)?, -1.0),
        Expr::Mul(a, b) => poly_mul(&poly_rec(a)?, &poly_rec(b)?)?,
        Expr::Div(a, b) => {
            let d = poly_rec(b)?;
            if d.len() != 1 || d[0].norm() == 0.0 {
                return None;
            }
            poly_rec(a)?.into_iter().map(|c| c / d[0]).collect()
        }
        Expr::Neg(a) => poly_rec(a)?.into_iter().map(|c| -c).collect(),
        Expr::Pow { base, exponent, .. } => {
            if !exponent.is_integer() || *exponent.numer() < 0 {
                return None;
            }
            let b = poly_rec(base)?;
            let mut acc = vec![C::new(1.0, 0.0)];
            for _ in 0..exponent.to_integer() {
                acc = poly_mul(&acc, &b)?;
            }
            acc
        }
        Expr::Sin(_) | Expr::Cos(_) | Expr::Exp(_) => return None,
    })
}

fn poly_add(a: &[C], b: &[C], sign: f64) -> Vec<C> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default() * sign
        })
        .collect()
}

fn poly_mul(a: &[C], b: &[C]) -> Option<Vec<C>> {
    if a.len() + b.len() > POLY_DEGREE_CAP + 2 {
        return None;
    }
    let mut out = vec![C::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Some(out)
}

/// Exact Gaussian-rational polynomial coefficients (no `pi`), ascending.
pub(crate) fn polynomial_coefficients_exact(e: &Expr) -> Option<Vec<GaussianRational>> {
    let mut v = exact_rec(e)?;
    while v.len() > 1 && v.last().map(GaussianRational::is_zero) == Some(true) {
        v.pop();
    }
    Some(v)
}

fn exact_rec(e: &Expr) -> Option<Vec<GaussianRational>> {
    let zero = GaussianRational::from_integer(0);
    Some(match e {
        Expr::Number(r) => vec![GaussianRational::new(r.clone(), BigRational::zero())],
        Expr::I => vec![GaussianRational::new(
            BigRational::zero(),
            BigRational::one(),
        )],
        Expr::Pi => return None,
        Expr::Var => vec![zero, GaussianRational::from_integer(1)],
        Expr::Add(a, b) => exact_add(exact_rec(a)?, exact_rec(b)?, false),
        Expr::Sub(a, b) => exact_add(exact_rec(a)?, exact_rec(b)?, true),
        Expr::Mul(a, b) => exact_mul(&exact_rec(a)?, &exact_rec(b)?)?,
        Expr::Div(a, b) => {
            let d = exact_rec(b)?;
            if d.len() != 1 || d[0].is_zero() {
                return None;
            }
            let inv = GaussianRational::from_integer(1).quotient(&d[0])?;
            exact_rec(a)?.iter().map(|c| c.product(&inv)).collect()
        }
        Expr::Neg(a) => exact_rec(a)?
            .into_iter()
            .map(|c| zero.difference(&c))
            .collect(),
        Expr::Pow { base, exponent, .. } => {
            if !exponent.is_integer() || *exponent.numer() < 0 {
                return None;
            }
            let b = exact_rec(base)?;
            let mut acc = vec![GaussianRational::from_integer(1)];
            for _ in 0..exponent.to_integer() {
                acc = exact_mul(&acc, &b)?;
            }
            acc
        }
        Expr::Sin(_) | Expr::Cos(_) | Expr::Exp(_) => return None,
    })
}

fn exact_add(
    a: Vec<GaussianRational>,
    b: Vec<GaussianRational>,
    negate: bool,
) -> Vec<GaussianRational> {
    let zero = GaussianRational::from_integer(0);
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| zero.clone());
            let y = b.get(i).cloned().unwrap_or_else(|| zero.clone());
            if negate {
                x.difference(&y)
            } else {
                x.sum(&y)
            }
        })
        .collect()
}

fn exact_mul(a: &[GaussianRational], b: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
    if a.len() + b.len() > POLY_DEGREE_CAP + 2 {
        return None;
    }
    let mut out = vec![GaussianRational::from_integer(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].sum(&x.product(y));
        }
    }
    Some(out)
}
