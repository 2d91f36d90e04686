//! Exact rational arithmetic with a point at infinity.
//!
//! All valuations in this crate are rational numbers, with `Val::Inf`
//! playing the role of the valuation of zero. `Val` is totally ordered
//! with `Inf` as the maximum, and addition is absorbing in `Inf`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number.
pub type Q = BigRational;

/// Integer type used for all exact lattice arithmetic.
pub type Z = BigInt;

/// Build a rational from an integer.
pub fn qi(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

/// Build a rational from numerator and denominator.
pub fn qr(num: i64, den: i64) -> Q {
    Q::new(Z::from(num), Z::from(den))
}

/// Format a rational as `"p"` or `"p/q"` (the form accepted by [`parse_q`]).
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse a rational from `"p"` or `"p/q"` notation.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    match s.split_once('/') {
        None => Z::from_str(s)
            .map(Q::from_integer)
            .map_err(|e| format!("invalid rational {s:?}: {e}")),
        Some((num, den)) => {
            let n = Z::from_str(num.trim()).map_err(|e| format!("invalid rational {s:?}: {e}"))?;
            let d = Z::from_str(den.trim()).map_err(|e| format!("invalid rational {s:?}: {e}"))?;
            if d.is_zero() {
                return Err(format!("invalid rational {s:?}: zero denominator"));
            }
            Ok(Q::new(n, d))
        }
    }
}

/// A rational valuation extended by `+∞` (the valuation of zero).
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Val {
    /// A finite rational value.
    Fin(Q),
    /// Plus infinity; absorbing under addition and maximal in the order.
    Inf,
}

impl Val {
    /// The finite value zero.
    pub fn zero() -> Self {
        Val::Fin(Q::zero())
    }

    /// Finite constructor from an integer.
    pub fn from_int(n: i64) -> Self {
        Val::Fin(qi(n))
    }

    /// Returns the finite value, or `None` for `Inf`.
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Val::Fin(q) => Some(q),
            Val::Inf => None,
        }
    }

    /// Returns `true` for `Inf`.
    pub fn is_inf(&self) -> bool {
        matches!(self, Val::Inf)
    }

    /// Extract the finite value, panicking on `Inf`.
    ///
    /// Use only where infiniteness has already been ruled out.
    pub fn expect_finite(&self) -> &Q {
        self.finite().expect("unexpected infinite valuation")
    }
}

impl From<Q> for Val {
    fn from(q: Q) -> Self {
        Val::Fin(q)
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val::Inf, Val::Inf) => Ordering::Equal,
            (Val::Inf, Val::Fin(_)) => Ordering::Greater,
            (Val::Fin(_), Val::Inf) => Ordering::Less,
            (Val::Fin(a), Val::Fin(b)) => a.cmp(b),
        }
    }
}

impl Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a + b),
            _ => Val::Inf,
        }
    }
}

impl<'a> Add<&'a Val> for &'a Val {
    type Output = Val;
    fn add(self, rhs: &'a Val) -> Val {
        match (self, rhs) {
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a + b),
            _ => Val::Inf,
        }
    }
}

impl Sub<&Q> for &Val {
    type Output = Val;
    fn sub(self, rhs: &Q) -> Val {
        match self {
            Val::Fin(a) => Val::Fin(a - rhs),
            Val::Inf => Val::Inf,
        }
    }
}

impl Neg for Val {
    type Output = Val;
    fn neg(self) -> Val {
        match self {
            Val::Fin(a) => Val::Fin(-a),
            Val::Inf => Val::Inf,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(q) => write!(f, "{}", format_q(q)),
            Val::Inf => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An affine function `a + b·s` of one rational parameter.
///
/// These describe valuations and tangent coordinates along an edge of a
/// tropical curve, parameterized by arclength-like coordinate `s ≥ 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Aff {
    /// Constant term.
    pub a: Q,
    /// Slope.
    pub b: Q,
}

impl Aff {
    /// The constant function `a`.
    pub fn constant(a: Q) -> Self {
        Aff { a, b: Q::zero() }
    }

    /// The zero function.
    pub fn zero() -> Self {
        Aff::constant(Q::zero())
    }

    /// Construct from integer constant and slope.
    pub fn new_int(a: i64, b: i64) -> Self {
        Aff { a: qi(a), b: qi(b) }
    }

    /// Evaluate at `s`.
    pub fn eval(&self, s: &Q) -> Q {
        &self.a + &self.b * s
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Aff) -> Aff {
        Aff { a: &self.a + &other.a, b: &self.b + &other.b }
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &Aff) -> Aff {
        Aff { a: &self.a - &other.a, b: &self.b - &other.b }
    }

    /// Negation.
    pub fn neg(&self) -> Aff {
        Aff { a: -self.a.clone(), b: -self.b.clone() }
    }

    /// Scale by a rational.
    pub fn scale(&self, c: &Q) -> Aff {
        Aff { a: &self.a * c, b: &self.b * c }
    }

    /// True if this is the zero function.
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl fmt::Display for Aff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", format_q(&self.a))
        } else if self.a.is_zero() {
            write!(f, "{}*s", format_q(&self.b))
        } else if self.b.is_positive() {
            write!(f, "{} + {}*s", format_q(&self.a), format_q(&self.b))
        } else {
            write!(f, "{} - {}*s", format_q(&self.a), format_q(&-self.b.clone()))
        }
    }
}

impl fmt::Debug for Aff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
