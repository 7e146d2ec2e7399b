//! Arithmetic in the field Q(i) of Gaussian rationals.
//!
//! Every coefficient in this crate is a [`GaussianRational`]: a pair of
//! arbitrary-precision rationals (re, im) representing re + im*i.  The two
//! components are kept fully reduced by the underlying rational type, so
//! equality is structural and hashing is sound.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// An element of Q(i), stored as `re + im * i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_integer(n: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// Builds the real rational p/q.  Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        GaussianRational {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    pub fn from_real(re: BigRational) -> Self {
        GaussianRational { re, im: BigRational::zero() }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True for elements of Z (integral real part, no imaginary part).
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Squared modulus re^2 + im^2, an exact nonnegative rational.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse.  Panics on zero; use [`Self::checked_inv`]
    /// when the argument is not known to be nonzero.
    pub fn inv(&self) -> Self {
        self.checked_inv().expect("division by zero in Q(i)")
    }

    pub fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(GaussianRational { re: &self.re / &n, im: -&self.im / &n })
    }

    /// Exact square root in Q(i), if one exists.
    ///
    /// Solves (u + v*i)^2 = re + im*i over the rationals: either `im == 0`
    /// and the real part is a (possibly negative) rational square, or
    /// `u^2 = (re + |z|)/2` must be a rational square with `v = im/(2u)`.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.im.is_zero() {
            if self.re.is_positive() {
                return rational_sqrt(&self.re).map(Self::from_real);
            }
            let v = rational_sqrt(&-self.re.clone())?;
            return Some(GaussianRational { re: BigRational::zero(), im: v });
        }
        let r = rational_sqrt(&self.norm())?;
        let two = BigRational::from_integer(BigInt::from(2));
        let u = rational_sqrt(&((&self.re + &r) / &two))?;
        if u.is_zero() {
            return None;
        }
        let v = &self.im / &(&u * &two);
        let root = GaussianRational { re: u, im: v };
        debug_assert_eq!(&root * &root, *self);
        Some(root)
    }

    /// Total order used only for deterministic sorting of output
    /// (lexicographic on (re, im)); it is not compatible with arithmetic.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }

    /// Nearest f64 pair (re, im); exactness is lost, numeric use only.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

/// Exact square root of a nonnegative rational, if numerator and
/// denominator are both perfect squares.
fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    // num's ToPrimitive on Ratio<BigInt> handles magnitudes beyond f64 by
    // scaling; fall back to a quotient of part conversions if it declines.
    num::traits::ToPrimitive::to_f64(r).unwrap_or_else(|| {
        let n = num::traits::ToPrimitive::to_f64(r.numer()).unwrap_or(f64::NAN);
        let d = num::traits::ToPrimitive::to_f64(r.denom()).unwrap_or(f64::NAN);
        n / d
    })
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
        impl $trait<GaussianRational> for &GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}
forward_binop!(Add, add);

impl Sub<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}
forward_binop!(Sub, sub);

impl Mul<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}
forward_binop!(Mul, mul);

impl Div<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self * rhs.inv()
    }
}
forward_binop!(Div, div);

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Writes the canonical text for the pure-imaginary part `c*i`
/// (coefficient 1 and -1 collapse to `i` / `-i`).
fn fmt_imaginary(c: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.is_one() {
        write!(f, "i")
    } else if (-c.clone()).is_one() {
        write!(f, "-i")
    } else {
        fmt_rational(c, f)?;
        write!(f, "*i")
    }
}

impl fmt::Display for GaussianRational {
    /// Canonical form accepted back by the expression parser:
    /// `3`, `-1/2`, `i`, `-2/3*i`, `1+i`, `-1/2-3*i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return fmt_rational(&self.re, f);
        }
        if self.re.is_zero() {
            return fmt_imaginary(&self.im, f);
        }
        fmt_rational(&self.re, f)?;
        if self.im.is_positive() {
            write!(f, "+")?;
        }
        fmt_imaginary(&self.im, f)
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: i64, q: i64) -> GaussianRational {
        GaussianRational::from_ratio(p, q)
    }

    fn gi(re: i64, im: i64) -> GaussianRational {
        GaussianRational::new(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        )
    }

    #[test]
    fn field_basics() {
        let a = gi(1, 2);
        let b = gi(3, -1);
        assert_eq!(&a * &b, gi(5, 5));
        assert_eq!(&a + &b, gi(4, 1));
        assert_eq!(&(&a / &b) * &b, a);
        assert_eq!(&a * &a.inv(), GaussianRational::one());
    }

    #[test]
    fn i_squares_to_minus_one() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from_integer(-1));
    }

    #[test]
    fn conjugation_and_norm() {
        let a = gi(2, 3);
        assert_eq!((&a * &a.conj()).re(), &a.norm());
        assert!((&a * &a.conj()).is_real());
    }

    #[test]
    fn sqrt_of_rational_square() {
        assert_eq!(g(9, 4).sqrt(), Some(g(3, 2)));
        assert_eq!(g(-4, 1).sqrt(), Some(gi(0, 2)));
        assert_eq!(g(2, 1).sqrt(), None);
    }

    #[test]
    fn sqrt_of_complex_values() {
        // (1+i)^2 = 2i
        assert_eq!(gi(0, 2).sqrt(), Some(gi(1, 1)));
        // (2+3i)^2 = -5+12i
        assert_eq!(gi(-5, 12).sqrt(), Some(gi(2, 3)));
        // 1+2i is not a square in Q(i): norm 5 is not a rational square.
        assert_eq!(gi(1, 2).sqrt(), None);
    }

    #[test]
    fn sqrt_roundtrip_on_squares() {
        for (re, im) in [(1, 1), (-2, 5), (3, 0), (0, -7), (2, -3)] {
            let z = gi(re, im);
            let sq = &z * &z;
            let r = sq.sqrt().expect("square must have a root");
            assert!(&r * &r == sq);
        }
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(gi(0, 0).to_string(), "0");
        assert_eq!(g(-1, 2).to_string(), "-1/2");
        assert_eq!(gi(0, 1).to_string(), "i");
        assert_eq!(gi(0, -1).to_string(), "-i");
        assert_eq!(gi(0, 5).to_string(), "5*i");
        assert_eq!(gi(1, 1).to_string(), "1+i");
        assert_eq!(gi(1, -2).to_string(), "1-2*i");
        let half_i = GaussianRational::new(
            BigRational::zero(),
            BigRational::new(BigInt::from(-1), BigInt::from(2)),
        );
        assert_eq!(half_i.to_string(), "-1/2*i");
    }

    #[test]
    fn integrality_checks() {
        assert!(gi(4, 0).is_integer());
        assert!(!g(1, 2).is_integer());
        assert!(!gi(1, 1).is_integer());
    }
}
