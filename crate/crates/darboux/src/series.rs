//! Truncated Laurent–Puiseux series Σ a_i x^{i/n} over Q(i).
//!
//! A series stores its polydromy order n, a sparse map from exponent
//! numerator i to the coefficient of x^{i/n}, and an exclusive truncation
//! bound: the value is known exactly for every exponent numerator below
//! `trunc`.  Negative exponents are first-class (several branches in this
//! problem domain behave like x^{-1/2} near the origin).
//!
//! Every operation propagates the truncation bound pessimistically, so
//! "equals zero to truncation" is a statement about coefficients that were
//! actually computed, never about coefficients assumed absent.  Values born
//! from exact polynomials get the sentinel window [`PuiseuxSeries::EXACT`],
//! which is large enough that sums of a few windows cannot overflow.
//!
//! Normalization keeps the representation canonical: no stored zero
//! coefficients, no exponents at or above the truncation bound, and n
//! reduced so that gcd(n, all stored i) = 1.  Structural equality on
//! normalized series therefore means "identical known part and identical
//! certified window".

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::gaussian::GaussianRational;
use crate::poly::{term_text_over, BivarPoly, Var};
use crate::unipoly::UniPoly;

#[derive(Clone, PartialEq, Eq)]
pub struct PuiseuxSeries {
    n: u32,
    coeffs: BTreeMap<i64, GaussianRational>,
    trunc: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("reciprocal of a series that is zero to its truncation")]
    ZeroReciprocal,
}

/// Integer gcd on i64, result nonnegative.
fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    a / (gcd_i64(a as i64, b as i64) as u32) * b
}

/// Ceiling division for possibly negative numerators.
fn div_ceil_i64(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    let q = a / b;
    if a % b > 0 {
        q + 1
    } else {
        q
    }
}

impl PuiseuxSeries {
    /// Truncation sentinel for series that are exactly known (polynomial
    /// input).  Kept far from i64::MAX so window arithmetic cannot overflow.
    pub const EXACT: i64 = i64::MAX / 8;

    fn normalized(n: u32, mut coeffs: BTreeMap<i64, GaussianRational>, mut trunc: i64) -> Self {
        assert!(n > 0, "polydromy order must be positive");
        trunc = trunc.min(Self::EXACT);
        coeffs.retain(|i, c| *i < trunc && !c.is_zero());
        let mut g = n as i64;
        for i in coeffs.keys() {
            g = gcd_i64(g, *i);
            if g == 1 {
                break;
            }
        }
        if coeffs.is_empty() {
            // Pure O(x^(trunc/n)); renormalize the window to polydromy 1.
            return PuiseuxSeries { n: 1, coeffs, trunc: div_ceil_i64(trunc, n as i64) };
        }
        if g > 1 {
            coeffs = coeffs.into_iter().map(|(i, c)| (i / g, c)).collect();
            trunc = div_ceil_i64(trunc, g);
            return PuiseuxSeries { n: n / g as u32, coeffs, trunc };
        }
        PuiseuxSeries { n, coeffs, trunc }
    }

    /// The zero series, known below the integer exponent `order`.
    pub fn zero(order: i64) -> Self {
        Self::normalized(1, BTreeMap::new(), order)
    }

    pub fn constant(c: GaussianRational, order: i64) -> Self {
        Self::from_terms(1, vec![(0, c)], order)
    }

    /// Builds from (exponent numerator, coefficient) pairs on the x^{1/n} grid,
    /// known below numerator `trunc`.
    pub fn from_terms(n: u32, terms: Vec<(i64, GaussianRational)>, trunc: i64) -> Self {
        let mut map = BTreeMap::new();
        for (i, c) in terms {
            let entry = map.entry(i).or_insert_with(GaussianRational::zero);
            *entry = &*entry + &c;
        }
        Self::normalized(n, map, trunc)
    }

    /// c·x^{p/q}, known below the real exponent `order`.
    pub fn monomial(c: GaussianRational, p: i64, q: u32, order: i64) -> Self {
        Self::from_terms(q, vec![(p, c)], order.saturating_mul(q as i64))
    }

    /// An exactly-known univariate polynomial in x.
    pub fn from_unipoly_x(p: &UniPoly) -> Self {
        let terms = p
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| (k as i64, c.clone()))
            .collect();
        Self::from_terms(1, terms, Self::EXACT)
    }

    /// An exactly-known polynomial in x alone; None if `p` involves y.
    pub fn from_poly_x(p: &BivarPoly) -> Option<Self> {
        Some(Self::from_unipoly_x(&p.to_unipoly(Var::X)?))
    }

    pub fn polydromy(&self) -> u32 {
        self.n
    }

    /// Exclusive truncation bound, in exponent-numerator units.
    pub fn trunc_num(&self) -> i64 {
        self.trunc
    }

    /// The certified window as a real exponent fraction (numerator, denominator).
    pub fn window(&self) -> (i64, u32) {
        (self.trunc, self.n)
    }

    pub fn is_zero_to_trunc(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest exponent numerator with a nonzero coefficient.
    pub fn min_exp_num(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Leading exponent as a reduced fraction.
    pub fn min_exp(&self) -> Option<(i64, u32)> {
        let i = self.min_exp_num()?;
        let g = gcd_i64(i, self.n as i64).max(1);
        Some((i / g, self.n / g as u32))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &GaussianRational)> {
        self.coeffs.iter()
    }

    /// Coefficient of x^{i/n} on this series' own grid.
    pub fn coeff_num(&self, i: i64) -> GaussianRational {
        self.coeffs.get(&i).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Coefficient of x^{p/q}; zero when the exponent falls off this grid.
    pub fn coeff(&self, p: i64, q: u32) -> GaussianRational {
        let num = p * self.n as i64;
        if num % q as i64 != 0 {
            return GaussianRational::zero();
        }
        self.coeff_num(num / q as i64)
    }

    fn leading_coeff(&self) -> Option<GaussianRational> {
        self.coeffs.values().next().cloned()
    }

    /// Re-expresses on a finer grid with polydromy `to` (a multiple of n).
    fn regrid(&self, to: u32) -> Self {
        debug_assert_eq!(to % self.n, 0);
        let f = (to / self.n) as i64;
        if f == 1 {
            return self.clone();
        }
        PuiseuxSeries {
            n: to,
            coeffs: self.coeffs.iter().map(|(i, c)| (i * f, c.clone())).collect(),
            trunc: self.trunc.saturating_mul(f).min(Self::EXACT),
        }
    }

    /// The first unknown exponent numerator, treating a vanishing series as
    /// "could start anywhere from the window on".
    pub fn support_floor(&self) -> i64 {
        self.min_exp_num().unwrap_or(self.trunc)
    }

    /// Reinterprets the series under x → x^{1/q}: every exponent e/n becomes
    /// e/(n·q).  Used to undo a grid-refining substitution.
    pub fn substitute_x_root(&self, q: u32) -> Self {
        assert!(q > 0);
        Self::normalized(self.n * q, self.coeffs.clone(), self.trunc)
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        if s.is_zero() {
            return Self::normalized(self.n, BTreeMap::new(), self.trunc);
        }
        PuiseuxSeries {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c * s)).collect(),
            trunc: self.trunc,
        }
    }

    /// Multiplies by x^{p/q} (exact operation; the window shifts along).
    pub fn mul_xpow(&self, p: i64, q: u32) -> Self {
        let n = lcm_u32(self.n, q);
        let s = self.regrid(n);
        let shift = p * (n / q) as i64;
        Self::normalized(
            n,
            s.coeffs.into_iter().map(|(i, c)| (i + shift, c)).collect(),
            s.trunc.saturating_add(shift),
        )
    }

    /// Termwise d/dx; the certified window drops by one full power of x.
    pub fn derivative(&self) -> Self {
        let n = self.n as i64;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(i, c)| (i - n, c * &GaussianRational::from_ratio(*i, n)))
            .collect();
        Self::normalized(self.n, coeffs, self.trunc - n)
    }

    /// Keeps only exponents below the real bound p/q (window shrink).
    pub fn truncate_window(&self, p: i64, q: u32) -> Self {
        let n = lcm_u32(self.n, q);
        let s = self.regrid(n);
        let bound = p * (n / q) as i64;
        Self::normalized(n, s.coeffs, s.trunc.min(bound))
    }

    /// Cap on reciprocal expansions, in real exponents.  A series whose
    /// window is the [`Self::EXACT`] sentinel has an infinite reciprocal
    /// expansion; the result window is clamped here instead of looping.
    const MAX_EXPANSION: i64 = 4096;

    /// Multiplicative inverse.  The window contracts by twice the leading
    /// exponent: s = a·x^r·(1 + u) is known below T, so u is known below
    /// T − r and the expanded geometric series inherits that bound before
    /// the final x^{-r} shift.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let Some(r) = self.min_exp_num() else {
            return Err(SeriesError::ZeroReciprocal);
        };
        let a = self.leading_coeff().expect("nonzero series has a leading coefficient");
        let ainv = a.inv();
        let n = self.n;
        let w = (self.trunc - r).min(Self::MAX_EXPANSION.saturating_mul(n as i64));
        let one = Self::constant(GaussianRational::one(), Self::EXACT);
        // u := s/(a x^r) − 1, supported on strictly positive exponents.
        let u = &self.mul_xpow(-r, n).scale(&ainv) - &one;
        let mut acc = one.truncate_window(w, n);
        let mut term = acc.clone();
        loop {
            term = &term * &(-&u);
            // Powers of u march rightward; once the term starts at or past
            // the result window it can no longer contribute.
            let Some((mp, mq)) = term.min_exp() else { break };
            if mp * n as i64 >= w * mq as i64 {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc.truncate_window(w, n).scale(&ainv).mul_xpow(-r, n))
    }

    /// Integer power; negative exponents go through [`Self::reciprocal`].
    pub fn powi(&self, e: i64) -> Result<Self, SeriesError> {
        if e < 0 {
            return self.reciprocal()?.powi(-e);
        }
        let mut acc = Self::constant(GaussianRational::one(), Self::EXACT);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// True when both series agree coefficient-by-coefficient on the
    /// intersection of their certified windows.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = lcm_u32(self.n, other.n);
        let a = self.regrid(n);
        let b = other.regrid(n);
        let bound = a.trunc.min(b.trunc);
        let keys: std::collections::BTreeSet<i64> = a
            .coeffs
            .keys()
            .chain(b.coeffs.keys())
            .copied()
            .filter(|i| *i < bound)
            .collect();
        keys.into_iter().all(|i| a.coeff_num(i) == b.coeff_num(i))
    }

    /// Deterministic ordering for root lists: by first differing coefficient
    /// along ascending exponents (comparing within the common window).
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        let n = lcm_u32(self.n, other.n);
        let a = self.regrid(n);
        let b = other.regrid(n);
        let bound = a.trunc.min(b.trunc);
        let keys: std::collections::BTreeSet<i64> = a
            .coeffs
            .keys()
            .chain(b.coeffs.keys())
            .copied()
            .filter(|i| *i < bound)
            .collect();
        for i in keys {
            let ord = a.coeff_num(i).canonical_cmp(&b.coeff_num(i));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }
}

impl Add<&PuiseuxSeries> for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn add(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        let n = lcm_u32(self.n, rhs.n);
        let a = self.regrid(n);
        let b = rhs.regrid(n);
        let mut coeffs = a.coeffs;
        for (i, c) in b.coeffs {
            let entry = coeffs.entry(i).or_insert_with(GaussianRational::zero);
            *entry = &*entry + &c;
        }
        PuiseuxSeries::normalized(n, coeffs, a.trunc.min(b.trunc))
    }
}

impl Sub<&PuiseuxSeries> for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn sub(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        self + &(-rhs)
    }
}

impl Mul<&PuiseuxSeries> for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn mul(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
        let n = lcm_u32(self.n, rhs.n);
        let a = self.regrid(n);
        let b = rhs.regrid(n);
        // A product coefficient at e is complete iff every split i + j = e
        // has both factors inside their windows; unknown tail terms of one
        // factor first matter at (window of one) + (leading exponent of the
        // other).
        let trunc = (a.trunc.saturating_add(b.support_floor()))
            .min(b.trunc.saturating_add(a.support_floor()));
        let mut coeffs: BTreeMap<i64, GaussianRational> = BTreeMap::new();
        for (i, ci) in &a.coeffs {
            for (j, cj) in &b.coeffs {
                let e = i + j;
                if e >= trunc {
                    continue;
                }
                let entry = coeffs.entry(e).or_insert_with(GaussianRational::zero);
                *entry = &*entry + &(ci * cj);
            }
        }
        PuiseuxSeries::normalized(n, coeffs, trunc)
    }
}

impl Neg for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        PuiseuxSeries {
            n: self.n,
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, -c)).collect(),
            trunc: self.trunc,
        }
    }
}

macro_rules! forward_series_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<PuiseuxSeries> for PuiseuxSeries {
            type Output = PuiseuxSeries;
            fn $method(self, rhs: PuiseuxSeries) -> PuiseuxSeries {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&PuiseuxSeries> for PuiseuxSeries {
            type Output = PuiseuxSeries;
            fn $method(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
                (&self).$method(rhs)
            }
        }
        impl $trait<PuiseuxSeries> for &PuiseuxSeries {
            type Output = PuiseuxSeries;
            fn $method(self, rhs: PuiseuxSeries) -> PuiseuxSeries {
                self.$method(&rhs)
            }
        }
    };
}
forward_series_binop!(Add, add);
forward_series_binop!(Sub, sub);
forward_series_binop!(Mul, mul);

impl Neg for PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        -&self
    }
}

fn exponent_text(i: i64, n: u32) -> String {
    let g = gcd_i64(i, n as i64).max(1);
    let (p, q) = (i / g, n as i64 / g);
    if q == 1 {
        match p {
            0 => String::new(),
            1 => "x".to_string(),
            _ if p > 1 => format!("x^{p}"),
            _ => format!("x^({p})"),
        }
    } else {
        format!("x^({p}/{q})")
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (i, c)) in self.coeffs.iter().enumerate() {
            let (neg, body) = term_text_over(c, &exponent_text(*i, self.n));
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{body}")?;
        }
        // An exact series needs no window marker.
        if self.trunc >= Self::EXACT {
            if self.coeffs.is_empty() {
                write!(f, "0")?;
            }
            return Ok(());
        }
        if !self.coeffs.is_empty() {
            write!(f, " + ")?;
        }
        let e = exponent_text(self.trunc, self.n);
        if e.is_empty() {
            write!(f, "O(1)")
        } else {
            write!(f, "O({e})")
        }
    }
}

impl fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    fn q(p: i64, q_: i64) -> GaussianRational {
        GaussianRational::from_ratio(p, q_)
    }

    /// Newton iteration for √(1 + t) with integer exponents, as a test
    /// helper independent of the root-finding machinery.
    fn sqrt_one_plus(t: &PuiseuxSeries) -> PuiseuxSeries {
        let one = PuiseuxSeries::constant(g(1), PuiseuxSeries::EXACT)
            .truncate_window(t.trunc_num(), t.polydromy());
        let target = &one + t;
        let mut s = one;
        for _ in 0..t.trunc_num().max(1) {
            let next = (&s + &(&target * &s.reciprocal().unwrap())).scale(&q(1, 2));
            if next == s {
                break;
            }
            s = next;
        }
        s
    }

    #[test]
    fn derivative_power_rule_on_fractional_exponent() {
        let s = PuiseuxSeries::monomial(g(1), 3, 2, 10);
        let d = s.derivative();
        assert_eq!(d.coeff(1, 2), q(3, 2));
        assert_eq!(d.min_exp(), Some((1, 2)));
    }

    #[test]
    fn geometric_series_reciprocal() {
        let one_plus_x = PuiseuxSeries::from_terms(1, vec![(0, g(1)), (1, g(1))], 8);
        let r = one_plus_x.reciprocal().unwrap();
        for k in 0..8 {
            assert_eq!(r.coeff_num(k), if k % 2 == 0 { g(1) } else { g(-1) });
        }
        let prod = &one_plus_x * &r;
        assert!(prod.agrees_with(&PuiseuxSeries::constant(g(1), 8)));
    }

    #[test]
    fn sqrt_branch_squares_back() {
        // x^(-1/2)·√(1+x) squared gives 1/x + 1.
        let x = PuiseuxSeries::from_terms(1, vec![(1, g(1))], 12);
        let root = sqrt_one_plus(&x).mul_xpow(-1, 2);
        assert_eq!(root.polydromy(), 2);
        assert_eq!(root.coeff(-1, 2), g(1));
        assert_eq!(root.coeff(1, 2), q(1, 2));
        assert_eq!(root.coeff(3, 2), q(-1, 8));
        let sq = &root * &root;
        let expected = PuiseuxSeries::from_terms(1, vec![(-1, g(1)), (0, g(1))], 10);
        assert!(sq.agrees_with(&expected));
    }

    #[test]
    fn polydromy_reduces_after_cancellation() {
        let a = PuiseuxSeries::monomial(g(1), 1, 2, 6); // x^(1/2)
        let b = PuiseuxSeries::monomial(g(1), 1, 3, 6); // x^(1/3)
        let sum = &a + &b;
        assert_eq!(sum.polydromy(), 6);
        let back = &sum - &b;
        assert_eq!(back.polydromy(), 2);
        assert_eq!(back.coeff(1, 2), g(1));
    }

    #[test]
    fn zero_series_normalizes_window() {
        let a = PuiseuxSeries::monomial(g(1), 1, 2, 5); // trunc numerator 10 on grid 2
        let z = &a - &a;
        assert!(z.is_zero_to_trunc());
        assert_eq!(z.polydromy(), 1);
        assert_eq!(z.window(), (5, 1));
    }

    #[test]
    fn product_window_accounts_for_leading_exponents() {
        // a = x^(-1) + O(x^3), b = x + O(x^5): unknown tail of a enters at
        // exponent 3 + 1 = 4; of b at 5 − 1 = 4.  Window must be 4.
        let a = PuiseuxSeries::from_terms(1, vec![(-1, g(1))], 3);
        let b = PuiseuxSeries::from_terms(1, vec![(1, g(1))], 5);
        let prod = &a * &b;
        assert_eq!(prod.window(), (4, 1));
        assert_eq!(prod.coeff_num(0), g(1));
    }

    #[test]
    fn reciprocal_window_shrinks_by_twice_leading_exponent() {
        let s = PuiseuxSeries::from_terms(1, vec![(2, g(1)), (3, g(1))], 9);
        let r = s.reciprocal().unwrap();
        // 1/(x^2(1+x)) = x^(-2)(1 − x + x² …), known below 9 − 2·2 = 5.
        assert_eq!(r.window(), (5, 1));
        assert_eq!(r.coeff_num(-2), g(1));
        assert_eq!(r.coeff_num(-1), g(-1));
        assert!((&r * &s).agrees_with(&PuiseuxSeries::constant(g(1), 5)));
    }

    #[test]
    fn reciprocal_of_vanishing_series_fails() {
        assert_eq!(PuiseuxSeries::zero(5).reciprocal(), Err(SeriesError::ZeroReciprocal));
    }

    #[test]
    fn display_formats() {
        let s = PuiseuxSeries::from_terms(2, vec![(-1, g(1)), (1, q(1, 2)), (3, q(-1, 8))], 7);
        assert_eq!(s.to_string(), "x^(-1/2) + 1/2*x^(1/2) - 1/8*x^(3/2) + O(x^(7/2))");
        let t = PuiseuxSeries::from_terms(1, vec![(0, g(2)), (2, g(-1))], 4);
        assert_eq!(t.to_string(), "2 - x^2 + O(x^4)");
        assert_eq!(PuiseuxSeries::zero(3).to_string(), "O(x^3)");
        let exact = PuiseuxSeries::from_unipoly_x(&UniPoly::var());
        assert_eq!(exact.to_string(), "x");
        assert_eq!(PuiseuxSeries::zero(PuiseuxSeries::EXACT).to_string(), "0");
    }

    #[test]
    fn canonical_ordering_separates_branches() {
        let plus = PuiseuxSeries::from_terms(2, vec![(-1, g(1)), (1, q(1, 2))], 8);
        let minus = PuiseuxSeries::from_terms(2, vec![(-1, g(-1)), (1, q(-1, 2))], 8);
        assert_eq!(minus.cmp_canonical(&plus), Ordering::Less);
        assert_eq!(plus.cmp_canonical(&plus), Ordering::Equal);
    }

    #[test]
    fn powi_negative_exponent() {
        let s = PuiseuxSeries::from_terms(1, vec![(1, g(2))], 6); // 2x
        let p = s.powi(-2).unwrap();
        assert_eq!(p.coeff_num(-2), q(1, 4));
    }
}
