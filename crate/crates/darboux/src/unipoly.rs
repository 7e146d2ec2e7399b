//! Dense univariate polynomials over Q(i), plus root extraction.
//!
//! The factorizer is deliberately limited: it finds every root that is
//! reachable by rational-root search (divisor enumeration in the Gaussian
//! integers, driven by norms) together with the quadratic formula.  Roots
//! living in any larger extension of Q(i) are reported, never silently
//! dropped: [`factor_univariate`] returns `ExtensionRequired` carrying the
//! part it could not split.

use crate::gaussian::GaussianRational;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients in ascending order; no trailing zeros; `vec![]` is zero.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    c: Vec<GaussianRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(GaussianRational::is_zero) {
            coeffs.pop();
        }
        UniPoly { c: coeffs }
    }

    pub fn zero() -> Self {
        UniPoly::default()
    }

    pub fn one() -> Self {
        UniPoly::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        UniPoly::new(vec![c])
    }

    /// The monomial c * t^k.
    pub fn monomial(c: GaussianRational, k: usize) -> Self {
        let mut v = vec![GaussianRational::zero(); k];
        v.push(c);
        UniPoly::new(v)
    }

    pub fn var() -> Self {
        UniPoly::monomial(GaussianRational::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() { None } else { Some(self.c.len() - 1) }
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> GaussianRational {
        self.c.get(k).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn lc(&self) -> GaussianRational {
        self.c.last().cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn eval(&self, z: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.c.iter().rev() {
            acc = &acc * z + c;
        }
        acc
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        UniPoly::new(self.c.iter().map(|c| c * s).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return UniPoly::zero();
        }
        self.scale(&self.lc().inv())
    }

    pub fn derivative(&self) -> Self {
        if self.c.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * GaussianRational::from_integer(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = UniPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division; panics if `den` is zero.
    pub fn divrem(&self, den: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = den.degree().expect("division by zero polynomial");
        let lc_inv = den.lc().inv();
        let mut rem = self.clone();
        let mut quo = vec![GaussianRational::zero(); self.c.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let q = &rem.lc() * &lc_inv;
            let shift = rd - dd;
            quo[shift] = q.clone();
            // rem -= q * t^shift * den
            let mut new = rem.c;
            for (k, dc) in den.c.iter().enumerate() {
                let delta = &q * dc;
                new[k + shift] = &new[k + shift] - &delta;
            }
            rem = UniPoly::new(new);
        }
        (UniPoly::new(quo), rem)
    }

    /// Monic gcd by the Euclidean algorithm; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Square-free part p / gcd(p, p').
    pub fn square_free_part(&self) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0
    }
}

impl Add<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.c.len().max(rhs.c.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(&self.coeff(k) + &rhs.coeff(k));
        }
        UniPoly::new(v)
    }
}

impl Sub<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.c.len().max(rhs.c.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(&self.coeff(k) - &rhs.coeff(k));
        }
        UniPoly::new(v)
    }
}

impl Mul<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut v = vec![GaussianRational::zero(); self.c.len() + rhs.c.len() - 1];
        for (a, ca) in self.c.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in rhs.c.iter().enumerate() {
                v[a + b] = &v[a + b] + &(ca * cb);
            }
        }
        UniPoly::new(v)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.c.iter().map(|c| -c).collect())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c})*t^{k}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `p = unit * prod (t - root)^mult`, complete over Q(i).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFactorization {
    pub unit: GaussianRational,
    pub roots: Vec<(GaussianRational, u32)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FactorError {
    #[error("roots require an extension of Q(i); unfactored part: {unfactored:?}")]
    ExtensionRequired { unfactored: UniPoly },
}

/// Full linear factorization over Q(i), or `ExtensionRequired` naming the
/// part whose roots live in a larger field.
pub fn factor_univariate(p: &UniPoly) -> Result<LinearFactorization, FactorError> {
    assert!(!p.is_zero(), "cannot factor the zero polynomial");
    let (unit, roots, residue) = split_linear_roots(p);
    if residue.degree().unwrap_or(0) > 0 {
        return Err(FactorError::ExtensionRequired { unfactored: residue });
    }
    Ok(LinearFactorization { unit, roots })
}

/// Best-effort root splitting: returns `(unit, roots, residue)` with
/// `p = unit * prod (t - r)^m * residue` and `residue` monic, free of
/// Q(i)-rational roots and of Q(i)-solvable quadratic shape.
/// Roots are sorted canonically for deterministic downstream output.
pub fn split_linear_roots(p: &UniPoly) -> (GaussianRational, Vec<(GaussianRational, u32)>, UniPoly) {
    assert!(!p.is_zero(), "cannot split roots of the zero polynomial");
    let unit = p.lc();
    let mut rem = p.monic();
    let mut roots: Vec<(GaussianRational, u32)> = Vec::new();

    let record = |roots: &mut Vec<(GaussianRational, u32)>, r: GaussianRational| {
        for (seen, m) in roots.iter_mut() {
            if *seen == r {
                *m += 1;
                return;
            }
        }
        roots.push((r, 1));
    };

    loop {
        let deg = rem.degree().unwrap_or(0);
        if deg == 0 {
            break;
        }
        // Strip roots at the origin first so the constant term is nonzero.
        if rem.coeff(0).is_zero() {
            record(&mut roots, GaussianRational::zero());
            rem = UniPoly::new(rem.c[1..].to_vec());
            continue;
        }
        if deg == 1 {
            record(&mut roots, -rem.coeff(0));
            rem = UniPoly::one();
            break;
        }
        if deg == 2 {
            let b = rem.coeff(1);
            let c = rem.coeff(0);
            let disc = &(&b * &b) - &(&GaussianRational::from_integer(4) * &c);
            match disc.sqrt() {
                Some(s) => {
                    let half = GaussianRational::from_ratio(1, 2);
                    record(&mut roots, &(&(-&b) + &s) * &half);
                    record(&mut roots, &(&(-&b) - &s) * &half);
                    rem = UniPoly::one();
                }
                None => {}
            }
            break;
        }
        match find_rational_root(&rem) {
            Some(r) => {
                record(&mut roots, r.clone());
                let lin = UniPoly::new(vec![-&r, GaussianRational::one()]);
                rem = rem.divrem(&lin).0;
            }
            None => break,
        }
    }

    roots.sort_by(|(a, _), (b, _)| a.canonical_cmp(b));
    (unit, roots, rem)
}

/// Rational-root search over Q(i).  Scales to Gaussian-integer coefficients
/// and enumerates candidates r/s with norm(r) | norm(c_0), norm(s) | norm(c_n),
/// which is a necessary condition for roots in lowest terms.
fn find_rational_root(p: &UniPoly) -> Option<GaussianRational> {
    let scaled = clear_denominators(p);
    let c0 = scaled.first().expect("nonzero constant term required");
    let cn = scaled.last().expect("nonempty");
    let num_cands = gaussian_divisor_pool(&gauss_norm(c0));
    let den_cands = gaussian_divisor_pool(&gauss_norm(cn));
    // Guard against pathological coefficient norms; the search is allowed
    // to be expensive only at desk scale.
    if num_cands.len().saturating_mul(den_cands.len()) > 200_000 {
        return None;
    }
    let mut seen: HashSet<GaussianRational> = HashSet::new();
    let mut best: Option<GaussianRational> = None;
    for (na, nb) in &num_cands {
        for (da, db) in &den_cands {
            let den = gauss_from_ints(da, db);
            let cand = &gauss_from_ints(na, nb) / &den;
            if !seen.insert(cand.clone()) {
                continue;
            }
            if p.eval(&cand).is_zero() {
                // Keep the canonically smallest root for determinism.
                best = match best {
                    Some(b) if b.canonical_cmp(&cand).is_le() => Some(b),
                    _ => Some(cand),
                };
            }
        }
    }
    best
}

/// Multiplies by a common denominator so all parts are Gaussian integers.
fn clear_denominators(p: &UniPoly) -> Vec<(BigInt, BigInt)> {
    let mut lcm = BigInt::one();
    for c in p.coeffs() {
        lcm = num::integer::lcm(lcm.clone(), c.re().denom().clone());
        lcm = num::integer::lcm(lcm, c.im().denom().clone());
    }
    let lcm_r = BigRational::from_integer(lcm);
    p.coeffs()
        .iter()
        .map(|c| {
            let re = c.re() * &lcm_r;
            let im = c.im() * &lcm_r;
            debug_assert!(re.is_integer() && im.is_integer());
            (re.to_integer(), im.to_integer())
        })
        .collect()
}

fn gauss_norm((a, b): &(BigInt, BigInt)) -> BigInt {
    a * a + b * b
}

fn gauss_from_ints(a: &BigInt, b: &BigInt) -> GaussianRational {
    GaussianRational::new(
        BigRational::from_integer(a.clone()),
        BigRational::from_integer(b.clone()),
    )
}

/// All Gaussian integers whose norm divides `n` (candidates for divisors
/// of a Gaussian integer of norm `n`), with all four sign/swap variants.
fn gaussian_divisor_pool(n: &BigInt) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    for d in integer_divisors(n) {
        for (a, b) in two_square_representations(&d) {
            for (sa, sb) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                let cand = (&a * BigInt::from(sa), &b * BigInt::from(sb));
                if !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
    }
    out
}

/// Positive divisors by trial-division factorization.  Primes above the
/// trial bound are treated as prime wholesale, which is adequate for the
/// coefficient sizes this crate targets.
fn integer_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    assert!(!n.is_zero());
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let push = |primes: &mut Vec<(BigInt, u32)>, p: BigInt| {
        for (q, e) in primes.iter_mut() {
            if *q == p {
                *e += 1;
                return;
            }
        }
        primes.push((p, 1));
    };
    let mut d = BigInt::from(2);
    let bound = BigInt::from(1_000_000u64);
    while &(&d * &d) <= &n && d <= bound {
        while (&n % &d).is_zero() {
            n = &n / &d;
            push(&mut primes, d.clone());
        }
        d += 1;
    }
    if n > BigInt::one() {
        push(&mut primes, n);
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d0 in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d0 * &pk);
                pk = &pk * &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    divs
}

/// Solutions (a, b) with a^2 + b^2 = n, a >= 0, b >= 0.
fn two_square_representations(n: &BigInt) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    let mut a = BigInt::zero();
    loop {
        let a2 = &a * &a;
        if &a2 > n {
            break;
        }
        let rest = n - &a2;
        let b = rest.sqrt();
        if &(&b * &b) == &rest {
            out.push((a.clone(), b));
        }
        a += 1;
    }
    out
}
