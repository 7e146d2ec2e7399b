//! Sparse bivariate polynomials over Q(i).
//!
//! Terms live in a BTreeMap keyed by monomial under the graded-lexicographic
//! order with x below y (total degree first, then y-exponent), so the last
//! map entry is always the leading term and iteration order is canonical.
//! Zero coefficients are never stored; degree caches are rebuilt on every
//! construction and are trusted everywhere else.

use crate::gaussian::GaussianRational;
use crate::unipoly::UniPoly;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Variable selector for orientation-generic operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Y,
            Var::Y => Var::X,
        }
    }
}

/// x^dx * y^dy ordered graded-lexicographically with x < y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monomial {
    pub dx: u32,
    pub dy: u32,
}

impl Monomial {
    pub fn total(&self) -> u32 {
        self.dx + self.dy
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.dx <= other.dx && self.dy <= other.dy
    }

    pub fn exponent(&self, var: Var) -> u32 {
        match var {
            Var::X => self.dx,
            Var::Y => self.dy,
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.total(), self.dy).cmp(&(other.total(), other.dy))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct BivarPoly {
    terms: BTreeMap<Monomial, GaussianRational>,
    // (total, deg_x, deg_y); None for the zero polynomial.
    degs: Option<(u32, u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("not divisible; remainder {remainder}")]
    NotDivisible { remainder: BivarPoly },
}

impl BivarPoly {
    pub fn from_map(mut terms: BTreeMap<Monomial, GaussianRational>) -> Self {
        terms.retain(|_, c| !c.is_zero());
        let degs = Self::compute_degs(&terms);
        BivarPoly { terms, degs }
    }

    fn compute_degs(terms: &BTreeMap<Monomial, GaussianRational>) -> Option<(u32, u32, u32)> {
        if terms.is_empty() {
            return None;
        }
        let mut total = 0;
        let mut dx = 0;
        let mut dy = 0;
        for m in terms.keys() {
            total = total.max(m.total());
            dx = dx.max(m.dx);
            dy = dy.max(m.dy);
        }
        Some((total, dx, dy))
    }

    pub fn zero() -> Self {
        BivarPoly::default()
    }

    pub fn one() -> Self {
        BivarPoly::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        BivarPoly::monomial(c, 0, 0)
    }

    pub fn from_int(n: i64) -> Self {
        BivarPoly::constant(GaussianRational::from_integer(n))
    }

    pub fn monomial(c: GaussianRational, dx: u32, dy: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial { dx, dy }, c);
        }
        BivarPoly::from_map(terms)
    }

    pub fn x() -> Self {
        BivarPoly::monomial(GaussianRational::one(), 1, 0)
    }

    pub fn y() -> Self {
        BivarPoly::monomial(GaussianRational::one(), 0, 1)
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::X => Self::x(),
            Var::Y => Self::y(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.total_degree().unwrap_or(0) == 0
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, dx: u32, dy: u32) -> GaussianRational {
        self.terms
            .get(&Monomial { dx, dy })
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.degs.map(|(t, _, _)| t)
    }

    pub fn degree(&self, var: Var) -> Option<u32> {
        self.degs.map(|(_, dx, dy)| match var {
            Var::X => dx,
            Var::Y => dy,
        })
    }

    /// Leading term under graded-lex; None for zero.
    pub fn leading(&self) -> Option<(Monomial, GaussianRational)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c.clone()))
    }

    pub fn leading_coeff(&self) -> GaussianRational {
        self.leading().map(|(_, c)| c).unwrap_or_else(GaussianRational::zero)
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        if s.is_zero() {
            return BivarPoly::zero();
        }
        let terms = self.terms.iter().map(|(m, c)| (*m, c * s)).collect();
        BivarPoly::from_map(terms)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = BivarPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplies by x^a * y^b.
    pub fn mul_monomial(&self, a: u32, b: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (Monomial { dx: m.dx + a, dy: m.dy + b }, c.clone()))
            .collect();
        BivarPoly::from_map(terms)
    }

    pub fn partial(&self, var: Var) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let nm = match var {
                Var::X => Monomial { dx: m.dx - 1, dy: m.dy },
                Var::Y => Monomial { dx: m.dx, dy: m.dy - 1 },
            };
            terms.insert(nm, c * GaussianRational::from_integer(e as i64));
        }
        BivarPoly::from_map(terms)
    }

    pub fn conj(&self) -> Self {
        BivarPoly::from_map(self.terms.iter().map(|(m, c)| (*m, c.conj())).collect())
    }

    pub fn eval(&self, x: &GaussianRational, y: &GaussianRational) -> GaussianRational {
        // Horner in y over Horner-in-x coefficient evaluations.
        let coeffs = self.coefficients_wrt(Var::Y);
        let mut acc = GaussianRational::zero();
        for c in coeffs.iter().rev() {
            let mut cx = GaussianRational::zero();
            for cc in c.coefficients_wrt(Var::X).iter().rev() {
                cx = &cx * x + &cc.coeff(0, 0);
            }
            acc = &acc * y + &cx;
        }
        acc
    }

    /// Coefficient list with respect to `var`: entry k is the polynomial in
    /// the other variable multiplying var^k.  Always has length deg+1
    /// (length 1 with a zero entry for the zero polynomial).
    pub fn coefficients_wrt(&self, var: Var) -> Vec<BivarPoly> {
        let deg = self.degree(var).unwrap_or(0) as usize;
        let mut out = vec![BTreeMap::new(); deg + 1];
        for (m, c) in &self.terms {
            let k = m.exponent(var) as usize;
            let rest = match var {
                Var::X => Monomial { dx: 0, dy: m.dy },
                Var::Y => Monomial { dx: m.dx, dy: 0 },
            };
            out[k].insert(rest, c.clone());
        }
        out.into_iter().map(BivarPoly::from_map).collect()
    }

    pub fn from_coefficients_wrt(var: Var, coeffs: &[BivarPoly]) -> Self {
        let mut terms = BTreeMap::new();
        for (k, p) in coeffs.iter().enumerate() {
            for (m, c) in &p.terms {
                let nm = match var {
                    Var::X => Monomial { dx: m.dx + k as u32, dy: m.dy },
                    Var::Y => Monomial { dx: m.dx, dy: m.dy + k as u32 },
                };
                let entry = terms.entry(nm).or_insert_with(GaussianRational::zero);
                *entry = &*entry + c;
            }
        }
        BivarPoly::from_map(terms)
    }

    /// Converts to a univariate polynomial when the other variable is absent.
    pub fn to_unipoly(&self, var: Var) -> Option<UniPoly> {
        if self.degree(var.other()).unwrap_or(0) > 0 {
            return None;
        }
        let deg = self.degree(var).unwrap_or(0) as usize;
        let mut v = vec![GaussianRational::zero(); deg + 1];
        for (m, c) in &self.terms {
            v[m.exponent(var) as usize] = c.clone();
        }
        Some(UniPoly::new(v))
    }

    pub fn from_unipoly(var: Var, p: &UniPoly) -> Self {
        let mut terms = BTreeMap::new();
        for (k, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = match var {
                Var::X => Monomial { dx: k as u32, dy: 0 },
                Var::Y => Monomial { dx: 0, dy: k as u32 },
            };
            terms.insert(m, c.clone());
        }
        BivarPoly::from_map(terms)
    }

    /// Substitutes `sub` for `var`.
    pub fn compose_wrt(&self, var: Var, sub: &BivarPoly) -> Self {
        let coeffs = self.coefficients_wrt(var);
        let mut acc = BivarPoly::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * sub) + c;
        }
        acc
    }

    /// Divides by the leading coefficient, making the graded-lex leading
    /// coefficient exactly 1.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => BivarPoly::zero(),
            Some((_, c)) => self.scale(&c.inv()),
        }
    }

    /// Scales into the canonical integer-normalized form: all coefficient
    /// parts integral with overall content 1, and the leading coefficient
    /// rotated by a unit of Z[i] to be "positive": real and positive when
    /// possible, otherwise in the upper-right half-plane.
    pub fn canonical_scaled(&self) -> Self {
        if self.is_zero() {
            return BivarPoly::zero();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = num::integer::lcm(lcm.clone(), c.re().denom().clone());
            lcm = num::integer::lcm(lcm, c.im().denom().clone());
        }
        let mut content = BigInt::zero();
        let lcm_r = BigRational::from_integer(lcm.clone());
        for c in self.terms.values() {
            content = num::integer::gcd(content.clone(), (c.re() * &lcm_r).to_integer());
            content = num::integer::gcd(content, (c.im() * &lcm_r).to_integer());
        }
        debug_assert!(!content.is_zero());
        let factor = GaussianRational::from_real(BigRational::new(lcm, content));
        let scaled = self.scale(&factor);
        let lead = scaled.leading_coeff();
        let units = [
            GaussianRational::one(),
            GaussianRational::i(),
            GaussianRational::from_integer(-1),
            -GaussianRational::i(),
        ];
        // Rotate the leading coefficient into the "positive" position:
        // real positive when some rotation achieves it, otherwise positive
        // real part with positive imaginary part.
        let unit = units
            .into_iter()
            .max_by_key(|u| {
                let v = &lead * u;
                (v.re().is_positive(), v.im().is_zero(), v.im().is_positive())
            })
            .expect("nonempty unit list");
        scaled.scale(&unit)
    }

    /// Multivariate division by a single divisor under graded-lex.
    /// Succeeds exactly when the remainder vanishes; the returned error
    /// carries the full division-algorithm remainder otherwise.
    pub fn divide_exact(&self, den: &BivarPoly) -> Result<BivarPoly, PolyError> {
        let (lead_m, lead_c) = den.leading().expect("division by zero polynomial");
        let lead_inv = lead_c.inv();
        let mut rem = self.clone();
        let mut quo: BTreeMap<Monomial, GaussianRational> = BTreeMap::new();
        let mut residue: BTreeMap<Monomial, GaussianRational> = BTreeMap::new();
        while let Some((m, c)) = rem.leading() {
            if lead_m.divides(&m) {
                let qm = Monomial { dx: m.dx - lead_m.dx, dy: m.dy - lead_m.dy };
                let qc = &c * &lead_inv;
                quo.insert(qm, qc.clone());
                let t = BivarPoly::monomial(qc, qm.dx, qm.dy);
                rem = &rem - &(&t * den);
            } else {
                // Move the non-divisible leading term aside and continue.
                residue.insert(m, c);
                rem.terms.remove(&m);
                rem.degs = Self::compute_degs(&rem.terms);
            }
        }
        if residue.is_empty() {
            Ok(BivarPoly::from_map(quo))
        } else {
            Err(PolyError::NotDivisible { remainder: BivarPoly::from_map(residue) })
        }
    }

    pub fn divides(&self, other: &BivarPoly) -> bool {
        other.divide_exact(self).is_ok()
    }

    /// Pseudo-remainder with respect to `var`:
    /// lc^(da-db+1) * self = q * den + r with deg_var r < deg_var den.
    pub fn pseudo_rem(&self, den: &BivarPoly, var: Var) -> BivarPoly {
        let db = den.degree(var).expect("pseudo-division by zero") as i64;
        let den_coeffs = den.coefficients_wrt(var);
        let lc = den_coeffs.last().unwrap().clone();
        let mut rem = self.clone();
        loop {
            let da = match rem.degree(var) {
                None => return rem,
                Some(d) => d as i64,
            };
            if da < db {
                return rem;
            }
            let rem_coeffs = rem.coefficients_wrt(var);
            let top = rem_coeffs.last().unwrap().clone();
            // rem := lc * rem - top * var^(da-db) * den
            let shift = (da - db) as u32;
            let shifted = match var {
                Var::X => den.mul_monomial(shift, 0),
                Var::Y => den.mul_monomial(0, shift),
            };
            rem = &(&rem * &lc) - &(&shifted * &top);
            debug_assert!(rem.degree(var).map_or(true, |d| (d as i64) < da));
        }
    }

    /// Content with respect to `var`: gcd of the coefficients, a polynomial
    /// in the other variable (monic).
    pub fn content_wrt(&self, var: Var) -> BivarPoly {
        let other = var.other();
        let mut acc = UniPoly::zero();
        for c in self.coefficients_wrt(var) {
            if c.is_zero() {
                continue;
            }
            let u = c.to_unipoly(other).expect("coefficient is univariate");
            acc = acc.gcd(&u);
        }
        BivarPoly::from_unipoly(other, &acc)
    }

    pub fn primitive_part_wrt(&self, var: Var) -> BivarPoly {
        if self.is_zero() {
            return BivarPoly::zero();
        }
        let content = self.content_wrt(var);
        self.divide_exact(&content).expect("content divides")
    }
}

impl Add<&BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            let entry = terms.entry(*m).or_insert_with(GaussianRational::zero);
            *entry = &*entry + c;
        }
        BivarPoly::from_map(terms)
    }
}

impl Sub<&BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            let entry = terms.entry(*m).or_insert_with(GaussianRational::zero);
            *entry = &*entry - c;
        }
        BivarPoly::from_map(terms)
    }
}

impl Mul<&BivarPoly> for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut terms: BTreeMap<Monomial, GaussianRational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = Monomial { dx: ma.dx + mb.dx, dy: ma.dy + mb.dy };
                let entry = terms.entry(m).or_insert_with(GaussianRational::zero);
                *entry = &*entry + &(ca * cb);
            }
        }
        BivarPoly::from_map(terms)
    }
}

impl Mul<&GaussianRational> for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &GaussianRational) -> BivarPoly {
        self.scale(rhs)
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly::from_map(self.terms.iter().map(|(m, c)| (*m, -c)).collect())
    }
}

macro_rules! forward_poly_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<BivarPoly> for BivarPoly {
            type Output = BivarPoly;
            fn $method(self, rhs: BivarPoly) -> BivarPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BivarPoly> for BivarPoly {
            type Output = BivarPoly;
            fn $method(self, rhs: &BivarPoly) -> BivarPoly {
                (&self).$method(rhs)
            }
        }
        impl $trait<BivarPoly> for &BivarPoly {
            type Output = BivarPoly;
            fn $method(self, rhs: BivarPoly) -> BivarPoly {
                self.$method(&rhs)
            }
        }
    };
}
forward_poly_binop!(Add, add);
forward_poly_binop!(Sub, sub);
forward_poly_binop!(Mul, mul);

impl Neg for BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        -&self
    }
}

/// Greatest common divisor, normalized monic under graded-lex.
///
/// Splits off the x-content of both arguments (univariate gcd), then runs a
/// primitive-remainder sequence on the y-primitive parts.
pub fn gcd_poly(a: &BivarPoly, b: &BivarPoly) -> BivarPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.degree(Var::Y) == Some(0) && b.degree(Var::Y) == Some(0) {
        let ua = a.to_unipoly(Var::X).unwrap();
        let ub = b.to_unipoly(Var::X).unwrap();
        return BivarPoly::from_unipoly(Var::X, &ua.gcd(&ub));
    }
    let ca = a.content_wrt(Var::Y);
    let cb = b.content_wrt(Var::Y);
    let content_gcd = gcd_poly(&ca, &cb);
    let pa = a.divide_exact(&ca).expect("content divides");
    let pb = b.divide_exact(&cb).expect("content divides");
    let pp_gcd = primitive_gcd_y(pa, pb);
    let g = (&content_gcd * &pp_gcd).monic();
    debug_assert!(g.divides(a) && g.divides(b));
    g
}

fn primitive_gcd_y(mut f: BivarPoly, mut g: BivarPoly) -> BivarPoly {
    if f.degree(Var::Y) < g.degree(Var::Y) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        if g.is_zero() {
            return f.primitive_part_wrt(Var::Y);
        }
        if g.degree(Var::Y) == Some(0) {
            // y-primitive inputs with a y-free common divisor: trivial gcd.
            return BivarPoly::one();
        }
        let r = f.pseudo_rem(&g, Var::Y);
        f = g;
        g = if r.is_zero() { BivarPoly::zero() } else { r.primitive_part_wrt(Var::Y) };
    }
}

/// Yun square-free decomposition with respect to y, ignoring x-content and
/// scalar units: returns pairs `(factor, multiplicity)` with each factor
/// monic, square-free, of positive y-degree, and pairwise coprime, so that
/// the product of factor^multiplicity equals the y-primitive part of `f`
/// up to a scalar.
pub fn square_free_decomposition_y(f: &BivarPoly) -> Vec<(BivarPoly, u32)> {
    assert!(f.degree(Var::Y).unwrap_or(0) >= 1, "needs positive y-degree");
    let f = f.primitive_part_wrt(Var::Y);
    let df = f.partial(Var::Y);
    let g = gcd_poly(&f, &df);
    if g.is_constant() {
        return vec![(f.monic(), 1)];
    }
    let mut out = Vec::new();
    let mut c = f.divide_exact(&g).expect("gcd divides");
    let mut d = &df.divide_exact(&g).expect("gcd divides f'") - &c.partial(Var::Y);
    let mut i = 1u32;
    while c.degree(Var::Y).unwrap_or(0) > 0 {
        let p = gcd_poly(&c, &d);
        if p.degree(Var::Y).unwrap_or(0) > 0 {
            out.push((p.monic(), i));
        }
        c = c.divide_exact(&p).expect("factor divides");
        d = &d.divide_exact(&p).expect("factor divides d") - &c.partial(Var::Y);
        i += 1;
    }
    out
}

/// Resultant of `a` and `b` with respect to `var`, via fraction-free
/// elimination on the Sylvester matrix.  The result does not involve `var`.
pub fn resultant(a: &BivarPoly, b: &BivarPoly, var: Var) -> BivarPoly {
    let da = a.degree(var).expect("resultant of zero polynomial") as usize;
    let db = b.degree(var).expect("resultant of zero polynomial") as usize;
    if da == 0 && db == 0 {
        return BivarPoly::one();
    }
    let ca = a.coefficients_wrt(var);
    let cb = b.coefficients_wrt(var);
    let n = da + db;
    let mut mat = vec![vec![BivarPoly::zero(); n]; n];
    for row in 0..db {
        for (k, c) in ca.iter().enumerate() {
            mat[row][row + (da - k)] = c.clone();
        }
    }
    for row in 0..da {
        for (k, c) in cb.iter().enumerate() {
            mat[db + row][row + (db - k)] = c.clone();
        }
    }
    determinant_bareiss(mat)
}

/// Exact determinant over the polynomial ring (Bareiss one-step scheme).
pub fn determinant_bareiss(mut m: Vec<Vec<BivarPoly>>) -> BivarPoly {
    let n = m.len();
    if n == 0 {
        return BivarPoly::one();
    }
    let mut sign = false;
    let mut prev = BivarPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return BivarPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = t.divide_exact(&prev).expect("Bareiss division is exact");
            }
        }
        for row in m.iter_mut().take(n).skip(k + 1) {
            row[k] = BivarPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign { -det } else { det }
}

// ---------------------------------------------------------------------------
// Canonical printing.  parse(print(p)) == p for every polynomial; arrays in
// reports are sorted by (total degree, this text).

fn monomial_text(m: &Monomial) -> String {
    let mut parts = Vec::new();
    if m.dx == 1 {
        parts.push("x".to_string());
    } else if m.dx > 1 {
        parts.push(format!("x^{}", m.dx));
    }
    if m.dy == 1 {
        parts.push("y".to_string());
    } else if m.dy > 1 {
        parts.push(format!("y^{}", m.dy));
    }
    parts.join("*")
}

/// (is_negative, magnitude text) for a term with coefficient `c` over the
/// monomial `m`; mixed complex coefficients are parenthesized and carry no
/// external sign.
fn term_text(c: &GaussianRational, m: &Monomial) -> (bool, String) {
    term_text_over(c, &monomial_text(m))
}

/// Same sign/magnitude split for an arbitrary monomial rendering (used by
/// the series printer, whose exponents are not plain nonnegative integers).
pub(crate) fn term_text_over(c: &GaussianRational, mono: &str) -> (bool, String) {
    let (re, im) = (c.re(), c.im());
    if !re.is_zero() && !im.is_zero() {
        let body = if mono.is_empty() { format!("({c})") } else { format!("({c})*{mono}") };
        return (false, body);
    }
    let neg = re.is_negative() || im.is_negative();
    let abs = if neg { -c } else { c.clone() };
    let body = if mono.is_empty() {
        format!("{abs}")
    } else if abs.is_one() {
        mono.to_string()
    } else {
        format!("{abs}*{mono}")
    };
    (neg, body)
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, body) = term_text(c, m);
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
        Ok(())
    }
}

impl fmt::Debug for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text_terms: &[(i64, u32, u32)]) -> BivarPoly {
        let mut acc = BivarPoly::zero();
        for &(c, dx, dy) in text_terms {
            acc = &acc + &BivarPoly::monomial(GaussianRational::from_integer(c), dx, dy);
        }
        acc
    }

    #[test]
    fn monomial_order_is_graded_lex() {
        let y2 = Monomial { dx: 0, dy: 2 };
        let xy = Monomial { dx: 1, dy: 1 };
        let x2 = Monomial { dx: 2, dy: 0 };
        let x3 = Monomial { dx: 3, dy: 0 };
        assert!(y2 > xy && xy > x2);
        assert!(x3 > y2);
    }

    #[test]
    fn degree_caches_match_recomputation() {
        let f = p(&[(1, 2, 3), (-4, 0, 1), (7, 5, 0)]);
        assert_eq!(f.total_degree(), Some(5));
        assert_eq!(f.degree(Var::X), Some(5));
        assert_eq!(f.degree(Var::Y), Some(3));
        let g = &f - &f;
        assert_eq!(g.total_degree(), None);
        assert!(g.is_zero());
    }

    #[test]
    fn product_of_eq14_curves_redivides() {
        // (y^3 - y - x) * (x*y^2 - x - 1), then divide both ways.
        let f1 = p(&[(1, 0, 3), (-1, 0, 1), (-1, 1, 0)]);
        let f2 = p(&[(1, 1, 2), (-1, 1, 0), (-1, 0, 0)]);
        let prod = &f1 * &f2;
        assert_eq!(prod.divide_exact(&f1).unwrap(), f2);
        assert_eq!(prod.divide_exact(&f2).unwrap(), f1);
    }

    #[test]
    fn division_failure_reports_remainder() {
        let num = p(&[(1, 0, 2), (1, 0, 0)]); // y^2 + 1
        let den = p(&[(1, 1, 0)]); // x
        let err = num.divide_exact(&den).unwrap_err();
        match err {
            PolyError::NotDivisible { remainder } => assert_eq!(remainder, num),
        }
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let g = p(&[(1, 0, 1), (-1, 2, 0)]); // y - x^2
        let a = &g * &p(&[(1, 1, 1), (3, 0, 0)]);
        let b = &g * &p(&[(1, 0, 2), (1, 1, 0), (1, 0, 0)]);
        let got = gcd_poly(&a, &b);
        assert_eq!(got, g.monic());
    }

    #[test]
    fn gcd_of_coprime_is_constant() {
        let a = p(&[(1, 0, 3), (-1, 0, 1), (-1, 1, 0)]);
        let b = p(&[(1, 1, 2), (-1, 1, 0), (-1, 0, 0)]);
        assert!(gcd_poly(&a, &b).is_constant());
    }

    #[test]
    fn gcd_with_x_content() {
        let a = p(&[(1, 3, 1)]); // x^3 y
        let b = p(&[(1, 2, 0), (1, 3, 0)]); // x^2 (1 + x)
        assert_eq!(gcd_poly(&a, &b), p(&[(1, 2, 0)]));
    }

    #[test]
    fn mixed_partials_commute() {
        let f = p(&[(3, 2, 2), (-1, 1, 4), (5, 0, 1), (2, 3, 0)]);
        assert_eq!(f.partial(Var::X).partial(Var::Y), f.partial(Var::Y).partial(Var::X));
    }

    #[test]
    fn square_free_decomposition_recovers_multiplicities() {
        let u = p(&[(1, 0, 1), (-1, 1, 0)]); // y - x
        let v = p(&[(1, 0, 1), (1, 0, 0)]); // y + 1
        let f = &u.pow(3) * &v;
        let dec = square_free_decomposition_y(&f);
        assert_eq!(dec.len(), 2);
        assert!(dec.contains(&(v.monic(), 1)));
        assert!(dec.contains(&(u.monic(), 3)));
    }

    #[test]
    fn resultant_detects_common_roots() {
        let a = p(&[(1, 0, 1), (-1, 1, 0)]); // y - x
        let b = p(&[(1, 0, 2), (-1, 2, 0)]); // y^2 - x^2
        let r = resultant(&a, &b, Var::Y);
        assert!(r.is_zero()); // share root y = x
        let c = p(&[(1, 0, 1), (1, 1, 0), (1, 0, 0)]); // y + x + 1
        let r2 = resultant(&a, &c, Var::Y);
        assert!(!r2.is_zero());
    }

    #[test]
    fn canonical_text_matches_expected_forms() {
        let f1 = p(&[(1, 0, 3), (-1, 0, 1), (-1, 1, 0)]);
        assert_eq!(f1.to_string(), "y^3 - y - x");
        let f2 = p(&[(1, 1, 2), (-1, 1, 0), (-1, 0, 0)]);
        assert_eq!(f2.to_string(), "x*y^2 - x - 1");
        let half_x = BivarPoly::monomial(GaussianRational::from_ratio(1, 2), 1, 0);
        assert_eq!(half_x.to_string(), "1/2*x");
        let i_term = BivarPoly::monomial(GaussianRational::i(), 1, 1);
        assert_eq!(i_term.to_string(), "i*x*y");
        let mixed = BivarPoly::monomial(
            GaussianRational::new(
                BigRational::from_integer(BigInt::from(1)),
                BigRational::from_integer(BigInt::from(-2)),
            ),
            2,
            0,
        );
        assert_eq!(mixed.to_string(), "(1-2*i)*x^2");
        assert_eq!(BivarPoly::zero().to_string(), "0");
    }

    #[test]
    fn canonical_scaling_produces_integer_content_one() {
        let f = p(&[(2, 0, 1), (-4, 1, 0)]).scale(&GaussianRational::from_ratio(1, 6));
        let canon = f.canonical_scaled();
        assert_eq!(canon, p(&[(1, 0, 1), (-2, 1, 0)]));
        // Imaginary leading coefficient gets rotated to a positive real one.
        let g = p(&[(1, 0, 1)]).scale(&GaussianRational::i());
        assert_eq!(g.canonical_scaled(), p(&[(1, 0, 1)]));
    }

    #[test]
    fn compose_substitutes_polynomials() {
        let f = p(&[(1, 0, 2), (1, 1, 0)]); // y^2 + x
        let s = p(&[(1, 1, 0), (1, 0, 0)]); // x + 1
        let g = f.compose_wrt(Var::Y, &s);
        assert_eq!(g, p(&[(1, 2, 0), (3, 1, 0), (1, 0, 0)]));
    }

    #[test]
    fn pseudo_remainder_reduces_degree() {
        let a = p(&[(1, 0, 3), (1, 1, 0)]);
        let b = p(&[(1, 1, 1), (1, 0, 0)]); // x*y + 1
        let r = a.pseudo_rem(&b, Var::Y);
        assert!(r.degree(Var::Y) < b.degree(Var::Y));
    }
}
