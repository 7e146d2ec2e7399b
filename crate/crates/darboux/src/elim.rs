//! Exact elimination for small polynomial systems in unknown parameters.
//!
//! The coefficient-matching step of the curve search produces systems of
//! polynomial equations in a handful of unknowns over ℚ(i): mostly
//! linear, with occasional bilinear products where a cofactor
//! coefficient multiplies an undetermined curve coefficient.  This
//! module solves such systems by branching: substitute variables that
//! occur linearly with constant coefficient, factor univariate
//! equations over ℚ(i), split on parametric pivots, and fall back to
//! pseudo-resultants.  Every candidate point is re-checked against the
//! original equations before it is reported, so the output is sound;
//! branches that would need an algebraic extension or exceed the step
//! budget are pruned and reported in the notices, so incompleteness is
//! visible rather than silent.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use thiserror::Error;

use crate::gaussian::GaussianRational;
use crate::linalg::rref_in_place;
use crate::unipoly::{split_linear_roots, UniPoly};

/// A polynomial in parameters t₀ … t_{arity−1} with ℚ(i) coefficients,
/// stored sparsely by exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamPoly {
    arity: usize,
    terms: BTreeMap<Vec<u32>, GaussianRational>,
}

impl ParamPoly {
    pub fn zero(arity: usize) -> Self {
        ParamPoly { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: GaussianRational) -> Self {
        let mut p = ParamPoly::zero(arity);
        if !c.is_zero() {
            p.terms.insert(vec![0; arity], c);
        }
        p
    }

    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity, "variable index out of range");
        let mut e = vec![0; arity];
        e[i] = 1;
        let mut p = ParamPoly::zero(arity);
        p.terms.insert(e, GaussianRational::one());
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.is_zero() {
            return Some(GaussianRational::zero());
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            if e.iter().all(|&k| k == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn uses(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn insert(&mut self, e: Vec<u32>, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = &*o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        if s.is_zero() {
            return ParamPoly::zero(self.arity);
        }
        ParamPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    /// Coefficients of this polynomial viewed as univariate in tᵢ,
    /// ascending; the returned polynomials no longer involve tᵢ.
    pub fn coeffs_in(&self, i: usize) -> Vec<ParamPoly> {
        let d = self.degree_in(i) as usize;
        let mut out = vec![ParamPoly::zero(self.arity); d + 1];
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            let mut e2 = e.clone();
            e2[i] = 0;
            out[k].insert(e2, c.clone());
        }
        out
    }

    /// True when every term carries a positive power of tᵢ.
    pub fn divisible_by(&self, i: usize) -> bool {
        !self.is_zero() && self.terms.keys().all(|e| e[i] > 0)
    }

    /// Divides out one power of tᵢ from every term.
    pub fn div_var(&self, i: usize) -> Self {
        debug_assert!(self.divisible_by(i));
        ParamPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[i] -= 1;
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Replaces tᵢ by `value` (which must not involve tᵢ itself).
    pub fn subst(&self, i: usize, value: &ParamPoly) -> Self {
        assert!(!value.uses(i), "substitution must eliminate the variable");
        let mut acc = ParamPoly::zero(self.arity);
        for c in self.coeffs_in(i).into_iter().rev() {
            acc = &(&acc * value) + &c;
        }
        acc
    }

    pub fn eval(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.arity, "point arity mismatch");
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term = &term * &point[i];
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Clears denominators and the integer content so that equivalent
    /// equations compare equal; the sign is fixed by rotating the
    /// trailing (lexicographically largest) coefficient to the right
    /// half-plane.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.re().denom());
            den = den.lcm(c.im().denom());
        }
        let mut content = BigInt::zero();
        for c in self.terms.values() {
            let re = c.re().numer() * (&den / c.re().denom());
            let im = c.im().numer() * (&den / c.im().denom());
            content = content.gcd(&re).gcd(&im);
        }
        if content.is_zero() {
            content = BigInt::one();
        }
        let s = GaussianRational::from_real(BigRational::new(den, content));
        let out = self.scale(&s);
        let lead = out.terms.iter().next_back().map(|(_, c)| c.clone()).unwrap();
        if lead.re().is_negative() || (lead.re().is_zero() && lead.im().is_negative()) {
            out.scale(&GaussianRational::from_integer(-1))
        } else {
            out
        }
    }

    /// Deterministic ordering: by term count, then term-by-term.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        let by_len = self.terms.len().cmp(&other.terms.len());
        if by_len != Ordering::Equal {
            return by_len;
        }
        for ((ea, ca), (eb, cb)) in self.terms.iter().zip(&other.terms) {
            let by_exp = ea.cmp(eb);
            if by_exp != Ordering::Equal {
                return by_exp;
            }
            let by_coeff = ca.canonical_cmp(cb);
            if by_coeff != Ordering::Equal {
                return by_coeff;
            }
        }
        Ordering::Equal
    }

    /// The equation as a univariate polynomial in tᵢ, provided no other
    /// variable occurs.
    fn to_unipoly(&self, i: usize) -> Option<UniPoly> {
        let mut coeffs = vec![GaussianRational::zero(); self.degree_in(i) as usize + 1];
        for (e, c) in &self.terms {
            for (j, &k) in e.iter().enumerate() {
                if j != i && k > 0 {
                    return None;
                }
            }
            coeffs[e[i] as usize] = c.clone();
        }
        Some(UniPoly::new(coeffs))
    }
}

impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        self + &(-rhs)
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        self.scale(&GaussianRational::from_integer(-1))
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = ParamPoly::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(e, ca * cb);
            }
        }
        out
    }
}

impl std::fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let mut piece = format!("({c})");
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => piece.push_str(&format!("*t{i}")),
                    _ => piece.push_str(&format!("*t{i}^{k}")),
                }
            }
            parts.push(piece);
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Pseudo-remainder of `c` by `e` with respect to tᵥ: repeatedly scales
/// by e's leading tᵥ-coefficient and subtracts a multiple of `e` until
/// the tᵥ-degree drops below e's.  Zeros of the system are preserved
/// away from the vanishing locus of that leading coefficient; the
/// caller covers that locus in a separate branch.
pub fn prem(c: &ParamPoly, e: &ParamPoly, v: usize) -> ParamPoly {
    let de = e.degree_in(v);
    assert!(de > 0, "divisor must involve the variable");
    let lead_e = e.coeffs_in(v).pop().unwrap();
    let mut r = c.clone();
    while !r.is_zero() && r.degree_in(v) >= de {
        let dr = r.degree_in(v);
        let lead_r = r.coeffs_in(v).pop().unwrap();
        let mut shift = ParamPoly::constant(c.arity, GaussianRational::one());
        let t = ParamPoly::var(c.arity, v);
        for _ in 0..dr - de {
            shift = &shift * &t;
        }
        r = &(&r * &lead_e) - &(&(&lead_r * &shift) * e);
        debug_assert!(r.is_zero() || r.degree_in(v) < dr);
    }
    r
}

/// Why part of the solution set could not be enumerated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveNotice {
    #[error("a branch root for t{var} lies outside Q(i); that branch was pruned")]
    ExtensionRequired { var: usize },
    #[error("elimination degenerated in t{var}; that branch was sampled, not solved")]
    Degenerate { var: usize },
    #[error("step budget exhausted; remaining branches were pruned")]
    BudgetExhausted,
}

/// A positive-dimensional piece of the solution set.  `free` lists the
/// parameters that remained unconstrained; `representatives` are the
/// verified sample points obtained by setting one free parameter to 1
/// and the others to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub free: Vec<usize>,
    pub representatives: Vec<Vec<GaussianRational>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveOutcome {
    pub points: Vec<Vec<GaussianRational>>,
    pub families: Vec<Family>,
    pub notices: Vec<SolveNotice>,
}

struct Branch {
    eqs: Vec<ParamPoly>,
    /// Solved variables, as expressions in still-undetermined ones.
    assign: Vec<Option<ParamPoly>>,
    /// Variables eliminated through a parametric pivot A·tᵥ + B = 0,
    /// kept as (equation, v) and resolved numerically at the end, in
    /// reverse order.
    deferred: Vec<(ParamPoly, usize)>,
}

impl Branch {
    fn child(&self) -> Branch {
        Branch {
            eqs: self.eqs.clone(),
            assign: self.assign.clone(),
            deferred: self.deferred.clone(),
        }
    }

    fn is_undetermined(&self, v: usize) -> bool {
        self.assign[v].is_none() && self.deferred.iter().all(|&(_, w)| w != v)
    }

    fn substitute(&mut self, v: usize, value: &ParamPoly) {
        self.assign[v] = Some(value.clone());
        for eq in &mut self.eqs {
            if eq.uses(v) {
                *eq = eq.subst(v, value);
            }
        }
        for slot in self.assign.iter_mut().flatten() {
            if slot.uses(v) {
                *slot = slot.subst(v, value);
            }
        }
        for (eq, _) in &mut self.deferred {
            if eq.uses(v) {
                *eq = eq.subst(v, value);
            }
        }
    }

    /// Normalizes and deduplicates; false when a nonzero constant
    /// equation makes the branch inconsistent.
    fn tidy(&mut self) -> bool {
        self.eqs = self
            .eqs
            .iter()
            .map(ParamPoly::normalized)
            .filter(|e| !e.is_zero())
            .collect();
        self.eqs.sort_by(ParamPoly::cmp_canonical);
        self.eqs.dedup();
        !self.eqs.iter().any(|e| e.as_constant().is_some_and(|c| !c.is_zero()))
    }
}

/// Solves `eqs = 0` over ℚ(i), reporting isolated points, families with
/// representatives, and notices for everything pruned.
pub fn solve_system(arity: usize, eqs: &[ParamPoly], budget: usize) -> SolveOutcome {
    for e in eqs {
        assert_eq!(e.arity(), arity, "arity mismatch");
    }
    let original: Vec<ParamPoly> = eqs.to_vec();
    let mut out = SolveOutcome::default();
    let mut steps = budget;
    let mut stack = vec![Branch {
        eqs: original.clone(),
        assign: vec![None; arity],
        deferred: Vec::new(),
    }];
    while let Some(mut b) = stack.pop() {
        if steps == 0 {
            if !out.notices.contains(&SolveNotice::BudgetExhausted) {
                out.notices.push(SolveNotice::BudgetExhausted);
            }
            break;
        }
        steps -= 1;
        if !b.tidy() {
            continue;
        }
        if b.eqs.is_empty() {
            close_branch(&b, &original, &mut out);
            continue;
        }

        // Affine equations are solved as one block by exact elimination.
        // Substituting them one variable at a time would feed growing
        // expressions back into the remaining equations; a single reduced
        // echelon pass keeps every substituted value affine in the free
        // variables, so total degrees never climb.
        let affine: Vec<usize> =
            (0..b.eqs.len()).filter(|&i| b.eqs[i].total_degree() <= 1).collect();
        if !affine.is_empty() {
            let vars: Vec<usize> = (0..arity)
                .filter(|&v| affine.iter().any(|&i| b.eqs[i].uses(v)))
                .collect();
            debug_assert!(vars.iter().all(|&v| b.is_undetermined(v)));
            let ncols = vars.len();
            let mut aug: Vec<Vec<GaussianRational>> = Vec::new();
            for &i in &affine {
                let mut row = vec![GaussianRational::zero(); ncols + 1];
                for (e, c) in &b.eqs[i].terms {
                    match e.iter().position(|&k| k > 0) {
                        None => row[ncols] = -c,
                        Some(v) => {
                            let col = vars.iter().position(|&w| w == v).unwrap();
                            row[col] = c.clone();
                        }
                    }
                }
                aug.push(row);
            }
            let pivots = rref_in_place(&mut aug);
            if pivots.contains(&ncols) {
                continue; // a row reduced to 0 = 1
            }
            b.eqs = (0..b.eqs.len())
                .filter(|i| !affine.contains(i))
                .map(|i| b.eqs[i].clone())
                .collect();
            for (r, &pc) in pivots.iter().enumerate() {
                let mut value = ParamPoly::constant(arity, aug[r][ncols].clone());
                for (col, &w) in vars.iter().enumerate() {
                    if col != pc && !aug[r][col].is_zero() {
                        value = &value - &ParamPoly::var(arity, w).scale(&aug[r][col]);
                    }
                }
                b.substitute(vars[pc], &value);
            }
            stack.push(b);
            continue;
        }

        // Linear in some variable with a constant, invertible pivot and an
        // affine value: substitute and keep going.  Values of higher degree
        // are left to the branching steps — substituting them multiplies
        // degrees through every cross term and the branch snowballs.
        let constant_pivot = b.eqs.iter().enumerate().find_map(|(idx, e)| {
            (0..arity)
                .filter(|&v| b.is_undetermined(v) && e.degree_in(v) == 1)
                .find_map(|v| {
                    let cs = e.coeffs_in(v);
                    let a = cs[1].as_constant()?;
                    if cs[0].total_degree() > 1 {
                        return None;
                    }
                    Some((idx, v, cs[0].scale(&(-&a.inv()))))
                })
        });
        if let Some((idx, v, value)) = constant_pivot {
            b.eqs.swap_remove(idx);
            b.substitute(v, &value);
            stack.push(b);
            continue;
        }

        // Univariate equation: branch over its ℚ(i) roots.
        let univariate = b.eqs.iter().enumerate().find_map(|(idx, e)| {
            let v = (0..arity).find(|&v| e.uses(v))?;
            e.to_unipoly(v).map(|p| (idx, v, p))
        });
        if let Some((idx, v, poly)) = univariate {
            let (_, roots, residue) = split_linear_roots(&poly);
            // Roots outside ℚ(i) are out of reach, but the rational ones
            // still deserve their branches.
            if residue.degree().unwrap_or(0) > 0 {
                out.notices.push(SolveNotice::ExtensionRequired { var: v });
            }
            for (root, _) in roots {
                let mut kid = b.child();
                kid.eqs.swap_remove(idx);
                kid.substitute(v, &ParamPoly::constant(arity, root));
                stack.push(kid);
            }
            continue;
        }

        // An equation every term of which carries tᵥ factors as tᵥ times a
        // smaller equation: branch on the two factors.
        let content = b.eqs.iter().enumerate().find_map(|(idx, e)| {
            (0..arity).find(|&v| e.divisible_by(v)).map(|v| (idx, v))
        });
        if let Some((idx, v)) = content {
            let mut zero = b.child();
            zero.substitute(v, &ParamPoly::zero(arity));
            stack.push(zero);
            let mut quotient = b;
            quotient.eqs[idx] = quotient.eqs[idx].div_var(v);
            stack.push(quotient);
            continue;
        }

        // Linear in some variable with a parametric pivot A·tᵥ + B:
        // split on A = 0 versus A invertible.
        let parametric_pivot = b.eqs.iter().enumerate().find_map(|(idx, e)| {
            (0..arity)
                .find(|&v| b.is_undetermined(v) && e.degree_in(v) == 1)
                .map(|v| (idx, v))
        });
        if let Some((idx, v)) = parametric_pivot {
            let e = b.eqs[idx].clone();
            let cs = e.coeffs_in(v);
            let mut vanishing = b.child();
            vanishing.eqs.swap_remove(idx);
            vanishing.eqs.push(cs[1].clone());
            vanishing.eqs.push(cs[0].clone());
            stack.push(vanishing);
            let mut invertible = b;
            invertible.eqs.swap_remove(idx);
            for other in &mut invertible.eqs {
                if other.uses(v) {
                    *other = prem(other, &e, v);
                }
            }
            invertible.deferred.push((e, v));
            stack.push(invertible);
            continue;
        }

        // Nonlinear everywhere.  Eliminate a variable shared by two
        // equations through a pseudo-resultant chain…
        let shared = (0..arity).find(|&v| {
            b.is_undetermined(v) && b.eqs.iter().filter(|e| e.uses(v)).count() >= 2
        });
        if let Some(v) = shared {
            let mut idxs = (0..b.eqs.len()).filter(|&i| b.eqs[i].uses(v));
            let i1 = idxs.next().unwrap();
            let i2 = idxs.next().unwrap();
            let (small, big) = if b.eqs[i1].degree_in(v) <= b.eqs[i2].degree_in(v) {
                (i1, i2)
            } else {
                (i2, i1)
            };
            let r = prem(&b.eqs[big], &b.eqs[small], v).normalized();
            if !r.is_zero() && !b.eqs.contains(&r) {
                b.eqs.push(r);
                stack.push(b);
                continue;
            }
            // The pair collapsed: the larger equation pseudo-reduces to
            // nothing new, which makes it redundant wherever the smaller
            // one's leading v-coefficient is invertible.  Split on that
            // coefficient rather than dropping the branch; extras that
            // sneak in where it vanishes fail the final verification.
            let cs = b.eqs[small].coeffs_in(v);
            let deg = cs.len() - 1;
            let mut lowered = ParamPoly::constant(arity, GaussianRational::zero());
            let mut vpow = ParamPoly::constant(arity, GaussianRational::one());
            for c in cs.iter().take(deg) {
                lowered = &lowered + &(c * &vpow);
                vpow = &vpow * &ParamPoly::var(arity, v);
            }
            let mut vanishing = b.child();
            vanishing.eqs[small] = lowered;
            vanishing.eqs.push(cs[deg].clone());
            stack.push(vanishing);
            let mut kept = b;
            kept.eqs.swap_remove(big);
            stack.push(kept);
            continue;
        }
        // …or, for a lone equation nonlinear in all its variables,
        // sample coordinate values to surface representatives and say
        // so in the notices.
        let v = (0..arity)
            .find(|&v| b.is_undetermined(v) && b.eqs.iter().any(|e| e.uses(v)))
            .expect("nonempty equations must use an undetermined variable");
        out.notices.push(SolveNotice::Degenerate { var: v });
        for sample in [0i64, 1, -1] {
            let mut kid = b.child();
            kid.substitute(v, &ParamPoly::constant(arity, GaussianRational::from_integer(sample)));
            stack.push(kid);
        }
    }
    out.points.sort_by(|a, b| point_cmp(a, b));
    out.points.dedup();
    out
}

fn point_cmp(a: &[GaussianRational], b: &[GaussianRational]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.canonical_cmp(y);
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Turns a constraint-free branch into points or a family, verifying
/// every candidate against the original equations.
fn close_branch(b: &Branch, original: &[ParamPoly], out: &mut SolveOutcome) {
    let arity = b.assign.len();
    let free: Vec<usize> = (0..arity).filter(|&v| b.is_undetermined(v)).collect();
    let settings: Vec<Vec<(usize, GaussianRational)>> = if free.is_empty() {
        vec![Vec::new()]
    } else {
        free.iter()
            .map(|&f| {
                free.iter()
                    .map(|&g| {
                        (g, if g == f { GaussianRational::one() } else { GaussianRational::zero() })
                    })
                    .collect()
            })
            .collect()
    };
    let constant_at = |poly: &ParamPoly, vals: &[Option<GaussianRational>]| {
        let mut e = poly.clone();
        for (w, val) in vals.iter().enumerate() {
            if let Some(c) = val {
                if e.uses(w) {
                    e = e.subst(w, &ParamPoly::constant(arity, c.clone()));
                }
            }
        }
        e.as_constant()
    };
    let mut reps = Vec::new();
    'settings: for setting in settings {
        let mut vals: Vec<Option<GaussianRational>> = vec![None; arity];
        for (v, c) in &setting {
            vals[*v] = Some(c.clone());
        }
        // Deferred pivots resolve in reverse elimination order; by
        // construction each one involves only its variable and values
        // already known at this point.
        for (eq, v) in b.deferred.iter().rev() {
            let cs = eq.coeffs_in(*v);
            let a = cs
                .get(1)
                .and_then(|p| constant_at(p, &vals))
                .unwrap_or_else(GaussianRational::zero);
            let c0 = constant_at(&cs[0], &vals).unwrap_or_else(GaussianRational::zero);
            if a.is_zero() {
                if c0.is_zero() {
                    vals[*v] = Some(GaussianRational::zero());
                } else {
                    continue 'settings;
                }
            } else {
                vals[*v] = Some(&(-&c0) * &a.inv());
            }
        }
        for v in 0..arity {
            if vals[v].is_none() {
                if let Some(expr) = &b.assign[v] {
                    match constant_at(expr, &vals) {
                        Some(c) => vals[v] = Some(c),
                        None => continue 'settings,
                    }
                }
            }
        }
        let point: Vec<GaussianRational> = match vals.into_iter().collect() {
            Some(p) => p,
            None => continue,
        };
        if original.iter().all(|e| e.eval(&point).is_zero()) {
            reps.push(point);
        }
    }
    if free.is_empty() {
        out.points.extend(reps);
    } else if !reps.is_empty() {
        out.families.push(Family { free, representatives: reps });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    fn v(arity: usize, i: usize) -> ParamPoly {
        ParamPoly::var(arity, i)
    }

    fn k(arity: usize, n: i64) -> ParamPoly {
        ParamPoly::constant(arity, c(n))
    }

    #[test]
    fn linear_pair_pins_a_point() {
        // t0 + t1 = 3, t0 − t1 = 1.
        let eqs = [
            &(&v(2, 0) + &v(2, 1)) - &k(2, 3),
            &(&v(2, 0) - &v(2, 1)) - &k(2, 1),
        ];
        let out = solve_system(2, &eqs, 100);
        assert_eq!(out.points, vec![vec![c(2), c(1)]]);
        assert!(out.families.is_empty());
        assert!(out.notices.is_empty());
    }

    #[test]
    fn quadratic_branching_finds_both_roots() {
        // t0² = 1, t1 = t0.
        let eqs = [
            &(&v(2, 0) * &v(2, 0)) - &k(2, 1),
            &v(2, 1) - &v(2, 0),
        ];
        let out = solve_system(2, &eqs, 100);
        assert_eq!(out.points, vec![vec![c(-1), c(-1)], vec![c(1), c(1)]]);
    }

    #[test]
    fn gaussian_roots_are_in_scope() {
        let eqs = [&(&v(1, 0) * &v(1, 0)) + &k(1, 1)];
        let out = solve_system(1, &eqs, 100);
        let i = GaussianRational::i();
        assert_eq!(out.points.len(), 2);
        assert!(out.points.contains(&vec![i.clone()]));
        assert!(out.points.contains(&vec![-&i]));
    }

    #[test]
    fn irrational_branch_is_pruned_with_notice() {
        let eqs = [&(&v(1, 0) * &v(1, 0)) - &k(1, 2)];
        let out = solve_system(1, &eqs, 100);
        assert!(out.points.is_empty());
        assert_eq!(out.notices, vec![SolveNotice::ExtensionRequired { var: 0 }]);
    }

    #[test]
    fn inconsistent_system_yields_nothing() {
        let eqs = [&v(1, 0) - &k(1, 1), &v(1, 0) - &k(1, 2)];
        let out = solve_system(1, &eqs, 100);
        assert!(out.points.is_empty());
        assert!(out.families.is_empty());
        assert!(out.notices.is_empty());
    }

    #[test]
    fn free_direction_reported_as_family() {
        // t0 = t1 leaves a one-parameter family; representatives come
        // from unit settings of the free variable.
        let eqs = [&v(2, 0) - &v(2, 1)];
        let out = solve_system(2, &eqs, 100);
        assert!(out.points.is_empty());
        assert_eq!(out.families.len(), 1);
        assert_eq!(out.families[0].representatives, vec![vec![c(1), c(1)]]);
    }

    #[test]
    fn product_equation_splits_into_axes() {
        // t0·t1 = 0: the two coordinate axes, each surfaced through a
        // representative.
        let eqs = [&v(2, 0) * &v(2, 1)];
        let out = solve_system(2, &eqs, 100);
        let mut reps: Vec<Vec<GaussianRational>> =
            out.families.iter().flat_map(|f| f.representatives.clone()).collect();
        reps.extend(out.points.clone());
        assert!(reps.contains(&vec![c(0), c(1)]));
        assert!(reps.contains(&vec![c(1), c(0)]));
    }

    #[test]
    fn bilinear_system_resolves_by_deferral() {
        // t0·t1 = 2 with t0 + t1 = 3: points (1,2) and (2,1).
        let eqs = [
            &(&v(2, 0) * &v(2, 1)) - &k(2, 2),
            &(&v(2, 0) + &v(2, 1)) - &k(2, 3),
        ];
        let out = solve_system(2, &eqs, 200);
        assert_eq!(out.points, vec![vec![c(1), c(2)], vec![c(2), c(1)]]);
    }

    #[test]
    fn pseudo_remainder_eliminates_the_variable() {
        // prem(t0² + t1, t0 − t1, t0) must be t0-free and vanish on the
        // common zeros: t1² + t1.
        let e = &v(2, 0) - &v(2, 1);
        let big = &(&v(2, 0) * &v(2, 0)) + &v(2, 1);
        let r = prem(&big, &e, 0);
        assert!(!r.uses(0));
        assert_eq!(r.normalized(), (&(&v(2, 1) * &v(2, 1)) + &v(2, 1)).normalized());
    }

    #[test]
    fn exhausted_budget_is_announced() {
        let eqs = [
            &(&v(2, 0) * &v(2, 1)) - &k(2, 2),
            &(&v(2, 0) + &v(2, 1)) - &k(2, 3),
        ];
        let out = solve_system(2, &eqs, 1);
        assert!(out.notices.contains(&SolveNotice::BudgetExhausted));
    }

    #[test]
    fn substitution_is_horner_exact() {
        // t0² + 2t0 + 1 with t0 := t1 − 1 becomes t1².
        let p = &(&(&v(2, 0) * &v(2, 0)) + &v(2, 0).scale(&c(2))) + &k(2, 1);
        let s = &v(2, 1) - &k(2, 1);
        assert_eq!(p.subst(0, &s), &v(2, 1) * &v(2, 1));
    }

    #[test]
    fn normalization_clears_denominators_and_sign() {
        let half = GaussianRational::from_ratio(-1, 2);
        let p = &v(1, 0).scale(&half) + &k(1, 1);
        assert_eq!(p.normalized(), &v(1, 0) - &k(1, 2));
    }
}
