//! Newton-polygon expansion of the y-roots of a bivariate polynomial as
//! Laurent–Puiseux series at x = 0.
//!
//! The expansion follows the classical scheme with two implementation
//! choices worth spelling out:
//!
//! * For an edge of exponent μ = p/q (q > 1), the polynomial is first
//!   rewritten with x → x^q.  The characteristic equation of the rewritten
//!   edge then has full degree equal to the edge's horizontal span, so the
//!   q conjugate branches of one classical parametrization appear as q
//!   distinct characteristic roots in Q(i) — or the factorization honestly
//!   fails with `ExtensionRequired` when they live in a bigger field.
//! * Simple characteristic roots switch to coefficient-by-coefficient
//!   stepping (the derivative at the origin is a unit); only multiple roots
//!   recurse through another polygon round.  Square-free input guarantees
//!   the recursion separates branches; a depth guard turns a violated
//!   assumption into an error instead of a loop.
//!
//! Degenerate and borderline inputs (roots meromorphic at x = 0 such as
//! c/x, exactly polynomial roots, the y ≡ 0 branch) fall out of the same
//! machinery; see the tests.

use num::BigRational;
use thiserror::Error;

use crate::gaussian::GaussianRational;
use crate::poly::{square_free_decomposition_y, BivarPoly, Var};
use crate::series::PuiseuxSeries;
use crate::system::PlanarSystem;
use crate::unipoly::{factor_univariate, FactorError, UniPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NewtonError {
    #[error(transparent)]
    Extension(#[from] FactorError),
    #[error("polynomial has no y-dependence")]
    NoYDependence,
    #[error("branch separation exceeded the recursion budget")]
    BudgetExceeded,
}

/// All y-roots of `f`, with multiplicity, certified below the real
/// exponent `order`, sorted canonically.
pub fn newton_puiseux(f: &BivarPoly, order: i64) -> Result<Vec<PuiseuxSeries>, NewtonError> {
    assert!(!f.is_zero(), "cannot expand the roots of the zero polynomial");
    let ell = f.degree(Var::Y).unwrap_or(0);
    if ell == 0 {
        return Err(NewtonError::NoYDependence);
    }
    let mut roots = Vec::new();
    for (factor, mult) in square_free_decomposition_y(f) {
        let branch_roots = expand(&factor, order, false, 0)?;
        for r in branch_roots {
            for _ in 0..mult {
                roots.push(r.clone());
            }
        }
    }
    assert_eq!(roots.len() as u32, ell, "root count must match the y-degree");
    roots.sort_by(|a, b| a.cmp_canonical(b));
    Ok(roots)
}

/// f(x, g(x)) by Horner evaluation in y; the window is inherited from the
/// series arithmetic.
pub fn series_substitute(f: &BivarPoly, g: &PuiseuxSeries) -> PuiseuxSeries {
    let coeffs = f.coefficients_wrt(Var::Y);
    let mut acc = PuiseuxSeries::zero(PuiseuxSeries::EXACT);
    for c in coeffs.iter().rev() {
        let c_series = PuiseuxSeries::from_poly_x(c).expect("y-coefficients involve x only");
        acc = &(&acc * g) + &c_series;
    }
    acc
}

fn expand(
    f: &BivarPoly,
    order: i64,
    positive_only: bool,
    depth: u32,
) -> Result<Vec<PuiseuxSeries>, NewtonError> {
    if depth > 64 {
        return Err(NewtonError::BudgetExceeded);
    }
    let mut f = f.primitive_part_wrt(Var::Y);
    let mut roots = Vec::new();
    if f.coefficients_wrt(Var::Y)[0].is_zero() {
        // y divides f exactly: the zero branch, known completely.
        roots.push(PuiseuxSeries::zero(PuiseuxSeries::EXACT));
        f = f.divide_exact(&BivarPoly::y()).expect("y-multiple divides by y");
    }
    if f.degree(Var::Y).unwrap_or(0) == 0 {
        return Ok(roots);
    }
    for edge in polygon_edges(&f) {
        // slope = -μ; in positive-only rounds (branch separation) only
        // exponents μ > 0 belong to the branch being refined.
        if positive_only && edge.p <= 0 {
            continue;
        }
        roots.extend(expand_edge(&f, &edge, order, depth)?);
    }
    Ok(roots)
}

struct Edge {
    j1: u32,
    j2: u32,
    /// Branch exponent μ = p/q in lowest terms, q > 0.
    p: i64,
    q: u32,
    /// x-order of the polygon at j1.
    i1: u32,
}

/// Lower Newton polygon of f: edges of the lower convex hull of
/// {(j, ord_x p_j)} over the y-powers j with p_j ≠ 0.
fn polygon_edges(f: &BivarPoly) -> Vec<Edge> {
    let coeffs = f.coefficients_wrt(Var::Y);
    let mut points: Vec<(i64, i64)> = Vec::new();
    for (j, pj) in coeffs.iter().enumerate() {
        if let Some(i) = ord_x(pj) {
            points.push((j as i64, i as i64));
        }
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for pt in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Keep strictly convex-from-below turns only.
            if (b.0 - a.0) * (pt.1 - a.1) - (pt.0 - a.0) * (b.1 - a.1) <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull.windows(2)
        .map(|w| {
            let (j1, i1) = w[0];
            let (j2, i2) = w[1];
            let (mut num, den) = (i1 - i2, j2 - j1);
            let g = gcd_positive(num.abs().max(1), den);
            num /= g;
            Edge {
                j1: j1 as u32,
                j2: j2 as u32,
                p: num,
                q: (den / g) as u32,
                i1: i1 as u32,
            }
        })
        .collect()
}

fn gcd_positive(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a.max(1)
}

fn ord_x(p: &BivarPoly) -> Option<u32> {
    p.terms().map(|(m, _)| m.dx).min()
}

fn expand_edge(
    f: &BivarPoly,
    edge: &Edge,
    order: i64,
    depth: u32,
) -> Result<Vec<PuiseuxSeries>, NewtonError> {
    let q = edge.q;
    let p = edge.p;
    // Refine the x-grid so the branch exponent becomes the integer p.
    let fq = if q == 1 {
        f.clone()
    } else {
        f.compose_wrt(Var::X, &BivarPoly::monomial(GaussianRational::one(), q, 0))
    };
    // Characteristic polynomial: coefficients of f_q on the edge line
    // i(j) = q·i1 − p·(j − j1).
    let mut chi = Vec::new();
    for j in edge.j1..=edge.j2 {
        let i = q as i64 * edge.i1 as i64 - p * (j - edge.j1) as i64;
        let c = if i >= 0 { fq.coeff(i as u32, j) } else { GaussianRational::zero() };
        chi.push(c);
    }
    let chi = UniPoly::new(chi);
    debug_assert_eq!(chi.degree(), Some((edge.j2 - edge.j1) as usize));
    debug_assert!(!chi.coeff(0).is_zero(), "polygon vertex must carry a term");

    let factorization = factor_univariate(&chi)?;
    let budget = order.saturating_mul(q as i64);
    let mut out = Vec::new();
    for (c, mult) in factorization.roots {
        let g = shift_substitute(&fq, p, &c);
        if mult == 1 {
            out.push(step_simple_root(&g, &c, p, q, budget));
        } else {
            let sub_roots = expand(&g, budget - p, true, depth + 1)?;
            debug_assert_eq!(sub_roots.len() as u32, mult, "branch count under a multiple root");
            for z in sub_roots {
                let shifted = (&PuiseuxSeries::constant(c.clone(), PuiseuxSeries::EXACT) + &z)
                    .mul_xpow(p, 1);
                out.push(shifted.substitute_x_root(q));
            }
        }
    }
    Ok(out)
}

/// g(x, z) := x^{-λ} f_q(x, x^p (c + z)) with λ chosen minimal so g is a
/// polynomial; g(0, 0) = χ(c).
fn shift_substitute(fq: &BivarPoly, p: i64, c: &GaussianRational) -> BivarPoly {
    let lambda = fq
        .terms()
        .map(|(m, _)| m.dx as i64 + p * m.dy as i64)
        .min()
        .expect("nonzero polynomial");
    // (c + z)^j, computed once per needed power.
    let base = &BivarPoly::constant(c.clone()) + &BivarPoly::y();
    let degy = fq.degree(Var::Y).unwrap_or(0) as usize;
    let mut pows = Vec::with_capacity(degy + 1);
    pows.push(BivarPoly::one());
    for j in 1..=degy {
        pows.push(&pows[j - 1] * &base);
    }
    let mut acc = BivarPoly::zero();
    for (m, a) in fq.terms() {
        let e = m.dx as i64 + p * m.dy as i64 - lambda;
        let term = pows[m.dy as usize].scale(a).mul_monomial(e as u32, 0);
        acc = &acc + &term;
    }
    acc
}

/// Implicit-function stepping for a simple characteristic root: g(x, z) has
/// ∂g/∂z(0,0) ≠ 0, so the unique branch through the origin is an ordinary
/// power series solved one coefficient at a time.
fn step_simple_root(
    g: &BivarPoly,
    c: &GaussianRational,
    p: i64,
    q: u32,
    budget: i64,
) -> PuiseuxSeries {
    let unit = g.partial(Var::Y).eval(&GaussianRational::zero(), &GaussianRational::zero());
    debug_assert!(!unit.is_zero(), "simple root must step");
    let z_budget = budget - p;
    let mut z = UniPoly::zero();
    for k in 1..z_budget.max(1) {
        let value = substitute_poly_trunc(g, &z, k);
        let rk = value.coeff(k as usize);
        if !rk.is_zero() {
            let delta = -&(&rk / &unit);
            z = &z + &UniPoly::monomial(delta, k as usize);
        }
    }
    let mut terms: Vec<(i64, GaussianRational)> = vec![(0, c.clone())];
    for (k, zk) in z.coeffs().iter().enumerate() {
        terms.push((k as i64, zk.clone()));
    }
    PuiseuxSeries::from_terms(1, terms, z_budget.max(1))
        .mul_xpow(p, 1)
        .substitute_x_root(q)
}

/// g(x, z(x)) as a univariate polynomial in x, truncated beyond x^bound.
fn substitute_poly_trunc(g: &BivarPoly, z: &UniPoly, bound: i64) -> UniPoly {
    let zb = BivarPoly::from_unipoly(Var::X, z);
    let mut acc = BivarPoly::zero();
    for cj in g.coefficients_wrt(Var::Y).iter().rev() {
        acc = truncate_x(&(&(&acc * &zb) + cj), bound);
    }
    acc.to_unipoly(Var::X).expect("y fully substituted")
}

fn truncate_x(p: &BivarPoly, bound: i64) -> BivarPoly {
    BivarPoly::from_map(
        p.terms()
            .filter(|(m, _)| (m.dx as i64) <= bound)
            .map(|(m, c)| (*m, c.clone()))
            .collect(),
    )
}

/// Outcome of testing a series as a trajectory of the flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionVerdict {
    pub is_solution: bool,
    /// Exponent of the first surviving residual term, when there is one.
    pub residual_order: Option<(i64, u32)>,
    /// The residual was checked for all exponents below this bound.
    pub checked_below: (i64, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionCheckError {
    #[error("truncation leaves fewer than {minimum} checkable residual coefficients")]
    InconclusiveTruncation { minimum: u32 },
    #[error("P(x, g(x)) vanishes to truncation; the trajectory equation degenerates")]
    DegenerateDirection,
}

/// Minimum number of residual grid coefficients that must be visible for a
/// particular-solution verdict to count as conclusive.
const MIN_CHECKABLE: i64 = 4;

/// Tests g′(x)·P(x, g(x)) − Q(x, g(x)) ≡ 0 to the certified window: the
/// algebraic form of "y = g(x) is a trajectory".
///
/// A "yes" only counts when the window exposes at least [`MIN_CHECKABLE`]
/// residual coefficients past the earliest exponent either side could
/// contribute; otherwise vanishing is vacuous and the check refuses to rule.
pub fn is_particular_solution(
    g: &PuiseuxSeries,
    sys: &PlanarSystem,
) -> Result<SolutionVerdict, SolutionCheckError> {
    let p_at = series_substitute(sys.p(), g);
    let q_at = series_substitute(sys.q(), g);
    if p_at.is_zero_to_trunc() {
        return Err(SolutionCheckError::DegenerateDirection);
    }
    let prod = &g.derivative() * &p_at;
    let residual = &prod - &q_at;
    let (t, n) = residual.window();
    // A surviving term refutes conclusively: that coefficient is certified.
    if !residual.is_zero_to_trunc() {
        return Ok(SolutionVerdict {
            is_solution: false,
            residual_order: residual.min_exp(),
            checked_below: (t, n),
        });
    }
    // Vanishing on an unbounded window is an exact identity.
    if t >= PuiseuxSeries::EXACT {
        return Ok(SolutionVerdict { is_solution: true, residual_order: None, checked_below: (t, n) });
    }
    // Otherwise count grid slots between the earliest exponent either side
    // could contribute and the window's end; too few means the vanishing
    // is vacuous rather than evidence.
    let grid = lcm_u32(prod.polydromy(), q_at.polydromy()) as i64;
    let real = |num: i64, den: u32| BigRational::new(num.into(), (den as i64).into());
    let e0 = real(prod.support_floor(), prod.polydromy())
        .min(real(q_at.support_floor(), q_at.polydromy()));
    let span = (real(t, n) - e0) * BigRational::from_integer(grid.into());
    if span < BigRational::from_integer(MIN_CHECKABLE.into()) {
        return Err(SolutionCheckError::InconclusiveTruncation { minimum: MIN_CHECKABLE as u32 });
    }
    Ok(SolutionVerdict { is_solution: true, residual_order: None, checked_below: (t, n) })
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    a / gcd_positive(a as i64, b as i64) as u32 * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    fn q(a: i64, b: i64) -> GaussianRational {
        GaussianRational::from_ratio(a, b)
    }

    fn roots_of(text: &str, order: i64) -> Vec<PuiseuxSeries> {
        newton_puiseux(&parse_polynomial(text).unwrap(), order).unwrap()
    }

    #[test]
    fn cubic_with_three_rational_branches() {
        let f = parse_polynomial("y^3 - y - x").unwrap();
        let roots = roots_of("y^3 - y - x", 10);
        assert_eq!(roots.len(), 3);
        // Canonical order: branch at -1, branch through 0, branch at +1.
        assert_eq!(roots[0].coeff(0, 1), g(-1));
        assert_eq!(roots[1].coeff(0, 1), g(0));
        assert_eq!(roots[2].coeff(0, 1), g(1));
        assert_eq!(roots[1].coeff(1, 1), g(-1));
        assert_eq!(roots[1].coeff(3, 1), g(-1));
        assert_eq!(roots[1].coeff(5, 1), g(-3));
        assert_eq!(roots[0].coeff(1, 1), q(1, 2));
        assert_eq!(roots[2].coeff(1, 1), q(1, 2));
        for r in &roots {
            assert!(series_substitute(&f, r).is_zero_to_trunc());
        }
    }

    #[test]
    fn meromorphic_branches_with_polydromy_two() {
        let f = parse_polynomial("x*y^2 - x - 1").unwrap();
        let roots = roots_of("x*y^2 - x - 1", 8);
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert_eq!(r.polydromy(), 2);
            assert_eq!(r.min_exp(), Some((-1, 2)));
            assert!(series_substitute(&f, r).is_zero_to_trunc());
        }
        // ±x^(-1/2)(1+x)^(1/2) = ±(x^(-1/2) + x^(1/2)/2 - x^(3/2)/8 + …)
        assert_eq!(roots[1].coeff(-1, 2), g(1));
        assert_eq!(roots[1].coeff(1, 2), q(1, 2));
        assert_eq!(roots[1].coeff(3, 2), q(-1, 8));
        assert_eq!(roots[0].coeff(-1, 2), g(-1));
    }

    #[test]
    fn vieta_oracle_for_both_example_curves() {
        // Sums and products of the returned roots must match the symmetric
        // functions read directly off the y-coefficients.
        for (text, e1_text, prod_text) in [
            // y^3 - y - x: e1 = 0, e3 = product = -(-x)/1 = x
            ("y^3 - y - x", "0", "x"),
            // x y^2 - x - 1: e1 = 0, e2 = product = (-x-1)/x
            ("x*y^2 - x - 1", "0", "(0 - x - 1)/1"),
        ] {
            let roots = roots_of(text, 8);
            let mut sum = PuiseuxSeries::zero(PuiseuxSeries::EXACT);
            let mut prod = PuiseuxSeries::constant(g(1), PuiseuxSeries::EXACT);
            for r in &roots {
                sum = &sum + r;
                prod = &prod * r;
            }
            let e1 = PuiseuxSeries::from_poly_x(&parse_polynomial(e1_text).unwrap()).unwrap();
            assert!(sum.agrees_with(&e1), "e1 mismatch for {text}");
            if prod_text == "x" {
                let expected = PuiseuxSeries::from_poly_x(&parse_polynomial("x").unwrap()).unwrap();
                assert!(prod.agrees_with(&expected));
            } else {
                // (-x-1)/x = -1 - 1/x
                let expected =
                    PuiseuxSeries::from_terms(1, vec![(-1, g(-1)), (0, g(-1))], 6);
                assert!(prod.agrees_with(&expected), "product mismatch for {text}");
            }
        }
    }

    #[test]
    fn double_root_reported_twice() {
        let roots = roots_of("(y - x)^2", 6);
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0], roots[1]);
        assert_eq!(roots[0].coeff(1, 1), g(1));
        assert_eq!(roots[0].coeff(2, 1), g(0));
    }

    #[test]
    fn zero_branch_and_content_stripped() {
        // x y^2 - x^2 y = x·y·(y - x): two roots, y = 0 and y = x.
        let roots = roots_of("x*y^2 - x^2*y", 6);
        assert_eq!(roots.len(), 2);
        assert!(roots[0].is_zero_to_trunc());
        assert_eq!(roots[1].coeff(1, 1), g(1));
    }

    #[test]
    fn cube_root_needs_larger_field() {
        let err = newton_puiseux(&parse_polynomial("y^3 - x").unwrap(), 6).unwrap_err();
        assert!(matches!(err, NewtonError::Extension(FactorError::ExtensionRequired { .. })));
    }

    #[test]
    fn imaginary_laurent_roots() {
        // x^2 y^2 + 1 has roots ±i/x.
        let roots = roots_of("x^2*y^2 + 1", 6);
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].coeff(-1, 1), -GaussianRational::i());
        assert_eq!(roots[1].coeff(-1, 1), GaussianRational::i());
        for r in &roots {
            assert_eq!(r.terms().count(), 1, "roots are exact monomials");
        }
    }

    #[test]
    fn no_y_dependence_is_an_error() {
        assert_eq!(
            newton_puiseux(&parse_polynomial("x^2 + 1").unwrap(), 6).unwrap_err(),
            NewtonError::NoYDependence
        );
    }

    #[test]
    fn fractional_solution_satisfies_its_flow() {
        // y = x^(3/2) solves dy/dx = 3y/(2x), i.e. ẋ = 2x, ẏ = 3y.
        let sys = PlanarSystem::new(
            parse_polynomial("2*x").unwrap(),
            parse_polynomial("3*y").unwrap(),
        )
        .unwrap();
        let root = PuiseuxSeries::monomial(g(1), 3, 2, 12);
        let verdict = is_particular_solution(&root, &sys).unwrap();
        assert!(verdict.is_solution);
        assert_eq!(verdict.residual_order, None);
    }

    #[test]
    fn every_quintic_curve_branch_is_a_trajectory() {
        let sys = PlanarSystem::new(
            parse_polynomial("-5 - 5*x + 15*y^2 - 6*x^2*y + 14*x*y^2 - 9*x*y^4").unwrap(),
            parse_polynomial("5 + 2*x - 3*y - 2*x*y^2 + 6*y^3 - 3*y^5").unwrap(),
        )
        .unwrap();
        for text in ["y^3 - y - x", "x*y^2 - x - 1"] {
            for root in roots_of(text, 14) {
                let verdict = is_particular_solution(&root, &sys).unwrap();
                assert!(verdict.is_solution, "branch of {text} must solve the flow");
            }
        }
    }

    #[test]
    fn non_solution_yields_residual() {
        // g = x against ẋ = 1, ẏ = 2: residual g′·P − Q = 1 − 2 = −1.
        let sys = PlanarSystem::new(parse_polynomial("1").unwrap(), parse_polynomial("2").unwrap())
            .unwrap();
        let root = PuiseuxSeries::monomial(g(1), 1, 1, 10);
        let verdict = is_particular_solution(&root, &sys).unwrap();
        assert!(!verdict.is_solution);
        assert_eq!(verdict.residual_order, Some((0, 1)));
    }

    #[test]
    fn too_small_window_is_inconclusive() {
        let sys = PlanarSystem::new(parse_polynomial("2*x").unwrap(), parse_polynomial("3*y").unwrap())
            .unwrap();
        let root = PuiseuxSeries::monomial(g(1), 3, 2, 2);
        assert!(matches!(
            is_particular_solution(&root, &sys),
            Err(SolutionCheckError::InconclusiveTruncation { .. })
        ));
    }
}
