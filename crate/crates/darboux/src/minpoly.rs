//! Reconstruction of the polynomial a Laurent–Puiseux series satisfies.
//!
//! Works backwards from `newton_puiseux`: given g(x) with a certified
//! window, find the lowest-total-degree f with f(x, g(x)) ≡ 0 to that
//! window.  Each candidate monomial x^a y^b contributes the series
//! x^a·g(x)^b; vanishing of the combination is one linear condition per
//! visible grid exponent, and the annihilators form the kernel of that
//! system.  Degrees are staged from small to large so the first nonempty
//! kernel is the minimal one, and a one-dimensional kernel certifies
//! uniqueness of the reconstruction.

use thiserror::Error;

use crate::gaussian::GaussianRational;
use crate::linalg::{kernel_basis, Row};
use crate::poly::BivarPoly;
use crate::ratfunc::RationalFunction;
use crate::series::PuiseuxSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinPolyError {
    #[error("no annihilating polynomial within degree bounds ({max_deg_x}, {max_deg_y})")]
    NotFound { max_deg_x: u32, max_deg_y: u32 },
    #[error(
        "kernel of dimension {dimension} from {equations} conditions on {unknowns} coefficients; \
         raise the degree bounds or the truncation order"
    )]
    AmbiguousKernel { dimension: usize, equations: usize, unknowns: usize },
}

/// How many more visible conditions than unknowns a stage must have before
/// a one-dimensional kernel is trusted.
const MARGIN: usize = 4;

/// The lowest-total-degree polynomial with f(x, g(x)) ≡ 0 to g's window
/// (clipped at real exponent `order`), content-normalized.
pub fn minimal_polynomial(
    g: &PuiseuxSeries,
    max_deg_x: u32,
    max_deg_y: u32,
    order: i64,
) -> Result<BivarPoly, MinPolyError> {
    common_annihilator(std::slice::from_ref(g), max_deg_x, max_deg_y, order)
}

/// The lowest-total-degree polynomial vanishing on every series of the set
/// simultaneously.  For conjugate root families this recovers the product
/// of the individual factors.
pub fn common_annihilator(
    roots: &[PuiseuxSeries],
    max_deg_x: u32,
    max_deg_y: u32,
    order: i64,
) -> Result<BivarPoly, MinPolyError> {
    assert!(!roots.is_empty(), "need at least one series to annihilate");
    assert!(max_deg_y >= 1, "an annihilator must involve y");
    let clipped: Vec<PuiseuxSeries> =
        roots.iter().map(|g| g.truncate_window(order, 1)).collect();
    // g^0 .. g^max_deg_y per root, computed once.
    let powers: Vec<Vec<PuiseuxSeries>> = clipped
        .iter()
        .map(|g| {
            let mut p = Vec::with_capacity(max_deg_y as usize + 1);
            p.push(PuiseuxSeries::constant(GaussianRational::one(), PuiseuxSeries::EXACT));
            for _ in 0..max_deg_y {
                p.push(p.last().unwrap() * g);
            }
            p
        })
        .collect();

    for total in 1..=(max_deg_x + max_deg_y) {
        let monomials: Vec<(u32, u32)> = (0..=max_deg_y)
            .flat_map(|b| (0..=max_deg_x).map(move |a| (a, b)))
            .filter(|(a, b)| a + b <= total)
            .collect();
        let mut rows: Vec<Row> = Vec::new();
        let mut conditions: i64 = 0;
        for pws in &powers {
            let columns: Vec<PuiseuxSeries> = monomials
                .iter()
                .map(|(a, b)| pws[*b as usize].mul_xpow(*a as i64, 1))
                .collect();
            let range = condition_range(&columns);
            conditions = conditions.saturating_add(range.conditions);
            for e in range.lo..range.row_end {
                rows.push(columns.iter().map(|s| s.coeff(e, range.grid)).collect());
            }
        }
        let kernel = kernel_basis(&rows, monomials.len());
        if kernel.is_empty() {
            continue;
        }
        // A kernel only certifies a unique annihilator when the window
        // genuinely overdetermined the system.
        if kernel.len() > 1 || conditions < (monomials.len() + MARGIN) as i64 {
            return Err(MinPolyError::AmbiguousKernel {
                dimension: kernel.len(),
                equations: rows.len(),
                unknowns: monomials.len(),
            });
        }
        let f = BivarPoly::from_map(
            monomials
                .iter()
                .zip(&kernel[0])
                .filter(|(_, c)| !c.is_zero())
                .map(|((a, b), c)| (crate::poly::Monomial { dx: *a, dy: *b }, c.clone()))
                .collect(),
        );
        return Ok(f.canonical_scaled());
    }
    Err(MinPolyError::NotFound { max_deg_x, max_deg_y })
}

/// Attempts to recognize a series as an exact rational function of x, by
/// finding a linear-in-y annihilator a(x)·y + b(x).  `None` when no such
/// relation is certified within the degree bound and the series' window.
pub fn rational_form(g: &PuiseuxSeries, max_deg: u32) -> Option<RationalFunction> {
    let order = if g.trunc_num() >= PuiseuxSeries::EXACT {
        i64::from(max_deg) * 2 + MARGIN as i64 + 2
    } else {
        g.trunc_num().div_euclid(g.polydromy() as i64) + 1
    };
    let f = minimal_polynomial(g, max_deg, 1, order).ok()?;
    let coeffs = f.coefficients_wrt(crate::poly::Var::Y);
    if coeffs.len() != 2 {
        return None;
    }
    let r = RationalFunction::new(-&coeffs[0], coeffs[1].clone());
    debug_assert!(r.depends_only_on(crate::poly::Var::X));
    Some(r)
}

struct ConditionRange {
    /// Common grid denominator (lcm of column polydromies).
    grid: u32,
    /// First exponent numerator any column can touch.
    lo: i64,
    /// Exclusive end of the rows worth materializing: past every column's
    /// support the rows are identically zero and add no rank.
    row_end: i64,
    /// Number of grid slots on which vanishing is genuinely verified —
    /// the full shared window, zero rows included.
    conditions: i64,
}

fn condition_range(columns: &[PuiseuxSeries]) -> ConditionRange {
    let mut grid = 1u32;
    for s in columns {
        grid = grid / gcd_u32(grid, s.polydromy()) * s.polydromy();
    }
    let scale = |num: i64, den: u32| num.saturating_mul((grid / den) as i64);
    let mut lo = i64::MAX;
    let mut hi = i64::MAX;
    let mut support_end = i64::MIN;
    for s in columns {
        lo = lo.min(scale(s.support_floor(), s.polydromy()));
        hi = hi.min(scale(s.trunc_num(), s.polydromy()));
        if let Some((t, _)) = s.terms().last() {
            support_end = support_end.max(scale(*t, s.polydromy()));
        }
    }
    ConditionRange {
        grid,
        lo,
        row_end: hi.min(support_end.saturating_add(1)),
        conditions: hi.saturating_sub(lo),
    }
}

fn gcd_u32(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::newton_puiseux;
    use crate::parse::parse_polynomial;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    #[test]
    fn recovers_cubic_from_each_root() {
        let f = parse_polynomial("y^3 - y - x").unwrap();
        let expected = f.canonical_scaled();
        for root in newton_puiseux(&f, 16).unwrap() {
            let rec = minimal_polynomial(&root, 3, 3, 16).unwrap();
            assert_eq!(rec, expected);
        }
    }

    #[test]
    fn recovers_meromorphic_curve() {
        let f = parse_polynomial("x*y^2 - x - 1").unwrap();
        let expected = f.canonical_scaled();
        for root in newton_puiseux(&f, 16).unwrap() {
            assert_eq!(minimal_polynomial(&root, 2, 2, 16).unwrap(), expected);
        }
    }

    #[test]
    fn squares_a_fractional_power() {
        let root = PuiseuxSeries::monomial(g(1), 3, 2, 12);
        let rec = minimal_polynomial(&root, 3, 2, 12).unwrap();
        assert_eq!(rec, parse_polynomial("y^2 - x^3").unwrap().canonical_scaled());
    }

    #[test]
    fn gaussian_root_alone_gives_linear_factor() {
        let root = PuiseuxSeries::monomial(GaussianRational::i(), -1, 1, 12);
        let rec = minimal_polynomial(&root, 2, 2, 12).unwrap();
        // x·y = i, content-normalized with the leading term rotated positive.
        let target = (&(&BivarPoly::x() * &BivarPoly::y())
            - &BivarPoly::constant(GaussianRational::i()))
            .canonical_scaled();
        assert_eq!(rec, target);
    }

    #[test]
    fn gaussian_pair_gives_real_quadratic() {
        let plus = PuiseuxSeries::monomial(GaussianRational::i(), -1, 1, 8);
        let minus = PuiseuxSeries::monomial(-GaussianRational::i(), -1, 1, 8);
        let rec = common_annihilator(&[plus, minus], 2, 2, 8).unwrap();
        assert_eq!(rec, parse_polynomial("x^2*y^2 + 1").unwrap().canonical_scaled());
    }

    #[test]
    fn exact_polynomial_root_certifies_without_window_margin() {
        let root = PuiseuxSeries::from_poly_x(&parse_polynomial("x").unwrap()).unwrap();
        let rec = minimal_polynomial(&root, 2, 2, 64).unwrap();
        assert_eq!(rec, parse_polynomial("y - x").unwrap().canonical_scaled());
    }

    #[test]
    fn transcendental_series_is_not_found() {
        // Truncated exponential: no small algebraic relation exists.
        let terms: Vec<(i64, GaussianRational)> = (0..14)
            .map(|k| {
                let mut fact = 1i64;
                for j in 1..=k {
                    fact *= j;
                }
                (k, GaussianRational::from_ratio(1, fact))
            })
            .collect();
        let e = PuiseuxSeries::from_terms(1, terms, 14);
        assert_eq!(
            minimal_polynomial(&e, 2, 2, 14).unwrap_err(),
            MinPolyError::NotFound { max_deg_x: 2, max_deg_y: 2 }
        );
    }

    #[test]
    fn recognizes_rational_series() {
        // -2/x² as a 12-term certified series.
        let s = PuiseuxSeries::from_terms(1, vec![(-2, g(-2))], 10);
        let r = rational_form(&s, 4).unwrap();
        assert_eq!(r.to_string(), "-2/x^2");
        // Geometric series 1/(1-x).
        let geo = PuiseuxSeries::from_terms(1, (0..12).map(|k| (k, g(1))).collect(), 12);
        let r = rational_form(&geo, 3).unwrap();
        assert_eq!(r.to_string(), "-1/(x - 1)");
        // A truncated exponential is not rational within small bounds.
        let terms: Vec<(i64, GaussianRational)> = (0..12)
            .map(|k| {
                let mut fact = 1i64;
                for j in 1..=k {
                    fact *= j;
                }
                (k, GaussianRational::from_ratio(1, fact))
            })
            .collect();
        assert!(rational_form(&PuiseuxSeries::from_terms(1, terms, 12), 2).is_none());
    }

    #[test]
    fn starved_window_refuses_to_certify() {
        let root = PuiseuxSeries::monomial(g(1), 3, 2, 3);
        assert!(matches!(
            minimal_polynomial(&root, 3, 2, 3),
            Err(MinPolyError::AmbiguousKernel { .. })
        ));
    }
}
