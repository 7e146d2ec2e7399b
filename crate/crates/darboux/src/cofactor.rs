//! Cofactors of invariant curves and particular solutions.
//!
//! An invariant algebraic curve f = 0 of ẋ = P, ẏ = Q satisfies
//! X(f) = k·f for a polynomial cofactor k of degree ≤ d−1.  A particular
//! solution y = g(x) — algebraic or not — instead carries a
//! *quasipolynomial* cofactor M(x,y) of y-degree ≤ m−1 with series
//! coefficients, obtained by dividing Q − g′·P by y − g.  The two notions
//! meet in the diagnostics at the bottom of this module: a polynomial M
//! forces g rational unless the trajectory equation is linear, and M's
//! polydromy order must match g's in the nonlinear case.

use thiserror::Error;

use crate::minpoly::rational_form;
use crate::newton::{is_particular_solution, SolutionCheckError};
use crate::poly::{BivarPoly, PolyError, Var};
use crate::ratfunc::RationalFunction;
use crate::series::PuiseuxSeries;
use crate::seriespoly::SeriesPoly;
use crate::system::PlanarSystem;

/// An invariant algebraic curve together with its polynomial cofactor;
/// only constructed through [`curve_cofactor`], so X(f) = k·f holds by
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveWithCofactor {
    f: BivarPoly,
    k: BivarPoly,
}

impl CurveWithCofactor {
    pub fn curve(&self) -> &BivarPoly {
        &self.f
    }

    pub fn cofactor(&self) -> &BivarPoly {
        &self.k
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CofactorError {
    #[error("the curve is not invariant; division left remainder {remainder}")]
    NotInvariant { remainder: BivarPoly },
    #[error("the series is not a particular solution (first residual exponent {residual:?})")]
    NotAParticularSolution { residual: Option<(i64, u32)> },
    #[error(transparent)]
    Check(#[from] SolutionCheckError),
    #[error("no rational solution is consistent with the given cofactor")]
    Inconsistent,
}

/// Divides X(f) by f; failure means f is not invariant and the division
/// remainder is handed back as the witness.
pub fn curve_cofactor(f: &BivarPoly, sys: &PlanarSystem) -> Result<CurveWithCofactor, CofactorError> {
    assert!(!f.is_constant(), "constants are not curves");
    let xf = sys.apply(f);
    let k = xf.divide_exact(f).map_err(|PolyError::NotDivisible { remainder }| {
        CofactorError::NotInvariant { remainder }
    })?;
    debug_assert!(k.total_degree().is_none_or(|dk| dk + 1 <= sys.degree()));
    Ok(CurveWithCofactor { f: f.clone(), k })
}

/// Cofactor of a particular solution y = g(x): the y-coefficients
/// k_0(x) … k_{m−1}(x) of M = (Q − g′·P)/(y − g), carried as certified
/// series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiCofactor {
    coeffs: Vec<PuiseuxSeries>,
}

impl QuasiCofactor {
    pub(crate) fn from_coeffs(coeffs: Vec<PuiseuxSeries>) -> Self {
        QuasiCofactor { coeffs }
    }

    pub fn coeffs(&self) -> &[PuiseuxSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> PuiseuxSeries {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| PuiseuxSeries::zero(PuiseuxSeries::EXACT))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero_to_trunc())
    }

    /// lcm of the coefficient polydromies: the polydromy order of M.
    pub fn polydromy(&self) -> u32 {
        self.coeffs
            .iter()
            .filter(|c| !c.is_zero_to_trunc())
            .fold(1u32, |acc, c| {
                let n = c.polydromy();
                acc / gcd_u32(acc, n) * n
            })
    }

    /// Exact rational recognition of each coefficient, where certifiable.
    pub fn rational_coeffs(&self, max_deg: u32) -> Vec<Option<RationalFunction>> {
        self.coeffs.iter().map(|c| rational_form(c, max_deg)).collect()
    }
}

impl std::fmt::Display for QuasiCofactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        SeriesPoly::new(self.coeffs.clone()).fmt(f)
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

/// Synthetic division (Q − g′·P) ÷ (y − g).  The division remainder is
/// exactly the trajectory residual, so it vanishes precisely when g is a
/// particular solution; the quotient is the quasipolynomial cofactor.
pub fn quasipolynomial_cofactor(
    g: &PuiseuxSeries,
    sys: &PlanarSystem,
) -> Result<QuasiCofactor, CofactorError> {
    let verdict = is_particular_solution(g, sys)?;
    if !verdict.is_solution {
        return Err(CofactorError::NotAParticularSolution { residual: verdict.residual_order });
    }
    let num = &SeriesPoly::from_poly(sys.q())
        - &SeriesPoly::from_poly(sys.p()).scale_series(&g.derivative());
    let den = SeriesPoly::new(vec![
        -g.clone(),
        PuiseuxSeries::constant(crate::gaussian::GaussianRational::one(), PuiseuxSeries::EXACT),
    ]);
    let (quo, rem) = num.divrem(&den).expect("monic divisor");
    debug_assert!(rem.is_zero_to_trunc(), "remainder is the trajectory residual");
    let m = sys.y_degree() as usize;
    debug_assert!(quo.degree().is_none_or(|dq| dq + 1 <= m.max(1)));
    let mut coeffs = quo.coeffs().to_vec();
    coeffs.resize(m.max(1), PuiseuxSeries::zero(PuiseuxSeries::EXACT));
    Ok(QuasiCofactor { coeffs })
}

/// The substitution y = 1/z followed by the minimal time rescaling z^e
/// that clears denominators.
#[derive(Debug, Clone)]
pub struct YInversion {
    pub system: PlanarSystem,
    /// The power of z both components were multiplied by.
    pub z_power: u32,
}

pub fn invert_y(sys: &PlanarSystem) -> YInversion {
    let dp = sys.p().degree(Var::Y).unwrap_or(0);
    let dq = sys.q().degree(Var::Y).unwrap_or(0);
    let e = dp.max(dq.saturating_sub(2));
    let p_star = reverse_y(sys.p(), e);
    let q_star = -&reverse_y(sys.q(), e + 2);
    YInversion {
        system: PlanarSystem::new(p_star, q_star)
            .expect("y-inversion of a well-formed system is well-formed"),
        z_power: e,
    }
}

/// z^shift·f(x, 1/z): each y-power j becomes z^{shift−j}.
fn reverse_y(f: &BivarPoly, shift: u32) -> BivarPoly {
    BivarPoly::from_map(
        f.terms()
            .map(|(m, c)| {
                (crate::poly::Monomial { dx: m.dx, dy: shift - m.dy }, c.clone())
            })
            .collect(),
    )
}

/// Conclusion of the polynomial-cofactor analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum RationalSolution {
    /// The solution the cofactor belongs to, reconstructed as an exact
    /// rational function and re-verified against the trajectory equation.
    Solution(RationalFunction),
    /// The eliminations all degenerate: the system is equivalent to a
    /// linear equation ẋ = L1(x), ẏ = y + L0(x), where non-rational
    /// solutions with polynomial cofactors genuinely occur.
    LinearEquation,
}

/// Given a *polynomial* quasicofactor M of some particular solution of a
/// system, recovers that solution as a rational function — or detects the
/// linear-equation shape where the conclusion fails.
pub fn rational_solution_from_cofactor(
    m_poly: &BivarPoly,
    sys: &PlanarSystem,
) -> Result<RationalSolution, CofactorError> {
    let m = sys.y_degree() as usize;
    assert!(
        m_poly.degree(Var::Y).map_or(0, |d| d as usize) < m.max(1),
        "cofactor degree must stay below the system's y-degree"
    );
    let rf = |p: &BivarPoly| RationalFunction::from_poly(p.clone());
    let k: Vec<RationalFunction> = {
        let mut v: Vec<RationalFunction> =
            m_poly.coefficients_wrt(Var::Y).iter().map(rf).collect();
        v.resize(m.max(1), RationalFunction::zero());
        v
    };
    let p: Vec<RationalFunction> = sys.p_coeffs().iter().map(rf).collect();
    let q: Vec<RationalFunction> = sys.q_coeffs().iter().map(rf).collect();
    // k_{j−1} with the convention k_{−1} = 0.
    let k_prev = |j: usize| if j == 0 { RationalFunction::zero() } else { k[j - 1].clone() };

    let mut candidates: Vec<RationalFunction> = Vec::new();
    for j in 1..m {
        let den = &(&k[0] * &p[j]) - &(&p[0] * &k[j]);
        if !den.is_zero() {
            let num = &(&(&p[0] * &q[j]) - &(&q[0] * &p[j])) - &(&p[0] * &k_prev(j));
            candidates.push(&num / &den);
        }
    }
    if m >= 1 {
        let den = &p[m] * &k[0];
        if !den.is_zero() {
            let num = &(&p[0] * &(&q[m] - &k[m - 1])) - &(&p[m] * &q[0]);
            candidates.push(&num / &den);
        }
        for j in 1..m {
            let den = &p[m] * &k[j];
            if !den.is_zero() {
                let num = &(&(&(&q[m] * &p[j]) - &(&p[m] * &q[j])) + &(&p[m] * &k_prev(j)))
                    - &(&k[m - 1] * &p[j]);
                candidates.push(&num / &den);
            }
        }
    }
    let had_candidates = !candidates.is_empty();
    for g in candidates {
        if satisfies_trajectory(&g, sys) {
            return Ok(RationalSolution::Solution(g));
        }
    }
    if had_candidates {
        // Some elimination was nondegenerate yet produced a non-solution:
        // M was not the cofactor of any particular solution.
        return Err(CofactorError::Inconsistent);
    }

    // Every elimination degenerated.  A vanishing cofactor would make
    // y − g a first integral, forcing the linear shape.
    if m_poly.is_zero() {
        return if sys.is_linear_equation() {
            Ok(RationalSolution::LinearEquation)
        } else {
            Err(CofactorError::Inconsistent)
        };
    }
    // Nonzero M: the degenerate branch requires p_m ≡ 0, P = L1·M,
    // q_m = k_{m−1} and Q = (y + L0)·M.
    if !p[m].is_zero() {
        return Err(CofactorError::Inconsistent);
    }
    let Some(j0) = k.iter().position(|kj| !kj.is_zero()) else {
        return Err(CofactorError::Inconsistent);
    };
    let l1 = &p[j0] / &k[j0];
    for j in 0..m {
        if p[j] != &l1 * &k[j] {
            return Err(CofactorError::Inconsistent);
        }
    }
    if q[m] != k[m - 1] {
        return Err(CofactorError::Inconsistent);
    }
    if k[0].is_zero() {
        // q_0 = L0·k_0 has no solution with k_0 ≡ 0 unless the system
        // degenerates to sharing the factor y, which construction forbids.
        return Err(CofactorError::Inconsistent);
    }
    let l0 = &q[0] / &k[0];
    for j in 1..m {
        if q[j] != &(&k[j] * &l0) + &k[j - 1] {
            return Err(CofactorError::Inconsistent);
        }
    }
    Ok(RationalSolution::LinearEquation)
}

/// Exact check of g′ = Q(x,g)/P(x,g) for a rational candidate.
fn satisfies_trajectory(g: &RationalFunction, sys: &PlanarSystem) -> bool {
    let p_at = poly_at_rational(sys.p(), g);
    if p_at.is_zero() {
        return false;
    }
    let q_at = poly_at_rational(sys.q(), g);
    (&q_at - &(&g.partial(Var::X) * &p_at)).is_zero()
}

fn poly_at_rational(f: &BivarPoly, g: &RationalFunction) -> RationalFunction {
    let mut acc = RationalFunction::zero();
    for c in f.coefficients_wrt(Var::Y).iter().rev() {
        acc = &(&acc * g) + &RationalFunction::from_poly(c.clone());
    }
    acc
}

/// Polydromy comparison between a solution and its cofactor: equality is
/// forced for nonlinear trajectory equations; linear ones only guarantee
/// divisibility, and the strict case is flagged as the linear exemption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolydromyVerdict {
    pub solution_polydromy: u32,
    pub cofactor_polydromy: u32,
    pub consistent: bool,
    pub linear_exemption: bool,
}

pub fn polydromy_consistency(
    g: &PuiseuxSeries,
    m: &QuasiCofactor,
    sys: &PlanarSystem,
) -> PolydromyVerdict {
    let nu_g = g.polydromy();
    let nu_m = m.polydromy();
    if sys.is_linear_equation() {
        PolydromyVerdict {
            solution_polydromy: nu_g,
            cofactor_polydromy: nu_m,
            consistent: nu_g % nu_m == 0,
            linear_exemption: nu_m != nu_g,
        }
    } else {
        PolydromyVerdict {
            solution_polydromy: nu_g,
            cofactor_polydromy: nu_m,
            consistent: nu_m == nu_g,
            linear_exemption: false,
        }
    }
}
