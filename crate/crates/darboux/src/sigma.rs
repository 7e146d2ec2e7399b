//! Cofactors assembled from branch data instead of division.
//!
//! A product Φ = h(x)·∏(y − g_ν)^{α_ν}, and more generally the same
//! product times exp{h₂·A₁/A₀} with A₁ = ∏(y − a_k), A₀ = ∏(y − g̃_j),
//! has a quasipolynomial cofactor whose y-coefficients k_j(x) are given
//! by closed formulas in the power sums of the branches.  This module
//! evaluates those formulas directly from a [`SigmaTable`] — the lists of
//! exponents and branches plus the units h (or h₁, h₂) — without ever
//! forming Φ or dividing anything.  Matching the result of
//! [`crate::cofactor::quasipolynomial_cofactor`] summed over branches is
//! the correctness oracle used in the tests.
//!
//! Both formulas come with a compatibility condition on the top
//! y-degree: p_m·(unit)′ must vanish, where p_m is the leading
//! y-coefficient of P and "unit" is h, respectively h₁·exp{h₂}.  When
//! the condition fails no function of the given shape can satisfy
//! X(Φ) = k·Φ with polynomial y-dependence, and the evaluation refuses
//! to proceed.

use thiserror::Error;

use crate::cofactor::QuasiCofactor;
use crate::gaussian::GaussianRational;
use crate::poly::Var;
use crate::ratfunc::{LogDerivativeSpec, RationalFunction};
use crate::series::PuiseuxSeries;
use crate::system::PlanarSystem;

/// Branch/exponent data for a candidate invariant in product form.
///
/// The plain shape is h(x)·∏(y − g_ν)^{α_ν}; the extended shape carries
/// an additional factor exp{h₂(x)·∏(y − a_k)/∏(y − g̃_j)} with both
/// products monic in y.  The units h and h₁ enter every formula only
/// through their logarithmic derivatives, so they are stored as
/// [`LogDerivativeSpec`]s and never need closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaTable {
    alpha: Vec<GaussianRational>,
    g: Vec<PuiseuxSeries>,
    a: Vec<PuiseuxSeries>,
    g_tilde: Vec<PuiseuxSeries>,
    unit: LogDerivativeSpec,
    h2: Option<RationalFunction>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SigmaError {
    /// The exponential part has {r} numerator roots but {s} denominator
    /// roots; the formulas require a balanced quotient.  Invert y first
    /// (see [`crate::cofactor::invert_y`]) to equalise the counts.
    #[error("exponential part is unbalanced ({r} numerator roots vs {s} denominator roots); invert y first")]
    RSMismatch { r: usize, s: usize },
    /// p_m·(unit)′ ≢ 0: the shape cannot be invariant with a
    /// quasipolynomial cofactor, so there is nothing to evaluate.
    #[error("top-degree condition fails: neither the leading coefficient p_m nor the unit derivative vanishes")]
    TopDegreeViolation,
}

/// Which side of the top-degree condition p_m·(unit)′ ≡ 0 holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopDegreeReport {
    /// The leading y-coefficient of P vanishes identically.
    LeadingCoefficientVanishes,
    /// The unit factor is constant: h′ ≡ 0, or h₁·exp{h₂} has zero
    /// logarithmic derivative.
    UnitDerivativeVanishes,
}

impl SigmaTable {
    /// Table for the plain shape h(x)·∏(y − g_ν)^{α_ν}.
    pub fn power_product(
        alpha: Vec<GaussianRational>,
        g: Vec<PuiseuxSeries>,
        unit: LogDerivativeSpec,
    ) -> Self {
        assert_eq!(alpha.len(), g.len(), "one exponent per branch");
        SigmaTable { alpha, g, a: Vec::new(), g_tilde: Vec::new(), unit, h2: None }
    }

    /// Table for the extended shape with the factor
    /// exp{h₂·∏(y − a_k)/∏(y − g̃_j)}.  h₂ must be a function of x alone.
    pub fn with_exponential(
        alpha: Vec<GaussianRational>,
        g: Vec<PuiseuxSeries>,
        a: Vec<PuiseuxSeries>,
        g_tilde: Vec<PuiseuxSeries>,
        h1: LogDerivativeSpec,
        h2: RationalFunction,
    ) -> Self {
        assert_eq!(alpha.len(), g.len(), "one exponent per branch");
        assert!(h2.depends_only_on(Var::X), "h2 must be a function of x");
        SigmaTable { alpha, g, a, g_tilde, unit: h1, h2: Some(h2) }
    }

    pub fn exponents(&self) -> &[GaussianRational] {
        &self.alpha
    }

    pub fn branches(&self) -> &[PuiseuxSeries] {
        &self.g
    }

    pub fn numerator_roots(&self) -> &[PuiseuxSeries] {
        &self.a
    }

    pub fn denominator_roots(&self) -> &[PuiseuxSeries] {
        &self.g_tilde
    }

    pub fn unit(&self) -> &LogDerivativeSpec {
        &self.unit
    }

    pub fn exponential_scale(&self) -> Option<&RationalFunction> {
        self.h2.as_ref()
    }

    /// Logarithmic derivative of the full unit factor: h′/h for the
    /// plain shape, h₁′/h₁ + h₂′ for the extended one.
    pub fn unit_log_derivative(&self) -> RationalFunction {
        match &self.h2 {
            Some(h2) => &self.unit.logderiv + &h2.partial(Var::X),
            None => self.unit.logderiv.clone(),
        }
    }

    /// Weighted power sum σ_κ = Σ_ν α_ν·g_ν^κ.  At κ = 0 this is the
    /// exponent sum Σ α_ν, exactly.
    pub fn sigma(&self, kappa: u32) -> PuiseuxSeries {
        let mut acc = PuiseuxSeries::zero(PuiseuxSeries::EXACT);
        for (alpha, g) in self.alpha.iter().zip(&self.g) {
            let pow = g.powi(kappa as i64).expect("nonnegative power");
            acc = &acc + &pow.scale(alpha);
        }
        acc
    }

    /// The corrected power sum σ̃_κ for the extended shape:
    ///
    /// σ̃_κ = σ_κ + κ·h₂·Σ (−1)^{ε₁+…+ε_r+1}·a₁^{ε₁}···a_r^{ε_r}·g̃₁^{i₁}···g̃_r^{i_r},
    ///
    /// the sum running over all (ε, i) with ε_k ∈ {0,1}, i_j ≥ 0 and
    /// Σε + Σi = κ.  For a table without exponential part (or with
    /// r = 0) this degenerates to σ_κ.
    pub fn sigma_tilde(&self, kappa: u32) -> Result<PuiseuxSeries, SigmaError> {
        let (r, s) = (self.a.len(), self.g_tilde.len());
        if r != s {
            return Err(SigmaError::RSMismatch { r, s });
        }
        let acc = self.sigma(kappa);
        let Some(h2) = &self.h2 else { return Ok(acc) };
        if kappa == 0 || r == 0 {
            return Ok(acc);
        }
        let one = PuiseuxSeries::constant(GaussianRational::one(), PuiseuxSeries::EXACT);
        // g̃_j^i for i = 0..κ, reused across the index sum.
        let gt_pows: Vec<Vec<PuiseuxSeries>> = self
            .g_tilde
            .iter()
            .map(|gt| {
                let mut pows = vec![one.clone()];
                for i in 1..=kappa as usize {
                    pows.push(&pows[i - 1] * gt);
                }
                pows
            })
            .collect();
        let mut inner = PuiseuxSeries::zero(PuiseuxSeries::EXACT);
        for mask in 0u32..(1 << r) {
            let eps = mask.count_ones();
            if eps > kappa {
                continue;
            }
            let sign = if eps % 2 == 1 { 1 } else { -1 };
            let mut base = PuiseuxSeries::constant(
                GaussianRational::from_integer(sign),
                PuiseuxSeries::EXACT,
            );
            for (k, a) in self.a.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    base = &base * a;
                }
            }
            for comp in compositions(kappa - eps, r) {
                let mut term = base.clone();
                for (j, &i) in comp.iter().enumerate() {
                    if i > 0 {
                        term = &term * &gt_pows[j][i as usize];
                    }
                }
                inner = &inner + &term;
            }
        }
        let h2s = h2.to_series_x().expect("h2 is a function of x alone");
        let correction = (&h2s * &inner).scale(&GaussianRational::from_integer(kappa as i64));
        Ok(&acc + &correction)
    }
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative
/// integers.  The counts in play are tiny (total ≤ m, parts = r), so a
/// direct recursion is plenty.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Cofactor of h(x)·∏(y − g_ν)^{α_ν} from its table:
///
/// k_j = p_j·h′/h + Σ_{s=j+1}^{m} (σ_{s−j−1}·q_s − σ′_{s−j}/(s−j)·p_s),
///
/// for j = 0..m−1, subject to p_m·h′ ≡ 0.
pub fn cofactor_from_power_product(
    table: &SigmaTable,
    sys: &PlanarSystem,
) -> Result<(QuasiCofactor, TopDegreeReport), SigmaError> {
    assert!(table.h2.is_none(), "table has an exponential part; use cofactor_from_exponential_form");
    let report = top_degree(sys, &table.unit.logderiv)?;
    let m = sys.y_degree();
    let sig: Vec<PuiseuxSeries> = (0..=m).map(|k| table.sigma(k)).collect();
    Ok((assemble(sys, &table.unit.logderiv, &sig), report))
}

/// Cofactor of h₁·exp{h₂·A₁/A₀}·∏(y − g_ν)^{α_ν} from its table:
/// the same sum with σ̃ in place of σ and the unit term
/// (h₁′/h₁ + h₂′)·p_j, subject to p_m·(h₁′ + h₁h₂′) ≡ 0.  With an
/// empty exponential part this reproduces
/// [`cofactor_from_power_product`] exactly.
pub fn cofactor_from_exponential_form(
    table: &SigmaTable,
    sys: &PlanarSystem,
) -> Result<(QuasiCofactor, TopDegreeReport), SigmaError> {
    let (r, s) = (table.a.len(), table.g_tilde.len());
    if r != s {
        return Err(SigmaError::RSMismatch { r, s });
    }
    let unit_ld = table.unit_log_derivative();
    let report = top_degree(sys, &unit_ld)?;
    let m = sys.y_degree();
    let sig = (0..=m)
        .map(|k| table.sigma_tilde(k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((assemble(sys, &unit_ld, &sig), report))
}

/// Checks p_m·(unit)′ ≡ 0 and reports which factor vanishes; the
/// leading coefficient takes precedence when both do.
fn top_degree(sys: &PlanarSystem, unit_ld: &RationalFunction) -> Result<TopDegreeReport, SigmaError> {
    let m = sys.y_degree() as usize;
    if sys.p_coeffs()[m].is_zero() {
        Ok(TopDegreeReport::LeadingCoefficientVanishes)
    } else if unit_ld.is_zero() {
        Ok(TopDegreeReport::UnitDerivativeVanishes)
    } else {
        Err(SigmaError::TopDegreeViolation)
    }
}

/// The common summation skeleton of both formulas.
fn assemble(sys: &PlanarSystem, unit_ld: &RationalFunction, sig: &[PuiseuxSeries]) -> QuasiCofactor {
    let to_series = |p: &crate::poly::BivarPoly| {
        PuiseuxSeries::from_poly_x(p).expect("y-coefficients of the system are functions of x")
    };
    let p: Vec<PuiseuxSeries> = sys.p_coeffs().iter().map(to_series).collect();
    let q: Vec<PuiseuxSeries> = sys.q_coeffs().iter().map(to_series).collect();
    let ld = unit_ld.to_series_x().expect("unit log-derivative is a function of x");
    let m = sys.y_degree() as usize;
    let mut ks = Vec::with_capacity(m.max(1));
    for j in 0..m {
        let mut k = &p[j] * &ld;
        for i in j + 1..=m {
            let gap = i - j;
            k = &k + &(&sig[gap - 1] * &q[i]);
            let deriv_term =
                (&sig[gap].derivative() * &p[i]).scale(&GaussianRational::from_ratio(1, gap as i64));
            k = &k - &deriv_term;
        }
        ks.push(k);
    }
    if ks.is_empty() {
        ks.push(PuiseuxSeries::zero(PuiseuxSeries::EXACT));
    }
    QuasiCofactor::from_coeffs(ks)
}
