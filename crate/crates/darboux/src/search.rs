//! Undetermined-coefficient searches: invariant algebraic curves by staged
//! leading-form matching, exponential factors by exact kernel computation,
//! and the first integrals / inverse integrating factors assembled from both.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use thiserror::Error;

use crate::cofactor::{curve_cofactor, CofactorError, CurveWithCofactor};
use crate::elim::{solve_system, ParamPoly, SolveNotice};
use crate::gaussian::GaussianRational;
use crate::linalg::{kernel_basis, rref_in_place, solve_affine, Row};
use crate::poly::{gcd_poly, BivarPoly, Monomial, PolyError, Var};
use crate::system::PlanarSystem;
use crate::unipoly::split_linear_roots;

/// Eliminator step budget for one degree stage of the curve search.
const STAGE_BUDGET: usize = 4000;

/// Diagnostics the curve search hands back alongside its results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchNotice {
    /// The direction polynomial of the leading form has a factor of this
    /// degree that does not split over the Gaussian rationals; curves whose
    /// leading form uses those directions are out of reach.
    DirectionsOutsideField { residue_degree: usize },
    /// A branch of the coefficient system at this curve degree was pruned or
    /// finished heuristically; the wrapped notice says how.
    Branch { degree: u32, notice: SolveNotice },
}

/// Invariant curves found up to the requested degree, plus diagnostics.
#[derive(Debug, Clone)]
pub struct CurveSearch {
    pub curves: Vec<CurveWithCofactor>,
    pub notices: Vec<SearchNotice>,
}

/// All monomials of total degree ≤ `bound`, in graded order.
fn monomials_up_to(bound: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for total in 0..=bound {
        for dy in 0..=total {
            out.push(Monomial { dx: total - dy, dy });
        }
    }
    out
}

fn homogeneous_part(p: &BivarPoly, degree: u32) -> BivarPoly {
    BivarPoly::from_map(
        p.terms()
            .filter(|(m, _)| m.total() == degree)
            .map(|(m, c)| (*m, c.clone()))
            .collect(),
    )
}

/// y·P_d − x·Q_d.  On the ray y = cx this form equals −x·(leading part of X
/// applied to y − cx), so its projective roots are exactly the directions a
/// leading form of an invariant curve can be built from.  Identically zero
/// means the leading part is radial and every direction is admissible.
fn direction_form(sys: &PlanarSystem) -> BivarPoly {
    let d = sys.degree();
    let pd = homogeneous_part(sys.p(), d);
    let qd = homogeneous_part(sys.q(), d);
    &(&BivarPoly::y() * &pd) - &(&BivarPoly::x() * &qd)
}

/// Linear forms dividing the direction form, plus the degree of whatever
/// residue refused to split over ℚ(i).
fn directions(dir: &BivarPoly) -> (Vec<BivarPoly>, Option<usize>) {
    let full = dir.total_degree().expect("direction form is nonzero here");
    let mut forms = Vec::new();
    if dir.coeff(0, full).is_zero() {
        forms.push(BivarPoly::x());
    }
    let slopes = dir.compose_wrt(Var::X, &BivarPoly::one());
    let uni = slopes.to_unipoly(Var::Y).expect("x was substituted away");
    let (_, roots, residue) = split_linear_roots(&uni);
    for (c, _) in roots {
        forms.push(&BivarPoly::y() - &BivarPoly::x().scale(&c));
    }
    let missed = residue.degree().filter(|&e| e > 0);
    (forms, missed)
}

/// Products of `n` direction forms, with repetition, each a candidate
/// leading form.
fn direction_products(forms: &[BivarPoly], n: u32) -> Vec<BivarPoly> {
    fn rec(forms: &[BivarPoly], start: usize, left: u32, acc: &BivarPoly, out: &mut Vec<BivarPoly>) {
        if left == 0 {
            out.push(acc.clone());
            return;
        }
        for i in start..forms.len() {
            rec(forms, i, left - 1, &(acc * &forms[i]), out);
        }
    }
    let mut out = Vec::new();
    rec(forms, 0, n, &BivarPoly::one(), &mut out);
    out
}

struct Stage {
    candidates: Vec<BivarPoly>,
    notices: Vec<SolveNotice>,
}

fn add_terms(
    eqs: &mut BTreeMap<Monomial, ParamPoly>,
    arity: usize,
    poly: &BivarPoly,
    weight: &ParamPoly,
) {
    for (m, c) in poly.terms() {
        let entry = eqs
            .entry(*m)
            .or_insert_with(|| ParamPoly::zero(arity));
        *entry = &*entry + &weight.scale(c);
    }
}

/// Builds one stage's equations and sweeps out the cofactor tail.  `top` is
/// the fixed leading form of f (zero for the dense/radial fallback) and
/// `k_top` the matching leading part of the cofactor; the unknowns are the
/// remaining coefficients of f and k.  The only nonlinearity is the product
/// of the two unknown tails.
fn stage_equations(
    sys: &PlanarSystem,
    top: &BivarPoly,
    k_top: &BivarPoly,
    f_monos: &[Monomial],
    k_monos: &[Monomial],
) -> (usize, Vec<ParamPoly>) {
    let arity = f_monos.len() + k_monos.len();
    let mut eqs: BTreeMap<Monomial, ParamPoly> = BTreeMap::new();

    let known = &sys.apply(top) - &(k_top * top);
    add_terms(&mut eqs, arity, &known, &ParamPoly::constant(arity, GaussianRational::one()));

    for (idx, m) in f_monos.iter().enumerate() {
        let mono = BivarPoly::monomial(GaussianRational::one(), m.dx, m.dy);
        let col = &sys.apply(&mono) - &(k_top * &mono);
        add_terms(&mut eqs, arity, &col, &ParamPoly::var(arity, idx));
        for (jdx, mk) in k_monos.iter().enumerate() {
            let cross = -&mono.mul_monomial(mk.dx, mk.dy);
            let weight = &ParamPoly::var(arity, idx) * &ParamPoly::var(arity, f_monos.len() + jdx);
            add_terms(&mut eqs, arity, &cross, &weight);
        }
    }
    for (jdx, mk) in k_monos.iter().enumerate() {
        let shifted = -&top.mul_monomial(mk.dx, mk.dy);
        add_terms(&mut eqs, arity, &shifted, &ParamPoly::var(arity, f_monos.len() + jdx));
    }

    // Quotient sweep.  Each cofactor-tail unknown enters its introducing
    // slice through −top·mono with a constant coefficient, so eliminate
    // those unknowns from the highest slice down; the substituted values
    // are polynomials in the f unknowns of slowly growing degree.  What
    // survives is (mostly) a small system in f's coefficients alone —
    // handing the eliminator the raw bilinear system instead makes its
    // pivot chains swell.
    let mut eq_list: Vec<(Monomial, ParamPoly)> = eqs.into_iter().collect();
    eq_list.sort_by(|x, y| y.0.cmp(&x.0));
    for idx in 0..eq_list.len() {
        let pivot = (f_monos.len()..arity).find_map(|v| {
            let e = &eq_list[idx].1;
            if e.degree_in(v) != 1 {
                return None;
            }
            let cs = e.coeffs_in(v);
            let c = cs[1].as_constant()?;
            if c.is_zero() {
                return None;
            }
            Some((v, cs[0].scale(&(-&c.inv()))))
        });
        let Some((v, value)) = pivot else { continue };
        for (_, e) in eq_list.iter_mut() {
            if e.uses(v) {
                *e = e.subst(v, &value);
            }
        }
    }
    let residual = eq_list.into_iter().map(|(_, e)| e).filter(|e| !e.is_zero()).collect();
    (arity, residual)
}

fn solve_stage(
    sys: &PlanarSystem,
    top: &BivarPoly,
    k_top: &BivarPoly,
    f_monos: &[Monomial],
    k_monos: &[Monomial],
) -> Stage {
    let (arity, residual) = stage_equations(sys, top, k_top, f_monos, k_monos);
    let outcome = solve_system(arity, &residual, STAGE_BUDGET);

    let mut candidates = Vec::new();
    let mut push_candidate = |v: &[GaussianRational]| {
        let mut f = top.clone();
        for (idx, m) in f_monos.iter().enumerate() {
            if !v[idx].is_zero() {
                f = &f + &BivarPoly::monomial(v[idx].clone(), m.dx, m.dy);
            }
        }
        if !f.is_constant() {
            candidates.push(f);
        }
    };
    for p in &outcome.points {
        push_candidate(p);
    }
    for fam in &outcome.families {
        for rep in &fam.representatives {
            push_candidate(rep);
        }
    }
    Stage { candidates, notices: outcome.notices }
}

fn stage_with_top(sys: &PlanarSystem, n: u32, top: &BivarPoly) -> Stage {
    let d = sys.degree();
    let pd = homogeneous_part(sys.p(), d);
    let qd = homogeneous_part(sys.q(), d);
    // The coefficients of total degree n+d−1 force k's leading part to be
    // X_d(top)/top; if that division fails the leading form is unusable.
    let lead = &(&pd * &top.partial(Var::X)) + &(&qd * &top.partial(Var::Y));
    let k_top = match lead.divide_exact(top) {
        Ok(k) => k,
        Err(_) => return Stage { candidates: Vec::new(), notices: Vec::new() },
    };
    let f_monos = monomials_up_to(n - 1);
    let k_monos = if d >= 2 { monomials_up_to(d - 2) } else { Vec::new() };
    solve_stage(sys, top, &k_top, &f_monos, &k_monos)
}

/// Graded comparison of canonical polynomials, used to order search output.
fn poly_cmp(a: &BivarPoly, b: &BivarPoly) -> Ordering {
    a.total_degree()
        .cmp(&b.total_degree())
        .then_with(|| a.num_terms().cmp(&b.num_terms()))
        .then_with(|| {
            for ((ma, ca), (mb, cb)) in a.terms().zip(b.terms()) {
                let ord = ma.cmp(mb).then_with(|| ca.canonical_cmp(cb));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        })
}

/// Finds invariant algebraic curves of degree ≤ `max_degree`.
///
/// The search is staged per degree: admissible leading forms are read off
/// the direction form, the cofactor's leading part follows by exact
/// division, and the remaining coefficients go to the eliminator.  Sound
/// but possibly incomplete — every returned curve is re-verified by
/// division, and branches that escape ℚ(i) or the step budget surface in
/// `notices` instead of being silently guessed at.
pub fn find_invariant_curves(sys: &PlanarSystem, max_degree: u32) -> CurveSearch {
    assert!(max_degree >= 1, "need a positive degree bound");
    let d = sys.degree();
    let mut notices = Vec::new();
    let mut raw: Vec<BivarPoly> = Vec::new();

    let dir = direction_form(sys);
    if dir.is_zero() {
        // Radial leading part: nothing pins the leading form, so run one
        // dense stage at the full bound with f and k entirely unknown.
        let f_monos = monomials_up_to(max_degree);
        let k_monos = if d >= 1 { monomials_up_to(d - 1) } else { Vec::new() };
        let stage = solve_stage(sys, &BivarPoly::zero(), &BivarPoly::zero(), &f_monos, &k_monos);
        raw.extend(stage.candidates);
        notices.extend(
            stage
                .notices
                .into_iter()
                .map(|notice| SearchNotice::Branch { degree: max_degree, notice }),
        );
    } else {
        let (forms, missed) = directions(&dir);
        if let Some(residue_degree) = missed {
            notices.push(SearchNotice::DirectionsOutsideField { residue_degree });
        }
        for n in 1..=max_degree {
            for top in direction_products(&forms, n) {
                let stage = stage_with_top(sys, n, &top);
                raw.extend(stage.candidates);
                notices.extend(
                    stage
                        .notices
                        .into_iter()
                        .map(|notice| SearchNotice::Branch { degree: n, notice }),
                );
            }
        }
    }

    let mut curves: Vec<CurveWithCofactor> = Vec::new();
    for f in raw {
        let canon = f.canonical_scaled();
        if let Ok(found) = curve_cofactor(&canon, sys) {
            curves.push(found);
        }
    }
    curves.sort_by(|a, b| poly_cmp(a.curve(), b.curve()));
    curves.dedup_by(|a, b| a.curve() == b.curve());
    CurveSearch { curves, notices }
}

/// exp{h/f0} together with the cofactors that certify it: the denominator's
/// own cofactor k0 and the factor's cofactor k̃, tied together by
/// X(h) = k0·h + k̃·f0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentialFactor {
    h: BivarPoly,
    f0: BivarPoly,
    k0: BivarPoly,
    k_tilde: BivarPoly,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpFactorError {
    #[error("denominator is not an invariant curve (division remainder {remainder})")]
    NotInvariantCurve { remainder: BivarPoly },
    #[error("X(h) - k0*h is not a multiple of the denominator (remainder {remainder})")]
    NotExponential { remainder: BivarPoly },
    #[error("cofactor {cofactor} exceeds the degree bound {bound}")]
    CofactorDegree { cofactor: BivarPoly, bound: u32 },
}

fn denominator_cofactor(sys: &PlanarSystem, f0: &BivarPoly) -> Result<BivarPoly, ExpFactorError> {
    if f0.is_constant() {
        assert!(!f0.is_zero(), "denominator must be nonzero");
        return Ok(BivarPoly::zero());
    }
    match curve_cofactor(f0, sys) {
        Ok(c) => Ok(c.cofactor().clone()),
        Err(CofactorError::NotInvariant { remainder }) => {
            Err(ExpFactorError::NotInvariantCurve { remainder })
        }
        Err(_) => unreachable!("curve division fails only with a remainder"),
    }
}

impl ExponentialFactor {
    /// Replays the defining identity by exact division; the only way to
    /// construct the type, so every value carries a checked certificate.
    pub fn verified(sys: &PlanarSystem, h: BivarPoly, f0: BivarPoly) -> Result<Self, ExpFactorError> {
        let k0 = denominator_cofactor(sys, &f0)?;
        let numerator = &sys.apply(&h) - &(&k0 * &h);
        let k_tilde = numerator.divide_exact(&f0).map_err(
            |PolyError::NotDivisible { remainder }| ExpFactorError::NotExponential { remainder },
        )?;
        let bound = sys.degree().saturating_sub(1);
        if k_tilde.total_degree().is_some_and(|deg| deg > bound) {
            return Err(ExpFactorError::CofactorDegree { cofactor: k_tilde, bound });
        }
        Ok(ExponentialFactor { h, f0, k0, k_tilde })
    }

    pub fn h(&self) -> &BivarPoly {
        &self.h
    }

    pub fn denominator(&self) -> &BivarPoly {
        &self.f0
    }

    pub fn denominator_cofactor(&self) -> &BivarPoly {
        &self.k0
    }

    pub fn cofactor(&self) -> &BivarPoly {
        &self.k_tilde
    }
}

fn poly_from_row(coeffs: &[GaussianRational], monos: &[Monomial]) -> BivarPoly {
    let mut p = BivarPoly::zero();
    for (c, m) in coeffs.iter().zip(monos) {
        if !c.is_zero() {
            p = &p + &BivarPoly::monomial(c.clone(), m.dx, m.dy);
        }
    }
    p
}

/// The scalar that `canonical_scaled` would multiply `p` by.
fn canonical_scale_factor(p: &BivarPoly) -> GaussianRational {
    let canon = p.canonical_scaled();
    let (lead, c) = p.leading().expect("polynomial is nonzero");
    &canon.coeff(lead.dx, lead.dy) * &c.inv()
}

/// Exponential factors exp{h/f0} with deg h ≤ `max_h`, as a canonical basis
/// of the solution space of X(h) = k0·h + k̃·f0.
///
/// Numerators of the form f0·w solve the identity for free — exp{f0·w/f0}
/// is exp{w}, which belongs to the denominator-1 search — so the kernel is
/// reduced modulo that span before being reported.  For a constant f0 only
/// the constant shift is trivial.
pub fn find_exponential_factors(
    sys: &PlanarSystem,
    f0: &BivarPoly,
    max_h: u32,
) -> Result<Vec<ExponentialFactor>, ExpFactorError> {
    let k0 = denominator_cofactor(sys, f0)?;
    let d = sys.degree();
    let h_monos = monomials_up_to(max_h);
    let k_monos = if d >= 1 { monomials_up_to(d - 1) } else { Vec::new() };
    let ncols = h_monos.len() + k_monos.len();
    let h_index: BTreeMap<Monomial, usize> =
        h_monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let k_index: BTreeMap<Monomial, usize> =
        k_monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();

    let mut rows: BTreeMap<Monomial, Row> = BTreeMap::new();
    let put = |rows: &mut BTreeMap<Monomial, Row>, poly: &BivarPoly, col: usize| {
        for (m, c) in poly.terms() {
            let row = rows
                .entry(*m)
                .or_insert_with(|| vec![GaussianRational::zero(); ncols]);
            row[col] = &row[col] + c;
        }
    };
    for (idx, m) in h_monos.iter().enumerate() {
        let mono = BivarPoly::monomial(GaussianRational::one(), m.dx, m.dy);
        let col_poly = &sys.apply(&mono) - &(&k0 * &mono);
        put(&mut rows, &col_poly, idx);
    }
    for (jdx, m) in k_monos.iter().enumerate() {
        let col_poly = -&f0.mul_monomial(m.dx, m.dy);
        put(&mut rows, &col_poly, h_monos.len() + jdx);
    }
    let matrix: Vec<Row> = rows.into_values().collect();
    let kernel = kernel_basis(&matrix, ncols);

    let mut trivial: Vec<Row> = Vec::new();
    let w_bound = if f0.is_constant() {
        Some(0)
    } else {
        max_h.checked_sub(f0.total_degree().expect("nonconstant"))
    };
    if let Some(w_bound) = w_bound {
        for w in monomials_up_to(w_bound) {
            let wp = BivarPoly::monomial(GaussianRational::one(), w.dx, w.dy);
            let shift_h = f0 * &wp;
            let shift_k = sys.apply(&wp);
            if shift_k.total_degree().is_some_and(|deg| deg + 1 > d) {
                continue; // X(w) leaves the cofactor space; not a solution
            }
            let mut v = vec![GaussianRational::zero(); ncols];
            for (m, c) in shift_h.terms() {
                v[h_index[m]] = c.clone();
            }
            for (m, c) in shift_k.terms() {
                v[h_monos.len() + k_index[m]] = c.clone();
            }
            trivial.push(v);
        }
    }
    let trivial_pivots = rref_in_place(&mut trivial);

    let mut reduced: Vec<Row> = Vec::new();
    for mut v in kernel {
        for (row, &p) in trivial.iter().zip(&trivial_pivots) {
            let c = v[p].clone();
            if c.is_zero() {
                continue;
            }
            for (vi, ri) in v.iter_mut().zip(row) {
                *vi = &*vi - &(&c * ri);
            }
        }
        if v.iter().any(|c| !c.is_zero()) {
            reduced.push(v);
        }
    }
    rref_in_place(&mut reduced);

    let mut out = Vec::new();
    for row in &reduced {
        if row.iter().all(GaussianRational::is_zero) {
            continue;
        }
        let h = poly_from_row(&row[..h_monos.len()], &h_monos);
        debug_assert!(!h.is_zero(), "a kernel vector with h = 0 forces k = 0");
        let h = h.scale(&canonical_scale_factor(&h));
        match ExponentialFactor::verified(sys, h, f0.clone()) {
            Ok(e) => out.push(e),
            Err(e) => debug_assert!(false, "kernel row failed re-verification: {e}"),
        }
    }
    Ok(out)
}

/// How a Darboux function relates to the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    FirstIntegral,
    IntegratingFactorInverse,
    GeneralInvariant,
}

/// ∏ f_i^{λ_i} · exp{h/f0} with its cofactor Σ λ_i·k_i + k̃ recorded; the
/// identity is checked at assembly and can be replayed via [`Self::verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DarbouxFunction {
    factors: Vec<(BivarPoly, GaussianRational)>,
    exp_part: Option<(BivarPoly, BivarPoly)>,
    role: Role,
    cofactor: BivarPoly,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DarbouxCheckError {
    #[error(transparent)]
    Curve(#[from] CofactorError),
    #[error(transparent)]
    Exponential(#[from] ExpFactorError),
    #[error("cofactor sum {derived} does not match the claimed {claimed}")]
    CofactorMismatch { derived: BivarPoly, claimed: BivarPoly },
}

impl DarbouxFunction {
    /// Assembles ∏ f_i^{λ_i}·exp{h/f0} from scratch, deriving the cofactor
    /// sum and classifying the role from it (zero → first integral, equal to
    /// the divergence → inverse integrating factor).
    pub fn from_parts(
        sys: &PlanarSystem,
        factors: Vec<(BivarPoly, GaussianRational)>,
        exp_part: Option<(BivarPoly, BivarPoly)>,
    ) -> Result<Self, DarbouxCheckError> {
        let mut sum = BivarPoly::zero();
        for (f, lam) in &factors {
            let c = curve_cofactor(f, sys)?;
            sum = &sum + &c.cofactor().scale(lam);
        }
        if let Some((h, f0)) = &exp_part {
            let e = ExponentialFactor::verified(sys, h.clone(), f0.clone())?;
            sum = &sum + e.cofactor();
        }
        let role = if sum.is_zero() {
            Role::FirstIntegral
        } else if sum == sys.divergence() {
            Role::IntegratingFactorInverse
        } else {
            Role::GeneralInvariant
        };
        Ok(DarbouxFunction { factors, exp_part, role, cofactor: sum })
    }

    pub fn factors(&self) -> &[(BivarPoly, GaussianRational)] {
        &self.factors
    }

    pub fn exp_part(&self) -> Option<&(BivarPoly, BivarPoly)> {
        self.exp_part.as_ref()
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn cofactor(&self) -> &BivarPoly {
        &self.cofactor
    }

    /// True when the function is a bare rational function: integer exponents
    /// and no exponential part.
    pub fn is_rational(&self) -> bool {
        self.exp_part.is_none() && self.factors.iter().all(|(_, lam)| lam.is_integer())
    }

    /// Re-derives every member cofactor by division and checks that the
    /// weighted sum reproduces the claimed cofactor.
    pub fn verify(&self, sys: &PlanarSystem) -> Result<(), DarbouxCheckError> {
        let mut sum = BivarPoly::zero();
        for (f, lam) in &self.factors {
            let c = curve_cofactor(f, sys)?;
            sum = &sum + &c.cofactor().scale(lam);
        }
        if let Some((h, f0)) = &self.exp_part {
            let e = ExponentialFactor::verified(sys, h.clone(), f0.clone())?;
            sum = &sum + e.cofactor();
        }
        if sum == self.cofactor {
            Ok(())
        } else {
            Err(DarbouxCheckError::CofactorMismatch {
                derived: sum,
                claimed: self.cofactor.clone(),
            })
        }
    }
}

/// Scales an exponent vector to coprime integer entries with the first
/// nonzero entry positive (by real part, then imaginary part).
fn normalize_exponents(v: &mut [GaussianRational]) {
    let mut lcm_den = BigInt::one();
    for g in v.iter() {
        lcm_den = lcm_den.lcm(g.re().denom());
        lcm_den = lcm_den.lcm(g.im().denom());
    }
    let mut content = BigInt::zero();
    let scaled: Vec<GaussianRational> = v
        .iter()
        .map(|g| g * &GaussianRational::from_real(BigRational::from(lcm_den.clone())))
        .collect();
    for g in &scaled {
        content = content.gcd(g.re().numer());
        content = content.gcd(g.im().numer());
    }
    if content.is_zero() {
        return;
    }
    let scale = GaussianRational::from_real(BigRational::new(lcm_den, content));
    for g in v.iter_mut() {
        *g = &*g * &scale;
    }
    let flip = v.iter().find(|g| !g.is_zero()).is_some_and(|g| {
        g.re().is_negative() || (g.re().is_zero() && g.im().is_negative())
    });
    if flip {
        for g in v.iter_mut() {
            *g = -&*g;
        }
    }
}

/// Folds exponential parts μ_j·h_j/f0_j into a single reduced h/f0.
fn combine_exponentials(parts: &[(BivarPoly, BivarPoly)]) -> Option<(BivarPoly, BivarPoly)> {
    let (first, rest) = parts.split_first()?;
    let (mut num, mut den) = first.clone();
    for (h, f0) in rest {
        num = &(&num * f0) + &(h * &den);
        den = &den * f0;
        let g = gcd_poly(&num, &den);
        if g.total_degree().is_some_and(|t| t > 0) {
            num = num.divide_exact(&g).expect("gcd divides both");
            den = den.divide_exact(&g).expect("gcd divides both");
        }
    }
    Some((num, den))
}

fn assemble(
    curves: &[CurveWithCofactor],
    exp_factors: &[ExponentialFactor],
    v: &[GaussianRational],
    cofactor: BivarPoly,
    role: Role,
) -> DarbouxFunction {
    let mut factors = Vec::new();
    for (c, lam) in curves.iter().zip(v) {
        if !lam.is_zero() {
            factors.push((c.curve().clone(), lam.clone()));
        }
    }
    let mut exp_parts: Vec<(BivarPoly, BivarPoly)> = Vec::new();
    for (e, mu) in exp_factors.iter().zip(&v[curves.len()..]) {
        if !mu.is_zero() {
            exp_parts.push((e.h().scale(mu), e.denominator().clone()));
        }
    }
    DarbouxFunction {
        factors,
        exp_part: combine_exponentials(&exp_parts),
        role,
        cofactor,
    }
}

/// Coefficient matrix of Σ λ_i·k_i + Σ μ_j·k̃_j over the monomials of the
/// member cofactors (and of `extra`, whose coefficients land in the rhs).
fn cofactor_matrix(
    curves: &[CurveWithCofactor],
    exp_factors: &[ExponentialFactor],
    extra: &BivarPoly,
) -> (Vec<Row>, Vec<GaussianRational>) {
    let cofs: Vec<&BivarPoly> = curves
        .iter()
        .map(CurveWithCofactor::cofactor)
        .chain(exp_factors.iter().map(ExponentialFactor::cofactor))
        .collect();
    let mut monos: Vec<Monomial> = Vec::new();
    for p in cofs.iter().copied().chain(std::iter::once(extra)) {
        for (m, _) in p.terms() {
            monos.push(*m);
        }
    }
    monos.sort();
    monos.dedup();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for m in monos {
        rows.push(cofs.iter().map(|k| k.coeff(m.dx, m.dy)).collect());
        rhs.push(extra.coeff(m.dx, m.dy));
    }
    if rows.is_empty() {
        // All member cofactors (and `extra`) vanish: keep the system
        // well-formed with a single trivial equation over every column.
        rows.push(vec![GaussianRational::zero(); cofs.len()]);
        rhs.push(GaussianRational::zero());
    }
    (rows, rhs)
}

/// Basis of exponent vectors with Σ λ_i·k_i + Σ μ_j·k̃_j = 0, as Darboux
/// functions with cofactor 0.
pub fn find_first_integral(
    sys: &PlanarSystem,
    curves: &[CurveWithCofactor],
    exp_factors: &[ExponentialFactor],
) -> Vec<DarbouxFunction> {
    let ncols = curves.len() + exp_factors.len();
    if ncols == 0 {
        return Vec::new();
    }
    let (rows, _) = cofactor_matrix(curves, exp_factors, &BivarPoly::zero());
    let basis = kernel_basis(&rows, ncols);
    let mut out = Vec::new();
    for mut v in basis {
        normalize_exponents(&mut v);
        let df = assemble(curves, exp_factors, &v, BivarPoly::zero(), Role::FirstIntegral);
        debug_assert!(df.verify(sys).is_ok());
        out.push(df);
    }
    out
}

/// Largest |entry| of an exponent vector, used to pick a small representative.
fn max_norm(v: &[GaussianRational]) -> BigRational {
    v.iter()
        .map(GaussianRational::norm)
        .max()
        .unwrap_or_else(|| BigRational::from(BigInt::zero()))
}

/// The affine solution set `particular + span(homogeneous)` usually has a
/// representative with small integer entries; for a one-dimensional span,
/// scan for it.  Falls back to the canonical particular solution.
fn integer_representative(particular: Row, homogeneous: &[Row]) -> Row {
    let all_int = |v: &Row| v.iter().all(GaussianRational::is_integer);
    if homogeneous.len() != 1 {
        return particular;
    }
    let u = &homogeneous[0];
    let mut q = BigInt::one();
    for g in particular.iter().chain(u) {
        q = q.lcm(g.re().denom());
        q = q.lcm(g.im().denom());
    }
    if q > BigInt::from(64) {
        return particular;
    }
    let mut best: Option<Row> = None;
    let steps: i64 = 8 * q.to_string().parse::<i64>().unwrap_or(1);
    for s in -steps..=steps {
        let t = GaussianRational::new(
            BigRational::new(BigInt::from(s), q.clone()),
            BigRational::from(BigInt::zero()),
        );
        let cand: Row = particular
            .iter()
            .zip(u)
            .map(|(p, ui)| p + &(&t * ui))
            .collect();
        if !all_int(&cand) {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => match max_norm(&cand).cmp(&max_norm(b)) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => {
                    let mut ord = Ordering::Equal;
                    for (c, b) in cand.iter().zip(b) {
                        ord = c.canonical_cmp(b);
                        if ord != Ordering::Equal {
                            break;
                        }
                    }
                    ord == Ordering::Greater
                }
            },
        };
        if better {
            best = Some(cand);
        }
    }
    best.unwrap_or(particular)
}

/// Exponent vectors with Σ λ_i·k_i + Σ μ_j·k̃_j = div(P,Q): each solution V
/// satisfies X(V) = div·V, so 1/V is an integrating factor.  On a
/// divergence-free system the whole first-integral space doubles as inverse
/// integrating factors and is reported alongside the constant solution.
pub fn find_inverse_integrating_factor(
    sys: &PlanarSystem,
    curves: &[CurveWithCofactor],
    exp_factors: &[ExponentialFactor],
) -> Vec<DarbouxFunction> {
    let div = sys.divergence();
    let ncols = curves.len() + exp_factors.len();
    if ncols == 0 {
        return if div.is_zero() {
            vec![DarbouxFunction {
                factors: Vec::new(),
                exp_part: None,
                role: Role::IntegratingFactorInverse,
                cofactor: div,
            }]
        } else {
            Vec::new()
        };
    }
    let (rows, rhs) = cofactor_matrix(curves, exp_factors, &div);
    let Some((particular, homogeneous)) = solve_affine(&rows, &rhs) else {
        return Vec::new();
    };
    let base_is_zero = particular.iter().all(GaussianRational::is_zero);
    let rep = integer_representative(particular, &homogeneous);
    let mut out = vec![assemble(curves, exp_factors, &rep, div.clone(), Role::IntegratingFactorInverse)];
    if base_is_zero {
        for u in &homogeneous {
            let mut w = u.clone();
            normalize_exponents(&mut w);
            out.push(assemble(curves, exp_factors, &w, div.clone(), Role::IntegratingFactorInverse));
        }
    }
    for df in &out {
        debug_assert!(df.verify(sys).is_ok());
    }
    out
}

/// f·f̄ — the real curve carried by a complex one; its cofactor is k + k̄.
pub fn realify(f: &BivarPoly) -> BivarPoly {
    f * &f.conj()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;

    fn poly(s: &str) -> BivarPoly {
        parse_polynomial(s).unwrap()
    }

    fn sys(p: &str, q: &str) -> PlanarSystem {
        PlanarSystem::new(poly(p), poly(q)).unwrap()
    }

    fn quintic() -> PlanarSystem {
        sys(
            "-5 - 5*x + 15*y^2 - 6*x^2*y + 14*x*y^2 - 9*x*y^4",
            "5 + 2*x - 3*y - 2*x*y^2 + 6*y^3 - 3*y^5",
        )
    }

    fn cubic() -> PlanarSystem {
        sys("2*x + 2*x^2 + y + x*y + 2*x^2*y + y^3", "y + x*y + x*y^2")
    }

    fn circle_cubic() -> PlanarSystem {
        sys("y + y^2 + x^2 + 4*y*x^2", "-x - 2*x^3 + 2*x*y^2")
    }

    fn int(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    #[test]
    fn degree_three_curves_of_the_quintic() {
        let search = find_invariant_curves(&quintic(), 3);
        let f1 = poly("y^3 - y - x");
        let f2 = poly("x*y^2 - x - 1");
        let c1 = search.curves.iter().find(|c| *c.curve() == f1).expect("cubic in y");
        let c2 = search.curves.iter().find(|c| *c.curve() == f2).expect("mixed cubic");
        assert_eq!(*c1.cofactor(), poly("-3 - 6*x*y + 12*y^2 - 9*y^4"));
        // 3·k2 = 5·k1, so f1^5·f2^{-3} will be a first integral.
        assert_eq!(c2.cofactor().scale(&int(3)), c1.cofactor().scale(&int(5)));
    }

    #[test]
    fn the_cubic_keeps_its_invariant_line() {
        let search = find_invariant_curves(&cubic(), 1);
        let line = search
            .curves
            .iter()
            .find(|c| *c.curve() == poly("y"))
            .expect("the line y = 0");
        assert_eq!(*line.cofactor(), poly("1 + x + x*y"));
    }

    #[test]
    fn radial_field_families() {
        let search = find_invariant_curves(&sys("x", "y"), 2);
        let get = |s: &str| {
            search
                .curves
                .iter()
                .find(|c| *c.curve() == poly(s))
                .unwrap_or_else(|| panic!("missing {s}"))
        };
        let (kx, ky, kxy) = (get("x").cofactor(), get("y").cofactor(), get("x*y").cofactor());
        assert_eq!(*kxy, kx + ky);
    }

    #[test]
    fn directions_outside_the_field_are_flagged() {
        // y·y − x·2x = y² − 2x²: slopes ±√2 are not Gaussian rationals.
        let search = find_invariant_curves(&sys("y", "2*x"), 1);
        assert!(search.curves.is_empty());
        assert!(search
            .notices
            .iter()
            .any(|n| matches!(n, SearchNotice::DirectionsOutsideField { residue_degree: 2 })));
    }

    #[test]
    fn exponential_factor_of_the_cubic() {
        let found = find_exponential_factors(&cubic(), &poly("y^2"), 2).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(*found[0].h(), poly("x + y"));
        assert_eq!(*found[0].cofactor(), poly("y - x"));
        assert_eq!(*found[0].denominator_cofactor(), poly("2 + 2*x + 2*x*y"));
    }

    #[test]
    fn exponential_factor_on_the_circle() {
        let found = find_exponential_factors(&circle_cubic(), &poly("x^2 + y^2"), 1).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(*found[0].h(), poly("2*y - 1"));
        assert_eq!(*found[0].cofactor(), poly("-4*x"));
    }

    #[test]
    fn polynomial_exponents_over_a_unit_denominator() {
        // On ẋ = 1, ẏ = y the factor exp{x} has cofactor 1; the constant
        // numerator is quotiented away as a scalar.
        let found = find_exponential_factors(&sys("1", "y"), &BivarPoly::one(), 1).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(*found[0].h(), poly("x"));
        assert_eq!(*found[0].cofactor(), BivarPoly::one());
    }

    #[test]
    fn shifted_numerators_collapse() {
        // Raising the bound must not re-introduce h + c·f0·w copies.
        let found = find_exponential_factors(&cubic(), &poly("y^2"), 3).unwrap();
        assert!(found.iter().any(|e| *e.h() == poly("x + y")));
        for e in &found {
            assert!(e.h().coeff(0, 2).is_zero(), "y² shift survived in {}", e.h());
        }
    }

    #[test]
    fn bad_denominator_is_rejected() {
        let err = find_exponential_factors(&cubic(), &poly("y - 1"), 1).unwrap_err();
        assert!(matches!(err, ExpFactorError::NotInvariantCurve { .. }));
    }

    #[test]
    fn no_first_integral_from_one_curve() {
        let s = cubic();
        let members = [curve_cofactor(&poly("y"), &s).unwrap()];
        assert!(find_first_integral(&s, &members, &[]).is_empty());
    }

    #[test]
    fn lambda_line_of_the_quintic() {
        let s = quintic();
        let members = [
            curve_cofactor(&poly("y^3 - y - x"), &s).unwrap(),
            curve_cofactor(&poly("x*y^2 - x - 1"), &s).unwrap(),
        ];
        let integrals = find_first_integral(&s, &members, &[]);
        assert_eq!(integrals.len(), 1);
        let h = &integrals[0];
        assert_eq!(h.role(), Role::FirstIntegral);
        assert!(h.cofactor().is_zero());
        assert_eq!(
            h.factors(),
            &[(poly("y^3 - y - x"), int(5)), (poly("x*y^2 - x - 1"), int(-3))]
        );
        assert!(h.verify(&s).is_ok());
    }

    #[test]
    fn product_members_are_dependent() {
        let s = cubic();
        let members = [
            curve_cofactor(&poly("y"), &s).unwrap(),
            curve_cofactor(&poly("y^2"), &s).unwrap(),
        ];
        let integrals = find_first_integral(&s, &members, &[]);
        assert_eq!(integrals.len(), 1);
        assert_eq!(integrals[0].factors(), &[(poly("y"), int(2)), (poly("y^2"), int(-1))]);
    }

    #[test]
    fn scaling_members_leaves_the_line() {
        let s = quintic();
        let members = [
            curve_cofactor(&poly("7*y^3 - 7*y - 7*x"), &s).unwrap(),
            curve_cofactor(&poly("x*y^2 - x - 1"), &s).unwrap(),
        ];
        let integrals = find_first_integral(&s, &members, &[]);
        assert_eq!(integrals.len(), 1);
        let exps: Vec<&GaussianRational> =
            integrals[0].factors().iter().map(|(_, l)| l).collect();
        assert_eq!(exps, [&int(5), &int(-3)]);
    }

    #[test]
    fn circle_inverse_integrating_factor() {
        let s = sys("-y", "x");
        let members = [curve_cofactor(&poly("x^2 + y^2"), &s).unwrap()];
        let inverses = find_inverse_integrating_factor(&s, &members, &[]);
        assert_eq!(inverses.len(), 2);
        assert!(inverses[0].factors().is_empty(), "constant V on a divergence-free system");
        assert_eq!(inverses[1].factors(), &[(poly("x^2 + y^2"), int(1))]);
        for v in &inverses {
            assert_eq!(v.role(), Role::IntegratingFactorInverse);
            assert!(v.is_rational());
        }
        // The same member also spans the first-integral line: both roles hold.
        let integrals = find_first_integral(&s, &members, &[]);
        assert_eq!(integrals.len(), 1);
        assert_eq!(integrals[0].factors(), &[(poly("x^2 + y^2"), int(1))]);
    }

    #[test]
    fn quintic_inverse_factor_is_the_curve_product() {
        let s = quintic();
        let members = [
            curve_cofactor(&poly("y^3 - y - x"), &s).unwrap(),
            curve_cofactor(&poly("x*y^2 - x - 1"), &s).unwrap(),
        ];
        let inverses = find_inverse_integrating_factor(&s, &members, &[]);
        assert_eq!(inverses.len(), 1);
        let v = &inverses[0];
        assert_eq!(
            v.factors(),
            &[(poly("y^3 - y - x"), int(1)), (poly("x*y^2 - x - 1"), int(1))]
        );
        assert!(v.is_rational());
        assert_eq!(*v.cofactor(), s.divergence());
        assert!(v.verify(&s).is_ok());
    }

    #[test]
    fn no_members_no_divergence_gives_constants() {
        let free = find_inverse_integrating_factor(&sys("-y", "x"), &[], &[]);
        assert_eq!(free.len(), 1);
        assert!(free[0].factors().is_empty());
        assert!(find_inverse_integrating_factor(&sys("x", "y"), &[], &[]).is_empty());
    }

    #[test]
    fn explicit_assembly_classifies_roles() {
        let s = quintic();
        let f1 = poly("y^3 - y - x");
        let f2 = poly("x*y^2 - x - 1");
        let first = DarbouxFunction::from_parts(
            &s,
            vec![(f1.clone(), int(5)), (f2.clone(), int(-3))],
            None,
        )
        .unwrap();
        assert_eq!(first.role(), Role::FirstIntegral);
        let inverse =
            DarbouxFunction::from_parts(&s, vec![(f1.clone(), int(1)), (f2.clone(), int(1))], None)
                .unwrap();
        assert_eq!(inverse.role(), Role::IntegratingFactorInverse);
        let other = DarbouxFunction::from_parts(&s, vec![(f1, int(1))], None).unwrap();
        assert_eq!(other.role(), Role::GeneralInvariant);
        assert_eq!(*other.cofactor(), poly("-3 - 6*x*y + 12*y^2 - 9*y^4"));
    }

    #[test]
    fn conjugate_product_is_real() {
        let gauss = &poly("x*y") - &BivarPoly::constant(GaussianRational::i());
        assert_eq!(realify(&gauss), poly("x^2*y^2 + 1"));

        // y − ix rotates with ẋ = −y, ẏ = x: cofactor i, conjugate product x²+y².
        let s = sys("-y", "x");
        let line = &poly("y") - &poly("x").scale(&GaussianRational::i());
        let k = curve_cofactor(&line, &s).unwrap();
        assert_eq!(*k.cofactor(), BivarPoly::constant(GaussianRational::i()));
        let real = realify(&line);
        assert_eq!(real, poly("x^2 + y^2"));
        assert!(curve_cofactor(&real, &s).unwrap().cofactor().is_zero());

        // Real input: realify is plain squaring, cofactor doubles.
        let doubled = realify(&poly("y"));
        assert_eq!(doubled, poly("y^2"));
        assert_eq!(
            *curve_cofactor(&doubled, &cubic()).unwrap().cofactor(),
            poly("2 + 2*x + 2*x*y")
        );
    }
}
