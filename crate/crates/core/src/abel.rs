//! Summation by parts for `sum_k f(n,k) g(n,k)` with hypergeometric `f` and
//! holonomic-style `g`.
//!
//! The operator `L` built from `g`'s `k`-recurrence satisfies `L g = u`, and
//! its dual `L*` obeys the exact summation-by-parts identity
//!
//!     sum_{k=m}^{l} (L* a_k) b_k = sum_{k=m}^{l} a_k (L b_k) - T(l+1) + T(m),
//!
//! where `T` collects boundary cross terms. Solving a parameterized rational
//! difference equation for `R` with `a = R f` turns the identity into a
//! recurrence for the definite sum, with hypergeometric right side.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::abramov::{rational_solutions_param, DiffEquation};
use crate::error::{Error, Result};
use crate::gosper::{apply_ratfun, rational_quotient};
use crate::hyper::{HyperTerm, LinForm};
use crate::poly::{rint, Poly, Rat, Var};
use crate::ratfun::RatFun;
use crate::sequences::{AuxEval, AuxSequence, Inhom};
use crate::zeilberger::{
    definite_sum_recurrence, first_order_closed_form, normalize_telescoper, shift_quotients,
    LinearRecurrence, RhsTerm, SumRange,
};

/// A linear difference operator `L a_k = sum_j c_j(n,k) a_{k+j}`, allowing
/// negative shifts so that duals live in the same representation.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceOperator {
    terms: BTreeMap<i64, RatFun>,
}

impl DifferenceOperator {
    pub fn new(terms: Vec<(i64, RatFun)>) -> DifferenceOperator {
        let mut map: BTreeMap<i64, RatFun> = BTreeMap::new();
        for (j, c) in terms {
            let e = map.entry(j).or_insert_with(RatFun::zero);
            *e = &*e + &c;
        }
        map.retain(|_, c| !c.is_zero());
        DifferenceOperator { terms: map }
    }

    /// The forward difference `Delta a_k = a_{k+1} - a_k`.
    pub fn delta() -> DifferenceOperator {
        DifferenceOperator::new(vec![(0, -&RatFun::one()), (1, RatFun::one())])
    }

    /// Canonical operator with `L g = u`: unit coefficient on `g(n,k+d)` and
    /// `-r_{j+1}` on `g(n,k+j)`.
    pub fn from_aux(g: &AuxSequence) -> DifferenceOperator {
        let d = g.order() as i64;
        let mut terms = vec![(d, RatFun::one())];
        for (j, r) in g.r.iter().enumerate() {
            terms.push((j as i64, -r));
        }
        DifferenceOperator::new(terms)
    }

    pub fn coeff(&self, j: i64) -> RatFun {
        self.terms.get(&j).cloned().unwrap_or_else(RatFun::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &RatFun)> {
        self.terms.iter().map(|(j, c)| (*j, c))
    }

    pub fn max_shift(&self) -> i64 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn min_shift(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(0)
    }

    /// Dual operator with `L* a_k = sum_j c_j(k-j) a_{k-j}`.
    pub fn dual(&self) -> DifferenceOperator {
        DifferenceOperator::new(
            self.terms()
                .map(|(j, c)| (-j, c.shift(Var::K, -j)))
                .collect(),
        )
    }

    /// Apply to concrete sequence values at `(n0, k0)`.
    pub fn apply(
        &self,
        n0: i64,
        k0: i64,
        vals: &mut dyn FnMut(i64) -> Result<Rat>,
    ) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (j, c) in self.terms() {
            let cv = rf_at(c, n0, k0)?;
            if !cv.is_zero() {
                acc = &acc + &(&cv * &vals(k0 + j)?);
            }
        }
        Ok(acc)
    }
}

fn rf_at(r: &RatFun, n0: i64, k0: i64) -> Result<Rat> {
    r.eval(&[(Var::N, rint(n0)), (Var::K, rint(k0))])
}

/// Boundary cross terms `T(k) = sum_{i=1}^d sum_{j=1}^i c_i(k-j) a_{k-j}
/// b_{k+i-j}`, stored as `(coefficient, a-shift, b-shift)` triples.
#[derive(Clone, Debug)]
pub struct BoundaryTerm {
    pub triples: Vec<(RatFun, i64, i64)>,
}

/// Build `T` for a forward operator (shifts `0..=d`).
pub fn boundary_from_operator(l: &DifferenceOperator) -> BoundaryTerm {
    assert!(l.min_shift() >= 0, "boundary term needs a forward operator");
    let d = l.max_shift();
    let mut triples = Vec::new();
    for i in 1..=d {
        let c = l.coeff(i);
        for j in 1..=i {
            triples.push((c.shift(Var::K, -j), -j, i - j));
        }
    }
    BoundaryTerm { triples }
}

impl BoundaryTerm {
    /// Value of `T(k0)` at `n = n0`, with `a` and `b` supplied as value
    /// oracles. `b` is only consulted when the rest of a triple is nonzero.
    pub fn eval(
        &self,
        n0: i64,
        k0: i64,
        a: &mut dyn FnMut(i64, i64) -> Result<Rat>,
        b: &mut dyn FnMut(i64, i64) -> Result<Rat>,
    ) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (c, sa, sb) in &self.triples {
            let cv = rf_at(c, n0, k0)?;
            if cv.is_zero() {
                continue;
            }
            let av = a(n0, k0 + sa)?;
            if av.is_zero() {
                continue;
            }
            let bv = b(n0, k0 + sb)?;
            acc = &acc + &(&(&cv * &av) * &bv);
        }
        Ok(acc)
    }
}

/// Exact check of the summation-by-parts identity over `k = m..=upper-1`.
pub fn abel_identity_check(
    l: &DifferenceOperator,
    n0: i64,
    a: &dyn Fn(i64) -> Rat,
    b: &dyn Fn(i64) -> Rat,
    m: i64,
    upper: i64,
) -> bool {
    let dual = l.dual();
    let t = boundary_from_operator(l);
    let go = || -> Result<bool> {
        let mut lhs = Rat::zero();
        let mut rhs = Rat::zero();
        for k0 in m..upper {
            lhs = &lhs + &(&dual.apply(n0, k0, &mut |j| Ok(a(j)))? * &b(k0));
            rhs = &rhs + &(&a(k0) * &l.apply(n0, k0, &mut |j| Ok(b(j)))?);
        }
        let mut av = |_: i64, j: i64| Ok(a(j));
        let mut bv = |_: i64, j: i64| Ok(b(j));
        rhs = &rhs - &t.eval(n0, upper, &mut av, &mut bv)?;
        let mut av = |_: i64, j: i64| Ok(a(j));
        let mut bv = |_: i64, j: i64| Ok(b(j));
        rhs = &rhs + &t.eval(n0, m, &mut av, &mut bv)?;
        Ok(lhs == rhs)
    };
    go().unwrap_or(false)
}

/// One additive piece of `v_i`: a rational multiple of the `n`-rule
/// inhomogeneity shifted to `n + t`.
#[derive(Clone, Debug)]
pub struct VPiece {
    pub coef: RatFun,
    pub t: i64,
}

/// The `n`-shift data `g(n+i,k) = s_i(n,k) g(n,k) + v_i(n,k)`.
#[derive(Clone, Debug)]
pub struct StepSV {
    pub s: Vec<RatFun>,
    pub v: Vec<Vec<VPiece>>,
}

/// Iterate `s_{i+1} = s(n+i,k) s_i`, `v_{i+1} = s(n+i,k) v_i + v(n+i,k)`.
pub fn step1_s_v(g: &AuxSequence, order: usize) -> StepSV {
    let mut s = vec![RatFun::one()];
    let mut v: Vec<Vec<VPiece>> = vec![Vec::new()];
    for i in 0..order {
        let si = g.s.shift(Var::N, i as i64);
        s.push(&si * &s[i]);
        let mut pieces: Vec<VPiece> = v[i]
            .iter()
            .map(|p| VPiece {
                coef: &p.coef * &si,
                t: p.t,
            })
            .collect();
        if !g.v.is_zero() {
            pieces.push(VPiece {
                coef: RatFun::one(),
                t: i as i64,
            });
        }
        v.push(pieces);
    }
    StepSV { s, v }
}

/// Left side coefficients (of `R(k-j)`) and right side terms (one per
/// parameter `p_i`) of the key equation, as rational functions.
fn prq_parts(f: &HyperTerm, g: &AuxSequence, order: usize) -> Result<(Vec<RatFun>, Vec<RatFun>)> {
    let l = DifferenceOperator::from_aux(g);
    let d = l.max_shift();
    let rho_k = f.ratio(Var::K);
    // phi_j = f(n,k-j)/f(n,k)
    let mut phi = vec![RatFun::one()];
    for j in 0..d {
        let next = &phi[j as usize] * &rho_k.shift(Var::K, -(j + 1)).inv()?;
        phi.push(next);
    }
    let mut lhs = Vec::new();
    for j in 0..=d {
        lhs.push(&phi[j as usize] * &l.coeff(j).shift(Var::K, -j));
    }
    let sv = step1_s_v(g, order);
    let rhs = shift_quotients(f, order)
        .iter()
        .zip(sv.s.iter())
        .map(|(q, s)| q * s)
        .collect();
    Ok((lhs, rhs))
}

/// The key difference equation for the certificate `R` at a given order.
pub fn build_prq(f: &HyperTerm, g: &AuxSequence, order: usize) -> Result<DiffEquation> {
    let (lhs, rhs) = prq_parts(f, g, order)?;
    DiffEquation::new(lhs, rhs, Var::K)
}

/// Recurrence data for `S(n) = sum_k f(n,k) g(n,k)`:
///
///     sum_i p_i(n) S(n+i) = sum_k t1 + sum_k t2 - T(l+1) + T(m)
///
/// summed over the extended range `[m, l] = [lower(n), upper(n)]`, with
/// certificate `a = r f` entering `t1 = a u` and the boundary term.
#[derive(Clone, Debug)]
pub struct AZResult {
    pub order: usize,
    pub p: Vec<Poly>,
    pub r: RatFun,
    pub t1: Vec<HyperTerm>,
    pub t2: Vec<HyperTerm>,
    pub boundary: BoundaryTerm,
    pub f: HyperTerm,
    pub g: AuxSequence,
    pub range: SumRange,
}

impl AZResult {
    /// The certificate `a(n,k) = R(n,k) f(n,k)` as a hypergeometric term.
    pub fn certificate(&self) -> HyperTerm {
        apply_ratfun(&self.f, &self.r)
    }

    /// Lower end of the extended summation range, as a form in `n`.
    pub fn lower_form(&self) -> LinForm {
        let lo = self.range.lo;
        let slide = if lo.n < 0 { lo.n * self.order as i64 } else { 0 };
        LinForm::new(lo.n, 0, lo.c + slide)
    }

    /// Upper end of the extended summation range, as a form in `n`.
    pub fn upper_form(&self) -> LinForm {
        let hi = self.range.hi;
        let slide = if hi.n > 0 { hi.n * self.order as i64 } else { 0 };
        LinForm::new(hi.n, 0, hi.c + slide)
    }

    /// Value of the certificate at a point, taken as a limit so that poles
    /// of `r` cancel against zeros of `f` at the support boundary.
    pub fn cert_value(&self, n0: i64, k0: i64) -> Result<Rat> {
        self.certificate().eval_limit(n0, k0)
    }

    /// Value of `T(k0)` at `n = n0`.
    pub fn boundary_value(&self, n0: i64, k0: i64, aux: &mut AuxEval) -> Result<Rat> {
        let g = self.g.clone();
        let cert = self.certificate();
        let mut a = |n: i64, k: i64| cert.eval_limit(n, k);
        let mut b = |n: i64, k: i64| aux.eval(&g, n, k);
        self.boundary.eval(n0, k0, &mut a, &mut b)
    }

    /// Brute-force value of `S(n0)` over the declared range.
    pub fn brute_sum(&self, n0: i64, aux: &mut AuxEval) -> Result<Rat> {
        let (lo, hi) = self.range.at(n0);
        let mut s = Rat::zero();
        for k0 in lo..=hi {
            let fv = self.f.eval(n0, k0)?;
            if !fv.is_zero() {
                s = &s + &(&fv * &aux.eval(&self.g, n0, k0)?);
            }
        }
        Ok(s)
    }

    /// Check the defining identity at one `n`; `None` when a pole or an
    /// out-of-support evaluation makes the check inapplicable there.
    pub fn check_at(&self, n0: i64, aux: &mut AuxEval) -> Option<bool> {
        let mut go = || -> Result<bool> {
            let mut lhs = Rat::zero();
            for (i, p) in self.p.iter().enumerate() {
                let c = p.eval(&[(Var::N, rint(n0))]);
                if !c.is_zero() {
                    lhs = &lhs + &(&c * &self.brute_sum(n0 + i as i64, aux)?);
                }
            }
            let lo = self.lower_form().eval(n0, 0);
            let hi = self.upper_form().eval(n0, 0);
            let mut rhs = Rat::zero();
            for k0 in lo..=hi {
                for t in self.t1.iter().chain(self.t2.iter()) {
                    rhs = &rhs + &t.eval_limit(n0, k0)?;
                }
            }
            rhs = &rhs - &self.boundary_value(n0, hi + 1, aux)?;
            rhs = &rhs + &self.boundary_value(n0, lo, aux)?;
            Ok(lhs == rhs)
        };
        go().ok()
    }
}

/// Merge a list of hypergeometric terms, combining pairs whose quotient is
/// rational.
fn merge_terms(list: Vec<HyperTerm>) -> Vec<HyperTerm> {
    let mut out: Vec<HyperTerm> = Vec::new();
    'next: for t in list {
        if t.is_zero() {
            continue;
        }
        for o in out.iter_mut() {
            if let Some(q) = rational_quotient(&t, o) {
                let merged = apply_ratfun(o, &(&RatFun::one() + &q));
                *o = merged;
                continue 'next;
            }
        }
        out.push(t);
    }
    out.retain(|t| !t.is_zero());
    out
}

fn assemble(
    f: &HyperTerm,
    g: &AuxSequence,
    range: SumRange,
    order: usize,
    p: Vec<Poly>,
    r: RatFun,
    sv: &StepSV,
) -> AZResult {
    let a = apply_ratfun(f, &r);
    let t1 = match &g.u {
        Inhom::Hyper(u) => merge_terms(vec![a.mul(u)]),
        _ => Vec::new(),
    };
    let mut w = Vec::new();
    if let Inhom::Hyper(vh) = &g.v {
        for (i, pi) in p.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            let fi = f.shift(Var::N, i as i64);
            for piece in &sv.v[i] {
                let c = &piece.coef * &RatFun::from_poly(pi.clone());
                w.push(apply_ratfun(&fi.mul(&vh.shift(Var::N, piece.t)), &c));
            }
        }
    }
    let t2 = merge_terms(w);
    let boundary = boundary_from_operator(&DifferenceOperator::from_aux(g));
    AZResult {
        order,
        p,
        r,
        t1,
        t2,
        boundary,
        f: f.clone(),
        g: g.clone(),
        range,
    }
}

/// Numeric pre-verification: every evaluable `n` in `0..=n_max` must check,
/// and at least `min_ok` of them must be evaluable.
fn verified(res: &AZResult, n_max: i64, min_ok: usize) -> bool {
    let mut aux = AuxEval::new();
    let mut ok = 0;
    for n0 in 0..=n_max {
        match res.check_at(n0, &mut aux) {
            Some(true) => ok += 1,
            Some(false) => return false,
            None => {}
        }
    }
    ok >= min_ok
}

/// Recurrence for `sum_k f(n,k) g(n,k)` by summation by parts, searching
/// orders `0..=max_order`. The inhomogeneities of `g` must be hypergeometric.
pub fn abel_zeilberger(
    f: &HyperTerm,
    g: &AuxSequence,
    range: SumRange,
    max_order: usize,
) -> Result<AZResult> {
    if g.u.is_mixed() || g.v.is_mixed() {
        return Err(Error::MixedNotSupported);
    }
    for order in 0..=max_order {
        let (lhs, rhs) = prq_parts(f, g, order)?;
        let Ok(eq) = DiffEquation::new(lhs.clone(), rhs.clone(), Var::K) else {
            continue;
        };
        let sv = step1_s_v(g, order);
        for sol in rational_solutions_param(&eq) {
            let Some((p, r)) = normalize_telescoper(&sol.params, &sol.r) else {
                continue;
            };
            if !key_equation_holds(&lhs, &rhs, &p, &r) {
                continue;
            }
            let res = assemble(f, g, range, order, p, r, &sv);
            if verified(&res, 15, 8) {
                return Ok(res);
            }
        }
    }
    Err(Error::OrderCapExceeded(max_order))
}

/// Recurrence `sum_i p_i(n) S(n+i) = rhs(n)` for the definite sum, with the
/// right side closed to explicit terms in `n` where possible. Requires the
/// boundary contributions to vanish on the extended range.
pub fn recurrence_for_sum(azr: &AZResult, max_order: usize) -> Result<LinearRecurrence> {
    let mut aux = AuxEval::new();
    for n0 in 0..=20i64 {
        let lo = azr.lower_form().eval(n0, 0);
        let hi = azr.upper_form().eval(n0, 0);
        for k0 in [lo, hi + 1] {
            match azr.boundary_value(n0, k0, &mut aux) {
                Ok(v) if v.is_zero() => {}
                Ok(_) => {
                    return Err(Error::Internal(format!(
                        "boundary term does not vanish at n = {}, k = {}",
                        n0, k0
                    )))
                }
                Err(_) => {}
            }
        }
    }
    let range = SumRange::new(azr.lower_form(), azr.upper_form());
    let mut rhs = Vec::new();
    for t in azr.t1.iter().chain(azr.t2.iter()) {
        match close_sum(t, range, max_order) {
            Some(closed) => rhs.extend(closed),
            None => rhs.push(RhsTerm::Sum {
                body: t.clone(),
                range,
            }),
        }
    }
    Ok(LinearRecurrence {
        coeffs: azr.p.clone(),
        rhs,
    })
}

/// Close `sum_k t(n,k)` over the range to explicit terms in `n`: dropped when
/// numerically zero, else telescoped and solved as a first-order recurrence.
fn close_sum(t: &HyperTerm, range: SumRange, max_order: usize) -> Option<Vec<RhsTerm>> {
    let sum_at = |n0: i64| -> Result<Rat> {
        let (lo, hi) = range.at(n0);
        let mut s = Rat::zero();
        for k0 in lo..=hi {
            s = &s + &t.eval_limit(n0, k0)?;
        }
        Ok(s)
    };
    let mut seen = 0;
    let mut nonzero = false;
    for n0 in 0..=20 {
        if let Ok(v) = sum_at(n0) {
            seen += 1;
            if !v.is_zero() {
                nonzero = true;
                break;
            }
        }
    }
    if !nonzero && seen >= 10 {
        return Some(Vec::new());
    }
    let rec = definite_sum_recurrence(t, range, max_order).ok()?;
    let initial = sum_at(0).ok()?;
    let h = first_order_closed_form(&rec, &initial)?.as_hyper()?;
    for n0 in 0..=20 {
        if let (Ok(a), Ok(b)) = (h.eval(n0, 0), sum_at(n0)) {
            if a != b {
                return None;
            }
        }
    }
    Some(vec![RhsTerm::Term(h)])
}

/// Compose the recurrence with an annihilator of its right side, giving a
/// homogeneous recurrence of higher order. Applies when the right side is a
/// single explicit hypergeometric term.
pub fn homogenize(rec: &LinearRecurrence) -> Option<LinearRecurrence> {
    if rec.is_homogeneous() {
        return Some(rec.clone());
    }
    let [RhsTerm::Term(h)] = rec.rhs.as_slice() else {
        return None;
    };
    // q_1(n) h(n+1) - q_0(n) h(n) = 0 from the shift quotient in n
    let rho = h.ratio(Var::N);
    let q = vec![rho.num().scale(&rint(-1)), rho.den().clone()];
    let order = rec.coeffs.len() + 1;
    let mut coeffs = vec![Poly::zero(); order];
    for (j, qj) in q.iter().enumerate() {
        for (i, pi) in rec.coeffs.iter().enumerate() {
            let shifted = pi.shift(Var::N, j as i64);
            coeffs[i + j] = &coeffs[i + j] + &(qj * &shifted);
        }
    }
    Some(LinearRecurrence {
        coeffs,
        rhs: Vec::new(),
    })
}

/// Exact check of `sum_i p_i q_i = sum_j c_j R(k-j)` as rational functions.
fn key_equation_holds(lhs: &[RatFun], rhs: &[RatFun], p: &[Poly], r: &RatFun) -> bool {
    let mut want = RatFun::zero();
    for (pi, qi) in p.iter().zip(rhs.iter()) {
        want = &want + &(&RatFun::from_poly(pi.clone()) * qi);
    }
    let mut have = RatFun::zero();
    for (j, c) in lhs.iter().enumerate() {
        have = &have + &(c * &r.shift(Var::K, -(j as i64)));
    }
    want == have
}
