//! Creative telescoping and recurrences for definite hypergeometric sums.
//!
//! For a bivariate hypergeometric term `F(n,k)` the telescoper consists of
//! polynomials `p_i(n)` and a certificate `R(n,k)` with `G = R F` such that
//! `sum_i p_i F(n+i,k) = G(n,k+1) - G(n,k)` exactly. Summing over `k` turns
//! the identity into a linear recurrence for `S(n) = sum_k F(n,k)`.

use num_traits::{One, Signed, Zero};

use crate::abramov::{rational_solutions_param, DiffEquation};
use crate::closed::ClosedForm;
use crate::error::{Error, Result};
use crate::gosper::{apply_ratfun, gosper_in, term_from_ratio};
use crate::hyper::{HyperTerm, LinForm};
use crate::poly::{poly_gcd, rint, Poly, Rat, Var};
use crate::ratfun::RatFun;

/// A telescoping relation `sum_i p_i(n) F(n+i,k) = G(n,k+1) - G(n,k)`
/// with certificate `R = G/F`.
#[derive(Clone, Debug)]
pub struct Telescoper {
    pub order: usize,
    pub p: Vec<Poly>,
    pub r: RatFun,
}

/// Shift quotients `F(n+i,k)/F(n,k)` for `i = 0..=order`.
pub fn shift_quotients(f: &HyperTerm, order: usize) -> Vec<RatFun> {
    let rho_n = f.ratio(Var::N);
    let mut qs = vec![RatFun::one()];
    for i in 0..order {
        let next = &qs[i] * &rho_n.shift(Var::N, i as i64);
        qs.push(next);
    }
    qs
}

/// Minimal-order telescoper for `f`, searching orders `0..=max_order`.
pub fn creative_telescope(f: &HyperTerm, max_order: usize) -> Option<Telescoper> {
    let rho_k = f.ratio(Var::K);
    for order in 0..=max_order {
        let qs = shift_quotients(f, order);
        // R(k) rho(k-1) - R(k-1) = sum_i p_i q_i(k-1)
        let coeffs = vec![rho_k.shift(Var::K, -1), -&RatFun::one()];
        let rhs: Vec<RatFun> = qs.iter().map(|q| q.shift(Var::K, -1)).collect();
        let Ok(eq) = DiffEquation::new(coeffs, rhs, Var::K) else {
            continue;
        };
        for sol in rational_solutions_param(&eq) {
            let Some((p, r)) = normalize_telescoper(&sol.params, &sol.r) else {
                continue;
            };
            let t = Telescoper { order, p, r };
            if verify_certificate(f, &t) {
                return Some(t);
            }
        }
    }
    None
}

/// Clear denominators and content from the parameters, scaling the
/// certificate to match; `None` when all parameters vanish.
pub(crate) fn normalize_telescoper(params: &[RatFun], r: &RatFun) -> Option<(Vec<Poly>, RatFun)> {
    if params.iter().all(|p| p.is_zero()) {
        return None;
    }
    let mut l = Poly::one();
    for p in params {
        if p.is_zero() {
            continue;
        }
        let g = poly_gcd(&l, p.den());
        l = &l * &p.den().div_exact(&g).expect("gcd divides");
    }
    let mut ps: Vec<Poly> = params
        .iter()
        .map(|p| p.num() * &l.div_exact(p.den()).expect("lcm divides"))
        .collect();
    let mut g = Poly::zero();
    for p in &ps {
        if !p.is_zero() {
            g = if g.is_zero() { p.clone() } else { poly_gcd(&g, p) };
        }
    }
    let mut scale = &RatFun::from_poly(l) / &RatFun::from_poly(g.clone());
    for p in ps.iter_mut() {
        *p = p.div_exact(&g).expect("content divides");
    }
    let lead = ps.iter().rev().find(|p| !p.is_zero()).unwrap().lead_rat();
    if lead.is_negative() {
        for p in ps.iter_mut() {
            *p = -&*p;
        }
        scale = -&scale;
    }
    // integer-normalize: make the coefficient tuple primitive over Z
    let mut den_lcm = crate::poly::Int::one();
    let mut num_gcd = crate::poly::Int::zero();
    for p in &ps {
        for (_, c) in p.terms() {
            den_lcm = num_integer::lcm(den_lcm, c.denom().clone());
            num_gcd = num_integer::gcd(num_gcd, c.numer().abs());
        }
    }
    if !num_gcd.is_zero() {
        let s = Rat::new(den_lcm, num_gcd);
        for p in ps.iter_mut() {
            *p = p.scale(&s);
        }
        scale = &scale * &RatFun::from_rat(s);
    }
    Some((ps, r * &scale))
}

/// Exact check of the telescoping identity as rational functions.
pub fn verify_certificate(f: &HyperTerm, t: &Telescoper) -> bool {
    if t.p.iter().all(|p| p.is_zero()) {
        return false;
    }
    let rho_k = f.ratio(Var::K);
    let qs = shift_quotients(f, t.order);
    let mut lhs = RatFun::zero();
    for (p, q) in t.p.iter().zip(qs.iter()) {
        lhs = &lhs + &(&RatFun::from_poly(p.clone()) * q);
    }
    let rhs = &(&t.r.shift(Var::K, 1) * &rho_k) - &t.r;
    lhs == rhs
}

/// Inclusive summation bounds as integer-linear forms in `n`.
#[derive(Clone, Copy, Debug)]
pub struct SumRange {
    pub lo: LinForm,
    pub hi: LinForm,
}

impl SumRange {
    /// The natural support `k = 0..n`.
    pub fn natural() -> SumRange {
        SumRange {
            lo: LinForm::constant(0),
            hi: LinForm::var(Var::N),
        }
    }

    pub fn new(lo: LinForm, hi: LinForm) -> SumRange {
        SumRange { lo, hi }
    }

    pub fn at(&self, n0: i64) -> (i64, i64) {
        (self.lo.eval(n0, 0), self.hi.eval(n0, 0))
    }
}

/// One inhomogeneous contribution on the right side of a recurrence.
#[derive(Clone, Debug)]
pub enum RhsTerm {
    /// An explicit term in `n` alone.
    Term(HyperTerm),
    /// A definite sum over `k` of a hypergeometric term.
    Sum { body: HyperTerm, range: SumRange },
}

impl RhsTerm {
    pub fn eval(&self, n0: i64) -> Result<Rat> {
        match self {
            RhsTerm::Term(h) => h.eval(n0, 0),
            RhsTerm::Sum { body, range } => {
                let (lo, hi) = range.at(n0);
                brute_hyper_sum(body, n0, lo, hi)
            }
        }
    }
}

/// `sum_i p_i(n) S(n+i) = sum(rhs)` with polynomial coefficients.
#[derive(Clone, Debug)]
pub struct LinearRecurrence {
    pub coeffs: Vec<Poly>,
    pub rhs: Vec<RhsTerm>,
}

impl LinearRecurrence {
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rhs.is_empty()
    }

    /// Value of the right side at an integer point.
    pub fn rhs_eval(&self, n0: i64) -> Result<Rat> {
        let mut s = Rat::zero();
        for t in &self.rhs {
            s += t.eval(n0)?;
        }
        Ok(s)
    }

    /// Value of the left side given the sequence `S`.
    pub fn lhs_eval(&self, n0: i64, seq: &mut dyn FnMut(i64) -> Result<Rat>) -> Result<Rat> {
        let mut s = Rat::zero();
        for (i, p) in self.coeffs.iter().enumerate() {
            let c = p.eval(&[(Var::N, rint(n0))]);
            if c.is_zero() {
                continue;
            }
            s += &c * &seq(n0 + i as i64)?;
        }
        Ok(s)
    }
}

/// Exact sum of `f(n0, k)` for `k` in `lo..=hi`.
pub fn brute_hyper_sum(f: &HyperTerm, n0: i64, lo: i64, hi: i64) -> Result<Rat> {
    let mut s = Rat::zero();
    for k0 in lo..=hi {
        s += f.eval(n0, k0)?;
    }
    Ok(s)
}

/// Recurrence for `S(n) = sum_k F(n,k)` over the given range, with boundary
/// contributions carried on the right side. The result is cross-checked
/// numerically for `n = 0..25` before it is returned.
pub fn definite_sum_recurrence(
    f: &HyperTerm,
    range: SumRange,
    max_order: usize,
) -> Result<LinearRecurrence> {
    let t = creative_telescope(f, max_order).ok_or(Error::NoTelescoper(max_order))?;
    let i = t.order as i64;
    let g = apply_ratfun(f, &t.r);
    // summing k over [lo, hi + I] telescopes to G(hi + I + 1) - G(lo)
    let upper = g.subst_k(range.hi.coeff(Var::N), constant_of(&range.hi) + i + 1);
    let lower = g
        .subst_k(range.lo.coeff(Var::N), constant_of(&range.lo))
        .scale(&-Rat::one());
    let mut rhs = Vec::new();
    for term in [upper, lower] {
        if !vanishes_numerically(&term) {
            rhs.push(RhsTerm::Term(term));
        }
    }
    let rec = LinearRecurrence {
        coeffs: t.p.clone(),
        rhs,
    };
    // numeric cross-check against brute-force sums
    for n0 in 0..=25i64 {
        let mut seq = |m: i64| {
            let (lo, hi) = range.at(m);
            brute_hyper_sum(f, m, lo, hi.max(lo - 1) + i)
        };
        let (lhs, rhs_v) = match (rec.lhs_eval(n0, &mut seq), rec.rhs_eval(n0)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return Err(Error::PoleInRange(format!("n = {}", n0))),
        };
        if lhs != rhs_v {
            return Err(Error::Internal(format!(
                "telescoped recurrence fails numeric check at n = {}",
                n0
            )));
        }
    }
    Ok(rec)
}

fn constant_of(l: &LinForm) -> i64 {
    l.eval(0, 0)
}

fn vanishes_numerically(h: &HyperTerm) -> bool {
    if h.is_zero() {
        return true;
    }
    let mut seen = 0;
    for n0 in 0..=20i64 {
        match h.eval(n0, 0) {
            Ok(v) if v.is_zero() => seen += 1,
            Ok(_) => return false,
            Err(_) => return false,
        }
    }
    seen > 0
}

/// Closed form of a first-order recurrence with the given initial value.
pub fn first_order_closed_form(rec: &LinearRecurrence, initial: &Rat) -> Option<ClosedForm> {
    if rec.order() != 1 || rec.coeffs[1].is_zero() {
        return None;
    }
    if rec.coeffs[0].is_zero() {
        return None;
    }
    // S(n+1) = rho(n) S(n) + rhs(n)/p_1(n)
    let rho = -&(&RatFun::from_poly(rec.coeffs[0].clone())
        / &RatFun::from_poly(rec.coeffs[1].clone()));
    if rec.is_homogeneous() && initial.is_zero() {
        return Some(ClosedForm::zero());
    }
    let phi = term_from_ratio(&rho, Var::N)?;
    if rec.is_homogeneous() {
        return Some(ClosedForm::from_hyper(phi.scale(initial)));
    }
    // variation of constants: S = phi * y with
    // y(n+1) - y(n) = rhs(n) / (p_1(n) phi(n+1))
    let mut rhs_term = HyperTerm::zero();
    for t in &rec.rhs {
        match t {
            RhsTerm::Term(h) => {
                if rhs_term.is_zero() {
                    rhs_term = h.clone();
                } else {
                    // a sum of two terms is out of scope here
                    return None;
                }
            }
            RhsTerm::Sum { .. } => return None,
        }
    }
    let p1_inv = RatFun::from_poly(rec.coeffs[1].clone()).inv().ok()?;
    let w = apply_ratfun(&rhs_term.mul(&phi.shift(Var::N, 1).pow(-1)), &p1_inv);
    let y = gosper_in(&w, Var::N)?;
    let y0 = y.eval(0, 0).ok()?;
    let c = initial - &y0;
    let mut out = ClosedForm::from_hyper(phi.mul(&y));
    if !c.is_zero() {
        out = out.add(&ClosedForm::from_hyper(phi.scale(&c)));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn binom_nk() -> HyperTerm {
        HyperTerm::binomial(LinForm::var(Var::N), LinForm::var(Var::K))
    }

    #[test]
    fn binomial_theorem_recurrence() {
        let f = binom_nk();
        let rec = definite_sum_recurrence(&f, SumRange::natural(), 6).unwrap();
        assert_eq!(rec.order(), 1);
        assert!(rec.is_homogeneous());
        // S(n+1) = 2 S(n)
        assert_eq!(rec.coeffs[0], Poly::from_int(-2));
        assert_eq!(rec.coeffs[1], Poly::one());
    }

    #[test]
    fn binomial_square_telescoper_matches_printed_certificate() {
        let f = binom_nk().pow(2);
        let t = creative_telescope(&f, 6).unwrap();
        assert_eq!(t.order, 1);
        // p = (-2(2n+1), n+1)
        assert_eq!(t.p[0], Poly::linear(Var::N, -4, -2));
        assert_eq!(t.p[1], Poly::linear(Var::N, 1, 1));
        // G = (2k-3n-3) C(n,k-1)^2, so R = (2k-3n-3) k^2/(n-k+1)^2
        let num = {
            let l = &(&Poly::linear(Var::K, 2, -3) - &Poly::monomial(Var::N, 1, rint(3))) ;
            l * &Poly::monomial(Var::K, 2, Rat::one())
        };
        let den = {
            let d = &(&Poly::var(Var::N) - &Poly::var(Var::K)) + &Poly::one();
            &d * &d
        };
        let expect = RatFun::new(num, den).unwrap();
        assert_eq!(t.r, expect);
        assert!(verify_certificate(&f, &t));
        // perturbing a coefficient must break the certificate
        let mut bad = t.clone();
        bad.p[1] = &bad.p[1] + &Poly::one();
        assert!(!verify_certificate(&f, &bad));
    }

    #[test]
    fn apery_telescoper_order_two() {
        let f = binom_nk()
            .pow(2)
            .mul(&HyperTerm::binomial(LinForm::new(1, 1, 0), LinForm::var(Var::K)).pow(2));
        let t = creative_telescope(&f, 6).unwrap();
        assert_eq!(t.order, 2);
        assert!(verify_certificate(&f, &t));
    }

    #[test]
    fn chu_de_donno_right_side_closes() {
        // T(n) = sum_k (3n-2k+1)/(k+1) C(n,k)^2 = (4n+1)/(n+1) C(2n,n)
        let num = &Poly::monomial(Var::N, 1, rint(3)) - &Poly::linear(Var::K, 2, -1);
        let f = HyperTerm::poly_factor(num)
            .mul(&HyperTerm::poly_factor(Poly::linear(Var::K, 1, 1)).pow(-1))
            .mul(&binom_nk().pow(2));
        let rec = definite_sum_recurrence(&f, SumRange::natural(), 6).unwrap();
        assert_eq!(rec.order(), 1);
        let t0 = brute_hyper_sum(&f, 0, 0, 0).unwrap();
        let cf = first_order_closed_form(&rec, &t0).unwrap();
        // expected closed form
        let expect = HyperTerm::binomial(LinForm::new(2, 0, 0), LinForm::var(Var::N));
        for n0 in 0..=20 {
            let want = &rat(4 * n0 + 1, n0 + 1) * &expect.eval(n0, 0).unwrap();
            assert_eq!(cf.eval(n0).unwrap(), want);
            let brute = brute_hyper_sum(&f, n0, 0, n0).unwrap();
            assert_eq!(brute, want);
        }
    }

    #[test]
    fn first_order_closed_forms() {
        // S(n+1) = 2 S(n), S(0) = 1 -> 2^n
        let rec = LinearRecurrence {
            coeffs: vec![Poly::from_int(-2), Poly::one()],
            rhs: vec![],
        };
        let cf = first_order_closed_form(&rec, &Rat::one()).unwrap();
        for n0 in 0..12 {
            assert_eq!(cf.eval(n0).unwrap(), rint(1 << n0));
        }
        // (n+2) R(n+1) + (n+1) R(n) = 0, R(0) = 0 -> 0
        let rec = LinearRecurrence {
            coeffs: vec![Poly::linear(Var::N, 1, 1), Poly::linear(Var::N, 1, 2)],
            rhs: vec![],
        };
        let cf = first_order_closed_form(&rec, &Rat::zero()).unwrap();
        assert_eq!(cf.decide_zero(), Some(true));
    }
}
