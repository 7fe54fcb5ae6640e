//! Gosper's algorithm: hypergeometric indefinite summation.
//!
//! The shift quotient is brought into normal form `rho = (a/b) *
//! (c(k+1)/c(k))` with `gcd(a(k), b(k+j)) = 1` for all `j >= 0`, the key
//! equation `a(k) x(k+1) - b(k-1) x(k) = c(k)` is solved for a polynomial
//! `x`, and the antidifference is reassembled as a rational multiple of the
//! summand.

use num_traits::{One, Zero};

use crate::abramov::poly_solution_fixed;
use crate::hyper::HyperTerm;
use crate::poly::{poly_gcd, Poly, Rat, Var};
use crate::ratfun::RatFun;
use crate::roots::{dispersion, dispersion_set};

/// Gosper-Petkovsek normal form of a shift quotient.
#[derive(Clone, Debug)]
pub struct GpForm {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub var: Var,
}

impl GpForm {
    /// Exact reconstruction `(a/b) * (c(k+1)/c(k))`.
    pub fn ratio(&self) -> RatFun {
        let num = &self.a * &self.c.shift(self.var, 1);
        let den = &self.b * &self.c;
        RatFun::new(num, den).expect("nonzero denominator")
    }

    /// Invariant check: reconstruction and shift-coprimality.
    pub fn check(&self, rho: &RatFun) -> bool {
        if &self.ratio() != rho {
            return false;
        }
        matches!(dispersion(&self.a, &self.b, self.var), Ok(None))
    }
}

/// Normal form of a nonzero rational function.
pub fn gp_normal_form(rho: &RatFun, v: Var) -> GpForm {
    assert!(!rho.is_zero(), "zero shift quotient");
    let mut a = rho.num().clone();
    let mut b = rho.den().clone();
    let mut c = Poly::one();
    let mut js = dispersion_set(&a, &b, v).unwrap_or_default();
    js.sort_unstable();
    for j in js {
        if j == 0 {
            continue; // inputs are reduced
        }
        let g = poly_gcd(&a, &b.shift(v, j));
        if g.is_constant() {
            continue;
        }
        a = a.div_exact(&g).expect("gcd divides");
        b = b.div_exact(&g.shift(v, -j)).expect("gcd divides");
        for i in 1..=j {
            c = &c * &g.shift(v, -i);
        }
    }
    // strip factors free of v; they cancel in c(k+1)/c(k)
    let cont = c.content(v);
    if !cont.is_one() {
        c = c.div_exact(&cont).expect("content divides");
    }
    let lead = c.lc(v);
    if let Some(r) = lead.as_rat() {
        if !r.is_one() {
            c = c.scale(&(Rat::one() / r));
        }
    }
    GpForm { a, b, c, var: v }
}

/// Hypergeometric antidifference of `f` in `k`: `Some(y)` with
/// `y(k+1) - y(k) = f(k)` exactly, `None` when no such term exists.
pub fn gosper(f: &HyperTerm) -> Option<HyperTerm> {
    gosper_in(f, Var::K)
}

/// Antidifference in an arbitrary variable.
pub fn gosper_in(f: &HyperTerm, v: Var) -> Option<HyperTerm> {
    if f.is_zero() {
        return Some(HyperTerm::zero());
    }
    let rho = f.ratio(v);
    let gp = gp_normal_form(&rho, v);
    // key equation a(k) x(k+1) - b(k-1) x(k) = c(k)
    let coeffs = [-&gp.b.shift(v, -1), gp.a.clone()];
    let (x, _kernel) = poly_solution_fixed(&coeffs, &gp.c, v)?;
    // y = (b(k-1) / c(k)) * x(k) * f(k)
    let r = &(&RatFun::from_poly(gp.b.shift(v, -1)) / &RatFun::from_poly(gp.c.clone())) * &x;
    if !certificate_holds(&r, &rho, v) {
        return None;
    }
    Some(apply_ratfun(f, &r))
}

/// `f * R` as a hypergeometric term, with `R` split into polynomial factors.
pub fn apply_ratfun(f: &HyperTerm, r: &RatFun) -> HyperTerm {
    if r.is_zero() {
        return HyperTerm::zero();
    }
    let mut out = f.clone();
    out = out.mul(&HyperTerm::poly_factor(r.num().clone()));
    out = out.mul(&HyperTerm::poly_factor(r.den().clone()).pow(-1));
    out
}

/// Exact check of `R(k+1) rho(k) - R(k) = 1`.
fn certificate_holds(r: &RatFun, rho: &RatFun, v: Var) -> bool {
    let lhs = &(&r.shift(v, 1) * rho) - r;
    lhs.is_one()
}

/// The unique polynomial `x` with `x(k+1) - x(k) = u` and no `k`-free part.
pub fn indefinite_poly_sum(u: &Poly, v: Var) -> Poly {
    if u.is_zero() {
        return Poly::zero();
    }
    let coeffs = [-&Poly::one(), Poly::one()];
    let (x, _) = poly_solution_fixed(&coeffs, u, v).expect("polynomials are always summable");
    // x has a k-free denominator only; clear it into the coefficients
    let den = x.den().as_rat().expect("constant denominator");
    let mut p = x.num().scale(&(Rat::one() / den));
    let c0 = p.coeff_of(v, 0);
    p = &p - &c0;
    p
}

/// If `h` equals a rational function of `n` and `k`, return it.
///
/// For each variable the shift quotient is split twice through the normal
/// form: `rho = (a/b)(c1(k+1)/c1(k))` captures the numerator part, then the
/// leftover `b/a` is split again to capture the denominator part. What
/// remains must be the shift quotient of a constant.
pub fn as_rational(h: &HyperTerm) -> Option<RatFun> {
    if h.is_zero() {
        return Some(RatFun::zero());
    }
    let mut rest = h.clone();
    let mut z = RatFun::one();
    for v in [Var::K, Var::N] {
        if !rest.contains_var(v) {
            continue;
        }
        let rho = rest.ratio(v);
        let gp1 = gp_normal_form(&rho, v);
        let mut zv = RatFun::from_poly(gp1.c.clone());
        if !gp1.a.is_one() || !gp1.b.is_one() {
            let left = RatFun::new(gp1.b.clone(), gp1.a.clone()).ok()?;
            let gp2 = gp_normal_form(&left, v);
            let residue = RatFun::new(gp2.a.clone(), gp2.b.clone()).ok()?;
            if !residue.is_one() {
                return None;
            }
            zv = &zv / &RatFun::from_poly(gp2.c.clone());
        }
        if !zv.is_one() {
            rest = apply_ratfun(&rest, &zv.inv().expect("nonzero"));
            z = &z * &zv;
        }
    }
    // rest has shift quotient 1 in both variables, so it is a constant
    // wherever defined; pin it by evaluation and confirm on a grid
    let mut c0: Option<Rat> = None;
    let mut confirmed = 0;
    'outer: for n0 in 0..12i64 {
        for k0 in 0..12i64 {
            let Ok(val) = rest.eval(n0, k0) else { continue };
            if val.is_zero() {
                continue; // support boundary, not a generic point
            }
            match &c0 {
                None => c0 = Some(val),
                Some(c) => {
                    if &val != c {
                        return None;
                    }
                    confirmed += 1;
                    if confirmed >= 10 {
                        break 'outer;
                    }
                }
            }
        }
    }
    let c0 = c0?;
    if c0.is_zero() {
        return None;
    }
    Some(&z * &RatFun::from_rat(c0))
}

/// Reconstruct a hypergeometric term with the given shift quotient,
/// normalized to value 1 at the origin. `None` when the quotient has no
/// representation over the supported atoms.
pub fn term_from_ratio(rho: &RatFun, v: Var) -> Option<HyperTerm> {
    use crate::hyper::LinForm;
    if rho.is_zero() {
        return None;
    }
    let gp = gp_normal_form(rho, v);
    let mut term = HyperTerm::poly_factor(gp.c.clone());
    let (lam_num, num_factors) = factor_linear(&gp.a, v)?;
    let (lam_den, den_factors) = factor_linear(&gp.b, v)?;

    // signed class counts per (slope, offset)
    let mut classes: std::collections::BTreeMap<(i64, i64), i64> = Default::default();
    for (a, c) in num_factors {
        *classes.entry((a, c)).or_insert(0) += 1;
    }
    for (a, c) in den_factors {
        *classes.entry((a, c)).or_insert(0) -= 1;
    }
    let lam = &lam_num / &lam_den;
    // accumulated exponents of extra base^n factors
    let mut powers: std::collections::BTreeMap<i64, i64> = Default::default();

    // reduce multiples: (a m + a t) = a (m + t)
    let keys: Vec<_> = classes.keys().cloned().collect();
    for (a, c) in keys {
        if a > 1 && c % a == 0 {
            let cnt = classes.remove(&(a, c)).unwrap_or(0);
            if cnt != 0 {
                *powers.entry(a).or_insert(0) += cnt;
                *classes.entry((1, c / a)).or_insert(0) += cnt;
            }
        }
    }
    // process slopes descending so fallbacks can reinsert slope-1 factors
    loop {
        let Some((&(a, c), &cnt)) = classes.iter().rev().find(|(_, &cnt)| cnt != 0) else {
            break;
        };
        let s = cnt.signum();
        if c < 1 {
            return None;
        }
        // full residue group c..c+a-1 with matching sign
        let full = (0..a).all(|r| {
            classes
                .get(&(a, c + r))
                .map_or(false, |&x| x.signum() == s && x != 0)
        });
        if full {
            for r in 0..a {
                *classes.get_mut(&(a, c + r)).unwrap() -= s;
            }
            let atom = HyperTerm::factorial(linform_in(v, a, c - 1));
            term = term.mul(&atom.pow(s as i32));
            continue;
        }
        if a == 2 {
            // (2m+c) = (2n+c-1)! group divided by the even class
            *classes.get_mut(&(2, c)).unwrap() -= s;
            term = term.mul(&HyperTerm::factorial(linform_in(v, 2, c - 1)).pow(s as i32));
            *powers.entry(2).or_insert(0) -= s;
            *classes.entry((1, (c + 1) / 2)).or_insert(0) -= s;
            continue;
        }
        return None;
    }

    for (base, e) in powers {
        if e != 0 {
            term = term.mul(&HyperTerm::power(base, LinForm::var(v)).pow(e as i32));
        }
    }
    // geometric part lam^n
    if !lam.is_one() {
        let p = i64::try_from(lam.numer()).ok()?;
        let q = i64::try_from(lam.denom()).ok()?;
        if p != 1 {
            term = term.mul(&HyperTerm::power(p, LinForm::var(v)));
        }
        if q != 1 {
            term = term.mul(&HyperTerm::power(q, LinForm::var(v)).pow(-1));
        }
    }
    // normalize to 1 at the origin
    let c0 = term.eval(0, 0).ok()?;
    if c0.is_zero() {
        return None;
    }
    let term = term.scale(&(Rat::one() / c0));
    if &term.ratio(v) == rho {
        Some(term)
    } else {
        None
    }
}

fn linform_in(v: Var, a: i64, c: i64) -> crate::hyper::LinForm {
    match v {
        Var::N => crate::hyper::LinForm::new(a, 0, c),
        _ => crate::hyper::LinForm::new(0, a, c),
    }
}

/// Split a univariate polynomial into integer linear factors `a v + c`.
fn factor_linear(p: &Poly, v: Var) -> Option<(Rat, Vec<(i64, i64)>)> {
    if p.is_zero() {
        return None;
    }
    if p.is_constant() {
        return Some((p.as_rat().unwrap(), Vec::new()));
    }
    if p.vars() != [v] {
        return None;
    }
    let mut rest = p.clone();
    let mut factors = Vec::new();
    let roots = crate::roots::rational_roots(p, v).ok()?;
    for r in roots {
        let a = i64::try_from(r.denom()).ok()?;
        let c = -i64::try_from(r.numer()).ok()?;
        let f = Poly::linear(v, a, c);
        while let Some(q) = rest.div_exact(&f) {
            rest = q;
            factors.push((a, c));
        }
    }
    let lead = rest.as_rat()?;
    Some((lead, factors))
}

/// If `f/g` is a rational function, return it.
pub fn rational_quotient(f: &HyperTerm, g: &HyperTerm) -> Option<RatFun> {
    if f.is_zero() {
        return Some(RatFun::zero());
    }
    as_rational(&f.mul(&g.pow(-1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::LinForm;
    use crate::poly::{rat, rint};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn kvar() -> Poly {
        Poly::var(Var::K)
    }

    #[test]
    fn gp_normal_form_examples() {
        // rho = (k+1)/k
        let rho = RatFun::new(Poly::linear(Var::K, 1, 1), kvar()).unwrap();
        let gp = gp_normal_form(&rho, Var::K);
        assert!(gp.check(&rho));
        // rho = 1
        let gp = gp_normal_form(&RatFun::one(), Var::K);
        assert!(gp.a.is_one() && gp.b.is_one() && gp.c.is_one());
        // rho = (2k+1)/(2k+2)
        let rho = RatFun::new(Poly::linear(Var::K, 2, 1), Poly::linear(Var::K, 2, 2)).unwrap();
        let gp = gp_normal_form(&rho, Var::K);
        assert!(gp.check(&rho));
        assert!(gp.c.is_one());
    }

    #[test]
    fn gosper_examples() {
        // f = 4^(-k) C(2k,k): antidifference 2k * f
        let f = HyperTerm::power(4, LinForm::new(0, -1, 0))
            .mul(&HyperTerm::binomial(LinForm::new(0, 2, 0), LinForm::var(Var::K)));
        let y = gosper(&f).unwrap();
        for k0 in 0..12 {
            let expect = &rint(2 * k0) * &f.eval(0, k0).unwrap();
            assert_eq!(y.eval(0, k0).unwrap(), expect);
        }

        // f = k * k!: antidifference k!
        let f = HyperTerm::poly_factor(kvar())
            .mul(&HyperTerm::factorial(LinForm::var(Var::K)));
        let y = gosper(&f).unwrap();
        for k0 in 1..10 {
            let d = &y.eval(0, k0 + 1).unwrap() - &y.eval(0, k0).unwrap();
            assert_eq!(d, f.eval(0, k0).unwrap());
        }

        // f = 1/k: not summable
        let f = HyperTerm::poly_factor(kvar()).pow(-1);
        assert!(gosper(&f).is_none());
    }

    #[test]
    fn polynomial_summand() {
        // f = (k-n)^2
        let kn = &kvar() - &Poly::var(Var::N);
        let f = HyperTerm::poly_factor(&kn * &kn);
        let y = gosper(&f).unwrap();
        // expected antidifference k^3/3 - (2n+1)k^2/2 + (6n^2+6n+1)k/6
        for n0 in 0..5i64 {
            for k0 in 0..8i64 {
                let expect = rat(k0.pow(3), 3) - rat((2 * n0 + 1) * k0 * k0, 2)
                    + rat((6 * n0 * n0 + 6 * n0 + 1) * k0, 6);
                let got = &y.eval(n0, k0).unwrap() - &y.eval(n0, 0).unwrap();
                assert_eq!(got, expect);
            }
        }
        // and indefinite_poly_sum gives it exactly, constant-free
        let s = indefinite_poly_sum(&(&kn * &kn), Var::K);
        assert!(s.coeff_of(Var::K, 0).is_zero());
        let diff = &s.shift(Var::K, 1) - &s;
        assert_eq!(diff, &kn * &kn);
    }

    #[test]
    fn indefinite_poly_sum_examples() {
        let one = Poly::one();
        assert_eq!(indefinite_poly_sum(&one, Var::K), kvar());
        let half_kk1 = RatFun::new(&kvar() * &Poly::linear(Var::K, 1, -1), Poly::from_int(2))
            .unwrap();
        let s = indefinite_poly_sum(&kvar(), Var::K);
        assert_eq!(RatFun::from_poly(s), half_kk1);
        let s2 = indefinite_poly_sum(&(&kvar() * &kvar()), Var::K);
        // k(k-1)(2k-1)/6
        let expect = &(&kvar() * &Poly::linear(Var::K, 1, -1)) * &Poly::linear(Var::K, 2, -1);
        assert_eq!(s2.scale(&rint(6)), expect);
    }

    fn random_term(rng: &mut StdRng) -> HyperTerm {
        let mut t = HyperTerm::from_rat(rat(rng.gen_range(1..5), 1));
        for _ in 0..rng.gen_range(1..3) {
            match rng.gen_range(0..4) {
                0 => {
                    t = t.mul(&HyperTerm::binomial(
                        LinForm::new(rng.gen_range(1..3), 0, rng.gen_range(0..3)),
                        LinForm::var(Var::K),
                    ));
                }
                1 => {
                    t = t.mul(&HyperTerm::factorial(LinForm::new(0, 1, rng.gen_range(0..3))));
                }
                2 => {
                    t = t.mul(&HyperTerm::power(
                        *[2, 3, -2].iter().nth(rng.gen_range(0..3)).unwrap(),
                        LinForm::new(0, 1, 0),
                    ));
                }
                _ => {
                    t = t.mul(&HyperTerm::poly_factor(Poly::linear(
                        Var::K,
                        1,
                        rng.gen_range(1..4),
                    )));
                }
            }
        }
        t
    }

    #[test]
    fn round_trip_on_random_terms() {
        let mut rng = StdRng::seed_from_u64(7);
        let mut found = 0;
        for _ in 0..100 {
            let a = random_term(&mut rng);
            // f = a(k+1) - a(k) = a * (rho - 1)
            let rho = a.ratio(Var::K);
            let diff = &rho - &RatFun::one();
            if diff.is_zero() {
                continue;
            }
            let f = apply_ratfun(&a, &diff);
            let y = gosper(&f);
            let y = y.expect("difference of a hypergeometric term must be summable");
            // Delta y = f exactly: certificate identity
            let ry = rational_quotient(&y, &f);
            assert!(ry.is_some());
            // numeric: Delta y = f wherever defined
            for k0 in 2..20 {
                let (Ok(y1), Ok(y0), Ok(f0)) =
                    (y.eval(3, k0 + 1), y.eval(3, k0), f.eval(3, k0))
                else {
                    continue;
                };
                assert_eq!(&y1 - &y0, f0);
            }
            found += 1;
        }
        assert!(found >= 80, "only {} usable random instances", found);
    }

    #[test]
    fn term_from_ratio_examples() {
        // ratio of C(2n,n): (2n+1)(2n+2)/(n+1)^2
        let cb = HyperTerm::binomial(LinForm::new(2, 0, 0), LinForm::var(Var::N));
        let rho = cb.ratio(Var::N);
        let t = term_from_ratio(&rho, Var::N).unwrap();
        for n0 in 0..10 {
            assert_eq!(t.eval(n0, 0).unwrap(), cb.eval(n0, 0).unwrap());
        }
        // constant ratio 2 -> 2^n
        let t = term_from_ratio(&RatFun::from_int(2), Var::N).unwrap();
        assert_eq!(t.eval(6, 0).unwrap(), rint(64));
        // ratio -(n+1)/(n+2) -> (-1)^n/(n+1)
        let rho = RatFun::new(
            Poly::linear(Var::N, -1, -1),
            Poly::linear(Var::N, 1, 2),
        )
        .unwrap();
        let t = term_from_ratio(&rho, Var::N).unwrap();
        assert_eq!(t.eval(3, 0).unwrap(), rat(-1, 4));
        // 1/n! style: ratio 1/(n+1)
        let rho = RatFun::new(Poly::one(), Poly::linear(Var::N, 1, 1)).unwrap();
        let t = term_from_ratio(&rho, Var::N).unwrap();
        assert_eq!(t.eval(4, 0).unwrap(), rat(1, 24));
    }

    #[test]
    fn rational_quotient_examples() {
        let c = HyperTerm::binomial(LinForm::var(Var::N), LinForm::var(Var::K));
        let kshift = c.shift(Var::K, -1);
        // C(n,k)/C(n,k-1) = (n-k+1)/k
        let q = rational_quotient(&c, &kshift).unwrap();
        let expect = RatFun::new(
            &Poly::var(Var::N) - &Poly::linear(Var::K, 1, -1),
            kvar(),
        )
        .unwrap();
        assert_eq!(q, expect);
        // C(n,k) vs 2^k: not a rational quotient
        let p = HyperTerm::power(2, LinForm::var(Var::K));
        assert!(rational_quotient(&c, &p).is_none());
        // 1/k is rational, k! is not
        let inv_k = HyperTerm::poly_factor(kvar()).pow(-1);
        let q = rational_quotient(&inv_k, &HyperTerm::one()).unwrap();
        assert_eq!(q, RatFun::new(Poly::one(), kvar()).unwrap());
        let fact = HyperTerm::factorial(LinForm::var(Var::K));
        assert!(rational_quotient(&fact, &HyperTerm::one()).is_none());
    }
}
