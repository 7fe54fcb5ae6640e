//! Indefinite summation by parts against powers of harmonic numbers.
//!
//! For `sum_{k=0}^{L} f(k) H_{k+o}^m` with Gosper-summable `f`, write
//! `f = delta a` and move the difference across the sum; the cross terms
//! `a(k+1) delta(H^m)` have strictly smaller harmonic power, so the method
//! recurses down to plain hypergeometric and rational sums. Results live in
//! `ClosedForm` over the basis `H_n`, `H_2n`, `H^(2)_n`.

use num_traits::{One, Pow, Zero};

use crate::closed::{Basis, ClosedForm};
use crate::error::{Error, Result};
use crate::gosper::{as_rational, gosper, indefinite_poly_sum};
use crate::hyper::{HyperTerm, LinForm};
use crate::poly::{rat, rint, Poly, Rat, Var};
use crate::ratfun::RatFun;

/// `H_{a n + c}` expanded over the basis symbols `H_n` and `H_2n`.
pub fn harmonic_symbol(arg: LinForm) -> Result<ClosedForm> {
    harmonic_any(arg, 1)
}

/// `H^(2)_{a n + c}` expanded over the basis symbol `H^(2)_n`.
pub fn harmonic2_symbol(arg: LinForm) -> Result<ClosedForm> {
    harmonic_any(arg, 2)
}

fn harmonic_any(arg: LinForm, order: u32) -> Result<ClosedForm> {
    if arg.k != 0 {
        return Err(Error::UnsupportedBasisSymbol(format!("H({})", arg)));
    }
    let base = match (arg.n, order) {
        (0, _) => {
            let mut v = Rat::zero();
            for i in 1..=arg.c {
                v = &v + &(Rat::one() / rint(i).pow(order as i32));
            }
            return Ok(ClosedForm::from_ratfun(RatFun::from_rat(v)));
        }
        (1, 1) => Basis::Hn,
        (2, 1) => Basis::H2n,
        (1, 2) => Basis::Hn2,
        _ => return Err(Error::UnsupportedBasisSymbol(format!("H({})", arg))),
    };
    // H_{sn+c} = H_{sn} + sum_{i=1..c} 1/(sn+i), inverted for c < 0
    let mut cf = ClosedForm::symbol(base);
    let inv = |i: i64| {
        let den = Poly::linear(Var::N, arg.n, i).pow(order);
        ClosedForm::from_ratfun(RatFun::new(Poly::one(), den).expect("nonzero"))
    };
    if arg.c >= 0 {
        for i in 1..=arg.c {
            cf = cf.add(&inv(i));
        }
    } else {
        for i in (arg.c + 1)..=0 {
            cf = cf.sub(&inv(i));
        }
    }
    Ok(cf)
}

fn cf_pow(cf: &ClosedForm, e: u32) -> ClosedForm {
    let mut out = ClosedForm::from_ratfun(RatFun::one());
    for _ in 0..e {
        out = out.mul(cf);
    }
    out
}

fn binom_small(p: u32, t: u32) -> Rat {
    let mut v = Rat::one();
    for i in 0..t {
        v = &v * &rat((p - i) as i64, (i + 1) as i64);
    }
    v
}

/// The term `h` with `k` replaced by the integer-linear form `l` in `n`.
fn at_form(h: &HyperTerm, l: LinForm) -> HyperTerm {
    h.subst_k(l.n, l.c)
}

fn shift_form(l: LinForm, j: i64) -> LinForm {
    LinForm::new(l.n, l.k, l.c + j)
}

/// `sum_{k=0}^{hi} f(n,k) H_{k+o}^m` as a closed form in `n`.
///
/// The harmonic argument is `arg = a n + k + c`, so `o = a n + c`; `m` is the
/// power of the harmonic weight, with `m = 0` meaning a plain sum.
pub fn abel_gosper_harmonic(
    f: &HyperTerm,
    m: u32,
    arg: LinForm,
    hi: LinForm,
) -> Result<ClosedForm> {
    if arg.k != 1 {
        return Err(Error::UnsupportedBasisSymbol(format!("H({})", arg)));
    }
    let o = LinForm::new(arg.n, 0, arg.c);
    sum_weighted(f, m, o, hi)
}

fn sum_weighted(f: &HyperTerm, p: u32, o: LinForm, hi: LinForm) -> Result<ClosedForm> {
    if f.is_zero() {
        return Ok(ClosedForm::zero());
    }
    if p == 0 {
        return sum_plain(f, hi);
    }
    if let Some(a) = gosper(f) {
        // sum (delta a) b = a(L+1) b(L+1) - a(0) b(0) - sum a(k+1) (delta b)(k)
        let upper_arg = shift_form(LinForm::new(o.n + hi.n, 0, o.c + hi.c), 1);
        let mut out = ClosedForm::from_hyper(at_form(&a, shift_form(hi, 1)))
            .mul(&cf_pow(&harmonic_symbol(upper_arg)?, p));
        let a0 = at_form(&a, LinForm::constant(0));
        if !a0.is_zero() {
            out = out.sub(&ClosedForm::from_hyper(a0).mul(&cf_pow(&harmonic_symbol(o)?, p)));
        }
        // delta(H_{k+o}^p) = sum_{t<p} C(p,t) H_{k+o}^t / (k+o+1)^(p-t)
        let lin = &Poly::linear(Var::N, o.n, o.c + 1) + &Poly::var(Var::K);
        for t in 0..p {
            let ft = a
                .shift(Var::K, 1)
                .mul(&HyperTerm::poly_factor(lin.clone()).pow(-((p - t) as i32)));
            let inner = sum_weighted(&ft, t, o, hi)?;
            out = out.sub(&inner.scale_rat(&binom_small(p, t)));
        }
        return Ok(out);
    }
    // not Gosper-summable: split a rational summand over powers of (k+o+1)
    let Some(r) = as_rational(f) else {
        return Err(Error::GosperFails);
    };
    let d = shift_form(o, 1);
    let (poly_part, ginv, poles) = split_at_pole(&r, d)?;
    let mut out = ClosedForm::zero();
    if !poly_part.is_zero() {
        let inner = sum_weighted(&HyperTerm::poly_factor(poly_part), p, o, hi)?;
        out = out.add(&inner.scale(&ginv));
    }
    for (s, c) in poles {
        if s == 1 && p == 1 {
            // sum H_{k+o}/(k+o+1) = (1/2)(H^2 - H^(2)) differenced at o+L+1, o
            let top = shift_form(LinForm::new(o.n + hi.n, 0, o.c + hi.c), 1);
            let h2 = cf_pow(&harmonic_symbol(top)?, 2).sub(&cf_pow(&harmonic_symbol(o)?, 2));
            let g2 = harmonic2_symbol(top)?.sub(&harmonic2_symbol(o)?);
            out = out.add(&h2.sub(&g2).scale(&(&c * &RatFun::from_rat(rat(1, 2)))));
        } else {
            return Err(Error::UnsupportedBasisSymbol(format!(
                "sum of H^{} / (k + {})^{}",
                p, d, s
            )));
        }
    }
    Ok(out)
}

/// Plain sum of a hypergeometric term: Gosper when possible, else a rational
/// summand split into a polynomial part and harmonic pieces.
fn sum_plain(f: &HyperTerm, hi: LinForm) -> Result<ClosedForm> {
    if let Some(a) = gosper(f) {
        let up = ClosedForm::from_hyper(at_form(&a, shift_form(hi, 1)));
        let a0 = at_form(&a, LinForm::constant(0));
        return Ok(up.sub(&ClosedForm::from_hyper(a0)));
    }
    let Some(r) = as_rational(f) else {
        return Err(Error::GosperFails);
    };
    let d = pole_form(r.den()).ok_or(Error::GosperFails)?;
    let (poly_part, ginv, poles) = split_at_pole(&r, d)?;
    let mut out = ClosedForm::zero();
    if !poly_part.is_zero() {
        let s = indefinite_poly_sum(&poly_part, Var::K);
        let upper = s.subst(Var::K, &form_poly(shift_form(hi, 1)));
        let lower = s.subst(Var::K, &Poly::zero());
        let total = &RatFun::from_poly(&upper - &lower) * &ginv;
        out = out.add(&ClosedForm::from_ratfun(total));
    }
    for (s, c) in poles {
        // sum_{k=0}^{L} (k+d)^{-s} = H^(s)_{L+d} - H^(s)_{d-1}
        let top = LinForm::new(d.n + hi.n, 0, d.c + hi.c);
        let bot = shift_form(d, -1);
        let piece = match s {
            1 => harmonic_symbol(top)?.sub(&harmonic_symbol(bot)?),
            2 => harmonic2_symbol(top)?.sub(&harmonic2_symbol(bot)?),
            _ => {
                return Err(Error::UnsupportedBasisSymbol(format!(
                    "sum of (k + {})^-{}",
                    d, s
                )))
            }
        };
        out = out.add(&piece.scale(&c));
    }
    Ok(out)
}

fn form_poly(l: LinForm) -> Poly {
    &Poly::linear(Var::N, l.n, l.c) + &Poly::var(Var::K).scale(&rint(l.k))
}

/// Guess the integer-linear pole `k + d` of a denominator in `k`.
fn pole_form(den: &Poly) -> Option<LinForm> {
    let e = den.degree(Var::K)? as u32;
    if e == 0 {
        return None;
    }
    // den = gamma(n) (k + an + c)^e forces lower coefficients proportional
    // to binomial multiples of the top two
    let top = den.coeff_of(Var::K, e as usize);
    let next = den.coeff_of(Var::K, e as usize - 1);
    let q = next.div_exact(&top.scale(&rint(e as i64)))?;
    if q.degree(Var::N).unwrap_or(0) > 1 || q.contains_var(Var::K) {
        return None;
    }
    let a = q.coeff_of(Var::N, 1).as_rat()?;
    let c = q.coeff_of(Var::N, 0).as_rat()?;
    if !a.is_integer() || !c.is_integer() {
        return None;
    }
    Some(LinForm::new(
        a.to_integer().try_into().ok()?,
        0,
        c.to_integer().try_into().ok()?,
    ))
}

/// Write `r = (1/gamma(n)) poly(n,k) + sum_s c_s(n) / (k+d)^s`, failing when
/// the denominator is not `gamma(n) (k+d)^e`. The `k`-free factor `1/gamma`
/// is returned separately so callers can scale it through the sum.
fn split_at_pole(r: &RatFun, d: LinForm) -> Result<(Poly, RatFun, Vec<(u32, RatFun)>)> {
    let lin = form_poly(LinForm::new(d.n, 1, d.c));
    let e = r.den().degree(Var::K).unwrap_or(0) as u32;
    let gamma = r
        .den()
        .div_exact(&lin.pow(e))
        .ok_or(Error::GosperFails)?;
    if gamma.degree(Var::K).unwrap_or(0) > 0 {
        return Err(Error::GosperFails);
    }
    // expand the numerator in powers of (k+d): substitute k -> k - d
    let shifted = r.num().subst(
        Var::K,
        &(&Poly::var(Var::K) - &Poly::linear(Var::N, d.n, d.c)),
    );
    let ginv = RatFun::new(Poly::one(), gamma).expect("nonzero denominator");
    let mut poly_part = Poly::zero();
    let mut poles = Vec::new();
    let deg = shifted.degree(Var::K).unwrap_or(0) as u32;
    for j in 0..=deg {
        let beta = shifted.coeff_of(Var::K, j as usize);
        if beta.is_zero() {
            continue;
        }
        if j >= e {
            poly_part = &poly_part + &(&beta * &lin.pow(j - e));
        } else {
            poles.push((e - j, &RatFun::from_poly(beta) * &ginv));
        }
    }
    Ok((poly_part, ginv, poles))
}

/// `sum_{k=0}^{n} u(k) H_k = p(n) H_n - q(n)` for a polynomial weight.
pub fn spiess(u: &Poly) -> (Poly, Poly) {
    let big_u = indefinite_poly_sum(u, Var::K);
    let p = big_u.shift(Var::K, 1);
    let w = p
        .div_exact(&Poly::linear(Var::K, 1, 1))
        .expect("U(0) = 0 makes U(k+1) divisible by k+1");
    let x = indefinite_poly_sum(&w, Var::K);
    let q = &x.shift(Var::K, 1) - &w;
    let n = Poly::var(Var::N);
    (p.subst(Var::K, &n), q.subst(Var::K, &n))
}
