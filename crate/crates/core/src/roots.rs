//! Resultants, integer/rational root extraction, and dispersion.

use num_bigint::Sign;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{poly_gcd, rint, Int, Poly, Rat, Var};
use crate::ratfun::RatFun;

/// Resultant of `p` and `q` with respect to `v`, with the Sylvester
/// determinant sign convention. Coefficients in the remaining variables are
/// carried along exactly: the parameter variables are eliminated by
/// evaluation at enough integer points and Newton interpolation, so the
/// Euclidean remainder sequence only ever runs over plain rationals.
pub fn resultant(p: &Poly, q: &Poly, v: Var) -> Result<Poly> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroInput("resultant"));
    }
    let dp = p.degree(v).unwrap_or(0);
    let dq = q.degree(v).unwrap_or(0);
    let param = p
        .vars()
        .into_iter()
        .chain(q.vars())
        .find(|&w| w != v && (p.contains_var(w) || q.contains_var(w)));
    let Some(w) = param else {
        let r = res_field(to_upoly(p, v), to_upoly(q, v));
        return r
            .as_poly()
            .cloned()
            .ok_or_else(|| Error::Internal(format!("non-polynomial resultant: {r}")));
    };
    // degree of the resultant in the parameter
    let dw = dp * q.degree(w).unwrap_or(0) + dq * p.degree(w).unwrap_or(0);
    let lcp = p.lc(v);
    let lcq = q.lc(v);
    let mut nodes: Vec<Rat> = Vec::with_capacity(dw + 1);
    let mut values: Vec<Poly> = Vec::with_capacity(dw + 1);
    let mut t: i64 = 0;
    while nodes.len() <= dw {
        let x = Rat::from_integer(Int::from(t));
        t += 1;
        // only points where neither leading coefficient collapses
        if lcp.eval_var(w, &x).is_zero() || lcq.eval_var(w, &x).is_zero() {
            continue;
        }
        let pv = p.eval_var(w, &x);
        let qv = q.eval_var(w, &x);
        values.push(resultant(&pv, &qv, v)?);
        nodes.push(x);
    }
    Ok(newton_interpolate(&nodes, &values, w))
}

/// Newton interpolation with polynomial values at rational nodes.
fn newton_interpolate(nodes: &[Rat], values: &[Poly], w: Var) -> Poly {
    let n = nodes.len();
    let mut dd: Vec<Poly> = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            let den = &nodes[i] - &nodes[i - level];
            dd[i] = num.scale(&(Rat::one() / den));
        }
    }
    let mut acc = Poly::zero();
    let mut basis = Poly::one();
    for i in 0..n {
        acc = &acc + &(&dd[i] * &basis);
        basis = &basis * &(&Poly::var(w) - &Poly::from_rat(nodes[i].clone()));
    }
    acc
}

fn to_upoly(p: &Poly, v: Var) -> Vec<RatFun> {
    let d = p.degree(v).unwrap_or(0);
    (0..=d).map(|i| RatFun::from_poly(p.coeff_of(v, i))).collect()
}

fn udeg(p: &[RatFun]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

fn utrim(mut p: Vec<RatFun>) -> Vec<RatFun> {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

/// `res(f, g) = (-1)^(deg f * deg g) * lc(g)^(deg f - deg r) * res(g, r)`
/// with `r = f mod g`, over the fraction field of the coefficient ring.
fn res_field(f: Vec<RatFun>, g: Vec<RatFun>) -> RatFun {
    let f = utrim(f);
    let g = utrim(g);
    let (df, dg) = (udeg(&f), udeg(&g));
    if df == 0 {
        return f[0].pow(dg as i32).expect("nonzero base");
    }
    if dg == 0 {
        return g[0].pow(df as i32).expect("nonzero base");
    }
    if df < dg {
        let sign = if df % 2 == 1 && dg % 2 == 1 {
            -&RatFun::one()
        } else {
            RatFun::one()
        };
        return &sign * &res_field(g, f);
    }
    // r = f mod g by field division
    let lg = g[dg].clone();
    let mut r = f.clone();
    for i in (dg..=df).rev() {
        let c = &r[i] / &lg;
        if c.is_zero() {
            continue;
        }
        for t in 0..=dg {
            let sub = &c * &g[t];
            r[i - dg + t] = &r[i - dg + t] - &sub;
        }
    }
    let r = utrim(r);
    if r.iter().all(|c| c.is_zero()) {
        return RatFun::zero();
    }
    let dr = udeg(&r);
    let sign = if df % 2 == 1 && dg % 2 == 1 { -1 } else { 1 };
    let scale = lg.pow((df - dr) as i32).expect("nonzero lc");
    let tail = res_field(g, r);
    let out = &scale * &tail;
    if sign < 0 {
        -&out
    } else {
        out
    }
}

// ---- univariate rational-coefficient helpers for Sturm sequences ----

#[derive(Clone, Debug)]
struct UPoly(Vec<Rat>); // ascending, trimmed

impl UPoly {
    fn from_poly(p: &Poly, v: Var) -> Result<UPoly> {
        let d = p.degree(v).unwrap_or(0);
        let mut cs = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let c = p.coeff_of(v, i);
            match c.as_rat() {
                Some(r) => cs.push(r),
                None => return Err(Error::SymbolicCoefficients(v)),
            }
        }
        Ok(UPoly(cs).trim())
    }

    fn trim(mut self) -> UPoly {
        while self.0.len() > 1 && self.0.last().map_or(false, |c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    fn deg(&self) -> usize {
        self.0.len() - 1
    }

    fn lc(&self) -> &Rat {
        self.0.last().unwrap()
    }

    fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn derivative(&self) -> UPoly {
        if self.0.len() == 1 {
            return UPoly(vec![Rat::zero()]);
        }
        UPoly(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * Rat::from_integer(Int::from(i as i64 + 1)))
                .collect(),
        )
        .trim()
    }

    fn rem(&self, g: &UPoly) -> UPoly {
        let dg = g.deg();
        if dg == 0 {
            return UPoly(vec![Rat::zero()]);
        }
        let mut r = self.0.clone();
        let lg = g.lc();
        while r.len() > dg {
            let c = r.last().unwrap() / lg;
            let dr = r.len() - 1;
            for t in 0..=dg {
                let sub = &c * &g.0[t];
                r[dr - dg + t] -= sub;
            }
            // leading entry is now exactly zero
            r.pop();
            while r.len() > 1 && r.last().unwrap().is_zero() {
                r.pop();
            }
        }
        UPoly(r).trim()
    }

    /// Divide out a known root exactly (synthetic division).
    fn deflate(&self, root: &Rat) -> UPoly {
        let mut out = vec![Rat::zero(); self.0.len() - 1];
        let mut carry = Rat::zero();
        for i in (0..self.0.len()).rev() {
            let val = &self.0[i] + &carry;
            if i == 0 {
                debug_assert!(val.is_zero(), "deflate by non-root");
                break;
            }
            out[i - 1] = val.clone();
            carry = val * root;
        }
        UPoly(out).trim()
    }

    fn gcd(&self, g: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), g.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }
}

fn sign_of(x: &Rat) -> i32 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn sturm_variations(chain: &[UPoly], x: &Rat) -> usize {
    let mut count = 0;
    let mut last = 0;
    for p in chain {
        let s = sign_of(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// All integer roots of a univariate polynomial in `v` with rational
/// coefficients. Errors on symbolic (nested) coefficients.
pub fn integer_roots(p: &Poly, v: Var) -> Result<Vec<Int>> {
    let up = UPoly::from_poly(p, v)?;
    if up.is_zero() {
        return Err(Error::ZeroInput("integer_roots"));
    }
    let mut roots: Vec<Int> = Vec::new();
    // strip powers of v
    let mut q = up;
    while q.0[0].is_zero() && q.deg() > 0 {
        q = UPoly(q.0[1..].to_vec()).trim();
        if !roots.contains(&Int::zero()) {
            roots.push(Int::zero());
        }
    }
    // square-free part
    if q.deg() > 0 {
        let sf = {
            let g = q.gcd(&q.derivative());
            if g.deg() == 0 {
                q.clone()
            } else {
                // exact division via repeated deflation is not available for
                // non-linear g; use field division
                div_field(&q, &g)
            }
        };
        collect_integer_roots(sf, &mut roots);
    }
    roots.sort();
    Ok(roots)
}

fn div_field(p: &UPoly, g: &UPoly) -> UPoly {
    let dg = g.deg();
    let lg = g.lc();
    if dg == 0 {
        return UPoly(p.0.iter().map(|c| c / lg).collect()).trim();
    }
    let mut r = p.0.clone();
    let mut quot = vec![Rat::zero(); r.len().saturating_sub(dg)];
    while r.len() > dg {
        let c = r.last().unwrap() / lg;
        let pos = r.len() - 1 - dg;
        quot[pos] = c.clone();
        for t in 0..=dg {
            let sub = &c * &g.0[t];
            r[pos + t] -= sub;
        }
        r.pop();
    }
    UPoly(quot).trim()
}

fn collect_integer_roots(mut q: UPoly, roots: &mut Vec<Int>) {
    loop {
        if q.deg() == 0 {
            return;
        }
        if q.deg() == 1 {
            let r = -&q.0[0] / &q.0[1];
            if r.denom().is_one() && !roots.contains(r.numer()) {
                roots.push(r.numer().clone());
            }
            return;
        }
        // Cauchy bound
        let lc = q.lc().abs();
        let mut bound = Rat::one();
        for c in &q.0 {
            let t = c.abs() / &lc;
            if t > bound {
                bound = t;
            }
        }
        let bound = bound + Rat::one();
        let chain = sturm_chain(&q);
        let lo = -bound.clone();
        let hi = bound;
        match isolate(&q, &chain, &lo, &hi, roots) {
            Ok(()) => return,
            Err(root_hit) => {
                // a bisection point landed exactly on a root: record if
                // integral, deflate, restart
                if root_hit.denom().is_one() && !roots.contains(root_hit.numer()) {
                    roots.push(root_hit.numer().clone());
                }
                q = q.deflate(&root_hit);
            }
        }
    }
}

fn sturm_chain(q: &UPoly) -> Vec<UPoly> {
    let mut chain = vec![q.clone(), q.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() || chain[n - 1].deg() == 0 {
            break;
        }
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(UPoly(r.0.iter().map(|c| -c).collect()));
    }
    chain
}

/// Bisect until every real root is isolated in an interval of width <= 1,
/// then test the integers inside. `Err(x)` reports a bisection point that is
/// itself a root.
fn isolate(
    q: &UPoly,
    chain: &[UPoly],
    lo: &Rat,
    hi: &Rat,
    roots: &mut Vec<Int>,
) -> std::result::Result<(), Rat> {
    if q.eval(lo).is_zero() {
        return Err(lo.clone());
    }
    if q.eval(hi).is_zero() {
        return Err(hi.clone());
    }
    let count = sturm_variations(chain, lo) as i64 - sturm_variations(chain, hi) as i64;
    if count <= 0 {
        return Ok(());
    }
    if hi - lo <= Rat::one() {
        // at most two integers can sit in (lo, hi]
        let mut m = lo.ceil().to_integer();
        while Rat::from_integer(m.clone()) <= *hi {
            if Rat::from_integer(m.clone()) > *lo
                && q.eval(&Rat::from_integer(m.clone())).is_zero()
                && !roots.contains(&m)
            {
                roots.push(m.clone());
            }
            m += 1;
        }
        return Ok(());
    }
    let mid = (lo + hi) / Rat::from_integer(Int::from(2));
    isolate(q, chain, lo, &mid, roots)?;
    isolate(q, chain, &mid, hi, roots)
}

/// Rational roots `u/w` of a univariate polynomial (w > 0, gcd(u,w)=1).
/// Denominators are searched among divisors of the leading coefficient up to
/// a small bound; callers treat a miss as "no split found".
pub fn rational_roots(p: &Poly, v: Var) -> Result<Vec<Rat>> {
    let up = UPoly::from_poly(p, v)?;
    if up.is_zero() {
        return Err(Error::ZeroInput("rational_roots"));
    }
    // clear denominators, take integer lc
    let mut den = Int::one();
    for c in &up.0 {
        den = num_integer::lcm(den, c.denom().clone());
    }
    let lc: Int = (up.lc() * Rat::from_integer(den.clone())).to_integer().abs();
    let mut dens = vec![Int::one()];
    let mut d = Int::from(2);
    let cap = Int::from(1_000_000);
    let mut rem = lc.clone();
    while &d * &d <= rem && d <= cap {
        if (&rem % &d).is_zero() {
            while (&rem % &d).is_zero() {
                rem /= &d;
            }
            dens.push(d.clone());
        }
        d += 1;
    }
    if rem > Int::one() && rem <= cap {
        dens.push(rem);
    }
    // also try all divisors assembled from the found prime powers of lc,
    // small cases only
    let mut divisors = vec![Int::one()];
    let mut t = Int::from(2);
    while &t * &t <= lc && t < Int::from(10_000) {
        if (&lc % &t).is_zero() {
            divisors.push(t.clone());
            divisors.push(&lc / &t);
        }
        t += 1;
    }
    if lc > Int::one() && lc < Int::from(100_000_000) {
        divisors.push(lc.clone());
    }
    divisors.extend(dens);
    divisors.sort();
    divisors.dedup();

    let mut out: Vec<Rat> = Vec::new();
    for w in divisors {
        // integer roots of w^deg * p(v/w)
        let scaled = scale_arg(&up, &w);
        let mut proots = Vec::new();
        let sp = upoly_to_poly(&scaled, v);
        if sp.is_zero() {
            continue;
        }
        if let Ok(rs) = integer_roots(&sp, v) {
            proots.extend(rs);
        }
        for u in proots {
            let cand = Rat::new(u, w.clone());
            if up.eval(&cand).is_zero() && !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
    out.sort();
    Ok(out)
}

fn scale_arg(p: &UPoly, w: &Int) -> UPoly {
    // q(x) = w^deg * p(x/w): coefficient i gets w^(deg-i)
    let d = p.deg();
    UPoly(
        p.0.iter()
            .enumerate()
            .map(|(i, c)| c * Rat::from_integer(w.pow((d - i) as u32)))
            .collect(),
    )
    .trim()
}

fn upoly_to_poly(p: &UPoly, v: Var) -> Poly {
    let mut out = Poly::zero();
    for (i, c) in p.0.iter().enumerate() {
        out = &out + &Poly::monomial(v, i as u16, c.clone());
    }
    out
}

/// Largest `j >= 0` with `deg gcd(p(v), q(v+j)) > 0`; `None` if no such `j`.
///
/// Coefficients may involve other tower variables; the shift parameter is
/// encoded in a variable not occurring in either input.
pub fn dispersion_set(p: &Poly, q: &Poly, v: Var) -> Result<Vec<i64>> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroInput("dispersion"));
    }
    if !p.contains_var(v) || !q.contains_var(v) {
        return Ok(Vec::new());
    }
    // univariate inputs: the shift is at most the sum of the root bounds, so
    // scan gcds directly instead of building the (often huge) resultant
    if p.vars() == [v] && q.vars() == [v] {
        let bound = root_bound(p, v)? + root_bound(q, v)? + 1;
        let mut out = Vec::new();
        for h in 0..=bound {
            let g = poly_gcd(p, &q.shift(v, h));
            if !g.is_constant() {
                out.push(h);
            }
        }
        return Ok(out);
    }
    // parameterized inputs: specializing the parameters can only enlarge the
    // set of shifts at which a common factor appears, so candidates from one
    // good specialization are a superset of the true set; each candidate is
    // then confirmed by a symbolic gcd
    let params: Vec<Var> = {
        let mut vs = p.vars();
        vs.extend(q.vars());
        vs.sort();
        vs.dedup();
        vs.into_iter().filter(|w| *w != v).collect()
    };
    let (ps, qs) = {
        let mut t = 1i64;
        loop {
            let point: Vec<(Var, Rat)> = params.iter().map(|w| (*w, rint(t))).collect();
            let mut sp = p.clone();
            let mut sq = q.clone();
            for (w, val) in &point {
                sp = sp.eval_var(*w, val);
                sq = sq.eval_var(*w, val);
            }
            if sp.degree(v) == p.degree(v) && sq.degree(v) == q.degree(v) {
                break (sp, sq);
            }
            t += 1;
        }
    };
    let bound = root_bound(&ps, v)? + root_bound(&qs, v)? + 1;
    let mut out = Vec::new();
    for h in 0..=bound {
        if poly_gcd(&ps, &qs.shift(v, h)).is_constant() {
            continue;
        }
        if poly_gcd(p, &q.shift(v, h)).degree(v).unwrap_or(0) > 0 {
            out.push(h);
        }
    }
    Ok(out)
}

/// Integer upper bound on the magnitude of the real roots (Cauchy bound).
fn root_bound(p: &Poly, v: Var) -> Result<i64> {
    let up = UPoly::from_poly(p, v)?;
    let lc = up.lc().abs();
    let mut bound = Rat::one();
    for c in &up.0 {
        let t = c.abs() / &lc;
        if t > bound {
            bound = t;
        }
    }
    let b = (bound + Rat::one()).ceil().to_integer();
    i64::try_from(&b).map_err(|_| Error::Internal("root bound exceeds i64".into()))
}

/// Fold a multivariate polynomial to the gcd over all coefficients of the
/// variables other than `keep`.
fn gcd_collapse(p: &Poly, keep: Var) -> Poly {
    let mut cur = p.clone();
    loop {
        let other = cur.vars().into_iter().find(|w| *w != keep);
        match other {
            None => return cur,
            Some(w) => {
                let mut g = Poly::zero();
                for d in 0..=cur.degree(w).unwrap_or(0) {
                    let c = cur.coeff_of(w, d);
                    if !c.is_zero() {
                        g = poly_gcd(&g, &c);
                    }
                }
                cur = g;
            }
        }
    }
}

pub fn dispersion(p: &Poly, q: &Poly, v: Var) -> Result<Option<i64>> {
    Ok(dispersion_set(p, q, v)?.into_iter().max())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rint};

    fn k() -> Poly {
        Poly::var(Var::K)
    }
    fn n() -> Poly {
        Poly::var(Var::N)
    }

    #[test]
    fn resultant_examples() {
        // res_k(k^2+1, k-2) = 5
        let p = &(&k() * &k()) + &Poly::one();
        let q = Poly::linear(Var::K, 1, -2);
        assert_eq!(resultant(&p, &q, Var::K).unwrap(), Poly::from_int(5));
        // res_k(k, k) = 0
        assert_eq!(resultant(&k(), &k(), Var::K).unwrap(), Poly::zero());
        // res_k(k-n, k+n) = 2n
        let r = resultant(&(&k() - &n()), &(&k() + &n()), Var::K).unwrap();
        assert_eq!(r, Poly::linear(Var::N, 2, 0));
    }

    #[test]
    fn resultant_zero_iff_common_factor() {
        let common = Poly::linear(Var::K, 1, -4);
        let p = &common * &Poly::linear(Var::K, 1, 1);
        let q = &common * &Poly::linear(Var::K, 2, 3);
        assert!(resultant(&p, &q, Var::K).unwrap().is_zero());
        let q2 = Poly::linear(Var::K, 1, 1);
        assert!(!resultant(&common, &q2, Var::K).unwrap().is_zero());
    }

    #[test]
    fn integer_roots_examples() {
        // (k-3)(2k+1) -> {3}
        let p = &Poly::linear(Var::K, 1, -3) * &Poly::linear(Var::K, 2, 1);
        assert_eq!(integer_roots(&p, Var::K).unwrap(), vec![Int::from(3)]);
        // k^2+1 -> {}
        let p = &(&k() * &k()) + &Poly::one();
        assert!(integer_roots(&p, Var::K).unwrap().is_empty());
        // (k+4)(k-7)^2 -> {-4, 7}
        let p = &Poly::linear(Var::K, 1, 4) * &Poly::linear(Var::K, 1, -7).pow(2);
        assert_eq!(
            integer_roots(&p, Var::K).unwrap(),
            vec![Int::from(-4), Int::from(7)]
        );
        // rejects symbolic coefficients
        assert!(integer_roots(&(&k() + &n()), Var::K).is_err());
    }

    #[test]
    fn integer_roots_large_coefficients() {
        // (k - 50) * (big irreducible-ish quadratic)
        let big = rint(1_000_000_007);
        let q = &(&k() * &k()).scale(&big) + &Poly::from_rat(rat(987_654_321_123, 1));
        let p = &q * &Poly::linear(Var::K, 1, -50);
        assert_eq!(integer_roots(&p, Var::K).unwrap(), vec![Int::from(50)]);
    }

    #[test]
    fn rational_roots_examples() {
        // (2k+1)(k-3) -> {-1/2, 3}
        let p = &Poly::linear(Var::K, 2, 1) * &Poly::linear(Var::K, 1, -3);
        assert_eq!(
            rational_roots(&p, Var::K).unwrap(),
            vec![rat(-1, 2), rat(3, 1)]
        );
    }

    #[test]
    fn dispersion_examples() {
        // p=k, q=k -> 0
        assert_eq!(dispersion(&k(), &k(), Var::K).unwrap(), Some(0));
        // p=k+5, q=k -> 5
        assert_eq!(
            dispersion(&Poly::linear(Var::K, 1, 5), &k(), Var::K).unwrap(),
            Some(5)
        );
        // p=k^2+1, q=k -> None
        let p = &(&k() * &k()) + &Poly::one();
        assert_eq!(dispersion(&p, &k(), Var::K).unwrap(), None);
        // symbolic coefficients: p = k-n, q = k-n shifted
        let p = &k() - &n();
        let q = p.shift(Var::K, -3); // k-3-n has common factor with p at j=3
        assert_eq!(dispersion(&p, &q, Var::K).unwrap(), Some(3));
    }

    #[test]
    fn dispersion_of_self_shift_at_least_j0() {
        for j0 in [0i64, 1, 4, 9] {
            let p = &(&(&k() * &k()) + &(&n() * &k())) + &Poly::one();
            let q = p.shift(Var::K, -j0);
            let d = dispersion(&p, &q, Var::K).unwrap().unwrap();
            assert!(d >= j0);
        }
    }
}
