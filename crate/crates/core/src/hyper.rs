//! Hypergeometric terms in `n` and `k`.
//!
//! A term is a rational constant times a product of atoms: factorials and
//! binomials of integer-linear forms, integer-base powers, and polynomial
//! factors. Atoms give exact evaluation with the usual support conventions
//! (binomials vanish outside their range, factorials of negative integers
//! annihilate the term); shift quotients are derived as rational functions.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::poly::{rint, Int, Poly, Rat, Var};
use crate::ratfun::RatFun;

/// Integer-linear form `a*n + b*k + c`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct LinForm {
    pub n: i64,
    pub k: i64,
    pub c: i64,
}

impl LinForm {
    pub fn new(n: i64, k: i64, c: i64) -> LinForm {
        LinForm { n, k, c }
    }

    pub fn constant(c: i64) -> LinForm {
        LinForm { n: 0, k: 0, c }
    }

    pub fn var(v: Var) -> LinForm {
        match v {
            Var::N => LinForm { n: 1, k: 0, c: 0 },
            Var::K => LinForm { n: 0, k: 1, c: 0 },
            _ => panic!("hypergeometric terms range over n and k"),
        }
    }

    pub fn coeff(&self, v: Var) -> i64 {
        match v {
            Var::N => self.n,
            Var::K => self.k,
            _ => 0,
        }
    }

    pub fn shift(&self, v: Var, j: i64) -> LinForm {
        LinForm {
            c: self.c + self.coeff(v) * j,
            ..*self
        }
    }

    /// Substitute `k := a*n + c0`.
    pub fn subst_k(&self, a: i64, c0: i64) -> LinForm {
        LinForm {
            n: self.n + self.k * a,
            k: 0,
            c: self.c + self.k * c0,
        }
    }

    pub fn eval(&self, n0: i64, k0: i64) -> i64 {
        self.n * n0 + self.k * k0 + self.c
    }

    pub fn as_poly(&self) -> Poly {
        &Poly::linear(Var::N, self.n, self.c) + &Poly::monomial(Var::K, 1, rint(self.k))
    }

    pub fn is_constant(&self) -> bool {
        self.n == 0 && self.k == 0
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_poly())
    }
}

/// A multiplicative atom of a hypergeometric term.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Atom {
    /// `(a*n + b*k + c)!`
    Factorial(LinForm),
    /// `C(top, bottom)`
    Binomial(LinForm, LinForm),
    /// `base^(a*n + b*k + c)` with a nonzero integer base
    Power(i64, LinForm),
    /// A polynomial in `n` and `k` as a multiplicative factor.
    PolyFactor(Poly),
}

impl Atom {
    /// Shift quotient `atom(v+1)/atom(v)` as a rational function.
    fn ratio(&self, v: Var) -> RatFun {
        match self {
            Atom::Factorial(l) => {
                let m = l.coeff(v);
                let p = l.as_poly();
                rising_ratio(&p, m)
            }
            Atom::Binomial(a, b) => {
                let top = Atom::Factorial(*a).ratio(v);
                let bot = Atom::Factorial(*b).ratio(v);
                let rest = Atom::Factorial(lin_sub(a, b)).ratio(v);
                &top / &(&bot * &rest)
            }
            Atom::Power(base, l) => {
                let m = l.coeff(v);
                RatFun::from_rat(int_pow(*base, m))
            }
            Atom::PolyFactor(p) => {
                let shifted = p.shift(v, 1);
                RatFun::new(shifted, p.clone()).expect("nonzero polynomial factor")
            }
        }
    }

    fn shift(&self, v: Var, j: i64) -> (Atom, Rat) {
        match self {
            Atom::Factorial(l) => (Atom::Factorial(l.shift(v, j)), Rat::one()),
            Atom::Binomial(a, b) => (Atom::Binomial(a.shift(v, j), b.shift(v, j)), Rat::one()),
            Atom::Power(base, l) => {
                // fold the constant offset of the exponent into the term constant
                let s = l.shift(v, j);
                let folded = LinForm { c: 0, ..s };
                (Atom::Power(*base, folded), int_pow(*base, s.c))
            }
            Atom::PolyFactor(p) => (Atom::PolyFactor(p.shift(v, j)), Rat::one()),
        }
    }

    fn subst_k(&self, a: i64, c0: i64) -> (Atom, Rat) {
        match self {
            Atom::Factorial(l) => (Atom::Factorial(l.subst_k(a, c0)), Rat::one()),
            Atom::Binomial(t, b) => (Atom::Binomial(t.subst_k(a, c0), b.subst_k(a, c0)), Rat::one()),
            Atom::Power(base, l) => {
                let s = l.subst_k(a, c0);
                let folded = LinForm { c: 0, ..s };
                (Atom::Power(*base, folded), int_pow(*base, s.c))
            }
            Atom::PolyFactor(p) => {
                let sub = p.subst(Var::K, &Poly::linear(Var::N, a, c0));
                (Atom::PolyFactor(sub), Rat::one())
            }
        }
    }
}

fn lin_sub(a: &LinForm, b: &LinForm) -> LinForm {
    LinForm {
        n: a.n - b.n,
        k: a.k - b.k,
        c: a.c - b.c,
    }
}

/// `(l+1)(l+2)...(l+m)` for `m > 0`, inverse product for `m < 0`, one for zero.
fn rising_ratio(l: &Poly, m: i64) -> RatFun {
    if m >= 0 {
        let mut num = Poly::one();
        for i in 1..=m {
            num = &num * &(l + &Poly::from_int(i));
        }
        RatFun::from_poly(num)
    } else {
        let mut den = Poly::one();
        for i in 0..(-m) {
            den = &den * &(l - &Poly::from_int(i));
        }
        RatFun::new(Poly::one(), den).expect("nonzero")
    }
}

fn int_pow(base: i64, e: i64) -> Rat {
    let b = Rat::from_integer(Int::from(base));
    if e >= 0 {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc = &acc * &b;
        }
        acc
    } else {
        Rat::one() / int_pow(base, -e)
    }
}

/// Hypergeometric term: constant times a product of atoms with integer
/// exponents. Atoms merge on construction, so representation is canonical.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HyperTerm {
    pub constant: Rat,
    atoms: BTreeMap<Atom, i32>,
}

impl HyperTerm {
    pub fn one() -> HyperTerm {
        HyperTerm {
            constant: Rat::one(),
            atoms: BTreeMap::new(),
        }
    }

    pub fn zero() -> HyperTerm {
        HyperTerm {
            constant: Rat::zero(),
            atoms: BTreeMap::new(),
        }
    }

    pub fn from_rat(c: Rat) -> HyperTerm {
        let mut t = HyperTerm::one();
        t.constant = c;
        t
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero()
    }

    pub fn atom(a: Atom) -> HyperTerm {
        let mut t = HyperTerm::one();
        t.push(a, 1);
        t
    }

    pub fn factorial(l: LinForm) -> HyperTerm {
        HyperTerm::atom(Atom::Factorial(l))
    }

    pub fn binomial(top: LinForm, bottom: LinForm) -> HyperTerm {
        HyperTerm::atom(Atom::Binomial(top, bottom))
    }

    pub fn power(base: i64, l: LinForm) -> HyperTerm {
        assert!(base != 0, "zero power base");
        HyperTerm::atom(Atom::Power(base, l))
    }

    pub fn poly_factor(p: Poly) -> HyperTerm {
        if let Some(c) = p.as_rat() {
            return HyperTerm::from_rat(c);
        }
        HyperTerm::atom(Atom::PolyFactor(p))
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Atom, i32)> {
        self.atoms.iter().map(|(a, &e)| (a, e))
    }

    fn push(&mut self, a: Atom, e: i32) {
        if e == 0 || self.constant.is_zero() {
            return;
        }
        if let Atom::Factorial(l) = &a {
            if l.is_constant() {
                // constant factorial folds into the constant
                if l.c >= 0 {
                    self.constant = &self.constant * &fact_rat(l.c).pow(e);
                }
                // negative constant factorial is handled at eval time only
                // when it arises from shifts; building one directly zeroes
                if l.c < 0 {
                    self.constant = Rat::zero();
                    self.atoms.clear();
                }
                return;
            }
        }
        if let Atom::PolyFactor(p) = &a {
            if let Some(c) = p.as_rat() {
                self.constant = &self.constant * &c.pow(e);
                return;
            }
        }
        if let Atom::Power(_, l) = &a {
            if l.is_constant() && l.c == 0 {
                return;
            }
        }
        let cur = self.atoms.entry(a.clone()).or_insert(0);
        *cur += e;
        if *cur == 0 {
            self.atoms.remove(&a);
        }
    }

    pub fn pow(&self, e: i32) -> HyperTerm {
        let mut t = HyperTerm::one();
        t.constant = self.constant.clone().pow(e);
        for (a, ea) in self.atoms() {
            t.push(a.clone(), ea * e);
        }
        t
    }

    pub fn scale(&self, c: &Rat) -> HyperTerm {
        let mut t = self.clone();
        t.constant = &t.constant * c;
        if t.constant.is_zero() {
            t.atoms.clear();
        }
        t
    }

    /// Shift quotient `f(..,v+1)/f(..,v)` as a reduced rational function.
    pub fn ratio(&self, v: Var) -> RatFun {
        let mut r = RatFun::one();
        for (a, e) in self.atoms() {
            let ar = a.ratio(v);
            r = &r * &ar.pow(e).expect("atom ratio is nonzero");
        }
        r
    }

    /// Exact value at integer `(n0, k0)`, honoring support conventions.
    ///
    /// A factorial (or binomial constituent factorial) at a negative integer
    /// annihilates the term. A vanishing polynomial factor with negative
    /// exponent is a genuine pole and errors.
    pub fn eval(&self, n0: i64, k0: i64) -> Result<Rat> {
        if self.constant.is_zero() {
            return Ok(Rat::zero());
        }
        let mut acc = self.constant.clone();
        for (a, e) in self.atoms() {
            let val = match a {
                Atom::Factorial(l) => {
                    let v = l.eval(n0, k0);
                    if v < 0 {
                        return Ok(Rat::zero());
                    }
                    fact_rat(v)
                }
                Atom::Binomial(t, b) => {
                    let tv = t.eval(n0, k0);
                    let bv = b.eval(n0, k0);
                    if bv < 0 || (tv >= 0 && bv > tv) {
                        return Ok(Rat::zero());
                    }
                    binom_rat(tv, bv)
                }
                Atom::Power(base, l) => int_pow(*base, l.eval(n0, k0)),
                Atom::PolyFactor(p) => p.eval(&[(Var::N, rint(n0)), (Var::K, rint(k0))]),
            };
            if val.is_zero() {
                if e < 0 {
                    return Err(Error::DivisionByZero);
                }
                return Ok(Rat::zero());
            }
            acc = &acc * &val.pow(e);
        }
        Ok(acc)
    }

    /// Evaluate as a limit along `k`: each atom contributes a leading
    /// coefficient and an order of vanishing at `k0`, and zeros cancel
    /// against poles. This is the right notion of value for certificates
    /// `R(n,k) f(n,k)` whose rational part has poles on the zero set of `f`.
    pub fn eval_limit(&self, n0: i64, k0: i64) -> Result<Rat> {
        if self.constant.is_zero() {
            return Ok(Rat::zero());
        }
        let mut acc = self.constant.clone();
        let mut order: i64 = 0;
        let put = |(c, d): (Rat, i64), e: i32, acc: &mut Rat, order: &mut i64| {
            *acc = acc.clone() * c.pow(e);
            *order += d * e as i64;
        };
        for (a, e) in self.atoms() {
            match a {
                Atom::Factorial(l) => {
                    put(fact_limit(l.eval(n0, k0), l.coeff(Var::K)), e, &mut acc, &mut order);
                }
                Atom::Binomial(t, b) => {
                    let diff = lin_sub(t, b);
                    for (l, s) in [(t, 1), (b, -1), (&diff, -1)] {
                        let v = fact_limit(l.eval(n0, k0), l.coeff(Var::K));
                        put(v, e * s, &mut acc, &mut order);
                    }
                }
                Atom::Power(base, l) => {
                    put((int_pow(*base, l.eval(n0, k0)), 0), e, &mut acc, &mut order);
                }
                Atom::PolyFactor(p) => {
                    put(poly_limit(p, n0, k0), e, &mut acc, &mut order);
                }
            }
        }
        match order.cmp(&0) {
            Ordering::Greater => Ok(Rat::zero()),
            Ordering::Less => Err(Error::DivisionByZero),
            Ordering::Equal => Ok(acc),
        }
    }

    pub fn mul(&self, other: &HyperTerm) -> HyperTerm {
        let mut t = HyperTerm::one();
        t.constant = &self.constant * &other.constant;
        if t.constant.is_zero() {
            return HyperTerm::zero();
        }
        for (a, e) in self.atoms().chain(other.atoms()) {
            t.push(a.clone(), e);
        }
        t
    }

    pub fn shift(&self, v: Var, j: i64) -> HyperTerm {
        let mut t = HyperTerm::one();
        t.constant = self.constant.clone();
        for (a, e) in self.atoms() {
            let (sa, c) = a.shift(v, j);
            t.constant = &t.constant * &c.pow(e);
            t.push(sa, e);
        }
        t
    }

    /// Substitute `k := a*n + c0`, leaving a term in `n` alone.
    pub fn subst_k(&self, a: i64, c0: i64) -> HyperTerm {
        let mut t = HyperTerm::one();
        t.constant = self.constant.clone();
        for (atom, e) in self.atoms() {
            let (sa, c) = atom.subst_k(a, c0);
            t.constant = &t.constant * &c.pow(e);
            t.push(sa, e);
        }
        t
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.atoms().any(|(a, _)| match a {
            Atom::Factorial(l) => l.coeff(v) != 0,
            Atom::Binomial(t, b) => t.coeff(v) != 0 || b.coeff(v) != 0,
            Atom::Power(_, l) => l.coeff(v) != 0,
            Atom::PolyFactor(p) => p.contains_var(v),
        })
    }
}

impl fmt::Display for HyperTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.constant.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        if !self.constant.is_one() || self.atoms.is_empty() {
            parts.push(self.constant.to_string());
        }
        for (a, e) in self.atoms() {
            let base = match a {
                Atom::Factorial(l) => format!("({})!", l),
                Atom::Binomial(t, b) => format!("C({},{})", t, b),
                Atom::Power(base, l) => format!("{}^({})", base, l),
                Atom::PolyFactor(p) => format!("({})", p),
            };
            if e == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{}^{}", base, e));
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Leading coefficient and vanishing order of `(v + s*eps)!` as `eps -> 0`,
/// via `1/Gamma(-m + d) ~ (-1)^m m! d`. A negative argument that does not
/// move with `eps` gets a sentinel order no finite pole can cancel.
fn fact_limit(v: i64, s: i64) -> (Rat, i64) {
    if v >= 0 {
        (fact_rat(v), 0)
    } else if s != 0 {
        let m = -v - 1;
        let sign = if m % 2 == 0 { 1 } else { -1 };
        (Rat::new(Int::from(sign), Int::from(s)) / fact_rat(m), -1)
    } else {
        (Rat::one(), -(1 << 31))
    }
}

/// Leading coefficient and vanishing order of `p(n0, k0 + eps)`.
fn poly_limit(p: &Poly, n0: i64, k0: i64) -> (Rat, i64) {
    let point = [(Var::N, rint(n0)), (Var::K, rint(k0))];
    let mut q = p.clone();
    let mut m = 0i64;
    let mut mfact = Rat::one();
    while !q.is_zero() {
        let c = q.eval(&point);
        if !c.is_zero() {
            return (c / mfact, m);
        }
        q = q.derivative(Var::K);
        m += 1;
        mfact = &mfact * &rint(m);
    }
    (Rat::one(), 1 << 31)
}

fn fact_rat(v: i64) -> Rat {
    let mut acc = Int::one();
    for i in 2..=v {
        acc *= Int::from(i);
    }
    Rat::from_integer(acc)
}

/// Generalized binomial via the falling factorial; caller screens `b < 0`.
fn binom_rat(a: i64, b: i64) -> Rat {
    let mut num = Int::one();
    for i in 0..b {
        num *= Int::from(a - i);
    }
    Rat::new(num, fact_rat(b).to_integer())
}

/// Exact check that a `(ratio in k, ratio in n)` pair is compatible:
/// `ρ_k(n+1,k)/ρ_k(n,k) = ρ_n(n,k+1)/ρ_n(n,k)`.
pub fn ratio_pair_consistent(rho_k: &RatFun, rho_n: &RatFun) -> bool {
    if rho_k.is_zero() || rho_n.is_zero() {
        return false;
    }
    let lhs = &rho_k.shift(Var::N, 1) / rho_k;
    let rhs = &rho_n.shift(Var::K, 1) / rho_n;
    lhs == rhs
}

/// Check the mixed-shift compatibility identity on a term's derived ratios.
pub fn certify_consistency(f: &HyperTerm) -> bool {
    if f.is_zero() {
        return true;
    }
    ratio_pair_consistent(&f.ratio(Var::K), &f.ratio(Var::N))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn n() -> LinForm {
        LinForm::var(Var::N)
    }

    fn k() -> LinForm {
        LinForm::var(Var::K)
    }

    fn binkn() -> HyperTerm {
        HyperTerm::binomial(n(), k())
    }

    #[test]
    fn ratio_examples() {
        // C(n,k): ratio in k is (n-k)/(k+1)
        assert_eq!(binkn().ratio(Var::K).to_string(), "(-k+n)/(k+1)");
        // 4^(-k)*C(2k,k): ratio in k is (2k+1)/(2k+2)
        let f = HyperTerm::power(4, LinForm::new(0, -1, 0))
            .mul(&HyperTerm::binomial(LinForm::new(0, 2, 0), k()));
        let expect = RatFun::new(Poly::linear(Var::K, 2, 1), Poly::linear(Var::K, 2, 2)).unwrap();
        assert_eq!(f.ratio(Var::K), expect);
        // C(n,k)^2: ratio in n is ((n+1)/(n+1-k))^2
        let g = binkn().pow(2);
        assert_eq!(g.ratio(Var::N).to_string(), "(n^2+2*n+1)/(k^2-2*n*k-2*k+n^2+2*n+1)");
    }

    #[test]
    fn eval_with_support() {
        assert_eq!(binkn().eval(4, 2).unwrap(), rint(6));
        assert_eq!(binkn().eval(4, 7).unwrap(), rint(0));
        assert_eq!(binkn().eval(4, -1).unwrap(), rint(0));
        let f = HyperTerm::power(4, LinForm::new(0, -1, 0))
            .mul(&HyperTerm::binomial(LinForm::new(0, 2, 0), k()));
        assert_eq!(f.eval(0, 3).unwrap(), rat(5, 16));
        // factorial of a negative integer annihilates
        let g = HyperTerm::factorial(LinForm::new(0, 1, -1)); // (k-1)!
        assert_eq!(g.eval(0, 0).unwrap(), rint(0));
        assert_eq!(g.eval(0, 3).unwrap(), rint(2));
    }

    #[test]
    fn mul_shift_subst() {
        let sq = binkn().mul(&binkn());
        assert_eq!(sq, binkn().pow(2));
        let r = sq.ratio(Var::K);
        let expect = binkn().ratio(Var::K);
        assert_eq!(r, &expect * &expect);

        let s = binkn().shift(Var::K, -1);
        assert_eq!(s.eval(5, 3).unwrap(), rint(10)); // C(5,2)

        let p = HyperTerm::power(4, LinForm::new(0, -1, 0));
        let ps = p.shift(Var::K, 1);
        assert_eq!(ps.constant, rat(1, 4));
        assert_eq!(ps.eval(0, 2).unwrap(), rat(1, 64));

        // substitute k = 2n in C(2n, k) gives C(2n, 2n) = 1
        let h = HyperTerm::binomial(LinForm::new(2, 0, 0), k()).subst_k(2, 0);
        for n0 in 0..6 {
            assert_eq!(h.eval(n0, 0).unwrap(), rint(1));
        }
    }

    #[test]
    fn ratio_value_coherence() {
        let f = binkn().pow(2).mul(&HyperTerm::power(2, LinForm::new(0, 1, 0)));
        let rho = f.ratio(Var::K);
        for k0 in 0..8 {
            let a = f.eval(9, k0).unwrap();
            let b = f.eval(9, k0 + 1).unwrap();
            let r = rho.eval(&[(Var::N, rint(9)), (Var::K, rint(k0))]).unwrap();
            assert_eq!(b, &a * &r);
        }
    }

    #[test]
    fn consistency_check() {
        assert!(certify_consistency(&binkn().pow(2)));
        let f = HyperTerm::binomial(LinForm::new(1, 1, 0), k())
            .mul(&HyperTerm::power(4, LinForm::new(0, -1, 0)));
        assert!(certify_consistency(&f));
        // corrupted pair
        let rho_k = binkn().ratio(Var::K);
        let bad = &binkn().ratio(Var::N) * &RatFun::var(Var::K);
        assert!(!ratio_pair_consistent(&rho_k, &bad));
    }
}
