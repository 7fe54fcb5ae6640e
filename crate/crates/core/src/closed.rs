//! Closed forms in `n` over a small basis of special sequences.
//!
//! A closed form is a sum of monomials, each a rational function of `n`
//! times a hypergeometric term in `n` times a product of basis symbols.
//! The basis symbols carry exact shift rules and are algebraically
//! independent over rational functions of `n`, which makes coefficient
//! collection a sound zero test.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gosper::rational_quotient;
use crate::hyper::HyperTerm;
use crate::poly::{rat, rint, Rat, Var};
use crate::ratfun::RatFun;

/// A basis symbol with an exact shift rule in `n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Basis {
    /// Harmonic number H_n.
    Hn,
    /// Harmonic number H_2n.
    H2n,
    /// Generalized harmonic number of order two.
    Hn2,
    /// Fibonacci F_2n.
    Fib2n,
    /// Fibonacci F_2n+1, the shift companion of F_2n.
    Fib2n1,
}

impl Basis {
    fn name(self) -> &'static str {
        match self {
            Basis::Hn => "H(n)",
            Basis::H2n => "H(2n)",
            Basis::Hn2 => "H^(2)(n)",
            Basis::Fib2n => "F(2n)",
            Basis::Fib2n1 => "F(2n+1)",
        }
    }

    /// The symbol at `n+1` expanded over the basis.
    fn shift_rule(self) -> ClosedForm {
        let sym = |b: Basis| ClosedForm::symbol(b);
        let rf = |num: RatFun| ClosedForm::from_ratfun(num);
        let inv = |p: crate::poly::Poly| {
            rf(RatFun::new(crate::poly::Poly::one(), p).expect("nonzero"))
        };
        match self {
            Basis::Hn => sym(Basis::Hn).add(&inv(crate::poly::Poly::linear(Var::N, 1, 1))),
            Basis::H2n => sym(Basis::H2n)
                .add(&inv(crate::poly::Poly::linear(Var::N, 2, 1)))
                .add(&inv(crate::poly::Poly::linear(Var::N, 2, 2))),
            Basis::Hn2 => {
                let n1 = crate::poly::Poly::linear(Var::N, 1, 1);
                sym(Basis::Hn2).add(&inv(&n1 * &n1))
            }
            Basis::Fib2n => sym(Basis::Fib2n).add(&sym(Basis::Fib2n1)),
            Basis::Fib2n1 => {
                sym(Basis::Fib2n).add(&sym(Basis::Fib2n1).scale_rat(&rint(2)))
            }
        }
    }

    /// Exact value at an integer point.
    fn eval(self, n0: i64) -> Rat {
        match self {
            Basis::Hn => harmonic_value(n0, 1),
            Basis::H2n => harmonic_value(2 * n0, 1),
            Basis::Hn2 => harmonic_value(n0, 2),
            Basis::Fib2n => fib(2 * n0),
            Basis::Fib2n1 => fib(2 * n0 + 1),
        }
    }
}

fn harmonic_value(m: i64, order: u32) -> Rat {
    let mut s = Rat::zero();
    for j in 1..=m.max(0) {
        s += rat(1, j.pow(order));
    }
    s
}

fn fib(m: i64) -> Rat {
    if m < 0 {
        // F(-m) = (-1)^(m+1) F(m)
        let f = fib(-m);
        return if (-m) % 2 == 0 { -f } else { f };
    }
    let (mut a, mut b) = (Rat::zero(), rint(1));
    for _ in 0..m {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

type SymMono = BTreeMap<Basis, u32>;

#[derive(Clone, Debug)]
struct Monomial {
    coef: RatFun,
    hyper: HyperTerm,
    sym: SymMono,
}

/// A sum of (rational function) x (hypergeometric term) x (basis monomial).
#[derive(Clone, Debug, Default)]
pub struct ClosedForm {
    terms: Vec<Monomial>,
}

impl ClosedForm {
    pub fn zero() -> ClosedForm {
        ClosedForm { terms: Vec::new() }
    }

    pub fn from_hyper(h: HyperTerm) -> ClosedForm {
        let mut cf = ClosedForm::zero();
        cf.push(RatFun::one(), h, SymMono::new());
        cf
    }

    pub fn from_ratfun(r: RatFun) -> ClosedForm {
        let mut cf = ClosedForm::zero();
        cf.push(r, HyperTerm::one(), SymMono::new());
        cf
    }

    pub fn symbol(b: Basis) -> ClosedForm {
        let mut cf = ClosedForm::zero();
        cf.push(RatFun::one(), HyperTerm::one(), [(b, 1)].into_iter().collect());
        cf
    }

    /// A hypergeometric term times a single basis symbol.
    pub fn hyper_symbol(h: HyperTerm, b: Basis) -> ClosedForm {
        let mut cf = ClosedForm::zero();
        cf.push(RatFun::one(), h, [(b, 1)].into_iter().collect());
        cf
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The form as a single symbol-free hypergeometric term, when it is one.
    pub fn as_hyper(&self) -> Option<HyperTerm> {
        match self.terms.as_slice() {
            [] => Some(HyperTerm::zero()),
            [t] if t.sym.is_empty() => Some(crate::gosper::apply_ratfun(&t.hyper, &t.coef)),
            _ => None,
        }
    }

    fn push(&mut self, coef: RatFun, hyper: HyperTerm, sym: SymMono) {
        if coef.is_zero() || hyper.is_zero() {
            return;
        }
        for t in self.terms.iter_mut() {
            if t.sym != sym {
                continue;
            }
            if let Some(q) = rational_quotient(&hyper, &t.hyper) {
                t.coef = &t.coef + &(&coef * &q);
                self.terms.retain(|t| !t.coef.is_zero());
                return;
            }
        }
        self.terms.push(Monomial { coef, hyper, sym });
    }

    pub fn add(&self, other: &ClosedForm) -> ClosedForm {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.coef.clone(), t.hyper.clone(), t.sym.clone());
        }
        out
    }

    pub fn neg(&self) -> ClosedForm {
        self.scale(&-&RatFun::one())
    }

    pub fn sub(&self, other: &ClosedForm) -> ClosedForm {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &RatFun) -> ClosedForm {
        let mut out = ClosedForm::zero();
        for t in &self.terms {
            out.push(&t.coef * r, t.hyper.clone(), t.sym.clone());
        }
        out
    }

    pub fn scale_rat(&self, c: &Rat) -> ClosedForm {
        self.scale(&RatFun::from_rat(c.clone()))
    }

    pub fn mul_hyper(&self, h: &HyperTerm) -> ClosedForm {
        let mut out = ClosedForm::zero();
        for t in &self.terms {
            out.push(t.coef.clone(), t.hyper.mul(h), t.sym.clone());
        }
        out
    }

    pub fn mul(&self, other: &ClosedForm) -> ClosedForm {
        let mut out = ClosedForm::zero();
        for a in &self.terms {
            for b in &other.terms {
                let mut sym = a.sym.clone();
                for (s, e) in &b.sym {
                    *sym.entry(*s).or_insert(0) += e;
                }
                out.push(&a.coef * &b.coef, a.hyper.mul(&b.hyper), sym);
            }
        }
        out
    }

    /// The closed form at `n+j`, expanded via the basis shift rules.
    pub fn shift(&self, j: u32) -> ClosedForm {
        let mut cf = self.clone();
        for _ in 0..j {
            cf = cf.shift_once();
        }
        cf
    }

    fn shift_once(&self) -> ClosedForm {
        let mut out = ClosedForm::zero();
        for t in &self.terms {
            let mut part = ClosedForm::from_hyper(t.hyper.shift(Var::N, 1))
                .scale(&t.coef.shift(Var::N, 1));
            for (s, e) in &t.sym {
                let rule = s.shift_rule();
                for _ in 0..*e {
                    part = part.mul(&rule);
                }
            }
            out = out.add(&part);
        }
        out
    }

    /// Exact value at an integer point, `Err` on a pole.
    pub fn eval(&self, n0: i64) -> Result<Rat> {
        let mut s = Rat::zero();
        for t in &self.terms {
            let c = t
                .coef
                .eval(&[(Var::N, rint(n0)), (Var::K, Rat::zero())])
                .map_err(|_| Error::PoleOnPath {
                    den: t.coef.den().to_string(),
                    var: Var::N,
                    at: n0.to_string(),
                })?;
            let h = t.hyper.eval(n0, 0)?;
            let mut v = &c * &h;
            for (sym, e) in &t.sym {
                let b = sym.eval(n0);
                for _ in 0..*e {
                    v = &v * &b;
                }
            }
            s += v;
        }
        Ok(s)
    }

    /// Decide whether the closed form is identically zero: `Some(true)` /
    /// `Some(false)` when coefficient collection settles it, `None` when
    /// two monomials with equal symbols resist hypergeometric merging.
    pub fn decide_zero(&self) -> Option<bool> {
        if self.terms.is_empty() {
            return Some(true);
        }
        // push() already merges rationally related hypergeometric parts,
        // so distinct surviving terms are either genuinely independent or
        // beyond the merge test
        for a in 0..self.terms.len() {
            for b in (a + 1)..self.terms.len() {
                if self.terms[a].sym == self.terms[b].sym {
                    return None;
                }
            }
        }
        Some(false)
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            if !t.coef.is_one() {
                factors.push(format!("({})", t.coef));
            }
            let h = format!("{}", t.hyper);
            if h != "1" {
                factors.push(h);
            }
            for (s, e) in &t.sym {
                if *e == 1 {
                    factors.push(s.name().to_string());
                } else {
                    factors.push(format!("{}^{}", s.name(), e));
                }
            }
            if factors.is_empty() {
                factors.push("1".to_string());
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::LinForm;
    use crate::poly::Poly;

    fn central_binomial() -> HyperTerm {
        HyperTerm::binomial(LinForm::new(2, 0, 0), LinForm::var(Var::N))
    }

    #[test]
    fn harmonic_shift_rule() {
        let h = ClosedForm::symbol(Basis::Hn);
        let shifted = h.shift(1);
        // H_{n+1} = H_n + 1/(n+1)
        for n0 in 0..12 {
            assert_eq!(shifted.eval(n0).unwrap(), h.eval(n0 + 1).unwrap());
        }
        let expect = h.add(&ClosedForm::from_ratfun(
            RatFun::new(Poly::one(), Poly::linear(Var::N, 1, 1)).unwrap(),
        ));
        assert_eq!(shifted.sub(&expect).decide_zero(), Some(true));
    }

    #[test]
    fn mixed_shift_matches_evaluation() {
        // (2 H_n - H_2n) C(2n,n)
        let cb = central_binomial();
        let cf = ClosedForm::hyper_symbol(cb.clone(), Basis::Hn)
            .scale_rat(&rint(2))
            .sub(&ClosedForm::hyper_symbol(cb, Basis::H2n));
        for j in 1..=3u32 {
            let s = cf.shift(j);
            for n0 in 0..10 {
                assert_eq!(s.eval(n0).unwrap(), cf.eval(n0 + i64::from(j)).unwrap());
            }
        }
        // instance: (2 H_3 - H_6) C(6,3) = 73/3
        assert_eq!(cf.eval(3).unwrap(), rat(73, 3));
    }

    #[test]
    fn fibonacci_companion_shift() {
        let cf = ClosedForm::symbol(Basis::Fib2n);
        let s = cf.shift(1);
        for n0 in 0..15 {
            assert_eq!(s.eval(n0).unwrap(), cf.eval(n0 + 1).unwrap());
        }
        assert_eq!(cf.eval(5).unwrap(), rint(55));
    }

    #[test]
    fn zero_detection_across_equivalent_hypers() {
        // n * C(2n,n) written against C(2(n+1), n+1) shifted back
        let cb = central_binomial();
        let a = ClosedForm::from_hyper(cb.clone()).scale(&RatFun::var(Var::N));
        let b = ClosedForm::from_hyper(cb.shift(Var::N, 1).shift(Var::N, -1))
            .scale(&RatFun::var(Var::N));
        assert_eq!(a.sub(&b).decide_zero(), Some(true));
        assert_eq!(a.add(&b).decide_zero(), Some(false));
    }
}
