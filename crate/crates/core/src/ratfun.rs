//! Rational functions as reduced fractions of tower polynomials.

use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{poly_gcd, Poly, Rat, Var};

/// A reduced rational function. Invariants: `den` is nonzero with integer
/// coefficients, content one and positive leading coefficient;
/// `gcd(num, den) = 1`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<RatFun> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> RatFun {
        if num.is_zero() {
            return RatFun {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = poly_gcd(&num, &den);
        let mut num = num.div_exact(&g).expect("gcd divides num");
        let mut den = den.div_exact(&g).expect("gcd divides den");
        // scale so den is primitive-integral with positive leading coefficient
        let den_canon = den.primitive_int();
        let ratio = den.lead_rat() / den_canon.lead_rat();
        num = num.scale(&(Rat::one() / ratio));
        den = den_canon;
        RatFun { num, den }
    }

    pub fn from_poly(p: Poly) -> RatFun {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn from_rat(c: Rat) -> RatFun {
        RatFun::from_poly(Poly::from_rat(c))
    }

    pub fn from_int(c: i64) -> RatFun {
        RatFun::from_poly(Poly::from_int(c))
    }

    pub fn zero() -> RatFun {
        RatFun::from_poly(Poly::zero())
    }

    pub fn one() -> RatFun {
        RatFun::from_poly(Poly::one())
    }

    pub fn var(v: Var) -> RatFun {
        RatFun::from_poly(Poly::var(v))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_rat(&self) -> Option<Rat> {
        Some(self.num.as_rat()? / self.den.as_rat()?)
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn inv(&self) -> Result<RatFun> {
        RatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> Result<RatFun> {
        if e >= 0 {
            Ok(RatFun {
                num: self.num.pow(e as u32),
                den: self.den.pow(e as u32),
            })
        } else {
            self.inv()?.pow(-e)
        }
    }

    /// Substitute `v := v + offset` in numerator and denominator.
    pub fn shift(&self, v: Var, offset: i64) -> RatFun {
        RatFun::normalize(self.num.shift(v, offset), self.den.shift(v, offset))
    }

    /// Substitute a polynomial for `v`; errors if the denominator collapses.
    pub fn subst(&self, v: Var, value: &Poly) -> Result<RatFun> {
        RatFun::new(self.num.subst(v, value), self.den.subst(v, value))
    }

    /// Substitute a rational value for `v`; pole detection built in.
    pub fn eval_var(&self, v: Var, value: &Rat) -> Result<RatFun> {
        let den = self.den.eval_var(v, value);
        if den.is_zero() {
            return Err(Error::PoleOnPath {
                den: self.den.to_string(),
                var: v,
                at: value.to_string(),
            });
        }
        Ok(RatFun::normalize(self.num.eval_var(v, value), den))
    }

    /// Evaluate at a full point.
    pub fn eval(&self, point: &[(Var, Rat)]) -> Result<Rat> {
        let mut r = self.clone();
        for (v, x) in point {
            r = r.eval_var(*v, x)?;
        }
        r.as_rat()
            .ok_or_else(|| Error::Internal(format!("rational function eval left variables: {r}")))
    }
}

impl std::ops::Add for &RatFun {
    type Output = RatFun;
    fn add(self, rhs: &RatFun) -> RatFun {
        RatFun::normalize(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl std::ops::Sub for &RatFun {
    type Output = RatFun;
    fn sub(self, rhs: &RatFun) -> RatFun {
        RatFun::normalize(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl std::ops::Mul for &RatFun {
    type Output = RatFun;
    fn mul(self, rhs: &RatFun) -> RatFun {
        RatFun::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl std::ops::Div for &RatFun {
    type Output = RatFun;
    fn div(self, rhs: &RatFun) -> RatFun {
        assert!(!rhs.is_zero(), "rational function division by zero");
        RatFun::normalize(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl std::ops::Neg for &RatFun {
    type Output = RatFun;
    fn neg(self) -> RatFun {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

fn needs_parens(p: &Poly) -> bool {
    // multi-term, or a single term with a mixed sign/number that would
    // read ambiguously next to `/`
    p.terms().count() > 1 || p.to_string().contains('-') || p.to_string().contains('/')
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let ns = if needs_parens(&self.num) {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        let ds = if needs_parens(&self.den) || self.den.terms().count() > 1 {
            format!("({})", self.den)
        } else {
            self.den.to_string()
        };
        write!(f, "{ns}/{ds}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn normalization_examples() {
        // (2k+2)/(4k+4) = 1/2
        let r = RatFun::new(Poly::linear(Var::K, 2, 2), Poly::linear(Var::K, 4, 4)).unwrap();
        assert_eq!(r.as_rat(), Some(rat(1, 2)));
        // (k^2-n^2)/(k-n) = k+n
        let num = &(&Poly::var(Var::K) * &Poly::var(Var::K))
            - &(&Poly::var(Var::N) * &Poly::var(Var::N));
        let den = &Poly::var(Var::K) - &Poly::var(Var::N);
        let r = RatFun::new(num, den).unwrap();
        assert_eq!(r.to_string(), "k+n");
        // 0/(k+1) = 0/1
        let r = RatFun::new(Poly::zero(), Poly::linear(Var::K, 1, 1)).unwrap();
        assert!(r.is_zero());
        assert!(r.den().is_one());
    }

    #[test]
    fn normalize_idempotent_and_shift() {
        let r = RatFun::new(
            &Poly::linear(Var::N, 1, 0) - &Poly::var(Var::K),
            Poly::linear(Var::K, 1, 1),
        )
        .unwrap();
        let r2 = RatFun::new(r.num().clone(), r.den().clone()).unwrap();
        assert_eq!(r, r2);
        // shift((n-k)/(k+1), k, 2) = (n-k-2)/(k+3)
        let s = r.shift(Var::K, 2);
        assert_eq!(s.to_string(), "(-k+n-2)/(k+3)");
        assert_eq!(s.shift(Var::K, -2), r);
    }

    #[test]
    fn arithmetic_matches_evaluation() {
        let a = RatFun::new(Poly::linear(Var::K, 1, 5), Poly::linear(Var::K, 2, 1)).unwrap();
        let b = RatFun::new(Poly::linear(Var::K, 3, -1), Poly::linear(Var::K, 1, 4)).unwrap();
        let sum = &a + &b;
        let prod = &a * &b;
        for t in 0..20i64 {
            let x = rat(t, 1);
            let av = a.eval(&[(Var::K, x.clone())]).unwrap();
            let bv = b.eval(&[(Var::K, x.clone())]).unwrap();
            assert_eq!(sum.eval(&[(Var::K, x.clone())]).unwrap(), &av + &bv);
            assert_eq!(prod.eval(&[(Var::K, x)]).unwrap(), &av * &bv);
        }
    }
}
