//! Sparse multivariate polynomials over exact rationals.
//!
//! Polynomials live in a fixed variable tower `k > n > j > N`; a monomial is
//! an exponent vector over these four variables and the map never stores zero
//! coefficients. All arithmetic is exact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Make a rational from two machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

/// Make a rational from a machine integer.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

const NVARS: usize = 4;

/// A variable of the fixed tower. `K` is outermost, then `N`, `J`, `M`.
///
/// `M` renders as `N` (the capital parameter of the derangement identity);
/// the enum name avoids a clash with `Var::N`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    K = 0,
    N = 1,
    J = 2,
    M = 3,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::K, Var::N, Var::J, Var::M];

    fn idx(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::K => "k",
            Var::N => "n",
            Var::J => "j",
            Var::M => "N",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        match s {
            "k" => Some(Var::K),
            "n" => Some(Var::N),
            "j" => Some(Var::J),
            "N" => Some(Var::M),
            _ => None,
        }
    }
}

type Expo = [u16; NVARS];

/// Sparse polynomial with `Rat` coefficients.
///
/// The exponent vector is indexed in tower order (`k` at 0, then `n`, `j`,
/// `N`), so array-lexicographic order agrees with the tower and the map's
/// last entry is the leading monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Poly {
    terms: BTreeMap<Expo, Rat>,
}

fn expo_of(v: Var, d: u16) -> Expo {
    let mut e = [0u16; NVARS];
    e[v.idx()] = d;
    e
}

impl Poly {
    pub fn zero() -> Poly {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Poly {
        Poly::from_rat(Rat::one())
    }

    pub fn from_rat(c: Rat) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; NVARS], c);
        }
        Poly { terms }
    }

    pub fn from_int(c: i64) -> Poly {
        Poly::from_rat(rint(c))
    }

    pub fn var(v: Var) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(expo_of(v, 1), Rat::one());
        Poly { terms }
    }

    /// `c * v^d`
    pub fn monomial(v: Var, d: u16, c: Rat) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(expo_of(v, d), c);
        }
        Poly { terms }
    }

    /// Linear polynomial `a*v + b`.
    pub fn linear(v: Var, a: i64, b: i64) -> Poly {
        &(&Poly::var(v) * &Poly::from_int(a)) + &Poly::from_int(b)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|e| *e == [0; NVARS])
    }

    /// The value of a constant polynomial; `None` if any variable occurs.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.is_zero() {
            Some(Rat::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rat().map_or(false, |c| c.is_one())
    }

    /// Variables actually present.
    pub fn vars(&self) -> Vec<Var> {
        Var::ALL
            .into_iter()
            .filter(|v| self.terms.keys().any(|e| e[v.idx()] > 0))
            .collect()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|e| e[v.idx()] > 0)
    }

    /// Degree in `v`; `None` for the zero polynomial.
    pub fn degree(&self, v: Var) -> Option<usize> {
        self.terms
            .keys()
            .map(|e| e[v.idx()] as usize)
            .max()
            .filter(|_| !self.is_zero())
    }

    /// Total degree over all variables; `None` for zero.
    pub fn total_degree(&self) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| d as usize).sum())
            .max()
    }

    /// Coefficient of `v^d` as a polynomial in the remaining variables.
    pub fn coeff_of(&self, v: Var, d: usize) -> Poly {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[v.idx()] as usize == d {
                let mut e2 = *e;
                e2[v.idx()] = 0;
                terms.insert(e2, c.clone());
            }
        }
        Poly { terms }
    }

    /// Leading coefficient with respect to `v` (zero poly gives zero).
    pub fn lc(&self, v: Var) -> Poly {
        match self.degree(v) {
            Some(d) => self.coeff_of(v, d),
            None => Poly::zero(),
        }
    }

    /// Coefficient of the lexicographically leading monomial.
    pub fn lead_rat(&self) -> Rat {
        self.terms
            .iter()
            .next_back()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    fn insert_term(terms: &mut BTreeMap<Expo, Rat>, e: Expo, c: Rat) {
        if c.is_zero() {
            return;
        }
        match terms.get_mut(&e) {
            Some(old) => {
                *old += c;
                if old.is_zero() {
                    terms.remove(&e);
                }
            }
            None => {
                terms.insert(e, c);
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (*e, v * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitute `v := value` (a polynomial), by Horner evaluation.
    pub fn subst(&self, v: Var, value: &Poly) -> Poly {
        let deg = match self.degree(v) {
            Some(d) => d,
            None => return Poly::zero(),
        };
        if !self.contains_var(v) {
            return self.clone();
        }
        let mut acc = Poly::zero();
        for d in (0..=deg).rev() {
            acc = &(&acc * value) + &self.coeff_of(v, d);
        }
        acc
    }

    /// Substitute `v := v + offset`.
    pub fn shift(&self, v: Var, offset: i64) -> Poly {
        if offset == 0 || !self.contains_var(v) {
            return self.clone();
        }
        self.subst(v, &Poly::linear(v, 1, offset))
    }

    /// Substitute a rational value for `v`.
    pub fn eval_var(&self, v: Var, value: &Rat) -> Poly {
        self.subst(v, &Poly::from_rat(value.clone()))
    }

    /// Evaluate at a full point; panics if a variable is left over.
    pub fn eval(&self, point: &[(Var, Rat)]) -> Rat {
        let mut p = self.clone();
        for (v, x) in point {
            p = p.eval_var(*v, x);
        }
        p.as_rat().expect("poly eval left symbolic variables")
    }

    pub fn derivative(&self, v: Var) -> Poly {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let d = e[v.idx()];
            if d > 0 {
                let mut e2 = *e;
                e2[v.idx()] = d - 1;
                Poly::insert_term(&mut terms, e2, c * rint(d as i64));
            }
        }
        Poly { terms }
    }

    /// Exact division; `None` if `self` is not a multiple of `q`.
    pub fn div_exact(&self, q: &Poly) -> Option<Poly> {
        if q.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = q.as_rat() {
            return Some(self.scale(&(Rat::one() / c)));
        }
        // main variable: the tower-highest variable occurring in q
        let v = *q.vars().first().expect("nonconstant poly has a variable");
        let dq = q.degree(v).unwrap();
        let lq = q.lc(v);
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        loop {
            if rem.is_zero() {
                return Some(quot);
            }
            let dr = rem.degree(v).unwrap_or(0);
            if !rem.contains_var(v) && dq > 0 {
                return None;
            }
            if dr < dq {
                return None;
            }
            let c = rem.lc(v).div_exact(&lq)?;
            let t = &c * &Poly::monomial(v, (dr - dq) as u16, Rat::one());
            quot = &quot + &t;
            rem = &rem - &(&t * q);
            if !rem.is_zero() && rem.degree(v).unwrap_or(0) >= dr && dr > 0 {
                // no progress: not divisible
                return None;
            }
        }
    }

    /// Pseudo-remainder of `self` by `q` with respect to `v`:
    /// `lc(q)^(deg self - deg q + 1) * self  mod  q`.
    fn prem(&self, q: &Poly, v: Var) -> Poly {
        let dq = q.degree(v).expect("prem by zero");
        let lq = q.lc(v);
        let dp = self.degree(v).unwrap_or(0);
        if dp < dq {
            return self.clone();
        }
        let mut r = self.scale(&Rat::one());
        let mut steps = dp - dq + 1;
        loop {
            let dr = if r.contains_var(v) {
                r.degree(v).unwrap()
            } else {
                0
            };
            if r.is_zero() || dr < dq {
                // pad so the total scaling is exactly lc(q)^(dp-dq+1)
                return &r * &lq.pow(steps as u32);
            }
            let t = &r.lc(v) * &Poly::monomial(v, (dr - dq) as u16, Rat::one());
            r = &(&r * &lq) - &(&t * q);
            steps -= 1;
        }
    }

    /// Content with respect to `v`: gcd of the `v`-coefficients.
    pub fn content(&self, v: Var) -> Poly {
        let deg = match self.degree(v) {
            Some(d) => d,
            None => return Poly::zero(),
        };
        let mut g = Poly::zero();
        for d in 0..=deg {
            let c = self.coeff_of(v, d);
            if !c.is_zero() {
                g = poly_gcd(&g, &c);
                if g.is_one() {
                    break;
                }
            }
        }
        g
    }

    /// Normalize so the lexicographically leading coefficient is one.
    pub fn monic_lex(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = self.lead_rat();
        self.scale(&(Rat::one() / c))
    }

    /// Clear rational denominators and content: integer coefficients with
    /// gcd one and positive lexicographic leading coefficient.
    pub fn primitive_int(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut den = Int::one();
        for c in self.terms.values() {
            den = num_integer::lcm(den, c.denom().clone());
        }
        let mut num = Int::zero();
        for c in self.terms.values() {
            num = num_integer::gcd(num, c.numer() * (&den / c.denom()));
        }
        let mut scale = Rat::new(den, num);
        if self.lead_rat() * &scale < Rat::zero() {
            scale = -scale;
        }
        self.scale(&scale)
    }

    /// Iterate terms as `(expo, coeff)` in ascending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &Rat)> {
        self.terms.iter()
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            Poly::insert_term(&mut terms, *e, c.clone());
        }
        Poly { terms }
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (e, c) in &rhs.terms {
            Poly::insert_term(&mut terms, *e, -c.clone());
        }
        Poly { terms }
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut terms = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let mut e = *e1;
                for i in 0..NVARS {
                    e[i] = e[i]
                        .checked_add(e2[i])
                        .expect("monomial exponent overflow");
                }
                Poly::insert_term(&mut terms, e, c1 * c2);
            }
        }
        Poly { terms }
    }
}

fn render_rat(c: &Rat) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    /// Canonical rendering: terms in descending lexicographic monomial order,
    /// explicit signs, `*` between factors, e.g. `k^2-2*n*k+1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c < &Rat::zero();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            let mut factors: Vec<String> = Vec::new();
            let trivial = e.iter().all(|&d| d == 0);
            if !abs.is_one() || trivial {
                factors.push(render_rat(&abs));
            }
            // coefficient variables (inner tower) print before the main ones
            for v in Var::ALL.into_iter().rev() {
                let d = e[v.idx()];
                if d == 1 {
                    factors.push(v.name().to_string());
                } else if d > 1 {
                    factors.push(format!("{}^{}", v.name(), d));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Gcd of two polynomials, normalized so its lexicographically leading
/// coefficient is one. Uses content recursion plus a subresultant PRS.
pub fn poly_gcd(p: &Poly, q: &Poly) -> Poly {
    let g = poly_gcd_raw(p, q);
    g.monic_lex()
}

fn poly_gcd_raw(p: &Poly, q: &Poly) -> Poly {
    if p.is_zero() {
        return q.clone();
    }
    if q.is_zero() {
        return p.clone();
    }
    if p.is_constant() || q.is_constant() {
        return Poly::one();
    }
    // main variable: highest of the tower present in either
    let v = p
        .vars()
        .into_iter()
        .chain(q.vars())
        .max_by_key(|v| v.idx())
        .unwrap();
    let (pv, qv) = (p.contains_var(v), q.contains_var(v));
    if !pv {
        return poly_gcd_raw(p, &q.content(v));
    }
    if !qv {
        return poly_gcd_raw(&p.content(v), q);
    }
    let cp = p.content(v);
    let cq = q.content(v);
    let pp = p.div_exact(&cp).expect("content divides");
    let qq = q.div_exact(&cq).expect("content divides");
    let cont_gcd = poly_gcd_raw(&cp, &cq);
    let pp_gcd = subresultant_gcd(&pp, &qq, v);
    &cont_gcd * &pp_gcd
}

/// Subresultant PRS gcd of two primitive polynomials in `v`.
fn subresultant_gcd(p: &Poly, q: &Poly, v: Var) -> Poly {
    let (mut a, mut b) = if p.degree(v) >= q.degree(v) {
        (p.clone(), q.clone())
    } else {
        (q.clone(), p.clone())
    };
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let da = a.degree(v).unwrap();
        let db = match b.degree(v) {
            Some(d) if b.contains_var(v) => d,
            _ => {
                // b free of v: gcd of primitive parts is trivial unless b = 0
                return if b.is_zero() {
                    let c = a.content(v);
                    a.div_exact(&c).unwrap()
                } else {
                    Poly::one()
                };
            }
        };
        let delta = (da - db) as u32;
        let r = a.prem(&b, v);
        if r.is_zero() {
            let c = b.content(v);
            return b.div_exact(&c).unwrap();
        }
        if !r.contains_var(v) {
            return Poly::one();
        }
        a = b;
        let divisor = &g * &h.pow(delta);
        b = r.div_exact(&divisor).expect("subresultant division exact");
        g = a.lc(v);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta)
                .div_exact(&h.pow(delta - 1))
                .expect("subresultant h update exact")
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> Poly {
        Poly::var(Var::K)
    }
    fn n() -> Poly {
        Poly::var(Var::N)
    }

    #[test]
    fn arithmetic_and_render() {
        let p = &(&k() * &k()) - &(&(&Poly::from_int(2) * &n()) * &k());
        let p = &p + &Poly::one();
        assert_eq!(p.to_string(), "k^2-2*n*k+1");
        assert_eq!(p.degree(Var::K), Some(2));
        assert_eq!(p.coeff_of(Var::K, 1).to_string(), "-2*n");
    }

    #[test]
    fn shift_roundtrip() {
        let p = &(&k().pow(3) * &n()) + &Poly::linear(Var::K, 5, -2);
        let q = p.shift(Var::K, 7).shift(Var::K, -7);
        assert_eq!(p, q);
        assert_eq!(
            Poly::var(Var::K).pow(2).shift(Var::K, 1).to_string(),
            "k^2+2*k+1"
        );
    }

    #[test]
    fn exact_division() {
        let a = &Poly::linear(Var::K, 1, -3) * &Poly::linear(Var::K, 2, 1);
        let q = a.div_exact(&Poly::linear(Var::K, 1, -3)).unwrap();
        assert_eq!(q, Poly::linear(Var::K, 2, 1));
        assert!(a.div_exact(&Poly::linear(Var::K, 1, 1)).is_none());
    }

    #[test]
    fn gcd_examples() {
        // gcd(k^2-1, k-1) = k-1
        let p = &Poly::linear(Var::K, 1, -1) * &Poly::linear(Var::K, 1, 1);
        let q = Poly::linear(Var::K, 1, -1);
        assert_eq!(poly_gcd(&p, &q), q);
        // gcd(k, k+1) = 1
        assert_eq!(poly_gcd(&k(), &Poly::linear(Var::K, 1, 1)), Poly::one());
        // gcd((k-n)(k+2), (k-n)(k+5)) = k-n
        let kn = &k() - &n();
        let a = &kn * &Poly::linear(Var::K, 1, 2);
        let b = &kn * &Poly::linear(Var::K, 1, 5);
        let g = poly_gcd(&a, &b);
        assert_eq!(g, kn);
        assert!(a.div_exact(&g).is_some());
        assert!(b.div_exact(&g).is_some());
    }

    #[test]
    fn gcd_with_common_factor_property() {
        // gcd(p*g, q*g) divisible by g for coprime p, q
        let p = Poly::linear(Var::K, 1, 1);
        let q = Poly::linear(Var::K, 1, 2);
        let g = &(&k() * &k()) + &n();
        let gg = poly_gcd(&(&p * &g), &(&q * &g));
        assert!(gg.div_exact(&g.monic_lex()).is_some());
    }

    #[test]
    fn content_and_primitive() {
        let p = &(&k() * &n()) + &(&k() * &k());
        assert_eq!(p.content(Var::K), Poly::one());
        let p2 = p.scale(&rat(2, 3));
        assert_eq!(p2.primitive_int(), p);
    }
}
