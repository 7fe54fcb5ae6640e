//! Auxiliary sequences `g(n,k)` driven by a `k`-recurrence of order `d`
//!
//!     g(n,k+d) = r_1(n,k) g(n,k) + ... + r_d(n,k) g(n,k+d-1) + u(n,k)
//!
//! and an `n`-rule
//!
//!     g(n+1,k) = s(n,k) g(n,k) + v(n,k),
//!
//! with exact evaluation from initial values and the built-in sequences
//! (harmonic numbers, Fibonacci numbers, derangements, binomial partial
//! sums, inner sums of cubed binomials).

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hyper::{HyperTerm, LinForm};
use crate::poly::{rint, Poly, Rat, Var};
use crate::ratfun::RatFun;

/// Inhomogeneous part of a recurrence rule.
#[derive(Clone, Debug)]
pub enum Inhom {
    Zero,
    Hyper(HyperTerm),
    Mixed(MixedTerm),
}

impl Inhom {
    pub fn is_zero(&self) -> bool {
        match self {
            Inhom::Zero => true,
            Inhom::Hyper(t) => t.is_zero(),
            Inhom::Mixed(_) => false,
        }
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self, Inhom::Mixed(_))
    }
}

/// Linear combination of other sequences with hypergeometric coefficients,
/// plus a hypergeometric tail. Acyclic by construction: parts own their
/// referenced sequences.
#[derive(Clone, Debug)]
pub struct MixedTerm {
    pub parts: Vec<(HyperTerm, AuxSequence)>,
    pub tail: HyperTerm,
}

/// A sequence `g(n,k)` defined by a `k`-recurrence and an `n`-rule.
#[derive(Clone, Debug)]
pub struct AuxSequence {
    pub name: String,
    /// `r_1..r_d`, with `r_1` multiplying `g(n,k)`.
    pub r: Vec<RatFun>,
    pub u: Inhom,
    pub s: RatFun,
    pub v: Inhom,
    pub n_independent: bool,
    /// Exact values on the base window at `n = 0`.
    pub initial: BTreeMap<(i64, i64), Rat>,
    /// Value is zero whenever this form is `<= 0` (harmonic-style support).
    pub zero_when: Option<LinForm>,
}

impl AuxSequence {
    pub fn new(
        name: &str,
        r: Vec<RatFun>,
        u: Inhom,
        s: RatFun,
        v: Inhom,
        initial: BTreeMap<(i64, i64), Rat>,
    ) -> Result<AuxSequence> {
        if r.is_empty() || r[0].is_zero() {
            return Err(Error::DegenerateRecurrence);
        }
        let n_independent = s.is_one() && v.is_zero();
        Ok(AuxSequence {
            name: name.to_string(),
            r,
            u,
            s,
            v,
            n_independent,
            initial,
            zero_when: None,
        })
    }

    pub fn order(&self) -> usize {
        self.r.len()
    }

    fn with_zero_when(mut self, lf: LinForm) -> AuxSequence {
        self.zero_when = Some(lf);
        self
    }

    /// `H^{(m)}` evaluated at `a*n + k + c`; zero at nonpositive index.
    pub fn harmonic(m: u32, a: i64, c: i64) -> AuxSequence {
        assert!(m >= 1, "harmonic weight must be positive");
        assert!((0..=1).contains(&a), "harmonic offset slope must be 0 or 1");
        let idx1 = &Poly::linear(Var::K, 1, c + 1) + &Poly::linear(Var::N, a, 0);
        let u = HyperTerm::poly_factor(idx1.clone()).pow(-(m as i32));
        let v = if a == 0 {
            Inhom::Zero
        } else {
            Inhom::Hyper(HyperTerm::poly_factor(idx1).pow(-(m as i32)))
        };
        let name = match (m, a, c) {
            (1, 0, 0) => "H".to_string(),
            (m, 0, 0) => format!("H^({})", m),
            _ => format!("H^({}) at {}n+k+{}", m, a, c),
        };
        AuxSequence::new(
            &name,
            vec![RatFun::one()],
            Inhom::Hyper(u),
            RatFun::one(),
            v,
            BTreeMap::new(),
        )
        .expect("nondegenerate")
        .with_zero_when(LinForm::new(a, 1, c))
    }

    pub fn fibonacci() -> AuxSequence {
        AuxSequence::cfinite(1, 1, [rint(0), rint(1)], "F")
    }

    /// Order-2 constant recurrence `g(k+2) = b g(k) + c g(k+1)`.
    pub fn cfinite(b: i64, c: i64, inits: [Rat; 2], name: &str) -> AuxSequence {
        let mut initial = BTreeMap::new();
        initial.insert((0, 0), inits[0].clone());
        initial.insert((0, 1), inits[1].clone());
        AuxSequence::new(
            name,
            vec![RatFun::from_int(b), RatFun::from_int(c)],
            Inhom::Zero,
            RatFun::one(),
            Inhom::Zero,
            initial,
        )
        .expect("nondegenerate")
    }

    /// Derangement numbers: `D_{k+1} = (k+1) D_k + (-1)^{k+1}`.
    pub fn derangement() -> AuxSequence {
        let u = HyperTerm::power(-1, LinForm::new(0, 1, 1));
        let mut initial = BTreeMap::new();
        initial.insert((0, 0), rint(1));
        AuxSequence::new(
            "D",
            vec![RatFun::from_poly(Poly::linear(Var::K, 1, 1))],
            Inhom::Hyper(u),
            RatFun::one(),
            Inhom::Zero,
            initial,
        )
        .expect("nondegenerate")
    }

    /// `g(n,k) = sum_{j=0}^k C(n,j)`.
    pub fn binomial_partial_sum() -> AuxSequence {
        let u = HyperTerm::binomial(LinForm::var(Var::N), LinForm::new(0, 1, 1));
        let v = HyperTerm::binomial(LinForm::var(Var::N), LinForm::var(Var::K)).scale(&rint(-1));
        AuxSequence::new(
            "g",
            vec![RatFun::one()],
            Inhom::Hyper(u),
            RatFun::from_int(2),
            Inhom::Hyper(v),
            BTreeMap::new(),
        )
        .expect("nondegenerate")
        .with_zero_when(LinForm::new(0, 1, 1))
    }

    /// `g(k) = sum_j C(k,j)^3` with its order-2 recurrence.
    pub fn cube_binomial_inner_sum() -> AuxSequence {
        let k1 = Poly::linear(Var::K, 1, 1);
        let k2 = Poly::linear(Var::K, 1, 2);
        let den = &k2 * &k2;
        let r1 = RatFun::new((&k1 * &k1).scale(&rint(8)), den.clone()).unwrap();
        let mid = &Poly::monomial(Var::K, 2, rint(7)) + &Poly::linear(Var::K, 21, 16);
        let r2 = RatFun::new(mid, den).unwrap();
        let mut initial = BTreeMap::new();
        initial.insert((0, 0), rint(1));
        initial.insert((0, 1), rint(2));
        AuxSequence::new(
            "g3",
            vec![r1, r2],
            Inhom::Zero,
            RatFun::one(),
            Inhom::Zero,
            initial,
        )
        .expect("nondegenerate")
    }

    /// Look up a builtin by name.
    pub fn builtin(name: &str) -> Result<AuxSequence> {
        match name {
            "harmonic" | "H" => Ok(AuxSequence::harmonic(1, 0, 0)),
            "harmonic2" | "H2" => Ok(AuxSequence::harmonic(2, 0, 0)),
            "fibonacci" | "F" => Ok(AuxSequence::fibonacci()),
            "derangement" | "D" => Ok(AuxSequence::derangement()),
            "binomial-partial-sum" => Ok(AuxSequence::binomial_partial_sum()),
            "cube-binomial-inner-sum" => Ok(AuxSequence::cube_binomial_inner_sum()),
            _ => Err(Error::UnknownBuiltin(name.to_string())),
        }
    }
}

/// Memoizing exact evaluator for one or more sequences.
pub struct AuxEval {
    cache: HashMap<(usize, i64, i64), Rat>,
}

impl AuxEval {
    pub fn new() -> AuxEval {
        AuxEval {
            cache: HashMap::new(),
        }
    }

    pub fn eval(&mut self, g: &AuxSequence, n0: i64, k0: i64) -> Result<Rat> {
        self.eval_tagged(g, 0, n0, k0)
    }

    fn eval_tagged(&mut self, g: &AuxSequence, tag: usize, n0: i64, k0: i64) -> Result<Rat> {
        if let Some(zw) = &g.zero_when {
            if zw.eval(n0, k0) <= 0 {
                return Ok(Rat::zero());
            }
        }
        if let Some(v) = g.initial.get(&(n0, k0)) {
            return Ok(v.clone());
        }
        if let Some(v) = self.cache.get(&(tag, n0, k0)) {
            return Ok(v.clone());
        }
        let val = self.compute(g, tag, n0, k0)?;
        self.cache.insert((tag, n0, k0), val.clone());
        Ok(val)
    }

    fn compute(&mut self, g: &AuxSequence, tag: usize, n0: i64, k0: i64) -> Result<Rat> {
        let d = g.order() as i64;
        if n0 > 0 {
            // n-rule first: g(n,k) = s(n-1,k) g(n-1,k) + v(n-1,k)
            let s = eval_rf(&g.s, n0 - 1, k0)?;
            let prev = self.eval_tagged(g, tag, n0 - 1, k0)?;
            let v = self.eval_inhom(&g.v, tag, n0 - 1, k0)?;
            return Ok(&(&s * &prev) + &v);
        }
        if n0 < 0 {
            // inverted n-rule: g(n,k) = (g(n+1,k) - v(n,k)) / s(n,k)
            let s = eval_rf(&g.s, n0, k0)?;
            if s.is_zero() {
                return Err(pole(&g.s, Var::N, n0));
            }
            let next = self.eval_tagged(g, tag, n0 + 1, k0)?;
            let v = self.eval_inhom(&g.v, tag, n0, k0)?;
            return Ok(&(&next - &v) / &s);
        }
        // a zero region below makes forward recursion terminate on its own
        let forward = g.zero_when.is_some() || k0 >= self.base_k(g) + d;
        if forward {
            // forward k-rule at shift point k0 - d
            let kp = k0 - d;
            let mut acc = self.eval_inhom(&g.u, tag, n0, kp)?;
            for (i, ri) in g.r.iter().enumerate() {
                let c = eval_rf(ri, n0, kp)?;
                if !c.is_zero() {
                    let gi = self.eval_tagged(g, tag, n0, kp + i as i64)?;
                    acc = &acc + &(&c * &gi);
                }
            }
            Ok(acc)
        } else {
            // backward: solve the rule at shift point k0 for g(n,k0)
            let r1 = eval_rf(&g.r[0], n0, k0)?;
            if r1.is_zero() {
                return Err(pole(&g.r[0], Var::K, k0));
            }
            let mut acc = self.eval_tagged(g, tag, n0, k0 + d)?;
            acc = &acc - &self.eval_inhom(&g.u, tag, n0, k0)?;
            for (i, ri) in g.r.iter().enumerate().skip(1) {
                let c = eval_rf(ri, n0, k0)?;
                if !c.is_zero() {
                    let gi = self.eval_tagged(g, tag, n0, k0 + i as i64)?;
                    acc = &acc - &(&c * &gi);
                }
            }
            Ok(&acc / &r1)
        }
    }

    fn base_k(&self, g: &AuxSequence) -> i64 {
        g.initial
            .keys()
            .filter(|(n, _)| *n == 0)
            .map(|(_, k)| *k)
            .min()
            .unwrap_or(1)
    }

    fn eval_inhom(&mut self, inhom: &Inhom, tag: usize, n0: i64, k0: i64) -> Result<Rat> {
        match inhom {
            Inhom::Zero => Ok(Rat::zero()),
            Inhom::Hyper(t) => t.eval(n0, k0),
            Inhom::Mixed(m) => {
                let mut acc = m.tail.eval(n0, k0)?;
                for (idx, (coeff, seq)) in m.parts.iter().enumerate() {
                    let c = coeff.eval(n0, k0)?;
                    if !c.is_zero() {
                        let sub = self.eval_tagged(seq, tag * 31 + idx + 1, n0, k0)?;
                        acc = &acc + &(&c * &sub);
                    }
                }
                Ok(acc)
            }
        }
    }
}

impl Default for AuxEval {
    fn default() -> Self {
        AuxEval::new()
    }
}

/// Convenience one-shot evaluation.
pub fn aux_eval(g: &AuxSequence, n0: i64, k0: i64) -> Result<Rat> {
    AuxEval::new().eval(g, n0, k0)
}

fn eval_rf(r: &RatFun, n0: i64, k0: i64) -> Result<Rat> {
    let point = [(Var::N, rint(n0)), (Var::K, rint(k0))];
    match r.eval(&point) {
        Ok(v) => Ok(v),
        Err(_) => Err(Error::PoleOnPath {
            den: r.den().to_string(),
            var: Var::K,
            at: format!("(n,k)=({},{})", n0, k0),
        }),
    }
}

fn pole(r: &RatFun, var: Var, at: i64) -> Error {
    Error::PoleOnPath {
        den: format!("leading use of {}", r),
        var,
        at: at.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn harmonic_values() {
        let h = AuxSequence::harmonic(1, 0, 0);
        assert_eq!(aux_eval(&h, 0, 3).unwrap(), rat(11, 6));
        assert_eq!(aux_eval(&h, 0, 0).unwrap(), rint(0));
        assert_eq!(aux_eval(&h, 0, -2).unwrap(), rint(0));
        // matches the defining sum up to k = 100
        let mut ev = AuxEval::new();
        let mut direct = Rat::zero();
        for k in 1..=100i64 {
            direct = &direct + &rat(1, k);
            assert_eq!(ev.eval(&h, 0, k).unwrap(), direct);
        }
        let h2 = AuxSequence::harmonic(2, 0, 0);
        assert_eq!(aux_eval(&h2, 0, 3).unwrap(), rat(49, 36));
    }

    #[test]
    fn harmonic_offset_rules() {
        // g(n,k) = H_{n+k}
        let h = AuxSequence::harmonic(1, 1, 0);
        let plain = AuxSequence::harmonic(1, 0, 0);
        let mut ev = AuxEval::new();
        let mut ev2 = AuxEval::new();
        for n0 in 0..8 {
            for k0 in -2..8 {
                assert_eq!(
                    ev.eval(&h, n0, k0).unwrap(),
                    ev2.eval(&plain, 0, n0 + k0).unwrap()
                );
            }
        }
    }

    #[test]
    fn fibonacci_and_derangement() {
        let f = AuxSequence::fibonacci();
        assert_eq!(aux_eval(&f, 0, 10).unwrap(), rint(55));
        assert_eq!(aux_eval(&f, 5, 10).unwrap(), rint(55)); // n-independent
        assert_eq!(aux_eval(&f, 0, -1).unwrap(), rint(1)); // F_{-1}
        let d = AuxSequence::derangement();
        assert_eq!(aux_eval(&d, 0, 4).unwrap(), rint(9));
        assert_eq!(aux_eval(&d, 0, 0).unwrap(), rint(1));
        assert_eq!(aux_eval(&d, 0, 1).unwrap(), rint(0));
    }

    #[test]
    fn binomial_partial_sum_rules() {
        let g = AuxSequence::binomial_partial_sum();
        assert_eq!(aux_eval(&g, 4, 2).unwrap(), rint(11));
        let mut ev = AuxEval::new();
        let top = HyperTerm::binomial(LinForm::var(Var::N), LinForm::var(Var::K));
        for n0 in 0..=20i64 {
            let mut acc = Rat::zero();
            for k0 in 0..=n0 {
                acc = &acc + &top.eval(n0, k0).unwrap();
                assert_eq!(ev.eval(&g, n0, k0).unwrap(), acc);
            }
        }
        // both rules hold exactly on a grid
        for n0 in 0..12i64 {
            for k0 in 0..12i64 {
                let lhs = ev.eval(&g, n0, k0 + 1).unwrap();
                let rhs = &ev.eval(&g, n0, k0).unwrap()
                    + &top.shift(Var::K, 1).eval(n0, k0).unwrap();
                assert_eq!(lhs, rhs);
                let lhs2 = ev.eval(&g, n0 + 1, k0).unwrap();
                let rhs2 = &(&rint(2) * &ev.eval(&g, n0, k0).unwrap())
                    - &top.eval(n0, k0).unwrap();
                assert_eq!(lhs2, rhs2);
            }
        }
    }

    #[test]
    fn cube_binomial_inner_sum_matches_brute_force() {
        let g = AuxSequence::cube_binomial_inner_sum();
        let mut ev = AuxEval::new();
        for k0 in 0..=20i64 {
            let mut acc = Rat::zero();
            for j in 0..=k0 {
                let b = HyperTerm::binomial(LinForm::new(0, 0, k0), LinForm::new(0, 0, j));
                let v = b.eval(0, 0).unwrap();
                acc = &acc + &(&(&v * &v) * &v);
            }
            assert_eq!(ev.eval(&g, 0, k0).unwrap(), acc);
        }
        assert_eq!(ev.eval(&g, 0, 2).unwrap(), rint(10));
    }

    #[test]
    fn defining_recurrences_hold_on_grid() {
        for g in [
            AuxSequence::harmonic(1, 0, 0),
            AuxSequence::harmonic(1, 1, 0),
            AuxSequence::fibonacci(),
            AuxSequence::derangement(),
            AuxSequence::binomial_partial_sum(),
            AuxSequence::cube_binomial_inner_sum(),
        ] {
            let d = g.order() as i64;
            let mut ev = AuxEval::new();
            for n0 in 0..=25i64 {
                for k0 in 1..=25i64 {
                    let mut rhs = match &g.u {
                        Inhom::Zero => Rat::zero(),
                        Inhom::Hyper(t) => t.eval(n0, k0).unwrap(),
                        Inhom::Mixed(_) => unreachable!(),
                    };
                    for (i, ri) in g.r.iter().enumerate() {
                        let c = ri
                            .eval(&[(Var::N, rint(n0)), (Var::K, rint(k0))])
                            .unwrap();
                        rhs = &rhs + &(&c * &ev.eval(&g, n0, k0 + i as i64).unwrap());
                    }
                    assert_eq!(ev.eval(&g, n0, k0 + d).unwrap(), rhs, "{} k-rule", g.name);
                    let s = g
                        .s
                        .eval(&[(Var::N, rint(n0)), (Var::K, rint(k0))])
                        .unwrap();
                    let v = match &g.v {
                        Inhom::Zero => Rat::zero(),
                        Inhom::Hyper(t) => t.eval(n0, k0).unwrap(),
                        Inhom::Mixed(_) => unreachable!(),
                    };
                    let nlhs = ev.eval(&g, n0 + 1, k0).unwrap();
                    assert_eq!(nlhs, &(&s * &ev.eval(&g, n0, k0).unwrap()) + &v, "{} n-rule", g.name);
                }
            }
        }
    }

    #[test]
    fn unknown_builtin_rejected() {
        assert!(matches!(
            AuxSequence::builtin("nope"),
            Err(Error::UnknownBuiltin(_))
        ));
        assert!(matches!(
            AuxSequence::new(
                "bad",
                vec![RatFun::zero()],
                Inhom::Zero,
                RatFun::one(),
                Inhom::Zero,
                BTreeMap::new()
            ),
            Err(Error::DegenerateRecurrence)
        ));
    }
}
