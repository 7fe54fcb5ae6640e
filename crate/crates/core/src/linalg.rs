//! Exact linear solving over rational functions.
//!
//! Rows are cleared to polynomial entries; elimination is fraction-free with
//! per-row content removal, and back substitution happens over the fraction
//! field. Returns the full affine solution space.

use num_traits::{One, Signed, Zero};

use crate::poly::{poly_gcd, Int, Poly, Rat};
use crate::ratfun::RatFun;

/// Affine solution space `particular + span(kernel)`.
#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub particular: Vec<RatFun>,
    pub kernel: Vec<Vec<RatFun>>,
}

impl LinearSolution {
    pub fn dim(&self) -> usize {
        self.kernel.len()
    }
}

/// Solve `A x = b` exactly. `None` iff the system is inconsistent.
pub fn solve_linear_system(rows: &[Vec<RatFun>], rhs: &[RatFun]) -> Option<LinearSolution> {
    assert_eq!(rows.len(), rhs.len(), "row/rhs length mismatch");
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut mat: Vec<Vec<Poly>> = Vec::with_capacity(rows.len());
    for (row, b) in rows.iter().zip(rhs) {
        assert_eq!(row.len(), ncols, "ragged system");
        let mut den = Poly::one();
        for e in row.iter().chain(std::iter::once(b)) {
            let g = poly_gcd(&den, e.den());
            den = &den * &e.den().div_exact(&g).expect("gcd divides");
        }
        let mut cleared: Vec<Poly> = Vec::with_capacity(ncols + 1);
        for e in row.iter().chain(std::iter::once(b)) {
            let scale = den.div_exact(e.den()).expect("lcm divisible by denom");
            cleared.push(&scale * e.num());
        }
        mat.push(cleared);
    }
    echelon_solve(mat, ncols)
}

fn row_content(row: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for e in row {
        if !e.is_zero() {
            g = poly_gcd(&g, e);
            if g.is_one() {
                break;
            }
        }
    }
    g
}

fn reduce_row(row: &mut [Poly]) {
    let g = row_content(row);
    if !g.is_zero() && !g.is_one() {
        for e in row.iter_mut() {
            *e = e.div_exact(&g).expect("content divides");
        }
    }
    // also strip the common rational content of the coefficients
    let mut num = Int::zero();
    let mut den = Int::one();
    for e in row.iter() {
        for (_, c) in e.terms() {
            num = num_integer::gcd(num, c.numer().abs());
            den = num_integer::lcm(den, c.denom().clone());
        }
    }
    if num.is_zero() || (num.is_one() && den.is_one()) {
        return;
    }
    let scale = Rat::new(den, num);
    for e in row.iter_mut() {
        *e = e.scale(&scale);
    }
}

fn echelon_solve(mut mat: Vec<Vec<Poly>>, ncols: usize) -> Option<LinearSolution> {
    let nrows = mat.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut pivot_rows: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut next_row = 0;
    for col in 0..ncols {
        // smallest entry makes a friendlier pivot
        let pick = (next_row..nrows)
            .filter(|&r| !mat[r][col].is_zero())
            .min_by_key(|&r| mat[r][col].terms().count() + mat[r][col].total_degree().unwrap_or(0));
        let Some(prow) = pick else { continue };
        mat.swap(next_row, prow);
        for r in 0..nrows {
            if r == next_row || mat[r][col].is_zero() {
                continue;
            }
            let a = mat[next_row][col].clone();
            let b = mat[r][col].clone();
            let g = poly_gcd(&a, &b);
            let a = a.div_exact(&g).expect("gcd divides");
            let b = b.div_exact(&g).expect("gcd divides");
            for c in 0..=ncols {
                let t = &(&mat[r][c] * &a) - &(&mat[next_row][c] * &b);
                mat[r][c] = t;
            }
            reduce_row(&mut mat[r]);
        }
        pivot_of_col[col] = Some(next_row);
        pivot_rows.push((next_row, col));
        next_row += 1;
        if next_row == nrows {
            break;
        }
    }
    // inconsistency check
    for r in next_row..nrows {
        if mat[r][..ncols].iter().all(|e| e.is_zero()) && !mat[r][ncols].is_zero() {
            return None;
        }
    }
    // rows below rank that still carry coefficients were never visited as
    // pivots only if every column was used; double-check all residual rows
    for row in mat.iter().skip(next_row) {
        if row[..ncols].iter().all(|e| e.is_zero()) && !row[ncols].is_zero() {
            return None;
        }
    }

    let free_cols: Vec<usize> = (0..ncols).filter(|c| pivot_of_col[*c].is_none()).collect();

    let solve_with = |free_vals: &dyn Fn(usize) -> RatFun, use_rhs: bool| -> Vec<RatFun> {
        let mut x = vec![RatFun::zero(); ncols];
        for &c in &free_cols {
            x[c] = free_vals(c);
        }
        for &(r, c) in pivot_rows.iter().rev() {
            let mut acc = if use_rhs {
                RatFun::from_poly(mat[r][ncols].clone())
            } else {
                RatFun::zero()
            };
            for c2 in c + 1..ncols {
                if !mat[r][c2].is_zero() && !x[c2].is_zero() {
                    acc = &acc - &(&RatFun::from_poly(mat[r][c2].clone()) * &x[c2]);
                }
            }
            x[c] = &acc / &RatFun::from_poly(mat[r][c].clone());
        }
        x
    };

    let particular = solve_with(&|_| RatFun::zero(), true);
    let mut kernel = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let v = solve_with(
            &|c| {
                if c == fc {
                    RatFun::one()
                } else {
                    RatFun::zero()
                }
            },
            false,
        );
        kernel.push(v);
    }
    Some(LinearSolution { particular, kernel })
}

/// Matrix-vector product for verification.
pub fn apply(rows: &[Vec<RatFun>], x: &[RatFun]) -> Vec<RatFun> {
    rows.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(RatFun::zero(), |acc, (a, b)| &acc + &(a * b))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, Poly, Var};

    fn rf(p: Poly) -> RatFun {
        RatFun::from_poly(p)
    }

    #[test]
    fn identity_system() {
        let rows = vec![
            vec![RatFun::one(), RatFun::zero()],
            vec![RatFun::zero(), RatFun::one()],
        ];
        let rhs = vec![RatFun::from_int(3), RatFun::from_int(-7)];
        let sol = solve_linear_system(&rows, &rhs).unwrap();
        assert_eq!(sol.dim(), 0);
        assert_eq!(sol.particular[0], RatFun::from_int(3));
        assert_eq!(sol.particular[1], RatFun::from_int(-7));
    }

    #[test]
    fn rank_deficient_homogeneous() {
        // x + y = 0 twice: kernel dimension 1
        let rows = vec![
            vec![RatFun::one(), RatFun::one()],
            vec![RatFun::from_int(2), RatFun::from_int(2)],
        ];
        let rhs = vec![RatFun::zero(), RatFun::zero()];
        let sol = solve_linear_system(&rows, &rhs).unwrap();
        assert_eq!(sol.dim(), 1);
        let v = &sol.kernel[0];
        assert_eq!(&v[0] + &v[1], RatFun::zero());
        assert!(!v.iter().all(|e| e.is_zero()));
    }

    #[test]
    fn inconsistent_system() {
        let rows = vec![
            vec![RatFun::one(), RatFun::one()],
            vec![RatFun::one(), RatFun::one()],
        ];
        let rhs = vec![RatFun::zero(), RatFun::one()];
        assert!(solve_linear_system(&rows, &rhs).is_none());
    }

    #[test]
    fn symbolic_2x2_cross_checked_numerically() {
        let n = Poly::var(Var::N);
        // [[n, 1], [1, n]] x = [n+1, 2]
        let rows = vec![
            vec![rf(n.clone()), RatFun::one()],
            vec![RatFun::one(), rf(n.clone())],
        ];
        let rhs = vec![rf(Poly::linear(Var::N, 1, 1)), RatFun::from_int(2)];
        let sol = solve_linear_system(&rows, &rhs).unwrap();
        assert_eq!(sol.dim(), 0);
        for n0 in [2i64, 3, 5] {
            let point = [(Var::N, rat(n0, 1))];
            let x0 = sol.particular[0].eval(&point).unwrap();
            let x1 = sol.particular[1].eval(&point).unwrap();
            // numeric elimination done by hand: solves n*x0 + x1 = n+1, x0 + n*x1 = 2
            assert_eq!(&rat(n0, 1) * &x0 + &x1, rat(n0 + 1, 1));
            assert_eq!(&x0 + &rat(n0, 1) * &x1, rat(2, 1));
        }
        let residual = apply(&rows, &sol.particular);
        assert_eq!(residual, rhs);
    }
}
