//! Exact rank of transition matrices over the rationals.
//!
//! Every mass in a transition matrix shares the common denominator `b^n`,
//! so the matrix has the same rank as its integer numerator matrix. The
//! rank is computed by fraction-free (Bareiss) Gaussian elimination with
//! full pivoting: the update
//! `a[r][j] := (a[r][j]·piv − a[r][pc]·a[pr][j]) / prev`
//! keeps every intermediate entry an exact minor of the input, and the
//! division is always exact. No floating point anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::channel::TransitionMatrix;

/// Exact rank over the rationals.
pub fn rank_exact(m: &TransitionMatrix) -> usize {
    let rows = m.num_rows();
    let cols = m.num_cols();
    let mat: Vec<Vec<BigInt>> = (0..rows)
        .into_par_iter()
        .map(|r| {
            (0..cols)
                .map(|c| BigInt::from(m.entry_numerator(r, c)))
                .collect()
        })
        .collect();
    integer_rank(mat)
}

/// Bareiss elimination with full pivoting on an integer matrix.
pub(crate) fn integer_rank(mut mat: Vec<Vec<BigInt>>) -> usize {
    let nrows = mat.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = mat[0].len();
    let mut active_rows: Vec<usize> = (0..nrows).collect();
    let mut active_cols: Vec<usize> = (0..ncols).collect();
    let mut prev = BigInt::one();
    let mut rank = 0;

    while !active_rows.is_empty() && !active_cols.is_empty() {
        let Some((pr_pos, pc_pos)) = choose_pivot(&mat, &active_rows, &active_cols) else {
            break; // active submatrix is all zeros
        };
        let pr = active_rows.swap_remove(pr_pos);
        let pc = active_cols.swap_remove(pc_pos);
        rank += 1;

        let (pivot_row, piv) = {
            let row = &mat[pr];
            (row.clone(), row[pc].clone())
        };
        let cols = &active_cols;
        let prev_ref = &prev;
        let piv_ref = &piv;
        let pivot_ref = &pivot_row;
        let mut updated: Vec<(usize, Vec<(usize, BigInt)>)> = active_rows
            .par_iter()
            .map(|&r| {
                let row = &mat[r];
                let mult = &row[pc];
                let new: Vec<(usize, BigInt)> = cols
                    .iter()
                    .map(|&j| {
                        let lhs = &row[j];
                        let val = if mult.is_zero() {
                            if lhs.is_zero() {
                                BigInt::zero()
                            } else {
                                exact_div(lhs * piv_ref, prev_ref)
                            }
                        } else if lhs.is_zero() {
                            exact_div(-(mult * &pivot_ref[j]), prev_ref)
                        } else {
                            exact_div(lhs * piv_ref - mult * &pivot_ref[j], prev_ref)
                        };
                        (j, val)
                    })
                    .collect();
                (r, new)
            })
            .collect();
        for (r, new) in updated.drain(..) {
            for (j, val) in new {
                mat[r][j] = val;
            }
            mat[r][pc] = BigInt::zero();
        }
        prev = piv;
    }
    rank
}

/// Markowitz-style pivot: the nonzero entry whose column has the fewest
/// nonzeros (ties broken by row nonzero count, then by smallest magnitude),
/// which keeps elimination on sparse matrices nearly fill-free.
fn choose_pivot(
    mat: &[Vec<BigInt>],
    active_rows: &[usize],
    active_cols: &[usize],
) -> Option<(usize, usize)> {
    let mut col_nnz = vec![0usize; active_cols.len()];
    let mut row_nnz = vec![0usize; active_rows.len()];
    for (ri, &r) in active_rows.iter().enumerate() {
        for (ci, &c) in active_cols.iter().enumerate() {
            if !mat[r][c].is_zero() {
                col_nnz[ci] += 1;
                row_nnz[ri] += 1;
            }
        }
    }
    let best_col = (0..active_cols.len())
        .filter(|&ci| col_nnz[ci] > 0)
        .min_by_key(|&ci| col_nnz[ci])?;
    let c = active_cols[best_col];
    let best_row = (0..active_rows.len())
        .filter(|&ri| !mat[active_rows[ri]][c].is_zero())
        .min_by_key(|&ri| {
            let r = active_rows[ri];
            (row_nnz[ri], mat[r][c].abs())
        })?;
    Some((best_row, best_col))
}

fn exact_div(num: BigInt, den: &BigInt) -> BigInt {
    if den.is_one() {
        return num;
    }
    let (q, r) = num.div_rem(den);
    debug_assert!(r.is_zero(), "Bareiss division must be exact");
    q
}
