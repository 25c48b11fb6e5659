//! Sylvester-type Hadamard matrices.

use crate::error::{Error, Result};
use crate::hv::BipolarHV;

fn check_order(order: usize) -> Result<()> {
    if order == 0 || !order.is_power_of_two() {
        return Err(Error::HadamardOrder(order));
    }
    Ok(())
}

/// Entry `(row, col)` of the Sylvester matrix: `(-1)^popcount(row & col)`.
pub fn hadamard_entry(row: usize, col: usize) -> i8 {
    if (row & col).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Row `row` of the order-`order` Sylvester matrix.
pub fn hadamard_row(order: usize, row: usize) -> Result<BipolarHV> {
    check_order(order)?;
    if row >= order {
        return Err(Error::HadamardRow { order, row });
    }
    BipolarHV::from_fn(order, |c| hadamard_entry(row, c) > 0)
}

/// Full matrix by the doubling recursion `h_2n = [[h_n, h_n], [h_n, -h_n]]`.
pub fn sylvester_matrix(order: usize) -> Result<Vec<Vec<i8>>> {
    check_order(order)?;
    let mut h = vec![vec![1i8]];
    while h.len() < order {
        let n = h.len();
        let mut next = vec![vec![0i8; 2 * n]; 2 * n];
        for r in 0..n {
            for c in 0..n {
                let v = h[r][c];
                next[r][c] = v;
                next[r][c + n] = v;
                next[r + n][c] = v;
                next[r + n][c + n] = -v;
            }
        }
        h = next;
    }
    Ok(h)
}

/// Smallest power of two ≥ `dim`.
pub fn covering_order(dim: usize) -> usize {
    dim.max(1).next_power_of_two()
}

/// Row `row` of the covering-order matrix truncated to the first `dim` columns.
pub fn truncated_row(dim: usize, row: usize) -> Result<BipolarHV> {
    let order = covering_order(dim);
    if row >= order {
        return Err(Error::HadamardRow { order, row });
    }
    BipolarHV::from_fn(dim, |c| hadamard_entry(row, c) > 0)
}
