//! Dense complex spectra and exact integer elimination.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use num_integer::Integer;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;

/// All eigenvalues, sorted by modulus descending.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = a
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let mut ev: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    ev.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    Ok(ev)
}

/// Eigenvector for a (simple) eigenvalue by inverse iteration.
pub fn eigenvector(a: &CMatrix, lambda: C64) -> Result<Vec<C64>> {
    let n = a.nrows();
    let shift = lambda + C64::new(1e-13 * lambda.norm().max(1.0), 0.0);
    let m = a - CMatrix::identity(n, n) * shift;
    let lu = m.lu();
    let mut v = nalgebra::DVector::from_element(n, C64::new(1.0, 0.0));
    for _ in 0..4 {
        let w = lu
            .solve(&v)
            .ok_or_else(|| Error::Numerical("singular inverse-iteration system".into()))?;
        let nrm = w.norm();
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::Numerical("inverse iteration broke down".into()));
        }
        v = w / C64::new(nrm, 0.0);
    }
    Ok(v.iter().copied().collect())
}

pub fn determinant(a: &CMatrix) -> C64 {
    a.clone().lu().determinant()
}

pub type IntMatrix = Vec<Vec<i128>>;

fn checked(v: Option<i128>) -> Result<i128> {
    v.ok_or(Error::Overflow)
}

/// Smith normal form diagonal of an integer matrix: the nonzero invariant
/// factors d_1 | d_2 | ... (all positive). Rank is the length.
pub fn smith_invariants(a: &IntMatrix) -> Result<Vec<i128>> {
    let mut m = a.clone();
    let rows = m.len();
    if rows == 0 {
        return Ok(Vec::new());
    }
    let cols = m[0].len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows && t < cols {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = m[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = m[i][t].div_euclid(p);
                if q != 0 {
                    for j in t..cols {
                        m[i][j] = checked(m[i][j].checked_sub(checked(q.checked_mul(m[t][j]))?))?;
                    }
                }
                if m[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                let q = m[t][j].div_euclid(p);
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] = checked(row[j].checked_sub(checked(q.checked_mul(row[t]))?))?;
                    }
                }
                if m[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility of the rest of the block
                let mut bad = None;
                'outer: for (i, row) in m.iter().enumerate().skip(t + 1) {
                    for &x in row.iter().skip(t + 1) {
                        if x % p != 0 {
                            bad = Some(i);
                            break 'outer;
                        }
                    }
                }
                match bad {
                    None => break,
                    Some(i) => {
                        for j in t..cols {
                            m[t][j] = checked(m[t][j].checked_add(m[i][j]))?;
                        }
                        continue;
                    }
                }
            }
            // move the smallest nonzero entry of row t / column t to the pivot
            let mut best = (t, t);
            for i in t..rows {
                if m[i][t] != 0 && (m[best.0][best.1] == 0 || m[i][t].abs() < m[best.0][best.1].abs()) {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if m[t][j] != 0 && (m[best.0][best.1] == 0 || m[t][j].abs() < m[best.0][best.1].abs()) {
                    best = (t, j);
                }
            }
            m.swap(t, best.0);
            for row in m.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    Ok(diag)
}

pub fn integer_rank(a: &IntMatrix) -> Result<usize> {
    Ok(smith_invariants(a)?.len())
}

/// A Z-basis of the integer kernel {v : A v = 0}.
///
/// Column reduction with a tracked unimodular transform; columns of the
/// transform that end up over zero columns span the kernel.
pub fn integer_kernel(a: &IntMatrix, cols: usize) -> Result<Vec<Vec<i128>>> {
    let rows = a.len();
    let mut m: IntMatrix = a.clone();
    let mut v: IntMatrix = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut pivot_col = 0;
    for r in 0..rows {
        if pivot_col >= cols {
            break;
        }
        loop {
            // gcd-combine row r entries in columns pivot_col.. into pivot_col
            let mut nz: Vec<usize> = (pivot_col..cols).filter(|&j| m[r][j] != 0).collect();
            if nz.is_empty() {
                break;
            }
            nz.sort_by_key(|&j| m[r][j].abs());
            let j0 = nz[0];
            swap_cols(&mut m, pivot_col, j0);
            swap_cols(&mut v, pivot_col, j0);
            let p = m[r][pivot_col];
            let mut done = true;
            for j in pivot_col + 1..cols {
                if m[r][j] != 0 {
                    let q = Integer::div_floor(&m[r][j], &p);
                    col_axpy(&mut m, j, pivot_col, q)?;
                    col_axpy(&mut v, j, pivot_col, q)?;
                    if m[r][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                pivot_col += 1;
                break;
            }
        }
    }
    Ok((pivot_col..cols)
        .map(|j| (0..cols).map(|i| v[i][j]).collect())
        .collect())
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// column j -= q * column k
fn col_axpy(m: &mut IntMatrix, j: usize, k: usize, q: i128) -> Result<()> {
    for row in m.iter_mut() {
        row[j] = checked(row[j].checked_sub(checked(q.checked_mul(row[k]))?))?;
    }
    Ok(())
}

pub fn mat_vec(a: &IntMatrix, x: &[i128]) -> Vec<i128> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_small() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        assert_eq!(smith_invariants(&a).unwrap(), vec![2, 6, 12]);
        let z = vec![vec![0, 0], vec![0, 0]];
        assert!(smith_invariants(&z).unwrap().is_empty());
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = vec![vec![1, 1, 1]];
        let k = integer_kernel(&a, 3).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(mat_vec(&a, v), vec![0]);
        }
    }

    #[test]
    fn eigen_of_triangular() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(3.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
        );
        let ev = eigenvalues(&a).unwrap();
        assert!((ev[0] - C64::new(3.0, 0.0)).norm() < 1e-14);
        assert!((ev[1] + C64::new(1.0, 0.0)).norm() < 1e-14);
        let v = eigenvector(&a, ev[0]).unwrap();
        assert!(v[1].norm() < 1e-12);
    }
}
