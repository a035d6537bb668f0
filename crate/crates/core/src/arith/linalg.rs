//! Exact Gaussian elimination over the rationals.
//!
//! Matrices are row-major `Vec<QVec>`; every routine takes the column count explicitly so
//! that empty matrices are well defined.

use num_traits::{One, Zero};

use super::rat::{axpy, dot, is_zero_vec, zero_vec, QVec, Rat};

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[QVec], ncols: usize) -> (Vec<QVec>, Vec<usize>) {
    let mut m: Vec<QVec> = rows.iter().filter(|r| !is_zero_vec(r)).cloned().collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = -row[c].clone();
                axpy(row, &f, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVec], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : row . x = 0 for all rows}`.
pub fn nullspace(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    let (m, pivots) = rref(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = zero_vec(ncols);
        v[free] = Rat::one();
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Greedily selects a maximal linearly independent subset, preserving order.
pub fn independent_subset(vectors: &[QVec], ncols: usize) -> Vec<QVec> {
    let mut echelon: Vec<(QVec, usize)> = Vec::new();
    let mut chosen = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for (row, p) in &echelon {
            if !w[*p].is_zero() {
                let f = -w[*p].clone() / &row[*p];
                axpy(&mut w, &f, row);
            }
        }
        if let Some(p) = (0..ncols).find(|&c| !w[c].is_zero()) {
            echelon.push((w, p));
            chosen.push(v.clone());
        }
    }
    chosen
}

/// Coefficients `c` with `sum c_i basis_i = v`, if `v` lies in the span.
/// `basis` must be linearly independent.
pub fn express(basis: &[QVec], v: &[Rat]) -> Option<QVec> {
    let n = v.len();
    let k = basis.len();
    // Solve the n x k system by eliminating on the augmented transpose.
    let rows: Vec<QVec> = (0..n)
        .map(|i| {
            let mut r: QVec = basis.iter().map(|b| b[i].clone()).collect();
            r.push(v[i].clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&rows, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut c = zero_vec(k);
    for (row, &p) in m.iter().zip(&pivots) {
        c[p] = row[k].clone();
    }
    // Independence of basis guarantees uniqueness; verify the solution.
    let mut check = zero_vec(n);
    for (ci, b) in c.iter().zip(basis) {
        axpy(&mut check, ci, b);
    }
    if check.as_slice() == v {
        Some(c)
    } else {
        None
    }
}

pub fn in_span(basis: &[QVec], v: &[Rat], ncols: usize) -> bool {
    if is_zero_vec(v) {
        return true;
    }
    let r = rank(basis, ncols);
    let mut ext = basis.to_vec();
    ext.push(v.to_vec());
    rank(&ext, ncols) == r
}

/// Inverse of a square matrix, if invertible.
pub fn inverse(m: &[QVec]) -> Option<Vec<QVec>> {
    let n = m.len();
    let aug: Vec<QVec> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    let (red, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(m: &[QVec]) -> Rat {
    let n = m.len();
    let mut a: Vec<QVec> = m.to_vec();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let pivot = a[c].clone();
        for row in a.iter_mut().skip(c + 1) {
            if !row[c].is_zero() {
                let f = -row[c].clone() / &pivot[c];
                axpy(row, &f, &pivot);
            }
        }
    }
    det
}

pub fn mat_vec(m: &[QVec], v: &[Rat]) -> QVec {
    m.iter().map(|r| dot(r, v)).collect()
}

pub fn transpose(m: &[QVec], ncols: usize) -> Vec<QVec> {
    (0..ncols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Basis of the orthogonal complement of `span(vectors)` in `Q^n`.
pub fn orthogonal_complement(vectors: &[QVec], n: usize) -> Vec<QVec> {
    nullspace(vectors, n)
}

/// Choose `d` coordinate indices on which the `d` independent vectors restrict to an
/// invertible matrix, and return the indices together with the inverse of that restriction
/// (so that for `x = sum y_i v_i` we get `y = inv * x[idx]`).
pub fn coordinate_chart(vectors: &[QVec], n: usize) -> (Vec<usize>, Vec<QVec>) {
    let d = vectors.len();
    if d == 0 {
        return (Vec::new(), Vec::new());
    }
    let t = transpose(vectors, n); // n x d; pick d independent rows
    let (_, pivots) = rref(vectors, n);
    debug_assert_eq!(pivots.len(), d);
    let sub: Vec<QVec> = pivots.iter().map(|&i| t[i].clone()).collect();
    let inv = inverse(&sub).expect("pivot columns give an invertible restriction");
    (pivots, inv)
}
