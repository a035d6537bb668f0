//! Integer lattice algebra: kernels, Hermite normal forms, saturation and indices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::linalg::{determinant, express, nullspace, rank};
use super::rat::{from_bigints, lcm_denominators, QVec, Rat};

pub type IVec = Vec<BigInt>;

/// Clears denominators of each row separately.
pub fn integer_rows(rows: &[QVec]) -> Vec<IVec> {
    rows.iter()
        .map(|r| {
            let l = Rat::from_integer(lcm_denominators(r));
            r.iter().map(|x| (x * &l).to_integer()).collect()
        })
        .collect()
}

/// Lattice basis of `{x in Z^n : A x = 0}` for an integer matrix `A` with `n` columns.
///
/// Column operations reduce `A` to lower echelon form while the same operations are applied
/// to an identity matrix; the transformed unit columns at non-pivot positions span the kernel.
pub fn integer_kernel(a: &[IVec], n: usize) -> Vec<IVec> {
    let m = a.len();
    // Store columns for cheap column operations.
    let mut cols: Vec<IVec> = (0..n).map(|j| (0..m).map(|i| a[i][j].clone()).collect()).collect();
    let mut u: Vec<IVec> =
        (0..n).map(|j| (0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut c = 0;
    for r in 0..m {
        if c == n {
            break;
        }
        loop {
            let best = (c..n).filter(|&j| !cols[j][r].is_zero()).min_by(|&x, &y| cols[x][r].abs().cmp(&cols[y][r].abs()));
            let Some(b) = best else { break };
            cols.swap(c, b);
            u.swap(c, b);
            let mut done = true;
            for j in c + 1..n {
                if cols[j][r].is_zero() {
                    continue;
                }
                let q = cols[j][r].div_floor(&cols[c][r]);
                let (pc, pu) = (cols[c].clone(), u[c].clone());
                for (x, y) in cols[j].iter_mut().zip(&pc) {
                    *x -= &q * y;
                }
                for (x, y) in u[j].iter_mut().zip(&pu) {
                    *x -= &q * y;
                }
                if !cols[j][r].is_zero() {
                    done = false;
                }
            }
            if done {
                c += 1;
                break;
            }
        }
    }
    u.drain(c..).collect()
}

/// Row Hermite normal form of the lattice generated by `gens`, zero rows removed.
/// Two generating sets span the same lattice iff their forms coincide.
pub fn hnf(gens: &[IVec], n: usize) -> Vec<IVec> {
    let mut rows: Vec<IVec> = gens.to_vec();
    let mut r = 0;
    for c in 0..n {
        if r == rows.len() {
            break;
        }
        loop {
            let best =
                (r..rows.len()).filter(|&i| !rows[i][c].is_zero()).min_by(|&x, &y| rows[x][c].abs().cmp(&rows[y][c].abs()));
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let p = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&p) {
                    *x -= &q * y;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            let p = rows[r].clone();
            for i in 0..r {
                let q = rows[i][c].div_floor(&p[c]);
                if !q.is_zero() {
                    for (x, y) in rows[i].iter_mut().zip(&p) {
                        *x -= &q * y;
                    }
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    rows
}

/// Lattice basis (in Hermite normal form) of `span(gens) ∩ Z^n`.
pub fn saturated_basis(gens: &[QVec], n: usize) -> Vec<QVec> {
    if rank(gens, n) == 0 {
        return Vec::new();
    }
    let perp = nullspace(gens, n);
    let kernel = integer_kernel(&integer_rows(&perp), n);
    hnf(&kernel, n).iter().map(|r| from_bigints(r)).collect()
}

/// HNF basis of the lattice generated by integer vectors.
pub fn generated_basis(gens: &[QVec], n: usize) -> Vec<QVec> {
    let ints: Vec<IVec> = gens
        .iter()
        .map(|g| {
            g.iter()
                .map(|x| {
                    assert!(x.is_integer(), "lattice generators must be integral");
                    x.to_integer()
                })
                .collect()
        })
        .collect();
    hnf(&ints, n).iter().map(|r| from_bigints(r)).collect()
}

/// Index `[lat : sub]` of a full-rank sublattice; `None` if `sub` is not contained in `lat`
/// or has smaller rank. Both arguments are bases.
pub fn lattice_index(sub: &[QVec], lat: &[QVec]) -> Option<BigInt> {
    if sub.len() != lat.len() {
        return None;
    }
    if sub.is_empty() {
        return Some(BigInt::one());
    }
    let mut coords = Vec::with_capacity(sub.len());
    for v in sub {
        let c = express(lat, v)?;
        if !c.iter().all(|x| x.is_integer()) {
            return None;
        }
        coords.push(c);
    }
    let d = determinant(&coords);
    if d.is_zero() {
        return None;
    }
    Some(d.abs().to_integer())
}

/// Integer vector `c` with `h . c = gcd(h)`, for a nonzero integer vector `h`.
pub fn bezout_vector(h: &[BigInt]) -> (BigInt, IVec) {
    let n = h.len();
    let mut g = BigInt::zero();
    let mut c: IVec = vec![BigInt::zero(); n];
    for (i, x) in h.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        if g.is_zero() {
            g = x.abs();
            c[i] = if x.is_negative() { -BigInt::one() } else { BigInt::one() };
            continue;
        }
        let e = g.extended_gcd(x);
        // e.gcd = e.x * g + e.y * x
        for ci in c.iter_mut() {
            *ci *= &e.x;
        }
        c[i] = e.y.clone();
        g = e.gcd;
        if g.is_negative() {
            g = -g;
            for ci in c.iter_mut() {
                *ci = -ci.clone();
            }
        }
    }
    (g, c)
}

/// Reduces an integer vector modulo a lattice given in row Hermite normal form, yielding the
/// canonical coset representative used for comparisons.
pub fn reduce_mod_hnf(v: &[Rat], basis: &[QVec]) -> QVec {
    let mut w = v.to_vec();
    for b in basis {
        let Some(p) = b.iter().position(|x| !x.is_zero()) else { continue };
        let q = (&w[p] / &b[p]).floor();
        if !q.is_zero() {
            for (x, y) in w.iter_mut().zip(b) {
                *x -= &q * y;
            }
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{int_vec, rat};

    fn iv(xs: &[i64]) -> IVec {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn kernel_of_single_row() {
        let k = integer_kernel(&[iv(&[2, 3, 5])], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigInt = v.iter().zip([2, 3, 5]).map(|(x, y)| x * BigInt::from(y)).sum();
            assert!(s.is_zero());
        }
        // Saturated: the kernel lattice has index one in its rational span.
        let q: Vec<QVec> = k.iter().map(|r| from_bigints(r)).collect();
        let sat = saturated_basis(&q, 3);
        assert_eq!(lattice_index(&q, &sat), Some(BigInt::one()));
    }

    #[test]
    fn saturation_detects_index_two() {
        let gens = vec![int_vec(&[2, 0]), int_vec(&[0, 1])];
        let sat = saturated_basis(&gens, 2);
        assert_eq!(lattice_index(&gens, &sat), Some(BigInt::from(2)));
        let diag = vec![int_vec(&[1, 1])];
        let s = saturated_basis(&[int_vec(&[3, 3])], 2);
        assert_eq!(s, diag);
    }

    #[test]
    fn hnf_is_canonical() {
        let a = hnf(&[iv(&[1, 1, 0]), iv(&[0, 1, 1])], 3);
        let b = hnf(&[iv(&[1, 2, 1]), iv(&[1, 1, 0])], 3);
        assert_eq!(a, b);
    }

    #[test]
    fn bezout() {
        let h = iv(&[6, 10, 15]);
        let (g, c) = bezout_vector(&h);
        assert_eq!(g, BigInt::one());
        let s: BigInt = h.iter().zip(&c).map(|(x, y)| x * y).sum();
        assert_eq!(s, BigInt::one());
        let (g, c) = bezout_vector(&iv(&[0, -4]));
        assert_eq!(g, BigInt::from(4));
        assert_eq!(c, iv(&[0, -1]));
    }

    #[test]
    fn reduction_mod_lattice() {
        let basis = generated_basis(&[int_vec(&[1, 1])], 2);
        let a = reduce_mod_hnf(&int_vec(&[5, 2]), &basis);
        let b = reduce_mod_hnf(&int_vec(&[3, 0]), &basis);
        assert_eq!(a, b);
        assert_eq!(a[0], rat(0));
    }
}
