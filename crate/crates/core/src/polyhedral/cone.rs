//! Conversion between inequality descriptions and generators in small dimension.
//!
//! Everything funnels through [`cone_generators`], which enumerates extreme rays of a
//! polyhedral cone by testing every subset of inequalities that could be tight along a ray.
//! The complexes handled here live in low local dimension, so this stays cheap and, unlike
//! incremental methods, has no ordering-dependent state.

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};

use crate::arith::linalg::{nullspace, rref};
use crate::arith::rat::{dot, is_zero_vec, neg, primitive, primitive_up_to_sign, scale, zero_vec, QVec, Rat};

/// Calls `f` on every `k`-subset of `0..m` in lexicographic order.
pub(crate) fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + m - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn combine(basis: &[QVec], coeffs: &[Rat], n: usize) -> QVec {
    let mut x = zero_vec(n);
    for (c, b) in coeffs.iter().zip(basis) {
        if !c.is_zero() {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
    }
    x
}

/// Lineality basis and extreme rays of `{x in Q^d : E x = 0, A x <= 0}`.
/// Rays are primitive integer vectors pointing into the cone, taken modulo lineality.
pub fn cone_generators(d: usize, eqs: &[QVec], ineqs: &[QVec]) -> (Vec<QVec>, Vec<QVec>) {
    let param: Vec<QVec> = if eqs.iter().all(|e| is_zero_vec(e)) {
        (0..d).map(|i| crate::arith::rat::unit_vec(d, i)).collect()
    } else {
        nullspace(eqs, d)
    };
    let k0 = param.len();
    if k0 == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut seen = HashSet::new();
    let a: Vec<QVec> = ineqs
        .iter()
        .map(|h| param.iter().map(|p| dot(h, p)).collect::<QVec>())
        .filter(|h| !is_zero_vec(h))
        .map(|h| primitive(&h))
        .filter(|h| seen.insert(h.clone()))
        .collect();
    let lin_local = nullspace(&a, k0);
    let lineality: Vec<QVec> = lin_local.iter().map(|z| combine(&param, z, d)).collect();
    let (row_space, _) = rref(&a, k0);
    let k = row_space.len();
    if k == 0 {
        return (lineality, Vec::new());
    }
    // Coordinates w on the row space: z = sum_j w_j row_j.
    let b: Vec<QVec> = a.iter().map(|ai| row_space.iter().map(|r| dot(ai, r)).collect()).collect();
    let mut found: HashSet<QVec> = HashSet::new();
    let mut rays = Vec::new();
    let mut consider = |w: QVec| {
        let vals: Vec<Rat> = b.iter().map(|bi| dot(bi, &w)).collect();
        let cand = if vals.iter().all(|v| !v.is_positive()) {
            w
        } else if vals.iter().all(|v| !v.is_negative()) {
            neg(&w)
        } else {
            return;
        };
        let z = combine(&row_space, &cand, k0);
        let x = primitive(&combine(&param, &z, d));
        if found.insert(x.clone()) {
            rays.push(x);
        }
    };
    if k == 1 {
        consider(vec![Rat::one()]);
    } else {
        for_each_subset(b.len(), k - 1, |idx| {
            let sub: Vec<QVec> = idx.iter().map(|&i| b[i].clone()).collect();
            let ns = nullspace(&sub, k);
            if ns.len() == 1 {
                consider(ns.into_iter().next().unwrap());
            }
        });
    }
    (lineality, rays)
}

/// Generators of `{x : E x = e, A x <= a}` as (vertices, rays, lineality), or `None` if empty.
pub fn polyhedron_generators(d: usize, eqs: &[(QVec, Rat)], ineqs: &[(QVec, Rat)]) -> Option<(Vec<QVec>, Vec<QVec>, Vec<QVec>)> {
    let homog = |(a, c): &(QVec, Rat)| {
        let mut h = a.clone();
        h.push(-c.clone());
        h
    };
    let heq: Vec<QVec> = eqs.iter().map(homog).collect();
    let mut hin: Vec<QVec> = ineqs.iter().map(homog).collect();
    let mut t = zero_vec(d + 1);
    t[d] = -Rat::one();
    hin.push(t);
    let (lin, rays) = cone_generators(d + 1, &heq, &hin);
    let mut vertices = Vec::new();
    let mut out_rays = Vec::new();
    for r in rays {
        let last = r[d].clone();
        if last.is_zero() {
            out_rays.push(r[..d].to_vec());
        } else {
            vertices.push(scale(&(Rat::one() / last), &r[..d]));
        }
    }
    if vertices.is_empty() {
        return None;
    }
    let lineality = lin.into_iter().map(|l| l[..d].to_vec()).collect();
    Some((vertices, out_rays, lineality))
}

/// Normal form of an affine hyperplane `a . x = b` up to nonzero scaling.
pub fn normalize_hyperplane(a: &[Rat], b: &Rat) -> (QVec, Rat) {
    let mut v = a.to_vec();
    v.push(b.clone());
    let p = primitive_up_to_sign(&v);
    let n = p.len() - 1;
    (p[..n].to_vec(), p[n].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{int_vec, rat};

    #[test]
    fn subsets_are_enumerated() {
        let mut all = Vec::new();
        for_each_subset(4, 2, |s| all.push(s.to_vec()));
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        let mut empty = 0;
        for_each_subset(3, 0, |_| empty += 1);
        assert_eq!(empty, 1);
    }

    #[test]
    fn orthant_rays() {
        let ineqs: Vec<QVec> = (0..3).map(|i| neg(&crate::arith::rat::unit_vec(3, i))).collect();
        let (lin, rays) = cone_generators(3, &[], &ineqs);
        assert!(lin.is_empty());
        assert_eq!(rays.len(), 3);
    }

    #[test]
    fn halfplane_has_lineality() {
        let (lin, rays) = cone_generators(2, &[], &[int_vec(&[0, -1])]);
        assert_eq!(lin.len(), 1);
        assert_eq!(rays, vec![int_vec(&[0, 1])]);
    }

    #[test]
    fn triangle_vertices() {
        let ineqs = vec![(int_vec(&[-1, 0]), rat(0)), (int_vec(&[0, -1]), rat(0)), (int_vec(&[1, 1]), rat(2))];
        let (v, r, l) = polyhedron_generators(2, &[], &ineqs).unwrap();
        assert_eq!(v.len(), 3);
        assert!(r.is_empty() && l.is_empty());
        assert!(v.contains(&int_vec(&[2, 0])));
    }

    #[test]
    fn empty_polyhedron() {
        let ineqs = vec![(int_vec(&[1]), rat(-1)), (int_vec(&[-1]), rat(0))];
        assert!(polyhedron_generators(1, &[], &ineqs).is_none());
    }

    #[test]
    fn line_has_a_vertex() {
        let (v, r, l) = polyhedron_generators(1, &[], &[]).unwrap();
        assert_eq!(v.len(), 1);
        assert!(r.is_empty());
        assert_eq!(l.len(), 1);
    }
}
