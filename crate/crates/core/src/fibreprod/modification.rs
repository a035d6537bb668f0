//! `M_{n+2}` as a modification of `M_{n+1} x_{M_n} M_{n+1}`, and the deletion-contraction
//! description of Bergman fans it specializes.

use crate::arith::rat::{unit_vec, QVec, Rat};
use crate::error::{Error, Result};
use crate::intersection::{divisor, modification, Expr, RationalFunction};
use crate::matroid::{bergman_fan, elements, Matroid};
use crate::moduli::quotient::{quotient_fan, quotient_forgetful, quotient_forgetful_linear};
use crate::moduli::ModuliChart;
use crate::polyhedral::ops::{equal_mod_refinement, push_forward};
use crate::polyhedral::AffineMap;

use super::product::{diagonal, fibre_product};

#[derive(Clone, Debug)]
pub struct ModificationReport {
    pub n: usize,
    pub fibre_product_cells: usize,
    /// `phi . (M_{n+1} x_{M_n} M_{n+1}) = Delta`.
    pub divisor_is_diagonal: bool,
    /// The modification along `phi` is the image of `M_{n+2}`.
    pub modification_matches: bool,
}

impl ModificationReport {
    pub fn passed(&self) -> bool {
        self.divisor_is_diagonal && self.modification_matches
    }
}

/// Simple paths from `a` to `b` through the other vertices, skipping the direct edge.
fn detours(vertices: &[usize], a: usize, b: usize) -> Vec<Vec<usize>> {
    fn go(path: &mut Vec<usize>, rest: &[usize], b: usize, out: &mut Vec<Vec<usize>>) {
        if path.len() > 1 {
            let mut p = path.clone();
            p.push(b);
            out.push(p);
        }
        for (k, &v) in rest.iter().enumerate() {
            let mut r = rest.to_vec();
            r.remove(k);
            path.push(v);
            go(path, &r, b, out);
            path.pop();
        }
    }
    let inner: Vec<usize> = vertices.iter().copied().filter(|&v| v != a && v != b).collect();
    let mut out = Vec::new();
    go(&mut vec![a], &inner, b, &mut out);
    out
}

/// Quotient coordinate of a pair, or `None` for the normalized first pair.
fn quotient_index(chart: &ModuliChart, u: usize, v: usize) -> Option<usize> {
    let k = chart.pair_index(chart.position(u)?, chart.position(v)?);
    k.checked_sub(1)
}

/// Checks both identities for the markings `1..=n` plus `0` and `0'`.
pub fn verify_moduli_modification(n: usize) -> Result<ModificationReport> {
    if n < 3 {
        return Err(Error::Invalid("need at least 3 markings".into()));
    }
    let second = n + 1;
    let front: Vec<usize> = (1..n).collect();
    let with = |extra: &[usize]| -> Result<ModuliChart> {
        let mut ls = front.clone();
        ls.extend_from_slice(extra);
        ls.push(n);
        ModuliChart::new(ls)
    };
    let total = with(&[0, second])?;
    let a = with(&[0])?;
    let b = with(&[second])?;
    let base = with(&[])?;
    let fa = quotient_forgetful(&a, &base)?;
    let fb = quotient_forgetful(&b, &base)?;
    let fp = fibre_product(&fa, &fb, &quotient_fan(&base))?;
    let da = a.dim() - 1;
    let dim = da + b.dim() - 1;

    let coord = |u: usize, v: usize| -> Expr {
        let k = if u == second || v == second {
            let w = if u == second { v } else { u };
            quotient_index(&b, w, second).map(|k| k + da)
        } else {
            quotient_index(&a, u, v)
        };
        match k {
            Some(k) => Expr::coordinate(dim, k),
            None => Expr::constant(dim, Rat::from_integer(0.into())),
        }
    };
    let mut vertices = front.clone();
    vertices.extend([0, second]);
    let phi = Expr::Min(
        detours(&vertices, 0, second).iter().map(|p| Expr::Max(p.windows(2).map(|w| coord(w[0], w[1])).collect())).collect(),
    );
    let phi = RationalFunction::Global(phi);

    let cut = divisor(&fp.complex, &phi)?;
    let divisor_is_diagonal = equal_mod_refinement(&cut, &diagonal(&quotient_fan(&a))?);

    let mut rows: Vec<QVec> = quotient_forgetful_linear(&total, &a)?.matrix;
    rows.extend(quotient_forgetful_linear(&total, &b)?.matrix);
    let k = quotient_index(&total, 0, second).expect("the pair 00' is not normalized");
    rows.push(unit_vec(total.dim() - 1, k));
    let image = push_forward(&quotient_fan(&total), &AffineMap::linear(total.dim() - 1, rows)?)?;
    let modification_matches = equal_mod_refinement(&modification(&fp.complex, &phi)?, &image);
    Ok(ModificationReport { n, fibre_product_cells: fp.complex.num_cells(), divisor_is_diagonal, modification_matches })
}

#[derive(Clone, Debug)]
pub struct DeletionReport {
    /// The modification of `B(M \ e)` along `phi` is `B(M)`.
    pub modification_matches: bool,
    /// `phi . B(M \ e) = B(M / e)`.
    pub divisor_matches: bool,
}

/// `phi = min over circuits C containing e of max_{f in C - e} x_f`, on the coordinates of
/// `M \ e`.
pub fn deletion_function(m: &Matroid, e: usize) -> Result<Expr> {
    let d = m.ground_size() - 1;
    let idx = |f: usize| if f < e { f } else { f - 1 };
    let terms: Vec<Expr> = m
        .circuits()
        .into_iter()
        .filter(|c| c & (1 << e) != 0)
        .map(|c| Expr::Max(elements(c & !(1 << e)).map(|f| Expr::coordinate(d, idx(f))).collect()))
        .collect();
    if terms.is_empty() {
        return Err(Error::Invalid(format!("element {e} is a coloop")));
    }
    Ok(Expr::Min(terms))
}

pub fn verify_deletion_contraction(m: &Matroid, e: usize) -> Result<DeletionReport> {
    let n = m.ground_size();
    if e >= n || m.is_loop(e) {
        return Err(Error::Invalid(format!("element {e} must be a non-loop of the ground set")));
    }
    let phi = RationalFunction::Global(deletion_function(m, e)?);
    let del = bergman_fan(&m.delete(e)?);
    // Coordinates of the modification are those of M \ e followed by e.
    let rows: Vec<QVec> = (0..n)
        .map(|f| match f.cmp(&e) {
            std::cmp::Ordering::Less => unit_vec(n, f),
            std::cmp::Ordering::Equal => unit_vec(n, n - 1),
            std::cmp::Ordering::Greater => unit_vec(n, f - 1),
        })
        .collect();
    let moved = push_forward(&modification(&del, &phi)?, &AffineMap::linear(n, rows)?)?;
    Ok(DeletionReport {
        modification_matches: equal_mod_refinement(&moved, &bergman_fan(m)),
        divisor_matches: equal_mod_refinement(&divisor(&del, &phi)?, &bergman_fan(&m.contract(e)?)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detours_in_k4() {
        // Paths 0 -> 9 through a nonempty ordered subset of {1, 2}.
        assert_eq!(detours(&[1, 2, 0, 9], 0, 9).len(), 4);
    }

    #[test]
    fn uniform_line_from_a_point() {
        let m = Matroid::uniform(2, 3).unwrap();
        let r = verify_deletion_contraction(&m, 2).unwrap();
        assert!(r.modification_matches && r.divisor_matches);
    }

    #[test]
    fn deletion_contraction_examples() {
        for (m, e) in
            [(Matroid::uniform(3, 4).unwrap(), 0), (Matroid::complete_graph(4).unwrap(), 5), (Matroid::uniform(2, 4).unwrap(), 1)]
        {
            let r = verify_deletion_contraction(&m, e).unwrap();
            assert!(r.modification_matches, "{e}");
            assert!(r.divisor_matches, "{e}");
        }
    }

    #[test]
    fn coloop_rejected() {
        let m = Matroid::uniform(3, 3).unwrap();
        assert!(verify_deletion_contraction(&m, 0).is_err());
    }

    #[test]
    fn m5_from_m4_squared() {
        let r = verify_moduli_modification(3).unwrap();
        assert!(r.divisor_is_diagonal);
        assert!(r.modification_matches);
    }

    #[test]
    fn m6_from_m5_squared() {
        let r = verify_moduli_modification(4).unwrap();
        assert!(r.divisor_is_diagonal);
        assert!(r.modification_matches);
    }
}
