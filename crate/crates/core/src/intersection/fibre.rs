//! Fibres of points under morphisms into smooth targets.
//!
//! A smooth target is described as a product of Bergman fans taken modulo lineality. Each
//! factor of rank `r` contributes `r - 1` copies of the shifted maximum
//! `max_e (x_e - b_e)`, whose product cuts out the point `b` on the factor.

use num_traits::Zero;

use super::divisor::{divisor_sequence, RationalFunction};
use super::expr::Expr;
use crate::arith::linalg::in_span;
use crate::arith::rat::{fmt_vec, QVec, Rat};
use crate::error::{Error, Result};
use crate::polyhedral::complex::cell_hyperplanes;
use crate::polyhedral::complex::slice_cell;
use crate::polyhedral::map::PLMap;
use crate::polyhedral::ops::{equal_mod_refinement, quotient_map, restrict};
use crate::polyhedral::{Cell, Hyperplane, WeightedComplex};

/// One Bergman-fan factor: the coordinates it occupies, whether the normalized coordinate
/// (fixed to zero) was dropped from the chart, and the matroid rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothFactor {
    pub coords: Vec<usize>,
    pub extra_zero: bool,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothChart {
    pub ambient: usize,
    pub factors: Vec<SmoothFactor>,
}

impl SmoothChart {
    /// `R^k` as `L^k_1`-style chart of rank `k + 1` with the normalized coordinate dropped.
    pub fn affine_space(k: usize) -> SmoothChart {
        SmoothChart { ambient: k, factors: vec![SmoothFactor { coords: (0..k).collect(), extra_zero: true, rank: k + 1 }] }
    }

    /// A single Bergman fan with its lineality kept.
    pub fn bergman(m: usize, rank: usize) -> SmoothChart {
        SmoothChart { ambient: m, factors: vec![SmoothFactor { coords: (0..m).collect(), extra_zero: false, rank }] }
    }

    /// A Bergman fan of a rank-`rank` matroid on `m + 1` elements, shown in the chart where the
    /// first coordinate is normalized to zero.
    pub fn bergman_mod_lineality(m: usize, rank: usize) -> SmoothChart {
        SmoothChart { ambient: m, factors: vec![SmoothFactor { coords: (0..m).collect(), extra_zero: true, rank }] }
    }

    pub fn product(&self, other: &SmoothChart) -> SmoothChart {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().map(|f| SmoothFactor {
            coords: f.coords.iter().map(|c| c + self.ambient).collect(),
            extra_zero: f.extra_zero,
            rank: f.rank,
        }));
        SmoothChart { ambient: self.ambient + other.ambient, factors }
    }

    pub fn codim_of_point(&self) -> usize {
        self.factors.iter().map(|f| f.rank.saturating_sub(1)).sum()
    }

    /// Cutting functions for `b`, outermost first.
    pub fn cutting_functions(&self, b: &[Rat]) -> Vec<Expr> {
        let mut out = Vec::new();
        for f in &self.factors {
            let shift: QVec = f.coords.iter().map(|&c| b[c].clone()).collect();
            let e = Expr::shifted_max(self.ambient, &f.coords, &shift, f.extra_zero);
            for _ in 1..f.rank {
                out.push(e.clone());
            }
        }
        out
    }
}

/// The point `b` plus a linear space, as a weight-one cycle.
pub fn point_cycle(n: usize, b: &[Rat], lineality: &[QVec]) -> WeightedComplex {
    let lin = lineality.to_vec();
    let c = Cell::new(n, vec![b.to_vec()], Vec::new(), lin.clone()).expect("point cell");
    WeightedComplex::new(n, lin.len(), lin, vec![(c, 1)]).expect("point cycle")
}

/// Checks that the cutting functions reduce `y` to `{b} + L` with weight one, for a linear
/// space `L` inside the lineality of `y`. Returns `L`.
pub fn verify_cutting(y: &WeightedComplex, cutting: &[Expr], b: &[Rat]) -> Result<Vec<QVec>> {
    let fs: Vec<RationalFunction> = cutting.iter().cloned().map(RationalFunction::Global).collect();
    let cut = divisor_sequence(y, &fs)?;
    let fail = || Error::Invalid(format!("cutting functions do not cut out the point {}", fmt_vec(b)));
    let lin = match cut.cells().first() {
        Some(c) if c.lineality_dim() == cut.dim() => c.lineality().to_vec(),
        _ => return Err(fail()),
    };
    if !lin.iter().all(|l| in_span(y.lineality(), l, y.ambient_dim())) {
        return Err(fail());
    }
    if equal_mod_refinement(&cut, &point_cycle(y.ambient_dim(), b, &lin)) {
        Ok(lin)
    } else {
        Err(fail())
    }
}

/// `f^*(b)`: the pulled-back cutting functions applied to the source of `f`.
pub fn point_fibre(f: &PLMap, target: &WeightedComplex, chart: &SmoothChart, b: &[Rat]) -> Result<WeightedComplex> {
    if chart.ambient != target.ambient_dim() || b.len() != target.ambient_dim() {
        return Err(Error::Dimension("chart, target and point disagree on the ambient dimension".into()));
    }
    let cutting = chart.cutting_functions(b);
    point_fibre_with(f, target, &cutting, b)
}

pub fn point_fibre_with(f: &PLMap, target: &WeightedComplex, cutting: &[Expr], b: &[Rat]) -> Result<WeightedComplex> {
    if !target.contains_point(b) {
        return Err(Error::NotInSupport(format!("{} is not in the target", fmt_vec(b))));
    }
    let lin = verify_cutting(target, cutting, b)?;
    let x = &f.source;
    let q = quotient_map(&lin, f.target_dim);
    let qb = q.apply(b);
    // Only cells whose image meets b + L can carry the fibre; divisors are local.
    let keep: Vec<usize> = (0..x.num_cells())
        .filter(|&i| {
            let g = q.compose(&f.pieces[i]);
            let img = x.cells()[i].image(&g.matrix, &g.translation);
            img.contains(&qb)
        })
        .collect();
    let fibre_dim = x.dim().checked_sub(cutting.len()).ok_or_else(|| Error::Dimension("too many cutting functions".into()))?;
    if keep.is_empty() {
        return Ok(WeightedComplex::empty(x.ambient_dim(), fibre_dim, x.lineality().to_vec()));
    }
    let local = restrict(x, &keep);
    let local_map = PLMap::new(local.clone(), f.target_dim, keep.iter().map(|&i| f.pieces[i].clone()).collect())?;
    let pulled: Vec<RationalFunction> =
        cutting.iter().map(|e| RationalFunction::Global(e.clone()).pullback(&local_map)).collect::<Result<_>>()?;
    let raw = divisor_sequence(&local, &pulled)?;
    // Discard cells created at the artificial boundary of the restricted complex.
    let inside: Vec<usize> = (0..raw.num_cells())
        .filter(|&i| {
            let c = &raw.cells()[i];
            let p = c.relint_point();
            local_map.eval(&p).map(|y| q.apply(&y) == qb).unwrap_or(false)
        })
        .collect();
    let fibre = restrict(&raw, &inside);
    if let Some(w) = fibre.weights().iter().find(|&&w| w <= 0) {
        return Err(Error::Invalid(format!("fibre has a non-positive weight {w}; the map is not locally surjective")));
    }
    check_support(&local_map, &q.matrix, &qb, &fibre)?;
    Ok(fibre)
}

/// Every top-dimensional piece of the set-theoretic preimage must be covered by the fibre.
fn check_support(f: &PLMap, q: &[QVec], qb: &[Rat], fibre: &WeightedComplex) -> Result<()> {
    let d = fibre.dim();
    for (cell, piece) in f.source.cells().iter().zip(&f.pieces) {
        let eqs: Vec<Hyperplane> = q
            .iter()
            .zip(qb)
            .filter_map(|(row, val)| {
                // row . (M x + t) = val
                let n = piece.source_dim();
                let normal: QVec =
                    (0..n).map(|j| row.iter().zip(&piece.matrix).fold(Rat::zero(), |acc, (a, r)| acc + a * &r[j])).collect();
                let rhs = val - crate::arith::rat::dot(row, &piece.translation);
                Hyperplane::new(&normal, &rhs)
            })
            .collect();
        let Some(pre) = cell.intersect(&eqs, &[]) else { continue };
        if pre.dim() < d {
            if !fibre.contains_point(&pre.relint_point()) {
                return Err(Error::Invalid("fibre misses part of the preimage".into()));
            }
            continue;
        }
        if !covered_by(&pre, fibre.cells()) {
            return Err(Error::Invalid("fibre misses part of the preimage".into()));
        }
    }
    Ok(())
}

/// Whether the union of `cells` contains the cell.
pub fn covered_by(cell: &Cell, cells: &[Cell]) -> bool {
    let near: Vec<&Cell> = cells.iter().filter(|c| c.intersect_cell(cell).is_some()).collect();
    let mut hs = Vec::new();
    for c in &near {
        for h in cell_hyperplanes(c) {
            if cell.is_crossed_by(&h) && !hs.contains(&h) {
                hs.push(h);
            }
        }
    }
    slice_cell(cell, &hs).iter().all(|ch| {
        let p = ch.relint_point();
        near.iter().any(|c| c.contains(&p))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{int_vec, rat};
    use crate::polyhedral::map::AffineMap;
    use crate::polyhedral::ops::cross_product;

    fn line_l(n: usize) -> WeightedComplex {
        let mut rays: Vec<QVec> = (0..n).map(|i| crate::arith::rat::neg(&crate::arith::rat::unit_vec(n, i))).collect();
        rays.push(vec![rat(1); n]);
        let cells = rays.into_iter().map(|r| (Cell::cone(n, vec![r], vec![]).unwrap(), 1)).collect();
        WeightedComplex::new(n, 1, vec![], cells).unwrap()
    }

    fn real_line() -> WeightedComplex {
        let l = vec![int_vec(&[1])];
        WeightedComplex::new(1, 1, l.clone(), vec![(Cell::cone(1, vec![], l).unwrap(), 1)]).unwrap()
    }

    #[test]
    fn identity_fibre_is_the_point() {
        let y = line_l(2);
        let chart = SmoothChart::bergman_mod_lineality(2, 2);
        let f = PLMap::global(y.clone(), AffineMap::identity(2)).unwrap();
        for b in [int_vec(&[0, 0]), int_vec(&[-3, 0]), int_vec(&[2, 2])] {
            let fib = point_fibre(&f, &y, &chart, &b).unwrap();
            assert!(equal_mod_refinement(&fib, &point_cycle(2, &b, &[])));
        }
    }

    #[test]
    fn projection_fibre_is_a_copy() {
        let t = cross_product(&line_l(3), &real_line());
        let f = PLMap::global(t, AffineMap::projection(4, &[3])).unwrap();
        let fib = point_fibre(&f, &real_line(), &SmoothChart::affine_space(1), &int_vec(&[0])).unwrap();
        assert_eq!(fib.num_cells(), 4);
        assert!(fib.weights().iter().all(|&w| w == 1));
        assert!(fib.cells().iter().all(|c| c.vertices()[0][3] == rat(0)));
    }

    #[test]
    fn bad_cutting_is_rejected() {
        let y = line_l(2);
        let cutting = vec![Expr::shifted_max(2, &[0, 1], &int_vec(&[2, 2]), true)];
        assert!(verify_cutting(&y, &cutting, &int_vec(&[0, 0])).is_err());
    }
}
