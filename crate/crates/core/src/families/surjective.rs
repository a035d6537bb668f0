//! Local surjectivity of morphisms: the induced map of stars is onto at every point.

use crate::arith::rat::{zero_vec, QVec, Rat};
use crate::error::Result;
use crate::intersection::covered_by;
use crate::par::par_map;
use crate::polyhedral::{Cell, PLMap, WeightedComplex};

#[derive(Clone, Debug)]
pub struct SurjectivityReport {
    pub checked: usize,
    /// Points of the source where the star map misses part of the target star.
    pub failures: Vec<QVec>,
}

impl SurjectivityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Whether `Star_X(p) -> Star_Y(f(p))` is onto.
pub fn is_locally_surjective_at(f: &PLMap, y: &WeightedComplex, p: &[Rat]) -> Result<bool> {
    let x = &f.source;
    let mut images: Vec<Cell> = Vec::new();
    let mut q = None;
    for i in x.cells_containing(p) {
        let piece = &f.pieces[i];
        let t = x.cells()[i].tangent_cone(p)?;
        images.push(t.image(&piece.matrix, &zero_vec(piece.target_dim())));
        q.get_or_insert_with(|| piece.apply(p));
    }
    let Some(q) = q else { return Ok(false) };
    let target: Vec<Cell> = y.cells_containing(&q).into_iter().map(|j| y.cells()[j].tangent_cone(&q)).collect::<Result<_>>()?;
    if target.is_empty() {
        return Ok(false);
    }
    Ok(target.iter().filter(|t| t.dim() == y.dim()).all(|t| covered_by(t, &images)))
}

/// Checks one relative interior point of every face of the source.
pub fn is_locally_surjective(f: &PLMap, y: &WeightedComplex) -> Result<SurjectivityReport> {
    let points: Vec<QVec> = f.source.face_lattice().levels.iter().flatten().map(|c| c.relint_point()).collect();
    let verdicts = par_map(&points, |p| is_locally_surjective_at(f, y, p));
    let mut failures = Vec::new();
    for (p, v) in points.iter().zip(verdicts) {
        if !v? {
            failures.push(p.clone());
        }
    }
    Ok(SurjectivityReport { checked: points.len(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::int_vec;
    use crate::polyhedral::ops::cross_product;
    use crate::polyhedral::AffineMap;

    fn line_l2() -> WeightedComplex {
        let cells = [int_vec(&[-1, 0]), int_vec(&[0, -1]), int_vec(&[1, 1])]
            .into_iter()
            .map(|r| (Cell::cone(2, vec![r], vec![]).unwrap(), 1))
            .collect();
        WeightedComplex::new(2, 1, vec![], cells).unwrap()
    }

    fn real_line() -> WeightedComplex {
        let l = vec![int_vec(&[1])];
        WeightedComplex::new(1, 1, l.clone(), vec![(Cell::cone(1, vec![], l).unwrap(), 1)]).unwrap()
    }

    #[test]
    fn projection_is_locally_surjective() {
        let t = cross_product(&line_l2(), &real_line());
        let f = PLMap::global(t, AffineMap::projection(3, &[2])).unwrap();
        assert!(is_locally_surjective(&f, &real_line()).unwrap().passed());
    }

    #[test]
    fn second_coordinate_of_a_line_is_not() {
        let f = PLMap::global(line_l2(), AffineMap::projection(2, &[1])).unwrap();
        let r = is_locally_surjective(&f, &real_line()).unwrap();
        assert!(!r.passed());
        assert!(r.failures.contains(&int_vec(&[-1, 0])));
    }
}
