//! Fibre products `X x_Y X'` of morphisms into a smooth target.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::lattice::{generated_basis, lattice_index, saturated_basis};
use crate::arith::linalg::{mat_vec, nullspace, rank};
use crate::arith::rat::{fmt_vec, lcm_denominators, neg, primitive, QVec, Rat};
use crate::error::{Error, Result};
use crate::families::is_locally_surjective;
use crate::intersection::{point_cycle, point_fibre, SmoothChart};
use crate::par::{par_map, par_range};
use crate::polyhedral::ops::{cross_product, equal_mod_refinement, push_forward, quotient_map, subspace_intersection};
use crate::polyhedral::{AffineMap, Cell, Hyperplane, PLMap, WeightedComplex};

#[derive(Clone, Debug)]
pub struct FibreProduct {
    pub complex: WeightedComplex,
    /// Projection to the source of the first map.
    pub pi_x: PLMap,
    /// Projection to the source of the second map.
    pub pi_x2: PLMap,
    /// For each cell, the maximal cells of `X` and `X'` it came from.
    pub pairs: Vec<(usize, usize)>,
}

/// One candidate cell with its weight, when the images span the local target.
struct Piece {
    cell: Cell,
    pair: (usize, usize),
    weight: Option<i64>,
}

/// `(sigma x sigma') ∩ {f(x) = f'(x')}` when it has the expected dimension.
fn piece(f: &PLMap, f2: &PLMap, i: usize, j: usize, expected: usize, ydim: usize) -> Result<Option<Piece>> {
    let (s, s2) = (&f.source.cells()[i], &f2.source.cells()[j]);
    let (a, a2) = (&f.pieces[i], &f2.pieces[j]);
    let prod = s.product(s2);
    let mut eqs = Vec::new();
    for k in 0..a.target_dim() {
        let mut normal = a.matrix[k].clone();
        normal.extend(neg(&a2.matrix[k]));
        let rhs = &a2.translation[k] - &a.translation[k];
        match Hyperplane::new(&normal, &rhs) {
            Some(h) => eqs.push(h),
            None if rhs.is_zero() => {}
            None => return Ok(None),
        }
    }
    let Some(cell) = prod.intersect(&eqs, &[]) else { return Ok(None) };
    if cell.dim() < expected {
        return Ok(None);
    }
    if cell.dim() > expected {
        return Err(Error::Invalid(format!("cells {i} and {j} meet over a {}-dimensional set, expected {expected}", cell.dim())));
    }
    let m = a.target_dim();
    let mut imgs: Vec<QVec> = s.lattice().iter().map(|v| mat_vec(&a.matrix, v)).collect();
    imgs.extend(s2.lattice().iter().map(|v| mat_vec(&a2.matrix, v)));
    let weight = if rank(&imgs, m) == ydim {
        let idx = lattice_index(&generated_basis(&imgs, m), &saturated_basis(&imgs, m))
            .and_then(|k| k.to_i64())
            .expect("generated lattice has full rank in its span");
        Some(f.source.weights()[i] * f2.source.weights()[j] * idx)
    } else {
        None
    };
    Ok(Some(Piece { cell, pair: (i, j), weight }))
}

/// Positive integer weights making the cells balanced, if they are unique up to scaling.
pub fn solve_weights(ambient: usize, dim: usize, lineality: Vec<QVec>, cells: Vec<Cell>) -> Result<Vec<i64>> {
    let x = WeightedComplex::new(ambient, dim, lineality, cells.iter().map(|c| (c.clone(), 1)).collect())?;
    let co = x.codim_one();
    let mut rows: Vec<QVec> = Vec::new();
    for (t, tau) in co.faces.iter().enumerate() {
        let q = quotient_map(tau.direction_basis(), ambient);
        let us: Vec<(usize, QVec)> =
            co.adjacent[t].iter().map(|&i| (i, q.apply_linear(&crate::polyhedral::normal_vector(&x.cells()[i], tau)))).collect();
        for k in 0..q.target_dim() {
            let mut row = vec![Rat::zero(); x.num_cells()];
            for (i, u) in &us {
                row[*i] += &u[k];
            }
            rows.push(row);
        }
    }
    let ns = nullspace(&rows, x.num_cells());
    match ns.len() {
        0 => return Err(Error::WeightAssignment("only the zero solution balances".into())),
        1 => {}
        k => return Err(Error::Ambiguous(format!("{k}-dimensional space of balanced weightings"))),
    }
    let mut v = primitive(&ns[0]);
    if v.iter().any(Signed::is_negative) {
        v = neg(&v);
    }
    if !v.iter().all(Signed::is_positive) {
        return Err(Error::WeightAssignment(format!("the balanced weighting {} is not positive", fmt_vec(&v))));
    }
    debug_assert!(lcm_denominators(&v).is_one());
    // Weights of x are indexed by its own (sorted) cell order.
    let by_key: BTreeMap<_, i64> =
        x.cells().iter().zip(&v).map(|(c, w)| (c.key(), w.to_integer().to_i64().expect("weight fits"))).collect();
    Ok(cells.iter().map(|c| by_key[&c.key()]).collect())
}

fn common_lineality(cells: &[Cell], n: usize) -> Vec<QVec> {
    let mut lin: Option<Vec<QVec>> = None;
    for c in cells {
        lin = Some(match lin {
            None => saturated_basis(c.lineality(), n),
            Some(l) => subspace_intersection(&l, c.lineality(), n),
        });
    }
    lin.unwrap_or_default()
}

/// `X x_Y X'` for `f: X -> Y` and `f2: X' -> Y`, with `f2` locally surjective and `Y` smooth.
pub fn fibre_product(f: &PLMap, f2: &PLMap, y: &WeightedComplex) -> Result<FibreProduct> {
    if f.target_dim != y.ambient_dim() || f2.target_dim != y.ambient_dim() {
        return Err(Error::Dimension("both maps must land in the ambient space of Y".into()));
    }
    let report = is_locally_surjective(f2, y)?;
    if let Some(p) = report.failures.first() {
        return Err(Error::NotLocallySurjective(format!("the second map fails at {}", fmt_vec(p))));
    }
    let (x, x2) = (&f.source, &f2.source);
    let expected = (x.dim() + x2.dim())
        .checked_sub(y.dim())
        .ok_or_else(|| Error::Dimension("target has larger dimension than the product".into()))?;
    let pairs: Vec<(usize, usize)> = (0..x.num_cells()).flat_map(|i| (0..x2.num_cells()).map(move |j| (i, j))).collect();
    let found = par_map(&pairs, |&(i, j)| piece(f, f2, i, j, expected, y.dim()));
    let mut seen: BTreeMap<_, Piece> = BTreeMap::new();
    for p in found {
        if let Some(p) = p? {
            seen.entry(p.cell.key()).or_insert(p);
        }
    }
    let pieces: Vec<Piece> = seen.into_values().collect();
    let n = x.ambient_dim() + x2.ambient_dim();
    let cells: Vec<Cell> = pieces.iter().map(|p| p.cell.clone()).collect();
    let lin = common_lineality(&cells, n);
    let known: Option<Vec<i64>> = pieces.iter().map(|p| p.weight).collect();
    let mut complex = None;
    if let Some(w) = known {
        let c = WeightedComplex::new(n, expected, lin.clone(), cells.iter().cloned().zip(w).collect())?;
        if c.is_balanced() {
            complex = Some(c);
        }
    }
    let complex = match complex {
        Some(c) => c,
        None => {
            let w = solve_weights(n, expected, lin.clone(), cells.clone())?;
            WeightedComplex::new(n, expected, lin, cells.into_iter().zip(w).collect())?
        }
    };
    let by_key: BTreeMap<_, (usize, usize)> = pieces.iter().map(|p| (p.cell.key(), p.pair)).collect();
    let pairs = complex.cells().iter().map(|c| by_key[&c.key()]).collect();
    let first: Vec<usize> = (0..x.ambient_dim()).collect();
    let second: Vec<usize> = (x.ambient_dim()..n).collect();
    let pi_x = PLMap::global(complex.clone(), AffineMap::projection(n, &first))?;
    let pi_x2 = PLMap::global(complex.clone(), AffineMap::projection(n, &second))?;
    Ok(FibreProduct { complex, pi_x, pi_x2, pairs })
}

/// `Delta_Y`, the image of `y -> (y, y)`.
pub fn diagonal(y: &WeightedComplex) -> Result<WeightedComplex> {
    let m = y.ambient_dim();
    let rows: Vec<QVec> = (0..2 * m).map(|k| crate::arith::rat::unit_vec(m, k % m)).collect();
    push_forward(y, &AffineMap::linear(m, rows)?)
}

/// Whether `pi_X^*(p) = {p} x f2^*(f(p))` at a point `p` of `X`. Both charts must cut points
/// out exactly, i.e. `X` and `Y` have no lineality.
pub fn check_fibre_law(
    fp: &FibreProduct,
    f: &PLMap,
    f2: &PLMap,
    y: &WeightedComplex,
    x_chart: &SmoothChart,
    y_chart: &SmoothChart,
    p: &[Rat],
) -> Result<bool> {
    let lhs = point_fibre(&fp.pi_x, &f.source, x_chart, p)?;
    let q = f.eval(p)?;
    let fib = point_fibre(f2, y, y_chart, &q)?;
    let rhs = cross_product(&point_cycle(p.len(), p, &[]), &fib);
    Ok(equal_mod_refinement(&lhs, &rhs))
}

/// Relative interior points of every face of `X`, for sweeping the fibre law.
pub fn sample_points(x: &WeightedComplex) -> Vec<QVec> {
    let faces: Vec<&Cell> = x.face_lattice().levels.iter().flatten().collect();
    par_range(faces.len(), |k| faces[k].relint_point())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::int_vec;
    use crate::moduli::quotient::{quotient_fan, quotient_forgetful, quotient_smooth_chart};
    use crate::moduli::ModuliChart;

    fn line_l2() -> WeightedComplex {
        let cells = [int_vec(&[-1, 0]), int_vec(&[0, -1]), int_vec(&[1, 1])]
            .into_iter()
            .map(|r| (Cell::cone(2, vec![r], vec![]).unwrap(), 1))
            .collect();
        WeightedComplex::new(2, 1, vec![], cells).unwrap()
    }

    #[test]
    fn over_a_point_is_the_product() {
        let pt = point_cycle(0, &[], &[]);
        let f = PLMap::global(line_l2(), AffineMap::constant(2, vec![])).unwrap();
        let fp = fibre_product(&f, &f, &pt).unwrap();
        assert!(equal_mod_refinement(&fp.complex, &cross_product(&line_l2(), &line_l2())));
    }

    #[test]
    fn over_itself_is_the_diagonal() {
        let f = PLMap::global(line_l2(), AffineMap::identity(2)).unwrap();
        let fp = fibre_product(&f, &f, &line_l2()).unwrap();
        assert!(equal_mod_refinement(&fp.complex, &diagonal(&line_l2()).unwrap()));
    }

    #[test]
    fn first_coordinate_is_rejected_as_second_map() {
        let y = {
            let l = vec![int_vec(&[1])];
            WeightedComplex::new(1, 1, l.clone(), vec![(Cell::cone(1, vec![], l).unwrap(), 1)]).unwrap()
        };
        let f = PLMap::global(line_l2(), AffineMap::projection(2, &[1])).unwrap();
        assert!(matches!(fibre_product(&f, &f, &y), Err(Error::NotLocallySurjective(_))));
    }

    #[test]
    fn forgetful_maps_over_m4() {
        let s = ModuliChart::with_zero(4).unwrap();
        let t = ModuliChart::standard(4).unwrap();
        let ft = quotient_forgetful(&s, &t).unwrap();
        let base = quotient_fan(&t);
        let fp = fibre_product(&ft, &ft, &base).unwrap();
        assert_eq!(fp.complex.dim(), 3);
        assert!(fp.complex.weights().iter().all(|&w| w == 1));
        assert!(fp.complex.is_balanced());
        let sc = quotient_smooth_chart(&s);
        let tc = quotient_smooth_chart(&t);
        for p in sample_points(&ft.source) {
            assert!(check_fibre_law(&fp, &ft, &ft, &base, &sc, &tc, &p).unwrap(), "{p:?}");
        }
    }
}
