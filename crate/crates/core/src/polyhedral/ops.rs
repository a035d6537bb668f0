//! Constructions on weighted complexes: products, sums, stars, push-forwards, quotients and
//! comparison up to refinement.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use super::cell::{Cell, Hyperplane};
use super::complex::{cell_hyperplanes, slice_cell, WeightedComplex};
use super::map::{AffineMap, PLMap};
use crate::arith::lattice::{generated_basis, lattice_index, saturated_basis};
use crate::arith::linalg::{nullspace, rank};
use crate::arith::rat::{zero_vec, QVec, Rat};
use crate::error::{Error, Result};
use crate::par::par_map;

pub fn cross_product(x: &WeightedComplex, y: &WeightedComplex) -> WeightedComplex {
    let n = x.ambient_dim() + y.ambient_dim();
    let pad = |v: &QVec, left: bool| {
        let mut out = Vec::with_capacity(n);
        if left {
            out.extend(v.iter().cloned());
            out.extend(zero_vec(y.ambient_dim()));
        } else {
            out.extend(zero_vec(x.ambient_dim()));
            out.extend(v.iter().cloned());
        }
        out
    };
    let mut lin: Vec<QVec> = x.lineality().iter().map(|l| pad(l, true)).collect();
    lin.extend(y.lineality().iter().map(|l| pad(l, false)));
    let pairs: Vec<(usize, usize)> = (0..x.num_cells()).flat_map(|i| (0..y.num_cells()).map(move |j| (i, j))).collect();
    let cells = par_map(&pairs, |&(i, j)| (x.cells()[i].product(&y.cells()[j]), x.weights()[i] * y.weights()[j]));
    WeightedComplex::new(n, x.dim() + y.dim(), lin, cells).expect("product cells fit")
}

/// Intersection of two linear subspaces given by bases.
pub fn subspace_intersection(a: &[QVec], b: &[QVec], n: usize) -> Vec<QVec> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut perp = nullspace(a, n);
    perp.extend(nullspace(b, n));
    saturated_basis(&nullspace(&perp, n), n)
}

/// Sum of cycles: the union with weights added where cells overlap.
pub fn sum(x: &WeightedComplex, y: &WeightedComplex) -> Result<WeightedComplex> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::Dimension("summands live in different spaces".into()));
    }
    if x.is_empty() {
        return Ok(y.clone());
    }
    if y.is_empty() {
        return Ok(x.clone());
    }
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!("cannot add cycles of dimension {} and {}", x.dim(), y.dim())));
    }
    let lin = subspace_intersection(x.lineality(), y.lineality(), x.ambient_dim());
    let mut cells: Vec<(Cell, i64)> = x.weighted_cells().map(|(c, w)| (c.clone(), w)).collect();
    cells.extend(y.weighted_cells().map(|(c, w)| (c.clone(), w)));
    WeightedComplex::from_overlapping(x.ambient_dim(), x.dim(), lin, cells)
}

pub fn difference(x: &WeightedComplex, y: &WeightedComplex) -> Result<WeightedComplex> {
    sum(x, &y.negated())
}

/// The fan of tangent cones at `p` of the cells containing `p`.
pub fn star(x: &WeightedComplex, p: &[Rat]) -> Result<WeightedComplex> {
    let cells: Vec<(Cell, i64)> = x
        .weighted_cells()
        .filter(|(c, _)| c.contains(p))
        .map(|(c, w)| c.tangent_cone(p).map(|t| (t, w)))
        .collect::<Result<_>>()?;
    if cells.is_empty() {
        return Err(Error::NotInSupport("star at a point outside the support".into()));
    }
    WeightedComplex::new(x.ambient_dim(), x.dim(), x.lineality().to_vec(), cells)
}

/// Refines `x` by the facet and hull hyperplanes of the cells of `along`.
pub fn refine(x: &WeightedComplex, along: &WeightedComplex) -> WeightedComplex {
    let hs: BTreeSet<Hyperplane> = along.cells().iter().flat_map(cell_hyperplanes).collect();
    let hs: Vec<Hyperplane> = hs.into_iter().collect();
    x.slice(&hs).make_face_to_face()
}

/// Keeps only the listed maximal cells.
pub fn restrict(x: &WeightedComplex, keep: &[usize]) -> WeightedComplex {
    let cells = keep.iter().map(|&i| (x.cells()[i].clone(), x.weights()[i])).collect();
    WeightedComplex::new(x.ambient_dim(), x.dim(), x.lineality().to_vec(), cells).expect("subset of cells")
}

fn lattice_multiplicity(cell: &Cell, img: &Cell, map: &AffineMap) -> Result<i64> {
    let gens: Vec<QVec> = cell.lattice().iter().map(|v| map.apply_linear(v)).collect();
    if !gens.iter().all(|g| crate::arith::rat::is_integral(g)) {
        return Err(Error::NonIntegralMap(format!("map {} is not integral on a cell lattice", map.describe())));
    }
    let sub = generated_basis(&gens, map.target_dim());
    let idx =
        lattice_index(&sub, img.lattice()).ok_or_else(|| Error::NonIntegralMap("image lattice has the wrong rank".into()))?;
    idx.to_i64().ok_or_else(|| Error::Invalid("lattice index overflow".into()))
}

/// Push-forward of a cycle along a map that is affine on each cell.
///
/// Cells on which the map drops dimension below `dim` contribute nothing; the others carry
/// the weight times the lattice index of the image.
pub fn push_forward_pl(f: &PLMap, dim: usize) -> Result<WeightedComplex> {
    let x = &f.source;
    let m = f.target_dim;
    let lin_img: Vec<QVec> = match f.pieces.first() {
        Some(p) => x.lineality().iter().map(|l| p.apply_linear(l)).collect(),
        None => Vec::new(),
    };
    let lin_img = saturated_basis(&lin_img, m);
    let results: Vec<Result<Option<(Cell, i64)>>> = par_map(&(0..x.num_cells()).collect::<Vec<_>>(), |&i| {
        let map = &f.pieces[i];
        let cell = &x.cells()[i];
        let img = cell.image(&map.matrix, &map.translation);
        if img.dim() < dim {
            return Ok(None);
        }
        let k = lattice_multiplicity(cell, &img, map)?;
        Ok(Some((img, x.weights()[i] * k)))
    });
    let mut cells = Vec::new();
    for r in results {
        if let Some(c) = r? {
            cells.push(c);
        }
    }
    let injective = f.is_global().is_some_and(|map| map.rank_on(&support_directions(x)) == support_directions(x).len());
    if injective {
        WeightedComplex::new(m, dim, lin_img, cells)
    } else {
        WeightedComplex::from_overlapping(m, dim, lin_img, cells)
    }
}

/// Basis of the linear space spanned by differences of points of the support.
fn support_directions(x: &WeightedComplex) -> Vec<QVec> {
    let Some(first) = x.cells().first() else { return Vec::new() };
    let base = &first.vertices()[0];
    let mut dirs: Vec<QVec> = Vec::new();
    for c in x.cells() {
        dirs.extend(c.direction_basis().iter().cloned());
        dirs.extend(c.vertices().iter().map(|v| crate::arith::rat::sub(v, base)));
    }
    crate::arith::linalg::independent_subset(&dirs, x.ambient_dim())
}

pub fn push_forward(x: &WeightedComplex, map: &AffineMap) -> Result<WeightedComplex> {
    let f = PLMap::global(x.clone(), map.clone())?;
    push_forward_pl(&f, x.dim())
}

/// Surjective integer map `Z^n -> Z^(n-k)` with kernel `L ∩ Z^n`.
pub fn quotient_map(l: &[QVec], n: usize) -> AffineMap {
    let perp = nullspace(l, n);
    let rows = saturated_basis(&perp, n);
    AffineMap::linear(n, rows).expect("rows have length n")
}

/// Image of `x` in `R^n / L` for a subspace `L` contained in the lineality of `x`.
pub fn quotient_by_subspace(x: &WeightedComplex, l: &[QVec]) -> Result<WeightedComplex> {
    let n = x.ambient_dim();
    for v in l {
        if !x.cells().iter().all(|c| c.contains_direction(v)) {
            return Err(Error::Invalid("quotient by a subspace not contained in every cell".into()));
        }
    }
    let k = rank(l, n);
    let q = quotient_map(l, n);
    let f = PLMap::global(x.clone(), q)?;
    let img_dim = x.dim() - k;
    let results: Vec<(Cell, i64)> = x
        .weighted_cells()
        .map(|(c, w)| {
            let img = c.image(&f.pieces[0].matrix, &f.pieces[0].translation);
            let mult = lattice_multiplicity(c, &img, &f.pieces[0])?;
            Ok((img, w * mult))
        })
        .collect::<Result<_>>()?;
    let lin: Vec<QVec> = x.lineality().iter().map(|v| f.pieces[0].apply_linear(v)).collect();
    WeightedComplex::new(n - k, img_dim, lin, results)
}

/// Whether two cycles agree after a common refinement: at each point of either support the
/// weights of the cells around it must match.
pub fn equal_mod_refinement(x: &WeightedComplex, y: &WeightedComplex) -> bool {
    if x.ambient_dim() != y.ambient_dim() {
        return false;
    }
    if x.is_empty() || y.is_empty() {
        return x.is_empty() && y.is_empty();
    }
    if x.dim() != y.dim() {
        return false;
    }
    let all: Vec<(&Cell, i64, bool)> =
        x.weighted_cells().map(|(c, w)| (c, w, true)).chain(y.weighted_cells().map(|(c, w)| (c, w, false))).collect();
    let ok = par_map(&all, |&(sigma, _, _)| {
        let overlapping: Vec<&(&Cell, i64, bool)> = all.iter().filter(|(c, _, _)| overlaps_fully(sigma, c)).collect();
        let mut hs: BTreeSet<Hyperplane> = BTreeSet::new();
        for (c, _, _) in &overlapping {
            for f in c.facet_halfspaces() {
                if let Some(h) = Hyperplane::new(&f.normal, &f.rhs) {
                    if sigma.is_crossed_by(&h) {
                        hs.insert(h);
                    }
                }
            }
        }
        let hs: Vec<Hyperplane> = hs.into_iter().collect();
        slice_cell(sigma, &hs).iter().all(|chamber| {
            let p = chamber.relint_point();
            let mut wx = 0i64;
            let mut wy = 0i64;
            for (c, w, from_x) in &overlapping {
                if c.contains(&p) {
                    if *from_x {
                        wx += w;
                    } else {
                        wy += w;
                    }
                }
            }
            wx == wy
        })
    });
    ok.into_iter().all(|b| b)
}

/// Same affine hull and full-dimensional intersection.
fn overlaps_fully(a: &Cell, b: &Cell) -> bool {
    if a.dim() != b.dim() || !b.in_hull(&a.vertices()[0]) {
        return false;
    }
    if !a.direction_basis().iter().all(|d| b.direction_in_span(d)) {
        return false;
    }
    match a.intersect_cell(b) {
        Some(i) => i.dim() == a.dim(),
        None => false,
    }
}

pub fn is_effective(x: &WeightedComplex) -> bool {
    x.weights().iter().all(|&w| w > 0)
}
