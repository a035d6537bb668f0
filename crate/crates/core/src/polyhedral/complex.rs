//! Pure-dimensional weighted polyhedral complexes.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use num_traits::Zero;

use super::cell::{Cell, CellKey, Hyperplane};
use super::normal::normal_vector;
use crate::arith::lattice::saturated_basis;
use crate::arith::linalg::nullspace;
use crate::arith::rat::{axpy, dot, zero_vec, QVec, Rat};
use crate::error::{Error, Result};
use crate::par::par_map;

/// Codimension-one faces with the maximal cells containing them.
#[derive(Clone, Debug)]
pub struct CodimOne {
    pub faces: Vec<Cell>,
    /// `adjacent[t]` lists indices of maximal cells having face `t`.
    pub adjacent: Vec<Vec<usize>>,
}

/// All faces grouped by dimension.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    /// Dimension of the smallest faces (the lineality dimension).
    pub min_dim: usize,
    /// `levels[k]` holds the faces of dimension `min_dim + k`.
    pub levels: Vec<Vec<Cell>>,
    /// `facets[k][i]` indexes the facets (in `levels[k - 1]`) of face `i` of `levels[k]`.
    pub facets: Vec<Vec<Vec<usize>>>,
}

impl FaceLattice {
    pub fn faces_of_dim(&self, d: usize) -> &[Cell] {
        if d < self.min_dim || d - self.min_dim >= self.levels.len() {
            return &[];
        }
        &self.levels[d - self.min_dim]
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

#[derive(Clone, Debug)]
pub struct WeightedComplex {
    ambient: usize,
    dim: usize,
    lineality: Vec<QVec>,
    cells: Vec<Cell>,
    weights: Vec<i64>,
    codim_one: OnceLock<CodimOne>,
    lattice: OnceLock<FaceLattice>,
}

impl WeightedComplex {
    pub fn empty(ambient: usize, dim: usize, lineality: Vec<QVec>) -> Self {
        let lineality = saturated_basis(&lineality, ambient);
        WeightedComplex {
            ambient,
            dim,
            lineality,
            cells: Vec::new(),
            weights: Vec::new(),
            codim_one: OnceLock::new(),
            lattice: OnceLock::new(),
        }
    }

    /// Assembles a complex from maximal cells that are already known to meet face to face.
    /// Cells with identical support are merged by adding weights and zero weights are dropped.
    pub fn new(ambient: usize, dim: usize, lineality: Vec<QVec>, cells: Vec<(Cell, i64)>) -> Result<Self> {
        let mut out = WeightedComplex::empty(ambient, dim, lineality);
        let mut index: HashMap<CellKey, usize> = HashMap::new();
        let mut merged: Vec<(Cell, i64)> = Vec::new();
        for (c, w) in cells {
            if c.ambient_dim() != ambient {
                return Err(Error::Dimension(format!(
                    "cell in ambient dimension {} added to complex in dimension {ambient}",
                    c.ambient_dim()
                )));
            }
            let c = if has_lineality(&c, &out.lineality) { c } else { c.with_lineality(&out.lineality) };
            if c.dim() != dim {
                return Err(Error::Dimension(format!("cell of dimension {} in a {dim}-dimensional complex", c.dim())));
            }
            match index.get(&c.key()) {
                Some(&i) => merged[i].1 += w,
                None => {
                    index.insert(c.key(), merged.len());
                    merged.push((c, w));
                }
            }
        }
        for (c, w) in merged {
            if w != 0 {
                out.cells.push(c);
                out.weights.push(w);
            }
        }
        Ok(out)
    }

    /// Assembles a complex from cells that may overlap arbitrarily: overlapping cells are
    /// subdivided until they meet face to face, and coinciding pieces add their weights.
    pub fn from_overlapping(ambient: usize, dim: usize, lineality: Vec<QVec>, cells: Vec<(Cell, i64)>) -> Result<Self> {
        let start = WeightedComplex::new(ambient, dim, lineality, cells)?;
        Ok(start.make_face_to_face())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lineality(&self) -> &[QVec] {
        &self.lineality
    }

    pub fn lineality_dim(&self) -> usize {
        self.lineality.len()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weighted_cells(&self) -> impl Iterator<Item = (&Cell, i64)> {
        self.cells.iter().zip(self.weights.iter().copied())
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn into_parts(self) -> (usize, usize, Vec<QVec>, Vec<(Cell, i64)>) {
        let cells = self.cells.into_iter().zip(self.weights).collect();
        (self.ambient, self.dim, self.lineality, cells)
    }

    pub fn scaled(&self, k: i64) -> WeightedComplex {
        let cells = self.cells.iter().cloned().zip(self.weights.iter().map(|w| w * k)).collect();
        WeightedComplex::new(self.ambient, self.dim, self.lineality.clone(), cells).expect("same cells")
    }

    pub fn negated(&self) -> WeightedComplex {
        self.scaled(-1)
    }

    /// Maximal cells containing `x`.
    pub fn cells_containing(&self, x: &[Rat]) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].contains(x)).collect()
    }

    pub fn contains_point(&self, x: &[Rat]) -> bool {
        self.cells.iter().any(|c| c.contains(x))
    }

    pub fn codim_one(&self) -> &CodimOne {
        self.codim_one.get_or_init(|| {
            let facet_lists: Vec<Vec<Cell>> = par_map(&self.cells, |c| c.facet_cells());
            let mut index: HashMap<CellKey, usize> = HashMap::new();
            let mut faces = Vec::new();
            let mut adjacent: Vec<Vec<usize>> = Vec::new();
            for (i, fl) in facet_lists.into_iter().enumerate() {
                for f in fl {
                    let k = f.key();
                    let t = *index.entry(k).or_insert_with(|| {
                        faces.push(f);
                        adjacent.push(Vec::new());
                        faces.len() - 1
                    });
                    adjacent[t].push(i);
                }
            }
            CodimOne { faces, adjacent }
        })
    }

    pub fn face_lattice(&self) -> &FaceLattice {
        self.lattice.get_or_init(|| {
            let min_dim = self.lineality.len();
            let mut levels: Vec<Vec<Cell>> = vec![self.cells.clone()];
            let mut facets: Vec<Vec<Vec<usize>>> = Vec::new();
            let mut d = self.dim;
            while d > min_dim && !levels.last().unwrap().is_empty() {
                let current = levels.last().unwrap();
                let lists: Vec<Vec<Cell>> = par_map(current, |c| c.facet_cells());
                let mut index: HashMap<CellKey, usize> = HashMap::new();
                let mut next = Vec::new();
                let mut rel = Vec::new();
                for fl in lists {
                    let mut ids = Vec::new();
                    for f in fl {
                        let id = *index.entry(f.key()).or_insert_with(|| {
                            next.push(f);
                            next.len() - 1
                        });
                        ids.push(id);
                    }
                    rel.push(ids);
                }
                facets.push(rel);
                levels.push(next);
                d -= 1;
            }
            levels.reverse();
            facets.reverse();
            // The bottom level has no facets.
            let mut shifted = vec![Vec::new()];
            shifted.extend(facets);
            FaceLattice { min_dim, levels, facets: shifted }
        })
    }

    /// Balancing defect at each codimension-one face, as `(face index, defect)` for the
    /// faces where `sum_sigma w(sigma) u_{sigma/tau}` does not lie in `V_tau`.
    pub fn balancing_defects(&self) -> Vec<(usize, QVec)> {
        let co = self.codim_one();
        let idx: Vec<usize> = (0..co.faces.len()).collect();
        let results: Vec<Option<(usize, QVec)>> = par_map(&idx, |&t| {
            let tau = &co.faces[t];
            let mut s = zero_vec(self.ambient);
            for &i in &co.adjacent[t] {
                let u = normal_vector(&self.cells[i], tau);
                axpy(&mut s, &Rat::from_integer(self.weights[i].into()), &u);
            }
            if tau.direction_in_span(&s) {
                None
            } else {
                Some((t, s))
            }
        });
        results.into_iter().flatten().collect()
    }

    pub fn is_balanced(&self) -> bool {
        self.balancing_defects().is_empty()
    }

    pub fn check_balanced(&self) -> Result<()> {
        let d = self.balancing_defects();
        if d.is_empty() {
            Ok(())
        } else {
            Err(Error::NotBalanced(d.len()))
        }
    }

    /// Subdivides every cell whose relative interior is crossed by one of the hyperplanes.
    pub fn slice(&self, hyperplanes: &[Hyperplane]) -> WeightedComplex {
        if hyperplanes.is_empty() {
            return self.clone();
        }
        let lineality = restrict_lineality(&self.lineality, hyperplanes, self.ambient);
        let pieces: Vec<Vec<(Cell, i64)>> = par_map(&(0..self.cells.len()).collect::<Vec<_>>(), |&i| {
            let w = self.weights[i];
            slice_cell(&self.cells[i], hyperplanes).into_iter().map(|c| (c, w)).collect()
        });
        let cells = pieces.into_iter().flatten().collect();
        WeightedComplex::new(self.ambient, self.dim, lineality, cells).expect("pieces keep the dimension")
    }

    /// Subdivides until any two maximal cells meet in a common face (or not at all).
    pub fn make_face_to_face(&self) -> WeightedComplex {
        let mut current = self.clone();
        loop {
            let n = current.cells.len();
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let bad: Vec<Option<(usize, usize)>> =
                par_map(&pairs, |&(i, j)| if meet_properly(&current.cells[i], &current.cells[j]) { None } else { Some((i, j)) });
            let mut cuts: Vec<BTreeSet<Hyperplane>> = vec![BTreeSet::new(); n];
            let mut any = false;
            for (i, j) in bad.into_iter().flatten() {
                any = true;
                for h in cell_hyperplanes(&current.cells[j]) {
                    if current.cells[i].is_crossed_by(&h) {
                        cuts[i].insert(h);
                    }
                }
                for h in cell_hyperplanes(&current.cells[i]) {
                    if current.cells[j].is_crossed_by(&h) {
                        cuts[j].insert(h);
                    }
                }
            }
            if !any {
                return current;
            }
            let lineality = {
                let all: Vec<Hyperplane> = cuts.iter().flatten().cloned().collect();
                restrict_lineality(&current.lineality, &all, current.ambient)
            };
            let mut progressed = false;
            let mut cells = Vec::new();
            for i in 0..n {
                let hs: Vec<Hyperplane> = cuts[i].iter().cloned().collect();
                let pieces = slice_cell(&current.cells[i], &hs);
                if pieces.len() > 1 {
                    progressed = true;
                }
                for p in pieces {
                    cells.push((p, current.weights[i]));
                }
            }
            let next = WeightedComplex::new(current.ambient, current.dim, lineality, cells).expect("pieces keep the dimension");
            if !progressed && next.cells.len() == current.cells.len() {
                // Identical overlapping cells were merged; nothing else to do.
                return next;
            }
            current = next;
        }
    }
}

fn has_lineality(c: &Cell, lin: &[QVec]) -> bool {
    lin.iter().all(|l| c.contains_direction(l) && c.contains_direction(&crate::arith::rat::neg(l)))
}

/// Lineality directions on which every hyperplane normal vanishes.
pub(crate) fn restrict_lineality(lin: &[QVec], hyperplanes: &[Hyperplane], n: usize) -> Vec<QVec> {
    let crossing: Vec<&Hyperplane> = hyperplanes.iter().filter(|h| lin.iter().any(|l| !dot(&h.normal, l).is_zero())).collect();
    if crossing.is_empty() {
        return lin.to_vec();
    }
    // Solve for combinations of lineality vectors orthogonal to the crossing normals.
    let rows: Vec<QVec> = crossing.iter().map(|h| lin.iter().map(|l| dot(&h.normal, l)).collect()).collect();
    let coeffs = nullspace(&rows, lin.len());
    let span: Vec<QVec> = coeffs
        .iter()
        .map(|c| {
            let mut v = zero_vec(n);
            for (ci, l) in c.iter().zip(lin) {
                axpy(&mut v, ci, l);
            }
            v
        })
        .collect();
    saturated_basis(&span, n)
}

/// Splits a cell along every hyperplane crossing it.
pub fn slice_cell(cell: &Cell, hyperplanes: &[Hyperplane]) -> Vec<Cell> {
    let d = cell.dim();
    let mut pieces = vec![cell.clone()];
    for h in hyperplanes {
        let mut next = Vec::with_capacity(pieces.len() + 1);
        for p in pieces {
            if p.is_crossed_by(h) {
                for half in [h.lower(), h.upper()] {
                    if let Some(q) = p.intersect(&[], &[half]) {
                        if q.dim() == d {
                            next.push(q);
                        }
                    }
                }
            } else {
                next.push(p);
            }
        }
        pieces = next;
    }
    pieces
}

/// Facet hyperplanes and hull equations of a cell.
pub fn cell_hyperplanes(c: &Cell) -> Vec<Hyperplane> {
    let mut hs: Vec<Hyperplane> = c.hull_equations().to_vec();
    for f in c.facet_halfspaces() {
        if let Some(h) = Hyperplane::new(&f.normal, &f.rhs) {
            hs.push(h);
        }
    }
    hs
}

/// The intersection of two cells is empty or a face of both.
pub fn meet_properly(a: &Cell, b: &Cell) -> bool {
    let Some(i) = a.intersect_cell(b) else { return true };
    is_face_of(&i, a) && is_face_of(&i, b)
}

/// Whether the subpolyhedron `f` of `c` is a face of `c`.
pub fn is_face_of(f: &Cell, c: &Cell) -> bool {
    minimal_face(c, &f.relint_point()).key() == f.key()
}

/// Smallest face of `c` containing the point `p` of `c`.
pub fn minimal_face(c: &Cell, p: &[Rat]) -> Cell {
    let tight: Vec<_> = c.facet_halfspaces().into_iter().filter(|h| dot(&h.normal, p) == h.rhs).collect();
    let verts: Vec<QVec> = c.vertices().iter().filter(|v| tight.iter().all(|h| dot(&h.normal, v) == h.rhs)).cloned().collect();
    let rays: Vec<QVec> = c.rays().iter().filter(|r| tight.iter().all(|h| dot(&h.normal, r).is_zero())).cloned().collect();
    Cell::new(c.ambient_dim(), verts, rays, c.lineality().to_vec()).expect("face has a vertex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{int_vec, rat};

    pub(crate) fn tropical_line() -> WeightedComplex {
        let rays = [int_vec(&[-1, 0]), int_vec(&[0, -1]), int_vec(&[1, 1])];
        let cells = rays.iter().map(|r| (Cell::cone(2, vec![r.clone()], vec![]).unwrap(), 1)).collect();
        WeightedComplex::new(2, 1, vec![], cells).unwrap()
    }

    #[test]
    fn line_is_balanced() {
        let l = tropical_line();
        assert!(l.is_balanced());
        assert_eq!(l.codim_one().faces.len(), 1);
        assert_eq!(l.codim_one().adjacent[0].len(), 3);
    }

    #[test]
    fn unbalanced_is_detected() {
        let rays = [int_vec(&[-1, 0]), int_vec(&[0, -1]), int_vec(&[1, 2])];
        let cells = rays.iter().map(|r| (Cell::cone(2, vec![r.clone()], vec![]).unwrap(), 1)).collect();
        let c = WeightedComplex::new(2, 1, vec![], cells).unwrap();
        assert!(!c.is_balanced());
    }

    #[test]
    fn crossing_lines_are_subdivided() {
        let h = Cell::cone(2, vec![], vec![int_vec(&[1, 0])]).unwrap();
        let v = Cell::cone(2, vec![], vec![int_vec(&[0, 1])]).unwrap();
        let c = WeightedComplex::from_overlapping(2, 1, vec![], vec![(h, 1), (v, 1)]).unwrap();
        assert_eq!(c.num_cells(), 4);
        assert!(c.is_balanced());
    }

    #[test]
    fn overlapping_segments_add_weights() {
        let a = Cell::new(1, vec![int_vec(&[0]), int_vec(&[2])], vec![], vec![]).unwrap();
        let b = Cell::new(1, vec![int_vec(&[1]), int_vec(&[3])], vec![], vec![]).unwrap();
        let c = WeightedComplex::from_overlapping(1, 1, vec![], vec![(a, 1), (b, 2)]).unwrap();
        assert_eq!(c.num_cells(), 3);
        let mid = c.cells().iter().position(|x| x.contains(&vec![rat(3) / rat(2)])).unwrap();
        assert_eq!(c.weights()[mid], 3);
    }

    #[test]
    fn face_lattice_of_line() {
        let l = tropical_line();
        let fl = l.face_lattice();
        assert_eq!(fl.f_vector(), vec![1, 3]);
        assert_eq!(fl.facets[1].len(), 3);
    }
}
