//! Embedded rational curves as metric graphs.

use std::collections::{HashMap, VecDeque};

use num_traits::{Signed, Zero};

use crate::arith::lattice::{generated_basis, lattice_index, saturated_basis};
use crate::arith::linalg::rank;
use crate::arith::rat::{add, fmt_vec, is_zero_vec, neg, primitive, scale, sub, QVec, Rat};
use crate::error::{Error, Result};
use crate::polyhedral::WeightedComplex;

#[derive(Clone, Debug)]
pub struct Edge {
    pub ends: (usize, usize),
    /// Primitive direction from `ends.0` to `ends.1`.
    pub dir: QVec,
    pub length: Rat,
    pub weight: i64,
}

#[derive(Clone, Debug)]
pub struct Leaf {
    pub vertex: usize,
    pub dir: QVec,
    pub weight: i64,
}

/// A point of the curve: a vertex, or a lattice distance along an edge from its first end, or
/// along a leaf from its vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Position {
    Vertex(usize),
    Edge(usize, Rat),
    Leaf(usize, Rat),
}

#[derive(Clone, Debug)]
pub struct FibreCurve {
    pub ambient: usize,
    pub vertices: Vec<QVec>,
    pub edges: Vec<Edge>,
    pub leaves: Vec<Leaf>,
}

/// `t` with `v = t d`, if it exists.
fn ratio_along(v: &[Rat], d: &[Rat]) -> Option<Rat> {
    let k = d.iter().position(|x| !x.is_zero())?;
    let t = &v[k] / &d[k];
    if v.iter().zip(d).all(|(a, b)| *a == &t * b) {
        Some(t)
    } else {
        None
    }
}

impl FibreCurve {
    /// Reads a one-dimensional complex without lineality, merging two-valent vertices where
    /// the curve goes straight through.
    pub fn from_complex(c: &WeightedComplex) -> Result<FibreCurve> {
        if c.dim() != 1 || c.lineality_dim() != 0 {
            return Err(Error::BadFibre(format!(
                "expected a curve, got dimension {} with lineality {}",
                c.dim(),
                c.lineality_dim()
            )));
        }
        let mut vid: HashMap<QVec, usize> = HashMap::new();
        let mut vertices: Vec<QVec> = Vec::new();
        let mut id = |v: &QVec, vs: &mut Vec<QVec>| {
            *vid.entry(v.clone()).or_insert_with(|| {
                vs.push(v.clone());
                vs.len() - 1
            })
        };
        let mut edges = Vec::new();
        let mut leaves = Vec::new();
        for (cell, w) in c.weighted_cells() {
            if cell.lineality_dim() > 0 {
                return Err(Error::BadFibre("the curve contains a whole line".into()));
            }
            match (cell.vertices(), cell.rays()) {
                ([a, b], []) => {
                    let (ia, ib) = (id(a, &mut vertices), id(b, &mut vertices));
                    let diff = sub(b, a);
                    let dir = primitive(&diff);
                    let length = ratio_along(&diff, &dir).expect("parallel");
                    edges.push(Edge { ends: (ia, ib), dir, length, weight: w });
                }
                ([a], [r]) => {
                    let ia = id(a, &mut vertices);
                    leaves.push(Leaf { vertex: ia, dir: primitive(r), weight: w });
                }
                _ => return Err(Error::BadFibre("cell is neither a segment nor a ray".into())),
            }
        }
        let mut curve = FibreCurve { ambient: c.ambient_dim(), vertices, edges, leaves };
        curve.coarsen()?;
        Ok(curve)
    }

    fn incident(&self, v: usize) -> (Vec<usize>, Vec<usize>) {
        let es = (0..self.edges.len()).filter(|&e| self.edges[e].ends.0 == v || self.edges[e].ends.1 == v).collect();
        let ls = (0..self.leaves.len()).filter(|&l| self.leaves[l].vertex == v).collect();
        (es, ls)
    }

    /// Primitive direction of edge `e` pointing away from `v`.
    fn out_dir(&self, e: usize, v: usize) -> QVec {
        let ed = &self.edges[e];
        if ed.ends.0 == v {
            ed.dir.clone()
        } else {
            neg(&ed.dir)
        }
    }

    fn far_end(&self, e: usize, v: usize) -> usize {
        let ed = &self.edges[e];
        if ed.ends.0 == v {
            ed.ends.1
        } else {
            ed.ends.0
        }
    }

    fn coarsen(&mut self) -> Result<()> {
        loop {
            let mut merged = false;
            for v in 0..self.vertices.len() {
                let (es, ls) = self.incident(v);
                if es.len() + ls.len() != 2 {
                    continue;
                }
                match (es.as_slice(), ls.as_slice()) {
                    ([e1, e2], []) => {
                        let (d1, d2) = (self.out_dir(*e1, v), self.out_dir(*e2, v));
                        let w = self.edges[*e1].weight;
                        if d1 != neg(&d2) || w != self.edges[*e2].weight {
                            continue;
                        }
                        let (a, b) = (self.far_end(*e1, v), self.far_end(*e2, v));
                        let length = &self.edges[*e1].length + &self.edges[*e2].length;
                        let (hi, lo) = if e1 > e2 { (*e1, *e2) } else { (*e2, *e1) };
                        self.edges.remove(hi);
                        self.edges.remove(lo);
                        self.edges.push(Edge { ends: (a, b), dir: d2, length, weight: w });
                    }
                    ([e], [l]) => {
                        let d = self.out_dir(*e, v);
                        if d != neg(&self.leaves[*l].dir) || self.edges[*e].weight != self.leaves[*l].weight {
                            continue;
                        }
                        let a = self.far_end(*e, v);
                        self.edges.remove(*e);
                        self.leaves[*l].vertex = a;
                    }
                    ([], [l1, l2]) => {
                        if self.leaves[*l1].dir == neg(&self.leaves[*l2].dir) {
                            return Err(Error::BadFibre("the curve is a line".into()));
                        }
                        continue;
                    }
                    _ => continue,
                }
                self.remove_vertex(v);
                merged = true;
                break;
            }
            if !merged {
                return Ok(());
            }
        }
    }

    fn remove_vertex(&mut self, v: usize) {
        self.vertices.remove(v);
        let fix = |x: usize| if x > v { x - 1 } else { x };
        for e in &mut self.edges {
            e.ends = (fix(e.ends.0), fix(e.ends.1));
        }
        for l in &mut self.leaves {
            l.vertex = fix(l.vertex);
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_tree(&self) -> bool {
        let nv = self.vertices.len();
        if nv == 0 || self.edges.len() + 1 != nv {
            return false;
        }
        let mut seen = vec![false; nv];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for e in self.incident(v).0 {
                let u = self.far_end(e, v);
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Whether the star at `v` is unimodularly a standard tropical line `L^{k-1}_1`.
    pub fn vertex_is_smooth(&self, v: usize) -> bool {
        let (es, ls) = self.incident(v);
        let dirs: Vec<QVec> =
            es.iter().map(|&e| self.out_dir(e, v)).chain(ls.iter().map(|&l| self.leaves[l].dir.clone())).collect();
        let k = dirs.len();
        if k < 3 {
            return false;
        }
        let total = dirs.iter().fold(vec![Rat::zero(); self.ambient], |a, d| add(&a, d));
        if !is_zero_vec(&total) {
            return false;
        }
        let first = &dirs[..k - 1];
        if rank(first, self.ambient) != k - 1 {
            return false;
        }
        let sat = saturated_basis(first, self.ambient);
        let gen = generated_basis(first, self.ambient);
        lattice_index(&gen, &sat).is_some_and(|i| i == 1.into())
    }

    /// Smooth rational curve with the given number of leaves, all weights one.
    pub fn check_smooth(&self, leaves: usize) -> Result<()> {
        let bad = |m: String| Err(Error::BadFibre(m));
        if self.edges.iter().any(|e| e.weight != 1) || self.leaves.iter().any(|l| l.weight != 1) {
            return bad("a cell of the curve has weight other than 1".into());
        }
        if !self.is_tree() {
            return bad("the curve is not a tree".into());
        }
        if let Some(v) = (0..self.vertices.len()).find(|&v| !self.vertex_is_smooth(v)) {
            return bad(format!("the curve is not smooth at {}", fmt_vec(&self.vertices[v])));
        }
        if self.leaves.len() != leaves {
            return bad(format!("the curve has {} leaves instead of {leaves}", self.leaves.len()));
        }
        Ok(())
    }

    /// Leaf whose relative interior (vertex removed) contains `p`.
    pub fn leaf_containing(&self, p: &[Rat]) -> Option<usize> {
        self.leaves.iter().position(|l| ratio_along(&sub(p, &self.vertices[l.vertex]), &l.dir).is_some_and(|t| t.is_positive()))
    }

    pub fn locate(&self, p: &[Rat]) -> Option<Position> {
        if let Some(v) = self.vertices.iter().position(|x| x.as_slice() == p) {
            return Some(Position::Vertex(v));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(t) = ratio_along(&sub(p, &self.vertices[e.ends.0]), &e.dir) {
                if t.is_positive() && t < e.length {
                    return Some(Position::Edge(i, t));
                }
            }
        }
        for (i, l) in self.leaves.iter().enumerate() {
            if let Some(t) = ratio_along(&sub(p, &self.vertices[l.vertex]), &l.dir) {
                if t.is_positive() {
                    return Some(Position::Leaf(i, t));
                }
            }
        }
        None
    }

    pub fn point_at(&self, pos: &Position) -> QVec {
        match pos {
            Position::Vertex(v) => self.vertices[*v].clone(),
            Position::Edge(e, t) => add(&self.vertices[self.edges[*e].ends.0], &scale(t, &self.edges[*e].dir)),
            Position::Leaf(l, t) => add(&self.vertices[self.leaves[*l].vertex], &scale(t, &self.leaves[*l].dir)),
        }
    }

    /// Lattice length of the path between two vertices.
    pub fn vertex_distance(&self, a: usize, b: usize) -> Rat {
        let mut dist: Vec<Option<Rat>> = vec![None; self.vertices.len()];
        dist[a] = Some(Rat::zero());
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].clone().expect("visited");
            for e in self.incident(v).0 {
                let u = self.far_end(e, v);
                if dist[u].is_none() {
                    dist[u] = Some(&dv + &self.edges[e].length);
                    queue.push_back(u);
                }
            }
        }
        dist[b].clone().unwrap_or_else(Rat::zero)
    }

    pub fn leaf_distance(&self, i: usize, j: usize) -> Rat {
        self.vertex_distance(self.leaves[i].vertex, self.leaves[j].vertex)
    }

    /// Leaves reachable from `ends.0` of edge `e` without crossing it, as a bitmask.
    pub fn edge_side(&self, e: usize) -> u64 {
        let start = self.edges[e].ends.0;
        let mut seen = vec![false; self.vertices.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut mask = 0u64;
        while let Some(v) = queue.pop_front() {
            let (es, ls) = self.incident(v);
            for l in ls {
                mask |= 1 << l;
            }
            for f in es {
                if f == e {
                    continue;
                }
                let u = self.far_end(f, v);
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        mask
    }

    /// Vertex sides: for each bounded edge, whether `v` is on the side of `ends.0`.
    pub fn vertex_signature(&self, v: usize) -> Vec<bool> {
        (0..self.edges.len())
            .map(|e| {
                let start = self.edges[e].ends.0;
                start == v || self.reaches_without(start, v, e)
            })
            .collect()
    }

    fn reaches_without(&self, from: usize, to: usize, skip: usize) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                return true;
            }
            for f in self.incident(v).0 {
                if f == skip {
                    continue;
                }
                let u = self.far_end(f, v);
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{int_vec, rat};
    use crate::polyhedral::Cell;

    fn curve(cells: Vec<Cell>) -> FibreCurve {
        let n = cells[0].ambient_dim();
        let c = WeightedComplex::new(n, 1, vec![], cells.into_iter().map(|c| (c, 1)).collect()).unwrap();
        FibreCurve::from_complex(&c).unwrap()
    }

    #[test]
    fn tropical_line_is_smooth() {
        let o = int_vec(&[0, 0]);
        let cells = [int_vec(&[-1, 0]), int_vec(&[0, -1]), int_vec(&[1, 1])]
            .into_iter()
            .map(|r| Cell::new(2, vec![o.clone()], vec![r], vec![]).unwrap())
            .collect();
        let c = curve(cells);
        assert!(c.check_smooth(3).is_ok());
        assert_eq!(c.leaf_containing(&int_vec(&[2, 2])), Some(2));
        assert_eq!(c.leaf_containing(&o), None);
    }

    #[test]
    fn subdivided_edges_merge() {
        // Two vertices joined by a bounded edge of lattice length 2, subdivided once.
        let a = int_vec(&[0, 0]);
        let m = int_vec(&[1, 1]);
        let b = int_vec(&[2, 2]);
        let cells = vec![
            Cell::new(2, vec![a.clone(), m.clone()], vec![], vec![]).unwrap(),
            Cell::new(2, vec![m, b.clone()], vec![], vec![]).unwrap(),
            Cell::new(2, vec![a.clone()], vec![int_vec(&[-1, 0])], vec![]).unwrap(),
            Cell::new(2, vec![a], vec![int_vec(&[0, -1])], vec![]).unwrap(),
            Cell::new(2, vec![b.clone()], vec![int_vec(&[0, 1])], vec![]).unwrap(),
            Cell::new(2, vec![b], vec![int_vec(&[1, 0])], vec![]).unwrap(),
        ];
        let c = curve(cells);
        assert_eq!(c.vertices.len(), 2);
        assert_eq!(c.edges.len(), 1);
        assert_eq!(c.edges[0].length, rat(2));
        assert!(c.check_smooth(4).is_ok());
        assert_eq!(c.edge_side(0).count_ones(), 2);
    }

    #[test]
    fn non_unimodular_vertex_rejected() {
        let o = int_vec(&[0, 0]);
        // Balanced, but the first two directions span an index-3 sublattice.
        let cells = [int_vec(&[2, 1]), int_vec(&[-1, 1]), int_vec(&[-1, -2])]
            .into_iter()
            .map(|r| Cell::new(2, vec![o.clone()], vec![r], vec![]).unwrap())
            .collect();
        let c = curve(cells);
        assert!(c.check_smooth(3).is_err());
    }
}
