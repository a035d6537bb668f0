//! Rational polyhedra stored by generators together with their facet description in
//! coordinates on the affine hull.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use super::cone::{cone_generators, normalize_hyperplane, polyhedron_generators};
use crate::arith::lattice::saturated_basis;
use crate::arith::linalg::{coordinate_chart, independent_subset, mat_vec, nullspace, rank, rref};
use crate::arith::rat::{add, axpy, dot, is_zero_vec, primitive, scale, sub, zero_vec, QVec, Rat};
use crate::error::{Error, Result};

/// An inequality `normal . x <= rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Halfspace {
    pub normal: QVec,
    pub rhs: Rat,
}

impl Halfspace {
    pub fn new(normal: QVec, rhs: Rat) -> Self {
        Halfspace { normal, rhs }
    }

    pub fn flipped(&self) -> Halfspace {
        Halfspace { normal: self.normal.iter().map(|x| -x).collect(), rhs: -self.rhs.clone() }
    }
}

/// An affine hyperplane `normal . x = rhs`, stored in a canonical scaling.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane {
    pub normal: QVec,
    pub rhs: Rat,
}

impl Hyperplane {
    pub fn new(normal: &[Rat], rhs: &Rat) -> Option<Self> {
        if is_zero_vec(normal) {
            return None;
        }
        let (normal, rhs) = normalize_hyperplane(normal, rhs);
        Some(Hyperplane { normal, rhs })
    }

    pub fn value(&self, x: &[Rat]) -> Rat {
        dot(&self.normal, x) - &self.rhs
    }

    pub fn lower(&self) -> Halfspace {
        Halfspace::new(self.normal.clone(), self.rhs.clone())
    }

    pub fn upper(&self) -> Halfspace {
        self.lower().flipped()
    }
}

#[derive(Clone, Debug)]
struct Facet {
    local: QVec,
    rhs: Rat,
    ambient: Halfspace,
}

/// Canonical identity of a cell: generators reduced modulo lineality, sorted.
pub type CellKey = (Vec<QVec>, Vec<QVec>, Vec<QVec>);

#[derive(Clone, Debug)]
pub struct Cell {
    ambient: usize,
    vertices: Vec<QVec>,
    rays: Vec<QVec>,
    lineality: Vec<QVec>,
    /// Basis of the direction space, lineality first.
    dirs: Vec<QVec>,
    chart_idx: Vec<usize>,
    chart_inv: Vec<QVec>,
    hull: Vec<Hyperplane>,
    facets: Vec<Facet>,
    lattice: OnceLock<Vec<QVec>>,
}

fn lex_cmp(a: &QVec, b: &QVec) -> Ordering {
    a.cmp(b)
}

/// Subtracts the lineality component so that pivot coordinates of `lin_rref` vanish.
fn reduce_mod_span(v: &[Rat], lin_rref: &(Vec<QVec>, Vec<usize>)) -> QVec {
    let mut w = v.to_vec();
    for (row, &p) in lin_rref.0.iter().zip(&lin_rref.1) {
        let c = -w[p].clone();
        axpy(&mut w, &c, row);
    }
    w
}

impl Cell {
    /// Builds a cell from generators; redundant generators are discarded.
    pub fn new(ambient: usize, vertices: Vec<QVec>, rays: Vec<QVec>, lineality: Vec<QVec>) -> Result<Cell> {
        if vertices.is_empty() {
            return Err(Error::Invalid("a cell needs at least one vertex".into()));
        }
        for v in vertices.iter().chain(&rays).chain(&lineality) {
            if v.len() != ambient {
                return Err(Error::Dimension(format!("generator of length {} in ambient dimension {ambient}", v.len())));
            }
        }
        let lineality = saturated_basis(&lineality, ambient);
        let lin_rref = rref(&lineality, ambient);
        let mut seen = HashSet::new();
        let mut verts: Vec<QVec> =
            vertices.iter().map(|v| reduce_mod_span(v, &lin_rref)).filter(|v| seen.insert(v.clone())).collect();
        let mut seen = HashSet::new();
        let mut rs: Vec<QVec> = rays
            .iter()
            .map(|r| primitive(&reduce_mod_span(r, &lin_rref)))
            .filter(|r| !is_zero_vec(r))
            .filter(|r| seen.insert(r.clone()))
            .collect();
        verts.sort_by(lex_cmp);
        rs.sort_by(lex_cmp);

        let base = verts[0].clone();
        let mut span_gens: Vec<QVec> = lineality.clone();
        span_gens.extend(verts.iter().skip(1).map(|v| sub(v, &base)));
        span_gens.extend(rs.iter().cloned());
        let dirs = independent_subset(&span_gens, ambient);
        let (chart_idx, chart_inv) = coordinate_chart(&dirs, ambient);
        let hull_normals = rref(&nullspace(&dirs, ambient), ambient).0;
        let hull: Vec<Hyperplane> = hull_normals.iter().map(|h| Hyperplane { normal: h.clone(), rhs: dot(h, &base) }).collect();

        let mut cell = Cell {
            ambient,
            vertices: verts,
            rays: rs,
            lineality,
            dirs,
            chart_idx,
            chart_inv,
            hull,
            facets: Vec::new(),
            lattice: OnceLock::new(),
        };
        cell.compute_facets();
        cell.drop_redundant();
        Ok(cell)
    }

    pub fn point(p: QVec) -> Cell {
        let n = p.len();
        Cell::new(n, vec![p], Vec::new(), Vec::new()).expect("a point is a valid cell")
    }

    /// Cone with apex at the origin.
    pub fn cone(ambient: usize, rays: Vec<QVec>, lineality: Vec<QVec>) -> Result<Cell> {
        Cell::new(ambient, vec![zero_vec(ambient)], rays, lineality)
    }

    /// Polyhedron `{x : hull equations, inequalities}`; `None` if empty.
    pub fn from_constraints(ambient: usize, eqs: &[Hyperplane], ineqs: &[Halfspace]) -> Option<Cell> {
        let e: Vec<(QVec, Rat)> = eqs.iter().map(|h| (h.normal.clone(), h.rhs.clone())).collect();
        let i: Vec<(QVec, Rat)> = ineqs.iter().map(|h| (h.normal.clone(), h.rhs.clone())).collect();
        let (v, r, l) = polyhedron_generators(ambient, &e, &i)?;
        Some(Cell::new(ambient, v, r, l).expect("generators from constraints are valid"))
    }

    fn compute_facets(&mut self) {
        let d = self.dirs.len();
        let l = self.lineality.len();
        // Homogenized generators (y, t) of the cone over the cell.
        let mut gens: Vec<QVec> = Vec::new();
        for v in &self.vertices {
            let mut y = self.local(v);
            y.push(Rat::one());
            gens.push(y);
        }
        for r in &self.rays {
            let mut y = self.local_dir(r);
            y.push(Rat::zero());
            gens.push(y);
        }
        // Lineality occupies the first local coordinates.
        let eqs: Vec<QVec> = (0..l).map(|i| crate::arith::rat::unit_vec(d + 1, i)).collect();
        let ineqs: Vec<QVec> = gens.iter().map(|g| g.iter().map(|x| -x).collect()).collect();
        let (_, dual_rays) = cone_generators(d + 1, &eqs, &ineqs);
        let mut facets = Vec::new();
        for h in dual_rays {
            // h . (y, t) >= 0 on the cell means (-a) . y <= c.
            let a: QVec = h[..d].iter().map(|x| -x).collect();
            if is_zero_vec(&a) {
                continue;
            }
            let c = h[d].clone();
            let ambient = self.ambient_halfspace(&a, &c);
            facets.push(Facet { local: a, rhs: c, ambient });
        }
        self.facets = facets;
    }

    /// Expresses the local inequality `a . y <= c` in ambient coordinates, reduced modulo the
    /// hull equations so that the representative is canonical.
    fn ambient_halfspace(&self, a: &[Rat], c: &Rat) -> Halfspace {
        let coeffs = mat_vec(&transpose_sq(&self.chart_inv), a);
        let mut normal = zero_vec(self.ambient);
        for (k, &j) in self.chart_idx.iter().enumerate() {
            normal[j] = coeffs[k].clone();
        }
        let base = &self.vertices[0];
        let mut rhs = c + dot(&normal, base);
        for h in &self.hull {
            let p = h.normal.iter().position(|x| !x.is_zero()).unwrap();
            let f = normal[p].clone();
            if !f.is_zero() {
                let mf = -f.clone();
                axpy(&mut normal, &mf, &h.normal);
                rhs -= &f * &h.rhs;
            }
        }
        let (n, r) = normalize_positive(&normal, &rhs);
        Halfspace::new(n, r)
    }

    fn drop_redundant(&mut self) {
        let d = self.dirs.len();
        let l = self.lineality.len();
        let target = d - l;
        let homog: Vec<QVec> = self
            .facets
            .iter()
            .map(|f| {
                let mut h = f.local.clone();
                h.push(-f.rhs.clone());
                h
            })
            .collect();
        let mut far = zero_vec(d + 1);
        far[d] = -Rat::one();
        let keep_vertex: Vec<bool> = self
            .vertices
            .iter()
            .map(|v| {
                let y = self.local(v);
                let tight: Vec<QVec> =
                    self.facets.iter().zip(&homog).filter(|(f, _)| dot(&f.local, &y) == f.rhs).map(|(_, h)| h.clone()).collect();
                rank(&tight, d + 1) == target
            })
            .collect();
        let keep_ray: Vec<bool> = self
            .rays
            .iter()
            .map(|r| {
                let y = self.local_dir(r);
                let mut tight: Vec<QVec> =
                    self.facets.iter().zip(&homog).filter(|(f, _)| dot(&f.local, &y).is_zero()).map(|(_, h)| h.clone()).collect();
                tight.push(far.clone());
                rank(&tight, d + 1) == target
            })
            .collect();
        if keep_vertex.iter().all(|&k| k) && keep_ray.iter().all(|&k| k) {
            return;
        }
        let verts: Vec<QVec> = self.vertices.iter().zip(&keep_vertex).filter(|(_, &k)| k).map(|(v, _)| v.clone()).collect();
        let rays: Vec<QVec> = self.rays.iter().zip(&keep_ray).filter(|(_, &k)| k).map(|(r, _)| r.clone()).collect();
        // Re-anchor local coordinates at the new first vertex.
        let shift = self.local(&verts[0]);
        for f in &mut self.facets {
            f.rhs = &f.rhs - dot(&f.local, &shift);
        }
        self.vertices = verts;
        self.rays = rays;
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    pub fn lineality_dim(&self) -> usize {
        self.lineality.len()
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    pub fn rays(&self) -> &[QVec] {
        &self.rays
    }

    pub fn lineality(&self) -> &[QVec] {
        &self.lineality
    }

    pub fn direction_basis(&self) -> &[QVec] {
        &self.dirs
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    /// `Lambda_sigma = V_sigma ∩ Z^n`.
    pub fn lattice(&self) -> &[QVec] {
        self.lattice.get_or_init(|| saturated_basis(&self.dirs, self.ambient))
    }

    pub fn key(&self) -> CellKey {
        (self.vertices.clone(), self.rays.clone(), self.lineality.clone())
    }

    pub fn hull_equations(&self) -> &[Hyperplane] {
        &self.hull
    }

    pub fn facet_halfspaces(&self) -> Vec<Halfspace> {
        self.facets.iter().map(|f| f.ambient.clone()).collect()
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    /// Local coordinates of a direction vector in `V_sigma`.
    pub fn local_dir(&self, v: &[Rat]) -> QVec {
        let restricted: QVec = self.chart_idx.iter().map(|&j| v[j].clone()).collect();
        mat_vec(&self.chart_inv, &restricted)
    }

    pub fn local(&self, x: &[Rat]) -> QVec {
        self.local_dir(&sub(x, &self.vertices[0]))
    }

    pub fn from_local(&self, y: &[Rat]) -> QVec {
        let mut x = self.vertices[0].clone();
        for (c, d) in y.iter().zip(&self.dirs) {
            axpy(&mut x, c, d);
        }
        x
    }

    pub fn in_hull(&self, x: &[Rat]) -> bool {
        x.len() == self.ambient && self.hull.iter().all(|h| h.value(x).is_zero())
    }

    pub fn direction_in_span(&self, v: &[Rat]) -> bool {
        self.hull.iter().all(|h| dot(&h.normal, v).is_zero())
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        if !self.in_hull(x) {
            return false;
        }
        let y = self.local(x);
        self.facets.iter().all(|f| dot(&f.local, &y) <= f.rhs)
    }

    pub fn in_relint(&self, x: &[Rat]) -> bool {
        if !self.in_hull(x) {
            return false;
        }
        let y = self.local(x);
        self.facets.iter().all(|f| dot(&f.local, &y) < f.rhs)
    }

    pub fn contains_cell(&self, other: &Cell) -> bool {
        other.vertices.iter().all(|v| self.contains(v))
            && other.rays.iter().chain(&other.lineality).all(|r| self.contains_direction(r))
            && other.lineality.iter().all(|l| self.contains_direction(&l.iter().map(|x| -x).collect::<QVec>()))
    }

    /// Whether `r` lies in the recession cone.
    pub fn contains_direction(&self, r: &[Rat]) -> bool {
        if !self.direction_in_span(r) {
            return false;
        }
        let y = self.local_dir(r);
        self.facets.iter().all(|f| !dot(&f.local, &y).is_positive())
    }

    /// A point in the relative interior: barycenter of vertices plus the sum of rays.
    pub fn relint_point(&self) -> QVec {
        let k = Rat::from_integer(self.vertices.len().into());
        let mut p = zero_vec(self.ambient);
        for v in &self.vertices {
            p = add(&p, v);
        }
        p = scale(&(Rat::one() / k), &p);
        for r in &self.rays {
            p = add(&p, r);
        }
        p
    }

    /// Sign pattern of `h` on the cell: (attains positive values, attains negative values).
    pub fn sides(&self, h: &Hyperplane) -> (bool, bool) {
        let mut pos = false;
        let mut neg = false;
        for v in &self.vertices {
            let s = h.value(v);
            pos |= s.is_positive();
            neg |= s.is_negative();
        }
        for r in &self.rays {
            let s = dot(&h.normal, r);
            pos |= s.is_positive();
            neg |= s.is_negative();
        }
        if self.lineality.iter().any(|l| !dot(&h.normal, l).is_zero()) {
            pos = true;
            neg = true;
        }
        (pos, neg)
    }

    /// Whether `h` passes through the relative interior without containing the cell.
    pub fn is_crossed_by(&self, h: &Hyperplane) -> bool {
        let (p, n) = self.sides(h);
        p && n
    }

    /// Intersection with additional ambient constraints.
    pub fn intersect(&self, eqs: &[Hyperplane], ineqs: &[Halfspace]) -> Option<Cell> {
        let d = self.dim();
        let base = &self.vertices[0];
        let to_local = |normal: &QVec, rhs: &Rat| -> (QVec, Rat) {
            let a: QVec = self.dirs.iter().map(|dv| dot(normal, dv)).collect();
            (a, rhs - dot(normal, base))
        };
        let mut le: Vec<(QVec, Rat)> = Vec::new();
        for h in eqs {
            let (a, b) = to_local(&h.normal, &h.rhs);
            if is_zero_vec(&a) {
                if !b.is_zero() {
                    return None;
                }
                continue;
            }
            le.push((a, b));
        }
        let mut li: Vec<(QVec, Rat)> = self.facets.iter().map(|f| (f.local.clone(), f.rhs.clone())).collect();
        for h in ineqs {
            let (a, b) = to_local(&h.normal, &h.rhs);
            if is_zero_vec(&a) {
                if b.is_negative() {
                    return None;
                }
                continue;
            }
            li.push((a, b));
        }
        let (v, r, l) = polyhedron_generators(d, &le, &li)?;
        let lift_dir = |y: &QVec| -> QVec {
            let mut x = zero_vec(self.ambient);
            for (c, dv) in y.iter().zip(&self.dirs) {
                axpy(&mut x, c, dv);
            }
            x
        };
        let verts = v.iter().map(|y| self.from_local(y)).collect();
        let rays = r.iter().map(lift_dir).collect();
        let lin = l.iter().map(lift_dir).collect();
        Some(Cell::new(self.ambient, verts, rays, lin).expect("lifted generators are valid"))
    }

    pub fn intersect_cell(&self, other: &Cell) -> Option<Cell> {
        self.intersect(&other.hull, &other.facet_halfspaces())
    }

    /// Faces of codimension one.
    pub fn facet_cells(&self) -> Vec<Cell> {
        self.facets
            .iter()
            .map(|f| {
                let verts: Vec<QVec> = self.vertices.iter().filter(|v| dot(&f.local, &self.local(v)) == f.rhs).cloned().collect();
                let rays: Vec<QVec> = self.rays.iter().filter(|r| dot(&f.local, &self.local_dir(r)).is_zero()).cloned().collect();
                Cell::new(self.ambient, verts, rays, self.lineality.clone()).expect("facet has a vertex")
            })
            .collect()
    }

    /// Cone of directions `w` with `p + t w` in the cell for small `t > 0`, as a cone at the
    /// origin.
    pub fn tangent_cone(&self, p: &[Rat]) -> Result<Cell> {
        if !self.contains(p) {
            return Err(Error::NotInSupport("tangent cone at a point outside the cell".into()));
        }
        let y = self.local(p);
        let d = self.dim();
        let tight: Vec<QVec> = self.facets.iter().filter(|f| dot(&f.local, &y) == f.rhs).map(|f| f.local.clone()).collect();
        let (lin, rays) = cone_generators(d, &[], &tight);
        let lift = |w: &QVec| {
            let mut x = zero_vec(self.ambient);
            for (c, dv) in w.iter().zip(&self.dirs) {
                axpy(&mut x, c, dv);
            }
            x
        };
        Cell::cone(self.ambient, rays.iter().map(lift).collect(), lin.iter().map(lift).collect())
    }

    pub fn with_lineality(&self, extra: &[QVec]) -> Cell {
        let mut lin = self.lineality.clone();
        lin.extend(extra.iter().cloned());
        Cell::new(self.ambient, self.vertices.clone(), self.rays.clone(), lin).expect("same vertices")
    }

    pub fn product(&self, other: &Cell) -> Cell {
        let n = self.ambient + other.ambient;
        let cat = |a: &QVec, b: &QVec| {
            let mut v = a.clone();
            v.extend(b.iter().cloned());
            v
        };
        let z1 = zero_vec(self.ambient);
        let z2 = zero_vec(other.ambient);
        let mut verts = Vec::new();
        for a in &self.vertices {
            for b in &other.vertices {
                verts.push(cat(a, b));
            }
        }
        let mut rays: Vec<QVec> = self.rays.iter().map(|r| cat(r, &z2)).collect();
        rays.extend(other.rays.iter().map(|r| cat(&z1, r)));
        let mut lin: Vec<QVec> = self.lineality.iter().map(|r| cat(r, &z2)).collect();
        lin.extend(other.lineality.iter().map(|r| cat(&z1, r)));
        Cell::new(n, verts, rays, lin).expect("product of cells")
    }

    /// Image of the cell under `x -> m x + t`.
    pub fn image(&self, m: &[QVec], t: &[Rat]) -> Cell {
        let n = m.len();
        let verts = self.vertices.iter().map(|v| add(&mat_vec(m, v), t)).collect();
        let rays = self.rays.iter().map(|r| mat_vec(m, r)).collect();
        let lin = self.lineality.iter().map(|r| mat_vec(m, r)).collect();
        Cell::new(n, verts, rays, lin).expect("image of a cell")
    }
}

fn transpose_sq(m: &[QVec]) -> Vec<QVec> {
    let n = m.len();
    (0..n).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Scales `(normal, rhs)` to coprime integers keeping the orientation of the inequality.
fn normalize_positive(normal: &[Rat], rhs: &Rat) -> (QVec, Rat) {
    let mut v = normal.to_vec();
    v.push(rhs.clone());
    let p = primitive(&v);
    let n = p.len() - 1;
    (p[..n].to_vec(), p[n].clone())
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient
            && self.vertices == other.vertices
            && self.rays == other.rays
            && self.lineality == other.lineality
    }
}

impl Eq for Cell {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{int_vec, rat, ratio};

    #[test]
    fn square_has_four_facets() {
        let verts = vec![int_vec(&[0, 0]), int_vec(&[1, 0]), int_vec(&[0, 1]), int_vec(&[1, 1]), int_vec(&[1, 1])];
        let c = Cell::new(2, verts, vec![], vec![]).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.vertices().len(), 4);
        assert_eq!(c.num_facets(), 4);
        assert!(c.contains(&vec![ratio(1, 2), rat(1)]));
        assert!(!c.in_relint(&vec![ratio(1, 2), rat(1)]));
        assert!(c.in_relint(&c.relint_point()));
    }

    #[test]
    fn redundant_generators_are_removed() {
        let verts = vec![int_vec(&[0, 0]), int_vec(&[2, 0]), int_vec(&[1, 0]), int_vec(&[0, 2]), int_vec(&[1, 1])];
        let c = Cell::new(2, verts, vec![], vec![]).unwrap();
        assert_eq!(c.vertices().len(), 3);
        let cone = Cell::cone(2, vec![int_vec(&[1, 0]), int_vec(&[0, 1]), int_vec(&[2, 3])], vec![]).unwrap();
        assert_eq!(cone.rays().len(), 2);
        assert_eq!(cone.num_facets(), 2);
    }

    #[test]
    fn ray_in_higher_ambient() {
        let c = Cell::cone(3, vec![int_vec(&[1, 1, 0])], vec![]).unwrap();
        assert_eq!(c.dim(), 1);
        assert_eq!(c.hull_equations().len(), 2);
        assert!(c.contains(&int_vec(&[5, 5, 0])));
        assert!(!c.contains(&int_vec(&[-1, -1, 0])));
        assert_eq!(c.facet_cells()[0].dim(), 0);
    }

    #[test]
    fn lineality_is_canonical() {
        let a = Cell::cone(2, vec![int_vec(&[1, 0])], vec![int_vec(&[1, 1])]).unwrap();
        let b = Cell::cone(2, vec![int_vec(&[0, -1])], vec![int_vec(&[-2, -2])]).unwrap();
        assert_eq!(a.key(), b.key());
        let moved = Cell::new(2, vec![int_vec(&[3, 3])], vec![int_vec(&[2, 1])], vec![int_vec(&[1, 1])]).unwrap();
        assert_eq!(a, moved);
    }

    #[test]
    fn intersection_with_halfspace() {
        let c = Cell::cone(2, vec![int_vec(&[1, 0]), int_vec(&[0, 1])], vec![]).unwrap();
        let h = Hyperplane::new(&int_vec(&[1, 1]), &rat(1)).unwrap();
        let seg = c.intersect(&[h.clone()], &[]).unwrap();
        assert_eq!(seg.dim(), 1);
        assert_eq!(seg.vertices().len(), 2);
        let tri = c.intersect(&[], &[h.lower()]).unwrap();
        assert_eq!(tri.vertices().len(), 3);
        let far = Hyperplane::new(&int_vec(&[1, 1]), &rat(-1)).unwrap();
        assert!(c.intersect(&[far], &[]).is_none());
    }

    #[test]
    fn tangent_cone_at_vertex() {
        let tri = Cell::new(2, vec![int_vec(&[0, 0]), int_vec(&[2, 0]), int_vec(&[0, 2])], vec![], vec![]).unwrap();
        let t = tri.tangent_cone(&int_vec(&[2, 0])).unwrap();
        assert_eq!(t.rays().len(), 2);
        assert!(t.contains(&int_vec(&[-1, 0])));
        assert!(t.contains(&int_vec(&[-1, 1])));
        let inner = tri.tangent_cone(&int_vec(&[1, 0])).unwrap();
        assert_eq!(inner.lineality_dim(), 1);
    }

    #[test]
    fn product_dimension() {
        let a = Cell::cone(1, vec![int_vec(&[1])], vec![]).unwrap();
        let b = Cell::new(1, vec![int_vec(&[0]), int_vec(&[1])], vec![], vec![]).unwrap();
        let p = a.product(&b);
        assert_eq!(p.dim(), 2);
        assert_eq!(p.vertices().len(), 2);
        assert_eq!(p.num_facets(), 3);
    }
}
