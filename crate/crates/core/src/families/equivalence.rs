//! Maps between families over the same base that are fibrewise isomorphisms of marked
//! curves, and the transport maps between fibres over one cell.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::curve::{FibreCurve, Position};
use super::family::{face_points, pull_into, random_point, spanning_points, Family};
use super::morphism::is_pseudomorphism;
use crate::arith::rat::{fmt_vec, sub, QVec, Rat};
use crate::error::{Error, Result};
use crate::par::par_range;
use crate::polyhedral::complex::minimal_face;
use crate::polyhedral::ops::{equal_mod_refinement, push_forward_pl};
use crate::polyhedral::{AffineMap, PLMap};

/// A fibre together with the marking that labels its leaves.
struct Marked {
    curve: FibreCurve,
    /// Marking index of each leaf.
    mark_of: Vec<usize>,
}

impl Marked {
    fn over(fam: &Family, b: &[Rat]) -> Result<Marked> {
        let curve = fam.fibre(b)?;
        let leaves = fam.marked_leaves(&curve, b)?;
        let mut mark_of = vec![usize::MAX; curve.num_leaves()];
        for (i, &l) in leaves.iter().enumerate() {
            mark_of[l] = i;
        }
        if mark_of.contains(&usize::MAX) {
            return Err(Error::Family(format!("the marking over {} misses a leaf", fmt_vec(b))));
        }
        Ok(Marked { curve, mark_of })
    }

    fn full(&self) -> u64 {
        (1u64 << self.mark_of.len()) - 1
    }

    /// Markings on the `ends.0` side of an edge.
    fn side(&self, e: usize) -> u64 {
        let leaves = self.curve.edge_side(e);
        (0..self.mark_of.len()).filter(|&l| leaves >> l & 1 == 1).fold(0, |m, l| m | 1 << self.mark_of[l])
    }

    /// The split of an edge as the side containing marking 0, and whether that is `ends.0`.
    fn split(&self, e: usize) -> (u64, bool) {
        let s = self.side(e);
        if s & 1 == 1 {
            (s, true)
        } else {
            (self.full() & !s, false)
        }
    }

    /// For each edge, its split and whether `v` is on the side containing marking 0.
    fn vertex_key(&self, v: usize) -> Vec<(u64, bool)> {
        let sig = self.curve.vertex_signature(v);
        let mut key: Vec<(u64, bool)> = (0..self.curve.edges.len())
            .map(|e| {
                let (s, first) = self.split(e);
                (s, sig[e] == first)
            })
            .collect();
        key.sort();
        key
    }

    fn leaf_of(&self, mark: usize) -> usize {
        self.mark_of.iter().position(|&m| m == mark).expect("every marking has a leaf")
    }

    fn edge_with(&self, split: u64) -> Option<(usize, bool)> {
        (0..self.curve.edges.len()).find_map(|e| {
            let (s, first) = self.split(e);
            (s == split).then_some((e, first))
        })
    }
}

/// A position described without reference to the embedding.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Spot {
    Vertex(Vec<(u64, bool)>),
    /// Distance from the end on the side containing marking 0.
    Edge(u64, Rat),
    Leaf(usize, Rat),
}

fn describe(m: &Marked, pos: &Position) -> Spot {
    match pos {
        Position::Vertex(v) => Spot::Vertex(m.vertex_key(*v)),
        Position::Edge(e, t) => {
            let (s, first) = m.split(*e);
            Spot::Edge(s, if first { t.clone() } else { &m.curve.edges[*e].length - t })
        }
        Position::Leaf(l, t) => Spot::Leaf(m.mark_of[*l], t.clone()),
    }
}

fn realize(m: &Marked, spot: &Spot) -> Option<Position> {
    match spot {
        Spot::Vertex(key) => (0..m.curve.vertices.len()).find(|&v| m.vertex_key(v) == *key).map(Position::Vertex),
        Spot::Edge(s, d) => {
            let (e, first) = m.edge_with(*s)?;
            let len = &m.curve.edges[e].length;
            if d >= len {
                return None;
            }
            Some(Position::Edge(e, if first { d.clone() } else { len - d }))
        }
        Spot::Leaf(i, t) => Some(Position::Leaf(m.leaf_of(*i), t.clone())),
    }
}

/// The point of the fibre of `fam2` over `g(x)` corresponding to `x`.
pub fn transport_point(fam: &Family, fam2: &Family, x: &[Rat]) -> Result<QVec> {
    let b = fam.g.eval(x)?;
    let m1 = Marked::over(fam, &b)?;
    let m2 = Marked::over(fam2, &b)?;
    let not_equiv = || Error::Family(format!("the marked fibres over {} are not isomorphic", fmt_vec(&b)));
    let pos = m1.curve.locate(x).ok_or_else(not_equiv)?;
    let pos2 = realize(&m2, &describe(&m1, &pos)).ok_or_else(not_equiv)?;
    Ok(m2.curve.point_at(&pos2))
}

/// `psi: T -> T'`, `t -> psi_{g(t)}(t)`, interpolated on each maximal cell of `T`.
pub fn equivalence_map(fam: &Family, fam2: &Family, seed: u64) -> Result<PLMap> {
    if fam.n() != fam2.n() || fam.base.ambient_dim() != fam2.base.ambient_dim() {
        return Err(Error::Family("the families have different bases or numbers of markings".into()));
    }
    let total = fam.total();
    let inside = |x: &[Rat]| fam.g.eval(x).is_ok_and(|b| fam.chart_at(&b).is_some() && fam2.chart_at(&b).is_some());
    let pieces = par_range(total.num_cells(), |i| -> Result<AffineMap> {
        let cell = &total.cells()[i];
        let pts = spanning_points(cell, inside)
            .ok_or_else(|| Error::OutsideDomain(format!("no common chart under {}", fmt_vec(&cell.relint_point()))))?;
        let vals = pts.iter().map(|p| transport_point(fam, fam2, p)).collect::<Result<Vec<_>>>()?;
        let dirs: Vec<QVec> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
        let imgs: Vec<QVec> = vals[1..].iter().map(|v| sub(v, &vals[0])).collect();
        let map = AffineMap::from_values(total.ambient_dim(), &pts[0], &vals[0], &dirs, &imgs);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        for _ in 0..3 {
            let Some(p) = pull_into(&random_point(cell, &mut rng), &pts[0], inside) else { continue };
            if transport_point(fam, fam2, &p)? != map.apply(&p) {
                return Err(Error::NonAffine(format!("the fibre isomorphism is not affine at {}", fmt_vec(&p))));
            }
        }
        Ok(map)
    });
    PLMap::new(total.clone(), fam2.total().ambient_dim(), pieces.into_iter().collect::<Result<_>>()?)
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub map: PLMap,
    pub inverse: PLMap,
    /// `psi_* T = T'` with weights.
    pub image_matches: bool,
    /// Both composites fix one point of every face.
    pub inverse_ok: bool,
    /// `g' o psi = g` at one point of every face.
    pub over_base: bool,
    pub pseudo_both_ways: bool,
    pub integral_both_ways: bool,
}

impl EquivalenceReport {
    pub fn is_isomorphism(&self) -> bool {
        self.image_matches && self.inverse_ok && self.over_base && self.pseudo_both_ways && self.integral_both_ways
    }
}

pub fn check_equivalence(fam: &Family, fam2: &Family, seed: u64) -> Result<EquivalenceReport> {
    let map = equivalence_map(fam, fam2, seed)?;
    let inverse = equivalence_map(fam2, fam, seed)?;
    let image = push_forward_pl(&map, fam.total().dim())?;
    let image_matches = equal_mod_refinement(&image, fam2.total());
    let fixes = |f: &PLMap, h: &PLMap| -> bool {
        face_points(&f.source).iter().all(|p| f.eval(p).and_then(|q| h.eval(&q)).is_ok_and(|r| r == *p))
    };
    let inverse_ok = fixes(&map, &inverse) && fixes(&inverse, &map);
    let over_base = face_points(fam.total()).iter().all(|p| map.eval(p).and_then(|q| fam2.g.eval(&q)).ok() == fam.g.eval(p).ok());
    let pseudo_both_ways = is_pseudomorphism(&map).passed() && is_pseudomorphism(&inverse).passed();
    let integral_both_ways = map.is_integral() && inverse.is_integral();
    Ok(EquivalenceReport { map, inverse, image_matches, inverse_ok, over_base, pseudo_both_ways, integral_both_ways })
}

/// Where a bounded edge of the first fibre goes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeImage {
    /// An edge with the same split; `reversed` when the orientations disagree.
    Edge { edge: usize, reversed: bool },
    /// The edge is contracted to this vertex.
    Vertex(usize),
}

#[derive(Clone, Debug)]
pub struct Transport {
    pub from: FibreCurve,
    pub to: FibreCurve,
    /// Image leaf of each leaf of `from`.
    pub leaves: Vec<usize>,
    pub edges: Vec<EdgeImage>,
}

impl Transport {
    pub fn is_homeomorphism(&self) -> bool {
        self.from.edges.len() == self.to.edges.len() && self.edges.iter().all(|e| matches!(e, EdgeImage::Edge { .. }))
    }
}

/// The map `t_{b', b}` from the fibre over `b_from` to the fibre over `b_to`, for `b_from` in
/// the relative interior of a cell containing `b_to`.
pub fn fibre_transport(fam: &Family, b_from: &[Rat], b_to: &[Rat]) -> Result<Transport> {
    let base = &fam.base;
    let Some(&i) = base.cells_containing(b_from).first() else {
        return Err(Error::NotInSupport(format!("{} is not in the base", fmt_vec(b_from))));
    };
    let tau = minimal_face(&base.cells()[i], b_from);
    if !tau.contains(b_to) {
        return Err(Error::Invalid(format!("{} and {} do not lie in a common cell", fmt_vec(b_from), fmt_vec(b_to))));
    }
    let m1 = Marked::over(fam, b_from)?;
    let m2 = Marked::over(fam, b_to)?;
    let leaves = m1.mark_of.iter().map(|&i| m2.leaf_of(i)).collect();
    let edges = (0..m1.curve.edges.len())
        .map(|e| {
            let (s, first) = m1.split(e);
            if let Some((e2, first2)) = m2.edge_with(s) {
                return Ok(EdgeImage::Edge { edge: e2, reversed: first != first2 });
            }
            // The vertex of the target where the two sides of `s` meet.
            (0..m2.curve.vertices.len())
                .find(|&v| {
                    let sig = m2.curve.vertex_signature(v);
                    (0..m2.curve.edges.len()).all(|f| {
                        let side = m2.side(f);
                        let far = if sig[f] { m2.full() & !side } else { side };
                        far & s == far || far & s == 0
                    })
                })
                .map(EdgeImage::Vertex)
                .ok_or_else(|| Error::Family(format!("no image for the edge with split {s:#b}")))
        })
        .collect::<Result<_>>()?;
    Ok(Transport { from: m1.curve, to: m2.curve, leaves, edges })
}
