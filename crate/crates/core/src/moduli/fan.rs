//! The moduli fan, its identification with a graphic Bergman fan, and the forgetful map.

use super::chart::{compatible, ModuliChart, Split};
use super::tree::MarkedTree;
use crate::arith::rat::{add, scale, zero_vec, QVec, Rat};
use crate::error::{Error, Result};
use crate::intersection::SmoothChart;
use crate::matroid::{bergman_fan, Matroid};
use crate::par::par_map;
use crate::polyhedral::ops::equal_mod_refinement;
use crate::polyhedral::{AffineMap, Cell, PLMap, WeightedComplex};

/// Sets of `n - 3` pairwise compatible splits, i.e. the trivalent tree topologies.
pub fn maximal_split_systems(chart: &ModuliChart) -> Vec<Vec<Split>> {
    let splits = chart.all_splits();
    let k = chart.n() - 3;
    if k == 0 {
        return vec![Vec::new()];
    }
    let firsts: Vec<usize> = (0..splits.len()).collect();
    let per_first = par_map(&firsts, |&i| {
        let mut out = Vec::new();
        let mut chosen = vec![splits[i]];
        extend_systems(&splits, i + 1, k, &mut chosen, &mut out);
        out
    });
    per_first.into_iter().flatten().collect()
}

fn extend_systems(splits: &[Split], from: usize, k: usize, chosen: &mut Vec<Split>, out: &mut Vec<Vec<Split>>) {
    if chosen.len() == k {
        out.push(chosen.clone());
        return;
    }
    for j in from..splits.len() {
        if chosen.iter().all(|&c| compatible(c, splits[j])) {
            chosen.push(splits[j]);
            extend_systems(splits, j + 1, k, chosen, out);
            chosen.pop();
        }
    }
}

/// `M_n` in the chart of `chart`: one cone per trivalent topology, weights 1.
pub fn moduli_fan_in(chart: &ModuliChart) -> WeightedComplex {
    let dim = chart.dim();
    let lin = vec![chart.lineality()];
    let systems = maximal_split_systems(chart);
    let cells = par_map(&systems, |sys| {
        let rays = sys.iter().map(|&s| chart.split_vector(s)).collect();
        (Cell::cone(dim, rays, lin.clone()).expect("split cone"), 1)
    });
    WeightedComplex::new(dim, chart.n() - 2, lin, cells).expect("cones of one dimension")
}

/// `M_n` with markings `1..=n`.
pub fn moduli_fan(n: usize) -> Result<WeightedComplex> {
    Ok(moduli_fan_in(&ModuliChart::standard(n)?))
}

/// Cutting functions for points of `M_n`, from its identification with `B(K_{n-1})`.
pub fn moduli_smooth_chart(chart: &ModuliChart) -> SmoothChart {
    SmoothChart::bergman(chart.dim(), chart.n() - 2)
}

/// The identification of `B(M(K_{n-1}))` (modulo its lineality) with `M_n`.
pub struct KnIsomorphism {
    pub forward: PLMap,
    pub inverse: PLMap,
}

/// In the chart, the edge `ij` of `K_{n-1}` is the coordinate of the pair `ij`, so the map
/// is the identity matrix; the content is that the two fans have equal supports and weights.
pub fn kn_isomorphism(n: usize) -> Result<KnIsomorphism> {
    if n < 4 {
        return Err(Error::Invalid("the identification needs at least 4 markings".into()));
    }
    let chart = ModuliChart::standard(n)?;
    let b = bergman_fan(&Matroid::complete_graph(n - 1)?);
    let m = moduli_fan_in(&chart);
    if !equal_mod_refinement(&b, &m) {
        return Err(Error::Invalid(format!("B(K_{}) and M_{n} differ", n - 1)));
    }
    let id = AffineMap::identity(chart.dim());
    Ok(KnIsomorphism { forward: PLMap::global(b, id.clone())?, inverse: PLMap::global(m, id)? })
}

/// Indices in `source` of the chart coordinates of `target`.
fn projection_coords(source: &ModuliChart, target: &ModuliChart) -> Result<Vec<usize>> {
    if source.normalizer() != target.normalizer() {
        return Err(Error::Invalid("forgetful charts must share the normalizing marking".into()));
    }
    target
        .label_pairs()
        .into_iter()
        .map(|(a, b)| {
            let i = source.position(a).ok_or_else(|| Error::Invalid(format!("marking {a} missing")))?;
            let j = source.position(b).ok_or_else(|| Error::Invalid(format!("marking {b} missing")))?;
            Ok(source.pair_index(i, j))
        })
        .collect()
}

/// The linear map forgetting the markings of `source` absent from `target`.
pub fn forgetful_linear(source: &ModuliChart, target: &ModuliChart) -> Result<AffineMap> {
    Ok(AffineMap::projection(source.dim(), &projection_coords(source, target)?))
}

/// `ft: M_{n+1} -> M_n`, forgetting marking 0.
pub fn forgetful(n: usize) -> Result<PLMap> {
    let source = ModuliChart::with_zero(n)?;
    let target = ModuliChart::standard(n)?;
    PLMap::global(moduli_fan_in(&source), forgetful_linear(&source, &target)?)
}

/// The split of `source` induced by a split of `target`, with the extra marking put on the
/// side `inside` says.
fn lift_split(source: &ModuliChart, target: &ModuliChart, s: Split, extra: usize, inside: bool) -> Split {
    let mut m = 0u64;
    for l in target.split_labels(s) {
        m |= 1 << source.position(l).expect("marking present");
    }
    if inside {
        m |= 1 << source.position(extra).expect("extra marking");
    }
    source.normalize(m)
}

/// Source chart point of the tree `t` with the extra marking attached at the vertex `v`,
/// a vertex being named by its clade (the side avoiding the normalizer).
fn attach_at(source: &ModuliChart, t: &MarkedTree, extra: usize, v: u64) -> QVec {
    t.splits().iter().fold(zero_vec(source.dim()), |acc, (&s, len)| {
        let lifted = lift_split(source, t.chart(), s, extra, v & s == v);
        add(&acc, &scale(len, &source.split_vector(lifted)))
    })
}

/// The curve `ft^{-1}(p)` inside the moduli fan of `source`, where `source` has the markings of
/// `target` plus `extra`. Each vertex of the tree of `p` gives a vertex of the curve, each
/// bounded edge a segment and each leaf `i` a ray in direction `v_{extra, i}`.
pub fn forgetful_fibre_in(source: &ModuliChart, target: &ModuliChart, extra: usize, p: &[Rat]) -> Result<WeightedComplex> {
    if source.n() != target.n() + 1 || source.position(extra).is_none() {
        return Err(Error::Invalid("source must have exactly one more marking than the target".into()));
    }
    let t = MarkedTree::from_chart_point(target, p)?;
    let n = target.n();
    let root = (1u64 << (n - 1)) - 1;
    let splits: Vec<Split> = t.splits().keys().copied().collect();
    let parent = |c: u64| -> u64 {
        splits.iter().copied().filter(|&s| s != c && s & c == c).min_by_key(|s| s.count_ones()).unwrap_or(root)
    };
    let lin = vec![source.lineality()];
    let mut cells = Vec::new();
    for &s in &splits {
        let a = attach_at(source, &t, extra, s);
        let b = attach_at(source, &t, extra, parent(s));
        cells.push((Cell::new(source.dim(), vec![a, b], vec![], lin.clone())?, 1));
    }
    let ex = source.position(extra).expect("extra marking");
    for (i, &label) in target.labels().iter().enumerate() {
        let v = if i == n - 1 { root } else { parent(1 << i) };
        let base = attach_at(source, &t, extra, v);
        let dir = source.split_vector((1 << ex) | (1 << source.position(label).expect("marking")));
        cells.push((Cell::new(source.dim(), vec![base], vec![dir], lin.clone())?, 1));
    }
    WeightedComplex::new(source.dim(), 2, lin, cells)
}

/// `ft^{-1}(p)` for `ft: M_{n+1} -> M_n`.
pub fn forgetful_fibre(n: usize, p: &[Rat]) -> Result<WeightedComplex> {
    forgetful_fibre_in(&ModuliChart::with_zero(n)?, &ModuliChart::standard(n)?, 0, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::rat;
    use crate::intersection::point_fibre;

    #[test]
    fn small_fans() {
        let m3 = moduli_fan(3).unwrap();
        assert_eq!(m3.num_cells(), 1);
        assert_eq!(m3.dim(), 1);
        let m4 = moduli_fan(4).unwrap();
        assert_eq!(m4.num_cells(), 3);
        assert!(m4.is_balanced());
        let m5 = moduli_fan(5).unwrap();
        assert_eq!(m5.num_cells(), 15);
        assert!(m5.is_balanced());
    }

    #[test]
    fn graphic_fan_matches() {
        assert!(kn_isomorphism(4).is_ok());
        assert!(kn_isomorphism(5).is_ok());
    }

    #[test]
    fn forgetful_images_of_rays() {
        let ft = forgetful(4).unwrap();
        let src = ModuliChart::with_zero(4).unwrap();
        let tgt = ModuliChart::standard(4).unwrap();
        let g = ft.is_global().unwrap();
        let v01 = src.split_vector(src.split_of_labels(&[0, 1]).unwrap());
        assert!(g.apply(&v01).iter().all(|x| *x == rat(0)));
        let v12 = src.split_vector(src.split_of_labels(&[1, 2]).unwrap());
        assert_eq!(g.apply(&v12), tgt.split_vector(tgt.split_of_labels(&[1, 2]).unwrap()));
    }

    #[test]
    fn fibre_over_origin_of_m3() {
        let f = forgetful_fibre(3, &[rat(0)]).unwrap();
        assert_eq!(f.num_cells(), 3);
        assert!(f.is_balanced());
        let ft = forgetful(3).unwrap();
        let tgt = moduli_fan(3).unwrap();
        let c = ModuliChart::standard(3).unwrap();
        let pf = point_fibre(&ft, &tgt, &moduli_smooth_chart(&c), &[rat(0)]).unwrap();
        assert!(equal_mod_refinement(&f, &pf));
    }

    #[test]
    fn fibre_over_a_ray_of_m4() {
        let c = ModuliChart::standard(4).unwrap();
        let p = c.split_vector(c.split_of_labels(&[1, 2]).unwrap());
        let f = forgetful_fibre(4, &p).unwrap();
        assert_eq!(f.num_cells(), 5);
        assert!(f.is_balanced());
        let pf = point_fibre(&forgetful(4).unwrap(), &moduli_fan(4).unwrap(), &moduli_smooth_chart(&c), &p).unwrap();
        assert!(equal_mod_refinement(&f, &pf));
    }
}
