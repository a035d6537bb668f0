//! Moduli fans with the lineality divided out.
//!
//! A chart point `a` is sent to `(a_k - a_0)_{k >= 1}`, which identifies `Z^d / Z(1, ..., 1)`
//! with `Z^{d-1}`. Fibre products and families are built in these coordinates, where equality
//! of points is plain equality.

use super::chart::ModuliChart;
use super::fan::{forgetful_fibre_in, forgetful_linear, moduli_fan_in};
use super::marking::MarkingSection;
use crate::arith::linalg::independent_subset;
use crate::arith::rat::{is_zero_vec, unit_vec, QVec, Rat};
use crate::error::{Error, Result};
use crate::intersection::SmoothChart;
use crate::polyhedral::{AffineMap, Cell, PLMap, WeightedComplex};

/// `R^d -> R^{d-1}`, `a -> (a_k - a_0)_{k >= 1}`.
pub fn quotient_map(chart: &ModuliChart) -> AffineMap {
    let d = chart.dim();
    let rows = (1..d)
        .map(|k| {
            let mut r = unit_vec(d, k);
            r[0] = Rat::from_integer((-1).into());
            r
        })
        .collect();
    AffineMap::linear(d, rows).expect("quotient rows")
}

/// The representative with `a_0 = 0`.
pub fn section_map(chart: &ModuliChart) -> AffineMap {
    let d = chart.dim();
    let mut rows = vec![vec![Rat::from_integer(0.into()); d - 1]];
    rows.extend((0..d - 1).map(|k| unit_vec(d - 1, k)));
    AffineMap::linear(d - 1, rows).expect("section rows")
}

/// A chart-level map that respects the linealities, in quotient coordinates.
pub fn descend(source: &ModuliChart, target: &ModuliChart, m: &AffineMap) -> AffineMap {
    quotient_map(target).compose(&m.compose(&section_map(source)))
}

pub fn quotient_point(chart: &ModuliChart, a: &[Rat]) -> QVec {
    quotient_map(chart).apply(a)
}

pub fn lift_point(chart: &ModuliChart, r: &[Rat]) -> QVec {
    section_map(chart).apply(r)
}

/// Image of a complex whose lineality contains the all-ones line.
pub fn quotient_complex(chart: &ModuliChart, x: &WeightedComplex) -> Result<WeightedComplex> {
    let q = quotient_map(chart);
    let d = chart.dim() - 1;
    let push = |vs: &[QVec]| -> Vec<QVec> { vs.iter().map(|v| q.apply_linear(v)).collect() };
    let lin: Vec<QVec> = independent_subset(&push(x.lineality()).into_iter().filter(|v| !is_zero_vec(v)).collect::<Vec<_>>(), d);
    let cells = x
        .weighted_cells()
        .map(|(c, w)| {
            let l: Vec<QVec> = push(c.lineality()).into_iter().filter(|v| !is_zero_vec(v)).collect();
            let verts = c.vertices().iter().map(|v| q.apply(v)).collect();
            Ok((Cell::new(d, verts, push(c.rays()), l)?, w))
        })
        .collect::<Result<Vec<_>>>()?;
    WeightedComplex::new(d, x.dim() - 1, lin, cells)
}

/// `M_n / L`: a pure fan of dimension `n - 3`.
pub fn quotient_fan(chart: &ModuliChart) -> WeightedComplex {
    quotient_complex(chart, &moduli_fan_in(chart)).expect("moduli fan descends")
}

/// Cutting functions for points of `M_n / L`, seen as `B(K_{n-1}) / L` with the first edge
/// normalized to zero.
pub fn quotient_smooth_chart(chart: &ModuliChart) -> SmoothChart {
    SmoothChart::bergman_mod_lineality(chart.dim() - 1, chart.n() - 2)
}

pub fn quotient_forgetful_linear(source: &ModuliChart, target: &ModuliChart) -> Result<AffineMap> {
    Ok(descend(source, target, &forgetful_linear(source, target)?))
}

/// The forgetful map between quotient fans.
pub fn quotient_forgetful(source: &ModuliChart, target: &ModuliChart) -> Result<PLMap> {
    PLMap::global(quotient_fan(source), quotient_forgetful_linear(source, target)?)
}

/// The fibre curve over a point of `M_n / L`, as a one-dimensional complex.
pub fn quotient_forgetful_fibre(source: &ModuliChart, target: &ModuliChart, extra: usize, p: &[Rat]) -> Result<WeightedComplex> {
    let f = forgetful_fibre_in(source, target, extra, &lift_point(target, p))?;
    quotient_complex(source, &f)
}

/// The chart-level map renaming each marking `k` of `source` to `sigma(k)` in `target`.
pub fn relabel_linear(source: &ModuliChart, target: &ModuliChart, sigma: &dyn Fn(usize) -> usize) -> Result<AffineMap> {
    let mut back = vec![0usize; target.n()];
    let mut hit = vec![false; target.n()];
    for (k, &l) in source.labels().iter().enumerate() {
        let p = target.position(sigma(l)).ok_or_else(|| Error::Invalid(format!("marking {l} is sent outside the target")))?;
        if std::mem::replace(&mut hit[p], true) {
            return Err(Error::Invalid("the relabeling is not a bijection".into()));
        }
        back[p] = k;
    }
    if source.n() != target.n() {
        return Err(Error::Invalid("the charts have different numbers of markings".into()));
    }
    let src_pairs = source.raw_pairs();
    let cols: Vec<QVec> = (0..source.dim())
        .map(|k| {
            let raw = source.chart_to_raw(&unit_vec(source.dim(), k));
            let moved: QVec = target
                .raw_pairs()
                .into_iter()
                .map(|(p, q)| {
                    let (a, b) = (back[p].min(back[q]), back[p].max(back[q]));
                    raw[src_pairs.iter().position(|&x| x == (a, b)).expect("pair")].clone()
                })
                .collect();
            target.raw_to_chart(&moved)
        })
        .collect();
    let rows = (0..target.dim()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    AffineMap::linear(source.dim(), rows)
}

/// A relabeling in quotient coordinates.
pub fn quotient_relabel(source: &ModuliChart, target: &ModuliChart, sigma: &dyn Fn(usize) -> usize) -> Result<AffineMap> {
    Ok(descend(source, target, &relabel_linear(source, target, sigma)?))
}

/// A marking section in quotient coordinates.
pub fn quotient_section(s: &MarkingSection) -> AffineMap {
    descend(&s.source, &s.target, &s.map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::rat;
    use crate::intersection::point_fibre;
    use crate::polyhedral::ops::equal_mod_refinement;

    #[test]
    fn quotient_fans_are_balanced_without_lineality() {
        for n in 4..=5 {
            let c = ModuliChart::standard(n).unwrap();
            let m = quotient_fan(&c);
            assert_eq!(m.lineality_dim(), 0);
            assert_eq!(m.dim(), n - 3);
            assert!(m.is_balanced());
        }
    }

    #[test]
    fn forgetful_fibre_matches_point_fibre() {
        let s = ModuliChart::with_zero(4).unwrap();
        let t = ModuliChart::standard(4).unwrap();
        let ft = quotient_forgetful(&s, &t).unwrap();
        let base = quotient_fan(&t);
        for p in [vec![rat(0), rat(0)], vec![rat(2), rat(2)], vec![rat(0), rat(-3)]] {
            let mine = quotient_forgetful_fibre(&s, &t, 0, &p).unwrap();
            let cut = point_fibre(&ft, &base, &quotient_smooth_chart(&t), &p).unwrap();
            assert!(equal_mod_refinement(&mine, &cut), "{p:?}");
        }
    }

    #[test]
    fn relabeling_permutes_rays() {
        let c = ModuliChart::standard(5).unwrap();
        let swap = |l: usize| match l {
            1 => 4,
            4 => 1,
            l => l,
        };
        let m = relabel_linear(&c, &c, &swap).unwrap();
        let v = c.split_vector(c.split_of_labels(&[1, 2]).unwrap());
        let w = c.split_vector(c.split_of_labels(&[4, 2]).unwrap());
        assert!(c.equal_mod_lineality(&m.apply(&v), &w));
        let q = quotient_relabel(&c, &c, &swap).unwrap();
        let fan = quotient_fan(&c);
        assert!(equal_mod_refinement(&crate::polyhedral::ops::push_forward(&fan, &q).unwrap(), &fan));
    }
}
