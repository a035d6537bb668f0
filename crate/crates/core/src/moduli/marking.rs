//! The basis of two-element splits avoiding a marking, and the marking sections of the
//! forgetful map.

use num_traits::{Signed, Zero};

use super::chart::ModuliChart;
use super::tree::MarkedTree;
use crate::arith::linalg::rank;
use crate::arith::rat::{add, fmt_rat, fmt_vec, rat, scale, zero_vec, QVec, Rat};
use crate::error::{Error, Result};
use crate::polyhedral::AffineMap;

/// The smallest pair of markings avoiding `k`, in chart order.
pub fn default_i0(chart: &ModuliChart, k: usize) -> (usize, usize) {
    let ls: Vec<usize> = chart.labels().iter().copied().filter(|&l| l != k).collect();
    (ls[0], ls[1])
}

/// `V_k = {v_I : |I| = 2, k not in I}` without `v_{I0}`, a basis of `Q_n`.
#[derive(Clone, Debug)]
pub struct SplitBasis {
    pub chart: ModuliChart,
    pub k: usize,
    pub i0: (usize, usize),
    pub pairs: Vec<(usize, usize)>,
}

pub fn split_basis(chart: &ModuliChart, k: usize, i0: (usize, usize)) -> Result<SplitBasis> {
    let pos = |l: usize| chart.position(l).ok_or_else(|| Error::Invalid(format!("unknown marking {l}")));
    pos(k)?;
    if i0.0 == i0.1 || i0.0 == k || i0.1 == k {
        return Err(Error::Invalid(format!("pair {{{}, {}}} is not a valid choice avoiding {k}", i0.0, i0.1)));
    }
    pos(i0.0)?;
    pos(i0.1)?;
    if chart.n() < 4 {
        return Err(Error::Invalid("the split basis needs at least 4 markings".into()));
    }
    let same = |a: (usize, usize), b: (usize, usize)| a == b || (a.1, a.0) == b;
    let ls = chart.labels();
    let mut pairs = Vec::new();
    for (x, &a) in ls.iter().enumerate() {
        for &b in &ls[x + 1..] {
            if a != k && b != k && !same((a, b), i0) {
                pairs.push((a, b));
            }
        }
    }
    Ok(SplitBasis { chart: chart.clone(), k, i0, pairs })
}

impl SplitBasis {
    pub fn vector(&self, pair: (usize, usize)) -> QVec {
        let s = self.pair_split(pair);
        self.chart.split_vector(s)
    }

    fn pair_split(&self, (a, b): (usize, usize)) -> u64 {
        let p = |l: usize| self.chart.position(l).expect("marking");
        (1u64 << p(a)) | (1u64 << p(b))
    }

    /// Coefficients of `v_I`, `k` not in `I`, in the basis: the pairs inside `I` when `I0` is
    /// not inside `I`, and minus the pairs not inside `I` otherwise.
    pub fn expand(&self, side: &[usize]) -> Result<Vec<((usize, usize), i64)>> {
        if side.contains(&self.k) {
            return Err(Error::Invalid(format!("the side {side:?} contains {}", self.k)));
        }
        self.chart.split_of_labels(side)?;
        let inside = |(a, b): (usize, usize)| side.contains(&a) && side.contains(&b);
        if !inside(self.i0) {
            Ok(self.pairs.iter().filter(|&&p| inside(p)).map(|&p| (p, 1)).collect())
        } else {
            Ok(self.pairs.iter().filter(|&&p| !inside(p)).map(|&p| (p, -1)).collect())
        }
    }

    /// Checks `v_I` against its expansion modulo the lineality.
    pub fn verify_expansion(&self, side: &[usize]) -> Result<bool> {
        let v = self.chart.split_vector(self.chart.split_of_labels(side)?);
        let e = self
            .expand(side)?
            .into_iter()
            .fold(zero_vec(self.chart.dim()), |acc, (p, c)| add(&acc, &scale(&rat(c), &self.vector(p))));
        Ok(self.chart.equal_mod_lineality(&v, &e))
    }

    pub fn is_basis(&self) -> bool {
        let mut rows: Vec<QVec> = self.pairs.iter().map(|&p| self.vector(p)).collect();
        rows.push(self.chart.lineality());
        rows.len() == self.chart.dim() && rank(&rows, self.chart.dim()) == rows.len()
    }
}

/// `s_i^alpha(v) = alpha v_{0,i} + A_i(v)` on `U_alpha`, where `A_i` sends each `v_J` of the
/// basis avoiding `i` to the same split with marking 0 added on the far side.
#[derive(Clone, Debug)]
pub struct MarkingSection {
    pub source: ModuliChart,
    pub target: ModuliChart,
    pub extra: usize,
    pub mark: usize,
    pub alpha: Rat,
    pub map: AffineMap,
}

/// The split of `total` with the given side; the extra marking ends up on the other side.
fn lift(total: &ModuliChart, side: &[usize]) -> u64 {
    total.normalize(side.iter().fold(0u64, |m, &l| m | 1 << total.position(l).expect("marking")))
}

/// The section for the forgetful map from the moduli fan of `total` (markings of `base` plus
/// `extra`) to that of `base`.
pub fn marking_section_in(
    total: &ModuliChart,
    base: &ModuliChart,
    extra: usize,
    mark: usize,
    alpha: Rat,
) -> Result<MarkingSection> {
    if !alpha.is_positive() {
        return Err(Error::Invalid(format!("alpha = {} must be positive", fmt_rat(&alpha))));
    }
    if base.position(mark).is_none() {
        return Err(Error::Invalid(format!("unknown marking {mark}")));
    }
    let basis = split_basis(base, mark, default_i0(base, mark))?;
    let mut dirs = Vec::new();
    let mut images = Vec::new();
    for &p in &basis.pairs {
        dirs.push(basis.vector(p));
        images.push(total.split_vector(lift(total, &[p.0, p.1])));
    }
    dirs.push(base.lineality());
    images.push(total.lineality());
    let ex = total.position(extra).ok_or_else(|| Error::Invalid(format!("unknown marking {extra}")))?;
    let mk = total.position(mark).expect("marking in both charts");
    let offset = scale(&alpha, &total.split_vector((1 << ex) | (1 << mk)));
    let map = AffineMap::from_values(base.dim(), &zero_vec(base.dim()), &offset, &dirs, &images);
    Ok(MarkingSection { source: base.clone(), target: total.clone(), extra, mark, alpha, map })
}

/// `s_i^alpha: U_alpha -> M_{n+1}` for the markings `0..=n` over `1..=n`.
pub fn marking_section(n: usize, mark: usize, alpha: Rat) -> Result<MarkingSection> {
    marking_section_in(&ModuliChart::with_zero(n)?, &ModuliChart::standard(n)?, 0, mark, alpha)
}

impl MarkingSection {
    /// Whether `b = sum lambda_I v_I` with `sum lambda_I < alpha`.
    pub fn in_domain(&self, b: &[Rat]) -> bool {
        MarkedTree::from_chart_point(&self.source, b)
            .map(|t| t.splits().values().fold(Rat::zero(), |a, l| a + l) < self.alpha)
            .unwrap_or(false)
    }

    pub fn apply(&self, b: &[Rat]) -> Result<QVec> {
        if !self.in_domain(b) {
            return Err(Error::OutsideDomain(format!("{} is not in U_{}", fmt_vec(b), fmt_rat(&self.alpha))));
        }
        Ok(self.map.apply(b))
    }

    /// The section as an affine map with the same linear part and a different `alpha`.
    pub fn with_alpha(&self, alpha: Rat) -> Result<MarkingSection> {
        marking_section_in(&self.target, &self.source, self.extra, self.mark, alpha)
    }

    /// `v_{0,i}`, the direction of the leaf this section marks.
    pub fn leaf_direction(&self) -> QVec {
        let ex = self.target.position(self.extra).expect("extra");
        let mk = self.target.position(self.mark).expect("mark");
        self.target.split_vector((1 << ex) | (1 << mk))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::ratio;
    use crate::moduli::fan::forgetful_fibre;

    #[test]
    fn basis_expansions_hold() {
        for n in 4..=6 {
            let c = ModuliChart::standard(n).unwrap();
            for k in 1..=n {
                let b = split_basis(&c, k, default_i0(&c, k)).unwrap();
                assert!(b.is_basis());
                for s in c.all_splits() {
                    let mut side = c.split_labels(s);
                    if side.contains(&k) {
                        side = c.labels().iter().copied().filter(|l| !side.contains(l)).collect();
                    }
                    assert!(b.verify_expansion(&side).unwrap(), "n={n} k={k} side={side:?}");
                }
            }
        }
    }

    #[test]
    fn bad_i0_rejected() {
        let c = ModuliChart::standard(4).unwrap();
        assert!(split_basis(&c, 4, (1, 4)).is_err());
        assert!(split_basis(&c, 4, (2, 2)).is_err());
    }

    #[test]
    fn section_at_origin_and_on_a_ray() {
        let s = marking_section(4, 3, ratio(7, 2)).unwrap();
        let c = &s.source;
        let t = &s.target;
        let zero = zero_vec(c.dim());
        let v03 = t.split_vector(t.split_of_labels(&[0, 3]).unwrap());
        assert_eq!(s.apply(&zero).unwrap(), scale(&ratio(7, 2), &v03));
        // I0(3) = {1, 2} lies inside I = {1, 2}.
        let lam = rat(1);
        let v = scale(&lam, &c.split_vector(c.split_of_labels(&[1, 2]).unwrap()));
        let expect = add(&scale(&(ratio(7, 2) - &lam), &v03), &scale(&lam, &t.split_vector(t.split_of_labels(&[1, 2]).unwrap())));
        assert!(t.equal_mod_lineality(&s.apply(&v).unwrap(), &expect));
        assert!(s.apply(&scale(&rat(4), &v)).is_err());
    }

    #[test]
    fn section_lands_on_its_leaf() {
        let s = marking_section(4, 2, rat(1)).unwrap();
        let c = &s.source;
        let b = scale(&ratio(1, 3), &c.split_vector(c.split_of_labels(&[1, 3]).unwrap()));
        let img = s.apply(&b).unwrap();
        let fib = forgetful_fibre(4, &b).unwrap();
        let cells = fib.cells_containing(&img);
        assert_eq!(cells.len(), 1);
        let cell = &fib.cells()[cells[0]];
        assert!(cell.in_relint(&img));
        assert_eq!(cell.rays().len(), 1);
        assert!(cell.contains_direction(&s.leaf_direction()));
    }
}
