//! Coordinates on the space of pairwise leaf distances.
//!
//! Raw coordinates live in `R^{C(n,2)}`, indexed by pairs of labels, modulo the image of
//! `phi(x)_{ij} = x_i + x_j`. Computations use a chart on the pairs avoiding the last label:
//! `a_ij = (b_ij - b_in - b_jn) / 2`. In the chart `Im(phi)` becomes the all-ones line and the
//! split vectors are `v_I = -sum_{ij in I} e_ij` for `I` avoiding the last label, so the lattice
//! they generate is the standard one.

use num_traits::Zero;

use crate::arith::rat::{rat, ratio, QVec, Rat};
use crate::error::{Error, Result};

/// A split, stored as the bitmask (over label positions) of the side avoiding the last label.
pub type Split = u64;

pub fn compatible(a: Split, b: Split) -> bool {
    let m = a & b;
    m == 0 || m == a || m == b
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuliChart {
    labels: Vec<usize>,
}

impl ModuliChart {
    /// Labels in chart order; the last one is the normalizing label.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if labels.len() < 3 {
            return Err(Error::Invalid(format!("need at least 3 markings, got {}", labels.len())));
        }
        if labels.len() > 63 {
            return Err(Error::Invalid("at most 63 markings are supported".into()));
        }
        let mut s = labels.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != labels.len() {
            return Err(Error::Invalid("markings must be distinct".into()));
        }
        Ok(ModuliChart { labels })
    }

    /// Markings `1..=n`.
    pub fn standard(n: usize) -> Result<Self> {
        ModuliChart::new((1..=n).collect())
    }

    /// Markings `0..=n`, the source of the forgetful map to `standard(n)`.
    pub fn with_zero(n: usize) -> Result<Self> {
        ModuliChart::new((0..=n).collect())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn position(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    fn pos(&self, label: usize) -> Result<usize> {
        self.position(label).ok_or_else(|| Error::Invalid(format!("unknown marking {label}")))
    }

    pub fn normalizer(&self) -> usize {
        *self.labels.last().expect("nonempty")
    }

    fn full(&self) -> u64 {
        (1u64 << self.n()) - 1
    }

    /// Chart dimension `C(n-1, 2)`.
    pub fn dim(&self) -> usize {
        let m = self.n() - 1;
        m * (m - 1) / 2
    }

    pub fn raw_dim(&self) -> usize {
        self.n() * (self.n() - 1) / 2
    }

    /// Position pairs `(i, j)`, `i < j < n - 1`, in chart order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let m = self.n() - 1;
        (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
    }

    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let m = self.n() - 1;
        debug_assert!(j < m);
        i * (2 * m - i - 1) / 2 + (j - i - 1)
    }

    /// Label pairs in chart order.
    pub fn label_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs().into_iter().map(|(i, j)| (self.labels[i], self.labels[j])).collect()
    }

    pub fn lineality(&self) -> QVec {
        vec![rat(1); self.dim()]
    }

    pub fn normalize(&self, mask: u64) -> Split {
        let last = 1u64 << (self.n() - 1);
        if mask & last != 0 {
            self.full() & !mask
        } else {
            mask
        }
    }

    pub fn is_valid_split(&self, s: Split) -> bool {
        let k = s.count_ones() as usize;
        s & !self.full() == 0 && s == self.normalize(s) && k >= 2 && k + 2 <= self.n()
    }

    pub fn split_of_labels(&self, side: &[usize]) -> Result<Split> {
        let mut m = 0u64;
        for &l in side {
            m |= 1 << self.pos(l)?;
        }
        let s = self.normalize(m);
        if self.is_valid_split(s) {
            Ok(s)
        } else {
            Err(Error::Invalid(format!("{side:?} does not define a split of {} markings", self.n())))
        }
    }

    pub fn split_labels(&self, s: Split) -> Vec<usize> {
        (0..self.n()).filter(|&i| s >> i & 1 == 1).map(|i| self.labels[i]).collect()
    }

    /// All splits in increasing mask order.
    pub fn all_splits(&self) -> Vec<Split> {
        let last = 1u64 << (self.n() - 1);
        (1..last).filter(|&s| self.is_valid_split(s)).collect()
    }

    /// `v_I` in chart coordinates; `I` may be either side.
    pub fn split_vector(&self, mask: u64) -> QVec {
        let s = self.normalize(mask);
        let mut v = vec![Rat::zero(); self.dim()];
        for (k, (i, j)) in self.pairs().into_iter().enumerate() {
            if s >> i & 1 == 1 && s >> j & 1 == 1 {
                v[k] = rat(-1);
            }
        }
        v
    }

    /// Position pairs `(i, j)`, `i < j`, in raw order.
    pub fn raw_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    }

    /// Pairwise distances of the one-edge tree with split `mask`.
    pub fn raw_split_vector(&self, mask: u64) -> QVec {
        self.raw_pairs().into_iter().map(|(i, j)| if (mask >> i & 1) != (mask >> j & 1) { rat(1) } else { Rat::zero() }).collect()
    }

    pub fn phi(&self, x: &[Rat]) -> QVec {
        self.raw_pairs().into_iter().map(|(i, j)| &x[i] + &x[j]).collect()
    }

    pub fn raw_to_chart(&self, b: &[Rat]) -> QVec {
        let last = self.n() - 1;
        let rp = self.raw_pairs();
        let idx = |i: usize, j: usize| rp.iter().position(|&p| p == (i.min(j), i.max(j))).expect("pair");
        let half = ratio(1, 2);
        self.pairs().into_iter().map(|(i, j)| (&b[idx(i, j)] - &b[idx(i, last)] - &b[idx(j, last)]) * &half).collect()
    }

    /// The raw representative whose entries at pairs with the last label vanish.
    pub fn chart_to_raw(&self, a: &[Rat]) -> QVec {
        let last = self.n() - 1;
        self.raw_pairs()
            .into_iter()
            .map(|(i, j)| if j == last { Rat::zero() } else { &a[self.pair_index(i, j)] * rat(2) })
            .collect()
    }

    /// Representative with vanishing first coordinate.
    pub fn canonical(&self, a: &[Rat]) -> QVec {
        let c = a[0].clone();
        a.iter().map(|x| x - &c).collect()
    }

    pub fn equal_mod_lineality(&self, a: &[Rat], b: &[Rat]) -> bool {
        self.canonical(a) == self.canonical(b)
    }
}

/// A point of `Q_n` given by raw pairwise distances.
#[derive(Clone, Debug)]
pub struct ModuliPoint {
    pub chart: ModuliChart,
    pub raw: QVec,
}

impl ModuliPoint {
    pub fn from_chart(chart: &ModuliChart, a: &[Rat]) -> Self {
        ModuliPoint { chart: chart.clone(), raw: chart.chart_to_raw(a) }
    }

    pub fn to_chart(&self) -> QVec {
        self.chart.raw_to_chart(&self.raw)
    }
}

impl PartialEq for ModuliPoint {
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart && self.chart.equal_mod_lineality(&self.to_chart(), &other.to_chart())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::int_vec;

    #[test]
    fn split_counts() {
        for n in 4..=7 {
            let c = ModuliChart::standard(n).unwrap();
            assert_eq!(c.all_splits().len(), (1 << (n - 1)) - n - 1);
        }
    }

    #[test]
    fn raw_and_chart_agree_on_splits() {
        let c = ModuliChart::standard(5).unwrap();
        for s in c.all_splits() {
            assert_eq!(c.raw_to_chart(&c.raw_split_vector(s)), c.split_vector(s));
            let back = c.chart_to_raw(&c.split_vector(s));
            assert_eq!(c.raw_to_chart(&back), c.split_vector(s));
        }
    }

    #[test]
    fn image_of_phi_is_the_lineality() {
        let c = ModuliChart::standard(5).unwrap();
        let x = int_vec(&[3, -1, 4, 1, 5]);
        let a = c.raw_to_chart(&c.phi(&x));
        assert!(c.equal_mod_lineality(&a, &vec![Rat::zero(); c.dim()]));
    }

    #[test]
    fn four_markings_rays_sum_to_zero() {
        let c = ModuliChart::standard(4).unwrap();
        let v: QVec = ["12", "13", "14"]
            .iter()
            .map(|p| {
                let ls: Vec<usize> = p.chars().map(|ch| ch.to_digit(10).unwrap() as usize).collect();
                c.split_vector(c.split_of_labels(&ls).unwrap())
            })
            .fold(vec![Rat::zero(); 3], |acc, v| crate::arith::rat::add(&acc, &v));
        assert!(c.equal_mod_lineality(&v, &[Rat::zero(), Rat::zero(), Rat::zero()]));
    }
}
