//! Metric trees with marked leaves, stored as weighted split systems.
//!
//! Newick input looks like `((1:0,2:0):3/2,(3:0,4:0):0);`. Leaf edge lengths are ignored,
//! zero-length internal edges are contracted, and clades describing the same split from both
//! sides have their lengths added.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::Rng;

use super::chart::{compatible, ModuliChart, Split};
use crate::arith::rat::{add, fmt_rat, fmt_vec, parse_rat, ratio, scale, QVec, Rat};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedTree {
    chart: ModuliChart,
    splits: BTreeMap<Split, Rat>,
}

impl MarkedTree {
    pub fn new(chart: ModuliChart, splits: BTreeMap<Split, Rat>) -> Result<Self> {
        for (&s, len) in &splits {
            if !chart.is_valid_split(s) {
                return Err(Error::Invalid(format!("mask {s:#b} is not a split")));
            }
            if !len.is_positive() {
                return Err(Error::Invalid(format!("edge length {} is not positive", fmt_rat(len))));
            }
        }
        let keys: Vec<Split> = splits.keys().copied().collect();
        for (i, &a) in keys.iter().enumerate() {
            if let Some(&b) = keys[i + 1..].iter().find(|&&b| !compatible(a, b)) {
                return Err(Error::Invalid(format!(
                    "splits {:?} and {:?} cannot both be edges of a tree",
                    chart.split_labels(a),
                    chart.split_labels(b)
                )));
            }
        }
        Ok(MarkedTree { chart, splits })
    }

    pub fn star(chart: ModuliChart) -> Self {
        MarkedTree { chart, splits: BTreeMap::new() }
    }

    pub fn chart(&self) -> &ModuliChart {
        &self.chart
    }

    pub fn splits(&self) -> &BTreeMap<Split, Rat> {
        &self.splits
    }

    pub fn num_bounded_edges(&self) -> usize {
        self.splits.len()
    }

    pub fn is_trivalent(&self) -> bool {
        self.splits.len() + 3 == self.chart.n()
    }

    /// Chart coordinates of the distance vector: `sum_E length(E) v_E`.
    pub fn to_chart_point(&self) -> QVec {
        self.splits
            .iter()
            .fold(vec![Rat::zero(); self.chart.dim()], |acc, (&s, len)| add(&acc, &scale(len, &self.chart.split_vector(s))))
    }

    /// Pairwise leaf distances along bounded edges, in raw pair order.
    pub fn distances(&self) -> QVec {
        let mut d = vec![Rat::zero(); self.chart.raw_dim()];
        for (&s, len) in &self.splits {
            for (k, x) in self.chart.raw_split_vector(s).iter().enumerate() {
                if !x.is_zero() {
                    d[k] += len;
                }
            }
        }
        d
    }

    /// The tree whose distance vector is `a` modulo the lineality.
    pub fn from_chart_point(chart: &ModuliChart, a: &[Rat]) -> Result<Self> {
        if a.len() != chart.dim() {
            return Err(Error::Dimension(format!("point of length {} in a chart of dimension {}", a.len(), chart.dim())));
        }
        let raw = chart.chart_to_raw(a);
        let n = chart.n();
        let rp = chart.raw_pairs();
        let d = |i: usize, j: usize| -> &Rat {
            let k = rp.iter().position(|&p| p == (i.min(j), i.max(j))).expect("pair");
            &raw[k]
        };
        let mut splits = BTreeMap::new();
        for s in chart.all_splits() {
            let inside: Vec<usize> = (0..n).filter(|&i| s >> i & 1 == 1).collect();
            let outside: Vec<usize> = (0..n).filter(|&i| s >> i & 1 == 0).collect();
            // Buneman index: the smallest quartet separation across the split.
            let mut best: Option<Rat> = None;
            for (x, &i) in inside.iter().enumerate() {
                for &i2 in &inside[x + 1..] {
                    for (y, &j) in outside.iter().enumerate() {
                        for &j2 in &outside[y + 1..] {
                            let a1 = d(i, j) + d(i2, j2);
                            let a2 = d(i, j2) + d(i2, j);
                            let low = if a1 < a2 { a1 } else { a2 };
                            let q = (low - d(i, i2) - d(j, j2)) * ratio(1, 2);
                            if best.as_ref().is_none_or(|b| q < *b) {
                                best = Some(q);
                            }
                        }
                    }
                }
            }
            if let Some(b) = best.filter(|b| b.is_positive()) {
                splits.insert(s, b);
            }
        }
        let t = MarkedTree::new(chart.clone(), splits)
            .map_err(|_| Error::NotInSupport(format!("{} is not a point of the moduli space", fmt_vec(a))))?;
        if !chart.equal_mod_lineality(&t.to_chart_point(), a) {
            return Err(Error::NotInSupport(format!("{} is not a point of the moduli space", fmt_vec(a))));
        }
        Ok(t)
    }

    /// Newick form rooted at the last marking.
    pub fn to_newick(&self) -> String {
        let n = self.chart.n();
        let root = (1u64 << (n - 1)) - 1;
        let mut s = String::from("(");
        s.push_str(&self.clade_items(root));
        s.push(',');
        s.push_str(&self.chart.normalizer().to_string());
        s.push_str(");");
        s
    }

    fn clade_items(&self, clade: u64) -> String {
        let inner: Vec<Split> = self.splits.keys().copied().filter(|&t| t != clade && t & clade == t).collect();
        let maximal: Vec<Split> = inner.iter().copied().filter(|&t| !inner.iter().any(|&u| u != t && u & t == t)).collect();
        let covered = maximal.iter().fold(0u64, |acc, &t| acc | t);
        let mut items: Vec<(usize, String)> = Vec::new();
        for &t in &maximal {
            let first = t.trailing_zeros() as usize;
            items.push((first, format!("({}):{}", self.clade_items(t), fmt_rat(&self.splits[&t]))));
        }
        for i in 0..self.chart.n() {
            if clade >> i & 1 == 1 && covered >> i & 1 == 0 {
                items.push((i, self.chart.labels()[i].to_string()));
            }
        }
        items.sort_by_key(|(k, _)| *k);
        items.into_iter().map(|(_, s)| s).collect::<Vec<_>>().join(",")
    }
}

enum Node {
    Leaf(usize),
    Inner(Vec<(Node, Rat)>),
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("newick: {msg} at offset {}", self.i))
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn token(&mut self, stop: &[u8]) -> &str {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len() && !stop.contains(&self.s[self.i]) && !self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i]).unwrap_or("")
    }

    fn length(&mut self) -> Result<Rat> {
        if self.peek() == Some(b':') {
            self.i += 1;
            let t = self.token(b",();");
            let r = parse_rat(t)?;
            if r.is_negative() {
                return Err(self.err("negative edge length"));
            }
            Ok(r)
        } else {
            Ok(Rat::zero())
        }
    }

    fn node(&mut self) -> Result<Node> {
        if self.peek() == Some(b'(') {
            self.i += 1;
            let mut kids = Vec::new();
            loop {
                let child = self.node()?;
                let len = self.length()?;
                kids.push((child, len));
                match self.peek() {
                    Some(b',') => self.i += 1,
                    Some(b')') => {
                        self.i += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ')'")),
                }
            }
            // Internal node names are allowed and ignored.
            let _ = self.token(b":,();");
            Ok(Node::Inner(kids))
        } else {
            let t = self.token(b":,();");
            t.parse::<usize>().map(Node::Leaf).map_err(|_| self.err("leaf labels must be natural numbers"))
        }
    }
}

fn collect_leaves(node: &Node, out: &mut Vec<usize>) {
    match node {
        Node::Leaf(l) => out.push(*l),
        Node::Inner(kids) => kids.iter().for_each(|(k, _)| collect_leaves(k, out)),
    }
}

fn collect_clades(node: &Node, chart: &ModuliChart, out: &mut BTreeMap<Split, Rat>) -> Result<u64> {
    match node {
        Node::Leaf(l) => Ok(1 << chart.position(*l).expect("label in chart")),
        Node::Inner(kids) => {
            let mut mask = 0;
            for (k, len) in kids {
                let m = collect_clades(k, chart, out)?;
                let s = chart.normalize(m);
                if !len.is_zero() && chart.is_valid_split(s) {
                    *out.entry(s).or_insert_with(Rat::zero) += len;
                }
                mask |= m;
            }
            Ok(mask)
        }
    }
}

/// Parses a tree; the chart uses the leaf labels in increasing order.
pub fn parse_newick(s: &str) -> Result<MarkedTree> {
    let root = parse_root(s)?;
    let mut labels = Vec::new();
    collect_leaves(&root, &mut labels);
    labels.sort_unstable();
    let chart = ModuliChart::new(labels)?;
    tree_from_root(&root, chart)
}

/// Parses a tree whose leaves must be exactly the markings of `chart`.
pub fn parse_newick_in(chart: &ModuliChart, s: &str) -> Result<MarkedTree> {
    let root = parse_root(s)?;
    let mut labels = Vec::new();
    collect_leaves(&root, &mut labels);
    labels.sort_unstable();
    let mut expected = chart.labels().to_vec();
    expected.sort_unstable();
    if labels != expected {
        return Err(Error::Parse(format!("newick leaves {labels:?} differ from the markings {expected:?}")));
    }
    tree_from_root(&root, chart.clone())
}

fn parse_root(s: &str) -> Result<Node> {
    let mut p = Parser { s: s.as_bytes(), i: 0 };
    let root = p.node()?;
    let _ = p.length()?;
    match p.peek() {
        Some(b';') | None => {}
        _ => return Err(p.err("trailing input")),
    }
    Ok(root)
}

fn tree_from_root(root: &Node, chart: ModuliChart) -> Result<MarkedTree> {
    let mut labels = Vec::new();
    collect_leaves(root, &mut labels);
    let mut sorted = labels.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != labels.len() {
        return Err(Error::Parse("repeated leaf label".into()));
    }
    let mut splits = BTreeMap::new();
    collect_clades(root, &chart, &mut splits)?;
    MarkedTree::new(chart, splits)
}

/// A random tree: a random trivalent topology built by leaf insertion, with each bounded edge
/// of length `k / den` for `k` uniform in `0..=max_num` (length zero contracts the edge).
pub fn random_tree<R: Rng + ?Sized>(chart: &ModuliChart, rng: &mut R, max_num: i64, den: i64) -> MarkedTree {
    let n = chart.n();
    // Sides are kept avoiding position 0 while building.
    let mut splits: Vec<u64> = Vec::new();
    for k in 3..n {
        let edges = k + splits.len();
        let e = rng.random_range(0..edges);
        let bit = 1u64 << k;
        if e < k {
            let j = e;
            for s in splits.iter_mut() {
                if *s >> j & 1 == 1 {
                    *s |= bit;
                }
            }
            let new = if j == 0 { ((1u64 << k) - 1) & !1 } else { (1 << j) | bit };
            splits.push(new);
        } else {
            let target = splits[e - k];
            for s in splits.iter_mut() {
                if *s != target && *s & target == target {
                    *s |= bit;
                }
            }
            splits.push(target | bit);
        }
    }
    let mut out = BTreeMap::new();
    for s in splits {
        let len = Rat::new(rng.random_range(0..=max_num).into(), den.into());
        if len.is_positive() {
            out.insert(chart.normalize(s), len);
        }
    }
    MarkedTree::new(chart.clone(), out).expect("leaf insertion yields a tree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{int_vec, rat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_edge_tree_on_four_leaves() {
        let t = parse_newick("((1:0,2:0):3/2,(3:0,4:0):0);").unwrap();
        assert_eq!(t.num_bounded_edges(), 1);
        let d = t.distances();
        let l = ratio(3, 2);
        assert_eq!(d, vec![Rat::zero(), l.clone(), l.clone(), l.clone(), l, Rat::zero()]);
    }

    #[test]
    fn star_is_origin() {
        let t = parse_newick("(1,2,3,4,5);").unwrap();
        assert!(t.to_chart_point().iter().all(|x| x.is_zero()));
        let c = ModuliChart::standard(5).unwrap();
        let back = MarkedTree::from_chart_point(&c, &vec![Rat::zero(); c.dim()]).unwrap();
        assert_eq!(back.num_bounded_edges(), 0);
    }

    #[test]
    fn caterpillar_distances() {
        let t = parse_newick("(((1,2):2,3):5,4,5);").unwrap();
        let c = t.chart().clone();
        let v12 = c.split_vector(c.split_of_labels(&[1, 2]).unwrap());
        let v123 = c.split_vector(c.split_of_labels(&[1, 2, 3]).unwrap());
        let expect = add(&scale(&rat(2), &v12), &scale(&rat(5), &v123));
        assert_eq!(t.to_chart_point(), expect);
    }

    #[test]
    fn newick_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = ModuliChart::standard(7).unwrap();
        for _ in 0..20 {
            let t = random_tree(&c, &mut rng, 4, 2);
            assert_eq!(parse_newick_in(&c, &t.to_newick()).unwrap(), t);
        }
    }

    #[test]
    fn rejects_points_off_the_fan() {
        let c = ModuliChart::standard(4).unwrap();
        // -v_{12} is not a nonnegative combination of compatible splits.
        assert!(MarkedTree::from_chart_point(&c, &int_vec(&[1, 0, 0])).is_err());
    }

    #[test]
    fn incompatible_splits_rejected() {
        let c = ModuliChart::standard(4).unwrap();
        let mut m = BTreeMap::new();
        m.insert(c.split_of_labels(&[1, 2]).unwrap(), rat(1));
        m.insert(c.split_of_labels(&[1, 3]).unwrap(), rat(1));
        assert!(MarkedTree::new(c, m).is_err());
    }
}
