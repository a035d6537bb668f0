//! Matroids given by a rank oracle, and their Bergman fans.
//!
//! Elements are `0..m` internally; subsets are bitmasks. Display and parsing use labels
//! `1..=m`.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use serde::Deserialize;

use crate::arith::rat::{rat, zero_vec, QVec};
use crate::error::{Error, Result};
use crate::polyhedral::{Cell, WeightedComplex};

pub type Set = u32;

const HARD_LIMIT: usize = 32;

/// Largest ground set accepted, from `TROPMOD_MAX_GROUND` (default 15).
pub fn max_ground() -> usize {
    std::env::var("TROPMOD_MAX_GROUND").ok().and_then(|s| s.parse().ok()).unwrap_or(15).min(HARD_LIMIT)
}

fn check_ground(m: usize) -> Result<()> {
    let limit = max_ground();
    if m > limit {
        return Err(Error::GroundTooLarge { size: m, limit });
    }
    Ok(())
}

#[derive(Clone, Debug)]
enum Oracle {
    Uniform { rank: usize },
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
    Flats { flats: Vec<(Set, usize)> },
    Minor { base: Arc<Matroid>, keep: Vec<usize>, contracted: Set },
}

#[derive(Clone, Debug)]
pub struct Matroid {
    ground: usize,
    oracle: Oracle,
}

pub fn full(m: usize) -> Set {
    if m == 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

pub fn elements(s: Set) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| s >> i & 1 == 1)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

impl Matroid {
    pub fn uniform(rank: usize, m: usize) -> Result<Matroid> {
        check_ground(m)?;
        if rank > m {
            return Err(Error::Invalid(format!("uniform matroid of rank {rank} on {m} elements")));
        }
        Ok(Matroid { ground: m, oracle: Oracle::Uniform { rank } })
    }

    /// Cycle matroid of a graph on vertices `0..vertices`.
    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Matroid> {
        check_ground(edges.len())?;
        if edges.iter().any(|&(a, b)| a >= vertices || b >= vertices) {
            return Err(Error::Invalid("edge endpoint out of range".into()));
        }
        Ok(Matroid { ground: edges.len(), oracle: Oracle::Graphic { vertices, edges } })
    }

    /// Complete graph with edges `{i, j}` (`i < j`) in lexicographic order.
    pub fn complete_graph(n: usize) -> Result<Matroid> {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Matroid::graphic(n, edges)
    }

    /// Matroid described by its lattice of flats (subsets of `0..m`).
    pub fn from_flats(m: usize, flats: &[Vec<usize>]) -> Result<Matroid> {
        check_ground(m)?;
        let mut set: BTreeSet<Set> = BTreeSet::new();
        for f in flats {
            let mut s = 0;
            for &e in f {
                if e >= m {
                    return Err(Error::Invalid(format!("flat element {e} outside ground set of size {m}")));
                }
                s |= 1 << e;
            }
            set.insert(s);
        }
        set.insert(full(m));
        let all: Vec<Set> = set.into_iter().collect();
        // Closed under intersection.
        let present: HashSet<Set> = all.iter().copied().collect();
        for &a in &all {
            for &b in &all {
                if !present.contains(&(a & b)) {
                    return Err(Error::Invalid("flats are not closed under intersection".into()));
                }
            }
        }
        let bottom = all.iter().copied().fold(full(m), |acc, f| acc & f);
        // Covering flats of each flat partition its complement.
        for &f in &all {
            let above: Vec<Set> = all.iter().copied().filter(|&g| g != f && g & f == f).collect();
            let covers: Vec<Set> =
                above.iter().copied().filter(|&g| !above.iter().any(|&h| h != g && h & g == h && h != f)).collect();
            let mut union = 0;
            for &c in &covers {
                if (c & !f) & union != 0 {
                    return Err(Error::Invalid("covering flats overlap outside their common flat".into()));
                }
                union |= c & !f;
            }
            if f != full(m) && union != full(m) & !f {
                return Err(Error::Invalid("covering flats do not partition the complement".into()));
            }
        }
        // Ranks: longest chain from the bottom flat.
        let mut sorted = all.clone();
        sorted.sort_by_key(|s| s.count_ones());
        let mut ranked: Vec<(Set, usize)> = Vec::new();
        for &f in &sorted {
            let r = if f == bottom {
                0
            } else {
                ranked.iter().filter(|(g, _)| *g != f && g & f == *g).map(|(_, r)| r + 1).max().unwrap_or(0)
            };
            ranked.push((f, r));
        }
        Ok(Matroid { ground: m, oracle: Oracle::Flats { flats: ranked } })
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn rank(&self) -> usize {
        self.rank_of(full(self.ground))
    }

    pub fn rank_of(&self, s: Set) -> usize {
        match &self.oracle {
            Oracle::Uniform { rank } => (s.count_ones() as usize).min(*rank),
            Oracle::Graphic { vertices, edges } => {
                let mut parent: Vec<usize> = (0..*vertices).collect();
                let mut r = 0;
                for e in elements(s) {
                    let (a, b) = edges[e];
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra] = rb;
                        r += 1;
                    }
                }
                r
            }
            Oracle::Flats { flats } => {
                flats.iter().filter(|(f, _)| f & s == s).map(|(_, r)| *r).min().expect("the ground set is a flat")
            }
            Oracle::Minor { base, keep, contracted } => {
                let mut t = 0;
                for e in elements(s) {
                    t |= 1 << keep[e];
                }
                base.rank_of(t | contracted) - base.rank_of(*contracted)
            }
        }
    }

    pub fn closure(&self, s: Set) -> Set {
        let r = self.rank_of(s);
        let mut c = s;
        for e in 0..self.ground {
            if c >> e & 1 == 0 && self.rank_of(s | 1 << e) == r {
                c |= 1 << e;
            }
        }
        c
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.rank_of(1 << e) == 0
    }

    pub fn is_coloop(&self, e: usize) -> bool {
        let rest = full(self.ground) & !(1 << e);
        self.rank_of(rest) < self.rank()
    }

    pub fn has_loops(&self) -> bool {
        (0..self.ground).any(|e| self.is_loop(e))
    }

    fn minor(&self, e: usize, contract: bool) -> Result<Matroid> {
        if e >= self.ground {
            return Err(Error::Invalid(format!("element {e} outside ground set")));
        }
        let keep: Vec<usize> = (0..self.ground).filter(|&i| i != e).collect();
        let contracted = if contract { 1 << e } else { 0 };
        Ok(Matroid { ground: self.ground - 1, oracle: Oracle::Minor { base: Arc::new(self.clone()), keep, contracted } })
    }

    /// `M \ e`, with the remaining elements renumbered in order.
    pub fn delete(&self, e: usize) -> Result<Matroid> {
        self.minor(e, false)
    }

    /// `M / e`, with the remaining elements renumbered in order.
    pub fn contract(&self, e: usize) -> Result<Matroid> {
        self.minor(e, true)
    }

    /// All flats, sorted by rank and then by bitmask.
    pub fn flats(&self) -> Vec<Set> {
        let start = self.closure(0);
        let mut seen: HashSet<Set> = HashSet::from([start]);
        let mut frontier = vec![start];
        while let Some(f) = frontier.pop() {
            for c in self.covers(f) {
                if seen.insert(c) {
                    frontier.push(c);
                }
            }
        }
        let mut out: Vec<Set> = seen.into_iter().collect();
        out.sort_by_key(|&f| (self.rank_of(f), f));
        out
    }

    /// Flats covering `f`.
    pub fn covers(&self, f: Set) -> Vec<Set> {
        let mut out: Vec<Set> = Vec::new();
        for e in 0..self.ground {
            if f >> e & 1 == 0 {
                let c = self.closure(f | 1 << e);
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Maximal chains `cl(0) < F_1 < ... < F_{r-1} < E`, listing the proper flats only.
    pub fn maximal_chains(&self) -> Vec<Vec<Set>> {
        let top = full(self.ground);
        let mut chains = Vec::new();
        let mut stack: Vec<Set> = Vec::new();
        fn go(m: &Matroid, f: Set, top: Set, stack: &mut Vec<Set>, out: &mut Vec<Vec<Set>>) {
            for c in m.covers(f) {
                if c == top {
                    out.push(stack.clone());
                } else {
                    stack.push(c);
                    go(m, c, top, stack, out);
                    stack.pop();
                }
            }
        }
        let bottom = self.closure(0);
        if bottom == top {
            chains.push(Vec::new());
            return chains;
        }
        go(self, bottom, top, &mut stack, &mut chains);
        chains
    }

    /// Minimal dependent sets.
    pub fn circuits(&self) -> Vec<Set> {
        let mut out = Vec::new();
        for s in 1..=full(self.ground) {
            let k = s.count_ones() as usize;
            if self.rank_of(s) == k - 1 && elements(s).all(|e| self.rank_of(s & !(1 << e)) == k - 1) {
                out.push(s);
            }
        }
        out
    }

    /// Flats as 1-based label lists, for display.
    pub fn flat_labels(&self) -> Vec<Vec<usize>> {
        self.flats().into_iter().map(|f| elements(f).map(|e| e + 1).collect()).collect()
    }
}

/// `V_F = -sum_{i in F} e_i`.
pub fn flat_vector(m: usize, f: Set) -> QVec {
    let mut v = zero_vec(m);
    for e in elements(f) {
        v[e] = rat(-1);
    }
    v
}

/// Bergman fan: cones over maximal chains of flats, all weights one, with lineality
/// spanned by `(1, ..., 1)`. Empty when the matroid has loops.
pub fn bergman_fan(m: &Matroid) -> WeightedComplex {
    let n = m.ground_size();
    let r = m.rank();
    let lin = vec![vec![rat(1); n]];
    if m.has_loops() || n == 0 {
        return WeightedComplex::empty(n, r, lin);
    }
    let chains = m.maximal_chains();
    let cells: Vec<(Cell, i64)> = crate::par::par_map(&chains, |chain| {
        let rays = chain.iter().map(|&f| flat_vector(n, f)).collect();
        (Cell::cone(n, rays, lin.clone()).expect("cone over flats"), 1)
    });
    WeightedComplex::new(n, r, lin, cells).expect("cones of one dimension")
}

#[derive(Deserialize)]
struct FlatsJson {
    ground: usize,
    flats: Vec<Vec<usize>>,
}

/// Parses `uniform:r,m`, `graph:Kn`, `graph:n:1-2,2-3,...` or a JSON object
/// `{"ground": m, "flats": [[1,2], ...]}` with 1-based labels.
pub fn parse_matroid(spec: &str) -> Result<Matroid> {
    let s = spec.trim();
    let bad = || Error::Parse(format!("unrecognized matroid description {s:?}"));
    if let Some(rest) = s.strip_prefix("uniform:") {
        let (r, m) = rest.split_once(',').ok_or_else(bad)?;
        let r: usize = r.trim().parse().map_err(|_| bad())?;
        let m: usize = m.trim().parse().map_err(|_| bad())?;
        return Matroid::uniform(r, m);
    }
    if let Some(rest) = s.strip_prefix("graph:") {
        if let Some(n) = rest.strip_prefix('K') {
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            return Matroid::complete_graph(n);
        }
        let (n, edges) = rest.split_once(':').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let mut es = Vec::new();
        for e in edges.split(',') {
            let (a, b) = e.split_once('-').ok_or_else(bad)?;
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a == 0 || b == 0 {
                return Err(bad());
            }
            es.push((a - 1, b - 1));
        }
        return Matroid::graphic(n, es);
    }
    if s.starts_with('{') {
        let j: FlatsJson = serde_json::from_str(s)?;
        let flats: Vec<Vec<usize>> = j
            .flats
            .iter()
            .map(|f| f.iter().map(|&e| e.checked_sub(1).ok_or_else(bad)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        return Matroid::from_flats(j.ground, &flats);
    }
    Err(bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn uniform_flats() {
        let m = Matroid::uniform(3, 5).unwrap();
        let flats = m.flats();
        // empty set, 5 points, 10 lines, ground set
        assert_eq!(flats.len(), 1 + 5 + 10 + 1);
        assert_eq!(m.maximal_chains().len(), 5 * 4);
        assert_eq!(m.circuits().len(), binom(5, 4));
    }

    #[test]
    fn complete_graph_rank() {
        let k4 = Matroid::complete_graph(4).unwrap();
        assert_eq!(k4.ground_size(), 6);
        assert_eq!(k4.rank(), 3);
        // triangles and 4-cycles
        assert_eq!(k4.circuits().len(), 4 + 3);
    }

    #[test]
    fn flats_description_round_trip() {
        let u = Matroid::uniform(2, 3).unwrap();
        let flats: Vec<Vec<usize>> = u.flats().into_iter().map(|f| elements(f).collect()).collect();
        let v = Matroid::from_flats(3, &flats).unwrap();
        for s in 0..8 {
            assert_eq!(u.rank_of(s), v.rank_of(s));
        }
        assert!(Matroid::from_flats(3, &[vec![], vec![0, 1], vec![1, 2]]).is_err());
    }

    #[test]
    fn minors() {
        let u = Matroid::uniform(2, 3).unwrap();
        let d = u.delete(0).unwrap();
        assert_eq!(d.rank(), 2);
        let c = u.contract(0).unwrap();
        assert_eq!(c.rank(), 1);
        assert!(!c.has_loops());
        let k3 = Matroid::complete_graph(3).unwrap();
        assert!(k3.contract(0).unwrap().delete(0).unwrap().rank() == 1);
    }

    #[test]
    fn bergman_fan_of_u23_is_a_line() {
        let b = bergman_fan(&Matroid::uniform(2, 3).unwrap());
        assert_eq!(b.num_cells(), 3);
        assert_eq!(b.dim(), 2);
        assert!(b.is_balanced());
    }

    #[test]
    fn ground_limit() {
        assert!(matches!(Matroid::uniform(2, 40), Err(Error::GroundTooLarge { .. })));
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_matroid("uniform:2,4").unwrap().rank(), 2);
        assert_eq!(parse_matroid("graph:K4").unwrap().ground_size(), 6);
        assert_eq!(parse_matroid("graph:3:1-2,2-3,1-3").unwrap().rank(), 2);
        let j = r#"{"ground":3,"flats":[[],[1],[2],[3]]}"#;
        assert_eq!(parse_matroid(j).unwrap().rank(), 2);
        assert!(parse_matroid("nonsense").is_err());
    }
}
