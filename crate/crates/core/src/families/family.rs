//! Families of marked rational curves: a locally surjective map with curve fibres and
//! sections that pick out the leaves on charts of the base.

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::curve::FibreCurve;
use super::surjective::{is_locally_surjective, SurjectivityReport};
use crate::arith::lattice::{generated_basis, lattice_index, saturated_basis};
use crate::arith::linalg::{mat_vec, rank};
use crate::arith::rat::{add, axpy, fmt_vec, neg, scale, sub, QVec, Rat};
use crate::error::{Error, Result};
use crate::intersection::{point_fibre, SmoothChart};
use crate::moduli::quotient::lift_point;
use crate::moduli::{MarkedTree, ModuliChart};
use crate::par::par_map;
use crate::polyhedral::{Cell, PLMap, WeightedComplex};

/// Where a set of sections is defined.
#[derive(Clone, Debug)]
pub enum Domain {
    Everywhere,
    /// Points whose image under `via` (the identity when absent), read in quotient
    /// coordinates of `chart`, is a tree of total edge length below `alpha`.
    Alpha {
        chart: ModuliChart,
        alpha: Rat,
        via: Option<PLMap>,
    },
}

impl Domain {
    pub fn contains(&self, b: &[Rat]) -> bool {
        match self {
            Domain::Everywhere => true,
            Domain::Alpha { chart, alpha, via } => {
                let y = match via {
                    Some(f) => match f.eval(b) {
                        Ok(y) => y,
                        Err(_) => return false,
                    },
                    None => b.to_vec(),
                };
                MarkedTree::from_chart_point(chart, &lift_point(chart, &y))
                    .map(|t| t.splits().values().fold(Rat::zero(), |a, l| a + l) < *alpha)
                    .unwrap_or(false)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct MarkingChart {
    pub domain: Domain,
    /// One section per marking, in the order of `Family::labels`.
    pub sections: Vec<PLMap>,
}

#[derive(Clone, Debug)]
pub struct Family {
    /// `g: T -> B`.
    pub g: PLMap,
    pub base: WeightedComplex,
    /// Cutting functions for points of the base.
    pub base_chart: SmoothChart,
    pub labels: Vec<usize>,
    pub charts: Vec<MarkingChart>,
}

impl Family {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn total(&self) -> &WeightedComplex {
        &self.g.source
    }

    pub fn fibre(&self, b: &[Rat]) -> Result<FibreCurve> {
        let c = point_fibre(&self.g, &self.base, &self.base_chart, b)?;
        FibreCurve::from_complex(&c)
    }

    pub fn chart_at(&self, b: &[Rat]) -> Option<&MarkingChart> {
        self.charts.iter().find(|c| c.domain.contains(b))
    }

    /// Values of the sections at `b` using the first chart containing it.
    pub fn section_points(&self, b: &[Rat]) -> Result<Vec<QVec>> {
        let c = self.chart_at(b).ok_or_else(|| Error::OutsideDomain(format!("no chart contains {}", fmt_vec(b))))?;
        c.sections.iter().map(|s| s.eval(b)).collect()
    }

    /// The leaf of `curve` marked by each section.
    pub fn marked_leaves(&self, curve: &FibreCurve, b: &[Rat]) -> Result<Vec<usize>> {
        self.section_points(b)?
            .iter()
            .map(|p| {
                curve.leaf_containing(p).ok_or_else(|| Error::Family(format!("section value {} is not on a leaf", fmt_vec(p))))
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct PrefamilyReport {
    pub surjectivity: SurjectivityReport,
    pub fibres_checked: usize,
    /// Base points whose fibre is not a smooth rational curve with `n` leaves.
    pub fibre_failures: Vec<(QVec, String)>,
    /// Maximal cells of the total space with weight other than one.
    pub weight_failures: usize,
    /// Faces of the total space on which the lattice map is not onto, by interior point.
    pub lattice_failures: Vec<QVec>,
}

impl PrefamilyReport {
    pub fn fibre_condition_holds(&self) -> bool {
        self.fibre_failures.is_empty() && self.weight_failures == 0
    }

    /// The lattice condition, reported on its own so that it can be probed separately.
    pub fn lattice_condition_holds(&self) -> bool {
        self.lattice_failures.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.surjectivity.passed() && self.fibre_condition_holds() && self.lattice_condition_holds()
    }
}

/// Relative interior points of every face of a complex.
pub fn face_points(x: &WeightedComplex) -> Vec<QVec> {
    x.face_lattice().levels.iter().flatten().map(|c| c.relint_point()).collect()
}

fn lattice_onto(g: &PLMap, tau: &Cell) -> bool {
    let p = tau.relint_point();
    let Some(&i) = g.source.cells_containing(&p).first() else { return false };
    let m = g.target_dim;
    let imgs: Vec<QVec> = tau.lattice().iter().map(|v| mat_vec(&g.pieces[i].matrix, v)).collect();
    let sat = saturated_basis(&imgs, m);
    lattice_index(&generated_basis(&imgs, m), &sat).is_some_and(|k| k == 1.into())
}

pub fn check_prefamily(g: &PLMap, base: &WeightedComplex, base_chart: &SmoothChart, n: usize) -> Result<PrefamilyReport> {
    let surjectivity = is_locally_surjective(g, base)?;
    let points = face_points(base);
    let verdicts = par_map(&points, |b| {
        point_fibre(g, base, base_chart, b).and_then(|c| FibreCurve::from_complex(&c)).and_then(|c| c.check_smooth(n))
    });
    let fibre_failures = points.iter().zip(verdicts).filter_map(|(b, v)| v.err().map(|e| (b.clone(), e.to_string()))).collect();
    let weight_failures = g.source.weights().iter().filter(|&&w| w != 1).count();
    let faces: Vec<&Cell> = g.source.face_lattice().levels.iter().flatten().collect();
    let onto = par_map(&faces, |tau| lattice_onto(g, tau));
    let lattice_failures = faces.iter().zip(onto).filter(|(_, ok)| !ok).map(|(t, _)| t.relint_point()).collect();
    Ok(PrefamilyReport { surjectivity, fibres_checked: points.len(), fibre_failures, weight_failures, lattice_failures })
}

#[derive(Clone, Debug, Default)]
pub struct MarkingReport {
    pub checked: usize,
    /// `g(s_i(b)) != b`, as (chart, point).
    pub section_failures: Vec<(usize, QVec)>,
    /// Some leaf is not hit by exactly one section.
    pub leaf_failures: Vec<(usize, QVec)>,
    /// Two charts mark different leaves at a common point.
    pub overlap_failures: Vec<(usize, usize, QVec)>,
}

impl MarkingReport {
    pub fn passed(&self) -> bool {
        self.section_failures.is_empty() && self.leaf_failures.is_empty() && self.overlap_failures.is_empty()
    }
}

/// A random point of a cell: a positive combination of its vertices plus nonnegative
/// multiples of its rays and arbitrary multiples of its lineality.
pub fn random_point(cell: &Cell, rng: &mut impl Rng) -> QVec {
    let ws: Vec<i64> = cell.vertices().iter().map(|_| rng.random_range(1..=4)).collect();
    let total: i64 = ws.iter().sum();
    let mut p = QVec::new();
    for (v, &w) in cell.vertices().iter().zip(&ws) {
        let t = scale(&Rat::new(w.into(), total.into()), v);
        p = if p.is_empty() { t } else { add(&p, &t) };
    }
    for r in cell.rays() {
        axpy(&mut p, &Rat::new(rng.random_range(0..=6).into(), 2.into()), r);
    }
    for l in cell.lineality() {
        axpy(&mut p, &Rat::new(rng.random_range(-4..=4).into(), 2.into()), l);
    }
    p
}

/// Halves the way from `p` to `toward` until `inside` holds, up to 40 times.
pub fn pull_into(p: &[Rat], toward: &[Rat], inside: impl Fn(&[Rat]) -> bool) -> Option<QVec> {
    let half = Rat::new(1.into(), 2.into());
    let mut q = p.to_vec();
    for _ in 0..40 {
        if inside(&q) {
            return Some(q);
        }
        q = scale(&half, &add(&q, toward));
    }
    None
}

/// `dim + 1` affinely independent points of `cell`, near its relative interior and all
/// satisfying `inside`.
pub fn spanning_points(cell: &Cell, inside: impl Fn(&[Rat]) -> bool) -> Option<Vec<QVec>> {
    let p0 = pull_into(&cell.relint_point(), &cell.vertices()[0], &inside)?;
    let mut dirs: Vec<QVec> = cell.vertices().iter().map(|v| sub(v, &p0)).collect();
    dirs.extend(cell.rays().iter().cloned());
    dirs.extend(cell.lineality().iter().cloned());
    dirs.extend(cell.lineality().iter().map(|l| neg(l)));
    let n = cell.ambient_dim();
    let half = Rat::new(1.into(), 2.into());
    let mut chosen: Vec<QVec> = Vec::new();
    let mut out = vec![p0.clone()];
    for d in dirs {
        if chosen.len() == cell.dim() {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(d.clone());
        if rank(&trial, n) == chosen.len() {
            continue;
        }
        let q = pull_into(&add(&p0, &scale(&half, &d)), &p0, &inside)?;
        chosen.push(sub(&q, &p0));
        out.push(q);
    }
    Some(out)
}

/// Sample points of a chart: one per face of the base pulled into the domain, and `extra`
/// random points per maximal cell.
pub fn chart_samples(base: &WeightedComplex, domain: &Domain, extra: usize, seed: u64) -> Vec<QVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for f in base.face_lattice().levels.iter().flatten() {
        if let Some(q) = pull_into(&f.relint_point(), &f.vertices()[0], |x| domain.contains(x)) {
            out.push(q);
        }
    }
    for c in base.cells() {
        for _ in 0..extra {
            let p = random_point(c, &mut rng);
            if let Some(q) = pull_into(&p, &c.vertices()[0], |x| domain.contains(x)) {
                out.push(q);
            }
        }
    }
    out
}

fn leaves_of(fam: &Family, chart: &MarkingChart, curve: &FibreCurve, b: &[Rat]) -> Option<Vec<usize>> {
    chart
        .sections
        .iter()
        .map(|s| s.eval(b).ok().and_then(|p| curve.leaf_containing(&p)))
        .collect::<Option<Vec<_>>>()
        .filter(|ls| ls.len() == fam.n())
}

pub fn check_marking(fam: &Family, seed: u64) -> Result<MarkingReport> {
    let mut report = MarkingReport::default();
    for (ci, chart) in fam.charts.iter().enumerate() {
        let points = chart_samples(&fam.base, &chart.domain, 3, seed.wrapping_add(ci as u64));
        let results = par_map(&points, |b| -> Result<(bool, bool, Vec<usize>)> {
            let lifts_ok = chart.sections.iter().all(|s| s.eval(b).and_then(|p| fam.g.eval(&p)).is_ok_and(|y| y == *b));
            let curve = fam.fibre(b)?;
            let leaves = leaves_of(fam, chart, &curve, b);
            let bijective = leaves.as_ref().is_some_and(|ls| {
                let mut seen = vec![false; curve.num_leaves()];
                curve.num_leaves() == fam.n() && ls.iter().all(|&l| !std::mem::replace(&mut seen[l], true))
            });
            let mut bad_overlaps = Vec::new();
            for (cj, other) in fam.charts.iter().enumerate().skip(ci + 1) {
                if other.domain.contains(b) && leaves_of(fam, other, &curve, b) != leaves {
                    bad_overlaps.push(cj);
                }
            }
            Ok((lifts_ok, bijective, bad_overlaps))
        });
        for (b, r) in points.iter().zip(results) {
            let (lifts_ok, bijective, bad) = r?;
            report.checked += 1;
            if !lifts_ok {
                report.section_failures.push((ci, b.clone()));
            }
            if !bijective {
                report.leaf_failures.push((ci, b.clone()));
            }
            report.overlap_failures.extend(bad.into_iter().map(|cj| (ci, cj, b.clone())));
        }
    }
    Ok(report)
}
