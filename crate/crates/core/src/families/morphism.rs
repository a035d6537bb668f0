//! The distance map of a family, the induced map to `M_n / L`, and pseudo-morphisms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::family::{pull_into, random_point, spanning_points, Family};
use crate::arith::linalg::{in_span, mat_vec};
use crate::arith::rat::{add, axpy, fmt_vec, is_integral, scale, sub, zero_vec, QVec, Rat};
use crate::error::{Error, Result};
use crate::matroid::{elements, flat_vector, Matroid};
use crate::moduli::quotient::quotient_map;
use crate::moduli::ModuliChart;
use crate::par::par_range;
use crate::polyhedral::{normal_vector, AffineMap, PLMap};

/// Leaf-to-leaf distances of the fibre over `b`, over the pairs of markings in order.
pub fn distance_map(fam: &Family, b: &[Rat]) -> Result<QVec> {
    if !fam.base.contains_point(b) {
        return Err(Error::NotInSupport(format!("{} is not in the base", fmt_vec(b))));
    }
    let curve = fam.fibre(b)?;
    let leaves = fam.marked_leaves(&curve, b)?;
    let n = leaves.len();
    Ok((0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| curve.leaf_distance(leaves[i], leaves[j])).collect())
}

#[derive(Clone, Debug)]
pub struct IntegralityReport {
    pub checked: usize,
    /// Pairs `(b, b')` whose distance difference is not integral.
    pub failures: Vec<(QVec, QVec)>,
}

impl IntegralityReport {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.failures.is_empty()
    }
}

/// Checks `d_g(b') - d_g(b)` is integral for `count` random pairs in a common cell of the base
/// whose difference lies in the cell's lattice.
pub fn check_integrality(fam: &Family, count: usize, seed: u64) -> Result<IntegralityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = fam.base.cells();
    let mut report = IntegralityReport { checked: 0, failures: Vec::new() };
    let mut tries = 0;
    while report.checked < count && tries < 50 * count && !cells.is_empty() {
        tries += 1;
        let c = &cells[rng.random_range(0..cells.len())];
        let b = random_point(c, &mut rng);
        let step = c.lattice().iter().fold(zero_vec(b.len()), |acc, v| {
            let k = Rat::from_integer(rng.random_range(-1i64..=1).into());
            add(&acc, &scale(&k, v))
        });
        let b2 = add(&b, &step);
        if !c.contains(&b2) || fam.chart_at(&b).is_none() || fam.chart_at(&b2).is_none() {
            continue;
        }
        report.checked += 1;
        if !is_integral(&sub(&distance_map(fam, &b2)?, &distance_map(fam, &b)?)) {
            report.failures.push((b, b2));
        }
    }
    Ok(report)
}

/// `d(raw) -> M_n / L` in the quotient coordinates of the family's markings.
pub fn raw_to_quotient(chart: &ModuliChart) -> AffineMap {
    let r = chart.raw_dim();
    let cols: Vec<QVec> = (0..r).map(|k| chart.raw_to_chart(&crate::arith::rat::unit_vec(r, k))).collect();
    let rows = (0..chart.dim()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    quotient_map(chart).compose(&AffineMap::linear(r, rows).expect("raw to chart"))
}

/// `d_g` as a piecewise affine map into raw distance coordinates, interpolated on each
/// maximal cell of the base and checked at random points.
pub fn distance_morphism(fam: &Family, seed: u64) -> Result<PLMap> {
    let base = &fam.base;
    let pieces = par_range(base.num_cells(), |i| -> Result<AffineMap> {
        let cell = &base.cells()[i];
        let pts = spanning_points(cell, |x| fam.chart_at(x).is_some())
            .ok_or_else(|| Error::OutsideDomain(format!("no chart meets the cell through {}", fmt_vec(&cell.relint_point()))))?;
        let vals = pts.iter().map(|p| distance_map(fam, p)).collect::<Result<Vec<_>>>()?;
        let dirs: Vec<QVec> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
        let imgs: Vec<QVec> = vals[1..].iter().map(|v| sub(v, &vals[0])).collect();
        let map = AffineMap::from_values(base.ambient_dim(), &pts[0], &vals[0], &dirs, &imgs);
        if !map.is_integral_on(cell.lattice()) {
            return Err(Error::NonIntegralMap(format!("distances on the cell through {}", fmt_vec(&pts[0]))));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        for _ in 0..3 {
            let p = random_point(cell, &mut rng);
            let Some(p) = pull_into(&p, &pts[0], |x| fam.chart_at(x).is_some()) else { continue };
            if distance_map(fam, &p)? != map.apply(&p) {
                return Err(Error::NonAffine(format!("validation fails at {}", fmt_vec(&p))));
            }
        }
        Ok(map)
    });
    let width = fam.n() * (fam.n() - 1) / 2;
    PLMap::new(base.clone(), width, pieces.into_iter().collect::<Result<_>>()?)
}

/// `phi_g = q o d_g: B -> M_n / L`.
pub fn fibre_morphism(fam: &Family, seed: u64) -> Result<PLMap> {
    let d = distance_morphism(fam, seed)?;
    let q = raw_to_quotient(&ModuliChart::new(fam.labels.clone())?);
    let pieces = d.pieces.iter().map(|p| q.compose(p)).collect();
    PLMap::new(d.source, q.target_dim(), pieces)
}

#[derive(Clone, Debug)]
pub struct PseudoEntry {
    /// Index into the codimension-one faces of the source.
    pub face: usize,
    /// `sum_sigma w(sigma) f(u_{sigma/tau})`.
    pub residual: QVec,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct PseudoMorphismReport {
    pub entries: Vec<PseudoEntry>,
}

impl PseudoMorphismReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PseudoEntry> {
        self.entries.iter().filter(|e| !e.ok)
    }
}

/// Whether the images of the balancing equations of the source hold modulo `V_{f(tau)}`.
pub fn is_pseudomorphism(f: &PLMap) -> PseudoMorphismReport {
    let x = &f.source;
    let co = x.codim_one();
    let m = f.target_dim;
    let entries = par_range(co.faces.len(), |t| {
        let tau = &co.faces[t];
        let mut residual = zero_vec(m);
        for &i in &co.adjacent[t] {
            let u = normal_vector(&x.cells()[i], tau);
            axpy(&mut residual, &Rat::from_integer(x.weights()[i].into()), &mat_vec(&f.pieces[i].matrix, &u));
        }
        let span: Vec<QVec> = match co.adjacent[t].first() {
            Some(&i) => tau.direction_basis().iter().map(|d| f.pieces[i].apply_linear(d)).collect(),
            None => Vec::new(),
        };
        let ok = in_span(&span, &residual, m);
        PseudoEntry { face: t, residual, ok }
    });
    PseudoMorphismReport { entries }
}

/// `f(V_F) - f(0) = sum_{i in F} (f(V_i) - f(0))` for every flat `F`, where `embed` sends
/// `R^E` to the ambient space of the source.
pub fn linear_on_flats(f: &PLMap, m: &Matroid, embed: &AffineMap) -> Result<bool> {
    let e = m.ground_size();
    let at = |v: &QVec| f.eval(&embed.apply(v));
    let zero = at(&zero_vec(e))?;
    let single: Vec<QVec> = (0..e).map(|i| at(&flat_vector(e, 1 << i)).map(|y| sub(&y, &zero))).collect::<Result<_>>()?;
    for flat in m.flats() {
        let lhs = sub(&at(&flat_vector(e, flat))?, &zero);
        let rhs = elements(flat).fold(zero_vec(zero.len()), |acc, i| add(&acc, &single[i]));
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}
