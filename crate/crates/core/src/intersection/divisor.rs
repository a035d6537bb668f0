//! Divisors of piecewise affine functions and modifications.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use super::expr::{Expr, Restriction};
use crate::arith::rat::{dot, fmt_vec, QVec, Rat};
use crate::error::{Error, Result};
use crate::par::par_map;
use crate::polyhedral::complex::{restrict_lineality, slice_cell};
use crate::polyhedral::map::{AffineMap, PLMap};
use crate::polyhedral::ops::cross_product;
use crate::polyhedral::{normal_vector, Cell, Hyperplane, WeightedComplex};

/// A function on the support of a complex, either one expression on the whole space or one
/// expression per maximal cell of a given polyhedral structure.
#[derive(Clone, Debug)]
pub enum RationalFunction {
    Global(Expr),
    PerCell { domain: WeightedComplex, exprs: Vec<Expr> },
}

impl RationalFunction {
    pub fn global(e: Expr) -> Self {
        RationalFunction::Global(e)
    }

    pub fn eval(&self, x: &[Rat]) -> Result<Rat> {
        match self {
            RationalFunction::Global(e) => Ok(e.eval(x)),
            RationalFunction::PerCell { domain, exprs } => {
                let i = domain.cells().iter().position(|c| c.contains(x)).ok_or_else(|| Error::NotInSupport(fmt_vec(x)))?;
                Ok(exprs[i].eval(x))
            }
        }
    }

    /// Expression to use on a cell of `x`, located through a relative interior point.
    fn expr_for(&self, cell: &Cell) -> Result<Expr> {
        match self {
            RationalFunction::Global(e) => Ok(e.clone()),
            RationalFunction::PerCell { domain, exprs } => {
                let p = cell.relint_point();
                let i = domain
                    .cells()
                    .iter()
                    .position(|c| c.contains(&p))
                    .ok_or_else(|| Error::NotInSupport(format!("cell through {} is outside the domain", fmt_vec(&p))))?;
                Ok(exprs[i].clone())
            }
        }
    }

    /// `phi ∘ f`.
    pub fn pullback(&self, f: &PLMap) -> Result<RationalFunction> {
        let exprs = f
            .source
            .cells()
            .iter()
            .zip(&f.pieces)
            .map(|(c, g)| {
                let img = c.image(&g.matrix, &g.translation);
                let e = match self {
                    RationalFunction::Global(e) => e.clone(),
                    RationalFunction::PerCell { domain, exprs } => {
                        let p = img.relint_point();
                        let owners: Vec<usize> =
                            (0..domain.num_cells()).filter(|&i| domain.cells()[i].contains_cell(&img)).collect();
                        match owners.first() {
                            Some(&i) => exprs[i].clone(),
                            None => {
                                return Err(Error::NotInSupport(format!(
                                    "image of a cell through {} is not inside one cell of the domain",
                                    fmt_vec(&p)
                                )))
                            }
                        }
                    }
                };
                Ok(e.compose(g))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RationalFunction::PerCell { domain: f.source.clone(), exprs })
    }
}

/// `phi ∘ f` for a global affine map.
pub fn pullback_function(f: &PLMap, phi: &RationalFunction) -> Result<RationalFunction> {
    phi.pullback(f)
}

/// The complex refined until `phi` is affine on every maximal cell, together with the affine
/// restriction on each cell.
pub fn linearize(x: &WeightedComplex, phi: &RationalFunction) -> Result<(WeightedComplex, Vec<(QVec, Rat)>)> {
    let mut cells: Vec<(Cell, i64, Expr)> =
        x.weighted_cells().map(|(c, w)| Ok((c.clone(), w, phi.expr_for(c)?))).collect::<Result<_>>()?;
    let mut lineality = x.lineality().to_vec();
    loop {
        let restrictions: Vec<Restriction> = par_map(&cells, |(c, _, e)| e.restrict(c));
        let mut cuts: BTreeSet<Hyperplane> = BTreeSet::new();
        for r in &restrictions {
            if let Restriction::Split(h) = r {
                cuts.insert(h.clone());
            }
        }
        if cuts.is_empty() {
            let affine = restrictions
                .into_iter()
                .map(|r| match r {
                    Restriction::Affine(a, b) => (a, b),
                    Restriction::Split(_) => unreachable!(),
                })
                .collect();
            let refined =
                WeightedComplex::new(x.ambient_dim(), x.dim(), lineality, cells.into_iter().map(|(c, w, _)| (c, w)).collect())?;
            return Ok((refined, affine));
        }
        // Every cell is cut by every hyperplane so that neighbours receive the same
        // subdivision of shared faces.
        let hs: Vec<Hyperplane> = cuts.into_iter().collect();
        lineality = restrict_lineality(&lineality, &hs, x.ambient_dim());
        let next: Vec<Vec<(Cell, i64, Expr)>> =
            par_map(&cells, |(c, w, e)| slice_cell(c, &hs).into_iter().map(|p| (p, *w, e.clone())).collect());
        cells = next.into_iter().flatten().collect();
    }
}

/// Weighted codimension-one skeleton `phi . X`.
pub fn divisor(x: &WeightedComplex, phi: &RationalFunction) -> Result<WeightedComplex> {
    if x.dim() == 0 || x.is_empty() {
        return Ok(WeightedComplex::empty(x.ambient_dim(), x.dim().saturating_sub(1), x.lineality().to_vec()));
    }
    let (refined, affine) = linearize(x, phi)?;
    debug_assert_eq!(refined.num_cells(), affine.len());
    let co = refined.codim_one();
    let idx: Vec<usize> = (0..co.faces.len()).collect();
    let weights: Vec<Result<i64>> = par_map(&idx, |&t| {
        let tau = &co.faces[t];
        let adj = &co.adjacent[t];
        let a0 = &affine[adj[0]].0;
        let mut total = Rat::from_integer(0.into());
        for &s in adj {
            let u = normal_vector(&refined.cells()[s], tau);
            let diff: QVec = affine[s].0.iter().zip(a0).map(|(a, b)| a - b).collect();
            total += Rat::from_integer(refined.weights()[s].into()) * dot(&diff, &u);
        }
        if !total.is_integer() {
            return Err(Error::NotIntegral(format!(
                "divisor weight {total} at the face through {}",
                fmt_vec(&tau.relint_point())
            )));
        }
        total.to_integer().to_i64().ok_or_else(|| Error::NotIntegral("weight overflow".into()))
    });
    let mut cells = Vec::new();
    for (t, w) in weights.into_iter().enumerate() {
        let w = w?;
        if w != 0 {
            cells.push((co.faces[t].clone(), w));
        }
    }
    WeightedComplex::new(x.ambient_dim(), x.dim() - 1, refined.lineality().to_vec(), cells)
}

/// `phi^k . X`.
pub fn power_divisor(x: &WeightedComplex, phi: &RationalFunction, k: usize) -> Result<WeightedComplex> {
    let mut c = x.clone();
    for _ in 0..k {
        c = divisor(&c, phi)?;
    }
    Ok(c)
}

/// `phi_1 ... phi_k . X`, applying the last function first.
pub fn divisor_sequence(x: &WeightedComplex, phis: &[RationalFunction]) -> Result<WeightedComplex> {
    let mut c = x.clone();
    for phi in phis.iter().rev() {
        c = divisor(&c, phi)?;
    }
    Ok(c)
}

/// Modification `max{phi ∘ pi, y} . (X x R)`: the graph of `phi` with downward cells attached
/// along `phi . X`.
pub fn modification(x: &WeightedComplex, phi: &RationalFunction) -> Result<WeightedComplex> {
    let n = x.ambient_dim();
    let line = WeightedComplex::new(
        1,
        1,
        vec![vec![Rat::from_integer(1.into())]],
        vec![(Cell::cone(1, vec![], vec![vec![Rat::from_integer(1.into())]])?, 1)],
    )?;
    let xr = cross_product(x, &line);
    let y = Expr::coordinate(n + 1, n);
    let lifted = match phi {
        RationalFunction::Global(e) => RationalFunction::Global(Expr::Max(vec![e.extend(1), y])),
        RationalFunction::PerCell { domain, exprs } => {
            let dom = cross_product(domain, &line);
            // Cells of the product are ordered cell-major, one per cell of the domain.
            let mut ex = Vec::with_capacity(dom.num_cells());
            for (c, _) in dom.weighted_cells() {
                let p = c.relint_point();
                let i = domain
                    .cells()
                    .iter()
                    .position(|d| d.contains(&p[..n]))
                    .ok_or_else(|| Error::NotInSupport("modification domain".into()))?;
                ex.push(Expr::Max(vec![exprs[i].extend(1), y.clone()]));
            }
            RationalFunction::PerCell { domain: dom, exprs: ex }
        }
    };
    divisor(&xr, &lifted)
}

/// The graph map `x -> (x, phi(x))` for an affine `phi`.
pub fn graph_map(n: usize, a: &[Rat], b: &Rat) -> AffineMap {
    let mut rows: Vec<QVec> = (0..n).map(|i| crate::arith::rat::unit_vec(n, i)).collect();
    rows.push(a.to_vec());
    let mut t = crate::arith::rat::zero_vec(n);
    t.push(b.clone());
    AffineMap::new(n, rows, t).expect("graph map fits")
}
