//! The families used throughout: forgetful maps with their marking sections, products with
//! a fixed curve, and pull-backs of the forgetful family along morphisms to `M_n / L`.

use super::family::{Domain, Family, MarkingChart};
use crate::arith::rat::{int_vec, rat, unit_vec, zero_vec, QVec, Rat};
use crate::error::{Error, Result};
use crate::fibreprod::fibre_product;
use crate::intersection::SmoothChart;
use crate::moduli::quotient::{quotient_fan, quotient_forgetful, quotient_section, quotient_smooth_chart};
use crate::moduli::{marking_section, ModuliChart};
use crate::polyhedral::ops::cross_product;
use crate::polyhedral::{AffineMap, Cell, PLMap, WeightedComplex};

/// `ft: M_{n+1} / L -> M_n / L` with the sections `s_i^alpha`, one chart per `alpha`.
pub fn forgetful_family(n: usize, alphas: &[Rat]) -> Result<Family> {
    let total = ModuliChart::with_zero(n)?;
    let base = ModuliChart::standard(n)?;
    let g = quotient_forgetful(&total, &base)?;
    let fan = quotient_fan(&base);
    let charts = alphas
        .iter()
        .map(|a| {
            let sections = (1..=n)
                .map(|i| PLMap::global(fan.clone(), quotient_section(&marking_section(n, i, a.clone())?)))
                .collect::<Result<_>>()?;
            Ok(MarkingChart { domain: Domain::Alpha { chart: base.clone(), alpha: a.clone(), via: None }, sections })
        })
        .collect::<Result<_>>()?;
    Ok(Family { g, base: fan, base_chart: quotient_smooth_chart(&base), labels: (1..=n).collect(), charts })
}

/// The line `L^n_1` in `R^{n-1}`: rays `-e_1, ..., -e_{n-1}` and `(1, ..., 1)`.
pub fn standard_line(n: usize) -> WeightedComplex {
    let m = n - 1;
    let mut rays: Vec<QVec> = (0..m).map(|i| crate::arith::rat::neg(&unit_vec(m, i))).collect();
    rays.push(vec![rat(1); m]);
    let cells = rays.into_iter().map(|r| (Cell::cone(m, vec![r], vec![]).expect("ray"), 1)).collect();
    WeightedComplex::new(m, 1, vec![], cells).expect("line")
}

pub fn real_line() -> WeightedComplex {
    let l = vec![int_vec(&[1])];
    WeightedComplex::new(1, 1, l.clone(), vec![(Cell::cone(1, vec![], l.clone()).expect("line"), 1)]).expect("line")
}

/// `L^n_1 x R -> R` with the constant sections `y -> (-e_i, y)` and `y -> ((1, ..., 1), y)`.
pub fn product_family(n: usize) -> Result<Family> {
    if n < 3 {
        return Err(Error::Invalid("need at least 3 markings".into()));
    }
    let m = n - 1;
    let total = cross_product(&standard_line(n), &real_line());
    let g = PLMap::global(total, AffineMap::projection(m + 1, &[m]))?;
    let base = real_line();
    let mut leaf_points: Vec<QVec> = (0..m).map(|i| crate::arith::rat::neg(&unit_vec(m, i))).collect();
    leaf_points.push(vec![rat(1); m]);
    let sections = leaf_points
        .into_iter()
        .map(|p| {
            let mut rows = vec![zero_vec(1); m];
            rows.push(vec![rat(1)]);
            let mut t = p;
            t.push(rat(0));
            PLMap::global(base.clone(), AffineMap::new(1, rows, t)?)
        })
        .collect::<Result<_>>()?;
    Ok(Family {
        g,
        base,
        base_chart: SmoothChart::affine_space(1),
        labels: (1..=n).collect(),
        charts: vec![MarkingChart { domain: Domain::Everywhere, sections }],
    })
}

/// `B x_{M_n} M_{n+1} -> B` for a morphism `f: B -> M_n / L`, with sections
/// `x -> (x, s_i^alpha(f(x)))` on `f^{-1}(U_alpha)`.
pub fn pullback_family(f: &PLMap, base_chart: &SmoothChart, n: usize, alphas: &[Rat]) -> Result<Family> {
    let total = ModuliChart::with_zero(n)?;
    let target = ModuliChart::standard(n)?;
    if f.target_dim != target.dim() - 1 {
        return Err(Error::Dimension(format!("the map must land in M_{n} / L of dimension {}", target.dim() - 1)));
    }
    let ft = quotient_forgetful(&total, &target)?;
    let fp = fibre_product(f, &ft, &quotient_fan(&target))?;
    let base = f.source.clone();
    let d = base.ambient_dim();
    let charts = alphas
        .iter()
        .map(|a| {
            let sections = (1..=n)
                .map(|i| {
                    let s = quotient_section(&marking_section(n, i, a.clone())?);
                    let pieces = f
                        .pieces
                        .iter()
                        .map(|p| {
                            let sf = s.compose(p);
                            let mut rows: Vec<QVec> = (0..d).map(|k| unit_vec(d, k)).collect();
                            rows.extend(sf.matrix);
                            let mut t = zero_vec(d);
                            t.extend(sf.translation);
                            AffineMap::new(d, rows, t)
                        })
                        .collect::<Result<_>>()?;
                    PLMap::new(base.clone(), d + total.dim() - 1, pieces)
                })
                .collect::<Result<_>>()?;
            let domain = Domain::Alpha { chart: target.clone(), alpha: a.clone(), via: Some(f.clone()) };
            Ok(MarkingChart { domain, sections })
        })
        .collect::<Result<_>>()?;
    Ok(Family { g: fp.pi_x, base, base_chart: base_chart.clone(), labels: (1..=n).collect(), charts })
}
