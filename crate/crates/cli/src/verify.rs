//! Named checks run by `tropmod verify`.

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde_json::{json, Value};

use tropmod_core::arith::rat::{rat, scale, zero_vec};
use tropmod_core::families::{
    check_equivalence, check_integrality, check_marking, face_points, fibre_morphism, forgetful_family, is_locally_surjective,
    pullback_family, real_line,
};
use tropmod_core::fibreprod::{check_fibre_law, fibre_product, verify_deletion_contraction, verify_moduli_modification};
use tropmod_core::intersection::{point_cycle, point_fibre, power_divisor, Expr, RationalFunction, SmoothChart};
use tropmod_core::matroid::{bergman_fan, parse_matroid, Matroid};
use tropmod_core::moduli::quotient::{quotient_fan, quotient_forgetful, quotient_point, quotient_relabel, quotient_smooth_chart};
use tropmod_core::moduli::{forgetful, forgetful_fibre, marking_section, moduli_fan, moduli_smooth_chart, ModuliChart};
use tropmod_core::polyhedral::ops::equal_mod_refinement;
use tropmod_core::polyhedral::{AffineMap, PLMap};
use tropmod_core::Rat;

use crate::io::{parse_chart, read_map};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// Balancing of a Bergman fan (--matroid) or of M_n (--n).
    Balancing,
    /// The (rank - 1)-st power of max(x_e) on B(M) is the lineality line.
    LemmaMax,
    /// Ray and maximal cone counts of M_n.
    ModuliCount,
    /// The fibre of M_{n+1} -> M_n over the origin.
    ForgetfulFibre,
    /// Marking conditions for the forgetful family.
    Marking,
    /// The fibre morphism of a pull-back family recovers the map.
    Roundtrip,
    /// Distance differences over lattice steps are integral.
    Integrality,
    /// M_{n+1} x_{M_n} M_{n+1} against the equalizer.
    FibreProduct,
    /// M_{n+2} as a modification of M_{n+1} x_{M_n} M_{n+1}.
    Modification,
    /// B(M) as the modification of B(M \ e) along B(M / e).
    Deletion,
    /// The pull-back of the identity is isomorphic to the forgetful family.
    Equivalence,
}

pub struct Params {
    pub n: Option<usize>,
    pub matroid: Option<String>,
    pub f: Option<String>,
    pub chart: Option<String>,
    pub element: Option<usize>,
    pub alphas: Vec<Rat>,
    pub seed: u64,
}

impl Params {
    fn n(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    fn matroid(&self) -> Result<Matroid> {
        let spec = self.matroid.as_deref().context("this check needs --matroid")?;
        Ok(parse_matroid(spec)?)
    }
}

pub struct Report {
    pub name: String,
    pub checks: Vec<(String, bool)>,
}

impl Report {
    fn new(name: impl Into<String>) -> Self {
        Report { name: name.into(), checks: Vec::new() }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "check": self.name,
            "passed": self.passed(),
            "results": self.checks.iter().map(|(w, ok)| json!({"what": w, "passed": ok})).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (w, ok) in &self.checks {
            s.push_str(&format!("{} {w}\n", if *ok { "ok  " } else { "FAIL" }));
        }
        let good = self.checks.iter().filter(|(_, ok)| *ok).count();
        s.push_str(&format!("{}: {good}/{} checks passed", self.name, self.checks.len()));
        s
    }
}

pub fn run(check: Check, p: &Params) -> Result<Report> {
    match check {
        Check::Balancing => balancing(p),
        Check::LemmaMax => lemma_max(p),
        Check::ModuliCount => moduli_count(p),
        Check::ForgetfulFibre => forgetful_fibre_check(p),
        Check::Marking => marking(p),
        Check::Roundtrip => roundtrip(p),
        Check::Integrality => integrality(p),
        Check::FibreProduct => fibre_product_check(p),
        Check::Modification => modification(p),
        Check::Deletion => deletion(p),
        Check::Equivalence => equivalence(p),
    }
}

fn balancing(p: &Params) -> Result<Report> {
    let mut r = Report::new("balancing");
    let x = match &p.matroid {
        Some(_) => bergman_fan(&p.matroid()?),
        None => moduli_fan(p.n(5))?,
    };
    r.check("every weight is 1", x.weights().iter().all(|&w| w == 1));
    let defects = x.balancing_defects().len();
    r.check(format!("balanced at all {} codimension-one faces", x.codim_one().faces.len()), defects == 0);
    Ok(r)
}

fn lemma_max(p: &Params) -> Result<Report> {
    let m = p.matroid()?;
    let e = m.ground_size();
    let mut r = Report::new("lemma-max");
    let phi = RationalFunction::Global(Expr::Max((0..e).map(|i| Expr::coordinate(e, i)).collect()));
    let cut = power_divisor(&bergman_fan(&m), &phi, m.rank().saturating_sub(1))?;
    r.check("every weight is 1", cut.weights().iter().all(|&w| w == 1));
    r.check("the cycle is the lineality line", equal_mod_refinement(&cut, &point_cycle(e, &zero_vec(e), &[vec![rat(1); e]])));
    Ok(r)
}

fn double_factorial(k: u64) -> u64 {
    (1..=k).rev().step_by(2).product()
}

fn moduli_count(p: &Params) -> Result<Report> {
    let n = p.n(5);
    if n < 4 {
        bail!("moduli-count needs n >= 4");
    }
    let fan = moduli_fan(n)?;
    let rays = fan.face_lattice().faces_of_dim(fan.lineality_dim() + 1).len();
    let want_rays = (1usize << (n - 1)) - 1 - n;
    let want_cones = double_factorial(2 * n as u64 - 5) as usize;
    let mut r = Report::new("moduli-count");
    r.check(format!("{rays} rays, expected {want_rays}"), rays == want_rays);
    r.check(format!("{} maximal cones, expected {want_cones}", fan.num_cells()), fan.num_cells() == want_cones);
    Ok(r)
}

fn forgetful_fibre_check(p: &Params) -> Result<Report> {
    let n = p.n(4);
    let source = ModuliChart::with_zero(n)?;
    let target = ModuliChart::standard(n)?;
    let zero = zero_vec(target.dim());
    let fib = forgetful_fibre(n, &zero)?;
    let mut r = Report::new("forgetful-fibre");
    r.check("every weight is 1", fib.weights().iter().all(|&w| w == 1));
    let rays: Vec<_> = (1..=n).map(|i| source.split_vector(source.split_of_labels(&[0, i]).unwrap())).collect();
    let all_rays = fib.num_cells() == n
        && fib.cells().iter().all(|c| c.vertices().len() == 1 && c.rays().len() == 1)
        && rays.iter().all(|v| fib.cells().iter().any(|c| c.contains_direction(v)));
    r.check(format!("the cells are the {n} rays spanned by v_(0,i)"), all_rays);
    let cut = point_fibre(&forgetful(n)?, &moduli_fan(n)?, &moduli_smooth_chart(&target), &zero)?;
    r.check("agrees with the intersection-theoretic fibre", equal_mod_refinement(&cut, &fib));
    Ok(r)
}

fn marking(p: &Params) -> Result<Report> {
    let n = p.n(4);
    let fam = forgetful_family(n, &p.alphas)?;
    let mk = check_marking(&fam, p.seed)?;
    let mut r = Report::new("marking");
    r.check(format!("sections of g at {} sample points", mk.checked), mk.section_failures.is_empty());
    r.check("each section meets its own leaf", mk.leaf_failures.is_empty());
    r.check("sections agree on chart overlaps", mk.overlap_failures.is_empty());
    for a in &p.alphas {
        let ok = (1..=n).all(|i| {
            marking_section(n, i, a.clone())
                .and_then(|s| Ok(s.apply(&zero_vec(s.source.dim()))? == scale(a, &s.leaf_direction())))
                .unwrap_or(false)
        });
        r.check(format!("s_i(0) = {a} v_(0,i)"), ok);
    }
    Ok(r)
}

/// A test map into `M_n / L` with the smooth structure of its source.
fn named_map(p: &Params, n: usize) -> Result<(PLMap, SmoothChart)> {
    let mn = ModuliChart::standard(n)?;
    let name = p.f.as_deref().unwrap_or("id");
    Ok(match name {
        "id" => (PLMap::global(quotient_fan(&mn), AffineMap::identity(mn.dim() - 1))?, quotient_smooth_chart(&mn)),
        "forget" => {
            let src = ModuliChart::with_zero(n)?;
            (quotient_forgetful(&src, &mn)?, quotient_smooth_chart(&src))
        }
        "swap" => {
            let swap = |l: usize| match l {
                1 => 3,
                3 => 1,
                l => l,
            };
            (PLMap::global(quotient_fan(&mn), quotient_relabel(&mn, &mn, &swap)?)?, quotient_smooth_chart(&mn))
        }
        "const" => {
            let ray = quotient_point(&mn, &mn.split_vector(mn.split_of_labels(&[1, 2])?));
            (PLMap::global(real_line(), AffineMap::constant(1, ray))?, SmoothChart::affine_space(1))
        }
        path => {
            let f = read_map(path.as_ref())?;
            let chart = parse_chart(p.chart.as_deref().unwrap_or("affine"), f.source.ambient_dim())?;
            (f, chart)
        }
    })
}

fn roundtrip(p: &Params) -> Result<Report> {
    let n = p.n(4);
    let (f, chart) = named_map(p, n)?;
    let fam = pullback_family(&f, &chart, n, &p.alphas)?;
    let phi = fibre_morphism(&fam, p.seed)?;
    let mut r = Report::new("roundtrip");
    r.check(format!("the induced map equals f on all {} cells", f.source.num_cells()), phi.agrees_with(&f));
    Ok(r)
}

fn integrality(p: &Params) -> Result<Report> {
    let n = p.n(4);
    let fam = forgetful_family(n, &p.alphas)?;
    let rep = check_integrality(&fam, 100, p.seed)?;
    let mut r = Report::new("integrality");
    r.check(format!("{} lattice steps sampled", rep.checked), rep.checked == 100);
    r.check("every distance difference is integral", rep.failures.is_empty());
    Ok(r)
}

fn fibre_product_check(p: &Params) -> Result<Report> {
    let n = p.n(4);
    let src = ModuliChart::with_zero(n)?;
    let tgt = ModuliChart::standard(n)?;
    let ft = quotient_forgetful(&src, &tgt)?;
    let base = quotient_fan(&tgt);
    let fp = fibre_product(&ft, &ft, &base)?;
    let x = &fp.complex;
    let mut r = Report::new("fibre-product");
    r.check("every weight is 1", x.weights().iter().all(|&w| w == 1));
    r.check("balanced", x.is_balanced());
    let d = ft.source.ambient_dim();
    let in_equalizer = face_points(x).iter().all(|q| {
        let (a, b) = q.split_at(d);
        ft.source.contains_point(a) && ft.source.contains_point(b) && ft.eval(a).ok() == ft.eval(b).ok()
    });
    r.check("every face lies in the equalizer", in_equalizer);
    r.check("the first projection is locally surjective", is_locally_surjective(&fp.pi_x, &ft.source)?.passed());
    let sc = quotient_smooth_chart(&src);
    let tc = quotient_smooth_chart(&tgt);
    let pts: Vec<_> = face_points(&ft.source).into_iter().take(10).collect();
    let mut law = true;
    for q in &pts {
        law &= check_fibre_law(&fp, &ft, &ft, &base, &sc, &tc, q)?;
    }
    r.check(format!("fibres of the projection at {} points", pts.len()), law);
    Ok(r)
}

fn modification(p: &Params) -> Result<Report> {
    let n = p.n(3);
    let rep = verify_moduli_modification(n)?;
    let mut r = Report::new("modification");
    r.check(format!("the divisor is the diagonal of M_{}", n + 1), rep.divisor_is_diagonal);
    r.check(format!("the modification is M_{}", n + 2), rep.modification_matches);
    Ok(r)
}

fn deletion(p: &Params) -> Result<Report> {
    let m = p.matroid()?;
    let e = match p.element {
        Some(0) => bail!("--element is 1-based"),
        Some(e) => e - 1,
        None => (0..m.ground_size()).rev().find(|&e| !m.is_coloop(e)).context("every element is a coloop")?,
    };
    let rep = verify_deletion_contraction(&m, e)?;
    let mut r = Report::new("deletion");
    r.check(format!("B(M) is the modification of B(M \\ {})", e + 1), rep.modification_matches);
    r.check(format!("the divisor is B(M / {})", e + 1), rep.divisor_matches);
    Ok(r)
}

fn equivalence(p: &Params) -> Result<Report> {
    let n = p.n(4);
    let mn = ModuliChart::standard(n)?;
    let id = PLMap::global(quotient_fan(&mn), AffineMap::identity(mn.dim() - 1))?;
    let pulled = pullback_family(&id, &quotient_smooth_chart(&mn), n, &p.alphas)?;
    let ft = forgetful_family(n, &p.alphas)?;
    let rep = check_equivalence(&pulled, &ft, p.seed)?;
    let mut r = Report::new("equivalence");
    r.check("the image is the forgetful total space with weights", rep.image_matches);
    r.check("the reverse map inverts it", rep.inverse_ok);
    r.check("it commutes with the maps to the base", rep.over_base);
    r.check("both directions are pseudo-morphisms", rep.pseudo_both_ways);
    r.check("both directions are integral", rep.integral_both_ways);
    Ok(r)
}
