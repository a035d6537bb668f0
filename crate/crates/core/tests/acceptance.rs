//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the test harness so the
//! lines are always printed; exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tropmod_core::arith::rat::{add, is_integral, rat, ratio, scale, sub, unit_vec, zero_vec, QVec};
use tropmod_core::families::*;
use tropmod_core::fibreprod::{check_fibre_law, fibre_product, verify_deletion_contraction, verify_moduli_modification};
use tropmod_core::intersection::{point_cycle, point_fibre, power_divisor, Expr, RationalFunction, SmoothChart};
use tropmod_core::matroid::{bergman_fan, Matroid};
use tropmod_core::moduli::quotient::{
    quotient_fan, quotient_forgetful, quotient_forgetful_fibre, quotient_map, quotient_point, quotient_relabel,
    quotient_smooth_chart,
};
use tropmod_core::moduli::{
    forgetful, forgetful_fibre, marking_section, moduli_fan, moduli_smooth_chart, random_tree, ModuliChart,
};
use tropmod_core::polyhedral::ops::equal_mod_refinement;
use tropmod_core::polyhedral::{AffineMap, Cell, PLMap, WeightedComplex};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn five_matroids() -> Vec<(&'static str, Matroid)> {
    vec![
        ("U(2,3)", Matroid::uniform(2, 3).unwrap()),
        ("U(2,4)", Matroid::uniform(2, 4).unwrap()),
        ("U(3,4)", Matroid::uniform(3, 4).unwrap()),
        ("M(K4)", Matroid::complete_graph(4).unwrap()),
        ("M(K5)", Matroid::complete_graph(5).unwrap()),
    ]
}

fn balancing() -> Check {
    for (name, m) in five_matroids() {
        let b = bergman_fan(&m);
        ensure!(b.weights().iter().all(|&w| w == 1), "{name} has a weight other than 1");
        ensure!(b.is_balanced(), "{name} is not balanced");
    }
    for n in 4..=6 {
        ensure!(moduli_fan(n).map_err(err)?.is_balanced(), "M_{n} is not balanced");
    }
    Ok(())
}

fn max_power_divisor() -> Check {
    for (name, m) in five_matroids() {
        let e = m.ground_size();
        let max_all = RationalFunction::Global(Expr::Max((0..e).map(|i| Expr::coordinate(e, i)).collect()));
        let cut = power_divisor(&bergman_fan(&m), &max_all, m.rank() - 1).map_err(err)?;
        let line = point_cycle(e, &zero_vec(e), &[vec![rat(1); e]]);
        ensure!(cut.weights().iter().all(|&w| w == 1), "{name}: weight other than 1");
        ensure!(equal_mod_refinement(&cut, &line), "{name}: not the lineality line");
    }
    Ok(())
}

/// Trivalent trees on `n` leaves by inserting leaves into edges, as sets of splits.
fn trivalent_trees(n: usize) -> BTreeSet<BTreeSet<u64>> {
    // A tree is an edge list on nodes; leaves are nodes 0..n, internal nodes follow.
    fn splits(edges: &[(usize, usize)], n: usize) -> BTreeSet<u64> {
        let full = (1u64 << n) - 1;
        let mut out = BTreeSet::new();
        for (k, &(a, _)) in edges.iter().enumerate() {
            let mut seen = BTreeSet::from([a]);
            let mut stack = vec![a];
            while let Some(v) = stack.pop() {
                for (j, &(x, y)) in edges.iter().enumerate() {
                    if j == k {
                        continue;
                    }
                    for (p, q) in [(x, y), (y, x)] {
                        if p == v && seen.insert(q) {
                            stack.push(q);
                        }
                    }
                }
            }
            let mask = seen.iter().filter(|&&v| v < n).fold(0u64, |m, &v| m | 1 << v);
            let m = if mask >> (n - 1) & 1 == 1 { full & !mask } else { mask };
            if m.count_ones() >= 2 && (full & !m).count_ones() >= 2 {
                out.insert(m);
            }
        }
        out
    }
    let mut trees: Vec<(Vec<(usize, usize)>, usize)> = vec![(vec![(0, 100), (1, 100), (2, 100)], 101)];
    for leaf in 3..n {
        let mut next = Vec::new();
        for (edges, fresh) in &trees {
            for k in 0..edges.len() {
                let (a, b) = edges[k];
                let mut e = edges.clone();
                e[k] = (a, *fresh);
                e.push((*fresh, b));
                e.push((leaf, *fresh));
                next.push((e, fresh + 1));
            }
        }
        trees = next;
    }
    trees.iter().map(|(e, _)| splits(e, n)).collect()
}

fn moduli_combinatorics() -> Check {
    for (n, rays, cones) in [(5, 10, 15), (6, 25, 105)] {
        let fan = moduli_fan(n).map_err(err)?;
        let fl = fan.face_lattice();
        let found_rays = fl.faces_of_dim(fan.lineality_dim() + 1).len();
        ensure!(found_rays == rays, "M_{n} has {found_rays} rays, expected {rays}");
        ensure!(fan.num_cells() == cones, "M_{n} has {} maximal cones, expected {cones}", fan.num_cells());
        let trees = trivalent_trees(n);
        let all_splits: BTreeSet<u64> = trees.iter().flatten().copied().collect();
        ensure!(trees.len() == cones, "tree enumeration gives {} trees", trees.len());
        ensure!(all_splits.len() == rays, "tree enumeration gives {} splits", all_splits.len());
    }
    Ok(())
}

fn forgetful_fibre_at_origin() -> Check {
    for n in 3..=4 {
        let s = ModuliChart::with_zero(n).map_err(err)?;
        let zero = zero_vec(ModuliChart::standard(n).map_err(err)?.dim());
        let fib = forgetful_fibre(n, &zero).map_err(err)?;
        ensure!(fib.weights().iter().all(|&w| w == 1), "n={n}: an edge has weight other than 1");
        let mut hit = BTreeSet::new();
        for c in fib.cells() {
            ensure!(c.rays().len() == 1, "n={n}: a cell is not a single ray");
            let i = (1..=n)
                .find(|&i| {
                    let v = s.split_vector(s.split_of_labels(&[0, i]).unwrap());
                    c.contains_direction(&v)
                        && c.contains_direction(&c.rays()[0])
                        && Cell::cone(s.dim(), vec![v], c.lineality().to_vec()).is_ok_and(|d| d == *c)
                })
                .ok_or(format!("n={n}: a ray is not some v_(0,i)"))?;
            hit.insert(i);
        }
        ensure!(hit.len() == n && fib.num_cells() == n, "n={n}: the rays are not exactly v_(0,i)");
        let base = moduli_fan(n).map_err(err)?;
        let chart = ModuliChart::standard(n).map_err(err)?;
        let cut = point_fibre(&forgetful(n).map_err(err)?, &base, &moduli_smooth_chart(&chart), &zero).map_err(err)?;
        ensure!(equal_mod_refinement(&cut, &fib), "n={n}: disagrees with the point fibre");
    }
    Ok(())
}

fn marking_axioms() -> Check {
    for n in 4..=5 {
        let alphas = [rat(1), ratio(7, 2)];
        let fam = forgetful_family(n, &alphas).map_err(err)?;
        let r = check_marking(&fam, 11).map_err(err)?;
        ensure!(r.passed(), "n={n}: {r:?}");
        for a in &alphas {
            for i in 1..=n {
                let s = marking_section(n, i, a.clone()).map_err(err)?;
                let at0 = s.apply(&zero_vec(s.source.dim())).map_err(err)?;
                ensure!(at0 == scale(a, &s.leaf_direction()), "n={n}: s_{i}(0) is not alpha v_(0,i)");
            }
        }
    }
    Ok(())
}

struct TestMap {
    name: &'static str,
    f: PLMap,
    chart: SmoothChart,
    /// The base as a Bergman fan: matroid and the map from its coordinates to the base.
    matroid: Matroid,
    embed: AffineMap,
}

fn moduli_embed(chart: &ModuliChart) -> AffineMap {
    quotient_map(chart)
}

fn test_maps() -> Vec<TestMap> {
    let m4 = ModuliChart::standard(4).unwrap();
    let m5 = ModuliChart::with_zero(4).unwrap();
    let fan4 = quotient_fan(&m4);
    let swap = |l: usize| match l {
        1 => 3,
        3 => 1,
        l => l,
    };
    let ray = quotient_point(&m4, &m4.split_vector(m4.split_of_labels(&[1, 2]).unwrap()));
    let line = real_line();
    let line_embed = AffineMap::from_ints(2, &[vec![1, -1]]).unwrap();
    vec![
        TestMap {
            name: "identity of M4",
            f: PLMap::global(fan4.clone(), AffineMap::identity(2)).unwrap(),
            chart: quotient_smooth_chart(&m4),
            matroid: Matroid::complete_graph(3).unwrap(),
            embed: moduli_embed(&m4),
        },
        TestMap {
            name: "forgetful M5 -> M4",
            f: quotient_forgetful(&m5, &m4).unwrap(),
            chart: quotient_smooth_chart(&m5),
            matroid: Matroid::complete_graph(4).unwrap(),
            embed: moduli_embed(&m5),
        },
        TestMap {
            name: "relabeling 1 <-> 3 of M4",
            f: PLMap::global(fan4, quotient_relabel(&m4, &m4, &swap).unwrap()).unwrap(),
            chart: quotient_smooth_chart(&m4),
            matroid: Matroid::complete_graph(3).unwrap(),
            embed: moduli_embed(&m4),
        },
        TestMap {
            name: "constant map to v_12",
            f: PLMap::global(line, AffineMap::constant(1, ray)).unwrap(),
            chart: SmoothChart::affine_space(1),
            matroid: Matroid::uniform(2, 2).unwrap(),
            embed: line_embed,
        },
    ]
}

fn round_trip() -> Check {
    for t in test_maps() {
        let fam = pullback_family(&t.f, &t.chart, 4, &[rat(2)]).map_err(err)?;
        let phi = fibre_morphism(&fam, 21).map_err(err)?;
        ensure!(phi.agrees_with(&t.f), "{}: the induced map differs", t.name);
    }
    Ok(())
}

/// Base point pairs `b`, `b + v` in a common cell with `v` in its lattice.
fn lattice_pairs(fam: &Family, count: usize, seed: u64) -> Vec<(QVec, QVec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let cells = fam.base.cells();
    let mut tries = 0;
    while out.len() < count && tries < 50 * count {
        tries += 1;
        let c = &cells[rand::Rng::random_range(&mut rng, 0..cells.len())];
        let b = random_point(c, &mut rng);
        let lat = c.lattice();
        let mut v = zero_vec(b.len());
        for l in lat {
            v = add(&v, &scale(&rat(rand::Rng::random_range(&mut rng, -1..=1)), l));
        }
        let b2 = add(&b, &v);
        if c.contains(&b2) && fam.chart_at(&b).is_some() && fam.chart_at(&b2).is_some() {
            out.push((b, b2));
        }
    }
    out
}

fn integrality() -> Check {
    let m4 = ModuliChart::standard(4).unwrap();
    let id = PLMap::global(quotient_fan(&m4), AffineMap::identity(2)).unwrap();
    let fams = vec![
        ("forgetful over M4", forgetful_family(4, &[rat(20)]).map_err(err)?),
        ("forgetful over M5", forgetful_family(5, &[rat(20)]).map_err(err)?),
        ("product", product_family(4).map_err(err)?),
        ("pullback of the identity", pullback_family(&id, &quotient_smooth_chart(&m4), 4, &[rat(20)]).map_err(err)?),
    ];
    for (name, fam) in fams {
        let pairs = lattice_pairs(&fam, 100, 31);
        ensure!(pairs.len() == 100, "{name}: only {} sample pairs", pairs.len());
        for (b, b2) in pairs {
            let d = sub(&distance_map(&fam, &b2).map_err(err)?, &distance_map(&fam, &b).map_err(err)?);
            ensure!(is_integral(&d), "{name}: non-integral difference between {b:?} and {b2:?}");
        }
    }
    Ok(())
}

fn smooth_linearity() -> Check {
    for t in test_maps() {
        let fam = pullback_family(&t.f, &t.chart, 4, &[rat(2)]).map_err(err)?;
        let phi = fibre_morphism(&fam, 5).map_err(err)?;
        ensure!(is_pseudomorphism(&phi).passed(), "{}: not a pseudo-morphism", t.name);
        ensure!(linear_on_flats(&phi, &t.matroid, &t.embed).map_err(err)?, "{}: not additive on flats", t.name);
    }
    for n in 4..=5 {
        let fam = forgetful_family(n, &[rat(2)]).map_err(err)?;
        let phi = fibre_morphism(&fam, 5).map_err(err)?;
        let chart = ModuliChart::standard(n).map_err(err)?;
        let k = Matroid::complete_graph(n - 1).map_err(err)?;
        ensure!(linear_on_flats(&phi, &k, &moduli_embed(&chart)).map_err(err)?, "forgetful n={n}: not additive on flats");
    }
    let fam = product_family(4).map_err(err)?;
    let phi = fibre_morphism(&fam, 5).map_err(err)?;
    let embed = AffineMap::from_ints(2, &[vec![1, -1]]).map_err(err)?;
    ensure!(linear_on_flats(&phi, &Matroid::uniform(2, 2).map_err(err)?, &embed).map_err(err)?, "product: not additive");
    Ok(())
}

fn fibre_product_equalizer() -> Check {
    let m5 = ModuliChart::with_zero(4).map_err(err)?;
    let m4 = ModuliChart::standard(4).map_err(err)?;
    let ft = quotient_forgetful(&m5, &m4).map_err(err)?;
    let base = quotient_fan(&m4);
    let fp = fibre_product(&ft, &ft, &base).map_err(err)?;
    let x = &fp.complex;
    ensure!(x.weights().iter().all(|&w| w == 1), "a weight is not 1");
    ensure!(x.is_balanced(), "not balanced");
    // Every face lies in the equalizer.
    let d = m5.dim() - 1;
    for p in face_points(x) {
        let (a, b) = p.split_at(d);
        ensure!(ft.source.contains_point(a) && ft.source.contains_point(b), "{p:?} leaves M5 x M5");
        ensure!(ft.eval(a).map_err(err)? == ft.eval(b).map_err(err)?, "{p:?} is not in the equalizer");
    }
    // Random points of the equalizer lie in the fibre product.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..30 {
        let t = random_tree(&m5, &mut rng, 5, 2);
        let a = quotient_point(&m5, &t.to_chart_point());
        let fib = quotient_forgetful_fibre(&m5, &m4, 0, &ft.eval(&a).map_err(err)?).map_err(err)?;
        let c = &fib.cells()[rand::Rng::random_range(&mut rng, 0..fib.num_cells())];
        let b = random_point(c, &mut rng);
        let mut p = a.clone();
        p.extend(b);
        ensure!(x.contains_point(&p), "equalizer point {p:?} is missing");
    }
    let surj = is_locally_surjective(&fp.pi_x, &ft.source).map_err(err)?;
    ensure!(surj.passed(), "pi_X is not locally surjective at {:?}", surj.failures);
    let sc = quotient_smooth_chart(&m5);
    let tc = quotient_smooth_chart(&m4);
    let mut points = face_points(&ft.source);
    for c in ft.source.cells().iter().take(10 - points.len().min(10)) {
        points.push(random_point(c, &mut rng));
    }
    points.truncate(10);
    ensure!(points.len() == 10, "too few sample points");
    for p in &points {
        ensure!(check_fibre_law(&fp, &ft, &ft, &base, &sc, &tc, p).map_err(err)?, "fibre law fails at {p:?}");
    }
    Ok(())
}

fn moduli_modification() -> Check {
    for n in 3..=4 {
        let r = verify_moduli_modification(n).map_err(err)?;
        ensure!(r.divisor_is_diagonal, "n={n}: the divisor is not the diagonal");
        ensure!(r.modification_matches, "n={n}: the modification is not M_{}", n + 2);
    }
    Ok(())
}

fn deletion_contraction() -> Check {
    for (name, m, e) in [("U(2,3)", Matroid::uniform(2, 3).unwrap(), 2), ("M(K4)", Matroid::complete_graph(4).unwrap(), 0)] {
        let r = verify_deletion_contraction(&m, e).map_err(err)?;
        ensure!(r.modification_matches, "{name}: the modification is not B(M)");
        ensure!(r.divisor_matches, "{name}: the divisor is not B(M/e)");
    }
    Ok(())
}

fn cone_complex(n: usize, rays: &[QVec], lin: Vec<QVec>) -> WeightedComplex {
    let cells = rays.iter().map(|r| (Cell::cone(n, vec![r.clone()], lin.clone()).unwrap(), 1)).collect();
    WeightedComplex::new(n, 1 + lin.len(), lin, cells).unwrap()
}

fn negative_controls() -> Check {
    let l3 = standard_line(3);
    let neg = |v: QVec| v.into_iter().map(|x| -x).collect::<QVec>();
    let x1 = cone_complex(2, &[neg(unit_vec(2, 0)), neg(unit_vec(2, 1)), vec![rat(1), rat(1)]], vec![]);
    let x2 = cone_complex(2, &[unit_vec(2, 0), neg(unit_vec(2, 0)), unit_vec(2, 1), neg(unit_vec(2, 1))], vec![]);
    let p: QVec = vec![rat(0), rat(0), rat(-1), rat(0)];
    for (name, x) in [("pi_1", x1), ("pi_2", x2)] {
        let total = tropmod_core::polyhedral::ops::cross_product(&l3, &x);
        let f = PLMap::global(total, AffineMap::projection(4, &[3])).map_err(err)?;
        ensure!(!is_locally_surjective_at(&f, &real_line(), &p).map_err(err)?, "{name} passes at the bad point");
        ensure!(!is_locally_surjective(&f, &real_line()).map_err(err)?.passed(), "{name} passes");
    }
    let ray = cone_complex(2, &[unit_vec(2, 0)], vec![]);
    ensure!(!ray.is_balanced(), "a single ray is balanced");
    let mut fam = forgetful_family(4, &[rat(1)]).map_err(err)?;
    fam.charts[0].sections[1] = fam.charts[0].sections[0].clone();
    let r = check_marking(&fam, 3).map_err(err)?;
    ensure!(!r.leaf_failures.is_empty(), "the doubled section passes condition (2)");
    ensure!(r.section_failures.is_empty(), "the doubled section should still be a section");
    Ok(())
}

fn pullback_equivalence() -> Check {
    let m4 = ModuliChart::standard(4).map_err(err)?;
    let id = PLMap::global(quotient_fan(&m4), AffineMap::identity(2)).map_err(err)?;
    let pulled = pullback_family(&id, &quotient_smooth_chart(&m4), 4, &[rat(1)]).map_err(err)?;
    let ft = forgetful_family(4, &[rat(1)]).map_err(err)?;
    let r = check_equivalence(&pulled, &ft, 13).map_err(err)?;
    ensure!(r.image_matches, "the image is not M5");
    ensure!(r.inverse_ok, "the inverse does not invert");
    ensure!(r.over_base && r.pseudo_both_ways && r.integral_both_ways, "not an isomorphism over the base");
    Ok(())
}

fn main() {
    let criteria: Vec<(&str, fn() -> Check)> = vec![
        ("balancing of Bergman and moduli fans", balancing),
        ("max-all power divisor is the lineality line", max_power_divisor),
        ("rays and maximal cones of M5 and M6", moduli_combinatorics),
        ("forgetful fibre over the origin", forgetful_fibre_at_origin),
        ("marking axioms for the forgetful map", marking_axioms),
        ("fibre morphism of pull-backs round trip", round_trip),
        ("integrality of the distance map", integrality),
        ("fibre morphisms are linear on smooth bases", smooth_linearity),
        ("fibre product M5 x_M4 M5", fibre_product_equalizer),
        ("M_(n+2) as a modification, n = 3, 4", moduli_modification),
        ("deletion and contraction modification", deletion_contraction),
        ("negative controls", negative_controls),
        ("equivalence of pull-back of id and forgetful family", pullback_equivalence),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.1}s)", k + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {e}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
