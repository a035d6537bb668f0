use tropmod_core::arith::rat::{int_vec, rat, ratio, scale, zero_vec};
use tropmod_core::families::*;
use tropmod_core::moduli::quotient::{quotient_fan, quotient_point, quotient_smooth_chart};
use tropmod_core::moduli::ModuliChart;
use tropmod_core::polyhedral::{AffineMap, PLMap};

fn m4_identity() -> PLMap {
    let c = ModuliChart::standard(4).unwrap();
    PLMap::global(quotient_fan(&c), AffineMap::identity(2)).unwrap()
}

#[test]
fn forgetful_family_is_a_family() {
    let fam = forgetful_family(4, &[rat(1), ratio(7, 2)]).unwrap();
    let pre = check_prefamily(&fam.g, &fam.base, &fam.base_chart, 4).unwrap();
    assert!(pre.passed(), "{pre:?}");
    let mk = check_marking(&fam, 7).unwrap();
    assert!(mk.passed(), "{mk:?}");
    assert!(mk.checked > 0);
}

#[test]
fn distances_over_a_ray() {
    let fam = forgetful_family(4, &[rat(5)]).unwrap();
    let c = ModuliChart::standard(4).unwrap();
    let lam = ratio(3, 2);
    let b = quotient_point(&c, &scale(&lam, &c.split_vector(c.split_of_labels(&[1, 2]).unwrap())));
    assert_eq!(distance_map(&fam, &b).unwrap(), scale(&lam, &int_vec(&[0, 1, 1, 1, 1, 0])));
    assert_eq!(distance_map(&fam, &zero_vec(2)).unwrap(), zero_vec(6));
}

#[test]
fn forgetful_family_induces_the_identity() {
    let fam = forgetful_family(4, &[rat(1)]).unwrap();
    let phi = fibre_morphism(&fam, 3).unwrap();
    assert!(phi.agrees_with(&m4_identity()));
    assert!(is_pseudomorphism(&phi).passed());
}

#[test]
fn product_family_is_constant() {
    let fam = product_family(3).unwrap();
    let pre = check_prefamily(&fam.g, &fam.base, &fam.base_chart, 3).unwrap();
    assert!(pre.passed(), "{pre:?}");
    assert!(check_marking(&fam, 1).unwrap().passed());
    for y in [-2, 0, 5] {
        assert_eq!(distance_map(&fam, &[rat(y)]).unwrap(), zero_vec(3));
    }
}

#[test]
fn pullback_of_identity_round_trips() {
    let f = m4_identity();
    let c = ModuliChart::standard(4).unwrap();
    let fam = pullback_family(&f, &quotient_smooth_chart(&c), 4, &[rat(1)]).unwrap();
    assert!(check_prefamily(&fam.g, &fam.base, &fam.base_chart, 4).unwrap().passed());
    assert!(check_marking(&fam, 2).unwrap().passed());
    let phi = fibre_morphism(&fam, 5).unwrap();
    assert!(phi.agrees_with(&f));
    let ft = forgetful_family(4, &[rat(1)]).unwrap();
    let r = check_equivalence(&fam, &ft, 9).unwrap();
    assert!(r.is_isomorphism(), "{:?}", (r.image_matches, r.inverse_ok, r.over_base, r.pseudo_both_ways, r.integral_both_ways));
}

#[test]
fn transport_contracts_the_edge() {
    let fam = forgetful_family(4, &[rat(3)]).unwrap();
    let c = ModuliChart::standard(4).unwrap();
    let b = quotient_point(&c, &c.split_vector(c.split_of_labels(&[1, 2]).unwrap()));
    let t = fibre_transport(&fam, &b, &zero_vec(2)).unwrap();
    assert_eq!(t.from.edges.len(), 1);
    assert!(matches!(t.edges[0], EdgeImage::Vertex(_)));
    assert!(!t.is_homeomorphism());
    let same = fibre_transport(&fam, &b, &b).unwrap();
    assert!(same.is_homeomorphism());
    assert_eq!(same.leaves, vec![0, 1, 2, 3]);
}
